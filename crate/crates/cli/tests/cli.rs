use std::process::{Command, Output};

use hyperlab::CSV_HEADER;

fn hyperlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn cocycle_example_reports_norm_and_bound() {
    let out = hyperlab(&["check", "--suite", "cocycle", "--group", "free:2", "--K", "1", "--p", "2", "--g", "ab"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema_version"], "1");
    let checks = r["checks"].as_array().unwrap();
    let norm = checks.iter().find(|c| c["name"] == "norm[p=2]").unwrap();
    assert_eq!(norm["fields"]["norm_p"], "4/1");
    let prop = checks.iter().find(|c| c["name"] == "properness").unwrap();
    assert_eq!(prop["fields"]["lower_bound"].as_f64(), Some(1.0));
}

#[test]
fn csv_has_documented_header() {
    let out = hyperlab(&["check", "--suite", "boundary", "--group", "free:2", "--radius", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert!(text.lines().skip(1).all(|l| l.starts_with("boundary,")));
}

#[test]
fn exit_codes() {
    assert_eq!(hyperlab(&["check", "--suite", "bogus", "--group", "free:2"]).status.code(), Some(2));
    assert_eq!(hyperlab(&["check", "--suite", "kms", "--group", "free:x"]).status.code(), Some(2));
    assert_eq!(hyperlab(&["check", "--suite", "kms", "--group", "surface:2"]).status.code(), Some(2));
    assert_eq!(
        hyperlab(&["check", "--suite", "cocycle", "--group", "free:2", "--K", "1", "--C", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hyperlab(&["check", "--suite", "strong-hyp", "--group", "free:2", "--radius", "6"]).status.code(),
        Some(2),
        "exhaustive scan above the work cap"
    );
    assert_eq!(
        hyperlab(&["check", "--suite", "boundary", "--group", "free:2", "--out", "/nonexistent/dir/r.json"]).status.code(),
        Some(3)
    );
    assert_eq!(
        hyperlab(&["check", "--config", "/nonexistent/run.conf"]).status.code(),
        Some(3)
    );
}

#[test]
fn failed_check_exits_one_with_witness() {
    // the surface word metric is not strongly hyperbolic on the radius-3 ball
    let out = hyperlab(&["check", "--suite", "strong-hyp", "--group", "surface:2", "--radius", "3", "--samples", "200000", "--seed", "1"]);
    let r = json(&out);
    let four = &r["checks"][0];
    if four["passed"] == false {
        assert_eq!(out.status.code(), Some(1));
        assert!(four["witness"]["detail"].as_str().unwrap().contains("o="));
        assert_eq!(four["witness"]["seed"], 1);
    } else {
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out_path = dir.path().join("report.csv");
    std::fs::write(
        &conf,
        format!("suite = boundary\ngroup = free:3\nradius = 1\nformat = csv\nout = {}\n", out_path.display()),
    )
    .unwrap();
    let out = hyperlab(&["check", "--config", conf.to_str().unwrap(), "--group", "free:2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    // free:2 at radius 1 has 4 non-identity elements
    assert!(text.contains("boundary,conformality,true,elements,4"));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["check", "--suite", "cocycle", "--group", "free:2", "--seed", "11", "--format", "csv"];
    assert_eq!(hyperlab(&args).stdout, hyperlab(&args).stdout);
}
