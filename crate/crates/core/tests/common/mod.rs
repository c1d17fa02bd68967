#![allow(dead_code)]

use std::sync::Arc;

use hyperlab_core::group::{Group, GroupElement, Letter};
use proptest::prelude::*;

/// Elements of `group` from raw words of up to `max_len` letters.
pub fn element(group: Arc<Group>, max_len: usize) -> impl Strategy<Value = GroupElement> {
    let n = group.alphabet().len() as u8;
    prop::collection::vec(0..n, 0..=max_len).prop_map(move |raw| {
        let word: Vec<Letter> = raw.into_iter().map(Letter).collect();
        group.normalize(&word).expect("letters come from the alphabet")
    })
}

pub fn free2() -> Arc<Group> {
    Group::free(2).unwrap()
}
