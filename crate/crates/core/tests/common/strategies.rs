#![allow(dead_code)]

use aclens_core::mask::{AccessMask, CoarseLevel, PermissionAttribute};
use aclens_core::model::{Ace, AceKind, InheritFlags, Provenance, Sid};
use proptest::prelude::*;

pub const POOL: [&str; 4] = ["S-1-1-0", "S-1-5-32-545", "S-1-5-21-7-1001", "S-1-5-21-7-1002"];

pub fn sid(i: usize) -> Sid {
    Sid::parse(POOL[i]).unwrap()
}

pub fn mask() -> impl Strategy<Value = AccessMask> {
    prop_oneof![
        (1u32..(1 << 14)).prop_map(|index| {
            PermissionAttribute::ALL
                .into_iter()
                .enumerate()
                .filter(|(i, _)| index & (1 << i) != 0)
                .map(|(_, a)| a)
                .collect::<AccessMask>()
        }),
        (0usize..6).prop_map(|i| CoarseLevel::STANDARD[i].canonical_mask().unwrap()),
    ]
}

pub fn flags() -> impl Strategy<Value = InheritFlags> {
    let all: Vec<InheritFlags> = InheritFlags::all_valid().collect();
    (0..all.len()).prop_map(move |i| all[i])
}

pub fn kind() -> impl Strategy<Value = AceKind> {
    prop_oneof![Just(AceKind::Allow), Just(AceKind::Deny)]
}

/// ACE for one of the pooled principals at distance 0..=3.
pub fn ace_for(principals: std::ops::Range<usize>) -> impl Strategy<Value = Ace> {
    (principals, kind(), mask(), flags(), 0u32..4).prop_map(|(p, k, m, f, d)| {
        let prov = Provenance::inherited(d).unwrap_or(Provenance::Explicit);
        Ace::new(sid(p), k, m, f, prov).unwrap()
    })
}

pub fn ace() -> impl Strategy<Value = Ace> {
    ace_for(0..POOL.len())
}

pub fn aces(max: usize) -> impl Strategy<Value = Vec<Ace>> {
    prop::collection::vec(ace(), 0..max)
}
