mod common;

use std::collections::BTreeSet;

use aclens_core::accumulation::{brute_force_effective, effective_mask, evaluate_acl};
use aclens_core::mask::{normalize_generic, AccessMask, PermissionAttribute};
use aclens_core::model::{canonicalize_acl, Ace, AceKind, Provenance, Sid};
use common::strategies::{ace, ace_for, aces, flags, mask, sid, POOL};
use proptest::prelude::*;

fn all_sids() -> BTreeSet<Sid> {
    (0..POOL.len()).map(sid).collect()
}

/// The first ACE in list order that mentions each attribute decides it.
fn first_match(acl: &[Ace], sids: &BTreeSet<Sid>) -> AccessMask {
    let mut granted = 0;
    for attr in PermissionAttribute::ALL {
        let decider = acl
            .iter()
            .find(|a| sids.contains(a.principal()) && normalize_generic(a.mask()).contains(attr));
        if decider.is_some_and(Ace::is_allow) {
            granted |= attr.flag();
        }
    }
    AccessMask::new(granted).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn per_bit_first_match(entries in aces(10), subset in prop::collection::btree_set(0usize..4, 0..5)) {
        let sids: BTreeSet<Sid> = subset.into_iter().map(sid).collect();
        let acl = canonicalize_acl(entries);
        let r = evaluate_acl(&acl, &sids);
        prop_assert_eq!(r.granted(), first_match(acl.entries(), &sids));
        for (attr, decision) in r.per_bit_provenance() {
            let expected = acl
                .iter()
                .position(|a| sids.contains(a.principal()) && normalize_generic(a.mask()).contains(*attr));
            prop_assert_eq!(decision.as_ref().map(|d| d.index), expected);
            if let Some(d) = decision {
                prop_assert_eq!(&d.ace, &acl.entries()[d.index]);
            }
        }
        if r.short_circuited() {
            prop_assert_eq!(r.granted(), AccessMask::EMPTY);
        }
    }

    #[test]
    fn adding_a_deny_never_grants_more(entries in aces(10), extra_mask in mask(), f in flags(), who in 0usize..4, d in 0u32..4) {
        let sids = all_sids();
        let before = evaluate_acl(&canonicalize_acl(entries.clone()), &sids).granted();
        let prov = Provenance::inherited(d).unwrap_or(Provenance::Explicit);
        let mut more = entries;
        more.push(Ace::new(sid(who), AceKind::Deny, extra_mask, f, prov).unwrap());
        let after = evaluate_acl(&canonicalize_acl(more), &sids).granted();
        prop_assert_eq!(after.difference(before), AccessMask::EMPTY);
    }

    /// The newcomer (pool index 3) holds only allows or only denies.
    #[test]
    fn membership_monotonicity(
        base in prop::collection::vec(ace_for(0..3), 0..8),
        newcomer in prop::collection::vec(ace_for(3..4), 0..4),
        allows in any::<bool>(),
    ) {
        let kind = if allows { AceKind::Allow } else { AceKind::Deny };
        let newcomer: Vec<Ace> = newcomer
            .into_iter()
            .map(|a| Ace::new(a.principal().clone(), kind, a.mask(), a.flags(), a.provenance()).unwrap())
            .collect();
        let acl = canonicalize_acl(base.into_iter().chain(newcomer).collect());
        let small: BTreeSet<Sid> = (0..3).map(sid).collect();
        let before = evaluate_acl(&acl, &small).granted();
        let after = evaluate_acl(&acl, &all_sids()).granted();
        if allows {
            prop_assert_eq!(before.difference(after), AccessMask::EMPTY);
        } else {
            prop_assert_eq!(after.difference(before), AccessMask::EMPTY);
        }
    }

    #[test]
    fn explicit_allow_shadows_inherited_deny(m in mask(), d in 1u32..5, who in 0usize..4) {
        let deny = Ace::new(sid(who), AceKind::Deny, m, aclens_core::model::InheritFlags::CI, Provenance::inherited(d).unwrap()).unwrap();
        let allow = Ace::allow(sid(who), m, aclens_core::model::InheritFlags::NONE).unwrap();
        let r = evaluate_acl(&canonicalize_acl(vec![deny, allow]), &all_sids());
        prop_assert_eq!(r.granted(), normalize_generic(m));
    }

    #[test]
    fn single_ace(a in ace()) {
        let r = evaluate_acl(&canonicalize_acl(vec![a.clone()]), &all_sids());
        let expected = if a.is_allow() { normalize_generic(a.mask()) } else { AccessMask::EMPTY };
        prop_assert_eq!(r.granted(), expected);
    }
}

#[test]
fn matches_brute_force_on_seeded_trees() {
    for seed in 0..300 {
        let (_, tree, graph) = common::small(seed);
        let principals: Vec<Sid> = graph.principals().map(|p| p.sid().clone()).collect();
        for id in tree.ids() {
            let path = tree.node(id).path().to_string();
            for p in &principals {
                let fast = effective_mask(&tree, &path, p, &graph).unwrap().granted();
                let slow = brute_force_effective(&tree, &path, p, &graph).unwrap();
                assert_eq!(fast, slow, "seed {seed} path {path} principal {p}");
            }
        }
    }
}
