//! Effective permission of a principal on a node.
//!
//! Each of the fourteen attributes is decided independently by the first
//! applicable ACE in canonical order that mentions it: explicit deny,
//! explicit allow, then inherited entries nearest first with deny ahead of
//! allow. Attributes no ACE mentions are not granted.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::mask::{normalize_generic, AccessMask, PermissionAttribute};
use crate::membership::GroupGraph;
use crate::model::{Ace, Acl, AceKind, NodeId, Provenance, Sid};
use crate::propagation::MaterializedTree;

/// The ACE that decided an attribute, with its position in the node's ACL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub index: usize,
    pub ace: Ace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveResult {
    granted: AccessMask,
    per_bit: BTreeMap<PermissionAttribute, Option<Decision>>,
    short_circuited: bool,
}

impl EffectiveResult {
    pub fn granted(&self) -> AccessMask {
        self.granted
    }

    /// Deciding ACE per attribute; `None` when no ACE mentions it.
    pub fn per_bit_provenance(&self) -> &BTreeMap<PermissionAttribute, Option<Decision>> {
        &self.per_bit
    }

    pub fn decision(&self, attr: PermissionAttribute) -> Option<&Decision> {
        self.per_bit.get(&attr).and_then(Option::as_ref)
    }

    /// True when one explicit deny covered every attribute the applicable
    /// ACEs mention, ending the scan there.
    pub fn short_circuited(&self) -> bool {
        self.short_circuited
    }
}

/// Evaluate a canonical ACL for the given set of matching SIDs.
pub fn evaluate_acl(acl: &Acl, sids: &BTreeSet<Sid>) -> EffectiveResult {
    let applicable: Vec<(usize, &Ace, u32)> = acl
        .iter()
        .enumerate()
        .filter(|(_, a)| sids.contains(a.principal()))
        .map(|(i, a)| (i, a, normalize_generic(a.mask()).attribute_bits()))
        .collect();
    let mentioned = applicable.iter().fold(0, |acc, (_, _, bits)| acc | bits);

    let mut decided = 0u32;
    let mut granted = 0u32;
    let mut deciders: BTreeMap<PermissionAttribute, Option<Decision>> =
        PermissionAttribute::ALL.into_iter().map(|a| (a, None)).collect();
    let mut short_circuited = false;

    for (index, ace, bits) in applicable {
        let covers_all = mentioned != 0 && bits & mentioned == mentioned;
        let fresh = if ace.is_explicit() && ace.is_deny() && covers_all {
            short_circuited = true;
            mentioned & !decided
        } else {
            bits & !decided
        };
        if fresh != 0 {
            for attr in PermissionAttribute::ALL {
                if fresh & attr.flag() != 0 {
                    deciders.insert(
                        attr,
                        Some(Decision {
                            index,
                            ace: ace.clone(),
                        }),
                    );
                }
            }
            if ace.is_allow() {
                granted |= fresh;
            }
            decided |= fresh;
        }
        if short_circuited {
            break;
        }
    }

    EffectiveResult {
        granted: AccessMask::new(granted).expect("attribute bits only"),
        per_bit: deciders,
        short_circuited,
    }
}

pub fn effective_mask(
    tree: &MaterializedTree,
    path: &str,
    principal: &Sid,
    graph: &GroupGraph,
) -> Result<EffectiveResult> {
    let sids = graph.applicable_sids(principal)?;
    let id = tree.resolve_path(path)?;
    Ok(evaluate_acl(tree.acl(id), &sids))
}

/// Reference implementation used to cross-check [`effective_mask`].
///
/// It recomputes group membership by fixpoint over the raw edges, ignores
/// ACL order entirely, and ranks every applicable ACE by an explicit tier
/// number per attribute.
pub fn brute_force_effective(
    tree: &MaterializedTree,
    path: &str,
    principal: &Sid,
    graph: &GroupGraph,
) -> Result<AccessMask> {
    if !graph.contains(principal) {
        return Err(crate::Error::UnknownPrincipal(principal.to_string()));
    }
    let id = tree.resolve_path(path)?;

    let mut sids: BTreeSet<&Sid> = BTreeSet::from([principal]);
    loop {
        let before = sids.len();
        for (member, group) in graph.edges() {
            if sids.contains(member) {
                sids.insert(group);
            }
        }
        if sids.len() == before {
            break;
        }
    }

    fn tier(ace: &Ace) -> u64 {
        match (ace.provenance(), ace.kind()) {
            (Provenance::Explicit, AceKind::Deny) => 0,
            (Provenance::Explicit, AceKind::Allow) => 1,
            (Provenance::Inherited(d), AceKind::Deny) => 2 + 2 * u64::from(d.get()),
            (Provenance::Inherited(d), AceKind::Allow) => 3 + 2 * u64::from(d.get()),
        }
    }

    let mut granted = 0u32;
    for attr in PermissionAttribute::ALL {
        let winner = tree
            .acl(id)
            .iter()
            .filter(|a| sids.contains(a.principal()))
            .filter(|a| normalize_generic(a.mask()).contains(attr))
            .min_by_key(|a| tier(a));
        if winner.is_some_and(Ace::is_allow) {
            granted |= attr.flag();
        }
    }
    Ok(AccessMask::new(granted).expect("attribute bits only"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveRow {
    pub node: NodeId,
    pub path: String,
    pub granted: AccessMask,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EffectiveReport {
    pub rows: Vec<EffectiveRow>,
}

/// Depth-first effective-permission walk over the folders under `root`.
///
/// With `suppress_unchanged`, folders whose ACL equals their parent's are
/// skipped (but still descended into). The tree root has no parent and is
/// compared against an empty ACL, so it is listed iff it carries entries.
pub fn effective_search(
    tree: &MaterializedTree,
    root: &str,
    principal: &Sid,
    graph: &GroupGraph,
    suppress_unchanged: bool,
) -> Result<EffectiveReport> {
    let sids = graph.applicable_sids(principal)?;
    let start = tree.resolve_folder(root)?;
    let mut rows = Vec::new();
    let mut stack = vec![start];
    while let Some(id) = stack.pop() {
        let node = tree.node(id);
        if !node.is_folder() {
            continue;
        }
        let differs = match node.parent() {
            Some(_) => tree.differs_from_parent(id),
            None => !tree.acl(id).is_empty(),
        };
        if !suppress_unchanged || differs {
            rows.push(EffectiveRow {
                node: id,
                path: node.path().to_string(),
                granted: evaluate_acl(tree.acl(id), &sids).granted(),
            });
        }
        stack.extend(node.children().iter().rev().copied());
    }
    Ok(EffectiveReport { rows })
}
