//! Reference computations written independently of the library algorithms.
//! They rely only on the tree's structural accessors.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use aclens_core::membership::GroupGraph;
use aclens_core::model::{Ace, AceKind, FsTree, InheritFlags, NodeId, Sid};
use aclens_core::propagation::MaterializedTree;

/// Comparable form of an ACL entry including its distance.
pub type Entry = (String, AceKind, u32, InheritFlags, u32);

pub fn entry(ace: &Ace) -> Entry {
    (
        ace.principal().to_string(),
        ace.kind(),
        ace.mask().bits(),
        ace.flags(),
        ace.provenance().distance(),
    )
}

/// Ancestors of `id`, nearest first, each with its distance.
fn ancestors(tree: &FsTree, id: NodeId) -> Vec<(NodeId, u32)> {
    let mut out = Vec::new();
    let mut cur = tree.node(id).parent();
    let mut d = 1;
    while let Some(p) = cur {
        out.push((p, d));
        cur = tree.node(p).parent();
        d += 1;
    }
    out
}

/// Expected ACL of a node as a sorted multiset, derived per ancestor from
/// the source ACE's flags alone.
pub fn expected_acl(tree: &FsTree, id: NodeId) -> Vec<Entry> {
    let node = tree.node(id);
    let mut out: Vec<Entry> = node
        .explicit_aces()
        .iter()
        .filter(|a| !a.flags().inherit_only())
        .map(entry)
        .collect();
    for (anc, d) in ancestors(tree, id) {
        for src in tree.node(anc).explicit_aces() {
            let f = src.flags();
            let lands = if node.is_folder() { f.container_inherit() } else { f.object_inherit() };
            // Intermediate nodes are folders, so every hop past the first
            // needs container inheritance and no stop at depth 1.
            let reaches = lands && (d == 1 || (f.container_inherit() && !f.no_propagate()));
            if reaches {
                let flags = if f.no_propagate() { InheritFlags::NONE } else { f };
                out.push((src.principal().to_string(), src.kind(), src.mask().bits(), flags, d));
            }
        }
    }
    out.sort();
    out
}

pub fn actual_acl(tree: &MaterializedTree, id: NodeId) -> Vec<Entry> {
    let mut out: Vec<Entry> = tree.acl(id).iter().map(entry).collect();
    out.sort();
    out
}

/// Breadth-first reachability over the raw edge list.
pub fn reachable(edges: &[(Sid, Sid)], start: &Sid, forward: bool) -> BTreeSet<Sid> {
    let mut adjacency: BTreeMap<&Sid, Vec<&Sid>> = BTreeMap::new();
    for (m, g) in edges {
        let (a, b) = if forward { (m, g) } else { (g, m) };
        adjacency.entry(a).or_default().push(b);
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for next in adjacency.get(cur).into_iter().flatten() {
            if seen.insert((*next).clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.remove(start);
    seen
}

pub fn edges_of(graph: &GroupGraph) -> Vec<(Sid, Sid)> {
    graph.edges().map(|(m, g)| (m.clone(), g.clone())).collect()
}

/// Elementwise equality on (principal, kind, mask, flags) in list order.
pub fn same_entries(a: &MaterializedTree, x: NodeId, y: NodeId) -> bool {
    let key = |id: NodeId| -> Vec<(String, AceKind, u32, InheritFlags)> {
        a.acl(id)
            .iter()
            .map(|e| (e.principal().to_string(), e.kind(), e.mask().bits(), e.flags()))
            .collect()
    };
    key(x) == key(y)
}
