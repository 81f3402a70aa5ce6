//! Directory-walk reports over a materialized tree.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::mask::{normalize_generic, render_mask, AccessMask, CoarseLevel};
use crate::membership::GroupGraph;
use crate::model::{Ace, AceKind, InheritFlags, NodeId, Provenance, Sid};
use crate::propagation::{source_of, MaterializedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraverseOptions {
    /// List every node, not only those whose ACL differs from the parent's.
    pub include_unchanged: bool,
    /// Visit files as well as folders.
    pub include_files: bool,
}

/// One ACE as shown in a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportEntry {
    pub principal: Sid,
    pub kind: AceKind,
    pub mask: AccessMask,
    pub level: CoarseLevel,
    /// Level name, or the compressed code string for special masks.
    pub rendered: String,
    pub provenance: Provenance,
    pub flags: InheritFlags,
    /// For per-principal reports: the member -> group chain through which
    /// the ACE's principal matched, when it is not the principal itself.
    pub matched_via: Option<Vec<Sid>>,
}

impl ReportEntry {
    pub fn from_ace(ace: &Ace) -> Self {
        let (level, rendered) = render_mask(ace.mask(), ace.flags());
        ReportEntry {
            principal: ace.principal().clone(),
            kind: ace.kind(),
            mask: normalize_generic(ace.mask()),
            level,
            rendered,
            provenance: ace.provenance(),
            flags: ace.flags(),
            matched_via: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub node: NodeId,
    pub path: String,
    pub entries: Vec<ReportEntry>,
}

/// Rows in depth-first order, parent before children, siblings by name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraversalReport {
    pub rows: Vec<ReportRow>,
}

impl TraversalReport {
    pub fn paths(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.path.as_str()).collect()
    }
}

/// Depth-first walk under `start`, yielding nodes the options select.
fn walk(tree: &MaterializedTree, start: NodeId, include_files: bool) -> impl Iterator<Item = NodeId> + '_ {
    tree.preorder(start)
        .filter(move |id| include_files || tree.node(*id).is_folder())
}

fn emits(tree: &MaterializedTree, id: NodeId, start: NodeId, options: TraverseOptions) -> bool {
    options.include_unchanged || id == start || tree.differs_from_parent(id)
}

/// Rendered entries for a single node's ACL.
pub fn acl_entries(tree: &MaterializedTree, path: &str) -> Result<Vec<ReportEntry>> {
    let id = tree.resolve_path(path)?;
    Ok(tree.acl(id).iter().map(ReportEntry::from_ace).collect())
}

/// Filtered ACL report. Entries whose principal is in `filter` are hidden;
/// the filter matches exact SIDs, not group members.
pub fn traverse_report(
    tree: &MaterializedTree,
    root: &str,
    filter: &BTreeSet<Sid>,
    options: TraverseOptions,
) -> Result<TraversalReport> {
    let start = tree.resolve_folder(root)?;
    let rows = walk(tree, start, options.include_files)
        .filter(|id| emits(tree, *id, start, options))
        .map(|id| ReportRow {
            node: id,
            path: tree.node(id).path().to_string(),
            entries: tree
                .acl(id)
                .iter()
                .filter(|a| !filter.contains(a.principal()))
                .map(ReportEntry::from_ace)
                .collect(),
        })
        .collect();
    Ok(TraversalReport { rows })
}

/// Report restricted to ACEs that apply to `principal` directly or through
/// group membership. Nodes with no such ACE are left out.
pub fn per_principal_report(
    tree: &MaterializedTree,
    root: &str,
    principal: &Sid,
    graph: &GroupGraph,
    options: TraverseOptions,
) -> Result<TraversalReport> {
    let sids = graph.applicable_sids(principal)?;
    let start = tree.resolve_folder(root)?;
    let mut rows = Vec::new();
    for id in walk(tree, start, options.include_files) {
        if !emits(tree, id, start, options) {
            continue;
        }
        let entries: Vec<ReportEntry> = tree
            .acl(id)
            .iter()
            .filter(|a| sids.contains(a.principal()))
            .map(|a| {
                let mut entry = ReportEntry::from_ace(a);
                if a.principal() != principal {
                    entry.matched_via = graph.membership_chain(principal, a.principal());
                }
                entry
            })
            .collect();
        if !entries.is_empty() {
            rows.push(ReportRow {
                node: id,
                path: tree.node(id).path().to_string(),
                entries,
            });
        }
    }
    Ok(TraversalReport { rows })
}

/// An explicit allow that takes precedence over an inherited deny for the
/// same principal (or one of its groups).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub node: NodeId,
    pub path: String,
    pub principal: Sid,
    /// Attributes the inherited deny names but the explicit allow grants.
    pub shadowed: AccessMask,
    pub deny_source_path: String,
    pub deny: Ace,
    pub allow: Ace,
    /// Position of the allow in the node's ACL.
    pub allow_index: usize,
}

/// Explicit allows overriding inherited denies, folder by folder.
///
/// Attributes already refused by an explicit deny that applies to the
/// allow's principal are not reported: the inherited deny is moot for them.
pub fn audit_shadowed_denies(
    tree: &MaterializedTree,
    root: &str,
    graph: &GroupGraph,
) -> Result<Vec<Finding>> {
    let start = tree.resolve_folder(root)?;
    let mut findings = Vec::new();
    for id in walk(tree, start, false) {
        let acl = tree.acl(id);
        let mut at_node = Vec::new();
        for (allow_index, allow) in acl.iter().enumerate() {
            if !(allow.is_explicit() && allow.is_allow()) {
                continue;
            }
            // Unknown principals still match their own SID.
            let sids = graph
                .applicable_sids(allow.principal())
                .unwrap_or_else(|_| BTreeSet::from([allow.principal().clone()]));
            let explicitly_denied = acl
                .iter()
                .filter(|a| a.is_explicit() && a.is_deny() && sids.contains(a.principal()))
                .fold(0, |acc, a| acc | normalize_generic(a.mask()).attribute_bits());
            let allowed = normalize_generic(allow.mask()).attribute_bits() & !explicitly_denied;
            for deny in acl.iter() {
                if deny.is_explicit() || !deny.is_deny() || !sids.contains(deny.principal()) {
                    continue;
                }
                let shadowed = allowed & normalize_generic(deny.mask()).attribute_bits();
                if shadowed == 0 {
                    continue;
                }
                let source = source_of(tree, id, deny).expect("inherited ACE has an ancestor");
                at_node.push(Finding {
                    node: id,
                    path: tree.node(id).path().to_string(),
                    principal: allow.principal().clone(),
                    shadowed: AccessMask::new(shadowed).expect("attribute bits only"),
                    deny_source_path: tree.node(source).path().to_string(),
                    deny: deny.clone(),
                    allow: allow.clone(),
                    allow_index,
                });
            }
        }
        at_node.sort_by(|a, b| a.principal.cmp(&b.principal));
        findings.extend(at_node);
    }
    Ok(findings)
}
