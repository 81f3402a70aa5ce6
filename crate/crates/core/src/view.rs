//! Serializable output records shared by the command line (one JSON object
//! per line) and the HTTP service (JSON arrays of the same objects).

use serde::{Deserialize, Serialize};

use crate::accumulation::{EffectiveReport, EffectiveResult};
use crate::mask::{generic_expansion, render_mask, AccessMask, CoarseLevel, PermissionAttribute};
use crate::membership::GroupGraph;
use crate::model::{Ace, NodeId, Principal, Sid};
use crate::propagation::MaterializedTree;
use crate::snapshot::Snapshot;
use crate::traversal::{Finding, ReportEntry, TraversalReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AceView {
    pub principal: String,
    pub principal_name: String,
    pub kind: String,
    pub level: String,
    pub rendered: String,
    pub mask: String,
    pub provenance: String,
    pub distance: u32,
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_via: Option<Vec<String>>,
}

fn name_of(graph: &GroupGraph, sid: &Sid) -> String {
    graph.named(sid).label().to_string()
}

impl AceView {
    pub fn from_entry(entry: &ReportEntry, graph: &GroupGraph) -> Self {
        AceView {
            principal: entry.principal.to_string(),
            principal_name: name_of(graph, &entry.principal),
            kind: entry.kind.as_str().to_string(),
            level: entry.level.name().to_string(),
            rendered: entry.rendered.clone(),
            mask: entry.mask.hex(),
            provenance: if entry.provenance.is_explicit() {
                "explicit".into()
            } else {
                "inherited".into()
            },
            distance: entry.provenance.distance(),
            flags: entry.flags.names().into_iter().map(String::from).collect(),
            matched_via: entry
                .matched_via
                .as_ref()
                .map(|chain| chain.iter().map(|s| name_of(graph, s)).collect()),
        }
    }

    pub fn from_ace(ace: &Ace, graph: &GroupGraph) -> Self {
        Self::from_entry(&ReportEntry::from_ace(ace), graph)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraverseRowView {
    pub path: String,
    pub entries: Vec<AceView>,
}

pub fn traversal_rows(report: &TraversalReport, graph: &GroupGraph) -> Vec<TraverseRowView> {
    report
        .rows
        .iter()
        .map(|row| TraverseRowView {
            path: row.path.clone(),
            entries: row.entries.iter().map(|e| AceView::from_entry(e, graph)).collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDecisionView {
    pub attribute: String,
    pub code: String,
    pub granted: bool,
    /// `None` when no applicable ACE mentions the attribute.
    pub decided_by: Option<AceView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveView {
    pub path: String,
    pub principal: String,
    pub principal_name: String,
    pub granted: String,
    pub level: String,
    pub rendered: String,
    pub short_circuited: bool,
    pub attributes: Vec<AttributeDecisionView>,
}

fn render_granted(mask: AccessMask) -> (String, String) {
    if mask.is_empty() {
        return ("None".into(), "none".into());
    }
    let (level, rendered) = render_mask(mask, crate::model::InheritFlags::NONE);
    (level.name().to_string(), rendered)
}

impl EffectiveView {
    pub fn new(path: &str, principal: &Sid, result: &EffectiveResult, graph: &GroupGraph) -> Self {
        let (level, rendered) = render_granted(result.granted());
        EffectiveView {
            path: path.to_string(),
            principal: principal.to_string(),
            principal_name: name_of(graph, principal),
            granted: result.granted().hex(),
            level,
            rendered,
            short_circuited: result.short_circuited(),
            attributes: PermissionAttribute::ALL
                .into_iter()
                .map(|attr| AttributeDecisionView {
                    attribute: attr.name().to_string(),
                    code: attr.code().to_string(),
                    granted: result.granted().contains(attr),
                    decided_by: result.decision(attr).map(|d| AceView::from_ace(&d.ace, graph)),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveRowView {
    pub path: String,
    pub granted: String,
    pub level: String,
    pub rendered: String,
}

pub fn effective_rows(report: &EffectiveReport) -> Vec<EffectiveRowView> {
    report
        .rows
        .iter()
        .map(|row| {
            let (level, rendered) = render_granted(row.granted);
            EffectiveRowView {
                path: row.path.clone(),
                granted: row.granted.hex(),
                level,
                rendered,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalView {
    pub sid: String,
    pub name: String,
    pub kind: String,
}

impl PrincipalView {
    pub fn new(principal: &Principal) -> Self {
        PrincipalView {
            sid: principal.sid().to_string(),
            name: principal.sid().label().to_string(),
            kind: match principal.kind() {
                crate::model::PrincipalKind::User => "user".into(),
                crate::model::PrincipalKind::Group => "group".into(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingView {
    pub path: String,
    pub principal: String,
    pub principal_name: String,
    pub shadowed: Vec<String>,
    pub shadowed_rendered: String,
    pub deny_source_path: String,
    pub deny: AceView,
    pub allow: AceView,
}

impl FindingView {
    pub fn new(finding: &Finding, graph: &GroupGraph) -> Self {
        FindingView {
            path: finding.path.clone(),
            principal: finding.principal.to_string(),
            principal_name: name_of(graph, &finding.principal),
            shadowed: finding.shadowed.attributes().map(|a| a.name().to_string()).collect(),
            shadowed_rendered: render_granted(finding.shadowed).1,
            deny_source_path: finding.deny_source_path.clone(),
            deny: AceView::from_ace(&finding.deny, graph),
            allow: AceView::from_ace(&finding.allow, graph),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNodeView {
    pub name: String,
    pub path: String,
    pub kind: String,
    pub child_count: usize,
    pub acl_differs: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<TreeNodeView>>,
}

/// Node listing down to `depth` levels below `id`; `depth == 0` lists the
/// node alone.
pub fn tree_view(tree: &MaterializedTree, id: NodeId, depth: u32) -> TreeNodeView {
    let node = tree.node(id);
    TreeNodeView {
        name: node.name().to_string(),
        path: node.path().to_string(),
        kind: node.kind().to_string(),
        child_count: node.children().len(),
        acl_differs: tree.differs_from_parent(id),
        children: (depth > 0).then(|| {
            node.children()
                .iter()
                .map(|c| tree_view(tree, *c, depth - 1))
                .collect()
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeInfo {
    pub attribute: String,
    pub code: String,
    pub bit: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelInfo {
    pub level: String,
    pub mask: String,
    pub generic_bits: String,
    pub codes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericInfo {
    pub name: String,
    pub bit: u32,
    pub expansion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotStats {
    pub nodes: usize,
    pub folders: usize,
    pub explicit_aces: usize,
    pub principals: Vec<PrincipalView>,
    pub memberships: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaView {
    pub attributes: Vec<AttributeInfo>,
    pub levels: Vec<LevelInfo>,
    pub generic: Vec<GenericInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<SnapshotStats>,
}

pub fn meta_view(loaded: Option<(&Snapshot, &MaterializedTree, &GroupGraph)>) -> MetaView {
    let attributes = PermissionAttribute::ALL
        .into_iter()
        .map(|a| AttributeInfo {
            attribute: a.name().to_string(),
            code: a.code().to_string(),
            bit: a.bit(),
            label: a.label().to_string(),
        })
        .collect();
    let levels = CoarseLevel::STANDARD
        .into_iter()
        .map(|l| {
            let mask = l.canonical_mask().expect("standard");
            LevelInfo {
                level: l.name().to_string(),
                mask: mask.hex(),
                generic_bits: format!("{:#010x}", l.generic_bits().expect("standard")),
                codes: crate::mask::compress_special(mask).expect("non-empty"),
            }
        })
        .collect();
    let generic = [
        ("GenericAll", AccessMask::GENERIC_ALL),
        ("GenericExecute", AccessMask::GENERIC_EXECUTE),
        ("GenericWrite", AccessMask::GENERIC_WRITE),
        ("GenericRead", AccessMask::GENERIC_READ),
    ]
    .into_iter()
    .map(|(name, bit)| GenericInfo {
        name: name.to_string(),
        bit: bit.trailing_zeros(),
        expansion: generic_expansion(bit).expect("generic bit").hex(),
    })
    .collect();
    let snapshot = loaded.map(|(snapshot, tree, graph)| SnapshotStats {
        nodes: tree.len(),
        folders: tree.ids().filter(|id| tree.node(*id).is_folder()).count(),
        explicit_aces: snapshot.ace_count(),
        principals: graph.principals().map(PrincipalView::new).collect(),
        memberships: graph.edge_count(),
    });
    MetaView {
        attributes,
        levels,
        generic,
        snapshot,
    }
}

/// Error body used by the service and mirrored by CLI diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorView {
    pub code: String,
    pub message: String,
    pub detail_path: Option<String>,
}

/// Serialize records as line-delimited JSON.
pub fn to_json_lines<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("view serializes"));
        out.push('\n');
    }
    out
}
