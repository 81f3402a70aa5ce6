//! JSON snapshot format: principals, memberships and a nested tree of
//! explicit ACEs.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "principals": [{"sid": "S-1-1-0", "kind": "group", "display_name": "Everyone"}],
//!   "memberships": [{"member_sid": "S-1-5-21-1-1001", "group_sid": "S-1-1-0"}],
//!   "tree": {"name": "C:", "kind": "folder", "owner_sid": "S-1-1-0",
//!            "aces": [{"principal_sid": "S-1-1-0", "kind": "allow",
//!                      "mask": "ReadAndExecute", "flags": ["container_inherit"]}],
//!            "children": []}
//! }
//! ```
//!
//! A mask is written as hex (`"0x001200a9"`), as a compressed code string
//! (`"R-W-Dc-Rp-Cp"`) or as a level name (`"Modify"`). Canonical output
//! always uses hex and adds a `rendered` field that input ignores.

mod synthetic;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mask::{normalize_generic, parse_compressed, render_mask, AccessMask, CoarseLevel};
use crate::membership::GroupGraph;
use crate::model::{Ace, AceKind, FsTree, InheritFlags, NodeId, NodeKind, Principal, PrincipalKind, Sid};
use crate::propagation::{materialize_inheritance, MaterializedTree};

pub use synthetic::{generate_synthetic, SyntheticParams};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SnapshotErrorKind {
    /// Malformed JSON, missing or unexpected fields, wrong types.
    Schema,
    UnknownSid,
    BadSid,
    BadMask,
    BadFlags,
    BadVersion,
    DuplicateSid,
    DuplicateChild,
    BadMembership,
    BadName,
}

impl fmt::Display for SnapshotErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Parse or validation failure, located by a JSON path such as
/// `tree.children[2].aces[0].mask`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {path}: {message}")]
pub struct SnapshotError {
    pub kind: SnapshotErrorKind,
    pub path: String,
    pub message: String,
}

impl SnapshotError {
    fn new(kind: SnapshotErrorKind, path: impl Into<String>, message: impl Into<String>) -> Self {
        SnapshotError {
            kind,
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotDoc {
    format_version: u32,
    principals: Vec<PrincipalRecord>,
    #[serde(default)]
    memberships: Vec<MembershipRecord>,
    tree: NodeRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrincipalRecord {
    sid: String,
    kind: PrincipalKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    display_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MembershipRecord {
    member_sid: String,
    group_sid: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    name: String,
    kind: NodeKind,
    owner_sid: String,
    #[serde(default)]
    aces: Vec<AceRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<NodeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AceRecord {
    principal_sid: String,
    kind: AceKind,
    mask: String,
    #[serde(default)]
    flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rendered: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalEntry {
    pub sid: Sid,
    pub kind: PrincipalKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotNode {
    pub name: String,
    pub kind: NodeKind,
    pub owner: Sid,
    /// Explicit, normalized entries in authored order.
    pub aces: Vec<Ace>,
    pub children: Vec<SnapshotNode>,
}

/// A validated snapshot. SIDs carry their display names; masks are
/// normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub format_version: u32,
    pub principals: Vec<PrincipalEntry>,
    pub memberships: Vec<(Sid, Sid)>,
    pub tree: SnapshotNode,
}

impl Snapshot {
    pub fn node_count(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![&self.tree];
        while let Some(n) = stack.pop() {
            count += 1;
            stack.extend(&n.children);
        }
        count
    }

    pub fn ace_count(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![&self.tree];
        while let Some(n) = stack.pop() {
            count += n.aces.len();
            stack.extend(&n.children);
        }
        count
    }
}

/// Parse and validate a snapshot document.
pub fn parse_snapshot(text: &str) -> Result<Snapshot, SnapshotError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: SnapshotDoc = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." { "$".to_string() } else { path };
        SnapshotError::new(SnapshotErrorKind::Schema, path, inner.to_string())
    })?;
    de.end()
        .map_err(|e| SnapshotError::new(SnapshotErrorKind::Schema, "$", e.to_string()))?;
    validate(doc)
}

fn validate(doc: SnapshotDoc) -> Result<Snapshot, SnapshotError> {
    use SnapshotErrorKind::*;

    if doc.format_version != FORMAT_VERSION {
        return Err(SnapshotError::new(
            BadVersion,
            "format_version",
            format!("expected {FORMAT_VERSION}, found {}", doc.format_version),
        ));
    }

    let mut graph = GroupGraph::new();
    let mut principals = Vec::with_capacity(doc.principals.len());
    for (i, p) in doc.principals.iter().enumerate() {
        let path = format!("principals[{i}].sid");
        let mut sid = Sid::parse(&p.sid).map_err(|e| SnapshotError::new(BadSid, &path, e.to_string()))?;
        if let Some(name) = &p.display_name {
            sid = sid.with_display_name(name.clone());
        }
        graph
            .add_principal(Principal::new(sid.clone(), p.kind))
            .map_err(|e| SnapshotError::new(DuplicateSid, &path, e.to_string()))?;
        principals.push(PrincipalEntry { sid, kind: p.kind });
    }

    let lookup = |text: &str, path: &str| -> Result<Sid, SnapshotError> {
        let sid = Sid::parse(text).map_err(|e| SnapshotError::new(BadSid, path, e.to_string()))?;
        graph
            .principal(&sid)
            .map(|p| p.sid().clone())
            .ok_or_else(|| SnapshotError::new(UnknownSid, path, format!("{text} is not declared in principals")))
    };

    let mut memberships = Vec::with_capacity(doc.memberships.len());
    let mut seen_edges = BTreeSet::new();
    for (i, m) in doc.memberships.iter().enumerate() {
        let member = lookup(&m.member_sid, &format!("memberships[{i}].member_sid"))?;
        let group_path = format!("memberships[{i}].group_sid");
        let group = lookup(&m.group_sid, &group_path)?;
        if graph.principal(&group).map(Principal::kind) != Some(PrincipalKind::Group) {
            return Err(SnapshotError::new(BadMembership, group_path, format!("{group} is not a group")));
        }
        if member == group {
            return Err(SnapshotError::new(
                BadMembership,
                format!("memberships[{i}]"),
                format!("{member} cannot be a member of itself"),
            ));
        }
        if seen_edges.insert((member.clone(), group.clone())) {
            memberships.push((member, group));
        }
    }

    let tree = validate_node(&doc.tree, "tree", &lookup, true)?;
    Ok(Snapshot {
        format_version: doc.format_version,
        principals,
        memberships,
        tree,
    })
}

fn validate_node(
    record: &NodeRecord,
    path: &str,
    lookup: &dyn Fn(&str, &str) -> Result<Sid, SnapshotError>,
    is_root: bool,
) -> Result<SnapshotNode, SnapshotError> {
    use SnapshotErrorKind::*;

    let name_ok = !record.name.is_empty() && !record.name.contains('/') && record.name != "." && record.name != "..";
    if !name_ok && !is_root {
        return Err(SnapshotError::new(BadName, format!("{path}.name"), format!("invalid name {:?}", record.name)));
    }
    if is_root && record.kind != NodeKind::Folder {
        return Err(SnapshotError::new(Schema, format!("{path}.kind"), "root must be a folder"));
    }
    if record.kind == NodeKind::File && !record.children.is_empty() {
        return Err(SnapshotError::new(Schema, format!("{path}.children"), "files cannot have children"));
    }
    let owner = lookup(&record.owner_sid, &format!("{path}.owner_sid"))?;

    let mut aces = Vec::with_capacity(record.aces.len());
    for (i, a) in record.aces.iter().enumerate() {
        let ace_path = format!("{path}.aces[{i}]");
        let principal = lookup(&a.principal_sid, &format!("{ace_path}.principal_sid"))?;
        let mask = parse_mask(&a.mask)
            .map_err(|msg| SnapshotError::new(BadMask, format!("{ace_path}.mask"), msg))?;
        let flags = InheritFlags::from_names(a.flags.iter().map(String::as_str))
            .map_err(|e| SnapshotError::new(BadFlags, format!("{ace_path}.flags"), e.to_string()))?;
        let ace = Ace::explicit(principal, a.kind, mask, flags)
            .map_err(|e| SnapshotError::new(BadMask, format!("{ace_path}.mask"), e.to_string()))?;
        aces.push(ace);
    }

    let mut names = BTreeSet::new();
    let mut children = Vec::with_capacity(record.children.len());
    for (i, child) in record.children.iter().enumerate() {
        let child_path = format!("{path}.children[{i}]");
        if !names.insert(child.name.as_str()) {
            return Err(SnapshotError::new(
                DuplicateChild,
                format!("{child_path}.name"),
                format!("duplicate child name {:?}", child.name),
            ));
        }
        children.push(validate_node(child, &child_path, lookup, false)?);
    }

    Ok(SnapshotNode {
        name: record.name.clone(),
        kind: record.kind,
        owner,
        aces,
        children,
    })
}

/// Any of the three accepted mask spellings, normalized.
pub fn parse_mask(text: &str) -> Result<AccessMask, String> {
    let text = text.trim();
    let mask = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        let bits = u32::from_str_radix(hex, 16).map_err(|e| format!("bad hex mask {text:?}: {e}"))?;
        AccessMask::new(bits).map_err(|e| e.to_string())?
    } else if let Some(level) = CoarseLevel::from_name(text) {
        level.canonical_mask().expect("standard level")
    } else {
        parse_compressed(text).map_err(|e| format!("bad mask {text:?}: {e}"))?
    };
    let mask = normalize_generic(mask);
    if mask.is_empty() {
        return Err("mask is empty".to_string());
    }
    Ok(mask)
}

fn node_to_record(node: &SnapshotNode) -> NodeRecord {
    NodeRecord {
        name: node.name.clone(),
        kind: node.kind,
        owner_sid: node.owner.to_string(),
        aces: node
            .aces
            .iter()
            .map(|a| AceRecord {
                principal_sid: a.principal().to_string(),
                kind: a.kind(),
                mask: a.mask().hex(),
                flags: a.flags().names().into_iter().map(String::from).collect(),
                rendered: Some(render_mask(a.mask(), a.flags()).1),
            })
            .collect(),
        children: node.children.iter().map(node_to_record).collect(),
    }
}

/// Canonical JSON: hex masks, a `rendered` field per ACE, fixed key order.
pub fn serialize_snapshot(snapshot: &Snapshot) -> String {
    let doc = SnapshotDoc {
        format_version: snapshot.format_version,
        principals: snapshot
            .principals
            .iter()
            .map(|p| PrincipalRecord {
                sid: p.sid.to_string(),
                kind: p.kind,
                display_name: p.sid.display_name().map(String::from),
            })
            .collect(),
        memberships: snapshot
            .memberships
            .iter()
            .map(|(m, g)| MembershipRecord {
                member_sid: m.to_string(),
                group_sid: g.to_string(),
            })
            .collect(),
        tree: node_to_record(&snapshot.tree),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("snapshot serializes");
    out.push('\n');
    out
}

/// Build the tree and membership graph and materialize inherited ACLs.
pub fn load_tree(snapshot: &Snapshot) -> (MaterializedTree, GroupGraph) {
    let mut graph = GroupGraph::new();
    for p in &snapshot.principals {
        graph
            .add_principal(Principal::new(p.sid.clone(), p.kind))
            .expect("validated snapshot has unique principals");
    }
    for (member, group) in &snapshot.memberships {
        graph
            .add_membership(member, group)
            .expect("validated snapshot has well-formed memberships");
    }

    let root = &snapshot.tree;
    let mut tree = FsTree::new(root.name.clone(), root.owner.clone());
    let mut stack: Vec<(NodeId, &SnapshotNode)> = vec![(tree.root(), root)];
    while let Some((id, node)) = stack.pop() {
        for ace in &node.aces {
            tree.add_ace(id, ace.clone()).expect("snapshot ACEs are explicit");
        }
        for child in &node.children {
            let child_id = match child.kind {
                NodeKind::Folder => tree.add_folder(id, child.name.clone(), child.owner.clone()),
                NodeKind::File => tree.add_file(id, child.name.clone(), child.owner.clone()),
            }
            .expect("validated snapshot has unique, well-formed names");
            stack.push((child_id, child));
        }
    }
    (materialize_inheritance(tree), graph)
}
