//! Builds every node's effective ACL from the explicit entries in the tree.
//!
//! Rules applied for each explicit ACE and each inherited copy:
//! - an entry applies to the node it sits on unless it is inherit-only;
//! - container-inherit entries flow to child folders, object-inherit entries
//!   to child files;
//! - a copy records how many levels it sits below its explicit source;
//! - no-propagate sources give their direct children a copy with all
//!   inheritance flags cleared, so propagation stops there;
//! - otherwise the copy keeps the source flags and keeps flowing down.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::model::{canonicalize_acl, Ace, Acl, FsTree, InheritFlags, NodeId, NodeKind};

/// A tree together with the materialized ACL of every node.
#[derive(Debug, Clone)]
pub struct MaterializedTree {
    tree: FsTree,
    acls: Vec<Acl>,
}

impl MaterializedTree {
    pub fn tree(&self) -> &FsTree {
        &self.tree
    }

    pub fn into_tree(self) -> FsTree {
        self.tree
    }

    pub fn acl(&self, id: NodeId) -> &Acl {
        &self.acls[id.index()]
    }

    pub fn acl_at(&self, path: &str) -> Result<&Acl> {
        Ok(self.acl(self.tree.resolve_path(path)?))
    }

    /// Whether a node's ACL differs from its parent's. The root always differs.
    pub fn differs_from_parent(&self, id: NodeId) -> bool {
        match self.tree.node(id).parent() {
            Some(parent) => !crate::model::acl_equal(self.acl(id), self.acl(parent)),
            None => true,
        }
    }
}

impl Deref for MaterializedTree {
    type Target = FsTree;

    fn deref(&self) -> &FsTree {
        &self.tree
    }
}

/// Copy an inheritable entry into a child of the given kind, if it reaches it.
fn inherit_into(ace: &Ace, child: NodeKind) -> Option<Ace> {
    let flags = ace.flags();
    let reaches = match child {
        NodeKind::Folder => flags.container_inherit(),
        NodeKind::File => flags.object_inherit(),
    };
    if !reaches {
        return None;
    }
    let copy_flags = if flags.no_propagate() {
        InheritFlags::NONE
    } else {
        flags
    };
    Some(ace.inherited_copy(copy_flags))
}

pub fn materialize_inheritance(tree: FsTree) -> MaterializedTree {
    let mut acls: Vec<Acl> = Vec::with_capacity(tree.len());
    // Ids are allocated parent-first, so one forward pass sees every parent
    // before its children.
    for id in tree.ids() {
        let node = tree.node(id);
        let mut entries: Vec<Ace> = node
            .explicit_aces()
            .iter()
            .filter(|a| !a.flags().inherit_only())
            .cloned()
            .collect();
        if let Some(parent) = node.parent() {
            let parent_node = tree.node(parent);
            let sources = parent_node
                .explicit_aces()
                .iter()
                .chain(acls[parent.index()].iter().filter(|a| !a.is_explicit()));
            entries.extend(sources.filter_map(|a| inherit_into(a, node.kind())));
        }
        acls.push(canonicalize_acl(entries));
    }
    MaterializedTree { tree, acls }
}

/// Levels between `path` and the explicit source of the first entry in its
/// ACL that grants the same thing as `ace`; 0 for explicit entries.
pub fn distance_of(tree: &MaterializedTree, path: &str, ace: &Ace) -> Result<u32> {
    tree.acl_at(path)?
        .iter()
        .find(|a| a.same_grant(ace))
        .map(|a| a.provenance().distance())
        .ok_or_else(|| Error::AceNotPresent {
            path: path.to_string(),
            principal: ace.principal().to_string(),
        })
}

/// Path of the node an ACL entry at `id` originates from.
pub fn source_of(tree: &MaterializedTree, id: NodeId, ace: &Ace) -> Option<NodeId> {
    tree.ancestor(id, ace.provenance().distance())
}
