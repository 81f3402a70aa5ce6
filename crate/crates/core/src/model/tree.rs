use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Ace, Sid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Folder,
    File,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Folder => "folder",
            NodeKind::File => "file",
        })
    }
}

/// A file or folder with its explicit ACEs.
#[derive(Debug, Clone)]
pub struct FsNode {
    name: String,
    kind: NodeKind,
    owner: Sid,
    explicit_aces: Vec<Ace>,
    parent: Option<NodeId>,
    /// Sorted by name.
    children: Vec<NodeId>,
    path: String,
    depth: u32,
}

impl FsNode {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn is_folder(&self) -> bool {
        self.kind == NodeKind::Folder
    }

    pub fn owner(&self) -> &Sid {
        &self.owner
    }

    pub fn explicit_aces(&self) -> &[Ace] {
        &self.explicit_aces
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    /// Slash-separated path from the root; the root itself is `/`.
    pub fn path(&self) -> &str {
        &self.path
    }

    /// Levels below the root.
    pub fn depth(&self) -> u32 {
        self.depth
    }
}

/// Arena-backed directory tree. Parents always precede their children in
/// id order.
#[derive(Debug, Clone)]
pub struct FsTree {
    nodes: Vec<FsNode>,
}

impl FsTree {
    /// Tree with a single root folder.
    pub fn new(root_name: impl Into<String>, owner: Sid) -> Self {
        FsTree {
            nodes: vec![FsNode {
                name: root_name.into(),
                kind: NodeKind::Folder,
                owner,
                explicit_aces: Vec::new(),
                parent: None,
                children: Vec::new(),
                path: "/".to_string(),
                depth: 0,
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &FsNode {
        &self.nodes[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn add_folder(&mut self, parent: NodeId, name: impl Into<String>, owner: Sid) -> Result<NodeId> {
        self.add_node(parent, name.into(), NodeKind::Folder, owner)
    }

    pub fn add_file(&mut self, parent: NodeId, name: impl Into<String>, owner: Sid) -> Result<NodeId> {
        self.add_node(parent, name.into(), NodeKind::File, owner)
    }

    fn add_node(&mut self, parent: NodeId, name: String, kind: NodeKind, owner: Sid) -> Result<NodeId> {
        if name.is_empty() || name.contains('/') || name == "." || name == ".." {
            return Err(Error::InvalidName(name));
        }
        let parent_node = &self.nodes[parent.index()];
        if !parent_node.is_folder() {
            return Err(Error::NotAFolder(parent_node.path.clone()));
        }
        let slot = match self.child_slot(parent, &name) {
            Ok(_) => {
                return Err(Error::DuplicateChild {
                    parent: parent_node.path.clone(),
                    name,
                })
            }
            Err(slot) => slot,
        };
        let path = if parent_node.parent.is_none() {
            format!("/{name}")
        } else {
            format!("{}/{name}", parent_node.path)
        };
        let depth = parent_node.depth + 1;
        let id = NodeId(u32::try_from(self.nodes.len()).expect("tree exceeds u32 nodes"));
        self.nodes.push(FsNode {
            name,
            kind,
            owner,
            explicit_aces: Vec::new(),
            parent: Some(parent),
            children: Vec::new(),
            path,
            depth,
        });
        self.nodes[parent.index()].children.insert(slot, id);
        Ok(id)
    }

    /// Append an explicit ACE to a node's authored list.
    pub fn add_ace(&mut self, node: NodeId, ace: Ace) -> Result<()> {
        if !ace.is_explicit() {
            return Err(Error::NotExplicit(self.nodes[node.index()].path.clone()));
        }
        self.nodes[node.index()].explicit_aces.push(ace);
        Ok(())
    }

    fn child_slot(&self, parent: NodeId, name: &str) -> std::result::Result<usize, usize> {
        self.nodes[parent.index()]
            .children
            .binary_search_by(|c| self.nodes[c.index()].name.as_str().cmp(name))
    }

    pub fn child(&self, parent: NodeId, name: &str) -> Option<NodeId> {
        self.child_slot(parent, name)
            .ok()
            .map(|i| self.nodes[parent.index()].children[i])
    }

    /// Resolve a slash-separated path; `""` and `"/"` name the root.
    pub fn resolve_path(&self, path: &str) -> Result<NodeId> {
        let mut current = NodeId::ROOT;
        let mut segments = path.split('/').filter(|s| !s.is_empty()).peekable();
        while let Some(segment) = segments.next() {
            let next = self
                .child(current, segment)
                .ok_or_else(|| Error::PathNotFound(path.to_string()))?;
            if segments.peek().is_some() && !self.node(next).is_folder() {
                return Err(Error::NotAFolder(self.node(next).path.clone()));
            }
            current = next;
        }
        Ok(current)
    }

    /// Resolve a path and require it to name a folder.
    pub fn resolve_folder(&self, path: &str) -> Result<NodeId> {
        let id = self.resolve_path(path)?;
        if !self.node(id).is_folder() {
            return Err(Error::NotAFolder(self.node(id).path.clone()));
        }
        Ok(id)
    }

    /// Ancestor `levels` steps up, if any.
    pub fn ancestor(&self, id: NodeId, levels: u32) -> Option<NodeId> {
        let mut current = id;
        for _ in 0..levels {
            current = self.node(current).parent?;
        }
        Some(current)
    }

    /// Depth-first preorder from `start`, siblings in name order.
    pub fn preorder(&self, start: NodeId) -> Preorder<'_> {
        Preorder {
            tree: self,
            stack: vec![start],
        }
    }
}

pub struct Preorder<'a> {
    tree: &'a FsTree,
    stack: Vec<NodeId>,
}

impl Iterator for Preorder<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let id = self.stack.pop()?;
        self.stack
            .extend(self.tree.node(id).children.iter().rev().copied());
        Some(id)
    }
}
