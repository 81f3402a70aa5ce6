//! Security-descriptor data model: SIDs, ACEs, ACLs and the file tree.

mod ace;
mod sid;
mod tree;

pub use ace::{acl_equal, canonicalize_acl, Ace, AceKind, Acl, InheritFlags, Provenance};
pub use sid::{Principal, PrincipalKind, Sid};
pub use tree::{FsNode, FsTree, NodeId, NodeKind};
