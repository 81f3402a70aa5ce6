//! Analyses shared by the command line and the service. Each returns the
//! view records both front ends serialize.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use aclens_core::accumulation::{effective_mask, effective_search};
use aclens_core::membership::GroupGraph;
use aclens_core::model::Sid;
use aclens_core::propagation::MaterializedTree;
use aclens_core::snapshot::{load_tree, parse_snapshot, Snapshot, SnapshotError};
use aclens_core::traversal::{acl_entries, audit_shadowed_denies, traverse_report, TraverseOptions};
use aclens_core::view::{
    effective_rows, meta_view, traversal_rows, tree_view, AceView, EffectiveRowView, EffectiveView,
    ErrorView, FindingView, MetaView, PrincipalView, TraverseRowView, TreeNodeView,
};
use aclens_core::Error as CoreError;

/// A parsed snapshot with its materialized tree and membership graph.
#[derive(Debug)]
pub struct Loaded {
    pub snapshot: Snapshot,
    pub tree: MaterializedTree,
    pub graph: GroupGraph,
}

impl Loaded {
    pub fn from_text(text: &str) -> Result<Self, QueryError> {
        let snapshot = parse_snapshot(text).map_err(QueryError::Snapshot)?;
        let (tree, graph) = load_tree(&snapshot);
        Ok(Loaded { snapshot, tree, graph })
    }

    pub fn from_file(path: &Path) -> Result<Self, QueryError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QueryError::Unreadable(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

/// Failure classes with stable exit codes and HTTP statuses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryError {
    Unreadable(String),
    Snapshot(SnapshotError),
    Path(CoreError),
    Principal(CoreError),
    BadRequest(String),
    Internal(String),
}

impl QueryError {
    pub fn exit_code(&self) -> u8 {
        match self {
            QueryError::Unreadable(_) | QueryError::Snapshot(_) => 2,
            QueryError::Path(_) => 3,
            QueryError::Principal(_) => 4,
            QueryError::BadRequest(_) => 64,
            QueryError::Internal(_) => 70,
        }
    }

    pub fn view(&self) -> ErrorView {
        let (code, detail_path) = match self {
            QueryError::Unreadable(_) => ("snapshot_unreadable", None),
            QueryError::Snapshot(e) => ("snapshot_invalid", Some(e.path.clone())),
            QueryError::Path(CoreError::NotAFolder(p)) => ("not_a_folder", Some(p.clone())),
            QueryError::Path(CoreError::PathNotFound(p)) => ("path_not_found", Some(p.clone())),
            QueryError::Path(_) => ("path_error", None),
            QueryError::Principal(CoreError::NotAGroup(_)) => ("not_a_group", None),
            QueryError::Principal(CoreError::InvalidSid(_)) => ("invalid_sid", None),
            QueryError::Principal(_) => ("unknown_principal", None),
            QueryError::BadRequest(_) => ("bad_request", None),
            QueryError::Internal(_) => ("internal", None),
        };
        ErrorView {
            code: code.to_string(),
            message: self.to_string(),
            detail_path,
        }
    }
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::Unreadable(m) => write!(f, "cannot read snapshot: {m}"),
            QueryError::Snapshot(e) => write!(f, "invalid snapshot: {e}"),
            QueryError::Path(e) | QueryError::Principal(e) => write!(f, "{e}"),
            QueryError::BadRequest(m) | QueryError::Internal(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for QueryError {}

impl From<CoreError> for QueryError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::UnknownPrincipal(_) | CoreError::NotAGroup(_) | CoreError::InvalidSid(_) => {
                QueryError::Principal(e)
            }
            CoreError::BadParameters(m) => QueryError::BadRequest(m),
            other => QueryError::Path(other),
        }
    }
}

pub type QueryResult<T> = Result<T, QueryError>;

pub fn parse_sid(text: &str) -> QueryResult<Sid> {
    Ok(Sid::parse(text.trim())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    MemberOf,
    Members,
}

impl Direction {
    pub fn parse(text: &str) -> QueryResult<Self> {
        match text {
            "member-of" => Ok(Direction::MemberOf),
            "members" => Ok(Direction::Members),
            other => Err(QueryError::BadRequest(format!(
                "direction must be member-of or members, not `{other}`"
            ))),
        }
    }
}

pub fn acl(l: &Loaded, path: &str) -> QueryResult<Vec<AceView>> {
    Ok(acl_entries(&l.tree, path)?
        .iter()
        .map(|e| AceView::from_entry(e, &l.graph))
        .collect())
}

pub fn traverse(
    l: &Loaded,
    root: &str,
    filter: &[Sid],
    options: TraverseOptions,
) -> QueryResult<Vec<TraverseRowView>> {
    let filter: BTreeSet<Sid> = filter.iter().cloned().collect();
    let report = traverse_report(&l.tree, root, &filter, options)?;
    Ok(traversal_rows(&report, &l.graph))
}

pub fn effective(l: &Loaded, path: &str, principal: &Sid) -> QueryResult<EffectiveView> {
    let result = effective_mask(&l.tree, path, principal, &l.graph)?;
    let canonical = l.tree.node(l.tree.resolve_path(path)?).path().to_string();
    Ok(EffectiveView::new(&canonical, principal, &result, &l.graph))
}

/// Folders under `root` whose ACL differs from their parent's.
pub fn effective_recursive(l: &Loaded, root: &str, principal: &Sid) -> QueryResult<Vec<EffectiveRowView>> {
    let report = effective_search(&l.tree, root, principal, &l.graph, true)?;
    Ok(effective_rows(&report))
}

pub fn membership(l: &Loaded, sid: &Sid, direction: Direction) -> QueryResult<Vec<PrincipalView>> {
    let set = match direction {
        Direction::MemberOf => l.graph.member_of_closure(sid)?,
        Direction::Members => l.graph.members_closure(sid)?,
    };
    Ok(set
        .iter()
        .filter_map(|s| l.graph.principal(s))
        .map(PrincipalView::new)
        .collect())
}

pub fn audit(l: &Loaded, root: &str) -> QueryResult<Vec<FindingView>> {
    Ok(audit_shadowed_denies(&l.tree, root, &l.graph)?
        .iter()
        .map(|f| FindingView::new(f, &l.graph))
        .collect())
}

pub fn tree(l: &Loaded, path: &str, depth: u32) -> QueryResult<TreeNodeView> {
    let id = l.tree.resolve_path(path)?;
    Ok(tree_view(&l.tree, id, depth))
}

pub fn meta(l: Option<&Loaded>) -> MetaView {
    meta_view(l.map(|l| (&l.snapshot, &l.tree, &l.graph)))
}
