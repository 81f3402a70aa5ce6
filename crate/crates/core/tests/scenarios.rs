mod common;

use std::collections::BTreeSet;

use aclens_core::accumulation::{effective_mask, effective_search};
use aclens_core::mask::{compress_special, mask_of, AccessMask, CoarseLevel, PermissionAttribute};
use aclens_core::model::{acl_equal, AceKind, Sid};
use aclens_core::traversal::{audit_shadowed_denies, per_principal_report, traverse_report, TraverseOptions};

fn sid(s: &str) -> Sid {
    Sid::parse(s).unwrap()
}

const U: &str = "S-1-5-21-7-1001";
const EVERYONE: &str = "S-1-1-0";

fn modify() -> AccessMask {
    CoarseLevel::Modify.canonical_mask().unwrap()
}

#[test]
fn fig3_effective_permissions() {
    let (_, tree, graph) = common::fixture("fig3_shadowed_deny");
    let plan = effective_mask(&tree, "/Accounting/Plan", &sid(U), &graph).unwrap();
    assert_eq!(plan.granted(), modify());
    assert!(!plan.short_circuited());
    let read = plan.decision(PermissionAttribute::ReadData).unwrap();
    assert!(read.ace.is_explicit() && read.ace.is_allow());
    let acc = effective_mask(&tree, "/Accounting", &sid(U), &graph).unwrap();
    assert_eq!(acc.granted(), AccessMask::EMPTY);
    assert!(acc.short_circuited());
    assert!(!acl_equal(tree.acl_at("/Accounting").unwrap(), tree.acl_at("/Accounting/Plan").unwrap()));
    assert!(tree.resolve_path("/Accounting/Missing").is_err());
}

#[test]
fn fig3_audit_and_search() {
    let (_, tree, graph) = common::fixture("fig3_shadowed_deny");
    let findings = audit_shadowed_denies(&tree, "/", &graph).unwrap();
    assert_eq!(findings.len(), 1);
    let f = &findings[0];
    assert_eq!(f.path, "/Accounting/Plan");
    assert_eq!(f.principal, sid(U));
    assert_eq!(f.shadowed, modify());
    assert_eq!(f.deny_source_path, "/Accounting");

    let search = effective_search(&tree, "/", &sid(U), &graph, true).unwrap();
    let rows: Vec<_> = search.rows.iter().map(|r| (r.path.as_str(), r.granted)).collect();
    assert_eq!(rows, vec![("/Accounting", AccessMask::EMPTY), ("/Accounting/Plan", modify())]);
    assert_eq!(effective_search(&tree, "/", &sid(U), &graph, false).unwrap().rows.len(), 3);

    let report = per_principal_report(&tree, "/", &sid(U), &graph, TraverseOptions::default()).unwrap();
    assert_eq!(report.paths(), vec!["/Accounting", "/Accounting/Plan"]);
    let deny = &report.rows[0].entries[0];
    assert_eq!((deny.kind, deny.level), (AceKind::Deny, CoarseLevel::FullControl));
    assert_eq!(deny.matched_via, Some(vec![sid(U), sid(EVERYONE)]));
    let plan: Vec<_> = report.rows[1].entries.iter().map(|e| (e.kind, e.principal.as_str())).collect();
    assert_eq!(plan, vec![(AceKind::Allow, U), (AceKind::Deny, EVERYONE)]);
}

#[test]
fn users_dir_traversal_lists_changed_folders() {
    let (_, tree, _) = common::fixture("users_dir_demo");
    let report = traverse_report(&tree, "/", &BTreeSet::new(), TraverseOptions::default()).unwrap();
    assert_eq!(report.paths(), vec!["/", "/Public", "/alice", "/alice/Documents", "/bob"]);
    let filter = BTreeSet::from([sid(EVERYONE)]);
    let filtered = traverse_report(&tree, "/", &filter, TraverseOptions::default()).unwrap();
    assert_eq!(filtered.paths(), report.paths());
    for row in &filtered.rows {
        assert!(row.entries.iter().all(|e| e.principal != sid(EVERYONE)));
    }
    let all = TraverseOptions { include_unchanged: true, include_files: true };
    assert_eq!(traverse_report(&tree, "/", &BTreeSet::new(), all).unwrap().rows.len(), tree.len());
}

#[test]
fn special_permission_rendering() {
    use PermissionAttribute::*;
    let (_, tree, graph) = common::fixture("special_perm_demo");
    let report = traverse_report(&tree, "/", &BTreeSet::new(), TraverseOptions::default()).unwrap();
    let root = &report.rows[0];
    let users = root.entries.iter().find(|e| e.principal == sid("S-1-5-32-545")).unwrap();
    assert_eq!(users.level, CoarseLevel::Special);
    assert_eq!(users.rendered, "R-W-Dc-Rp-Cp");
    assert_eq!(users.mask, mask_of(&[ReadData, WriteData, DeleteChild, ReadPermissions, ChangePermissions]));
    let system = root.entries.iter().find(|e| e.principal == sid("S-1-5-18")).unwrap();
    assert_eq!(system.rendered, "FullControl");
    for row in &report.rows {
        for e in &row.entries {
            let codes = compress_special(e.mask).unwrap();
            assert_eq!(e.level == CoarseLevel::Special, e.rendered == codes);
            if e.level != CoarseLevel::Special {
                assert_eq!(e.rendered, e.level.name());
            }
        }
    }
    let listing = report.rows.iter().find(|r| r.path == "/Listing").unwrap();
    assert_eq!(listing.entries[0].level, CoarseLevel::ListFolderContents);
    let scripts = report.rows.iter().find(|r| r.path == "/Scripts").unwrap();
    assert_eq!(scripts.entries[0].level, CoarseLevel::ReadAndExecute);
    // The inherit-only deny applies to the file below, not to the folder.
    assert!(scripts.entries.iter().all(|e| e.kind == AceKind::Allow));
    let carol = sid("S-1-5-21-100-200-300-1003");
    let run = effective_mask(&tree, "/Scripts/run.cmd", &carol, &graph).unwrap().granted();
    assert!(!run.contains(WriteData) && run.contains(Execute) && run.contains(DeleteChild));
}

#[test]
fn unchanged_tree_reports_root_only() {
    let (_, tree, graph) = common::fixture("unchanged_tree");
    let report = traverse_report(&tree, "/", &BTreeSet::new(), TraverseOptions::default()).unwrap();
    assert_eq!(report.paths(), vec!["/"]);
    let every = TraverseOptions { include_unchanged: true, include_files: false };
    assert_eq!(traverse_report(&tree, "/", &BTreeSet::new(), every).unwrap().rows.len(), 5);
    let admins = sid("S-1-5-32-544");
    assert_eq!(effective_search(&tree, "/", &admins, &graph, true).unwrap().rows.len(), 1);
}

#[test]
fn cyclic_membership_terminates() {
    let (_, tree, graph) = common::fixture("cyclic_membership");
    let dana = sid("S-1-5-21-9-1001");
    let groups = graph.member_of_closure(&dana).unwrap();
    assert_eq!(groups, BTreeSet::from([sid("S-1-5-21-9-2001"), sid("S-1-5-21-9-2002")]));
    assert_eq!(graph.cyclic_groups().len(), 2);
    assert!(graph.members_closure(&sid("S-1-5-21-9-2003")).unwrap().is_empty());
    assert_eq!(effective_mask(&tree, "/", &dana, &graph).unwrap().granted(), modify());
}

#[test]
fn disjoint_masks_produce_no_finding() {
    let (_, tree, graph) = common::fixture("disjoint_mask");
    assert!(audit_shadowed_denies(&tree, "/", &graph).unwrap().is_empty());
    let granted = effective_mask(&tree, "/Reports", &sid(U), &graph).unwrap().granted();
    assert_eq!(granted, mask_of(&[PermissionAttribute::ReadData]));
}
