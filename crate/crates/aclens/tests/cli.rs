mod common;

use common::{aclens, fixture_path, golden_path, run_case, CASES};

/// Set ACLENS_UPDATE_GOLDEN=1 to rewrite the expected outputs.
#[test]
fn golden_outputs() {
    let update = std::env::var_os("ACLENS_UPDATE_GOLDEN").is_some();
    for case in CASES {
        let run = run_case(case);
        assert_eq!(run.code, case.code, "{}: {}", case.name, run.stderr);
        let path = golden_path(case.name);
        if update {
            std::fs::write(&path, &run.stdout).unwrap();
        }
        let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(String::from_utf8_lossy(&run.stdout), String::from_utf8_lossy(&expected), "{}", case.name);
        for line in run.stdout.split(|b| *b == b'\n').filter(|l| !l.is_empty()) {
            serde_json::from_slice::<serde_json::Value>(line).expect("each line is a JSON document");
        }
    }
}

fn fx(name: &str) -> String {
    fixture_path(name).display().to_string()
}

#[test]
fn exit_codes() {
    let fig3 = fx("fig3_shadowed_deny");
    let disjoint = fx("disjoint_mask");
    let unchanged = fx("unchanged_tree");
    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["show", "--snapshot", &fig3, "/Accounting"], 0, ""),
        (vec!["show", "--snapshot", &fig3, "/Nope"], 3, "path not found"),
        (vec!["traverse", "--snapshot", &fig3, "/Accounting/Plan/x"], 3, "path not found"),
        (vec!["effective", "--snapshot", &fig3, "--principal", "S-1-5-21-7-9"], 4, "unknown principal"),
        (vec!["effective", "--snapshot", &fig3, "--principal", "bogus"], 4, "invalid SID"),
        (vec!["traverse", "--snapshot", &fig3, "--filter", "bogus"], 4, "invalid SID"),
        (vec!["membership", "--snapshot", &fig3, "--sid", "S-1-5-21-7-1001", "--direction", "members"], 4, "not a group"),
        (vec!["audit", "--snapshot", &fig3], 1, ""),
        (vec!["audit", "--snapshot", &disjoint], 0, ""),
        (vec!["audit", "--snapshot", &unchanged], 0, ""),
        (vec!["show", "--snapshot", "/definitely/missing.json", "/"], 2, "cannot read snapshot"),
        (vec!["show", "/"], 64, "--snapshot"),
        (vec!["meta"], 0, ""),
        (vec!["--help"], 0, ""),
    ];
    for (args, code, stderr) in cases {
        let run = aclens(&args);
        assert_eq!(run.code, code, "{args:?}: {}", run.stderr);
        assert!(run.stderr.contains(stderr), "{args:?}: {}", run.stderr);
        if code >= 2 && code != 64 {
            assert!(run.stdout.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn malformed_snapshot_exits_2_with_location() {
    let dir = std::env::temp_dir().join(format!("aclens-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    let text = std::fs::read_to_string(fixture_path("fig3_shadowed_deny"))
        .unwrap()
        .replace("\"mask\": \"Modify\"", "\"mask\": \"R-Q\"");
    std::fs::write(&bad, text).unwrap();
    let bad = bad.display().to_string();
    for args in [
        vec!["show", "--snapshot", bad.as_str(), "/"],
        vec!["serve", "--snapshot", bad.as_str(), "--port", "0"],
    ] {
        let run = aclens(&args);
        assert_eq!(run.code, 2, "{args:?}");
        assert!(run.stderr.contains("tree.children[0].children[0].aces[0].mask"), "{}", run.stderr);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn table_output() {
    let run = aclens(["show", "--snapshot", &fx("fig3_shadowed_deny"), "/Accounting"]);
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        "PRINCIPAL  TYPE  ACCESS       PROVENANCE  FLAGS\nEveryone   Deny  FullControl  explicit    CI\n"
    );
    let run = aclens(["show", "--snapshot", &fx("special_perm_demo"), "/"]);
    assert!(String::from_utf8(run.stdout).unwrap().contains("BUILTIN\\Users           Allow  R-W-Dc-Rp-Cp"));
    let run = aclens(["effective", "--snapshot", &fx("fig3_shadowed_deny"), "--principal", "S-1-5-21-7-1001", "--recursive"]);
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        "PATH              ACCESS  MASK\n/Accounting       none    0x00000000\n/Accounting/Plan  Modify  0x001301bf\n"
    );
}

#[test]
fn traversal_flags() {
    let unchanged = fx("unchanged_tree");
    let count = |args: &[&str]| -> usize {
        let mut all = vec!["traverse", "--snapshot", unchanged.as_str(), "--format", "json"];
        all.extend_from_slice(args);
        String::from_utf8(aclens(&all).stdout).unwrap().lines().count()
    };
    assert_eq!(count(&[]), 1);
    assert_eq!(count(&["--include-unchanged"]), 5);

    let run = aclens(["traverse", "--snapshot", &fx("users_dir_demo"), "--filter", "S-1-1-0", "--format", "json"]);
    assert!(!String::from_utf8(run.stdout).unwrap().contains("\"S-1-1-0\""));

    let run = aclens(["membership", "--snapshot", &fx("cyclic_membership"), "--sid", "S-1-5-21-9-2003", "--direction", "members", "--format", "json"]);
    assert_eq!((run.code, run.stdout.len()), (0, 0));
    let run = aclens(["membership", "--snapshot", &fx("cyclic_membership"), "--sid", "S-1-5-21-9-1001", "--format", "json"]);
    assert_eq!(String::from_utf8(run.stdout).unwrap().lines().count(), 2);
}

#[test]
fn meta_table_lists_all_codes() {
    let run = aclens(["meta", "--format", "json"]);
    let meta: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let codes: Vec<&str> = meta["attributes"].as_array().unwrap().iter().map(|a| a["code"].as_str().unwrap()).collect();
    assert_eq!(codes, ["R", "W", "Ad", "Re", "We", "X", "Dc", "Ra", "Wa", "D", "Rp", "Cp", "To", "Sy"]);
    assert!(meta.get("snapshot").is_none());
    let run = aclens(["meta", "--snapshot", &fx("users_dir_demo"), "--format", "json"]);
    let meta: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(meta["snapshot"]["nodes"], 13);
}
