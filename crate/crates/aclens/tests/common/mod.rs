#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

const U: &str = "S-1-5-21-7-1001";
const CAROL: &str = "S-1-5-21-100-200-300-1003";

/// Golden case: output file stem, fixture, arguments after the subcommand
/// name, expected exit code.
pub struct Case {
    pub name: &'static str,
    pub fixture: &'static str,
    pub command: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
}

pub const CASES: &[Case] = &[
    Case { name: "fig3_show_accounting", fixture: "fig3_shadowed_deny", command: "show", args: &["/Accounting"], code: 0 },
    Case { name: "fig3_traverse", fixture: "fig3_shadowed_deny", command: "traverse", args: &[], code: 0 },
    Case { name: "fig3_effective_plan", fixture: "fig3_shadowed_deny", command: "effective", args: &["/Accounting/Plan", "--principal", U], code: 0 },
    Case { name: "fig3_effective_recursive", fixture: "fig3_shadowed_deny", command: "effective", args: &["/", "--principal", U, "--recursive"], code: 0 },
    Case { name: "fig3_membership", fixture: "fig3_shadowed_deny", command: "membership", args: &["--sid", U], code: 0 },
    Case { name: "fig3_audit", fixture: "fig3_shadowed_deny", command: "audit", args: &[], code: 1 },
    Case { name: "users_traverse", fixture: "users_dir_demo", command: "traverse", args: &[], code: 0 },
    Case { name: "users_traverse_filtered", fixture: "users_dir_demo", command: "traverse", args: &["--filter", "S-1-1-0"], code: 0 },
    Case { name: "users_audit", fixture: "users_dir_demo", command: "audit", args: &[], code: 0 },
    Case { name: "special_show_root", fixture: "special_perm_demo", command: "show", args: &["/"], code: 0 },
    Case { name: "special_traverse_files", fixture: "special_perm_demo", command: "traverse", args: &["--include-files"], code: 0 },
    Case { name: "special_effective_script", fixture: "special_perm_demo", command: "effective", args: &["/Scripts/run.cmd", "--principal", CAROL], code: 0 },
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(format!("{}/../core/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR")))
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(format!("{}/tests/golden/{name}.jsonl", env!("CARGO_MANIFEST_DIR")))
}

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

pub fn aclens<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_aclens")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn run_case(case: &Case) -> Run {
    let snapshot = fixture_path(case.fixture);
    let mut args: Vec<std::ffi::OsString> = vec![case.command.into(), "--snapshot".into(), snapshot.into()];
    args.extend(case.args.iter().map(Into::into));
    args.extend(["--format".into(), "json".into()]);
    aclens(args)
}
