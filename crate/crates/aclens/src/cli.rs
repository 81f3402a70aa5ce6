//! `aclens` subcommands. Every command writes either an aligned table or
//! line-delimited JSON to stdout, and diagnostics to stderr.

use std::io::Write;
use std::net::IpAddr;
use std::path::PathBuf;

use aclens_core::traversal::TraverseOptions;
use aclens_core::view::{to_json_lines, AceView};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::queries::{self, parse_sid, Direction, Loaded, QueryError};
use crate::table::Table;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FINDINGS: u8 = 1;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_RUNTIME: u8 = 70;

#[derive(Debug, Parser)]
#[command(name = "aclens", version, about = "Permission analysis over directory-tree ACL snapshots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    MemberOf,
    Members,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Show the full ACL of one node.
    Show {
        #[arg(long)]
        snapshot: PathBuf,
        path: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Walk a folder tree listing ACLs that differ from the parent's.
    Traverse {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(default_value = "/")]
        root: String,
        /// Hide ACEs for this exact SID (repeatable).
        #[arg(long = "filter", value_name = "SID")]
        filter: Vec<String>,
        #[arg(long)]
        include_unchanged: bool,
        #[arg(long)]
        include_files: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Effective permission of a principal, per attribute or recursively.
    Effective {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(default_value = "/")]
        root: String,
        #[arg(long, value_name = "SID")]
        principal: String,
        /// List folders below ROOT whose ACL differs from the parent's.
        #[arg(long)]
        recursive: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Transitive group membership in either direction.
    Membership {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, value_name = "SID")]
        sid: String,
        #[arg(long, value_enum, default_value = "member-of")]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Report explicit allows that override inherited denies. Exits 1 when
    /// any are found.
    Audit {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(default_value = "/")]
        root: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Attribute, code and bit table; snapshot statistics when given one.
    Meta {
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Serve the analyses over HTTP for one snapshot.
    Serve {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value_t = 8077)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Allow only these origins instead of any (repeatable).
        #[arg(long = "cors-origin", value_name = "ORIGIN")]
        cors_origin: Vec<String>,
    },
}

/// Output of one command: text for stdout and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

fn ok(stdout: String) -> Result<Outcome, QueryError> {
    Ok(Outcome { stdout, code: EXIT_OK })
}

fn json_line<T: Serialize>(value: &T) -> String {
    to_json_lines(std::slice::from_ref(value))
}

fn flags_short(flags: &[String]) -> String {
    if flags.is_empty() {
        return "-".to_string();
    }
    flags
        .iter()
        .map(|f| match f.as_str() {
            "container_inherit" => "CI",
            "object_inherit" => "OI",
            "no_propagate" => "NP",
            "inherit_only" => "IO",
            other => other,
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn provenance(a: &AceView) -> String {
    if a.provenance == "explicit" {
        "explicit".to_string()
    } else {
        format!("inherited ({})", a.distance)
    }
}

fn kind_label(kind: &str) -> &'static str {
    if kind == "deny" {
        "Deny"
    } else {
        "Allow"
    }
}

fn ace_cells(a: &AceView) -> Vec<String> {
    vec![
        a.principal_name.clone(),
        kind_label(&a.kind).to_string(),
        a.rendered.clone(),
        provenance(a),
        flags_short(&a.flags),
    ]
}

const ACE_HEADERS: [&str; 5] = ["PRINCIPAL", "TYPE", "ACCESS", "PROVENANCE", "FLAGS"];

fn load(path: &std::path::Path) -> Result<Loaded, QueryError> {
    Loaded::from_file(path)
}

/// Run every command except `serve`.
pub fn execute(command: &Command) -> Result<Outcome, QueryError> {
    match command {
        Command::Show { snapshot, path, format } => {
            let l = load(snapshot)?;
            let rows = queries::acl(&l, path)?;
            match format {
                Format::Json => ok(to_json_lines(&rows)),
                Format::Table => {
                    let mut t = Table::new(ACE_HEADERS);
                    for a in &rows {
                        t.row(ace_cells(a));
                    }
                    if rows.is_empty() {
                        t.row(["(no entries)"]);
                    }
                    ok(t.render())
                }
            }
        }
        Command::Traverse {
            snapshot,
            root,
            filter,
            include_unchanged,
            include_files,
            format,
        } => {
            let l = load(snapshot)?;
            let filter = filter.iter().map(|s| parse_sid(s)).collect::<Result<Vec<_>, _>>()?;
            let options = TraverseOptions {
                include_unchanged: *include_unchanged,
                include_files: *include_files,
            };
            let rows = queries::traverse(&l, root, &filter, options)?;
            match format {
                Format::Json => ok(to_json_lines(&rows)),
                Format::Table => {
                    let mut headers = vec!["PATH"];
                    headers.extend(ACE_HEADERS);
                    let mut t = Table::new(headers);
                    for row in &rows {
                        if row.entries.is_empty() {
                            t.row([row.path.as_str(), "(no entries)"]);
                        }
                        for (i, a) in row.entries.iter().enumerate() {
                            let first = if i == 0 { row.path.clone() } else { String::new() };
                            t.row(std::iter::once(first).chain(ace_cells(a)));
                        }
                    }
                    ok(t.render())
                }
            }
        }
        Command::Effective {
            snapshot,
            root,
            principal,
            recursive,
            format,
        } => {
            let l = load(snapshot)?;
            let principal = parse_sid(principal)?;
            if *recursive {
                let rows = queries::effective_recursive(&l, root, &principal)?;
                return match format {
                    Format::Json => ok(to_json_lines(&rows)),
                    Format::Table => {
                        let mut t = Table::new(["PATH", "ACCESS", "MASK"]);
                        for r in &rows {
                            t.row([r.path.as_str(), r.rendered.as_str(), r.granted.as_str()]);
                        }
                        ok(t.render())
                    }
                };
            }
            let view = queries::effective(&l, root, &principal)?;
            match format {
                Format::Json => ok(json_line(&view)),
                Format::Table => {
                    let mut out = format!(
                        "{} on {}: {} ({}){}\n\n",
                        view.principal_name,
                        view.path,
                        view.rendered,
                        view.granted,
                        if view.short_circuited { ", refused by an explicit deny" } else { "" }
                    );
                    let mut t = Table::new(["ATTRIBUTE", "CODE", "RESULT", "DECIDED BY"]);
                    for a in &view.attributes {
                        let decided = match &a.decided_by {
                            None => "no matching entry".to_string(),
                            Some(ace) => format!(
                                "{} {} {}, {}",
                                kind_label(&ace.kind),
                                ace.principal_name,
                                ace.rendered,
                                provenance(ace)
                            ),
                        };
                        let result = if a.granted { "granted" } else { "denied" };
                        t.row([a.attribute.clone(), a.code.clone(), result.to_string(), decided]);
                    }
                    out.push_str(&t.render());
                    ok(out)
                }
            }
        }
        Command::Membership {
            snapshot,
            sid,
            direction,
            format,
        } => {
            let l = load(snapshot)?;
            let sid = parse_sid(sid)?;
            let direction = match direction {
                DirectionArg::MemberOf => Direction::MemberOf,
                DirectionArg::Members => Direction::Members,
            };
            let rows = queries::membership(&l, &sid, direction)?;
            match format {
                Format::Json => ok(to_json_lines(&rows)),
                Format::Table => {
                    let mut t = Table::new(["SID", "NAME", "KIND"]);
                    for r in &rows {
                        t.row([r.sid.as_str(), r.name.as_str(), r.kind.as_str()]);
                    }
                    ok(t.render())
                }
            }
        }
        Command::Audit { snapshot, root, format } => {
            let l = load(snapshot)?;
            let findings = queries::audit(&l, root)?;
            let stdout = match format {
                Format::Json => to_json_lines(&findings),
                Format::Table => {
                    let mut t = Table::new(["PATH", "PRINCIPAL", "SHADOWED", "DENY SOURCE", "DENIED TO"]);
                    for f in &findings {
                        t.row([
                            f.path.as_str(),
                            f.principal_name.as_str(),
                            f.shadowed_rendered.as_str(),
                            f.deny_source_path.as_str(),
                            f.deny.principal_name.as_str(),
                        ]);
                    }
                    t.render()
                }
            };
            let code = if findings.is_empty() { EXIT_OK } else { EXIT_FINDINGS };
            Ok(Outcome { stdout, code })
        }
        Command::Meta { snapshot, format } => {
            let l = snapshot.as_deref().map(load).transpose()?;
            let view = queries::meta(l.as_ref());
            match format {
                Format::Json => ok(json_line(&view)),
                Format::Table => {
                    let mut t = Table::new(["BIT", "CODE", "ATTRIBUTE", "LABEL"]);
                    for a in &view.attributes {
                        t.row([a.bit.to_string(), a.code.clone(), a.attribute.clone(), a.label.clone()]);
                    }
                    let mut out = t.render();
                    let mut levels = Table::new(["LEVEL", "MASK", "GENERIC", "CODES"]);
                    for lvl in &view.levels {
                        levels.row([
                            lvl.level.as_str(),
                            lvl.mask.as_str(),
                            lvl.generic_bits.as_str(),
                            lvl.codes.as_str(),
                        ]);
                    }
                    out.push('\n');
                    out.push_str(&levels.render());
                    if let Some(s) = &view.snapshot {
                        out.push_str(&format!(
                            "\n{} nodes, {} folders, {} explicit ACEs, {} principals, {} memberships\n",
                            s.nodes,
                            s.folders,
                            s.explicit_aces,
                            s.principals.len(),
                            s.memberships
                        ));
                    }
                    ok(out)
                }
            }
        }
        Command::Serve { .. } => unreachable!("serve is handled by run"),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Command::Serve {
        snapshot,
        port,
        bind,
        cors_origin,
    } = cli.command
    {
        return crate::service::serve_file(&snapshot, bind, port, cors_origin);
    }
    match execute(&cli.command) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(outcome.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return EXIT_RUNTIME;
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("aclens: {e}");
            e.exit_code()
        }
    }
}
