#![allow(dead_code)]

pub mod oracles;
pub mod strategies;

use aclens_core::membership::GroupGraph;
use aclens_core::propagation::MaterializedTree;
use aclens_core::snapshot::{generate_synthetic, load_tree, parse_snapshot, Snapshot, SyntheticParams};

pub fn fixture_text(name: &str) -> String {
    let path = format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn fixture(name: &str) -> (Snapshot, MaterializedTree, GroupGraph) {
    let snapshot = parse_snapshot(&fixture_text(name)).expect("fixture parses");
    let (tree, graph) = load_tree(&snapshot);
    (snapshot, tree, graph)
}

pub fn synthetic(params: SyntheticParams) -> (Snapshot, MaterializedTree, GroupGraph) {
    let snapshot = generate_synthetic(params).expect("valid parameters");
    let (tree, graph) = load_tree(&snapshot);
    (snapshot, tree, graph)
}

/// Small seeded trees of the shape used throughout the property suites.
pub fn small(seed: u64) -> (Snapshot, MaterializedTree, GroupGraph) {
    synthetic(SyntheticParams::new(seed, 30, 6, 6, 0.3).with_files(1))
}
