//! Seeded generator for test and benchmark snapshots.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PrincipalEntry, Snapshot, SnapshotNode, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::mask::{AccessMask, CoarseLevel, PermissionAttribute};
use crate::model::{Ace, AceKind, InheritFlags, NodeKind, PrincipalKind, Sid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub seed: u64,
    /// Folder count including the root.
    pub folders: usize,
    pub principals: usize,
    /// Deepest folder level; the root is level 1.
    pub max_depth: usize,
    /// Probability that a node carries explicit ACEs (1 to 4 of them).
    pub ace_density: f64,
    /// Files added under every folder.
    pub files_per_folder: usize,
}

impl SyntheticParams {
    pub fn new(seed: u64, folders: usize, principals: usize, max_depth: usize, ace_density: f64) -> Self {
        SyntheticParams {
            seed,
            folders,
            principals,
            max_depth,
            ace_density,
            files_per_folder: 0,
        }
    }

    pub fn with_files(mut self, files_per_folder: usize) -> Self {
        self.files_per_folder = files_per_folder;
        self
    }
}

struct Builder {
    name: String,
    kind: NodeKind,
    owner: usize,
    aces: Vec<Ace>,
    children: Vec<usize>,
}

pub fn generate_synthetic(params: SyntheticParams) -> Result<Snapshot> {
    let SyntheticParams {
        seed,
        folders,
        principals,
        max_depth,
        ace_density,
        files_per_folder,
    } = params;
    if folders < 1 || principals < 1 || max_depth < 1 {
        return Err(Error::BadParameters("folders, principals and max_depth must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&ace_density) {
        return Err(Error::BadParameters(format!("ace_density {ace_density} outside 0..1")));
    }
    if max_depth == 1 && folders > 1 {
        return Err(Error::BadParameters("max_depth 1 allows only the root folder".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // With two or more principals, a third are groups and the first group is
    // Everyone; a single principal is a lone user.
    let group_count = if principals >= 2 { (principals / 3).max(1) } else { 0 };
    let mut entries = Vec::with_capacity(principals);
    for i in 0..group_count {
        let sid = if i == 0 {
            Sid::parse("S-1-1-0").expect("valid").with_display_name("Everyone")
        } else {
            Sid::parse(&format!("S-1-5-32-{}", 600 + i))
                .expect("valid")
                .with_display_name(format!("SYNTH\\group{i}"))
        };
        entries.push(PrincipalEntry {
            sid,
            kind: PrincipalKind::Group,
        });
    }
    for i in 0..principals - group_count {
        let sid = Sid::parse(&format!("S-1-5-21-1000-2000-3000-{}", 1001 + i))
            .expect("valid")
            .with_display_name(format!("SYNTH\\user{i}"));
        entries.push(PrincipalEntry {
            sid,
            kind: PrincipalKind::User,
        });
    }

    let mut memberships = Vec::new();
    for (m, member) in entries.iter().enumerate() {
        for (g, group) in entries.iter().enumerate().take(group_count) {
            if m == g {
                continue;
            }
            let p = match (member.kind, g) {
                (PrincipalKind::User, 0) => 0.9,
                (PrincipalKind::User, _) => 0.4,
                (PrincipalKind::Group, _) => 0.2,
            };
            if rng.gen_bool(p) {
                memberships.push((member.sid.clone(), group.sid.clone()));
            }
        }
    }

    let levels = CoarseLevel::STANDARD;
    let valid_flags: Vec<InheritFlags> = InheritFlags::all_valid().collect();
    let random_ace = |rng: &mut ChaCha8Rng, kind: NodeKind| -> Ace {
        let principal = entries[rng.gen_range(0..entries.len())].sid.clone();
        let ace_kind = if rng.gen_bool(0.3) { AceKind::Deny } else { AceKind::Allow };
        let mask = if rng.gen_bool(0.5) {
            levels.choose(rng).and_then(|l| l.canonical_mask()).expect("standard level")
        } else {
            let bits = rng.gen_range(1u32..(1 << 14));
            PermissionAttribute::ALL
                .into_iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, a)| a)
                .collect::<AccessMask>()
        };
        let flags = match kind {
            NodeKind::Folder => *valid_flags.choose(rng).expect("non-empty"),
            NodeKind::File => InheritFlags::NONE,
        };
        Ace::explicit(principal, ace_kind, mask, flags).expect("non-empty mask")
    };

    let mut nodes: Vec<Builder> = Vec::with_capacity(folders * (1 + files_per_folder));
    let mut depth: Vec<usize> = Vec::with_capacity(folders);
    let mut open: Vec<usize> = Vec::new();
    nodes.push(Builder {
        name: "root".into(),
        kind: NodeKind::Folder,
        owner: rng.gen_range(0..entries.len()),
        aces: Vec::new(),
        children: Vec::new(),
    });
    depth.push(1);
    if max_depth > 1 {
        open.push(0);
    }
    for i in 1..folders {
        let parent = open[rng.gen_range(0..open.len())];
        let id = nodes.len();
        nodes.push(Builder {
            name: format!("d{i}"),
            kind: NodeKind::Folder,
            owner: rng.gen_range(0..entries.len()),
            aces: Vec::new(),
            children: Vec::new(),
        });
        nodes[parent].children.push(id);
        depth.push(depth[parent] + 1);
        if depth[id] < max_depth {
            open.push(id);
        }
    }
    for folder in 0..folders {
        for j in 0..files_per_folder {
            let id = nodes.len();
            nodes.push(Builder {
                name: format!("f{j}.dat"),
                kind: NodeKind::File,
                owner: rng.gen_range(0..entries.len()),
                aces: Vec::new(),
                children: Vec::new(),
            });
            nodes[folder].children.push(id);
        }
    }
    for i in 0..nodes.len() {
        if ace_density > 0.0 && rng.gen_bool(ace_density) {
            let count = rng.gen_range(1..=4);
            let kind = nodes[i].kind;
            nodes[i].aces = (0..count).map(|_| random_ace(&mut rng, kind)).collect();
        }
    }

    // Children always have larger ids than their parent, so assembling in
    // reverse id order finishes every child before its parent.
    let mut built: Vec<Option<SnapshotNode>> = (0..nodes.len()).map(|_| None).collect();
    for i in (0..nodes.len()).rev() {
        let b = &mut nodes[i];
        let children = b
            .children
            .iter()
            .map(|c| built[*c].take().expect("child built"))
            .collect();
        built[i] = Some(SnapshotNode {
            name: std::mem::take(&mut b.name),
            kind: b.kind,
            owner: entries[b.owner].sid.clone(),
            aces: std::mem::take(&mut b.aces),
            children,
        });
    }

    Ok(Snapshot {
        format_version: FORMAT_VERSION,
        principals: entries,
        memberships,
        tree: built[0].take().expect("root built"),
    })
}
