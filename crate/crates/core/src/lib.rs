//! Permission analysis over directory-tree snapshots with NTFS-style
//! discretionary ACLs: access-mask algebra, inheritance propagation,
//! effective-permission accumulation, and change-only tree reports.

pub mod accumulation;
pub mod error;
pub mod mask;
pub mod membership;
pub mod model;
pub mod propagation;
pub mod snapshot;
pub mod traversal;
pub mod view;

pub use error::{Error, Result};
