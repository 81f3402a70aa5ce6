//! Command-line and HTTP front ends for `aclens-core`.

pub mod cli;
pub mod queries;
pub mod service;
mod table;
