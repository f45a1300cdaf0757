//! File-system side of the corpus toolkit: ELAN and YAML decoding,
//! repository loading and the `gestit` command line. The format logic
//! itself lives in `gestit-core`.

pub mod cli;
pub mod eaf_xml;
pub mod files;
pub mod repo;
pub mod yaml;

pub use repo::{load_repository, Layout, LoadError};
