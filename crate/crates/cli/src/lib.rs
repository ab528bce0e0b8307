//! Driver library behind the `svc` binary.

pub mod analytic;
pub mod config;
pub mod e2e;
pub mod measure;
pub mod report;
pub mod updinfo_json;
