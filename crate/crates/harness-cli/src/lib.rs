//! File formats, planted-instance generators, invariant suites, and report
//! plumbing behind the `rankcert` command-line tool.

pub mod bench;
pub mod error;
pub mod gen;
pub mod io;
pub mod report;

pub use error::HarnessError;
