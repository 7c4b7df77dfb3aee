//! Command-line driver for `ruinrate-core`: JSON model documents, the
//! built-in table and figure scenarios, CSV/JSON reports and a rayon-backed
//! path runner.

pub mod cli;
pub mod model_doc;
pub mod parallel;
pub mod report;
pub mod tables;

pub use model_doc::ModelDoc;
pub use parallel::Parallel;
