//! Standard-library companion to `isingcw-core`: model and edge-list files,
//! CSV output, rayon-parallel drivers and the `isingcw` command line.

pub mod cli;
pub mod error;
pub mod formats;
pub mod grid;
pub mod output;
pub mod parallel;

pub use error::AppError;
