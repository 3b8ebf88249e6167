//! Library side of the `d2c` binary: config schemas, file formats, and
//! rayon drivers over the core's per-DAG functions. The integration and
//! acceptance tests build on these directly.

pub mod config;
pub mod io;
pub mod parallel;
