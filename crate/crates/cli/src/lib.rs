//! Library behind the `eigen` command: configuration, coefficient files,
//! remote fetching, rendering and benchmarks.

pub mod bench;
pub mod coeffs;
pub mod error;
pub mod fetch;
pub mod run;

pub use bench::{run_bench, BenchRow, BenchSpec};
pub use coeffs::{ingest_coefficients, CoefficientFile};
pub use error::{CliError, CliResult};
pub use fetch::fetch_remote_coefficients;
pub use run::{run_eigenvalue, run_qexp, OutputFormat, RunConfig, StructuredRecord};
