//! Data generation, matrix CSV files, experiment sweeps and the invariant
//! suite behind the command-line tool.
//!
//! Every random draw is keyed by a master seed and the cell's coordinates, so
//! a report never depends on thread count or completion order.

mod check;
mod config;
mod csv_io;
mod data;
mod sweep;

pub use check::{run_checks, CheckOutcome, CheckReport};
pub use config::{ExperimentConfig, ExperimentKind};
pub use csv_io::{format_matrix_csv, parse_matrix_csv, read_matrix_csv, write_matrix_csv};
pub use data::{gen_data, gen_weights, Distribution};
pub use sweep::{report_paths, run_sweep, SweepReport, SweepRow, CSV_HEADER};
