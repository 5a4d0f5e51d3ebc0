//! File formats, synthetic data and result writers.

pub mod gen;
pub mod mtx;
pub mod output;

pub use gen::{generate, DegreeDist, GenSpec, ValueDist};
pub use mtx::{parse_matrix_market, read_matrix_market, write_matrix_market, write_matrix_market_to};
pub use output::{write_output, write_output_to, Output, OutputFormat, WriteOptions};
