//! Batch front end for `nucmeasure`: problem files in, JSON reports and
//! plot data out.

pub mod fixtures;
pub mod plot;
pub mod problem;
pub mod run;

pub use plot::emit_curve_plot_data;
pub use problem::{Config, Kind, ProblemFile};
pub use run::{run, Report};
