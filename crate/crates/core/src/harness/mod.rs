//! Monte Carlo experiments: curves, false-alarm measurement and threshold calibration.

mod calibrate;
mod run;
mod spec;

pub use calibrate::{calibrate_threshold, measure_fa, measure_fa_counts, FaMeasurement};
pub use run::{curve_csv, run_experiment, CurvePoint, Receiver, CURVE_CSV_HEADER};
pub use spec::ExperimentSpec;
