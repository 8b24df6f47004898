//! Frequency-domain block filtering on STFT grids.

mod complexity;
mod cycle;
mod direct;
mod doppler;
mod excise;
mod plan;
mod stft;

pub use complexity::{complexity, Complexity, COMPLEXITY_CSV_HEADER};
pub use cycle::{filter, filter_cycle, filter_cycle_partials, filter_partials, FilterState};
pub use direct::direct_convolve;
pub use doppler::{doppler_grid, DopplerGrid};
pub use excise::excise;
pub use plan::{matched_response, plan_filter, BlockFilterPlan, FilterForm, OverlapMode, PlanSpec};
pub use stft::{analyze, check_framing, StftGrid};
