//! Expected-value bounds, bandwidth and energy models, and suite summaries.

pub mod aggregate;
pub mod bandwidth;
pub mod bounds;
pub mod energy;
pub mod montecarlo;
pub mod stats;

pub use aggregate::{aggregate, geometric_mean, AggregateError, MatrixResult, Summary};
pub use bandwidth::{required_bandwidth, row_index_width, Bandwidth};
pub use bounds::{
    expected_colors_bound, expected_execution_bound, expected_utilization, utilization_from_bounds,
    BoundError, BoundInputs,
};
pub use energy::{
    energy_estimate, EnergyBreakdown, EnergyDesign, EnergyError, EnergyModel, Workload,
};
pub use montecarlo::{check_bounds, uniform_ensemble, EnsembleCheck, SampleColors};
