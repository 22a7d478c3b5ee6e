//! Seeded uniform ensembles for checking the expected-value bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{expected_colors_bound, expected_execution_bound, BoundInputs};
use super::stats::{upper_bound_t_test, UpperBoundTest};
use crate::matio::{generate, MatrixError, SynthSpec};
use crate::scheduler::{window_bounds, Layout, DRAIN_CYCLES};

/// Optimal (max-degree) color counts of one uniform sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleColors {
    pub seed: u64,
    pub per_window: Vec<usize>,
}

impl SampleColors {
    pub fn mean_colors(&self) -> f64 {
        self.per_window.iter().sum::<usize>() as f64 / self.per_window.len().max(1) as f64
    }

    /// `Σ C_w + 2` with optimal colors.
    pub fn execution_cycles(&self) -> usize {
        self.per_window.iter().sum::<usize>() + DRAIN_CYCLES
    }
}

/// One sample per seed `base_seed .. base_seed + samples`, in seed order.
pub fn uniform_ensemble(
    b: &BoundInputs,
    samples: usize,
    base_seed: u64,
) -> Result<Vec<SampleColors>, MatrixError> {
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed + i;
            let m = generate(&SynthSpec::uniform(b.n, b.p, seed))?;
            Ok(SampleColors {
                seed,
                per_window: window_bounds(&m, &Layout::identity(&m, b.l)),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleCheck {
    pub samples: usize,
    pub colors: UpperBoundTest,
    pub execution: UpperBoundTest,
}

impl EnsembleCheck {
    pub fn passed(&self) -> bool {
        self.colors.passed && self.execution.passed
    }
}

/// Tests per-sample mean window colors against the color bound and
/// per-sample execution cycles against the execution bound.
pub fn check_bounds(
    b: &BoundInputs,
    samples: usize,
    base_seed: u64,
    alpha: f64,
) -> Result<EnsembleCheck, MatrixError> {
    let ens = uniform_ensemble(b, samples, base_seed)?;
    let colors: Vec<f64> = ens.iter().map(SampleColors::mean_colors).collect();
    let exec: Vec<f64> = ens.iter().map(|s| s.execution_cycles() as f64).collect();
    Ok(EnsembleCheck {
        samples,
        colors: upper_bound_t_test(&colors, expected_colors_bound(b), alpha),
        execution: upper_bound_t_test(&exec, expected_execution_bound(b), alpha),
    })
}
