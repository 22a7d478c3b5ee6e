//! Geometric-mean summaries over a suite of per-matrix results.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("cannot aggregate an empty result set")]
    Empty,
    #[error("{field} of `{name}` is {value}; geometric means need positive values")]
    NonPositive {
        name: String,
        field: &'static str,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixResult {
    pub name: String,
    pub utilization: f64,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub geomean_utilization: f64,
    pub geomean_speedup: f64,
    pub rows: Vec<MatrixResult>,
}

pub fn geometric_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() || values.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return None;
    }
    Some((values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp())
}

pub fn aggregate(results: &[MatrixResult]) -> Result<Summary, AggregateError> {
    if results.is_empty() {
        return Err(AggregateError::Empty);
    }
    for r in results {
        for (field, value) in [("utilization", r.utilization), ("speedup", r.speedup)] {
            if value.is_nan() || value <= 0.0 {
                return Err(AggregateError::NonPositive {
                    name: r.name.clone(),
                    field,
                    value,
                });
            }
        }
    }
    let util: Vec<f64> = results.iter().map(|r| r.utilization).collect();
    let speed: Vec<f64> = results.iter().map(|r| r.speedup).collect();
    Ok(Summary {
        geomean_utilization: geometric_mean(&util).expect("checked positive"),
        geomean_speedup: geometric_mean(&speed).expect("checked positive"),
        rows: results.to_vec(),
    })
}
