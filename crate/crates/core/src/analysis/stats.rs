//! Small sample statistics used by the Monte-Carlo checks and sweeps.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundTest {
    pub mean: f64,
    pub std_dev: f64,
    pub bound: f64,
    pub t: f64,
    /// `P(T >= t)` under `mean == bound`.
    pub p_value: f64,
    /// True unless the sample mean is significantly above the bound.
    pub passed: bool,
}

/// One-sided t-test of `H0: E[X] <= bound` against `H1: E[X] > bound`.
/// Needs at least two samples.
pub fn upper_bound_t_test(samples: &[f64], bound: f64, alpha: f64) -> UpperBoundTest {
    assert!(samples.len() >= 2, "t-test needs at least two samples");
    let m = mean(samples);
    let sd = std_dev(samples);
    let n = samples.len() as f64;
    let (t, p_value) = if sd == 0.0 {
        if m > bound {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 1.0)
        }
    } else {
        let t = (m - bound) / (sd / n.sqrt());
        let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("positive degrees of freedom");
        (t, 1.0 - dist.cdf(t))
    };
    UpperBoundTest {
        mean: m,
        std_dev: sd,
        bound,
        t,
        p_value,
        passed: p_value >= alpha,
    }
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "slope needs two points");
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    ls_slope(&lx, &ly)
}

/// `count` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
