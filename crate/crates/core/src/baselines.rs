//! Closed-form cycle counts of the comparison accelerators and the
//! per-matrix comparison table.
//!
//! All designs are normalized to the same arithmetic budget as a length-`l`
//! datapath: the 1D array and adder tree have `l` multipliers, Flex-TPU is a
//! `√l × √l` grid, and the Fafnir tree has `l/2` multiplier leaves. `log` is
//! base 2 throughout.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::energy::{energy_estimate, EnergyDesign, EnergyModel, Workload};
use crate::matio::{DenseVector, SparseMatrix};
use crate::scheduler::{build_naive, schedule_colored, ColoringMethod, ScheduleError};
use crate::simgust::{simulate, simulate_naive, SimError};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("unknown design `{0}`")]
    UnknownDesign(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn log2_floor(l: usize) -> usize {
    (usize::BITS - 1 - l.leading_zeros()) as usize
}

/// `⌈m·n/l⌉ + l + 1`.
pub fn cycles_1d(m: usize, n: usize, l: usize) -> u64 {
    assert!(l >= 1);
    ((m as u64) * (n as u64)).div_ceil(l as u64) + l as u64 + 1
}

/// `⌈m·n/l⌉ + log2(l) + 1`.
pub fn cycles_adder_tree(m: usize, n: usize, l: usize) -> u64 {
    assert!(l >= 1);
    ((m as u64) * (n as u64)).div_ceil(l as u64) + log2_floor(l) as u64 + 1
}

/// `⌈3·nnz/l⌉`: roughly `3l` cycles per partition of `l` nonzeros
/// (reconfigure, compute, dump). `l` is the grid side.
pub fn cycles_flex_tpu(nnz: usize, l: usize) -> u64 {
    assert!(l >= 1);
    (3 * nnz as u64).div_ceil(l as u64)
}

/// `⌈nnz·log2(l)/4⌉`, a lower bound rather than an estimate.
pub fn cycles_fafnir_lower_bound(nnz: usize, l: usize) -> u64 {
    assert!(l >= 1);
    (nnz as u64 * log2_floor(l) as u64).div_ceil(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignId {
    Oned,
    AdderTree,
    FlexTpu,
    FafnirBound,
    GustNaive,
    GustEc,
    GustEcLb,
}

impl DesignId {
    pub const ALL: [DesignId; 7] = [
        DesignId::Oned,
        DesignId::AdderTree,
        DesignId::FlexTpu,
        DesignId::FafnirBound,
        DesignId::GustNaive,
        DesignId::GustEc,
        DesignId::GustEcLb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DesignId::Oned => "oned",
            DesignId::AdderTree => "adder-tree",
            DesignId::FlexTpu => "flex-tpu",
            DesignId::FafnirBound => "fafnir-bound",
            DesignId::GustNaive => "gust-naive",
            DesignId::GustEc => "gust-ec",
            DesignId::GustEcLb => "gust-ec-lb",
        }
    }
}

impl std::fmt::Display for DesignId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DesignId {
    type Err = BaselineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match norm.as_str() {
            "oned" | "1d" => DesignId::Oned,
            "adder-tree" | "at" => DesignId::AdderTree,
            "flex-tpu" => DesignId::FlexTpu,
            "fafnir-bound" | "fafnir" => DesignId::FafnirBound,
            "gust-naive" | "naive" => DesignId::GustNaive,
            "gust-ec" | "ec" => DesignId::GustEc,
            "gust-ec-lb" | "gust-eclb" | "ec-lb" => DesignId::GustEcLb,
            _ => return Err(BaselineError::UnknownDesign(s.to_string())),
        })
    }
}

/// Hardware shape of one design at a given length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignModel {
    pub id: DesignId,
    /// Parameter fed to the cycle formula (grid side for Flex-TPU, leaves
    /// for Fafnir).
    pub length: usize,
    /// Arithmetic units of one kind used as the utilization denominator.
    pub units: usize,
}

fn isqrt(x: usize) -> usize {
    let mut r = (x as f64).sqrt() as usize;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

impl DesignModel {
    pub fn new(id: DesignId, l: usize) -> Self {
        match id {
            DesignId::FlexTpu => {
                let side = isqrt(l).max(1);
                DesignModel {
                    id,
                    length: side,
                    units: side * side,
                }
            }
            DesignId::FafnirBound => {
                let leaves = (l / 2).max(1);
                DesignModel {
                    id,
                    length: leaves,
                    units: leaves,
                }
            }
            _ => DesignModel {
                id,
                length: l,
                units: l,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub design: DesignId,
    pub length: usize,
    pub units: usize,
    pub cycles: u64,
    pub utilization: f64,
    /// 1D cycles at the same `l` divided by this design's cycles.
    pub speedup_vs_1d: f64,
    /// Joules, for designs with a dynamic-power figure.
    pub energy_j: Option<f64>,
    pub lower_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompareOptions {
    pub l: usize,
    pub coloring: ColoringMethod,
}

fn utilization(nnz: usize, units: usize, cycles: u64) -> f64 {
    if cycles == 0 {
        0.0
    } else {
        nnz as f64 / (units as f64 * cycles as f64)
    }
}

/// Cycles, utilization and speedup over 1D for each requested design. The
/// datapath entries are scheduled and simulated with an all-ones vector;
/// the others use the closed forms above.
pub fn compare(
    m: &SparseMatrix,
    designs: &[DesignId],
    opts: CompareOptions,
    energy: Option<&EnergyModel>,
) -> Result<Vec<ComparisonRow>, BaselineError> {
    let l = opts.l;
    let nnz = m.nnz();
    let oned = cycles_1d(m.rows(), m.cols(), l);
    let v = DenseVector::ones(m.cols());
    designs
        .iter()
        .map(|&id| {
            let model = DesignModel::new(id, l);
            let (cycles, workload) = match id {
                DesignId::Oned => (oned, Some(Workload::oned(m, l))),
                DesignId::AdderTree => (cycles_adder_tree(m.rows(), m.cols(), l), None),
                DesignId::FlexTpu => (cycles_flex_tpu(nnz, model.length), None),
                DesignId::FafnirBound => (cycles_fafnir_lower_bound(nnz, model.length), None),
                DesignId::GustNaive => {
                    let (_, r) = simulate_naive(&build_naive(m, l), &v)?;
                    (r.total_cycles as u64, Some(Workload::from_report(&r)))
                }
                DesignId::GustEc | DesignId::GustEcLb => {
                    let s = schedule_colored(m, l, id == DesignId::GustEcLb, opts.coloring)?;
                    let (_, r) = simulate(&s, &v)?;
                    (r.total_cycles as u64, Some(Workload::from_report(&r)))
                }
            };
            let energy_j = match (energy, workload, EnergyDesign::for_length(id, l)) {
                (Some(model), Some(w), Some(design)) => {
                    Some(energy_estimate(&w, model, design).total_j)
                }
                _ => None,
            };
            Ok(ComparisonRow {
                design: id,
                length: model.length,
                units: model.units,
                cycles,
                utilization: utilization(nnz, model.units, cycles),
                speedup_vs_1d: if cycles == 0 {
                    f64::INFINITY
                } else {
                    oned as f64 / cycles as f64
                },
                energy_j,
                lower_bound: id == DesignId::FafnirBound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oned_formula() {
        assert_eq!(cycles_1d(4, 4, 4), 9);
        assert_eq!(cycles_1d(1, 8, 8), 1 + 8 + 1);
        // 16384^2 / 256 + 256 + 1
        assert_eq!(cycles_1d(16384, 16384, 256), 1_048_833);
    }

    #[test]
    fn adder_tree_formula() {
        assert_eq!(cycles_adder_tree(4, 4, 4), 7);
        assert_eq!(cycles_adder_tree(1024, 1024, 256), 4105);
        assert_eq!(cycles_adder_tree(3, 5, 1), 16);
    }

    #[test]
    fn flex_tpu_formula() {
        assert_eq!(cycles_flex_tpu(16, 16), 3);
        assert_eq!(cycles_flex_tpu(1_000_000, 16), 187_500);
        assert_eq!(cycles_flex_tpu(0, 16), 0);
    }

    #[test]
    fn fafnir_formula() {
        assert_eq!(cycles_fafnir_lower_bound(4, 16), 4);
        assert_eq!(cycles_fafnir_lower_bound(0, 16), 0);
        assert_eq!(cycles_fafnir_lower_bound(1_000_000, 128), 1_750_000);
    }

    #[test]
    fn oned_never_faster_than_tree() {
        for l in 1..300 {
            for (m, n) in [(1, 1), (7, 13), (100, 3)] {
                assert!(cycles_1d(m, n, l) >= cycles_adder_tree(m, n, l));
            }
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(
            DesignModel::new(DesignId::FlexTpu, 256),
            DesignModel {
                id: DesignId::FlexTpu,
                length: 16,
                units: 256
            }
        );
        assert_eq!(DesignModel::new(DesignId::FafnirBound, 256).length, 128);
        assert_eq!(DesignModel::new(DesignId::Oned, 256).units, 256);
    }

    #[test]
    fn design_names() {
        assert_eq!(
            "gust-naive".parse::<DesignId>().unwrap(),
            DesignId::GustNaive
        );
        assert_eq!(
            "adder_tree".parse::<DesignId>().unwrap(),
            DesignId::AdderTree
        );
        assert!(matches!(
            "tpu9".parse::<DesignId>(),
            Err(BaselineError::UnknownDesign(_))
        ));
        for d in DesignId::ALL {
            assert_eq!(d.as_str().parse::<DesignId>().unwrap(), d);
        }
    }

    #[test]
    fn diagonal_comparison() {
        let l = 32;
        let m = SparseMatrix::identity(l);
        let rows = compare(
            &m,
            &[DesignId::GustEc, DesignId::Oned],
            CompareOptions {
                l,
                coloring: ColoringMethod::Greedy,
            },
            None,
        )
        .unwrap();
        assert_eq!(rows[0].cycles, 3);
        assert!((rows[0].utilization - 1.0 / 3.0).abs() < 1e-12);
        let oned_cycles = (l + l + 1) as f64;
        assert!((rows[1].utilization - l as f64 / (l as f64 * oned_cycles)).abs() < 1e-15);
        assert!((rows[0].speedup_vs_1d - oned_cycles / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_matrix_zero_utilization() {
        let m = SparseMatrix::empty(8, 8);
        let rows = compare(
            &m,
            &DesignId::ALL,
            CompareOptions {
                l: 4,
                coloring: ColoringMethod::Greedy,
            },
            None,
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.utilization == 0.0));
    }
}
