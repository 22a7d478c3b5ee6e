//! Energy model: dynamic power over the run time plus per-event costs for
//! every streamed 32-bit word and every arithmetic operation.
//!
//! Event counts per nonzero:
//! - streamed words: value and vector operand, plus for the crossbar
//!   datapath a 32-bit column index and the packed row index with its dump
//!   bit (`(⌈log2 l⌉ + 1) / 32` of a word);
//! - each streamed word costs one off-chip read, one on-chip write and one
//!   on-chip read (buffer transit), and moves over the off-chip link and the
//!   design's on-chip distance;
//! - two flops (multiply and add).
//!
//! The crossbar datapath first loads the vector into its buffer: `n` words
//! read off-chip, written on-chip and moved over the off-chip link, taking
//! `32 n / total bandwidth` seconds at full dynamic power.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bandwidth::{required_bandwidth, row_index_width};
use crate::baselines::{cycles_1d, DesignId};
use crate::matio::SparseMatrix;
use crate::simgust::SimReport;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("unknown energy design `{0}` (expected oned-256, gust-256 or gust-87)")]
    UnknownDesign(String),
    #[error("energy config: {0}")]
    Config(String),
    #[error("energy constant `{0}` must be positive")]
    NonPositive(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-32-bit-word energies in pJ, distances in mm, dynamic power in W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyModel {
    pub off_chip_read_pj: f64,
    pub on_chip_read_pj: f64,
    pub off_chip_write_pj: f64,
    pub on_chip_write_pj: f64,
    pub flop_pj: f64,
    pub off_chip_move_pj_per_mm: f64,
    pub on_chip_move_pj_per_mm: f64,
    pub off_chip_distance_mm: f64,
    pub oned_hop_mm: f64,
    pub gust_avg_distance_mm: f64,
    pub power_oned_256_w: f64,
    pub power_gust_256_w: f64,
    pub power_gust_87_w: f64,
    pub frequency_hz: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel {
            off_chip_read_pj: 64.0,
            on_chip_read_pj: 11.84,
            off_chip_write_pj: 64.0,
            on_chip_write_pj: 16.0,
            flop_pj: 10.0,
            off_chip_move_pj_per_mm: 160.0,
            on_chip_move_pj_per_mm: 0.95,
            off_chip_distance_mm: 5.0,
            oned_hop_mm: 1.0,
            gust_avg_distance_mm: 129.0,
            power_oned_256_w: 35.3,
            power_gust_256_w: 56.9,
            power_gust_87_w: 16.8,
            frequency_hz: 96e6,
        }
    }
}

impl EnergyModel {
    /// Parses `key = value` lines (TOML); missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, EnergyError> {
        let model: EnergyModel =
            toml::from_str(text).map_err(|e| EnergyError::Config(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EnergyError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        let fields = [
            ("off_chip_read_pj", self.off_chip_read_pj),
            ("on_chip_read_pj", self.on_chip_read_pj),
            ("off_chip_write_pj", self.off_chip_write_pj),
            ("on_chip_write_pj", self.on_chip_write_pj),
            ("flop_pj", self.flop_pj),
            ("off_chip_move_pj_per_mm", self.off_chip_move_pj_per_mm),
            ("on_chip_move_pj_per_mm", self.on_chip_move_pj_per_mm),
            ("off_chip_distance_mm", self.off_chip_distance_mm),
            ("oned_hop_mm", self.oned_hop_mm),
            ("gust_avg_distance_mm", self.gust_avg_distance_mm),
            ("power_oned_256_w", self.power_oned_256_w),
            ("power_gust_256_w", self.power_gust_256_w),
            ("power_gust_87_w", self.power_gust_87_w),
            ("frequency_hz", self.frequency_hz),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EnergyError::NonPositive(name));
            }
        }
        Ok(())
    }
}

/// Designs with a measured dynamic-power figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyDesign {
    Oned256,
    Gust256,
    Gust87,
}

impl EnergyDesign {
    pub fn length(self) -> usize {
        match self {
            EnergyDesign::Oned256 | EnergyDesign::Gust256 => 256,
            EnergyDesign::Gust87 => 87,
        }
    }

    fn is_crossbar(self) -> bool {
        !matches!(self, EnergyDesign::Oned256)
    }

    fn power_w(self, m: &EnergyModel) -> f64 {
        match self {
            EnergyDesign::Oned256 => m.power_oned_256_w,
            EnergyDesign::Gust256 => m.power_gust_256_w,
            EnergyDesign::Gust87 => m.power_gust_87_w,
        }
    }

    fn on_chip_distance_mm(self, m: &EnergyModel) -> f64 {
        match self {
            EnergyDesign::Oned256 => m.oned_hop_mm,
            _ => m.gust_avg_distance_mm,
        }
    }

    /// Energy profile of a comparison design at length `l`, if one exists.
    pub fn for_length(id: DesignId, l: usize) -> Option<Self> {
        match (id, l) {
            (DesignId::Oned, 256) => Some(EnergyDesign::Oned256),
            (DesignId::GustNaive | DesignId::GustEc | DesignId::GustEcLb, 256) => {
                Some(EnergyDesign::Gust256)
            }
            (DesignId::GustNaive | DesignId::GustEc | DesignId::GustEcLb, 87) => {
                Some(EnergyDesign::Gust87)
            }
            _ => None,
        }
    }
}

impl FromStr for EnergyDesign {
    type Err = EnergyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "oned-256" | "1d-256" => Ok(EnergyDesign::Oned256),
            "gust-256" => Ok(EnergyDesign::Gust256),
            "gust-87" => Ok(EnergyDesign::Gust87),
            _ => Err(EnergyError::UnknownDesign(s.to_string())),
        }
    }
}

/// What a run did, independent of how its cycle count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub m: usize,
    pub n: usize,
    pub nnz: usize,
    pub total_cycles: u64,
}

impl Workload {
    pub fn from_report(r: &SimReport) -> Self {
        Workload {
            m: r.m,
            n: r.n,
            nnz: r.nnz,
            total_cycles: r.total_cycles as u64,
        }
    }

    /// A length-`l` 1D array over `m`, using its closed-form cycle count.
    pub fn oned(m: &SparseMatrix, l: usize) -> Self {
        Workload {
            m: m.rows(),
            n: m.cols(),
            nnz: m.nnz(),
            total_cycles: cycles_1d(m.rows(), m.cols(), l),
        }
    }
}

/// Itemized energy in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub design: EnergyDesign,
    pub compute_time_s: f64,
    pub preload_time_s: f64,
    pub dynamic_j: f64,
    pub off_chip_read_j: f64,
    pub on_chip_read_j: f64,
    pub on_chip_write_j: f64,
    pub flop_j: f64,
    pub movement_j: f64,
    pub preload_j: f64,
    pub streamed_words: f64,
    pub total_j: f64,
}

const PJ: f64 = 1e-12;

pub fn energy_estimate(w: &Workload, model: &EnergyModel, design: EnergyDesign) -> EnergyBreakdown {
    let l = design.length();
    let nnz = w.nnz as f64;
    let words_per_nz = if design.is_crossbar() {
        3.0 + (row_index_width(l) + 1) as f64 / 32.0
    } else {
        2.0
    };
    let words = nnz * words_per_nz;
    let off_chip_leg = model.off_chip_distance_mm * model.off_chip_move_pj_per_mm;
    let on_chip_leg = design.on_chip_distance_mm(model) * model.on_chip_move_pj_per_mm;

    let (preload_time_s, preload_j) = if design.is_crossbar() {
        let bw = required_bandwidth(l, model.frequency_hz);
        let vec_words = w.n as f64;
        let time = vec_words * 32.0 / bw.total_bits_per_s;
        let per_word = model.off_chip_read_pj + model.on_chip_write_pj + off_chip_leg;
        (time, vec_words * per_word * PJ)
    } else {
        (0.0, 0.0)
    };

    let compute_time_s = w.total_cycles as f64 / model.frequency_hz;
    let dynamic_j = design.power_w(model) * (compute_time_s + preload_time_s);
    let off_chip_read_j = words * model.off_chip_read_pj * PJ;
    let on_chip_write_j = words * model.on_chip_write_pj * PJ;
    let on_chip_read_j = words * model.on_chip_read_pj * PJ;
    let movement_j = words * (off_chip_leg + on_chip_leg) * PJ;
    let flop_j = 2.0 * nnz * model.flop_pj * PJ;
    let total_j = dynamic_j
        + off_chip_read_j
        + on_chip_write_j
        + on_chip_read_j
        + movement_j
        + flop_j
        + preload_j;

    EnergyBreakdown {
        design,
        compute_time_s,
        preload_time_s,
        dynamic_j,
        off_chip_read_j,
        on_chip_read_j,
        on_chip_write_j,
        flop_j,
        movement_j,
        preload_j,
        streamed_words: words,
        total_j,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn workload(nnz: usize, cycles: u64) -> Workload {
        Workload {
            m: 1024,
            n: 1024,
            nnz,
            total_cycles: cycles,
        }
    }

    #[test]
    fn empty_run_is_dynamic_plus_preload() {
        let model = EnergyModel::default();
        let e = energy_estimate(&workload(0, 2), &model, EnergyDesign::Gust256);
        let preload_time = 1024.0 * 32.0 / (256.0 * 73.0 * 96e6);
        let expect_dyn = 56.9 * (2.0 / 96e6 + preload_time);
        assert!((e.dynamic_j - expect_dyn).abs() < 1e-18);
        assert!((e.total_j - e.dynamic_j - e.preload_j).abs() < 1e-18);
        assert_eq!(e.flop_j, 0.0);
        assert_eq!(e.movement_j, 0.0);
    }

    #[test]
    fn one_nonzero_flop_energy() {
        let e = energy_estimate(
            &workload(1, 3),
            &EnergyModel::default(),
            EnergyDesign::Gust256,
        );
        assert!((e.flop_j - 20e-12).abs() < 1e-24);
    }

    #[test]
    fn monotone_in_nnz_and_cycles() {
        let model = EnergyModel::default();
        for design in [
            EnergyDesign::Oned256,
            EnergyDesign::Gust256,
            EnergyDesign::Gust87,
        ] {
            let mut last = 0.0;
            for k in 0..20 {
                let e = energy_estimate(&workload(k * 100, 10 + k as u64), &model, design).total_j;
                assert!(e > last);
                last = e;
            }
        }
    }

    #[test]
    fn config_overrides_and_defaults() {
        let m = EnergyModel::from_toml_str("flop_pj = 5.0\nfrequency_hz = 2e8\n").unwrap();
        assert_eq!(m.flop_pj, 5.0);
        assert_eq!(m.frequency_hz, 2e8);
        assert_eq!(m.off_chip_read_pj, 64.0);
        assert!(EnergyModel::from_toml_str("flop_pj = -1.0").is_err());
        assert!(EnergyModel::from_toml_str("bogus = 1.0").is_err());
    }

    #[test]
    fn design_names() {
        assert_eq!(
            "gust-87".parse::<EnergyDesign>().unwrap(),
            EnergyDesign::Gust87
        );
        assert!(matches!(
            "tpu".parse::<EnergyDesign>(),
            Err(EnergyError::UnknownDesign(_))
        ));
    }
}
