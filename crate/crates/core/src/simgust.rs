//! Cycle-accurate functional model of the datapath:
//! multipliers → crossbar → accumulating adders → dump.
//!
//! At timestep `t` of a window, every valid lane multiplies its stored value
//! by the vector element named in `col_sch` and the crossbar routes the
//! product to adder `row_sch`. Adders accumulate in ascending lane order.
//! After the last timestep the dump signal writes each adder back to the
//! output position of its source row and clears it. Windows run back to
//! back; the three pipeline stages add a fixed two-cycle drain at the end.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matio::DenseVector;
use crate::scheduler::{
    drive_naive_window, NaiveSchedule, ScheduleMode, ScheduledMatrix, DRAIN_CYCLES,
};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("vector length {found} does not match matrix width {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("collision: two products for adder {row} in window {window}, timestep {timestep}")]
    Collision {
        window: usize,
        timestep: usize,
        row: usize,
    },
    #[error("malformed schedule: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub mode: ScheduleMode,
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub nnz: usize,
    pub total_cycles: usize,
    /// Issue timesteps of each window (drain excluded).
    pub per_window_cycles: Vec<usize>,
    /// `active_lane_histogram[k]`: number of cycles in which exactly `k`
    /// lanes carried a nonzero, drain cycles included.
    pub active_lane_histogram: Vec<u64>,
    pub utilization: f64,
    /// Cycles where at least one nonempty lane could not issue (naive only).
    pub stall_cycles: usize,
    pub flops: usize,
    /// FNV-1a over the output's little-endian bytes, hex.
    pub checksum: String,
}

/// Useful operation slots over available slots: `nnz / (units * cycles)`.
pub fn utilization_of(report: &SimReport, unit_count: usize) -> f64 {
    assert!(unit_count > 0, "unit count must be positive");
    if report.total_cycles == 0 {
        return 0.0;
    }
    report.nnz as f64 / (unit_count as f64 * report.total_cycles as f64)
}

pub fn checksum(values: &[f64]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for v in values {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    format!("{h:016x}")
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    mode: ScheduleMode,
    l: usize,
    m: usize,
    n: usize,
    nnz: usize,
    per_window_cycles: Vec<usize>,
    mut histogram: Vec<u64>,
    stall_cycles: usize,
    output: &[f64],
) -> SimReport {
    let total_cycles = per_window_cycles.iter().sum::<usize>() + DRAIN_CYCLES;
    histogram[0] += DRAIN_CYCLES as u64;
    let mut report = SimReport {
        mode,
        l,
        m,
        n,
        nnz,
        total_cycles,
        per_window_cycles,
        active_lane_histogram: histogram,
        utilization: 0.0,
        stall_cycles,
        flops: 2 * nnz,
        checksum: checksum(output),
    };
    report.utilization = utilization_of(&report, l);
    report
}

/// Runs a colored schedule. Aborts with [`SimError::Collision`] if any adder
/// receives two products in one timestep.
pub fn simulate(
    s: &ScheduledMatrix,
    v: &DenseVector,
) -> Result<(DenseVector, SimReport), SimError> {
    if v.len() != s.n {
        return Err(SimError::DimensionMismatch {
            expected: s.n,
            found: v.len(),
        });
    }
    let l = s.l;
    if l == 0 || s.row_order.len() != s.m || s.windows.len() != s.m.div_ceil(l) {
        return Err(SimError::Malformed(
            "shape does not match window count".into(),
        ));
    }
    let x = v.as_slice();
    let mut y = vec![0.0; s.m];
    let mut acc = vec![0.0f64; l];
    // busy[row] == t + 1 when adder `row` already received a product at t
    let mut busy = vec![0usize; l];
    let mut histogram = vec![0u64; l + 1];
    let mut per_window = Vec::with_capacity(s.windows.len());
    let mut nnz = 0;

    for (w, win) in s.windows.iter().enumerate() {
        if win.valid.len() != win.colors * l {
            return Err(SimError::Malformed(format!("window {w} slot arrays")));
        }
        for t in 0..win.colors {
            let base = t * l;
            let mut active = 0;
            for lane in 0..l {
                let slot = base + lane;
                if !win.valid[slot] {
                    continue;
                }
                let row = win.row_sch[slot] as usize;
                let col = win.col_sch[slot] as usize;
                if row >= l || col >= s.n {
                    return Err(SimError::Malformed(format!(
                        "window {w} timestep {t} lane {lane}: index out of range"
                    )));
                }
                if busy[row] == t + 1 {
                    return Err(SimError::Collision {
                        window: w,
                        timestep: t,
                        row,
                    });
                }
                busy[row] = t + 1;
                acc[row] += win.m_sch[slot] * x[col];
                active += 1;
            }
            histogram[active] += 1;
            nnz += active;
        }
        // dump
        let start = w * l;
        for (i, a) in acc.iter_mut().enumerate() {
            if let Some(&src) = s.row_order.get(start + i) {
                y[src] = *a;
            }
            *a = 0.0;
        }
        busy.iter_mut().for_each(|b| *b = 0);
        per_window.push(win.colors);
    }

    let report = finish_report(s.mode, l, s.m, s.n, nnz, per_window, histogram, 0, &y);
    Ok((
        DenseVector::new(y).expect("finite inputs give finite sums"),
        report,
    ))
}

/// Runs the stalling baseline.
pub fn simulate_naive(
    s: &NaiveSchedule,
    v: &DenseVector,
) -> Result<(DenseVector, SimReport), SimError> {
    if v.len() != s.n {
        return Err(SimError::DimensionMismatch {
            expected: s.n,
            found: v.len(),
        });
    }
    let l = s.l;
    let x = v.as_slice();
    let mut y = vec![0.0; s.m];
    let mut acc = vec![0.0f64; l];
    let mut histogram = vec![0u64; l + 1];
    let mut per_window = Vec::with_capacity(s.windows.len());
    let mut stall_cycles = 0;
    let mut nnz = 0;

    for (w, win) in s.windows.iter().enumerate() {
        let mut heads = vec![0usize; win.fifos.len()];
        let cycles = drive_naive_window(win, l, |lanes, stalled| {
            for &lane in lanes {
                let item = &win.fifos[lane][heads[lane]];
                heads[lane] += 1;
                acc[item.row as usize] += item.value * x[item.col as usize];
            }
            histogram[lanes.len()] += 1;
            nnz += lanes.len();
            stall_cycles += usize::from(stalled);
        });
        for (i, a) in acc.iter_mut().enumerate() {
            if let Some(out) = y.get_mut(w * l + i) {
                *out = *a;
            }
            *a = 0.0;
        }
        per_window.push(cycles);
    }

    let report = finish_report(
        ScheduleMode::Naive,
        l,
        s.m,
        s.n,
        nnz,
        per_window,
        histogram,
        stall_cycles,
        &y,
    );
    Ok((
        DenseVector::new(y).expect("finite inputs give finite sums"),
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matio::{reference_spmv, SparseMatrix};
    use crate::scheduler::{build_naive, schedule_colored, ColoringMethod};

    #[test]
    fn identity_passthrough() {
        for l in [1, 3, 4, 7] {
            let m = SparseMatrix::identity(10);
            let v = DenseVector::new((0..10).map(|i| i as f64 * 0.5 - 1.0).collect()).unwrap();
            let s = schedule_colored(&m, l, false, ColoringMethod::Greedy).unwrap();
            let (y, r) = simulate(&s, &v).unwrap();
            assert_eq!(y, v);
            assert_eq!(r.total_cycles, 10usize.div_ceil(l) + 2);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let s =
            schedule_colored(&SparseMatrix::identity(3), 2, false, ColoringMethod::Greedy).unwrap();
        assert!(matches!(
            simulate(&s, &DenseVector::ones(4)),
            Err(SimError::DimensionMismatch {
                expected: 3,
                found: 4
            })
        ));
        let n = build_naive(&SparseMatrix::identity(3), 2);
        assert!(simulate_naive(&n, &DenseVector::ones(2)).is_err());
    }

    #[test]
    fn collision_detector_fires() {
        let t: Vec<_> = (0..2)
            .flat_map(|r| (0..2).map(move |c| (r, c, 1.0)))
            .collect();
        let m = SparseMatrix::from_triplets(2, 2, &t).unwrap();
        let mut s = schedule_colored(&m, 2, false, ColoringMethod::Exact).unwrap();
        s.windows[0].row_sch[1] = s.windows[0].row_sch[0];
        assert!(matches!(
            simulate(&s, &DenseVector::ones(2)),
            Err(SimError::Collision {
                window: 0,
                timestep: 0,
                ..
            })
        ));
    }

    #[test]
    fn dense_window_utilization_closed_form() {
        let l = 8;
        let t: Vec<_> = (0..l)
            .flat_map(|r| (0..l).map(move |c| (r, c, 1.0)))
            .collect();
        let m = SparseMatrix::from_triplets(l, l, &t).unwrap();
        let s = schedule_colored(&m, l, false, ColoringMethod::Exact).unwrap();
        let (_, r) = simulate(&s, &DenseVector::ones(l)).unwrap();
        let expect = l as f64 / (l + 2) as f64;
        assert!((r.utilization - expect).abs() < 1e-15);
        assert_eq!(utilization_of(&r, l), r.utilization);
        assert_eq!(r.active_lane_histogram[l], l as u64);
        assert_eq!(r.active_lane_histogram[0], 2);
    }

    #[test]
    fn empty_matrix_zero_utilization() {
        let m = SparseMatrix::empty(4, 4);
        let s = schedule_colored(&m, 2, false, ColoringMethod::Greedy).unwrap();
        let (y, r) = simulate(&s, &DenseVector::ones(4)).unwrap();
        assert_eq!(y.as_slice(), &[0.0; 4]);
        assert_eq!(r.total_cycles, 2);
        assert_eq!(utilization_of(&r, 2), 0.0);
    }

    #[test]
    fn naive_diagonal_matches_colored() {
        let m = SparseMatrix::identity(12);
        let v = DenseVector::new((0..12).map(|i| i as f64).collect()).unwrap();
        let (ya, ra) = simulate(
            &schedule_colored(&m, 4, false, ColoringMethod::Greedy).unwrap(),
            &v,
        )
        .unwrap();
        let (yb, rb) = simulate_naive(&build_naive(&m, 4), &v).unwrap();
        assert_eq!(ya, yb);
        assert_eq!(ra.total_cycles, rb.total_cycles);
        assert_eq!(ra.per_window_cycles, rb.per_window_cycles);
        assert_eq!(ra.active_lane_histogram, rb.active_lane_histogram);
        assert_eq!(rb.stall_cycles, 0);
    }

    #[test]
    fn naive_dense_row_serializes() {
        let l = 6;
        let t: Vec<_> = (0..l).map(|c| (0, c, (c + 1) as f64)).collect();
        let m = SparseMatrix::from_triplets(l, l, &t).unwrap();
        let v = DenseVector::ones(l);
        let (y, r) = simulate_naive(&build_naive(&m, l), &v).unwrap();
        assert_eq!(r.per_window_cycles, vec![l]);
        assert_eq!(r.stall_cycles, l - 1);
        assert_eq!(r.active_lane_histogram[1], l as u64);
        assert_eq!(y, reference_spmv(&m, &v).unwrap());
    }

    #[test]
    fn checksum_depends_on_bits() {
        assert_ne!(checksum(&[0.0]), checksum(&[-0.0]));
        assert_eq!(checksum(&[1.0, 2.0]), checksum(&[1.0, 2.0]));
    }
}
