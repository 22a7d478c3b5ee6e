use serde::Serialize;

use crate::matio::SparseMatrix;

use super::fill::ScheduledMatrix;
use super::window::{build_window, color_lower_bound, window_count, LaneMap};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyFailure {
    ShapeMismatch {
        detail: String,
    },
    BadRowOrder {
        detail: String,
    },
    BadLaneMap {
        window: usize,
    },
    SlotArrayLength {
        window: usize,
    },
    RowOutOfRange {
        window: usize,
        timestep: usize,
        lane: usize,
        row: u32,
    },
    ColumnOutOfRange {
        window: usize,
        timestep: usize,
        lane: usize,
        col: u32,
    },
    Collision {
        window: usize,
        timestep: usize,
        row: u32,
    },
    WrongLane {
        window: usize,
        timestep: usize,
        lane: usize,
        col: u32,
    },
    Missing {
        row: usize,
        col: usize,
    },
    Extra {
        row: usize,
        col: usize,
    },
    ValueMismatch {
        row: usize,
        col: usize,
        expected: f64,
        found: f64,
    },
    BelowLowerBound {
        window: usize,
        colors: usize,
        bound: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub failure: Option<VerifyFailure>,
}

impl VerifyReport {
    fn fail(f: VerifyFailure) -> Self {
        VerifyReport {
            passed: false,
            failure: Some(f),
        }
    }
}

/// Checks slot occupancy, per-timestep collision freedom, lane consistency,
/// the color lower bound per window and that the valid slots map back
/// one-to-one onto `m`'s nonzeros (value bits included).
pub fn verify_schedule(s: &ScheduledMatrix, m: &SparseMatrix) -> VerifyReport {
    match check(s, m) {
        Ok(()) => VerifyReport {
            passed: true,
            failure: None,
        },
        Err(f) => VerifyReport::fail(f),
    }
}

fn check(s: &ScheduledMatrix, m: &SparseMatrix) -> Result<(), VerifyFailure> {
    let l = s.l;
    if l == 0 || s.m != m.rows() || s.n != m.cols() {
        return Err(VerifyFailure::ShapeMismatch {
            detail: format!(
                "schedule {}x{} l={l}, matrix {}x{}",
                s.m,
                s.n,
                m.rows(),
                m.cols()
            ),
        });
    }
    let windows = window_count(s.m, l);
    if s.windows.len() != windows || s.lanes.len() != windows {
        return Err(VerifyFailure::ShapeMismatch {
            detail: format!(
                "expected {windows} windows, found {} windows / {} lane maps",
                s.windows.len(),
                s.lanes.len()
            ),
        });
    }
    if s.row_order.len() != s.m {
        return Err(VerifyFailure::BadRowOrder {
            detail: format!("length {} for {} rows", s.row_order.len(), s.m),
        });
    }
    let mut seen = vec![false; s.m];
    for &r in &s.row_order {
        if r >= s.m || std::mem::replace(&mut seen[r], true) {
            return Err(VerifyFailure::BadRowOrder {
                detail: format!("row {r} out of range or repeated"),
            });
        }
    }
    for (w, lanes) in s.lanes.iter().enumerate() {
        if let LaneMap::Table(t) = lanes {
            if t.len() != s.n || t.iter().any(|&x| x as usize >= l) {
                return Err(VerifyFailure::BadLaneMap { window: w });
            }
        }
    }

    let layout = s.layout();
    let rows = m.row_slices();
    let mut recovered = Vec::with_capacity(m.nnz());
    let mut stamp = vec![usize::MAX; l];

    for (w, win) in s.windows.iter().enumerate() {
        let slots = win.colors * l;
        if [
            win.m_sch.len(),
            win.row_sch.len(),
            win.col_sch.len(),
            win.valid.len(),
        ]
        .iter()
        .any(|&len| len != slots)
        {
            return Err(VerifyFailure::SlotArrayLength { window: w });
        }
        let window_rows = layout.window_rows(w);
        for t in 0..win.colors {
            for lane in 0..l {
                let slot = t * l + lane;
                if !win.valid[slot] {
                    continue;
                }
                let row = win.row_sch[slot];
                let col = win.col_sch[slot];
                if row as usize >= window_rows.len() {
                    return Err(VerifyFailure::RowOutOfRange {
                        window: w,
                        timestep: t,
                        lane,
                        row,
                    });
                }
                if col as usize >= s.n {
                    return Err(VerifyFailure::ColumnOutOfRange {
                        window: w,
                        timestep: t,
                        lane,
                        col,
                    });
                }
                if stamp[row as usize] == t {
                    return Err(VerifyFailure::Collision {
                        window: w,
                        timestep: t,
                        row,
                    });
                }
                stamp[row as usize] = t;
                if s.lanes[w].lane(col as usize, l) != lane {
                    return Err(VerifyFailure::WrongLane {
                        window: w,
                        timestep: t,
                        lane,
                        col,
                    });
                }
                recovered.push((window_rows[row as usize], col as usize, win.m_sch[slot]));
            }
        }
        stamp.iter_mut().for_each(|x| *x = usize::MAX);

        let bound = color_lower_bound(&build_window(&rows, &layout, w));
        if win.colors < bound {
            return Err(VerifyFailure::BelowLowerBound {
                window: w,
                colors: win.colors,
                bound,
            });
        }
    }

    recovered.sort_by_key(|&(r, c, _)| (r, c));
    let expected = m.entries();
    let mut i = 0;
    for (k, &(row, col, value)) in recovered.iter().enumerate() {
        if k > 0 && (recovered[k - 1].0, recovered[k - 1].1) == (row, col) {
            return Err(VerifyFailure::Extra { row, col });
        }
        let Some(e) = expected.get(i) else {
            return Err(VerifyFailure::Extra { row, col });
        };
        if (e.row, e.col) < (row, col) {
            return Err(VerifyFailure::Missing {
                row: e.row,
                col: e.col,
            });
        }
        if (e.row, e.col) > (row, col) {
            return Err(VerifyFailure::Extra { row, col });
        }
        if e.value.to_bits() != value.to_bits() {
            return Err(VerifyFailure::ValueMismatch {
                row,
                col,
                expected: e.value,
                found: value,
            });
        }
        i += 1;
    }
    if let Some(e) = expected.get(i) {
        return Err(VerifyFailure::Missing {
            row: e.row,
            col: e.col,
        });
    }
    Ok(())
}
