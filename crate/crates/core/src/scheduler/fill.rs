use serde::{Deserialize, Serialize};

use super::coloring::{Coloring, ColoringMethod};
use super::window::{LaneMap, Layout, WindowEdges};
use super::{ScheduleError, ScheduleMode};

/// One window of the scheduled storage format. All slot arrays are
/// row-major `colors x l`: slot `(t, lane)` lives at `t * l + lane`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledWindow {
    /// Number of timesteps (colors) for this window.
    pub colors: usize,
    /// Source values; 0.0 in invalid slots.
    pub m_sch: Vec<f64>,
    /// Window-local row (adder) index; `l` in invalid slots.
    pub row_sch: Vec<u32>,
    /// Source column index; `n` in invalid slots.
    pub col_sch: Vec<u32>,
    /// Authoritative occupancy mask.
    pub valid: Vec<bool>,
}

impl ScheduledWindow {
    pub fn empty(colors: usize, l: usize, n: usize) -> Self {
        let slots = colors * l;
        ScheduledWindow {
            colors,
            m_sch: vec![0.0; slots],
            row_sch: vec![l as u32; slots],
            col_sch: vec![n as u32; slots],
            valid: vec![false; slots],
        }
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

/// Collision-free schedule of a whole matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledMatrix {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub mode: ScheduleMode,
    pub coloring: ColoringMethod,
    /// `row_order[k]`: source row at permuted position `k`.
    pub row_order: Vec<usize>,
    /// Column-to-lane map per window.
    pub lanes: Vec<LaneMap>,
    pub windows: Vec<ScheduledWindow>,
}

impl ScheduledMatrix {
    /// Total timesteps over all windows.
    pub fn total_colors(&self) -> usize {
        self.windows.iter().map(|w| w.colors).sum()
    }

    pub fn nnz(&self) -> usize {
        self.windows.iter().map(ScheduledWindow::valid_count).sum()
    }

    pub fn layout(&self) -> Layout {
        Layout {
            l: self.l,
            row_order: self.row_order.clone(),
            lanes: self.lanes.clone(),
        }
    }
}

/// Places one colored window into its slot arrays: edge `(i, j)` with color
/// `c` goes to slot `(c, lane(j))` with row index `i` and column `j`.
pub fn fill_window(
    edges: &WindowEdges,
    coloring: &Coloring,
    n: usize,
) -> Result<ScheduledWindow, ScheduleError> {
    let l = edges.l;
    let mut out = ScheduledWindow::empty(coloring.colors_used, l, n);
    for (i, row) in edges.rows.iter().enumerate() {
        for (e, &c) in row.iter().zip(&coloring.colors[i]) {
            let t = c as usize;
            let slot = t * l + e.lane;
            if t >= coloring.colors_used || out.valid[slot] {
                return Err(ScheduleError::SlotConflict {
                    window: edges.window,
                    timestep: t,
                    lane: e.lane,
                });
            }
            out.valid[slot] = true;
            out.m_sch[slot] = e.value;
            out.row_sch[slot] = i as u32;
            out.col_sch[slot] = e.col as u32;
        }
    }
    Ok(out)
}

/// Assembles the scheduled format from per-window colorings.
pub fn fill_schedule(
    windows: &[WindowEdges],
    colorings: &[Coloring],
    m: usize,
    n: usize,
    layout: &Layout,
    mode: ScheduleMode,
    coloring: ColoringMethod,
) -> Result<ScheduledMatrix, ScheduleError> {
    let filled = windows
        .iter()
        .zip(colorings)
        .map(|(w, c)| fill_window(w, c, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScheduledMatrix {
        l: layout.l,
        m,
        n,
        mode,
        coloring,
        row_order: layout.row_order.clone(),
        lanes: layout.lanes.clone(),
        windows: filled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matio::SparseMatrix;
    use crate::scheduler::coloring::{edge_color_exact, edge_color_greedy};
    use crate::scheduler::window::build_window_edges;

    #[test]
    fn single_nonzero() {
        let m = SparseMatrix::from_triplets(4, 8, &[(2, 7, 9.0)]).unwrap();
        let layout = Layout::identity(&m, 4);
        let w = build_window_edges(&m, &layout);
        let c: Vec<_> = w.iter().map(edge_color_greedy).collect();
        let s = fill_schedule(
            &w,
            &c,
            4,
            8,
            &layout,
            ScheduleMode::Ec,
            ColoringMethod::Greedy,
        )
        .unwrap();
        assert_eq!(s.windows.len(), 1);
        let win = &s.windows[0];
        assert_eq!(win.colors, 1);
        let lane = 7 % 4;
        assert_eq!(win.valid, vec![false, false, false, true]);
        assert_eq!(win.m_sch[lane], 9.0);
        assert_eq!(win.row_sch[lane], 2);
        assert_eq!(win.col_sch[lane], 7);
        // sentinels
        assert_eq!(win.row_sch[0], 4);
        assert_eq!(win.col_sch[0], 8);
        assert_eq!(win.m_sch[0], 0.0);
    }

    #[test]
    fn dense3_exact_fills_every_slot() {
        let t: Vec<_> = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c, 1.0 + (r * 3 + c) as f64)))
            .collect();
        let m = SparseMatrix::from_triplets(3, 3, &t).unwrap();
        let layout = Layout::identity(&m, 3);
        let w = build_window_edges(&m, &layout);
        let c: Vec<_> = w.iter().map(edge_color_exact).collect();
        let s = fill_schedule(
            &w,
            &c,
            3,
            3,
            &layout,
            ScheduleMode::Ec,
            ColoringMethod::Exact,
        )
        .unwrap();
        assert_eq!(s.windows[0].colors, 3);
        assert!(s.windows[0].valid.iter().all(|&v| v));
    }

    #[test]
    fn improper_coloring_is_rejected() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        let layout = Layout::identity(&m, 2);
        let w = build_window_edges(&m, &layout);
        let bad = Coloring {
            colors: vec![vec![0], vec![0]],
            colors_used: 1,
        };
        let err = fill_window(&w[0], &bad, 2).unwrap_err();
        assert!(matches!(
            err,
            ScheduleError::SlotConflict {
                window: 0,
                timestep: 0,
                lane: 0
            }
        ));
    }
}
