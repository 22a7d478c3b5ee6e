use serde::{Deserialize, Serialize};

use crate::matio::SparseMatrix;

/// Column-to-lane map used inside one window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaneMap {
    /// `lane = col mod l`.
    Modulo,
    /// Explicit lane per source column.
    Table(Vec<u32>),
}

impl LaneMap {
    #[inline]
    pub fn lane(&self, col: usize, l: usize) -> usize {
        match self {
            LaneMap::Modulo => col % l,
            LaneMap::Table(t) => t[col] as usize,
        }
    }
}

/// Row order and per-window lane maps: everything that decides where a
/// nonzero lands before coloring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub l: usize,
    /// `row_order[k]` is the source row placed at position `k`; window `w`
    /// holds positions `w*l .. (w+1)*l`.
    pub row_order: Vec<usize>,
    /// One map per window.
    pub lanes: Vec<LaneMap>,
}

pub fn window_count(rows: usize, l: usize) -> usize {
    rows.div_ceil(l)
}

impl Layout {
    /// Identity row order with `col mod l` lanes.
    pub fn identity(m: &SparseMatrix, l: usize) -> Self {
        assert!(l >= 1, "accelerator length must be at least 1");
        Layout {
            l,
            row_order: (0..m.rows()).collect(),
            lanes: vec![LaneMap::Modulo; window_count(m.rows(), l)],
        }
    }

    pub fn windows(&self) -> usize {
        self.lanes.len()
    }

    /// Source rows of window `w`, in window-local order.
    pub fn window_rows(&self, w: usize) -> &[usize] {
        let start = w * self.l;
        let end = ((w + 1) * self.l).min(self.row_order.len());
        &self.row_order[start..end]
    }

    pub fn is_identity(&self) -> bool {
        self.row_order.iter().enumerate().all(|(k, &r)| k == r)
            && self.lanes.iter().all(|m| *m == LaneMap::Modulo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEdge {
    /// Source column index.
    pub col: usize,
    pub lane: usize,
    pub value: f64,
}

/// Bipartite multigraph of one window: left vertices are window-local rows
/// (adders), right vertices are lanes (multipliers). Each row's edges are in
/// ascending column order.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowEdges {
    pub window: usize,
    pub l: usize,
    /// One list per populated row; a partial last window has fewer than `l`.
    pub rows: Vec<Vec<WindowEdge>>,
}

impl WindowEdges {
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn lane_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.l];
        for e in self.rows.iter().flatten() {
            deg[e.lane] += 1;
        }
        deg
    }

    pub fn max_row_degree(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Splits `m` into `⌈rows/l⌉` windows under `layout`.
pub fn build_window_edges(m: &SparseMatrix, layout: &Layout) -> Vec<WindowEdges> {
    let rows = m.row_slices();
    (0..layout.windows())
        .map(|w| build_window(&rows, layout, w))
        .collect()
}

pub(crate) fn build_window(
    rows: &[&[crate::matio::Entry]],
    layout: &Layout,
    w: usize,
) -> WindowEdges {
    let lanes = &layout.lanes[w];
    let l = layout.l;
    WindowEdges {
        window: w,
        l,
        rows: layout
            .window_rows(w)
            .iter()
            .map(|&r| {
                rows[r]
                    .iter()
                    .map(|e| WindowEdge {
                        col: e.col,
                        lane: lanes.lane(e.col, l),
                        value: e.value,
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Maximum vertex degree of the window graph: the largest of the row
/// degrees and the lane degrees. A bipartite multigraph is edge-colorable
/// with exactly this many colors, so no schedule can use fewer timesteps.
pub fn color_lower_bound(w: &WindowEdges) -> usize {
    let lane_max = w.lane_degrees().into_iter().max().unwrap_or(0);
    w.max_row_degree().max(lane_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matio::SparseMatrix;

    fn dense(n: usize) -> SparseMatrix {
        let t: Vec<_> = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c, 1.0)))
            .collect();
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn six_by_nine_two_windows() {
        let m = SparseMatrix::from_triplets(6, 9, &[(0, 0, 1.0), (5, 8, 1.0)]).unwrap();
        let w = build_window_edges(&m, &Layout::identity(&m, 3));
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|w| w.rows.len() == 3));
    }

    #[test]
    fn partial_last_window() {
        let m = SparseMatrix::identity(5);
        let w = build_window_edges(&m, &Layout::identity(&m, 3));
        assert_eq!(
            w.iter().map(|w| w.rows.len()).collect::<Vec<_>>(),
            vec![3, 2]
        );
    }

    #[test]
    fn diagonal_window_edges() {
        let m = SparseMatrix::identity(4);
        let w = build_window_edges(&m, &Layout::identity(&m, 2));
        let cols: Vec<Vec<usize>> = w[0]
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.col).collect())
            .collect();
        assert_eq!(cols, vec![vec![0], vec![1]]);
        assert_eq!(w[1].rows[0][0].lane, 0);
    }

    #[test]
    fn bound_dense_window() {
        let m = dense(4);
        let w = build_window_edges(&m, &Layout::identity(&m, 4));
        assert_eq!(color_lower_bound(&w[0]), 4);
    }

    #[test]
    fn bound_row_dominates() {
        let m = SparseMatrix::from_triplets(1, 7, &(0..7).map(|c| (0, c, 1.0)).collect::<Vec<_>>())
            .unwrap();
        let w = build_window_edges(&m, &Layout::identity(&m, 7));
        assert_eq!(color_lower_bound(&w[0]), 7);
    }

    #[test]
    fn bound_lane_dominates() {
        // columns 0, 3, 6 share lane 0 under l = 3
        let m =
            SparseMatrix::from_triplets(3, 9, &[(0, 0, 1.0), (1, 3, 1.0), (2, 6, 1.0)]).unwrap();
        let w = build_window_edges(&m, &Layout::identity(&m, 3));
        assert_eq!(color_lower_bound(&w[0]), 3);
    }

    #[test]
    fn bound_empty_window() {
        let m = SparseMatrix::empty(4, 4);
        let w = build_window_edges(&m, &Layout::identity(&m, 4));
        assert_eq!(color_lower_bound(&w[0]), 0);
    }
}
