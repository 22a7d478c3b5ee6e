//! Sort-based load balancing of row and lane degrees.
//!
//! 1. Rows are stably sorted by ascending nnz, so each window holds rows of
//!    similar length.
//! 2. Within each window, columns are stably sorted by descending in-window
//!    nnz.
//! 3. The sorted columns are cut into groups of `l`; every second group is
//!    reversed and position `k` of each group goes to lane `k`. Lanes thus
//!    take columns in snake order, evening out lane degrees.

use crate::matio::SparseMatrix;

use super::window::{window_count, LaneMap, Layout};

/// Lane of every column given columns sorted by priority.
pub fn snake_lanes(sorted_cols: &[usize], l: usize, n: usize) -> Vec<u32> {
    let mut lanes = vec![0u32; n];
    for (g, group) in sorted_cols.chunks(l).enumerate() {
        let len = group.len();
        for (k, &col) in group.iter().enumerate() {
            let lane = if g % 2 == 1 { len - 1 - k } else { k };
            lanes[col] = lane as u32;
        }
    }
    lanes
}

/// Order in which sorted columns enter the multipliers: the sorted list with
/// every second group of `l` reversed.
pub fn snake_stream_order(sorted_cols: &[usize], l: usize) -> Vec<usize> {
    sorted_cols
        .chunks(l)
        .enumerate()
        .flat_map(|(g, group)| {
            let mut group = group.to_vec();
            if g % 2 == 1 {
                group.reverse();
            }
            group
        })
        .collect()
}

pub fn load_balance(m: &SparseMatrix, l: usize) -> Layout {
    assert!(l >= 1, "accelerator length must be at least 1");
    let counts = m.row_counts();
    let mut row_order: Vec<usize> = (0..m.rows()).collect();
    row_order.sort_by_key(|&r| counts[r]);

    let rows = m.row_slices();
    let n = m.cols();
    let mut col_counts = vec![0u32; n];
    let lanes = (0..window_count(m.rows(), l))
        .map(|w| {
            let start = w * l;
            let end = (start + l).min(row_order.len());
            col_counts.iter_mut().for_each(|c| *c = 0);
            for &r in &row_order[start..end] {
                for e in rows[r] {
                    col_counts[e.col] += 1;
                }
            }
            let mut cols: Vec<usize> = (0..n).collect();
            cols.sort_by(|a, b| col_counts[*b].cmp(&col_counts[*a]));
            LaneMap::Table(snake_lanes(&cols, l, n))
        })
        .collect();

    Layout {
        l,
        row_order,
        lanes,
    }
}
