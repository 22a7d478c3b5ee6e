//! Bipartite edge coloring of window graphs. A color is a timestep: edges
//! sharing a color must not share a row (adder) or a lane (multiplier).

use serde::{Deserialize, Serialize};

use super::window::{color_lower_bound, WindowEdges};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColoringMethod {
    /// First-fit matching per color, rows in ascending order.
    #[default]
    Greedy,
    /// Optimal coloring with exactly max-degree colors.
    Exact,
}

impl std::str::FromStr for ColoringMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(ColoringMethod::Greedy),
            "exact" => Ok(ColoringMethod::Exact),
            other => Err(format!(
                "unknown coloring `{other}` (expected greedy or exact)"
            )),
        }
    }
}

/// `colors[i][k]` is the color of the `k`-th edge of window-local row `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<Vec<u32>>,
    pub colors_used: usize,
}

impl Coloring {
    /// Color of edge `(row, col)`, if present.
    pub fn color_of(&self, w: &WindowEdges, row: usize, col: usize) -> Option<u32> {
        let k = w.rows.get(row)?.iter().position(|e| e.col == col)?;
        Some(self.colors[row][k])
    }

    /// Checks the coloring is complete and proper on both vertex sides.
    pub fn is_proper(&self, w: &WindowEdges) -> bool {
        if self.colors.len() != w.rows.len() {
            return false;
        }
        let c = self.colors_used;
        let mut lane_seen = vec![false; w.l * c];
        for (i, row) in w.rows.iter().enumerate() {
            if self.colors[i].len() != row.len() {
                return false;
            }
            let mut row_seen = vec![false; c];
            for (e, &color) in row.iter().zip(&self.colors[i]) {
                let color = color as usize;
                if color >= c || row_seen[color] || lane_seen[e.lane * c + color] {
                    return false;
                }
                row_seen[color] = true;
                lane_seen[e.lane * c + color] = true;
            }
        }
        true
    }
}

pub fn color_window(w: &WindowEdges, method: ColoringMethod) -> Coloring {
    match method {
        ColoringMethod::Greedy => edge_color_greedy(w),
        ColoringMethod::Exact => edge_color_exact(w),
    }
}

/// Repeated first-fit matchings.
///
/// For each color: walk rows in ascending order; in each row take the first
/// remaining edge whose lane is not yet in this color's matching, then move
/// on to the next row. Stops when every edge is colored. May use more colors
/// than the max degree.
pub fn edge_color_greedy(w: &WindowEdges) -> Coloring {
    let mut colors: Vec<Vec<u32>> = w.rows.iter().map(|r| vec![0; r.len()]).collect();
    // remaining edge positions per row, in stored order
    let mut remaining: Vec<Vec<usize>> = w.rows.iter().map(|r| (0..r.len()).collect()).collect();
    let mut left = w.nnz();
    let mut in_matching = vec![false; w.l];
    let mut clr = 0u32;

    while left > 0 {
        in_matching.iter_mut().for_each(|x| *x = false);
        for (i, rem) in remaining.iter_mut().enumerate() {
            let row = &w.rows[i];
            if let Some(pos) = rem.iter().position(|&k| !in_matching[row[k].lane]) {
                let k = rem.remove(pos);
                colors[i][k] = clr;
                in_matching[row[k].lane] = true;
                left -= 1;
            }
        }
        clr += 1;
    }

    Coloring {
        colors,
        colors_used: clr as usize,
    }
}

const NONE: u32 = u32::MAX;

/// Optimal bipartite edge coloring with exactly [`color_lower_bound`] colors.
///
/// Edges are inserted in row order. For edge `(u, v)` pick the smallest color
/// `a` free at row `u` and `b` free at lane `v`; if `a` is busy at `v`, swap
/// `a`/`b` along the alternating path that starts at `v`. In a bipartite
/// graph that path never reaches `u`, so afterwards `a` is free at both ends.
pub fn edge_color_exact(w: &WindowEdges) -> Coloring {
    let d = color_lower_bound(w);
    let rows = w.rows.len();

    // flat edge list; endpoints and current color
    let mut edge_row = Vec::with_capacity(w.nnz());
    let mut edge_lane = Vec::with_capacity(w.nnz());
    for (i, row) in w.rows.iter().enumerate() {
        for e in row {
            edge_row.push(i);
            edge_lane.push(e.lane);
        }
    }
    let mut color = vec![NONE; edge_row.len()];
    // at_row[u * d + c] / at_lane[v * d + c]: edge holding color c at vertex
    let mut at_row = vec![NONE; rows * d];
    let mut at_lane = vec![NONE; w.l * d];
    let mut path = Vec::new();

    for e in 0..edge_row.len() {
        let (u, v) = (edge_row[e], edge_lane[e]);
        let a = (0..d)
            .find(|&c| at_row[u * d + c] == NONE)
            .expect("row degree <= d");
        if at_lane[v * d + a] != NONE {
            let b = (0..d)
                .find(|&c| at_lane[v * d + c] == NONE)
                .expect("lane degree <= d");
            // walk the a/b path from lane v: a-edges lead to rows, b-edges back to lanes
            path.clear();
            let mut on_lane_side = true;
            let mut vertex = v;
            let mut want = a;
            loop {
                let next = if on_lane_side {
                    at_lane[vertex * d + want]
                } else {
                    at_row[vertex * d + want]
                };
                if next == NONE {
                    break;
                }
                let next = next as usize;
                path.push(next);
                vertex = if on_lane_side {
                    edge_row[next]
                } else {
                    edge_lane[next]
                };
                on_lane_side = !on_lane_side;
                want = if want == a { b } else { a };
            }
            for &p in &path {
                let c = color[p] as usize;
                at_row[edge_row[p] * d + c] = NONE;
                at_lane[edge_lane[p] * d + c] = NONE;
            }
            for &p in &path {
                let c = if color[p] as usize == a { b } else { a };
                color[p] = c as u32;
                at_row[edge_row[p] * d + c] = p as u32;
                at_lane[edge_lane[p] * d + c] = p as u32;
            }
            debug_assert_eq!(at_row[u * d + a], NONE);
        }
        color[e] = a as u32;
        at_row[u * d + a] = e as u32;
        at_lane[v * d + a] = e as u32;
    }

    let mut it = color.into_iter();
    let colors = w
        .rows
        .iter()
        .map(|r| it.by_ref().take(r.len()).collect())
        .collect();
    Coloring {
        colors,
        colors_used: d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matio::SparseMatrix;
    use crate::scheduler::window::{build_window_edges, Layout};

    fn window(rows: usize, cols: usize, l: usize, t: &[(usize, usize)]) -> WindowEdges {
        let t: Vec<_> = t.iter().map(|&(r, c)| (r, c, 1.0)).collect();
        let m = SparseMatrix::from_triplets(rows, cols, &t).unwrap();
        build_window_edges(&m, &Layout::identity(&m, l)).remove(0)
    }

    fn dense3() -> WindowEdges {
        let t: Vec<_> = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).collect();
        window(3, 3, 3, &t)
    }

    #[test]
    fn greedy_diagonal_one_color() {
        let w = window(4, 4, 4, &[(0, 0), (1, 1), (2, 2), (3, 3)]);
        let c = edge_color_greedy(&w);
        assert_eq!(c.colors_used, 1);
        assert!(c.is_proper(&w));
    }

    // Hand execution of the first-fit procedure on a dense 3x3 window.
    #[test]
    fn greedy_dense3_trace() {
        let w = dense3();
        let c = edge_color_greedy(&w);
        assert_eq!(c.colors_used, 4);
        let expect = [
            ((0, 0), 0),
            ((1, 1), 0),
            ((2, 2), 0),
            ((0, 1), 1),
            ((1, 0), 1),
            ((0, 2), 2),
            ((2, 0), 2),
            ((1, 2), 3),
            ((2, 1), 3),
        ];
        for ((r, col), color) in expect {
            assert_eq!(c.color_of(&w, r, col), Some(color), "edge ({r},{col})");
        }
        assert!(c.is_proper(&w));
        assert_eq!(color_lower_bound(&w), 3);
    }

    #[test]
    fn parallel_edges_forced_apart() {
        // columns 1 and 5 both land on lane 1 under l = 4
        let w = window(1, 8, 4, &[(0, 1), (0, 5)]);
        for method in [ColoringMethod::Greedy, ColoringMethod::Exact] {
            let c = color_window(&w, method);
            assert_eq!(c.colors_used, 2);
            assert!(c.is_proper(&w));
        }
    }

    // Oracle: exhaustive search over all 3^9 assignments for a proper
    // 3-coloring of the dense 3x3 window.
    #[test]
    fn dense3_three_coloring_exists_by_brute_force() {
        let edges: Vec<(usize, usize)> = (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).collect();
        let mut found = 0;
        for code in 0..3usize.pow(9) {
            let mut x = code;
            let colors: Vec<usize> = (0..9)
                .map(|_| {
                    let c = x % 3;
                    x /= 3;
                    c
                })
                .collect();
            let proper = (0..9).all(|a| {
                (a + 1..9).all(|b| {
                    let share = edges[a].0 == edges[b].0 || edges[a].1 == edges[b].1;
                    !share || colors[a] != colors[b]
                })
            });
            found += usize::from(proper);
        }
        // 3x3 Latin squares
        assert_eq!(found, 12);

        let w = dense3();
        let c = edge_color_exact(&w);
        assert_eq!(c.colors_used, 3);
        assert!(c.is_proper(&w));
    }

    #[test]
    fn exact_diagonal_one_color() {
        let w = window(4, 4, 4, &[(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(edge_color_exact(&w).colors_used, 1);
    }

    #[test]
    fn empty_window() {
        let w = window(2, 2, 2, &[]);
        for method in [ColoringMethod::Greedy, ColoringMethod::Exact] {
            let c = color_window(&w, method);
            assert_eq!(c.colors_used, 0);
            assert!(c.is_proper(&w));
        }
    }

    #[test]
    fn exact_needs_recoloring() {
        // Greedy insertion order forces a Kempe swap here.
        let w = window(3, 3, 3, &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 0), (2, 2)]);
        let c = edge_color_exact(&w);
        assert_eq!(c.colors_used, 2);
        assert!(c.is_proper(&w));
    }
}
