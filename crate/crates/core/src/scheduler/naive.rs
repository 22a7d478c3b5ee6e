//! Collision-stalling baseline: no reordering, each lane drains a FIFO of its
//! nonzeros in row order and stalls whenever its head would hit an adder
//! already claimed this cycle.

use serde::{Deserialize, Serialize};

use crate::matio::SparseMatrix;

use super::window::{window_count, Layout};

/// Pipeline drain after the last issue cycle.
pub const DRAIN_CYCLES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveItem {
    pub value: f64,
    /// Window-local row.
    pub row: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveWindow {
    /// `fifos[lane]`, ascending row order.
    pub fifos: Vec<Vec<NaiveItem>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveSchedule {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub windows: Vec<NaiveWindow>,
}

impl NaiveSchedule {
    pub fn nnz(&self) -> usize {
        self.windows
            .iter()
            .flat_map(|w| &w.fifos)
            .map(Vec::len)
            .sum()
    }
}

/// Per-lane FIFOs under identity rows and `col mod l` lanes.
pub fn build_naive(m: &SparseMatrix, l: usize) -> NaiveSchedule {
    assert!(l >= 1, "accelerator length must be at least 1");
    let layout = Layout::identity(m, l);
    let mut windows: Vec<NaiveWindow> = (0..window_count(m.rows(), l))
        .map(|_| NaiveWindow {
            fifos: vec![Vec::new(); l],
        })
        .collect();
    for e in m.entries() {
        let w = e.row / l;
        let lane = layout.lanes[w].lane(e.col, l);
        windows[w].fifos[lane].push(NaiveItem {
            value: e.value,
            row: (e.row % l) as u32,
            col: e.col as u32,
        });
    }
    NaiveSchedule {
        l,
        m: m.rows(),
        n: m.cols(),
        windows,
    }
}

/// Runs the lowest-lane-first arbiter over one window. `on_cycle` receives
/// the lanes that issued (ascending) and whether any nonempty lane stalled.
/// Returns the number of issue cycles.
pub fn drive_naive_window(
    window: &NaiveWindow,
    l: usize,
    mut on_cycle: impl FnMut(&[usize], bool),
) -> usize {
    let mut heads = vec![0usize; window.fifos.len()];
    let mut active: Vec<usize> = (0..window.fifos.len())
        .filter(|&lane| !window.fifos[lane].is_empty())
        .collect();
    // claimed[row] == cycle + 1 when the adder is taken this cycle
    let mut claimed = vec![0usize; l];
    let mut issued = Vec::with_capacity(l);
    let mut cycle = 0usize;
    while !active.is_empty() {
        issued.clear();
        let mut stalled = false;
        for &lane in &active {
            let item = &window.fifos[lane][heads[lane]];
            let row = item.row as usize;
            if claimed[row] == cycle + 1 {
                stalled = true;
            } else {
                claimed[row] = cycle + 1;
                issued.push(lane);
            }
        }
        for &lane in &issued {
            heads[lane] += 1;
        }
        on_cycle(&issued, stalled);
        active.retain(|&lane| heads[lane] < window.fifos[lane].len());
        cycle += 1;
    }
    cycle
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaiveTrace {
    /// Issue cycles per window.
    pub window_cycles: Vec<usize>,
    /// Lanes issued in each cycle, windows back to back.
    pub issues: Vec<Vec<usize>>,
    pub stall_cycles: usize,
    /// Issue cycles plus the pipeline drain.
    pub total_cycles: usize,
}

pub fn naive_issue_trace(s: &NaiveSchedule) -> NaiveTrace {
    let mut issues = Vec::new();
    let mut stall_cycles = 0;
    let window_cycles: Vec<usize> = s
        .windows
        .iter()
        .map(|w| {
            drive_naive_window(w, s.l, |lanes, stalled| {
                issues.push(lanes.to_vec());
                stall_cycles += usize::from(stalled);
            })
        })
        .collect();
    let total_cycles = window_cycles.iter().sum::<usize>() + DRAIN_CYCLES;
    NaiveTrace {
        window_cycles,
        issues,
        stall_cycles,
        total_cycles,
    }
}
