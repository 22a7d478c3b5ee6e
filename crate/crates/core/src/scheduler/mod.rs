//! Turns a sparse matrix into the collision-free scheduled storage format.
//!
//! Pipeline: [`Layout`] (identity or [`load_balance`]) →
//! [`build_window_edges`] → per-window edge coloring → [`fill_schedule`].
//! Windows are independent and are colored in parallel; results are merged
//! in window order, so output does not depend on thread scheduling.

mod balance;
mod coloring;
mod fill;
pub mod format;
mod naive;
mod verify;
mod window;

pub use balance::{load_balance, snake_lanes, snake_stream_order};
pub use coloring::{color_window, edge_color_exact, edge_color_greedy, Coloring, ColoringMethod};
pub use fill::{fill_schedule, fill_window, ScheduledMatrix, ScheduledWindow};
pub use format::ScheduleFile;
pub use naive::{
    build_naive, drive_naive_window, naive_issue_trace, NaiveItem, NaiveSchedule, NaiveTrace,
    NaiveWindow, DRAIN_CYCLES,
};
pub use verify::{verify_schedule, VerifyFailure, VerifyReport};
pub use window::{
    build_window_edges, color_lower_bound, window_count, LaneMap, Layout, WindowEdge, WindowEdges,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matio::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScheduleMode {
    /// Per-lane FIFOs, stall on collision.
    #[serde(rename = "naive")]
    Naive,
    /// Edge coloring under identity rows and `col mod l` lanes.
    #[serde(rename = "ec")]
    Ec,
    /// Load balancing, then edge coloring.
    #[serde(rename = "ec-lb")]
    EcLb,
}

impl ScheduleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleMode::Naive => "naive",
            ScheduleMode::Ec => "ec",
            ScheduleMode::EcLb => "ec-lb",
        }
    }
}

impl std::fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScheduleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(ScheduleMode::Naive),
            "ec" => Ok(ScheduleMode::Ec),
            "ec-lb" | "eclb" | "ec_lb" => Ok(ScheduleMode::EcLb),
            other => Err(format!(
                "unknown mode `{other}` (expected naive, ec or ec-lb)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("accelerator length must be at least 1")]
    ZeroLength,
    #[error("two edges map to slot (timestep {timestep}, lane {lane}) of window {window}")]
    SlotConflict {
        window: usize,
        timestep: usize,
        lane: usize,
    },
    #[error("schedule format: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Colors every window under `layout` and fills the storage format.
pub fn schedule_with_layout(
    m: &SparseMatrix,
    layout: &Layout,
    method: ColoringMethod,
    mode: ScheduleMode,
) -> Result<ScheduledMatrix, ScheduleError> {
    let rows = m.row_slices();
    let windows = (0..layout.windows())
        .into_par_iter()
        .map(|w| {
            let edges = window::build_window(&rows, layout, w);
            let coloring = color_window(&edges, method);
            fill_window(&edges, &coloring, m.cols())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScheduledMatrix {
        l: layout.l,
        m: m.rows(),
        n: m.cols(),
        mode,
        coloring: method,
        row_order: layout.row_order.clone(),
        lanes: layout.lanes.clone(),
        windows,
    })
}

/// Edge-colored schedule, with or without load balancing.
pub fn schedule_colored(
    m: &SparseMatrix,
    l: usize,
    balance: bool,
    method: ColoringMethod,
) -> Result<ScheduledMatrix, ScheduleError> {
    if l == 0 {
        return Err(ScheduleError::ZeroLength);
    }
    let (layout, mode) = if balance {
        (load_balance(m, l), ScheduleMode::EcLb)
    } else {
        (Layout::identity(m, l), ScheduleMode::Ec)
    };
    schedule_with_layout(m, &layout, method, mode)
}

/// Schedules `m` for a length-`l` datapath in the given mode.
pub fn schedule(
    m: &SparseMatrix,
    l: usize,
    mode: ScheduleMode,
    method: ColoringMethod,
) -> Result<ScheduleFile, ScheduleError> {
    if l == 0 {
        return Err(ScheduleError::ZeroLength);
    }
    Ok(match mode {
        ScheduleMode::Naive => ScheduleFile::Naive(build_naive(m, l)),
        ScheduleMode::Ec => ScheduleFile::Colored(schedule_colored(m, l, false, method)?),
        ScheduleMode::EcLb => ScheduleFile::Colored(schedule_colored(m, l, true, method)?),
    })
}

/// Per-window color lower bounds under `layout`.
pub fn window_bounds(m: &SparseMatrix, layout: &Layout) -> Vec<usize> {
    let rows = m.row_slices();
    (0..layout.windows())
        .map(|w| color_lower_bound(&window::build_window(&rows, layout, w)))
        .collect()
}
