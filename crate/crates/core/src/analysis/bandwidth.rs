use serde::{Deserialize, Serialize};

/// Streamed bits per lane per cycle: a 32-bit value, a 32-bit column index,
/// the row index and one dump bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    pub bits_per_lane_cycle: u32,
    pub per_lane_bits_per_s: f64,
    pub total_bits_per_s: f64,
}

impl Bandwidth {
    /// Total in GB/s with GB = 1e9 bytes.
    pub fn total_gb_per_s(&self) -> f64 {
        self.total_bits_per_s / 8.0 / 1e9
    }
}

/// Row index width on the wire: `⌈log2 l⌉`, at least one bit.
pub fn row_index_width(l: usize) -> u32 {
    assert!(l >= 1);
    let ceil = usize::BITS - (l - 1).leading_zeros();
    ceil.max(1)
}

/// `(64 + ⌈log2 l⌉ + 1) f` per lane, times `l` for the whole datapath.
pub fn required_bandwidth(l: usize, frequency_hz: f64) -> Bandwidth {
    let bits = 64 + row_index_width(l) + 1;
    let per_lane = bits as f64 * frequency_hz;
    Bandwidth {
        bits_per_lane_cycle: bits,
        per_lane_bits_per_s: per_lane,
        total_bits_per_s: per_lane * l as f64,
    }
}
