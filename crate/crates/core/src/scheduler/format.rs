//! On-disk forms of [`ScheduledMatrix`] and [`NaiveSchedule`].
//!
//! JSON is the serde form of the structs (field names are stable). The packed
//! binary form is little-endian:
//!
//! ```text
//! magic        8 bytes  "GUSTSCH\x01"
//! l, m, n      u64 x 3
//! mode         u64      1 = ec, 2 = ec-lb
//! coloring     u64      0 = greedy, 1 = exact
//! windows      u64
//! row_order    u32 x m
//! lane maps    per window: u64 tag (0 = modulo, 1 = table) then u32 x n if table
//! per window:
//!   colors     u64
//!   m_sch      f64 x colors*l
//!   row_sch    per timestep, l fields of ceil(log2(l+1)) bits, LSB first,
//!              padded to a byte boundary; the value l marks an empty slot
//!   col_sch    u32 x colors*l
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::coloring::ColoringMethod;
use super::fill::{ScheduledMatrix, ScheduledWindow};
use super::naive::NaiveSchedule;
use super::window::LaneMap;
use super::{ScheduleError, ScheduleMode};

const MAGIC: &[u8; 8] = b"GUSTSCH\x01";

/// Bits per packed row index: enough for `0..=l` (the sentinel included).
pub fn row_index_bits(l: usize) -> u32 {
    usize::BITS - l.leading_zeros()
}

fn fmt_err(msg: impl Into<String>) -> ScheduleError {
    ScheduleError::Format(msg.into())
}

pub fn write_binary<W: Write>(s: &ScheduledMatrix, mut out: W) -> Result<(), ScheduleError> {
    if s.n > u32::MAX as usize || s.m > u32::MAX as usize {
        return Err(fmt_err("dimensions exceed 32-bit index range"));
    }
    out.write_all(MAGIC)?;
    let mode = match s.mode {
        ScheduleMode::Ec => 1u64,
        ScheduleMode::EcLb => 2,
        ScheduleMode::Naive => return Err(fmt_err("naive schedules have no packed form")),
    };
    let coloring = match s.coloring {
        ColoringMethod::Greedy => 0u64,
        ColoringMethod::Exact => 1,
    };
    for v in [
        s.l as u64,
        s.m as u64,
        s.n as u64,
        mode,
        coloring,
        s.windows.len() as u64,
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    for &r in &s.row_order {
        out.write_all(&(r as u32).to_le_bytes())?;
    }
    for lanes in &s.lanes {
        match lanes {
            LaneMap::Modulo => out.write_all(&0u64.to_le_bytes())?,
            LaneMap::Table(t) => {
                out.write_all(&1u64.to_le_bytes())?;
                for &x in t {
                    out.write_all(&x.to_le_bytes())?;
                }
            }
        }
    }
    let bits = row_index_bits(s.l) as usize;
    let row_bytes = (s.l * bits).div_ceil(8);
    let mut packed = vec![0u8; row_bytes];
    for w in &s.windows {
        out.write_all(&(w.colors as u64).to_le_bytes())?;
        for v in &w.m_sch {
            out.write_all(&v.to_le_bytes())?;
        }
        for t in 0..w.colors {
            packed.iter_mut().for_each(|b| *b = 0);
            for lane in 0..s.l {
                let slot = t * s.l + lane;
                let value = if w.valid[slot] {
                    w.row_sch[slot] as u64
                } else {
                    s.l as u64
                };
                for k in 0..bits {
                    let bit = lane * bits + k;
                    if value >> k & 1 == 1 {
                        packed[bit / 8] |= 1 << (bit % 8);
                    }
                }
            }
            out.write_all(&packed)?;
        }
        for c in &w.col_sch {
            out.write_all(&c.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, ScheduleError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, ScheduleError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_usize<R: Read>(r: &mut R, what: &str, limit: u64) -> Result<usize, ScheduleError> {
    let v = read_u64(r)?;
    if v > limit {
        return Err(fmt_err(format!("{what} {v} exceeds {limit}")));
    }
    Ok(v as usize)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<ScheduledMatrix, ScheduleError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(fmt_err("bad magic"));
    }
    let limit = u32::MAX as u64;
    let l = read_usize(&mut r, "length", limit)?;
    let m = read_usize(&mut r, "rows", limit)?;
    let n = read_usize(&mut r, "cols", limit)?;
    if l == 0 {
        return Err(fmt_err("length 0"));
    }
    let mode = match read_u64(&mut r)? {
        1 => ScheduleMode::Ec,
        2 => ScheduleMode::EcLb,
        other => return Err(fmt_err(format!("unknown mode code {other}"))),
    };
    let coloring = match read_u64(&mut r)? {
        0 => ColoringMethod::Greedy,
        1 => ColoringMethod::Exact,
        other => return Err(fmt_err(format!("unknown coloring code {other}"))),
    };
    let windows = read_usize(&mut r, "window count", limit)?;
    let row_order = (0..m)
        .map(|_| read_u32(&mut r).map(|x| x as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let lanes = (0..windows)
        .map(|_| match read_u64(&mut r)? {
            0 => Ok(LaneMap::Modulo),
            1 => (0..n)
                .map(|_| read_u32(&mut r))
                .collect::<Result<Vec<_>, _>>()
                .map(LaneMap::Table),
            other => Err(fmt_err(format!("unknown lane map tag {other}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let bits = row_index_bits(l) as usize;
    let row_bytes = (l * bits).div_ceil(8);
    let mut packed = vec![0u8; row_bytes];
    let mut out_windows = Vec::with_capacity(windows);
    for _ in 0..windows {
        let colors = read_usize(&mut r, "color count", limit)?;
        let slots = colors
            .checked_mul(l)
            .ok_or_else(|| fmt_err("slot count overflow"))?;
        let mut win = ScheduledWindow::empty(colors, l, n);
        for v in win.m_sch.iter_mut() {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            *v = f64::from_le_bytes(b);
        }
        for t in 0..colors {
            r.read_exact(&mut packed)?;
            for lane in 0..l {
                let mut value = 0u32;
                let base = lane * bits;
                for k in 0..bits {
                    let bit = base + k;
                    if packed[bit / 8] >> (bit % 8) & 1 == 1 {
                        value |= 1 << k;
                    }
                }
                let slot = t * l + lane;
                win.row_sch[slot] = value;
                win.valid[slot] = value as usize != l;
            }
        }
        for c in win.col_sch.iter_mut() {
            *c = read_u32(&mut r)?;
        }
        debug_assert_eq!(win.valid.len(), slots);
        out_windows.push(win);
    }
    Ok(ScheduledMatrix {
        l,
        m,
        n,
        mode,
        coloring,
        row_order,
        lanes,
        windows: out_windows,
    })
}

/// Either schedule kind, as loaded from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleFile {
    Colored(ScheduledMatrix),
    Naive(NaiveSchedule),
}

#[derive(serde::Serialize)]
struct NaiveJson<'a> {
    mode: ScheduleMode,
    #[serde(flatten)]
    schedule: &'a NaiveSchedule,
}

pub fn to_json(s: &ScheduleFile) -> Result<String, ScheduleError> {
    let text = match s {
        ScheduleFile::Colored(s) => serde_json::to_string(s)?,
        ScheduleFile::Naive(s) => serde_json::to_string(&NaiveJson {
            mode: ScheduleMode::Naive,
            schedule: s,
        })?,
    };
    Ok(text)
}

pub fn from_json(text: &str) -> Result<ScheduleFile, ScheduleError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let mode = value
        .get("mode")
        .and_then(|m| m.as_str())
        .ok_or_else(|| fmt_err("missing `mode` field"))?;
    if mode == "naive" {
        Ok(ScheduleFile::Naive(serde_json::from_value(value)?))
    } else {
        Ok(ScheduleFile::Colored(serde_json::from_value(value)?))
    }
}

/// Writes JSON, or the packed form when `path` ends in `.bin`.
pub fn save(s: &ScheduleFile, path: impl AsRef<Path>) -> Result<(), ScheduleError> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path)?);
    match (s, path.extension().and_then(|e| e.to_str())) {
        (ScheduleFile::Colored(c), Some("bin")) => write_binary(c, &mut w)?,
        _ => w.write_all(to_json(s)?.as_bytes())?,
    }
    w.flush()?;
    Ok(())
}

/// Reads either form, sniffing the packed magic.
pub fn load(path: impl AsRef<Path>) -> Result<ScheduleFile, ScheduleError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        return Ok(ScheduleFile::Colored(read_binary(bytes.as_slice())?));
    }
    let text = std::str::from_utf8(&bytes).map_err(|_| fmt_err("not UTF-8 JSON"))?;
    from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_widths() {
        assert_eq!(row_index_bits(1), 1);
        assert_eq!(row_index_bits(3), 2);
        assert_eq!(row_index_bits(4), 3);
        assert_eq!(row_index_bits(87), 7);
        assert_eq!(row_index_bits(255), 8);
        assert_eq!(row_index_bits(256), 9);
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(read_binary(&b"NOTMAGIC"[..]).is_err());
    }
}
