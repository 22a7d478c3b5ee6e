//! Seeded synthetic square matrices: uniform (i.i.d. Bernoulli cells),
//! power-law row degrees and k-regular rows.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Geometric, Zipf};
use serde::{Deserialize, Serialize};

use super::{Entry, MatrixError, SparseMatrix};

pub const DEFAULT_ZIPF_EXPONENT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case")]
pub enum Distribution {
    /// Every cell independently nonzero with probability `density`.
    Uniform { density: f64 },
    /// Zipf-distributed row degrees scaled to an expected `density * n^2`
    /// nonzeros; columns uniform without replacement within a row.
    PowerLaw { density: f64, exponent: f64 },
    /// Exactly `degree` nonzeros per row at uniformly chosen columns.
    KRegular { degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub dist: Distribution,
    pub n: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn uniform(n: usize, density: f64, seed: u64) -> Self {
        SynthSpec {
            dist: Distribution::Uniform { density },
            n,
            seed,
        }
    }

    pub fn power_law(n: usize, density: f64, seed: u64) -> Self {
        SynthSpec {
            dist: Distribution::PowerLaw {
                density,
                exponent: DEFAULT_ZIPF_EXPONENT,
            },
            n,
            seed,
        }
    }

    pub fn k_regular(n: usize, degree: usize, seed: u64) -> Self {
        SynthSpec {
            dist: Distribution::KRegular { degree },
            n,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), MatrixError> {
        let bad = |msg: String| Err(MatrixError::InvalidSpec(msg));
        if self.n == 0 {
            return bad("dimension must be at least 1".into());
        }
        match self.dist {
            Distribution::Uniform { density } | Distribution::PowerLaw { density, .. }
                if !(density > 0.0 && density <= 1.0) =>
            {
                bad(format!("density {density} outside (0, 1]"))
            }
            Distribution::PowerLaw { exponent, .. }
                if !(exponent > 0.0 && exponent.is_finite()) =>
            {
                bad(format!("zipf exponent {exponent} must be positive"))
            }
            Distribution::KRegular { degree } if degree > self.n => {
                bad(format!("degree {degree} exceeds dimension {}", self.n))
            }
            _ => Ok(()),
        }
    }
}

/// Value on (0, 1].
fn draw_value(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Builds the matrix described by `spec`. Identical specs give bit-identical
/// matrices.
pub fn generate(spec: &SynthSpec) -> Result<SparseMatrix, MatrixError> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let entries = match spec.dist {
        Distribution::Uniform { density } => uniform_entries(n, density, &mut rng),
        Distribution::KRegular { degree } => {
            let degrees = vec![degree; n];
            rows_with_degrees(n, &degrees, &mut rng)
        }
        Distribution::PowerLaw { density, exponent } => {
            let degrees = power_law_degrees(n, density, exponent, &mut rng);
            rows_with_degrees(n, &degrees, &mut rng)
        }
    };
    SparseMatrix::from_entries(n, n, entries)
}

// Geometric gap skipping over the row-major cell sequence; exactly
// equivalent to an independent Bernoulli(p) draw per cell.
fn uniform_entries(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let cells = (n as u64) * (n as u64);
    let gap = Geometric::new(p).expect("density validated");
    let mut entries = Vec::with_capacity((cells as f64 * p * 1.05) as usize + 16);
    let mut pos = gap.sample(rng);
    while pos < cells {
        let (r, c) = ((pos / n as u64) as usize, (pos % n as u64) as usize);
        entries.push(Entry::new(r, c, draw_value(rng)));
        pos = match pos.checked_add(gap.sample(rng) + 1) {
            Some(p) => p,
            None => break,
        };
    }
    entries
}

fn power_law_degrees(n: usize, density: f64, exponent: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let zipf = Zipf::new(n as f64, exponent).expect("exponent validated");
    let (num, den) = (1..=n).fold((0.0, 0.0), |(num, den), k| {
        let w = (k as f64).powf(-exponent);
        (num + k as f64 * w, den + w)
    });
    let scale = density * n as f64 / (num / den);
    (0..n)
        .map(|_| {
            let raw = zipf.sample(rng) * scale;
            // stochastic rounding keeps the expected degree unbiased
            let d = raw.floor() as usize + usize::from(rng.random::<f64>() < raw.fract());
            d.min(n)
        })
        .collect()
}

fn rows_with_degrees(n: usize, degrees: &[usize], rng: &mut ChaCha8Rng) -> Vec<Entry> {
    let mut entries = Vec::with_capacity(degrees.iter().sum());
    for (row, &d) in degrees.iter().enumerate() {
        let mut cols = index::sample(rng, n, d).into_vec();
        cols.sort_unstable();
        for col in cols {
            entries.push(Entry::new(row, col, draw_value(rng)));
        }
    }
    entries
}
