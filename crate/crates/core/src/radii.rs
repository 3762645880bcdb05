//! Half pairwise distances: the pool of candidate hole radii.

use std::fmt::Write as _;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pointset::PointSet;

pub const DEFAULT_MAX_POINTS: usize = 2000;
pub const DEFAULT_SEED: u64 = 42;

/// Descending order statistics `r(1) >= r(2) >= ... >= r(m) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiSample {
    values: Vec<f64>,
    /// Points that went into the pairwise loop (after subsampling).
    pub n_source: usize,
    /// Zero radii removed because of duplicate points.
    pub dropped_zeros: usize,
    /// Seed of the subsample, when one was drawn.
    pub subsample_seed: Option<u64>,
}

impl RadiiSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Computes every `|p_i - p_j| / 2`, drops zeros and sorts descending.
///
/// With `max_points = Some(b)` and more than `b` points, a uniform subsample
/// of size `b` is drawn with `ChaCha8Rng::seed_from_u64(seed)`; `seed`
/// defaults to [`DEFAULT_SEED`]. `None` disables subsampling.
pub fn extract_radii(
    ps: &PointSet,
    max_points: Option<usize>,
    seed: Option<u64>,
) -> Result<RadiiSample> {
    if ps.len() < 2 {
        return Err(Error::TooFewPoints { n: ps.len() });
    }
    if let Some(b) = max_points {
        if b < 2 {
            return Err(Error::InvalidParam(format!(
                "max_points must be at least 2, got {b}"
            )));
        }
    }

    let (subset, subsample_seed) = match max_points {
        Some(b) if ps.len() > b => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = index::sample(&mut rng, ps.len(), b).into_vec();
            picked.sort_unstable();
            (Some(ps.select(&picked)), Some(seed))
        }
        _ => (None, None),
    };
    let src = subset.as_ref().unwrap_or(ps);
    let n = src.len();

    let mut values = Vec::with_capacity(n * (n - 1) / 2);
    let dim = src.dim();
    let coords = src.coords();
    for i in 0..n {
        let a = &coords[i * dim..(i + 1) * dim];
        for j in (i + 1)..n {
            let b = &coords[j * dim..(j + 1) * dim];
            let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            values.push(0.5 * sq.sqrt());
        }
    }
    let total = values.len();
    values.retain(|&r| r > 0.0);
    let dropped_zeros = total - values.len();
    if values.is_empty() {
        return Err(Error::AllPairsDegenerate);
    }
    values.sort_unstable_by(|a, b| b.total_cmp(a));

    Ok(RadiiSample {
        values,
        n_source: n,
        dropped_zeros,
        subsample_seed,
    })
}

/// Renders the radii as csv with header `rank,radius`, rank 1 = largest.
pub fn export_radii(rs: &RadiiSample) -> String {
    let mut out = String::with_capacity(rs.values.len() * 24 + 12);
    out.push_str("rank,radius\n");
    for (i, r) in rs.values.iter().enumerate() {
        writeln!(out, "{},{r:?}", i + 1).expect("writing to a String cannot fail");
    }
    out
}

/// Reads a `rank,radius` table back into descending radius values.
pub fn parse_radii_table(text: &str) -> Result<Vec<f64>> {
    let (width, values, _) = crate::pointset::parse_rows(text, true, true)?;
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if width != 2 {
        return Err(Error::MalformedRow {
            line: 1,
            expected: 2,
            found: width,
        });
    }
    Ok(values.chunks_exact(2).map(|row| row[1]).collect())
}
