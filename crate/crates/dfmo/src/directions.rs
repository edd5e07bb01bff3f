//! Search direction sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A set of `r ≥ 2` unit search directions in ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    dirs: Vec<Vec<f64>>,
}

impl DirectionSet {
    /// Validates that every vector has unit Euclidean norm (within 1e-12),
    /// all dimensions agree and there are at least two directions.
    pub fn new(dirs: Vec<Vec<f64>>) -> Result<Self> {
        if dirs.len() < 2 {
            return Err(Error::Config(format!(
                "a direction set needs at least two directions, got {}",
                dirs.len()
            )));
        }
        let n = dirs[0].len();
        for (i, d) in dirs.iter().enumerate() {
            if d.len() != n {
                return Err(Error::Config(format!(
                    "direction {i} has dimension {}, expected {n}",
                    d.len()
                )));
            }
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "direction {i} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(Self { dirs })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// Decision-space dimension of the directions.
    pub fn dim(&self) -> usize {
        self.dirs[0].len()
    }

    pub fn dir(&self, i: usize) -> &[f64] {
        &self.dirs[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.dirs.iter().map(Vec::as_slice)
    }
}

/// The `2n` signed coordinate directions `±e_1, …, ±e_n` plus `r_extra`
/// seeded random unit vectors.
pub fn make_directions(n: usize, r_extra: usize, seed: u64) -> Result<DirectionSet> {
    if n == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    let mut dirs = Vec::with_capacity(2 * n + r_extra);
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[j] = sign;
            dirs.push(d);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut added = 0;
    while added < r_extra {
        let d: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        // A fresh draw for the (vanishingly unlikely) degenerate sample.
        if norm < 1e-9 {
            continue;
        }
        dirs.push(d.into_iter().map(|v| v / norm).collect());
        added += 1;
    }
    DirectionSet::new(dirs)
}
