use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A square orthogonal matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    size: usize,
    data: Vec<f64>,
}

impl Rotation {
    /// Seeded random orthogonal matrix: QR of a standard-normal matrix with
    /// the sign of each column fixed by the diagonal of R.
    pub fn random(size: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::Config("rotation size must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::<f64>::from_fn(size, size, |_, _| StandardNormal.sample(&mut rng));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..size {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        let data = (0..size)
            .flat_map(|i| (0..size).map(move |j| (i, j)))
            .map(|(i, j)| q[(i, j)])
            .collect();
        Ok(Self { size, data })
    }

    /// Wrap an explicit row-major payload, checking orthogonality.
    pub fn from_row_major(size: usize, data: Vec<f64>) -> Result<Self> {
        if size == 0 || data.len() != size * size {
            return Err(Error::Config(format!(
                "rotation payload has {} entries, expected {}",
                data.len(),
                size * size
            )));
        }
        let rot = Self { size, data };
        let err = rot.orthogonality_error();
        if !(err <= 1e-10) {
            return Err(Error::Config(format!("rotation is not orthogonal (error {err:e})")));
        }
        Ok(rot)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    /// `R * z`.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.size);
        self.data
            .chunks_exact(self.size)
            .map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `max |R Rᵀ - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.size;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.get(i, k) * self.get(j, k)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        DMatrix::from_row_slice(self.size, self.size, &self.data).determinant()
    }
}

/// Seeded `m × m` orthogonal matrix.
pub fn make_rotation(m: usize, seed: u64) -> Result<Rotation> {
    Rotation::random(m, seed)
}
