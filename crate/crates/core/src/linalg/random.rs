//! Seeded, reproducible random instances.
//!
//! The generator is fully specified so other implementations can rebuild the
//! same suites from `(seed, n)`:
//!
//! * stream: SplitMix64 with initial state `seed` (each draw adds
//!   `0x9E3779B97F4A7C15` and applies the standard 30/27/31 finalizer);
//! * uniform: `(next_u64 >> 11) * 2^-53`, in `[0, 1)`;
//! * normal: Box-Muller, one variate per two uniforms,
//!   `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`;
//! * complex normal: `(normal + i normal) / sqrt(2)`, real part drawn first;
//! * matrices are filled row-major.
//!
//! Instance kinds:
//!
//! * `Dense`: `n x n` complex normal entries;
//! * `Unitary`: a `Dense` draw orthonormalized by modified Gram-Schmidt
//!   (two passes, column order);
//! * `Pd`: `G^H G / n + I / spread` for a `Dense` draw `G`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, C64};
use super::power::PdMatrix;
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next_u64() % (hi - lo + 1)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal();
        let im = self.normal();
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Derives a child seed; used for per-instance and per-theorem streams.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut z = parent
        .wrapping_mul(GOLDEN_GAMMA)
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Pd,
    Unitary,
    Dense,
}

pub fn random_instance(n: usize, seed: u64, kind: InstanceKind, spread: f64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    match kind {
        InstanceKind::Dense => Ok(dense(&mut rng, n, n)),
        InstanceKind::Unitary => Ok(unitary(&mut rng, n)),
        InstanceKind::Pd => pd(&mut rng, n, spread).map(|a| a.matrix().clone()),
    }
}

pub fn random_pd(n: usize, seed: u64, spread: f64) -> Result<PdMatrix> {
    if n == 0 {
        return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
    }
    pd(&mut SeededRng::new(seed), n, spread)
}

pub(crate) fn dense(rng: &mut SeededRng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

pub(crate) fn pd(rng: &mut SeededRng, n: usize, spread: f64) -> Result<PdMatrix> {
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::param("spread", spread, "must be positive and finite"));
    }
    let g = dense(rng, n, n);
    let gram = (&g.adjoint() * &g).scale(1.0 / n as f64);
    let shift = DenseMatrix::identity(n).scale(1.0 / spread);
    PdMatrix::new((&gram + &shift).hermitian_part())
}

pub(crate) fn unitary(rng: &mut SeededRng, n: usize) -> DenseMatrix {
    let mut q = dense(rng, n, n);
    for _pass in 0..2 {
        for j in 0..n {
            for k in 0..j {
                let proj: C64 = (0..n).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..n {
                    let qik = q[(i, k)];
                    q[(i, j)] -= proj * qik;
                }
            }
            let norm = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                q[(i, j)] /= norm;
            }
        }
    }
    q
}
