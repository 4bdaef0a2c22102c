//! Seeded random instance generation.
//!
//! All randomness flows through [`ChaCha8Rng`], whose output stream is fixed
//! across platforms. Per-trial generators are derived from a tuple of labels so
//! results do not depend on evaluation order.

use nalgebra::linalg::{QR, SVD};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ball_geometry::BallPoint;
use crate::cstar_algebra::{c64, Mat, C64};
use crate::hilbert_module::{module_norm, ModuleElement, ModuleSpace};

pub type Generator = ChaCha8Rng;

/// Radius cap used by [`generate_ball_point`].
pub const BALL_RADIUS: f64 = 0.95;

pub fn generator(seed: u64) -> Generator {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for one trial, keyed by `(seed, labels, space, trial)`.
pub fn trial_generator(seed: u64, labels: &[&str], space: ModuleSpace, trial: u64) -> Generator {
    let mut h = Fnv::new();
    h.write(&seed.to_le_bytes());
    for l in labels {
        h.write(l.as_bytes());
        h.write(&[0xff]);
    }
    h.write(&(space.rows() as u64).to_le_bytes());
    h.write(&(space.cols() as u64).to_le_bytes());
    h.write(&trial.to_le_bytes());
    ChaCha8Rng::seed_from_u64(h.finish())
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Standard complex Gaussian sample (`E|z|² = 1`).
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of independent standard complex Gaussians, filled column by column.
pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat {
    let mut m = Mat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

pub fn gaussian_element<R: rand::Rng + ?Sized>(rng: &mut R, space: ModuleSpace) -> ModuleElement {
    ModuleElement::from_raw(gaussian_matrix(rng, space.rows(), space.cols()))
}

/// Gaussian direction rescaled to a norm drawn uniformly from `[0, max_radius]`.
pub fn gaussian_in_ball<R: rand::Rng + ?Sized>(
    rng: &mut R,
    space: ModuleSpace,
    max_radius: f64,
) -> ModuleElement {
    let x = gaussian_element(rng, space);
    let r = rng.random_range(0.0..=max_radius);
    let norm = module_norm(&x);
    if norm == 0.0 {
        return ModuleElement::zeros(space);
    }
    x.scale(c64(r / norm, 0.0))
}

/// Ball point with norm uniform on `[0, 0.95]`.
pub fn generate_ball_point<R: rand::Rng + ?Sized>(rng: &mut R, space: ModuleSpace) -> BallPoint {
    BallPoint::new_unchecked(gaussian_in_ball(rng, space, BALL_RADIUS))
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase correction.
pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let qr = QR::new(gaussian_matrix(rng, n, n));
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            c64(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian `n×n` matrix `(G + G*)/2`.
pub fn random_hermitian<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

/// Random partial isometry: singular values of a Gaussian matrix snapped to
/// 1 above 0.5 and to 0 below.
pub fn random_tripotent<R: rand::Rng + ?Sized>(rng: &mut R, space: ModuleSpace) -> ModuleElement {
    let g = gaussian_matrix(rng, space.rows(), space.cols());
    let svd = SVD::new(g, true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut c = Mat::zeros(space.rows(), space.cols());
    for s in 0..k {
        if svd.singular_values[s] > 0.5 {
            c += u.column(s) * vt.row(s);
        }
    }
    ModuleElement::from_raw(c)
}

/// Random element of maximal rank with all nonzero singular values equal to 1:
/// `c*c = 1` when `m ≥ n`, `cc* = 1` when `m ≤ n`.
pub fn random_full_partial_isometry<R: rand::Rng + ?Sized>(
    rng: &mut R,
    space: ModuleSpace,
) -> ModuleElement {
    let g = gaussian_matrix(rng, space.rows(), space.cols());
    let svd = SVD::new(g, true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    ModuleElement::from_raw(u * vt)
}
