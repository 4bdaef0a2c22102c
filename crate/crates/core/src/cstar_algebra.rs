//! The C*-algebra `A = M_n(C)`: adjoints, spectral norms, Hermitian spectra,
//! PSD square roots, inverses, unitary exponentials and the Loewner order.
//!
//! Hermitian checks are relative: `a` passes when `‖a − a*‖ ≤ abs_tol·(1 + ‖a‖)`.
//! Square roots clip eigenvalues in `[−eig_clip, 0)` to zero and reject anything
//! more negative.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

pub type C64 = Complex<f64>;
/// Dense complex matrix, column-major.
pub type Mat = DMatrix<C64>;

pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// An element of `M_n(C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement(Mat);

impl AlgebraElement {
    pub fn new(matrix: Mat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::dims("n >= 1", "0x0"));
        }
        check_finite(&matrix)?;
        Ok(Self(matrix))
    }

    pub(crate) fn from_raw(matrix: Mat) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self(matrix)
    }

    /// Builds an element from row-major entries.
    pub fn from_rows(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::dims(format!("{} entries", n * n), entries.len()));
        }
        Self::new(Mat::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Mat::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(Mat::from_diagonal(&nalgebra::DVector::from_column_slice(
            diag,
        )))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| c64(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_matrix(self) -> Mat {
        self.0
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn is_hermitian(&self, tol: &ToleranceConfig) -> bool {
        ensure_hermitian(&self.0, tol.abs_tol).is_ok()
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 * &rhs.0)
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 + &rhs.0)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        AlgebraElement(&self.0 - &rhs.0)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement(-&self.0)
    }
}

/// Result of [`invert`]: the inverse together with the spectral condition number.
#[derive(Debug, Clone, PartialEq)]
pub struct Inverse {
    pub inverse: AlgebraElement,
    pub condition: f64,
}

pub fn adjoint(a: &AlgebraElement) -> AlgebraElement {
    AlgebraElement(a.0.adjoint())
}

/// Spectral norm, the C*-norm of the matrix model.
pub fn op_norm(a: &AlgebraElement) -> f64 {
    spectral_norm(&a.0)
}

/// Eigenvalues of a Hermitian element in ascending order.
pub fn spectrum_hermitian(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    ensure_hermitian(&a.0, tol.abs_tol)?;
    Ok(hermitian_eigen(&a.0).0)
}

pub fn sqrt_psd(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<AlgebraElement> {
    Ok(AlgebraElement(sqrt_psd_raw(&a.0, tol)?))
}

/// Inverse with condition number. Fails with `Singular` when
/// `σ_min ≤ eig_clip · σ_max`.
pub fn invert(a: &AlgebraElement, tol: &ToleranceConfig) -> Result<Inverse> {
    let svals = a.0.singular_values();
    let (smin, smax) = svals.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &s| {
        (lo.min(s), hi.max(s))
    });
    if smax == 0.0 || smin <= tol.eig_clip * smax {
        return Err(Error::Singular {
            ratio: if smax == 0.0 { 0.0 } else { smin / smax },
        });
    }
    let inverse =
        a.0.clone()
            .try_inverse()
            .ok_or(Error::Singular { ratio: smin / smax })?;
    Ok(Inverse {
        inverse: AlgebraElement(inverse),
        condition: smax / smin,
    })
}

/// `exp(i·t·a)` for Hermitian `a`.
pub fn unitary_exp(a: &AlgebraElement, t: f64, tol: &ToleranceConfig) -> Result<AlgebraElement> {
    ensure_hermitian(&a.0, tol.abs_tol)?;
    Ok(AlgebraElement(unitary_exp_raw(&a.0, t)))
}

/// `a ⪰ b` in the Loewner order, within `abs_tol·(1 + ‖a‖ + ‖b‖)`.
pub fn loewner_geq(a: &AlgebraElement, b: &AlgebraElement, tol: &ToleranceConfig) -> Result<bool> {
    let scale = 1.0 + op_norm(a) + op_norm(b);
    Ok(loewner_margin(&a.0, &b.0, tol)? >= -tol.abs_tol * scale)
}

// ---------------------------------------------------------------------------
// Raw-matrix helpers shared with the module and operator layers.

pub(crate) fn check_finite(m: &Mat) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

pub(crate) fn ensure_hermitian(m: &Mat, abs_tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let defect = spectral_norm(&(m - m.adjoint()));
    let limit = abs_tol * (1.0 + spectral_norm(m));
    if defect > limit || defect.is_nan() {
        return Err(Error::NotHermitian { defect, limit });
    }
    Ok(())
}

pub(crate) fn hermitian_part(m: &Mat) -> Mat {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Ascending eigenvalues and matching orthonormal eigenvectors (as columns) of
/// the Hermitian part of `m`.
pub(crate) fn hermitian_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Mat::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub(crate) fn min_eigenvalue(m: &Mat) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// `U · diag(f(λ)) · U*` for the Hermitian part of `m`.
pub(crate) fn functional_calculus(m: &Mat, f: impl Fn(f64) -> C64) -> Mat {
    let (values, u) = hermitian_eigen(m);
    let mut scaled = u.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let fj = f(lambda);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * u.adjoint()
}

pub(crate) fn sqrt_psd_raw(m: &Mat, tol: &ToleranceConfig) -> Result<Mat> {
    ensure_hermitian(m, tol.abs_tol)?;
    let min_eig = min_eigenvalue(m);
    if min_eig < -tol.eig_clip {
        return Err(Error::NotPositive { min_eig });
    }
    let root = functional_calculus(m, |lambda| c64(lambda.max(0.0).sqrt(), 0.0));
    Ok(hermitian_part(&root))
}

pub(crate) fn unitary_exp_raw(m: &Mat, t: f64) -> Mat {
    functional_calculus(m, |lambda| C64::from_polar(1.0, t * lambda))
}

/// Minimum eigenvalue of `a − b`, which must be Hermitian.
pub(crate) fn loewner_margin(a: &Mat, b: &Mat, tol: &ToleranceConfig) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::dims(
            format!("{}x{}", a.nrows(), a.ncols()),
            format!("{}x{}", b.nrows(), b.ncols()),
        ));
    }
    let diff = a - b;
    let limit_scale = 1.0 + spectral_norm(a) + spectral_norm(b);
    let defect = spectral_norm(&(&diff - diff.adjoint()));
    if defect > tol.abs_tol * limit_scale {
        return Err(Error::NotHermitian {
            defect,
            limit: tol.abs_tol * limit_scale,
        });
    }
    Ok(min_eigenvalue(&diff))
}

pub(crate) fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}
