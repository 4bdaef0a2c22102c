//! The Hilbert C*-module `E = M_{m×n}(C)` over `A = M_n(C)`, with
//! `⟨x, y⟩ = x*y` and `x.a = xa`.
//!
//! Operators on `E` are stored as `(mn)×(mn)` matrices acting on the
//! column-major vectorization of `E` (index `i + j·m` for entry `(i, j)`).
//! Left multiplication by `M` is then `I_n ⊗ M` and right multiplication by
//! `a` is `aᵀ ⊗ I_m`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::cstar_algebra::{
    self, check_finite, hermitian_eigen, kron, loewner_margin, spectral_norm, AlgebraElement, Mat,
    C64, ONE,
};
use crate::error::{Error, Result};
use crate::sampling::gaussian_matrix;
use crate::tolerance::ToleranceConfig;

/// The pair `(E, A) = (M_{m×n}, M_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleSpace {
    m: usize,
    n: usize,
}

impl ModuleSpace {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::dims("m, n >= 1", format!("{m}x{n}")));
        }
        Ok(Self { m, n })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Complex dimension `mn` of `E`.
    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    /// Standard basis `e_{ij}` in vectorization order.
    pub fn basis(&self) -> impl Iterator<Item = ModuleElement> + '_ {
        (0..self.dim()).map(move |k| ModuleElement::basis(*self, k))
    }

    fn check(&self, x: &ModuleElement) -> Result<()> {
        if x.space() != *self {
            return Err(Error::dims(self, x.space()));
        }
        Ok(())
    }
}

impl fmt::Display for ModuleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

/// An element of `E = M_{m×n}(C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement(Mat);

impl ModuleElement {
    pub fn new(matrix: Mat) -> Result<Self> {
        ModuleSpace::new(matrix.nrows(), matrix.ncols())?;
        check_finite(&matrix)?;
        Ok(Self(matrix))
    }

    pub(crate) fn from_raw(matrix: Mat) -> Self {
        Self(matrix)
    }

    /// Builds an element from row-major entries.
    pub fn from_rows(m: usize, n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != m * n {
            return Err(Error::dims(format!("{} entries", m * n), entries.len()));
        }
        Self::new(Mat::from_row_slice(m, n, entries))
    }

    pub fn zeros(space: ModuleSpace) -> Self {
        Self(Mat::zeros(space.m, space.n))
    }

    /// `k`-th standard basis element in vectorization order.
    pub fn basis(space: ModuleSpace, k: usize) -> Self {
        let mut e = Mat::zeros(space.m, space.n);
        e[(k % space.m, k / space.m)] = ONE;
        Self(e)
    }

    /// Inverse of [`ModuleElement::vectorize`].
    pub fn from_vec(space: ModuleSpace, v: &[C64]) -> Result<Self> {
        if v.len() != space.dim() {
            return Err(Error::dims(space.dim(), v.len()));
        }
        Self::new(Mat::from_column_slice(space.m, space.n, v))
    }

    pub fn space(&self) -> ModuleSpace {
        ModuleSpace {
            m: self.0.nrows(),
            n: self.0.ncols(),
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.0
    }

    pub fn into_matrix(self) -> Mat {
        self.0
    }

    /// Column-major vectorization.
    pub fn vectorize(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(self.0.as_slice())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `‖self − other‖` in the module norm.
    pub fn distance(&self, other: &Self) -> f64 {
        spectral_norm(&(&self.0 - &other.0))
    }
}

impl Add for &ModuleElement {
    type Output = ModuleElement;
    fn add(self, rhs: Self) -> ModuleElement {
        ModuleElement(&self.0 + &rhs.0)
    }
}

impl Sub for &ModuleElement {
    type Output = ModuleElement;
    fn sub(self, rhs: Self) -> ModuleElement {
        ModuleElement(&self.0 - &rhs.0)
    }
}

impl Neg for &ModuleElement {
    type Output = ModuleElement;
    fn neg(self) -> ModuleElement {
        ModuleElement(-&self.0)
    }
}

/// Structural knowledge about a [`ModuleOperator`], used for closed-form
/// application and exact adjoints.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorTag {
    Generic,
    /// `z ↦ M z` for an `m×m` matrix `M`.
    LeftMultiplier(Mat),
    /// `z ↦ z a` for an `n×n` matrix `a`.
    RightMultiplier(Mat),
}

/// A complex-linear operator on `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleOperator {
    space: ModuleSpace,
    matrix: Mat,
    tag: OperatorTag,
}

impl ModuleOperator {
    pub fn generic(space: ModuleSpace, matrix: Mat) -> Result<Self> {
        if matrix.shape() != (space.dim(), space.dim()) {
            return Err(Error::dims(
                format!("{0}x{0}", space.dim()),
                format!("{}x{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        check_finite(&matrix)?;
        Ok(Self {
            space,
            matrix,
            tag: OperatorTag::Generic,
        })
    }

    /// Operator whose columns are the images of the standard basis under `f`.
    /// `f` must be complex-linear for the result to represent it.
    pub fn from_linear_map(
        space: ModuleSpace,
        f: impl Fn(&ModuleElement) -> Result<ModuleElement>,
    ) -> Result<Self> {
        let d = space.dim();
        let mut matrix = Mat::zeros(d, d);
        for (k, e) in space.basis().enumerate() {
            let image = f(&e)?;
            space.check(&image)?;
            matrix.set_column(k, &image.vectorize());
        }
        Ok(Self {
            space,
            matrix,
            tag: OperatorTag::Generic,
        })
    }

    pub fn identity(space: ModuleSpace) -> Self {
        Self {
            space,
            matrix: Mat::identity(space.dim(), space.dim()),
            tag: OperatorTag::LeftMultiplier(Mat::identity(space.m, space.m)),
        }
    }

    pub fn zero(space: ModuleSpace) -> Self {
        Self {
            space,
            matrix: Mat::zeros(space.dim(), space.dim()),
            tag: OperatorTag::LeftMultiplier(Mat::zeros(space.m, space.m)),
        }
    }

    pub fn left_multiplier(space: ModuleSpace, left: &Mat) -> Result<Self> {
        if left.shape() != (space.m, space.m) {
            return Err(Error::dims(
                format!("{0}x{0}", space.m),
                format!("{}x{}", left.nrows(), left.ncols()),
            ));
        }
        check_finite(left)?;
        Ok(Self {
            space,
            matrix: kron(&Mat::identity(space.n, space.n), left),
            tag: OperatorTag::LeftMultiplier(left.clone()),
        })
    }

    pub(crate) fn right_multiplier_raw(space: ModuleSpace, right: &Mat) -> Self {
        Self {
            space,
            matrix: kron(&right.transpose(), &Mat::identity(space.m, space.m)),
            tag: OperatorTag::RightMultiplier(right.clone()),
        }
    }

    /// `z ↦ left · z · right`.
    pub fn two_sided(space: ModuleSpace, left: &Mat, right: &Mat) -> Result<Self> {
        if left.shape() != (space.m, space.m) || right.shape() != (space.n, space.n) {
            return Err(Error::dims(
                format!("{0}x{0} and {1}x{1}", space.m, space.n),
                format!(
                    "{}x{} and {}x{}",
                    left.nrows(),
                    left.ncols(),
                    right.nrows(),
                    right.ncols()
                ),
            ));
        }
        Self::generic(space, kron(&right.transpose(), left))
    }

    pub fn space(&self) -> ModuleSpace {
        self.space
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn tag(&self) -> &OperatorTag {
        &self.tag
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        self.space.check(x)?;
        let v = &self.matrix * x.vectorize();
        Ok(ModuleElement(Mat::from_column_slice(
            self.space.m,
            self.space.n,
            v.as_slice(),
        )))
    }

    /// Applies the tag's closed form, or the matrix for `Generic`.
    pub fn apply_closed_form(&self, x: &ModuleElement) -> Result<ModuleElement> {
        self.space.check(x)?;
        match &self.tag {
            OperatorTag::Generic => self.apply(x),
            OperatorTag::LeftMultiplier(l) => Ok(ModuleElement(l * &x.0)),
            OperatorTag::RightMultiplier(r) => Ok(ModuleElement(&x.0 * r)),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::dims(self.space, other.space));
        }
        let tag = match (&self.tag, &other.tag) {
            (OperatorTag::LeftMultiplier(a), OperatorTag::LeftMultiplier(b)) => {
                OperatorTag::LeftMultiplier(a * b)
            }
            // z ↦ (z b) a = z (b a)
            (OperatorTag::RightMultiplier(a), OperatorTag::RightMultiplier(b)) => {
                OperatorTag::RightMultiplier(b * a)
            }
            _ => OperatorTag::Generic,
        };
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * &other.matrix,
            tag,
        })
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.compose(other)? - &other.compose(self)?)
    }

    pub fn scale(&self, s: C64) -> Self {
        let tag = match &self.tag {
            OperatorTag::Generic => OperatorTag::Generic,
            OperatorTag::LeftMultiplier(l) => OperatorTag::LeftMultiplier(l * s),
            OperatorTag::RightMultiplier(r) => OperatorTag::RightMultiplier(r * s),
        };
        Self {
            space: self.space,
            matrix: &self.matrix * s,
            tag,
        }
    }

    /// Largest singular value of the representation matrix: the operator norm
    /// induced by the Frobenius norm on `E`.
    pub fn rep_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    pub fn rep_distance(&self, other: &Self) -> f64 {
        spectral_norm(&(&self.matrix - &other.matrix))
    }

    /// Residual of the tag's closed form against the matrix on the standard basis.
    pub fn tag_residual(&self) -> f64 {
        self.space
            .basis()
            .map(|e| {
                let a = self.apply(&e).expect("basis lies in space");
                let b = self.apply_closed_form(&e).expect("basis lies in space");
                a.distance(&b)
            })
            .fold(0.0, f64::max)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(self.space, other.space, "operator spaces differ");
        let s = C64::new(sign, 0.0);
        let tag = match (&self.tag, &other.tag) {
            (OperatorTag::LeftMultiplier(a), OperatorTag::LeftMultiplier(b)) => {
                OperatorTag::LeftMultiplier(a + b * s)
            }
            (OperatorTag::RightMultiplier(a), OperatorTag::RightMultiplier(b)) => {
                OperatorTag::RightMultiplier(a + b * s)
            }
            _ => OperatorTag::Generic,
        };
        Self {
            space: self.space,
            matrix: &self.matrix + &other.matrix * s,
            tag,
        }
    }
}

impl Add for &ModuleOperator {
    type Output = ModuleOperator;
    fn add(self, rhs: Self) -> ModuleOperator {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &ModuleOperator {
    type Output = ModuleOperator;
    fn sub(self, rhs: Self) -> ModuleOperator {
        self.combine(rhs, -1.0)
    }
}

impl Mul<C64> for &ModuleOperator {
    type Output = ModuleOperator;
    fn mul(self, s: C64) -> ModuleOperator {
        self.scale(s)
    }
}

// ---------------------------------------------------------------------------

fn same_space(x: &ModuleElement, y: &ModuleElement) -> Result<()> {
    if x.space() != y.space() {
        return Err(Error::dims(x.space(), y.space()));
    }
    Ok(())
}

/// `⟨x, y⟩ = x*y`, conjugate-linear in `x` and linear in `y`.
pub fn inner(x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
    same_space(x, y)?;
    Ok(AlgebraElement::from_raw(x.0.adjoint() * &y.0))
}

/// `x.a = xa`.
pub fn module_action(x: &ModuleElement, a: &AlgebraElement) -> Result<ModuleElement> {
    if x.space().cols() != a.dim() {
        return Err(Error::dims(
            format!("algebra dimension {}", x.space().cols()),
            a.dim(),
        ));
    }
    Ok(ModuleElement(&x.0 * a.matrix()))
}

/// `‖x‖ = ‖⟨x, x⟩‖^{1/2}`, the largest singular value of `x`.
pub fn module_norm(x: &ModuleElement) -> f64 {
    spectral_norm(&x.0)
}

/// The A-valued norm `|x| = ⟨x, x⟩^{1/2}`.
pub fn a_valued_norm(x: &ModuleElement, tol: &ToleranceConfig) -> Result<AlgebraElement> {
    cstar_algebra::sqrt_psd(&inner(x, x)?, tol)
}

/// `θ_{x,y}(z) = x.⟨y, z⟩`, i.e. left multiplication by `x y*`.
pub fn theta(x: &ModuleElement, y: &ModuleElement) -> Result<ModuleOperator> {
    same_space(x, y)?;
    ModuleOperator::left_multiplier(x.space(), &(&x.0 * y.0.adjoint()))
}

/// `R_a(z) = z.a`.
pub fn right_mult(a: &AlgebraElement, space: ModuleSpace) -> Result<ModuleOperator> {
    if a.dim() != space.cols() {
        return Err(Error::dims(
            format!("algebra dimension {}", space.cols()),
            a.dim(),
        ));
    }
    Ok(ModuleOperator::right_multiplier_raw(space, a.matrix()))
}

/// Adjoint with respect to the Frobenius pairing `tr(x*y)`: the conjugate
/// transpose of the representation. This is the only possible A-valued adjoint.
pub fn trace_adjoint(f: &ModuleOperator) -> ModuleOperator {
    let tag = match &f.tag {
        OperatorTag::Generic => OperatorTag::Generic,
        OperatorTag::LeftMultiplier(l) => OperatorTag::LeftMultiplier(l.adjoint()),
        OperatorTag::RightMultiplier(r) => OperatorTag::RightMultiplier(r.adjoint()),
    };
    ModuleOperator {
        space: f.space,
        matrix: f.matrix.adjoint(),
        tag,
    }
}

/// Largest `‖⟨f(x), y⟩ − ⟨x, g(y)⟩‖` over standard basis pairs.
pub fn adjoint_residual(f: &ModuleOperator, g: &ModuleOperator) -> Result<f64> {
    if f.space != g.space {
        return Err(Error::dims(f.space, g.space));
    }
    let basis: Vec<ModuleElement> = f.space.basis().collect();
    let images_f: Vec<ModuleElement> = basis.iter().map(|e| f.apply(e)).collect::<Result<_>>()?;
    let images_g: Vec<ModuleElement> = basis.iter().map(|e| g.apply(e)).collect::<Result<_>>()?;
    let mut worst = 0.0_f64;
    for (x, fx) in basis.iter().zip(&images_f) {
        for (y, gy) in basis.iter().zip(&images_g) {
            let lhs = fx.0.adjoint() * &y.0;
            let rhs = x.0.adjoint() * &gy.0;
            worst = worst.max(spectral_norm(&(lhs - rhs)));
        }
    }
    Ok(worst)
}

/// The adjoint `f*` with `⟨f(x), y⟩ = ⟨x, f*(y)⟩`.
///
/// Left multipliers use their tag directly. Anything else is checked on the
/// standard basis, and `NotAdjointable` is returned when no A-valued adjoint
/// exists (for instance right multiplication by a non-central element).
/// [`trace_adjoint`] gives the Frobenius adjoint unconditionally.
pub fn adjoint_op(f: &ModuleOperator, tol: &ToleranceConfig) -> Result<ModuleOperator> {
    let g = trace_adjoint(f);
    if matches!(f.tag, OperatorTag::LeftMultiplier(_)) {
        return Ok(g);
    }
    let residual = adjoint_residual(f, &g)?;
    if residual > tol.abs_tol * (1.0 + f.rep_norm()) {
        return Err(Error::NotAdjointable { residual });
    }
    Ok(g)
}

/// Largest `‖f(x.a) − f(x).a‖` over standard basis `x ∈ E` and `a ∈ M_n`.
pub fn a_linearity_residual(f: &ModuleOperator) -> f64 {
    let space = f.space;
    let n = space.cols();
    let mut worst = 0.0_f64;
    for x in space.basis() {
        let fx = f.apply(&x).expect("basis lies in space");
        for k in 0..n * n {
            let mut a = Mat::zeros(n, n);
            a[(k % n, k / n)] = ONE;
            let lhs = f.apply(&ModuleElement(&x.0 * &a)).expect("same space");
            let rhs = &fx.0 * &a;
            worst = worst.max(spectral_norm(&(&lhs.0 - rhs)));
        }
    }
    worst
}

/// Whether `f(x.a) = f(x).a` on all standard basis pairs within `abs_tol`.
pub fn is_a_linear(f: &ModuleOperator, tol: &ToleranceConfig) -> bool {
    match f.tag {
        OperatorTag::LeftMultiplier(_) => true,
        _ => a_linearity_residual(f) <= tol.abs_tol * (1.0 + f.rep_norm()),
    }
}

/// Positivity of an adjointable A-map, decided two ways that must agree:
/// the spectrum of its left-multiplier matrix, and the A-valued quadratic form
/// `⟨x, f(x)⟩ ⪰ 0` over probes. Probes are the standard basis, `sample_count`
/// Gaussian draws, and Ritz vectors of a Krylov space built from applications
/// of `f` alone. Disagreement is an `InternalInconsistency`.
pub fn is_positive_op<R: Rng + ?Sized>(
    f: &ModuleOperator,
    tol: &ToleranceConfig,
    rng: &mut R,
) -> Result<bool> {
    if !is_a_linear(f, tol) {
        return Err(Error::NotALinear {
            residual: a_linearity_residual(f),
        });
    }
    adjoint_op(f, tol)?;
    let spectral = spectral_positivity(f, tol);
    let sampled = sampled_positivity(f, tol, rng)?;
    if spectral != sampled {
        return Err(Error::InternalInconsistency { spectral, sampled });
    }
    Ok(spectral)
}

/// The `m×m` matrix `M` with `f = L_M`, read off the first diagonal block.
pub(crate) fn left_matrix(f: &ModuleOperator) -> Mat {
    match &f.tag {
        OperatorTag::LeftMultiplier(l) => l.clone(),
        _ => {
            let m = f.space.rows();
            f.matrix.view((0, 0), (m, m)).into_owned()
        }
    }
}

fn spectral_positivity(f: &ModuleOperator, tol: &ToleranceConfig) -> bool {
    let l = left_matrix(f);
    cstar_algebra::ensure_hermitian(&l, tol.abs_tol).is_ok()
        && hermitian_eigen(&l).0[0] >= -tol.abs_tol
}

fn quadratic_form_ok(f: &ModuleOperator, x: &ModuleElement, tol: &ToleranceConfig) -> Result<bool> {
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Ok(true);
    }
    let x = x.scale(C64::new(1.0 / norm, 0.0));
    let form = x.0.adjoint() * f.apply(&x)?.0;
    let zero = Mat::zeros(form.nrows(), form.ncols());
    match loewner_margin(&form, &zero, tol) {
        Ok(margin) => Ok(margin >= -tol.abs_tol * (1.0 + spectral_norm(&form))),
        Err(Error::NotHermitian { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

fn sampled_positivity<R: Rng + ?Sized>(
    f: &ModuleOperator,
    tol: &ToleranceConfig,
    rng: &mut R,
) -> Result<bool> {
    let space = f.space;
    for x in space.basis() {
        if !quadratic_form_ok(f, &x, tol)? {
            return Ok(false);
        }
    }
    for _ in 0..tol.sample_count {
        let x = ModuleElement(gaussian_matrix(rng, space.rows(), space.cols()));
        if !quadratic_form_ok(f, &x, tol)? {
            return Ok(false);
        }
    }
    for x in krylov_ritz_probes(f, rng)? {
        if !quadratic_form_ok(f, &x, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Ritz vectors of `f` on the Krylov space of a random vector, each placed in
/// the first column of an otherwise zero element.
fn krylov_ritz_probes<R: Rng + ?Sized>(
    f: &ModuleOperator,
    rng: &mut R,
) -> Result<Vec<ModuleElement>> {
    let space = f.space;
    let m = space.rows();
    let embed = |v: &nalgebra::DVector<C64>| {
        let mut e = Mat::zeros(m, space.cols());
        e.set_column(0, v);
        ModuleElement(e)
    };
    let act = |v: &nalgebra::DVector<C64>| -> Result<nalgebra::DVector<C64>> {
        Ok(f.apply(&embed(v))?.0.column(0).into_owned())
    };

    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(m);
    let mut v = gaussian_matrix(rng, m, 1).column(0).into_owned();
    while basis.len() < m {
        for q in &basis {
            let proj = q.dotc(&v);
            v -= q * proj;
        }
        let norm = v.norm();
        if norm < 1e-10 {
            // Krylov space exhausted; restart from a fresh direction.
            v = gaussian_matrix(rng, m, 1).column(0).into_owned();
            continue;
        }
        v /= C64::new(norm, 0.0);
        basis.push(v.clone());
        v = act(&v)?;
    }

    let k = basis.len();
    let images: Vec<_> = basis.iter().map(&act).collect::<Result<_>>()?;
    let projected = Mat::from_fn(k, k, |i, j| basis[i].dotc(&images[j]));
    let (_, ritz) = hermitian_eigen(&projected);
    Ok((0..k)
        .map(|s| {
            let mut w = nalgebra::DVector::<C64>::zeros(m);
            for (i, q) in basis.iter().enumerate() {
                w += q * ritz[(i, s)];
            }
            embed(&w)
        })
        .collect())
}

/// Minimum eigenvalue of `‖⟨x,x⟩‖·⟨y,y⟩ − ⟨y,x⟩⟨x,y⟩`, nonnegative up to rounding.
pub fn cauchy_schwarz_residual(x: &ModuleElement, y: &ModuleElement) -> Result<f64> {
    same_space(x, y)?;
    let xx = x.0.adjoint() * &x.0;
    let yy = y.0.adjoint() * &y.0;
    let xy = x.0.adjoint() * &y.0;
    let diff = yy * C64::new(spectral_norm(&xx), 0.0) - xy.adjoint() * &xy;
    Ok(cstar_algebra::min_eigenvalue(&diff))
}
