//! The canonical JB*-triple structure on `E`:
//!
//! ```text
//! 2 {x, y, z} = x.⟨y, z⟩ + z.⟨y, x⟩
//! ```
//!
//! together with box operators `x□y: z ↦ {x, y, z}`, the quadratic map
//! `Q_c(x) = {c, x, c}`, and residual checks for the four triple axioms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cstar_algebra::{
    ensure_hermitian, hermitian_eigen, kron, spectral_norm, unitary_exp_raw, Mat, C64,
};
use crate::error::{Error, Result};
use crate::hilbert_module::{
    inner, module_norm, right_mult, theta, ModuleElement, ModuleOperator, ModuleSpace,
};
use crate::sampling::{gaussian_element, generator};
use crate::tolerance::ToleranceConfig;

/// Deliberate faults, used to show that the verification suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// `2{x,y,z} = x.⟨y,z⟩ − z.⟨y,x⟩`.
    TripleSignFlip,
    /// `B_c(x) = (1 − cc*)^{1/2} x`, dropping the right square-root factor.
    DropSqrtFactor,
}

impl Mutation {
    pub fn name(&self) -> &'static str {
        match self {
            Mutation::TripleSignFlip => "triple-sign-flip",
            Mutation::DropSqrtFactor => "drop-sqrt-factor",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "triple-sign-flip" => Ok(Mutation::TripleSignFlip),
            "drop-sqrt-factor" => Ok(Mutation::DropSqrtFactor),
            other => Err(format!("unknown mutation {other:?}")),
        }
    }
}

/// A module space with its triple product and tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSystem {
    space: ModuleSpace,
    tolerances: ToleranceConfig,
    mutation: Option<Mutation>,
}

/// Spectral facts about `x□x`; see [`TripleSystem::axiom3_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axiom3Report {
    /// `‖x□x − ½(θ_{x,x} + R_{|x|²})‖`.
    pub decomp_residual: f64,
    pub theta_min_eig: f64,
    pub rmult_min_eig: f64,
    pub box_min_eig: f64,
    /// `‖x□x − (x□x)*‖` in the Frobenius-induced sense.
    pub box_hermitian_defect: f64,
    /// Largest `|‖exp(it·x□x) z‖ / ‖z‖ − 1|` over probes `z` and
    /// `t ∈ {±0.5, ±1, ±2}`, in the module norm.
    pub isometry_defect: f64,
}

impl Axiom3Report {
    pub fn passes(&self, tol: &ToleranceConfig) -> bool {
        self.decomp_residual <= tol.abs_tol
            && self.box_hermitian_defect <= tol.abs_tol
            && self.theta_min_eig >= -tol.abs_tol
            && self.rmult_min_eig >= -tol.abs_tol
            && self.box_min_eig >= -tol.abs_tol
            && self.isometry_defect <= tol.composed_tol
    }
}

/// The step values of `‖{x,x,x}‖² = ‖⟨x,x⟩³‖ = ‖⟨x,x⟩‖³ = ‖x‖⁶`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubeNormChain {
    pub cube_norm_squared: f64,
    pub cube_gram_norm: f64,
    pub gram_cubed_norm: f64,
    pub gram_triple_norm: f64,
    pub gram_norm_cubed: f64,
    pub norm_sixth: f64,
}

impl CubeNormChain {
    pub fn values(&self) -> [f64; 6] {
        [
            self.cube_norm_squared,
            self.cube_gram_norm,
            self.gram_cubed_norm,
            self.gram_triple_norm,
            self.gram_norm_cubed,
            self.norm_sixth,
        ]
    }

    /// Largest deviation of a consecutive pair, relative to `1 + ‖x‖⁶`.
    pub fn max_step_residual(&self) -> f64 {
        let v = self.values();
        v.windows(2)
            .map(|w| (w[0] - w[1]).abs())
            .fold(0.0, f64::max)
            / (1.0 + self.norm_sixth)
    }
}

pub(crate) const ISOMETRY_TIMES: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
const ISOMETRY_PROBE_SEED: u64 = 0x5eed_0f15;

impl TripleSystem {
    pub fn new(space: ModuleSpace, tolerances: ToleranceConfig) -> Self {
        Self {
            space,
            tolerances,
            mutation: None,
        }
    }

    pub fn with_mutation(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn space(&self) -> ModuleSpace {
        self.space
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tolerances
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    pub(crate) fn check(&self, xs: &[&ModuleElement]) -> Result<()> {
        for x in xs {
            if x.space() != self.space {
                return Err(Error::dims(self.space, x.space()));
            }
        }
        Ok(())
    }

    /// `{x, y, z} = ½(x·(y*z) + z·(y*x))`.
    pub fn triple_product(
        &self,
        x: &ModuleElement,
        y: &ModuleElement,
        z: &ModuleElement,
    ) -> Result<ModuleElement> {
        self.check(&[x, y, z])?;
        let (x, y, z) = (x.matrix(), y.matrix(), z.matrix());
        let ya = y.adjoint();
        let first = x * (&ya * z);
        let second = z * (&ya * x);
        let sum = match self.mutation {
            Some(Mutation::TripleSignFlip) => first - second,
            _ => first + second,
        };
        Ok(ModuleElement::from_raw(sum * C64::new(0.5, 0.0)))
    }

    /// `x□y: z ↦ {x, y, z}`, assembled from triple products on the standard basis.
    pub fn box_op(&self, x: &ModuleElement, y: &ModuleElement) -> Result<ModuleOperator> {
        self.check(&[x, y])?;
        ModuleOperator::from_linear_map(self.space, |z| self.triple_product(x, y, z))
    }

    /// `½(θ_{x,y} + R_{⟨y,x⟩})`.
    pub fn box_decomposition(
        &self,
        x: &ModuleElement,
        y: &ModuleElement,
    ) -> Result<ModuleOperator> {
        self.check(&[x, y])?;
        let th = theta(x, y)?;
        let r = right_mult(&inner(y, x)?, self.space)?;
        ModuleOperator::generic(self.space, (th.matrix() + r.matrix()) * C64::new(0.5, 0.0))
    }

    /// Distance between `box_op(x, y)` and `½(I_n ⊗ xy* + (y*x)ᵀ ⊗ I_m)`.
    pub fn box_representation_residual(&self, x: &ModuleElement, y: &ModuleElement) -> Result<f64> {
        let b = self.box_op(x, y)?;
        let (m, n) = (self.space.rows(), self.space.cols());
        let (xm, ym) = (x.matrix(), y.matrix());
        let expected = (kron(&Mat::identity(n, n), &(xm * ym.adjoint()))
            + kron(&(ym.adjoint() * xm).transpose(), &Mat::identity(m, m)))
            * C64::new(0.5, 0.0);
        Ok(spectral_norm(&(b.matrix() - expected)))
    }

    /// `‖[a□b, c□d] − ({a,b,c}□d − c□{d,a,b})‖`.
    pub fn jordan_residual(
        &self,
        a: &ModuleElement,
        b: &ModuleElement,
        c: &ModuleElement,
        d: &ModuleElement,
    ) -> Result<f64> {
        self.check(&[a, b, c, d])?;
        let lhs = self.box_op(a, b)?.commutator(&self.box_op(c, d)?)?;
        let abc = self.triple_product(a, b, c)?;
        let dab = self.triple_product(d, a, b)?;
        let rhs = &self.box_op(&abc, d)? - &self.box_op(c, &dab)?;
        Ok(lhs.rep_distance(&rhs))
    }

    /// [`Self::jordan_residual`] divided by `1 + ‖a‖‖b‖‖c‖‖d‖`.
    pub fn jordan_relative_residual(
        &self,
        a: &ModuleElement,
        b: &ModuleElement,
        c: &ModuleElement,
        d: &ModuleElement,
    ) -> Result<f64> {
        let scale = 1.0 + module_norm(a) * module_norm(b) * module_norm(c) * module_norm(d);
        Ok(self.jordan_residual(a, b, c, d)? / scale)
    }

    /// Hermitian positivity of `x□x` and of both summands of its decomposition,
    /// plus the isometry defect of `exp(it·x□x)` in the module norm.
    pub fn axiom3_report(&self, x: &ModuleElement) -> Result<Axiom3Report> {
        self.check(&[x])?;
        let bx = self.box_op(x, x)?;
        let th = theta(x, x)?;
        let gram = inner(x, x)?;
        let r = right_mult(&gram, self.space)?;
        let decomp =
            ModuleOperator::generic(self.space, (th.matrix() + r.matrix()) * C64::new(0.5, 0.0))?;

        let theta_min_eig = checked_min_eig(th.matrix(), self.tolerances.abs_tol)?;
        let rmult_min_eig = checked_min_eig(r.matrix(), self.tolerances.abs_tol)?;
        let box_hermitian_defect = spectral_norm(&(bx.matrix() - bx.matrix().adjoint()));
        let box_min_eig = hermitian_eigen(bx.matrix()).0[0];

        let mut rng = generator(ISOMETRY_PROBE_SEED);
        let probes: Vec<ModuleElement> = self
            .space
            .basis()
            .chain(
                (0..self.tolerances.sample_count).map(|_| gaussian_element(&mut rng, self.space)),
            )
            .collect();
        let mut isometry_defect = 0.0_f64;
        for t in ISOMETRY_TIMES {
            let u = ModuleOperator::generic(self.space, unitary_exp_raw(bx.matrix(), t))?;
            for z in &probes {
                let ratio = module_norm(&u.apply(z)?) / module_norm(z);
                isometry_defect = isometry_defect.max((ratio - 1.0).abs());
            }
        }

        Ok(Axiom3Report {
            decomp_residual: bx.rep_distance(&decomp),
            theta_min_eig,
            rmult_min_eig,
            box_min_eig,
            box_hermitian_defect,
            isometry_defect,
        })
    }

    /// `|‖{x,x,x}‖ − ‖x‖³| / (1 + ‖x‖³)`.
    pub fn cube_identity_residual(&self, x: &ModuleElement) -> Result<f64> {
        let cube = self.triple_product(x, x, x)?;
        let n3 = module_norm(x).powi(3);
        Ok((module_norm(&cube) - n3).abs() / (1.0 + n3))
    }

    pub fn cube_norm_chain(&self, x: &ModuleElement) -> Result<CubeNormChain> {
        let cube = self.triple_product(x, x, x)?;
        let y = inner(x, x)?;
        let ym = y.matrix();
        // A as a module over itself, {y, y, y} = y y* y.
        let a_space = ModuleSpace::new(y.dim(), y.dim())?;
        let y_elem = ModuleElement::from_raw(ym.clone());
        let y_triple = TripleSystem::new(a_space, self.tolerances)
            .with_mutation(self.mutation)
            .triple_product(&y_elem, &y_elem, &y_elem)?;
        let gram_norm = spectral_norm(ym);
        Ok(CubeNormChain {
            cube_norm_squared: module_norm(&cube).powi(2),
            cube_gram_norm: spectral_norm(inner(&cube, &cube)?.matrix()),
            gram_cubed_norm: spectral_norm(&(ym * ym * ym)),
            gram_triple_norm: module_norm(&y_triple),
            gram_norm_cubed: gram_norm.powi(3),
            norm_sixth: module_norm(x).powi(6),
        })
    }

    /// `Q_c(x) = {c, x, c} = c·(x*c)`. Conjugate-linear in `x`.
    pub fn quadratic(&self, c: &ModuleElement, x: &ModuleElement) -> Result<ModuleElement> {
        self.triple_product(c, x, c)
    }

    /// `‖Q_c(Q_c(x)) − (c⊗c*)(x.|c|²)‖ / (1 + ‖c‖⁴‖x‖)`.
    pub fn quadratic_square_residual(&self, c: &ModuleElement, x: &ModuleElement) -> Result<f64> {
        let qq = self.quadratic(c, &self.quadratic(c, x)?)?;
        let cm = c.matrix();
        let expected = cm * cm.adjoint() * x.matrix() * (cm.adjoint() * cm);
        let scale = 1.0 + module_norm(c).powi(4) * module_norm(x);
        Ok(spectral_norm(&(qq.matrix() - expected)) / scale)
    }

    /// `Q_c²` as a complex-linear operator.
    pub fn quadratic_square_op(&self, c: &ModuleElement) -> Result<ModuleOperator> {
        self.check(&[c])?;
        ModuleOperator::from_linear_map(self.space, |x| self.quadratic(c, &self.quadratic(c, x)?))
    }
}

fn checked_min_eig(m: &Mat, abs_tol: f64) -> Result<f64> {
    ensure_hermitian(m, abs_tol)?;
    Ok(hermitian_eigen(m).0[0])
}

/// Convenience for the scalar algebra: the `1×1` element with value `z`.
pub fn scalar_element(z: C64) -> ModuleElement {
    ModuleElement::from_raw(Mat::from_element(1, 1, z))
}
