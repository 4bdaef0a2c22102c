//! The property registry.
//!
//! Thresholds are multiples of the configured tolerances. At the defaults
//! (`abs_tol = 1e-10`, `composed_tol = 1e-8`) `TIGHT` gives 1e-12 and
//! `JORDAN` gives 1e-9 relative.

use std::f64::consts::PI;

use rand::RngExt;

use crate::ball_geometry::{
    apply_automorphism, bergmann, bergmann_factored, bergmann_sqrt, isometry_defect,
    mobius_denominator, transvect_inverse_check, BallPoint, Transvection,
};
use crate::cstar_algebra::{
    c64, loewner_margin, spectral_norm, sqrt_psd_raw, unitary_exp_raw, AlgebraElement, Mat, C64,
};
use crate::error::{Error, Result};
use crate::extremal::classify;
use crate::hilbert_module::{
    a_linearity_residual, adjoint_op, cauchy_schwarz_residual, inner, is_positive_op,
    module_action, module_norm, right_mult, theta, ModuleElement, ModuleOperator, ModuleSpace,
};
use crate::jb_triple::TripleSystem;
use crate::sampling::{
    gaussian_in_ball, gaussian_matrix, generator, random_full_partial_isometry, random_hermitian,
    random_tripotent, random_unitary, Generator, BALL_RADIUS,
};

use super::Suite;

const TIGHT: f64 = 1e-2;
const JORDAN: f64 = 10.0;
/// Radius cap for the bulk invertibility check of `1 + ⟨c, x⟩`.
const DENOMINATOR_RADIUS: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Outcome {
    pub fn at_most(residual: f64, threshold: f64) -> Self {
        Self {
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }

    /// Strict inequality `residual < threshold`.
    pub fn below(residual: f64, threshold: f64) -> Self {
        Self {
            residual,
            threshold,
            pass: residual < threshold,
        }
    }

    pub fn holds(ok: bool) -> Self {
        Self {
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            pass: ok,
        }
    }

    pub fn error() -> Self {
        Self {
            residual: f64::INFINITY,
            threshold: f64::NAN,
            pass: false,
        }
    }
}

/// How many trials a property runs per dimension pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialPlan {
    /// The configured trial count.
    PerConfig,
    /// A multiple of the configured trial count.
    Scaled(u64),
    /// A fixed enumeration (grids), independent of the configuration.
    Fixed(u64),
}

impl TrialPlan {
    pub fn count(&self, configured: u64) -> u64 {
        match *self {
            TrialPlan::PerConfig => configured,
            TrialPlan::Scaled(k) => k * configured,
            TrialPlan::Fixed(n) => n,
        }
    }
}

type DrawFn = fn(&mut Generator, ModuleSpace, u64) -> Vec<Mat>;
type CheckFn = fn(&TripleSystem, &[Mat]) -> Result<Outcome>;

#[derive(Clone)]
pub struct Property {
    pub name: &'static str,
    pub suite: Suite,
    pub anchor: &'static str,
    /// Labels of the instance matrices, in order.
    pub slots: &'static [&'static str],
    pub trials: TrialPlan,
    pub applies: fn(ModuleSpace) -> bool,
    pub draw: DrawFn,
    pub check: CheckFn,
}

impl std::fmt::Debug for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Property")
            .field("name", &self.name)
            .field("suite", &self.suite)
            .field("trials", &self.trials)
            .finish()
    }
}

fn everywhere(_: ModuleSpace) -> bool {
    true
}

fn scalar_only(s: ModuleSpace) -> bool {
    s.rows() == 1 && s.cols() == 1
}

pub fn find_property(name: &str) -> Option<Property> {
    all_properties().into_iter().find(|p| p.name == name)
}

macro_rules! prop {
    ($name:literal, $suite:ident, $anchor:literal, [$($slot:literal),*], $trials:expr, $applies:expr, $draw:expr, $check:expr) => {
        Property {
            name: $name,
            suite: Suite::$suite,
            anchor: $anchor,
            slots: &[$($slot),*],
            trials: $trials,
            applies: $applies,
            draw: $draw,
            check: $check,
        }
    };
}

pub fn all_properties() -> Vec<Property> {
    use TrialPlan::*;
    vec![
        // module
        prop!(
            "module.inner_sesquilinear",
            Module,
            "<x, ay+bz> = a<x,y> + b<x,z>; <ax, y> = conj(a)<x,y>",
            ["x", "y", "z", "coefficients"],
            PerConfig,
            everywhere,
            draw_xyz_coeffs,
            check_inner_sesquilinear
        ),
        prop!(
            "module.inner_module_map",
            Module,
            "<x, y.a> = <x,y> a",
            ["x", "y", "a"],
            PerConfig,
            everywhere,
            draw_xya,
            check_inner_module_map
        ),
        prop!(
            "module.inner_hermitian",
            Module,
            "<y,x> = <x,y>*",
            ["x", "y"],
            PerConfig,
            everywhere,
            draw_xy,
            check_inner_hermitian
        ),
        prop!(
            "module.inner_positive_definite",
            Module,
            "<x,x> >= 0, and <x,x> = 0 only for x = 0",
            ["x"],
            PerConfig,
            everywhere,
            draw_x_sometimes_zero,
            check_inner_positive
        ),
        prop!(
            "module.action_compatibility",
            Module,
            "(lx).a = x.(la) = l(x.a); (x.a).b = x.(ab); |x.a| <= |x||a|",
            ["x", "a", "b", "lambda"],
            PerConfig,
            everywhere,
            draw_xab_lambda,
            check_action_compat
        ),
        prop!(
            "module.cauchy_schwarz",
            Module,
            "<y,x><x,y> <= |<x,x>| <y,y>",
            ["x", "y"],
            PerConfig,
            everywhere,
            draw_xy,
            check_cauchy_schwarz
        ),
        prop!(
            "module.norm_continuity",
            Module,
            "|<x,y>| <= |x||y|; |x.a| <= |x| || |a| ||; |x+y| <= |x|+|y|",
            ["x", "y", "a"],
            PerConfig,
            everywhere,
            draw_xya,
            check_norm_continuity
        ),
        prop!(
            "module.a_valued_norm_bounds",
            Module,
            "abs<x,y> <= |x| abs(y); abs<y,x> <= abs(x) |y|; || abs(x) || = |x|",
            ["x", "y"],
            PerConfig,
            everywhere,
            draw_xy,
            check_a_valued_bounds
        ),
        prop!(
            "module.positivity_agreement",
            Module,
            "f >= 0 in A(E) iff <x, f(x)> >= 0 for all x",
            ["left_matrix"],
            PerConfig,
            everywhere,
            draw_selfadjoint_left,
            check_positivity_agreement
        ),
        prop!(
            "module.theta_adjoint",
            Module,
            "theta_{x,y}* = theta_{y,x}; theta_{x,y} is an A-map",
            ["x", "y"],
            PerConfig,
            everywhere,
            draw_xy,
            check_theta_adjoint
        ),
        prop!(
            "module.right_multiplication",
            Module,
            "R_a R_b = R_{ba}; exp(it R_{|x|^2}) w = w.exp(it|x|^2) is isometric",
            ["a", "b", "x", "w"],
            PerConfig,
            everywhere,
            draw_right_mult,
            check_right_mult
        ),
        // axioms
        prop!(
            "axioms.triple_symmetry_linearity",
            Axioms,
            "{x,y,z} = {z,y,x}; linear in x, z; conjugate-linear in y",
            ["x", "y", "z", "w", "coefficients"],
            PerConfig,
            everywhere,
            draw_xyzw_coeffs,
            check_triple_linearity
        ),
        prop!(
            "axioms.jordan_identity",
            Axioms,
            "[a□b, c□d] = {a,b,c}□d - c□{d,a,b}",
            ["a", "b", "c", "d"],
            PerConfig,
            everywhere,
            draw_abcd,
            check_jordan
        ),
        prop!(
            "axioms.box_hermitian_positive",
            Axioms,
            "x□x = (theta_{x,x} + R_{|x|^2})/2 is hermitian with spectrum >= 0",
            ["x"],
            PerConfig,
            everywhere,
            draw_x,
            check_axiom3
        ),
        prop!(
            "axioms.cube_identity",
            Axioms,
            "|{x,x,x}| = |x|^3",
            ["x"],
            PerConfig,
            everywhere,
            draw_x,
            check_cube_identity
        ),
        prop!(
            "axioms.cube_norm_chain",
            Axioms,
            "|{x,x,x}|^2 = |<x,x>^3| = |<x,x>|^3 = |x|^6",
            ["x"],
            PerConfig,
            everywhere,
            draw_x,
            check_cube_chain
        ),
        prop!(
            "axioms.box_representation",
            Axioms,
            "x□y = (I ⊗ xy* + (y*x)^T ⊗ I)/2 = (theta_{x,y} + R_{<y,x>})/2",
            ["x", "y"],
            PerConfig,
            everywhere,
            draw_xy,
            check_box_representation
        ),
        prop!(
            "axioms.quadratic_square",
            Axioms,
            "Q_c^2(x) = (c c*)(x.|c|^2)",
            ["c", "x"],
            PerConfig,
            everywhere,
            draw_xy,
            check_quadratic_square
        ),
        // ball
        prop!(
            "ball.bergmann_factored",
            Ball,
            "x - 2{c,c,x} + Q_c^2 x = (1 - cc*) x (1 - |c|^2)",
            ["c"],
            PerConfig,
            everywhere,
            draw_ball_c,
            check_bergmann_factored
        ),
        prop!(
            "ball.bergmann_sqrt_square",
            Ball,
            "B_c(B_c(x)) = B(c,c) x",
            ["c"],
            PerConfig,
            everywhere,
            draw_ball_c,
            check_bergmann_sqrt
        ),
        prop!(
            "ball.transvection_origin",
            Ball,
            "g_c(0) = c",
            ["c"],
            PerConfig,
            everywhere,
            draw_ball_c,
            check_transvection_origin
        ),
        prop!(
            "ball.scalar_mobius",
            Ball,
            "g_c(x) = (x + c)/(1 + conj(c) x) in the disc",
            ["c", "x"],
            Fixed(400),
            scalar_only,
            draw_disc_grid_pair,
            check_scalar_mobius
        ),
        prop!(
            "ball.ball_preservation",
            Ball,
            "|g_c(x)| < 1 for |c|, |x| < 1",
            ["c", "x"],
            Scaled(10),
            everywhere,
            draw_ball_pair,
            check_ball_preservation
        ),
        prop!(
            "ball.transvection_inverse",
            Ball,
            "g_{-c}(g_c(x)) = x",
            ["c", "x"],
            Scaled(10),
            everywhere,
            draw_ball_pair,
            check_transvection_inverse
        ),
        prop!(
            "ball.denominator_invertible",
            Ball,
            "1 + <c,x> is invertible for |c|, |x| < 1",
            ["c", "x"],
            Scaled(100),
            everywhere,
            draw_near_boundary_pair,
            check_denominator
        ),
        prop!(
            "ball.automorphism",
            Ball,
            "h = L o g_c maps the ball into itself for isometric L",
            ["c", "x", "u", "v"],
            PerConfig,
            everywhere,
            draw_automorphism,
            check_automorphism
        ),
        // extreme
        prop!(
            "extreme.tripotent_necessity",
            Extreme,
            "every extreme point is a tripotent: c = c.<c,c>",
            ["c"],
            PerConfig,
            everywhere,
            draw_tripotent_or_full,
            check_tripotent_necessity
        ),
        prop!(
            "extreme.families_are_extreme",
            Extreme,
            "c*c = 1 or cc* = 1 implies B(c,c) = 0",
            ["c"],
            PerConfig,
            everywhere,
            draw_full,
            check_families
        ),
        prop!(
            "extreme.unitary_invariance",
            Extreme,
            "B(ucv, ucv) = 0 iff B(c,c) = 0 for unitary u, v",
            ["c", "u", "v"],
            PerConfig,
            everywhere,
            draw_tripotent_unitaries,
            check_unitary_invariance
        ),
        prop!(
            "extreme.disc_brute_force",
            Extreme,
            "in the disc, B(c,c) = 0 iff c is a convex extreme point",
            ["c"],
            Fixed(DISC_RADII.len() as u64 * DISC_ANGLES),
            scalar_only,
            draw_disc_ring_point,
            check_disc_brute_force
        ),
        prop!(
            "extreme.outside_families",
            Extreme,
            "extreme points lie in {c*c = 1} or {cc* = 1}",
            ["c"],
            Scaled(10),
            everywhere,
            draw_tripotent,
            check_outside_families
        ),
    ]
}

// ---------------------------------------------------------------------------
// Instance decoding.

fn slots(inst: &[Mat], k: usize) -> Result<()> {
    if inst.len() != k {
        return Err(Error::Fixture {
            line: 0,
            message: format!("expected {k} matrices, found {}", inst.len()),
        });
    }
    Ok(())
}

fn shaped(m: &Mat, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::Fixture {
            line: 0,
            message: format!(
                "{what}: expected {rows}x{cols}, found {}x{}",
                m.nrows(),
                m.ncols()
            ),
        });
    }
    Ok(())
}

fn elem(sys: &TripleSystem, m: &Mat) -> Result<ModuleElement> {
    let s = sys.space();
    shaped(m, s.rows(), s.cols(), "module element")?;
    ModuleElement::new(m.clone())
}

fn alg(sys: &TripleSystem, m: &Mat) -> Result<AlgebraElement> {
    let n = sys.space().cols();
    shaped(m, n, n, "algebra element")?;
    AlgebraElement::new(m.clone())
}

fn square(m: &Mat, k: usize) -> Result<Mat> {
    shaped(m, k, k, "square matrix")?;
    Ok(m.clone())
}

fn coeffs(m: &Mat, k: usize) -> Result<Vec<C64>> {
    shaped(m, 1, k, "coefficients")?;
    Ok(m.iter().copied().collect())
}

fn ball(sys: &TripleSystem, m: &Mat) -> Result<BallPoint> {
    BallPoint::new(elem(sys, m)?, sys.tolerances())
}

fn dist(a: &Mat, b: &Mat) -> f64 {
    spectral_norm(&(a - b))
}

fn abs_tol(sys: &TripleSystem) -> f64 {
    sys.tolerances().abs_tol
}

// ---------------------------------------------------------------------------
// Draws.

fn g(rng: &mut Generator, s: ModuleSpace) -> Mat {
    gaussian_matrix(rng, s.rows(), s.cols())
}

fn ga(rng: &mut Generator, s: ModuleSpace) -> Mat {
    gaussian_matrix(rng, s.cols(), s.cols())
}

fn draw_x(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![g(rng, s)]
}

fn draw_xy(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![g(rng, s), g(rng, s)]
}

fn draw_xya(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![g(rng, s), g(rng, s), ga(rng, s)]
}

fn draw_xyz_coeffs(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![g(rng, s), g(rng, s), g(rng, s), gaussian_matrix(rng, 1, 2)]
}

fn draw_xyzw_coeffs(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![
        g(rng, s),
        g(rng, s),
        g(rng, s),
        g(rng, s),
        gaussian_matrix(rng, 1, 2),
    ]
}

fn draw_abcd(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    (0..4).map(|_| g(rng, s)).collect()
}

fn draw_x_sometimes_zero(rng: &mut Generator, s: ModuleSpace, trial: u64) -> Vec<Mat> {
    let x = g(rng, s);
    if trial.is_multiple_of(10) {
        vec![Mat::zeros(s.rows(), s.cols())]
    } else {
        vec![x]
    }
}

fn draw_xab_lambda(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![
        g(rng, s),
        ga(rng, s),
        ga(rng, s),
        gaussian_matrix(rng, 1, 1),
    ]
}

/// Positive, indefinite and rank-deficient positive left multipliers in turn.
fn draw_selfadjoint_left(rng: &mut Generator, s: ModuleSpace, trial: u64) -> Vec<Mat> {
    let m = s.rows();
    let left = match trial % 3 {
        0 => {
            let b = gaussian_matrix(rng, m, m);
            &b * b.adjoint()
        }
        1 => random_hermitian(rng, m),
        _ => {
            let b = gaussian_matrix(rng, m, m.saturating_sub(1).max(1));
            let p = &b * b.adjoint();
            if m == 1 {
                -p
            } else {
                p
            }
        }
    };
    vec![left]
}

fn draw_right_mult(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![ga(rng, s), ga(rng, s), g(rng, s), g(rng, s)]
}

fn draw_ball_c(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![gaussian_in_ball(rng, s, BALL_RADIUS).into_matrix()]
}

fn draw_ball_pair(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![
        gaussian_in_ball(rng, s, BALL_RADIUS).into_matrix(),
        gaussian_in_ball(rng, s, BALL_RADIUS).into_matrix(),
    ]
}

fn draw_near_boundary_pair(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![
        gaussian_in_ball(rng, s, DENOMINATOR_RADIUS).into_matrix(),
        gaussian_in_ball(rng, s, DENOMINATOR_RADIUS).into_matrix(),
    ]
}

/// Twenty points filling the disc of radius 0.9 (a sunflower spiral reaching
/// the rim).
pub(crate) fn disc_grid_point(k: u64) -> C64 {
    let r = 0.9 * ((k + 1) as f64 / 20.0).sqrt();
    let golden = PI * (3.0 - 5f64.sqrt());
    C64::from_polar(r, golden * k as f64)
}

fn draw_disc_grid_pair(_: &mut Generator, _: ModuleSpace, trial: u64) -> Vec<Mat> {
    let c = disc_grid_point(trial / 20);
    let x = disc_grid_point(trial % 20);
    vec![Mat::from_element(1, 1, c), Mat::from_element(1, 1, x)]
}

fn draw_automorphism(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    let (c, x) = {
        let v = draw_ball_pair(rng, s, 0);
        (v[0].clone(), v[1].clone())
    };
    vec![
        c,
        x,
        random_unitary(rng, s.rows()),
        random_unitary(rng, s.cols()),
    ]
}

fn draw_tripotent(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![random_tripotent(rng, s).into_matrix()]
}

fn draw_full(rng: &mut Generator, s: ModuleSpace, _: u64) -> Vec<Mat> {
    vec![random_full_partial_isometry(rng, s).into_matrix()]
}

/// Mostly random tripotents, with every fourth trial a non-tripotent point of
/// the closed ball so the implication is tested on both sides.
fn draw_tripotent_or_full(rng: &mut Generator, s: ModuleSpace, trial: u64) -> Vec<Mat> {
    match trial % 4 {
        0 => vec![gaussian_in_ball(rng, s, 1.0).into_matrix()],
        1 => draw_full(rng, s, trial),
        _ => draw_tripotent(rng, s, trial),
    }
}

fn draw_tripotent_unitaries(rng: &mut Generator, s: ModuleSpace, trial: u64) -> Vec<Mat> {
    let c = if trial.is_multiple_of(2) {
        random_full_partial_isometry(rng, s)
    } else {
        random_tripotent(rng, s)
    };
    vec![
        c.into_matrix(),
        random_unitary(rng, s.rows()),
        random_unitary(rng, s.cols()),
    ]
}

pub(crate) const DISC_RADII: [f64; 8] = [0.0, 0.3, 0.6, 0.9, 0.99, 0.999, 0.9999, 1.0];
pub(crate) const DISC_ANGLES: u64 = 32;

fn draw_disc_ring_point(rng: &mut Generator, _: ModuleSpace, trial: u64) -> Vec<Mat> {
    let r = DISC_RADII[(trial / DISC_ANGLES) as usize];
    let jitter: f64 = rng.random_range(0.0..1.0);
    let phi = 2.0 * PI * ((trial % DISC_ANGLES) as f64 + jitter) / DISC_ANGLES as f64;
    vec![Mat::from_element(1, 1, C64::from_polar(r, phi))]
}

// ---------------------------------------------------------------------------
// Checks: module.

fn check_inner_sesquilinear(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 4)?;
    let (x, y, z) = (
        elem(sys, &inst[0])?,
        elem(sys, &inst[1])?,
        elem(sys, &inst[2])?,
    );
    let ab = coeffs(&inst[3], 2)?;
    let (a, b) = (ab[0], ab[1]);
    let combo = &y.scale(a) + &z.scale(b);
    let lhs = inner(&x, &combo)?;
    let rhs = &inner(&x, &y)?.scale(a) + &inner(&x, &z)?.scale(b);
    let lin = dist(lhs.matrix(), rhs.matrix());
    let conj = dist(
        inner(&x.scale(a), &y)?.matrix(),
        inner(&x, &y)?.scale(a.conj()).matrix(),
    );
    let (nx, ny, nz) = (module_norm(&x), module_norm(&y), module_norm(&z));
    let scale = 1.0 + nx * (a.norm() * ny + b.norm() * nz);
    Ok(Outcome::at_most(lin.max(conj) / scale, abs_tol(sys)))
}

fn check_inner_module_map(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 3)?;
    let (x, y, a) = (
        elem(sys, &inst[0])?,
        elem(sys, &inst[1])?,
        alg(sys, &inst[2])?,
    );
    let lhs = inner(&x, &module_action(&y, &a)?)?;
    let rhs = &inner(&x, &y)? * &a;
    let scale = 1.0 + module_norm(&x) * module_norm(&y) * spectral_norm(a.matrix());
    Ok(Outcome::at_most(
        dist(lhs.matrix(), rhs.matrix()) / scale,
        abs_tol(sys),
    ))
}

fn check_inner_hermitian(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (x, y) = (elem(sys, &inst[0])?, elem(sys, &inst[1])?);
    let r = dist(inner(&y, &x)?.matrix(), &inner(&x, &y)?.matrix().adjoint());
    Ok(Outcome::at_most(
        r / (1.0 + module_norm(&x) * module_norm(&y)),
        abs_tol(sys),
    ))
}

fn check_inner_positive(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let x = elem(sys, &inst[0])?;
    let gram = inner(&x, &x)?;
    let zero = Mat::zeros(gram.dim(), gram.dim());
    let margin = loewner_margin(gram.matrix(), &zero, sys.tolerances())?;
    // tr<x,x> = |x|_F^2, so a vanishing Gram matrix forces x = 0.
    let frob2 = x.frobenius_norm().powi(2);
    let trace_gap = (gram.trace().re - frob2).abs();
    let definite =
        spectral_norm(gram.matrix()) > abs_tol(sys) || x.frobenius_norm() <= abs_tol(sys).sqrt();
    let r = (-margin).max(0.0).max(trace_gap) / (1.0 + frob2);
    Ok(Outcome {
        pass: r <= abs_tol(sys) && definite,
        ..Outcome::at_most(r, abs_tol(sys))
    })
}

fn check_action_compat(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 4)?;
    let (x, a, b) = (
        elem(sys, &inst[0])?,
        alg(sys, &inst[1])?,
        alg(sys, &inst[2])?,
    );
    let l = coeffs(&inst[3], 1)?[0];
    let lx_a = module_action(&x.scale(l), &a)?;
    let x_la = module_action(&x, &a.scale(l))?;
    let l_xa = module_action(&x, &a)?.scale(l);
    let xa_b = module_action(&module_action(&x, &a)?, &b)?;
    let x_ab = module_action(&x, &(&a * &b))?;
    let (nx, na, nb) = (
        module_norm(&x),
        spectral_norm(a.matrix()),
        spectral_norm(b.matrix()),
    );
    let excess = (module_norm(&module_action(&x, &a)?) - nx * na).max(0.0);
    let scale = 1.0 + nx * na * (l.norm() + nb);
    let r = [
        lx_a.distance(&x_la),
        lx_a.distance(&l_xa),
        xa_b.distance(&x_ab),
        excess,
    ]
    .into_iter()
    .fold(0.0, f64::max)
        / scale;
    Ok(Outcome::at_most(r, abs_tol(sys)))
}

fn check_cauchy_schwarz(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (x, y) = (elem(sys, &inst[0])?, elem(sys, &inst[1])?);
    let min_eig = cauchy_schwarz_residual(&x, &y)?;
    Ok(Outcome::at_most((-min_eig).max(0.0), abs_tol(sys)))
}

fn check_norm_continuity(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 3)?;
    let (x, y, a) = (
        elem(sys, &inst[0])?,
        elem(sys, &inst[1])?,
        alg(sys, &inst[2])?,
    );
    let (nx, ny) = (module_norm(&x), module_norm(&y));
    let abs_a = sqrt_psd_raw(&(a.matrix().adjoint() * a.matrix()), sys.tolerances())?;
    let na = spectral_norm(&abs_a);
    let excesses = [
        spectral_norm(inner(&x, &y)?.matrix()) - nx * ny,
        module_norm(&module_action(&x, &a)?) - nx * na,
        module_norm(&(&x + &y)) - nx - ny,
    ];
    let scale = 1.0 + nx * ny + nx * na + nx + ny;
    let r = excesses.into_iter().fold(0.0, f64::max) / scale;
    Ok(Outcome::at_most(r, abs_tol(sys)))
}

fn check_a_valued_bounds(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (x, y) = (elem(sys, &inst[0])?, elem(sys, &inst[1])?);
    let tol = sys.tolerances();
    let (nx, ny) = (module_norm(&x), module_norm(&y));
    let xy = inner(&x, &y)?.into_matrix();
    let abs_xy = sqrt_psd_raw(&(xy.adjoint() * &xy), tol)?;
    let abs_yx = sqrt_psd_raw(&(&xy * xy.adjoint()), tol)?;
    let abs_x = sqrt_psd_raw(&(x.matrix().adjoint() * x.matrix()), tol)?;
    let abs_y = sqrt_psd_raw(&(y.matrix().adjoint() * y.matrix()), tol)?;
    let m1 = loewner_margin(&(&abs_y * c64(nx, 0.0)), &abs_xy, tol)?;
    let m2 = loewner_margin(&(&abs_x * c64(ny, 0.0)), &abs_yx, tol)?;
    let norm_gap = (spectral_norm(&abs_x) - nx).abs();
    let scale = 1.0 + nx * ny;
    let r = ((-m1).max(-m2).max(0.0) / scale).max(norm_gap / (1.0 + nx));
    Ok(Outcome::at_most(r, tol.sqrt_tol()))
}

fn check_positivity_agreement(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let space = sys.space();
    let left = square(&inst[0], space.rows())?;
    let tagged = ModuleOperator::left_multiplier(space, &left)?;
    // The untagged operator exercises the generic adjoint and A-linearity paths.
    let untagged = ModuleOperator::from_linear_map(space, |x| tagged.apply(x))?;
    let mut rng = generator(0x0001_e3a1);
    let a = is_positive_op(&tagged, sys.tolerances(), &mut rng);
    let b = is_positive_op(&untagged, sys.tolerances(), &mut rng);
    match (a, b) {
        (Ok(p), Ok(q)) => Ok(Outcome::holds(p == q)),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

fn check_theta_adjoint(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (x, y) = (elem(sys, &inst[0])?, elem(sys, &inst[1])?);
    let txy = theta(&x, &y)?;
    let tyx = theta(&y, &x)?;
    let adj = adjoint_op(&txy, sys.tolerances())?;
    let generic = ModuleOperator::generic(sys.space(), txy.matrix().clone())?;
    let adj_generic = adjoint_op(&generic, sys.tolerances())?;
    let scale = 1.0 + module_norm(&x) * module_norm(&y);
    let r = [
        adj.rep_distance(&tyx),
        adj_generic.rep_distance(&tyx),
        a_linearity_residual(&generic),
        txy.tag_residual(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
        / scale;
    Ok(Outcome::at_most(r, abs_tol(sys)))
}

fn check_right_mult(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 4)?;
    let space = sys.space();
    let (a, b) = (alg(sys, &inst[0])?, alg(sys, &inst[1])?);
    let (x, w) = (elem(sys, &inst[2])?, elem(sys, &inst[3])?);
    let ra = right_mult(&a, space)?;
    let rb = right_mult(&b, space)?;
    let rba = right_mult(&(&b * &a), space)?;
    let comp = ra.compose(&rb)?;
    let (na, nb) = (spectral_norm(a.matrix()), spectral_norm(b.matrix()));
    let mut r = comp.rep_distance(&rba) / (1.0 + na * nb);
    r = r.max(comp.tag_residual() / (1.0 + na * nb));

    let gram = inner(&x, &x)?.into_matrix();
    let r_gram = ModuleOperator::generic(
        space,
        right_mult(&AlgebraElement::new(gram.clone())?, space)?
            .matrix()
            .clone(),
    )?;
    let nw = module_norm(&w);
    for t in [-1.0, 0.5, 2.0] {
        let u_op = ModuleOperator::generic(space, unitary_exp_raw(r_gram.matrix(), t))?;
        let lhs = u_op.apply(&w)?;
        let rhs = w.matrix() * unitary_exp_raw(&gram, t);
        r = r.max(dist(lhs.matrix(), &rhs) / (1.0 + nw));
        r = r.max((module_norm(&lhs) - nw).abs() / (1.0 + nw));
    }
    Ok(Outcome::at_most(r, abs_tol(sys)))
}

// ---------------------------------------------------------------------------
// Checks: axioms.

fn check_triple_linearity(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 5)?;
    let (x, y, z, w) = (
        elem(sys, &inst[0])?,
        elem(sys, &inst[1])?,
        elem(sys, &inst[2])?,
        elem(sys, &inst[3])?,
    );
    let ab = coeffs(&inst[4], 2)?;
    let (a, b) = (ab[0], ab[1]);
    let t = |p: &ModuleElement, q: &ModuleElement, r: &ModuleElement| sys.triple_product(p, q, r);
    let sym = t(&x, &y, &z)?.distance(&t(&z, &y, &x)?);
    let outer = t(&(&x.scale(a) + &w.scale(b)), &y, &z)?
        .distance(&(&t(&x, &y, &z)?.scale(a) + &t(&w, &y, &z)?.scale(b)));
    let middle = t(&x, &(&y.scale(a) + &w.scale(b)), &z)?
        .distance(&(&t(&x, &y, &z)?.scale(a.conj()) + &t(&x, &w, &z)?.scale(b.conj())));
    let n = [&x, &y, &z, &w]
        .iter()
        .map(|e| module_norm(e))
        .fold(0.0, f64::max);
    let scale = 1.0 + (1.0 + a.norm() + b.norm()) * n.powi(3);
    Ok(Outcome::at_most(
        sym.max(outer).max(middle) / scale,
        abs_tol(sys),
    ))
}

fn check_jordan(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 4)?;
    let e: Vec<ModuleElement> = inst.iter().map(|m| elem(sys, m)).collect::<Result<_>>()?;
    let r = sys.jordan_relative_residual(&e[0], &e[1], &e[2], &e[3])?;
    Ok(Outcome::at_most(r, JORDAN * abs_tol(sys)))
}

fn check_axiom3(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let x = elem(sys, &inst[0])?;
    let rep = sys.axiom3_report(&x)?;
    let tol = sys.tolerances();
    let worst_eig = rep
        .theta_min_eig
        .min(rep.rmult_min_eig)
        .min(rep.box_min_eig);
    let r = rep
        .decomp_residual
        .max(rep.box_hermitian_defect)
        .max((-worst_eig).max(0.0));
    Ok(Outcome {
        residual: r.max(rep.isometry_defect * tol.abs_tol / tol.composed_tol),
        threshold: tol.abs_tol,
        pass: rep.passes(tol),
    })
}

fn check_cube_identity(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let x = elem(sys, &inst[0])?;
    Ok(Outcome::at_most(
        sys.cube_identity_residual(&x)?,
        abs_tol(sys),
    ))
}

fn check_cube_chain(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let x = elem(sys, &inst[0])?;
    Ok(Outcome::at_most(
        sys.cube_norm_chain(&x)?.max_step_residual(),
        abs_tol(sys),
    ))
}

fn check_box_representation(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (x, y) = (elem(sys, &inst[0])?, elem(sys, &inst[1])?);
    let scale = 1.0 + module_norm(&x) * module_norm(&y);
    let kron = sys.box_representation_residual(&x, &y)?;
    let decomp = sys
        .box_op(&x, &y)?
        .rep_distance(&sys.box_decomposition(&x, &y)?);
    Ok(Outcome::at_most(kron.max(decomp) / scale, abs_tol(sys)))
}

fn check_quadratic_square(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (c, x) = (elem(sys, &inst[0])?, elem(sys, &inst[1])?);
    Ok(Outcome::at_most(
        sys.quadratic_square_residual(&c, &x)?,
        abs_tol(sys),
    ))
}

// ---------------------------------------------------------------------------
// Checks: ball.

fn check_bergmann_factored(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let c = elem(sys, &inst[0])?;
    let scale = (1.0 + module_norm(&c).powi(2)).powi(2);
    let r = bergmann(sys, &c)?.rep_distance(&bergmann_factored(&c)?) / scale;
    Ok(Outcome::at_most(r, TIGHT * abs_tol(sys)))
}

fn check_bergmann_sqrt(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let c = elem(sys, &inst[0])?;
    let root = bergmann_sqrt(sys, &c)?;
    let r = root.compose(&root)?.rep_distance(&bergmann(sys, &c)?);
    Ok(Outcome::at_most(r, abs_tol(sys)))
}

fn check_transvection_origin(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let c = ball(sys, &inst[0])?;
    let origin = BallPoint::new(ModuleElement::zeros(sys.space()), sys.tolerances())?;
    let image = Transvection::new(sys, c.clone())?.apply_raw(&origin)?;
    Ok(Outcome::at_most(
        image.distance(c.element()),
        TIGHT * abs_tol(sys),
    ))
}

fn check_scalar_mobius(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    if sys.space() != ModuleSpace::new(1, 1)? {
        return Err(Error::dims("1x1", sys.space()));
    }
    let (c, x) = (ball(sys, &inst[0])?, ball(sys, &inst[1])?);
    let g = Transvection::new(sys, c.clone())?.apply_raw(&x)?.matrix()[(0, 0)];
    let (cv, xv) = (c.element().matrix()[(0, 0)], x.element().matrix()[(0, 0)]);
    let classical = (xv + cv) / (C64::new(1.0, 0.0) + cv.conj() * xv);
    Ok(Outcome::at_most(
        (g - classical).norm(),
        TIGHT * abs_tol(sys),
    ))
}

fn check_ball_preservation(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (c, x) = (ball(sys, &inst[0])?, ball(sys, &inst[1])?);
    let image = Transvection::new(sys, c)?.apply_raw(&x)?;
    Ok(Outcome::below(module_norm(&image), 1.0))
}

fn check_transvection_inverse(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (c, x) = (ball(sys, &inst[0])?, ball(sys, &inst[1])?);
    let r = transvect_inverse_check(sys, &c, &x)?;
    Ok(Outcome::at_most(r, sys.tolerances().composed_tol))
}

fn check_denominator(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 2)?;
    let (c, x) = (ball(sys, &inst[0])?, ball(sys, &inst[1])?);
    let inv = mobius_denominator(&c, &x, sys.tolerances())?;
    let n = sys.space().cols();
    let shifted = Mat::identity(n, n) + inner(c.element(), x.element())?.into_matrix();
    let r = dist(&(shifted * inv.inverse.matrix()), &Mat::identity(n, n)) / inv.condition;
    Ok(Outcome::at_most(r, sys.tolerances().composed_tol))
}

fn check_automorphism(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 4)?;
    let space = sys.space();
    let (c, x) = (ball(sys, &inst[0])?, ball(sys, &inst[1])?);
    let (u, v) = (
        square(&inst[2], space.rows())?,
        square(&inst[3], space.cols())?,
    );
    let l = ModuleOperator::two_sided(space, &u, &v)?;
    let defect = isometry_defect(sys, &l)?;
    let h = apply_automorphism(sys, &l, &c, &x)?;
    let g = Transvection::new(sys, c)?.apply_raw(&x)?;
    Ok(Outcome {
        residual: defect.max((h.norm() - module_norm(&g)).abs()),
        threshold: abs_tol(sys),
        pass: h.norm() < 1.0 && defect <= abs_tol(sys),
    })
}

// ---------------------------------------------------------------------------
// Checks: extreme.

fn check_tripotent_necessity(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let k = classify(sys, &elem(sys, &inst[0])?)?;
    Ok(Outcome::holds(!k.is_extreme || k.is_tripotent))
}

fn check_families(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let k = classify(sys, &elem(sys, &inst[0])?)?;
    Ok(Outcome {
        residual: k.bergmann_norm,
        threshold: abs_tol(sys),
        pass: k.in_some_family() && k.is_extreme && k.bergmann_norm <= abs_tol(sys),
    })
}

fn check_unitary_invariance(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 3)?;
    let space = sys.space();
    let c = elem(sys, &inst[0])?;
    let (u, v) = (
        square(&inst[1], space.rows())?,
        square(&inst[2], space.cols())?,
    );
    let moved = ModuleElement::new(&u * c.matrix() * &v)?;
    let (k0, k1) = (classify(sys, &c)?, classify(sys, &moved)?);
    let gap = (k0.bergmann_norm - k1.bergmann_norm).abs();
    Ok(Outcome {
        residual: gap,
        threshold: abs_tol(sys),
        pass: k0.is_extreme == k1.is_extreme && gap <= abs_tol(sys),
    })
}

/// Convex extremality in the closed disc by brute force: `c` is extreme when
/// no displacement `d` from a discrete family keeps both `c ± d` in the disc.
pub(crate) fn disc_point_is_convex_extreme(c: C64) -> bool {
    const STEPS: [f64; 3] = [1e-3, 1e-2, 1e-1];
    const DIRECTIONS: usize = 64;
    for s in STEPS {
        for k in 0..DIRECTIONS {
            let d = C64::from_polar(s, 2.0 * PI * k as f64 / DIRECTIONS as f64);
            if (c + d).norm_sqr() <= 1.0 && (c - d).norm_sqr() <= 1.0 {
                return false;
            }
        }
    }
    true
}

fn check_disc_brute_force(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    if sys.space() != ModuleSpace::new(1, 1)? {
        return Err(Error::dims("1x1", sys.space()));
    }
    let c = elem(sys, &inst[0])?;
    let k = classify(sys, &c)?;
    Ok(Outcome::holds(
        k.is_extreme == disc_point_is_convex_extreme(c.matrix()[(0, 0)]),
    ))
}

fn check_outside_families(sys: &TripleSystem, inst: &[Mat]) -> Result<Outcome> {
    slots(inst, 1)?;
    let k = classify(sys, &elem(sys, &inst[0])?)?;
    Ok(Outcome::holds(!k.is_extreme || k.in_some_family()))
}
