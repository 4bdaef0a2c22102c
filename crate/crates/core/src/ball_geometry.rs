//! Geometry of the open unit ball of `E`: the Bergmann operator
//! `B(c,c) = 1 − 2 c□c + Q_c²`, its square root `B_c`, and the transvections
//!
//! ```text
//! g_c(x) = c + (1 − cc*)^{1/2} · [x · (1 + c*x)^{-1} · (1 − c*c)^{1/2}]
//! ```
//!
//! which map `0` to `c`. Every automorphism of the ball is `L ∘ g_c` for a
//! surjective linear isometry `L`.

use crate::cstar_algebra::{invert, sqrt_psd_raw, AlgebraElement, Inverse, Mat, C64};
use crate::error::{Error, Result};
use crate::hilbert_module::{inner, module_norm, ModuleElement, ModuleOperator};
use crate::jb_triple::{Mutation, TripleSystem};
use crate::sampling::{gaussian_element, generator};
use crate::tolerance::ToleranceConfig;

/// Factor of `abs_tol` kept between ball points and the unit sphere.
pub const BOUNDARY_MARGIN: f64 = 10.0;

/// A point of the open unit ball, at least `10·abs_tol` from the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    element: ModuleElement,
    norm: f64,
}

impl BallPoint {
    pub fn new(element: ModuleElement, tol: &ToleranceConfig) -> Result<Self> {
        let norm = module_norm(&element);
        if norm >= 1.0 || norm.is_nan() {
            return Err(Error::OutsideBall { norm });
        }
        let limit = 1.0 - BOUNDARY_MARGIN * tol.abs_tol;
        if norm > limit {
            return Err(Error::NearBoundary { norm, limit });
        }
        Ok(Self { element, norm })
    }

    pub(crate) fn new_unchecked(element: ModuleElement) -> Self {
        let norm = module_norm(&element);
        Self { element, norm }
    }

    pub fn element(&self) -> &ModuleElement {
        &self.element
    }

    pub fn into_element(self) -> ModuleElement {
        self.element
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// `B(c,c)(x) = x − 2(c□c)(x) + Q_c²(x)`, evaluated through the triple product.
pub fn bergmann(sys: &TripleSystem, c: &ModuleElement) -> Result<ModuleOperator> {
    let space = sys.space();
    let id = ModuleOperator::identity(space);
    let two_box = sys.box_op(c, c)?.scale(C64::new(2.0, 0.0));
    let qq = sys.quadratic_square_op(c)?;
    Ok(&(&id - &two_box) + &qq)
}

/// `x ↦ (1 − cc*) · x · (1 − c*c)`.
pub fn bergmann_factored(c: &ModuleElement) -> Result<ModuleOperator> {
    let (left, right) = defect_factors(c);
    ModuleOperator::two_sided(c.space(), &left, &right)
}

/// `(1 − cc*, 1 − c*c)`.
fn defect_factors(c: &ModuleElement) -> (Mat, Mat) {
    let cm = c.matrix();
    let (m, n) = cm.shape();
    (
        Mat::identity(m, m) - cm * cm.adjoint(),
        Mat::identity(n, n) - cm.adjoint() * cm,
    )
}

/// The PSD roots `((1 − cc*)^{1/2}, (1 − c*c)^{1/2})`, honoring the
/// `DropSqrtFactor` mutation.
fn sqrt_factors(sys: &TripleSystem, c: &ModuleElement) -> Result<(Mat, Mat)> {
    sys.check(&[c])?;
    let (left, right) = defect_factors(c);
    let tol = sys.tolerances();
    let left = sqrt_psd_raw(&left, tol)?;
    let right = match sys.mutation() {
        Some(Mutation::DropSqrtFactor) => Mat::identity(right.nrows(), right.ncols()),
        _ => sqrt_psd_raw(&right, tol)?,
    };
    Ok((left, right))
}

/// `B_c(x) = (1 − cc*)^{1/2} · x · (1 − c*c)^{1/2}`, with `B_c ∘ B_c = B(c,c)`.
/// Requires `‖c‖ ≤ 1`.
pub fn bergmann_sqrt(sys: &TripleSystem, c: &ModuleElement) -> Result<ModuleOperator> {
    let (left, right) = sqrt_factors(sys, c)?;
    ModuleOperator::two_sided(sys.space(), &left, &right)
}

/// `(1 + ⟨c, x⟩)^{-1}` with its condition number.
pub fn mobius_denominator(c: &BallPoint, x: &BallPoint, tol: &ToleranceConfig) -> Result<Inverse> {
    let cx = inner(c.element(), x.element())?;
    let shifted = &AlgebraElement::identity(cx.dim()) + &cx;
    invert(&shifted, tol)
}

/// The transvection `g_c`, with both square-root factors precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Transvection {
    center: BallPoint,
    sqrt_left: Mat,
    sqrt_right: Mat,
    tolerances: ToleranceConfig,
}

impl Transvection {
    pub fn new(sys: &TripleSystem, center: BallPoint) -> Result<Self> {
        let (sqrt_left, sqrt_right) = sqrt_factors(sys, center.element())?;
        Ok(Self {
            center,
            sqrt_left,
            sqrt_right,
            tolerances: *sys.tolerances(),
        })
    }

    pub fn center(&self) -> &BallPoint {
        &self.center
    }

    /// `(1 − cc*)^{1/2}`, an `m×m` PSD matrix.
    pub fn sqrt_left(&self) -> &Mat {
        &self.sqrt_left
    }

    /// `(1 − c*c)^{1/2}`, an `n×n` PSD matrix.
    pub fn sqrt_right(&self) -> &Mat {
        &self.sqrt_right
    }

    /// `g_c(x)` without re-wrapping the result as a ball point.
    pub fn apply_raw(&self, x: &BallPoint) -> Result<ModuleElement> {
        let denom = mobius_denominator(&self.center, x, &self.tolerances)?;
        let right = denom.inverse.matrix() * &self.sqrt_right;
        let moved = &self.sqrt_left * (x.element().matrix() * right);
        Ok(ModuleElement::from_raw(
            self.center.element().matrix() + moved,
        ))
    }

    /// `g_c(x)`. An image outside the ball is reported as an error; it cannot
    /// happen in exact arithmetic.
    pub fn apply(&self, x: &BallPoint) -> Result<BallPoint> {
        BallPoint::new(self.apply_raw(x)?, &self.tolerances)
    }
}

pub fn transvect(t: &Transvection, x: &BallPoint) -> Result<BallPoint> {
    t.apply(x)
}

/// `‖g_{−c}(g_c(x)) − x‖`.
pub fn transvect_inverse_check(sys: &TripleSystem, c: &BallPoint, x: &BallPoint) -> Result<f64> {
    let forward = Transvection::new(sys, c.clone())?;
    let neg = BallPoint::new_unchecked(-c.element());
    let backward = Transvection::new(sys, neg)?;
    let y = forward.apply(x)?;
    Ok(backward.apply_raw(&y)?.distance(x.element()))
}

/// Largest relative change of the module norm under `l` over the standard
/// basis and `sample_count` Gaussian probes.
pub fn isometry_defect(sys: &TripleSystem, l: &ModuleOperator) -> Result<f64> {
    let space = sys.space();
    if l.space() != space {
        return Err(Error::dims(space, l.space()));
    }
    let mut rng = generator(0x150_3e7);
    let mut worst = 0.0_f64;
    let probes = space
        .basis()
        .chain((0..sys.tolerances().sample_count).map(|_| gaussian_element(&mut rng, space)));
    for z in probes {
        let nz = module_norm(&z);
        let defect = (module_norm(&l.apply(&z)?) - nz).abs() / nz;
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// `h(x) = L(g_c(x))` for a surjective linear isometry `L`.
pub fn apply_automorphism(
    sys: &TripleSystem,
    l: &ModuleOperator,
    c: &BallPoint,
    x: &BallPoint,
) -> Result<BallPoint> {
    let defect = isometry_defect(sys, l)?;
    if defect > sys.tolerances().abs_tol {
        return Err(Error::NotIsometry { defect });
    }
    let g = Transvection::new(sys, c.clone())?.apply(x)?;
    BallPoint::new(l.apply(g.element())?, sys.tolerances())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar_algebra::c64;
    use crate::hilbert_module::ModuleSpace;
    use crate::jb_triple::scalar_element;
    use crate::sampling::{gaussian_in_ball, random_unitary};

    fn sys(m: usize, n: usize) -> TripleSystem {
        TripleSystem::new(ModuleSpace::new(m, n).unwrap(), ToleranceConfig::default())
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn point(z: f64) -> BallPoint {
        BallPoint::new(scalar_element(c64(z, 0.0)), &tol()).unwrap()
    }

    fn scalar_op(op: &ModuleOperator) -> C64 {
        assert_eq!(op.matrix().shape(), (1, 1));
        op.matrix()[(0, 0)]
    }

    #[test]
    fn ball_point_bounds() {
        assert!(matches!(
            BallPoint::new(scalar_element(c64(1.0, 0.0)), &tol()),
            Err(Error::OutsideBall { .. })
        ));
        assert!(matches!(
            BallPoint::new(scalar_element(c64(1.0 - 1e-10, 0.0)), &tol()),
            Err(Error::NearBoundary { .. })
        ));
        assert!(BallPoint::new(scalar_element(c64(0.999, 0.0)), &tol()).is_ok());
    }

    #[test]
    fn bergmann_at_origin_is_identity() {
        let s = sys(2, 3);
        let zero = ModuleElement::zeros(s.space());
        let id = ModuleOperator::identity(s.space());
        assert_eq!(bergmann(&s, &zero).unwrap().rep_distance(&id), 0.0);
        assert_eq!(bergmann_sqrt(&s, &zero).unwrap().rep_distance(&id), 0.0);
    }

    #[test]
    fn scalar_bergmann_values() {
        let s = sys(1, 1);
        let c = scalar_element(c64(0.5, 0.0));
        assert!((scalar_op(&bergmann(&s, &c).unwrap()) - c64(0.5625, 0.0)).norm() < 1e-15);
        let c = scalar_element(c64(0.6, 0.0));
        assert!((scalar_op(&bergmann_sqrt(&s, &c).unwrap()) - c64(0.64, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expanded_and_factored_bergmann_agree() {
        let mut rng = generator(1);
        for (m, n) in [(2, 2), (3, 2), (2, 3), (4, 1)] {
            let s = sys(m, n);
            for _ in 0..10 {
                let c = gaussian_in_ball(&mut rng, s.space(), 0.95);
                let scale = (1.0 + module_norm(&c).powi(2)).powi(2);
                let d = bergmann(&s, &c)
                    .unwrap()
                    .rep_distance(&bergmann_factored(&c).unwrap());
                assert!(d / scale <= 1e-12, "{m}x{n}: {d}");
            }
        }
    }

    #[test]
    fn bergmann_root_squares_to_bergmann() {
        let mut rng = generator(2);
        let s = sys(3, 2);
        for _ in 0..10 {
            let c = gaussian_in_ball(&mut rng, s.space(), 0.95);
            let root = bergmann_sqrt(&s, &c).unwrap();
            let r = root
                .compose(&root)
                .unwrap()
                .rep_distance(&bergmann(&s, &c).unwrap());
            assert!(r <= 1e-10);
        }
    }

    #[test]
    fn bergmann_root_rejects_points_outside_the_ball() {
        let s = sys(1, 1);
        let c = scalar_element(c64(1.5, 0.0));
        assert!(matches!(
            bergmann_sqrt(&s, &c),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn scalar_mobius_denominator() {
        let inv = mobius_denominator(&point(0.5), &point(0.5), &tol()).unwrap();
        assert!((inv.inverse.matrix()[(0, 0)] - c64(0.8, 0.0)).norm() < 1e-15);
        let zero = BallPoint::new(
            ModuleElement::zeros(ModuleSpace::new(2, 2).unwrap()),
            &tol(),
        )
        .unwrap();
        let inv = mobius_denominator(&zero, &zero, &tol()).unwrap();
        assert_eq!(inv.inverse.matrix(), &Mat::identity(2, 2));
    }

    #[test]
    fn denominator_is_invertible_near_the_sphere() {
        let s = sys(3, 3);
        let mut rng = generator(3);
        for _ in 0..1000 {
            let c = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.999), &tol()).unwrap();
            let x = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.999), &tol()).unwrap();
            mobius_denominator(&c, &x, &tol()).unwrap();
        }
    }

    #[test]
    fn scalar_transvection_is_the_classical_mobius_map() {
        let s = sys(1, 1);
        let g = Transvection::new(&s, point(0.5)).unwrap();
        let y = g.apply(&point(0.5)).unwrap();
        assert!((y.element().matrix()[(0, 0)] - c64(0.8, 0.0)).norm() < 1e-15);
        let y = g.apply(&point(-0.5)).unwrap();
        assert!(y.norm() < 1e-15);

        let c = c64(0.3, -0.4);
        let x = c64(-0.2, 0.7);
        let g = Transvection::new(&s, BallPoint::new(scalar_element(c), &tol()).unwrap()).unwrap();
        let y = g
            .apply_raw(&BallPoint::new(scalar_element(x), &tol()).unwrap())
            .unwrap();
        let oracle = (x + c) / (c64(1.0, 0.0) + c.conj() * x);
        assert!((y.matrix()[(0, 0)] - oracle).norm() < 1e-12);
    }

    #[test]
    fn transvection_moves_origin_to_center() {
        let mut rng = generator(4);
        let s = sys(2, 3);
        let c = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.95), &tol()).unwrap();
        let zero = BallPoint::new(ModuleElement::zeros(s.space()), &tol()).unwrap();
        let g = Transvection::new(&s, c.clone()).unwrap();
        assert!(g.apply_raw(&zero).unwrap().distance(c.element()) <= 1e-12);
    }

    #[test]
    fn transvection_inverse() {
        let mut rng = generator(5);
        let s = sys(2, 2);
        for _ in 0..50 {
            let c = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.9), &tol()).unwrap();
            let x = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.9), &tol()).unwrap();
            assert!(transvect_inverse_check(&s, &c, &x).unwrap() <= 1e-8);
            let zero = BallPoint::new(ModuleElement::zeros(s.space()), &tol()).unwrap();
            assert!(transvect_inverse_check(&s, &c, &zero).unwrap() <= 1e-12);
            assert!(transvect_inverse_check(&s, &zero, &x).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn transvections_preserve_the_ball() {
        let mut rng = generator(6);
        let s = sys(3, 2);
        for _ in 0..200 {
            let c = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.95), &tol()).unwrap();
            let x = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.95), &tol()).unwrap();
            let g = Transvection::new(&s, c).unwrap();
            assert!(module_norm(&g.apply_raw(&x).unwrap()) < 1.0);
        }
    }

    #[test]
    fn automorphisms() {
        let mut rng = generator(7);
        let s = sys(2, 3);
        let c = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.9), &tol()).unwrap();
        let x = BallPoint::new(gaussian_in_ball(&mut rng, s.space(), 0.9), &tol()).unwrap();

        let id = ModuleOperator::identity(s.space());
        let plain = transvect(&Transvection::new(&s, c.clone()).unwrap(), &x).unwrap();
        assert!(
            apply_automorphism(&s, &id, &c, &x)
                .unwrap()
                .element()
                .distance(plain.element())
                == 0.0
        );

        let (u, v) = (random_unitary(&mut rng, 2), random_unitary(&mut rng, 3));
        let l = ModuleOperator::two_sided(s.space(), &u, &v).unwrap();
        assert!(isometry_defect(&s, &l).unwrap() < 1e-13);
        let h = apply_automorphism(&s, &l, &c, &x).unwrap();
        assert!((h.norm() - plain.norm()).abs() < 1e-12);

        let double = id.scale(c64(2.0, 0.0));
        assert!(matches!(
            apply_automorphism(&s, &double, &c, &x),
            Err(Error::NotIsometry { .. })
        ));
    }

    #[test]
    fn dropped_root_breaks_the_square_identity() {
        let s = sys(2, 2).with_mutation(Some(Mutation::DropSqrtFactor));
        let mut rng = generator(8);
        let c = gaussian_in_ball(&mut rng, s.space(), 0.95);
        let c = c.scale(c64(0.9 / module_norm(&c), 0.0));
        let root = bergmann_sqrt(&s, &c).unwrap();
        assert!(
            root.compose(&root)
                .unwrap()
                .rep_distance(&bergmann(&s, &c).unwrap())
                > 0.1
        );
    }
}
