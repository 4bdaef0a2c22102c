//! Extreme points of the closed unit ball, characterized as the kernel of the
//! Bergmann map `c ↦ B(c,c)`.
//!
//! Two families are always extreme: `c*c = 1` (the right factor of the
//! factored Bergmann form vanishes) and `cc* = 1` (the left factor vanishes).
//! Every extreme point is a tripotent, `c = c·(c*c)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ball_geometry::bergmann;
use crate::cstar_algebra::{spectral_norm, Mat};
use crate::error::{Error, Result};
use crate::hilbert_module::{module_norm, ModuleElement, ModuleSpace};
use crate::jb_triple::TripleSystem;
use crate::sampling::{random_tripotent, trial_generator};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremeClassification {
    pub is_extreme: bool,
    pub is_tripotent: bool,
    /// `c*c = 1_n`.
    pub family_full_norm: bool,
    /// `cc* = 1_m`.
    pub family_full_range: bool,
    /// Representation norm of `B(c,c)`.
    pub bergmann_norm: f64,
}

impl ExtremeClassification {
    pub fn in_some_family(&self) -> bool {
        self.family_full_norm || self.family_full_range
    }
}

/// `‖c − c·(c*c)‖ ≤ abs_tol·(1 + ‖c‖³)`: `c` is a partial isometry.
pub fn is_tripotent(c: &ModuleElement, tol: &ToleranceConfig) -> bool {
    let cm = c.matrix();
    let residual = spectral_norm(&(cm - cm * (cm.adjoint() * cm)));
    residual <= tol.abs_tol * (1.0 + module_norm(c).powi(3))
}

pub fn classify(sys: &TripleSystem, c: &ModuleElement) -> Result<ExtremeClassification> {
    sys.check(&[c])?;
    let tol = sys.tolerances();
    let norm = module_norm(c);
    if norm > 1.0 + tol.abs_tol {
        return Err(Error::OutsideBall { norm });
    }
    let cm = c.matrix();
    let (m, n) = cm.shape();
    let bergmann_norm = bergmann(sys, c)?.rep_norm();
    Ok(ExtremeClassification {
        is_extreme: bergmann_norm <= tol.abs_tol,
        is_tripotent: is_tripotent(c, tol),
        family_full_norm: spectral_norm(&(cm.adjoint() * cm - Mat::identity(n, n))) <= tol.abs_tol,
        family_full_range: spectral_norm(&(cm * cm.adjoint() - Mat::identity(m, m))) <= tol.abs_tol,
        bergmann_norm,
    })
}

/// A random tripotent classified as extreme yet outside both families.
#[derive(Debug, Clone, PartialEq)]
pub struct OutsideFamilyFinding {
    pub trial: u64,
    pub element: ModuleElement,
    pub classification: ExtremeClassification,
}

/// Classifies `trials` random tripotents (trial `k` seeded from `(seed, k)`)
/// and returns every extreme point that lies in neither family. In
/// `M_{m×n}` the factored Bergmann form forces `cc* = 1` or `c*c = 1`, so a
/// non-empty result means something is wrong or remarkable.
pub fn search_outside_families(
    space: ModuleSpace,
    trials: u64,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<OutsideFamilyFinding>> {
    let sys = TripleSystem::new(space, *tol);
    let results: Vec<Result<Option<OutsideFamilyFinding>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_generator(seed, &["extreme", "search"], space, trial);
            let c = random_tripotent(&mut rng, space);
            let classification = classify(&sys, &c)?;
            let outside = classification.is_extreme && !classification.in_some_family();
            Ok(outside.then_some(OutsideFamilyFinding {
                trial,
                element: c,
                classification,
            }))
        })
        .collect();
    let mut found = Vec::new();
    for r in results {
        if let Some(f) = r? {
            found.push(f);
        }
    }
    Ok(found)
}

/// Fixture text for a finding, with the classification in header comments.
pub fn render_finding(space: ModuleSpace, finding: &OutsideFamilyFinding) -> String {
    let c = &finding.classification;
    crate::fixture::Fixture {
        metadata: vec![
            ("kind".into(), "extreme-outside-families".into()),
            ("space".into(), format!("{} {}", space.rows(), space.cols())),
            ("trial".into(), finding.trial.to_string()),
            ("is_extreme".into(), c.is_extreme.to_string()),
            ("is_tripotent".into(), c.is_tripotent.to_string()),
            ("family_full_norm".into(), c.family_full_norm.to_string()),
            ("family_full_range".into(), c.family_full_range.to_string()),
            ("bergmann_norm".into(), format!("{:e}", c.bergmann_norm)),
        ],
        comments: vec![],
        matrices: vec![finding.element.matrix().clone()],
    }
    .render()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar_algebra::c64;
    use crate::fixture::Fixture;
    use crate::hilbert_module::ModuleOperator;
    use crate::sampling::{generator, random_full_partial_isometry};

    fn sys(m: usize, n: usize) -> TripleSystem {
        TripleSystem::new(ModuleSpace::new(m, n).unwrap(), ToleranceConfig::default())
    }

    fn e11(s: ModuleSpace) -> ModuleElement {
        ModuleElement::basis(s, 0)
    }

    #[test]
    fn tripotent_examples() {
        let tol = ToleranceConfig::default();
        let s = ModuleSpace::new(2, 2).unwrap();
        assert!(is_tripotent(&ModuleElement::zeros(s), &tol));
        assert!(is_tripotent(&e11(s), &tol));
        assert!(!is_tripotent(&e11(s).scale(c64(2.0, 0.0)), &tol));
    }

    #[test]
    fn unitary_is_in_both_families() {
        let s = sys(2, 2);
        let c = ModuleElement::new(Mat::identity(2, 2)).unwrap();
        let k = classify(&s, &c).unwrap();
        assert!(k.is_extreme && k.is_tripotent && k.family_full_norm && k.family_full_range);
        assert_eq!(k.bergmann_norm, 0.0);
    }

    #[test]
    fn rank_one_tripotent_in_square_module_is_not_extreme() {
        let s = sys(2, 2);
        let c = e11(s.space());
        let k = classify(&s, &c).unwrap();
        assert!(k.is_tripotent && !k.is_extreme && !k.in_some_family());
        assert!((k.bergmann_norm - 1.0).abs() < 1e-14);
        // Kronecker oracle: B(c,c) is left and right multiplication by diag(0,1).
        let p = crate::cstar_algebra::AlgebraElement::from_real_diagonal(&[0.0, 1.0]).into_matrix();
        let oracle = ModuleOperator::two_sided(s.space(), &p, &p).unwrap();
        assert!(bergmann(&s, &c).unwrap().rep_distance(&oracle) < 1e-15);
    }

    #[test]
    fn co_isometry_is_extreme() {
        let s = sys(2, 3);
        // cc* = I_2 but c*c is a rank-two projection in M_3.
        let c =
            ModuleElement::from_rows(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0].map(|v| c64(v, 0.0)))
                .unwrap();
        let k = classify(&s, &c).unwrap();
        assert!(k.family_full_range && !k.family_full_norm && k.is_extreme);
        assert!(k.bergmann_norm < 1e-15);
    }

    #[test]
    fn random_full_partial_isometries_are_extreme() {
        let mut rng = generator(1);
        for (m, n) in [(1, 1), (3, 2), (2, 3), (4, 1)] {
            let s = sys(m, n);
            for _ in 0..10 {
                let c = random_full_partial_isometry(&mut rng, s.space());
                let k = classify(&s, &c).unwrap();
                assert!(k.is_extreme && k.in_some_family() && k.bergmann_norm <= 1e-10);
            }
        }
    }

    #[test]
    fn classify_rejects_points_outside_the_closed_ball() {
        let s = sys(1, 1);
        let c = crate::jb_triple::scalar_element(c64(1.1, 0.0));
        assert!(matches!(classify(&s, &c), Err(Error::OutsideBall { .. })));
    }

    #[test]
    fn disc_extreme_points_are_unimodular() {
        let s = sys(1, 1);
        for k in 0..16 {
            let z = crate::cstar_algebra::C64::from_polar(1.0, k as f64 * 0.4);
            let k1 = classify(&s, &crate::jb_triple::scalar_element(z)).unwrap();
            assert!(k1.is_extreme && k1.family_full_norm);
            let inner = classify(&s, &crate::jb_triple::scalar_element(z * 0.99)).unwrap();
            assert!(!inner.is_extreme);
        }
    }

    #[test]
    fn search_finds_nothing_in_small_modules() {
        let tol = ToleranceConfig::default();
        for (m, n, trials) in [(1, 1, 100), (2, 2, 300), (2, 3, 300)] {
            let s = ModuleSpace::new(m, n).unwrap();
            assert!(search_outside_families(s, trials, 42, &tol)
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn findings_render_as_fixtures() {
        let s = ModuleSpace::new(2, 2).unwrap();
        let finding = OutsideFamilyFinding {
            trial: 3,
            element: e11(s),
            classification: classify(&sys(2, 2), &e11(s)).unwrap(),
        };
        let fx = Fixture::parse(&render_finding(s, &finding)).unwrap();
        assert_eq!(fx.meta("trial"), Some("3"));
        assert_eq!(fx.meta("is_extreme"), Some("false"));
        assert_eq!(&fx.matrices[0], e11(s).matrix());
    }
}
