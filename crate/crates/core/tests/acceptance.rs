//! Acceptance criteria 1 to 8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use cstar_triple::ball_geometry::{mobius_denominator, BallPoint};
use cstar_triple::extremal::search_outside_families;
use cstar_triple::hilbert_module::ModuleSpace;
use cstar_triple::jb_triple::Mutation;
use cstar_triple::sampling::{gaussian_in_ball, generator};
use cstar_triple::suites::{run_suites, PropertyRecord, Suite, SuiteConfig, SuiteReport};
use cstar_triple::{Error, ToleranceConfig};

const TRIALS: u64 = 100;

struct Criterion {
    id: u8,
    title: &'static str,
    checks: Vec<(String, bool)>,
    elapsed: Duration,
}

impl Criterion {
    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn run(suite: Suite, names: &[&str], mutation: Option<Mutation>) -> SuiteReport {
    let config = SuiteConfig {
        trials: TRIALS,
        suites: vec![suite],
        mutation,
        only: Some(names.iter().map(|s| s.to_string()).collect()),
        ..SuiteConfig::default()
    };
    run_suites(&config).expect("valid configuration")
}

fn record<'a>(r: &'a SuiteReport, name: &str) -> &'a PropertyRecord {
    r.property(name)
        .unwrap_or_else(|| panic!("{name} missing from report"))
}

/// Worst residual at most `limit`, no failing trial, and at least `min_trials` trials.
fn bounded(r: &SuiteReport, name: &str, limit: f64, min_trials: u64) -> (String, bool) {
    let p = record(r, name);
    let ok = p.failures == 0 && p.worst_residual <= limit && p.trials_run >= min_trials;
    (
        format!(
            "{name}: worst {:.2e} <= {limit:.0e} over {} trials, {} failures",
            p.worst_residual, p.trials_run, p.failures
        ),
        ok,
    )
}

fn no_failures(r: &SuiteReport, name: &str, min_trials: u64) -> (String, bool) {
    let p = record(r, name);
    (
        format!(
            "{name}: {} failures over {} trials",
            p.failures, p.trials_run
        ),
        p.failures == 0 && p.trials_run >= min_trials,
    )
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> Vec<(String, bool)>) -> Criterion {
    let start = Instant::now();
    let checks = f();
    Criterion {
        id,
        title,
        checks,
        elapsed: start.elapsed(),
    }
}

fn per_dim(n: u64) -> u64 {
    n * SuiteConfig::default().dims.len() as u64
}

fn main() {
    let mut criteria = Vec::new();

    let mut c1 = timed(1, "inner-product axioms", || {
        let r = run(
            Suite::Module,
            &[
                "module.inner_sesquilinear",
                "module.inner_module_map",
                "module.inner_hermitian",
                "module.inner_positive_definite",
            ],
            None,
        );
        [
            "module.inner_sesquilinear",
            "module.inner_module_map",
            "module.inner_hermitian",
            "module.inner_positive_definite",
        ]
        .iter()
        .map(|n| bounded(&r, n, 1e-10, per_dim(TRIALS)))
        .collect()
    });
    let t = c1.elapsed;
    c1.checks.push((
        format!("runtime {:.2}s < 5s", t.as_secs_f64()),
        t < Duration::from_secs(5),
    ));
    criteria.push(c1);

    criteria.push(timed(2, "Cauchy-Schwarz", || {
        let r = run(Suite::Module, &["module.cauchy_schwarz"], None);
        vec![bounded(&r, "module.cauchy_schwarz", 1e-10, per_dim(TRIALS))]
    }));

    criteria.push(timed(3, "positivity cross-validation", || {
        let r = run(Suite::Module, &["module.positivity_agreement"], None);
        vec![no_failures(
            &r,
            "module.positivity_agreement",
            per_dim(TRIALS),
        )]
    }));

    let mut c4 = timed(4, "triple axioms", || {
        let names = [
            "axioms.jordan_identity",
            "axioms.box_hermitian_positive",
            "axioms.cube_identity",
        ];
        let r = run(Suite::Axioms, &names, None);
        vec![
            bounded(&r, names[0], 1e-9, per_dim(TRIALS)),
            no_failures(&r, names[1], per_dim(TRIALS)),
            bounded(&r, names[2], 1e-10, per_dim(TRIALS)),
        ]
    });
    let t = c4.elapsed;
    c4.checks.push((
        format!("runtime {:.2}s < 30s", t.as_secs_f64()),
        t < Duration::from_secs(30),
    ));
    criteria.push(c4);

    criteria.push(timed(5, "Bergmann coherence", || {
        let names = ["ball.bergmann_factored", "ball.bergmann_sqrt_square"];
        let r = run(Suite::Ball, &names, None);
        vec![
            bounded(&r, names[0], 1e-12, per_dim(TRIALS)),
            bounded(&r, names[1], 1e-10, per_dim(TRIALS)),
        ]
    }));

    criteria.push(timed(6, "transvections", || {
        let names = [
            "ball.transvection_origin",
            "ball.scalar_mobius",
            "ball.ball_preservation",
            "ball.transvection_inverse",
            "ball.denominator_invertible",
        ];
        let r = run(Suite::Ball, &names, None);
        let mut checks = vec![
            bounded(&r, names[0], 1e-12, per_dim(TRIALS)),
            bounded(&r, names[1], 1e-12, 400),
            no_failures(&r, names[2], per_dim(1000)),
            bounded(&r, names[3], 1e-8, per_dim(1000)),
            no_failures(&r, names[4], 10_000),
        ];
        // Bulk invertibility at 3x3 with norms up to 0.999.
        let tol = ToleranceConfig::default();
        let space = ModuleSpace::new(3, 3).unwrap();
        let mut rng = generator(42);
        let mut singular = 0;
        for _ in 0..10_000 {
            let c = BallPoint::new(gaussian_in_ball(&mut rng, space, 0.999), &tol).unwrap();
            let x = BallPoint::new(gaussian_in_ball(&mut rng, space, 0.999), &tol).unwrap();
            if let Err(Error::Singular { .. }) = mobius_denominator(&c, &x, &tol) {
                singular += 1;
            }
        }
        checks.push((
            format!("3x3 bulk: {singular} Singular errors in 10^4 pairs"),
            singular == 0,
        ));
        checks
    }));

    criteria.push(timed(7, "extremal structure", || {
        let names = [
            "extreme.tripotent_necessity",
            "extreme.families_are_extreme",
            "extreme.disc_brute_force",
        ];
        let r = run(Suite::Extreme, &names, None);
        let mut checks = vec![
            no_failures(&r, names[0], per_dim(TRIALS)),
            bounded(&r, names[1], 1e-10, per_dim(TRIALS)),
            no_failures(&r, names[2], 256),
        ];
        let tol = ToleranceConfig::default();
        for (m, n) in [(1, 1), (2, 2), (2, 3)] {
            let space = ModuleSpace::new(m, n).unwrap();
            let found = search_outside_families(space, 1000, 42, &tol).unwrap();
            checks.push((
                format!(
                    "search_outside_families {space}: {} findings in 10^3 trials",
                    found.len()
                ),
                found.is_empty(),
            ));
        }
        checks
    }));

    criteria.push(timed(8, "mutation sensitivity", || {
        let mut checks = Vec::new();
        for (mutation, target) in [
            (Mutation::TripleSignFlip, "axioms.cube_identity"),
            (Mutation::DropSqrtFactor, "ball.bergmann_sqrt_square"),
        ] {
            let config = SuiteConfig {
                trials: 20,
                mutation: Some(mutation),
                ..SuiteConfig::default()
            };
            let r = run_suites(&config).expect("valid configuration");
            let failed: Vec<&str> = r.failed().map(|p| p.name).collect();
            let target_failed = failed.contains(&target);
            let witnessed = r.property(target).is_some_and(|p| p.witness.is_some());
            checks.push((
                format!(
                    "{mutation}: {} properties fail, including {target} (witness: {witnessed})",
                    failed.len()
                ),
                target_failed && witnessed,
            ));
        }
        checks
    }));

    let mut all = true;
    for c in &criteria {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        all &= c.passed();
        println!(
            "{status} criterion {} ({}) [{:.2}s]",
            c.id,
            c.title,
            c.elapsed.as_secs_f64()
        );
        for (what, ok) in &c.checks {
            println!("     {} {what}", if *ok { "ok  " } else { "FAIL" });
        }
    }
    if !all {
        std::process::exit(1);
    }
}
