//! Seeded verification suites.
//!
//! Every property is a pair of pure functions: `draw` builds a random instance
//! (a list of matrices) from a per-trial generator, and `check` evaluates the
//! property on an instance. Failing instances are written as fixtures and can
//! be replayed through [`replay`] with the same verdict.

mod properties;

use std::cmp::Ordering;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cstar_algebra::Mat;
use crate::fixture::Fixture;
use crate::hilbert_module::ModuleSpace;
use crate::jb_triple::{Mutation, TripleSystem};
use crate::sampling::trial_generator;
use crate::tolerance::ToleranceConfig;

pub use properties::{all_properties, find_property, Outcome, Property, TrialPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Module,
    Axioms,
    Ball,
    Extreme,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Module, Suite::Axioms, Suite::Ball, Suite::Extreme];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Module => "module",
            Suite::Axioms => "axioms",
            Suite::Ball => "ball",
            Suite::Extreme => "extreme",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `module|axioms|ball|extreme|all`; `all` expands to every suite.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>, SuiteError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        match part {
            "all" => out.extend(Suite::ALL),
            other => match Suite::ALL.iter().find(|x| x.name() == other) {
                Some(x) => out.push(*x),
                None => return Err(SuiteError::Config(format!("unknown suite {other:?}"))),
            },
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Parses `"1x1,2x3"`.
pub fn parse_dims(s: &str) -> Result<Vec<ModuleSpace>, SuiteError> {
    let bad = |p: &str| SuiteError::Config(format!("bad dimension pair {p:?}, expected MxN"));
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (m, n) = p.split_once(['x', 'X']).ok_or_else(|| bad(p))?;
            let m: usize = m.trim().parse().map_err(|_| bad(p))?;
            let n: usize = n.trim().parse().map_err(|_| bad(p))?;
            ModuleSpace::new(m, n).map_err(|_| bad(p))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for OutputFormat {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, SuiteError> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            other => Err(SuiteError::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Fixture(#[from] crate::error::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub dims: Vec<ModuleSpace>,
    pub trials: u64,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    pub suites: Vec<Suite>,
    pub format: OutputFormat,
    /// Directory for witness fixtures; witnesses stay in the report only when unset.
    pub fixtures_dir: Option<PathBuf>,
    pub mutation: Option<Mutation>,
    /// Restricts the run to these property names within the selected suites.
    pub only: Option<Vec<String>>,
}

pub fn default_dims() -> Vec<ModuleSpace> {
    [(1, 1), (2, 2), (3, 2), (2, 3), (4, 1)]
        .iter()
        .map(|&(m, n)| ModuleSpace::new(m, n).expect("positive dims"))
        .collect()
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: default_dims(),
            trials: 100,
            seed: 42,
            tolerances: ToleranceConfig::default(),
            suites: Suite::ALL.to_vec(),
            format: OutputFormat::Text,
            fixtures_dir: None,
            mutation: None,
            only: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), SuiteError> {
        if self.dims.is_empty() {
            return Err(SuiteError::Config("no dimension pairs given".into()));
        }
        if self.trials == 0 {
            return Err(SuiteError::Config("trials must be at least 1".into()));
        }
        if self.suites.is_empty() {
            return Err(SuiteError::Config("no suites selected".into()));
        }
        self.tolerances
            .validate()
            .map_err(|e| SuiteError::Config(e.to_string()))?;
        if let Some(only) = &self.only {
            if let Some(bad) = only.iter().find(|n| find_property(n).is_none()) {
                return Err(SuiteError::Config(format!("unknown property {bad:?}")));
            }
        }
        if let Some(dir) = &self.fixtures_dir {
            std::fs::create_dir_all(dir).map_err(|source| SuiteError::Io {
                path: dir.clone(),
                source,
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub space: String,
    pub trial: u64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub fixture: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRecord {
    pub name: &'static str,
    pub suite: Suite,
    /// The identity or inequality this property checks.
    pub anchor: &'static str,
    pub dims: Vec<String>,
    pub trials_run: u64,
    pub failures: u64,
    pub worst_residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: u64,
    pub dims: Vec<String>,
    pub suites: Vec<Suite>,
    pub tolerances: ToleranceConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
    pub properties: Vec<PropertyRecord>,
    pub passed: bool,
    pub wall_time_secs: f64,
}

impl SuiteReport {
    pub fn failed(&self) -> impl Iterator<Item = &PropertyRecord> {
        self.properties.iter().filter(|p| !p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyRecord> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.properties {
            let status = if p.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!(
                "{status} {:<34} trials={:<6} failures={:<5} worst={:<10.3e} limit={:.1e}  [{}]\n",
                p.name, p.trials_run, p.failures, p.worst_residual, p.threshold, p.anchor
            ));
            if let Some(w) = &p.witness {
                let loc = w
                    .path
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "(not written; pass --fixtures)".into());
                s.push_str(&format!(
                    "     witness: space {} trial {} residual {:.3e} -> {loc}\n",
                    w.space, w.trial, w.residual
                ));
                if let Some(e) = &w.error {
                    s.push_str(&format!("     error: {e}\n"));
                }
            }
        }
        let failed = self.failed().count();
        s.push_str(&format!(
            "{} properties, {} failed, {:.2}s\n",
            self.properties.len(),
            failed,
            self.wall_time_secs
        ));
        s
    }
}

struct TrialResult {
    trial: u64,
    outcome: Outcome,
    error: Option<String>,
    instance: Option<Vec<Mat>>,
}

fn run_property(prop: &Property, space: ModuleSpace, config: &SuiteConfig) -> Vec<TrialResult> {
    let sys = TripleSystem::new(space, config.tolerances).with_mutation(config.mutation);
    let n = prop.trials.count(config.trials);
    (0..n)
        .into_par_iter()
        .map(|trial| {
            let mut rng =
                trial_generator(config.seed, &[prop.suite.name(), prop.name], space, trial);
            let instance = (prop.draw)(&mut rng, space, trial);
            let (outcome, error) = match (prop.check)(&sys, &instance) {
                Ok(o) => (o, None),
                Err(e) => (Outcome::error(), Some(e.to_string())),
            };
            let keep = !outcome.pass;
            TrialResult {
                trial,
                outcome,
                error,
                instance: keep.then_some(instance),
            }
        })
        .collect()
}

/// Fixture text for a failing instance; replaying it re-runs the property.
pub fn witness_fixture(
    prop: &Property,
    space: ModuleSpace,
    seed: u64,
    trial: u64,
    mutation: Option<Mutation>,
    outcome: &Outcome,
    instance: &[Mat],
) -> String {
    let mut fx = Fixture::new()
        .with_meta("property", prop.name)
        .with_meta("space", format!("{} {}", space.rows(), space.cols()))
        .with_meta("seed", seed)
        .with_meta("trial", trial)
        .with_meta("residual", format!("{:e}", outcome.residual))
        .with_meta("threshold", format!("{:e}", outcome.threshold));
    if let Some(m) = mutation {
        fx = fx.with_meta("mutation", m);
    }
    fx.comments
        .push(format!("slots: {}", prop.slots.join(", ")));
    fx.matrices = instance.to_vec();
    fx.render()
}

/// Runs every selected property over every applicable dimension pair.
pub fn run_suites(config: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    config.validate()?;
    let start = Instant::now();
    let mut records = Vec::new();

    for prop in all_properties()
        .into_iter()
        .filter(|p| config.suites.contains(&p.suite))
        .filter(|p| {
            config
                .only
                .as_ref()
                .is_none_or(|o| o.iter().any(|n| n == p.name))
        })
    {
        let dims: Vec<ModuleSpace> = config
            .dims
            .iter()
            .copied()
            .filter(|s| (prop.applies)(*s))
            .collect();
        let mut record = PropertyRecord {
            name: prop.name,
            suite: prop.suite,
            anchor: prop.anchor,
            dims: dims.iter().map(ToString::to_string).collect(),
            trials_run: 0,
            failures: 0,
            worst_residual: 0.0,
            threshold: 0.0,
            passed: true,
            witness: None,
        };
        let mut worst_failure: Option<(ModuleSpace, TrialResult)> = None;

        for space in dims {
            for r in run_property(&prop, space, config) {
                record.trials_run += 1;
                if !r.outcome.threshold.is_nan() {
                    record.threshold = r.outcome.threshold;
                }
                if r.outcome.residual.is_nan() || r.outcome.residual > record.worst_residual {
                    record.worst_residual = r.outcome.residual;
                }
                if !r.outcome.pass {
                    record.failures += 1;
                    let worse = worst_failure.as_ref().is_none_or(|(_, w)| {
                        !matches!(
                            r.outcome.residual.partial_cmp(&w.outcome.residual),
                            Some(Ordering::Less | Ordering::Equal)
                        )
                    });
                    if worse {
                        worst_failure = Some((space, r));
                    }
                }
            }
        }

        if let Some((space, r)) = worst_failure {
            record.passed = false;
            let fixture = witness_fixture(
                &prop,
                space,
                config.seed,
                r.trial,
                config.mutation,
                &r.outcome,
                r.instance.as_deref().unwrap_or(&[]),
            );
            let path = match &config.fixtures_dir {
                Some(dir) => {
                    let path = dir.join(format!("{}-{}-t{}.fixture", prop.name, space, r.trial));
                    std::fs::write(&path, &fixture).map_err(|source| SuiteError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    Some(path)
                }
                None => None,
            };
            record.witness = Some(Witness {
                space: space.to_string(),
                trial: r.trial,
                residual: r.outcome.residual,
                path,
                error: r.error,
                fixture,
            });
        }
        records.push(record);
    }

    let passed = records.iter().all(|r| r.passed);
    Ok(SuiteReport {
        seed: config.seed,
        trials: config.trials,
        dims: config.dims.iter().map(ToString::to_string).collect(),
        suites: config.suites.clone(),
        tolerances: config.tolerances,
        mutation: config.mutation,
        properties: records,
        passed,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub property: &'static str,
    pub space: ModuleSpace,
    pub outcome: Outcome,
    pub error: Option<String>,
}

/// Re-runs the property named in a witness fixture on its stored instance.
/// The fixture's `mutation` header, if any, is applied.
pub fn replay(text: &str, tolerances: &ToleranceConfig) -> Result<ReplayOutcome, SuiteError> {
    let fx = Fixture::parse(text)?;
    let name = fx
        .meta("property")
        .ok_or_else(|| SuiteError::Config("fixture has no \"# property:\" header".into()))?;
    let prop = find_property(name)
        .ok_or_else(|| SuiteError::Config(format!("unknown property {name:?}")))?;
    let space_str = fx
        .meta("space")
        .ok_or_else(|| SuiteError::Config("fixture has no \"# space:\" header".into()))?;
    let dims: Vec<usize> = space_str
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| SuiteError::Config(format!("bad space header {space_str:?}")))?;
    let space = match dims.as_slice() {
        [m, n] => ModuleSpace::new(*m, *n).map_err(|e| SuiteError::Config(e.to_string()))?,
        _ => {
            return Err(SuiteError::Config(format!(
                "bad space header {space_str:?}"
            )))
        }
    };
    let mutation = fx
        .meta("mutation")
        .map(Mutation::from_str)
        .transpose()
        .map_err(SuiteError::Config)?;
    tolerances
        .validate()
        .map_err(|e| SuiteError::Config(e.to_string()))?;
    let sys = TripleSystem::new(space, *tolerances).with_mutation(mutation);
    let (outcome, error) = match (prop.check)(&sys, &fx.matrices) {
        Ok(o) => (o, None),
        Err(crate::error::Error::Fixture { line, message }) => {
            return Err(SuiteError::Config(format!(
                "fixture line {line}: {message}"
            )))
        }
        Err(e) => (Outcome::error(), Some(e.to_string())),
    };
    Ok(ReplayOutcome {
        property: prop.name,
        space,
        outcome,
        error,
    })
}

pub fn replay_file(path: &Path, tolerances: &ToleranceConfig) -> Result<ReplayOutcome, SuiteError> {
    let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    replay(&text, tolerances)
}
