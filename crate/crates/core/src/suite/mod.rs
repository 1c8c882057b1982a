//! Check suites, run configuration and the batch runner.
//!
//! A run draws `samples` points per suite. Sample `i` of suite `s` uses its
//! own ChaCha stream derived from `(seed, s, i)`, so results do not depend on
//! scheduling. Reports are merged and sorted by check id.

mod sample;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzChart, Gauge, GaugeFunction, Normalization};
use crate::chart::{DerivativeEngine, DerivativeMode};
use crate::error::{GeomError, Result};
use crate::models::registry::{Model, ModelKind};
use crate::report::{emit_jsonl, CheckReport, Measurement};
use sample::{Ctx, LENGTH_PREFIX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Gray,
    NkCore,
    Reduction,
    Lie,
    Base,
    Canonical,
    Ansatz,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Gray, Suite::NkCore, Suite::Reduction, Suite::Lie, Suite::Base, Suite::Canonical, Suite::Ansatz];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gray => "gray",
            Suite::NkCore => "nk-core",
            Suite::Reduction => "reduction",
            Suite::Lie => "lie",
            Suite::Base => "base",
            Suite::Canonical => "canonical",
            Suite::Ansatz => "ansatz",
        }
    }

    /// Whether the suite makes sense on a model.
    pub fn applies_to(self, kind: ModelKind) -> bool {
        let unit_killing = matches!(kind, ModelKind::S3S3 | ModelKind::Ansatz);
        match self {
            Suite::Gray | Suite::NkCore | Suite::Reduction => kind.is_nearly_kahler(),
            Suite::Lie | Suite::Canonical => unit_killing,
            Suite::Base => unit_killing || kind == ModelKind::S2S2,
            Suite::Ansatz => kind == ModelKind::Ansatz,
        }
    }

    fn measure(self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
        match self {
            Suite::Gray => sample::gray(ctx, rng),
            Suite::NkCore => sample::nk_core(ctx, rng),
            Suite::Reduction => sample::reduction(ctx, rng),
            Suite::Lie => sample::lie(ctx, rng),
            Suite::Base => sample::base(ctx, rng),
            Suite::Canonical => sample::canonical(ctx, rng),
            Suite::Ansatz => sample::ansatz(ctx, rng),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| GeomError::UnknownSuite(s.to_string()))
    }
}

/// Default tolerance of a check id. First-derivative identities are held
/// to `1e-8`, identities through curvature or second derivatives to `1e-6`.
pub fn default_tolerance(id: &str) -> f64 {
    const TIGHT: &[&str] = &[
        "nk-condition",
        "constant-type",
        "type-tensor",
        "type-square",
        "homothety",
        "killing-unit-length",
        "sigma-trace",
        "g0-spectrum",
        "idh",
        "ef-orthogonal",
        "cor-dzeta-omega",
        "canon-metric",
        "canon-j",
        "ansatz-da",
        "ansatz-db",
        "ansatz-phi-type",
        "ansatz-phi-fiber",
        "ansatz-phi-norm",
        "ansatz-omega-fiber",
        "ansatz-gauge-invariance",
    ];
    const TIGHT_PREFIX: &[&str] = &["gray-", "elem-", "acs-", "dxi20-", "vert-"];
    match id {
        "ortho" => 1e-9,
        "gray-5" => 1e-6,
        "constant-type-spread"
        | "djxi-omega-k"
        | "canon-xi"
        | "li2"
        | "ess"
        | "g0-jxi-invariant"
        | "lemma-sigma-flat" => 1e-7,
        "base-einstein" | "base-i0-square" | "base-jhat-square" | "base-commute" => 1e-7,
        "sekigawa-lhs" | "sekigawa-rhs" | "sekigawa-balance" => 1e-5,
        "ansatz-alpha" => 1e-5,
        "ansatz-scal" | "ansatz-s3s3-agreement" => 1e-4,
        "ansatz-metric-positive" => 0.0,
        _ if TIGHT.contains(&id) || TIGHT_PREFIX.iter().any(|p| id.starts_with(p)) => 1e-8,
        _ if id.starts_with("frame-") || id.starts_with("ll") => 1e-7,
        _ => 1e-6,
    }
}

/// Negative controls: checks that must fail on a model, with the
/// threshold their residual has to exceed.
pub fn negative_control(kind: ModelKind, id: &str) -> Option<f64> {
    match (kind, id) {
        (ModelKind::S3S3, "nk-product-control") => Some(0.1),
        (ModelKind::S6, "killing-unit-length") => Some(0.05),
        _ => None,
    }
}

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: String,
    /// Suite names; `all` selects every suite applicable to the model.
    pub suites: Vec<String>,
    pub samples: usize,
    pub seed: u64,
    pub deriv_mode: DerivativeMode,
    pub tolerances: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: "s3s3".into(),
            suites: vec!["all".into()],
            samples: 50,
            seed: 7,
            deriv_mode: DerivativeMode::ExactPropagation,
            tolerances: BTreeMap::new(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn new(model: &str, suites: &[&str], samples: usize, seed: u64) -> Self {
        RunConfig {
            model: model.into(),
            suites: suites.iter().map(|s| s.to_string()).collect(),
            samples,
            seed,
            ..Self::default()
        }
    }

    /// Validates the configuration and resolves names.
    pub fn resolve(&self) -> Result<(ModelKind, Vec<Suite>)> {
        let kind: ModelKind = self.model.parse()?;
        if self.samples == 0 {
            return Err(GeomError::Config("sample count must be at least 1".into()));
        }
        if self.suites.is_empty() {
            return Err(GeomError::EmptyReport);
        }
        for (id, t) in &self.tolerances {
            if !(t.is_finite() && *t >= 0.0) {
                return Err(GeomError::Config(format!("tolerance for `{id}` must be finite and non-negative")));
            }
        }
        let mut suites = Vec::new();
        for s in &self.suites {
            if s == "all" {
                suites.extend(Suite::ALL.into_iter().filter(|s| s.applies_to(kind)));
                continue;
            }
            let suite: Suite = s.parse()?;
            if !suite.applies_to(kind) {
                return Err(GeomError::Config(format!("suite `{suite}` does not apply to model `{kind}`")));
            }
            suites.push(suite);
        }
        suites.sort();
        suites.dedup();
        Ok((kind, suites))
    }

    pub fn engine(&self) -> DerivativeEngine {
        DerivativeEngine { mode: self.deriv_mode, ..DerivativeEngine::default() }
    }

    fn tolerance(&self, id: &str) -> f64 {
        self.tolerances.get(id).copied().unwrap_or_else(|| default_tolerance(id))
    }
}

fn stream_rng(seed: u64, suite: Suite, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 40) | sample as u64);
    rng
}

/// Turns per-candidate length records into the single constancy check:
/// the smallest relative spread of `|ξ|` over the samples.
fn length_constancy(by_id: &mut BTreeMap<String, Vec<Measurement>>) {
    let keys: Vec<String> = by_id.keys().filter(|k| k.starts_with(LENGTH_PREFIX)).cloned().collect();
    if keys.is_empty() {
        return;
    }
    let mut best = f64::INFINITY;
    for k in keys {
        let lens: Vec<f64> = by_id.remove(&k).unwrap().iter().filter_map(|m| m.value).map(f64::sqrt).collect();
        let (lo, hi) = lens.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        let mean = lens.iter().sum::<f64>() / lens.len() as f64;
        best = best.min((hi - lo) / mean);
    }
    by_id.insert("killing-unit-length".into(), vec![Measurement::residual("killing-unit-length", best)]);
}

/// Spread of the constant-type samples.
fn constant_type_spread(by_id: &mut BTreeMap<String, Vec<Measurement>>) {
    let Some(ms) = by_id.get("constant-type") else { return };
    let vals: Vec<f64> = ms.iter().filter_map(|m| m.value).collect();
    if vals.is_empty() {
        return;
    }
    let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let m = Measurement { id: "constant-type-spread".into(), residual: hi - lo, value: Some(mean) };
    by_id.insert(m.id.clone(), vec![m]);
}

/// Executes the configured suites.
pub fn run(config: &RunConfig) -> Result<Vec<CheckReport>> {
    let (kind, suites) = config.resolve()?;
    let model = Model::build(kind, config.seed)?;
    run_on(config, model, &suites)
}

/// Executes `suites` on an already built model.
pub fn run_on(config: &RunConfig, model: Model, suites: &[Suite]) -> Result<Vec<CheckReport>> {
    let kind = model.kind;
    let needs_ansatz_extras = suites.contains(&Suite::Ansatz);
    let gauged = if needs_ansatz_extras {
        let gauge = Gauge { f: GaugeFunction::random(config.seed ^ 0xf), h: GaugeFunction::random(config.seed ^ 0xa) };
        Some(Arc::new(AnsatzChart::build(Normalization::derived(), gauge, config.seed)?))
    } else {
        None
    };
    let reference = if needs_ansatz_extras { Some(Model::build(ModelKind::S3S3, config.seed)?) } else { None };
    let ctx = Ctx { model, engine: config.engine(), gauged, reference };

    let tasks: Vec<(Suite, usize)> = suites.iter().flat_map(|&s| (0..config.samples).map(move |i| (s, i))).collect();
    let results: Vec<(Suite, Vec<Measurement>, f64)> = tasks
        .par_iter()
        .map(|&(suite, i)| {
            let mut rng = stream_rng(config.seed, suite, i);
            let t = Instant::now();
            // an evaluation failure at a sample is itself a failed check
            let ms = suite.measure(&ctx, &mut rng).unwrap_or_else(|_| {
                vec![Measurement { id: format!("{suite}-evaluation"), residual: f64::INFINITY, value: None }]
            });
            (suite, ms, t.elapsed().as_secs_f64() * 1e3)
        })
        .collect();

    let mut by_id: BTreeMap<String, Vec<Measurement>> = BTreeMap::new();
    let mut wall: BTreeMap<String, f64> = BTreeMap::new();
    for (_, ms, ms_time) in results {
        for m in ms {
            *wall.entry(m.id.clone()).or_default() += ms_time;
            by_id.entry(m.id.clone()).or_default().push(m);
        }
    }
    length_constancy(&mut by_id);
    constant_type_spread(&mut by_id);

    let reports = by_id
        .iter()
        .map(|(id, ms)| {
            let control = negative_control(kind, id);
            let tol = config.tolerances.get(id).copied().or(control).unwrap_or_else(|| config.tolerance(id));
            CheckReport::aggregate(
                id,
                kind.name(),
                config.seed,
                ms,
                tol,
                control.is_some(),
                wall.get(id).copied().unwrap_or(0.0),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    if reports.is_empty() {
        return Err(GeomError::EmptyReport);
    }
    Ok(reports)
}

/// Writes reports as JSON lines to `path`, creating parent directories.
pub fn write_reports(reports: &[CheckReport], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| GeomError::Io(format!("{}: {e}", dir.display())))?;
    }
    let file = std::fs::File::create(path).map_err(|e| GeomError::Io(format!("{}: {e}", path.display())))?;
    emit_jsonl(reports, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(GeomError::UnknownSuite(_))));
    }

    #[test]
    fn all_expands_per_model() {
        let (_, s) = RunConfig::new("s2s2", &["all"], 1, 0).resolve().unwrap();
        assert_eq!(s, vec![Suite::Base]);
        let (_, s) = RunConfig::new("s6", &["all"], 1, 0).resolve().unwrap();
        assert_eq!(s, vec![Suite::Gray, Suite::NkCore, Suite::Reduction]);
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(RunConfig::new("bogus", &["all"], 1, 0).resolve(), Err(GeomError::UnknownModel(_))));
        assert!(matches!(RunConfig::new("s3s3", &[], 1, 0).resolve(), Err(GeomError::EmptyReport)));
        assert!(matches!(RunConfig::new("s3s3", &["all"], 0, 0).resolve(), Err(GeomError::Config(_))));
        assert!(matches!(RunConfig::new("s2s2", &["lie"], 1, 0).resolve(), Err(GeomError::Config(_))));
    }

    #[test]
    fn tolerance_tiers() {
        assert_eq!(default_tolerance("gray-1"), 1e-8);
        assert_eq!(default_tolerance("gray-5"), 1e-6);
        assert_eq!(default_tolerance("ortho"), 1e-9);
        assert_eq!(default_tolerance("ll3-k"), 1e-7);
        assert_eq!(default_tolerance("prop-laplace-jzeta"), 1e-6);
    }
}
