//! Residual measurements and aggregated check reports.

use serde::{Deserialize, Serialize};

/// One pointwise outcome of a check: a non-negative residual and, for
/// checks anchored to a number, the measured value itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub id: String,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
}

impl Measurement {
    pub fn residual(id: &str, residual: f64) -> Self {
        Measurement { id: id.to_string(), residual: residual.abs(), value: None }
    }

    /// Records `value` and its deviation from `expected`.
    pub fn anchored(id: &str, value: f64, expected: f64) -> Self {
        Measurement { id: id.to_string(), residual: (value - expected).abs(), value: Some(value) }
    }
}

/// Version of the JSON-lines record layout written by [`emit_jsonl`].
pub const SCHEMA_VERSION: u32 = 1;

/// Residual quantiles over the sampled points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles of `sorted` (ascending, non-empty).
    fn of_sorted(sorted: &[f64]) -> Self {
        let at = |q: f64| sorted[((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1];
        Quantiles { p50: at(0.5), p90: at(0.9), p99: at(0.99) }
    }
}

/// Aggregate of one check over all sampled points.
///
/// `pass` is exactly `max_residual <= tolerance`. Negative controls carry
/// `expected_fail`; for them a failing check is the desired outcome, see
/// [`CheckReport::ok`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub id: String,
    pub model: String,
    pub seed: u64,
    pub samples: usize,
    pub max_residual: f64,
    pub quantiles: Quantiles,
    pub pass: bool,
    pub tolerance: f64,
    pub expected_fail: bool,
    /// Mean of the measured values, for checks anchored to a number.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    pub wall_ms: f64,
}

/// Non-finite residuals are recorded as `f64::MAX` so that reports stay
/// serializable and the check fails.
fn sanitize(r: f64) -> f64 {
    if r.is_finite() {
        r
    } else {
        f64::MAX
    }
}

impl CheckReport {
    /// Aggregates pointwise measurements sharing one id.
    pub fn aggregate(
        id: &str,
        model: &str,
        seed: u64,
        points: &[Measurement],
        tolerance: f64,
        expected_fail: bool,
        wall_ms: f64,
    ) -> crate::Result<Self> {
        if points.is_empty() {
            return Err(crate::GeomError::EmptyReport);
        }
        let mut res: Vec<f64> = points.iter().map(|m| sanitize(m.residual)).collect();
        res.sort_by(f64::total_cmp);
        let max_residual = *res.last().unwrap();
        let values: Vec<f64> = points.iter().filter_map(|m| m.value).collect();
        let value = (!values.is_empty()).then(|| sanitize(values.iter().sum::<f64>() / values.len() as f64));
        Ok(CheckReport {
            schema_version: SCHEMA_VERSION,
            id: id.to_string(),
            model: model.to_string(),
            seed,
            samples: points.len(),
            max_residual,
            quantiles: Quantiles::of_sorted(&res),
            pass: max_residual <= tolerance,
            tolerance,
            expected_fail,
            value,
            wall_ms,
        })
    }

    /// Whether the outcome is the declared one: pass, or fail for an
    /// expected-fail control.
    pub fn ok(&self) -> bool {
        self.pass != self.expected_fail
    }
}

/// Writes one JSON record per line, in the given order.
pub fn emit_jsonl<W: std::io::Write>(reports: &[CheckReport], mut out: W) -> crate::Result<()> {
    if reports.is_empty() {
        return Err(crate::GeomError::EmptyReport);
    }
    for r in reports {
        let line = serde_json::to_string(r).map_err(|e| crate::GeomError::Serialization(e.to_string()))?;
        writeln!(out, "{line}").map_err(|e| crate::GeomError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Parses records written by [`emit_jsonl`].
pub fn parse_jsonl(text: &str) -> crate::Result<Vec<CheckReport>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| crate::GeomError::Serialization(e.to_string())))
        .collect()
}

/// Text histogram of `log10(max_residual)` in unit-width bins.
pub fn histogram(reports: &[CheckReport]) -> String {
    let mut bins = std::collections::BTreeMap::<i32, usize>::new();
    for r in reports {
        let b = if r.max_residual > 0.0 { r.max_residual.log10().floor() as i32 } else { -300 };
        *bins.entry(b.max(-17)).or_default() += 1;
    }
    let mut s = String::new();
    for (b, n) in bins {
        let label = if b == -17 { "<1e-16".to_string() } else { format!("1e{b}") };
        s.push_str(&format!("{label:>7} | {} {n}\n", "#".repeat(n.min(60))));
    }
    s
}
