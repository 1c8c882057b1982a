//! Models selectable by name.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::quaternion::Quat;
use super::s2s2::S2S2Chart;
use super::s3s3::{self, calibrate_scale, S3S3Chart, S3S3Structure};
use super::s6::{self, S6Chart};
use crate::ansatz::{AnsatzChart, Gauge, Normalization};
use crate::chart::Field;
use crate::error::{GeomError, Result};
use crate::nk::HermitianChart;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    S3S3,
    S6,
    S2S2,
    Ansatz,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::S3S3, ModelKind::S6, ModelKind::S2S2, ModelKind::Ansatz];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::S3S3 => "s3s3",
            ModelKind::S6 => "s6",
            ModelKind::S2S2 => "s2s2",
            ModelKind::Ansatz => "ansatz",
        }
    }

    /// Six-dimensional nearly Kähler models (as opposed to the Kähler base).
    pub fn is_nearly_kahler(self) -> bool {
        self != ModelKind::S2S2
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| GeomError::UnknownModel(s.to_string()))
    }
}

/// An instantiated model: chart, Killing fields and controls.
#[derive(Clone)]
pub struct Model {
    pub kind: ModelKind,
    pub chart: Arc<dyn HermitianChart>,
    /// Killing fields tested for constant length.
    pub killing: Vec<(String, Arc<dyn Field>)>,
    /// A Killing field of unit length, when the model has one.
    pub unit_killing: Option<Arc<dyn Field>>,
    /// Same metric family carrying a structure that must fail the NK check.
    pub product_control: Option<Arc<dyn HermitianChart>>,
    pub s3s3: Option<Arc<S3S3Chart>>,
    pub base: Option<Arc<S2S2Chart>>,
    pub ansatz: Option<Arc<AnsatzChart>>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model").field("kind", &self.kind).field("chart", &self.chart.name()).finish()
    }
}

fn random_quat(rng: &mut ChaCha8Rng) -> Quat<f64> {
    let axis = [0; 3].map(|_: i32| rng.gen_range(-1.0..1.0));
    Quat::from_axis_angle(axis, rng.gen_range(0.0..3.0))
}

impl Model {
    /// Builds the model; chart placement is drawn from `seed`. The
    /// `S³×S³` scale is calibrated to constant type one.
    pub fn build(kind: ModelKind, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(match kind {
            ModelKind::S3S3 => {
                let c = calibrate_scale(8, seed)?;
                let (p0, q0) = (random_quat(&mut rng), random_quat(&mut rng));
                let chart = Arc::new(S3S3Chart::new(c, p0.clone(), q0.clone()));
                let killing = s3s3::killing_fields(&chart);
                let product = S3S3Chart::with_structure(c, p0, q0, S3S3Structure::Product);
                Model {
                    kind,
                    unit_killing: Some(killing[0].1.clone()),
                    killing,
                    chart: chart.clone(),
                    product_control: Some(Arc::new(product)),
                    s3s3: Some(chart),
                    base: None,
                    ansatz: None,
                }
            }
            ModelKind::S6 => {
                let chart = Arc::new(S6Chart::random(seed));
                let killing = s6::killing_fields(&chart);
                Model {
                    kind,
                    chart,
                    killing,
                    unit_killing: None,
                    product_control: None,
                    s3s3: None,
                    base: None,
                    ansatz: None,
                }
            }
            ModelKind::S2S2 => {
                let base = Arc::new(S2S2Chart::default());
                Model {
                    kind,
                    chart: base.clone(),
                    killing: Vec::new(),
                    unit_killing: None,
                    product_control: None,
                    s3s3: None,
                    base: Some(base),
                    ansatz: None,
                }
            }
            ModelKind::Ansatz => {
                Self::from_ansatz(Arc::new(AnsatzChart::build(Normalization::derived(), Gauge::default(), seed)?))
            }
        })
    }

    /// Wraps an assembled ansatz chart; `∂_{t₂}` is the unit Killing candidate.
    pub fn from_ansatz(chart: Arc<AnsatzChart>) -> Self {
        let xi: Arc<dyn Field> = Arc::new(chart.killing_field());
        Model {
            kind: ModelKind::Ansatz,
            chart: chart.clone(),
            killing: vec![("mu-dual".into(), xi.clone())],
            unit_killing: Some(xi),
            product_control: None,
            s3s3: None,
            base: None,
            ansatz: Some(chart),
        }
    }

    pub fn by_name(name: &str, seed: u64) -> Result<Self> {
        Self::build(name.parse()?, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!(matches!("bogus".parse::<ModelKind>(), Err(GeomError::UnknownModel(_))));
    }
}
