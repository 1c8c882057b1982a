//! Inverse construction: a nearly Kähler metric on a torus bundle over the
//! Kähler–Einstein base `S²×S²` with radii `1/(2√3)`.
//!
//! Chart coordinates are `(φ₁, ψ₁, φ₂, ψ₂, t₁, t₂)`: spherical coordinates
//! of the base followed by the two fibre coordinates. With connection forms
//! `θ = dt₁ + A`, `μ = dt₂ + B`, `dA = −12ω₀`, `dB = 2g₀(Ĵ·,·)`, the
//! tautological form `Φ = e^{it₁}Φ₀` and a [`Normalization`]:
//!
//! * `g = μ⊗μ + a·θ⊗θ + b·g₀ − c·ReΦ(Ĵ·,·)`,
//! * `ω = (1/(2√3))μ∧θ + ½ImΦ`, `J^c_a = ω_ab g^{bc}`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{BoxDomain, ChartMap, DerivativeEngine, FnField, LocalGeometry};
use crate::error::{GeomError, Result};
use crate::exterior::{apply_in_slot, exterior_derivative, form_norm2, wedge};
use crate::jet::Jet;
use crate::models::registry::Model;
use crate::models::s2s2::{factor_structures, round_metric, spherical_domain, S2S2Chart, BASE_RADIUS};
use crate::nk::{fundamental_form, orientation_of, tensor_norm, HermitianChart};
use crate::reduction::SQRT3;
use crate::report::CheckReport;
use crate::suite::{run_on, RunConfig};
use crate::tensor::{invert_matrix, Slot, Tensor, TensorJet};

/// Norm of `Φ₀`: matches `|ReΨ|²_{g₀} = 32/3` of the forward reduction.
pub const LAMBDA: f64 = 4.0 / SQRT3;

/// Coefficients of `g₁ = a·θ⊗θ + b·g₀ − c·ReΦ(Ĵ·,·)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub fiber: f64,
    pub base: f64,
    pub phi: f64,
}

impl Normalization {
    /// Coefficients implied by the forward reduction: `θ = ζ′ = 2√3 Jζ`
    /// gives `(Jζ)² = θ²/12`, and `g = (4/3)g₀((1 − σ/2)·,·)` on `H`.
    pub fn derived() -> Self {
        Normalization { fiber: 1.0 / 12.0, base: 4.0 / 3.0, phi: 1.0 / (2.0 * SQRT3) }
    }

    /// `g₁ = θ⊗θ + (2/3)g₀ − (1/(2√3))ReΦ(Ĵ·,·)` read literally.
    pub fn literal() -> Self {
        Normalization { fiber: 1.0, base: 2.0 / 3.0, phi: 1.0 / (2.0 * SQRT3) }
    }
}

impl Default for Normalization {
    fn default() -> Self {
        Self::derived()
    }
}

/// Smooth gauge function `Σ amp·sin(k·x + phase)` of the base coordinates.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GaugeFunction {
    pub terms: Vec<([f64; 4], f64, f64)>,
}

impl GaugeFunction {
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..3)
            .map(|_| {
                let k = [0; 4].map(|_: i32| rng.gen_range(-1.5..1.5));
                (k, rng.gen_range(-0.5..0.5), rng.gen_range(0.0..6.0))
            })
            .collect();
        GaugeFunction { terms }
    }

    /// `f` as a jet in the chart variables (only the first four enter).
    pub fn eval(&self, c: &[Jet]) -> Jet {
        let mut acc = c[0].constant_like(0.0);
        for (k, amp, phase) in &self.terms {
            let mut arg = c[0].constant_like(*phase);
            for (kk, ck) in k.iter().zip(c) {
                arg = arg.add_ref(&ck.scale(*kk));
            }
            acc = acc.add_ref(&arg.sin().scale(*amp));
        }
        acc
    }

    /// `df` with jets of `order`.
    pub fn differential(&self, x: &[f64], order: usize) -> TensorJet {
        let c = Jet::coordinates(x, order + 1);
        let f = self.eval(&c);
        Tensor::from_fn(x.len(), vec![Slot::Down], |i| f.partial(i[0]))
    }
}

/// Gauge data: `A → A + df`, `B → B + dh`, `Φ₀ → e^{if}Φ₀`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub f: GaugeFunction,
    pub h: GaugeFunction,
}

/// Connection potentials as 1-forms on the chart.
#[derive(Clone, Debug)]
pub struct Potentials {
    pub a: TensorJet,
    pub b: TensorJet,
}

fn check_poles(x: &[f64]) -> Result<()> {
    for k in [0, 2] {
        if x[k].sin() < 1e-3 {
            return Err(GeomError::ChartSingularity(format!("φ{} = {} is at a pole", k / 2 + 1, x[k])));
        }
    }
    Ok(())
}

/// Monopole potentials `A = −Σ(1−cos φ_k)dψ_k` and
/// `B = (1/6)[(1−cos φ₁)dψ₁ − (1−cos φ₂)dψ₂]` (for radius `1/(2√3)`), plus gauge.
pub fn build_potentials(x: &[f64], order: usize, gauge: &Gauge) -> Result<Potentials> {
    check_poles(x)?;
    let n = x.len();
    let c = Jet::coordinates(x, order);
    let zero = c[0].constant_like(0.0);
    let r2 = BASE_RADIUS * BASE_RADIUS;
    let mono = |k: usize| &(-&c[2 * k].cos()) + 1.0; // 1 − cos φ_k
    let mut a = Tensor::zeros_like(&zero, n, vec![Slot::Down]);
    let mut b = Tensor::zeros_like(&zero, n, vec![Slot::Down]);
    // dA = −12r²Σ sin φ dφ∧dψ, dB = 2r²(sin φ₁ dφ₁∧dψ₁ − sin φ₂ dφ₂∧dψ₂)
    for (k, sb) in [(0usize, 1.0), (1usize, -1.0)] {
        a.set(&[2 * k + 1], mono(k).scale(-12.0 * r2));
        b.set(&[2 * k + 1], mono(k).scale(2.0 * r2 * sb));
    }
    Ok(Potentials { a: a.add(&gauge.f.differential(x, order)), b: b.add(&gauge.h.differential(x, order)) })
}

/// `Φ₀ = λ e^{i(m₁ψ₁ + m₂ψ₂ + f)} ε̄₁∧ε̄₂` with `ε_k = r(dφ_k + i sin φ_k dψ_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TautologicalForm {
    pub lambda: f64,
    pub winding: [i32; 2],
    pub gauge: GaugeFunction,
}

impl TautologicalForm {
    /// `(ReΦ, ImΦ)` on a chart of dimension `x.len()`; `fiber` selects
    /// whether the `e^{it₁}` factor (coordinate 4) is included.
    pub fn parts(&self, x: &[f64], order: usize, fiber: bool) -> (TensorJet, TensorJet) {
        let n = x.len();
        let c = Jet::coordinates(x, order);
        let r = BASE_RADIUS;
        let zero = c[0].constant_like(0.0);
        // coframes e¹_k = r dφ_k, e²_k = r sin φ_k dψ_k
        let frame = |k: usize, which: usize| -> TensorJet {
            let mut t = Tensor::zeros_like(&zero, n, vec![Slot::Down]);
            if which == 0 {
                t.set(&[2 * k], c[0].constant_like(r));
            } else {
                t.set(&[2 * k + 1], c[2 * k].sin().scale(r));
            }
            t
        };
        let (e11, e21, e12, e22) = (frame(0, 0), frame(0, 1), frame(1, 0), frame(1, 1));
        // ε̄₁∧ε̄₂ = P + iQ
        let p = wedge(&e11, &e12).unwrap().sub(&wedge(&e21, &e22).unwrap());
        let q = wedge(&e11, &e22).unwrap().add(&wedge(&e21, &e12).unwrap()).scale(-1.0);
        let mut phase = c[1].scale(self.winding[0] as f64).add_ref(&c[3].scale(self.winding[1] as f64));
        phase = phase.add_ref(&self.gauge.eval(&c));
        if fiber {
            phase = phase.add_ref(&c[4]);
        }
        let (co, si) = (phase.cos(), phase.sin());
        let re = p.times(&co).sub(&q.times(&si)).scale(self.lambda);
        let im = p.times(&si).add(&q.times(&co)).scale(self.lambda);
        (re, im)
    }

    /// Twisted derivative `∇Φ₀ − iA⊗Φ₀` on the base, split into real parts:
    /// `D Re = ∇Re + A⊗Im`, `D Im = ∇Im − A⊗Re`. Returns the larger norm.
    pub fn twisted_parallel_residual(&self, base: &S2S2Chart, x: &[f64], gauge_a: &GaugeFunction) -> Result<f64> {
        let geo = LocalGeometry::new(base, &DerivativeEngine::exact(), x, 2)?;
        let (re, im) = self.parts(x, 1, false);
        let pot = build_potentials(x, 1, &Gauge { f: gauge_a.clone(), h: GaugeFunction::default() })?;
        let dre = geo.covariant(&re)?.add(&pot.a.outer(&im).truncate(0));
        let dim = geo.covariant(&im)?.sub(&pot.a.outer(&re).truncate(0));
        let g = geo.metric_value();
        let gi = geo.ginv.value();
        Ok(tensor_norm(&dre.value(), &g, &gi).max(tensor_norm(&dim.value(), &g, &gi)))
    }

    /// `|ReΦ₀|²` in the base metric (form norm).
    pub fn re_norm2(&self, base: &S2S2Chart, x: &[f64]) -> Result<f64> {
        let g = base.metric(x, 0)?;
        let gi = Tensor::new(4, vec![Slot::Up, Slot::Up], invert_matrix(4, g.data())?);
        Ok(form_norm2(&self.parts(x, 0, false).0.value(), &gi.value()))
    }
}

/// Searches the windings `m ∈ {−2,…,2}²` for the twisted-parallel `Φ₀`.
pub fn build_tautological(base: &S2S2Chart, lambda: f64, gauge: &Gauge, seed: u64) -> Result<TautologicalForm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..3).map(|_| base.domain().sample(&mut rng, 0.05)).collect();
    let mut best: Option<(f64, TautologicalForm)> = None;
    for m1 in -2..=2 {
        for m2 in -2..=2 {
            let cand = TautologicalForm { lambda, winding: [m1, m2], gauge: gauge.f.clone() };
            let mut worst: f64 = 0.0;
            for p in &pts {
                worst = worst.max(cand.twisted_parallel_residual(base, p, &gauge.f)?);
            }
            if best.as_ref().is_none_or(|(b, _)| worst < *b) {
                best = Some((worst, cand));
            }
        }
    }
    let (res, form) = best.expect("non-empty search family");
    if res > 1e-6 {
        return Err(GeomError::Construction(format!("no twisted-parallel tautological form (best residual {res:e})")));
    }
    Ok(form)
}

/// The assembled 6-dimensional chart.
#[derive(Clone, Debug)]
pub struct AnsatzChart {
    pub base: S2S2Chart,
    pub normalization: Normalization,
    pub phi: TautologicalForm,
    pub gauge: Gauge,
    domain: BoxDomain,
    orientation: f64,
}

impl AnsatzChart {
    pub fn new(normalization: Normalization, phi: TautologicalForm, gauge: Gauge) -> Self {
        let base_dom = spherical_domain(2);
        let mut lo = base_dom.lo.clone();
        let mut hi = base_dom.hi.clone();
        lo.extend([-3.0, -3.0]);
        hi.extend([3.0, 3.0]);
        let mut c = AnsatzChart {
            base: S2S2Chart::default(),
            normalization,
            phi,
            gauge,
            domain: BoxDomain::new(lo, hi),
            orientation: 1.0,
        };
        c.orientation = orientation_of(&c, &c.domain.center()).unwrap_or(1.0);
        c
    }

    /// Builds potentials and the tautological form, then assembles.
    pub fn build(normalization: Normalization, gauge: Gauge, seed: u64) -> Result<Self> {
        let base = S2S2Chart::default();
        let phi = build_tautological(&base, LAMBDA, &gauge, seed)?;
        Ok(Self::new(normalization, phi, gauge))
    }

    /// `(θ, μ)` as 1-forms.
    pub fn connection_forms(&self, x: &[f64], order: usize) -> Result<(TensorJet, TensorJet)> {
        let pot = build_potentials(x, order, &self.gauge)?;
        let proto = pot.a.proto().constant_like(0.0);
        let unit =
            |k: usize| Tensor::from_fn(6, vec![Slot::Down], |i| proto.constant_like(if i[0] == k { 1.0 } else { 0.0 }));
        Ok((pot.a.add(&unit(4)), pot.b.add(&unit(5))))
    }

    /// `ω = (1/(2√3))μ∧θ + ½ImΦ`.
    pub fn two_form(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.domain.check(x)?;
        let (theta, mu) = self.connection_forms(x, order)?;
        let (_, im) = self.phi.parts(x, order, true);
        Ok(wedge(&mu, &theta)?.scale(1.0 / (2.0 * SQRT3)).add(&im.scale(0.5)))
    }

    /// The unit Killing field `∂_{t₂}` dual to `μ`.
    pub fn killing_field(self: &Arc<Self>) -> FnField {
        let me = Arc::clone(self);
        FnField::new(vec![Slot::Up], move |x, order| {
            me.domain.check(x)?;
            let z = Jet::coordinates(x, order)[0].constant_like(0.0);
            Ok(Tensor::from_fn(6, vec![Slot::Up], |i| z.constant_like(if i[0] == 5 { 1.0 } else { 0.0 })))
        })
    }
}

impl ChartMap for AnsatzChart {
    fn name(&self) -> String {
        "ansatz".into()
    }
    fn dim(&self) -> usize {
        6
    }
    fn domain(&self) -> &BoxDomain {
        &self.domain
    }
    fn metric(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.domain.check(x)?;
        let nz = self.normalization;
        let (theta, mu) = self.connection_forms(x, order)?;
        let g0 = round_metric(x, order, &self.base.radii);
        let jhat = factor_structures(x, order, &[1.0, -1.0]);
        let (re, _) = self.phi.parts(x, order, true);
        let twist = apply_in_slot(&re, &jhat, 0);
        Ok(mu.outer(&mu).add(&theta.outer(&theta).scale(nz.fiber)).add(&g0.scale(nz.base)).sub(&twist.scale(nz.phi)))
    }
    fn orientation(&self) -> f64 {
        self.orientation
    }
}

impl HermitianChart for AnsatzChart {
    fn complex_structure(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        let g = self.metric(x, order)?;
        let gi = Tensor::new(6, vec![Slot::Up, Slot::Up], invert_matrix(6, g.data())?);
        let w = self.two_form(x, order)?;
        // J^c_a = ω_ab g^{bc}
        Ok(w.contract_with(1, &gi, 0).permute(&[1, 0]))
    }
}

/// Runs every suite applicable to the ansatz on `chart`: the nearly Kähler
/// suite, the unit Killing field `∂_{t₂}`, the full reduction of the result
/// and the construction checks.
pub fn certify_nk(chart: Arc<AnsatzChart>, samples: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let config = RunConfig::new("ansatz", &["all"], samples, seed);
    let (_, suites) = config.resolve()?;
    run_on(&config, Model::from_ansatz(chart), &suites)
}

/// `|dA + 12ω₀|` and `|dB − 2g₀(Ĵ·,·)|` at a chart point.
pub fn potential_residuals(x: &[f64], gauge: &Gauge) -> Result<[f64; 2]> {
    let pot = build_potentials(x, 1, gauge)?;
    let g0 = round_metric(x, 0, &[BASE_RADIUS, BASE_RADIUS]);
    let i0 = factor_structures(x, 0, &[1.0, 1.0]);
    let jhat = factor_structures(x, 0, &[1.0, -1.0]);
    let w0 = fundamental_form(&i0, &g0);
    let wj = fundamental_form(&jhat, &g0);
    let da = exterior_derivative(&pot.a)?;
    let db = exterior_derivative(&pot.b)?;
    Ok([da.add(&w0.scale(12.0)).value().max_abs(), db.sub(&wj.scale(2.0)).value().max_abs()])
}
