//! Measurements at one sampled point, per suite.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{potential_residuals, AnsatzChart};
use crate::chart::{eval_form, lie_derivative, ChartMap, DerivativeEngine, Field, LocalGeometry};
use crate::error::Result;
use crate::exterior::apply_in_slot;
use crate::models::registry::Model;
use crate::models::s2s2::factor_structures;
use crate::models::s3s3::S3S3Chart;
use crate::nk::{linear_field, random_unit, tensor_norm, tensor_norm2, HermitianChart, NKPoint};
use crate::reduction::{killing_measurements, sekigawa_terms_at, ReductionState};
use crate::report::Measurement;
use crate::tensor::{Slot, Tensor, TensorJet};

use Measurement as M;

const MARGIN: f64 = 0.1;

/// Shared, read-only inputs of a run.
pub(crate) struct Ctx {
    pub model: Model,
    pub engine: DerivativeEngine,
    /// Gauge-shifted copy of the ansatz chart.
    pub gauged: Option<Arc<AnsatzChart>>,
    /// Direct `S³×S³` model for scalar comparisons.
    pub reference: Option<Model>,
}

fn point(chart: &dyn ChartMap, rng: &mut ChaCha8Rng) -> Vec<f64> {
    chart.domain().sample(rng, MARGIN)
}

fn eval_field(engine: &DerivativeEngine, f: &dyn Field, p: &[f64], order: usize) -> Result<TensorJet> {
    engine.eval(&|x, o| f.eval(x, o), p, order)
}

fn units<const K: usize>(nk: &NKPoint, rng: &mut ChaCha8Rng) -> [DVector<f64>; K] {
    let chol = nk.cholesky();
    std::array::from_fn(|_| random_unit(rng, &chol))
}

fn reduction_state(ctx: &Ctx, m: &Model, p: &[f64]) -> Result<ReductionState> {
    let xi = m.unit_killing.as_ref().expect("suite requires a unit Killing field");
    ReductionState::new(&*m.chart, &**xi, &ctx.engine, p, 2)
}

pub(crate) fn gray(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let p = point(&*ctx.model.chart, rng);
    let nk = NKPoint::new(&*ctx.model.chart, &ctx.engine, &p, 2)?;
    let [w, x, y, z] = units::<4>(&nk, rng);
    let n = nk.dim();
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let yf = linear_field(&p, &y, &b, 1);
    let mut out: Vec<M> = nk
        .gray_identities(&w, &x, &y, &z, &yf)?
        .iter()
        .enumerate()
        .map(|(k, &r)| M::residual(&format!("gray-{}", k + 1), r))
        .collect();
    out.push(M::residual("ortho", nk.ortho_residual(&x, &y)));
    out.push(M::residual("type-tensor", nk.type_tensor_residual(&w, &x, &y, &z)));
    out.push(M::residual("type-square", nk.square_residual(&x, &y)));
    let frame = nk.adapted_frame(&x, &y)?;
    let fr = nk.frame_expansion_residuals(&frame)?;
    for (id, r) in ["frame-orthonormal", "frame-nabla-j", "frame-star-nabla-j", "frame-omega"].iter().zip(fr) {
        out.push(M::residual(id, r));
    }
    let ids = [
        "elem-interior-omega",
        "elem-interior-star-omega",
        "elem-interior-domega",
        "elem-norm-omega",
        "elem-star-omega",
        "elem-volume",
        "elem-omega-wedge-domega",
        "elem-star-one-form",
        "elem-domega",
    ];
    for (id, r) in ids.iter().zip(nk.elementary_residuals(&x)?) {
        out.push(M::residual(id, r));
    }
    Ok(out)
}

/// `α(c)·c` at the scales `c*/2, c*, 2c*` with fixed coordinate vectors.
fn homothety(ctx: &Ctx, base: &S3S3Chart, p: &[f64], x: &DVector<f64>, y: &DVector<f64>) -> Result<M> {
    let mut vals = Vec::new();
    for f in [0.5, 1.0, 2.0] {
        let c = base.scale * f;
        let chart = S3S3Chart::with_structure(c, base.p0.clone(), base.q0.clone(), base.structure);
        vals.push(NKPoint::new(&chart, &ctx.engine, p, 1)?.constant_type(x, y)? * c);
    }
    let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(M { id: "homothety".into(), residual: hi - lo, value: Some(vals[1]) })
}

pub(crate) fn nk_core(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let m = &ctx.model;
    let p = point(&*m.chart, rng);
    let nk = NKPoint::new(&*m.chart, &ctx.engine, &p, 2)?;
    let [x, y] = units::<2>(&nk, rng);
    let [ric, scal, rstar] = nk.einstein_residuals()?;
    let [codiff, lap] = nk.laplacian_residuals()?;
    let mut out = vec![
        M::residual("nk-condition", nk.nk_residual(&x)),
        M::anchored("constant-type", nk.constant_type(&x, &y)?, 1.0),
        M::residual("einstein-ric", ric),
        M::anchored("einstein-scal", 30.0 + scal, 30.0),
        M::residual("ricci-star", rstar),
        M::residual("rough-laplacian-omega", nk.rough_laplacian_residual()?),
        M::residual("codiff-omega", codiff),
        M::residual("laplace-omega", lap),
    ];
    if let Some((_, k)) = m.killing.first() {
        let xi = eval_field(&ctx.engine, &**k, &p, 2)?;
        let [d, k3] = nk.djxi_residuals(&xi)?;
        out.push(M::residual("djxi", d));
        out.push(M::residual("djxi-omega-k", k3));
    }
    if let Some(ctl) = &m.product_control {
        let pc = NKPoint::new(&**ctl, &ctx.engine, &p, 1)?;
        let [u] = units::<1>(&pc, rng);
        out.push(M::residual("nk-product-control", pc.nk_residual(&u)));
    }
    if let Some(c) = &m.s3s3 {
        out.push(homothety(ctx, c, &p, &x, &y)?);
    }
    Ok(out)
}

/// Prefix of per-candidate length records on models without a unit field.
pub(crate) const LENGTH_PREFIX: &str = "killing-length:";

pub(crate) fn reduction(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let m = &ctx.model;
    let p = point(&*m.chart, rng);
    if m.unit_killing.is_none() {
        // No unit candidate: test the Killing property of each candidate and
        // record its length for the cross-sample constancy test.
        let nk = NKPoint::new(&*m.chart, &ctx.engine, &p, 2)?;
        let mut out: Vec<M> = Vec::new();
        for (name, f) in &m.killing {
            let xi = eval_field(&ctx.engine, &**f, &p, 2)?;
            for meas in killing_measurements(&nk, &xi)? {
                if meas.id == "killing-unit-length" {
                    out.push(M { id: format!("{LENGTH_PREFIX}{name}"), residual: 0.0, value: meas.value });
                } else if let Some(prev) = out.iter_mut().find(|o| o.id == meas.id) {
                    prev.residual = prev.residual.max(meas.residual);
                } else {
                    out.push(meas);
                }
            }
        }
        return Ok(out);
    }
    let st = reduction_state(ctx, m, &p)?;
    let mut out = killing_measurements(&st.nk, &st.xi)?;
    out.extend(st.foliation()?);
    out.extend(st.transversals()?);
    out.extend(st.covtrans()?);
    out.extend(st.norms_and_laplacians()?);
    Ok(out)
}

pub(crate) fn lie(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let p = point(&*ctx.model.chart, rng);
    reduction_state(ctx, &ctx.model, &p)?.lie_suite()
}

pub(crate) fn canonical(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let p = point(&*ctx.model.chart, rng);
    let st = reduction_state(ctx, &ctx.model, &p)?;
    let [w] = units::<1>(&st.nk, rng);
    st.canonical_connection(&w)
}

pub(crate) fn base(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let m = &ctx.model;
    let p = point(&*m.chart, rng);
    if let Some(b) = &m.base {
        let geo = LocalGeometry::new(&**b, &ctx.engine, &p, 2)?;
        let g = geo.metric_value();
        let gi = geo.ginv.value();
        let nrm = |t: &crate::TensorValue| tensor_norm(t, &g, &gi);
        let ric = geo.ricci()?.value();
        let i0 = b.i0(&p, 1)?;
        let jh = b.j_hat(&p, 1)?;
        let (iv, jv) = (i0.value(), jh.value());
        let id = Tensor::from_fn(4, vec![Slot::Up, Slot::Down], |i| if i[0] == i[1] { 1.0 } else { 0.0 });
        let s = sekigawa_terms_at(&**b, &|x, o| b.j_hat(x, o), &ctx.engine, &p)?;
        return Ok(vec![
            M::residual("base-einstein", nrm(&ric.sub(&g.scale(12.0)))),
            M::residual("base-i0-square", nrm(&iv.contract_with(1, &iv, 0).add(&id))),
            M::residual("base-jhat-square", nrm(&jv.contract_with(1, &jv, 0).add(&id))),
            M::residual("base-commute", nrm(&iv.contract_with(1, &jv, 0).sub(&jv.contract_with(1, &iv, 0)))),
            M::residual("base-i0-parallel", nrm(&geo.covariant(&i0)?.value())),
            M::residual("base-jhat-parallel", nrm(&geo.covariant(&jh)?.value())),
            M { id: "sekigawa-lhs".into(), residual: s.lhs.abs(), value: Some(s.lhs) },
            M { id: "sekigawa-rhs".into(), residual: s.rhs.abs(), value: Some(s.rhs) },
            M::residual("sekigawa-balance", s.lhs - s.rhs),
            M::residual("sekigawa-rho-consistency", s.rho_consistency),
            M::anchored("sekigawa-scal", s.scal, 48.0),
        ]);
    }
    let st = reduction_state(ctx, m, &p)?;
    let mut out = st.g0_connection()?;
    out.extend(st.kahler_projection()?);
    out.extend(st.psi_and_line_bundle()?);
    Ok(out)
}

fn constant_vector(p: &[f64], k: usize, order: usize) -> TensorJet {
    let z = crate::Jet::coordinates(p, order)[0].constant_like(0.0);
    Tensor::from_fn(p.len(), vec![Slot::Up], |i| z.constant_like(if i[0] == k { 1.0 } else { 0.0 }))
}

/// Scalar invariants at `p`: `α`, scal, `|dζ^{1,1}|²`, and the `Δ(Jζ)` residual.
fn scalar_invariants(ctx: &Ctx, m: &Model, p: &[f64], rng: &mut ChaCha8Rng) -> Result<[f64; 4]> {
    let st = reduction_state(ctx, m, p)?;
    let [x, y] = units::<2>(&st.nk, rng);
    let alpha = st.nk.constant_type(&x, &y)?;
    let scal = 30.0 + st.nk.einstein_residuals()?[1];
    let nl = st.norms_and_laplacians()?;
    let find = |id: &str| nl.iter().find(|m| m.id == id).expect("known check id").clone();
    Ok([alpha, scal, find("lemma-norm-dzeta11").value.unwrap_or(f64::NAN), find("prop-laplace-jzeta").residual])
}

/// Every residual and value of the reduction checks, in a fixed order.
fn invariant_vector(ctx: &Ctx, chart: &AnsatzChart, p: &[f64]) -> Result<Vec<f64>> {
    let xi = Arc::new(chart.clone()).killing_field();
    let st = ReductionState::new(chart, &xi, &ctx.engine, p, 2)?;
    let riem = st.nk.geo.riemann()?.value();
    let mut v = vec![tensor_norm2(&riem, &st.nk.g_tensor(), &st.nk.ginv_tensor()), st.nk.einstein_residuals()?[1]];
    for grp in [st.transversals()?, st.norms_and_laplacians()?, st.lie_suite()?, st.psi_and_line_bundle()?] {
        for m in grp {
            v.push(m.residual);
            v.extend(m.value);
        }
    }
    Ok(v)
}

pub(crate) fn ansatz(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let m = &ctx.model;
    let chart = m.ansatz.as_ref().expect("ansatz model");
    let p = point(&**chart, rng);
    let x4 = &p[..4];
    let [da, db] = potential_residuals(&p, &chart.gauge)?;
    let phi = &chart.phi;
    let (re, im) = phi.parts(x4, 0, false);
    let i0 = factor_structures(x4, 0, &[1.0, 1.0]).value();
    // Φ(I₀·,·) = −iΦ  ⇔  Re(I₀·,·) = Im and Im(I₀·,·) = −Re
    let ty = apply_in_slot(&re.value(), &i0, 0)
        .sub(&im.value())
        .max_abs()
        .max(apply_in_slot(&im.value(), &i0, 0).add(&re.value()).max_abs());
    // L_{∂t₁}Φ = iΦ
    let (re6, im6) = phi.parts(&p, 1, true);
    let dt1 = constant_vector(&p, 4, 1);
    let fiber = lie_derivative(&dt1, &re6)?
        .add(&im6)
        .value()
        .max_abs()
        .max(lie_derivative(&dt1, &im6)?.sub(&re6).value().max_abs());
    let twisted = phi.twisted_parallel_residual(&chart.base, x4, &chart.gauge.f)?;

    let g = chart.metric(&p, 0)?.value();
    let gm = DMatrix::from_row_slice(6, 6, g.data());
    let min_eig = gm.clone().symmetric_eigen().eigenvalues.min();
    let j = chart.complex_structure(&p, 0)?.value();
    let j2 = j.contract_with(1, &j, 0);
    let j_sq = (0..6)
        .flat_map(|a| (0..6).map(move |b| (a, b)))
        .map(|(a, b)| (j2.get(&[a, b]) + if a == b { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    // ω(∂t₂, X^h) for horizontal lifts X^h = ∂_i − A_i∂t₁ − B_i∂t₂
    let omega = chart.two_form(&p, 0)?.value();
    let (theta, mu) = chart.connection_forms(&p, 0)?;
    let (tv, mv) = (theta.value(), mu.value());
    let e5 = DVector::from_fn(6, |i, _| if i == 5 { 1.0 } else { 0.0 });
    let mut fiber_pair: f64 = 0.0;
    for i in 0..4 {
        let mut h = DVector::zeros(6);
        h[i] = 1.0;
        h[4] = -tv.get(&[i]) + if i == 4 { 1.0 } else { 0.0 };
        h[5] = -mv.get(&[i]);
        fiber_pair = fiber_pair.max(eval_form(&omega, &[&e5, &h]).abs());
    }
    let nk = NKPoint::new(&**chart, &ctx.engine, &p, 2)?;
    let [x, y] = units::<2>(&nk, rng);

    let mut out = vec![
        M::residual("ansatz-da", da),
        M::residual("ansatz-db", db),
        M::residual("ansatz-phi-type", ty),
        M::residual("ansatz-phi-fiber", fiber),
        M::residual("ansatz-phi-twisted-parallel", twisted),
        M::anchored("ansatz-phi-norm", phi.re_norm2(&chart.base, x4)?, 32.0 / 3.0),
        M { id: "ansatz-metric-positive".into(), residual: (-min_eig).max(0.0), value: Some(min_eig) },
        M::residual("ansatz-j-square", j_sq),
        M::anchored("ansatz-unit-killing", *g.get(&[5, 5]), 1.0),
        M::residual("ansatz-omega-fiber", fiber_pair),
        M::anchored("ansatz-alpha", nk.constant_type(&x, &y)?, 1.0),
        M::anchored("ansatz-scal", 30.0 + nk.einstein_residuals()?[1], 30.0),
    ];
    if let Some(gauged) = &ctx.gauged {
        let a = invariant_vector(ctx, chart, &p)?;
        let b = invariant_vector(ctx, gauged, &p)?;
        let d = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        out.push(M::residual("ansatz-gauge-invariance", d));
    }
    if let Some(reference) = &ctx.reference {
        let mut r2 = rng.clone();
        let a = scalar_invariants(ctx, m, &p, rng)?;
        let q = point(&*reference.chart, &mut r2);
        let b = scalar_invariants(ctx, reference, &q, &mut r2)?;
        let d = (0..3).map(|k| (a[k] - b[k]).abs()).fold(a[3] + b[3], f64::max);
        out.push(M::residual("ansatz-s3s3-agreement", d));
    }
    Ok(out)
}
