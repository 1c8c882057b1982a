//! Coordinate charts, the derivative engine, and Levi-Civita calculus.
//!
//! Every quantity is computed pointwise: a [`LocalGeometry`] holds the metric
//! jet at one chart point together with the inverse metric and Christoffel
//! symbols, and the free functions here differentiate tensor jets against it.
//!
//! Curvature convention: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`,
//! `Ric(Y,Z) = tr(X ↦ R(X,Y)Z)`; the unit round sphere has positive
//! sectional curvature.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GeomError, Result};
use crate::jet::{layout, Jet};
use crate::tensor::{for_each_index, invert_matrix, Slot, Tensor, TensorJet, TensorValue};

/// Open coordinate box `Π (lo_i, hi_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b), "empty box");
        BoxDomain { lo, hi }
    }

    pub fn cube(dim: usize, center: f64, half: f64) -> Self {
        BoxDomain::new(vec![center - half; dim], vec![center + half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.lo.len() && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *x > *a && *x < *b)
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::OutOfDomain { point: p.to_vec() })
        }
    }

    /// Uniform point avoiding a margin of `margin` (fraction of width) per side.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, margin: f64) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| {
                let w = b - a;
                rng.gen_range(a + margin * w..b - margin * w)
            })
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }
}

/// A coordinate chart carrying a Riemannian metric.
pub trait ChartMap: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn domain(&self) -> &BoxDomain;
    /// Metric components `g_ij` as jets of the given order.
    fn metric(&self, p: &[f64], order: usize) -> Result<TensorJet>;
    /// `+1` when the coordinate frame is positively oriented.
    fn orientation(&self) -> f64 {
        1.0
    }
}

/// A tensor field on a chart, evaluable with derivatives.
pub trait Field: Send + Sync {
    fn slots(&self) -> Vec<Slot>;
    fn eval(&self, p: &[f64], order: usize) -> Result<TensorJet>;
}

type FieldFn = dyn Fn(&[f64], usize) -> Result<TensorJet> + Send + Sync;

/// Closure-backed field.
#[derive(Clone)]
pub struct FnField {
    slots: Vec<Slot>,
    f: Arc<FieldFn>,
}

impl FnField {
    pub fn new(slots: Vec<Slot>, f: impl Fn(&[f64], usize) -> Result<TensorJet> + Send + Sync + 'static) -> Self {
        FnField { slots, f: Arc::new(f) }
    }
}

impl Field for FnField {
    fn slots(&self) -> Vec<Slot> {
        self.slots.clone()
    }
    fn eval(&self, p: &[f64], order: usize) -> Result<TensorJet> {
        (self.f)(p, order)
    }
}

/// How field jets are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DerivativeMode {
    /// Forward propagation of Taylor coefficients through the field formulas.
    ExactPropagation,
    /// Richardson-extrapolated nested central differences of values.
    ExtrapolatedDifferences,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeEngine {
    pub mode: DerivativeMode,
    /// Largest derivative order the engine will hand out.
    pub max_order: usize,
    /// Base step for differences; scaled up with the derivative order.
    pub step: f64,
}

impl Default for DerivativeEngine {
    fn default() -> Self {
        DerivativeEngine { mode: DerivativeMode::ExactPropagation, max_order: 4, step: 2e-3 }
    }
}

impl DerivativeEngine {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn differences() -> Self {
        DerivativeEngine { mode: DerivativeMode::ExtrapolatedDifferences, ..Self::default() }
    }

    /// Evaluate a field at `p` to jets of `order`.
    pub fn eval(&self, f: &dyn Fn(&[f64], usize) -> Result<TensorJet>, p: &[f64], order: usize) -> Result<TensorJet> {
        if order > self.max_order {
            return Err(GeomError::DerivativeOrder { needed: order, available: self.max_order });
        }
        match self.mode {
            DerivativeMode::ExactPropagation => f(p, order),
            DerivativeMode::ExtrapolatedDifferences => self.differences_jet(f, p, order),
        }
    }

    fn differences_jet(
        &self,
        f: &dyn Fn(&[f64], usize) -> Result<TensorJet>,
        p: &[f64],
        order: usize,
    ) -> Result<TensorJet> {
        let n = p.len();
        let lay = layout(n, order);
        let base = f(p, 0)?;
        let slots = base.slots().to_vec();
        let ncomp = base.data().len();
        let mut coeffs = vec![vec![0.0; lay.len()]; ncomp];
        for (c, v) in base.data().iter().enumerate() {
            coeffs[c][0] = v.value();
        }
        for idx in 1..lay.len() {
            let alpha: Vec<u8> = lay.monomial(idx).to_vec();
            let deg = lay.degree_of(idx);
            let h = self.step * (1 << (deg - 1)) as f64;
            let coarse = nested_difference(f, p, &alpha, h)?;
            let fine = nested_difference(f, p, &alpha, 0.5 * h)?;
            let fact: f64 = alpha.iter().map(|&e| (1..=e as u64).product::<u64>() as f64).product();
            for c in 0..ncomp {
                let d = (4.0 * fine[c] - coarse[c]) / 3.0;
                coeffs[c][idx] = d / fact;
            }
        }
        let data = coeffs.into_iter().map(|c| Jet::from_coefficients(lay, c)).collect();
        Ok(Tensor::new(n, slots, data))
    }
}

fn nested_difference(
    f: &dyn Fn(&[f64], usize) -> Result<TensorJet>,
    p: &[f64],
    alpha: &[u8],
    h: f64,
) -> Result<Vec<f64>> {
    match alpha.iter().position(|&e| e > 0) {
        None => Ok(f(p, 0)?.data().iter().map(|j| j.value()).collect()),
        Some(v) => {
            let mut rest = alpha.to_vec();
            rest[v] -= 1;
            let mut pp = p.to_vec();
            pp[v] += h;
            let plus = nested_difference(f, &pp, &rest, h)?;
            pp[v] = p[v] - h;
            let minus = nested_difference(f, &pp, &rest, h)?;
            Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        }
    }
}

/// Christoffel symbols `Γ^k_ij` at a point (slots `[Up k, Down i, Down j]`).
#[derive(Clone, Debug)]
pub struct ConnectionValue {
    pub point: Vec<f64>,
    pub gamma: TensorValue,
    /// `∂_a Γ^k_ij` with the derivative slot first, when available.
    pub first_partials: Option<TensorValue>,
    /// `∂_a ∂_b Γ^k_ij`, when available.
    pub second_partials: Option<TensorValue>,
}

impl ConnectionValue {
    pub fn symbol(&self, k: usize, i: usize, j: usize) -> f64 {
        *self.gamma.get(&[k, i, j])
    }
}

/// Metric, inverse metric and connection jets at one chart point.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub point: Vec<f64>,
    /// Order of the metric jet.
    pub order: usize,
    pub g: TensorJet,
    pub ginv: TensorJet,
    /// Christoffel symbols, one order below the metric.
    pub gamma: TensorJet,
    pub orientation: f64,
}

impl LocalGeometry {
    pub fn new(chart: &dyn ChartMap, engine: &DerivativeEngine, p: &[f64], order: usize) -> Result<Self> {
        chart.domain().check(p)?;
        if order == 0 {
            return Err(GeomError::DerivativeOrder { needed: 1, available: 0 });
        }
        let g = engine.eval(&|q, o| chart.metric(q, o), p, order)?;
        Self::from_metric(g, p, chart.orientation())
    }

    pub fn from_metric(g: TensorJet, p: &[f64], orientation: f64) -> Result<Self> {
        let n = g.dim();
        if !positive_definite(&g.value()) {
            return Err(GeomError::DegenerateMetric { point: p.to_vec() });
        }
        let ginv = Tensor::new(
            n,
            vec![Slot::Up, Slot::Up],
            invert_matrix(n, g.data()).map_err(|_| GeomError::DegenerateMetric { point: p.to_vec() })?,
        );
        let gamma = christoffel_from(&g, &ginv)?;
        let order = g.order();
        Ok(LocalGeometry { point: p.to_vec(), order, g, ginv, gamma, orientation })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn metric_value(&self) -> TensorValue {
        self.g.value()
    }

    pub fn gram(&self) -> DMatrix<f64> {
        to_matrix(&self.g.value())
    }

    /// `∇T` with the derivative slot prepended.
    pub fn covariant(&self, t: &TensorJet) -> Result<TensorJet> {
        covariant_derivative(t, &self.gamma)
    }

    /// Riemann tensor jets `R^a_{xyz} = (R(∂_x,∂_y)∂_z)^a`.
    pub fn riemann(&self) -> Result<TensorJet> {
        riemann_from(&self.gamma)
    }

    pub fn ricci(&self) -> Result<TensorJet> {
        Ok(self.riemann()?.contract(0, 1))
    }

    pub fn scalar_curvature(&self) -> Result<Jet> {
        let ric = self.ricci()?;
        let t = ric.contract_with(0, &self.ginv, 0).contract(0, 1);
        Ok(t.scalar_value().clone())
    }

    pub fn lower(&self, t: &TensorJet, slot: usize) -> TensorJet {
        t.lower(slot, &self.g)
    }

    pub fn raise(&self, t: &TensorJet, slot: usize) -> TensorJet {
        t.raise(slot, &self.ginv)
    }

    /// Constant jet with this geometry's layout.
    pub fn constant(&self, v: f64) -> Jet {
        self.g.proto().constant_like(v)
    }

    pub fn coordinate_jets(&self) -> Vec<Jet> {
        Jet::coordinates(&self.point, self.order)
    }
}

pub fn positive_definite(g: &TensorValue) -> bool {
    let m = to_matrix(g);
    let sym = (&m - m.transpose()).amax() <= 1e-10 * (1.0 + m.amax());
    sym && m.cholesky().is_some()
}

fn christoffel_from(g: &TensorJet, ginv: &TensorJet) -> Result<TensorJet> {
    let n = g.dim();
    let dg = g.gradient()?; // dg[c,a,b] = ∂_c g_ab
                            // first kind: Γ_{l i j} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let first = Tensor::from_fn(n, vec![Slot::Down, Slot::Down, Slot::Down], |ix| {
        let (l, i, j) = (ix[0], ix[1], ix[2]);
        dg.get(&[i, j, l]).add_ref(dg.get(&[j, i, l])).sub_ref(dg.get(&[l, i, j])).scale(0.5)
    });
    // Γ^k_ij = g^{kl} Γ_{lij}
    Ok(ginv.truncate(first.order()).contract_with(1, &first, 0))
}

/// `(∇T)_{a,I} = ∂_a T_I + Σ_up Γ T − Σ_down Γ T`; derivative slot first.
pub fn covariant_derivative(t: &TensorJet, gamma: &TensorJet) -> Result<TensorJet> {
    let n = t.dim();
    let grad = t.gradient()?;
    let r = t.rank();
    let mut slots = vec![Slot::Down];
    slots.extend_from_slice(t.slots());
    let tslots = t.slots().to_vec();
    let mut src = vec![0usize; r];
    let out = Tensor::from_fn(n, slots, |ix| {
        let a = ix[0];
        let mut acc = grad.get(ix).clone();
        for s in 0..r {
            src.copy_from_slice(&ix[1..]);
            for m in 0..n {
                src[s] = m;
                match tslots[s] {
                    Slot::Up => {
                        // Γ^{i_s}_{a m} T^{..m..}
                        acc.mul_acc(gamma.get(&[ix[1 + s], a, m]), t.get(&src));
                    }
                    Slot::Down => {
                        // −Γ^m_{a i_s} T_{..m..}
                        let neg = gamma.get(&[m, a, ix[1 + s]]).scale(-1.0);
                        acc.mul_acc(&neg, t.get(&src));
                    }
                }
            }
        }
        acc
    });
    Ok(out)
}

fn riemann_from(gamma: &TensorJet) -> Result<TensorJet> {
    let n = gamma.dim();
    let dgam = gamma.gradient()?; // dgam[x,a,y,z] = ∂_x Γ^a_yz
    let r = Tensor::from_fn(n, vec![Slot::Up, Slot::Down, Slot::Down, Slot::Down], |ix| {
        let (a, x, y, z) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = dgam.get(&[x, a, y, z]).sub_ref(dgam.get(&[y, a, x, z]));
        for e in 0..n {
            acc.mul_acc(gamma.get(&[a, x, e]), gamma.get(&[e, y, z]));
            let neg = gamma.get(&[a, y, e]).scale(-1.0);
            acc.mul_acc(&neg, gamma.get(&[e, x, z]));
        }
        acc
    });
    Ok(r)
}

/// Lie derivative `L_X T` in coordinates.
pub fn lie_derivative(x: &TensorJet, t: &TensorJet) -> Result<TensorJet> {
    let n = t.dim();
    let dt = t.gradient()?; // dt[c, I]
    let dx = x.gradient()?; // dx[c, a] = ∂_c X^a
    let r = t.rank();
    let tslots = t.slots().to_vec();
    let mut src = vec![0usize; r];
    let mut gi = vec![0usize; r + 1];
    Ok(Tensor::from_fn(n, tslots.clone(), |ix| {
        let mut acc = dt.proto().constant_like(0.0);
        for c in 0..n {
            gi[0] = c;
            gi[1..].copy_from_slice(ix);
            acc.mul_acc(x.get(&[c]), dt.get(&gi));
        }
        for s in 0..r {
            src.copy_from_slice(ix);
            for c in 0..n {
                src[s] = c;
                match tslots[s] {
                    Slot::Up => {
                        let neg = dx.get(&[c, ix[s]]).scale(-1.0);
                        acc.mul_acc(&neg, t.get(&src));
                    }
                    Slot::Down => acc.mul_acc(dx.get(&[ix[s], c]), t.get(&src)),
                }
            }
        }
        acc
    }))
}

/// Lie bracket `[X, Y]` of vector fields.
pub fn lie_bracket(x: &TensorJet, y: &TensorJet) -> Result<TensorJet> {
    lie_derivative(x, y)
}

// ----- operations taking a chart directly -------------------------------

pub fn christoffel_at(chart: &dyn ChartMap, engine: &DerivativeEngine, p: &[f64]) -> Result<ConnectionValue> {
    let order = 3.min(engine.max_order);
    let geo = LocalGeometry::new(chart, engine, p, order)?;
    let gamma = geo.gamma.value();
    let d1 = geo.gamma.gradient().ok();
    let d2 = d1.as_ref().and_then(|d| d.gradient().ok());
    Ok(ConnectionValue {
        point: p.to_vec(),
        gamma,
        first_partials: d1.map(|d| d.value()),
        second_partials: d2.map(|d| d.value()),
    })
}

pub fn covariant_derivative_at(
    chart: &dyn ChartMap,
    engine: &DerivativeEngine,
    field: &dyn Field,
    p: &[f64],
) -> Result<TensorValue> {
    let geo = LocalGeometry::new(chart, engine, p, 1)?;
    let t = engine.eval(&|q, o| field.eval(q, o), p, 1)?;
    Ok(geo.covariant(&t)?.value())
}

/// `∇²_{W,X} T` components with the two derivative slots first (W, then X).
pub fn second_covariant_derivative_at(
    chart: &dyn ChartMap,
    engine: &DerivativeEngine,
    field: &dyn Field,
    p: &[f64],
) -> Result<TensorValue> {
    let geo = LocalGeometry::new(chart, engine, p, 2)?;
    let t = engine.eval(&|q, o| field.eval(q, o), p, 2)?;
    let dt = geo.covariant(&t)?;
    Ok(geo.covariant(&dt)?.value())
}

pub fn riemann_at(chart: &dyn ChartMap, engine: &DerivativeEngine, p: &[f64]) -> Result<TensorValue> {
    Ok(LocalGeometry::new(chart, engine, p, 2)?.riemann()?.value())
}

pub fn ricci_at(chart: &dyn ChartMap, engine: &DerivativeEngine, p: &[f64]) -> Result<TensorValue> {
    Ok(LocalGeometry::new(chart, engine, p, 2)?.ricci()?.value())
}

pub fn scalar_curvature_at(chart: &dyn ChartMap, engine: &DerivativeEngine, p: &[f64]) -> Result<f64> {
    Ok(LocalGeometry::new(chart, engine, p, 2)?.scalar_curvature()?.value())
}

pub fn lie_derivative_at(
    chart: &dyn ChartMap,
    engine: &DerivativeEngine,
    x: &dyn Field,
    t: &dyn Field,
    p: &[f64],
) -> Result<TensorValue> {
    chart.domain().check(p)?;
    let xj = engine.eval(&|q, o| x.eval(q, o), p, 1)?;
    let tj = engine.eval(&|q, o| t.eval(q, o), p, 1)?;
    Ok(lie_derivative(&xj, &tj)?.value())
}

/// Gram–Schmidt with respect to `g` at `p`; columns of the result.
pub fn orthonormal_frame_at(
    chart: &dyn ChartMap,
    engine: &DerivativeEngine,
    p: &[f64],
    seeds: &[Vec<f64>],
) -> Result<Vec<DVector<f64>>> {
    chart.domain().check(p)?;
    let g = engine.eval(&|q, o| chart.metric(q, o), p, 0)?.value();
    gram_schmidt(&to_matrix(&g), seeds)
}

pub fn gram_schmidt(g: &DMatrix<f64>, seeds: &[Vec<f64>]) -> Result<Vec<DVector<f64>>> {
    let n = g.nrows();
    if seeds.len() != n {
        return Err(GeomError::DegenerateSeeds);
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(n);
    for s in seeds {
        let mut v = DVector::from_column_slice(s);
        let scale = inner(g, &v, &v).sqrt();
        for e in &out {
            let c = inner(g, &v, e);
            v -= e * c;
        }
        let nv = inner(g, &v, &v).sqrt();
        if !(nv > 1e-10 * scale.max(1e-300)) {
            return Err(GeomError::DegenerateSeeds);
        }
        out.push(v / nv);
    }
    Ok(out)
}

// ----- small value-level helpers -----------------------------------------

/// Rank-2 tensor to a matrix (row = first slot).
pub fn to_matrix(t: &TensorValue) -> DMatrix<f64> {
    assert_eq!(t.rank(), 2);
    let n = t.dim();
    DMatrix::from_fn(n, n, |i, j| *t.get(&[i, j]))
}

pub fn from_matrix(m: &DMatrix<f64>, slots: [Slot; 2]) -> TensorValue {
    Tensor::from_fn(m.nrows(), slots.to_vec(), |i| m[(i[0], i[1])])
}

pub fn inner(g: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * g * v)[(0, 0)]
}

pub fn vector_value(v: &DVector<f64>) -> TensorValue {
    TensorValue::vector(v.as_slice())
}

/// Evaluate a fully covariant tensor on vectors.
pub fn eval_form(t: &TensorValue, vs: &[&DVector<f64>]) -> f64 {
    assert_eq!(t.rank(), vs.len());
    let n = t.dim();
    let mut acc = 0.0;
    for_each_index(n, vs.len(), |ix| {
        let mut w = *t.get(ix);
        if w == 0.0 {
            return;
        }
        for (k, v) in vs.iter().enumerate() {
            w *= v[ix[k]];
        }
        acc += w;
    });
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Flat(BoxDomain);
    impl ChartMap for Flat {
        fn name(&self) -> String {
            "flat".into()
        }
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn domain(&self) -> &BoxDomain {
            &self.0
        }
        fn metric(&self, p: &[f64], order: usize) -> Result<TensorJet> {
            let lay = layout(p.len(), order);
            Ok(Tensor::from_fn(p.len(), vec![Slot::Down, Slot::Down], |i| {
                Jet::constant(lay, if i[0] == i[1] { 1.0 } else { 0.0 })
            }))
        }
    }

    /// Round 2-sphere of radius r in (φ, ψ).
    struct Sphere2(BoxDomain, f64);
    impl ChartMap for Sphere2 {
        fn name(&self) -> String {
            "s2".into()
        }
        fn dim(&self) -> usize {
            2
        }
        fn domain(&self) -> &BoxDomain {
            &self.0
        }
        fn metric(&self, p: &[f64], order: usize) -> Result<TensorJet> {
            let x = Jet::coordinates(p, order);
            let s = x[0].sin();
            let r2 = self.1 * self.1;
            let z = x[0].constant_like(0.0);
            Ok(Tensor::new(2, vec![Slot::Down, Slot::Down], vec![x[0].constant_like(r2), z.clone(), z, (&s * &s) * r2]))
        }
    }

    #[test]
    fn flat_connection_vanishes() {
        let c = Flat(BoxDomain::cube(4, 0.0, 1.0));
        let con = christoffel_at(&c, &DerivativeEngine::exact(), &[0.1, 0.2, -0.3, 0.4]).unwrap();
        assert_eq!(con.gamma.max_abs(), 0.0);
        assert_eq!(riemann_at(&c, &DerivativeEngine::exact(), &[0.0; 4]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn sphere_equator_symbols() {
        let c = Sphere2(BoxDomain::new(vec![0.1, -3.0], vec![3.0, 3.0]), 1.0);
        let p = [std::f64::consts::FRAC_PI_2, 0.0];
        let con = christoffel_at(&c, &DerivativeEngine::exact(), &p).unwrap();
        assert!(con.symbol(0, 1, 1).abs() < 1e-15);
        assert!(con.symbol(1, 0, 1).abs() < 1e-15);
        let q = [0.7, 0.3];
        let con = christoffel_at(&c, &DerivativeEngine::exact(), &q).unwrap();
        assert!((con.symbol(0, 1, 1) + q[0].sin() * q[0].cos()).abs() < 1e-14);
        assert!((con.symbol(1, 0, 1) - q[0].cos() / q[0].sin()).abs() < 1e-14);
    }

    #[test]
    fn small_sphere_is_einstein_with_constant_twelve() {
        let r = 1.0 / (2.0 * 3f64.sqrt());
        let c = Sphere2(BoxDomain::new(vec![0.1, -3.0], vec![3.0, 3.0]), r);
        let p = [1.1, 0.4];
        let ric = ricci_at(&c, &DerivativeEngine::exact(), &p).unwrap();
        let g = c.metric(&p, 0).unwrap().value();
        for i in 0..2 {
            for j in 0..2 {
                assert!((ric.get(&[i, j]) - 12.0 * g.get(&[i, j])).abs() < 1e-12);
            }
        }
        let s = scalar_curvature_at(&c, &DerivativeEngine::exact(), &p).unwrap();
        assert!((s - 24.0).abs() < 1e-10);
    }

    #[test]
    fn differences_mode_agrees_with_exact() {
        let c = Sphere2(BoxDomain::new(vec![0.1, -3.0], vec![3.0, 3.0]), 1.0);
        let p = [0.9, 0.2];
        let a = christoffel_at(&c, &DerivativeEngine::exact(), &p).unwrap();
        let b = christoffel_at(&c, &DerivativeEngine { max_order: 2, ..DerivativeEngine::differences() }, &p).unwrap();
        assert!(a.gamma.max_abs_diff(&b.gamma) < 1e-8);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let c = Flat(BoxDomain::cube(2, 0.0, 1.0));
        assert!(matches!(
            christoffel_at(&c, &DerivativeEngine::exact(), &[2.0, 0.0]),
            Err(GeomError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn lie_derivative_of_field_along_itself_vanishes() {
        let p = [0.3, -0.4, 0.8];
        let x = Jet::coordinates(&p, 2);
        let v = Tensor::new(3, vec![Slot::Up], vec![x[1].sin(), &x[0] * &x[2], x[0].exp()]);
        let l = lie_derivative(&v, &v).unwrap();
        assert!(l.value().max_abs() < 1e-15);
    }

    #[test]
    fn gram_schmidt_on_flat_coordinates() {
        let g = DMatrix::<f64>::identity(3, 3);
        let seeds = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let f = gram_schmidt(&g, &seeds).unwrap();
        for (i, e) in f.iter().enumerate() {
            assert_eq!(e.as_slice(), seeds[i].as_slice());
        }
        let bad = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(gram_schmidt(&g, &bad), Err(GeomError::DegenerateSeeds));
    }
}
