//! Terms of the Weitzenböck-type formula for almost Kähler Einstein manifolds
//!
//! `Δs* − 8δ⟨ρ*, ∇_·Ω⟩ = −8|R″|² − |∇*∇Ω|² − |φ|² − (s/2n)|∇Ω|²`,
//!
//! with `ρ*(X,Y) = −Ric*(X,JY)`, `φ(X,Y) = ⟨∇_{JX}Ω, ∇_YΩ⟩`, and `R″` the
//! part of the curvature operator on `J`-anti-invariant 2-forms that
//! anti-commutes with `J`.

use nalgebra::DMatrix;

use crate::chart::{ChartMap, DerivativeEngine, LocalGeometry};
use crate::error::{GeomError, Result};
use crate::exterior::{apply_in_slot, codifferential, form_from_increasing, form_inner, increasing_sets, pull_by};
use crate::nk::{fundamental_form, tensor_norm, tensor_norm2};
use crate::tensor::{Slot, Tensor, TensorJet, TensorValue};

/// Every named term at one point of the base.
#[derive(Clone, Debug)]
pub struct SekigawaTerms {
    pub scal: f64,
    pub scal_star: f64,
    pub rho_star: TensorValue,
    pub phi: TensorValue,
    /// `|R″|²`.
    pub r2: f64,
    /// `|∇*∇Ω|²`.
    pub rough_laplacian2: f64,
    /// `|∇Ω|²`.
    pub nabla_omega2: f64,
    /// `Δs*`.
    pub laplace_scal_star: f64,
    /// `δ⟨ρ*, ∇_·Ω⟩`.
    pub divergence_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|Ric − (s/n)g|`.
    pub einstein_residual: f64,
    /// `|ℛ(Ω) − ρ*|` for the curvature operator `ℛ` used in `R″`.
    pub rho_consistency: f64,
}

impl SekigawaTerms {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Evaluates all terms for the metric of `chart` and the almost complex
/// structure `j` (jets `[Up, Down]`); needs fourth-order metric jets.
pub fn sekigawa_terms_at(
    chart: &dyn ChartMap,
    j: &dyn Fn(&[f64], usize) -> Result<TensorJet>,
    engine: &DerivativeEngine,
    p: &[f64],
) -> Result<SekigawaTerms> {
    const ORDER: usize = 4;
    let geo = LocalGeometry::new(chart, engine, p, ORDER)?;
    let n = geo.dim();
    let g = geo.metric_value();
    let gi = geo.ginv.value();
    let ric = geo.ricci()?;
    let scal_jet = geo.scalar_curvature()?;
    let scal = scal_jet.value();
    let einstein_residual = tensor_norm(&ric.value().sub(&g.scale(scal / n as f64)), &g, &gi);
    if einstein_residual > 1e-6 {
        return Err(GeomError::NonEinstein { residual: einstein_residual });
    }
    let jj = engine.eval(j, p, ORDER)?;
    let omega = fundamental_form(&jj, &geo.g);
    let riem = geo.riemann()?; // R^a_{xyz}, order 2
    let jr = jj.truncate(riem.order());
    // Ric*(X,Y) = R^a_{x c d} J^c_a J^d_y
    let rs = riem.contract_with(2, &jr, 0).contract(0, 3); // [a,x,d,a'] traced to [x, d]
    let ric_star = rs.contract_with(1, &jr, 0); // [x, y]
    let rho_star = apply_in_slot(&ric_star, &jr, 1).scale(-1.0);
    let scal_star_jet = geo.ginv.contract_with(0, &ric_star, 0).contract(0, 1);
    let scal_star = *scal_star_jet.value().scalar_value();
    // Δs* = δ d s*
    let ds = scal_star_jet.gradient()?;
    let laplace_scal_star = *codifferential(&geo, &ds)?.value().scalar_value();
    // β_x = ⟨ρ*, ∇_xΩ⟩ = ½ ρ*_{ab} ∇_xΩ^{ab}
    let nom = geo.covariant(&omega)?; // [x, a, b]
    let nom_up = nom.raise(1, &geo.ginv).raise(2, &geo.ginv);
    let beta = nom_up.contract_with(1, &rho_star, 0).contract(1, 2).scale(0.5);
    let divergence_term = *codifferential(&geo, &beta)?.value().scalar_value();
    let lhs = laplace_scal_star - 8.0 * divergence_term;

    // pointwise quantities
    let nomv = nom.value();
    let slice =
        |x: usize| -> TensorValue { Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |i| *nomv.get(&[x, i[0], i[1]])) };
    let slices: Vec<TensorValue> = (0..n).map(slice).collect();
    let inner =
        TensorValue::from_fn(n, vec![Slot::Down, Slot::Down], |i| form_inner(&slices[i[0]], &slices[i[1]], &gi));
    let jv = jj.value();
    let phi = apply_in_slot(&inner, &jv, 0);
    let nabla_omega2: f64 =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| gi.get(&[a, b]) * inner.get(&[a, b])).sum();
    let nn = geo.covariant(&nom)?; // [a, b, x, y]
    let rough = geo.ginv.contract_with(0, &nn, 0).contract(0, 1).scale(-1.0).value();
    let rough_laplacian2 = form_inner(&rough, &rough, &gi);

    let rv = riem.value();
    let (r2, rho_consistency) = anti_invariant_curvature(&rv, &g, &gi, &jv, &omega.value(), &rho_star.value());
    let rhs = -8.0 * r2 - rough_laplacian2 - tensor_norm2(&phi, &g, &gi) - scal / n as f64 * nabla_omega2;
    Ok(SekigawaTerms {
        scal,
        scal_star,
        rho_star: rho_star.value(),
        phi,
        r2,
        rough_laplacian2,
        nabla_omega2,
        laplace_scal_star,
        divergence_term,
        lhs,
        rhs,
        einstein_residual,
        rho_consistency,
    })
}

/// Curvature operator `ℛ(α)(X,Y) = −½ Σ g(R(X,Y)∂_c, ∂_d) α^{cd}`.
fn curvature_operator(rv: &TensorValue, g: &TensorValue, gi: &TensorValue, a: &TensorValue) -> TensorValue {
    let n = g.dim();
    let a_up = a.raise(0, gi).raise(1, gi);
    let r_low = rv.lower(0, g); // [d, x, y, c]
    Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |ix| {
        let mut acc = 0.0;
        for c in 0..n {
            for d in 0..n {
                acc += r_low.get(&[d, ix[0], ix[1], c]) * a_up.get(&[c, d]);
            }
        }
        -0.5 * acc
    })
}

/// `|R″|²` and `|ℛ(Ω) − ρ*|`.
fn anti_invariant_curvature(
    rv: &TensorValue,
    g: &TensorValue,
    gi: &TensorValue,
    j: &TensorValue,
    omega: &TensorValue,
    rho_star: &TensorValue,
) -> (f64, f64) {
    let n = g.dim();
    let consistency = tensor_norm(&curvature_operator(rv, g, gi, omega).sub(rho_star), g, gi);
    // orthonormal basis of anti-invariant 2-forms
    let mut basis: Vec<TensorValue> = Vec::new();
    for set in increasing_sets(n, 2) {
        let e = form_from_increasing(n, 2, &0.0, |s| if s == set.as_slice() { 1.0 } else { 0.0 });
        let mut v = e.sub(&pull_by(&e, j)).scale(0.5);
        for b in &basis {
            v = v.sub(&b.scale(form_inner(&v, b, gi)));
        }
        let nv = form_inner(&v, &v, gi);
        if nv > 1e-10 {
            basis.push(v.scale(1.0 / nv.sqrt()));
        }
    }
    let m = basis.len();
    let op = |f: &dyn Fn(&TensorValue) -> TensorValue| {
        DMatrix::from_fn(m, m, |p, q| form_inner(&basis[p], &f(&basis[q]), gi))
    };
    let r = op(&|a| curvature_operator(rv, g, gi, a));
    let jm = op(&|a| apply_in_slot(a, j, 0));
    let anti = (&r + &jm * &r * &jm) * 0.5;
    (anti.norm_squared(), consistency)
}
