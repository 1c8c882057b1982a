//! Nearly Kähler structures: `J`, `Ω`, `∇J`, adapted frames and the
//! pointwise identity suite of Gray.
//!
//! Endomorphisms at a point are `DMatrix` values with `A[(i,j)] = A^i_j`, so
//! `A·v` is matrix–vector multiplication and composition is matrix product.
//! `∇J` is stored with the derivative slot first: `dj[x,i,j] = (∇_{∂x}J)^i_j`.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::chart::{to_matrix, ChartMap, DerivativeEngine, LocalGeometry};
use crate::error::{GeomError, Result};
use crate::exterior::{
    codifferential, exterior_derivative, form_from_increasing, form_norm2, hodge_laplacian, hodge_star, interior,
    volume_density, wedge,
};
use crate::jet::Jet;
use crate::tensor::{Slot, Tensor, TensorJet, TensorValue};

/// A chart carrying an almost complex structure compatible with its metric.
pub trait HermitianChart: ChartMap {
    /// `J^i_j` as jets (slots `[Up, Down]`).
    fn complex_structure(&self, p: &[f64], order: usize) -> Result<TensorJet>;
}

/// `Ω_ab = g(J∂_a, ∂_b) = J^c_a g_cb`.
pub fn fundamental_form(j: &TensorJet, g: &TensorJet) -> TensorJet {
    j.contract_with(0, g, 0)
}

/// Sign of the Pfaffian of `Ω` in chart coordinates, i.e. the orientation
/// for which `vol = Ω³/6`.
pub fn orientation_of(chart: &dyn HermitianChart, p: &[f64]) -> Result<f64> {
    let g = chart.metric(p, 0)?;
    let j = chart.complex_structure(p, 0)?;
    let om = fundamental_form(&j, &g).value();
    let n = chart.dim();
    let mut top = om.clone();
    for _ in 1..n / 2 {
        top = wedge(&top, &om)?;
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(if *top.get(&idx) >= 0.0 { 1.0 } else { -1.0 })
}

/// Full contraction `⟨t,t⟩` using `g` on every slot.
pub fn tensor_norm2(t: &TensorValue, g: &TensorValue, ginv: &TensorValue) -> f64 {
    let mut dual = t.clone();
    for (s, slot) in t.slots().iter().enumerate() {
        dual = match slot {
            Slot::Up => dual.lower(s, g),
            Slot::Down => dual.raise(s, ginv),
        };
    }
    t.data().iter().zip(dual.data()).map(|(a, b)| a * b).sum()
}

pub fn tensor_norm(t: &TensorValue, g: &TensorValue, ginv: &TensorValue) -> f64 {
    tensor_norm2(t, g, ginv).max(0.0).sqrt()
}

/// Endomorphism `(Up, Down)` tensor as a matrix.
pub fn endo(t: &TensorValue) -> DMatrix<f64> {
    to_matrix(t)
}

pub fn endo_tensor(m: &DMatrix<f64>) -> TensorValue {
    Tensor::from_fn(m.nrows(), vec![Slot::Up, Slot::Down], |i| m[(i[0], i[1])])
}

pub fn bilinear_tensor(m: &DMatrix<f64>) -> TensorValue {
    Tensor::from_fn(m.nrows(), vec![Slot::Down, Slot::Down], |i| m[(i[0], i[1])])
}

/// Draw a vector uniformly from the unit sphere of `g`.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, chol: &Cholesky<f64, nalgebra::Dyn>) -> DVector<f64> {
    let n = chol.l().nrows();
    loop {
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let nz = z.norm();
        if nz < 1e-8 {
            continue;
        }
        // g = L Lᵀ, v = L⁻ᵀ z ⇒ vᵀ g v = |z|²
        let v = chol.l().transpose().solve_upper_triangular(&z).expect("triangular solve");
        return v / nz;
    }
}

/// The structure at one chart point, as jets of a fixed order plus values.
#[derive(Clone, Debug)]
pub struct NKPoint {
    pub geo: LocalGeometry,
    pub j: TensorJet,
    pub omega: TensorJet,
    /// `∇J`, derivative slot first, one order below `j`.
    pub dj: TensorJet,
    /// `∇Ω`, derivative slot first.
    pub nabla_omega: TensorJet,
    g_val: DMatrix<f64>,
    ginv_val: DMatrix<f64>,
    j_val: DMatrix<f64>,
    dj_val: TensorValue,
}

impl NKPoint {
    /// `order` is the jet order of the metric and of `J` (≥ 1).
    pub fn new(chart: &dyn HermitianChart, engine: &DerivativeEngine, p: &[f64], order: usize) -> Result<Self> {
        let geo = LocalGeometry::new(chart, engine, p, order)?;
        let j = engine.eval(&|q, o| chart.complex_structure(q, o), p, order)?;
        Self::from_parts(geo, j)
    }

    pub fn from_parts(geo: LocalGeometry, j: TensorJet) -> Result<Self> {
        let j_val = endo(&j.value());
        let n = j_val.nrows();
        let res = (&j_val * &j_val + DMatrix::identity(n, n)).amax();
        if res > 1e-8 {
            return Err(GeomError::NotAlmostComplex { residual: res });
        }
        let omega = fundamental_form(&j, &geo.g);
        let dj = geo.covariant(&j)?;
        let nabla_omega = geo.covariant(&omega)?;
        let dj_val = dj.value();
        Ok(NKPoint {
            g_val: geo.gram(),
            ginv_val: to_matrix(&geo.ginv.value()),
            j_val,
            dj_val,
            geo,
            j,
            omega,
            dj,
            nabla_omega,
        })
    }

    pub fn dim(&self) -> usize {
        self.geo.dim()
    }
    pub fn g(&self) -> &DMatrix<f64> {
        &self.g_val
    }
    pub fn ginv(&self) -> &DMatrix<f64> {
        &self.ginv_val
    }
    pub fn jm(&self) -> &DMatrix<f64> {
        &self.j_val
    }
    pub fn g_tensor(&self) -> TensorValue {
        self.geo.g.value()
    }
    pub fn ginv_tensor(&self) -> TensorValue {
        self.geo.ginv.value()
    }

    pub fn cholesky(&self) -> Cholesky<f64, nalgebra::Dyn> {
        Cholesky::new(self.g_val.clone()).expect("positive definite metric")
    }

    pub fn ip(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.g_val * v))
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.ip(u, u).max(0.0).sqrt()
    }

    /// `(∇_X J)` as a matrix.
    pub fn dj_along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|a| x[a] * self.dj_val.get(&[a, i, j])).sum())
    }

    /// `X♭` as a covector tensor.
    pub fn flat(&self, x: &DVector<f64>) -> TensorValue {
        TensorValue::covector((&self.g_val * x).as_slice())
    }

    /// `∇²J` values, slots `[W, X, Up, Down]`; needs `J` of order ≥ 2.
    pub fn second_derivative_j(&self) -> Result<TensorValue> {
        Ok(self.geo.covariant(&self.dj)?.value())
    }

    /// Constant-type ratio `|(∇_XJ)Y|² / (|X|²|Y|² − g(X,Y)² − g(JX,Y)²)`.
    pub fn constant_type(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let jx = &self.j_val * x;
        let den = self.ip(x, x) * self.ip(y, y) - self.ip(x, y).powi(2) - self.ip(&jx, y).powi(2);
        let scale = self.ip(x, x) * self.ip(y, y);
        if den <= 1e-10 * scale.max(1e-300) {
            return Err(GeomError::DegeneratePair("Y lies in the complex line spanned by X".into()));
        }
        let v = self.dj_along(x) * y;
        Ok(self.ip(&v, &v) / den)
    }

    /// `|(∇_X J)X|` for unit `X`: the defining nearly Kähler residual.
    pub fn nk_residual(&self, x: &DVector<f64>) -> f64 {
        self.norm(&(self.dj_along(x) * x))
    }

    /// Residuals of the five Gray identities. `y_field` is any vector field
    /// (jets of order ≥ 1) with value `y`, used for the connection identity.
    pub fn gray_identities(
        &self,
        w: &DVector<f64>,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        y_field: &TensorJet,
    ) -> Result<[f64; 5]> {
        let jm = &self.j_val;
        let dx = self.dj_along(x);
        let dy = self.dj_along(y);
        let djx = self.dj_along(&(jm * x));
        let r1 = self.norm(&(&dx * y + &dy * x));
        let r2 = self.norm(&(&djx * y - &dx * (jm * y)));
        let r3 = self.norm(&(jm * (&dx * y) + &dx * (jm * y))).max(self.norm(&(&dx * (jm * y) - &djx * y)));
        // g(∇_X Y, X) = g(∇_X JY, JX) for a genuine field Y
        let ny = self.geo.covariant(y_field)?.value();
        let jy_field = self.j.contract_with(1, y_field, 0);
        let njy = self.geo.covariant(&jy_field)?.value();
        let along = |t: &TensorValue| -> DVector<f64> {
            let n = self.dim();
            DVector::from_fn(n, |i, _| (0..n).map(|a| x[a] * t.get(&[a, i])).sum())
        };
        let r4 = (self.ip(&along(&ny), x) - self.ip(&along(&njy), &(jm * x))).abs();
        // 2g((∇²_{W,X}J)Y,Z) + σ_{XYZ} g((∇_W J)X, (∇_Y J)JZ)
        let ddj = self.second_derivative_j()?;
        let n = self.dim();
        let mut d2 = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let c = w[a] * x[b];
                if c == 0.0 {
                    continue;
                }
                for i in 0..n {
                    for k in 0..n {
                        d2[(i, k)] += c * ddj.get(&[a, b, i, k]);
                    }
                }
            }
        }
        let dw = self.dj_along(w);
        let dz = self.dj_along(z);
        let cyc = self.ip(&(&dw * x), &(&dy * (jm * z)))
            + self.ip(&(&dw * y), &(&dz * (jm * x)))
            + self.ip(&(&dw * z), &(&dx * (jm * y)));
        let r5 = (2.0 * self.ip(&(&d2 * y), z) + cyc).abs();
        Ok([r1, r2, r3, r4, r5])
    }

    /// Lemma "ortho": `(∇_XJ)Y ⊥ X, JX, Y, JY`.
    pub fn ortho_residual(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let v = self.dj_along(x) * y;
        let jm = &self.j_val;
        [x.clone(), jm * x, y.clone(), jm * y].iter().map(|u| self.ip(&v, u).abs()).fold(0.0, f64::max)
    }

    /// `g((∇_UJ)X,(∇_YJ)Z) = α{g(U,Y)g(X,Z) − g(U,Z)g(X,Y) − g(U,JY)g(X,JZ) + g(U,JZ)g(X,JY)}`, α = 1.
    pub fn type_tensor_residual(&self, u: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> f64 {
        let jm = &self.j_val;
        let lhs = self.ip(&(self.dj_along(u) * x), &(self.dj_along(y) * z));
        let rhs = self.ip(u, y) * self.ip(x, z)
            - self.ip(u, z) * self.ip(x, y)
            - self.ip(u, &(jm * y)) * self.ip(x, &(jm * z))
            + self.ip(u, &(jm * z)) * self.ip(x, &(jm * y));
        (lhs - rhs).abs()
    }

    /// `(∇_XJ)²Y + |X|²Y` for `Y` projected orthogonally to `X, JX`.
    pub fn square_residual(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let jx = &self.j_val * x;
        let xx = self.ip(x, x);
        let mut yp = y.clone();
        yp -= x * (self.ip(y, x) / xx);
        yp -= &jx * (self.ip(y, &jx) / xx);
        let d = self.dj_along(x);
        self.norm(&(&d * (&d * &yp) + &yp * xx))
    }

    /// `|∇*∇Ω − 4Ω|`; needs jets of order ≥ 2.
    pub fn rough_laplacian_residual(&self) -> Result<f64> {
        let nn = self.geo.covariant(&self.nabla_omega)?; // [a, b, x, y]
        let tr = self.geo.ginv.contract_with(0, &nn, 0).contract(0, 1).value();
        let d = tr.scale(-1.0).sub(&self.omega.value().scale(4.0));
        Ok(tensor_norm(&d, &self.g_tensor(), &self.ginv_tensor()))
    }

    /// Complex Gram–Schmidt of `e3` against `e1, Je1` followed by the
    /// adapted completion `e2 = Je1, e4 = Je3, e5 = (∇_{e1}J)e3, e6 = Je5`.
    pub fn adapted_frame(&self, e1: &DVector<f64>, e3: &DVector<f64>) -> Result<[DVector<f64>; 6]> {
        let jm = &self.j_val;
        let n1 = self.norm(e1);
        if n1 < 1e-12 {
            return Err(GeomError::DegeneratePair("e1 vanishes".into()));
        }
        let e1 = e1 / n1;
        let e2 = jm * &e1;
        let mut f = e3.clone();
        let scale = self.norm(e3);
        f -= &e1 * self.ip(e3, &e1);
        f -= &e2 * self.ip(e3, &e2);
        let nf = self.norm(&f);
        if nf <= 1e-8 * scale.max(1e-300) {
            return Err(GeomError::DegeneratePair("e3 lies in span(e1, Je1)".into()));
        }
        let e3 = f / nf;
        let e4 = jm * &e3;
        let e5 = self.dj_along(&e1) * &e3;
        let e6 = jm * &e5;
        Ok([e1, e2, e3, e4, e5, e6])
    }

    /// Residuals of the adapted-frame expansions: orthonormality, `∇J`,
    /// `⋆∇J`, `Ω`.
    pub fn frame_expansion_residuals(&self, frame: &[DVector<f64>; 6]) -> Result<[f64; 4]> {
        let mut ortho: f64 = 0.0;
        for a in 0..6 {
            for b in 0..6 {
                let d = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max((self.ip(&frame[a], &frame[b]) - d).abs());
            }
        }
        let coef = |sets: &[([usize; 3], f64)]| {
            form_from_increasing(6, 3, &0.0, |s| sets.iter().find(|(t, _)| t[..] == *s).map(|(_, c)| *c).unwrap_or(0.0))
        };
        let expected_nj = coef(&[([0, 2, 4], 1.0), ([0, 3, 5], -1.0), ([1, 2, 5], -1.0), ([1, 3, 4], -1.0)]);
        let expected_star = coef(&[([1, 3, 5], -1.0), ([1, 2, 4], 1.0), ([0, 3, 4], 1.0), ([0, 2, 5], 1.0)]);
        let expected_om = form_from_increasing(6, 2, &0.0, |s| match s {
            [0, 1] | [2, 3] | [4, 5] => 1.0,
            _ => 0.0,
        });
        let nj = self.nabla_omega.value();
        let star = hodge_star(&self.geo, &self.nabla_omega.truncate(0))?.value();
        let om = self.omega.value();
        let on_frame = |t: &TensorValue, k: usize| {
            Tensor::from_fn(6, vec![Slot::Down; k], |ix| {
                let vs: Vec<&DVector<f64>> = ix.iter().map(|&i| &frame[i]).collect();
                crate::chart::eval_form(t, &vs)
            })
        };
        Ok([
            ortho,
            on_frame(&nj, 3).max_abs_diff(&expected_nj),
            on_frame(&star, 3).max_abs_diff(&expected_star),
            on_frame(&om, 2).max_abs_diff(&expected_om),
        ])
    }

    /// `|Ric − 5g|`, `scal − 30`, `|Ric* − g|`; needs metric order ≥ 2.
    pub fn einstein_residuals(&self) -> Result<[f64; 3]> {
        let riem = self.geo.riemann()?.value(); // R^a_{xyz}
        let ric = riem.contract(0, 1);
        let g = self.g_tensor();
        let ginv = self.ginv_tensor();
        let r1 = tensor_norm(&ric.sub(&g.scale(5.0)), &g, &ginv);
        let scal: f64 = ginv.contract_with(0, &ric, 0).contract(0, 1).data()[0];
        let jv = self.j.value();
        // Ric*(X,Y) = Σ_a (R(X, J∂_a) J Y)^a = R^a_{x c d} J^c_a J^d_y
        let n = self.dim();
        let rs = Tensor::from_fn(n, vec![Slot::Down, Slot::Down], |ix| {
            let (x, y) = (ix[0], ix[1]);
            let mut acc = 0.0;
            for a in 0..n {
                for c in 0..n {
                    let jca = jv.get(&[c, a]);
                    if *jca == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        acc += riem.get(&[a, x, c, d]) * jca * jv.get(&[d, y]);
                    }
                }
            }
            acc
        });
        let r3 = tensor_norm(&rs.sub(&g), &g, &ginv);
        Ok([r1, scal - 30.0, r3])
    }

    /// Corollary "elementary" for a vector `x`:
    /// `X⌟Ω = JX♭`, `X⌟⋆Ω = JX♭∧Ω`, `X⌟dΩ = JX⌟⋆dΩ`, `|Ω|² − 3`,
    /// `⋆Ω = ½Ω∧Ω`, `vol = Ω³/6`, `Ω∧dΩ = 0`, `⋆X♭ = ½JX♭∧Ω∧Ω`, `dΩ = 3∇Ω`.
    pub fn elementary_residuals(&self, x: &DVector<f64>) -> Result<[f64; 9]> {
        let g = self.g_tensor();
        let ginv = self.ginv_tensor();
        let nrm = |t: &TensorValue| tensor_norm(t, &g, &ginv);
        let om = self.omega.value();
        let om0 = self.omega.truncate(0);
        let xv = TensorValue::vector(x.as_slice());
        let jx = self.jm() * x;
        let jxv = TensorValue::vector(jx.as_slice());
        let jxf = self.flat(&jx);
        let star_om = hodge_star(&self.geo, &om0)?.value();
        let d_om_j = exterior_derivative(&self.omega)?;
        let d_om = d_om_j.value();
        let star_d_om = hodge_star(&self.geo, &d_om_j.truncate(0))?.value();
        let om2 = wedge(&om, &om)?;
        let om3 = wedge(&om2, &om)?;
        let vol_density = volume_density(&self.geo)?.value();
        let vol = form_from_increasing(6, 6, &0.0, |_| vol_density);
        let star_x = hodge_star(&self.geo, &self.flat(x).to_jet(&self.geo.constant(0.0)))?.value();
        let r = [
            nrm(&interior(&xv, &om)?.sub(&jxf)),
            nrm(&interior(&xv, &star_om)?.sub(&wedge(&jxf, &om)?)),
            nrm(&interior(&xv, &d_om)?.sub(&interior(&jxv, &star_d_om)?)),
            form_norm2(&om, &ginv) - 3.0,
            nrm(&star_om.sub(&om2.scale(0.5))),
            nrm(&vol.sub(&om3.scale(1.0 / 6.0))),
            nrm(&wedge(&om, &d_om)?),
            nrm(&star_x.sub(&wedge(&jxf, &om2)?.scale(0.5))),
            nrm(&d_om.sub(&self.nabla_omega.value().scale(3.0))),
        ];
        Ok(r)
    }

    /// `d*Ω` and `ΔΩ − 12Ω`; needs jets of order ≥ 2.
    pub fn laplacian_residuals(&self) -> Result<[f64; 2]> {
        let g = self.g_tensor();
        let ginv = self.ginv_tensor();
        let cod = codifferential(&self.geo, &self.omega)?.value();
        let lap = hodge_laplacian(&self.geo, &self.omega)?.value();
        Ok([tensor_norm(&cod, &g, &ginv), tensor_norm(&lap.sub(&self.omega.value().scale(12.0)), &g, &ginv)])
    }

    /// Corollary "djxi" for a vector field `xi` (jets of order ≥ 2):
    /// `d(Jξ⌟dΩ) + 12 Jξ♭∧Ω` and `3ω_K − Jξ⌟dΩ` with `K = ∇_{Jξ}J`.
    pub fn djxi_residuals(&self, xi: &TensorJet) -> Result<[f64; 2]> {
        let g = self.g_tensor();
        let ginv = self.ginv_tensor();
        let jxi = self.j.contract_with(1, xi, 0); // (Jξ)^i
        let d_om = exterior_derivative(&self.omega)?;
        let contr = interior(&jxi, &d_om)?;
        let lhs = exterior_derivative(&contr)?.value();
        let jzeta = self.geo.lower(&jxi, 0).value();
        let rhs = wedge(&jzeta, &self.omega.value())?.scale(-12.0);
        let jxv = jxi.value();
        let k = self.dj_val.insert_vector(0, &jxv); // K^i_j
        let omega_k = k.contract_with(0, &g, 0); // g(K·,·)
        Ok([tensor_norm(&lhs.sub(&rhs), &g, &ginv), tensor_norm(&omega_k.scale(3.0).sub(&contr.value()), &g, &ginv)])
    }
}

/// A linear vector field `Y(q) = y + B(q − p)` as jets at `p`.
pub fn linear_field(p: &[f64], y: &DVector<f64>, b: &DMatrix<f64>, order: usize) -> TensorJet {
    let c = Jet::coordinates(p, order);
    let n = p.len();
    Tensor::from_fn(n, vec![Slot::Up], |i| {
        let mut acc = c[0].constant_like(y[i[0]]);
        for k in 0..n {
            if b[(i[0], k)] != 0.0 {
                acc = acc.add_ref(&(&c[k] - p[k]).scale(b[(i[0], k)]));
            }
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::BoxDomain;
    use crate::jet::layout;
    use rand::SeedableRng;

    /// Flat ℂ³ with the standard complex structure.
    struct FlatC3(BoxDomain);
    impl ChartMap for FlatC3 {
        fn name(&self) -> String {
            "c3".into()
        }
        fn dim(&self) -> usize {
            6
        }
        fn domain(&self) -> &BoxDomain {
            &self.0
        }
        fn metric(&self, _p: &[f64], order: usize) -> Result<TensorJet> {
            let lay = layout(6, order);
            Ok(Tensor::from_fn(6, vec![Slot::Down, Slot::Down], |i| {
                Jet::constant(lay, if i[0] == i[1] { 1.0 } else { 0.0 })
            }))
        }
    }
    impl HermitianChart for FlatC3 {
        fn complex_structure(&self, _p: &[f64], order: usize) -> Result<TensorJet> {
            let lay = layout(6, order);
            Ok(Tensor::from_fn(6, vec![Slot::Up, Slot::Down], |i| {
                let v = match (i[0], i[1]) {
                    (a, b) if a % 2 == 1 && b == a - 1 => 1.0,
                    (a, b) if a % 2 == 0 && b == a + 1 => -1.0,
                    _ => 0.0,
                };
                Jet::constant(lay, v)
            }))
        }
    }

    #[test]
    fn flat_c3_is_kahler() {
        let c = FlatC3(BoxDomain::cube(6, 0.0, 1.0));
        let pt = NKPoint::new(&c, &DerivativeEngine::exact(), &[0.1; 6], 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x = random_unit(&mut rng, &pt.cholesky());
        assert_eq!(pt.nk_residual(&x), 0.0);
        assert!((form_norm2(&pt.omega.value(), &pt.ginv_tensor()) - 3.0).abs() < 1e-14);
        assert_eq!(orientation_of(&c, &[0.0; 6]).unwrap(), 1.0);
    }

    #[test]
    fn random_unit_vectors_have_unit_length() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.7]);
        let chol = Cholesky::new(g.clone()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let v = random_unit(&mut rng, &chol);
            assert!(((v.transpose() * &g * &v)[(0, 0)] - 1.0).abs() < 1e-13);
        }
    }
}
