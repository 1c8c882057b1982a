//! Pointwise residuals of the reduction identities.

use nalgebra::DVector;

use super::{compose, flat_endo, ReductionState, SQRT3};
use crate::chart::lie_derivative;
use crate::error::Result;
use crate::exterior::{
    apply_in_slot, codifferential, exterior_derivative, form_inner, form_norm2, hodge_laplacian, interior,
    type_decompose, wedge,
};
use crate::nk::{tensor_norm, NKPoint};
use crate::report::Measurement;
use crate::tensor::{TensorJet, TensorValue};

fn r(id: &str, v: f64) -> Measurement {
    Measurement::residual(id, v)
}

/// Killing and unit-length residuals of a vector field; needs jets of order ≥ 2.
pub fn killing_measurements(nk: &NKPoint, xi: &TensorJet) -> Result<Vec<Measurement>> {
    let g = nk.g_tensor();
    let gi = nk.ginv_tensor();
    let nrm = |t: &TensorValue| tensor_norm(t, &g, &gi);
    let len2 = *nk.geo.lower(xi, 0).contract_with(0, xi, 0).value().scalar_value();
    let d_om = exterior_derivative(&nk.omega)?;
    Ok(vec![
        r("killing-lie-g", nrm(&lie_derivative(xi, &nk.geo.g)?.value())),
        Measurement::anchored("killing-unit-length", len2, 1.0),
        r("killing-lie-j", nrm(&lie_derivative(xi, &nk.j)?.value())),
        r("killing-lie-omega", nrm(&lie_derivative(xi, &nk.omega)?.value())),
        r("killing-lie-domega", nrm(&lie_derivative(xi, &d_om)?.value())),
    ])
}

impl ReductionState {
    fn nv(&self, t: &TensorJet) -> f64 {
        self.norm(&t.value())
    }

    fn nhv(&self, t: &TensorJet) -> f64 {
        self.norm_h(&t.value())
    }

    /// Relations of the `{ξ, Jξ}` foliation.
    pub fn foliation(&self) -> Result<Vec<Measurement>> {
        let njxi = self.nk.geo.covariant(&self.jxi)?; // [x, i]
        let along = |d: &TensorJet, v: &TensorJet| d.contract_with(0, v, 0);
        Ok(vec![
            r("vert-nabla-xi-xi", self.nv(&along(&self.nabla_xi, &self.xi))),
            r("vert-nabla-jxi-xi", self.nv(&along(&self.nabla_xi, &self.jxi))),
            r("vert-nabla-xi-jxi", self.nv(&along(&njxi, &self.xi))),
            r("vert-nabla-jxi-jxi", self.nv(&along(&njxi, &self.jxi))),
            r("vert-bracket", self.nv(&lie_derivative(&self.xi, &self.jxi)?)),
            r("vert-xi-dzeta", self.nv(&interior(&self.xi, &self.dzeta)?)),
            r("vert-jxi-dzeta", self.nv(&interior(&self.jxi, &self.dzeta)?)),
        ])
    }

    /// Algebra of the transversal structures.
    pub fn transversals(&self) -> Result<Vec<Measurement>> {
        let (i, k, jh, s, ph) = (&self.i, &self.k, &self.jhat, &self.sigma, &self.pi_h);
        let j = &self.nk.j;
        let g = &self.nk.geo.g;
        let sq = |a: &TensorJet| self.nv(&compose(a, a).add(ph));
        let comm = |a: &TensorJet, b: &TensorJet| self.nv(&compose(a, b).sub(&compose(b, a)));
        let transversal = |a: &TensorJet| self.nv(&a.sub(&compose(ph, &compose(a, ph))));
        let skew = |a: &TensorJet| {
            let w = flat_endo(a, g);
            self.nv(&w.add(&w.permute(&[1, 0])))
        };
        // (∇_XJ)Y − g(IX,Y)ξ − g(KX,Y)Jξ on H
        let split = self
            .nk
            .dj
            .sub(&self.omega_i.outer(&self.xi).permute(&[0, 2, 1]))
            .sub(&self.omega_k.outer(&self.jxi).permute(&[0, 2, 1]));
        let dz = type_decompose(&self.dzeta, j);
        let ge = self.nk.g_tensor();
        let gi = self.nk.ginv_tensor();
        let spec = self.g0_spectrum();
        let expected = [0.5, 0.5, 1.0, 1.0, 1.5, 1.5];
        let spec_dev = spec.iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let sv = s.value();
        let trace_sigma: f64 = (0..self.dim()).map(|a| sv.get(&[a, a])).sum();
        let half = |sign: f64| ph.add(&s.scale(0.5 * sign));
        Ok(vec![
            r("acs-i-square", sq(i)),
            r("acs-k-square", sq(k)),
            r("acs-jhat-square", sq(jh)),
            r("acs-sigma-square", self.nv(&compose(s, s).sub(ph))),
            r("acs-transversal", transversal(i).max(transversal(k)).max(transversal(jh)).max(transversal(s))),
            r("acs-compatible", skew(i).max(skew(k)).max(skew(jh))),
            r("acs-k-eq-ij", self.nv(&k.sub(&compose(i, j)))),
            r("acs-ij-anticommute", self.nv(&compose(i, j).add(&compose(j, i)))),
            r("acs-jhat-commute", comm(jh, j).max(comm(jh, i)).max(comm(jh, k))),
            r("acs-nabla-j-split", self.nhv(&split)),
            r("acs-f-eq-je", self.nv(&compose(j, &self.pi_e()).sub(&compose(&self.pi_f(), j)))),
            r("dxi20-two-zero", self.nv(&dz.two_zero.add(&self.omega_k))),
            r("dxi20-one-one", self.nv(&dz.one_one.sub(&self.omega_jhat.scale(2.0)))),
            Measurement::anchored("cor-dzeta-omega", form_inner(&self.dzeta.value(), &self.nk.omega.value(), &gi), 0.0),
            Measurement::anchored("sigma-trace", trace_sigma, 0.0),
            r("g0-spectrum", spec_dev),
            r("idh", self.nv(&compose(&half(1.0), &half(-1.0)).sub(&ph.scale(0.75)))),
            r(
                "ef-orthogonal",
                tensor_norm(&flat_endo(&self.pi_e(), g).contract_with(1, &self.pi_f(), 0).value(), &ge, &gi),
            ),
        ])
    }

    /// `I` and `K` are parallel along `H`.
    pub fn covtrans(&self) -> Result<Vec<Measurement>> {
        let geo = &self.nk.geo;
        Ok(vec![
            r("covtrans-i", self.nhv(&geo.covariant(&self.i)?)),
            r("covtrans-k", self.nhv(&geo.covariant(&self.k)?)),
        ])
    }

    /// Pointwise norms and Laplacian eigen-relations.
    pub fn norms_and_laplacians(&self) -> Result<Vec<Measurement>> {
        let geo = &self.nk.geo;
        let gi = self.nk.ginv_tensor();
        let dz = type_decompose(&self.dzeta.value(), &self.nk.j.value());
        let djz = exterior_derivative(&self.jzeta)?.value();
        let jhat_norm2 = crate::nk::tensor_norm2(&self.jhat.value(), &self.nk.g_tensor(), &gi);
        let lap_jz = hodge_laplacian(geo, &self.jzeta)?.value();
        let lap_z = hodge_laplacian(geo, &self.zeta)?.value();
        Ok(vec![
            Measurement::anchored("lemma-norm-dzeta11", form_norm2(&dz.one_one, &gi), 8.0),
            Measurement::anchored("lemma-norm-dzeta20", form_norm2(&dz.two_zero, &gi), 2.0),
            Measurement::anchored("cor-norm-jhat", jhat_norm2, 4.0),
            // |dJζ|² = 36 is stated in the T*⊗T* norm (twice the form norm)
            Measurement::anchored("norm-djzeta", crate::nk::tensor_norm2(&djz, &self.nk.g_tensor(), &gi), 36.0),
            r("prop-codiff-jzeta", self.nv(&codifferential(geo, &self.jzeta)?)),
            r("prop-laplace-jzeta", self.norm(&lap_jz.sub(&self.jzeta.value().scale(18.0)))),
            r("laplace-zeta", self.norm(&lap_z.sub(&self.zeta.value().scale(10.0)))),
        ])
    }

    /// Lie derivatives along `Jξ`.
    pub fn lie_suite(&self) -> Result<Vec<Measurement>> {
        let l = |t: &TensorJet| self.lie_jxi(t);
        let g = &self.nk.geo.g;
        let j = &self.nk.j;
        let om = &self.nk.omega;
        let zj = wedge(&self.zeta, &self.jzeta)?;
        let jjh = compose(j, &self.jhat);
        let sigma_flat = flat_endo(&self.sigma, g);
        let djz = exterior_derivative(&self.jzeta)?;
        let ll3b = self.k_lie_expected();
        Ok(vec![
            r("li2", self.nv(&l(g)?.sub(&flat_endo(&jjh, g).scale(2.0)))),
            r("ll1-dzeta", self.nv(&l(&self.dzeta)?)),
            r("ll1-djzeta", self.nv(&l(&djz)?)),
            r("ll2-omega", self.nv(&l(om)?.sub(&self.omega_k.scale(4.0)).add(&self.omega_jhat.scale(2.0)))),
            r("ll2-j", self.nv(&l(j)?.sub(&self.k.scale(4.0)))),
            r("ll3-omega-k", self.nv(&l(&self.omega_k)?.add(&om.scale(4.0)).sub(&zj.scale(4.0)))),
            r("ll3-k", self.nv(&l(&self.k)?.sub(&ll3b))),
            r("ll4-omega-jhat", self.nv(&l(&self.omega_jhat)?.add(&om.scale(2.0)).sub(&zj.scale(2.0)))),
            r("ll4-jhat", self.nv(&l(&self.jhat)?)),
            r("ll5-omega-i", self.nv(&l(&self.omega_i)?)),
            r("ll5-i", self.nv(&l(&self.i)?.sub(&compose(&self.jhat, &self.k).scale(2.0)))),
            r("lemma-sigma-flat", self.nv(&l(&sigma_flat)?.add(&flat_endo(&jjh, g).scale(4.0)))),
            r("g0-jxi-invariant", self.nv(&l(&self.g0)?)),
            r("ess", self.nv(&self.omega_jhat.scale(2.0).sub(&self.dzeta).sub(&self.omega_k))),
        ])
    }

    /// `−4J|_H − 2IĴ`.
    pub fn k_lie_expected(&self) -> TensorJet {
        compose(&self.nk.j, &self.pi_h).scale(-4.0).sub(&compose(&self.i, &self.jhat).scale(2.0))
    }

    /// `g₀(∇^{g₀}_XY − ∇_XY, Z)` against `⅓g₀((1 − ½σ)[(∇_Xσ)Y + (∇_{KX}Ĵ)Y], Z)` on `H`.
    pub fn g0_connection(&self) -> Result<Vec<Measurement>> {
        let n = self.dim();
        let geo = &self.nk.geo;
        let gam = geo.gamma.value();
        let gam0 = self.geo0.gamma.value();
        let g0 = self.g0.value();
        let sig = self.sigma.value();
        let kv = self.k.value();
        let nsig = geo.covariant(&self.sigma)?.value();
        let njh = geo.covariant(&self.jhat)?.value();
        let mut diff = TensorValue::zeros(n, vec![crate::tensor::Slot::Down; 3]);
        for x in 0..n {
            for y in 0..n {
                // M^i = (∇_xσ)^i_y + (∇_{Kx}Ĵ)^i_y
                let m: Vec<f64> = (0..n)
                    .map(|i| nsig.get(&[x, i, y]) + (0..n).map(|w| kv.get(&[w, x]) * njh.get(&[w, i, y])).sum::<f64>())
                    .collect();
                let q: Vec<f64> =
                    (0..n).map(|c| m[c] - 0.5 * (0..n).map(|i| sig.get(&[c, i]) * m[i]).sum::<f64>()).collect();
                for z in 0..n {
                    let mut lhs = 0.0;
                    let mut rhs = 0.0;
                    for c in 0..n {
                        lhs += (gam0.get(&[c, x, y]) - gam.get(&[c, x, y])) * g0.get(&[c, z]);
                        rhs += q[c] * g0.get(&[c, z]) / 3.0;
                    }
                    diff.set(&[x, y, z], lhs - rhs);
                }
            }
        }
        Ok(vec![r("lv", self.norm_h(&diff))])
    }

    /// Kähler structure `(g₀, I₀)` checked transversally, and `Ψ`.
    pub fn kahler_projection(&self) -> Result<Vec<Measurement>> {
        let geo0 = &self.geo0;
        let g0 = &self.g0;
        let i0 = &self.i0;
        let (a, b) = (&self.psi_re, &self.psi_im);
        let c = 4.0 / SQRT3;
        let i0_compat = {
            let t = apply_in_slot(&apply_in_slot(g0, i0, 0), i0, 1);
            self.nhv(&t.sub(g0))
        };
        Ok(vec![
            r("mt-i0-square", self.nv(&compose(i0, i0).add(&self.pi_h))),
            r("mt-i0-compatible", i0_compat),
            r("mt-i0-parallel", self.nhv(&geo0.covariant(i0)?)),
            r("kahl-omega-i-compat", self.nv(&self.omega_i.sub(&flat_endo(i0, g0).scale(2.0 / SQRT3)))),
            r("proj-lie-xi-omega-i", self.nv(&self.lie_xi(&self.omega_i)?)),
            r("proj-lie-jxi-omega-i", self.nv(&self.lie_jxi(&self.omega_i)?)),
            r("proj-lie-xi-g0", self.nv(&self.lie_xi(g0)?)),
            r("proj-lie-jxi-g0", self.nv(&self.lie_jxi(g0)?)),
            r("proj-lie-xi-jhat", self.nv(&self.lie_xi(&self.jhat)?)),
            r("t1-k-parallel", self.nhv(&geo0.covariant(&self.k)?)),
            r(
                "t2-psi-formula",
                self.nv(&a.sub(&flat_endo(&self.k, g0).scale(c)))
                    .max(self.nv(&b.add(&flat_endo(&compose(i0, &self.k), g0).scale(c)))),
            ),
            r("t2-psi-parallel", self.nhv(&geo0.covariant(a)?).max(self.nhv(&geo0.covariant(b)?))),
            r("kahl-psi-type", self.nv(&apply_in_slot(a, i0, 0).sub(b)).max(self.nv(&apply_in_slot(b, i0, 0).add(a)))),
        ])
    }

    /// `Ψ`, the line bundle curvature and the almost Kähler form.
    pub fn psi_and_line_bundle(&self) -> Result<Vec<Measurement>> {
        let wk = type_decompose(&self.omega_k, &self.i0);
        let wj = type_decompose(&self.omega_j, &self.i0);
        let dzp = exterior_derivative(&self.zeta_prime)?;
        let om0 = self.omega0_jhat();
        let (a, b) = (&self.psi_re, &self.psi_im);
        let xp = &self.xi_prime;
        let zp_xp = *self.zeta_prime.contract_with(0, xp, 0).value().scalar_value();
        Ok(vec![
            r(
                "omega-k-one-one",
                self.nv(&wk.one_one.add(&self.omega_k.sub(&self.omega_jhat.scale(2.0)).scale(1.0 / 3.0))),
            ),
            r(
                "omega-k-two-zero",
                self.nv(&wk.two_zero.sub(&self.omega_k.scale(2.0).sub(&self.omega_jhat).scale(2.0 / 3.0))),
            ),
            r("omega-j-anti-invariant", self.nv(&wj.one_one)),
            r("psi-weight-re", self.nv(&lie_derivative(xp, a)?.add(b))),
            r("psi-weight-im", self.nv(&lie_derivative(xp, b)?.sub(a))),
            r("dz-omega-i", self.nv(&dzp.add(&self.omega_i.scale(6.0 * SQRT3)))),
            r("dz-g0", self.nv(&dzp.add(&flat_endo(&self.i0, &self.g0).scale(12.0)))),
            r("ak-omega0-half-dzeta", self.nv(&om0.sub(&self.dzeta.scale(0.5)))),
            r("ak-omega0-closed", self.nv(&exterior_derivative(&om0)?)),
            Measurement::anchored("zeta-prime-normalization", zp_xp, 1.0),
        ])
    }

    /// `∇̄Θ` data: `Θ[u,i,j] = ½((∇_uJ)J)^i_j`.
    pub fn canonical_torsion_form(&self) -> TensorJet {
        self.nk.dj.contract_with(2, &self.nk.j, 0).scale(0.5)
    }

    /// First canonical Hermitian connection. `w` seeds the test sections
    /// `Y± = ½(Π_H ± σ)W` of `H±` (coordinate-constant `W`).
    pub fn canonical_connection(&self, w: &DVector<f64>) -> Result<Vec<Measurement>> {
        let geo = &self.nk.geo;
        let theta = self.canonical_torsion_form();
        let tv = theta.value();
        let g = self.nk.g_tensor();
        let jv = self.nk.j.value();
        let dj = self.nk.dj.value();
        // ∇̄g = −g(Θ·,·) − g(·,Θ·)
        let tg = tv.contract_with(1, &g, 0); // [u, j, b] = g(Θ_u ∂j, ∂b)
        let bar_g = tg.add(&tg.permute(&[0, 2, 1]));
        // ∇̄J = ∇J + [Θ, J]
        let tj = tv.contract_with(2, &jv, 0); // [u,i,k] = (Θ_u J)
        let jt = jv.contract_with(1, &tv, 1).permute(&[1, 0, 2]); // [u,i,k] = (J Θ_u)
        let bar_j = dj.add(&tj).sub(&jt);
        // ∇̄_U ξ − (σ + 1)ĴU
        let bar_xi = self.bar_derivative(&self.xi, &theta)?; // [u, i]
        let sj = compose(&self.sigma, &self.jhat).add(&self.jhat).value().permute(&[1, 0]);
        let proto = self.xi.proto().constant_like(0.0);
        let wj = TensorValue::vector(w.as_slice()).to_jet(&proto);
        let y_plus = self.pi_h.add(&self.sigma).contract_with(1, &wj, 0).scale(0.5);
        let y_minus = self.pi_h.sub(&self.sigma).contract_with(1, &wj, 0).scale(0.5);
        let ef = |y: &TensorJet, p: &TensorJet| -> Result<f64> {
            let d = self.bar_derivative(y, &theta)?; // [u, i]
            let pd = d.contract_with(1, &p.value(), 1); // [u, a]
            Ok(self.norm(&pd))
        };
        Ok(vec![
            r("canon-metric", self.norm(&bar_g)),
            r("canon-j", self.norm(&bar_j)),
            r("canon-xi", self.norm(&bar_xi.sub(&sj))),
            r("canon-sigma-parallel", self.nhv(&geo.covariant(&self.sigma)?)),
            r("ef-plus", ef(&y_plus, &self.pi_f())?),
            r("ef-minus", ef(&y_minus, &self.pi_e())?),
        ])
    }

    /// `∇̄_u Y = ∇_u Y + Θ_u Y` as a value `[u, i]`.
    fn bar_derivative(&self, y: &TensorJet, theta: &TensorJet) -> Result<TensorValue> {
        let ny = self.nk.geo.covariant(y)?.value();
        let ty = theta.value().contract_with(2, &y.value(), 0);
        Ok(ny.add(&ty))
    }
}
