//! Structures induced by a unit Killing field `ξ` on a nearly Kähler
//! 6-manifold, and their pointwise identities.
//!
//! With `H = {ξ, Jξ}^⊥`:
//!
//! * `I = ∇_ξJ`, `K = ∇_{Jξ}J`, `Ĵ = ∇_·ξ + ½K`, `σ = K∘Ĵ` (transversal),
//! * `g₀ = g + ½g(σ·,·)`, `I₀ = (2/√3)(I − ½σI)`,
//! * `ω_A = g(A·,·)`, `ω_J = Ω − ζ∧Jζ`, `Ψ = √3ω_K″ + 2iω_J` with `″` the
//!   `I₀`-anti-invariant part,
//! * `ξ′ = Jξ/(2√3)` and `ζ′ = (2√3 Jξ)♭`, so that `ζ′(ξ′) = 1`.
//!
//! Everything is held as jets at one chart point; identities restricted to
//! `H` are measured as full norms of `Π_H`-projected tensors, which bounds
//! every choice of horizontal arguments at once.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::chart::{lie_derivative, to_matrix, DerivativeEngine, Field, LocalGeometry};
use crate::error::{GeomError, Result};
use crate::exterior::{apply_in_slot, exterior_derivative, type_decompose, wedge};
use crate::nk::{tensor_norm, HermitianChart, NKPoint};
use crate::tensor::{Scalar, Slot, Tensor, TensorJet, TensorValue};

mod checks;
mod sekigawa;

pub use checks::killing_measurements;
pub use sekigawa::{sekigawa_terms_at, SekigawaTerms};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// `A∘B` for endomorphisms stored `[Up, Down]`.
pub fn compose<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Tensor<S> {
    a.contract_with(1, b, 0)
}

/// `g(A·,·)` as a bilinear form.
pub fn flat_endo<S: Scalar>(a: &Tensor<S>, g: &Tensor<S>) -> Tensor<S> {
    a.contract_with(0, g, 0)
}

pub fn identity_like<S: Scalar>(proto: &S, n: usize) -> Tensor<S> {
    Tensor::from_fn(n, vec![Slot::Up, Slot::Down], |i| proto.constant_like(if i[0] == i[1] { 1.0 } else { 0.0 }))
}

/// `u ⊗ α` as an endomorphism `X ↦ α(X) u`.
pub fn rank_one<S: Scalar>(u: &Tensor<S>, a: &Tensor<S>) -> Tensor<S> {
    u.outer(a)
}

/// Applies the endomorphism `p` to every slot of `t` (covariant slots are
/// pulled back, contravariant slots pushed forward).
pub fn project_all<S: Scalar>(t: &Tensor<S>, p: &Tensor<S>) -> Tensor<S> {
    let mut out = t.clone();
    for (s, slot) in t.slots().to_vec().into_iter().enumerate() {
        out = match slot {
            Slot::Down => apply_in_slot(&out, p, s),
            Slot::Up => {
                // p^i_c t^{..c..}: contract p's Down slot with slot s, move result back
                let r = out.rank();
                let moved = p.contract_with(1, &out, s); // [i, rest...]
                let mut perm: Vec<usize> = (1..r).collect();
                perm.insert(s, 0);
                moved.permute(&perm)
            }
        };
    }
    out
}

/// Reduction data at one point.
#[derive(Clone, Debug)]
pub struct ReductionState {
    pub nk: NKPoint,
    pub xi: TensorJet,
    pub jxi: TensorJet,
    pub zeta: TensorJet,
    pub jzeta: TensorJet,
    pub dzeta: TensorJet,
    /// `∇ξ` as `[x, i] = (∇_{∂x}ξ)^i`.
    pub nabla_xi: TensorJet,
    pub pi_h: TensorJet,
    pub i: TensorJet,
    pub k: TensorJet,
    pub jhat: TensorJet,
    pub sigma: TensorJet,
    pub g0: TensorJet,
    pub i0: TensorJet,
    pub omega_i: TensorJet,
    pub omega_k: TensorJet,
    pub omega_jhat: TensorJet,
    pub omega_j: TensorJet,
    pub psi_re: TensorJet,
    pub psi_im: TensorJet,
    /// `ξ′ = Jξ/(2√3)`.
    pub xi_prime: TensorJet,
    /// `ζ′ = (2√3 Jξ)♭`.
    pub zeta_prime: TensorJet,
    /// Levi-Civita data of `g₀`.
    pub geo0: LocalGeometry,
}

impl ReductionState {
    /// Builds the state with metric, `J` and `ξ` jets of `order` (≥ 2).
    pub fn new(
        chart: &dyn HermitianChart,
        xi_field: &dyn Field,
        engine: &DerivativeEngine,
        p: &[f64],
        order: usize,
    ) -> Result<Self> {
        if order < 2 {
            return Err(GeomError::DerivativeOrder { needed: 2, available: order });
        }
        let nk = NKPoint::new(chart, engine, p, order)?;
        let xi = engine.eval(&|q, o| xi_field.eval(q, o), p, order)?;
        Self::from_parts(nk, xi)
    }

    pub fn from_parts(nk: NKPoint, xi: TensorJet) -> Result<Self> {
        let n = nk.dim();
        let geo = &nk.geo;
        let g = &geo.g;
        let jxi = nk.j.contract_with(1, &xi, 0);
        let zeta = geo.lower(&xi, 0);
        let jzeta = geo.lower(&jxi, 0);
        let dzeta = exterior_derivative(&zeta)?;
        let nabla_xi = geo.covariant(&xi)?;
        let id = identity_like(g.proto(), n);
        let pi_h = id.sub(&rank_one(&xi, &zeta)).sub(&rank_one(&jxi, &jzeta));
        let i = nk.dj.insert_vector(0, &xi);
        let k = nk.dj.insert_vector(0, &jxi);
        let jhat = nabla_xi.permute(&[1, 0]).add(&k.scale(0.5));
        let sigma = compose(&k, &jhat);
        let g0 = g.add(&flat_endo(&sigma, g).scale(0.5));
        let i0 = i.sub(&compose(&sigma, &i).scale(0.5)).scale(2.0 / SQRT3);
        let omega_i = flat_endo(&i, g);
        let omega_k = flat_endo(&k, g);
        let omega_jhat = flat_endo(&jhat, g);
        let omega_j = nk.omega.sub(&wedge(&zeta, &jzeta)?);
        let wk = type_decompose(&omega_k, &i0);
        let psi_re = wk.two_zero.scale(SQRT3);
        let psi_im = omega_j.scale(2.0);
        let xi_prime = jxi.scale(1.0 / (2.0 * SQRT3));
        let zeta_prime = jzeta.scale(2.0 * SQRT3);
        let geo0 = LocalGeometry::from_metric(g0.clone(), &geo.point, geo.orientation)?;
        Ok(ReductionState {
            nk,
            xi,
            jxi,
            zeta,
            jzeta,
            dzeta,
            nabla_xi,
            pi_h,
            i,
            k,
            jhat,
            sigma,
            g0,
            i0,
            omega_i,
            omega_k,
            omega_jhat,
            omega_j,
            psi_re,
            psi_im,
            xi_prime,
            zeta_prime,
            geo0,
        })
    }

    pub fn dim(&self) -> usize {
        self.nk.dim()
    }

    fn gv(&self) -> TensorValue {
        self.nk.g_tensor()
    }

    fn giv(&self) -> TensorValue {
        self.nk.ginv_tensor()
    }

    /// `g`-norm of a value tensor.
    pub fn norm(&self, t: &TensorValue) -> f64 {
        tensor_norm(t, &self.gv(), &self.giv())
    }

    /// `g`-norm of the `H`-projection of a value tensor.
    pub fn norm_h(&self, t: &TensorValue) -> f64 {
        self.norm(&project_all(t, &self.pi_h.value()))
    }

    /// Matrix of an endomorphism value.
    pub fn mat(t: &TensorJet) -> DMatrix<f64> {
        to_matrix(&t.value())
    }

    /// Eigenvalues of `g₀` relative to `g`, ascending.
    pub fn g0_spectrum(&self) -> Vec<f64> {
        let g = to_matrix(&self.gv());
        let g0 = to_matrix(&self.g0.value());
        let l = g.cholesky().expect("metric is positive definite").l();
        let li = l.clone().try_inverse().expect("cholesky factor is invertible");
        let m = &li * g0 * li.transpose();
        let m = (&m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    /// `L_{Jξ}` of a tensor field.
    pub fn lie_jxi(&self, t: &TensorJet) -> Result<TensorJet> {
        lie_derivative(&self.jxi, t)
    }

    pub fn lie_xi(&self, t: &TensorJet) -> Result<TensorJet> {
        lie_derivative(&self.xi, t)
    }

    /// `ω⁰_Ĵ = g₀(Ĵ·,·)`.
    pub fn omega0_jhat(&self) -> TensorJet {
        flat_endo(&self.jhat, &self.g0)
    }

    /// Projector `Π_E = ξ⊗ζ + ½(Π_H + σ)`.
    pub fn pi_e(&self) -> TensorJet {
        rank_one(&self.xi, &self.zeta).add(&self.pi_h.add(&self.sigma).scale(0.5))
    }

    /// Projector `Π_F = Jξ⊗Jζ + ½(Π_H − σ)`.
    pub fn pi_f(&self) -> TensorJet {
        rank_one(&self.jxi, &self.jzeta).add(&self.pi_h.sub(&self.sigma).scale(0.5))
    }
}

/// Whether the endomorphism `p` is idempotent to within `tol`.
pub fn is_projector(p: &TensorValue, tol: f64) -> bool {
    compose(p, p).max_abs_diff(p) <= tol
}
