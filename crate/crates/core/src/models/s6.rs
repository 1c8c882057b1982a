//! The round unit `S⁶ ⊂ Im 𝕆` with `J_P X = P × X`.
//!
//! Charts are inverse stereographic projections from the pole `−R e₇`,
//! `x ↦ R·(2x, 1 − |x|²)/(1 + |x|²)`, on the box `(−1,1)⁶`, for a rotation `R`.

use std::sync::Arc;

use nalgebra::SMatrix;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::chart::{BoxDomain, ChartMap, Field, FnField};
use crate::error::Result;
use crate::jet::Jet;
use crate::models::octonion::{cross, g2_basis};
use crate::nk::{orientation_of, HermitianChart};
use crate::tensor::{invert_matrix, Slot, Tensor, TensorJet};

pub type Mat7 = SMatrix<f64, 7, 7>;

#[derive(Clone, Debug)]
pub struct S6Chart {
    pub rotation: Mat7,
    domain: BoxDomain,
    orientation: f64,
}

impl S6Chart {
    pub fn new(rotation: Mat7) -> Self {
        let mut c = S6Chart { rotation, domain: BoxDomain::cube(6, 0.0, 1.0), orientation: 1.0 };
        c.orientation = orientation_of(&c, &c.domain.center()).unwrap_or(1.0);
        c
    }

    pub fn standard() -> Self {
        Self::new(Mat7::identity())
    }

    /// Chart rotated by a random element of `SO(7)` drawn from `seed`.
    pub fn random(seed: u64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = Mat7::from_fn(|_, _| StandardNormal.sample(&mut rng));
        let mut q = m.qr().q();
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        Self::new(q)
    }

    /// Embedding `P(x) ∈ ℝ⁷` as jets of `order`.
    pub fn embedding(&self, x: &[f64], order: usize) -> Vec<Jet> {
        let c = Jet::coordinates(x, order);
        let r2 = c.iter().fold(c[0].constant_like(0.0), |acc, v| acc.add_ref(&v.mul_ref(v)));
        let inv = (&r2 + 1.0).recip();
        let mut s: Vec<Jet> = c.iter().map(|v| v.mul_ref(&inv).scale(2.0)).collect();
        s.push((&(-&r2) + 1.0).mul_ref(&inv));
        (0..7)
            .map(|a| {
                let mut acc = c[0].constant_like(0.0);
                for (b, sb) in s.iter().enumerate() {
                    acc = acc.add_ref(&sb.scale(self.rotation[(a, b)]));
                }
                acc
            })
            .collect()
    }

    pub fn point(&self, x: &[f64]) -> Vec<f64> {
        self.embedding(x, 0).iter().map(|j| j.value()).collect()
    }

    /// `(P, ∂P)` with `P` at `order` and `∂_i P` at `order` (computed from `order + 1`).
    fn frame(&self, x: &[f64], order: usize) -> (Vec<Jet>, Vec<Vec<Jet>>) {
        let p = self.embedding(x, order + 1);
        let dp = (0..6).map(|i| p.iter().map(|c| c.partial(i)).collect()).collect();
        (p.iter().map(|c| c.truncate(order)).collect(), dp)
    }

    fn gram(dp: &[Vec<Jet>]) -> Vec<Jet> {
        let mut g = Vec::with_capacity(36);
        for i in 0..6 {
            for j in 0..6 {
                g.push(dot(&dp[i], &dp[j]));
            }
        }
        g
    }

    /// Coordinate vector field of the ambient linear field `P ↦ A P`.
    pub fn linear_field(self: &Arc<Self>, a: Mat7) -> FnField {
        let me = Arc::clone(self);
        FnField::new(vec![Slot::Up], move |x, order| {
            me.domain.check(x)?;
            let (p, dp) = me.frame(x, order);
            let ap: Vec<Jet> = (0..7)
                .map(|r| {
                    let mut acc = p[0].constant_like(0.0);
                    for c in 0..7 {
                        acc = acc.add_ref(&p[c].scale(a[(r, c)]));
                    }
                    acc
                })
                .collect();
            let ginv = invert_matrix(6, &Self::gram(&dp))?;
            let w: Vec<Jet> = (0..6).map(|l| dot(&dp[l], &ap)).collect();
            Ok(Tensor::from_fn(6, vec![Slot::Up], |i| {
                let mut acc = p[0].constant_like(0.0);
                for l in 0..6 {
                    acc.mul_acc(&ginv[i[0] * 6 + l], &w[l]);
                }
                acc
            }))
        })
    }
}

fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    let mut acc = a[0].constant_like(0.0);
    for (x, y) in a.iter().zip(b) {
        acc.mul_acc(x, y);
    }
    acc
}

impl ChartMap for S6Chart {
    fn name(&self) -> String {
        "s6".into()
    }
    fn dim(&self) -> usize {
        6
    }
    fn domain(&self) -> &BoxDomain {
        &self.domain
    }
    fn metric(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.domain.check(x)?;
        let (_, dp) = self.frame(x, order);
        Ok(Tensor::new(6, vec![Slot::Down, Slot::Down], Self::gram(&dp)))
    }
    fn orientation(&self) -> f64 {
        self.orientation
    }
}

impl HermitianChart for S6Chart {
    fn complex_structure(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.domain.check(x)?;
        let (p, dp) = self.frame(x, order);
        let ginv = invert_matrix(6, &Self::gram(&dp))?;
        let pxd: Vec<Vec<Jet>> = dp.iter().map(|d| cross(&p, d)).collect();
        let q: Vec<Jet> = (0..36).map(|k| dot(&dp[k / 6], &pxd[k % 6])).collect();
        Ok(Tensor::from_fn(6, vec![Slot::Up, Slot::Down], |ix| {
            let mut acc = p[0].constant_like(0.0);
            for l in 0..6 {
                acc.mul_acc(&ginv[ix[0] * 6 + l], &q[l * 6 + ix[1]]);
            }
            acc
        }))
    }
}

/// Killing fields from `g₂`, each scaled to operator norm one. None has
/// constant length: `G₂` acts transitively on `S⁶`.
pub fn killing_fields(chart: &Arc<S6Chart>) -> Vec<(String, Arc<dyn Field>)> {
    g2_basis()
        .into_iter()
        .take(3)
        .enumerate()
        .map(|(k, a)| {
            let a = a / a.norm() * 2f64.sqrt();
            (format!("g2-{k}"), Arc::new(chart.linear_field(a)) as Arc<dyn Field>)
        })
        .collect()
}
