//! The Kähler–Einstein base `S²(r₁) × S²(r₂)` in spherical charts
//! `(φ₁, ψ₁, φ₂, ψ₂)`, with `r₁ = r₂ = 1/(2√3)` by default.
//!
//! Each factor carries `j(∂_φ) = ∂_ψ / sin φ`, `j(∂_ψ) = −sin φ ∂_φ`; the
//! base carries `I₀ = (j₁, j₂)` and `Ĵ = (j₁, −j₂)`.

use crate::chart::{BoxDomain, ChartMap};
use crate::error::Result;
use crate::jet::Jet;
use crate::nk::HermitianChart;
use crate::tensor::{Slot, Tensor, TensorJet};

/// Radius of each factor of the base of the nearly Kähler `S³×S³`.
pub const BASE_RADIUS: f64 = 0.288_675_134_594_812_9; // 1/(2√3)

/// Polar margin keeping charts away from the coordinate singularities.
const POLAR_MARGIN: f64 = 0.35;

#[derive(Clone, Debug)]
pub struct S2S2Chart {
    pub radii: [f64; 2],
    domain: BoxDomain,
}

impl Default for S2S2Chart {
    fn default() -> Self {
        Self::new([BASE_RADIUS, BASE_RADIUS])
    }
}

impl S2S2Chart {
    pub fn new(radii: [f64; 2]) -> Self {
        assert!(radii.iter().all(|r| *r > 0.0), "radii must be positive");
        S2S2Chart { radii, domain: spherical_domain(2) }
    }

    /// `(j₁, ±j₂)` as an endomorphism field.
    pub fn product_structure(&self, x: &[f64], order: usize, second_sign: f64) -> Result<TensorJet> {
        self.domain.check(x)?;
        Ok(factor_structures(x, order, &[1.0, second_sign]))
    }

    pub fn i0(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.product_structure(x, order, 1.0)
    }

    pub fn j_hat(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.product_structure(x, order, -1.0)
    }
}

/// Box `φ_k ∈ [margin, π − margin]`, `ψ_k ∈ [−3, 3]` for `k` factors.
pub fn spherical_domain(factors: usize) -> BoxDomain {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for _ in 0..factors {
        lo.extend([POLAR_MARGIN, -3.0]);
        hi.extend([std::f64::consts::PI - POLAR_MARGIN, 3.0]);
    }
    BoxDomain::new(lo, hi)
}

/// Round metrics `r_k²(dφ_k² + sin²φ_k dψ_k²)` on the first `2·radii.len()`
/// coordinates of a point of dimension `x.len()`.
pub fn round_metric(x: &[f64], order: usize, radii: &[f64]) -> TensorJet {
    let c = Jet::coordinates(x, order);
    let n = x.len();
    let zero = c[0].constant_like(0.0);
    let mut data = vec![zero; n * n];
    for (k, r) in radii.iter().enumerate() {
        let (a, b) = (2 * k, 2 * k + 1);
        let s = c[a].sin();
        data[a * n + a] = c[0].constant_like(r * r);
        data[b * n + b] = s.mul_ref(&s).scale(r * r);
    }
    Tensor::new(n, vec![Slot::Down, Slot::Down], data)
}

/// `Σ_k sign_k · j_k` on the first `2·signs.len()` coordinates.
pub fn factor_structures(x: &[f64], order: usize, signs: &[f64]) -> TensorJet {
    let c = Jet::coordinates(x, order);
    let n = x.len();
    let zero = c[0].constant_like(0.0);
    let mut data = vec![zero; n * n];
    for (k, sg) in signs.iter().enumerate() {
        let (a, b) = (2 * k, 2 * k + 1);
        let s = c[a].sin();
        // J^ψ_φ = 1/sin φ, J^φ_ψ = −sin φ
        data[b * n + a] = s.recip().scale(*sg);
        data[a * n + b] = s.scale(-sg);
    }
    Tensor::new(n, vec![Slot::Up, Slot::Down], data)
}

impl ChartMap for S2S2Chart {
    fn name(&self) -> String {
        "s2s2".into()
    }
    fn dim(&self) -> usize {
        4
    }
    fn domain(&self) -> &BoxDomain {
        &self.domain
    }
    fn metric(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.domain.check(x)?;
        Ok(round_metric(x, order, &self.radii))
    }
}

impl HermitianChart for S2S2Chart {
    fn complex_structure(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.i0(x, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{DerivativeEngine, LocalGeometry};

    #[test]
    fn base_is_einstein_with_constant_twelve() {
        let c = S2S2Chart::default();
        let x = [0.9, 0.3, 2.0, -1.1];
        let geo = LocalGeometry::new(&c, &DerivativeEngine::exact(), &x, 2).unwrap();
        let ric = geo.ricci().unwrap().value();
        let g = geo.metric_value();
        assert!(ric.max_abs_diff(&g.scale(12.0)) < 1e-10);
    }

    #[test]
    fn structures_commute_and_square_to_minus_one() {
        let c = S2S2Chart::default();
        let x = [1.2, 0.0, 0.7, 2.0];
        let i0 = c.i0(&x, 0).unwrap().value();
        let jh = c.j_hat(&x, 0).unwrap().value();
        let ij = i0.contract_with(1, &jh, 0);
        let ji = jh.contract_with(1, &i0, 0);
        assert!(ij.max_abs_diff(&ji) < 1e-14);
        let sq = i0.contract_with(1, &i0, 0);
        for a in 0..4 {
            for b in 0..4 {
                let id = if a == b { -1.0 } else { 0.0 };
                assert!((sq.get(&[a, b]) - id).abs() < 1e-14);
            }
        }
    }
}
