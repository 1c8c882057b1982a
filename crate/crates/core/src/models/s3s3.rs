//! The homogeneous nearly Kähler `S³×S³`.
//!
//! Points are pairs of unit quaternions; tangent vectors are left-translated
//! pairs `(U, V) = (p̄ dp, q̄ dq)` of imaginary quaternions. In these terms
//!
//! * `g = c·(|U|² + |V|² − ⟨U,V⟩)` (polarized),
//! * `J(U,V) = (2V − U, V − 2U)/√3`,
//!
//! both invariant under `SU(2)³` acting by `(a,b,h)·(p,q) = (a p h⁻¹, b q h⁻¹)`.
//! Charts are `(x, y) ↦ (p₀·exp x, q₀·exp y)` on the box `(−1,1)⁶`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chart::{BoxDomain, ChartMap, DerivativeEngine, Field, FnField};
use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::models::quaternion::Quat;
use crate::nk::{orientation_of, random_unit, HermitianChart, NKPoint};
use crate::tensor::{invert_matrix, Slot, Tensor, TensorJet};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Which almost Hermitian structure the chart carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S3S3Structure {
    /// The nearly Kähler structure.
    NearlyKahler,
    /// Product metric `c(|U|²+|V|²)` with `J(U,V) = (V, −U)`: a negative control.
    Product,
}

#[derive(Clone, Debug)]
pub struct S3S3Chart {
    pub scale: f64,
    pub p0: Quat<f64>,
    pub q0: Quat<f64>,
    pub structure: S3S3Structure,
    domain: BoxDomain,
    orientation: f64,
}

impl S3S3Chart {
    pub fn new(scale: f64, p0: Quat<f64>, q0: Quat<f64>) -> Self {
        Self::with_structure(scale, p0, q0, S3S3Structure::NearlyKahler)
    }

    pub fn with_structure(scale: f64, p0: Quat<f64>, q0: Quat<f64>, structure: S3S3Structure) -> Self {
        assert!(scale > 0.0, "scale must be positive");
        let mut c = S3S3Chart {
            scale,
            p0: p0.normalized(),
            q0: q0.normalized(),
            structure,
            domain: BoxDomain::cube(6, 0.0, 1.0),
            orientation: 1.0,
        };
        c.orientation = orientation_of(&c, &c.domain.center()).unwrap_or(1.0);
        c
    }

    /// Quaternion pair at chart coordinates, as jets of `order`.
    pub fn point_jets(&self, x: &[f64], order: usize) -> (Quat<Jet>, Quat<Jet>) {
        let c = Jet::coordinates(x, order);
        let ex = Quat::exp_imaginary([c[0].clone(), c[1].clone(), c[2].clone()]);
        let ey = Quat::exp_imaginary([c[3].clone(), c[4].clone(), c[5].clone()]);
        let lift = |q: &Quat<f64>| q.map(|v| c[0].constant_like(*v));
        (lift(&self.p0).mul(&ex), lift(&self.q0).mul(&ey))
    }

    pub fn point(&self, x: &[f64]) -> (Quat<f64>, Quat<f64>) {
        let (p, q) = self.point_jets(x, 0);
        (p.map(|j| j.value()), q.map(|j| j.value()))
    }

    /// Chart coordinates of a point, if it lies in the box.
    pub fn coordinates_of(&self, p: &Quat<f64>, q: &Quat<f64>) -> Option<Vec<f64>> {
        let a = self.p0.conj().mul(p).log_unit();
        let b = self.q0.conj().mul(q).log_unit();
        let x: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        self.domain.contains(&x).then_some(x)
    }

    /// Left-trivialization `E`: row = Lie-algebra component (U then V),
    /// column = coordinate direction.
    pub fn trivialization(&self, x: &[f64], order: usize) -> Vec<Jet> {
        let c = Jet::coordinates(x, order + 1);
        let ex = Quat::exp_imaginary([c[0].clone(), c[1].clone(), c[2].clone()]);
        let ey = Quat::exp_imaginary([c[3].clone(), c[4].clone(), c[5].clone()]);
        let zero = c[0].constant_like(0.0).truncate(order);
        let mut e = vec![zero; 36];
        for (block, q) in [(0usize, &ex), (1usize, &ey)] {
            let qc = q.conj();
            for i in 0..3 {
                let col = 3 * block + i;
                let dq = q.map(|j| j.partial(col));
                let u = qc.map(|j| j.truncate(order)).mul(&dq);
                for (a, comp) in u.im().into_iter().enumerate() {
                    e[(3 * block + a) * 6 + col] = comp;
                }
            }
        }
        e
    }

    fn algebra_metric(&self) -> [[f64; 6]; 6] {
        let mut m = [[0.0; 6]; 6];
        for a in 0..3 {
            m[a][a] = self.scale;
            m[a + 3][a + 3] = self.scale;
            if self.structure == S3S3Structure::NearlyKahler {
                m[a][a + 3] = -0.5 * self.scale;
                m[a + 3][a] = -0.5 * self.scale;
            }
        }
        m
    }

    fn algebra_complex_structure(&self) -> [[f64; 6]; 6] {
        let mut m = [[0.0; 6]; 6];
        for a in 0..3 {
            match self.structure {
                S3S3Structure::NearlyKahler => {
                    // U' = (2V − U)/√3, V' = (V − 2U)/√3
                    m[a][a] = -1.0 / SQRT3;
                    m[a][a + 3] = 2.0 / SQRT3;
                    m[a + 3][a] = -2.0 / SQRT3;
                    m[a + 3][a + 3] = 1.0 / SQRT3;
                }
                S3S3Structure::Product => {
                    m[a][a + 3] = 1.0;
                    m[a + 3][a] = -1.0;
                }
            }
        }
        m
    }

    /// Coordinate components of the vector field whose left-trivialized
    /// value is `w(x)` (six jets: U then V).
    pub fn from_algebra(&self, x: &[f64], w: &[Jet]) -> Result<TensorJet> {
        let order = w[0].order();
        let e = self.trivialization(x, order);
        let einv = invert_matrix(6, &e)?;
        Ok(Tensor::from_fn(6, vec![Slot::Up], |i| {
            let mut acc = w[0].constant_like(0.0);
            for a in 0..6 {
                acc.mul_acc(&einv[i[0] * 6 + a], &w[a]);
            }
            acc
        }))
    }

    /// Generator of `(p,q) ↦ (p e^{ta}, q e^{ta})`, normalized to unit length.
    pub fn right_diagonal_killing(self: &Arc<Self>, a: [f64; 3]) -> FnField {
        let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt() * self.scale.sqrt();
        let a = a.map(|v| v / n);
        let me = Arc::clone(self);
        FnField::new(vec![Slot::Up], move |x, order| {
            me.domain.check(x)?;
            let z = Jet::coordinates(x, order)[0].constant_like(0.0);
            let w: Vec<Jet> = (0..6).map(|k| z.constant_like(a[k % 3])).collect();
            me.from_algebra(x, &w)
        })
    }

    /// Generator of `(p,q) ↦ (e^{ta} p, q)`, normalized to unit length.
    pub fn left_factor_killing(self: &Arc<Self>, a: [f64; 3]) -> FnField {
        let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt() * self.scale.sqrt();
        let a = a.map(|v| v / n);
        let me = Arc::clone(self);
        FnField::new(vec![Slot::Up], move |x, order| {
            me.domain.check(x)?;
            let (p, _) = me.point_jets(x, order);
            let z = p.w.constant_like(0.0);
            let aq = Quat::imaginary(a.map(|v| z.constant_like(v)));
            let u = p.conj().mul(&aq).mul(&p);
            let mut w: Vec<Jet> = u.im().to_vec();
            w.extend(std::iter::repeat_n(z, 3));
            me.from_algebra(x, &w)
        })
    }
}

impl ChartMap for S3S3Chart {
    fn name(&self) -> String {
        "s3s3".into()
    }
    fn dim(&self) -> usize {
        6
    }
    fn domain(&self) -> &BoxDomain {
        &self.domain
    }
    fn metric(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.domain.check(x)?;
        let e = self.trivialization(x, order);
        let m = self.algebra_metric();
        // g_ij = Σ_ab E_ai m_ab E_bj
        Ok(Tensor::from_fn(6, vec![Slot::Down, Slot::Down], |ix| {
            let (i, j) = (ix[0], ix[1]);
            let mut acc = e[0].constant_like(0.0);
            for a in 0..6 {
                for b in 0..6 {
                    if m[a][b] != 0.0 {
                        acc.mul_acc(&e[a * 6 + i], &e[b * 6 + j].scale(m[a][b]));
                    }
                }
            }
            acc
        }))
    }
    fn orientation(&self) -> f64 {
        self.orientation
    }
}

impl HermitianChart for S3S3Chart {
    fn complex_structure(&self, x: &[f64], order: usize) -> Result<TensorJet> {
        self.domain.check(x)?;
        let e = self.trivialization(x, order);
        let einv = invert_matrix(6, &e)?;
        let m = self.algebra_complex_structure();
        // J = E⁻¹ m E
        let mut me = vec![e[0].constant_like(0.0); 36];
        for a in 0..6 {
            for j in 0..6 {
                let mut acc = e[0].constant_like(0.0);
                for b in 0..6 {
                    if m[a][b] != 0.0 {
                        acc = acc.add_ref(&e[b * 6 + j].scale(m[a][b]));
                    }
                }
                me[a * 6 + j] = acc;
            }
        }
        Ok(Tensor::from_fn(6, vec![Slot::Up, Slot::Down], |ix| {
            let mut acc = e[0].constant_like(0.0);
            for a in 0..6 {
                acc.mul_acc(&einv[ix[0] * 6 + a], &me[a * 6 + ix[1]]);
            }
            acc
        }))
    }
}

/// Killing fields exposed on every chart.
pub fn killing_fields(chart: &Arc<S3S3Chart>) -> Vec<(String, Arc<dyn Field>)> {
    vec![
        ("right-diagonal".into(), Arc::new(chart.right_diagonal_killing([0.0, 0.0, 1.0])) as Arc<dyn Field>),
        ("left-factor".into(), Arc::new(chart.left_factor_killing([1.0, 0.0, 0.0])) as Arc<dyn Field>),
    ]
}

/// Scale `c*` at which the nearly Kähler structure has constant type one.
///
/// `α` scales as `1/c`, so `c* = α(c = 1)`, measured on `samples` random
/// points and pairs; an `α` that is not constant is reported as a violation.
pub fn calibrate_scale(samples: usize, seed: u64) -> Result<f64> {
    let chart = S3S3Chart::new(1.0, Quat::one(), Quat::one());
    let engine = DerivativeEngine::exact();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alphas = Vec::with_capacity(samples.max(1));
    for _ in 0..samples.max(1) {
        let x = chart.domain.sample(&mut rng, 0.1);
        let pt = NKPoint::new(&chart, &engine, &x, 1)?;
        let chol = pt.cholesky();
        let (u, v) = (random_unit(&mut rng, &chol), random_unit(&mut rng, &chol));
        alphas.push(pt.constant_type(&u, &v)?);
    }
    let (lo, hi) = alphas.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo > 1e-8 {
        return Err(GeomError::InvariantViolation { identity: "constant type".into(), residual: hi - lo });
    }
    Ok(alphas.iter().sum::<f64>() / alphas.len() as f64)
}
