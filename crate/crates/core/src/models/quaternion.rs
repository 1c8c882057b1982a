//! Quaternions over any [`Scalar`], with the exponential of imaginary
//! quaternions evaluated by power series in `|x|²` (smooth through 0).

use crate::tensor::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Quat<S> {
    pub w: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Quat<S> {
    pub fn new(w: S, x: S, y: S, z: S) -> Self {
        Quat { w, x, y, z }
    }

    pub fn imaginary(v: [S; 3]) -> Self {
        let [x, y, z] = v;
        Quat { w: x.constant_like(0.0), x, y, z }
    }

    pub fn parts(&self) -> [&S; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }

    pub fn im(&self) -> [S; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn conj(&self) -> Self {
        Quat { w: self.w.clone(), x: self.x.scale(-1.0), y: self.y.scale(-1.0), z: self.z.scale(-1.0) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a1, b1, c1, d1) = (&self.w, &self.x, &self.y, &self.z);
        let (a2, b2, c2, d2) = (&o.w, &o.x, &o.y, &o.z);
        let comb = |t: [(&S, &S, f64); 4]| {
            let mut acc = t[0].0.mul_ref(t[0].1).scale(t[0].2);
            for (p, q, s) in &t[1..] {
                acc = acc.add_ref(&p.mul_ref(q).scale(*s));
            }
            acc
        };
        Quat {
            w: comb([(a1, a2, 1.0), (b1, b2, -1.0), (c1, c2, -1.0), (d1, d2, -1.0)]),
            x: comb([(a1, b2, 1.0), (b1, a2, 1.0), (c1, d2, 1.0), (d1, c2, -1.0)]),
            y: comb([(a1, c2, 1.0), (b1, d2, -1.0), (c1, a2, 1.0), (d1, b2, 1.0)]),
            z: comb([(a1, d2, 1.0), (b1, c2, 1.0), (c1, b2, -1.0), (d1, a2, 1.0)]),
        }
    }

    pub fn norm2(&self) -> S {
        let mut acc = self.w.mul_ref(&self.w);
        for c in [&self.x, &self.y, &self.z] {
            acc.mul_acc(c, c);
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Quat<T> {
        Quat { w: f(&self.w), x: f(&self.x), y: f(&self.y), z: f(&self.z) }
    }

    /// `exp(v)` for imaginary `v = (v1, v2, v3)`:
    /// `cos|v| + sin|v|·v/|v|`, written through series in `s = |v|²`.
    pub fn exp_imaginary(v: [S; 3]) -> Self {
        let mut s = v[0].mul_ref(&v[0]);
        s.mul_acc(&v[1], &v[1]);
        s.mul_acc(&v[2], &v[2]);
        let (c, sinc) = cos_sinc_series(&s);
        let [x, y, z] = v;
        Quat { w: c, x: x.mul_ref(&sinc), y: y.mul_ref(&sinc), z: z.mul_ref(&sinc) }
    }
}

const SERIES_TERMS: usize = 40;

/// `(cos √s, sin √s / √s)` by Horner over enough terms for `s ≲ 10`.
fn cos_sinc_series<S: Scalar>(s: &S) -> (S, S) {
    let mut ccoef = Vec::with_capacity(SERIES_TERMS);
    let mut scoef = Vec::with_capacity(SERIES_TERMS);
    let mut fact = 1.0f64;
    for k in 0..SERIES_TERMS {
        // (2k)! and (2k+1)!
        if k > 0 {
            fact *= (2 * k - 1) as f64 * (2 * k) as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        ccoef.push(sign / fact);
        scoef.push(sign / (fact * (2 * k + 1) as f64));
    }
    (horner(s, &ccoef), horner(s, &scoef))
}

fn horner<S: Scalar>(s: &S, coeffs: &[f64]) -> S {
    let mut r = s.constant_like(*coeffs.last().unwrap());
    for &a in coeffs.iter().rev().skip(1) {
        r = r.mul_ref(s).add_ref(&s.constant_like(a));
    }
    r
}

impl Quat<f64> {
    pub fn one() -> Self {
        Quat::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm2().sqrt();
        self.map(|c| c / n)
    }

    /// Inverse of [`Quat::exp_imaginary`] on unit quaternions with `w > −1`.
    pub fn log_unit(&self) -> [f64; 3] {
        let v = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        let angle = v.atan2(self.w);
        let k = if v < 1e-300 { 1.0 } else { angle / v };
        [self.x * k, self.y * k, self.z * k]
    }

    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let v = axis.map(|a| a / n * angle);
        Quat::exp_imaginary(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    #[test]
    fn hamilton_rules() {
        let i = Quat::new(0.0, 1.0, 0.0, 0.0);
        let j = Quat::new(0.0, 0.0, 1.0, 0.0);
        let k = Quat::new(0.0, 0.0, 0.0, 1.0);
        assert_eq!(i.mul(&j), k);
        assert_eq!(j.mul(&k), i);
        assert_eq!(k.mul(&i), j);
        assert_eq!(i.mul(&i), Quat::new(-1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn exp_matches_closed_form() {
        let v = [0.3, -0.7, 1.1];
        let q = Quat::exp_imaginary(v);
        let n = (0.09f64 + 0.49 + 1.21).sqrt();
        assert!((q.w - n.cos()).abs() < 1e-15);
        assert!((q.x - n.sin() * 0.3 / n).abs() < 1e-15);
        assert!((q.norm2() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_log_round_trip() {
        for v in [[0.0, 0.0, 0.0], [0.2, -0.5, 0.9], [-1.0, 1.0, 1.0]] {
            let back = Quat::exp_imaginary(v).log_unit();
            for a in 0..3 {
                assert!((back[a] - v[a]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jet_exp_derivative_at_origin_is_identity() {
        let x = Jet::coordinates(&[0.0, 0.0, 0.0], 2);
        let q = Quat::exp_imaginary([x[0].clone(), x[1].clone(), x[2].clone()]);
        assert!((q.x.first_derivative(0) - 1.0).abs() < 1e-15);
        assert!(q.x.first_derivative(1).abs() < 1e-15);
        // ∂²w/∂x0² = −1 at the origin
        assert!((q.w.derivative(&[2, 0, 0]).unwrap() + 1.0).abs() < 1e-14);
    }
}
