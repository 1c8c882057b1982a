//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A [`Jet`] in `n` variables of order `k` stores the Taylor coefficients
//! `c_α = ∂^α f(p) / α!` for every multi-index with `|α| ≤ k`. Arithmetic
//! and elementary functions propagate all coefficients exactly (up to
//! floating-point rounding), so derivatives of arbitrary smooth expressions
//! come out without step-size error.
//!
//! Monomials are stored in graded order: every monomial of degree `d` comes
//! before any of degree `d + 1`. The layout of order `k - 1` is therefore a
//! prefix of the layout of order `k`, which makes truncation a slice and
//! lets jets of different orders mix (the result has the smaller order).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

/// Largest number of independent variables a layout supports.
pub const MAX_VARS: usize = 8;

/// Monomial bookkeeping shared by all jets with the same `(nvars, order)`.
pub struct Layout {
    nvars: usize,
    order: usize,
    monomials: Vec<[u8; MAX_VARS]>,
    degree: Vec<usize>,
    index: HashMap<u64, usize>,
    /// `(i, j, k)`: monomial i times monomial j is monomial k.
    mul_table: Vec<(u32, u32, u32)>,
    /// Per variable: `(dst, src, factor)` with dst indexing the order-1 layout.
    deriv_table: Vec<Vec<(u32, u32, f64)>>,
}

fn key(m: &[u8; MAX_VARS]) -> u64 {
    m.iter().fold(0u64, |acc, &e| (acc << 8) | e as u64)
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Layout {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} jet variables");
        let mut monomials: Vec<[u8; MAX_VARS]> = Vec::new();
        let mut degree = Vec::new();
        for d in 0..=order {
            let mut cur = [0u8; MAX_VARS];
            enumerate_degree(nvars, d, 0, &mut cur, &mut monomials);
            while degree.len() < monomials.len() {
                degree.push(d);
            }
        }
        let index: HashMap<u64, usize> = monomials.iter().enumerate().map(|(i, m)| (key(m), i)).collect();

        let mut mul_table = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                if degree[i] + degree[j] > order {
                    continue;
                }
                let mut s = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    s[v] = a[v] + b[v];
                }
                mul_table.push((i as u32, j as u32, index[&key(&s)] as u32));
            }
        }

        let mut deriv_table = vec![Vec::new(); nvars];
        if order > 0 {
            for (dst, m) in monomials.iter().enumerate() {
                if degree[dst] + 1 > order {
                    continue;
                }
                for (v, table) in deriv_table.iter_mut().enumerate() {
                    let mut up = *m;
                    up[v] += 1;
                    let src = index[&key(&up)];
                    table.push((dst as u32, src as u32, up[v] as f64));
                }
            }
        }

        Layout { nvars, order, monomials, degree, index, mul_table, deriv_table }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Exponent vector of coefficient `i`.
    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monomials[i][..self.nvars]
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degree[i]
    }

    /// Coefficient index of a multi-index, if it fits the order.
    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        if alpha.len() != self.nvars {
            return None;
        }
        let mut m = [0u8; MAX_VARS];
        m[..self.nvars].copy_from_slice(alpha);
        self.index.get(&key(&m)).copied()
    }

    /// Number of coefficients of total degree `≤ order` in `nvars` variables.
    fn prefix_len(&self, order: usize) -> usize {
        self.degree.partition_point(|&d| d <= order)
    }
}

fn enumerate_degree(
    nvars: usize,
    remaining: usize,
    var: usize,
    cur: &mut [u8; MAX_VARS],
    out: &mut Vec<[u8; MAX_VARS]>,
) {
    if nvars == 0 {
        if remaining == 0 {
            out.push(*cur);
        }
        return;
    }
    if var == nvars - 1 {
        cur[var] = remaining as u8;
        out.push(*cur);
        cur[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[var] = e as u8;
        enumerate_degree(nvars, remaining - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

/// Interned layout for `(nvars, order)`.
pub fn layout(nvars: usize, order: usize) -> &'static Layout {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), &'static Layout>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet layout cache poisoned");
    guard.entry((nvars, order)).or_insert_with(|| Box::leak(Box::new(Layout::build(nvars, order))))
}

/// A truncated Taylor expansion around a base point.
#[derive(Clone)]
pub struct Jet {
    lay: &'static Layout,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(n={}, k={}, {:?})", self.lay.nvars, self.lay.order, self.c)
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.lay.nvars == other.lay.nvars && self.lay.order == other.lay.order && self.c == other.c
    }
}

impl Jet {
    pub fn constant(lay: &'static Layout, v: f64) -> Jet {
        let mut c = vec![0.0; lay.len()];
        c[0] = v;
        Jet { lay, c }
    }

    /// The coordinate function `x_i` expanded around `x_i = v`.
    pub fn variable(lay: &'static Layout, i: usize, v: f64) -> Jet {
        assert!(i < lay.nvars);
        let mut j = Jet::constant(lay, v);
        if lay.order > 0 {
            let mut m = vec![0u8; lay.nvars];
            m[i] = 1;
            let idx = lay.index_of(&m).expect("linear monomial");
            j.c[idx] = 1.0;
        }
        j
    }

    /// All coordinate functions of a chart point, seeded at `order`.
    pub fn coordinates(p: &[f64], order: usize) -> Vec<Jet> {
        let lay = layout(p.len(), order);
        p.iter().enumerate().map(|(i, &v)| Jet::variable(lay, i, v)).collect()
    }

    pub fn from_coefficients(lay: &'static Layout, c: Vec<f64>) -> Jet {
        assert_eq!(c.len(), lay.len());
        Jet { lay, c }
    }

    /// Constant with the same layout.
    pub fn constant_like(&self, v: f64) -> Jet {
        Jet::constant(self.lay, v)
    }

    pub fn layout(&self) -> &'static Layout {
        self.lay
    }

    pub fn order(&self) -> usize {
        self.lay.order
    }

    pub fn nvars(&self) -> usize {
        self.lay.nvars
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// The actual partial derivative `∂^α f` at the base point.
    pub fn derivative(&self, alpha: &[u8]) -> Option<f64> {
        let idx = self.lay.index_of(alpha)?;
        let fact: f64 = alpha.iter().map(|&e| (1..=e as u64).product::<u64>() as f64).product();
        Some(self.c[idx] * fact)
    }

    pub fn first_derivative(&self, i: usize) -> f64 {
        let mut a = vec![0u8; self.lay.nvars];
        a[i] = 1;
        self.derivative(&a).unwrap_or(0.0)
    }

    /// Jet of `∂f/∂x_i`, one order lower.
    pub fn partial(&self, i: usize) -> Jet {
        assert!(self.lay.order > 0, "cannot differentiate an order-0 jet");
        let lay = layout(self.lay.nvars, self.lay.order - 1);
        let mut c = vec![0.0; lay.len()];
        for &(dst, src, f) in &self.lay.deriv_table[i] {
            c[dst as usize] = self.c[src as usize] * f;
        }
        Jet { lay, c }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.lay.order {
            return self.clone();
        }
        let lay = layout(self.lay.nvars, order);
        Jet { lay, c: self.c[..lay.len()].to_vec() }
    }

    fn common(&self, other: &Jet) -> &'static Layout {
        assert_eq!(self.lay.nvars, other.lay.nvars, "jets over different variable sets");
        if self.lay.order <= other.lay.order {
            self.lay
        } else {
            other.lay
        }
    }

    pub fn add_ref(&self, o: &Jet) -> Jet {
        let lay = self.common(o);
        let c = (0..lay.len()).map(|i| self.c[i] + o.c[i]).collect();
        Jet { lay, c }
    }

    pub fn sub_ref(&self, o: &Jet) -> Jet {
        let lay = self.common(o);
        let c = (0..lay.len()).map(|i| self.c[i] - o.c[i]).collect();
        Jet { lay, c }
    }

    pub fn mul_ref(&self, o: &Jet) -> Jet {
        let lay = self.common(o);
        let mut c = vec![0.0; lay.len()];
        for &(i, j, k) in &lay.mul_table {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Jet { lay, c }
    }

    /// `self += a * b`, truncating `self` if the product has lower order.
    pub fn mul_acc(&mut self, a: &Jet, b: &Jet) {
        let lay = a.common(b);
        if lay.order < self.lay.order {
            *self = self.truncate(lay.order);
        }
        let lay = if self.lay.order < lay.order { self.lay } else { lay };
        for &(i, j, k) in &lay.mul_table {
            self.c[k as usize] += a.c[i as usize] * b.c[j as usize];
        }
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet { lay: self.lay, c: self.c.iter().map(|v| v * k).collect() }
    }

    /// `Σ_k t_k (self - value)^k`, i.e. composition with a univariate
    /// function whose normalized Taylor coefficients at `value()` are `t`.
    pub fn compose(&self, t: &[f64]) -> Jet {
        let k = self.lay.order;
        assert!(t.len() > k, "need {} Taylor coefficients", k + 1);
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut r = Jet::constant(self.lay, t[k]);
        for i in (0..k).rev() {
            r = r.mul_ref(&h);
            r.c[0] += t[i];
        }
        r
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        let t: Vec<f64> =
            (0..=self.order()).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / a.powi(k as i32 + 1)).collect();
        self.compose(&t)
    }

    pub fn powf(&self, r: f64) -> Jet {
        let a = self.value();
        let mut t = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        for k in 0..=self.order() {
            t.push(binom * a.powf(r - k as f64));
            binom *= (r - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&t)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn sin(&self) -> Jet {
        let a = self.value();
        let cyc = [a.sin(), a.cos(), -a.sin(), -a.cos()];
        self.compose(&taylor_from_cycle(&cyc, self.order()))
    }

    pub fn cos(&self) -> Jet {
        let a = self.value();
        let cyc = [a.cos(), -a.sin(), -a.cos(), a.sin()];
        self.compose(&taylor_from_cycle(&cyc, self.order()))
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut t = Vec::with_capacity(self.order() + 1);
        let mut f = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                f *= k as f64;
            }
            t.push(e / f);
        }
        self.compose(&t)
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        let t: Vec<f64> = (0..=self.order())
            .map(|k| {
                if k == 0 {
                    a.ln()
                } else {
                    let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                    s / (k as f64 * a.powi(k as i32))
                }
            })
            .collect();
        self.compose(&t)
    }

    /// Evaluate a power series `Σ a_m s^m` at the jet `s` (Horner).
    pub fn power_series(&self, coeffs: &[f64]) -> Jet {
        let mut r = Jet::constant(self.lay, *coeffs.last().unwrap_or(&0.0));
        for &a in coeffs.iter().rev().skip(1) {
            r = r.mul_ref(self);
            r.c[0] += a;
        }
        r
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn taylor_from_cycle(cyc: &[f64; 4], order: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(order + 1);
    let mut f = 1.0;
    for k in 0..=order {
        if k > 0 {
            f *= k as f64;
        }
        t.push(cyc[k % 4] / f);
    }
    t
}

macro_rules! jet_binop {
    ($tr:ident, $m:ident, $op:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                self.$op(&o)
            }
        }
        impl<'a> $tr<&'a Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: &'a Jet) -> Jet {
                self.$op(o)
            }
        }
        impl<'a> $tr<&'a Jet> for &'a Jet {
            type Output = Jet;
            fn $m(self, o: &'a Jet) -> Jet {
                self.$op(o)
            }
        }
        impl<'a> $tr<Jet> for &'a Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                self.$op(&o)
            }
        }
    };
}

jet_binop!(Add, add, add_ref);
jet_binop!(Sub, sub, sub_ref);
jet_binop!(Mul, mul, mul_ref);

impl Div<Jet> for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self.mul_ref(&o.recip())
    }
}

impl<'a> Div<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn div(self, o: &'a Jet) -> Jet {
        self.mul_ref(&o.recip())
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, v: f64) -> Jet {
        self.c[0] += v;
        self
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, v: f64) -> Jet {
        self.clone() + v
    }
}

impl Sub<f64> for &Jet {
    type Output = Jet;
    fn sub(self, v: f64) -> Jet {
        self.clone() - v
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, v: f64) -> Jet {
        self.c[0] -= v;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, v: f64) -> Jet {
        self.c.iter_mut().for_each(|c| *c *= v);
        self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, v: f64) -> Jet {
        self.scale(v)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, o: &Jet) {
        *self = self.add_ref(o);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, o: &Jet) {
        *self = self.sub_ref(o);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, v: f64) {
        self.c.iter_mut().for_each(|c| *c *= v);
    }
}

impl Layout {
    /// Index range of all coefficients of total degree `≤ order`.
    pub fn coefficients_up_to(&self, order: usize) -> std::ops::Range<usize> {
        0..self.prefix_len(order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * (1.0 + b.abs())
    }

    #[test]
    fn layout_sizes_are_binomial() {
        assert_eq!(layout(6, 2).len(), 28);
        assert_eq!(layout(6, 4).len(), 210);
        assert_eq!(layout(4, 4).len(), 70);
        assert_eq!(layout(3, 0).len(), 1);
    }

    #[test]
    fn lower_order_layout_is_prefix() {
        let hi = layout(4, 4);
        let lo = layout(4, 2);
        for i in 0..lo.len() {
            assert_eq!(lo.monomial(i), hi.monomial(i));
        }
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        // f = x^2 y + 3 y^3 - x y z^2 at (1.5, -0.7, 2.0)
        let p = [1.5, -0.7, 2.0];
        let v = Jet::coordinates(&p, 4);
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let f = &(&(x * x) * y) + &(y * &(y * y)).scale(3.0);
        let f = f - &(&(x * y) * &(z * z));
        let (px, py, pz) = (p[0], p[1], p[2]);
        assert!(close(f.value(), px * px * py + 3.0 * py.powi(3) - px * py * pz * pz, 1e-14));
        assert!(close(f.derivative(&[1, 0, 0]).unwrap(), 2.0 * px * py - py * pz * pz, 1e-14));
        assert!(close(f.derivative(&[0, 2, 0]).unwrap(), 18.0 * py, 1e-14));
        assert!(close(f.derivative(&[1, 1, 2]).unwrap(), -2.0, 1e-14));
        assert!(close(f.derivative(&[0, 3, 0]).unwrap(), 18.0, 1e-14));
        assert_eq!(f.derivative(&[4, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let p = [0.4, 1.1];
        let v = Jet::coordinates(&p, 4);
        // f = sin(x y) * exp(x)
        let f = (&v[0] * &v[1]).sin() * v[0].exp();
        let (x, y) = (p[0], p[1]);
        let fx = y * (x * y).cos() * x.exp() + (x * y).sin() * x.exp();
        assert!(close(f.derivative(&[1, 0]).unwrap(), fx, 1e-13));
        // ∂²/∂y² = -x² sin(xy) e^x
        let fyy = -x * x * (x * y).sin() * x.exp();
        assert!(close(f.derivative(&[0, 2]).unwrap(), fyy, 1e-13));
        // ∂⁴/∂y⁴ = x⁴ sin(xy) e^x
        let f4 = x.powi(4) * (x * y).sin() * x.exp();
        assert!(close(f.derivative(&[0, 4]).unwrap(), f4, 1e-12));

        let g = v[0].cos().ln();
        // d/dx ln cos x = -tan x ; d²: -sec² x
        assert!(close(g.derivative(&[1, 0]).unwrap(), -x.tan(), 1e-13));
        assert!(close(g.derivative(&[2, 0]).unwrap(), -1.0 / x.cos().powi(2), 1e-13));
    }

    #[test]
    fn recip_and_sqrt_invert() {
        let v = Jet::coordinates(&[0.3, 2.0, -1.0], 3);
        let s = &(&v[0] * &v[0]) + &(&v[1] * &v[1]) + 1.0;
        let r = s.sqrt();
        let back = &r * &r;
        for (a, b) in back.coefficients().iter().zip(s.coefficients()) {
            assert!((a - b).abs() < 1e-13);
        }
        let one = &s * &s.recip();
        assert!((one.value() - 1.0).abs() < 1e-14);
        assert!(one.coefficients()[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn partial_commutes_with_product_rule() {
        let v = Jet::coordinates(&[0.2, 0.9], 3);
        let f = v[0].sin();
        let g = &v[1] * &v[0].exp();
        let lhs = (&f * &g).partial(0);
        let rhs = &(&f.partial(0) * &g.truncate(2)) + &(&f.truncate(2) * &g.partial(0));
        for (a, b) in lhs.coefficients().iter().zip(rhs.coefficients()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_orders_truncate() {
        let a = Jet::coordinates(&[1.0], 4)[0].clone();
        let b = a.truncate(2);
        assert_eq!((&a * &b).order(), 2);
    }
}
