//! Dense tensors in a chart basis, generic over the component scalar.
//!
//! `Tensor<f64>` is a pointwise value; `Tensor<Jet>` carries a tensor field
//! together with all of its partial derivatives up to the jet order.
//! Components are stored row-major over the slot list.

use crate::error::{GeomError, Result};
use crate::jet::Jet;

/// Component scalar: either a plain value or a jet.
pub trait Scalar: Clone + Send + Sync + std::fmt::Debug {
    fn constant_like(&self, v: f64) -> Self;
    fn value(&self) -> f64;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// `self += a * b`.
    fn mul_acc(&mut self, a: &Self, b: &Self);
    fn scale(&self, k: f64) -> Self;
    fn recip(&self) -> Self;
    fn sqrt(&self) -> Self;
}

impl Scalar for f64 {
    fn constant_like(&self, v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_acc(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
}

impl Scalar for Jet {
    fn constant_like(&self, v: f64) -> Self {
        Jet::constant(self.layout(), v)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        Jet::add_ref(self, o)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Jet::sub_ref(self, o)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Jet::mul_ref(self, o)
    }
    fn mul_acc(&mut self, a: &Self, b: &Self) {
        Jet::mul_acc(self, a, b)
    }
    fn scale(&self, k: f64) -> Self {
        Jet::scale(self, k)
    }
    fn recip(&self) -> Self {
        Jet::recip(self)
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
}

/// Variance of an index slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Slot {
    /// Contravariant (vector) index.
    Up,
    /// Covariant (covector) index.
    Down,
}

#[derive(Clone, Debug)]
pub struct Tensor<S> {
    dim: usize,
    slots: Vec<Slot>,
    data: Vec<S>,
}

pub type TensorValue = Tensor<f64>;
pub type TensorJet = Tensor<Jet>;

pub(crate) fn for_each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    let total = dim.pow(rank as u32);
    for _ in 0..total {
        f(&idx);
        for k in (0..rank).rev() {
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl<S: Scalar> Tensor<S> {
    pub fn new(dim: usize, slots: Vec<Slot>, data: Vec<S>) -> Self {
        assert_eq!(data.len(), dim.pow(slots.len() as u32), "component count");
        Tensor { dim, slots, data }
    }

    pub fn from_fn(dim: usize, slots: Vec<Slot>, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let mut data = Vec::with_capacity(dim.pow(slots.len() as u32));
        for_each_index(dim, slots.len(), |i| data.push(f(i)));
        Tensor { dim, slots, data }
    }

    pub fn zeros_like(proto: &S, dim: usize, slots: Vec<Slot>) -> Self {
        let z = proto.constant_like(0.0);
        let n = dim.pow(slots.len() as u32);
        Tensor { dim, slots, data: vec![z; n] }
    }

    /// Scalar (rank-0) tensor.
    pub fn scalar(dim: usize, s: S) -> Self {
        Tensor { dim, slots: vec![], data: vec![s] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.slots.len());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn proto(&self) -> &S {
        &self.data[0]
    }

    fn same_shape(&self, o: &Self) {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        assert_eq!(self.slots, o.slots, "slot mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_shape(o);
        Tensor {
            dim: self.dim,
            slots: self.slots.clone(),
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same_shape(o);
        Tensor {
            dim: self.dim,
            slots: self.slots.clone(),
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_ref(b)).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|s| s.scale(k))
    }

    /// Multiply every component by a scalar function.
    pub fn times(&self, s: &S) -> Self {
        self.map(|c| c.mul_ref(s))
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Tensor { dim: self.dim, slots: self.slots.clone(), data: self.data.iter().map(f).collect() }
    }

    pub fn map_into<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        Tensor { dim: self.dim, slots: self.slots.clone(), data: self.data.iter().map(f).collect() }
    }

    /// Tensor product; slots of `self` come first.
    pub fn outer(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&o.slots);
        let mut data = Vec::with_capacity(self.data.len() * o.data.len());
        for a in &self.data {
            for b in &o.data {
                data.push(a.mul_ref(b));
            }
        }
        Tensor { dim: self.dim, slots, data }
    }

    /// Contract slot `a` with slot `b` (any variance; the caller supplies a
    /// metric factor when both slots have the same variance).
    pub fn contract(&self, a: usize, b: usize) -> Self {
        assert!(a != b && a < self.rank() && b < self.rank());
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let slots: Vec<Slot> =
            self.slots.iter().enumerate().filter(|(i, _)| *i != a && *i != b).map(|(_, s)| *s).collect();
        let zero = self.proto().constant_like(0.0);
        let rank = slots.len();
        let mut full = vec![0usize; self.rank()];
        let mut out = Vec::with_capacity(self.dim.pow(rank as u32));
        for_each_index(self.dim, rank, |idx| {
            let mut acc = zero.clone();
            let mut k = 0;
            for (i, f) in full.iter_mut().enumerate() {
                if i != a && i != b {
                    *f = idx[k];
                    k += 1;
                }
            }
            for m in 0..self.dim {
                full[a] = m;
                full[b] = m;
                acc = acc.add_ref(&self.data[self.offset(&full)]);
            }
            out.push(acc);
        });
        Tensor { dim: self.dim, slots, data: out }
    }

    /// Contract slot `s` of `self` with slot `t` of `o`; remaining slots of
    /// `self` then those of `o`.
    pub fn contract_with(&self, s: usize, o: &Self, t: usize) -> Self {
        assert_eq!(self.dim, o.dim);
        let n = self.dim;
        let ls: Vec<Slot> = self.slots.iter().enumerate().filter(|(i, _)| *i != s).map(|(_, x)| *x).collect();
        let rs: Vec<Slot> = o.slots.iter().enumerate().filter(|(i, _)| *i != t).map(|(_, x)| *x).collect();
        let mut slots = ls.clone();
        slots.extend_from_slice(&rs);
        let zero = self.proto().constant_like(0.0);
        let mut out = Vec::with_capacity(n.pow(slots.len() as u32));
        let mut li = vec![0usize; self.rank()];
        let mut ri = vec![0usize; o.rank()];
        for_each_index(n, slots.len(), |idx| {
            let mut k = 0;
            for (i, v) in li.iter_mut().enumerate() {
                if i != s {
                    *v = idx[k];
                    k += 1;
                }
            }
            for (i, v) in ri.iter_mut().enumerate() {
                if i != t {
                    *v = idx[k];
                    k += 1;
                }
            }
            let mut acc = zero.clone();
            for m in 0..n {
                li[s] = m;
                ri[t] = m;
                acc.mul_acc(&self.data[self.offset(&li)], &o.data[o.offset(&ri)]);
            }
            out.push(acc);
        });
        Tensor { dim: n, slots, data: out }
    }

    /// Reorder slots: slot `k` of the result is slot `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank());
        let slots: Vec<Slot> = perm.iter().map(|&p| self.slots[p]).collect();
        let mut src = vec![0usize; self.rank()];
        Tensor::from_fn(self.dim, slots, |idx| {
            for (k, &p) in perm.iter().enumerate() {
                src[p] = idx[k];
            }
            self.data[self.offset(&src)].clone()
        })
    }

    /// Plug a vector (rank-1, Up) into slot `s`.
    pub fn insert_vector(&self, s: usize, v: &Self) -> Self {
        debug_assert_eq!(v.rank(), 1);
        self.contract_with(s, v, 0)
    }

    /// Plug vectors into the leading slots.
    pub fn eval_vectors(&self, vs: &[&Self]) -> Self {
        let mut t = self.clone();
        for v in vs {
            t = t.insert_vector(0, v);
        }
        t
    }

    pub fn change_slot(mut self, s: usize, to: Slot) -> Self {
        self.slots[s] = to;
        self
    }

    /// Lower slot `s` with metric `g` (Down, Down). The slot keeps its position.
    pub fn lower(&self, s: usize, g: &Self) -> Self {
        assert_eq!(self.slots[s], Slot::Up);
        let t = self.contract_with(s, g, 0); // remaining self slots, then g's free Down
        let r = self.rank();
        let mut perm: Vec<usize> = (0..r - 1).collect();
        perm.insert(s, r - 1);
        t.permute(&perm)
    }

    /// Raise slot `s` with inverse metric `ginv` (Up, Up).
    pub fn raise(&self, s: usize, ginv: &Self) -> Self {
        assert_eq!(self.slots[s], Slot::Down);
        let t = self.contract_with(s, ginv, 0);
        let r = self.rank();
        let mut perm: Vec<usize> = (0..r - 1).collect();
        perm.insert(s, r - 1);
        t.permute(&perm)
    }

    pub fn scalar_value(&self) -> &S {
        assert_eq!(self.rank(), 0);
        &self.data[0]
    }
}

impl Tensor<Jet> {
    pub fn value(&self) -> TensorValue {
        self.map_into(|j| j.value())
    }

    pub fn order(&self) -> usize {
        self.data.iter().map(|j| j.order()).min().unwrap_or(0)
    }

    /// Componentwise `∂_i`; fails on an order-0 field.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if self.order() == 0 {
            return Err(GeomError::DerivativeOrder { needed: 1, available: 0 });
        }
        Ok(self.map(|j| j.partial(i)))
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    /// All first partials as a new leading Down slot: `(∂T)_{a,...} = ∂_a T_{...}`.
    pub fn gradient(&self) -> Result<Self> {
        let parts: Vec<Self> = (0..self.dim).map(|i| self.partial(i)).collect::<Result<_>>()?;
        let mut slots = vec![Slot::Down];
        slots.extend_from_slice(&self.slots);
        let mut data = Vec::with_capacity(self.data.len() * self.dim);
        for p in parts {
            data.extend(p.data);
        }
        Ok(Tensor { dim: self.dim, slots, data })
    }
}

impl TensorValue {
    pub fn zeros(dim: usize, slots: Vec<Slot>) -> Self {
        Tensor::zeros_like(&0.0, dim, slots)
    }

    pub fn vector(v: &[f64]) -> Self {
        Tensor::new(v.len(), vec![Slot::Up], v.to_vec())
    }

    pub fn covector(v: &[f64]) -> Self {
        Tensor::new(v.len(), vec![Slot::Down], v.to_vec())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.same_shape(o);
        self.data.iter().zip(&o.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_jet(&self, proto: &Jet) -> TensorJet {
        self.map_into(|v| proto.constant_like(*v))
    }
}

/// Solve / invert / determinant for small square matrices over any scalar,
/// using Gaussian elimination with pivots chosen on the value part.
pub fn invert_matrix<S: Scalar>(n: usize, m: &[S]) -> Result<Vec<S>> {
    let mut a: Vec<S> = m.to_vec();
    let zero = m[0].constant_like(0.0);
    let mut inv: Vec<S> = (0..n * n).map(|k| zero.constant_like(if k / n == k % n { 1.0 } else { 0.0 })).collect();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.value().abs())).max(1e-300);
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i * n + col].value().abs().total_cmp(&a[j * n + col].value().abs())).unwrap();
        if a[piv * n + col].value().abs() <= 1e-13 * scale {
            return Err(GeomError::Singular);
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
                inv.swap(piv * n + k, col * n + k);
            }
        }
        let r = a[col * n + col].recip();
        for k in 0..n {
            a[col * n + k] = a[col * n + k].mul_ref(&r);
            inv[col * n + k] = inv[col * n + k].mul_ref(&r);
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row * n + col].clone();
            for k in 0..n {
                let t = f.mul_ref(&a[col * n + k]);
                a[row * n + k] = a[row * n + k].sub_ref(&t);
                let t = f.mul_ref(&inv[col * n + k]);
                inv[row * n + k] = inv[row * n + k].sub_ref(&t);
            }
        }
    }
    Ok(inv)
}

pub fn determinant<S: Scalar>(n: usize, m: &[S]) -> Result<S> {
    let mut a: Vec<S> = m.to_vec();
    let mut det = m[0].constant_like(1.0);
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i * n + col].value().abs().total_cmp(&a[j * n + col].value().abs())).unwrap();
        if a[piv * n + col].value() == 0.0 {
            return Err(GeomError::Singular);
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            det = det.scale(-1.0);
        }
        det = det.mul_ref(&a[col * n + col]);
        let r = a[col * n + col].recip();
        for row in col + 1..n {
            let f = a[row * n + col].mul_ref(&r);
            for k in col..n {
                let t = f.mul_ref(&a[col * n + k]);
                a[row * n + k] = a[row * n + k].sub_ref(&t);
            }
        }
    }
    Ok(det)
}
