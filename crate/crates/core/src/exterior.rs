//! Exterior calculus on chart forms.
//!
//! A k-form is a fully covariant antisymmetric tensor stored densely, with
//! the determinant convention `(dx^1∧dx^2)(∂_1,∂_2) = 1`. Components are
//! computed on increasing index sets and spread by antisymmetry.

use itertools::Itertools;

use crate::chart::LocalGeometry;
use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::tensor::{Scalar, Slot, Tensor, TensorJet};

/// Sign of the permutation sorting `idx`, or 0 on a repeated index.
pub fn permutation_sign(idx: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                s = -s;
            }
        }
    }
    s
}

pub fn increasing_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

/// Dense antisymmetric k-form from its values on increasing index sets.
pub fn form_from_increasing<S: Scalar>(n: usize, k: usize, proto: &S, mut f: impl FnMut(&[usize]) -> S) -> Tensor<S> {
    let mut t = Tensor::zeros_like(proto, n, vec![Slot::Down; k]);
    for set in increasing_sets(n, k) {
        let v = f(&set);
        for perm in set.iter().copied().permutations(k) {
            let s = permutation_sign(&perm);
            t.set(&perm, v.scale(s));
        }
    }
    t
}

pub fn is_form<S: Scalar>(t: &Tensor<S>) -> bool {
    t.slots().iter().all(|s| *s == Slot::Down)
}

fn check_form<S: Scalar>(t: &Tensor<S>) -> Result<usize> {
    if !is_form(t) {
        return Err(GeomError::Mismatch("expected a covariant form".into()));
    }
    Ok(t.rank())
}

/// Full antisymmetrization `Alt(T)` of a covariant tensor.
pub fn antisymmetrize<S: Scalar>(t: &Tensor<S>) -> Tensor<S> {
    let k = t.rank();
    let n = t.dim();
    let nf: f64 = (1..=k).product::<usize>() as f64;
    form_from_increasing(n, k, t.proto(), |set| {
        let mut acc = t.proto().constant_like(0.0);
        for perm in set.iter().copied().permutations(k) {
            let s = permutation_sign(&perm);
            acc = acc.add_ref(&t.get(&perm).scale(s));
        }
        acc.scale(1.0 / nf)
    })
}

/// `(α∧β)_I = Σ_{I = J⊔K} sgn(J,K) α_J β_K`.
pub fn wedge<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>) -> Result<Tensor<S>> {
    let k = check_form(a)?;
    let l = check_form(b)?;
    let n = a.dim();
    if k + l > n {
        return Err(GeomError::DegreeOverflow { degree: k + l, dim: n });
    }
    Ok(form_from_increasing(n, k + l, a.proto(), |set| {
        let mut acc = a.proto().constant_like(0.0);
        for pick in (0..k + l).combinations(k) {
            let j: Vec<usize> = pick.iter().map(|&p| set[p]).collect();
            let kk: Vec<usize> = (0..k + l).filter(|p| !pick.contains(p)).map(|p| set[p]).collect();
            let mut order = pick.clone();
            order.extend((0..k + l).filter(|p| !pick.contains(p)));
            let s = permutation_sign(&order);
            acc = acc.add_ref(&a.get(&j).mul_ref(b.get(&kk)).scale(s));
        }
        acc
    }))
}

/// `ι_v α`, inserting `v` into the first slot.
pub fn interior<S: Scalar>(v: &Tensor<S>, a: &Tensor<S>) -> Result<Tensor<S>> {
    check_form(a)?;
    if a.rank() == 0 {
        return Err(GeomError::DegreeOverflow { degree: 0, dim: a.dim() });
    }
    Ok(a.insert_vector(0, v))
}

/// `(dα)_{i_0..i_k} = Σ_j (−1)^j ∂_{i_j} α_{..î_j..}`.
pub fn exterior_derivative(a: &TensorJet) -> Result<TensorJet> {
    let k = check_form(a)?;
    let n = a.dim();
    if k + 1 > n {
        return Err(GeomError::DegreeOverflow { degree: k + 1, dim: n });
    }
    let grad = a.gradient()?;
    let proto = grad.proto().clone();
    let mut idx = vec![0usize; k + 1];
    Ok(form_from_increasing(n, k + 1, &proto, |set| {
        let mut acc = proto.constant_like(0.0);
        for j in 0..=k {
            idx[0] = set[j];
            let mut m = 1;
            for (p, &s) in set.iter().enumerate() {
                if p != j {
                    idx[m] = s;
                    m += 1;
                }
            }
            let term = grad.get(&idx);
            acc = if j % 2 == 0 { acc.add_ref(term) } else { acc.sub_ref(term) };
        }
        acc
    }))
}

/// Raise every slot of a form.
pub fn sharp_all<S: Scalar>(a: &Tensor<S>, ginv: &Tensor<S>) -> Tensor<S> {
    let mut t = a.clone();
    for s in 0..a.rank() {
        t = t.raise(s, ginv);
    }
    t
}

/// Pointwise inner product `⟨α,β⟩ = Σ_{I increasing} α_I β^I`.
pub fn form_inner<S: Scalar>(a: &Tensor<S>, b: &Tensor<S>, ginv: &Tensor<S>) -> S {
    let bu = sharp_all(b, ginv);
    let mut acc = a.proto().constant_like(0.0);
    for set in increasing_sets(a.dim(), a.rank()) {
        acc.mul_acc(a.get(&set), bu.get(&set));
    }
    acc
}

pub fn form_norm2<S: Scalar>(a: &Tensor<S>, ginv: &Tensor<S>) -> S {
    form_inner(a, a, ginv)
}

/// Riemannian volume density `√det g` times the chart orientation.
pub fn volume_density(geo: &LocalGeometry) -> Result<Jet> {
    let n = geo.dim();
    let det = crate::tensor::determinant(n, geo.g.data())?;
    Ok(det.sqrt().scale(geo.orientation))
}

/// Hodge star: `α∧⋆β = ⟨α,β⟩ vol`.
pub fn hodge_star(geo: &LocalGeometry, a: &TensorJet) -> Result<TensorJet> {
    let k = check_form(a)?;
    let n = a.dim();
    if k > n {
        return Err(GeomError::DegreeOverflow { degree: k, dim: n });
    }
    let vol = volume_density(geo)?;
    let au = sharp_all(a, &geo.ginv);
    let sets = increasing_sets(n, k);
    Ok(form_from_increasing(n, n - k, &vol, |jset| {
        let mut acc = vol.constant_like(0.0);
        for iset in &sets {
            if iset.iter().any(|i| jset.contains(i)) {
                continue;
            }
            let mut full = iset.clone();
            full.extend_from_slice(jset);
            let s = permutation_sign(&full);
            acc = acc.add_ref(&au.get(iset).scale(s));
        }
        acc.mul_ref(&vol)
    }))
}

/// Codifferential `d*α = −g^{ab} ∇_a α_{b…}`.
pub fn codifferential(geo: &LocalGeometry, a: &TensorJet) -> Result<TensorJet> {
    let k = check_form(a)?;
    if k == 0 {
        return Ok(Tensor::scalar(a.dim(), a.proto().constant_like(0.0)));
    }
    let na = geo.covariant(a)?;
    let c = geo.ginv.contract_with(0, &na, 0).contract(0, 1);
    Ok(c.scale(-1.0))
}

/// Hodge Laplacian `Δ = dd* + d*d`; needs a form jet of order ≥ 2.
pub fn hodge_laplacian(geo: &LocalGeometry, a: &TensorJet) -> Result<TensorJet> {
    let k = check_form(a)?;
    let n = a.dim();
    let mut out =
        if k > 0 { exterior_derivative(&codifferential(geo, a)?)? } else { Tensor::zeros_like(a.proto(), n, vec![]) };
    if k < n {
        let dd = codifferential(geo, &exterior_derivative(a)?)?;
        out = if k > 0 { out.add(&dd) } else { dd };
    }
    Ok(out)
}

/// A 2-form split by an almost complex structure.
#[derive(Clone, Debug)]
pub struct TypeSplit2Form<S> {
    /// `½(ω + ω(J·,J·))`
    pub one_one: Tensor<S>,
    /// `½(ω − ω(J·,J·))`
    pub two_zero: Tensor<S>,
}

/// `ω(J·,J·)` for a 2-form and `J` stored with slots `[Up, Down]`.
pub fn pull_by<S: Scalar>(w: &Tensor<S>, j: &Tensor<S>) -> Tensor<S> {
    // w_{ab} J^a_x J^b_y
    let t = w.contract_with(0, j, 0); // [b, x]
    let t = t.contract_with(0, j, 0); // [x, y]
    t
}

pub fn type_decompose<S: Scalar>(w: &Tensor<S>, j: &Tensor<S>) -> TypeSplit2Form<S> {
    let p = pull_by(w, j);
    TypeSplit2Form { one_one: w.add(&p).scale(0.5), two_zero: w.sub(&p).scale(0.5) }
}

/// `α(J·, ·, …)`: `J` applied in slot `s`.
pub fn apply_in_slot<S: Scalar>(a: &Tensor<S>, j: &Tensor<S>, s: usize) -> Tensor<S> {
    // contract a's slot s with J's Up slot, the J Down slot goes last
    let t = a.contract_with(s, j, 0);
    let r = a.rank();
    // current layout: slots of a except s, then the new slot; move it back to s
    let mut perm: Vec<usize> = Vec::with_capacity(r);
    let mut other = 0;
    for k in 0..r {
        if k == s {
            perm.push(r - 1);
        } else {
            perm.push(other);
            other += 1;
        }
    }
    t.permute(&perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{BoxDomain, ChartMap, DerivativeEngine};
    use crate::jet::layout;
    use crate::tensor::TensorValue;

    fn basis1(n: usize, i: usize) -> TensorValue {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        TensorValue::covector(&v)
    }

    #[test]
    fn wedge_of_coordinate_covectors() {
        let w = wedge(&basis1(3, 0), &basis1(3, 1)).unwrap();
        assert_eq!(*w.get(&[0, 1]), 1.0);
        assert_eq!(*w.get(&[1, 0]), -1.0);
        let v = wedge(&w, &basis1(3, 2)).unwrap();
        assert_eq!(*v.get(&[0, 1, 2]), 1.0);
        assert_eq!(*v.get(&[2, 1, 0]), -1.0);
        assert!(matches!(wedge(&v, &basis1(3, 0)), Err(GeomError::DegreeOverflow { .. })));
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let a = TensorValue::covector(&[1.0, 2.0, -1.0, 0.5]);
        let b = form_from_increasing(4, 2, &0.0, |s| (s[0] + 2 * s[1]) as f64 - 1.5);
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        assert!(ab.max_abs_diff(&ba) < 1e-15);
    }

    #[test]
    fn alt_of_form_is_identity() {
        let b = form_from_increasing(4, 3, &0.0, |s| (s[0] * 7 + s[1] * 3 + s[2]) as f64);
        assert!(antisymmetrize(&b).max_abs_diff(&b) < 1e-14);
    }

    struct Flat(BoxDomain);
    impl ChartMap for Flat {
        fn name(&self) -> String {
            "flat".into()
        }
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn domain(&self) -> &BoxDomain {
            &self.0
        }
        fn metric(&self, p: &[f64], order: usize) -> Result<TensorJet> {
            let lay = layout(p.len(), order);
            Ok(Tensor::from_fn(p.len(), vec![Slot::Down, Slot::Down], |i| {
                Jet::constant(lay, if i[0] == i[1] { 1.0 } else { 0.0 })
            }))
        }
    }

    #[test]
    fn d_squared_vanishes() {
        let p = [0.3, -0.2, 0.5, 0.1];
        let x = Jet::coordinates(&p, 3);
        let a =
            Tensor::new(4, vec![Slot::Down], vec![x[1].sin() * x[2].clone(), x[0].exp(), &x[3] * &x[0], x[2].cos()]);
        let dd = exterior_derivative(&exterior_derivative(&a).unwrap()).unwrap();
        assert!(dd.value().max_abs() < 1e-14);
    }

    #[test]
    fn flat_star_and_laplacian() {
        let c = Flat(BoxDomain::cube(3, 0.0, 1.0));
        let p = [0.2, 0.1, -0.3];
        let geo = LocalGeometry::new(&c, &DerivativeEngine::exact(), &p, 3).unwrap();
        let dx = basis1(3, 0).to_jet(geo.g.proto());
        let s = hodge_star(&geo, &dx).unwrap().value();
        assert_eq!(*s.get(&[1, 2]), 1.0);
        let x = Jet::coordinates(&p, 3);
        // f = x0² + x1 x2 ⇒ Δf = −2
        let f = Tensor::scalar(3, &x[0] * &x[0] + &x[1] * &x[2]);
        let lap = hodge_laplacian(&geo, &f).unwrap();
        assert!((lap.scalar_value().value() + 2.0).abs() < 1e-13);
    }

    #[test]
    fn pull_and_split() {
        let j = Tensor::from_fn(2, vec![Slot::Up, Slot::Down], |i| match (i[0], i[1]) {
            (0, 1) => -1.0,
            (1, 0) => 1.0,
            _ => 0.0,
        });
        let w = form_from_increasing(2, 2, &0.0, |_| 1.0);
        let s = type_decompose(&w, &j);
        assert!(s.two_zero.max_abs() < 1e-15);
    }
}
