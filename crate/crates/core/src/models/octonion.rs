//! Imaginary octonions and the 7-dimensional cross product.
//!
//! Cayley basis `e₁…e₇` with `e_i e_j = e_k` for the cyclic triples
//! `(i, i+1, i+3) mod 7`:
//! `124, 235, 346, 457, 561, 672, 713`.

use nalgebra::{DMatrix, SMatrix, SVector};

/// Oriented triples (0-based) with `e_a × e_b = e_c`.
pub const TRIPLES: [[usize; 3]; 7] = [[0, 1, 3], [1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 0], [5, 6, 1], [6, 0, 2]];

/// Structure constants `ε_abc` of the cross product.
pub fn structure_constants() -> [[[f64; 7]; 7]; 7] {
    let mut e = [[[0.0; 7]; 7]; 7];
    for t in TRIPLES {
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            e[t[a]][t[b]][t[c]] = 1.0;
            e[t[b]][t[a]][t[c]] = -1.0;
        }
    }
    e
}

/// `x × y = Im(x y)` for imaginary octonions, generic in the scalar type.
pub fn cross<S: crate::tensor::Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    let eps = structure_constants();
    let mut out: Vec<S> = (0..7).map(|_| x[0].constant_like(0.0)).collect();
    for a in 0..7 {
        for b in 0..7 {
            for c in 0..7 {
                let s = eps[a][b][c];
                if s != 0.0 {
                    out[c] = out[c].add_ref(&x[a].mul_ref(&y[b]).scale(s));
                }
            }
        }
    }
    out
}

/// Basis of the Lie algebra `g₂ ⊂ so(7)` of derivations of the cross product.
pub fn g2_basis() -> Vec<SMatrix<f64, 7, 7>> {
    // unknowns: the 21 entries A_ij (i<j) of a skew matrix
    let pairs: Vec<(usize, usize)> = (0..7).flat_map(|i| (i + 1..7).map(move |j| (i, j))).collect();
    let eps = structure_constants();
    let skew = |k: usize| {
        let (i, j) = pairs[k];
        let mut m = SMatrix::<f64, 7, 7>::zeros();
        m[(i, j)] = 1.0;
        m[(j, i)] = -1.0;
        m
    };
    // condition: A(e_a×e_b) − Ae_a×e_b − e_a×Ae_b = 0 for all a<b
    let mut rows = Vec::new();
    for a in 0..7 {
        for b in a + 1..7 {
            for c in 0..7 {
                let row: Vec<f64> = (0..21)
                    .map(|k| {
                        let m = skew(k);
                        let mut v = 0.0;
                        for d in 0..7 {
                            v += m[(c, d)] * eps[a][b][d];
                            v -= m[(d, a)] * eps[d][b][c];
                            v -= m[(d, b)] * eps[a][d][c];
                        }
                        v
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    let nrow = rows.len();
    let mat = DMatrix::from_fn(nrow, 21, |r, k| rows[r][k]);
    let svd = (mat.transpose() * &mat).symmetric_eigen();
    let mut out = Vec::new();
    for (idx, ev) in svd.eigenvalues.iter().enumerate() {
        if ev.abs() < 1e-9 {
            let v = svd.eigenvectors.column(idx);
            let mut m = SMatrix::<f64, 7, 7>::zeros();
            for k in 0..21 {
                m += skew(k) * v[k];
            }
            out.push(m);
        }
    }
    out
}

pub fn vec7(v: &[f64]) -> SVector<f64, 7> {
    SVector::<f64, 7>::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cross_product_norm_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = cross(&x, &y);
            let n2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
            let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            assert!((n2(&c) - (n2(&x) * n2(&y) - dot * dot)).abs() < 1e-12);
            // x × y ⊥ x
            let d: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(d.abs() < 1e-13);
        }
    }

    #[test]
    fn g2_has_dimension_fourteen() {
        assert_eq!(g2_basis().len(), 14);
    }
}
