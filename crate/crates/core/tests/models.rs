//! Model construction: anchors, chart overlaps and the scale calibration.

use nalgebra::{DMatrix, DVector, Vector3};
use nkgeom::models::quaternion::Quat;
use nkgeom::models::registry::{Model, ModelKind};
use nkgeom::models::s2s2::S2S2Chart;
use nkgeom::models::s3s3::{calibrate_scale, S3S3Chart};
use nkgeom::nk::{random_unit, tensor_norm2, HermitianChart, NKPoint};
use nkgeom::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Constant type of `g = c(|U|²+|V|²−⟨U,V⟩)`, `J(U,V) = (2V−U, V−2U)/√3` on
/// `su(2)⊕su(2)` from the Koszul formula for left-invariant fields,
/// `2⟨∇_XY,Z⟩ = ⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩`, with `[a,b] = 2a×b`.
fn lie_algebra_constant_type(c: f64, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let s3 = 3f64.sqrt();
    let mut g = DMatrix::zeros(6, 6);
    let mut j = DMatrix::zeros(6, 6);
    for i in 0..3 {
        g[(i, i)] = c;
        g[(i + 3, i + 3)] = c;
        g[(i, i + 3)] = -c / 2.0;
        g[(i + 3, i)] = -c / 2.0;
        j[(i, i)] = -1.0 / s3;
        j[(i, i + 3)] = 2.0 / s3;
        j[(i + 3, i)] = -2.0 / s3;
        j[(i + 3, i + 3)] = 1.0 / s3;
    }
    let bracket = |a: &DVector<f64>, b: &DVector<f64>| -> DVector<f64> {
        let cross = |o: usize| {
            let u = Vector3::new(a[o], a[o + 1], a[o + 2]);
            let v = Vector3::new(b[o], b[o + 1], b[o + 2]);
            u.cross(&v) * 2.0
        };
        let (l, r) = (cross(0), cross(3));
        DVector::from_vec(vec![l[0], l[1], l[2], r[0], r[1], r[2]])
    };
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &g * b)[0];
    let ginv = g.clone().try_inverse().unwrap();
    let nabla = |a: &DVector<f64>, b: &DVector<f64>| -> DVector<f64> {
        let covec = DVector::from_fn(6, |k, _| {
            let e = DVector::from_fn(6, |i, _| if i == k { 1.0 } else { 0.0 });
            0.5 * (ip(&bracket(a, b), &e) - ip(&bracket(b, &e), a) + ip(&bracket(&e, a), b))
        });
        &ginv * covec
    };
    let jy = &j * y;
    let v = nabla(x, &jy) - &j * nabla(x, y);
    let jx = &j * x;
    ip(&v, &v) / (ip(x, x) * ip(y, y) - ip(x, y).powi(2) - ip(&jx, y).powi(2))
}

#[test]
fn calibrated_scale_matches_lie_algebra_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = DVector::from_fn(6, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
    let y = DVector::from_fn(6, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
    // α(c) = α(1)/c, so the scale of constant type one is α(1)
    let oracle = lie_algebra_constant_type(1.0, &x, &y);
    let c_star = calibrate_scale(16, 11).unwrap();
    assert!((c_star - oracle).abs() < 1e-12, "{c_star} vs {oracle}");
    assert!((lie_algebra_constant_type(c_star, &x, &y) - 1.0).abs() < 1e-12);
}

#[test]
fn kernel_anchors() {
    let engine = DerivativeEngine::exact();
    let s6 = Model::build(ModelKind::S6, 1).unwrap();
    let p = s6.chart.domain().center();
    let geo = LocalGeometry::new(&*s6.chart, &engine, &p, 2).unwrap();
    let g = geo.metric_value();
    assert!(geo.ricci().unwrap().value().max_abs_diff(&g.scale(5.0)) < 1e-6);
    assert!((geo.scalar_curvature().unwrap().value() - 30.0).abs() < 1e-6);
    let base = S2S2Chart::default();
    let q = base.domain().center();
    let geo = LocalGeometry::new(&base, &engine, &q, 2).unwrap();
    assert!(geo.ricci().unwrap().value().max_abs_diff(&geo.metric_value().scale(12.0)) < 1e-7);
}

#[test]
fn s6_killing_fields_do_not_have_constant_length() {
    let m = Model::build(ModelKind::S6, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, f) in &m.killing {
        let lens: Vec<f64> = (0..12)
            .map(|_| {
                let p = m.chart.domain().sample(&mut rng, 0.1);
                let xi = f.eval(&p, 0).unwrap().value();
                let g = m.chart.metric(&p, 0).unwrap().value();
                xi.contract_with(0, &g, 0).contract_with(0, &xi, 0).scalar_value().sqrt()
            })
            .collect();
        let (lo, hi) = lens.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi - lo > 0.05, "{name}: {lo}..{hi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn quaternion_exp_log_round_trip(a in -1.5..1.5f64, b in -1.5..1.5f64, c in -1.5..1.5f64) {
        prop_assume!((a * a + b * b + c * c).sqrt() < 3.0);
        let q = Quat::exp_imaginary([a, b, c]);
        let back = q.log_unit();
        for (u, v) in back.iter().zip([a, b, c]) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn overlapping_s3s3_charts_agree_on_scalar_invariants(seed in any::<u64>(), sx in -0.3..0.3f64, sy in -0.3..0.3f64) {
        let c = 4.0 / 9.0;
        let a = S3S3Chart::new(c, Quat::from_axis_angle([0.3, 1.0, -0.2], 0.7), Quat::one());
        let shift = Quat::exp_imaginary([sx, sy, 0.1]);
        let b = S3S3Chart::new(c, a.p0.mul(&shift), Quat::exp_imaginary([sy, 0.0, sx]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DVector::from_fn(6, |_, _| rand::Rng::gen_range(&mut rng, -0.4..0.4));
        let (p, q) = a.point(x.as_slice());
        let Some(y) = b.coordinates_of(&p, &q) else { return Ok(()) };
        let engine = DerivativeEngine::exact();
        let inv = |ch: &S3S3Chart, z: &[f64]| {
            let nk = NKPoint::new(ch, &engine, z, 2).unwrap();
            let geo = &nk.geo;
            let riem = geo.riemann().unwrap().value();
            [
                geo.scalar_curvature().unwrap().value(),
                tensor_norm2(&riem, &nk.g_tensor(), &nk.ginv_tensor()),
                tensor_norm2(&nk.dj.value(), &nk.g_tensor(), &nk.ginv_tensor()),
                tensor_norm2(&nk.omega.value(), &nk.g_tensor(), &nk.ginv_tensor()),
            ]
        };
        let (u, v) = (inv(&a, x.as_slice()), inv(&b, &y));
        for k in 0..4 {
            prop_assert!((u[k] - v[k]).abs() < 1e-8, "invariant {k}: {} vs {}", u[k], v[k]);
        }
    }

    #[test]
    fn nearly_kahler_invariants_at_random_points(seed in any::<u64>()) {
        let engine = DerivativeEngine::exact();
        for kind in [ModelKind::S3S3, ModelKind::S6, ModelKind::Ansatz] {
            let m = Model::build(kind, seed % 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = m.chart.domain().sample(&mut rng, 0.1);
            let nk = NKPoint::new(&*m.chart, &engine, &p, 1).unwrap();
            let j = nk.jm();
            prop_assert!((j * j + DMatrix::identity(6, 6)).amax() < 1e-10);
            prop_assert!((j.transpose() * nk.g() * j - nk.g()).amax() < 1e-10);
            let chol = nk.cholesky();
            let (x, y) = (random_unit(&mut rng, &chol), random_unit(&mut rng, &chol));
            prop_assert!(nk.nk_residual(&x) < 1e-9);
            prop_assert!((nk.constant_type(&x, &y).unwrap() - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn degenerate_pair_is_rejected() {
    let m = Model::build(ModelKind::S6, 0).unwrap();
    let p = m.chart.domain().center();
    let nk = NKPoint::new(&*m.chart, &DerivativeEngine::exact(), &p, 1).unwrap();
    let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let jx = nk.jm() * &x;
    assert!(matches!(nk.constant_type(&x, &jx), Err(GeomError::DegeneratePair(_))));
}

#[test]
fn base_structures_commute_and_are_parallel() {
    let base = S2S2Chart::default();
    let q = [1.0, 0.5, 2.2, -0.4];
    let geo = LocalGeometry::new(&base, &DerivativeEngine::exact(), &q, 1).unwrap();
    let i0 = base.complex_structure(&q, 1).unwrap();
    let jh = base.j_hat(&q, 1).unwrap();
    assert!(geo.covariant(&i0).unwrap().value().max_abs() < 1e-12);
    assert!(geo.covariant(&jh).unwrap().value().max_abs() < 1e-12);
    let (a, b) = (i0.value(), jh.value());
    assert!(a.contract_with(1, &b, 0).max_abs_diff(&b.contract_with(1, &a, 0)) < 1e-14);
}
