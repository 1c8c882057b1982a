//! The inverse construction over `S²×S²`, end to end.

use std::sync::Arc;

use nkgeom::ansatz::*;
use nkgeom::models::s2s2::S2S2Chart;
use nkgeom::nk::{tensor_norm2, HermitianChart};
use nkgeom::*;
use proptest::prelude::*;

fn derived() -> Arc<AnsatzChart> {
    Arc::new(AnsatzChart::build(Normalization::derived(), Gauge::default(), 0).unwrap())
}

#[test]
fn derived_normalization_certifies() {
    let reports = certify_nk(derived(), 8, 3).unwrap();
    let bad: Vec<_> = reports.iter().filter(|r| !r.ok()).map(|r| (&r.id, r.max_residual)).collect();
    assert!(bad.is_empty(), "{bad:?}");
    let alpha = reports.iter().find(|r| r.id == "ansatz-alpha").unwrap();
    assert!((alpha.value.unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn literal_normalization_is_degenerate() {
    let c = derived();
    let literal = AnsatzChart::new(Normalization::literal(), c.phi.clone(), Gauge::default());
    let p = [1.1, 0.4, 2.0, -0.7, 0.3, 0.1];
    let g = literal.metric(&p, 0).unwrap().value();
    let m = nalgebra::DMatrix::from_row_slice(6, 6, g.data());
    let ev = m.symmetric_eigen().eigenvalues;
    assert!(ev.iter().filter(|v| v.abs() < 1e-12).count() == 2, "{ev:?}");
    let reports = certify_nk(Arc::new(literal), 3, 1).unwrap();
    assert!(reports.iter().any(|r| !r.ok()));
}

#[test]
fn wrong_lambda_breaks_the_complex_structure() {
    let c = derived();
    let mut phi = c.phi.clone();
    phi.lambda *= 1.1;
    let off = AnsatzChart::new(Normalization::derived(), phi, Gauge::default());
    let p = [1.1, 0.4, 2.0, -0.7, 0.3, 0.1];
    let square_defect = |chart: &AnsatzChart| {
        let j = chart.complex_structure(&p, 0).unwrap().value();
        let j2 = j.contract_with(1, &j, 0);
        let mut worst = 0.0f64;
        for a in 0..6 {
            for b in 0..6 {
                let id = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((j2.get(&[a, b]) + id).abs());
            }
        }
        worst
    };
    assert!(square_defect(&c) < 1e-12);
    assert!(square_defect(&off) > 1e-2);
    assert!(certify_nk(Arc::new(off), 3, 1).unwrap().iter().any(|r| !r.ok()));
}

#[test]
fn gauge_search_finds_a_unique_winding() {
    let base = S2S2Chart::default();
    let t = build_tautological(&base, LAMBDA, &Gauge::default(), 0).unwrap();
    assert_eq!(t.winding, [-1, -1]);
    let x = [1.2, 0.1, 1.9, 0.4];
    let wrong = TautologicalForm { winding: [1, -1], ..t.clone() };
    assert!(wrong.twisted_parallel_residual(&base, &x, &Default::default()).unwrap() > 1.0);
}

#[test]
fn unit_killing_field_is_dual_to_mu() {
    let c = derived();
    let p = [1.0, -0.2, 2.1, 0.6, -0.4, 1.3];
    let g = c.metric(&p, 0).unwrap().value();
    let (_, mu) = c.connection_forms(&p, 0).unwrap();
    // g(∂t₂, ·) = μ
    for i in 0..6 {
        assert!((g.get(&[5, i]) - mu.value().get(&[i])).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn potentials_have_prescribed_curvature(p1 in 0.4..2.7f64, s1 in -3.0..3.0f64, p2 in 0.4..2.7f64, s2 in -3.0..3.0f64, seed in any::<u64>()) {
        let gauge = Gauge { f: GaugeFunction::random(seed), h: GaugeFunction::random(seed ^ 1) };
        let r = potential_residuals(&[p1, s1, p2, s2, 0.0, 0.0], &gauge).unwrap();
        prop_assert!(r[0] < 1e-8 && r[1] < 1e-8, "{:?}", r);
    }

    #[test]
    fn scalar_invariants_are_gauge_independent(seed in any::<u64>()) {
        let gauge = Gauge { f: GaugeFunction::random(seed), h: GaugeFunction::random(seed.wrapping_add(7)) };
        let shifted = AnsatzChart::build(Normalization::derived(), gauge, 0).unwrap();
        let plain = derived();
        let p = [1.3, 0.2, 1.7, -0.9, 0.5, -1.1];
        let engine = DerivativeEngine::exact();
        let inv = |c: &AnsatzChart| {
            let geo = LocalGeometry::new(c, &engine, &p, 2).unwrap();
            let r = geo.riemann().unwrap().value();
            let g = geo.metric_value();
            [geo.scalar_curvature().unwrap().value(), tensor_norm2(&r, &g, &geo.ginv.value())]
        };
        let (a, b) = (inv(&plain), inv(&shifted));
        prop_assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8, "{:?} vs {:?}", a, b);
    }
}

#[test]
fn poles_are_rejected() {
    let r = build_potentials(&[std::f64::consts::PI, 0.0, 1.0, 0.0, 0.0, 0.0], 1, &Gauge::default());
    assert!(matches!(r, Err(GeomError::ChartSingularity(_))));
}
