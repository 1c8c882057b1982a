//! The reduction along a unit Killing field on `S³×S³`: every identity,
//! for both exposed Killing fields, at random points.

use std::sync::Arc;

use nalgebra::DVector;
use nkgeom::exterior::form_norm2;
use nkgeom::models::registry::{Model, ModelKind};
use nkgeom::models::s3s3::killing_fields;
use nkgeom::nk::random_unit;
use nkgeom::reduction::{killing_measurements, ReductionState};
use nkgeom::report::Measurement;
use nkgeom::suite::default_tolerance;
use nkgeom::tensor::invert_matrix;
use nkgeom::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn all_measurements(st: &ReductionState, w: &DVector<f64>) -> Vec<Measurement> {
    let mut out = killing_measurements(&st.nk, &st.xi).unwrap();
    for grp in [
        st.foliation(),
        st.transversals(),
        st.covtrans(),
        st.norms_and_laplacians(),
        st.lie_suite(),
        st.g0_connection(),
        st.kahler_projection(),
        st.psi_and_line_bundle(),
        st.canonical_connection(w),
    ] {
        out.extend(grp.unwrap());
    }
    out
}

#[test]
fn every_identity_holds_for_both_killing_fields() {
    let m = Model::build(ModelKind::S3S3, 21).unwrap();
    let chart = m.s3s3.clone().unwrap();
    let engine = DerivativeEngine::exact();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (name, field) in killing_fields(&chart) {
        for _ in 0..4 {
            let p = chart.domain().sample(&mut rng, 0.1);
            let st = ReductionState::new(&*chart, &*field, &engine, &p, 2).unwrap();
            let w = random_unit(&mut rng, &st.nk.cholesky());
            let ms = all_measurements(&st, &w);
            assert_eq!(ms.len(), 83);
            for meas in ms {
                let tol = default_tolerance(&meas.id);
                assert!(meas.residual <= tol, "{name}: {} = {:e} > {tol:e}", meas.id, meas.residual);
            }
        }
    }
}

#[test]
fn norm_anchors() {
    let m = Model::build(ModelKind::S3S3, 5).unwrap();
    let xi = m.unit_killing.clone().unwrap();
    let p = m.chart.domain().center();
    let st = ReductionState::new(&*m.chart, &*xi, &DerivativeEngine::exact(), &p, 2).unwrap();
    let ms = st.norms_and_laplacians().unwrap();
    let value = |id: &str| ms.iter().find(|m| m.id == id).and_then(|m| m.value).unwrap();
    assert!((value("lemma-norm-dzeta11") - 8.0).abs() < 1e-6);
    assert!((value("lemma-norm-dzeta20") - 2.0).abs() < 1e-6);
    assert!((value("cor-norm-jhat") - 4.0).abs() < 1e-6);
    assert!((value("norm-djzeta") - 36.0).abs() < 1e-6);
}

/// The norm of the tautological form is fixed by the forward direction:
/// `|ReΨ|²_{g₀}` measured on `S³×S³`.
#[test]
fn tautological_norm_matches_forward_reduction() {
    let m = Model::build(ModelKind::S3S3, 9).unwrap();
    let xi = m.unit_killing.clone().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = m.chart.domain().sample(&mut rng, 0.1);
    let st = ReductionState::new(&*m.chart, &*xi, &DerivativeEngine::exact(), &p, 2).unwrap();
    let g0 = st.g0.value();
    let g0inv = TensorValue::new(6, vec![Slot::Up, Slot::Up], invert_matrix(6, g0.data()).unwrap());
    let forward = form_norm2(&st.psi_re.value(), &g0inv);

    let chart = Arc::new(nkgeom::ansatz::AnsatzChart::build(Default::default(), Default::default(), 0).unwrap());
    let x4 = [1.0, 0.3, 2.1, -0.5];
    let inverse = chart.phi.re_norm2(&chart.base, &x4).unwrap();
    assert!((forward - inverse).abs() < 1e-10, "{forward} vs {inverse}");
    assert!((chart.phi.lambda - 4.0 / 3f64.sqrt()).abs() < 1e-15);
}
