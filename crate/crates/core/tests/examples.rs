use std::sync::Arc;

use semihilbert::blockmat::{self, BlockConfig};
use semihilbert::certify::{self, CertifyConfig};
use semihilbert::gauges::{self, SweepConfig};
use semihilbert::genfuzz::{self, GenConfig, TrialContext};
use semihilbert::linalg::{c, eye, max_abs, real_diag, real_mat, real_vec, zeros};
use semihilbert::rankone;
use semihilbert::semiop::{self, a_adjoint, tilde, wrap, DEFAULT_CLASS_TOL};
use semihilbert::weightspace::{a_inner, a_norm, a_normalize, build_weight};
use semihilbert::{AVector, CMat, Error, SemiOperator, Weight};

fn weight(m: CMat) -> Arc<Weight> {
    build_weight(&m, 100.0).unwrap()
}

fn op(t: CMat, w: &Arc<Weight>) -> SemiOperator {
    wrap(t, w, DEFAULT_CLASS_TOL).unwrap()
}

fn vec(w: &Arc<Weight>, v: &[f64]) -> AVector {
    AVector::new(real_vec(v), w).unwrap()
}

fn cfg() -> SweepConfig {
    SweepConfig::default()
}

fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
    max_abs(&(a - b)) <= tol
}

fn shift() -> CMat {
    real_mat(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

fn lower_shift() -> CMat {
    real_mat(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

#[test]
fn weights() {
    let w = weight(eye(2));
    assert_eq!(w.rank(), 2);
    assert!(close(w.projector(), &eye(2), 1e-14) && close(w.pinv(), &eye(2), 1e-14));

    let w = weight(real_diag(&[1.0, 0.0]));
    assert_eq!(w.rank(), 1);
    assert!(close(w.pinv(), &real_diag(&[1.0, 0.0]), 1e-14));
    assert!(close(w.projector(), &real_diag(&[1.0, 0.0]), 1e-14));

    // cofactor inverse
    let a = real_mat(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let det = 2.0 * 2.0 - 1.0 * 1.0;
    let inv = real_mat(2, 2, &[2.0 / det, -1.0 / det, -1.0 / det, 2.0 / det]);
    let w = weight(a.clone());
    assert_eq!(w.rank(), 2);
    assert!(close(w.pinv(), &inv, 1e-14));
    assert!(close(&(w.pinv() * &a), &eye(2), 1e-14));

    assert!(matches!(build_weight(&real_mat(2, 2, &[1.0, 1.0, 0.0, 1.0]), 100.0), Err(Error::NotHermitian { .. })));
    assert!(matches!(build_weight(&real_diag(&[1.0, -1.0]), 100.0), Err(Error::NotPsd { .. })));
    assert!(matches!(build_weight(&zeros(2), 100.0), Err(Error::ZeroWeight)));
}

#[test]
fn inner_products_and_norms() {
    let w = weight(real_diag(&[1.0, 0.0]));
    assert_eq!(a_inner(&vec(&w, &[1.0, 5.0]), &vec(&w, &[1.0, 7.0])).unwrap(), c(1.0, 0.0));
    assert_eq!(a_norm(&vec(&w, &[0.0, 9.0])), 0.0);
    let x = a_normalize(&vec(&w, &[2.0, 7.0])).unwrap();
    assert!((x.entries() - real_vec(&[1.0, 3.5])).norm() < 1e-15);
    assert!(matches!(a_normalize(&vec(&w, &[0.0, 9.0])), Err(Error::ANullVector)));

    let w = weight(eye(2));
    assert_eq!(a_inner(&vec(&w, &[1.0, 0.0]), &vec(&w, &[0.0, 1.0])).unwrap(), c(0.0, 0.0));
    assert_eq!(a_norm(&vec(&w, &[3.0, 4.0])), 5.0);
    assert!((a_normalize(&vec(&w, &[2.0, 0.0])).unwrap().entries() - real_vec(&[1.0, 0.0])).norm() < 1e-15);

    let w = weight(real_mat(2, 2, &[2.0, 1.0, 1.0, 2.0]));
    // y* A x picks the (1, 0) entry of A
    assert_eq!(a_inner(&vec(&w, &[1.0, 0.0]), &vec(&w, &[0.0, 1.0])).unwrap(), c(1.0, 0.0));

    let w = weight(real_diag(&[4.0, 1.0]));
    assert!((a_norm(&vec(&w, &[1.0, 1.0])) - 5f64.sqrt()).abs() < 1e-15);
    let w = weight(real_diag(&[4.0, 0.0]));
    assert!((a_normalize(&vec(&w, &[1.0, 0.0])).unwrap().entries() - real_vec(&[0.5, 0.0])).norm() < 1e-15);

    let other = weight(eye(2));
    assert!(matches!(a_inner(&vec(&w, &[1.0, 0.0]), &vec(&other, &[1.0, 0.0])), Err(Error::ContextMismatch)));
}

#[test]
fn operator_classes() {
    let w = weight(real_diag(&[1.0, 0.0]));
    let leak = SemiOperator::new(shift(), &w, DEFAULT_CLASS_TOL).unwrap();
    assert!(!leak.is_a_bounded());
    assert!((leak.class_residuals()[0] - 1.0).abs() < 1e-15);
    assert!(matches!(gauges::a_opnorm(&leak), Err(Error::NotABounded { .. })));
    assert!(matches!(tilde(&leak), Err(Error::NotABounded { .. })));
    let t = op(lower_shift(), &w);
    assert!(t.is_a_bounded() && t.is_a_adjointable());
    assert!(max_abs(a_adjoint(&t).unwrap().mat()) == 0.0);
    let m = tilde(&t).unwrap();
    assert_eq!((m.rank(), m.matrix().nrows()), (1, 1));
    assert_eq!(m.matrix()[(0, 0)], c(0.0, 0.0));
    assert_eq!(gauges::a_opnorm(&t).unwrap(), 0.0);

    let sa = op(real_mat(2, 2, &[1.0, 0.0, 5.0, 1.0]), &w);
    assert!(semiop::is_a_selfadjoint(&sa, 1e-12));

    let w = weight(eye(2));
    let t = op(CMat::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5)), &w);
    assert!(t.is_a_bounded() && t.is_a_adjointable());
    assert!(close(a_adjoint(&t).unwrap().mat(), &t.mat().adjoint(), 1e-15));
    assert!(close(tilde(&t).unwrap().matrix(), t.mat(), 1e-14));
    assert!(!semiop::is_a_selfadjoint(&op(shift(), &w), 1e-12));
    let psd = op(real_mat(2, 2, &[2.0, 1.0, 1.0, 2.0]), &w);
    assert!(semiop::is_a_selfadjoint(&psd, 1e-12) && semiop::is_a_positive(&psd, 1e-12));

    for a in [eye(3), real_diag(&[1.0, 0.0, 2.0]), real_mat(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0])] {
        let w = weight(a);
        let id = op(eye(3), &w);
        assert!(close(a_adjoint(&id).unwrap().mat(), w.projector(), 1e-12));
        assert!(close(tilde(&id).unwrap().matrix(), &eye(w.rank()), 1e-12));
        assert!((gauges::a_opnorm(&id).unwrap() - 1.0).abs() < 1e-12);
        assert!((gauges::a_radius(&id, &cfg()).unwrap() - 1.0).abs() < 1e-12);
        assert!(semiop::is_a_unitary(&id, 1e-12).unwrap());
        assert!(semiop::is_a_unitary(&id.scaled(c(0.6, 0.8)).unwrap(), 1e-12).unwrap());
    }
}

#[test]
fn unitaries_from_lifts() {
    let mut rng = genfuzz::trial_rng(5, "examples-unitary", 0);
    let w = genfuzz::gen_weight_with(&mut rng, 4, 2, false).unwrap();
    let v = genfuzz::haar_unitary(&mut rng, 2);
    let u = semiop::a_unitary_from(&w, &v).unwrap();
    assert!(semiop::is_a_unitary(&u, 1e-9).unwrap());
    let a = w.matrix();
    assert!(max_abs(&(u.mat().adjoint() * a * u.mat() - a)) <= 1e-10 * w.scale());
    let p = semiop::a_unitary_from(&w, &eye(2)).unwrap();
    assert!(close(p.mat(), w.projector(), 1e-12));
    let plain = semiop::a_unitary_from(&weight(eye(2)), &v).unwrap();
    assert!(close(plain.mat(), &v, 1e-14));
}

#[test]
fn gauges_on_small_matrices() {
    let w = weight(eye(2));
    let s = op(shift(), &w);
    assert_eq!(gauges::a_opnorm(&s).unwrap(), 1.0);
    assert!((gauges::a_radius(&s, &cfg()).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(gauges::a_spectral_radius(&s).unwrap(), 0.0);
    assert!(!gauges::is_a_normaloid(&s, 1e-9, &cfg()).unwrap());

    // x = (cos t, e^{ia} sin t) gives x*Tx = 1 + e^{ia} sin t cos t, at most 3/2
    let jordan = op(real_mat(2, 2, &[1.0, 1.0, 0.0, 1.0]), &w);
    assert!((gauges::a_radius(&jordan, &cfg()).unwrap() - 1.5).abs() < 1e-12);

    assert!((gauges::a_crawford(&op(eye(2), &w), &cfg()).unwrap() - 1.0).abs() < 1e-12);
    assert!(gauges::a_crawford(&op(real_diag(&[1.0, -1.0]), &w), &cfg()).unwrap() < 1e-12);
    assert!((gauges::a_crawford(&op(real_diag(&[2.0, 3.0]), &w), &cfg()).unwrap() - 2.0).abs() < 1e-12);
    assert!((gauges::a_spectral_radius(&op(real_diag(&[2.0, 1.0]), &w)).unwrap() - 2.0).abs() < 1e-12);
    assert!((gauges::a_spectral_radius(&op(real_mat(2, 2, &[0.0, 4.0, 1.0, 0.0]), &w)).unwrap() - 2.0).abs() < 1e-12);
    let herm = op(real_mat(2, 2, &[1.0, 2.0, 2.0, -3.0]), &w);
    assert!(gauges::is_a_normaloid(&herm, 1e-9, &cfg()).unwrap());
    assert!(gauges::is_a_normaloid(&op(eye(2), &w), 1e-9, &cfg()).unwrap());
}

#[test]
fn range_polygons() {
    let w = weight(eye(2));
    let seg = gauges::numerical_range_polygon(&op(CMat::from_diagonal(&semihilbert::CVec::from_vec(vec![c(0.0, 1.0), c(0.0, -1.0)])), &w), 64).unwrap();
    let top = seg.polygon.iter().map(|z| z.im).fold(f64::MIN, f64::max);
    let bottom = seg.polygon.iter().map(|z| z.im).fold(f64::MAX, f64::min);
    assert!((top - 1.0).abs() < 1e-12 && (bottom + 1.0).abs() < 1e-12);
    assert!(seg.polygon.iter().all(|z| z.re.abs() < 1e-12));

    let disk = gauges::numerical_range_polygon(&op(shift(), &w), 90).unwrap();
    assert_eq!(disk.polygon.len(), 91);
    assert!(disk.polygon.iter().all(|z| (z.norm() - 0.5).abs() < 1e-6));
    assert!((disk.polygon[0] - disk.polygon[90]).norm() < 1e-9);

    let w = weight(real_diag(&[3.0, 1.0, 0.0]));
    let x = AVector::new(real_vec(&[1.0, 2.0, 5.0]), &w).unwrap();
    let y = AVector::new(semihilbert::CVec::from_vec(vec![c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)]), &w).unwrap();
    let r1 = rankone::make_rank_one(&x, &y).unwrap();
    let prof = gauges::numerical_range_polygon(&r1.to_operator().unwrap(), 720).unwrap();
    let max_mod = prof.polygon.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!((max_mod - rankone::rank_one_radius(&r1)).abs() < 1e-4);
    assert!((prof.omega - rankone::rank_one_radius(&r1)).abs() < 1e-9);
}

#[test]
fn rank_one_examples() {
    let w = weight(eye(2));
    let (e1, e2) = (vec(&w, &[1.0, 0.0]), vec(&w, &[0.0, 1.0]));
    let r = rankone::make_rank_one(&e1, &e2).unwrap();
    assert!(close(r.matrix(), &shift(), 0.0));
    assert_eq!(rankone::rank_one_norm(&r), 1.0);
    assert_eq!(rankone::rank_one_radius(&r), 0.5);
    assert!(close(&rankone::rank_one_adjoint(&r), &lower_shift(), 0.0));
    assert!(close(&rankone::rank_one_adjoint(&r), &r.matrix().adjoint(), 0.0));
    let unit = a_normalize(&vec(&w, &[3.0, 4.0])).unwrap();
    assert!((rankone::rank_one_radius(&rankone::make_rank_one(&unit, &unit).unwrap()) - 1.0).abs() < 1e-15);

    let w = weight(real_diag(&[1.0, 0.0]));
    let r = rankone::make_rank_one(&vec(&w, &[0.0, 1.0]), &vec(&w, &[1.0, 0.0])).unwrap();
    assert!(close(r.matrix(), &lower_shift(), 0.0));
    let null = vec(&w, &[0.0, 1.0]);
    let r = rankone::make_rank_one(&vec(&w, &[1.0, 1.0]), &null).unwrap();
    assert_eq!(max_abs(r.matrix()), 0.0);
    assert_eq!(rankone::rank_one_norm(&r), 0.0);
    assert_eq!(max_abs(&rankone::rank_one_adjoint(&rankone::make_rank_one(&null, &vec(&w, &[1.0, 0.0])).unwrap())), 0.0);
    let r = rankone::make_rank_one(&vec(&w, &[1.0, 0.0]), &vec(&w, &[1.0, 1.0])).unwrap();
    assert!((rankone::rank_one_radius(&r) - 1.0).abs() < 1e-15);
    assert!((gauges::a_radius(&r.to_operator().unwrap(), &cfg()).unwrap() - 1.0).abs() < 1e-9);

    let w = weight(real_diag(&[4.0, 1.0]));
    let r = rankone::make_rank_one(&vec(&w, &[1.0, 0.0]), &vec(&w, &[0.0, 1.0])).unwrap();
    assert_eq!(rankone::rank_one_norm(&r), 2.0);
    assert!((gauges::a_opnorm(&r.to_operator().unwrap()).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn certifier_examples() {
    let cfg = CertifyConfig::default();
    let w = weight(eye(2));
    let t = op(real_diag(&[1.0, -1.0]), &w);
    let id = op(eye(2), &w);
    assert!(certify::bj_orthogonal(&t, &id, &cfg).unwrap().holds);
    assert!(certify::wa_orthogonal(&t, &id, &cfg).unwrap().holds);
    let wa = certify::wa_orthogonal(&t, &id, &cfg).unwrap();
    assert!(certify::wa_ortho_crosscheck(&t, &id, &wa, 36).unwrap().passed());
    let zero = op(zeros(2), &w);
    let trivial = certify::wa_orthogonal(&t, &zero, &cfg).unwrap();
    assert!(trivial.holds && trivial.margin == 0.0);
    assert!(certify::wa_ortho_crosscheck(&t, &zero, &trivial, 36).unwrap().passed());

    let v = certify::bj_orthogonal(&t, &t, &cfg).unwrap();
    assert!(!v.holds && (v.margin + 1.0).abs() < 1e-8);
    assert!((v.witness.scalar.unwrap() - c(-1.0, 0.0)).norm() < 1e-6);
    assert!(!certify::wa_orthogonal(&t, &t, &cfg).unwrap().holds);

    // omega(shift + g lower) = (|1| + |g|) / 2 >= 1/2
    let wa = certify::wa_orthogonal(&op(shift(), &w), &op(lower_shift(), &w), &cfg).unwrap();
    assert!(wa.holds && wa.margin.abs() < 1e-9, "{wa:?}");

    let a = op(real_diag(&[1.0, 0.0]), &w);
    let b = op(real_diag(&[0.0, 1.0]), &w);
    assert!(!certify::norm_parallel(&a, &b, &cfg).unwrap().holds);
    assert!(!certify::wa_parallel(&a, &b, &cfg).unwrap().holds);
    let g = op(CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64 - 0.3)), &w);
    let k = c(0.0, 2.0);
    let v = certify::norm_parallel(&g, &g.scaled(k).unwrap(), &cfg).unwrap();
    assert!(v.holds);
    assert!((v.witness.scalar.unwrap() - k.conj() / k.norm()).norm() < 1e-6);
    let v = certify::wa_parallel(&g, &g.scaled(c(2.0, 0.0)).unwrap(), &cfg).unwrap();
    assert!(v.holds && (v.witness.scalar.unwrap() - c(1.0, 0.0)).norm() < 1e-6);

    let x = vec(&w, &[1.0, 2.0]);
    let y = AVector::new(x.entries() * c(0.0, 3.0), &w).unwrap();
    let v = certify::vec_parallel(&x, &y, 1e-9).unwrap();
    assert!(v.holds);
    let lambda = v.witness.scalar.unwrap();
    assert!((a_norm(&AVector::new(x.entries() + y.entries() * lambda, &w).unwrap()) - a_norm(&x) - a_norm(&y)).abs() < 1e-12);
    assert!(!certify::vec_parallel(&vec(&w, &[1.0, 0.0]), &vec(&w, &[0.0, 1.0]), 1e-9).unwrap().holds);
    let w1 = weight(real_diag(&[1.0, 0.0]));
    assert!(certify::vec_parallel(&vec(&w1, &[1.0, 0.0]), &vec(&w1, &[1.0, 99.0]), 1e-9).unwrap().holds);
}

#[test]
fn certifier_preconditions() {
    let cfg = CertifyConfig::default();
    let w = weight(real_diag(&[1.0, 0.0]));
    let bounded = op(lower_shift(), &w);
    let leak = semiop::SemiOperator::new(shift(), &w, DEFAULT_CLASS_TOL).unwrap();
    assert!(!leak.is_a_bounded());
    assert!(matches!(certify::bj_orthogonal(&bounded, &leak, &cfg), Err(Error::NotABounded { .. })));
    let other = op(eye(2), &weight(eye(2)));
    assert!(matches!(certify::wa_parallel(&bounded, &other, &cfg), Err(Error::ContextMismatch)));
    assert!(matches!(certify::certify_orthogonal("roberts", &bounded, &bounded, &cfg), Err(Error::UnknownRelation(_))));
}

#[test]
fn bridge_examples() {
    let cfg = CertifyConfig::default();
    let w = weight(eye(2));
    let herm = op(real_mat(2, 2, &[2.0, 1.0, 1.0, -1.0]), &w);
    let mut rng = genfuzz::trial_rng(9, "examples-bridge", 0);
    let s = genfuzz::orthogonal_to(&mut rng, &herm, semihilbert::certify::Relation::WaOrtho, &cfg).unwrap().unwrap();
    let r = certify::normaloid_bridge_check(&herm, &s, &cfg).unwrap();
    assert!(r.t_normaloid && r.conforms());
    assert!(r.cases.iter().any(|k| k.hypothesis == "normaloid" && k.premise.holds && k.conclusion.holds));

    let nil = op(shift(), &w);
    let s = op(real_diag(&[1.0, -1.0]), &w);
    let r = certify::normaloid_bridge_check(&nil, &s, &cfg).unwrap();
    assert!(r.at_squared_zero && r.conforms());
    assert!(r.cases.iter().any(|k| k.hypothesis == "square-zero" && k.premise.holds && k.conclusion.holds));

    let a = op(real_diag(&[1.0, 2.0]), &w);
    let r = certify::normaloid_bridge_check(&a, &a.scaled(c(3.0, 0.0)).unwrap(), &cfg).unwrap();
    assert!(r.conforms());
    assert!(r.cases.iter().any(|k| k.hypothesis == "both-normaloid" && k.premise.holds && k.conclusion.holds));
}

fn block(w: &Arc<Weight>, grid: Vec<Vec<CMat>>) -> blockmat::BlockOperator {
    blockmat::build_block(&grid, w).unwrap()
}

fn value(r: &blockmat::BlockReport, name: &str) -> f64 {
    r.quantities.iter().find(|q| q.name == name).unwrap_or_else(|| panic!("no {name} in {r:?}")).value
}

#[test]
fn block_assembly() {
    let w = weight(eye(2));
    let (i, z) = (eye(2), zeros(2));
    let b = block(&w, vec![vec![i.clone(), z.clone()], vec![z.clone(), i.clone()]]);
    assert!(close(b.inflated().mat(), &eye(4), 0.0));
    let t = real_mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
    let b = block(&w, vec![vec![z.clone(), t.clone()], vec![t.adjoint(), z.clone()]]);
    let big = b.inflated().mat();
    assert_eq!(max_abs(&big.view((0, 0), (2, 2)).into_owned()), 0.0);
    assert_eq!(max_abs(&big.view((2, 2), (2, 2)).into_owned()), 0.0);

    // independent dense assembly and A^+ T* A on the inflated level
    let mut rng = genfuzz::trial_rng(1, "examples-assembly", 0);
    let w = genfuzz::gen_weight_with(&mut rng, 3, 2, true).unwrap();
    let b = genfuzz::gen_block(&mut rng, &w, 3, false).unwrap();
    let mut dense = CMat::zeros(9, 9);
    let mut a_big = CMat::zeros(9, 9);
    let mut pinv_big = CMat::zeros(9, 9);
    for r in 0..3 {
        a_big.view_mut((3 * r, 3 * r), (3, 3)).copy_from(w.matrix());
        pinv_big.view_mut((3 * r, 3 * r), (3, 3)).copy_from(w.pinv());
        for s in 0..3 {
            dense.view_mut((3 * r, 3 * s), (3, 3)).copy_from(b.block(r, s).mat());
        }
    }
    assert!(close(b.inflated().mat(), &dense, 0.0));
    assert!(close(b.inflated().weight().matrix(), &a_big, 0.0));
    let adj = blockmat::block_a_adjoint(&b).unwrap();
    let oracle = &pinv_big * dense.adjoint() * &a_big;
    assert!(max_abs(&(adj.inflated().mat() - &oracle)) <= 1e-10 * max_abs(&oracle).max(1.0));
    assert!(max_abs(&(tilde(b.inflated()).unwrap().into_matrix() - b.blockwise_tilde().unwrap())) < 1e-9);

    let w = weight(eye(2));
    let t = real_mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
    let s = CMat::from_fn(2, 2, |i, j| c(i as f64, j as f64));
    let b = block(&w, vec![vec![t.clone(), s.clone()], vec![zeros(2), zeros(2)]]);
    let adj = blockmat::block_a_adjoint(&b).unwrap();
    assert!(close(adj.block(0, 0).mat(), &t.adjoint(), 1e-15));
    assert!(close(adj.block(1, 0).mat(), &s.adjoint(), 1e-15));
    assert_eq!(max_abs(adj.block(0, 1).mat()), 0.0);
}

#[test]
fn block_inequalities() {
    let bc = BlockConfig::default();
    let w = weight(eye(2));
    let i = op(eye(2), &w);

    let r = blockmat::check_sandwich(&i, &i, &bc).unwrap();
    for q in ["lower", "omega", "upper"] {
        assert!((value(&r, q) - 1.0).abs() < 1e-12);
    }
    let r = blockmat::check_sandwich(&i, &i.scaled(c(-1.0, 0.0)).unwrap(), &bc).unwrap();
    assert!(value(&r, "lower").abs() < 1e-12 && (value(&r, "omega") - 1.0).abs() < 1e-12 && (value(&r, "upper") - 1.0).abs() < 1e-12);

    let rs = blockmat::check_parallel_equality_from_witness(&i, &i, &bc).unwrap();
    assert!(rs.iter().all(|r| r.pass));
    assert!(value(&rs[0], "beta").abs() < 1e-6);
    let g = op(CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, 0.5 * j as f64)), &w);
    for r in blockmat::check_parallel_equality_from_witness(&g, &g.scaled(c(0.0, -2.5)).unwrap(), &bc).unwrap() {
        assert!(r.min_slack.abs() <= 1e-8 * value(&r, "half-sum"), "{r:?}");
    }
    let not_parallel = blockmat::check_parallel_equality(&op(real_diag(&[1.0, 0.0]), &w), &op(real_diag(&[0.0, 1.0]), &w), 0.0, &bc);
    assert!(matches!(not_parallel, Err(Error::PreconditionNotParallel { .. })));

    let d1 = real_mat(2, 2, &[1.0, 2.0, 0.0, -1.0]);
    let d2 = CMat::from_fn(2, 2, |i, j| c(0.3 * i as f64, j as f64));
    let diag = block(&w, vec![vec![d1.clone(), zeros(2)], vec![zeros(2), d2.clone()]]);
    let r = blockmat::check_pinch(&diag, &bc).unwrap();
    let om = gauges::a_radius(diag.inflated(), &SweepConfig::default()).unwrap();
    let best = gauges::a_radius(&op(d1, &w), &SweepConfig::default()).unwrap().max(gauges::a_radius(&op(d2, &w), &SweepConfig::default()).unwrap());
    assert!((om - best).abs() < 1e-9 && r.pass);
    assert!(r.min_slack.abs() < 1e-9);
    let tri = blockmat::check_triangular(&diag, &bc).unwrap();
    assert!(tri.pass && tri.min_slack.abs() < 1e-9);

    let r = blockmat::check_crawford_bound(&block(&w, vec![vec![eye(2), zeros(2)], vec![zeros(2), eye(2)]]), &bc).unwrap();
    assert!(r.pass && r.min_slack.abs() < 1e-9);
    assert!((value(&r, "omega") - 1.0).abs() < 1e-12);
    let r = blockmat::check_crawford_bound(&block(&w, vec![vec![zeros(2), eye(2)], vec![eye(2), zeros(2)]]), &bc).unwrap();
    assert!(r.pass && (value(&r, "omega") - 1.0).abs() < 1e-12);

    let nil = block(&w, vec![vec![zeros(2), eye(2)], vec![zeros(2), zeros(2)]]);
    let r = blockmat::check_triangular(&nil, &bc).unwrap();
    assert!((value(&r, "omega") - 0.5).abs() < 1e-12 && r.min_slack.abs() < 1e-12);
    let lower = block(&w, vec![vec![zeros(2), zeros(2)], vec![eye(2), zeros(2)]]);
    assert!(matches!(blockmat::check_triangular(&lower, &bc), Err(Error::NotUpperTriangular { row: 1, col: 0 })));

    let swap = block(&w, vec![vec![zeros(2), eye(2)], vec![eye(2), zeros(2)]]);
    let r = blockmat::check_phase_invariance(&swap, None, &bc).unwrap();
    assert!((value(&r, "omega") - 1.0).abs() < 1e-12 && (value(&r, "omega-rotated") - 1.0).abs() < 1e-12);
}

#[test]
fn phase_invariance_on_singular_weight() {
    let bc = BlockConfig::default();
    let mut rng = genfuzz::trial_rng(4, "examples-phase", 0);
    let w = genfuzz::gen_weight_with(&mut rng, 3, 2, true).unwrap();
    let b = genfuzz::gen_block(&mut rng, &w, 2, false).unwrap();
    let v = genfuzz::haar_unitary(&mut rng, 4);
    let r = blockmat::check_phase_invariance(&b, Some(&v), &bc).unwrap();
    assert!(r.pass, "{r:?}");
    let w0 = value(&r, "omega");
    assert!((value(&r, "omega-rotated") - w0).abs() <= 1e-8 * w0);
    assert!((value(&r, "omega-unitary") - w0).abs() <= 1e-8 * w0);
    let three = genfuzz::gen_block(&mut rng, &w, 3, false).unwrap();
    assert!(matches!(blockmat::check_phase_invariance(&three, None, &bc), Err(Error::BlockCount { expected: 2, found: 3 })));
    assert!(matches!(blockmat::run_block_check("nope", &b, &bc), Err(Error::UnknownCheckName(_))));
}

#[test]
fn generators() {
    let a = |seed| {
        let mut rng = genfuzz::trial_rng(seed, "examples-weight", 0);
        genfuzz::gen_weight_with(&mut rng, 4, 2, false).unwrap().matrix().clone()
    };
    assert_eq!(a(42), a(42));
    assert_ne!(a(42), a(43));

    let mut rng = genfuzz::trial_rng(42, "examples-gen", 0);
    let full = genfuzz::gen_weight_with(&mut rng, 3, 3, false).unwrap();
    assert_eq!(full.rank(), 3);
    let one = genfuzz::gen_weight_with(&mut rng, 3, 1, false).unwrap();
    assert_eq!(one.rank(), 1);
    assert!(matches!(genfuzz::gen_weight_with(&mut rng, 3, 4, false), Err(Error::BadRank { .. })));

    let singular = genfuzz::gen_weight_with(&mut rng, 4, 2, false).unwrap();
    for _ in 0..1000 {
        let t = genfuzz::gen_adjointable(&mut rng, &singular).unwrap();
        assert!(t.is_a_adjointable());
        assert!(t.class_residuals()[1] <= 1e-10);
    }
    for w in [&full, &singular, &one] {
        let u = genfuzz::gen_a_unitary(&mut rng, w).unwrap();
        assert!(semiop::is_a_unitary(&u, 1e-9).unwrap());
        assert!(max_abs(&(u.mat().adjoint() * w.matrix() * u.mat() - w.matrix())) <= 1e-10 * w.scale());
    }
    let leak = genfuzz::gen_leak(&mut rng, &singular).unwrap().unwrap();
    assert!(!leak.is_a_bounded());
    assert!(genfuzz::gen_leak(&mut rng, &full).unwrap().is_none());

    let cfg = CertifyConfig::default();
    let (t, s) = genfuzz::gen_orthogonal_pair(&mut rng, &singular, certify::Relation::WaOrtho, &cfg).unwrap();
    assert!(certify::wa_orthogonal(&t, &s, &CertifyConfig { sweep: SweepConfig::default(), ..cfg }).unwrap().holds);
    let p = genfuzz::gen_parallel_pair(&mut rng, &singular).unwrap();
    assert!(certify::norm_parallel(&p.t, &p.s, &cfg).unwrap().holds);
}

#[test]
fn campaigns() {
    let ctx = TrialContext::new(GenConfig { trials: 0, ..GenConfig::default() });
    let r = genfuzz::run_named(&ctx, &genfuzz::check_names(), 2).unwrap();
    assert!(r.passed && r.failure_count() == 0);
    assert!(r.checks.iter().all(|c| c.trials == 0));

    let ctx = TrialContext::new(GenConfig { trials: 40, n: 6, rank: 0, ..GenConfig::default() });
    let r = genfuzz::run_named(&ctx, &["equivalence", "lift-adjoint", "rank-one", "inflation", "block-adjoint"], 1).unwrap();
    assert!(r.passed, "{}", r.to_json());

    let ctx = TrialContext::new(GenConfig { trials: 3, ..GenConfig::default() });
    let a = genfuzz::run_named(&ctx, &genfuzz::check_names(), 1).unwrap();
    let b = genfuzz::run_named(&ctx, &genfuzz::check_names(), 3).unwrap();
    assert!(a.passed);
    assert_eq!(a.canonical_json(), b.canonical_json());
    assert!(matches!(genfuzz::run_named(&ctx, &["nope"], 1), Err(Error::UnknownCheckName(_))));
}
