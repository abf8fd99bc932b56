//! A-rank-one operators `x (x)_A y : z -> <z|y>_A x`.

use crate::error::Result;
use crate::linalg::CMat;
use crate::semiop::{SemiOperator, DEFAULT_CLASS_TOL};
use crate::weightspace::{a_inner, a_norm, AVector};

/// `x (x)_A y`, realized by the matrix `x y* A`.
#[derive(Debug, Clone)]
pub struct ARankOne {
    x: AVector,
    y: AVector,
    mat: CMat,
}

pub fn make_rank_one(x: &AVector, y: &AVector) -> Result<ARankOne> {
    // context check
    a_inner(x, y)?;
    let ay = x.weight().matrix() * y.entries();
    let mat = x.entries() * ay.adjoint();
    Ok(ARankOne { x: x.clone(), y: y.clone(), mat })
}

impl ARankOne {
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn x(&self) -> &AVector {
        &self.x
    }

    pub fn y(&self) -> &AVector {
        &self.y
    }

    /// Always A-bounded and A-adjointable.
    pub fn to_operator(&self) -> Result<SemiOperator> {
        SemiOperator::new(self.mat.clone(), self.x.weight(), DEFAULT_CLASS_TOL)
    }
}

/// `||x (x)_A y||_A = ||x||_A ||y||_A`.
pub fn rank_one_norm(op: &ARankOne) -> f64 {
    a_norm(&op.x) * a_norm(&op.y)
}

/// `omega_A(x (x)_A y) = (|<x|y>_A| + ||x||_A ||y||_A) / 2`.
pub fn rank_one_radius(op: &ARankOne) -> f64 {
    let inner = a_inner(&op.x, &op.y).expect("operands share a weight by construction");
    0.5 * (inner.norm() + rank_one_norm(op))
}

/// `(x (x)_A y)^{#A} = (P_A y) (x)_A x`, as a matrix.
pub fn rank_one_adjoint(op: &ARankOne) -> CMat {
    let w = op.x.weight();
    let py = w.projector() * op.y.entries();
    let ax = w.matrix() * op.x.entries();
    py * ax.adjoint()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::gauges::{a_opnorm, a_radius, SweepConfig};
    use crate::linalg::{c, eye, max_abs, real_diag, real_mat, real_vec, CVec};
    use crate::semiop::{a_adjoint, tilde};
    use crate::weightspace::{build_weight, Weight};

    fn w(m: CMat) -> Arc<Weight> {
        build_weight(&m, 100.0).unwrap()
    }

    fn v(weight: &Arc<Weight>, d: &[f64]) -> AVector {
        AVector::new(real_vec(d), weight).unwrap()
    }

    #[test]
    fn construction_examples() {
        let i2 = w(eye(2));
        let r = make_rank_one(&v(&i2, &[1.0, 0.0]), &v(&i2, &[0.0, 1.0])).unwrap();
        assert!(max_abs(&(r.matrix() - real_mat(2, 2, &[0.0, 1.0, 0.0, 0.0]))) < 1e-15);

        let p = w(real_diag(&[1.0, 0.0]));
        let r = make_rank_one(&v(&p, &[0.0, 1.0]), &v(&p, &[1.0, 0.0])).unwrap();
        assert!(max_abs(&(r.matrix() - real_mat(2, 2, &[0.0, 0.0, 1.0, 0.0]))) < 1e-15);

        let r = make_rank_one(&v(&p, &[1.0, 2.0]), &v(&p, &[0.0, 5.0])).unwrap();
        assert!(max_abs(r.matrix()) < 1e-15);
    }

    #[test]
    fn action_is_inner_product_times_x() {
        let a = w(real_mat(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0]));
        let x = AVector::new(CVec::from_vec(vec![c(1.0, 1.0), c(0.0, -2.0), c(3.0, 0.0)]), &a).unwrap();
        let y = AVector::new(CVec::from_vec(vec![c(0.5, 0.0), c(1.0, 1.0), c(-1.0, 2.0)]), &a).unwrap();
        let z = AVector::new(CVec::from_vec(vec![c(-1.0, 0.3), c(2.0, 0.0), c(0.0, 1.0)]), &a).unwrap();
        let r = make_rank_one(&x, &y).unwrap();
        let expected = x.entries() * a_inner(&z, &y).unwrap();
        assert!((r.matrix() * z.entries() - expected).norm() < 1e-12);
        let t = r.to_operator().unwrap();
        assert!(t.is_a_bounded() && t.is_a_adjointable());
    }

    #[test]
    fn closed_forms() {
        let i2 = w(eye(2));
        let r = make_rank_one(&v(&i2, &[1.0, 0.0]), &v(&i2, &[0.0, 1.0])).unwrap();
        assert!((rank_one_norm(&r) - 1.0).abs() < 1e-15);
        assert!((rank_one_radius(&r) - 0.5).abs() < 1e-15);

        let d = w(real_diag(&[4.0, 1.0]));
        let r = make_rank_one(&v(&d, &[1.0, 0.0]), &v(&d, &[0.0, 1.0])).unwrap();
        assert!((rank_one_norm(&r) - 2.0).abs() < 1e-15);
        assert!((a_opnorm(&r.to_operator().unwrap()).unwrap() - 2.0).abs() < 1e-12);

        let p = w(real_diag(&[1.0, 0.0]));
        let r = make_rank_one(&v(&p, &[1.0, 0.0]), &v(&p, &[1.0, 1.0])).unwrap();
        assert!((rank_one_radius(&r) - 1.0).abs() < 1e-15);
        let swept = a_radius(&r.to_operator().unwrap(), &SweepConfig::default()).unwrap();
        assert!((swept - 1.0).abs() < 1e-12);

        let null = make_rank_one(&v(&p, &[1.0, 0.0]), &v(&p, &[0.0, 1.0])).unwrap();
        assert_eq!(rank_one_norm(&null), 0.0);

        let unit = v(&d, &[0.5, 0.0]);
        let r = make_rank_one(&unit, &unit).unwrap();
        assert!((rank_one_radius(&r) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adjoint_matches_general_formula() {
        let a = w(real_mat(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 3.0]));
        let x = AVector::new(CVec::from_vec(vec![c(1.0, -1.0), c(0.5, 0.0), c(0.0, 2.0)]), &a).unwrap();
        let y = AVector::new(CVec::from_vec(vec![c(0.0, 1.0), c(-2.0, 0.0), c(1.0, 1.0)]), &a).unwrap();
        let r = make_rank_one(&x, &y).unwrap();
        let general = a_adjoint(&r.to_operator().unwrap()).unwrap();
        assert!(max_abs(&(rank_one_adjoint(&r) - general.mat())) < 1e-10);

        let i2 = w(eye(2));
        let (x, y) = (v(&i2, &[1.0, 2.0]), v(&i2, &[3.0, -1.0]));
        let r = make_rank_one(&x, &y).unwrap();
        assert!(max_abs(&(rank_one_adjoint(&r) - y.entries() * x.entries().adjoint())) < 1e-14);
    }

    #[test]
    fn lift_is_classical_rank_one() {
        let a = w(real_mat(3, 3, &[2.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.5]));
        let x = AVector::new(CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)]), &a).unwrap();
        let y = AVector::new(CVec::from_vec(vec![c(0.0, -1.0), c(1.0, 0.0), c(1.0, 1.0)]), &a).unwrap();
        let r = make_rank_one(&x, &y).unwrap();
        let lift = tilde(&r.to_operator().unwrap()).unwrap().into_matrix();
        let expected = a.to_range_coords(x.entries()) * a.to_range_coords(y.entries()).adjoint();
        assert!(max_abs(&(lift - expected)) < 1e-10);
    }
}
