//! Operators bound to a weight: membership tests, the A-adjoint and the lift.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::weightspace::Weight;

/// Default relative tolerance for the membership residuals.
pub const DEFAULT_CLASS_TOL: f64 = 1e-8;

/// A square matrix `T` together with the weight it is measured against.
///
/// Both membership flags are decided once, at construction, from scaled
/// residuals:
///
/// * A-bounded: `||A^{1/2} T (I - P_A)|| <= class_tol * ||A^{1/2}|| ||T||`,
///   i.e. `T` maps `N(A)` into `N(A)`;
/// * A-adjointable: `||(I - P_A) T* A|| <= class_tol * ||A|| ||T||`,
///   i.e. `R(T* A) ⊆ R(A)`.
///
/// In finite dimensions the two classes coincide.
#[derive(Debug, Clone)]
pub struct SemiOperator {
    mat: CMat,
    weight: Arc<Weight>,
    class_tol: f64,
    bounded_residual: f64,
    adjointable_residual: f64,
    is_a_bounded: bool,
    is_a_adjointable: bool,
}

/// Binds `t` to `w`, classifying it with relative tolerance `class_tol`.
pub fn wrap(t: CMat, w: &Arc<Weight>, class_tol: f64) -> Result<SemiOperator> {
    SemiOperator::new(t, w, class_tol)
}

impl SemiOperator {
    pub fn new(t: CMat, w: &Arc<Weight>, class_tol: f64) -> Result<SemiOperator> {
        let n = w.dim();
        if t.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.nrows() });
        }
        if t.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.ncols() });
        }
        let complement = linalg::eye(n) - w.projector();
        let t_norm = linalg::spectral_norm(&t);
        let lam = w.scale();
        let r1 = linalg::spectral_norm(&(w.sqrt() * &t * &complement));
        let r2 = linalg::spectral_norm(&(&complement * t.adjoint() * w.matrix()));
        let s1 = lam.sqrt() * t_norm;
        let s2 = lam * t_norm;
        let bounded_residual = if s1 > 0.0 { r1 / s1 } else { 0.0 };
        let adjointable_residual = if s2 > 0.0 { r2 / s2 } else { 0.0 };
        Ok(SemiOperator {
            mat: t,
            weight: w.clone(),
            class_tol,
            bounded_residual,
            adjointable_residual,
            is_a_bounded: bounded_residual <= class_tol,
            is_a_adjointable: adjointable_residual <= class_tol,
        })
    }

    /// Re-binds a matrix to the same weight and tolerance as `self`.
    pub fn sibling(&self, t: CMat) -> Result<SemiOperator> {
        SemiOperator::new(t, &self.weight, self.class_tol)
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn weight(&self) -> &Arc<Weight> {
        &self.weight
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn class_tol(&self) -> f64 {
        self.class_tol
    }

    pub fn is_a_bounded(&self) -> bool {
        self.is_a_bounded
    }

    pub fn is_a_adjointable(&self) -> bool {
        self.is_a_adjointable
    }

    /// `(||A^{1/2} T (I-P_A)||, ||(I-P_A) T* A||)`, each relative to its scale.
    pub fn class_residuals(&self) -> [f64; 2] {
        [self.bounded_residual, self.adjointable_residual]
    }

    pub fn require_bounded(&self) -> Result<()> {
        if self.is_a_bounded {
            Ok(())
        } else {
            Err(Error::NotABounded { residual: self.bounded_residual })
        }
    }

    pub fn require_adjointable(&self) -> Result<()> {
        if self.is_a_adjointable {
            Ok(())
        } else {
            Err(Error::NotAAdjointable { residual: self.adjointable_residual })
        }
    }

    pub fn same_context(&self, other: &SemiOperator) -> Result<()> {
        if self.weight.same_as(&other.weight) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn scaled(&self, z: Complex64) -> Result<SemiOperator> {
        self.sibling(&self.mat * z)
    }

    /// `self + z * other`.
    pub fn add_scaled(&self, other: &SemiOperator, z: Complex64) -> Result<SemiOperator> {
        self.same_context(other)?;
        self.sibling(&self.mat + &other.mat * z)
    }

    pub fn compose(&self, other: &SemiOperator) -> Result<SemiOperator> {
        self.same_context(other)?;
        self.sibling(&self.mat * &other.mat)
    }

    /// Matrix of the lift without the boundedness check.
    pub(crate) fn lift_unchecked(&self) -> CMat {
        self.weight.lift_matrix(&self.mat)
    }
}

/// The lift of an A-bounded operator: the `r x r` matrix `M` with `Z_A T = M Z_A`.
#[derive(Debug, Clone)]
pub struct TildeLift {
    m: CMat,
    weight: Arc<Weight>,
}

impl TildeLift {
    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn weight(&self) -> &Arc<Weight> {
        &self.weight
    }

    pub fn rank(&self) -> usize {
        self.m.nrows()
    }
}

/// `T^{#A} = A^+ T* A`.
pub fn a_adjoint(t: &SemiOperator) -> Result<SemiOperator> {
    t.require_adjointable()?;
    let w = t.weight();
    t.sibling(w.pinv() * t.mat().adjoint() * w.matrix())
}

pub fn tilde(t: &SemiOperator) -> Result<TildeLift> {
    t.require_bounded()?;
    if t.weight().rank() == 0 {
        return Err(Error::ZeroRank);
    }
    Ok(TildeLift { m: t.lift_unchecked(), weight: t.weight().clone() })
}

fn scale_of(t: &SemiOperator) -> f64 {
    (t.weight().scale() * linalg::spectral_norm(t.mat())).max(f64::MIN_POSITIVE)
}

/// `AT = T* A` within `tol` relative to `||A|| ||T||`.
pub fn is_a_selfadjoint(t: &SemiOperator, tol: f64) -> bool {
    let a = t.weight().matrix();
    let at = a * t.mat();
    let diff = &at - t.mat().adjoint() * a;
    linalg::spectral_norm(&diff) <= tol * scale_of(t)
}

/// A-selfadjoint and `AT >= 0` up to `tol` relative to `||A|| ||T||`.
pub fn is_a_positive(t: &SemiOperator, tol: f64) -> bool {
    if !is_a_selfadjoint(t, tol) {
        return false;
    }
    let at = t.weight().matrix() * t.mat();
    linalg::lambda_min(&linalg::hermitian_part(&at)) >= -tol * scale_of(t)
}

/// `U^{#}U = P_A` and `(U^{#})^{#} U^{#} = P_A`.
pub fn is_a_unitary(u: &SemiOperator, tol: f64) -> Result<bool> {
    let us = a_adjoint(u)?;
    let uss = a_adjoint(&us)?;
    let p = u.weight().projector();
    let scale = (linalg::spectral_norm(u.mat()) * linalg::spectral_norm(us.mat())).max(1.0);
    let e1 = linalg::spectral_norm(&(us.mat() * u.mat() - p));
    let e2 = linalg::spectral_norm(&(uss.mat() * us.mat() - p));
    Ok(e1 <= tol * scale && e2 <= tol * scale)
}

/// `Q_r Lambda_r^{-1/2} V Lambda_r^{1/2} Q_r*` for a unitary `r x r` matrix `V`.
///
/// Its lift is `V`, so the result is A-unitary.
pub fn a_unitary_from(w: &Arc<Weight>, v: &CMat) -> Result<SemiOperator> {
    if w.rank() == 0 {
        return Err(Error::ZeroRank);
    }
    if v.nrows() != w.rank() || v.ncols() != w.rank() {
        return Err(Error::DimensionMismatch { expected: w.rank(), found: v.nrows() });
    }
    SemiOperator::new(w.unlift_matrix(v), w, DEFAULT_CLASS_TOL)
}
