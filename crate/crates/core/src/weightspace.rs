//! The positive semi-definite weight `A` and the geometry it induces.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};

/// Default multiplier in `rank_tol = factor * n * eps * lambda_max`.
pub const DEFAULT_RANK_TOL_FACTOR: f64 = 100.0;

/// Relative tolerance for the Hermitian and PSD input checks.
pub const INPUT_TOL: f64 = 1e-10;

/// A PSD Hermitian weight with its spectral data decomposed once.
///
/// Eigenpairs are stored retained-first: columns `0..rank` of `eigvecs` span
/// `R(A)`, the rest span `N(A)`. For a weight built from a matrix the
/// eigenvalues are in descending order; an inflated weight keeps the retained
/// eigenpairs grouped block by block.
#[derive(Debug, Clone)]
pub struct Weight {
    n: usize,
    a: CMat,
    eigvecs: CMat,
    eigvals: Vec<f64>,
    rank: usize,
    rank_tol: f64,
    a_half: CMat,
    a_pinv: CMat,
    proj: CMat,
}

/// Builds a weight from a Hermitian PSD matrix.
pub fn build_weight(m: &CMat, rank_tol_factor: f64) -> Result<Arc<Weight>> {
    Weight::build(m, rank_tol_factor, None).map(Arc::new)
}

impl Weight {
    /// `rank_tol` overrides the default threshold `factor * n * eps * lambda_max` when given.
    pub fn build(m: &CMat, rank_tol_factor: f64, rank_tol: Option<f64>) -> Result<Weight> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n.max(1), found: m.ncols() });
        }
        let norm = linalg::frobenius(m);
        if norm == 0.0 {
            return Err(Error::ZeroWeight);
        }
        let residual = linalg::frobenius(&(m - m.adjoint())) / norm;
        if residual > INPUT_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let (mut vals, vecs) = linalg::eigh_desc(m);
        let spectral = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let min = vals[n - 1];
        if min < -INPUT_TOL * spectral {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        for v in vals.iter_mut() {
            *v = v.max(0.0);
        }
        let lambda_max = vals[0];
        let rank_tol = rank_tol.unwrap_or(rank_tol_factor * n as f64 * f64::EPSILON * lambda_max);
        let rank = vals.iter().filter(|&&v| v > rank_tol).count();
        if rank == 0 {
            return Err(Error::ZeroWeight);
        }
        Ok(Self::from_spectrum(m.clone(), vecs, vals, rank, rank_tol))
    }

    fn from_spectrum(a: CMat, eigvecs: CMat, eigvals: Vec<f64>, rank: usize, rank_tol: f64) -> Weight {
        let n = a.nrows();
        let q_r = eigvecs.columns(0, rank);
        let scaled = |f: &dyn Fn(f64) -> f64| {
            let mut qs = q_r.into_owned();
            for (k, mut col) in qs.column_iter_mut().enumerate() {
                col *= Complex64::new(f(eigvals[k]), 0.0);
            }
            &qs * q_r.adjoint()
        };
        let a_half = scaled(&|l| l.sqrt());
        let a_pinv = scaled(&|l| 1.0 / l);
        let proj = scaled(&|_| 1.0);
        debug_assert_eq!(a_half.nrows(), n);
        Weight { n, a, eigvecs, eigvals, rank, rank_tol, a_half, a_pinv, proj }
    }

    /// `diag(A, ..., A)` with `d` blocks, assembled from this weight's spectral data.
    pub fn inflate(&self, d: usize) -> Arc<Weight> {
        let (n, r) = (self.n, self.rank);
        let big = n * d;
        let mut eigvecs = CMat::zeros(big, big);
        let mut eigvals = vec![0.0; big];
        for b in 0..d {
            for k in 0..n {
                // Retained columns of every block first, then the kernel columns.
                let col = if k < r { b * r + k } else { d * r + b * (n - r) + (k - r) };
                eigvecs.view_mut((b * n, col), (n, 1)).copy_from(&self.eigvecs.column(k));
                eigvals[col] = self.eigvals[k];
            }
        }
        Arc::new(Weight {
            n: big,
            a: linalg::block_diag_repeat(&self.a, d),
            eigvecs,
            eigvals,
            rank: r * d,
            rank_tol: self.rank_tol,
            a_half: linalg::block_diag_repeat(&self.a_half, d),
            a_pinv: linalg::block_diag_repeat(&self.a_pinv, d),
            proj: linalg::block_diag_repeat(&self.proj, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn eigvals(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn eigvecs(&self) -> &CMat {
        &self.eigvecs
    }

    /// `A^{1/2}`.
    pub fn sqrt(&self) -> &CMat {
        &self.a_half
    }

    /// Moore-Penrose inverse `A^+`.
    pub fn pinv(&self) -> &CMat {
        &self.a_pinv
    }

    /// Orthogonal projector `P_A` onto `R(A)`.
    pub fn projector(&self) -> &CMat {
        &self.proj
    }

    /// Largest eigenvalue, the natural magnitude for tolerances.
    pub fn scale(&self) -> f64 {
        self.eigvals.iter().fold(0.0, |a: f64, &b| a.max(b))
    }

    /// Orthonormal basis `Q_r` of `R(A)`.
    pub fn range_basis(&self) -> CMat {
        self.eigvecs.columns(0, self.rank).into_owned()
    }

    fn range_sqrt(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigvals[..self.rank].iter().map(|l| l.sqrt())
    }

    /// `Lambda_r^{1/2} Q_r* x`: coordinates of `A^{1/2} x` in the range basis.
    /// The Euclidean norm of the result is `||x||_A`.
    pub fn to_range_coords(&self, x: &CVec) -> CVec {
        let mut u = self.range_basis().adjoint() * x;
        for (ui, s) in u.iter_mut().zip(self.range_sqrt()) {
            *ui *= s;
        }
        u
    }

    /// `Q_r Lambda_r^{-1/2} u`, the preimage of range coordinates lying in `R(A)`.
    pub fn from_range_coords(&self, u: &CVec) -> CVec {
        let mut v = u.clone();
        for (vi, s) in v.iter_mut().zip(self.range_sqrt()) {
            *vi /= s;
        }
        self.range_basis() * v
    }

    /// `Lambda_r^{1/2} Q_r* T Q_r Lambda_r^{-1/2}`, the matrix of the lifted operator.
    pub fn lift_matrix(&self, t: &CMat) -> CMat {
        let q = self.range_basis();
        let mut m = q.adjoint() * t * &q;
        let s: Vec<f64> = self.range_sqrt().collect();
        for i in 0..self.rank {
            for j in 0..self.rank {
                m[(i, j)] *= s[i] / s[j];
            }
        }
        m
    }

    /// Inverse of [`Weight::lift_matrix`] on range-supported operators: `Q_r L^{-1/2} M L^{1/2} Q_r*`.
    pub fn unlift_matrix(&self, m: &CMat) -> CMat {
        let q = self.range_basis();
        let s: Vec<f64> = self.range_sqrt().collect();
        let mut inner = m.clone();
        for i in 0..self.rank {
            for j in 0..self.rank {
                inner[(i, j)] *= s[j] / s[i];
            }
        }
        &q * inner * q.adjoint()
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || (self.n == other.n && self.a == other.a)
    }
}

/// A vector tagged with the weight that measures it.
#[derive(Debug, Clone)]
pub struct AVector {
    entries: CVec,
    weight: Arc<Weight>,
}

impl AVector {
    pub fn new(entries: CVec, weight: &Arc<Weight>) -> Result<AVector> {
        if entries.len() != weight.dim() {
            return Err(Error::DimensionMismatch { expected: weight.dim(), found: entries.len() });
        }
        Ok(AVector { entries, weight: weight.clone() })
    }

    pub fn entries(&self) -> &CVec {
        &self.entries
    }

    pub fn weight(&self) -> &Arc<Weight> {
        &self.weight
    }

    fn check_context(&self, other: &AVector) -> Result<()> {
        if self.weight.same_as(&other.weight) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }
}

/// `<x|y>_A = y* A x`, linear in `x` and conjugate-linear in `y`.
pub fn a_inner(x: &AVector, y: &AVector) -> Result<Complex64> {
    x.check_context(y)?;
    Ok(y.entries.dotc(&(x.weight.matrix() * &x.entries)))
}

pub fn a_norm(x: &AVector) -> f64 {
    let q = x.entries.dotc(&(x.weight.matrix() * &x.entries)).re;
    q.max(0.0).sqrt()
}

/// Scales `x` to unit A-seminorm.
pub fn a_normalize(x: &AVector) -> Result<AVector> {
    let norm = a_norm(x);
    let floor = 1e-12 * x.weight.scale().sqrt() * x.entries.norm();
    if norm <= floor || norm == 0.0 {
        return Err(Error::ANullVector);
    }
    Ok(AVector { entries: x.entries.unscale(norm), weight: x.weight.clone() })
}
