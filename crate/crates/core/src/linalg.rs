//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Real matrix from row-major data, promoted to complex.
pub fn real_mat(rows: usize, cols: usize, data: &[f64]) -> CMat {
    assert_eq!(data.len(), rows * cols);
    CMat::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

pub fn real_diag(d: &[f64]) -> CMat {
    let n = d.len();
    CMat::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { Complex64::default() })
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn real_vec(d: &[f64]) -> CVec {
    CVec::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0)))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest singular value. Empty matrices have norm zero.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return frobenius(m);
    }
    let g = if m.nrows() >= m.ncols() { m.adjoint() * m } else { m * m.adjoint() };
    lambda_max(&g).max(0.0).sqrt()
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// `i (M - M*) / 2`, so that `Re(e^{it} M) = cos t * H + sin t * K` with `H` the Hermitian part.
pub fn skew_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * c(0.0, 0.5)
}

/// Largest eigenvalue of a Hermitian matrix (only the lower triangle is read).
pub fn lambda_max(h: &CMat) -> f64 {
    match h.nrows() {
        0 => f64::NEG_INFINITY,
        1 => h[(0, 0)].re,
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let b = h[(1, 0)].norm();
            0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt()
        }
        3 => lambda_max3(h),
        _ => h.clone().symmetric_eigenvalues().max(),
    }
}

/// Trigonometric solution of the characteristic cubic. Its error grows like
/// `eps * p^2 / gap` as the top two eigenvalues merge, so small gaps go to Jacobi.
fn lambda_max3(h: &CMat) -> f64 {
    lambda_max3_entries([h[(0, 0)].re, h[(1, 1)].re, h[(2, 2)].re], [h[(1, 0)], h[(2, 0)], h[(2, 1)]])
}

/// Largest eigenvalue of the 3x3 Hermitian matrix with diagonal `d` and
/// lower-triangle entries `[h10, h20, h21]`.
pub fn lambda_max3_entries(d: [f64; 3], lower: [Complex64; 3]) -> f64 {
    let [d0, d1, d2] = d;
    let [x, y, z] = lower;
    let off = x.norm_sqr() + y.norm_sqr() + z.norm_sqr();
    if off == 0.0 {
        return d0.max(d1).max(d2);
    }
    let q = (d0 + d1 + d2) / 3.0;
    let p = (((d0 - q).powi(2) + (d1 - q).powi(2) + (d2 - q).powi(2) + 2.0 * off) / 6.0).sqrt();
    let (e0, e1, e2) = ((d0 - q) / p, (d1 - q) / p, (d2 - q) / p);
    let (x, y, z) = (x / p, y / p, z / p);
    let det = e0 * e1 * e2 - e0 * z.norm_sqr() - e1 * y.norm_sqr() - e2 * x.norm_sqr() + 2.0 * (x * z * y.conj()).re;
    let phi = (0.5 * det).clamp(-1.0, 1.0).acos() / 3.0;
    let top = q + 2.0 * p * phi.cos();
    let bottom = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let middle = 3.0 * q - top - bottom;
    if top - middle < 1e-3 * p {
        let mut h = CMat::from_diagonal(&CVec::from_vec(vec![c(d0, 0.0), c(d1, 0.0), c(d2, 0.0)]));
        h[(1, 0)] = lower[0];
        h[(2, 0)] = lower[1];
        h[(2, 1)] = lower[2];
        return jacobi_lambda_max::<3>(&h);
    }
    top
}

/// Cyclic complex Jacobi on a stack copy; accurate even when the top
/// eigenvalue is (nearly) repeated.
fn jacobi_lambda_max<const N: usize>(h: &CMat) -> f64 {
    let mut a = [[Complex64::new(0.0, 0.0); N]; N];
    let mut scale = 0.0;
    for i in 0..N {
        for j in 0..N {
            // lower triangle is authoritative
            a[i][j] = if i >= j { h[(i, j)] } else { h[(j, i)].conj() };
            scale += a[i][j].norm_sqr();
        }
        a[i][i].im = 0.0;
    }
    let floor = scale * f64::EPSILON * f64::EPSILON;
    for _sweep in 0..32 {
        let mut off = 0.0;
        for p in 0..N {
            for q in p + 1..N {
                off += a[p][q].norm_sqr();
            }
        }
        if off <= floor {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let z = a[p][q];
                let r = z.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = z / r;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // columns p, q of the rotation J
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                // A <- A J
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * jpp + y * jqp;
                    row[q] = x * jpq + y * jqq;
                }
                // A <- J* A
                for k in 0..N {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = jpp.conj() * x + jqp.conj() * y;
                    a[q][k] = jpq.conj() * x + jqq.conj() * y;
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    (0..N).map(|i| a[i][i].re).fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min(h: &CMat) -> f64 {
    match h.nrows() {
        0 => f64::INFINITY,
        1 => h[(0, 0)].re,
        _ => h.clone().symmetric_eigenvalues().min(),
    }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending order.
pub fn eigh_desc(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

/// Top eigenvalue of a Hermitian matrix together with an orthonormal basis of
/// every eigenvector whose eigenvalue lies within `tol` of it.
pub fn top_eigenspace(h: &CMat, tol: f64) -> (f64, CMat) {
    let (vals, vecs) = eigh_desc(h);
    let top = vals[0];
    let k = vals.iter().take_while(|&&v| v >= top - tol).count().max(1);
    (top, vecs.columns(0, k).into_owned())
}

/// `(sigma_max, u, v)` with `M v = sigma u`, from the top eigenvector of `M* M`.
///
/// nalgebra's complex SVD is unreliable once singular vectors are requested,
/// so the pair goes through the Hermitian eigensolver instead.
pub fn top_singular_pair(m: &CMat) -> (f64, CVec, CVec) {
    let (_, vecs) = eigh_desc(&(m.adjoint() * m));
    let v = vecs.column(0).into_owned();
    let mv = m * &v;
    let sigma = mv.norm();
    let u = if sigma > 0.0 {
        mv / Complex64::new(sigma, 0.0)
    } else {
        let mut e = CVec::zeros(m.nrows());
        e[0] = Complex64::new(1.0, 0.0);
        e
    };
    (sigma, u, v)
}

/// Eigenvalues of a general square complex matrix.
pub fn eigenvalues(m: &CMat) -> Option<Vec<Complex64>> {
    match m.nrows() {
        0 => Some(Vec::new()),
        1 => Some(vec![m[(0, 0)]]),
        _ => m.clone().schur().eigenvalues().map(|v| v.iter().copied().collect()),
    }
}

pub fn quad_form(m: &CMat, u: &CVec) -> Complex64 {
    u.dotc(&(m * u))
}

/// Square block-diagonal matrix with `d` copies of `m`.
pub fn block_diag_repeat(m: &CMat, d: usize) -> CMat {
    let n = m.nrows();
    let mut out = CMat::zeros(n * d, n * d);
    for b in 0..d {
        out.view_mut((b * n, b * n), (n, n)).copy_from(m);
    }
    out
}
