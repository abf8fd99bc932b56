//! Scalar gauges of an A-bounded operator, evaluated on its lift.
//!
//! The workhorse is the support function of the numerical range of the lift
//! `M`,
//!
//! ```text
//! h(t) = lambda_max( (e^{it} M + e^{-it} M*) / 2 ),
//! ```
//!
//! sampled on a uniform grid of angles and refined by golden sections around
//! every sampled local extremum. The numerical radius is `max h`; the Crawford
//! number is the distance from the origin to the (convex) numerical range,
//! `max(0, -min h)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::search;
use crate::semiop::{tilde, SemiOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Number of equally spaced angles in `[0, 2pi)`.
    pub grid: usize,
    /// Golden-section refinement stops below this bracket width.
    pub theta_tol: f64,
    pub max_refine_iter: usize,
    /// Upper bound on the number of sampled extrema that get refined.
    pub max_peaks: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { grid: 720, theta_tol: 1e-10, max_refine_iter: 100, max_peaks: 16 }
    }
}

impl SweepConfig {
    pub fn with_grid(grid: usize) -> SweepConfig {
        SweepConfig { grid: grid.max(3), ..SweepConfig::default() }
    }
}

/// `Re(e^{it} M)` split as `cos t * H + sin t * K`.
#[derive(Debug, Clone)]
pub struct SupportFunction {
    h: CMat,
    k: CMat,
    m: CMat,
}

impl SupportFunction {
    pub fn new(m: &CMat) -> SupportFunction {
        SupportFunction { h: linalg::hermitian_part(m), k: linalg::skew_part(m), m: m.clone() }
    }

    pub fn pencil(&self, theta: f64) -> CMat {
        let (s, c) = theta.sin_cos();
        &self.h * Complex64::new(c, 0.0) + &self.k * Complex64::new(s, 0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        if self.h.nrows() == 3 {
            let at = |i: usize, j: usize| self.h[(i, j)] * c + self.k[(i, j)] * s;
            let d = [at(0, 0).re, at(1, 1).re, at(2, 2).re];
            return linalg::lambda_max3_entries(d, [at(1, 0), at(2, 0), at(2, 1)]);
        }
        if self.h.nrows() == 2 {
            let (a, b, x) = ((self.h[(0, 0)] * c + self.k[(0, 0)] * s).re, (self.h[(1, 1)] * c + self.k[(1, 1)] * s).re, (self.h[(1, 0)] * c + self.k[(1, 0)] * s).norm());
            return 0.5 * (a + b) + (0.25 * (a - b) * (a - b) + x * x).sqrt();
        }
        linalg::lambda_max(&self.pencil(theta))
    }

    /// `v* M v` for a top eigenvector `v` of the pencil at `theta`: a boundary
    /// point of the numerical range with outer normal `e^{-it}`.
    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        let (_, vecs) = linalg::eigh_desc(&self.pencil(theta));
        let v = vecs.column(0).into_owned();
        linalg::quad_form(&self.m, &v)
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }
}

/// A refined extremum of the support function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub value: f64,
    pub theta: f64,
    /// Every refined extremum, best first.
    pub peaks: Vec<Peak>,
    pub refine_iterations: usize,
    /// Widest final bracket over the refined extrema.
    pub bracket: f64,
}

fn grid_thetas(k: usize) -> Vec<f64> {
    (0..k).map(|i| TAU * i as f64 / k as f64).collect()
}

fn refine(sf: &SupportFunction, samples: &[f64], cfg: &SweepConfig, maximize: bool) -> SweepOutcome {
    let k = samples.len();
    let step = TAU / k as f64;
    let signed: Vec<f64> = if maximize { samples.to_vec() } else { samples.iter().map(|v| -v).collect() };
    let mut iterations = 0;
    let mut bracket: f64 = 0.0;
    let mut peaks: Vec<Peak> = search::periodic_peaks(&signed)
        .into_iter()
        .take(cfg.max_peaks.max(1))
        .map(|i| {
            let center = step * i as f64;
            let f = |t: f64| if maximize { sf.eval(t) } else { -sf.eval(t) };
            let e = search::golden_max(f, center - step, center + step, cfg.theta_tol, cfg.max_refine_iter);
            iterations += e.iterations;
            bracket = bracket.max(e.width);
            // never worse than the sample that seeded the bracket
            let (theta, value) = if e.value >= signed[i] { (e.x.rem_euclid(TAU), e.value) } else { (center, signed[i]) };
            Peak { theta, value: if maximize { value } else { -value } }
        })
        .collect();
    if maximize {
        peaks.sort_by(|a, b| b.value.total_cmp(&a.value));
    } else {
        peaks.sort_by(|a, b| a.value.total_cmp(&b.value));
    }
    SweepOutcome { value: peaks[0].value, theta: peaks[0].theta, peaks, refine_iterations: iterations, bracket }
}

/// Classical numerical radius of a square matrix, `max_t h(t)`.
pub fn radius_sweep(m: &CMat, cfg: &SweepConfig) -> SweepOutcome {
    let sf = SupportFunction::new(m);
    let samples: Vec<f64> = grid_thetas(cfg.grid).into_iter().map(|t| sf.eval(t)).collect();
    refine(&sf, &samples, cfg, true)
}

pub fn numerical_radius_of(m: &CMat, cfg: &SweepConfig) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    radius_sweep(m, cfg).value
}

/// Distance from the origin to the numerical range of a square matrix.
pub fn crawford_of(m: &CMat, cfg: &SweepConfig) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sf = SupportFunction::new(m);
    let samples: Vec<f64> = grid_thetas(cfg.grid).into_iter().map(|t| sf.eval(t)).collect();
    (-refine(&sf, &samples, cfg, false).value).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub grid: usize,
    pub refine_iterations: usize,
    /// Widest final refinement bracket.
    pub bracket: f64,
    /// `||M|| * bracket^2 / 8`, the error bound after refinement.
    pub error_bound: f64,
    /// `||M|| * (2pi / grid)^2 / 8`, the bound from sampling alone.
    pub grid_error_bound: f64,
}

/// Sampled support function of `W_A(T)` with the derived gauges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeProfile {
    pub thetas: Vec<f64>,
    pub support: Vec<f64>,
    pub omega: f64,
    pub crawford: f64,
    /// Boundary points in sweep order, closed (last point repeats the first).
    #[serde(with = "crate::schema::cx_vec")]
    pub polygon: Vec<Complex64>,
    pub sweep_meta: SweepMeta,
}

impl RangeProfile {
    pub fn from_lift(m: &CMat, cfg: &SweepConfig) -> RangeProfile {
        let sf = SupportFunction::new(m);
        let thetas = grid_thetas(cfg.grid);
        let mut support = Vec::with_capacity(thetas.len());
        let mut polygon = Vec::with_capacity(thetas.len() + 1);
        for &t in &thetas {
            let (vals, vecs) = linalg::eigh_desc(&sf.pencil(t));
            support.push(vals[0]);
            polygon.push(linalg::quad_form(m, &vecs.column(0).into_owned()));
        }
        polygon.push(polygon[0]);
        let top = refine(&sf, &support, cfg, true);
        let bottom = refine(&sf, &support, cfg, false);
        let norm = linalg::spectral_norm(m);
        let bracket = top.bracket.max(bottom.bracket);
        let grid_step = TAU / cfg.grid as f64;
        RangeProfile {
            thetas,
            support,
            omega: top.value,
            crawford: (-bottom.value).max(0.0),
            polygon,
            sweep_meta: SweepMeta {
                grid: cfg.grid,
                refine_iterations: top.refine_iterations + bottom.refine_iterations,
                bracket,
                error_bound: norm * bracket * bracket / 8.0,
                grid_error_bound: norm * grid_step * grid_step / 8.0,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

/// `||T||_A`, the largest singular value of the lift.
pub fn a_opnorm(t: &SemiOperator) -> Result<f64> {
    Ok(linalg::spectral_norm(tilde(t)?.matrix()))
}

/// `omega_A(T)` together with the full sampled profile of `W_A(T)`.
pub fn a_numerical_radius(t: &SemiOperator, cfg: &SweepConfig) -> Result<(f64, RangeProfile)> {
    let lift = tilde(t)?;
    let profile = RangeProfile::from_lift(lift.matrix(), cfg);
    Ok((profile.omega, profile))
}

/// `omega_A(T)` without building a profile.
pub fn a_radius(t: &SemiOperator, cfg: &SweepConfig) -> Result<f64> {
    Ok(numerical_radius_of(tilde(t)?.matrix(), cfg))
}

/// `m_A(T)`, the distance from the origin to `W_A(T)`.
pub fn a_crawford(t: &SemiOperator, cfg: &SweepConfig) -> Result<f64> {
    Ok(crawford_of(tilde(t)?.matrix(), cfg))
}

/// `r_A(T)`: the spectral radius of the lift.
pub fn a_spectral_radius(t: &SemiOperator) -> Result<f64> {
    let lift = tilde(t)?;
    let ev = linalg::eigenvalues(lift.matrix()).ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    Ok(ev.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `|omega_A(T) - ||T||_A| <= tol * ||T||_A`.
pub fn is_a_normaloid(t: &SemiOperator, tol: f64, cfg: &SweepConfig) -> Result<bool> {
    let lift = tilde(t)?;
    let norm = linalg::spectral_norm(lift.matrix());
    let omega = numerical_radius_of(lift.matrix(), cfg);
    Ok((norm - omega).abs() <= tol * norm.max(f64::MIN_POSITIVE))
}

/// Sampled boundary of `W_A(T)` on a grid of `k` angles.
pub fn numerical_range_polygon(t: &SemiOperator, k: usize) -> Result<RangeProfile> {
    let lift = tilde(t)?;
    Ok(RangeProfile::from_lift(lift.matrix(), &SweepConfig::with_grid(k)))
}

/// A seminorm evaluated on lift matrices; the orthogonality and parallelism
/// certifiers are generic over it.
pub trait Gauge: Send + Sync {
    fn name(&self) -> &'static str;

    fn of_lift(&self, m: &CMat) -> f64;

    fn of(&self, t: &SemiOperator) -> Result<f64> {
        Ok(self.of_lift(tilde(t)?.matrix()))
    }
}

/// `||.||_A`.
#[derive(Debug, Clone, Copy, Default)]
pub struct OperatorSeminorm;

impl Gauge for OperatorSeminorm {
    fn name(&self) -> &'static str {
        "seminorm"
    }

    fn of_lift(&self, m: &CMat) -> f64 {
        linalg::spectral_norm(m)
    }
}

/// `omega_A(.)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NumericalRadius(pub SweepConfig);

impl Gauge for NumericalRadius {
    fn name(&self) -> &'static str {
        "numerical-radius"
    }

    fn of_lift(&self, m: &CMat) -> f64 {
        numerical_radius_of(m, &self.0)
    }
}
