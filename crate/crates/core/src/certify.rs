//! Orthogonality and parallelism decisions with signed margins.
//!
//! Every certifier works on the lifts `M_T`, `M_S` and a [`Gauge`] (the
//! A-seminorm or the A-numerical radius):
//!
//! * orthogonality: `g* = min_gamma g(M_T + gamma M_S)`, margin `g* - g(T)`;
//! * parallelism: `p* = max_phi g(M_T + e^{i phi} M_S)`, margin `p* - g(T) - g(S)`.
//!
//! A relation holds when its margin is at least `-decision_tol`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::{self, Gauge, NumericalRadius, OperatorSeminorm, SweepConfig};
use crate::linalg::{self, cis, CMat, CVec};
use crate::search::{self, ConvexPlaneMinimizer};
use crate::semiop::{tilde, SemiOperator};
use crate::weightspace::{a_inner, a_norm, AVector, Weight};

pub const DEFAULT_DECISION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    BjOrtho,
    WaOrtho,
    NormParallel,
    WaParallel,
    VecParallel,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::BjOrtho => "BJ_ORTHO",
            Relation::WaOrtho => "WA_ORTHO",
            Relation::NormParallel => "NORM_PARALLEL",
            Relation::WaParallel => "WA_PARALLEL",
            Relation::VecParallel => "VEC_PARALLEL",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Optimal `gamma` (orthogonality) or unimodular `lambda` (parallelism).
    #[serde(default, with = "crate::schema::cx_opt", skip_serializing_if = "Option::is_none")]
    pub scalar: Option<Complex64>,
    /// An A-unit vector attaining the extremal value.
    #[serde(default, with = "crate::schema::cx_vec_opt", skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub decision_tol_rel: f64,
    /// Gauge magnitude the relative tolerance multiplies.
    pub scale: f64,
    pub decision_tol: f64,
    /// Rounding level of the lifts; gauges at or below it count as zero.
    #[serde(default)]
    pub noise_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Method {
    pub gauge: String,
    pub search: String,
    pub sweep_grid: usize,
    pub grid: Vec<usize>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub relation: Relation,
    pub holds: bool,
    pub margin: f64,
    /// The extremal value `g*` or `p*`.
    pub value: f64,
    /// What the extremal value is compared against.
    pub reference: f64,
    pub witness: Witness,
    pub tolerances: Tolerances,
    pub method: Method,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    pub decision_tol_rel: f64,
    /// Sweep used for every numerical radius inside a search.
    pub sweep: SweepConfig,
    pub plane: ConvexPlaneMinimizer,
    pub phi_grid: usize,
    pub phi_refine: usize,
    pub phi_tol: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            decision_tol_rel: DEFAULT_DECISION_TOL,
            sweep: SweepConfig::with_grid(128),
            plane: ConvexPlaneMinimizer::default(),
            phi_grid: 720,
            phi_refine: 5,
            phi_tol: 1e-10,
        }
    }
}

impl CertifyConfig {
    pub fn with_tol(decision_tol_rel: f64) -> CertifyConfig {
        CertifyConfig { decision_tol_rel, ..CertifyConfig::default() }
    }
}

fn lifts(t: &SemiOperator, s: &SemiOperator) -> Result<(CMat, CMat)> {
    t.same_context(s)?;
    Ok((tilde(t)?.into_matrix(), tilde(s)?.into_matrix()))
}

fn tolerances(rel: f64, scale: f64) -> Tolerances {
    Tolerances { decision_tol_rel: rel, scale, decision_tol: rel * scale, noise_floor: 0.0 }
}

/// Rounding error of a computed lift: `||A^{1/2}|| ||T|| ||A^{+1/2}||` times `n eps`.
pub fn lift_noise(t: &SemiOperator) -> f64 {
    let w = t.weight();
    let vals = w.eigvals();
    let cond = (vals[0] / vals[w.rank() - 1]).sqrt();
    100.0 * w.dim() as f64 * f64::EPSILON * cond * linalg::spectral_norm(t.mat())
}

/// `min_gamma g(T + gamma S)` against `g(T)`.
pub fn orthogonality(relation: Relation, gauge: &dyn Gauge, t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    let (mt, ms) = lifts(t, s)?;
    let gt = gauge.of_lift(&mt);
    let gs = gauge.of_lift(&ms);
    let mut tol = tolerances(cfg.decision_tol_rel, gt);
    tol.noise_floor = lift_noise(t).max(lift_noise(s));
    tol.decision_tol = tol.decision_tol.max(tol.noise_floor);
    let mut method = Method {
        gauge: gauge.name().to_string(),
        search: "polar-grid+lipschitz-box+nested-golden".into(),
        sweep_grid: cfg.sweep.grid,
        grid: vec![cfg.plane.angles, cfg.plane.radii],
        evaluations: 2,
    };
    if gs <= tol.noise_floor || gt <= tol.noise_floor {
        // A-null S leaves the gauge at g(T); A-null T is already at the floor
        return Ok(Verdict {
            relation,
            holds: true,
            margin: 0.0,
            value: gt,
            reference: gt,
            witness: Witness { scalar: Some(Complex64::new(0.0, 0.0)), vector: None },
            tolerances: tol,
            method,
        });
    }
    let radius = 2.0 * gt / gs + 1.0;
    let best = cfg.plane.minimize(|x, y| gauge.of_lift(&(&mt + &ms * Complex64::new(x, y))), radius, gs);
    method.evaluations += best.evaluations;
    let margin = best.value - gt;
    Ok(Verdict {
        relation,
        holds: margin >= -tol.decision_tol,
        margin,
        value: best.value,
        reference: gt,
        witness: Witness { scalar: Some(Complex64::new(best.re, best.im)), vector: None },
        tolerances: tol,
        method,
    })
}

/// Maximum of a `2pi`-periodic function: uniform grid, then golden refinement
/// at the best `refine` sampled local maxima. Returns `(phi, value, evaluations)`.
pub fn maximize_phase<F: FnMut(f64) -> f64>(mut f: F, grid: usize, refine: usize, tol: f64) -> (f64, f64, usize) {
    let step = TAU / grid as f64;
    let samples: Vec<f64> = (0..grid).map(|i| f(step * i as f64)).collect();
    let mut evaluations = grid;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in search::periodic_peaks(&samples).into_iter().take(refine.max(1)) {
        let center = step * i as f64;
        let e = search::golden_max(&mut f, center - step, center + step, tol, 200);
        evaluations += e.iterations + 2;
        let cand = if e.value >= samples[i] { (e.x.rem_euclid(TAU), e.value) } else { (center, samples[i]) };
        if cand.1 > best.1 {
            best = cand;
        }
    }
    (best.0, best.1, evaluations)
}

/// An A-unit vector `x` (original coordinates) attaining `g(M)` for the given gauge.
fn attaining_vector(gauge: &dyn Gauge, m: &CMat, w: &Weight, sweep: &SweepConfig) -> Option<CVec> {
    if m.is_empty() {
        return None;
    }
    let u = if gauge.name() == OperatorSeminorm.name() {
        linalg::top_singular_pair(m).2
    } else {
        let out = gauges::radius_sweep(m, sweep);
        let sf = gauges::SupportFunction::new(m);
        let (_, vecs) = linalg::eigh_desc(&sf.pencil(out.theta));
        vecs.column(0).into_owned()
    };
    Some(w.from_range_coords(&u))
}

/// `max_phi g(T + e^{i phi} S)` against `g(T) + g(S)`.
pub fn parallelism(relation: Relation, gauge: &dyn Gauge, t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    let (mt, ms) = lifts(t, s)?;
    let gt = gauge.of_lift(&mt);
    let gs = gauge.of_lift(&ms);
    let reference = gt + gs;
    let mut tol = tolerances(cfg.decision_tol_rel, reference);
    tol.noise_floor = lift_noise(t).max(lift_noise(s));
    tol.decision_tol = tol.decision_tol.max(tol.noise_floor);
    let (phi, value, evaluations) = maximize_phase(|p| gauge.of_lift(&(&mt + &ms * cis(p))), cfg.phi_grid, cfg.phi_refine, cfg.phi_tol);
    let lambda = cis(phi);
    let vector = attaining_vector(gauge, &(&mt + &ms * lambda), t.weight(), &cfg.sweep);
    let margin = value - reference;
    Ok(Verdict {
        relation,
        holds: margin >= -tol.decision_tol,
        margin,
        value,
        reference,
        witness: Witness { scalar: Some(lambda), vector: vector.map(|v| v.iter().copied().collect()) },
        tolerances: tol,
        method: Method {
            gauge: gauge.name().to_string(),
            search: "phase-grid+golden".into(),
            sweep_grid: cfg.sweep.grid,
            grid: vec![cfg.phi_grid, cfg.phi_refine],
            evaluations: evaluations + 2,
        },
    })
}

/// `T` A-Birkhoff-James orthogonal to `S`: `||T + gamma S||_A >= ||T||_A` for all `gamma`.
pub fn bj_orthogonal(t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    orthogonality(Relation::BjOrtho, &OperatorSeminorm, t, s, cfg)
}

/// `omega_A(T + gamma S) >= omega_A(T)` for all `gamma`.
pub fn wa_orthogonal(t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    orthogonality(Relation::WaOrtho, &NumericalRadius(cfg.sweep), t, s, cfg)
}

/// `||T + lambda S||_A = ||T||_A + ||S||_A` for some unimodular `lambda`.
pub fn norm_parallel(t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    parallelism(Relation::NormParallel, &OperatorSeminorm, t, s, cfg)
}

/// `omega_A(T + lambda S) = omega_A(T) + omega_A(S)` for some unimodular `lambda`.
pub fn wa_parallel(t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    parallelism(Relation::WaParallel, &NumericalRadius(cfg.sweep), t, s, cfg)
}

/// Cauchy-Schwarz equality `|<x|y>_A| = ||x||_A ||y||_A`, with `tol` relative
/// to `||x||_A ||y||_A`.
pub fn vec_parallel(x: &AVector, y: &AVector, tol: f64) -> Result<Verdict> {
    let inner = a_inner(x, y)?;
    let reference = a_norm(x) * a_norm(y);
    let tols = tolerances(tol, reference);
    let margin = inner.norm() - reference;
    // ||x + lambda y||_A is largest when lambda <y|x>_A is real and nonnegative
    let lambda = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    Ok(Verdict {
        relation: Relation::VecParallel,
        holds: margin >= -tols.decision_tol,
        margin,
        value: inner.norm(),
        reference,
        witness: Witness { scalar: Some(lambda), vector: None },
        tolerances: tols,
        method: Method { gauge: "inner-product".into(), search: "closed-form".into(), sweep_grid: 0, grid: vec![], evaluations: 1 },
    })
}

/// Gauge behind an orthogonality relation name (`bj` or `wa`).
pub fn orthogonality_gauge(name: &str, cfg: &CertifyConfig) -> Result<(Relation, Box<dyn Gauge>)> {
    match name {
        "bj" => Ok((Relation::BjOrtho, Box::new(OperatorSeminorm))),
        "wa" => Ok((Relation::WaOrtho, Box::new(NumericalRadius(cfg.sweep)))),
        other => Err(Error::UnknownRelation(other.to_string())),
    }
}

/// Gauge behind a parallelism relation name (`norm` or `wa`).
pub fn parallelism_gauge(name: &str, cfg: &CertifyConfig) -> Result<(Relation, Box<dyn Gauge>)> {
    match name {
        "norm" => Ok((Relation::NormParallel, Box::new(OperatorSeminorm))),
        "wa" => Ok((Relation::WaParallel, Box::new(NumericalRadius(cfg.sweep)))),
        other => Err(Error::UnknownRelation(other.to_string())),
    }
}

pub fn certify_orthogonal(name: &str, t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    let (relation, gauge) = orthogonality_gauge(name, cfg)?;
    orthogonality(relation, gauge.as_ref(), t, s, cfg)
}

pub fn certify_parallel(name: &str, t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<Verdict> {
    let (relation, gauge) = parallelism_gauge(name, cfg)?;
    parallelism(relation, gauge.as_ref(), t, s, cfg)
}

/// Outcome of searching the attaining set of `omega_A(T)` for the phase condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub betas: usize,
    /// Angles for which no attaining vector satisfied the condition.
    pub misses: Vec<f64>,
    /// Number of attaining eigenspaces explored.
    pub attaining_sets: usize,
    pub tol: f64,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.misses.is_empty()
    }
}

/// For each `beta` on a grid of `[0, 2pi)`, looks for an A-unit `x` attaining
/// `omega_A(T)` with `Re(e^{i beta} <x|Tx>_A <Sx|x>_A) >= -tol`.
///
/// The attaining vectors explored are the top eigenspaces of the Hermitian
/// pencils at every refined peak of the sweep; on such a space `E` the best
/// choice is `lambda_max` of the compressed Hermitian part, so each peak is
/// searched exactly. A miss is inconclusive: the attaining set may be larger.
pub fn wa_ortho_crosscheck(t: &SemiOperator, s: &SemiOperator, verdict: &Verdict, beta_grid: usize) -> Result<CrosscheckReport> {
    let (mt, ms) = lifts(t, s)?;
    let ms_norm = linalg::spectral_norm(&ms);
    let full = SweepConfig { max_peaks: 32, ..SweepConfig::default() };
    let out = gauges::radius_sweep(&mt, &full);
    let omega = out.value;
    let tol = verdict.tolerances.decision_tol_rel * omega.max(f64::MIN_POSITIVE) * ms_norm.max(f64::MIN_POSITIVE);
    let mut report = CrosscheckReport { betas: beta_grid, misses: Vec::new(), attaining_sets: 0, tol };
    if omega == 0.0 || ms_norm == 0.0 {
        report.attaining_sets = 1;
        return Ok(report);
    }
    let sf = gauges::SupportFunction::new(&mt);
    let level = 1e-8 * omega;
    // each attaining set as (theta*, E* M_S E)
    let compressions: Vec<(f64, CMat)> = out
        .peaks
        .iter()
        .filter(|p| p.value >= omega - level)
        .map(|p| {
            let (_, e) = linalg::top_eigenspace(&sf.pencil(p.theta), level);
            (p.theta, e.adjoint() * &ms * &e)
        })
        .collect();
    report.attaining_sets = compressions.len();
    for k in 0..beta_grid {
        let beta = TAU * k as f64 / beta_grid as f64;
        // <x|Tx>_A = conj(u* M_T u) = omega e^{i theta*} on the attaining set
        let best = compressions
            .iter()
            .map(|(theta, c)| omega * linalg::lambda_max(&linalg::hermitian_part(&(c * cis(beta + theta)))))
            .fold(f64::NEG_INFINITY, f64::max);
        if best < -tol {
            report.misses.push(beta);
        }
    }
    Ok(report)
}

/// Sequence characterization of norm parallelism: `max |<Tx|Sx>_A|` over
/// A-unit `x` equals `||T||_A ||S||_A`. Returns `(attained, product)`.
pub fn norm_parallel_crosscheck(t: &SemiOperator, s: &SemiOperator) -> Result<(f64, f64)> {
    let (mt, ms) = lifts(t, s)?;
    // <Tx|Sx>_A = u* M_S* M_T u in range coordinates
    let attained = gauges::numerical_radius_of(&(ms.adjoint() * &mt), &SweepConfig::default());
    Ok((attained, linalg::spectral_norm(&mt) * linalg::spectral_norm(&ms)))
}

/// Sequence characterization of numerical-radius parallelism: at the
/// witness `lambda`, the top eigenvector `u` of the optimal pencil of
/// `T + lambda S` gives `|<Tx|x>_A <Sx|x>_A|`. Returns `(attained, omega_A(T) omega_A(S))`.
pub fn wa_parallel_crosscheck(t: &SemiOperator, s: &SemiOperator, verdict: &Verdict) -> Result<(f64, f64)> {
    let (mt, ms) = lifts(t, s)?;
    let full = SweepConfig::default();
    let lambda = verdict.witness.scalar.unwrap_or(Complex64::new(1.0, 0.0));
    let sum = &mt + &ms * lambda;
    let out = gauges::radius_sweep(&sum, &full);
    let (_, vecs) = linalg::eigh_desc(&gauges::SupportFunction::new(&sum).pencil(out.theta));
    let u = vecs.column(0).into_owned();
    let attained = linalg::quad_form(&mt, &u).norm() * linalg::quad_form(&ms, &u).norm();
    Ok((attained, gauges::numerical_radius_of(&mt, &full) * gauges::numerical_radius_of(&ms, &full)))
}

/// One implication evaluated by [`normaloid_bridge_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeCase {
    pub hypothesis: String,
    pub premise: Verdict,
    pub conclusion: Verdict,
    pub conforms: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub t_normaloid: bool,
    pub s_normaloid: bool,
    pub at_squared_zero: bool,
    pub cases: Vec<BridgeCase>,
}

impl BridgeReport {
    pub fn conforms(&self) -> bool {
        self.cases.iter().all(|c| c.conforms)
    }
}

/// Relative tolerance for the normaloid and `AT^2 = 0` hypotheses.
pub const HYPOTHESIS_TOL: f64 = 1e-9;

/// `A T^2 = 0` up to `tol * ||A|| ||T||^2`.
pub fn is_a_square_zero(t: &SemiOperator, tol: f64) -> bool {
    let tm = t.mat();
    let scale = t.weight().scale() * linalg::spectral_norm(tm).powi(2);
    linalg::spectral_norm(&(t.weight().matrix() * tm * tm)) <= tol * scale
}

/// Evaluates whichever hypotheses hold and checks the implications they license:
///
/// * `T` A-normaloid: `omega_A`-orthogonality implies Birkhoff-James orthogonality;
/// * `A T^2 = 0`: Birkhoff-James orthogonality implies `omega_A`-orthogonality;
/// * `T`, `S` both A-normaloid: `omega_A`-parallelism implies norm parallelism.
pub fn normaloid_bridge_check(t: &SemiOperator, s: &SemiOperator, cfg: &CertifyConfig) -> Result<BridgeReport> {
    let full = SweepConfig::default();
    let t_normaloid = gauges::is_a_normaloid(t, HYPOTHESIS_TOL, &full)?;
    let s_normaloid = gauges::is_a_normaloid(s, HYPOTHESIS_TOL, &full)?;
    let at_squared_zero = is_a_square_zero(t, HYPOTHESIS_TOL);
    let mut cases = Vec::new();
    let mut case = |hypothesis: &str, premise: Verdict, conclusion: Verdict| {
        let conforms = !premise.holds || conclusion.holds;
        cases.push(BridgeCase { hypothesis: hypothesis.into(), premise, conclusion, conforms });
    };
    if t_normaloid {
        case("normaloid", wa_orthogonal(t, s, cfg)?, bj_orthogonal(t, s, cfg)?);
    }
    if at_squared_zero {
        case("square-zero", bj_orthogonal(t, s, cfg)?, wa_orthogonal(t, s, cfg)?);
    }
    if t_normaloid && s_normaloid {
        case("both-normaloid", wa_parallel(t, s, cfg)?, norm_parallel(t, s, cfg)?);
    }
    Ok(BridgeReport { t_normaloid, s_normaloid, at_squared_zero, cases })
}
