//! Seeded instance generators and the check battery.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed, check name,
//! trial index)`, so a campaign gives the same report however the trials are
//! spread over worker threads.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::blockmat::{self, BlockConfig, BlockOperator, BlockReport};
use crate::certify::{self, CertifyConfig, Relation};
use crate::error::{Error, Result};
use crate::gauges::{self, SweepConfig};
use crate::linalg::{self, cis, CMat, CVec};
use crate::rankone;
use crate::schema::InstanceFile;
use crate::semiop::{a_adjoint, a_unitary_from, tilde, SemiOperator, DEFAULT_CLASS_TOL};
use crate::weightspace::{build_weight, AVector, Weight, DEFAULT_RANK_TOL_FACTOR};

/// Slack below `-NEAR_TIGHT_REL * scale` counts as near-tight.
pub const NEAR_TIGHT_REL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n: usize,
    /// Rank of the generated weights; `0` draws it uniformly from `1..=n` per trial.
    pub rank: usize,
    pub trials: usize,
    /// Normalize weights to `lambda_max = 1`.
    pub scale: bool,
    /// Largest block count used by the block checks.
    pub max_d: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 7, n: 3, rank: 0, trials: 20, scale: true, max_d: 3 }
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// The stream for trial `index` of the check `label`.
pub fn trial_rng(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(label).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_mat<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

/// Haar unitary: QR of a Gaussian matrix with the phases of `diag(R)` divided out.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let qr = gaussian_mat(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            col *= d / d.norm();
        }
    }
    q
}

/// `A = G G*` with `G` an `n x rank` Gaussian matrix.
pub fn gen_weight_with<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize, scale: bool) -> Result<Arc<Weight>> {
    if rank == 0 || rank > n {
        return Err(Error::BadRank { rank, n });
    }
    for _ in 0..8 {
        let g = gaussian_mat(rng, n, rank);
        let mut a = &g * g.adjoint();
        a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        if scale {
            let top = linalg::lambda_max(&a);
            a /= Complex64::new(top, 0.0);
        }
        let w = build_weight(&a, DEFAULT_RANK_TOL_FACTOR)?;
        if w.rank() == rank {
            return Ok(w);
        }
    }
    Err(Error::Numerical(format!("could not draw a weight of rank {rank}")))
}

pub fn pick_rank<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> usize {
    if cfg.rank == 0 {
        rng.random_range(1..=cfg.n)
    } else {
        cfg.rank
    }
}

pub fn gen_weight<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Result<Arc<Weight>> {
    let rank = pick_rank(rng, cfg);
    gen_weight_with(rng, cfg.n, rank, cfg.scale)
}

/// `(I - P_A) N (I - P_A)`: invisible to every A-gauge.
pub fn gen_null_part<R: Rng + ?Sized>(rng: &mut R, w: &Weight) -> CMat {
    let k = linalg::eye(w.dim()) - w.projector();
    &k * gaussian_mat(rng, w.dim(), w.dim()) * &k
}

fn bind(t: CMat, w: &Arc<Weight>) -> Result<SemiOperator> {
    SemiOperator::new(t, w, DEFAULT_CLASS_TOL)
}

/// The operator with lift `m` plus a random null part.
pub fn from_lift<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>, m: &CMat) -> Result<SemiOperator> {
    bind(w.unlift_matrix(m) + gen_null_part(rng, w), w)
}

/// `A^+ M A + (I - P_A) N (I - P_A)`.
pub fn gen_adjointable<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>) -> Result<SemiOperator> {
    let m = gaussian_mat(rng, w.dim(), w.dim());
    let t = w.pinv() * m * w.matrix() + gen_null_part(rng, w);
    bind(t, w)
}

/// Rescales to `||T||_A = 1` unless `T` is A-null.
pub fn normalize(t: &SemiOperator) -> Result<SemiOperator> {
    let norm = gauges::a_opnorm(t)?;
    if norm > 0.0 {
        t.scaled(Complex64::new(1.0 / norm, 0.0))
    } else {
        Ok(t.clone())
    }
}

/// An A-unitary whose lift is Haar distributed.
pub fn gen_a_unitary<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>) -> Result<SemiOperator> {
    if w.rank() == 0 {
        return Err(Error::ZeroRank);
    }
    a_unitary_from(w, &haar_unitary(rng, w.rank()))
}

/// An A-normaloid operator: its lift is normal.
pub fn gen_normaloid<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>) -> Result<SemiOperator> {
    let r = w.rank();
    let u = haar_unitary(rng, r);
    let z = CMat::from_diagonal(&gaussian_vec(rng, r));
    from_lift(rng, w, &(&u * z * u.adjoint()))
}

/// `A T^2 = 0`: the lift is `U [[0, B], [0, 0]] U*`.
pub fn gen_square_zero<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>) -> Result<SemiOperator> {
    let r = w.rank();
    let mut m = CMat::zeros(r, r);
    if r >= 2 {
        let k = r / 2;
        m.view_mut((0, k), (k, r - k)).copy_from(&gaussian_mat(rng, k, r - k));
        let u = haar_unitary(rng, r);
        m = &u * m * u.adjoint();
    }
    from_lift(rng, w, &m)
}

/// `T` plus a rank-one leak from `N(A)` into `R(A)`; `None` when `A` is invertible.
pub fn gen_leak<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>) -> Result<Option<SemiOperator>> {
    if w.rank() == w.dim() {
        return Ok(None);
    }
    let t = gen_adjointable(rng, w)?;
    let z = w.projector() * gaussian_vec(rng, w.dim());
    let k = (linalg::eye(w.dim()) - w.projector()) * gaussian_vec(rng, w.dim());
    let scale = linalg::spectral_norm(t.mat()).max(1.0) / (z.norm() * k.norm());
    bind(t.mat() + z * k.adjoint() * Complex64::new(scale, 0.0), w).map(Some)
}

/// Lift of a partner `S` with `T ⊥ S` for the relation, obtained by removing
/// from `M_S` its component along a vector (or singular pair) attaining `g(M_T)`.
pub fn orthogonal_partner<R: Rng + ?Sized>(rng: &mut R, mt: &CMat, relation: Relation) -> CMat {
    let r = mt.nrows();
    let ms = gaussian_mat(rng, r, r);
    match relation {
        Relation::BjOrtho => {
            let (_, u, v) = linalg::top_singular_pair(mt);
            let coef = (u.adjoint() * &ms * &v)[(0, 0)];
            ms - u * v.adjoint() * coef
        }
        _ => {
            let out = gauges::radius_sweep(mt, &SweepConfig::default());
            let (_, vecs) = linalg::eigh_desc(&gauges::SupportFunction::new(mt).pencil(out.theta));
            let u = vecs.column(0).into_owned();
            let coef = linalg::quad_form(&ms, &u);
            &ms - &u * u.adjoint() * coef
        }
    }
}

/// `T ⊥ S` for `BjOrtho` or `WaOrtho`, re-certified before it is returned.
pub fn gen_orthogonal_pair<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>, relation: Relation, cfg: &CertifyConfig) -> Result<(SemiOperator, SemiOperator)> {
    for _ in 0..8 {
        let t = gen_adjointable(rng, w)?;
        if let Some(s) = orthogonal_to(rng, &t, relation, cfg)? {
            return Ok((t, s));
        }
    }
    Err(Error::Numerical("no certified orthogonal pair in 8 draws".into()))
}

/// A certified partner of a given `T`, or `None` if the certifier rejects the candidate.
pub fn orthogonal_to<R: Rng + ?Sized>(rng: &mut R, t: &SemiOperator, relation: Relation, cfg: &CertifyConfig) -> Result<Option<SemiOperator>> {
    let mt = tilde(t)?.into_matrix();
    let ms = orthogonal_partner(rng, &mt, relation);
    let s = from_lift(rng, t.weight(), &ms)?;
    let verdict = match relation {
        Relation::BjOrtho => certify::bj_orthogonal(t, &s, cfg)?,
        _ => certify::wa_orthogonal(t, &s, cfg)?,
    };
    Ok(verdict.holds.then_some(s))
}

/// A norm-parallel pair. `collinear` pairs `(T, c T + N)` are also
/// numerical-radius parallel; otherwise the lifts share a top singular pair.
#[derive(Debug, Clone)]
pub struct ParallelPair {
    pub t: SemiOperator,
    pub s: SemiOperator,
    pub collinear: bool,
}

pub fn gen_parallel_pair<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>) -> Result<ParallelPair> {
    let r = w.rank();
    let c = cis(rng.random_range(0.0..std::f64::consts::TAU)) * rng.random_range(0.25..4.0);
    if rng.random_bool(0.5) {
        let t = gen_adjointable(rng, w)?;
        let s = bind(t.mat() * c + gen_null_part(rng, w), w)?;
        return Ok(ParallelPair { t, s, collinear: true });
    }
    let (u, v) = (haar_unitary(rng, r), haar_unitary(rng, r));
    let spectrum = |rng: &mut R, top: f64| {
        let mut d = vec![top];
        d.extend((1..r).map(|_| top * rng.random_range(0.0..0.95)));
        CMat::from_diagonal(&CVec::from_iterator(r, d.into_iter().map(|x| Complex64::new(x, 0.0))))
    };
    let mt = &u * spectrum(rng, 1.0) * v.adjoint();
    let ms = &u * spectrum(rng, c.norm()) * v.adjoint() * (c / c.norm());
    Ok(ParallelPair { t: from_lift(rng, w, &mt)?, s: from_lift(rng, w, &ms)?, collinear: false })
}

/// A vector with `||x||_A > 0`.
pub fn gen_a_vector<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>) -> Result<AVector> {
    AVector::new(gaussian_vec(rng, w.dim()), w)
}

/// A grid of `d x d` A-adjointable blocks; `upper` zeroes the blocks below the diagonal.
pub fn gen_block<R: Rng + ?Sized>(rng: &mut R, w: &Arc<Weight>, d: usize, upper: bool) -> Result<BlockOperator> {
    let mut rows = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let b = if upper && i > j { bind(CMat::zeros(w.dim(), w.dim()), w)? } else { gen_adjointable(rng, w)? };
            row.push(b);
        }
        rows.push(row);
    }
    blockmat::from_operators(rows)
}

/// Shared tolerances of the battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub slack_tol_rel: f64,
    pub equality_tol_rel: f64,
    pub lift_tol_rel: f64,
    pub decision_tol_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { slack_tol_rel: 1e-8, equality_tol_rel: 1e-7, lift_tol_rel: 1e-9, decision_tol_rel: certify::DEFAULT_DECISION_TOL }
    }
}

/// What one trial of a check produced. `slack >= -tol` passes.
#[derive(Debug, Clone)]
pub struct Trial {
    pub slack: f64,
    pub scale: f64,
    pub tol: f64,
    pub instance: InstanceFile,
}

impl Trial {
    fn from_block(r: &BlockReport, instance: InstanceFile) -> Trial {
        Trial { slack: r.min_slack, scale: r.scale, tol: r.tol, instance }
    }
}

/// Everything a check needs besides its random stream.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext {
    pub gen: GenConfig,
    pub tol: Tolerances,
    pub sweep: SweepConfig,
}

impl TrialContext {
    pub fn new(gen: GenConfig) -> TrialContext {
        TrialContext { gen, tol: Tolerances::default(), sweep: SweepConfig::default() }
    }

    fn certify(&self) -> CertifyConfig {
        CertifyConfig::with_tol(self.tol.decision_tol_rel)
    }

    fn block(&self) -> BlockConfig {
        BlockConfig { sweep: self.sweep, slack_tol_rel: self.tol.slack_tol_rel, equality_tol_rel: self.tol.equality_tol_rel, ..BlockConfig::default() }
    }

    fn pick_d<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(2..=self.gen.max_d.max(2))
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial>;
}

fn instance(w: &Weight, t: Option<&SemiOperator>, s: Option<&SemiOperator>) -> InstanceFile {
    InstanceFile { n: Some(w.dim()), a: w.matrix().clone(), t: t.map(|t| t.mat().clone()), s: s.map(|s| s.mat().clone()), ..InstanceFile::default() }
}

fn block_instance(b: &BlockOperator, check: &str) -> InstanceFile {
    InstanceFile {
        n: Some(b.base().dim()),
        a: b.base().matrix().clone(),
        d: Some(b.d()),
        blocks: Some(b.blocks().iter().map(|r| r.iter().map(|t| t.mat().clone()).collect()).collect()),
        check: Some(check.to_string()),
        ..InstanceFile::default()
    }
}

/// `||T||_A / 2 <= omega_A(T) <= ||T||_A` with `||T||_A = 1`.
struct Equivalence;

impl Check for Equivalence {
    fn name(&self) -> &'static str {
        "equivalence"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let t = normalize(&gen_adjointable(rng, &w)?)?;
        let norm = gauges::a_opnorm(&t)?;
        let omega = gauges::a_radius(&t, &ctx.sweep)?;
        let slack = (omega - 0.5 * norm).min(norm - omega);
        Ok(Trial { slack, scale: norm, tol: ctx.tol.slack_tol_rel * norm, instance: instance(&w, Some(&t), None) })
    }
}

/// Lift of the A-adjoint is the adjoint of the lift; the seminorm is the
/// square root of `omega_A(T^# T)`.
struct LiftAdjoint;

impl Check for LiftAdjoint {
    fn name(&self) -> &'static str {
        "lift-adjoint"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let t = normalize(&gen_adjointable(rng, &w)?)?;
        let ts = a_adjoint(&t)?;
        let m = tilde(&t)?.into_matrix();
        let diff = linalg::spectral_norm(&(tilde(&ts)?.into_matrix() - m.adjoint()));
        let norm = gauges::a_opnorm(&t)?;
        let via_square = gauges::a_radius(&ts.compose(&t)?, &ctx.sweep)?.sqrt();
        let slack = -diff.max((norm - via_square).abs());
        Ok(Trial { slack, scale: norm, tol: ctx.tol.lift_tol_rel * norm.max(1.0), instance: instance(&w, Some(&t), None) })
    }
}

/// Rank-one closed forms against the generic gauges.
struct RankOne;

impl Check for RankOne {
    fn name(&self) -> &'static str {
        "rank-one"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let (x, y) = (gen_a_vector(rng, &w)?, gen_a_vector(rng, &w)?);
        let r = rankone::make_rank_one(&x, &y)?;
        let t = r.to_operator()?;
        let norm = rankone::rank_one_norm(&r);
        let dn = (norm - gauges::a_opnorm(&t)?).abs();
        let dr = (rankone::rank_one_radius(&r) - gauges::a_radius(&t, &ctx.sweep)?).abs();
        let scale = norm.max(f64::MIN_POSITIVE);
        // the seminorm is held ten times tighter than the radius
        Ok(Trial { slack: -(10.0 * dn).max(dr), scale, tol: ctx.tol.slack_tol_rel * scale, instance: instance(&w, Some(&t), None) })
    }
}

/// Generated orthogonal pairs stay orthogonal under homothety and (for
/// `omega_A`) under the A-adjoint.
struct OrthoPair;

impl Check for OrthoPair {
    fn name(&self) -> &'static str {
        "ortho-pair"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let relation = if rng.random_bool(0.5) { Relation::WaOrtho } else { Relation::BjOrtho };
        let cfg = ctx.certify();
        let (t, s) = gen_orthogonal_pair(rng, &w, relation, &cfg)?;
        let (a, b) = (gaussian(rng), gaussian(rng));
        let decide = |t: &SemiOperator, s: &SemiOperator| match relation {
            Relation::BjOrtho => certify::bj_orthogonal(t, s, &cfg),
            _ => certify::wa_orthogonal(t, s, &cfg),
        };
        let mut verdicts = vec![decide(&t.scaled(a)?, &s.scaled(b)?)?];
        if relation == Relation::WaOrtho {
            verdicts.push(decide(&a_adjoint(&t)?, &a_adjoint(&s)?)?);
        }
        // margins relative to each verdict's own tolerance
        let worst = verdicts.iter().map(|v| v.margin / v.tolerances.decision_tol.max(f64::MIN_POSITIVE)).fold(f64::INFINITY, f64::min);
        Ok(Trial { slack: worst.min(0.0), scale: 1.0, tol: 1.0, instance: instance(&w, Some(&t), Some(&s)) })
    }
}

/// Generated parallel pairs are certified parallel; maxima respect the triangle bound.
struct ParallelPairCheck;

impl Check for ParallelPairCheck {
    fn name(&self) -> &'static str {
        "parallel-pair"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let pair = gen_parallel_pair(rng, &w)?;
        let cfg = ctx.certify();
        let mut verdicts = vec![certify::norm_parallel(&pair.t, &pair.s, &cfg)?];
        let wa = certify::wa_parallel(&pair.t, &pair.s, &cfg)?;
        let over = |v: &certify::Verdict| -(v.value - v.reference).max(0.0) / v.tolerances.decision_tol.max(f64::MIN_POSITIVE);
        let mut worst = over(&wa);
        if pair.collinear {
            verdicts.push(wa);
        }
        for v in &verdicts {
            worst = worst.min(v.margin / v.tolerances.decision_tol.max(f64::MIN_POSITIVE)).min(over(v));
        }
        Ok(Trial { slack: worst.min(0.0), scale: 1.0, tol: 1.0, instance: instance(&w, Some(&pair.t), Some(&pair.s)) })
    }
}

/// Normaloid and square-zero implications between the two orthogonalities,
/// on partners built so that the premise holds.
struct Bridge;

impl Check for Bridge {
    fn name(&self) -> &'static str {
        "bridge"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let cfg = ctx.certify();
        let square_zero = rng.random_bool(0.5);
        let (t, premise) = if square_zero { (gen_square_zero(rng, &w)?, Relation::BjOrtho) } else { (gen_normaloid(rng, &w)?, Relation::WaOrtho) };
        let mut s = None;
        for _ in 0..8 {
            if let Some(found) = orthogonal_to(rng, &t, premise, &cfg)? {
                s = Some(found);
                break;
            }
        }
        let s = s.ok_or_else(|| Error::Numerical("no certified premise partner".into()))?;
        let report = certify::normaloid_bridge_check(&t, &s, &cfg)?;
        let worst = report
            .cases
            .iter()
            .filter(|c| c.premise.holds)
            .map(|c| c.conclusion.margin / c.conclusion.tolerances.decision_tol.max(f64::MIN_POSITIVE))
            .fold(0.0_f64, f64::min);
        Ok(Trial { slack: worst, scale: 1.0, tol: 1.0, instance: instance(&w, Some(&t), Some(&s)) })
    }
}

/// One of the block-matrix inequalities on random blocks.
struct BlockCheck {
    name: &'static str,
}

impl Check for BlockCheck {
    fn name(&self) -> &'static str {
        self.name
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let cfg = ctx.block();
        let report = match self.name {
            "sandwich" => {
                let b = gen_block(rng, &w, 2, false)?;
                (blockmat::check_sandwich(b.block(0, 1), b.block(1, 0), &cfg)?, b)
            }
            "parallel-equality" => {
                let pair = gen_parallel_pair(rng, &w)?;
                let zero = pair.t.sibling(CMat::zeros(w.dim(), w.dim()))?;
                let b = blockmat::from_operators(vec![vec![zero.clone(), pair.t.clone()], vec![pair.s.clone(), zero]])?;
                let reports = blockmat::check_parallel_equality_from_witness(&pair.t, &pair.s, &cfg)?;
                let worst = reports.into_iter().min_by(|a, b| (a.min_slack + a.tol).total_cmp(&(b.min_slack + b.tol))).expect("two branches");
                (worst, b)
            }
            "pinch" => {
                let b = gen_block(rng, &w, 3, false)?;
                (blockmat::check_pinch(&b, &cfg)?, b)
            }
            "crawford" => {
                let d = ctx.pick_d(rng);
                let b = gen_block(rng, &w, d, false)?;
                (blockmat::check_crawford_bound(&b, &cfg)?, b)
            }
            "triangular" => {
                let d = ctx.pick_d(rng);
                let b = gen_block(rng, &w, d, true)?;
                (blockmat::check_triangular(&b, &cfg)?, b)
            }
            "phase" => {
                let b = gen_block(rng, &w, 2, false)?;
                let v = haar_unitary(rng, b.inflated().weight().rank());
                (blockmat::check_phase_invariance(&b, Some(&v), &cfg)?, b)
            }
            "block-adjoint" => {
                let d = ctx.pick_d(rng);
                let b = gen_block(rng, &w, d, false)?;
                (blockmat::check_adjoint(&b, &cfg)?, b)
            }
            other => return Err(Error::UnknownCheckName(other.to_string())),
        };
        let (r, b) = report;
        Ok(Trial::from_block(&r, block_instance(&b, self.name)))
    }
}

/// `omega_A(U^# T U) = omega_A(T)` for an A-unitary `U`.
struct UnitaryInvariance;

impl Check for UnitaryInvariance {
    fn name(&self) -> &'static str {
        "unitary"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let t = gen_adjointable(rng, &w)?;
        let u = gen_a_unitary(rng, &w)?;
        let conj = a_adjoint(&u)?.compose(&t)?.compose(&u)?;
        let omega = gauges::a_radius(&t, &ctx.sweep)?;
        let diff = (gauges::a_radius(&conj, &ctx.sweep)? - omega).abs();
        Ok(Trial { slack: -diff, scale: omega, tol: ctx.tol.slack_tol_rel * omega, instance: instance(&w, Some(&t), Some(&u)) })
    }
}

/// Blockwise lift against the lift of the inflated operator, and
/// `omega(diag(T, ..., T)) = omega_A(T)`.
struct Inflation;

impl Check for Inflation {
    fn name(&self) -> &'static str {
        "inflation"
    }
    fn run(&self, rng: &mut ChaCha8Rng, ctx: &TrialContext) -> Result<Trial> {
        let w = gen_weight(rng, &ctx.gen)?;
        let d = ctx.pick_d(rng);
        let b = gen_block(rng, &w, d, false)?;
        let direct = tilde(b.inflated())?.into_matrix();
        let lift_diff = linalg::spectral_norm(&(direct - b.blockwise_tilde()?));
        let t = gen_adjointable(rng, &w)?;
        let zero = t.sibling(CMat::zeros(w.dim(), w.dim()))?;
        let diag = blockmat::from_operators((0..d).map(|i| (0..d).map(|j| if i == j { t.clone() } else { zero.clone() }).collect()).collect())?;
        let omega = gauges::a_radius(&t, &ctx.sweep)?;
        let inflated = gauges::numerical_radius_of(&diag.blockwise_tilde()?, &ctx.sweep);
        let scale = omega.max(linalg::spectral_norm(&b.blockwise_tilde()?));
        let slack = -((inflated - omega).abs()).max(lift_diff * ctx.tol.slack_tol_rel / ctx.tol.lift_tol_rel);
        Ok(Trial { slack, scale, tol: ctx.tol.slack_tol_rel * scale, instance: block_instance(&b, "inflation") })
    }
}

/// Every check of the battery, in report order.
pub fn registry() -> Vec<Box<dyn Check>> {
    let mut checks: Vec<Box<dyn Check>> = vec![
        Box::new(Equivalence),
        Box::new(LiftAdjoint),
        Box::new(RankOne),
        Box::new(OrthoPair),
        Box::new(ParallelPairCheck),
        Box::new(Bridge),
        Box::new(UnitaryInvariance),
        Box::new(Inflation),
    ];
    for name in ["sandwich", "parallel-equality", "pinch", "crawford", "triangular", "phase", "block-adjoint"] {
        checks.push(Box::new(BlockCheck { name }));
    }
    checks
}

pub fn check_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name()).collect()
}

/// Looks checks up by name, keeping the requested order.
pub fn select_checks(names: &[&str]) -> Result<Vec<Box<dyn Check>>> {
    let mut all: Vec<Option<Box<dyn Check>>> = registry().into_iter().map(Some).collect();
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let k = all.iter().position(|c| c.as_ref().is_some_and(|c| c.name() == *name));
        match k {
            Some(k) => out.push(all[k].take().expect("each check selected once")),
            None if registry().iter().any(|c| c.name() == *name) => {}
            None => return Err(Error::UnknownCheckName(name.to_string())),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub slack: Option<f64>,
    pub tol: Option<f64>,
    pub error: Option<String>,
    pub instance: Option<InstanceFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
    /// Smallest `slack / scale` over the trials (`slack` itself when `scale` is 0).
    pub min_relative_slack: Option<f64>,
    pub min_slack: Option<f64>,
    pub min_slack_trial: Option<usize>,
    pub near_tight: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_secs: Option<f64>,
}

impl CheckSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub n: usize,
    pub rank: usize,
    pub trials: usize,
    pub max_d: usize,
    pub tolerances: Tolerances,
    pub sweep: SweepConfig,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_secs: Option<f64>,
}

impl CampaignReport {
    pub fn failure_count(&self) -> usize {
        self.checks.iter().map(|c| c.failures.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without timing fields: byte-identical across runs and worker counts.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.runtime_secs = None;
        for c in &mut copy.checks {
            c.runtime_secs = None;
        }
        copy.to_json()
    }
}

type TrialOutcome = (usize, usize, Result<Trial>, f64);

/// Runs `trials` trials of each check, spread over `workers` threads.
pub fn run_campaign(ctx: &TrialContext, checks: &[Box<dyn Check>], workers: usize) -> CampaignReport {
    let start = Instant::now();
    let trials = ctx.gen.trials;
    let tasks: Vec<(usize, usize)> = (0..checks.len()).flat_map(|c| (0..trials).map(move |t| (c, t))).collect();
    let workers = workers.max(1).min(tasks.len().max(1));
    let run = |&(c, t): &(usize, usize)| -> TrialOutcome {
        let check = &checks[c];
        let began = Instant::now();
        let mut rng = trial_rng(ctx.gen.seed, check.name(), t as u64);
        let out = check.run(&mut rng, ctx);
        (c, t, out, began.elapsed().as_secs_f64())
    };
    let mut outcomes: Vec<TrialOutcome> = if workers == 1 {
        tasks.iter().map(run).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|k| {
                    let tasks = &tasks;
                    let run = &run;
                    scope.spawn(move || tasks.iter().skip(k).step_by(workers).map(run).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    outcomes.sort_by_key(|o| (o.0, o.1));
    let mut summaries: Vec<CheckSummary> = checks
        .iter()
        .map(|c| CheckSummary {
            name: c.name().to_string(),
            trials,
            failures: Vec::new(),
            min_relative_slack: None,
            min_slack: None,
            min_slack_trial: None,
            near_tight: 0,
            runtime_secs: Some(0.0),
        })
        .collect();
    for (c, t, out, secs) in outcomes {
        let s = &mut summaries[c];
        *s.runtime_secs.get_or_insert(0.0) += secs;
        match out {
            Ok(trial) => {
                let rel = if trial.scale > 0.0 { trial.slack / trial.scale } else { trial.slack };
                if s.min_relative_slack.is_none_or(|m| rel < m) {
                    s.min_relative_slack = Some(rel);
                    s.min_slack = Some(trial.slack);
                    s.min_slack_trial = Some(t);
                }
                if trial.slack < NEAR_TIGHT_REL * trial.scale {
                    s.near_tight += 1;
                }
                if !(trial.slack >= -trial.tol) {
                    s.failures.push(Failure { trial: t, slack: Some(trial.slack), tol: Some(trial.tol), error: None, instance: Some(trial.instance) });
                }
            }
            Err(e) => s.failures.push(Failure { trial: t, slack: None, tol: None, error: Some(e.to_string()), instance: None }),
        }
    }
    let passed = summaries.iter().all(CheckSummary::passed);
    CampaignReport {
        seed: ctx.gen.seed,
        n: ctx.gen.n,
        rank: ctx.gen.rank,
        trials,
        max_d: ctx.gen.max_d,
        tolerances: ctx.tol,
        sweep: ctx.sweep,
        passed,
        checks: summaries,
        runtime_secs: Some(start.elapsed().as_secs_f64()),
    }
}

/// [`run_campaign`] over checks given by name (`[]` runs the whole battery).
pub fn run_named(ctx: &TrialContext, names: &[&str], workers: usize) -> Result<CampaignReport> {
    let checks = if names.is_empty() { registry() } else { select_checks(names)? };
    Ok(run_campaign(ctx, &checks, workers))
}
