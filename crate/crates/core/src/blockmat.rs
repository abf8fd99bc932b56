//! Operator matrices `(T_ij)` acting on `H^d` with the weight `diag(A, ..., A)`.
//!
//! The inflated weight is built by replicating the spectral data of `A` with
//! the range coordinates ordered block by block, so the lift of a block
//! operator is the block matrix of the lifts of its entries. Every check below
//! evaluates numerical radii on such assembled lifts.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify::{self, CertifyConfig};
use crate::error::{Error, Result};
use crate::gauges::{self, SweepConfig};
use crate::linalg::{self, cis, CMat};
use crate::semiop::{a_adjoint, a_unitary_from, tilde, SemiOperator, DEFAULT_CLASS_TOL};
use crate::weightspace::Weight;

#[derive(Debug, Clone)]
pub struct BlockOperator {
    d: usize,
    blocks: Vec<Vec<SemiOperator>>,
    inflated: SemiOperator,
    base: Arc<Weight>,
}

fn assemble(grid: &[Vec<CMat>], idx: &[usize]) -> CMat {
    let (rows, cols) = grid[idx[0]][idx[0]].shape();
    let k = idx.len();
    let mut out = CMat::zeros(rows * k, cols * k);
    for (bi, &i) in idx.iter().enumerate() {
        for (bj, &j) in idx.iter().enumerate() {
            out.view_mut((bi * rows, bj * cols), (rows, cols)).copy_from(&grid[i][j]);
        }
    }
    out
}

/// Assembles the `d x d` grid of `n x n` matrices into an operator over `diag(A, ..., A)`.
pub fn build_block(blocks: &[Vec<CMat>], w: &Arc<Weight>) -> Result<BlockOperator> {
    let d = blocks.len();
    if d == 0 {
        return Err(Error::BlockCount { expected: 1, found: 0 });
    }
    let n = w.dim();
    let mut ops = Vec::with_capacity(d);
    for row in blocks {
        if row.len() != d {
            return Err(Error::BlockCount { expected: d, found: row.len() });
        }
        let mut ops_row = Vec::with_capacity(d);
        for b in row {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: if b.nrows() != n { b.nrows() } else { b.ncols() } });
            }
            ops_row.push(SemiOperator::new(b.clone(), w, DEFAULT_CLASS_TOL)?);
        }
        ops.push(ops_row);
    }
    from_operators(ops)
}

/// Block operator from operators that share one weight.
pub fn from_operators(blocks: Vec<Vec<SemiOperator>>) -> Result<BlockOperator> {
    let d = blocks.len();
    if d == 0 || blocks.iter().any(|r| r.len() != d) {
        return Err(Error::BlockCount { expected: d.max(1), found: blocks.iter().map(Vec::len).min().unwrap_or(0) });
    }
    let base = blocks[0][0].weight().clone();
    for row in &blocks {
        for b in row {
            b.same_context(&blocks[0][0])?;
        }
    }
    let mats: Vec<Vec<CMat>> = blocks.iter().map(|r| r.iter().map(|b| b.mat().clone()).collect()).collect();
    let all: Vec<usize> = (0..d).collect();
    let big = assemble(&mats, &all);
    let inflated = SemiOperator::new(big, &base.inflate(d), DEFAULT_CLASS_TOL)?;
    Ok(BlockOperator { d, blocks, inflated, base })
}

impl BlockOperator {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn block(&self, i: usize, j: usize) -> &SemiOperator {
        &self.blocks[i][j]
    }

    pub fn blocks(&self) -> &[Vec<SemiOperator>] {
        &self.blocks
    }

    pub fn inflated(&self) -> &SemiOperator {
        &self.inflated
    }

    pub fn base(&self) -> &Arc<Weight> {
        &self.base
    }

    /// Lifts of every entry, `BlockNotABounded` naming the first offender.
    pub fn block_lifts(&self) -> Result<Vec<Vec<CMat>>> {
        let mut grid = Vec::with_capacity(self.d);
        for (i, row) in self.blocks.iter().enumerate() {
            let mut out = Vec::with_capacity(self.d);
            for (j, b) in row.iter().enumerate() {
                if !b.is_a_bounded() {
                    return Err(Error::BlockNotABounded { row: i, col: j });
                }
                out.push(tilde(b)?.into_matrix());
            }
            grid.push(out);
        }
        Ok(grid)
    }

    /// Lift of the inflated operator assembled from the entry lifts.
    pub fn blockwise_tilde(&self) -> Result<CMat> {
        let all: Vec<usize> = (0..self.d).collect();
        Ok(assemble(&self.block_lifts()?, &all))
    }

    fn map_blocks(&self, f: impl Fn(usize, usize, &SemiOperator) -> Result<SemiOperator>) -> Result<BlockOperator> {
        let mut rows = Vec::with_capacity(self.d);
        for i in 0..self.d {
            let mut row = Vec::with_capacity(self.d);
            for j in 0..self.d {
                row.push(f(i, j, &self.blocks[i][j])?);
            }
            rows.push(row);
        }
        from_operators(rows)
    }
}

/// `(T_ij)^# = (T_ji^#)`.
pub fn block_a_adjoint(b: &BlockOperator) -> Result<BlockOperator> {
    for (i, row) in b.blocks.iter().enumerate() {
        for (j, t) in row.iter().enumerate() {
            if !t.is_a_adjointable() {
                return Err(Error::BlockNotAAdjointable { row: i, col: j });
            }
        }
    }
    b.map_blocks(|i, j, _| a_adjoint(&b.blocks[j][i]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockConfig {
    pub sweep: SweepConfig,
    /// Inequality slacks may dip to `-slack_tol_rel * scale`.
    pub slack_tol_rel: f64,
    /// Tolerance of the parallel-equality check.
    pub equality_tol_rel: f64,
    /// Tolerance of the block adjoint against the inflated adjoint.
    pub adjoint_tol_rel: f64,
    pub certify: CertifyConfig,
}

impl Default for BlockConfig {
    fn default() -> Self {
        BlockConfig {
            sweep: SweepConfig::default(),
            slack_tol_rel: 1e-8,
            equality_tol_rel: 1e-7,
            adjoint_tol_rel: 1e-10,
            certify: CertifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Named {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub check: String,
    pub d: usize,
    pub quantities: Vec<Named>,
    /// `larger - smaller` for inequalities, `-|difference|` for equalities.
    pub slacks: Vec<Named>,
    pub min_slack: f64,
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
}

impl BlockReport {
    fn new(check: &str, d: usize) -> BlockReport {
        BlockReport { check: check.into(), d, quantities: Vec::new(), slacks: Vec::new(), min_slack: f64::INFINITY, scale: 0.0, tol: 0.0, pass: true }
    }

    fn quantity(&mut self, name: impl Into<String>, value: f64) {
        self.quantities.push(Named { name: name.into(), value });
    }

    fn slack(&mut self, name: impl Into<String>, value: f64) {
        self.slacks.push(Named { name: name.into(), value });
    }

    /// `scale` defaults to the largest quantity magnitude.
    fn finish(mut self, tol_rel: f64, scale: Option<f64>) -> BlockReport {
        self.scale = scale.unwrap_or_else(|| self.quantities.iter().map(|q| q.value.abs()).fold(0.0, f64::max));
        self.tol = tol_rel * self.scale;
        self.min_slack = self.slacks.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
        self.pass = self.slacks.iter().all(|s| s.value >= -self.tol);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn omega(m: &CMat, cfg: &BlockConfig) -> f64 {
    gauges::numerical_radius_of(m, &cfg.sweep)
}

fn off_diagonal(t12: &SemiOperator, t21_sharp_scaled: SemiOperator) -> Result<BlockOperator> {
    let zero = t12.sibling(CMat::zeros(t12.dim(), t12.dim()))?;
    from_operators(vec![vec![zero.clone(), t12.clone()], vec![t21_sharp_scaled, zero]])
}

/// `||T12 + T21||_A / 2 <= omega([[0, T12], [T21^#, 0]]) <= (||T12||_A + ||T21||_A) / 2`.
pub fn check_sandwich(t12: &SemiOperator, t21: &SemiOperator, cfg: &BlockConfig) -> Result<BlockReport> {
    t12.same_context(t21)?;
    t12.require_adjointable()?;
    let b = off_diagonal(t12, a_adjoint(t21)?)?;
    let w = omega(&b.blockwise_tilde()?, cfg);
    let lower = 0.5 * linalg::spectral_norm(tilde(&t12.add_scaled(t21, Complex64::new(1.0, 0.0))?)?.matrix());
    let upper = 0.5 * (gauges::a_opnorm(t12)? + gauges::a_opnorm(t21)?);
    let mut r = BlockReport::new("sandwich", 2);
    r.quantity("lower", lower);
    r.quantity("omega", w);
    r.quantity("upper", upper);
    r.slack("omega-lower", w - lower);
    r.slack("upper-omega", upper - w);
    Ok(r.finish(cfg.slack_tol_rel, None))
}

/// `omega([[0, T12], [e^{-2i beta} T21^#, 0]]) = (||T12||_A + ||T21||_A) / 2`
/// for a norm-parallel pair with witness `e^{2i beta}`.
pub fn check_parallel_equality(t12: &SemiOperator, t21: &SemiOperator, beta: f64, cfg: &BlockConfig) -> Result<BlockReport> {
    t12.same_context(t21)?;
    t12.require_adjointable()?;
    let verdict = certify::norm_parallel(t12, t21, &cfg.certify)?;
    if !verdict.holds {
        return Err(Error::PreconditionNotParallel { margin: verdict.margin });
    }
    let b = off_diagonal(t12, a_adjoint(t21)?.scaled(cis(-2.0 * beta))?)?;
    let w = omega(&b.blockwise_tilde()?, cfg);
    let half_sum = 0.5 * verdict.reference;
    let mut r = BlockReport::new("parallel-equality", 2);
    r.quantity("beta", beta);
    r.quantity("omega", w);
    r.quantity("half-sum", half_sum);
    r.quantity("parallel-margin", verdict.margin);
    r.slack("equality", -(w - half_sum).abs());
    Ok(r.finish(cfg.equality_tol_rel, Some(half_sum)))
}

/// Runs [`check_parallel_equality`] on both halvings of the witness phase.
pub fn check_parallel_equality_from_witness(t12: &SemiOperator, t21: &SemiOperator, cfg: &BlockConfig) -> Result<Vec<BlockReport>> {
    let verdict = certify::norm_parallel(t12, t21, &cfg.certify)?;
    if !verdict.holds {
        return Err(Error::PreconditionNotParallel { margin: verdict.margin });
    }
    let lambda = verdict.witness.scalar.unwrap_or(Complex64::new(1.0, 0.0));
    let beta = 0.5 * lambda.arg();
    [beta, beta + std::f64::consts::PI].iter().map(|&b| check_parallel_equality(t12, t21, b, cfg)).collect()
}

/// `omega(T) >= omega_A(T_ii)`, `>= omega(S_i)` (row and column `i` removed),
/// and `>=` the radius of every 2x2 principal compression.
pub fn check_pinch(b: &BlockOperator, cfg: &BlockConfig) -> Result<BlockReport> {
    let lifts = b.block_lifts()?;
    let d = b.d;
    let all: Vec<usize> = (0..d).collect();
    let w = omega(&assemble(&lifts, &all), cfg);
    let mut r = BlockReport::new("pinch", d);
    r.quantity("omega", w);
    for i in 0..d {
        let v = omega(&lifts[i][i], cfg);
        r.quantity(format!("diag[{i}]"), v);
        r.slack(format!("diag[{i}]"), w - v);
    }
    if d > 1 {
        for i in 0..d {
            let rest: Vec<usize> = (0..d).filter(|&k| k != i).collect();
            let v = omega(&assemble(&lifts, &rest), cfg);
            r.quantity(format!("without[{i}]"), v);
            r.slack(format!("without[{i}]"), w - v);
        }
        for i in 0..d {
            for j in i + 1..d {
                let v = omega(&assemble(&lifts, &[i, j]), cfg);
                r.quantity(format!("pair[{i},{j}]"), v);
                r.slack(format!("pair[{i},{j}]"), w - v);
            }
        }
    }
    Ok(r.finish(cfg.slack_tol_rel, None))
}

/// `omega(T) >= max(omega_A(T_kk), alpha_ij, beta_ij)` with
/// `alpha_ij^2 = m_A((T_ii + T_jj)/2)^2 + omega_A((T_ij + T_ji)/2)^2` and
/// `beta_ij` the same with `T_ij - T_ji`.
pub fn check_crawford_bound(b: &BlockOperator, cfg: &BlockConfig) -> Result<BlockReport> {
    let lifts = b.block_lifts()?;
    let d = b.d;
    let all: Vec<usize> = (0..d).collect();
    let w = omega(&assemble(&lifts, &all), cfg);
    let half = Complex64::new(0.5, 0.0);
    let mut r = BlockReport::new("crawford", d);
    r.quantity("omega", w);
    for k in 0..d {
        let v = omega(&lifts[k][k], cfg);
        r.quantity(format!("diag[{k}]"), v);
        r.slack(format!("diag[{k}]"), w - v);
    }
    for i in 0..d {
        for j in i + 1..d {
            let m = gauges::crawford_of(&((&lifts[i][i] + &lifts[j][j]) * half), &cfg.sweep);
            let plus = omega(&((&lifts[i][j] + &lifts[j][i]) * half), cfg);
            let minus = omega(&((&lifts[i][j] - &lifts[j][i]) * half), cfg);
            let alpha = (m * m + plus * plus).sqrt();
            let beta = (m * m + minus * minus).sqrt();
            r.quantity(format!("alpha[{i},{j}]"), alpha);
            r.quantity(format!("beta[{i},{j}]"), beta);
            r.slack(format!("alpha[{i},{j}]"), w - alpha);
            r.slack(format!("beta[{i},{j}]"), w - beta);
        }
    }
    Ok(r.finish(cfg.slack_tol_rel, None))
}

/// For upper triangular `T`: `omega(T) >= omega_A(T_kk)` and `>= ||T_ij||_A / 2` for `i < j`.
pub fn check_triangular(b: &BlockOperator, cfg: &BlockConfig) -> Result<BlockReport> {
    let d = b.d;
    let magnitude = b.blocks.iter().flatten().map(|t| linalg::max_abs(t.mat())).fold(0.0, f64::max);
    for i in 0..d {
        for j in 0..i {
            if linalg::max_abs(b.blocks[i][j].mat()) > 1e-14 * magnitude {
                return Err(Error::NotUpperTriangular { row: i, col: j });
            }
        }
    }
    let lifts = b.block_lifts()?;
    let all: Vec<usize> = (0..d).collect();
    let w = omega(&assemble(&lifts, &all), cfg);
    let mut r = BlockReport::new("triangular", d);
    r.quantity("omega", w);
    for k in 0..d {
        let v = omega(&lifts[k][k], cfg);
        r.quantity(format!("diag[{k}]"), v);
        r.slack(format!("diag[{k}]"), w - v);
    }
    for i in 0..d {
        for j in i + 1..d {
            let v = 0.5 * linalg::spectral_norm(&lifts[i][j]);
            r.quantity(format!("half-norm[{i},{j}]"), v);
            r.slack(format!("half-norm[{i},{j}]"), w - v);
        }
    }
    Ok(r.finish(cfg.slack_tol_rel, None))
}

/// `omega([[T11, i T12], [-i T21, T22]]) = omega(T)`, and, when a unitary `v`
/// of the inflated rank is supplied, `omega(U^# T U) = omega(T)` for the
/// inflated A-unitary `U` whose lift is `v`.
pub fn check_phase_invariance(b: &BlockOperator, v: Option<&CMat>, cfg: &BlockConfig) -> Result<BlockReport> {
    if b.d != 2 {
        return Err(Error::BlockCount { expected: 2, found: b.d });
    }
    let lifts = b.block_lifts()?;
    let w = omega(&assemble(&lifts, &[0, 1]), cfg);
    let i = Complex64::new(0.0, 1.0);
    let rotated = vec![vec![lifts[0][0].clone(), &lifts[0][1] * i], vec![&lifts[1][0] * (-i), lifts[1][1].clone()]];
    let wr = omega(&assemble(&rotated, &[0, 1]), cfg);
    let mut r = BlockReport::new("phase", 2);
    r.quantity("omega", w);
    r.quantity("omega-rotated", wr);
    r.slack("phase", -(w - wr).abs());
    if let Some(v) = v {
        let big = b.inflated();
        let u = a_unitary_from(big.weight(), v)?;
        let conj = a_adjoint(&u)?.compose(big)?.compose(&u)?;
        let wu = omega(tilde(&conj)?.matrix(), cfg);
        r.quantity("omega-unitary", wu);
        r.slack("unitary", -(w - wu).abs());
    }
    Ok(r.finish(cfg.slack_tol_rel, None))
}

/// Block adjoint against `A^+ T* A` of the inflated operator.
pub fn check_adjoint(b: &BlockOperator, cfg: &BlockConfig) -> Result<BlockReport> {
    let blockwise = block_a_adjoint(b)?;
    let direct = a_adjoint(b.inflated())?;
    let diff = linalg::spectral_norm(&(blockwise.inflated().mat() - direct.mat()));
    let w = b.base();
    let kappa = w.scale() * linalg::spectral_norm(w.pinv());
    let scale = (kappa * linalg::spectral_norm(b.inflated().mat())).max(f64::MIN_POSITIVE);
    let mut r = BlockReport::new("adjoint", b.d);
    r.quantity("difference", diff);
    r.quantity("adjoint-norm", linalg::spectral_norm(direct.mat()));
    r.slack("adjoint", -diff);
    Ok(r.finish(cfg.adjoint_tol_rel, Some(scale)))
}

/// Check names understood by [`run_block_check`].
pub const BLOCK_CHECKS: [&str; 7] = ["sandwich", "parallel-equality", "pinch", "crawford", "triangular", "phase", "adjoint"];

/// Runs a check by name. `sandwich` and `parallel-equality` read `T12` and
/// `T21` from a 2x2 block operator.
pub fn run_block_check(name: &str, b: &BlockOperator, cfg: &BlockConfig) -> Result<Vec<BlockReport>> {
    let pair = || if b.d == 2 { Ok((b.block(0, 1), b.block(1, 0))) } else { Err(Error::BlockCount { expected: 2, found: b.d }) };
    match name {
        "sandwich" => {
            let (t12, t21) = pair()?;
            Ok(vec![check_sandwich(t12, t21, cfg)?])
        }
        "parallel-equality" => {
            let (t12, t21) = pair()?;
            check_parallel_equality_from_witness(t12, t21, cfg)
        }
        "pinch" => Ok(vec![check_pinch(b, cfg)?]),
        "crawford" => Ok(vec![check_crawford_bound(b, cfg)?]),
        "triangular" => Ok(vec![check_triangular(b, cfg)?]),
        "phase" => Ok(vec![check_phase_invariance(b, None, cfg)?]),
        "adjoint" => Ok(vec![check_adjoint(b, cfg)?]),
        other => Err(Error::UnknownCheckName(other.to_string())),
    }
}
