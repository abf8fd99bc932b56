//! `semihilbert`: gauges, certificates and inequality checks for operators on
//! a space with a positive semi-definite weight.
//!
//! Exit codes: 0 pass or relation holds, 1 relation fails or a violation was
//! found, 2 input error, 3 mathematical precondition failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use semihilbert::blockmat::{self, BlockConfig};
use semihilbert::certify::{self, CertifyConfig};
use semihilbert::gauges::{self, RangeProfile, SweepConfig};
use semihilbert::genfuzz::{self, GenConfig, TrialContext};
use semihilbert::rankone;
use semihilbert::schema::{InstanceFile, RadiusReport, RankOneReport};
use semihilbert::semiop::{tilde, DEFAULT_CLASS_TOL};
use semihilbert::weightspace::{a_inner, build_weight, DEFAULT_RANK_TOL_FACTOR};
use semihilbert::{AVector, Error, SemiOperator, Weight};

/// Environment variable overriding the default relative tolerance.
const TOL_ENV: &str = "SEMIHILBERT_TOL";

#[derive(Parser)]
#[command(name = "semihilbert", version, about = "Weighted numerical radius, orthogonality and block-matrix checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// omega_A, m_A, ||T||_A and r_A of `T`.
    Radius {
        file: PathBuf,
        /// Number of sweep angles.
        #[arg(long, default_value_t = 720)]
        grid: usize,
        /// Width at which golden refinement of a peak stops.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the sampled boundary of W_A(T) (format from the extension unless given).
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_enum)]
        profile_format: Option<ProfileFormat>,
    },
    /// Decide T ⊥ S.
    Ortho {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OrthoRelation::Wa)]
        relation: OrthoRelation,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Decide T ∥ S (or x ∥ y with `--relation vec`).
    Parallel {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ParallelRelation::Wa)]
        relation: ParallelRelation,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Closed forms for x (x)_A y.
    Rankone { file: PathBuf },
    /// Block-matrix inequality check.
    Block {
        file: PathBuf,
        /// Overrides the `check` field of the file.
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Seeded campaign over the check battery.
    Fuzz {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Weight rank; 0 draws it per trial.
        #[arg(long, default_value_t = 0)]
        rank: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Comma-separated check names (default: all).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_d: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Also write the full report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List the checks known to `fuzz` and `block`.
    Checks,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrthoRelation {
    Bj,
    Wa,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParallelRelation {
    Norm,
    Wa,
    Vec,
}

enum Failure {
    Input(String),
    Precondition(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("precondition failed: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Radius { file, grid, tol, profile, profile_format } => cmd_radius(&file, grid, tol, profile.as_deref(), profile_format),
        Command::Ortho { file, relation, tol } => cmd_ortho(&file, relation, tol),
        Command::Parallel { file, relation, tol } => cmd_parallel(&file, relation, tol),
        Command::Rankone { file } => cmd_rankone(&file),
        Command::Block { file, check, tol } => cmd_block(&file, check, tol),
        Command::Fuzz { dim, rank, trials, seed, checks, max_d, workers, report, tol } => {
            let gen = GenConfig { seed, n: dim, rank, trials, scale: true, max_d };
            cmd_fuzz(gen, &checks, workers, report.as_deref(), tol)
        }
        Command::Checks => {
            for name in genfuzz::check_names() {
                emit(name);
            }
            Ok(true)
        }
    }
}

/// `--tol`, else the environment override, else `default`.
fn resolve_tol(flag: Option<f64>, default: f64) -> Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v.trim().parse::<f64>().map_err(|_| Failure::Input(format!("{TOL_ENV}={v:?} is not a number")))?,
            Err(_) => default,
        },
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Input(format!("tolerance must be a nonnegative number, got {tol}")));
    }
    Ok(tol)
}

fn load(path: &Path) -> Result<(InstanceFile, Arc<Weight>), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let inst = InstanceFile::from_json(&text)?;
    let w = build_weight(&inst.a, DEFAULT_RANK_TOL_FACTOR)?;
    Ok((inst, w))
}

fn operator(inst: &InstanceFile, w: &Arc<Weight>, name: &str) -> Result<SemiOperator, Failure> {
    let m = match name {
        "T" => inst.t.as_ref(),
        _ => inst.s.as_ref(),
    };
    let m = m.ok_or_else(|| Failure::Input(format!("instance has no `{name}`")))?;
    Ok(SemiOperator::new(m.clone(), w, DEFAULT_CLASS_TOL)?)
}

fn vectors(inst: &InstanceFile, w: &Arc<Weight>) -> Result<(AVector, AVector), Failure> {
    let x = inst.x_vec().ok_or_else(|| Failure::Input("instance has no `x`".into()))?;
    let y = inst.y_vec().ok_or_else(|| Failure::Input("instance has no `y`".into()))?;
    Ok((AVector::new(x, w)?, AVector::new(y, w)?))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn print_json<T: serde::Serialize>(value: &T) {
    emit(&serde_json::to_string_pretty(value).expect("report serializes"));
}

fn cmd_radius(file: &Path, grid: usize, tol: f64, profile: Option<&Path>, format: Option<ProfileFormat>) -> Outcome {
    if grid < 3 {
        return Err(Failure::Input("--grid must be at least 3".into()));
    }
    let (inst, w) = load(file)?;
    let t = operator(&inst, &w, "T")?;
    t.require_bounded()?;
    let cfg = SweepConfig { grid, theta_tol: tol, ..SweepConfig::default() };
    let (omega, prof) = gauges::a_numerical_radius(&t, &cfg)?;
    let norm = gauges::a_opnorm(&t)?;
    let report = RadiusReport {
        omega,
        crawford: prof.crawford,
        norm,
        spectral_radius: gauges::a_spectral_radius(&t)?,
        normaloid: (norm - omega).abs() <= certify::HYPOTHESIS_TOL * norm.max(f64::MIN_POSITIVE),
        rank: tilde(&t)?.rank(),
        sweep: prof.sweep_meta.clone(),
    };
    if let Some(path) = profile {
        let format = format.or_else(|| match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Some(ProfileFormat::Csv),
            Some("svg") => Some(ProfileFormat::Svg),
            Some("json") => Some(ProfileFormat::Json),
            _ => None,
        });
        let body = match format.unwrap_or(ProfileFormat::Json) {
            ProfileFormat::Json => prof.to_json(),
            ProfileFormat::Csv => profile_csv(&prof),
            ProfileFormat::Svg => profile_svg(&prof),
        };
        std::fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    print_json(&report);
    Ok(true)
}

fn profile_csv(p: &RangeProfile) -> String {
    let mut out = String::from("theta,support,boundary_re,boundary_im\n");
    for (k, (t, h)) in p.thetas.iter().zip(&p.support).enumerate() {
        let z = p.polygon[k];
        let _ = writeln!(out, "{t:.17e},{h:.17e},{:.17e},{:.17e}", z.re, z.im);
    }
    out
}

fn profile_svg(p: &RangeProfile) -> String {
    let r = p.omega.max(f64::MIN_POSITIVE);
    let size = 400.0;
    let s = 0.45 * size / r;
    let map = |re: f64, im: f64| (size / 2.0 + s * re, size / 2.0 - s * im);
    let mut points = String::new();
    for z in &p.polygon {
        let (x, y) = map(z.re, z.im);
        let _ = write!(points, "{x:.3},{y:.3} ");
    }
    let (cx, cy) = map(0.0, 0.0);
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n",
            "  <line x1=\"0\" y1=\"{cy}\" x2=\"{size}\" y2=\"{cy}\" stroke=\"#bbb\"/>\n",
            "  <line x1=\"{cx}\" y1=\"0\" x2=\"{cx}\" y2=\"{size}\" stroke=\"#bbb\"/>\n",
            "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"{rad:.3}\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n",
            "  <polygon points=\"{points}\" fill=\"#4a7ab733\" stroke=\"#1f4e8c\"/>\n",
            "</svg>\n"
        ),
        size = size,
        cx = cx,
        cy = cy,
        rad = s * r,
        points = points.trim_end()
    )
}

fn cmd_ortho(file: &Path, relation: OrthoRelation, tol: Option<f64>) -> Outcome {
    let cfg = CertifyConfig::with_tol(resolve_tol(tol, certify::DEFAULT_DECISION_TOL)?);
    let (inst, w) = load(file)?;
    let (t, s) = (operator(&inst, &w, "T")?, operator(&inst, &w, "S")?);
    let name = match relation {
        OrthoRelation::Bj => "bj",
        OrthoRelation::Wa => "wa",
    };
    let verdict = certify::certify_orthogonal(name, &t, &s, &cfg)?;
    emit(&verdict.to_json());
    Ok(verdict.holds)
}

fn cmd_parallel(file: &Path, relation: ParallelRelation, tol: Option<f64>) -> Outcome {
    let tol = resolve_tol(tol, certify::DEFAULT_DECISION_TOL)?;
    let (inst, w) = load(file)?;
    let verdict = match relation {
        ParallelRelation::Vec => {
            let (x, y) = vectors(&inst, &w)?;
            certify::vec_parallel(&x, &y, tol)?
        }
        ParallelRelation::Norm | ParallelRelation::Wa => {
            let (t, s) = (operator(&inst, &w, "T")?, operator(&inst, &w, "S")?);
            let name = if matches!(relation, ParallelRelation::Norm) { "norm" } else { "wa" };
            certify::certify_parallel(name, &t, &s, &CertifyConfig::with_tol(tol))?
        }
    };
    emit(&verdict.to_json());
    Ok(verdict.holds)
}

fn cmd_rankone(file: &Path) -> Outcome {
    let (inst, w) = load(file)?;
    let (x, y) = vectors(&inst, &w)?;
    let r = rankone::make_rank_one(&x, &y)?;
    print_json(&RankOneReport {
        matrix: r.matrix().clone(),
        adjoint: rankone::rank_one_adjoint(&r),
        norm: rankone::rank_one_norm(&r),
        radius: rankone::rank_one_radius(&r),
        inner: a_inner(&x, &y)?,
    });
    Ok(true)
}

fn cmd_block(file: &Path, check: Option<String>, tol: Option<f64>) -> Outcome {
    let defaults = BlockConfig::default();
    let slack_tol_rel = resolve_tol(tol, defaults.slack_tol_rel)?;
    let (inst, w) = load(file)?;
    let check = check.or(inst.check.clone()).ok_or_else(|| Failure::Input("no check given (use --check or the `check` field)".into()))?;
    let blocks = inst.blocks.as_ref().ok_or_else(|| Failure::Input("instance has no `blocks`".into()))?;
    let b = blockmat::build_block(blocks, &w)?;
    let cfg = BlockConfig { slack_tol_rel, ..defaults };
    let reports = blockmat::run_block_check(&check, &b, &cfg).map_err(|e| match e {
        Error::BlockCount { .. } | Error::UnknownCheckName(_) => Failure::Input(e.to_string()),
        other => other.into(),
    })?;
    print_json(&reports);
    Ok(reports.iter().all(|r| r.pass))
}

fn cmd_fuzz(gen: GenConfig, checks: &[String], workers: usize, report: Option<&Path>, tol: Option<f64>) -> Outcome {
    if gen.n == 0 {
        return Err(Failure::Input("--dim must be at least 1".into()));
    }
    if gen.rank > gen.n {
        return Err(Error::BadRank { rank: gen.rank, n: gen.n }.into());
    }
    if gen.max_d < 2 {
        return Err(Failure::Input("--max-d must be at least 2".into()));
    }
    let mut ctx = TrialContext::new(gen);
    ctx.tol.slack_tol_rel = resolve_tol(tol, ctx.tol.slack_tol_rel)?;
    let names: Vec<&str> = checks.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    let out = genfuzz::run_named(&ctx, &names, workers)?;
    if let Some(path) = report {
        std::fs::write(path, out.to_json()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    emit(&out.to_json());
    Ok(out.passed)
}
