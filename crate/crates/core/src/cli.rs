//! Command-line front end: parse curve/divisor/jet-differential files, run
//! the harnesses, and emit CSV or JSON tables on stdout (or to a file).
//!
//! Exit codes: 0 success, 2 hypothesis violation (named on stderr),
//! 3 numeric non-convergence, 1 parse or I/O failure.

use crate::brotbek;
use crate::curve::{parse_expr, CurveError, HoloCurve};
use crate::divisor::{Arrangement, DivisorError, Hypersurface};
use crate::jetcore::Real;
use crate::jetdiff::{GGJetDifferential, JetDiffError};
use crate::radial::{
    self, counting_n, linear_grid, zero_set, LemmaCheck, RadialError, RadialProfile,
};
use crate::smtdef::{self, SmtError, SmtSpec};
use clap::{Args, Parser, Subcommand};
use num::bigint::BigInt;
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "nevlab",
    about = "Value-distribution laboratory: characteristic/counting/proximity profiles, \
             second-main-theorem margins, defect estimates, and exact degree arithmetic",
    version
)]
struct Cli {
    /// Seed for randomized property sweeps (reserved; the shipped commands
    /// are fully deterministic).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GridArgs {
    /// Smallest grid radius.
    #[arg(long, default_value_t = 1.0)]
    rmin: Real,
    /// Largest grid radius.
    #[arg(long, default_value_t = 10.0)]
    rmax: Real,
    /// Number of grid points.
    #[arg(long = "grid", default_value_t = 64)]
    grid_points: usize,
    /// Quadrature tolerance exponent: tol = 10^-precision.
    #[arg(long, default_value_t = 10)]
    precision: u32,
}

impl GridArgs {
    fn validate(&self) -> Result<(Vec<Real>, Real), AppError> {
        if self.rmin < 1.0 {
            return Err(AppError::Hypothesis("rmin must be at least 1".into()));
        }
        if self.grid_points < 8 {
            return Err(AppError::Hypothesis("grid must have at least 8 points".into()));
        }
        if self.rmax <= self.rmin {
            return Err(AppError::Hypothesis("rmax must exceed rmin".into()));
        }
        let grid = linear_grid(self.rmin, self.rmax, self.grid_points)?;
        Ok((grid, (10.0 as Real).powi(-(self.precision as i32))))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic profile T(r) of a curve.
    Tfr {
        /// Curve description file: {n, R0, coords}.
        #[arg(long)]
        curve: PathBuf,
        /// Bundle twist d: computes T_{f, O(d)}.
        #[arg(long, default_value_t = 1)]
        twist: i64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Zero scan of a pullback plus counting profiles N and N^(k).
    Count {
        #[arg(long)]
        curve: PathBuf,
        /// Hypersurface description file: {n, d, terms}.
        #[arg(long)]
        divisor: PathBuf,
        /// Truncation level for an additional N^(k) profile.
        #[arg(long)]
        trunc: Option<u32>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// First Main Theorem residual profile.
    Fmt {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Second Main Theorem margin report (Cartan or general jet differential).
    Smt {
        #[arg(long)]
        curve: PathBuf,
        /// Cartan/Wronskian case: file with {"hyperplanes": [[c0, ...], ...]}.
        #[arg(long)]
        cartan: Option<PathBuf>,
        /// General case: jet differential description file.
        #[arg(long)]
        jetdiff: Option<PathBuf>,
        /// General case: divisor file.
        #[arg(long)]
        divisor: Option<PathBuf>,
        /// General case: weighted degree m of the differential.
        #[arg(long)]
        m: Option<u32>,
        /// General case: twist exponent m~ (LHS multiplier of T).
        #[arg(long)]
        mtilde: Option<u32>,
        /// Epsilon in the error term S(r, f, A).
        #[arg(long, default_value_t = 0.5)]
        eps: Real,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Defect estimate with relation margins.
    Defect {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        divisor: PathBuf,
        /// Ampleness twist a of A = O(a).
        #[arg(long, default_value_t = 1)]
        atwist: i64,
        /// Truncation level of the counting function.
        #[arg(long, default_value_t = 1)]
        mu0: u32,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Logarithmic-derivative / jet-differential lemma ratio sweeps.
    Loglemma {
        /// Scalar case: expression for phi (e.g. "exp(z)").
        #[arg(long)]
        phi: Option<String>,
        /// Derivative order l in the scalar case.
        #[arg(long, default_value_t = 1)]
        l: usize,
        /// Jet-differential case: curve file.
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Jet-differential case: differential file.
        #[arg(long)]
        jetdiff: Option<PathBuf>,
        /// Integrand exponent t (0 < t*l < p < 1 required).
        #[arg(long, default_value_t = 0.3)]
        t: Real,
        /// Core exponent p.
        #[arg(long, default_value_t = 0.4)]
        p: Real,
        /// Gap R - r between the inner and outer radii.
        #[arg(long, default_value_t = 3.0)]
        rgap: Real,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact degree-arithmetic verification report.
    DegreeBound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        c: u32,
        /// Optional degree to decompose as eps + (r + k) delta.
        #[arg(long)]
        d: Option<String>,
        /// Twist offset beta (defaults to 0; only existence is asserted upstream).
        #[arg(long, default_value = "0")]
        beta: String,
        /// Twist offset beta~ (defaults to 0).
        #[arg(long = "beta-tilde", default_value = "0")]
        beta_tilde: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// Classified failure: the exit code is the classification.
#[derive(Debug)]
pub enum AppError {
    Parse(String),
    Hypothesis(String),
    Numeric(String),
    Internal(String),
}

impl AppError {
    pub fn code(&self) -> i32 {
        match self {
            AppError::Parse(_) | AppError::Internal(_) => 1,
            AppError::Hypothesis(_) => 2,
            AppError::Numeric(_) => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AppError::Parse(_) => "parse error",
            AppError::Hypothesis(_) => "hypothesis violation",
            AppError::Numeric(_) => "numeric non-convergence",
            AppError::Internal(_) => "internal error",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            AppError::Parse(m)
            | AppError::Hypothesis(m)
            | AppError::Numeric(m)
            | AppError::Internal(m) => m,
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Parse(e.to_string())
    }
}

impl From<CurveError> for AppError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::Parse { .. } => AppError::Parse(e.to_string()),
            _ => AppError::Hypothesis(e.to_string()),
        }
    }
}

impl From<DivisorError> for AppError {
    fn from(e: DivisorError) -> Self {
        match e {
            DivisorError::Parse { .. } => AppError::Parse(e.to_string()),
            _ => AppError::Hypothesis(e.to_string()),
        }
    }
}

impl From<JetDiffError> for AppError {
    fn from(e: JetDiffError) -> Self {
        match e {
            JetDiffError::Curve(CurveError::Parse { .. }) => AppError::Parse(e.to_string()),
            JetDiffError::SaturatedOrder(_) | JetDiffError::OrderRoutesDisagree { .. } => {
                AppError::Numeric(e.to_string())
            }
            _ => AppError::Hypothesis(e.to_string()),
        }
    }
}

impl From<RadialError> for AppError {
    fn from(e: RadialError) -> Self {
        match e {
            RadialError::NoConvergence { .. } | RadialError::ScanCapExceeded(_) => {
                AppError::Numeric(e.to_string())
            }
            RadialError::Curve(c) => c.into(),
            RadialError::Divisor(d) => d.into(),
            RadialError::JetDiff(j) => j.into(),
            _ => AppError::Hypothesis(e.to_string()),
        }
    }
}

impl From<SmtError> for AppError {
    fn from(e: SmtError) -> Self {
        match e {
            SmtError::Radial(r) => r.into(),
            SmtError::Divisor(d) => d.into(),
            SmtError::JetDiff(j) => j.into(),
            _ => AppError::Hypothesis(e.to_string()),
        }
    }
}

impl From<brotbek::BrotbekError> for AppError {
    fn from(e: brotbek::BrotbekError) -> Self {
        match e {
            brotbek::BrotbekError::BoundViolation(_) => AppError::Internal(e.to_string()),
            _ => AppError::Hypothesis(e.to_string()),
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, AppError> {
    std::fs::read_to_string(path).map_err(|e| AppError::Parse(format!("{}: {e}", path.display())))
}

fn load_curve(path: &PathBuf) -> Result<HoloCurve, AppError> {
    Ok(HoloCurve::from_json(&read_file(path)?)?)
}

fn load_hypersurface(path: &PathBuf) -> Result<Hypersurface, AppError> {
    Ok(Hypersurface::from_json(&read_file(path)?)?)
}

#[derive(serde::Deserialize)]
struct ArrangementSpec {
    hyperplanes: Vec<Vec<Real>>,
}

fn load_arrangement(path: &PathBuf) -> Result<Arrangement, AppError> {
    let spec: ArrangementSpec = serde_json::from_str(&read_file(path)?)
        .map_err(|e| AppError::Parse(format!("{}: {e}", path.display())))?;
    let planes = spec
        .hyperplanes
        .iter()
        .map(|coeffs| {
            Hypersurface::hyperplane(
                &coeffs.iter().map(|&x| crate::Cx::new(x, 0.0)).collect::<Vec<_>>(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Arrangement::new(planes)?)
}

fn big_arg(text: &str) -> Result<BigInt, AppError> {
    BigInt::from_str(text).map_err(|e| AppError::Parse(format!("bad integer '{text}': {e}")))
}

fn emit(out: &OutArgs, csv: String, json: String) -> Result<(), AppError> {
    let body = match out.format {
        Format::Csv => csv,
        Format::Json => json,
    };
    match &out.out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn profiles_csv(profiles: &[&RadialProfile]) -> String {
    let mut out = String::from("r,value,label\n");
    for p in profiles {
        for (r, v) in p.r_grid.iter().zip(&p.values) {
            out.push_str(&format!("{r},{v},{}\n", p.label));
        }
    }
    out
}

fn to_json<T: Serialize>(value: &T) -> Result<String, AppError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| AppError::Internal(e.to_string()))
}

#[derive(Serialize)]
struct ZeroOut {
    location: [Real; 2],
    order: u32,
}

#[derive(Serialize)]
struct CountReport {
    origin_order: u32,
    r_scanned: Real,
    zeros: Vec<ZeroOut>,
    profiles: Vec<RadialProfile>,
}

#[derive(Serialize)]
struct DefectReport {
    estimate: smtdef::DefectEstimate,
    /// bound - defect against the hyperplane bound at rho = 0 for this
    /// single divisor, clamping the estimate into [0, d].
    fujimoto_margin: Real,
}

#[derive(Serialize)]
struct LemmaSweep {
    t: Real,
    p: Real,
    checks: Vec<LemmaCheck>,
    ratio_max: Real,
    ratio_min: Real,
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("nevlab: {}: {}", e.name(), e.message());
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Tfr { curve, twist, grid, out } => {
            let f = load_curve(&curve)?;
            let (g, tol) = grid.validate()?;
            let t = radial::characteristic_t(&f, twist, &g, tol)?;
            emit(&out, profiles_csv(&[&t]), to_json(&t)?)
        }
        Command::Count { curve, divisor, trunc, grid, out } => {
            let f = load_curve(&curve)?;
            let q = load_hypersurface(&divisor)?;
            let (g, _tol) = grid.validate()?;
            let scan_r = g.last().unwrap() * (1.0 + 1e-6);
            let zs = zero_set(&f, &q, scan_r)?;
            let mut profiles = vec![counting_n(&zs, &g, None)?];
            if let Some(k) = trunc {
                profiles.push(counting_n(&zs, &g, Some(k))?);
            }
            let report = CountReport {
                origin_order: zs.origin_order,
                r_scanned: zs.r_max,
                zeros: zs
                    .records
                    .iter()
                    .map(|z| ZeroOut { location: [z.location.re, z.location.im], order: z.order })
                    .collect(),
                profiles: profiles.clone(),
            };
            let refs: Vec<&RadialProfile> = profiles.iter().collect();
            emit(&out, profiles_csv(&refs), to_json(&report)?)
        }
        Command::Fmt { curve, divisor, grid, out } => {
            let f = load_curve(&curve)?;
            let q = load_hypersurface(&divisor)?;
            let (g, tol) = grid.validate()?;
            let res = radial::fmt_residual(&f, &q, &g, tol)?;
            emit(&out, profiles_csv(&[&res]), to_json(&res)?)
        }
        Command::Smt { curve, cartan, jetdiff, divisor, m, mtilde, eps, grid, out } => {
            let f = load_curve(&curve)?;
            let (g, tol) = grid.validate()?;
            let report = match (cartan, jetdiff) {
                (Some(arr_path), None) => {
                    let arr = load_arrangement(&arr_path)?;
                    smtdef::smt_margin(
                        &f,
                        &SmtSpec::CartanWronskian { arrangement: &arr },
                        &g,
                        eps,
                        tol,
                    )?
                }
                (None, Some(jd_path)) => {
                    let p_diff = GGJetDifferential::from_json(&read_file(&jd_path)?)?;
                    let div_path = divisor.ok_or_else(|| {
                        AppError::Parse("--divisor is required with --jetdiff".into())
                    })?;
                    let q = load_hypersurface(&div_path)?;
                    let m = m.unwrap_or(p_diff.m() as u32);
                    let m_tilde = mtilde
                        .or_else(|| u32::try_from(-p_diff.twist().0).ok().filter(|&v| v > 0))
                        .ok_or_else(|| {
                            AppError::Parse("--mtilde required when the twist is not O(-m~)".into())
                        })?;
                    smtdef::smt_margin(
                        &f,
                        &SmtSpec::GeneralJetDiff { p_diff: &p_diff, divisor: &q, m, m_tilde },
                        &g,
                        eps,
                        tol,
                    )?
                }
                _ => {
                    return Err(AppError::Parse(
                        "exactly one of --cartan FILE or --jetdiff FILE is required".into(),
                    ))
                }
            };
            emit(&out, profiles_csv(&[&report.margin, &report.sharpness]), to_json(&report)?)
        }
        Command::Defect { curve, divisor, atwist, mu0, grid, out } => {
            let f = load_curve(&curve)?;
            let q = load_hypersurface(&divisor)?;
            let (g, tol) = grid.validate()?;
            let estimate = smtdef::defect_estimate(&f, &q, atwist, mu0, &g, tol)?;
            let clamped = estimate.liminf_estimate.clamp(0.0, estimate.d as Real);
            let fujimoto_margin = smtdef::defect_relation_margin(
                &[clamped],
                smtdef::BoundSpec::Fujimoto { n: f.n() as u32, rho: 0.0 },
            )?;
            let report = DefectReport { estimate, fujimoto_margin };
            emit(&out, profiles_csv(&[&report.estimate.ratio_profile]), to_json(&report)?)
        }
        Command::Loglemma { phi, l, curve, jetdiff, t, p, rgap, grid, out } => {
            let (g, tol) = grid.validate()?;
            let mut checks = Vec::new();
            match (phi, curve, jetdiff) {
                (Some(expr_text), None, None) => {
                    let phi = parse_expr(&expr_text)?;
                    for &r in &g {
                        checks.push(radial::logderiv_bound_check(&phi, l, t, p, r, r + rgap, tol)?);
                    }
                }
                (None, Some(curve_path), Some(jd_path)) => {
                    let f = load_curve(&curve_path)?;
                    let p_diff = GGJetDifferential::from_json(&read_file(&jd_path)?)?;
                    for &r in &g {
                        checks.push(radial::main_lemma_check(&p_diff, &f, t, p, r, r + rgap, tol)?);
                    }
                }
                _ => {
                    return Err(AppError::Parse(
                        "use either --phi EXPR or both --curve and --jetdiff".into(),
                    ))
                }
            }
            let ratio_max = checks.iter().map(|c| c.ratio).fold(Real::NEG_INFINITY, Real::max);
            let ratio_min = checks.iter().map(|c| c.ratio).fold(Real::INFINITY, Real::min);
            let sweep = LemmaSweep { t, p, checks, ratio_max, ratio_min };
            let mut csv = String::from("r,value,label\n");
            for c in &sweep.checks {
                csv.push_str(&format!("{},{},ratio\n", c.r, c.ratio));
            }
            emit(&out, csv, to_json(&sweep)?)
        }
        Command::DegreeBound { n, c, d, beta, beta_tilde, out } => {
            let d_val = d.map(|t| big_arg(&t)).transpose()?;
            let report = brotbek::full_report(
                n,
                c,
                d_val.as_ref(),
                &big_arg(&beta)?,
                &big_arg(&beta_tilde)?,
            )?;
            emit(&out, degree_table(&report), to_json(&report)?)
        }
    }
}

fn degree_table(report: &brotbek::FullReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "degree arithmetic for n = {}, c = {}\n",
        report.params.n, report.params.c
    ));
    out.push_str(&format!(
        "  k = {}  k' = {}  delta = {}\n",
        report.params.k, report.params.k_prime, report.params.delta
    ));
    out.push_str(&format!("  r0 = {} (both closed forms agree)\n", report.params.r0));
    out.push_str(&format!("  decomposition threshold = {}\n", report.chain.threshold));
    out.push_str(&format!("  degree bound = {}\n", report.chain.degree_bound));
    out.push_str("  checks:\n");
    for chk in &report.chain.checks {
        let line = if chk.name == "c" {
            // (c) is stated as lhs > rhs
            format!("    (c) {} > {} : {}", chk.lhs, chk.rhs, pass_str(chk.pass))
        } else {
            let rel = if chk.strict { "<" } else { "<=" };
            format!("    ({}) {} {} {} : {}", chk.name, chk.lhs, rel, chk.rhs, pass_str(chk.pass))
        };
        out.push_str(&line);
        out.push('\n');
    }
    if let Some(dec) = &report.decomposition {
        out.push_str(&format!(
            "  d = {} decomposes with eps = {}, r = {} (required r > {})\n",
            dec.d, dec.epsilon, dec.r, dec.r_lower_bound
        ));
    }
    if let Some(a) = &report.alpha {
        out.push_str(&format!(
            "  alpha_min = {}  m(alpha) = {}  m~(alpha) = {}  ratio limit = {}\n",
            a.alpha_min, a.m_alpha, a.m_tilde_alpha, a.ratio_limit
        ));
    }
    out
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}
