//! Command-line front end: TOML experiment configs, command dispatch and
//! artifact writing. Exit codes: 0 success, 1 error, 2 verdict failure.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bemetrics::{self, BeCurve, Correction, CurveTarget, Estimator};
use crate::chain::{self, InnovationLaw, ModelParams, ParamBox, DEFAULT_GRID, DEFAULT_S_LADDER};
use crate::error::{Error, Result};
use crate::functional::AdditiveFunctional;
use crate::mest::{self, LeastSquaresAr, ESTIMATION_CSV_HEADER};
use crate::spectral::{self, GridSpec};
use crate::theory;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT_FAIL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mestlab", version, about = "Berry-Esseen measurements for M-estimators on an AR(1)-ARCH(1) chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment described by a config file.
    Run {
        what: RunKind,
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory; overrides `out_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `master_seed` in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Summarize rate-curve CSVs: slope, stability ratio and verdict per curve.
    Report {
        paths: Vec<PathBuf>,
        /// Config whose `[bands]` section sets the verdict bands.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunKind {
    Simulate,
    Drift,
    Theory,
    Spectral,
    BeCurve,
    RateFit,
    Audit,
}

impl RunKind {
    fn name(&self) -> &'static str {
        match self {
            RunKind::Simulate => "simulate",
            RunKind::Drift => "drift",
            RunKind::Theory => "theory",
            RunKind::Spectral => "spectral",
            RunKind::BeCurve => "be-curve",
            RunKind::RateFit => "rate-fit",
            RunKind::Audit => "audit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_ladder")]
    pub n_ladder: Vec<usize>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// `b_hat` search interval; defaults to the box's `[b_min, b_max]`.
    pub b_domain: Option<[f64; 2]>,
    #[serde(default)]
    pub innovation: InnovationLaw,
    #[serde(rename = "box")]
    pub param_box: Option<BoxSection>,
    pub theta: Option<ThetaSection>,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub be_curve: BeCurveSection,
    #[serde(default)]
    pub audit: AuditSection,
    #[serde(default)]
    pub rate_fit: RateFitSection,
    #[serde(default)]
    pub bands: Bands,
}

fn default_replications() -> usize {
    2000
}

fn default_ladder() -> Vec<usize> {
    vec![250, 500, 1000, 2000, 4000, 8000]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSection {
    pub rho_bar: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_grid")]
    pub grid: [usize; 3],
}

fn default_p() -> f64 {
    7.0
}

fn default_grid() -> [usize; 3] {
    DEFAULT_GRID
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSection {
    pub rho0: f64,
    pub a0: f64,
    pub b0: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub n: usize,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection { n: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSection {
    pub functional: AdditiveFunctional,
    pub nodes: Option<usize>,
    pub half_width: Option<f64>,
    pub t_step: Option<f64>,
    /// Also write the `t = t_step` operator as `operator.bin`.
    pub dump_operator: bool,
}

impl Default for SpectralSection {
    fn default() -> Self {
        SpectralSection { functional: AdditiveFunctional::Fprime, nodes: None, half_width: None, t_step: None, dump_operator: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// The single `[theta]` point.
    #[default]
    Theta,
    /// Every grid point of `[box]`.
    Sup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetName {
    #[default]
    Rho,
    B,
    Fprime,
    FsecondCentered,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeCurveSection {
    pub scope: Scope,
    pub target: TargetName,
    /// Defaults to `log` for `b`, `none` otherwise.
    pub correction: Option<Correction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorName {
    Rho,
    #[default]
    B,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSection {
    pub n: usize,
    pub estimator: EstimatorName,
    pub scope: Scope,
    /// Defaults to `log n / n` for `b` and to the exact-condition threshold for `rho`.
    pub r_n: Option<f64>,
    pub d: f64,
}

impl Default for AuditSection {
    fn default() -> Self {
        AuditSection { n: 4000, estimator: EstimatorName::B, scope: Scope::Sup, r_n: None, d: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RateFitSection {
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bands {
    pub slope_min: f64,
    pub slope_max: f64,
    pub stability_max: f64,
    pub corrected_slope_tol: f64,
    pub v3_max: f64,
    pub v6_max: f64,
}

impl Default for Bands {
    fn default() -> Self {
        Bands { slope_min: -0.65, slope_max: -0.35, stability_max: 2.5, corrected_slope_tol: 0.15, v3_max: 0.1, v6_max: 0.02 }
    }
}

impl Bands {
    /// Uncorrected curves need a slope in band and a bounded `sqrt(n) D_n`;
    /// log-corrected curves need a slope near 0.
    pub fn accepts(&self, curve: &BeCurve) -> bool {
        match curve.correction {
            Correction::None => {
                (self.slope_min..=self.slope_max).contains(&curve.slope) && curve.stability_ratio() <= self.stability_max
            }
            Correction::Log => curve.slope.abs() <= self.corrected_slope_tol,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.innovation.validate()?;
        if let Some(t) = &self.theta {
            self.theta_params_of(t)?;
        }
        if self.param_box.is_some() {
            self.param_box()?;
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be positive".into()));
        }
        if self.n_ladder.is_empty() || self.n_ladder.contains(&0) {
            return Err(Error::Config("n_ladder must list positive sample sizes".into()));
        }
        Ok(())
    }

    fn theta_params_of(&self, t: &ThetaSection) -> Result<ModelParams> {
        ModelParams::with_innovation(t.rho0, t.a0, t.b0, self.innovation).map_err(|e| Error::Config(format!("[theta] {e}")))
    }

    pub fn theta(&self) -> Result<ModelParams> {
        let t = self.theta.as_ref().ok_or_else(|| Error::Config("this command needs a [theta] section".into()))?;
        self.theta_params_of(t)
    }

    pub fn param_box(&self) -> Result<ParamBox> {
        let b = self.param_box.as_ref().ok_or_else(|| Error::Config("this command needs a [box] section".into()))?;
        ParamBox::lattice(b.rho_bar, (b.a_min, b.a_max), (b.b_min, b.b_max), b.p, self.innovation, b.grid)
            .map_err(|e| Error::Config(format!("[box] {e}")))
    }

    pub fn b_domain(&self) -> Result<(f64, f64)> {
        match (self.b_domain, &self.param_box) {
            (Some([lo, hi]), _) => Ok((lo, hi)),
            (None, Some(b)) => Ok((b.b_min, b.b_max)),
            (None, None) => Err(Error::Config("b_hat needs `b_domain` or a [box] section".into())),
        }
    }

    fn estimator(&self, name: EstimatorName) -> Result<Estimator> {
        Ok(match name {
            EstimatorName::Rho => Estimator::Rho,
            EstimatorName::B => {
                let (b_min, b_max) = self.b_domain()?;
                Estimator::B { b_min, b_max }
            }
        })
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_sha256: String,
    master_seed: u64,
    version: &'a str,
    threads: usize,
    artifacts: Vec<String>,
    timestamp_unix: u64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Outcome {
    artifacts: Vec<String>,
    pass: bool,
}

fn create(out: &Path, name: &str, artifacts: &mut Vec<String>) -> Result<BufWriter<File>> {
    artifacts.push(name.to_string());
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T, artifacts: &mut Vec<String>) -> Result<()> {
    let mut w = create(out, name, artifacts)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ThetaEntry<T> {
    theta_id: String,
    #[serde(flatten)]
    value: T,
}

fn run_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let theta = cfg.theta()?;
    let n = cfg.simulate.n;
    let traj = chain::simulate(&theta, n, cfg.master_seed)?;
    let mut artifacts = Vec::new();
    let mut w = create(out, "trajectory.csv", &mut artifacts)?;
    traj.write_csv(&mut w)?;
    w.flush()?;

    let id = theta.id();
    let mut w = create(out, "estimates.csv", &mut artifacts)?;
    writeln!(w, "{ESTIMATION_CSV_HEADER}")?;
    let rho = mest::minimize(&LeastSquaresAr::default(), &traj, 0.0)?;
    writeln!(w, "{}", rho.csv_row(&id, n, cfg.master_seed, "rho"))?;
    println!("rho_hat = {}", rho.alpha_hat);
    if let Ok(domain) = cfg.b_domain() {
        let b = mest::b_hat(&traj, mest::rho_hat(&traj)?, mest::tau_hat_sq(&traj), domain)?;
        writeln!(w, "{}", b.csv_row(&id, n, cfg.master_seed, "b"))?;
        println!("b_hat = {}", b.alpha_hat);
    }
    w.flush()?;
    Ok(Outcome { artifacts, pass: true })
}

fn run_drift(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let bx = cfg.param_box()?;
    let report = chain::check_drift(&bx, &DEFAULT_S_LADDER)?;
    let mut artifacts = Vec::new();
    write_json(out, "drift_report.json", &report, &mut artifacts)?;
    println!(
        "iota = {:.6}  varrho = {:.6}  s = {:?}  minorization = {:.4e}  pass = {}",
        report.iota, report.varrho, report.s, report.minorization_mass, report.verdict.pass
    );
    Ok(Outcome { artifacts, pass: report.verdict.pass })
}

fn config_thetas(cfg: &ExperimentConfig) -> Result<Vec<ModelParams>> {
    let mut thetas = Vec::new();
    if cfg.theta.is_some() {
        thetas.push(cfg.theta()?);
    }
    if cfg.param_box.is_some() {
        thetas.extend(cfg.param_box()?.grid);
    }
    if thetas.is_empty() {
        return Err(Error::Config("need a [theta] or [box] section".into()));
    }
    Ok(thetas)
}

fn run_theory(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let mut entries = Vec::new();
    for theta in config_thetas(cfg)? {
        let r = theory::report(&theta)?;
        println!("{:<28} m = {:.6}  sigma1^2 = {:.6}  tau = {:.6}", theta.id(), r.m_theta, r.sigma1_sq, r.tau);
        entries.push(ThetaEntry { theta_id: theta.id(), value: r });
    }
    let mut artifacts = Vec::new();
    write_json(out, "theory.json", &entries, &mut artifacts)?;
    Ok(Outcome { artifacts, pass: true })
}

fn run_spectral(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let theta = cfg.theta()?;
    let sc = &cfg.spectral;
    let base = GridSpec::default_for(&theta)?;
    let grid = GridSpec::new(sc.half_width.unwrap_or(base.half_width), sc.nodes.unwrap_or(base.nodes))?;
    let xi = sc.functional.evaluator(&theta)?;
    let report = match sc.t_step {
        Some(h) => spectral::spectral_report(&theta, xi, &grid, h)?,
        None => spectral::spectral_report_auto(&theta, xi, &grid)?,
    };
    let mut artifacts = Vec::new();
    write_json(out, "spectral_report.json", &report, &mut artifacts)?;
    if sc.dump_operator {
        let op = spectral::build_operator(&theta, xi, report.t_step, &grid)?;
        let mut w = create(out, "operator.bin", &mut artifacts)?;
        op.write_dump(&mut w)?;
        w.flush()?;
    }
    let theory_var = sc.functional.theory_variance(&theta).ok();
    println!(
        "lambda(0) = {}  lambda'(0) = {}  sigma^2 = {:.6}  doubled = {:.6}  theory = {:?}  converged = {}",
        report.lambda0, report.lambda_prime0, report.sigma_sq, report.sigma_sq_doubled, theory_var, report.converged
    );
    let pass = report.converged && (report.lambda0 - 1.0).norm() <= 1e-8;
    Ok(Outcome { artifacts, pass })
}

fn run_be_curve(cfg: &ExperimentConfig, out: &Path, bands: &Bands) -> Result<Outcome> {
    let sec = &cfg.be_curve;
    let correction = sec.correction.unwrap_or(if sec.target == TargetName::B { Correction::Log } else { Correction::None });
    let target = match sec.target {
        TargetName::Rho => CurveTarget::Estimator { estimator: Estimator::Rho },
        TargetName::B => CurveTarget::Estimator { estimator: cfg.estimator(EstimatorName::B)? },
        TargetName::Fprime => CurveTarget::Additive { functional: AdditiveFunctional::Fprime },
        TargetName::FsecondCentered => CurveTarget::Additive { functional: AdditiveFunctional::FsecondCentered },
    };
    let curve = match (sec.scope, target) {
        (Scope::Theta, _) => bemetrics::be_curve(&cfg.theta()?, &cfg.n_ladder, cfg.replications, cfg.master_seed, target, correction)?,
        (Scope::Sup, CurveTarget::Estimator { estimator }) => {
            bemetrics::be_curve_sup(&cfg.param_box()?, &cfg.n_ladder, cfg.replications, cfg.master_seed, &estimator, correction)?
        }
        (Scope::Sup, CurveTarget::Additive { .. }) => {
            return Err(Error::Config("scope = \"sup\" applies to estimators only".into()));
        }
    };
    let mut artifacts = Vec::new();
    let mut w = create(out, "be_curve.csv", &mut artifacts)?;
    curve.write_csv(&mut w, true)?;
    w.flush()?;
    let pass = bands.accepts(&curve);
    print_curve_table(&[curve], bands);
    Ok(Outcome { artifacts, pass })
}

#[derive(Debug, Deserialize)]
struct CurveRow {
    #[serde(default)]
    scope: Option<String>,
    #[serde(default)]
    estimator: Option<String>,
    n: usize,
    #[serde(rename = "R", default)]
    replications: Option<usize>,
    #[serde(rename = "D")]
    d: f64,
    #[serde(default)]
    correction: Option<Correction>,
}

/// Reads curve CSVs (`be_curve.csv` layout, or just `n,D`) and refits every
/// `(scope, estimator, correction)` group.
pub fn read_curves(paths: &[PathBuf]) -> Result<Vec<BeCurve>> {
    type Key = (String, String, &'static str);
    type Group = (Correction, usize, Vec<(usize, f64)>);
    let mut groups: BTreeMap<Key, Group> = BTreeMap::new();
    for path in paths {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        for row in rdr.deserialize::<CurveRow>() {
            let row = row.map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let correction = row.correction.unwrap_or(Correction::None);
            let key = (
                row.scope.unwrap_or_else(|| "-".into()),
                row.estimator.unwrap_or_else(|| "-".into()),
                correction.name(),
            );
            let entry = groups.entry(key).or_insert((correction, row.replications.unwrap_or(0), Vec::new()));
            entry.2.push((row.n, row.d));
        }
    }
    groups
        .into_iter()
        .map(|((scope, est, _), (correction, reps, points))| BeCurve::new(scope, est, reps, points, correction))
        .collect()
}

pub fn print_curve_table(curves: &[BeCurve], bands: &Bands) {
    println!("{:<28} {:<18} {:<10} {:>6} {:>9} {:>9} {:>7}", "scope", "estimator", "correction", "points", "slope", "ratio", "verdict");
    for c in curves {
        println!(
            "{:<28} {:<18} {:<10} {:>6} {:>9.4} {:>9.3} {:>7}",
            c.scope,
            c.estimator,
            c.correction.name(),
            c.points.len(),
            c.slope,
            c.stability_ratio(),
            if bands.accepts(c) { "pass" } else { "fail" }
        );
    }
}

fn run_rate_fit(cfg: &ExperimentConfig, out: &Path, bands: &Bands) -> Result<Outcome> {
    let input = cfg.rate_fit.input.clone().ok_or_else(|| Error::Config("rate-fit needs [rate_fit] input".into()))?;
    let curves = read_curves(&[input])?;
    let mut artifacts = Vec::new();
    let mut w = create(out, "rate_fit.csv", &mut artifacts)?;
    writeln!(w, "scope,estimator,correction,slope,intercept,stability_ratio")?;
    for c in &curves {
        writeln!(w, "{},{},{},{},{},{}", c.scope, c.estimator, c.correction.name(), c.slope, c.intercept, c.stability_ratio())?;
    }
    w.flush()?;
    print_curve_table(&curves, bands);
    Ok(Outcome { artifacts, pass: curves.iter().all(|c| bands.accepts(c)) })
}

fn run_audit(cfg: &ExperimentConfig, out: &Path, bands: &Bands) -> Result<Outcome> {
    let sec = &cfg.audit;
    let est = cfg.estimator(sec.estimator)?;
    let r_n = sec.r_n.unwrap_or(match est {
        Estimator::Rho => 0.0,
        Estimator::B { .. } => (sec.n as f64).ln() / sec.n as f64,
    });
    let thetas = match sec.scope {
        Scope::Theta => vec![cfg.theta()?],
        Scope::Sup => cfg.param_box()?.grid,
    };
    let mut entries = Vec::new();
    let mut pass = true;
    for theta in thetas {
        let a = bemetrics::audit_conditions(&theta, sec.n, cfg.replications, cfg.master_seed, &est, r_n, sec.d)?;
        pass &= a.v3_freq <= bands.v3_max && a.v6_freq <= bands.v6_max;
        println!("{:<28} v3 = {:.4}  v6 = {:.4}", theta.id(), a.v3_freq, a.v6_freq);
        entries.push(ThetaEntry { theta_id: theta.id(), value: a });
    }
    let mut artifacts = Vec::new();
    write_json(out, "audit.json", &entries, &mut artifacts)?;
    Ok(Outcome { artifacts, pass })
}

/// Runs one command and writes `manifest.json`. Returns whether the verdict passed.
pub fn run(what: RunKind, config_path: &Path, threads: Option<usize>, out: Option<&Path>, seed: Option<u64>) -> Result<bool> {
    let text = fs::read(config_path).map_err(|e| Error::Io(format!("{}: {e}", config_path.display())))?;
    let mut cfg = ExperimentConfig::parse(&String::from_utf8_lossy(&text))?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.out_dir.clone());
    fs::create_dir_all(&out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let bands = cfg.bands;
    let outcome = pool.install(|| match what {
        RunKind::Simulate => run_simulate(&cfg, &out_dir),
        RunKind::Drift => run_drift(&cfg, &out_dir),
        RunKind::Theory => run_theory(&cfg, &out_dir),
        RunKind::Spectral => run_spectral(&cfg, &out_dir),
        RunKind::BeCurve => run_be_curve(&cfg, &out_dir, &bands),
        RunKind::RateFit => run_rate_fit(&cfg, &out_dir, &bands),
        RunKind::Audit => run_audit(&cfg, &out_dir, &bands),
    })?;
    let manifest = Manifest {
        command: what.name(),
        config_sha256: sha256_hex(&text),
        master_seed: cfg.master_seed,
        version: env!("CARGO_PKG_VERSION"),
        threads: pool.current_num_threads(),
        artifacts: outcome.artifacts,
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    write_json(&out_dir, "manifest.json", &manifest, &mut Vec::new())?;
    Ok(outcome.pass)
}

pub fn report(paths: &[PathBuf], config: Option<&Path>) -> Result<bool> {
    let bands = match config {
        Some(p) => ExperimentConfig::load(p)?.bands,
        None => Bands::default(),
    };
    let curves = read_curves(paths)?;
    print_curve_table(&curves, &bands);
    Ok(curves.iter().all(|c| bands.accepts(c)))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run { what, config, threads, out, seed } => run(*what, config, *threads, out.as_deref(), *seed),
        Command::Report { paths, config } => report(paths, config.as_deref()),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERDICT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
