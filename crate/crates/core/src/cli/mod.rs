//! The `jacobi` command line front end.
//!
//! Exit codes: `0` when an analysis completes (criteria verdicts are data,
//! whatever they say), `1` when `verify` finds a failing identity, `2` on
//! usage or configuration errors.

mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args as ClapArgs, Parser, Subcommand};
use serde::Serialize;

pub use config::{AnalysisConfig, CfracGrid, Format, Outputs, Tolerances};

use crate::cfrac::{convergence_scan, scan_csv};
use crate::coeffseq::{CoefficientSpec, SpecDocument};
use crate::conditions::{run_battery, Battery, Verdict};
use crate::multiindex::{self, Variant};
use crate::report::{csv_bytes, sci, write_atomic};
use crate::spectra::{interlacing, limit_points, spectrum_csv, spectrum_rows, Interlacing, SpectrumRow};
use crate::verify::{run_suites, VerifyReport};
use crate::{presets, Error, Result};

/// Default output directory when neither `--out` nor the config sets one.
pub const OUT_DIR_ENV: &str = "JACOBI_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "jacobi", version, about = "Self-adjointness criteria and spectral diagnostics for Jacobi operators")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Default, ClapArgs)]
pub struct Common {
    /// Analysis configuration document (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in operator; see `preset-list`.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Preset parameter, e.g. `--param alpha=17/4`. Repeatable.
    #[arg(long = "param", global = true, value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Output directory; falls back to the config, then `JACOBI_OUT_DIR`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub m_max: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Comma separated truncation orders, e.g. `25,50,100`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub truncations: Option<Vec<usize>>,
    /// Spectral window `lo,hi`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the criteria battery and write the verdicts.
    Criteria,
    /// Eigenvalues and last coordinates of each truncation, with interlacing.
    Spectrum,
    /// Candidate limit points of the truncation spectra.
    Limits,
    /// Continued fraction convergence scan over the configured grid.
    Cfrac {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Seeded cross-checks of the identities; exit 1 on any failure.
    Verify {
        /// Scales every suite tolerance; `0` fails every floating-point check.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Negative control: flip one off-diagonal sign per random truncation.
        #[arg(long)]
        corrupt_offdiag_sign: bool,
    },
    /// List built-in presets and their parameters.
    PresetList,
    /// Print a multi-index set in `(j_1,…|k_1,…)` notation.
    Multiindex {
        #[arg(long, value_parser = parse_variant, default_value = "I_plus")]
        variant: Variant,
        #[arg(long)]
        m: usize,
    },
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    match s {
        "I" => Ok(Variant::I),
        "I_hat" => Ok(Variant::IHat),
        "I_plus" => Ok(Variant::IPlus),
        "I_hat_plus" => Ok(Variant::IHatPlus),
        _ => Err(format!("unknown variant {s:?}; expected I, I_hat, I_plus or I_hat_plus")),
    }
}

/// Files written and text to show on stdout.
#[derive(Debug, Default)]
pub struct Completed {
    pub written: Vec<PathBuf>,
    pub stdout: String,
    /// Set by `verify` when a suite fails.
    pub verification_failed: bool,
}

impl Completed {
    pub fn exit_code(&self) -> ExitCode {
        if self.verification_failed {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        }
    }
}

/// Merges the config file, command line flags and environment into one
/// validated configuration.
pub fn resolve_config(common: &Common) -> Result<AnalysisConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            AnalysisConfig::from_json(&text)?
        }
        None => AnalysisConfig::default(),
    };
    if let Some(p) = &common.preset {
        cfg.preset = Some(p.clone());
        cfg.operator = None;
        cfg.params.clear();
    }
    for kv in &common.params {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| Error::Config(format!("--param expects KEY=VALUE, got {kv:?}")))?;
        cfg.params.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(m) = common.m_max {
        cfg.m_max = m;
    }
    if let Some(s) = common.seed {
        cfg.verify.seed = s;
    }
    if let Some(f) = common.format {
        cfg.outputs.format = f;
    }
    if let Some(t) = &common.truncations {
        cfg.truncations = t.clone();
    }
    if let Some(w) = &common.window {
        let [lo, hi] = w[..] else {
            return Err(Error::Config(format!("--window expects lo,hi, got {w:?}")));
        };
        cfg.window = (lo, hi);
    }
    if let Some(out) = &common.out {
        cfg.outputs.dir = Some(out.clone());
    } else if cfg.outputs.dir.is_none() {
        cfg.outputs.dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cfg: &AnalysisConfig) -> PathBuf {
    cfg.outputs.dir.clone().unwrap_or_else(|| PathBuf::from("jacobi-out"))
}

struct Writer {
    dir: PathBuf,
    done: Completed,
}

impl Writer {
    fn new(cfg: &AnalysisConfig) -> Self {
        Self { dir: out_dir(cfg), done: Completed::default() }
    }

    fn bytes(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        write_atomic(&path, contents)?;
        self.done.written.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        self.bytes(name, &text)
    }
}

/// The document written by `criteria`.
#[derive(Debug, Serialize)]
pub struct CriteriaReport<'a> {
    pub operator: SpecDocument,
    pub m_max: usize,
    #[serde(flatten)]
    pub battery: &'a Battery,
}

/// One line per verdict: criterion, depth, outcome, mode and exponent.
pub fn verdict_table(verdicts: &[Verdict]) -> String {
    let mut s = format!("{:<6} {:>3}  {:<12} {:<8} {}\n", "crit", "m", "outcome", "mode", "exponent");
    for v in verdicts {
        let m = v.m.map(|m| m.to_string()).unwrap_or_else(|| "-".into());
        let e = v.evidence.exponent.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<6} {:>3}  {:<12} {:<8} {}",
            v.criterion.id(),
            m,
            format!("{:?}", v.outcome),
            format!("{:?}", v.mode),
            e
        );
    }
    s
}

pub fn cmd_criteria(cfg: &AnalysisConfig) -> Result<Completed> {
    let spec = cfg.spec()?;
    let battery = run_battery(&spec, cfg.m_max, &cfg.numeric_range)?;
    let mut w = Writer::new(cfg);
    let table = verdict_table(&battery.verdicts);
    let witnesses: Vec<String> = battery
        .witnesses
        .iter()
        .map(|x| match x.m {
            Some(m) => format!("{}(m={m})", x.criterion.id()),
            None => x.criterion.id().to_string(),
        })
        .collect();
    let summary = format!("conclusion: {:?}  witnesses: [{}]\n{table}", battery.conclusion, witnesses.join(", "));
    if cfg.outputs.format.json() {
        w.json("criteria.json", &CriteriaReport { operator: spec.to_document(), m_max: cfg.m_max, battery: &battery })?;
    }
    if cfg.outputs.format.csv() {
        let csv = csv_bytes(
            &["criterion", "m", "outcome", "mode", "exponent"],
            battery.verdicts.iter().map(|v| {
                vec![
                    v.criterion.id().to_string(),
                    v.m.map(|m| m.to_string()).unwrap_or_default(),
                    format!("{:?}", v.outcome),
                    format!("{:?}", v.mode),
                    v.evidence.exponent.map(|e| e.to_string()).unwrap_or_default(),
                ]
            }),
        )?;
        w.bytes("criteria.csv", &csv)?;
    }
    w.bytes("criteria.txt", summary.as_bytes())?;
    w.done.stdout = summary;
    Ok(w.done)
}

#[derive(Debug, Serialize)]
struct SpectrumReport {
    window: (f64, f64),
    interlacing: Vec<Interlacing>,
    rows: Vec<SpectrumRow>,
}

pub fn cmd_spectrum(cfg: &AnalysisConfig) -> Result<Completed> {
    use rayon::prelude::*;
    let spec = cfg.spec()?;
    let eig_tol = cfg.tolerances.eig_tol;
    let per_n: Vec<(Vec<SpectrumRow>, Interlacing)> = cfg
        .truncations
        .par_iter()
        .map(|&n| Ok((spectrum_rows(&spec, n, cfg.window, eig_tol)?, interlacing(&spec, n, eig_tol)?)))
        .collect::<Result<_>>()?;
    let (rows, interlacing): (Vec<Vec<SpectrumRow>>, Vec<Interlacing>) = per_n.into_iter().unzip();
    let rows: Vec<SpectrumRow> = rows.into_iter().flatten().collect();
    let mut out = String::new();
    for i in &interlacing {
        let count = rows.iter().filter(|r| r.n == i.n).count();
        let _ = writeln!(
            out,
            "N = {:>6}: {count} eigenvalues in window, interlacing with N+1: {} ({} resolved, {} certified)",
            i.n,
            i.holds(),
            i.resolved,
            i.certified
        );
    }
    let mut w = Writer::new(cfg);
    if cfg.outputs.format.csv() {
        w.bytes("spectrum.csv", &spectrum_csv(&rows)?)?;
    }
    if cfg.outputs.format.json() {
        w.json("spectrum.json", &SpectrumReport { window: cfg.window, interlacing, rows })?;
    }
    w.done.stdout = out;
    Ok(w.done)
}

pub fn cmd_limits(cfg: &AnalysisConfig) -> Result<Completed> {
    let spec = cfg.spec()?;
    let report = limit_points(&spec, &cfg.truncations, cfg.window, cfg.tolerances.cluster_tol, cfg.tolerances.eig_tol)?;
    let mut out = format!(
        "{} candidate limit points in [{}, {}]\n",
        report.candidates.len(),
        sci(cfg.window.0),
        sci(cfg.window.1)
    );
    for c in report.candidates.iter().take(20) {
        let first = c.gencond_track.first().map_or(f64::NAN, |p| p.log10_a_n_delta_n);
        let last = c.gencond_track.last().map_or(f64::NAN, |p| p.log10_a_n_delta_n);
        let _ = writeln!(
            out,
            "  {}  spread {}  log10 a_N|delta_N|: {first:.3} -> {last:.3}",
            sci(c.location),
            sci(c.spread)
        );
    }
    let mut w = Writer::new(cfg);
    if cfg.outputs.format.json() {
        w.json("limits.json", &report)?;
    }
    if cfg.outputs.format.csv() {
        let csv = csv_bytes(
            &["candidate", "location", "N", "lambda", "a_N_delta_N", "log10_a_N_delta_N"],
            report.candidates.iter().enumerate().flat_map(|(i, c)| {
                c.gencond_track.iter().map(move |p| {
                    vec![
                        (i + 1).to_string(),
                        sci(c.location),
                        p.n.to_string(),
                        sci(p.lambda),
                        sci(p.a_n_delta_n),
                        sci(p.log10_a_n_delta_n),
                    ]
                })
            }),
        )?;
        w.bytes("limits.csv", &csv)?;
    }
    w.done.stdout = out;
    Ok(w.done)
}

pub fn cmd_cfrac(cfg: &AnalysisConfig) -> Result<Completed> {
    let spec = cfg.spec()?;
    let grid = cfg.cfrac.points();
    let scan = convergence_scan(&spec, &grid, cfg.cfrac.n_max, cfg.tolerances.cf_tail_tol, cfg.tolerances.eig_tol)?;
    let mut out = String::new();
    for e in &scan {
        let _ = writeln!(
            out,
            "lambda = {}{:+}i: converged {} tail deviation {} pole suspect {}",
            sci(e.lambda.re),
            e.lambda.im,
            e.converged,
            e.tail_deviation.map_or("-".into(), sci),
            e.pole_suspect
        );
    }
    let mut w = Writer::new(cfg);
    if cfg.outputs.format.json() {
        w.json("cfrac.json", &scan)?;
    }
    if cfg.outputs.format.csv() {
        w.bytes("cfrac.csv", &scan_csv(&scan)?)?;
    }
    w.done.stdout = out;
    Ok(w.done)
}

pub fn verify_log(report: &VerifyReport) -> String {
    let mut s = String::new();
    for r in &report.suites {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            s,
            "{status} {:<24} checked {:>6} skipped {:>4} max deviation {}",
            r.name,
            r.checked,
            r.skipped,
            sci(r.max_deviation)
        );
        for f in &r.failures {
            let _ = writeln!(s, "     {f}");
        }
    }
    s
}

pub fn cmd_verify(cfg: &AnalysisConfig) -> Result<Completed> {
    let report = run_suites(&cfg.verify);
    let mut w = Writer::new(cfg);
    w.json("verify.json", &report)?;
    w.done.stdout = verify_log(&report);
    w.done.verification_failed = !report.passed;
    Ok(w.done)
}

pub fn preset_list() -> String {
    let mut s = String::new();
    for p in presets::PRESETS {
        let params: Vec<String> = p.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "{:<10} {:<28} {}", p.name, params.join(" "), p.summary);
    }
    s
}

pub fn multiindex_listing(variant: Variant, m: usize) -> Result<String> {
    let mut s = String::new();
    for p in multiindex::generate(variant, m)? {
        let _ = writeln!(s, "{p}");
    }
    Ok(s)
}

/// Runs one parsed invocation.
pub fn run(args: &Args) -> Result<Completed> {
    if let Some(n) = args.common.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &args.command {
        Command::PresetList => Ok(Completed { stdout: preset_list(), ..Completed::default() }),
        Command::Multiindex { variant, m } => {
            Ok(Completed { stdout: multiindex_listing(*variant, *m)?, ..Completed::default() })
        }
        Command::Verify { tolerance, corrupt_offdiag_sign } => {
            let mut cfg = resolve_config(&args.common)?;
            if let Some(t) = tolerance {
                cfg.verify.tolerance = *t;
            }
            cfg.verify.corrupt_offdiag_sign |= corrupt_offdiag_sign;
            cfg.validate()?;
            cmd_verify(&cfg)
        }
        Command::Criteria => cmd_criteria(&resolve_config(&args.common)?),
        Command::Spectrum => cmd_spectrum(&resolve_config(&args.common)?),
        Command::Limits => cmd_limits(&resolve_config(&args.common)?),
        Command::Cfrac { n_max } => {
            let mut cfg = resolve_config(&args.common)?;
            if let Some(n) = n_max {
                cfg.cfrac.n_max = *n;
            }
            cfg.validate()?;
            cmd_cfrac(&cfg)
        }
    }
}

/// Entry point of the `jacobi` binary.
pub fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(done) => {
            print!("{}", done.stdout);
            for p in &done.written {
                eprintln!("wrote {}", p.display());
            }
            done.exit_code()
        }
        Err(e) => {
            eprintln!("jacobi: {e}");
            ExitCode::from(2)
        }
    }
}

/// `key=value` pairs as preset parameters.
pub fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, crate::Exponent>> {
    pairs
        .iter()
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got {kv:?}")))?;
            Ok((k.trim().to_string(), presets::parse_rational(v)?))
        })
        .collect()
}

/// Builds the operator for a preset invocation such as `ex-B1 alpha=2`.
pub fn preset_spec(name: &str, pairs: &[String]) -> Result<CoefficientSpec> {
    presets::build(name, &parse_params(pairs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("jacobi").chain(list.iter().copied())).unwrap()
    }

    #[test]
    fn criteria_on_a_preset_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let done =
            run(&args(&["criteria", "--preset", "ex-B1", "--param", "alpha=2", "--m-max", "4", "--out", out])).unwrap();
        assert!(done.stdout.contains("SelfAdjoint"));
        assert!(done.stdout.contains("B_m(m=3)"));
        let json: serde_json::Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("criteria.json")).unwrap()).unwrap();
        assert_eq!(json["conclusion"], "SELF_ADJOINT");
        assert!(dir.path().join("criteria.csv").exists());
        assert_eq!(done.exit_code(), ExitCode::SUCCESS);
    }

    #[test]
    fn bad_config_is_an_error() {
        assert!(run(&args(&["criteria"])).is_err());
        assert!(run(&args(&["criteria", "--preset", "nope"])).is_err());
        assert!(run(&args(&["criteria", "--preset", "ex-B1", "--param", "beta=2"])).is_err());
        assert!(run(&args(&["spectrum", "--preset", "free", "--truncations", "5,3"])).is_err());
    }

    #[test]
    fn spectrum_single_row_and_free_values() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        run(&args(&["spectrum", "--preset", "free", "--truncations", "1", "--format", "csv", "--out", out])).unwrap();
        let text = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        assert_eq!(text.lines().count(), 2);
        run(&args(&["spectrum", "--preset", "free", "--truncations", "10", "--window", "-3,3", "--out", out])).unwrap();
        let text = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        let mut lambdas: Vec<f64> =
            text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
        lambdas.sort_by(f64::total_cmp);
        for (k, l) in lambdas.iter().enumerate() {
            let exact = 2.0 * (std::f64::consts::PI * (10 - k) as f64 / 11.0).cos();
            assert!((l - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn verify_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"verify": {"truncations": 30, "specs": 3}}"#).unwrap();
        let cfg = cfg.to_str().unwrap();
        let ok = run(&args(&["verify", "--config", cfg, "--out", out])).unwrap();
        assert_eq!(ok.exit_code(), ExitCode::SUCCESS, "{}", ok.stdout);
        let zero = run(&args(&["verify", "--config", cfg, "--tolerance", "0", "--out", out])).unwrap();
        assert_eq!(zero.exit_code(), ExitCode::from(1));
        let bad = run(&args(&["verify", "--config", cfg, "--corrupt-offdiag-sign", "--out", out])).unwrap();
        assert_eq!(bad.exit_code(), ExitCode::from(1));
        assert!(bad.stdout.contains("FAIL delta_bound"));
    }

    #[test]
    fn listings() {
        assert!(preset_list().contains("ex-B-comp"));
        let s = run(&args(&["multiindex", "--m", "2"])).unwrap().stdout;
        assert_eq!(s, "(0,1|1,1)\n(0,1|1,2)\n");
    }
}
