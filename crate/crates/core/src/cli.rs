//! Command line interface.
//!
//! Exit codes: 0 for a certified verdict or a passing suite, 2 for an
//! inconclusive verdict, 1 for errors and failing suites.
//!
//! `sweep` reads a flat key/value config, one key per line, alternatives
//! separated by `|` (specs may contain commas), `#` starts a comment:
//!
//! ```text
//! p = 1.5 | 2 | 3
//! r = 1 | 2
//! alpha = 1
//! weight = unit | poly:2
//! measure = atoms:demo.csv | lebesgue
//! window = 12
//! step = 0.05
//! radius = 16
//! ```
//!
//! Cases enumerate weight, measure, alpha, p, r (outermost first) and are
//! numbered from 0 in that order.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::fock::kernel_norm;
use crate::grammar::{parse_measure, parse_weight, MeasureContext};
use crate::lattice::GridSpec;
use crate::measures::{AffineSymbol, PolynomialSymbol};
use crate::operators::{
    classify_composition, classify_volterra, reduce_differentiation, CompositionSymbol,
    OperatorVerdict,
};
use crate::oracle::{g12, measure_bands, run_suite};
use crate::summing::{Classification, EmbeddingField, SummingVerdict};
use crate::weights::{apr_constant, Membership};

pub const CSV_HEADER: &str =
    "case_id,p,r,alpha,regime,s,lattice_norm,integral_norm,pi_low,pi_high,classification";

#[derive(Debug, Parser)]
#[command(
    name = "fock-summing",
    version,
    about = "r-summing Carleson embeddings on weighted Fock spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    /// Window half-width n_max: cells with max(|j|,|k|) <= n_max.
    #[arg(long, default_value_t = 12)]
    window: i64,
    /// Quadrature step.
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Truncation radius of plane integrals.
    #[arg(long, default_value_t = 16.0)]
    radius: f64,
}

impl GridArgs {
    fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.step, self.radius, self.window)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summing verdict for F^p_{alpha,w} -> L^p_alpha(mu).
    ClassifyEmbedding {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value = "unit")]
        weight: String,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Restricted A_p constant of a weight.
    AprConstant {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        weight: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Kernel norm ||K_u||^p by quadrature and by the disk-mass proxy.
    KernelNorm {
        /// Point u as RE or RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value = "unit")]
        weight: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Composition operator with symbol a z + b (or a polynomial symbol).
    ClassifyComposition {
        /// Coefficient a as RE or RE,IM.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        a: String,
        /// Coefficient b as RE or RE,IM.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        b: String,
        /// Real polynomial symbol c0,c1,...; overrides --a/--b.
        #[arg(long, allow_hyphen_values = true)]
        symbol: Option<String>,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Volterra operator J_g with a real polynomial g.
    ClassifyVolterra {
        /// Coefficients c0,c1,... of g.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Differentiation (k > 0) or integration (k < 0) into L^p_alpha(mu).
    ClassifyDifferentiation {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value = "unit")]
        weight: String,
        #[arg(long)]
        measure: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run a verification suite against the pinned calibration bands.
    Verify {
        /// lattice-integral, bridge, hs, berezin, diag, fock or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Parameter sweep from a config file, written as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output path; standard output when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-measure the calibration bands and print a calibration file.
    Calibrate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let f = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| FockError::Parse(format!("expected a number in {s:?}")))
    };
    match parts[..] {
        [re] => Ok(Complex64::new(f(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(f(re)?, f(im)?)),
        _ => Err(FockError::Parse(format!("expected RE or RE,IM, got {s:?}"))),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| FockError::Parse(format!("expected numbers, got {s:?}")))
        })
        .collect()
}

fn classification_exit(c: Classification) -> i32 {
    match c {
        Classification::Inconclusive => 2,
        _ => 0,
    }
}

fn verdict_exit(v: OperatorVerdict) -> i32 {
    match v {
        OperatorVerdict::Inconclusive => 2,
        _ => 0,
    }
}

/// One CSV data row (no trailing newline).
pub fn csv_row(case_id: usize, v: &SummingVerdict) -> String {
    [
        case_id.to_string(),
        g12(v.p),
        g12(v.r),
        g12(v.alpha),
        v.regime.to_string(),
        g12(v.s),
        g12(v.lattice_norm),
        g12(v.integral_norm),
        g12(v.pi_r_low),
        g12(v.pi_r_high),
        v.classification.to_string(),
    ]
    .join(",")
}

pub fn render_csv(rows: &[(usize, SummingVerdict)]) -> String {
    let mut rows: Vec<&(usize, SummingVerdict)> = rows.iter().collect();
    rows.sort_by_key(|(id, _)| *id);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (id, v) in rows {
        out.push_str(&csv_row(*id, v));
        out.push('\n');
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| FockError::Io(format!("{}: {e}", path.display())))
}

fn describe(v: &SummingVerdict, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "regime          {}", v.regime)?;
    writeln!(out, "s               {}", g12(v.s))?;
    writeln!(out, "window          n_max = {}", v.window.n_max)?;
    writeln!(out, "lattice_norm    {}", g12(v.lattice_norm))?;
    writeln!(out, "integral_norm   {}", g12(v.integral_norm))?;
    writeln!(
        out,
        "pi_r            [{}, {}]",
        g12(v.pi_r_low),
        g12(v.pi_r_high)
    )?;
    let growth: Vec<String> = v
        .growth
        .iter()
        .map(|(n, s)| format!("{n}:{}", g12(*s)))
        .collect();
    writeln!(out, "growth          {}", growth.join(" "))?;
    match &v.tail_certificate {
        Some(t) => writeln!(out, "tail            <= {} ({})", g12(t.bound), t.source)?,
        None => writeln!(out, "tail            none")?,
    }
    writeln!(out, "classification  {}", v.classification)
}

/// Parsed sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p: Vec<f64>,
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub weight: Vec<String>,
    pub measure: Vec<String>,
    pub grid: GridSpec,
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let mut p = None;
    let mut r = None;
    let mut alpha = vec![1.0];
    let mut weight = vec!["unit".to_string()];
    let mut measure = None;
    let (mut window, mut step, mut radius) = (12i64, 0.05f64, 16.0f64);
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |m: &str| FockError::Parse(format!("sweep config line {}: {m}", no + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad("expected KEY = VALUE"))?;
        let values: Vec<String> = value.split('|').map(|v| v.trim().to_string()).collect();
        if values.iter().any(|v| v.is_empty()) {
            return Err(bad("empty value"));
        }
        let reals = || -> Result<Vec<f64>> {
            values
                .iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| bad(&format!("{v:?} is not a number")))
                })
                .collect()
        };
        let single = || -> Result<f64> {
            match reals()?[..] {
                [x] => Ok(x),
                _ => Err(bad("expected a single value")),
            }
        };
        match key.trim() {
            "p" => p = Some(reals()?),
            "r" => r = Some(reals()?),
            "alpha" => alpha = reals()?,
            "weight" => weight = values,
            "measure" => measure = Some(values),
            "window" => {
                let w = single()?;
                if w.fract() != 0.0 {
                    return Err(bad("window must be an integer"));
                }
                window = w as i64;
            }
            "step" => step = single()?,
            "radius" => radius = single()?,
            other => return Err(bad(&format!("unknown key {other:?}"))),
        }
    }
    fn need<T>(v: Option<T>, k: &str) -> Result<T> {
        v.ok_or_else(|| FockError::Parse(format!("sweep config: missing key {k:?}")))
    }
    Ok(SweepConfig {
        p: need(p, "p")?,
        r: need(r, "r")?,
        alpha,
        weight,
        measure: need(measure, "measure")?,
        grid: GridSpec::new(step, radius, window)?,
    })
}

/// Every case of the sweep, numbered in enumeration order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<(usize, SummingVerdict)>> {
    let mut rows = Vec::new();
    let mut id = 0;
    for wspec in &cfg.weight {
        let w = parse_weight(wspec, &cfg.grid)?;
        for mspec in &cfg.measure {
            for &alpha in &cfg.alpha {
                for &p in &cfg.p {
                    let mu = parse_measure(mspec, MeasureContext { p, alpha })?;
                    let field = EmbeddingField::build(&w, &mu, &cfg.grid)?;
                    for &r in &cfg.r {
                        rows.push((id, field.verdict(p, r, alpha)?));
                        id += 1;
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::ClassifyEmbedding {
            p,
            r,
            alpha,
            weight,
            measure,
            seed: _,
            csv,
            grid,
        } => {
            let grid = grid.grid()?;
            let w = parse_weight(&weight, &grid)?;
            let mu = parse_measure(&measure, MeasureContext { p, alpha })?;
            let v = EmbeddingField::build(&w, &mu, &grid)?.verdict(p, r, alpha)?;
            writeln!(out, "weight          {}", w.label())?;
            writeln!(out, "measure         {}", mu.label())?;
            describe(&v, out)?;
            let code = classification_exit(v.classification);
            if let Some(path) = csv {
                write_text(&path, &render_csv(&[(0, v)]))?;
            }
            Ok(code)
        }
        Command::AprConstant { p, t, weight, grid } => {
            let grid = grid.grid()?;
            let w = parse_weight(&weight, &grid)?;
            match apr_constant(&w, p, t, &grid) {
                Ok(rep) => {
                    writeln!(out, "weight      {}", w.label())?;
                    writeln!(out, "constant    {}", g12(rep.value))?;
                    writeln!(
                        out,
                        "argmax      ({}, {})",
                        g12(rep.argmax.re),
                        g12(rep.argmax.im)
                    )?;
                    let trace: Vec<String> = rep
                        .trace
                        .iter()
                        .map(|(n, v)| format!("{n}:{}", g12(*v)))
                        .collect();
                    writeln!(out, "trace       {}", trace.join(" "))?;
                    let m = match rep.membership {
                        Membership::Stable => "stable",
                        Membership::Divergent => "divergent",
                        Membership::Inconclusive => "inconclusive",
                    };
                    writeln!(out, "membership  {m}")?;
                    Ok(if rep.membership == Membership::Inconclusive {
                        2
                    } else {
                        0
                    })
                }
                Err(FockError::DivergentConstant { trace }) => {
                    let t: Vec<String> = trace.iter().map(|v| g12(*v)).collect();
                    writeln!(out, "weight      {}", w.label())?;
                    writeln!(out, "trace       {}", t.join(" "))?;
                    writeln!(out, "membership  divergent")?;
                    Ok(0)
                }
                Err(e) => Err(e),
            }
        }
        Command::KernelNorm {
            u,
            p,
            alpha,
            weight,
            grid,
        } => {
            let grid = grid.grid()?;
            let w = parse_weight(&weight, &grid)?;
            let u = parse_complex(&u)?;
            let k = kernel_norm(u, p, alpha, &w, &grid)?;
            writeln!(out, "log_direct  {}", g12(k.log_direct))?;
            writeln!(out, "log_proxy   {}", g12(k.log_proxy))?;
            writeln!(out, "ratio       {}", g12(k.ratio()))?;
            Ok(0)
        }
        Command::ClassifyComposition {
            a,
            b,
            symbol,
            p,
            r,
            alpha,
            grid,
        } => {
            let grid = grid.grid()?;
            let sym = match symbol {
                Some(s) => {
                    CompositionSymbol::Polynomial(PolynomialSymbol::from_real(&parse_reals(&s)?))
                }
                None => CompositionSymbol::Affine(AffineSymbol::new(
                    parse_complex(&a)?,
                    parse_complex(&b)?,
                )),
            };
            let rep = classify_composition(&sym, p, r, alpha, &grid)?;
            writeln!(out, "verdict     {}", rep.verdict)?;
            writeln!(out, "reason      {}", rep.reason)?;
            if let Some(v) = &rep.cross_check {
                writeln!(out, "numeric     {}", v.classification)?;
            }
            writeln!(out, "agreement   {:?}", rep.agreement)?;
            Ok(verdict_exit(rep.verdict))
        }
        Command::ClassifyVolterra {
            g,
            p,
            r,
            alpha,
            grid,
        } => {
            let grid = grid.grid()?;
            let rep = classify_volterra(
                &PolynomialSymbol::from_real(&parse_reals(&g)?),
                p,
                r,
                alpha,
                &grid,
            )?;
            writeln!(out, "verdict     {}", rep.verdict)?;
            writeln!(out, "reason      {}", rep.reason)?;
            if let Some(v) = &rep.cross_check {
                writeln!(out, "numeric     {}", v.classification)?;
            }
            writeln!(out, "agreement   {:?}", rep.agreement)?;
            Ok(verdict_exit(rep.verdict))
        }
        Command::ClassifyDifferentiation {
            k,
            p,
            r,
            alpha,
            weight,
            measure,
            grid,
        } => {
            let grid = grid.grid()?;
            let w = parse_weight(&weight, &grid)?;
            let mu = parse_measure(&measure, MeasureContext { p, alpha })?;
            let rep = reduce_differentiation(k, p, r, alpha, &w, &mu, &grid)?;
            writeln!(out, "verdict     {}", rep.verdict)?;
            writeln!(out, "reason      {}", rep.reason)?;
            if let Some(v) = &rep.embedding {
                describe(v, out)?;
            }
            Ok(verdict_exit(rep.verdict))
        }
        Command::Verify { suite, seed } => {
            let reports = run_suite(&suite, seed)?;
            let mut pass = true;
            for r in &reports {
                write!(out, "{}", r.render())?;
                pass &= r.pass;
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::Sweep { config, csv } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| FockError::Io(format!("{}: {e}", config.display())))?;
            let rows = run_sweep(&parse_sweep_config(&text)?)?;
            let body = render_csv(&rows);
            match csv {
                Some(path) => write_text(&path, &body)?,
                None => write!(out, "{body}")?,
            }
            Ok(
                if rows
                    .iter()
                    .any(|(_, v)| v.classification == Classification::Inconclusive)
                {
                    2
                } else {
                    0
                },
            )
        }
        Command::Calibrate { seed } => {
            write!(out, "{}", measure_bands(seed)?)?;
            Ok(0)
        }
    }
}

/// Run with explicit arguments (including the program name) and streams.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["fock-summing"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn parse_helpers() {
        assert_eq!(parse_complex("1").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("0.5,-2").unwrap(), Complex64::new(0.5, -2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert_eq!(parse_reals("1, 2,3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn bad_arguments_exit_one() {
        let (code, _, err) = run_str(&["classify-embedding", "--p", "x"]);
        assert_eq!(code, 1);
        assert!(!err.is_empty());
        let (code, _, err) = run_str(&[
            "classify-embedding",
            "--p",
            "2",
            "--r",
            "2",
            "--measure",
            "nope",
            "--window",
            "2",
            "--radius",
            "5",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("unknown measure"));
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("classify-embedding"));
    }

    #[test]
    fn sweep_config_grammar() {
        let cfg = parse_sweep_config("# demo\np = 1.5 | 2\nr = 1\nmeasure = atom:0,0,1 | sum:zero;lebesgue\nweight = product:unit,poly:1\nwindow = 4\nradius=8\n").unwrap();
        assert_eq!(cfg.p, vec![1.5, 2.0]);
        assert_eq!(
            cfg.measure,
            vec!["atom:0,0,1".to_string(), "sum:zero;lebesgue".to_string()]
        );
        assert_eq!(cfg.weight, vec!["product:unit,poly:1".to_string()]);
        assert_eq!(cfg.alpha, vec![1.0]);
        assert_eq!(cfg.grid.window.n_max, 4);
        assert!(parse_sweep_config("p = 2\nr = 1\n").is_err());
        assert!(parse_sweep_config("p = 2\nr = 1\nmeasure = zero\nbogus = 1\n").is_err());
        assert!(parse_sweep_config("p = 2 |\nr = 1\nmeasure = zero\n").is_err());
        assert!(parse_sweep_config("p = 2\nr = 1\nmeasure = zero\nwindow = 1 | 2\n").is_err());
    }

    #[test]
    fn composition_identity_is_not_summing() {
        let (code, out, _) = run_str(&[
            "classify-composition",
            "--a",
            "1",
            "--b",
            "0",
            "--p",
            "2",
            "--r",
            "1",
            "--alpha",
            "1",
            "--window",
            "12",
            "--step",
            "0.1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("verdict     NOT_SUMMING"), "{out}");
    }
}
