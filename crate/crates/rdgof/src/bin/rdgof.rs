//! Command-line front end: goodness-of-fit tests against the uniform, the
//! standard normal and the circular uniform, a rate-distortion solver, and
//! Monte Carlo calibration, power and diagnostics utilities.
//!
//! Exit codes: 0 the null is accepted (or the command succeeded), 1 the null
//! is rejected, 2 usage or data error, 3 numeric failure.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use std::fs;
use std::io::Read;
use std::process::ExitCode;

use rdgof::calibration::{
    AlternativeModel, NullModel, StatisticKind, calibrate, gaussianity_diagnostics, p_value,
    power_estimate, simulate_null,
};
use rdgof::kernels::{
    alpha_from_hamming_distortion, gaussian_alpha_from_distortion, vonmises_kappa_from_distortion,
};
use rdgof::rd_solver::{SolverConfig, blahut_arimoto, solve_for_distortion};
use rdgof::report::{Decision, TestReport};
use rdgof::statistics::QuadratureConfig;
use rdgof::{
    DiscreteDistribution, DistortionMatrix, DistortionSpec, EmpiricalSample, RdgofError, Result,
};

const BETA_CAP: f64 = 1e6;

#[derive(Parser)]
#[command(name = "rdgof", version, about = "Goodness-of-fit testing via smoothed divergences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a sample against a null model.
    Test {
        #[command(subcommand)]
        model: TestModel,
    },
    /// Solve a rate-distortion problem for a finite source.
    RdSolve(RdSolveArgs),
    /// Calibrate a critical value under a null model.
    Calibrate(CalibrateArgs),
    /// Estimate power against an alternative.
    Power(PowerArgs),
    /// Normality diagnostics of the null distribution of a statistic.
    Diagnose(DiagnoseArgs),
}

#[derive(Subcommand)]
enum TestModel {
    /// Uniform distribution on {0, …, l-1}; data are 0-based integers.
    Uniform {
        /// Alphabet size.
        #[arg(long)]
        l: usize,
        /// Mixing weight of the Hamming kernel, in [0, 1].
        #[arg(long, conflicts_with = "d0")]
        alpha: Option<f64>,
        #[command(flatten)]
        common: TestCommon,
    },
    /// Standard normal distribution; data are reals.
    Normal {
        /// Shrinkage factor of the Gaussian kernel, in [0, 1).
        #[arg(long, conflicts_with = "d0")]
        alpha: Option<f64>,
        #[command(flatten)]
        common: TestCommon,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Uniform distribution on the circle; data are angles in radians.
    Circular {
        /// Concentration of the von Mises kernel, nonnegative.
        #[arg(long, conflicts_with = "d0")]
        kappa: Option<f64>,
        /// Interpret input angles as degrees.
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        common: TestCommon,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

#[derive(Args)]
struct TestCommon {
    /// Input file, one observation per line; `-` reads stdin; `#` starts a
    /// comment.
    #[arg(long)]
    input: String,
    /// Target distortion, converted to the kernel parameter.
    #[arg(long)]
    d0: Option<f64>,
    /// Calibrate the critical value by Monte Carlo (on by default).
    #[arg(long, conflicts_with = "statistic_only")]
    calibrate: bool,
    /// Report the statistic only, with no calibration and no decision.
    #[arg(long)]
    statistic_only: bool,
    /// Monte Carlo replications for calibration.
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    sig: f64,
    /// Master seed; falls back to RDGOF_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct QuadArgs {
    /// Quadrature grid points.
    #[arg(long, default_value_t = 4096)]
    grid_points: usize,
    /// Per-component truncation radius in standard deviations.
    #[arg(long, default_value_t = 10.0)]
    truncation_sigmas: f64,
}

impl QuadArgs {
    fn build(&self) -> Result<QuadratureConfig> {
        QuadratureConfig::new(self.grid_points, self.truncation_sigmas)
    }
}

#[derive(Args)]
struct RdSolveArgs {
    /// Hamming distortion on an alphabet of this size.
    #[arg(long, conflicts_with = "matrix")]
    hamming: Option<usize>,
    /// Whitespace-separated distortion matrix file, one row per line.
    #[arg(long)]
    matrix: Option<String>,
    /// Source probabilities, comma separated; defaults to uniform.
    #[arg(long)]
    source: Option<String>,
    /// Slope of the rate-distortion trade-off (capped at 1e6, which stands
    /// in for the lossless endpoint).
    #[arg(long, conflicts_with = "d0")]
    beta: Option<f64>,
    /// Target distortion.
    #[arg(long)]
    d0: Option<f64>,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    stat: StatArgs,
    /// Sample size per replication.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    sig: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Include every null draw of the statistic in the output.
    #[arg(long)]
    emit_samples: bool,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    stat: StatArgs,
    /// Alternative: discrete:P1,P2,… | gaussian:MEAN:SD | vonmises:CENTER:KAPPA
    #[arg(long)]
    alt: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0.05)]
    sig: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<String>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    stat: StatArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<String>,
}

/// Null model plus kernel parameter, shared by the Monte Carlo subcommands.
#[derive(Args)]
struct StatArgs {
    /// Null model: uniform | normal | circular.
    #[arg(long)]
    model: String,
    /// Alphabet size (uniform model only).
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, conflicts_with = "d0")]
    alpha: Option<f64>,
    #[arg(long, conflicts_with = "d0")]
    kappa: Option<f64>,
    #[arg(long)]
    d0: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
}

fn seed_or_env(seed: Option<u64>) -> Result<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("RDGOF_SEED") {
        Ok(v) => v.parse().map_err(|_| {
            RdgofError::Incompatible(format!("RDGOF_SEED is not an unsigned integer: {v:?}"))
        }),
        Err(_) => Ok(0),
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| RdgofError::Incompatible(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path)
            .map_err(|e| RdgofError::Incompatible(format!("cannot read {path}: {e}")))
    }
}

/// Parses one value per line, ignoring blank lines and `#` comments, and
/// reports the 1-based line number on failure.
fn parse_lines<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<T>() {
            Ok(v) => out.push(v),
            Err(_) => {
                return Err(RdgofError::Incompatible(format!(
                    "line {}: cannot parse {line:?} as {what}",
                    lineno + 1
                )));
            }
        }
    }
    Ok(out)
}

fn parse_alternative(spec: &str) -> Result<AlternativeModel> {
    let bad = |msg: &str| RdgofError::Incompatible(format!("--alt {spec:?}: {msg}"));
    let mut parts = spec.splitn(2, ':');
    let family = parts.next().unwrap_or("");
    let rest = parts.next().ok_or_else(|| bad("missing parameters"))?;
    let floats = |s: &str, sep: char| -> Result<Vec<f64>> {
        s.split(sep)
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad("bad number")))
            .collect()
    };
    match family {
        "discrete" => {
            let probs = floats(rest, ',')?;
            Ok(AlternativeModel::Discrete(DiscreteDistribution::new(probs)?))
        }
        "gaussian" => {
            let p = floats(rest, ':')?;
            if p.len() != 2 || p[1] <= 0.0 {
                return Err(bad("expected gaussian:MEAN:SD with SD > 0"));
            }
            Ok(AlternativeModel::Gaussian {
                mean: p[0],
                std_dev: p[1],
            })
        }
        "vonmises" => {
            let p = floats(rest, ':')?;
            if p.len() != 2 || p[1] < 0.0 {
                return Err(bad("expected vonmises:CENTER:KAPPA with KAPPA >= 0"));
            }
            Ok(AlternativeModel::VonMises {
                center: p[0],
                kappa: p[1],
            })
        }
        _ => Err(bad("unknown family; use discrete, gaussian or vonmises")),
    }
}

impl StatArgs {
    fn build(&self) -> Result<(NullModel, StatisticKind)> {
        let quad = self.quad.build()?;
        match self.model.as_str() {
            "uniform" => {
                let l = self.l.ok_or_else(|| {
                    RdgofError::Incompatible("--l is required for the uniform model".into())
                })?;
                let alpha = match (self.alpha, self.d0) {
                    (Some(a), None) => a,
                    (None, Some(d0)) => alpha_from_hamming_distortion(d0, l)?,
                    _ => {
                        return Err(RdgofError::Incompatible(
                            "provide exactly one of --alpha and --d0".into(),
                        ));
                    }
                };
                Ok((
                    NullModel::UniformDiscrete { alphabet_size: l },
                    StatisticKind::HammingRd {
                        alpha,
                        alphabet_size: l,
                    },
                ))
            }
            "normal" => {
                let alpha = match (self.alpha, self.d0) {
                    (Some(a), None) => a,
                    (None, Some(d0)) => gaussian_alpha_from_distortion(d0)?,
                    _ => {
                        return Err(RdgofError::Incompatible(
                            "provide exactly one of --alpha and --d0".into(),
                        ));
                    }
                };
                Ok((
                    NullModel::StandardNormal,
                    StatisticKind::GaussianRd { alpha, quad },
                ))
            }
            "circular" => {
                let kappa = match (self.kappa, self.d0) {
                    (Some(k), None) => k,
                    (None, Some(d0)) => vonmises_kappa_from_distortion(d0)?,
                    _ => {
                        return Err(RdgofError::Incompatible(
                            "provide exactly one of --kappa and --d0".into(),
                        ));
                    }
                };
                Ok((
                    NullModel::UniformCircle,
                    StatisticKind::CircularRd { kappa, quad },
                ))
            }
            other => Err(RdgofError::Incompatible(format!(
                "unknown model {other:?}; use uniform, normal or circular"
            ))),
        }
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&str>) -> Result<()> {
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| RdgofError::Numeric(e.to_string()))?;
    println!("{json}");
    if let Some(path) = output {
        fs::write(path, format!("{json}\n"))
            .map_err(|e| RdgofError::Incompatible(format!("cannot write {path}: {e}")))?;
    }
    Ok(())
}

fn cmd_test(model: TestModel) -> Result<Decision> {
    let (null_model, statistic_kind, common, sample) = match model {
        TestModel::Uniform { l, alpha, common } => {
            let alpha = match (alpha, common.d0) {
                (Some(a), None) => a,
                (None, Some(d0)) => alpha_from_hamming_distortion(d0, l)?,
                _ => {
                    return Err(RdgofError::Incompatible(
                        "provide exactly one of --alpha and --d0".into(),
                    ));
                }
            };
            let labels = parse_lines::<usize>(&read_input(&common.input)?, "a 0-based integer")?;
            let sample = EmpiricalSample::categorical(labels)?;
            (
                NullModel::UniformDiscrete { alphabet_size: l },
                StatisticKind::HammingRd {
                    alpha,
                    alphabet_size: l,
                },
                common,
                sample,
            )
        }
        TestModel::Normal {
            alpha,
            common,
            quad,
        } => {
            let alpha = match (alpha, common.d0) {
                (Some(a), None) => a,
                (None, Some(d0)) => gaussian_alpha_from_distortion(d0)?,
                _ => {
                    return Err(RdgofError::Incompatible(
                        "provide exactly one of --alpha and --d0".into(),
                    ));
                }
            };
            if alpha >= 1.0 {
                return Err(RdgofError::Incompatible(
                    "alpha must be < 1 for the normal test".into(),
                ));
            }
            let values = parse_lines::<f64>(&read_input(&common.input)?, "a real number")?;
            let sample = EmpiricalSample::real(values)?;
            (
                NullModel::StandardNormal,
                StatisticKind::GaussianRd {
                    alpha,
                    quad: quad.build()?,
                },
                common,
                sample,
            )
        }
        TestModel::Circular {
            kappa,
            degrees,
            common,
            quad,
        } => {
            let kappa = match (kappa, common.d0) {
                (Some(k), None) => k,
                (None, Some(d0)) => vonmises_kappa_from_distortion(d0)?,
                _ => {
                    return Err(RdgofError::Incompatible(
                        "provide exactly one of --kappa and --d0".into(),
                    ));
                }
            };
            let mut angles = parse_lines::<f64>(&read_input(&common.input)?, "an angle")?;
            if degrees {
                for a in angles.iter_mut() {
                    *a = a.to_radians();
                }
            }
            let sample = EmpiricalSample::circular(angles)?;
            (
                NullModel::UniformCircle,
                StatisticKind::CircularRd {
                    kappa,
                    quad: quad.build()?,
                },
                common,
                sample,
            )
        }
    };

    let statistic = statistic_kind.evaluate(&sample)?;
    let seed = seed_or_env(common.seed)?;
    let run_calibration = !common.statistic_only;
    let (critical_value, pv, decision) = if run_calibration {
        let cal = calibrate(
            &null_model,
            &statistic_kind,
            sample.len(),
            common.reps,
            seed,
            common.sig,
        )?;
        let pv = p_value(statistic, &cal.null_samples);
        let decision = if statistic >= cal.critical_value {
            Decision::Reject
        } else {
            Decision::Accept
        };
        (Some(cal.critical_value), Some(pv), decision)
    } else {
        (None, None, Decision::Accept)
    };

    let report = TestReport {
        command: "test".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        model: null_model,
        statistic_kind,
        sample_size: sample.len(),
        statistic,
        significance: common.sig,
        replications: if run_calibration { common.reps } else { 0 },
        seed,
        critical_value,
        p_value: pv,
        decision,
    };
    println!("{}", report.to_json()?);
    if let Some(path) = &common.output {
        fs::write(path, format!("{}\n", report.to_json()?))
            .map_err(|e| RdgofError::Incompatible(format!("cannot write {path}: {e}")))?;
    }
    Ok(decision)
}

fn parse_matrix_file(path: &str) -> Result<DistortionMatrix> {
    let text = read_input(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    RdgofError::Incompatible(format!(
                        "line {}: cannot parse {t:?} as a number",
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first()
            && first.len() != row.len()
        {
            return Err(RdgofError::Incompatible(format!(
                "line {}: expected {} entries, found {}",
                lineno + 1,
                first.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(RdgofError::Empty("distortion matrix"));
    }
    let cols = rows[0].len();
    DistortionMatrix::new(rows.len(), cols, rows.concat())
}

fn cmd_rd_solve(args: RdSolveArgs) -> Result<()> {
    let (spec, l) = match (args.hamming, &args.matrix) {
        (Some(l), None) => (DistortionSpec::Hamming(l), l),
        (None, Some(path)) => {
            let m = parse_matrix_file(path)?;
            let l = m.rows();
            (DistortionSpec::Matrix(m), l)
        }
        _ => {
            return Err(RdgofError::Incompatible(
                "provide exactly one of --hamming and --matrix".into(),
            ));
        }
    };
    let source = match &args.source {
        None => DiscreteDistribution::uniform(l),
        Some(s) => {
            let probs: Vec<f64> = s
                .split(',')
                .map(|t| {
                    t.trim().parse::<f64>().map_err(|_| {
                        RdgofError::Incompatible(format!("--source: bad number {t:?}"))
                    })
                })
                .collect::<Result<_>>()?;
            DiscreteDistribution::new(probs)?
        }
    };
    let (channel, point) = match (args.beta, args.d0) {
        (Some(beta), None) => {
            let config = SolverConfig::new(beta.min(BETA_CAP));
            blahut_arimoto(&source, &spec, &config)?
        }
        (None, Some(d0)) => solve_for_distortion(&source, &spec, d0, &SolverConfig::new(1.0))?,
        _ => {
            return Err(RdgofError::Incompatible(
                "provide exactly one of --beta and --d0".into(),
            ));
        }
    };
    let rows: Vec<&[f64]> = (0..channel.rows()).map(|x| channel.row(x)).collect();
    let out = json!({
        "command": "rd-solve",
        "tool_version": env!("CARGO_PKG_VERSION"),
        "source": source.probs(),
        "rate": point.rate,
        "distortion": point.distortion,
        "beta": point.slope,
        "channel": rows,
    });
    emit(&out, args.output.as_deref())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    let (model, stat) = args.stat.build()?;
    let seed = seed_or_env(args.seed)?;
    let cal = calibrate(&model, &stat, args.n, args.reps, seed, args.sig)?;
    let mut out = json!({
        "command": "calibrate",
        "tool_version": env!("CARGO_PKG_VERSION"),
        "model": model,
        "statistic_kind": stat,
        "sample_size": args.n,
        "replications": cal.replications,
        "significance": cal.significance,
        "seed": cal.seed,
        "critical_value": cal.critical_value,
    });
    if args.emit_samples {
        out["null_samples"] = json!(cal.null_samples);
    }
    emit(&out, args.output.as_deref())
}

fn cmd_power(args: PowerArgs) -> Result<()> {
    let (model, stat) = args.stat.build()?;
    let alt = parse_alternative(&args.alt)?;
    let seed = seed_or_env(args.seed)?;
    let cal = calibrate(&model, &stat, args.n, args.reps, seed, args.sig)?;
    // An independent stream for the alternative draws.
    let pw = power_estimate(
        &stat,
        cal.critical_value,
        &alt,
        args.n,
        args.reps,
        seed ^ 0x9e37_79b9_7f4a_7c15,
    )?;
    let out = json!({
        "command": "power",
        "tool_version": env!("CARGO_PKG_VERSION"),
        "model": model,
        "statistic_kind": stat,
        "alternative": alt,
        "sample_size": args.n,
        "replications": args.reps,
        "significance": args.sig,
        "seed": seed,
        "critical_value": cal.critical_value,
        "power": pw.power,
        "std_error": pw.std_error,
    });
    emit(&out, args.output.as_deref())
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<()> {
    let (model, stat) = args.stat.build()?;
    let seed = seed_or_env(args.seed)?;
    let samples = simulate_null(&model, &stat, args.n, args.reps, seed)?;
    let diag = gaussianity_diagnostics(&samples)?;
    let out = json!({
        "command": "diagnose",
        "tool_version": env!("CARGO_PKG_VERSION"),
        "model": model,
        "statistic_kind": stat,
        "sample_size": args.n,
        "replications": args.reps,
        "seed": seed,
        "skewness": diag.skewness,
        "excess_kurtosis": diag.excess_kurtosis,
        "qq_correlation": diag.qq_correlation,
    });
    emit(&out, args.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test { model } => cmd_test(model).map(|d| d == Decision::Reject),
        Command::RdSolve(args) => cmd_rd_solve(args).map(|_| false),
        Command::Calibrate(args) => cmd_calibrate(args).map(|_| false),
        Command::Power(args) => cmd_power(args).map(|_| false),
        Command::Diagnose(args) => cmd_diagnose(args).map(|_| false),
    };
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
