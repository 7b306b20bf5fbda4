//! `uncertainty-lab`: eigenvalue sweeps, possibility-map boundaries,
//! inequality verification runs and constant estimates as CSV/JSON data.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use uncertainty_lab::homogeneous::{estimate_constant, OptParams, TrialFamily};
use uncertainty_lab::possibility::{map_slice, CoordinateSystem, MapModel};
use uncertainty_lab::prolate::{lambda0_sweep, MIN_N_QUAD};
use uncertainty_lab::signal::Grid;
use uncertainty_lab::suite::{run_suite, MarginRow, Suite, SuiteConfig, DEFAULT_MARGIN_FLOOR};
use uncertainty_lab::weights::WeightSpec;
use uncertainty_lab::Error;

use output::{Cell, Format};

const THREADS_ENV: &str = "UNCERTAINTY_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "uncertainty-lab", version, about = "Generalized uncertainty principle toolkit")]
struct Cli {
    /// Output format; tables default to csv, estimate-c to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(flatten)]
    numerics: Numerics,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Numerics {
    /// Samples in the signal grid.
    #[arg(long, global = true, default_value_t = 2048)]
    grid_n: usize,

    /// Half-width of the signal grid.
    #[arg(long, global = true, default_value_t = 12.0)]
    grid_xmax: f64,

    /// Gauss–Legendre nodes for the eigenvalue problem.
    #[arg(long, global = true, default_value_t = 64)]
    n_quad: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Top prolate eigenvalue λ₀(c) against its large-c asymptotic.
    Lambda0 {
        #[arg(long, allow_hyphen_values = true)]
        c_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        c_max: f64,
        #[arg(long, default_value_t = 60)]
        steps: usize,
    },
    /// Boundary curve of a possibility map.
    Map {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<f64>,
        /// Scale product c = ab.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        /// Exponent of the homogeneous weight.
        #[arg(long)]
        k: Option<u32>,
        /// Uncertainty constant of the homogeneous weight.
        #[arg(long = "C", allow_hyphen_values = true)]
        constant: Option<f64>,
        /// concentration, concentration2, spreading, spreading2 or spreading-power:m,n.
        #[arg(long)]
        coords: Option<String>,
        #[arg(long, default_value_t = 200)]
        n_pts: usize,
    },
    /// Checks the inequalities on a seeded random corpus.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative margin below which a row counts as a violation.
        #[arg(long, hide = true, default_value_t = DEFAULT_MARGIN_FLOOR, allow_hyphen_values = true)]
        margin_floor: f64,
    },
    /// Minimizes the homogeneous product functional over a trial family.
    EstimateC {
        #[arg(long)]
        k: u32,
        /// gaussian or hermiteN.
        #[arg(long, default_value = "gaussian")]
        family: String,
        /// Nelder–Mead iterations per restart.
        #[arg(long, default_value_t = 400)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        restarts: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelKind {
    Lp,
    Hpw,
    Homogeneous,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lp,
    #[value(name = "lp_weak", alias = "lp-weak")]
    LpWeak,
    Hpw,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Lp => vec![Suite::Lp],
            SuiteArg::LpWeak => vec![Suite::LpWeak],
            SuiteArg::Hpw => vec![Suite::Hpw],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

/// A failure with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Convergence { .. } | Error::TailWarning { .. } => 3,
            Error::NotSupported(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Finished output of a command plus any metadata to place beside it.
struct Rendered {
    body: String,
    sidecar: Option<String>,
    /// Exit code to report after a successful write.
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let rendered = match &cli.command {
        Command::Lambda0 { c_min, c_max, steps } => lambda0(&cli, *c_min, *c_max, *steps)?,
        Command::Map {
            model,
            lambda0,
            c,
            k,
            constant,
            coords,
            n_pts,
        } => {
            let model = map_model(*model, *lambda0, *c, *k, *constant)?;
            let coords = parse_coords(coords.as_deref(), &model)?;
            map(&cli, model, coords, *n_pts)?
        }
        Command::Verify {
            suite,
            n,
            seed,
            margin_floor,
        } => verify(&cli, *suite, *n, *seed, *margin_floor)?,
        Command::EstimateC {
            k,
            family,
            budget,
            seed,
            restarts,
        } => estimate(&cli, *k, family, *budget, *seed, *restarts)?,
    };
    emit(&cli, &rendered)?;
    Ok(rendered.code)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::invalid(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::invalid(e.to_string()))
}

fn emit(cli: &Cli, rendered: &Rendered) -> Result<(), Failure> {
    let io_failure = |e: std::io::Error| Failure {
        code: 1,
        message: e.to_string(),
    };
    match &cli.out {
        Some(path) => {
            let mut files = vec![(path.clone(), rendered.body.clone())];
            if let Some(meta) = &rendered.sidecar {
                files.push((output::sidecar_path(path), meta.clone()));
            }
            output::write_all(&files).map_err(io_failure)
        }
        None => output::write_stdout(&rendered.body).map_err(io_failure),
    }
}

fn grid(numerics: &Numerics) -> Result<Grid, Failure> {
    Ok(Grid::new(numerics.grid_n, numerics.grid_xmax)?)
}

fn check_n_quad(n_quad: usize) -> Result<(), Failure> {
    if n_quad < MIN_N_QUAD {
        return Err(Failure::invalid(format!("n-quad must be at least {MIN_N_QUAD}, got {n_quad}")));
    }
    Ok(())
}

fn lambda0(cli: &Cli, c_min: f64, c_max: f64, steps: usize) -> Result<Rendered, Failure> {
    check_n_quad(cli.numerics.n_quad)?;
    let rows = lambda0_sweep(c_min, c_max, steps, cli.numerics.n_quad)?;
    let body = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv(
            "lambda0",
            &["c", "lambda0", "lambda0_asymptotic", "relative_difference"],
            rows.iter().map(|r| {
                vec![
                    r.c.into(),
                    r.lambda0.into(),
                    r.lambda0_asymptotic.into(),
                    r.relative_difference.into(),
                ]
            }),
        ),
        Format::Json => output::json(&json!({
            "command": "lambda0",
            "version": output::SCHEMA_VERSION,
            "n_quad": cli.numerics.n_quad,
            "rows": rows,
        })),
    };
    Ok(Rendered {
        body,
        sidecar: None,
        code: 0,
    })
}

fn require(name: &str, value: Option<f64>) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::invalid(format!("--{name} is required for this model")))
}

fn map_model(
    kind: ModelKind,
    lambda0: Option<f64>,
    c: Option<f64>,
    k: Option<u32>,
    constant: Option<f64>,
) -> Result<MapModel, Failure> {
    Ok(match kind {
        ModelKind::Lp => MapModel::Lp {
            lambda0: require("lambda0", lambda0)?,
        },
        ModelKind::Hpw => MapModel::Hpw { c: require("c", c)? },
        ModelKind::Homogeneous => MapModel::Homogeneous {
            k: k.ok_or_else(|| Failure::invalid("--k is required for the homogeneous model"))?,
            constant: require("C", constant)?,
            c: require("c", c)?,
        },
    })
}

fn parse_coords(raw: Option<&str>, model: &MapModel) -> Result<CoordinateSystem, Failure> {
    let Some(raw) = raw else {
        return Ok(match model {
            MapModel::Lp { .. } => CoordinateSystem::ConcentrationSquared,
            _ => CoordinateSystem::Spreading,
        });
    };
    let canonical = match raw {
        "concentration2" | "concentration_squared" => "concentration-squared",
        "spreading2" | "spreading_squared" => "spreading-squared",
        other => other,
    };
    Ok(canonical.parse()?)
}

fn model_weights(model: &MapModel) -> WeightSpec {
    match model {
        MapModel::Lp { .. } => WeightSpec::LpIndicator,
        MapModel::Hpw { .. } => WeightSpec::Homogeneous(2),
        MapModel::Homogeneous { k, .. } => WeightSpec::Homogeneous(*k),
    }
}

fn model_parameters(model: &MapModel) -> serde_json::Value {
    match *model {
        MapModel::Lp { lambda0 } => json!({ "lambda0": lambda0 }),
        MapModel::Hpw { c } => json!({ "c": c }),
        MapModel::Homogeneous { k, constant, c } => json!({ "k": k, "C": constant, "c": c }),
    }
}

fn map(cli: &Cli, model: MapModel, coords: CoordinateSystem, n_pts: usize) -> Result<Rendered, Failure> {
    let w = model_weights(&model);
    let boundary = map_slice((&w, &w), model, coords, n_pts)?;
    let meta = json!({
        "coords": coords.to_string(),
        "model": model.name(),
        "parameter": model_parameters(&model),
        "closed_form": boundary.closed_form,
        "n_pts": boundary.points.len(),
    });
    Ok(match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => Rendered {
            body: output::csv(
                "map",
                &["x", "y"],
                boundary.points.iter().map(|&(x, y)| vec![x.into(), y.into()]),
            ),
            sidecar: Some(output::json(&meta)),
            code: 0,
        },
        Format::Json => {
            let mut obj = meta;
            obj["points"] = json!(boundary.points);
            Rendered {
                body: output::json(&obj),
                sidecar: None,
                code: 0,
            }
        }
    })
}

fn verify(cli: &Cli, suite: SuiteArg, n: usize, seed: u64, floor: f64) -> Result<Rendered, Failure> {
    if n == 0 {
        return Err(Failure::invalid("--n must be at least 1"));
    }
    if !floor.is_finite() {
        return Err(Failure::invalid("--margin-floor must be finite"));
    }
    check_n_quad(cli.numerics.n_quad)?;
    let cfg = SuiteConfig {
        n_signals: n,
        seed,
        grid: grid(&cli.numerics)?,
        n_quad: cli.numerics.n_quad,
    };
    let mut rows: Vec<MarginRow> = Vec::new();
    for s in suite.suites() {
        rows.extend(run_suite(s, &cfg)?);
    }
    let offenders: Vec<&MarginRow> = rows.iter().filter(|r| r.violates(floor)).collect();
    for r in &offenders {
        eprintln!(
            "violation: suite={} index={} kind={} relative_margin={:e}{}",
            r.suite,
            r.index,
            r.kind.name(),
            r.relative_margin,
            r.lambda0.map(|l| format!(" lambda0={l}")).unwrap_or_default()
        );
    }
    let body = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv(
            "verify",
            &[
                "suite",
                "index",
                "kind",
                "lambda0",
                "t",
                "omega",
                "lhs",
                "rhs",
                "margin",
                "relative_margin",
                "equality",
                "strong_within_sqrt2",
            ],
            rows.iter().map(|r| {
                vec![
                    Cell::Text(r.suite.to_string()),
                    Cell::Int(r.index as u64),
                    Cell::Text(r.kind.name().to_string()),
                    r.lambda0.into(),
                    r.t.into(),
                    r.omega.into(),
                    r.lhs.into(),
                    r.rhs.into(),
                    r.margin.into(),
                    r.relative_margin.into(),
                    r.equality.into(),
                    r.strong_within_sqrt2.into(),
                ]
            }),
        ),
        Format::Json => output::json(&VerifyReport {
            command: "verify",
            version: output::SCHEMA_VERSION,
            seed,
            n_signals: n,
            margin_floor: floor,
            violations: offenders.len(),
            rows: &rows,
        }),
    };
    if !offenders.is_empty() {
        eprintln!("{} of {} rows violate the margin floor {floor:e}", offenders.len(), rows.len());
    }
    Ok(Rendered {
        body,
        sidecar: None,
        code: if offenders.is_empty() { 0 } else { 5 },
    })
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    command: &'static str,
    version: u32,
    seed: u64,
    n_signals: usize,
    margin_floor: f64,
    violations: usize,
    rows: &'a [MarginRow],
}

fn estimate(
    cli: &Cli,
    k: u32,
    family: &str,
    budget: u64,
    seed: u64,
    restarts: usize,
) -> Result<Rendered, Failure> {
    let family: TrialFamily = family.parse()?;
    if budget == 0 {
        return Err(Failure::invalid("--budget must be at least 1"));
    }
    let opt = OptParams {
        grid: grid(&cli.numerics)?,
        max_iter: budget,
        restarts,
        seed,
        ..OptParams::default()
    };
    let est = estimate_constant(k, family, &opt)?;
    let body = match cli.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&est),
        Format::Csv => output::csv(
            "estimate-c",
            &["k", "family", "C_estimate", "iterations", "converged", "seed", "minimizer_params"],
            [vec![
                Cell::Int(est.k as u64),
                Cell::Text(est.family.to_string()),
                est.c_estimate.into(),
                Cell::Int(est.iterations),
                Cell::Bool(est.converged),
                Cell::Int(est.seed),
                Cell::Text(
                    est.minimizer_params
                        .iter()
                        .map(|p| format!("{p:.16e}"))
                        .collect::<Vec<_>>()
                        .join(";"),
                ),
            ]],
        ),
    };
    Ok(Rendered {
        body,
        sidecar: None,
        code: 0,
    })
}
