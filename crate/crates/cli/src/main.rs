//! `slicereg`: batch front end for series evaluation, Landau and Bloch–Landau
//! certificates, and inequality suites.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use slicereg::bloch::{bloch_landau, BlochParams};
use slicereg::landau::{extremal_phi, generate_self_map, landau_certify, landau_rho, CoverageParams, LandauParams};
use slicereg::moebius::{default_order, regular_moebius_series, MoebiusSpec};
use slicereg::newton::NewtonParams;
use slicereg::scan::ScanParams;
use slicereg::verify::{run_manifest, RunOptions, SuiteManifest, Verdict};
use slicereg::{ImaginaryUnit, Quaternion, SliceSeries, TOOL_VERSION};

const EXIT_INPUT: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_HYPOTHESIS: u8 = 4;
const EXIT_VERIFICATION: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "slicereg",
    version,
    about = "Slice regular series: evaluation, certificates and inequality suites"
)]
struct Cli {
    #[command(flatten)]
    grid: GridArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GridArgs {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Shells of the singular scan.
    #[arg(long, global = true, default_value_t = 200)]
    shells: usize,
    /// Sample points per sphere.
    #[arg(long = "points", global = true, default_value_t = 64)]
    points_per_sphere: usize,
    #[arg(long, global = true, default_value_t = 1e-12)]
    newton_tol: f64,
    /// Order of generated fixtures and re-expansions.
    #[arg(long, global = true, default_value_t = 256)]
    max_order: usize,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a series at the points of a JSON array of quaternions.
    Eval {
        series: PathBuf,
        /// JSON array of `[w, x, y, z]`.
        points_file: PathBuf,
    },
    /// Injectivity and covering reports for a self-map fixing 0.
    Landau {
        series: PathBuf,
        /// Coverage targets.
        #[arg(long, default_value_t = 500)]
        targets: usize,
    },
    /// Bloch–Landau certificate along one slice.
    Bloch {
        series: PathBuf,
        /// `i`, `j`, `k` or `x,y,z` for the imaginary unit.
        #[arg(long, default_value = "i")]
        slice: String,
        #[arg(long, default_value_t = 200)]
        targets: usize,
    },
    /// Run an inequality suite manifest.
    Verify {
        /// Manifest file; the built-in default suite when absent.
        #[arg(long, conflicts_with = "canary")]
        manifest: Option<PathBuf>,
        /// The built-in mutation canary.
        #[arg(long)]
        canary: bool,
    },
    /// Write a fixture series.
    Fixture {
        #[command(subcommand)]
        kind: FixtureKind,
    },
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FixtureKind {
    Identity {
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
    },
    /// `q 𝓜_{−aū}(q) u`.
    Phi {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value = "1,0,0,0")]
        unit: String,
    },
    /// `𝓜_{center} u`.
    Moebius {
        #[arg(long)]
        center: String,
        #[arg(long, default_value = "1,0,0,0")]
        unit: String,
    },
    /// `q * 𝓜_{p₁} * … * 𝓜_{p_k} * u` drawn from the seed.
    Generated {
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// `q a u`.
    Rotation {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value = "1,0,0,0")]
        unit: String,
    },
}

#[derive(Error, Debug)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] slicereg::Error),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use slicereg::Error as E;
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Input(_) => EXIT_INPUT,
            CliError::Core(E::Hypothesis(_)) => EXIT_HYPOTHESIS,
            CliError::Core(E::Invalid(_)) => EXIT_INPUT,
            CliError::Core(_) => EXIT_DOMAIN,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn parse_quaternion(s: &str) -> CliResult<Quaternion> {
    let parts: Vec<f64> = s
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("bad quaternion {s:?}: {e}")))?;
    match parts[..] {
        [w, x, y, z] => Ok(Quaternion::new(w, x, y, z)),
        [x, y, z] => Ok(Quaternion::new(0.0, x, y, z)),
        _ => Err(CliError::Input(format!(
            "bad quaternion {s:?}: expected 3 or 4 components"
        ))),
    }
}

fn parse_unit(s: &str) -> CliResult<ImaginaryUnit> {
    let q = match s {
        "i" => Quaternion::I,
        "j" => Quaternion::J,
        "k" => Quaternion::K,
        _ => parse_quaternion(s)?,
    };
    Ok(ImaginaryUnit::new(q)?)
}

struct Run<'a> {
    grid: &'a GridArgs,
    command: &'static str,
    inputs: Vec<String>,
    extra: Value,
}

impl Run<'_> {
    fn config(&self, format: Format) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.grid.seed,
            "grid": {
                "shells": self.grid.shells,
                "points_per_sphere": self.grid.points_per_sphere,
                "newton_tol": self.grid.newton_tol,
                "max_order": self.grid.max_order,
            },
            "format": format,
            "out": self.grid.out,
            "options": self.extra,
        })
    }

    fn envelope(&self, result: Value) -> Value {
        json!({
            "tool_version": TOOL_VERSION,
            "config": self.config(Format::Json),
            "result": result,
        })
    }

    /// CSV output: a comment line with the config, then the table.
    fn csv(&self, header: &[&str], rows: Vec<Vec<String>>) -> String {
        let mut out = format!("# {} {}\n", TOOL_VERSION, self.config(Format::Csv));
        out.push_str(&header.join(","));
        out.push('\n');
        for r in rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    fn emit(&self, text: String) -> CliResult<()> {
        match &self.grid.out {
            Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
            }
        }
    }

    fn emit_json(&self, result: Value) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(&self.envelope(result)).expect("serializable");
        text.push('\n');
        self.emit(text)
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn q_cells(q: Quaternion) -> Vec<String> {
    q.to_array().iter().map(|c| format!("{c:e}")).collect()
}

fn scan_params(grid: &GridArgs) -> ScanParams {
    ScanParams {
        shells: grid.shells,
        points_per_sphere: grid.points_per_sphere,
        seed: grid.seed,
        newton: newton_params(grid),
        ..ScanParams::default()
    }
}

fn newton_params(grid: &GridArgs) -> NewtonParams {
    NewtonParams {
        tol: grid.newton_tol,
        ..NewtonParams::default()
    }
}

fn cmd_eval(grid: &GridArgs, series: &Path, points: &Path) -> CliResult<()> {
    let f: SliceSeries = read_json(series)?;
    let pts: Vec<Quaternion> = read_json(points)?;
    let values = pts.iter().map(|&q| f.eval(q)).collect::<slicereg::Result<Vec<_>>>()?;
    let run = Run {
        grid,
        command: "eval",
        inputs: vec![series.display().to_string(), points.display().to_string()],
        extra: Value::Null,
    };
    match grid.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows = pts
                .iter()
                .zip(&values)
                .map(|(&q, &v)| q_cells(q).into_iter().chain(q_cells(v)).collect())
                .collect();
            run.emit(run.csv(&["q_w", "q_x", "q_y", "q_z", "f_w", "f_x", "f_y", "f_z"], rows))
        }
        Format::Json => {
            let rows: Vec<Value> = pts
                .iter()
                .zip(&values)
                .map(|(q, v)| json!({"q": q, "value": v}))
                .collect();
            run.emit_json(json!(rows))
        }
    }
}

fn cmd_landau(grid: &GridArgs, series: &Path, targets: usize) -> CliResult<()> {
    let f: SliceSeries = read_json(series)?;
    let params = LandauParams {
        scan: scan_params(grid),
        coverage: CoverageParams {
            targets,
            seed: grid.seed,
            newton: newton_params(grid),
            ..CoverageParams::default()
        },
        ..LandauParams::default()
    };
    let (inj, cov) = landau_certify(&f, &params)?;
    let a = f.coeff(1).norm();
    let run = Run {
        grid,
        command: "landau",
        inputs: vec![series.display().to_string()],
        extra: json!({ "targets": targets }),
    };
    let passed = inj.consistent && cov.complete();
    match grid.format.unwrap_or(Format::Json) {
        Format::Json => run.emit_json(json!({
            "a": a,
            "rho": landau_rho(a)?,
            "injectivity": inj,
            "coverage": cov,
        }))?,
        Format::Csv => run.emit(run.csv(
            &[
                "a",
                "rho",
                "lower_bound",
                "upper_bound",
                "upper_method",
                "grid_resolution",
                "targets_total",
                "targets_hit",
                "max_preimage_residual",
            ],
            vec![vec![
                a.to_string(),
                landau_rho(a)?.to_string(),
                inj.lower_bound.to_string(),
                inj.upper_bound.to_string(),
                to_value(&inj.upper_method).as_str().unwrap_or_default().to_string(),
                inj.grid_resolution.to_string(),
                cov.targets_total.to_string(),
                cov.targets_hit.to_string(),
                cov.max_preimage_residual.to_string(),
            ]],
        ))?,
    }
    if !passed {
        return Err(CliError::Verification(format!(
            "coverage {}/{} targets, bounds consistent: {}",
            cov.targets_hit, cov.targets_total, inj.consistent
        )));
    }
    Ok(())
}

fn cmd_bloch(grid: &GridArgs, series: &Path, slice: &str, targets: usize) -> CliResult<()> {
    let f: SliceSeries = read_json(series)?;
    let unit = parse_unit(slice)?;
    let mut params = BlochParams::default();
    params.recenter_order = grid.max_order.min(params.recenter_order.max(grid.max_order / 4));
    params.landau.scan = ScanParams {
        collision_shells: params.landau.scan.collision_shells,
        collision_points: params.landau.scan.collision_points,
        ..scan_params(grid)
    };
    params.landau.coverage = CoverageParams {
        targets,
        seed: grid.seed,
        newton: newton_params(grid),
        ..CoverageParams::default()
    };
    let cert = bloch_landau(&f, unit, &params)?;
    let run = Run {
        grid,
        command: "bloch",
        inputs: vec![series.display().to_string()],
        extra: json!({ "slice": unit, "targets": targets, "params": params }),
    };
    match grid.format.unwrap_or(Format::Json) {
        Format::Json => run.emit_json(to_value(&cert))?,
        Format::Csv => run.emit(run.csv(
            &[
                "r0",
                "rho0",
                "inner_radius",
                "covered_radius",
                "injectivity_verified",
                "coverage_verified",
            ],
            vec![vec![
                cert.r0.to_string(),
                cert.rho0.to_string(),
                cert.inner_radius.to_string(),
                cert.covered_radius.to_string(),
                cert.injectivity_verified.to_string(),
                cert.coverage_verified.to_string(),
            ]],
        ))?,
    }
    if !(cert.injectivity_verified && cert.coverage_verified) {
        return Err(CliError::Verification("certificate not verified".into()));
    }
    Ok(())
}

fn cmd_verify(grid: &GridArgs, manifest: Option<&Path>, canary: bool) -> CliResult<()> {
    let (m, input) = match (manifest, canary) {
        (Some(p), _) => (read_json::<SuiteManifest>(p)?, p.display().to_string()),
        (None, true) => (SuiteManifest::canary(), "builtin:canary".to_string()),
        (None, false) => (SuiteManifest::default_suite(), "builtin:default".to_string()),
    };
    let opts = RunOptions {
        scan: ScanParams {
            shells: grid.shells,
            points_per_sphere: grid.points_per_sphere,
            newton: newton_params(grid),
            ..RunOptions::default().scan
        },
        max_order: grid.max_order,
    };
    let report = run_manifest(&m, &opts)?;
    let run = Run {
        grid,
        command: "verify",
        inputs: vec![input],
        extra: json!({ "manifest": m }),
    };
    match grid.format.unwrap_or(Format::Json) {
        Format::Json => run.emit_json(to_value(&report))?,
        Format::Csv => run.emit(
            run.csv(
                &[
                    "theorem_id",
                    "fixture",
                    "runs",
                    "samples",
                    "worst_slack",
                    "truncation_budget",
                    "verdict",
                    "equality_detected",
                ],
                report
                    .entries
                    .iter()
                    .map(|e| {
                        vec![
                            to_value(&e.report.theorem_id).as_str().unwrap_or_default().to_string(),
                            to_value(&e.entry.fixture)["kind"]
                                .as_str()
                                .unwrap_or_default()
                                .to_string(),
                            e.runs.to_string(),
                            e.report.samples.to_string(),
                            format!("{:e}", e.report.worst_slack),
                            format!("{:e}", e.report.truncation_budget),
                            to_value(&e.report.verdict).as_str().unwrap_or_default().to_string(),
                            e.report.equality_detected.to_string(),
                        ]
                    })
                    .collect(),
            ),
        )?,
    }
    let failed = report
        .entries
        .iter()
        .filter(|e| e.report.verdict == Verdict::Fail)
        .count();
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} suite entries failed")));
    }
    Ok(())
}

fn cmd_fixture(grid: &GridArgs, kind: &FixtureKind) -> CliResult<()> {
    let f = match kind {
        FixtureKind::Identity { radius } => SliceSeries::new(vec![Quaternion::ZERO, Quaternion::ONE], *radius)?,
        FixtureKind::Phi { a, unit } => {
            let order = default_order(*a).min(grid.max_order.saturating_sub(1)) + 1;
            extremal_phi(*a, parse_quaternion(unit)?, order)?
        }
        FixtureKind::Moebius { center, unit } => {
            let spec = MoebiusSpec::regular(parse_quaternion(center)?, parse_quaternion(unit)?)?;
            regular_moebius_series(&spec, default_order(spec.center.norm()).min(grid.max_order))?
        }
        FixtureKind::Generated { k } => generate_self_map(grid.seed, *k, grid.max_order.min(96))?,
        FixtureKind::Rotation { a, unit } => {
            let u = parse_quaternion(unit)?;
            if (u.norm() - 1.0).abs() > 1e-13 || !(*a > 0.0 && *a <= 1.0) {
                return Err(CliError::Input(
                    "rotation needs a unit quaternion and a in (0, 1]".into(),
                ));
            }
            SliceSeries::identity(1.0).right_mul(u.scale(*a))
        }
    };
    let run = Run {
        grid,
        command: "fixture",
        inputs: vec![],
        extra: to_value(kind),
    };
    // extra keys are ignored when the file is read back as a series
    let mut doc = to_value(&f);
    doc["tool_version"] = json!(TOOL_VERSION);
    doc["config"] = run.config(Format::Json);
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    run.emit(text)
}

fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.grid;
    match &cli.command {
        Command::Eval { series, points_file } => cmd_eval(g, series, points_file),
        Command::Landau { series, targets } => cmd_landau(g, series, *targets),
        Command::Bloch { series, slice, targets } => cmd_bloch(g, series, slice, *targets),
        Command::Verify { manifest, canary } => cmd_verify(g, manifest.as_deref(), *canary),
        Command::Fixture { kind } => cmd_fixture(g, kind),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slicereg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
