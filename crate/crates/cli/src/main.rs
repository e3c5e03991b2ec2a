//! `lpc`: Frenet apparatus, partner curves and their checks from the command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lpc_core::catalog::catalog;
use lpc_core::direction::{construct_partner, Case, PartnerKind};
use lpc_core::export::{self, Plane, PlotCurve, Role, RunConfig};
use lpc_core::pipeline::{self, Fault};
use lpc_core::report::VerificationReport;
use lpc_core::{GeometryError, Tolerances};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "lpc", version, about = "Lorentzian Frenet apparatus and direction-curve partners in Minkowski 3-space")]
struct Cli {
    /// Seed echoed into reports (default: LPC_SEED or 42).
    #[arg(long, global = true, env = "LPC_SEED", default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog curves with their parameters.
    Catalog,
    /// Write the Frenet apparatus of a catalog curve as CSV.
    Frenet {
        #[command(flatten)]
        curve: CurveArgs,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a partner curve and write donor and partner CSVs.
    Partner {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        partner: PartnerArgs,
        /// Donor CSV path.
        #[arg(long)]
        donor_out: Option<PathBuf>,
        /// Partner CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the partner relations, Frenet systems and correspondence theorems.
    Verify {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        partner: PartnerArgs,
        /// Corrupt the donor frame before checking: swap-nb or kappa-half.
        #[arg(long)]
        inject: Option<String>,
        /// JSON report path (stdout when omitted).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Helix, slant-helix and plane-curve verdicts.
    Classify {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        partner: OptionalPartnerArgs,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// SVG projection of a curve and optionally its partner.
    Plot {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        partner: OptionalPartnerArgs,
        /// x1x2, x1x3 or x2x3.
        #[arg(long, default_value = "x2x3")]
        plane: String,
        /// Leave the donor out of the plot.
        #[arg(long)]
        no_donor: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    curve: String,
    /// Curve parameter override, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Grid intervals.
    #[arg(long, default_value_t = 2000)]
    n: usize,
}

#[derive(Args)]
struct PartnerArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    case: String,
    #[command(flatten)]
    shape: ShapeArgs,
}

#[derive(Args)]
struct OptionalPartnerArgs {
    #[arg(long, requires = "case")]
    kind: Option<String>,
    #[arg(long, requires = "kind")]
    case: Option<String>,
    #[command(flatten)]
    shape: ShapeArgs,
}

#[derive(Args)]
struct ShapeArgs {
    /// Integration constant of the running angle.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c0: f64,
    /// Constant angle of the Bertrand construction.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// Partner starting point as x1,x2,x3.
    #[arg(long, value_parser = parse_point, allow_negative_numbers = true)]
    base: Option<[f64; 3]>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("parameter {k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|_| format!("expected three comma-separated numbers, got '{s}'"))
}

/// Failure modes of one invocation.
enum Failure {
    Geometry(GeometryError),
    ChecksFailed,
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Failure::Geometry(e)
    }
}

fn exit_code(e: &GeometryError) -> u8 {
    if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_NUMERIC
    }
}

fn base_config(curve: &CurveArgs, seed: u64) -> Result<RunConfig, GeometryError> {
    let mut cfg = RunConfig::new(curve.curve.clone(), curve.n);
    cfg.params = curve.params.iter().cloned().collect::<BTreeMap<_, _>>();
    cfg.tolerances = Tolerances::from_env()?;
    cfg.seed = seed;
    Ok(cfg)
}

fn apply_partner(cfg: &mut RunConfig, kind: &str, case: &str, shape: &ShapeArgs) -> Result<(), GeometryError> {
    cfg.kind = Some(kind.parse::<PartnerKind>()?);
    cfg.case = Some(case.parse::<Case>()?);
    cfg.c0 = shape.c0;
    cfg.theta = shape.theta;
    cfg.base = shape.base;
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), GeometryError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| GeometryError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| GeometryError::Io { path: "<stdout>".into(), message: e.to_string() })
        }
    }
}

fn finish_report(report: &VerificationReport, cfg: &RunConfig, path: Option<&Path>) -> Result<(), Failure> {
    emit(path, &export::report_string(report, cfg))?;
    for c in report.failures() {
        eprintln!("FAIL {}: residual {:e} (tolerance {:e}) {}", c.id, c.max_residual, c.tolerance, c.notes);
    }
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Catalog => {
            let mut text = String::new();
            for e in catalog() {
                let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let ty = e.expected_type.map_or("degenerate".to_string(), |t| t.to_string());
                text.push_str(&format!("{}\t{}\t{}\t{}\n", e.name, ty, params.join(","), e.description));
            }
            emit(None, &text)?;
        }
        Command::Frenet { curve, out } => {
            let mut cfg = base_config(&curve, cli.seed)?;
            cfg.outputs = out.iter().map(|p| p.display().to_string()).collect();
            let (c, app) = pipeline::load_donor(&cfg)?;
            emit(out.as_deref(), &export::csv_string(&c, &app)?)?;
        }
        Command::Partner { curve, partner, donor_out, out } => {
            let mut cfg = base_config(&curve, cli.seed)?;
            apply_partner(&mut cfg, &partner.kind, &partner.case, &partner.shape)?;
            let spec = pipeline::partner_spec(&cfg)?;
            let (c, app) = pipeline::load_donor(&cfg)?;
            let p = construct_partner(&c, &spec, &cfg.tolerances)?;
            if let Some(d) = &donor_out {
                emit(Some(d), &export::csv_string(&c, &app)?)?;
            }
            emit(out.as_deref(), &export::csv_string(&p.curve, &p.app)?)?;
            if p.app.excised > 0 {
                eprintln!("note: {} partner nodes excised (kappa_bar near zero)", p.app.excised);
            }
        }
        Command::Verify { curve, partner, inject, json } => {
            let mut cfg = base_config(&curve, cli.seed)?;
            apply_partner(&mut cfg, &partner.kind, &partner.case, &partner.shape)?;
            cfg.outputs = json.iter().map(|p| p.display().to_string()).collect();
            let fault = inject.as_deref().map(str::parse::<Fault>).transpose()?;
            let report = pipeline::run_verify(&cfg, fault)?;
            finish_report(&report, &cfg, json.as_deref())?;
        }
        Command::Classify { curve, partner, json } => {
            let mut cfg = base_config(&curve, cli.seed)?;
            if let (Some(k), Some(c)) = (&partner.kind, &partner.case) {
                apply_partner(&mut cfg, k, c, &partner.shape)?;
            }
            cfg.outputs = json.iter().map(|p| p.display().to_string()).collect();
            let report = pipeline::run_classify(&cfg)?;
            finish_report(&report, &cfg, json.as_deref())?;
        }
        Command::Plot { curve, partner, plane, no_donor, out } => {
            let plane: Plane = plane.parse()?;
            let mut cfg = base_config(&curve, cli.seed)?;
            let mut curves = Vec::new();
            let (c, _) = pipeline::load_donor(&cfg)?;
            if !no_donor {
                curves.push(PlotCurve { label: cfg.curve.clone(), role: Role::Donor, points: c.positions.clone() });
            }
            if let (Some(k), Some(cs)) = (&partner.kind, &partner.case) {
                apply_partner(&mut cfg, k, cs, &partner.shape)?;
                let spec = pipeline::partner_spec(&cfg)?;
                let p = construct_partner(&c, &spec, &cfg.tolerances)?;
                curves.push(PlotCurve { label: spec.label(), role: Role::Partner, points: p.curve.positions });
            }
            export::export_svg(&curves, &out, plane)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Geometry(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
