//! `foldpam` command-line front end.
//!
//! Lengths are given in mm and pressures in kPa; everything is converted to
//! SI before it reaches the library. Outputs are written atomically.

mod output;
mod plot;

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use foldpam::control::{builtin_scenario, run_scenario, NoiseConfig, ScenarioConfig, SimTrace};
use foldpam::design_space::{curve_extrema, curve_family, region_area, RegionReport};
use foldpam::empirical::{
    build_surrogate, dataset_to_curve, detect_kink, load_measurements, DatasetMeta, KinkReport,
    Stroke,
};
use foldpam::model::{
    default_thickness, sample_curve, Geometry, Model, Pouch, DEFAULT_M_MIN, DEFAULT_THETA_MIN,
};
use foldpam::ForceStrainCurve;

use output::Pending;

const MM: f64 = 1e-3;
const KPA: f64 = 1e3;

/// Invalid invocation that clap cannot catch on its own.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser)]
#[command(
    name = "foldpam",
    version,
    about = "Force-strain curves, design-space reports, data fitting and control simulation for folded pouch actuators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one model force-strain curve.
    Curve(CurveArgs),
    /// Design-space area of a fold-ratio family.
    DesignSpace(DesignSpaceArgs),
    /// Turn test-stand records into curves, kink reports and a surrogate.
    Fit(FitArgs),
    /// Run a closed- or open-loop scenario.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Pouch,
    PouchNonIdeal,
    Ppam,
}

impl ModelKind {
    fn name(self) -> &'static str {
        match self {
            ModelKind::Pouch => "pouch",
            ModelKind::PouchNonIdeal => "pouch-non-ideal",
            ModelKind::Ppam => "ppam",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrokeArg {
    Compression,
    Return,
    Both,
}

impl From<StrokeArg> for Stroke {
    fn from(s: StrokeArg) -> Self {
        match s {
            StrokeArg::Compression => Stroke::Compression,
            StrokeArg::Return => Stroke::Return,
            StrokeArg::Both => Stroke::Both,
        }
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be finite and positive, got {s}"))
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be finite and non-negative, got {s}"))
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Family(Vec<f64>);

/// `fr=0,0.2,0.4`
fn family(s: &str) -> std::result::Result<Family, String> {
    let list = s
        .strip_prefix("fr=")
        .ok_or_else(|| format!("expected fr=<list>, got {s:?}"))?;
    let frs = list
        .split(',')
        .map(|v| non_negative(v.trim()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if frs.len() < 2 {
        return Err("a family needs at least two fold ratios".into());
    }
    Ok(Family(frs))
}

#[derive(Args)]
struct UnitArgs {
    /// Unfolded width, mm.
    #[arg(long, value_parser = positive)]
    w0_mm: f64,
    /// Uninflated length, mm.
    #[arg(long, value_parser = positive)]
    l0_mm: f64,
    /// Flattened thickness, mm (default 0.1 W0).
    #[arg(long, value_parser = positive)]
    h_mm: Option<f64>,
    #[arg(long, value_parser = positive)]
    pressure_kpa: f64,
}

impl UnitArgs {
    fn geometry(&self, wf_mm: f64) -> Result<Geometry> {
        let w0 = self.w0_mm * MM;
        let h = self.h_mm.map_or(default_thickness(w0), |h| h * MM);
        Ok(Geometry::new(w0, self.l0_mm * MM, wf_mm * MM, h)?)
    }

    fn pressure(&self) -> f64 {
        self.pressure_kpa * KPA
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Samples per curve.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(2..))]
    points: u32,
    /// Smallest pouch arc angle, rad.
    #[arg(long, value_parser = positive)]
    theta_min: Option<f64>,
    /// Smallest PPAM elliptic parameter.
    #[arg(long, value_parser = positive)]
    m_min: Option<f64>,
}

impl ModelArgs {
    fn model(&self) -> Result<Model> {
        match self.model {
            ModelKind::Pouch | ModelKind::PouchNonIdeal => {
                if self.m_min.is_some() {
                    return Err(usage("--m-min applies to the ppam model only"));
                }
                let base = if self.model == ModelKind::Pouch {
                    Pouch::ideal()
                } else {
                    Pouch::non_ideal()
                };
                Ok(Model::Pouch(Pouch {
                    theta_min: self.theta_min.unwrap_or(DEFAULT_THETA_MIN),
                    ..base
                }))
            }
            ModelKind::Ppam => {
                if self.theta_min.is_some() {
                    return Err(usage("--theta-min applies to the pouch models only"));
                }
                Ok(Model::Ppam {
                    m_min: self.m_min.unwrap_or(DEFAULT_M_MIN),
                })
            }
        }
    }
}

#[derive(Args)]
struct EmitArgs {
    /// Output file.
    #[arg(short, long)]
    output: PathBuf,
    /// Output format (default: json for a .json path, csv otherwise).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write an SVG plot.
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl EmitArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or_else(|| {
            match self.output.extension().and_then(|e| e.to_str()) {
                Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
                _ => Format::Csv,
            }
        })
    }

    fn open(&self) -> Result<(Pending, Option<Pending>)> {
        let plot = self.plot.as_deref().map(Pending::new).transpose()?;
        Ok((Pending::new(&self.output)?, plot))
    }
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    unit: UnitArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Total folded width, mm.
    #[arg(long, value_parser = non_negative, conflicts_with = "fold_ratio")]
    wf_mm: Option<f64>,
    /// Folded width over unfolded width.
    #[arg(long, value_parser = non_negative)]
    fold_ratio: Option<f64>,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct DesignSpaceArgs {
    #[command(flatten)]
    unit: UnitArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Fold ratios, e.g. fr=0,0.2,0.4,0.52,0.67.
    #[arg(long, value_parser = family)]
    family: Family,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
struct FitArgs {
    /// Measurement CSV (`time_s,force_n`); repeat for a family.
    #[arg(long = "data", required = true)]
    data: Vec<PathBuf>,
    /// Metadata JSON, one per --data, in the same order.
    #[arg(long = "meta", required = true)]
    meta: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "compression")]
    stroke: StrokeArg,
    /// Write a JSON kink report.
    #[arg(long)]
    kink_report: Option<PathBuf>,
    /// Write a surrogate JSON built from all records (SI units inside).
    #[arg(long)]
    surrogate: Option<PathBuf>,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false, args = ["scenario", "config"])]
struct SimulateArgs {
    /// Built-in scenario.
    #[arg(long, value_parser = PossibleValuesParser::new(foldpam::control::BUILTIN_SCENARIOS))]
    scenario: Option<String>,
    /// Scenario JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the simulated duration, s.
    #[arg(long, value_parser = positive)]
    duration_s: Option<f64>,
    /// Add Gaussian position-measurement noise, mm (seed from FOLDPAM_SEED).
    #[arg(long, value_parser = non_negative)]
    noise_std_mm: Option<f64>,
    #[command(flatten)]
    emit: EmitArgs,
}

#[derive(Serialize)]
struct CurveDoc<'a> {
    label: &'a str,
    pressure_kpa: f64,
    points: &'a [foldpam::CurvePoint],
}

impl<'a> From<&'a ForceStrainCurve> for CurveDoc<'a> {
    fn from(c: &'a ForceStrainCurve) -> Self {
        CurveDoc {
            label: c.label(),
            pressure_kpa: c.pressure() / KPA,
            points: c.points(),
        }
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

/// `label,strain,force_n` rows for several curves.
fn curves_csv(curves: &[ForceStrainCurve]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "strain", "force_n"])?;
    for c in curves {
        for p in c.points() {
            w.write_record([c.label().to_string(), p.strain.to_string(), p.force.to_string()])?;
        }
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn run_curve(a: &CurveArgs) -> Result<()> {
    let model = a.model.model()?;
    let geom = match (a.wf_mm, a.fold_ratio) {
        (Some(wf), _) => a.unit.geometry(wf)?,
        (None, Some(fr)) => a.unit.geometry(0.0)?.with_fold_ratio(fr)?,
        (None, None) => a.unit.geometry(0.0)?,
    };
    let (out, plot) = a.emit.open()?;

    let curve = sample_curve(&model, &geom, a.unit.pressure(), a.model.points as usize)?
        .with_label(format!(
            "{} fr={}",
            a.model.model.name(),
            a.fold_ratio.unwrap_or(geom.fold_ratio())
        ));
    let body = match a.emit.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            buf
        }
        Format::Json => to_json(&CurveDoc::from(&curve))?,
    };
    let svg = plot.as_ref().map(|_| plot::curves_svg(std::slice::from_ref(&curve))).transpose()?;
    out.commit(&body)?;
    if let (Some(p), Some(svg)) = (plot, svg) {
        p.commit(svg.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MemberExtrema<'a> {
    label: &'a str,
    eps_max: f64,
    f_max_n: f64,
}

#[derive(Serialize)]
struct DesignSpaceDoc<'a> {
    model: &'static str,
    pressure_kpa: f64,
    w0_mm: f64,
    l0_mm: f64,
    /// Design-space area, N.
    area_n: f64,
    a_d_prime: f64,
    curve_labels: Vec<String>,
    members: Vec<MemberExtrema<'a>>,
}

fn run_design_space(a: &DesignSpaceArgs) -> Result<()> {
    let model = a.model.model()?;
    let base = a.unit.geometry(0.0)?;
    let (out, plot) = a.emit.open()?;

    let curves = curve_family(
        &base,
        a.unit.pressure(),
        &a.family.0,
        &model,
        a.model.points as usize,
    )?;
    let report = RegionReport::new(region_area(&curves, &base)?, &curves);
    let body = match a.emit.format() {
        Format::Json => {
            let members = curves
                .iter()
                .map(|c| {
                    curve_extrema(c).map(|(eps_max, f_max_n)| MemberExtrema {
                        label: c.label(),
                        eps_max,
                        f_max_n,
                    })
                })
                .collect::<foldpam::Result<Vec<_>>>()?;
            to_json(&DesignSpaceDoc {
                model: a.model.model.name(),
                pressure_kpa: a.unit.pressure_kpa,
                w0_mm: a.unit.w0_mm,
                l0_mm: a.unit.l0_mm,
                area_n: report.area_n,
                a_d_prime: report.a_d_prime,
                curve_labels: report.curve_labels.clone(),
                members,
            })?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["area_n", "a_d_prime", "curve_labels"])?;
            w.write_record([
                report.area_n.to_string(),
                report.a_d_prime.to_string(),
                report.curve_labels.join(";"),
            ])?;
            w.into_inner().map_err(|e| e.into_error())?
        }
    };
    let svg = plot.as_ref().map(|_| plot::curves_svg(&curves)).transpose()?;
    out.commit(&body)?;
    if let (Some(p), Some(svg)) = (plot, svg) {
        p.commit(svg.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct KinkDoc<'a> {
    label: &'a str,
    fold_ratio: f64,
    #[serde(flatten)]
    kink: KinkReport,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn run_fit(a: &FitArgs) -> Result<()> {
    if a.data.len() != a.meta.len() {
        return Err(usage(format!(
            "{} --data files but {} --meta files",
            a.data.len(),
            a.meta.len()
        )));
    }
    if a.surrogate.is_some() && a.data.len() < 2 {
        return Err(usage("--surrogate needs at least two --data/--meta pairs"));
    }
    let (out, plot) = a.emit.open()?;
    let kink_out = a.kink_report.as_deref().map(Pending::new).transpose()?;
    let surrogate_out = a.surrogate.as_deref().map(Pending::new).transpose()?;

    let mut fitted = Vec::with_capacity(a.data.len());
    for (data, meta) in a.data.iter().zip(&a.meta) {
        let meta = DatasetMeta::from_json(open(meta)?)
            .with_context(|| format!("metadata {}", meta.display()))?;
        let ds = load_measurements(open(data)?, meta)
            .with_context(|| format!("measurements {}", data.display()))?;
        let curve = dataset_to_curve(&ds, a.stroke.into())
            .with_context(|| format!("measurements {}", data.display()))?;
        fitted.push((meta.fold_ratio, curve));
    }
    let curves: Vec<ForceStrainCurve> = fitted.iter().map(|(_, c)| c.clone()).collect();

    let body = match a.emit.format() {
        Format::Csv => curves_csv(&curves)?,
        Format::Json => to_json(&curves.iter().map(CurveDoc::from).collect::<Vec<_>>())?,
    };
    let kinks = match kink_out {
        Some(_) => Some(
            fitted
                .iter()
                .map(|(fr, c)| {
                    Ok(KinkDoc {
                        label: c.label(),
                        fold_ratio: *fr,
                        kink: detect_kink(c).with_context(|| format!("kink fit {}", c.label()))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let surrogate = match surrogate_out {
        Some(_) => Some(build_surrogate(&fitted, curves[0].pressure())?),
        None => None,
    };
    let svg = plot.as_ref().map(|_| plot::curves_svg(&curves)).transpose()?;

    out.commit(&body)?;
    if let (Some(p), Some(k)) = (kink_out, kinks) {
        p.commit(&to_json(&k)?)?;
    }
    if let (Some(p), Some(s)) = (surrogate_out, surrogate) {
        p.commit(&to_json(&s)?)?;
    }
    if let (Some(p), Some(svg)) = (plot, svg) {
        p.commit(svg.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    time_s: f64,
    command: f64,
    fold_ratio: f64,
    pressure_kpa: f64,
    position_mm: f64,
    load_n: f64,
    error_mm: f64,
    saturated: bool,
}

#[derive(Serialize)]
struct TraceDoc<'a> {
    name: &'a str,
    channel: &'a str,
    command_unit: &'static str,
    dt_s: f64,
    setpoint_mm: f64,
    actuation_range_mm: f64,
    records: Vec<TraceRow>,
}

impl<'a> From<&'a SimTrace> for TraceDoc<'a> {
    fn from(t: &'a SimTrace) -> Self {
        let k = t.command_scale();
        TraceDoc {
            name: &t.name,
            channel: &t.channel,
            command_unit: t.command_unit(),
            dt_s: t.dt,
            setpoint_mm: t.setpoint / MM,
            actuation_range_mm: t.actuation_range / MM,
            records: t
                .records
                .iter()
                .map(|r| TraceRow {
                    time_s: r.time,
                    command: r.command * k,
                    fold_ratio: r.fold_ratio,
                    pressure_kpa: r.pressure / KPA,
                    position_mm: r.position / MM,
                    load_n: r.load,
                    error_mm: r.error / MM,
                    saturated: r.saturated,
                })
                .collect(),
        }
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("FOLDPAM_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("FOLDPAM_SEED must be an unsigned integer, got {s:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(usage(format!("FOLDPAM_SEED: {e}"))),
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("scenario {}: {e}", path.display())))
}

fn run_simulate(a: &SimulateArgs) -> Result<()> {
    let seed = env_seed()?;
    let mut cfg = match (&a.scenario, &a.config) {
        (Some(name), _) => builtin_scenario(name)
            .ok_or_else(|| usage(format!("unknown scenario {name:?}")))?,
        (None, Some(path)) => load_config(path)?,
        (None, None) => return Err(usage("one of --scenario or --config is required")),
    };
    if let Some(d) = a.duration_s {
        cfg.duration_s = d;
    }
    if let Some(std) = a.noise_std_mm {
        cfg.noise = Some(NoiseConfig {
            position_std_mm: std,
            seed: seed.unwrap_or(0),
        });
    } else if let (Some(n), Some(s)) = (cfg.noise.as_mut(), seed) {
        n.seed = s;
    }
    let (out, plot) = a.emit.open()?;

    let trace = run_scenario(&cfg)?;
    let body = match a.emit.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            trace.write_csv(&mut buf)?;
            buf
        }
        Format::Json => to_json(&TraceDoc::from(&trace))?,
    };
    let svg = plot.as_ref().map(|_| plot::trace_svg(&trace)).transpose()?;
    out.commit(&body)?;
    if let (Some(p), Some(svg)) = (plot, svg) {
        p.commit(svg.as_bytes())?;
    }
    Ok(())
}

/// Error category and exit status. The outermost recognised cause wins.
fn classify(err: &anyhow::Error) -> (&'static str, u8) {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return ("usage", 2);
        }
        if cause.is::<std::io::Error>() {
            return ("io", 3);
        }
        if cause.is::<foldpam::Error>() {
            return ("domain", 1);
        }
    }
    ("domain", 1)
}

fn report(kind: &str, message: &str, code: u8) -> ExitCode {
    let message = message.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let body: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more"))
                .collect();
            return report("usage", body.join(" ").trim_start_matches("error: "), 2);
        }
    };
    let result = match &cli.command {
        Command::Curve(a) => run_curve(a),
        Command::DesignSpace(a) => run_design_space(a),
        Command::Fit(a) => run_fit(a),
        Command::Simulate(a) => run_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify(&e);
            report(kind, &format!("{e:#}"), code)
        }
    }
}
