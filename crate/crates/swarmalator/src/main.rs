use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use swarmalator::config::{ConfigFile, DelaySpec, ModeName, RunConfig};
use swarmalator::manifest::RunManifest;
use swarmalator::render::{render_snapshot, render_trail, Style};
use swarmalator::report::format_report;
use swarmalator::runner::{analyse, audited_radius, compare, simulate, Engine};
use swarmalator::swarmalator_core::sim::SwarmSnapshot;
use swarmalator::swarmalator_core::trace::group_snapshots;
use swarmalator::trace_io::{read_trace_file, records_of, write_trace_file};

/// Swarmalator simulations for point entities and planar robots.
#[derive(Parser)]
#[command(name = "swarmalator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the lockstep simulation and write its trace.
    Simulate(SimulateArgs),
    /// Run the event-driven simulation with message passing and write its trace.
    SimulateDist(SimulateArgs),
    /// Draw a trace as SVG: a fading trail, or one snapshot.
    Render(RenderArgs),
    /// Classify the pattern a trace settles into.
    Classify(ClassifyArgs),
    /// Run both engines on one configuration and report their largest deviation.
    Compare(RunArgs),
    /// Run a grid of (J, K, P) values, one directory per cell.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long = "j", allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long = "k", allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long = "p")]
    p: Option<f64>,
    #[arg(long)]
    publish_period: Option<f64>,
    #[arg(long)]
    loss: Option<f64>,
    /// Constant delay `D` or uniform range `MIN:MAX`.
    #[arg(long, value_parser = parse_delay)]
    delay: Option<DelaySpec>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Robot,
    Original,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Trace file to write; the manifest goes next to it.
    #[arg(long)]
    out: PathBuf,
    /// Also classify the run and write the report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    trace: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Draw only the final snapshot.
    #[arg(long, conflicts_with = "at")]
    at_end: bool,
    /// Draw only the snapshot closest to this time.
    #[arg(long)]
    at: Option<f64>,
    /// Half-width of the world window; fitted to the data when omitted.
    #[arg(long)]
    extent: Option<f64>,
    #[arg(long, default_value_t = 600.0)]
    size: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    trace: PathBuf,
    /// Configuration supplying thresholds and the safety radius.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the full metrics report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the full metrics report instead of only the label.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    j_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    k_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    p_values: Vec<f64>,
    /// Use the event-driven engine.
    #[arg(long)]
    distributed: bool,
}

fn parse_delay(s: &str) -> Result<DelaySpec, String> {
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    match s.split_once(':') {
        Some((a, b)) => Ok(DelaySpec::Uniform { min: num(a)?, max: num(b)? }),
        None => Ok(DelaySpec::Constant(num(s)?)),
    }
}

impl RunArgs {
    fn config_file(&self) -> Result<ConfigFile> {
        let mut f = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(v) = self.seed {
            f.seed = Some(v);
        }
        if let Some(v) = self.steps {
            f.steps = Some(v);
        }
        if let Some(m) = self.mode {
            f.mode = Some(match m {
                ModeArg::Robot => ModeName::Robot,
                ModeArg::Original => ModeName::Original,
            });
        }
        if let Some(v) = self.agents {
            f.agents = Some(v);
        }
        if let Some(v) = self.j {
            f.j = Some(v);
        }
        if let Some(v) = self.k {
            f.k = Some(v);
        }
        if let Some(v) = self.p {
            f.p = Some(v);
        }
        if let Some(v) = self.publish_period {
            f.publish_period = Some(v);
        }
        if let Some(v) = self.loss {
            f.loss_probability = Some(v);
        }
        if let Some(v) = self.delay {
            f.delay = Some(v);
        }
        Ok(f)
    }

    fn resolve(&self) -> Result<(RunConfig, u64)> {
        let rc = self.config_file()?.resolve()?;
        let seed = rc.require_seed()?;
        Ok((rc, seed))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn manifest_path(trace: &Path) -> PathBuf {
    trace.with_extension("manifest.json")
}

fn run_and_save(rc: &RunConfig, seed: u64, engine: Engine, trace: &Path) -> Result<Vec<SwarmSnapshot>> {
    let manifest = RunManifest::new(engine.name(), rc, seed);
    let snapshots = simulate(rc, engine)?;
    write_trace_file(trace, &records_of(&snapshots))?;
    write(&manifest_path(trace), &manifest.to_json())?;
    Ok(snapshots)
}

fn report_text(rc: &RunConfig, snapshots: &[SwarmSnapshot]) -> Result<(String, String)> {
    let a = analyse(snapshots, &rc.thresholds, audited_radius(rc))?;
    let text = format_report(&a.classification, a.convergence, a.min_gap);
    Ok((a.classification.label.to_string(), text))
}

fn simulate_cmd(args: &SimulateArgs, engine: Engine) -> Result<()> {
    let (rc, seed) = args.run.resolve()?;
    let snapshots = run_and_save(&rc, seed, engine, &args.out)?;
    if let Some(path) = &args.report {
        let (label, text) = report_text(&rc, &snapshots)?;
        write(path, &text)?;
        println!("{label}");
    }
    Ok(())
}

fn load_trace(path: &Path) -> Result<Vec<SwarmSnapshot>> {
    let records = read_trace_file(path)?;
    if records.is_empty() {
        bail!("{} holds no samples", path.display());
    }
    Ok(group_snapshots(&records))
}

fn render_cmd(args: &RenderArgs) -> Result<()> {
    let trace = load_trace(&args.trace)?;
    let style = Style {
        size: args.size,
        extent: args.extent,
        ..Style::default()
    };
    let svg = if args.at_end {
        render_snapshot(trace.last().expect("non-empty"), &style)
    } else if let Some(t) = args.at {
        let nearest = trace
            .iter()
            .min_by(|a, b| (a.time - t).abs().total_cmp(&(b.time - t).abs()))
            .expect("non-empty");
        render_snapshot(nearest, &style)
    } else {
        render_trail(&trace, &style)
    };
    write(&args.out, &svg)
}

fn classify_cmd(args: &ClassifyArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let rc = file.resolve()?;
    let trace = load_trace(&args.trace)?;
    let (label, text) = report_text(&rc, &trace)?;
    if let Some(path) = &args.report {
        write(path, &text)?;
    }
    if args.full {
        print!("{text}");
    } else {
        println!("{label}");
    }
    Ok(())
}

fn compare_cmd(args: &RunArgs) -> Result<()> {
    let (rc, _) = args.resolve()?;
    let d = compare(&rc)?;
    println!("samples={}", d.samples);
    println!("max_position_deviation={:?}", d.position);
    println!("max_orientation_deviation={:?}", d.orientation);
    println!("max_phase_deviation={:?}", d.phase);
    println!("max_deviation={:?}", d.max());
    Ok(())
}

fn sweep_cmd(args: &SweepArgs) -> Result<()> {
    let base = args.run.config_file()?;
    let engine = if args.distributed { Engine::Distributed } else { Engine::Lockstep };
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    for &j in &args.j_values {
        for &k in &args.k_values {
            for &p in &args.p_values {
                let cell = ConfigFile {
                    j: Some(j),
                    k: Some(k),
                    p: Some(p),
                    ..base.clone()
                };
                let rc = cell.resolve()?;
                let seed = rc.require_seed()?;
                let dir = args.out.join(format!("J{j}_K{k}_P{p}"));
                fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
                let snapshots = run_and_save(&rc, seed, engine, &dir.join("trace.csv"))?;
                let (label, text) = report_text(&rc, &snapshots)?;
                write(&dir.join("report.txt"), &text)?;
                println!("J={j} K={k} P={p} {label}");
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate(a) => simulate_cmd(a, Engine::Lockstep),
        Command::SimulateDist(a) => simulate_cmd(a, Engine::Distributed),
        Command::Render(a) => render_cmd(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    }
}
