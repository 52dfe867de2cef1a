//! Command-line front end: spectral partition, counting-function sweeps,
//! model-channel evolution, channel enumeration, and completeness probes
//! for truncated Toeplitz operators with piecewise-polynomial symbols.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
//! Identical configuration + seed produces byte-identical outputs.

mod config;
mod output;

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use toepchan::classifier::{multiplicity, partition_spectrum, preimage_arcs};
use toepchan::scattering::{band_limited_state, two_sided_report, DiscreteSpaces};
use toepchan::toeplitz::szego_limit;
use toepchan::{
    AdmissibleInterval, BumpProfile, IndicatorChannel, JumpClass, JumpInfo, PiecewiseSymbol,
    TruncatedToeplitz,
};

use config::{parse_pair, RunConfig};
use output::{csv_preamble, render_json, sig, symbol_svg};

#[derive(Parser)]
#[command(
    name = "toepchan",
    version,
    about = "Spectral partition and scattering-channel diagnostics for Toeplitz symbols"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Built-in name ("cosine", "fig3", "indicator:<x1>:<x2>") or a JSON file
    #[arg(long, global = true)]
    symbol: Option<String>,

    /// Spectral band LO:HI
    #[arg(long, global = true, value_name = "LO:HI", allow_hyphen_values = true)]
    band: Option<String>,

    /// Mode cutoff M for the discrete Hardy space (<= 1024)
    #[arg(long, global = true)]
    modes: Option<usize>,

    /// Spatial grid size N; must be a power of two >= 8*(M+1)
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Largest matrix truncation n for counting sweeps (<= 4096)
    #[arg(long, global = true)]
    trunc: Option<usize>,

    /// Evolution horizon t* (|t| <= 200)
    #[arg(long, global = true, allow_hyphen_values = true)]
    tstar: Option<f64>,

    /// Endpoint-neighborhood radius for concentration zones
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Spectral bump support LO:HI in model coordinates (0, 1)
    #[arg(long, global = true, value_name = "LO:HI")]
    bump: Option<String>,

    /// Output directory (created if missing)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// RNG seed, recorded in every output
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Partition the essential spectrum; emits JSON plus an annotated SVG
    Classify,
    /// Counting-function sweep over increasing truncations; emits CSV
    Szego,
    /// Endpoint concentration of an evolved indicator-channel state; emits CSV
    Evolve,
    /// Enumerate thick arcs and jump channels over a band; emits JSON
    Channels,
    /// Two-sided channel decomposition of a band-limited probe; emits JSON
    Complete,
    /// Symbol graph SVG, with the band overlaid when given
    Plot,
}

enum CliErr {
    Config(String),
    Numeric(String),
}

impl From<toepchan::Error> for CliErr {
    fn from(e: toepchan::Error) -> Self {
        use toepchan::Error::*;
        match e {
            InvalidSymbol(_) | SideRequired(_) | AdmissibilityViolated(_) | DomainError { .. }
            | NotAJump(_) => CliErr::Config(e.to_string()),
            _ => CliErr::Numeric(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(CliErr::Config(msg)) => {
            eprintln!("{{\"kind\":\"config\",\"error\":{}}}", Value::String(msg));
            ExitCode::from(2)
        }
        Err(CliErr::Numeric(msg)) => {
            eprintln!("{{\"kind\":\"numerical\",\"error\":{}}}", Value::String(msg));
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliErr> {
    let command = match cli.command {
        Cmd::Classify => "classify",
        Cmd::Szego => "szego",
        Cmd::Evolve => "evolve",
        Cmd::Channels => "channels",
        Cmd::Complete => "complete",
        Cmd::Plot => "plot",
    };
    let band = cli
        .band
        .as_deref()
        .map(|s| parse_pair(s, "--band"))
        .transpose()
        .map_err(CliErr::Config)?;
    let bump = cli
        .bump
        .as_deref()
        .map(|s| parse_pair(s, "--bump"))
        .transpose()
        .map_err(CliErr::Config)?;
    let cfg = RunConfig {
        command: command.into(),
        symbol: cli.symbol.unwrap_or_default(),
        band,
        modes: cli.modes.unwrap_or(256),
        grid: cli.grid,
        trunc: cli.trunc.unwrap_or(2048),
        tstar: cli.tstar.unwrap_or(30.0),
        eps: cli.eps,
        bump,
        seed: cli.seed.unwrap_or(0),
    };
    cfg.validate().map_err(CliErr::Config)?;
    let outdir = cli.out.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&outdir)
        .map_err(|e| CliErr::Config(format!("cannot create {}: {e}", outdir.display())))?;

    let symbol = load_symbol(&cfg.symbol)?;
    match cli.command {
        Cmd::Classify => cmd_classify(&cfg, &symbol, &outdir),
        Cmd::Szego => cmd_szego(&cfg, &symbol, &outdir),
        Cmd::Evolve => cmd_evolve(&cfg, &symbol, &outdir),
        Cmd::Channels => cmd_channels(&cfg, &symbol, &outdir),
        Cmd::Complete => cmd_complete(&cfg, &symbol, &outdir),
        Cmd::Plot => cmd_plot(&cfg, &symbol, &outdir),
    }
}

fn load_symbol(spec: &str) -> Result<PiecewiseSymbol, CliErr> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| CliErr::Config(format!("cannot read {spec}: {e}")))?;
        Ok(PiecewiseSymbol::from_json(&text)?)
    } else {
        Ok(PiecewiseSymbol::builtin(spec)?)
    }
}

fn report_json(cfg: &RunConfig, hash: &str, body: Value) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(cfg).unwrap(),
        "config_hash": hash,
        "seed": cfg.seed,
        "report": body,
    })
}

fn write_file(path: PathBuf, text: &str) -> Result<PathBuf, CliErr> {
    fs::write(&path, text)
        .map_err(|e| CliErr::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn required_band(cfg: &RunConfig) -> Result<AdmissibleInterval, CliErr> {
    let (lo, hi) = cfg
        .band
        .ok_or_else(|| CliErr::Config("--band LO:HI is required for this command".into()))?;
    Ok(AdmissibleInterval::new(lo, hi, 0.05))
}

fn cmd_classify(
    cfg: &RunConfig,
    symbol: &PiecewiseSymbol,
    outdir: &Path,
) -> Result<Vec<PathBuf>, CliErr> {
    let hash = cfg.hash();
    let part = partition_spectrum(symbol)?;
    let report = part.to_report();
    let body = serde_json::to_value(&report).unwrap();
    let doc = render_json(&report_json(cfg, &hash, body));
    let svg = symbol_svg(symbol, Some(&report), cfg.band, &hash, cfg.seed);
    Ok(vec![
        write_file(outdir.join("classify.json"), &doc)?,
        write_file(outdir.join("classify.svg"), &svg)?,
    ])
}

fn cmd_szego(
    cfg: &RunConfig,
    symbol: &PiecewiseSymbol,
    outdir: &Path,
) -> Result<Vec<PathBuf>, CliErr> {
    let (a, b) = cfg
        .band
        .ok_or_else(|| CliErr::Config("--band LO:HI is required for szego".into()))?;
    let hash = cfg.hash();
    let mut ns: Vec<usize> = [256usize, 512, 1024, 2048]
        .into_iter()
        .filter(|&n| n <= cfg.trunc)
        .collect();
    if ns.is_empty() {
        ns.push(cfg.trunc);
    }
    let mut csv = csv_preamble(&serde_json::to_value(cfg).unwrap(), &hash, cfg.seed);
    csv.push_str("n,a,b,count,ratio,limit,deviation\n");
    for n in ns {
        let row = szego_limit(symbol, a, b, n)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n,
            sig(row.a),
            sig(row.b),
            row.count,
            sig(row.ratio),
            sig(row.limit),
            sig(row.deviation),
        ));
    }
    Ok(vec![write_file(outdir.join("szego.csv"), &csv)?])
}

fn cmd_evolve(
    cfg: &RunConfig,
    symbol: &PiecewiseSymbol,
    outdir: &Path,
) -> Result<Vec<PathBuf>, CliErr> {
    let spec = symbol.name();
    let rest = spec.strip_prefix("indicator:").ok_or_else(|| {
        CliErr::Config(format!("evolve needs an indicator:<x1>:<x2> symbol, got '{spec}'"))
    })?;
    let (x1, x2) = parse_pair(rest, "--symbol indicator").map_err(CliErr::Config)?;
    let channel = IndicatorChannel::new(x1, x2);
    let arc = channel.x2 - channel.x1;
    let half_gap = 0.5 * arc.min(TAU - arc);
    let eps = cfg.eps.unwrap_or(0.3 * half_gap);
    if eps >= half_gap {
        return Err(CliErr::Config(format!(
            "--eps {eps} too large: endpoint zones overlap (need eps < {half_gap})"
        )));
    }
    let (blo, bhi) = cfg.bump.unwrap_or((0.3, 0.7));
    let bump = BumpProfile::new(blo, bhi)?;
    let hash = cfg.hash();
    let mut csv = csv_preamble(&serde_json::to_value(cfg).unwrap(), &hash, cfg.seed);
    csv.push_str("t,mass_near_endpoint1,mass_near_endpoint2,mass_elsewhere\n");
    let steps = 16;
    for i in 0..=steps {
        let t = cfg.tstar * (2.0 * i as f64 / steps as f64 - 1.0);
        let (m1, m2, rest) = toepchan::channel::concentration_profile(&channel, &bump, t, eps)?;
        csv.push_str(&format!("{},{},{},{}\n", sig(t), sig(m1), sig(m2), sig(rest)));
    }
    Ok(vec![write_file(outdir.join("evolve.csv"), &csv)?])
}

fn cmd_channels(
    cfg: &RunConfig,
    symbol: &PiecewiseSymbol,
    outdir: &Path,
) -> Result<Vec<PathBuf>, CliErr> {
    let band = required_band(cfg)?;
    let hash = cfg.hash();
    let rep = multiplicity(symbol, &band)?;
    let arcs = preimage_arcs(symbol, &band)?;
    let jumps: Vec<JumpInfo> = symbol
        .classify_breakpoints()
        .into_iter()
        .filter(|j| {
            matches!(j.class, JumpClass::SPlus | JumpClass::SMinus)
                && j.jump_interval.0 <= band.lo
                && band.hi <= j.jump_interval.1
        })
        .collect();
    let body = json!({
        "band": [band.lo, band.hi],
        "multiplicity": serde_json::to_value(&rep).unwrap(),
        "thick_arcs": {
            "minus": arcs.minus_arcs,
            "plus": arcs.plus_arcs,
        },
        "jumps": serde_json::to_value(&jumps).unwrap(),
    });
    let doc = render_json(&report_json(cfg, &hash, body));
    Ok(vec![write_file(outdir.join("channels.json"), &doc)?])
}

fn cmd_complete(
    cfg: &RunConfig,
    symbol: &PiecewiseSymbol,
    outdir: &Path,
) -> Result<Vec<PathBuf>, CliErr> {
    let band = required_band(cfg)?;
    let hash = cfg.hash();
    let spaces = DiscreteSpaces::new(cfg.modes);
    if let Some(n) = cfg.grid {
        if n != spaces.grid_size() {
            return Err(CliErr::Config(format!(
                "--grid {n} does not match the resolved grid {} for M = {}",
                spaces.grid_size(),
                cfg.modes
            )));
        }
    }
    let t_full = TruncatedToeplitz::build(symbol, cfg.modes + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut probe = None;
    for _ in 0..8 {
        let center = rng.random::<f64>() * TAU;
        let seed_grid = spaces.gaussian_bump(center, 0.35);
        if let Ok(f) = band_limited_state(&spaces, &t_full, &seed_grid, &band) {
            probe = Some((center, f));
            break;
        }
    }
    let (center, f) = probe.ok_or_else(|| {
        CliErr::Numeric("no seeded probe state has spectral mass in the band".into())
    })?;
    let rep = two_sided_report(symbol, &spaces, &t_full, &f, &band, cfg.tstar.abs())?;
    let body = json!({
        "probe_center": center,
        "two_sided": serde_json::to_value(&rep).unwrap(),
    });
    let doc = render_json(&report_json(cfg, &hash, body));
    Ok(vec![write_file(outdir.join("complete.json"), &doc)?])
}

fn cmd_plot(
    cfg: &RunConfig,
    symbol: &PiecewiseSymbol,
    outdir: &Path,
) -> Result<Vec<PathBuf>, CliErr> {
    let hash = cfg.hash();
    let report = partition_spectrum(symbol).ok().map(|p| p.to_report());
    let svg = symbol_svg(symbol, report.as_ref(), cfg.band, &hash, cfg.seed);
    Ok(vec![write_file(outdir.join("plot.svg"), &svg)?])
}
