use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bosonlab::bounds::Theorem4Reading;
use bosonlab::power::{self, Carrier};
use bosonlab::scenario::{self, Fixture, Format, Scenario, SweepConfig};
use bosonlab::verify::{self, VerifyOptions};
use bosonlab::{Error, Result};

#[derive(Parser)]
#[command(name = "bosonlab", version, about = "Bosonic noise-channel checks, sweeps and power estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification suite.
    Verify(VerifyArgs),
    /// Run a parameter sweep from a config file and/or flags.
    Sweep(Box<SweepArgs>),
    /// Signal power for a photon number per mode.
    Power(PowerArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    /// Write the JSON summary here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` prints the summary object instead of per-check lines.
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    #[arg(long)]
    seed: Option<u64>,
    /// Randomized trials per inequality.
    #[arg(long)]
    trials: Option<usize>,
    /// Replace the noise bound with its negation (harness self-test).
    #[arg(long, hide = true)]
    mutate_theorem2_sign: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario name; overrides the config file.
    scenario: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Per-mode Fock dimension.
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long, value_parser = ["coherent", "thermal", "fock", "squeezed"])]
    fixture: Option<String>,
    /// Index reading for theorem4: permode or printed.
    #[arg(long)]
    reading: Option<String>,
    #[arg(long)]
    grid_spacing: Option<f64>,
    #[arg(long)]
    grid_extent: Option<f64>,
    /// Generic list override, `key=v1,v2,...`; repeatable.
    #[arg(long = "param", value_name = "KEY=LIST")]
    params: Vec<String>,
    #[command(flatten)]
    lists: ParamLists,
}

/// Comma-separated value lists; an empty string gives an empty range.
#[derive(Args)]
struct ParamLists {
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    ns: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    nbar: Option<String>,
    #[arg(long)]
    n2: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    na1: Option<String>,
    #[arg(long)]
    na2: Option<String>,
    #[arg(long)]
    nb1: Option<String>,
    #[arg(long)]
    nb2: Option<String>,
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    wavelength: Option<String>,
    #[arg(long)]
    bandwidth: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    pmax: Option<String>,
}

impl ParamLists {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("kappa", &self.kappa),
            ("noise", &self.noise),
            ("ns", &self.ns),
            ("alpha", &self.alpha),
            ("nbar", &self.nbar),
            ("n2", &self.n2),
            ("delta", &self.delta),
            ("na1", &self.na1),
            ("na2", &self.na2),
            ("nb1", &self.nb1),
            ("nb2", &self.nb2),
            ("modes", &self.modes),
            ("wavelength", &self.wavelength),
            ("bandwidth", &self.bandwidth),
            ("nmax", &self.nmax),
            ("pmax", &self.pmax),
        ]
    }
}

#[derive(Args)]
struct PowerArgs {
    /// Mean photons per mode.
    #[arg(long)]
    ns: f64,
    /// Carrier wavelength in metres.
    #[arg(long, conflicts_with = "omega", required_unless_present = "omega")]
    wavelength: Option<f64>,
    /// Carrier angular frequency in rad/s.
    #[arg(long)]
    omega: Option<f64>,
    /// Bandwidth in Hz.
    #[arg(long)]
    bandwidth: f64,
    #[arg(long)]
    nmax: Option<f64>,
    /// Power threshold in watts.
    #[arg(long)]
    pmax: Option<f64>,
    #[arg(long)]
    json: bool,
}

fn parse_list(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| Error::ConfigParse(format!("--{key}: {s:?} is not a number ({e})")))
        })
        .collect()
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), _) => SweepConfig::from_path(path)?,
        (None, Some(name)) => SweepConfig::new(name.parse()?),
        (None, None) => return Err(Error::ConfigParse("give a scenario name or --config".into())),
    };
    // flags win over the file
    if let Some(name) = &args.scenario {
        cfg.scenario = name.parse::<Scenario>()?;
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        };
    }
    if args.out.is_some() {
        cfg.out.clone_from(&args.out);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    if args.cutoff.is_some() {
        cfg.cutoff = args.cutoff;
    }
    if let Some(f) = &args.fixture {
        let f: Fixture = serde_json::from_value(serde_json::Value::String(f.clone()))
            .map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.fixture = Some(f);
    }
    if let Some(r) = &args.reading {
        cfg.theorem4_reading =
            r.parse::<Theorem4Reading>().map_err(|e| Error::ConfigParse(e.to_string()))?;
    }
    if args.grid_spacing.is_some() || args.grid_extent.is_some() {
        let mut g = cfg.grid.unwrap_or_default();
        g.spacing = args.grid_spacing.or(g.spacing);
        g.extent = args.grid_extent.or(g.extent);
        cfg.grid = Some(g);
    }
    for (key, value) in args.lists.pairs() {
        if let Some(text) = value {
            cfg.params.insert(key.to_string(), parse_list(key, text)?);
        }
    }
    for p in &args.params {
        let (key, text) = p
            .split_once('=')
            .ok_or_else(|| Error::ConfigParse(format!("--param {p:?} is not KEY=LIST")))?;
        cfg.params.insert(key.trim().to_string(), parse_list(key, text)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_output<F>(out: Option<&Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
        }
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let mut opts = VerifyOptions::default();
    if let Some(s) = args.seed {
        opts.seed = s;
    }
    if let Some(t) = args.trials {
        opts.trials = t;
    }
    if args.mutate_theorem2_sign {
        opts.theorem2_bound = verify::sign_flipped_theorem2;
    }
    let summary = verify::verify_all(&opts);
    let json = matches!(args.format, Some(OutFormat::Json));
    if !json || args.out.is_some() {
        for c in &summary.checks {
            let measured: Vec<String> = c.measured.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
            println!(
                "{} {:>2} {:<28} {:>8.2}s  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                c.seconds,
                measured.join(" ")
            );
            if !c.detail.is_empty() {
                println!("        {}", c.detail);
            }
        }
        println!(
            "{} of {} checks passed; total runtime {:.2} s",
            summary.checks.iter().filter(|c| c.passed).count(),
            summary.checks.len(),
            summary.total_seconds
        );
    }
    if json || args.out.is_some() {
        with_output(args.out.as_deref(), |w| {
            serde_json::to_writer_pretty(&mut *w, &summary).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
            Ok(())
        })?;
    }
    Ok(summary.passed)
}

fn run_sweep(args: &SweepArgs) -> Result<bool> {
    let cfg = sweep_config(args)?;
    let report = scenario::run_scenario(&cfg)?;
    with_output(cfg.out.as_deref(), |w| report.write(cfg.format, w))?;
    let s = &report.summary;
    eprintln!(
        "{}: {} rows, {} asserted, {} failed",
        s.scenario, s.rows, s.asserted, s.failed
    );
    Ok(report.passed())
}

fn run_power(args: &PowerArgs) -> Result<bool> {
    let carrier = match (args.wavelength, args.omega) {
        (Some(l), _) => Carrier::Wavelength(l),
        (None, Some(w)) => Carrier::AngularFrequency(w),
        (None, None) => unreachable!("clap requires one carrier"),
    };
    let r = power::power_calc(args.ns, carrier, args.bandwidth, args.nmax, args.pmax)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.to_string()))?);
    } else {
        println!("omega0             {:.6e} rad/s", r.omega0);
        println!("power              {:.6e} W", r.power_watts);
        println!("power              {:.3} dBm", r.power_dbm);
        println!("photons per second {:.6e}", r.photons_per_second);
        if let Some(met) = r.constraint_met {
            println!("constraint         {}", if met { "met" } else { "violated" });
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Power(a) => run_power(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
