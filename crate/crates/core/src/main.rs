use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use mpi_pam4::metrics::write_waveform_csv;
use mpi_pam4::sweep::{emit_plots, read_csv, write_csv, ConfigFile, SweepRow};
use mpi_pam4::{
    coherence_length_m, dump_waveform, run_point, run_sweep, simulate, DelaySpec, Error,
    LinkConfig, SweepGrid,
};

#[derive(Debug, Parser)]
#[command(
    name = "mpi-pam4",
    version,
    about = "Multipath interference in PAM4 optical links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a single operating point and print its BER
    Run(PointArgs),
    /// Run a grid of operating points, write CSV and plots
    Sweep(SweepArgs),
    /// Dump received samples and reference level curves for one point
    Waveform(WaveformArgs),
    /// Regenerate plots from a sweep CSV
    Plot(PlotArgs),
}

/// Link parameters shared by the single-point commands.
#[derive(Debug, Args)]
struct PointArgs {
    /// key = value configuration file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Phase offset in units of π
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    sir_db: Option<f64>,
    /// Disable the reflection
    #[arg(long)]
    mpi_off: bool,
    /// Round-trip path length in units of the coherence length
    #[arg(long, conflicts_with = "delay_symbols")]
    l_over_lc: Option<f64>,
    /// Reflection delay in whole symbols
    #[arg(long)]
    delay_symbols: Option<usize>,
    #[arg(long)]
    num_symbols: Option<usize>,
    /// Use "inf" to disable noise
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long)]
    linewidth_hz: Option<f64>,
    #[arg(long)]
    bias_vb: Option<f64>,
    #[arg(long)]
    train_len: Option<usize>,
    /// Equalizer tap leakage per symbol
    #[arg(long)]
    leakage: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    diagnostics: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Phase offsets in units of π, comma separated
    #[arg(long, value_delimiter = ',')]
    phi: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    sir_db: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    l_over_lc: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    num_symbols: Option<Vec<usize>>,
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long)]
    linewidth_hz: Option<f64>,
    #[arg(long)]
    leakage: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for sweep.csv and plots
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    no_plots: bool,
}

#[derive(Debug, Args)]
struct WaveformArgs {
    #[command(flatten)]
    point: PointArgs,
    /// First measured symbol of the window
    #[arg(long, default_value_t = 20_000)]
    start: usize,
    #[arg(long, default_value_t = 1_000)]
    len: usize,
    /// Output CSV file
    #[arg(long, default_value = "waveform.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV to plot
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn load(path: Option<&Path>) -> Result<ConfigFile, Error> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn point_config(args: &PointArgs) -> Result<LinkConfig, Error> {
    let file = load(args.config.as_deref())?;
    let mut cfg = LinkConfig::default();
    let pick_f64 = |flag: Option<f64>, key: &str| -> Result<Option<f64>, Error> {
        Ok(flag.or(file.get::<f64>(key)?))
    };
    if let Some(v) = pick_f64(args.phi, "phi")? {
        cfg.phi_rad = v * PI;
    }
    if let Some(v) = pick_f64(args.sir_db, "sir-db")? {
        cfg.sir_db = v;
    }
    if args.mpi_off || file.get::<bool>("mpi-off")?.unwrap_or(false) {
        cfg.mpi_enabled = false;
    }
    if let Some(v) = pick_f64(args.snr_db, "snr-db")? {
        cfg.snr_db = v;
    }
    if let Some(v) = pick_f64(args.linewidth_hz, "linewidth-hz")? {
        cfg.linewidth_hz = v;
    }
    if let Some(v) = pick_f64(args.bias_vb, "bias-vb")? {
        cfg.bias_vb = v;
    }
    if let Some(v) = args.num_symbols.or(file.get("num-symbols")?) {
        cfg.num_symbols = v;
    }
    if let Some(v) = args.train_len.or(file.get("train-len")?) {
        cfg.train_len = v;
    }
    if let Some(v) = pick_f64(args.leakage, "leakage")? {
        cfg.leakage = v;
    }
    if let Some(v) = args.seed.or(file.get("seed")?) {
        cfg.master_seed = v;
    }
    cfg.diagnostics = args.diagnostics || file.get::<bool>("diagnostics")?.unwrap_or(false);

    let delay = args.delay_symbols.or(file.get("delay-symbols")?);
    let l_over_lc = pick_f64(args.l_over_lc, "l-over-lc")?;
    cfg.delay = match (args.delay_symbols, args.l_over_lc, delay, l_over_lc) {
        (Some(d), _, _, _) => DelaySpec::Symbols(d),
        (None, Some(l), _, _) | (None, None, None, Some(l)) => DelaySpec::PathLength {
            meters: l * coherence_length_m(cfg.linewidth_hz, cfg.fiber_index)?,
        },
        (None, None, Some(d), _) => DelaySpec::Symbols(d),
        (None, None, None, None) => DelaySpec::PathLength {
            meters: 0.1 * coherence_length_m(cfg.linewidth_hz, cfg.fiber_index)?,
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: &PointArgs) -> Result<(), Error> {
    let cfg = point_config(args)?;
    let record = run_point(&cfg)?;
    println!("phi_over_pi      {}", cfg.phi_rad / PI);
    println!(
        "sir_db           {}",
        if cfg.mpi_enabled {
            cfg.sir_db.to_string()
        } else {
            "off".into()
        }
    );
    println!("snr_db           {}", cfg.snr_db);
    println!("delay_symbols    {}", cfg.delay_symbols());
    println!("measured_symbols {}", record.measured_symbols);
    println!("bit_errors       {}", record.bit_errors);
    println!("total_bits       {}", record.total_bits);
    println!("ber              {:e}", record.ber);
    println!(
        "ci95             [{:e}, {:e}]",
        record.ci_low, record.ci_high
    );
    Ok(())
}

fn sweep_grid(args: &SweepArgs, file: &ConfigFile) -> Result<SweepGrid, Error> {
    let mut grid = SweepGrid::default();
    if let Some(v) = args.phi.clone().or(file.get_list("phi")?) {
        grid.phi_over_pi = v;
    }
    if let Some(v) = args.sir_db.clone().or(file.get_list("sir-db")?) {
        grid.sir_db = v;
    }
    if let Some(v) = args.l_over_lc.clone().or(file.get_list("l-over-lc")?) {
        grid.l_over_lc = v;
    }
    if let Some(v) = args.num_symbols.clone().or(file.get_list("num-symbols")?) {
        grid.num_symbols = v;
    }
    if let Some(v) = args.snr_db.or(file.get("snr-db")?) {
        grid.snr_db = v;
    }
    if let Some(v) = args.linewidth_hz.or(file.get("linewidth-hz")?) {
        grid.base.linewidth_hz = v;
    }
    if let Some(v) = args.leakage.or(file.get("leakage")?) {
        grid.base.leakage = v;
    }
    if let Some(v) = args.seed.or(file.get("seed")?) {
        grid.master_seed = v;
    }
    grid.validate()?;
    Ok(grid)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let file = load(args.config.as_deref())?;
    let grid = sweep_grid(args, &file)?;
    let out = args
        .out
        .clone()
        .or(file.get::<PathBuf>("out")?)
        .unwrap_or_else(|| PathBuf::from("sweep-out"));
    let parallelism = match args.parallelism.or(file.get("parallelism")?) {
        Some(p) => p,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    std::fs::create_dir_all(&out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;

    eprintln!("running {} points with {parallelism} workers", grid.len());
    let start = Instant::now();
    let csv_path = out.join("sweep.csv");
    let result = match run_sweep(&grid, parallelism) {
        Ok(r) => r,
        Err(err) => {
            let partial: Vec<SweepRow> = err.partial.iter().map(|p| p.row()).collect();
            let manifest = out.join("partial.csv");
            write_csv(&partial, &manifest)?;
            eprintln!(
                "{} completed points written to {}",
                partial.len(),
                manifest.display()
            );
            if let Some(cfg) = &err.config {
                eprintln!("failing configuration: {cfg:?}");
            }
            eprintln!("cell {:?}", err.cell);
            return Err(err.source);
        }
    };
    let rows = result.rows();
    write_csv(&rows, &csv_path)?;
    eprintln!(
        "wrote {} ({:.1} s)",
        csv_path.display(),
        start.elapsed().as_secs_f64()
    );
    if !args.no_plots {
        for path in emit_plots(&rows, &out)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_waveform(args: &WaveformArgs) -> Result<(), Error> {
    let mut cfg = point_config(&args.point)?;
    cfg.diagnostics = true;
    let sim = simulate(&cfg)?;
    let rows = dump_waveform(
        &sim.channel,
        &sim.envelope,
        sim.rho,
        cfg.bias_vb,
        args.start..args.start.saturating_add(args.len),
    )?;
    write_waveform_csv(&rows, &args.out)?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<(), Error> {
    let rows = read_csv(&args.csv)?;
    for path in emit_plots(&rows, &args.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Waveform(a) => cmd_waveform(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
