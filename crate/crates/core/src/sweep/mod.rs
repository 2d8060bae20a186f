//! End-to-end simulation of one operating point and of parameter grids.

mod config;
mod csv;
mod plot;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

pub use self::config::{parse_config, parse_list, ConfigFile};
pub use self::csv::{read_csv, write_csv, write_rows, SweepRow, CSV_HEADER};
pub use self::plot::{emit_plots, plot_regime};

use crate::channel::{add_awgn, apply_mpi, ChannelOutput};
use crate::equalizer::{equalize, Equalized, EqualizerConfig};
use crate::metrics::{count_bit_errors, BerRecord, BitErrorCount};
use crate::phase_noise::{coherence_length_m, delayed_difference, envelope_b, wiener_phase};
use crate::signal::{
    generate_symbols, DelaySpec, LinkConfig, SymbolStream, NOISE_SEED_OFFSET, PHASE_SEED_OFFSET,
    SYMBOL_SEED_OFFSET,
};
use crate::{Error, Result};

/// Every intermediate product of one simulated operating point.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: LinkConfig,
    pub rho: f64,
    pub delay_symbols: usize,
    /// Transmitted stream including the reflection lead-in.
    pub stream: SymbolStream,
    /// Beat envelope `B[n]` for each measured symbol.
    pub envelope: Vec<f64>,
    pub channel: ChannelOutput,
    pub equalized: Equalized,
    pub errors: BitErrorCount,
}

/// Runs the full chain for `config`. Symbol, phase and noise streams are
/// seeded with `master_seed + 1`, `+ 2` and `+ 3`.
pub fn simulate(config: &LinkConfig) -> Result<Simulation> {
    config.validate()?;
    let rho = config.rho()?;
    let delay = config.delay_symbols();
    let total = config.num_symbols + delay;
    let seed = config.master_seed;

    let stream = generate_symbols(total, seed.wrapping_add(SYMBOL_SEED_OFFSET))?;
    let phase = wiener_phase(
        total,
        config.linewidth_hz,
        config.symbol_period(),
        seed.wrapping_add(PHASE_SEED_OFFSET),
    )?;
    let envelope: Vec<f64> = delayed_difference(&phase, delay)?
        .into_iter()
        .map(|dt| envelope_b(config.phi_rad, dt))
        .collect();
    drop(phase);

    let clean = apply_mpi(
        &stream.indices,
        &stream.levels,
        config.bias_vb,
        rho,
        delay,
        &envelope,
        config.diagnostics,
    )?;
    let channel = add_awgn(clean, config.snr_db, seed.wrapping_add(NOISE_SEED_OFFSET))?;

    let eq_config = EqualizerConfig {
        step_w: config.step_w,
        step_b: config.step_b,
        leakage: config.leakage,
        ..EqualizerConfig::for_bias(config.bias_vb, config.train_len)
    };
    let equalized = equalize(&channel.samples, &channel.truth, &eq_config)?;
    let errors = count_bit_errors(
        &channel.truth,
        &equalized.decisions,
        config.warmup_symbols(),
    )?;

    Ok(Simulation {
        config: config.clone(),
        rho,
        delay_symbols: delay,
        stream,
        envelope,
        channel,
        equalized,
        errors,
    })
}

/// BER of one operating point.
pub fn run_point(config: &LinkConfig) -> Result<BerRecord> {
    let sim = simulate(config)?;
    Ok(BerRecord::new(sim.errors, sim.config))
}

/// Grid of operating points sharing one base configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Phase offsets in units of π.
    pub phi_over_pi: Vec<f64>,
    pub sir_db: Vec<f64>,
    /// Round-trip path length in units of the coherence length.
    pub l_over_lc: Vec<f64>,
    pub num_symbols: Vec<usize>,
    pub snr_db: f64,
    pub base: LinkConfig,
    pub master_seed: u64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            phi_over_pi: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            sir_db: (0..9).map(|i| 14.0 + 2.0 * i as f64).collect(),
            l_over_lc: vec![0.1, 1.0, 10.0],
            num_symbols: vec![900_000],
            snr_db: 18.0,
            base: LinkConfig::default(),
            master_seed: 1,
        }
    }
}

/// Position of a cell along each grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex {
    pub regime: usize,
    pub size: usize,
    pub phi: usize,
    pub sir: usize,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of a grid cell: splitmix64 folded over the `(sir, regime, size)`
/// indices, starting from `master_seed`.
///
/// The phase offset index is left out, so every Φ of a given
/// (SIR, L/L_c, N) point sees the same symbols, phase walk and noise and
/// differs only by the offset added to the reflection phase.
pub fn cell_seed(master_seed: u64, cell: CellIndex) -> u64 {
    [cell.sir, cell.regime, cell.size]
        .iter()
        .fold(splitmix64(master_seed), |acc, &i| {
            splitmix64(acc ^ i as u64)
        })
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.phi_over_pi.len() * self.sir_db.len() * self.l_over_lc.len() * self.num_symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("phi", self.phi_over_pi.is_empty()),
            ("sir-db", self.sir_db.is_empty()),
            ("l-over-lc", self.l_over_lc.is_empty()),
            ("num-symbols", self.num_symbols.is_empty()),
        ] {
            if empty {
                return Err(Error::Config(format!("grid list {name} is empty")));
            }
        }
        if self.l_over_lc.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::Config(
                "l-over-lc values must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Cells in canonical order.
    pub fn cells(&self) -> Vec<CellIndex> {
        let mut cells = Vec::with_capacity(self.len());
        for regime in 0..self.l_over_lc.len() {
            for size in 0..self.num_symbols.len() {
                for phi in 0..self.phi_over_pi.len() {
                    for sir in 0..self.sir_db.len() {
                        cells.push(CellIndex {
                            regime,
                            size,
                            phi,
                            sir,
                        });
                    }
                }
            }
        }
        cells
    }

    pub fn cell_config(&self, cell: CellIndex) -> Result<LinkConfig> {
        let lc = coherence_length_m(self.base.linewidth_hz, self.base.fiber_index)?;
        Ok(LinkConfig {
            num_symbols: self.num_symbols[cell.size],
            sir_db: self.sir_db[cell.sir],
            mpi_enabled: true,
            phi_rad: self.phi_over_pi[cell.phi] * PI,
            delay: DelaySpec::PathLength {
                meters: self.l_over_lc[cell.regime] * lc,
            },
            snr_db: self.snr_db,
            master_seed: cell_seed(self.master_seed, cell),
            diagnostics: false,
            ..self.base.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub cell: CellIndex,
    pub l_over_lc: f64,
    pub phi_over_pi: f64,
    pub record: BerRecord,
    pub elapsed: Duration,
}

impl SweepPoint {
    pub fn row(&self) -> SweepRow {
        let r = &self.record;
        SweepRow {
            l_over_lc: self.l_over_lc,
            phi_over_pi: self.phi_over_pi,
            sir_db: r.config.sir_db,
            snr_db: r.config.snr_db,
            num_symbols: r.config.num_symbols as u64,
            seed: r.config.master_seed,
            bit_errors: r.bit_errors,
            total_bits: r.total_bits,
            ber: r.ber,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub grid: SweepGrid,
    /// One point per grid cell, in canonical cell order.
    pub records: Vec<SweepPoint>,
    pub version: &'static str,
}

impl SweepResult {
    pub fn rows(&self) -> Vec<SweepRow> {
        self.records.iter().map(SweepPoint::row).collect()
    }

    pub fn find(
        &self,
        l_over_lc: f64,
        phi_over_pi: f64,
        sir_db: f64,
        num_symbols: usize,
    ) -> Option<&SweepPoint> {
        self.records.iter().find(|p| {
            p.l_over_lc == l_over_lc
                && p.phi_over_pi == phi_over_pi
                && p.record.config.sir_db == sir_db
                && p.record.config.num_symbols == num_symbols
        })
    }
}

/// A failed sweep: the first failing cell in canonical order, plus every
/// point that completed.
#[derive(Debug, thiserror::Error)]
#[error("sweep cell {cell:?} failed: {source}")]
pub struct SweepError {
    pub cell: CellIndex,
    pub config: Option<Box<LinkConfig>>,
    #[source]
    pub source: Error,
    pub partial: Vec<SweepPoint>,
}

/// A failed cell carries the configuration it ran with, when one was built.
type CellOutcome = std::result::Result<SweepPoint, Box<(Option<LinkConfig>, Error)>>;

fn run_cell(grid: &SweepGrid, cell: CellIndex) -> CellOutcome {
    let config = grid.cell_config(cell).map_err(|e| Box::new((None, e)))?;
    let start = Instant::now();
    let record = run_point(&config).map_err(|e| Box::new((Some(config.clone()), e)))?;
    Ok(SweepPoint {
        cell,
        l_over_lc: grid.l_over_lc[cell.regime],
        phi_over_pi: grid.phi_over_pi[cell.phi],
        record,
        elapsed: start.elapsed(),
    })
}

fn collect(
    grid: &SweepGrid,
    outcomes: Vec<(CellIndex, CellOutcome)>,
) -> std::result::Result<SweepResult, SweepError> {
    let mut points = Vec::with_capacity(outcomes.len());
    let mut failure = None;
    for (cell, outcome) in outcomes {
        match outcome {
            Ok(p) => points.push(p),
            Err(failed) => {
                let (config, source) = *failed;
                failure.get_or_insert((cell, config.map(Box::new), source));
            }
        }
    }
    points.sort_by_key(|p| p.cell);
    match failure {
        Some((cell, config, source)) => Err(SweepError {
            cell,
            config,
            source,
            partial: points,
        }),
        None => Ok(SweepResult {
            grid: grid.clone(),
            records: points,
            version: env!("CARGO_PKG_VERSION"),
        }),
    }
}

fn grid_error(source: Error) -> SweepError {
    SweepError {
        cell: CellIndex {
            regime: 0,
            size: 0,
            phi: 0,
            sir: 0,
        },
        config: None,
        source,
        partial: Vec::new(),
    }
}

/// Runs every cell on the calling thread, stopping at the first failure.
pub fn run_sweep_sequential(grid: &SweepGrid) -> std::result::Result<SweepResult, SweepError> {
    grid.validate().map_err(grid_error)?;
    let mut outcomes = Vec::with_capacity(grid.len());
    for cell in grid.cells() {
        let outcome = run_cell(grid, cell);
        let failed = outcome.is_err();
        outcomes.push((cell, outcome));
        if failed {
            break;
        }
    }
    collect(grid, outcomes)
}

/// Runs every cell on a dedicated rayon pool of `parallelism` threads.
#[cfg(feature = "parallel")]
pub fn run_sweep_parallel(
    grid: &SweepGrid,
    parallelism: usize,
) -> std::result::Result<SweepResult, SweepError> {
    use rayon::prelude::*;

    grid.validate().map_err(grid_error)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| grid_error(Error::Config(format!("thread pool: {e}"))))?;
    let cells = grid.cells();
    let outcomes = pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| (cell, run_cell(grid, cell)))
            .collect::<Vec<_>>()
    });
    collect(grid, outcomes)
}

/// Runs the grid with up to `parallelism` workers. Cell seeds depend only on
/// grid coordinates, so the result is identical for any worker count.
pub fn run_sweep(
    grid: &SweepGrid,
    parallelism: usize,
) -> std::result::Result<SweepResult, SweepError> {
    if parallelism == 0 {
        return Err(grid_error(Error::Config(
            "parallelism must be at least 1".into(),
        )));
    }
    #[cfg(feature = "parallel")]
    if parallelism > 1 {
        return run_sweep_parallel(grid, parallelism);
    }
    run_sweep_sequential(grid)
}
