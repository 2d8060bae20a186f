//! PAM4 alphabet, gray labelling, symbol generation and the link
//! configuration shared by every stage of the simulator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::sir_to_rho;
use crate::phase_noise;
use crate::{Error, Result};

/// PAM4 amplitudes `𝒟`, indexed by symbol index.
pub const LEVELS: [f64; 4] = [-1.5, -0.5, 0.5, 1.5];

/// Mean data power `E[d²]` of uniformly distributed PAM4 symbols.
pub const DATA_POWER: f64 = 1.25;

/// Sub-stream offsets added to a seed to decorrelate the random streams of
/// one simulation point.
pub const SYMBOL_SEED_OFFSET: u64 = 1;
pub const PHASE_SEED_OFFSET: u64 = 2;
pub const NOISE_SEED_OFFSET: u64 = 3;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One PAM4 symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pam4Level(u8);

impl Pam4Level {
    pub const ALL: [Pam4Level; 4] = [Pam4Level(0), Pam4Level(1), Pam4Level(2), Pam4Level(3)];

    pub fn new(index: u8) -> Result<Self> {
        if index < 4 {
            Ok(Pam4Level(index))
        } else {
            Err(Error::domain(format!(
                "PAM4 index {index} out of range 0..4"
            )))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// `index − 1.5`.
    pub fn amplitude(self) -> f64 {
        LEVELS[self.0 as usize]
    }

    pub fn bits(self) -> u8 {
        GRAY[self.0 as usize]
    }
}

// Reflected binary code: adjacent amplitudes differ in one bit.
const GRAY: [u8; 4] = [0b00, 0b01, 0b11, 0b10];

/// Gray label of a symbol index: 0 → 00, 1 → 01, 2 → 11, 3 → 10.
pub fn gray_map(index: u8) -> Result<u8> {
    Pam4Level::new(index).map(Pam4Level::bits)
}

pub fn gray_unmap(bits: u8) -> Result<u8> {
    GRAY.iter()
        .position(|&g| g == bits)
        .map(|i| i as u8)
        .ok_or_else(|| Error::domain(format!("gray label {bits:#04b} is not a 2-bit value")))
}

/// Extinction ratio in dB of the biased PAM4 stream,
/// `10·log10((V_b + 1.5)/(V_b − 1.5))`.
pub fn extinction_ratio_db(bias_vb: f64) -> Result<f64> {
    check_bias(bias_vb)?;
    Ok(10.0 * ((bias_vb + 1.5) / (bias_vb - 1.5)).log10())
}

pub(crate) fn check_bias(bias_vb: f64) -> Result<()> {
    if bias_vb.is_finite() && bias_vb > 1.5 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "bias V_b = {bias_vb} must exceed 1.5 so every optical power level is positive"
        )))
    }
}

/// Transmitted symbols with their amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    pub indices: Vec<u8>,
    pub levels: Vec<f64>,
}

impl SymbolStream {
    pub fn from_indices(indices: Vec<u8>) -> Result<Self> {
        let levels = indices
            .iter()
            .map(|&i| Pam4Level::new(i).map(Pam4Level::amplitude))
            .collect::<Result<Vec<_>>>()?;
        Ok(SymbolStream { indices, levels })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// I.i.d. uniform PAM4 symbols from a ChaCha8 stream seeded with `seed`.
pub fn generate_symbols(count: usize, seed: u64) -> Result<SymbolStream> {
    if count == 0 {
        return Err(Error::EmptyStream);
    }
    let mut rng = rng_from_seed(seed);
    let indices: Vec<u8> = (0..count).map(|_| rng.gen_range(0..4u8)).collect();
    let levels = indices.iter().map(|&i| LEVELS[i as usize]).collect();
    Ok(SymbolStream { indices, levels })
}

/// Reflection delay, either as a physical round-trip path length or as a
/// whole number of symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelaySpec {
    PathLength { meters: f64 },
    Symbols(usize),
}

/// Full parameterization of one simulation point.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub baud_rate: f64,
    /// Measured symbols, not counting the reflection lead-in.
    pub num_symbols: usize,
    pub bias_vb: f64,
    pub linewidth_hz: f64,
    pub fiber_index: f64,
    pub sir_db: f64,
    /// When false the reflection is switched off (`ρ = 0`).
    pub mpi_enabled: bool,
    pub phi_rad: f64,
    pub delay: DelaySpec,
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub train_len: usize,
    /// LMS step of the feedforward taps.
    pub step_w: f64,
    /// LMS step of the bias tap.
    pub step_b: f64,
    /// Equalizer tap leakage per symbol.
    pub leakage: f64,
    pub master_seed: u64,
    /// Retain the MPI and noise terms in the channel output.
    pub diagnostics: bool,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            baud_rate: 106.25e9,
            num_symbols: 900_000,
            bias_vb: 3.5,
            linewidth_hz: 5.0e6,
            fiber_index: phase_noise::DEFAULT_FIBER_INDEX,
            sir_db: 20.0,
            mpi_enabled: true,
            phi_rad: 0.0,
            delay: DelaySpec::Symbols(0),
            snr_db: 18.0,
            train_len: 10_000,
            step_w: crate::equalizer::DEFAULT_STEP_W,
            step_b: crate::equalizer::DEFAULT_STEP_B,
            leakage: crate::equalizer::DEFAULT_LEAKAGE,
            master_seed: 0,
            diagnostics: false,
        }
    }
}

impl LinkConfig {
    pub fn symbol_period(&self) -> f64 {
        1.0 / self.baud_rate
    }

    /// Reflection amplitude ratio, zero when MPI is off.
    pub fn rho(&self) -> Result<f64> {
        if self.mpi_enabled {
            sir_to_rho(self.sir_db)
        } else {
            Ok(0.0)
        }
    }

    pub fn delay_symbols(&self) -> usize {
        match self.delay {
            DelaySpec::Symbols(d) => d,
            DelaySpec::PathLength { meters } => {
                phase_noise::delay_symbols(meters, self.fiber_index, self.baud_rate)
            }
        }
    }

    /// Symbols excluded from error counting at the start of the measured
    /// range: equalizer training and the first reflection delay.
    pub fn warmup_symbols(&self) -> usize {
        self.train_len.max(self.delay_symbols())
    }

    pub fn validate(&self) -> Result<()> {
        check_bias(self.bias_vb)?;
        if !(self.baud_rate.is_finite() && self.baud_rate > 0.0) {
            return Err(Error::Config(format!(
                "baud rate {} must be positive",
                self.baud_rate
            )));
        }
        if !(self.linewidth_hz.is_finite() && self.linewidth_hz >= 0.0) {
            return Err(Error::Config(format!(
                "linewidth {} Hz must be non-negative",
                self.linewidth_hz
            )));
        }
        if !(self.fiber_index.is_finite() && self.fiber_index >= 1.0) {
            return Err(Error::Config(format!(
                "fiber group index {} must be at least 1",
                self.fiber_index
            )));
        }
        if !self.phi_rad.is_finite() {
            return Err(Error::Config("phase offset must be finite".into()));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::Config(format!(
                "SNR {} dB is not usable",
                self.snr_db
            )));
        }
        if let DelaySpec::PathLength { meters } = self.delay {
            if !(meters.is_finite() && meters >= 0.0) {
                return Err(Error::Config(format!(
                    "path length {meters} m must be non-negative"
                )));
            }
        }
        self.rho()?;
        let delay = self.delay_symbols();
        if self.num_symbols <= self.train_len + delay {
            return Err(Error::Config(format!(
                "num_symbols {} must exceed train_len {} + delay {}",
                self.num_symbols, self.train_len, delay
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_index_conversion_is_exact() {
        for level in Pam4Level::ALL {
            assert_eq!(level.amplitude(), level.index() as f64 - 1.5);
            assert_eq!(gray_unmap(level.bits()).unwrap(), level.index());
        }
        assert!(Pam4Level::new(4).is_err());
    }

    #[test]
    fn gray_labels() {
        let labels: Vec<u8> = (0..4).map(|i| gray_map(i).unwrap()).collect();
        assert_eq!(labels, vec![0b00, 0b01, 0b11, 0b10]);
        for pair in labels.windows(2) {
            assert_eq!((pair[0] ^ pair[1]).count_ones(), 1);
        }
        assert!(gray_map(4).is_err());
        assert!(gray_unmap(4).is_err());
    }

    #[test]
    fn extinction_ratio() {
        let er = extinction_ratio_db(3.5).unwrap();
        assert!((er - 10.0 * 2.5f64.log10()).abs() < 1e-12);
        assert!((er - 3.979).abs() < 5e-4);
        assert!((extinction_ratio_db(2.5).unwrap() - 6.0206).abs() < 1e-4);
        assert!(extinction_ratio_db(1e9).unwrap() < 1e-7);
        assert!(extinction_ratio_db(1.5).is_err());
        assert!(extinction_ratio_db(0.0).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_symbols(4, 42).unwrap();
        let b = generate_symbols(4, 42).unwrap();
        assert_eq!(a, b);
        let one = generate_symbols(1, 7).unwrap();
        assert!(one.indices[0] < 4);
        assert!(matches!(generate_symbols(0, 1), Err(Error::EmptyStream)));
        for (i, l) in a.indices.iter().zip(&a.levels) {
            assert_eq!(*l, *i as f64 - 1.5);
        }
    }

    #[test]
    fn symbol_frequencies_are_uniform() {
        let n = 1_000_000;
        let s = generate_symbols(n, 2024).unwrap();
        let mut counts = [0usize; 4];
        for &i in &s.indices {
            counts[i as usize] += 1;
        }
        let expected = n as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 3 dof, 99.9% quantile
        assert!(chi2 < 16.27, "chi2 = {chi2}");
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.0025);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = LinkConfig::default();
        cfg.validate().unwrap();
        cfg.bias_vb = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = LinkConfig {
            num_symbols: 10_000,
            ..LinkConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.num_symbols = 10_001;
        cfg.validate().unwrap();
        cfg.delay = DelaySpec::Symbols(1);
        assert!(cfg.validate().is_err());
        let off = LinkConfig {
            mpi_enabled: false,
            ..LinkConfig::default()
        };
        assert_eq!(off.rho().unwrap(), 0.0);
    }
}
