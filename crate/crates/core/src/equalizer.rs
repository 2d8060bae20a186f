//! Feedforward equalizer with an adaptive bias tap, trained by LMS.
//!
//! The equalizer targets the zero-mean PAM4 levels; the bias tap removes the
//! optical bias and follows the slow MPI-induced bias drift. It is trained
//! on known symbols for `train_len` symbols and then runs decision-directed.
//! There is no decision feedback.
//!
//! The taps leak slowly towards their initial identity setting. Without it,
//! decision-directed adaptation through a deeply contracted eye can settle
//! in an equilibrium where two levels merge and never recover.

use crate::signal::LEVELS;
use crate::{Error, Result};

pub const DEFAULT_STEP_W: f64 = 5e-4;
pub const DEFAULT_STEP_B: f64 = 5e-4;
pub const DEFAULT_LEAKAGE: f64 = 5e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerConfig {
    pub num_taps: usize,
    pub step_w: f64,
    pub step_b: f64,
    /// Per-symbol pull of the taps towards center 1, others 0.
    pub leakage: f64,
    pub train_len: usize,
    /// Initial bias tap value, normally `−V_b`.
    pub bias_init: f64,
    /// Largest tap or output magnitude tolerated before reporting divergence.
    pub guard: f64,
}

impl Default for EqualizerConfig {
    fn default() -> Self {
        EqualizerConfig {
            num_taps: 15,
            step_w: DEFAULT_STEP_W,
            step_b: DEFAULT_STEP_B,
            leakage: DEFAULT_LEAKAGE,
            train_len: 10_000,
            bias_init: -3.5,
            guard: 1e6,
        }
    }
}

impl EqualizerConfig {
    pub fn for_bias(bias_vb: f64, train_len: usize) -> Self {
        EqualizerConfig {
            bias_init: -bias_vb,
            train_len,
            ..EqualizerConfig::default()
        }
    }

    pub fn center(&self) -> usize {
        self.num_taps / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_taps == 0 || self.num_taps.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "equalizer tap count {} must be odd",
                self.num_taps
            )));
        }
        if !(self.step_w > 0.0 && self.step_b > 0.0) {
            return Err(Error::Config("LMS steps must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.leakage) {
            return Err(Error::Config(format!(
                "leakage {} outside [0, 1)",
                self.leakage
            )));
        }
        if self.train_len < self.num_taps {
            return Err(Error::Config(format!(
                "training length {} shorter than the tap count {}",
                self.train_len, self.num_taps
            )));
        }
        if !self.bias_init.is_finite() || self.guard.is_nan() || self.guard <= 0.0 {
            return Err(Error::Config(
                "bias init and guard must be finite and positive".into(),
            ));
        }
        Ok(())
    }
}

/// Tap weights and bias tap.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerState {
    pub w: Vec<f64>,
    pub b: f64,
}

impl EqualizerState {
    /// Center tap 1, other taps 0, bias tap at `config.bias_init`.
    pub fn initial(config: &EqualizerConfig) -> Self {
        let mut w = vec![0.0; config.num_taps];
        w[config.center()] = 1.0;
        EqualizerState {
            w,
            b: config.bias_init,
        }
    }

    /// Filter output for a window ordered oldest to newest, so `w[k]`
    /// multiplies `y[n − k + center]`.
    #[inline]
    pub fn output(&self, window: &[f64]) -> f64 {
        debug_assert_eq!(window.len(), self.w.len());
        self.w
            .iter()
            .zip(window.iter().rev())
            .map(|(w, y)| w * y)
            .sum::<f64>()
            + self.b
    }

    /// One LMS update towards `reference`. Returns `(soft, error)` where the
    /// soft value was computed before the update.
    #[inline]
    pub fn update(
        &mut self,
        window: &[f64],
        reference: f64,
        config: &EqualizerConfig,
    ) -> (f64, f64) {
        let soft = self.output(window);
        let err = reference - soft;
        self.adapt(window, err, config);
        (soft, err)
    }

    /// Returns the largest tap magnitude after the update.
    #[inline]
    fn adapt(&mut self, window: &[f64], err: f64, config: &EqualizerConfig) -> f64 {
        let gain = config.step_w * err;
        let keep = 1.0 - config.leakage;
        let center = self.w.len() / 2;
        let mut largest = 0.0f64;
        for (k, (w, y)) in self.w.iter_mut().zip(window.iter().rev()).enumerate() {
            *w = keep * *w + gain * y;
            if k == center {
                *w += config.leakage;
            }
            largest = largest.max(w.abs());
        }
        self.b += config.step_b * err;
        largest.max(self.b.abs())
    }
}

/// Nearest PAM4 level; ties at −1, 0 and +1 go to the higher level.
#[inline]
pub fn slicer(soft: f64) -> Result<u8> {
    if !soft.is_finite() {
        return Err(Error::Decision(soft));
    }
    Ok(if soft >= 1.0 {
        3
    } else if soft >= 0.0 {
        2
    } else if soft >= -1.0 {
        1
    } else {
        0
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    pub decisions: Vec<u8>,
    pub soft: Vec<f64>,
    /// Leading symbols that were equalized in training mode.
    pub training: usize,
    pub state: EqualizerState,
}

/// Runs the equalizer over `samples`. `known` holds the transmitted symbol
/// indices used as reference during training; only the first `train_len`
/// entries are read.
///
/// Windows reaching past either end of the samples repeat the edge sample.
pub fn equalize(samples: &[f64], known: &[u8], config: &EqualizerConfig) -> Result<Equalized> {
    config.validate()?;
    let len = samples.len();
    if len <= config.train_len {
        return Err(Error::Size {
            what: "samples must outnumber training symbols",
            expected: config.train_len + 1,
            actual: len,
        });
    }
    if known.len() < config.train_len {
        return Err(Error::Size {
            what: "known training symbols",
            expected: config.train_len,
            actual: known.len(),
        });
    }

    let center = config.center();
    let mut state = EqualizerState::initial(config);
    let mut decisions = Vec::with_capacity(len);
    let mut soft_out = Vec::with_capacity(len);
    let mut edge = vec![0.0; config.num_taps];

    for n in 0..len {
        let window: &[f64] = if n >= center && n + center < len {
            &samples[n - center..=n + center]
        } else {
            for (j, slot) in edge.iter_mut().enumerate() {
                let idx = (n + j).saturating_sub(center).min(len - 1);
                *slot = samples[idx];
            }
            &edge
        };
        let soft = state.output(window);
        if soft.is_nan() || soft.abs() > config.guard {
            return Err(Error::Divergence { index: n });
        }
        let decision = slicer(soft)?;
        let reference = if n < config.train_len {
            let k = known[n];
            if k > 3 {
                return Err(Error::domain(format!("training symbol {k} out of range")));
            }
            LEVELS[k as usize]
        } else {
            LEVELS[decision as usize]
        };
        let largest = state.adapt(window, reference - soft, config);
        if largest.is_nan() || largest > config.guard {
            return Err(Error::Divergence { index: n });
        }
        decisions.push(decision);
        soft_out.push(soft);
    }

    Ok(Equalized {
        decisions,
        soft: soft_out,
        training: config.train_len,
        state,
    })
}
