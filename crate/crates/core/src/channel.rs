//! Received intensity with a single reflection, plus additive noise.
//!
//! For every measured symbol `n`
//!
//! ```text
//! y[n] = d[n] + V_b + 2ρ·√(V_b + d[n])·√(V_b + d[n − D])·B[n] + noise[n]
//! ```
//!
//! where `D` is the reflection delay in symbols and `B[n]` the beat envelope.
//! Symbol streams carry `D` lead-in symbols ahead of the first measured one.

use rand_distr::{Distribution, Normal};

use crate::signal::{check_bias, rng_from_seed, DATA_POWER};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub samples: Vec<f64>,
    /// Transmitted symbol index aligned with each sample.
    pub truth: Vec<u8>,
    /// The MPI summand of each sample, kept only with diagnostics on.
    pub mpi_term: Option<Vec<f64>>,
    /// The noise added to each sample, kept only with diagnostics on.
    pub noise: Option<Vec<f64>>,
}

impl ChannelOutput {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Noiseless received samples for `levels[delay..]`.
///
/// `truth` holds the symbol indices of the full stream (lead-in included) and
/// `envelope` one value per measured symbol.
pub fn apply_mpi(
    truth: &[u8],
    levels: &[f64],
    bias_vb: f64,
    rho: f64,
    delay_symbols: usize,
    envelope: &[f64],
    diagnostics: bool,
) -> Result<ChannelOutput> {
    check_bias(bias_vb)?;
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain(format!("rho = {rho} outside [0, 1)")));
    }
    if truth.len() != levels.len() {
        return Err(Error::Size {
            what: "symbol indices vs levels",
            expected: levels.len(),
            actual: truth.len(),
        });
    }
    if levels.len() <= delay_symbols {
        return Err(Error::Size {
            what: "symbol stream shorter than the reflection delay",
            expected: delay_symbols + 1,
            actual: levels.len(),
        });
    }
    let measured = levels.len() - delay_symbols;
    if envelope.len() != measured {
        return Err(Error::Size {
            what: "envelope vs measured symbols",
            expected: measured,
            actual: envelope.len(),
        });
    }

    let current = &levels[delay_symbols..];
    let reflected = &levels[..measured];
    let mut samples = Vec::with_capacity(measured);
    let mut mpi = diagnostics.then(|| Vec::with_capacity(measured));
    for ((&d, &d_past), &b) in current.iter().zip(reflected).zip(envelope) {
        let term = if rho == 0.0 {
            0.0
        } else {
            2.0 * rho * (bias_vb + d).sqrt() * (bias_vb + d_past).sqrt() * b
        };
        samples.push(d + bias_vb + term);
        if let Some(m) = mpi.as_mut() {
            m.push(term);
        }
    }
    Ok(ChannelOutput {
        samples,
        truth: truth[delay_symbols..].to_vec(),
        mpi_term: mpi,
        noise: None,
    })
}

/// `ρ = 10^(−SIR/20)`.
pub fn sir_to_rho(sir_db: f64) -> Result<f64> {
    if sir_db.is_nan() {
        return Err(Error::domain("SIR is NaN"));
    }
    let rho = 10f64.powf(-sir_db / 20.0);
    if rho >= 1.0 {
        return Err(Error::domain(format!(
            "SIR {sir_db} dB gives rho = {rho}, reflection must be weaker than the signal"
        )));
    }
    Ok(rho)
}

/// `SIR = −20·log10(ρ)`.
pub fn rho_to_sir(rho: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Err(Error::InfiniteSir(rho));
    }
    if rho >= 1.0 || rho.is_nan() {
        return Err(Error::domain(format!("rho = {rho} must be below 1")));
    }
    Ok(-20.0 * rho.log10())
}

/// Noise standard deviation for an SNR referenced to the data power `E[d²]`.
pub fn noise_sigma(snr_db: f64) -> f64 {
    (DATA_POWER / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// Adds white Gaussian noise with variance `1.25/10^(SNR/10)`.
/// An infinite SNR leaves the samples untouched.
pub fn add_awgn(mut output: ChannelOutput, snr_db: f64, seed: u64) -> Result<ChannelOutput> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::domain(format!("SNR {snr_db} dB is not usable")));
    }
    let keep = output.mpi_term.is_some();
    if snr_db == f64::INFINITY {
        if keep {
            output.noise = Some(vec![0.0; output.len()]);
        }
        return Ok(output);
    }
    let normal = Normal::new(0.0, noise_sigma(snr_db)).expect("finite sigma");
    let mut rng = rng_from_seed(seed);
    let mut noise = keep.then(|| Vec::with_capacity(output.len()));
    for y in output.samples.iter_mut() {
        let n = normal.sample(&mut rng);
        *y += n;
        if let Some(v) = noise.as_mut() {
            v.push(n);
        }
    }
    output.noise = noise;
    Ok(output)
}
