//! Wiener laser phase noise and the reflection geometry helpers.

use std::f64::consts::{PI, TAU};

use rand_distr::{Distribution, Normal};

use crate::signal::rng_from_seed;
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Group index of standard single-mode fiber.
pub const DEFAULT_FIBER_INDEX: f64 = 1.468;

/// Laser phase sampled once per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePath {
    pub theta: Vec<f64>,
    pub symbol_period: f64,
}

impl PhasePath {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Per-symbol variance `2π·Δν·T_s` of the Wiener phase increment.
pub fn step_variance(linewidth_hz: f64, symbol_period: f64) -> f64 {
    TAU * linewidth_hz * symbol_period
}

/// Wiener phase walk starting at `θ[0] = 0`.
pub fn wiener_phase(
    length: usize,
    linewidth_hz: f64,
    symbol_period: f64,
    seed: u64,
) -> Result<PhasePath> {
    if length == 0 {
        return Err(Error::EmptyStream);
    }
    if !(linewidth_hz.is_finite() && linewidth_hz >= 0.0) {
        return Err(Error::domain(format!(
            "linewidth {linewidth_hz} Hz must be non-negative"
        )));
    }
    if !(symbol_period.is_finite() && symbol_period > 0.0) {
        return Err(Error::domain(format!(
            "symbol period {symbol_period} s must be positive"
        )));
    }
    let sigma = step_variance(linewidth_hz, symbol_period).sqrt();
    let mut theta = Vec::with_capacity(length);
    theta.push(0.0);
    if sigma == 0.0 {
        theta.resize(length, 0.0);
    } else {
        let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
        let mut rng = rng_from_seed(seed);
        let mut acc = 0.0;
        for _ in 1..length {
            acc += normal.sample(&mut rng);
            theta.push(acc);
        }
    }
    Ok(PhasePath {
        theta,
        symbol_period,
    })
}

/// Phase difference between the signal and its reflection for each measured
/// symbol: `out[n] = θ[n + delay] − θ[n]`.
///
/// The path carries `delay` lead-in samples, so the output has
/// `path.len() − delay` entries and every measured symbol is defined.
pub fn delayed_difference(path: &PhasePath, delay_symbols: usize) -> Result<Vec<f64>> {
    if path.len() <= delay_symbols {
        return Err(Error::Size {
            what: "phase path shorter than the reflection delay",
            expected: delay_symbols + 1,
            actual: path.len(),
        });
    }
    let theta = &path.theta;
    Ok(theta[delay_symbols..]
        .iter()
        .zip(theta)
        .map(|(now, past)| now - past)
        .collect())
}

/// `B(Φ, t) = cos(Φ + Δθ)`.
#[inline]
pub fn envelope_b(phi_rad: f64, delta_theta: f64) -> f64 {
    (phi_rad + delta_theta).cos()
}

/// Lorentzian coherence length in fiber, `c/(π·n·Δν)`.
pub fn coherence_length_m(linewidth_hz: f64, fiber_index: f64) -> Result<f64> {
    if linewidth_hz == 0.0 {
        return Err(Error::InfiniteCoherence);
    }
    if !(linewidth_hz.is_finite() && linewidth_hz > 0.0) {
        return Err(Error::domain(format!(
            "linewidth {linewidth_hz} Hz must be positive"
        )));
    }
    if !(fiber_index.is_finite() && fiber_index >= 1.0) {
        return Err(Error::domain(format!(
            "fiber index {fiber_index} must be at least 1"
        )));
    }
    Ok(SPEED_OF_LIGHT / (PI * fiber_index * linewidth_hz))
}

/// Round-trip delay `τ = nL/c` quantized to the nearest whole symbol.
pub fn delay_symbols(path_length_m: f64, fiber_index: f64, baud_rate: f64) -> usize {
    let symbols = fiber_index * path_length_m * baud_rate / SPEED_OF_LIGHT;
    symbols.round().max(0.0) as usize
}

/// Carrier frequency, frequency drift over the round trip, and round-trip
/// delay that together set the phase offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSpec {
    pub omega_o: f64,
    pub delta_omega: f64,
    pub tau: f64,
}

/// `Φ = ω₀τ − Δω·t + Δω·τ` reduced into `[0, 2π)`.
pub fn phi_from_drift(spec: &DriftSpec, t: f64) -> f64 {
    // Reduce the carrier term on its own: ω₀τ is ~1e6 rad for metre-scale paths.
    let carrier = (spec.omega_o * spec.tau).rem_euclid(TAU);
    let drift = spec.delta_omega * (spec.tau - t);
    let phi = (carrier + drift).rem_euclid(TAU);
    if phi >= TAU {
        0.0
    } else {
        phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TS: f64 = 1.0 / 106.25e9;

    #[test]
    fn zero_linewidth_is_flat() {
        let p = wiener_phase(1000, 0.0, TS, 3).unwrap();
        assert!(p.theta.iter().all(|&t| t == 0.0));
        let d = delayed_difference(&p, 50).unwrap();
        assert_eq!(d.len(), 950);
        assert!(d.iter().all(|&x| x == 0.0));
        assert!(wiener_phase(10, -1.0, TS, 3).is_err());
    }

    #[test]
    fn step_variance_value() {
        let v = step_variance(5e6, TS);
        assert!((v - 2.9568e-4).abs() < 1e-7, "{v}");
    }

    #[test]
    fn walk_starts_at_zero_and_is_seeded() {
        let a = wiener_phase(100, 5e6, TS, 9).unwrap();
        let b = wiener_phase(100, 5e6, TS, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.theta[0], 0.0);
        assert_ne!(a, wiener_phase(100, 5e6, TS, 10).unwrap());
    }

    #[test]
    fn zero_delay_difference_is_zero() {
        let p = wiener_phase(500, 5e6, TS, 1).unwrap();
        let d = delayed_difference(&p, 0).unwrap();
        assert_eq!(d.len(), 500);
        assert!(d.iter().all(|&x| x == 0.0));
        assert!(delayed_difference(&p, 500).is_err());
    }

    #[test]
    fn delayed_difference_variance_at_677() {
        let delay = 677;
        let p = wiener_phase(1_000_000 + delay, 5e6, TS, 11).unwrap();
        let d = delayed_difference(&p, delay).unwrap();
        let n = d.len() as f64;
        let mean = d.iter().sum::<f64>() / n;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // overlapping windows leave ~1500 independent blocks; 10% covers 3 sigma
        assert!((var / 0.2002 - 1.0).abs() < 0.10, "var = {var}");
    }

    #[test]
    fn envelope_values() {
        assert_eq!(envelope_b(0.0, 0.0), 1.0);
        assert_eq!(envelope_b(PI, 0.0), -1.0);
        assert!(envelope_b(PI / 2.0, 0.0).abs() < 1e-16);
    }

    #[test]
    fn coherence_length() {
        let lc = coherence_length_m(5e6, 1.468).unwrap();
        assert!((lc - 13.0).abs() < 0.01, "{lc}");
        let half = coherence_length_m(10e6, 1.468).unwrap();
        assert!((lc / half - 2.0).abs() < 1e-12);
        let free = coherence_length_m(5e6, 1.0).unwrap();
        assert!((free - SPEED_OF_LIGHT / (PI * 5e6)).abs() < 1e-9);
        assert!(matches!(
            coherence_length_m(0.0, 1.468),
            Err(Error::InfiniteCoherence)
        ));
    }

    #[test]
    fn delay_quantization() {
        assert_eq!(delay_symbols(0.0, 1.468, 106.25e9), 0);
        // 1.468 * 1.30 * 106.25e9 / c = 676.36
        assert_eq!(delay_symbols(1.30, 1.468, 106.25e9), 676);
        let d = delay_symbols(130.0, 1.468, 106.25e9);
        assert_eq!(d, 67_636);
        let lc = coherence_length_m(5e6, 1.468).unwrap();
        assert_eq!(delay_symbols(0.1 * lc, 1.468, 106.25e9), 676);
    }

    #[test]
    fn phi_from_drift_values() {
        let zero = DriftSpec {
            omega_o: 1.2e15,
            delta_omega: 3.0e7,
            tau: 0.0,
        };
        assert_eq!(phi_from_drift(&zero, 0.0), 0.0);

        let drift = DriftSpec {
            omega_o: 0.0,
            delta_omega: TAU * 5e6,
            tau: 25e-9,
        };
        let phi = phi_from_drift(&drift, 0.0);
        assert!((phi - std::f64::consts::FRAC_PI_4).abs() < 1e-12, "{phi}");

        let still = DriftSpec {
            omega_o: 1.2e15,
            delta_omega: 0.0,
            tau: 1e-8,
        };
        let a = phi_from_drift(&still, 0.0);
        let b = phi_from_drift(&still, 1.0);
        assert_eq!(a, b);
        assert!((0.0..TAU).contains(&a));
    }
}
