//! Bit error counting, confidence intervals, and the closed-form level
//! spacing predictors for constellation dilation and contraction.

use std::io::Write;
use std::ops::Range;
use std::path::Path;

use crate::channel::ChannelOutput;
use crate::signal::{check_bias, LinkConfig, LEVELS};
use crate::{Error, Result};

/// Two-sided 95% standard normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitErrorCount {
    pub bit_errors: u64,
    pub total_bits: u64,
    pub measured_symbols: u64,
}

impl BitErrorCount {
    pub fn ber(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.total_bits as f64
        }
    }
}

/// Counts differing gray-coded bits between `tx` and `rx`, ignoring the
/// first `skip` symbols.
pub fn count_bit_errors(tx: &[u8], rx: &[u8], skip: usize) -> Result<BitErrorCount> {
    if tx.len() != rx.len() {
        return Err(Error::Size {
            what: "transmitted vs decided symbols",
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    // Hamming distance between gray labels of index pairs.
    const DIST: [[u8; 4]; 4] = [[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]];
    let mut bit_errors = 0u64;
    for (&t, &r) in tx.iter().zip(rx).skip(skip) {
        if t > 3 || r > 3 {
            return Err(Error::domain(format!(
                "symbol index out of range ({t}, {r})"
            )));
        }
        bit_errors += DIST[t as usize][r as usize] as u64;
    }
    let measured = tx.len().saturating_sub(skip) as u64;
    Ok(BitErrorCount {
        bit_errors,
        total_bits: 2 * measured,
        measured_symbols: measured,
    })
}

/// 95% Wilson score interval for `errors` out of `bits`.
pub fn ber_confidence(errors: u64, bits: u64) -> (f64, f64) {
    if bits == 0 {
        return (0.0, 1.0);
    }
    let n = bits as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if errors == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if errors == bits {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low.min(p), high.max(p))
}

/// Result of one simulation point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub bit_errors: u64,
    pub total_bits: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub measured_symbols: u64,
    pub config: LinkConfig,
}

impl BerRecord {
    pub fn new(count: BitErrorCount, config: LinkConfig) -> Self {
        let (ci_low, ci_high) = ber_confidence(count.bit_errors, count.total_bits);
        BerRecord {
            bit_errors: count.bit_errors,
            total_bits: count.total_bits,
            ber: count.ber(),
            ci_low,
            ci_high,
            measured_symbols: count.measured_symbols,
            config,
        }
    }

    /// True when the two 95% intervals share at least one point.
    pub fn ci_overlaps(&self, other: &BerRecord) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    /// `Φ ≈ 0`: the envelope is near +1 and the top levels spread apart.
    Dilate,
    /// `Φ ≈ π`: the envelope is near −1 and the top levels squeeze together.
    Contract,
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::domain(format!("rho = {rho} outside [0, 1)")))
    }
}

/// Spacing between the top two received levels when the delayed copy is
/// replaced by its average `√V_b`:
/// `1 ± 2ρ·√V_b·(√(V_b + 1.5) − √(V_b + 0.5))`.
pub fn predicted_spacing(rho: f64, bias_vb: f64, extreme: Extreme) -> Result<f64> {
    check_bias(bias_vb)?;
    check_rho(rho)?;
    let delta = 2.0 * rho * bias_vb.sqrt() * ((bias_vb + 1.5).sqrt() - (bias_vb + 0.5).sqrt());
    Ok(match extreme {
        Extreme::Dilate => 1.0 + delta,
        Extreme::Contract => 1.0 - delta,
    })
}

/// MPI-shifted reference levels `D_i + V_b + 2ρ·√(V_b + D_i)·√V_b·b` for
/// an envelope value `b`.
pub fn reference_levels(rho: f64, bias_vb: f64, b_bar: f64) -> Result<[f64; 4]> {
    check_bias(bias_vb)?;
    check_rho(rho)?;
    if !(-1.0..=1.0).contains(&b_bar) {
        return Err(Error::domain(format!(
            "envelope value {b_bar} outside [-1, 1]"
        )));
    }
    Ok(reference_levels_unchecked(rho, bias_vb, b_bar))
}

fn reference_levels_unchecked(rho: f64, bias_vb: f64, b: f64) -> [f64; 4] {
    let cross = bias_vb.sqrt();
    LEVELS.map(|d| d + bias_vb + 2.0 * rho * (bias_vb + d).sqrt() * cross * b)
}

/// One row of a waveform diagnostic table.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformRow {
    pub n: usize,
    pub y: f64,
    /// Biased transmitted level `d[n] + V_b`.
    pub truth_level: f64,
    pub envelope: f64,
    pub reference: [f64; 4],
}

/// Received samples over `window` alongside the four reference level curves
/// evaluated with the instantaneous envelope.
pub fn dump_waveform(
    output: &ChannelOutput,
    envelope: &[f64],
    rho: f64,
    bias_vb: f64,
    window: Range<usize>,
) -> Result<Vec<WaveformRow>> {
    check_bias(bias_vb)?;
    check_rho(rho)?;
    if envelope.len() != output.len() {
        return Err(Error::Size {
            what: "envelope vs channel samples",
            expected: output.len(),
            actual: envelope.len(),
        });
    }
    if window.start >= window.end || window.end > output.len() {
        return Err(Error::Size {
            what: "waveform window end",
            expected: output.len(),
            actual: window.end,
        });
    }
    Ok(window
        .map(|n| WaveformRow {
            n,
            y: output.samples[n],
            truth_level: LEVELS[output.truth[n] as usize] + bias_vb,
            envelope: envelope[n],
            reference: reference_levels_unchecked(rho, bias_vb, envelope[n]),
        })
        .collect())
}

pub const WAVEFORM_HEADER: &str = "n,y,truth_level,envelope,r0,r1,r2,r3";

pub fn write_waveform_csv(rows: &[WaveformRow], path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let file = std::fs::File::create(path).map_err(io)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{WAVEFORM_HEADER}").map_err(io)?;
    for r in rows {
        writeln!(
            out,
            "{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.n,
            r.y,
            r.truth_level,
            r.envelope,
            r.reference[0],
            r.reference[1],
            r.reference[2],
            r.reference[3]
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_mpi;
    use crate::signal::generate_symbols;

    #[test]
    fn bit_error_counting() {
        let s = [0u8, 1, 2, 3];
        let c = count_bit_errors(&s, &s, 0).unwrap();
        assert_eq!((c.bit_errors, c.total_bits), (0, 8));
        assert_eq!(count_bit_errors(&[0], &[1], 0).unwrap().bit_errors, 1);
        assert_eq!(count_bit_errors(&[0], &[3], 0).unwrap().bit_errors, 1);
        assert_eq!(count_bit_errors(&[0], &[2], 0).unwrap().bit_errors, 2);
        let skipped = count_bit_errors(&[0, 0, 0], &[3, 3, 0], 2).unwrap();
        assert_eq!(
            (
                skipped.bit_errors,
                skipped.measured_symbols,
                skipped.total_bits
            ),
            (0, 1, 2)
        );
        assert!(matches!(
            count_bit_errors(&[0], &[0, 1], 0),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn distance_table_matches_gray_map() {
        use crate::signal::gray_map;
        for t in 0..4u8 {
            for r in 0..4u8 {
                let expected = (gray_map(t).unwrap() ^ gray_map(r).unwrap()).count_ones() as u64;
                assert_eq!(
                    count_bit_errors(&[t], &[r], 0).unwrap().bit_errors,
                    expected
                );
            }
        }
    }

    #[test]
    fn wilson_interval() {
        assert_eq!(ber_confidence(0, 1000).0, 0.0);
        assert_eq!(ber_confidence(1000, 1000).1, 1.0);
        let (lo, hi) = ber_confidence(100, 1_000_000);
        assert!((lo - 0.822e-4).abs() < 0.005e-4, "{lo}");
        assert!((hi - 1.216e-4).abs() < 0.005e-4, "{hi}");
    }

    #[test]
    fn spacing_predictors() {
        for e in [Extreme::Dilate, Extreme::Contract] {
            assert_eq!(predicted_spacing(0.0, 3.5, e).unwrap(), 1.0);
        }
        let dil = predicted_spacing(0.1, 3.5, Extreme::Dilate).unwrap();
        assert!((dil - (1.0 + 0.2 * 3.5f64.sqrt() * (5f64.sqrt() - 2.0))).abs() < 1e-15);
        assert!((dil - 1.0883).abs() < 5e-5);
        let con = predicted_spacing(0.1, 3.5, Extreme::Contract).unwrap();
        assert!((dil + con - 2.0).abs() < 1e-15);
        assert!(predicted_spacing(0.1, 1.0, Extreme::Dilate).is_err());
        assert!(predicted_spacing(1.0, 3.5, Extreme::Dilate).is_err());
    }

    #[test]
    fn reference_level_curves() {
        let ideal = reference_levels(0.1, 3.5, 0.0).unwrap();
        assert_eq!(ideal, [2.0, 3.0, 4.0, 5.0]);
        let r = reference_levels(0.1, 3.5, 1.0).unwrap();
        assert!((r[3] - (5.0 + 0.2 * 5f64.sqrt() * 3.5f64.sqrt())).abs() < 1e-12);
        assert!((r[3] - 5.8367).abs() < 1e-4);
        let dil = predicted_spacing(0.1, 3.5, Extreme::Dilate).unwrap();
        assert!((r[3] - r[2] - dil).abs() < 1e-12);
        assert!(reference_levels(0.1, 3.5, 1.5).is_err());
    }

    #[test]
    fn waveform_rows() {
        let s = generate_symbols(200, 1).unwrap();
        let env = vec![0.5; 190];
        let out = apply_mpi(&s.indices, &s.levels, 3.5, 0.0, 10, &env, true).unwrap();
        let rows = dump_waveform(&out, &env, 0.0, 3.5, 5..15).unwrap();
        assert_eq!(rows.len(), 10);
        for r in &rows {
            assert_eq!(r.reference, [2.0, 3.0, 4.0, 5.0]);
            assert_eq!(r.y, r.truth_level);
        }
        assert!(dump_waveform(&out, &env, 0.0, 3.5, 180..191).is_err());
        assert!(dump_waveform(&out, &env, 0.0, 3.5, 5..5).is_err());
    }
}
