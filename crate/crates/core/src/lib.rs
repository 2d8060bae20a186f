//! Monte-Carlo simulation of multipath interference (MPI) in PAM4
//! intensity-modulated optical links.
//!
//! A single reflection of the transmitted optical power beats with the
//! signal through the laser phase difference `θ(t) − θ(t − τ)` and a fixed
//! phase offset `Φ`. Depending on `Φ` the received PAM4 constellation is
//! dilated (`Φ ≈ 0`) or contracted (`Φ ≈ π`), which bounds the bit error
//! rate from below and above in the coherent regime.
//!
//! The pipeline for one operating point is
//! [`generate_symbols`] → [`wiener_phase`] → [`delayed_difference`] →
//! [`envelope_b`] → [`apply_mpi`] → [`add_awgn`] → [`equalize`] →
//! [`count_bit_errors`], wrapped by [`run_point`]. Grids of points are run by
//! [`run_sweep`], which uses rayon when the `parallel` feature is enabled.

pub mod channel;
pub mod equalizer;
mod error;
pub mod metrics;
pub mod phase_noise;
pub mod signal;
pub mod sweep;

pub use channel::{add_awgn, apply_mpi, rho_to_sir, sir_to_rho, ChannelOutput};
pub use equalizer::{equalize, slicer, Equalized, EqualizerConfig, EqualizerState};
pub use error::{Error, Result};
pub use metrics::{
    ber_confidence, count_bit_errors, dump_waveform, predicted_spacing, reference_levels,
    BerRecord, BitErrorCount, Extreme, WaveformRow,
};
pub use phase_noise::{
    coherence_length_m, delay_symbols, delayed_difference, envelope_b, phi_from_drift,
    wiener_phase, DriftSpec, PhasePath,
};
pub use signal::{
    extinction_ratio_db, generate_symbols, gray_map, gray_unmap, DelaySpec, LinkConfig, Pam4Level,
    SymbolStream,
};
pub use sweep::{run_point, run_sweep, simulate, Simulation, SweepError, SweepGrid, SweepResult};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
