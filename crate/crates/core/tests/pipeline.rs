use std::f64::consts::PI;

use mpi_pam4::phase_noise::step_variance;
use mpi_pam4::{
    apply_mpi, coherence_length_m, count_bit_errors, dump_waveform, generate_symbols,
    reference_levels, run_point, simulate, wiener_phase, DelaySpec, LinkConfig,
};
use proptest::prelude::*;

fn short(seed: u64) -> LinkConfig {
    LinkConfig {
        num_symbols: 60_000,
        delay: DelaySpec::Symbols(676),
        master_seed: seed,
        ..LinkConfig::default()
    }
}

#[test]
fn run_point_is_deterministic() {
    let a = run_point(&short(9)).unwrap();
    let b = run_point(&short(9)).unwrap();
    assert_eq!(a, b);
    let c = run_point(&short(10)).unwrap();
    assert_ne!(a.bit_errors, c.bit_errors);
}

#[test]
fn clean_link_at_high_snr_is_error_free() {
    let cfg = LinkConfig {
        mpi_enabled: false,
        snr_db: 30.0,
        ..short(3)
    };
    let record = run_point(&cfg).unwrap();
    assert_eq!(record.bit_errors, 0);
    assert_eq!(record.measured_symbols, 60_000 - 10_000);
    assert_eq!(record.ci_low, 0.0);
}

#[test]
fn diagnostics_decompose_every_sample() {
    let cfg = LinkConfig {
        diagnostics: true,
        ..short(4)
    };
    let sim = simulate(&cfg).unwrap();
    let ch = &sim.channel;
    let mpi = ch.mpi_term.as_ref().unwrap();
    let noise = ch.noise.as_ref().unwrap();
    for n in 0..ch.len() {
        let d = ch.truth[n] as f64 - 1.5;
        let rebuilt = d + cfg.bias_vb + mpi[n] + noise[n];
        assert!((ch.samples[n] - rebuilt).abs() < 1e-12);
    }
    let rows = dump_waveform(ch, &sim.envelope, sim.rho, cfg.bias_vb, 20_000..21_000).unwrap();
    for r in &rows {
        let expected = reference_levels(sim.rho, cfg.bias_vb, r.envelope).unwrap();
        assert_eq!(r.reference, expected);
    }
}

#[test]
fn contraction_pulls_the_top_level_down() {
    let cfg = LinkConfig {
        snr_db: f64::INFINITY,
        phi_rad: PI,
        linewidth_hz: 100e3,
        ..short(2)
    };
    let sim = simulate(&cfg).unwrap();
    let top: Vec<f64> = sim
        .channel
        .truth
        .iter()
        .zip(&sim.channel.samples)
        .filter(|(t, _)| **t == 3)
        .map(|(_, y)| *y)
        .collect();
    let mean = top.iter().sum::<f64>() / top.len() as f64;
    assert!(mean < 5.0, "{mean}");
}

#[test]
fn errors_excluded_during_warmup() {
    let cfg = LinkConfig {
        delay: DelaySpec::PathLength {
            meters: 2.0 * coherence_length_m(5e6, 1.468).unwrap(),
        },
        num_symbols: 40_000,
        ..short(1)
    };
    let sim = simulate(&cfg).unwrap();
    assert_eq!(cfg.warmup_symbols(), cfg.delay_symbols());
    assert!(cfg.delay_symbols() > cfg.train_len);
    let skip = count_bit_errors(
        &sim.channel.truth,
        &sim.equalized.decisions,
        cfg.warmup_symbols(),
    )
    .unwrap();
    assert_eq!(skip, sim.errors);
}

#[test]
fn random_decisions_give_half_ber() {
    let tx = generate_symbols(400_000, 1).unwrap();
    let rx = generate_symbols(400_000, 2).unwrap();
    let ber = count_bit_errors(&tx.indices, &rx.indices, 0).unwrap().ber();
    assert!((ber - 0.5).abs() < 0.005, "{ber}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reference_levels_stay_ordered(sir in 14.0f64..=30.0, b in -1.0f64..=1.0) {
        let rho = 10f64.powf(-sir / 20.0);
        let r = reference_levels(rho, 3.5, b).unwrap();
        prop_assert!(r.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn mpi_term_flips_sign_with_envelope(seed in 0u64..500, rho in 0.0f64..0.5) {
        let s = generate_symbols(300, seed).unwrap();
        let env: Vec<f64> = (0..290).map(|n| (n as f64 * 0.1).cos()).collect();
        let neg: Vec<f64> = env.iter().map(|b| -b).collect();
        let a = apply_mpi(&s.indices, &s.levels, 3.5, rho, 10, &env, true).unwrap();
        let b = apply_mpi(&s.indices, &s.levels, 3.5, rho, 10, &neg, true).unwrap();
        let (ma, mb) = (a.mpi_term.unwrap(), b.mpi_term.unwrap());
        for (x, y) in ma.iter().zip(&mb) {
            prop_assert_eq!(*x, -*y);
            prop_assert!(x.abs() <= 2.0 * rho * 5.0 + 1e-12);
        }
    }

    #[test]
    fn wiener_increments_within_four_sigma(seed in 0u64..10_000, linewidth in 1e5f64..2e7) {
        let ts = 1.0 / 106.25e9;
        let n = 20_000;
        let path = wiener_phase(n, linewidth, ts, seed).unwrap();
        let var = step_variance(linewidth, ts);
        let incs: Vec<f64> = path.theta.windows(2).map(|w| w[1] - w[0]).collect();
        let m = incs.len() as f64;
        let mean = incs.iter().sum::<f64>() / m;
        prop_assert!(mean.abs() < 4.0 * (var / m).sqrt());
        let sample = incs.iter().map(|x| x * x).sum::<f64>() / m;
        // variance of a chi-square mean: 2σ⁴/m
        prop_assert!((sample - var).abs() < 4.0 * var * (2.0 / m).sqrt());
    }
}
