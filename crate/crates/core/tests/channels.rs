use blockacq::channels::{apply, apply_with_history, noise_only, ChannelKind, ChannelSpec, TrialSeed};
use blockacq::signals::SampleStream;
use blockacq::{Complex64, Error};

fn preamble() -> SampleStream {
    let n = 64.0f64;
    SampleStream::new((0..64).map(|i| Complex64::new(if i % 3 == 0 { 1.0 } else { -1.0 } / n.sqrt(), 0.0)).collect())
}

fn fading_powers(kind: ChannelKind, base_seed: u64, draws: u64) -> Vec<f64> {
    let s = preamble();
    let spec = ChannelSpec::new(kind, 10.0);
    (0..draws)
        .map(|t| apply(&spec, &s, TrialSeed::new(base_seed, t)).unwrap().2[0].norm_sqr())
        .collect()
}

#[test]
fn rayleigh_power_has_unit_mean() {
    let p = fading_powers(ChannelKind::RayleighFlat, 11, 100_000);
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
}

/// One-sample Kolmogorov-Smirnov statistic against the unit exponential.
fn ks_exponential(mut p: Vec<f64>) -> f64 {
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn rayleigh_power_passes_ks_against_exponential() {
    // Each batch of 10^4 draws is tested at the 1% level. A correct
    // generator fails about one batch in a hundred, so more than 3 of 20
    // (probability 4e-5) means the distribution is wrong.
    let critical = 1.628 / 100.0;
    let rejected: Vec<(u64, f64)> = (0..20)
        .map(|b| (b, ks_exponential(fading_powers(ChannelKind::RayleighFlat, 100 + b, 10_000))))
        .filter(|&(_, d)| d >= critical)
        .collect();
    assert!(rejected.len() <= 3, "rejected batches {rejected:?}");
    let pooled = ks_exponential(fading_powers(ChannelKind::RayleighFlat, 11, 200_000));
    assert!(pooled < 1.628 / 200_000f64.sqrt(), "pooled D = {pooled}");
}

#[test]
fn noise_is_white() {
    let len = 100_000;
    let y = noise_only(len, TrialSeed::new(5, 0)).samples;
    let power = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / len as f64;
    assert!((power - 1.0).abs() < 0.02);
    let bound = 4.0 / (len as f64).sqrt();
    for k in 1..=32 {
        let acf: Complex64 = (k..len).map(|i| y[i] * y[i - k].conj()).sum::<Complex64>() / (len as f64 * power);
        assert!(acf.norm() < bound, "lag {k}: {}", acf.norm());
    }
    let var_re = y.iter().map(|v| v.re * v.re).sum::<f64>() / len as f64;
    assert!((var_re - 0.5).abs() < 0.02);
}

#[test]
fn identical_seeds_give_identical_streams() {
    let s = preamble();
    let spec = ChannelSpec::new(ChannelKind::Rayleigh2Tap, 3.0);
    let a = apply_with_history(&spec, &s, TrialSeed::new(9, 4), 100).unwrap();
    let b = apply_with_history(&spec, &s, TrialSeed::new(9, 4), 100).unwrap();
    assert_eq!(a, b);
    let c = apply_with_history(&spec, &s, TrialSeed::new(9, 5), 100).unwrap();
    assert_ne!(a.received, c.received);
    assert_eq!(noise_only(50, TrialSeed::new(1, 2)), noise_only(50, TrialSeed::new(1, 2)));
}

#[test]
fn history_does_not_change_the_observation() {
    let s = preamble();
    let spec = ChannelSpec::new(ChannelKind::RayleighFlat, 0.0);
    let short = apply_with_history(&spec, &s, TrialSeed::new(3, 8), 0).unwrap();
    let long = apply_with_history(&spec, &s, TrialSeed::new(3, 8), 500).unwrap();
    assert_eq!(short.observation(), long.observation());
    assert_eq!(long.received.len(), 500 + 128);
    assert_eq!((short.lag, short.amplitudes.clone()), (long.lag, long.amplitudes.clone()));
}

#[test]
fn noise_scales_with_snr() {
    let s = preamble();
    let spec = ChannelSpec::new(ChannelKind::Awgn, 20.0);
    assert!((spec.noise_variance() - 0.01).abs() < 1e-15);
    let mut power = 0.0;
    let trials = 400;
    for t in 0..trials {
        let r = apply_with_history(&spec, &s, TrialSeed::new(2, t), 0).unwrap();
        let mut obs = r.received.samples.clone();
        for (i, v) in s.samples.iter().enumerate() {
            obs[r.lag + i] -= v;
        }
        power += obs.iter().map(|v| v.norm_sqr()).sum::<f64>() / obs.len() as f64;
    }
    assert!((power / trials as f64 / 0.01 - 1.0).abs() < 0.03);
    assert_eq!(ChannelSpec::new(ChannelKind::Awgn, f64::INFINITY).noise_variance(), 0.0);
}

#[test]
fn rician_amplitude_statistics() {
    let s = preamble();
    let spec = ChannelSpec::rician(10.0, 4.0);
    let draws = 20_000;
    let a: Vec<Complex64> = (0..draws).map(|t| apply(&spec, &s, TrialSeed::new(6, t)).unwrap().2[0]).collect();
    let mean = a.iter().sum::<Complex64>() / draws as f64;
    let var = a.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / draws as f64;
    assert!((mean - Complex64::new(1.0, 0.0)).norm() < 0.02);
    assert!((var - 0.25).abs() < 0.01);
}

#[test]
fn two_tap_places_both_paths() {
    let s = preamble();
    let spec = ChannelSpec { tap_separation: 3, ..ChannelSpec::new(ChannelKind::Rayleigh2Tap, f64::INFINITY) };
    let r = apply_with_history(&spec, &s, TrialSeed::new(1, 1), 0).unwrap();
    assert_eq!(r.amplitudes.len(), 2);
    assert!(r.lag + 3 < s.len());
    for i in 0..s.len() + 3 {
        let want = s.samples.get(i).map_or(Complex64::default(), |v| v * r.amplitudes[0])
            + i.checked_sub(3).and_then(|j| s.samples.get(j)).map_or(Complex64::default(), |v| v * r.amplitudes[1]);
        assert!((r.received.samples[r.lag + i] - want).norm() < 1e-12);
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let s = preamble();
    let seed = TrialSeed::new(0, 0);
    assert!(matches!(apply(&ChannelSpec::new(ChannelKind::Rician, 0.0), &s, seed), Err(Error::MissingParameter(_))));
    assert!(apply(&ChannelSpec::rician(0.0, -1.0), &s, seed).is_err());
    let wide = ChannelSpec { tap_separation: 64, ..ChannelSpec::new(ChannelKind::Rayleigh2Tap, 0.0) };
    assert!(apply(&wide, &s, seed).is_err());
    assert!(apply(&ChannelSpec::new(ChannelKind::Awgn, f64::NAN), &s, seed).is_err());
    assert!("rayleigh_2tap".parse::<ChannelKind>().is_ok());
    assert!("fading".parse::<ChannelKind>().is_err());
}
