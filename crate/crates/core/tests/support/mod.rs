//! Oracles and property checks shared by the integration tests and the
//! acceptance runner.
#![allow(dead_code)]

use std::f64::consts::PI;

use blockacq::acquisition::{detect_per_lag, gamma_from_pfa, DetectorConfig};
use blockacq::block_filter::{analyze, filter, BlockFilterPlan, OverlapMode, PlanSpec};
use blockacq::channels::{apply_with_history, ChannelKind, TrialSeed};
use blockacq::harness::{ExperimentSpec, Receiver};
use blockacq::signals::{canonical_dual, make_window, synthesize, SampleStream, WindowKind};
use blockacq::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Schoolbook convolution, written independently of the library.
pub fn naive_convolve(x: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    let mut y = vec![Complex64::default(); x.len() + h.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in h.iter().enumerate() {
            y[i + j] += a * b;
        }
    }
    y
}

pub fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |a - b| / max |b|`.
pub fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    diff / max_abs(b).max(f64::MIN_POSITIVE)
}

/// `e^{-z} I0(z)` from `(1/pi) int_0^pi exp(z (cos t - 1)) dt`. The
/// integrand is periodic and smooth, so the trapezoid rule converges
/// geometrically.
pub fn i0e(z: f64) -> f64 {
    let n = 64 + (16.0 * z.sqrt()) as usize;
    let h = PI / n as f64;
    let mut s = 0.5 * (1.0 + (-2.0 * z).exp());
    for k in 1..n {
        s += (z * ((k as f64 * h).cos() - 1.0)).exp();
    }
    s / n as f64
}

const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Composite 5-point Gauss-Legendre over `[lo, hi]` with panels of width `step`.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let panels = ((hi - lo) / step).ceil() as usize;
    let w = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * w;
        for (x, wt) in GL5 {
            total += wt * f(mid + 0.5 * w * x);
        }
    }
    0.5 * w * total
}

/// First-order Marcum Q by quadrature of the Rician density,
/// `int_b^inf x exp(-(x-a)^2/2) I0e(a x) dx`.
pub fn marcum_q_quadrature(a: f64, b: f64) -> f64 {
    let hi = a.max(b) + 40.0;
    integrate(|x| x * (-(x - a) * (x - a) / 2.0).exp() * i0e(a * x), b, hi, 0.25)
}

/// The `(a, b)` grid used for the Marcum comparison.
pub fn marcum_grid() -> Vec<(f64, f64)> {
    let a = [0.0, 0.3, 1.0, 1.7, 2.5, 4.0, 6.0, 9.0, 14.0, 22.0, 30.0];
    let b = [0.05, 0.5, 1.2, 2.0, 3.0, 4.5, 6.5, 9.5, 15.0, 23.0, 31.0];
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

/// Mean of `draws` maxima of `n` unit-mean exponentials.
pub fn simulated_max_exponential(n: usize, draws: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut sum = 0.0;
    for _ in 0..draws {
        let mut m: f64 = 0.0;
        for _ in 0..n {
            let u: f64 = r.random();
            m = m.max(-(1.0 - u).ln());
        }
        sum += m;
    }
    sum / draws as f64
}

/// P_m for Rayleigh fading when the `n - 1` noise cells are independent:
/// `E[(1 - e^{-X})^{n-1}]` with `X` exponential of mean `1 + mu` is
/// `B(1/theta, n) / theta`.
pub fn rayleigh_pm_independent_cells(mu: f64, n: usize) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let theta = 1.0 + mu;
    let nf = n as f64;
    (ln_gamma(1.0 / theta) + ln_gamma(nf) - ln_gamma(nf + 1.0 / theta)).exp() / theta
}

fn complex_vec(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..max_len)
        .prop_map(|v| v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
}

fn window_kind() -> impl Strategy<Value = WindowKind> {
    prop_oneof![Just(WindowKind::Rectangular), (0.5..10.0f64).prop_map(|beta| WindowKind::Kaiser { beta })]
}

/// Statistics and detector for one noisy realization under `spec`.
fn realization(spec: &ExperimentSpec, seed: u64, snr_db: f64) -> (Receiver, Vec<Complex64>, usize) {
    let rx = Receiver::new(spec).unwrap();
    let s = spec.preamble().unwrap();
    let real = apply_with_history(&spec.channel_spec(snr_db), &s, TrialSeed::new(seed, 0), rx.history_len()).unwrap();
    (rx, real.received.samples, real.history_len)
}

fn flags(mf: &[Complex64], energies: &[f64], cfg: &DetectorConfig) -> Vec<bool> {
    detect_per_lag(mf, energies, cfg).unwrap().iter().map(|d| d.detected).collect()
}

/// True when no lag sits so close to the threshold that rounding could flip it.
fn clear_of_threshold(mf: &[Complex64], energies: &[f64], cfg: &DetectorConfig) -> bool {
    mf.iter()
        .zip(energies)
        .all(|(r, &e)| (r.norm_sqr() / cfg.threshold(e) - 1.0).abs() > 1e-9)
}

pub fn scale_invariance_args() -> impl Strategy<Value = (u64, f64, f64, f64)> {
    (any::<u64>(), -10.0..20.0f64, -6.0..6.0f64, 0.0..(2.0 * PI))
}

/// Scaling the received samples by `c != 0` keeps every flag and the argmax.
pub fn check_scale_invariance((seed, snr_db, log_mag, phase): (u64, f64, f64, f64)) -> Result<(), TestCaseError> {
    let spec = ExperimentSpec { channel: ChannelKind::Awgn, ..ExperimentSpec::default() };
    let (rx, y, hist) = realization(&spec, seed, snr_db);
    let c = Complex64::from_polar(10f64.powf(log_mag), phase);
    let scaled: Vec<Complex64> = y.iter().map(|v| v * c).collect();
    let (mf, e) = rx.lag_statistics(&y, hist).unwrap();
    let (mf_c, e_c) = rx.lag_statistics(&scaled, hist).unwrap();
    prop_assume!(clear_of_threshold(&mf, &e, &rx.detector));
    let d = detect_per_lag(&mf, &e, &rx.detector).unwrap();
    let d_c = detect_per_lag(&mf_c, &e_c, &rx.detector).unwrap();
    for (a, b) in d.iter().zip(&d_c) {
        prop_assert_eq!(a.detected, b.detected, "lag {}", a.lag);
    }
    let best = blockacq::acquisition::max_search(&d).unwrap();
    let best_c = blockacq::acquisition::max_search(&d_c).unwrap();
    // the argmax may only move between statistics that are equal to rounding
    let rel = (best.statistic - d[best_c.lag].statistic).abs() / best.statistic;
    prop_assert!(best.lag == best_c.lag || rel < 1e-12);
    Ok(())
}

pub fn monotonicity_args() -> impl Strategy<Value = (u64, f64, f64, f64)> {
    (any::<u64>(), -10.0..15.0f64, 1e-4..0.5f64, 1e-4..0.5f64)
}

/// A smaller target false-alarm rate gives a larger gamma and a subset of detections.
pub fn check_threshold_monotonicity((seed, snr_db, p1, p2): (u64, f64, f64, f64)) -> Result<(), TestCaseError> {
    prop_assume!((p1 - p2).abs() > 1e-9);
    let (lo, hi) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
    let spec = ExperimentSpec { channel: ChannelKind::RayleighFlat, ..ExperimentSpec::default() };
    let (rx, y, hist) = realization(&spec, seed, snr_db);
    let (mf, e) = rx.lag_statistics(&y, hist).unwrap();
    let strict = DetectorConfig::new(lo, spec.n).unwrap();
    let loose = DetectorConfig::new(hi, spec.n).unwrap();
    prop_assert!(gamma_from_pfa(lo, spec.n).unwrap() > gamma_from_pfa(hi, spec.n).unwrap());
    let fs = flags(&mf, &e, &strict);
    let fl = flags(&mf, &e, &loose);
    for (lag, (a, b)) in fs.iter().zip(&fl).enumerate() {
        prop_assert!(!a || *b, "lag {} detected at the stricter threshold only", lag);
    }
    Ok(())
}

pub fn normalization_args() -> impl Strategy<Value = (u64, f64)> {
    (any::<u64>(), -10.0..20.0f64)
}

/// With `M/R = 2`, replicated streams and the power normalization on, the
/// detections match the critically sampled receiver on the same samples.
pub fn check_overlap_normalization((seed, snr_db): (u64, f64)) -> Result<(), TestCaseError> {
    let critical = ExperimentSpec { m: 32, r: 32, normalize: true, ..ExperimentSpec::default() };
    let overlapped = ExperimentSpec { r: 16, overlap_mode: OverlapMode::Replicated, ..critical.clone() };
    let (rx, y, hist) = realization(&critical, seed, snr_db);
    let rx2 = Receiver::new(&overlapped).unwrap();
    prop_assert_eq!(rx2.detector.norm_factor, 2.0);
    let (mf, e) = rx.lag_statistics(&y, hist).unwrap();
    let (mf2, e2) = rx2.lag_statistics(&y, hist).unwrap();
    prop_assume!(clear_of_threshold(&mf, &e, &rx.detector));
    prop_assert_eq!(flags(&mf, &e, &rx.detector), flags(&mf2, &e2, &rx2.detector));
    Ok(())
}

type LinearityArgs = (Vec<Complex64>, Vec<Complex64>, (f64, f64, f64, f64), (usize, usize, usize), bool, WindowKind);

pub fn linearity_args() -> impl Strategy<Value = LinearityArgs> {
    (
        complex_vec(160),
        complex_vec(160),
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
        (0usize..3, 0usize..3, 0usize..3),
        any::<bool>(),
        window_kind(),
    )
}

/// `filter(a x + b y) = a filter(x) + b filter(y)`.
pub fn check_linearity((x, y, (ar, ai, br, bi), (ni, mi, ki), replicated, win): LinearityArgs) -> Result<(), TestCaseError> {
    let n = [16usize, 32, 64][ni];
    let m = n >> mi;
    let r = m >> ki;
    let mode = if replicated { OverlapMode::Replicated } else { OverlapMode::Literal };
    let mut h_rng = rng(n as u64 + m as u64);
    let h = random_complex(&mut h_rng, n);
    let plan = BlockFilterPlan::from_impulse_response(&h, &PlanSpec::new(m, r).windows(win, win).mode(mode)).unwrap();
    let len = x.len().max(y.len());
    let pad = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.resize(len, Complex64::default());
        v
    };
    let (x, y) = (pad(&x), pad(&y));
    let (a, b) = (Complex64::new(ar, ai), Complex64::new(br, bi));
    let mix: Vec<Complex64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
    let lhs = filter(&plan, &SampleStream::new(mix)).unwrap().samples;
    let fx = filter(&plan, &SampleStream::new(x)).unwrap().samples;
    let fy = filter(&plan, &SampleStream::new(y)).unwrap().samples;
    let rhs: Vec<Complex64> = fx.iter().zip(&fy).map(|(u, v)| a * u + b * v).collect();
    let scale = 1.0 + max_abs(&fx) * a.norm() + max_abs(&fy) * b.norm();
    let diff = lhs.iter().zip(&rhs).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    prop_assert!(diff <= 1e-10 * scale, "diff {} scale {}", diff, scale);
    Ok(())
}

pub fn reconstruction_args() -> impl Strategy<Value = (Vec<Complex64>, usize, usize, WindowKind)> {
    (complex_vec(300), 0usize..3, 0usize..3, window_kind())
}

/// Analysis followed by synthesis with the dual window returns the input.
pub fn check_reconstruction((x, mi, ki, kind): (Vec<Complex64>, usize, usize, WindowKind)) -> Result<(), TestCaseError> {
    let m = [8usize, 16, 64][mi];
    let r = m >> ki;
    let w = make_window(kind, m).unwrap();
    let g = canonical_dual(&w, r).unwrap();
    let grid = analyze(&SampleStream::new(x.clone()), &w, m, r).unwrap();
    let y = synthesize(&grid, &g, r).unwrap().samples;
    prop_assert!(y.len() >= x.len());
    let err = y
        .iter()
        .enumerate()
        .map(|(i, v)| (v - x.get(i).copied().unwrap_or_default()).norm())
        .fold(0.0, f64::max);
    prop_assert!(err <= 1e-10, "error {}", err);
    Ok(())
}
