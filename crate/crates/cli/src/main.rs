use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use blockacq::acquisition::{detect_per_lag, gamma_from_pfa, max_search, trailing_energies, DetectorConfig};
use blockacq::analytics::{Method, ProbabilityReport};
use blockacq::block_filter::{
    complexity, doppler_grid, filter, BlockFilterPlan, FilterForm, OverlapMode, COMPLEXITY_CSV_HEADER,
};
use blockacq::channels::ChannelKind;
use blockacq::harness::{calibrate_threshold, curve_csv, measure_fa_counts, run_experiment, ExperimentSpec};
use blockacq::signals::{SampleStream, WindowKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

/// Block matched filtering and preamble acquisition.
#[derive(Parser)]
#[command(name = "blockacq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter a sample file with the block filter.
    Filter {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Impulse response to use instead of the preamble's matched filter.
        #[arg(long)]
        taps: Option<PathBuf>,
        /// Preamble samples to match instead of the configured Gold code.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Run the detector over every lag of a sample file.
    Acquire {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Analytic curves over the SNR grid.
    Analyze {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "approximate")]
        method: MethodArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo curves for an experiment.
    Montecarlo {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Find the threshold multiplier that gives the target false-alarm rate.
    Calibrate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long = "noise_trials", alias = "noise-trials", default_value_t = 10_000)]
        noise_trials: usize,
    },
    /// Complex-multiplication counts.
    Complexity {
        #[arg(long = "n", alias = "N")]
        n: usize,
        #[arg(long = "m", alias = "M")]
        m: usize,
        #[arg(long = "r", alias = "R")]
        r: usize,
    },
    /// Lag by Doppler-bin power grid of a sample file.
    Doppler {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        bins: usize,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Approximate,
    Exact,
}

/// Experiment file plus one override flag per field.
#[derive(Args)]
struct SpecArgs {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    channel: Option<ChannelKind>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long = "tap_separation", alias = "tap-separation")]
    tap_separation: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "analysis_window", alias = "analysis-window")]
    analysis_window: Option<WindowKind>,
    #[arg(long = "reference_window", alias = "reference-window")]
    reference_window: Option<WindowKind>,
    /// Comma separated, e.g. `-5,0,5`.
    #[arg(long = "snr_grid_db", alias = "snr-grid-db", value_delimiter = ',', allow_hyphen_values = true)]
    snr_grid_db: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long = "target_pfa", alias = "target-pfa")]
    target_pfa: Option<f64>,
    #[arg(long = "base_seed", alias = "base-seed")]
    base_seed: Option<u64>,
    #[arg(long = "threshold_multiplier", alias = "threshold-multiplier")]
    threshold_multiplier: Option<f64>,
    #[arg(long = "power_window", alias = "power-window")]
    power_window: Option<usize>,
    #[arg(long = "overlap_mode", alias = "overlap-mode")]
    overlap_mode: Option<OverlapMode>,
    #[arg(long = "filter_form", alias = "filter-form")]
    filter_form: Option<FilterForm>,
    #[arg(long)]
    normalize: Option<bool>,
    #[arg(long = "gold_pair", alias = "gold-pair")]
    gold_pair: Option<usize>,
}

impl SpecArgs {
    fn resolve(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ExperimentSpec::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = &self.$f { spec.$f = v.clone(); })* };
        }
        set!(
            channel, tap_separation, m, r, n, analysis_window, reference_window, snr_grid_db, trials,
            target_pfa, base_seed, threshold_multiplier, overlap_mode, filter_form, normalize, gold_pair
        );
        if self.kappa.is_some() {
            spec.kappa = self.kappa;
        }
        if self.power_window.is_some() {
            spec.power_window = self.power_window;
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Reads interleaved little-endian f64 (re, im) pairs.
fn read_samples(path: &Path) -> Result<Vec<Complex64>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.len() % 16 != 0 {
        bail!("{}: {} bytes is not a whole number of complex samples", path.display(), bytes.len());
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect())
}

fn write_samples(path: &Path, samples: &[Complex64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 * samples.len());
    for s in samples {
        bytes.extend_from_slice(&s.re.to_le_bytes());
        bytes.extend_from_slice(&s.im.to_le_bytes());
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn preamble(spec: &ExperimentSpec, reference: Option<&Path>) -> Result<SampleStream> {
    match reference {
        Some(path) => Ok(SampleStream::new(read_samples(path)?)),
        None => Ok(spec.preamble()?),
    }
}

fn matched_plan(spec: &ExperimentSpec, reference: Option<&Path>) -> Result<(BlockFilterPlan, usize)> {
    let s = preamble(spec, reference)?;
    let n = s.len();
    Ok((BlockFilterPlan::matched(&s, &spec.plan_spec())?, n))
}

fn acquire(spec: &ExperimentSpec, input: &Path, reference: Option<&Path>) -> Result<String> {
    let y = read_samples(input)?;
    let (plan, n) = matched_plan(spec, reference)?;
    if y.len() < n {
        bail!("input has {} samples, fewer than the {n}-sample preamble", y.len());
    }
    let out = filter(&plan, &SampleStream::new(y.clone()))?;
    // lag tau is the output after the preamble span tau..tau+N
    let lags = y.len() - n + 1;
    let mf = &out.samples[plan.n() - 1..plan.n() - 1 + lags];
    let energies = trailing_energies(&y, n, lags, n, spec.power_window_len())?;
    let cfg = DetectorConfig::new(spec.target_pfa, n)?.with_multiplier(spec.threshold_multiplier);
    let cfg = if spec.normalize { cfg.with_norm_factor(plan.norm_factor()) } else { cfg };
    let decisions = detect_per_lag(mf, &energies, &cfg)?;
    let best = max_search(&decisions)?;
    let mut csv = String::from("lag,statistic,threshold,detected,is_max\n");
    for d in &decisions {
        let is_max = d.lag == best.lag;
        csv.push_str(&format!("{},{},{},{},{}\n", d.lag, d.statistic, d.threshold_value, d.detected as u8, is_max as u8));
    }
    eprintln!("max at lag {} (statistic {}, detected {})", best.lag, best.statistic, best.detected);
    Ok(csv)
}

fn analyze(spec: &ExperimentSpec, method: MethodArg) -> Result<String> {
    let gamma = gamma_from_pfa(spec.target_pfa, spec.n)?;
    let method = match method {
        MethodArg::Approximate => Method::Approximate,
        MethodArg::Exact => Method::Exact,
    };
    let mut csv = String::from("snr_db,p_fa,p_fa_m,p_d,p_m,p_d_m,p_M\n");
    for &snr_db in &spec.snr_grid_db {
        let mu = 10f64.powf(snr_db / 10.0);
        let r = ProbabilityReport::compute(spec.channel, mu, gamma, spec.n, spec.kappa, method)?;
        csv.push_str(&format!("{snr_db},{},{},{},{},{},{}\n", r.p_fa, r.p_fa_m, r.p_d, r.p_m, r.p_d_m, r.p_big_m));
    }
    Ok(csv)
}

fn doppler(spec: &ExperimentSpec, input: &Path, bins: usize, reference: Option<&Path>) -> Result<String> {
    let y = SampleStream::new(read_samples(input)?);
    let (plan, _) = matched_plan(spec, reference)?;
    let grid = doppler_grid(&y, &plan, bins)?;
    let mut csv = String::from("lag");
    for b in 0..grid.n_bins {
        csv.push_str(&format!(",bin{b}"));
    }
    csv.push('\n');
    for (lag, row) in grid.values.iter().enumerate() {
        csv.push_str(&lag.to_string());
        for v in row {
            csv.push_str(&format!(",{v}"));
        }
        csv.push('\n');
    }
    Ok(csv)
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Filter { spec, input, output, taps, reference } => {
            let spec = spec.resolve()?;
            let plan = match taps {
                Some(path) => BlockFilterPlan::from_impulse_response(&read_samples(&path)?, &spec.plan_spec())?,
                None => matched_plan(&spec, reference.as_deref())?.0,
            };
            let out = filter(&plan, &SampleStream::new(read_samples(&input)?))?;
            write_samples(&output, &out.samples)
        }
        Command::Acquire { spec, input, reference, output } => {
            emit(output.as_deref(), &acquire(&spec.resolve()?, &input, reference.as_deref())?)
        }
        Command::Analyze { spec, method, output } => emit(output.as_deref(), &analyze(&spec.resolve()?, method)?),
        Command::Montecarlo { spec, output } => {
            emit(output.as_deref(), &curve_csv(&run_experiment(&spec.resolve()?)?))
        }
        Command::Calibrate { spec, noise_trials } => {
            let spec = spec.resolve()?;
            let c = calibrate_threshold(&spec, noise_trials)?;
            let fa = measure_fa_counts(&ExperimentSpec { threshold_multiplier: c, ..spec }, noise_trials)?;
            emit(None, &format!("threshold_multiplier,fa_rate,tests\n{c},{},{}\n", fa.rate(), fa.tests))
        }
        Command::Complexity { n, m, r } => {
            let c = complexity(n, m, r)?;
            emit(None, &format!("{COMPLEXITY_CSV_HEADER}\n{}", c.csv_rows()))
        }
        Command::Doppler { spec, input, bins, reference, output } => {
            emit(output.as_deref(), &doppler(&spec.resolve()?, &input, bins, reference.as_deref())?)
        }
    }
}
