use serde::{Deserialize, Serialize};

use crate::acquisition::DetectorConfig;
use crate::block_filter::{check_framing, BlockFilterPlan, FilterForm, OverlapMode, PlanSpec};
use crate::channels::{ChannelKind, ChannelSpec};
use crate::signals::{generate_gold_preamble, SampleStream, WindowKind};
use crate::{Error, Result};

/// One Monte Carlo experiment. Every field has a default, so a config file
/// only needs the fields it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub channel: ChannelKind,
    pub kappa: Option<f64>,
    pub tap_separation: usize,
    pub m: usize,
    pub r: usize,
    /// Preamble length: `2^d - 1`, or `2^d` for an extended Gold code.
    pub n: usize,
    pub analysis_window: WindowKind,
    pub reference_window: WindowKind,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub target_pfa: f64,
    pub base_seed: u64,
    pub threshold_multiplier: f64,
    /// Samples in the trailing power estimate; `None` means `16 N`.
    pub power_window: Option<usize>,
    pub overlap_mode: OverlapMode,
    pub filter_form: FilterForm,
    /// Apply the `(M/R) ||w_a|| / ||w_r||` normalization to the threshold.
    pub normalize: bool,
    pub gold_pair: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            channel: ChannelKind::RayleighFlat,
            kappa: None,
            tap_separation: 1,
            m: 32,
            r: 32,
            n: 64,
            analysis_window: WindowKind::Rectangular,
            reference_window: WindowKind::Rectangular,
            snr_grid_db: (0..16).map(|i| -5.0 + 2.0 * i as f64).collect(),
            trials: 1000,
            target_pfa: 0.01,
            base_seed: 1,
            threshold_multiplier: 1.0,
            power_window: None,
            overlap_mode: OverlapMode::Literal,
            filter_form: FilterForm::Simple,
            normalize: false,
            gold_pair: 0,
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        check_framing(self.m, self.r)?;
        if self.trials == 0 {
            return Err(Error::InvalidExperiment("trials must be at least 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidExperiment("snr_grid_db is empty".into()));
        }
        if !(self.threshold_multiplier > 0.0) {
            return Err(Error::InvalidExperiment("threshold_multiplier must be positive".into()));
        }
        if self.power_window == Some(0) {
            return Err(Error::InvalidExperiment("power_window must be at least 1".into()));
        }
        self.gold_degree()?;
        self.channel_spec(0.0).validate()?;
        if self.channel_spec(0.0).extra_delay() >= self.n {
            return Err(Error::InvalidExperiment("tap separation must be below the preamble length".into()));
        }
        DetectorConfig::new(self.target_pfa, self.n)?;
        Ok(())
    }

    fn gold_degree(&self) -> Result<(u32, bool)> {
        let n = self.n;
        if n >= 2 && (n + 1).is_power_of_two() {
            Ok(((n + 1).trailing_zeros(), false))
        } else if n >= 2 && n.is_power_of_two() {
            Ok((n.trailing_zeros(), true))
        } else {
            Err(Error::InvalidExperiment(format!("preamble length {n} is neither 2^d - 1 nor 2^d")))
        }
    }

    pub fn channel_spec(&self, snr_db: f64) -> ChannelSpec {
        ChannelSpec { kind: self.channel, snr_db, kappa: self.kappa, tap_separation: self.tap_separation }
    }

    /// Unit-norm Gold preamble of length `n`.
    pub fn preamble(&self) -> Result<SampleStream> {
        let (degree, extend) = self.gold_degree()?;
        let pn = generate_gold_preamble(degree, self.gold_pair, extend)?;
        Ok(SampleStream::new(pn.normalized()))
    }

    pub fn plan_spec(&self) -> PlanSpec {
        PlanSpec::new(self.m, self.r)
            .windows(self.analysis_window, self.reference_window)
            .mode(self.overlap_mode)
            .form(self.filter_form)
    }

    pub fn plan(&self) -> Result<BlockFilterPlan> {
        BlockFilterPlan::matched(&self.preamble()?, &self.plan_spec())
    }

    pub fn detector(&self, plan: &BlockFilterPlan) -> Result<DetectorConfig> {
        let cfg = DetectorConfig::new(self.target_pfa, self.n)?.with_multiplier(self.threshold_multiplier);
        Ok(if self.normalize { cfg.with_norm_factor(plan.norm_factor()) } else { cfg })
    }

    pub fn power_window_len(&self) -> usize {
        self.power_window.unwrap_or(16 * self.n)
    }
}
