use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::stft::{blocks_for, check_framing};
use crate::signals::{make_window, SampleStream, Window, WindowKind};
use crate::{Complex64, Error, Result};

/// How the filter is split across the `M / R` overlap streams.
///
/// `Literal` gives stream `j` the filter taps starting at `j * R`, so the
/// overlapped filter is stepped along with the overlapped input. `Replicated`
/// runs the whole filter on every stream, which replicates the response
/// `M / R` times for rectangular windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMode {
    #[default]
    Literal,
    Replicated,
}

/// `Simple` sums the block products before one inverse transform per stream.
/// `Conventional` inverse transforms every block product and keeps per-block
/// partial outputs, which Doppler processing needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterForm {
    #[default]
    Simple,
    Conventional,
}

impl FromStr for OverlapMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Self::Literal),
            "replicated" => Ok(Self::Replicated),
            _ => Err(Error::Parse(format!("unknown overlap mode '{s}'"))),
        }
    }
}

impl FromStr for FilterForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Self::Simple),
            "conventional" => Ok(Self::Conventional),
            _ => Err(Error::Parse(format!("unknown filter form '{s}'"))),
        }
    }
}

/// Framing and window choices for building a [`BlockFilterPlan`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSpec {
    pub m: usize,
    pub r: usize,
    pub analysis: WindowKind,
    pub reference: WindowKind,
    pub mode: OverlapMode,
    pub form: FilterForm,
}

impl PlanSpec {
    /// Rectangular windows, literal overlap, simple form.
    pub fn new(m: usize, r: usize) -> Self {
        Self {
            m,
            r,
            analysis: WindowKind::Rectangular,
            reference: WindowKind::Rectangular,
            mode: OverlapMode::Literal,
            form: FilterForm::Simple,
        }
    }

    pub fn windows(mut self, analysis: WindowKind, reference: WindowKind) -> Self {
        self.analysis = analysis;
        self.reference = reference;
        self
    }

    pub fn mode(mut self, mode: OverlapMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn form(mut self, form: FilterForm) -> Self {
        self.form = form;
        self
    }
}

/// Precomputed 2M-point block spectra of a filter, one set of `L` blocks per
/// overlap stream.
#[derive(Clone)]
pub struct BlockFilterPlan {
    m: usize,
    r: usize,
    l: usize,
    mode: OverlapMode,
    form: FilterForm,
    analysis: Window,
    reference: Window,
    blocks: Vec<Vec<Vec<Complex64>>>,
    input_delay: Vec<usize>,
    output_shift: Vec<isize>,
    latency: usize,
    ref_norm: f64,
    pub(crate) fft: Arc<dyn Fft<f64>>,
    pub(crate) ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for BlockFilterPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockFilterPlan")
            .field("m", &self.m)
            .field("r", &self.r)
            .field("l", &self.l)
            .field("mode", &self.mode)
            .field("form", &self.form)
            .field("analysis", &self.analysis.kind)
            .field("reference", &self.reference.kind)
            .field("latency", &self.latency)
            .finish()
    }
}

impl BlockFilterPlan {
    /// Plan for an arbitrary impulse response `h`, zero-padded to `L * M`.
    pub fn from_impulse_response(h: &[Complex64], spec: &PlanSpec) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::EmptyInput("impulse response"));
        }
        let (m, r) = (spec.m, spec.r);
        check_framing(m, r)?;
        let analysis = make_window(spec.analysis, m)?;
        let reference = make_window(spec.reference, m)?;
        Self::build(h, analysis, reference, m, r, spec.mode, spec.form)
    }

    /// Matched filter for reference `s`: the conjugated, time-reversed
    /// reference after padding it to `L * M` samples.
    pub fn matched(s: &SampleStream, spec: &PlanSpec) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyInput("reference"));
        }
        check_framing(spec.m, spec.r)?;
        let h = matched_response(s, spec.m);
        Self::from_impulse_response(&h, spec)
    }

    fn build(
        h: &[Complex64],
        analysis: Window,
        reference: Window,
        m: usize,
        r: usize,
        mode: OverlapMode,
        form: FilterForm,
    ) -> Result<Self> {
        let l = blocks_for(h.len(), m);
        let n = l * m;
        let k = m / r;
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * m);
        let ifft = planner.plan_fft_inverse(2 * m);

        let mut blocks = Vec::with_capacity(k);
        let mut input_delay = Vec::with_capacity(k);
        let mut output_shift = Vec::with_capacity(k);
        for j in 0..k {
            let first_tap = match mode {
                OverlapMode::Literal => j * r,
                OverlapMode::Replicated => 0,
            };
            let delay = (m - j * r) % m;
            let mut stream = Vec::with_capacity(l);
            for b in 0..l {
                let mut buf = vec![Complex64::default(); 2 * m];
                for (i, slot) in buf.iter_mut().take(m).enumerate() {
                    let tap = first_tap + b * m + i;
                    if tap < n {
                        *slot = h.get(tap).copied().unwrap_or_default() * reference.taps[i];
                    }
                }
                fft.process(&mut buf);
                stream.push(buf);
            }
            blocks.push(stream);
            input_delay.push(delay);
            output_shift.push(delay as isize - first_tap as isize);
        }
        let latency = output_shift.iter().copied().max().unwrap_or(0).max(0) as usize;
        let ref_norm = h.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        Ok(Self {
            m,
            r,
            l,
            mode,
            form,
            analysis,
            reference,
            blocks,
            input_delay,
            output_shift,
            latency,
            ref_norm,
            fft,
            ifft,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn r(&self) -> usize {
        self.r
    }
    /// Number of filter blocks per stream.
    pub fn l(&self) -> usize {
        self.l
    }
    /// Filter length after padding, `L * M`.
    pub fn n(&self) -> usize {
        self.l * self.m
    }
    pub fn streams(&self) -> usize {
        self.m / self.r
    }
    pub fn mode(&self) -> OverlapMode {
        self.mode
    }
    pub fn form(&self) -> FilterForm {
        self.form
    }
    pub fn analysis_window(&self) -> &Window {
        &self.analysis
    }
    pub fn reference_window(&self) -> &Window {
        &self.reference
    }
    /// `||h||`, which for a matched plan is the reference norm `||s||`.
    pub fn ref_norm(&self) -> f64 {
        self.ref_norm
    }
    /// Stored 2M-point responses, indexed `[stream][block]`.
    pub fn blocks(&self) -> &[Vec<Vec<Complex64>>] {
        &self.blocks
    }
    pub(crate) fn input_delay(&self, stream: usize) -> usize {
        self.input_delay[stream]
    }
    pub(crate) fn output_shift(&self, stream: usize) -> isize {
        self.output_shift[stream]
    }
    /// Samples by which the emitted output lags the input time base.
    pub fn latency(&self) -> usize {
        self.latency
    }
    pub(crate) fn min_shift(&self) -> isize {
        self.output_shift.iter().copied().min().unwrap_or(0)
    }

    /// Detector normalization `(M/R) * ||w_a|| / ||w_r||`.
    pub fn norm_factor(&self) -> f64 {
        self.streams() as f64 * self.analysis.norm() / self.reference.norm()
    }
}

/// Matched-filter impulse response of `s` padded to a multiple of `m`.
pub fn matched_response(s: &SampleStream, m: usize) -> Vec<Complex64> {
    let n = blocks_for(s.len(), m) * m;
    (0..n)
        .map(|i| s.samples.get(n - 1 - i).map(|v| v.conj()).unwrap_or_default())
        .collect()
}

/// Matched-filter plan with reference window `w_r`, rectangular analysis
/// window, literal overlap and the simple form.
pub fn plan_filter(s: &SampleStream, w_r: &Window, m: usize, r: usize) -> Result<BlockFilterPlan> {
    if s.is_empty() {
        return Err(Error::EmptyInput("reference"));
    }
    check_framing(m, r)?;
    if w_r.len() != m {
        return Err(Error::InvalidWindow(format!(
            "reference window length {} differs from block size {m}",
            w_r.len()
        )));
    }
    let h = matched_response(s, m);
    BlockFilterPlan::build(
        &h,
        Window::rectangular(m)?,
        w_r.clone(),
        m,
        r,
        OverlapMode::Literal,
        FilterForm::Simple,
    )
}
