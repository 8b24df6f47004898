use rustfft::FftPlanner;

use super::cycle::filter_partials;
use super::plan::BlockFilterPlan;
use crate::signals::SampleStream;
use crate::{Complex64, Error, Result};

/// Lag-by-frequency grid of squared magnitudes, `values[lag][bin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerGrid {
    pub n_bins: usize,
    pub values: Vec<Vec<f64>>,
}

impl DopplerGrid {
    pub fn lags(&self) -> usize {
        self.values.len()
    }

    /// `(lag, bin, value)` of the largest cell; ties go to the smallest lag, then bin.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (lag, row) in self.values.iter().enumerate() {
            for (bin, &v) in row.iter().enumerate() {
                if best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((lag, bin, v));
                }
            }
        }
        best
    }
}

/// For every lag `0..len(x)`, transforms the `L` per-block matched-filter
/// partials (in reference time order, zero-padded to `n_bins`) and returns
/// their squared magnitudes. Lag `tau` is the matched-filter output at
/// `tau + L*M - 1`, so bin 0 equals the plain filter output power.
pub fn doppler_grid(x: &SampleStream, plan: &BlockFilterPlan, n_bins: usize) -> Result<DopplerGrid> {
    let l = plan.l();
    if l < 2 {
        return Err(Error::TooFewBlocks(l));
    }
    if n_bins < l {
        return Err(Error::InvalidArgument(format!("{n_bins} frequency bins is fewer than {l} blocks")));
    }
    let parts = filter_partials(plan, x)?;
    let fft = FftPlanner::new().plan_fft_forward(n_bins);
    let n = plan.n();
    let mut buf = vec![Complex64::default(); n_bins];
    let values = (0..x.len())
        .map(|tau| {
            let t = tau + n - 1;
            buf.fill(Complex64::default());
            // filter block b holds the reference segment L-1-b
            for (i, slot) in buf.iter_mut().take(l).enumerate() {
                *slot = parts[l - 1 - i][t];
            }
            fft.process(&mut buf);
            buf.iter().map(|v| v.norm_sqr()).collect()
        })
        .collect();
    Ok(DopplerGrid { n_bins, values })
}
