use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::signals::{SampleStream, Window, WindowKind};
use crate::{Complex64, Error, Result};

/// STFT coefficients as `L * M / R` columns of `M` bins each.
///
/// Columns are taken circularly over the zero-padded length `N = L * M`,
/// so every sample is covered by exactly `M / R` columns. Column `c` starts
/// at sample `c * R`, and bin phases refer to the absolute sample index.
#[derive(Debug, Clone, PartialEq)]
pub struct StftGrid {
    pub m: usize,
    pub r: usize,
    pub l: usize,
    pub columns: Vec<Vec<Complex64>>,
    pub window: WindowKind,
}

impl StftGrid {
    /// Number of overlap streams, `M / R`.
    pub fn overlap(&self) -> usize {
        self.m / self.r
    }

    /// Signal length covered by the grid, `L * M`.
    pub fn n(&self) -> usize {
        self.l * self.m
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn energy(&self) -> f64 {
        self.columns
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum()
    }

    pub(crate) fn check_shape(&self) -> Result<()> {
        check_framing(self.m, self.r)?;
        let expected = self.l * self.m / self.r;
        if self.columns.len() != expected {
            return Err(Error::GridShape(format!(
                "{} columns, expected L*M/R = {expected}",
                self.columns.len()
            )));
        }
        if let Some(bad) = self.columns.iter().position(|c| c.len() != self.m) {
            return Err(Error::GridShape(format!(
                "column {bad} has {} bins, expected {}",
                self.columns[bad].len(),
                self.m
            )));
        }
        Ok(())
    }
}

/// `M >= 1`, `R` divides `M`, and `M / R` is a power of two.
pub fn check_framing(m: usize, r: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::ZeroBlockSize);
    }
    if r == 0 || m % r != 0 || !(m / r).is_power_of_two() {
        return Err(Error::InvalidFraming(format!(
            "M/R must be one of 1, 2, 4, ... (M = {m}, R = {r})"
        )));
    }
    Ok(())
}

/// Number of length-`m` blocks needed to hold `len` samples (at least one).
pub(crate) fn blocks_for(len: usize, m: usize) -> usize {
    len.div_ceil(m).max(1)
}

/// Short-time Fourier transform with analysis window `w`, block size `m`
/// and hop `r`. The input is zero-padded to a multiple of `m`.
pub fn analyze(x: &SampleStream, w: &Window, m: usize, r: usize) -> Result<StftGrid> {
    check_framing(m, r)?;
    if w.len() != m {
        return Err(Error::InvalidWindow(format!(
            "window length {} differs from block size {m}",
            w.len()
        )));
    }
    let l = blocks_for(x.len(), m);
    let n = l * m;
    let fft = FftPlanner::new().plan_fft_forward(m);
    let mut columns = Vec::with_capacity(n / r);
    for c in 0..n / r {
        let start = c * r;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|i| {
                let idx = (start + i) % n;
                x.samples.get(idx).copied().unwrap_or_default() * w.taps[i]
            })
            .collect();
        fft.process(&mut buf);
        // absolute-index phase: exp(-j 2 pi k (start mod M) / M)
        let shift = start % m;
        if shift != 0 {
            for (k, v) in buf.iter_mut().enumerate() {
                let phase = -2.0 * PI * ((k * shift) % m) as f64 / m as f64;
                *v *= Complex64::from_polar(1.0, phase);
            }
        }
        columns.push(buf);
    }
    Ok(StftGrid { m, r, l, columns, window: w.kind })
}
