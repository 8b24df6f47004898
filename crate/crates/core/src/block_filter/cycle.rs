use std::collections::VecDeque;

use super::plan::{BlockFilterPlan, FilterForm};
use crate::signals::SampleStream;
use crate::{Complex64, Error, Result};

/// Carry state for running a [`BlockFilterPlan`] one block at a time.
///
/// A state either tracks only the summed output or, when built with
/// [`FilterState::with_partials`] or for a conventional-form plan, one
/// partial output per filter block.
#[derive(Debug, Clone)]
pub struct FilterState {
    m: usize,
    l: usize,
    streams: usize,
    parts: usize,
    pending_tails: Vec<Vec<Vec<Complex64>>>,
    spectra: Vec<VecDeque<Vec<Complex64>>>,
    prev_input: Vec<Complex64>,
    acc: Vec<VecDeque<Complex64>>,
    acc_len: usize,
    cycle_index: u64,
}

impl FilterState {
    pub fn new(plan: &BlockFilterPlan) -> Self {
        let parts = match plan.form() {
            FilterForm::Simple => 1,
            FilterForm::Conventional => plan.l(),
        };
        Self::with_parts(plan, parts)
    }

    /// State that keeps one partial output per filter block.
    pub fn with_partials(plan: &BlockFilterPlan) -> Self {
        Self::with_parts(plan, plan.l())
    }

    fn with_parts(plan: &BlockFilterPlan, parts: usize) -> Self {
        let m = plan.m();
        let streams = plan.streams();
        let acc_len = (plan.latency() as isize - plan.min_shift()) as usize + m;
        Self {
            m,
            l: plan.l(),
            streams,
            parts,
            pending_tails: vec![vec![vec![Complex64::default(); m]; parts]; streams],
            spectra: (0..streams)
                .map(|_| (0..plan.l()).map(|_| vec![Complex64::default(); 2 * m]).collect())
                .collect(),
            prev_input: vec![Complex64::default(); m],
            acc: vec![VecDeque::from(vec![Complex64::default(); acc_len]); parts],
            acc_len,
            cycle_index: 0,
        }
    }

    pub fn reset(&mut self) {
        for v in self.pending_tails.iter_mut().flatten().flatten() {
            *v = Complex64::default();
        }
        for v in self.spectra.iter_mut().flatten().flatten() {
            *v = Complex64::default();
        }
        self.prev_input.fill(Complex64::default());
        for a in &mut self.acc {
            a.iter_mut().for_each(|v| *v = Complex64::default());
        }
        self.cycle_index = 0;
    }

    /// Tails waiting to be added to the next head, `[stream][part][M]`.
    pub fn pending_tails(&self) -> &[Vec<Vec<Complex64>>] {
        &self.pending_tails
    }

    pub fn cycle_index(&self) -> u64 {
        self.cycle_index
    }

    /// Number of separately tracked outputs (1, or `L` with partials).
    pub fn parts(&self) -> usize {
        self.parts
    }

    fn check(&self, plan: &BlockFilterPlan, block: &[Complex64]) -> Result<()> {
        if self.m != plan.m() || self.l != plan.l() || self.streams != plan.streams() {
            return Err(Error::StateMismatch(format!(
                "state built for M={}, L={}, {} streams; plan has M={}, L={}, {} streams",
                self.m,
                self.l,
                self.streams,
                plan.m(),
                plan.l(),
                plan.streams()
            )));
        }
        if block.len() != self.m {
            return Err(Error::StateMismatch(format!(
                "input block has {} samples, expected {}",
                block.len(),
                self.m
            )));
        }
        Ok(())
    }
}

/// Runs one filtering cycle: takes `M` new input samples and returns `M`
/// output samples, delayed by [`BlockFilterPlan::latency`].
pub fn filter_cycle(
    state: &mut FilterState,
    input_block: &[Complex64],
    plan: &BlockFilterPlan,
) -> Result<Vec<Complex64>> {
    let parts = filter_cycle_partials(state, input_block, plan)?;
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(out)
}

/// Like [`filter_cycle`] but returns the output split by filter block
/// (`[block][M]`), or a single entry when the state only tracks the sum.
pub fn filter_cycle_partials(
    state: &mut FilterState,
    input_block: &[Complex64],
    plan: &BlockFilterPlan,
) -> Result<Vec<Vec<Complex64>>> {
    state.check(plan, input_block)?;
    let m = state.m;
    let scale = 1.0 / (2 * m) as f64;
    let w_a = &plan.analysis_window().taps;
    let mut buf = vec![Complex64::default(); 2 * m];

    for j in 0..state.streams {
        let delay = plan.input_delay(j);
        let mut spec = vec![Complex64::default(); 2 * m];
        for i in 0..m {
            let v = if i < delay { state.prev_input[m - delay + i] } else { input_block[i - delay] };
            spec[i] = v * w_a[i];
        }
        plan.fft.process(&mut spec);
        let hist = &mut state.spectra[j];
        hist.pop_back();
        hist.push_front(spec);

        let offset = (plan.latency() as isize - plan.output_shift(j)) as usize;
        let blocks = &plan.blocks()[j];
        for part in 0..state.parts {
            let range = if state.parts == 1 { 0..state.l } else { part..part + 1 };
            buf.fill(Complex64::default());
            for b in range {
                for ((o, u), h) in buf.iter_mut().zip(&hist[b]).zip(&blocks[b]) {
                    *o += u * h;
                }
            }
            plan.ifft.process(&mut buf);
            let tail = &mut state.pending_tails[j][part];
            let acc = &mut state.acc[part];
            for i in 0..m {
                acc[offset + i] += buf[i] * scale + tail[i];
                tail[i] = buf[m + i] * scale;
            }
        }
    }
    state.prev_input.copy_from_slice(input_block);
    state.cycle_index += 1;

    let mut out = Vec::with_capacity(state.parts);
    for acc in &mut state.acc {
        out.push(acc.drain(..m).collect::<Vec<_>>());
        acc.resize(state.acc_len, Complex64::default());
    }
    Ok(out)
}

fn run(plan: &BlockFilterPlan, x: &SampleStream, mut state: FilterState) -> Result<Vec<Vec<Complex64>>> {
    if x.is_empty() {
        return Err(Error::EmptyInput("input"));
    }
    let m = plan.m();
    let out_len = x.len() + plan.n() - 1;
    let cycles = (out_len + plan.latency()).div_ceil(m);
    let zero = vec![Complex64::default(); m];
    let mut parts: Vec<Vec<Complex64>> = Vec::new();
    for c in 0..cycles {
        let start = c * m;
        let block: Vec<Complex64> = if start + m <= x.len() {
            x.samples[start..start + m].to_vec()
        } else if start < x.len() {
            let mut b = x.samples[start..].to_vec();
            b.resize(m, Complex64::default());
            b
        } else {
            zero.clone()
        };
        let p = filter_cycle_partials(&mut state, &block, plan)?;
        if parts.is_empty() {
            parts = vec![Vec::with_capacity(cycles * m); p.len()];
        }
        for (dst, src) in parts.iter_mut().zip(p) {
            dst.extend(src);
        }
    }
    for p in &mut parts {
        p.drain(..plan.latency());
        p.truncate(out_len);
    }
    Ok(parts)
}

/// Filters a whole stream, flushing the tails. The result has
/// `len(x) + L*M - 1` samples, aligned so index `t` is the output at time `t`.
pub fn filter(plan: &BlockFilterPlan, x: &SampleStream) -> Result<SampleStream> {
    let parts = run(plan, x, FilterState::new(plan))?;
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(SampleStream { samples: out, rate: x.rate })
}

/// Per-block partial outputs of a whole stream, `[block][time]`, summed
/// over overlap streams. They add up to [`filter`].
pub fn filter_partials(plan: &BlockFilterPlan, x: &SampleStream) -> Result<Vec<Vec<Complex64>>> {
    run(plan, x, FilterState::with_partials(plan))
}
