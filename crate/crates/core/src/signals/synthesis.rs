use rustfft::FftPlanner;

use crate::block_filter::StftGrid;
use crate::signals::{SampleStream, Window};
use crate::{Complex64, Error, Result};

/// Inverse STFT: each column is inverse transformed (with the `1/M`
/// factor), multiplied by the synthesis window `g` and overlap-added at hop
/// `r`, circularly over `N = L * M` samples.
///
/// Used on data-symbol grids this is the GMC modulator; with `L = 1`,
/// `R = M` and a rectangular `g` it produces an OFDM symbol.
pub fn synthesize(grid: &StftGrid, g: &Window, r: usize) -> Result<SampleStream> {
    grid.check_shape()?;
    if r != grid.r {
        return Err(Error::GridShape(format!("hop {r} but grid was built with hop {}", grid.r)));
    }
    let m = grid.m;
    if g.len() != m {
        return Err(Error::InvalidWindow(format!(
            "synthesis window length {} differs from block size {m}",
            g.len()
        )));
    }
    let n = grid.n();
    let ifft = FftPlanner::new().plan_fft_inverse(m);
    let scale = 1.0 / m as f64;
    let mut out = vec![Complex64::default(); n];
    let mut buf = vec![Complex64::default(); m];
    for (c, col) in grid.columns.iter().enumerate() {
        buf.copy_from_slice(col);
        ifft.process(&mut buf);
        let start = c * r;
        for (i, &gi) in g.taps.iter().enumerate() {
            let abs = start + i;
            out[abs % n] += buf[abs % m] * (gi * scale);
        }
    }
    Ok(SampleStream::new(out))
}

/// Canonical dual of the analysis window `w` at hop `r`:
/// `g(i) = w(i) / sum_j w(i + jR)^2`, which gives perfect reconstruction
/// with [`synthesize`]. A rectangular `w` yields the constant `R / M`.
pub fn canonical_dual(w: &Window, r: usize) -> Result<Window> {
    let m = w.len();
    crate::block_filter::check_framing(m, r)?;
    let mut frame = vec![0.0; r];
    for (i, t) in w.taps.iter().enumerate() {
        frame[i % r] += t * t;
    }
    if let Some(res) = frame.iter().position(|&d| d <= 0.0) {
        return Err(Error::InvalidWindow(format!(
            "window vanishes on residue class {res} mod {r}; no dual exists"
        )));
    }
    let taps = w
        .taps
        .iter()
        .enumerate()
        .map(|(i, t)| t / frame[i % r])
        .collect();
    Ok(Window { taps, kind: w.kind })
}
