use crate::signals::SampleStream;
use crate::{Complex64, Error, Result};

/// Full linear convolution in the time domain, `len(x) + len(h) - 1` samples.
pub fn direct_convolve(x: &SampleStream, h: &SampleStream) -> Result<SampleStream> {
    if x.is_empty() || h.is_empty() {
        return Err(Error::EmptyInput("convolution operand"));
    }
    let mut out = vec![Complex64::default(); x.len() + h.len() - 1];
    for (i, xv) in x.samples.iter().enumerate() {
        for (k, hv) in h.samples.iter().enumerate() {
            out[i + k] += xv * hv;
        }
    }
    Ok(SampleStream { samples: out, rate: x.rate })
}
