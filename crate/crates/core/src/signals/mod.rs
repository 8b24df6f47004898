//! Preamble sequences, windows and STFT synthesis.

mod pn;
mod synthesis;
mod window;

pub use pn::{
    generate_gold_preamble, m_sequence, preferred_pairs, ExtensionChip, GoldCode, PnSequence,
    PreferredPair,
};
pub use synthesis::{canonical_dual, synthesize};
pub use window::{bessel_i0, make_window, Window, WindowKind};

use crate::{Complex64, Error, Result};

/// A finite block of complex baseband samples at `rate` samples per chip.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    pub samples: Vec<Complex64>,
    pub rate: usize,
}

impl SampleStream {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self { samples, rate: 1 }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.samples
    }
}

impl From<Vec<Complex64>> for SampleStream {
    fn from(samples: Vec<Complex64>) -> Self {
        Self::new(samples)
    }
}

/// Renders real values as one value per line.
pub fn to_column_text(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 12);
    for v in values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

/// Parses the one-value-per-line format; blank lines and `#` comments are skipped.
pub fn parse_column_text(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<f64>()
                .map_err(|e| Error::Parse(format!("{l:?}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_text_round_trip() {
        let w = make_window(WindowKind::Kaiser { beta: 8.0 }, 17).unwrap();
        let text = to_column_text(&w.taps);
        assert_eq!(text.lines().count(), 17);
        assert_eq!(parse_column_text(&text).unwrap(), w.taps);
    }

    #[test]
    fn column_text_rejects_garbage() {
        assert!(parse_column_text("1.0\nabc\n").is_err());
        assert_eq!(parse_column_text("# hdr\n\n2\n").unwrap(), vec![2.0]);
    }
}
