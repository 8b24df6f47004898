use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WindowKind {
    Rectangular,
    Kaiser { beta: f64 },
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowKind::Rectangular => write!(f, "rectangular"),
            WindowKind::Kaiser { beta } => write!(f, "kaiser:{beta}"),
        }
    }
}

/// Accepts `rectangular`, `rect`, `kaiser:8` and `kaiser(8)`.
impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "rectangular" || s == "rect" {
            return Ok(WindowKind::Rectangular);
        }
        let beta = s
            .strip_prefix("kaiser:")
            .or_else(|| s.strip_prefix("kaiser(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| Error::Parse(format!("unknown window kind {s:?}")))?;
        let beta: f64 = beta
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("kaiser beta {beta:?}: {e}")))?;
        Ok(WindowKind::Kaiser { beta })
    }
}

impl TryFrom<String> for WindowKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WindowKind> for String {
    fn from(k: WindowKind) -> String {
        k.to_string()
    }
}

/// A length-`M` window.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub taps: Vec<f64>,
    pub kind: WindowKind,
}

impl Window {
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Sum of squared taps.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum()
    }

    /// Euclidean norm, `sqrt(energy)`.
    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn is_rectangular(&self) -> bool {
        self.taps.iter().all(|&t| t == 1.0)
    }

    pub fn rectangular(m: usize) -> Result<Self> {
        make_window(WindowKind::Rectangular, m)
    }
}

/// Modified Bessel function of the first kind, order zero, by its power
/// series `sum_k ((x/2)^k / k!)^2`, summed to relative error below 1e-16.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    sum
}

pub fn make_window(kind: WindowKind, m: usize) -> Result<Window> {
    if m == 0 {
        return Err(Error::ZeroBlockSize);
    }
    let taps = match kind {
        WindowKind::Rectangular => vec![1.0; m],
        WindowKind::Kaiser { beta } => {
            if !(beta >= 0.0 && beta.is_finite()) {
                return Err(Error::InvalidWindow(format!("kaiser beta {beta}")));
            }
            if m == 1 {
                vec![1.0]
            } else {
                let denom = bessel_i0(beta);
                let span = (m - 1) as f64;
                (0..m)
                    .map(|n| {
                        let t = 2.0 * n as f64 / span - 1.0;
                        bessel_i0(beta * (1.0 - t * t).max(0.0).sqrt()) / denom
                    })
                    .collect()
            }
        }
    };
    Ok(Window { taps, kind })
}
