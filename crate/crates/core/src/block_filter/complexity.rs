use super::stft::check_framing;
use crate::{Error, Result};

/// Complex-multiplication counts of the filtering variants for a length-`N`
/// filter with block size `M` and hop `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complexity {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// `N^2`
    pub time_domain: f64,
    /// `2N(log2 N + 1)`
    pub ola_literal: f64,
    /// `2N(log2 2N + 1)`, the count for a 2N-point FFT OLA filter
    pub ola_consistent: f64,
    /// `(2MN/R)(log2 2M + LM/R)`
    pub block_conventional: f64,
    /// `(2MN/R)((1 + R/M) log2(2M) / 2 + LM/R)`
    pub block_simple: f64,
}

pub const COMPLEXITY_CSV_HEADER: &str = "variant,N,M,R,cm_count";

pub fn complexity(n: usize, m: usize, r: usize) -> Result<Complexity> {
    check_framing(m, r)?;
    if n == 0 || n % m != 0 {
        return Err(Error::InvalidFraming(format!("M = {m} does not divide N = {n}")));
    }
    let (nf, mf, rf) = (n as f64, m as f64, r as f64);
    let l = nf / mf;
    let lg2m = (2.0 * mf).log2();
    let front = 2.0 * mf * nf / rf;
    Ok(Complexity {
        n,
        m,
        r,
        time_domain: nf * nf,
        ola_literal: 2.0 * nf * (nf.log2() + 1.0),
        ola_consistent: 2.0 * nf * ((2.0 * nf).log2() + 1.0),
        block_conventional: front * (lg2m + l * mf / rf),
        block_simple: front * (0.5 * (1.0 + rf / mf) * lg2m + l * mf / rf),
    })
}

impl Complexity {
    pub fn rows(&self) -> [(&'static str, f64); 5] {
        [
            ("time_domain", self.time_domain),
            ("ola_literal", self.ola_literal),
            ("ola_consistent", self.ola_consistent),
            ("block_conventional", self.block_conventional),
            ("block_simple", self.block_simple),
        ]
    }

    /// CSV rows without the header.
    pub fn csv_rows(&self) -> String {
        self.rows()
            .iter()
            .map(|(name, v)| format!("{name},{},{},{},{v}\n", self.n, self.m, self.r))
            .collect()
    }
}
