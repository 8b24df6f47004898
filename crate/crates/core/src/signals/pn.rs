use crate::{Complex64, Error, Result};

/// A bipolar chip sequence with every chip in {+1, -1}.
#[derive(Debug, Clone, PartialEq)]
pub struct PnSequence {
    chips: Vec<f64>,
}

impl PnSequence {
    /// Wraps bipolar chips; any value other than ±1 is rejected.
    pub fn from_chips(chips: Vec<f64>) -> Result<Self> {
        if chips.is_empty() {
            return Err(Error::EmptyInput("chip sequence"));
        }
        if let Some(bad) = chips.iter().find(|c| **c != 1.0 && **c != -1.0) {
            return Err(Error::Parse(format!("chip value {bad} is not +1 or -1")));
        }
        Ok(Self { chips })
    }

    fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        Self {
            chips: bits
                .into_iter()
                .map(|b| if b == 0 { 1.0 } else { -1.0 })
                .collect(),
        }
    }

    pub fn chips(&self) -> &[f64] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn periodic_autocorrelation(&self, lag: usize) -> f64 {
        self.periodic_crosscorrelation(self, lag)
    }

    /// `sum_n a[n] * b[(n + lag) mod len]`; both sequences must have equal length.
    pub fn periodic_crosscorrelation(&self, other: &PnSequence, lag: usize) -> f64 {
        let n = self.len();
        assert_eq!(n, other.len(), "periodic correlation needs equal lengths");
        (0..n)
            .map(|i| self.chips[i] * other.chips[(i + lag) % n])
            .sum()
    }

    /// Unit-norm complex preamble at one sample per chip.
    pub fn normalized(&self) -> Vec<Complex64> {
        self.to_samples(1)
    }

    /// Unit-norm complex samples with each chip held for `rate` samples
    /// (rectangular chip pulse).
    pub fn to_samples(&self, rate: usize) -> Vec<Complex64> {
        let rate = rate.max(1);
        let scale = 1.0 / ((self.len() * rate) as f64).sqrt();
        self.chips
            .iter()
            .flat_map(|&c| std::iter::repeat_n(Complex64::new(c * scale, 0.0), rate))
            .collect()
    }
}

/// Feedback polynomials of a preferred pair, written as the exponents of
/// their non-constant terms (`[6, 1]` is x^6 + x + 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreferredPair {
    pub degree: u32,
    pub first: &'static [u32],
    pub second: &'static [u32],
}

const PREFERRED_PAIRS: &[PreferredPair] = &[
    PreferredPair { degree: 5, first: &[5, 2], second: &[5, 4, 3, 2] },
    PreferredPair { degree: 6, first: &[6, 1], second: &[6, 5, 2, 1] },
    PreferredPair { degree: 7, first: &[7, 3], second: &[7, 3, 2, 1] },
    PreferredPair { degree: 7, first: &[7, 1], second: &[7, 3] },
    PreferredPair { degree: 9, first: &[9, 4], second: &[9, 6, 4, 3] },
    PreferredPair { degree: 10, first: &[10, 3], second: &[10, 9, 8, 6, 3, 2] },
];

/// All preferred pairs known for `degree`, in table order.
pub fn preferred_pairs(degree: u32) -> Vec<PreferredPair> {
    PREFERRED_PAIRS
        .iter()
        .copied()
        .filter(|p| p.degree == degree)
        .collect()
}

/// Maximal-length sequence of the Fibonacci LFSR with the given feedback
/// polynomial and an all-ones initial register. Output bits are 0/1.
pub fn m_sequence(poly: &[u32]) -> Result<Vec<u8>> {
    let degree = *poly.iter().max().ok_or(Error::EmptyInput("polynomial"))?;
    if !(2..=20).contains(&degree) {
        return Err(Error::UnsupportedDegree(degree));
    }
    let d = degree as usize;
    let period = (1usize << d) - 1;
    let mut bits = vec![1u8; d];
    bits.reserve(period - d);
    // a[n + d] = a[n] + sum_{t in poly, t < d} a[n + t]  (mod 2)
    while bits.len() < period {
        let n = bits.len() - d;
        let mut v = bits[n];
        for &t in poly.iter().filter(|&&t| (t as usize) < d && t > 0) {
            v ^= bits[n + t as usize];
        }
        bits.push(v);
    }
    Ok(bits)
}

/// Which chip value extends a `2^d - 1` Gold code by one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ExtensionChip {
    #[default]
    CopyFirst,
    CopyLast,
    Fixed(f64),
}

/// Gold code generator built from a preferred pair.
#[derive(Debug, Clone)]
pub struct GoldCode {
    pair: PreferredPair,
    shift: usize,
    extension: Option<ExtensionChip>,
}

impl GoldCode {
    pub fn new(degree: u32, pair_select: usize) -> Result<Self> {
        let pairs = preferred_pairs(degree);
        if pairs.is_empty() {
            return Err(Error::UnsupportedDegree(degree));
        }
        let pair = *pairs.get(pair_select).ok_or(Error::PairOutOfRange {
            degree,
            index: pair_select,
            available: pairs.len(),
        })?;
        Ok(Self { pair, shift: 0, extension: None })
    }

    /// Relative phase of the second m-sequence, selecting a family member.
    pub fn shift(mut self, shift: usize) -> Self {
        self.shift = shift;
        self
    }

    pub fn extension(mut self, chip: ExtensionChip) -> Self {
        self.extension = Some(chip);
        self
    }

    pub fn pair(&self) -> PreferredPair {
        self.pair
    }

    pub fn generate(&self) -> Result<PnSequence> {
        let a = m_sequence(self.pair.first)?;
        let b = m_sequence(self.pair.second)?;
        let p = a.len();
        let mut seq = PnSequence::from_bits((0..p).map(|n| a[n] ^ b[(n + self.shift) % p]));
        if let Some(ext) = self.extension {
            let chip = match ext {
                ExtensionChip::CopyFirst => seq.chips[0],
                ExtensionChip::CopyLast => seq.chips[p - 1],
                ExtensionChip::Fixed(v) if v == 1.0 || v == -1.0 => v,
                ExtensionChip::Fixed(v) => {
                    return Err(Error::Parse(format!("extension chip {v} is not +1 or -1")))
                }
            };
            seq.chips.push(chip);
        }
        Ok(seq)
    }
}

/// Unnormalized Gold preamble; `extend` appends a copy of chip 0.
pub fn generate_gold_preamble(degree: u32, pair_select: usize, extend: bool) -> Result<PnSequence> {
    let mut code = GoldCode::new(degree, pair_select)?;
    if extend {
        code = code.extension(ExtensionChip::CopyFirst);
    }
    code.generate()
}
