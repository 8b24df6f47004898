use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::{Error, Result};

/// Accuracy settings for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFunctionsCtx {
    /// Relative truncation error target.
    pub tolerance: f64,
    pub max_terms: usize,
}

impl Default for SpecialFunctionsCtx {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_terms: 100_000 }
    }
}

/// A series result together with whether the tolerance was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub converged: bool,
    pub terms: usize,
    /// Bound on the neglected tail, relative to `value` where possible.
    pub error_bound: f64,
}

impl Estimate {
    fn exact(value: f64) -> Self {
        Self { value, converged: true, terms: 0, error_bound: 0.0 }
    }

    /// The value, or an error if the series hit `max_terms`.
    pub fn checked(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NoConvergence { terms: self.terms, last_term: self.error_bound })
        }
    }
}

/// Which incomplete exponential to use: the standard
/// `e_n(x) = sum_{m<n} x^m / m!`, or the power sum `sum_{m<n} x^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IncompleteExp {
    #[default]
    Standard,
    PowerSum,
}

pub fn incomplete_exp(n: usize, x: f64, form: IncompleteExp) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for m in 0..n {
        sum += term;
        term *= match form {
            IncompleteExp::Standard => x / (m + 1) as f64,
            IncompleteExp::PowerSum => x,
        };
    }
    sum
}

/// Harmonic number `H_n`.
pub fn harmonic(n: usize) -> f64 {
    if n <= 1_000_000 {
        // summed from the small end for accuracy
        (1..=n).rev().map(|k| 1.0 / k as f64).sum()
    } else {
        let x = n as f64;
        x.ln() + 0.577_215_664_901_532_9 + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x) + 1.0 / (120.0 * x.powi(4))
    }
}

fn ln_factorial(k: usize) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln P(Pois(c) <= j)`.
fn ln_poisson_cdf(j: usize, c: f64) -> f64 {
    if (j as f64) >= c {
        return gamma_ur(j as f64 + 1.0, c).ln();
    }
    // left tail: sum the pmf downward from j in log space, terms shrink
    // by at least j/c per step
    let lc = c.ln();
    let mut lt = -c + j as f64 * lc - ln_factorial(j);
    let mut acc = lt;
    for i in (0..j).rev() {
        lt += ((i + 1) as f64).ln() - lc;
        acc = log_add(acc, lt);
        if lt - acc < -40.0 {
            break;
        }
    }
    acc
}

/// `sum_k Pois(k; w) * P(Pois(c) <= k - shift)` for `w > 0`, `c > 0`.
///
/// All terms are positive. The summand ratio decreases in `k`, so once it
/// drops below one the tail is bounded by a geometric series.
fn poisson_cdf_mixture(w: f64, c: f64, shift: usize, ctx: &SpecialFunctionsCtx) -> Estimate {
    let lw_rate = w.ln();
    let lc_rate = c.ln();
    let k_lo = ((w - 10.0 * w.sqrt() - 10.0).floor().max(0.0) as usize).max(shift);
    let mut k = k_lo;
    let mut lw = -w + k as f64 * lw_rate - ln_factorial(k);
    let mut j = k - shift;
    let mut lcdf = ln_poisson_cdf(j, c);
    let mut lpmf = -c + j as f64 * lc_rate - ln_factorial(j);

    let mut l_sum = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    let mut terms = 0;
    loop {
        let lt = lw + lcdf;
        l_sum = log_add(l_sum, lt);
        terms += 1;
        if prev.is_finite() && lt.is_finite() {
            let lr = lt - prev;
            if lr < 0.0 {
                let r = lr.exp();
                let l_tail = lt + (r / (1.0 - r)).ln();
                if l_tail - l_sum < ctx.tolerance.ln() - 10f64.ln() {
                    return Estimate {
                        value: l_sum.exp(),
                        converged: true,
                        terms,
                        error_bound: (l_tail - l_sum).exp(),
                    };
                }
            }
        } else if lt == f64::NEG_INFINITY && prev == f64::NEG_INFINITY && k as f64 > w + 50.0 * (w.sqrt() + 1.0) {
            // everything underflowed
            return Estimate { value: l_sum.exp(), converged: true, terms, error_bound: 0.0 };
        }
        if terms >= ctx.max_terms {
            return Estimate { value: l_sum.exp(), converged: false, terms, error_bound: (lt - l_sum).exp() };
        }
        prev = lt;
        k += 1;
        lw += lw_rate - (k as f64).ln();
        j += 1;
        lpmf += lc_rate - (j as f64).ln();
        lcdf = log_add(lcdf, lpmf).min(0.0);
    }
}

impl SpecialFunctionsCtx {
    /// First-order Marcum Q function `Q_1(a, b)`.
    pub fn marcum_q(&self, a: f64, b: f64) -> Estimate {
        if b <= 0.0 {
            return Estimate::exact(1.0);
        }
        let x = 0.5 * b * b;
        if a <= 0.0 {
            return Estimate::exact((-x).exp());
        }
        // Chernoff: the smaller of Q and 1 - Q is at most exp(-(b - a)^2 / 2)
        let gap = 0.5 * (b - a) * (b - a);
        if gap > 750.0 {
            return Estimate::exact(if b > a { 0.0 } else { 1.0 });
        }
        let lambda = 0.5 * a * a;
        // the mixture needs about 20 sqrt(w) terms, w the Poisson weight
        let needed = 20.0 * x.min(lambda).sqrt() + 100.0;
        if needed > self.max_terms as f64 {
            return Estimate { value: f64::NAN, converged: false, terms: 0, error_bound: f64::INFINITY };
        }
        if x >= lambda {
            // Q = P(Pois(x) <= Pois(lambda))
            poisson_cdf_mixture(lambda, x, 0, self)
        } else {
            let mut e = poisson_cdf_mixture(x, lambda, 1, self);
            let comp = e.value;
            e.value = (1.0 - comp).clamp(0.0, 1.0);
            if e.value > 0.0 {
                e.error_bound *= comp / e.value;
            }
            e
        }
    }

    /// Confluent hypergeometric `M(a, b, x)` for `a, b > 0`; negative `x`
    /// goes through Kummer's transformation `M(a,b,x) = e^x M(b-a,b,-x)`
    /// when that leaves a positive-term series.
    pub fn hyp1f1(&self, a: f64, b: f64, x: f64) -> Result<Estimate> {
        if !(b > 0.0) {
            return Err(Error::InvalidArgument(format!("hyp1f1 needs b > 0, got {b}")));
        }
        if x < 0.0 && b - a >= 0.0 {
            let (ln_m, mut e) = self.ln_hyp1f1_positive(b - a, b, -x);
            e.value = (ln_m + x).exp();
            return Ok(e);
        }
        let (ln_m, mut e) = self.ln_hyp1f1_positive(a, b, x);
        e.value = ln_m.exp();
        Ok(e)
    }

    /// `ln M(a, b, x)` by direct summation. Terms are positive when
    /// `a >= 0`, `b > 0`, `x >= 0`; other inputs are summed as signed terms.
    fn ln_hyp1f1_positive(&self, a: f64, b: f64, x: f64) -> (f64, Estimate) {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut scale = 0.0f64;
        let mut k = 0usize;
        loop {
            let kf = k as f64;
            term *= (a + kf) * x / ((b + kf) * (kf + 1.0));
            sum += term;
            k += 1;
            if sum.abs() > 1e250 {
                scale += sum.abs().ln();
                let s = sum.abs();
                term /= s;
                sum /= s;
            }
            // past the peak the ratio falls below one and keeps falling
            let ratio = ((a + kf + 1.0) * x / ((b + kf + 1.0) * (kf + 2.0))).abs();
            let tail = if ratio < 1.0 { term.abs() * ratio / (1.0 - ratio) } else { f64::INFINITY };
            if tail <= self.tolerance * 0.1 * sum.abs() || term == 0.0 {
                let ln_m = sum.abs().ln() + scale;
                return (ln_m, Estimate { value: 0.0, converged: true, terms: k, error_bound: tail / sum.abs() });
            }
            if k >= self.max_terms {
                let ln_m = sum.abs().ln() + scale;
                return (ln_m, Estimate { value: 0.0, converged: false, terms: k, error_bound: tail / sum.abs() });
            }
        }
    }
}

/// `Q_1(a, b)` with default accuracy.
pub fn marcum_q(a: f64, b: f64) -> f64 {
    SpecialFunctionsCtx::default().marcum_q(a, b).value
}

/// Running `ln L_n(-y)` for `n = 0, 1, ...`, from the three-term recurrence
/// `(n+1) L_{n+1} = (2n+1+y) L_n - n L_{n-1}`, which is stable for
/// negative arguments because every `L_n(-y)` is positive and growing.
#[derive(Debug, Clone)]
pub(crate) struct LaguerreNeg {
    y: f64,
    n: usize,
    prev: f64,
    cur: f64,
    ln_scale: f64,
}

impl LaguerreNeg {
    pub(crate) fn new(y: f64) -> Self {
        Self { y, n: 0, prev: 0.0, cur: 1.0, ln_scale: 0.0 }
    }

    /// `ln L_n(-y)` for the current `n`.
    pub(crate) fn ln_value(&self) -> f64 {
        self.cur.ln() + self.ln_scale
    }

    pub(crate) fn advance(&mut self) {
        let n = self.n as f64;
        let next = ((2.0 * n + 1.0 + self.y) * self.cur - n * self.prev) / (n + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        if self.cur > 1e200 {
            self.prev /= self.cur;
            self.ln_scale += self.cur.ln();
            self.cur = 1.0;
        }
    }
}
