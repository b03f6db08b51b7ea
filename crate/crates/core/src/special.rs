//! Poisson probability kernels and the regularized lower incomplete gamma
//! function for integer shape parameters.
//!
//! Everything here rests on the identity
//!
//! ```text
//! P(s, x) = γ(s, x) / Γ(s) = Σ_{k ≥ s} e^{-x} x^k / k!      (s ≥ 1)
//! ```
//!
//! so the incomplete gamma function is a Poisson tail. Poisson masses are
//! evaluated with the saddle-point (Loader) form, which keeps full relative
//! precision for means and counts in the tens of thousands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const fn factorial_table() -> [u64; 21] {
    let mut table = [1u64; 21];
    let mut i = 1;
    while i < 21 {
        table[i] = table[i - 1] * i as u64;
        i += 1;
    }
    table
}

/// n! for n = 0..=20; every entry is exactly representable as an f64.
const FACTORIALS: [u64; 21] = factorial_table();

/// ln(n!) - [(n + 1/2) ln n - n + ln √(2π)] for n = 0..=20, to 18 digits.
#[allow(clippy::excessive_precision)]
const STIRLING_REMAINDER: [f64; 21] = [
    0.0,
    0.0810614667953272582,
    0.0413406959554092941,
    0.0276779256849983391,
    0.0207906721037650931,
    0.0166446911898211922,
    0.013876128823070748,
    0.0118967099458917701,
    0.0104112652619720965,
    0.00925546218271273292,
    0.00833056343336287126,
    0.00757367548795184079,
    0.00694284010720952987,
    0.00640899418800420707,
    0.00595137011275884774,
    0.00555473355196280137,
    0.00520765591960964044,
    0.00490139594843473786,
    0.00462915374933402859,
    0.00438556024923232427,
    0.00416631969199692246,
];

/// Relative size below which the remainder of a geometric-like tail is dropped.
const TAIL_EPS: f64 = 1e-17;

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        acc.extend(iter);
        acc
    }
}

/// Remainder of Stirling's series, ln(n!) - [(n + 1/2) ln n - n + ln √(2π)].
fn stirling_remainder(n: u64) -> f64 {
    if n <= 20 {
        return STIRLING_REMAINDER[n as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let inv = 1.0 / n as f64;
    let inv2 = inv * inv;
    (S0 - (S1 - (S2 - (S3 - S4 * inv2) * inv2) * inv2) * inv2) * inv
}

/// Deviance term x ln(x/m) + m - x, with a series near x = m to avoid
/// cancellation.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let v2 = v * v;
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let mut j = 1u32;
        loop {
            ej *= v2;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                return next;
            }
            s = next;
            j += 1;
        }
    }
    x * (x / m).ln() + m - x
}

/// ln(n!), exact (to rounding) from the integer factorial for n ≤ 20 and
/// from Stirling's series with a five-term remainder above.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 20 {
        return (FACTORIALS[n as usize] as f64).ln();
    }
    let nf = n as f64;
    (nf + 0.5) * nf.ln() - nf + LN_SQRT_2PI + stirling_remainder(n)
}

/// Poisson mass e^{-μ} μ^k / k!.
///
/// Evaluated as exp(-δ(k) - D(k, μ)) / √(2πk) where δ is the Stirling
/// remainder and D the deviance, so no intermediate power or factorial is
/// ever formed. Returns 0 on underflow and NaN for a negative or NaN mean.
pub fn poisson_pmf(k: u64, mu: f64) -> f64 {
    if mu.is_nan() || mu < 0.0 {
        return f64::NAN;
    }
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if k == 0 {
        return (-mu).exp();
    }
    if mu.is_infinite() {
        return 0.0;
    }
    let kf = k as f64;
    (-stirling_remainder(k) - deviance(kf, mu)).exp() / (2.0 * std::f64::consts::PI * kf).sqrt()
}

/// Which side of the Poisson distribution was summed by [`poisson_split`].
enum Side {
    /// Σ_{k ≥ s}
    Upper,
    /// Σ_{k < s}
    Lower,
}

/// Sums whichever side of the split at `s` does not contain the mode, so
/// that the returned partial sum is the smaller of P(s, x) and Q(s, x) and
/// carries full relative precision. Requires s ≥ 1 and 0 < x < ∞.
///
/// Summation starts at the term adjacent to the split (the largest one on
/// that side) and walks away from it with the ratio recurrence.
fn poisson_split(s: u64, x: f64) -> (Side, f64) {
    let mut acc = CompensatedSum::new();
    if s as f64 > x {
        let mut k = s;
        let mut term = poisson_pmf(s, x);
        while term > 0.0 {
            acc.add(term);
            k += 1;
            let ratio = x / k as f64;
            term *= ratio;
            if term <= TAIL_EPS * (1.0 - ratio) * acc.value() {
                acc.add(term);
                break;
            }
        }
        (Side::Upper, acc.value())
    } else {
        let mut k = s - 1;
        let mut term = poisson_pmf(k, x);
        while term > 0.0 {
            acc.add(term);
            if k == 0 {
                break;
            }
            let ratio = k as f64 / x;
            term *= ratio;
            k -= 1;
            if term <= TAIL_EPS * (1.0 - ratio) * acc.value() {
                acc.add(term);
                break;
            }
        }
        (Side::Lower, acc.value())
    }
}

/// Regularized lower incomplete gamma function P(s, x) = γ(s, x)/Γ(s) for
/// integer shape `s`.
///
/// `P(0, x)` is defined as 1 for every x ≥ 0. This is what the emission
/// formulas need to treat an empty trap (and fully unblocked partial waves)
/// without a separate branch.
pub fn regularized_gamma_p(s: u64, x: f64) -> f64 {
    if s == 0 {
        return 1.0;
    }
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    match poisson_split(s, x) {
        (Side::Upper, tail) => tail.min(1.0),
        (Side::Lower, head) => (1.0 - head).max(0.0),
    }
}

/// Complement Q(s, x) = 1 - P(s, x) = Σ_{k<s} e^{-x} x^k / k!, i.e. the
/// Poisson CDF at s - 1. `Q(0, x)` is 0.
pub fn regularized_gamma_q(s: u64, x: f64) -> f64 {
    if s == 0 {
        return 0.0;
    }
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    match poisson_split(s, x) {
        (Side::Upper, tail) => (1.0 - tail).max(0.0),
        (Side::Lower, head) => head.min(1.0),
    }
}

/// Upper bound on any cutoff returned by [`poisson_tail_cutoff`].
pub fn poisson_cutoff_bound(mu: f64) -> u64 {
    (mu + 20.0 * (mu + 1.0).sqrt() + 50.0).ceil() as u64
}

/// Smallest `K` with Σ_{k>K} Poisson(k; μ) < `eps`.
///
/// The masses up to [`poisson_cutoff_bound`] are tabulated and the tail is
/// accumulated from the far end inward. An `eps` of 1 or more yields 0.
pub fn poisson_tail_cutoff(mu: f64, eps: f64) -> u64 {
    if mu == 0.0 || eps >= 1.0 {
        return 0;
    }
    let bound = poisson_cutoff_bound(mu);
    let masses = poisson_table(mu, bound);
    let mut tail = CompensatedSum::new();
    let mut cutoff = bound;
    // tail holds Σ_{k>K} while scanning K downward.
    for k in (0..bound).rev() {
        tail.add(masses[k as usize + 1]);
        if tail.value() >= eps {
            break;
        }
        cutoff = k;
    }
    cutoff
}

/// Poisson masses for k = 0..=upto.
pub fn poisson_table(mu: f64, upto: u64) -> Vec<f64> {
    (0..=upto).map(|k| poisson_pmf(k, mu)).collect()
}

/// A Poisson distribution with nonnegative mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonKernel {
    mu: f64,
}

impl PoissonKernel {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::invalid("mu", format!("Poisson mean must be finite and >= 0, got {mu}")));
        }
        Ok(Self { mu })
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    pub fn pmf(&self, k: u64) -> f64 {
        poisson_pmf(k, self.mu)
    }

    /// Pr[N ≤ k].
    pub fn cdf(&self, k: u64) -> f64 {
        regularized_gamma_q(k + 1, self.mu)
    }

    /// Pr[N > k].
    pub fn survival(&self, k: u64) -> f64 {
        regularized_gamma_p(k + 1, self.mu)
    }

    pub fn tail_cutoff(&self, eps: f64) -> u64 {
        poisson_tail_cutoff(self.mu, eps)
    }

    /// Masses for k = 0..=upto.
    pub fn table(&self, upto: u64) -> Vec<f64> {
        poisson_table(self.mu, upto)
    }
}
