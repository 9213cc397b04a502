//! Statistical primitives: sample sizes, Distinguish, additive estimation
//! and the pairwise-independent span sampler.

use crate::bits::Assignment;
use crate::error::{usage, Result};

/// Sample-size constant for [`distinguish`].
pub const DISTINGUISH_C: f64 = 48.0;

/// One Bernoulli draw of an event per call.
pub trait EventSampler {
    fn draw(&mut self) -> bool;
}

impl<F: FnMut() -> bool> EventSampler for F {
    fn draw(&mut self) -> bool {
        self()
    }
}

fn check_prob(name: &str, p: f64, open_low: bool, open_high: bool) -> Result<()> {
    let ok = p.is_finite() && if open_low { p > 0.0 } else { p >= 0.0 } && if open_high { p < 1.0 } else { p <= 1.0 };
    if !ok {
        return usage(format!("{name} = {p} out of range"));
    }
    Ok(())
}

/// Ceiling that ignores floating-point noise just above an integer.
pub(crate) fn ceil_tol(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 * x.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

/// Smallest `m` with `exp(-λ² m μ / 3) <= fail`.
pub fn chernoff_sample_size(lambda: f64, mu: f64, fail: f64) -> Result<u64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return usage(format!("relative deviation {lambda} out of (0, 1]"));
    }
    check_prob("rate", mu, true, false)?;
    check_prob("fail", fail, true, false)?;
    Ok(ceil_tol(3.0 * (1.0 / fail).ln() / (lambda * lambda * mu)))
}

/// Number of draws [`distinguish`] makes.
pub fn distinguish_samples(lo: f64, hi: f64, fail: f64) -> Result<u64> {
    check_prob("lo", lo, false, false)?;
    check_prob("hi", hi, false, false)?;
    if lo >= hi {
        return usage(format!("distinguish needs lo < hi, got lo={lo}, hi={hi}"));
    }
    check_prob("fail", fail, true, false)?;
    Ok(ceil_tol(DISTINGUISH_C * (1.0 / fail).ln() / (hi - lo)).max(1))
}

/// Returns `true` when the event rate looks above `hi`, `false` when below
/// `lo`; wrong with probability at most `fail` outside the gap. Ties at the
/// midpoint answer `false`.
pub fn distinguish(sampler: &mut impl EventSampler, lo: f64, hi: f64, fail: f64) -> Result<bool> {
    let m = distinguish_samples(lo, hi, fail)?;
    let hits = (0..m).filter(|_| sampler.draw()).count() as f64;
    Ok(hits / m as f64 > (lo + hi) / 2.0)
}

/// Hoeffding sample size: `⌈ln(2/fail) / (2 err²)⌉`.
pub fn estimate_samples(additive_err: f64, fail: f64) -> Result<u64> {
    if !(additive_err > 0.0 && additive_err.is_finite()) {
        return usage(format!("additive error {additive_err} must be positive"));
    }
    check_prob("fail", fail, true, false)?;
    Ok(ceil_tol((2.0 / fail).ln() / (2.0 * additive_err * additive_err)).max(1))
}

/// Empirical mean within `additive_err` of the truth with probability at
/// least `1 - fail`.
pub fn estimate(sampler: &mut impl EventSampler, additive_err: f64, fail: f64) -> Result<f64> {
    let m = estimate_samples(additive_err, fail)?;
    let hits = (0..m).filter(|_| sampler.draw()).count();
    Ok(hits as f64 / m as f64)
}

/// The `2^t - 1` nonzero XOR combinations of a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanFamily {
    pub basis: Vec<Assignment>,
    /// `points[λ - 1] = ⊕_{i : bit i-1 of λ} v^(i)`.
    pub points: Vec<Assignment>,
}

impl SpanFamily {
    pub fn t(&self) -> usize {
        self.basis.len()
    }
}

/// Enumerates `Σ λ_i v^(i)` for `λ = 1, ..., 2^t - 1` in counter order.
pub fn span_points(basis: &[Assignment]) -> Result<SpanFamily> {
    let t = basis.len();
    if t == 0 {
        return usage("span of an empty basis");
    }
    if t >= 32 {
        return usage(format!("span dimension {t} too large"));
    }
    let n = basis[0].len();
    if basis.iter().any(|v| v.len() != n) {
        return usage("span basis vectors of different arity");
    }
    let count = (1usize << t) - 1;
    let mut points: Vec<Assignment> = Vec::with_capacity(count);
    for lambda in 1..=count {
        let low = lambda.trailing_zeros() as usize;
        let rest = lambda & (lambda - 1);
        let p = if rest == 0 { basis[low].clone() } else { &points[rest - 1] ^ &basis[low] };
        points.push(p);
    }
    Ok(SpanFamily { basis: basis.to_vec(), points })
}

/// Combines per-coordinate bits `bits[i]` under the same λ order: the value
/// of `⊕_{i∈λ} bits[i]` for `λ = 1..2^t-1`.
pub(crate) fn span_bits(bits: &[bool]) -> Vec<bool> {
    let count = (1usize << bits.len()) - 1;
    let mut out: Vec<bool> = Vec::with_capacity(count);
    for lambda in 1..=count {
        let low = lambda.trailing_zeros() as usize;
        let rest = lambda & (lambda - 1);
        out.push(if rest == 0 { bits[low] } else { out[rest - 1] ^ bits[low] });
    }
    out
}
