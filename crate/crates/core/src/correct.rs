//! Majority-vote self-corrector for oracles close to a literal.

use rand::RngCore;

use crate::bits::Assignment;
use crate::error::{usage, Result};
use crate::oracle::Oracle;

/// Vote count for a corrector with corruption bound `α` and failure bound
/// `δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionParams {
    pub alpha: f64,
    pub delta: f64,
    /// Odd number of votes.
    pub t: u64,
}

/// `Pr[Bin(t, p) >= (t+1)/2]` for odd `t`.
fn majority_error(t: u64, p: f64) -> f64 {
    let need = t.div_ceil(2);
    let (mut term, mut tail) = ((1.0 - p).powi(t as i32), 0.0);
    // term = C(t, i) p^i (1-p)^{t-i}, advanced from i = 0.
    for i in 0..=t {
        if i >= need {
            tail += term;
        }
        if i < t {
            term *= (t - i) as f64 / (i + 1) as f64 * p / (1.0 - p);
        }
    }
    tail
}

impl CorrectionParams {
    /// Smallest odd `t` such that a majority of `t` votes, each wrong with
    /// probability at most `2α`, is wrong with probability at most `δ`.
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(0.0..0.25).contains(&alpha) {
            return usage(format!("self-correction needs 0 <= alpha < 1/4, got {alpha}"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return usage(format!("delta = {delta} must lie in (0, 1)"));
        }
        let p = 2.0 * alpha;
        let mut t = 1;
        while p > 0.0 && majority_error(t, p) > delta {
            t += 2;
        }
        Ok(Self { alpha, delta, t })
    }
}

/// `Majority_j(G(u^(j)) ⊕ G(u^(j) ⊕ a))` over `t` uniform `u^(j)`; `2t`
/// queries.
pub fn self_correct(g: &dyn Oracle, a: &Assignment, params: &CorrectionParams, rng: &mut dyn RngCore) -> bool {
    let n = g.arity();
    let ones = (0..params.t)
        .filter(|_| {
            let u = Assignment::random(n, rng);
            g.query(&u) ^ g.query(&(&u ^ a))
        })
        .count() as u64;
    2 * ones > params.t
}
