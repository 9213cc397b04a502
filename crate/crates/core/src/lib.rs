//! Query-efficient property testers for Boolean function classes.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`], [`function`], [`oracle`] and [`exact`] hold assignments,
//!   explicit representations, query-counted oracles and brute-force ground
//!   truth (distance, influence, distance to a class).
//! * [`sampling`] has the statistical primitives (Distinguish, additive
//!   estimation, Chernoff sample sizes, pairwise-independent spans).
//! * [`rc`] and [`block`] implement the relevant-coordinate and
//!   relevant-block verifiers; [`correct`] is the majority-vote
//!   self-corrector; [`reduction`] is the random restriction `R_p`.
//! * [`learners`] provides exact learners and membership deciders, and
//!   [`testers`] wires everything into the class testers.
//!
//! All randomness flows through caller-supplied RNGs so that a fixed seed
//! replays every query.

pub mod bits;
pub mod block;
pub mod correct;
pub mod error;
pub mod exact;
pub mod function;
pub mod learners;
pub mod oracle;
pub mod rc;
pub mod reduction;
pub mod sampling;
pub mod testers;

pub use bits::{splice, Assignment, CoordSet};
pub use error::{Error, Result};
pub use exact::Probability;
pub use function::{ExplicitFunction, JuntaFn, SparsePoly, Term, TermFunction, TruthTable};
pub use oracle::{FunctionOracle, Oracle, Stage};
pub use testers::{Decision, TesterConfig, Verdict};

/// Seeded generator used throughout: ChaCha8 is counter based, so a seed
/// fixes the whole stream on every platform.
pub type Rng = rand_chacha::ChaCha8Rng;

/// `ceil(log2(x))` for `x >= 1`, computed without floating point.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `ceil(log2(1/p))` for a probability `0 < p <= 1`.
pub fn ceil_log2_inv(p: f64) -> u32 {
    let v = (1.0 / p).log2();
    // Guard against 1/2^j landing a hair above j.
    (v - 1e-9).ceil().max(0.0) as u32
}
