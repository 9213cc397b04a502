//! Exact learners, membership deciders and the learn-then-test wrapper.
//!
//! The learners here are exhaustive and only run once the arity has been
//! reduced to at most [`fourier::MAX_LEARN_ARITY`], except for
//! [`ParityLearner`] and [`JuntaLearner`], which work at any arity.

pub mod anf;
pub mod fourier;

use rand::RngCore;

use crate::bits::{Assignment, CoordSet};
use crate::error::{capability, Result};
use crate::function::{ExplicitFunction, JuntaFn, SparsePoly, TruthTable};
use crate::oracle::{Oracle, Stage};
use crate::rc::rc_verify_mu;
use crate::sampling::ceil_tol;
use crate::testers::{Decision, StageMeter, Verdict};

pub use anf::{anf_exact_learn, anf_of_table};
pub use fourier::{fourier_exact_learn, fourier_membership, FourierExpansion};

/// Outputs a hypothesis pointwise equal to the target when the target is in
/// the learner's class (with high probability for randomized learners).
pub trait ExactLearner: Send + Sync {
    fn name(&self) -> String;

    fn learn(&self, f: &dyn Oracle, rng: &mut dyn RngCore) -> Result<ExplicitFunction>;

    /// Queries the learner needs at arity `n`, when known in advance.
    fn query_budget(&self, _n: usize) -> Option<u64> {
        None
    }
}

/// Outputs a junta hypothesis `ε`-close to the target with probability at
/// least `1 - δ`.
pub trait ApproxLearner: Send + Sync {
    fn learn(&self, f: &dyn Oracle, eps: f64, delta: f64, rng: &mut dyn RngCore) -> Result<JuntaFn>;
}

/// Decides whether an explicit hypothesis lies in a class.
pub trait Membership: Send + Sync {
    fn contains(&self, g: &ExplicitFunction, rng: &mut dyn RngCore) -> bool;
}

/// Möbius interpolation on all `2^n` points.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnfLearner;

impl ExactLearner for AnfLearner {
    fn name(&self) -> String {
        "anf".into()
    }

    fn learn(&self, f: &dyn Oracle, _rng: &mut dyn RngCore) -> Result<ExplicitFunction> {
        Ok(ExplicitFunction::Poly(anf_exact_learn(f)?))
    }

    fn query_budget(&self, n: usize) -> Option<u64> {
        (n <= fourier::MAX_LEARN_ARITY).then(|| 1 << n)
    }
}

/// Exhaustive Walsh–Hadamard learning of the degree-`d` part.
#[derive(Clone, Copy, Debug)]
pub struct FourierLearner {
    pub d: usize,
}

impl ExactLearner for FourierLearner {
    fn name(&self) -> String {
        format!("fourier(d={})", self.d)
    }

    fn learn(&self, f: &dyn Oracle, _rng: &mut dyn RngCore) -> Result<ExplicitFunction> {
        Ok(ExplicitFunction::Fourier(fourier_exact_learn(f, self.d)?))
    }

    fn query_budget(&self, n: usize) -> Option<u64> {
        (n <= fourier::MAX_LEARN_ARITY).then(|| 1 << n)
    }
}

/// Exact learner for affine parities `c ⊕ ⊕_{i∈S} x_i`: queries `0^n` and
/// every unit vector.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParityLearner;

impl ExactLearner for ParityLearner {
    fn name(&self) -> String {
        "parity".into()
    }

    fn learn(&self, f: &dyn Oracle, _rng: &mut dyn RngCore) -> Result<ExplicitFunction> {
        let n = f.arity();
        let zero = Assignment::zeros(n);
        let c = f.query(&zero);
        let mut monos = Vec::new();
        if c {
            monos.push(CoordSet::empty(n));
        }
        for i in 1..=n {
            if f.query(&zero.flipped(i)) != c {
                monos.push(CoordSet::from_coords(n, [i]).unwrap());
            }
        }
        Ok(ExplicitFunction::Poly(SparsePoly::new(n, monos)?))
    }

    fn query_budget(&self, n: usize) -> Option<u64> {
        Some(n as u64 + 1)
    }
}

/// Exact learner for `k`-juntas whose relevant coordinates each have
/// influence at least `μ`: finds the relevant set with the `μ`-accelerated
/// coordinate verifier, then tabulates the function on that set.
#[derive(Clone, Copy, Debug)]
pub struct JuntaLearner {
    pub k: usize,
    pub mu: f64,
    pub eta: f64,
}

impl ExactLearner for JuntaLearner {
    fn name(&self) -> String {
        format!("junta(k={}, mu={})", self.k, self.mu)
    }

    fn learn(&self, f: &dyn Oracle, rng: &mut dyn RngCore) -> Result<ExplicitFunction> {
        let n = f.arity();
        let cert = rc_verify_mu(f, self.k, self.mu, self.eta, rng)?;
        let relevant = cert.v.to_vec();
        if relevant.len() > fourier::MAX_LEARN_ARITY {
            return capability(format!("junta learner found {} relevant coordinates", relevant.len()));
        }
        let mut x = Assignment::zeros(n);
        let table = TruthTable::from_index_fn(relevant.len(), |idx| {
            for (b, &i) in relevant.iter().enumerate() {
                x.set(i, idx >> b & 1 == 1);
            }
            f.query(&x)
        })?;
        Ok(ExplicitFunction::Junta(JuntaFn::new(n, relevant, table)?))
    }
}

/// Boolean expansions of degree at most `d` (randomized, one-sided).
#[derive(Clone, Copy, Debug)]
pub struct FourierMembership {
    pub d: usize,
    pub fail: f64,
}

impl Membership for FourierMembership {
    fn contains(&self, g: &ExplicitFunction, rng: &mut dyn RngCore) -> bool {
        match g {
            ExplicitFunction::Fourier(e) => fourier_membership(e, self.d, self.fail, rng),
            other => {
                other.to_truth_table().is_ok_and(|t| fourier::expansion_of_table(&t, usize::MAX).degree() <= self.d)
            }
        }
    }
}

/// Polynomials with at most `s` monomials, each of size at most `d`.
#[derive(Clone, Copy, Debug)]
pub struct SparsePolyMembership {
    pub s: usize,
    pub d: Option<usize>,
}

impl Membership for SparsePolyMembership {
    fn contains(&self, g: &ExplicitFunction, _rng: &mut dyn RngCore) -> bool {
        let p = match g {
            ExplicitFunction::Poly(p) => p.clone(),
            other => match other.to_truth_table() {
                Ok(t) if t.arity() <= fourier::MAX_LEARN_ARITY => anf_of_table(&t),
                _ => return false,
            },
        };
        p.sparsity() <= self.s && self.d.is_none_or(|d| p.degree() <= d)
    }
}

/// Affine parities of at most `k` variables.
#[derive(Clone, Copy, Debug)]
pub struct AffineParityMembership {
    pub k: usize,
}

impl Membership for AffineParityMembership {
    fn contains(&self, g: &ExplicitFunction, _rng: &mut dyn RngCore) -> bool {
        let p = match g {
            ExplicitFunction::Poly(p) => p.clone(),
            other => match other.to_truth_table() {
                Ok(t) if t.arity() <= fourier::MAX_LEARN_ARITY => anf_of_table(&t),
                _ => return false,
            },
        };
        p.degree() <= 1 && p.monomials().iter().filter(|m| m.len() == 1).count() <= self.k
    }
}

/// Comparison constant for [`learn_then_test`]: `⌈2 ln(1/η)/ε⌉` points.
pub const COMPARE_C: f64 = 2.0;

pub fn comparison_points(eps: f64, eta: f64) -> u64 {
    ceil_tol(COMPARE_C * (1.0 / eta).ln() / eps).max(1)
}

/// Learns `g`, rejects if `g` is outside the class, then compares `f` and
/// `g` on `⌈2 ln(1/η)/ε⌉` uniform points.
pub fn learn_then_test(
    f: &dyn Oracle,
    learner: &dyn ExactLearner,
    membership: &dyn Membership,
    eps: f64,
    eta: f64,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    let meter = StageMeter::new(f, Stage::Inner);
    let f = &meter;
    let g = learner.learn(f, rng)?;
    if g.arity() != f.arity() || !membership.contains(&g, rng) {
        return Ok(meter.finish(Decision::Reject, Some(Stage::Inner)));
    }
    for _ in 0..comparison_points(eps, eta) {
        let a = Assignment::random(f.arity(), rng);
        if f.query(&a) != g.eval(&a) {
            return Ok(meter.finish(Decision::Reject, Some(Stage::Inner)));
        }
    }
    Ok(meter.finish(Decision::Accept, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FunctionOracle;
    use rand::SeedableRng;

    fn oracle(f: ExplicitFunction) -> FunctionOracle {
        FunctionOracle::new(f)
    }

    fn poly(n: usize, monos: &[&[usize]]) -> ExplicitFunction {
        ExplicitFunction::Poly(
            SparsePoly::new(n, monos.iter().map(|m| CoordSet::from_coords(n, m.iter().copied()).unwrap())).unwrap(),
        )
    }

    #[test]
    fn parity_learner_is_exact_on_affine_parities() {
        let mut rng = crate::Rng::seed_from_u64(0);
        let f = poly(40, &[&[], &[3], &[17], &[40]]);
        let o = oracle(f.clone());
        assert_eq!(ParityLearner.learn(&o, &mut rng).unwrap(), f);
        assert_eq!(o.queries(), 41);
    }

    #[test]
    fn junta_learner_recovers_small_junta() {
        let mut rng = crate::Rng::seed_from_u64(2);
        let f = poly(60, &[&[5, 9], &[33]]);
        let o = oracle(f.clone());
        let g = JuntaLearner { k: 3, mu: 0.25, eta: 0.05 }.learn(&o, &mut rng).unwrap();
        let mut check = crate::Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x = Assignment::random(60, &mut check);
            assert_eq!(g.eval(&x), f.eval(&x));
        }
    }

    #[test]
    fn learn_then_test_accepts_members_and_rejects_non_members() {
        let mut rng = crate::Rng::seed_from_u64(4);
        let f = oracle(poly(4, &[&[1, 2], &[3]]));
        let member = SparsePolyMembership { s: 2, d: Some(2) };
        let v = learn_then_test(&f, &AnfLearner, &member, 0.1, 0.05, &mut rng).unwrap();
        assert_eq!(v.decision, Decision::Accept);
        assert_eq!(v.queries_used, f.queries());
        let narrow = SparsePolyMembership { s: 1, d: Some(2) };
        let v = learn_then_test(&f, &AnfLearner, &narrow, 0.1, 0.05, &mut rng).unwrap();
        assert_eq!((v.decision, v.reject_stage), (Decision::Reject, Some(Stage::Inner)));
    }

    /// A learner that always answers with a fixed hypothesis.
    struct Fixed(ExplicitFunction);

    impl ExactLearner for Fixed {
        fn name(&self) -> String {
            "fixed".into()
        }
        fn learn(&self, _f: &dyn Oracle, _rng: &mut dyn RngCore) -> Result<ExplicitFunction> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn learn_then_test_finds_mismatch_with_far_target() {
        // f = x1 ⊕ x2 is 1/2-far from the hypothesis x1.
        let mut rng = crate::Rng::seed_from_u64(5);
        let f = oracle(poly(6, &[&[1], &[2]]));
        let learner = Fixed(poly(6, &[&[1]]));
        let member = SparsePolyMembership { s: 2, d: None };
        let rejects = (0..200)
            .filter(|_| {
                learn_then_test(&f, &learner, &member, 0.25, 0.05, &mut rng).unwrap().decision == Decision::Reject
            })
            .count();
        assert!(rejects >= 190, "{rejects}");
    }

    #[test]
    fn affine_membership() {
        let mut rng = crate::Rng::seed_from_u64(6);
        let m = AffineParityMembership { k: 2 };
        assert!(m.contains(&poly(5, &[&[], &[1], &[4]]), &mut rng));
        assert!(!m.contains(&poly(5, &[&[1], &[2], &[3]]), &mut rng));
        assert!(!m.contains(&poly(5, &[&[1, 2]]), &mut rng));
    }
}
