//! The block tester and the concrete class testers built on it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicU8, Ordering};
use std::sync::Arc;

use rand::{RngCore, SeedableRng};

use crate::bits::{Assignment, CoordSet};
use crate::block::{rb_presets, rb_verify, Anchored, PresetClass, RbOutcome, RbParams, RbPreset};
use crate::correct::{self_correct, CorrectionParams};
use crate::error::{capability, usage, Error, Result};
use crate::learners::{
    learn_then_test, AnfLearner, ExactLearner, FourierLearner, FourierMembership, Membership, SparsePolyMembership,
};
use crate::oracle::{Counter, Oracle, Stage};
use crate::reduction::rp_reduced_tester;
use crate::sampling::{span_bits, span_points};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Accept,
    Reject,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub decision: Decision,
    /// Queries made to the oracle the tester was handed.
    pub queries_used: u64,
    pub reject_stage: Option<Stage>,
    /// Seed of the run, when the tester seeded its own generator.
    pub seed: Option<u64>,
    /// Queries by the stage that was active when they were made; sums to
    /// `queries_used`.
    pub stage_queries: BTreeMap<Stage, u64>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.decision == Decision::Accept
    }

    pub fn stage(&self, stage: Stage) -> u64 {
        self.stage_queries.get(&stage).copied().unwrap_or(0)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} queries={}", self.decision, self.queries_used)?;
        if let Some(s) = self.reject_stage {
            write!(f, " stage={s}")?;
        }
        for (s, q) in &self.stage_queries {
            write!(f, " {s}={q}")?;
        }
        Ok(())
    }
}

/// Oracle wrapper that attributes every query to the stage announced last.
/// Stage announcements are forwarded, so nested meters agree.
pub struct StageMeter<'a> {
    inner: &'a dyn Oracle,
    stage: AtomicU8,
    counts: [AtomicU64; Stage::ALL.len()],
    total: Counter,
}

impl<'a> StageMeter<'a> {
    pub fn new(inner: &'a dyn Oracle, stage: Stage) -> Self {
        let meter = Self {
            inner,
            stage: AtomicU8::new(stage.index() as u8),
            counts: Default::default(),
            total: Counter::default(),
        };
        inner.enter_stage(stage);
        meter
    }

    pub fn finish(&self, decision: Decision, reject_stage: Option<Stage>) -> Verdict {
        let stage_queries = Stage::ALL
            .iter()
            .map(|&s| (s, self.counts[s.index()].load(Ordering::Relaxed)))
            .filter(|&(_, q)| q > 0)
            .collect();
        Verdict { decision, queries_used: self.total.get(), reject_stage, seed: None, stage_queries }
    }

    fn reject(&self, stage: Stage) -> Result<Verdict> {
        Ok(self.finish(Decision::Reject, Some(stage)))
    }
}

impl Oracle for StageMeter<'_> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&self, x: &Assignment) -> bool {
        self.total.bump();
        self.counts[self.stage.load(Ordering::Relaxed) as usize].fetch_add(1, Ordering::Relaxed);
        self.inner.query(x)
    }

    fn queries(&self) -> u64 {
        self.total.get()
    }

    fn enter_stage(&self, stage: Stage) {
        self.stage.store(stage.index() as u8, Ordering::Relaxed);
        self.inner.enter_stage(stage);
    }
}

/// Which of the two k-junta routes [`test_k_junta`] takes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JuntaRoute {
    /// `μ = 2^{-k}` verifier, `α` tuned; the `O(k 2^k + 1/ε)` route.
    #[default]
    Result3,
    /// Sampling verifier with `α = ε`.
    Result1,
}

impl std::str::FromStr for JuntaRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "result3" => Ok(Self::Result3),
            "result1" => Ok(Self::Result1),
            other => usage(format!("unknown junta route {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TesterConfig {
    pub eta: f64,
    pub seed: u64,
    pub junta_route: JuntaRoute,
}

impl Default for TesterConfig {
    fn default() -> Self {
        Self { eta: 0.05, seed: 0, junta_route: JuntaRoute::Result3 }
    }
}

impl TesterConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// `0 < η <= 1/12`.
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0 / 12.0) {
            return usage(format!("eta = {} must lie in (0, 1/12]", self.eta));
        }
        Ok(())
    }

    fn run(&self, body: impl FnOnce(&mut dyn RngCore) -> Result<Verdict>) -> Result<Verdict> {
        self.validate()?;
        let mut rng = crate::Rng::seed_from_u64(self.seed);
        let mut v = body(&mut rng)?;
        v.seed = Some(self.seed);
        Ok(v)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return usage(format!("eps = {eps} must lie in (0, 1)"));
    }
    Ok(())
}

/// A tester for the inner class, run on an oracle at the given distance.
pub type InnerTester<'a> = dyn FnMut(&dyn Oracle, f64, &mut dyn RngCore) -> Result<Verdict> + 'a;

/// Inner tester for classes where every member of the collapsed class is
/// accepted: no queries.
pub fn always_accept(g: &dyn Oracle, _eps: f64, _rng: &mut dyn RngCore) -> Result<Verdict> {
    Ok(StageMeter::new(g, Stage::Inner).finish(Decision::Accept, None))
}

/// `F(y) = f(y_1^{X_1} ∘ ... ∘ y_{k'}^{X_{k'}} ∘ u_{X̄})`, one `f`-query per
/// query.
pub struct BlockFunction<'a> {
    inner: &'a dyn Oracle,
    blocks: Vec<CoordSet>,
    union: CoordSet,
    background: Assignment,
    counter: Counter,
}

impl<'a> BlockFunction<'a> {
    pub fn new(inner: &'a dyn Oracle, blocks: Vec<CoordSet>, background: Assignment) -> Self {
        let union = blocks.iter().fold(CoordSet::empty(background.len()), |acc, b| acc.union(b));
        Self { inner, blocks, union, background, counter: Counter::default() }
    }

    /// The point of `{0,1}^n` that `F` queries at `y`.
    pub fn blow_up(&self, y: &Assignment) -> Assignment {
        let mut x = Assignment::zeros(self.background.len());
        for j in y.ones_iter() {
            x |= self.blocks[j - 1].mask();
        }
        x.splice(&self.background, &self.union)
    }
}

impl Oracle for BlockFunction<'_> {
    fn arity(&self) -> usize {
        self.blocks.len()
    }

    fn query(&self, y: &Assignment) -> bool {
        self.counter.bump();
        self.inner.query(&self.blow_up(y))
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }

    fn enter_stage(&self, stage: Stage) {
        self.inner.enter_stage(stage)
    }
}

/// `t = ⌈log2(1/ε)⌉ + ⌈log2(1/η)⌉ + 1`.
pub fn span_dimension(eps: f64, eta: f64) -> usize {
    (crate::ceil_log2_inv(eps) + crate::ceil_log2_inv(eta) + 1) as usize
}

/// `min(0.1, (log log k + log log(1/ε)) / (log k · log(1/ε)))`, logs base 2,
/// falling back to 0.1 where the expression is undefined or not positive.
pub fn alpha_tuning(k: usize, eps: f64) -> f64 {
    let (lk, le) = ((k as f64).log2(), (1.0 / eps).log2());
    let a = (lk.log2() + le.log2()) / (lk * le);
    if a.is_finite() && a > 0.0 {
        a.min(0.1)
    } else {
        0.1
    }
}

/// The block tester. `rb` should be configured for distance `ε/4`; the
/// inner tester sees the `k'`-ary block function at `ε/4`.
///
/// Stages: block verification, the inner tester on `F`, self-corrected
/// readings `ξ^(i)` of the span basis `z^(i)`, and the span comparison of
/// `f((Σλ_i z^(i))_X ∘ u_{X̄})` with `F(Σλ_i ξ^(i))` for every `λ != 0`.
pub fn generic_block_tester(
    f: &dyn Oracle,
    rb: &RbParams,
    inner: &mut InnerTester<'_>,
    eps: f64,
    eta: f64,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    check_eps(eps)?;
    if !(rb.alpha > 0.0 && rb.alpha < 0.25) {
        return usage(format!("block tester needs 0 < alpha < 1/4, got {}", rb.alpha));
    }
    let meter = StageMeter::new(f, Stage::Verifier);
    let n = f.arity();
    let cert = match rb_verify(&meter, rb, eta, rng)? {
        RbOutcome::Reject(stage) => return meter.reject(stage),
        RbOutcome::Certificate(c) => c,
    };
    let k_prime = cert.k_prime();

    meter.enter_stage(Stage::Inner);
    let big_f = BlockFunction::new(&meter, cert.blocks.clone(), cert.background.clone());
    if !inner(&big_f, eps / 4.0, rng)?.accepted() {
        return meter.reject(Stage::Inner);
    }

    meter.enter_stage(Stage::SelfCorrect);
    let t = span_dimension(eps, eta);
    let z: Vec<Assignment> = (0..t).map(|_| Assignment::random(n, rng)).collect();
    // xi[j][i]: reading of z^(i) through block j's literal.
    let mut xi = vec![Vec::with_capacity(t); k_prime];
    if k_prime > 0 {
        let params = CorrectionParams::new(rb.alpha, eta / (t * k_prime) as f64)?;
        for (j, (x_j, a_j)) in cert.blocks.iter().zip(&cert.anchors).enumerate() {
            let g = Anchored::new(&meter, a_j.clone(), x_j.clone());
            for z_i in &z {
                xi[j].push(self_correct(&g, z_i, &params, rng));
            }
        }
    }

    meter.enter_stage(Stage::Span);
    let points = span_points(&z)?.points;
    let y_bits: Vec<Vec<bool>> = xi.iter().map(|row| span_bits(row)).collect();
    let x_set = big_f.union.clone();
    for (l, p) in points.iter().enumerate() {
        let lhs = meter.query(&p.splice(&cert.background, &x_set));
        let y = Assignment::from_bits(&y_bits.iter().map(|b| b[l]).collect::<Vec<_>>());
        if lhs != big_f.query(&y) {
            return meter.reject(Stage::Span);
        }
    }
    Ok(meter.finish(Decision::Accept, None))
}

/// Tester for `k`-juntas.
pub fn test_k_junta(f: &dyn Oracle, k: usize, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    check_eps(eps)?;
    let class = PresetClass::Junta { k, mu: None };
    let rb = match cfg.junta_route {
        JuntaRoute::Result3 => rb_presets(RbPreset::JuntaMu, class, alpha_tuning(k, eps), eps / 4.0, cfg.eta)?,
        JuntaRoute::Result1 => rb_presets(RbPreset::JuntaGeneric, class, eps.min(0.1), eps / 4.0, cfg.eta)?,
    };
    cfg.run(|rng| generic_block_tester(f, &rb, &mut always_accept, eps, cfg.eta, rng))
}

/// Largest degree [`test_fourier_degree`] runs at.
pub const MAX_FOURIER_DEGREE: usize = 5;

/// `⌈4.394 · 2^d⌉`, the junta size of Boolean functions of degree `d`.
pub fn fourier_junta_bound(d: usize) -> usize {
    (4.394 * (1u64 << d) as f64).ceil() as usize
}

/// Tester for Boolean functions of Fourier degree at most `d`.
pub fn test_fourier_degree(f: &dyn Oracle, d: usize, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    check_eps(eps)?;
    if d > MAX_FOURIER_DEGREE {
        return capability(format!("Fourier degree {d} above {MAX_FOURIER_DEGREE}"));
    }
    let k = fourier_junta_bound(d);
    let mu = 0.5f64.powi(d as i32);
    let class = PresetClass::Junta { k, mu: Some(mu) };
    let rb = rb_presets(RbPreset::JuntaMu, class, alpha_tuning(k, eps), eps / 4.0, cfg.eta)?;
    let learner = FourierLearner { d };
    let member = FourierMembership { d, fail: cfg.eta };
    let mut inner =
        |g: &dyn Oracle, e: f64, rng: &mut dyn RngCore| learn_then_test(g, &learner, &member, e, cfg.eta, rng);
    cfg.run(|rng| generic_block_tester(f, &rb, &mut inner, eps, cfg.eta, rng))
}

/// Tester for polynomials over F2 with at most `s` monomials of degree at
/// most `d`.
pub fn test_sparse_poly_deg(f: &dyn Oracle, s: usize, d: usize, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    check_eps(eps)?;
    let k = s * d;
    if k > crate::learners::fourier::MAX_LEARN_ARITY {
        return capability(format!("s·d = {k} above {}", crate::learners::fourier::MAX_LEARN_ARITY));
    }
    let mu = 0.5f64.powi(d as i32);
    let class = PresetClass::Junta { k, mu: Some(mu) };
    let rb = rb_presets(RbPreset::JuntaMu, class, alpha_tuning(k, eps), eps / 4.0, cfg.eta)?;
    let member = SparsePolyMembership { s, d: Some(d) };
    let mut inner =
        |g: &dyn Oracle, e: f64, rng: &mut dyn RngCore| learn_then_test(g, &AnfLearner, &member, e, cfg.eta, rng);
    cfg.run(|rng| generic_block_tester(f, &rb, &mut inner, eps, cfg.eta, rng))
}

/// Largest sparsity [`test_sparse_poly`] runs at.
pub const MAX_SPARSITY: usize = 4;

/// Tester for `s`-sparse polynomials over F2 of any degree: the random
/// restriction `R_p`, then the block tester with the s-term verifier and
/// the ANF learner on the block function.
pub fn test_sparse_poly(f: &dyn Oracle, s: usize, eps: f64, cfg: &TesterConfig) -> Result<Verdict> {
    check_eps(eps)?;
    if s == 0 || s > MAX_SPARSITY {
        return capability(format!("sparsity {s} outside [1, {MAX_SPARSITY}]"));
    }
    let eta = cfg.eta;
    let member = SparsePolyMembership { s, d: None };
    let mut block = |g: &dyn Oracle, e: f64, rng: &mut dyn RngCore| {
        let rb = rb_presets(RbPreset::STerm, PresetClass::STerm { s }, alpha_tuning(s, e), e / 4.0, eta)?;
        let mut inner =
            |h: &dyn Oracle, e: f64, rng: &mut dyn RngCore| learn_then_test(h, &AnfLearner, &member, e, eta, rng);
        generic_block_tester(g, &rb, &mut inner, e, eta, rng)
    };
    cfg.run(|rng| rp_reduced_tester(f, s, eps, eta, &mut block, rng))
}

/// How [`theorem_tester`] finds relevant blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TheoremRoute {
    /// Relevant blocks read off the exact learner's hypothesis.
    ExactLearner,
    /// The `μ`-accelerated verifier with the class's `μ`.
    Mu(f64),
}

/// Tester for a class inside `k`-juntas, closed under variable renaming and
/// literal negation, given an exact learner and a membership decider for
/// the class.
pub fn theorem_tester(
    f: &dyn Oracle,
    k: usize,
    learner: Arc<dyn ExactLearner>,
    membership: &dyn Membership,
    route: TheoremRoute,
    eps: f64,
    cfg: &TesterConfig,
) -> Result<Verdict> {
    check_eps(eps)?;
    let alpha = alpha_tuning(k, eps);
    let rb = match route {
        TheoremRoute::ExactLearner => {
            let class = PresetClass::Learner { k, learner: learner.clone() };
            rb_presets(RbPreset::ExactLearner, class, alpha, eps / 4.0, cfg.eta)?
        }
        TheoremRoute::Mu(mu) => {
            rb_presets(RbPreset::JuntaMu, PresetClass::Junta { k, mu: Some(mu) }, alpha, eps / 4.0, cfg.eta)?
        }
    };
    let mut inner = |g: &dyn Oracle, e: f64, rng: &mut dyn RngCore| {
        learn_then_test(g, learner.as_ref(), membership, e, cfg.eta, rng)
    };
    cfg.run(|rng| generic_block_tester(f, &rb, &mut inner, eps, cfg.eta, rng))
}
