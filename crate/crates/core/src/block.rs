//! Relevant-blocks verifier: random partition into blocks, an RC-verifier on
//! the block-collapsed function, the Distinguish gate and the per-block
//! literal test.

use std::fmt;
use std::sync::Arc;

use rand::{Rng as _, RngCore};

use crate::bits::{Assignment, CoordSet};
use crate::error::{usage, Error, Result};
use crate::learners::{ExactLearner, JuntaLearner};
use crate::oracle::{Counter, Oracle, Stage};
use crate::rc::{sterm_cap, RcVerifier};
use crate::sampling::{ceil_tol, distinguish};

/// A partition of `[n]` into `m` (possibly empty) blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    /// `block_of[i - 1]` is the block (1-indexed) holding coordinate `i`.
    block_of: Vec<usize>,
    blocks: Vec<CoordSet>,
    /// Block masks laid out word after word, for `blow_up`.
    flat: Vec<u64>,
}

impl BlockPartition {
    /// Sends every coordinate to a uniform block, independently.
    pub fn random(n: usize, m: usize, rng: &mut dyn RngCore) -> Result<Self> {
        if m == 0 {
            return usage("a partition needs at least one block");
        }
        let block_of = (0..n).map(|_| rng.gen_range(1..=m)).collect();
        Self::from_assignment(n, m, block_of)
    }

    pub fn from_assignment(n: usize, m: usize, block_of: Vec<usize>) -> Result<Self> {
        if block_of.len() != n || block_of.iter().any(|&b| b == 0 || b > m) {
            return usage("block map must send each coordinate to a block in [1, m]");
        }
        let mut blocks = vec![CoordSet::empty(n); m];
        for (i, &b) in block_of.iter().enumerate() {
            blocks[b - 1].insert(i + 1);
        }
        let flat = blocks.iter().flat_map(|b| b.mask().words().to_vec()).collect();
        Ok(Self { block_of, blocks, flat })
    }

    /// Drops empty blocks and renumbers the rest in order. Coordinates of
    /// the collapsed function that own no coordinate of `[n]` are dummies, so
    /// removing them changes nothing but the collapsed arity.
    pub fn without_empty_blocks(&self) -> Self {
        let mut renumber = vec![0; self.m() + 1];
        let mut next = 0;
        for (b, block) in self.blocks.iter().enumerate() {
            if !block.is_empty() {
                next += 1;
                renumber[b + 1] = next;
            }
        }
        let block_of = self.block_of.iter().map(|&b| renumber[b]).collect();
        Self::from_assignment(self.n(), next, block_of).unwrap()
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// Block `b`, 1-indexed.
    pub fn block(&self, b: usize) -> &CoordSet {
        &self.blocks[b - 1]
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i - 1]
    }

    /// `y_1^{Y_1} ∘ ... ∘ y_m^{Y_m}`: coordinate `i` takes `y` at its block.
    pub fn blow_up(&self, y: &Assignment) -> Assignment {
        debug_assert_eq!(y.len(), self.m());
        let mut x = Assignment::zeros(self.n());
        let words = x.words_mut();
        let wc = words.len();
        for b in y.ones_iter() {
            let mask = &self.flat[(b - 1) * wc..b * wc];
            for (w, m) in words.iter_mut().zip(mask) {
                *w |= m;
            }
        }
        x
    }
}

/// `f'(y) = f(y_1^{Y_1} ∘ ... ∘ y_m^{Y_m})`, one `f`-query per query.
pub struct Collapsed<'a, O: ?Sized> {
    inner: &'a O,
    partition: &'a BlockPartition,
    counter: Counter,
}

pub fn collapse_oracle<'a, O: Oracle + ?Sized>(f: &'a O, partition: &'a BlockPartition) -> Result<Collapsed<'a, O>> {
    if f.arity() != partition.n() {
        return usage("partition and oracle disagree on n");
    }
    Ok(Collapsed { inner: f, partition, counter: Counter::default() })
}

impl<O: Oracle + ?Sized> Oracle for Collapsed<'_, O> {
    fn arity(&self) -> usize {
        self.partition.m()
    }

    fn query(&self, y: &Assignment) -> bool {
        self.counter.bump();
        self.inner.query(&self.partition.blow_up(y))
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

/// `G(x) = f(a_{[n]∖X} ∘ x_X)`: `x` is read only on `X`.
pub struct Anchored<'a, O: ?Sized> {
    inner: &'a O,
    anchor: Assignment,
    free: CoordSet,
    counter: Counter,
}

impl<'a, O: Oracle + ?Sized> Anchored<'a, O> {
    pub fn new(inner: &'a O, anchor: Assignment, free: CoordSet) -> Self {
        Self { inner, anchor, free, counter: Counter::default() }
    }
}

impl<O: Oracle + ?Sized> Oracle for Anchored<'_, O> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&self, x: &Assignment) -> bool {
        self.counter.bump();
        self.inner.query(&x.splice(&self.anchor, &self.free))
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

/// Rounds of the literal test: `⌈8 ln(3/fail)/α⌉`.
pub fn literal_rounds(alpha: f64, fail: f64) -> u64 {
    ceil_tol(8.0 * (3.0 / fail).ln() / alpha).max(1)
}

/// Accepts every literal `x_i` / `x̄_i` with certainty; rejects functions
/// `α`-far from all literals with probability at least `1 - fail`.
///
/// With `σ = G(0^n)` and `H = G ⊕ σ`, each round checks linearity
/// `H(x⊕y) = H(x)⊕H(y)`, multiplicativity `H(x∧y) = H(x)∧H(y)` and
/// `H(x) ⊕ H(x̄) = 1` on fresh uniform points (8 queries per round).
pub fn test_literal(g: &dyn Oracle, alpha: f64, fail: f64, rng: &mut dyn RngCore) -> Result<bool> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return usage(format!("literal test needs 0 < alpha < 1/2, got {alpha}"));
    }
    if !(fail > 0.0 && fail < 1.0) {
        return usage(format!("fail = {fail} must lie in (0, 1)"));
    }
    let n = g.arity();
    let sigma = g.query(&Assignment::zeros(n));
    let h = |x: &Assignment| g.query(x) ^ sigma;
    for _ in 0..literal_rounds(alpha, fail) {
        let (x, y) = (Assignment::random(n, rng), Assignment::random(n, rng));
        if h(&(&x ^ &y)) != h(&x) ^ h(&y) {
            return Ok(false);
        }
        let (x, y) = (Assignment::random(n, rng), Assignment::random(n, rng));
        if h(&(&x & &y)) != (h(&x) && h(&y)) {
            return Ok(false);
        }
        let x = Assignment::random(n, rng);
        if h(&x) == h(&!&x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Output of a successful block verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCertificate {
    pub blocks: Vec<CoordSet>,
    pub anchors: Vec<Assignment>,
    pub background: Assignment,
}

impl BlockCertificate {
    pub fn k_prime(&self) -> usize {
        self.blocks.len()
    }

    /// `X = ∪ X_j`.
    pub fn union(&self) -> CoordSet {
        self.blocks.iter().fold(CoordSet::empty(self.background.len()), |acc, b| acc.union(b))
    }
}

impl fmt::Display for BlockCertificate {
    /// `k'=<int>; X<j>=<coords>; a<j>=<hex>; u=<hex>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k'={}", self.k_prime())?;
        for (j, x) in self.blocks.iter().enumerate() {
            write!(f, "; X{}={x}", j + 1)?;
        }
        for (j, a) in self.anchors.iter().enumerate() {
            write!(f, "; a{}={}", j + 1, a.to_hex())?;
        }
        write!(f, "; u={}", self.background.to_hex())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RbOutcome {
    Reject(Stage),
    Certificate(BlockCertificate),
}

/// Parameters of one block verification.
#[derive(Clone, Debug)]
pub struct RbParams {
    /// Junta bound of the class; sets the block count `⌈K²/η⌉`.
    pub big_k: usize,
    pub k: usize,
    pub alpha: f64,
    pub eps: f64,
    pub rc: RcVerifier,
}

/// `max(1, ⌈K²/η⌉)`.
pub fn block_count(big_k: usize, eta: f64) -> usize {
    ceil_tol((big_k * big_k) as f64 / eta).max(1) as usize
}

/// Runs the block verifier. Stages are announced on `f` as they start.
pub fn rb_verify(f: &dyn Oracle, params: &RbParams, eta: f64, rng: &mut dyn RngCore) -> Result<RbOutcome> {
    if params.big_k < params.k {
        return usage(format!("block verifier needs K >= k, got K={}, k={}", params.big_k, params.k));
    }
    if !(params.eps > 0.0 && params.eps <= 1.0) {
        return usage(format!("eps = {} out of (0, 1]", params.eps));
    }
    let n = f.arity();
    let m = block_count(params.big_k, eta);
    let partition = BlockPartition::random(n, m, rng)?.without_empty_blocks();
    let m = partition.m();

    f.enter_stage(Stage::Verifier);
    let collapsed = collapse_oracle(f, &partition)?;
    let cert = params.rc.run(&collapsed, eta, rng)?;
    if cert.overflow || cert.flagged {
        return Ok(RbOutcome::Reject(Stage::Verifier));
    }

    let u = partition.blow_up(&Assignment::random(m, rng));
    let blocks: Vec<CoordSet> = cert.v.iter().map(|b| partition.block(b).clone()).collect();
    let anchors: Vec<Assignment> = cert.witnesses.values().map(|w| partition.blow_up(w)).collect();
    let out = BlockCertificate { blocks, anchors, background: u };

    f.enter_stage(Stage::Distinguish);
    let x_set = out.union();
    let mut far = || {
        let x = Assignment::random(n, rng);
        f.query(&x.splice(&out.background, &x_set)) != f.query(&x)
    };
    if distinguish(&mut far, params.eps / 4.0, params.eps, eta)? {
        return Ok(RbOutcome::Reject(Stage::Distinguish));
    }

    f.enter_stage(Stage::Literal);
    let fail = eta / out.k_prime().max(1) as f64;
    for (x_j, a_j) in out.blocks.iter().zip(&out.anchors) {
        let g = Anchored::new(f, a_j.clone(), x_j.clone());
        if !test_literal(&g, params.alpha, fail, rng)? {
            return Ok(RbOutcome::Reject(Stage::Literal));
        }
    }
    Ok(RbOutcome::Certificate(out))
}

/// Named parameter bundles for [`rb_verify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RbPreset {
    /// RC from an exact learner, `K = k`.
    ExactLearner,
    /// Sampling RC-verifier at accuracy `ηε/4`, `K = k`.
    JuntaGeneric,
    /// `μ`-accelerated RC-verifier, `K = k`.
    JuntaMu,
    /// s-term RC-verifier, `K = k = s⌈5 log2(s/ε)⌉`.
    STerm,
}

impl std::str::FromStr for RbPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-learner" => Ok(Self::ExactLearner),
            "junta-generic" => Ok(Self::JuntaGeneric),
            "junta-mu" => Ok(Self::JuntaMu),
            "sterm" => Ok(Self::STerm),
            other => usage(format!("unknown block-verifier preset {other:?}")),
        }
    }
}

/// Class parameter a preset is instantiated with.
#[derive(Clone)]
pub enum PresetClass {
    /// Juntas over `k` coordinates; `mu` defaults to `2^{-k}`.
    Junta { k: usize, mu: Option<f64> },
    /// `s`-term functions.
    STerm { s: usize },
    /// A class with an exact learner, contained in `k`-juntas.
    Learner { k: usize, learner: Arc<dyn ExactLearner> },
}

/// Builds the parameter bundle of a preset.
pub fn rb_presets(preset: RbPreset, class: PresetClass, alpha: f64, eps: f64, eta: f64) -> Result<RbParams> {
    let (k, rc) = match (preset, class) {
        (RbPreset::JuntaGeneric, PresetClass::Junta { k, .. }) => (k, RcVerifier::Junta { k, eps: eta * eps / 4.0 }),
        (RbPreset::JuntaMu, PresetClass::Junta { k, mu }) => {
            let mu = mu.unwrap_or_else(|| 0.5f64.powi(k as i32));
            (k, RcVerifier::Mu { k, mu })
        }
        (RbPreset::STerm, PresetClass::STerm { s }) => {
            let cap = sterm_cap(s, eps);
            (cap, RcVerifier::STerm { s, eps: eta * eps / 4.0, cap })
        }
        (RbPreset::ExactLearner, PresetClass::Learner { k, learner }) => (k, RcVerifier::ExactLearner { k, learner }),
        (RbPreset::ExactLearner, PresetClass::Junta { k, mu }) => {
            let mu = mu.unwrap_or_else(|| 0.5f64.powi(k as i32));
            let learner: Arc<dyn ExactLearner> = Arc::new(JuntaLearner { k, mu, eta });
            (k, RcVerifier::ExactLearner { k, learner })
        }
        (p, _) => return usage(format!("preset {p:?} does not fit the given class")),
    };
    Ok(RbParams { big_k: k, k, alpha, eps, rc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ExplicitFunction, JuntaFn, TruthTable};
    use crate::oracle::FunctionOracle;
    use rand::SeedableRng;

    fn junta(n: usize, rel: &[usize], f: impl FnMut(u64) -> bool) -> FunctionOracle {
        let t = TruthTable::from_index_fn(rel.len(), f).unwrap();
        FunctionOracle::new(ExplicitFunction::Junta(JuntaFn::new(n, rel.to_vec(), t).unwrap()))
    }

    fn rng(seed: u64) -> crate::Rng {
        crate::Rng::seed_from_u64(seed)
    }

    #[test]
    fn collapse_examples() {
        let p = BlockPartition::from_assignment(4, 3, vec![1, 1, 2, 3]).unwrap();
        let f = junta(4, &[3], |i| i == 1);
        let c = collapse_oracle(&f, &p).unwrap();
        for y in 0..8 {
            let ya = Assignment::from_index(3, y);
            assert_eq!(c.query(&ya), ya.get(2));
        }
        let xor = junta(4, &[1, 2], |i| i == 1 || i == 2);
        let c = collapse_oracle(&xor, &p).unwrap();
        assert!((0..8).all(|y| !c.query(&Assignment::from_index(3, y))));
        assert_eq!(xor.queries(), 8);
    }

    #[test]
    fn dropping_empty_blocks_keeps_blow_up() {
        let p = BlockPartition::from_assignment(5, 6, vec![2, 5, 2, 6, 5]).unwrap();
        let q = p.without_empty_blocks();
        assert_eq!(q.m(), 3);
        assert_eq!(q.block(1).to_vec(), vec![1, 3]);
        assert_eq!(q.block(2).to_vec(), vec![2, 5]);
        assert_eq!(q.block(3).to_vec(), vec![4]);
        let y = Assignment::from_bits(&[true, false, true]);
        assert_eq!(q.blow_up(&y), Assignment::from_bits(&[true, false, true, true, false]));
    }

    #[test]
    fn literal_test_accepts_literals() {
        let mut r = rng(1);
        let x3 = junta(8, &[3], |i| i == 1);
        let nx7 = junta(8, &[7], |i| i == 0);
        for _ in 0..50 {
            assert!(test_literal(&x3, 0.1, 0.05, &mut r).unwrap());
            assert!(test_literal(&nx7, 0.1, 0.05, &mut r).unwrap());
        }
    }

    #[test]
    fn literal_test_rejects_parity_and_constants() {
        let mut r = rng(2);
        let xor = junta(2, &[1, 2], |i| i == 1 || i == 2);
        let one = junta(4, &[], |_| true);
        for _ in 0..100 {
            assert!(!test_literal(&xor, 0.1, 0.05, &mut r).unwrap());
            assert!(!test_literal(&one, 0.1, 0.05, &mut r).unwrap());
        }
    }

    #[test]
    fn rb_verify_on_dictator() {
        let f = junta(16, &[5], |i| i == 1);
        let params = rb_presets(RbPreset::JuntaMu, PresetClass::Junta { k: 1, mu: None }, 0.1, 0.1, 0.05).unwrap();
        match rb_verify(&f, &params, 0.05, &mut rng(3)).unwrap() {
            RbOutcome::Certificate(c) => {
                assert_eq!(c.k_prime(), 1);
                assert!(c.blocks[0].contains(5));
                // The anchored block function is x5 or its negation.
                let g = Anchored::new(&f, c.anchors[0].clone(), c.blocks[0].clone());
                let mut check = rng(4);
                let flip = g.query(&Assignment::zeros(16));
                for _ in 0..200 {
                    let x = Assignment::random(16, &mut check);
                    assert_eq!(g.query(&x), x.get(5) ^ flip);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rb_verify_constant_has_no_blocks() {
        let f = junta(16, &[], |_| false);
        let params = rb_presets(RbPreset::JuntaGeneric, PresetClass::Junta { k: 2, mu: None }, 0.1, 0.1, 0.05).unwrap();
        match rb_verify(&f, &params, 0.05, &mut rng(5)).unwrap() {
            RbOutcome::Certificate(c) => {
                assert_eq!(c.k_prime(), 0);
                assert!(c.to_string().starts_with("k'=0; u="));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn presets() {
        let p = rb_presets(RbPreset::JuntaMu, PresetClass::Junta { k: 3, mu: None }, 0.1, 0.1, 0.05).unwrap();
        assert!(matches!(p.rc, RcVerifier::Mu { k: 3, mu } if mu == 0.125));
        let p = rb_presets(RbPreset::JuntaGeneric, PresetClass::Junta { k: 3, mu: None }, 0.1, 0.1, 0.05).unwrap();
        assert!(matches!(p.rc, RcVerifier::Junta { k: 3, eps } if (eps - 0.1 * 0.05 / 4.0).abs() < 1e-15));
        let p = rb_presets(RbPreset::STerm, PresetClass::STerm { s: 2 }, 0.1, 0.1, 0.05).unwrap();
        // 2 · ⌈5 log2(20)⌉ = 2 · 22.
        assert_eq!(p.big_k, 44);
        assert!(matches!(p.rc, RcVerifier::STerm { s: 2, cap: 44, .. }));
        assert!(rb_presets(RbPreset::STerm, PresetClass::Junta { k: 1, mu: None }, 0.1, 0.1, 0.05).is_err());
        assert!("nope".parse::<RbPreset>().is_err());
        assert_eq!(block_count(3, 0.05), 180);
    }
}
