//! Relevant-coordinate verifiers.
//!
//! Every verifier returns an [`RcCertificate`]: a set `V` of coordinates,
//! one witness per member, and flags. A witness `w` for `j` always satisfies
//! `f(w) != f(w ⊕ e_j)` on the oracle the verifier ran against.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::bits::{Assignment, CoordSet};
use crate::error::{usage, Error, Result};
use crate::function::MAX_TABLE_ARITY;
use crate::learners::{ApproxLearner, ExactLearner};
use crate::oracle::Oracle;
use crate::sampling::{ceil_tol, estimate};

/// Constant `c` of the learner-based verifier.
pub const APPROX_C: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcCertificate {
    /// Cap on `|V|` under which the certificate was produced.
    pub k: usize,
    pub v: CoordSet,
    pub witnesses: BTreeMap<usize, Assignment>,
    /// `|V| > k`: the target is not in the class.
    pub overflow: bool,
    /// A learner-based verifier could not back its hypothesis with a
    /// witness on the target for some coordinate.
    pub flagged: bool,
}

impl RcCertificate {
    pub fn empty(n: usize, k: usize) -> Self {
        Self { k, v: CoordSet::empty(n), witnesses: BTreeMap::new(), overflow: false, flagged: false }
    }

    fn add(&mut self, j: usize, w: Assignment) {
        self.v.insert(j);
        self.witnesses.insert(j, w);
        if self.v.len() > self.k {
            self.overflow = true;
        }
    }

    /// Re-checks every witness on `f` with two queries each.
    pub fn witnesses_hold(&self, f: &dyn Oracle) -> bool {
        self.witnesses.iter().all(|(&j, w)| f.query(w) != f.query(&w.flipped(j)))
    }
}

impl fmt::Display for RcCertificate {
    /// `V=<coords>; overflow=<bool>; w<j>=<hex>...`, plus `; flagged=true`
    /// when set.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V={}; overflow={}", self.v, self.overflow)?;
        for (j, w) in &self.witnesses {
            write!(f, "; w{j}={}", w.to_hex())?;
        }
        if self.flagged {
            f.write_str("; flagged=true")?;
        }
        Ok(())
    }
}

/// Binary search between `base` and `base` with `w` overwritten from `b`,
/// given `f(base) = base_val` and that the two endpoints disagree. One query
/// per level; `W_1` is the first `⌈|W|/2⌉` coordinates in ascending order.
fn search(
    f: &dyn Oracle,
    mut base: Assignment,
    base_val: bool,
    b: &Assignment,
    mut w: Vec<usize>,
) -> (usize, Assignment) {
    while w.len() > 1 {
        let (w1, w2) = w.split_at(w.len().div_ceil(2));
        let mut p = base.clone();
        for &i in w2 {
            p.set(i, b.get(i));
        }
        if f.query(&p) != base_val {
            w = w2.to_vec();
        } else {
            base = p;
            w = w1.to_vec();
        }
    }
    (w[0], base)
}

/// Finds `j ∉ V` and a witness for it, given `f(a_V ∘ b_{V̄}) != f(a)`.
/// Checks the precondition with two queries, then makes `⌈log2 |V̄|⌉` more.
pub fn binary_search_witness(
    f: &dyn Oracle,
    a: &Assignment,
    b: &Assignment,
    v: &CoordSet,
) -> Result<(usize, Assignment)> {
    let n = f.arity();
    if a.len() != n || b.len() != n || v.universe() != n {
        return usage("binary search arguments disagree with the oracle arity");
    }
    let w = v.complement().to_vec();
    if w.is_empty() {
        return Err(Error::Contract("binary search needs a nonempty complement".into()));
    }
    let fa = f.query(a);
    if f.query(&a.splice(b, v)) == fa {
        return Err(Error::Contract("binary search endpoints have equal values".into()));
    }
    Ok(search(f, a.clone(), fa, b, w))
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return usage(format!("{name} = {x} must lie in (0, 1)"));
    }
    Ok(())
}

/// `⌈(4k + 6 ln(1/η)) / ε⌉`.
pub fn junta_trials(k: usize, eps: f64, eta: f64) -> u64 {
    ceil_tol((4.0 * k as f64 + 6.0 * (1.0 / eta).ln()) / eps)
}

/// `⌈(4k + 6 ln(1/η)) · 2/μ⌉`.
pub fn mu_trials(k: usize, mu: f64, eta: f64) -> u64 {
    ceil_tol((4.0 * k as f64 + 6.0 * (1.0 / eta).ln()) * 2.0 / mu)
}

/// `s · ⌈5 log2(s/ε)⌉`, at least `s`.
pub fn sterm_cap(s: usize, eps: f64) -> usize {
    let per = ceil_tol(5.0 * (s as f64 / eps).log2()).max(1) as usize;
    s * per
}

/// The sampling loop shared by the junta, `μ` and s-term verifiers. Stops
/// as soon as `|V|` exceeds `k`.
pub fn rc_sample_loop(f: &dyn Oracle, k: usize, trials: u64, rng: &mut dyn RngCore) -> RcCertificate {
    let n = f.arity();
    let mut cert = RcCertificate::empty(n, k);
    for _ in 0..trials {
        let a = Assignment::random(n, rng);
        let b = Assignment::random(n, rng);
        let fa = f.query(&a);
        if f.query(&a.splice(&b, &cert.v)) != fa {
            let (j, w) = search(f, a, fa, &b, cert.v.complement().to_vec());
            cert.add(j, w);
            if cert.overflow {
                break;
            }
        }
    }
    cert
}

/// Sampling verifier for `k`-juntas. `trials` defaults to
/// [`junta_trials`].
pub fn rc_verify_junta(
    f: &dyn Oracle,
    k: usize,
    eps: f64,
    eta: f64,
    trials: Option<u64>,
    rng: &mut dyn RngCore,
) -> Result<RcCertificate> {
    check_unit("eps", eps)?;
    check_unit("eta", eta)?;
    let t = trials.unwrap_or_else(|| junta_trials(k, eps, eta));
    Ok(rc_sample_loop(f, k, t, rng))
}

/// Sampling verifier for classes where every relevant coordinate `j` has
/// `Pr_{a,b}[f(a_V ∘ b_{V̄}) != f(a)] >= μ/2` whenever `j ∉ V`.
pub fn rc_verify_mu(f: &dyn Oracle, k: usize, mu: f64, eta: f64, rng: &mut dyn RngCore) -> Result<RcCertificate> {
    if !(mu > 0.0 && mu <= 1.0) {
        return usage(format!("mu = {mu} must lie in (0, 1]"));
    }
    check_unit("eta", eta)?;
    Ok(rc_sample_loop(f, k, mu_trials(k, mu, eta), rng))
}

/// Verifier for `s`-term functions: the junta verifier at `ε/3` with cap
/// `cap`, by default [`sterm_cap`]`(s, ε)`.
pub fn rc_verify_sterm(
    f: &dyn Oracle,
    s: usize,
    eps: f64,
    eta: f64,
    cap: Option<usize>,
    rng: &mut dyn RngCore,
) -> Result<RcCertificate> {
    if s == 0 {
        return usage("s-term verifier needs s >= 1");
    }
    check_unit("eps", eps)?;
    let k = cap.unwrap_or_else(|| sterm_cap(s, eps));
    rc_verify_junta(f, k, eps / 3.0, eta, None, rng)
}

/// Learns `h` exactly, reads the relevant coordinates of `h` off its
/// representation and extracts witnesses by searching `h` over the subcube of
/// its support (other coordinates fixed to a random point). Each witness is
/// then confirmed on `f` with two queries; a coordinate whose witness fails
/// is dropped and the certificate is flagged.
pub fn rc_verify_from_exact_learner(
    f: &dyn Oracle,
    learner: &dyn ExactLearner,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<RcCertificate> {
    let n = f.arity();
    let h = learner.learn(f, rng)?;
    if h.arity() != n {
        return usage("learner returned a hypothesis of the wrong arity");
    }
    let hint = h.support_hint().to_vec();
    if hint.len() > MAX_TABLE_ARITY {
        return crate::error::capability(format!(
            "hypothesis support of {} coordinates is too large to search",
            hint.len()
        ));
    }
    let z = Assignment::random(n, rng);
    let local = h.restrict_to(&hint, &z)?;
    let mut cert = RcCertificate::empty(n, k);
    for (b, &j) in hint.iter().enumerate() {
        let bit = 1u64 << b;
        let Some(idx) = (0..local.size()).find(|&idx| local.get(idx) != local.get(idx ^ bit)) else {
            continue;
        };
        let mut w = z.clone();
        for (c, &i) in hint.iter().enumerate() {
            w.set(i, idx >> c & 1 == 1);
        }
        if f.query(&w) != f.query(&w.flipped(j)) {
            cert.add(j, w);
        } else {
            cert.flagged = true;
        }
    }
    Ok(cert)
}

/// Verifier built from an approximate junta learner, with `c` =
/// [`APPROX_C`]: learn `g` at accuracy `ε/(ck)`, keep the coordinates whose
/// estimated `g`-influence exceeds `5ε/(ck)`, and for each search up to
/// `(ck/ε) ln(4k/δ)` random points for one where both `g` and `f` change
/// with coordinate `j`.
pub fn rc_verify_from_approx_learner(
    f: &dyn Oracle,
    learner: &dyn ApproxLearner,
    k: usize,
    eps: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<RcCertificate> {
    check_unit("eps", eps)?;
    check_unit("delta", delta)?;
    let n = f.arity();
    let kk = k.max(1) as f64;
    let unit = eps / (APPROX_C * kk);
    let g = learner.learn(f, unit, delta / 2.0, rng)?;
    let mut cert = RcCertificate::empty(n, k);
    let rounds = ceil_tol((4.0 * kk / delta).ln() / unit);
    for &j in g.relevant() {
        let mut sample = || {
            let x = Assignment::random(n, rng);
            let mut x0 = x.clone();
            x0.set(j, false);
            g.eval(&x0) != g.eval(&x0.flipped(j))
        };
        let est = estimate(&mut sample, unit, delta / (4.0 * kk))?;
        if est <= 5.0 * unit {
            continue;
        }
        let mut found = None;
        for _ in 0..rounds {
            let mut a = Assignment::random(n, rng);
            a.set(j, false);
            let a1 = a.flipped(j);
            if g.eval(&a) != g.eval(&a1) && f.query(&a) != f.query(&a1) {
                found = Some(a);
                break;
            }
        }
        match found {
            Some(w) => cert.add(j, w),
            None => cert.flagged = true,
        }
    }
    Ok(cert)
}

/// Wraps an exact learner as an approximate junta learner.
pub struct ExactAsApprox<L>(pub L);

impl<L: ExactLearner> ApproxLearner for ExactAsApprox<L> {
    fn learn(&self, f: &dyn Oracle, _eps: f64, _delta: f64, rng: &mut dyn RngCore) -> Result<crate::function::JuntaFn> {
        self.0.learn(f, rng)?.to_junta()
    }
}

/// A relevant-coordinate verifier with its parameters fixed.
#[derive(Clone)]
pub enum RcVerifier {
    Junta { k: usize, eps: f64 },
    Mu { k: usize, mu: f64 },
    STerm { s: usize, eps: f64, cap: usize },
    ExactLearner { k: usize, learner: Arc<dyn ExactLearner> },
}

impl fmt::Debug for RcVerifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Junta { k, eps } => write!(f, "Junta {{ k: {k}, eps: {eps} }}"),
            Self::Mu { k, mu } => write!(f, "Mu {{ k: {k}, mu: {mu} }}"),
            Self::STerm { s, eps, cap } => write!(f, "STerm {{ s: {s}, eps: {eps}, cap: {cap} }}"),
            Self::ExactLearner { k, learner } => {
                write!(f, "ExactLearner {{ k: {k}, learner: {} }}", learner.name())
            }
        }
    }
}

impl RcVerifier {
    /// The `|V|` cap of the certificates this verifier produces.
    pub fn cap(&self) -> usize {
        match self {
            Self::Junta { k, .. } | Self::Mu { k, .. } | Self::ExactLearner { k, .. } => *k,
            Self::STerm { cap, .. } => *cap,
        }
    }

    pub fn run(&self, f: &dyn Oracle, eta: f64, rng: &mut dyn RngCore) -> Result<RcCertificate> {
        match self {
            Self::Junta { k, eps } => rc_verify_junta(f, *k, *eps, eta, None, rng),
            Self::Mu { k, mu } => rc_verify_mu(f, *k, *mu, eta, rng),
            Self::STerm { s, eps, cap } => rc_verify_sterm(f, *s, *eps, eta, Some(*cap), rng),
            Self::ExactLearner { k, learner } => rc_verify_from_exact_learner(f, learner.as_ref(), *k, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ExplicitFunction, JuntaFn, TruthTable};
    use crate::learners::AnfLearner;
    use crate::oracle::FunctionOracle;
    use rand::SeedableRng;

    fn oracle(n: usize, rel: &[usize], f: impl FnMut(u64) -> bool) -> FunctionOracle {
        let t = TruthTable::from_index_fn(rel.len(), f).unwrap();
        FunctionOracle::new(ExplicitFunction::Junta(JuntaFn::new(n, rel.to_vec(), t).unwrap()))
    }

    fn rng(seed: u64) -> crate::Rng {
        crate::Rng::seed_from_u64(seed)
    }

    #[test]
    fn binary_search_dictator() {
        let f = oracle(8, &[3], |i| i == 1);
        let (j, w) =
            binary_search_witness(&f, &Assignment::zeros(8), &Assignment::ones(8), &CoordSet::empty(8)).unwrap();
        assert_eq!(j, 3);
        assert_ne!(f.query(&w), f.query(&w.flipped(3)));
    }

    #[test]
    fn binary_search_and_trace() {
        let f = oracle(2, &[1, 2], |i| i == 3);
        let (j, w) =
            binary_search_witness(&f, &Assignment::ones(2), &Assignment::zeros(2), &CoordSet::empty(2)).unwrap();
        assert_eq!((j, w), (2, Assignment::ones(2)));
        assert_eq!(f.queries(), 3);
    }

    #[test]
    fn binary_search_contract() {
        let f = oracle(2, &[1, 2], |i| i == 1 || i == 2);
        let r = binary_search_witness(&f, &Assignment::zeros(2), &Assignment::ones(2), &CoordSet::empty(2));
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn binary_search_query_count() {
        let n = 100;
        let f = oracle(n, &[77], |i| i == 1);
        let (j, _) =
            binary_search_witness(&f, &Assignment::zeros(n), &Assignment::ones(n), &CoordSet::empty(n)).unwrap();
        assert_eq!(j, 77);
        assert_eq!(f.queries(), 2 + crate::ceil_log2(n as u64) as u64);
    }

    #[test]
    fn junta_verifier_on_xor() {
        let f = oracle(10, &[1, 2], |i| i == 1 || i == 2);
        let c = rc_verify_junta(&f, 2, 0.1, 0.05, None, &mut rng(1)).unwrap();
        assert_eq!(c.v.to_vec(), vec![1, 2]);
        assert!(!c.overflow);
        assert!(c.witnesses_hold(&f));
    }

    #[test]
    fn constant_gives_empty_certificate() {
        let f = oracle(10, &[], |_| true);
        let c = rc_verify_junta(&f, 2, 0.1, 0.05, None, &mut rng(2)).unwrap();
        assert!(c.v.is_empty());
        assert_eq!(f.queries(), 2 * junta_trials(2, 0.1, 0.05));
        assert!(rc_verify_mu(&f, 2, 0.25, 0.05, &mut rng(2)).unwrap().v.is_empty());
        assert!(rc_verify_sterm(&f, 2, 0.1, 0.05, None, &mut rng(2)).unwrap().v.is_empty());
    }

    #[test]
    fn parity3_overflows_k2() {
        let f = oracle(10, &[2, 5, 9], |i| i.count_ones() % 2 == 1);
        let c = rc_verify_junta(&f, 2, 0.01, 0.05, None, &mut rng(3)).unwrap();
        assert!(c.overflow);
        assert_eq!(c.v.len(), 3);
        assert!(c.witnesses_hold(&f));
    }

    #[test]
    fn mu_verifier_finds_parity() {
        let f = oracle(10, &[1, 4], |i| i == 1 || i == 2);
        let c = rc_verify_mu(&f, 2, 1.0, 0.05, &mut rng(4)).unwrap();
        assert_eq!(c.v.to_vec(), vec![1, 4]);
    }

    #[test]
    fn exact_learner_route() {
        let f = oracle(8, &[2, 5], |i| i == 3);
        let c = rc_verify_from_exact_learner(&f, &AnfLearner, 2, &mut rng(5)).unwrap();
        assert_eq!(c.v.to_vec(), vec![2, 5]);
        assert!(!c.flagged);
        // AND(x2, x5) changes with x2 only when x5 = 1, and vice versa.
        assert!(c.witnesses[&2].get(5) && c.witnesses[&5].get(2));
        assert!(c.witnesses_hold(&f));
    }

    #[test]
    fn approx_learner_route() {
        let f = oracle(6, &[1, 2], |i| i == 1 || i == 2);
        let c = rc_verify_from_approx_learner(&f, &ExactAsApprox(AnfLearner), 2, 0.2, 0.1, &mut rng(6)).unwrap();
        assert_eq!(c.v.to_vec(), vec![1, 2]);
        assert!(c.witnesses_hold(&f));
    }

    #[test]
    fn certificate_text() {
        let mut c = RcCertificate::empty(5, 2);
        c.add(3, Assignment::from_index(5, 4));
        assert_eq!(c.to_string(), "V=3; overflow=false; w3=40");
    }
}
