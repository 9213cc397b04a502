//! The random restriction `R_p` and the reduced-tester wrapper.

use std::fmt;

use rand::{Rng as _, RngCore, SeedableRng};

use crate::bits::{Assignment, CoordSet};
use crate::error::{usage, Error, Result};
use crate::function::Term;
use crate::oracle::{Counter, Oracle, Stage};
use crate::sampling::distinguish;
use crate::testers::{Decision, InnerTester, StageMeter, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Keep,
    Zero,
    One,
}

impl Action {
    fn code(self) -> char {
        match self {
            Action::Keep => 'K',
            Action::Zero => 'Z',
            Action::One => 'O',
        }
    }
}

/// A frozen draw of `R_p`: each coordinate is kept with probability `1-p`
/// and otherwise fixed to a uniform bit.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionMap {
    p: f64,
    seed: u64,
    actions: Vec<Action>,
    keep: CoordSet,
    fixed: Assignment,
}

/// Draws the table for `R_p` from `seed`.
pub fn make_rp(n: usize, p: f64, seed: u64) -> Result<ReductionMap> {
    if !(0.0..=1.0).contains(&p) {
        return usage(format!("p = {p} must lie in [0, 1]"));
    }
    let mut rng = crate::Rng::seed_from_u64(seed);
    let actions = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < p / 2.0 {
                Action::Zero
            } else if u < p {
                Action::One
            } else {
                Action::Keep
            }
        })
        .collect();
    Ok(ReductionMap::from_actions(p, seed, actions))
}

impl ReductionMap {
    fn from_actions(p: f64, seed: u64, actions: Vec<Action>) -> Self {
        let n = actions.len();
        let mut keep = CoordSet::empty(n);
        let mut fixed = Assignment::zeros(n);
        for (i, a) in actions.iter().enumerate() {
            match a {
                Action::Keep => keep.insert(i + 1),
                Action::One => fixed.set(i + 1, true),
                Action::Zero => {}
            }
        }
        Self { p, seed, actions, keep, fixed }
    }

    pub fn n(&self) -> usize {
        self.actions.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn action(&self, i: usize) -> Action {
        self.actions[i - 1]
    }

    pub fn kept(&self) -> &CoordSet {
        &self.keep
    }

    pub fn kept_count(&self) -> usize {
        self.keep.len()
    }

    /// The point `R_p` maps `x` to.
    pub fn apply(&self, x: &Assignment) -> Assignment {
        x.splice(&self.fixed, &self.keep)
    }

    /// Whether some literal of the term is fixed to its falsifying value.
    pub fn kills(&self, term: &Term) -> bool {
        term.positive().iter().any(|i| self.action(i) == Action::Zero)
            || term.negative().iter().any(|i| self.action(i) == Action::One)
    }

    /// Parses the run-length form written by `Display`.
    pub fn parse(p: f64, seed: u64, text: &str) -> Result<Self> {
        let mut actions = Vec::new();
        let mut count = String::new();
        for c in text.chars() {
            if c.is_ascii_digit() {
                count.push(c);
                continue;
            }
            let a = match c {
                'K' => Action::Keep,
                'Z' => Action::Zero,
                'O' => Action::One,
                other => return Err(Error::Parse(format!("bad action code {other:?}"))),
            };
            let k: usize = count.parse().map_err(|_| Error::Parse("action run without a count".into()))?;
            actions.extend(std::iter::repeat_n(a, k));
            count.clear();
        }
        if !count.is_empty() {
            return Err(Error::Parse("trailing run count".into()));
        }
        Ok(Self::from_actions(p, seed, actions))
    }
}

impl fmt::Display for ReductionMap {
    /// Runs of `<count><K|Z|O>`, e.g. `5K1Z2K`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.actions.len() {
            let a = self.actions[i];
            let run = self.actions[i..].iter().take_while(|&&b| b == a).count();
            write!(f, "{run}{}", a.code())?;
            i += run;
        }
        Ok(())
    }
}

/// A reduction from `n`-ary functions to functions with few relevant
/// variables, each reduced query costing a fixed number of queries.
pub trait VariableReduction: Send + Sync {
    fn reduce<'a>(&'a self, f: &'a dyn Oracle) -> Box<dyn Oracle + 'a>;

    fn queries_per_query(&self) -> u64;
}

/// `f̂ = f ∘ R_p`, one `f`-query per query.
pub struct Reduced<'a> {
    map: &'a ReductionMap,
    inner: &'a dyn Oracle,
    counter: Counter,
}

pub fn apply_rp<'a>(map: &'a ReductionMap, f: &'a dyn Oracle) -> Result<Reduced<'a>> {
    if map.n() != f.arity() {
        return usage("reduction map and oracle disagree on n");
    }
    Ok(Reduced { map, inner: f, counter: Counter::default() })
}

impl Oracle for Reduced<'_> {
    fn arity(&self) -> usize {
        self.map.n()
    }

    fn query(&self, x: &Assignment) -> bool {
        self.counter.bump();
        self.inner.query(&self.map.apply(x))
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }

    fn enter_stage(&self, stage: Stage) {
        self.inner.enter_stage(stage)
    }
}

impl VariableReduction for ReductionMap {
    fn reduce<'a>(&'a self, f: &'a dyn Oracle) -> Box<dyn Oracle + 'a> {
        Box::new(apply_rp(self, f).expect("arity checked by caller"))
    }

    fn queries_per_query(&self) -> u64 {
        1
    }
}

/// `min(1, η / (s log2(s/ε)))`.
pub fn rp_probability(s: usize, eps: f64, eta: f64) -> f64 {
    let l = (s as f64 / eps).log2();
    if l <= 0.0 {
        1.0
    } else {
        (eta / (s as f64 * l)).min(1.0)
    }
}

/// Rejects if `Pr[f̂ != f]` looks above `ε/2` (below `ε/4` passes), otherwise
/// returns the inner tester's verdict on `f̂` at `ε/2`.
pub fn reduced_tester(
    f: &dyn Oracle,
    reduction: &dyn VariableReduction,
    eps: f64,
    eta: f64,
    inner: &mut InnerTester<'_>,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    let meter = StageMeter::new(f, Stage::Distinguish);
    let n = f.arity();
    let reduced = reduction.reduce(&meter);
    let mut differs = || {
        let x = Assignment::random(n, rng);
        reduced.query(&x) != meter.query(&x)
    };
    if distinguish(&mut differs, eps / 4.0, eps / 2.0, eta)? {
        return Ok(meter.finish(Decision::Reject, Some(Stage::Distinguish)));
    }
    let verdict = inner(reduced.as_ref(), eps / 2.0, rng)?;
    Ok(meter.finish(verdict.decision, verdict.reject_stage))
}

/// [`reduced_tester`] with `R_p` at `p = rp_probability(s, ε/4, η)`, the
/// map seeded from `rng`.
pub fn rp_reduced_tester(
    f: &dyn Oracle,
    s: usize,
    eps: f64,
    eta: f64,
    inner: &mut InnerTester<'_>,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    let map = make_rp(f.arity(), rp_probability(s, eps / 4.0, eta), rng.next_u64())?;
    reduced_tester(f, &map, eps, eta, inner, rng)
}
