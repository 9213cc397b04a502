//! Query-counted black-box access to Boolean functions.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::bits::Assignment;
use crate::error::{usage, Result};
use crate::function::ExplicitFunction;

/// Phase of a tester run, used to tag queries in transcripts and to break
/// query counts down per stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Verifier,
    Distinguish,
    Literal,
    Inner,
    SelfCorrect,
    Span,
}

impl Stage {
    pub const ALL: [Stage; 6] =
        [Stage::Verifier, Stage::Distinguish, Stage::Literal, Stage::Inner, Stage::SelfCorrect, Stage::Span];

    pub(crate) fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Verifier => "verifier",
            Stage::Distinguish => "distinguish",
            Stage::Literal => "literal",
            Stage::Inner => "inner-tester",
            Stage::SelfCorrect => "self-correct",
            Stage::Span => "span-check",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A black-box Boolean function on `{0,1}^n`.
///
/// `queries` counts calls to `query` on this object and never decreases.
/// Wrappers count their own calls and forward to the wrapped oracle, which
/// counts again.
pub trait Oracle: Send + Sync {
    fn arity(&self) -> usize;

    fn query(&self, x: &Assignment) -> bool;

    fn queries(&self) -> u64;

    /// Marks the start of a tester stage. Only recording oracles care.
    fn enter_stage(&self, _stage: Stage) {}
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn query(&self, x: &Assignment) -> bool {
        (**self).query(x)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
    fn enter_stage(&self, stage: Stage) {
        (**self).enter_stage(stage)
    }
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn query(&self, x: &Assignment) -> bool {
        (**self).query(x)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
    fn enter_stage(&self, stage: Stage) {
        (**self).enter_stage(stage)
    }
}

#[derive(Debug, Default)]
pub(crate) struct Counter(AtomicU64);

impl Counter {
    #[inline]
    pub(crate) fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Oracle access to an explicit function.
#[derive(Debug)]
pub struct FunctionOracle {
    f: ExplicitFunction,
    counter: Counter,
}

impl FunctionOracle {
    pub fn new(f: ExplicitFunction) -> Self {
        Self { f, counter: Counter::default() }
    }

    pub fn function(&self) -> &ExplicitFunction {
        &self.f
    }
}

impl Clone for FunctionOracle {
    /// The clone starts with a fresh counter.
    fn clone(&self) -> Self {
        Self::new(self.f.clone())
    }
}

impl Oracle for FunctionOracle {
    fn arity(&self) -> usize {
        self.f.arity()
    }

    fn query(&self, x: &Assignment) -> bool {
        debug_assert_eq!(x.len(), self.f.arity());
        self.counter.bump();
        self.f.eval(x)
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

/// Oracle backed by a closure.
pub struct FnOracle<F> {
    n: usize,
    f: F,
    counter: Counter,
}

impl<F: Fn(&Assignment) -> bool + Send + Sync> FnOracle<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f, counter: Counter::default() }
    }
}

impl<F: Fn(&Assignment) -> bool + Send + Sync> Oracle for FnOracle<F> {
    fn arity(&self) -> usize {
        self.n
    }

    fn query(&self, x: &Assignment) -> bool {
        self.counter.bump();
        (self.f)(x)
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

/// `f|x_i←ξ`: every query overwrites coordinate `i` with `ξ` and costs one
/// query to the wrapped oracle.
pub struct Restricted<O> {
    inner: O,
    i: usize,
    value: bool,
    counter: Counter,
}

pub fn restrict<O: Oracle>(f: O, i: usize, value: bool) -> Result<Restricted<O>> {
    if i == 0 || i > f.arity() {
        return usage(format!("restriction coordinate {i} outside [1, {}]", f.arity()));
    }
    Ok(Restricted { inner: f, i, value, counter: Counter::default() })
}

impl<O: Oracle> Oracle for Restricted<O> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&self, x: &Assignment) -> bool {
        self.counter.bump();
        let mut y = x.clone();
        y.set(self.i, self.value);
        self.inner.query(&y)
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }

    fn enter_stage(&self, stage: Stage) {
        self.inner.enter_stage(stage)
    }
}

/// One recorded query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub stage: Option<Stage>,
    pub point: Assignment,
    pub answer: bool,
}

/// Wraps an oracle and records every query with the current stage tag.
pub struct TranscriptOracle<O> {
    inner: O,
    stage: Mutex<Option<Stage>>,
    log: Mutex<Vec<QueryRecord>>,
    counter: Counter,
}

impl<O: Oracle> TranscriptOracle<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, stage: Mutex::new(None), log: Mutex::new(Vec::new()), counter: Counter::default() }
    }

    pub fn records(&self) -> Vec<QueryRecord> {
        self.log.lock().unwrap().clone()
    }

    pub fn into_records(self) -> Vec<QueryRecord> {
        self.log.into_inner().unwrap()
    }
}

impl<O: Oracle> Oracle for TranscriptOracle<O> {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn query(&self, x: &Assignment) -> bool {
        self.counter.bump();
        let answer = self.inner.query(x);
        let stage = *self.stage.lock().unwrap();
        self.log.lock().unwrap().push(QueryRecord { stage, point: x.clone(), answer });
        answer
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }

    fn enter_stage(&self, stage: Stage) {
        *self.stage.lock().unwrap() = Some(stage);
        self.inner.enter_stage(stage);
    }
}
