#![allow(dead_code)]

use boolprop::function::{ExplicitFunction, JuntaFn, SparsePoly, Term, TermFunction, TruthTable};
use boolprop::{CoordSet, FunctionOracle};

pub fn junta(n: usize, rel: &[usize], f: impl FnMut(u64) -> bool) -> ExplicitFunction {
    let t = TruthTable::from_index_fn(rel.len(), f).unwrap();
    ExplicitFunction::Junta(JuntaFn::new(n, rel.to_vec(), t).unwrap())
}

pub fn majority(n: usize, rel: &[usize]) -> ExplicitFunction {
    let half = rel.len() as u32 / 2;
    junta(n, rel, |i| i.count_ones() > half)
}

pub fn parity(n: usize, rel: &[usize]) -> ExplicitFunction {
    junta(n, rel, |i| i.count_ones() % 2 == 1)
}

pub fn poly(n: usize, monos: &[&[usize]]) -> ExplicitFunction {
    let monos = monos.iter().map(|m| CoordSet::from_coords(n, m.iter().copied()).unwrap());
    ExplicitFunction::Poly(SparsePoly::new(n, monos).unwrap())
}

/// Terms given as signed variables, negative for a negated literal.
pub fn dnf(n: usize, terms: &[&[i64]]) -> ExplicitFunction {
    let terms = terms
        .iter()
        .map(|t| {
            let pos = t.iter().filter(|&&v| v > 0).map(|&v| v as usize);
            let neg = t.iter().filter(|&&v| v < 0).map(|&v| (-v) as usize);
            Term::new(CoordSet::from_coords(n, pos).unwrap(), CoordSet::from_coords(n, neg).unwrap()).unwrap()
        })
        .collect();
    ExplicitFunction::Terms(TermFunction::dnf(n, terms).unwrap())
}

pub fn oracle(f: &ExplicitFunction) -> FunctionOracle {
    FunctionOracle::new(f.clone())
}

/// Fraction of seeds `0..trials` on which `run` returns true.
pub fn rate(trials: u64, mut run: impl FnMut(u64) -> bool) -> f64 {
    (0..trials).filter(|&s| run(s)).count() as f64 / trials as f64
}

/// A junta on `k` distinct uniform coordinates with a uniform table.
pub fn random_junta(n: usize, k: usize, rng: &mut impl rand::Rng) -> ExplicitFunction {
    let mut rel = rand::seq::index::sample(rng, n, k).into_vec();
    rel.iter_mut().for_each(|i| *i += 1);
    rel.sort();
    junta(n, &rel, |_| rng.gen())
}
