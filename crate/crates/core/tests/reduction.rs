mod common;

use boolprop::block::{rb_presets, PresetClass, RbPreset};
use boolprop::exact::exact_distance;
use boolprop::function::{Term, TermFunction};
use boolprop::oracle::TranscriptOracle;
use boolprop::reduction::{apply_rp, make_rp, reduced_tester, rp_probability, rp_reduced_tester, VariableReduction};
use boolprop::testers::{always_accept, generic_block_tester};
use boolprop::{Assignment, CoordSet, ExplicitFunction, Oracle, Probability, Stage, TruthTable};
use common::*;
use rand::{Rng, RngCore, SeedableRng};

const ETA: f64 = 0.05;

/// An `s`-term DNF on `n` variables whose terms have the given sizes, over
/// disjoint uniform variable sets with uniform signs.
fn random_dnf(n: usize, sizes: &[usize], rng: &mut impl Rng) -> TermFunction {
    let total: usize = sizes.iter().sum();
    let vars = rand::seq::index::sample(rng, n, total).into_vec();
    let mut rest = &vars[..];
    let terms = sizes
        .iter()
        .map(|&len| {
            let (mine, tail) = rest.split_at(len);
            rest = tail;
            let (mut pos, mut neg) = (CoordSet::empty(n), CoordSet::empty(n));
            for &v in mine {
                if rng.gen() {
                    pos.insert(v + 1);
                } else {
                    neg.insert(v + 1);
                }
            }
            Term::new(pos, neg).unwrap()
        })
        .collect();
    TermFunction::dnf(n, terms).unwrap()
}

#[test]
fn reduction_stays_close() {
    let (n, s, eps) = (16, 3, 0.1);
    let p = rp_probability(s, eps, ETA);
    let mut gen = boolprop::Rng::seed_from_u64(1);
    let mut close = 0;
    for seed in 0..300 {
        let sizes: Vec<usize> = (0..s).map(|_| gen.gen_range(1..=4)).collect();
        let f = ExplicitFunction::Terms(random_dnf(n, &sizes, &mut gen));
        let map = make_rp(n, p, seed).unwrap();
        let o = oracle(&f);
        let r = apply_rp(&map, &o).unwrap();
        let fhat = ExplicitFunction::Table(TruthTable::from_fn(n, |x| r.query(x)).unwrap());
        close += (exact_distance(&f, &fhat).unwrap() <= Probability::new(1, 10)) as usize;
    }
    assert!(close as f64 >= (1.0 - 2.0 * ETA) * 300.0, "{close}");
}

/// `(2s/η) log2(s/ε) ln(s/η)`, rounded up.
fn long_term_size(s: usize, eps: f64) -> usize {
    let s = s as f64;
    (2.0 * s / ETA * (s / eps).log2() * (s / ETA).ln()).ceil() as usize
}

#[test]
fn long_terms_vanish() {
    let (s, eps) = (3, 0.1);
    let k = long_term_size(s, eps);
    let n = s * k + 100;
    let p = rp_probability(s, eps, ETA);
    let mut gen = boolprop::Rng::seed_from_u64(2);
    let trials = 300;
    let survivors = (0..trials)
        .filter(|&seed| {
            let f = random_dnf(n, &vec![k; s], &mut gen);
            let map = make_rp(n, p, seed).unwrap();
            !f.terms().iter().all(|t| map.kills(t))
        })
        .count();
    // At size exactly k the union bound is tight: each term survives with
    // probability (1 - p/2)^k.
    let per_term = (1.0 - p / 2.0).powi(k as i32);
    let expected = 1.0 - (1.0 - per_term).powi(s as i32);
    assert!(expected <= ETA);
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    assert!((survivors as f64 / trials as f64) <= expected + 3.0 * sigma, "{survivors}");
}

#[test]
fn same_seed_same_transcript() {
    let f = oracle(&dnf(40, &[&[1, -2, 3], &[10, 20]]));
    let run = || {
        let t = TranscriptOracle::new(&f);
        let map = make_rp(40, 0.3, 77).unwrap();
        let r = apply_rp(&map, &t).unwrap();
        let mut rng = boolprop::Rng::seed_from_u64(5);
        for _ in 0..100 {
            r.query(&Assignment::random(40, &mut rng));
        }
        (map.to_string(), t.into_records())
    };
    assert_eq!(run(), run());
}

#[test]
fn reduced_tester_accepts_two_term_dnf() {
    let f = dnf(32, &[&[3, 9], &[-14, 30]]);
    let (eps, k) = (0.1, 4);
    let rb = rb_presets(RbPreset::JuntaMu, PresetClass::Junta { k, mu: None }, 0.1, eps / 8.0, ETA).unwrap();
    let accepted = (0..200)
        .filter(|&seed| {
            let mut rng = boolprop::Rng::seed_from_u64(seed);
            let mut inner = |g: &dyn Oracle, e: f64, rng: &mut dyn RngCore| {
                generic_block_tester(g, &rb, &mut always_accept, e, ETA, rng)
            };
            rp_reduced_tester(&oracle(&f), 2, eps, ETA, &mut inner, &mut rng).unwrap().accepted()
        })
        .count();
    assert!(accepted as f64 >= (1.0 - 4.0 * ETA) * 200.0, "{accepted}");
}

/// Stands in for a reduction: XORs the target with a fixed function that
/// is 1 on 60% of the cube.
struct Planted(TruthTable);

struct PlantedOracle<'a>(&'a dyn Oracle, &'a TruthTable);

impl Oracle for PlantedOracle<'_> {
    fn arity(&self) -> usize {
        self.0.arity()
    }
    fn query(&self, x: &Assignment) -> bool {
        self.0.query(x) ^ self.1.eval(x)
    }
    fn queries(&self) -> u64 {
        self.0.queries()
    }
}

impl VariableReduction for Planted {
    fn reduce<'a>(&'a self, f: &'a dyn Oracle) -> Box<dyn Oracle + 'a> {
        Box::new(PlantedOracle(f, &self.0))
    }
    fn queries_per_query(&self) -> u64 {
        1
    }
}

#[test]
fn reduced_tester_rejects_far_reduction() {
    let n = 10;
    let cut = (0.6 * 1024.0) as u64;
    let planted = Planted(TruthTable::from_index_fn(n, |i| i < cut).unwrap());
    let f = oracle(&parity(n, &[1]));
    let rejected = (0..200)
        .filter(|&seed| {
            let mut rng = boolprop::Rng::seed_from_u64(seed);
            let v = reduced_tester(&f, &planted, 0.5, ETA, &mut always_accept, &mut rng).unwrap();
            v.reject_stage == Some(Stage::Distinguish)
        })
        .count();
    assert!(rejected as f64 >= (1.0 - ETA) * 200.0, "{rejected}");
}
