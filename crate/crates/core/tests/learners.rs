mod common;

use boolprop::learners::anf::{anf_exact_learn, anf_of_table};
use boolprop::learners::fourier::{
    expansion_of_table, fourier_exact_learn, fourier_membership, fourier_membership_exact, Coefficient,
};
use boolprop::learners::FourierExpansion;
use boolprop::{Assignment, CoordSet, ExplicitFunction, TruthTable};
use common::*;
use num_traits::One;
use rand::{Rng, SeedableRng};

fn random_table(n: usize, rng: &mut impl Rng) -> TruthTable {
    TruthTable::from_index_fn(n, |_| rng.gen()).unwrap()
}

/// A uniformly labelled decision tree of depth `d` over `n` variables, with
/// no variable repeated along a path.
fn decision_tree(n: usize, d: usize, rng: &mut impl Rng) -> TruthTable {
    fn build(n: usize, depth: usize, used: &mut Vec<usize>, rng: &mut impl Rng) -> Box<dyn Fn(&Assignment) -> bool> {
        if depth == 0 {
            let leaf: bool = rng.gen();
            return Box::new(move |_| leaf);
        }
        let v = loop {
            let v = rng.gen_range(1..=n);
            if !used.contains(&v) {
                break v;
            }
        };
        used.push(v);
        let lo = build(n, depth - 1, used, rng);
        let hi = build(n, depth - 1, used, rng);
        used.pop();
        Box::new(move |x| if x.get(v) { hi(x) } else { lo(x) })
    }
    let tree = build(n, d, &mut Vec::new(), rng);
    TruthTable::from_fn(n, |x| tree(x)).unwrap()
}

#[test]
fn anf_round_trip() {
    let mut rng = boolprop::Rng::seed_from_u64(1);
    for i in 0..500 {
        let n = i % 11;
        let t = random_table(n, &mut rng);
        let p = anf_of_table(&t);
        assert_eq!(TruthTable::from_fn(n, |x| p.eval(x)).unwrap(), t);
        let learned = anf_exact_learn(&oracle(&ExplicitFunction::Table(t.clone()))).unwrap();
        assert_eq!(learned, p);
    }
}

#[test]
fn fourier_round_trip() {
    let mut rng = boolprop::Rng::seed_from_u64(2);
    for i in 0..200 {
        let n = i % 9;
        let t = random_table(n, &mut rng);
        let e = expansion_of_table(&t, usize::MAX);
        for idx in 0..t.size() {
            let x = Assignment::from_index(n, idx);
            let pm = if t.get(idx) { -Coefficient::one() } else { Coefficient::one() };
            assert_eq!(e.eval(&x), pm);
        }
        assert_eq!(e.parseval_mass(), Coefficient::one());
        let learned = fourier_exact_learn(&oracle(&ExplicitFunction::Table(t)), n).unwrap();
        assert_eq!(learned, e);
    }
}

#[test]
fn low_degree_coefficients_are_quantized() {
    let mut rng = boolprop::Rng::seed_from_u64(3);
    for i in 0..200 {
        let d = 1 + i % 3;
        let t = decision_tree(7, d, &mut rng);
        let e = expansion_of_table(&t, usize::MAX);
        assert!(e.degree() <= d);
        let scale = Coefficient::from_integer(1 << (d - 1));
        for (_, c) in e.coefficients() {
            assert!((c * scale).is_integer(), "{c} at d={d}");
        }
    }
}

#[test]
fn membership_has_no_false_rejections() {
    let mut rng = boolprop::Rng::seed_from_u64(4);
    let trees: Vec<FourierExpansion> =
        (0..100).map(|i| expansion_of_table(&decision_tree(6, 1 + i % 3, &mut rng), usize::MAX)).collect();
    for i in 0..10_000 {
        let e = &trees[i % trees.len()];
        assert!(fourier_membership(e, 3, 0.05, &mut rng));
    }
    assert!(trees.iter().all(|e| fourier_membership_exact(e, 3)));
}

#[test]
fn membership_detects_non_boolean_sum() {
    let n = 4;
    let one = |i| (CoordSet::from_coords(n, [i]).unwrap(), Coefficient::one());
    let g = FourierExpansion::new(n, [one(1), one(2)]).unwrap();
    assert!(!fourier_membership_exact(&g, 2));
    let mut rng = boolprop::Rng::seed_from_u64(5);
    let trials = 10_000;
    let caught = (0..trials).filter(|_| !fourier_membership(&g, 2, 0.05, &mut rng)).count();
    assert!(caught as f64 >= 0.95 * trials as f64, "{caught}");
}
