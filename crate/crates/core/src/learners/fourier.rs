//! Fourier expansions over `{-1,+1}` with TRUE ↦ -1.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rand::RngCore;

use crate::bits::{Assignment, CoordSet};
use crate::error::{capability, Error, Result};
use crate::function::TruthTable;
use crate::oracle::Oracle;
use crate::sampling::ceil_tol;

/// Largest arity the exhaustive learners accept.
pub const MAX_LEARN_ARITY: usize = 20;

pub type Coefficient = Ratio<i128>;

/// `g(x) = Σ_S ĝ_S χ_S(x)` with only nonzero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierExpansion {
    n: usize,
    coeffs: BTreeMap<CoordSet, Coefficient>,
}

impl FourierExpansion {
    pub fn new(n: usize, coeffs: impl IntoIterator<Item = (CoordSet, Coefficient)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, c) in coeffs {
            if s.universe() != n {
                return Err(Error::Usage(format!("coefficient set over universe {}", s.universe())));
            }
            let e: &mut Coefficient = map.entry(s).or_insert_with(Coefficient::zero);
            *e += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self { n, coeffs: map })
    }

    /// `χ_S` itself.
    pub fn character(s: CoordSet) -> Self {
        let n = s.universe();
        Self::new(n, [(s, Coefficient::one())]).unwrap()
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, s: &CoordSet) -> Coefficient {
        self.coeffs.get(s).copied().unwrap_or_else(Coefficient::zero)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&CoordSet, &Coefficient)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &CoordSet> {
        self.coeffs.keys()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(CoordSet::len).max().unwrap_or(0)
    }

    /// `Σ ĝ_S²`.
    pub fn parseval_mass(&self) -> Coefficient {
        self.coeffs.values().map(|c| c * c).sum()
    }

    pub fn eval(&self, x: &Assignment) -> Coefficient {
        let ones = CoordSet::from_mask(x.clone());
        self.coeffs.iter().map(|(s, c)| if s.intersection(&ones).len() % 2 == 1 { -c } else { *c }).sum()
    }

    /// Boolean reading of the value: negative means TRUE.
    pub fn eval_sign(&self, x: &Assignment) -> bool {
        self.eval(x).is_negative()
    }

    pub fn is_pm_one_at(&self, x: &Assignment) -> bool {
        self.eval(x).abs().is_one()
    }

    /// Parses `S:num/den` lines (`S` as `{1,3}`, `{}` for the empty set).
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let bad = || Error::Parse(format!("bad Fourier entry {line:?}"));
            let (set, coeff) = line.split_once(':').ok_or_else(bad)?;
            let inner = set.strip_prefix('{').and_then(|s| s.strip_suffix('}')).ok_or_else(bad)?;
            let s = CoordSet::parse_list(n, inner)?;
            let (num, den) = coeff.split_once('/').unwrap_or((coeff, "1"));
            let num: i128 = num.trim().parse().map_err(|_| bad())?;
            let den: i128 = den.trim().parse().map_err(|_| bad())?;
            if den <= 0 {
                return Err(bad());
            }
            entries.push((s, Ratio::new(num, den)));
        }
        let g = Self::new(n, entries.iter().cloned())?;
        if g.coeffs.len() != entries.len() {
            return Err(Error::Parse("repeated or zero Fourier coefficient".into()));
        }
        Ok(g)
    }
}

impl fmt::Display for FourierExpansion {
    /// One `{S}:num/den` line per nonzero coefficient, sets in ascending
    /// lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, c) in &self.coeffs {
            writeln!(f, "{{{s}}}:{}/{}", c.numer(), c.denom())?;
        }
        Ok(())
    }
}

/// Unnormalised Walsh–Hadamard transform of `(-1)^{f(x)}`:
/// entry `S` (as a bit mask) is `2^n ĝ_S`.
pub fn walsh_hadamard(t: &TruthTable) -> Vec<i64> {
    let size = t.size() as usize;
    let mut w: Vec<i64> = (0..size).map(|i| if t.get(i as u64) { -1 } else { 1 }).collect();
    let mut h = 1;
    while h < size {
        for i in (0..size).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (w[j], w[j + h]);
                w[j] = a + b;
                w[j + h] = a - b;
            }
        }
        h *= 2;
    }
    w
}

/// Expansion of a table, keeping only `|S| <= max_degree`.
pub fn expansion_of_table(t: &TruthTable, max_degree: usize) -> FourierExpansion {
    let n = t.arity();
    let w = walsh_hadamard(t);
    let coeffs = w.iter().enumerate().filter_map(|(mask, &c)| {
        if c == 0 || (mask as u64).count_ones() as usize > max_degree {
            return None;
        }
        let s = CoordSet::from_mask(Assignment::from_index(n, mask as u64));
        Some((s, Ratio::new(c as i128, 1i128 << n)))
    });
    FourierExpansion::new(n, coeffs).unwrap()
}

/// Queries every point of `f` and returns the exact coefficients with
/// `|S| <= d`.
pub fn fourier_exact_learn(f: &dyn Oracle, d: usize) -> Result<FourierExpansion> {
    let k = f.arity();
    if k > MAX_LEARN_ARITY {
        return capability(format!("exhaustive Fourier learning limited to {MAX_LEARN_ARITY} coordinates, got {k}"));
    }
    let t = TruthTable::from_fn(k, |x| f.query(x))?;
    Ok(expansion_of_table(&t, d))
}

/// Support bound for Boolean functions of degree `d`: `2^{2d-2}`, and 1 at
/// `d = 0`.
pub fn degree_support_bound(d: usize) -> usize {
    if d == 0 {
        1
    } else {
        1usize << (2 * d - 2)
    }
}

/// Number of random points [`fourier_membership`] evaluates.
pub fn membership_samples(d: usize, fail: f64) -> u64 {
    ceil_tol(4f64.powi(d as i32) * (1.0 / fail).ln()).max(1)
}

/// One-sided randomized test that `g` is a Boolean function of degree at
/// most `d`: Boolean `g` always passes.
pub fn fourier_membership(g: &FourierExpansion, d: usize, fail: f64, rng: &mut dyn RngCore) -> bool {
    if g.degree() > d || g.support_size() > degree_support_bound(d) {
        return false;
    }
    (0..membership_samples(d, fail)).all(|_| g.is_pm_one_at(&Assignment::random(g.arity(), rng)))
}

/// Deterministic check that `g² ≡ 1` by convolving the coefficients.
/// Intended for `d <= 6`, where the support is small.
pub fn fourier_membership_exact(g: &FourierExpansion, d: usize) -> bool {
    if g.degree() > d || g.support_size() > degree_support_bound(d) {
        return false;
    }
    let mut square: BTreeMap<CoordSet, Coefficient> = BTreeMap::new();
    for (s, a) in g.coefficients() {
        for (t, b) in g.coefficients() {
            let u = s.union(t).difference(&s.intersection(t));
            *square.entry(u).or_insert_with(Coefficient::zero) += a * b;
        }
    }
    square.retain(|_, c| !c.is_zero());
    square.len() == 1 && square.get(&CoordSet::empty(g.arity())).is_some_and(|c| c.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::FunctionOracle;
    use crate::ExplicitFunction;
    use rand::SeedableRng;

    fn set(n: usize, c: &[usize]) -> CoordSet {
        CoordSet::from_coords(n, c.iter().copied()).unwrap()
    }

    fn learn(n: usize, f: impl FnMut(u64) -> bool, d: usize) -> FourierExpansion {
        let o = FunctionOracle::new(ExplicitFunction::Table(TruthTable::from_index_fn(n, f).unwrap()));
        fourier_exact_learn(&o, d).unwrap()
    }

    #[test]
    fn dictator_and_constant() {
        let g = learn(3, |i| i & 1 == 1, 3);
        assert_eq!(g, FourierExpansion::character(set(3, &[1])));
        let t = learn(2, |_| true, 2);
        assert_eq!(t.coefficient(&set(2, &[])), Ratio::from_integer(-1));
        assert_eq!(t.support_size(), 1);
    }

    #[test]
    fn and_coefficients_round_trip() {
        // AND in ±1 with TRUE ↦ -1: 1/2 + χ1/2 + χ2/2 - χ12/2.
        let g = learn(2, |i| i == 3, 2);
        let h = Ratio::new(1, 2);
        assert_eq!(g.coefficient(&set(2, &[])), h);
        assert_eq!(g.coefficient(&set(2, &[1])), h);
        assert_eq!(g.coefficient(&set(2, &[2])), h);
        assert_eq!(g.coefficient(&set(2, &[1, 2])), -h);
        for i in 0..4 {
            let x = Assignment::from_index(2, i);
            assert_eq!(g.eval_sign(&x), i == 3);
            assert!(g.is_pm_one_at(&x));
        }
        assert!(g.parseval_mass().is_one());
    }

    #[test]
    fn membership_examples() {
        let mut rng = crate::Rng::seed_from_u64(1);
        let chi1 = FourierExpansion::character(set(3, &[1]));
        assert!(fourier_membership(&chi1, 1, 0.05, &mut rng));
        assert!(fourier_membership_exact(&chi1, 1));
        let sum = FourierExpansion::new(3, [(set(3, &[1]), Ratio::one()), (set(3, &[2]), Ratio::one())]).unwrap();
        assert!(!fourier_membership(&sum, 1, 0.05, &mut rng));
        assert!(!fourier_membership_exact(&sum, 1));
        // Five coefficients exceed the degree-2 support bound of 4.
        let d = 2;
        let wide = FourierExpansion::new(
            4,
            [vec![], vec![1], vec![2], vec![3], vec![4]].into_iter().map(|c| (set(4, &c), Ratio::new(1, 5))),
        )
        .unwrap();
        assert_eq!(wide.support_size(), degree_support_bound(d) + 1);
        assert!(!fourier_membership(&wide, d, 0.05, &mut rng));
    }

    #[test]
    fn text_round_trip() {
        let g = learn(3, |i| i.count_ones() >= 2, 3);
        let text = g.to_string();
        assert_eq!(FourierExpansion::parse(3, &text).unwrap(), g);
        assert!(text.starts_with("{1}:1/2\n"), "{text}");
    }
}
