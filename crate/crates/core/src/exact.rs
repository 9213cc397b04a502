//! Brute-force ground truth: exact distances, influences and distances to
//! enumerable classes. Results are exact dyadic rationals.

use num_rational::Ratio;

use crate::bits::{Assignment, CoordSet};
use crate::error::{capability, usage, Result};
use crate::function::{ExplicitFunction, TruthTable};
use crate::learners::fourier::walsh_hadamard;

/// Exact probability, always of the form `m / 2^j` when produced here.
pub type Probability = Ratio<i128>;

/// Work limit for class enumeration, counted in member-table evaluations
/// times `2^n`.
pub const ENUMERATION_BUDGET: u128 = 1 << 36;

fn dyadic(count: u64, log_den: usize) -> Probability {
    Ratio::new(count as i128, 1i128 << log_den)
}

/// `Pr_x[f(x) != g(x)]`.
pub fn exact_distance(f: &ExplicitFunction, g: &ExplicitFunction) -> Result<Probability> {
    if f.arity() != g.arity() {
        return usage(format!("arity mismatch: {} vs {}", f.arity(), g.arity()));
    }
    let (tf, tg) = (f.to_truth_table()?, g.to_truth_table()?);
    Ok(dyadic(tf.hamming(&tg), f.arity()))
}

fn mask_of(s: &CoordSet) -> u64 {
    s.iter().fold(0u64, |acc, i| acc | 1 << (i - 1))
}

/// `Inf_f(S) = 2 Pr_{x,y}[f(x_{S̄} ∘ y_S) != f(x)]`.
///
/// Grouping points by their restriction to `S̄`, a group with `c0` zeros and
/// `c1` ones contributes `4 c0 c1 / 2^{n+|S|}`.
pub fn influence(f: &ExplicitFunction, s: &CoordSet) -> Result<Probability> {
    if s.universe() != f.arity() {
        return usage("influence set over a different universe");
    }
    let t = f.to_truth_table()?;
    Ok(influence_of_table(&t, s))
}

pub fn influence_of_table(t: &TruthTable, s: &CoordSet) -> Probability {
    let n = t.arity();
    let m = mask_of(s);
    let group = 1u64 << s.len();
    let mut total: u128 = 0;
    for base in 0..t.size() {
        if base & m != 0 {
            continue;
        }
        let mut ones = 0u64;
        let mut sub = m;
        loop {
            ones += t.get(base | sub) as u64;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & m;
        }
        total += 4 * ones as u128 * (group - ones) as u128;
    }
    Ratio::new(total as i128, 1i128 << (n + s.len()))
}

/// `Pr_{x,y}[f(x_V ∘ y_{V̄}) != f(x)]`, which equals `Inf_f(V̄)/2`.
pub fn splice_disagreement(f: &ExplicitFunction, v: &CoordSet) -> Result<Probability> {
    Ok(influence(f, &v.complement())? / 2)
}

/// `Pr_x[f(x_X ∘ u_{X̄}) != f(x)]` for a fixed background `u`.
pub fn anchored_disagreement(f: &ExplicitFunction, x_set: &CoordSet, u: &Assignment) -> Result<Probability> {
    let t = f.to_truth_table()?;
    let n = t.arity();
    let keep = mask_of(x_set);
    let back = u.to_index().unwrap_or(0) & !keep;
    let bad = (0..t.size()).filter(|&idx| t.get((idx & keep) | back) != t.get(idx)).count() as u64;
    Ok(dyadic(bad, n))
}

/// All `k`-subsets of `[n]` in lexicographic order, as ascending lists.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (1..=k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - (k - 1 - i) {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// A class of functions whose distance to a given table can be computed by
/// exhaustive search.
pub trait ClassEnumerator {
    fn describe(&self) -> String;

    /// `min_{g ∈ C} |{x : f(x) != g(x)}|` over the arity of `f`.
    fn min_disagreements(&self, f: &TruthTable) -> Result<u64>;
}

/// `min_{g∈C} Pr[f != g]`.
pub fn distance_to_class(f: &ExplicitFunction, class: &dyn ClassEnumerator) -> Result<Probability> {
    let t = f.to_truth_table()?;
    Ok(dyadic(class.min_disagreements(&t)?, t.arity()))
}

fn check_budget(members: u128, n: usize, what: &str) -> Result<()> {
    let work = members.saturating_mul(1u128 << n);
    if work > ENUMERATION_BUDGET {
        return capability(format!("{what}: enumerating {members} members at n={n} exceeds the budget"));
    }
    Ok(())
}

/// How [`JuntaClass`] searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JuntaSearch {
    /// For each relevant set, the best inner table is the per-cell majority.
    CellMajority,
    /// Literally enumerates every relevant set and every inner table.
    Exhaustive,
}

/// Functions depending on at most `k` coordinates.
#[derive(Clone, Debug)]
pub struct JuntaClass {
    pub k: usize,
    pub search: JuntaSearch,
}

impl JuntaClass {
    pub fn new(k: usize) -> Self {
        Self { k, search: JuntaSearch::CellMajority }
    }

    pub fn exhaustive(k: usize) -> Self {
        Self { k, search: JuntaSearch::Exhaustive }
    }
}

impl ClassEnumerator for JuntaClass {
    fn describe(&self) -> String {
        format!("{}-juntas", self.k)
    }

    fn min_disagreements(&self, f: &TruthTable) -> Result<u64> {
        let n = f.arity();
        let k = self.k.min(n);
        let sets = binomial(n, k);
        let mut best = u64::MAX;
        match self.search {
            JuntaSearch::CellMajority => {
                check_budget(sets, n, "junta class")?;
                let cells = 1usize << k;
                let mut ones = vec![0u64; cells];
                for r in k_subsets(n, k) {
                    ones.iter_mut().for_each(|c| *c = 0);
                    for idx in 0..f.size() {
                        if f.get(idx) {
                            ones[cell(idx, &r)] += 1;
                        }
                    }
                    let per_cell = f.size() >> k;
                    let d = ones.iter().map(|&c| c.min(per_cell - c)).sum();
                    best = best.min(d);
                }
            }
            JuntaSearch::Exhaustive => {
                if k > 4 {
                    return capability("exhaustive junta enumeration is limited to k <= 4");
                }
                let inner = 1u128 << (1u32 << k);
                check_budget(sets * inner, n, "junta class")?;
                for r in k_subsets(n, k) {
                    let cells: Vec<usize> = (0..f.size()).map(|idx| cell(idx, &r)).collect();
                    for g in 0..inner as u64 {
                        let d = (0..f.size()).filter(|&idx| f.get(idx) != (g >> cells[idx as usize] & 1 == 1)).count()
                            as u64;
                        best = best.min(d);
                    }
                }
            }
        }
        Ok(best)
    }
}

fn cell(idx: u64, coords: &[usize]) -> usize {
    coords.iter().enumerate().fold(0, |acc, (b, &i)| acc | ((idx >> (i - 1) & 1) as usize) << b)
}

/// Table of `x ↦ ∏_{i∈m} x_i`.
fn monomial_table(n: usize, m: &[usize]) -> TruthTable {
    let mask = m.iter().fold(0u64, |acc, &i| acc | 1 << (i - 1));
    TruthTable::from_index_fn(n, |idx| idx & mask == mask).unwrap()
}

fn parity_table(n: usize, m: &[usize]) -> TruthTable {
    let mask = m.iter().fold(0u64, |acc, &i| acc | 1 << (i - 1));
    TruthTable::from_index_fn(n, |idx| (idx & mask).count_ones() % 2 == 1).unwrap()
}

/// Parities of at most `k` variables and their negations (constants
/// included).
#[derive(Clone, Debug)]
pub struct AffineParityClass {
    pub k: usize,
}

impl ClassEnumerator for AffineParityClass {
    fn describe(&self) -> String {
        format!("affine parities of at most {} variables", self.k)
    }

    fn min_disagreements(&self, f: &TruthTable) -> Result<u64> {
        let n = f.arity();
        let members: u128 = (0..=self.k.min(n)).map(|j| binomial(n, j)).sum();
        check_budget(members, n, "parity class")?;
        let mut best = u64::MAX;
        for j in 0..=self.k.min(n) {
            for s in k_subsets(n, j) {
                let d = f.hamming(&parity_table(n, &s));
                best = best.min(d.min(f.size() - d));
            }
        }
        Ok(best)
    }
}

/// F2 polynomials with at most `s` monomials, each of size at most `d`
/// (`None` means any size).
#[derive(Clone, Debug)]
pub struct SparsePolyClass {
    pub s: usize,
    pub d: Option<usize>,
}

impl ClassEnumerator for SparsePolyClass {
    fn describe(&self) -> String {
        match self.d {
            Some(d) => format!("{}-sparse polynomials of degree <= {d}", self.s),
            None => format!("{}-sparse polynomials", self.s),
        }
    }

    fn min_disagreements(&self, f: &TruthTable) -> Result<u64> {
        let n = f.arity();
        let d = self.d.unwrap_or(n).min(n);
        let monos: Vec<TruthTable> = (0..=d).flat_map(|j| k_subsets(n, j)).map(|m| monomial_table(n, &m)).collect();
        let members: u128 = (0..=self.s).map(|j| binomial(monos.len(), j)).sum();
        check_budget(members, n, "sparse polynomial class")?;
        let mut best = f.count_ones();
        let mut acc = TruthTable::zeros(n)?;
        // Depth-first over strictly increasing monomial index lists.
        fn walk(f: &TruthTable, monos: &[TruthTable], start: usize, left: usize, acc: &mut TruthTable, best: &mut u64) {
            if left == 0 {
                return;
            }
            for i in start..monos.len() {
                acc.xor_assign(&monos[i]);
                *best = (*best).min(f.hamming(acc));
                walk(f, monos, i + 1, left - 1, acc, best);
                acc.xor_assign(&monos[i]);
            }
        }
        walk(f, &monos, 0, self.s, &mut acc, &mut best);
        Ok(best)
    }
}

/// Boolean functions of Fourier degree at most `d`, by enumerating every
/// Boolean function on `n <= 4` variables.
#[derive(Clone, Debug)]
pub struct FourierDegreeClass {
    pub d: usize,
}

impl ClassEnumerator for FourierDegreeClass {
    fn describe(&self) -> String {
        format!("Fourier degree <= {}", self.d)
    }

    fn min_disagreements(&self, f: &TruthTable) -> Result<u64> {
        let n = f.arity();
        if n > 4 {
            return capability("Fourier-degree enumeration is limited to n <= 4");
        }
        let size = 1u64 << n;
        let fi = f.words()[0];
        let mut best = u64::MAX;
        for g in 0..1u64 << size {
            let t = TruthTable::from_index_fn(n, |idx| g >> idx & 1 == 1)?;
            if fourier_degree(&t) <= self.d {
                best = best.min((g ^ fi).count_ones() as u64);
            }
        }
        Ok(best)
    }
}

/// Largest `|S|` with a nonzero Walsh coefficient; 0 for constants.
pub fn fourier_degree(t: &TruthTable) -> usize {
    walsh_hadamard(t)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(s, _)| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
