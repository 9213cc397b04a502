//! Explicit Boolean function representations and their text format.

use std::fmt;

use crate::bits::{hex_to_nibbles, nibbles_to_hex, Assignment, CoordSet};
use crate::error::{capability, usage, Error, Result};
use crate::learners::fourier::FourierExpansion;

/// Largest arity for which a full truth table is materialised.
pub const MAX_TABLE_ARITY: usize = 24;

/// A function `{0,1}^n -> {0,1}` stored as `2^n` bits, indexed by
/// [`Assignment::to_index`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    bits: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(n: usize) -> Result<Self> {
        if n > MAX_TABLE_ARITY {
            return capability(format!("truth tables are limited to n <= {MAX_TABLE_ARITY}, got {n}"));
        }
        Ok(Self { n, bits: vec![0; (1usize << n).div_ceil(64)] })
    }

    /// Tabulates `f` on every index `0..2^n`.
    pub fn from_index_fn(n: usize, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        for idx in 0..t.size() {
            if f(idx) {
                t.set(idx, true);
            }
        }
        Ok(t)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(&Assignment) -> bool) -> Result<Self> {
        Self::from_index_fn(n, |idx| f(&Assignment::from_index(n, idx)))
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        if value {
            t.bits.iter_mut().for_each(|w| *w = u64::MAX);
            t.clear_tail();
        }
        Ok(t)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// `2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    #[inline]
    pub fn get(&self, idx: u64) -> bool {
        (self.bits[(idx / 64) as usize] >> (idx % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, idx: u64, value: bool) {
        let w = &mut self.bits[(idx / 64) as usize];
        if value {
            *w |= 1 << (idx % 64);
        } else {
            *w &= !(1 << (idx % 64));
        }
    }

    pub fn eval(&self, x: &Assignment) -> bool {
        debug_assert_eq!(x.len(), self.n);
        self.get(x.to_index().expect("table arity is at most 24"))
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of indices where the two tables differ.
    ///
    /// # Panics
    /// If the arities differ.
    pub fn hamming(&self, other: &TruthTable) -> u64 {
        assert_eq!(self.n, other.n, "tables of different arity");
        self.bits.iter().zip(&other.bits).map(|(a, b)| (a ^ b).count_ones() as u64).sum()
    }

    pub fn xor_assign(&mut self, other: &TruthTable) {
        assert_eq!(self.n, other.n, "tables of different arity");
        self.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a ^= b);
    }

    pub fn negated(&self) -> TruthTable {
        let mut t = TruthTable { n: self.n, bits: self.bits.iter().map(|w| !w).collect() };
        t.clear_tail();
        t
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Coordinates `i` with `f|x_i=0 != f|x_i=1` somewhere.
    pub fn relevant(&self) -> CoordSet {
        let mut s = CoordSet::empty(self.n);
        for i in 1..=self.n {
            let bit = 1u64 << (i - 1);
            if (0..self.size()).any(|idx| idx & bit == 0 && self.get(idx) != self.get(idx | bit)) {
                s.insert(i);
            }
        }
        s
    }

    /// `⌈2^n/4⌉` hex digits; digit `j` holds indices `4j..4j+3`, lowest in
    /// the least significant bit.
    pub fn to_hex(&self) -> String {
        nibbles_to_hex(self.size() as usize, |b| self.get(b as u64))
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        hex_to_nibbles(t.size() as usize, s, |b| t.set(b as u64, true))?;
        Ok(t)
    }

    fn clear_tail(&mut self) {
        let size = self.size();
        if !size.is_multiple_of(64) {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << (size % 64)) - 1;
            }
        }
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, {})", self.n, self.to_hex())
    }
}

/// A function of the form `g(x_{r_1}, ..., x_{r_k})` for an explicit
/// relevant list `r` and a `k`-ary table `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JuntaFn {
    n: usize,
    relevant: Vec<usize>,
    table: TruthTable,
}

impl JuntaFn {
    /// `relevant[i]` feeds input `i + 1` of `table`. Coordinates must be
    /// distinct and within `[n]`.
    pub fn new(n: usize, relevant: Vec<usize>, table: TruthTable) -> Result<Self> {
        if table.arity() != relevant.len() {
            return usage(format!(
                "inner table has arity {} but {} relevant coordinates were given",
                table.arity(),
                relevant.len()
            ));
        }
        let set = CoordSet::from_coords(n, relevant.iter().copied())?;
        if set.len() != relevant.len() {
            return usage("relevant coordinates must be distinct");
        }
        Ok(Self { n, relevant, table })
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self { n, relevant: Vec::new(), table: TruthTable::constant(0, value).unwrap() }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn relevant(&self) -> &[usize] {
        &self.relevant
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    #[inline]
    pub fn eval(&self, x: &Assignment) -> bool {
        let idx = self.relevant.iter().enumerate().fold(0u64, |acc, (b, &i)| acc | (x.get(i) as u64) << b);
        self.table.get(idx)
    }
}

/// An XOR of monotone monomials over F2, kept in normal form: monomials
/// sorted and pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    n: usize,
    monomials: Vec<CoordSet>,
}

impl SparsePoly {
    /// Normalises the list: equal monomials cancel in pairs.
    pub fn new(n: usize, monomials: impl IntoIterator<Item = CoordSet>) -> Result<Self> {
        let mut ms: Vec<CoordSet> = monomials.into_iter().collect();
        if let Some(m) = ms.iter().find(|m| m.universe() != n) {
            return usage(format!("monomial over universe {} in a poly with n={n}", m.universe()));
        }
        ms.sort();
        let mut out: Vec<CoordSet> = Vec::with_capacity(ms.len());
        for m in ms {
            if out.last() == Some(&m) {
                out.pop();
            } else {
                out.push(m);
            }
        }
        Ok(Self { n, monomials: out })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, monomials: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &[CoordSet] {
        &self.monomials
    }

    pub fn sparsity(&self) -> usize {
        self.monomials.len()
    }

    /// Largest monomial size; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.monomials.iter().map(CoordSet::len).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &Assignment) -> bool {
        self.monomials.iter().filter(|m| m.all_ones_in(x)).count() % 2 == 1
    }
}

/// A conjunction of literals: `pos` unnegated, `neg` negated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pos: CoordSet,
    neg: CoordSet,
}

impl Term {
    pub fn new(pos: CoordSet, neg: CoordSet) -> Result<Self> {
        if pos.universe() != neg.universe() {
            return usage("term literals over different universes");
        }
        if !pos.is_disjoint(&neg) {
            return usage("a term may mention each variable once");
        }
        Ok(Self { pos, neg })
    }

    /// The empty conjunction (always true).
    pub fn empty(n: usize) -> Self {
        Self { pos: CoordSet::empty(n), neg: CoordSet::empty(n) }
    }

    pub fn positive(&self) -> &CoordSet {
        &self.pos
    }

    pub fn negative(&self) -> &CoordSet {
        &self.neg
    }

    pub fn variables(&self) -> CoordSet {
        self.pos.union(&self.neg)
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn eval(&self, x: &Assignment) -> bool {
        self.pos.all_ones_in(x) && self.neg.all_zeros_in(x)
    }
}

/// `g(T_1(x), ..., T_s(x))` with an outer table `g` of arity `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermFunction {
    n: usize,
    outer: TruthTable,
    terms: Vec<Term>,
}

impl TermFunction {
    pub fn new(n: usize, outer: TruthTable, terms: Vec<Term>) -> Result<Self> {
        if outer.arity() != terms.len() {
            return usage(format!("outer table has arity {} but {} terms were given", outer.arity(), terms.len()));
        }
        if terms.iter().any(|t| t.pos.universe() != n) {
            return usage("term over a different universe");
        }
        Ok(Self { n, outer, terms })
    }

    /// OR of the terms.
    pub fn dnf(n: usize, terms: Vec<Term>) -> Result<Self> {
        let s = terms.len();
        let outer = TruthTable::from_index_fn(s, |idx| idx != 0)?;
        Self::new(n, outer, terms)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn outer(&self) -> &TruthTable {
        &self.outer
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval(&self, x: &Assignment) -> bool {
        let idx = self.terms.iter().enumerate().fold(0u64, |acc, (b, t)| acc | (t.eval(x) as u64) << b);
        self.outer.get(idx)
    }
}

/// Any of the supported explicit representations.
#[derive(Clone, Debug, PartialEq)]
pub enum ExplicitFunction {
    Table(TruthTable),
    Junta(JuntaFn),
    Poly(SparsePoly),
    Terms(TermFunction),
    /// Evaluated through the sign of the real value: negative means TRUE.
    Fourier(FourierExpansion),
}

impl ExplicitFunction {
    pub fn arity(&self) -> usize {
        match self {
            Self::Table(t) => t.arity(),
            Self::Junta(j) => j.arity(),
            Self::Poly(p) => p.arity(),
            Self::Terms(t) => t.arity(),
            Self::Fourier(g) => g.arity(),
        }
    }

    pub fn eval(&self, x: &Assignment) -> bool {
        match self {
            Self::Table(t) => t.eval(x),
            Self::Junta(j) => j.eval(x),
            Self::Poly(p) => p.eval(x),
            Self::Terms(t) => t.eval(x),
            Self::Fourier(g) => g.eval_sign(x),
        }
    }

    pub fn to_truth_table(&self) -> Result<TruthTable> {
        if let Self::Table(t) = self {
            return Ok(t.clone());
        }
        TruthTable::from_fn(self.arity(), |x| self.eval(x))
    }

    /// A set of coordinates outside which the function is known not to
    /// depend, read off the representation without evaluating it.
    pub fn support_hint(&self) -> CoordSet {
        let n = self.arity();
        match self {
            Self::Table(_) => CoordSet::full(n),
            Self::Junta(j) => CoordSet::from_coords(n, j.relevant().iter().copied()).unwrap(),
            Self::Poly(p) => p.monomials().iter().fold(CoordSet::empty(n), |acc, m| acc.union(m)),
            Self::Terms(t) => t.terms().iter().fold(CoordSet::empty(n), |acc, term| acc.union(&term.variables())),
            Self::Fourier(g) => g.support().fold(CoordSet::empty(n), |acc, s| acc.union(s)),
        }
    }

    /// The exact relevant set. Enumerates the subcube spanned by
    /// [`support_hint`](Self::support_hint), so that set must have at most
    /// [`MAX_TABLE_ARITY`] members.
    pub fn relevant(&self) -> Result<CoordSet> {
        let n = self.arity();
        let hint = self.support_hint().to_vec();
        let local = self.restrict_to(&hint, &Assignment::zeros(n))?;
        let rel = local.relevant();
        Ok(CoordSet::from_coords(n, rel.iter().map(|i| hint[i - 1])).unwrap())
    }

    /// The same function as a junta over [`support_hint`](Self::support_hint).
    pub fn to_junta(&self) -> Result<JuntaFn> {
        if let Self::Junta(j) = self {
            return Ok(j.clone());
        }
        let n = self.arity();
        let hint = self.support_hint().to_vec();
        let table = self.restrict_to(&hint, &Assignment::zeros(n))?;
        JuntaFn::new(n, hint, table)
    }

    /// Table of `x ↦ f(base with coords[i] := x_{i+1})`.
    pub fn restrict_to(&self, coords: &[usize], base: &Assignment) -> Result<TruthTable> {
        let mut x = base.clone();
        TruthTable::from_index_fn(coords.len(), |idx| {
            for (b, &i) in coords.iter().enumerate() {
                x.set(i, idx >> b & 1 == 1);
            }
            self.eval(&x)
        })
    }

    /// Parses the text format produced by [`Display`](fmt::Display).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty function file".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("expected n=<int>, found {header:?}")))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad arity: {e}")))?;
        let body = lines.next().ok_or_else(|| Error::Parse("missing body line".into()))?;
        let (kind, rest) =
            body.split_once('=').ok_or_else(|| Error::Parse(format!("expected <kind>=..., found {body:?}")))?;
        let f = match kind {
            "tt" => Self::Table(TruthTable::from_hex(n, rest)?),
            "junta" => {
                let (vars, hex) =
                    rest.split_once(';').ok_or_else(|| Error::Parse("junta needs <vars>;<hex>".into()))?;
                let relevant = parse_var_list(n, vars)?;
                let table = TruthTable::from_hex(relevant.len(), hex)?;
                Self::Junta(JuntaFn::new(n, relevant, table).map_err(to_parse)?)
            }
            "poly" => {
                let monos = if rest.is_empty() {
                    Vec::new()
                } else {
                    rest.split(',').map(|m| parse_monomial(n, m)).collect::<Result<Vec<_>>>()?
                };
                let p = SparsePoly::new(n, monos)?;
                if p.sparsity() != rest.split(',').filter(|m| !m.is_empty()).count() {
                    return Err(Error::Parse("repeated monomial in poly line".into()));
                }
                Self::Poly(p)
            }
            "termfn" => {
                let mut parts = rest.splitn(3, ';');
                let s: usize =
                    parts.next().unwrap().parse().map_err(|e| Error::Parse(format!("bad term count: {e}")))?;
                let hex = parts.next().ok_or_else(|| Error::Parse("termfn missing outer table".into()))?;
                let list = parts.next().ok_or_else(|| Error::Parse("termfn missing terms".into()))?;
                let outer = TruthTable::from_hex(s, hex)?;
                let terms = if s == 0 {
                    Vec::new()
                } else {
                    list.split(',').map(|t| parse_term(n, t)).collect::<Result<Vec<_>>>()?
                };
                Self::Terms(TermFunction::new(n, outer, terms).map_err(to_parse)?)
            }
            "fourier" => {
                let entries: Vec<&str> =
                    std::iter::once(rest).filter(|r| !r.is_empty()).chain(lines.by_ref()).collect();
                Self::Fourier(FourierExpansion::parse(n, &entries.join("\n"))?)
            }
            other => return Err(Error::Parse(format!("unknown representation {other:?}"))),
        };
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after function body".into()));
        }
        Ok(f)
    }
}

fn to_parse(e: Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse_var(n: usize, v: &str) -> Result<usize> {
    let i: usize = v
        .strip_prefix('x')
        .ok_or_else(|| Error::Parse(format!("expected x<i>, found {v:?}")))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad variable {v:?}: {e}")))?;
    if i == 0 || i > n {
        return Err(Error::Parse(format!("variable {v} outside [1, {n}]")));
    }
    Ok(i)
}

fn parse_var_list(n: usize, s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('+').map(|v| parse_var(n, v)).collect()
}

fn parse_monomial(n: usize, m: &str) -> Result<CoordSet> {
    if m == "1" {
        return Ok(CoordSet::empty(n));
    }
    let vars = parse_var_list(n, m)?;
    let set = CoordSet::from_coords(n, vars.iter().copied()).map_err(to_parse)?;
    if set.len() != vars.len() {
        return Err(Error::Parse(format!("repeated variable in monomial {m:?}")));
    }
    Ok(set)
}

fn parse_term(n: usize, t: &str) -> Result<Term> {
    if t == "1" {
        return Ok(Term::empty(n));
    }
    let mut pos = CoordSet::empty(n);
    let mut neg = CoordSet::empty(n);
    for lit in t.split('+') {
        let (negated, v) = match lit.strip_prefix('!') {
            Some(v) => (true, v),
            None => (false, lit),
        };
        let i = parse_var(n, v)?;
        if pos.contains(i) || neg.contains(i) {
            return Err(Error::Parse(format!("variable x{i} repeated in term {t:?}")));
        }
        if negated {
            neg.insert(i);
        } else {
            pos.insert(i);
        }
    }
    Ok(Term { pos, neg })
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &CoordSet) -> fmt::Result {
    if m.is_empty() {
        return f.write_str("1");
    }
    for (k, i) in m.iter().enumerate() {
        if k > 0 {
            f.write_str("+")?;
        }
        write!(f, "x{i}")?;
    }
    Ok(())
}

impl fmt::Display for ExplicitFunction {
    /// Two-line text format: `n=<int>` then the body line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.arity())?;
        match self {
            Self::Table(t) => writeln!(f, "tt={}", t.to_hex()),
            Self::Junta(j) => {
                f.write_str("junta=")?;
                for (k, i) in j.relevant().iter().enumerate() {
                    if k > 0 {
                        f.write_str("+")?;
                    }
                    write!(f, "x{i}")?;
                }
                writeln!(f, ";{}", j.table().to_hex())
            }
            Self::Poly(p) => {
                f.write_str("poly=")?;
                for (k, m) in p.monomials().iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write_monomial(f, m)?;
                }
                writeln!(f)
            }
            Self::Terms(t) => {
                write!(f, "termfn={};{};", t.terms().len(), t.outer().to_hex())?;
                for (k, term) in t.terms().iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    if term.is_empty() {
                        f.write_str("1")?;
                        continue;
                    }
                    let mut lits: Vec<(usize, bool)> =
                        term.pos.iter().map(|i| (i, false)).chain(term.neg.iter().map(|i| (i, true))).collect();
                    lits.sort();
                    for (l, (i, negated)) in lits.into_iter().enumerate() {
                        if l > 0 {
                            f.write_str("+")?;
                        }
                        write!(f, "{}x{i}", if negated { "!" } else { "" })?;
                    }
                }
                writeln!(f)
            }
            Self::Fourier(g) => {
                writeln!(f, "fourier=")?;
                write!(f, "{g}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, c: &[usize]) -> CoordSet {
        CoordSet::from_coords(n, c.iter().copied()).unwrap()
    }

    #[test]
    fn poly_normalises_duplicates() {
        let p = SparsePoly::new(4, vec![set(4, &[1, 2]), set(4, &[3]), set(4, &[1, 2])]).unwrap();
        assert_eq!(p.monomials(), &[set(4, &[3])]);
        let q = SparsePoly::new(4, vec![set(4, &[2]), set(4, &[]), set(4, &[1, 2])]).unwrap();
        assert_eq!(q.monomials(), &[set(4, &[]), set(4, &[1, 2]), set(4, &[2])]);
    }

    #[test]
    fn term_rejects_repeated_variable() {
        assert!(Term::new(set(3, &[1]), set(3, &[1])).is_err());
    }

    #[test]
    fn evaluation_agrees_across_representations() {
        // x1 x2 ⊕ x3 as a poly, as a junta and as a table.
        let p = ExplicitFunction::Poly(SparsePoly::new(5, vec![set(5, &[1, 2]), set(5, &[3])]).unwrap());
        let inner = TruthTable::from_index_fn(3, |i| ((i & 1) & (i >> 1 & 1)) ^ (i >> 2 & 1) == 1).unwrap();
        let j = ExplicitFunction::Junta(JuntaFn::new(5, vec![1, 2, 3], inner).unwrap());
        assert_eq!(p.to_truth_table().unwrap(), j.to_truth_table().unwrap());
        assert_eq!(p.relevant().unwrap(), set(5, &[1, 2, 3]));
    }

    #[test]
    fn text_round_trip() {
        let n = 6;
        let fs = vec![
            ExplicitFunction::Table(TruthTable::from_index_fn(3, |i| i % 3 == 0).unwrap()),
            ExplicitFunction::Poly(SparsePoly::new(n, vec![set(n, &[]), set(n, &[1, 3])]).unwrap()),
            ExplicitFunction::Poly(SparsePoly::zero(n)),
            ExplicitFunction::Junta(
                JuntaFn::new(n, vec![6, 2], TruthTable::from_index_fn(2, |i| i == 2).unwrap()).unwrap(),
            ),
            ExplicitFunction::Terms(
                TermFunction::dnf(
                    n,
                    vec![
                        Term::new(set(n, &[1]), set(n, &[3])).unwrap(),
                        Term::new(set(n, &[2]), set(n, &[])).unwrap(),
                        Term::empty(n),
                    ],
                )
                .unwrap(),
            ),
        ];
        for f in fs {
            let text = f.to_string();
            let back = ExplicitFunction::parse(&text).unwrap();
            assert_eq!(back, f, "{text}");
            assert_eq!(back.to_string(), text);
        }
        let text = "n=3\npoly=1,x1+x3\n";
        assert_eq!(ExplicitFunction::parse(text).unwrap().to_string(), text);
        let text = "n=4\ntermfn=2;8;x1+!x3,x2\n";
        assert_eq!(ExplicitFunction::parse(text).unwrap().to_string(), text);
    }

    #[test]
    fn parse_errors() {
        assert!(ExplicitFunction::parse("n=2\ntt=f0").is_err());
        assert!(ExplicitFunction::parse("n=2\npoly=x3").is_err());
        assert!(ExplicitFunction::parse("n=2\npoly=x1,x1").is_err());
        assert!(ExplicitFunction::parse("n=2\nbdd=0").is_err());
        assert!(ExplicitFunction::parse("n=3\ntermfn=1;2;x1+!x1").is_err());
    }

    #[test]
    fn table_cap() {
        assert!(matches!(TruthTable::zeros(25), Err(Error::Capability(_))));
    }
}
