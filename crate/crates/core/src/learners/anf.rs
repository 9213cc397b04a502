//! Algebraic normal form by the binary Möbius transform.

use crate::bits::{Assignment, CoordSet};
use crate::error::{capability, Result};
use crate::function::{SparsePoly, TruthTable};
use crate::learners::fourier::MAX_LEARN_ARITY;
use crate::oracle::Oracle;

/// In-place Möbius transform over F2 on a bit vector of length `2^n`.
fn mobius(bits: &mut [bool]) {
    let size = bits.len();
    let mut h = 1;
    while h < size {
        for i in (0..size).step_by(2 * h) {
            for j in i..i + h {
                bits[j + h] ^= bits[j];
            }
        }
        h *= 2;
    }
}

/// The unique ANF of a table.
pub fn anf_of_table(t: &TruthTable) -> SparsePoly {
    let n = t.arity();
    let mut bits: Vec<bool> = (0..t.size()).map(|i| t.get(i)).collect();
    mobius(&mut bits);
    let monos = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(mask, _)| CoordSet::from_mask(Assignment::from_index(n, mask as u64)));
    SparsePoly::new(n, monos).unwrap()
}

/// Queries all `2^k` points and interpolates.
pub fn anf_exact_learn(f: &dyn Oracle) -> Result<SparsePoly> {
    let k = f.arity();
    if k > MAX_LEARN_ARITY {
        return capability(format!("ANF interpolation limited to {MAX_LEARN_ARITY} coordinates, got {k}"));
    }
    let t = TruthTable::from_fn(k, |x| f.query(x))?;
    Ok(anf_of_table(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::ExplicitFunction;
    use crate::oracle::FunctionOracle;
    use proptest::prelude::*;

    fn learn(n: usize, f: impl FnMut(u64) -> bool) -> SparsePoly {
        let o = FunctionOracle::new(ExplicitFunction::Table(TruthTable::from_index_fn(n, f).unwrap()));
        let p = anf_exact_learn(&o).unwrap();
        assert_eq!(o.queries(), 1 << n);
        p
    }

    fn set(n: usize, c: &[usize]) -> CoordSet {
        CoordSet::from_coords(n, c.iter().copied()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(learn(2, |i| i == 3).monomials(), &[set(2, &[1, 2])]);
        assert_eq!(learn(2, |i| i == 1 || i == 2).monomials(), &[set(2, &[1]), set(2, &[2])]);
        assert_eq!(learn(2, |_| true).monomials(), &[set(2, &[])]);
    }

    #[test]
    fn arity_cap() {
        let o = FunctionOracle::new(ExplicitFunction::Poly(SparsePoly::zero(21)));
        assert!(matches!(anf_exact_learn(&o), Err(crate::Error::Capability(_))));
    }

    proptest! {
        #[test]
        fn table_round_trip(w in any::<[u64; 16]>(), n in 0usize..=10) {
            let t = TruthTable::from_index_fn(n, |i| w[(i / 64) as usize] >> (i % 64) & 1 == 1).unwrap();
            let p = anf_of_table(&t);
            let back = ExplicitFunction::Poly(p.clone()).to_truth_table().unwrap();
            prop_assert_eq!(&back, &t);
            prop_assert_eq!(anf_of_table(&back), p);
        }
    }
}
