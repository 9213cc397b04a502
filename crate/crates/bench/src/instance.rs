//! Random members of each supported class and certified far instances.

use std::fmt;

use boolprop::exact::{
    distance_to_class, AffineParityClass, ClassEnumerator, FourierDegreeClass, JuntaClass, SparsePolyClass,
};
use boolprop::{CoordSet, ExplicitFunction, JuntaFn, Probability, SparsePoly, TruthTable};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::BenchError;

/// Largest arity at which far instances are certified by enumeration.
pub const MAX_CERTIFIED_ARITY: usize = 16;

/// Largest monomial drawn for in-class sparse polynomials without a degree
/// bound.
pub const SPARSE_POLY_MAX_MONOMIAL: usize = 4;

/// Attempts made when perturbing a member into a far instance.
pub const FAR_ATTEMPTS: usize = 16;

/// A class together with the parameters that pick its tester.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ClassSpec {
    Junta { k: usize },
    FourierDegree { d: usize },
    SparsePolyDeg { s: usize, d: usize },
    SparsePoly { s: usize },
    Parity { k: usize },
}

impl ClassSpec {
    pub const NAMES: [&'static str; 5] = ["junta", "fourier-degree", "sparse-poly-deg", "sparse-poly", "parity"];

    /// Builds a spec from a class name and whichever of `k`, `s`, `d` it
    /// needs.
    pub fn from_parts(name: &str, k: Option<usize>, s: Option<usize>, d: Option<usize>) -> Result<Self, BenchError> {
        let need =
            |v: Option<usize>, flag: &str| v.ok_or_else(|| BenchError::Config(format!("class {name} needs --{flag}")));
        Ok(match name {
            "junta" => Self::Junta { k: need(k, "k")? },
            "fourier-degree" => Self::FourierDegree { d: need(d, "d")? },
            "sparse-poly-deg" => Self::SparsePolyDeg { s: need(s, "s")?, d: need(d, "d")? },
            "sparse-poly" => Self::SparsePoly { s: need(s, "s")? },
            "parity" => Self::Parity { k: need(k, "k")? },
            other => {
                return Err(BenchError::Config(format!(
                    "unknown class {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Junta { .. } => "junta",
            Self::FourierDegree { .. } => "fourier-degree",
            Self::SparsePolyDeg { .. } => "sparse-poly-deg",
            Self::SparsePoly { .. } => "sparse-poly",
            Self::Parity { .. } => "parity",
        }
    }

    /// Exact enumerator for distance certificates.
    pub fn enumerator(&self) -> Box<dyn ClassEnumerator> {
        match *self {
            Self::Junta { k } => Box::new(JuntaClass::new(k)),
            Self::FourierDegree { d } => Box::new(FourierDegreeClass { d }),
            Self::SparsePolyDeg { s, d } => Box::new(SparsePolyClass { s, d: Some(d) }),
            Self::SparsePoly { s } => Box::new(SparsePolyClass { s, d: None }),
            Self::Parity { k } => Box::new(AffineParityClass { k }),
        }
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Junta { k } => write!(f, "junta k={k}"),
            Self::FourierDegree { d } => write!(f, "fourier-degree d={d}"),
            Self::SparsePolyDeg { s, d } => write!(f, "sparse-poly-deg s={s} d={d}"),
            Self::SparsePoly { s } => write!(f, "sparse-poly s={s}"),
            Self::Parity { k } => write!(f, "parity k={k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InstanceKind {
    InClass,
    /// Certified at distance at least `gamma` from the class.
    Far {
        gamma: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceSpec {
    pub class: ClassSpec,
    pub n: usize,
    pub kind: InstanceKind,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub function: ExplicitFunction,
    /// Exact distance to the class, present for far instances.
    pub distance: Option<Probability>,
    pub note: String,
}

pub fn to_f64(p: Probability) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

pub fn generate_instance(spec: &InstanceSpec, seed: u64) -> Result<Instance, BenchError> {
    let mut rng = boolprop::Rng::seed_from_u64(seed);
    match spec.kind {
        InstanceKind::InClass => Ok(Instance {
            function: sample_member(spec.class, spec.n, &mut rng)?,
            distance: None,
            note: "in-class sample".into(),
        }),
        InstanceKind::Far { gamma } => {
            if !(gamma > 0.0 && gamma < 0.5) {
                return Err(BenchError::Config(format!("far margin {gamma} outside (0, 1/2)")));
            }
            match spec.class {
                ClassSpec::FourierDegree { d } => far_fourier(spec.n, d, gamma, &mut rng),
                class => far_by_flipping(class, spec.n, gamma, &mut rng),
            }
        }
    }
}

fn distinct_vars(n: usize, k: usize, rng: &mut impl Rng) -> Result<Vec<usize>, BenchError> {
    if k > n {
        return Err(BenchError::Config(format!("need {k} distinct variables but n={n}")));
    }
    let mut v: Vec<usize> = sample(rng, n, k).into_iter().map(|i| i + 1).collect();
    v.sort_unstable();
    Ok(v)
}

fn random_junta(n: usize, k: usize, rng: &mut impl Rng) -> Result<ExplicitFunction, BenchError> {
    let rel = distinct_vars(n, k, rng)?;
    let table = TruthTable::from_index_fn(k, |_| rng.gen())?;
    Ok(ExplicitFunction::Junta(JuntaFn::new(n, rel, table)?))
}

/// Complete decision tree of depth `d`; every root-to-leaf path reads
/// distinct variables.
fn random_tree(n: usize, d: usize, rng: &mut impl Rng) -> Result<ExplicitFunction, BenchError> {
    if d > n {
        return Err(BenchError::Config(format!("depth {d} tree needs n >= {d}")));
    }
    let internal = (1usize << d) - 1;
    let mut var = vec![0usize; internal];
    for node in 0..internal {
        let mut path = Vec::new();
        let mut a = node;
        while a > 0 {
            a = (a - 1) / 2;
            path.push(var[a]);
        }
        var[node] = loop {
            let v = rng.gen_range(1..=n);
            if !path.contains(&v) {
                break v;
            }
        };
    }
    let leaves: Vec<bool> = (0..1usize << d).map(|_| rng.gen()).collect();
    let mut rel = var.clone();
    rel.sort_unstable();
    rel.dedup();
    let table = TruthTable::from_index_fn(rel.len(), |idx| {
        let bit = |v: usize| idx >> rel.binary_search(&v).unwrap() & 1 == 1;
        let mut node = 0;
        for _ in 0..d {
            node = 2 * node + 1 + bit(var[node]) as usize;
        }
        leaves[node - internal]
    })?;
    Ok(ExplicitFunction::Junta(JuntaFn::new(n, rel, table)?))
}

fn random_poly(n: usize, s: usize, max_deg: usize, rng: &mut impl Rng) -> Result<ExplicitFunction, BenchError> {
    let monos = (0..s)
        .map(|_| {
            let size = rng.gen_range(1..=max_deg.min(n).max(1));
            Ok(CoordSet::from_coords(n, distinct_vars(n, size, rng)?)?)
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Ok(ExplicitFunction::Poly(SparsePoly::new(n, monos)?))
}

fn random_parity(n: usize, k: usize, rng: &mut impl Rng) -> Result<ExplicitFunction, BenchError> {
    let rel = distinct_vars(n, k, rng)?;
    let flip: bool = rng.gen();
    let table = TruthTable::from_index_fn(k, |idx| (idx.count_ones() % 2 == 1) != flip)?;
    Ok(ExplicitFunction::Junta(JuntaFn::new(n, rel, table)?))
}

/// A uniform draw from the in-class sampler for `class`.
pub fn sample_member(class: ClassSpec, n: usize, rng: &mut impl Rng) -> Result<ExplicitFunction, BenchError> {
    match class {
        ClassSpec::Junta { k } => random_junta(n, k, rng),
        ClassSpec::FourierDegree { d } => random_tree(n, d, rng),
        ClassSpec::SparsePolyDeg { s, d } => random_poly(n, s, d, rng),
        ClassSpec::SparsePoly { s } => random_poly(n, s, SPARSE_POLY_MAX_MONOMIAL, rng),
        ClassSpec::Parity { k } => random_parity(n, k, rng),
    }
}

fn far_by_flipping(class: ClassSpec, n: usize, gamma: f64, rng: &mut impl Rng) -> Result<Instance, BenchError> {
    if n > MAX_CERTIFIED_ARITY {
        return Err(boolprop::Error::Capability(format!(
            "far instances are certified by enumeration only up to n={MAX_CERTIFIED_ARITY}, got n={n}"
        ))
        .into());
    }
    let enumerator = class.enumerator();
    let size = 1u64 << n;
    let mut seen = Vec::new();
    for attempt in 0..FAR_ATTEMPTS {
        let rho = (gamma * (1.1 + 0.25 * attempt as f64)).min(0.5);
        let mut table = sample_member(class, n, rng)?.to_truth_table()?;
        let flips = ((rho * size as f64).ceil() as usize).min(size as usize);
        for idx in sample(rng, size as usize, flips) {
            let v = table.get(idx as u64);
            table.set(idx as u64, !v);
        }
        let f = ExplicitFunction::Table(table);
        let dist = distance_to_class(&f, enumerator.as_ref())?;
        if to_f64(dist) >= gamma {
            return Ok(Instance {
                function: f,
                distance: Some(dist),
                note: format!("{flips} flipped outputs; exact distance to {} by enumeration", enumerator.describe()),
            });
        }
        seen.push(dist.to_string());
    }
    Err(BenchError::FarBudget(format!(
        "no instance at distance >= {gamma} from {} (n={n}) after {FAR_ATTEMPTS} attempts; distances seen: {}",
        enumerator.describe(),
        seen.join(", ")
    )))
}

/// Parity of `d+1` variables. It depends only on those variables, so its
/// distance to degree-`d` functions equals that of its restriction to them,
/// which is computed by enumeration.
fn far_fourier(n: usize, d: usize, gamma: f64, rng: &mut impl Rng) -> Result<Instance, BenchError> {
    let small = ExplicitFunction::Junta(JuntaFn::new(
        d + 1,
        (1..=d + 1).collect(),
        TruthTable::from_index_fn(d + 1, |idx| idx.count_ones() % 2 == 1)?,
    )?);
    let dist = distance_to_class(&small, &FourierDegreeClass { d })?;
    if to_f64(dist) < gamma {
        return Err(BenchError::FarBudget(format!(
            "parity of {} variables is only {dist}-far from degree {d}, below {gamma}",
            d + 1
        )));
    }
    Ok(Instance {
        function: random_parity(n, d + 1, rng)?,
        distance: Some(dist),
        note: format!("parity of {} variables; distance of its restriction to them, by enumeration", d + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use boolprop::exact::fourier_degree;
    use boolprop::learners::anf_of_table;

    #[test]
    fn members_lie_in_their_class() {
        for seed in 0..50 {
            let mut rng = boolprop::Rng::seed_from_u64(seed);
            let j = sample_member(ClassSpec::Junta { k: 2 }, 10, &mut rng).unwrap();
            assert!(j.relevant().unwrap().len() <= 2);
            let t = sample_member(ClassSpec::FourierDegree { d: 2 }, 8, &mut rng).unwrap();
            assert!(fourier_degree(&t.to_truth_table().unwrap()) <= 2);
            let p = sample_member(ClassSpec::SparsePolyDeg { s: 2, d: 2 }, 9, &mut rng).unwrap();
            let anf = anf_of_table(&p.to_truth_table().unwrap());
            assert!(anf.sparsity() <= 2 && anf.degree() <= 2);
            let x = sample_member(ClassSpec::Parity { k: 3 }, 7, &mut rng).unwrap();
            let anf = anf_of_table(&x.to_truth_table().unwrap());
            assert!(anf.degree() <= 1 && anf.sparsity() <= 4);
        }
    }

    #[test]
    fn far_instance_carries_certificate() {
        let spec = InstanceSpec { class: ClassSpec::Junta { k: 1 }, n: 10, kind: InstanceKind::Far { gamma: 0.1 } };
        let inst = generate_instance(&spec, 4).unwrap();
        let d = inst.distance.unwrap();
        assert!(to_f64(d) >= 0.1);
        assert_eq!(distance_to_class(&inst.function, &JuntaClass::new(1)).unwrap(), d);
    }

    #[test]
    fn far_fourier_is_parity() {
        let spec =
            InstanceSpec { class: ClassSpec::FourierDegree { d: 2 }, n: 12, kind: InstanceKind::Far { gamma: 0.4 } };
        let inst = generate_instance(&spec, 1).unwrap();
        assert_eq!(inst.distance, Some(Probability::new(1, 2)));
        assert_eq!(inst.function.relevant().unwrap().len(), 3);
    }

    #[test]
    fn unreachable_margin_reports_budget() {
        let spec = InstanceSpec { class: ClassSpec::Junta { k: 3 }, n: 4, kind: InstanceKind::Far { gamma: 0.49 } };
        let err = generate_instance(&spec, 0).unwrap_err();
        assert!(matches!(err, BenchError::FarBudget(_)), "{err}");
        let big = InstanceSpec { class: ClassSpec::Junta { k: 1 }, n: 20, kind: InstanceKind::Far { gamma: 0.1 } };
        assert!(generate_instance(&big, 0).unwrap_err().is_capability());
    }
}
