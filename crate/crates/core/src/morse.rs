//! Filtered Morse-complex spectral numbers over the rationals.
//!
//! `c_M(a, K) = inf{κ : a ∈ Im ι_κ}` where `ι_κ` includes the homology of the
//! subcomplex generated by critical values ≤ κ.  The infimum is attained at a
//! stored critical value, so the computation is a finite sweep of exact
//! membership tests `a ∈ Z(C^κ) + B(C)`.

use crate::linalg::Mat;
use crate::rat::{fmt_rat, parse_rat, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MorseError {
    #[error("complex data invalid: {0}")]
    Data(String),
    #[error("the chain is not a cycle")]
    NotACycle,
    #[error("the cycle is a boundary (spectral numbers need a nonzero class)")]
    ZeroClass,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub value: Rat,
}

/// Finite chain complex over ℚ with a real-valued filtration by critical
/// values.  The boundary strictly decreases value and drops degree by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationComplex {
    pub generators: Vec<Generator>,
    boundary: Vec<Vec<(usize, Rat)>>,
}

impl FiltrationComplex {
    pub fn new(
        generators: Vec<Generator>,
        boundary_entries: Vec<(usize, usize, Rat)>,
    ) -> Result<Self, MorseError> {
        let n = generators.len();
        let mut boundary = vec![Vec::new(); n];
        for (from, to, coef) in boundary_entries {
            if from >= n || to >= n {
                return Err(MorseError::Data("boundary entry out of range".into()));
            }
            if coef.is_zero() {
                continue;
            }
            if generators[to].degree != generators[from].degree - 1 {
                return Err(MorseError::Data(format!(
                    "∂ must drop degree by one ({} → {})",
                    generators[from].name, generators[to].name
                )));
            }
            if generators[to].value >= generators[from].value {
                return Err(MorseError::Data(format!(
                    "∂ must strictly decrease the filtration value ({} → {})",
                    generators[from].name, generators[to].name
                )));
            }
            boundary[from].push((to, coef));
        }
        let c = FiltrationComplex { generators, boundary };
        // ∂∘∂ = 0
        for g in 0..n {
            let once = c.boundary_of_vec(&[(g, Rat::from_integer(1.into()))]);
            let twice = c.boundary_of_vec(&once);
            if !twice.is_empty() {
                return Err(MorseError::Data(format!(
                    "∂∘∂ ≠ 0 starting from `{}`",
                    c.generators[g].name
                )));
            }
        }
        Ok(c)
    }

    pub fn boundary_of(&self, gen: usize) -> &[(usize, Rat)] {
        &self.boundary[gen]
    }

    pub fn boundary_of_vec(&self, chain: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
        let mut acc: std::collections::BTreeMap<usize, Rat> = Default::default();
        for (g, c) in chain {
            for (to, b) in &self.boundary[*g] {
                let e = acc.entry(*to).or_insert_with(Rat::zero);
                *e += c * b;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    fn degree_indices(&self, degree: i64) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| self.generators[i].degree == degree)
            .collect()
    }

    /// Sorted distinct critical values.
    pub fn thresholds(&self) -> Vec<Rat> {
        let mut vals: Vec<Rat> = self.generators.iter().map(|g| g.value.clone()).collect();
        vals.sort();
        vals.dedup();
        vals
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyClassSpec {
    pub cycle: Vec<(usize, Rat)>,
    pub degree: i64,
}

impl HomologyClassSpec {
    pub fn new(cycle: Vec<(usize, Rat)>, degree: i64) -> Self {
        HomologyClassSpec { cycle, degree }
    }
}

fn dense(indices: &[usize], chain: &[(usize, Rat)]) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); indices.len()];
    for (g, c) in chain {
        if let Some(p) = indices.iter().position(|i| i == g) {
            v[p] = c.clone();
        }
    }
    v
}

/// Least critical value κ with `[a] ∈ Im(H(C^κ) → H(C))`.
///
/// Per threshold this solves `a ∈ Z(C^κ) + ∂(C)` exactly: the columns are a
/// kernel basis of the subcomplex boundary in the cycle's degree together
/// with all boundaries from one degree up.
pub fn spectral_number(
    a: &HomologyClassSpec,
    c: &FiltrationComplex,
) -> Result<Rat, MorseError> {
    let deg = a.degree;
    let deg_idx = c.degree_indices(deg);
    // every named generator must sit in the right degree
    for (g, coef) in &a.cycle {
        if !coef.is_zero() && c.generators[*g].degree != deg {
            return Err(MorseError::Data(format!(
                "cycle touches `{}` of degree {} (expected {})",
                c.generators[*g].name, c.generators[*g].degree, deg
            )));
        }
    }
    if a.cycle.iter().all(|(_, c)| c.is_zero()) {
        return Err(MorseError::ZeroClass);
    }
    if !c.boundary_of_vec(&a.cycle).is_empty() {
        return Err(MorseError::NotACycle);
    }
    let a_vec = dense(&deg_idx, &a.cycle);

    // boundaries from degree + 1 (over the full complex)
    let upper = c.degree_indices(deg + 1);
    let boundary_cols: Vec<Vec<Rat>> = upper
        .iter()
        .map(|&g| dense(&deg_idx, c.boundary_of(g)))
        .collect();

    // reject the zero class
    {
        let cols: Vec<Vec<Rat>> = boundary_cols.clone();
        if !cols.is_empty() && Mat::from_cols(cols).col_span_contains(&a_vec) {
            return Err(MorseError::ZeroClass);
        }
        if boundary_cols.is_empty() && a_vec.iter().all(|x| x.is_zero()) {
            return Err(MorseError::ZeroClass);
        }
    }

    for kappa in c.thresholds() {
        let sub: Vec<usize> = deg_idx
            .iter()
            .copied()
            .filter(|&g| c.generators[g].value <= kappa)
            .collect();
        if sub.is_empty() {
            continue;
        }
        // kernel of ∂ restricted to the subcomplex, in this degree
        let below = c.degree_indices(deg - 1);
        let rows: Vec<Vec<Rat>> = below
            .iter()
            .map(|&b| {
                sub.iter()
                    .map(|&g| {
                        c.boundary_of(g)
                            .iter()
                            .find(|(to, _)| *to == b)
                            .map(|(_, x)| x.clone())
                            .unwrap_or_else(Rat::zero)
                    })
                    .collect()
            })
            .collect();
        let kernel = if below.is_empty() {
            // no boundary targets: everything is a cycle
            (0..sub.len())
                .map(|i| {
                    let mut v = vec![Rat::zero(); sub.len()];
                    v[i] = Rat::from_integer(1.into());
                    v
                })
                .collect::<Vec<_>>()
        } else {
            Mat::from_rows(rows).kernel()
        };
        // embed subcomplex cycles into the full degree coordinates
        let mut cols: Vec<Vec<Rat>> = kernel
            .into_iter()
            .map(|kv| {
                let mut v = vec![Rat::zero(); deg_idx.len()];
                for (slot, &g) in sub.iter().enumerate() {
                    if !kv[slot].is_zero() {
                        let p = deg_idx.iter().position(|&x| x == g).unwrap();
                        v[p] = kv[slot].clone();
                    }
                }
                v
            })
            .collect();
        cols.extend(boundary_cols.iter().cloned());
        if cols.is_empty() {
            continue;
        }
        if Mat::from_cols(cols).col_span_contains(&a_vec) {
            return Ok(kappa);
        }
    }
    Err(MorseError::Data(
        "no threshold reached the class (inconsistent complex)".into(),
    ))
}

/// The complex of `−K`: values negate, degrees reflect through the top
/// dimension, and the boundary transposes.
pub fn negated_complex(c: &FiltrationComplex) -> FiltrationComplex {
    let top = c.generators.iter().map(|g| g.degree).max().unwrap_or(0);
    let generators: Vec<Generator> = c
        .generators
        .iter()
        .map(|g| Generator { name: g.name.clone(), degree: top - g.degree, value: -&g.value })
        .collect();
    let mut entries = Vec::new();
    for (from, row) in c.boundary.iter().enumerate() {
        for (to, coef) in row {
            // a flow line from `from` down to `to` becomes one from `to`
            // down to `from` for the negated function
            entries.push((*to, from, coef.clone()));
        }
    }
    FiltrationComplex::new(generators, entries).expect("negation preserves the axioms")
}

/// `c(a, φ̃^H) = c_M(a, −H)`: spectral number in the negated complex.
/// The cycle is given in the negated complex's coordinates.
pub fn morse_to_spectral(
    a: &HomologyClassSpec,
    h_complex: &FiltrationComplex,
) -> Result<Rat, MorseError> {
    spectral_number(a, &negated_complex(h_complex))
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct ComplexRepr {
    pub generators: Vec<GeneratorRepr>,
    pub boundary: Vec<BoundaryRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct GeneratorRepr {
    pub name: String,
    pub degree: i64,
    pub value: String,
}

#[derive(Serialize, Deserialize)]
pub struct BoundaryRepr {
    pub from: String,
    pub to: String,
    pub coef: String,
}

#[derive(Serialize, Deserialize)]
pub struct CycleRepr {
    pub degree: i64,
    pub terms: Vec<CycleTermRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct CycleTermRepr {
    pub gen: String,
    pub coef: String,
}

pub fn complex_from_json(text: &str) -> Result<FiltrationComplex, MorseError> {
    let repr: ComplexRepr =
        serde_json::from_str(text).map_err(|e| MorseError::Data(format!("bad JSON: {e}")))?;
    let generators: Vec<Generator> = repr
        .generators
        .iter()
        .map(|g| {
            Ok(Generator {
                name: g.name.clone(),
                degree: g.degree,
                value: parse_rat(&g.value).map_err(MorseError::Data)?,
            })
        })
        .collect::<Result<_, MorseError>>()?;
    let names: Vec<&str> = generators.iter().map(|g| g.name.as_str()).collect();
    let find = |n: &str| {
        names
            .iter()
            .position(|x| *x == n)
            .ok_or_else(|| MorseError::UnknownGenerator(n.to_string()))
    };
    let mut entries = Vec::new();
    for b in &repr.boundary {
        entries.push((
            find(&b.from)?,
            find(&b.to)?,
            parse_rat(&b.coef).map_err(MorseError::Data)?,
        ));
    }
    FiltrationComplex::new(generators, entries)
}

pub fn cycle_from_json(
    text: &str,
    c: &FiltrationComplex,
) -> Result<HomologyClassSpec, MorseError> {
    let repr: CycleRepr =
        serde_json::from_str(text).map_err(|e| MorseError::Data(format!("bad JSON: {e}")))?;
    let mut cycle = Vec::new();
    for t in &repr.terms {
        let g = c
            .generator_index(&t.gen)
            .ok_or_else(|| MorseError::UnknownGenerator(t.gen.clone()))?;
        cycle.push((g, parse_rat(&t.coef).map_err(MorseError::Data)?));
    }
    Ok(HomologyClassSpec::new(cycle, repr.degree))
}

pub fn complex_to_json(c: &FiltrationComplex) -> String {
    let repr = ComplexRepr {
        generators: c
            .generators
            .iter()
            .map(|g| GeneratorRepr {
                name: g.name.clone(),
                degree: g.degree,
                value: fmt_rat(&g.value),
            })
            .collect(),
        boundary: (0..c.generators.len())
            .flat_map(|from| {
                c.boundary_of(from)
                    .iter()
                    .map(move |(to, coef)| (from, *to, coef.clone()))
            })
            .map(|(from, to, coef)| BoundaryRepr {
                from: c.generators[from].name.clone(),
                to: c.generators[to].name.clone(),
                coef: fmt_rat(&coef),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&repr).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{perturbed_sphere_complex, s2_height_complex, t2_flat_complex};
    use crate::rat::{rat, rat_i64};

    #[test]
    fn height_sphere() {
        // fundamental class needs the maximum, the point is born at the minimum
        let c = s2_height_complex();
        let top = c.generator_index("max").unwrap();
        let bot = c.generator_index("min").unwrap();
        let m = HomologyClassSpec::new(vec![(top, rat_i64(1))], 2);
        assert_eq!(spectral_number(&m, &c).unwrap(), rat_i64(1));
        let p = HomologyClassSpec::new(vec![(bot, rat_i64(1))], 0);
        assert_eq!(spectral_number(&p, &c).unwrap(), rat_i64(-1));
    }

    #[test]
    fn flat_torus_saddle_class() {
        // degree-1 class supported on the lower saddle is born there
        let c = t2_flat_complex();
        let s1 = c.generator_index("s1").unwrap();
        let a = HomologyClassSpec::new(vec![(s1, rat_i64(1))], 1);
        assert_eq!(spectral_number(&a, &c).unwrap(), rat_i64(1));
    }

    #[test]
    fn perturbed_sphere_needs_higher_max() {
        // two maxima paired through a saddle: [M] is born at the higher one
        let c = perturbed_sphere_complex();
        let m1 = c.generator_index("max1").unwrap();
        let m2 = c.generator_index("max2").unwrap();
        let a = HomologyClassSpec::new(vec![(m1, rat_i64(1)), (m2, rat_i64(1))], 2);
        assert_eq!(spectral_number(&a, &c).unwrap(), rat_i64(2));
        // the point class is born at the minimum
        let min = c.generator_index("min").unwrap();
        let p = HomologyClassSpec::new(vec![(min, rat_i64(1))], 0);
        assert_eq!(spectral_number(&p, &c).unwrap(), rat_i64(0));
    }

    #[test]
    fn rejects_non_cycles_and_boundaries() {
        let c = perturbed_sphere_complex();
        let m1 = c.generator_index("max1").unwrap();
        let bad = HomologyClassSpec::new(vec![(m1, rat_i64(1))], 2);
        assert!(matches!(spectral_number(&bad, &c), Err(MorseError::NotACycle)));
        // the saddle bounds: its class is zero
        let s = c.generator_index("saddle").unwrap();
        let z = HomologyClassSpec::new(vec![(s, rat_i64(1))], 1);
        assert!(matches!(spectral_number(&z, &c), Err(MorseError::ZeroClass)));
        let empty = HomologyClassSpec::new(vec![], 1);
        assert!(matches!(spectral_number(&empty, &c), Err(MorseError::ZeroClass)));
    }

    #[test]
    fn negated_height_swaps_roles() {
        // for the height function, c([M], −H) sits at the former minimum
        let h = s2_height_complex();
        let neg = negated_complex(&h);
        let former_min = neg.generator_index("min").unwrap();
        assert_eq!(neg.generators[former_min].degree, 2);
        assert_eq!(neg.generators[former_min].value, rat_i64(1));
        let a = HomologyClassSpec::new(vec![(former_min, rat_i64(1))], 2);
        assert_eq!(morse_to_spectral(&a, &h).unwrap(), rat_i64(1));
        let former_max = neg.generator_index("max").unwrap();
        let p = HomologyClassSpec::new(vec![(former_max, rat_i64(1))], 0);
        assert_eq!(morse_to_spectral(&p, &h).unwrap(), rat_i64(-1));
    }

    #[test]
    fn filtration_axioms_enforced() {
        // boundary must decrease value
        let gens = vec![
            Generator { name: "a".into(), degree: 1, value: rat_i64(0) },
            Generator { name: "b".into(), degree: 0, value: rat_i64(1) },
        ];
        assert!(FiltrationComplex::new(gens, vec![(0, 1, rat_i64(1))]).is_err());
        // ∂∘∂ = 0
        let gens = vec![
            Generator { name: "a".into(), degree: 2, value: rat_i64(2) },
            Generator { name: "b".into(), degree: 1, value: rat_i64(1) },
            Generator { name: "c".into(), degree: 0, value: rat_i64(0) },
        ];
        assert!(FiltrationComplex::new(
            gens,
            vec![(0, 1, rat_i64(1)), (1, 2, rat_i64(1))]
        )
        .is_err());
    }

    #[test]
    fn ties_enter_together() {
        // equal critical values join the subcomplex at the same threshold
        let gens = vec![
            Generator { name: "p".into(), degree: 0, value: rat(1, 2) },
            Generator { name: "q".into(), degree: 0, value: rat(1, 2) },
        ];
        let c = FiltrationComplex::new(gens, vec![]).unwrap();
        let a = HomologyClassSpec::new(
            vec![(0, rat_i64(1)), (1, rat_i64(1))],
            0,
        );
        assert_eq!(spectral_number(&a, &c).unwrap(), rat(1, 2));
    }
}
