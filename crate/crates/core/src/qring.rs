//! Small quantum homology `QH_ev(M) = H_ev(M) ⊗ Λ`.
//!
//! A manifold is a finite table: graded even basis, classical intersection
//! structure constants, an `H₂` lattice carrying the `ω` and `c₁` functionals,
//! and a 3-point Gromov–Witten table indexed by lattice classes.  The quantum
//! product is the classical product (the `β = 0` contribution) plus the
//! table-driven correction
//!
//! `a*b = a∩b + Σ ⟨a,b,ξₖ⟩_β · ξₖ^{*M} ⊗ q^{−c₁(β)} t^{−ω(β)}`,
//!
//! extended Λ-bilinearly.  Dual classes are solved from the intersection
//! pairing, never supplied as input.

use crate::linalg::{in_span, span_basis, Mat};
use crate::novikov::{NovikovScalar, Valuation};
use crate::rat::{fmt_rat, parse_rat, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QringError {
    #[error("manifold data invalid: {0}")]
    Data(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("inversion precondition violated: {0}")]
    InversionPrecondition(String),
    #[error("{0}")]
    Novikov(#[from] crate::novikov::NovikovError),
}

pub type SparseVec = Vec<(usize, Rat)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisClass {
    pub name: String,
    pub degree: u32,
}

/// Minimal Chern number: gcd of `c₁` over the lattice, or ∞ when `c₁ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChernNumber {
    Finite(u64),
    Infinite,
}

impl fmt::Display for ChernNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChernNumber::Finite(n) => write!(f, "{n}"),
            ChernNumber::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwEntry {
    pub beta: Vec<i64>,
    /// Canonically sorted basis indices (the table is fully symmetric).
    pub classes: [usize; 3],
    pub value: Rat,
}

#[derive(Debug, Clone)]
pub struct ManifoldData {
    pub name: String,
    pub n: u32,
    pub basis: Vec<BasisClass>,
    classical: BTreeMap<(usize, usize), SparseVec>,
    pub h2_rank: usize,
    pub omega_vec: Vec<Rat>,
    pub c1_vec: Vec<i64>,
    /// Degree-2 basis class realizing each lattice generator, when available.
    pub h2_classes: Option<Vec<usize>>,
    /// Divisor Poincaré dual to `[ω]`, when bundled.
    pub omega_dual: Option<SparseVec>,
    pub gw: Vec<GwEntry>,
    unit: usize,
    point: usize,
    duals: Vec<Vec<Rat>>,
}

impl ManifoldData {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        n: u32,
        basis: Vec<BasisClass>,
        classical_entries: Vec<(usize, usize, SparseVec)>,
        h2_rank: usize,
        omega_vec: Vec<Rat>,
        c1_vec: Vec<i64>,
        h2_classes: Option<Vec<usize>>,
        omega_dual: Option<SparseVec>,
        gw_entries: Vec<(Vec<i64>, [usize; 3], Rat)>,
    ) -> Result<Self, QringError> {
        let name = name.into();
        let err = |m: String| QringError::Data(m);
        let dim = 2 * n;
        if basis.is_empty() {
            return Err(err("empty basis".into()));
        }
        for b in &basis {
            if b.degree % 2 != 0 {
                return Err(err(format!("class `{}` has odd degree {}", b.name, b.degree)));
            }
            if b.degree > dim {
                return Err(err(format!("class `{}` has degree above 2n", b.name)));
            }
        }
        let units: Vec<usize> =
            (0..basis.len()).filter(|&i| basis[i].degree == dim).collect();
        let points: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].degree == 0).collect();
        let [unit] = units.as_slice() else {
            return Err(err("need exactly one class of degree 2n (the unit)".into()));
        };
        let [point] = points.as_slice() else {
            return Err(err("need exactly one class of degree 0 (the point)".into()));
        };
        let (unit, point) = (*unit, *point);

        let mut classical: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (i, j, vec) in classical_entries {
            if i >= basis.len() || j >= basis.len() {
                return Err(err("classical entry has bad class index".into()));
            }
            let want = basis[i].degree as i64 + basis[j].degree as i64 - dim as i64;
            let mut vec = vec;
            vec.retain(|(_, c)| !c.is_zero());
            vec.sort_by_key(|(k, _)| *k);
            for (k, _) in &vec {
                if *k >= basis.len() {
                    return Err(err("classical entry has bad result index".into()));
                }
                if basis[*k].degree as i64 != want {
                    return Err(err(format!(
                        "classical product {}∩{} violates grading",
                        basis[i].name, basis[j].name
                    )));
                }
            }
            if want < 0 && !vec.is_empty() {
                return Err(err("nonzero classical product below degree 0".into()));
            }
            for key in [(i, j), (j, i)] {
                if let Some(prev) = classical.get(&key) {
                    if prev != &vec {
                        return Err(err(format!(
                            "classical table not symmetric at ({}, {})",
                            basis[i].name, basis[j].name
                        )));
                    }
                } else {
                    classical.insert(key, vec.clone());
                }
            }
        }
        // unit acts as identity
        for j in 0..basis.len() {
            let row = classical.get(&(unit, j)).cloned().unwrap_or_default();
            let expect = vec![(j, Rat::one())];
            if row != expect {
                return Err(err(format!(
                    "unit row must be the identity (at `{}`)",
                    basis[j].name
                )));
            }
        }

        if omega_vec.len() != h2_rank || c1_vec.len() != h2_rank {
            return Err(err("omega_vec/c1_vec length must equal h2_rank".into()));
        }
        if let Some(hc) = &h2_classes {
            if hc.len() != h2_rank {
                return Err(err("h2_classes length must equal h2_rank".into()));
            }
            for &i in hc {
                if i >= basis.len() || basis[i].degree != 2 {
                    return Err(err("h2_classes must point at degree-2 classes".into()));
                }
            }
        }

        let mut gw: Vec<GwEntry> = Vec::new();
        for (beta, classes, value) in gw_entries {
            if beta.len() != h2_rank {
                return Err(err("gw beta has wrong lattice rank".into()));
            }
            if beta.iter().all(|&x| x == 0) {
                return Err(err("gw beta must be nonzero".into()));
            }
            if value.is_zero() {
                continue;
            }
            let mut cl = classes;
            cl.sort_unstable();
            if cl[2] >= basis.len() {
                return Err(err("gw entry has bad class index".into()));
            }
            let omega_beta: Rat = beta
                .iter()
                .zip(&omega_vec)
                .map(|(b, w)| Rat::from_integer((*b).into()) * w)
                .sum();
            if !omega_beta.is_positive() {
                return Err(err(format!(
                    "gw class with ω(β) = {} ≤ 0 (positivity of energy)",
                    fmt_rat(&omega_beta)
                )));
            }
            if let Some(prev) = gw.iter().find(|e| e.beta == beta && e.classes == cl) {
                if prev.value != value {
                    return Err(err("conflicting symmetric gw entries".into()));
                }
                continue;
            }
            gw.push(GwEntry { beta, classes: cl, value });
        }

        // intersection pairing and duals
        let msize = basis.len();
        let mut pairing = Mat::zero(msize, msize);
        for i in 0..msize {
            for j in 0..msize {
                if basis[i].degree + basis[j].degree == dim {
                    if let Some(vec) = classical.get(&(i, j)) {
                        for (k, c) in vec {
                            if *k == point {
                                pairing[(i, j)] = c.clone();
                            }
                        }
                    }
                }
            }
        }
        let duals_mat = pairing
            .inverse()
            .ok_or_else(|| err("intersection pairing is not perfect".into()))?;
        let duals: Vec<Vec<Rat>> =
            (0..msize).map(|k| (0..msize).map(|l| duals_mat[(k, l)].clone()).collect()).collect();

        let m = ManifoldData {
            name,
            n,
            basis,
            classical,
            h2_rank,
            omega_vec,
            c1_vec,
            h2_classes,
            omega_dual,
            gw,
            unit,
            point,
            duals,
        };
        Ok(m)
    }

    pub fn dim(&self) -> u32 {
        2 * self.n
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn point_index(&self) -> usize {
        self.point
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// `ξₖ^{*M}` over the basis.
    pub fn dual(&self, k: usize) -> &[Rat] {
        &self.duals[k]
    }

    pub fn classical_entry(&self, i: usize, j: usize) -> &[(usize, Rat)] {
        self.classical.get(&(i, j)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Intersection number of complementary-degree classes (0 otherwise).
    pub fn pairing_number(&self, i: usize, j: usize) -> Rat {
        if self.basis[i].degree + self.basis[j].degree != self.dim() {
            return Rat::zero();
        }
        self.classical_entry(i, j)
            .iter()
            .find(|(k, _)| *k == self.point)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn c1_of(&self, beta: &[i64]) -> i64 {
        beta.iter().zip(&self.c1_vec).map(|(b, c)| b * c).sum()
    }

    pub fn omega_of(&self, beta: &[i64]) -> Rat {
        beta.iter()
            .zip(&self.omega_vec)
            .map(|(b, w)| Rat::from_integer((*b).into()) * w)
            .sum()
    }

    pub fn gw_value(&self, beta: &[i64], mut classes: [usize; 3]) -> Rat {
        classes.sort_unstable();
        self.gw
            .iter()
            .find(|e| e.beta == beta && e.classes == classes)
            .map(|e| e.value.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Smallest positive value of `c₁` on the lattice; ∞ when `c₁ = 0`.
    pub fn minimal_chern(&self) -> ChernNumber {
        let mut g: u64 = 0;
        for &c in &self.c1_vec {
            g = g.gcd(&c.unsigned_abs());
        }
        if g == 0 {
            ChernNumber::Infinite
        } else {
            ChernNumber::Finite(g)
        }
    }

    /// Minimal energy `ω(β)` over classes in the table; `None` means ∞.
    pub fn minimal_energy(&self) -> Option<Rat> {
        self.gw.iter().map(|e| self.omega_of(&e.beta)).min()
    }

    /// Some 3-point invariant `⟨pt, ·, ·⟩_β ≠ 0` with `β ≠ 0`.
    pub fn is_strongly_uniruled(&self) -> bool {
        self.gw.iter().any(|e| e.classes.contains(&self.point))
    }

    /// Does `ω` vanish on the (spherical) lattice?
    pub fn omega_zero_on_lattice(&self) -> bool {
        self.h2_rank == 0
    }

    /// `c₁ = κ·ω` on the lattice for a single rational κ, if so.
    pub fn monotonicity_constant(&self) -> Option<Rat> {
        let mut kappa: Option<Rat> = None;
        for (c, w) in self.c1_vec.iter().zip(&self.omega_vec) {
            let c = Rat::from_integer((*c).into());
            if w.is_zero() {
                if !c.is_zero() {
                    return None;
                }
                continue;
            }
            let k = c / w;
            match &kappa {
                None => kappa = Some(k),
                Some(prev) if *prev == k => {}
                Some(_) => return None,
            }
        }
        kappa
    }
}

// ---------------------------------------------------------------------------
// Quantum module elements
// ---------------------------------------------------------------------------

/// Sparse sum of `(basis class, q-power) → Λ-scalar` terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QElement {
    terms: BTreeMap<(usize, i64), NovikovScalar>,
}

impl QElement {
    pub fn zero() -> Self {
        QElement::default()
    }

    pub fn unit(m: &ManifoldData) -> Self {
        Self::from_term(m.unit_index(), 0, NovikovScalar::one())
    }

    pub fn from_term(class: usize, qpow: i64, scalar: NovikovScalar) -> Self {
        let mut e = QElement::default();
        e.add_term(class, qpow, scalar);
        e
    }

    pub fn from_class(class: usize) -> Self {
        Self::from_term(class, 0, NovikovScalar::one())
    }

    pub fn add_term(&mut self, class: usize, qpow: i64, scalar: NovikovScalar) {
        if scalar.is_zero() {
            return;
        }
        let entry = self.terms.entry((class, qpow)).or_insert_with(NovikovScalar::zero);
        *entry = entry.add(&scalar);
        if entry.is_zero() {
            self.terms.remove(&(class, qpow));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, i64), &NovikovScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, class: usize, qpow: i64) -> NovikovScalar {
        self.terms.get(&(class, qpow)).cloned().unwrap_or_else(NovikovScalar::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((c, d), s) in &other.terms {
            out.add_term(*c, *d, s.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        QElement {
            terms: self.terms.iter().map(|(k, s)| (*k, s.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &NovikovScalar) -> Self {
        let mut out = QElement::default();
        for ((c, d), t) in &self.terms {
            out.add_term(*c, *d, t.mul(s));
        }
        out
    }

    /// Max of `ν` over the term scalars; `Bottom` for zero.
    pub fn nu(&self) -> Valuation {
        self.terms
            .values()
            .map(|s| s.nu())
            .max()
            .unwrap_or(Valuation::Bottom)
    }

    /// Degree of every term if homogeneous (q counts as degree 2).
    pub fn homogeneous_degree(&self, m: &ManifoldData) -> Option<i64> {
        let mut deg = None;
        for (c, d) in self.terms.keys() {
            let td = m.basis[*c].degree as i64 + 2 * d;
            match deg {
                None => deg = Some(td),
                Some(x) if x == td => {}
                Some(_) => return None,
            }
        }
        deg
    }

    /// Split off the fundamental-class component at q-power 0:
    /// `u = 1⊗λ + rest`.
    pub fn decompose_unit(&self, m: &ManifoldData) -> (NovikovScalar, QElement) {
        let key = (m.unit_index(), 0);
        let lambda = self.coefficient(key.0, key.1);
        let mut rest = self.clone();
        rest.terms.remove(&key);
        (lambda, rest)
    }

    /// Is the element supported in basis degrees < 2n?
    pub fn in_q_minus(&self, m: &ManifoldData) -> bool {
        self.terms.keys().all(|(c, _)| m.basis[*c].degree < m.dim())
    }

    pub fn render(&self, m: &ManifoldData) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|((c, d), s)| {
                let q = match d {
                    0 => String::new(),
                    1 => "⊗q".into(),
                    _ => format!("⊗q^{d}"),
                };
                format!("{}{} ({})", m.basis[*c].name, q, s)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Classical intersection product, extended Λ-bilinearly.
pub fn classical_product(a: &QElement, b: &QElement, m: &ManifoldData) -> QElement {
    let mut out = QElement::default();
    for ((i, di), si) in a.terms() {
        for ((j, dj), sj) in b.terms() {
            let s = si.mul(sj);
            if s.is_zero() {
                continue;
            }
            for (k, c) in m.classical_entry(*i, *j) {
                out.add_term(*k, di + dj, s.scale(c));
            }
        }
    }
    out
}

/// The quantum product of Λ-module elements.
pub fn quantum_product(a: &QElement, b: &QElement, m: &ManifoldData) -> QElement {
    let mut out = classical_product(a, b, m);
    if m.gw.is_empty() {
        return out;
    }
    for ((i, di), si) in a.terms() {
        for ((j, dj), sj) in b.terms() {
            let s = si.mul(sj);
            if s.is_zero() {
                continue;
            }
            for entry in &m.gw {
                // ways the unordered triple {i, j, k} matches this entry
                for k in 0..m.basis.len() {
                    let mut tri = [*i, *j, k];
                    tri.sort_unstable();
                    if tri != entry.classes {
                        continue;
                    }
                    let c1 = m.c1_of(&entry.beta);
                    let omega = m.omega_of(&entry.beta);
                    let shifted = s.mul_monomial(&entry.value, &(-omega));
                    for (l, dual_c) in m.dual(k).iter().enumerate() {
                        if dual_c.is_zero() {
                            continue;
                        }
                        out.add_term(l, di + dj - c1, shifted.scale(dual_c));
                    }
                }
            }
        }
    }
    out
}

/// k-fold quantum product (k ≥ 1); `k = 0` gives the unit.
pub fn quantum_power(a: &QElement, k: u32, m: &ManifoldData) -> QElement {
    let mut acc = QElement::unit(m);
    for _ in 0..k {
        acc = quantum_product(&acc, a, m);
    }
    acc
}

/// Result of probing nilpotence by power iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Nilpotence {
    /// `x^order = 0` exactly, `x^{order−1} ≠ 0`.
    Nilpotent { order: u32 },
    /// Power pattern repeats up to a scalar, so no power ever vanishes.
    NotNilpotent { period_base: u32 },
    /// Iteration stopped without a certificate (truncation or cap).
    Inconclusive,
}

impl Nilpotence {
    pub fn is_nilpotent(&self) -> bool {
        matches!(self, Nilpotence::Nilpotent { .. })
    }

    pub fn order(&self) -> Option<u32> {
        match self {
            Nilpotence::Nilpotent { order } => Some(*order),
            _ => None,
        }
    }
}

/// Probe quantum-nilpotence of `x` (supported in degrees < 2n).
///
/// Powers are computed exactly; the loop stops at a zero power, at a
/// scalar-recurrence `x^{a+p} = μ·x^a` (which certifies that no power
/// vanishes), or at a step cap.
pub fn nilpotency_test(x: &QElement, m: &ManifoldData, max_steps: u32) -> Nilpotence {
    if x.is_zero() {
        return Nilpotence::Nilpotent { order: 1 };
    }
    let mut powers: Vec<QElement> = vec![x.clone()];
    for step in 2..=max_steps {
        let next = quantum_product(powers.last().unwrap(), x, m);
        if next.is_zero() {
            return Nilpotence::Nilpotent { order: step };
        }
        for (idx, prev) in powers.iter().enumerate() {
            if let Some(_mu) = scalar_ratio(&next, prev) {
                return Nilpotence::NotNilpotent { period_base: idx as u32 + 1 };
            }
        }
        powers.push(next);
    }
    Nilpotence::Inconclusive
}

/// If `a = μ·q^Δ·b` for a single Λ-monomial μ and a uniform q-shift Δ,
/// return μ.  Powers of a fixed-degree element drop in degree, so the
/// q-shift is what makes repeated patterns visible.
pub fn scalar_ratio(a: &QElement, b: &QElement) -> Option<NovikovScalar> {
    if a.is_zero() || b.is_zero() {
        return None;
    }
    if a.terms.len() != b.terms.len() {
        return None;
    }
    let qshift = {
        let (ca, da) = a.terms.keys().next()?;
        let (cb, db) = b
            .terms
            .keys()
            .find(|(cb, _)| cb == ca)
            .map(|(c, d)| (c, d))?;
        debug_assert_eq!(ca, cb);
        da - db
    };
    let mut ratio: Option<(Rat, Rat)> = None; // (exponent shift, coefficient factor)
    for ((ca, da), sa) in a.terms() {
        let sb = b.terms.get(&(*ca, da - qshift))?;
        if sa.terms().len() != sb.terms().len() {
            return None;
        }
        for ((ea, ra), (eb, rb)) in sa.terms().iter().zip(sb.terms().iter()) {
            let shift = ea - eb;
            let factor = ra / rb;
            match &ratio {
                None => ratio = Some((shift, factor)),
                Some((s, f)) if *s == shift && *f == factor => {}
                Some(_) => return None,
            }
        }
    }
    ratio.map(|(shift, factor)| NovikovScalar::monomial(factor, shift))
}

/// Invert `u = 1⊗λ + y` with λ ≠ 0 and `y` in degrees < 2n.
///
/// Nilpotent `y` gives a finite geometric sum.  With `ν(λ) ≥ ν(y)` the
/// series converges by the energy gap and is summed until everything new
/// falls at or below the floor.  Degree-2n homogeneous units outside both
/// regimes (they do occur) fall back to an exact linear solve on the
/// top-degree slice.
pub fn invert_unit(
    u: &QElement,
    m: &ManifoldData,
    floor: &Rat,
) -> Result<QElement, QringError> {
    let (lambda, y) = u.decompose_unit(m);
    let slice_fallback = |reason: &str| -> Result<QElement, QringError> {
        match crate::slice::invert_homogeneous(u, m, floor) {
            Ok(v) => Ok(v),
            Err(_) => Err(QringError::InversionPrecondition(reason.to_string())),
        }
    };

    if lambda.is_zero() {
        return slice_fallback("unit coefficient is zero");
    }
    if !y.in_q_minus(m) {
        return slice_fallback("lower part not supported in degrees < 2n");
    }

    let inv = if y.is_zero() {
        let li = invert_scalar_to(&lambda, floor)?;
        Some(QElement::from_term(m.unit_index(), 0, li))
    } else {
        let nil = nilpotency_test(&y, m, power_step_cap(m));
        if let Some(order) = nil.order() {
            // u⁻¹ = Σ_{j<order} (−1)^j λ^{−(j+1)} y^j
            let li = invert_scalar_to(&lambda, floor)?;
            let mut acc = QElement::zero();
            let mut ypow = QElement::unit(m);
            let mut lpow = li.clone();
            let mut sign = Rat::one();
            for j in 0..order {
                acc = acc.add(&ypow.scale(&lpow.scale(&sign)));
                if j + 1 < order {
                    ypow = quantum_product(&ypow, &y, m);
                    lpow = lpow.mul(&li);
                    sign = -sign;
                }
            }
            Some(acc)
        } else if lambda.nu() >= y.nu() {
            // geometric series; ν((λ⁻¹y)^j) → −∞ by the energy gap
            let li = invert_scalar_to(&lambda, floor)?;
            let z = y.scale(&li);
            let mut acc = QElement::from_term(m.unit_index(), 0, li.clone());
            let mut term = QElement::from_term(m.unit_index(), 0, li);
            let mut steps = 0u32;
            loop {
                term = quantum_product(&term, &z, m).neg();
                term = truncate_element(&term, floor);
                if term.is_zero() {
                    break;
                }
                acc = acc.add(&term);
                steps += 1;
                if steps > 100_000 {
                    return Err(QringError::InversionPrecondition(
                        "geometric series made no progress (no energy gap?)".into(),
                    ));
                }
            }
            Some(acc)
        } else {
            None
        }
    };

    let inv = match inv {
        Some(v) => v,
        None => {
            return slice_fallback(
                "ν(λ) < ν(y) and y is not nilpotent (series diverges)",
            )
        }
    };
    verify_inverse(u, &inv, m)?;
    Ok(inv)
}

pub(crate) fn power_step_cap(m: &ManifoldData) -> u32 {
    4 * (m.n + 1) + 2 * m.basis.len() as u32 + 8
}

pub(crate) fn invert_scalar_to(
    s: &NovikovScalar,
    floor: &Rat,
) -> Result<NovikovScalar, QringError> {
    if s.as_monomial().is_some() {
        return Ok(s.invert()?);
    }
    let t = s.truncate(floor)?;
    Ok(t.invert()?)
}

pub fn truncate_element(u: &QElement, floor: &Rat) -> QElement {
    let mut out = QElement::default();
    for ((c, d), s) in u.terms() {
        if let Ok(t) = s.truncate(floor) {
            out.add_term(*c, *d, t);
        } else {
            out.add_term(*c, *d, s.clone());
        }
    }
    out
}

pub(crate) fn verify_inverse(
    u: &QElement,
    inv: &QElement,
    m: &ManifoldData,
) -> Result<(), QringError> {
    let prod = quantum_product(u, inv, m);
    let diff = prod.sub(&QElement::unit(m));
    if diff.is_zero() {
        Ok(())
    } else {
        Err(QringError::NotInvertible(format!(
            "inverse check failed, residual {}",
            diff.render(m)
        )))
    }
}

/// Is `Q₋` (degrees < 2n) an ideal under the quantum product?
///
/// Checked by scanning all products of a sub-top class against the basis for
/// a fundamental-class component.  Cross-checked against the strongly-uniruled
/// scan, which must agree.
pub fn qminus_ideal_check(m: &ManifoldData) -> bool {
    let mut ideal = true;
    'outer: for i in 0..m.basis.len() {
        if m.basis[i].degree == m.dim() {
            continue;
        }
        for j in 0..m.basis.len() {
            let p = quantum_product(&QElement::from_class(i), &QElement::from_class(j), m);
            let has_unit = p.terms().any(|((c, _), _)| *c == m.unit_index());
            if has_unit {
                ideal = false;
                break 'outer;
            }
        }
    }
    debug_assert_eq!(
        ideal,
        !m.is_strongly_uniruled(),
        "Q₋-ideal scan must agree with the uniruledness of the table"
    );
    ideal
}

/// Verdict of the divisor-subring condition for the canonical complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionD {
    pub holds: bool,
    pub divisor_subring_dim: usize,
    pub complement_dim: usize,
    pub reason: Option<String>,
}

/// Decide the divisor-subring condition for a caller-supplied complement, or
/// for the canonical candidate (the pairing-orthogonal complement of the
/// divisor subring).  A failure verdict is relative to that candidate only.
pub fn condition_d_check(
    m: &ManifoldData,
    complement: Option<Vec<Vec<Rat>>>,
) -> Result<ConditionD, QringError> {
    let msize = m.basis.len();
    // Divisor subring: span of unit + degree-(2n−2) classes, closed under ∩.
    let mut gens: Vec<Vec<Rat>> = Vec::new();
    let mut unit_vec = vec![Rat::zero(); msize];
    unit_vec[m.unit_index()] = Rat::one();
    gens.push(unit_vec);
    for i in 0..msize {
        if m.basis[i].degree == m.dim() - 2 {
            let mut v = vec![Rat::zero(); msize];
            v[i] = Rat::one();
            gens.push(v);
        }
    }
    let mut d_basis = span_basis(gens);
    loop {
        let mut new_vecs = Vec::new();
        for a in &d_basis {
            for b in &d_basis {
                let p = sparse_classical(a, b, m);
                if !p.iter().all(|x| x.is_zero()) && !in_span(&d_basis, &p) {
                    new_vecs.push(p);
                }
            }
        }
        if new_vecs.is_empty() {
            break;
        }
        let mut all = d_basis.clone();
        all.extend(new_vecs);
        d_basis = span_basis(all);
    }

    let v_basis = match complement {
        Some(v) => v,
        None => {
            // canonical candidate: pairing-orthogonal complement of D
            let mut rows = Vec::new();
            for d in &d_basis {
                rows.push(
                    (0..msize)
                        .map(|j| {
                            let mut acc = Rat::zero();
                            for (i, c) in d.iter().enumerate() {
                                if !c.is_zero() {
                                    acc += c * &m.pairing_number(i, j);
                                }
                            }
                            acc
                        })
                        .collect::<Vec<_>>(),
                );
            }
            Mat::from_rows(rows).kernel()
        }
    };

    // complement must be additive: D ⊕ V = H_ev
    let mut all = d_basis.clone();
    all.extend(v_basis.iter().cloned());
    let total = span_basis(all).len();
    if total != msize || d_basis.len() + v_basis.len() != msize {
        return Err(QringError::Data(format!(
            "candidate V is not a complement of the divisor subring (dim D = {}, dim V = {}, need sum {})",
            d_basis.len(),
            v_basis.len(),
            msize
        )));
    }

    // (a) d ∩ v = 0
    for d in &d_basis {
        for v in &v_basis {
            let p = sparse_classical(d, v, m);
            if !p.iter().all(|x| x.is_zero()) {
                return Ok(ConditionD {
                    holds: false,
                    divisor_subring_dim: d_basis.len(),
                    complement_dim: v_basis.len(),
                    reason: Some("a divisor-subring class has nonzero intersection with the complement".into()),
                });
            }
        }
    }

    // (b) two-point invariants ⟨d, v⟩_β vanish, tested through the divisor
    // axiom ⟨d, v, H⟩_β = (β·H)⟨d, v⟩_β.
    if !m.gw.is_empty() && !v_basis.is_empty() {
        let betas: Vec<Vec<i64>> = {
            let mut bs: Vec<Vec<i64>> = m.gw.iter().map(|e| e.beta.clone()).collect();
            bs.sort();
            bs.dedup();
            bs
        };
        for beta in &betas {
            let divisor = (0..msize)
                .filter(|&h| m.basis[h].degree == m.dim() - 2)
                .find(|&h| !beta_dot_divisor(m, beta, h).map_or(true, |x| x.is_zero()));
            let Some(h) = divisor else {
                return Ok(ConditionD {
                    holds: false,
                    divisor_subring_dim: d_basis.len(),
                    complement_dim: v_basis.len(),
                    reason: Some(format!(
                        "no divisor pairs nontrivially with lattice class {:?}; clause (b) unverifiable",
                        beta
                    )),
                });
            };
            for d in &d_basis {
                for v in &v_basis {
                    let mut acc = Rat::zero();
                    for (i, ci) in d.iter().enumerate() {
                        if ci.is_zero() {
                            continue;
                        }
                        for (j, cj) in v.iter().enumerate() {
                            if cj.is_zero() {
                                continue;
                            }
                            acc += ci * cj * &m.gw_value(beta, [i, j, h]);
                        }
                    }
                    if !acc.is_zero() {
                        return Ok(ConditionD {
                            holds: false,
                            divisor_subring_dim: d_basis.len(),
                            complement_dim: v_basis.len(),
                            reason: Some(
                                "a two-point invariant against the complement is nonzero".into(),
                            ),
                        });
                    }
                }
            }
        }
    }

    Ok(ConditionD {
        holds: true,
        divisor_subring_dim: d_basis.len(),
        complement_dim: v_basis.len(),
        reason: None,
    })
}

/// Pairing of a lattice class against a degree-(2n−2) basis divisor, when the
/// lattice generators are identified with degree-2 classes.
pub fn beta_dot_divisor(m: &ManifoldData, beta: &[i64], divisor: usize) -> Option<Rat> {
    let hc = m.h2_classes.as_ref()?;
    let mut acc = Rat::zero();
    for (b, &gi) in beta.iter().zip(hc) {
        if *b == 0 {
            continue;
        }
        acc += Rat::from_integer((*b).into()) * m.pairing_number(gi, divisor);
    }
    Some(acc)
}

fn sparse_classical(a: &[Rat], b: &[Rat], m: &ManifoldData) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); m.basis.len()];
    for (i, ci) in a.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for (j, cj) in b.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            for (k, c) in m.classical_entry(i, j) {
                out[*k] += ci * cj * c;
            }
        }
    }
    out
}

/// Poincaré dual of `[ω]` as a divisor vector: either bundled, or solved from
/// `h·gᵢ = ω(gᵢ)` over the identified lattice generators.
pub fn omega_dual_divisor(m: &ManifoldData) -> Result<Vec<Rat>, QringError> {
    if let Some(sv) = &m.omega_dual {
        let mut v = vec![Rat::zero(); m.basis.len()];
        for (i, c) in sv {
            v[*i] = c.clone();
        }
        return Ok(v);
    }
    let hc = m.h2_classes.as_ref().ok_or_else(|| {
        QringError::Data("need h2_classes or omega_dual to locate the ω-dual divisor".into())
    })?;
    let divisors: Vec<usize> =
        (0..m.basis.len()).filter(|&i| m.basis[i].degree == m.dim() - 2).collect();
    let rows: Vec<Vec<Rat>> = hc
        .iter()
        .map(|&g| divisors.iter().map(|&d| m.pairing_number(g, d)).collect())
        .collect();
    let rhs: Vec<Rat> = m.omega_vec.clone();
    let sol = Mat::from_rows(rows)
        .solve(&rhs)
        .ok_or_else(|| QringError::Data("ω-dual system is inconsistent".into()))?;
    let mut v = vec![Rat::zero(); m.basis.len()];
    for (&d, c) in divisors.iter().zip(sol) {
        v[d] = c;
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct ManifoldRepr {
    #[serde(default)]
    pub name: Option<String>,
    pub n: u32,
    pub basis: Vec<BasisRepr>,
    pub classical: Vec<ClassicalRepr>,
    pub h2_rank: usize,
    pub omega_vec: Vec<String>,
    pub c1_vec: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h2_classes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_dual: Option<Vec<CoefRepr>>,
    pub gw: Vec<GwRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct BasisRepr {
    pub name: String,
    pub degree: u32,
}

#[derive(Serialize, Deserialize)]
pub struct ClassicalRepr {
    pub i: usize,
    pub j: usize,
    pub result: Vec<CoefRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct CoefRepr {
    pub k: usize,
    pub coef: String,
}

#[derive(Serialize, Deserialize)]
pub struct GwRepr {
    pub beta: Vec<i64>,
    pub classes: [usize; 3],
    pub value: String,
}

pub fn manifold_from_json(text: &str) -> Result<ManifoldData, QringError> {
    let repr: ManifoldRepr =
        serde_json::from_str(text).map_err(|e| QringError::Data(format!("bad JSON: {e}")))?;
    manifold_from_repr(repr)
}

pub fn manifold_to_repr(m: &ManifoldData) -> ManifoldRepr {
    ManifoldRepr {
        name: if m.name.is_empty() { None } else { Some(m.name.clone()) },
        n: m.n,
        basis: m
            .basis
            .iter()
            .map(|b| BasisRepr { name: b.name.clone(), degree: b.degree })
            .collect(),
        classical: m
            .classical
            .iter()
            .filter(|((i, j), _)| i <= j)
            .map(|((i, j), vec)| ClassicalRepr {
                i: *i,
                j: *j,
                result: vec
                    .iter()
                    .map(|(k, c)| CoefRepr { k: *k, coef: fmt_rat(c) })
                    .collect(),
            })
            .collect(),
        h2_rank: m.h2_rank,
        omega_vec: m.omega_vec.iter().map(fmt_rat).collect(),
        c1_vec: m.c1_vec.clone(),
        h2_classes: m.h2_classes.clone(),
        omega_dual: m.omega_dual.as_ref().map(|sv| {
            sv.iter().map(|(k, c)| CoefRepr { k: *k, coef: fmt_rat(c) }).collect()
        }),
        gw: m
            .gw
            .iter()
            .map(|e| GwRepr {
                beta: e.beta.clone(),
                classes: e.classes,
                value: fmt_rat(&e.value),
            })
            .collect(),
    }
}

pub fn manifold_from_repr(repr: ManifoldRepr) -> Result<ManifoldData, QringError> {
    let parse = |s: &str| parse_rat(s).map_err(QringError::Data);
    let basis = repr
        .basis
        .into_iter()
        .map(|b| BasisClass { name: b.name, degree: b.degree })
        .collect();
    let mut classical = Vec::new();
    for c in repr.classical {
        let mut vec = Vec::new();
        for t in c.result {
            vec.push((t.k, parse(&t.coef)?));
        }
        classical.push((c.i, c.j, vec));
    }
    let omega_vec = repr
        .omega_vec
        .iter()
        .map(|s| parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let omega_dual = match repr.omega_dual {
        None => None,
        Some(terms) => {
            let mut v = Vec::new();
            for t in terms {
                v.push((t.k, parse(&t.coef)?));
            }
            Some(v)
        }
    };
    let mut gw = Vec::new();
    for e in repr.gw {
        gw.push((e.beta, e.classes, parse(&e.value)?));
    }
    ManifoldData::new(
        repr.name.unwrap_or_default(),
        repr.n,
        basis,
        classical,
        repr.h2_rank,
        omega_vec,
        repr.c1_vec,
        repr.h2_classes,
        omega_dual,
        gw,
    )
}

// ---------------------------------------------------------------------------
// QElement JSON (classes by name; needs the manifold to resolve)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct QElementRepr {
    pub terms: Vec<QTermRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct QTermRepr {
    pub class: String,
    pub qpow: i64,
    pub scalar: NovikovScalar,
}

impl QElementRepr {
    pub fn resolve(&self, m: &ManifoldData) -> Result<QElement, QringError> {
        let mut e = QElement::zero();
        for t in &self.terms {
            let idx = m
                .class_index(&t.class)
                .ok_or_else(|| QringError::Data(format!("unknown basis class `{}`", t.class)))?;
            e.add_term(idx, t.qpow, t.scalar.clone());
        }
        Ok(e)
    }

    pub fn from_element(e: &QElement, m: &ManifoldData) -> Self {
        QElementRepr {
            terms: e
                .terms()
                .map(|((c, d), s)| QTermRepr {
                    class: m.basis[*c].name.clone(),
                    qpow: *d,
                    scalar: s.clone(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::bundled;
    use crate::rat::{rat, rat_i64};

    fn sc_t(e: Rat) -> NovikovScalar {
        NovikovScalar::t_pow(e)
    }

    #[test]
    fn minimal_chern_examples() {
        let cp2 = bundled("cp2_undeformed").unwrap();
        assert_eq!(cp2.minimal_chern(), ChernNumber::Finite(3));
        let t2 = crate::data::torus_even_manifold();
        assert_eq!(t2.minimal_chern(), ChernNumber::Infinite);
        // gcd over integer combinations
        let m = ManifoldData::new(
            "gcd",
            1,
            vec![
                BasisClass { name: "1".into(), degree: 2 },
                BasisClass { name: "pt".into(), degree: 0 },
            ],
            vec![
                (0, 0, vec![(0, rat_i64(1))]),
                (0, 1, vec![(1, rat_i64(1))]),
                (1, 1, vec![]),
            ],
            2,
            vec![rat_i64(1), rat_i64(1)],
            vec![4, 6],
            None,
            None,
            vec![],
        )
        .unwrap();
        assert_eq!(m.minimal_chern(), ChernNumber::Finite(2));
    }

    #[test]
    fn minimal_energy_examples() {
        assert_eq!(bundled("cp2_undeformed").unwrap().minimal_energy(), None);
        let cp1 = bundled("cp1").unwrap();
        assert_eq!(cp1.minimal_energy(), Some(rat_i64(1)));
    }

    #[test]
    fn undeformed_cp2_product_is_intersection() {
        let m = bundled("cp2_undeformed").unwrap();
        let l = QElement::from_class(m.class_index("L").unwrap());
        let p = quantum_product(&l, &l, &m);
        assert_eq!(p, QElement::from_class(m.class_index("pt").unwrap()));
    }

    #[test]
    fn sphere_point_squared() {
        // pt * pt = 1 ⊗ q^{−2} t^{−A} on the sphere with area A = 1
        let m = bundled("cp1").unwrap();
        let pt = QElement::from_class(m.point_index());
        let p = quantum_product(&pt, &pt, &m);
        let expected = QElement::from_term(m.unit_index(), -2, sc_t(rat_i64(-1)));
        assert_eq!(p, expected);
    }

    #[test]
    fn unit_is_identity_on_random_elements() {
        let m = bundled("cp2").unwrap();
        let one = QElement::unit(&m);
        let mut a = QElement::from_term(m.class_index("L").unwrap(), 2, sc_t(rat(1, 3)));
        a.add_term(m.point_index(), 0, NovikovScalar::monomial(rat(-2, 5), rat(7, 2)));
        assert_eq!(quantum_product(&one, &a, &m), a);
        assert_eq!(quantum_product(&a, &one, &m), a);
    }

    #[test]
    fn element_nu_examples() {
        let m = bundled("cp2").unwrap();
        let mut e = QElement::from_term(m.unit_index(), 0, sc_t(rat_i64(2)));
        e.add_term(m.class_index("L").unwrap(), 1, sc_t(rat(5, 2)));
        assert_eq!(e.nu(), Valuation::Finite(rat(5, 2)));
        assert_eq!(QElement::zero().nu(), Valuation::Bottom);
        assert_eq!(QElement::unit(&m).nu(), Valuation::Finite(rat_i64(0)));
    }

    #[test]
    fn strongly_uniruled_and_ideal() {
        assert!(!bundled("cp2_undeformed").unwrap().is_strongly_uniruled());
        assert!(qminus_ideal_check(&bundled("cp2_undeformed").unwrap()));
        let s2 = bundled("cp1").unwrap();
        assert!(s2.is_strongly_uniruled());
        assert!(!qminus_ideal_check(&s2));
        assert!(bundled("blowup_cp2").unwrap().is_strongly_uniruled());
        assert!(!bundled("blowup_t4").unwrap().is_strongly_uniruled());
    }

    #[test]
    fn nilpotency_examples() {
        let m = bundled("cp2_undeformed").unwrap();
        let l = QElement::from_class(m.class_index("L").unwrap());
        assert_eq!(nilpotency_test(&l, &m, 32), Nilpotence::Nilpotent { order: 3 });
        assert_eq!(nilpotency_test(&QElement::zero(), &m, 32), Nilpotence::Nilpotent { order: 1 });
        let t4 = bundled("blowup_t4").unwrap();
        let eps = QElement::from_class(t4.class_index("e").unwrap());
        assert!(matches!(
            nilpotency_test(&eps, &t4, 32),
            Nilpotence::NotNilpotent { .. }
        ));
    }

    #[test]
    fn invert_unit_monomial_and_geometric() {
        let m = bundled("cp2_undeformed").unwrap();
        let floor = rat_i64(-100);
        // 1⊗t^c inverts to 1⊗t^{−c}
        let u = QElement::from_term(m.unit_index(), 0, sc_t(rat(3, 4)));
        let inv = invert_unit(&u, &m, &floor).unwrap();
        assert_eq!(inv, QElement::from_term(m.unit_index(), 0, sc_t(rat(-3, 4))));
        // (1 + L)⁻¹ = 1 − L + pt in the undeformed ring
        let l = m.class_index("L").unwrap();
        let pt = m.point_index();
        let u = QElement::unit(&m).add(&QElement::from_class(l));
        let inv = invert_unit(&u, &m, &floor).unwrap();
        let mut expected = QElement::unit(&m);
        expected.add_term(l, 0, NovikovScalar::monomial(rat_i64(-1), rat_i64(0)));
        expected.add_term(pt, 0, NovikovScalar::one());
        assert_eq!(inv, expected);
    }

    #[test]
    fn condition_d_bundled_manifolds() {
        for name in ["cp1", "cp2_undeformed", "cp2", "s2xs2", "blowup_cp2", "blowup_t4"] {
            let m = bundled(name).unwrap();
            let v = condition_d_check(&m, None).unwrap();
            assert!(v.holds, "{name} should satisfy the divisor condition");
            assert_eq!(v.complement_dim, 0, "{name}: divisors generate everything");
        }
    }

    #[test]
    fn condition_d_synthetic_failure() {
        // dim-6 classical ring with a middle class v outside the divisor
        // subring and d∩v ≠ 0: clause (a) fails for the canonical complement.
        let m = crate::data::synthetic_condition_d_failure();
        let v = condition_d_check(&m, None).unwrap();
        assert!(!v.holds);
        assert!(v.reason.unwrap().contains("nonzero intersection"));
    }

    #[test]
    fn grading_of_quantum_product() {
        for name in ["cp1", "cp2", "s2xs2", "blowup_cp2", "blowup_t4"] {
            let m = bundled(name).unwrap();
            for i in 0..m.basis.len() {
                for j in 0..m.basis.len() {
                    let p = quantum_product(
                        &QElement::from_class(i),
                        &QElement::from_class(j),
                        &m,
                    );
                    if p.is_zero() {
                        continue;
                    }
                    let want =
                        m.basis[i].degree as i64 + m.basis[j].degree as i64 - m.dim() as i64;
                    assert_eq!(p.homogeneous_degree(&m), Some(want), "{name} ({i},{j})");
                }
            }
        }
    }
}
