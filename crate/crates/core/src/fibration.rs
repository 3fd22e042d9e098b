//! Hamiltonian fibrations over the sphere as finite tables.
//!
//! `H₂(P)` is modeled as `ℤσ₀ ⊕ H₂(M)`: every section class is `σ₀ + β` for
//! a unique fiber class β.  `H_ev(P)` carries the extended basis: the fiber
//! classes `ξᵢ` together with lifts `ξⱼ*` satisfying
//! `ξᵢ ·_P ξⱼ* = δᵢⱼ`, `ξᵢ* ·_P ξⱼ* = 0` and `ξⱼ* ∩ M = ξⱼ^{*M}`.
//!
//! Section-class invariants are data; fiber-class invariants reduce to the
//! fiber table where the reduction lemmas reach, and the rest default to
//! zero with a logged warning.

use crate::qring::{beta_dot_divisor, ManifoldData, QringError};
use crate::rat::{fmt_rat, parse_rat, Rat};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FibrationError {
    #[error("fibration data invalid: {0}")]
    Data(String),
    #[error("insufficient intersection data: {0}")]
    Insufficient(String),
    #[error("instance has α·H ≠ 0 (descendant term unsupported): {0}")]
    AlphaNotOrthogonal(String),
    #[error(transparent)]
    Qring(#[from] QringError),
}

/// A class of `H₂(P)`: a section `σ₀ + β` or a fiber class `β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaClass {
    Section(Vec<i64>),
    Fiber(Vec<i64>),
}

impl AlphaClass {
    pub fn is_zero(&self) -> bool {
        matches!(self, AlphaClass::Fiber(b) if b.iter().all(|&x| x == 0))
    }

    /// `self − other`, staying inside the σ₀-affine model.
    pub fn minus(&self, other: &AlphaClass) -> Option<AlphaClass> {
        let sub = |a: &[i64], b: &[i64]| -> Vec<i64> {
            a.iter().zip(b).map(|(x, y)| x - y).collect()
        };
        match (self, other) {
            (AlphaClass::Section(a), AlphaClass::Fiber(b)) => {
                Some(AlphaClass::Section(sub(a, b)))
            }
            (AlphaClass::Section(a), AlphaClass::Section(b)) => {
                Some(AlphaClass::Fiber(sub(a, b)))
            }
            (AlphaClass::Fiber(a), AlphaClass::Fiber(b)) => Some(AlphaClass::Fiber(sub(a, b))),
            (AlphaClass::Fiber(_), AlphaClass::Section(_)) => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            AlphaClass::Section(b) => format!("σ₀+{b:?}"),
            AlphaClass::Fiber(b) => format!("{b:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionRecord {
    pub beta: Vec<i64>,
    /// `(extended-basis index, ⟨ξ⟩_{σ₀+β})`
    pub entries: Vec<(usize, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPointEntry {
    pub alpha: AlphaClass,
    pub a: usize,
    pub v: usize,
    pub value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreePointEntry {
    pub alpha: AlphaClass,
    pub classes: [usize; 3],
    pub value: Rat,
}

#[derive(Debug, Clone)]
pub struct FibrationData {
    pub name: String,
    pub fiber: ManifoldData,
    pub sigma0_c1vert: i64,
    /// Value of the coupling class on σ₀ (so the Seidel unit term is `t^{−u}`).
    pub sigma0_u: Rat,
    /// σ₀ over the extended basis (a degree-2 class).
    pub sigma0_class: Vec<Rat>,
    pub sections: Vec<SectionRecord>,
    pub two_point: Vec<TwoPointEntry>,
    pub three_point: Vec<ThreePointEntry>,
    /// Partial cap products `ξ ∩ ξ` on `H_ev(P)`, where not already canonical.
    pub p_caps: Vec<(usize, usize, Vec<(usize, Rat)>)>,
}

/// Outcome of the coupling-class certificate of the three-condition lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CouplingVerdict {
    /// All three conditions verified: `ν(λ) = 0` for the attached loop.
    Issued,
    FailsDual { detail: String },
    FailsSectionPairing { detail: String },
    FailsTopPower { detail: String },
    Undetermined { missing: String },
}

impl FibrationData {
    pub fn ext_size(&self) -> usize {
        2 * self.fiber.basis.len()
    }

    pub fn fiber_count(&self) -> usize {
        self.fiber.basis.len()
    }

    pub fn is_lift(&self, ext: usize) -> bool {
        ext >= self.fiber_count()
    }

    pub fn lift_of(&self, fiber_idx: usize) -> usize {
        self.fiber_count() + fiber_idx
    }

    pub fn fiber_part(&self, ext: usize) -> usize {
        if self.is_lift(ext) {
            ext - self.fiber_count()
        } else {
            ext
        }
    }

    /// Index of the fiber cycle `[M] ∈ H_{2n}(P)`.
    pub fn m_class(&self) -> usize {
        self.fiber.unit_index()
    }

    /// Degree in `P` of an extended-basis class.
    pub fn ext_degree(&self, ext: usize) -> u32 {
        let d = self.fiber.basis[self.fiber_part(ext)].degree;
        if self.is_lift(ext) {
            2 * self.fiber.n + 2 - d
        } else {
            d
        }
    }

    pub fn ext_name(&self, ext: usize) -> String {
        let base = &self.fiber.basis[self.fiber_part(ext)].name;
        if self.is_lift(ext) {
            format!("{base}*")
        } else {
            base.clone()
        }
    }

    pub fn ext_index(&self, name: &str) -> Option<usize> {
        if let Some(stripped) = name.strip_suffix('*') {
            self.fiber.class_index(stripped).map(|i| self.lift_of(i))
        } else {
            self.fiber.class_index(name)
        }
    }

    /// The self-dual pairing of the extended basis: fiber classes pair with
    /// their lifts, everything else is zero.
    pub fn ext_pairing(&self, i: usize, j: usize) -> Rat {
        match (self.is_lift(i), self.is_lift(j)) {
            (false, false) | (true, true) => Rat::zero(),
            _ => {
                if self.fiber_part(i) == self.fiber_part(j)
                    && self.ext_degree(i) + self.ext_degree(j) == 2 * self.fiber.n + 2
                {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            }
        }
    }

    pub fn pairing_vec(&self, a: &[Rat], b: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                acc += ca * cb * &self.ext_pairing(i, j);
            }
        }
        acc
    }

    /// Embed a fiber lattice class into the extended basis (degree-2 cycles).
    pub fn embed_lattice(&self, beta: &[i64]) -> Result<Vec<Rat>, FibrationError> {
        let hc = self.fiber.h2_classes.as_ref().ok_or_else(|| {
            FibrationError::Insufficient("fiber lacks h2_classes; cannot embed lattice".into())
        })?;
        let mut v = vec![Rat::zero(); self.ext_size()];
        for (b, &cls) in beta.iter().zip(hc) {
            if *b != 0 {
                v[cls] += Rat::from_integer((*b).into());
            }
        }
        Ok(v)
    }

    pub fn alpha_as_cycle(&self, alpha: &AlphaClass) -> Result<Vec<Rat>, FibrationError> {
        match alpha {
            AlphaClass::Fiber(b) => self.embed_lattice(b),
            AlphaClass::Section(b) => {
                let mut v = self.embed_lattice(b)?;
                for (i, c) in self.sigma0_class.iter().enumerate() {
                    v[i] += c;
                }
                Ok(v)
            }
        }
    }

    /// `α · H` for a divisor `H` over the extended basis.
    pub fn alpha_dot(&self, alpha: &AlphaClass, h: &[Rat]) -> Result<Rat, FibrationError> {
        Ok(self.pairing_vec(&self.alpha_as_cycle(alpha)?, h))
    }

    pub fn c1_vert(&self, beta: &[i64]) -> i64 {
        self.sigma0_c1vert + self.fiber.c1_of(beta)
    }

    pub fn u_of(&self, beta: &[i64]) -> Rat {
        &self.sigma0_u + self.fiber.omega_of(beta)
    }

    pub fn section_value(&self, beta: &[i64], ext: usize) -> Option<Rat> {
        self.sections
            .iter()
            .find(|s| s.beta == beta)
            .and_then(|s| s.entries.iter().find(|(e, _)| *e == ext))
            .map(|(_, v)| v.clone())
    }

    pub fn two_point_value(&self, alpha: &AlphaClass, a: usize, v: usize) -> Option<Rat> {
        self.two_point
            .iter()
            .find(|e| e.alpha == *alpha && ((e.a, e.v) == (a, v) || (e.a, e.v) == (v, a)))
            .map(|e| e.value.clone())
    }

    pub fn three_point_value(&self, alpha: &AlphaClass, classes: [usize; 3]) -> Option<Rat> {
        let mut want = classes;
        want.sort_unstable();
        self.three_point
            .iter()
            .find(|e| {
                let mut have = e.classes;
                have.sort_unstable();
                e.alpha == *alpha && have == want
            })
            .map(|e| e.value.clone())
    }

    /// `r₀ = ⟨pt⟩_{σ₀}`.
    pub fn r0(&self) -> Option<Rat> {
        let zero = vec![0i64; self.fiber.h2_rank];
        self.section_value(&zero, self.fiber.point_index())
    }

    // -- canonical cap products ---------------------------------------------

    /// Cap product of two extended-basis classes, when determined by the
    /// built-in rules or the stored partial table.
    pub fn cap(&self, i: usize, j: usize) -> Option<Vec<Rat>> {
        let msize = self.ext_size();
        let dim_p = 2 * self.fiber.n + 2;
        let out_deg = self.ext_degree(i) as i64 + self.ext_degree(j) as i64 - dim_p as i64;
        if out_deg < 0 {
            return Some(vec![Rat::zero(); msize]);
        }
        // [P] is the lift of the fiber point class
        if self.is_lift(i) && self.fiber_part(i) == self.fiber.point_index() {
            let mut v = vec![Rat::zero(); msize];
            v[j] = Rat::one();
            return Some(v);
        }
        if self.is_lift(j) && self.fiber_part(j) == self.fiber.point_index() {
            let mut v = vec![Rat::zero(); msize];
            v[i] = Rat::one();
            return Some(v);
        }
        // two fiber cycles live in disjoint fibers
        if !self.is_lift(i) && !self.is_lift(j) {
            return Some(vec![Rat::zero(); msize]);
        }
        // lift ∩ fiber divisor [M] = dual class in the fiber
        let m_cls = self.m_class();
        for (a, b) in [(i, j), (j, i)] {
            if self.is_lift(a) && b == m_cls {
                let mut v = vec![Rat::zero(); msize];
                for (l, c) in self.fiber.dual(self.fiber_part(a)).iter().enumerate() {
                    v[l] = c.clone();
                }
                return Some(v);
            }
        }
        // complementary degrees: the pairing times the point of P
        if out_deg == 0 {
            let mut v = vec![Rat::zero(); msize];
            v[self.fiber.point_index()] = self.ext_pairing(i, j);
            return Some(v);
        }
        // stored partial table
        for (a, b, res) in &self.p_caps {
            if (*a, *b) == (i, j) || (*a, *b) == (j, i) {
                let mut v = vec![Rat::zero(); msize];
                for (k, c) in res {
                    v[*k] = c.clone();
                }
                return Some(v);
            }
        }
        None
    }

    pub fn cap_vec(&self, a: &[Rat], b: &[Rat]) -> Result<Vec<Rat>, FibrationError> {
        let mut out = vec![Rat::zero(); self.ext_size()];
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let c = self.cap(i, j).ok_or_else(|| {
                    FibrationError::Insufficient(format!(
                        "cap {} ∩ {} not determined",
                        self.ext_name(i),
                        self.ext_name(j)
                    ))
                })?;
                for (k, x) in c.into_iter().enumerate() {
                    if !x.is_zero() {
                        out[k] += ca * cb * x;
                    }
                }
            }
        }
        Ok(out)
    }

    // -- validation -----------------------------------------------------------

    /// Structural checks over the stored tables.  Returns human-readable
    /// violations (empty = clean).
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if self.sigma0_class.len() != self.ext_size() {
            bad.push("sigma0_class has wrong length".into());
            return bad;
        }
        // σ₀ must be a degree-2 cycle meeting the fiber once
        let m_vec = self.unit_vec(self.m_class());
        let dot = self.pairing_vec(&self.sigma0_class, &m_vec);
        if dot != Rat::one() {
            bad.push(format!("σ₀·M = {} (expected 1)", fmt_rat(&dot)));
        }
        // stored caps must agree with the pairing where degrees complement
        let dim_p = 2 * self.fiber.n + 2;
        for (i, j, res) in &self.p_caps {
            if self.ext_degree(*i) + self.ext_degree(*j) == dim_p {
                let stored: Rat = res
                    .iter()
                    .filter(|(k, _)| *k == self.fiber.point_index())
                    .map(|(_, c)| c.clone())
                    .sum();
                if stored != self.ext_pairing(*i, *j) {
                    bad.push(format!(
                        "stored cap {} ∩ {} contradicts the extended-basis pairing",
                        self.ext_name(*i),
                        self.ext_name(*j)
                    ));
                }
            }
        }
        // every one-point section entry passes the dimension filter
        for s in &self.sections {
            for (ext, v) in &s.entries {
                if !v.is_zero() && !self.dimension_filter(&s.beta, *ext) {
                    bad.push(format!(
                        "section entry ⟨{}⟩ at shift {:?} violates the dimension constraint",
                        self.ext_name(*ext),
                        s.beta
                    ));
                }
            }
        }
        // stored fiber-class 3-point entries must agree with fiber reductions
        for e in &self.three_point {
            if let AlphaClass::Fiber(_) = &e.alpha {
                match self.fiber_reduction(e) {
                    Ok(Some(v)) if v != e.value => bad.push(format!(
                        "fiber-class entry {:?} at {} is {}, reduction gives {}",
                        e.classes.map(|c| self.ext_name(c)),
                        e.alpha.render(),
                        fmt_rat(&e.value),
                        fmt_rat(&v)
                    )),
                    _ => {}
                }
            }
        }
        bad
    }

    fn unit_vec(&self, ext: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.ext_size()];
        v[ext] = Rat::one();
        v
    }

    /// One-point dimension constraint `2c₁^Vert(σ) + deg ξ = 0`.
    pub fn dimension_filter(&self, beta: &[i64], ext: usize) -> bool {
        2 * self.c1_vert(beta) + self.ext_degree(ext) as i64 == 0
    }

    /// Value a stored fiber-class 3-point entry must have by the fiber
    /// reduction lemma; `Ok(None)` when the lemma does not reach it.
    pub fn fiber_reduction(&self, e: &ThreePointEntry) -> Result<Option<Rat>, FibrationError> {
        let AlphaClass::Fiber(beta) = &e.alpha else {
            return Ok(None);
        };
        if beta.iter().all(|&b| b == 0) {
            return Err(FibrationError::Data(
                "β = 0 is classical, not a Gromov–Witten entry".into(),
            ));
        }
        let fibers: Vec<usize> =
            e.classes.iter().copied().filter(|&c| !self.is_lift(c)).collect();
        match fibers.len() {
            0 => Ok(None),
            1 => {
                let a = fibers[0];
                let lifts: Vec<usize> =
                    e.classes.iter().copied().filter(|&c| self.is_lift(c)).collect();
                // ⟨a, v, w⟩_β = ⟨a, v∩M, w∩M⟩^M_β with v∩M the fiber dual
                let dv = self.fiber.dual(self.fiber_part(lifts[0]));
                let dw = self.fiber.dual(self.fiber_part(lifts[1]));
                let mut acc = Rat::zero();
                for (x, cx) in dv.iter().enumerate() {
                    if cx.is_zero() {
                        continue;
                    }
                    for (y, cy) in dw.iter().enumerate() {
                        if cy.is_zero() {
                            continue;
                        }
                        acc += cx * cy * &self.fiber.gw_value(beta, [a, x, y]);
                    }
                }
                Ok(Some(acc))
            }
            _ => Ok(Some(Rat::zero())), // two fiber constraints: vanishes
        }
    }

    /// Run the reduction on every stored fiber-class 3-point entry.
    pub fn fiber_reduction_report(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for e in &self.three_point {
            if matches!(e.alpha, AlphaClass::Fiber(_)) {
                if let Ok(Some(v)) = self.fiber_reduction(e) {
                    if v != e.value {
                        bad.push(format!(
                            "entry {:?} at {}: stored {}, mandated {}",
                            e.classes.map(|c| self.ext_name(c)),
                            e.alpha.render(),
                            fmt_rat(&e.value),
                            fmt_rat(&v)
                        ));
                    }
                }
            }
        }
        bad
    }

    // -- the Gromov–Witten evaluator ----------------------------------------

    /// Evaluate a P-invariant over extended-basis cycle vectors.  Missing
    /// table entries contribute zero and a warning; entries ruled out by the
    /// dimension count or by fiber reductions are silent zeros.
    pub fn eval_invariant(&self, alpha: &AlphaClass, insertions: &[Vec<Rat>]) -> Eval {
        let mut total = Eval::zero();
        let mut idxs = Vec::with_capacity(insertions.len());
        self.expand(alpha, insertions, 0, Rat::one(), &mut idxs, &mut total);
        total
    }

    fn expand(
        &self,
        alpha: &AlphaClass,
        insertions: &[Vec<Rat>],
        pos: usize,
        coeff: Rat,
        idxs: &mut Vec<usize>,
        out: &mut Eval,
    ) {
        if pos == insertions.len() {
            let e = self.eval_mono(alpha, idxs);
            out.value += &coeff * &e.value;
            for w in e.warnings {
                if !out.warnings.contains(&w) {
                    out.warnings.push(w);
                }
            }
            return;
        }
        for (i, c) in insertions[pos].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            idxs.push(i);
            self.expand(alpha, insertions, pos + 1, &coeff * c, idxs, out);
            idxs.pop();
        }
    }

    fn eval_mono(&self, alpha: &AlphaClass, idxs: &[usize]) -> Eval {
        // the fiber divisor [M] drops by the divisor axiom: α·M is 1 on
        // sections, 0 on fiber classes
        if idxs.len() >= 2 {
            if let Some(p) = idxs.iter().position(|&c| c == self.m_class()) {
                if matches!(alpha, AlphaClass::Fiber(_)) {
                    return Eval::zero();
                }
                let mut rest: Vec<usize> = idxs.to_vec();
                rest.remove(p);
                return self.eval_mono(alpha, &rest);
            }
        }
        match (idxs.len(), alpha) {
            (1, AlphaClass::Section(beta)) => {
                let ext = idxs[0];
                if !self.dimension_filter(beta, ext) {
                    return Eval::zero();
                }
                match self.section_value(beta, ext) {
                    Some(v) => Eval::value(v),
                    None if !self.is_lift(ext) => Eval::zero(),
                    None => Eval::warned(format!(
                        "⟨{}⟩ at section shift {:?} unknown, assumed 0",
                        self.ext_name(ext),
                        beta
                    )),
                }
            }
            (1, AlphaClass::Fiber(beta)) => Eval::warned(format!(
                "one-point fiber-class invariant ⟨{}⟩_{beta:?} unknown, assumed 0",
                self.ext_name(idxs[0])
            )),
            (2, AlphaClass::Section(beta)) => {
                let (a, v) = (idxs[0], idxs[1]);
                let degsum = self.ext_degree(a) as i64 + self.ext_degree(v) as i64;
                if degsum != 2 * self.fiber.n as i64 - 2 * self.c1_vert(beta) {
                    return Eval::zero();
                }
                match self.two_point_value(alpha, a, v) {
                    Some(x) => Eval::value(x),
                    None => Eval::warned(format!(
                        "⟨{}, {}⟩ at section shift {:?} unknown, assumed 0",
                        self.ext_name(a),
                        self.ext_name(v),
                        beta
                    )),
                }
            }
            (2, AlphaClass::Fiber(beta)) => {
                let fibers: Vec<usize> =
                    idxs.iter().copied().filter(|&c| !self.is_lift(c)).collect();
                match fibers.len() {
                    2 => Eval::zero(), // two fiber constraints in distinct fibers
                    1 => {
                        let a = fibers[0];
                        let lift = idxs.iter().copied().find(|&c| self.is_lift(c)).unwrap();
                        let dual = self.fiber.dual(self.fiber_part(lift)).to_vec();
                        let mut acc = Eval::zero();
                        for (x, cx) in dual.iter().enumerate() {
                            if cx.is_zero() {
                                continue;
                            }
                            let e = self.fiber_two_point(beta, a, x);
                            acc.value += cx * &e.value;
                            acc.merge_warnings(e.warnings);
                        }
                        acc
                    }
                    _ => match self.two_point_value(alpha, idxs[0], idxs[1]) {
                        Some(x) => Eval::value(x),
                        None => Eval::warned(format!(
                            "⟨{}, {}⟩ at fiber class {:?} unknown, assumed 0",
                            self.ext_name(idxs[0]),
                            self.ext_name(idxs[1]),
                            beta
                        )),
                    },
                }
            }
            (3, AlphaClass::Section(beta)) => {
                let degsum: i64 = idxs.iter().map(|&c| self.ext_degree(c) as i64).sum();
                if degsum != 4 * self.fiber.n as i64 - 2 * self.c1_vert(beta) {
                    return Eval::zero();
                }
                match self.three_point_value(alpha, [idxs[0], idxs[1], idxs[2]]) {
                    Some(x) => Eval::value(x),
                    None => Eval::warned(format!(
                        "⟨{}, {}, {}⟩ at section shift {:?} unknown, assumed 0",
                        self.ext_name(idxs[0]),
                        self.ext_name(idxs[1]),
                        self.ext_name(idxs[2]),
                        beta
                    )),
                }
            }
            (3, AlphaClass::Fiber(beta)) => {
                let entry = ThreePointEntry {
                    alpha: alpha.clone(),
                    classes: [idxs[0], idxs[1], idxs[2]],
                    value: Rat::zero(),
                };
                match self.fiber_reduction(&entry) {
                    Ok(Some(v)) => Eval::value(v),
                    _ => match self.three_point_value(alpha, entry.classes) {
                        Some(x) => Eval::value(x),
                        None => Eval::warned(format!(
                            "⟨{}, {}, {}⟩ at fiber class {:?} unknown, assumed 0",
                            self.ext_name(idxs[0]),
                            self.ext_name(idxs[1]),
                            self.ext_name(idxs[2]),
                            beta
                        )),
                    },
                }
            }
            _ => Eval::warned(format!("{}-point invariant unsupported", idxs.len())),
        }
    }

    /// Fiber-side two-point invariant, reached through the divisor axiom on
    /// the fiber 3-point table.
    fn fiber_two_point(&self, beta: &[i64], a: usize, b: usize) -> Eval {
        let m = &self.fiber;
        let divisors: Vec<usize> =
            (0..m.basis.len()).filter(|&i| m.basis[i].degree == m.dim() - 2).collect();
        for d in divisors {
            if let Some(dot) = beta_dot_divisor(m, beta, d) {
                if !dot.is_zero() {
                    return Eval::value(m.gw_value(beta, [a, b, d]) / dot);
                }
            }
        }
        Eval::warned(format!(
            "fiber two-point ⟨{}, {}⟩_{beta:?} not reachable by the divisor axiom, assumed 0",
            m.basis[a].name, m.basis[b].name
        ))
    }

    // -- the section map ------------------------------------------------------

    /// `s(a)`: the class of `H_{*+2}(P)` with `s(a)·v = (1/r₀)⟨a, v, M⟩_{σ₀}`,
    /// solved against the extended-basis pairing.
    pub fn s_map(&self, a_fiber: &[Rat]) -> Result<(Vec<Rat>, Vec<String>), FibrationError> {
        let r0 = self
            .r0()
            .filter(|r| !r.is_zero())
            .ok_or_else(|| FibrationError::Data("r₀ = ⟨pt⟩_{σ₀} is zero or missing".into()))?;
        let sigma0 = AlphaClass::Section(vec![0; self.fiber.h2_rank]);
        let mut a_ext = vec![Rat::zero(); self.ext_size()];
        for (i, c) in a_fiber.iter().enumerate() {
            a_ext[i] = c.clone();
        }
        let mut coeffs = vec![Rat::zero(); self.ext_size()];
        let mut warnings = Vec::new();
        for ext in 0..self.ext_size() {
            // pairing partner: s(a)·ξⱼ gives the ξⱼ*-coefficient and vice versa
            let slot = if self.is_lift(ext) {
                self.fiber_part(ext)
            } else {
                self.lift_of(ext)
            };
            let e = self.eval_invariant(&sigma0, &[a_ext.clone(), self.unit_vec(ext)]);
            coeffs[slot] = e.value / &r0;
            for w in e.warnings {
                if !warnings.contains(&w) {
                    warnings.push(w);
                }
            }
        }
        Ok((coeffs, warnings))
    }

    // -- coupling certificate --------------------------------------------------

    /// Check the three conditions on a divisor `H`: `H∩M = PD_M(ω)`,
    /// `H·σ₀ = 0`, `H^{n+1} = 0`.  Success certifies `ν(λ) = 0`.
    pub fn coupling_certificate(&self, h: &[Rat]) -> CouplingVerdict {
        let m_vec = self.unit_vec(self.m_class());
        let cap_m = match self.cap_vec(h, &m_vec) {
            Ok(v) => v,
            Err(e) => return CouplingVerdict::Undetermined { missing: e.to_string() },
        };
        let pd = match crate::qring::omega_dual_divisor(&self.fiber) {
            Ok(v) => v,
            Err(e) => return CouplingVerdict::Undetermined { missing: e.to_string() },
        };
        let mut want = vec![Rat::zero(); self.ext_size()];
        for (i, c) in pd.into_iter().enumerate() {
            want[i] = c;
        }
        if cap_m != want {
            return CouplingVerdict::FailsDual {
                detail: "H ∩ M is not the ω-dual divisor of the fiber".into(),
            };
        }
        let dot = self.pairing_vec(h, &self.sigma0_class);
        if !dot.is_zero() {
            return CouplingVerdict::FailsSectionPairing {
                detail: format!("H·σ₀ = {}", fmt_rat(&dot)),
            };
        }
        let mut power = h.to_vec();
        for _ in 0..self.fiber.n {
            power = match self.cap_vec(&power, h) {
                Ok(v) => v,
                Err(e) => return CouplingVerdict::Undetermined { missing: e.to_string() },
            };
        }
        if power.iter().any(|c| !c.is_zero()) {
            return CouplingVerdict::FailsTopPower {
                detail: format!(
                    "H^{} has nonzero coefficients",
                    self.fiber.n + 1
                ),
            };
        }
        CouplingVerdict::Issued
    }

    /// Divisor-axiom scan: `⟨pt, v⟩_{σ₀} = (σ₀·v)·r₀` over top-degree classes.
    pub fn divisor_axiom_report(&self) -> Vec<String> {
        let Some(r0) = self.r0() else {
            return vec!["r₀ missing".into()];
        };
        let sigma0 = AlphaClass::Section(vec![0; self.fiber.h2_rank]);
        let pt = self.fiber.point_index();
        let mut bad = Vec::new();
        for v in 0..self.ext_size() {
            if self.ext_degree(v) != 2 * self.fiber.n {
                continue;
            }
            let lhs = self
                .two_point_value(&sigma0, pt, v)
                .unwrap_or_else(Rat::zero);
            let rhs = self.pairing_vec(&self.sigma0_class, &self.unit_vec(v)) * &r0;
            if lhs != rhs {
                bad.push(format!(
                    "⟨pt, {}⟩_σ₀ = {} but (σ₀·{})·r₀ = {}",
                    self.ext_name(v),
                    fmt_rat(&lhs),
                    self.ext_name(v),
                    fmt_rat(&rhs)
                ));
            }
        }
        bad
    }
}

/// Evaluation result: an exact value plus any assumed-zero warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eval {
    pub value: Rat,
    pub warnings: Vec<String>,
}

impl Eval {
    pub fn zero() -> Self {
        Eval { value: Rat::zero(), warnings: Vec::new() }
    }

    pub fn value(v: Rat) -> Self {
        Eval { value: v, warnings: Vec::new() }
    }

    pub fn warned(w: String) -> Self {
        Eval { value: Rat::zero(), warnings: vec![w] }
    }

    pub fn is_certain_zero(&self) -> bool {
        self.value.is_zero() && self.warnings.is_empty()
    }

    fn merge_warnings(&mut self, ws: Vec<String>) {
        for w in ws {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }
}

/// An instance of the splitting identity for 3-point invariants.
#[derive(Debug, Clone)]
pub struct LPInstance {
    pub h: Vec<Rat>,
    pub u: Vec<Rat>,
    pub v: Vec<Rat>,
    pub w: Vec<Rat>,
    pub alpha: AlphaClass,
}

/// Residual of the splitting identity: zero means the tables are consistent.
///
/// `⟨Hu, v, w⟩_α − ⟨u, Hv, w⟩_α + Σ (α₁·H) ⟨u, η, …⟩_{α₁} ⟨η*, v, …⟩_{α₂}`
/// with the third constraint placed in either factor except that `α₂ = 0`
/// forces it into the second.  Only `α·H = 0` instances are supported (the
/// descendant term vanishes there).
pub fn lp_residual(
    inst: &LPInstance,
    f: &FibrationData,
) -> Result<(Rat, Vec<String>), FibrationError> {
    let adh = f.alpha_dot(&inst.alpha, &inst.h)?;
    if !adh.is_zero() {
        return Err(FibrationError::AlphaNotOrthogonal(format!(
            "α·H = {}",
            fmt_rat(&adh)
        )));
    }
    let mut warnings: Vec<String> = Vec::new();
    let mut note = |ws: Vec<String>| {
        for w in ws {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    };

    let hu = f.cap_vec(&inst.h, &inst.u)?;
    let hv = f.cap_vec(&inst.h, &inst.v)?;
    let lhs = f.eval_invariant(&inst.alpha, &[hu, inst.v.clone(), inst.w.clone()]);
    let rhs_main = f.eval_invariant(&inst.alpha, &[inst.u.clone(), hv, inst.w.clone()]);
    note(lhs.warnings.clone());
    note(rhs_main.warnings.clone());

    // candidate splittings: classes seen anywhere in the tables, plus their
    // complements against α (everything else has both factors outside the
    // tables and contributes nothing)
    let mut candidates: Vec<AlphaClass> = Vec::new();
    let mut push = |a: AlphaClass| {
        if !candidates.contains(&a) {
            candidates.push(a);
        }
    };
    push(AlphaClass::Fiber(vec![0; f.fiber.h2_rank]));
    for s in &f.sections {
        push(AlphaClass::Section(s.beta.clone()));
    }
    for e in &f.fiber.gw {
        push(AlphaClass::Fiber(e.beta.clone()));
    }
    for e in &f.two_point {
        push(e.alpha.clone());
    }
    for e in &f.three_point {
        push(e.alpha.clone());
    }
    let mut splittings: Vec<(AlphaClass, AlphaClass)> = Vec::new();
    for c in candidates.iter() {
        if let Some(rest) = inst.alpha.minus(c) {
            if !splittings.contains(&(c.clone(), rest.clone())) {
                splittings.push((c.clone(), rest.clone()));
            }
        }
        // c as the second part
        if let Some(first) = inst.alpha.minus(c) {
            if !splittings.contains(&(first.clone(), c.clone())) {
                splittings.push((first, c.clone()));
            }
        }
    }

    let mut sum = Rat::zero();
    for (a1, a2) in splittings {
        let pre = f.alpha_dot(&a1, &inst.h)?;
        if pre.is_zero() {
            continue;
        }
        for eta in 0..f.ext_size() {
            let eta_dual = if f.is_lift(eta) {
                f.fiber_part(eta)
            } else {
                f.lift_of(eta)
            };
            let eta_v = {
                let mut v = vec![Rat::zero(); f.ext_size()];
                v[eta] = Rat::one();
                v
            };
            let eta_dual_v = {
                let mut v = vec![Rat::zero(); f.ext_size()];
                v[eta_dual] = Rat::one();
                v
            };
            // placements of the third constraint
            let placements: &[bool] = if a2.is_zero() {
                &[false] // w in the second factor only
            } else if a1.is_zero() {
                &[true]
            } else {
                &[false, true]
            };
            for &w_in_first in placements {
                let (f1, f2) = if w_in_first {
                    (
                        f.eval_invariant(&a1, &[inst.u.clone(), eta_v.clone(), inst.w.clone()]),
                        f.eval_invariant(&a2, &[eta_dual_v.clone(), inst.v.clone()]),
                    )
                } else {
                    (
                        f.eval_invariant(&a1, &[inst.u.clone(), eta_v.clone()]),
                        f.eval_invariant(
                            &a2,
                            &[eta_dual_v.clone(), inst.v.clone(), inst.w.clone()],
                        ),
                    )
                };
                // a certain zero on either side silences the whole term
                if f1.is_certain_zero() || f2.is_certain_zero() {
                    continue;
                }
                note(f1.warnings.clone());
                note(f2.warnings.clone());
                sum += &pre * &f1.value * &f2.value;
            }
        }
    }

    Ok((lhs.value - rhs_main.value + sum, warnings))
}

// ---------------------------------------------------------------------------
// JSON schema (extends the manifold schema)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
pub struct FibrationRepr {
    #[serde(flatten)]
    pub manifold: crate::qring::ManifoldRepr,
    pub sigma0: Sigma0Repr,
    pub sigma0_class: Vec<ExtCoefRepr>,
    pub sections: Vec<SectionRepr>,
    #[serde(default)]
    pub two_point: Vec<TwoPointRepr>,
    #[serde(default)]
    pub three_point: Vec<ThreePointRepr>,
    #[serde(default)]
    pub p_intersection: Vec<PCapRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct Sigma0Repr {
    pub c1vert: i64,
    pub u: String,
}

#[derive(Serialize, Deserialize)]
pub struct ExtCoefRepr {
    pub class: String,
    pub coef: String,
}

#[derive(Serialize, Deserialize)]
pub struct SectionRepr {
    pub beta: Vec<i64>,
    pub entries: Vec<ExtCoefRepr>,
}

#[derive(Serialize, Deserialize)]
pub struct TwoPointRepr {
    pub alpha: AlphaReprClass,
    pub a: String,
    pub v: String,
    pub value: String,
}

#[derive(Serialize, Deserialize)]
pub struct ThreePointRepr {
    pub alpha: AlphaReprClass,
    pub classes: [String; 3],
    pub value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaReprClass {
    Section(Vec<i64>),
    Fiber(Vec<i64>),
}

impl From<&AlphaReprClass> for AlphaClass {
    fn from(a: &AlphaReprClass) -> Self {
        match a {
            AlphaReprClass::Section(b) => AlphaClass::Section(b.clone()),
            AlphaReprClass::Fiber(b) => AlphaClass::Fiber(b.clone()),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct PCapRepr {
    pub i: String,
    pub j: String,
    pub result: Vec<ExtCoefRepr>,
}

pub fn fibration_to_repr(f: &FibrationData) -> FibrationRepr {
    let alpha_repr = |a: &AlphaClass| match a {
        AlphaClass::Section(b) => AlphaReprClass::Section(b.clone()),
        AlphaClass::Fiber(b) => AlphaReprClass::Fiber(b.clone()),
    };
    FibrationRepr {
        manifold: crate::qring::manifold_to_repr(&f.fiber),
        sigma0: Sigma0Repr { c1vert: f.sigma0_c1vert, u: fmt_rat(&f.sigma0_u) },
        sigma0_class: f
            .sigma0_class
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| ExtCoefRepr { class: f.ext_name(i), coef: fmt_rat(c) })
            .collect(),
        sections: f
            .sections
            .iter()
            .map(|s| SectionRepr {
                beta: s.beta.clone(),
                entries: s
                    .entries
                    .iter()
                    .map(|(e, v)| ExtCoefRepr { class: f.ext_name(*e), coef: fmt_rat(v) })
                    .collect(),
            })
            .collect(),
        two_point: f
            .two_point
            .iter()
            .map(|e| TwoPointRepr {
                alpha: alpha_repr(&e.alpha),
                a: f.ext_name(e.a),
                v: f.ext_name(e.v),
                value: fmt_rat(&e.value),
            })
            .collect(),
        three_point: f
            .three_point
            .iter()
            .map(|e| ThreePointRepr {
                alpha: alpha_repr(&e.alpha),
                classes: [
                    f.ext_name(e.classes[0]),
                    f.ext_name(e.classes[1]),
                    f.ext_name(e.classes[2]),
                ],
                value: fmt_rat(&e.value),
            })
            .collect(),
        p_intersection: f
            .p_caps
            .iter()
            .map(|(i, j, res)| PCapRepr {
                i: f.ext_name(*i),
                j: f.ext_name(*j),
                result: res
                    .iter()
                    .map(|(k, c)| ExtCoefRepr { class: f.ext_name(*k), coef: fmt_rat(c) })
                    .collect(),
            })
            .collect(),
    }
}

pub fn fibration_from_json(text: &str) -> Result<FibrationData, FibrationError> {
    let repr: FibrationRepr =
        serde_json::from_str(text).map_err(|e| FibrationError::Data(format!("bad JSON: {e}")))?;
    fibration_from_repr(repr)
}

pub fn fibration_from_repr(repr: FibrationRepr) -> Result<FibrationData, FibrationError> {
    let fiber = crate::qring::manifold_from_repr(repr.manifold)?;
    let parse = |s: &str| parse_rat(s).map_err(FibrationError::Data);
    let mut proto = FibrationData {
        name: fiber.name.clone(),
        fiber,
        sigma0_c1vert: repr.sigma0.c1vert,
        sigma0_u: parse(&repr.sigma0.u)?,
        sigma0_class: Vec::new(),
        sections: Vec::new(),
        two_point: Vec::new(),
        three_point: Vec::new(),
        p_caps: Vec::new(),
    };
    let resolve = |f: &FibrationData, name: &str| -> Result<usize, FibrationError> {
        f.ext_index(name)
            .ok_or_else(|| FibrationError::Data(format!("unknown extended class `{name}`")))
    };
    let mut sigma0_class = vec![Rat::zero(); proto.ext_size()];
    for c in &repr.sigma0_class {
        sigma0_class[resolve(&proto, &c.class)?] = parse(&c.coef)?;
    }
    proto.sigma0_class = sigma0_class;
    for s in &repr.sections {
        let mut entries = Vec::new();
        for e in &s.entries {
            entries.push((resolve(&proto, &e.class)?, parse(&e.coef)?));
        }
        proto.sections.push(SectionRecord { beta: s.beta.clone(), entries });
    }
    for e in &repr.two_point {
        proto.two_point.push(TwoPointEntry {
            alpha: (&e.alpha).into(),
            a: resolve(&proto, &e.a)?,
            v: resolve(&proto, &e.v)?,
            value: parse(&e.value)?,
        });
    }
    for e in &repr.three_point {
        proto.three_point.push(ThreePointEntry {
            alpha: (&e.alpha).into(),
            classes: [
                resolve(&proto, &e.classes[0])?,
                resolve(&proto, &e.classes[1])?,
                resolve(&proto, &e.classes[2])?,
            ],
            value: parse(&e.value)?,
        });
    }
    for c in &repr.p_intersection {
        let mut res = Vec::new();
        for t in &c.result {
            res.push((resolve(&proto, &t.class)?, parse(&t.coef)?));
        }
        proto.p_caps.push((resolve(&proto, &c.i)?, resolve(&proto, &c.j)?, res));
    }
    let violations = proto.validate();
    if !violations.is_empty() {
        return Err(FibrationError::Data(violations.join("; ")));
    }
    Ok(proto)
}
