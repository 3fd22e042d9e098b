//! Seidel elements: construction from section-invariant tables, composition,
//! the structural classifier with level arithmetic, and the blow-up
//! constructions with their κ formula.

use crate::fibration::{FibrationData, FibrationError};
use crate::novikov::{NovikovScalar, Valuation};
use crate::qring::{
    invert_unit, quantum_product, ChernNumber, ManifoldData, QElement, QringError,
};
use crate::rat::{fmt_rat, rat_i64, Rat};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeidelError {
    #[error("section table is empty")]
    EmptyTable,
    #[error("section entry violates the dimension constraint: {0}")]
    DimensionViolation(String),
    #[error("section table constrains a non-fiber class: {0}")]
    NonFiberConstraint(String),
    #[error("element is zero or not invertible")]
    NotInvertible,
    #[error("degree mismatch: Seidel elements live in degree 2n")]
    DegreeMismatch,
    #[error("no level representative in [0, n] for {0}")]
    NoLevel(String),
    #[error("blow-up parameters out of range: {0}")]
    BadParams(String),
    #[error(transparent)]
    Fibration(#[from] FibrationError),
    #[error(transparent)]
    Qring(#[from] QringError),
}

/// An invertible degree-2n quantum class attached to a loop label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeidelElement {
    pub element: QElement,
    pub loop_label: String,
}

impl SeidelElement {
    /// Wrap an element, verifying degree-2n homogeneity and invertibility.
    pub fn new(
        element: QElement,
        loop_label: impl Into<String>,
        m: &ManifoldData,
    ) -> Result<Self, SeidelError> {
        if element.is_zero() {
            return Err(SeidelError::NotInvertible);
        }
        if element.homogeneous_degree(m) != Some(m.dim() as i64) {
            return Err(SeidelError::DegreeMismatch);
        }
        let mat = crate::slice::mult_matrix(&element, m).ok_or(SeidelError::DegreeMismatch)?;
        if crate::slice::det(&mat).is_zero() {
            return Err(SeidelError::NotInvertible);
        }
        Ok(SeidelElement { element, loop_label: loop_label.into() })
    }
}

/// Build the Seidel element from a one-point section table:
/// `Σ ⟨ξᵢ⟩_{σ₀+β} ξᵢ^{*M} ⊗ q^{−c₁^Vert} t^{−u}` with
/// `c₁^Vert(σ₀+β) = c₁^Vert(σ₀) + c₁(β)` and `u(σ₀+β) = u(σ₀) + ω(β)`.
pub fn seidel_from_table(
    f: &FibrationData,
    label: impl Into<String>,
) -> Result<SeidelElement, SeidelError> {
    let m = &f.fiber;
    let mut element = QElement::zero();
    let mut saw_entry = false;
    for rec in &f.sections {
        let c1v = f.c1_vert(&rec.beta);
        let u = f.u_of(&rec.beta);
        for (ext, v) in &rec.entries {
            if v.is_zero() {
                continue;
            }
            if f.is_lift(*ext) {
                return Err(SeidelError::NonFiberConstraint(f.ext_name(*ext)));
            }
            if !f.dimension_filter(&rec.beta, *ext) {
                return Err(SeidelError::DimensionViolation(format!(
                    "⟨{}⟩ at shift {:?}",
                    f.ext_name(*ext),
                    rec.beta
                )));
            }
            saw_entry = true;
            let scalar = NovikovScalar::monomial(v.clone(), -&u);
            for (l, c) in m.dual(*ext).iter().enumerate() {
                if !c.is_zero() {
                    element.add_term(l, -c1v, scalar.scale(c));
                }
            }
        }
    }
    if !saw_entry {
        return Err(SeidelError::EmptyTable);
    }
    SeidelElement::new(element, label, m)
}

/// Quantum product of Seidel elements (the group law of the representation).
pub fn compose(
    s1: &SeidelElement,
    s2: &SeidelElement,
    m: &ManifoldData,
) -> Result<SeidelElement, SeidelError> {
    let p = quantum_product(&s1.element, &s2.element, m);
    SeidelElement::new(p, format!("{}·{}", s1.loop_label, s2.loop_label), m)
}

/// Inverse in the Seidel group.
pub fn inverse(
    s: &SeidelElement,
    m: &ManifoldData,
    floor: &Rat,
) -> Result<SeidelElement, SeidelError> {
    let inv = invert_unit(&s.element, m, floor)?;
    SeidelElement::new(inv, format!("{}⁻¹", s.loop_label), m)
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Monotonicity {
    SphericallyMonotone,
    NegativelyMonotone,
    OmegaZero,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeidelContext {
    pub n: u32,
    #[serde(skip)]
    pub chern: ChernNumber,
    pub monotonicity: Monotonicity,
    pub strongly_uniruled: bool,
    pub h2_rank: usize,
}

impl SeidelContext {
    pub fn from_manifold(m: &ManifoldData) -> Self {
        let monotonicity = if m.h2_rank == 0 || m.omega_vec.iter().all(|w| w.is_zero()) {
            Monotonicity::OmegaZero
        } else {
            match m.monotonicity_constant() {
                Some(k) if k.is_positive() => Monotonicity::SphericallyMonotone,
                Some(k) if k.is_negative() => Monotonicity::NegativelyMonotone,
                _ => Monotonicity::None,
            }
        };
        SeidelContext {
            n: m.n,
            chern: m.minimal_chern(),
            monotonicity,
            strongly_uniruled: m.is_strongly_uniruled(),
            h2_rank: m.h2_rank,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassifierCase {
    HighChern,        // N ≥ 2n+1: the element is 1⊗λ
    MidChern,         // n+1 ≤ N ≤ 2n, not strongly uniruled: 1⊗λ
    ChernEqualsN,     // N = n, not strongly uniruled: 1⊗λ + pt⊗qⁿμ
    NegativeMonotone, // 1⊗r₀t^{ε₀} + x with ν(x) < ε₀
    OmegaZero,        // (1+x)⊗r₀t^{ε₀}: one t-exponent everywhere
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub applicable: Vec<ClassifierCase>,
    pub violations: Vec<String>,
    pub conforms: bool,
}

/// Check a Seidel element against the structural form its context mandates.
/// Violations are reported, never raised.
pub fn classify_form(
    s: &SeidelElement,
    ctx: &SeidelContext,
    m: &ManifoldData,
) -> ClassifyReport {
    let mut violations = Vec::new();
    let dim = 2 * ctx.n;

    if s.element.is_zero() {
        violations.push("element is zero".to_string());
    } else if s.element.homogeneous_degree(m) != Some(dim as i64) {
        violations.push("element is not homogeneous of degree 2n".to_string());
    }

    let mut applicable = Vec::new();
    // for ω = 0 the single-exponent case below governs; the pure-unit
    // conclusion needs actual sphere classes behind the Chern bound
    let high = match ctx.chern {
        ChernNumber::Infinite => ctx.monotonicity != Monotonicity::OmegaZero,
        ChernNumber::Finite(nn) => nn >= (dim + 1) as u64,
    };
    let mid = matches!(ctx.chern, ChernNumber::Finite(nn)
        if nn >= (ctx.n + 1) as u64 && nn <= dim as u64);
    let eqn = matches!(ctx.chern, ChernNumber::Finite(nn) if nn == ctx.n as u64);

    let (lambda, rest) = s.element.decompose_unit(m);

    if high {
        applicable.push(ClassifierCase::HighChern);
        if !rest.is_zero() {
            violations.push("minimal Chern ≥ 2n+1 mandates a pure unit component".into());
        }
    }
    if mid && !ctx.strongly_uniruled {
        applicable.push(ClassifierCase::MidChern);
        if !rest.is_zero() {
            violations
                .push("n+1 ≤ N ≤ 2n without strong uniruledness mandates a pure unit".into());
        }
    }
    if eqn && !ctx.strongly_uniruled {
        applicable.push(ClassifierCase::ChernEqualsN);
        if lambda.is_zero() {
            violations.push("N = n case needs a nonzero unit coefficient".into());
        }
        let pt = m.point_index();
        for ((c, d), _) in rest.terms() {
            if !(*c == pt && *d == ctx.n as i64) {
                violations.push(format!(
                    "N = n allows only unit and pt⊗qⁿ components, found {}⊗q^{}",
                    m.basis[*c].name, d
                ));
            }
        }
    }
    if ctx.monotonicity == Monotonicity::NegativelyMonotone {
        applicable.push(ClassifierCase::NegativeMonotone);
        match lambda.as_monomial() {
            None => violations.push(
                "negative monotonicity mandates a monomial unit coefficient r₀t^{ε₀}".into(),
            ),
            Some((e0, _)) => {
                if rest.nu() >= Valuation::Finite(e0.clone()) {
                    violations.push(format!(
                        "lower part has valuation {} ≥ ε₀ = {}",
                        rest.nu(),
                        fmt_rat(e0)
                    ));
                }
            }
        }
    }
    if ctx.monotonicity == Monotonicity::OmegaZero {
        applicable.push(ClassifierCase::OmegaZero);
        if lambda.is_zero() {
            violations.push("ω = 0 case needs a nonzero unit coefficient".into());
        }
        let mut exponent: Option<Rat> = None;
        for (_, sc) in s.element.terms() {
            match sc.as_monomial() {
                None => {
                    violations.push("ω = 0 mandates one t-exponent per component".into());
                    break;
                }
                Some((e, _)) => match &exponent {
                    None => exponent = Some(e.clone()),
                    Some(prev) if prev == e => {}
                    Some(prev) => {
                        violations.push(format!(
                            "ω = 0 mandates a single t-exponent, found {} and {}",
                            fmt_rat(prev),
                            fmt_rat(e)
                        ));
                        break;
                    }
                },
            }
        }
    }

    ClassifyReport { conforms: violations.is_empty(), applicable, violations }
}

// ---------------------------------------------------------------------------
// Level arithmetic
// ---------------------------------------------------------------------------

/// Level of a loop: the common value `−c₁^Vert` of its contributing sections,
/// reduced into `[0, n]` modulo the minimal Chern number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level {
    pub d: u32,
}

/// Reduce `−c₁^Vert` into `[0, n]` by a unique multiple of `N` (needs `N > n`).
pub fn level_of(sigma_c1vert: i64, chern: u64, n: u32) -> Result<Level, SeidelError> {
    assert!(chern > n as u64, "levels are defined only for N > n");
    let d = (-sigma_c1vert).rem_euclid(chern as i64) as u64;
    if d <= n as u64 {
        Ok(Level { d: d as u32 })
    } else {
        Err(SeidelError::NoLevel(format!(
            "c₁^Vert = {sigma_c1vert} with N = {chern}, n = {n}"
        )))
    }
}

/// Level of the k-th power of a loop at level `d`: the unique `kd − mN` in
/// `[0, n]`, when a representative exists.
pub fn power_level(d: Level, k: u32, chern: u64, n: u32) -> Result<Level, SeidelError> {
    assert!(chern > n as u64, "levels are defined only for N > n");
    let kd = (d.d as u64) * (k as u64);
    let r = kd % chern;
    if r <= n as u64 {
        Ok(Level { d: r as u32 })
    } else {
        Err(SeidelError::NoLevel(format!("k·d = {kd} mod N = {chern} lands at {r} > n = {n}")))
    }
}

// ---------------------------------------------------------------------------
// Blow-up constructions
// ---------------------------------------------------------------------------

/// `κ = −(v_δ/(V−v_δ))·(μ_α − ℓ_α·δ/(n+1))` with `v_δ = δⁿ/n!`.
pub fn blowup_kappa(
    v_total: &Rat,
    delta: &Rat,
    mu_alpha: &Rat,
    ell_alpha: i64,
    n: u32,
) -> Result<Rat, SeidelError> {
    if !delta.is_positive() {
        return Err(SeidelError::BadParams("δ must be positive".into()));
    }
    let mut v_delta = Rat::one();
    for i in 1..=n {
        v_delta = v_delta * delta / rat_i64(i as i64);
    }
    if &v_delta >= v_total {
        return Err(SeidelError::BadParams(format!(
            "blow-up too large: v_δ = {} ≥ V = {}",
            fmt_rat(&v_delta),
            fmt_rat(v_total)
        )));
    }
    let ratio = &v_delta / (v_total - &v_delta);
    let inner = mu_alpha - rat_i64(ell_alpha) * delta / rat_i64(n as i64 + 1);
    Ok(-(ratio * inner))
}

/// Kinds of bundled one-point blow-up constructions.
#[derive(Debug, Clone)]
pub enum BlowupKind {
    /// Blow-up along the graph of a sphere with volume/area data
    /// `(V, μ_α, ℓ_α)`; non-leading coefficients are explicit inputs.
    GeneralGraph { v_total: Rat, mu_alpha: Rat, ell_alpha: i64, extra: QElement },
    /// Blow-up of the projective plane along the graph of a line.
    Cp2Line,
    /// Blow-up of a 4-manifold with `ω`, `c₁` zero on spheres; `s`, `r` are
    /// the free non-leading coefficients.
    T4Zero { s: Rat, r: Rat },
}

/// Construct the documented Seidel element for a blow-up family at a given δ.
pub fn blowup_seidel(
    kind: &BlowupKind,
    delta: &Rat,
    m: &ManifoldData,
) -> Result<SeidelElement, SeidelError> {
    if !delta.is_positive() {
        return Err(SeidelError::BadParams("δ must be positive".into()));
    }
    match kind {
        BlowupKind::Cp2Line => {
            let f = crate::data::blowup_cp2_fibration(delta)?;
            seidel_from_table(&f, "γ_α")
        }
        BlowupKind::T4Zero { s, r } => {
            let f = crate::data::blowup_t4_fibration(delta, s, r)?;
            seidel_from_table(&f, "γ̃_X")
        }
        BlowupKind::GeneralGraph { v_total, mu_alpha, ell_alpha, extra } => {
            let kappa = blowup_kappa(v_total, delta, mu_alpha, *ell_alpha, m.n)?;
            let mut element =
                QElement::from_term(m.unit_index(), 0, NovikovScalar::t_pow(kappa));
            element = element.add(extra);
            SeidelElement::new(element, "γ_graph", m)
        }
    }
}
