//! Descent criteria for (asymptotic) spectral invariants, asymptotic
//! valuations with certified two-sided bounds, and the Hofer-diameter growth
//! certificates from the displacement construction.
//!
//! For a unit `u` the sequence `f(k) = ν(u^k)` is subadditive, so
//! `lim f(k)/k = inf f(k)/k` exists and every `f(k)/k` is a certified upper
//! bound; `−ν(u^{−k})/k` are certified lower bounds.  The exact value is
//! certified when the lower part of `u = 1⊗λ + x` is nilpotent, or, more
//! generally, when the powers of `λ⁻¹x` satisfy a Cayley–Hamilton recurrence
//! with coefficients of non-positive valuation and keep no unit component of
//! non-negative valuation; then `lim ν(u^k)/k = ν(λ)` exactly.

use crate::novikov::Valuation;
use crate::qring::{
    invert_unit, nilpotency_test, power_step_cap, quantum_product, ManifoldData, Nilpotence,
    QElement, QringError,
};
use crate::rat::{fmt_rat, rat_i64, Rat};
use crate::seidel::SeidelElement;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DescentError {
    #[error("k_max must be at least 1")]
    BadKmax,
    #[error("element is zero or a power vanished (not a unit)")]
    NotAUnit,
    #[error("growth table needs a nonzero integral I")]
    ZeroSlope,
    #[error(transparent)]
    Qring(#[from] QringError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Descend,
    NotDescend,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub loop_label: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DescentVerdict {
    pub spectral: Outcome,
    pub asymptotic: Outcome,
    pub witnesses: Vec<Witness>,
}

/// Two-sided asymptotic estimate; `exact` is set only with a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticEstimate {
    pub lower: Option<Rat>,
    pub upper: Rat,
    pub exact: Option<Rat>,
    pub k_max: u32,
}

/// Raw power data behind an estimate, for reporting.
#[derive(Debug, Clone)]
pub struct PowerTrace {
    /// `ν(u^k)` for k = 1..k_max.
    pub nus: Vec<Rat>,
    /// `ν(u^{−k})`, when the inverse leg succeeded.
    pub inverse_nus: Option<Vec<Rat>>,
    /// Human-readable description of the exactness certificate, if any.
    pub certificate: Option<String>,
    /// Why the inverse leg was skipped, if it was.
    pub inverse_note: Option<String>,
}

/// The spectral-invariant descent test: every element must split as
/// `1⊗λ + x` with `ν(λ) = 0` and `ν(x) ≤ 0`.  A failure is only a
/// `NotDescend` when some loop (or its inverse) witnesses `ν(S(γ)) ≠ 0`.
pub fn spectral_descent(
    elements: &[SeidelElement],
    m: &ManifoldData,
    floor: &Rat,
) -> (Outcome, Vec<Witness>) {
    let mut witnesses = Vec::new();
    let mut all_good = true;
    let mut any_unknown = false;
    let zero = Valuation::Finite(Rat::zero());
    for s in elements {
        let (lambda, x) = s.element.decompose_unit(m);
        let good = lambda.nu() == zero && x.nu() <= zero;
        if good {
            continue;
        }
        all_good = false;
        let nu_s = s.element.nu();
        if nu_s != zero {
            witnesses.push(Witness {
                loop_label: s.loop_label.clone(),
                reason: format!("ν(S(γ)) = {nu_s} ≠ 0"),
            });
            continue;
        }
        match invert_unit(&s.element, m, floor) {
            Ok(inv) => {
                let nu_inv = inv.nu();
                if nu_inv != zero {
                    witnesses.push(Witness {
                        loop_label: format!("{}⁻¹", s.loop_label),
                        reason: format!("ν(S(γ⁻¹)) = {nu_inv} ≠ 0"),
                    });
                } else {
                    any_unknown = true;
                }
            }
            Err(_) => any_unknown = true,
        }
    }
    if !witnesses.is_empty() {
        (Outcome::NotDescend, witnesses)
    } else if all_good {
        (Outcome::Descend, witnesses)
    } else {
        debug_assert!(any_unknown || elements.is_empty());
        (Outcome::Undetermined, witnesses)
    }
}

/// Certified asymptotic valuation `lim ν(u^k)/k` of a unit.
pub fn asymptotic_valuation(
    u: &QElement,
    m: &ManifoldData,
    k_max: u32,
    floor: &Rat,
) -> Result<(AsymptoticEstimate, PowerTrace), DescentError> {
    if k_max == 0 {
        return Err(DescentError::BadKmax);
    }
    if u.is_zero() {
        return Err(DescentError::NotAUnit);
    }

    let collect_nus = |w: &QElement| -> Result<Vec<Rat>, DescentError> {
        let mut out = Vec::with_capacity(k_max as usize);
        let mut p = QElement::unit(m);
        for _ in 0..k_max {
            p = quantum_product(&p, w, m);
            match p.nu() {
                Valuation::Bottom => return Err(DescentError::NotAUnit),
                Valuation::Finite(r) => out.push(r),
            }
        }
        Ok(out)
    };

    let nus = collect_nus(u)?;
    let upper = nus
        .iter()
        .enumerate()
        .map(|(i, f)| f / rat_i64(i as i64 + 1))
        .min()
        .expect("k_max ≥ 1");

    let (lower, inverse_nus, inverse_note) = match invert_unit(u, m, floor) {
        Ok(w) => {
            let gs = collect_nus(&w)?;
            let lo = gs
                .iter()
                .enumerate()
                .map(|(i, g)| -g / rat_i64(i as i64 + 1))
                .max()
                .expect("k_max ≥ 1");
            (Some(lo), Some(gs), None)
        }
        Err(e) => (None, None, Some(format!("inverse leg unavailable: {e}"))),
    };

    let (exact, certificate) = exactness_certificate(u, m);

    Ok((
        AsymptoticEstimate { lower, upper, exact, k_max },
        PowerTrace { nus, inverse_nus, certificate, inverse_note },
    ))
}

/// Try to certify `lim ν(u^k)/k = ν(λ)` exactly.
fn exactness_certificate(u: &QElement, m: &ManifoldData) -> (Option<Rat>, Option<String>) {
    // the certificates below are exact-arithmetic arguments; a truncated
    // input only certifies facts above its floor, so decline
    if u.terms().any(|(_, s)| !s.is_exact()) {
        return (None, None);
    }
    let (lambda, x) = u.decompose_unit(m);
    let Some(nu_lambda) = lambda.nu().finite().cloned() else {
        return (None, None);
    };
    if x.is_zero() {
        return (Some(nu_lambda), Some("pure unit-scalar element".into()));
    }

    // nilpotent lower part with no unit feedback: the binomial expansion of
    // (1⊗λ + x)^k is a bounded perturbation of λ^k
    let cap = power_step_cap(m);
    if let Nilpotence::Nilpotent { order } = nilpotency_test(&x, m, cap) {
        let mut clean = true;
        let mut p = x.clone();
        for _ in 1..order {
            if !p.coefficient(m.unit_index(), 0).is_zero() {
                clean = false;
                break;
            }
            p = quantum_product(&p, &x, m);
        }
        if clean {
            return (
                Some(nu_lambda),
                Some(format!("nilpotent lower part (order {order})")),
            );
        }
    }

    // bounded-recurrence certificate on the degree-2n slice for monomial λ:
    // x̃ = λ⁻¹x satisfies its characteristic recurrence; when all recurrence
    // coefficients have ν ≤ 0 the powers of x̃ stay bounded, and when the
    // early unit components are 0 or ν < 0 they stay that way, pinning
    // ν(u^k) = kν(λ) + O(1)
    let Some((_, _)) = lambda.as_monomial() else {
        return (None, None);
    };
    if u.homogeneous_degree(m) != Some(m.dim() as i64) {
        return (None, None);
    }
    let lambda_inv = lambda.invert().expect("monomial inverts exactly");
    let x_tilde = x.scale(&lambda_inv);
    let Some(mat) = crate::slice::mult_matrix(&x_tilde, m) else {
        return (None, None);
    };
    let chi = crate::slice::char_poly(&mat);
    let rank = chi.len() - 1;
    // recurrence x̃^r = −Σ_{i<r} χ_i x̃^i needs ν(χ_i) ≤ 0 throughout
    let zero_val = Valuation::Finite(Rat::zero());
    for coeff in chi.iter().take(rank) {
        if coeff.nu() > zero_val {
            return (None, None);
        }
    }
    // verify Cayley–Hamilton on actual powers, and inspect unit components
    let mut powers: Vec<QElement> = Vec::with_capacity(rank + 1);
    powers.push(QElement::unit(m));
    for _ in 0..rank {
        let next = quantum_product(powers.last().unwrap(), &x_tilde, m);
        powers.push(next);
    }
    let mut ch_sum = powers[rank].clone();
    for (i, coeff) in chi.iter().enumerate().take(rank) {
        ch_sum = ch_sum.add(&powers[i].scale(coeff));
    }
    if !ch_sum.is_zero() {
        return (None, None); // should not happen; decline rather than trust
    }
    for p in powers.iter().skip(1) {
        let w = p.coefficient(m.unit_index(), 0);
        if !w.is_zero() && w.nu() >= zero_val {
            return (None, None);
        }
    }
    (
        Some(nu_lambda),
        Some(format!(
            "power recurrence of length {rank} with non-positive coefficient valuations"
        )),
    )
}

/// The asymptotic descent test: every element needs certified limit 0 and
/// `ν(S(γ)) ≥ 0`.
pub fn asymptotic_descent(
    elements: &[SeidelElement],
    m: &ManifoldData,
    k_max: u32,
    floor: &Rat,
) -> Result<(Outcome, Vec<Witness>, Vec<(String, AsymptoticEstimate)>), DescentError> {
    let mut witnesses = Vec::new();
    let mut estimates = Vec::new();
    let mut all_zero = true;
    let zero = Rat::zero();
    for s in elements {
        let (est, _trace) = asymptotic_valuation(&s.element, m, k_max, floor)?;
        let nu1 = match s.element.nu() {
            Valuation::Bottom => return Err(DescentError::NotAUnit),
            Valuation::Finite(r) => r,
        };
        match &est.exact {
            Some(v) if v.is_zero() && !nu1.is_negative() => {}
            Some(v) if !v.is_zero() => {
                witnesses.push(Witness {
                    loop_label: s.loop_label.clone(),
                    reason: format!("asymptotic valuation is exactly {}", fmt_rat(v)),
                });
                all_zero = false;
            }
            _ => {
                all_zero = false;
                if est.upper.is_negative() {
                    witnesses.push(Witness {
                        loop_label: s.loop_label.clone(),
                        reason: format!(
                            "certified upper bound {} < 0 excludes limit 0",
                            fmt_rat(&est.upper)
                        ),
                    });
                } else if est.lower.as_ref().is_some_and(|l| l.is_positive()) {
                    witnesses.push(Witness {
                        loop_label: s.loop_label.clone(),
                        reason: format!(
                            "certified lower bound {} > 0 excludes limit 0",
                            fmt_rat(est.lower.as_ref().unwrap())
                        ),
                    });
                } else if nu1 < zero {
                    witnesses.push(Witness {
                        loop_label: s.loop_label.clone(),
                        reason: format!("ν(S(γ)) = {} < 0", fmt_rat(&nu1)),
                    });
                }
            }
        }
        estimates.push((s.loop_label.clone(), est));
    }
    let outcome = if !witnesses.is_empty() {
        Outcome::NotDescend
    } else if all_zero {
        Outcome::Descend
    } else {
        Outcome::Undetermined
    };
    Ok((outcome, witnesses, estimates))
}

/// Full verdict.  Spectral descent forces asymptotic descent, so a proved
/// spectral verdict uplifts an undetermined asymptotic one.
pub fn descent_verdict(
    elements: &[SeidelElement],
    m: &ManifoldData,
    k_max: u32,
    floor: &Rat,
) -> Result<(DescentVerdict, Vec<(String, AsymptoticEstimate)>), DescentError> {
    let (spectral, mut witnesses) = spectral_descent(elements, m, floor);
    let (mut asymptotic, aw, estimates) = asymptotic_descent(elements, m, k_max, floor)?;
    witnesses.extend(aw);
    if spectral == Outcome::Descend && asymptotic == Outcome::Undetermined {
        asymptotic = Outcome::Descend;
    }
    debug_assert!(
        !(spectral == Outcome::Descend && asymptotic == Outcome::NotDescend),
        "spectral descent forces asymptotic descent"
    );
    Ok((DescentVerdict { spectral, asymptotic, witnesses }, estimates))
}

// ---------------------------------------------------------------------------
// Displacement growth and the diameter certificate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    #[serde(with = "crate::rat::serde_rat")]
    pub s: Rat,
    pub class: String,
    #[serde(with = "crate::rat::serde_rat")]
    pub value: Rat,
}

/// `c(a, ψ̃_s) = −H(p_a) + s·I` over a grid of path parameters.
pub fn ostrover_growth(
    morse_values: &[(String, Rat)],
    interval: &Rat,
    s_grid: &[Rat],
) -> Result<Vec<GrowthRow>, DescentError> {
    if interval.is_zero() {
        return Err(DescentError::ZeroSlope);
    }
    let mut rows = Vec::new();
    for s in s_grid {
        for (class, mh) in morse_values {
            rows.push(GrowthRow {
                s: s.clone(),
                class: class.clone(),
                value: mh + s * interval,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub enum DiameterCertificate {
    /// Chain of inequalities establishing unbounded Hofer norm with the
    /// stated slope: `‖ψ_s‖ ≥ c̄(1, ψ̃_s) ≥ s·I − const`.
    Issued {
        #[serde(with = "crate::rat::serde_rat")]
        slope: Rat,
        steps: Vec<String>,
    },
    Declined { reason: String },
}

/// Emit the unbounded-norm certificate when some spectral number descends and
/// the growth table has a nonzero slope.  Purely a report: no group elements
/// are represented.
pub fn diameter_certificate(
    verdict: &DescentVerdict,
    growth: &[GrowthRow],
) -> DiameterCertificate {
    let descends =
        verdict.spectral == Outcome::Descend || verdict.asymptotic == Outcome::Descend;
    if !descends {
        let reason = match (verdict.spectral, verdict.asymptotic) {
            (Outcome::NotDescend, _) | (_, Outcome::NotDescend) => {
                "no invariant descends: the displacement bound does not transfer to the quotient"
            }
            _ => "descent undetermined: no certified transfer to the quotient",
        };
        return DiameterCertificate::Declined { reason: reason.into() };
    }
    // slope per class from the growth rows
    let mut slope: Option<Rat> = None;
    let mut by_class: std::collections::BTreeMap<&str, Vec<(&Rat, &Rat)>> = Default::default();
    for r in growth {
        by_class.entry(r.class.as_str()).or_default().push((&r.s, &r.value));
    }
    for rows in by_class.values() {
        for w in rows.windows(2) {
            let (s1, v1) = w[0];
            let (s2, v2) = w[1];
            if s1 == s2 {
                continue;
            }
            let sl = (v2 - v1) / (s2 - s1);
            match &slope {
                None => slope = Some(sl),
                Some(prev) if *prev == sl => {}
                Some(_) => {
                    return DiameterCertificate::Declined {
                        reason: "growth table is not linear of a single slope".into(),
                    }
                }
            }
        }
    }
    let Some(slope) = slope.filter(|s| !s.is_zero()) else {
        return DiameterCertificate::Declined {
            reason: "growth table has zero slope (I = 0 gives no displacement energy)".into(),
        };
    };
    let steps = vec![
        format!(
            "the displaced path ψ̃_s has c(a, ψ̃_s) = −H(p_a) + s·{}",
            fmt_rat(&slope)
        ),
        "a descending (asymptotic) spectral number is lift-independent, so it bounds ‖ψ_s‖ from below".into(),
        format!(
            "‖ψ_s‖ ≥ c̄(1, ψ̃_s) ≥ s·{} − ‖φ̃₁ᴴ‖ → ∞",
            fmt_rat(&slope)
        ),
    ];
    DiameterCertificate::Issued { slope, steps }
}
