//! Arithmetic in the universal Novikov field: finite truncated generalized
//! Laurent series `Σ rᵢ t^{εᵢ}` with rational exponents and coefficients.
//!
//! A scalar carries an optional truncation floor Φ.  `floor == None` means
//! the scalar is exact (no tail has ever been discarded).  Every stored
//! exponent satisfies `ε > Φ`, exponents are strictly decreasing, and the
//! zero scalar is the empty term list.  The floor is only ever raised:
//! lowering it would fabricate precision that was already thrown away.
//!
//! The valuation `ν` is the leading exponent, with `ν(0) = −∞`.

use crate::rat::{fmt_rat, parse_rat, Rat};
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NovikovError {
    #[error("cannot invert the zero scalar")]
    InvertZero,
    #[error("inversion of a multi-term scalar needs a finite truncation floor")]
    InfiniteTail,
    #[error("cannot lower a truncation floor (from {from} to {to})")]
    LowerFloor { from: String, to: String },
}

/// `ν` value: a rational, or `Bottom` (−∞) exactly for the zero scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Valuation {
    Bottom,
    Finite(Rat),
}

impl Valuation {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Valuation::Bottom => None,
            Valuation::Finite(r) => Some(r),
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Valuation::Bottom)
    }

    pub fn unwrap_finite(self) -> Rat {
        match self {
            Valuation::Bottom => panic!("valuation is bottom"),
            Valuation::Finite(r) => r,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Bottom, Valuation::Bottom) => Ordering::Equal,
            (Valuation::Bottom, _) => Ordering::Less,
            (_, Valuation::Bottom) => Ordering::Greater,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Bottom => write!(f, "-inf"),
            Valuation::Finite(r) => write!(f, "{}", fmt_rat(r)),
        }
    }
}

/// A truncated generalized Laurent series in `t`.
///
/// Terms are `(exponent, coefficient)` pairs with exponents strictly
/// decreasing and coefficients nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovikovScalar {
    terms: Vec<(Rat, Rat)>,
    floor: Option<Rat>,
}

impl NovikovScalar {
    pub fn zero() -> Self {
        NovikovScalar { terms: Vec::new(), floor: None }
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), Rat::zero())
    }

    /// `r·t^ε` (the zero scalar if `r = 0`).
    pub fn monomial(coef: Rat, exp: Rat) -> Self {
        if coef.is_zero() {
            Self::zero()
        } else {
            NovikovScalar { terms: vec![(exp, coef)], floor: None }
        }
    }

    /// `t^ε`.
    pub fn t_pow(exp: Rat) -> Self {
        Self::monomial(Rat::one(), exp)
    }

    /// Build from arbitrary (exponent, coefficient) pairs: merges equal
    /// exponents, drops zero coefficients and anything at or below the floor.
    pub fn from_terms(terms: Vec<(Rat, Rat)>, floor: Option<Rat>) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(Rat, Rat)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(last) = merged.last_mut() {
                if last.0 == e {
                    last.1 += c;
                    continue;
                }
            }
            merged.push((e, c));
        }
        merged.retain(|(e, c)| {
            !c.is_zero() && floor.as_ref().map_or(true, |f| e > f)
        });
        NovikovScalar { terms: merged, floor }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Rat, Rat)] {
        &self.terms
    }

    pub fn floor(&self) -> Option<&Rat> {
        self.floor.as_ref()
    }

    /// True when no truncation has occurred anywhere in this scalar's history.
    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// A single-term scalar, returned as (exponent, coefficient).
    pub fn as_monomial(&self) -> Option<(&Rat, &Rat)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((e, c)),
            _ => None,
        }
    }

    /// Leading coefficient, if nonzero.
    pub fn leading(&self) -> Option<(&Rat, &Rat)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    /// The valuation `ν`: largest stored exponent, `Bottom` for zero.
    pub fn nu(&self) -> Valuation {
        match self.terms.first() {
            None => Valuation::Bottom,
            Some((e, _)) => Valuation::Finite(e.clone()),
        }
    }

    fn join_floor(a: &Option<Rat>, b: &Option<Rat>) -> Option<Rat> {
        match (a, b) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (Some(x), Some(y)) => Some(x.max(y).clone()),
        }
    }

    /// Termwise sum; the result floor is the max of the operand floors.
    pub fn add(&self, other: &Self) -> Self {
        let floor = Self::join_floor(&self.floor, &other.floor);
        let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        if let Some(f) = &floor {
            out.retain(|(e, _)| e > f);
        }
        NovikovScalar { terms: out, floor }
    }

    pub fn neg(&self) -> Self {
        NovikovScalar {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            floor: self.floor.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Convolution product, truncated at the max of the operand floors.
    pub fn mul(&self, other: &Self) -> Self {
        let floor = Self::join_floor(&self.floor, &other.floor);
        if self.is_zero() || other.is_zero() {
            return NovikovScalar { terms: Vec::new(), floor };
        }
        let mut raw: Vec<(Rat, Rat)> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                raw.push((e1 + e2, c1 * c2));
            }
        }
        Self::from_terms(raw, floor)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return NovikovScalar { terms: Vec::new(), floor: self.floor.clone() };
        }
        NovikovScalar {
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
            floor: self.floor.clone(),
        }
    }

    /// Multiply by the monomial `c·t^e` without building a scalar first.
    pub fn mul_monomial(&self, c: &Rat, e: &Rat) -> Self {
        if c.is_zero() {
            return NovikovScalar { terms: Vec::new(), floor: self.floor.clone() };
        }
        let floor = self.floor.as_ref().map(|f| f + e);
        NovikovScalar {
            terms: self.terms.iter().map(|(ex, k)| (ex + e, k * c)).collect(),
            floor,
        }
    }

    /// Raise terms at or below Φ′ get dropped; the floor becomes Φ′.
    pub fn truncate(&self, new_floor: &Rat) -> Result<Self, NovikovError> {
        if let Some(f) = &self.floor {
            if new_floor < f {
                return Err(NovikovError::LowerFloor {
                    from: fmt_rat(f),
                    to: fmt_rat(new_floor),
                });
            }
        }
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e > new_floor)
            .cloned()
            .collect();
        Ok(NovikovScalar { terms, floor: Some(new_floor.clone()) })
    }

    /// Multiplicative inverse.
    ///
    /// Monomials invert exactly.  A multi-term scalar has an infinite inverse
    /// series, so it must carry a finite floor; we write `λ = r₀t^{ε₀}(1+z)`
    /// with `ν(z) < 0` and sum the geometric series until all new terms fall
    /// at or below the certified precision `Φ − 2ε₀` of the result.
    pub fn invert(&self) -> Result<Self, NovikovError> {
        let (e0, r0) = match self.terms.first() {
            None => return Err(NovikovError::InvertZero),
            Some((e, c)) => (e.clone(), c.clone()),
        };
        let lead_inv = Self::monomial(r0.recip(), -&e0);
        if self.terms.len() == 1 {
            // exact, but a truncated input only certifies the inverse to Φ − 2ε₀
            return match &self.floor {
                None => Ok(lead_inv),
                Some(f) => {
                    let rf = f - &e0 - &e0;
                    lead_inv.truncate(&rf)
                }
            };
        }
        let floor = self.floor.clone().ok_or(NovikovError::InfiniteTail)?;
        // z = λ/(r₀ t^{ε₀}) − 1, ν(z) < 0, floor(z) = Φ − ε₀
        let z = {
            let mut t = self.mul_monomial(&r0.recip(), &(-&e0));
            t = t.sub(&Self::one());
            t.truncate(&(&floor - &e0)).expect("floor only raised")
        };
        let result_floor = &floor - &e0 - &e0;
        let mut acc = Self::one().truncate(&(&floor - &e0)).expect("finite");
        let mut pow = Self::one().truncate(&(&floor - &e0)).expect("finite");
        loop {
            pow = pow.mul(&z).neg();
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        acc.mul_monomial(&r0.recip(), &(-&e0)).truncate(&result_floor)
    }

    /// k-fold product (k ≥ 0).
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, c)) in self.terms.iter().enumerate() {
                let neg = c.is_negative();
                let abs = c.abs();
                if i == 0 {
                    if neg {
                        write!(f, "-")?;
                    }
                } else if neg {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                if abs.is_one() {
                    write!(f, "t^{}", fmt_rat(e))?;
                } else {
                    write!(f, "{} t^{}", fmt_rat(&abs), fmt_rat(e))?;
                }
            }
        }
        if let Some(fl) = &self.floor {
            write!(f, " [floor {}]", fmt_rat(fl))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"terms":[{"eps":"p/q","coef":"p/q"}],"floor":"p/q"|null},
// with a bare term array accepted as shorthand for an exact scalar.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermRepr {
    eps: String,
    coef: String,
}

#[derive(Serialize)]
struct ScalarRepr {
    terms: Vec<TermRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    floor: Option<String>,
}

impl Serialize for NovikovScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = ScalarRepr {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { eps: fmt_rat(e), coef: fmt_rat(c) })
                .collect(),
            floor: self.floor.as_ref().map(fmt_rat),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NovikovScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Bare(Vec<TermRepr>),
            Full { terms: Vec<TermRepr>, #[serde(default)] floor: Option<String> },
        }
        let (terms, floor) = match Repr::deserialize(d)? {
            Repr::Bare(t) => (t, None),
            Repr::Full { terms, floor } => (terms, floor),
        };
        let mut parsed = Vec::with_capacity(terms.len());
        for t in terms {
            let e = parse_rat(&t.eps).map_err(D::Error::custom)?;
            let c = parse_rat(&t.coef).map_err(D::Error::custom)?;
            parsed.push((e, c));
        }
        let floor = match floor {
            None => None,
            Some(s) => Some(parse_rat(&s).map_err(D::Error::custom)?),
        };
        Ok(NovikovScalar::from_terms(parsed, floor))
    }
}
