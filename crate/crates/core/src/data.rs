//! Bundled example data: the manifolds, fibrations and Morse complexes the
//! gallery ships, both as programmatic builders (parametric in the blow-up
//! size δ) and as JSON snapshots at δ = 1/10 under `data/`.
//!
//! Lattice conventions per manifold are documented at each builder; blow-up
//! intersection tables follow the exceptional-class sign `E·E = −1`.

use crate::fibration::{
    AlphaClass, FibrationData, FibrationError, SectionRecord, ThreePointEntry, TwoPointEntry,
};
use crate::morse::{FiltrationComplex, Generator};
use crate::qring::{BasisClass, ManifoldData, QringError};
use crate::rat::{rat, rat_i64, Rat};
use crate::seidel::blowup_kappa;
use num_traits::{One, Zero};

pub const BUNDLED_MANIFOLDS: [&str; 6] =
    ["cp1", "cp2_undeformed", "cp2", "s2xs2", "blowup_cp2", "blowup_t4"];

/// Load a bundled manifold by name (blow-up files carry fibration data whose
/// fiber is returned).
pub fn bundled(name: &str) -> Result<ManifoldData, QringError> {
    match name {
        "cp1" => cp1_manifold(),
        "cp2_undeformed" => cp2_undeformed_manifold(),
        "cp2" => cp2_manifold(),
        "s2xs2" => s2xs2_manifold(),
        "blowup_cp2" => Ok(blowup_cp2_fibration(&rat(1, 10))
            .map_err(|e| QringError::Data(e.to_string()))?
            .fiber),
        "blowup_t4" => Ok(blowup_t4_fibration(&rat(1, 10), &rat_i64(1), &rat_i64(1))
            .map_err(|e| QringError::Data(e.to_string()))?
            .fiber),
        other => Err(QringError::Data(format!("unknown bundled manifold `{other}`"))),
    }
}

pub fn bundled_json(name: &str) -> Option<&'static str> {
    match name {
        "cp1" => Some(include_str!("../data/cp1.json")),
        "cp2_undeformed" => Some(include_str!("../data/cp2_undeformed.json")),
        "cp2" => Some(include_str!("../data/cp2.json")),
        "s2xs2" => Some(include_str!("../data/s2xs2.json")),
        "blowup_cp2" => Some(include_str!("../data/blowup_cp2.json")),
        "blowup_t4" => Some(include_str!("../data/blowup_t4.json")),
        _ => None,
    }
}

/// The sphere with area 1: basis `{1, pt}`, one holomorphic-sphere class.
pub fn cp1_manifold() -> Result<ManifoldData, QringError> {
    ManifoldData::new(
        "cp1",
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
        1,
        vec![rat_i64(1)],
        vec![2],
        Some(vec![0]),
        None,
        vec![(vec![1], [1, 1, 1], rat_i64(1))],
    )
}

fn cp2_core(name: &str, gw: Vec<(Vec<i64>, [usize; 3], Rat)>) -> Result<ManifoldData, QringError> {
    ManifoldData::new(
        name,
        2,
        vec![
            BasisClass { name: "1".into(), degree: 4 },
            BasisClass { name: "L".into(), degree: 2 },
            BasisClass { name: "pt".into(), degree: 0 },
        ],
        vec![
            (0, 0, vec![(0, rat_i64(1))]),
            (0, 1, vec![(1, rat_i64(1))]),
            (0, 2, vec![(2, rat_i64(1))]),
            (1, 1, vec![(2, rat_i64(1))]),
            (1, 2, vec![]),
            (2, 2, vec![]),
        ],
        1,
        vec![rat_i64(1)],
        vec![3],
        Some(vec![1]),
        Some(vec![(1, rat_i64(1))]),
        gw,
    )
}

/// The projective plane with its line class and all deforming invariants
/// dropped.
pub fn cp2_undeformed_manifold() -> Result<ManifoldData, QringError> {
    cp2_core("cp2_undeformed", vec![])
}

/// The projective plane with `⟨pt, pt, L⟩ = 1` in the line class.
pub fn cp2_manifold() -> Result<ManifoldData, QringError> {
    cp2_core("cp2", vec![(vec![1], [1, 2, 2], rat_i64(1))])
}

/// The product of two spheres of areas 1 (the monotone case): sphere classes
/// A, B with `⟨pt, B, B⟩_A = ⟨pt, A, A⟩_B = ⟨pt, pt, pt⟩_{A+B} = 1`.
pub fn s2xs2_manifold() -> Result<ManifoldData, QringError> {
    ManifoldData::new(
        "s2xs2",
        2,
        vec![
            BasisClass { name: "1".into(), degree: 4 },
            BasisClass { name: "A".into(), degree: 2 },
            BasisClass { name: "B".into(), degree: 2 },
            BasisClass { name: "pt".into(), degree: 0 },
        ],
        vec![
            (0, 0, vec![(0, rat_i64(1))]),
            (0, 1, vec![(1, rat_i64(1))]),
            (0, 2, vec![(2, rat_i64(1))]),
            (0, 3, vec![(3, rat_i64(1))]),
            (1, 1, vec![]),
            (1, 2, vec![(3, rat_i64(1))]),
            (1, 3, vec![]),
            (2, 2, vec![]),
            (2, 3, vec![]),
            (3, 3, vec![]),
        ],
        2,
        vec![rat_i64(1), rat_i64(1)],
        vec![2, 2],
        Some(vec![1, 2]),
        Some(vec![(1, rat_i64(1)), (2, rat_i64(1))]),
        vec![
            (vec![1, 0], [2, 2, 3], rat_i64(1)),
            (vec![0, 1], [1, 1, 3], rat_i64(1)),
            (vec![1, 1], [3, 3, 3], rat_i64(1)),
        ],
    )
}

/// One-point blow-up of the projective plane at line area 1 and exceptional
/// area δ.  Basis `{1, L, E, pt}`; lattice generators (L, E) with
/// `L·L = 1`, `E·E = −1`; invariants
/// `⟨E,E,E⟩_E = −1`, `⟨pt,·,·⟩_{L−E} = 1` on divisor pairs,
/// `⟨pt,pt,L⟩_L = 1`.
pub fn blowup_cp2_manifold(delta: &Rat) -> Result<ManifoldData, QringError> {
    ManifoldData::new(
        "blowup_cp2",
        2,
        vec![
            BasisClass { name: "1".into(), degree: 4 },
            BasisClass { name: "L".into(), degree: 2 },
            BasisClass { name: "E".into(), degree: 2 },
            BasisClass { name: "pt".into(), degree: 0 },
        ],
        vec![
            (0, 0, vec![(0, rat_i64(1))]),
            (0, 1, vec![(1, rat_i64(1))]),
            (0, 2, vec![(2, rat_i64(1))]),
            (0, 3, vec![(3, rat_i64(1))]),
            (1, 1, vec![(3, rat_i64(1))]),
            (1, 2, vec![]),
            (1, 3, vec![]),
            (2, 2, vec![(3, rat_i64(-1))]),
            (2, 3, vec![]),
            (3, 3, vec![]),
        ],
        2,
        vec![Rat::one(), delta.clone()],
        vec![3, 1],
        Some(vec![1, 2]),
        // PD[ω] pairs to the areas: h = L − δE
        Some(vec![(1, Rat::one()), (2, -delta.clone())]),
        vec![
            (vec![0, 1], [2, 2, 2], rat_i64(-1)),
            (vec![1, -1], [1, 1, 3], rat_i64(1)),
            (vec![1, -1], [1, 2, 3], rat_i64(1)),
            (vec![1, -1], [2, 2, 3], rat_i64(1)),
            (vec![1, 0], [1, 3, 3], rat_i64(1)),
        ],
    )
}

/// Blow-up of a 4-manifold whose `ω` and `c₁` vanish on spheres, reduced to
/// the classes the exceptional locus interacts with: `{1, e, pt}` with
/// `e·e = −1` and the single invariant `⟨e,e,e⟩ = −1` on the exceptional
/// class of area δ.
pub fn blowup_t4_manifold(delta: &Rat) -> Result<ManifoldData, QringError> {
    ManifoldData::new(
        "blowup_t4",
        2,
        vec![
            BasisClass { name: "1".into(), degree: 4 },
            BasisClass { name: "e".into(), degree: 2 },
            BasisClass { name: "pt".into(), degree: 0 },
        ],
        vec![
            (0, 0, vec![(0, rat_i64(1))]),
            (0, 1, vec![(1, rat_i64(1))]),
            (0, 2, vec![(2, rat_i64(1))]),
            (1, 1, vec![(2, rat_i64(-1))]),
            (1, 2, vec![]),
            (2, 2, vec![]),
        ],
        1,
        vec![delta.clone()],
        vec![1],
        Some(vec![1]),
        Some(vec![(1, -delta.clone())]),
        vec![(vec![1], [1, 1, 1], rat_i64(-1))],
    )
}

/// The even part of the flat torus: no spherical classes at all.
pub fn torus_even_manifold() -> ManifoldData {
    ManifoldData::new(
        "torus",
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
        0,
        vec![],
        vec![],
        None,
        None,
        vec![],
    )
    .expect("valid data")
}

/// A classical dim-10 ring where clause (a) fails for the canonical
/// complement: `D = ⟨d⟩` with `d⁵ = pt`, while the middle classes `v` (deg 6)
/// and `y` (deg 4) lie in the pairing-complement yet `d∩v = y ≠ 0` (the
/// triple product d·v·v = 1 makes the violation visible).
pub fn synthetic_condition_d_failure() -> ManifoldData {
    let (one, d, d2, v, d3, y, d4, pt) = (0, 1, 2, 3, 4, 5, 6, 7);
    ManifoldData::new(
        "synthetic_d",
        5,
        vec![
            BasisClass { name: "1".into(), degree: 10 },
            BasisClass { name: "d".into(), degree: 8 },
            BasisClass { name: "d2".into(), degree: 6 },
            BasisClass { name: "v".into(), degree: 6 },
            BasisClass { name: "d3".into(), degree: 4 },
            BasisClass { name: "y".into(), degree: 4 },
            BasisClass { name: "d4".into(), degree: 2 },
            BasisClass { name: "pt".into(), degree: 0 },
        ],
        vec![
            (one, one, vec![(one, rat_i64(1))]),
            (one, d, vec![(d, rat_i64(1))]),
            (one, d2, vec![(d2, rat_i64(1))]),
            (one, v, vec![(v, rat_i64(1))]),
            (one, d3, vec![(d3, rat_i64(1))]),
            (one, y, vec![(y, rat_i64(1))]),
            (one, d4, vec![(d4, rat_i64(1))]),
            (one, pt, vec![(pt, rat_i64(1))]),
            (d, d, vec![(d2, rat_i64(1))]),
            (d, d2, vec![(d3, rat_i64(1))]),
            (d, v, vec![(y, rat_i64(1))]),
            (d, d3, vec![(d4, rat_i64(1))]),
            (d, y, vec![]),
            (d, d4, vec![(pt, rat_i64(1))]),
            (d, pt, vec![]),
            (d2, d2, vec![(d4, rat_i64(1))]),
            (d2, v, vec![]),
            (d2, d3, vec![(pt, rat_i64(1))]),
            (d2, y, vec![]),
            (d2, d4, vec![]),
            (d2, pt, vec![]),
            (v, v, vec![(d4, rat_i64(1))]),
            (v, d3, vec![]),
            (v, y, vec![(pt, rat_i64(1))]),
            (v, d4, vec![]),
            (v, pt, vec![]),
            (d3, d3, vec![]),
            (d3, y, vec![]),
            (d3, d4, vec![]),
            (d3, pt, vec![]),
            (y, y, vec![]),
            (y, d4, vec![]),
            (y, pt, vec![]),
            (d4, d4, vec![]),
            (d4, pt, vec![]),
            (pt, pt, vec![]),
        ],
        0,
        vec![],
        vec![],
        None,
        None,
        vec![],
    )
    .expect("valid data")
}

// ---------------------------------------------------------------------------
// Fibrations
// ---------------------------------------------------------------------------

/// The fibration behind the blow-up-of-the-plane loop: sections at shifts
/// `0` and `−E` produce `S = 1⊗t^κ + (L−E)⊗q·t^{κ+δ}` with κ from the
/// volume formula at `V = 1/2`, `μ_α = 1`, `ℓ_α = 3`.
pub fn blowup_cp2_fibration(delta: &Rat) -> Result<FibrationData, FibrationError> {
    let fiber = blowup_cp2_manifold(delta).map_err(|e| FibrationError::Data(e.to_string()))?;
    let kappa = blowup_kappa(&rat(1, 2), delta, &Rat::one(), 3, 2)
        .map_err(|e| FibrationError::Data(e.to_string()))?;
    let f = build_blowup_cp2_fibration(fiber, delta, &kappa)?;
    let violations = f.validate();
    if !violations.is_empty() {
        return Err(FibrationError::Data(violations.join("; ")));
    }
    Ok(f)
}

fn build_blowup_cp2_fibration(
    fiber: ManifoldData,
    delta: &Rat,
    kappa: &Rat,
) -> Result<FibrationData, FibrationError> {
    let idx = |n: &str| fiber.class_index(n).unwrap();
    let (one, l, e, pt) = (idx("1"), idx("L"), idx("E"), idx("pt"));
    let msize = fiber.basis.len();
    let lift = |i: usize| msize + i;
    let mut sigma0_class = vec![Rat::from_integer(0.into()); 2 * msize];
    sigma0_class[lift(one)] = Rat::one();
    // K = L* + δE* is the h-extension with K·σ₀ = 0; its cube is the
    // obstruction 3κ(1−δ²) that blocks the coupling certificate here
    let p_ll = rat_i64(3) * kappa * (Rat::one() - delta * delta);
    Ok(FibrationData {
        name: "blowup_cp2".into(),
        fiber,
        sigma0_c1vert: 0,
        sigma0_u: -kappa.clone(),
        sigma0_class,
        sections: vec![
            SectionRecord { beta: vec![0, 0], entries: vec![(pt, Rat::one())] },
            SectionRecord {
                beta: vec![0, -1],
                entries: vec![
                    (l, Rat::one()),
                    (e, Rat::one()),
                    (lift(one), Rat::from_integer(0.into())),
                ],
            },
            SectionRecord {
                beta: vec![-1, 1],
                entries: vec![
                    (lift(l), Rat::from_integer(0.into())),
                    (lift(e), Rat::from_integer(0.into())),
                ],
            },
            SectionRecord {
                beta: vec![-1, 0],
                entries: vec![(lift(pt), Rat::from_integer(0.into()))],
            },
        ],
        two_point: vec![
            // fiber pairs ⟨a, ξ⟩_{σ₀} = r₀ (a·ξ)
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: one,
                v: pt,
                value: Rat::one(),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: l,
                v: l,
                value: Rat::one(),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: l,
                v: e,
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: e,
                v: e,
                value: rat_i64(-1),
            },
            // lifted pairs that vanish (the σ₀-pairing content)
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: l,
                v: lift(one),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: e,
                v: lift(one),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: pt,
                v: lift(l),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: pt,
                v: lift(e),
                value: Rat::from_integer(0.into()),
            },
            // fiber-class two-pointers with two section-type insertions vanish
            TwoPointEntry {
                alpha: AlphaClass::Fiber(vec![0, 1]),
                a: lift(l),
                v: lift(one),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Fiber(vec![0, 1]),
                a: lift(e),
                v: lift(one),
                value: Rat::from_integer(0.into()),
            },
        ],
        three_point: vec![
            // a fiber-class entry pinned by the reduction to the fiber table
            ThreePointEntry {
                alpha: AlphaClass::Fiber(vec![1, -1]),
                classes: [pt, lift(l), lift(l)],
                value: Rat::one(),
            },
        ],
        p_caps: vec![
            (lift(l), lift(l), vec![(lift(one), Rat::one()), (l, p_ll)]),
            (lift(l), lift(e), vec![]),
            (lift(e), lift(e), vec![(lift(one), rat_i64(-1))]),
        ],
    })
}

/// The inverse loop's fibration: sections at shifts `0` and `−E` against the
/// anchor `c₁^Vert = −1`, giving `S = (−E + pt⊗t^δ)⊗t^{1−2δ−κ}` with the
/// grading-forced q-powers.
pub fn blowup_cp2_inverse_fibration(delta: &Rat) -> Result<FibrationData, FibrationError> {
    let f = blowup_cp2_fibration(delta)?;
    let fiber = f.fiber;
    let kappa = -&f.sigma0_u;
    let idx = |n: &str| fiber.class_index(n).unwrap();
    let (one, e) = (idx("1"), idx("E"));
    let msize = fiber.basis.len();
    let lift = |i: usize| msize + i;
    let mut sigma0_class = vec![Rat::from_integer(0.into()); 2 * msize];
    sigma0_class[lift(one)] = Rat::one();
    // u(σ_a) = 2δ + κ − 1 on the anchor, dropping by δ on the −E shift
    let u_anchor = rat_i64(2) * delta + &kappa - Rat::one();
    let g = FibrationData {
        name: "blowup_cp2_inverse".into(),
        fiber,
        sigma0_c1vert: -1,
        sigma0_u: u_anchor,
        sigma0_class,
        sections: vec![
            // ⟨E⟩ = 1 lands on the dual −E, giving the −E⊗q·t^{1−2δ−κ} term
            SectionRecord { beta: vec![0, 0], entries: vec![(e, Rat::one())] },
            SectionRecord { beta: vec![0, -1], entries: vec![(one, Rat::one())] },
        ],
        two_point: vec![],
        three_point: vec![],
        p_caps: vec![],
    };
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(FibrationError::Data(violations.join("; ")));
    }
    Ok(g)
}

/// The torus-blow-up fibration: `S = 1⊗t⁰ + s·e⊗q·t^δ + r·pt⊗q²·t^{2δ}`
/// (the coupling value κ is zero here).
pub fn blowup_t4_fibration(
    delta: &Rat,
    s: &Rat,
    r: &Rat,
) -> Result<FibrationData, FibrationError> {
    let fiber = blowup_t4_manifold(delta).map_err(|e| FibrationError::Data(e.to_string()))?;
    let idx = |n: &str| fiber.class_index(n).unwrap();
    let (one, e, pt) = (idx("1"), idx("e"), idx("pt"));
    let msize = fiber.basis.len();
    let lift = |i: usize| msize + i;
    let mut sigma0_class = vec![Rat::from_integer(0.into()); 2 * msize];
    sigma0_class[lift(one)] = Rat::one();
    let mut sections = vec![SectionRecord { beta: vec![0], entries: vec![(pt, Rat::one())] }];
    if !s.is_zero() {
        // e^{*M} = −e, so the e⊗t^δ coefficient s needs ⟨e⟩ = −s
        sections.push(SectionRecord { beta: vec![-1], entries: vec![(e, -s.clone())] });
    }
    if !r.is_zero() {
        sections.push(SectionRecord { beta: vec![-2], entries: vec![(one, r.clone())] });
    }
    let f = FibrationData {
        name: "blowup_t4".into(),
        fiber,
        sigma0_c1vert: 0,
        sigma0_u: Rat::from_integer(0.into()),
        sigma0_class,
        sections,
        two_point: vec![
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0]),
                a: one,
                v: pt,
                value: Rat::one(),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0]),
                a: e,
                v: e,
                value: rat_i64(-1),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0]),
                a: pt,
                v: lift(e),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0]),
                a: e,
                v: lift(one),
                value: Rat::from_integer(0.into()),
            },
        ],
        three_point: vec![],
        p_caps: vec![(lift(e), lift(e), vec![(lift(one), rat_i64(-1))])],
    };
    let violations = f.validate();
    if !violations.is_empty() {
        return Err(FibrationError::Data(violations.join("; ")));
    }
    Ok(f)
}

/// A product fibration over the two-sphere-product: trivial monodromy, one
/// section shift, coupling certificate satisfied.
pub fn product_s2xs2_fibration() -> Result<FibrationData, FibrationError> {
    let fiber = s2xs2_manifold().map_err(|e| FibrationError::Data(e.to_string()))?;
    let idx = |n: &str| fiber.class_index(n).unwrap();
    let (one, a, b, pt) = (idx("1"), idx("A"), idx("B"), idx("pt"));
    let msize = fiber.basis.len();
    let lift = |i: usize| msize + i;
    let mut sigma0_class = vec![Rat::from_integer(0.into()); 2 * msize];
    sigma0_class[lift(one)] = Rat::one();
    let f = FibrationData {
        name: "product_s2xs2".into(),
        fiber,
        sigma0_c1vert: 0,
        sigma0_u: Rat::from_integer(0.into()),
        sigma0_class,
        sections: vec![SectionRecord { beta: vec![0, 0], entries: vec![(pt, Rat::one())] }],
        two_point: vec![
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: one,
                v: pt,
                value: Rat::one(),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: a,
                v: b,
                value: Rat::one(),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: a,
                v: a,
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: b,
                v: b,
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: a,
                v: lift(one),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: b,
                v: lift(one),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: pt,
                v: lift(a),
                value: Rat::from_integer(0.into()),
            },
            TwoPointEntry {
                alpha: AlphaClass::Section(vec![0, 0]),
                a: pt,
                v: lift(b),
                value: Rat::from_integer(0.into()),
            },
        ],
        three_point: vec![],
        // product structure: lifted divisors cap trivially against each other
        p_caps: vec![
            (lift(a), lift(a), vec![]),
            (lift(a), lift(b), vec![(lift(one), Rat::one())]),
            (lift(b), lift(b), vec![]),
        ],
    };
    let violations = f.validate();
    if !violations.is_empty() {
        return Err(FibrationError::Data(violations.join("; ")));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Morse complexes
// ---------------------------------------------------------------------------

/// Height function on the sphere: max at 1, min at −1, no flow pairing.
pub fn s2_height_complex() -> FiltrationComplex {
    FiltrationComplex::new(
        vec![
            Generator { name: "max".into(), degree: 2, value: rat_i64(1) },
            Generator { name: "min".into(), degree: 0, value: rat_i64(-1) },
        ],
        vec![],
    )
    .expect("valid complex")
}

/// Perturbed sphere: two maxima at 1 and 2 paired through a saddle at 1/2.
pub fn perturbed_sphere_complex() -> FiltrationComplex {
    FiltrationComplex::new(
        vec![
            Generator { name: "max1".into(), degree: 2, value: rat_i64(1) },
            Generator { name: "max2".into(), degree: 2, value: rat_i64(2) },
            Generator { name: "saddle".into(), degree: 1, value: rat(1, 2) },
            Generator { name: "min".into(), degree: 0, value: rat_i64(0) },
        ],
        vec![(0, 2, rat_i64(1)), (1, 2, rat_i64(-1))],
    )
    .expect("valid complex")
}

/// Flat torus: four critical points, everything degenerate (zero boundary).
pub fn t2_flat_complex() -> FiltrationComplex {
    FiltrationComplex::new(
        vec![
            Generator { name: "min".into(), degree: 0, value: rat_i64(0) },
            Generator { name: "s1".into(), degree: 1, value: rat_i64(1) },
            Generator { name: "s2".into(), degree: 1, value: rat_i64(2) },
            Generator { name: "max".into(), degree: 2, value: rat_i64(3) },
        ],
        vec![],
    )
    .expect("valid complex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::fibration_from_json;
    use crate::qring::manifold_from_json;

    #[test]
    fn all_builders_construct() {
        for name in BUNDLED_MANIFOLDS {
            bundled(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        blowup_cp2_inverse_fibration(&rat(1, 10)).unwrap();
        product_s2xs2_fibration().unwrap();
        torus_even_manifold();
        synthetic_condition_d_failure();
    }

    /// Rewrites the JSON snapshots from the builders when
    /// `REGEN_BUNDLED_JSON=1` (a development convenience, not a check).
    #[test]
    fn regen_bundled_json() {
        if std::env::var("REGEN_BUNDLED_JSON").as_deref() != Ok("1") {
            return;
        }
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        for name in ["cp1", "cp2_undeformed", "cp2", "s2xs2"] {
            let repr = crate::qring::manifold_to_repr(&bundled(name).unwrap());
            let text = serde_json::to_string_pretty(&repr).unwrap();
            std::fs::write(dir.join(format!("{name}.json")), text + "\n").unwrap();
        }
        let cp2f = blowup_cp2_fibration(&rat(1, 10)).unwrap();
        let t4f = blowup_t4_fibration(&rat(1, 10), &rat_i64(1), &rat_i64(1)).unwrap();
        for (name, f) in [("blowup_cp2", &cp2f), ("blowup_t4", &t4f)] {
            let repr = crate::fibration::fibration_to_repr(f);
            let text = serde_json::to_string_pretty(&repr).unwrap();
            std::fs::write(dir.join(format!("{name}.json")), text + "\n").unwrap();
        }
    }

    #[test]
    fn bundled_json_parses_and_matches_builders() {
        for name in ["cp1", "cp2_undeformed", "cp2", "s2xs2"] {
            let m = manifold_from_json(bundled_json(name).unwrap())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            let built = bundled(name).unwrap();
            assert_eq!(m.n, built.n, "{name}");
            assert_eq!(m.basis, built.basis, "{name}");
            assert_eq!(m.gw, built.gw, "{name}");
            assert_eq!(m.omega_vec, built.omega_vec, "{name}");
            assert_eq!(m.c1_vec, built.c1_vec, "{name}");
        }
        for name in ["blowup_cp2", "blowup_t4"] {
            let f = fibration_from_json(bundled_json(name).unwrap())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            let built = match name {
                "blowup_cp2" => blowup_cp2_fibration(&rat(1, 10)).unwrap(),
                _ => blowup_t4_fibration(&rat(1, 10), &rat_i64(1), &rat_i64(1)).unwrap(),
            };
            assert_eq!(f.fiber.basis, built.fiber.basis, "{name}");
            assert_eq!(f.fiber.gw, built.fiber.gw, "{name}");
            assert_eq!(f.sigma0_c1vert, built.sigma0_c1vert, "{name}");
            assert_eq!(f.sigma0_u, built.sigma0_u, "{name}");
            assert_eq!(f.sigma0_class, built.sigma0_class, "{name}");
            assert_eq!(f.sections, built.sections, "{name}");
            assert_eq!(f.two_point, built.two_point, "{name}");
            assert_eq!(f.three_point, built.three_point, "{name}");
            assert_eq!(f.p_caps, built.p_caps, "{name}");
        }
    }
}
