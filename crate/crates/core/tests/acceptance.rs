//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the checked tolerances.  Everything asserts exact rational equality; there
//! are no numeric tolerances anywhere.

use num_traits::{Signed, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use seidel_core::data::{
    self, blowup_cp2_fibration, blowup_cp2_inverse_fibration, blowup_t4_fibration, bundled,
};
use seidel_core::descent::{
    asymptotic_valuation, descent_verdict, diameter_certificate, ostrover_growth,
    spectral_descent, DiameterCertificate, Outcome,
};
use seidel_core::fibration::{AlphaClass, LPInstance, TwoPointEntry};
use seidel_core::morse::{spectral_number, FiltrationComplex, Generator, HomologyClassSpec};
use seidel_core::novikov::{NovikovScalar, Valuation};
use seidel_core::qring::{
    classical_product, invert_unit, omega_dual_divisor, quantum_product,
    ChernNumber, ManifoldData, QElement,
};
use seidel_core::rat::{rat, rat_i64, Rat};
use seidel_core::seidel::{
    classify_form, compose, level_of, power_level, seidel_from_table, ClassifierCase, Level,
    Monotonicity, SeidelContext, SeidelElement,
};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5e1de1)
}

fn random_rat(r: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    rat(r.random_range(-num..=num), r.random_range(1..=den))
}

fn random_nonzero_rat(r: &mut ChaCha8Rng, num: i64, den: i64) -> Rat {
    loop {
        let q = random_rat(r, num, den);
        if !q.is_zero() {
            return q;
        }
    }
}

fn random_scalar(r: &mut ChaCha8Rng, max_terms: usize) -> NovikovScalar {
    let n = r.random_range(0..=max_terms);
    let terms = (0..n)
        .map(|_| (random_rat(r, 6, 4), random_rat(r, 5, 3)))
        .collect();
    NovikovScalar::from_terms(terms, None)
}

fn random_nonzero_scalar(r: &mut ChaCha8Rng, max_terms: usize) -> NovikovScalar {
    loop {
        let s = random_scalar(r, max_terms);
        if !s.is_zero() {
            return s;
        }
    }
}

// -------------------------------------------------------------------------
// 1. Novikov axioms
// -------------------------------------------------------------------------

#[test]
fn criterion_1_novikov_axioms() {
    let mut r = rng();
    let floor = rat_i64(-40);
    for _ in 0..1000 {
        let a = random_nonzero_scalar(&mut r, 4);
        let b = random_nonzero_scalar(&mut r, 4);
        // multiplicativity, exactly
        assert_eq!(
            a.mul(&b).nu().unwrap_finite(),
            a.nu().unwrap_finite() + b.nu().unwrap_finite()
        );
        // subadditivity
        assert!(a.add(&b).nu() <= a.nu().max(b.nu()));
        // inversion flips the valuation and round-trips above the floor
        let at = a.truncate(&floor).expect("raising the floor");
        let inv = at.invert().expect("nonzero inverts");
        assert_eq!(
            inv.nu().unwrap_finite(),
            -a.nu().unwrap_finite(),
            "ν(λ⁻¹) must be −ν(λ)"
        );
        let prod_floor = at.mul(&inv).floor().cloned().expect("floored");
        let one = NovikovScalar::one().truncate(&prod_floor).unwrap();
        assert_eq!(at.mul(&inv).truncate(&prod_floor).unwrap(), one);
    }
    println!("criterion 1: PASS — 1000 randomized exact checks of ν(λμ), ν(λ+μ), ν(λ⁻¹), λ·λ⁻¹");
}

// -------------------------------------------------------------------------
// 2. Quantum ring
// -------------------------------------------------------------------------

fn random_element(r: &mut ChaCha8Rng, m: &ManifoldData) -> QElement {
    let mut e = QElement::zero();
    for _ in 0..r.random_range(1..=3) {
        let class = r.random_range(0..m.basis.len());
        let qpow = r.random_range(-2..=2);
        e.add_term(class, qpow, random_scalar(r, 3));
    }
    e
}

#[test]
fn criterion_2_quantum_ring() {
    // empty table: the product is the intersection product on the plane basis
    let undeformed = bundled("cp2_undeformed").unwrap();
    for i in 0..undeformed.basis.len() {
        for j in 0..undeformed.basis.len() {
            let a = QElement::from_class(i);
            let b = QElement::from_class(j);
            assert_eq!(
                quantum_product(&a, &b, &undeformed),
                classical_product(&a, &b, &undeformed)
            );
        }
    }
    // sphere: pt*pt = 1 ⊗ q^{−2} t^{−A} with A = 1, exactly
    let s2 = bundled("cp1").unwrap();
    let pt = QElement::from_class(s2.point_index());
    assert_eq!(
        quantum_product(&pt, &pt, &s2),
        QElement::from_term(s2.unit_index(), -2, NovikovScalar::t_pow(rat_i64(-1)))
    );

    let mut r = rng();
    for name in data::BUNDLED_MANIFOLDS {
        let m = bundled(name).unwrap();
        // associativity and commutativity, exactly, over all basis triples
        for i in 0..m.basis.len() {
            for j in 0..m.basis.len() {
                let a = QElement::from_class(i);
                let b = QElement::from_class(j);
                assert_eq!(
                    quantum_product(&a, &b, &m),
                    quantum_product(&b, &a, &m),
                    "{name}: commutativity at ({i},{j})"
                );
                for k in 0..m.basis.len() {
                    let c = QElement::from_class(k);
                    let left = quantum_product(&quantum_product(&a, &b, &m), &c, &m);
                    let right = quantum_product(&a, &quantum_product(&b, &c, &m), &m);
                    assert_eq!(left, right, "{name}: associativity at ({i},{j},{k})");
                }
            }
        }
        // quantum deviation bound on 500 random pairs
        let min_energy = m.minimal_energy();
        for _ in 0..500 {
            let a = random_element(&mut r, &m);
            let b = random_element(&mut r, &m);
            let diff = quantum_product(&a, &b, &m).sub(&classical_product(&a, &b, &m));
            match (&min_energy, diff.nu()) {
                (None, nu) => assert!(nu.is_bottom(), "{name}: undeformed ⇒ no deviation"),
                (_, Valuation::Bottom) => {}
                (Some(delta), Valuation::Finite(nu)) => {
                    let (na, nb) = (a.nu(), b.nu());
                    let (Valuation::Finite(na), Valuation::Finite(nb)) = (na, nb) else {
                        panic!("nonzero deviation from a zero factor");
                    };
                    assert!(
                        nu <= na + nb - delta,
                        "{name}: deviation bound ν(a*b − a∩b) ≤ ν(a)+ν(b)−δ failed"
                    );
                }
            }
        }
    }
    println!("criterion 2: PASS — intersection reduction, sphere product, exact associativity/commutativity, 500 deviation bounds per bundled manifold");
}

// -------------------------------------------------------------------------
// 3. Unit inversion suite
// -------------------------------------------------------------------------

/// Random unit 1⊗λ + y over the undeformed plane: every y below the top
/// degree is nilpotent there.
fn random_nilpotent_part_unit(
    r: &mut ChaCha8Rng,
    m: &ManifoldData,
) -> (QElement, NovikovScalar, QElement) {
    let lambda = random_nonzero_scalar(r, 3);
    let mut y = QElement::zero();
    for class in 0..m.basis.len() {
        if m.basis[class].degree == m.dim() {
            continue;
        }
        if r.random_bool(0.7) {
            let deg_gap = (m.dim() - m.basis[class].degree) as i64 / 2;
            y.add_term(class, deg_gap, random_scalar(r, 2));
        }
    }
    let mut u = QElement::from_term(m.unit_index(), 0, lambda.clone());
    u = u.add(&y);
    (u, lambda, y)
}

#[test]
fn criterion_3_inversion_suite() {
    let m = bundled("cp2_undeformed").unwrap();
    let floor = rat_i64(-60);
    let mut r = rng();
    // 100 random units with nilpotent lower part round-trip exactly above the floor
    let mut count = 0;
    while count < 100 {
        let (u, _, _) = random_nilpotent_part_unit(&mut r, &m);
        let inv = invert_unit(&u, &m, &floor).expect("nilpotent-part unit inverts");
        let diff = quantum_product(&u, &inv, &m).sub(&QElement::unit(&m));
        assert!(diff.is_zero(), "round trip left residual {}", diff.render(&m));
        count += 1;
    }
    // the invertibility dichotomy at ν(u) = 0
    let mut zero_mu = 0;
    let mut neg_mu = 0;
    while zero_mu < 60 || neg_mu < 60 {
        let shift = random_rat(&mut r, 3, 3);
        let mu = {
            let base = random_nonzero_scalar(&mut r, 2);
            // normalize leading exponent to `shift`
            let lead = base.nu().unwrap_finite();
            base.mul_monomial(&rat_i64(1), &(&shift - &lead))
        };
        let mut y = QElement::zero();
        let l = m.class_index("L").unwrap();
        let ptc = m.point_index();
        // leading exponent 0 on the lower part when μ sits below 0
        if shift.is_negative() {
            y.add_term(l, 1, NovikovScalar::t_pow(rat_i64(0)));
        } else if !shift.is_zero() {
            continue; // ν(u) ≠ 0, не an instance of the dichotomy
        }
        if r.random_bool(0.5) {
            y.add_term(ptc, 2, random_scalar(&mut r, 2).truncate(&rat_i64(-20)).unwrap());
        }
        let mut u = QElement::from_term(m.unit_index(), 0, mu.clone());
        u = u.add(&y);
        if u.nu() != Valuation::Finite(rat_i64(0)) {
            continue;
        }
        let inv = invert_unit(&u, &m, &floor).expect("unit inverts");
        let nu_inv = inv.nu();
        if mu.nu() == Valuation::Finite(rat_i64(0)) {
            assert_eq!(
                nu_inv,
                Valuation::Finite(rat_i64(0)),
                "ν(μ) = 0 forces ν(u⁻¹) = 0"
            );
            zero_mu += 1;
        } else {
            assert!(
                nu_inv > Valuation::Finite(rat_i64(0)),
                "ν(μ) < 0 forces ν(u⁻¹) > 0, got {nu_inv}"
            );
            neg_mu += 1;
        }
    }
    println!("criterion 3: PASS — 100 exact inversion round-trips; dichotomy ν(μ)=0=ν(u⁻¹) or ν(u⁻¹)>0 on {} generated units", zero_mu + neg_mu);
}

// -------------------------------------------------------------------------
// 4. Blow-up of the plane
// -------------------------------------------------------------------------

#[test]
fn criterion_4_blowup_plane() {
    let delta = rat(1, 10);
    let f = blowup_cp2_fibration(&delta).unwrap();
    let m = f.fiber.clone();
    // κ = −1/110 exactly from the volume formula at V = 1/2, μ = 1, ℓ = 3, n = 2
    let kappa = seidel_core::seidel::blowup_kappa(&rat(1, 2), &delta, &rat_i64(1), 3, 2).unwrap();
    assert_eq!(kappa, rat(-1, 110));
    assert_eq!(-&f.sigma0_u, kappa);
    // the loop and its inverse compose to the exact unit
    let s = seidel_from_table(&f, "γ_α").unwrap();
    let g = blowup_cp2_inverse_fibration(&delta).unwrap();
    let si = seidel_from_table(&g, "γ_-α").unwrap();
    let c = compose(&s, &si, &m).unwrap();
    assert_eq!(c.element, QElement::unit(&m), "S(γ_α)*S(γ_-α) must be 1⊗t⁰ exactly");
    // descent fails both ways
    let (verdict, estimates) =
        descent_verdict(&[s, si], &m, 50, &rat_i64(-100)).unwrap();
    assert_eq!(verdict.spectral, Outcome::NotDescend);
    assert_eq!(verdict.asymptotic, Outcome::NotDescend);
    let exact = estimates[0].1.exact.clone().expect("certified");
    assert_eq!(exact, rat(-1, 110));
    println!("criterion 4: PASS — κ = −1/110 exactly; inverse pair composes to 1⊗t⁰; verdict not_descend (spectral and asymptotic)");
}

// -------------------------------------------------------------------------
// 5. Blow-up with aspherical base
// -------------------------------------------------------------------------

#[test]
fn criterion_5_blowup_aspherical() {
    for delta in [rat(1, 10), rat(1, 100)] {
        let f = blowup_t4_fibration(&delta, &rat_i64(1), &rat_i64(1)).unwrap();
        let m = f.fiber.clone();
        // the blow-up relation and the point annihilation, from the table
        let e = QElement::from_class(m.class_index("e").unwrap());
        let ptc = QElement::from_class(m.point_index());
        let mut expected = ptc.neg();
        expected.add_term(
            m.class_index("e").unwrap(),
            -1,
            NovikovScalar::t_pow(-delta.clone()),
        );
        assert_eq!(quantum_product(&e, &e, &m), expected, "ε*ε = −pt + ε⊗q⁻¹t^{{−δ}}");
        assert!(quantum_product(&ptc, &e, &m).is_zero(), "pt*ε = 0");
        // 0 ≤ ν(S(γ̃^k)) ≤ 2δ for all k ≤ 50, exactly
        let s = seidel_from_table(&f, "γ̃").unwrap();
        let two_delta = rat_i64(2) * &delta;
        let mut power = QElement::unit(&m);
        for k in 1..=50u32 {
            power = quantum_product(&power, &s.element, &m);
            let nu = power.nu().unwrap_finite();
            assert!(
                !nu.is_negative() && nu <= two_delta,
                "k = {k}: ν = {nu} outside [0, 2δ]"
            );
        }
        let (est, _) = asymptotic_valuation(&s.element, &m, 50, &rat_i64(-100)).unwrap();
        assert_eq!(est.exact, Some(rat_i64(0)), "asymptotic value must be exactly 0");
        let (verdict, _) = descent_verdict(&[s], &m, 50, &rat_i64(-100)).unwrap();
        assert_eq!(verdict.asymptotic, Outcome::Descend);
    }
    println!("criterion 5: PASS — ε-relations verified; 0 ≤ ν(S(γ̃^k)) ≤ 2δ for k ≤ 50 at δ ∈ {{1/10, 1/100}}; exact value 0; asymptotic descend");
}

// -------------------------------------------------------------------------
// 6. Classifier conformance and level arithmetic
// -------------------------------------------------------------------------

struct ClassifierFixture {
    m: ManifoldData,
    ctx: SeidelContext,
    element: QElement,
}

fn classifier_fixtures() -> Vec<ClassifierFixture> {
    let cp2u = bundled("cp2_undeformed").unwrap();
    let torus = data::torus_even_manifold();
    let l = cp2u.class_index("L").unwrap();
    let ptc = cp2u.point_index();
    let unit = cp2u.unit_index();
    let mk_ctx = |chern, monotonicity| SeidelContext {
        n: 2,
        chern,
        monotonicity,
        strongly_uniruled: false,
        h2_rank: 1,
    };
    let mut out = Vec::new();
    // high Chern: pure unit
    out.push(ClassifierFixture {
        m: cp2u.clone(),
        ctx: mk_ctx(ChernNumber::Finite(5), Monotonicity::None),
        element: QElement::from_term(unit, 0, NovikovScalar::t_pow(rat(1, 3))),
    });
    // mid Chern (the natural plane context): pure unit
    out.push(ClassifierFixture {
        m: cp2u.clone(),
        ctx: SeidelContext::from_manifold(&cp2u),
        element: QElement::from_term(unit, 0, NovikovScalar::t_pow(rat(-2, 7))),
    });
    // N = n: unit plus pt⊗qⁿ
    let mut el = QElement::from_term(unit, 0, NovikovScalar::t_pow(rat_i64(0)));
    el.add_term(ptc, 2, NovikovScalar::t_pow(rat(-1, 2)));
    out.push(ClassifierFixture {
        m: cp2u.clone(),
        ctx: mk_ctx(ChernNumber::Finite(2), Monotonicity::None),
        element: el,
    });
    // negatively monotone: monomial unit dominating the lower part
    let mut el = QElement::from_term(
        unit,
        0,
        NovikovScalar::monomial(rat_i64(2), rat_i64(0)),
    );
    el.add_term(l, 1, NovikovScalar::t_pow(rat_i64(-1)));
    out.push(ClassifierFixture {
        m: cp2u.clone(),
        ctx: mk_ctx(ChernNumber::Finite(1), Monotonicity::NegativelyMonotone),
        element: el,
    });
    // ω = 0: a single exponent across components
    let t_unit = torus.unit_index();
    let t_pt = torus.point_index();
    let mut el = QElement::from_term(t_unit, 0, NovikovScalar::t_pow(rat_i64(3)));
    el.add_term(t_pt, 1, NovikovScalar::t_pow(rat_i64(3)));
    out.push(ClassifierFixture {
        m: torus.clone(),
        ctx: SeidelContext::from_manifold(&torus),
        element: el,
    });
    out
}

#[test]
fn criterion_6_classifier_and_levels() {
    // bundled Seidel elements conform under their own contexts
    let delta = rat(1, 10);
    let fibs = [
        blowup_cp2_fibration(&delta).unwrap(),
        blowup_t4_fibration(&delta, &rat_i64(1), &rat_i64(1)).unwrap(),
    ];
    for f in &fibs {
        let s = seidel_from_table(f, "γ").unwrap();
        let ctx = SeidelContext::from_manifold(&f.fiber);
        let rep = classify_form(&s, &ctx, &f.fiber);
        assert!(rep.conforms, "{}: {:?}", f.name, rep.violations);
    }
    let inv = seidel_from_table(&blowup_cp2_inverse_fibration(&delta).unwrap(), "γ⁻¹").unwrap();
    let cp2bl = bundled("blowup_cp2").unwrap();
    assert!(classify_form(&inv, &SeidelContext::from_manifold(&cp2bl), &cp2bl).conforms);

    // the synthetic fixtures conform, and 200 single-component mutations are
    // each rejected
    let fixtures = classifier_fixtures();
    let mut r = rng();
    let mut rejected = 0;
    for fx in &fixtures {
        let s = SeidelElement { element: fx.element.clone(), loop_label: "γ".into() };
        let rep = classify_form(&s, &fx.ctx, &fx.m);
        assert!(rep.conforms, "fixture must conform: {:?}", rep.violations);
        assert!(!rep.applicable.is_empty(), "fixture context must constrain");
        for _ in 0..40 {
            let mut el = fx.element.clone();
            // a single forbidden component for the fixture's applicable case
            match rep.applicable[0] {
                ClassifierCase::HighChern | ClassifierCase::MidChern => {
                    let class = fx.m.class_index("L").unwrap();
                    el.add_term(class, 1, random_nonzero_scalar(&mut r, 2));
                }
                ClassifierCase::ChernEqualsN => {
                    let class = fx.m.class_index("L").unwrap();
                    el.add_term(class, 1, random_nonzero_scalar(&mut r, 2));
                }
                ClassifierCase::NegativeMonotone => {
                    // push the lower part's valuation to ε₀ or above
                    let class = fx.m.class_index("L").unwrap();
                    let bump = Rat::from_integer(r.random_range(0..3).into());
                    el.add_term(class, 1, NovikovScalar::t_pow(bump));
                }
                ClassifierCase::OmegaZero => {
                    // a second exponent
                    let class = fx.m.point_index();
                    el.add_term(
                        class,
                        1,
                        NovikovScalar::t_pow(rat_i64(3) + random_nonzero_rat(&mut r, 3, 2)),
                    );
                }
            }
            let mutant = SeidelElement { element: el, loop_label: "γ'".into() };
            let rep2 = classify_form(&mutant, &fx.ctx, &fx.m);
            assert!(!rep2.conforms, "mutation must be rejected");
            rejected += 1;
        }
    }
    assert_eq!(rejected, 200);

    // level arithmetic: the N-th power always lands at level 0
    let mut cases = 0;
    for n in 1u32..6 {
        for chern in (n as u64 + 1)..=6 {
            for d in 0..=n {
                assert_eq!(
                    power_level(Level { d }, chern as u32, chern, n).unwrap().d,
                    0
                );
                cases += 1;
            }
        }
    }
    // spot values of the level map itself
    assert_eq!(level_of(0, 5, 2).unwrap().d, 0);
    assert_eq!(level_of(-3, 3, 2).unwrap().d, 0);
    assert_eq!(level_of(-2, 5, 2).unwrap().d, 2);
    println!("criterion 6: PASS — bundled elements conform; 200 mutations rejected; level 0 at the full-Chern power over {cases} (N, n, d) triples");
}

// -------------------------------------------------------------------------
// 7. Morse suite
// -------------------------------------------------------------------------

/// Naive independent oracle: ascend the thresholds, and at each one solve the
/// explicit linear system a = x + ∂y, ∂x = 0 with x supported in the
/// subcomplex, by a self-contained elimination.
fn oracle_spectral(a: &HomologyClassSpec, c: &FiltrationComplex) -> Option<Rat> {
    let deg = a.degree;
    let gens = &c.generators;
    let deg_idx: Vec<usize> =
        (0..gens.len()).filter(|&i| gens[i].degree == deg).collect();
    let below: Vec<usize> =
        (0..gens.len()).filter(|&i| gens[i].degree == deg - 1).collect();
    let above: Vec<usize> =
        (0..gens.len()).filter(|&i| gens[i].degree == deg + 1).collect();
    let mut thresholds: Vec<Rat> = gens.iter().map(|g| g.value.clone()).collect();
    thresholds.sort();
    thresholds.dedup();

    let a_dense: Vec<Rat> = deg_idx
        .iter()
        .map(|&g| {
            a.cycle
                .iter()
                .find(|(i, _)| *i == g)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Rat::zero)
        })
        .collect();

    for kappa in &thresholds {
        let sub: Vec<usize> = deg_idx
            .iter()
            .copied()
            .filter(|&g| &gens[g].value <= kappa)
            .collect();
        // unknowns: x over `sub`, y over `above`
        let unknowns = sub.len() + above.len();
        if unknowns == 0 {
            continue;
        }
        // equations: (deg rows) a = x + ∂y; (deg−1 rows) ∂x = 0
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        let mut rhs: Vec<Rat> = Vec::new();
        for (row, &g) in deg_idx.iter().enumerate() {
            let mut line = vec![Rat::zero(); unknowns];
            if let Some(p) = sub.iter().position(|&s| s == g) {
                line[p] = Rat::from_integer(1.into());
            }
            for (col, &up) in above.iter().enumerate() {
                if let Some((_, coef)) = c.boundary_of(up).iter().find(|(to, _)| *to == g) {
                    line[sub.len() + col] = coef.clone();
                }
            }
            rows.push(line);
            rhs.push(a_dense[row].clone());
        }
        for &b in &below {
            let mut line = vec![Rat::zero(); unknowns];
            for (col, &s) in sub.iter().enumerate() {
                if let Some((_, coef)) = c.boundary_of(s).iter().find(|(to, _)| *to == b) {
                    line[col] = coef.clone();
                }
            }
            rows.push(line);
            rhs.push(Rat::zero());
        }
        if naive_solvable(rows, rhs) {
            return Some(kappa.clone());
        }
    }
    None
}

/// Self-contained Gaussian solvability check (forward elimination only).
fn naive_solvable(mut rows: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> bool {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(p) = (pivot_row..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, p);
        rhs.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for j in col..ncols {
            let v = &rows[pivot_row][j] * &inv;
            rows[pivot_row][j] = v;
        }
        let pv = rhs[pivot_row].clone() * &inv;
        rhs[pivot_row] = pv;
        for i in 0..rows.len() {
            if i != pivot_row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..ncols {
                    let v = &rows[i][j] - &f * &rows[pivot_row][j];
                    rows[i][j] = v;
                }
                let v = &rhs[i] - &f * &rhs[pivot_row];
                rhs[i] = v;
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    // consistent iff no zero row with nonzero rhs
    for (row, b) in rows.iter().zip(&rhs) {
        if row.iter().all(|x| x.is_zero()) && !b.is_zero() {
            return false;
        }
    }
    true
}

fn random_complex(r: &mut ChaCha8Rng) -> (FiltrationComplex, HomologyClassSpec) {
    loop {
        let n_cycles = r.random_range(1..=3usize);
        let n_pairs = r.random_range(0..=2usize);
        let mut gens = Vec::new();
        let mut entries = Vec::new();
        for i in 0..n_cycles {
            gens.push(Generator {
                name: format!("c{i}"),
                degree: r.random_range(0..=2),
                value: random_rat(r, 8, 3),
            });
        }
        for p in 0..n_pairs {
            let deg = r.random_range(0..=1i64);
            let b_val = random_rat(r, 8, 3);
            let d_val = &b_val + rat(r.random_range(1..=4), r.random_range(1..=2));
            let b_idx = gens.len();
            gens.push(Generator { name: format!("b{p}"), degree: deg, value: b_val });
            let d_idx = gens.len();
            gens.push(Generator { name: format!("d{p}"), degree: deg + 1, value: d_val });
            entries.push((d_idx, b_idx, random_nonzero_rat(r, 3, 2)));
            // occasionally let the killer also hit an earlier same-degree target
            for earlier in 0..b_idx {
                if gens[earlier].degree == deg
                    && gens[earlier].value < gens[d_idx].value
                    && r.random_bool(0.3)
                {
                    entries.push((d_idx, earlier, random_nonzero_rat(r, 2, 2)));
                }
            }
        }
        let Ok(c) = FiltrationComplex::new(gens, entries) else {
            continue;
        };
        // a random combination of the honest cycles in one degree
        let deg = c.generators[r.random_range(0..n_cycles)].degree;
        let mut cycle = Vec::new();
        for i in 0..n_cycles {
            if c.generators[i].degree == deg && r.random_bool(0.7) {
                cycle.push((i, random_nonzero_rat(r, 3, 2)));
            }
        }
        if cycle.is_empty() {
            continue;
        }
        return (c, HomologyClassSpec::new(cycle, deg));
    }
}

#[test]
fn criterion_7_morse_suite() {
    // height sphere, exactly
    let s2 = data::s2_height_complex();
    let top = s2.generator_index("max").unwrap();
    let bot = s2.generator_index("min").unwrap();
    assert_eq!(
        spectral_number(&HomologyClassSpec::new(vec![(top, rat_i64(1))], 2), &s2).unwrap(),
        rat_i64(1)
    );
    assert_eq!(
        spectral_number(&HomologyClassSpec::new(vec![(bot, rat_i64(1))], 0), &s2).unwrap(),
        rat_i64(-1)
    );
    // oracle equivalence on 50 random complexes with ≤ 8 generators
    let mut r = rng();
    for trial in 0..50 {
        let (c, a) = random_complex(&mut r);
        assert!(c.generators.len() <= 8);
        let fast = spectral_number(&a, &c);
        let slow = oracle_spectral(&a, &c);
        match (fast, slow) {
            (Ok(x), Some(y)) => assert_eq!(x, y, "trial {trial}: oracle disagrees"),
            (Err(_), None) => {}
            (f, s) => panic!("trial {trial}: fast {f:?} vs oracle {s:?}"),
        }
    }
    // displacement growth matches −H(p_a) + sI on a 10-point grid, and the
    // certificate's bound grows with slope I
    let values = vec![("[M]".to_string(), rat_i64(3)), ("pt".to_string(), rat(-1, 2))];
    let interval = rat(5, 2);
    let grid: Vec<Rat> = (0..10).map(rat_i64).collect();
    let rows = ostrover_growth(&values, &interval, &grid).unwrap();
    for row in &rows {
        let mh = values.iter().find(|(c, _)| *c == row.class).unwrap().1.clone();
        assert_eq!(row.value, mh + &row.s * &interval);
    }
    let verdict = seidel_core::descent::DescentVerdict {
        spectral: Outcome::Descend,
        asymptotic: Outcome::Descend,
        witnesses: vec![],
    };
    match diameter_certificate(&verdict, &rows) {
        DiameterCertificate::Issued { slope, .. } => assert_eq!(slope, interval),
        DiameterCertificate::Declined { reason } => panic!("certificate declined: {reason}"),
    }
    println!("criterion 7: PASS — height-sphere values exact; 50/50 oracle agreements; growth table exact on a 10-point grid with certificate slope I");
}

// -------------------------------------------------------------------------
// 8. Fibration suite
// -------------------------------------------------------------------------

#[test]
fn criterion_8_fibration_suite() {
    let delta = rat(1, 10);
    let fibs = [
        blowup_cp2_fibration(&delta).unwrap(),
        blowup_t4_fibration(&delta, &rat_i64(1), &rat_i64(1)).unwrap(),
        data::product_s2xs2_fibration().unwrap(),
    ];
    for f in &fibs {
        assert!(f.validate().is_empty(), "{}: structural violations", f.name);
        assert!(
            f.fiber_reduction_report().is_empty(),
            "{}: reduction mismatches",
            f.name
        );
        assert!(f.divisor_axiom_report().is_empty(), "{}: divisor axiom", f.name);
        // dimension filter passes on every nonzero stored section entry
        for s in &f.sections {
            for (ext, v) in &s.entries {
                if !v.is_zero() {
                    assert!(f.dimension_filter(&s.beta, *ext));
                }
            }
        }
    }

    // the splitting identity on the bundled blow-up instance (H = K with
    // K·σ₀ = 0, u = w = the fiber cycle, v = σ₀)
    let f = &fibs[0];
    let h_fiber = omega_dual_divisor(&f.fiber).unwrap();
    let (h, _) = f.s_map(&h_fiber).unwrap();
    assert!(f.pairing_vec(&h, &f.sigma0_class).is_zero(), "K·σ₀ = 0");
    let mut m_vec = vec![Rat::zero(); f.ext_size()];
    m_vec[f.m_class()] = rat_i64(1);
    let inst = LPInstance {
        h: h.clone(),
        u: m_vec.clone(),
        v: f.sigma0_class.clone(),
        w: m_vec.clone(),
        alpha: AlphaClass::Section(vec![0, 0]),
    };
    let (residual, _) = seidel_core::fibration::lp_residual(&inst, f).unwrap();
    assert!(residual.is_zero(), "splitting-identity residual must vanish");

    // one corrupted table per check is caught
    // (a) a stored cap contradicting the pairing
    let mut bad = f.clone();
    bad.p_caps.push((
        bad.fiber.class_index("L").unwrap(),
        bad.lift_of(bad.fiber.class_index("L").unwrap()),
        vec![(bad.fiber.point_index(), rat_i64(7))],
    ));
    assert!(bad.validate().iter().any(|v| v.contains("pairing")));
    // (b) a section entry violating the dimension constraint
    let mut bad = f.clone();
    bad.sections[0]
        .entries
        .push((bad.fiber.class_index("L").unwrap(), rat_i64(1)));
    assert!(bad.validate().iter().any(|v| v.contains("dimension")));
    // (c) a fiber-class entry off its reduction
    let mut bad = f.clone();
    bad.three_point[0].value = rat_i64(5);
    assert!(!bad.fiber_reduction_report().is_empty());
    // (d) a divisor-axiom violation
    let mut bad = f.clone();
    for e in &mut bad.two_point {
        if e.a == bad.fiber.unit_index() && e.v == bad.fiber.point_index() {
            e.value = rat_i64(3);
        }
    }
    assert!(!bad.divisor_axiom_report().is_empty());
    // (e) a splitting-sum corruption showing up in the residual
    let mut bad = f.clone();
    let l_lift = bad.lift_of(bad.fiber.class_index("L").unwrap());
    let m_lift = bad.lift_of(bad.fiber.unit_index());
    // overwrite the stored zero entry with a nonzero value
    bad.two_point.retain(|e| {
        !(e.alpha == AlphaClass::Fiber(vec![0, 1]) && e.value.is_zero() && e.a == l_lift)
    });
    bad.two_point.push(TwoPointEntry {
        alpha: AlphaClass::Fiber(vec![0, 1]),
        a: l_lift,
        v: m_lift,
        value: rat_i64(1),
    });
    let (residual, _) = seidel_core::fibration::lp_residual(&inst, &bad).unwrap();
    assert!(!residual.is_zero(), "corrupted splitting table must leave a residual");

    println!("criterion 8: PASS — pairing, dimension filter, reductions, divisor axiom, zero residual on bundled tables; 5/5 corruptions caught");
}

// -------------------------------------------------------------------------
// 9. Descent logic
// -------------------------------------------------------------------------

#[test]
fn criterion_9_descent_logic() {
    let m = bundled("cp2_undeformed").unwrap();
    let floor = rat_i64(-60);
    let mut r = rng();
    // the implication "spectral descend ⇒ asymptotic descend" over 500 fuzzed sets
    for _ in 0..500 {
        let count = r.random_range(1..=3);
        let elements: Vec<SeidelElement> = (0..count)
            .map(|i| {
                let (u, _, _) = random_nilpotent_part_unit(&mut r, &m);
                SeidelElement { element: u, loop_label: format!("γ{i}") }
            })
            .collect();
        let (verdict, _) = descent_verdict(&elements, &m, 8, &floor).unwrap();
        assert!(
            !(verdict.spectral == Outcome::Descend
                && verdict.asymptotic != Outcome::Descend),
            "spectral descend must force asymptotic descend"
        );
        // cross-check the spectral leg against the raw test
        let (sp, _) = spectral_descent(&elements, &m, &floor);
        assert_eq!(sp, verdict.spectral);
    }
    // interval soundness wherever the exact value is certified
    for k_max in [5u32, 10, 25, 50] {
        for _ in 0..10 {
            let (u, _, _) = random_nilpotent_part_unit(&mut r, &m);
            let (est, _) = asymptotic_valuation(&u, &m, k_max, &floor).unwrap();
            if let Some(exact) = &est.exact {
                assert!(*exact <= est.upper, "exact ≤ upper at k_max = {k_max}");
                if let Some(lower) = &est.lower {
                    assert!(lower <= exact, "lower ≤ exact at k_max = {k_max}");
                }
            }
        }
    }
    println!("criterion 9: PASS — implication intact across 500 fuzzed sets; interval soundness at k_max ∈ {{5, 10, 25, 50}}");
}
