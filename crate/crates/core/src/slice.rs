//! Exact linear algebra on the degree-2n slice of the quantum module.
//!
//! Degree-2n homogeneous elements form a free Λ-module of rank equal to the
//! basis size: each class appears with its grading-forced q-power.  Quantum
//! multiplication by such an element is a Λ-matrix on that module, which
//! gives exact division-free routes to inverses (Cramer) and to power
//! recurrences (Cayley–Hamilton) that the geometric series cannot reach.

use crate::novikov::NovikovScalar;
use crate::qring::{quantum_product, ManifoldData, QElement, QringError};
use crate::rat::Rat;

/// Slice coordinates: `(class index, forced q-power)` per basis class.
pub fn slice_basis(m: &ManifoldData) -> Vec<(usize, i64)> {
    m.basis
        .iter()
        .enumerate()
        .map(|(i, b)| (i, (m.dim() as i64 - b.degree as i64) / 2))
        .collect()
}

/// Write a degree-2n homogeneous element in slice coordinates.
pub fn to_slice(u: &QElement, m: &ManifoldData) -> Option<Vec<NovikovScalar>> {
    if !u.is_zero() && u.homogeneous_degree(m) != Some(m.dim() as i64) {
        return None;
    }
    let sb = slice_basis(m);
    let mut out = vec![NovikovScalar::zero(); sb.len()];
    for (slot, (c, d)) in sb.iter().enumerate() {
        out[slot] = u.coefficient(*c, *d);
    }
    Some(out)
}

pub fn from_slice(v: &[NovikovScalar], m: &ManifoldData) -> QElement {
    let sb = slice_basis(m);
    let mut out = QElement::zero();
    for (slot, s) in v.iter().enumerate() {
        let (c, d) = sb[slot];
        out.add_term(c, d, s.clone());
    }
    out
}

/// Matrix of quantum multiplication by `u` on the slice (columns indexed by
/// the slice basis).
pub fn mult_matrix(u: &QElement, m: &ManifoldData) -> Option<Vec<Vec<NovikovScalar>>> {
    to_slice(u, m)?;
    let sb = slice_basis(m);
    let mut cols = Vec::with_capacity(sb.len());
    for &(c, d) in &sb {
        let e = QElement::from_term(c, d, NovikovScalar::one());
        let p = quantum_product(u, &e, m);
        cols.push(to_slice(&p, m)?);
    }
    // row-major
    let n = sb.len();
    let mut rows = vec![vec![NovikovScalar::zero(); n]; n];
    for (j, col) in cols.into_iter().enumerate() {
        for (i, s) in col.into_iter().enumerate() {
            rows[i][j] = s;
        }
    }
    Some(rows)
}

/// Division-free determinant of a Λ-matrix (Laplace expansion; slices are
/// small).
pub fn det(mat: &[Vec<NovikovScalar>]) -> NovikovScalar {
    let n = mat.len();
    if n == 0 {
        return NovikovScalar::one();
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = NovikovScalar::zero();
    for (j, pivot) in mat[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<NovikovScalar>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, s)| s.clone())
                    .collect()
            })
            .collect();
        let term = pivot.mul(&det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn replace_col(
    mat: &[Vec<NovikovScalar>],
    col: usize,
    v: &[NovikovScalar],
) -> Vec<Vec<NovikovScalar>> {
    mat.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| if j == col { v[i].clone() } else { s.clone() })
                .collect()
        })
        .collect()
}

/// Invert a degree-2n homogeneous unit by Cramer's rule on the slice.
///
/// Exact when the determinant is a monomial; otherwise the one division is
/// carried out to the requested floor.
pub fn invert_homogeneous(
    u: &QElement,
    m: &ManifoldData,
    floor: &Rat,
) -> Result<QElement, QringError> {
    let mat = mult_matrix(u, m).ok_or_else(|| {
        QringError::InversionPrecondition("element is not homogeneous of degree 2n".into())
    })?;
    let d = det(&mat);
    if d.is_zero() {
        return Err(QringError::NotInvertible(
            "multiplication matrix is singular".into(),
        ));
    }
    let d_inv = crate::qring::invert_scalar_to(&d, floor)?;
    let sb = slice_basis(m);
    let unit_slot = sb
        .iter()
        .position(|&(c, _)| c == m.unit_index())
        .expect("unit class in slice");
    let mut e_unit = vec![NovikovScalar::zero(); sb.len()];
    e_unit[unit_slot] = NovikovScalar::one();
    let mut coords = Vec::with_capacity(sb.len());
    for i in 0..sb.len() {
        let di = det(&replace_col(&mat, i, &e_unit));
        coords.push(di.mul(&d_inv));
    }
    let inv = from_slice(&coords, m);
    crate::qring::verify_inverse(u, &inv, m)?;
    Ok(inv)
}

/// Characteristic polynomial of the multiplication matrix: coefficients of
/// `s^0 … s^r` (monic).  Computed by Laplace expansion over Λ[s].
pub fn char_poly(mat: &[Vec<NovikovScalar>]) -> Vec<NovikovScalar> {
    type Poly = Vec<NovikovScalar>;
    fn p_add(a: &Poly, b: &Poly) -> Poly {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(NovikovScalar::zero);
                let y = b.get(i).cloned().unwrap_or_else(NovikovScalar::zero);
                x.add(&y)
            })
            .collect()
    }
    fn p_mul(a: &Poly, b: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![NovikovScalar::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        out
    }
    fn p_neg(a: &Poly) -> Poly {
        a.iter().map(|s| s.neg()).collect()
    }
    fn p_det(mat: &[Vec<Poly>]) -> Poly {
        let n = mat.len();
        if n == 0 {
            return vec![NovikovScalar::one()];
        }
        if n == 1 {
            return mat[0][0].clone();
        }
        let mut acc: Poly = vec![];
        for j in 0..n {
            if mat[0][j].iter().all(|s| s.is_zero()) {
                continue;
            }
            let minor: Vec<Vec<Poly>> = mat[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, p)| p.clone())
                        .collect()
                })
                .collect();
            let term = p_mul(&mat[0][j], &p_det(&minor));
            acc = if j % 2 == 0 { p_add(&acc, &term) } else { p_add(&acc, &p_neg(&term)) };
        }
        acc
    }

    let n = mat.len();
    let entries: Vec<Vec<Vec<NovikovScalar>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // (sI − M)[i][j]
                    let mut p = vec![mat[i][j].neg()];
                    if i == j {
                        p.push(NovikovScalar::one());
                    }
                    p
                })
                .collect()
        })
        .collect();
    let mut chi = p_det(&entries);
    chi.resize(n + 1, NovikovScalar::zero());
    chi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::bundled;
    use crate::rat::{rat, rat_i64};

    #[test]
    fn slice_round_trip() {
        let m = bundled("blowup_cp2").unwrap();
        let mut u = QElement::unit(&m);
        u.add_term(
            m.class_index("L").unwrap(),
            1,
            NovikovScalar::monomial(rat_i64(2), rat(1, 10)),
        );
        let v = to_slice(&u, &m).unwrap();
        assert_eq!(from_slice(&v, &m), u);
        // inhomogeneous elements have no slice form
        let mut bad = QElement::unit(&m);
        bad.add_term(m.class_index("L").unwrap(), 0, NovikovScalar::one());
        assert!(to_slice(&bad, &m).is_none());
    }

    #[test]
    fn mult_matrix_reproduces_products() {
        let m = bundled("blowup_cp2").unwrap();
        let l = m.class_index("L").unwrap();
        let u = QElement::from_term(l, 1, NovikovScalar::one());
        let mat = mult_matrix(&u, &m).unwrap();
        // apply the matrix to the unit column and compare against the product
        let sb = slice_basis(&m);
        let unit_slot = sb.iter().position(|&(c, _)| c == m.unit_index()).unwrap();
        let applied = from_slice(
            &(0..sb.len()).map(|i| mat[i][unit_slot].clone()).collect::<Vec<_>>(),
            &m,
        );
        assert_eq!(applied, u);
    }

    #[test]
    fn char_poly_of_t4_lower_part_is_sq_times_s_minus_one() {
        // x̃ = ε⊗q·t^δ in the T⁴ blow-up slice satisfies x̃³ = x̃².
        let m = bundled("blowup_t4").unwrap();
        let delta = rat(1, 10);
        let x = QElement::from_term(
            m.class_index("e").unwrap(),
            1,
            NovikovScalar::t_pow(delta.clone()),
        );
        let mat = mult_matrix(&x, &m).unwrap();
        let chi = char_poly(&mat);
        // χ(s) = s³ − s²
        assert_eq!(chi.len(), 4);
        assert!(chi[0].is_zero());
        assert!(chi[1].is_zero());
        assert_eq!(chi[2], NovikovScalar::monomial(rat_i64(-1), rat_i64(0)));
        assert_eq!(chi[3], NovikovScalar::one());
        // Cayley–Hamilton: x̃³ = x̃²
        let x2 = quantum_product(&x, &x, &m);
        let x3 = quantum_product(&x2, &x, &m);
        assert_eq!(x3, x2);
    }
}
