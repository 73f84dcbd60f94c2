//! Constructive refinement in the simplicial cone (ℚ⁺)^d.
//!
//! Everything is coordinatewise and exact: Riesz refinement of two
//! decompositions, the common refinement of a whole family of decompositions,
//! and the λ-weighted subset decomposition used by the generic-map
//! factorization.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One element written as an exact sum of nonnegative parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    total: Vec<Rational>,
    parts: Vec<Vec<Rational>>,
}

impl Decomposition {
    pub fn new(total: Vec<Rational>, parts: Vec<Vec<Rational>>) -> Result<Self> {
        let d = total.len();
        for (k, p) in parts.iter().enumerate() {
            if p.len() != d {
                return Err(Error::Shape(format!("part {k} has wrong dimension")));
            }
            if p.iter().any(Rational::is_negative) {
                return Err(Error::Precondition(format!("part {k} is not nonnegative")));
            }
        }
        let sum = vec_sum(d, parts.iter());
        if sum != total {
            return Err(Error::Precondition(
                "parts do not sum to the stated total".into(),
            ));
        }
        Ok(Decomposition { total, parts })
    }

    pub fn total(&self) -> &[Rational] {
        &self.total
    }

    pub fn parts(&self) -> &[Vec<Rational>] {
        &self.parts
    }

    pub fn n_parts(&self) -> usize {
        self.parts.len()
    }
}

fn vec_sum<'a>(dim: usize, parts: impl Iterator<Item = &'a Vec<Rational>>) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); dim];
    for p in parts {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
    }
    acc
}

/// Deterministic interpolant: the coordinatewise maximum of `lowers`, checked
/// against every upper bound.
pub fn interpolate(lowers: &[Vec<Rational>], uppers: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    let first = lowers
        .first()
        .ok_or_else(|| Error::Precondition("interpolation needs at least one lower bound".into()))?;
    let d = first.len();
    if lowers.iter().chain(uppers).any(|v| v.len() != d) {
        return Err(Error::Shape("interpolation bounds of mixed dimension".into()));
    }
    let mut x = first.clone();
    for lo in &lowers[1..] {
        for (xi, li) in x.iter_mut().zip(lo) {
            if li > xi {
                *xi = li.clone();
            }
        }
    }
    for (k, up) in uppers.iter().enumerate() {
        for (c, (xi, ui)) in x.iter().zip(up).enumerate() {
            if xi > ui {
                return Err(Error::Precondition(format!(
                    "no interpolant: lower bound exceeds upper bound {k} at coordinate {c}"
                )));
            }
        }
    }
    Ok(x)
}

/// Riesz refinement of two decompositions of the same total, computed
/// coordinatewise by the greedy minimum rule in row-major order.
///
/// Returns `c` with `c[k][l] ≥ 0`, row sums `u.parts[k]` and column sums
/// `v.parts[l]`, all exact.
pub fn riesz_refine(u: &Decomposition, v: &Decomposition) -> Result<Vec<Vec<Vec<Rational>>>> {
    if u.total != v.total {
        return Err(Error::Precondition(
            "riesz refinement needs equal totals".into(),
        ));
    }
    let d = u.total.len();
    let m = u.n_parts();
    let n = v.n_parts();
    let mut table = vec![vec![vec![Rational::zero(); d]; n]; m];
    for coord in 0..d {
        let mut row_left: Vec<Rational> = u.parts.iter().map(|p| p[coord].clone()).collect();
        let mut col_left: Vec<Rational> = v.parts.iter().map(|p| p[coord].clone()).collect();
        for k in 0..m {
            for l in 0..n {
                let take = row_left[k].clone().min(col_left[l].clone());
                if take.is_zero() {
                    continue;
                }
                row_left[k] -= &take;
                col_left[l] -= &take;
                table[k][l][coord] = take;
            }
        }
        // equal totals guarantee the greedy pass exhausts both marginals
        debug_assert!(row_left.iter().all(Rational::is_zero));
        debug_assert!(col_left.iter().all(Rational::is_zero));
    }
    Ok(table)
}

/// Table indexed by tuples `φ ∈ Π T_i` in lexicographic order (leftmost index
/// most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleTable {
    radices: Vec<usize>,
    values: Vec<Vec<Rational>>,
}

impl TupleTable {
    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat position of a tuple.
    pub fn position(&self, phi: &[usize]) -> usize {
        assert_eq!(phi.len(), self.radices.len());
        let mut pos = 0;
        for (t, r) in phi.iter().zip(&self.radices) {
            debug_assert!(t < r);
            pos = pos * r + t;
        }
        pos
    }

    pub fn value(&self, phi: &[usize]) -> &[Rational] {
        &self.values[self.position(phi)]
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    /// Decode the tuple at a flat position.
    pub fn tuple_at(&self, mut pos: usize) -> Vec<usize> {
        let mut phi = vec![0; self.radices.len()];
        for k in (0..self.radices.len()).rev() {
            phi[k] = pos % self.radices[k];
            pos /= self.radices[k];
        }
        phi
    }
}

/// Common refinement of a family of decompositions of one element `a`:
/// nonnegative `x_φ` with `a = Σ_φ x_φ` and, for every index `i` and part
/// `j`, `decomps[i].parts[j] = Σ_{φ(i)=j} x_φ`.
///
/// Computed by folding one decomposition at a time into the table with
/// [`riesz_refine`], which mirrors the inductive proof of the refinement
/// property for families.
pub fn mult_refine(decomps: &[Decomposition]) -> Result<TupleTable> {
    let first = decomps
        .first()
        .ok_or_else(|| Error::Precondition("refinement of an empty family".into()))?;
    let total = first.total.clone();
    let d = total.len();
    if total.iter().any(Rational::is_negative) {
        return Err(Error::Precondition("total must be nonnegative".into()));
    }
    for dec in decomps {
        if dec.total != total {
            return Err(Error::Precondition(
                "family members decompose different totals".into(),
            ));
        }
    }
    let mut radices = vec![first.n_parts()];
    let mut values: Vec<Vec<Rational>> = first.parts.clone();
    for dec in &decomps[1..] {
        let current = Decomposition::new(total.clone(), values.clone())?;
        let table = riesz_refine(&current, dec)?;
        let mut next = Vec::with_capacity(values.len() * dec.n_parts());
        for row in table {
            for cell in row {
                next.push(cell);
            }
        }
        radices.push(dec.n_parts());
        values = next;
    }
    let _ = d;
    Ok(TupleTable { radices, values })
}

/// Table indexed by the subsets of `{0..k}` in binary-counter order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetTable {
    k: usize,
    values: Vec<Vec<Rational>>,
}

impl SubsetTable {
    pub fn index_arity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the subset with the given packed bits.
    pub fn value(&self, bits: u32) -> &[Rational] {
        &self.values[bits as usize]
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }
}

/// λ-weighted decomposition: given `a_i ≥ 0` with `a_i ≤ λ a_j`
/// coordinatewise for all `i, j`, produce nonnegative `b_X` (one per subset
/// `X` of the index set) with
///
/// `a_i = Σ_{X ∌ i} b_X + λ · Σ_{X ∋ i} b_X` for every `i`, exactly.
///
/// For λ > 1 this runs the constructive argument: interpolate between the
/// systems `λ⁻¹ a_i ≤ a_j` to get `a`, split `a_i = a + a'_i` and
/// `(λ−1) a = a'_i + a''_i`, refine the family of two-part decompositions,
/// and rescale by `λ−1`. For λ = 1 the hypothesis forces all `a_i` equal and
/// `b_∅ = a` is the closed form.
pub fn lamas_decompose(a_list: &[Vec<Rational>], lambda: &Rational) -> Result<SubsetTable> {
    let k = a_list.len();
    if k == 0 || k > 20 {
        return Err(Error::Precondition(format!(
            "index family size {k} unsupported (need 1..=20)"
        )));
    }
    let d = a_list[0].len();
    if a_list.iter().any(|a| a.len() != d) {
        return Err(Error::Shape("family members of mixed dimension".into()));
    }
    let one = Rational::one();
    if lambda < &one {
        return Err(Error::Precondition("λ must be at least 1".into()));
    }
    for (i, a) in a_list.iter().enumerate() {
        if a.iter().any(Rational::is_negative) {
            return Err(Error::Precondition(format!("a_{i} is not nonnegative")));
        }
    }
    for i in 0..k {
        for j in 0..k {
            for c in 0..d {
                if a_list[i][c] > lambda * &a_list[j][c] {
                    return Err(Error::Precondition(format!(
                        "hypothesis a_{i} ≤ λ·a_{j} fails at coordinate {c}"
                    )));
                }
            }
        }
    }

    if lambda == &one {
        // all a_i coincide; the empty set carries everything
        let mut values = vec![vec![Rational::zero(); d]; 1 << k];
        values[0] = a_list[0].clone();
        return Ok(SubsetTable { k, values });
    }

    let lam_inv = lambda.recip();
    let scaled: Vec<Vec<Rational>> = a_list
        .iter()
        .map(|a| a.iter().map(|x| x * &lam_inv).collect())
        .collect();
    let a = interpolate(&scaled, a_list)?;
    let lam1 = lambda - &one;
    let shrunk: Vec<Rational> = a.iter().map(|x| x * &lam1).collect();
    let mut decomps = Vec::with_capacity(k);
    for ai in a_list {
        let a_hi: Vec<Rational> = ai.iter().zip(&a).map(|(x, y)| x - y).collect();
        let a_lo: Vec<Rational> = shrunk.iter().zip(&a_hi).map(|(x, y)| x - y).collect();
        // part 0 ↔ i outside the subset, part 1 ↔ i inside
        decomps.push(Decomposition::new(shrunk.clone(), vec![a_lo, a_hi])?);
    }
    let table = mult_refine(&decomps)?;
    let mut values = vec![vec![Rational::zero(); d]; 1 << k];
    for pos in 0..table.len() {
        let phi = table.tuple_at(pos);
        let bits: u32 = phi
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == 1)
            .map(|(i, _)| 1u32 << i)
            .sum();
        values[bits as usize] = table.values()[pos]
            .iter()
            .map(|x| x / &lam1)
            .collect();
    }
    Ok(SubsetTable { k, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use crate::rng::Rng;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| Rational::int(x)).collect()
    }

    #[test]
    fn interpolate_coordinatewise_max() {
        let x = interpolate(&[v(&[1, 3]), v(&[2, 2])], &[v(&[3, 4])]).unwrap();
        assert_eq!(x, v(&[2, 3]));
        assert_eq!(interpolate(&[v(&[5])], &[v(&[5])]).unwrap(), v(&[5]));
        assert!(matches!(
            interpolate(&[v(&[2])], &[v(&[1])]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn riesz_scalar_golden() {
        let u = Decomposition::new(v(&[5]), vec![v(&[2]), v(&[3])]).unwrap();
        let w = Decomposition::new(v(&[5]), vec![v(&[4]), v(&[1])]).unwrap();
        let c = riesz_refine(&u, &w).unwrap();
        assert_eq!(c[0][0], v(&[2]));
        assert_eq!(c[0][1], v(&[0]));
        assert_eq!(c[1][0], v(&[2]));
        assert_eq!(c[1][1], v(&[1]));
    }

    #[test]
    fn riesz_identical_decompositions_give_diagonal() {
        let u = Decomposition::new(v(&[6, 2]), vec![v(&[1, 1]), v(&[2, 0]), v(&[3, 1])]).unwrap();
        let c = riesz_refine(&u, &u).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                if k == l {
                    assert_eq!(c[k][l], u.parts()[k]);
                } else {
                    assert!(c[k][l].iter().all(Rational::is_zero));
                }
            }
        }
    }

    #[test]
    fn riesz_vector_golden() {
        let u = Decomposition::new(v(&[1, 1]), vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        let w = Decomposition::new(v(&[1, 1]), vec![v(&[0, 1]), v(&[1, 0])]).unwrap();
        let c = riesz_refine(&u, &w).unwrap();
        assert_eq!(c[0][0], v(&[0, 0]));
        assert_eq!(c[0][1], v(&[1, 0]));
        assert_eq!(c[1][0], v(&[0, 1]));
        assert_eq!(c[1][1], v(&[0, 0]));
    }

    #[test]
    fn mult_refine_base_and_singleton_cases() {
        let d0 = Decomposition::new(v(&[3]), vec![v(&[1]), v(&[2])]).unwrap();
        let t = mult_refine(&[d0.clone()]).unwrap();
        assert_eq!(t.values(), d0.parts());

        let single = Decomposition::new(v(&[4]), vec![v(&[4])]).unwrap();
        let t = mult_refine(&[single.clone(), single.clone()]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.value(&[0, 0]), v(&[4]).as_slice());
    }

    #[test]
    fn mult_refine_scalar_golden() {
        let d0 = Decomposition::new(v(&[2]), vec![v(&[1]), v(&[1])]).unwrap();
        let d1 = Decomposition::new(v(&[2]), vec![v(&[2]), v(&[0])]).unwrap();
        let t = mult_refine(&[d0.clone(), d1.clone()]).unwrap();
        assert_eq!(t.len(), 4);
        verify_mult(&[d0, d1], &t);
    }

    pub(crate) fn verify_mult(decomps: &[Decomposition], t: &TupleTable) {
        let d = decomps[0].total().len();
        let total_sum = {
            let mut acc = vec![Rational::zero(); d];
            for val in t.values() {
                for (a, x) in acc.iter_mut().zip(val) {
                    *a += x;
                }
            }
            acc
        };
        assert_eq!(total_sum, decomps[0].total());
        for val in t.values() {
            assert!(val.iter().all(|x| !x.is_negative()));
        }
        for (i, dec) in decomps.iter().enumerate() {
            for (j, part) in dec.parts().iter().enumerate() {
                let mut acc = vec![Rational::zero(); d];
                for pos in 0..t.len() {
                    if t.tuple_at(pos)[i] == j {
                        for (a, x) in acc.iter_mut().zip(&t.values()[pos]) {
                            *a += x;
                        }
                    }
                }
                assert_eq!(&acc, part, "marginal (index {i}, part {j})");
            }
        }
    }

    pub(crate) fn verify_lamas(a_list: &[Vec<Rational>], lambda: &Rational, t: &SubsetTable) {
        let k = a_list.len();
        let d = a_list[0].len();
        assert_eq!(t.len(), 1 << k);
        for bits in 0..t.len() as u32 {
            assert!(t.value(bits).iter().all(|x| !x.is_negative()));
        }
        for (i, ai) in a_list.iter().enumerate() {
            let mut acc = vec![Rational::zero(); d];
            for bits in 0..t.len() as u32 {
                let weight = if bits >> i & 1 == 1 {
                    lambda.clone()
                } else {
                    Rational::one()
                };
                for (a, x) in acc.iter_mut().zip(t.value(bits)) {
                    *a += &weight * x;
                }
            }
            assert_eq!(&acc, ai, "λ-identity for index {i}");
        }
    }

    #[test]
    fn lamas_equal_pair_golden() {
        let t = lamas_decompose(&[v(&[2]), v(&[2])], &rat!(2)).unwrap();
        assert_eq!(t.value(0b11), v(&[1]).as_slice());
        assert_eq!(t.value(0b00), v(&[0]).as_slice());
        assert_eq!(t.value(0b01), v(&[0]).as_slice());
        assert_eq!(t.value(0b10), v(&[0]).as_slice());
        verify_lamas(&[v(&[2]), v(&[2])], &rat!(2), &t);
    }

    #[test]
    fn lamas_lambda_one_closed_form() {
        let a = v(&[3, 5]);
        let t = lamas_decompose(&[a.clone(), a.clone(), a.clone()], &rat!(1)).unwrap();
        assert_eq!(t.value(0), a.as_slice());
        for bits in 1..8u32 {
            assert!(t.value(bits).iter().all(Rational::is_zero));
        }
        verify_lamas(&[a.clone(), a.clone(), a.clone()], &rat!(1), &t);
    }

    #[test]
    fn lamas_single_index() {
        let a = v(&[4, 1]);
        let t = lamas_decompose(&[a.clone()], &rat!(2)).unwrap();
        verify_lamas(&[a], &rat!(2), &t);
    }

    #[test]
    fn lamas_hypothesis_violation_named() {
        let err = lamas_decompose(&[v(&[1]), v(&[3])], &rat!(2)).unwrap_err();
        match err {
            Error::Precondition(msg) => assert!(msg.contains("a_1 ≤ λ·a_0"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lamas_sum_identity_when_lambda_gt_one() {
        // Σ_X b_X equals the interpolant used internally
        let mut rng = Rng::new(5);
        for _ in 0..50 {
            let k = rng.range(1, 3);
            let d = rng.range(1, 3);
            let lambda = Rational::new(rng.range(2, 4) as i64, 1);
            let base: Vec<Rational> = (0..d)
                .map(|_| Rational::new(rng.range(1, 6) as i64, rng.range(1, 3) as i64))
                .collect();
            // family within a λ band around base
            let a_list: Vec<Vec<Rational>> = (0..k)
                .map(|_| {
                    base.iter()
                        .map(|b| {
                            let num = rng.range(1, 3) as i64;
                            b * &Rational::new(num, 2)
                        })
                        .collect()
                })
                .collect();
            if lamas_decompose(&a_list, &lambda).is_err() {
                continue; // sampled family missed the hypothesis band
            }
            let t = lamas_decompose(&a_list, &lambda).unwrap();
            verify_lamas(&a_list, &lambda, &t);
            let lam_inv = lambda.recip();
            let scaled: Vec<Vec<Rational>> = a_list
                .iter()
                .map(|a| a.iter().map(|x| x * &lam_inv).collect())
                .collect();
            let interp = interpolate(&scaled, &a_list).unwrap();
            let mut sum = vec![Rational::zero(); d];
            for bits in 0..t.len() as u32 {
                for (s, x) in sum.iter_mut().zip(t.value(bits)) {
                    *s += x;
                }
            }
            assert_eq!(sum, interp);
        }
    }
}
