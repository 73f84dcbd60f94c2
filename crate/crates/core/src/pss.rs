use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::bitset::{powerset, BitSet};
use crate::boolsem::BoolMap;
use crate::error::{Error, Result};
use crate::matrix::RatMatrix;
use crate::rational::Rational;
use crate::rng::Rng;

/// Pseudo-simplicial partially ordered rational vector space: a finite direct
/// sum of simple pieces, each carried by ℚ^X with the strict ordering
/// (`f ≤ g` iff `f = g` or `f(x) < g(x)` for all `x`).
///
/// A space is stored as the list of its simple components' canonical basis
/// labels. The zero space is the empty component list; components are
/// nonempty and labels are unique across the whole space, so the simple
/// decomposition and the concatenated canonical basis are canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PssSpace {
    components: Vec<Vec<String>>,
}

impl PssSpace {
    pub fn new(components: Vec<Vec<String>>) -> Result<Self> {
        if components.iter().any(Vec::is_empty) {
            return Err(Error::Input(
                "simple components must be nonempty; the zero space is the empty list".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for c in components.iter().flatten() {
            if !seen.insert(c) {
                return Err(Error::Input(format!("duplicate basis label {c:?}")));
            }
        }
        Ok(PssSpace { components })
    }

    pub fn zero() -> Self {
        PssSpace {
            components: Vec::new(),
        }
    }

    pub fn simple(labels: Vec<String>) -> Result<Self> {
        PssSpace::new(vec![labels])
    }

    /// ℚ^n with the coordinatewise cone: n singleton components `e0 .. e{n-1}`.
    pub fn simplicial(n: usize) -> Self {
        PssSpace {
            components: (0..n).map(|i| vec![format!("e{i}")]).collect(),
        }
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn total_dim(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn comp_dim(&self, i: usize) -> usize {
        self.components[i].len()
    }

    pub fn comp_labels(&self, i: usize) -> &[String] {
        &self.components[i]
    }

    pub fn components(&self) -> &[Vec<String>] {
        &self.components
    }

    /// Coordinate range of component `i` in the concatenated basis.
    pub fn comp_range(&self, i: usize) -> core::ops::Range<usize> {
        let start: usize = self.components[..i].iter().map(Vec::len).sum();
        start..start + self.components[i].len()
    }

    /// Concatenation of spaces; labels must stay globally unique.
    pub fn concat(parts: &[PssSpace]) -> Result<PssSpace> {
        PssSpace::new(
            parts
                .iter()
                .flat_map(|p| p.components.iter().cloned())
                .collect(),
        )
    }

    /// The order-unit `1`: every coordinate 1.
    pub fn order_unit(&self) -> Vec<Rational> {
        vec![Rational::one(); self.total_dim()]
    }

    /// `1_{A_i}`: ones on component `i`, zero elsewhere.
    pub fn comp_order_unit(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.total_dim()];
        for k in self.comp_range(i) {
            v[k] = Rational::one();
        }
        v
    }

    fn check_dim(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.total_dim() {
            return Err(Error::Shape(format!(
                "vector length {} does not match space dimension {}",
                v.len(),
                self.total_dim()
            )));
        }
        Ok(())
    }

    /// Membership in the positive cone: on each component the restriction is
    /// either identically zero or strictly positive everywhere.
    pub fn in_cone(&self, v: &[Rational]) -> Result<bool> {
        self.check_dim(v)?;
        Ok((0..self.n_components()).all(|i| {
            let r = self.comp_range(i);
            v[r.clone()].iter().all(Rational::is_zero)
                || v[r].iter().all(Rational::is_positive)
        }))
    }

    /// Strictly positive elements of the cone (nonzero cone members).
    pub fn in_cone_strict(&self, v: &[Rational]) -> Result<bool> {
        Ok(self.in_cone(v)? && v.iter().any(|x| !x.is_zero()))
    }

    /// The strict partial order of the space: `a ≤ b` iff `b − a` is in the
    /// cone.
    pub fn leq(&self, a: &[Rational], b: &[Rational]) -> Result<bool> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let diff: Vec<Rational> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        self.in_cone(&diff)
    }

    /// The archimedean (coordinatewise) order. For pseudo-simplicial spaces
    /// the archimedean quotient is the simplicial space on the same basis, so
    /// `x ≤ᵃʳᶜʰ y` reduces to a coordinatewise comparison.
    pub fn arch_leq(&self, a: &[Rational], b: &[Rational]) -> Result<bool> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(a.iter().zip(b).all(|(x, y)| x <= y))
    }

    fn arch_nonneg(&self, v: &[Rational]) -> Result<bool> {
        self.check_dim(v)?;
        Ok(v.iter().all(|x| !x.is_negative()))
    }

    /// The λ-indexed comparison family on positive elements.
    pub fn rel_lambda(
        &self,
        a: &[Rational],
        b: &[Rational],
        lambda: &Rational,
        kind: RelKind,
    ) -> Result<bool> {
        if !lambda.is_positive() {
            return Err(Error::Precondition("λ must be positive".into()));
        }
        let scaled = |v: &[Rational]| -> Vec<Rational> { v.iter().map(|x| x * lambda).collect() };
        match kind {
            RelKind::Prop | RelKind::Asymp => {
                if !self.in_cone(a)? || !self.in_cone(b)? {
                    return Err(Error::Precondition(
                        "∝_λ arguments must lie in the positive cone".into(),
                    ));
                }
                let fwd = self.leq(a, &scaled(b))?;
                Ok(match kind {
                    RelKind::Prop => fwd,
                    _ => fwd && self.leq(b, &scaled(a))?,
                })
            }
            RelKind::ArchProp | RelKind::ArchAsymp => {
                if !self.arch_nonneg(a)? || !self.arch_nonneg(b)? {
                    return Err(Error::Precondition(
                        "∝ᵃʳᶜʰ_λ arguments must be archimedean-nonnegative".into(),
                    ));
                }
                let fwd = self.arch_leq(a, &scaled(b))?;
                Ok(match kind {
                    RelKind::ArchProp => fwd,
                    _ => fwd && self.arch_leq(b, &scaled(a))?,
                })
            }
        }
    }
}

/// Which of the λ-relations to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelKind {
    /// `a ∝_λ b`: `a ≤ λb` in the strict order.
    Prop,
    /// `a ≍_λ b`: both directions in the strict order.
    Asymp,
    /// `a ∝ᵃʳᶜʰ_λ b`: `a ≤ λb` coordinatewise.
    ArchProp,
    /// `a ≍ᵃʳᶜʰ_λ b`: both directions coordinatewise.
    ArchAsymp,
}

/// Number of compact ideals is `2^m` for `m` components; the compact ideals
/// are exactly the component subsets.
pub fn idc_space(a: &PssSpace) -> usize {
    a.n_components()
}

/// All compact ideals of `a` as component subsets, in canonical order.
pub fn compact_ideals(a: &PssSpace) -> Result<Vec<CompactIdeal>> {
    Ok(powerset(a.n_components())?
        .into_iter()
        .map(CompactIdeal)
        .collect())
}

/// Compact ideal of a pseudo-simplicial space: a subset of its components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CompactIdeal(pub BitSet);

/// Positive homomorphism between pseudo-simplicial spaces, validated on
/// construction.
///
/// Positivity is checked blockwise: a block between simple pieces maps the
/// cone into the cone exactly when it is identically zero or has all entries
/// ≥ 0 with every row sum > 0. One direction is immediate; conversely,
/// feeding the order-unit of the source piece perturbed along one basis
/// vector forces every column to be zero or the row sums positive, and a
/// negative entry can always be exposed by weighting its column heavily.
/// Blockwise necessity follows by zeroing the other source components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PssHom {
    src: PssSpace,
    tgt: PssSpace,
    matrix: RatMatrix,
}

impl PssHom {
    /// Validate `matrix` as a positive homomorphism `src → tgt`. On failure
    /// the error names the offending block and row and carries a strictly
    /// positive witness vector whose image leaves the cone.
    pub fn new(src: PssSpace, tgt: PssSpace, matrix: RatMatrix) -> Result<Self> {
        if matrix.rows() != tgt.total_dim() || matrix.cols() != src.total_dim() {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                tgt.total_dim(),
                src.total_dim()
            )));
        }
        for i in 0..src.n_components() {
            for j in 0..tgt.n_components() {
                Self::validate_block(&src, &tgt, &matrix, j, i)?;
            }
        }
        Ok(PssHom { src, tgt, matrix })
    }

    fn validate_block(
        src: &PssSpace,
        tgt: &PssSpace,
        matrix: &RatMatrix,
        j: usize,
        i: usize,
    ) -> Result<()> {
        let rs = tgt.comp_range(j);
        let cs = src.comp_range(i);
        let zero = rs
            .clone()
            .all(|r| cs.clone().all(|c| matrix.get(r, c).is_zero()));
        if zero {
            return Ok(());
        }
        // negative entry: weight its column until the row goes negative
        for r in rs.clone() {
            for c in cs.clone() {
                if matrix.get(r, c).is_negative() {
                    let witness = negative_entry_witness(src, matrix, i, r, c);
                    let image = matrix.apply(&witness).expect("dims agree");
                    return Err(Error::Precondition(format!(
                        "positivity fails in block (target {j}, source {i}): entry ({r},{c}) < 0; \
                         witness {} has image {} outside the cone",
                        fmt_vec(&witness),
                        fmt_vec(&image)
                    )));
                }
            }
        }
        // nonnegative nonzero block: every row sum must be strictly positive
        for r in rs {
            let sum: Rational = cs.clone().map(|c| matrix.get(r, c)).sum();
            if !sum.is_positive() {
                let witness = src.comp_order_unit(i);
                let image = matrix.apply(&witness).expect("dims agree");
                return Err(Error::Precondition(format!(
                    "positivity fails in block (target {j}, source {i}): row {r} sums to zero in \
                     a nonzero block; witness {} has image {} outside the cone",
                    fmt_vec(&witness),
                    fmt_vec(&image)
                )));
            }
        }
        Ok(())
    }

    pub fn zero(src: PssSpace, tgt: PssSpace) -> Self {
        let matrix = RatMatrix::zero(tgt.total_dim(), src.total_dim());
        PssHom { src, tgt, matrix }
    }

    pub fn identity(space: PssSpace) -> Self {
        let matrix = RatMatrix::identity(space.total_dim());
        PssHom {
            src: space.clone(),
            tgt: space,
            matrix,
        }
    }

    pub fn src(&self) -> &PssSpace {
        &self.src
    }

    pub fn tgt(&self) -> &PssSpace {
        &self.tgt
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Composite `g ∘ f`. Validity of the product is re-established by
    /// construction (nonnegative blocks with positive row sums compose to
    /// nonnegative blocks with positive row sums).
    pub fn compose(g: &PssHom, f: &PssHom) -> Result<PssHom> {
        if f.tgt != g.src {
            return Err(Error::Shape(
                "composition: inner spaces do not match".into(),
            ));
        }
        PssHom::new(f.src.clone(), g.tgt.clone(), g.matrix.mul(&f.matrix)?)
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.matrix.apply(v)
    }

    pub fn block_is_zero(&self, j: usize, i: usize) -> bool {
        let rs = self.tgt.comp_range(j);
        let cs = self.src.comp_range(i);
        rs.clone()
            .all(|r| cs.clone().all(|c| self.matrix.get(r, c).is_zero()))
    }

    pub fn block(&self, j: usize, i: usize) -> RatMatrix {
        self.matrix
            .submatrix(self.tgt.comp_range(j), self.src.comp_range(i))
    }

    /// The induced map on compact ideals: atom `i` goes to the set of target
    /// components its block hits.
    pub fn idc(&self) -> BoolMap {
        let m = self.src.n_components();
        let n = self.tgt.n_components();
        let images = (0..m)
            .map(|i| {
                let mut s = BitSet::empty(n);
                for j in 0..n {
                    if !self.block_is_zero(j, i) {
                        s = s.with(j);
                    }
                }
                s
            })
            .collect();
        BoolMap::new(m, n, images).expect("arities agree")
    }

    /// Sum of two homomorphisms with the same endpoints. The sum of valid
    /// homs is valid (cone is closed under addition), but this re-validates.
    pub fn add(&self, other: &PssHom) -> Result<PssHom> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::Shape("sum of homs with different endpoints".into()));
        }
        PssHom::new(
            self.src.clone(),
            self.tgt.clone(),
            self.matrix.add(&other.matrix)?,
        )
    }

    /// Random valid homomorphism whose block-support pattern is `pattern`
    /// (atom `i` of the source hits exactly the components in its image).
    pub fn random_with_pattern(
        rng: &mut Rng,
        src: &PssSpace,
        tgt: &PssSpace,
        pattern: &BoolMap,
    ) -> Result<PssHom> {
        if pattern.src_arity() != src.n_components() || pattern.tgt_arity() != tgt.n_components() {
            return Err(Error::Shape("pattern arities do not match spaces".into()));
        }
        let mut matrix = RatMatrix::zero(tgt.total_dim(), src.total_dim());
        for i in 0..src.n_components() {
            for j in pattern.atom_image(i).iter() {
                let rs = tgt.comp_range(j);
                let cs = src.comp_range(i);
                for r in rs.clone() {
                    for c in cs.clone() {
                        let num = rng.range(0, 4) as i64;
                        let den = rng.range(1, 3) as i64;
                        matrix.set(r, c, Rational::new(num, den));
                    }
                }
                // force positive row sums
                for r in rs {
                    let sum: Rational = cs.clone().map(|c| matrix.get(r, c)).sum();
                    if !sum.is_positive() {
                        let c = cs.start + rng.below(cs.len());
                        matrix.set(r, c, Rational::new(rng.range(1, 4) as i64, 1));
                    }
                }
            }
        }
        PssHom::new(src.clone(), tgt.clone(), matrix)
    }

    /// Random valid homomorphism with a random block-support pattern.
    pub fn random(rng: &mut Rng, src: &PssSpace, tgt: &PssSpace) -> PssHom {
        let pattern = BoolMap::random(rng, src.n_components(), tgt.n_components());
        PssHom::random_with_pattern(rng, src, tgt, &pattern).expect("arities match")
    }
}

/// Witness for a negative entry at `(r, c)` in the block of source component
/// `i`: strictly positive on that component, with column `c` weighted so the
/// image row `r` becomes negative.
fn negative_entry_witness(
    src: &PssSpace,
    matrix: &RatMatrix,
    i: usize,
    r: usize,
    c: usize,
) -> Vec<Rational> {
    let cs = src.comp_range(i);
    let rest: Rational = cs
        .clone()
        .filter(|&cc| cc != c)
        .map(|cc| matrix.get(r, cc).abs())
        .sum();
    let neg = matrix.get(r, c).abs();
    let weight = Rational::from_bigint((rest / neg).floor_int() + BigInt::from(1));
    let mut v = vec![Rational::zero(); src.total_dim()];
    for k in cs {
        v[k] = if k == c {
            weight.clone()
        } else {
            Rational::one()
        };
    }
    v
}

fn fmt_vec(v: &[Rational]) -> String {
    let mut s = String::from("[");
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&x.to_string());
    }
    s.push(']');
    s
}
