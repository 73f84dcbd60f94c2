use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest poset size accepted by the dismantling search.
pub const DISMANTLE_CAP: usize = 24;

/// Finite partial order on named elements.
///
/// The relation is stored as a dense boolean matrix and validated on
/// construction: reflexive, antisymmetric, transitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    /// `leq[x * n + y]` iff `x ≤ y`.
    leq: Vec<bool>,
}

/// Witness that a poset is dismantlable: removing elements in sequence order,
/// each removed element is doubly-irreducible in the remaining subposet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DismantlingOrder {
    pub removal_sequence: Vec<usize>,
}

/// Outcome of the dismantling search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dismantling {
    Order(DismantlingOrder),
    /// No removal sequence exists; `stuck` is a reachable subposet whose set
    /// of doubly-irreducible elements is empty.
    Stuck(Vec<usize>),
}

impl Poset {
    pub fn from_leq(elements: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = elements.len();
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(Error::Input("leq matrix must be n x n".into()));
        }
        let poset = Poset {
            elements,
            leq: leq.into_iter().flatten().collect(),
        };
        poset.validate()?;
        Ok(poset)
    }

    /// Order given by the reflexive-transitive closure of a cover list.
    /// Fails when the closure is not antisymmetric (a cycle).
    pub fn from_covers(elements: Vec<String>, covers: &[(usize, usize)]) -> Result<Self> {
        let n = elements.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in covers {
            if a >= n || b >= n {
                return Err(Error::Input(format!("cover ({a},{b}) out of range")));
            }
            leq[a * n + b] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::Input(format!(
                        "cover closure is not antisymmetric: {} and {} are in a cycle",
                        elements[i], elements[j]
                    )));
                }
            }
        }
        Ok(Poset { elements, leq })
    }

    pub fn chain(n: usize) -> Self {
        let elements = (0..n).map(|i| format!("c{i}")).collect();
        let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::from_covers(elements, &covers).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> Self {
        let elements = (0..n).map(|i| format!("a{i}")).collect();
        Poset::from_covers(elements, &[]).expect("antichain is a poset")
    }

    /// The Boolean lattice `2^k` ordered by inclusion; `boolean_lattice(2)` is
    /// the square and `boolean_lattice(3)` the cube.
    pub fn boolean_lattice(k: usize) -> Self {
        assert!(k <= 5, "boolean_lattice is a small test helper");
        let n = 1usize << k;
        let elements = (0..n).map(|s| format!("s{s}")).collect();
        let mut leq = vec![vec![false; n]; n];
        #[allow(clippy::needless_range_loop)]
        for a in 0..n {
            for b in 0..n {
                leq[a][b] = a & !b == 0;
            }
        }
        Poset::from_leq(elements, leq).expect("powerset order is a poset")
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if !self.leq[i * n + i] {
                return Err(Error::Input(format!("relation not reflexive at {}", self.elements[i])));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq[i * n + j] && self.leq[j * n + i] {
                    return Err(Error::Input(format!(
                        "relation not antisymmetric at {} , {}",
                        self.elements[i], self.elements[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.leq[i * n + j] {
                    for k in 0..n {
                        if self.leq[j * n + k] && !self.leq[i * n + k] {
                            return Err(Error::Input(format!(
                                "relation not transitive at {} ≤ {} ≤ {}",
                                self.elements[i], self.elements[j], self.elements[k]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.len() + y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// All pairs `x ≤ y`, including the diagonal, in index order.
    pub fn pairs_leq(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.leq(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Cover pairs `(x, y)`: `x < y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.is_cover(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn is_cover(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) && (0..self.len()).all(|z| !(self.lt(x, z) && self.lt(z, y)))
    }

    fn is_cover_in(&self, x: usize, y: usize, mask: u32) -> bool {
        debug_assert!(mask >> x & 1 == 1 && mask >> y & 1 == 1);
        self.lt(x, y)
            && (0..self.len())
                .all(|z| mask >> z & 1 == 0 || !(self.lt(x, z) && self.lt(z, y)))
    }

    /// Upper covers of `x` within the subposet given by `mask`.
    pub fn up_covers_in(&self, x: usize, mask: u32) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| mask >> y & 1 == 1 && self.is_cover_in(x, y, mask))
            .collect()
    }

    /// Lower covers of `x` within the subposet given by `mask`.
    pub fn down_covers_in(&self, x: usize, mask: u32) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| mask >> y & 1 == 1 && self.is_cover_in(y, x, mask))
            .collect()
    }

    fn full_mask(&self) -> u32 {
        if self.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.len()) - 1
        }
    }

    /// Elements with at most one upper cover and at most one lower cover.
    pub fn doubly_irreducible(&self) -> Vec<usize> {
        self.doubly_irreducible_in(self.full_mask())
    }

    pub fn doubly_irreducible_in(&self, mask: u32) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| {
                mask >> x & 1 == 1
                    && self.up_covers_in(x, mask).len() <= 1
                    && self.down_covers_in(x, mask).len() <= 1
            })
            .collect()
    }

    /// Longest chain, counted in elements.
    pub fn height(&self) -> usize {
        let n = self.len();
        let order = self.linear_extension();
        let mut h = vec![0usize; n];
        let mut best = 0;
        for &x in &order {
            let mut hx = 1;
            for y in 0..n {
                if self.lt(y, x) {
                    hx = hx.max(h[y] + 1);
                }
            }
            h[x] = hx;
            best = best.max(hx);
        }
        best
    }

    /// Indices sorted compatibly with the order (smaller first).
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut remaining: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(n);
        while !remaining.is_empty() {
            // smallest-index minimal element, hence deterministic
            let pos = remaining
                .iter()
                .position(|&x| remaining.iter().all(|&y| !self.lt(y, x)))
                .expect("finite poset has a minimal element");
            out.push(remaining.remove(pos));
        }
        out
    }

    /// Backtracking search for a dismantling order, memoized on the remaining
    /// element set. Candidates are tried in ascending index order, so the
    /// returned order is deterministic.
    pub fn dismantle(&self) -> Result<Dismantling> {
        if self.len() > DISMANTLE_CAP {
            return Err(Error::Resource(format!(
                "dismantling search capped at {DISMANTLE_CAP} elements, got {}",
                self.len()
            )));
        }
        let mut failed: BTreeMap<u32, ()> = BTreeMap::new();
        let mut order = Vec::with_capacity(self.len());
        let mut stuck: Option<u32> = None;
        if self.search(self.full_mask(), &mut failed, &mut order, &mut stuck) {
            Ok(Dismantling::Order(DismantlingOrder {
                removal_sequence: order,
            }))
        } else {
            let mask = stuck.expect("failed search must reach a stuck subposet");
            Ok(Dismantling::Stuck(
                (0..self.len()).filter(|&x| mask >> x & 1 == 1).collect(),
            ))
        }
    }

    fn search(
        &self,
        mask: u32,
        failed: &mut BTreeMap<u32, ()>,
        order: &mut Vec<usize>,
        stuck: &mut Option<u32>,
    ) -> bool {
        if mask == 0 {
            return true;
        }
        if failed.contains_key(&mask) {
            return false;
        }
        let irr = self.doubly_irreducible_in(mask);
        if irr.is_empty() {
            if stuck.is_none() {
                *stuck = Some(mask);
            }
            failed.insert(mask, ());
            return false;
        }
        for x in irr {
            order.push(x);
            if self.search(mask & !(1 << x), failed, order, stuck) {
                return true;
            }
            order.pop();
        }
        failed.insert(mask, ());
        false
    }

    pub fn dismantling_order(&self) -> Result<Option<DismantlingOrder>> {
        Ok(match self.dismantle()? {
            Dismantling::Order(o) => Some(o),
            Dismantling::Stuck(_) => None,
        })
    }
}

impl DismantlingOrder {
    /// Re-validate step by step: each removed element must be
    /// doubly-irreducible in the subposet that remains at its turn.
    pub fn validate(&self, p: &Poset) -> bool {
        if self.removal_sequence.len() != p.len() {
            return false;
        }
        let mut mask = p.full_mask();
        for &x in &self.removal_sequence {
            if mask >> x & 1 == 0 || !p.doubly_irreducible_in(mask).contains(&x) {
                return false;
            }
            mask &= !(1 << x);
        }
        mask == 0
    }
}

/// Exhaustive oracle used by the test suite: plain recursion over every
/// doubly-irreducible removal, no memoization. Exponential, fine for n ≤ 6.
pub fn dismantlable_by_exhaustion(p: &Poset) -> bool {
    fn rec(p: &Poset, mask: u32) -> bool {
        if mask == 0 {
            return true;
        }
        p.doubly_irreducible_in(mask)
            .into_iter()
            .any(|x| rec(p, mask & !(1 << x)))
    }
    rec(p, p.full_mask())
}

/// All partial orders on `{0..n}` whose identity labelling is a linear
/// extension. Every poset on `n` elements is isomorphic to at least one of
/// these, so iterating them covers all isomorphism classes. Intended for
/// exhaustive small-`n` tests.
pub fn natural_posets(n: usize) -> Vec<Poset> {
    assert!(n <= 7, "exhaustive enumeration is for small n");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();
    let mut out = Vec::new();
    'outer: for code in 0u64..1 << m {
        let mut lt = vec![false; n * n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if code >> b & 1 == 1 {
                lt[i * n + j] = true;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if lt[i * n + j] {
                    for k in (j + 1)..n {
                        if lt[j * n + k] && !lt[i * n + k] {
                            continue 'outer;
                        }
                    }
                }
            }
        }
        let elements = (0..n).map(|i| i.to_string()).collect();
        let leq = (0..n)
            .map(|i| (0..n).map(|j| i == j || lt[i * n + j]).collect())
            .collect();
        out.push(Poset::from_leq(elements, leq).expect("transitive DAG is a poset"));
    }
    out
}

/// Canonical key of the order relation up to isomorphism: the minimum, over
/// all relabellings, of the relation matrix read as a bit string.
pub fn iso_canonical_key(p: &Poset) -> u64 {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let n = p.len();
    assert!(n <= 7);
    let mut best = u64::MAX;
    for perm in perms(n) {
        let mut key = 0u64;
        for i in 0..n {
            for j in 0..n {
                if p.leq(perm[i], perm[j]) {
                    key |= 1 << (i * n + j);
                }
            }
        }
        best = best.min(key);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_of_chain_and_antichain() {
        let c = Poset::chain(3);
        assert_eq!(c.covers(), vec![(0, 1), (1, 2)]);
        assert_eq!(Poset::antichain(2).covers(), vec![]);
    }

    #[test]
    fn covers_of_square() {
        // 0 < a,b < 1 as the Boolean lattice 2^2: s0 < s1,s2 < s3
        let sq = Poset::boolean_lattice(2);
        assert_eq!(sq.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn doubly_irreducible_cases() {
        let c = Poset::chain(3);
        assert_eq!(c.doubly_irreducible(), vec![0, 1, 2]);
        let cube = Poset::boolean_lattice(3);
        assert_eq!(cube.doubly_irreducible(), Vec::<usize>::new());
        let sq = Poset::boolean_lattice(2);
        assert_eq!(sq.doubly_irreducible(), vec![1, 2]);
    }

    #[test]
    fn square_dismantles_cube_does_not() {
        let sq = Poset::boolean_lattice(2);
        match sq.dismantle().unwrap() {
            Dismantling::Order(o) => assert!(o.validate(&sq)),
            Dismantling::Stuck(_) => panic!("square is dismantlable"),
        }
        let cube = Poset::boolean_lattice(3);
        match cube.dismantle().unwrap() {
            Dismantling::Order(_) => panic!("cube is not dismantlable"),
            Dismantling::Stuck(stuck) => assert_eq!(stuck, (0..8).collect::<Vec<_>>()),
        }
    }

    #[test]
    fn empty_poset_has_empty_order() {
        let p = Poset::antichain(0);
        match p.dismantle().unwrap() {
            Dismantling::Order(o) => assert!(o.removal_sequence.is_empty() && o.validate(&p)),
            Dismantling::Stuck(_) => panic!(),
        }
    }

    #[test]
    fn chains_and_tiny_posets_are_dismantlable() {
        for n in 0..=6 {
            assert!(Poset::chain(n).dismantling_order().unwrap().is_some());
        }
        for p in natural_posets(3) {
            assert!(p.dismantling_order().unwrap().is_some(), "3-element posets dismantle");
        }
    }

    #[test]
    fn cycle_in_covers_rejected() {
        let e = vec!["a".into(), "b".into()];
        assert!(matches!(
            Poset::from_covers(e, &[(0, 1), (1, 0)]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn dismantle_cap() {
        let p = Poset::antichain(25);
        assert!(matches!(p.dismantle(), Err(Error::Resource(_))));
    }

    #[test]
    fn enumeration_matches_known_poset_counts() {
        // unlabeled poset counts 1, 1, 2, 5, 16, 63
        let mut counts = Vec::new();
        for n in 0..=5 {
            let mut keys = alloc::collections::BTreeSet::new();
            for p in natural_posets(n) {
                keys.insert(iso_canonical_key(&p));
            }
            counts.push(keys.len());
        }
        assert_eq!(counts, vec![1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn height_and_linear_extension() {
        let cube = Poset::boolean_lattice(3);
        assert_eq!(cube.height(), 4);
        let ext = cube.linear_extension();
        for (i, &x) in ext.iter().enumerate() {
            for &y in &ext[i + 1..] {
                assert!(!cube.lt(y, x));
            }
        }
    }
}
