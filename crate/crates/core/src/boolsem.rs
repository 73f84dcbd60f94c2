use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::poset::{Dismantling, Poset};
use crate::rng::Rng;

/// ⟨∨,0⟩-homomorphism between finite Boolean semilattices `2^m → 2^n`,
/// stored by its atom images. The image of a subset is the union of the atom
/// images over its members; `0 ↦ ∅` holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoolMap {
    src_arity: usize,
    tgt_arity: usize,
    atom_images: Vec<BitSet>,
}

impl BoolMap {
    pub fn new(src_arity: usize, tgt_arity: usize, atom_images: Vec<BitSet>) -> Result<Self> {
        if atom_images.len() != src_arity {
            return Err(Error::Shape(format!(
                "expected {src_arity} atom images, got {}",
                atom_images.len()
            )));
        }
        if atom_images.iter().any(|s| s.width() != tgt_arity) {
            return Err(Error::Shape(format!(
                "atom image width must be {tgt_arity}"
            )));
        }
        Ok(BoolMap {
            src_arity,
            tgt_arity,
            atom_images,
        })
    }

    pub fn identity(n: usize) -> Self {
        BoolMap {
            src_arity: n,
            tgt_arity: n,
            atom_images: (0..n).map(|i| BitSet::singleton(n, i)).collect(),
        }
    }

    pub fn zero(src_arity: usize, tgt_arity: usize) -> Self {
        BoolMap {
            src_arity,
            tgt_arity,
            atom_images: (0..src_arity).map(|_| BitSet::empty(tgt_arity)).collect(),
        }
    }

    pub fn src_arity(&self) -> usize {
        self.src_arity
    }

    pub fn tgt_arity(&self) -> usize {
        self.tgt_arity
    }

    pub fn atom_image(&self, i: usize) -> &BitSet {
        &self.atom_images[i]
    }

    pub fn atom_images(&self) -> &[BitSet] {
        &self.atom_images
    }

    pub fn apply(&self, x: &BitSet) -> Result<BitSet> {
        if x.width() != self.src_arity {
            return Err(Error::Shape(format!(
                "argument width {} does not match source arity {}",
                x.width(),
                self.src_arity
            )));
        }
        let mut out = BitSet::empty(self.tgt_arity);
        for i in x.iter() {
            out = out.union(&self.atom_images[i]);
        }
        Ok(out)
    }

    /// Composite `g ∘ f`.
    pub fn compose(g: &BoolMap, f: &BoolMap) -> Result<BoolMap> {
        if f.tgt_arity != g.src_arity {
            return Err(Error::Shape(format!(
                "cannot compose 2^{} → 2^{} after 2^{} → 2^{}",
                g.src_arity, g.tgt_arity, f.src_arity, f.tgt_arity
            )));
        }
        let images = f
            .atom_images
            .iter()
            .map(|img| g.apply(img).expect("width checked"))
            .collect();
        BoolMap::new(f.src_arity, g.tgt_arity, images)
    }

    pub fn is_identity(&self) -> bool {
        self.src_arity == self.tgt_arity
            && self
                .atom_images
                .iter()
                .enumerate()
                .all(|(i, s)| *s == BitSet::singleton(self.tgt_arity, i))
    }

    pub fn is_zero(&self) -> bool {
        self.atom_images.iter().all(BitSet::is_empty)
    }

    /// Atoms with nonempty image.
    pub fn support(&self) -> BitSet {
        let mut s = BitSet::empty(self.src_arity);
        for (i, img) in self.atom_images.iter().enumerate() {
            if !img.is_empty() {
                s = s.with(i);
            }
        }
        s
    }

    pub fn random(rng: &mut Rng, src_arity: usize, tgt_arity: usize) -> BoolMap {
        let images = (0..src_arity)
            .map(|_| {
                let bits = if tgt_arity == 0 {
                    0
                } else {
                    (rng.next_u64() & ((1u64 << tgt_arity) - 1)) as u32
                };
                BitSet::from_bits(tgt_arity, bits)
            })
            .collect();
        BoolMap {
            src_arity,
            tgt_arity,
            atom_images: images,
        }
    }
}

/// Isomorphism of Boolean semilattices of equal arity, stored as the atom
/// permutation (atom `i` of the source goes to atom `perm[i]` of the target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemIso {
    perm: Vec<usize>,
}

impl SemIso {
    pub fn identity(n: usize) -> Self {
        SemIso {
            perm: (0..n).collect(),
        }
    }

    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = alloc::vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Input("not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(SemIso { perm })
    }

    pub fn arity(&self) -> usize {
        self.perm.len()
    }

    pub fn apply_atom(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn inverse(&self) -> SemIso {
        let mut inv = alloc::vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        SemIso { perm: inv }
    }

    pub fn as_boolmap(&self) -> BoolMap {
        let n = self.perm.len();
        BoolMap {
            src_arity: n,
            tgt_arity: n,
            atom_images: self.perm.iter().map(|&p| BitSet::singleton(n, p)).collect(),
        }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }
}

/// Functor from a finite poset into finite Boolean semilattices.
///
/// Arrows are stored for every comparable pair, identities included, and the
/// whole family is validated for exact functoriality on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemDiagram {
    poset: Poset,
    arities: Vec<usize>,
    arrows: BTreeMap<(usize, usize), BoolMap>,
}

impl SemDiagram {
    /// Build from arrows on cover pairs only; arrows on arbitrary pairs are
    /// obtained by composing along cover paths, and the result is rejected
    /// when two paths disagree.
    pub fn from_covers(
        poset: Poset,
        arities: Vec<usize>,
        cover_arrows: &BTreeMap<(usize, usize), BoolMap>,
    ) -> Result<Self> {
        let n = poset.len();
        if arities.len() != n {
            return Err(Error::Shape("one arity per poset element required".into()));
        }
        let covers = poset.covers();
        for &(x, y) in &covers {
            let a = cover_arrows.get(&(x, y)).ok_or_else(|| {
                Error::Input(format!(
                    "missing arrow for cover {} < {}",
                    poset.name(x),
                    poset.name(y)
                ))
            })?;
            if a.src_arity() != arities[x] || a.tgt_arity() != arities[y] {
                return Err(Error::Shape(format!(
                    "arrow for cover {} < {} has arity {}→{}, expected {}→{}",
                    poset.name(x),
                    poset.name(y),
                    a.src_arity(),
                    a.tgt_arity(),
                    arities[x],
                    arities[y]
                )));
            }
        }
        for (&(x, y), _) in cover_arrows {
            if !covers.contains(&(x, y)) {
                return Err(Error::Input(format!(
                    "arrow given for non-cover pair {} , {}",
                    poset.name(x),
                    poset.name(y)
                )));
            }
        }

        // Define arrows along a canonical cover path, then check all
        // triangles; triangle commutativity implies path independence.
        let mut arrows: BTreeMap<(usize, usize), BoolMap> = BTreeMap::new();
        for x in 0..n {
            arrows.insert((x, x), BoolMap::identity(arities[x]));
        }
        for &(x, y) in &covers {
            arrows.insert((x, y), cover_arrows[&(x, y)].clone());
        }
        let ext = poset.linear_extension();
        for (pos, &y) in ext.iter().enumerate() {
            for &x in &ext[..pos] {
                if !poset.lt(x, y) || arrows.contains_key(&(x, y)) {
                    continue;
                }
                // smallest upper cover of x below y
                let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
                let step = poset
                    .up_covers_in(x, full)
                    .into_iter()
                    .find(|&c| poset.leq(c, y))
                    .expect("x < y implies a cover step towards y");
                let tail = arrows[&(step, y)].clone();
                let head = arrows[&(x, step)].clone();
                arrows.insert((x, y), BoolMap::compose(&tail, &head)?);
            }
        }

        let diagram = SemDiagram {
            poset,
            arities,
            arrows,
        };
        diagram.validate()?;
        Ok(diagram)
    }

    /// Build from a complete arrow family; validates functoriality.
    pub fn from_all_arrows(
        poset: Poset,
        arities: Vec<usize>,
        arrows: BTreeMap<(usize, usize), BoolMap>,
    ) -> Result<Self> {
        let d = SemDiagram {
            poset,
            arities,
            arrows,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn arity(&self, x: usize) -> usize {
        self.arities[x]
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn arrow(&self, x: usize, y: usize) -> &BoolMap {
        self.arrows
            .get(&(x, y))
            .unwrap_or_else(|| panic!("no arrow for pair ({x},{y})"))
    }

    pub fn arrows(&self) -> &BTreeMap<(usize, usize), BoolMap> {
        &self.arrows
    }

    /// Identity arrows, shapes, and exact commutativity of every composable
    /// triangle.
    pub fn validate(&self) -> Result<()> {
        let n = self.poset.len();
        for (x, y) in self.poset.pairs_leq() {
            let a = self.arrows.get(&(x, y)).ok_or_else(|| {
                Error::Input(format!(
                    "missing arrow {} ≤ {}",
                    self.poset.name(x),
                    self.poset.name(y)
                ))
            })?;
            if a.src_arity() != self.arities[x] || a.tgt_arity() != self.arities[y] {
                return Err(Error::Shape(format!(
                    "arrow {} ≤ {} has wrong arities",
                    self.poset.name(x),
                    self.poset.name(y)
                )));
            }
            if x == y && !a.is_identity() {
                return Err(Error::Input(format!(
                    "arrow at {} is not the identity",
                    self.poset.name(x)
                )));
            }
        }
        if self.arrows.len() != self.poset.pairs_leq().len() {
            return Err(Error::Input("arrow given for incomparable pair".into()));
        }
        for x in 0..n {
            for y in 0..n {
                if !self.poset.leq(x, y) {
                    continue;
                }
                for z in 0..n {
                    if !self.poset.leq(y, z) {
                        continue;
                    }
                    let composite =
                        BoolMap::compose(self.arrow(y, z), self.arrow(x, y))?;
                    if composite != *self.arrow(x, z) {
                        return Err(Error::Coherence(format!(
                            "paths through {} disagree on {} ≤ {}",
                            self.poset.name(y),
                            self.poset.name(x),
                            self.poset.name(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Deterministic-by-seed functorial diagram on the given poset with all
    /// arities ≤ `max_arity`.
    ///
    /// On a dismantlable poset the sampler replays the dismantling in
    /// re-insertion order; each new element has at most one cover on each
    /// side, so cover arrows can be drawn freely (and, between two covers,
    /// factored through an embedding-retraction pair to keep the existing
    /// composite). On a non-dismantlable poset it falls back to powers of a
    /// single random endomap graded by height, which is functorial for any
    /// poset.
    pub fn random(poset: &Poset, max_arity: usize, seed: u64) -> SemDiagram {
        let mut rng = Rng::new(seed);
        match poset.dismantle() {
            Ok(Dismantling::Order(order)) => {
                Self::random_on_dismantlable(poset, max_arity, &order.removal_sequence, &mut rng)
            }
            _ => Self::random_graded(poset, max_arity, &mut rng),
        }
    }

    fn random_on_dismantlable(
        poset: &Poset,
        max_arity: usize,
        removal: &[usize],
        rng: &mut Rng,
    ) -> SemDiagram {
        let n = poset.len();
        let mut arities = alloc::vec![0usize; n];
        let mut arrows: BTreeMap<(usize, usize), BoolMap> = BTreeMap::new();
        let mut mask: u32 = 0;
        for &x in removal.iter().rev() {
            let newmask = mask | 1 << x;
            let ups = poset.up_covers_in(x, newmask);
            let downs = poset.down_covers_in(x, newmask);
            debug_assert!(ups.len() <= 1 && downs.len() <= 1);
            let u = downs.first().copied();
            let v = ups.first().copied();
            let m_x = match v {
                // between two covers the arity must admit a retraction onto
                // the upper cover's semilattice
                Some(v) if u.is_some() => rng.range(arities[v], max_arity.max(arities[v])),
                _ => rng.range(0, max_arity),
            };
            arities[x] = m_x;
            arrows.insert((x, x), BoolMap::identity(m_x));
            if let Some(u) = u {
                let up_arrow = match v {
                    None => BoolMap::random(rng, arities[u], m_x),
                    Some(v) => {
                        // factor the existing arrow u → v through 2^{m_x}
                        let (emb, retr) = embedding_retraction(rng, arities[v], m_x);
                        let through = BoolMap::compose(&emb, &arrows[&(u, v)])
                            .expect("arities match");
                        arrows.insert((x, v), retr);
                        through
                    }
                };
                arrows.insert((u, x), up_arrow);
            } else if let Some(v) = v {
                arrows.insert((x, v), BoolMap::random(rng, m_x, arities[v]));
            }
            // complete all comparabilities through the covers
            for s in 0..n {
                if mask >> s & 1 == 1 && poset.lt(s, x) && !arrows.contains_key(&(s, x)) {
                    let u = u.expect("everything below x passes through its lower cover");
                    let a = BoolMap::compose(&arrows[&(u, x)], &arrows[&(s, u)]).unwrap();
                    arrows.insert((s, x), a);
                }
            }
            for t in 0..n {
                if mask >> t & 1 == 1 && poset.lt(x, t) && !arrows.contains_key(&(x, t)) {
                    let v = v.expect("everything above x passes through its upper cover");
                    let a = BoolMap::compose(&arrows[&(v, t)], &arrows[&(x, v)]).unwrap();
                    arrows.insert((x, t), a);
                }
            }
            mask = newmask;
        }
        let d = SemDiagram {
            poset: poset.clone(),
            arities,
            arrows,
        };
        d.validate().expect("constructed diagram is coherent");
        d
    }

    fn random_graded(poset: &Poset, max_arity: usize, rng: &mut Rng) -> SemDiagram {
        let n = poset.len();
        let m = if max_arity == 0 { 0 } else { rng.range(1, max_arity) };
        let endo = BoolMap::random(rng, m, m);
        // level(x) = longest chain below x
        let ext = poset.linear_extension();
        let mut level = alloc::vec![0usize; n];
        for &x in &ext {
            for y in 0..n {
                if poset.lt(y, x) {
                    level[x] = level[x].max(level[y] + 1);
                }
            }
        }
        let mut arrows = BTreeMap::new();
        for (x, y) in poset.pairs_leq() {
            let mut a = BoolMap::identity(m);
            for _ in 0..level[y] - level[x] {
                a = BoolMap::compose(&endo, &a).unwrap();
            }
            arrows.insert((x, y), a);
        }
        let d = SemDiagram {
            poset: poset.clone(),
            arities: alloc::vec![m; n],
            arrows,
        };
        d.validate().expect("graded diagram is coherent");
        d
    }
}

/// Random pair `(emb, retr)` with `retr ∘ emb = id` on `2^k`, where
/// `emb: 2^k → 2^m` needs `m ≥ k`. The embedding sends atom `t` to a block of
/// a random partition; the retraction collapses each block back and sends
/// leftover atoms anywhere.
fn embedding_retraction(rng: &mut Rng, k: usize, m: usize) -> (BoolMap, BoolMap) {
    assert!(m >= k);
    // random injection of block anchors
    let mut slots: Vec<usize> = (0..m).collect();
    for i in (1..slots.len()).rev() {
        let j = rng.below(i + 1);
        slots.swap(i, j);
    }
    let anchors = &slots[..k];
    let mut owner: Vec<Option<usize>> = alloc::vec![None; m];
    for (t, &a) in anchors.iter().enumerate() {
        owner[a] = Some(t);
    }
    for &s in &slots[k..] {
        if k > 0 && rng.flip() {
            owner[s] = Some(rng.below(k));
        }
    }
    let mut blocks = alloc::vec![BitSet::empty(m); k];
    for (s, o) in owner.iter().enumerate() {
        if let Some(t) = o {
            blocks[*t] = blocks[*t].with(s);
        }
    }
    let emb = BoolMap::new(k, m, blocks).unwrap();
    let retr_images = (0..m)
        .map(|s| match owner[s] {
            Some(t) => BitSet::singleton(k, t),
            None => {
                let bits = if k == 0 {
                    0
                } else {
                    (rng.next_u64() & ((1u64 << k) - 1)) as u32
                };
                BitSet::from_bits(k, bits)
            }
        })
        .collect();
    let retr = BoolMap::new(m, k, retr_images).unwrap();
    (emb, retr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::powerset;

    fn bm(src: usize, tgt: usize, images: &[&[usize]]) -> BoolMap {
        BoolMap::new(
            src,
            tgt,
            images
                .iter()
                .map(|idx| BitSet::from_indices(tgt, idx))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let g = bm(2, 3, &[&[0, 2], &[1]]);
        assert_eq!(BoolMap::compose(&g, &BoolMap::identity(2)).unwrap(), g);
        assert_eq!(BoolMap::compose(&BoolMap::identity(3), &g).unwrap(), g);
    }

    #[test]
    fn compose_collapses_atoms() {
        let f = bm(2, 2, &[&[0], &[1]]);
        let g = bm(2, 1, &[&[0], &[0]]);
        let c = BoolMap::compose(&g, &f).unwrap();
        assert_eq!(c, bm(2, 1, &[&[0], &[0]]));
    }

    #[test]
    fn join_then_project_is_idempotent() {
        // (x, y) ↦ (x ∨ y, y): atom x ↦ {0}, atom y ↦ {0, 1}
        let t = bm(2, 2, &[&[0], &[0, 1]]);
        let tt = BoolMap::compose(&t, &t).unwrap();
        assert_eq!(tt, t);
    }

    #[test]
    fn arity_mismatch_is_shape_error() {
        let f = bm(2, 3, &[&[0], &[1]]);
        let g = bm(2, 2, &[&[0], &[1]]);
        assert!(matches!(BoolMap::compose(&g, &f), Err(Error::Shape(_))));
    }

    #[test]
    fn boolmap_preserves_joins_exhaustively() {
        let mut rng = Rng::new(7);
        for m in 0..=4usize {
            for n in 0..=4usize {
                let f = BoolMap::random(&mut rng, m, n);
                for x in powerset(m).unwrap() {
                    for y in powerset(m).unwrap() {
                        let join_then_map = f.apply(&x.union(&y)).unwrap();
                        let map_then_join =
                            f.apply(&x).unwrap().union(&f.apply(&y).unwrap());
                        assert_eq!(join_then_map, map_then_join);
                    }
                }
            }
        }
    }

    #[test]
    fn compose_is_associative_on_random_triples() {
        let mut rng = Rng::new(99);
        for _ in 0..200 {
            let a = rng.range(0, 4);
            let b = rng.range(0, 4);
            let c = rng.range(0, 4);
            let d = rng.range(0, 4);
            let f = BoolMap::random(&mut rng, a, b);
            let g = BoolMap::random(&mut rng, b, c);
            let h = BoolMap::random(&mut rng, c, d);
            let left = BoolMap::compose(&h, &BoolMap::compose(&g, &f).unwrap()).unwrap();
            let right = BoolMap::compose(&BoolMap::compose(&h, &g).unwrap(), &f).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn from_covers_on_chain() {
        let poset = Poset::chain(2);
        let mut cover_arrows = BTreeMap::new();
        cover_arrows.insert((0, 1), bm(1, 2, &[&[0, 1]]));
        let d = SemDiagram::from_covers(poset, alloc::vec![1, 2], &cover_arrows).unwrap();
        assert!(d.arrow(0, 0).is_identity());
        assert_eq!(d.arrow(0, 1), &bm(1, 2, &[&[0, 1]]));
    }

    #[test]
    fn from_covers_square_commuting_and_not() {
        // the square diagram with embeddings f, g, h where g∘f = h∘f
        let poset = Poset::boolean_lattice(2);
        let f = bm(2, 3, &[&[0, 2], &[1, 2]]);
        let g = bm(3, 4, &[&[0, 3], &[1], &[2, 3]]);
        let h = bm(3, 4, &[&[0], &[1, 3], &[2, 3]]);
        let mut ok = BTreeMap::new();
        ok.insert((0, 1), f.clone());
        ok.insert((0, 2), f.clone());
        ok.insert((1, 3), g.clone());
        ok.insert((2, 3), h.clone());
        let d = SemDiagram::from_covers(poset.clone(), alloc::vec![2, 3, 3, 4], &ok).unwrap();
        assert_eq!(
            d.arrow(0, 3),
            &BoolMap::compose(&g, &f).unwrap()
        );

        // break commutativity: route one side through a collapsed map
        let mut bad = BTreeMap::new();
        bad.insert((0, 1), f.clone());
        bad.insert((0, 2), f.clone());
        bad.insert((1, 3), g.clone());
        bad.insert((2, 3), bm(3, 4, &[&[0], &[1], &[2]]));
        assert!(matches!(
            SemDiagram::from_covers(poset, alloc::vec![2, 3, 3, 4], &bad),
            Err(Error::Coherence(_))
        ));
    }

    #[test]
    fn random_diagram_is_deterministic_and_coherent() {
        let poset = Poset::chain(3);
        let a = SemDiagram::random(&poset, 3, 11);
        let b = SemDiagram::random(&poset, 3, 11);
        assert_eq!(a, b);
        assert!(a.validate().is_ok());
        assert!(a.arities().iter().all(|&m| m <= 3));
        let c = SemDiagram::random(&poset, 3, 12);
        assert_ne!(a, c);
    }

    #[test]
    fn random_diagram_on_nondismantlable_poset() {
        let cube = Poset::boolean_lattice(3);
        let d = SemDiagram::random(&cube, 3, 5);
        assert!(d.validate().is_ok());
        assert!(d.arities().iter().all(|&m| m <= 3));
    }

    #[test]
    fn random_diagram_on_squares_and_diamonds() {
        for seed in 0..20 {
            let sq = Poset::boolean_lattice(2);
            let d = SemDiagram::random(&sq, 3, seed);
            assert!(d.validate().is_ok());
        }
    }
}
