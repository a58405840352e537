//! Binary relations on a finite index set `{0, .., k-1}`.
//!
//! Relations are stored as boolean matrices with one bit row per source index.
//! Composition follows the right-to-left convention used throughout the crate:
//! in `r.compose(&s)` the relation `s` acts first, so
//! `rs = {(x, y) : (x, z) in s and (z, y) in r for some z}`.
//! With that convention the graph map `f -> graph(f)` is a plain morphism.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{budget, internal, validation, Result};

/// Largest `k` accepted by [`enumerate_e0`] and [`invariant_under_symmetric_group`].
pub const DEFAULT_ENUM_CAP: usize = 4;
/// Largest semigroup produced by [`closure`] with the default cap.
pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IndexRelation {
    size: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl IndexRelation {
    /// The empty relation on `size` points.
    pub fn empty(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(validation("relation size must be positive"));
        }
        let words_per_row = size.div_ceil(64);
        Ok(IndexRelation {
            size,
            words_per_row,
            bits: vec![0; size * words_per_row],
        })
    }

    pub fn from_pairs<I>(size: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = IndexRelation::empty(size)?;
        for (a, b) in pairs {
            if a >= size || b >= size {
                return Err(validation(format!(
                    "pair ({a}, {b}) outside index range 0..{size}"
                )));
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    /// The diagonal `{(a, a)}`.
    pub fn diagonal(size: usize) -> Result<Self> {
        IndexRelation::from_pairs(size, (0..size).map(|a| (a, a)))
    }

    /// The full square `A x A`.
    pub fn full(size: usize) -> Result<Self> {
        let mut r = IndexRelation::empty(size)?;
        for a in 0..size {
            r.fill_row(a);
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of pairs.
    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.size && b < self.size && self.row(a)[b / 64] >> (b % 64) & 1 == 1
    }

    /// Panics if the pair is out of range.
    pub fn insert(&mut self, a: usize, b: usize) {
        assert!(a < self.size && b < self.size, "pair out of range");
        let w = self.words_per_row;
        self.bits[a * w + b / 64] |= 1 << (b % 64);
    }

    fn fill_row(&mut self, a: usize) {
        let w = self.words_per_row;
        let row = &mut self.bits[a * w..(a + 1) * w];
        row.fill(u64::MAX);
        let tail = self.size % 64;
        if tail != 0 {
            row[w - 1] = (1u64 << tail) - 1;
        }
    }

    fn row(&self, a: usize) -> &[u64] {
        let w = self.words_per_row;
        &self.bits[a * w..(a + 1) * w]
    }

    /// Targets of `a`, ascending.
    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(a).iter().enumerate().flat_map(|(i, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let t = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(i * 64 + t)
            })
        })
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |a| self.successors(a).map(move |b| (a, b)))
    }

    fn check_size(&self, other: &IndexRelation) -> Result<()> {
        if self.size != other.size {
            return Err(validation(format!(
                "relation sizes differ: {} vs {}",
                self.size, other.size
            )));
        }
        Ok(())
    }

    /// `self * s`: `s` acts first.
    pub fn compose(&self, s: &IndexRelation) -> Result<IndexRelation> {
        self.check_size(s)?;
        let mut out = IndexRelation::empty(self.size)?;
        let w = self.words_per_row;
        for x in 0..self.size {
            let dst = x * w;
            for z in s.successors(x) {
                let src = self.row(z);
                for (i, word) in src.iter().enumerate() {
                    out.bits[dst + i] |= word;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> IndexRelation {
        let mut out = IndexRelation::empty(self.size).expect("size is positive");
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out
    }

    pub fn union(&self, other: &IndexRelation) -> Result<IndexRelation> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (o, w) in out.bits.iter_mut().zip(&other.bits) {
            *o |= w;
        }
        Ok(out)
    }

    /// Set difference `self \ other`.
    pub fn difference(&self, other: &IndexRelation) -> Result<IndexRelation> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (o, w) in out.bits.iter_mut().zip(&other.bits) {
            *o &= !w;
        }
        Ok(out)
    }

    /// `self ⊆ other`. Relations of different sizes are never comparable.
    pub fn is_subset(&self, other: &IndexRelation) -> bool {
        self.size == other.size && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn contains_diagonal(&self) -> bool {
        (0..self.size).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    /// Full domain and full range.
    pub fn is_e0(&self) -> bool {
        let w = self.words_per_row;
        let mut range = vec![0u64; w];
        for a in 0..self.size {
            let row = self.row(a);
            if row.iter().all(|&x| x == 0) {
                return false;
            }
            for (r, x) in range.iter_mut().zip(row) {
                *r |= x;
            }
        }
        let tail = self.size % 64;
        range.iter().enumerate().all(|(i, &word)| {
            if i + 1 == w && tail != 0 {
                word == (1u64 << tail) - 1
            } else {
                word == u64::MAX
            }
        })
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self).map(|sq| &sq == self).unwrap_or(false)
    }

    pub fn classify(&self) -> RelationClassification {
        let is_symmetric = self.is_symmetric();
        let contains_diagonal = self.contains_diagonal();
        let is_idempotent = self.is_idempotent();
        RelationClassification {
            is_e0: self.is_e0(),
            is_symmetric,
            contains_diagonal,
            is_idempotent,
            is_equivalence: self.is_equivalence_by_definition(),
        }
    }

    /// Reflexive, symmetric and transitive, checked pair by pair.
    fn is_equivalence_by_definition(&self) -> bool {
        if !self.contains_diagonal() || !self.is_symmetric() {
            return false;
        }
        self.pairs()
            .all(|(a, b)| self.successors(b).all(|c| self.contains(a, c)))
    }

    /// `σ r σ⁻¹ = {(σ(a), σ(b))}` for a permutation given as an image table.
    pub fn conjugate_by(&self, perm: &[usize]) -> Result<IndexRelation> {
        if perm.len() != self.size {
            return Err(validation("permutation length differs from relation size"));
        }
        let mut seen = vec![false; self.size];
        for &p in perm {
            if p >= self.size || std::mem::replace(&mut seen[p], true) {
                return Err(validation("not a permutation"));
            }
        }
        IndexRelation::from_pairs(self.size, self.pairs().map(|(a, b)| (perm[a], perm[b])))
    }
}

impl Ord for IndexRelation {
    /// Size first, then lexicographic on the sorted pair lists.
    fn cmp(&self, other: &Self) -> Ordering {
        self.size
            .cmp(&other.size)
            .then_with(|| self.pairs().cmp(other.pairs()))
    }
}

impl PartialOrd for IndexRelation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexRelation({}; ", self.size)?;
        f.debug_set().entries(self.pairs()).finish()?;
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationClassification {
    pub is_e0: bool,
    pub is_symmetric: bool,
    pub contains_diagonal: bool,
    pub is_idempotent: bool,
    pub is_equivalence: bool,
}

/// All relations on `k` points with full domain and range, in canonical order.
pub fn enumerate_e0(k: usize) -> Result<Vec<IndexRelation>> {
    enumerate_e0_with_cap(k, DEFAULT_ENUM_CAP)
}

pub fn enumerate_e0_with_cap(k: usize, cap: usize) -> Result<Vec<IndexRelation>> {
    if k == 0 {
        return Err(validation("index set must be non-empty"));
    }
    if k > cap {
        return Err(budget(format!("enumeration of E0({k}) exceeds cap {cap}")));
    }
    let cells = k * k;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << cells) {
        let rel = IndexRelation::from_pairs(
            k,
            (0..cells)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (i / k, i % k)),
        )?;
        if rel.is_e0() {
            out.push(rel);
        }
    }
    out.sort();
    Ok(out)
}

/// Smallest composition-closed set containing the generators.
///
/// Elements appear in discovery order: generators first (duplicates dropped), then
/// products `x * y` in the order they are first produced.
pub fn closure(generators: &[IndexRelation], cap: usize) -> Result<Vec<IndexRelation>> {
    let Some(first) = generators.first() else {
        return Ok(Vec::new());
    };
    let mut elems: Vec<IndexRelation> = Vec::new();
    let mut index: HashMap<IndexRelation, usize> = HashMap::new();
    let mut push = |r: IndexRelation, elems: &mut Vec<IndexRelation>| -> Result<()> {
        if index.contains_key(&r) {
            return Ok(());
        }
        if elems.len() >= cap {
            return Err(budget(format!("closure exceeds {cap} elements")));
        }
        index.insert(r.clone(), elems.len());
        elems.push(r);
        Ok(())
    };
    for g in generators {
        first.check_size(g)?;
        push(g.clone(), &mut elems)?;
    }
    // Invariant: all products among elems[..done] are already present.
    let mut done = 0;
    while done < elems.len() {
        let x = elems[done].clone();
        for j in 0..=done {
            let y = elems[j].clone();
            push(x.compose(&y)?, &mut elems)?;
            push(y.compose(&x)?, &mut elems)?;
        }
        done += 1;
    }
    Ok(elems)
}

/// Checks that `set` is closed under composition.
pub fn is_composition_closed(set: &[IndexRelation]) -> Result<bool> {
    let members: std::collections::HashSet<&IndexRelation> = set.iter().collect();
    for x in set {
        for y in set {
            if !members.contains(&x.compose(y)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Greatest element of `{p in S : p ⊇ Δ}` for a composition-closed `S`.
///
/// Returns `None` when no member contains the diagonal. The result is checked to be
/// an upper bound of that subset and idempotent.
pub fn greatest_delta_element(set: &[IndexRelation]) -> Result<Option<IndexRelation>> {
    if !is_composition_closed(set)? {
        return Err(validation("relation set is not closed under composition"));
    }
    let above_diagonal: Vec<&IndexRelation> =
        set.iter().filter(|p| p.contains_diagonal()).collect();
    if above_diagonal.is_empty() {
        return Ok(None);
    }
    let mut maximal: Vec<&IndexRelation> = above_diagonal
        .iter()
        .copied()
        .filter(|p| !above_diagonal.iter().any(|q| q != p && p.is_subset(q)))
        .collect();
    maximal.sort();
    maximal.dedup();
    if maximal.len() != 1 {
        return Err(internal(format!(
            "{} maximal elements above the diagonal",
            maximal.len()
        )));
    }
    let top = maximal[0].clone();
    if !above_diagonal.iter().all(|p| p.is_subset(&top)) {
        return Err(internal("maximal element is not an upper bound"));
    }
    if !top.is_idempotent() {
        return Err(internal(
            "greatest element above the diagonal is not idempotent",
        ));
    }
    Ok(Some(top))
}

/// Members of `E0(k)` fixed under conjugation by every permutation of `{0, .., k-1}`.
pub fn invariant_under_symmetric_group(k: usize) -> Result<Vec<IndexRelation>> {
    invariant_under_symmetric_group_with_cap(k, DEFAULT_ENUM_CAP)
}

pub fn invariant_under_symmetric_group_with_cap(
    k: usize,
    cap: usize,
) -> Result<Vec<IndexRelation>> {
    let all = enumerate_e0_with_cap(k, cap)?;
    // The transposition (0 1) and the k-cycle generate the symmetric group.
    let mut transposition: Vec<usize> = (0..k).collect();
    if k >= 2 {
        transposition.swap(0, 1);
    }
    let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
    let mut out = Vec::new();
    for r in all {
        if r.conjugate_by(&transposition)? == r && r.conjugate_by(&cycle)? == r {
            out.push(r);
        }
    }
    Ok(out)
}
