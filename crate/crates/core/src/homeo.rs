//! Prefix-exchange homeomorphisms of the Cantor space.
//!
//! A [`PrefixMap`] pairs the words of two complete prefix codes; it sends `d·t` to
//! `π(d)·t`. Every such map is a self-homeomorphism, and these maps are closed under
//! composition and inversion.

use std::fmt;

use crate::cantor::{validate_code, BinaryWord, ClopenSet, Partition};
use crate::dyadic::DyadicValue;
use crate::error::{validation, Result};
use crate::finrel::IndexRelation;

/// Finest level at which traces are computed by tabulation instead of clopen images.
const MAX_TABULATED_LEVEL: usize = 12;

/// A rule `domain -> range`.
pub type Rule = (BinaryWord, BinaryWord);

/// Canonical prefix-exchange map: rules sorted by domain word, no reducible sibling pair.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefixMap {
    rules: Vec<Rule>,
}

impl PrefixMap {
    pub fn identity() -> Self {
        PrefixMap {
            rules: vec![(BinaryWord::EMPTY, BinaryWord::EMPTY)],
        }
    }

    /// Validates the two codes and reduces to canonical form.
    pub fn from_rules(rules: &[Rule]) -> Result<Self> {
        let domain: Vec<BinaryWord> = rules.iter().map(|r| r.0).collect();
        let range: Vec<BinaryWord> = rules.iter().map(|r| r.1).collect();
        let d = validate_code(&domain);
        if let Some((p, w)) = d.prefix_violations.first() {
            return Err(validation(format!("domain words overlap: {p} and {w}")));
        }
        if !d.is_complete {
            return Err(validation(
                "domain words do not form a complete prefix code",
            ));
        }
        let r = validate_code(&range);
        if let Some((p, w)) = r.prefix_violations.first() {
            return Err(validation(format!("range words overlap: {p} and {w}")));
        }
        if !r.is_complete {
            return Err(validation("range words do not form a complete prefix code"));
        }
        let mut sorted = rules.to_vec();
        sorted.sort();
        Ok(PrefixMap {
            rules: reduce(sorted),
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_identity(&self) -> bool {
        self.rules == [(BinaryWord::EMPTY, BinaryWord::EMPTY)]
    }

    /// Longest word on either side.
    pub fn depth(&self) -> usize {
        self.rules
            .iter()
            .map(|(d, r)| d.len().max(r.len()))
            .max()
            .unwrap_or(0)
    }

    /// Image of the cylinder `x` when it lies inside one domain cylinder.
    pub fn apply(&self, x: &BinaryWord) -> Result<Option<BinaryWord>> {
        match self.rules.iter().find(|(d, _)| d.is_prefix_of(x)) {
            Some((d, r)) => Ok(Some(r.concat(&x.suffix(d.len()))?)),
            None => Ok(None),
        }
    }

    pub fn invert(&self) -> PrefixMap {
        let mut rules: Vec<Rule> = self.rules.iter().map(|&(d, r)| (r, d)).collect();
        rules.sort();
        PrefixMap { rules }
    }

    /// `self ∘ g`: `g` acts first.
    pub fn compose(&self, g: &PrefixMap) -> Result<PrefixMap> {
        let mut out = Vec::with_capacity(g.rules.len());
        for &(gd, gr) in &g.rules {
            if let Some((fd, fr)) = self.rules.iter().find(|(fd, _)| fd.is_prefix_of(&gr)) {
                out.push((gd, fr.concat(&gr.suffix(fd.len()))?));
            } else {
                for &(fd, fr) in self.rules.iter().filter(|(fd, _)| gr.is_prefix_of(fd)) {
                    out.push((gd.concat(&fd.suffix(gr.len()))?, fr));
                }
            }
        }
        out.sort();
        Ok(PrefixMap { rules: reduce(out) })
    }

    pub fn image_clopen(&self, c: &ClopenSet) -> Result<ClopenSet> {
        let mut out = Vec::new();
        for x in c.cylinders() {
            for &(d, r) in &self.rules {
                if d.is_prefix_of(x) {
                    out.push(r.concat(&x.suffix(d.len()))?);
                } else if x.is_prefix_of(&d) {
                    out.push(r);
                }
            }
        }
        ClopenSet::from_antichain(&out)
    }

    /// Trace at the canonical level-`n` partition.
    pub fn level_trace(&self, n: usize) -> Result<IndexRelation> {
        if n > MAX_TABULATED_LEVEL {
            return Err(crate::error::budget(format!(
                "level {n} exceeds the tabulation cap {MAX_TABULATED_LEVEL}"
            )));
        }
        let mut rel = IndexRelation::empty(1 << n)?;
        for &(d, r) in &self.rules {
            if d.len() >= n {
                let a = d.prefix(n).value() as usize;
                for b in r.level_indices(n) {
                    rel.insert(a, b);
                }
            } else {
                let extra = n - d.len();
                for t in BinaryWord::all_of_length(extra) {
                    let a = d.concat(&t)?.value() as usize;
                    for b in image_prefix(&r, &t, n)?.level_indices(n) {
                        rel.insert(a, b);
                    }
                }
            }
        }
        Ok(rel)
    }

    /// `M(γ, graph(f))`: `(α, β)` iff `f(U_α) ∩ U_β ≠ ∅`.
    pub fn trace(&self, gamma: &Partition) -> Result<IndexRelation> {
        let m = gamma.max_len();
        if m <= MAX_TABULATED_LEVEL {
            let fine = self.level_trace(m)?;
            if gamma.as_level().is_some() {
                return Ok(fine);
            }
            let map = gamma.level_map(m)?;
            return IndexRelation::from_pairs(
                gamma.len(),
                fine.pairs().map(|(a, b)| (map[a], map[b])),
            );
        }
        self.trace_by_images(gamma)
    }

    /// Same relation as [`PrefixMap::trace`], computed from clopen images.
    pub fn trace_by_images(&self, gamma: &Partition) -> Result<IndexRelation> {
        let blocks = gamma.blocks();
        let mut rel = IndexRelation::empty(blocks.len())?;
        for (a, u) in blocks.iter().enumerate() {
            let image = self.image_clopen(u)?;
            for (b, v) in blocks.iter().enumerate() {
                if !image.is_disjoint(v) {
                    rel.insert(a, b);
                }
            }
        }
        Ok(rel)
    }

    /// Membership in the stabilizer `V_γ = {f : f(U_α) = U_α for every block}`.
    pub fn in_stabilizer(&self, gamma: &Partition) -> Result<bool> {
        for u in gamma.blocks() {
            if self.image_clopen(u)? != *u {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `sup_x d(f(x), g(x))` for the metric `d(x, y) = 2^-lcp(x, y)`.
    pub fn sup_distance(&self, g: &PrefixMap) -> DyadicValue {
        let mut best = DyadicValue::ZERO;
        for &(fd, fr) in &self.rules {
            for &(gd, gr) in g.rules.iter().filter(|(gd, _)| gd.is_comparable(&fd)) {
                // On the common cylinder w the maps act as w·t ↦ u·t and w·t ↦ v·t.
                let (u, v) = if fd.len() >= gd.len() {
                    (bits_of(&fr, None), bits_of(&gr, Some(fd.suffix(gd.len()))))
                } else {
                    (bits_of(&fr, Some(gd.suffix(fd.len()))), bits_of(&gr, None))
                };
                best = best.max(cylinder_shift_distance(&u, &v));
            }
        }
        best
    }
}

/// Bits of `w` followed by those of `ext`; may exceed the single-word depth cap.
fn bits_of(w: &BinaryWord, ext: Option<BinaryWord>) -> Vec<bool> {
    let mut out: Vec<bool> = w.bits().collect();
    if let Some(e) = ext {
        out.extend(e.bits());
    }
    out
}

/// `sup_t d(u·t, v·t)`.
fn cylinder_shift_distance(u: &[bool], v: &[bool]) -> DyadicValue {
    let lcp = u.iter().zip(v).take_while(|(a, b)| a == b).count();
    if u == v {
        DyadicValue::ZERO
    } else {
        // lcp = len(shorter) when one is a proper prefix of the other
        DyadicValue::pow2_neg(lcp as u32)
    }
}

/// First `n` bits of `r·t` (or all of it when shorter).
fn image_prefix(r: &BinaryWord, t: &BinaryWord, n: usize) -> Result<BinaryWord> {
    if r.len() >= n {
        return Ok(r.prefix(n));
    }
    let take = (n - r.len()).min(t.len());
    r.concat(&t.prefix(take))
}

/// Merges rule pairs `w0 -> v0, w1 -> v1` into `w -> v` until none remain.
/// Input sorted by domain word; output likewise.
fn reduce(sorted: Vec<Rule>) -> Vec<Rule> {
    let mut stack: Vec<Rule> = Vec::with_capacity(sorted.len());
    for rule in sorted {
        stack.push(rule);
        while stack.len() >= 2 {
            let (d1, r1) = stack[stack.len() - 1];
            let (d0, r0) = stack[stack.len() - 2];
            let mergeable = d0.last_bit() == Some(false)
                && d1.last_bit() == Some(true)
                && d0.parent() == d1.parent()
                && r0.last_bit() == Some(false)
                && r1.last_bit() == Some(true)
                && r0.parent() == r1.parent();
            if !mergeable {
                break;
            }
            stack.truncate(stack.len() - 2);
            stack.push((
                d0.parent().expect("non-empty"),
                r0.parent().expect("non-empty"),
            ));
        }
    }
    stack
}

/// Cylinder-to-cylinder rules carrying the union of `p` onto the union of `q`.
///
/// Both lists are sorted; the lexicographically last cylinder of the shorter list is
/// split until the counts agree, and the lists are paired in order.
pub fn map_clopen(p: &[BinaryWord], q: &[BinaryWord]) -> Result<Vec<Rule>> {
    if p.is_empty() || q.is_empty() {
        return Err(validation("map_clopen needs non-empty clopen sets"));
    }
    for side in [p, q] {
        if !validate_code(side).is_antichain {
            return Err(validation("map_clopen inputs must be antichains"));
        }
    }
    let mut p = p.to_vec();
    let mut q = q.to_vec();
    p.sort();
    q.sort();
    while p.len() != q.len() {
        let short = if p.len() < q.len() { &mut p } else { &mut q };
        let last = short.pop().expect("non-empty");
        short.push(last.child(false)?);
        short.push(last.child(true)?);
    }
    Ok(p.into_iter().zip(q).collect())
}

impl fmt::Debug for PrefixMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (d, r)) in self.rules.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}->{r}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::BinaryWord;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    pub(crate) fn pm(rules: &[(&str, &str)]) -> PrefixMap {
        let rules: Vec<Rule> = rules.iter().map(|(d, r)| (w(d), w(r))).collect();
        PrefixMap::from_rules(&rules).unwrap()
    }

    fn clopen(list: &[&str]) -> ClopenSet {
        let words: Vec<BinaryWord> = list.iter().map(|s| w(s)).collect();
        ClopenSet::from_antichain(&words).unwrap()
    }

    fn swap() -> PrefixMap {
        pm(&[("0", "1"), ("1", "0")])
    }

    fn f() -> PrefixMap {
        pm(&[("00", "0"), ("01", "10"), ("1", "11")])
    }

    /// Pointwise image of a long word, independent of `compose`.
    fn eval(map: &PrefixMap, x: &BinaryWord) -> BinaryWord {
        map.apply(x).unwrap().expect("word longer than domain code")
    }

    #[test]
    fn canonicalize_examples() {
        assert!(pm(&[("0", "0"), ("1", "1")]).is_identity());
        // 00->10 and 01->11 merge into 0->1
        assert_eq!(pm(&[("00", "10"), ("01", "11"), ("1", "0")]), swap());
        let irreducible = pm(&[("00", "10"), ("01", "0"), ("1", "11")]);
        assert_eq!(irreducible.rules().len(), 3);
        assert!(pm(&[("00", "00"), ("01", "01"), ("1", "1")]).is_identity());
        let rules = [(w("0"), w("0")), (w("1"), w("0"))];
        assert!(PrefixMap::from_rules(&rules).is_err());
        let rules = [(w("0"), w("0")), (w("10"), w("1"))];
        assert!(PrefixMap::from_rules(&rules).is_err());
    }

    #[test]
    fn compose_examples() {
        assert!(swap().compose(&swap()).unwrap().is_identity());
        assert!(f().compose(&f().invert()).unwrap().is_identity());
        let fs = f().compose(&swap()).unwrap();
        for x in BinaryWord::all_of_length(3) {
            assert_eq!(eval(&fs, &x), eval(&f(), &eval(&swap(), &x)));
        }
        assert_eq!(fs, pm(&[("0", "11"), ("10", "0"), ("11", "10")]));
    }

    #[test]
    fn invert_examples() {
        assert!(PrefixMap::identity().invert().is_identity());
        assert_eq!(f().invert(), pm(&[("0", "00"), ("10", "01"), ("11", "1")]));
        let g = swap();
        let lhs = f().compose(&g).unwrap().invert();
        let rhs = g.invert().compose(&f().invert()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn image_examples() {
        let c = clopen(&["01", "1"]);
        assert_eq!(PrefixMap::identity().image_clopen(&c).unwrap(), c);
        assert_eq!(
            swap().image_clopen(&clopen(&["0"])).unwrap(),
            clopen(&["1"])
        );
        assert_eq!(
            f().image_clopen(&clopen(&["0"])).unwrap(),
            clopen(&["0", "10"])
        );
        assert_eq!(
            f().image_clopen(&ClopenSet::empty()).unwrap(),
            ClopenSet::empty()
        );
        assert_eq!(
            f().image_clopen(&ClopenSet::whole()).unwrap(),
            ClopenSet::whole()
        );
    }

    #[test]
    fn trace_examples() {
        let l1 = Partition::level(1).unwrap();
        let rel =
            |pairs: &[(usize, usize)]| IndexRelation::from_pairs(2, pairs.iter().copied()).unwrap();
        assert_eq!(
            PrefixMap::identity().trace(&l1).unwrap(),
            IndexRelation::diagonal(2).unwrap()
        );
        assert_eq!(swap().trace(&l1).unwrap(), rel(&[(0, 1), (1, 0)]));
        assert_eq!(f().trace(&l1).unwrap(), rel(&[(0, 0), (0, 1), (1, 1)]));
        assert_eq!(f().trace_by_images(&l1).unwrap(), f().trace(&l1).unwrap());
    }

    #[test]
    fn level_trace_matches_image_route() {
        let g = pm(&[("000", "1"), ("001", "011"), ("01", "00"), ("1", "010")]);
        for n in 0..=5 {
            let gamma = Partition::level(n).unwrap();
            assert_eq!(
                g.level_trace(n).unwrap(),
                g.trace_by_images(&gamma).unwrap(),
                "n={n}"
            );
        }
        let gamma = Partition::new(vec![
            clopen(&["00", "11"]),
            clopen(&["01"]),
            clopen(&["10"]),
        ])
        .unwrap();
        assert_eq!(g.trace(&gamma).unwrap(), g.trace_by_images(&gamma).unwrap());
    }

    #[test]
    fn stabilizer_examples() {
        let l1 = Partition::level(1).unwrap();
        assert!(PrefixMap::identity().in_stabilizer(&l1).unwrap());
        assert!(pm(&[("00", "01"), ("01", "00"), ("1", "1")])
            .in_stabilizer(&l1)
            .unwrap());
        assert!(!swap().in_stabilizer(&l1).unwrap());
    }

    #[test]
    fn sup_distance_examples() {
        assert_eq!(f().sup_distance(&f()), DyadicValue::ZERO);
        assert_eq!(
            PrefixMap::identity().sup_distance(&swap()),
            DyadicValue::ONE
        );
        let g = pm(&[("00", "01"), ("01", "00"), ("1", "1")]);
        assert_eq!(
            PrefixMap::identity().sup_distance(&g),
            DyadicValue::pow2_neg(1)
        );
        // one target a proper prefix of the other
        assert_eq!(
            cylinder_shift_distance(&[true, true], &[true]),
            DyadicValue::pow2_neg(1)
        );
        assert_eq!(cylinder_shift_distance(&[], &[false]), DyadicValue::ONE);
        assert_eq!(PrefixMap::identity().sup_distance(&f()), DyadicValue::ONE);
    }

    #[test]
    fn map_clopen_examples() {
        assert_eq!(
            map_clopen(&[w("0")], &[w("0")]).unwrap(),
            vec![(w("0"), w("0"))]
        );
        assert_eq!(
            map_clopen(&[w("0")], &[w("10"), w("11")]).unwrap(),
            vec![(w("00"), w("10")), (w("01"), w("11"))]
        );
        assert_eq!(
            map_clopen(&[w("00"), w("01"), w("1")], &[w("1")]).unwrap(),
            vec![(w("00"), w("10")), (w("01"), w("110")), (w("1"), w("111"))]
        );
        assert!(map_clopen(&[], &[w("1")]).is_err());
    }
}
