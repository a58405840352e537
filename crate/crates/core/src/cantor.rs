//! Finite combinatorics of the Cantor space `2^ω`.
//!
//! A [`BinaryWord`] `w` names the cylinder of all infinite sequences extending `w`.
//! Clopen sets are finite antichains of words, and finite clopen partitions are
//! sequences of disjoint clopen blocks covering the whole space. Lexicographic
//! order on words places a prefix before its extensions (`0 < 00 < 01 < 1`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{budget, validation, Error, Result};

/// Maximum word length.
pub const MAX_DEPTH: usize = 64;

/// A finite binary word of length at most [`MAX_DEPTH`]. Bit `i` (from the start)
/// is stored at position `len - 1 - i` of `bits`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BinaryWord {
    bits: u64,
    len: u8,
}

impl BinaryWord {
    /// The empty word; its cylinder is the whole space.
    pub const EMPTY: BinaryWord = BinaryWord { bits: 0, len: 0 };

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut w = BinaryWord::EMPTY;
        for &b in bits {
            w = w.child(b)?;
        }
        Ok(w)
    }

    /// The level-`len` word whose bits spell `index` in binary (most significant first).
    pub fn from_index(index: usize, len: usize) -> Result<Self> {
        if len > MAX_DEPTH {
            return Err(budget(format!(
                "word length {len} exceeds depth cap {MAX_DEPTH}"
            )));
        }
        if len < 64 && (index as u64) >> len != 0 {
            return Err(validation(format!(
                "index {index} out of range for level {len}"
            )));
        }
        Ok(BinaryWord {
            bits: index as u64,
            len: len as u8,
        })
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bits as an integer, first bit most significant.
    pub fn value(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len(), "bit index out of range");
        self.bits >> (self.len() - 1 - i) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.bit(i))
    }

    pub fn child(&self, bit: bool) -> Result<Self> {
        if self.len() >= MAX_DEPTH {
            return Err(budget(format!("word length exceeds depth cap {MAX_DEPTH}")));
        }
        Ok(BinaryWord {
            bits: self.bits << 1 | bit as u64,
            len: self.len + 1,
        })
    }

    pub fn parent(&self) -> Option<Self> {
        (self.len > 0).then(|| BinaryWord {
            bits: self.bits >> 1,
            len: self.len - 1,
        })
    }

    pub fn last_bit(&self) -> Option<bool> {
        (self.len > 0).then_some(self.bits & 1 == 1)
    }

    /// First `n` bits. Panics if `n > len`.
    pub fn prefix(&self, n: usize) -> Self {
        assert!(n <= self.len(), "prefix longer than word");
        if n == 0 {
            return BinaryWord::EMPTY;
        }
        BinaryWord {
            bits: self.bits >> (self.len() - n),
            len: n as u8,
        }
    }

    /// Bits after the first `n`.
    pub fn suffix(&self, n: usize) -> Self {
        assert!(n <= self.len(), "suffix start beyond word");
        let len = self.len() - n;
        let bits = if len == 0 {
            0
        } else {
            self.bits & (u64::MAX >> (64 - len))
        };
        BinaryWord {
            bits,
            len: len as u8,
        }
    }

    pub fn concat(&self, other: &BinaryWord) -> Result<Self> {
        let len = self.len() + other.len();
        if len > MAX_DEPTH {
            return Err(budget(format!(
                "word length {len} exceeds depth cap {MAX_DEPTH}"
            )));
        }
        let bits = if other.is_empty() {
            self.bits
        } else {
            self.bits << other.len() | other.bits
        };
        Ok(BinaryWord {
            bits,
            len: len as u8,
        })
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &BinaryWord) -> bool {
        self.len <= other.len && other.prefix(self.len()) == *self
    }

    /// Comparable words have nested cylinders; incomparable ones disjoint cylinders.
    pub fn is_comparable(&self, other: &BinaryWord) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn common_prefix_len(&self, other: &BinaryWord) -> usize {
        let n = self.len().min(other.len());
        (0..n).find(|&i| self.bit(i) != other.bit(i)).unwrap_or(n)
    }

    /// Level-`n` indices of the cylinders meeting this word's cylinder.
    pub fn level_indices(&self, n: usize) -> std::ops::Range<usize> {
        if self.len() >= n {
            let p = self.prefix(n).bits as usize;
            p..p + 1
        } else {
            let shift = n - self.len();
            let lo = (self.bits as usize) << shift;
            lo..lo + (1usize << shift)
        }
    }

    /// All `2^n` words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BinaryWord> {
        assert!(n < 64, "level too large to enumerate");
        (0..1u64 << n).map(move |bits| BinaryWord { bits, len: n as u8 })
    }
}

impl Ord for BinaryWord {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.len().min(other.len());
        self.prefix(n)
            .bits
            .cmp(&other.prefix(n).bits)
            .then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for BinaryWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `e` for the empty word, otherwise the bits.
impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e");
        }
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "e" {
            return Ok(BinaryWord::EMPTY);
        }
        if s.is_empty() {
            return Err(validation("empty token; write `e` for the empty word"));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(validation(format!("`{s}` is not a binary word"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BinaryWord::from_bits(&bits)
    }
}

/// Outcome of [`validate_code`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeReport {
    pub is_antichain: bool,
    pub is_complete: bool,
    /// Kraft sum `Σ 2^-len` as a fraction over `2^64`, saturating.
    pub kraft_numerator: u128,
    /// Pairs `(p, w)` with `p ⊑ w`, including duplicates.
    pub prefix_violations: Vec<(BinaryWord, BinaryWord)>,
}

impl CodeReport {
    pub fn is_complete_code(&self) -> bool {
        self.is_antichain && self.is_complete
    }
}

pub fn kraft_numerator(words: &[BinaryWord]) -> u128 {
    words
        .iter()
        .fold(0u128, |acc, w| acc.saturating_add(1u128 << (64 - w.len())))
}

/// Reports whether `words` is an antichain and whether it is a complete prefix code.
pub fn validate_code(words: &[BinaryWord]) -> CodeReport {
    let mut sorted = words.to_vec();
    sorted.sort();
    let mut violations = Vec::new();
    for (i, p) in sorted.iter().enumerate() {
        // Extensions of p follow it directly in lexicographic order.
        for w in &sorted[i + 1..] {
            if !p.is_prefix_of(w) {
                break;
            }
            violations.push((*p, *w));
        }
    }
    let kraft = kraft_numerator(words);
    let is_antichain = violations.is_empty();
    CodeReport {
        is_antichain,
        is_complete: is_antichain && kraft == 1u128 << 64,
        kraft_numerator: kraft,
        prefix_violations: violations,
    }
}

/// A clopen subset of `2^ω`: a sorted antichain of words with no sibling pair.
///
/// This representation is unique, so equality of values is equality of point sets.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ClopenSet {
    cylinders: Vec<BinaryWord>,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet::default()
    }

    pub fn whole() -> Self {
        ClopenSet {
            cylinders: vec![BinaryWord::EMPTY],
        }
    }

    pub fn cylinder(w: BinaryWord) -> Self {
        ClopenSet { cylinders: vec![w] }
    }

    /// Canonical form of an antichain: siblings merged, sorted.
    pub fn from_antichain(words: &[BinaryWord]) -> Result<Self> {
        let report = validate_code(words);
        if let Some((p, w)) = report.prefix_violations.first() {
            return Err(validation(format!(
                "not an antichain: {p} is a prefix of {w}"
            )));
        }
        let mut sorted = words.to_vec();
        sorted.sort();
        Ok(ClopenSet {
            cylinders: merge_siblings(sorted),
        })
    }

    /// Union of arbitrary cylinders (overlaps allowed).
    pub fn from_cylinders(words: &[BinaryWord]) -> Self {
        let mut sorted = words.to_vec();
        sorted.sort();
        sorted.dedup();
        let mut kept: Vec<BinaryWord> = Vec::with_capacity(sorted.len());
        for w in sorted {
            if kept.last().is_some_and(|p| p.is_prefix_of(&w)) {
                continue;
            }
            kept.push(w);
        }
        ClopenSet {
            cylinders: merge_siblings(kept),
        }
    }

    pub fn cylinders(&self) -> &[BinaryWord] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cylinders == [BinaryWord::EMPTY]
    }

    pub fn max_len(&self) -> usize {
        self.cylinders.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Whether the cylinder of `w` lies inside the set.
    pub fn contains_cylinder(&self, w: &BinaryWord) -> bool {
        self.cylinders.iter().any(|c| c.is_prefix_of(w))
    }

    /// Whether the cylinder of `w` meets the set.
    pub fn meets_cylinder(&self, w: &BinaryWord) -> bool {
        self.cylinders.iter().any(|c| c.is_comparable(w))
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        let mut out = Vec::new();
        for a in &self.cylinders {
            for b in &other.cylinders {
                if a.is_prefix_of(b) {
                    out.push(*b);
                } else if b.is_prefix_of(a) {
                    out.push(*a);
                }
            }
        }
        out.sort();
        ClopenSet {
            cylinders: merge_siblings(out),
        }
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        let mut all = self.cylinders.clone();
        all.extend_from_slice(&other.cylinders);
        ClopenSet::from_cylinders(&all)
    }

    pub fn complement(&self) -> ClopenSet {
        let mut out = Vec::new();
        complement_below(BinaryWord::EMPTY, &self.cylinders, &mut out);
        ClopenSet {
            cylinders: merge_siblings(out),
        }
    }

    pub fn difference(&self, other: &ClopenSet) -> ClopenSet {
        self.intersection(&other.complement())
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> bool {
        self.cylinders
            .iter()
            .all(|a| other.cylinders.iter().all(|b| !a.is_comparable(b)))
    }

    pub fn is_subset(&self, other: &ClopenSet) -> bool {
        self.cylinders.iter().all(|w| other.contains_cylinder(w))
    }

    /// Deterministic split into `k` pieces; see [`split_cylinders`].
    pub fn split(&self, k: usize) -> Result<Vec<ClopenSet>> {
        split_cylinders(&self.cylinders, k)
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.cylinders).finish()
    }
}

/// Collapses sibling pairs `w0, w1` into `w` until none remain. Input must be a
/// sorted antichain; output is sorted.
fn merge_siblings(sorted: Vec<BinaryWord>) -> Vec<BinaryWord> {
    let mut stack: Vec<BinaryWord> = Vec::with_capacity(sorted.len());
    for w in sorted {
        stack.push(w);
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1];
            let below = stack[stack.len() - 2];
            let siblings = top.last_bit() == Some(true)
                && below.last_bit() == Some(false)
                && top.parent() == below.parent();
            if !siblings {
                break;
            }
            stack.truncate(stack.len() - 2);
            stack.push(top.parent().expect("non-empty word"));
        }
    }
    stack
}

/// Appends the cylinders of `cyl(prefix) \ ⋃ words` to `out`, where every word in
/// `words` extends `prefix`.
fn complement_below(prefix: BinaryWord, words: &[BinaryWord], out: &mut Vec<BinaryWord>) {
    if words.is_empty() {
        out.push(prefix);
        return;
    }
    if words.iter().any(|w| w.len() == prefix.len()) {
        return;
    }
    let Ok(left) = prefix.child(false) else {
        return;
    };
    let right = prefix.child(true).expect("same depth as left child");
    let (l, r): (Vec<BinaryWord>, Vec<BinaryWord>) =
        words.iter().partition(|w| left.is_prefix_of(w));
    complement_below(left, &l, out);
    complement_below(right, &r, out);
}

/// Splits a sorted antichain of cylinders into `k` disjoint non-empty clopen pieces.
///
/// While there are more than `k` cylinders, the tail is merged into the `k`-th piece;
/// while there are fewer, the lexicographically last cylinder `w` is replaced by
/// `w0, w1`. Pieces come out in lexicographic order of their first cylinder.
pub fn split_cylinders(words: &[BinaryWord], k: usize) -> Result<Vec<ClopenSet>> {
    if words.is_empty() {
        return Err(validation("cannot split the empty clopen set"));
    }
    if k == 0 {
        return Err(validation("piece count must be positive"));
    }
    let report = validate_code(words);
    if !report.is_antichain {
        return Err(validation("cylinders to split must form an antichain"));
    }
    let mut list = words.to_vec();
    list.sort();
    while list.len() < k {
        let last = list.pop().expect("non-empty list");
        list.push(last.child(false)?);
        list.push(last.child(true)?);
    }
    let tail = list.split_off(k - 1);
    let mut pieces: Vec<ClopenSet> = list.into_iter().map(ClopenSet::cylinder).collect();
    pieces.push(ClopenSet::from_antichain(&tail)?);
    Ok(pieces)
}

/// A finite clopen partition of `2^ω`; the block index is its position.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<ClopenSet>,
}

impl Partition {
    /// Validates non-emptiness, pairwise disjointness and covering.
    pub fn new(blocks: Vec<ClopenSet>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(validation("a partition needs at least one block"));
        }
        if let Some(i) = blocks.iter().position(ClopenSet::is_empty) {
            return Err(validation(format!("block {i} is empty")));
        }
        let all: Vec<BinaryWord> = blocks
            .iter()
            .flat_map(|b| b.cylinders().iter().copied())
            .collect();
        let report = validate_code(&all);
        if let Some((p, w)) = report.prefix_violations.first() {
            return Err(validation(format!("blocks overlap: {p} and {w}")));
        }
        if !report.is_complete {
            return Err(validation("blocks do not cover the whole space"));
        }
        Ok(Partition { blocks })
    }

    /// The `2^n` cylinders of length `n`, in lexicographic order.
    pub fn level(n: usize) -> Result<Self> {
        if n > 20 {
            return Err(budget(format!(
                "level-{n} partition is too large to materialize"
            )));
        }
        Ok(Partition {
            blocks: BinaryWord::all_of_length(n)
                .map(ClopenSet::cylinder)
                .collect(),
        })
    }

    pub fn blocks(&self) -> &[ClopenSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.blocks
            .iter()
            .map(ClopenSet::max_len)
            .max()
            .unwrap_or(0)
    }

    /// `Some(n)` if this is the canonical level-`n` partition.
    pub fn as_level(&self) -> Option<usize> {
        let n = self.max_len();
        (n < 64
            && self.blocks.len() == 1 << n
            && self
                .blocks
                .iter()
                .enumerate()
                .all(|(i, b)| b.cylinders() == [BinaryWord::from_index(i, n).unwrap()]))
        .then_some(n)
    }

    /// Index of the block containing the cylinder of `w`, if one does.
    pub fn block_of(&self, w: &BinaryWord) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains_cylinder(w))
    }

    /// For each level-`m` index, the block containing that cylinder (`m ≥ max_len`).
    pub fn level_map(&self, m: usize) -> Result<Vec<usize>> {
        if m < self.max_len() {
            return Err(validation("level is coarser than the partition"));
        }
        if m > 20 {
            return Err(budget(format!("level {m} is too fine to tabulate")));
        }
        let mut map = vec![usize::MAX; 1 << m];
        for (i, block) in self.blocks.iter().enumerate() {
            for c in block.cylinders() {
                for idx in c.level_indices(m) {
                    map[idx] = i;
                }
            }
        }
        Ok(map)
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.blocks
            .iter()
            .all(|b| coarser.blocks.iter().any(|c| b.is_subset(c)))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.blocks).finish()
    }
}

/// All non-empty `U ∩ V`, ordered by (index in `gamma`, index in `lambda`).
pub fn common_refinement(gamma: &Partition, lambda: &Partition) -> Partition {
    let blocks = gamma
        .blocks
        .iter()
        .flat_map(|u| lambda.blocks.iter().map(move |v| u.intersection(v)))
        .filter(|b| !b.is_empty())
        .collect();
    Partition { blocks }
}

/// Maps a pair of level-`m` indices to the level-`n` indices of the cylinders
/// containing them.
pub fn project_pair(m: usize, n: usize, pair: (usize, usize)) -> Result<(usize, usize)> {
    if n > m {
        return Err(validation(format!(
            "cannot project level {m} to finer level {n}"
        )));
    }
    if m >= 64 {
        return Err(budget(format!("level {m} exceeds index width")));
    }
    let bound = 1usize << m;
    if pair.0 >= bound || pair.1 >= bound {
        return Err(validation(format!(
            "index pair {pair:?} invalid at level {m}"
        )));
    }
    let shift = m - n;
    Ok((pair.0 >> shift, pair.1 >> shift))
}
