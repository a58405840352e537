//! Independent oracles: brute-force relation algebra, and pointwise evaluation of
//! prefix maps on cylinders refined until every map in a chain applies.

#![allow(dead_code)]

use roelcke::{BinaryWord, IndexRelation, Partition, PrefixMap};

pub fn w(s: &str) -> BinaryWord {
    s.parse().unwrap()
}

pub fn pm(rules: &[(&str, &str)]) -> PrefixMap {
    let rules: Vec<_> = rules.iter().map(|(d, r)| (w(d), w(r))).collect();
    PrefixMap::from_rules(&rules).unwrap()
}

pub fn rel(k: usize, pairs: &[(usize, usize)]) -> IndexRelation {
    IndexRelation::from_pairs(k, pairs.iter().copied()).unwrap()
}

pub fn swap() -> PrefixMap {
    pm(&[("0", "1"), ("1", "0")])
}

/// Boolean matrix of a relation.
pub fn matrix(r: &IndexRelation) -> Vec<Vec<bool>> {
    let k = r.size();
    (0..k)
        .map(|a| (0..k).map(|b| r.contains(a, b)).collect())
        .collect()
}

pub fn from_matrix(m: &[Vec<bool>]) -> IndexRelation {
    let k = m.len();
    let pairs = (0..k).flat_map(|a| (0..k).filter(move |&b| m[a][b]).map(move |b| (a, b)));
    IndexRelation::from_pairs(k, pairs).unwrap()
}

/// `rs` by witness search: `(x, y)` whenever some `z` has `(x, z) ∈ s`, `(z, y) ∈ r`.
pub fn compose(r: &IndexRelation, s: &IndexRelation) -> IndexRelation {
    let (r, s) = (matrix(r), matrix(s));
    let k = r.len();
    let m: Vec<Vec<bool>> = (0..k)
        .map(|x| (0..k).map(|y| (0..k).any(|z| s[x][z] && r[z][y])).collect())
        .collect();
    from_matrix(&m)
}

pub fn transpose(r: &IndexRelation) -> IndexRelation {
    let m = matrix(r);
    let k = m.len();
    from_matrix(
        &(0..k)
            .map(|a| (0..k).map(|b| m[b][a]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

pub fn subset(r: &IndexRelation, s: &IndexRelation) -> bool {
    r.pairs().all(|(a, b)| s.contains(a, b))
}

pub fn full_domain_and_range(r: &IndexRelation) -> bool {
    let m = matrix(r);
    let k = m.len();
    (0..k).all(|a| (0..k).any(|b| m[a][b])) && (0..k).all(|b| (0..k).any(|a| m[a][b]))
}

/// Every relation on `k` points, by bitmask.
pub fn all_relations(k: usize) -> Vec<IndexRelation> {
    (0u64..1 << (k * k))
        .map(|mask| {
            let pairs = (0..k * k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (i / k, i % k));
            IndexRelation::from_pairs(k, pairs).unwrap()
        })
        .collect()
}

pub fn brute_e0(k: usize) -> Vec<IndexRelation> {
    let mut all: Vec<_> = all_relations(k)
        .into_iter()
        .filter(full_domain_and_range)
        .collect();
    all.sort();
    all
}

/// `Σ (-1)^(i+j) C(k,i) C(k,j) 2^((k-i)(k-j))`: relations with no empty row or column.
pub fn inclusion_exclusion_e0(k: u32) -> i128 {
    let binom = |n: u32, r: u32| -> i128 {
        (0..r).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
    };
    let mut total = 0i128;
    for i in 0..=k {
        for j in 0..=k {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            total += sign * binom(k, i) * binom(k, j) * (1i128 << ((k - i) * (k - j)));
        }
    }
    total
}

/// The level-`n` partition index of a word of length at least `n`.
pub fn level_index(x: &BinaryWord, n: usize) -> usize {
    (0..n).fold(0, |acc, i| acc << 1 | x.bit(i) as usize)
}

/// Applies `maps[0] ∘ maps[1] ∘ …` to the cylinder `x`, if every step is a prefix
/// substitution on it.
pub fn apply_chain(maps: &[&PrefixMap], x: &BinaryWord) -> Option<BinaryWord> {
    let mut cur = *x;
    for f in maps.iter().rev() {
        let (d, r) = f.rules().iter().find(|(d, _)| d.is_prefix_of(&cur))?;
        let rest = cur.suffix(d.len());
        cur = r.concat(&rest).ok()?;
    }
    Some(cur)
}

/// Pairs `(x, chain(x))` over a complete code of cylinders on which the chain acts
/// by substitution, with `x` and its image at least `min_len` long.
pub fn pointwise(maps: &[&PrefixMap], min_len: usize) -> Vec<(BinaryWord, BinaryWord)> {
    fn go(
        maps: &[&PrefixMap],
        x: BinaryWord,
        min_len: usize,
        out: &mut Vec<(BinaryWord, BinaryWord)>,
    ) {
        if x.len() >= min_len {
            if let Some(y) = apply_chain(maps, &x) {
                if y.len() >= min_len {
                    out.push((x, y));
                    return;
                }
            }
        }
        go(maps, x.child(false).unwrap(), min_len, out);
        go(maps, x.child(true).unwrap(), min_len, out);
    }
    let mut out = Vec::new();
    go(maps, BinaryWord::EMPTY, min_len, &mut out);
    out
}

/// Whether two chains denote the same homeomorphism.
pub fn same_map(a: &[&PrefixMap], b: &[&PrefixMap]) -> bool {
    fn go(a: &[&PrefixMap], b: &[&PrefixMap], x: BinaryWord) -> bool {
        match (apply_chain(a, &x), apply_chain(b, &x)) {
            (Some(p), Some(q)) => p == q,
            _ => go(a, b, x.child(false).unwrap()) && go(a, b, x.child(true).unwrap()),
        }
    }
    go(a, b, BinaryWord::EMPTY)
}

fn block_index(gamma: &Partition, x: &BinaryWord) -> usize {
    gamma
        .blocks()
        .iter()
        .position(|b| b.cylinders().iter().any(|c| c.is_prefix_of(x)))
        .expect("word long enough to fix its block")
}

/// Trace of a chain at `gamma`: block pairs `(block(x), block(chain(x)))`.
pub fn chain_trace(maps: &[&PrefixMap], gamma: &Partition) -> IndexRelation {
    let pairs = pointwise(maps, gamma.max_len())
        .into_iter()
        .map(|(x, y)| (block_index(gamma, &x), block_index(gamma, &y)));
    IndexRelation::from_pairs(gamma.len(), pairs).unwrap()
}

pub fn chain_level_trace(maps: &[&PrefixMap], n: usize) -> IndexRelation {
    let pairs = pointwise(maps, n)
        .into_iter()
        .map(|(x, y)| (level_index(&x, n), level_index(&y, n)));
    IndexRelation::from_pairs(1 << n, pairs).unwrap()
}

/// Whether the chain maps every block of `gamma` into itself.
pub fn preserves_blocks(maps: &[&PrefixMap], gamma: &Partition) -> bool {
    pointwise(maps, gamma.max_len())
        .iter()
        .all(|(x, y)| block_index(gamma, x) == block_index(gamma, y))
}

/// `sup_x 2^-lcp(f(x), g(x))` as `Some(k)` for `2^-k`, `None` for zero. On a cylinder
/// where both act by substitution the sup is `2^-lcp` of the two image prefixes.
pub fn sup_distance_exponent(f: &PrefixMap, g: &PrefixMap) -> Option<usize> {
    let depth = f.depth().max(g.depth());
    BinaryWord::all_of_length(depth)
        .filter_map(|x| {
            let (p, q) = (
                apply_chain(&[f], &x).unwrap(),
                apply_chain(&[g], &x).unwrap(),
            );
            (p != q).then(|| p.common_prefix_len(&q))
        })
        .min()
}

/// Trace at level `n` of the clopen relation given by `seed` at `level`, by
/// refining or projecting block pairs directly.
pub fn clopen_trace(level: usize, seed: &IndexRelation, n: usize) -> IndexRelation {
    let mut out = IndexRelation::empty(1 << n).unwrap();
    if n >= level {
        let shift = n - level;
        for (a, b) in seed.pairs() {
            for i in 0..1 << shift {
                for j in 0..1 << shift {
                    out.insert(a << shift | i, b << shift | j);
                }
            }
        }
    } else {
        let shift = level - n;
        for (a, b) in seed.pairs() {
            out.insert(a >> shift, b >> shift);
        }
    }
    out
}
