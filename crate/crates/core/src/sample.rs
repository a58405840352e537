//! Random and exhaustive generators for codes, maps, partitions and relations.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cantor::{BinaryWord, ClopenSet, Partition};
use crate::finrel::IndexRelation;
use crate::homeo::{PrefixMap, Rule};

/// A random complete prefix code of `size` words, none longer than `max_depth`.
///
/// Grows the code by splitting a random leaf; stops early if every leaf is at depth.
pub fn random_code<R: Rng + ?Sized>(rng: &mut R, size: usize, max_depth: usize) -> Vec<BinaryWord> {
    let mut code = vec![BinaryWord::EMPTY];
    while code.len() < size {
        let splittable: Vec<usize> = (0..code.len())
            .filter(|&i| code[i].len() < max_depth)
            .collect();
        let Some(&i) = splittable.choose(rng) else {
            break;
        };
        let w = code.swap_remove(i);
        code.push(w.child(false).expect("below depth cap"));
        code.push(w.child(true).expect("below depth cap"));
    }
    code.sort();
    code
}

/// A random prefix-exchange map whose rule words have length at most `max_depth`.
pub fn random_prefix_map<R: Rng + ?Sized>(rng: &mut R, max_depth: usize) -> PrefixMap {
    let cap = 1usize << max_depth.min(5);
    loop {
        let size = rng.gen_range(1..=cap);
        let domain = random_code(rng, size, max_depth);
        let range = random_code(rng, domain.len(), max_depth);
        if range.len() != domain.len() {
            continue;
        }
        let mut range = range;
        range.shuffle(rng);
        let rules: Vec<Rule> = domain.into_iter().zip(range).collect();
        return PrefixMap::from_rules(&rules).expect("two complete codes of equal size");
    }
}

/// A random map preserving every block of `gamma`.
pub fn random_stabilizer_element<R: Rng + ?Sized>(
    rng: &mut R,
    gamma: &Partition,
    extra_depth: usize,
) -> PrefixMap {
    let mut rules = Vec::new();
    for block in gamma.blocks() {
        let refine = |rng: &mut R| -> Vec<BinaryWord> {
            let mut out = Vec::new();
            for c in block.cylinders() {
                let size = rng.gen_range(1..=4);
                let sub = random_code(rng, size, extra_depth);
                out.extend(sub.iter().map(|t| c.concat(t).expect("within depth cap")));
            }
            out
        };
        let source = refine(rng);
        let target = refine(rng);
        let pieces = crate::homeo::map_clopen(&source, &target).expect("non-empty antichains");
        let mut targets: Vec<BinaryWord> = pieces.iter().map(|r| r.1).collect();
        targets.shuffle(rng);
        rules.extend(pieces.iter().map(|r| r.0).zip(targets));
    }
    PrefixMap::from_rules(&rules).expect("block-preserving bijection")
}

/// A random partition with at most `max_blocks` blocks whose words have length at most `max_depth`.
pub fn random_partition<R: Rng + ?Sized>(
    rng: &mut R,
    max_blocks: usize,
    max_depth: usize,
) -> Partition {
    let size = rng.gen_range(1..=(1usize << max_depth).min(2 * max_blocks.max(1)));
    let mut code = random_code(rng, size, max_depth);
    code.shuffle(rng);
    let blocks_wanted = rng.gen_range(1..=max_blocks.min(code.len()).max(1));
    let mut groups: Vec<Vec<BinaryWord>> = vec![Vec::new(); blocks_wanted];
    for (i, w) in code.into_iter().enumerate() {
        let g = if i < blocks_wanted {
            i
        } else {
            rng.gen_range(0..blocks_wanted)
        };
        groups[g].push(w);
    }
    let blocks = groups
        .iter()
        .map(|g| ClopenSet::from_antichain(g).expect("subset of a prefix code"))
        .collect();
    Partition::new(blocks).expect("groups of a complete code")
}

/// A uniformly random member of `E0(k)`, by rejection.
pub fn random_e0<R: Rng + ?Sized>(rng: &mut R, k: usize) -> IndexRelation {
    loop {
        let pairs: Vec<(usize, usize)> = (0..k * k)
            .filter(|_| rng.gen_bool(0.5))
            .map(|i| (i / k, i % k))
            .collect();
        let r = IndexRelation::from_pairs(k, pairs).expect("in range");
        if r.is_e0() {
            return r;
        }
    }
}

/// A uniformly random relation (any subset of `k x k`).
pub fn random_relation<R: Rng + ?Sized>(rng: &mut R, k: usize) -> IndexRelation {
    let pairs: Vec<(usize, usize)> = (0..k * k)
        .filter(|_| rng.gen_bool(0.5))
        .map(|i| (i / k, i % k))
        .collect();
    IndexRelation::from_pairs(k, pairs).expect("in range")
}

/// Every complete prefix code with at most `max_size` words of length at most `max_depth`.
pub fn all_complete_codes(max_size: usize, max_depth: usize) -> Vec<Vec<BinaryWord>> {
    fn grow(
        code: Vec<BinaryWord>,
        max_size: usize,
        max_depth: usize,
        out: &mut std::collections::BTreeSet<Vec<BinaryWord>>,
    ) {
        if !out.insert(code.clone()) || code.len() == max_size {
            return;
        }
        for i in 0..code.len() {
            if code[i].len() < max_depth {
                let mut next = code.clone();
                let w = next.remove(i);
                next.push(w.child(false).unwrap());
                next.push(w.child(true).unwrap());
                next.sort();
                grow(next, max_size, max_depth, out);
            }
        }
    }
    let mut out = std::collections::BTreeSet::new();
    grow(vec![BinaryWord::EMPTY], max_size, max_depth, &mut out);
    out.into_iter().collect()
}

/// Every prefix-exchange map with codes of at most `max_size` words of length at most
/// `max_depth`, deduplicated by canonical form.
pub fn all_prefix_maps(max_size: usize, max_depth: usize) -> Vec<PrefixMap> {
    let codes = all_complete_codes(max_size, max_depth);
    let mut out = std::collections::BTreeSet::new();
    for d in &codes {
        for r in codes.iter().filter(|r| r.len() == d.len()) {
            for perm in permutations(d.len()) {
                let rules: Vec<Rule> = d
                    .iter()
                    .zip(perm.iter().map(|&i| r[i]))
                    .map(|(&a, b)| (a, b))
                    .collect();
                out.insert(PrefixMap::from_rules(&rules).expect("complete codes"));
            }
        }
    }
    out.into_iter().collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generators_produce_valid_values() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let f = random_prefix_map(&mut rng, 5);
            assert!(f.depth() <= 5);
            let gamma = random_partition(&mut rng, 6, 4);
            assert!(gamma.len() <= 6);
            let u = random_stabilizer_element(&mut rng, &gamma, 2);
            assert!(u.in_stabilizer(&gamma).unwrap());
            assert!(random_e0(&mut rng, 3).is_e0());
        }
    }

    #[test]
    fn small_code_census() {
        // sizes 1..=4 at depth ≤ 3: 1 + 1 + 2 + 5 codes
        assert_eq!(all_complete_codes(4, 3).len(), 9);
        assert_eq!(all_complete_codes(3, 3).len(), 4);
    }
}
