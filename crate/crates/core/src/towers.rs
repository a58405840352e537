//! Closed relations on `2^ω × 2^ω` with full domain and range, represented by their
//! traces on the canonical level-`n` partitions.
//!
//! A [`RelationTower`] answers `trace(n)`: the set of level-`n` index pairs `(a, b)`
//! whose rectangle `cyl(a) × cyl(b)` meets the relation. Consecutive traces are
//! coherent (`trace(n)` is the projection of `trace(n + 1)`). Towers are built from
//! clopen seeds and graphs of prefix maps, and closed under involution, translation
//! and (possibly approximate) composition.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::cantor::{BinaryWord, Partition};
use crate::dyadic::DyadicValue;
use crate::error::{budget, internal, validation, Result};
use crate::finrel::IndexRelation;
use crate::homeo::PrefixMap;

/// Finest level whose trace can be materialized.
pub const MAX_LEVEL: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `gR = {(x, g(y)) : (x, y) ∈ R}`.
    Left,
    /// `Rg = {(g⁻¹(x), y) : (x, y) ∈ R}`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exactness {
    /// Traces equal those of the denoted relation.
    Exact,
    /// Traces contain those of the denoted relation; levels above `budget` are refused.
    Superset { budget: usize },
}

#[derive(Debug, Clone)]
pub enum TowerKind {
    Clopen {
        seed_level: usize,
        seed: IndexRelation,
    },
    Graph(PrefixMap),
    Product {
        lhs: RelationTower,
        rhs: RelationTower,
        budget: usize,
    },
    Involution(RelationTower),
    Translate {
        g: PrefixMap,
        inner: RelationTower,
        side: Side,
    },
}

struct Node {
    kind: TowerKind,
    exactness: Exactness,
    cache: Mutex<HashMap<usize, IndexRelation>>,
}

/// Cheap to clone; traces are memoized per node.
#[derive(Clone)]
pub struct RelationTower(Arc<Node>);

fn check_level(n: usize) -> Result<()> {
    if n > MAX_LEVEL {
        return Err(budget(format!(
            "level {n} exceeds the tower level cap {MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// Projects a level-`m` relation to level `n ≤ m` by truncating both indices.
pub fn project_relation(rel: &IndexRelation, m: usize, n: usize) -> Result<IndexRelation> {
    if n > m || rel.size() != 1 << m {
        return Err(validation(format!(
            "cannot project a level-{m} relation to level {n}"
        )));
    }
    let shift = m - n;
    IndexRelation::from_pairs(1 << n, rel.pairs().map(|(a, b)| (a >> shift, b >> shift)))
}

/// Every level-`m` pair inside a rectangle of the level-`s` relation (`s ≤ m`).
pub fn refine_relation(rel: &IndexRelation, s: usize, m: usize) -> Result<IndexRelation> {
    if s > m || rel.size() != 1 << s {
        return Err(validation(format!(
            "cannot refine a level-{s} relation to level {m}"
        )));
    }
    check_level(m)?;
    let shift = m - s;
    let mut out = IndexRelation::empty(1 << m)?;
    for (a, b) in rel.pairs() {
        for x in a << shift..(a + 1) << shift {
            for y in b << shift..(b + 1) << shift {
                out.insert(x, y);
            }
        }
    }
    Ok(out)
}

impl RelationTower {
    fn from_kind(kind: TowerKind, exactness: Exactness) -> Self {
        RelationTower(Arc::new(Node {
            kind,
            exactness,
            cache: Mutex::new(HashMap::new()),
        }))
    }

    /// The clopen relation `⋃ {cyl(a) × cyl(b) : (a, b) ∈ seed}` at level `seed_level`.
    pub fn clopen(seed_level: usize, seed: IndexRelation) -> Result<Self> {
        check_level(seed_level)?;
        if seed.size() != 1 << seed_level {
            return Err(validation(format!(
                "a level-{seed_level} seed needs {} indices, got {}",
                1usize << seed_level,
                seed.size()
            )));
        }
        if !seed.is_e0() {
            return Err(validation("seed relation lacks full domain or range"));
        }
        // Coarsest level at which the relation is still a union of rectangles.
        let (mut level, mut seed) = (seed_level, seed);
        while level > 0 {
            let coarse = project_relation(&seed, level, level - 1)?;
            if refine_relation(&coarse, level - 1, level)? != seed {
                break;
            }
            level -= 1;
            seed = coarse;
        }
        Ok(Self::from_kind(
            TowerKind::Clopen {
                seed_level: level,
                seed,
            },
            Exactness::Exact,
        ))
    }

    /// The whole square `X²`.
    pub fn full() -> Self {
        Self::clopen(0, IndexRelation::full(1).expect("size 1")).expect("valid seed")
    }

    /// The graph `{(x, f(x))}`.
    pub fn graph(f: PrefixMap) -> Self {
        Self::from_kind(TowerKind::Graph(f), Exactness::Exact)
    }

    /// The diagonal, i.e. the graph of the identity.
    pub fn diagonal() -> Self {
        Self::graph(PrefixMap::identity())
    }

    pub fn kind(&self) -> &TowerKind {
        &self.0.kind
    }

    pub fn exactness(&self) -> Exactness {
        self.0.exactness
    }

    pub fn is_exact(&self) -> bool {
        self.0.exactness == Exactness::Exact
    }

    pub fn as_graph(&self) -> Option<&PrefixMap> {
        match &self.0.kind {
            TowerKind::Graph(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_clopen(&self) -> Option<(usize, &IndexRelation)> {
        match &self.0.kind {
            TowerKind::Clopen { seed_level, seed } => Some((*seed_level, seed)),
            _ => None,
        }
    }

    /// Trace at the canonical level-`n` partition.
    pub fn trace(&self, n: usize) -> Result<IndexRelation> {
        check_level(n)?;
        if let Some(hit) = self.0.cache.lock().expect("trace cache poisoned").get(&n) {
            return Ok(hit.clone());
        }
        let rel = self.compute_trace(n)?;
        self.0
            .cache
            .lock()
            .expect("trace cache poisoned")
            .insert(n, rel.clone());
        Ok(rel)
    }

    fn compute_trace(&self, n: usize) -> Result<IndexRelation> {
        match &self.0.kind {
            TowerKind::Clopen { seed_level, seed } => {
                if n >= *seed_level {
                    refine_relation(seed, *seed_level, n)
                } else {
                    project_relation(seed, *seed_level, n)
                }
            }
            TowerKind::Graph(f) => f.level_trace(n),
            TowerKind::Involution(inner) => Ok(inner.trace(n)?.transpose()),
            TowerKind::Product {
                lhs,
                rhs,
                budget: b,
            } => {
                if n > *b {
                    return Err(budget(format!(
                        "level {n} requested from a product approximated at budget {b}"
                    )));
                }
                if n == *b {
                    lhs.trace(*b)?.compose(&rhs.trace(*b)?)
                } else {
                    project_relation(&self.trace(*b)?, *b, n)
                }
            }
            TowerKind::Translate { g, inner, side } => translated_trace(g, inner, *side, n),
        }
    }

    /// Trace at an arbitrary partition, aggregated from level `max_len(γ)`.
    pub fn trace_at(&self, gamma: &Partition) -> Result<IndexRelation> {
        let m = gamma.max_len();
        let fine = self.trace(m)?;
        if gamma.as_level().is_some() {
            return Ok(fine);
        }
        let map = gamma.level_map(m)?;
        IndexRelation::from_pairs(gamma.len(), fine.pairs().map(|(a, b)| (map[a], map[b])))
    }

    /// Transposed relation `R* = {(y, x) : (x, y) ∈ R}`.
    pub fn involute(&self) -> RelationTower {
        match &self.0.kind {
            TowerKind::Graph(f) => Self::graph(f.invert()),
            TowerKind::Clopen { seed_level, seed } => {
                Self::clopen(*seed_level, seed.transpose()).expect("transpose of an E0 seed")
            }
            TowerKind::Involution(inner) => inner.clone(),
            _ => Self::from_kind(TowerKind::Involution(self.clone()), self.exactness()),
        }
    }

    /// Composition `self · rhs` (`rhs` acts first).
    ///
    /// Exact for graph·graph, clopen·clopen, and graph·exact / exact·graph. Every
    /// other combination yields a superset approximation whose traces up to `budget`
    /// are projections of the composed level-`budget` traces.
    pub fn product(&self, rhs: &RelationTower, budget_level: usize) -> Result<RelationTower> {
        check_level(budget_level)?;
        match (&self.0.kind, &rhs.0.kind) {
            (TowerKind::Graph(f), TowerKind::Graph(g)) => Ok(Self::graph(f.compose(g)?)),
            (
                TowerKind::Clopen {
                    seed_level: s1,
                    seed: r,
                },
                TowerKind::Clopen {
                    seed_level: s2,
                    seed: s,
                },
            ) => {
                let m = (*s1).max(*s2);
                let r = refine_relation(r, *s1, m)?;
                let s = refine_relation(s, *s2, m)?;
                Self::clopen(m, r.compose(&s)?)
            }
            (TowerKind::Graph(g), _) if rhs.is_exact() => rhs.translate(g, Side::Left),
            (_, TowerKind::Graph(g)) if self.is_exact() => self.translate(g, Side::Right),
            _ => Ok(Self::from_kind(
                TowerKind::Product {
                    lhs: self.clone(),
                    rhs: rhs.clone(),
                    budget: budget_level,
                },
                Exactness::Superset {
                    budget: budget_level,
                },
            )),
        }
    }

    /// `gR` for [`Side::Left`], `Rg` for [`Side::Right`].
    pub fn translate(&self, g: &PrefixMap, side: Side) -> Result<RelationTower> {
        if g.is_identity() {
            return Ok(self.clone());
        }
        match (&self.0.kind, side) {
            (TowerKind::Graph(f), Side::Left) => return Ok(Self::graph(g.compose(f)?)),
            (TowerKind::Graph(f), Side::Right) => return Ok(Self::graph(f.compose(g)?)),
            _ => {}
        }
        Ok(Self::from_kind(
            TowerKind::Translate {
                g: g.clone(),
                inner: self.clone(),
                side,
            },
            self.exactness(),
        ))
    }

    /// The same relation as a clopen tower, when it is a finite union of rectangles
    /// that this representation can certify (clopen seeds and their translates,
    /// involutions thereof).
    pub fn clopen_form(&self) -> Result<Option<RelationTower>> {
        match &self.0.kind {
            TowerKind::Clopen { .. } => Ok(Some(self.clone())),
            TowerKind::Involution(inner) => Ok(inner.clopen_form()?.map(|t| t.involute())),
            TowerKind::Translate { g, inner, side } => {
                let Some(base) = inner.clopen_form()? else {
                    return Ok(None);
                };
                let (s, _) = base.as_clopen().expect("clopen form");
                let moved = match side {
                    Side::Left => g.clone(),
                    Side::Right => g.invert(),
                };
                // Images of level-s cylinders are unions of cylinders of this length at most.
                let level = moved
                    .rules()
                    .iter()
                    .map(|(d, r)| r.len() + s.saturating_sub(d.len()))
                    .max()
                    .unwrap_or(0)
                    .max(s);
                check_level(level)?;
                Ok(Some(Self::clopen(level, self.trace(level)?)?))
            }
            _ => Ok(None),
        }
    }
}

/// Trace of `gR` or `Rg` at level `n`, read off the inner trace at a level fine enough
/// that `g` carries every cylinder into a single level-`n` cylinder.
fn translated_trace(
    g: &PrefixMap,
    inner: &RelationTower,
    side: Side,
    n: usize,
) -> Result<IndexRelation> {
    let moved = match side {
        Side::Left => g.clone(),
        Side::Right => g.invert(),
    };
    let fine = moved
        .rules()
        .iter()
        .map(|(d, r)| d.len() + n.saturating_sub(r.len()))
        .max()
        .unwrap_or(0)
        .max(n);
    check_level(fine)?;
    let inner_trace = inner.trace(fine)?;
    let shift = fine - n;
    let image_index = |idx: usize| -> Result<usize> {
        let w = BinaryWord::from_index(idx, fine)?;
        let img = moved.apply(&w)?.ok_or_else(|| {
            internal("cylinder finer than the translation's rules is not covered")
        })?;
        Ok(img.prefix(n).value() as usize)
    };
    let mut out = IndexRelation::empty(1 << n)?;
    for (a, b) in inner_trace.pairs() {
        let (x, y) = match side {
            Side::Left => (a >> shift, image_index(b)?),
            Side::Right => (image_index(a)?, b >> shift),
        };
        out.insert(x, y);
    }
    Ok(out)
}

impl fmt::Debug for RelationTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            TowerKind::Clopen { seed_level, seed } => write!(f, "clopen({seed_level}, {seed:?})"),
            TowerKind::Graph(g) => write!(f, "graph({g:?})"),
            TowerKind::Product { lhs, rhs, budget } => {
                write!(f, "product({lhs:?}, {rhs:?}; {budget})")
            }
            TowerKind::Involution(inner) => write!(f, "involute({inner:?})"),
            TowerKind::Translate { g, inner, side } => {
                write!(f, "translate({g:?}, {inner:?}, {side:?})")
            }
        }
    }
}

/// Composition of two towers; see [`RelationTower::product`].
pub fn product(
    lhs: &RelationTower,
    rhs: &RelationTower,
    budget_level: usize,
) -> Result<RelationTower> {
    lhs.product(rhs, budget_level)
}

/// Whether both towers lie in the same basic neighbourhood at `gamma`.
pub fn same_neighborhood(
    t1: &RelationTower,
    t2: &RelationTower,
    gamma: &Partition,
) -> Result<bool> {
    Ok(t1.trace_at(gamma)? == t2.trace_at(gamma)?)
}

/// Distance between distinct level-`n` cylinders `a`, `b`, scaled by `2^n`.
fn scaled_cylinder_gap(a: usize, b: usize, n: usize) -> u64 {
    if a == b {
        return 0;
    }
    let differing = (usize::BITS - (a ^ b).leading_zeros()) as usize;
    let lcp = n - differing;
    1u64 << (n - lcp)
}

/// Bounds `(L, L + 2^(1-n))` on the Hausdorff distance between two exact towers,
/// where `L` is the Hausdorff distance between the level-`n` trace rectangles under
/// the sum metric `d(x, x') + d(y, y')`.
pub fn hausdorff_bounds(
    t1: &RelationTower,
    t2: &RelationTower,
    n: usize,
) -> Result<(DyadicValue, DyadicValue)> {
    if !t1.is_exact() || !t2.is_exact() {
        return Err(validation("Hausdorff bounds need exact towers"));
    }
    let a: Vec<(usize, usize)> = t1.trace(n)?.pairs().collect();
    let b: Vec<(usize, usize)> = t2.trace(n)?.pairs().collect();
    let directed = |from: &[(usize, usize)], to: &[(usize, usize)]| -> u64 {
        from.iter()
            .map(|&(x, y)| {
                to.iter()
                    .map(|&(x2, y2)| scaled_cylinder_gap(x, x2, n) + scaled_cylinder_gap(y, y2, n))
                    .min()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    };
    let scaled = directed(&a, &b).max(directed(&b, &a));
    let lower = DyadicValue::new(scaled as u128, n as u32);
    let slack = DyadicValue::new(2, n as u32);
    Ok((lower, lower + slack))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceFailure {
    pub level: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceReport {
    pub checked_up_to: usize,
    pub failure: Option<CoherenceFailure>,
}

impl CoherenceReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `traces[n] ∈ E0` and `traces[n] = project(traces[n + 1])`, where
/// `traces[n]` is the level-`n` trace.
pub fn check_trace_sequence(traces: &[IndexRelation]) -> CoherenceReport {
    let fail = |level: usize, reason: String| CoherenceReport {
        checked_up_to: traces.len().saturating_sub(1),
        failure: Some(CoherenceFailure { level, reason }),
    };
    for (n, t) in traces.iter().enumerate() {
        if t.size() != 1 << n {
            return fail(
                n,
                format!("expected {} indices, found {}", 1usize << n, t.size()),
            );
        }
        if !t.is_e0() {
            return fail(n, "trace lacks full domain or range".into());
        }
        if let Some(next) = traces.get(n + 1) {
            match project_relation(next, n + 1, n) {
                Ok(p) if p == *t => {}
                Ok(_) => {
                    return fail(
                        n,
                        format!("trace differs from projection of level {}", n + 1),
                    )
                }
                Err(e) => return fail(n + 1, e.to_string()),
            }
        }
    }
    CoherenceReport {
        checked_up_to: traces.len().saturating_sub(1),
        failure: None,
    }
}

/// Certifies the tower laws for all levels `0..=max_level`.
pub fn check_coherence(t: &RelationTower, max_level: usize) -> Result<CoherenceReport> {
    let traces = (0..=max_level)
        .map(|n| t.trace(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(check_trace_sequence(&traces))
}
