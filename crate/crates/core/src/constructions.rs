//! Deterministic realizations and witnesses.
//!
//! Every free choice (how to subdivide a clopen set, which homeomorphism carries one
//! clopen set onto another) is fixed by two rules: lexicographic order on index pairs,
//! and splitting the lexicographically last cylinder ([`split_cylinders`],
//! [`map_clopen`]). Each operation re-checks its output and reports an
//! [`Error::Internal`](crate::Error::Internal) if a post-condition fails.

use std::collections::BTreeMap;

use crate::cantor::{split_cylinders, ClopenSet, Partition};
use crate::error::{budget, internal, precondition, validation, Result};
use crate::finrel::{enumerate_e0, IndexRelation};
use crate::homeo::{map_clopen, PrefixMap, Rule};
use crate::towers::{project_relation, RelationTower, MAX_LEVEL};

/// Witness that `f ∈ V_γ g V_γ`: `u, v` preserve every block and `f = u⁻¹ ∘ g ∘ v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleCosetCertificate {
    pub u: PrefixMap,
    pub v: PrefixMap,
    pub gamma: Partition,
    pub f: PrefixMap,
    pub g: PrefixMap,
}

impl DoubleCosetCertificate {
    pub fn verify(&self) -> Result<bool> {
        Ok(self.u.in_stabilizer(&self.gamma)?
            && self.v.in_stabilizer(&self.gamma)?
            && self.u.invert().compose(&self.g)?.compose(&self.v)? == self.f)
    }
}

/// Maps `f, g` whose level-`refinement_level` traces match `R, S`, and whose
/// composite `f ∘ g` has the level-`level` trace of `RS`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterCertificate {
    pub f: PrefixMap,
    pub g: PrefixMap,
    pub level: usize,
    pub refinement_level: usize,
}

impl ClusterCertificate {
    pub fn verify(&self, r: &RelationTower, s: &RelationTower) -> Result<bool> {
        let m = self.refinement_level;
        let rs = r.product(s, m.max(self.level))?;
        Ok(self.f.level_trace(m)? == r.trace(m)?
            && self.g.level_trace(m)? == s.trace(m)?
            && self.f.compose(&self.g)?.level_trace(self.level)? == rs.trace(self.level)?)
    }
}

fn require_e0(r: &IndexRelation, gamma: &Partition, what: &str) -> Result<()> {
    if r.size() != gamma.len() {
        return Err(validation(format!(
            "{what} has {} indices but the partition has {} blocks",
            r.size(),
            gamma.len()
        )));
    }
    if !r.is_e0() {
        return Err(validation(format!(
            "{what} lacks full domain or range, so no map realizes it"
        )));
    }
    Ok(())
}

/// Splits `block` into one piece per key, pieces assigned in key order.
fn split_among<K: Ord + Copy>(block: &ClopenSet, keys: &[K]) -> Result<BTreeMap<K, ClopenSet>> {
    let pieces = split_cylinders(block.cylinders(), keys.len())?;
    Ok(keys.iter().copied().zip(pieces).collect())
}

/// Assembles one map from clopen pieces `source[i] -> target[i]`.
fn assemble<'a, I>(pairs: I) -> Result<PrefixMap>
where
    I: IntoIterator<Item = (&'a ClopenSet, &'a ClopenSet)>,
{
    let mut rules: Vec<Rule> = Vec::new();
    for (p, q) in pairs {
        rules.extend(map_clopen(p.cylinders(), q.cylinders())?);
    }
    PrefixMap::from_rules(&rules)
}

/// A map whose trace at `gamma` is exactly `r`.
///
/// Each block `U_α` is split into pieces `W_{α,β}` over the pairs `(α, β) ∈ r`, each
/// `U_β` into pieces `W'_{α,β}`, and `W_{α,β}` is carried onto `W'_{α,β}`.
pub fn realize(gamma: &Partition, r: &IndexRelation) -> Result<PrefixMap> {
    require_e0(r, gamma, "relation")?;
    let blocks = gamma.blocks();
    let mut sources: BTreeMap<(usize, usize), ClopenSet> = BTreeMap::new();
    let mut targets: BTreeMap<(usize, usize), ClopenSet> = BTreeMap::new();
    for (a, block) in blocks.iter().enumerate() {
        let keys: Vec<(usize, usize)> = r.successors(a).map(|b| (a, b)).collect();
        sources.extend(split_among(block, &keys)?);
    }
    let transposed = r.transpose();
    for (b, block) in blocks.iter().enumerate() {
        let keys: Vec<(usize, usize)> = transposed.successors(b).map(|a| (a, b)).collect();
        targets.extend(split_among(block, &keys)?);
    }
    let f = assemble(sources.iter().map(|(k, p)| (p, &targets[k])))?;
    if f.trace(gamma)? != *r {
        return Err(internal("realized map has the wrong trace"));
    }
    Ok(f)
}

/// Maps `f, g` with traces `r` and `s` at `lambda` such that `f ∘ g` has trace `rs`.
pub fn joint_realize(
    lambda: &Partition,
    r: &IndexRelation,
    s: &IndexRelation,
) -> Result<(PrefixMap, PrefixMap)> {
    require_e0(r, lambda, "first relation")?;
    require_e0(s, lambda, "second relation")?;
    let blocks = lambda.blocks();
    let s_t = s.transpose();
    // V_{α,γ,β} ⊆ U_γ for (α,γ) ∈ s, (γ,β) ∈ r; keyed (γ, α, β).
    let mut w_pieces: BTreeMap<(usize, usize), Vec<ClopenSet>> = BTreeMap::new();
    let mut y_prime: BTreeMap<(usize, usize), Vec<ClopenSet>> = BTreeMap::new();
    for (c, block) in blocks.iter().enumerate() {
        let keys: Vec<(usize, usize)> = s_t
            .successors(c)
            .flat_map(|a| r.successors(c).map(move |b| (a, b)))
            .collect();
        for ((a, b), piece) in split_among(block, &keys)? {
            w_pieces.entry((c, b)).or_default().push(piece.clone());
            y_prime.entry((a, c)).or_default().push(piece);
        }
    }
    let union = |ps: &[ClopenSet]| ps.iter().fold(ClopenSet::empty(), |acc, p| acc.union(p));
    let w: BTreeMap<(usize, usize), ClopenSet> =
        w_pieces.iter().map(|(k, ps)| (*k, union(ps))).collect();
    let y_prime: BTreeMap<(usize, usize), ClopenSet> =
        y_prime.iter().map(|(k, ps)| (*k, union(ps))).collect();

    // W'_{γ,β} partitions U_β over (γ,β) ∈ r; Y_{α,γ} partitions U_α over (α,γ) ∈ s.
    let r_t = r.transpose();
    let mut w_prime = BTreeMap::new();
    let mut y = BTreeMap::new();
    for (i, block) in blocks.iter().enumerate() {
        let keys: Vec<(usize, usize)> = r_t.successors(i).map(|c| (c, i)).collect();
        w_prime.extend(split_among(block, &keys)?);
        let keys: Vec<(usize, usize)> = s.successors(i).map(|c| (i, c)).collect();
        y.extend(split_among(block, &keys)?);
    }

    let f = assemble(w.iter().map(|(k, p)| (p, &w_prime[k])))?;
    let g = assemble(y.iter().map(|(k, p)| (p, &y_prime[k])))?;
    if f.trace(lambda)? != *r || g.trace(lambda)? != *s {
        return Err(internal("joint realization has the wrong factor traces"));
    }
    if f.compose(&g)?.trace(lambda)? != r.compose(s)? {
        return Err(internal("joint realization has the wrong product trace"));
    }
    Ok((f, g))
}

/// Certificate that `f ∈ V_γ g V_γ`, given equal traces of `f` and `g` at `gamma`.
pub fn double_coset_witness(
    gamma: &Partition,
    f: &PrefixMap,
    g: &PrefixMap,
) -> Result<DoubleCosetCertificate> {
    let trace = f.trace(gamma)?;
    if trace != g.trace(gamma)? {
        return Err(precondition(
            "the maps have different traces, so their double cosets differ",
        ));
    }
    let blocks = gamma.blocks();
    let f_images: Vec<ClopenSet> = blocks
        .iter()
        .map(|u| f.image_clopen(u))
        .collect::<Result<_>>()?;
    let g_images: Vec<ClopenSet> = blocks
        .iter()
        .map(|u| g.image_clopen(u))
        .collect::<Result<_>>()?;
    let mut rules: Vec<Rule> = Vec::new();
    for (a, b) in trace.pairs() {
        let p = f_images[a].intersection(&blocks[b]);
        let q = g_images[a].intersection(&blocks[b]);
        rules.extend(map_clopen(p.cylinders(), q.cylinders())?);
    }
    let u = PrefixMap::from_rules(&rules)?;
    let v = g.invert().compose(&u)?.compose(f)?;
    let cert = DoubleCosetCertificate {
        u,
        v,
        gamma: gamma.clone(),
        f: f.clone(),
        g: g.clone(),
    };
    if !cert.verify()? {
        return Err(internal("double coset certificate does not verify"));
    }
    Ok(cert)
}

/// One realization per member of `E0(A)`, in canonical order.
pub fn roelcke_net(gamma: &Partition) -> Result<Vec<PrefixMap>> {
    enumerate_e0(gamma.len())?
        .iter()
        .map(|r| realize(gamma, r))
        .collect()
}

/// Certificate placing `f` in `V_γ · h · V_γ` for its net representative `h`.
pub fn net_certificate(gamma: &Partition, f: &PrefixMap) -> Result<DoubleCosetCertificate> {
    let representative = realize(gamma, &f.trace(gamma)?)?;
    double_coset_witness(gamma, f, &representative)
}

/// Maps near `R` and `S` whose composite is near `RS` at level `n`.
///
/// Searches the least `m ≥ n` at which composing the level-`m` traces and projecting
/// to level `n` reproduces the trace of `RS`, then jointly realizes the level-`m`
/// traces.
pub fn cluster_witness(
    r: &RelationTower,
    s: &RelationTower,
    n: usize,
) -> Result<ClusterCertificate> {
    let rs = r.product(s, n)?;
    if !rs.is_exact() {
        return Err(validation(
            "the product of these towers is only approximated",
        ));
    }
    let target = rs.trace(n)?;
    let mut m = n;
    loop {
        if m > MAX_LEVEL {
            return Err(budget(format!(
                "no refinement level up to {MAX_LEVEL} certifies the product"
            )));
        }
        let composed = r.trace(m)?.compose(&s.trace(m)?)?;
        if project_relation(&composed, m, n)? == target {
            break;
        }
        m += 1;
    }
    let (f, g) = joint_realize(&Partition::level(m)?, &r.trace(m)?, &s.trace(m)?)?;
    let cert = ClusterCertificate {
        f,
        g,
        level: n,
        refinement_level: m,
    };
    if !cert.verify(r, s)? {
        return Err(internal("cluster certificate does not verify"));
    }
    Ok(cert)
}

/// The lexicographically first cylinder of `v`, extended by `0`.
fn shrink(v: &ClopenSet) -> Result<ClopenSet> {
    Ok(ClopenSet::cylinder(v.cylinders()[0].child(false)?))
}

/// A map with `f(U1) ⊆ V1` and `f(U2) ⊆ V2`.
pub fn dense_orbit_witness(
    u1: &ClopenSet,
    u2: &ClopenSet,
    v1: &ClopenSet,
    v2: &ClopenSet,
) -> Result<PrefixMap> {
    if u1.is_empty() || u2.is_empty() {
        return Err(precondition("U1 and U2 must be non-empty"));
    }
    if !u1.is_disjoint(u2) {
        return Err(precondition("U1 and U2 must be disjoint"));
    }
    let rest = u1.union(u2).complement();
    if rest.is_empty() {
        return Err(precondition("U1 ∪ U2 must not be the whole space"));
    }
    if v1.is_empty() || v2.is_empty() {
        return Err(precondition("V1 and V2 must be non-empty"));
    }
    if !v1.is_disjoint(v2) {
        return Err(precondition("V1 and V2 must be disjoint"));
    }
    let t1 = shrink(v1)?;
    let t2 = shrink(v2)?;
    let target_rest = t1.union(&t2).complement();
    let f = assemble([(u1, &t1), (u2, &t2), (&rest, &target_rest)])?;
    if !f.image_clopen(u1)?.is_subset(v1) || !f.image_clopen(u2)?.is_subset(v2) {
        return Err(internal("dense-orbit witness misses its targets"));
    }
    Ok(f)
}

/// `h` fixing `U` blockwise and carrying `f(U)` onto `V`, and `g = h ∘ f ∘ h⁻¹`,
/// which satisfies `g(U) = V`.
pub fn conjugation_witness(
    f: &PrefixMap,
    u: &ClopenSet,
    v: &ClopenSet,
) -> Result<(PrefixMap, PrefixMap)> {
    if u.is_empty() {
        return Err(precondition("U must be non-empty"));
    }
    let fu = f.image_clopen(u)?;
    if !fu.is_disjoint(u) {
        return Err(precondition("f(U) must be disjoint from U"));
    }
    let rest = u.union(&fu).complement();
    if rest.is_empty() {
        return Err(precondition("U ∪ f(U) must not be the whole space"));
    }
    if v.is_empty() {
        return Err(precondition("V must be non-empty"));
    }
    if !v.is_disjoint(u) {
        return Err(precondition("V must be disjoint from U"));
    }
    let target_rest = u.union(v).complement();
    if target_rest.is_empty() {
        return Err(precondition("U ∪ V must not be the whole space"));
    }
    let h = assemble([(u, u), (&fu, v), (&rest, &target_rest)])?;
    let g = h.compose(f)?.compose(&h.invert())?;
    if g.image_clopen(u)? != *v {
        return Err(internal("conjugate does not carry U onto V"));
    }
    Ok((h, g))
}
