//! ρ-nets, hierarchical net systems around centers, doubling-dimension
//! estimation, packing-bound checks, and snapping.
//!
//! A ρ-net of a host set is simultaneously a ρ-packing (members pairwise
//! strictly further than ρ apart) and a ρ-covering (every host point within
//! ρ of some member). Greedy admission in ascending index order produces one
//! deterministically. Around a fixed center set, nets at geometrically
//! shrinking scales form a [`NetHierarchy`], the scaffolding used by the
//! event diagnostics in [`crate::verify`].

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::geometry::{dist, Point, WeightedPointSet};
use crate::{Error, Result};

/// Level assigned to a point coinciding with its nearest center; its radius
/// `r0/2^64` contributes nothing to any powered sum.
pub const LEVEL_CAP: i64 = 64;

/// A ρ-net: member indices into the point set it was built over, plus the
/// scale. Members are pairwise `> rho` apart and cover the host to `≤ rho`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Net {
    pub member_indices: Vec<usize>,
    pub rho: f64,
}

impl Net {
    pub fn len(&self) -> usize {
        self.member_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_indices.is_empty()
    }
}

/// Greedy net construction over `host` (indices into `p`), ascending index
/// order: a point joins iff its distance to every member admitted so far
/// exceeds `rho`.
pub fn build_net(p: &WeightedPointSet, host: &[usize], rho: f64) -> Result<Net> {
    if host.is_empty() {
        return Err(Error::EmptyInput("net host set"));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::invalid(format!("net scale rho must be a positive real, got {rho}")));
    }
    let mut order: Vec<usize> = host.to_vec();
    order.sort_unstable();
    order.dedup();
    if let Some(&bad) = order.iter().find(|&&i| i >= p.len()) {
        return Err(Error::invalid(format!("host index {bad} out of range (n = {})", p.len())));
    }
    let mut members: Vec<usize> = Vec::new();
    for &i in &order {
        let pt = p.point(i);
        if members.iter().all(|&m| dist(pt, p.point(m)) > rho) {
            members.push(i);
        }
    }
    Ok(Net { member_indices: members, rho })
}

/// Check both net predicates over an explicit host: strict `> rho` packing
/// between members, `≤ rho` covering of every host point.
pub fn net_is_valid(p: &WeightedPointSet, host: &[usize], net: &Net) -> bool {
    let packing = net.member_indices.iter().enumerate().all(|(a, &i)| {
        net.member_indices[a + 1..]
            .iter()
            .all(|&j| dist(p.point(i), p.point(j)) > net.rho)
    });
    let covering = host.iter().all(|&h| {
        net.member_indices
            .iter()
            .any(|&m| dist(p.point(h), p.point(m)) <= net.rho)
    });
    packing && covering
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PackingReport {
    pub size: usize,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Packing-bound check: a net at scale `rho` over a host of diameter `D`
/// inside a space of doubling dimension `ddim` should have at most
/// `(D/rho)^{c·ddim}` members. The bound is clamped below at 1 so a
/// singleton host (diameter 0) passes trivially.
pub fn check_packing_bound(net: &Net, p: &WeightedPointSet, ddim: f64, c: f64) -> PackingReport {
    let diam = p.diameter();
    let bound = (diam / net.rho).powf(c * ddim).max(1.0);
    let size = net.len();
    PackingReport { size, bound, ratio: size as f64 / bound, pass: size as f64 <= bound }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    /// Exact minimum cover (not produced by this module; kept for readers of
    /// serialized estimates from other tools).
    ExactSearch,
    /// Greedy set cover, an upper bound on the true value up to the usual
    /// logarithmic greedy factor. Cover-ball centers are restricted to the
    /// point set itself.
    GreedyCover,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DdimEstimate {
    pub value: f64,
    pub method: CoverMethod,
    /// `(center index, radius)` attaining the maximum.
    pub witness: (usize, f64),
}

/// Fixed-size bitset over point indices.
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self) {
        self.0.fill(0);
    }

    fn intersect_count(&self, other: &Bits) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn subtract(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn any(&self) -> bool {
        self.0.iter().any(|&w| w != 0)
    }
}

/// Doubling-dimension estimate by greedy half-radius covers.
///
/// For every center `p` and every radius `r` at which the ball `B(p,r)`
/// gains a point (distances from `p`, which realize the maximum over the
/// full pairwise-distance set: within an interval where the ball is
/// constant, a larger radius only makes the half-radius cover easier), cover
/// `B(p,r) ∩ P` greedily by radius-`r/2` balls centered at points of `P`;
/// the estimate is the largest `log2(cover size)` seen.
pub fn estimate_ddim(p: &WeightedPointSet) -> DdimEstimate {
    let n = p.len();
    if n == 1 {
        return DdimEstimate { value: 0.0, method: CoverMethod::GreedyCover, witness: (0, 0.0) };
    }
    let d: Vec<f64> = {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = dist(p.point(i), p.point(j));
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        m
    };

    // (cover size, center, radius) per center, then a deterministic best.
    let per_center: Vec<(u32, usize, f64)> = (0..n)
        .into_par_iter()
        .map(|center| {
            let row = &d[center * n..(center + 1) * n];
            // points by distance from the center: members at radius r form a
            // prefix, and so do the useful cover-ball candidates (anything
            // further than 1.5 r cannot touch the ball with a half-r ball)
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by(|&a, &b| row[a].total_cmp(&row[b]));
            let mut masks: Vec<Bits> = (0..n).map(|_| Bits::zeros(n)).collect();
            let mut uncovered = Bits::zeros(n);
            let mut best: (u32, usize, f64) = (1, center, 0.0);
            let mut member_end = 1; // order[0] is the center itself
            let mut cand_end = 0;
            while member_end < n {
                let r = row[order[member_end]];
                // absorb ties so each distinct radius is visited once
                while member_end < n && row[order[member_end]] <= r {
                    member_end += 1;
                }
                while cand_end < n && row[order[cand_end]] <= 1.5 * r {
                    cand_end += 1;
                }
                // a cover never exceeds the ball size; skip hopeless radii
                if (member_end as u32) <= best.0 {
                    continue;
                }
                let members = &order[..member_end];
                let half = r / 2.0;
                for &c in &order[..cand_end] {
                    let crow = &d[c * n..(c + 1) * n];
                    let mask = &mut masks[c];
                    mask.clear();
                    for &j in members {
                        if crow[j] <= half {
                            mask.set(j);
                        }
                    }
                }
                uncovered.clear();
                for &j in members {
                    uncovered.set(j);
                }
                let mut picks = 0u32;
                while uncovered.any() {
                    let mut best_gain = 0u32;
                    let mut best_cand = usize::MAX;
                    for &c in &order[..cand_end] {
                        let gain = uncovered.intersect_count(&masks[c]);
                        if gain > best_gain || (gain == best_gain && gain > 0 && c < best_cand) {
                            best_gain = gain;
                            best_cand = c;
                        }
                    }
                    if best_cand == usize::MAX {
                        // every ball point is within r/2 of itself, so this
                        // cannot happen; defend against NaN poisoning anyway
                        break;
                    }
                    uncovered.subtract(&masks[best_cand]);
                    picks += 1;
                }
                if picks > best.0 {
                    best = (picks, center, r);
                }
            }
            best
        })
        .collect();

    let mut best = (1u32, 0usize, 0.0f64);
    for cand in per_center {
        if cand.0 > best.0 {
            best = cand;
        }
    }
    DdimEstimate {
        value: (best.0 as f64).log2(),
        method: CoverMethod::GreedyCover,
        witness: (best.1, best.2),
    }
}

/// How hierarchy hosts are chosen per level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HostRule {
    /// Hosts are all points of `P ∪ Q` inside the *enlarged* balls
    /// `B(c_i, r_{ℓ−⌈log2 1/ε⌉})`, one shared net per level.
    EnlargedUnion,
    /// Hosts are each cluster's own points inside `B(c_j, r_ℓ)`, one net
    /// per cluster per level.
    ClusterRestricted,
}

/// Nets at scales `ε³·r_ℓ`, `r_ℓ = r0/2^ℓ`, for `ℓ` in a level interval,
/// hosted around a fixed center set. Levels whose hosts are empty are
/// simply absent (`nets` is sparse).
#[derive(Debug, Clone)]
pub struct NetHierarchy {
    pub centers: Vec<Point>,
    pub r0: f64,
    pub ell_min: i64,
    pub ell_max: i64,
    pub eps: f64,
    pub rule: HostRule,
    /// The point set all net member indices refer to.
    pub union: WeightedPointSet,
    /// Level -> nets (always one entry under [`HostRule::EnlargedUnion`];
    /// one per nonempty cluster under [`HostRule::ClusterRestricted`]).
    pub nets: BTreeMap<i64, Vec<Net>>,
}

impl NetHierarchy {
    /// `r_ℓ = r0 / 2^ℓ` (levels may be negative: radii above `r0`).
    pub fn radius(&self, ell: i64) -> f64 {
        scale_radius(self.r0, ell)
    }

    /// Net fineness at a level: `ε³·r_ℓ`.
    pub fn net_scale(&self, ell: i64) -> f64 {
        self.eps.powi(3) * self.radius(ell)
    }

    pub fn nets_at(&self, ell: i64) -> Result<&[Net]> {
        self.nets
            .get(&ell)
            .map(Vec::as_slice)
            .ok_or(Error::MissingLevel { level: ell, lo: self.ell_min, hi: self.ell_max })
    }

    /// JSON dump (levels, radii, net scales, member indices) for debugging
    /// and cross-language comparison.
    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<serde_json::Value> = self
            .nets
            .iter()
            .map(|(&ell, nets)| {
                serde_json::json!({
                    "level": ell,
                    "radius": self.radius(ell),
                    "net_scale": self.net_scale(ell),
                    "nets": nets.iter().map(|n| &n.member_indices).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "r0": self.r0,
            "eps": self.eps,
            "level_range": [self.ell_min, self.ell_max],
            "rule": serde_json::to_value(self.rule).expect("enum serializes"),
            "centers": self.centers.iter().map(|c| c.coords().to_vec()).collect::<Vec<_>>(),
            "levels": levels,
        })
    }
}

fn scale_radius(r0: f64, ell: i64) -> f64 {
    r0 * (-(ell as f64)).exp2()
}

fn validate_hierarchy_args(centers: &[Point], r0: f64, ell_min: i64, ell_max: i64, eps: f64) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::EmptyInput("hierarchy centers"));
    }
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::invalid(format!("top radius r0 must be a positive real, got {r0}")));
    }
    if ell_min > ell_max {
        return Err(Error::invalid(format!("invalid level range [{ell_min}, {ell_max}]")));
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::invalid(format!("hierarchy eps must lie in (0, 1/2], got {eps}")));
    }
    Ok(())
}

/// Hierarchy over `P ∪ Q`: at level `ℓ`, hosts are the union points within
/// the *enlarged* balls `B(c_i, r_{ℓ−s})`, `s = ⌈log2(1/ε)⌉`, and the level
/// net is built at scale `ε³·r_ℓ`.
pub fn build_hierarchy(
    p: &WeightedPointSet,
    q: &WeightedPointSet,
    centers: &[Point],
    r0: f64,
    ell_min: i64,
    ell_max: i64,
    eps: f64,
) -> Result<NetHierarchy> {
    validate_hierarchy_args(centers, r0, ell_min, ell_max, eps)?;
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    if let Some(c) = centers.iter().find(|c| c.dim() != p.dim()) {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: c.dim() });
    }
    let mut points: Vec<Point> = p.points().to_vec();
    points.extend_from_slice(q.points());
    let mut weights: Vec<u64> = p.weights().to_vec();
    weights.extend_from_slice(q.weights());
    let union = WeightedPointSet::new(points, weights)?;

    let shift = (1.0 / eps).log2().ceil() as i64;
    let mut nets = BTreeMap::new();
    for ell in ell_min..=ell_max {
        let host_radius = scale_radius(r0, ell - shift);
        let host: Vec<usize> = (0..union.len())
            .filter(|&i| centers.iter().any(|c| dist(union.point(i), c) <= host_radius))
            .collect();
        if host.is_empty() {
            continue;
        }
        let net = build_net(&union, &host, eps.powi(3) * scale_radius(r0, ell))?;
        nets.insert(ell, vec![net]);
    }
    Ok(NetHierarchy {
        centers: centers.to_vec(),
        r0,
        ell_min,
        ell_max,
        eps,
        rule: HostRule::EnlargedUnion,
        union,
        nets,
    })
}

/// Cluster-restricted hierarchy: `partition[i]` assigns stored point `i` of
/// `p` to a center; at level `ℓ`, cluster `j` hosts its own points within
/// `B(c_j, r_ℓ)` (no enlargement) and gets its own net at scale `ε³·r_ℓ`.
pub fn build_hierarchy_clustered(
    p: &WeightedPointSet,
    partition: &[usize],
    centers: &[Point],
    r0: f64,
    ell_min: i64,
    ell_max: i64,
    eps: f64,
) -> Result<NetHierarchy> {
    validate_hierarchy_args(centers, r0, ell_min, ell_max, eps)?;
    if partition.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: partition.len() });
    }
    if let Some(&bad) = partition.iter().find(|&&j| j >= centers.len()) {
        return Err(Error::invalid(format!("partition slot {bad} out of range (k = {})", centers.len())));
    }
    if let Some(c) = centers.iter().find(|c| c.dim() != p.dim()) {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: c.dim() });
    }
    let union = p.clone();
    let mut nets = BTreeMap::new();
    for ell in ell_min..=ell_max {
        let r_ell = scale_radius(r0, ell);
        let mut level_nets = Vec::new();
        for (j, c) in centers.iter().enumerate() {
            let host: Vec<usize> = (0..union.len())
                .filter(|&i| partition[i] == j && dist(union.point(i), c) <= r_ell)
                .collect();
            if host.is_empty() {
                continue;
            }
            level_nets.push(build_net(&union, &host, eps.powi(3) * r_ell)?);
        }
        if !level_nets.is_empty() {
            nets.insert(ell, level_nets);
        }
    }
    Ok(NetHierarchy {
        centers: centers.to_vec(),
        r0,
        ell_min,
        ell_max,
        eps,
        rule: HostRule::ClusterRestricted,
        union,
        nets,
    })
}

/// Nearest net member to `p` (indices into `points`), lowest index on ties.
pub fn snap(p: &Point, net: &Net, points: &WeightedPointSet) -> Result<(usize, f64)> {
    if net.is_empty() {
        return Err(Error::EmptyInput("net has no members"));
    }
    let mut best_idx = net.member_indices[0];
    let mut best = f64::INFINITY;
    for &m in &net.member_indices {
        let v = dist(p, points.point(m));
        if v < best {
            best = v;
            best_idx = m;
        }
    }
    Ok((best_idx, best))
}

/// Level bracketing of a point against a center set: `owner` is the nearest
/// center (lowest index on ties), `j_p` satisfies
/// `r0/2^{j_p+1} ≤ dist ≤ r0/2^{j_p}` (negative when the point lies beyond
/// `r0`), and `r_p = r0/2^{j_p}`. A point coinciding with its center gets
/// the inert cap level [`LEVEL_CAP`].
pub fn level_of(p: &Point, centers: &[Point], r0: f64) -> (i64, f64, usize) {
    assert!(!centers.is_empty(), "level_of needs at least one center");
    assert!(r0 > 0.0 && r0.is_finite(), "level_of needs a positive top radius");
    let mut owner = 0;
    let mut d = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let v = dist(p, c);
        if v < d {
            d = v;
            owner = i;
        }
    }
    if d == 0.0 {
        return (LEVEL_CAP, scale_radius(r0, LEVEL_CAP), owner);
    }
    let mut j = (r0 / d).log2().floor() as i64;
    // guard the floor against floating-point edges so the bracket holds exactly
    while d > scale_radius(r0, j) {
        j -= 1;
    }
    while d < scale_radius(r0, j + 1) {
        j += 1;
    }
    (j, scale_radius(r0, j), owner)
}
