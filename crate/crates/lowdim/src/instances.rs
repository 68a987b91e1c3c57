//! Instance generators: the hard constructions behind each lower bound plus
//! benign doubling fixtures for the upper-bound checks.
//!
//! Every generator returns a ready [`ClusteringInstance`] with the family's
//! canonical `k` and `z`; callers needing a different objective rebuild with
//! [`ClusteringInstance::new`]. Heavy multiplicities (the decay families'
//! origin) are stored as one weighted point, which is what makes the
//! `n = 2^24`-scale phase experiments feasible on a desk machine.

use crate::clustering::ClusteringInstance;
use crate::geometry::{Point, PowerExponent, WeightedPointSet};
use crate::projection::GaussianMap;
use crate::rng::SplitMix64;
use crate::{Error, Result};

fn z_of(v: f64) -> PowerExponent {
    PowerExponent::new(v).expect("fixed exponent")
}

/// `⌊½·log2 n⌋` (exact in integer arithmetic).
fn half_log2(n: u64) -> usize {
    (n.ilog2() / 2) as usize
}

/// The `n` standard basis vectors of `R^n`, unit weights; `k = 2`, `z = 1`,
/// candidates are the points themselves. Pairwise distances are all `√2`,
/// so the doubling dimension is `log2 n` — the classic JL-hard set.
pub fn gen_basis(n: usize) -> Result<ClusteringInstance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("basis family needs even n >= 4, got {n}")));
    }
    let pts: Vec<Point> = (0..n).map(|i| Point::basis(i, n)).collect();
    let p = WeightedPointSet::unweighted(pts)?;
    ClusteringInstance::discrete(p, 2, z_of(1.0))
}

/// Geometrically decaying directions: points `2^{-i}·e_i` for
/// `i = 0..⌊½log2 n⌋` plus the origin carrying the remaining weight
/// `n − ⌊½log2 n⌋ − 1` (so the total multiplicity is exactly `n`);
/// `k = 1`, `z = 1`. Ambient dimension covers only the used coordinates.
pub fn gen_decay(n: u64) -> Result<ClusteringInstance> {
    if n < 16 {
        return Err(Error::invalid(format!("decay family needs n >= 16, got {n}")));
    }
    let m = half_log2(n);
    let d = m + 1;
    let mut pts: Vec<Point> = (0..=m).map(|i| Point::basis(i, d).scale(0.5f64.powi(i as i32))).collect();
    let mut ws = vec![1u64; m + 1];
    pts.push(Point::origin(d));
    ws.push(n - m as u64 - 1);
    let p = WeightedPointSet::new(pts, ws)?;
    ClusteringInstance::discrete(p, 1, z_of(1.0))
}

/// Slowly decaying directions: points `(1−eps)^i·e_i` for
/// `i = 0..⌊½log2 n⌋` plus the weighted origin; `k = 2`, `z = 1`.
pub fn gen_eps_decay(n: u64, eps: f64) -> Result<ClusteringInstance> {
    if n < 16 {
        return Err(Error::invalid(format!("eps-decay family needs n >= 16, got {n}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("eps-decay family needs eps in (0, 1/2), got {eps}")));
    }
    let m = half_log2(n);
    let d = m + 1;
    let mut pts: Vec<Point> = (0..=m).map(|i| Point::basis(i, d).scale((1.0 - eps).powi(i as i32))).collect();
    let mut ws = vec![1u64; m + 1];
    pts.push(Point::origin(d));
    ws.push(n - m as u64 - 1);
    let p = WeightedPointSet::new(pts, ws)?;
    ClusteringInstance::discrete(p, 2, z_of(1.0))
}

/// Candidate-set hard instance: the data is the origin with multiplicity
/// `n`; the candidates are `2^i·e_i` for `i = 1..s` (so
/// `cost(P, 2^i·e_i) = n·2^i`); `k = 1`, `z = 1`. Points are stored densely
/// in `R^s` — memory grows as `s²` floats, so very large `s` experiments
/// should use [`candidate_column_norms`] instead of materializing the set.
pub fn gen_candidate(n: u64, s: usize) -> Result<ClusteringInstance> {
    if n < 1 || s < 1 {
        return Err(Error::invalid("candidate family needs n >= 1 and s >= 1"));
    }
    let p = WeightedPointSet::new(vec![Point::origin(s)], vec![n])?;
    let q_pts: Vec<Point> = (1..=s).map(|i| Point::basis(i - 1, s).scale(2f64.powi(i as i32))).collect();
    let q = WeightedPointSet::unweighted(q_pts)?;
    ClusteringInstance::new(p, q, 1, z_of(1.0))
}

/// `‖G e_i‖` for all `s` columns of the Gaussian map a given seed would
/// produce at shape `t x s`, without materializing any `s`-dimensional
/// point. Bit-identical to projecting the basis directions of
/// [`gen_candidate`] densely: the map's normal stream is consumed in the
/// same row-major order and only per-column sums of squares are kept.
pub fn candidate_column_norms(s: usize, t: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    let mut sums = vec![0.0f64; s];
    let scale = 1.0 / (t as f64).sqrt();
    for _row in 0..t {
        for sum in sums.iter_mut() {
            let e = rng.next_normal() * scale;
            *sum += e * e;
        }
    }
    for sum in sums.iter_mut() {
        *sum = sum.sqrt();
    }
    sums
}

/// All-zero data for the kernel lower bound: the origin with multiplicity
/// `n` in `R^d`; `k = 1`, `z = 1`. Pair with [`kernel_direction`], which
/// produces the continuous center the bound evaluates.
pub fn gen_kernel_demo(n: u64, d: usize) -> Result<ClusteringInstance> {
    if d < 2 {
        return Err(Error::invalid(format!("kernel family needs d >= 2, got {d}")));
    }
    if n < 1 {
        return Err(Error::invalid("kernel family needs n >= 1"));
    }
    let p = WeightedPointSet::new(vec![Point::origin(d)], vec![n])?;
    ClusteringInstance::discrete(p, 1, z_of(1.0))
}

/// A unit vector in the kernel of the map: orthogonalize the rows
/// (Gram–Schmidt), take the basis direction with the largest residual
/// against the row space, and normalize. Requires `t < d`, else the kernel
/// may be trivial.
pub fn kernel_direction(map: &GaussianMap) -> Result<Point> {
    let (t, d) = (map.t(), map.d());
    if t >= d {
        return Err(Error::invalid(format!(
            "kernel direction needs t < d (got t = {t}, d = {d}); the kernel may be trivial"
        )));
    }
    // orthonormal basis of the row space
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(t);
    for j in 0..t {
        let mut v: Vec<f64> = map.row(j).to_vec();
        for u in &basis {
            let proj: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for x in &mut v {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    // the basis direction farthest from the row space survives best
    let mut best: Option<(f64, Vec<f64>)> = None;
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        for u in &basis {
            let proj = u[i]; // <e_i, u>
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(bn, _)| norm > *bn) {
            best = Some((norm, v));
        }
    }
    let (norm, v) = best.expect("d >= 2 basis directions scanned");
    if norm <= 1e-9 {
        return Err(Error::invalid("no basis direction has a usable residual against the row space"));
    }
    // renormalize until the computed norm is exactly 1.0, so costs against
    // this unit vector come out exact (n·1.0) rather than off by an ulp
    let mut c = Point::new(v)?;
    for _ in 0..8 {
        let len = c.norm();
        if len == 1.0 {
            break;
        }
        c = c.scale(1.0 / len);
    }
    Ok(c)
}

/// Pairs instance: `(k+1)/2` pairs `(10i·e_1, 10i·e_1 + e_i)` for odd `k`
/// (each pair one unit apart in its own direction); an even `k` keeps
/// `k−1` pairs worth of points plus one far-away point that consumes its
/// own center. Either way the instance has `k+1` points, `k` centers,
/// `z = 1`, and optimum exactly 1: one pair must be served by a single
/// center.
pub fn gen_pairs(k: usize) -> Result<ClusteringInstance> {
    if k < 1 {
        return Err(Error::invalid(format!("pairs family needs k >= 1, got {k}")));
    }
    let odd_k = if k.is_multiple_of(2) { k - 1 } else { k };
    let pairs = odd_k.div_ceil(2);
    let d = pairs.max(1);
    let mut pts: Vec<Point> = Vec::with_capacity(k + 1);
    for i in 1..=pairs {
        let anchor = Point::basis(0, d).scale(10.0 * i as f64);
        let mate = anchor.add(&Point::basis(i - 1, d));
        pts.push(anchor);
        pts.push(mate);
    }
    if k.is_multiple_of(2) {
        pts.push(Point::basis(0, d).scale(-10_000.0));
    }
    let p = WeightedPointSet::unweighted(pts)?;
    ClusteringInstance::discrete(p, k, z_of(1.0))
}

/// Benign fixture: `n` lightly jittered points on a `ddim_target`-dimensional
/// lattice patch of extent `spread`, embedded in `R^{4·ddim_target}`; the
/// jitter is at most a tenth of the lattice spacing per coordinate.
/// Deterministic given `seed`; `k = 2`, `z = 1`, candidates are the points.
///
/// The greedy-cover estimate of such a patch runs about a unit above the
/// nominal dimension (a Euclidean `m`-patch needs more than `2^m` greedy
/// half-radius balls — ~10 for `m = 2`, ~25 for `m = 3`), so expect
/// [`estimate_ddim`](crate::nets::estimate_ddim) values up to
/// `ddim_target + 2` on desk-scale draws.
pub fn gen_doubling(n: usize, ddim_target: usize, spread: f64, seed: u64) -> Result<ClusteringInstance> {
    if !(1..=6).contains(&ddim_target) {
        return Err(Error::invalid(format!("doubling family needs ddim_target in 1..=6, got {ddim_target}")));
    }
    if n < 1 {
        return Err(Error::invalid("doubling family needs n >= 1"));
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::invalid(format!("doubling family needs positive spread, got {spread}")));
    }
    let d = 4 * ddim_target;
    let side = (n as f64).powf(1.0 / ddim_target as f64).ceil() as usize;
    let spacing = spread / side as f64;
    let amp = spacing / 10.0;
    let mut rng = SplitMix64::new(seed);
    let mut pts = Vec::with_capacity(n);
    for idx in 0..n {
        let mut coords = vec![0.0; d];
        let mut rest = idx;
        for item in coords.iter_mut().take(ddim_target) {
            *item = (rest % side) as f64 * spacing;
            rest /= side;
        }
        for c in coords.iter_mut() {
            *c += rng.next_in_range(-amp, amp);
        }
        pts.push(Point::new(coords)?);
    }
    let p = WeightedPointSet::unweighted(pts)?;
    ClusteringInstance::discrete(p, 2, z_of(1.0))
}

/// Declarative instance request, the form configs and the command line use.
/// Each family accepts exactly its own parameters; anything else set is
/// rejected so typos surface instead of being ignored.
#[derive(Debug, Clone, Default, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ddim: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Override the family's default number of centers (doubling only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub override_k: Option<u64>,
    /// Override the family's default power exponent (doubling only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

impl InstanceSpec {
    pub fn new(family: &str) -> InstanceSpec {
        InstanceSpec { family: family.to_string(), ..InstanceSpec::default() }
    }

    fn require<T: Copy>(&self, v: Option<T>, name: &'static str) -> Result<T> {
        v.ok_or(Error::MissingField(name))
    }

    fn reject_unused(&self, allowed: &[&str]) -> Result<()> {
        let set: &[(&str, bool)] = &[
            ("n", self.n.is_some()),
            ("s", self.s.is_some()),
            ("k", self.k.is_some()),
            ("d", self.d.is_some()),
            ("eps", self.eps.is_some()),
            ("ddim", self.ddim.is_some()),
            ("spread", self.spread.is_some()),
            ("seed", self.seed.is_some()),
            ("override_k", self.override_k.is_some()),
            ("z", self.z.is_some()),
        ];
        for (name, present) in set {
            if *present && !allowed.contains(name) {
                return Err(Error::Config(format!(
                    "parameter '{name}' does not apply to instance family '{}'",
                    self.family
                )));
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<ClusteringInstance> {
        match self.family.as_str() {
            "basis" => {
                self.reject_unused(&["n"])?;
                gen_basis(self.require(self.n, "n")? as usize)
            }
            "decay" => {
                self.reject_unused(&["n"])?;
                gen_decay(self.require(self.n, "n")?)
            }
            "eps-decay" => {
                self.reject_unused(&["n", "eps"])?;
                gen_eps_decay(self.require(self.n, "n")?, self.require(self.eps, "eps")?)
            }
            "candidate" => {
                self.reject_unused(&["n", "s"])?;
                gen_candidate(self.require(self.n, "n")?, self.require(self.s, "s")? as usize)
            }
            "pairs" => {
                self.reject_unused(&["k"])?;
                gen_pairs(self.require(self.k, "k")? as usize)
            }
            "kernel" => {
                self.reject_unused(&["n", "d"])?;
                gen_kernel_demo(self.require(self.n, "n")?, self.require(self.d, "d")? as usize)
            }
            "doubling" => {
                self.reject_unused(&["n", "ddim", "spread", "seed", "override_k", "z"])?;
                let inst = gen_doubling(
                    self.require(self.n, "n")? as usize,
                    self.require(self.ddim, "ddim")? as usize,
                    self.spread.unwrap_or(1.0),
                    self.seed.unwrap_or(0),
                )?;
                let k = self.override_k.map(|v| v as usize).unwrap_or(inst.k);
                let z = match self.z {
                    Some(v) => PowerExponent::new(v)?,
                    None => inst.z,
                };
                ClusteringInstance::new(inst.p, inst.q, k, z)
            }
            other => Err(Error::Config(format!("unknown instance family '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{cost, opt_exact};
    use crate::geometry::{dist, powered_dist};
    use crate::nets::estimate_ddim;

    #[test]
    fn basis_instance_shape() {
        let inst = gen_basis(4).unwrap();
        assert_eq!(inst.p.len(), 4);
        assert_eq!(inst.p.total_weight(), 4);
        assert_eq!((inst.k, inst.z.get()), (2, 1.0));
        for i in 0..4 {
            for j in i + 1..4 {
                assert!((dist(inst.p.point(i), inst.p.point(j)) - 2f64.sqrt()).abs() < 1e-15);
            }
        }
        assert!(gen_basis(3).is_err());
        assert!(gen_basis(5).is_err());
        assert!(gen_basis(2).is_err());
    }

    #[test]
    fn basis_opt_and_ddim() {
        let inst = gen_basis(8).unwrap();
        let opt = opt_exact(&inst, 1000).unwrap();
        assert!((opt.value - 6.0 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(estimate_ddim(&inst.p).value, 3.0);
    }

    #[test]
    fn decay_instance_counts_and_cost() {
        let inst = gen_decay(1 << 10).unwrap();
        // 6 decaying points plus the weighted origin
        assert_eq!(inst.p.len(), 7);
        assert_eq!(inst.p.total_weight(), 1 << 10);
        assert_eq!((inst.k, inst.z.get()), (1, 1.0));
        let origin_idx = 6;
        assert_eq!(inst.p.point(origin_idx).norm(), 0.0);
        assert_eq!(inst.p.weight(origin_idx), 1024 - 6);
        let v = cost(&inst, &[origin_idx]).unwrap();
        let expect: f64 = (0..=5).map(|i| 0.5f64.powi(i)).sum(); // 2 - 2^-5
        assert!((v - expect).abs() < 1e-15);
        assert!(gen_decay(15).is_err());
    }

    #[test]
    fn decay_matches_expanded_oracle() {
        let inst = gen_decay(1 << 10).unwrap();
        // expand multiplicities into a flat list and recompute the cost
        let mut expanded: Vec<&Point> = Vec::new();
        for (pt, w) in inst.p.iter() {
            for _ in 0..w {
                expanded.push(pt);
            }
        }
        assert_eq!(expanded.len(), 1 << 10);
        for center_idx in 0..inst.p.len() {
            let c = inst.p.point(center_idx);
            let oracle: f64 = expanded.iter().map(|p| dist(p, c)).sum();
            let fast = cost(&inst, &[center_idx]).unwrap();
            assert!((fast - oracle).abs() <= 1e-9 * (1.0 + oracle));
        }
    }

    #[test]
    fn decay_ddim_stays_small() {
        let inst = gen_decay(1 << 16).unwrap();
        assert!(estimate_ddim(&inst.p).value <= 3.0);
    }

    #[test]
    fn eps_decay_opt_formula() {
        let n = 1u64 << 20;
        let eps = 0.25;
        let inst = gen_eps_decay(n, eps).unwrap();
        assert_eq!(inst.p.total_weight(), n);
        assert_eq!(inst.k, 2);
        let m = 10; // half of log2(2^20)
        assert_eq!(inst.p.len(), m + 2);
        let opt = opt_exact(&inst, 10_000).unwrap();
        let geometric: f64 = (1..=m as i32).map(|i| (1.0 - eps).powi(i)).sum();
        assert!((opt.value - geometric).abs() < 1e-12, "{} vs {geometric}", opt.value);
        assert!(opt.value <= 1.0 / eps);
        // the adversarial block of the argument fits inside the instance
        let i_star = m as i32;
        let block = 50.0 / eps * (1.0 - eps).powi(-i_star);
        assert!(block <= n as f64 / 2.0, "block {block} exceeds n/2");
        assert!(gen_eps_decay(n, 0.5).is_err());
        assert!(gen_eps_decay(8, 0.25).is_err());
    }

    #[test]
    fn candidate_costs_and_ddim() {
        let n = 100;
        let inst = gen_candidate(n, 8).unwrap();
        assert_eq!(inst.p.total_weight(), n);
        assert_eq!(inst.q.len(), 8);
        for i in 1..=8usize {
            let v = cost(&inst, &[i - 1]).unwrap();
            assert_eq!(v, n as f64 * 2f64.powi(i as i32));
        }
        // single candidate: the optimum is forced
        let single = gen_candidate(5, 1).unwrap();
        let opt = opt_exact(&single, 10).unwrap();
        assert_eq!(opt.value, 10.0);
        assert_eq!(opt.solution.center_indices, vec![0]);
        // the union of data and candidates stays doubling
        let mut pts = inst.p.points().to_vec();
        pts.extend_from_slice(inst.q.points());
        let union = WeightedPointSet::unweighted(pts).unwrap();
        assert!(estimate_ddim(&union).value <= 3.0);
    }

    #[test]
    fn candidate_column_norms_match_dense_projection() {
        let s = 6;
        let inst = gen_candidate(10, s).unwrap();
        for seed in [0u64, 7, 99] {
            let map = GaussianMap::sample(s, 3, seed).unwrap();
            let norms = candidate_column_norms(s, 3, seed);
            for (i, &norm) in norms.iter().enumerate() {
                let dense = map.apply(inst.q.point(i)).unwrap().norm();
                let sparse = 2f64.powi((i + 1) as i32) * norm;
                assert_eq!(dense, sparse, "column {i} seed {seed}");
            }
        }
    }

    #[test]
    fn kernel_construction_annihilates_the_center() {
        for seed in 0..5 {
            let d = 8;
            let map = GaussianMap::sample(d, d - 1, seed).unwrap();
            let c = kernel_direction(&map).unwrap();
            assert_eq!(c.norm(), 1.0);
            let image = map.apply(&c).unwrap();
            let rows_norm: f64 = map.entries().iter().map(|e| e * e).sum::<f64>().sqrt();
            assert!(image.norm() <= 1e-10 * rows_norm, "seed {seed}: residual {}", image.norm());
            // source cost n, target cost ~0
            let inst = gen_kernel_demo(100, d).unwrap();
            let source: f64 = inst.p.iter().map(|(p, w)| w as f64 * dist(p, &c)).sum();
            assert_eq!(source, 100.0);
            let target = 100.0 * image.norm();
            assert!(target <= 1e-8);
        }
        let square = GaussianMap::sample(4, 4, 0).unwrap();
        assert!(kernel_direction(&square).is_err());
        assert!(gen_kernel_demo(10, 1).is_err());
    }

    #[test]
    fn pairs_structure_and_optimum() {
        for k in [1usize, 3, 5, 9] {
            let inst = gen_pairs(k).unwrap();
            assert_eq!(inst.p.len(), k + 1, "k = {k}");
            let opt = opt_exact(&inst, 100_000).unwrap();
            assert!((opt.value - 1.0).abs() < 1e-12, "k = {k}: {}", opt.value);
        }
        // even k: one far-away point absorbs a center, optimum unchanged
        let inst = gen_pairs(4).unwrap();
        assert_eq!(inst.p.len(), 5);
        let opt = opt_exact(&inst, 100).unwrap();
        assert!((opt.value - 1.0).abs() < 1e-12);
        assert!(estimate_ddim(&gen_pairs(9).unwrap().p).value <= 3.0);
    }

    #[test]
    fn doubling_fixture_is_deterministic_and_doubling() {
        let a = gen_doubling(128, 2, 1.0, 7).unwrap();
        let b = gen_doubling(128, 2, 1.0, 7).unwrap();
        assert_eq!(a.p.points(), b.p.points());
        assert_eq!(a.p.len(), 128);
        for target in 1usize..=3 {
            let inst = gen_doubling(128, target, 1.0, 11).unwrap();
            assert_eq!(inst.p.dim(), 4 * target);
            let est = estimate_ddim(&inst.p).value;
            assert!(est <= target as f64 + 2.0, "target {target}: estimate {est}");
            assert!(est >= target as f64, "target {target}: estimate {est} suspiciously low");
        }
        assert!(gen_doubling(10, 0, 1.0, 0).is_err());
        assert!(gen_doubling(10, 7, 1.0, 0).is_err());
        assert!(gen_doubling(10, 2, 0.0, 0).is_err());
    }

    #[test]
    fn doubling_jitter_stays_within_a_tenth_of_spacing() {
        let n = 64;
        let side = (n as f64).sqrt().ceil(); // ddim_target = 2
        let spacing = 1.0 / side;
        let inst = gen_doubling(n, 2, 1.0, 3).unwrap();
        for (pt, _) in inst.p.iter() {
            for (axis, &c) in pt.coords().iter().enumerate() {
                let nearest_site = if axis < 2 { (c / spacing).round() * spacing } else { 0.0 };
                assert!((c - nearest_site).abs() <= spacing / 10.0 + 1e-12);
            }
        }
    }

    #[test]
    fn spec_dispatch_and_validation() {
        let mut spec = InstanceSpec::new("doubling");
        spec.n = Some(32);
        spec.ddim = Some(2);
        spec.seed = Some(5);
        spec.override_k = Some(4);
        spec.z = Some(2.0);
        let inst = spec.generate().unwrap();
        assert_eq!((inst.k, inst.z.get()), (4, 2.0));

        let mut bad = InstanceSpec::new("basis");
        bad.n = Some(8);
        bad.seed = Some(1); // basis takes no seed
        assert!(matches!(bad.generate(), Err(Error::Config(_))));

        let missing = InstanceSpec::new("basis");
        assert!(matches!(missing.generate(), Err(Error::MissingField("n"))));

        let unknown = InstanceSpec::new("mystery");
        assert!(matches!(unknown.generate(), Err(Error::Config(_))));

        let toml_spec: InstanceSpec =
            toml::from_str("family = \"eps-decay\"\nn = 1024\neps = 0.25\n").unwrap();
        let inst = toml_spec.generate().unwrap();
        assert_eq!(inst.k, 2);
        assert_eq!(inst.p.total_weight(), 1024);
    }

    #[test]
    fn generators_preserve_total_multiplicity() {
        assert_eq!(gen_basis(16).unwrap().p.total_weight(), 16);
        assert_eq!(gen_decay(4096).unwrap().p.total_weight(), 4096);
        assert_eq!(gen_eps_decay(4096, 0.1).unwrap().p.total_weight(), 4096);
        assert_eq!(gen_candidate(77, 3).unwrap().p.total_weight(), 77);
        assert_eq!(gen_kernel_demo(42, 4).unwrap().p.total_weight(), 42);
        assert_eq!(gen_doubling(50, 1, 2.0, 1).unwrap().p.total_weight(), 50);
        assert_eq!(gen_pairs(7).unwrap().p.total_weight(), 8);
    }

    #[test]
    fn decay_points_power_costs_match_direct_formula() {
        let inst = gen_decay(64).unwrap(); // m = 3: points 1, 1/2, 1/4, 1/8 + origin
        let origin = inst.p.len() - 1;
        let z = PowerExponent::new(1.0).unwrap();
        for i in 0..origin {
            let v = powered_dist(inst.p.point(i), inst.p.point(origin), z);
            assert_eq!(v, 0.5f64.powi(i as i32));
        }
    }
}
