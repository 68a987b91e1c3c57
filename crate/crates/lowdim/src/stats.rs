//! Distributional checks: chi-square lower tails, projected-norm distortion
//! summaries, and expected excess distortion of a single pair.
//!
//! Everything Monte Carlo reports a standard error and is deterministic
//! given its seed — trials are partitioned into fixed-size chunks, each
//! chunk runs its own seeded stream, and partial results merge associatively
//! (integer counts or index-ordered sums), so thread count never changes a
//! result.

use rayon::prelude::*;

use crate::geometry::{dist, powered_dist, Point, PowerExponent, WeightedPointSet};
use crate::projection::GaussianMap;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Trials per independently seeded chunk of a Monte Carlo run.
const CHUNK: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    MonteCarlo,
    ClosedForm,
}

/// A tail probability with its uncertainty.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TailEstimate {
    pub probability: f64,
    pub stderr: f64,
    pub method: TailMethod,
}

/// Monte Carlo estimate of `Pr(X_t < t/(1+eps))` for a chi-square variable
/// `X_t` with `t` degrees of freedom: the chance that a squared projected
/// unit norm falls below `1/(1+eps)` — the contraction event behind the
/// lower bounds.
pub fn chi_square_lower_tail(t: u32, eps: f64, trials: u64, seed: u64) -> Result<TailEstimate> {
    if t <= 2 {
        return Err(Error::invalid(format!("chi-square tail needs t > 2, got {t}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("chi-square tail needs eps in (0, 1/2), got {eps}")));
    }
    if trials < 100 {
        return Err(Error::invalid(format!("chi-square tail needs at least 100 trials, got {trials}")));
    }
    let threshold = t as f64 / (1.0 + eps);
    let chunks = trials.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = SplitMix64::new(seed.wrapping_add(chunk));
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            let mut count = 0u64;
            for _ in lo..hi {
                let mut sum = 0.0;
                for _ in 0..t {
                    let g = rng.next_normal();
                    sum += g * g;
                }
                if sum < threshold {
                    count += 1;
                }
            }
            count
        })
        .sum();
    let p = hits as f64 / trials as f64;
    Ok(TailEstimate {
        probability: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        method: TailMethod::MonteCarlo,
    })
}

/// Closed-form chi-square CDF for even degrees of freedom:
/// `Pr(X_t ≤ x) = 1 − e^{−x/2}·Σ_{j<t/2} (x/2)^j / j!`.
pub fn chi_square_cdf_even(t: u32, x: f64) -> Result<f64> {
    if t < 2 || !t.is_multiple_of(2) {
        return Err(Error::invalid(format!("closed-form chi-square CDF needs even t >= 2, got {t}")));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid(format!("chi-square CDF needs x >= 0, got {x}")));
    }
    let half = x / 2.0;
    let mut term = 1.0; // (x/2)^j / j! at j = 0
    let mut sum = 1.0;
    for j in 1..(t / 2) {
        term *= half / j as f64;
        sum += term;
    }
    Ok(1.0 - (-half).exp() * sum)
}

/// Distribution of `‖Gp − Gq‖ / ‖p − q‖` over distinct stored pairs.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DistortionStats {
    pub pairs: u64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `bin_edges.len() == counts.len() + 1`; equal-width bins over
    /// `[min, max]`.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

const HISTOGRAM_BINS: usize = 16;

/// Ratio statistics over all distinct pairs of `p` under the map. Weights
/// play no role — this is a pure distance diagnostic.
pub fn norm_distortion_stats(p: &WeightedPointSet, map: &GaussianMap) -> Result<DistortionStats> {
    let n = p.len();
    if n < 2 {
        return Err(Error::EmptyInput("distortion stats need at least two distinct points"));
    }
    let images: Vec<Point> = p.points().iter().map(|pt| map.apply(pt)).collect::<Result<_>>()?;
    let mut ratios = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let source = dist(p.point(i), p.point(j));
            // distinct stored points are never at distance 0
            ratios.push(dist(&images[i], &images[j]) / source);
        }
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &r in &ratios {
        min = min.min(r);
        max = max.max(r);
        sum += r;
    }
    let mean = sum / ratios.len() as f64;
    let width = (max - min).max(0.0);
    let bin_edges: Vec<f64> = (0..=HISTOGRAM_BINS)
        .map(|b| min + width * b as f64 / HISTOGRAM_BINS as f64)
        .collect();
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    for &r in &ratios {
        let idx = if width == 0.0 {
            0
        } else {
            (((r - min) / width * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
        };
        counts[idx] += 1;
    }
    Ok(DistortionStats { pairs: ratios.len() as u64, min, max, mean, bin_edges, counts })
}

/// Monte Carlo estimate of `E[max{0, ‖Gp−Gq‖^z/‖p−q‖^z − (1+eps)^z}]` over
/// fresh maps seeded `seed`, `seed+1`, …: the expected one-sided overshoot
/// beyond the tolerated expansion. Scale-free in `(p, q)`.
pub fn expected_excess_distortion(
    p: &Point,
    q: &Point,
    z: PowerExponent,
    t: usize,
    eps: f64,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    if p == q {
        return Err(Error::invalid("excess distortion needs two distinct points"));
    }
    if trials < 1 {
        return Err(Error::invalid("excess distortion needs at least one trial"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("excess distortion needs eps > 0, got {eps}")));
    }
    let base = powered_dist(p, q, z);
    let allowed = (1.0 + eps).powf(z.get());
    // index-ordered samples, summed sequentially: deterministic across
    // thread counts
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let map = GaussianMap::sample(p.dim(), t, seed.wrapping_add(i)).expect("validated dims");
            let gp = map.apply(p).expect("dim checked");
            let gq = map.apply(q).expect("dim checked");
            let ratio = powered_dist(&gp, &gq, z) / base;
            (ratio - allowed).max(0.0)
        })
        .collect();
    Ok(samples.iter().sum::<f64>() / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_input_validation() {
        assert!(chi_square_lower_tail(2, 0.25, 1000, 0).is_err());
        assert!(chi_square_lower_tail(8, 0.0, 1000, 0).is_err());
        assert!(chi_square_lower_tail(8, 0.5, 1000, 0).is_err());
        assert!(chi_square_lower_tail(8, 0.25, 99, 0).is_err());
    }

    #[test]
    fn tail_is_deterministic_and_near_half_for_tiny_eps() {
        let a = chi_square_lower_tail(64, 0.001, 200_000, 7).unwrap();
        let b = chi_square_lower_tail(64, 0.001, 200_000, 7).unwrap();
        assert_eq!(a, b);
        // threshold ~ t: the median of a chi-square sits just below t
        assert!((a.probability - 0.5).abs() < 0.03, "got {}", a.probability);
        assert_eq!(a.method, TailMethod::MonteCarlo);
    }

    #[test]
    fn tail_matches_closed_form() {
        let t = 8u32;
        let eps = 0.25;
        let est = chi_square_lower_tail(t, eps, 400_000, 11).unwrap();
        let exact = chi_square_cdf_even(t, t as f64 / (1.0 + eps)).unwrap();
        assert!(
            (est.probability - exact).abs() <= 3.0 * est.stderr,
            "MC {} vs closed form {exact} (stderr {})",
            est.probability,
            est.stderr
        );
    }

    #[test]
    fn tail_monotone_in_t_and_eps() {
        let trials = 150_000;
        let mut prev = f64::INFINITY;
        for t in [4u32, 8, 16, 32] {
            let est = chi_square_lower_tail(t, 0.3, trials, 5).unwrap();
            assert!(est.probability <= prev + 2.0 * est.stderr, "t = {t}");
            prev = est.probability;
        }
        let mut prev = f64::INFINITY;
        for eps in [0.05, 0.15, 0.3, 0.45] {
            let est = chi_square_lower_tail(12, eps, trials, 5).unwrap();
            assert!(est.probability <= prev + 2.0 * est.stderr, "eps = {eps}");
            prev = est.probability;
        }
    }

    #[test]
    fn cdf_even_formula_points() {
        assert_eq!(chi_square_cdf_even(4, 0.0).unwrap(), 0.0);
        let v = chi_square_cdf_even(2, 2.0 * 2f64.ln()).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(chi_square_cdf_even(5, 1.0).is_err());
        assert!(chi_square_cdf_even(0, 1.0).is_err());
        assert!(chi_square_cdf_even(4, -1.0).is_err());
    }

    #[test]
    fn cdf_even_is_monotone_and_saturates() {
        let mut prev = 0.0;
        for i in 0..40 {
            let x = i as f64;
            let v = chi_square_cdf_even(8, x).unwrap();
            assert!(v >= prev - 1e-15, "x = {x}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
        assert!(chi_square_cdf_even(8, 200.0).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn cdf_matches_direct_monte_carlo() {
        // direct MC at an arbitrary abscissa, not just the tail's threshold
        let (t, x) = (8u32, 6.0);
        let trials = 200_000u64;
        let mut rng = SplitMix64::new(23);
        let mut hits = 0u64;
        for _ in 0..trials {
            let mut sum = 0.0;
            for _ in 0..t {
                let g = rng.next_normal();
                sum += g * g;
            }
            if sum <= x {
                hits += 1;
            }
        }
        let p = hits as f64 / trials as f64;
        let stderr = (p * (1.0 - p) / trials as f64).sqrt();
        let exact = chi_square_cdf_even(t, x).unwrap();
        assert!((p - exact).abs() <= 3.0 * stderr, "MC {p} vs exact {exact}");
    }

    #[test]
    fn tail_estimate_uncertainty_window_is_sane() {
        let est = chi_square_lower_tail(6, 0.4, 10_000, 3).unwrap();
        assert!(est.probability - 3.0 * est.stderr >= -0.01);
        assert!(est.probability + 3.0 * est.stderr <= 1.01);
    }

    fn cloud(n: usize, d: usize, seed: u64) -> WeightedPointSet {
        let mut rng = SplitMix64::new(seed);
        WeightedPointSet::unweighted(
            (0..n)
                .map(|_| Point::new((0..d).map(|_| rng.next_in_range(-1.0, 1.0)).collect()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn distortion_of_identity_is_exactly_one() {
        let p = cloud(10, 6, 1);
        let stats = norm_distortion_stats(&p, &GaussianMap::identity(6)).unwrap();
        assert_eq!(stats.pairs, 45);
        assert_eq!((stats.min, stats.max, stats.mean), (1.0, 1.0, 1.0));
        assert_eq!(stats.counts.iter().sum::<u64>(), 45);
    }

    #[test]
    fn distortion_mean_concentrates_at_large_t() {
        let p = cloud(12, 8, 2);
        let map = GaussianMap::sample(8, 256, 9).unwrap();
        let stats = norm_distortion_stats(&p, &map).unwrap();
        assert!((stats.mean - 1.0).abs() < 0.02, "mean {}", stats.mean);
        assert!(stats.min <= stats.mean && stats.mean <= stats.max);
        assert_eq!(stats.bin_edges.len(), stats.counts.len() + 1);
        assert!(norm_distortion_stats(&cloud(1, 4, 3), &map).is_err());
    }

    #[test]
    fn max_distortion_obeys_union_bound_envelope() {
        // Pr(max ratio > 1+eps) <= m^2 * exp(-eps^2 t / 8), checked
        // empirically over seeds; the tight cell is (eps=0.9, t=256) where
        // the bound is ~3e-10 and no excursion may appear at all
        let p = cloud(8, 10, 4);
        let m = p.len() as f64;
        for (eps, t, seeds) in [(0.3, 32, 60u64), (0.9, 256, 60)] {
            let bound = (m * m * (-eps * eps * t as f64 / 8.0).exp()).min(1.0);
            let mut exceed = 0u64;
            for seed in 0..seeds {
                let map = GaussianMap::sample(10, t, 1000 + seed).unwrap();
                let stats = norm_distortion_stats(&p, &map).unwrap();
                if stats.max > 1.0 + eps {
                    exceed += 1;
                }
            }
            let rate = exceed as f64 / seeds as f64;
            let stderr = (rate * (1.0 - rate) / seeds as f64).sqrt().max(1.0 / seeds as f64);
            assert!(
                rate <= bound + 3.0 * stderr,
                "eps {eps} t {t}: rate {rate} vs bound {bound}"
            );
        }
    }

    #[test]
    fn excess_distortion_behaviour() {
        let p = Point::new(vec![0.0, 0.0, 0.0]).unwrap();
        let q = Point::new(vec![1.0, 2.0, -1.0]).unwrap();
        let z = PowerExponent::new(1.0).unwrap();
        // generous eps leaves no overshoot mass worth seeing
        let huge = expected_excess_distortion(&p, &q, z, 8, 3.0, 2_000, 5).unwrap();
        assert!(huge <= 1e-6, "got {huge}");
        // decays as t grows
        let mut prev = f64::INFINITY;
        for t in [8usize, 16, 32, 64] {
            let v = expected_excess_distortion(&p, &q, z, t, 0.25, 20_000, 5).unwrap();
            assert!(v <= prev * 1.05 + 1e-4, "t = {t}: {v} after {prev}");
            prev = v;
        }
        // exact scale invariance with the same seed
        let p2 = p.scale(2.0);
        let q2 = q.scale(2.0);
        let a = expected_excess_distortion(&p, &q, z, 16, 0.25, 500, 9).unwrap();
        let b = expected_excess_distortion(&p2, &q2, z, 16, 0.25, 500, 9).unwrap();
        assert_eq!(a, b);
        // degenerate inputs
        assert!(expected_excess_distortion(&p, &p, z, 8, 0.25, 100, 0).is_err());
        assert!(expected_excess_distortion(&p, &q, z, 8, 0.25, 0, 0).is_err());
    }
}
