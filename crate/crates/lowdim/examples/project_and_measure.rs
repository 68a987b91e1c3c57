//! Sample a seeded Gaussian map, project a point set, and measure how much
//! pairwise distances move.
//!
//! Run with: `cargo run --example project_and_measure`

use lowdim::instances::gen_doubling;
use lowdim::projection::GaussianMap;
use lowdim::stats::norm_distortion_stats;

fn main() -> lowdim::Result<()> {
    let inst = gen_doubling(128, 2, 1.0, 7)?;
    let d = inst.p.dim();
    println!("source: {} points in {d} dimensions", inst.p.len());

    // the same seed always gives the same map, entry for entry
    let map = GaussianMap::sample(d, 16, 42)?;
    let again = GaussianMap::sample(d, 16, 42)?;
    assert_eq!(map.entries(), again.entries());

    println!("\n{:>4} {:>9} {:>9} {:>9}", "t", "min", "mean", "max");
    for t in [2usize, 4, 8, 16, 32, 64] {
        let map = GaussianMap::sample(d, t, 42)?;
        let stats = norm_distortion_stats(&inst.p, &map)?;
        println!("{t:>4} {:>9.4} {:>9.4} {:>9.4}", stats.min, stats.mean, stats.max);
    }

    // the identity map is the distortion-free baseline: every ratio is 1
    let identity = GaussianMap::identity(d);
    let stats = norm_distortion_stats(&inst.p, &identity)?;
    println!("\nidentity map: min = {}, max = {} (exactly 1)", stats.min, stats.max);

    // a histogram of pairwise ratios at a mid-size target dimension
    let map = GaussianMap::sample(d, 16, 42)?;
    let stats = norm_distortion_stats(&inst.p, &map)?;
    println!("\nratio histogram at t = 16 ({} pairs):", stats.pairs);
    let widest = stats.counts.iter().copied().max().unwrap_or(1).max(1);
    for (i, &count) in stats.counts.iter().enumerate() {
        let bar = "#".repeat((count * 48 / widest) as usize);
        println!("  [{:.3}, {:.3}) {bar}", stats.bin_edges[i], stats.bin_edges[i + 1]);
    }
    Ok(())
}
