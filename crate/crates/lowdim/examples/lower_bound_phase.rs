//! Phase transition of the decay family: at low target dimension some
//! direction's image contracts enough for a data point to beat the origin
//! as a center; at high target dimension that stops happening.
//!
//! Run with: `cargo run --example lower_bound_phase`

use lowdim::geometry::powered_dist;
use lowdim::instances::gen_decay;
use lowdim::projection::GaussianMap;

/// Does any data point, used as a center, get at least `depth` cheaper after
/// projection than it was before?
fn contraction_event(
    inst: &lowdim::clustering::ClusteringInstance,
    map: &GaussianMap,
    depth: f64,
) -> lowdim::Result<bool> {
    let images: Vec<_> =
        inst.p.points().iter().map(|p| map.apply(p)).collect::<lowdim::Result<Vec<_>>>()?;
    for c in 0..inst.p.len() {
        let mut source = 0.0;
        let mut target = 0.0;
        for (i, (p, w)) in inst.p.iter().enumerate() {
            source += w as f64 * powered_dist(p, inst.p.point(c), inst.z);
            target += w as f64 * powered_dist(&images[i], &images[c], inst.z);
        }
        if target <= (1.0 - depth) * source {
            return Ok(true);
        }
    }
    Ok(false)
}

fn main() -> lowdim::Result<()> {
    // 2^20 points: a handful of geometrically decaying directions plus a
    // heavy origin; only the used coordinates are materialized
    let inst = gen_decay(1 << 20)?;
    println!(
        "decay family: {} stored points in {} dimensions, total weight {}",
        inst.p.len(),
        inst.p.dim(),
        inst.p.total_weight()
    );

    let depth = 0.3;
    let trials = 60u64;
    println!(
        "\nevent: some data point gets {:.0}% cheaper as a center after projection",
        depth * 100.0
    );
    println!("{:>4} {:>12}", "t", "event rate");
    for t in [4usize, 8, 16, 32, 64] {
        let mut hits = 0;
        for seed in 0..trials {
            let map = GaussianMap::sample(inst.p.dim(), t, 900 + seed)?;
            hits += u64::from(contraction_event(&inst, &map, depth)?);
        }
        println!("{t:>4} {:>12.3}", hits as f64 / trials as f64);
    }
    println!(
        "\n(the rate collapsing from near 1 to near 0 as t grows is the point:\n\
         below the required dimension the guarantee genuinely breaks)"
    );
    Ok(())
}
