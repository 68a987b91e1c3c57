//! Build the multilevel net hierarchy around a solved instance's optimal
//! centers and walk its levels.
//!
//! Run with: `cargo run --example hierarchy_levels`

use lowdim::clustering::{opt_exact, DEFAULT_ENUM_BUDGET};
use lowdim::instances::gen_doubling;
use lowdim::nets::{build_hierarchy, level_of};

fn main() -> lowdim::Result<()> {
    let inst = gen_doubling(64, 2, 1.0, 11)?;
    let opt = opt_exact(&inst, DEFAULT_ENUM_BUDGET)?;
    let centers: Vec<_> =
        opt.solution.center_indices.iter().map(|&j| inst.q.point(j).clone()).collect();

    // base radius at the conventional analysis scale: opt^(1/z)
    let r0 = opt.value.powf(1.0 / inst.z.get());
    println!("optimum {:.4} -> base radius {r0:.4}, {} centers\n", opt.value, centers.len());

    let eps = 0.25;
    let hierarchy = build_hierarchy(&inst.p, &inst.q, &centers, r0, 0, 8, eps)?;
    println!("{:>5} {:>10} {:>12} {:>10}", "level", "radius", "net scale", "net size");
    for (&ell, nets) in &hierarchy.nets {
        let members: usize = nets.iter().map(|n| n.len()).sum();
        println!(
            "{ell:>5} {:>10.4} {:>12.5} {members:>10}",
            hierarchy.radius(ell),
            hierarchy.net_scale(ell),
        );
    }

    // every point of P gets a bracket level: the level whose radius encloses
    // its distance to the nearest center from above
    println!("\nbracket levels of the first 8 points:");
    for i in 0..8 {
        let p = inst.p.point(i);
        let (level, r_p, owner) = level_of(p, &centers, r0);
        println!("  point {i}: level {level:>3}, bracket radius {r_p:.4}, center {owner}");
    }

    // the dump is what the `net` subcommand writes
    let dump = hierarchy.to_json();
    let levels = dump["levels"].as_array().map(Vec::len).unwrap_or(0);
    println!("\nJSON dump carries {levels} levels ({} bytes pretty-printed)", format!("{dump:#}").len());
    Ok(())
}
