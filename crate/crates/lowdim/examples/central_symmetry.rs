//! A set that is centrally symmetric about a point has that point as an
//! optimal power center — and the property survives projection, which is
//! what makes midpoints of far-apart pairs reliable candidate centers.
//!
//! Run with: `cargo run --example central_symmetry`

use lowdim::clustering::continuous_center;
use lowdim::geometry::{Point, PowerExponent, WeightedPointSet};
use lowdim::projection::GaussianMap;
use lowdim::rng::SplitMix64;
use lowdim::verify::check_central_symmetric;

fn main() -> lowdim::Result<()> {
    // build a cloud symmetric about an arbitrary center by reflecting every
    // random point through it
    let center = Point::new(vec![0.8, -0.4, 0.2, 1.5])?;
    let mut rng = SplitMix64::new(3);
    let mut points = Vec::new();
    for _ in 0..16 {
        let p = Point::new((0..4).map(|_| rng.next_in_range(-2.0, 2.0)).collect())?;
        points.push(p.reflect_through(&center));
        points.push(p);
    }
    let x = WeightedPointSet::unweighted(points)?;

    for z in [1.0, 2.0] {
        let z = PowerExponent::new(z)?;
        let report = check_central_symmetric(&x, &center, z)?;
        println!(
            "z = {}: center optimal = {} (cost ratio vs best probe: {:.9})",
            z.get(),
            report.pass,
            report.worst_ratio
        );
        assert!(report.pass);

        // the continuous solver lands on the same point
        let solved = continuous_center(&x, z, 1e-10)?;
        let gap = lowdim::geometry::dist(&solved, &center);
        println!("       continuous center within {gap:.2e} of the symmetry center");
    }

    // symmetry is a linear-map invariant: the projected cloud is symmetric
    // about the projected center, so the optimality transfers
    let map = GaussianMap::sample(4, 2, 9)?;
    let gx = map.apply_set(&x)?;
    let gc = map.apply(&center)?;
    let report = check_central_symmetric(&gx, &gc, PowerExponent::new(2.0)?)?;
    println!("\nafter projecting to 2 dimensions: center optimal = {}", report.pass);
    assert!(report.pass);
    Ok(())
}
