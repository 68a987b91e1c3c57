//! The multi-event diagnostic behind the finer contraction analysis:
//! per-level coefficients, per-cluster threshold levels, and the seven
//! events with their normalized margins.
//!
//! Run with: `cargo run --example good_events`

use lowdim::clustering::{opt_exact, DEFAULT_ENUM_BUDGET};
use lowdim::instances::gen_doubling;
use lowdim::nets::build_hierarchy;
use lowdim::projection::GaussianMap;
use lowdim::verify::good_events_diagnostics;

fn main() -> lowdim::Result<()> {
    let inst = gen_doubling(32, 2, 1.0, 29)?;
    let opt = opt_exact(&inst, DEFAULT_ENUM_BUDGET)?;
    let centers: Vec<_> =
        opt.solution.center_indices.iter().map(|&j| inst.q.point(j).clone()).collect();
    let r0 = opt.value.powf(1.0 / inst.z.get());

    // the buffer windows reach log2(2000 L^2) levels below each threshold,
    // so the hierarchy must be built generously wide
    let hierarchy = build_hierarchy(&inst.p, &inst.q, &centers, r0, -16, 10, 0.25)?;
    let (alpha, l_const) = (2.0, 1.0);

    let map = GaussianMap::sample(inst.p.dim(), 12, 5)?;
    let report = good_events_diagnostics(&inst, &hierarchy, &map, alpha, l_const)?;

    println!("optimum {:.4}; threshold levels {:?}", report.opt_value, report.threshold_levels);
    println!("\nper-level contraction/spread coefficients:");
    println!("{:>6} {:>10} {:>10}", "level", "beta", "gamma");
    for ((ell, beta), (_, gamma)) in report.beta_by_level.iter().zip(&report.gamma_by_level) {
        println!("{ell:>6} {beta:>10.4} {gamma:>10.4}");
    }

    println!("\nevents (margin <= 1 means the event holds):");
    for event in &report.events {
        println!("  {:<3} pass = {:<5} margin = {:.4}", event.name, event.pass, event.margin);
    }
    println!("\nall events hold: {}", report.all_pass());

    // under the identity map the events hold with slack to spare
    let identity = GaussianMap::identity(inst.p.dim());
    let baseline = good_events_diagnostics(&inst, &hierarchy, &identity, alpha, l_const)?;
    assert!(baseline.all_pass());
    println!(
        "identity-map margins: a = {:.4}, d = {:.4} (distortion-free baseline)",
        baseline.event("a").unwrap().margin,
        baseline.event("d").unwrap().margin
    );
    Ok(())
}
