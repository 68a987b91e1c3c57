//! Run every guarantee check once: at the identity map (where each must
//! pass with ratio exactly 1) and across seeded random maps.
//!
//! Run with: `cargo run --example verify_guarantees`

use lowdim::geometry::WeightedPointSet;
use lowdim::instances::gen_doubling;
use lowdim::verify::{run_check, run_trials, TrialCheck};

fn main() -> lowdim::Result<()> {
    let inst = gen_doubling(32, 2, 1.0, 13)?;
    let d = inst.p.dim();
    let eps = 0.25;

    // the preserve-sum check compares against the continuous optimum, which
    // is solved by exhausting set partitions — keep its point set small
    let small = WeightedPointSet::new(
        inst.p.points()[..12].to_vec(),
        inst.p.weights()[..12].to_vec(),
    )?;

    let checks = vec![
        TrialCheck::Expansion { inst: inst.clone(), eps },
        TrialCheck::Contraction { inst: inst.clone(), eps },
        TrialCheck::RelaxedContraction { inst: inst.clone(), eps, alpha: 100.0 },
        TrialCheck::PreserveSum {
            points: small,
            center: inst.q.point(0).clone(),
            k: inst.k,
            z: inst.z,
            eps,
        },
    ];

    // target dimension == source dimension injects the exact identity map:
    // nothing moves, so every check passes with ratio exactly 1
    println!("identity baseline (t = d = {d}):");
    for check in &checks {
        let report = run_check(check, d, 0)?;
        println!(
            "  {:<24} pass = {:<5} worst_ratio = {}",
            report.check_name, report.pass, report.worst_ratio
        );
        assert!(report.pass);
        assert_eq!(report.worst_ratio, 1.0);
    }

    // one random map in detail: the report carries a witness that attains
    // the worst ratio and enough diagnostics to rebuild the comparison
    let report = run_check(&checks[1], 6, 1)?;
    println!("\ncontraction at t = 6, seed 1:");
    println!("  pass        {}", report.pass);
    println!("  worst_ratio {:.6}", report.worst_ratio);
    println!("  witness     {}", serde_json::to_value(&report.witness).unwrap());
    println!("  details     {}", report.details);

    // success rates across 30 independently seeded maps per dimension
    // (t = 8 would hit the identity injection on this 8-dimensional input,
    // so the sweep sticks to genuinely random maps)
    println!("\nsuccess rates over 30 seeds:");
    println!("{:>26} {:>6} {:>6} {:>6}", "check", "t=4", "t=16", "t=64");
    for check in &checks {
        let mut rates = Vec::new();
        for t in [4usize, 16, 64] {
            rates.push(run_trials(check, t, 30, 100)?.success_rate);
        }
        println!("{:>26} {:>6.2} {:>6.2} {:>6.2}", check.name(), rates[0], rates[1], rates[2]);
    }
    Ok(())
}
