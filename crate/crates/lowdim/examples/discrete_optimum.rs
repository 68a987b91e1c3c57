//! Solve discrete power-clustering instances exactly and by local search,
//! and check the solvers against families with known optima.
//!
//! Run with: `cargo run --example discrete_optimum`

use lowdim::clustering::{cost, opt_exact, opt_local, DEFAULT_ENUM_BUDGET};
use lowdim::instances::{gen_basis, gen_doubling, gen_pairs};

fn main() -> lowdim::Result<()> {
    // basis family: n unit directions, all sqrt(2) apart, so with k centers
    // the optimum is exactly (n - k) * sqrt(2) at z = 1
    let inst = gen_basis(8)?;
    let opt = opt_exact(&inst, DEFAULT_ENUM_BUDGET)?;
    println!("basis(8), k = {}: optimum {:.6} = (8-2)*sqrt(2)", inst.k, opt.value);
    assert!((opt.value - 6.0 * 2.0f64.sqrt()).abs() < 1e-12);

    // pair family: k tight pairs far apart; one center per pair leaves
    // exactly one unit distance uncovered in total
    for k in [3usize, 4, 7] {
        let inst = gen_pairs(k)?;
        let opt = opt_exact(&inst, DEFAULT_ENUM_BUDGET)?;
        println!("pairs(k = {k}): optimum {:.6} (expected 1)", opt.value);
        assert!((opt.value - 1.0).abs() < 1e-12);
    }

    // local search on an instance the exact solver can still handle: compare
    let inst = gen_doubling(48, 2, 1.0, 19)?;
    let exact = opt_exact(&inst, DEFAULT_ENUM_BUDGET)?;
    let local = opt_local(&inst, 8, 5)?;
    println!(
        "\ndoubling(48): exact {:.5} vs local search {:.5} (gap {:.2}%)",
        exact.value,
        local.value,
        100.0 * (local.value / exact.value - 1.0)
    );
    assert!(local.value + 1e-12 >= exact.value, "local search can never beat the optimum");

    // a solution is just candidate indices; its cost is recomputable
    let replay = cost(&inst, &exact.solution.center_indices)?;
    assert_eq!(replay, exact.value);
    println!("replayed optimal centers {:?} -> same value", exact.solution.center_indices);
    Ok(())
}
