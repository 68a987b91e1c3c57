//! Target-dimension recipes: how many dimensions each guarantee needs as
//! accuracy, cluster count, input size, and candidate count vary.
//!
//! Run with: `cargo run --example dimension_recipes`

use lowdim::projection::{DimensionRecipe, RecipeVariant};

fn recipe(variant: RecipeVariant, eps: f64, k: usize) -> DimensionRecipe {
    DimensionRecipe {
        variant,
        eps,
        z: 1.0,
        ddim: 2.0,
        k,
        n: Some(1 << 20),
        s: Some(1 << 14),
        alpha: Some(100.0),
        c_const: 1.0,
    }
}

fn main() -> lowdim::Result<()> {
    use RecipeVariant::*;

    println!("target dimension by variant (z = 1, ddim = 2, n = 2^20, s = 2^14, alpha = 100)\n");
    println!(
        "{:>6} {:>4} {:>28} {:>10} {:>26} {:>18}",
        "eps", "k", "forall-centers-partitions", "relaxed", "candidate-multiplicative", "candidate-relaxed"
    );
    for eps in [0.5, 0.25, 0.1] {
        for k in [2usize, 10, 100] {
            let ts: Vec<usize> = [ForallCentersPartitions, Relaxed, CandidateMultiplicative, CandidateRelaxed]
                .into_iter()
                .map(|v| recipe(v, eps, k).target_dimension())
                .collect::<lowdim::Result<_>>()?;
            println!("{eps:>6} {k:>4} {:>28} {:>10} {:>26} {:>18}", ts[0], ts[1], ts[2], ts[3]);
        }
    }

    // the relaxed variant trades the dependence on the input size for a
    // dependence on the cost floor: growing n leaves it unchanged
    let mut grow_n = recipe(Relaxed, 0.25, 10);
    let t_small = grow_n.target_dimension()?;
    grow_n.n = Some(1 << 40);
    let t_large = grow_n.target_dimension()?;
    println!("\nrelaxed recipe at n = 2^20 vs n = 2^40: {t_small} vs {t_large} (unchanged)");

    // the candidate-multiplicative variant is independent of k entirely
    let t_k2 = recipe(CandidateMultiplicative, 0.25, 2).target_dimension()?;
    let t_k100 = recipe(CandidateMultiplicative, 0.25, 100).target_dimension()?;
    println!("candidate-multiplicative at k = 2 vs k = 100: {t_k2} vs {t_k100} (unchanged)");
    Ok(())
}
