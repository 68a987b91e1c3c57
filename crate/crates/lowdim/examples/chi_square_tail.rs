//! Lower tail of the squared norm of a projected unit vector: Monte Carlo
//! against the exact series, and the exponential envelope the analysis uses.
//!
//! Run with: `cargo run --example chi_square_tail`

use lowdim::stats::{chi_square_cdf_even, chi_square_lower_tail};

fn main() -> lowdim::Result<()> {
    // P[ |G u|^2 <= 1/(1+eps) ] for a unit vector u is the lower tail of a
    // scaled chi-square with t degrees of freedom
    println!(
        "{:>4} {:>6} {:>12} {:>10} {:>12} {:>12}",
        "t", "eps", "monte carlo", "stderr", "exact", "envelope"
    );
    let trials = 200_000;
    for t in [4u32, 8, 16, 32, 64] {
        for eps in [0.1, 0.25, 0.4] {
            let mc = chi_square_lower_tail(t, eps, trials, 7)?;
            let exact = chi_square_cdf_even(t, t as f64 / (1.0 + eps))?;
            // e^{-c eps^2 t} / t with c = 8: a crude but sufficient floor
            let envelope = (-8.0 * eps * eps * t as f64).exp() / t as f64;
            println!(
                "{t:>4} {eps:>6} {:>12.6} {:>10.6} {exact:>12.6} {envelope:>12.6}",
                mc.probability, mc.stderr
            );
            assert!(
                (mc.probability - exact).abs() <= 4.0 * mc.stderr.max(1e-6),
                "Monte Carlo must agree with the series"
            );
            assert!(mc.probability >= envelope, "the tail must clear its envelope");
        }
    }
    println!(
        "\nthe tail shrinks like exp(-eps^2 t) but never faster: that floor is\n\
         what forces the log-factors in the target-dimension recipes"
    );
    Ok(())
}
