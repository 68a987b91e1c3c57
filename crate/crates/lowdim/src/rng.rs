//! Deterministic, portable random number generation.
//!
//! Every random quantity in this crate — Gaussian map entries, fixture
//! jitter, probe centers, Monte Carlo trials — is drawn from the single
//! generator defined here, so that any artifact is reproducible from a
//! `u64` seed alone, in any implementation language.
//!
//! The contract, fixed by the test vectors at the bottom of this file:
//!
//! * **State sequence**: SplitMix64 (Steele–Lea–Vigna). State starts at the
//!   seed and advances by the odd constant `0x9E3779B97F4A7C15`; each output
//!   is the advanced state mixed by two xor-shift-multiply rounds
//!   (`0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`).
//! * **Uniforms**: the top 53 bits of each `u64`, offset by half a ulp:
//!   `((x >> 11) + 0.5) * 2^-53`, which lies strictly inside `(0, 1)`.
//! * **Normals**: the Box–Muller transform applied to consecutive uniform
//!   pairs `(u1, u2)`: with `r = sqrt(-2 ln u1)` the pair yields
//!   `r cos(2π u2)` then `r sin(2π u2)`, in that order. No rejection, no
//!   ziggurat — the draw count is a pure function of how many normals are
//!   requested.
//!
//! The integer and uniform streams are bit-exact everywhere. Normal variates
//! go through libm (`ln`, `sqrt`, `cos`, `sin`) and may differ across
//! platforms in the last couple of ulps; the frozen vectors assert them to
//! 1e-15 relative.

/// SplitMix64 stream with a Box–Muller cache for normal variates.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    /// Second half of the most recent Box–Muller pair, if unconsumed.
    pending_normal: Option<f64>,
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed, pending_normal: None }
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX2);
        z ^ (z >> 31)
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn next_in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_uniform()
    }

    /// Uniform integer in `[0, n)` via 128-bit multiply (unbiased enough for
    /// fixture construction; n is always tiny compared to 2^64 here).
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (((self.next_u64() as u128) * (n as u128)) >> 64) as usize
    }

    /// Standard normal draw, Box–Muller on consecutive uniform pairs.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(second) = self.pending_normal.take() {
            return second;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.pending_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Fill `out` with standard normal draws.
    pub fn fill_normals(&mut self, out: &mut [f64]) {
        for slot in out {
            *slot = self.next_normal();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// First outputs of the raw stream for seed 0 and seed 42, frozen.
    /// These pin the generator contract; a change here is a breaking change
    /// to every seeded artifact in the crate.
    #[test]
    fn raw_stream_vectors() {
        let mut g0 = SplitMix64::new(0);
        let first0: Vec<u64> = (0..4).map(|_| g0.next_u64()).collect();
        assert_eq!(
            first0,
            vec![
                0xE220_A839_7B1D_CDAF,
                0x6E78_9E6A_A1B9_65F4,
                0x06C4_5D18_8009_454F,
                0xF88B_B8A8_724C_81EC,
            ]
        );

        let mut g42 = SplitMix64::new(42);
        let first42: Vec<u64> = (0..4).map(|_| g42.next_u64()).collect();
        assert_eq!(
            first42,
            vec![
                0xBDD7_3226_2FEB_6E95,
                0x28EF_E333_B266_F103,
                0x4752_6757_130F_9F52,
                0x581C_E1FF_0E4A_E394,
            ]
        );
    }

    /// Uniforms are a pure bit-manipulation of the raw stream, so these are
    /// exact equality assertions.
    #[test]
    fn uniform_stream_vectors() {
        let mut g = SplitMix64::new(2024);
        let got: Vec<f64> = (0..4).map(|_| g.next_uniform()).collect();
        assert_eq!(
            got,
            vec![
                0.6227655366461098,
                0.09723190848769275,
                0.29857616111335844,
                0.11618673072244595,
            ]
        );
    }

    #[test]
    fn uniforms_lie_strictly_inside_unit_interval() {
        let mut g = SplitMix64::new(7);
        for _ in 0..10_000 {
            let u = g.next_uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    /// Frozen normal vectors (seed 2024). Tolerance 1e-15 relative because
    /// the transform goes through libm.
    #[test]
    fn normal_stream_vectors() {
        let mut g = SplitMix64::new(2024);
        let got: Vec<f64> = (0..4).map(|_| g.next_normal()).collect();
        let expect = [
            0.7971867263066109,
            0.5582684630231942,
            1.1585873232620842,
            1.0368875925321017,
        ];
        for (g, e) in got.iter().zip(expect.iter()) {
            assert!(
                (g - e).abs() <= 1e-15 * e.abs().max(1.0),
                "normal vector drifted: got {g}, expected {e}"
            );
        }
    }

    #[test]
    fn normal_draw_count_is_deterministic() {
        // Two generators, one consuming singles, one bulk-filling: identical.
        let mut a = SplitMix64::new(99);
        let mut b = SplitMix64::new(99);
        let singles: Vec<f64> = (0..7).map(|_| a.next_normal()).collect();
        let mut bulk = vec![0.0; 7];
        b.fill_normals(&mut bulk);
        assert_eq!(singles, bulk);
    }

    #[test]
    fn normals_have_plausible_moments() {
        let mut g = SplitMix64::new(1);
        let n = 200_000;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..n {
            let x = g.next_normal();
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }
}
