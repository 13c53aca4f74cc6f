//! Smooth compactly supported bump fields and seeded random corpora used by
//! the inequality suites and the channel experiments.

use std::sync::Arc;

use crate::field::{Formulation, RadialField};
use crate::grid::RadialGrid;

/// C^∞ bump: exp(1 − 1/(1−y²)) for |y| < 1 with y = (r−center)/width,
/// zero outside; equals 1 at the center.
pub fn bump(r: f64, center: f64, width: f64) -> f64 {
    let y = (r - center) / width;
    if y.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

pub fn bump_field(grid: &Arc<RadialGrid>, amp: f64, center: f64, width: f64) -> RadialField {
    RadialField::from_fn(grid.clone(), Formulation::U, |r| amp * bump(r, center, width))
        .expect("bump sampling")
}

/// Deterministic xorshift-based parameter stream; keeps corpus generation
/// reproducible across platforms without pulling an RNG crate into the lib.
#[derive(Debug, Clone)]
pub struct ParamStream {
    state: u64,
}

impl ParamStream {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed ^ 0x9e37_79b9_7f4a_7c15,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        // splitmix64
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + u * (hi - lo)
    }
}

/// Seeded corpus of superpositions of 1–3 bumps, u-form. Centers stay inside
/// [r_lo, r_hi] and supports clear of R_max so the tails decay.
pub fn random_bump_corpus(
    grid: &Arc<RadialGrid>,
    n: usize,
    seed: u64,
    r_lo: f64,
    r_hi: f64,
) -> Vec<RadialField> {
    let mut ps = ParamStream::new(seed);
    (0..n)
        .map(|_| {
            let k = 1 + (ps.next_u64() % 3) as usize;
            let mut parts = Vec::with_capacity(k);
            for _ in 0..k {
                let center = ps.uniform(r_lo, r_hi);
                let width = ps.uniform(0.3, 1.0) * (r_hi - r_lo).min(center.max(0.5));
                let amp = ps.uniform(-1.0, 1.0);
                parts.push((amp, center, width));
            }
            RadialField::from_fn(grid.clone(), Formulation::U, |r| {
                parts.iter().map(|&(a, c, w)| a * bump(r, c, w)).sum()
            })
            .expect("bump sampling")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_compact_and_normalized() {
        assert_eq!(bump(5.0, 3.0, 1.0), 0.0);
        assert_eq!(bump(3.0, 3.0, 1.0), 1.0);
        assert!(bump(3.5, 3.0, 1.0) > 0.0);
        assert_eq!(bump(1.99, 3.0, 1.0), 0.0);
    }

    #[test]
    fn corpus_is_deterministic_in_the_seed() {
        let g = RadialGrid::uniform(20.0, 400).unwrap();
        let a = random_bump_corpus(&g, 5, 42, 2.0, 8.0);
        let b = random_bump_corpus(&g, 5, 42, 2.0, 8.0);
        for (fa, fb) in a.iter().zip(&b) {
            assert_eq!(fa.values(), fb.values());
        }
        let c = random_bump_corpus(&g, 5, 43, 2.0, 8.0);
        assert_ne!(a[0].values(), c[0].values());
    }
}
