//! The localized Hardy-inequality suite for Ḣ¹(ℝ⁴) radial functions:
//!
//!   |r w(r)|²            ≤ ½ ∫_r^∞ w_ρ² ρ³ dρ
//!   ∫_r^∞ w² ρ dρ        ≤ ∫_r^∞ w_ρ² ρ³ dρ
//!   |r²w²(r) − s²w²(s)|  ≤ 3∫_s^r w² ρ dρ + ∫_s^r w_ρ² ρ³ dρ   (s < r)
//!   sup_{s≤r} |s w(s)|²  ≤ 3∫_0^r w² ρ dρ + ∫_0^r w_ρ² ρ³ dρ
//!
//! Verified with quadrature tolerance slack; ∫^∞ truncates at R_max, so the
//! field tail must be numerically negligible there.

use crate::error::{Error, Result};
use crate::field::{Formulation, RadialField};

#[derive(Debug, Clone)]
pub struct HardyReport {
    /// Worst-case margin (rhs − lhs) of each inequality over the window.
    pub margins: [f64; 4],
    /// margin ≥ −slack per inequality.
    pub holds: [bool; 4],
    pub slack: f64,
    pub all_hold: bool,
}

/// Check all four bounds for `f` (u-form) with r ranging over [r_lo, r_hi].
pub fn hardy_suite(f: &RadialField, r_lo: f64, r_hi: f64) -> Result<HardyReport> {
    f.require_form(Formulation::U)?;
    let grid = f.grid();
    let nodes = grid.nodes();
    let r_max = grid.r_max();
    if !(0.0 <= r_lo && r_lo <= r_hi && r_hi <= r_max) {
        return Err(Error::BandOutsideGrid {
            lo: r_lo,
            hi: r_hi,
            r_max,
        });
    }

    // tail decay precondition: ℋ-type content of the outer 5% must be
    // negligible against the total
    let n = nodes.len();
    let w = f.values();
    let wr = f.derivative();
    let dens_h: Vec<f64> = (0..n)
        .map(|i| wr.values()[i].powi(2) * nodes[i].powi(3) + w[i].powi(2) * nodes[i])
        .collect();
    let cell = |i: usize| -> f64 {
        let lo = if i == 0 { 0.0 } else { 0.5 * (nodes[i] + nodes[i - 1]) };
        let hi = if i == n - 1 {
            r_max
        } else {
            0.5 * (nodes[i] + nodes[i + 1])
        };
        hi - lo
    };
    let total_h: f64 = (0..n).map(|i| dens_h[i] * cell(i)).sum();
    let tail_h: f64 = (0..n)
        .filter(|&i| nodes[i] >= 0.95 * r_max)
        .map(|i| dens_h[i] * cell(i))
        .sum();
    if tail_h > 1e-8 * total_h + 1e-14 {
        return Err(Error::NonDecayingTail);
    }

    // cumulative trapezoids from 0: P = ∫ w² ρ dρ, Q = ∫ w_ρ² ρ³ dρ
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for i in 1..n {
        let dr = nodes[i] - nodes[i - 1];
        let pa = w[i - 1] * w[i - 1] * nodes[i - 1];
        let pb = w[i] * w[i] * nodes[i];
        p[i] = p[i - 1] + 0.5 * (pa + pb) * dr;
        let qa = wr.values()[i - 1].powi(2) * nodes[i - 1].powi(3);
        let qb = wr.values()[i].powi(2) * nodes[i].powi(3);
        q[i] = q[i - 1] + 0.5 * (qa + qb) * dr;
    }
    let (p_tot, q_tot) = (p[n - 1], q[n - 1]);

    let slack = grid.quad_slack(r_hi - r_lo.min(r_hi)) * (1.0 + total_h);
    let in_window = |i: usize| nodes[i] >= r_lo && nodes[i] <= r_hi;

    // 1: |r w|² ≤ ½ Q_tail(r);  2: P_tail(r) ≤ Q_tail(r)
    let mut m1 = f64::INFINITY;
    let mut m2 = f64::INFINITY;
    for i in 0..n {
        if !in_window(i) {
            continue;
        }
        let u = (nodes[i] * w[i]).powi(2);
        m1 = m1.min(0.5 * (q_tot - q[i]) - u);
        m2 = m2.min((q_tot - q[i]) - (p_tot - p[i]));
    }

    // 3: |U(r) − U(s)| ≤ C(r) − C(s) with U = r²w², C = 3P + Q, s < r.
    // Splitting the absolute value: D = C − U and S = C + U must both be
    // non-decreasing; the worst pairwise margin needs only running maxima.
    let mut m3 = f64::INFINITY;
    let mut run_max_d = f64::NEG_INFINITY;
    let mut run_max_s = f64::NEG_INFINITY;
    for i in 0..n {
        if !in_window(i) {
            continue;
        }
        let u = (nodes[i] * w[i]).powi(2);
        let c = 3.0 * p[i] + q[i];
        if run_max_d > f64::NEG_INFINITY {
            m3 = m3.min((c - u) - run_max_d);
            m3 = m3.min((c + u) - run_max_s);
        }
        run_max_d = run_max_d.max(c - u);
        run_max_s = run_max_s.max(c + u);
    }
    if m3 == f64::INFINITY {
        m3 = 0.0;
    }

    // 4: running-sup |s w(s)|² ≤ 3P(r) + Q(r)
    let mut m4 = f64::INFINITY;
    let mut run_sup_u = 0.0f64;
    for i in 0..n {
        if nodes[i] > r_hi {
            break;
        }
        let u = (nodes[i] * w[i]).powi(2);
        run_sup_u = run_sup_u.max(u);
        if in_window(i) {
            m4 = m4.min(3.0 * p[i] + q[i] - run_sup_u);
        }
    }
    if m4 == f64::INFINITY {
        m4 = 0.0;
    }
    if m1 == f64::INFINITY {
        m1 = 0.0;
        m2 = 0.0;
    }

    let margins = [m1, m2, m3, m4];
    let holds = margins.map(|m| m >= -slack);
    Ok(HardyReport {
        margins,
        holds,
        slack,
        all_hold: holds.iter().all(|&b| b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{bump_field, random_bump_corpus};
    use crate::grid::RadialGrid;
    use crate::ground_state::w_value;

    #[test]
    fn zero_field_holds_with_margin_zero() {
        let g = RadialGrid::uniform(10.0, 500).unwrap();
        let f = RadialField::zeros(g, Formulation::U);
        let rep = hardy_suite(&f, 0.0, 10.0).unwrap();
        assert!(rep.all_hold);
        for m in rep.margins {
            assert!(m.abs() <= rep.slack);
        }
    }

    #[test]
    fn tail_truncated_ground_state_passes() {
        let g = RadialGrid::uniform(60.0, 3000).unwrap();
        // W times a smooth cutoff vanishing by r = 40
        let f = RadialField::from_fn(g.clone(), Formulation::U, |r| {
            let cut = if r <= 20.0 {
                1.0
            } else if r >= 40.0 {
                0.0
            } else {
                let y = (r - 20.0) / 20.0;
                (1.0 - y * y).max(0.0).powi(3)
            };
            w_value(r) * cut
        })
        .unwrap();
        let rep = hardy_suite(&f, 0.0, 50.0).unwrap();
        assert!(rep.all_hold, "margins {:?} slack {}", rep.margins, rep.slack);
    }

    #[test]
    fn untruncated_ground_state_is_flagged_unverifiable() {
        let g = RadialGrid::uniform(60.0, 3000).unwrap();
        let f = RadialField::from_fn(g, Formulation::U, w_value).unwrap();
        assert!(matches!(
            hardy_suite(&f, 0.0, 50.0),
            Err(Error::NonDecayingTail)
        ));
    }

    #[test]
    fn seeded_bump_corpus_passes_all_four() {
        let g = RadialGrid::uniform(40.0, 2000).unwrap();
        for f in random_bump_corpus(&g, 30, 1234, 2.0, 20.0) {
            let rep = hardy_suite(&f, 0.0, 35.0).unwrap();
            assert!(rep.all_hold, "margins {:?}", rep.margins);
        }
    }

    #[test]
    fn single_bump_margins_are_strictly_positive_inside_support() {
        let g = RadialGrid::uniform(20.0, 1000).unwrap();
        let f = bump_field(&g, 5.0, 5.0, 2.0);
        // window kept inside the support [3, 7]: beyond it the ∫_r^∞ bounds
        // degenerate to the equality 0 ≤ 0
        let rep = hardy_suite(&f, 4.0, 6.5).unwrap();
        assert!(rep.all_hold);
        for m in rep.margins {
            assert!(m > 0.0, "margins {:?}", rep.margins);
        }
        // and over the full domain everything still holds with slack
        let full = hardy_suite(&f, 0.0, 20.0).unwrap();
        assert!(full.all_hold);
    }
}
