//! Calibration of the constants the paper leaves existential: the
//! energy-trapping coercivity constant, the L²-vs-𝒜²ℬ² constant, the flux
//! normalization, and the measured channel constant α̂₀. Frozen values live
//! here; the routines re-derive them and the verify suite checks agreement.

use std::sync::Arc;

use critwave_core::corpus::{bump, ParamStream};
use critwave_core::evolution::{evolve, Mode, SolverConfig};
use critwave_core::field::{h_norm_sq, to_psi, Formulation, RadialField, RadialState};
use critwave_core::grid::RadialGrid;
use critwave_core::ground_state::{energy, GRAD_W_SQ};
use critwave_core::lightcone::{cone_energy, flux_on_cone, pointwise_bound_check, ConeSpec};

use crate::error::Result;

/// Frozen: 0.9 × corpus minimum of E/min{‖∇f‖², 2‖∇W‖² − ‖∇f‖²}.
pub const COERCIVITY_C: f64 = 0.112;
/// Frozen: 1.1 × corpus maximum of L²r²/(𝒜²ℬ²).
pub const C_L: f64 = 9.0;
/// Frozen: measured minimum asymptotic (f,0) exterior fraction.
pub const ALPHA0_HAT: f64 = 0.489;

/// Corpus minimum of the coercivity quotient; the calibrated constant is
/// 0.9 × this value.
pub fn calibrate_coercivity(n_fields: usize, seed: u64) -> Result<f64> {
    let grid = RadialGrid::uniform(40.0, 2000)?;
    let mut ps = ParamStream::new(seed);
    let mut min_q = f64::INFINITY;
    for _ in 0..n_fields {
        let c = ps.uniform(3.0, 15.0);
        let w = ps.uniform(1.0, 5.0);
        let s_target = ps.uniform(0.02, 0.98); // ‖∇f‖² = s·2‖∇W‖²
        let raw = RadialField::from_fn(grid.clone(), Formulation::U, |r| bump(r, c, w))?;
        let state = RadialState::new(
            raw.clone(),
            RadialField::zeros(grid.clone(), Formulation::U),
            0.0,
        )?;
        let g_raw = h_norm_sq(&state, 0.0, 40.0)?;
        if g_raw == 0.0 {
            continue;
        }
        let amp = (s_target * 2.0 * GRAD_W_SQ / g_raw).sqrt();
        let f = RadialField::from_fn(grid.clone(), Formulation::U, |r| amp * bump(r, c, w))?;
        let st = RadialState::new(f, RadialField::zeros(grid.clone(), Formulation::U), 0.0)?;
        let rep = energy(&st, 0.0, 40.0)?;
        let grad_sq = 2.0 * rep.gradient;
        if grad_sq > 2.0 * GRAD_W_SQ {
            continue;
        }
        let denom = grad_sq.min(2.0 * GRAD_W_SQ - grad_sq);
        if denom <= 1e-9 {
            continue;
        }
        min_q = min_q.min(rep.total / denom);
    }
    Ok(min_q)
}

/// Corpus maximum of L²r²/(𝒜²ℬ²) over sub-threshold ψ-states; the calibrated
/// constant is 1.1 × this value.
pub fn calibrate_c_l(n_states: usize, seed: u64) -> Result<f64> {
    let grid = RadialGrid::uniform(20.0, 1000)?;
    let mut ps = ParamStream::new(seed);
    let mut max_ratio = 0.0f64;
    for _ in 0..n_states {
        let (a, c, w) = (
            ps.uniform(-0.6, 0.6),
            ps.uniform(2.0, 14.0),
            ps.uniform(0.8, 4.0),
        );
        let (av, cv, wv) = (
            ps.uniform(-0.5, 0.5),
            ps.uniform(2.0, 14.0),
            ps.uniform(0.8, 4.0),
        );
        let pos = RadialField::from_fn(grid.clone(), Formulation::Psi, |r| {
            a * bump(r, c, w) * r / (1.0 + r)
        })?;
        let vel = RadialField::from_fn(grid.clone(), Formulation::Psi, |r| {
            av * bump(r, cv, wv) * r / (1.0 + r)
        })?;
        let s = RadialState::new(pos, vel, 0.0)?;
        let rep = pointwise_bound_check(&s, 0.2, 19.0, f64::INFINITY, Mode::Cubic)?;
        max_ratio = max_ratio.max(rep.l_sq_ratio_max);
    }
    Ok(max_ratio)
}

/// Balance constant of the discrete local energy identity on the static-W
/// cone: c₀ = (ℰ(τ) − ℰ(ε))/(√2·mantle integral); 1/√2 analytically.
pub fn calibrate_c0() -> Result<f64> {
    let grid: Arc<RadialGrid> = RadialGrid::uniform(12.0, 1200)?;
    let w = critwave_core::ground_state::ground_state(
        critwave_core::ground_state::GroundStateSpec::new(1.0, 1)?,
        &grid,
    );
    let cfg = SolverConfig::new(grid.clone(), 0.0045, Mode::Cubic, 2.0)?.with_cadence(10);
    let tr = evolve(&to_psi(&w)?, &cfg)?;
    let apex = 10.0;
    let (t_tau, t_eps) = (0.5, 1.5);
    let e_tau = cone_energy(tr.snapshot_nearest(t_tau), apex - t_tau, Mode::Cubic)?;
    let e_eps = cone_energy(tr.snapshot_nearest(t_eps), apex - t_eps, Mode::Cubic)?;
    let cone = ConeSpec::backward(apex, 0.5)?;
    // the raw mantle integral is the flux evaluated with c₀ = 1
    let raw = flux_on_cone(&tr, &cone, apex - t_eps, apex - t_tau, 1.0)?;
    Ok((e_tau - e_eps) / raw)
}

/// The 20-member (f,0) channel corpus: smooth bumps with seeded centers and
/// widths, kept clear of both the origin and the outer buffer.
pub fn channel_corpus(grid: &Arc<RadialGrid>, seed: u64) -> Vec<(f64, f64, RadialState)> {
    let mut ps = ParamStream::new(seed);
    (0..20)
        .map(|_| {
            let c = ps.uniform(2.0, 4.5);
            let w = ps.uniform(0.8, 1.5);
            let f = RadialField::from_fn(grid.clone(), Formulation::U, |r| bump(r, c, w))
                .expect("bump");
            let s = RadialState::new(
                f,
                RadialField::zeros(grid.clone(), Formulation::U),
                0.0,
            )
            .expect("state");
            (c, w, s)
        })
        .collect()
}

/// Measured α̂₀: the corpus minimum of the asymptotic exterior fraction at
/// the given resolution.
pub fn calibrate_alpha0(cells: usize, seed: u64) -> Result<f64> {
    let grid = RadialGrid::uniform(40.0, cells)?;
    let h = grid.uniform_h().unwrap();
    let cfg = SolverConfig::new(grid.clone(), 0.45 * h, Mode::Linear, 8.0)?.with_cadence(10);
    let mut min_frac = f64::INFINITY;
    for (_, _, data) in channel_corpus(&grid, seed) {
        let rep = critwave_core::channels::exterior_fraction_series(&data, &cfg)?;
        min_frac = min_frac.min(rep.asymptotic_fraction);
    }
    Ok(min_frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_balances_to_one_over_sqrt_two() {
        let c0 = calibrate_c0().unwrap();
        assert!(
            (c0 - std::f64::consts::FRAC_1_SQRT_2).abs() < 2e-3,
            "measured c0 = {c0}"
        );
    }

    #[test]
    fn frozen_coercivity_matches_recalibration() {
        // smaller corpus here; the frozen value came from the full 1000
        let q = calibrate_coercivity(200, 2024).unwrap();
        let c = 0.9 * q;
        assert!(
            (c - COERCIVITY_C).abs() < 0.25 * COERCIVITY_C,
            "recalibrated coercivity {c} vs frozen {COERCIVITY_C}"
        );
    }

    #[test]
    fn frozen_c_l_matches_recalibration() {
        let ratio = calibrate_c_l(60, 77).unwrap();
        let c = 1.1 * ratio;
        assert!(
            c <= C_L * 1.2 && c >= C_L * 0.2,
            "recalibrated C_L {c} vs frozen {C_L}"
        );
    }
}
