//! Leapfrog evolution of the cubic equation and the free radial wave in
//! ψ-form, plus the exact standing-wave oracle, blow-up detection, the
//! Strichartz accumulator, and the scattering detector.
//!
//! Interior update: ψ_tt = ∂_r(ψ_r + ψ/r) + ψ³/r² (cubic mode) or
//! ψ_tt = ∂_r(ψ_r + ψ/r) (linear mode). The flux form of the linear part
//! avoids 1/r² amplification at the first interior node; ψ(t,0) = 0 is an
//! exact constraint and the outer boundary holds its initial trace behind
//! a no-signal buffer.

use std::sync::Arc;

use crate::bessel::j1;
use crate::error::{Error, Result};
use crate::field::{h_norm_sq, to_psi, to_u, Formulation, RadialField, RadialState};
use crate::grid::RadialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Full nonlinearity f(ψ) = ψ − ψ³.
    Cubic,
    /// Free wave: f(ψ) = ψ (the 4d radial d'Alembertian under ψ = r·v).
    Linear,
}

/// Outer-zone growth monitor. Flags boundary contamination when the ℋ-norm
/// inside the outer zone exceeds its initial value by `tol`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryGuard {
    pub zone_width: f64,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid: Arc<RadialGrid>,
    pub dt: f64,
    pub mode: Mode,
    pub max_time: f64,
    /// Blow-up flag at sup|u| = factor · sup|u₀| (NaN/overflow always flags).
    pub blowup_sup_factor: f64,
    /// Snapshot cadence in steps.
    pub snapshot_every: usize,
    pub boundary_guard: Option<BoundaryGuard>,
}

impl SolverConfig {
    pub fn new(grid: Arc<RadialGrid>, dt: f64, mode: Mode, max_time: f64) -> Result<Self> {
        let cfg = Self {
            grid,
            dt,
            mode,
            max_time,
            blowup_sup_factor: 1e6,
            snapshot_every: 10,
            boundary_guard: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_cadence(mut self, every: usize) -> Self {
        self.snapshot_every = every.max(1);
        self
    }

    pub fn with_guard(mut self, guard: BoundaryGuard) -> Self {
        self.boundary_guard = Some(guard);
        self
    }

    pub fn cfl(&self) -> f64 {
        self.dt / self.grid.min_spacing()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::SolverConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if self.cfl() > 0.9 {
            return Err(Error::SolverConfig(format!(
                "CFL ratio dt/h = {:.3} exceeds 0.9",
                self.cfl()
            )));
        }
        if !(self.max_time >= 0.0) {
            return Err(Error::SolverConfig("max_time must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ReachedMaxTime,
    /// T₊ reported as an interval [last stable time, flag time].
    BlowUp { t_last_stable: f64, t_flagged: f64 },
    BoundaryContamination { t: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// ψ-form snapshots at cadence, strictly increasing times; snapshot 0 is
    /// the initial state, the last one the final stable state.
    pub snapshots: Vec<RadialState>,
    pub mode: Mode,
    pub dt: f64,
    pub termination: Termination,
    /// (t, sup_r |u|) per step.
    pub sup_u_log: Vec<(f64, f64)>,
    pub steps: usize,
}

impl Trajectory {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.snapshots[0].grid()
    }

    pub fn final_time(&self) -> f64 {
        self.snapshots.last().unwrap().time()
    }

    pub fn snapshot_nearest(&self, t: f64) -> &RadialState {
        self.snapshots
            .iter()
            .min_by(|a, b| {
                (a.time() - t)
                    .abs()
                    .partial_cmp(&(b.time() - t).abs())
                    .unwrap()
            })
            .unwrap()
    }

    /// Snapshot at time t in u-form.
    pub fn snapshot_u(&self, t: f64) -> Result<RadialState> {
        to_u(self.snapshot_nearest(t))
    }
}

struct Stepper<'a> {
    nodes: &'a [f64],
    mode: Mode,
    /// 1/(r_{i+1} − r_i) and 1/(r_{i+1} + r_i) per cell.
    inv_dr: Vec<f64>,
    inv_sr: Vec<f64>,
    /// 1/((r_{i+1} − r_{i-1})/2) per interior node.
    inv_cell: Vec<f64>,
    flux: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(grid: &'a RadialGrid, mode: Mode) -> Self {
        let nodes = grid.nodes();
        let inv_dr: Vec<f64> = nodes.windows(2).map(|w| 1.0 / (w[1] - w[0])).collect();
        let inv_sr: Vec<f64> = nodes.windows(2).map(|w| 1.0 / (w[1] + w[0])).collect();
        let inv_cell: Vec<f64> = (1..nodes.len() - 1)
            .map(|i| 2.0 / (nodes[i + 1] - nodes[i - 1]))
            .collect();
        Self {
            nodes,
            mode,
            inv_dr,
            inv_sr,
            inv_cell,
            flux: vec![0.0; nodes.len() - 1],
        }
    }

    /// ψ_tt at interior nodes; endpoints stay untouched (held).
    fn accel(&mut self, psi: &[f64], out: &mut [f64]) {
        let n = psi.len();
        for i in 0..n - 1 {
            // G_{i+1/2} = ψ' midpoint + (ψ/r) midpoint
            self.flux[i] = (psi[i + 1] - psi[i]) * self.inv_dr[i]
                + (psi[i + 1] + psi[i]) * self.inv_sr[i];
        }
        for i in 1..n - 1 {
            let mut a = (self.flux[i] - self.flux[i - 1]) * self.inv_cell[i - 1];
            if self.mode == Mode::Cubic {
                let r = self.nodes[i];
                a += psi[i] * psi[i] * psi[i] / (r * r);
            }
            out[i] = a;
        }
        out[0] = 0.0;
        out[n - 1] = 0.0;
    }
}

/// Evolve `initial` (u- or ψ-form) under `cfg`; `observer` sees every stored
/// snapshot (read-only, ψ-form).
pub fn evolve_with(
    initial: &RadialState,
    cfg: &SolverConfig,
    mut observer: impl FnMut(&RadialState),
) -> Result<Trajectory> {
    cfg.validate()?;
    if initial.grid().nodes() != cfg.grid.nodes() {
        return Err(Error::GridMismatch);
    }
    let start = match initial.form() {
        Formulation::Psi => initial.clone(),
        Formulation::U => to_psi(initial)?,
    };
    let grid = cfg.grid.clone();
    let nodes = grid.nodes();
    let n = nodes.len();
    let t0 = start.time();
    let dt = cfg.dt;
    let n_steps = (cfg.max_time / dt).round() as usize;

    let mut psi = start.pos().values().to_vec();
    let mut vel = start.vel().values().to_vec();
    psi[0] = 0.0;
    let bc_outer = psi[n - 1];

    let sup_u = |psi: &[f64]| -> f64 {
        let mut m = 0.0f64;
        for i in 1..n {
            m = m.max((psi[i] / nodes[i]).abs());
        }
        m
    };
    let sup0 = sup_u(&psi);
    let blow_thresh = if sup0 > 0.0 {
        cfg.blowup_sup_factor * sup0
    } else {
        cfg.blowup_sup_factor
    };

    // outer-zone reference content for the contamination monitor
    let guard_ref = cfg.boundary_guard.as_ref().map(|g| {
        let lo = (grid.r_max() - g.zone_width).max(0.0);
        (lo, zone_h_content(&grid, &psi, &vel, lo))
    });

    let make_state = |psi: &[f64], vel: &[f64], t: f64| -> RadialState {
        RadialState::new(
            RadialField::from_raw(grid.clone(), psi.to_vec(), Formulation::Psi),
            RadialField::from_raw(grid.clone(), vel.to_vec(), Formulation::Psi),
            t,
        )
        .expect("consistent state")
    };

    let mut snapshots = vec![make_state(&psi, &vel, t0)];
    observer(&snapshots[0]);
    let mut sup_u_log = vec![(t0, sup0)];
    let mut stepper = Stepper::new(&grid, cfg.mode);
    let mut acc = vec![0.0; n];
    let mut termination = Termination::ReachedMaxTime;
    let mut steps_done = 0;

    stepper.accel(&psi, &mut acc);
    'time: for k in 0..n_steps {
        // kick-drift-kick leapfrog; the initial half-kick is the Taylor
        // half-step start-up
        for i in 1..n - 1 {
            vel[i] += 0.5 * dt * acc[i];
            psi[i] += dt * vel[i];
        }
        psi[0] = 0.0;
        psi[n - 1] = bc_outer;
        stepper.accel(&psi, &mut acc);
        for i in 1..n - 1 {
            vel[i] += 0.5 * dt * acc[i];
        }
        steps_done = k + 1;
        let t = t0 + steps_done as f64 * dt;

        let s = sup_u(&psi);
        sup_u_log.push((t, s));
        if !s.is_finite() || s > blow_thresh {
            termination = Termination::BlowUp {
                t_last_stable: t - dt,
                t_flagged: t,
            };
            break 'time;
        }
        if let Some((lo, initial_content)) = guard_ref {
            let tol = cfg.boundary_guard.as_ref().unwrap().tol;
            if zone_h_content(&grid, &psi, &vel, lo) > initial_content + tol {
                termination = Termination::BoundaryContamination { t };
                snapshots.push(make_state(&psi, &vel, t));
                observer(snapshots.last().unwrap());
                break 'time;
            }
        }
        if steps_done % cfg.snapshot_every == 0 || steps_done == n_steps {
            snapshots.push(make_state(&psi, &vel, t));
            observer(snapshots.last().unwrap());
        }
    }

    if let Termination::BlowUp { .. } = termination {
        // keep the last stable stored snapshot; the flagged state is not stored
    }
    Ok(Trajectory {
        snapshots,
        mode: cfg.mode,
        dt,
        termination,
        sup_u_log,
        steps: steps_done,
    })
}

pub fn evolve(initial: &RadialState, cfg: &SolverConfig) -> Result<Trajectory> {
    evolve_with(initial, cfg, |_| {})
}

/// Crude ℋ-content of the zone [lo, R_max] in ψ variables (monitor only).
fn zone_h_content(grid: &RadialGrid, psi: &[f64], vel: &[f64], lo: f64) -> f64 {
    let nodes = grid.nodes();
    let mut acc = 0.0;
    for i in 1..nodes.len() - 1 {
        if nodes[i] < lo {
            continue;
        }
        let dr = 0.5 * (nodes[i + 1] - nodes[i - 1]);
        let pr = (psi[i + 1] - psi[i - 1]) / (nodes[i + 1] - nodes[i - 1]);
        let g = pr - psi[i] / nodes[i];
        acc += (g * g + vel[i] * vel[i]) * nodes[i] * dr;
    }
    acc
}

/// Exact ψ-form standing wave (cos(ωt)J₁(ωr), −ω sin(ωt)J₁(ωr)).
pub fn standing_wave_oracle(omega: f64, t: f64, grid: &Arc<RadialGrid>) -> Result<RadialState> {
    if !(omega > 0.0) {
        return Err(Error::SolverConfig(format!("omega must be positive, got {omega}")));
    }
    let (c, s) = ((omega * t).cos(), (omega * t).sin());
    let pos = RadialField::from_fn(grid.clone(), Formulation::Psi, |r| c * j1(omega * r))?;
    let vel = RadialField::from_fn(grid.clone(), Formulation::Psi, |r| {
        -omega * s * j1(omega * r)
    })?;
    RadialState::new(pos, vel, t)
}

#[derive(Debug, Clone)]
pub struct BlowupReport {
    pub t_last_stable: f64,
    pub t_flagged: f64,
    /// (t, sup|u|, ‖u‖²_{ℋ(r≤δ)}) per snapshot.
    pub growth_log: Vec<(f64, f64, f64)>,
}

/// Blow-up diagnosis from a trajectory: the flag interval if present, plus
/// the sup-norm and local-ℋ growth log. Absence is a valid result.
pub fn detect_blowup(tr: &Trajectory, local_radius: f64) -> Result<Option<BlowupReport>> {
    let mut growth_log = Vec::with_capacity(tr.snapshots.len());
    for snap in &tr.snapshots {
        let u = to_u(snap)?;
        let sup = u.pos().max_abs();
        let local = h_norm_sq(&u, 0.0, local_radius.min(tr.grid().r_max()))?;
        growth_log.push((snap.time(), sup, local));
    }
    match tr.termination {
        Termination::BlowUp {
            t_last_stable,
            t_flagged,
        } => Ok(Some(BlowupReport {
            t_last_stable,
            t_flagged,
            growth_log,
        })),
        _ => Ok(None),
    }
}

#[derive(Debug, Clone)]
pub struct StrichartzSeries {
    /// (t, accumulated S-norm up to t): (∫₀^t ‖u‖³_{L⁶} ds)^{1/3}.
    pub series: Vec<(f64, f64)>,
    pub total: f64,
}

/// Strichartz accumulator over the trajectory, with ‖u‖⁶_{L⁶} = ∫u⁶ r³dr.
pub fn strichartz_accumulator(tr: &Trajectory) -> Result<StrichartzSeries> {
    use crate::field::quadrature;
    let mut series = Vec::with_capacity(tr.snapshots.len());
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for snap in &tr.snapshots {
        let u = to_u(snap)?;
        let dens: Vec<f64> = u.pos().values().iter().map(|&x| x.powi(6)).collect();
        let f = RadialField::from_raw(u.grid().clone(), dens, Formulation::U);
        let l6_6 = quadrature(&f, 3, 0.0, u.grid().r_max())?;
        let integrand = l6_6.sqrt(); // ‖u‖³_{L⁶}
        if let Some((tp, gp)) = prev {
            acc += 0.5 * (integrand + gp) * (snap.time() - tp);
        }
        prev = Some((snap.time(), integrand));
        series.push((snap.time(), acc.powf(1.0 / 3.0)));
    }
    Ok(StrichartzSeries {
        total: series.last().map(|x| x.1).unwrap_or(0.0),
        series,
    })
}

#[derive(Debug, Clone)]
pub struct ScatteringReport {
    /// (t, ‖u(t) − v(t)‖_ℋ / ‖u(T_probe)‖_ℋ) over the probe window.
    pub mismatch: Vec<(f64, f64)>,
    pub max_mismatch: f64,
    /// Growth of the mismatch across the second half of the window.
    pub late_growth: f64,
    pub verdict: bool,
}

/// Linear-evolve u(T_probe) and measure ‖u(t) − v_L(t)‖_ℋ over the window.
/// Verdict "scattering-consistent" when the relative mismatch stays below
/// `tol_rel` and is essentially flat (non-increasing within slack) late in
/// the window.
pub fn scattering_detector(
    tr: &Trajectory,
    t_probe: f64,
    window: f64,
    tol_rel: f64,
) -> Result<ScatteringReport> {
    if tr.final_time() < t_probe + window - 1e-9 {
        return Err(Error::ShortTrajectory {
            need: 2,
            have: tr.snapshots.len(),
        });
    }
    let probe = tr.snapshot_nearest(t_probe).clone();
    let h0 = crate::field::h_norm_sq_psi(&probe, 0.0, tr.grid().r_max())?;
    if h0 == 0.0 {
        return Err(Error::ZeroField);
    }
    let lin_cfg = SolverConfig {
        grid: tr.grid().clone(),
        dt: tr.dt,
        mode: Mode::Linear,
        max_time: window,
        blowup_sup_factor: f64::INFINITY,
        snapshot_every: 1,
        boundary_guard: None,
    };
    let lin = evolve(&probe, &lin_cfg)?;
    let mut mismatch = Vec::new();
    for snap in &tr.snapshots {
        let t = snap.time();
        if t < probe.time() - 1e-9 || t > probe.time() + window + 1e-9 {
            continue;
        }
        let vl = lin.snapshot_nearest(t);
        if (vl.time() - t).abs() > tr.dt {
            continue;
        }
        let diff = snap.sub(vl)?;
        let m = (crate::field::h_norm_sq_psi(&diff, 0.0, tr.grid().r_max())? / h0).sqrt();
        mismatch.push((t, m));
    }
    let max_mismatch = mismatch.iter().fold(0.0f64, |m, x| m.max(x.1));
    let half = mismatch.len() / 2;
    let late_growth = if mismatch.len() >= 2 {
        mismatch.last().unwrap().1 - mismatch[half].1
    } else {
        0.0
    };
    let verdict = max_mismatch < tol_rel && late_growth < 0.5 * tol_rel;
    Ok(ScatteringReport {
        mismatch,
        max_mismatch,
        late_growth,
        verdict,
    })
}

/// Linear back-evolution by `duration` via time reversal: flip the velocity,
/// evolve forward, flip back.
pub fn linear_back_evolve(state: &RadialState, duration: f64, dt: f64) -> Result<RadialState> {
    let psi = match state.form() {
        Formulation::Psi => state.clone(),
        Formulation::U => to_psi(state)?,
    };
    let flipped = RadialState::new(
        psi.pos().clone(),
        RadialField::from_raw(
            psi.grid().clone(),
            psi.vel().values().iter().map(|v| -v).collect(),
            Formulation::Psi,
        ),
        0.0,
    )?;
    let cfg = SolverConfig {
        grid: psi.grid().clone(),
        dt,
        mode: Mode::Linear,
        max_time: duration,
        blowup_sup_factor: f64::INFINITY,
        snapshot_every: usize::MAX,
        boundary_guard: None,
    };
    let tr = evolve(&flipped, &cfg)?;
    let last = tr.snapshots.last().unwrap();
    RadialState::new(
        last.pos().clone(),
        RadialField::from_raw(
            last.grid().clone(),
            last.vel().values().iter().map(|v| -v).collect(),
            Formulation::Psi,
        ),
        state.time() - duration,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::h_norm_sq_psi;
    use crate::ground_state::{ground_state, GroundStateSpec};

    fn w_state(grid: &Arc<RadialGrid>, amp: f64) -> RadialState {
        let w = ground_state(GroundStateSpec::new(1.0, 1).unwrap(), grid);
        let vals: Vec<f64> = w.pos().values().iter().map(|&x| amp * x).collect();
        RadialState::new(
            RadialField::from_raw(grid.clone(), vals, Formulation::U),
            RadialField::zeros(grid.clone(), Formulation::U),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let grid = RadialGrid::uniform(10.0, 500).unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.009, Mode::Cubic, 1.0).unwrap();
        let s = RadialState::zeros(grid, Formulation::U, 0.0);
        let tr = evolve(&s, &cfg).unwrap();
        assert_eq!(tr.termination, Termination::ReachedMaxTime);
        assert_eq!(tr.snapshots.last().unwrap().pos().max_abs(), 0.0);
    }

    #[test]
    fn cfl_violation_rejected_at_construction() {
        let grid = RadialGrid::uniform(10.0, 500).unwrap();
        assert!(SolverConfig::new(grid, 0.05, Mode::Cubic, 1.0).is_err());
    }

    #[test]
    fn static_ground_state_stays_put() {
        let grid = RadialGrid::uniform(20.0, 1000).unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.009, Mode::Cubic, 1.0).unwrap();
        let w = w_state(&grid, 1.0);
        let tr = evolve(&w, &cfg).unwrap();
        let w_psi = to_psi(&w).unwrap();
        let diff = tr.snapshots.last().unwrap().sub(&w_psi).unwrap();
        let dist = h_norm_sq_psi(&diff, 0.0, 20.0).unwrap().sqrt();
        // C·h² regime at h = 0.02
        assert!(dist < 1e-3, "ℋ-distance after t=1: {dist}");
    }

    #[test]
    fn linear_mode_matches_standing_wave_oracle() {
        let omega = 2.0;
        let grid = RadialGrid::uniform(12.0, 600).unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.009, Mode::Linear, 1.5).unwrap();
        let init = standing_wave_oracle(omega, 0.0, &grid).unwrap();
        // quarter period from t=0: position ≈ 0
        assert_eq!(init.vel().max_abs(), 0.0);
        assert_eq!(init.pos().values()[0], 0.0);
        let tr = evolve(&init, &cfg).unwrap();
        let t_end = tr.final_time();
        let exact = standing_wave_oracle(omega, t_end, &grid).unwrap();
        // compare on the region untouched by the held boundary: r ≤ R − t
        let diff = tr.snapshots.last().unwrap().sub(&exact).unwrap();
        let mut err2 = 0.0;
        let nodes = grid.nodes();
        for (i, &r) in nodes.iter().enumerate() {
            if r <= 12.0 - t_end - 0.5 && i > 0 {
                err2 += diff.pos().values()[i].powi(2) * r * 0.02;
            }
        }
        assert!(err2.sqrt() < 2e-3, "L2 error {}", err2.sqrt());
    }

    #[test]
    fn quarter_period_position_vanishes() {
        let omega = 2.0;
        let grid = RadialGrid::uniform(10.0, 400).unwrap();
        let s = standing_wave_oracle(omega, std::f64::consts::PI / (2.0 * omega), &grid).unwrap();
        assert!(s.pos().max_abs() < 1e-12);
    }

    #[test]
    fn supercritical_ground_state_blows_up_subcritical_does_not() {
        let grid = RadialGrid::uniform(15.0, 750).unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.009, Mode::Cubic, 8.0).unwrap();
        let tr_up = evolve(&w_state(&grid, 1.2), &cfg).unwrap();
        let rep = detect_blowup(&tr_up, 1.0).unwrap();
        let rep = rep.expect("1.2·W must blow up");
        assert!(rep.t_flagged < 8.0, "flagged at {}", rep.t_flagged);
        // growth log: sup|u| increases over the run
        let first = rep.growth_log.first().unwrap().1;
        let last = rep.growth_log.last().unwrap().1;
        assert!(last > 10.0 * first);

        let tr_low = evolve(&w_state(&grid, 0.8), &cfg).unwrap();
        assert!(detect_blowup(&tr_low, 1.0).unwrap().is_none());
        // zero data: no blow-up either
        let z = RadialState::zeros(grid.clone(), Formulation::U, 0.0);
        let tr_z = evolve(&z, &cfg).unwrap();
        assert!(detect_blowup(&tr_z, 1.0).unwrap().is_none());
    }

    #[test]
    fn strichartz_zero_and_static_w() {
        let grid = RadialGrid::uniform(30.0, 1500).unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.009, Mode::Cubic, 2.0)
            .unwrap()
            .with_cadence(5);
        let z = RadialState::zeros(grid.clone(), Formulation::U, 0.0);
        let s = strichartz_accumulator(&evolve(&z, &cfg).unwrap()).unwrap();
        assert_eq!(s.total, 0.0);

        // static W on [0,T]: accumulator = (T·‖W‖³_{L⁶})^{1/3},
        // ‖W‖⁶_{L⁶} = 8/5 by the Beta oracle
        let tr = evolve(&w_state(&grid, 1.0), &cfg).unwrap();
        let s = strichartz_accumulator(&tr).unwrap();
        let expect = (2.0f64 * (8.0f64 / 5.0).sqrt()).powf(1.0 / 3.0);
        assert!(
            (s.total - expect).abs() < 0.01 * expect,
            "S-norm {}, want {expect}",
            s.total
        );
    }

    #[test]
    fn linear_trajectory_scatters_to_itself() {
        let grid = RadialGrid::uniform(20.0, 800).unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.01, Mode::Linear, 6.0)
            .unwrap()
            .with_cadence(25);
        let init = standing_wave_oracle(1.0, 0.0, &grid).unwrap();
        let tr = evolve(&init, &cfg).unwrap();
        let rep = scattering_detector(&tr, 2.0, 3.0, 0.05).unwrap();
        assert!(rep.verdict, "max mismatch {}", rep.max_mismatch);
        assert!(rep.max_mismatch < 1e-10);
    }

    #[test]
    fn time_reversal_returns_initial_data() {
        let grid = RadialGrid::uniform(15.0, 750).unwrap();
        let bump = RadialField::from_fn(grid.clone(), Formulation::U, |r| {
            0.3 * crate::corpus::bump(r, 4.0, 1.5)
        })
        .unwrap();
        let s = RadialState::new(bump, RadialField::zeros(grid.clone(), Formulation::U), 0.0)
            .unwrap();
        let fwd_cfg = SolverConfig::new(grid.clone(), 0.01, Mode::Cubic, 3.0).unwrap();
        let tr = evolve(&s, &fwd_cfg).unwrap();
        assert_eq!(tr.termination, Termination::ReachedMaxTime);
        let end = tr.snapshots.last().unwrap();
        // reverse: flip velocity and evolve the same duration
        let back = RadialState::new(
            end.pos().clone(),
            RadialField::from_raw(
                grid.clone(),
                end.vel().values().iter().map(|v| -v).collect(),
                Formulation::Psi,
            ),
            0.0,
        )
        .unwrap();
        let tr_back = evolve(&back, &fwd_cfg).unwrap();
        let got = tr_back.snapshots.last().unwrap();
        let orig = to_psi(&s).unwrap();
        let diff = got.sub(&orig).unwrap();
        // velocities are negated relative to the original; positions agree
        let pos_err = diff.pos().max_abs();
        assert!(pos_err < 1e-10, "leapfrog reversibility broken: {pos_err}");
    }

    #[test]
    fn finite_speed_of_propagation() {
        let grid = RadialGrid::uniform(25.0, 1250).unwrap();
        let bump = RadialField::from_fn(grid.clone(), Formulation::U, |r| {
            crate::corpus::bump(r, 3.0, 2.0)
        })
        .unwrap();
        let s = RadialState::new(bump, RadialField::zeros(grid.clone(), Formulation::U), 0.0)
            .unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.01, Mode::Cubic, 10.0).unwrap();
        let tr = evolve(&s, &cfg).unwrap();
        let end = to_u(tr.snapshots.last().unwrap()).unwrap();
        // support radius 5 grows to ≤ 5 + t + 2h
        let outside = h_norm_sq(&end, 5.0 + 10.0 + 2.0 * 0.02, 25.0).unwrap();
        let total = h_norm_sq(&end, 0.0, 25.0).unwrap();
        assert!(
            outside < 1e-10 * total,
            "energy beyond the cone: {outside} of {total}"
        );
    }

    #[test]
    fn boundary_guard_flags_contamination() {
        let grid = RadialGrid::uniform(10.0, 500).unwrap();
        let bump = RadialField::from_fn(grid.clone(), Formulation::U, |r| {
            crate::corpus::bump(r, 3.0, 1.5)
        })
        .unwrap();
        let s = RadialState::new(bump, RadialField::zeros(grid.clone(), Formulation::U), 0.0)
            .unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.009, Mode::Linear, 20.0)
            .unwrap()
            .with_guard(BoundaryGuard {
                zone_width: 1.0,
                tol: 1e-6,
            });
        let tr = evolve(&s, &cfg).unwrap();
        match tr.termination {
            Termination::BoundaryContamination { t } => {
                // front from support edge 4.5 reaches the zone at ≈ 4.5
                assert!(t > 3.0 && t < 7.0, "contamination at t={t}");
            }
            other => panic!("expected contamination, got {other:?}"),
        }
    }

    #[test]
    fn back_evolution_inverts_forward_evolution() {
        let grid = RadialGrid::uniform(15.0, 600).unwrap();
        let init = standing_wave_oracle(1.5, 0.0, &grid).unwrap();
        let cfg = SolverConfig::new(grid.clone(), 0.02, Mode::Linear, 2.0).unwrap();
        let tr = evolve(&init, &cfg).unwrap();
        let end = tr.snapshots.last().unwrap();
        let back = linear_back_evolve(end, 2.0, 0.02).unwrap();
        let diff = back.sub(&init.clone().with_time(back.time())).unwrap();
        assert!(diff.pos().max_abs() < 1e-10);
        assert!(diff.vel().max_abs() < 1e-10);
    }
}
