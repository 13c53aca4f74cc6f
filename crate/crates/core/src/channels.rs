//! Exterior-energy ("channel of energy") experiments for the free radial
//! wave in 4 space dimensions.
//!
//! Free waves with data (f, 0) keep a fixed fraction of their energy outside
//! the light cone, ‖S(t)(f,0)‖²_{ℋ(r≥|t|)} ≥ α₀²‖f‖²_{Ḣ¹}; the analogous
//! estimate for (0, g) data is false in d = 4. Both facts are probed here as
//! measured exterior-fraction series.

use crate::error::{Error, Result};
use crate::evolution::{evolve, Mode, SolverConfig, Trajectory};
use crate::field::{h_norm_sq_psi, to_psi, Formulation, RadialState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataClass {
    FZero,
    ZeroG,
    Mixed,
}

pub fn classify(data: &RadialState) -> DataClass {
    let p = data.pos().max_abs();
    let v = data.vel().max_abs();
    if v == 0.0 {
        DataClass::FZero
    } else if p == 0.0 {
        DataClass::ZeroG
    } else {
        DataClass::Mixed
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChannelSample {
    pub t: f64,
    pub exterior_h_sq: f64,
    pub total_h_sq: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone)]
pub struct ChannelReport {
    pub class: DataClass,
    pub series: Vec<ChannelSample>,
    /// Mean fraction over the last quarter of the run.
    pub asymptotic_fraction: f64,
    /// ‖f‖²_{Ḣ¹} for (f,0) data, the full ℋ-norm otherwise.
    pub denominator: f64,
    /// Time horizon actually measured (may stop early on contamination).
    pub horizon: f64,
}

/// Evolve linearly and record φ(t) = ‖S(t)data‖²_{ℋ(r≥t)}/denominator.
pub fn exterior_fraction_series(
    data: &RadialState,
    cfg: &SolverConfig,
) -> Result<ChannelReport> {
    if cfg.mode != Mode::Linear {
        return Err(Error::SolverConfig(
            "exterior fraction experiments run in linear mode".into(),
        ));
    }
    let class = classify(data);
    let psi0 = match data.form() {
        Formulation::Psi => data.clone(),
        Formulation::U => to_psi(data)?,
    };
    let denominator = h_norm_sq_psi(&psi0, 0.0, psi0.grid().r_max())?;
    if denominator == 0.0 {
        return Err(Error::ZeroField);
    }
    let tr = evolve(&psi0, cfg)?;
    let r_max = tr.grid().r_max();
    let mut series = Vec::with_capacity(tr.snapshots.len());
    for snap in &tr.snapshots {
        let t = snap.time().abs();
        if t >= r_max {
            break;
        }
        let exterior = h_norm_sq_psi(snap, t, r_max)?;
        let total = h_norm_sq_psi(snap, 0.0, r_max)?;
        series.push(ChannelSample {
            t: snap.time(),
            exterior_h_sq: exterior,
            total_h_sq: total,
            fraction: exterior / denominator,
        });
    }
    let horizon = series.last().map(|s| s.t).unwrap_or(0.0);
    let window_lo = 0.75 * horizon;
    let tail: Vec<f64> = series
        .iter()
        .filter(|s| s.t >= window_lo)
        .map(|s| s.fraction)
        .collect();
    let asymptotic_fraction = if tail.is_empty() {
        f64::NAN
    } else {
        tail.iter().sum::<f64>() / tail.len() as f64
    };
    Ok(ChannelReport {
        class,
        series,
        asymptotic_fraction,
        denominator,
        horizon,
    })
}

#[derive(Debug, Clone)]
pub struct FarConeReport {
    /// (T, max over late times of ‖∇_{t,x}v‖²_{L²(||x|−t| ≥ T)}).
    pub profile: Vec<(f64, f64)>,
    pub nonincreasing: bool,
    pub total_h_sq: f64,
}

/// limsup proxy for the vanishing of energy away from the forward light
/// cone: for each T in the ladder, the max over the last half of the run of
/// the ℋ-content on {| r − t | ≥ T}.
pub fn far_cone_vanishing(
    data: &RadialState,
    cfg: &SolverConfig,
    t_ladder: &[f64],
) -> Result<FarConeReport> {
    if cfg.mode != Mode::Linear {
        return Err(Error::SolverConfig("far-cone probe runs in linear mode".into()));
    }
    let psi0 = match data.form() {
        Formulation::Psi => data.clone(),
        Formulation::U => to_psi(data)?,
    };
    let total_h_sq = h_norm_sq_psi(&psi0, 0.0, psi0.grid().r_max())?;
    let tr = evolve(&psi0, cfg)?;
    let r_max = tr.grid().r_max();
    let t_half = 0.5 * tr.final_time();
    let mut profile = Vec::with_capacity(t_ladder.len());
    for &big_t in t_ladder {
        let mut worst = 0.0f64;
        for snap in &tr.snapshots {
            let t = snap.time();
            if t < t_half {
                continue;
            }
            let inner_hi = (t - big_t).max(0.0).min(r_max);
            let outer_lo = (t + big_t).min(r_max);
            let mut v = 0.0;
            if inner_hi > 0.0 {
                v += h_norm_sq_psi(snap, 0.0, inner_hi)?;
            }
            if outer_lo < r_max {
                v += h_norm_sq_psi(snap, outer_lo, r_max)?;
            }
            worst = worst.max(v);
        }
        profile.push((big_t, worst));
    }
    let nonincreasing = profile
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + 1e-12 * (1.0 + total_h_sq));
    Ok(FarConeReport {
        profile,
        nonincreasing,
        total_h_sq,
    })
}

#[derive(Debug, Clone)]
pub struct DecayFit {
    /// (t, sup_r |v(t,r)|) series.
    pub sup_series: Vec<(f64, f64)>,
    /// (t, sup_r |r·v(t,r)|) series.
    pub r_sup_series: Vec<(f64, f64)>,
    /// Fitted exponent p in sup|v| ~ C·t^p over the last decade of times.
    pub exponent: f64,
    /// Standard error of the fitted slope.
    pub stderr: f64,
}

/// Dispersive decay probe: fits the decay exponent of sup_r |v| over the
/// last decade of times (expect ≈ −3/2 for smooth compact data) and records
/// sup_r |r·v| → 0.
pub fn dispersive_decay_probe(data: &RadialState, cfg: &SolverConfig) -> Result<DecayFit> {
    if cfg.mode != Mode::Linear {
        return Err(Error::SolverConfig("decay probe runs in linear mode".into()));
    }
    let tr = evolve(data, cfg)?;
    decay_fit_from(&tr)
}

fn decay_fit_from(tr: &Trajectory) -> Result<DecayFit> {
    let nodes = tr.grid().nodes();
    let mut sup_series = Vec::new();
    let mut r_sup_series = Vec::new();
    for snap in &tr.snapshots {
        let t = snap.time();
        if t <= 0.0 {
            continue;
        }
        let mut sup_u = 0.0f64;
        let mut sup_ru = 0.0f64;
        for i in 1..nodes.len() {
            let u = (snap.pos().values()[i] / nodes[i]).abs();
            sup_u = sup_u.max(u);
            sup_ru = sup_ru.max(snap.pos().values()[i].abs());
        }
        sup_series.push((t, sup_u));
        r_sup_series.push((t, sup_ru));
    }
    let t_end = sup_series.last().map(|x| x.0).unwrap_or(0.0);
    let fit: Vec<(f64, f64)> = sup_series
        .iter()
        .filter(|&&(t, v)| t >= 0.1 * t_end && v > 0.0)
        .cloned()
        .collect();
    if fit.len() < 4 {
        return Err(Error::ShortTrajectory {
            need: 4,
            have: fit.len(),
        });
    }
    // least squares on (ln t, ln sup)
    let n = fit.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, v) in &fit {
        let (x, y) = (t.ln(), v.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mut ss_res = 0.0;
    for &(t, v) in &fit {
        let pred = intercept + slope * t.ln();
        ss_res += (v.ln() - pred).powi(2);
    }
    let stderr = if n > 2.0 {
        (ss_res / (n - 2.0) / (sxx - sx * sx / n)).sqrt()
    } else {
        f64::NAN
    };
    Ok(DecayFit {
        sup_series,
        r_sup_series,
        exponent: slope,
        stderr,
    })
}
