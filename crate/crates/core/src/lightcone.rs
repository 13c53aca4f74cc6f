//! Null-coordinate and cone diagnostics for ψ-form states:
//!
//!   e = ½(ψ_t² + ψ_r²) + F(ψ)/r²,  m = ψ_t ψ_r,
//!   L = −½ψ_t² + ½ψ_r² + F(ψ)/r² − (2/r) f(ψ) ψ_r,
//!   𝒜² = r(e+m),  ℬ² = r(e−m),  η = t + r,  ξ = t − r,
//!
//! with f(ψ) = ψ − ψ³ and F(ψ) = ½ψ²(1 − ψ²/2) in cubic mode (linear mode
//! replaces them by f = ψ, F = ψ²/2). The multiplier identities
//!
//!   ∂_t(½rψ_t² + ½rψ_r² + F/r) − ∂_r(rψ_tψ_r) = 0
//!   ∂_t(r²ψ_tψ_r) − ∂_r(½r²ψ_t² + ½r²ψ_r² − F) + rψ_t² = 0
//!
//! are checked as discrete residuals, and the local energy identity
//! ℰ(τ) = ℰ(ε) + Flux(τ,ε) balances the cone energy against the mantle flux.

use crate::error::{Error, Result};
use crate::evolution::{Mode, Trajectory};
use crate::field::{quadrature, to_u, Formulation, RadialField, RadialState};

pub fn f_of(mode: Mode, psi: f64) -> f64 {
    match mode {
        Mode::Cubic => psi - psi * psi * psi,
        Mode::Linear => psi,
    }
}

pub fn big_f_of(mode: Mode, psi: f64) -> f64 {
    match mode {
        Mode::Cubic => 0.5 * psi * psi * (1.0 - 0.5 * psi * psi),
        Mode::Linear => 0.5 * psi * psi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Blow-up cone r = T − t below the apex time T.
    Backward,
    /// Forward cone along constant ξ = t − r rays.
    Forward,
}

#[derive(Debug, Clone, Copy)]
pub struct ConeSpec {
    pub apex_time: f64,
    pub orientation: Orientation,
    /// Self-similar band parameter, 0 < λ < 1.
    pub lambda: f64,
    /// Band offset: R in [λt, t−R] for forward cones (ignored backward).
    pub offset: f64,
}

impl ConeSpec {
    pub fn backward(apex_time: f64, lambda: f64) -> Result<Self> {
        if !(0.0 < lambda && lambda < 1.0) {
            return Err(Error::ConeOutsideDomain(format!(
                "need 0 < λ < 1, got {lambda}"
            )));
        }
        Ok(Self {
            apex_time,
            orientation: Orientation::Backward,
            lambda,
            offset: 0.0,
        })
    }

    pub fn forward(lambda: f64, offset: f64) -> Result<Self> {
        if !(0.0 < lambda && lambda < 1.0) || offset < 0.0 {
            return Err(Error::ConeOutsideDomain(format!(
                "need 0 < λ < 1 and offset ≥ 0, got λ={lambda}, offset={offset}"
            )));
        }
        Ok(Self {
            apex_time: 0.0,
            orientation: Orientation::Forward,
            lambda,
            offset,
        })
    }
}

/// Per-node samples of e, m, L, 𝒜², ℬ² and the null coordinates at a fixed
/// time; the r = 0 node is excluded.
#[derive(Debug, Clone)]
pub struct NullFields {
    pub r: Vec<f64>,
    pub eta: Vec<f64>,
    pub xi: Vec<f64>,
    pub e: Vec<f64>,
    pub m: Vec<f64>,
    pub l: Vec<f64>,
    pub a_sq: Vec<f64>,
    pub b_sq: Vec<f64>,
}

pub fn null_fields(s: &RadialState, mode: Mode) -> Result<NullFields> {
    s.require_form(Formulation::Psi)?;
    let nodes = s.grid().nodes();
    let n = nodes.len();
    let pr = s.pos().derivative();
    let t = s.time();
    let mut out = NullFields {
        r: Vec::with_capacity(n - 1),
        eta: Vec::with_capacity(n - 1),
        xi: Vec::with_capacity(n - 1),
        e: Vec::with_capacity(n - 1),
        m: Vec::with_capacity(n - 1),
        l: Vec::with_capacity(n - 1),
        a_sq: Vec::with_capacity(n - 1),
        b_sq: Vec::with_capacity(n - 1),
    };
    for i in 1..n {
        let r = nodes[i];
        let psi = s.pos().values()[i];
        let pt = s.vel().values()[i];
        let prr = pr.values()[i];
        let ff = big_f_of(mode, psi);
        let e = 0.5 * (pt * pt + prr * prr) + ff / (r * r);
        let m = pt * prr;
        let l = -0.5 * pt * pt + 0.5 * prr * prr + ff / (r * r)
            - 2.0 / r * f_of(mode, psi) * prr;
        out.r.push(r);
        out.eta.push(t + r);
        out.xi.push(t - r);
        out.e.push(e);
        out.m.push(m);
        out.l.push(l);
        out.a_sq.push(r * (e + m));
        out.b_sq.push(r * (e - m));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct PointwiseBoundReport {
    pub checked_nodes: usize,
    pub skipped_nodes: usize,
    /// min over nodes of ψ² − f(ψ)².
    pub f2_le_psi2_margin: f64,
    /// min over nodes of 4F(ψ) − ψ².
    pub psi2_le_4f_margin: f64,
    /// max |𝒜²ℬ²/r² − ¼(ψ_r²−ψ_t²)² − F²/r⁴ − F(ψ_t²+ψ_r²)/r²|, relative.
    pub factorization_max_err: f64,
    /// max of L²·r²/(𝒜²ℬ²) over checked nodes.
    pub l_sq_ratio_max: f64,
    /// L² ≤ C_L·𝒜²ℬ²/r² with the calibrated C_L.
    pub l_bound_holds: bool,
    pub pass: bool,
}

/// Nodewise checks of the sub-threshold bound chain on |ψ|² ≤ ½ nodes in
/// [r_lo, r_hi]; nodes above threshold are skipped and counted.
pub fn pointwise_bound_check(
    s: &RadialState,
    r_lo: f64,
    r_hi: f64,
    c_l: f64,
    mode: Mode,
) -> Result<PointwiseBoundReport> {
    s.require_form(Formulation::Psi)?;
    let nf = null_fields(s, mode)?;
    let nodes = s.grid().nodes();
    let pr = s.pos().derivative();
    let mut rep = PointwiseBoundReport {
        checked_nodes: 0,
        skipped_nodes: 0,
        f2_le_psi2_margin: f64::INFINITY,
        psi2_le_4f_margin: f64::INFINITY,
        factorization_max_err: 0.0,
        l_sq_ratio_max: 0.0,
        l_bound_holds: true,
        pass: true,
    };
    for i in 1..nodes.len() {
        let r = nodes[i];
        if r < r_lo || r > r_hi {
            continue;
        }
        let psi = s.pos().values()[i];
        if psi * psi > 0.5 {
            rep.skipped_nodes += 1;
            continue;
        }
        rep.checked_nodes += 1;
        let (pt, prr) = (s.vel().values()[i], pr.values()[i]);
        let ff = big_f_of(mode, psi);
        let fv = f_of(mode, psi);
        rep.f2_le_psi2_margin = rep.f2_le_psi2_margin.min(psi * psi - fv * fv);
        rep.psi2_le_4f_margin = rep.psi2_le_4f_margin.min(4.0 * ff - psi * psi);
        let j = i - 1; // null-field index
        let lhs = nf.a_sq[j] * nf.b_sq[j] / (r * r);
        // (e+m)(e−m) expanded; the F(ψ_t²+ψ_r²) cross term carries 1/r²
        let rhs = 0.25 * (prr * prr - pt * pt).powi(2)
            + ff * ff / r.powi(4)
            + ff * (pt * pt + prr * prr) / (r * r);
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        rep.factorization_max_err = rep.factorization_max_err.max((lhs - rhs).abs() / scale);
        if lhs > 1e-300 {
            rep.l_sq_ratio_max = rep.l_sq_ratio_max.max(nf.l[j] * nf.l[j] / lhs);
        }
    }
    if rep.checked_nodes == 0 {
        rep.f2_le_psi2_margin = 0.0;
        rep.psi2_le_4f_margin = 0.0;
    }
    rep.l_bound_holds = rep.l_sq_ratio_max <= c_l;
    rep.pass = rep.f2_le_psi2_margin >= -1e-12
        && rep.psi2_le_4f_margin >= -1e-12
        && rep.factorization_max_err < 1e-12
        && rep.l_bound_holds;
    Ok(rep)
}

#[derive(Debug, Clone, Copy)]
pub struct SlabResidual {
    pub t: f64,
    /// Normalized L¹ norm (mean |residual| over the band) of (en id).
    pub en_id: f64,
    /// Same for (psi t id).
    pub psi_t_id: f64,
}

/// Discrete residuals of the two multiplier identities on snapshot triples,
/// with 4th-order spatial differencing (diagnostic only) and centered time
/// differences at the snapshot spacing. Uniform grids only.
pub fn multiplier_residuals(
    tr: &Trajectory,
    band_lo: f64,
    band_hi: f64,
) -> Result<Vec<SlabResidual>> {
    if tr.snapshots.len() < 3 {
        return Err(Error::ShortTrajectory {
            need: 3,
            have: tr.snapshots.len(),
        });
    }
    let grid = tr.grid();
    let h = grid.uniform_h().ok_or(Error::NonUniformGrid)?;
    let nodes = grid.nodes();
    let n = nodes.len();
    let mode = tr.mode;

    let d4 = |v: &[f64]| -> Vec<f64> {
        let mut d = vec![0.0; n];
        for i in 2..n - 2 {
            d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
        }
        d[1] = (v[2] - v[0]) / (2.0 * h);
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        d[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
        d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        d
    };

    // densities entering the two identities at one snapshot
    let q1 = |s: &RadialState| -> Vec<f64> {
        let pr = d4(s.pos().values());
        (0..n)
            .map(|i| {
                let r = nodes[i];
                let pt = s.vel().values()[i];
                let base = 0.5 * r * (pt * pt + pr[i] * pr[i]);
                if i == 0 {
                    base
                } else {
                    base + big_f_of(mode, s.pos().values()[i]) / r
                }
            })
            .collect()
    };
    let q2 = |s: &RadialState| -> Vec<f64> {
        let pr = d4(s.pos().values());
        (0..n)
            .map(|i| nodes[i] * nodes[i] * s.vel().values()[i] * pr[i])
            .collect()
    };

    let mut out = Vec::new();
    for w in tr.snapshots.windows(3) {
        let (sm, sc, sp) = (&w[0], &w[1], &w[2]);
        let dt1 = sc.time() - sm.time();
        let dt2 = sp.time() - sc.time();
        if (dt1 - dt2).abs() > 1e-9 * dt1 {
            continue; // uneven cadence near termination
        }
        let two_dt = dt1 + dt2;
        let (q1m, q1p) = (q1(sm), q1(sp));
        let (q2m, q2p) = (q2(sm), q2(sp));
        let prc = d4(sc.pos().values());
        let flux1: Vec<f64> = (0..n)
            .map(|i| nodes[i] * sc.vel().values()[i] * prc[i])
            .collect();
        let flux2: Vec<f64> = (0..n)
            .map(|i| {
                let r = nodes[i];
                let pt = sc.vel().values()[i];
                0.5 * r * r * (pt * pt + prc[i] * prc[i]) - big_f_of(mode, sc.pos().values()[i])
            })
            .collect();
        let dflux1 = d4(&flux1);
        let dflux2 = d4(&flux2);

        let mut acc1 = 0.0;
        let mut acc2 = 0.0;
        let mut len = 0.0;
        for i in 2..n - 2 {
            let r = nodes[i];
            if r < band_lo || r > band_hi {
                continue;
            }
            let r1 = (q1p[i] - q1m[i]) / two_dt - dflux1[i];
            let r2 = (q2p[i] - q2m[i]) / two_dt - dflux2[i]
                + r * sc.vel().values()[i] * sc.vel().values()[i];
            acc1 += r1.abs() * h;
            acc2 += r2.abs() * h;
            len += h;
        }
        if len == 0.0 {
            return Err(Error::BandOutsideGrid {
                lo: band_lo,
                hi: band_hi,
                r_max: grid.r_max(),
            });
        }
        out.push(SlabResidual {
            t: sc.time(),
            en_id: acc1 / len,
            psi_t_id: acc2 / len,
        });
    }
    if out.is_empty() {
        return Err(Error::ShortTrajectory {
            need: 3,
            have: tr.snapshots.len(),
        });
    }
    Ok(out)
}

/// Cone-localized 2d energy ℰ = ∫_0^radius [½(ψ_t² + ψ_r²) + F(ψ)/r²] r dr.
pub fn cone_energy(s: &RadialState, radius: f64, mode: Mode) -> Result<f64> {
    s.require_form(Formulation::Psi)?;
    let nodes = s.grid().nodes();
    let pr = s.pos().derivative();
    let dens: Vec<f64> = (0..nodes.len())
        .map(|i| {
            let r = nodes[i];
            let pt = s.vel().values()[i];
            let pd = pr.values()[i];
            if i == 0 {
                // ψ ~ u(0)r: the density [½(ψ_t²+ψ_r²) + F/r²] stays finite;
                // continue it from the first interior structure
                0.5 * (pt * pt + pd * pd)
            } else {
                0.5 * (pt * pt + pd * pd) + big_f_of(mode, s.pos().values()[i]) / (r * r)
            }
        })
        .collect();
    let f = RadialField::from_raw(s.grid().clone(), dens, Formulation::U);
    quadrature(&f, 1, 0.0, radius.min(s.grid().r_max()))
}

/// Sample ψ, ψ_t, ψ_r along the cone at radius ℓ (time t = T − ℓ backward,
/// t = ξ₀ + ℓ forward), cubic in r and linear in t between snapshots.
fn sample_on_cone(
    tr: &Trajectory,
    t: f64,
    r: f64,
) -> Result<(f64, f64, f64)> {
    let snaps = &tr.snapshots;
    if t < snaps[0].time() - 1e-9 || t > tr.final_time() + 1e-9 {
        return Err(Error::ConeOutsideDomain(format!(
            "time {t} outside [{}, {}]",
            snaps[0].time(),
            tr.final_time()
        )));
    }
    let idx = snaps.partition_point(|s| s.time() <= t).saturating_sub(1);
    let (s0, s1) = if idx + 1 < snaps.len() {
        (&snaps[idx], &snaps[idx + 1])
    } else {
        (&snaps[idx - 1], &snaps[idx])
    };
    let w = ((t - s0.time()) / (s1.time() - s0.time())).clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| a + w * (b - a);
    let psi = lerp(s0.pos().interpolate(r)?, s1.pos().interpolate(r)?);
    let pt = lerp(s0.vel().interpolate(r)?, s1.vel().interpolate(r)?);
    let pr0 = s0.pos().derivative().interpolate(r)?;
    let pr1 = s1.pos().derivative().interpolate(r)?;
    Ok((psi, pt, lerp(pr0, pr1)))
}

/// Mantle flux between cone radii ℓ₀ < ℓ₁:
///   Flux = c₀·√2·∫ [½ℓ(χ′)² + F(χ)/ℓ] dℓ,
/// χ(ℓ) = ψ on the cone; with c₀ = 1/√2 the discrete local energy identity
/// ℰ(τ) = ℰ(ε) + Flux balances to O(h²). Backward cones sample r = T − t,
/// forward cones integrate 𝒜² along the constant-ξ ray (truncated at the
/// last snapshot).
pub fn flux_on_cone(
    tr: &Trajectory,
    cone: &ConeSpec,
    l0: f64,
    l1: f64,
    c0: f64,
) -> Result<f64> {
    if !(l0 < l1) {
        return Err(Error::ConeOutsideDomain(format!("need ℓ₀ < ℓ₁, got [{l0}, {l1}]")));
    }
    let h = tr.grid().max_spacing();
    let n_sub = (((l1 - l0) / (0.5 * h)).ceil() as usize).max(2);
    let dl = (l1 - l0) / n_sub as f64;
    let mode = tr.mode;
    match cone.orientation {
        Orientation::Backward => {
            let mut acc = 0.0;
            for k in 0..=n_sub {
                let l = l0 + k as f64 * dl;
                let t = cone.apex_time - l;
                if l <= 0.0 {
                    return Err(Error::ConeOutsideDomain("cone radius ≤ 0".into()));
                }
                let (psi, pt, prr) = sample_on_cone(tr, t, l)?;
                // χ′(ℓ) = ψ_r − ψ_t along r = T − t
                let chi_p = prr - pt;
                let dens = 0.5 * l * chi_p * chi_p + big_f_of(mode, psi) / l;
                let w = if k == 0 || k == n_sub { 0.5 } else { 1.0 };
                acc += w * dens * dl;
            }
            Ok(c0 * std::f64::consts::SQRT_2 * acc)
        }
        Orientation::Forward => {
            // Flux(η₀, ξ₀) = ∫_{η₀}^{η_max} 𝒜²(η, ξ₀) dη on the ray ξ = ξ₀,
            // with ℓ-interval interpreted as the η-interval.
            let xi0 = cone.offset;
            let mut acc = 0.0;
            for k in 0..=n_sub {
                let eta = l0 + k as f64 * dl;
                let t = 0.5 * (eta + xi0);
                let r = 0.5 * (eta - xi0);
                if r <= 0.0 {
                    return Err(Error::ConeOutsideDomain("ray leaves r > 0".into()));
                }
                let (psi, pt, prr) = sample_on_cone(tr, t, r)?;
                let a_sq = 0.5 * r * (pt + prr) * (pt + prr) + big_f_of(mode, psi) / r;
                let w = if k == 0 || k == n_sub { 0.5 } else { 1.0 };
                // dη = 2dt along the ray; the η-parametrized density already
                // absorbs the Jacobian
                acc += w * a_sq * dl * 0.5;
            }
            Ok(acc)
        }
    }
}

/// Three-term band energy ∫_band [u_t² + u_r² + u²/r²] r³ dr at the state's
/// time; the band is [λ(T−t), T−t] backward or [λt, t−R] forward. A collapsed
/// band integrates to zero.
pub fn band_energy(s: &RadialState, cone: &ConeSpec) -> Result<f64> {
    let u = match s.form() {
        Formulation::U => s.clone(),
        Formulation::Psi => to_u(s)?,
    };
    let t = s.time();
    let (a, b) = match cone.orientation {
        Orientation::Backward => {
            let radius = cone.apex_time - t;
            if radius < 0.0 {
                return Err(Error::ConeOutsideDomain(format!(
                    "time {t} beyond apex {}",
                    cone.apex_time
                )));
            }
            (cone.lambda * radius, radius)
        }
        Orientation::Forward => (cone.lambda * t, t - cone.offset),
    };
    if b <= a {
        return Ok(0.0);
    }
    let nodes = u.grid().nodes();
    let ur = u.pos().derivative();
    let dens: Vec<f64> = (0..nodes.len())
        .map(|i| {
            let r = nodes[i];
            let (uv, utv, urv) = (
                u.pos().values()[i],
                u.vel().values()[i],
                ur.values()[i],
            );
            let hardy = if r == 0.0 { 0.0 } else { uv * uv / (r * r) };
            utv * utv + urv * urv + hardy
        })
        .collect();
    let f = RadialField::from_raw(u.grid().clone(), dens, Formulation::U);
    quadrature(&f, 3, a.max(0.0), b.min(u.grid().r_max()))
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    /// (t, ℰ(t)) at each usable snapshot.
    pub series: Vec<(f64, f64)>,
    /// |ψ| ≤ √2/2 held on the cone boundary throughout.
    pub hypothesis_ok: bool,
    /// Non-increase within tolerance, asserted only under the hypothesis.
    pub monotone: Option<bool>,
}

/// Cone-localized energy ℰ(t) = ∫₀^{T−t}[½(ψ_t²+ψ_r²)+F/r²] r dr per
/// snapshot; asserts non-increase when |ψ| ≤ √2/2 holds on the mantle.
pub fn monotonicity_probe(tr: &Trajectory, apex_time: f64, tol: f64) -> Result<MonotonicityReport> {
    let mut series = Vec::new();
    let mut hypothesis_ok = true;
    for snap in &tr.snapshots {
        let radius = apex_time - snap.time();
        if radius <= 0.0 || radius > tr.grid().r_max() {
            continue;
        }
        let boundary_psi = snap.pos().interpolate(radius)?;
        if boundary_psi.abs() > std::f64::consts::FRAC_1_SQRT_2 {
            hypothesis_ok = false;
        }
        series.push((snap.time(), cone_energy(snap, radius, tr.mode)?));
    }
    if series.len() < 2 {
        return Err(Error::ShortTrajectory {
            need: 2,
            have: series.len(),
        });
    }
    let monotone = hypothesis_ok.then(|| {
        series
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 + tol)
    });
    Ok(MonotonicityReport {
        series,
        hypothesis_ok,
        monotone,
    })
}
