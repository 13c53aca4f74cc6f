//! Radial fields and states in the u- and ψ-formulations.
//!
//! The 2d reduction substitutes ψ(t,r) = r·u(t,r); u is regular at the
//! origin, so ψ-form fields vanish at r = 0 exactly. A state is a pair
//! (field, time-derivative field) tagged with its time.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    U,
    Psi,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::U => "u",
            Formulation::Psi => "psi",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    form: Formulation,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, form: Formulation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "sample count {} does not match grid node count {}",
                values.len(),
                grid.len()
            )));
        }
        if form == Formulation::Psi && values[0] != 0.0 {
            return Err(Error::InvalidField(format!(
                "psi-form field must vanish at r = 0, got {}",
                values[0]
            )));
        }
        Ok(Self { grid, values, form })
    }

    /// Internal constructor for derived diagnostic fields (derivatives,
    /// residuals) that are not subject to the origin constraint.
    pub(crate) fn from_raw(grid: Arc<RadialGrid>, values: Vec<f64>, form: Formulation) -> Self {
        Self { grid, values, form }
    }

    pub fn from_fn(
        grid: Arc<RadialGrid>,
        form: Formulation,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, form)
    }

    pub fn zeros(grid: Arc<RadialGrid>, form: Formulation) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            form,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn form(&self) -> Formulation {
        self.form
    }

    pub fn require_form(&self, form: Formulation) -> Result<()> {
        if self.form != form {
            return Err(Error::Formulation {
                expected: form.name(),
                got: self.form.name(),
            });
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Piecewise-cubic Lagrange interpolation; exact at nodes.
    pub fn interpolate(&self, r: f64) -> Result<f64> {
        let nodes = self.grid.nodes();
        let i = self.grid.cell_of(r)?;
        if nodes[i] == r {
            return Ok(self.values[i]);
        }
        // choose 4 nodes bracketing the cell, clamped at the ends
        let n = nodes.len();
        let lo = i.saturating_sub(1).min(n - 4);
        let (xs, ys) = (&nodes[lo..lo + 4], &self.values[lo..lo + 4]);
        let mut acc = 0.0;
        for j in 0..4 {
            let mut l = ys[j];
            for k in 0..4 {
                if k != j {
                    l *= (r - xs[k]) / (xs[j] - xs[k]);
                }
            }
            acc += l;
        }
        Ok(acc)
    }

    /// Finite-difference derivative: 4th-order centered interior on uniform
    /// grids (3-point non-uniform stencils otherwise), one-sided 2nd-order at
    /// the ends. Declared order >= 2.
    pub fn derivative(&self) -> RadialField {
        let nodes = self.grid.nodes();
        let v = &self.values;
        let n = v.len();
        let mut d = vec![0.0; n];
        if let Some(h) = self.grid.uniform_h() {
            for i in 2..n - 2 {
                d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
            }
            d[1] = (v[2] - v[0]) / (2.0 * h);
            d[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
            d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
            d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        } else {
            // 3-point Lagrange differentiation on non-uniform spacing
            for i in 1..n - 1 {
                let (x0, x1, x2) = (nodes[i - 1], nodes[i], nodes[i + 1]);
                let (y0, y1, y2) = (v[i - 1], v[i], v[i + 1]);
                d[i] = y0 * (x1 - x2) / ((x0 - x1) * (x0 - x2))
                    + y1 * (2.0 * x1 - x0 - x2) / ((x1 - x0) * (x1 - x2))
                    + y2 * (x1 - x0) / ((x2 - x0) * (x2 - x1));
            }
            d[0] = end_deriv(nodes[0], nodes[1], nodes[2], v[0], v[1], v[2]);
            d[n - 1] = end_deriv(
                nodes[n - 1],
                nodes[n - 2],
                nodes[n - 3],
                v[n - 1],
                v[n - 2],
                v[n - 3],
            );
        }
        RadialField::from_raw(self.grid.clone(), d, self.form)
    }
}

/// Derivative at x of the quadratic through (x, y), (x1, y1), (x2, y2).
fn end_deriv(x: f64, x1: f64, x2: f64, y: f64, y1: f64, y2: f64) -> f64 {
    y * (2.0 * x - x1 - x2) / ((x - x1) * (x - x2))
        + y1 * (x - x2) / ((x1 - x) * (x1 - x2))
        + y2 * (x - x1) / ((x2 - x) * (x2 - x1))
}

/// Trapezoid approximation of ∫_a^b f(r) r^w dr over the clipped band;
/// band endpoints off the nodes are handled by cubic interpolation.
pub fn quadrature(f: &RadialField, w: i32, a: f64, b: f64) -> Result<f64> {
    let r_max = f.grid().r_max();
    if !(0.0 <= a && a <= b && b <= r_max) {
        return Err(Error::BandOutsideGrid { lo: a, hi: b, r_max });
    }
    if a == b {
        return Ok(0.0);
    }
    let nodes = f.grid().nodes();
    let vals = f.values();
    let weight = |r: f64, v: f64| -> f64 {
        if w >= 0 {
            v * r.powi(w)
        } else if r == 0.0 {
            0.0
        } else {
            v * r.powi(w)
        }
    };

    let i0 = nodes.partition_point(|&x| x < a);
    let i1 = nodes.partition_point(|&x| x <= b);
    // sample points: a, interior nodes in (a, b), b
    let mut acc = 0.0;
    let mut prev_r = a;
    let mut prev_g = weight(a, f.interpolate(a)?);
    for i in i0..i1 {
        let (r, g) = (nodes[i], weight(nodes[i], vals[i]));
        acc += 0.5 * (g + prev_g) * (r - prev_r);
        prev_r = r;
        prev_g = g;
    }
    if prev_r < b {
        let g = weight(b, f.interpolate(b)?);
        acc += 0.5 * (g + prev_g) * (b - prev_r);
    }
    Ok(acc)
}

/// Time-stamped pair (field, time-derivative field); both share one grid
/// and one formulation.
#[derive(Debug, Clone)]
pub struct RadialState {
    pos: RadialField,
    vel: RadialField,
    time: f64,
}

impl RadialState {
    pub fn new(pos: RadialField, vel: RadialField, time: f64) -> Result<Self> {
        if !Arc::ptr_eq(pos.grid(), vel.grid()) && pos.grid().nodes() != vel.grid().nodes() {
            return Err(Error::GridMismatch);
        }
        if pos.form() != vel.form() {
            return Err(Error::Formulation {
                expected: pos.form().name(),
                got: vel.form().name(),
            });
        }
        Ok(Self { pos, vel, time })
    }

    pub fn zeros(grid: Arc<RadialGrid>, form: Formulation, time: f64) -> Self {
        Self {
            pos: RadialField::zeros(grid.clone(), form),
            vel: RadialField::zeros(grid, form),
            time,
        }
    }

    pub fn pos(&self) -> &RadialField {
        &self.pos
    }

    pub fn vel(&self) -> &RadialField {
        &self.vel
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.pos.grid()
    }

    pub fn form(&self) -> Formulation {
        self.pos.form()
    }

    pub fn require_form(&self, form: Formulation) -> Result<()> {
        self.pos.require_form(form)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Pointwise difference (self - other), keeping self's time stamp.
    pub fn sub(&self, other: &RadialState) -> Result<RadialState> {
        if self.grid().nodes() != other.grid().nodes() {
            return Err(Error::GridMismatch);
        }
        if self.form() != other.form() {
            return Err(Error::Formulation {
                expected: self.form().name(),
                got: other.form().name(),
            });
        }
        let p = self
            .pos
            .values()
            .iter()
            .zip(other.pos.values())
            .map(|(a, b)| a - b)
            .collect();
        let v = self
            .vel
            .values()
            .iter()
            .zip(other.vel.values())
            .map(|(a, b)| a - b)
            .collect();
        Ok(RadialState {
            pos: RadialField::from_raw(self.grid().clone(), p, self.form()),
            vel: RadialField::from_raw(self.grid().clone(), v, self.form()),
            time: self.time,
        })
    }
}

/// ψ = r·u, ψ_t = r·u_t pointwise.
pub fn to_psi(s: &RadialState) -> Result<RadialState> {
    s.require_form(Formulation::U)?;
    let nodes = s.grid().nodes();
    let map = |f: &RadialField| {
        let v = nodes
            .iter()
            .zip(f.values())
            .map(|(&r, &u)| r * u)
            .collect();
        RadialField::from_raw(s.grid().clone(), v, Formulation::Psi)
    };
    RadialState::new(map(&s.pos), map(&s.vel), s.time)
}

/// u = ψ/r; the r = 0 value comes from quadratic extrapolation of ψ/r
/// through the three nearest interior nodes (u is C² at the origin).
pub fn to_u(s: &RadialState) -> Result<RadialState> {
    s.require_form(Formulation::Psi)?;
    let nodes = s.grid().nodes();
    let map = |f: &RadialField| {
        let mut v: Vec<f64> = nodes
            .iter()
            .zip(f.values())
            .map(|(&r, &p)| if r == 0.0 { 0.0 } else { p / r })
            .collect();
        v[0] = extrapolate_origin(&nodes[1..4], &v[1..4]);
        RadialField::from_raw(s.grid().clone(), v, Formulation::U)
    };
    RadialState::new(map(&s.pos), map(&s.vel), s.time)
}

/// Value at r = 0 of the quadratic through three (r_i, y_i) samples.
fn extrapolate_origin(xs: &[f64], ys: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..3 {
        let mut l = ys[j];
        for k in 0..3 {
            if k != j {
                l *= (0.0 - xs[k]) / (xs[j] - xs[k]);
            }
        }
        acc += l;
    }
    acc
}

/// Localized energy-space norm ∫_a^b [u_t² + u_r²] r³ dr; the full ℋ-norm
/// when (a, b) = (0, R_max). Requires u-form.
pub fn h_norm_sq(s: &RadialState, a: f64, b: f64) -> Result<f64> {
    s.require_form(Formulation::U)?;
    let ur = s.pos().derivative();
    let ut = s.vel();
    let dens: Vec<f64> = ur
        .values()
        .iter()
        .zip(ut.values())
        .map(|(&d, &v)| d * d + v * v)
        .collect();
    let f = RadialField::from_raw(s.grid().clone(), dens, Formulation::U);
    quadrature(&f, 3, a, b)
}

/// ℋ-norm of a ψ-form state without converting through u at the origin:
/// ∫_a^b [ψ_t² + (ψ_r − ψ/r)²] r dr, identical to `h_norm_sq` in the
/// continuum since r·u_r = ψ_r − ψ/r.
pub fn h_norm_sq_psi(s: &RadialState, a: f64, b: f64) -> Result<f64> {
    s.require_form(Formulation::Psi)?;
    let nodes = s.grid().nodes();
    let pr = s.pos().derivative();
    let mut dens = vec![0.0; nodes.len()];
    for i in 1..nodes.len() {
        let r = nodes[i];
        let g = pr.values()[i] - s.pos().values()[i] / r;
        let v = s.vel().values()[i];
        dens[i] = (g * g + v * v) / (r * r);
    }
    // r = 0: ψ ~ u(0)·r, so ψ_r - ψ/r -> 0 and ψ_t/r -> u_t(0); the r³ weight
    // kills the node either way.
    let f = RadialField::from_raw(s.grid().clone(), dens, Formulation::U);
    quadrature(&f, 3, a, b)
}
