//! Radial grids on [0, R_max].
//!
//! All volume integrals follow the convention ∫₀^∞ f(r) r³ dr with the
//! dimensional 2π² factor dropped; the quadrature helpers below integrate
//! f(r) r^w dr for a caller-chosen weight exponent w.

use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpacing {
    /// Uniform spacing h.
    Uniform { h: f64 },
    /// Node 0 at r = 0, then geometric nodes r_inner · g^k up to R_max.
    /// Used for static multi-scale states; the wave solver wants uniform grids.
    Graded { r_inner: f64, ratio: f64 },
}

/// Discretization of [0, R_max]; r_0 = 0 exactly, nodes strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    spacing: GridSpacing,
}

impl RadialGrid {
    /// Uniform grid with `n_cells` cells, nodes r_i = i·h, h = r_max/n_cells.
    pub fn uniform(r_max: f64, n_cells: usize) -> Result<Arc<Self>> {
        if !(r_max > 0.0) || n_cells < 8 {
            return Err(Error::InvalidGrid(format!(
                "need r_max > 0 and at least 8 cells, got r_max={r_max}, n_cells={n_cells}"
            )));
        }
        let h = r_max / n_cells as f64;
        let mut nodes: Vec<f64> = (0..=n_cells).map(|i| i as f64 * h).collect();
        // pin the endpoint so r_N = R_max holds exactly
        *nodes.last_mut().unwrap() = r_max;
        Ok(Arc::new(Self {
            nodes,
            spacing: GridSpacing::Uniform { h },
        }))
    }

    /// Graded grid clustered near the origin: node 0, then `n_cells` geometric
    /// nodes from `r_inner` to R_max. Resolves scales down to ~r_inner while
    /// still reaching a large R_max.
    pub fn graded(r_max: f64, r_inner: f64, n_cells: usize) -> Result<Arc<Self>> {
        if !(r_max > 0.0) || !(r_inner > 0.0) || r_inner >= r_max || n_cells < 8 {
            return Err(Error::InvalidGrid(format!(
                "need 0 < r_inner < r_max and at least 8 cells, got r_inner={r_inner}, r_max={r_max}"
            )));
        }
        let ratio = (r_max / r_inner).powf(1.0 / (n_cells - 1) as f64);
        let mut nodes = Vec::with_capacity(n_cells + 1);
        nodes.push(0.0);
        for k in 0..n_cells {
            nodes.push(r_inner * ratio.powi(k as i32));
        }
        *nodes.last_mut().unwrap() = r_max;
        Ok(Arc::new(Self {
            nodes,
            spacing: GridSpacing::Graded { r_inner, ratio },
        }))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn spacing(&self) -> &GridSpacing {
        &self.spacing
    }

    /// Spacing h for uniform grids, None otherwise.
    pub fn uniform_h(&self) -> Option<f64> {
        match self.spacing {
            GridSpacing::Uniform { h } => Some(h),
            GridSpacing::Graded { .. } => None,
        }
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Quadrature tolerance slack: 10·h² per unit band length, with h the
    /// coarsest spacing. Separates analytic failure from discretization noise
    /// when asserting inequalities.
    pub fn quad_slack(&self, band_len: f64) -> f64 {
        10.0 * self.max_spacing().powi(2) * band_len.max(1.0)
    }

    /// Index of the last node with r_i <= r (clamped to valid cells).
    pub fn cell_of(&self, r: f64) -> Result<usize> {
        if !(0.0..=self.r_max()).contains(&r) {
            return Err(Error::RadiusOutsideGrid {
                r,
                r_max: self.r_max(),
            });
        }
        let i = self.nodes.partition_point(|&x| x <= r);
        Ok(i.saturating_sub(1).min(self.nodes.len() - 2))
    }
}

/// Least-squares slope of ln(err) against ln(h): the measured convergence
/// order of a refinement family.
pub fn convergence_order(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(h, e) in samples {
        let (x, y) = (h.ln(), e.max(f64::MIN_POSITIVE).ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
