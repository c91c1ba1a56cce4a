//! Log-spaced radial grids.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid radial range [{r_min}, {r_max}]")]
    InvalidRange { r_min: f64, r_max: f64 },
    #[error("points per decade must be positive, got {0}")]
    InvalidDensity(usize),
}

/// Strictly increasing nodes `r_i = r_min * exp(i * h)` with a constant ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    log_step: f64,
    points_per_decade: usize,
}

impl RadialGrid {
    /// Covers `[r_min, r_max]` with `points_per_decade` intervals per factor of ten.
    /// The interval count is rounded so both endpoints are nodes.
    pub fn log_spaced(r_min: f64, r_max: f64, points_per_decade: usize) -> Result<Self, GridError> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(GridError::InvalidRange { r_min, r_max });
        }
        if points_per_decade == 0 {
            return Err(GridError::InvalidDensity(points_per_decade));
        }
        let span = (r_max / r_min).ln();
        let intervals = ((span / std::f64::consts::LN_10) * points_per_decade as f64)
            .round()
            .max(1.0) as usize;
        let log_step = span / intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals)
            .map(|i| r_min * (i as f64 * log_step).exp())
            .collect();
        nodes[0] = r_min;
        nodes[intervals] = r_max;
        Ok(Self {
            nodes,
            log_step,
            points_per_decade,
        })
    }

    /// Grid with an exact log step `h` whose node set contains `anchor`, spanning at
    /// least `[r_min, r_max]`.
    pub fn anchored(anchor: f64, r_min: f64, r_max: f64, log_step: f64) -> Result<Self, GridError> {
        if !(r_min > 0.0 && r_max > r_min && anchor > 0.0 && log_step > 0.0) {
            return Err(GridError::InvalidRange { r_min, r_max });
        }
        let below = ((anchor / r_min).ln() / log_step).ceil().max(0.0) as usize;
        let above = ((r_max / anchor).ln() / log_step).ceil().max(1.0) as usize;
        let start = anchor * (-(below as f64) * log_step).exp();
        let nodes: Vec<f64> = (0..=below + above)
            .map(|i| {
                if i == below {
                    anchor
                } else {
                    start * (i as f64 * log_step).exp()
                }
            })
            .collect();
        let ppd = (std::f64::consts::LN_10 / log_step).round() as usize;
        Ok(Self {
            nodes,
            log_step,
            points_per_decade: ppd.max(1),
        })
    }

    /// Builds a grid directly from nodes already known to be log-uniform.
    pub(crate) fn from_nodes(nodes: Vec<f64>, log_step: f64, points_per_decade: usize) -> Self {
        Self {
            nodes,
            log_step,
            points_per_decade,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().expect("grid has nodes")
    }

    /// Step in `ln r`.
    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    pub fn points_per_decade(&self) -> usize {
        self.points_per_decade
    }

    /// Index of the last node with `r_i <= r`, clamped to the grid.
    pub fn locate(&self, r: f64) -> usize {
        if r <= self.r_min() {
            return 0;
        }
        let idx = ((r / self.r_min()).ln() / self.log_step).floor() as usize;
        let mut idx = idx.min(self.len() - 1);
        while idx > 0 && self.nodes[idx] > r {
            idx -= 1;
        }
        while idx + 1 < self.len() && self.nodes[idx + 1] <= r {
            idx += 1;
        }
        idx
    }

    /// Index of the node closest to `r` in log distance.
    pub fn nearest(&self, r: f64) -> usize {
        let i = self.locate(r);
        if i + 1 < self.len() && (self.nodes[i + 1] / r).ln() < (r / self.nodes[i]).ln() {
            i + 1
        } else {
            i
        }
    }

    /// The grid truncated to nodes `<= r_cut` (at least two nodes).
    pub fn truncated(&self, r_cut: f64) -> Self {
        let end = (self.locate(r_cut) + 1).max(2).min(self.len());
        Self::from_nodes(self.nodes[..end].to_vec(), self.log_step, self.points_per_decade)
    }

    /// Every other node; the coarse companion used for refinement studies.
    pub fn coarsened(&self) -> Self {
        let nodes: Vec<f64> = self.nodes.iter().step_by(2).copied().collect();
        Self::from_nodes(
            nodes,
            2.0 * self.log_step,
            (self.points_per_decade / 2).max(1),
        )
    }

    /// The grid `1/r` in increasing order.
    pub fn reflected(&self) -> Self {
        let nodes: Vec<f64> = self.nodes.iter().rev().map(|r| 1.0 / r).collect();
        Self::from_nodes(nodes, self.log_step, self.points_per_decade)
    }
}

/// Four-point Lagrange interpolation in `ln r` on values `f` sampled on `grid`.
/// Arguments outside the grid are not handled here.
pub(crate) fn interp_log_x(grid: &RadialGrid, f: &[f64], r: f64) -> f64 {
    let n = grid.len();
    if n < 4 {
        let i = grid.locate(r).min(n - 2);
        let s = (r / grid.nodes()[i]).ln() / grid.log_step();
        return f[i] * (1.0 - s) + f[i + 1] * s;
    }
    let i = grid.locate(r);
    let start = i.saturating_sub(1).min(n - 4);
    let x = (r / grid.nodes()[start]).ln() / grid.log_step();
    lagrange4(&f[start..start + 4], x)
}

/// Cubic Lagrange through unit-spaced samples at 0,1,2,3 evaluated at `x`.
pub(crate) fn lagrange4(f: &[f64], x: f64) -> f64 {
    let (x0, x1, x2, x3) = (x, x - 1.0, x - 2.0, x - 3.0);
    -f[0] * x1 * x2 * x3 / 6.0 + f[1] * x0 * x2 * x3 / 2.0 - f[2] * x0 * x1 * x3 / 2.0
        + f[3] * x0 * x1 * x2 / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_constant_ratio() {
        let g = RadialGrid::log_spaced(1e-6, 1e6, 64).unwrap();
        assert_eq!(g.r_min(), 1e-6);
        assert_eq!(g.r_max(), 1e6);
        assert_eq!(g.len(), 12 * 64 + 1);
        let q = g.nodes()[1] / g.nodes()[0];
        for w in g.nodes().windows(2) {
            assert!(((w[1] / w[0]) / q - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(RadialGrid::log_spaced(0.0, 1.0, 8).is_err());
        assert!(RadialGrid::log_spaced(2.0, 1.0, 8).is_err());
        assert!(RadialGrid::log_spaced(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn anchored_contains_anchor() {
        let g = RadialGrid::anchored(3.7, 1e-3, 40.0, 0.01).unwrap();
        let i = g.nearest(3.7);
        assert_eq!(g.nodes()[i], 3.7);
        assert!(g.r_min() <= 1e-3 && g.r_max() >= 40.0);
    }

    #[test]
    fn locate_brackets() {
        let g = RadialGrid::log_spaced(1e-2, 1e2, 10).unwrap();
        for &r in &[0.0123, 0.5, 1.0, 7.7, 99.0] {
            let i = g.locate(r);
            assert!(g.nodes()[i] <= r && r < g.nodes()[i + 1]);
        }
        assert_eq!(g.locate(1e-3), 0);
        assert_eq!(g.locate(1e3), g.len() - 1);
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics_in_log_r() {
        let g = RadialGrid::log_spaced(1e-2, 1e2, 8).unwrap();
        let p = |x: f64| 1.0 + 0.3 * x - 0.2 * x * x + 0.05 * x * x * x;
        let f: Vec<f64> = g.nodes().iter().map(|r| p(r.ln())).collect();
        for &r in &[0.013, 0.4, 3.3, 90.0] {
            assert!((interp_log_x(&g, &f, r) - p(r.ln())).abs() < 1e-10);
        }
    }
}
