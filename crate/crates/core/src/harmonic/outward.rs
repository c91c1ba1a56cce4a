//! Outward continuation of the radial ODE in `x = ln r` with a fourth-order
//! Magnus integrator.

use super::{HarmonicError, PartialProfile};
use crate::grid::RadialGrid;
use crate::potential::PotentialSpec;

pub const OVERFLOW_LIMIT: f64 = 1e300;
pub const MAX_SUBSTEPS: usize = 1 << 20;

type Mat = [[f64; 2]; 2];

fn mul(a: &Mat, b: &Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `exp(M)` for a real 2x2 matrix via the traceless decomposition `M = τ/2 + K`,
/// `K^2 = δ I`.
pub(crate) fn expm2(m: &Mat) -> Mat {
    let half = 0.5 * (m[0][0] + m[1][1]);
    let k = [[m[0][0] - half, m[0][1]], [m[1][0], m[1][1] - half]];
    let delta = k[0][0] * k[0][0] + k[0][1] * k[1][0];
    let (c, s) = if delta.abs() < 1e-8 {
        (1.0 + delta / 2.0 + delta * delta / 24.0, 1.0 + delta / 6.0 + delta * delta / 120.0)
    } else if delta > 0.0 {
        let q = delta.sqrt();
        (q.cosh(), q.sinh() / q)
    } else {
        let q = (-delta).sqrt();
        (q.cos(), q.sin() / q)
    };
    let e = half.exp();
    [
        [e * (c + s * k[0][0]), e * s * k[0][1]],
        [e * s * k[1][0], e * (c + s * k[1][1])],
    ]
}

/// Generator of `(U, dU/dx)` for `U_xx + (N-2) U_x - r^2 V U = 0`, shifted by the
/// mode barrier `extra / r^2`.
pub(crate) struct RadialSystem<'a> {
    pub spec: &'a PotentialSpec,
    pub extra: f64,
}

impl RadialSystem<'_> {
    fn generator(&self, x: f64) -> Mat {
        let g = self.spec.r2v(x.exp()) + self.extra;
        [[0.0, 1.0], [g, -(self.spec.dimension as f64 - 2.0)]]
    }

    fn magnus_step(&self, x0: f64, h: f64, y: [f64; 2]) -> [f64; 2] {
        let d = 3f64.sqrt() / 6.0;
        let a1 = self.generator(x0 + (0.5 - d) * h);
        let a2 = self.generator(x0 + (0.5 + d) * h);
        let p = mul(&a2, &a1);
        let q = mul(&a1, &a2);
        let w = 3f64.sqrt() / 12.0 * h * h;
        let mut omega = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                omega[i][j] = 0.5 * h * (a1[i][j] + a2[i][j]) + w * (p[i][j] - q[i][j]);
            }
        }
        let e = expm2(&omega);
        [e[0][0] * y[0] + e[0][1] * y[1], e[1][0] * y[0] + e[1][1] * y[1]]
    }

    fn advance(&self, x0: f64, h: f64, y: [f64; 2], n: usize) -> [f64; 2] {
        let dh = h / n as f64;
        let mut s = y;
        for k in 0..n {
            s = self.magnus_step(x0 + k as f64 * dh, dh, s);
        }
        s
    }

    /// Integrates across `[x0, x0 + h]`, doubling the substep count until two
    /// successive resolutions agree to `tol`. Returns the state and substeps used.
    pub fn interval(&self, x0: f64, h: f64, y: [f64; 2], tol: f64) -> Result<([f64; 2], usize), HarmonicError> {
        let mut n = 1;
        let mut coarse = self.advance(x0, h, y, n);
        loop {
            let fine = self.advance(x0, h, y, 2 * n);
            let scale = fine[0].abs().max(fine[1].abs());
            let err = (fine[0] - coarse[0]).abs().max((fine[1] - coarse[1]).abs());
            if !(scale.is_finite()) || scale > OVERFLOW_LIMIT {
                return Err(HarmonicError::Overflow {
                    radius: (x0 + h).exp(),
                });
            }
            if err <= tol * scale {
                return Ok((fine, 2 * n));
            }
            n *= 2;
            if n > MAX_SUBSTEPS {
                return Err(HarmonicError::Stiffness { radius: x0.exp() });
            }
            coarse = fine;
        }
    }
}

/// Continues `partial` from its last node to `r_max` along the same log lattice.
pub fn extend_outward(
    partial: &PartialProfile,
    spec: &PotentialSpec,
    r_max: f64,
    tol: f64,
) -> Result<(RadialGrid, Vec<f64>, Vec<f64>, usize), HarmonicError> {
    let h = partial.grid.log_step();
    let r0 = partial.grid.r_min();
    let total = ((r_max / r0).ln() / h - 1e-9).ceil().max(1.0) as usize;
    let mut nodes: Vec<f64> = (0..=total).map(|i| r0 * (i as f64 * h).exp()).collect();
    nodes[..partial.grid.len()].copy_from_slice(partial.grid.nodes());
    if (nodes[total] / r_max - 1.0).abs() < 1e-9 {
        nodes[total] = r_max;
    }
    let grid = RadialGrid::from_nodes(nodes, h, partial.grid.points_per_decade());

    let system = RadialSystem { spec, extra: 0.0 };
    let mut values = partial.values.clone();
    let mut derivative = partial.derivative.clone();
    let start = partial.grid.len() - 1;
    let mut state = [values[start], grid.nodes()[start] * derivative[start]];
    let mut substeps = 0;
    for i in start..total {
        let x0 = grid.nodes()[i].ln();
        let hi = grid.nodes()[i + 1].ln() - x0;
        let (next, used) = system.interval(x0, hi, state, tol)?;
        substeps += used;
        state = next;
        values.push(state[0]);
        derivative.push(state[1] / grid.nodes()[i + 1]);
    }
    Ok((grid, values, derivative, substeps))
}
