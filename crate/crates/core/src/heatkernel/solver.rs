//! Radial mode solver: conservative finite volumes in `ln r`, TR-BDF2 on a
//! geometric time mesh, optional space-time Richardson extrapolation.

use super::{mode_potential, KernelError};
use crate::grid::{lagrange4, RadialGrid};
use crate::potential::{exponents, PotentialSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    DirichletAtRmax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points_per_decade: usize,
    /// Relative growth of consecutive time steps.
    pub time_ratio: f64,
    pub l_max: usize,
    pub boundary: Boundary,
    /// First time step is `(source_width * local spacing)^2`.
    pub source_width: f64,
    pub richardson: bool,
    /// Largest tolerated mass outflow through `r_max`.
    pub truncation_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            r_max: 100.0,
            points_per_decade: 512,
            time_ratio: 0.02,
            l_max: 24,
            boundary: Boundary::DirichletAtRmax,
            source_width: 1.0,
            richardson: true,
            truncation_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDiagnostics {
    pub time_steps: usize,
    pub grid_points: usize,
    /// Mass that left through `r_max` by the last requested time.
    pub outflow: f64,
    /// `min p / max p` over the outputs.
    pub min_ratio: f64,
    pub negative_flag: bool,
}

/// `p_l(r, ρ, t)` on the solver grid at the requested times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeKernel {
    pub l: usize,
    pub dimension: u32,
    pub source_radius: f64,
    pub grid: RadialGrid,
    pub times: Vec<f64>,
    /// `values[k][i] = p_l(r_i, ρ, times[k])`
    pub values: Vec<Vec<f64>>,
    pub diagnostics: ModeDiagnostics,
}

impl ModeKernel {
    pub fn time_index(&self, t: f64) -> Result<usize, KernelError> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * t.abs())
            .ok_or(KernelError::UnknownTime { t })
    }

    /// Cubic interpolation in `ln r` of `ln p` (or of `p` where it is not positive).
    pub fn eval(&self, r: f64, t: f64) -> Result<f64, KernelError> {
        let k = self.time_index(t)?;
        let g = &self.grid;
        if !(r >= g.r_min() && r <= g.r_max()) {
            return Err(KernelError::OutsideGrid {
                r,
                r_min: g.r_min(),
                r_max: g.r_max(),
            });
        }
        let v = &self.values[k];
        let s = g.locate(r).saturating_sub(1).min(g.len() - 4);
        let x = (r / g.nodes()[s]).ln() / g.log_step();
        let w = &v[s..s + 4];
        Ok(if w.iter().all(|&p| p > 0.0) {
            lagrange4(&[w[0].ln(), w[1].ln(), w[2].ln(), w[3].ln()], x).exp()
        } else {
            lagrange4(w, x)
        })
    }
}

struct Operator {
    /// mass `r_i^N h`
    mass: Vec<f64>,
    diag: Vec<f64>,
    /// coupling between `i` and `i+1`
    off: Vec<f64>,
    /// rate of mass loss through `r_max` per unit `u_{M-1}`
    outflow_rate: f64,
}

impl Operator {
    fn new(spec: &PotentialSpec, l: usize, grid: &RadialGrid, a_l: f64) -> Self {
        let mp = mode_potential(spec, l);
        let n = spec.dimension as f64;
        let h = grid.log_step();
        let r = grid.nodes();
        let m = r.len() - 1;
        let face = |i: usize| (r[i] * r[i + 1]).sqrt().powf(n - 2.0) / h;
        let mut mass = Vec::with_capacity(m);
        let mut diag = Vec::with_capacity(m);
        let mut off = Vec::with_capacity(m);
        for i in 0..m {
            let mi = r[i].powf(n) * h;
            let right = face(i);
            let left = if i == 0 {
                // ghost node u_{-1} = u_0 e^{-a h}
                (r[0] * r[0] * (-h).exp()).sqrt().powf(n - 2.0) / h * (1.0 - (-a_l * h).exp())
            } else {
                face(i - 1)
            };
            mass.push(mi);
            diag.push(-right - left - mi * mp.eval(r[i]));
            off.push(right);
        }
        Self {
            mass,
            diag,
            off,
            outflow_rate: face(m - 1),
        }
    }

    /// `(M + c K) u`
    fn apply(&self, c: f64, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        (0..m)
            .map(|i| {
                let mut s = (self.mass[i] + c * self.diag[i]) * u[i];
                if i > 0 {
                    s += c * self.off[i - 1] * u[i - 1];
                }
                if i + 1 < m {
                    s += c * self.off[i] * u[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves `(M - c K) x = b` by the Thomas algorithm.
    fn solve(&self, c: f64, b: &[f64]) -> Vec<f64> {
        let m = b.len();
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        let d0 = self.mass[0] - c * self.diag[0];
        let up = |i: usize| -c * self.off[i];
        cp[0] = if m > 1 { up(0) / d0 } else { 0.0 };
        dp[0] = b[0] / d0;
        for i in 1..m {
            let lo = -c * self.off[i - 1];
            let den = self.mass[i] - c * self.diag[i] - lo * cp[i - 1];
            cp[i] = if i + 1 < m { up(i) / den } else { 0.0 };
            dp[i] = (b[i] - lo * dp[i - 1]) / den;
        }
        let mut x = vec![0.0; m];
        x[m - 1] = dp[m - 1];
        for i in (0..m - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    }
}

struct Run {
    values: Vec<Vec<f64>>,
    outflow: f64,
    steps: usize,
}

fn march(op: &Operator, src: usize, mesh: &[f64], targets: &[f64], tol: f64, r_max: f64) -> Result<Run, KernelError> {
    let gamma = 2.0 - 2f64.sqrt();
    let w = (1.0 - gamma) / (2.0 - gamma);
    let b1 = 1.0 / (gamma * (2.0 - gamma));
    let b0 = (1.0 - gamma) * (1.0 - gamma) / (gamma * (2.0 - gamma));
    let m = op.mass.len();
    let mut u = vec![0.0; m];
    u[src] = 1.0 / op.mass[src];
    let mut outflow = 0.0;
    let mut values = Vec::with_capacity(targets.len());
    let mut next_target = 0;
    for step in mesh.windows(2) {
        let k = step[1] - step[0];
        let rhs = op.apply(0.5 * gamma * k, &u);
        let stage = op.solve(0.5 * gamma * k, &rhs);
        let rhs2: Vec<f64> = (0..m).map(|i| op.mass[i] * (b1 * stage[i] - b0 * u[i])).collect();
        let next = op.solve(w * k, &rhs2);
        outflow += 0.5 * k * op.outflow_rate * (u[m - 1] + next[m - 1]);
        u = next;
        if outflow > tol {
            return Err(KernelError::Truncation {
                outflow,
                r_max,
                t: step[1],
            });
        }
        while next_target < targets.len() && (step[1] - targets[next_target]).abs() <= 1e-12 * targets[next_target] {
            let mut full = u.clone();
            full.push(0.0);
            values.push(full);
            next_target += 1;
        }
    }
    Ok(Run {
        values,
        outflow,
        steps: mesh.len() - 1,
    })
}

/// `0, t0`, then geometric steps of ratio about `1 + ratio` through every target.
fn time_mesh(t0: f64, targets: &[f64], ratio: f64) -> Vec<f64> {
    let mut mesh = vec![0.0, t0];
    let q = (1.0 + ratio).ln();
    let mut cur = t0;
    for &t in targets {
        if t <= cur * (1.0 + 1e-12) {
            continue;
        }
        let n = ((t / cur).ln() / q).ceil().max(1.0) as usize;
        for j in 1..=n {
            mesh.push(if j == n { t } else { cur * ((t / cur).ln() * j as f64 / n as f64).exp() });
        }
        cur = t;
    }
    mesh
}

/// Every step of `mesh` split in two: geometrically, except the first (from 0).
fn refine_mesh(mesh: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0, mesh[1] / 4.0, mesh[1] / 2.0, mesh[1]];
    for w in mesh[1..].windows(2) {
        out.push((w[0] * w[1]).sqrt());
        out.push(w[1]);
    }
    out
}

fn refine_grid(grid: &RadialGrid) -> RadialGrid {
    let r = grid.nodes();
    let mut nodes = Vec::with_capacity(2 * r.len() - 1);
    for w in r.windows(2) {
        nodes.push(w[0]);
        nodes.push((w[0] * w[1]).sqrt());
    }
    nodes.push(*r.last().expect("grid has nodes"));
    RadialGrid::from_nodes(nodes, 0.5 * grid.log_step(), 2 * grid.points_per_decade())
}

pub fn solve_mode(
    spec: &PotentialSpec,
    l: usize,
    rho: f64,
    times: &[f64],
    cfg: &SolverConfig,
) -> Result<ModeKernel, KernelError> {
    let mut targets: Vec<f64> = times.to_vec();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let t_max = *targets.last().ok_or_else(|| KernelError::InvalidConfig("no output times".into()))?;
    if targets[0] <= 0.0 || !t_max.is_finite() {
        return Err(KernelError::InvalidConfig("output times must be positive".into()));
    }
    if !(rho > cfg.r_min && rho < cfg.r_max) {
        return Err(KernelError::InvalidSample { r: rho, rho, t: t_max });
    }
    if cfg.r_max < 8.0 * t_max.sqrt() {
        return Err(KernelError::InvalidConfig(format!(
            "r_max = {} below 8 sqrt(t_max) = {}",
            cfg.r_max,
            8.0 * t_max.sqrt()
        )));
    }
    if !(cfg.time_ratio > 0.0 && cfg.source_width > 0.0 && cfg.points_per_decade > 0) {
        return Err(KernelError::InvalidConfig("time_ratio, source_width and points_per_decade must be positive".into()));
    }
    let (lambda1, _) = mode_potential(spec, l).coefficients();
    let a_l = exponents(spec.dimension, lambda1)?.a_plus;
    if a_l <= -(spec.dimension as f64) / 2.0 {
        return Err(KernelError::NonIntegrableMode { l, exponent: a_l });
    }
    let h = std::f64::consts::LN_10 / cfg.points_per_decade as f64;
    let grid = RadialGrid::anchored(rho, cfg.r_min, cfg.r_max, h)?;
    let src = grid.nearest(rho);
    let spacing = rho * (h.exp() - 1.0);
    let t0 = (cfg.source_width * spacing).powi(2).min(0.5 * targets[0]);
    let mesh = time_mesh(t0, &targets, cfg.time_ratio);

    let op = Operator::new(spec, l, &grid, a_l);
    let coarse = march(&op, src, &mesh, &targets, cfg.truncation_tol, grid.r_max())?;
    let (values, outflow, steps) = if cfg.richardson {
        let fine_grid = refine_grid(&grid);
        let fine_op = Operator::new(spec, l, &fine_grid, a_l);
        let fine = march(&fine_op, 2 * src, &refine_mesh(&mesh), &targets, cfg.truncation_tol, grid.r_max())?;
        let combined = coarse
            .values
            .iter()
            .zip(&fine.values)
            .map(|(c, f)| c.iter().enumerate().map(|(i, &ci)| (4.0 * f[2 * i] - ci) / 3.0).collect())
            .collect();
        (combined, fine.outflow, coarse.steps + fine.steps)
    } else {
        (coarse.values, coarse.outflow, coarse.steps)
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &values {
        for &p in v {
            lo = lo.min(p);
            hi = hi.max(p);
        }
    }
    let min_ratio = lo / hi;
    let negative_flag = min_ratio < -1e-8;
    if negative_flag {
        log::warn!("mode {l}: negative undershoot {min_ratio:e} relative to max");
    }
    Ok(ModeKernel {
        l,
        dimension: spec.dimension,
        source_radius: grid.nodes()[src],
        diagnostics: ModeDiagnostics {
            time_steps: steps,
            grid_points: grid.len(),
            outflow,
            min_ratio,
            negative_flag,
        },
        grid,
        times: targets,
        values,
    })
}

/// Modes `0..=cfg.l_max` from one source radius.
pub fn solve_modes(spec: &PotentialSpec, rho: f64, times: &[f64], cfg: &SolverConfig) -> Result<Vec<ModeKernel>, KernelError> {
    (0..=cfg.l_max).map(|l| solve_mode(spec, l, rho, times, cfg)).collect()
}
