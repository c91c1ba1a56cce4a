//! Exact heat kernel of `-Δ + λ/|x|²` by the Bessel mode series.

use super::KernelError;
use crate::potential::{exponents, hardy_constant};
use crate::special::bessel_i_scaled;
use serde::{Deserialize, Serialize};

/// Cancellation factor `Σ|terms| / |Σ terms|` beyond which the series value is
/// not trusted.
pub const MAX_CANCELLATION: f64 = 1e8;

/// Order of the Bessel function in mode `l`: `sqrt((N-2)²/4 + λ + l(l+N-2))`.
pub fn bessel_order(dimension: u32, lambda: f64, l: usize) -> f64 {
    let lf = l as f64;
    (-hardy_constant(dimension) + lambda + lf * (lf + dimension as f64 - 2.0))
        .max(0.0)
        .sqrt()
}

/// Mode kernel `p_l(r, ρ, t)` with respect to `ρ^{N-1} dρ`.
pub fn oracle_mode(dimension: u32, lambda: f64, l: usize, r: f64, rho: f64, t: f64) -> f64 {
    let alpha = 0.5 * (dimension as f64 - 2.0);
    let nu = bessel_order(dimension, lambda, l);
    let z = r * rho / (2.0 * t);
    let gauss = (-(r - rho) * (r - rho) / (4.0 * t)).exp();
    (r * rho).powf(-alpha) / (2.0 * t) * gauss * bessel_i_scaled(nu, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    /// `|last term| / |sum|`.
    pub truncation: f64,
    /// `Σ|terms| / |sum|`.
    pub cancellation: f64,
    pub terms: usize,
}

impl OracleValue {
    pub fn is_resolved(&self) -> bool {
        self.value > 0.0 && self.cancellation < MAX_CANCELLATION && self.truncation < 1e-10
    }
}

/// `p(x, y, t)` for `V = λ/|x|²`, summed over modes until the tail is negligible
/// or `l_max` is reached.
pub fn oracle_kernel(
    dimension: u32,
    lambda: f64,
    r: f64,
    rho: f64,
    cos_theta: f64,
    t: f64,
    l_max: usize,
) -> Result<OracleValue, KernelError> {
    exponents(dimension, lambda)?;
    if !(r > 0.0 && rho > 0.0 && t > 0.0) {
        return Err(KernelError::InvalidSample { r, rho, t });
    }
    let x = cos_theta.clamp(-1.0, 1.0);
    let mut zonal = ZonalIter::new(dimension, x);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut last = 0.0;
    let mut terms = 0;
    for l in 0..=l_max {
        let zl = zonal.next_value();
        let pl = oracle_mode(dimension, lambda, l, r, rho, t);
        let term = pl * zl;
        sum += term;
        abs_sum += term.abs();
        last = term;
        terms = l + 1;
        // the Bessel factor decreases in l; stop once it cannot matter
        let bound = pl * zonal.bound_next();
        if l > 2 && pl > 0.0 && bound < 1e-18 * abs_sum || pl == 0.0 && l > 0 {
            last = bound;
            break;
        }
    }
    let value = sum;
    Ok(OracleValue {
        value,
        truncation: (last / value).abs(),
        cancellation: if value != 0.0 { abs_sum / value.abs() } else { f64::INFINITY },
        terms,
    })
}

/// Streams zonal harmonics `Z_0, Z_1, ...` of `S^{N-1}` at a fixed argument.
pub(crate) struct ZonalIter {
    n: u32,
    x: f64,
    alpha: f64,
    area: f64,
    l: usize,
    prev: f64,
    cur: f64,
}

impl ZonalIter {
    pub fn new(n: u32, x: f64) -> Self {
        Self {
            n,
            x,
            alpha: 0.5 * (n as f64 - 2.0),
            area: crate::special::unit_sphere_area(n),
            l: 0,
            prev: 0.0,
            cur: 0.0,
        }
    }

    /// Next `Z_l`, starting at `l = 0`.
    pub fn next_value(&mut self) -> f64 {
        let l = self.l;
        self.l += 1;
        let (p, c) = if self.n == 2 {
            match l {
                0 => (0.0, 1.0),
                1 => (1.0, self.x),
                _ => (self.cur, 2.0 * self.x * self.cur - self.prev),
            }
        } else {
            let a = self.alpha;
            match l {
                0 => (0.0, 1.0),
                1 => (1.0, 2.0 * a * self.x),
                _ => {
                    let m = (l - 1) as f64;
                    (
                        self.cur,
                        (2.0 * self.x * (m + a) * self.cur - (m + 2.0 * a - 1.0) * self.prev) / (m + 1.0),
                    )
                }
            }
        };
        self.prev = p;
        self.cur = c;
        let lf = l as f64;
        if l == 0 {
            1.0 / self.area
        } else if self.n == 2 {
            2.0 * c / self.area
        } else {
            (lf + self.alpha) / self.alpha * c / self.area
        }
    }

    /// Upper bound of `|Z_l|` for the next degree (its value at `x = 1`).
    pub fn bound_next(&self) -> f64 {
        let l = self.l as f64;
        if self.n == 2 {
            2.0 / self.area
        } else {
            // dim of degree-l harmonics = Z_l(1) |S|
            let a = self.alpha;
            let c1 = statrs::function::gamma::ln_gamma(l + 2.0 * a) - statrs::function::gamma::ln_gamma(2.0 * a)
                - statrs::function::gamma::ln_gamma(l + 1.0);
            (l + a) / a * c1.exp() / self.area
        }
    }
}
