//! Special functions: exponentially scaled modified Bessel functions of real
//! order, zonal harmonics on the sphere, and sphere/ball measures.

use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

/// `e^{-z} I_nu(z)` for real `nu >= 0` and `z >= 0`.
///
/// Power series for moderate arguments, the Hankel expansion when `z` dominates
/// `nu^2`, and the Debye uniform expansion for large order and argument.
pub fn bessel_i_scaled(nu: f64, z: f64) -> f64 {
    debug_assert!(nu >= 0.0 && z >= 0.0);
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if z > 30.0 && z > 2.0 * nu * nu {
        hankel_scaled(nu, z)
    } else if nu >= 50.0 && z > 1000.0 {
        debye_scaled(nu, z)
    } else {
        series_scaled(nu, z)
    }
}

fn series_scaled(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_offset = 0.0_f64;
    let mut k = 0.0_f64;
    loop {
        k += 1.0;
        term *= q / (k * (nu + k));
        sum += term;
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_offset += 250.0 * std::f64::consts::LN_10;
        }
        if term < 1e-17 * sum && k > q.sqrt() {
            break;
        }
        if k > 1e6 {
            break;
        }
    }
    let log_prefactor = nu * (0.5 * z).ln() - ln_gamma(nu + 1.0) - z;
    (log_prefactor + log_offset + sum.ln()).exp()
}

fn hankel_scaled(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= -(mu - odd * odd) / (kf * 8.0 * z);
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * z).sqrt()
}

fn debye_scaled(nu: f64, x: f64) -> f64 {
    let z = x / nu;
    let root = (1.0 + z * z).sqrt();
    let p = 1.0 / root;
    let eta = root + (z / (1.0 + root)).ln();
    let p2 = p * p;
    let u1 = p * (3.0 - 5.0 * p2) / 24.0;
    let u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0;
    let u3 = p * p2
        * (30375.0 - 369603.0 * p2 + 765765.0 * p2 * p2 - 425425.0 * p2 * p2 * p2)
        / 414720.0;
    let p4 = p2 * p2;
    let u4 = p4
        * (4465125.0 - 94121676.0 * p2 + 349922430.0 * p4 - 446185740.0 * p4 * p2
            + 185910725.0 * p4 * p4)
        / 39813120.0;
    let series = 1.0 + u1 / nu + u2 / (nu * nu) + u3 / nu.powi(3) + u4 / nu.powi(4);
    let log_val = nu * eta - x - 0.5 * (2.0 * PI * nu).ln() - 0.25 * (1.0 + z * z).ln();
    log_val.exp() * series
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn unit_sphere_area(n: u32) -> f64 {
    let half = 0.5 * n as f64;
    2.0 * PI.powf(half) / gamma(half)
}

/// Volume of the ball of radius `r` in `R^n`.
pub fn ball_volume(n: u32, r: f64) -> f64 {
    let half = 0.5 * n as f64;
    PI.powf(half) * r.powi(n as i32) / gamma(half + 1.0)
}

/// Zonal harmonic of degree `l` on `S^{n-1}`: the kernel of the orthogonal
/// projector onto degree-`l` spherical harmonics, evaluated at `cos_theta`.
/// Normalised so that `sum_l e^{-z} I_{l+a}(z) Z_l(cos) (z/2)^{-a} Gamma(a) ...`
/// reproduces the free Gaussian; in particular `Z_0 = 1 / |S^{n-1}|`.
pub fn zonal_harmonic(n: u32, l: usize, cos_theta: f64) -> f64 {
    zonal_harmonics(n, l, cos_theta)[l]
}

/// `Z_0 .. Z_{l_max}` at `cos_theta`.
pub fn zonal_harmonics(n: u32, l_max: usize, cos_theta: f64) -> Vec<f64> {
    let x = cos_theta.clamp(-1.0, 1.0);
    let area = unit_sphere_area(n);
    let mut out = Vec::with_capacity(l_max + 1);
    if n == 2 {
        // Chebyshev: Z_0 = 1/(2 pi), Z_l = 2 T_l / (2 pi)
        let (mut t_prev, mut t_cur) = (1.0, x);
        out.push(1.0 / area);
        for l in 1..=l_max {
            if l > 1 {
                let next = 2.0 * x * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = next;
            }
            out.push(2.0 * t_cur / area);
        }
        return out;
    }
    let alpha = 0.5 * (n as f64 - 2.0);
    let (mut c_prev, mut c_cur) = (1.0, 2.0 * alpha * x);
    out.push(1.0 / area);
    for l in 1..=l_max {
        if l > 1 {
            let m = (l - 1) as f64;
            let next = (2.0 * x * (m + alpha) * c_cur - (m + 2.0 * alpha - 1.0) * c_prev) / (m + 1.0);
            c_prev = c_cur;
            c_cur = next;
        }
        out.push((l as f64 + alpha) / alpha * c_cur / area);
    }
    out
}
