//! Quadrature helpers shared by the radial modules.

/// Integral of `f` over one log-step of width `h` when `f` is interpolated
/// exponentially between the endpoint samples (exact for power laws in `r`).
/// Falls back to the trapezoid when the samples differ in sign.
pub(crate) fn log_mean_step(f0: f64, f1: f64, h: f64) -> f64 {
    if f0 == f1 {
        return f0 * h;
    }
    if f0 > 0.0 && f1 > 0.0 || f0 < 0.0 && f1 < 0.0 {
        let ratio = f1 / f0;
        let k = ratio.ln();
        if k.abs() < 1e-6 {
            // series of (e^k - 1)/k to avoid cancellation
            return f0 * h * (1.0 + k / 2.0 + k * k / 6.0 + k * k * k / 24.0);
        }
        h * (f1 - f0) / k
    } else {
        0.5 * h * (f0 + f1)
    }
}

/// Running integral over a uniform log grid, starting from `initial`.
pub(crate) fn cumulative_log_mean(values: &[f64], h: f64, initial: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = initial;
    out.push(acc);
    for w in values.windows(2) {
        acc += log_mean_step(w[0], w[1], h);
        out.push(acc);
    }
    out
}

/// Integral of an exponential tail ending at the first sample: assumes
/// `f(x) = f0 * exp(k (x - x0))` for `x < x0` with `k` estimated from the first two
/// samples. Returns zero when no decaying tail can be identified.
pub(crate) fn exponential_tail(f0: f64, f1: f64, h: f64) -> f64 {
    if f0 == 0.0 || f0.signum() != f1.signum() {
        return 0.0;
    }
    let k = (f1 / f0).ln() / h;
    if k > 1e-8 {
        f0 / k
    } else {
        0.0
    }
}

/// Adaptive Simpson rule with relative tolerance `rel_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, abs_tol / 2.0, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, abs_tol / 2.0, depth - 1)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = GK_WEIGHTS_K[7] * fc;
    let mut gauss = GK_WEIGHTS_G[3] * fc;
    for j in 0..7 {
        let dx = hw * GK_NODES[j];
        let s = f(c - dx) + f(c + dx);
        kron += GK_WEIGHTS_K[j] * s;
        if j % 2 == 1 {
            gauss += GK_WEIGHTS_G[j / 2] * s;
        }
    }
    (kron * hw, ((kron - gauss) * hw).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` on `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut segments = vec![{
        let (v, e) = gk15(f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..2000 {
        let total: f64 = segments.iter().map(|s| s.2).sum();
        let err: f64 = segments.iter().map(|s| s.3).sum();
        if err <= rel_tol * total.abs() || err < 1e-300 {
            return total;
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = segments.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
    segments.iter().map(|s| s.2).sum()
}
