use crate::config::{config_hash, EnvelopeChoice, Family, KernelSource, RunConfig};
use crate::CliError;
use hklab::bounds::{
    fit_constant, gaussian_rate, verify_supersolution, zeta_kappa, Envelope, FarField, Side, SupersolutionRegion,
    Zeta,
};
use hklab::criticality::{classify_profile, find_mu_star, CriticalityReport};
use hklab::harmonic::{f_of_u, harmonic_profile, positivity_scan, HarmonicProfile};
use hklab::heatkernel::{assemble, oracle_kernel, solve_modes, KernelSample, KernelSlice, ModeKernel};
use hklab::report::{self, BallMass};
use hklab::weights::{a2_constant, a2_quick_test, WeightProfile};
use hklab::{exponents as roots, PotentialSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

const DEFAULT_OUTPUT_DIR: &str = "hklab-out";

/// A command's JSON result and the artifacts it produced.
pub struct Output {
    pub result: Value,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Output {
    fn json(result: Value) -> Self {
        Self {
            result,
            files: Vec::new(),
        }
    }

    fn with_file(mut self, name: &str, contents: Vec<u8>) -> Self {
        self.files.push((name.to_string(), contents));
        self
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result types serialize")
}

/// Prints the JSON document and, for commands with artifacts, writes it with
/// the artifacts to the output directory.
pub fn emit(command: &str, cfg: &RunConfig, output: Output) -> Result<(), CliError> {
    let mut canonical = cfg.clone();
    canonical.output_dir = None;
    let doc = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": config_hash(cfg),
        "config": to_value(&canonical),
        "result": output.result,
    });
    let text = serde_json::to_string_pretty(&doc).expect("json") + "\n";
    if command != "exponents" {
        let dir = cfg
            .output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let write = |name: &str, bytes: &[u8]| -> Result<(), CliError> {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        };
        write(&format!("{command}.json"), text.as_bytes())?;
        for (name, bytes) in &output.files {
            write(name, bytes)?;
        }
    }
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn csv<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(f: F) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

pub fn exponents(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = &cfg.potential;
    let lambda = match p.family {
        Family::Blended => p.lambda1,
        Family::Zero => 0.0,
        _ => p.lambda,
    };
    let e = roots(p.dimension, lambda)?;
    Ok(Output::json(json!({
        "dimension": p.dimension,
        "lambda": lambda,
        "exponents": to_value(&e),
    })))
}

fn spec_of(cfg: &RunConfig) -> Result<PotentialSpec, CliError> {
    Ok(cfg.potential.build()?)
}

pub fn harmonic(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = spec_of(cfg)?;
    let u = harmonic_profile(&spec, &cfg.harmonic)?;
    let mut out = Output::json(json!({
        "spec": to_value(&spec),
        "exponents_at_zero": to_value(&roots(spec.dimension, spec.lambda1)?),
        "exponents_at_infinity": to_value(&roots(spec.dimension, spec.lambda2)?),
        "near_zero_exponent": u.near_zero_exponent,
        "correction_exponent": u.correction_exponent,
        "tail": to_value(&u.tail),
        "diagnostics": to_value(&u.diagnostics),
        "first_zero": positivity_scan(&u),
        "grid": {
            "r_min": u.grid.r_min(),
            "r_max": u.grid.r_max(),
            "points_per_decade": u.grid.points_per_decade(),
            "points": u.grid.len(),
        },
    }))
    .with_file("profile.csv", csv(|w| report::write_profile_csv(w, &u)));
    if let Ok(f) = f_of_u(&u) {
        out = out.with_file("functional.csv", csv(|w| report::write_functional_csv(w, &f)));
    }
    Ok(out)
}

fn profile_and_verdict(
    cfg: &RunConfig,
    spec: &PotentialSpec,
) -> Result<(HarmonicProfile, CriticalityReport), CliError> {
    let u = harmonic_profile(spec, &cfg.harmonic)?;
    let rep = classify_profile(&u, spec, &cfg.harmonic)?;
    Ok((u, rep))
}

pub fn classify(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = spec_of(cfg)?;
    let (_, rep) = profile_and_verdict(cfg, &spec)?;
    Ok(Output::json(json!({ "spec": to_value(&spec), "report": to_value(&rep) })))
}

pub fn mu_star(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = spec_of(cfg)?;
    let m = &cfg.mu_star;
    let res = find_mu_star(&spec, m.bump.build(), m.bracket, m.tol, &cfg.harmonic)?;
    Ok(Output::json(json!({ "spec": to_value(&spec), "mu_star": to_value(&res) })))
}

pub fn a2(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = spec_of(cfg)?;
    let u = harmonic_profile(&spec, &cfg.harmonic)?;
    let w = WeightProfile::new(u)?;
    let balls: Vec<(f64, f64)> = cfg
        .a2
        .centers
        .iter()
        .flat_map(|&c| cfg.a2.radii.iter().map(move |&r| (c, r)))
        .collect();
    let mut masses = Vec::new();
    for &(center, radius) in &balls {
        match w.ball_mass(center, radius) {
            Ok(mass) => masses.push(BallMass { center, radius, mass }),
            Err(e) => log::warn!("ball mass skipped: {e}"),
        }
    }
    let estimate = a2_constant(&w, &balls);
    Ok(Output::json(json!({
        "spec": to_value(&spec),
        "near_zero_power": w.near_zero_power,
        "tail_power_bounds": w.tail_power_bounds,
        "quick_verdict": to_value(&a2_quick_test(&w, spec.dimension)),
        "estimate": to_value(&estimate),
    }))
    .with_file("ball_masses.csv", csv(|wr| report::write_ball_masses_csv(wr, &masses))))
}

fn mode_summary(modes: &[ModeKernel]) -> Value {
    Value::Array(
        modes
            .iter()
            .map(|m| json!({ "source": m.source_radius, "l": m.l, "diagnostics": to_value(&m.diagnostics) }))
            .collect(),
    )
}

pub fn kernel(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = spec_of(cfg)?;
    let k = &cfg.kernel;
    let mut slice = KernelSlice::default();
    let mut summaries = Vec::new();
    for &rho in &k.sources {
        let modes = solve_modes(&spec, rho, &k.times, &cfg.solver)?;
        for &t in &k.times {
            for &r in &k.radii {
                for &c in &k.cosines {
                    slice.samples.push(assemble(&modes, r, c, t)?);
                }
            }
        }
        summaries.push(mode_summary(&modes));
    }
    let worst = slice.samples.iter().map(|s| s.truncation).fold(0.0, f64::max);
    Ok(Output::json(json!({
        "spec": to_value(&spec),
        "samples": slice.len(),
        "worst_truncation": worst,
        "modes": summaries,
    }))
    .with_file("kernel.csv", csv(|w| report::write_slice_csv(w, &slice))))
}

fn log_uniform(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        return range.0;
    }
    rng.random_range(range.0.ln()..range.1.ln()).exp()
}

fn pure_lambda(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.potential.family {
        Family::Zero => Ok(0.0),
        Family::InverseSquare => Ok(cfg.potential.lambda),
        _ => Err(CliError::Config(
            "verify.source = \"oracle\" needs a zero or inverse_square potential; use \"solver\"".into(),
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn push_oracle(slice: &mut KernelSlice, n: u32, lambda: f64, r: f64, rho: f64, c: f64, t: f64, l_max: usize) -> Result<(), CliError> {
    let v = oracle_kernel(n, lambda, r, rho, c, t, l_max)?;
    if v.is_resolved() {
        slice.samples.push(KernelSample {
            r,
            rho,
            cos_theta: c,
            t,
            p: v.value,
            truncation: v.truncation,
        });
    } else {
        slice.excluded += 1;
    }
    Ok(())
}

fn verify_slices(cfg: &RunConfig, spec: &PotentialSpec) -> Result<(KernelSlice, KernelSlice), CliError> {
    let v = &cfg.verify;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut slab = KernelSlice::default();
    let mut far = KernelSlice::default();
    match v.source {
        KernelSource::Oracle => {
            let lambda = pure_lambda(cfg)?;
            let n = spec.dimension;
            for _ in 0..v.samples {
                let r = log_uniform(&mut rng, v.r_range);
                let rho = log_uniform(&mut rng, v.r_range);
                let t = log_uniform(&mut rng, v.t_range);
                for &c in &v.cosines {
                    push_oracle(&mut slab, n, lambda, r, rho, c, t, v.oracle_l_max)?;
                }
            }
            if v.rate {
                for &t in &[0.05f64, 0.3, 1.0, 3.0] {
                    for &m in &[1.0, 2.0, 4.0] {
                        for k in 0..=20 {
                            let q = 10.0 * 10f64.powf(k as f64 / 20.0);
                            let r = m * t.sqrt();
                            push_oracle(&mut far, n, lambda, r, r + (q * t).sqrt(), 1.0, t, v.oracle_l_max)?;
                        }
                    }
                }
            }
        }
        KernelSource::Solver => {
            let grid_lo = cfg.solver.r_min;
            let grid_hi = cfg.solver.r_max;
            for &rho in &v.sources {
                let modes = solve_modes(spec, rho, &v.times, &cfg.solver)?;
                for k in 0..v.samples {
                    let r = log_uniform(&mut rng, v.r_range).clamp(grid_lo, grid_hi);
                    let t = v.times[k % v.times.len()];
                    for &c in &v.cosines {
                        slab.samples.push(assemble(&modes, r, c, t)?);
                    }
                }
            }
            slab.samples.retain(|s| s.p > 0.0);
            far = slab.clone();
        }
    }
    Ok((slab, far))
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = spec_of(cfg)?;
    let v = &cfg.verify;
    let (u, rep) = profile_and_verdict(cfg, &spec)?;
    let w = WeightProfile::new(u.clone())?;
    let env = match v.envelope {
        EnvelopeChoice::TwoSided => Envelope::two_sided(&w),
        EnvelopeChoice::Global => Envelope::global(&u, &spec, rep.verdict)?,
        EnvelopeChoice::Polynomial => Envelope::polynomial(&u, &spec)?,
        EnvelopeChoice::GaussianRate => Envelope::gaussian_rate(&w, v.epsilon)?,
    };
    let (slab, far) = verify_slices(cfg, &spec)?;
    let upper = fit_constant(&slab, &env, Side::Upper, v.bracket)?;
    let lower = fit_constant(&slab, &env, Side::Lower, v.bracket)?;
    let rate = if v.rate {
        let rate_env = Envelope::gaussian_rate(&w, v.epsilon)?;
        match gaussian_rate(&far, &rate_env, FarField::default(), v.epsilon) {
            Ok(r) => to_value(&r),
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    let ratios = {
        let mut buf = Vec::new();
        report::write_ratio_csv(&mut buf, &slab, &env, upper.fitted_constant)?;
        buf
    };
    Ok(Output::json(json!({
        "spec": to_value(&spec),
        "verdict": to_value(&rep.verdict),
        "envelope": to_value(&env.kind),
        "samples": slab.len(),
        "excluded": slab.excluded,
        "upper": to_value(&upper),
        "lower": to_value(&lower),
        "gaussian_rate": rate,
    }))
    .with_file("samples.csv", csv(|wr| report::write_slice_csv(wr, &slab)))
    .with_file("ratios.csv", ratios))
}

pub fn supersolution(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = spec_of(cfg)?;
    let s = &cfg.supersolution;
    let (u, rep) = profile_and_verdict(cfg, &spec)?;
    let fu = f_of_u(&u)?;
    let zeta = match s.zeta {
        Some((g1, g2, c)) => Zeta::new(g1, g2, c)?,
        None => Zeta::for_operator(&spec, rep.verdict)?,
    };
    let kappa_min = zeta_kappa(zeta.gamma1, zeta.gamma2, zeta.c, s.t_start)?;
    let kappa = kappa_min * s.kappa_scale;
    let region = SupersolutionRegion {
        r_range: s.r_range,
        times: s.times.clone(),
    };
    let res = verify_supersolution(&u, &fu, zeta, kappa, &spec, &region)?;
    Ok(Output::json(json!({
        "spec": to_value(&spec),
        "verdict": to_value(&rep.verdict),
        "zeta": to_value(&zeta),
        "kappa_min": kappa_min,
        "kappa": kappa,
        "report": to_value(&res),
    }))
    .with_file("functional.csv", csv(|w| report::write_functional_csv(w, &fu))))
}
