use super::*;
use crate::grid::RadialGrid;
use crate::harmonic::{f_of_u, HarmonicProfile};
use crate::heatkernel::{KernelSample, KernelSlice};
use crate::potential::PotentialSpec;
use crate::special::ball_volume;
use crate::weights::WeightProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn power_profile(n: u32, a: f64) -> HarmonicProfile {
    let grid = RadialGrid::log_spaced(1e-6, 1e6, 64).unwrap();
    HarmonicProfile::power_law(n, a, &grid)
}

fn free_kernel(n: u32, d2: f64, t: f64) -> f64 {
    (4.0 * PI * t).powf(-0.5 * n as f64) * (-d2 / (4.0 * t)).exp()
}

fn sample(n: u32, r: f64, rho: f64, cos: f64, t: f64) -> KernelSample {
    let d2 = r * r + rho * rho - 2.0 * r * rho * cos;
    KernelSample {
        r,
        rho,
        cos_theta: cos,
        t,
        p: free_kernel(n, d2, t),
        truncation: 0.0,
    }
}

fn free_slice(n: u32, count: usize, seed: u64) -> KernelSlice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..count)
        .map(|_| {
            let r = 10f64.powf(rng.random_range(-1.0..1.0));
            let rho = 10f64.powf(rng.random_range(-1.0..1.0));
            let t = 10f64.powf(rng.random_range(-1.0..1.0));
            sample(n, r, rho, rng.random_range(-1.0..1.0), t)
        })
        .collect();
    KernelSlice { samples, excluded: 0 }
}

#[test]
fn ckn_examples() {
    assert_eq!(ckn_p0(3, 0.0).unwrap(), 6.0);
    assert_eq!(ckn_p0(4, 0.5).unwrap(), 6.0);
    assert!(matches!(ckn_p0(3, 0.5), Err(BoundsError::Domain { .. })));
    assert!(matches!(ckn_p0(2, 0.0), Err(BoundsError::Domain { .. })));
    let near = ckn_p0(5, 1.5 - 1e-9).unwrap();
    assert!(near > 1e9);
}

#[test]
fn kappa_pure_power() {
    assert_eq!(zeta_kappa(-1.0, 0.0, 2.0, 0.0).unwrap(), 1.0);
    for g in [-0.3, -1.7, -4.25] {
        assert_eq!(zeta_kappa(g, 0.0, 3.0, 1.0).unwrap(), -g);
    }
}

#[test]
fn kappa_log_case_matches_dense_scan() {
    let (n, d) = (3.0, -0.5);
    let g1 = -0.5 * (n + d);
    let kappa = zeta_kappa(g1, -1.0, 2.0, 1.0).unwrap();
    let g = |s: f64| s / ((2.0 + s) * (2.0 + s).ln());
    let best = (0..=2_000_000)
        .map(|k| g(1.0 + 1e-5 * k as f64))
        .fold(0.0, f64::max);
    assert!((kappa - (-g1 + best)).abs() < 1e-9, "{kappa} vs {}", -g1 + best);
    assert!((best - 0.37336).abs() < 1e-4);
}

#[test]
fn kappa_rejects_increasing_zeta() {
    assert!(matches!(zeta_kappa(1.0, 0.0, 2.0, 0.0), Err(BoundsError::Precondition(_))));
    assert!(matches!(zeta_kappa(0.0, 1.0, 2.0, 1.0), Err(BoundsError::Precondition(_))));
    assert!(zeta_kappa(-1.0, 0.0, 0.5, 0.0).is_err());
}

#[test]
fn global_envelope_trivial_weight() {
    let u = power_profile(3, 0.0);
    let spec = PotentialSpec::zero(3).unwrap();
    let env = Envelope::global(&u, &spec, Verdict::Subcritical).unwrap();
    for (r, rho, cos, t) in [(0.3, 2.0, 0.1, 0.7), (5.0, 5.0, -1.0, 2.0), (1.0, 0.01, 1.0, 0.05)] {
        let d2 = r * r + rho * rho - 2.0 * r * rho * cos;
        let expect = f64::powf(t, -1.5) * (-d2 / t).exp();
        let got = env.eval(r, rho, cos, t, 1.0).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-13);
    }
}

#[test]
fn global_envelope_equals_power_display() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, lambda) in [(3u32, -0.2), (3, -0.25), (5, 1.3), (2, 0.4)] {
        let a = exponents(n, lambda).unwrap().a_plus;
        let sigma = -a;
        let u = power_profile(n, a);
        let spec = PotentialSpec::pure(n, lambda).unwrap();
        let env = Envelope::global(&u, &spec, Verdict::Subcritical).unwrap();
        for _ in 0..200 {
            let r = 10f64.powf(rng.random_range(-3.0..2.0));
            let rho = 10f64.powf(rng.random_range(-3.0..2.0));
            let t = 10f64.powf(rng.random_range(-3.0..2.0));
            let cos = rng.random_range(-1.0..1.0);
            let c = 10f64.powf(rng.random_range(-1.0..1.0));
            let s = t.sqrt();
            let d2 = r * r + rho * rho - 2.0 * r * rho * cos;
            let display = c
                * t.powf(-0.5 * n as f64 + sigma)
                * r.min(s).powf(-sigma)
                * rho.min(s).powf(-sigma)
                * (-d2 / (c * t)).exp();
            let got = env.eval(r, rho, cos, t, c).unwrap();
            if display > 1e-250 {
                assert!((got / display - 1.0).abs() < 1e-12, "{got} vs {display}");
            }
        }
    }
}

#[test]
fn two_sided_with_unit_weight_is_volume_normalized() {
    let w = WeightProfile::new(power_profile(3, 0.0)).unwrap();
    let env = Envelope::two_sided(&w);
    for (r, rho, cos, t, c) in [(1.0, 2.0, 0.3, 0.5f64, 4.0f64), (0.2, 0.2, 1.0, 1.0, 1.0), (3.0, 0.5, -0.5, 0.01, 9.0)] {
        let d2 = r * r + rho * rho - 2.0 * r * rho * cos;
        let expect = c / ball_volume(3, t.sqrt()) * (-d2 / (c * t)).exp();
        let got = env.eval(r, rho, cos, t, c).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-8, "{got} vs {expect}");
    }
}

#[test]
fn envelope_increases_in_constant() {
    let u = power_profile(3, -0.3);
    let w = WeightProfile::new(u.clone()).unwrap();
    let spec = PotentialSpec::pure(3, -0.3 * 0.7).unwrap();
    let envs = [
        Envelope::two_sided(&w),
        Envelope::global(&u, &spec, Verdict::Subcritical).unwrap(),
        Envelope::gaussian_rate(&w, 0.5).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for env in &envs {
        for _ in 0..50 {
            let r = 10f64.powf(rng.random_range(-1.0..1.0));
            let rho = 10f64.powf(rng.random_range(-1.0..1.0));
            let t = 10f64.powf(rng.random_range(-1.0..1.0));
            let cos = rng.random_range(-1.0..1.0);
            let c1 = 10f64.powf(rng.random_range(-1.0..1.0));
            let c2 = c1 * 1.01;
            assert!(env.ln_eval(r, rho, cos, t, c1).unwrap() < env.ln_eval(r, rho, cos, t, c2).unwrap());
        }
    }
}

#[test]
fn free_gaussian_fits_its_own_envelope() {
    let u = power_profile(3, 0.0);
    let spec = PotentialSpec::zero(3).unwrap();
    let env = Envelope::global(&u, &spec, Verdict::Subcritical).unwrap();
    let slice = free_slice(3, 300, 11);
    let up = fit_constant(&slice, &env, Side::Upper, (1e-3, 1e3)).unwrap();
    assert!(up.fitted_constant >= (4.0 * PI).powf(-1.5));
    assert!(up.ratio_stats.max <= 1.0 && up.ratio_stats.max > 1.0 - 1e-10);
    for s in &slice.samples {
        assert!(s.p.ln() <= env.ln_eval(s.r, s.rho, s.cos_theta, s.t, up.fitted_constant).unwrap());
    }
    let lo = fit_constant(&slice, &env, Side::Lower, (1e-6, 1e3)).unwrap();
    assert!(lo.fitted_constant > 0.0 && lo.fitted_constant <= up.fitted_constant);
    assert!(lo.ratio_stats.min >= 1.0 && lo.ratio_stats.min < 1.0 + 1e-10);
    for s in &slice.samples {
        assert!(s.p.ln() >= env.ln_eval(s.r, s.rho, s.cos_theta, s.t, lo.fitted_constant).unwrap());
    }
}

#[test]
fn fit_reports_bad_brackets() {
    let u = power_profile(3, 0.0);
    let spec = PotentialSpec::zero(3).unwrap();
    let env = Envelope::global(&u, &spec, Verdict::Subcritical).unwrap();
    let slice = free_slice(3, 50, 5);
    let err = fit_constant(&slice, &env, Side::Upper, (1e-6, 1e-5)).unwrap_err();
    assert!(matches!(err, BoundsError::Bracket { side: Side::Upper, .. }));
    let err = fit_constant(&slice, &env, Side::Upper, (1e3, 1e4)).unwrap_err();
    assert!(matches!(err, BoundsError::Bracket { .. }));
    let err = fit_constant(&slice, &env, Side::Lower, (10.0, 1e3)).unwrap_err();
    assert!(matches!(err, BoundsError::Bracket { side: Side::Lower, .. }));
}

fn far_field_free_slice(n: u32) -> KernelSlice {
    let mut samples = Vec::new();
    for &t in &[0.05f64, 0.3, 1.0] {
        for k in 0..=20 {
            let q = 10.0 * 10f64.powf(k as f64 / 20.0);
            let (r, rho) = (3.0 * t.sqrt(), 4.0 * t.sqrt());
            let cos = ((r * r + rho * rho - q * t) / (2.0 * r * rho)).clamp(-1.0, 1.0);
            let d2 = r * r + rho * rho - 2.0 * r * rho * cos;
            if (d2 / t - q).abs() < 1e-9 * q {
                samples.push(sample(n, r, rho, cos, t));
            } else {
                let rho = r + (q * t).sqrt();
                samples.push(sample(n, r, rho, 1.0, t));
            }
        }
    }
    KernelSlice { samples, excluded: 0 }
}

#[test]
fn free_rate_is_one_quarter() {
    let w = WeightProfile::new(power_profile(3, 0.0)).unwrap();
    let env = Envelope::two_sided(&w);
    let slice = far_field_free_slice(3);
    for eps in [0.5, 0.01] {
        let rep = gaussian_rate(&slice, &env, FarField::default(), eps).unwrap();
        assert!((rep.slope - 0.25).abs() < 0.0025, "{}", rep.slope);
        assert!(rep.passes);
    }
}

#[test]
fn rate_needs_a_decade() {
    let w = WeightProfile::new(power_profile(3, 0.0)).unwrap();
    let env = Envelope::two_sided(&w);
    let mut slice = far_field_free_slice(3);
    slice.samples.retain(|s| {
        let d = s.distance();
        d * d / s.t < 30.0
    });
    assert!(matches!(
        gaussian_rate(&slice, &env, FarField::default(), 0.5),
        Err(BoundsError::Coverage { .. })
    ));
}

#[test]
fn envelope_guards() {
    let u = power_profile(3, 0.0);
    let spec = PotentialSpec::pure(3, 1.0).unwrap();
    assert!(matches!(
        Envelope::global(&u, &spec, Verdict::Critical),
        Err(BoundsError::Hypothesis(_))
    ));
    assert!(Envelope::global(&u, &spec, Verdict::Supercritical).is_err());
    let hardy = PotentialSpec::pure(3, -0.25).unwrap();
    assert!(Envelope::global(&u, &hardy, Verdict::Critical).is_ok());
    let attractive = PotentialSpec::pure(3, -0.2).unwrap();
    assert!(Envelope::polynomial(&u, &attractive).is_err());
    let repulsive = PotentialSpec::pure(3, 0.75).unwrap();
    let a = exponents(3, 0.75).unwrap().a_plus;
    let up = power_profile(3, a);
    assert!(Envelope::polynomial(&up, &repulsive).is_ok());
    assert!(Envelope::polynomial(&u, &repulsive).is_ok());
}

#[test]
fn zeta_choice_by_regime() {
    let spec = PotentialSpec::pure(3, -0.25).unwrap();
    let z = Zeta::for_operator(&spec, Verdict::Subcritical).unwrap();
    assert_eq!((z.gamma1, z.gamma2, z.c), (-0.5 * (3.0 - 0.5), -1.0, 2.0));
    let z = Zeta::for_operator(&spec, Verdict::Critical).unwrap();
    assert_eq!(z.gamma2, 0.0);
    let spec = PotentialSpec::pure(3, 0.75).unwrap();
    let z = Zeta::for_operator(&spec, Verdict::Subcritical).unwrap();
    assert!((z.gamma1 + 0.5 * (3.0 + 0.5)).abs() < 1e-15);
    let h = 1e-6;
    assert!((z.derivative(2.0) - (z.eval(2.0 + h) - z.eval(2.0 - h)) / (2.0 * h)).abs() < 1e-8);
}

fn region(r_lo: f64) -> SupersolutionRegion {
    SupersolutionRegion {
        r_range: (r_lo, 20.0),
        times: vec![1.0, 2.0, 5.0, 10.0],
    }
}

#[test]
fn supersolution_free_case() {
    let u = power_profile(3, 0.0);
    let fu = f_of_u(&u).unwrap();
    let spec = PotentialSpec::zero(3).unwrap();
    for kappa in [0.5, 1.5, 3.0] {
        let z = Zeta::new(-kappa, 0.0, 2.0).unwrap();
        let rep = verify_supersolution(&u, &fu, z, kappa, &spec, &region(0.05)).unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!(rep.min_residual < 5e-3);
        assert!(rep.nonpositive_w > 0);
    }
}

#[test]
fn supersolution_pure_power_and_undersized_kappa() {
    for lambda in [-0.2, 0.5] {
        let spec = PotentialSpec::pure(3, lambda).unwrap();
        let a = exponents(3, lambda).unwrap().a_plus;
        let u = power_profile(3, a);
        let fu = f_of_u(&u).unwrap();
        let z = Zeta::for_operator(&spec, Verdict::Subcritical).unwrap();
        let kappa = zeta_kappa(z.gamma1, z.gamma2, z.c, 1.0).unwrap();
        let rep = verify_supersolution(&u, &fu, z, kappa, &spec, &region(0.2)).unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!(rep.tol_disc < 1e-2);
        let bad = verify_supersolution(&u, &fu, z, 0.5 * kappa, &spec, &region(0.2)).unwrap();
        assert!(!bad.passes);
        assert!(bad.min_residual < -0.1);
    }
}
