//! CSV and JSON emitters. Floats are written with 17 significant digits so that
//! refinement studies can diff outputs bit for bit.

use crate::bounds::Envelope;
use crate::error::Error;
use crate::harmonic::{FunctionalProfile, HarmonicProfile};
use crate::heatkernel::KernelSlice;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row<W: Write>(w: &mut W, cols: &[f64]) -> io::Result<()> {
    let line: Vec<String> = cols.iter().map(|&x| fmt_f64(x)).collect();
    writeln!(w, "{}", line.join(","))
}

pub fn write_profile_csv<W: Write>(w: &mut W, profile: &HarmonicProfile) -> io::Result<()> {
    writeln!(w, "r,U,dU")?;
    for (i, &r) in profile.grid.nodes().iter().enumerate() {
        row(w, &[r, profile.values[i], profile.derivative[i]])?;
    }
    Ok(())
}

pub fn write_functional_csv<W: Write>(w: &mut W, f: &FunctionalProfile) -> io::Result<()> {
    writeln!(w, "r,F,dF")?;
    for (i, &r) in f.grid.nodes().iter().enumerate() {
        row(w, &[r, f.values[i], f.derivative[i]])?;
    }
    Ok(())
}

pub fn write_slice_csv<W: Write>(w: &mut W, slice: &KernelSlice) -> io::Result<()> {
    writeln!(w, "r,rho,cos_theta,t,p,truncation")?;
    for s in &slice.samples {
        row(w, &[s.r, s.rho, s.cos_theta, s.t, s.p, s.truncation])?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallMass {
    pub center: f64,
    pub radius: f64,
    pub mass: f64,
}

pub fn write_ball_masses_csv<W: Write>(w: &mut W, rows: &[BallMass]) -> io::Result<()> {
    writeln!(w, "center,radius,mass")?;
    for b in rows {
        row(w, &[b.center, b.radius, b.mass])?;
    }
    Ok(())
}

/// Scatter of `|x - y|² / t` against `p / envelope(C)`.
pub fn write_ratio_csv<W: Write>(w: &mut W, slice: &KernelSlice, env: &Envelope, c: f64) -> Result<(), Error> {
    writeln!(w, "r,rho,cos_theta,t,q,ratio")?;
    for s in &slice.samples {
        let d = s.distance();
        let ratio = (s.p.ln() - env.ln_eval(s.r, s.rho, s.cos_theta, s.t, c)?).exp();
        row(w, &[s.r, s.rho, s.cos_theta, s.t, d * d / s.t, ratio])?;
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(io::Error::other(e)))
}
