//! Spectral singularities: intensities at which an improper pole lands on the
//! real `k` axis.
//!
//! A pole is followed in `b` by seeding Newton at each new intensity with the
//! previous root. When `Im k` changes sign between two samples, bisection in
//! `b` pins the crossing. For this model the crossings sit at `ba = (m + ½)π`
//! with `k* = −b`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DeltaShellPotential;
use crate::oracle::jost_function;
use crate::pole_solver::{find_poles, polish, pole_equation_residual, Pole};
use crate::C64;

/// Default number of uniform continuation steps across a bracket.
pub const DEFAULT_STEPS: usize = 64;

/// Required `|Im k*|` at a reported crossing.
pub const CROSSING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub b: f64,
    pub k: C64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub family: i32,
    pub b_star: f64,
    pub k_star: C64,
    /// `|2k − b(e^{2ika} − 1)|` at the crossing.
    pub pole_residual: f64,
    /// `|F(k*)|`.
    pub jost_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleTrajectory {
    pub family: i32,
    pub radius: f64,
    pub samples: Vec<TrajectorySample>,
    pub crossing: Option<Singularity>,
}

impl PoleTrajectory {
    /// Index of the first sample pair between which `Im k` changes sign.
    fn sign_change(&self) -> Option<usize> {
        self.samples
            .windows(2)
            .position(|w| (w[0].k.im > 0.0) != (w[1].k.im > 0.0) || w[1].k.im == 0.0)
    }
}

fn shell(b: f64, a: f64) -> Result<DeltaShellPotential> {
    DeltaShellPotential::new(b, a)
}

/// Follow `pole₀` (a root at `b_from`) to `b_to` in `steps` uniform steps,
/// halving a step whenever Newton fails or the root jumps by more than half
/// the local pole spacing.
pub fn track_pole(pot0: &DeltaShellPotential, pole0: Pole, b_from: f64, b_to: f64, steps: usize) -> Result<PoleTrajectory> {
    if !(b_from > 0.0 && b_to > 0.0 && b_from.is_finite() && b_to.is_finite()) {
        return Err(Error::domain("intensity must be positive"));
    }
    if steps < 2 {
        return Err(Error::domain("continuation needs at least 2 steps"));
    }
    let a = pot0.radius();
    let k0 = polish(pole0.k, &shell(b_from, a)?)?;
    let mut samples = vec![TrajectorySample { b: b_from, k: k0 }];
    let span = b_to - b_from;
    if span != 0.0 {
        // half the asymptotic spacing π/a between neighbouring poles
        let max_jump = 0.5 * PI / a;
        let nominal = span / steps as f64;
        let min_step = span.abs() / 2f64.powi(20);
        let (mut b, mut k) = (b_from, k0);
        let mut h = nominal;
        while (b_to - b) * span.signum() > 0.0 {
            if (b + h - b_to) * span.signum() > 0.0 {
                h = b_to - b;
            }
            let next_b = b + h;
            match polish(k, &shell(next_b, a)?) {
                Ok(next_k) if (next_k - k).norm() <= max_jump => {
                    b = next_b;
                    k = next_k;
                    samples.push(TrajectorySample { b, k });
                    h = nominal;
                }
                _ => {
                    h *= 0.5;
                    if h.abs() < min_step {
                        return Err(Error::TrajectoryLost { b, min_step });
                    }
                }
            }
        }
    }
    let mut traj = PoleTrajectory {
        family: pole0.index,
        radius: a,
        samples,
        crossing: None,
    };
    if let Some(i) = traj.sign_change() {
        traj.crossing = Some(refine_crossing(traj.family, a, traj.samples[i], traj.samples[i + 1])?);
    }
    Ok(traj)
}

/// Bisection in `b` on the sign of `Im k(b)`.
fn refine_crossing(family: i32, a: f64, s0: TrajectorySample, s1: TrajectorySample) -> Result<Singularity> {
    let (mut lo, mut hi) = (s0, s1);
    let mut best = if lo.k.im.abs() < hi.k.im.abs() { lo } else { hi };
    for _ in 0..200 {
        if best.k.im.abs() < CROSSING_TOL * 1e-3 {
            break;
        }
        let b = 0.5 * (lo.b + hi.b);
        if b == lo.b || b == hi.b {
            break;
        }
        let seed = if (b - lo.b).abs() < (hi.b - b).abs() { lo.k } else { hi.k };
        let mid = TrajectorySample {
            b,
            k: polish(seed, &shell(b, a)?)?,
        };
        if mid.k.im.abs() < best.k.im.abs() {
            best = mid;
        }
        if (mid.k.im > 0.0) == (lo.k.im > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.k.im.abs() >= CROSSING_TOL {
        return Err(Error::NoSingularity {
            family,
            lo: s0.b.min(s1.b),
            hi: s0.b.max(s1.b),
        });
    }
    let pot = shell(best.b, a)?;
    Ok(Singularity {
        family,
        b_star: best.b,
        k_star: best.k,
        pole_residual: pole_equation_residual(best.k, &pot)?.norm(),
        jost_residual: jost_function(best.k, &pot).norm(),
    })
}

/// Track `family` from `b_from` to `b_to` (either direction) and refine the
/// first real-axis crossing.
pub fn scan_singularity(pot: &DeltaShellPotential, family: i32, b_from: f64, b_to: f64, steps: usize) -> Result<Singularity> {
    if family == 0 {
        return Err(Error::domain("pole family index must be non-zero"));
    }
    let start = pot.with_intensity(b_from)?;
    let n = family.unsigned_abs() as usize;
    let poles = find_poles(&start, n, n)?;
    let pole0 = *poles.get(family).expect("solver returned the requested families");
    let traj = track_pole(&start, pole0, b_from, b_to, steps)?;
    traj.crossing.ok_or(Error::NoSingularity {
        family,
        lo: b_from.min(b_to),
        hi: b_from.max(b_to),
    })
}

/// Crossing of `family` inside `[b_lo, b_hi]`, scanning upward.
pub fn find_singularity(pot: &DeltaShellPotential, family: i32, b_lo: f64, b_hi: f64) -> Result<Singularity> {
    if !(b_lo < b_hi) {
        return Err(Error::domain(format!("intensity bracket must satisfy lo < hi, got {b_lo}:{b_hi}")));
    }
    scan_singularity(pot, family, b_lo, b_hi, DEFAULT_STEPS)
}

/// Independent families, scanned in parallel; results follow `families`.
pub fn find_singularities(pot: &DeltaShellPotential, families: &[i32], b_lo: f64, b_hi: f64) -> Vec<Result<Singularity>> {
    families
        .par_iter()
        .map(|&f| find_singularity(pot, f, b_lo, b_hi))
        .collect()
}
