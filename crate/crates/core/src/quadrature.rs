//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol·|I|)` or the interval budget runs out.
//! Subdivision order is fully determined by the integrand values, so repeated
//! calls are bit-identical.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl QuadResult {
    /// The value, or a quadrature error when the estimate exceeds `fail_tol`.
    pub fn within(self, fail_tol: f64) -> Result<C64> {
        if self.error <= fail_tol {
            Ok(self.value)
        } else {
            Err(Error::Quadrature {
                estimate: self.error,
                target: fail_tol,
                intervals: self.intervals,
            })
        }
    }
}

struct Panel {
    lo: f64,
    hi: f64,
    value: C64,
    error: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn kronrod<F: Fn(f64) -> C64>(f: &F, lo: f64, hi: f64) -> (C64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kron += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    (value, error)
}

/// Integrate `f` over `[lo, hi]`, splitting first at `breaks` (which must
/// lie strictly inside and be increasing).
pub fn integrate_with_breaks<F>(f: F, lo: f64, hi: f64, breaks: &[f64], opts: &QuadOptions) -> QuadResult
where
    F: Fn(f64) -> C64,
{
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut edges = Vec::with_capacity(breaks.len() + 2);
    edges.push(lo);
    edges.extend(breaks.iter().copied().filter(|&x| x > lo && x < hi));
    edges.push(hi);

    let mut total = C64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let (value, error) = kronrod(&f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Panel {
            lo: w[0],
            hi: w[1],
            value,
            error,
            seq,
        });
        seq += 1;
    }

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_err <= target {
            return QuadResult {
                value: total,
                error: total_err,
                intervals: heap.len(),
                converged: true,
            };
        }
        if heap.len() >= opts.max_intervals {
            break;
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval can no longer be split in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod(&f, worst.lo, mid);
        let (v2, e2) = kronrod(&f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
            seq,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
            seq: seq + 1,
        });
        seq += 2;
    }

    // Re-sum to shed accumulated rounding from the running updates.
    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = panels.iter().fold(C64::new(0.0, 0.0), |acc, p| acc + p.value);
    let error = panels.iter().map(|p| p.error).sum();
    QuadResult {
        value,
        error,
        intervals: panels.len(),
        converged: false,
    }
}

pub fn integrate<F>(f: F, lo: f64, hi: f64, opts: &QuadOptions) -> QuadResult
where
    F: Fn(f64) -> C64,
{
    integrate_with_breaks(f, lo, hi, &[], opts)
}
