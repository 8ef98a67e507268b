//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex integrands
//! whose values carry their own error bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::Result;

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
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub(super) struct Quadrature {
    pub value: Complex64,
    /// Discretisation error (Kronrod − Gauss).
    pub error: f64,
    /// Integral of the error bounds attached to the integrand values.
    pub attached: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    attached: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn panel<F>(f: &mut F, lo: f64, hi: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<(Complex64, f64)>,
{
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut attached = 0.0;
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        let points: &[f64] = if x == 0.0 { &[mid] } else { &[mid - half * x, mid + half * x] };
        for &t in points {
            let (v, e) = f(t)?;
            kronrod += v * w;
            attached += e * w;
            if i % 2 == 1 {
                gauss += v * WG[i / 2];
            }
        }
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
        attached: attached * half,
    })
}

/// Integrates `f` over [lo, hi] until the summed panel error is at most
/// max(abs_tol, rel_tol·|I|, attached error), bisecting the worst panel first.
pub(super) fn integrate<F>(mut f: F, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64, max_panels: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<(Complex64, f64)>,
{
    let mut heap = BinaryHeap::new();
    heap.push(panel(&mut f, lo, hi)?);
    loop {
        let value: Complex64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let attached: f64 = heap.iter().map(|p| p.attached).sum();
        let done = error <= abs_tol.max(rel_tol * value.norm()).max(attached);
        if done || heap.len() >= max_panels {
            return Ok(Quadrature {
                value,
                error,
                attached,
                converged: done,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            heap.push(worst);
            return Ok(Quadrature {
                value,
                error,
                attached: heap.iter().map(|p| p.attached).sum(),
                converged: false,
            });
        }
        heap.push(panel(&mut f, worst.lo, mid)?);
        heap.push(panel(&mut f, mid, worst.hi)?);
    }
}
