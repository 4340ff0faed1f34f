//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are bisected in order of decreasing error estimate until the summed
//! estimate meets `max(abs_tol, rel_tol * |I|)`. Infinite endpoints are mapped
//! onto a finite interval with `x = t / (1 - |t|)`, which is the inverse of
//! `t = x / (1 + |x|)` and treats heavy and light tails alike.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and refinement budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any single panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 60,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Param(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::Param("max_depth must be at least 1".into()));
        }
        Ok(())
    }

    /// Same budget, tighter tolerances.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_depth: self.max_depth,
        }
    }
}

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
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

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Hard cap on the number of live panels.
const MAX_PANELS: usize = 100_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    result: f64,
    error: f64,
    depth: u32,
    seq: u64,
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
    // Largest error first; among equal errors the older panel wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x, value: v })
        }
    };

    let f_center = eval(center)?;
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let result = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((result, err))
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut seq = 0u64;

    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (result, error) = gauss_kronrod(f, w[0], w[1])?;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            result,
            error,
            depth: 0,
            seq,
        });
        seq += 1;
    }

    let sums = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(r, e), p| (r + p.result, e + p.error))
    };
    let (mut total, mut err) = sums(&heap, &frozen);
    let mut frozen_err = 0.0;

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= tol {
            // Running sums drift; confirm against a fresh summation.
            let (t, e) = sums(&heap, &frozen);
            total = t;
            err = e;
            if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
                return Ok(total);
            }
        }

        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                let (t, e) = sums(&heap, &frozen);
                return Err(Error::NonConvergence {
                    estimate: t,
                    error: e,
                    tolerance: spec.abs_tol.max(spec.rel_tol * t.abs()),
                });
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= spec.max_depth
            || heap.len() + frozen.len() >= MAX_PANELS
            || mid <= worst.a
            || mid >= worst.b
        {
            frozen_err += worst.error;
            frozen.push(worst);
            // Frozen panels cannot improve any further.
            if frozen_err > spec.abs_tol.max(spec.rel_tol * total.abs()) {
                let (t, e) = sums(&heap, &frozen);
                return Err(Error::NonConvergence {
                    estimate: t,
                    error: e,
                    tolerance: spec.abs_tol.max(spec.rel_tol * t.abs()),
                });
            }
            continue;
        }

        total -= worst.result;
        err -= worst.error;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (result, error) = gauss_kronrod(f, a, b)?;
            total += result;
            err += error;
            heap.push(Panel {
                a,
                b,
                result,
                error,
                depth: worst.depth + 1,
                seq,
            });
            seq += 1;
        }
    }
}

/// Maps the real line onto (-1, 1).
#[inline]
pub fn to_unit(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        -1.0
    } else {
        x / (1.0 + x.abs())
    }
}

/// Inverse of [`to_unit`].
#[inline]
pub fn from_unit(t: f64) -> f64 {
    t / (1.0 - t.abs())
}

/// Integrates `f` over `(lo, hi)`; either endpoint may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_breaks(f, lo, hi, &[], spec)
}

/// As [`integrate`], seeding the panel list with interior `breaks`.
///
/// Breaks outside `(lo, hi)` are ignored.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::Domain(format!("empty integration interval ({lo}, {hi})")));
    }
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();

    if lo.is_finite() && hi.is_finite() {
        let mut cuts = Vec::with_capacity(inner.len() + 2);
        cuts.push(lo);
        cuts.extend(inner);
        cuts.push(hi);
        return adaptive(&f, &cuts, spec);
    }

    let mut cuts = Vec::with_capacity(inner.len() + 2);
    cuts.push(to_unit(lo));
    cuts.extend(inner.into_iter().map(to_unit));
    cuts.push(to_unit(hi));
    cuts.dedup();
    let g = |t: f64| {
        let s = 1.0 - t.abs();
        let v = f(t / s);
        if v == 0.0 {
            0.0
        } else {
            v / (s * s)
        }
    };
    adaptive(&g, &cuts, spec)
}
