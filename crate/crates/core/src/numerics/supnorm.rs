use crate::error::{Error, Result};
use crate::numerics::quadrature::{from_unit, to_unit};

/// Minimum number of grid points accepted by [`sup_norm`].
pub const MIN_GRID_POINTS: usize = 64;

/// How grid points are laid out over the search interval.
#[derive(Clone, Copy)]
pub enum GridScale<'a> {
    /// Equispaced in `x`; needs a finite interval (falls back to `Rational`).
    Linear,
    /// Equispaced in `t = x / (1 + |x|)`.
    Rational,
    /// Equispaced in probability under a reference law.
    Quantile {
        cdf: &'a dyn Fn(f64) -> f64,
        quantile: &'a dyn Fn(f64) -> f64,
    },
}

impl std::fmt::Debug for GridScale<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridScale::Linear => f.write_str("Linear"),
            GridScale::Rational => f.write_str("Rational"),
            GridScale::Quantile { .. } => f.write_str("Quantile"),
        }
    }
}

/// Location and value of the largest `|d(x)|` found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorm {
    pub location: f64,
    pub value: f64,
}

fn grid(lo: f64, hi: f64, scale: &GridScale<'_>, n: usize) -> Vec<f64> {
    let u = |i: usize| (i as f64 + 0.5) / n as f64;
    match scale {
        GridScale::Linear if lo.is_finite() && hi.is_finite() => {
            (0..n).map(|i| lo + u(i) * (hi - lo)).collect()
        }
        GridScale::Linear | GridScale::Rational => {
            let (tlo, thi) = (to_unit(lo), to_unit(hi));
            (0..n).map(|i| from_unit(tlo + u(i) * (thi - tlo))).collect()
        }
        GridScale::Quantile { cdf, quantile } => {
            let plo = if lo == f64::NEG_INFINITY { 0.0 } else { cdf(lo) };
            let phi = if hi == f64::INFINITY { 1.0 } else { cdf(hi) };
            (0..n)
                .map(|i| quantile(plo + u(i) * (phi - plo)).clamp(lo, hi))
                .collect()
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_max<D: Fn(f64) -> f64>(d: &D, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let eval = |x: f64| -> Result<f64> {
        let v = d(x).abs();
        if v.is_nan() {
            Err(Error::NonFinite { x, value: v })
        } else {
            Ok(v)
        }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fe = eval(e)?;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + c.abs()) {
            break;
        }
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + INV_PHI * (b - a);
            fe = eval(e)?;
        }
    }
    Ok(if fc >= fe { (c, fc) } else { (e, fe) })
}

/// Approximates `sup |d(x)|` over `(lo, hi)`.
///
/// `|d|` is evaluated at `grid_points` points laid out by `scale`; the three
/// largest grid values (first index wins ties) are then refined by
/// golden-section search between their neighbours. Refinement only ever
/// raises the reported value.
pub fn sup_norm<D: Fn(f64) -> f64>(
    d: D,
    lo: f64,
    hi: f64,
    scale: &GridScale<'_>,
    grid_points: usize,
) -> Result<SupNorm> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::Domain(format!("empty search interval ({lo}, {hi})")));
    }
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::Param(format!(
            "sup_norm needs at least {MIN_GRID_POINTS} grid points, got {grid_points}"
        )));
    }

    let xs = grid(lo, hi, scale, grid_points);
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = d(x).abs();
        if v.is_nan() {
            return Err(Error::NonFinite { x, value: v });
        }
        vals.push(v);
    }

    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));

    let mut best = SupNorm {
        location: xs[order[0]],
        value: vals[order[0]],
    };
    for &i in order.iter().take(3) {
        let left = if i > 0 {
            xs[i - 1]
        } else if lo.is_finite() {
            lo
        } else {
            xs[i]
        };
        let right = if i + 1 < xs.len() {
            xs[i + 1]
        } else if hi.is_finite() {
            hi
        } else {
            xs[i]
        };
        if right <= left {
            continue;
        }
        let (x, v) = golden_max(&d, left, right)?;
        if v > best.value {
            best = SupNorm { location: x, value: v };
        }
    }
    Ok(best)
}
