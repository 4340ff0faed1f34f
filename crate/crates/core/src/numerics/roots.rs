use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Brent's bracketing root finder.
///
/// Returns the bracket end with the smaller residual once the bracket is no
/// wider than `tol` (or a few ulps of the root when `tol` is below working
/// precision). Interpolation steps that fail to shrink the bracket fall back
/// to bisection, so convergence is guaranteed for continuous `g`.
pub fn find_root<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Param(format!("root tolerance must be positive, got {tol}")));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain(format!("bracket [{lo}, {hi}] must be finite")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::NonFinite {
            x: if fa.is_nan() { a } else { b },
            value: f64::NAN,
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            g_lo: fa,
            g_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 0.5 * tol.max(4.0 * f64::EPSILON * b.abs());
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = g(b);
        if fb.is_nan() {
            return Err(Error::NonFinite { x: b, value: fb });
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_four() {
        let x = find_root(|x| x * x - 4.0, 0.0, 10.0, 1e-12).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_quantile() {
        let x = find_root(|x: f64| (1.0 - (-x).exp()) - (1.0 - 1.0 / 8.0), 0.0, 50.0, 1e-12).unwrap();
        assert!((x - 8f64.ln()).abs() < 1e-11, "{x}");
    }

    #[test]
    fn pareto_quantile() {
        for n in [2.0, 7.0, 100.0, 12345.0] {
            let x = find_root(|x| (1.0 - 1.0 / x) - (1.0 - 1.0 / n), 1.0, 10.0 * n, 1e-12).unwrap();
            assert!((x - n).abs() <= 1e-10 * n, "n={n} x={x}");
        }
    }

    #[test]
    fn unbracketed() {
        let r = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn endpoint_root() {
        assert_eq!(find_root(|x| x - 1.0, 1.0, 3.0, 1e-9).unwrap(), 1.0);
    }
}
