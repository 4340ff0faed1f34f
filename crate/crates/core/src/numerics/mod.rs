//! Deterministic numerical kernels shared by every other module.

pub mod fit;
pub mod quadrature;
pub mod roots;
pub mod supnorm;

pub use fit::{fit_loglog, FitResult};
pub use quadrature::{integrate, integrate_with_breaks, QuadratureSpec};
pub use roots::find_root;
pub use supnorm::{sup_norm, GridScale, SupNorm};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn integrate_is_linear(
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            mu in -2.0f64..2.0,
            k in 0.5f64..4.0,
        ) {
            let spec = QuadratureSpec::default();
            let f = move |x: f64| (-(x - mu).powi(2)).exp();
            let g = move |x: f64| 1.0 / (1.0 + (k * x).powi(2));
            let lhs = integrate(|x| a * f(x) + b * g(x), -10.0, 10.0, &spec).unwrap();
            let rhs = a * integrate(f, -10.0, 10.0, &spec).unwrap()
                + b * integrate(g, -10.0, 10.0, &spec).unwrap();
            let scale = 1.0 + a.abs() + b.abs();
            prop_assert!((lhs - rhs).abs() <= 10.0 * spec.abs_tol * scale + 2.0 * spec.rel_tol * lhs.abs());
        }

        #[test]
        fn root_residual_is_minimal(r in -50.0f64..50.0, tol in 1e-12f64..1e-6) {
            let g = |x: f64| (x - r) * (1.0 + 0.1 * x * x);
            let x = find_root(g, -60.0, 60.0, tol).unwrap();
            prop_assert!((x - r).abs() <= tol + 1e-12);
            let at = g(x).abs();
            prop_assert!(at <= g(x - tol).abs().max(g(x + tol).abs()));
        }

        #[test]
        fn refinement_never_lowers_the_grid_max(c in -3.0f64..3.0, w in 0.1f64..2.0) {
            let d = |x: f64| (-(x - c).powi(2) / w).exp() * x.sin();
            let n = 128;
            let s = sup_norm(d, -5.0, 5.0, &GridScale::Linear, n).unwrap();
            let grid_max = (0..n)
                .map(|i| d(-5.0 + (i as f64 + 0.5) / n as f64 * 10.0).abs())
                .fold(0.0, f64::max);
            prop_assert!(s.value >= grid_max);
        }
    }
}
