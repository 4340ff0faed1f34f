//! Law of the normalized maximum `(M_n - b_n) / a_n` and the penultimate
//! family around the Gumbel law.
//!
//! Powers of `F` are always taken as `exp(k log F)` with a tail-accurate
//! `log F`; `n` reaches 10^6 while `F̄` falls to 10^-6 and below.

use serde::Serialize;

use crate::distributions::{DistributionModel, DomainTag};
use crate::error::{Error, Result};
use crate::maxstable::{limit_for, MaxStableLaw};
use crate::norming::{
    norming_frechet, norming_gumbel_von_mises, remainder_gumbel, standard_norming, NormingPair,
};
use crate::numerics::{sup_norm, GridScale, QuadratureSpec, SupNorm};

/// Range of `x` outside which `Λ(x)` is numerically 0 or 1:
/// `Λ(x) > 1e-300` and `1 - Λ(x) > 1e-16`.
pub const GUMBEL_EFFECTIVE_RANGE: (f64, f64) = (-6.5, 36.8);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedMaximum {
    pub model: DistributionModel,
    pub n: u64,
    pub norming: NormingPair,
}

impl NormalizedMaximum {
    pub fn new(model: &DistributionModel, norming: NormingPair) -> Result<Self> {
        if norming.n < 2 {
            return Err(Error::Param(format!("sample size must be at least 2, got {}", norming.n)));
        }
        if !(norming.a_n > 0.0 && norming.a_n.is_finite() && norming.b_n.is_finite()) {
            return Err(Error::Param(format!(
                "invalid norming constants a_n = {}, b_n = {}",
                norming.a_n, norming.b_n
            )));
        }
        if model.domain_tag() == DomainTag::None {
            return Err(Error::NoDomain(model.name()));
        }
        Ok(Self {
            model: *model,
            n: norming.n,
            norming,
        })
    }

    /// Exact norming for max-stable parents, quantile norming otherwise.
    pub fn standard(model: &DistributionModel, n: u64, spec: &QuadratureSpec) -> Result<Self> {
        Self::new(model, standard_norming(model, n, spec)?)
    }

    /// Norming with `-n log F(b_n) = 1` (Gumbel domain) or `a_n = F^{←}(1 - 1/n)`
    /// (Fréchet domain).
    pub fn von_mises(model: &DistributionModel, n: u64) -> Result<Self> {
        let norming = match model.domain_tag() {
            DomainTag::Frechet(_) => norming_frechet(model, n)?,
            _ => norming_gumbel_von_mises(model, n)?,
        };
        Self::new(model, norming)
    }

    pub fn limit(&self) -> Result<MaxStableLaw> {
        limit_for(&self.model)
    }

    fn at(&self, x: f64) -> f64 {
        self.norming.a_n * x + self.norming.b_n
    }

    /// Left end of the support of the normalized maximum.
    pub fn lower_end(&self) -> f64 {
        let l = self.model.left_end();
        if l.is_finite() {
            (l - self.norming.b_n) / self.norming.a_n
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `log F^n(a_n x + b_n)`.
    pub fn log_cdf(&self, x: f64) -> f64 {
        let y = self.at(x);
        if y <= self.model.left_end() {
            return f64::NEG_INFINITY;
        }
        self.n as f64 * self.model.log_cdf(y)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.log_cdf(x).exp()
    }

    /// `g_n(x) = n a_n f(a_n x + b_n) F^{n-1}(a_n x + b_n)`.
    pub fn density(&self, x: f64) -> f64 {
        let y = self.at(x);
        let f = self.model.pdf(y);
        if !(f > 0.0) {
            return 0.0;
        }
        let log_f = self.model.log_cdf(y);
        if log_f == f64::NEG_INFINITY {
            return 0.0;
        }
        let n = self.n as f64;
        (n.ln() + self.norming.a_n.ln() + f.ln() + (n - 1.0) * log_f).exp()
    }
}

pub fn gn_density(nm: &NormalizedMaximum, x: f64) -> f64 {
    nm.density(x)
}

pub fn gn_cdf(nm: &NormalizedMaximum, x: f64) -> f64 {
    nm.cdf(x)
}

/// `F(z, x) = exp(-(1 + z x)^{-1/z})` on `1 + z x > 0`, for signed `z`.
///
/// Outside that half-line the value is 0 for `z > 0` and 1 for `z < 0`;
/// `z = 0` gives `Λ(x)`.
pub fn penultimate_cdf(z: f64, x: f64) -> f64 {
    if z == 0.0 {
        return MaxStableLaw::Gumbel.cdf(x);
    }
    let base = z * x;
    if base <= -1.0 {
        return if z > 0.0 { 0.0 } else { 1.0 };
    }
    (-(-base.ln_1p() / z).exp()).exp()
}

/// `sup_x |F(z, x) - Λ(x)|` over the effective range of `Λ`.
pub fn penultimate_distance(z: f64, grid_points: usize) -> Result<SupNorm> {
    let (lo, hi) = GUMBEL_EFFECTIVE_RANGE;
    sup_norm(
        |x| penultimate_cdf(z, x) - MaxStableLaw::Gumbel.cdf(x),
        lo,
        hi,
        &GridScale::Linear,
        grid_points,
    )
}

/// `sup |F^n(a_n x + b_n) - G(x)|` over `[lo, hi]`.
pub fn cdf_distance(nm: &NormalizedMaximum, lo: f64, hi: f64, grid_points: usize) -> Result<SupNorm> {
    let limit = nm.limit()?;
    sup_norm(|x| nm.cdf(x) - limit.cdf(x), lo, hi, &GridScale::Linear, grid_points)
}

/// Pointwise comparison of `F^n(a_n x + b_n)` with the penultimate pair
/// `F(z, x) ≤ F^n ≤ F(-z, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichReport {
    pub x: f64,
    /// Envelope value used: `h_env(b_n)` for `x ≥ 0`, `h_env(a_n x + b_n)` for `x < 0`.
    pub z: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    /// `value - lower`.
    pub lower_margin: f64,
    /// `upper - value`.
    pub upper_margin: f64,
    pub ordered: bool,
    /// `z |x| ≥ 1`: the penultimate bound is not defined as a two-sided
    /// statement there, so the point is not counted as a violation.
    pub outside_bound_support: bool,
}

pub fn sandwich_check(nm: &NormalizedMaximum, x: f64) -> Result<SandwichReport> {
    if nm.model.domain_tag() != DomainTag::Gumbel {
        return Err(Error::DomainMismatch {
            expected: "Gumbel-domain",
            model: nm.model.name(),
        });
    }
    let t = if x >= 0.0 { nm.norming.b_n } else { nm.at(x) };
    let z = remainder_gumbel(&nm.model, t)?.h_env;
    let lower = penultimate_cdf(z, x);
    let upper = penultimate_cdf(-z, x);
    let value = nm.cdf(x);
    Ok(SandwichReport {
        x,
        z,
        lower,
        value,
        upper,
        lower_margin: value - lower,
        upper_margin: upper - value,
        ordered: lower <= value && value <= upper,
        outside_bound_support: z * x.abs() >= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norming::{exact_norming, RemainderEnvelope};
    use crate::numerics::integrate_with_breaks;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn density_examples() {
        let g = DistributionModel::gumbel();
        let nm = NormalizedMaximum::new(&g, exact_norming(&g, 9).unwrap()).unwrap();
        assert!((gn_density(&nm, 0.0) - (-1f64).exp()).abs() < 1e-15);

        let p = DistributionModel::pareto(1.0).unwrap();
        let nm = NormalizedMaximum::new(&p, norming_frechet(&p, 10).unwrap()).unwrap();
        assert!((gn_density(&nm, 1.0) - 0.9f64.powi(9)).abs() < 1e-14);
        assert!((gn_cdf(&nm, 1.0) - 0.9f64.powi(10)).abs() < 1e-14);

        let e = DistributionModel::exponential();
        let nm = NormalizedMaximum::standard(&e, 100, &spec()).unwrap();
        assert!((gn_density(&nm, 0.0) - 0.99f64.powi(99)).abs() < 1e-9);
        assert!((gn_density(&nm, 0.0) - 0.369_730).abs() < 1e-6);
    }

    #[test]
    fn outside_support_is_zero() {
        let p = DistributionModel::pareto(1.0).unwrap();
        let nm = NormalizedMaximum::standard(&p, 10, &spec()).unwrap();
        assert_eq!(nm.density(0.05), 0.0);
        assert_eq!(nm.cdf(-1.0), 0.0);
        assert!((nm.lower_end() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn exponential_cdf_approaches_gumbel() {
        let e = DistributionModel::exponential();
        let target = (-(-1f64).exp()).exp();
        assert!((target - 0.692_201).abs() < 1e-6);
        let errs: Vec<f64> = [100, 10_000]
            .iter()
            .map(|&n| (NormalizedMaximum::standard(&e, n, &spec()).unwrap().cdf(1.0) - target).abs())
            .collect();
        assert!(errs[1] < errs[0] && errs[1] < 1e-4);
    }

    #[test]
    fn frechet_parent_is_exact() {
        let f = DistributionModel::frechet(2.0).unwrap();
        let law = MaxStableLaw::Frechet(2.0);
        for n in [5, 500, 100_000] {
            let nm = NormalizedMaximum::standard(&f, n, &spec()).unwrap();
            for x in [0.3, 1.0, 4.0] {
                assert!((nm.cdf(x) - law.cdf(x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for m in DistributionModel::catalog() {
            for n in [10, 1000, 100_000] {
                let nm = NormalizedMaximum::standard(&m, n, &spec()).unwrap();
                let breaks = nm.limit().unwrap().breakpoints();
                let total =
                    integrate_with_breaks(|x| nm.density(x), nm.lower_end(), f64::INFINITY, &breaks, &spec())
                        .unwrap();
                assert!((total - 1.0).abs() < 1e-7, "{m} n={n}: {total}");
            }
        }
    }

    #[test]
    fn cdf_derivative_is_density() {
        for m in DistributionModel::catalog() {
            let nm = NormalizedMaximum::standard(&m, 1000, &spec()).unwrap();
            let limit = nm.limit().unwrap();
            for i in 0..50 {
                let x = limit.quantile((i as f64 + 0.5) / 50.0).max(nm.lower_end() + 1e-3);
                let h = 1e-5 * (1.0 + x.abs());
                let fd = (nm.cdf(x + h) - nm.cdf(x - h)) / (2.0 * h);
                let d = nm.density(x);
                assert!((fd - d).abs() <= 1e-5 * d.max(1e-3), "{m} at {x}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn penultimate_examples() {
        for z in [1e-8, -1e-8] {
            for x in [-1.0, 0.0, 2.0] {
                assert!((penultimate_cdf(z, x) - MaxStableLaw::Gumbel.cdf(x)).abs() < 1e-6);
            }
        }
        assert!((penultimate_cdf(0.1, 0.0) - (-1f64).exp()).abs() < 1e-15);
        assert!((penultimate_cdf(-0.1, 0.0) - (-1f64).exp()).abs() < 1e-15);
        assert!((penultimate_cdf(0.5, 1.0) - (-4.0f64 / 9.0).exp()).abs() < 1e-15);
        assert!((penultimate_cdf(0.5, 1.0) - 0.641_180).abs() < 1e-6);
        assert_eq!(penultimate_cdf(0.5, -3.0), 0.0);
        assert_eq!(penultimate_cdf(-0.5, 3.0), 1.0);
        assert_eq!(penultimate_cdf(0.0, 0.0), (-1f64).exp());
    }

    #[test]
    fn penultimate_uniform_bound() {
        for z in [0.01, 0.05, 0.1, 0.3, 0.9] {
            for signed in [z, -z] {
                let d = penultimate_distance(signed, 2048).unwrap();
                assert!(d.value <= (-1f64).exp() * z, "z = {signed}: {d:?}");
            }
        }
    }

    #[test]
    fn sandwich_examples() {
        let e = DistributionModel::exponential();
        let nm = NormalizedMaximum::von_mises(&e, 1000).unwrap();
        let r = sandwich_check(&nm, 1.0).unwrap();
        assert!(r.ordered && r.lower_margin > 0.0 && r.upper_margin > 0.0, "{r:?}");

        let g = DistributionModel::gumbel();
        let nm = NormalizedMaximum::von_mises(&g, 100).unwrap();
        let r = sandwich_check(&nm, 0.5).unwrap();
        assert!(r.ordered && r.lower_margin <= 1e-3 && r.upper_margin <= 1e-3, "{r:?}");
        assert!(r.z < 1e-12);
        assert!((r.value - MaxStableLaw::Gumbel.cdf(0.5)).abs() < 1e-12);

        let p = DistributionModel::pareto(1.0).unwrap();
        let nm = NormalizedMaximum::standard(&p, 100, &spec()).unwrap();
        assert!(matches!(sandwich_check(&nm, 1.0), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn gumbel_uniform_bound_on_positive_half_line() {
        for m in [DistributionModel::exponential(), DistributionModel::gumbel()] {
            let env = RemainderEnvelope::for_model(&m).unwrap();
            for n in [1000, 10_000] {
                let nm = NormalizedMaximum::von_mises(&m, n).unwrap();
                let d = cdf_distance(&nm, 0.0, GUMBEL_EFFECTIVE_RANGE.1, 2048).unwrap();
                let bound = (-1f64).exp() * env.h_env(nm.norming.b_n).unwrap();
                assert!(d.value <= bound + 1e-13, "{m} n={n}: {} > {bound}", d.value);
            }
        }
    }
}
