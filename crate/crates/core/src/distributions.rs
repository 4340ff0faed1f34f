//! Parent distributions with tail-accurate survival functions.
//!
//! Every model exposes its df, survival function, density and density
//! derivative in closed form. The survival function is computed directly
//! (never as `1 - cdf`) so that `n * sf(a_n x + b_n)` stays accurate for
//! `n` up to `10^6`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::numerics::find_root;

/// Max-domain of attraction a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DomainTag {
    Frechet(f64),
    Gumbel,
    Weibull(f64),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Pareto { alpha: f64 },
    Burr { alpha: f64 },
    HalfCauchy,
    Exponential,
    Gumbel,
    Frechet { alpha: f64 },
    Normal,
}

/// An immutable, continuously differentiable univariate law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionModel {
    family: Family,
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(alpha)
    } else {
        Err(Error::Param(format!("alpha must be positive, got {alpha}")))
    }
}

const NORMAL_BRACKET: f64 = 40.0;
const NORMAL_ROOT_TOL: f64 = 1e-14;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

impl DistributionModel {
    /// `F(x) = 1 - x^{-α}` on `(1, ∞)`.
    pub fn pareto(alpha: f64) -> Result<Self> {
        Ok(Self {
            family: Family::Pareto {
                alpha: check_alpha(alpha)?,
            },
        })
    }

    /// `F(x) = 1 - (1 + x)^{-α}` on `(0, ∞)`.
    pub fn burr(alpha: f64) -> Result<Self> {
        Ok(Self {
            family: Family::Burr {
                alpha: check_alpha(alpha)?,
            },
        })
    }

    /// `F(x) = (2/π) arctan x` on `(0, ∞)`.
    pub fn half_cauchy() -> Self {
        Self {
            family: Family::HalfCauchy,
        }
    }

    pub fn exponential() -> Self {
        Self {
            family: Family::Exponential,
        }
    }

    /// Standard Gumbel law `Λ` used as a parent.
    pub fn gumbel() -> Self {
        Self {
            family: Family::Gumbel,
        }
    }

    /// Standard Fréchet law `Φ_α` used as a parent.
    pub fn frechet(alpha: f64) -> Result<Self> {
        Ok(Self {
            family: Family::Frechet {
                alpha: check_alpha(alpha)?,
            },
        })
    }

    pub fn normal() -> Self {
        Self {
            family: Family::Normal,
        }
    }

    /// The models exercised by the test matrix.
    pub fn catalog() -> Vec<Self> {
        vec![
            Self::pareto(1.0).unwrap(),
            Self::pareto(2.0).unwrap(),
            Self::burr(2.0).unwrap(),
            Self::half_cauchy(),
            Self::exponential(),
            Self::gumbel(),
            Self::frechet(1.0).unwrap(),
            Self::frechet(2.0).unwrap(),
            Self::normal(),
        ]
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Pareto { .. } => "pareto",
            Family::Burr { .. } => "burr",
            Family::HalfCauchy => "half_cauchy",
            Family::Exponential => "exponential",
            Family::Gumbel => "gumbel",
            Family::Frechet { .. } => "frechet",
            Family::Normal => "normal",
        }
    }

    /// Canonical spec string, e.g. `pareto(alpha=2)`.
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn params(&self) -> BTreeMap<&'static str, f64> {
        let mut m = BTreeMap::new();
        if let Some(alpha) = self.alpha() {
            m.insert("alpha", alpha);
        }
        m
    }

    fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::Pareto { alpha } | Family::Burr { alpha } | Family::Frechet { alpha } => {
                Some(alpha)
            }
            _ => None,
        }
    }

    pub fn domain_tag(&self) -> DomainTag {
        match self.family {
            Family::Pareto { alpha } | Family::Burr { alpha } | Family::Frechet { alpha } => {
                DomainTag::Frechet(alpha)
            }
            Family::HalfCauchy => DomainTag::Frechet(1.0),
            Family::Exponential | Family::Gumbel | Family::Normal => DomainTag::Gumbel,
        }
    }

    /// `l(F)`.
    pub fn left_end(&self) -> f64 {
        match self.family {
            Family::Pareto { .. } => 1.0,
            Family::Burr { .. } | Family::HalfCauchy | Family::Exponential | Family::Frechet { .. } => 0.0,
            Family::Gumbel | Family::Normal => f64::NEG_INFINITY,
        }
    }

    /// `r(F)`; infinite for every model in the catalog.
    pub fn right_end(&self) -> f64 {
        f64::INFINITY
    }

    /// True when `F^n(a_n x + b_n) = F(x)` for closed-form `(a_n, b_n)`.
    pub fn is_max_stable(&self) -> bool {
        matches!(self.family, Family::Gumbel | Family::Frechet { .. })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.left_end() {
            return 0.0;
        }
        match self.family {
            Family::Pareto { alpha } => -(-alpha * x.ln()).exp_m1(),
            Family::Burr { alpha } => -(-alpha * x.ln_1p()).exp_m1(),
            Family::HalfCauchy => FRAC_2_PI * x.atan(),
            Family::Exponential => -(-x).exp_m1(),
            Family::Gumbel => (-(-x).exp()).exp(),
            Family::Frechet { alpha } => (-(-alpha * x.ln()).exp()).exp(),
            Family::Normal => 0.5 * erfc(-x / SQRT_2),
        }
    }

    /// `F̄(x) = 1 - F(x)`, computed without cancellation.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= self.left_end() {
            return 1.0;
        }
        match self.family {
            Family::Pareto { alpha } => (-alpha * x.ln()).exp(),
            Family::Burr { alpha } => (-alpha * x.ln_1p()).exp(),
            Family::HalfCauchy => FRAC_2_PI * x.recip().atan(),
            Family::Exponential => (-x).exp(),
            Family::Gumbel => -(-(-x).exp()).exp_m1(),
            Family::Frechet { alpha } => -(-(-alpha * x.ln()).exp()).exp_m1(),
            Family::Normal => 0.5 * erfc(x / SQRT_2),
        }
    }

    /// `log F(x)`, accurate in both tails.
    pub fn log_cdf(&self, x: f64) -> f64 {
        if x <= self.left_end() {
            return f64::NEG_INFINITY;
        }
        match self.family {
            Family::Gumbel => -(-x).exp(),
            Family::Frechet { alpha } => -(-alpha * x.ln()).exp(),
            _ => {
                let s = self.sf(x);
                if s < 0.5 {
                    (-s).ln_1p()
                } else {
                    self.cdf(x).ln()
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.left_end() || (x == self.left_end() && x.is_finite() && !self.density_at_left_end()) {
            return 0.0;
        }
        match self.family {
            Family::Pareto { alpha } => alpha * (-(alpha + 1.0) * x.ln()).exp(),
            Family::Burr { alpha } => alpha * (-(alpha + 1.0) * x.ln_1p()).exp(),
            Family::HalfCauchy => FRAC_2_PI / (1.0 + x * x),
            Family::Exponential => (-x).exp(),
            Family::Gumbel => (-x - (-x).exp()).exp(),
            Family::Frechet { alpha } => {
                let lx = x.ln();
                (alpha.ln() - (alpha + 1.0) * lx - (-alpha * lx).exp()).exp()
            }
            Family::Normal => INV_SQRT_2PI * (-0.5 * x * x).exp(),
        }
    }

    fn density_at_left_end(&self) -> bool {
        !matches!(self.family, Family::Frechet { .. })
    }

    /// `f'(x)`.
    pub fn pdf_deriv(&self, x: f64) -> f64 {
        let f = self.pdf(x);
        if f == 0.0 {
            return 0.0;
        }
        match self.family {
            Family::Pareto { alpha } => -(alpha + 1.0) * f / x,
            Family::Burr { alpha } => -(alpha + 1.0) * f / (1.0 + x),
            Family::HalfCauchy => -2.0 * x * f / (1.0 + x * x),
            Family::Exponential => -f,
            Family::Gumbel => f * (-x).exp_m1(),
            Family::Frechet { alpha } => f * (alpha * (-alpha * x.ln()).exp() - (alpha + 1.0)) / x,
            Family::Normal => -x * f,
        }
    }

    /// `F^{←}(p)` for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return self.left_end();
        }
        if p >= 1.0 {
            return self.right_end();
        }
        match self.family {
            Family::Pareto { alpha } => (-(-p).ln_1p() / alpha).exp(),
            Family::Burr { alpha } => (-(-p).ln_1p() / alpha).exp_m1(),
            Family::HalfCauchy => (0.5 * PI * p).tan(),
            Family::Exponential => -(-p).ln_1p(),
            Family::Gumbel => -(-p.ln()).ln(),
            Family::Frechet { alpha } => (-p.ln()).powf(-1.0 / alpha),
            Family::Normal => {
                if p < 0.5 {
                    -self.upper_quantile(p)
                } else {
                    self.upper_quantile(1.0 - p)
                }
            }
        }
    }

    /// `F^{←}(1 - q)`, accurate for tiny tail probabilities `q`.
    pub fn upper_quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return self.right_end();
        }
        if q >= 1.0 {
            return self.left_end();
        }
        match self.family {
            Family::Pareto { alpha } => (-q.ln() / alpha).exp(),
            Family::Burr { alpha } => (-q.ln() / alpha).exp_m1(),
            Family::HalfCauchy => (0.5 * PI * q).tan().recip(),
            Family::Exponential => -q.ln(),
            Family::Gumbel => -(-(-q).ln_1p()).ln(),
            Family::Frechet { alpha } => (-(-q).ln_1p()).powf(-1.0 / alpha),
            Family::Normal => {
                if q > 0.5 {
                    return -self.upper_quantile(1.0 - q);
                }
                let target = q.ln();
                find_root(
                    |x| self.sf(x).ln() - target,
                    0.0,
                    NORMAL_BRACKET,
                    NORMAL_ROOT_TOL,
                )
                .unwrap_or(NORMAL_BRACKET)
            }
        }
    }

    /// Representative breakpoints for integrating over the support.
    pub fn breakpoints(&self) -> [f64; 3] {
        [self.quantile(0.01), self.quantile(0.5), self.quantile(0.99)]
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alpha() {
            Some(alpha) => write!(f, "{}(alpha={})", self.family_name(), alpha),
            None => f.write_str(self.family_name()),
        }
    }
}

impl FromStr for DistributionModel {
    type Err = Error;

    /// Parses `pareto(alpha=2)`, `burr(alpha=2)`, `half_cauchy`,
    /// `exponential`, `gumbel`, `frechet(alpha=1)` or `normal`,
    /// case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ModelSpec(s.to_string());
        let spec = s.trim().to_ascii_lowercase();
        let (name, args) = match spec.find('(') {
            Some(i) => {
                let rest = spec[i + 1..].trim_end();
                let inner = rest.strip_suffix(')').ok_or_else(bad)?;
                (spec[..i].trim(), Some(inner))
            }
            None => (spec.as_str(), None),
        };

        let mut params = BTreeMap::new();
        for part in args.into_iter().flat_map(|a| a.split(',')) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            if params.insert(k.trim().to_string(), v).is_some() {
                return Err(bad());
            }
        }

        let alpha = |params: &mut BTreeMap<String, f64>| params.remove("alpha").ok_or_else(bad);
        let model = match name {
            "pareto" => Self::pareto(alpha(&mut params)?)?,
            "burr" => Self::burr(alpha(&mut params)?)?,
            "frechet" => Self::frechet(alpha(&mut params)?)?,
            "half_cauchy" => Self::half_cauchy(),
            "exponential" => Self::exponential(),
            "gumbel" => Self::gumbel(),
            "normal" => Self::normal(),
            _ => return Err(bad()),
        };
        if !params.is_empty() {
            return Err(bad());
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_with_breaks, QuadratureSpec};

    #[test]
    fn closed_form_examples() {
        assert!((DistributionModel::pareto(1.0).unwrap().quantile(1.0 - 1.0 / 8.0) - 8.0).abs() < 1e-12);
        assert!((DistributionModel::pareto(2.0).unwrap().sf(10.0) - 0.01).abs() < 1e-16);
        assert!((DistributionModel::burr(2.0).unwrap().sf(9.0) - 0.01).abs() < 1e-16);
        assert!((DistributionModel::burr(1.0).unwrap().quantile(0.5) - 1.0).abs() < 1e-14);
        let hc = DistributionModel::half_cauchy();
        assert!((hc.quantile(0.5) - 1.0).abs() < 1e-14);
        assert!((hc.pdf(0.0) - FRAC_2_PI).abs() < 1e-16);
        assert!((hc.sf(1e4) * 1e4 - FRAC_2_PI).abs() < 1e-4);
        let e = DistributionModel::exponential();
        assert!((e.quantile(1.0 - 1.0 / 100.0) - 100f64.ln()).abs() < 1e-12);
        assert!((e.pdf_deriv(1.3) + (-1.3f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn pareto_von_mises_ratio_is_alpha() {
        let m = DistributionModel::pareto(1.0).unwrap();
        for x in [1.5, 10.0, 1e3, 1e6] {
            assert!((x * m.pdf(x) / m.sf(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn max_stability_of_standard_parents() {
        let g = DistributionModel::gumbel();
        let n = 7.0f64;
        let lhs = (n * g.log_cdf(0.3 + n.ln())).exp();
        assert!((lhs - g.cdf(0.3)).abs() < 1e-15);
        let fr = DistributionModel::frechet(1.0).unwrap();
        let n = 5.0;
        assert!(((n * fr.log_cdf(n * 2.0)).exp() - fr.cdf(2.0)).abs() < 1e-15);
    }

    #[test]
    fn normal_tail() {
        let m = DistributionModel::normal();
        assert!((m.sf(6.0) - 9.865_876_450_376_946e-10).abs() < 1e-13);
        assert!((m.upper_quantile(1e-3) - 3.090_232_306_167_813).abs() < 1e-10);
        assert!((m.quantile(0.5)).abs() < 1e-13);
    }

    #[test]
    fn sf_plus_cdf_is_one() {
        for m in DistributionModel::catalog() {
            for p in [0.05, 0.3, 0.5, 0.7, 0.95] {
                let x = m.quantile(p);
                assert!((m.sf(x) + m.cdf(x) - 1.0).abs() < 1e-12, "{m} at {x}");
            }
        }
    }

    #[test]
    fn densities_normalize() {
        let spec = QuadratureSpec::default();
        for m in DistributionModel::catalog() {
            let v = integrate_with_breaks(
                |x| m.pdf(x),
                m.left_end(),
                m.right_end(),
                &m.breakpoints(),
                &spec,
            )
            .unwrap();
            assert!((v - 1.0).abs() < 1e-8, "{m}: {v}");
        }
    }

    #[test]
    fn parse_specs() {
        let cases = [
            ("pareto(alpha=2)", DistributionModel::pareto(2.0).unwrap()),
            ("Burr( alpha = 2 )", DistributionModel::burr(2.0).unwrap()),
            ("HALF_CAUCHY", DistributionModel::half_cauchy()),
            ("exponential", DistributionModel::exponential()),
            ("gumbel", DistributionModel::gumbel()),
            ("frechet(alpha=1)", DistributionModel::frechet(1.0).unwrap()),
            ("Normal", DistributionModel::normal()),
        ];
        for (s, m) in cases {
            assert_eq!(s.parse::<DistributionModel>().unwrap(), m, "{s}");
            assert_eq!(m.name().parse::<DistributionModel>().unwrap(), m);
        }
        for bad in ["pareto", "pareto(alpha=-1)", "cauchy", "burr(alpha=2", "gumbel(alpha=1)", "pareto(beta=2)"] {
            assert!(bad.parse::<DistributionModel>().is_err(), "{bad}");
        }
    }

    #[test]
    fn invalid_alpha() {
        assert!(matches!(DistributionModel::pareto(0.0), Err(Error::Param(_))));
        assert!(matches!(DistributionModel::burr(-1.0), Err(Error::Param(_))));
        assert!(matches!(DistributionModel::frechet(f64::NAN), Err(Error::Param(_))));
    }
}
