//! The three extreme-value limit laws.
//!
//! Rényi entropies are available in closed form. With `t = e^{-x}`,
//! `t = x^{-α}` or `t = |x|^{α}` every power integral `∫ g^β` reduces to a
//! gamma integral:
//!
//! ```text
//! Gumbel      ∫ λ^β   = Γ(β) β^{-β}
//! Fréchet(α)  ∫ φ_α^β = α^{β-1} Γ(s) β^{-s},  s = β + (β-1)/α
//! Weibull(α)  ∫ ψ_α^β = α^{β-1} Γ(s) β^{-s},  s = β - (β-1)/α
//! ```
//!
//! The Weibull integral diverges when `s ≤ 0`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::distributions::{DistributionModel, DomainTag};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MaxStableLaw {
    Frechet(f64),
    Weibull(f64),
    Gumbel,
}

impl MaxStableLaw {
    pub fn frechet(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self::Frechet(alpha))
        } else {
            Err(Error::Param(format!("alpha must be positive, got {alpha}")))
        }
    }

    pub fn weibull(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Self::Weibull(alpha))
        } else {
            Err(Error::Param(format!("alpha must be positive, got {alpha}")))
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Frechet(a) => format!("frechet(alpha={a})"),
            Self::Weibull(a) => format!("weibull(alpha={a})"),
            Self::Gumbel => "gumbel".into(),
        }
    }

    /// Support as `(lo, hi)`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Frechet(_) => (0.0, f64::INFINITY),
            Self::Weibull(_) => (f64::NEG_INFINITY, 0.0),
            Self::Gumbel => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.log_cdf(x).exp()
    }

    pub fn log_cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Frechet(a) => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    -(-a * x.ln()).exp()
                }
            }
            Self::Weibull(a) => {
                if x >= 0.0 {
                    0.0
                } else {
                    -(-x).powf(a)
                }
            }
            Self::Gumbel => -(-x).exp(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Frechet(a) => {
                if x <= 0.0 {
                    return 0.0;
                }
                let lx = x.ln();
                (a.ln() - (a + 1.0) * lx - (-a * lx).exp()).exp()
            }
            Self::Weibull(a) => {
                if x >= 0.0 {
                    return 0.0;
                }
                let ly = (-x).ln();
                (a.ln() + (a - 1.0) * ly - (a * ly).exp()).exp()
            }
            Self::Gumbel => (-x - (-x).exp()).exp(),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let (lo, hi) = self.support();
        if p <= 0.0 {
            return lo;
        }
        if p >= 1.0 {
            return hi;
        }
        match *self {
            Self::Frechet(a) => (-p.ln()).powf(-1.0 / a),
            Self::Weibull(a) => -(-p.ln()).powf(1.0 / a),
            Self::Gumbel => -(-p.ln()).ln(),
        }
    }

    /// Quantiles 0.01, 0.5, 0.99: where the density changes shape fastest.
    pub fn breakpoints(&self) -> [f64; 3] {
        [self.quantile(0.01), self.quantile(0.5), self.quantile(0.99)]
    }

    /// `log ∫ g^β` in closed form.
    pub fn log_power_integral(&self, beta: f64) -> Result<f64> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Param(format!("beta must be positive, got {beta}")));
        }
        let (log_scale, s) = match *self {
            Self::Gumbel => (0.0, beta),
            Self::Frechet(a) => ((beta - 1.0) * a.ln(), beta + (beta - 1.0) / a),
            Self::Weibull(a) => ((beta - 1.0) * a.ln(), beta - (beta - 1.0) / a),
        };
        if s <= 0.0 {
            return Err(Error::Param(format!(
                "∫ g^β diverges for {} at beta = {beta}",
                self.name()
            )));
        }
        Ok(log_scale + ln_gamma(s) - s * beta.ln())
    }

    /// `H_β(g) = log(∫ g^β) / (1 - β)` for `β > 1`.
    pub fn renyi_entropy_closed(&self, beta: f64) -> Result<f64> {
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::Param(format!("Rényi order must exceed 1, got {beta}")));
        }
        Ok(self.log_power_integral(beta)? / (1.0 - beta))
    }

    /// Shannon entropy in closed form.
    pub fn shannon_entropy_closed(&self) -> f64 {
        const EULER: f64 = 0.577_215_664_901_532_9;
        match *self {
            Self::Gumbel => EULER + 1.0,
            Self::Frechet(a) => 1.0 + EULER * (1.0 + 1.0 / a) - a.ln(),
            Self::Weibull(a) => 1.0 + EULER * (1.0 - 1.0 / a) - a.ln(),
        }
    }
}

/// The limit law for a model's max-domain tag.
pub fn limit_for(model: &DistributionModel) -> Result<MaxStableLaw> {
    match model.domain_tag() {
        DomainTag::Frechet(a) => MaxStableLaw::frechet(a),
        DomainTag::Weibull(a) => MaxStableLaw::weibull(a),
        DomainTag::Gumbel => Ok(MaxStableLaw::Gumbel),
        DomainTag::None => Err(Error::NoDomain(model.name())),
    }
}
