//! Rényi and Shannon entropies, and the gap `|H_β(g_n) - H_β(g)|` between
//! the normalized maximum and its limit.
//!
//! The gap is compared with `M · sup|g_n - g|`. Writing `I_n = ∫g_n^β` and
//! `I = ∫g^β`, the mean value theorem applied twice gives
//!
//! ```text
//! |H_β(g_n) - H_β(g)| ≤ |I_n - I| / ((β-1) min(I_n, I))
//!                     ≤ β J sup|g_n - g| / ((β-1) min(I_n, I))
//! ```
//!
//! with `J ≥ ∫ max(g_n, g)^{β-1}`. Since `max(g_n, g) ≤ g + |g_n - g|`,
//! `J = ∫g^{β-1} + ∫|g_n - g|^{β-1}` for `β ≤ 2` (subadditivity) and
//! `J = (‖g‖_{β-1} + ‖g_n - g‖_{β-1})^{β-1}` for `β ≥ 2` (Minkowski).

use serde::Serialize;

use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::maxima::NormalizedMaximum;
use crate::maxstable::MaxStableLaw;
use crate::numerics::{integrate_with_breaks, sup_norm, GridScale, QuadratureSpec};

/// Admissible Rényi orders.
pub const BETA_RANGE: (f64, f64) = (1.05, 16.0);

pub const DEFAULT_SUP_GRID_POINTS: usize = 2048;

fn check_beta(beta: f64) -> Result<()> {
    if beta >= BETA_RANGE.0 && beta <= BETA_RANGE.1 {
        Ok(())
    } else {
        Err(Error::Param(format!(
            "Rényi order must lie in [{}, {}], got {beta}",
            BETA_RANGE.0, BETA_RANGE.1
        )))
    }
}

fn divergent(what: &str, e: Error) -> Error {
    match e {
        Error::NonConvergence { .. } | Error::NonFinite { .. } => {
            Error::DivergentIntegral(format!("{what}: {e}"))
        }
        other => other,
    }
}

fn power_integral<F: Fn(f64) -> f64>(
    pdf: F,
    support: (f64, f64),
    breaks: &[f64],
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let integrand = |x: f64| {
        let p = pdf(x);
        if p > 0.0 {
            p.powf(beta)
        } else {
            0.0
        }
    };
    integrate_with_breaks(integrand, support.0, support.1, breaks, spec)
}

/// `H_β(f) = log(∫ f^β) / (1 - β)`.
///
/// `breaks` seeds the adaptive quadrature with points where `f` changes
/// shape quickly; they may be empty.
pub fn renyi_entropy<F: Fn(f64) -> f64>(
    pdf: F,
    support: (f64, f64),
    breaks: &[f64],
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_beta(beta)?;
    let i = power_integral(pdf, support, breaks, beta, spec)
        .map_err(|e| divergent(&format!("∫ f^{beta}"), e))?;
    if !(i > 0.0 && i.is_finite()) {
        return Err(Error::DivergentIntegral(format!("∫ f^{beta} = {i}")));
    }
    Ok(i.ln() / (1.0 - beta))
}

/// `-∫ f log f` over `{f > 0}`.
pub fn shannon_entropy<F: Fn(f64) -> f64>(
    pdf: F,
    support: (f64, f64),
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let integrand = |x: f64| {
        let p = pdf(x);
        if p > 0.0 {
            -p * p.ln()
        } else {
            0.0
        }
    };
    integrate_with_breaks(integrand, support.0, support.1, breaks, spec)
        .map_err(|e| divergent("∫ f log f", e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOptions {
    pub spec: QuadratureSpec,
    pub sup_grid_points: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self {
            spec: QuadratureSpec::default(),
            sup_grid_points: DEFAULT_SUP_GRID_POINTS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyMeasurement {
    pub n: u64,
    pub beta: f64,
    pub h_gn: f64,
    pub h_limit: f64,
    /// `|h_gn - h_limit|`.
    pub diff: f64,
    /// `sup |g_n - g|`.
    pub supnorm: f64,
    pub supnorm_location: f64,
    /// `∫ |g_n - g|^{β-1}`.
    pub lp_integral: f64,
    /// `∫ |g_n - g|^β`.
    pub beta_lp_integral: f64,
    /// `∫ g_n^β`.
    pub power_integral_gn: f64,
    /// `∫ g^β`, closed form.
    pub power_integral_limit: f64,
    /// `∫ |g_n^β - g^β| / ∫ g^β`.
    pub hypothesis_ratio: f64,
    /// Constant with `diff ≤ m_bound · supnorm` (see module docs).
    pub m_bound: f64,
    /// `2 ∫|g_n - g|^{β-1} / ((β-1) ∫g^β)`, reported for comparison only.
    pub m_proof: f64,
}

impl EntropyMeasurement {
    pub fn hypothesis_holds(&self) -> bool {
        self.hypothesis_ratio < 1.0
    }

    /// `diff ≤ m_bound · supnorm`, up to roundoff in the measured entropies.
    pub fn bound_holds(&self, floor: f64) -> bool {
        self.diff <= self.m_bound * self.supnorm + floor
    }
}

/// Integration range and break points covering both `g_n` and `g`.
fn union_support(nm: &NormalizedMaximum, law: &MaxStableLaw) -> ((f64, f64), Vec<f64>) {
    let (llo, lhi) = law.support();
    let lo = nm.lower_end().min(llo);
    let upper = nm.model.right_end();
    let gn_hi = if upper.is_finite() {
        (upper - nm.norming.b_n) / nm.norming.a_n
    } else {
        f64::INFINITY
    };
    let hi = gn_hi.max(lhi);
    let mut breaks: Vec<f64> = law.breakpoints().to_vec();
    if nm.lower_end().is_finite() {
        breaks.push(nm.lower_end());
    }
    breaks.retain(|&b| b > lo && b < hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    ((lo, hi), breaks)
}

/// Checks `∫ f^β < ∞` for the parent density.
fn check_parent_integrable(model: &DistributionModel, beta: f64, spec: &QuadratureSpec) -> Result<()> {
    let i = power_integral(
        |x| model.pdf(x),
        (model.left_end(), model.right_end()),
        &model.breakpoints(),
        beta,
        spec,
    )
    .map_err(|e| divergent(&format!("parent ∫ f^{beta}"), e))?;
    if i.is_finite() {
        Ok(())
    } else {
        Err(Error::DivergentIntegral(format!("parent ∫ f^{beta} = {i}")))
    }
}

pub fn entropy_gap(nm: &NormalizedMaximum, beta: f64, opts: &EntropyOptions) -> Result<EntropyMeasurement> {
    check_beta(beta)?;
    let spec = &opts.spec;
    let law = nm.limit()?;
    check_parent_integrable(&nm.model, beta, spec)?;

    let h_limit = law.renyi_entropy_closed(beta)?;
    let power_integral_limit = law.log_power_integral(beta)?.exp();
    let (support, breaks) = union_support(nm, &law);
    let gn = |x: f64| nm.density(x);
    let g = |x: f64| law.pdf(x);

    let power_integral_gn = power_integral(gn, support, &breaks, beta, spec)
        .map_err(|e| divergent(&format!("∫ g_n^{beta}"), e))?;
    if !(power_integral_gn > 0.0 && power_integral_gn.is_finite()) {
        return Err(Error::DivergentIntegral(format!("∫ g_n^{beta} = {power_integral_gn}")));
    }
    let h_gn = power_integral_gn.ln() / (1.0 - beta);

    let (lcdf, lq) = (|x: f64| law.cdf(x), |p: f64| law.quantile(p));
    let sup = sup_norm(
        |x| gn(x) - g(x),
        support.0,
        support.1,
        &GridScale::Quantile {
            cdf: &lcdf,
            quantile: &lq,
        },
        opts.sup_grid_points,
    )?;

    let abs_power = |p: f64| {
        move |x: f64| {
            let d = (gn(x) - g(x)).abs();
            if d > 0.0 {
                d.powf(p)
            } else {
                0.0
            }
        }
    };
    let lp_integral = integrate_with_breaks(abs_power(beta - 1.0), support.0, support.1, &breaks, spec)
        .map_err(|e| divergent(&format!("∫ |g_n - g|^{}", beta - 1.0), e))?;
    let beta_lp_integral = integrate_with_breaks(abs_power(beta), support.0, support.1, &breaks, spec)
        .map_err(|e| divergent(&format!("∫ |g_n - g|^{beta}"), e))?;
    let power_gap = integrate_with_breaks(
        |x| {
            let (a, b) = (gn(x), g(x));
            (a.max(0.0).powf(beta) - b.max(0.0).powf(beta)).abs()
        },
        support.0,
        support.1,
        &breaks,
        spec,
    )
    .map_err(|e| divergent(&format!("∫ |g_n^{beta} - g^{beta}|"), e))?;

    let j = max_power_bound(&law, beta, lp_integral);
    let m_bound = beta * j / ((beta - 1.0) * power_integral_gn.min(power_integral_limit));
    let m_proof = 2.0 * lp_integral / ((beta - 1.0) * power_integral_limit);

    Ok(EntropyMeasurement {
        n: nm.n,
        beta,
        h_gn,
        h_limit,
        diff: (h_gn - h_limit).abs(),
        supnorm: sup.value,
        supnorm_location: sup.location,
        lp_integral,
        beta_lp_integral,
        power_integral_gn,
        power_integral_limit,
        hypothesis_ratio: power_gap / power_integral_limit,
        m_bound,
        m_proof,
    })
}

/// Upper bound on `∫ max(g_n, g)^{β-1}`; infinite when `∫ g^{β-1}` diverges.
fn max_power_bound(law: &MaxStableLaw, beta: f64, lp_integral: f64) -> f64 {
    let p = beta - 1.0;
    let g_p = match law.log_power_integral(p) {
        Ok(l) => l.exp(),
        Err(_) => return f64::INFINITY,
    };
    if p <= 1.0 {
        g_p + lp_integral
    } else {
        (g_p.powf(1.0 / p) + lp_integral.powf(1.0 / p)).powf(p)
    }
}
