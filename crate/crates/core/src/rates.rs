//! Sweeps over geometric `n`-grids: measured sup-norm and entropy gaps,
//! predicted rate envelopes, log-log slope fits and uniform-bound checks.
//!
//! Predicted envelopes carry unit constants; only their slopes are compared
//! with the measurements.

use serde::Serialize;

use crate::distributions::{DistributionModel, DomainTag};
use crate::entropy::{entropy_gap, EntropyOptions};
use crate::error::{Error, Result};
use crate::maxima::{
    cdf_distance, penultimate_distance, sandwich_check, NormalizedMaximum, GUMBEL_EFFECTIVE_RANGE,
};
use crate::maxstable::MaxStableLaw;
use crate::norming::{standard_norming, von_mises_scale, NormingPair, RemainderEnvelope};
use crate::numerics::{fit_loglog, sup_norm, FitResult, GridScale, QuadratureSpec};

pub const MAX_N: u64 = 1_000_000;
pub const MIN_GRID_LEN: usize = 5;
/// Values below this are roundoff, not signal.
pub const NUMERICAL_FLOOR: f64 = 1e-13;
/// Sup-norms at or below this mark an exact (max-stable) parent.
pub const DEGENERATE_SUPNORM: f64 = 1e-8;
pub const PENULTIMATE_ZS: [f64; 5] = [0.01, 0.05, 0.1, 0.3, 0.9];
pub const SANDWICH_XS: [f64; 4] = [-1.0, 0.5, 1.0, 2.0];
pub const BOUND_GRID_POINTS: usize = 2048;

/// `2^4, 2^5, …, 2^14`.
pub fn default_n_grid() -> Vec<u64> {
    (4..=14).map(|k| 1u64 << k).collect()
}

/// `n_min, round(n_min·r), round(n_min·r²), …` up to `n_max`, deduplicated.
pub fn geometric_grid(n_min: u64, n_max: u64, factor: f64) -> Result<Vec<u64>> {
    if !(2 <= n_min && n_min < n_max && n_max <= MAX_N) {
        return Err(Error::Param(format!(
            "need 2 ≤ n_min < n_max ≤ {MAX_N}, got {n_min}, {n_max}"
        )));
    }
    if !(factor > 1.0 && factor.is_finite()) {
        return Err(Error::Param(format!("grid factor must exceed 1, got {factor}")));
    }
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let v = (n_min as f64 * factor.powi(k)).round();
        if v > n_max as f64 * (1.0 + 1e-12) {
            break;
        }
        let v = v as u64;
        if grid.last() != Some(&v) {
            grid.push(v);
        }
        k += 1;
    }
    Ok(grid)
}

fn n_exp_sqrt(n: u64) -> f64 {
    let n = n as f64;
    n * (-n.sqrt()).exp()
}

/// Envelope terms at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeTerms {
    /// `h_env(a_n)` (Fréchet) or `h_env(b_n)` (Gumbel).
    pub h: f64,
    /// `log(1 + h)`, Gumbel domain only.
    pub log_term: f64,
    /// `n e^{-√n}`.
    pub truncation: f64,
}

impl EnvelopeTerms {
    pub fn total(&self) -> f64 {
        self.h + self.log_term + self.truncation
    }
}

fn envelope_terms(
    model: &DistributionModel,
    norming: &NormingPair,
    env: &RemainderEnvelope,
) -> Result<EnvelopeTerms> {
    let truncation = n_exp_sqrt(norming.n);
    match model.domain_tag() {
        DomainTag::Frechet(_) => Ok(EnvelopeTerms {
            h: env.h_env(norming.a_n)?,
            log_term: 0.0,
            truncation,
        }),
        DomainTag::Gumbel => {
            let h = env.h_env(norming.b_n)?;
            Ok(EnvelopeTerms {
                h,
                log_term: h.ln_1p(),
                truncation,
            })
        }
        _ => Err(Error::DomainMismatch {
            expected: "Frechet- or Gumbel-domain",
            model: model.name(),
        }),
    }
}

/// Sum of the rate-bound terms with unit constants:
/// `h_env(a_n) + n e^{-√n}` (Fréchet) or
/// `h_env(b_n) + log(1 + h_env(b_n)) + n e^{-√n}` (Gumbel).
pub fn predicted_envelope(model: &DistributionModel, n: u64, spec: &QuadratureSpec) -> Result<f64> {
    let env = RemainderEnvelope::for_model(model)?;
    let norming = standard_norming(model, n, spec)?;
    Ok(envelope_terms(model, &norming, &env)?.total())
}

/// `ξ_n` with `-log F(ξ_n) = n^{-1/2}`.
pub fn truncation_point(model: &DistributionModel, n: u64) -> f64 {
    model.upper_quantile(-(-1.0 / (n as f64).sqrt()).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: u64,
    pub a_n: f64,
    pub b_n: f64,
    pub h_env: f64,
    pub supnorm: f64,
    pub h_gn: f64,
    pub h_limit: f64,
    pub entropy_diff: f64,
    pub predicted_envelope: f64,
    /// `(ξ_n - b_n) / a_n`.
    pub t_n: f64,
    pub lp_integral: f64,
    pub hypothesis_ratio: f64,
    pub m_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub pass: bool,
    /// `bound - measured`; negative on failure.
    pub margin: f64,
}

impl BoundCheck {
    fn new(name: String, bound: f64, measured: f64) -> Self {
        Self {
            name,
            pass: measured <= bound + NUMERICAL_FLOOR,
            margin: bound - measured,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub model_name: String,
    pub beta: f64,
    pub rows: Vec<RateRow>,
    /// `None` when the experiment is degenerate.
    pub fitted_supnorm: Option<FitResult>,
    pub fitted_entropy: Option<FitResult>,
    /// Slope of the full predicted envelope.
    pub predicted_slope: f64,
    /// Slope of the `h_env` term alone.
    pub h_slope: f64,
    /// Set when fits are skipped, e.g. `"degenerate: exact max-stability"`.
    pub degenerate: Option<String>,
    pub bound_checks: Vec<BoundCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    pub entropy: EntropyOptions,
    /// Threads used for the per-`n` rows; results do not depend on it.
    pub workers: usize,
    pub verify_bounds: bool,
    pub bounds: BoundOptions,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            entropy: EntropyOptions::default(),
            workers: 1,
            verify_bounds: true,
            bounds: BoundOptions::default(),
        }
    }
}

fn validate_grid(n_grid: &[u64]) -> Result<()> {
    if n_grid.len() < MIN_GRID_LEN {
        return Err(Error::Param(format!(
            "n-grid needs at least {MIN_GRID_LEN} points, got {}",
            n_grid.len()
        )));
    }
    if n_grid[0] < 2 || *n_grid.last().unwrap() > MAX_N {
        return Err(Error::Param(format!("n-grid must lie in [2, {MAX_N}]")));
    }
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Param("n-grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Applies `f` to every item on `workers` threads, preserving order.
fn parallel_map<T: Sync, R: Send, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    F: Fn(&T) -> R + Sync,
{
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    (w..items.len())
                        .step_by(workers)
                        .map(|i| (i, f(&items[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("rate worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every row computed")).collect()
}

/// Measured and predicted quantities at each `n`, in grid order.
///
/// Unlike [`run_rate_experiment`] this accepts grids of any length.
pub fn measure_rows(
    model: &DistributionModel,
    beta: f64,
    n_grid: &[u64],
    opts: &RateOptions,
) -> Result<Vec<RateRow>> {
    let spec = opts.entropy.spec;
    let env = RemainderEnvelope::for_model(model)?;
    let row_for = |&n: &u64| -> Result<RateRow> {
        let norming = standard_norming(model, n, &spec)?;
        let nm = NormalizedMaximum::new(model, norming)?;
        let m = entropy_gap(&nm, beta, &opts.entropy)?;
        let terms = envelope_terms(model, &norming, &env)?;
        Ok(RateRow {
            n,
            a_n: norming.a_n,
            b_n: norming.b_n,
            h_env: terms.h,
            supnorm: m.supnorm,
            h_gn: m.h_gn,
            h_limit: m.h_limit,
            entropy_diff: m.diff,
            predicted_envelope: terms.total(),
            t_n: (truncation_point(model, n) - norming.b_n) / norming.a_n,
            lp_integral: m.lp_integral,
            hypothesis_ratio: m.hypothesis_ratio,
            m_bound: m.m_bound,
        })
    };
    let mut rows = parallel_map(n_grid, opts.workers, row_for)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n);
    Ok(rows)
}

pub fn run_rate_experiment(
    model: &DistributionModel,
    beta: f64,
    n_grid: &[u64],
    opts: &RateOptions,
) -> Result<RateReport> {
    validate_grid(n_grid)?;
    let spec = opts.entropy.spec;
    let rows = measure_rows(model, beta, n_grid, opts)?;
    let hs: Vec<f64> = rows.iter().map(|r| r.h_env).collect();

    let ns: Vec<u64> = rows.iter().map(|r| r.n).collect();
    let predicted: Vec<f64> = rows.iter().map(|r| r.predicted_envelope).collect();
    let predicted_slope = fit_loglog(&ns, &predicted)?.slope;
    let h_slope = if hs.iter().all(|&h| h > 0.0) {
        fit_loglog(&ns, &hs)?.slope
    } else {
        f64::NAN
    };

    let exact = model.is_max_stable() || rows.iter().all(|r| r.supnorm <= DEGENERATE_SUPNORM);
    let (fitted_supnorm, fitted_entropy, degenerate) = if exact {
        (None, None, Some("degenerate: exact max-stability".to_string()))
    } else {
        let sup: Vec<f64> = rows.iter().map(|r| r.supnorm).collect();
        let diff: Vec<f64> = rows.iter().map(|r| r.entropy_diff).collect();
        (Some(fit_loglog(&ns, &sup)?), Some(fit_loglog(&ns, &diff)?), None)
    };

    let bound_checks = if opts.verify_bounds {
        verify_all_bounds_with(model, n_grid, &opts.bounds, &spec)?
    } else {
        Vec::new()
    };

    Ok(RateReport {
        model_name: model.name(),
        beta,
        rows,
        fitted_supnorm,
        fitted_entropy,
        predicted_slope,
        h_slope,
        degenerate,
        bound_checks,
    })
}

/// Constants for the Fréchet-domain bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundOptions {
    /// Exponent in `h(a_n x)/h(a_n) ≤ x^{-ρ}`.
    pub rho: f64,
    /// Lower cut-off `x ≥ δ / a_n`.
    pub delta: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { rho: 2.0, delta: 10.0 }
    }
}

/// `c = ρ^{-1} θ sup_{0<y<1} y^{-1-θ} |log y| e^{-1/y}`, `θ = ρ/(α - h(δ))`.
pub fn frechet_bound_constant(alpha: f64, rho: f64, h_delta: f64) -> Result<f64> {
    if !(h_delta < alpha) {
        return Err(Error::Param(format!("need h(δ) = {h_delta} < α = {alpha}")));
    }
    let theta = rho / (alpha - h_delta);
    let s = sup_norm(
        |y: f64| {
            if y <= 0.0 || y >= 1.0 {
                0.0
            } else {
                ((-1.0 - theta) * y.ln() + (-y.ln()).ln() - 1.0 / y).exp()
            }
        },
        0.0,
        1.0,
        &GridScale::Linear,
        BOUND_GRID_POINTS,
    )?;
    Ok(theta * s.value / rho)
}

/// Every uniform bound applicable to the model's domain, at each `n`.
///
/// Penultimate family (both signs, all models). Gumbel domain, under the
/// norming `-n log F(b_n) = 1`: `sup_{x≥0}|F^n - Λ| ≤ e^{-1} h_env(b_n)`,
/// the penultimate sandwich at `x ∈ {-1, 0.5, 1, 2}`, and the scale ratio
/// `u(b_n)/u(a_n x + b_n)` between `1/(1 ± h x)`. Fréchet domain:
/// `sup_{δ/a_n ≤ x ≤ 1} |Φ_{α±h(a_n x)} - Φ_α| ≤ c h_env(a_n)` and
/// `sup_{x ≤ δ/a_n} |F^n(a_n x) - Φ_α| ≤ F^n(δ) ∨ Φ_α(δ/a_n)`.
pub fn verify_all_bounds(model: &DistributionModel, n_grid: &[u64]) -> Result<Vec<BoundCheck>> {
    verify_all_bounds_with(model, n_grid, &BoundOptions::default(), &QuadratureSpec::default())
}

pub fn verify_all_bounds_with(
    model: &DistributionModel,
    n_grid: &[u64],
    opts: &BoundOptions,
    spec: &QuadratureSpec,
) -> Result<Vec<BoundCheck>> {
    let mut checks = Vec::new();
    let e_inv = (-1f64).exp();
    for z in PENULTIMATE_ZS {
        for signed in [z, -z] {
            let d = penultimate_distance(signed, BOUND_GRID_POINTS)?;
            checks.push(BoundCheck::new(format!("penultimate z={signed}"), e_inv * z, d.value));
        }
    }

    match model.domain_tag() {
        DomainTag::Gumbel => {
            let env = RemainderEnvelope::for_model(model)?;
            for &n in n_grid {
                let nm = NormalizedMaximum::von_mises(model, n)?;
                let (a_n, b_n) = (nm.norming.a_n, nm.norming.b_n);
                let h_b = env.h_env(b_n)?;
                let d = cdf_distance(&nm, 0.0, GUMBEL_EFFECTIVE_RANGE.1, BOUND_GRID_POINTS)?;
                checks.push(BoundCheck::new(format!("gumbel_uniform n={n}"), e_inv * h_b, d.value));

                for x in SANDWICH_XS {
                    let s = sandwich_check(&nm, x)?;
                    let margin = s.lower_margin.min(s.upper_margin);
                    checks.push(BoundCheck {
                        name: format!("sandwich n={n} x={x}"),
                        pass: s.ordered || s.outside_bound_support || margin >= -NUMERICAL_FLOOR,
                        margin,
                    });

                    let y = a_n * x + b_n;
                    let h = if x >= 0.0 { h_b } else { env.h_env(y)? };
                    if h * x.abs() < 1.0 {
                        let ratio = a_n / von_mises_scale(model, y)?;
                        let (lo, hi) = (1.0 / (1.0 + h * x), 1.0 / (1.0 - h * x));
                        let (lo, hi) = (lo.min(hi), lo.max(hi));
                        let margin = (ratio - lo).min(hi - ratio);
                        checks.push(BoundCheck {
                            name: format!("scale_ratio n={n} x={x}"),
                            pass: margin >= -NUMERICAL_FLOOR,
                            margin,
                        });
                    }
                }
            }
        }
        DomainTag::Frechet(alpha) => {
            let env = RemainderEnvelope::new(
                model,
                crate::norming::RemainderKind::Frechet,
                opts.delta.min(model.quantile(0.5)),
                crate::norming::ENVELOPE_POINTS,
            )?;
            let h_delta = env.h_env(opts.delta)?;
            let c = frechet_bound_constant(alpha, opts.rho, h_delta)?;
            let law = MaxStableLaw::Frechet(alpha);
            for &n in n_grid {
                let norming = standard_norming(model, n, spec)?;
                let a_n = norming.a_n;
                if a_n <= opts.delta {
                    continue;
                }
                let x_lo = opts.delta / a_n;
                let h_a = env.h_env(a_n)?;
                let worst = sup_norm(
                    |x| {
                        let h = env.h_env(a_n * x).unwrap_or(f64::NAN);
                        let base = law.cdf(x);
                        let lo = MaxStableLaw::Frechet(alpha - h).cdf(x);
                        let hi = MaxStableLaw::Frechet(alpha + h).cdf(x);
                        (lo - base).abs().max((hi - base).abs())
                    },
                    x_lo,
                    1.0,
                    &GridScale::Linear,
                    BOUND_GRID_POINTS,
                )?;
                checks.push(BoundCheck::new(format!("frechet_family n={n}"), c * h_a, worst.value));

                let nm = NormalizedMaximum::new(model, norming)?;
                let lower_bound = nm.cdf(x_lo).max(law.cdf(x_lo));
                let lo_end = nm.lower_end().min(0.0);
                let lower = if x_lo > lo_end {
                    sup_norm(
                        |x| nm.cdf(x) - law.cdf(x),
                        lo_end,
                        x_lo,
                        &GridScale::Linear,
                        BOUND_GRID_POINTS,
                    )?
                    .value
                } else {
                    0.0
                };
                checks.push(BoundCheck::new(format!("frechet_lower n={n}"), lower_bound, lower));
            }
        }
        DomainTag::Weibull(_) => {
            return Err(Error::DomainMismatch {
                expected: "Frechet- or Gumbel-domain",
                model: model.name(),
            })
        }
        DomainTag::None => return Err(Error::NoDomain(model.name())),
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn envelope_examples() {
        let p = DistributionModel::pareto(1.0).unwrap();
        let v = predicted_envelope(&p, 10_000, &spec()).unwrap();
        let h = 1e-4 / (1.0 - 1e-4);
        assert!((v - h).abs() < 1e-10 * h, "{v}");
        assert!((v - 1.0001e-4).abs() < 1e-8);

        let e = DistributionModel::exponential();
        let v = predicted_envelope(&e, 10_000, &spec()).unwrap();
        assert!((v / 1e-4 - 1.0).abs() < 0.01, "{v}");

        assert!((n_exp_sqrt(4) - 4.0 * (-2f64).exp()).abs() < 1e-15);
        assert!((n_exp_sqrt(4) - 0.5413).abs() < 1e-4);
    }

    #[test]
    fn truncation_term_is_negligible_from_1600() {
        for n in [1600, 2048, 4096, 16_384, 1_000_000] {
            assert!(n_exp_sqrt(n) < 1e-12, "n = {n}");
        }
        assert!(n_exp_sqrt(1024) > 1e-12);
    }

    #[test]
    fn truncation_point_solves_its_equation() {
        for m in DistributionModel::catalog() {
            for n in [16, 1024, 1_000_000] {
                let xi = truncation_point(&m, n);
                let lhs = -m.log_cdf(xi);
                assert!((lhs * (n as f64).sqrt() - 1.0).abs() < 1e-8, "{m} n={n}");
            }
        }
    }

    #[test]
    fn geometric_grids() {
        assert_eq!(geometric_grid(16, 16_384, 2.0).unwrap(), default_n_grid());
        assert_eq!(geometric_grid(10, 1000, 10.0).unwrap(), vec![10, 100, 1000]);
        assert!(geometric_grid(1, 10, 2.0).is_err());
        assert!(geometric_grid(10, 2_000_000, 2.0).is_err());
        assert!(geometric_grid(10, 100, 1.0).is_err());
    }

    #[test]
    fn rejects_short_or_unsorted_grids() {
        let e = DistributionModel::exponential();
        let opts = RateOptions::default();
        assert!(run_rate_experiment(&e, 2.0, &[16, 32, 64], &opts).is_err());
        assert!(run_rate_experiment(&e, 2.0, &[16, 64, 32, 128, 256], &opts).is_err());
    }

    #[test]
    fn frechet_constant_is_finite_and_positive() {
        let p = DistributionModel::pareto(1.0).unwrap();
        let h_delta = crate::norming::remainder_frechet(&p, 10.0).unwrap().h_env;
        let c = frechet_bound_constant(1.0, 1.0, h_delta).unwrap();
        assert!(c.is_finite() && c > 0.0);
    }

    #[test]
    fn exact_parents_are_degenerate() {
        let opts = RateOptions {
            verify_bounds: false,
            ..RateOptions::default()
        };
        let g = DistributionModel::gumbel();
        let r = run_rate_experiment(&g, 2.0, &default_n_grid(), &opts).unwrap();
        assert!(r.rows.iter().all(|row| row.supnorm <= 1e-8));
        assert_eq!(r.degenerate.as_deref(), Some("degenerate: exact max-stability"));
        assert!(r.fitted_supnorm.is_none());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let p = DistributionModel::burr(2.0).unwrap();
        let grid = [16, 32, 64, 128, 256, 512];
        let base = RateOptions {
            verify_bounds: false,
            ..RateOptions::default()
        };
        let one = run_rate_experiment(&p, 2.0, &grid, &base).unwrap();
        let four = run_rate_experiment(&p, 2.0, &grid, &RateOptions { workers: 4, ..base }).unwrap();
        assert_eq!(one, four);
    }
}
