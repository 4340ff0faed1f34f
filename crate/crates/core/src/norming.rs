//! Norming constants, the Gumbel auxiliary function and von Mises remainders.
//!
//! Two scale functions appear for the Gumbel domain:
//!
//! - the tail integral `u(t) = ∫_t^{r(F)} F̄(s) ds / F̄(t)` ([`auxiliary_u`]),
//!   used for the norming `a_n = u(b_n)`;
//! - `1/η'(t) = -F(t) log F(t) / f(t)` ([`von_mises_scale`]), whose
//!   derivative is exactly the remainder `h` of [`remainder_gumbel`].
//!
//! The two agree asymptotically but not identically; bounds whose proofs
//! differentiate the scale function are checked against `1/η'`.

use serde::Serialize;

use crate::distributions::{DistributionModel, DomainTag};
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_breaks, QuadratureSpec};

/// Number of grid points in the remainder envelope.
pub const ENVELOPE_POINTS: usize = 512;
/// Tail probability at which the envelope grid stops.
pub const ENVELOPE_TAIL: f64 = 1e-12;
/// Tail probability, relative to `F̄(t)`, at which `u(t)` is truncated.
const U_TRUNCATION: f64 = 1e-14;
/// Below this `F̄`, `-log F` uses its series expansion.
const SERIES_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormingPair {
    pub n: u64,
    pub a_n: f64,
    pub b_n: f64,
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        Err(Error::Param(format!("sample size must be at least 2, got {n}")))
    } else {
        Ok(())
    }
}

fn require_frechet(model: &DistributionModel) -> Result<f64> {
    match model.domain_tag() {
        DomainTag::Frechet(a) => Ok(a),
        _ => Err(Error::DomainMismatch {
            expected: "Frechet-domain",
            model: model.name(),
        }),
    }
}

fn require_gumbel(model: &DistributionModel) -> Result<()> {
    match model.domain_tag() {
        DomainTag::Gumbel => Ok(()),
        _ => Err(Error::DomainMismatch {
            expected: "Gumbel-domain",
            model: model.name(),
        }),
    }
}

/// `a_n = F^{←}(1 - 1/n)`, `b_n = 0`.
pub fn norming_frechet(model: &DistributionModel, n: u64) -> Result<NormingPair> {
    require_frechet(model)?;
    check_n(n)?;
    Ok(NormingPair {
        n,
        a_n: model.upper_quantile(1.0 / n as f64),
        b_n: 0.0,
    })
}

/// `b_n = F^{←}(1 - 1/n)`, `a_n = u(b_n)`.
pub fn norming_gumbel(model: &DistributionModel, n: u64, spec: &QuadratureSpec) -> Result<NormingPair> {
    require_gumbel(model)?;
    check_n(n)?;
    let b_n = model.upper_quantile(1.0 / n as f64);
    Ok(NormingPair {
        n,
        a_n: auxiliary_u(model, b_n, spec)?,
        b_n,
    })
}

/// Norming under which `-n log F(b_n) = 1` exactly: `b_n = F^{←}(e^{-1/n})`,
/// `a_n = 1/η'(b_n)`.
///
/// With these constants the penultimate sandwich and the `e^{-1} h(b_n)`
/// bound hold as stated; the quantile norming of [`norming_gumbel`] differs
/// from it by `O(1/n)`.
pub fn norming_gumbel_von_mises(model: &DistributionModel, n: u64) -> Result<NormingPair> {
    require_gumbel(model)?;
    check_n(n)?;
    let b_n = model.upper_quantile(-(-1.0 / n as f64).exp_m1());
    Ok(NormingPair {
        n,
        a_n: von_mises_scale(model, b_n)?,
        b_n,
    })
}

/// Closed-form constants making `F^n(a_n x + b_n) = F(x)` for max-stable
/// parents; `None` for every other model.
pub fn exact_norming(model: &DistributionModel, n: u64) -> Option<NormingPair> {
    if n < 2 || !model.is_max_stable() {
        return None;
    }
    match model.domain_tag() {
        DomainTag::Gumbel => Some(NormingPair {
            n,
            a_n: 1.0,
            b_n: (n as f64).ln(),
        }),
        DomainTag::Frechet(alpha) => Some(NormingPair {
            n,
            a_n: (n as f64).powf(1.0 / alpha),
            b_n: 0.0,
        }),
        _ => None,
    }
}

/// Norming used by the entropy and rate experiments: exact for max-stable
/// parents, quantile-based otherwise.
pub fn standard_norming(model: &DistributionModel, n: u64, spec: &QuadratureSpec) -> Result<NormingPair> {
    if let Some(p) = exact_norming(model, n) {
        return Ok(p);
    }
    match model.domain_tag() {
        DomainTag::Frechet(_) => norming_frechet(model, n),
        DomainTag::Gumbel => norming_gumbel(model, n, spec),
        DomainTag::Weibull(_) => Err(Error::DomainMismatch {
            expected: "Frechet- or Gumbel-domain",
            model: model.name(),
        }),
        DomainTag::None => Err(Error::NoDomain(model.name())),
    }
}

/// `u(t) = ∫_t^{r(F)} F̄(s) ds / F̄(t)`.
///
/// The integral is truncated where `F̄` has fallen by a factor `1e-14`; the
/// remainder beyond is approximated by `F̄(T)² / f(T)`.
pub fn auxiliary_u(model: &DistributionModel, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    require_gumbel(model)?;
    if t >= model.right_end() {
        return Err(Error::Domain(format!("t = {t} is not below r(F)")));
    }
    let sf_t = model.sf(t);
    if !(sf_t > f64::MIN_POSITIVE) {
        return Err(Error::TailUnderflow { t });
    }

    let q_end = (sf_t * U_TRUNCATION).max(f64::MIN_POSITIVE);
    let end = model.upper_quantile(q_end);
    // One panel per decade of tail probability.
    let breaks: Vec<f64> = (1..14)
        .map(|k| model.upper_quantile(sf_t * 10f64.powi(-k)))
        .collect();
    let body = integrate_with_breaks(|s| model.sf(s) / sf_t, t, end, &breaks, spec)?;

    let (sf_end, f_end) = (model.sf(end), model.pdf(end));
    let tail = if f_end > 0.0 {
        (sf_end / sf_t) * (sf_end / f_end)
    } else {
        0.0
    };
    Ok(body + tail)
}

/// `1/η'(t) = -F(t) log F(t) / f(t)`, where `F = exp(-e^{-η})`.
pub fn von_mises_scale(model: &DistributionModel, t: f64) -> Result<f64> {
    let f = model.pdf(t);
    let sf = model.sf(t);
    if !(f > 0.0) || !(sf > 0.0) {
        return Err(Error::TailUnderflow { t });
    }
    Ok(model.cdf(t) * neg_log_cdf(model, t) / f)
}

/// `f(t) u(t) / F̄(t)`; tends to 1 in the Gumbel domain.
pub fn gumbel_von_mises_ratio(model: &DistributionModel, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(model.pdf(t) * auxiliary_u(model, t, spec)? / model.sf(t))
}

/// `t f(t) / F̄(t)`; tends to `α` in the Fréchet domain.
pub fn frechet_von_mises_ratio(model: &DistributionModel, t: f64) -> Result<f64> {
    require_frechet(model)?;
    let sf = model.sf(t);
    if !(sf > 0.0) {
        return Err(Error::TailUnderflow { t });
    }
    Ok(t * model.pdf(t) / sf)
}

fn neg_log_cdf(model: &DistributionModel, t: f64) -> f64 {
    let s = model.sf(t);
    if s < SERIES_CUTOFF {
        s * (1.0 + s * (0.5 + s / 3.0))
    } else {
        -model.log_cdf(t)
    }
}

/// Which von Mises remainder an envelope tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RemainderKind {
    /// `h = (1/η')' = -log F - [1 - F f' log F / f²]`.
    Gumbel,
    /// `h = t f / (F F̄) - α`.
    Frechet,
}

/// Pointwise remainder and its nonincreasing envelope at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderEvaluation {
    pub t: f64,
    pub h_raw: f64,
    /// `sup |h|` over `[t, F^{←}(1 - 1e-12)]`, on the envelope grid.
    pub h_env: f64,
}

/// Raw remainder `h(t)` of the requested kind.
pub fn remainder_raw(model: &DistributionModel, kind: RemainderKind, t: f64) -> Result<f64> {
    let f = model.pdf(t);
    let sf = model.sf(t);
    if !(sf > 0.0) {
        return Err(Error::TailUnderflow { t });
    }
    if !(f > 0.0) {
        return Err(Error::Domain(format!("density vanishes at t = {t}")));
    }
    let cdf = model.cdf(t);
    if !(cdf > 0.0) {
        return Err(Error::Domain(format!("F(t) = 0 at t = {t}")));
    }
    match kind {
        RemainderKind::Gumbel => {
            let l = neg_log_cdf(model, t);
            Ok(l - 1.0 - cdf * model.pdf_deriv(t) * l / (f * f))
        }
        RemainderKind::Frechet => {
            let alpha = require_frechet(model)?;
            Ok(t * f / (cdf * sf) - alpha)
        }
    }
}

/// Nonincreasing majorant of `|h|`, tabulated once on a grid equispaced in
/// log tail probability from `F̄(t_start)` down to `1e-12`.
///
/// The grid is fixed at construction, so evaluations at grid points are
/// exactly nonincreasing.
#[derive(Debug, Clone)]
pub struct RemainderEnvelope {
    model: DistributionModel,
    kind: RemainderKind,
    xs: Vec<f64>,
    suffix_max: Vec<f64>,
}

impl RemainderEnvelope {
    pub fn new(model: &DistributionModel, kind: RemainderKind, t_start: f64, points: usize) -> Result<Self> {
        match kind {
            RemainderKind::Gumbel => require_gumbel(model)?,
            RemainderKind::Frechet => {
                require_frechet(model)?;
            }
        }
        if points < 2 {
            return Err(Error::Param("envelope needs at least two grid points".into()));
        }
        let q0 = model.sf(t_start);
        if !(q0 > 0.0) {
            return Err(Error::TailUnderflow { t: t_start });
        }

        let mut xs = vec![t_start];
        if q0 > ENVELOPE_TAIL {
            let (l0, l1) = (q0.ln(), ENVELOPE_TAIL.ln());
            for i in 1..points {
                let q = (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp();
                let x = model.upper_quantile(q);
                if x > *xs.last().unwrap() {
                    xs.push(x);
                }
            }
        }

        let mut abs_h = Vec::with_capacity(xs.len());
        for &x in &xs {
            abs_h.push(remainder_raw(model, kind, x)?.abs());
        }
        let mut suffix_max = abs_h;
        for i in (0..suffix_max.len().saturating_sub(1)).rev() {
            suffix_max[i] = suffix_max[i].max(suffix_max[i + 1]);
        }
        Ok(Self {
            model: *model,
            kind,
            xs,
            suffix_max,
        })
    }

    /// Envelope for the model's own domain, starting at the median.
    pub fn for_model(model: &DistributionModel) -> Result<Self> {
        let kind = match model.domain_tag() {
            DomainTag::Gumbel => RemainderKind::Gumbel,
            DomainTag::Frechet(_) => RemainderKind::Frechet,
            _ => {
                return Err(Error::DomainMismatch {
                    expected: "Frechet- or Gumbel-domain",
                    model: model.name(),
                })
            }
        };
        Self::new(model, kind, model.quantile(0.5), ENVELOPE_POINTS)
    }

    pub fn kind(&self) -> RemainderKind {
        self.kind
    }

    pub fn start(&self) -> f64 {
        self.xs[0]
    }

    /// Grid abscissae, ascending.
    pub fn grid(&self) -> &[f64] {
        &self.xs
    }

    pub fn evaluate(&self, t: f64) -> Result<RemainderEvaluation> {
        let h_raw = remainder_raw(&self.model, self.kind, t)?;
        if t < self.xs[0] {
            let fresh = Self::new(&self.model, self.kind, t, ENVELOPE_POINTS)?;
            return Ok(RemainderEvaluation {
                t,
                h_raw,
                h_env: fresh.suffix_max[0],
            });
        }
        let i = self.xs.partition_point(|&x| x < t);
        let beyond = self.suffix_max.get(i).copied().unwrap_or(0.0);
        Ok(RemainderEvaluation {
            t,
            h_raw,
            h_env: beyond.max(h_raw.abs()),
        })
    }

    pub fn h_env(&self, t: f64) -> Result<f64> {
        Ok(self.evaluate(t)?.h_env)
    }
}

/// Gumbel-domain remainder at `t`, with an envelope gridded from `t`.
pub fn remainder_gumbel(model: &DistributionModel, t: f64) -> Result<RemainderEvaluation> {
    RemainderEnvelope::new(model, RemainderKind::Gumbel, t, ENVELOPE_POINTS)?.evaluate(t)
}

/// Fréchet-domain remainder at `t`, with an envelope gridded from `t`.
pub fn remainder_frechet(model: &DistributionModel, t: f64) -> Result<RemainderEvaluation> {
    if t <= model.left_end() {
        return Err(Error::Domain(format!("t = {t} is not above l(F)")));
    }
    RemainderEnvelope::new(model, RemainderKind::Frechet, t, ENVELOPE_POINTS)?.evaluate(t)
}

/// Probe constants for the rate-bound hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioProbe {
    /// Bound on `u(b_n) / (b_n h(b_n))`.
    pub k: f64,
    /// Shrink factor; needs `c k < 1`.
    pub c: f64,
    pub b: f64,
    pub d: f64,
    /// Exponent in `h(a_n x) / h(a_n) ≤ x^{-ρ}`.
    pub rho: f64,
    /// Lower cut-off: `x ≥ δ / a_n`.
    pub delta: f64,
}

impl Default for RatioProbe {
    fn default() -> Self {
        Self {
            k: 2.0,
            c: 0.25,
            b: 1.0,
            d: 2.0,
            rho: 1.0,
            delta: 10.0,
        }
    }
}

/// Outcome of one numerically evaluated hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    /// Point at which `value` was attained.
    pub witness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub model: String,
    pub n: u64,
    pub checks: Vec<ConditionCheck>,
}

impl RatioReport {
    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const RATIO_GRID: usize = 256;

/// Evaluates the rate-bound hypotheses for `model` at sample size `n`.
///
/// Gumbel domain: `u(b_n)/(b_n h(b_n)) ≤ k`,
/// `h(b_n(1-ck))/h(b_n) ≤ d (1-ck)^{-b}` and `|u'(b_n)| < h(b_n)`.
/// Fréchet domain: `h(δ) < α` and `h(a_n x)/h(a_n) ≤ x^{-ρ}` on
/// `[δ/a_n, 1]`. Failures are reported, not raised.
pub fn check_ratio_conditions(
    model: &DistributionModel,
    n: u64,
    probe: &RatioProbe,
    spec: &QuadratureSpec,
) -> Result<RatioReport> {
    let mut checks = Vec::new();
    match model.domain_tag() {
        DomainTag::Gumbel => {
            let shrink = 1.0 - probe.c * probe.k;
            if !(shrink > 0.0) {
                return Err(Error::Param(format!(
                    "c = {} must be below 1/k = {}",
                    probe.c,
                    1.0 / probe.k
                )));
            }
            let norming = norming_gumbel(model, n, spec)?;
            let b_n = norming.b_n;
            let t_low = (b_n * shrink).min(b_n);
            let env = RemainderEnvelope::new(model, RemainderKind::Gumbel, t_low, ENVELOPE_POINTS)?;
            let h_b = env.h_env(b_n)?;

            let ratio_k = norming.a_n / (b_n * h_b);
            checks.push(ConditionCheck {
                name: "u_over_bh".into(),
                pass: ratio_k > 0.0 && ratio_k <= probe.k,
                value: ratio_k,
                threshold: probe.k,
                witness: b_n,
            });

            let h_shrunk = env.h_env(b_n * shrink)?;
            let bound = probe.d * shrink.powf(-probe.b);
            checks.push(ConditionCheck {
                name: "h_shrink_ratio".into(),
                pass: h_shrunk / h_b <= bound,
                value: h_shrunk / h_b,
                threshold: bound,
                witness: b_n * shrink,
            });

            let step = 1e-4 * norming.a_n;
            let du = (auxiliary_u(model, b_n + step, spec)? - auxiliary_u(model, b_n - step, spec)?)
                / (2.0 * step);
            checks.push(ConditionCheck {
                name: "u_prime_below_h".into(),
                pass: du.abs() < h_b,
                value: du.abs(),
                threshold: h_b,
                witness: b_n,
            });
        }
        DomainTag::Frechet(alpha) => {
            let norming = norming_frechet(model, n)?;
            let a_n = norming.a_n;
            if !(a_n > probe.delta) {
                return Err(Error::Param(format!(
                    "need a_n = {a_n} > δ = {}",
                    probe.delta
                )));
            }
            let env = RemainderEnvelope::new(model, RemainderKind::Frechet, probe.delta, ENVELOPE_POINTS)?;
            let h_delta = env.h_env(probe.delta)?;
            checks.push(ConditionCheck {
                name: "h_delta_below_alpha".into(),
                pass: h_delta < alpha,
                value: h_delta,
                threshold: alpha,
                witness: probe.delta,
            });

            let h_a = env.h_env(a_n)?;
            let x_lo = probe.delta / a_n;
            let mut worst = (f64::NEG_INFINITY, 1.0);
            for i in 0..RATIO_GRID {
                let x = x_lo * (1.0 / x_lo).powf(i as f64 / (RATIO_GRID - 1) as f64);
                let excess = env.h_env(a_n * x)? / h_a * x.powf(probe.rho);
                if excess > worst.0 {
                    worst = (excess, x);
                }
            }
            checks.push(ConditionCheck {
                name: "h_ratio_power".into(),
                pass: worst.0 <= 1.0,
                value: worst.0,
                threshold: 1.0,
                witness: worst.1,
            });
        }
        _ => {
            return Err(Error::DomainMismatch {
                expected: "Frechet- or Gumbel-domain",
                model: model.name(),
            })
        }
    }
    Ok(RatioReport {
        model: model.name(),
        n,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn frechet_norming_examples() {
        let p = norming_frechet(&DistributionModel::pareto(1.0).unwrap(), 1000).unwrap();
        assert!((p.a_n - 1000.0).abs() < 1e-9 && p.b_n == 0.0);
        let b = norming_frechet(&DistributionModel::burr(2.0).unwrap(), 100).unwrap();
        assert!((b.a_n - 9.0).abs() < 1e-12);
        let f = norming_frechet(&DistributionModel::frechet(1.0).unwrap(), 5).unwrap();
        assert!((f.a_n - 1.0 / 1.25f64.ln()).abs() < 1e-12, "{}", f.a_n);
    }

    #[test]
    fn gumbel_norming_examples() {
        let e = norming_gumbel(&DistributionModel::exponential(), 100, &spec()).unwrap();
        assert!((e.a_n - 1.0).abs() < 1e-9);
        assert!((e.b_n - 100f64.ln()).abs() < 1e-12);
        let g = norming_gumbel(&DistributionModel::gumbel(), 10, &spec()).unwrap();
        assert!((g.b_n - 2.250_367).abs() < 1e-5, "{}", g.b_n);
        // Oracle: mpmath quad of the Gumbel tail integral at b_n.
        assert!((g.a_n - 1.026_490_210_126).abs() < 1e-8, "{}", g.a_n);
        let nrm = norming_gumbel(&DistributionModel::normal(), 1000, &spec()).unwrap();
        assert!((nrm.b_n - 3.0902).abs() < 1e-4);
    }

    #[test]
    fn domain_mismatch() {
        assert!(matches!(
            norming_frechet(&DistributionModel::exponential(), 10),
            Err(Error::DomainMismatch { .. })
        ));
        assert!(matches!(
            norming_gumbel(&DistributionModel::pareto(1.0).unwrap(), 10, &spec()),
            Err(Error::DomainMismatch { .. })
        ));
        assert!(norming_frechet(&DistributionModel::pareto(1.0).unwrap(), 1).is_err());
    }

    #[test]
    fn auxiliary_function_values() {
        let e = DistributionModel::exponential();
        for t in [0.0, 1.0, 4.6, 20.0] {
            assert!((auxiliary_u(&e, t, &spec()).unwrap() - 1.0).abs() < 1e-9);
        }
        // Oracles: scipy quad of the tail integral, and φ(3)/F̄(3) - 3 for the normal.
        let g = auxiliary_u(&DistributionModel::gumbel(), 3.0, &spec()).unwrap();
        assert!((g - 1.012_480_763_8).abs() < 1e-3, "{g}");
        let nrm = auxiliary_u(&DistributionModel::normal(), 3.0, &spec()).unwrap();
        assert!((nrm - 0.283_098_654_9).abs() < 1e-3, "{nrm}");
        assert!(matches!(
            auxiliary_u(&e, 800.0, &spec()),
            Err(Error::TailUnderflow { .. })
        ));
    }

    #[test]
    fn gumbel_remainder_examples() {
        let e = DistributionModel::exponential();
        let r = remainder_gumbel(&e, 100f64.ln()).unwrap();
        assert!(r.h_raw.abs() > 0.004 && r.h_raw.abs() < 0.006, "{r:?}");
        assert!(r.h_env >= r.h_raw.abs());

        let g = DistributionModel::gumbel();
        let b = norming_gumbel(&g, 10_000, &spec()).unwrap().b_n;
        assert!(remainder_gumbel(&g, b).unwrap().h_raw.abs() <= 1e-3);
    }

    #[test]
    fn frechet_remainder_examples() {
        let p = remainder_frechet(&DistributionModel::pareto(1.0).unwrap(), 100.0).unwrap();
        assert!((p.h_raw - 1.0 / 99.0).abs() < 1e-14);
        let b = remainder_frechet(&DistributionModel::burr(2.0).unwrap(), 100.0).unwrap();
        assert!(b.h_raw.abs() > 0.018 && b.h_raw.abs() < 0.021, "{b:?}");
        let f = remainder_frechet(&DistributionModel::frechet(1.0).unwrap(), 50.0).unwrap();
        assert!(f.h_raw.abs() <= 0.011, "{f:?}");
    }

    #[test]
    fn envelope_is_monotone_on_common_grid() {
        for m in DistributionModel::catalog() {
            let env = RemainderEnvelope::for_model(&m).unwrap();
            let vals: Vec<f64> = env.grid().iter().map(|&t| env.h_env(t).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{m}");
            for &t in env.grid().iter().step_by(37) {
                let e = env.evaluate(t).unwrap();
                assert!(e.h_env >= e.h_raw.abs());
            }
        }
    }

    #[test]
    fn ratio_condition_examples() {
        let e = DistributionModel::exponential();
        let r = check_ratio_conditions(&e, 10_000, &RatioProbe::default(), &spec()).unwrap();
        let k = r.check("u_over_bh").unwrap();
        // u = 1, b_n = log n, h(b_n) ≈ 1/(2n): ratio ≈ 2n / log n.
        assert!(!k.pass);
        assert!((k.value / (2.0 * 1e4 / 1e4f64.ln()) - 1.0).abs() < 1e-3, "{k:?}");

        let bad = RatioProbe {
            c: 0.5,
            k: 2.0,
            ..RatioProbe::default()
        };
        assert!(matches!(
            check_ratio_conditions(&e, 100, &bad, &spec()),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn pareto_power_ratio_fails_marginally_at_rho_alpha() {
        // h(a_n x)/h(a_n) = (a_n - 1)/(a_n x - 1) > 1/x for x < 1.
        let m = DistributionModel::pareto(1.0).unwrap();
        for n in [100, 1000, 10_000] {
            let r = check_ratio_conditions(&m, n, &RatioProbe::default(), &spec()).unwrap();
            let c = r.check("h_ratio_power").unwrap();
            assert!(!c.pass && c.value < 1.12, "{c:?}");
            assert!(r.check("h_delta_below_alpha").unwrap().pass);
            let relaxed = RatioProbe {
                rho: 1.5,
                ..RatioProbe::default()
            };
            let r = check_ratio_conditions(&m, n, &relaxed, &spec()).unwrap();
            assert!(r.check("h_ratio_power").unwrap().pass, "n = {n}");
        }
    }

    #[test]
    fn von_mises_limits_along_n() {
        for m in [DistributionModel::exponential(), DistributionModel::gumbel(), DistributionModel::normal()] {
            let errs: Vec<f64> = [1e2, 1e3, 1e4, 1e5]
                .iter()
                .map(|&n| {
                    let b = m.upper_quantile(1.0 / n);
                    (gumbel_von_mises_ratio(&m, b, &spec()).unwrap() - 1.0).abs()
                })
                .collect();
            assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{m}: {errs:?}");
            if m != DistributionModel::normal() {
                assert!(errs[3] <= 0.02, "{m}: {errs:?}");
            }
        }
        for m in DistributionModel::catalog().into_iter().filter(|m| matches!(m.domain_tag(), DomainTag::Frechet(_))) {
            let env = RemainderEnvelope::for_model(&m).unwrap();
            let h = |n: f64| env.h_env(norming_frechet(&m, n as u64).unwrap().a_n).unwrap();
            assert!(h(1e5) < h(1e2), "{m}");
        }
    }

    #[test]
    fn von_mises_scale_matches_tail_integral_asymptotically() {
        // 1/η' and the tail-integral u differ by O(F̄); the gap shrinks with n.
        for m in [DistributionModel::exponential(), DistributionModel::gumbel()] {
            let mut last = f64::INFINITY;
            for n in [1e2, 1e3, 1e4, 1e5] {
                let p = norming_gumbel(&m, n as u64, &spec()).unwrap();
                let mut worst: f64 = 0.0;
                for x in [-1.0, 0.0, 1.0, 2.0] {
                    let y = p.a_n * x + p.b_n;
                    let ratio = von_mises_scale(&m, y).unwrap() / auxiliary_u(&m, y, &spec()).unwrap();
                    worst = worst.max((ratio - 1.0).abs());
                }
                assert!(worst < last && worst < 10.0 / n, "{m} n={n}: {worst}");
                last = worst;
            }
        }
    }
}
