use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(log n, log y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub rms_residual: f64,
}

pub fn fit_loglog(ns: &[u64], ys: &[f64]) -> Result<FitResult> {
    if ns.len() != ys.len() {
        return Err(Error::Domain(format!(
            "length mismatch: {} sample sizes vs {} values",
            ns.len(),
            ys.len()
        )));
    }
    if ns.len() < 3 {
        return Err(Error::Domain("need at least three points to fit".into()));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::Domain(format!("sample size {n} < 2")));
    }
    if let Some(&y) = ys.iter().find(|&&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::Domain(format!("cannot take log of {y}")));
    }

    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ls.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all sample sizes are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ls)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        rms_residual: (ss / k).sqrt(),
    })
}
