//! Exact correlators of the massless fermionic Thirring model with the
//! finite-size momentum cutoff Λ = π n_ph sin(x)/x, x = χ/|η|.
//!
//! All products are accumulated as sorted sums of logarithms and
//! exponentiated once, so the results neither overflow for many points nor
//! depend on the order in which the points are given.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::momentum_cutoff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationUnit {
    Meters,
    /// n_ph·(z − z′).
    InverseDensity,
    /// Abscissa is the coupling χ/|η| itself.
    ChiOverEta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaTag {
    TwoPoint,
    NPoint,
    MomentumCutoff,
}

/// Ordered (abscissa, value) pairs with the couplings that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub separations: Vec<f64>,
    pub values: Vec<f64>,
    pub unit: SeparationUnit,
    pub chi_over_eta: Option<f64>,
    /// Λ in 1/m.
    pub cutoff: Option<f64>,
    pub scale_m: Option<f64>,
    pub n_ph: f64,
    pub formula: FormulaTag,
}

impl CorrelationSeries {
    /// Least-squares slope and intercept of ln(value) against ln(separation),
    /// plus the largest absolute residual.
    pub fn log_log_fit(&self) -> (f64, f64, f64) {
        let xs: Vec<f64> = self.separations.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = self.values.iter().map(|g| g.ln()).collect();
        linear_fit(&xs, &ys)
    }
}

pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    (slope, intercept, resid)
}

fn check_coupling(chi_over_eta: f64) -> Result<()> {
    if chi_over_eta.is_finite() && (0.0..=PI).contains(&chi_over_eta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("chi/|eta| must lie in [0, pi], got {chi_over_eta}")))
    }
}

/// Exponent p = 1/(1 + χ/(π|η|)) shared by every factor of the correlators.
fn power(chi_over_eta: f64) -> f64 {
    1.0 / (1.0 + chi_over_eta / PI)
}

/// Exponent −1/(1 + χ/(π|η|)) of Λ²d² in the two-point function, i.e. the
/// slope of ln G against ln d². Against ln d the slope is twice this.
pub fn correlation_exponent(chi_over_eta: f64) -> Result<f64> {
    if !(chi_over_eta.is_finite() && chi_over_eta >= 0.0) {
        return Err(Error::Domain(format!("chi/|eta| must be >= 0, got {chi_over_eta}")));
    }
    Ok(-power(chi_over_eta))
}

/// ⟨S⁺(z)S⁻(z′)⟩ = (Λ²/4)[Λ²d²]^{−p} at separation `d` = |z − z′| (m), in
/// 1/m².
pub fn two_point(d: f64, chi_over_eta: f64, n_ph: f64) -> Result<f64> {
    check_coupling(chi_over_eta)?;
    if d == 0.0 {
        return Err(Error::SingularSeparation("two-point function diverges at d = 0".into()));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!("separation must be > 0, got {d}")));
    }
    let lambda = momentum_cutoff(chi_over_eta, n_ph)?;
    let p = power(chi_over_eta);
    let ln_lambda = lambda.ln();
    Ok((2.0 * ln_lambda - 2.0 * LN_2 - p * (2.0 * ln_lambda + 2.0 * d.ln())).exp())
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// n-point function ⟨Π_i S⁺(z_i) S⁻(z′_i)⟩ with all (i, j) ∈ [n]×[n] pairs
/// in the denominator. `scale_m` is the infrared scale M in 1/m.
pub fn n_point(z: &[f64], z_prime: &[f64], chi_over_eta: f64, n_ph: f64, scale_m: f64) -> Result<f64> {
    check_coupling(chi_over_eta)?;
    let n = z.len();
    if n == 0 || n != z_prime.len() {
        return Err(Error::Domain(format!(
            "need equal, non-empty point lists, got {} and {}",
            n,
            z_prime.len()
        )));
    }
    if !(scale_m.is_finite() && scale_m > 0.0) {
        return Err(Error::Domain(format!("scale M must be > 0, got {scale_m}")));
    }
    if let Some(x) = z.iter().chain(z_prime).find(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("non-finite position {x}")));
    }
    let lambda = momentum_cutoff(chi_over_eta, n_ph)?;
    let ln_lambda = lambda.ln();
    let p = power(chi_over_eta);

    let mut numer = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..i {
            let dz = (z[i] - z[j]).abs();
            if dz == 0.0 {
                return Err(Error::SingularSeparation(format!("z[{i}] coincides with z[{j}]")));
            }
            let dzp = (z_prime[i] - z_prime[j]).abs();
            if dzp == 0.0 {
                return Err(Error::SingularSeparation(format!(
                    "z_prime[{i}] coincides with z_prime[{j}]"
                )));
            }
            numer.push(2.0 * dz.ln() + 2.0 * dzp.ln() + 4.0 * scale_m.ln());
        }
    }
    let mut denom = Vec::with_capacity(n * n);
    for (i, zi) in z.iter().enumerate() {
        for (j, zj) in z_prime.iter().enumerate() {
            let d = (zi - zj).abs();
            if d == 0.0 {
                return Err(Error::SingularSeparation(format!("z[{i}] coincides with z_prime[{j}]")));
            }
            denom.push(2.0 * ln_lambda + 2.0 * d.ln());
        }
    }
    let ln_value = 2.0 * ln_lambda - 2.0 * LN_2 * n as f64 + p * sorted_sum(numer) - p * sorted_sum(denom);
    Ok(ln_value.exp())
}

/// Two-point series on log-spaced separations `u = n_ph·d` in
/// `[d_min, d_max]`.
pub fn correlation_series(chi_over_eta: f64, n_ph: f64, d_min: f64, d_max: f64, n_points: usize) -> Result<CorrelationSeries> {
    if !(d_min > 0.0 && d_max > d_min && d_max.is_finite()) {
        return Err(Error::Domain(format!("need 0 < d_min < d_max, got {d_min}, {d_max}")));
    }
    if n_points < 2 {
        return Err(Error::Domain(format!("need at least 2 points, got {n_points}")));
    }
    let (a, b) = (d_min.ln(), d_max.ln());
    let last = (n_points - 1) as f64;
    let separations: Vec<f64> = (0..n_points)
        .map(|i| match i {
            0 => d_min,
            i if i == n_points - 1 => d_max,
            i => (a + (b - a) * i as f64 / last).exp(),
        })
        .collect();
    let values = separations
        .iter()
        .map(|u| two_point(u / n_ph, chi_over_eta, n_ph))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationSeries {
        separations,
        values,
        unit: SeparationUnit::InverseDensity,
        chi_over_eta: Some(chi_over_eta),
        cutoff: Some(momentum_cutoff(chi_over_eta, n_ph)?),
        scale_m: None,
        n_ph,
        formula: FormulaTag::TwoPoint,
    })
}
