//! Fiber and detector model.
//!
//! An `n`-photon pulse is detected with probability `1 - (1-α)^n + p_0` and
//! produces an erroneous click with probability `s (1 - (1-α)^n) + p_0 / 2`.
//! Averaging over Poisson photon numbers gives closed forms for the observed
//! rates, and the bounds of [`crate::bounds`] reduce to expressions in the
//! functional `ε^j_α`.

use crate::bounds::ObservedStats;
use crate::divided_diff::{simplex_mean_value_oracle, HomogeneousSeries, MonteCarloEstimate, PointSet};
use crate::error::{Error, Result};
use crate::expansion::IntensityGrid;

/// Default relative tolerance for the `ε` series.
pub const DEFAULT_EPSILON_TOL: f64 = 1e-14;

const MAX_SERIES_TERMS: usize = 10_000;

/// Detector efficiency, losses, background and intrinsic error rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Detector efficiency.
    pub theta: f64,
    /// Detector-side loss in dB.
    pub a0_db: f64,
    /// Fiber loss in dB/km.
    pub a1_db_per_km: f64,
    /// Vacuum counting rate.
    pub p0: f64,
    /// Dark-count rate.
    pub p_dark: f64,
    /// Error rate of detected signal photons.
    pub s: f64,
}

impl ChannelParams {
    pub fn new(theta: f64, a0_db: f64, a1_db_per_km: f64, p0: f64, p_dark: f64, s: f64) -> Result<Self> {
        let params = Self {
            theta,
            a0_db,
            a1_db_per_km,
            p0,
            p_dark,
            s,
        };
        params.validate()?;
        Ok(params)
    }

    /// θ = 0.1, a0 = 5 dB, a1 = 0.17 dB/km, p0 = 4e-7, p_D = 0, s = 0.03.
    pub fn paper() -> Self {
        Self {
            theta: 0.1,
            a0_db: 5.0,
            a1_db_per_km: 0.17,
            p0: 4.0e-7,
            p_dark: 0.0,
            s: 0.03,
        }
    }

    pub fn with_dark(self, p_dark: f64) -> Result<Self> {
        Self::new(self.theta, self.a0_db, self.a1_db_per_km, self.p0, p_dark, self.s)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        let all = [self.theta, self.a0_db, self.a1_db_per_km, self.p0, self.p_dark, self.s];
        if all.iter().any(|v| !v.is_finite()) {
            return fail("all parameters must be finite".into());
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return fail(format!("theta = {} outside (0, 1]", self.theta));
        }
        if self.a0_db < 0.0 || self.a1_db_per_km < 0.0 {
            return fail("losses must be non-negative".into());
        }
        if !(0.0 <= self.p_dark && self.p_dark <= self.p0 && self.p0 <= 1.0) {
            return fail(format!(
                "need 0 ≤ p_D ≤ p0 ≤ 1, got p_D = {}, p0 = {}",
                self.p_dark, self.p0
            ));
        }
        if !(0.0..=0.5).contains(&self.s) {
            return fail(format!("s = {} outside [0, 1/2]", self.s));
        }
        Ok(())
    }
}

/// Channel transmittance `α = θ 10^{-(a1 L + a0)/10}`.
pub fn alpha_of_distance(l_km: f64, params: &ChannelParams) -> Result<f64> {
    if !(l_km >= 0.0 && l_km.is_finite()) {
        return Err(Error::Domain(format!("distance must be a non-negative number, got {l_km}")));
    }
    Ok(params.theta * 10f64.powf(-(params.a1_db_per_km * l_km + params.a0_db) / 10.0))
}

/// Counting rate of intensity `μ`: `1 - e^{-αμ} + p_0`.
pub fn counting_rate(mu: f64, alpha: f64, params: &ChannelParams) -> f64 {
    -(-alpha * mu).exp_m1() + params.p0
}

/// Error rate of intensity `μ`: `(s (1 - e^{-αμ}) + p_0/2) / p`.
pub fn error_rate(mu: f64, alpha: f64, params: &ChannelParams) -> f64 {
    let signal = -(-alpha * mu).exp_m1();
    (params.s * signal + 0.5 * params.p0) / (signal + params.p0)
}

/// Detection and error probabilities of an `n`-photon pulse.
pub fn photon_number_rates(n: u32, alpha: f64, params: &ChannelParams) -> (f64, f64) {
    let lost = -(n as f64 * (-alpha).ln_1p()).exp_m1();
    (lost + params.p0, params.s * lost + 0.5 * params.p0)
}

/// Rates observed on `grid` with equal statistics in both bases.
pub fn model_stats(grid: &IntensityGrid, alpha: f64, params: &ChannelParams) -> Result<ObservedStats> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("transmittance {alpha} outside (0, 1]")));
    }
    let mut p = Vec::with_capacity(grid.k() + 1);
    p.push(params.p0);
    p.extend(grid.mus().iter().map(|&mu| counting_rate(mu, alpha, params)));
    let s = grid.mus().iter().map(|&mu| error_rate(mu, alpha, params)).collect();
    ObservedStats::symmetric(&p, s, params.p_dark)
}

fn check_order(j: usize, alpha: f64, grid: &IntensityGrid) -> Result<()> {
    if j == 0 || j > grid.k() {
        return Err(Error::Domain(format!("order j = {j} outside 1..={}", grid.k())));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("α = {alpha} outside [0, 1]")));
    }
    Ok(())
}

// 1 - (1-α)^n without cancellation for small α
fn one_minus_power(alpha: f64, n: f64) -> f64 {
    if alpha >= 1.0 {
        1.0
    } else {
        -(n * (-alpha).ln_1p()).exp_m1()
    }
}

/// `ε^j_α = μ_1⋯μ_j Σ_{n≥j+1} h_{n-1-j}(μ_1..μ_j) (1 - (1-α)^n) / n!`.
pub fn epsilon(j: usize, alpha: f64, grid: &IntensityGrid, tol: f64) -> Result<f64> {
    check_order(j, alpha, grid)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let nodes = &grid.mus()[..j];
    let mu_max = nodes[j - 1];
    let r = j as f64;
    let mut inv_fact = 1.0 / crate::divided_diff::factorial(j + 1);
    // u_m = C(m+j-1, j-1) μ_max^m / (m+j+1)! bounds h_m/(m+j+1)!; the factor
    // 1 - (1-α)^n is below both 1 and nα
    let mut u = inv_fact;
    let mut sum = 0.0;
    for (m, h) in HomogeneousSeries::new(nodes).enumerate().take(MAX_SERIES_TERMS) {
        let mf = m as f64;
        let n = mf + r + 1.0;
        sum += h * one_minus_power(alpha, n) * inv_fact;
        inv_fact /= n + 1.0;
        u *= (mf + r) / (mf + 1.0) * mu_max / (n + 1.0);
        let rho = (mf + 1.0 + r) / (mf + 2.0) * mu_max / (n + 2.0);
        let rho_w = rho * (n + 2.0) / (n + 1.0);
        if rho_w < 1.0 {
            let tail = (u / (1.0 - rho)).min(alpha * (n + 1.0) * u / (1.0 - rho_w));
            if tail <= tol * sum {
                return Ok(grid.mu_product(j) * sum);
            }
        }
    }
    Err(Error::Numerical(format!(
        "ε series did not converge within {MAX_SERIES_TERMS} terms"
    )))
}

/// `ε^j_α` through the coefficients `β^j_i`:
/// `(-1)^{j-1} (Σ_i β^j_i (1 - e^{-αμ_i}) - α)`.
pub fn epsilon_beta_form(j: usize, alpha: f64, grid: &IntensityGrid) -> Result<f64> {
    check_order(j, alpha, grid)?;
    let mut sum = -alpha;
    for i in 1..=j {
        sum += crate::bounds::beta(j, i, grid)? * -(-alpha * grid.mu(i)).exp_m1();
    }
    Ok(if (j - 1) % 2 == 0 { sum } else { -sum })
}

/// Monte-Carlo estimate of `ε^j_α` from its simplex-average representation.
pub fn epsilon_simplex_oracle(
    j: usize,
    alpha: f64,
    grid: &IntensityGrid,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_order(j, alpha, grid)?;
    let pts = PointSet::new(grid.mus()[..j].to_vec())?;
    // (j-1)-th derivative of Σ_{m≥2} (1 - (1-α)^m) x^{m-2} / m!
    let derivative = move |y: f64| {
        let mut sum = 0.0;
        let mut y_pow_over_fact = 1.0;
        for n in 0..200 {
            let nf = n as f64;
            if n > 0 {
                y_pow_over_fact *= y / nf;
            }
            let m = nf + j as f64 + 1.0;
            let term = one_minus_power(alpha, m) / (m * (m - 1.0)) * y_pow_over_fact;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() && n > 2 {
                break;
            }
        }
        sum
    };
    let est = simplex_mean_value_oracle(derivative, &pts, samples, seed)?;
    let scale = grid.mu_product(j);
    Ok(MonteCarloEstimate {
        estimate: scale * est.estimate,
        std_error: scale * est.std_error,
        samples: est.samples,
    })
}

/// Order-`j` bounds for rates generated by this channel model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormBounds {
    pub q_j_min: f64,
    pub b_j_max: f64,
}

/// Order-`j` bounds written in `α`, `ε^j_α` and `ε^j_1`; equal to the
/// general estimators applied to [`model_stats`].
pub fn closed_form_bounds(
    j: usize,
    alpha: f64,
    grid: &IntensityGrid,
    params: &ChannelParams,
) -> Result<ClosedFormBounds> {
    let eps_a = epsilon(j, alpha, grid, DEFAULT_EPSILON_TOL)?;
    let eps_1 = epsilon(j, 1.0, grid, DEFAULT_EPSILON_TOL)?;
    let (p0, pd, s) = (params.p0, params.p_dark, params.s);
    let excess = p0 - pd;
    let (q, b) = if j % 2 == 1 {
        (
            alpha + excess + eps_a - (1.0 - p0) * eps_1,
            s * alpha + 0.5 * excess + s * eps_a + 0.5 * excess * eps_1,
        )
    } else {
        (
            alpha + excess - eps_a - excess * eps_1,
            s * alpha + 0.5 * excess - s * eps_a + (1.0 - 0.5 * (p0 + pd)) * eps_1,
        )
    };
    Ok(ClosedFormBounds { q_j_min: q, b_j_max: b })
}
