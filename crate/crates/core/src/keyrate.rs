//! Asymptotic key rates, signal-intensity optimisation and distance search.

use crate::bounds::error_ratio;
use crate::channel::{counting_rate, error_rate, ChannelParams};
use crate::error::{Error, Result};

/// Reconciliation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

/// Cost of error correction per detected bit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Reconciliation {
    /// Codes at the Shannon limit: `η(s) = h̄(s)`.
    #[default]
    Shannon,
    /// `η(s) = f · h̄(s)` with efficiency factor `f ≥ 1`.
    Efficiency(f64),
}

impl Reconciliation {
    pub fn cost(&self, s: f64) -> f64 {
        let h = binary_entropy_bar_unchecked(s);
        match *self {
            Reconciliation::Shannon => h,
            Reconciliation::Efficiency(f) => f * h,
        }
    }
}

/// Binary entropy in bits, saturated at 1 above one half.
pub fn binary_entropy_bar(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("entropy argument {x} outside [0, 1]")));
    }
    Ok(binary_entropy_bar_unchecked(x))
}

fn binary_entropy_bar_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 0.5 {
        1.0
    } else {
        -x * x.log2() - (1.0 - x) * (-x).ln_1p() / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInputs {
    pub mu_signal: f64,
    /// Lower bound on the single-photon yield.
    pub q1: f64,
    /// Upper bound on the single-photon error product.
    pub b1: f64,
    /// Vacuum yield excluding dark counts.
    pub q0: f64,
    pub p_signal: f64,
    pub s_signal: f64,
    pub p_dark: f64,
}

/// Signed key rate in bits per pulse at the Shannon limit.
pub fn akg_rate(inputs: &RateInputs, direction: Direction) -> f64 {
    akg_rate_with(inputs, direction, Reconciliation::Shannon)
}

pub fn akg_rate_with(inputs: &RateInputs, direction: Direction, reconciliation: Reconciliation) -> f64 {
    let mu = inputs.mu_signal;
    let damp = (-mu).exp();
    let single = mu * damp * inputs.q1 * (1.0 - binary_entropy_bar_unchecked(error_ratio(inputs.q1, inputs.b1)));
    let vacuum = match direction {
        Direction::Forward => damp * (inputs.q0 + inputs.p_dark),
        Direction::Reverse => inputs.p_dark,
    };
    0.5 * (single + vacuum - inputs.p_signal * reconciliation.cost(inputs.s_signal))
}

/// Rate inputs with the single-photon quantities known exactly:
/// `q¹ = α + p_0 - p_D'` and `b¹ = sα + (p_0 - p_D')/2`, where `p_D'` is the
/// dark rate assumed by the estimator.
pub fn exact_rate_inputs(mu: f64, alpha: f64, params: &ChannelParams, estimator_dark: f64) -> RateInputs {
    let excess = params.p0 - estimator_dark;
    RateInputs {
        mu_signal: mu,
        q1: alpha + excess,
        b1: params.s * alpha + 0.5 * excess,
        q0: params.p0 - params.p_dark,
        p_signal: counting_rate(mu, alpha, params),
        s_signal: error_rate(mu, alpha, params),
        p_dark: params.p_dark,
    }
}

/// Key rate attainable with perfect knowledge of `α` and `s`.
pub fn universal_upper(mu: f64, alpha: f64, params: &ChannelParams, direction: Direction) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("intensity must be positive, got {mu}")));
    }
    Ok(akg_rate(&exact_rate_inputs(mu, alpha, params, params.p_dark), direction))
}

/// Search settings for the signal intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub mu_cap: f64,
    pub grid_step: f64,
    pub tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            mu_cap: 2.0,
            grid_step: 0.01,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub mu: f64,
    pub rate: f64,
}

/// Maximises `rate_fn` over `(mu_lower, cap]`: grid search, then golden
/// section around the best grid point. Negative optima are returned as is.
pub fn optimize_signal_intensity<F: FnMut(f64) -> f64>(
    mut rate_fn: F,
    mu_lower: f64,
    config: &OptimizerConfig,
) -> Result<Optimum> {
    if !(mu_lower >= 0.0 && mu_lower < config.mu_cap) {
        return Err(Error::Domain(format!(
            "lower intensity {mu_lower} must lie in [0, {})",
            config.mu_cap
        )));
    }
    if !(config.grid_step > 0.0 && config.tolerance > 0.0) {
        return Err(Error::Domain("optimizer step and tolerance must be positive".into()));
    }
    let mut best = Optimum {
        mu: f64::NAN,
        rate: f64::NEG_INFINITY,
    };
    let mut i = 1;
    loop {
        let mu = mu_lower + config.grid_step * i as f64;
        if mu > config.mu_cap + 1e-12 {
            break;
        }
        let rate = rate_fn(mu);
        if rate > best.rate {
            best = Optimum { mu, rate };
        }
        i += 1;
    }
    if best.mu.is_nan() {
        return Err(Error::Numerical("no finite rate on the intensity grid".into()));
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = (best.mu - config.grid_step).max(mu_lower);
    let mut hi = (best.mu + config.grid_step).min(config.mu_cap);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = rate_fn(x1);
    let mut f2 = rate_fn(x2);
    while hi - lo > config.tolerance {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = rate_fn(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = rate_fn(x2);
        }
    }
    for (mu, rate) in [(x1, f1), (x2, f2)] {
        if rate > best.rate {
            best = Optimum { mu, rate };
        }
    }
    Ok(best)
}

/// Search settings for the achievable distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSearch {
    pub scan_step_km: f64,
    pub tolerance_km: f64,
    pub max_km: f64,
}

impl Default for DistanceSearch {
    fn default() -> Self {
        Self {
            scan_step_km: 1.0,
            tolerance_km: 0.01,
            max_km: 1000.0,
        }
    }
}

/// Largest distance with positive optimised rate, given the signed optimised
/// rate as a function of distance. Zero when the rate is not positive at 0 km.
pub fn achievable_distance<F: FnMut(f64) -> Result<f64>>(mut rate_at: F, search: &DistanceSearch) -> Result<f64> {
    if rate_at(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = loop {
        let next = lo + search.scan_step_km;
        if next > search.max_km {
            return Err(Error::Numerical(format!(
                "rate still positive at {} km",
                search.max_km
            )));
        }
        if rate_at(next)? <= 0.0 {
            break next;
        }
        lo = next;
    };
    while hi - lo > search.tolerance_km {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeRow {
    pub alpha: f64,
    pub forward_slope: f64,
    pub reverse_slope: f64,
    pub forward_tail_decreasing: bool,
    pub reverse_tail_decreasing: bool,
}

/// Slopes of the universal upper bound at `μ = 1` and sampled monotonicity
/// on `[1, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub rows: Vec<DerivativeRow>,
}

impl DerivativeReport {
    pub fn all_non_positive(&self, tol: f64) -> bool {
        self.rows
            .iter()
            .all(|r| r.forward_slope <= tol && r.reverse_slope <= tol)
    }

    pub fn tails_decreasing(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.forward_tail_decreasing && r.reverse_tail_decreasing)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("alpha\tdI_fwd/dmu\tdI_rev/dmu\ttail_fwd\ttail_rev\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.6e}\t{:.6e}\t{:.6e}\t{}\t{}\n",
                r.alpha, r.forward_slope, r.reverse_slope, r.forward_tail_decreasing, r.reverse_tail_decreasing
            ));
        }
        out
    }
}

pub fn optimal_mu_derivative_check(params: &ChannelParams, alphas: &[f64]) -> Result<DerivativeReport> {
    const H: f64 = 1e-6;
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let rate = |mu: f64, d: Direction| universal_upper(mu, alpha, params, d);
        let slope = |d: Direction| -> Result<f64> { Ok((rate(1.0 + H, d)? - rate(1.0 - H, d)?) / (2.0 * H)) };
        let tail = |d: Direction| -> Result<bool> {
            let mut prev = rate(1.0, d)?;
            for i in 1..=100 {
                let cur = rate(1.0 + 0.01 * i as f64, d)?;
                if cur > prev {
                    return Ok(false);
                }
                prev = cur;
            }
            Ok(true)
        };
        rows.push(DerivativeRow {
            alpha,
            forward_slope: slope(Direction::Forward)?,
            reverse_slope: slope(Direction::Reverse)?,
            forward_tail_decreasing: tail(Direction::Forward)?,
            reverse_tail_decreasing: tail(Direction::Reverse)?,
        });
    }
    Ok(DerivativeReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy_bar(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy_bar(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy_bar(0.75).unwrap(), 1.0);
        assert!((binary_entropy_bar(0.5 - 1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!((binary_entropy_bar(0.11).unwrap() - 0.4999159).abs() < 1e-6);
        assert!(binary_entropy_bar(-0.1).is_err());
        assert!(binary_entropy_bar(1.1).is_err());
    }

    #[test]
    fn no_single_photon_contribution() {
        let inputs = RateInputs {
            mu_signal: 0.5,
            q1: 0.0,
            b1: 0.0,
            q0: 0.0,
            p_signal: 1e-3,
            s_signal: 0.05,
            p_dark: 0.0,
        };
        let r = akg_rate(&inputs, Direction::Forward);
        assert!((r + 0.5 * 1e-3 * binary_entropy_bar(0.05).unwrap()).abs() < 1e-18);
    }

    #[test]
    fn clean_channel_reduction() {
        let mut params = ChannelParams::paper();
        params.p0 = 0.0;
        let (mu, alpha): (f64, f64) = (0.6, 1e-3);
        let h = binary_entropy_bar(params.s).unwrap();
        let expect = 0.5 * (mu * (-mu).exp() * alpha * (1.0 - h) + (-alpha * mu).exp_m1() * h);
        let got = universal_upper(mu, alpha, &params, Direction::Forward).unwrap();
        assert!((got - expect).abs() < 1e-18);
        // small-α factorisation
        let alpha = 1e-7;
        let approx = alpha * mu * ((-mu).exp() - (1.0 + (-mu).exp()) * h) / 2.0;
        let exact = universal_upper(mu, alpha, &params, Direction::Forward).unwrap();
        assert!((exact - approx).abs() < 1e-6 * approx.abs());
    }

    #[test]
    fn reverse_minus_forward_identity() {
        let params = ChannelParams::paper().with_dark(2e-7).unwrap();
        let inputs = exact_rate_inputs(0.5, 1e-3, &params, params.p_dark);
        let diff = akg_rate(&inputs, Direction::Reverse) - akg_rate(&inputs, Direction::Forward);
        let expect = 0.5 * (params.p_dark - (-0.5f64).exp() * (inputs.q0 + params.p_dark));
        assert!((diff - expect).abs() < 1e-18);
    }

    #[test]
    fn optimizer_finds_unimodal_peak() {
        let opt = optimize_signal_intensity(|m| m * (-m).exp(), 0.0, &OptimizerConfig::default()).unwrap();
        assert!((opt.mu - 1.0).abs() < 1e-5);
        let scaled = optimize_signal_intensity(|m| 7.5 * m * (-m).exp(), 0.0, &OptimizerConfig::default()).unwrap();
        assert_eq!(opt.mu, scaled.mu);
        let edge = optimize_signal_intensity(|m| -m, 0.3, &OptimizerConfig::default()).unwrap();
        assert!(edge.mu > 0.3 && edge.mu < 0.3 + 1e-5 + 0.01);
        assert!(edge.rate < 0.0);
        assert!(optimize_signal_intensity(|m| m, 2.5, &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn distance_bisection() {
        let d = achievable_distance(|l| Ok(100.3 - l), &DistanceSearch::default()).unwrap();
        assert!((d - 100.3).abs() < 0.01);
        assert_eq!(achievable_distance(|_| Ok(-1.0), &DistanceSearch::default()).unwrap(), 0.0);
        assert!(achievable_distance(|_| Ok(1.0), &DistanceSearch::default()).is_err());
    }

    #[test]
    fn clean_channel_slope_is_non_positive() {
        let mut params = ChannelParams::paper();
        params.p0 = 0.0;
        let report = optimal_mu_derivative_check(&params, &[1e-5, 1e-3, 0.05]).unwrap();
        assert!(report.all_non_positive(1e-12));
        assert!(report.tails_decreasing());
        assert_eq!(report.to_table().lines().count(), 4);
    }
}
