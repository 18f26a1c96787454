//! Named decoy configurations evaluated over fiber length.
//!
//! Every preset fixes decoy intensities `0.1, 0.2, ...` spaced by the minimum
//! width and optimises the signal intensity above the last decoy. The
//! single-photon bounds used by each preset are:
//!
//! | preset      | decoys         | `q¹` bound            | `b¹` bound      |
//! |-------------|----------------|-----------------------|-----------------|
//! | `k2`        | 0.1            | order 2               | order 1         |
//! | `k3-ma`     | 0.1, 0.2       | three-intensity (Ma)  | order 1         |
//! | `k3-wang`   | 0.1, 0.2       | order 2               | order 1         |
//! | `k3-ours`   | 0.1, 0.2       | best over all orders  | best over all   |
//! | `k4`        | 0.1, 0.2, 0.3  | best over all orders  | best over all   |
//! | `universal` | none           | exact                 | exact           |
//! | `custom`    | user supplied  | best over all orders  | best over all   |

use std::cell::Cell;
use std::fmt;

use crate::bounds::{aggregate, b_j_max, ma_q13_lower, q_j_min, ObservedStats};
use crate::channel::{alpha_of_distance, counting_rate, error_rate, model_stats, ChannelParams};
use crate::error::{Error, Result};
use crate::expansion::{ExpansionTable, IntensityGrid, DEFAULT_MIN_SPACING};
use crate::keyrate::{
    achievable_distance, akg_rate, exact_rate_inputs, optimize_signal_intensity, Direction, DistanceSearch,
    OptimizerConfig, RateInputs,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    K2,
    K3Ma,
    K3Wang,
    K3Ours,
    K4,
    Universal,
    Custom,
}

impl ScenarioKind {
    /// Presets compared in the standard figures, in legend order.
    pub const PRESETS: [ScenarioKind; 6] = [
        ScenarioKind::K2,
        ScenarioKind::K3Ma,
        ScenarioKind::K3Wang,
        ScenarioKind::K3Ours,
        ScenarioKind::K4,
        ScenarioKind::Universal,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ScenarioKind::K2 => "k2",
            ScenarioKind::K3Ma => "k3-ma",
            ScenarioKind::K3Wang => "k3-wang",
            ScenarioKind::K3Ours => "k3-ours",
            ScenarioKind::K4 => "k4",
            ScenarioKind::Universal => "universal",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        [Self::PRESETS.as_slice(), &[ScenarioKind::Custom]]
            .concat()
            .into_iter()
            .find(|k| k.label() == label)
    }

    fn default_decoys(&self) -> Option<Vec<f64>> {
        match self {
            ScenarioKind::K2 => Some(vec![0.1]),
            ScenarioKind::K3Ma | ScenarioKind::K3Wang | ScenarioKind::K3Ours => Some(vec![0.1, 0.2]),
            ScenarioKind::K4 => Some(vec![0.1, 0.2, 0.3]),
            ScenarioKind::Universal => Some(vec![]),
            ScenarioKind::Custom => None,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Dark-count rate of the detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DarkMode {
    Zero,
    EqualsP0,
    Explicit(f64),
}

impl DarkMode {
    pub fn resolve(&self, p0: f64) -> f64 {
        match *self {
            DarkMode::Zero => 0.0,
            DarkMode::EqualsP0 => p0,
            DarkMode::Explicit(pd) => pd,
        }
    }
}

/// Dark-count rate assumed by the single-photon estimators.
///
/// With `Inclusive`, dark clicks are treated as part of the photon yields
/// when bounding `q¹` and `b¹` (estimator dark rate 0); the actual dark rate
/// enters only the vacuum/dark term of the key rate. With `Subtracted`, the
/// estimators remove the actual dark rate from every counting rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundDarkModel {
    #[default]
    Inclusive,
    Subtracted,
}

/// Which estimate produced a reported bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceTag {
    /// Index `1..=2k` of the per-order estimate.
    Order(usize),
    /// Three-intensity bound of Ma et al.
    Ma,
    /// Exact channel value.
    Exact,
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceTag::Order(j) => write!(f, "{j}"),
            SourceTag::Ma => f.write_str("ma"),
            SourceTag::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub decoy_mus: Vec<f64>,
    /// The signal intensity is searched strictly above this value.
    pub signal_bound: f64,
    pub direction: Direction,
    /// Channel parameters; the dark rate is taken from `dark_mode`.
    pub channel: ChannelParams,
    pub dark_mode: DarkMode,
    pub bound_dark: BoundDarkModel,
    pub min_spacing: f64,
    pub optimizer: OptimizerConfig,
    pub distance_search: DistanceSearch,
}

impl ScenarioSpec {
    /// A preset on the default channel.
    pub fn preset(kind: ScenarioKind, direction: Direction, dark_mode: DarkMode) -> Result<Self> {
        let decoys = kind.default_decoys().ok_or_else(|| {
            Error::Config("the custom scenario needs explicit decoy intensities".into())
        })?;
        let spec = Self::build(kind, decoys, direction, ChannelParams::paper(), dark_mode);
        spec.validate()?;
        Ok(spec)
    }

    /// Arbitrary decoys; the signal is searched above the last decoy plus
    /// the minimum width.
    pub fn custom(
        decoy_mus: Vec<f64>,
        direction: Direction,
        channel: ChannelParams,
        dark_mode: DarkMode,
    ) -> Result<Self> {
        let spec = Self::build(ScenarioKind::Custom, decoy_mus, direction, channel, dark_mode);
        spec.validate()?;
        Ok(spec)
    }

    fn build(
        kind: ScenarioKind,
        decoy_mus: Vec<f64>,
        direction: Direction,
        channel: ChannelParams,
        dark_mode: DarkMode,
    ) -> Self {
        let signal_bound = decoy_mus.last().map_or(0.0, |m| m + DEFAULT_MIN_SPACING);
        Self {
            kind,
            decoy_mus,
            signal_bound,
            direction,
            channel,
            dark_mode,
            bound_dark: BoundDarkModel::default(),
            min_spacing: DEFAULT_MIN_SPACING,
            optimizer: OptimizerConfig::default(),
            distance_search: DistanceSearch::default(),
        }
    }

    /// Replaces the channel and re-validates.
    pub fn with_channel(mut self, channel: ChannelParams) -> Result<Self> {
        self.channel = channel;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bound_dark(mut self, model: BoundDarkModel) -> Self {
        self.bound_dark = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        match self.kind {
            ScenarioKind::Universal => {
                if !self.decoy_mus.is_empty() {
                    return cfg("the universal scenario takes no decoys".into());
                }
            }
            kind => {
                if self.decoy_mus.is_empty() {
                    return cfg(format!(
                        "scenario {kind} needs at least one decoy intensity besides the vacuum"
                    ));
                }
                let needed = match kind {
                    ScenarioKind::K3Ma | ScenarioKind::K3Wang => 2,
                    _ => 1,
                };
                if self.decoy_mus.len() < needed {
                    return cfg(format!("scenario {kind} needs {needed} decoy intensities"));
                }
                IntensityGrid::with_min_spacing(self.decoy_mus.clone(), self.min_spacing)
                    .map_err(|e| Error::Config(format!("decoy intensities rejected: {e}")))?;
                let last = *self.decoy_mus.last().unwrap_or(&0.0);
                if self.signal_bound < last + self.min_spacing - 1e-12 {
                    return cfg(format!(
                        "signal bound {} is closer than {} to the last decoy {last}",
                        self.signal_bound, self.min_spacing
                    ));
                }
            }
        }
        if !(self.signal_bound >= 0.0 && self.signal_bound < self.optimizer.mu_cap) {
            return cfg(format!(
                "signal bound {} leaves no room below the intensity cap {}",
                self.signal_bound, self.optimizer.mu_cap
            ));
        }
        self.effective_channel()
            .map_err(|e| Error::Config(format!("channel rejected: {e}")))?;
        Ok(())
    }

    /// Channel with the dark rate selected by `dark_mode`.
    pub fn effective_channel(&self) -> Result<ChannelParams> {
        self.channel.with_dark(self.dark_mode.resolve(self.channel.p0))
    }

    /// Dark rate assumed by the single-photon estimators.
    pub fn estimator_dark(&self) -> f64 {
        match self.bound_dark {
            BoundDarkModel::Inclusive => 0.0,
            BoundDarkModel::Subtracted => self.dark_mode.resolve(self.channel.p0),
        }
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    fn grid_with_signal(&self, mu: f64) -> Result<IntensityGrid> {
        let mut mus = self.decoy_mus.clone();
        mus.push(mu);
        // the signal may sit anywhere above the bound
        let grid = IntensityGrid::with_min_spacing(mus, 1e-9)?;
        if mu <= self.signal_bound {
            return Err(Error::Domain(format!(
                "signal intensity {mu} not above the bound {}",
                self.signal_bound
            )));
        }
        Ok(grid)
    }

    /// Rate and bounds at signal intensity `mu` and transmittance `alpha`.
    pub fn evaluate(&self, mu: f64, alpha: f64) -> Result<Evaluation> {
        let channel = self.effective_channel()?;
        let est_dark = self.estimator_dark();
        let cap = 1.0 - est_dark;
        let (q1, b1, q_src, b_src) = if self.kind == ScenarioKind::Universal {
            if !(mu > 0.0) {
                return Err(Error::Domain(format!("intensity must be positive, got {mu}")));
            }
            let exact = exact_rate_inputs(mu, alpha, &channel, est_dark);
            (exact.q1, exact.b1, SourceTag::Exact, SourceTag::Exact)
        } else {
            let grid = self.grid_with_signal(mu)?;
            let table = ExpansionTable::new(&grid)?;
            let stats = model_stats(&grid, alpha, &channel.with_dark(est_dark)?)?;
            self.bounds(&grid, &table, &stats, cap)?
        };
        let inputs = RateInputs {
            mu_signal: mu,
            q1,
            b1,
            q0: channel.p0 - channel.p_dark,
            p_signal: counting_rate(mu, alpha, &channel),
            s_signal: error_rate(mu, alpha, &channel),
            p_dark: channel.p_dark,
        };
        Ok(Evaluation {
            mu,
            rate_signed: akg_rate(&inputs, self.direction),
            q1_min: q1,
            b1_max: b1,
            q1_source: q_src,
            b1_source: b_src,
        })
    }

    fn bounds(
        &self,
        grid: &IntensityGrid,
        table: &ExpansionTable,
        stats: &ObservedStats,
        cap: f64,
    ) -> Result<(f64, f64, SourceTag, SourceTag)> {
        let clamp = |v: f64| v.clamp(0.0, cap);
        match self.kind {
            ScenarioKind::K2 | ScenarioKind::K3Wang => Ok((
                clamp(q_j_min(2, stats, grid, table)?),
                clamp(b_j_max(1, stats, grid, table)?),
                SourceTag::Order(2),
                SourceTag::Order(1),
            )),
            ScenarioKind::K3Ma => {
                let q = ma_q13_lower(stats, grid).ok_or_else(|| {
                    Error::Domain("three-intensity bound needs μ_1 + μ_2 < μ_3 and μ_1 + μ_2 < 1".into())
                })?;
                Ok((
                    clamp(q),
                    clamp(b_j_max(1, stats, grid, table)?),
                    SourceTag::Ma,
                    SourceTag::Order(1),
                ))
            }
            _ => {
                let r = aggregate(stats, grid, table)?;
                let k = grid.k();
                Ok((
                    r.q1_min,
                    r.b1_max,
                    SourceTag::Order(r.q1_source.index(k)),
                    SourceTag::Order(r.b1_source.index(k)),
                ))
            }
        }
    }

    /// Best signal intensity at transmittance `alpha`.
    pub fn optimize_at(&self, alpha: f64) -> Result<Evaluation> {
        let failure: Cell<Option<Error>> = Cell::new(None);
        let rate = |mu: f64| match self.evaluate(mu, alpha) {
            Ok(e) => e.rate_signed,
            Err(err) => {
                let prev = failure.take();
                failure.set(Some(prev.unwrap_or(err)));
                f64::NEG_INFINITY
            }
        };
        let opt = optimize_signal_intensity(rate, self.signal_bound, &self.optimizer);
        if let Some(err) = failure.take() {
            return Err(err);
        }
        self.evaluate(opt?.mu, alpha)
    }

    /// Best signal intensity at fiber length `l_km`.
    pub fn optimize_at_distance(&self, l_km: f64) -> Result<Evaluation> {
        self.optimize_at(alpha_of_distance(l_km, &self.channel)?)
    }

    /// Largest fiber length with positive optimised rate (0 if none).
    pub fn achievable_distance(&self) -> Result<f64> {
        achievable_distance(
            |l| Ok(self.optimize_at_distance(l)?.rate_signed),
            &self.distance_search,
        )
    }
}

/// Rate and bounds at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub mu: f64,
    pub rate_signed: f64,
    pub q1_min: f64,
    pub b1_max: f64,
    pub q1_source: SourceTag,
    pub b1_source: SourceTag,
}

impl Evaluation {
    pub fn rate(&self) -> f64 {
        self.rate_signed.max(0.0)
    }
}

/// Inclusive range `min, min + step, ...` not exceeding `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRange {
    pub min_km: f64,
    pub max_km: f64,
    pub step_km: f64,
}

impl DistanceRange {
    pub fn new(min_km: f64, max_km: f64, step_km: f64) -> Result<Self> {
        if !(step_km > 0.0 && step_km.is_finite()) {
            return Err(Error::Config(format!("distance step must be positive, got {step_km}")));
        }
        if !(min_km >= 0.0 && max_km.is_finite()) {
            return Err(Error::Config(format!("distances must be non-negative, got {min_km}")));
        }
        if max_km < min_km {
            return Err(Error::Config(format!(
                "empty distance range: max {max_km} below min {min_km}"
            )));
        }
        Ok(Self { min_km, max_km, step_km })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = ((self.max_km - self.min_km) / self.step_km + 1e-9).floor() as usize;
        (0..=n).map(|i| self.min_km + self.step_km * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub l_km: f64,
    pub optimal_mu: f64,
    pub rate: f64,
    pub rate_signed: f64,
    pub q1_min: f64,
    pub b1_max: f64,
    pub q1_source: SourceTag,
    pub b1_source: SourceTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: ScenarioSpec,
    pub rows: Vec<SweepRow>,
    pub achievable_distance_km: f64,
}

impl SweepResult {
    pub fn label(&self) -> &'static str {
        self.spec.label()
    }
}

/// Optimised rate at every distance of `range`, plus the achievable distance.
pub fn run_scenario(spec: &ScenarioSpec, range: &DistanceRange) -> Result<SweepResult> {
    spec.validate()?;
    let rows = range
        .points()
        .into_iter()
        .map(|l| {
            let e = spec.optimize_at_distance(l)?;
            Ok(SweepRow {
                l_km: l,
                optimal_mu: e.mu,
                rate: e.rate(),
                rate_signed: e.rate_signed,
                q1_min: e.q1_min,
                b1_max: e.b1_max,
                q1_source: e.q1_source,
                b1_source: e.b1_source,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        achievable_distance_km: spec.achievable_distance()?,
    })
}
