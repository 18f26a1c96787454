//! Lower bounds on the single-photon yield `q¹` and upper bounds on the
//! single-photon error product `b¹ = q¹ r¹`.
//!
//! Each order `j ≤ k` yields a closed-form estimate built from the first `j`
//! intensities. The estimates are aggregated by max/min, and the result
//! coincides with the linear program over all boxed basis-state yields;
//! [`lp_oracle_q1_min`] and [`lp_oracle_b1_max`] solve that program directly.

use crate::error::{Error, Result};
use crate::expansion::{ConstraintMatrix, ExpansionTable, IntensityGrid};
use crate::lp::{LinearProgram, Sense};

/// Measurement basis of a counting-rate group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Rates `p_1..p_k`, which also carry the error rates.
    Cross,
    /// Rates `p_{k+1}..p_{2k}`.
    Plus,
}

/// Counting rates `p_0..p_{2k}`, error rates `s_1..s_k` and the dark rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedStats {
    p: Vec<f64>,
    s: Vec<f64>,
    p_dark: f64,
}

impl ObservedStats {
    /// Validated statistics: all rates in `[0, 1]` and `p_i ≥ p_D`.
    pub fn new(p: Vec<f64>, s: Vec<f64>, p_dark: f64) -> Result<Self> {
        let stats = Self::raw(p, s, p_dark)?;
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(stats.p_dark) {
            return Err(Error::InvalidStats(format!("dark rate {} outside [0, 1]", stats.p_dark)));
        }
        for (i, &v) in stats.p.iter().enumerate() {
            if !in_unit(v) {
                return Err(Error::InvalidStats(format!("p_{i} = {v} outside [0, 1]")));
            }
            if v < stats.p_dark {
                return Err(Error::InvalidStats(format!(
                    "p_{i} = {v} below the dark rate {}",
                    stats.p_dark
                )));
            }
        }
        for (i, &v) in stats.s.iter().enumerate() {
            if !in_unit(v) {
                return Err(Error::InvalidStats(format!("s_{} = {v} outside [0, 1]", i + 1)));
            }
        }
        Ok(stats)
    }

    /// Shape and finiteness checks only, for probing inconsistent data.
    pub fn raw(p: Vec<f64>, s: Vec<f64>, p_dark: f64) -> Result<Self> {
        let k = s.len();
        if k == 0 {
            return Err(Error::InvalidStats("at least one intensity is required".into()));
        }
        if p.len() != 2 * k + 1 {
            return Err(Error::InvalidStats(format!(
                "expected {} counting rates for k = {k}, got {}",
                2 * k + 1,
                p.len()
            )));
        }
        if p.iter().chain(&s).chain([&p_dark]).any(|v| !v.is_finite()) {
            return Err(Error::InvalidStats("non-finite rate".into()));
        }
        Ok(Self { p, s, p_dark })
    }

    /// Builds both bases from `p_0..p_k`, setting `p_{i+k} = p_i`.
    pub fn symmetric(p_cross: &[f64], s: Vec<f64>, p_dark: f64) -> Result<Self> {
        let mut p = p_cross.to_vec();
        p.extend_from_slice(&p_cross[1.min(p_cross.len())..]);
        Self::new(p, s, p_dark)
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    /// `p_i` for `0 ≤ i ≤ 2k`.
    pub fn p(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn rates(&self) -> &[f64] {
        &self.p
    }

    /// `s_i` for `1 ≤ i ≤ k`.
    pub fn s(&self, i: usize) -> f64 {
        self.s[i - 1]
    }

    pub fn error_rates(&self) -> &[f64] {
        &self.s
    }

    pub fn p_dark(&self) -> f64 {
        self.p_dark
    }

    /// Vacuum counting rate `p_0`.
    pub fn vacuum(&self) -> f64 {
        self.p[0]
    }
}

/// `β^j_i = (-1)^{j-1} μ_1⋯μ_j e^{μ_i} / (μ_i² Π_{t≤j, t≠i} (μ_i - μ_t))`.
pub fn beta(j: usize, i: usize, grid: &IntensityGrid) -> Result<f64> {
    if i == 0 || i > j || j > grid.k() {
        return Err(Error::Domain(format!(
            "β^{j}_{i} requires 1 ≤ i ≤ j ≤ {}",
            grid.k()
        )));
    }
    let mu_i = grid.mu(i);
    let denom: f64 = (1..=j).filter(|&t| t != i).map(|t| mu_i - grid.mu(t)).product();
    let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * grid.mu_product(j) * mu_i.exp() / (mu_i * mu_i * denom))
}

fn check_inputs(j: usize, stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<()> {
    if stats.k() != grid.k() || table.k() != grid.k() {
        return Err(Error::InvalidStats(format!(
            "statistics for k = {}, grid k = {}, table k = {}",
            stats.k(),
            grid.k(),
            table.k()
        )));
    }
    if j == 0 || j > grid.k() {
        return Err(Error::Domain(format!("order j = {j} outside 1..={}", grid.k())));
    }
    Ok(())
}

/// Lower bound on `q¹` of order `j` from the given basis.
pub fn q_min(
    j: usize,
    basis: Basis,
    stats: &ObservedStats,
    grid: &IntensityGrid,
    table: &ExpansionTable,
) -> Result<f64> {
    check_inputs(j, stats, grid, table)?;
    let k = grid.k();
    let pd = stats.p_dark();
    let excess0 = stats.vacuum() - pd;
    let mut sum = 0.0;
    for i in 1..=j {
        let pi = match basis {
            Basis::Cross => stats.p(i),
            Basis::Plus => stats.p(i + k),
        };
        sum += beta(j, i, grid)? * (pi - pd - (-grid.mu(i)).exp() * excess0);
    }
    if j % 2 == 1 {
        sum -= (1.0 - pd) * grid.mu_product(j) * table.omega(j + 1);
    }
    Ok(sum)
}

/// `q_{j,min}` from the rates `p_1..p_j`.
pub fn q_j_min(j: usize, stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<f64> {
    q_min(j, Basis::Cross, stats, grid, table)
}

/// `q_{k+j,min}` from the rates `p_{k+1}..p_{k+j}`.
pub fn q_kj_min(j: usize, stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<f64> {
    q_min(j, Basis::Plus, stats, grid, table)
}

/// Upper bound on `b¹ = q¹ r¹` of order `j`.
pub fn b_j_max(j: usize, stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<f64> {
    check_inputs(j, stats, grid, table)?;
    let pd = stats.p_dark();
    let excess0 = stats.vacuum() - pd;
    let mut sum = 0.0;
    for i in 1..=j {
        let background = 0.5 * (pd + (-grid.mu(i)).exp() * excess0);
        sum += beta(j, i, grid)? * (stats.s(i) * stats.p(i) - background);
    }
    if j % 2 == 0 {
        sum += (1.0 - pd) * grid.mu_product(j) * table.omega(j + 1);
    }
    Ok(sum)
}

/// Bounds from earlier two- and three-intensity analyses, for comparison.
/// They ignore dark counts beyond `p_0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LegacyBounds {
    pub wang_q2_min: Option<f64>,
    pub wang_b1_max: Option<f64>,
    pub ma_q13_lower: Option<f64>,
    pub ma_b12_upper: Option<f64>,
}

/// Two-intensity lower bound on `q¹` using `μ_1 < μ_2`.
pub fn wang_q2_min(stats: &ObservedStats, grid: &IntensityGrid) -> Option<f64> {
    if grid.k() < 2 {
        return None;
    }
    let (m1, m2) = (grid.mu(1), grid.mu(2));
    let (p0, p1, p2) = (stats.p(0), stats.p(1), stats.p(2));
    Some(
        m2 * m1.exp() / (m1 * (m2 - m1)) * (p1 - (-m1).exp() * p0)
            - m1 * m2.exp() / (m2 * (m2 - m1)) * (p2 - (-m2).exp() * p0),
    )
}

/// Single-intensity upper bound on `b¹`.
pub fn wang_b1_max(stats: &ObservedStats, grid: &IntensityGrid) -> f64 {
    let m1 = grid.mu(1);
    (stats.s(1) * stats.p(1) * m1.exp() - 0.5 * stats.p(0)) / m1
}

/// Three-intensity lower bound on `q¹`; requires `μ_1 + μ_2 < μ_3` and
/// `μ_1 + μ_2 < 1`.
pub fn ma_q13_lower(stats: &ObservedStats, grid: &IntensityGrid) -> Option<f64> {
    if grid.k() < 3 {
        return None;
    }
    let (m1, m2, m3) = (grid.mu(1), grid.mu(2), grid.mu(3));
    if !(m1 + m2 < m3 && m1 + m2 < 1.0) {
        return None;
    }
    let (p0, p1, p2, p3) = (stats.p(0), stats.p(1), stats.p(2), stats.p(3));
    let num = p2 * m2.exp() - p1 * m1.exp() - (m2 * m2 - m1 * m1) / (m3 * m3) * (p3 * m3.exp() - p0);
    let den = m2 * m3 - m3 * m1 - m2 * m2 + m1 * m1;
    Some(m3 * num / den)
}

/// Two-intensity upper bound on `b¹`.
pub fn ma_b12_upper(stats: &ObservedStats, grid: &IntensityGrid) -> Option<f64> {
    if grid.k() < 2 {
        return None;
    }
    let (m1, m2) = (grid.mu(1), grid.mu(2));
    Some((stats.s(2) * stats.p(2) * m2.exp() - stats.s(1) * stats.p(1) * m1.exp()) / (m2 - m1))
}

pub fn legacy_bounds(stats: &ObservedStats, grid: &IntensityGrid) -> LegacyBounds {
    let two = grid.k() >= 2;
    LegacyBounds {
        wang_q2_min: wang_q2_min(stats, grid),
        wang_b1_max: two.then(|| wang_b1_max(stats, grid)),
        ma_q13_lower: ma_q13_lower(stats, grid),
        ma_b12_upper: ma_b12_upper(stats, grid),
    }
}

/// Which per-order estimate attained an aggregated bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundSource {
    pub j: usize,
    pub basis: Basis,
}

impl BoundSource {
    /// Index in `1..=2k`: `j` for the cross basis, `k + j` for the plus basis.
    pub fn index(&self, k: usize) -> usize {
        match self.basis {
            Basis::Cross => self.j,
            Basis::Plus => k + self.j,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// `q_{j,min}`, `j = 1..k`.
    pub q_j_min: Vec<f64>,
    /// `q_{k+j,min}`, `j = 1..k`.
    pub q_kj_min: Vec<f64>,
    /// `b_{j,max}`, `j = 1..k`.
    pub b_j_max: Vec<f64>,
    /// Aggregated lower bound clamped to `[0, 1 - p_D]`.
    pub q1_min: f64,
    /// Aggregated upper bound clamped to `[0, 1 - p_D]`.
    pub b1_max: f64,
    pub q1_min_raw: f64,
    pub b1_max_raw: f64,
    pub q1_source: BoundSource,
    pub b1_source: BoundSource,
    pub legacy: LegacyBounds,
}

/// Best bounds over all orders and both bases.
pub fn aggregate(stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<BoundResult> {
    let k = grid.k();
    let mut q_cross = Vec::with_capacity(k);
    let mut q_plus = Vec::with_capacity(k);
    let mut b = Vec::with_capacity(k);
    for j in 1..=k {
        q_cross.push(q_j_min(j, stats, grid, table)?);
        q_plus.push(q_kj_min(j, stats, grid, table)?);
        b.push(b_j_max(j, stats, grid, table)?);
    }

    let mut q1_raw = f64::NEG_INFINITY;
    let mut q1_source = BoundSource { j: 1, basis: Basis::Cross };
    for (basis, values) in [(Basis::Cross, &q_cross), (Basis::Plus, &q_plus)] {
        for (idx, &v) in values.iter().enumerate() {
            if v > q1_raw {
                q1_raw = v;
                q1_source = BoundSource { j: idx + 1, basis };
            }
        }
    }
    let mut b1_raw = f64::INFINITY;
    let mut b1_source = BoundSource { j: 1, basis: Basis::Cross };
    for (idx, &v) in b.iter().enumerate() {
        if v < b1_raw {
            b1_raw = v;
            b1_source = BoundSource { j: idx + 1, basis: Basis::Cross };
        }
    }

    let cap = 1.0 - stats.p_dark();
    Ok(BoundResult {
        q_j_min: q_cross,
        q_kj_min: q_plus,
        b_j_max: b,
        q1_min: q1_raw.clamp(0.0, cap),
        b1_max: b1_raw.clamp(0.0, cap),
        q1_min_raw: q1_raw,
        b1_max_raw: b1_raw,
        q1_source,
        b1_source,
        legacy: legacy_bounds(stats, grid),
    })
}

/// Ratio estimate `b¹/q¹` fed into the entropy; 1 when `q¹ ≤ 0`.
pub fn error_ratio(q1: f64, b1: f64) -> f64 {
    if q1 <= 0.0 {
        1.0
    } else {
        (b1 / q1).clamp(0.0, 1.0)
    }
}

fn yield_program(
    stats: &ObservedStats,
    grid: &IntensityGrid,
    table: &ExpansionTable,
    boxed: impl Fn(usize) -> bool,
) -> Result<LinearProgram> {
    let k = grid.k();
    let cm = ConstraintMatrix::new(grid, table);
    let p = cm.p();
    let pd = stats.p_dark();
    let n = 2 * k + 2;
    let a: Vec<Vec<f64>> = (0..=2 * k).map(|r| (0..n).map(|c| p[(r, c)]).collect()).collect();
    let rhs: Vec<f64> = stats.rates().iter().map(|&v| v - pd).collect();
    let mut c = vec![0.0; n];
    c[1] = 1.0;
    let lower = (0..n).map(|j| if boxed(j) { 0.0 } else { f64::NEG_INFINITY }).collect();
    let upper = (0..n).map(|j| if boxed(j) { 1.0 - pd } else { f64::INFINITY }).collect();
    LinearProgram::new(c, a, rhs, lower, upper)
}

fn error_program(
    stats: &ObservedStats,
    grid: &IntensityGrid,
    table: &ExpansionTable,
    boxed: impl Fn(usize) -> bool,
) -> Result<LinearProgram> {
    // unknowns b^1..b^{k+1}; vacuum and dark clicks are half erroneous
    let k = grid.k();
    let cm = ConstraintMatrix::new(grid, table);
    let pp = cm.p_prime();
    let pd = stats.p_dark();
    let excess0 = stats.vacuum() - pd;
    let a: Vec<Vec<f64>> = (1..=k).map(|i| (1..=k + 1).map(|c| pp[(i, c)]).collect()).collect();
    let rhs: Vec<f64> = (1..=k)
        .map(|i| stats.s(i) * stats.p(i) - 0.5 * (pd + cm.y(i) * excess0))
        .collect();
    let mut c = vec![0.0; k + 1];
    c[0] = 1.0;
    let lower = (0..=k).map(|j| if boxed(j) { 0.0 } else { f64::NEG_INFINITY }).collect();
    let upper = (0..=k).map(|j| if boxed(j) { 1.0 - pd } else { f64::INFINITY }).collect();
    LinearProgram::new(c, a, rhs, lower, upper)
}

/// Minimum of `q¹` over all yields `0 ≤ q^j ≤ 1 - p_D` consistent with the
/// counting rates, by simplex.
pub fn lp_oracle_q1_min(stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<f64> {
    check_inputs(1, stats, grid, table)?;
    Ok(yield_program(stats, grid, table, |_| true)?.optimize(Sense::Minimize)?.objective)
}

/// Maximum of `b¹` over all boxed error products consistent with the error
/// rates, by simplex.
pub fn lp_oracle_b1_max(stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<f64> {
    check_inputs(1, stats, grid, table)?;
    Ok(error_program(stats, grid, table, |_| true)?.optimize(Sense::Maximize)?.objective)
}

/// Same programs as the simplex oracles, solved by vertex enumeration.
pub fn lp_oracle_by_vertices(
    stats: &ObservedStats,
    grid: &IntensityGrid,
    table: &ExpansionTable,
) -> Result<(f64, f64)> {
    check_inputs(1, stats, grid, table)?;
    let q = yield_program(stats, grid, table, |_| true)?.optimize_by_vertices(Sense::Minimize)?;
    let b = error_program(stats, grid, table, |_| true)?.optimize_by_vertices(Sense::Maximize)?;
    Ok((q.objective, b.objective))
}

/// Program of order `j`: only the vacuum yield and `q^{1+j}` (or
/// `q^{k+1+j}`) are boxed, every other yield is free.
pub fn lp_oracle_q_min(
    j: usize,
    basis: Basis,
    stats: &ObservedStats,
    grid: &IntensityGrid,
    table: &ExpansionTable,
) -> Result<f64> {
    check_inputs(j, stats, grid, table)?;
    let k = grid.k();
    let target = match basis {
        Basis::Cross => 1 + j,
        Basis::Plus => k + 1 + j,
    };
    Ok(yield_program(stats, grid, table, |c| c == 0 || c == target)?
        .optimize(Sense::Minimize)?
        .objective)
}

/// Program of order `j` for the error product: only `b^{1+j}` is boxed.
pub fn lp_oracle_b_max(j: usize, stats: &ObservedStats, grid: &IntensityGrid, table: &ExpansionTable) -> Result<f64> {
    check_inputs(j, stats, grid, table)?;
    Ok(error_program(stats, grid, table, |c| c == j)?
        .optimize(Sense::Maximize)?
        .objective)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(mus: &[f64]) -> IntensityGrid {
        IntensityGrid::new(mus.to_vec()).unwrap()
    }

    // rates generated from yields through the constraint matrix
    fn forward(grid: &IntensityGrid, q: &[f64], b: &[f64], pd: f64) -> ObservedStats {
        let k = grid.k();
        let table = ExpansionTable::new(grid).unwrap();
        let cm = ConstraintMatrix::new(grid, &table);
        let p: Vec<f64> = (0..=2 * k)
            .map(|r| pd + (0..2 * k + 2).map(|c| cm.p()[(r, c)] * q[c]).sum::<f64>())
            .collect();
        let s: Vec<f64> = (1..=k)
            .map(|i| {
                let sp = 0.5 * (pd + cm.y(i) * q[0])
                    + (1..=k + 1).map(|c| cm.p_prime()[(i, c)] * b[c - 1]).sum::<f64>();
                sp / p[i]
            })
            .collect();
        ObservedStats::new(p, s, pd).unwrap()
    }

    #[test]
    fn beta_examples() {
        let g = grid(&[0.1, 0.2]);
        assert!((beta(1, 1, &g).unwrap() - 10.0 * 0.1f64.exp()).abs() < 1e-12);
        let b21 = -0.2 * 0.1f64.exp() / (0.1 * (0.1 - 0.2));
        let b22 = -0.1 * 0.2f64.exp() / (0.2 * (0.2 - 0.1));
        assert!((beta(2, 1, &g).unwrap() - b21).abs() < 1e-12);
        assert!((beta(2, 2, &g).unwrap() - b22).abs() < 1e-12);
        assert!(beta(2, 3, &g).is_err());
        assert!(beta(3, 1, &g).is_err());
    }

    #[test]
    fn stats_validation() {
        assert!(ObservedStats::new(vec![1e-6, 0.1, 0.1], vec![0.03], 0.0).is_ok());
        assert!(ObservedStats::new(vec![1e-6, 0.1], vec![0.03], 0.0).is_err());
        assert!(ObservedStats::new(vec![1e-6, 0.1, 1.1], vec![0.03], 0.0).is_err());
        assert!(ObservedStats::new(vec![1e-7, 0.1, 0.1], vec![0.03], 1e-6).is_err());
        assert!(ObservedStats::raw(vec![1e-7, 0.1, 0.1], vec![0.03], 1e-6).is_ok());
        let s = ObservedStats::symmetric(&[1e-6, 0.1, 0.2], vec![0.03, 0.03], 0.0).unwrap();
        assert_eq!(s.rates(), &[1e-6, 0.1, 0.2, 0.1, 0.2]);
    }

    #[test]
    fn order_two_matches_two_intensity_bound() {
        let g = grid(&[0.1, 0.45]);
        let t = ExpansionTable::new(&g).unwrap();
        let stats = ObservedStats::symmetric(&[4e-7, 6.4e-5, 2.9e-4], vec![0.04, 0.032], 0.0).unwrap();
        let q2 = q_j_min(2, &stats, &g, &t).unwrap();
        assert!((q2 - wang_q2_min(&stats, &g).unwrap()).abs() < 1e-15);
        let b1 = b_j_max(1, &stats, &g, &t).unwrap();
        assert!((b1 - wang_b1_max(&stats, &g)).abs() < 1e-15);
    }

    #[test]
    fn order_one_recovers_saturated_truth() {
        let g = grid(&[0.3]);
        let pd = 1e-6;
        let q = [2e-6, 0.013, 1.0 - pd, 1.0 - pd];
        let stats = forward(&g, &q, &[0.001, 0.0], pd);
        let t = ExpansionTable::new(&g).unwrap();
        assert!((q_j_min(1, &stats, &g, &t).unwrap() - q[1]).abs() < 1e-12);
        assert!((lp_oracle_q1_min(&stats, &g, &t).unwrap() - q[1]).abs() < 1e-12);
    }

    #[test]
    fn dark_floor_clamps_to_zero() {
        let g = grid(&[0.1, 0.3]);
        let t = ExpansionTable::new(&g).unwrap();
        let pd = 1e-6;
        let stats = ObservedStats::symmetric(&[pd, pd, pd], vec![0.5, 0.5], pd).unwrap();
        let r = aggregate(&stats, &g, &t).unwrap();
        assert!(r.q1_min_raw <= 0.0);
        assert_eq!(r.q1_min, 0.0);
    }

    #[test]
    fn oracle_reports_infeasibility() {
        let g = grid(&[0.1, 0.3]);
        let t = ExpansionTable::new(&g).unwrap();
        let stats = ObservedStats::raw(vec![1e-3, 1e-4, 1e-4, 1e-4, 1e-4], vec![0.1, 0.1], 2e-3).unwrap();
        assert!(matches!(lp_oracle_q1_min(&stats, &g, &t), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn per_order_programs_match_closed_forms() {
        let g = grid(&[0.1, 0.25, 0.5]);
        let t = ExpansionTable::new(&g).unwrap();
        let pd = 3e-7;
        let q = [1e-6, 0.02, 0.3, 0.5, 0.7, 0.35, 0.55, 0.65];
        let b = [0.001, 0.01, 0.02, 0.05];
        let stats = forward(&g, &q, &b, pd);
        for j in 1..=3 {
            for basis in [Basis::Cross, Basis::Plus] {
                let closed = q_min(j, basis, &stats, &g, &t).unwrap();
                let lp = lp_oracle_q_min(j, basis, &stats, &g, &t).unwrap();
                assert!((closed - lp).abs() < 1e-9, "q j={j} {basis:?}: {closed} vs {lp}");
            }
            let closed = b_j_max(j, &stats, &g, &t).unwrap();
            let lp = lp_oracle_b_max(j, &stats, &g, &t).unwrap();
            assert!((closed - lp).abs() < 1e-9, "b j={j}: {closed} vs {lp}");
        }
    }

    #[test]
    fn simplex_and_vertex_oracles_agree() {
        let g = grid(&[0.1, 0.4]);
        let t = ExpansionTable::new(&g).unwrap();
        let stats = forward(&g, &[2e-6, 0.05, 0.4, 0.6, 0.3, 0.2], &[0.002, 0.03, 0.1], 1e-6);
        let (qv, bv) = lp_oracle_by_vertices(&stats, &g, &t).unwrap();
        assert!((qv - lp_oracle_q1_min(&stats, &g, &t).unwrap()).abs() < 1e-10);
        assert!((bv - lp_oracle_b1_max(&stats, &g, &t).unwrap()).abs() < 1e-10);
        let agg = aggregate(&stats, &g, &t).unwrap();
        assert!((agg.q1_min_raw - qv).abs() < 1e-10);
        assert!((agg.b1_max_raw - bv).abs() < 1e-10);
    }
}
