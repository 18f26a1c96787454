#![allow(dead_code)]

use decoy_akg::bounds::ObservedStats;
use decoy_akg::expansion::{ConstraintMatrix, ExpansionTable, IntensityGrid};
use rand::Rng;

/// Grid with `k` intensities: first in `[lo, lo + 0.4]`, gaps in `[0.1, 0.2]`.
pub fn random_grid<R: Rng>(rng: &mut R, k: usize, lo: f64) -> IntensityGrid {
    let mut mus = Vec::with_capacity(k);
    let mut mu = rng.random_range(lo..lo + 0.4);
    for _ in 0..k {
        mus.push(mu);
        mu += rng.random_range(0.1..0.2);
    }
    IntensityGrid::new(mus).unwrap()
}

/// Basis-state yields `q^0..q^{2k+1}` and error products `b^1..b^{k+1}`
/// with `0 ≤ b^j ≤ q^j ≤ 1 - p_D`.
pub struct Truth {
    pub q: Vec<f64>,
    pub b: Vec<f64>,
    pub p_dark: f64,
}

pub fn random_truth<R: Rng>(rng: &mut R, k: usize) -> Truth {
    let p_dark = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..1e-4) };
    let cap = 1.0 - p_dark;
    let q: Vec<f64> = (0..2 * k + 2).map(|_| rng.random_range(0.0..cap)).collect();
    let b = (1..=k + 1).map(|j| q[j] * rng.random_range(0.0..1.0)).collect();
    Truth { q, b, p_dark }
}

/// Rates produced by `truth` through the constraint matrix.
pub fn stats_from_truth(grid: &IntensityGrid, truth: &Truth) -> ObservedStats {
    let k = grid.k();
    let table = ExpansionTable::new(grid).unwrap();
    let cm = ConstraintMatrix::new(grid, &table);
    let p: Vec<f64> = (0..=2 * k)
        .map(|r| truth.p_dark + (0..2 * k + 2).map(|c| cm.p()[(r, c)] * truth.q[c]).sum::<f64>())
        .map(|v: f64| v.min(1.0))
        .collect();
    let s: Vec<f64> = (1..=k)
        .map(|i| {
            let sp = 0.5 * (truth.p_dark + cm.y(i) * truth.q[0])
                + (1..=k + 1).map(|c| cm.p_prime()[(i, c)] * truth.b[c - 1]).sum::<f64>();
            (sp / p[i]).min(1.0)
        })
        .collect();
    ObservedStats::new(p, s, truth.p_dark).unwrap()
}
