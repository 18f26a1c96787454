//! Convex expansion of phase-randomized coherent states.
//!
//! A Poisson mixture with mean `μ_i` splits into vacuum, single-photon and
//! the positive basis states `ρ_2, ..., ρ_{k+1}`, where `ρ_m` has weights
//! `γ_{m,n} / (Ω_m n!)` on photon numbers `n ≥ m`. This module computes
//! `γ`, `Ω`, and the structural matrices that tie counting rates to the
//! per-basis-state yields.
//!
//! Indices follow the mathematical convention: intensities are `μ_1..μ_k`,
//! basis states are `2..=k+1`.

use nalgebra::DMatrix;

use crate::divided_diff::{complete_homogeneous, HomogeneousSeries};
use crate::error::{Error, Result};

/// Minimum width between neighbouring intensities.
pub const DEFAULT_MIN_SPACING: f64 = 0.1;
/// Default photon-number cutoff for tabulated coefficients.
pub const DEFAULT_FOCK_CUTOFF: usize = 64;
/// Default relative tolerance for the `Ω` series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-15;

// absorbs representation error such as 0.3 - 0.2 < 0.1
const SPACING_SLACK: f64 = 1e-12;
const MAX_SERIES_TERMS: usize = 10_000;

/// Strictly increasing positive intensities `μ_1 < ... < μ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityGrid {
    mus: Vec<f64>,
    signal_index: usize,
}

impl IntensityGrid {
    pub fn new(mus: Vec<f64>) -> Result<Self> {
        Self::with_min_spacing(mus, DEFAULT_MIN_SPACING)
    }

    pub fn with_min_spacing(mus: Vec<f64>, min_spacing: f64) -> Result<Self> {
        if !(min_spacing.is_finite() && min_spacing > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "minimum spacing must be positive, got {min_spacing}"
            )));
        }
        if mus.is_empty() {
            return Err(Error::InvalidGrid("at least one intensity is required".into()));
        }
        if let Some(bad) = mus.iter().find(|m| !m.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite intensity {bad}")));
        }
        if mus[0] <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "intensities must be positive, got μ_1 = {}",
                mus[0]
            )));
        }
        for (i, w) in mus.windows(2).enumerate() {
            if w[1] - w[0] < min_spacing - SPACING_SLACK {
                return Err(Error::InvalidGrid(format!(
                    "μ_{} = {} and μ_{} = {} are closer than the minimum width {}",
                    i + 1,
                    w[0],
                    i + 2,
                    w[1],
                    min_spacing
                )));
            }
        }
        let signal_index = mus.len();
        Ok(Self { mus, signal_index })
    }

    /// Selects the signal intensity by its 1-based index.
    pub fn with_signal_index(mut self, index: usize) -> Result<Self> {
        if index == 0 || index > self.k() {
            return Err(Error::InvalidGrid(format!(
                "signal index {index} outside 1..={}",
                self.k()
            )));
        }
        self.signal_index = index;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.mus.len()
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    /// `μ_i` for 1-based `i`.
    pub fn mu(&self, i: usize) -> f64 {
        self.mus[i - 1]
    }

    pub fn signal_index(&self) -> usize {
        self.signal_index
    }

    pub fn signal(&self) -> f64 {
        self.mu(self.signal_index)
    }

    /// `μ_1 ⋯ μ_j`.
    pub fn mu_product(&self, j: usize) -> f64 {
        self.mus[..j].iter().product()
    }
}

fn check_basis_index(i: usize, grid: &IntensityGrid) -> Result<()> {
    if i < 2 || i > grid.k() + 1 {
        return Err(Error::Domain(format!(
            "basis index {i} outside 2..={}",
            grid.k() + 1
        )));
    }
    Ok(())
}

/// `γ_{i,n} = h_{n-i}(μ_1, ..., μ_{i-1})`, the divided difference of
/// `x^{n-2}` over the first `i - 1` intensities.
pub fn gamma_coefficient(i: usize, n: usize, grid: &IntensityGrid) -> Result<f64> {
    check_basis_index(i, grid)?;
    if n < i {
        return Err(Error::Domain(format!(
            "ρ_{i} has no weight on photon number {n} < {i}"
        )));
    }
    Ok(complete_homogeneous(n - i, &grid.mus()[..i - 1]))
}

/// Literal reciprocal-product sum for `γ_{i,n}`; kept for cross-checks.
pub fn gamma_coefficient_direct(i: usize, n: usize, grid: &IntensityGrid) -> Result<f64> {
    check_basis_index(i, grid)?;
    if n < i {
        return Err(Error::Domain(format!(
            "ρ_{i} has no weight on photon number {n} < {i}"
        )));
    }
    let nodes = &grid.mus()[..i - 1];
    let mut sum = 0.0;
    for (j, &mj) in nodes.iter().enumerate() {
        let mut denom = 1.0;
        for (t, &mt) in nodes.iter().enumerate() {
            if t != j {
                denom *= mj - mt;
            }
        }
        sum += mj.powi((n - 2) as i32) / denom;
    }
    Ok(sum)
}

/// `Ω_i = Σ_{n≥i} γ_{i,n} / n!`, summed until the tail is below `tol`
/// relative to the partial sum.
pub fn omega(i: usize, grid: &IntensityGrid, tol: f64) -> Result<f64> {
    check_basis_index(i, grid)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    omega_series(&grid.mus()[..i - 1], tol)
}

// Σ_{m≥0} h_m(nodes) / (m + r + 1)!  with r = |nodes| ≥ 1.
fn omega_series(nodes: &[f64], tol: f64) -> Result<f64> {
    let r = nodes.len();
    let mu_max = nodes[r - 1];
    let mut inv_fact = 1.0 / crate::divided_diff::factorial(r + 1);
    // majorant u_m = C(m+r-1, r-1) μ_max^m / (m+r+1)! bounds each term
    let mut majorant = inv_fact;
    let mut sum = 0.0;
    for (m, h) in HomogeneousSeries::new(nodes).enumerate().take(MAX_SERIES_TERMS) {
        sum += h * inv_fact;
        let mf = m as f64;
        let ratio = (mf + r as f64) / (mf + 1.0) * mu_max / (mf + r as f64 + 2.0);
        majorant *= ratio;
        inv_fact /= mf + r as f64 + 2.0;
        let next_ratio = (mf + 1.0 + r as f64) / (mf + 2.0) * mu_max / (mf + r as f64 + 3.0);
        if next_ratio < 1.0 && majorant / (1.0 - next_ratio) <= tol * sum {
            return Ok(sum);
        }
    }
    Err(Error::Numerical(format!(
        "Ω series did not converge within {MAX_SERIES_TERMS} terms"
    )))
}

/// Tabulated `γ_{i,n}` (up to the photon-number cutoff) and `Ω_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTable {
    k: usize,
    // gammas[i - 2][n - i]
    gammas: Vec<Vec<f64>>,
    omegas: Vec<f64>,
    n_max: usize,
    truncation_tail: f64,
}

impl ExpansionTable {
    pub fn new(grid: &IntensityGrid) -> Result<Self> {
        Self::with_cutoff(grid, DEFAULT_FOCK_CUTOFF)
    }

    pub fn with_cutoff(grid: &IntensityGrid, n_max: usize) -> Result<Self> {
        let k = grid.k();
        if n_max < k + 1 {
            return Err(Error::Domain(format!(
                "photon-number cutoff {n_max} below k + 1 = {}",
                k + 1
            )));
        }
        let mut gammas = Vec::with_capacity(k);
        let mut omegas = Vec::with_capacity(k);
        for i in 2..=k + 1 {
            let nodes = &grid.mus()[..i - 1];
            gammas.push(HomogeneousSeries::new(nodes).take(n_max - i + 1).collect());
            omegas.push(omega_series(nodes, DEFAULT_SERIES_TOL)?);
        }
        let mu_k = grid.mu(k);
        let tail = (1..=n_max).fold(mu_k.exp(), |acc, t| acc * mu_k / t as f64);
        Ok(Self {
            k,
            gammas,
            omegas,
            n_max,
            truncation_tail: tail,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `γ_{i,n}` if `2 ≤ i ≤ k+1` and `i ≤ n ≤ n_max`.
    pub fn gamma(&self, i: usize, n: usize) -> Option<f64> {
        if i < 2 || i > self.k + 1 || n < i || n > self.n_max {
            return None;
        }
        Some(self.gammas[i - 2][n - i])
    }

    /// `Ω_i` for `2 ≤ i ≤ k+1`.
    pub fn omega(&self, i: usize) -> f64 {
        self.omegas[i - 2]
    }

    /// `Ω_2, ..., Ω_{k+1}`.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Bound `e^{μ_k} μ_k^{n_max} / n_max!` on the mass beyond the cutoff.
    pub fn truncation_tail(&self) -> f64 {
        self.truncation_tail
    }
}

/// Photon-number weights of intensity `μ_i` rebuilt from the expansion;
/// entry `n` should equal `e^{-μ_i} μ_i^n / n!`.
pub fn reconstruct_poisson(i: usize, grid: &IntensityGrid, n_max: usize) -> Result<Vec<f64>> {
    if i == 0 || i > grid.k() {
        return Err(Error::Domain(format!(
            "intensity index {i} outside 1..={}",
            grid.k()
        )));
    }
    let table = ExpansionTable::with_cutoff(grid, n_max.max(grid.k() + 1))?;
    let mu = grid.mu(i);
    let damp = (-mu).exp();
    // weight of ρ_m in the mixture, m = 2..=i+1
    let weights: Vec<f64> = (2..=i + 1)
        .map(|m| {
            let prod: f64 = (1..=m - 2).map(|t| mu - grid.mu(t)).product();
            mu * mu * prod * table.omega(m)
        })
        .collect();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut inv_fact = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            inv_fact /= n as f64;
        }
        let value = match n {
            0 => 1.0,
            1 => mu,
            _ => (2..=(i + 1).min(n))
                .map(|m| weights[m - 2] * table.gamma(m, n).unwrap_or(0.0) * inv_fact / table.omega(m))
                .sum(),
        };
        out.push(damp * value);
    }
    Ok(out)
}

/// Constraint matrices relating counting rates to basis-state yields.
///
/// `P′` is `(k+1) × (k+2)` with rows `(1, 0, ...)` and
/// `(Y_i, Z_i, X_i^1, ..., X_i^k)`. `P` is `(2k+1) × (2k+2)` and carries the
/// `X` block in columns `2..=k+1` for rows `1..=k` and in columns
/// `k+2..=2k+1` for rows `k+1..=2k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    k: usize,
    p: DMatrix<f64>,
    p_prime: DMatrix<f64>,
}

impl ConstraintMatrix {
    pub fn new(grid: &IntensityGrid, table: &ExpansionTable) -> Self {
        let k = grid.k();
        let mut p_prime = DMatrix::zeros(k + 1, k + 2);
        p_prime[(0, 0)] = 1.0;
        for i in 1..=k {
            let mu = grid.mu(i);
            let damp = (-mu).exp();
            p_prime[(i, 0)] = damp;
            p_prime[(i, 1)] = mu * damp;
            for j in 1..=i {
                let prod: f64 = (1..j).map(|t| mu - grid.mu(t)).product();
                p_prime[(i, j + 1)] = mu * mu * prod * damp * table.omega(j + 1);
            }
        }
        let mut p = DMatrix::zeros(2 * k + 1, 2 * k + 2);
        p[(0, 0)] = 1.0;
        for i in 1..=k {
            for row in [i, i + k] {
                p[(row, 0)] = p_prime[(i, 0)];
                p[(row, 1)] = p_prime[(i, 1)];
            }
            for j in 1..=i {
                p[(i, j + 1)] = p_prime[(i, j + 1)];
                p[(i + k, j + k + 1)] = p_prime[(i, j + 1)];
            }
        }
        Self { k, p, p_prime }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn p_prime(&self) -> &DMatrix<f64> {
        &self.p_prime
    }

    /// `Y_i = e^{-μ_i}`.
    pub fn y(&self, i: usize) -> f64 {
        self.p_prime[(i, 0)]
    }

    /// `Z_i = μ_i e^{-μ_i}`.
    pub fn z(&self, i: usize) -> f64 {
        self.p_prime[(i, 1)]
    }

    /// `X_i^j`, zero above the diagonal.
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.p_prime[(i, j + 1)]
    }
}

/// Structural matrices of a grid; `B = A^{-1}` and `C_inv = C^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMatrices {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub c_inv: DMatrix<f64>,
    pub constraint: ConstraintMatrix,
}

pub fn build_matrices(grid: &IntensityGrid) -> Result<StructureMatrices> {
    let table = ExpansionTable::new(grid)?;
    let k = grid.k();
    let mu = |i: usize| grid.mu(i);

    // A[i][l] = Π_{t<l} (μ_i - μ_t) for l ≤ i
    let a = DMatrix::from_fn(k, k, |r, c| {
        let (i, l) = (r + 1, c + 1);
        if l > i {
            0.0
        } else {
            (1..l).map(|t| mu(i) - mu(t)).product()
        }
    });
    // B[l][i] = 1 / Π_{t≤l, t≠i} (μ_i - μ_t) for i ≤ l
    let b = DMatrix::from_fn(k, k, |r, c| {
        let (l, i) = (r + 1, c + 1);
        if i > l {
            0.0
        } else {
            1.0 / (1..=l).filter(|&t| t != i).map(|t| mu(i) - mu(t)).product::<f64>()
        }
    });
    // C[i][1] = 1/μ_i, C[i][l] = Π_{t≤l-2} (μ_i - μ_t) for 2 ≤ l ≤ i+1
    let c = DMatrix::from_fn(k, k, |r, col| {
        let (i, l) = (r + 1, col + 1);
        if l == 1 {
            1.0 / mu(i)
        } else if l <= i + 1 {
            (1..=l - 2).map(|t| mu(i) - mu(t)).product()
        } else {
            0.0
        }
    });
    // rows (0; B_1; ...; B_{k-1}) minus (-1)^k (-1)^{r-1} μ_r ⋯ μ_k B_k
    let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
    let c_inv = DMatrix::from_fn(k, k, |r, col| {
        let row = r + 1;
        let shifted = if row == 1 { 0.0 } else { b[(row - 2, col)] };
        let sign_r = if (row - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let tail: f64 = (row..=k).map(mu).product();
        shifted - sign_k * sign_r * tail * b[(k - 1, col)]
    });

    let constraint = ConstraintMatrix::new(grid, &table);
    Ok(StructureMatrices {
        a,
        b,
        c,
        c_inv,
        constraint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(mus: &[f64]) -> IntensityGrid {
        IntensityGrid::new(mus.to_vec()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn grid_validation() {
        assert!(IntensityGrid::new(vec![0.1, 0.2, 0.3]).is_ok());
        assert!(IntensityGrid::new(vec![]).is_err());
        assert!(IntensityGrid::new(vec![0.0, 0.2]).is_err());
        assert!(IntensityGrid::new(vec![0.1, 0.15]).is_err());
        assert!(IntensityGrid::new(vec![0.2, 0.1]).is_err());
        assert!(IntensityGrid::with_min_spacing(vec![0.1, 0.15], 0.01).is_ok());
        let g = grid(&[0.1, 0.2, 0.5]);
        assert_eq!(g.signal(), 0.5);
        assert_eq!(g.with_signal_index(2).unwrap().signal(), 0.2);
    }

    #[test]
    fn gamma_examples() {
        let g = grid(&[0.1, 0.2, 0.3]);
        for n in 2..10 {
            assert!(rel(gamma_coefficient(2, n, &g).unwrap(), 0.1f64.powi(n as i32 - 2)) < 1e-14);
        }
        assert!(rel(gamma_coefficient(3, 3, &g).unwrap(), 1.0) < 1e-14);
        assert!(gamma_coefficient(3, 2, &g).is_err());
        assert!(gamma_coefficient(5, 6, &g).is_err());
        for i in 2..=4 {
            for n in i..20 {
                let a = gamma_coefficient(i, n, &g).unwrap();
                let b = gamma_coefficient_direct(i, n, &g).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12), "{i} {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn omega_two_closed_form() {
        let g = grid(&[0.1]);
        let mu: f64 = 0.1;
        let closed = (mu.exp_m1() - mu) / (mu * mu);
        assert!(rel(omega(2, &g, 1e-16).unwrap(), closed) < 1e-13);
        assert!(omega(1, &g, 1e-12).is_err());
        assert!(omega(2, &g, 0.0).is_err());
    }

    #[test]
    fn table_matches_series() {
        let g = grid(&[0.1, 0.25, 0.6]);
        let t = ExpansionTable::new(&g).unwrap();
        assert_eq!(t.omegas().len(), 3);
        for i in 2..=4 {
            let mut s = 0.0;
            let mut inv_fact = 1.0 / crate::divided_diff::factorial(i);
            for n in i..=t.n_max() {
                s += t.gamma(i, n).unwrap() * inv_fact;
                inv_fact /= (n + 1) as f64;
            }
            assert!((s - t.omega(i)).abs() <= t.truncation_tail() + 1e-15 * s);
        }
        assert!(t.gamma(2, 1).is_none());
        assert!(t.gamma(5, 6).is_none());
    }

    #[test]
    fn poisson_reconstruction_example() {
        let g = grid(&[0.1, 0.2, 0.35]);
        let coeffs = reconstruct_poisson(3, &g, 12).unwrap();
        let mu: f64 = 0.35;
        let mut direct = (-mu).exp();
        for (n, c) in coeffs.iter().enumerate() {
            if n > 0 {
                direct *= mu / n as f64;
            }
            assert!(rel(*c, direct) < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn k2_matrices() {
        let m = build_matrices(&grid(&[0.1, 0.2])).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.1]);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -10.0, 10.0]);
        assert!((&m.a - &a).abs().max() < 1e-14);
        assert!((&m.b - &b).abs().max() < 1e-12);
        assert!((&m.b * &m.a - DMatrix::identity(2, 2)).abs().max() < 1e-12);
        assert!((&m.c_inv * &m.c - DMatrix::identity(2, 2)).abs().max() < 1e-10);
    }

    #[test]
    fn p1_layout() {
        let g = grid(&[0.4]);
        let m = build_matrices(&g).unwrap();
        let p = m.constraint.p();
        assert_eq!(p.shape(), (3, 4));
        let mu: f64 = 0.4;
        let om2 = (mu.exp_m1() - mu) / (mu * mu);
        let e = (-mu).exp();
        let expect = DMatrix::from_row_slice(
            3,
            4,
            &[
                1.0, 0.0, 0.0, 0.0,
                e, mu * e, e * mu * mu * om2, 0.0,
                e, mu * e, 0.0, e * mu * mu * om2,
            ],
        );
        assert!((p - expect).abs().max() < 1e-14);
    }

    #[test]
    fn p3_starred_entry() {
        let g = grid(&[0.1, 0.2, 0.4]);
        let t = ExpansionTable::new(&g).unwrap();
        let cm = ConstraintMatrix::new(&g, &t);
        let mu3: f64 = 0.4;
        let star = (-mu3).exp() * (mu3 - 0.1) * (mu3 - 0.2) * t.omega(4);
        assert!(rel(cm.x(3, 3), mu3 * mu3 * star) < 1e-14);
        assert!(rel(cm.p()[(3, 4)], mu3 * mu3 * star) < 1e-14);
        assert!(rel(cm.p()[(6, 7)], mu3 * mu3 * star) < 1e-14);
        assert_eq!(cm.x(1, 2), 0.0);
        assert_eq!(cm.p()[(2, 5)], 0.0);
        assert_eq!(cm.p()[(5, 2)], 0.0);
        assert!(rel(cm.y(2), (-0.2f64).exp()) < 1e-15);
        assert!(rel(cm.z(2), 0.2 * (-0.2f64).exp()) < 1e-15);
    }
}
