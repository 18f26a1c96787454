//! Generalized divided differences.
//!
//! For distinct abscissas `x_1, ..., x_{n+1}` the divided difference of `f` is
//!
//! ```text
//! Δ_f(x_1, ..., x_{n+1}) = Σ_i f(x_i) / Π_{j≠i} (x_i - x_j)
//! ```
//!
//! which equals the simplex average of `f^{(n)} / n!`. The Newton-table
//! recurrence is the preferred evaluation path; the direct sum is kept for
//! cross-checks. Closed forms for power functions are provided through
//! complete homogeneous symmetric polynomials.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};

/// Default minimum separation between neighbouring abscissas.
pub const DEFAULT_MIN_GAP: f64 = 1e-9;

/// Strictly increasing, well-separated abscissas.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        Self::with_min_gap(points, DEFAULT_MIN_GAP)
    }

    pub fn with_min_gap(points: Vec<f64>, min_gap: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPoints);
        }
        if let Some(&x) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite abscissa {x}")));
        }
        for w in points.windows(2) {
            if w[1] < w[0] {
                return Err(Error::UnorderedPoints {
                    left: w[0],
                    right: w[1],
                });
            }
            if w[1] - w[0] < min_gap {
                return Err(Error::DegeneratePoints {
                    left: w[0],
                    right: w[1],
                    min_gap,
                });
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn evaluate<F: Fn(f64) -> f64>(f: &F, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let value = f(x);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::Evaluation { x, value })
            }
        })
        .collect()
}

fn direct_sum(values: &[f64], xs: &[f64]) -> f64 {
    xs.iter()
        .zip(values)
        .enumerate()
        .map(|(i, (&xi, &fi))| {
            let denom: f64 = xs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| xi - xj)
                .product();
            fi / denom
        })
        .sum()
}

/// Top entry of the Newton divided-difference table.
fn newton_top(values: &[f64], xs: &[f64]) -> f64 {
    let mut table = values.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    table[n - 1]
}

/// Divided difference by the defining sum `Σ f(x_i) / Π_{j≠i}(x_i - x_j)`.
pub fn divided_difference<F: Fn(f64) -> f64>(f: F, pts: &PointSet) -> Result<f64> {
    let values = evaluate(&f, pts.points())?;
    Ok(direct_sum(&values, pts.points()))
}

/// Defining sum over points in arbitrary order.
///
/// Only pairwise separation is checked, so this is the entry point for
/// permutation-symmetry checks.
pub fn divided_difference_unordered<F: Fn(f64) -> f64>(f: F, xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyPoints);
    }
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            if (a - b).abs() < DEFAULT_MIN_GAP {
                return Err(Error::DegeneratePoints {
                    left: a,
                    right: b,
                    min_gap: DEFAULT_MIN_GAP,
                });
            }
        }
    }
    let values = evaluate(&f, xs)?;
    Ok(direct_sum(&values, xs))
}

/// Divided difference through the nested recurrence
/// `Δ(x_1..x_{n+1}) = (Δ(x_2..x_{n+1}) - Δ(x_1..x_n)) / (x_{n+1} - x_1)`.
pub fn divided_difference_recurrence<F: Fn(f64) -> f64>(f: F, pts: &PointSet) -> Result<f64> {
    let values = evaluate(&f, pts.points())?;
    Ok(newton_top(&values, pts.points()))
}

/// Complete homogeneous symmetric polynomial `h_degree(xs)`: the sum of all
/// monomials of total degree `degree` in the given variables.
pub fn complete_homogeneous(degree: usize, xs: &[f64]) -> f64 {
    let mut h = vec![0.0; degree + 1];
    h[0] = 1.0;
    for &x in xs {
        for d in 1..=degree {
            h[d] += x * h[d - 1];
        }
    }
    h[degree]
}

/// Yields `h_0(xs), h_1(xs), h_2(xs), ...` in O(|xs|) work per degree.
#[derive(Debug, Clone)]
pub struct HomogeneousSeries {
    nodes: Vec<f64>,
    // row[t] = h_m(x_1..x_t) for the degree m produced last
    row: Vec<f64>,
    started: bool,
}

impl HomogeneousSeries {
    pub fn new(nodes: &[f64]) -> Self {
        Self {
            nodes: nodes.to_vec(),
            row: vec![1.0; nodes.len() + 1],
            started: false,
        }
    }
}

impl Iterator for HomogeneousSeries {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if !self.started {
            self.started = true;
            return Some(1.0);
        }
        // h_m(x_1..x_t) = h_m(x_1..x_{t-1}) + x_t h_{m-1}(x_1..x_t)
        self.row[0] = 0.0;
        for t in 1..self.row.len() {
            self.row[t] = self.row[t - 1] + self.nodes[t - 1] * self.row[t];
        }
        Some(self.row[self.nodes.len()])
    }
}

/// Closed form of the divided difference of `x^exponent` over `n` points.
///
/// For `exponent >= 0` this is `h_{exponent-n+1}(x_1..x_n)` (zero when
/// `exponent <= n-2`); for negative exponents it is
/// `(-1)^{n-1} Π(1/x_i) h_{-exponent-1}(1/x_1..1/x_n)`.
pub fn power_divided_difference(exponent: i32, pts: &PointSet) -> Result<f64> {
    let xs = pts.points();
    let n = xs.len() as i64;
    if exponent >= 0 {
        let degree = i64::from(exponent) - n + 1;
        if degree < 0 {
            return Ok(0.0);
        }
        return Ok(complete_homogeneous(degree as usize, xs));
    }
    if xs.contains(&0.0) {
        return Err(Error::Domain(format!(
            "x^{exponent} is undefined at a zero abscissa"
        )));
    }
    let inverses: Vec<f64> = xs.iter().map(|x| x.recip()).collect();
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    let degree = (-i64::from(exponent) - 1) as usize;
    Ok(sign * inverses.iter().product::<f64>() * complete_homogeneous(degree, &inverses))
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Fills `weights` with a uniform draw from the probability simplex using
/// normalized exponential spacings.
pub fn uniform_simplex_sample<R: Rng + ?Sized>(rng: &mut R, weights: &mut [f64]) {
    let mut total = 0.0;
    for w in weights.iter_mut() {
        let e: f64 = rng.sample(Exp1);
        *w = e;
        total += e;
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Estimates `(1/n!) ∫_{Δ_n} f^{(n)}(Σ a_i x_i) dp_n(a)` with `n = |pts| - 1`,
/// i.e. the divided difference of any `f` whose `n`-th derivative is
/// `f_nth_derivative`.
///
/// Test oracle only: the estimate is independent of the closed forms and the
/// recurrence.
pub fn simplex_mean_value_oracle<F: Fn(f64) -> f64>(
    f_nth_derivative: F,
    pts: &PointSet,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let xs = pts.points();
    let order = xs.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = vec![0.0; xs.len()];

    // Welford running moments
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for count in 1..=samples {
        uniform_simplex_sample(&mut rng, &mut weights);
        let y: f64 = weights.iter().zip(xs).map(|(a, x)| a * x).sum();
        let value = f_nth_derivative(y);
        if !value.is_finite() {
            return Err(Error::Evaluation { x: y, value });
        }
        let delta = value - mean;
        mean += delta / count as f64;
        m2 += delta * (value - mean);
    }
    let scale = factorial(order);
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt() / scale
    } else {
        f64::INFINITY
    };
    Ok(MonteCarloEstimate {
        estimate: mean / scale,
        std_error,
        samples,
    })
}
