//! Small dense linear programs.
//!
//! Problems have the form `min/max c·x` subject to `A x = b` and per-variable
//! bounds `lower ≤ x ≤ upper`, where either bound may be infinite. They are
//! solved by a two-phase tableau simplex with Bland's rule. For fully boxed
//! problems with few degrees of freedom, [`LinearProgram::optimize_by_vertices`]
//! enumerates basic solutions instead and serves as an independent check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    c: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

// How an original variable is expressed through non-negative columns.
#[derive(Debug, Clone, Copy)]
enum Column {
    Shifted { col: usize, offset: f64 },
    Mirrored { col: usize, offset: f64 },
    Split { pos: usize, neg: usize },
}

impl LinearProgram {
    pub fn new(
        c: Vec<f64>,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        let n = c.len();
        if a.len() != b.len() {
            return Err(Error::Domain("row count of A differs from length of b".into()));
        }
        if a.iter().any(|row| row.len() != n) || lower.len() != n || upper.len() != n {
            return Err(Error::Domain("inconsistent linear program dimensions".into()));
        }
        for j in 0..n {
            if lower[j] == f64::INFINITY || upper[j] == f64::NEG_INFINITY || lower[j] > upper[j] {
                return Err(Error::Domain(format!(
                    "variable {j} has empty bounds [{}, {}]",
                    lower[j], upper[j]
                )));
            }
        }
        Ok(Self { c, a, b, lower, upper })
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn optimize(&self, sense: Sense) -> Result<LpSolution> {
        let sign = match sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let n = self.num_vars();

        // map to y ≥ 0
        let mut columns = Vec::with_capacity(n);
        let mut ncols = 0;
        let mut upper_rows = Vec::new();
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_finite() {
                columns.push(Column::Shifted { col: ncols, offset: l });
                if u.is_finite() {
                    upper_rows.push((ncols, u - l));
                }
                ncols += 1;
            } else if u.is_finite() {
                columns.push(Column::Mirrored { col: ncols, offset: u });
                ncols += 1;
            } else {
                columns.push(Column::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }
        let slack_start = ncols;
        ncols += upper_rows.len();

        let m = self.b.len() + upper_rows.len();
        let mut rows = vec![vec![0.0; ncols]; m];
        let mut rhs = vec![0.0; m];
        let mut cost = vec![0.0; ncols];
        for (j, colmap) in columns.iter().enumerate() {
            let cj = sign * self.c[j];
            match *colmap {
                Column::Shifted { col, .. } => cost[col] += cj,
                Column::Mirrored { col, .. } => cost[col] -= cj,
                Column::Split { pos, neg } => {
                    cost[pos] += cj;
                    cost[neg] -= cj;
                }
            }
        }
        for (r, (arow, &br)) in self.a.iter().zip(&self.b).enumerate() {
            rhs[r] = br;
            for (j, colmap) in columns.iter().enumerate() {
                let aij = arow[j];
                if aij == 0.0 {
                    continue;
                }
                match *colmap {
                    Column::Shifted { col, offset } => {
                        rows[r][col] += aij;
                        rhs[r] -= aij * offset;
                    }
                    Column::Mirrored { col, offset } => {
                        rows[r][col] -= aij;
                        rhs[r] -= aij * offset;
                    }
                    Column::Split { pos, neg } => {
                        rows[r][pos] += aij;
                        rows[r][neg] -= aij;
                    }
                }
            }
        }
        for (s, &(col, width)) in upper_rows.iter().enumerate() {
            let r = self.b.len() + s;
            rows[r][col] = 1.0;
            rows[r][slack_start + s] = 1.0;
            rhs[r] = width;
        }

        let y = solve_standard_form(rows, rhs, &cost)?;
        let x: Vec<f64> = columns
            .iter()
            .map(|colmap| match *colmap {
                Column::Shifted { col, offset } => offset + y[col],
                Column::Mirrored { col, offset } => offset - y[col],
                Column::Split { pos, neg } => y[pos] - y[neg],
            })
            .collect();
        let objective = self.c.iter().zip(&x).map(|(c, x)| c * x).sum::<f64>();
        Ok(LpSolution { objective, x })
    }

    /// Enumerates basic solutions of a fully boxed program whose equality
    /// rows have full rank. Intended for problems with few degrees of freedom.
    pub fn optimize_by_vertices(&self, sense: Sense) -> Result<LpSolution> {
        let n = self.num_vars();
        let m = self.b.len();
        if self.lower.iter().chain(&self.upper).any(|v| !v.is_finite()) {
            return Err(Error::Domain("vertex enumeration needs finite bounds".into()));
        }
        if m > n {
            return Err(Error::Domain("more equality rows than variables".into()));
        }
        let free = n - m;
        let a = DMatrix::from_fn(m, n, |r, c| self.a[r][c]);
        let b = DVector::from_vec(self.b.clone());
        let scale = 1.0 + self.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

        let mut best: Option<LpSolution> = None;
        for nonbasic in combinations(n, free) {
            let basic: Vec<usize> = (0..n).filter(|j| !nonbasic.contains(j)).collect();
            let basis = DMatrix::from_fn(m, m, |r, c| a[(r, basic[c])]);
            let lu = basis.lu();
            let diag = lu.u().diagonal().abs();
            if !lu.is_invertible() || diag.min() <= 1e-13 * diag.max() {
                continue;
            }
            for mask in 0..(1usize << free) {
                let mut x = vec![0.0; n];
                for (bit, &j) in nonbasic.iter().enumerate() {
                    x[j] = if mask >> bit & 1 == 1 { self.upper[j] } else { self.lower[j] };
                }
                let mut r = b.clone();
                for &j in &nonbasic {
                    for row in 0..m {
                        r[row] -= a[(row, j)] * x[j];
                    }
                }
                let Some(xb) = lu.solve(&r) else { continue };
                for (c, &j) in basic.iter().enumerate() {
                    x[j] = xb[c];
                }
                let feasible = (0..n).all(|j| {
                    x[j] >= self.lower[j] - FEAS_TOL * scale && x[j] <= self.upper[j] + FEAS_TOL * scale
                });
                if !feasible {
                    continue;
                }
                let objective = self.c.iter().zip(&x).map(|(c, x)| c * x).sum::<f64>();
                let better = match &best {
                    None => true,
                    Some(s) => match sense {
                        Sense::Minimize => objective < s.objective,
                        Sense::Maximize => objective > s.objective,
                    },
                };
                if better {
                    best = Some(LpSolution { objective, x });
                }
            }
        }
        best.ok_or(Error::Infeasible { residual: f64::NAN })
    }
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::with_capacity(r), &mut out);
    out
}

struct Tableau {
    // rows[i] = (coefficients, rhs)
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64], obj_val: &mut f64) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.rhs[i] -= f * prhs;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            *obj_val -= f * prhs;
        }
        self.basis[r] = c;
    }

    // Minimizes with reduced costs in `obj`; `allowed` masks enterable columns.
    fn run(&mut self, obj: &mut [f64], obj_val: &mut f64, allowed: &[bool]) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            let Some(enter) = (0..obj.len()).find(|&j| allowed[j] && obj[j] < -PIVOT_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, enter, obj, obj_val);
        }
        Err(Error::Numerical("simplex pivot limit reached".into()))
    }
}

// min cost·y  s.t.  rows·y = rhs, y ≥ 0
fn solve_standard_form(mut rows: Vec<Vec<f64>>, mut rhs: Vec<f64>, cost: &[f64]) -> Result<Vec<f64>> {
    let m = rows.len();
    let n = cost.len();
    for i in 0..m {
        if rhs[i] < 0.0 {
            rhs[i] = -rhs[i];
            for v in rows[i].iter_mut() {
                *v = -*v;
            }
        }
    }
    let scale = 1.0 + rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for (i, row) in rows.iter_mut().enumerate() {
        row.extend((0..m).map(|r| if r == i { 1.0 } else { 0.0 }));
    }
    let total = n + m;
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..total).collect(),
    };

    // phase one: minimize the sum of artificials
    let mut obj = vec![0.0; total];
    let mut obj_val = 0.0;
    for i in 0..m {
        for j in 0..n {
            obj[j] -= t.rows[i][j];
        }
        obj_val -= t.rhs[i];
    }
    let all = vec![true; total];
    t.run(&mut obj, &mut obj_val, &all)?;
    let residual = -obj_val;
    if residual > FEAS_TOL * scale {
        return Err(Error::Infeasible { residual });
    }

    // drive artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].abs() > 1e-9) {
                Some(j) => {
                    let mut dummy = vec![0.0; total];
                    let mut dv = 0.0;
                    t.pivot(i, j, &mut dummy, &mut dv);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // phase two
    let mut obj: Vec<f64> = (0..total).map(|j| if j < n { cost[j] } else { 0.0 }).collect();
    let mut obj_val = 0.0;
    for r in 0..t.rows.len() {
        let cb = cost[t.basis[r]];
        if cb != 0.0 {
            for j in 0..total {
                obj[j] -= cb * t.rows[r][j];
            }
            obj_val -= cb * t.rhs[r];
        }
    }
    let structural: Vec<bool> = (0..total).map(|j| j < n).collect();
    t.run(&mut obj, &mut obj_val, &structural)?;

    let mut y = vec![0.0; n];
    for (r, &bj) in t.basis.iter().enumerate() {
        if bj < n {
            y[bj] = t.rhs[r].max(0.0);
        }
    }
    Ok(y)
}
