//! Chebyshev (min-max) fit of a density on a reduced domain.
//!
//! Given `A[j][i] = f_j(z_i)` and noisy targets `b`, solve
//!
//! ```text
//! minimize t  subject to  -t <= (A h)_j - b_j <= t  for every j,   h >= 0,   Σ h = 1
//! ```
//!
//! In standard form, with slacks `s⁺, s⁻ >= 0`:
//!
//! ```text
//! row j       :   A_j h - t + s⁺_j =  b_j
//! row |F| + j :  -A_j h - t + s⁻_j = -b_j
//! row 2|F|    :   Σ h              =  1
//! ```
//!
//! The LP has few rows and many columns, so a revised simplex keeps an explicit dense
//! inverse of the `(2|F|+1)`-square basis and prices every column against it.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::data::{
    CompensatedSum, DataPoint, Dataset, FiniteDensity, QueryFamily, Schema, StatisticsVector,
};
use crate::error::{Error, Result};

/// Data of one min-max fit: a dense `|F| × M` value matrix over `M` distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    support: Dataset,
    rows: usize,
    cols: usize,
    /// Row-major, `values[j * cols + i] = f_j(z_i)`.
    values: Vec<f64>,
    targets: Vec<f64>,
}

impl FitProblem {
    /// A problem over an abstract support `{0, 1, …, M-1}` given directly by its matrix.
    pub fn from_matrix(matrix: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if matrix.len() != targets.len() {
            return Err(Error::param(format!(
                "{} matrix rows but {} targets",
                matrix.len(),
                targets.len()
            )));
        }
        let cols = matrix.first().map_or(0, Vec::len);
        if cols == 0 && matrix.is_empty() {
            return Err(Error::param("empty matrix needs an explicit support"));
        }
        if cols == 0 {
            return Err(Error::EmptyDataset);
        }
        if matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged matrix"));
        }
        if let Some(v) = matrix.iter().flatten().find(|v| !(v.abs() <= 1.0)) {
            return Err(Error::param(format!("matrix entry {v} outside [-1, 1]")));
        }
        let schema = Schema::new(vec![cols as u32])?;
        let points = (0..cols as u32).map(|i| DataPoint::new(vec![i])).collect();
        Ok(Self {
            support: Dataset::from_parts_unchecked(schema, points),
            rows: matrix.len(),
            cols,
            values: matrix.into_iter().flatten().collect(),
            targets,
        })
    }

    pub fn support(&self) -> &Dataset {
        &self.support
    }

    /// Number of test functions.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of distinct support points (LP weight variables).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// `(A h)_j` for every row.
    pub fn apply(&self, weights: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|j| {
                let mut acc = CompensatedSum::default();
                for (a, w) in self.row(j).iter().zip(weights) {
                    acc.add(a * w);
                }
                acc.value()
            })
            .collect()
    }

    /// `max_j |(A h)_j - b_j|`.
    pub fn max_residual(&self, weights: &[f64]) -> f64 {
        self.apply(weights)
            .iter()
            .zip(&self.targets)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Plain-text rendering of `A`, `b` and optionally a solution. Debugging aid only.
    pub fn dump(&self, solution: Option<&FitSolution>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# fit problem: {} rows x {} columns", self.rows, self.cols);
        for j in 0..self.rows {
            let row: Vec<String> = self.row(j).iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "A[{j}] = {}  b = {}", row.join(" "), self.targets[j]);
        }
        if let Some(s) = solution {
            let h: Vec<String> = s.density.weights().iter().map(|w| format!("{w}")).collect();
            let _ = writeln!(out, "h = {}", h.join(" "));
            let _ = writeln!(out, "t = {}", s.objective);
            let _ = writeln!(out, "status = {:?} after {} iterations", s.status, s.iterations);
        }
        out
    }
}

/// Materializes the fit problem. Repeated points of `omega_star` become one variable.
pub fn build_lp(
    queries: &QueryFamily,
    omega_star: &Dataset,
    noisy_targets: &StatisticsVector,
) -> Result<FitProblem> {
    if omega_star.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if queries.schema() != omega_star.schema() {
        return Err(Error::SchemaMismatch(
            "reduced domain and family schemas differ".into(),
        ));
    }
    if noisy_targets.len() != queries.len() {
        return Err(Error::param(format!(
            "{} targets for {} functions",
            noisy_targets.len(),
            queries.len()
        )));
    }
    let mut seen: HashMap<&DataPoint, ()> = HashMap::with_capacity(omega_star.len());
    let distinct: Vec<DataPoint> = omega_star
        .points()
        .iter()
        .filter(|p| seen.insert(p, ()).is_none())
        .cloned()
        .collect();
    let schema = omega_star.schema();
    let cols = distinct.len();
    let values: Vec<f64> = queries
        .functions()
        .par_iter()
        .flat_map_iter(|f| distinct.iter().map(move |z| f.eval(schema, z)))
        .collect();
    Ok(FitProblem {
        support: Dataset::from_parts_unchecked(schema.clone(), distinct),
        rows: queries.len(),
        cols,
        values,
        targets: noisy_targets.values().to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSolution {
    pub density: FiniteDensity,
    /// Achieved `max_j |(A h)_j - b_j|` of the returned density.
    pub objective: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Entering columns need reduced cost below `-reduced_cost_tol`.
    pub reduced_cost_tol: f64,
    /// Smallest admissible pivot magnitude in the ratio test.
    pub pivot_tol: f64,
    /// Negative weights down to `-weight_clamp` are numerical noise and are zeroed.
    pub weight_clamp: f64,
    /// `None` means `50 · (rows + columns)`, at least 10 000.
    pub max_iterations: Option<usize>,
    /// Recompute the basis inverse from scratch this often.
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            reduced_cost_tol: 1e-9,
            pivot_tol: 1e-9,
            weight_clamp: 1e-12,
            max_iterations: None,
            refactor_every: 64,
            degenerate_limit: 50,
        }
    }
}

/// Solves the min-max fit to global optimality (or until the iteration limit).
pub fn solve_min_max(problem: &FitProblem, options: &SolverOptions) -> Result<FitSolution> {
    let mut simplex = Simplex::new(problem, *options);
    let (status, iterations) = simplex.run();
    let weights = simplex.weights();
    let mut weights: Vec<f64> = weights
        .into_iter()
        .map(|w| if w < 0.0 { 0.0 } else { w })
        .collect();
    let total: f64 = crate::data::neumaier_sum(weights.iter().copied());
    for w in &mut weights {
        *w /= total;
    }
    let objective = problem.max_residual(&weights);
    let density = FiniteDensity::new(problem.support().clone(), weights)?;
    Ok(FitSolution {
        density,
        objective,
        iterations,
        status,
    })
}

/// Column layout: `[h_0 .. h_{M-1}, t, s⁺_0 .. s⁺_{F-1}, s⁻_0 .. s⁻_{F-1}]`.
struct Simplex<'a> {
    problem: &'a FitProblem,
    options: SolverOptions,
    f: usize,
    m: usize,
    /// Number of constraint rows, `2F + 1`.
    r: usize,
    /// `basis[pos]` is the variable basic in row position `pos`.
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// Dense row-major inverse of the basis matrix.
    binv: Vec<f64>,
    x_b: Vec<f64>,
    rhs: Vec<f64>,
    bland: bool,
}

impl<'a> Simplex<'a> {
    fn new(problem: &'a FitProblem, options: SolverOptions) -> Self {
        let f = problem.rows();
        let m = problem.cols();
        let r = 2 * f + 1;
        let mut rhs = Vec::with_capacity(r);
        rhs.extend_from_slice(problem.targets());
        rhs.extend(problem.targets().iter().map(|b| -b));
        rhs.push(1.0);

        // Start at the vertex h = e_0 with t at the largest residual; the tight row's
        // slack leaves the basis in favour of t.
        let t_var = m;
        let mut basis: Vec<usize> = (0..2 * f).map(|row| m + 1 + row).collect();
        if f > 0 {
            let tight = (0..2 * f)
                .map(|row| {
                    let j = row % f;
                    let sign = if row < f { 1.0 } else { -1.0 };
                    (row, sign * (problem.value(j, 0) - problem.targets()[j]))
                })
                .fold((0, f64::NEG_INFINITY), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                })
                .0;
            basis[tight] = t_var;
        }
        basis.push(0);
        let n_vars = m + 1 + 2 * f;
        let mut in_basis = vec![false; n_vars];
        for &v in &basis {
            in_basis[v] = true;
        }
        let mut s = Self {
            problem,
            options,
            f,
            m,
            r,
            basis,
            in_basis,
            binv: vec![0.0; r * r],
            x_b: vec![0.0; r],
            rhs,
            bland: false,
        };
        s.refactor();
        s
    }

    fn n_vars(&self) -> usize {
        self.m + 1 + 2 * self.f
    }

    /// Dense column of the constraint matrix for variable `var`.
    fn column(&self, var: usize) -> Vec<f64> {
        let (f, m, r) = (self.f, self.m, self.r);
        let mut col = vec![0.0; r];
        if var < m {
            for j in 0..f {
                let a = self.problem.value(j, var);
                col[j] = a;
                col[f + j] = -a;
            }
            col[2 * f] = 1.0;
        } else if var == m {
            for c in col.iter_mut().take(2 * f) {
                *c = -1.0;
            }
        } else {
            col[var - m - 1] = 1.0;
        }
        col
    }

    /// Rebuilds `B⁻¹` by Gauss-Jordan elimination with partial pivoting and refreshes `x_B`.
    fn refactor(&mut self) {
        let r = self.r;
        let mut b = vec![0.0; r * r];
        for (pos, &var) in self.basis.iter().enumerate() {
            for (row, v) in self.column(var).into_iter().enumerate() {
                b[row * r + pos] = v;
            }
        }
        let mut inv = vec![0.0; r * r];
        for i in 0..r {
            inv[i * r + i] = 1.0;
        }
        for c in 0..r {
            let pivot_row = (c..r)
                .max_by(|&x, &y| b[x * r + c].abs().total_cmp(&b[y * r + c].abs()))
                .expect("nonempty range");
            if pivot_row != c {
                for k in 0..r {
                    b.swap(c * r + k, pivot_row * r + k);
                    inv.swap(c * r + k, pivot_row * r + k);
                }
            }
            let p = b[c * r + c];
            debug_assert!(p.abs() > 1e-14, "singular basis");
            for k in 0..r {
                b[c * r + k] /= p;
                inv[c * r + k] /= p;
            }
            for row in 0..r {
                if row == c {
                    continue;
                }
                let factor = b[row * r + c];
                if factor == 0.0 {
                    continue;
                }
                for k in 0..r {
                    b[row * r + k] -= factor * b[c * r + k];
                    inv[row * r + k] -= factor * inv[c * r + k];
                }
            }
        }
        self.binv = inv;
        self.x_b = (0..r)
            .map(|i| {
                let mut acc = CompensatedSum::default();
                for (k, rhs) in self.rhs.iter().enumerate() {
                    acc.add(self.binv[i * r + k] * rhs);
                }
                acc.value()
            })
            .collect();
    }

    /// Simplex multipliers `y = c_Bᵀ B⁻¹`; only `t` carries cost.
    fn duals(&self) -> Vec<f64> {
        match self.basis.iter().position(|&v| v == self.m) {
            Some(pos) => self.binv[pos * self.r..(pos + 1) * self.r].to_vec(),
            None => vec![0.0; self.r],
        }
    }

    /// Reduced costs of every variable (basic ones come out as ~0 and are skipped later).
    fn reduced_costs(&self, y: &[f64]) -> Vec<f64> {
        let (f, m) = (self.f, self.m);
        let mut d = vec![0.0; self.n_vars()];
        // h_i: -(Σ_j (y_j - y_{F+j}) A[j][i] + y_{2F})
        let mut acc = vec![y[2 * f]; m];
        for j in 0..f {
            let w = y[j] - y[f + j];
            if w == 0.0 {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(self.problem.row(j)) {
                *a += w * v;
            }
        }
        for (di, a) in d.iter_mut().zip(acc) {
            *di = -a;
        }
        d[m] = 1.0 + y[..2 * f].iter().sum::<f64>();
        for row in 0..2 * f {
            d[m + 1 + row] = -y[row];
        }
        d
    }

    fn entering(&self, d: &[f64]) -> Option<usize> {
        let tol = self.options.reduced_cost_tol;
        let candidates = d
            .iter()
            .enumerate()
            .filter(|&(v, &dv)| !self.in_basis[v] && dv < -tol);
        if self.bland {
            candidates.map(|(v, _)| v).next()
        } else {
            // most negative; strict comparison keeps the lowest index on ties
            candidates
                .fold(None, |best: Option<(usize, f64)>, (v, &dv)| match best {
                    Some((_, bd)) if bd <= dv => best,
                    _ => Some((v, dv)),
                })
                .map(|(v, _)| v)
        }
    }

    fn leaving(&self, alpha: &[f64]) -> Option<usize> {
        let tol = self.options.pivot_tol;
        let mut best: Option<(usize, f64)> = None;
        for (pos, &a) in alpha.iter().enumerate() {
            if a <= tol {
                continue;
            }
            let ratio = self.x_b[pos].max(0.0) / a;
            best = match best {
                None => Some((pos, ratio)),
                Some((bp, br)) => {
                    let better = if (ratio - br).abs() <= 1e-12 {
                        if self.bland {
                            self.basis[pos] < self.basis[bp]
                        } else {
                            a > alpha[bp]
                        }
                    } else {
                        ratio < br
                    };
                    if better {
                        Some((pos, ratio))
                    } else {
                        Some((bp, br))
                    }
                }
            };
        }
        best.map(|(pos, _)| pos)
    }

    fn pivot(&mut self, pos: usize, entering: usize, alpha: &[f64]) {
        let r = self.r;
        let a_p = alpha[pos];
        let theta = self.x_b[pos] / a_p;
        for k in 0..r {
            self.binv[pos * r + k] /= a_p;
        }
        for i in 0..r {
            if i == pos || alpha[i] == 0.0 {
                continue;
            }
            let factor = alpha[i];
            for k in 0..r {
                self.binv[i * r + k] -= factor * self.binv[pos * r + k];
            }
            self.x_b[i] -= theta * alpha[i];
        }
        self.x_b[pos] = theta;
        self.in_basis[self.basis[pos]] = false;
        self.in_basis[entering] = true;
        self.basis[pos] = entering;
    }

    fn run(&mut self) -> (SolveStatus, usize) {
        if self.f == 0 {
            return (SolveStatus::Optimal, 0);
        }
        let limit = self
            .options
            .max_iterations
            .unwrap_or_else(|| (50 * (self.r + self.m)).max(10_000));
        let mut degenerate_run = 0usize;
        let mut iterations = 0usize;
        loop {
            let y = self.duals();
            let d = self.reduced_costs(&y);
            let Some(entering) = self.entering(&d) else {
                return (SolveStatus::Optimal, iterations);
            };
            if iterations >= limit {
                return (SolveStatus::IterationLimit, iterations);
            }
            let col = self.column(entering);
            let r = self.r;
            let alpha: Vec<f64> = (0..r)
                .map(|i| (0..r).map(|k| self.binv[i * r + k] * col[k]).sum())
                .collect();
            let Some(pos) = self.leaving(&alpha) else {
                // Unbounded direction: impossible for a bounded objective, so numerical trouble.
                self.refactor();
                return (SolveStatus::IterationLimit, iterations);
            };
            if self.x_b[pos].max(0.0) / alpha[pos] <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= self.options.degenerate_limit {
                    self.bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(pos, entering, &alpha);
            iterations += 1;
            if iterations % self.options.refactor_every == 0 {
                self.refactor();
            }
        }
    }

    fn weights(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.m];
        for (pos, &var) in self.basis.iter().enumerate() {
            if var < self.m {
                h[var] = self.x_b[pos];
            }
        }
        if h.iter().all(|&w| w <= self.options.weight_clamp) {
            // degenerate numerical wreck; fall back to the start vertex
            h.iter_mut().for_each(|w| *w = 0.0);
            h[0] = 1.0;
        }
        h
    }
}
