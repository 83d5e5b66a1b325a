//! A small dense linear-program solver.
//!
//! Two-phase primal simplex over an explicit tableau. Pricing is Dantzig's
//! rule (most negative reduced cost) with an automatic switch to Bland's
//! rule once a phase runs long, which keeps the common case fast and still
//! guarantees termination on degenerate instances. Rows whose right-hand
//! side is zero are seeded with their own slack or surplus variable, so
//! artificials exist only for equalities and strictly positive `≥` rows —
//! the policy programs this solver exists for are almost entirely zero-rhs
//! rows, and giving each of them an artificial would make phase 1 massively
//! degenerate. Built for a few hundred rows and columns at most; nothing
//! here is sparse or revised. All variables are implicitly nonnegative.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// `coeffs·x ≤ rhs`
    Le,
    /// `coeffs·x ≥ rhs`
    Ge,
    /// `coeffs·x = rhs`
    Eq,
}

/// One linear constraint over the structural variables.
#[derive(Debug, Clone)]
pub struct Constraint {
    /// Coefficients, one per structural variable.
    pub coeffs: Vec<f64>,
    /// Sense of the comparison.
    pub cmp: Comparison,
    /// Right-hand side.
    pub rhs: f64,
}

/// `maximize objective·x` subject to `constraints`, `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    /// Objective coefficients (maximization).
    pub objective: Vec<f64>,
    /// The constraint rows.
    pub constraints: Vec<Constraint>,
}

/// An optimal vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Optimal structural variable values.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub objective: f64,
    /// Total simplex pivots across both phases.
    pub iterations: usize,
}

/// Solver failure.
#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    /// A constraint row's coefficient count disagrees with the objective.
    BadShape {
        /// Index of the offending constraint.
        constraint: usize,
    },
    /// No feasible point; lists the constraints whose artificials stayed
    /// positive after phase 1 (a witness set, not necessarily minimal).
    Infeasible {
        /// Indices into the original constraint list.
        constraints: Vec<usize>,
    },
    /// The objective is unbounded above on the feasible set.
    Unbounded,
    /// Pivot budget exhausted (the Bland fallback makes this a hard upper
    /// bound on work, not an expected outcome).
    IterationLimit,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::BadShape { constraint } => {
                write!(f, "constraint {constraint} has the wrong coefficient count")
            }
            LpError::Infeasible { constraints } => {
                write!(f, "infeasible; unsatisfied constraints {constraints:?}")
            }
            LpError::Unbounded => write!(f, "objective unbounded above"),
            LpError::IterationLimit => write!(f, "simplex iteration limit reached"),
        }
    }
}

impl core::error::Error for LpError {}

const EPS: f64 = 1e-9;
/// Ratio-test tolerance. Deliberately below `EPS`: the policy programs carry
/// floor rows with coefficients of order 1e-9, and a column entry that small
/// must still bound the entering variable or the walk leaves the feasible set.
const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

struct Tableau {
    /// `rows × (cols + 1)`; the extra trailing entry per row is the rhs.
    a: Vec<f64>,
    rows: usize,
    cols: usize,
    /// Column index of each row's basic variable.
    basis: Vec<usize>,
    /// Reduced-cost row for the current (minimization) objective, plus the
    /// negated objective value in the rhs slot.
    obj: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.a[row * w + col];
        for j in 0..w {
            self.a[row * w + j] *= inv;
        }
        self.a[row * w + col] = 1.0; // clean the pivot entry exactly
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.a[r * w + col];
            if factor != 0.0 {
                for j in 0..w {
                    self.a[r * w + j] -= factor * self.a[row * w + j];
                }
                self.a[r * w + col] = 0.0;
            }
        }
        let factor = self.obj[col];
        if factor != 0.0 {
            for j in 0..w {
                self.obj[j] -= factor * self.a[row * w + j];
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs simplex minimization steps until optimal. `allowed` bounds the
    /// columns eligible to enter (used to fence off artificials).
    ///
    /// Pricing starts with Dantzig's rule and switches permanently to
    /// Bland's once this phase has spent a generous pivot budget without
    /// finishing — Dantzig is near-optimal on these instances when it works
    /// and can stall on degenerate bases, Bland terminates unconditionally.
    fn minimize(&mut self, allowed: usize) -> Result<(), LpError> {
        let bland_after = self.pivots + 20 * (self.rows + allowed);
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit);
            }
            let bland = self.pivots >= bland_after;
            let col = if bland {
                (0..allowed).find(|&j| self.obj[j] < -EPS)
            } else {
                let mut best: Option<(f64, usize)> = None;
                for j in 0..allowed {
                    let c = self.obj[j];
                    if c < -EPS && best.is_none_or(|(bc, _)| c < bc) {
                        best = Some((c, j));
                    }
                }
                best.map(|(_, j)| j)
            };
            let Some(col) = col else {
                return Ok(());
            };
            let Some(row) = self.leaving_row(col, bland) else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
    }

    /// Ratio test for the entering column. In the Dantzig regime near-ties
    /// resolve toward the largest pivot element — degenerate vertices make
    /// exact ties the common case here, and pivoting on a floor-row entry of
    /// order 1e-9 amplifies roundoff a billionfold. In the Bland regime ties
    /// resolve toward the smallest basis index, which is what the
    /// termination guarantee requires.
    fn leaving_row(&self, col: usize, bland: bool) -> Option<usize> {
        let mut theta: Option<f64> = None;
        for r in 0..self.rows {
            let a = self.at(r, col);
            if a > PIVOT_EPS {
                let ratio = self.rhs(r) / a;
                if theta.is_none_or(|t| ratio < t) {
                    theta = Some(ratio);
                }
            }
        }
        let theta = theta?;
        if bland {
            let mut best: Option<(usize, usize)> = None; // (basis idx, row)
            for r in 0..self.rows {
                let a = self.at(r, col);
                if a > PIVOT_EPS
                    && self.rhs(r) / a <= theta
                    && best.is_none_or(|(b, _)| self.basis[r] < b)
                {
                    best = Some((self.basis[r], r));
                }
            }
            best.map(|(_, r)| r)
        } else {
            let tol = 1e-9 * (1.0 + theta.abs());
            let mut best: Option<(f64, usize)> = None; // (pivot element, row)
            for r in 0..self.rows {
                let a = self.at(r, col);
                if a > PIVOT_EPS
                    && self.rhs(r) / a <= theta + tol
                    && best.is_none_or(|(b, _)| a > b)
                {
                    best = Some((a, r));
                }
            }
            best.map(|(_, r)| r)
        }
    }
}

/// Solves the program. Returns the optimum or a structured failure.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let n = lp.objective.len();
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(LpError::BadShape { constraint: i });
        }
    }
    let m = lp.constraints.len();

    // Normalize to nonnegative rhs, then lay out columns as
    // [structural | slack/surplus | artificial].
    let mut rows: Vec<(Vec<f64>, Comparison, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.cmp {
                    Comparison::Le => Comparison::Ge,
                    Comparison::Ge => Comparison::Le,
                    Comparison::Eq => Comparison::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.cmp, c.rhs)
            }
        })
        .collect();

    // A `≥` row with zero rhs is `−coeffs·x ≤ 0` in disguise: flip it and
    // seed its slack instead of wasting an artificial on it. The policy
    // programs are almost entirely such rows, and phase 1 over ~150
    // simultaneously-degenerate artificials stalls badly.
    for row in rows.iter_mut() {
        if row.1 == Comparison::Ge && row.2 == 0.0 {
            for v in row.0.iter_mut() {
                *v = -*v;
            }
            row.1 = Comparison::Le;
        }
    }

    let n_slack = rows
        .iter()
        .filter(|r| matches!(r.1, Comparison::Le | Comparison::Ge))
        .count();
    let n_art = rows
        .iter()
        .filter(|r| matches!(r.1, Comparison::Ge | Comparison::Eq))
        .count();
    let cols = n + n_slack + n_art;
    let w = cols + 1;

    let mut t = Tableau {
        a: vec![0.0; m * w],
        rows: m,
        cols,
        basis: vec![0; m],
        obj: vec![0.0; w],
        pivots: 0,
    };
    // artificial_of[r] = artificial column of row r, if any.
    let mut artificial_of: Vec<Option<usize>> = vec![None; m];
    let mut next_slack = n;
    let mut next_art = n + n_slack;
    for (r, (coeffs, cmp, rhs)) in rows.drain(..).enumerate() {
        for (j, v) in coeffs.into_iter().enumerate() {
            t.a[r * w + j] = v;
        }
        t.a[r * w + cols] = rhs;
        match cmp {
            Comparison::Le => {
                t.a[r * w + next_slack] = 1.0;
                t.basis[r] = next_slack;
                next_slack += 1;
            }
            Comparison::Ge => {
                t.a[r * w + next_slack] = -1.0;
                next_slack += 1;
                t.a[r * w + next_art] = 1.0;
                t.basis[r] = next_art;
                artificial_of[r] = Some(next_art);
                next_art += 1;
            }
            Comparison::Eq => {
                t.a[r * w + next_art] = 1.0;
                t.basis[r] = next_art;
                artificial_of[r] = Some(next_art);
                next_art += 1;
            }
        }
    }

    // Phase 1: minimize the artificial sum. Reduced costs start as
    // 1_{artificial} minus the artificial-basic rows.
    if n_art > 0 {
        for j in n + n_slack..cols {
            t.obj[j] = 1.0;
        }
        for (r, art) in artificial_of.iter().enumerate() {
            if art.is_some() {
                for j in 0..w {
                    t.obj[j] -= t.a[r * w + j];
                }
            }
        }
        t.minimize(cols)?;
        let infeasibility = -t.obj[cols]; // rhs slot carries −objective
        if infeasibility > 1e-7 {
            let bad: Vec<usize> = (0..m)
                .filter(|&r| {
                    artificial_of[r]
                        .map(|a| t.basis[r] == a && t.rhs(r) > EPS)
                        .unwrap_or(false)
                })
                .collect();
            return Err(LpError::Infeasible { constraints: bad });
        }
        // Drive leftover zero-valued artificials out of the basis where
        // possible; rows that offer no pivot are redundant and get dropped.
        let art_start = n + n_slack;
        let mut drop_rows: Vec<usize> = Vec::new();
        for r in 0..m {
            if t.basis[r] < art_start {
                continue;
            }
            match (0..art_start).find(|&j| t.at(r, j).abs() > EPS) {
                Some(col) => t.pivot(r, col),
                None => drop_rows.push(r),
            }
        }
        if !drop_rows.is_empty() {
            let mut a = Vec::with_capacity((m - drop_rows.len()) * w);
            let mut basis = Vec::with_capacity(m - drop_rows.len());
            for r in 0..m {
                if !drop_rows.contains(&r) {
                    a.extend_from_slice(&t.a[r * w..(r + 1) * w]);
                    basis.push(t.basis[r]);
                }
            }
            t.a = a;
            t.basis = basis;
            t.rows -= drop_rows.len();
        }
    }

    // Phase 2: minimize −objective over the original columns. Artificial
    // columns are left in the tableau but barred from entering.
    let art_start = n + n_slack;
    for j in 0..w {
        t.obj[j] = 0.0;
    }
    for j in 0..n {
        t.obj[j] = -lp.objective[j];
    }
    for r in 0..t.rows {
        let b = t.basis[r];
        let cost = if b < n { -lp.objective[b] } else { 0.0 };
        if cost != 0.0 {
            for j in 0..w {
                t.obj[j] -= cost * t.a[r * w + j];
            }
        }
    }
    // Basic columns must show zero reduced cost; enforce exactly.
    for r in 0..t.rows {
        t.obj[t.basis[r]] = 0.0;
    }
    t.minimize(art_start)?;

    let mut x = vec![0.0; n];
    for r in 0..t.rows {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let objective = lp.objective.iter().zip(x.iter()).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        x,
        objective,
        iterations: t.pivots,
    })
}
