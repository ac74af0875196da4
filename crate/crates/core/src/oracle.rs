//! Exact linear-feasibility oracle for the transportation slice
//! `{q(a,b) >= 0 : row sums = pi1, column sums = pi2,
//! anti-diagonal sums (c = s-a-b) = pi3}`.
//!
//! Decides compatibility of arbitrary triples (decreasing or not) by
//! phase-one simplex over exact rationals with Bland's anti-cycling rule.
//! Feasible instances come with a witness coupling; infeasible ones with a
//! Farkas-style dual certificate that can be re-checked independently.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::couple::Coupling;
use crate::dist::{Dist, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("bad oracle input: {0}")]
    BadInput(String),
    #[error("certificate check requires an infeasible result")]
    WrongVariant,
}

/// Which marginal constraint a dual component multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintLabel {
    /// Row sum over `b` for fixed first coordinate `a`.
    Row(usize),
    /// Column sum over `a` for fixed second coordinate `b`.
    Col(usize),
    /// Anti-diagonal sum for fixed third coordinate `c = s - a - b`.
    Diag(usize),
}

impl fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintLabel::Row(a) => write!(f, "row a={a}"),
            ConstraintLabel::Col(b) => write!(f, "col b={b}"),
            ConstraintLabel::Diag(c) => write!(f, "diag c={c}"),
        }
    }
}

/// Exact dual vector `y` with `y^T A >= 0` componentwise and `y^T rhs < 0`,
/// proving the constraint system has no non-negative solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub components: Vec<(ConstraintLabel, Rat)>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, value) in &self.components {
            writeln!(f, "{label}: {value}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible { witness: Coupling },
    Infeasible { certificate: Certificate },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }
}

/// The constraint system of one oracle instance.
struct System {
    p: usize,
    s: usize,
    /// Variable index -> `(a, b)` with `0 <= s - a - b <= p-1`.
    vars: Vec<(usize, usize)>,
    /// Kept constraints; the last anti-diagonal (`c = p-1`) is dropped as
    /// the combination `sum(rows) - sum(other diagonals)`.
    labels: Vec<ConstraintLabel>,
    rhs: Vec<Rat>,
}

impl System {
    fn build(d1: &Dist, d2: &Dist, d3: &Dist, s: usize) -> Result<System, OracleError> {
        let p = d1.p();
        if d2.p() != p || d3.p() != p {
            return Err(OracleError::BadInput(format!(
                "alphabet mismatch: {} / {} / {}",
                d1.p(),
                d2.p(),
                d3.p()
            )));
        }
        if s > 3 * (p - 1) {
            return Err(OracleError::BadInput(format!(
                "sum {s} exceeds 3(p-1) = {}",
                3 * (p - 1)
            )));
        }
        let mut vars = Vec::new();
        for a in 0..p {
            for b in 0..p {
                if s >= a + b && s - a - b < p {
                    vars.push((a, b));
                }
            }
        }
        let mut labels = Vec::new();
        let mut rhs = Vec::new();
        for a in 0..p {
            labels.push(ConstraintLabel::Row(a));
            rhs.push(d1.mass(a).clone());
        }
        for b in 0..p {
            labels.push(ConstraintLabel::Col(b));
            rhs.push(d2.mass(b).clone());
        }
        for c in 0..p - 1 {
            labels.push(ConstraintLabel::Diag(c));
            rhs.push(d3.mass(c).clone());
        }
        Ok(System {
            p,
            s,
            vars,
            labels,
            rhs,
        })
    }

    /// Coefficient of variable `var` in constraint `row` (always 0 or 1).
    fn coeff(&self, row: usize, var: usize) -> bool {
        let (a, b) = self.vars[var];
        match self.labels[row] {
            ConstraintLabel::Row(r) => a == r,
            ConstraintLabel::Col(c) => b == c,
            ConstraintLabel::Diag(d) => self.s - a - b == d,
        }
    }
}

/// Decides exactly whether a joint distribution with the three prescribed
/// coordinate marginals and constant coordinate sum `s` exists. No
/// monotonicity is assumed of the inputs.
pub fn compatible_oracle(
    d1: &Dist,
    d2: &Dist,
    d3: &Dist,
    s: usize,
) -> Result<FeasibilityResult, OracleError> {
    let sys = System::build(d1, d2, d3, s)?;
    let n = sys.vars.len();
    let m = sys.labels.len();

    // Phase-one tableau: columns are the transport variables, then one
    // artificial per constraint, then the right-hand side.
    let width = n + m + 1;
    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![Rat::zero(); width];
        for (j, cell) in row.iter_mut().enumerate().take(n) {
            if sys.coeff(i, j) {
                *cell = Rat::one();
            }
        }
        row[n + i] = Rat::one();
        row[width - 1] = sys.rhs[i].clone();
        tab.push(row);
    }
    // Reduced costs for minimising the artificial total, with the artificial
    // basis priced out; `obj` tracks the current infeasibility.
    let mut cost = vec![Rat::zero(); width - 1];
    let mut obj = Rat::zero();
    for (j, c) in cost.iter_mut().enumerate().take(n) {
        for row in &tab {
            *c -= &row[j];
        }
    }
    for row in &tab {
        obj += &row[width - 1];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Bland: the entering column is the lowest index with negative cost.
    while let Some(enter) = cost.iter().position(|c| c.is_negative()) {
        // Ratio test; ties broken by the smallest basic variable index.
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pivot_row, _) = leave.expect("phase-one objective is bounded below");

        let pivot = tab[pivot_row][enter].clone();
        for cell in tab[pivot_row].iter_mut() {
            *cell /= &pivot;
        }
        let pivot_vals = tab[pivot_row].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != pivot_row && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (cell, pv) in row.iter_mut().zip(&pivot_vals) {
                    *cell -= &factor * pv;
                }
            }
        }
        let factor = cost[enter].clone();
        if !factor.is_zero() {
            for (c, pv) in cost.iter_mut().zip(&pivot_vals) {
                *c -= &factor * pv;
            }
            // The objective row transforms like any other: z += r_e * theta.
            obj += &factor * &pivot_vals[width - 1];
        }
        basis[pivot_row] = enter;
    }

    if obj.is_zero() {
        let mut entries: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();
        for (i, &var) in basis.iter().enumerate() {
            if var < n && tab[i][width - 1].is_positive() {
                let (a, b) = sys.vars[var];
                entries.insert((a, b, sys.s - a - b), tab[i][width - 1].clone());
            }
        }
        Ok(FeasibilityResult::Feasible {
            witness: Coupling::new(sys.p, sys.s, entries),
        })
    } else {
        // Phase-one duals: y_i = 1 - reduced cost of artificial i. They
        // satisfy y^T A <= 0 and y^T b > 0; negate for the stated convention.
        let components = sys
            .labels
            .iter()
            .zip(cost[n..].iter())
            .map(|(label, rc)| (*label, rc - Rat::one()))
            .collect();
        Ok(FeasibilityResult::Infeasible {
            certificate: Certificate { components },
        })
    }
}

/// Re-checks an infeasibility certificate against the instance from scratch:
/// the dual must satisfy `y^T A >= 0` on every variable column and
/// `y^T rhs < 0` exactly.
pub fn check_certificate(
    result: &FeasibilityResult,
    d1: &Dist,
    d2: &Dist,
    d3: &Dist,
    s: usize,
) -> Result<bool, OracleError> {
    let FeasibilityResult::Infeasible { certificate } = result else {
        return Err(OracleError::WrongVariant);
    };
    let sys = System::build(d1, d2, d3, s)?;
    if certificate.components.len() != sys.labels.len() {
        return Ok(false);
    }
    let aligned = certificate
        .components
        .iter()
        .zip(&sys.labels)
        .all(|((label, _), expect)| label == expect);
    if !aligned {
        return Ok(false);
    }
    let y: Vec<&Rat> = certificate.components.iter().map(|(_, v)| v).collect();
    for j in 0..sys.vars.len() {
        let mut dot = Rat::zero();
        for (i, &yi) in y.iter().enumerate() {
            if sys.coeff(i, j) {
                dot += yi;
            }
        }
        if dot.is_negative() {
            return Ok(false);
        }
    }
    let rhs_dot: Rat = y.iter().zip(&sys.rhs).map(|(&yi, b)| yi * b).sum();
    Ok(rhs_dot.is_negative())
}
