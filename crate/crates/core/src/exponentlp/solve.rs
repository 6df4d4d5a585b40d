//! Exact LP maximization by exhaustive vertex enumeration.
//!
//! Every n-subset of constraints with an invertible normal matrix yields
//! a candidate vertex; feasible candidates are ranked by objective value
//! with lexicographically smallest witness as the tie-break. Boundedness
//! in the objective direction is certified separately: the objective
//! vector must be a nonnegative combination of at most n constraint
//! normals (conic Carathéodory), otherwise the program is unbounded.
//! Sound and complete whenever the constraint normals span the variable
//! space; the degenerate no-vertex case is reported as `NotPointed`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ExponentProgram;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    NoConstraints,
    Infeasible,
    Unbounded,
    /// The constraint normals do not span the variable space: the feasible
    /// region contains lines, so it has no vertices to enumerate. Add
    /// bounds on the unconstrained directions.
    NotPointed,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NoConstraints => write!(f, "program has no constraints"),
            SolveError::Infeasible => write!(f, "infeasible"),
            SolveError::Unbounded => write!(f, "unbounded"),
            SolveError::NotPointed => {
                write!(f, "feasible region has no vertices (normals do not span)")
            }
        }
    }
}

impl std::error::Error for SolveError {}

/// Exact optimum and the witness vertex attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub optimum: BigRational,
    pub witness: Vec<BigRational>,
}

/// Gaussian elimination on an n×n system; `None` when singular.
fn solve_square(rows: &[&[BigRational]], rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.to_vec();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for entry in m[col].iter_mut() {
            *entry /= &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Some((0..n).map(|r| m[r][n].clone()).collect())
}

/// Solves Σ y_i · cols[i] = target exactly. Returns the unique solution
/// when the columns are independent and the system is consistent.
enum RectOutcome {
    Unique(Vec<BigRational>),
    NoUnique,
}

fn solve_columns(cols: &[&[BigRational]], target: &[BigRational]) -> RectOutcome {
    let rows = target.len();
    let k = cols.len();
    // augmented rows×(k+1) matrix
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0usize;
    let mut pivot_cols = Vec::new();
    for col in 0..k {
        let Some(p) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let pval = m[pivot_row][col].clone();
        for entry in m[pivot_row].iter_mut() {
            *entry /= &pval;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..=k {
                    let delta = &factor * &m[pivot_row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    // inconsistent: a zero row with nonzero rhs
    for r in pivot_row..rows {
        if !m[r][k].is_zero() {
            return RectOutcome::NoUnique;
        }
    }
    if pivot_cols.len() < k {
        // dependent columns: a smaller subset certifies the same cone
        return RectOutcome::NoUnique;
    }
    let mut y = vec![BigRational::zero(); k];
    for (row, &col) in pivot_cols.iter().enumerate() {
        y[col] = m[row][k].clone();
    }
    RectOutcome::Unique(y)
}

fn rank(rows: &[Vec<BigRational>], ncols: usize) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        let Some(p) = (pivot_row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let pval = m[pivot_row][col].clone();
        for entry in m[pivot_row].iter_mut() {
            *entry /= &pval;
        }
        for r in 0..nrows {
            if r != pivot_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..ncols {
                    let delta = &factor * &m[pivot_row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == nrows {
            break;
        }
    }
    pivot_row
}

fn for_each_combination(m: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return; // early exit requested
        }
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn is_feasible(p: &ExponentProgram, x: &[BigRational]) -> bool {
    p.constraints().iter().all(|c| {
        let lhs: BigRational = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        lhs <= c.rhs
    })
}

/// True iff the objective unit vector lies in the cone of constraint
/// normals, which certifies a finite maximum over any nonempty region.
fn objective_bounded(p: &ExponentProgram) -> bool {
    let n = p.variables().len();
    let mut target = vec![BigRational::zero(); n];
    target[p.objective_index()] = BigRational::one();
    let m = p.constraints().len();
    let mut bounded = false;
    for k in 1..=n.min(m) {
        if bounded {
            break;
        }
        for_each_combination(m, k, |subset| {
            let cols: Vec<&[BigRational]> = subset
                .iter()
                .map(|&i| p.constraints()[i].coeffs.as_slice())
                .collect();
            if let RectOutcome::Unique(y) = solve_columns(&cols, &target) {
                if y.iter().all(|v| !v.is_negative()) {
                    bounded = true;
                    return true;
                }
            }
            false
        });
    }
    bounded
}

/// Maximizes the objective over the feasible polytope by enumerating all
/// vertices; ties on the optimum are broken toward the lexicographically
/// smallest witness.
pub fn solve(p: &ExponentProgram) -> Result<Solution, SolveError> {
    let n = p.variables().len();
    let m = p.constraints().len();
    if n == 0 || m == 0 {
        return Err(SolveError::NoConstraints);
    }

    let mut best: Option<Solution> = None;
    for_each_combination(m, n.min(m), |subset| {
        let rows: Vec<&[BigRational]> = subset
            .iter()
            .map(|&i| p.constraints()[i].coeffs.as_slice())
            .collect();
        let rhs: Vec<BigRational> = subset
            .iter()
            .map(|&i| p.constraints()[i].rhs.clone())
            .collect();
        if let Some(x) = solve_square(&rows, &rhs) {
            if is_feasible(p, &x) {
                let value = x[p.objective_index()].clone();
                let better = match &best {
                    None => true,
                    Some(b) => value > b.optimum || (value == b.optimum && x < b.witness),
                };
                if better {
                    best = Some(Solution {
                        optimum: value,
                        witness: x,
                    });
                }
            }
        }
        false
    });

    match best {
        Some(sol) => {
            if objective_bounded(p) {
                Ok(sol)
            } else {
                Err(SolveError::Unbounded)
            }
        }
        None => {
            let coeff_rows: Vec<Vec<BigRational>> =
                p.constraints().iter().map(|c| c.coeffs.clone()).collect();
            if rank(&coeff_rows, n) < n {
                Err(SolveError::NotPointed)
            } else {
                Err(SolveError::Infeasible)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{chinta_program, parse_program};
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn trivial_box() {
        let p = parse_program("maximize x\nx <= 1\n").unwrap();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.optimum, r(1, 1));
        assert_eq!(sol.witness, vec![r(1, 1)]);
    }

    #[test]
    fn unbounded_detected() {
        let p = parse_program("maximize x\n-x <= 0\n").unwrap();
        assert_eq!(solve(&p), Err(SolveError::Unbounded));
    }

    #[test]
    fn infeasible_detected() {
        let p = parse_program("maximize x\nx <= 0\n-x <= -1\n").unwrap();
        assert_eq!(solve(&p), Err(SolveError::Infeasible));
    }

    #[test]
    fn not_pointed_detected() {
        // y is unconstrained, so the region is a slab with no vertex
        let p = parse_program("maximize x\nx + 0*y <= 1\n-x <= 0\n").unwrap();
        assert_eq!(solve(&p), Err(SolveError::NotPointed));
    }

    #[test]
    fn two_dimensional_vertex() {
        let p = parse_program("maximize x\nx + y <= 2\nx - y <= 0\n-y <= 0\n").unwrap();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.optimum, r(1, 1));
        assert_eq!(sol.witness, vec![r(1, 1), r(1, 1)]);
    }

    #[test]
    fn builtin_optimum_is_7_over_52() {
        let p = chinta_program();
        let sol = solve(&p).unwrap();
        assert_eq!(sol.optimum, r(7, 52));
        assert_eq!(
            sol.witness,
            vec![r(7, 52), r(19, 26), r(7, 26), r(45, 26)]
        );
    }

    #[test]
    fn dropping_a_binding_constraint_relaxes_the_optimum() {
        let p = chinta_program();
        let mut relaxed = ExponentProgram::new(p.variables().to_vec(), p.objective_index());
        for (i, c) in p.constraints().iter().enumerate() {
            if i == 4 {
                continue; // the 3b/4 − 3a/8 − 1/16 + γ ≤ 0 row
            }
            relaxed.push_constraint(c.coeffs.clone(), c.rhs.clone());
        }
        let sol = solve(&relaxed).unwrap();
        assert!(sol.optimum >= r(7, 52));
        assert!(sol.optimum > r(7, 52), "relaxation should strictly improve here");
    }

    #[test]
    fn row_scaling_invariance() {
        let p = chinta_program();
        let base = solve(&p).unwrap();
        let scales = [r(2, 1), r(1, 3), r(7, 5), r(100, 1), r(3, 2), r(1, 7), r(5, 2), r(9, 4), r(11, 13)];
        let mut scaled = ExponentProgram::new(p.variables().to_vec(), p.objective_index());
        for (c, s) in p.constraints().iter().zip(scales.iter()) {
            let coeffs = c.coeffs.iter().map(|v| v * s).collect();
            scaled.push_constraint(coeffs, &c.rhs * s);
        }
        let sol = solve(&scaled).unwrap();
        assert_eq!(sol, base);
    }

    #[test]
    fn random_feasible_points_never_beat_the_optimum() {
        let p = chinta_program();
        let sol = solve(&p).unwrap();
        // deterministic pseudo-random convex combinations of feasible vertices
        let mut vertices: Vec<Vec<BigRational>> = Vec::new();
        let n = p.variables().len();
        let m = p.constraints().len();
        for_each_combination(m, n, |subset| {
            let rows: Vec<&[BigRational]> = subset
                .iter()
                .map(|&i| p.constraints()[i].coeffs.as_slice())
                .collect();
            let rhs: Vec<BigRational> = subset
                .iter()
                .map(|&i| p.constraints()[i].rhs.clone())
                .collect();
            if let Some(x) = solve_square(&rows, &rhs) {
                if is_feasible(&p, &x) {
                    vertices.push(x);
                }
            }
            false
        });
        assert!(!vertices.is_empty());
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let weights: Vec<BigRational> = (0..vertices.len())
                .map(|_| BigRational::from_integer(BigInt::from(next() % 10)))
                .collect();
            let total: BigRational = weights.iter().cloned().sum();
            if total.is_zero() {
                continue;
            }
            let mut point = vec![BigRational::zero(); n];
            for (vertex, w) in vertices.iter().zip(&weights) {
                for (pi, vi) in point.iter_mut().zip(vertex) {
                    *pi += vi * w;
                }
            }
            for pi in point.iter_mut() {
                *pi /= &total;
            }
            assert!(is_feasible(&p, &point));
            assert!(point[p.objective_index()] <= sol.optimum);
        }
    }
}
