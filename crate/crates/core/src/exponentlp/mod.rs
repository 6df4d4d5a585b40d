//! Exact rational linear programming over named exponent variables.
//!
//! Programs are lists of constraints coeffs·x ≤ rhs with one variable to
//! maximize; every coefficient is a `BigRational` and no floating point
//! enters this module. [`parse_program`] reads the small constraint
//! grammar (linear expressions, chained `<=`, one `maximize` directive),
//! [`solve`] maximizes by exhaustive vertex enumeration, and
//! [`chinta_program`] is the built-in six-part exponent system whose
//! optimum is γ = 7/52.

mod parse;
mod solve;

pub use parse::{parse_program, ParseError};
pub use solve::{solve, Solution, SolveError};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A single constraint coeffs · x ≤ rhs, with coefficients aligned to the
/// owning program's variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

/// A maximization program over named variables with rational data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentProgram {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
    objective: usize,
}

impl ExponentProgram {
    /// New empty program; `objective` indexes into `variables`.
    pub fn new(variables: Vec<String>, objective: usize) -> Self {
        assert!(objective < variables.len(), "objective index out of range");
        Self {
            variables,
            constraints: Vec::new(),
            objective,
        }
    }

    pub fn push_constraint(&mut self, coeffs: Vec<BigRational>, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.variables.len(), "coefficient arity");
        self.constraints.push(Constraint { coeffs, rhs });
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective_index(&self) -> usize {
        self.objective
    }

    pub fn objective_name(&self) -> &str {
        &self.variables[self.objective]
    }

    /// Canonical text form: one `maximize` line, then one constraint per
    /// line with terms in variable order. `parse_program` inverts this.
    pub fn to_text(&self) -> String {
        let mut out = format!("maximize {}\n", self.objective_name());
        for c in &self.constraints {
            let mut line = String::new();
            for (i, coef) in c.coeffs.iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                if line.is_empty() {
                    if coef.is_negative() {
                        line.push('-');
                    }
                } else if coef.is_negative() {
                    line.push_str(" - ");
                } else {
                    line.push_str(" + ");
                }
                let mag = coef.abs();
                if !mag.is_one() {
                    line.push_str(&format!("{mag}*"));
                }
                line.push_str(&self.variables[i]);
            }
            if line.is_empty() {
                line.push('0');
            }
            out.push_str(&format!("{line} <= {}\n", c.rhs));
        }
        out
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The built-in exponent system over (γ, a, b, c), maximizing γ:
///
/// ```text
/// γ − b/2 ≤ 0                    γ + c/2 − 1 ≤ 0
/// a + 1 ≤ c ≤ 2                  3b/4 − 3a/8 − 1/16 + γ ≤ 0
/// 3b/4 − 3a/8 + γ/2 ≤ 0          0 ≤ 2b ≤ a ≤ 1
/// ```
///
/// Its exact optimum is γ = 7/52, attained at
/// (γ, a, b, c) = (7/52, 19/26, 7/26, 45/26).
pub fn chinta_program() -> ExponentProgram {
    let names = ["gamma", "a", "b", "c"].map(String::from).to_vec();
    let mut p = ExponentProgram::new(names, 0);
    // γ − b/2 ≤ 0
    p.push_constraint(vec![rat(1, 1), rat(0, 1), rat(-1, 2), rat(0, 1)], rat(0, 1));
    // γ + c/2 − 1 ≤ 0
    p.push_constraint(vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 2)], rat(1, 1));
    // a + 1 ≤ c
    p.push_constraint(vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(-1, 1)], rat(-1, 1));
    // c ≤ 2
    p.push_constraint(vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)], rat(2, 1));
    // 3b/4 − 3a/8 − 1/16 + γ ≤ 0
    p.push_constraint(
        vec![rat(1, 1), rat(-3, 8), rat(3, 4), rat(0, 1)],
        rat(1, 16),
    );
    // 3b/4 − 3a/8 + γ/2 ≤ 0
    p.push_constraint(vec![rat(1, 2), rat(-3, 8), rat(3, 4), rat(0, 1)], rat(0, 1));
    // 0 ≤ 2b
    p.push_constraint(vec![rat(0, 1), rat(0, 1), rat(-2, 1), rat(0, 1)], rat(0, 1));
    // 2b ≤ a
    p.push_constraint(vec![rat(0, 1), rat(-1, 1), rat(2, 1), rat(0, 1)], rat(0, 1));
    // a ≤ 1
    p.push_constraint(vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)], rat(1, 1));
    p
}

/// Exponent of the dual-sum envelope at window parameter k:
/// b(1 − 1/k) − a(1/2 − 1/(2k)) − 1/(4k) + γ/2 + max(γ/2, 1/(4k)).
/// At k = 4 this splits into the two branches 3b/4 − 3a/8 − 1/16 + γ and
/// 3b/4 − 3a/8 + γ/2; the branches balance when γ/2 = 1/(4k).
pub fn s2_exponent_envelope(
    k: u64,
    a: &BigRational,
    b: &BigRational,
    gamma: &BigRational,
) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::InvalidParameters(format!(
            "window parameter k must be at least 2, got {k}"
        )));
    }
    let one = BigRational::one();
    let kk = BigRational::from_integer(BigInt::from(k));
    let half = rat(1, 2);
    let quarter_k = (&one / &kk) * rat(1, 4); // 1/(4k)
    let t1 = b * (&one - &one / &kk);
    let t2 = a * (&half - &half / &kk);
    let half_gamma = gamma * &half;
    let tail = if half_gamma >= quarter_k {
        half_gamma.clone()
    } else {
        quarter_k.clone()
    };
    Ok(t1 - t2 - quarter_k + half_gamma + tail)
}
