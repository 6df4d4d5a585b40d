//! Kloosterman sums S(a, b; q) at prime modulus: a value table for
//! S(1, m; q), complete moment sums of products of Kloosterman sums over
//! the nonzero shift h, and the diagonal/off-diagonal tuple accounting
//! behind the moment bound.
//!
//! The sums are real, so the table stores f64 values accumulated from
//! cosines; [`kloosterman_complex`] keeps the defining complex evaluation
//! around as an independent cross-check.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::modarith::{self, PrimeModulus};
use crate::{Error, Result};

/// Precomputed S(1, m; q) for m = 0..q−1. Since S(a, b; q) = S(1, ab; q)
/// whenever (a, q) = 1, this table answers every Kloosterman-sum query at
/// the modulus in O(1).
pub struct KloostermanTable {
    modulus: Arc<PrimeModulus>,
    values: Vec<f64>,
}

/// Inverse table mod prime q: inv[x] · x ≡ 1 for 1 ≤ x < q, built in O(q).
fn inverse_table(q: u64) -> Vec<u64> {
    let mut inv = vec![0u64; q as usize];
    if q > 1 {
        inv[1] = 1;
    }
    for x in 2..q {
        inv[x as usize] = (q - (q / x) * inv[(q % x) as usize] % q) % q;
    }
    inv
}

impl KloostermanTable {
    /// Builds the full table in O(q²) additions after O(q) setup.
    pub fn new(modulus: Arc<PrimeModulus>) -> Self {
        let q = modulus.q();
        let cos: Vec<f64> = (0..q).map(|k| (TAU * k as f64 / q as f64).cos()).collect();
        let inv = inverse_table(q);
        let mut values = vec![0.0f64; q as usize];
        for m in 0..q {
            let mut acc = 0.0;
            for x in 1..q {
                acc += cos[((x + m * inv[x as usize]) % q) as usize];
            }
            values[m as usize] = acc;
        }
        Self { modulus, values }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn modulus_arc(&self) -> Arc<PrimeModulus> {
        Arc::clone(&self.modulus)
    }

    /// S(1, m; q) by lookup.
    pub fn s1(&self, m: u64) -> f64 {
        self.values[(m % self.modulus.q()) as usize]
    }

    /// S(a, b; q) for arbitrary integers. Uses S(a, b) = S(1, ab) when
    /// (a, q) = 1; when exactly one argument vanishes the sum degenerates
    /// to a Ramanujan sum, which equals −1 at prime modulus, and S(0, 0)
    /// counts the q − 1 units.
    pub fn s(&self, a: i64, b: i64) -> f64 {
        let q = self.modulus.q();
        let a = self.modulus.reduce(a);
        let b = self.modulus.reduce(b);
        if a == 0 && b == 0 {
            return (q - 1) as f64;
        }
        if a == 0 || b == 0 {
            return -1.0;
        }
        self.s1(a * b % q)
    }
}

/// Defining evaluation Σ_{x=1}^{q−1} e((ax + b·x̄)/q) in complex
/// arithmetic, with x̄ computed by Fermat inversion. Independent of the
/// cosine fast path; used to cross-check it.
pub fn kloosterman_complex(a: i64, b: i64, q: u64) -> Complex64 {
    let qi = q as i64;
    let a = (((a % qi) + qi) % qi) as u64;
    let b = (((b % qi) + qi) % qi) as u64;
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 1..q {
        let xinv = modarith::mod_pow(x, q - 2, q);
        let phase = (a * x % q + b * xinv % q) % q;
        acc += Complex64::from_polar(1.0, TAU * phase as f64 / q as f64);
    }
    acc
}

/// Whether every component of the tuple occurs at least twice.
pub fn in_d(tuple: &[u64]) -> Result<bool> {
    if tuple.is_empty() || tuple.len() % 2 != 0 {
        return Err(Error::TupleLength(tuple.len()));
    }
    Ok(tuple
        .iter()
        .all(|r| tuple.iter().filter(|s| *s == r).count() >= 2))
}

/// Σ*_{h mod q} S(h, r₁; q) ⋯ S(h, r_{2k}; q), summed exactly over the
/// nonzero residues h.
pub fn moment_sum(rs: &[u64], table: &KloostermanTable) -> Result<f64> {
    if rs.is_empty() || rs.len() % 2 != 0 {
        return Err(Error::TupleLength(rs.len()));
    }
    let q = table.modulus().q();
    for &r in rs {
        if r == 0 || r >= q {
            return Err(Error::InvalidParameters(format!(
                "tuple component {r} outside 1..{q}"
            )));
        }
    }
    let mut total = 0.0f64;
    for h in 1..q {
        let mut prod = 1.0f64;
        for &r in rs {
            prod *= table.s1(h * r % q);
        }
        total += prod;
    }
    Ok(total)
}

/// Weighted moment sum over all 2k-tuples from 1..=R, split into the
/// diagonal set (every component repeated) and its complement, with the
/// two bound terms L₁^k·q^(k+1) and L₁^(2k)·q^(k+1/2) for comparison.
#[derive(Debug, Clone)]
pub struct Lemma41Report {
    pub q: u64,
    pub r_max: usize,
    pub k: usize,
    /// L₁ = Σ_r |z_r|.
    pub l1: f64,
    pub lhs_total: f64,
    pub lhs_diagonal: f64,
    pub lhs_offdiagonal: f64,
    pub diagonal_tuples: u64,
    pub offdiagonal_tuples: u64,
    pub bound_diagonal: f64,
    pub bound_offdiagonal: f64,
    pub ratio_diagonal: f64,
    pub ratio_offdiagonal: f64,
}

fn factorial(n: u64) -> u64 {
    (2..=n).product::<u64>().max(1)
}

/// Full enumeration of the weighted 2k-fold moment sum. Weights are given
/// per residue r = 1..=R as `z[r-1]`; the sequence must satisfy the
/// moment condition L_j ≤ L₁ for 2 ≤ j ≤ 2k with L₁ ≥ 1, and R < q.
///
/// Tuples are enumerated as multisets (the summand is symmetric in the
/// components), so the cost is C(R+2k−1, 2k) moment sums rather than
/// R^(2k).
pub fn lemma41_report(z: &[f64], k: usize, table: &KloostermanTable) -> Result<Lemma41Report> {
    let q = table.modulus().q();
    let r_max = z.len();
    if k == 0 {
        return Err(Error::InvalidParameters("k must be at least 1".into()));
    }
    if r_max == 0 {
        return Err(Error::InvalidParameters("empty weight sequence".into()));
    }
    if r_max as u64 >= q {
        return Err(Error::RangeTooLarge { r: r_max, q });
    }
    let abs: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    let l1: f64 = abs.iter().sum();
    if l1 < 1.0 - 1e-12 {
        return Err(Error::MomentCondition(format!("L1 = {l1} < 1")));
    }
    for j in 2..=(2 * k) {
        let lj: f64 = abs.iter().map(|v| v.powi(j as i32)).sum();
        if lj > l1 + 1e-9 {
            return Err(Error::MomentCondition(format!(
                "L{j} = {lj} exceeds L1 = {l1}"
            )));
        }
    }

    let len = 2 * k;
    let fact_len = factorial(len as u64);
    let mut lhs_diag = 0.0f64;
    let mut lhs_off = 0.0f64;
    let mut count_diag = 0u64;
    let mut count_off = 0u64;

    // Nondecreasing tuples = multisets over {1..R}.
    let mut tuple = vec![1u64; len];
    loop {
        // multiplicity = (2k)! / prod(count_v!)
        let mut mult = fact_len;
        let mut weight = 1.0f64;
        let mut diagonal = true;
        let mut i = 0;
        while i < len {
            let mut j = i;
            while j < len && tuple[j] == tuple[i] {
                j += 1;
            }
            let run = (j - i) as u64;
            mult /= factorial(run);
            if run < 2 {
                diagonal = false;
            }
            weight *= abs[(tuple[i] - 1) as usize].powi(run as i32);
            i = j;
        }
        let contrib = mult as f64 * weight * moment_sum(&tuple, table)?.abs();
        if diagonal {
            lhs_diag += contrib;
            count_diag += mult;
        } else {
            lhs_off += contrib;
            count_off += mult;
        }

        // next nondecreasing tuple
        let mut pos = len;
        while pos > 0 && tuple[pos - 1] == r_max as u64 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        let v = tuple[pos - 1] + 1;
        for slot in tuple.iter_mut().skip(pos - 1) {
            *slot = v;
        }
    }

    let qf = q as f64;
    let bound_diag = l1.powi(k as i32) * qf.powi(k as i32 + 1);
    let bound_off = l1.powi(2 * k as i32) * qf.powf(k as f64 + 0.5);
    Ok(Lemma41Report {
        q,
        r_max,
        k,
        l1,
        lhs_total: lhs_diag + lhs_off,
        lhs_diagonal: lhs_diag,
        lhs_offdiagonal: lhs_off,
        diagonal_tuples: count_diag,
        offdiagonal_tuples: count_off,
        bound_diagonal: bound_diag,
        bound_offdiagonal: bound_off,
        ratio_diagonal: lhs_diag / bound_diag,
        ratio_offdiagonal: lhs_off / bound_off,
    })
}
