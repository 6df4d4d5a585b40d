//! Rational elliptic curves as weight-2 newforms: point counts a_p by
//! direct enumeration over 𝔽_p, normalized Hecke eigenvalues λ_f(n), the
//! truncated Dirichlet-inverse mollifier coefficients c_n, and the tail
//! coefficients a_n of the mollified series.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::modarith;
use crate::{Error, Result};

/// A curve y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆ with its conductor and
/// the sign of its functional equation. The sign is configuration data
/// (±1 for rational curves) and is validated numerically by the
/// two-window consistency check in `lfunctions`.
pub struct EllipticCurveForm {
    label: String,
    a_inv: [i64; 5], // a1, a2, a3, a4, a6
    conductor: u64,
    epsilon: f64,
    ap_cache: Mutex<HashMap<u64, i64>>,
}

impl EllipticCurveForm {
    pub fn new(label: &str, a_inv: [i64; 5], conductor: u64, epsilon: f64) -> Result<Self> {
        if epsilon != 1.0 && epsilon != -1.0 {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if conductor == 0 {
            return Err(Error::InvalidParameters("conductor must be positive".into()));
        }
        let curve = Self {
            label: label.to_string(),
            a_inv,
            conductor,
            epsilon,
            ap_cache: Mutex::new(HashMap::new()),
        };
        if curve.discriminant() == 0 {
            return Err(Error::SingularCurve(label.to_string()));
        }
        Ok(curve)
    }

    /// A copy of the curve with the functional-equation sign flipped;
    /// used by the sign-consistency harness.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(&self.label, self.a_inv, self.conductor, epsilon)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn a_invariants(&self) -> [i64; 5] {
        self.a_inv
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Sign of the functional equation of the untwisted L-function.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Discriminant from the standard b-invariants, in i128 to stay exact
    /// for any desk-scale coefficients.
    pub fn discriminant(&self) -> i128 {
        let [a1, a2, a3, a4, a6] = self.a_inv.map(i128::from);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// a_p = p + 1 − #E(𝔽_p), counting the point at infinity and, at bad
    /// primes, the singular point of the reduced curve once. The same
    /// count classifies bad reduction: a_p ∈ {−1, 0, 1} there.
    pub fn ap(&self, p: u64) -> i64 {
        debug_assert!(modarith::is_prime(p), "ap expects a prime, got {p}");
        if let Some(&v) = self.ap_cache.lock().unwrap().get(&p) {
            return v;
        }
        let v = if p == 2 {
            self.ap_char_two()
        } else {
            self.ap_odd(p)
        };
        self.ap_cache.lock().unwrap().insert(p, v);
        v
    }

    fn ap_char_two(&self) -> i64 {
        let [a1, a2, a3, a4, a6] = self.a_inv.map(|v| v.rem_euclid(2) as u64);
        let mut affine = 0i64;
        for x in 0..2u64 {
            for y in 0..2u64 {
                let lhs = (y * y + a1 * x * y + a3 * y) % 2;
                let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % 2;
                if lhs == rhs {
                    affine += 1;
                }
            }
        }
        3 - (affine + 1)
    }

    /// For odd p, complete the square: the y-count at each x is
    /// 1 + legendre(4x³ + b₂x² + 2b₄x + b₆), so a_p = −Σ_x legendre(·).
    fn ap_odd(&self, p: u64) -> i64 {
        let red = |v: i64| v.rem_euclid(p as i64) as u64;
        let [a1, a2, a3, a4, a6] = self.a_inv;
        let b2 = red(a1 * a1 + 4 * a2);
        let two_b4 = red(2 * (2 * a4 + a1 * a3));
        let b6 = red(a3 * a3 + 4 * a6);
        let mut is_square = vec![false; p as usize];
        for y in 0..p {
            is_square[(y * y % p) as usize] = true;
        }
        let mut sum = 0i64;
        for x in 0..p {
            let v = (((4 * x + b2) % p * x + two_b4) % p * x + b6) % p;
            if v == 0 {
                continue;
            }
            sum += if is_square[v as usize] { 1 } else { -1 };
        }
        -sum
    }

    fn lambda_prime_power(&self, p: u64, e: u32) -> f64 {
        let lp = self.ap(p) as f64 / (p as f64).sqrt();
        if self.conductor % p == 0 {
            return lp.powi(e as i32);
        }
        // Hecke recursion: λ(p^{k+1}) = λ(p)·λ(p^k) − λ(p^{k−1}).
        let (mut prev, mut cur) = (1.0f64, lp);
        for _ in 1..e {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Normalized Hecke eigenvalue λ_f(n): multiplicative, λ_f(p) = a_p/√p,
    /// with the Hecke recursion at good primes and λ_f(p^k) = λ_f(p)^k at
    /// primes dividing the conductor.
    pub fn hecke_lambda(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::ZeroArgument);
        }
        let mut lam = 1.0f64;
        for (p, e) in modarith::factorize(n) {
            lam *= self.lambda_prime_power(p, e);
        }
        Ok(lam)
    }

    /// λ_f(n) for all n ≤ n_max at once, via a smallest-prime-factor sieve.
    pub fn lambda_vector(&self, n_max: usize) -> Vec<f64> {
        let mut lam = vec![0.0f64; n_max + 1];
        if n_max >= 1 {
            lam[1] = 1.0;
        }
        if n_max < 2 {
            return lam;
        }
        let spf = smallest_prime_factor_sieve(n_max);
        for n in 2..=n_max {
            let p = spf[n] as u64;
            let mut m = n as u64;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            lam[n] = self.lambda_prime_power(p, e) * lam[m as usize];
        }
        lam
    }

    /// Mollifier coefficients c_n for n ≤ x: the Dirichlet-inverse of the
    /// eigenvalue series truncated at x. Multiplicative with c_p = −λ(p),
    /// c_{p²} = 1, c_{p^k} = 0 (k ≥ 3) at good p, and c_p = −λ(p),
    /// c_{p^k} = 0 (k ≥ 2) at p dividing the conductor. Index 0 is unused.
    pub fn mollifier_coeffs(&self, x: f64) -> Vec<f64> {
        let xi = if x < 1.0 { 0 } else { x.floor() as usize };
        let mut c = vec![0.0f64; xi + 1];
        if xi >= 1 {
            c[1] = 1.0;
        }
        if xi < 2 {
            return c;
        }
        let spf = smallest_prime_factor_sieve(xi);
        for n in 2..=xi {
            let p = spf[n] as u64;
            let mut m = n as u64;
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            let lp = self.ap(p) as f64 / (p as f64).sqrt();
            let local = if self.conductor % p == 0 {
                if e == 1 {
                    -lp
                } else {
                    0.0
                }
            } else {
                match e {
                    1 => -lp,
                    2 => 1.0,
                    _ => 0.0,
                }
            };
            c[n] = local * c[m as usize];
        }
        c
    }

    /// Tail coefficients a_n = Σ_{m | n, m ≤ x} λ_f(n/m)·c_m for n ≤ n_max.
    /// Below the truncation the convolution telescopes: a_1 = 1 and
    /// a_n = 0 for 2 ≤ n ≤ x.
    pub fn tail_coeffs(&self, x: f64, n_max: usize) -> Vec<f64> {
        let c = self.mollifier_coeffs(x);
        let lam = self.lambda_vector(n_max);
        let mut a = vec![0.0f64; n_max + 1];
        for (m, &cm) in c.iter().enumerate().skip(1).take(n_max) {
            if cm == 0.0 {
                continue;
            }
            for j in 1..=(n_max / m) {
                a[j * m] += lam[j] * cm;
            }
        }
        a
    }
}

impl std::fmt::Debug for EllipticCurveForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EllipticCurveForm")
            .field("label", &self.label)
            .field("a_inv", &self.a_inv)
            .field("conductor", &self.conductor)
            .field("epsilon", &self.epsilon)
            .finish()
    }
}

fn smallest_prime_factor_sieve(n_max: usize) -> Vec<u32> {
    let mut spf: Vec<u32> = vec![0; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Parses a whitespace-separated curve table. The first non-comment line
/// names the columns; `label`, `a1`, `a2`, `a3`, `a4`, `a6`, `conductor`
/// and `epsilon` are all required, in any order. Lines starting with `#`
/// are skipped.
pub fn parse_curve_table(text: &str) -> Result<Vec<EllipticCurveForm>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidParameters("curve table is empty".into()))?;
    let columns: Vec<&str> = header.split_whitespace().collect();
    let col = |name: &str| -> Result<usize> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::InvalidParameters(format!("curve table lacks column '{name}'")))
    };
    let (i_label, i_cond, i_eps) = (col("label")?, col("conductor")?, col("epsilon")?);
    let i_a = [col("a1")?, col("a2")?, col("a3")?, col("a4")?, col("a6")?];

    let mut curves = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != columns.len() {
            return Err(Error::InvalidParameters(format!(
                "curve row '{line}' has {} fields, expected {}",
                fields.len(),
                columns.len()
            )));
        }
        let int = |s: &str| -> Result<i64> {
            s.parse()
                .map_err(|_| Error::InvalidParameters(format!("bad integer '{s}' in curve table")))
        };
        let mut a_inv = [0i64; 5];
        for (slot, &idx) in a_inv.iter_mut().zip(&i_a) {
            *slot = int(fields[idx])?;
        }
        let conductor = int(fields[i_cond])? as u64;
        let epsilon = int(fields[i_eps])? as f64;
        curves.push(EllipticCurveForm::new(
            fields[i_label],
            a_inv,
            conductor,
            epsilon,
        )?);
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve_32a() -> EllipticCurveForm {
        // y² = x³ − x
        EllipticCurveForm::new("32a", [0, 0, 0, -1, 0], 32, 1.0).unwrap()
    }

    fn curve_37a() -> EllipticCurveForm {
        // y² + y = x³ − x
        EllipticCurveForm::new("37a", [0, 0, 1, -1, 0], 37, -1.0).unwrap()
    }

    fn curve_11a() -> EllipticCurveForm {
        EllipticCurveForm::new("11a", [0, -1, 1, -10, -20], 11, 1.0).unwrap()
    }

    /// Naive double-loop point count, independent of the Legendre-sum path.
    fn ap_naive(curve: &EllipticCurveForm, p: u64) -> i64 {
        let [a1, a2, a3, a4, a6] = curve.a_invariants().map(|v| v.rem_euclid(p as i64) as u64);
        let mut affine = 0u64;
        for x in 0..p {
            for y in 0..p {
                let lhs = (y * y + a1 * x % p * y + a3 * y) % p;
                let rhs = ((x * x % p * x) % p + a2 * x % p * x % p + a4 * x + a6) % p;
                if lhs == rhs {
                    affine += 1;
                }
            }
        }
        p as i64 + 1 - (affine as i64 + 1)
    }

    #[test]
    fn ap_examples() {
        let e = curve_32a();
        assert_eq!(e.ap(5), -2); // 8 points including infinity
        assert_eq!(e.ap(3), 0);
        assert_eq!(e.ap(2), 0); // additive reduction at the bad prime
        let f = curve_37a();
        assert!(f.ap(37).abs() <= 1); // multiplicative reduction
        let g = curve_11a();
        assert!(g.ap(11).abs() <= 1);
    }

    #[test]
    fn ap_matches_naive_count() {
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            for e in [curve_32a(), curve_37a(), curve_11a()] {
                assert_eq!(e.ap(p), ap_naive(&e, p), "curve {} at p = {p}", e.label());
            }
        }
    }

    #[test]
    fn hasse_bound() {
        let curves = [curve_32a(), curve_37a(), curve_11a()];
        for p in (2u64..=10_000).filter(|&p| modarith::is_prime(p)) {
            for e in &curves {
                if e.conductor() % p == 0 {
                    continue;
                }
                let ap = e.ap(p);
                assert!(
                    ap * ap <= 4 * p as i64,
                    "Hasse bound fails for {} at p = {p}: a_p = {ap}",
                    e.label()
                );
            }
        }
    }

    #[test]
    fn lambda_examples() {
        let e = curve_32a();
        assert_eq!(e.hecke_lambda(1).unwrap(), 1.0);
        // λ(25) = λ(5)² − 1 = 4/5 − 1
        assert!((e.hecke_lambda(25).unwrap() - (-0.2)).abs() < 1e-14);
        assert_eq!(e.hecke_lambda(15).unwrap(), 0.0); // a_3 = 0
        assert_eq!(e.hecke_lambda(0), Err(Error::ZeroArgument));
    }

    #[test]
    fn lambda_vector_matches_pointwise() {
        for e in [curve_32a(), curve_37a()] {
            let lam = e.lambda_vector(500);
            for n in 1..=500usize {
                assert!(
                    (lam[n] - e.hecke_lambda(n as u64).unwrap()).abs() < 1e-12,
                    "λ mismatch at n = {n} for {}",
                    e.label()
                );
            }
        }
    }

    #[test]
    fn mollifier_examples() {
        let e = curve_32a();
        let c = e.mollifier_coeffs(30.0);
        assert_eq!(c[1], 1.0);
        assert!((c[5] - 2.0 / 5f64.sqrt()).abs() < 1e-14); // −λ(5) = 2/√5
        assert!((c[25] - 1.0).abs() < 1e-14);
        assert_eq!(c[8], 0.0); // 2 | N, so c vanishes at 4 and 8
        assert_eq!(c[4], 0.0);
        let tiny = e.mollifier_coeffs(0.5);
        assert_eq!(tiny.len(), 1);
    }

    #[test]
    fn tail_coefficients() {
        let e = curve_32a();
        let x = 10.0;
        let a = e.tail_coeffs(x, 200);
        assert!((a[1] - 1.0).abs() < 1e-14);
        for n in 2..=10 {
            assert!(a[n].abs() < 1e-12, "a_{n} = {} should vanish", a[n]);
        }
        // next prime past the truncation: only divisors 1 and p survive
        assert!((a[11] - e.hecke_lambda(11).unwrap()).abs() < 1e-12);
        assert!((a[13] - e.hecke_lambda(13).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn convolution_identity() {
        for e in [curve_32a(), curve_37a()] {
            for x in [10.0f64, 50.0, 200.0] {
                let c = e.mollifier_coeffs(x);
                let xi = x as u64;
                for n in 1..=xi {
                    let mut sum = 0.0;
                    for m in 1..=n {
                        if n % m == 0 && m <= xi {
                            sum += e.hecke_lambda(n / m).unwrap() * c[m as usize];
                        }
                    }
                    let expected = if n == 1 { 1.0 } else { 0.0 };
                    assert!(
                        (sum - expected).abs() < 1e-12,
                        "convolution fails at n = {n}, X = {x}, curve {}",
                        e.label()
                    );
                }
            }
        }
    }

    #[test]
    fn coefficient_growth_bounds() {
        let divisor_count = |n: u64| modarith::divisors(n).len() as f64;
        for e in [curve_32a(), curve_37a()] {
            let c = e.mollifier_coeffs(200.0);
            for n in 1..=200u64 {
                assert!(c[n as usize].abs() <= divisor_count(n) + 1e-9);
            }
            let a = e.tail_coeffs(50.0, 400);
            for n in 1..=400u64 {
                let bound: f64 = modarith::divisors(n).iter().map(|&m| divisor_count(m)).sum();
                assert!(a[n as usize].abs() <= bound + 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_curves() {
        assert_eq!(
            EllipticCurveForm::new("cusp", [0, 0, 0, 0, 0], 1, 1.0),
            Err(Error::SingularCurve("cusp".into()))
        );
        assert_eq!(
            EllipticCurveForm::new("32a", [0, 0, 0, -1, 0], 32, 0.5),
            Err(Error::InvalidEpsilon(0.5))
        );
    }

    #[test]
    fn curve_table_round_trip() {
        let text = "\
# sample curves
label a1 a2 a3 a4 a6 conductor epsilon
32a 0 0 0 -1 0 32 1
37a 0 0 1 -1 0 37 -1
";
        let curves = parse_curve_table(text).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].label(), "32a");
        assert_eq!(curves[0].conductor(), 32);
        assert_eq!(curves[1].epsilon(), -1.0);
        assert!(parse_curve_table("label a1\n").is_err());
        assert!(parse_curve_table("").is_err());
    }

    proptest! {
        #[test]
        fn lambda_is_multiplicative(m in 1u64..400, n in 1u64..400) {
            prop_assume!(modarith::gcd(m, n) == 1);
            let e = curve_37a();
            let lhs = e.hecke_lambda(m * n).unwrap();
            let rhs = e.hecke_lambda(m).unwrap() * e.hecke_lambda(n).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}

impl PartialEq for EllipticCurveForm {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
            && self.a_inv == other.a_inv
            && self.conductor == other.conductor
            && self.epsilon == other.epsilon
    }
}
