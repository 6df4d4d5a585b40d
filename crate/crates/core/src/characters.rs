//! Dirichlet characters of prime modulus and their Galois orbits.
//!
//! A character is stored as its index t against the fixed primitive root:
//! χ(g^k) = e^(2πi·t·k/(q−1)). The Galois orbit of χ is {χ^j : (j, m) = 1}
//! with m the order of χ. The module provides the orbit average χ_av both
//! by its closed rational formula μ(ord(n^d))/φ(ord(n^d)) and by brute
//! force over orbit members, Gauss sums, root numbers ε(f⊗χ), the twisted
//! orbit average χ̃_av in its defining form and in its Kloosterman-sum
//! form, and the exact L¹ mass of χ_av.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::hecke::EllipticCurveForm;
use crate::kloosterman::KloostermanTable;
use crate::modarith::{self, PrimeModulus};
use crate::{Error, Result};

/// A Dirichlet character mod prime q, identified by its index against the
/// smallest primitive root.
#[derive(Clone)]
pub struct DirichletCharacter {
    modulus: Arc<PrimeModulus>,
    index: u64,
}

impl DirichletCharacter {
    /// Character with χ(g) = e^(2πi·index/(q−1)); the index is reduced mod
    /// q − 1. Index 0 is the trivial character.
    pub fn new(modulus: Arc<PrimeModulus>, index: u64) -> Self {
        let index = index % modulus.group_order();
        Self { modulus, index }
    }

    /// Canonical representative of order (q−1)/d: the character with
    /// index d. Requires d | q−1.
    pub fn from_divisor(modulus: Arc<PrimeModulus>, d: u64) -> Result<Self> {
        let qm1 = modulus.group_order();
        if d == 0 || qm1 % d != 0 {
            return Err(Error::InvalidDivisor { d, qm1 });
        }
        Ok(Self::new(modulus, d % qm1))
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn modulus_arc(&self) -> Arc<PrimeModulus> {
        Arc::clone(&self.modulus)
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Multiplicative order of χ: (q−1)/gcd(t, q−1).
    pub fn order(&self) -> u64 {
        let qm1 = self.modulus.group_order();
        qm1 / modarith::gcd(self.index, qm1)
    }

    /// The divisor d = gcd(t, q−1), so that the order is (q−1)/d.
    pub fn divisor(&self) -> u64 {
        modarith::gcd(self.index, self.modulus.group_order())
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    /// At prime modulus every non-trivial character is primitive.
    pub fn is_primitive(&self) -> bool {
        !self.is_trivial()
    }

    /// χ(n): zero on multiples of q, otherwise e^(2πi·t·dlog(n)/(q−1)).
    pub fn eval(&self, n: i64) -> Complex64 {
        let r = self.modulus.reduce(n);
        if r == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = self
            .modulus
            .discrete_log(r)
            .expect("nonzero residue has a discrete log");
        let ord = self.modulus.group_order();
        let phase = TAU * ((self.index * k) % ord) as f64 / ord as f64;
        Complex64::from_polar(1.0, phase)
    }

    /// χ^j, the j-th power character.
    pub fn pow(&self, j: u64) -> Self {
        let ord = self.modulus.group_order();
        Self {
            modulus: Arc::clone(&self.modulus),
            index: modarith::mul_mod(self.index, j % ord, ord),
        }
    }

    /// The complex-conjugate character χ̄.
    pub fn conj(&self) -> Self {
        let ord = self.modulus.group_order();
        Self {
            modulus: Arc::clone(&self.modulus),
            index: (ord - self.index) % ord,
        }
    }
}

impl std::fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "DirichletCharacter(q = {}, index = {})",
            self.modulus.q(),
            self.index
        )
    }
}

/// The orbit {χ^j : gcd(j, ord χ) = 1} of a non-trivial character under
/// the Galois action on character values; all members share the order of
/// χ and the orbit has φ(ord χ) members.
pub struct GaloisOrbit {
    base: DirichletCharacter,
    members: Vec<DirichletCharacter>,
}

impl GaloisOrbit {
    pub fn base(&self) -> &DirichletCharacter {
        &self.base
    }

    pub fn members(&self) -> &[DirichletCharacter] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.base.order()
    }

    pub fn divisor(&self) -> u64 {
        self.base.divisor()
    }

    pub fn modulus(&self) -> &PrimeModulus {
        self.base.modulus()
    }

    pub fn modulus_arc(&self) -> Arc<PrimeModulus> {
        self.base.modulus_arc()
    }
}

/// Galois orbit of a non-trivial character, enumerated as χ^j over the j
/// coprime to the order, in increasing j.
pub fn galois_orbit(chi: &DirichletCharacter) -> Result<GaloisOrbit> {
    if chi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    let m = chi.order();
    let members: Vec<DirichletCharacter> = (1..m)
        .filter(|&j| modarith::gcd(j, m) == 1)
        .map(|j| chi.pow(j))
        .collect();
    debug_assert_eq!(members.len() as u64, modarith::euler_phi(m));
    Ok(GaloisOrbit {
        base: chi.clone(),
        members,
    })
}

fn validate_divisor(modulus: &PrimeModulus, d: u64) -> Result<()> {
    let qm1 = modulus.group_order();
    if d == 0 || qm1 % d != 0 {
        return Err(Error::InvalidDivisor { d, qm1 });
    }
    if d == qm1 {
        return Err(Error::TrivialCharacter);
    }
    Ok(())
}

/// Orbit average χ_av(n) by its closed formula μ(ord(n^d))/φ(ord(n^d)),
/// as an exact rational. Requires (n, q) = 1, d | q−1 and d < q−1.
pub fn chi_av_formula(n: u64, modulus: &PrimeModulus, d: u64) -> Result<Rational64> {
    validate_divisor(modulus, d)?;
    let q = modulus.q();
    let r = n % q;
    if r == 0 {
        return Err(Error::ZeroResidue { q });
    }
    let nd = modulus.pow(r, d);
    let ord = modulus.mul_order(nd)?;
    Ok(Rational64::new(
        modarith::moebius(ord),
        modarith::euler_phi(ord) as i64,
    ))
}

/// Orbit average χ_av(n) as the arithmetic mean of χ^σ(n) over the orbit.
pub fn chi_av_bruteforce(orbit: &GaloisOrbit, n: i64) -> Complex64 {
    let sum: Complex64 = orbit.members().iter().map(|chi| chi.eval(n)).sum();
    sum / orbit.len() as f64
}

/// Gauss sum τ(χ) = Σ_{x=1}^{q−1} χ(x)·e(x/q).
pub fn gauss_sum(chi: &DirichletCharacter) -> Complex64 {
    let q = chi.modulus().q();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 1..q {
        acc += chi.eval(x as i64) * Complex64::from_polar(1.0, TAU * x as f64 / q as f64);
    }
    acc
}

/// Root number ε(f⊗χ) = ε(f)·χ(N)·τ(χ)²/q; unit modulus for primitive χ.
/// Requires (N, q) = 1.
pub fn root_number(curve: &EllipticCurveForm, chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus().q();
    let n = curve.conductor();
    if n % q == 0 {
        return Err(Error::ConductorDivisible { n, q });
    }
    let tau = gauss_sum(chi);
    Ok(chi.eval(n as i64) * tau * tau * (curve.epsilon() / q as f64))
}

/// Twisted orbit average χ̃_av(n) from its definition: the mean of
/// ε(f⊗χ^σ)·conj(χ^σ(n)) over the orbit.
pub fn tilde_chi_av_direct(
    curve: &EllipticCurveForm,
    orbit: &GaloisOrbit,
    n: u64,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for member in orbit.members() {
        acc += root_number(curve, member)? * member.eval(n as i64).conj();
    }
    Ok(acc / orbit.len() as f64)
}

/// Twisted orbit average in its Kloosterman form:
/// χ̃_av(n) = (ε(f)/q)·Σ_{r=1}^{q−1} χ_av(rN)·S(r, n; q).
/// Requires (nN, q) = 1; the r = 0 term vanishes because χ_av(0) = 0.
pub fn tilde_chi_av_kloosterman(
    curve: &EllipticCurveForm,
    table: &KloostermanTable,
    d: u64,
    n: u64,
) -> Result<Complex64> {
    let modulus = table.modulus();
    let q = modulus.q();
    let cond = curve.conductor();
    if cond % q == 0 {
        return Err(Error::ConductorDivisible { n: cond, q });
    }
    if n % q == 0 {
        return Err(Error::ZeroResidue { q });
    }
    validate_divisor(modulus, d)?;
    let n_red = n % q;
    let cond_red = cond % q;
    let mut acc = 0.0f64;
    for r in 1..q {
        let weight = chi_av_formula(r * cond_red % q, modulus, d)?;
        if weight.is_zero() {
            continue;
        }
        acc += rational_to_f64(weight) * table.s1(r * n_red % q);
    }
    Ok(Complex64::new(curve.epsilon() * acc / q as f64, 0.0))
}

fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact L¹ mass of χ_av over the nonzero residues, with the two ratios
/// used to inspect the d ≲ L₁ ≲ d bound. The lower bound L₁ ≥ φ(d) holds
/// because the residues of order exactly d each contribute 1.
#[derive(Debug, Clone)]
pub struct ChiAvL1Report {
    pub q: u64,
    pub d: u64,
    /// L₁ = Σ_{r=1}^{q−1} |χ_av(r)| as an exact rational.
    pub l1: BigRational,
    pub phi_d: u64,
    pub l1_over_phi_d: f64,
    pub l1_over_d: f64,
    /// Exact comparison L₁ ≥ φ(d).
    pub meets_lower_bound: bool,
}

pub fn chi_av_l1(modulus: &PrimeModulus, d: u64) -> Result<ChiAvL1Report> {
    validate_divisor(modulus, d)?;
    let q = modulus.q();
    let mut l1 = BigRational::zero();
    for r in 1..q {
        let term = chi_av_formula(r, modulus, d)?;
        l1 += BigRational::new(BigInt::from(*term.numer()), BigInt::from(*term.denom())).abs();
    }
    let phi_d = modarith::euler_phi(d);
    let l1_f = l1.to_f64().unwrap_or(f64::NAN);
    Ok(ChiAvL1Report {
        q,
        d,
        meets_lower_bound: l1 >= BigRational::from_integer(BigInt::from(phi_d)),
        l1,
        phi_d,
        l1_over_phi_d: l1_f / phi_d as f64,
        l1_over_d: l1_f / d as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(q: u64) -> Arc<PrimeModulus> {
        PrimeModulus::shared(q).unwrap()
    }

    fn curve_32a() -> EllipticCurveForm {
        EllipticCurveForm::new("32a", [0, 0, 0, -1, 0], 32, 1.0).unwrap()
    }

    fn curve_37a() -> EllipticCurveForm {
        EllipticCurveForm::new("37a", [0, 0, 1, -1, 0], 37, -1.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        let m = modulus(7);
        let chi = DirichletCharacter::new(m.clone(), 1);
        assert!((chi.eval(1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // dlog(2) = 2, so χ(2) = e^(2πi/3)
        let expected = Complex64::from_polar(1.0, TAU / 3.0);
        assert!((chi.eval(2) - expected).norm() < 1e-15);
        assert_eq!(chi.eval(7), Complex64::new(0.0, 0.0));
        assert_eq!(chi.eval(-7), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn eval_is_multiplicative() {
        let m = modulus(13);
        for t in 1..12 {
            let chi = DirichletCharacter::new(m.clone(), t);
            for a in 1..13i64 {
                for b in 1..13i64 {
                    let lhs = chi.eval(a * b);
                    let rhs = chi.eval(a) * chi.eval(b);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn orbit_sizes() {
        let m7 = modulus(7);
        let full = DirichletCharacter::new(m7.clone(), 1);
        assert_eq!(full.order(), 6);
        assert_eq!(galois_orbit(&full).unwrap().len(), 2); // φ(6) = 2, j ∈ {1, 5}

        let m5 = modulus(5);
        let quartic = DirichletCharacter::new(m5.clone(), 1);
        assert_eq!(quartic.order(), 4);
        assert_eq!(galois_orbit(&quartic).unwrap().len(), 2); // j ∈ {1, 3}

        let quadratic = DirichletCharacter::new(m5, 2);
        assert_eq!(quadratic.order(), 2);
        assert_eq!(galois_orbit(&quadratic).unwrap().len(), 1);

        let trivial = DirichletCharacter::new(m7, 0);
        assert_eq!(galois_orbit(&trivial).unwrap_err(), Error::TrivialCharacter);
    }

    #[test]
    fn orbit_members_are_distinct_and_share_order() {
        for q in [7u64, 13, 31] {
            let m = modulus(q);
            for d in modarith::divisors(q - 1) {
                if d == q - 1 {
                    continue;
                }
                let chi = DirichletCharacter::from_divisor(m.clone(), d).unwrap();
                let orbit = galois_orbit(&chi).unwrap();
                let mut indices: Vec<u64> = orbit.members().iter().map(|c| c.index()).collect();
                indices.sort_unstable();
                indices.dedup();
                assert_eq!(indices.len(), orbit.len(), "duplicate members at q={q} d={d}");
                assert!(orbit.members().iter().all(|c| c.order() == chi.order()));
            }
        }
    }

    #[test]
    fn chi_av_formula_examples() {
        let m = modulus(7);
        assert_eq!(chi_av_formula(1, &m, 1).unwrap(), Rational64::new(1, 1));
        // ord(2) = 3: μ(3)/φ(3) = −1/2
        assert_eq!(chi_av_formula(2, &m, 1).unwrap(), Rational64::new(-1, 2));
        // d = 2: ord(3² mod 7) = ord(2) = 3
        assert_eq!(chi_av_formula(3, &m, 2).unwrap(), Rational64::new(-1, 2));
        assert_eq!(
            chi_av_formula(7, &m, 1).unwrap_err(),
            Error::ZeroResidue { q: 7 }
        );
        assert_eq!(
            chi_av_formula(2, &m, 6).unwrap_err(),
            Error::TrivialCharacter
        );
        assert!(matches!(
            chi_av_formula(2, &m, 4),
            Err(Error::InvalidDivisor { .. })
        ));
    }

    #[test]
    fn chi_av_bruteforce_examples() {
        let m = modulus(7);
        let orbit = galois_orbit(&DirichletCharacter::new(m.clone(), 1)).unwrap();
        assert!((chi_av_bruteforce(&orbit, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((chi_av_bruteforce(&orbit, 2) - Complex64::new(-0.5, 0.0)).norm() < 1e-12);
        assert_eq!(chi_av_bruteforce(&orbit, 7), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn formula_matches_bruteforce() {
        for q in [5u64, 7, 11, 13, 31] {
            let m = modulus(q);
            for d in modarith::divisors(q - 1) {
                if d == q - 1 {
                    continue;
                }
                let chi = DirichletCharacter::from_divisor(m.clone(), d).unwrap();
                let orbit = galois_orbit(&chi).unwrap();
                for n in 1..q {
                    let formula = rational_to_f64(chi_av_formula(n, &m, d).unwrap());
                    let brute = chi_av_bruteforce(&orbit, n as i64);
                    assert!(
                        (brute.re - formula).abs() < 1e-12 && brute.im.abs() < 1e-12,
                        "q={q} d={d} n={n}: formula {formula} vs brute {brute}"
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_sum_values() {
        let m5 = modulus(5);
        let quadratic = DirichletCharacter::new(m5.clone(), 2);
        let tau = gauss_sum(&quadratic);
        assert!((tau - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);

        let trivial = DirichletCharacter::new(m5, 0);
        assert!((gauss_sum(&trivial) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gauss_sum_modulus_sweep() {
        for q in (3u64..=101).filter(|&q| modarith::is_prime(q)) {
            let m = modulus(q);
            for t in 1..(q - 1) {
                let chi = DirichletCharacter::new(m.clone(), t);
                let tau = gauss_sum(&chi);
                assert!(
                    (tau.norm() - (q as f64).sqrt()).abs() < 1e-9,
                    "|τ| ≠ √q at q={q}, t={t}"
                );
                // τ(χ)·τ(χ̄) = χ(−1)·q
                let product = tau * gauss_sum(&chi.conj());
                let expected = chi.eval(-1) * q as f64;
                assert!((product - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn root_number_examples() {
        let e = curve_32a();
        let m5 = modulus(5);
        let quadratic = DirichletCharacter::new(m5, 2);
        // τ² / q = 1 and χ(32) = χ(2) = −1, so the root number is −ε(f)
        let rn = root_number(&e, &quadratic).unwrap();
        assert!((rn - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        // unit modulus across a sweep of primitive characters
        let m13 = modulus(13);
        for t in 1..12 {
            let chi = DirichletCharacter::new(m13.clone(), t);
            assert!((root_number(&e, &chi).unwrap().norm() - 1.0).abs() < 1e-9);
        }

        // q | N rejected
        let m37 = modulus(37);
        let chi = DirichletCharacter::new(m37, 1);
        assert_eq!(
            root_number(&curve_37a(), &chi).unwrap_err(),
            Error::ConductorDivisible { n: 37, q: 37 }
        );
    }

    #[test]
    fn tilde_direct_basics() {
        let e = curve_32a();
        let m5 = modulus(5);
        let quadratic = DirichletCharacter::new(m5, 2);
        let orbit = galois_orbit(&quadratic).unwrap();
        // orbit of size 1: the average at n = 1 is the root number itself
        let value = tilde_chi_av_direct(&e, &orbit, 1).unwrap();
        let rn = root_number(&e, &quadratic).unwrap();
        assert!((value - rn).norm() < 1e-12);

        // |χ̃_av| ≤ 1 always
        let m13 = modulus(13);
        let orbit = galois_orbit(&DirichletCharacter::new(m13, 1)).unwrap();
        for n in 1..13 {
            assert!(tilde_chi_av_direct(&e, &orbit, n).unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn tilde_forms_agree() {
        for (q, curve) in [(7u64, curve_32a()), (13, curve_32a()), (13, curve_37a())] {
            let m = modulus(q);
            let table = KloostermanTable::new(m.clone());
            for d in modarith::divisors(q - 1) {
                if d == q - 1 {
                    continue;
                }
                let chi = DirichletCharacter::from_divisor(m.clone(), d).unwrap();
                let orbit = galois_orbit(&chi).unwrap();
                for n in 1..q {
                    let direct = tilde_chi_av_direct(&curve, &orbit, n).unwrap();
                    let kloos = tilde_chi_av_kloosterman(&curve, &table, d, n).unwrap();
                    assert!(
                        (direct - kloos).norm() < 1e-12,
                        "q={q} d={d} n={n}: {direct} vs {kloos}"
                    );
                }
            }
        }
    }

    #[test]
    fn tilde_kloosterman_rejections() {
        let e = curve_32a();
        let m = modulus(7);
        let table = KloostermanTable::new(m);
        assert_eq!(
            tilde_chi_av_kloosterman(&e, &table, 1, 14).unwrap_err(),
            Error::ZeroResidue { q: 7 }
        );
        assert_eq!(
            tilde_chi_av_kloosterman(&e, &table, 6, 2).unwrap_err(),
            Error::TrivialCharacter
        );
    }

    #[test]
    fn l1_reports() {
        let m7 = modulus(7);
        let rep = chi_av_l1(&m7, 1).unwrap();
        assert!(rep.meets_lower_bound);
        assert!(rep.l1 >= BigRational::from_integer(BigInt::from(1)));
        assert_eq!(chi_av_l1(&m7, 6).unwrap_err(), Error::TrivialCharacter);

        let m13 = modulus(13);
        let rep = chi_av_l1(&m13, 3).unwrap();
        assert_eq!(rep.phi_d, 2);
        assert!(rep.meets_lower_bound);
    }
}
