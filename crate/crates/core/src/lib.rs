//! Desk-scale machinery for the non-vanishing of elliptic-curve
//! L-functions twisted by Dirichlet characters of prime modulus.
//!
//! The crate computes, at concrete prime moduli q, the objects that drive
//! orbit-averaged moment arguments for central values:
//!
//! - exact arithmetic in (ℤ/qℤ)* with a one-time discrete-log table
//!   ([`modarith`]),
//! - Dirichlet characters, Galois orbits, the orbit average χ_av (closed
//!   rational formula and brute force), Gauss sums, root numbers, and the
//!   twisted average χ̃_av in two independent forms ([`characters`]),
//! - Kloosterman sums, their Weil-bound checks, and complete moments of
//!   products of 2k Kloosterman sums with diagonal/off-diagonal
//!   accounting ([`kloosterman`]),
//! - elliptic curves as weight-2 newforms: point counts, Hecke
//!   eigenvalues, mollifier and tail coefficients ([`hecke`]),
//! - mollified approximate functional equations, the 1 + S₁ + S₂ moment
//!   decomposition, and non-vanishing scans ([`lfunctions`]),
//! - exact rational linear programming over named exponent variables,
//!   including the built-in system whose optimum is γ = 7/52
//!   ([`exponentlp`]).

pub mod characters;
pub mod exponentlp;
pub mod hecke;
pub mod kloosterman;
pub mod lfunctions;
pub mod modarith;

/// Errors shared by the arithmetic modules. The constraint-program parser
/// and solver have their own error types in [`exponentlp`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too small; need q >= 3")]
    ModulusTooSmall(u64),
    #[error("residue is divisible by the modulus {q}")]
    ZeroResidue { q: u64 },
    #[error("d = {d} does not divide q - 1 = {qm1}")]
    InvalidDivisor { d: u64, qm1: u64 },
    #[error("d = q - 1 selects the trivial character")]
    TrivialCharacter,
    #[error("conductor {n} shares a factor with the modulus {q}")]
    ConductorDivisible { n: u64, q: u64 },
    #[error("tuple length {0} is invalid; need an even length of at least 2")]
    TupleLength(usize),
    #[error("weight sequence violates the moment condition: {0}")]
    MomentCondition(String),
    #[error("weight range R = {r} must be smaller than q = {q}")]
    RangeTooLarge { r: usize, q: u64 },
    #[error("curve {0} has zero discriminant")]
    SingularCurve(String),
    #[error("epsilon must be +1 or -1, got {0}")]
    InvalidEpsilon(f64),
    #[error("argument must be a positive integer")]
    ZeroArgument,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
