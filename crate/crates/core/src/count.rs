//! Closed-form counts of orientation classes and non-negative A-type
//! posets, in exact big-integer arithmetic throughout.
//!
//! Conventions: `count_path_orientations(n)` is the number of posets whose
//! Hasse diagram is the path on n points, up to isomorphism;
//! `count_cycle_orientations(n)` the same for the n-cycle;
//! `count_principal_a(n)` the acyclic cycle orientations with at least two
//! sinks (corank-one posets of type A over n points); and
//! `count_nonnegative_A(n)` their union with the path case.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Exact non-negative count.
pub type BigCount = BigUint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    /// A divisor-sum formula failed to divide exactly; indicates an
    /// implementation fault, never an input fault.
    #[error("InexactDivision: {0} is not divisible by {1}")]
    InexactDivision(BigUint, u64),
}

/// Euler's totient by trial-division factorization.
pub fn euler_totient(n: u64) -> BigCount {
    assert!(n >= 1, "totient of zero is undefined");
    let mut remaining = n;
    let mut phi = BigUint::one();
    let mut p = 2u64;
    while p * p <= remaining {
        if remaining % p == 0 {
            let mut pk = 1u64;
            while remaining % p == 0 {
                remaining /= p;
                pk *= p;
            }
            phi *= BigUint::from(pk - pk / p);
        }
        p += 1;
    }
    if remaining > 1 {
        phi *= BigUint::from(remaining - 1);
    }
    phi
}

/// Number of orientation classes of the path on `n` points:
/// 2^((n-3)/2) + 2^(n-2) for odd n >= 3, 2^(n-2) for even n, 1 for n = 1.
pub fn count_path_orientations(n: u64) -> BigCount {
    assert!(n >= 1, "paths need at least one point");
    if n == 1 {
        return BigUint::one();
    }
    // Orbit count of 2^(n-1) orientations under the order-2 reversal:
    // (2^(n-1) + f)/2 with f = 2^((n-1)/2) fixed points for odd n and
    // f = 0 for even n (the middle edge cannot be self-opposite).
    let total = BigUint::one() << (n - 1) as usize;
    let fixed = if n % 2 == 1 {
        BigUint::one() << ((n - 1) / 2) as usize
    } else {
        BigUint::zero()
    };
    (total + fixed) >> 1
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Binary necklaces of length n: (1/n) Σ_{d|n} 2^(n/d) φ(d). The division
/// is checked exact.
pub fn count_necklaces(n: u64) -> Result<BigCount, CountError> {
    assert!(n >= 1, "necklaces need at least one bead");
    let mut sum = BigUint::zero();
    for d in divisors(n) {
        sum += (BigUint::one() << (n / d) as usize) * euler_totient(d);
    }
    let (q, r) = sum.div_rem(&BigUint::from(n));
    if !r.is_zero() {
        return Err(CountError::InexactDivision(sum, n));
    }
    Ok(q)
}

/// Orientation classes of the cycle on `n` points under the dihedral
/// action: necklaces/2 for odd n, plus a 2^(n/2-2) reflection correction
/// for even n.
pub fn count_cycle_orientations(n: u64) -> Result<BigCount, CountError> {
    assert!(n >= 3, "cycles need at least three points");
    let necklaces = count_necklaces(n)?;
    if n % 2 == 1 {
        let (q, r) = necklaces.div_rem(&BigUint::from(2u32));
        if !r.is_zero() {
            return Err(CountError::InexactDivision(necklaces, 2));
        }
        Ok(q)
    } else {
        let (q, r) = necklaces.div_rem(&BigUint::from(2u32));
        if !r.is_zero() {
            return Err(CountError::InexactDivision(necklaces, 2));
        }
        Ok(q + (BigUint::one() << (n / 2 - 2) as usize))
    }
}

/// Corank-one posets of Dynkin type A_(n-1) on n points: cycle orientation
/// classes minus the ceil((n+1)/2) classes with fewer than two sinks.
pub fn count_principal_a(n: u64) -> Result<BigCount, CountError> {
    assert!(n >= 3, "principal A-type posets live on cycles of length >= 3");
    let cycles = count_cycle_orientations(n)?;
    Ok(cycles - BigUint::from((n + 2) / 2))
}

/// Non-negative posets of size n with Dynkin type A (corank 0 or 1): the
/// path orientation classes plus the principal cycle classes.
pub fn count_nonnegative_a(n: u64) -> Result<BigCount, CountError> {
    assert!(n >= 1, "posets need at least one point");
    if n <= 2 {
        return Ok(BigUint::one());
    }
    Ok(count_path_orientations(n) + count_principal_a(n)?)
}

/// One row of the growth-rate report: both ratios exact, with a decimal
/// rendering for readability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticRow {
    pub n: u64,
    /// Nneg(A_(n+1)) / Nneg(A_n).
    pub growth: BigRational,
    /// Principal share N(n, cyclic) / Nneg(A_n).
    pub principal_share: BigRational,
}

impl AsymptoticRow {
    /// Approximate decimal values (growth, principal share); display only.
    pub fn approx(&self) -> (f64, f64) {
        let to_f64 = |r: &BigRational| {
            r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
        };
        (to_f64(&self.growth), to_f64(&self.principal_share))
    }
}

/// Exact consecutive-ratio table for n = 4..=max_n: the growth ratio
/// drifts toward 2 and the principal share toward 0; no limit is asserted.
pub fn asymptotic_report(max_n: u64) -> Result<Vec<AsymptoticRow>, CountError> {
    assert!(max_n >= 4, "the report starts at n = 4");
    let to_int = |u: BigCount| BigInt::from(u);
    let mut rows = Vec::new();
    for n in 4..=max_n {
        let here = to_int(count_nonnegative_a(n)?);
        let next = to_int(count_nonnegative_a(n + 1)?);
        let principal = to_int(count_principal_a(n)?);
        rows.push(AsymptoticRow {
            n,
            growth: BigRational::new(next, here.clone()),
            principal_share: BigRational::new(principal, here),
        });
    }
    Ok(rows)
}
