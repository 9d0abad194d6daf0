//! Wigner 3j symbols for integer angular momenta, evaluated exactly.
//!
//! The Racah single sum alternates in sign and cancels catastrophically in
//! floating point, so it is accumulated as an exact rational. The squared
//! symbol is a rational number; the only floating-point operations are the
//! final conversion and one square root.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arguments `(j1 j2 j3; m1 m2 m3)`, validated so `|m_i| <= j_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThreeJArgs {
    pub j: [i64; 3],
    pub m: [i64; 3],
}

impl ThreeJArgs {
    pub fn new(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> Result<Self> {
        let j = [j1, j2, j3];
        let m = [m1, m2, m3];
        if j.iter().zip(&m).any(|(j, m)| *j < 0 || m.abs() > *j) {
            return Err(Error::InvalidThreeJ);
        }
        Ok(Self { j, m })
    }

    /// Swaps columns `a` and `b`.
    pub fn swapped(self, a: usize, b: usize) -> Self {
        let mut out = self;
        out.j.swap(a, b);
        out.m.swap(a, b);
        out
    }
}

/// All three triangle inequalities hold.
pub fn triangle_ok(j1: i64, j2: i64, j3: i64) -> bool {
    j1 >= 0 && j2 >= 0 && j3 >= 0 && j1 <= j2 + j3 && j2 <= j3 + j1 && j3 <= j1 + j2
}

/// `(-1)^{j1+j2+j3}`, the sign picked up by exchanging two columns.
pub fn column_swap_sign(j1: i64, j2: i64, j3: i64) -> i32 {
    if (j1 + j2 + j3).is_even() {
        1
    } else {
        -1
    }
}

const CACHED_FACTORIALS: usize = 512;

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(CACHED_FACTORIALS);
        let mut acc = BigInt::one();
        v.push(acc.clone());
        for n in 1..CACHED_FACTORIALS {
            acc *= n;
            v.push(acc.clone());
        }
        v
    })
}

fn factorial(n: i64) -> BigInt {
    assert!(n >= 0, "factorial of negative number");
    let table = factorial_table();
    let n = n as usize;
    if n < table.len() {
        return table[n].clone();
    }
    let mut acc = table[table.len() - 1].clone();
    for k in table.len()..=n {
        acc *= k;
    }
    acc
}

/// A real number of the form `sign · sqrt(square)` with `square` an exact
/// non-negative rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedSqrt {
    pub sign: i32,
    pub square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        Self {
            sign: 0,
            square: BigRational::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        self.sign as f64 * rational_to_f64(&self.square).sqrt()
    }
}

/// Correctly scaled conversion that does not overflow for huge numerators
/// and denominators: keeps ~64 significant bits of the quotient.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let negative = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().abs();
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let v = q.to_f64().expect("quotient fits in f64") * 2f64.powi(-shift as i32);
    if negative {
        -v
    } else {
        v
    }
}

/// Exact Racah evaluation of the 3j symbol as `sign · sqrt(rational)`.
pub fn wigner3j_exact(args: ThreeJArgs) -> SignedSqrt {
    let [j1, j2, j3] = args.j;
    let [m1, m2, m3] = args.m;
    if m1 + m2 + m3 != 0 || !triangle_ok(j1, j2, j3) {
        return SignedSqrt::zero();
    }
    // all-zero orders with odd degree sum vanish by symmetry
    if m1 == 0 && m2 == 0 && m3 == 0 && (j1 + j2 + j3).is_odd() {
        return SignedSqrt::zero();
    }

    let t_min = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let t_max = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = factorial(t)
            * factorial(j3 - j2 + t + m1)
            * factorial(j3 - j1 + t - m2)
            * factorial(j1 + j2 - j3 - t)
            * factorial(j1 - t - m1)
            * factorial(j2 - t + m2);
        let term = BigRational::new(BigInt::one(), den);
        if t.is_even() {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return SignedSqrt::zero();
    }

    let triangle = BigRational::new(
        factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
        factorial(j1 + j2 + j3 + 1),
    );
    let prefactor = BigRational::from_integer(
        factorial(j1 + m1)
            * factorial(j1 - m1)
            * factorial(j2 + m2)
            * factorial(j2 - m2)
            * factorial(j3 + m3)
            * factorial(j3 - m3),
    );
    let phase = if (j1 - j2 - m3).is_even() { 1 } else { -1 };
    let sign = phase * if sum.is_negative() { -1 } else { 1 };
    let square = triangle * prefactor * &sum * &sum;
    SignedSqrt { sign, square }
}

/// `(j1 j2 j3; m1 m2 m3)` as `f64`. Exactly zero whenever a selection rule
/// fails.
pub fn wigner3j(args: ThreeJArgs) -> f64 {
    wigner3j_exact(args).to_f64()
}

/// `(j1 j2 j3; 0 0 0)` from the closed factorial product, independent of the
/// Racah sum. Exactly zero for odd `j1 + j2 + j3` or a failed triangle.
pub fn threej_zero_row(j1: i64, j2: i64, j3: i64) -> f64 {
    threej_zero_row_exact(j1, j2, j3).to_f64()
}

pub fn threej_zero_row_exact(j1: i64, j2: i64, j3: i64) -> SignedSqrt {
    let big_j = j1 + j2 + j3;
    if !triangle_ok(j1, j2, j3) || big_j.is_odd() {
        return SignedSqrt::zero();
    }
    let g = big_j / 2;
    let radicand = BigRational::new(
        factorial(big_j - 2 * j1) * factorial(big_j - 2 * j2) * factorial(big_j - 2 * j3),
        factorial(big_j + 1),
    );
    let ratio = BigRational::new(
        factorial(g),
        factorial(g - j1) * factorial(g - j2) * factorial(g - j3),
    );
    let sign = if g.is_even() { 1 } else { -1 };
    SignedSqrt {
        sign,
        square: radicand * &ratio * &ratio,
    }
}
