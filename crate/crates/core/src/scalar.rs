//! Exact scalar types.
//!
//! The linear algebra kernels are generic over [`ExactField`] (rationals or
//! a prime field) and [`ExactInt`] (fixed-width integers with overflow
//! detection, or big integers). There is deliberately no floating-point
//! implementation: every facet certificate is an exact rank statement.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Num, One, Signed, ToPrimitive, Zero};

/// Field with exact arithmetic.
pub trait ExactField: Num + Neg<Output = Self> + Clone + Debug + Send + Sync {}

impl ExactField for BigRational {}
impl ExactField for Ratio<i128> {}
impl ExactField for Fp {}

/// Integer ring whose fixed-width members report overflow instead of wrapping.
pub trait ExactInt:
    Integer + Signed + Clone + Debug + CheckedAdd + CheckedSub + CheckedMul + Send + Sync
{
    fn from_i64(v: i64) -> Self;
    fn to_big(&self) -> BigInt;
}

impl ExactInt for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ExactInt for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ExactInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// Element of the prime field of order 2^31 - 1.
///
/// Ranks computed here are lower bounds for ranks over the rationals of the
/// same integer matrix: a nonzero minor modulo p is a nonzero integer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp(u32);

impl Fp {
    pub const MODULUS: u32 = 2_147_483_647;

    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(Self::MODULUS as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    fn pow(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn inverse(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(Self::MODULUS - 2))
        }
    }
}

impl Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        let s = self.0 as u64 + rhs.0 as u64;
        Fp((s % Fp::MODULUS as u64) as u32)
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        let s = self.0 as u64 + Fp::MODULUS as u64 - rhs.0 as u64;
        Fp((s % Fp::MODULUS as u64) as u32)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        Fp(((self.0 as u64 * rhs.0 as u64) % Fp::MODULUS as u64) as u32)
    }
}

impl Div for Fp {
    type Output = Fp;
    fn div(self, rhs: Fp) -> Fp {
        self * rhs.inverse().expect("division by zero in Fp")
    }
}

impl Rem for Fp {
    type Output = Fp;
    fn rem(self, rhs: Fp) -> Fp {
        assert!(rhs.0 != 0, "remainder by zero in Fp");
        Fp(0)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp(0) - self
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp(1)
    }
}

impl Num for Fp {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        i64::from_str_radix(s, radix).map(Fp::new)
    }
}

/// Scales a rational vector to the primitive integer vector on the same ray.
///
/// Returns the scaled vector and the positive factor applied. The zero vector
/// is returned unchanged with factor one.
pub fn primitive(values: &[BigRational]) -> (Vec<BigInt>, BigRational) {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<BigInt> = values
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() {
        return (scaled, BigRational::one());
    }
    let out = scaled.into_iter().map(|v| v / &gcd).collect();
    (out, BigRational::new(lcm, gcd))
}

/// Divides an integer vector by the gcd of its entries.
pub fn make_primitive<I: ExactInt>(values: &mut [I]) {
    let g = values.iter().fold(I::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in values.iter_mut() {
            *v = v.div_floor(&g);
        }
    }
}

pub(crate) fn to_i64(v: &BigInt) -> Option<i64> {
    v.to_i64()
}

pub(crate) fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rat(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rat(token: &str) -> Option<BigRational> {
    match token.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => token.trim().parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}
