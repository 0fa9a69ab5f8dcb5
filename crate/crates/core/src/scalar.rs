//! Exact scalars: arbitrary-precision rationals and a large prime field.
//!
//! Generic code is written against [`Ring`] (also implemented by truncated
//! Laurent jets) and [`Field`]. Elements carry everything needed to build
//! other elements of the same backend, so constants are made from a
//! template element (`one.int_like(3)`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(Backend, Backend),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("invalid field selector {0:?} (expected `q` or `fp:<prime>`)")]
    BadBackend(String),
    #[error("{0} is not a prime above 10^9")]
    BadPrime(u64),
}

/// Commutative ring with a partial inverse.
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, k: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `None` when the element is not a unit.
    fn try_inv(&self) -> Option<Self>;

    /// Whether two elements live in the same ring (same prime, etc.).
    fn compatible(&self, _other: &Self) -> bool {
        true
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() + a.clone() * b.clone();
    }

    fn pow_i(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.try_inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one_like();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq.clone();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.clone() * sq;
            }
        }
        Some(acc)
    }
}

/// An exact field element with a runtime backend tag.
pub trait Field: Ring + fmt::Display + Eq {
    fn backend(&self) -> Backend;
    /// `num / den`, or `None` when `den` vanishes in the field.
    fn ratio_like(&self, num: i64, den: i64) -> Option<Self>;
    /// A random element (small-height for rationals, uniform for `F_p`).
    fn random_like<G: Rng + ?Sized>(&self, rng: &mut G) -> Self;
    fn parse_like(&self, text: &str) -> Result<Self, ScalarError>;

    /// Integers `L·xᵢ` for a common nonzero scale `L`, where the backend
    /// has a natural integral form.
    fn to_integral(_values: &[Self]) -> Option<(Vec<BigInt>, BigInt)> {
        None
    }
}

/// Which exact field a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Backend {
    Rational,
    Prime(u64),
}

/// `2⁶¹ − 1`, the default prime.
pub const DEFAULT_PRIME: u64 = 2_305_843_009_213_693_951;

impl Backend {
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if p > 1_000_000_000 && is_prime_u64(p) {
            Ok(Backend::Prime(p))
        } else {
            Err(ScalarError::BadPrime(p))
        }
    }

    pub fn rational_one() -> BigRational {
        BigRational::one()
    }

    /// The unit of the prime field, or `None` for the rational backend.
    pub fn prime_one(&self) -> Option<Fp> {
        match *self {
            Backend::Prime(p) => Some(Fp::new(1, p)),
            Backend::Rational => None,
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("q"),
            Backend::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for Backend {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, ScalarError> {
        let s = s.trim();
        if s == "q" || s == "Q" {
            return Ok(Backend::Rational);
        }
        let p = s
            .strip_prefix("fp:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| ScalarError::BadBackend(s.to_string()))?;
        Backend::prime(p)
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Residue modulo a prime `p`; the modulus travels with the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl Fp {
    pub fn new(v: u64, p: u64) -> Self {
        Fp { v: v % p, p }
    }

    pub fn from_i64(v: i64, p: u64) -> Self {
        Fp {
            v: (v as i128).rem_euclid(p as i128) as u64,
            p,
        }
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn check(&self, o: &Fp) {
        assert_eq!(self.p, o.p, "mixing residues modulo different primes");
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        self.check(&o);
        let s = self.v as u128 + o.v as u128;
        Fp {
            v: (s % self.p as u128) as u64,
            p: self.p,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        self.check(&o);
        let v = if self.v >= o.v {
            self.v - o.v
        } else {
            self.p - (o.v - self.v)
        };
        Fp { v, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        self.check(&o);
        Fp {
            v: mul_mod(self.v, o.v, self.p),
            p: self.p,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            v: if self.v == 0 { 0 } else { self.p - self.v },
            p: self.p,
        }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Ring for Fp {
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { v: 1, p: self.p }
    }
    fn int_like(&self, k: i64) -> Self {
        Fp::from_i64(k, self.p)
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn try_inv(&self) -> Option<Self> {
        (self.v != 0).then(|| Fp {
            v: pow_mod(self.v, self.p - 2, self.p),
            p: self.p,
        })
    }
    fn compatible(&self, other: &Self) -> bool {
        self.p == other.p
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self = *self + *a * *b;
    }
}

impl Field for Fp {
    fn backend(&self) -> Backend {
        Backend::Prime(self.p)
    }
    fn ratio_like(&self, num: i64, den: i64) -> Option<Self> {
        let d = self.int_like(den).try_inv()?;
        Some(self.int_like(num) * d)
    }
    fn random_like<G: Rng + ?Sized>(&self, rng: &mut G) -> Self {
        Fp {
            v: rng.gen_range(0..self.p),
            p: self.p,
        }
    }
    fn parse_like(&self, text: &str) -> Result<Self, ScalarError> {
        let t = text.trim();
        if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a
                .trim()
                .parse()
                .map_err(|_| ScalarError::Parse(text.into()))?;
            let b: i64 = b
                .trim()
                .parse()
                .map_err(|_| ScalarError::Parse(text.into()))?;
            return self.ratio_like(a, b).ok_or(ScalarError::DivisionByZero);
        }
        if let Ok(v) = t.parse::<u64>() {
            return Ok(Fp::new(v, self.p));
        }
        t.parse::<i64>()
            .map(|v| Fp::from_i64(v, self.p))
            .map_err(|_| ScalarError::Parse(text.into()))
    }
}

/// Height bound for random rationals `±a/b`.
const RATIONAL_HEIGHT: i64 = 30;

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn int_like(&self, k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Field for BigRational {
    fn backend(&self) -> Backend {
        Backend::Rational
    }
    fn ratio_like(&self, num: i64, den: i64) -> Option<Self> {
        (den != 0).then(|| BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    fn random_like<G: Rng + ?Sized>(&self, rng: &mut G) -> Self {
        let num = rng.gen_range(-RATIONAL_HEIGHT..=RATIONAL_HEIGHT);
        let den = rng.gen_range(1..=RATIONAL_HEIGHT);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn parse_like(&self, text: &str) -> Result<Self, ScalarError> {
        parse_rational(text)
    }
    fn to_integral(values: &[Self]) -> Option<(Vec<BigInt>, BigInt)> {
        let mut lcm = BigInt::one();
        for x in values {
            if !x.denom().is_one() {
                lcm = lcm.lcm(x.denom());
            }
        }
        let ints = values
            .iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        Some((ints, lcm))
    }
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn int_like(&self, k: i64) -> Self {
        BigInt::from(k)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        (self.is_one() || (-self).is_one()).then(|| self.clone())
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Result<BigRational, ScalarError> {
    let t = text.trim();
    let err = || ScalarError::Parse(text.to_string());
    match t.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| err())?;
            let b: BigInt = b.trim().parse().map_err(|_| err())?;
            if Zero::is_zero(&b) {
                return Err(ScalarError::DivisionByZero);
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| err())?)),
    }
}

/// Formats a rational as `"p/q"` (always with a denominator).
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// A scalar whose backend is only known at run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactScalar {
    Rational(BigRational),
    Prime(Fp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ExactScalar {
    pub fn backend(&self) -> Backend {
        match self {
            ExactScalar::Rational(_) => Backend::Rational,
            ExactScalar::Prime(x) => x.backend(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => Zero::is_zero(q),
            ExactScalar::Prime(x) => x.v == 0,
        }
    }

    pub fn parse(backend: Backend, text: &str) -> Result<Self, ScalarError> {
        match backend {
            Backend::Rational => parse_rational(text).map(ExactScalar::Rational),
            Backend::Prime(p) => Fp::new(1, p).parse_like(text).map(ExactScalar::Prime),
        }
    }

    /// Exact `a op b`, rejecting mixed backends and division by zero.
    pub fn arith(&self, op: ArithOp, other: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        fn go<F: Field>(op: ArithOp, a: &F, b: &F) -> Result<F, ScalarError> {
            Ok(match op {
                ArithOp::Add => a.clone() + b.clone(),
                ArithOp::Sub => a.clone() - b.clone(),
                ArithOp::Mul => a.clone() * b.clone(),
                ArithOp::Div => a.clone() * b.try_inv().ok_or(ScalarError::DivisionByZero)?,
            })
        }
        match (self, other) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => {
                go(op, a, b).map(ExactScalar::Rational)
            }
            (ExactScalar::Prime(a), ExactScalar::Prime(b)) if a.p == b.p => {
                go(op, a, b).map(ExactScalar::Prime)
            }
            _ => Err(ScalarError::BackendMismatch(
                self.backend(),
                other.backend(),
            )),
        }
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(q) => f.write_str(&format_rational(q)),
            ExactScalar::Prime(x) => write!(f, "{x}"),
        }
    }
}

/// Textual form used in JSON: rationals as `"p/q"`, residues as decimal.
pub fn to_text<F: Field>(x: &F) -> String {
    match x.backend() {
        Backend::Rational => {
            let s = x.to_string();
            if s.contains('/') {
                s
            } else {
                format!("{s}/1")
            }
        }
        Backend::Prime(_) => x.to_string(),
    }
}
