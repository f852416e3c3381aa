//! Exact scalars: arbitrary-precision rationals and Gaussian rationals `a + b·i`.
//!
//! Every coefficient in the library lives in `Q(i)`. Rationals are kept in
//! lowest terms with a positive denominator at all times, so structural
//! equality is value equality.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Canonical arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`; panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `r!` as a rational.
pub fn factorial(r: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=r {
        acc *= k;
    }
    Rational::from_integer(acc)
}

/// `C(r, k)`; zero when `k > r`.
pub fn binomial(r: u32, k: u32) -> Rational {
    if k > r {
        return Rational::zero();
    }
    let k = k.min(r - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= r - j;
        acc /= j + 1;
    }
    Rational::from_integer(acc)
}

/// An exact complex number `re + im·i` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(rat(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(ratio(num, den))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `𝐢·c`
    pub fn mul_i(&self) -> Self {
        Self {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    /// `|c|²`, always rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(Self::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Ok(Self {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self {
            re: &self.re * r,
            im: &self.im * r,
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::real(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        // most coefficients are real; skip the cross terms when we can
        match (self.im.is_zero(), rhs.im.is_zero()) {
            (true, true) => GaussianRational::real(&self.re * &rhs.re),
            (true, false) => GaussianRational {
                re: &self.re * &rhs.re,
                im: &self.re * &rhs.im,
            },
            (false, true) => GaussianRational {
                re: &self.re * &rhs.re,
                im: &self.im * &rhs.re,
            },
            (false, false) => GaussianRational {
                re: &self.re * &rhs.re - &self.im * &rhs.im,
                im: &self.re * &rhs.im + &self.im * &rhs.re,
            },
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |mut acc, c| {
            acc += &c;
            acc
        })
    }
}

impl Product for GaussianRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, c| &acc * &c)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `p/q`, `r/s*i`, or `p/q+r/s*i` / `p/q-r/s*i`;
/// integer parts drop the `/1`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "{}{}{}*i",
                    fmt_rational(&self.re),
                    sign,
                    fmt_rational(&self.im.abs())
                )
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for GaussianRational {
    type Err = ScalarError;

    /// Parses the canonical form written by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ScalarError::Parse(s.to_string());
        let t = s.trim();
        let Some(body) = t.strip_suffix("*i") else {
            return parse_rational(t).map(Self::real).ok_or_else(err);
        };
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        match split {
            Some(i) => {
                let re = parse_rational(&body[..i]).ok_or_else(err)?;
                let im = parse_rational(body[i..].trim_start_matches('+')).ok_or_else(err)?;
                Ok(Self::new(re, im))
            }
            None => Ok(Self::new(
                Rational::zero(),
                parse_rational(body).ok_or_else(err)?,
            )),
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn g(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
        GaussianRational::new(ratio(re.0, re.1), ratio(im.0, im.1))
    }

    #[test]
    fn norm_of_one_plus_i() {
        let a = g((1, 1), (1, 1));
        let b = g((1, 1), (-1, 1));
        assert_eq!(&a * &b, GaussianRational::from_int(2));
    }

    #[test]
    fn conjugate() {
        let c = g((3, 2), (1, 4));
        assert_eq!(c.conj(), g((3, 2), (-1, 4)));
        assert_eq!(c.conj().conj(), c);
    }

    #[test]
    fn two_over_i() {
        let two = GaussianRational::from_int(2);
        let q = two.checked_div(&GaussianRational::i()).unwrap();
        assert_eq!(q, g((0, 1), (-2, 1)));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let one = GaussianRational::one();
        assert_eq!(
            one.checked_div(&GaussianRational::zero()),
            Err(ScalarError::DivisionByZero)
        );
        assert!(GaussianRational::zero().pow(-1).is_err());
    }

    #[test]
    fn integer_powers() {
        let i = GaussianRational::i();
        assert_eq!(i.pow(2).unwrap(), GaussianRational::from_int(-1));
        assert_eq!(i.pow(-1).unwrap(), -GaussianRational::i());
        assert_eq!(i.pow(0).unwrap(), GaussianRational::one());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(4, 2), rat(6));
        assert_eq!(factorial(0), rat(1));
        assert_eq!(binomial(3 - 1, 2 - 1), rat(2));
        assert_eq!(binomial(2, 3), rat(0));
        assert_eq!(factorial(6), rat(720));
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(g((3, 2), (-1, 4)).to_string(), "3/2-1/4*i");
        assert_eq!(g((0, 1), (-2, 1)).to_string(), "-2*i");
        assert_eq!(g((-5, 10), (0, 1)).to_string(), "-1/2");
        assert_eq!(g((1, 1), (1, 3)).to_string(), "1+1/3*i");
        for s in ["3/2-1/4*i", "-2*i", "-1/2", "1+1/3*i", "0", "-7/3+2*i"] {
            assert_eq!(s.parse::<GaussianRational>().unwrap().to_string(), s);
        }
        assert!("1/0".parse::<GaussianRational>().is_err());
    }

    fn arb_q() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..12).prop_map(|(n, d)| ratio(n, d))
    }

    fn arb_g() -> impl Strategy<Value = GaussianRational> {
        (arb_q(), arb_q()).prop_map(|(a, b)| GaussianRational::new(a, b))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_g(), b in arb_g(), c in arb_g()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), GaussianRational::one());
            }
            prop_assert_eq!(&a - &a, GaussianRational::zero());
        }

        #[test]
        fn canonical_form_is_stable(a in arb_g()) {
            // rationals are always reduced with positive denominator
            prop_assert!(a.re.denom().is_positive());
            prop_assert!(a.re.numer().gcd(a.re.denom()).is_one());
            let s = a.to_string();
            let back: GaussianRational = s.parse().unwrap();
            prop_assert_eq!(back.to_string(), s);
            prop_assert_eq!(back, a);
        }
    }
}
