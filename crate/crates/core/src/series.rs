//! Truncated formal power series in the deformation parameter `λ`.
//!
//! A [`Series`] always carries its truncation order explicitly: the
//! coefficient vector has length `K + 1` and trailing zeros are kept, so
//! "the residual vanishes through `λ^K`" is a well-posed statement.
//! Arithmetic between series of different orders truncates to the smaller.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::formal::FormalPoly;
use crate::poly::LaurentElem;
use crate::scalar::{factorial, GaussianRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series coefficients live in incompatible carriers")]
    Incompatible,
    #[error("leading coefficient is not invertible")]
    NotInvertible,
    #[error("series has a nonzero constant term")]
    NonzeroConstant,
    #[error("substitution has a vanishing linear term")]
    DegenerateSubstitution,
}

/// Coefficient algebra of a [`Series`]. All carriers used here are
/// commutative.
pub trait Carrier: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn compatible(&self, other: &Self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn scaled(&self, c: &GaussianRational) -> Self;
    fn try_inverse(&self) -> Option<Self>;
}

impl Carrier for GaussianRational {
    fn zero_like(&self) -> Self {
        GaussianRational::zero()
    }
    fn one_like(&self) -> Self {
        GaussianRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn compatible(&self, _: &Self) -> bool {
        true
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scaled(&self, c: &GaussianRational) -> Self {
        self * c
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl Carrier for LaurentElem {
    fn zero_like(&self) -> Self {
        LaurentElem::zero(self.space())
    }
    fn one_like(&self) -> Self {
        LaurentElem::one(self.space())
    }
    fn is_zero(&self) -> bool {
        LaurentElem::is_zero(self)
    }
    fn compatible(&self, other: &Self) -> bool {
        self.space() == other.space()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("compatible carriers")
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).expect("compatible carriers")
    }
    fn times(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("compatible carriers")
    }
    fn scaled(&self, c: &GaussianRational) -> Self {
        self.scale(c)
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

impl Carrier for FormalPoly {
    fn zero_like(&self) -> Self {
        FormalPoly::zero(self.nvars())
    }
    fn one_like(&self) -> Self {
        FormalPoly::one(self.nvars())
    }
    fn is_zero(&self) -> bool {
        FormalPoly::is_zero(self)
    }
    fn compatible(&self, other: &Self) -> bool {
        self.nvars() == other.nvars()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn scaled(&self, c: &GaussianRational) -> Self {
        self.scale(c)
    }
    fn try_inverse(&self) -> Option<Self> {
        self.monomial_inverse()
    }
}

/// `c₀ + c₁λ + … + c_Kλ^K`.
#[derive(Clone, PartialEq, Eq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: Serialize> Serialize for Series<T> {
    /// `{"order": K, "coeffs": [c₀, …, c_K]}`.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Series", 2)?;
        st.serialize_field("order", &(self.coeffs.len() - 1))?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.end()
    }
}

impl<T: Carrier> Series<T> {
    /// Panics on an empty coefficient list; the order is `len − 1`.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { coeffs }
    }

    /// `c + 0·λ + … + 0·λ^K`.
    pub fn constant(c: T, order: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![c];
        coeffs.resize(order + 1, z);
        Self { coeffs }
    }

    pub fn zero_like(template: &T, order: usize) -> Self {
        Self::constant(template.zero_like(), order)
    }

    /// `c·λ^k`, zero if `k` exceeds the order.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let mut s = Self::zero_like(&c, order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: T) {
        self.coeffs[k] = c;
    }

    pub fn truncate(&self, order: usize) -> Self {
        let k = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=k].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<(), SeriesError> {
        if self.coeffs[0].compatible(&other.coeffs[0]) {
            Ok(())
        } else {
            Err(SeriesError::Incompatible)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let k = self.order().min(other.order());
        Ok(Self {
            coeffs: (0..=k)
                .map(|i| self.coeffs[i].plus(&other.coeffs[i]))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let k = self.order().min(other.order());
        Ok(Self {
            coeffs: (0..=k)
                .map(|i| self.coeffs[i].minus(&other.coeffs[i]))
                .collect(),
        })
    }

    /// Cauchy product truncated at the smaller order.
    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check(other)?;
        let k = self.order().min(other.order());
        let mut coeffs = vec![self.coeffs[0].zero_like(); k + 1];
        for i in 0..=k {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(k - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].plus(&self.coeffs[i].times(&other.coeffs[j]));
            }
        }
        Ok(Self { coeffs })
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.map(|t| t.scaled(c))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-GaussianRational::one())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Coefficientwise change of carrier.
    pub fn map_to<U: Carrier>(&self, f: impl Fn(&T) -> U) -> Series<U> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Multiply by `λ^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let z = self.coeffs[0].zero_like();
        let mut coeffs = vec![z; self.coeffs.len()];
        let len = self.coeffs.len();
        if k < len {
            coeffs[k..].clone_from_slice(&self.coeffs[..len - k]);
        }
        Self { coeffs }
    }

    /// Product with a scalar series, truncated at the smaller order.
    pub fn scalar_mul(&self, s: &Series<GaussianRational>) -> Self {
        let k = self.order().min(s.order());
        let mut coeffs = vec![self.coeffs[0].zero_like(); k + 1];
        for i in 0..=k {
            if Zero::is_zero(&s.coeffs[i]) {
                continue;
            }
            for j in 0..=(k - i) {
                coeffs[i + j] = coeffs[i + j].plus(&self.coeffs[j].scaled(&s.coeffs[i]));
            }
        }
        Self { coeffs }
    }

    /// Multiplicative inverse through `λ^K`, solved order by order.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let b0 = self.coeffs[0]
            .try_inverse()
            .ok_or(SeriesError::NotInvertible)?;
        let k = self.order();
        let mut b = vec![b0.clone()];
        for m in 1..=k {
            let mut acc = b0.zero_like();
            for i in 1..=m {
                acc = acc.plus(&self.coeffs[i].times(&b[m - i]));
            }
            b.push(b0.times(&acc).scaled(&-GaussianRational::one()));
        }
        Ok(Self { coeffs: b })
    }

    /// `Σ_k c_k u(λ)^k` for a substitution `λ ↦ u(λ)` with `u(0) = 0`.
    pub fn reparametrize(&self, u: &Series<GaussianRational>) -> Result<Self, SeriesError> {
        if !Zero::is_zero(&u.coeffs[0]) {
            return Err(SeriesError::NonzeroConstant);
        }
        if u.order() >= 1 && Zero::is_zero(&u.coeffs[1]) {
            return Err(SeriesError::DegenerateSubstitution);
        }
        let k = self.order().min(u.order());
        let mut out = Self::zero_like(&self.coeffs[0], k);
        let mut upow = Series::constant(GaussianRational::one(), k);
        for i in 0..=k {
            out = out.try_add(&Self::constant(self.coeffs[i].clone(), k).scalar_mul(&upow))?;
            upow = upow.try_mul(u)?;
        }
        Ok(out)
    }

    /// `Σ_{j≤K} a^j / j!` for a series without constant term.
    pub fn exp_truncated(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let k = self.order();
        let one = self.coeffs[0].one_like();
        let mut out = Self::constant(one.clone(), k);
        let mut power = Self::constant(one, k);
        for j in 1..=k as u32 {
            power = power.try_mul(self)?;
            let inv = GaussianRational::real(factorial(j).recip());
            out = out.try_add(&power.scale(&inv))?;
        }
        Ok(out)
    }
}

impl<T: Carrier> std::ops::Add for &Series<T> {
    type Output = Series<T>;
    fn add(self, rhs: &Series<T>) -> Series<T> {
        self.try_add(rhs).expect("compatible series")
    }
}

impl<T: Carrier> std::ops::Sub for &Series<T> {
    type Output = Series<T>;
    fn sub(self, rhs: &Series<T>) -> Series<T> {
        self.try_sub(rhs).expect("compatible series")
    }
}

impl<T: Carrier> std::ops::Mul for &Series<T> {
    type Output = Series<T>;
    fn mul(self, rhs: &Series<T>) -> Series<T> {
        self.try_mul(rhs).expect("compatible series")
    }
}

impl<T: fmt::Debug> fmt::Debug for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c:?}]λ^{k}")?;
        }
        write!(f, " + O(λ^{})", self.coeffs.len())
    }
}

/// Role of the single indeterminate of a [`UnivarPoly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Indeterminate {
    X,
    Alpha,
    Delta,
}

impl Indeterminate {
    fn symbol(self) -> &'static str {
        match self {
            Indeterminate::X => "x",
            Indeterminate::Alpha => "α",
            Indeterminate::Delta => "Δ",
        }
    }

    fn latex(self) -> &'static str {
        match self {
            Indeterminate::X => "x",
            Indeterminate::Alpha => "\\alpha",
            Indeterminate::Delta => "\\Delta",
        }
    }
}

/// Dense univariate polynomial; no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct UnivarPoly {
    var: Indeterminate,
    coeffs: Vec<GaussianRational>,
}

impl UnivarPoly {
    pub fn new(var: Indeterminate, mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { var, coeffs }
    }

    pub fn from_ints(var: Indeterminate, coeffs: &[i64]) -> Self {
        Self::new(
            var,
            coeffs.iter().map(|&c| GaussianRational::from_int(c)).collect(),
        )
    }

    pub fn zero(var: Indeterminate) -> Self {
        Self::new(var, vec![])
    }

    pub fn constant(var: Indeterminate, c: GaussianRational) -> Self {
        Self::new(var, vec![c])
    }

    pub fn one(var: Indeterminate) -> Self {
        Self::constant(var, GaussianRational::one())
    }

    /// `c·t^k`
    pub fn monomial(var: Indeterminate, k: usize, c: GaussianRational) -> Self {
        let mut v = vec![GaussianRational::zero(); k + 1];
        v[k] = c;
        Self::new(var, v)
    }

    pub fn identity(var: Indeterminate) -> Self {
        Self::monomial(var, 1, GaussianRational::one())
    }

    pub fn var(&self) -> Indeterminate {
        self.var
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            self.var,
            (0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            self.var,
            (0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.var);
        }
        let mut v = vec![GaussianRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += &(a * b);
            }
        }
        Self::new(self.var, v)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.var), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.var,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, r: usize) -> Self {
        (0..r).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn eval(&self, t: &GaussianRational) -> GaussianRational {
        self.coeffs
            .iter()
            .rev()
            .fold(GaussianRational::zero(), |acc, c| &(&acc * t) + c)
    }

    /// The same polynomial as a one-variable [`FormalPoly`].
    pub fn to_formal(&self) -> FormalPoly {
        let mut p = FormalPoly::zero(1);
        for (k, c) in self.coeffs.iter().enumerate() {
            p = p.add(&FormalPoly::monomial(&[k as i32], c.clone()));
        }
        p
    }

    pub fn to_latex(&self) -> String {
        let t = self.var.latex();
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if Zero::is_zero(c) {
                continue;
            }
            let neg = c.is_real() && c.re < num_traits::zero();
            let mag = if neg { -c } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let cs = if !mag.is_real() {
                format!("({mag})")
            } else if mag.re.denom().is_one() {
                mag.re.numer().to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", mag.re.numer(), mag.re.denom())
            };
            let pw = match k {
                0 => String::new(),
                1 => t.to_string(),
                _ => format!("{t}^{{{k}}}"),
            };
            if pw.is_empty() {
                out.push_str(&cs);
            } else if mag.is_one() {
                out.push_str(&pw);
            } else {
                out.push_str(&cs);
                out.push_str(&pw);
            }
        }
        out
    }
}

impl fmt::Debug for UnivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.var.symbol();
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*{t}"),
                _ => format!("{c}*{t}^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Carrier for UnivarPoly {
    fn zero_like(&self) -> Self {
        Self::zero(self.var)
    }
    fn one_like(&self) -> Self {
        Self::one(self.var)
    }
    fn is_zero(&self) -> bool {
        UnivarPoly::is_zero(self)
    }
    fn compatible(&self, other: &Self) -> bool {
        self.var == other.var
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn scaled(&self, c: &GaussianRational) -> Self {
        self.scale(c)
    }
    fn try_inverse(&self) -> Option<Self> {
        match self.coeffs.as_slice() {
            [c] => c.inv().ok().map(|i| Self::constant(self.var, i)),
            _ => None,
        }
    }
}
