//! Sparse Laurent polynomials in a handful of formal commuting variables.
//!
//! Used for the radial line (one variable `x`), the symbol calculus in
//! `(x, α)` and `(x, α, β)`, and the inhomogeneous chart coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::scalar::{GaussianRational, Rational};

type Exps = SmallVec<[i32; 4]>;

#[derive(Clone, PartialEq, Eq)]
pub struct FormalPoly {
    nvars: usize,
    terms: BTreeMap<Exps, GaussianRational>,
}

impl FormalPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(SmallVec::from_elem(0, nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    /// `c · Π vᵢ^eᵢ`
    pub fn monomial(exps: &[i32], c: GaussianRational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps.iter().copied().collect(), c);
        p
    }

    /// The single variable `v_idx`.
    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Self::monomial(&e, GaussianRational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &GaussianRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exps: &[i32]) -> GaussianRational {
        let key: Exps = exps.iter().copied().collect();
        self.terms.get(&key).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, e: Exps, c: GaussianRational) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut acc: BTreeMap<Exps, GaussianRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                let c = ca * cb;
                acc.entry(e).and_modify(|v| *v += &c).or_insert(c);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Self {
            nvars: self.nvars,
            terms: acc,
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&GaussianRational::real(r.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a single term `c·v^e`; `None` for anything else.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let ci = c.inv().ok()?;
        Some(Self::monomial(
            &e.iter().map(|k| -k).collect::<Vec<_>>(),
            ci,
        ))
    }

    /// `∂/∂v_idx`, valid for negative exponents too.
    pub fn diff(&self, idx: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[idx];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[idx] -= 1;
            out.add_term(e2, c * &GaussianRational::from_int(k as i64));
        }
        out
    }

    /// Multiply by `v_idx^k`.
    pub fn shift(&self, idx: usize, k: i32) -> Self {
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[idx] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Replace `v_idx` by the polynomial `by`; the exponent of `v_idx` must
    /// be non-negative in every term unless `by` is a single monomial.
    pub fn substitute(&self, idx: usize, by: &Self) -> Self {
        assert_eq!(self.nvars, by.nvars, "variable count mismatch");
        let inv = by.monomial_inverse();
        let mut powers: BTreeMap<i32, Self> = BTreeMap::new();
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[idx];
            let pk = powers
                .entry(k)
                .or_insert_with(|| {
                    if k >= 0 {
                        by.pow(k as u32)
                    } else {
                        inv.as_ref()
                            .expect("negative power needs a monomial substitute")
                            .pow(k.unsigned_abs())
                    }
                })
                .clone();
            let mut rest = e.clone();
            rest[idx] = 0;
            let mut t = Self::zero(self.nvars);
            t.add_term(rest, c.clone());
            out = out.add(&t.mul(&pk));
        }
        out
    }

    /// Substitute a scalar for `v_idx`; the variable slot stays, with
    /// exponent zero. Negative exponents need a nonzero value.
    pub fn eval_var(&self, idx: usize, value: &GaussianRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let f = value.pow(e[idx] as i64).expect("nonzero value");
            let mut e2 = e.clone();
            e2[idx] = 0;
            out.add_term(e2, c * &f);
        }
        out
    }

    /// Embed into a space with more variables: variable `i` moves to `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2: Exps = SmallVec::from_elem(0, nvars);
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Lowest exponent of `v_idx` over all terms (zero for the zero poly).
    pub fn min_exp(&self, idx: usize) -> i32 {
        self.terms.keys().map(|e| e[idx]).min().unwrap_or(0)
    }

    pub fn max_exp(&self, idx: usize) -> i32 {
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(0)
    }

    /// Write the polynomial with the given variable names.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(j, &k)| {
                    if k == 1 {
                        names[j].to_string()
                    } else {
                        format!("{}^{}", names[j], k)
                    }
                })
                .collect();
            let cs = if c.is_real() {
                c.to_string()
            } else {
                format!("({c})")
            };
            if i > 0 {
                out.push_str(" + ");
            }
            if mono.is_empty() {
                out.push_str(&cs);
            } else if c.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{cs}*{}", mono.join("*")));
            }
        }
        out
    }
}

impl fmt::Debug for FormalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.display_with(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_arithmetic() {
        let x = FormalPoly::var(1, 0);
        let xinv = x.monomial_inverse().unwrap();
        assert_eq!(x.mul(&xinv), FormalPoly::one(1));
        // d/dx x^-2 = -2 x^-3
        let xm2 = FormalPoly::monomial(&[-2], GaussianRational::one());
        assert_eq!(
            xm2.diff(0),
            FormalPoly::monomial(&[-3], GaussianRational::from_int(-2))
        );
    }

    #[test]
    fn substitution() {
        // (a^2 + a) with a -> a + b
        let a = FormalPoly::var(2, 0);
        let b = FormalPoly::var(2, 1);
        let p = a.pow(2).add(&a);
        let q = p.substitute(0, &a.add(&b));
        let ab = a.add(&b);
        assert_eq!(q, ab.pow(2).add(&ab));
        let r = p.eval_var(0, &GaussianRational::from_int(3));
        assert_eq!(r, FormalPoly::constant(2, GaussianRational::from_int(12)));
    }
}
