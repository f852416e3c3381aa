//! Sparse polynomials in `z⁰..zⁿ, z̄⁰..z̄ⁿ` (optionally a second block
//! `w, w̄`), localized at the distinguished quadric `x = Σ g_kk z̄ᵏzᵏ`.
//!
//! `z` and `z̄` are independent commuting variables; evaluation ties them
//! together by substituting `z̄ᵏ = conj(zᵏ)`. Under an indefinite metric the
//! quadric is what the literature calls `y`; the code calls it `x` throughout
//! and lets [`VarSpace`] carry the signs.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::scalar::{GaussianRational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operands live in different variable spaces")]
    SpaceMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable space: {0}")]
    InvalidSpace(String),
    #[error("evaluation point lies on the null set of the quadric")]
    NullSet,
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("element is not invertible in the Laurent class")]
    NotInvertible,
    #[error("operation requires a two-point space")]
    NotTwoPoint,
    #[error("operation requires a single-point space")]
    NotSinglePoint,
}

/// Dimension, metric signature, and whether the `w, w̄` block exists.
///
/// The complex dimension upstairs is `n + 1`. The metric is diagonal with
/// entries `±1`, stored as a bitmask of negative entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarSpace {
    n: usize,
    neg_mask: u16,
    two_point: bool,
}

pub const MAX_N: usize = 9;

impl VarSpace {
    pub fn euclidean(n: usize) -> Result<Self, PolyError> {
        Self::with_metric(n, &vec![1; n + 1])
    }

    /// `diag(-1, 1, …, 1)`, the signature of the noncompact dual.
    pub fn indefinite(n: usize) -> Result<Self, PolyError> {
        let mut m = vec![1; n + 1];
        m[0] = -1;
        Self::with_metric(n, &m)
    }

    pub fn with_metric(n: usize, metric: &[i8]) -> Result<Self, PolyError> {
        if n == 0 || n > MAX_N {
            return Err(PolyError::InvalidSpace(format!(
                "n must lie in 1..={MAX_N}, got {n}"
            )));
        }
        if metric.len() != n + 1 {
            return Err(PolyError::InvalidSpace(format!(
                "metric has {} entries, expected {}",
                metric.len(),
                n + 1
            )));
        }
        let mut neg_mask = 0u16;
        for (k, &s) in metric.iter().enumerate() {
            match s {
                1 => {}
                -1 => neg_mask |= 1 << k,
                _ => {
                    return Err(PolyError::InvalidSpace(format!(
                        "metric entries must be ±1, got {s}"
                    )))
                }
            }
        }
        Ok(Self {
            n,
            neg_mask,
            two_point: false,
        })
    }

    pub fn to_two_point(self) -> Self {
        Self {
            two_point: true,
            ..self
        }
    }

    pub fn to_single_point(self) -> Self {
        Self {
            two_point: false,
            ..self
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of complex coordinates per block, `n + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn is_two_point(&self) -> bool {
        self.two_point
    }

    pub fn blocks(&self) -> usize {
        if self.two_point {
            2
        } else {
            1
        }
    }

    pub fn nvars(&self) -> usize {
        2 * self.dim() * self.blocks()
    }

    pub fn metric(&self, k: usize) -> i64 {
        if self.neg_mask & (1 << k) != 0 {
            -1
        } else {
            1
        }
    }

    pub fn metric_signs(&self) -> Vec<i8> {
        (0..self.dim()).map(|k| self.metric(k) as i8).collect()
    }

    pub fn is_euclidean(&self) -> bool {
        self.neg_mask == 0
    }

    pub fn holo_index(&self, block: usize, k: usize) -> usize {
        block * 2 * self.dim() + k
    }

    pub fn anti_index(&self, block: usize, k: usize) -> usize {
        block * 2 * self.dim() + self.dim() + k
    }

    pub fn index(&self, var: Var) -> Result<usize, PolyError> {
        let (block, holo, k) = var.parts();
        if k > self.n || block >= self.blocks() {
            return Err(PolyError::UnknownVariable(var.to_string()));
        }
        Ok(if holo {
            self.holo_index(block, k)
        } else {
            self.anti_index(block, k)
        })
    }

    pub fn var_at(&self, idx: usize) -> Var {
        let d = self.dim();
        let block = idx / (2 * d);
        let r = idx % (2 * d);
        let (holo, k) = if r < d { (true, r) } else { (false, r - d) };
        match (block, holo) {
            (0, true) => Var::Z(k),
            (0, false) => Var::Zb(k),
            (_, true) => Var::W(k),
            (_, false) => Var::Wb(k),
        }
    }
}

/// A coordinate function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Z(usize),
    Zb(usize),
    W(usize),
    Wb(usize),
}

impl Var {
    /// `(block, holomorphic?, index)`
    fn parts(self) -> (usize, bool, usize) {
        match self {
            Var::Z(k) => (0, true, k),
            Var::Zb(k) => (0, false, k),
            Var::W(k) => (1, true, k),
            Var::Wb(k) => (1, false, k),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Z(k) => write!(f, "z{k}"),
            Var::Zb(k) => write!(f, "zb{k}"),
            Var::W(k) => write!(f, "w{k}"),
            Var::Wb(k) => write!(f, "wb{k}"),
        }
    }
}

/// Dense exponent vector of one term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub SmallVec<[u16; 12]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    fn bumped(&self, idx: usize, by: u16) -> Monomial {
        let mut m = self.clone();
        m.0[idx] += by;
        m
    }

    pub fn degree_in(&self, range: std::ops::Range<usize>) -> i32 {
        self.0[range].iter().map(|&e| e as i32).sum()
    }
}

/// Sparse polynomial with exact coefficients; never stores zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    space: VarSpace,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Poly {
    pub fn zero(space: VarSpace) -> Self {
        Self {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: VarSpace, c: GaussianRational) -> Self {
        let mut p = Self::zero(space);
        p.add_term(Monomial::one(space.nvars()), c);
        p
    }

    pub fn one(space: VarSpace) -> Self {
        Self::constant(space, GaussianRational::one())
    }

    pub fn var(space: VarSpace, v: Var) -> Result<Self, PolyError> {
        let idx = space.index(v)?;
        let mut p = Self::zero(space);
        p.add_term(
            Monomial::one(space.nvars()).bumped(idx, 1),
            GaussianRational::one(),
        );
        Ok(p)
    }

    /// `Σ_k g_kk zᵏ z̄ᵏ` in the given block.
    pub fn quadric(space: VarSpace, block: usize) -> Self {
        let mut p = Self::zero(space);
        for k in 0..space.dim() {
            let m = Monomial::one(space.nvars())
                .bumped(space.holo_index(block, k), 1)
                .bumped(space.anti_index(block, k), 1);
            p.add_term(m, GaussianRational::from_int(space.metric(k)));
        }
        p
    }

    pub fn from_terms(
        space: VarSpace,
        terms: impl IntoIterator<Item = (Monomial, GaussianRational)>,
    ) -> Self {
        let mut p = Self::zero(space);
        for (m, c) in terms {
            assert_eq!(m.0.len(), space.nvars(), "monomial length mismatch");
            p.add_term(m, c);
        }
        p
    }

    pub fn space(&self) -> VarSpace {
        self.space
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// Returns the constant if the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.0.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn sub_term(&mut self, m: Monomial, c: &GaussianRational) {
        self.add_term(m, -c);
    }

    fn check(&self, other: &Poly) -> Result<(), PolyError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(PolyError::SpaceMismatch)
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.sub_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        let mut acc: BTreeMap<Monomial, GaussianRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|e| *e += &c)
                    .or_insert(c);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Poly {
            space: self.space,
            terms: acc,
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.space);
        }
        Poly {
            space: self.space,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            space: self.space,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), -a)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.space);
        for _ in 0..e {
            acc = acc.try_mul(self).expect("same space");
        }
        acc
    }

    /// Partial derivative with respect to the variable at `idx`.
    pub fn diff_index(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.space);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[idx] -= 1;
            out.add_term(m2, c.scale(&Rational::from_integer(e.into())));
        }
        out
    }

    pub fn diff(&self, v: Var) -> Result<Poly, PolyError> {
        Ok(self.diff_index(self.space.index(v)?))
    }

    /// Exact quotient by the block quadric, or `None` if it does not divide.
    ///
    /// Reduction modulo the single generator `x` with leading monomial
    /// `zⁿz̄ⁿ`: every term divisible by `zⁿz̄ⁿ` is rewritten, level by level
    /// in `min(deg zⁿ, deg z̄ⁿ)`; the remainder is zero iff `x` divides.
    pub fn divide_by_quadric(&self, block: usize) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let sp = self.space;
        let n = sp.n;
        let (h, a) = (sp.holo_index(block, n), sp.anti_index(block, n));
        let pivot = GaussianRational::from_int(sp.metric(n));
        let level = |m: &Monomial| m.0[h].min(m.0[a]);
        let top = self.terms.keys().map(level).max().unwrap_or(0);
        if top == 0 {
            return None;
        }
        let mut rem = self.terms.clone();
        let mut quot = Poly::zero(sp);
        for k in (1..=top).rev() {
            let batch: Vec<(Monomial, GaussianRational)> = rem
                .iter()
                .filter(|(m, _)| level(m) == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect();
            for (m, c) in batch {
                rem.remove(&m);
                let mut qm = m;
                qm.0[h] -= 1;
                qm.0[a] -= 1;
                // pivot is ±1, so dividing equals multiplying
                let qc = &c * &pivot;
                for j in 0..n {
                    let t = qm
                        .bumped(sp.holo_index(block, j), 1)
                        .bumped(sp.anti_index(block, j), 1);
                    let delta = qc.scale(&Rational::from_integer(sp.metric(j).into()));
                    let e = rem.entry(t).or_insert_with(GaussianRational::zero);
                    *e -= &delta;
                }
                rem.retain(|_, c| !c.is_zero());
                quot.add_term(qm, qc);
            }
        }
        rem.is_empty().then_some(quot)
    }

    fn eval_at(&self, vals: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &vals[i].pow(e as i64).expect("nonnegative power");
                }
            }
            acc += &t;
        }
        acc
    }

    /// Swap holomorphic and antiholomorphic exponents, conjugate coefficients.
    pub fn conj(&self) -> Poly {
        let sp = self.space;
        let d = sp.dim();
        let mut out = Poly::zero(sp);
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            for b in 0..sp.blocks() {
                for k in 0..d {
                    m2.0.swap(sp.holo_index(b, k), sp.anti_index(b, k));
                }
            }
            out.add_term(m2, c.conj());
        }
        out
    }

    /// `(holomorphic, antiholomorphic)` degree ranges of a block.
    fn block_ranges(&self, block: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let d = self.space.dim();
        let h0 = self.space.holo_index(block, 0);
        let a0 = self.space.anti_index(block, 0);
        (h0..h0 + d, a0..a0 + d)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_poly(self))
    }
}

fn fmt_monomial(sp: &VarSpace, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(sp.var_at(i).to_string()),
            _ => parts.push(format!("{}^{}", sp.var_at(i), e)),
        }
    }
    parts.join("*")
}

fn fmt_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms.iter().enumerate() {
        let mono = fmt_monomial(&p.space, m);
        let (neg, mag) = if c.is_real() && c.re < Rational::zero() {
            (true, -c)
        } else {
            (false, c.clone())
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if mag.is_real() {
            mag.to_string()
        } else {
            format!("({mag})")
        };
        if mono.is_empty() {
            out.push_str(&coeff);
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{coeff}*{mono}"));
        }
    }
    out
}

/// Which Euler-type operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerOp {
    /// `zⁱ∂/∂zⁱ`
    E,
    /// `z̄ⁱ∂/∂z̄ⁱ`
    Ebar,
    /// `𝐢(E − Ē)`, the U(1) generator
    Y,
    /// `E_z + Ē_z + E_w + Ē_w` on a two-point space
    Hfull,
}

/// `numerator · x_z^(−xpow[0]) · x_w^(−xpow[1])`, kept in canonical form:
/// the numerator is not divisible by either quadric, and zero has `xpow = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentElem {
    num: Poly,
    xpow: [i32; 2],
}

impl LaurentElem {
    pub fn new(num: Poly, xpow: [i32; 2]) -> Self {
        let mut e = Self { num, xpow };
        e.canonicalize();
        e
    }

    pub fn from_poly(p: Poly) -> Self {
        Self::new(p, [0, 0])
    }

    pub fn zero(space: VarSpace) -> Self {
        Self {
            num: Poly::zero(space),
            xpow: [0, 0],
        }
    }

    pub fn one(space: VarSpace) -> Self {
        Self::constant(space, GaussianRational::one())
    }

    pub fn constant(space: VarSpace, c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(space, c))
    }

    pub fn var(space: VarSpace, v: Var) -> Result<Self, PolyError> {
        Ok(Self::from_poly(Poly::var(space, v)?))
    }

    /// `x^k` for any integer `k` (block 0).
    pub fn x_pow(space: VarSpace, k: i32) -> Self {
        Self {
            num: Poly::one(space),
            xpow: [-k, 0],
        }
    }

    /// `x^k` in the given block.
    pub fn x_pow_block(space: VarSpace, block: usize, k: i32) -> Self {
        let mut xpow = [0, 0];
        xpow[block] = -k;
        Self {
            num: Poly::one(space),
            xpow,
        }
    }

    pub fn x(space: VarSpace) -> Self {
        Self::x_pow(space, 1)
    }

    pub fn space(&self) -> VarSpace {
        self.num.space
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// Power `m` of the denominator `x^m` (negative: `x` multiplies).
    pub fn xpow(&self) -> i32 {
        self.xpow[0]
    }

    pub fn xpows(&self) -> [i32; 2] {
        self.xpow
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.xpow == [0, 0] && self.num.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.xpow != [0, 0] {
            return None;
        }
        self.num.as_constant()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.xpow = [0, 0];
            return;
        }
        for b in 0..self.space().blocks() {
            while let Some(q) = self.num.divide_by_quadric(b) {
                self.num = q;
                self.xpow[b] -= 1;
            }
        }
        if self.space().blocks() == 1 {
            self.xpow[1] = 0;
        }
    }

    pub fn is_canonical(&self) -> bool {
        let mut c = self.clone();
        c.canonicalize();
        c == *self
    }

    fn aligned(&self, other: &Self) -> (Poly, Poly, [i32; 2]) {
        let sp = self.space();
        let mut m = [0; 2];
        let mut a = self.num.clone();
        let mut b = other.num.clone();
        for blk in 0..sp.blocks() {
            m[blk] = self.xpow[blk].max(other.xpow[blk]);
            let q = Poly::quadric(sp, blk);
            let da = (m[blk] - self.xpow[blk]) as u32;
            let db = (m[blk] - other.xpow[blk]) as u32;
            if da > 0 {
                a = a.try_mul(&q.pow(da)).expect("same space");
            }
            if db > 0 {
                b = b.try_mul(&q.pow(db)).expect("same space");
            }
        }
        (a, b, m)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.num.check(&other.num)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let (a, b, m) = self.aligned(other);
        Ok(Self::new(a.try_add(&b)?, m))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.try_add(&other.neg())
    }

    /// Sum of many elements with a single canonicalization at the end.
    pub fn sum(
        space: VarSpace,
        items: impl IntoIterator<Item = LaurentElem>,
    ) -> Result<Self, PolyError> {
        let items: Vec<LaurentElem> = items.into_iter().filter(|e| !e.is_zero()).collect();
        if items.iter().any(|e| e.space() != space) {
            return Err(PolyError::SpaceMismatch);
        }
        if items.is_empty() {
            return Ok(Self::zero(space));
        }
        let blocks = space.blocks();
        let mut m = [0; 2];
        for b in 0..blocks {
            m[b] = items.iter().map(|e| e.xpow[b]).max().unwrap_or(0);
        }
        let quads: Vec<Poly> = (0..blocks).map(|b| Poly::quadric(space, b)).collect();
        let mut powers: BTreeMap<(usize, u32), Poly> = BTreeMap::new();
        let mut acc = Poly::zero(space);
        for e in items {
            let mut num = e.num;
            for b in 0..blocks {
                let da = (m[b] - e.xpow[b]) as u32;
                if da > 0 {
                    let q = powers.entry((b, da)).or_insert_with(|| quads[b].pow(da));
                    num = num.try_mul(q)?;
                }
            }
            for (mono, c) in num.terms {
                acc.add_term(mono, c);
            }
        }
        Ok(Self::new(acc, m))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        let num = self.num.try_mul(&other.num)?;
        if num.is_zero() {
            return Ok(Self::zero(self.space()));
        }
        // the quadrics are prime, so a product of canonical forms is canonical
        Ok(Self {
            num,
            xpow: [self.xpow[0] + other.xpow[0], self.xpow[1] + other.xpow[1]],
        })
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.space());
        }
        Self {
            num: self.num.scale(c),
            xpow: self.xpow,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            xpow: self.xpow,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.space());
        for _ in 0..e {
            acc = acc.try_mul(self).expect("same space");
        }
        acc
    }

    /// Multiplicative inverse; only `c·x^k` (times `x_w^l`) is a unit.
    pub fn inverse(&self) -> Result<Self, PolyError> {
        let c = self.num.as_constant().ok_or(PolyError::NotInvertible)?;
        let ci = c.inv().map_err(|_| PolyError::NotInvertible)?;
        Ok(Self {
            num: Poly::constant(self.space(), ci),
            xpow: [-self.xpow[0], -self.xpow[1]],
        })
    }

    pub fn try_pow_i(&self, e: i32) -> Result<Self, PolyError> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inverse()?.pow(e.unsigned_abs()))
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            num: self.num.conj(),
            xpow: self.xpow,
        }
    }

    /// Partial derivative with respect to the variable at `idx`, applying
    /// the quotient rule through `∂x/∂zᵏ = g_kk z̄ᵏ`.
    pub fn diff_index(&self, idx: usize) -> Self {
        let sp = self.space();
        let d = sp.dim();
        let block = idx / (2 * d);
        let m = self.xpow[block];
        let dp = self.num.diff_index(idx);
        if m == 0 {
            return Self::new(dp, self.xpow);
        }
        let r = idx % (2 * d);
        let (k, partner) = if r < d {
            (r, sp.anti_index(block, r))
        } else {
            (r - d, sp.holo_index(block, r - d))
        };
        // ∂(P x^-m) = (x ∂P − m g z̄ P) x^(-m-1); x ∤ the bracket when m ≠ 0
        let q = Poly::quadric(sp, block);
        let mut num = dp.try_mul(&q).expect("same space");
        let coef = GaussianRational::from_int(m as i64 * sp.metric(k));
        for (mono, c) in self.num.terms() {
            let mut m2 = mono.clone();
            m2.0[partner] += 1;
            num.sub_term(m2, &(c * &coef));
        }
        let mut xpow = self.xpow;
        xpow[block] += 1;
        if num.is_zero() {
            return Self::zero(sp);
        }
        Self { num, xpow }
    }

    pub fn diff(&self, v: Var) -> Result<Self, PolyError> {
        Ok(self.diff_index(self.space().index(v)?))
    }

    /// `(holomorphic degree − m, antiholomorphic degree − m)` of a block if
    /// all terms agree. Zero has bidegree `(0, 0)`.
    pub fn block_bidegree(&self, block: usize) -> Option<(i32, i32)> {
        if self.is_zero() {
            return Some((0, 0));
        }
        let (hr, ar) = self.num.block_ranges(block);
        let m = self.xpow[block];
        let mut it = self
            .num
            .terms()
            .map(|(mono, _)| (mono.degree_in(hr.clone()) - m, mono.degree_in(ar.clone()) - m));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn bidegree(&self) -> Option<(i32, i32)> {
        self.block_bidegree(0)
    }

    /// Bidegree `(0, 0)`: a pullback from projective space.
    pub fn is_homogeneous(&self) -> bool {
        self.bidegree() == Some((0, 0))
    }

    /// Equal holomorphic and antiholomorphic degree on every term.
    pub fn is_u1_invariant(&self) -> bool {
        let (hr, ar) = self.num.block_ranges(0);
        self.num
            .terms()
            .all(|(m, _)| m.degree_in(hr.clone()) == m.degree_in(ar.clone()))
    }

    fn map_terms(&self, f: impl Fn(&Monomial) -> GaussianRational) -> Self {
        let mut out = Poly::zero(self.space());
        for (m, c) in self.num.terms() {
            out.add_term(m.clone(), c * &f(m));
        }
        Self::new(out, self.xpow)
    }

    /// Euler-type operators act diagonally on monomials, using `E x = x`.
    pub fn euler(&self, op: EulerOp) -> Result<Self, PolyError> {
        let sp = self.space();
        let int = |k: i32| GaussianRational::from_int(k as i64);
        let (hr0, ar0) = self.num.block_ranges(0);
        let m0 = self.xpow[0];
        Ok(match op {
            EulerOp::E => self.map_terms(|m| int(m.degree_in(hr0.clone()) - m0)),
            EulerOp::Ebar => self.map_terms(|m| int(m.degree_in(ar0.clone()) - m0)),
            EulerOp::Y => self
                .map_terms(|m| int(m.degree_in(hr0.clone()) - m.degree_in(ar0.clone())))
                .scale(&GaussianRational::i()),
            EulerOp::Hfull => {
                if !sp.is_two_point() {
                    return Err(PolyError::NotTwoPoint);
                }
                let (hr1, ar1) = self.num.block_ranges(1);
                let m1 = self.xpow[1];
                self.map_terms(|m| {
                    int(m.degree_in(hr0.clone()) + m.degree_in(ar0.clone()) - 2 * m0
                        + m.degree_in(hr1.clone())
                        + m.degree_in(ar1.clone())
                        - 2 * m1)
                })
            }
        })
    }

    /// Evaluate at complex coordinates, with `z̄ᵏ = conj(zᵏ)`. On a two-point
    /// space the point lists `z` followed by `w`.
    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational, PolyError> {
        let sp = self.space();
        let d = sp.dim();
        let expected = d * sp.blocks();
        if point.len() != expected {
            return Err(PolyError::PointDimension {
                expected,
                got: point.len(),
            });
        }
        let mut vals = vec![GaussianRational::zero(); sp.nvars()];
        for b in 0..sp.blocks() {
            for k in 0..d {
                vals[sp.holo_index(b, k)] = point[b * d + k].clone();
                vals[sp.anti_index(b, k)] = point[b * d + k].conj();
            }
        }
        let mut acc = self.num.eval_at(&vals);
        for b in 0..sp.blocks() {
            let m = self.xpow[b];
            if m == 0 {
                continue;
            }
            let q = Poly::quadric(sp, b).eval_at(&vals);
            if q.is_zero() && m > 0 {
                return Err(PolyError::NullSet);
            }
            acc = &acc * &q.pow(-(m as i64)).map_err(|_| PolyError::NullSet)?;
        }
        Ok(acc)
    }

    /// `f ⊗ g` on the two-point space: `f(z) g(w)`.
    pub fn tensor(f: &Self, g: &Self) -> Result<Self, PolyError> {
        let sp = f.space();
        if sp != g.space() {
            return Err(PolyError::SpaceMismatch);
        }
        if sp.is_two_point() {
            return Err(PolyError::NotSinglePoint);
        }
        let tp = sp.to_two_point();
        let half = sp.nvars();
        let mut num = Poly::zero(tp);
        for (ma, ca) in f.num.terms() {
            for (mb, cb) in g.num.terms() {
                let mut m = Monomial::one(tp.nvars());
                m.0[..half].copy_from_slice(&ma.0);
                m.0[half..].copy_from_slice(&mb.0);
                num.add_term(m, ca * cb);
            }
        }
        Ok(Self::new(num, [f.xpow[0], g.xpow[0]]))
    }

    /// Restriction to the diagonal `w = z`.
    pub fn diagonal(&self) -> Result<Self, PolyError> {
        let tp = self.space();
        if !tp.is_two_point() {
            return Err(PolyError::NotTwoPoint);
        }
        let sp = tp.to_single_point();
        let half = sp.nvars();
        let mut num = Poly::zero(sp);
        for (m, c) in self.num.terms() {
            let mono = Monomial((0..half).map(|i| m.0[i] + m.0[half + i]).collect());
            num.add_term(mono, c.clone());
        }
        Ok(Self::new(num, [self.xpow[0] + self.xpow[1], 0]))
    }

    /// Re-home the element into another space with the same shape.
    pub fn with_space(&self, space: VarSpace) -> Result<Self, PolyError> {
        let old = self.space();
        if old.nvars() != space.nvars() || old.blocks() != space.blocks() {
            return Err(PolyError::SpaceMismatch);
        }
        let num = Poly::from_terms(space, self.num.terms().map(|(m, c)| (m.clone(), c.clone())));
        Ok(Self::new(num, self.xpow))
    }
}

impl fmt::Display for LaurentElem {
    /// Expression syntax accepted by the parser, e.g. `(z0*zb0)/x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sp = self.space();
        let quad = if sp.is_euclidean() { "x" } else { "y" };
        let num = fmt_poly(&self.num);
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for b in 0..sp.blocks() {
            let name = if b == 0 { quad.to_string() } else { format!("{quad}w") };
            let m = self.xpow[b];
            let s = if m.abs() == 1 {
                name
            } else {
                format!("{name}^{}", m.abs())
            };
            match m.cmp(&0) {
                std::cmp::Ordering::Greater => neg.push(s),
                std::cmp::Ordering::Less => pos.push(s),
                std::cmp::Ordering::Equal => {}
            }
        }
        if pos.is_empty() && neg.is_empty() {
            return write!(f, "{num}");
        }
        write!(f, "({num})")?;
        for p in pos {
            write!(f, "*{p}")?;
        }
        for q in neg {
            write!(f, "/{q}")?;
        }
        Ok(())
    }
}

/// One numerator term: exponents in variable-index order, then the coefficient.
#[derive(Serialize)]
struct TermJson<'a> {
    exps: &'a [u16],
    coeff: &'a GaussianRational,
}

impl Serialize for LaurentElem {
    /// `{"xpow": [k, l], "terms": [{"exps": […], "coeff": "p/q+r/s*i"}, …]}`
    /// for `numerator · x^(−k) · x_w^(−l)`.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let terms: Vec<TermJson> = self
            .num
            .terms()
            .map(|(m, c)| TermJson { exps: m.exps(), coeff: c })
            .collect();
        let mut st = s.serialize_struct("LaurentElem", 2)?;
        st.serialize_field("xpow", &self.xpow)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl fmt::Debug for LaurentElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn sp1() -> VarSpace {
        VarSpace::euclidean(1).unwrap()
    }

    fn v(sp: VarSpace, var: Var) -> LaurentElem {
        LaurentElem::var(sp, var).unwrap()
    }

    fn phi(sp: VarSpace) -> LaurentElem {
        v(sp, Var::Z(0))
            .try_mul(&v(sp, Var::Zb(0)))
            .unwrap()
            .try_mul(&LaurentElem::x_pow(sp, -1))
            .unwrap()
    }

    #[test]
    fn localization_identities() {
        let sp = sp1();
        let z0 = v(sp, Var::Z(0));
        let zb0 = v(sp, Var::Zb(0));
        let lhs = z0
            .try_mul(&LaurentElem::x_pow(sp, -1))
            .unwrap()
            .try_mul(&zb0)
            .unwrap()
            .try_mul(&LaurentElem::x(sp))
            .unwrap();
        assert_eq!(lhs, z0.try_mul(&zb0).unwrap());
        let one = LaurentElem::x(sp)
            .try_mul(&LaurentElem::x_pow(sp, -1))
            .unwrap();
        assert!(one.is_one());
    }

    #[test]
    fn quadric_canonicalizes_to_x() {
        let sp = sp1();
        let e = LaurentElem::from_poly(Poly::quadric(sp, 0));
        assert_eq!(e.xpow(), -1);
        assert!(e.numerator().as_constant().unwrap().is_one());
    }

    #[test]
    fn divide_by_x_cases() {
        let sp = sp1();
        let x = Poly::quadric(sp, 0);
        assert_eq!(x.divide_by_quadric(0).unwrap(), Poly::one(sp));
        let z0zb0 = Poly::var(sp, Var::Z(0))
            .unwrap()
            .try_mul(&Poly::var(sp, Var::Zb(0)).unwrap())
            .unwrap();
        assert!(z0zb0.divide_by_quadric(0).is_none());
        let p = x.pow(2).try_sub(&x).unwrap();
        assert_eq!(
            p.divide_by_quadric(0).unwrap(),
            x.try_sub(&Poly::one(sp)).unwrap()
        );
        // indefinite metric pivots the same way
        let sp = VarSpace::indefinite(2).unwrap();
        let y = Poly::quadric(sp, 0);
        let p = y.try_mul(&Poly::var(sp, Var::Z(1)).unwrap()).unwrap();
        assert_eq!(
            p.divide_by_quadric(0).unwrap(),
            Poly::var(sp, Var::Z(1)).unwrap()
        );
    }

    #[test]
    fn derivatives() {
        let sp = sp1();
        let z0zb0 = v(sp, Var::Z(0)).try_mul(&v(sp, Var::Zb(0))).unwrap();
        assert_eq!(z0zb0.diff(Var::Z(0)).unwrap(), v(sp, Var::Zb(0)));
        let inv_x = LaurentElem::x_pow(sp, -1);
        // ∂(1/x)/∂z¹ = −z̄¹/x²
        let expected = v(sp, Var::Zb(1))
            .neg()
            .try_mul(&LaurentElem::x_pow(sp, -2))
            .unwrap();
        assert_eq!(inv_x.diff(Var::Z(1)).unwrap(), expected);
        // ∂(z⁰z̄⁰/x)/∂z¹ = −z⁰z̄⁰z̄¹/x²
        let expected = z0zb0
            .try_mul(&v(sp, Var::Zb(1)))
            .unwrap()
            .neg()
            .try_mul(&LaurentElem::x_pow(sp, -2))
            .unwrap();
        assert_eq!(phi(sp).diff(Var::Z(1)).unwrap(), expected);
    }

    #[test]
    fn polynomial_derivative_is_recanonicalized() {
        // ∂/∂z⁰ of z⁰(z⁰z̄⁰ + 2z¹z̄¹) is 2x
        let sp = sp1();
        let z0 = v(sp, Var::Z(0));
        let p = z0
            .try_mul(
                &z0.try_mul(&v(sp, Var::Zb(0)))
                    .unwrap()
                    .try_add(
                        &v(sp, Var::Z(1))
                            .try_mul(&v(sp, Var::Zb(1)))
                            .unwrap()
                            .scale(&GaussianRational::from_int(2)),
                    )
                    .unwrap(),
            )
            .unwrap();
        let d = p.diff(Var::Z(0)).unwrap();
        assert_eq!(d, LaurentElem::x(sp).scale(&GaussianRational::from_int(2)));
        assert!(d.is_canonical());
    }

    #[test]
    fn bidegrees() {
        let sp = sp1();
        assert_eq!(phi(sp).bidegree(), Some((0, 0)));
        assert!(phi(sp).is_homogeneous());
        let x = LaurentElem::x(sp);
        assert_eq!(x.bidegree(), Some((1, 1)));
        assert!(x.is_u1_invariant() && !x.is_homogeneous());
        let z0 = v(sp, Var::Z(0));
        assert_eq!(z0.bidegree(), Some((1, 0)));
        assert!(!z0.is_u1_invariant());
        let mixed = z0.try_add(&LaurentElem::one(sp)).unwrap();
        assert_eq!(mixed.bidegree(), None);
    }

    #[test]
    fn euler_operators() {
        let sp = sp1();
        assert!(phi(sp).euler(EulerOp::E).unwrap().is_zero());
        assert!(LaurentElem::x(sp).euler(EulerOp::Y).unwrap().is_zero());
        let z0 = v(sp, Var::Z(0));
        assert_eq!(z0.euler(EulerOp::E).unwrap(), z0);
        assert_eq!(
            z0.euler(EulerOp::Hfull),
            Err(PolyError::NotTwoPoint)
        );
    }

    #[test]
    fn evaluation() {
        let sp = sp1();
        let p = |a: i64, b: i64| vec![GaussianRational::from_int(a), GaussianRational::from_int(b)];
        assert_eq!(
            LaurentElem::x(sp).eval(&p(1, 0)).unwrap(),
            GaussianRational::one()
        );
        assert_eq!(
            phi(sp).eval(&p(1, 1)).unwrap(),
            GaussianRational::from_ratio(1, 2)
        );
        let ind = VarSpace::indefinite(1).unwrap();
        assert!(LaurentElem::x(ind).eval(&p(1, 1)).unwrap().is_zero());
        assert_eq!(
            LaurentElem::x_pow(ind, -1).eval(&p(1, 1)),
            Err(PolyError::NullSet)
        );
        let half = GaussianRational::new(ratio(1, 2), ratio(1, 3));
        assert!(LaurentElem::x(sp).eval(&[half.clone(), half]).unwrap().is_real());
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let a = LaurentElem::x(sp1());
        let b = LaurentElem::x(VarSpace::euclidean(2).unwrap());
        assert_eq!(a.try_add(&b), Err(PolyError::SpaceMismatch));
        assert_eq!(a.try_mul(&b), Err(PolyError::SpaceMismatch));
        assert!(VarSpace::euclidean(0).is_err());
        assert!(VarSpace::with_metric(1, &[1, 2]).is_err());
        assert!(Poly::var(sp1(), Var::Z(2)).is_err());
    }

    #[test]
    fn tensor_and_diagonal() {
        let sp = sp1();
        let f = phi(sp);
        let g = v(sp, Var::Z(1)).try_mul(&v(sp, Var::Zb(0))).unwrap();
        let t = LaurentElem::tensor(&f, &g).unwrap();
        assert_eq!(t.xpows(), [1, 0]);
        assert_eq!(t.diagonal().unwrap(), f.try_mul(&g).unwrap());
        assert!(t.euler(EulerOp::Hfull).is_ok());
    }

    #[test]
    fn display_forms() {
        let sp = sp1();
        assert_eq!(phi(sp).to_string(), "(z0*zb0)/x");
        assert_eq!(LaurentElem::x(sp).to_string(), "(1)*x");
        let ind = VarSpace::indefinite(1).unwrap();
        assert_eq!(LaurentElem::x_pow(ind, -2).to_string(), "(1)/y^2");
    }
}
