//! Laplacian polynomials for the reduced product on projective space, the
//! Moreno–Ortega-Navarro recursion, and an inhomogeneous-chart cross-check
//! of the local form of `M̃_r`.

use num_traits::Zero;

use crate::equiv::a_coeff;
use crate::error::{Error, Result};
use crate::formal::FormalPoly;
use crate::poly::LaurentElem;
use crate::reduce::{k_coeff, ReducedFn};
use crate::scalar::{binomial, factorial, GaussianRational, Rational};
use crate::series::{Indeterminate, UnivarPoly};
use crate::wick::{m_r, StarContext};

fn gr(r: Rational) -> GaussianRational {
    GaussianRational::real(r)
}

fn int(k: i64) -> Rational {
    Rational::from_integer(k.into())
}

/// `p_r(Δ) = Π_{k=0}^{r−1} (Δ + k(k−n))`.
pub fn p_poly(r: usize, n: usize) -> UnivarPoly {
    let n = n as i64;
    (0..r as i64).fold(UnivarPoly::one(Indeterminate::Delta), |acc, k| {
        let factor = UnivarPoly::from_ints(Indeterminate::Delta, &[k * (k - n), 1]);
        acc.mul(&factor)
    })
}

/// `k̃_r(Δ) = Σ_{t=1}^{r} (1/t!) p_t(Δ) A⁽ᵗ⁾_{r−t}`.
pub fn k_poly(r: usize, n: usize) -> UnivarPoly {
    (1..=r).fold(UnivarPoly::zero(Indeterminate::Delta), |acc, t| {
        let c = a_coeff(t as u32, (r - t) as u32) / factorial(t as u32);
        acc.add(&p_poly(t, n).scale(&gr(c)))
    })
}

/// `Σ_s c_{r,s} p_s(Δ)` from the triple-sum coefficients.
pub fn k_poly_from_triple_sum(r: usize, n: usize) -> UnivarPoly {
    (1..=r).fold(UnivarPoly::zero(Indeterminate::Delta), |acc, s| {
        acc.add(&p_poly(s, n).scale(&gr(k_coeff(r as u32, s as u32))))
    })
}

/// `(r+1)k̃_{r+1} − [Δk̃_r − Σ_{s=0}^{r−1} r!(r+3+s)/((s+2)!(r−1−s)!) k̃_{r−s}]`
/// on the two-sphere.
pub fn moreno_recursion_residual(r: usize) -> UnivarPoly {
    let n = 1;
    let delta = UnivarPoly::identity(Indeterminate::Delta);
    let lhs = k_poly(r + 1, n).scale(&gr(int(r as i64 + 1)));
    let mut bracket = delta.mul(&k_poly(r, n));
    for s in 0..r {
        let c = factorial(r as u32) * int((r + 3 + s) as i64)
            / (factorial(s as u32 + 2) * factorial((r - 1 - s) as u32));
        bracket = bracket.sub(&k_poly(r - s, n).scale(&gr(c)));
    }
    lhs.sub(&bracket)
}

/// Coefficient of `p_s(Δ)` left over in the recursion, for `2 ≤ s ≤ r`.
pub fn coeff_vanishing(r: u32, s: u32) -> Rational {
    let mut sum = Rational::zero();
    for t in s..=r {
        sum += (binomial(r + 1, t - 1) + binomial(r, t - 1)) * a_coeff(s, t - s);
    }
    let rp1 = int(r as i64 + 1);
    a_coeff(s, r + 1 - s) + sum / &rp1
        - int(s as i64) / &rp1
            * (a_coeff(s - 1, r + 1 - s) - int(s as i64 - 1) * a_coeff(s, r - s))
}

/// `A⁽ˢ⁾_{t+1−s} − (A⁽ˢ⁻¹⁾_{t+1−s} − s·A⁽ˢ⁾_{t−s})` for `1 ≤ s ≤ t`.
pub fn a_identity_check(s: u32, t: u32) -> Rational {
    a_coeff(s, t + 1 - s) - (a_coeff(s - 1, t + 1 - s) - int(s as i64) * a_coeff(s, t - s))
}

/// Denominator factors `1 + u·v̄`, `1 + v·ū`, `1 + u·ū`, `1 + v·v̄`.
pub const FACTORS: usize = 4;

/// Rational function `numerator / Π D_i^{den_i}` in chart variables
/// `u, ū, v, v̄` (each of length `n`). Exponents may be negative.
#[derive(Clone, Debug)]
pub struct ChartElem {
    n: usize,
    num: FormalPoly,
    den: [i32; FACTORS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartVar {
    U(usize),
    Ubar(usize),
    V(usize),
    Vbar(usize),
}

impl ChartVar {
    fn index(self, n: usize) -> usize {
        match self {
            ChartVar::U(k) => k,
            ChartVar::Ubar(k) => n + k,
            ChartVar::V(k) => 2 * n + k,
            ChartVar::Vbar(k) => 3 * n + k,
        }
    }
}

impl ChartElem {
    pub fn new(n: usize, num: FormalPoly, den: [i32; FACTORS]) -> Self {
        assert_eq!(num.nvars(), 4 * n, "chart numerator has 4n variables");
        Self { n, num, den }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, FormalPoly::zero(4 * n), [0; FACTORS])
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &FormalPoly {
        &self.num
    }

    pub fn denominators(&self) -> [i32; FACTORS] {
        self.den
    }

    /// `1 + Σ aᵏ bᵏ` for the factor's two variable families.
    fn factor(&self, i: usize) -> FormalPoly {
        let n = self.n;
        let (a, b): (fn(usize) -> ChartVar, fn(usize) -> ChartVar) = match i {
            0 => (ChartVar::U, ChartVar::Vbar),
            1 => (ChartVar::V, ChartVar::Ubar),
            2 => (ChartVar::U, ChartVar::Ubar),
            _ => (ChartVar::V, ChartVar::Vbar),
        };
        let mut p = FormalPoly::one(4 * n);
        for k in 0..n {
            p = p.add(&FormalPoly::var(4 * n, a(k).index(n)).mul(&FormalPoly::var(4 * n, b(k).index(n))));
        }
        p
    }

    /// Same value with every denominator exponent raised to `target`.
    fn raised(&self, target: [i32; FACTORS]) -> FormalPoly {
        let mut num = self.num.clone();
        for (i, (&t, &d)) in target.iter().zip(&self.den).enumerate() {
            debug_assert!(t >= d);
            if t > d {
                num = num.mul(&self.factor(i).pow((t - d) as u32));
            }
        }
        num
    }

    fn common(&self, other: &Self) -> [i32; FACTORS] {
        let mut m = [0; FACTORS];
        for (i, slot) in m.iter_mut().enumerate() {
            *slot = self.den[i].max(other.den[i]);
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.common(other);
        Self::new(self.n, self.raised(m).add(&other.raised(m)), m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.common(other);
        Self::new(self.n, self.raised(m).sub(&other.raised(m)), m)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut den = self.den;
        for (d, o) in den.iter_mut().zip(other.den) {
            *d += o;
        }
        Self::new(self.n, self.num.mul(&other.num), den)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::new(self.n, self.num.scale(c), self.den)
    }

    /// Partial derivative by the quotient rule; each factor's derivative is
    /// a polynomial.
    pub fn diff(&self, v: ChartVar) -> Self {
        let n = self.n;
        let idx = v.index(n);
        let mut active = Vec::new();
        for i in 0..FACTORS {
            if self.den[i] != 0 {
                let dd = self.factor(i).diff(idx);
                if !dd.is_zero() {
                    active.push((i, dd));
                }
            }
        }
        let mut den = self.den;
        for (i, _) in &active {
            den[*i] += 1;
        }
        let all: Vec<FormalPoly> = active.iter().map(|(i, _)| self.factor(*i)).collect();
        let prod = |skip: Option<usize>| {
            all.iter()
                .enumerate()
                .filter(|(j, _)| Some(*j) != skip)
                .fold(FormalPoly::one(4 * n), |acc, (_, f)| acc.mul(f))
        };
        let mut num = self.num.diff(idx).mul(&prod(None));
        for (j, (i, dd)) in active.iter().enumerate() {
            let e = GaussianRational::from_int(self.den[*i] as i64);
            num = num.sub(&self.num.mul(dd).mul(&prod(Some(j))).scale(&e));
        }
        Self::new(n, num, den)
    }

    /// `Δ_{uū} = (1 + u·ū) Σ_{k,l} (uᵏūˡ + δᵏˡ) ∂_{uᵏ}∂_{ūˡ}`.
    pub fn laplacian(&self) -> Self {
        let n = self.n;
        let mut acc = Self::zero(n);
        for k in 0..n {
            let dk = self.diff(ChartVar::U(k));
            for l in 0..n {
                let mut coef = FormalPoly::var(4 * n, ChartVar::U(k).index(n))
                    .mul(&FormalPoly::var(4 * n, ChartVar::Ubar(l).index(n)));
                if k == l {
                    coef = coef.add(&FormalPoly::one(4 * n));
                }
                let term = dk.diff(ChartVar::Ubar(l)).mul(&Self::new(n, coef, [0; FACTORS]));
                acc = acc.add(&term);
            }
        }
        let mut den = acc.den;
        den[2] -= 1;
        Self::new(n, acc.num, den)
    }

    /// Restriction `u → v`, `ū → v̄`; every factor becomes `1 + v·v̄`.
    pub fn diagonal(&self) -> Self {
        let n = self.n;
        let mut map: Vec<usize> = (0..4 * n).collect();
        for k in 0..n {
            map[ChartVar::U(k).index(n)] = ChartVar::V(k).index(n);
            map[ChartVar::Ubar(k).index(n)] = ChartVar::Vbar(k).index(n);
        }
        let total: i32 = self.den.iter().sum();
        Self::new(n, self.num.embed(4 * n, &map), [0, 0, 0, total])
    }

    /// Equality of rational functions by cross-multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        let m = self.common(other);
        self.raised(m) == other.raised(m)
    }
}

/// Holomorphic and antiholomorphic families for the chart image.
#[derive(Clone, Copy)]
enum Continuation {
    /// `φ(u, v̄)` over `1 + u·v̄`
    First,
    /// `ψ(v, ū)` over `1 + v·ū`
    Second,
    /// `f(v, v̄)` over `1 + v·v̄`
    Diagonal,
}

/// Chart image `z⁰ = 1`, `zⁱ = (chart variable)ⁱ` of a bidegree-(0,0) element.
fn to_chart(f: &LaurentElem, cont: Continuation) -> Result<ChartElem> {
    let sp = f.space();
    if !sp.is_euclidean() || sp.is_two_point() {
        return Err(Error::InvalidContext("chart images need the Euclidean single-point space".into()));
    }
    if !f.is_homogeneous() {
        return Err(Error::NotHomogeneous(f.to_string()));
    }
    let n = sp.n();
    let (hol, anti, slot): (fn(usize) -> ChartVar, fn(usize) -> ChartVar, usize) = match cont {
        Continuation::First => (ChartVar::U, ChartVar::Vbar, 0),
        Continuation::Second => (ChartVar::V, ChartVar::Ubar, 1),
        Continuation::Diagonal => (ChartVar::V, ChartVar::Vbar, 3),
    };
    let mut num = FormalPoly::zero(4 * n);
    for (mono, c) in f.numerator().terms() {
        let mut e = vec![0i32; 4 * n];
        for k in 1..=n {
            e[hol(k - 1).index(n)] += mono.0[sp.holo_index(0, k)] as i32;
            e[anti(k - 1).index(n)] += mono.0[sp.anti_index(0, k)] as i32;
        }
        num = num.add(&FormalPoly::monomial(&e, c.clone()));
    }
    let mut den = [0; FACTORS];
    den[slot] = f.xpow();
    Ok(ChartElem::new(n, num, den))
}

/// `m∘p_r(Δ_{uū}) φ(u, v̄) ψ(v, ū)` minus the chart image of `M̃_r(φ, ψ)`,
/// returned on the diagonal.
pub fn chart_cross_check(phi: &ReducedFn, psi: &ReducedFn, r: usize, ctx: &StarContext) -> Result<ChartElem> {
    let n = ctx.space().n();
    let mut g = to_chart(phi.as_laurent(), Continuation::First)?
        .mul(&to_chart(psi.as_laurent(), Continuation::Second)?);
    for k in 0..r as i64 {
        let shift = GaussianRational::from_int(k * (k - n as i64));
        g = g.laplacian().add(&g.scale(&shift));
    }
    let lhs = g.diagonal();
    let rhs = to_chart(&m_r(phi.as_laurent(), psi.as_laurent(), r, ctx)?, Continuation::Diagonal)?;
    let diff = lhs.sub(&rhs);
    if diff.equals(&ChartElem::zero(n)) {
        Ok(ChartElem::zero(n))
    } else {
        Ok(diff)
    }
}

/// LaTeX rows `k̃_r(Δ) = …` for `r = 1..=rmax`.
pub fn k_table_latex(rmax: usize, n: usize) -> String {
    let mut out = String::from("\\begin{align*}\n");
    for r in 1..=rmax {
        out.push_str(&format!("\\tilde k_{{{r}}}(\\Delta) &= {} \\\\\n", k_poly(r, n).to_latex()));
    }
    out.push_str("\\end{align*}\n");
    out
}

/// `true` if every leftover coefficient vanishes for `2 ≤ s ≤ r ≤ rmax`.
pub fn coefficients_vanish(rmax: u32) -> bool {
    (2..=rmax).all(|r| (2..=r).all(|s| coeff_vanishing(r, s).is_zero()))
}

/// Constant `1` as a chart element.
pub fn chart_one(n: usize) -> ChartElem {
    ChartElem::new(n, FormalPoly::one(4 * n), [0; FACTORS])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;

    fn d(c: &[i64]) -> UnivarPoly {
        UnivarPoly::from_ints(Indeterminate::Delta, c)
    }

    #[test]
    fn laplacian_polynomials() {
        assert_eq!(p_poly(1, 1), d(&[0, 1]));
        assert_eq!(p_poly(2, 1), d(&[0, 0, 1]));
        assert_eq!(p_poly(3, 1), d(&[0, 0, 2, 1]));
        assert_eq!(k_poly(1, 1), d(&[0, 1]));
        let half = GaussianRational::from_ratio(1, 2);
        assert_eq!(k_poly(2, 1), d(&[0, -1]).add(&d(&[0, 0, 1]).scale(&half)));
        let expected = d(&[0, 1])
            .add(&d(&[0, 0, 1]).scale(&GaussianRational::from_ratio(-3, 2)))
            .add(&d(&[0, 0, 2, 1]).scale(&GaussianRational::from_ratio(1, 6)));
        assert_eq!(k_poly(3, 1), expected);
        for r in 1..=6 {
            for n in 1..=3 {
                assert_eq!(k_poly(r, n), k_poly_from_triple_sum(r, n));
            }
        }
    }

    #[test]
    fn recursion_and_identities() {
        for r in 1..=5 {
            assert!(moreno_recursion_residual(r).is_zero(), "r = {r}");
        }
        assert!(coeff_vanishing(2, 2).is_zero());
        assert!(coeff_vanishing(3, 2).is_zero());
        assert!(coeff_vanishing(8, 5).is_zero());
        assert!(a_identity_check(1, 1).is_zero());
        assert!(a_identity_check(2, 2).is_zero());
        assert!(a_identity_check(5, 9).is_zero());
        assert!(coefficients_vanish(6));
    }

    #[test]
    fn chart_derivatives() {
        // ∂_u of 1/(1 + u v̄) = −v̄/(1 + u v̄)²
        let n = 1;
        let inv = ChartElem::new(n, FormalPoly::one(4), [1, 0, 0, 0]);
        let got = inv.diff(ChartVar::U(0));
        let expected = ChartElem::new(
            n,
            FormalPoly::var(4, ChartVar::Vbar(0).index(n)).scale(&GaussianRational::from_int(-1)),
            [2, 0, 0, 0],
        );
        assert!(got.equals(&expected));
        assert!(inv.diff(ChartVar::V(0)).is_zero());
    }

    #[test]
    fn chart_agrees_with_homogeneous_coordinates() {
        let ctx = StarContext::cpn(1).unwrap();
        let sp = ctx.space();
        let v = |x: Var| LaurentElem::var(sp, x).unwrap();
        let xinv = LaurentElem::x_pow(sp, -1);
        let phi = ReducedFn::new(v(Var::Z(0)).try_mul(&v(Var::Zb(0))).unwrap().try_mul(&xinv).unwrap()).unwrap();
        let psi = ReducedFn::new(v(Var::Z(1)).try_mul(&v(Var::Zb(0))).unwrap().try_mul(&xinv).unwrap()).unwrap();
        let one = ReducedFn::one(&ctx);
        for r in 1..=2 {
            assert!(chart_cross_check(&phi, &phi, r, &ctx).unwrap().is_zero());
            assert!(chart_cross_check(&phi, &psi, r, &ctx).unwrap().is_zero());
            assert!(chart_cross_check(&psi, &one, r, &ctx).unwrap().is_zero());
        }
    }
}
