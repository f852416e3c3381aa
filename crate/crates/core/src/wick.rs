//! The Wick star product upstairs, its bidifferential pieces, the radial
//! product on the `x`-line, and the two-point operators `N`, `ℳ_r`, `H`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::poly::{EulerOp, LaurentElem, Poly, PolyError, VarSpace};
use crate::scalar::{factorial, ratio, GaussianRational, Rational};
use crate::series::{Indeterminate, Series, UnivarPoly};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 6;

/// Parameters shared by every product: the space, the truncation order `K`,
/// the coefficients `d_r` of `D = Σ (λ/x)^r d_r`, and the level `μ < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarContext {
    space: VarSpace,
    order: usize,
    d: Vec<Rational>,
    mu: Rational,
}

impl StarContext {
    pub fn new(space: VarSpace, order: usize, d: Vec<Rational>, mu: Rational) -> Result<Self> {
        if space.is_two_point() {
            return Err(Error::InvalidContext("context space must be single-point".into()));
        }
        if order == 0 {
            return Err(Error::InvalidContext("truncation order must be at least 1".into()));
        }
        if !d.first().is_some_and(|d0| d0.is_one()) {
            return Err(Error::InvalidContext("D must start with d0 = 1".into()));
        }
        if !mu.is_negative() {
            return Err(Error::InvalidContext(format!("level mu = {mu} must be negative")));
        }
        let mut d = d;
        while d.len() > 1 && d.last().is_some_and(|c| c.is_zero()) {
            d.pop();
        }
        Ok(Self { space, order, d, mu })
    }

    /// Euclidean metric, `K = 6`, `D ≡ 1`, `μ = −1/2`.
    pub fn cpn(n: usize) -> Result<Self> {
        Self::new(VarSpace::euclidean(n)?, DEFAULT_ORDER, vec![Rational::one()], ratio(-1, 2))
    }

    /// Metric `(−1, 1, …, 1)`, otherwise as [`StarContext::cpn`].
    pub fn dn(n: usize) -> Result<Self> {
        Self::new(VarSpace::indefinite(n)?, DEFAULT_ORDER, vec![Rational::one()], ratio(-1, 2))
    }

    pub fn with_order(self, order: usize) -> Result<Self> {
        Self::new(self.space, order, self.d, self.mu)
    }

    pub fn with_d(self, d: Vec<Rational>) -> Result<Self> {
        Self::new(self.space, self.order, d, self.mu)
    }

    pub fn with_mu(self, mu: Rational) -> Result<Self> {
        Self::new(self.space, self.order, self.d, mu)
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn d(&self) -> &[Rational] {
        &self.d
    }

    /// `d_r`, zero past the stored list.
    pub fn d_coeff(&self, r: usize) -> Rational {
        self.d.get(r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn d_is_one(&self) -> bool {
        self.d.len() == 1
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    /// `−2μ`, the value of `x` on the level set.
    pub fn level(&self) -> Rational {
        -(&self.mu * Rational::from_integer(2.into()))
    }

    fn check_space(&self, f: &LaurentElem) -> Result<()> {
        if f.space() == self.space {
            Ok(())
        } else {
            Err(PolyError::SpaceMismatch.into())
        }
    }
}

/// `f + 0·λ + … + 0·λ^K`.
pub fn lift(f: &LaurentElem, order: usize) -> Series<LaurentElem> {
    Series::constant(f.clone(), order)
}

/// `Σ c_k x^k` for a polynomial in `x`.
pub fn radial(rho: &UnivarPoly, space: VarSpace) -> LaurentElem {
    LaurentElem::sum(
        space,
        rho.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| LaurentElem::x_pow(space, k as i32).scale(c)),
    )
    .expect("single space")
}

/// `∂/∂x = (E + Ē)/(2x)` on U(1)-invariant elements.
pub fn d_dx(f: &LaurentElem) -> Result<LaurentElem> {
    if !f.is_u1_invariant() {
        return Err(Error::NotInvariant(f.to_string()));
    }
    let sp = f.space();
    let e = f.euler(EulerOp::E)?.try_add(&f.euler(EulerOp::Ebar)?)?;
    Ok(e
        .try_mul(&LaurentElem::x_pow(sp, -1))?
        .scale(&GaussianRational::from_ratio(1, 2)))
}

type Tuple = SmallVec<[u8; 8]>;

/// Iterated partial derivatives along one family of variables, indexed by
/// sorted index tuples so each multiset is computed once.
struct Derivs {
    vars: Vec<usize>,
    levels: Vec<BTreeMap<Tuple, LaurentElem>>,
}

impl Derivs {
    fn new(f: &LaurentElem, vars: Vec<usize>) -> Self {
        let mut base = BTreeMap::new();
        if !f.is_zero() {
            base.insert(Tuple::new(), f.clone());
        }
        Self {
            vars,
            levels: vec![base],
        }
    }

    fn holomorphic(f: &LaurentElem) -> Self {
        let sp = f.space();
        Self::new(f, (0..sp.dim()).map(|k| sp.holo_index(0, k)).collect())
    }

    fn antiholomorphic(f: &LaurentElem) -> Self {
        let sp = f.space();
        Self::new(f, (0..sp.dim()).map(|k| sp.anti_index(0, k)).collect())
    }

    fn level(&mut self, r: usize) -> &BTreeMap<Tuple, LaurentElem> {
        while self.levels.len() <= r {
            let mut next = BTreeMap::new();
            for (t, e) in self.levels.last().unwrap() {
                let start = t.last().copied().unwrap_or(0) as usize;
                for j in start..self.vars.len() {
                    let de = e.diff_index(self.vars[j]);
                    if !de.is_zero() {
                        let mut t2 = t.clone();
                        t2.push(j as u8);
                        next.insert(t2, de);
                    }
                }
            }
            self.levels.push(next);
        }
        &self.levels[r]
    }
}

/// `g^α / α!` for the multiset encoded by a sorted tuple.
fn tuple_weight(space: VarSpace, t: &[u8]) -> GaussianRational {
    let mut w = Rational::one();
    let mut i = 0;
    while i < t.len() {
        let mut j = i;
        while j < t.len() && t[j] == t[i] {
            j += 1;
        }
        let mult = (j - i) as u32;
        w /= factorial(mult);
        if space.metric(t[i] as usize) < 0 && mult % 2 == 1 {
            w = -w;
        }
        i = j;
    }
    GaussianRational::real(w)
}

fn contraction(space: VarSpace, df: &mut Derivs, dg: &mut Derivs, r: usize) -> LaurentElem {
    let lf = df.level(r).clone();
    let lg = dg.level(r);
    let terms = lf.iter().filter_map(|(t, a)| {
        lg.get(t).map(|b| {
            a.try_mul(b)
                .expect("single space")
                .scale(&tuple_weight(space, t))
        })
    });
    LaurentElem::sum(space, terms.collect::<Vec<_>>()).expect("single space")
}

/// `W_r(f, g) = Σ_{|α|=r} (g^α/α!) ∂^α_z f ∂^α_z̄ g`, the λ^r coefficient of
/// `f ∗ g`, for `r = 0..=rmax`.
pub fn wick_coefficients(f: &LaurentElem, g: &LaurentElem, rmax: usize) -> Result<Vec<LaurentElem>> {
    if f.space() != g.space() {
        return Err(PolyError::SpaceMismatch.into());
    }
    if f.space().is_two_point() {
        return Err(PolyError::NotSinglePoint.into());
    }
    let sp = f.space();
    let mut df = Derivs::holomorphic(f);
    let mut dg = Derivs::antiholomorphic(g);
    Ok((0..=rmax)
        .map(|r| contraction(sp, &mut df, &mut dg, r))
        .collect())
}

/// The Wick product `F ∗ G` through order `min(K, order F, order G)`.
pub fn wick_product(
    f: &Series<LaurentElem>,
    g: &Series<LaurentElem>,
    ctx: &StarContext,
) -> Result<Series<LaurentElem>> {
    let sp = ctx.space;
    for c in f.coeffs().iter().chain(g.coeffs()) {
        ctx.check_space(c)?;
    }
    let k = ctx.order.min(f.order()).min(g.order());
    let mut dfs: Vec<Derivs> = (0..=k).map(|a| Derivs::holomorphic(f.coeff(a))).collect();
    let mut dgs: Vec<Derivs> = (0..=k).map(|b| Derivs::antiholomorphic(g.coeff(b))).collect();
    let mut buckets: Vec<Vec<LaurentElem>> = vec![Vec::new(); k + 1];
    for a in 0..=k {
        if f.coeff(a).is_zero() {
            continue;
        }
        for b in 0..=(k - a) {
            if g.coeff(b).is_zero() {
                continue;
            }
            for r in 0..=(k - a - b) {
                let w = contraction(sp, &mut dfs[a], &mut dgs[b], r);
                buckets[a + b + r].push(w);
            }
        }
    }
    let coeffs = buckets
        .into_iter()
        .map(|items| LaurentElem::sum(sp, items))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Series::new(coeffs))
}

/// `{F, G} = (2/𝐢) g_kk (∂_k F ∂̄_k G − ∂̄_k F ∂_k G)`.
pub fn poisson(f: &LaurentElem, g: &LaurentElem, ctx: &StarContext) -> Result<LaurentElem> {
    ctx.check_space(f)?;
    ctx.check_space(g)?;
    let sp = ctx.space;
    let mut terms = Vec::new();
    for k in 0..sp.dim() {
        let (h, a) = (sp.holo_index(0, k), sp.anti_index(0, k));
        let s = GaussianRational::from_int(sp.metric(k));
        terms.push(f.diff_index(h).try_mul(&g.diff_index(a))?.scale(&s));
        terms.push(f.diff_index(a).try_mul(&g.diff_index(h))?.scale(&-s));
    }
    Ok(LaurentElem::sum(sp, terms)?.scale(&GaussianRational::from_int(-2).mul_i()))
}

/// `(F ∗ G − G ∗ F) − (𝐢λ/2){F, G}`; the λ¹ coefficient always vanishes.
pub fn commutator_check(
    f: &LaurentElem,
    g: &LaurentElem,
    ctx: &StarContext,
) -> Result<Series<LaurentElem>> {
    let k = ctx.order;
    let fs = lift(f, k);
    let gs = lift(g, k);
    let comm = wick_product(&fs, &gs, ctx)?.try_sub(&wick_product(&gs, &fs, ctx)?)?;
    let pb = poisson(f, g, ctx)?.scale(&GaussianRational::from_ratio(1, 2).mul_i());
    Ok(comm.try_sub(&Series::monomial(pb, 1, k))?)
}

/// `M_r(f, g) = x^r g^{i₁j₁}⋯ ∂ʳf/∂z^{i…} ∂ʳg/∂z̄^{j…}`.
pub fn m_r(f: &LaurentElem, g: &LaurentElem, r: usize, ctx: &StarContext) -> Result<LaurentElem> {
    ctx.check_space(f)?;
    ctx.check_space(g)?;
    let w = wick_coefficients(f, g, r)?.pop().expect("r + 1 coefficients");
    Ok(w
        .try_mul(&LaurentElem::x_pow(ctx.space, r as i32))?
        .scale(&GaussianRational::real(factorial(r as u32))))
}

/// `M_0 … M_rmax`, sharing derivative work.
pub fn m_all(f: &LaurentElem, g: &LaurentElem, rmax: usize, ctx: &StarContext) -> Result<Vec<LaurentElem>> {
    ctx.check_space(f)?;
    ctx.check_space(g)?;
    wick_coefficients(f, g, rmax)?
        .into_iter()
        .enumerate()
        .map(|(r, w)| {
            Ok(w.try_mul(&LaurentElem::x_pow(ctx.space, r as i32))?
                .scale(&GaussianRational::real(factorial(r as u32))))
        })
        .collect()
}

/// `ρ₁ ⋆ ρ₂ = Σ_r λ^r (x^r/r!) ρ₁⁽ʳ⁾ ρ₂⁽ʳ⁾` on the `x`-line.
pub fn radial_star(rho1: &UnivarPoly, rho2: &UnivarPoly, ctx: &StarContext) -> Result<Series<UnivarPoly>> {
    if rho1.var() != Indeterminate::X || rho2.var() != Indeterminate::X {
        return Err(Error::InvalidContext("radial functions are polynomials in x".into()));
    }
    let coeffs = (0..=ctx.order)
        .map(|r| {
            let c = GaussianRational::real(factorial(r as u32).recip());
            UnivarPoly::monomial(Indeterminate::X, r, c)
                .mul(&rho1.nth_derivative(r))
                .mul(&rho2.nth_derivative(r))
        })
        .collect();
    Ok(Series::new(coeffs))
}

/// `p(x) e^{γx}`.
#[derive(Clone)]
struct ExpPoly {
    poly: UnivarPoly,
    rate: GaussianRational,
}

impl ExpPoly {
    fn derivative(&self) -> Self {
        Self {
            poly: self.poly.derivative().add(&self.poly.scale(&self.rate)),
            rate: self.rate.clone(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            poly: self.poly.mul(&o.poly),
            rate: &self.rate + &o.rate,
        }
    }
}

/// Residual of `e_α ⋆ e_β = e_{α+β+λαβ}`. Both sides carry the common
/// factor `e^{(α+β)x}`, which is divided out; each coefficient is then a
/// polynomial in `x`.
pub fn exp_symbol_product(alpha: &Rational, beta: &Rational, ctx: &StarContext) -> Result<Series<UnivarPoly>> {
    let x = Indeterminate::X;
    let a = GaussianRational::real(alpha.clone());
    let b = GaussianRational::real(beta.clone());
    let mut ea = ExpPoly { poly: UnivarPoly::one(x), rate: a.clone() };
    let mut eb = ExpPoly { poly: UnivarPoly::one(x), rate: b.clone() };
    let mut lhs = Vec::new();
    for r in 0..=ctx.order {
        let prod = ea.mul(&eb);
        if prod.rate != &a + &b {
            return Err(Error::Internal("exponential rate drifted".into()));
        }
        let c = GaussianRational::real(factorial(r as u32).recip());
        lhs.push(UnivarPoly::monomial(x, r, c).mul(&prod.poly));
        ea = ea.derivative();
        eb = eb.derivative();
    }
    let lhs = Series::new(lhs);
    let exponent = Series::monomial(UnivarPoly::monomial(x, 1, &a * &b), 1, ctx.order);
    let rhs = exponent.exp_truncated()?;
    Ok(lhs.try_sub(&rhs)?)
}

/// Operators on functions of two points `(z, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoPointOp {
    /// `⟨z, w̄⟩ 𝒫`
    N,
    /// `⟨z, w̄⟩^r 𝒫^r`
    M(usize),
    /// `E_z + Ē_z + E_w + Ē_w`
    H,
}

fn require_two_point(f: &LaurentElem) -> Result<VarSpace> {
    let sp = f.space();
    if sp.is_two_point() {
        Ok(sp)
    } else {
        Err(PolyError::NotTwoPoint.into())
    }
}

/// `⟨z, w̄⟩ = Σ g_ii zⁱ w̄ⁱ`, which restricts to `x` on the diagonal.
fn pairing(sp: VarSpace) -> LaurentElem {
    let mut p = Poly::zero(sp);
    for i in 0..sp.dim() {
        let zi = Poly::var(sp, crate::poly::Var::Z(i)).expect("in range");
        let wbi = Poly::var(sp, crate::poly::Var::Wb(i)).expect("in range");
        p = p
            .try_add(&zi.try_mul(&wbi).expect("same space").scale(&GaussianRational::from_int(sp.metric(i))))
            .expect("same space");
    }
    LaurentElem::from_poly(p)
}

/// `𝒫F = Σ g_jj ∂²F/∂zʲ∂w̄ʲ`.
fn cross_laplacian(f: &LaurentElem) -> LaurentElem {
    let sp = f.space();
    let terms = (0..sp.dim()).map(|j| {
        f.diff_index(sp.holo_index(0, j))
            .diff_index(sp.anti_index(1, j))
            .scale(&GaussianRational::from_int(sp.metric(j)))
    });
    LaurentElem::sum(sp, terms.collect::<Vec<_>>()).expect("single space")
}

pub fn twopoint_op(f: &LaurentElem, op: TwoPointOp) -> Result<LaurentElem> {
    let sp = require_two_point(f)?;
    match op {
        TwoPointOp::N => Ok(pairing(sp).try_mul(&cross_laplacian(f))?),
        TwoPointOp::M(r) => {
            let mut g = f.clone();
            for _ in 0..r {
                g = cross_laplacian(&g);
            }
            Ok(pairing(sp).pow(r as u32).try_mul(&g)?)
        }
        TwoPointOp::H => Ok(f.euler(EulerOp::Hfull)?),
    }
}

/// `Π_{s<r} (N − s(n−s) − s·H)` applied to `F`, or without the `H` terms.
pub fn calm_product(f: &LaurentElem, r: usize, include_h: bool) -> Result<LaurentElem> {
    let sp = require_two_point(f)?;
    let n = sp.n() as i64;
    let mut g = f.clone();
    for s in 0..r as i64 {
        let mut next = twopoint_op(&g, TwoPointOp::N)?
            .try_sub(&g.scale(&GaussianRational::from_int(s * (n - s))))?;
        if include_h {
            next = next.try_sub(&twopoint_op(&g, TwoPointOp::H)?.scale(&GaussianRational::from_int(s)))?;
        }
        g = next;
    }
    Ok(g)
}

/// `m∘ℳ_r(f⊗g) − m∘Π_{s<r}(N − s(n−s))(f⊗g)` for homogeneous `f`, `g`.
pub fn product_formula_check(
    r: usize,
    f: &LaurentElem,
    g: &LaurentElem,
    ctx: &StarContext,
) -> Result<LaurentElem> {
    ctx.check_space(f)?;
    ctx.check_space(g)?;
    for h in [f, g] {
        if !h.is_homogeneous() {
            return Err(Error::NotHomogeneous(h.to_string()));
        }
    }
    let fg = LaurentElem::tensor(f, g)?;
    let lhs = twopoint_op(&fg, TwoPointOp::M(r))?.diagonal()?;
    let rhs = calm_product(&fg, r, false)?.diagonal()?;
    Ok(lhs.try_sub(&rhs)?)
}

/// Named residuals of the four Wick-product relations for radial,
/// invariant and homogeneous arguments, plus homogeneity flags.
#[derive(Debug, Clone)]
pub struct WickRelationReport {
    pub residuals: Vec<(&'static str, Series<LaurentElem>)>,
    pub flags: Vec<(&'static str, bool)>,
}

impl WickRelationReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero()) && self.flags.iter().all(|(_, ok)| *ok)
    }

    /// Names of the failing relations.
    pub fn failures(&self) -> Vec<&'static str> {
        self.residuals
            .iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(n, _)| *n)
            .chain(self.flags.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n))
            .collect()
    }
}

/// Checks, to order `K`:
/// (i) `R ∗ F = Σ (λ^r/r!) x^r ρ⁽ʳ⁾ ∂_x^r F = F ∗ R` for invariant `F`;
/// (ii) `R₁ ∗ R₂ = R₂ ∗ R₁ = ρ₁ ⋆ ρ₂`;
/// (iii) `R ∗ f = R·f = f ∗ R` for homogeneous `f`;
/// (iv) `M_r(f, g)` homogeneous and `f ∗ g = Σ (1/r!)(λ/x)^r M_r(f, g)`.
pub fn lemma21_check(
    rho1: &UnivarPoly,
    rho2: &UnivarPoly,
    big_f: &LaurentElem,
    f: &LaurentElem,
    g: &LaurentElem,
    ctx: &StarContext,
) -> Result<WickRelationReport> {
    let sp = ctx.space;
    let k = ctx.order;
    if !big_f.is_u1_invariant() {
        return Err(Error::NotInvariant(big_f.to_string()));
    }
    for h in [f, g] {
        if !h.is_homogeneous() {
            return Err(Error::NotHomogeneous(h.to_string()));
        }
    }
    let r1 = lift(&radial(rho1, sp), k);
    let r2 = lift(&radial(rho2, sp), k);
    let fs = lift(big_f, k);

    let mut formula = Vec::with_capacity(k + 1);
    let mut dxf = big_f.clone();
    for r in 0..=k {
        let c = GaussianRational::real(factorial(r as u32).recip());
        let rho_r = radial(&rho1.nth_derivative(r), sp);
        formula.push(
            LaurentElem::x_pow(sp, r as i32)
                .try_mul(&rho_r)?
                .try_mul(&dxf)?
                .scale(&c),
        );
        dxf = d_dx(&dxf)?;
    }
    let formula = Series::new(formula);
    let i_left = wick_product(&r1, &fs, ctx)?.try_sub(&formula)?;
    let i_right = wick_product(&fs, &r1, ctx)?.try_sub(&formula)?;

    let r12 = wick_product(&r1, &r2, ctx)?;
    let ii_comm = r12.try_sub(&wick_product(&r2, &r1, ctx)?)?;
    let star = radial_star(rho1, rho2, ctx)?.map_to(|p| radial(p, sp));
    let ii_radial = r12.try_sub(&star)?;

    let fl = lift(f, k);
    let rf = lift(&radial(rho1, sp).try_mul(f)?, k);
    let iii_left = wick_product(&r1, &fl, ctx)?.try_sub(&rf)?;
    let iii_right = wick_product(&fl, &r1, ctx)?.try_sub(&rf)?;

    let ms = m_all(f, g, k, ctx)?;
    let homogeneous = ms.iter().all(|m| m.is_homogeneous());
    let annihilated = ms.iter().all(|m| {
        m.euler(EulerOp::E).is_ok_and(|e| e.is_zero()) && m.euler(EulerOp::Ebar).is_ok_and(|e| e.is_zero())
    });
    let mut expansion = Vec::with_capacity(k + 1);
    for (r, m) in ms.iter().enumerate() {
        let c = GaussianRational::real(factorial(r as u32).recip());
        expansion.push(LaurentElem::x_pow(sp, -(r as i32)).try_mul(m)?.scale(&c));
    }
    let iv = wick_product(&fl, &lift(g, k), ctx)?.try_sub(&Series::new(expansion))?;

    Ok(WickRelationReport {
        residuals: vec![
            ("radial-invariant left", i_left),
            ("radial-invariant right", i_right),
            ("radial commutativity", ii_comm),
            ("radial closure", ii_radial),
            ("radial-homogeneous left", iii_left),
            ("radial-homogeneous right", iii_right),
            ("homogeneous expansion", iv),
        ],
        flags: vec![
            ("M_r bidegree (0,0)", homogeneous),
            ("M_r killed by Euler operators", annihilated),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;

    fn ctx1() -> StarContext {
        StarContext::cpn(1).unwrap()
    }

    fn v(ctx: &StarContext, var: Var) -> LaurentElem {
        LaurentElem::var(ctx.space(), var).unwrap()
    }

    fn phi(ctx: &StarContext) -> LaurentElem {
        v(ctx, Var::Z(0))
            .try_mul(&v(ctx, Var::Zb(0)))
            .unwrap()
            .try_mul(&LaurentElem::x_pow(ctx.space(), -1))
            .unwrap()
    }

    fn q(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn context_validation() {
        let c = ctx1();
        assert_eq!(c.order(), 6);
        assert_eq!(c.level(), Rational::one());
        assert!(c.clone().with_mu(ratio(1, 2)).is_err());
        assert!(c.clone().with_mu(Rational::zero()).is_err());
        assert!(c.clone().with_order(0).is_err());
        assert!(c.clone().with_d(vec![ratio(2, 1)]).is_err());
        let d = c.with_d(vec![Rational::one(), Rational::one(), Rational::zero()]).unwrap();
        assert_eq!(d.d().len(), 2);
        assert!(!d.d_is_one());
    }

    #[test]
    fn basic_wick_products() {
        let c = ctx1().with_order(3).unwrap();
        let sp = c.space();
        let z = v(&c, Var::Z(1));
        let zb = v(&c, Var::Zb(1));
        let zz = z.try_mul(&zb).unwrap();
        let p = wick_product(&lift(&z, 3), &lift(&zb, 3), &c).unwrap();
        assert_eq!(p.coeff(0), &zz);
        assert_eq!(p.coeff(1), &LaurentElem::one(sp));
        assert!(p.coeff(2).is_zero());
        let p = wick_product(&lift(&zb, 3), &lift(&z, 3), &c).unwrap();
        assert_eq!(p, lift(&zz, 3));
        let z0 = v(&c, Var::Z(0));
        let z1b = v(&c, Var::Zb(1));
        assert!(wick_product(&lift(&z0, 3), &lift(&z1b, 3), &c).unwrap().coeff(1).is_zero());
        // x ∗ x = x² + λx
        let x = LaurentElem::x(sp);
        let p = wick_product(&lift(&x, 3), &lift(&x, 3), &c).unwrap();
        assert_eq!(p.coeff(0), &x.pow(2));
        assert_eq!(p.coeff(1), &x);
        assert!(p.coeff(2).is_zero());
    }

    #[test]
    fn indefinite_metric_sign() {
        let c = StarContext::dn(1).unwrap().with_order(2).unwrap();
        let z = v(&c, Var::Z(0));
        let zb = v(&c, Var::Zb(0));
        let p = wick_product(&lift(&z, 2), &lift(&zb, 2), &c).unwrap();
        assert_eq!(p.coeff(1), &LaurentElem::constant(c.space(), q(-1)));
    }

    #[test]
    fn poisson_brackets() {
        let c = ctx1();
        let z = v(&c, Var::Z(0));
        let zb = v(&c, Var::Zb(0));
        let pb = poisson(&z, &zb, &c).unwrap();
        assert_eq!(pb, LaurentElem::constant(c.space(), GaussianRational::from_int(-2).mul_i()));
        let x = LaurentElem::x(c.space());
        let zz = z.try_mul(&zb).unwrap();
        assert!(poisson(&x, &zz, &c).unwrap().is_zero());
        assert!(poisson(&zz, &zz, &c).unwrap().is_zero());
    }

    #[test]
    fn first_order_commutator() {
        let c = ctx1().with_order(3).unwrap();
        let z = v(&c, Var::Z(0));
        let zb = v(&c, Var::Zb(0));
        assert!(commutator_check(&z, &zb, &c).unwrap().is_zero());
        let res = commutator_check(&phi(&c), &v(&c, Var::Z(1)), &c).unwrap();
        assert!(res.coeff(1).is_zero());
        assert!(commutator_check(&phi(&c), &phi(&c), &c).unwrap().is_zero());
    }

    #[test]
    fn m_one_of_phi() {
        let c = ctx1();
        let p = phi(&c);
        let expected = p.try_sub(&p.pow(2)).unwrap();
        assert_eq!(m_r(&p, &p, 1, &c).unwrap(), expected);
        assert_eq!(m_r(&p, &p, 0, &c).unwrap(), p.pow(2));
        let one = LaurentElem::one(c.space());
        assert!(m_r(&one, &p, 2, &c).unwrap().is_zero());
    }

    #[test]
    fn radial_products() {
        let c = ctx1().with_order(3).unwrap();
        let x = UnivarPoly::identity(Indeterminate::X);
        let s = radial_star(&x, &x, &c).unwrap();
        assert_eq!(s.coeff(0), &x.pow(2));
        assert_eq!(s.coeff(1), &x);
        let x2 = x.pow(2);
        let s = radial_star(&x2, &x2, &c).unwrap();
        assert_eq!(s.coeff(0), &x.pow(4));
        assert_eq!(s.coeff(1), &x.pow(3).scale(&q(4)));
        assert_eq!(s.coeff(2), &x2.scale(&q(2)));
        assert!(s.coeff(3).is_zero());
        let one = UnivarPoly::one(Indeterminate::X);
        assert_eq!(radial_star(&one, &x2, &c).unwrap(), Series::constant(x2.clone(), 3));
    }

    #[test]
    fn exponential_symbols() {
        let c = ctx1().with_order(3).unwrap();
        for (a, b) in [(0, 5), (1, 1), (1, -1), (2, -3)] {
            let res = exp_symbol_product(&ratio(a, 1), &ratio(b, 1), &c).unwrap();
            assert!(res.is_zero(), "alpha={a} beta={b}");
        }
    }

    #[test]
    fn derivative_along_x() {
        let c = ctx1();
        let sp = c.space();
        assert_eq!(d_dx(&LaurentElem::x_pow(sp, 3)).unwrap(), LaurentElem::x_pow(sp, 2).scale(&q(3)));
        assert!(d_dx(&phi(&c)).unwrap().is_zero());
        assert!(d_dx(&v(&c, Var::Z(0))).is_err());
    }

    #[test]
    fn two_point_operators() {
        let c = ctx1();
        let p = phi(&c);
        let fg = LaurentElem::tensor(&p, &p).unwrap();
        let m1 = twopoint_op(&fg, TwoPointOp::M(1)).unwrap().diagonal().unwrap();
        assert_eq!(m1, m_r(&p, &p, 1, &c).unwrap());
        assert!(twopoint_op(&fg, TwoPointOp::H).unwrap().is_zero());
        let m2 = twopoint_op(&fg, TwoPointOp::M(2)).unwrap();
        let rec = calm_product(&fg, 2, true).unwrap();
        assert_eq!(m2, rec);
        assert!(twopoint_op(&p, TwoPointOp::N).is_err());
        for r in 1..=3 {
            assert!(product_formula_check(r, &p, &p, &c).unwrap().is_zero());
        }
        let a = v(&c, Var::Z(0)).try_mul(&v(&c, Var::Zb(1))).unwrap().try_mul(&LaurentElem::x_pow(c.space(), -1)).unwrap();
        let b = a.conj();
        assert!(product_formula_check(3, &a, &b, &c).unwrap().is_zero());
        assert_eq!(m_r(&a, &b, 3, &c).unwrap(), twopoint_op(&LaurentElem::tensor(&a, &b).unwrap(), TwoPointOp::M(3)).unwrap().diagonal().unwrap());
    }

    #[test]
    fn lemma_relations_on_samples() {
        let c = ctx1().with_order(3).unwrap();
        let x = UnivarPoly::identity(Indeterminate::X);
        let rho1 = x.pow(2).add(&UnivarPoly::one(Indeterminate::X));
        let rho2 = x.scale(&q(3));
        let big_f = v(&c, Var::Z(0)).try_mul(&v(&c, Var::Zb(1))).unwrap().try_mul(&v(&c, Var::Z(1))).unwrap().try_mul(&v(&c, Var::Zb(1))).unwrap();
        let f = phi(&c);
        let g = f.conj().scale(&q(2)).try_add(&LaurentElem::one(c.space())).unwrap();
        let rep = lemma21_check(&rho1, &rho2, &big_f, &f, &g, &c).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
    }
}
