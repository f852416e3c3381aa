//! The equivalence transformation `S` built from its symbol, its action on
//! powers of `x` and on the invariant Laurent class, and the transformed
//! product `F ⋆̃ G = S(S⁻¹F ∗ S⁻¹G)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formal::FormalPoly;
use crate::poly::{LaurentElem, Poly, VarSpace};
use crate::scalar::{binomial, factorial, GaussianRational, Rational};
use crate::series::{Series, UnivarPoly};
use crate::wick::{m_all, wick_product, StarContext};

/// Slot of `x` in symbol polynomials.
pub const X: usize = 0;
/// Slot of `α`.
pub const ALPHA: usize = 1;
/// Slot of `β` in the three-variable functional equation.
pub const BETA: usize = 2;

/// `A⁽ʳ⁾ₛ`: `A⁽⁰⁾₀ = 1`, `A⁽⁰⁾ₛ = 0` for `s ≥ 1`, otherwise
/// `(1/(r−1)!) Σ_{k=1}^{r} C(r−1, k−1) k^{s+r−1} (−1)^{r+s−k}`.
pub fn a_coeff(r: u32, s: u32) -> Rational {
    if r == 0 {
        return if s == 0 { Rational::one() } else { Rational::zero() };
    }
    let mut acc = Rational::zero();
    for k in 1..=r {
        let mut term = binomial(r - 1, k - 1)
            * Rational::from_integer(num_bigint::BigInt::from(k).pow(s + r - 1));
        if (r + s - k) % 2 == 1 {
            term = -term;
        }
        acc += term;
    }
    acc / factorial(r - 1)
}

fn gr(r: Rational) -> GaussianRational {
    GaussianRational::real(r)
}

/// `Ŝ(x, α) = exp((x/λ)(D log(1+λα) − λα))` as a series in `λ` with
/// coefficients in `(x, α)`. The exponent is
/// `Σ_{(k,r)≠(1,0)} (−1)^{k+1} (d_r/k) α^k x^{1−r} λ^{k+r−1}`.
pub fn symbol(ctx: &StarContext) -> Result<Series<FormalPoly>> {
    let kmax = ctx.order();
    let mut exponent = vec![FormalPoly::zero(2); kmax + 1];
    for (m, slot) in exponent.iter_mut().enumerate().skip(1) {
        for k in 1..=(m + 1) {
            let r = m + 1 - k;
            let d = ctx.d_coeff(r);
            if d.is_zero() {
                continue;
            }
            let mut c = d / Rational::from_integer((k as i64).into());
            if k % 2 == 0 {
                c = -c;
            }
            *slot = slot.add(&FormalPoly::monomial(&[1 - r as i32, k as i32], gr(c)));
        }
    }
    Ok(Series::new(exponent).exp_truncated()?)
}

/// `Ŝ(x, α+β+λαβ)·e^{λαβx} − Ŝ(x, α)·Ŝ(x, β)` in `(x, α, β)`.
pub fn functional_equation_residual(ctx: &StarContext) -> Result<Series<FormalPoly>> {
    let k = ctx.order();
    let s = symbol(ctx)?;
    // a fourth slot marks powers of λ produced by the substitution
    const L: usize = 3;
    let a4 = FormalPoly::var(4, ALPHA);
    let b4 = FormalPoly::var(4, BETA);
    let shifted_arg = a4.add(&b4).add(&FormalPoly::var(4, L).mul(&a4).mul(&b4));
    let mut marked = FormalPoly::zero(4);
    for m in 0..=k {
        let c = s.coeff(m).embed(4, &[X, ALPHA]);
        marked = marked.add(&c.substitute(ALPHA, &shifted_arg).shift(L, m as i32));
    }
    let mut lhs_first = vec![FormalPoly::zero(3); k + 1];
    for (e, c) in marked.terms() {
        let order = e[L] as usize;
        if order <= k {
            lhs_first[order].add_term(e[..3].iter().copied().collect(), c.clone());
        }
    }
    let lhs_first = Series::new(lhs_first);
    let ab = FormalPoly::monomial(&[1, 1, 1], GaussianRational::one());
    let e = Series::monomial(ab, 1, k).exp_truncated()?;
    let lhs = lhs_first.try_mul(&e)?;
    let sa = s.map(|p| p.embed(3, &[X, ALPHA]));
    let sb = s.map(|p| p.embed(3, &[X, BETA]));
    Ok(lhs.try_sub(&sa.try_mul(&sb)?)?)
}

/// `D(x, λ)·x = Σ_r λ^r d_r x^{1−r}` on the `x`-line.
pub fn dx_series(ctx: &StarContext) -> Series<FormalPoly> {
    Series::new(
        (0..=ctx.order())
            .map(|r| FormalPoly::monomial(&[1 - r as i32], gr(ctx.d_coeff(r))))
            .collect(),
    )
}

/// `S(x, ∂_x) x^j` on the `x`-line:
/// `(Dx)^j Π_{k<j}(1 − kλ/(Dx))` for `j > 0` and
/// `(Dx)^{−r} Σ_s (λ/(Dx))^s A⁽ʳ⁾ₛ` for `j = −r < 0`.
pub fn s_apply_xpow(j: i32, ctx: &StarContext) -> Result<Series<FormalPoly>> {
    let k = ctx.order();
    let dx = dx_series(ctx);
    let one = Series::constant(FormalPoly::one(1), k);
    if j == 0 {
        return Ok(one);
    }
    if j > 0 {
        let mut acc = one;
        for step in 0..j {
            let factor = dx.try_sub(&Series::monomial(
                FormalPoly::constant(1, GaussianRational::from_int(step as i64)),
                1,
                k,
            ))?;
            acc = acc.try_mul(&factor)?;
        }
        return Ok(acc);
    }
    let r = j.unsigned_abs();
    let inv = dx.invert()?;
    let u = inv.shift(1);
    let mut upow = one.clone();
    let mut inv_r = one;
    for _ in 0..r {
        inv_r = inv_r.try_mul(&inv)?;
    }
    let mut acc = Series::zero_like(&FormalPoly::zero(1), k);
    for s in 0..=k as u32 {
        let a = a_coeff(r, s);
        if !a.is_zero() {
            acc = acc.try_add(&inv_r.try_mul(&upow)?.scale(&gr(a)))?;
        }
        upow = upow.try_mul(&u)?;
    }
    Ok(acc)
}

/// Apply the operator with the given symbol in standard order (powers of
/// `x` to the left of powers of `∂_x`) to `x^j`.
pub fn standard_ordered_apply(symbol: &Series<FormalPoly>, j: i32) -> Series<FormalPoly> {
    symbol.map_to(|p| {
        let mut out = FormalPoly::zero(1);
        for (e, c) in p.terms() {
            let (a, b) = (e[X], e[ALPHA]);
            let mut falling = GaussianRational::one();
            for i in 0..b {
                falling = &falling * &GaussianRational::from_int((j - i) as i64);
            }
            out = out.add(&FormalPoly::monomial(&[a + j - b], c * &falling));
        }
        out
    })
}

/// `Σ c_e x^e` as an element of the given space.
pub fn line_to_laurent(p: &FormalPoly, space: VarSpace) -> LaurentElem {
    LaurentElem::sum(
        space,
        p.terms()
            .map(|(e, c)| LaurentElem::x_pow(space, e[0]).scale(c))
            .collect::<Vec<_>>(),
    )
    .expect("single space")
}

/// `Σ c_k x^k` as a one-variable formal polynomial.
pub fn univar_to_line(p: &UnivarPoly) -> FormalPoly {
    p.to_formal()
}

/// Unique splitting of a U(1)-invariant element as `Σ_j h_j x^j` with each
/// `h_j` homogeneous.
pub fn slices(f: &LaurentElem) -> Result<BTreeMap<i32, LaurentElem>> {
    let sp = f.space();
    if sp.is_two_point() {
        return Err(crate::poly::PolyError::NotSinglePoint.into());
    }
    let d = sp.dim();
    let m = f.xpow();
    let mut groups: BTreeMap<i32, Poly> = BTreeMap::new();
    for (mono, c) in f.numerator().terms() {
        let hol: i32 = mono.0[..d].iter().map(|&e| e as i32).sum();
        let anti: i32 = mono.0[d..2 * d].iter().map(|&e| e as i32).sum();
        if hol != anti {
            return Err(Error::NotInvariant(f.to_string()));
        }
        groups
            .entry(hol)
            .or_insert_with(|| Poly::zero(sp))
            .add_term(mono.clone(), c.clone());
    }
    Ok(groups
        .into_iter()
        .map(|(deg, p)| (deg - m, LaurentElem::new(p, [deg, 0])))
        .collect())
}

/// Memo of `S(x^j)` as Laurent series in the context space.
struct XpowCache<'a> {
    ctx: &'a StarContext,
    map: BTreeMap<i32, Series<LaurentElem>>,
}

impl<'a> XpowCache<'a> {
    fn new(ctx: &'a StarContext) -> Self {
        Self { ctx, map: BTreeMap::new() }
    }

    fn get(&mut self, j: i32) -> Result<&Series<LaurentElem>> {
        if !self.map.contains_key(&j) {
            let sp = self.ctx.space();
            let s = s_apply_xpow(j, self.ctx)?.map_to(|p| line_to_laurent(p, sp));
            self.map.insert(j, s);
        }
        Ok(&self.map[&j])
    }
}

fn s_forward(f: &Series<LaurentElem>, ctx: &StarContext, cache: &mut XpowCache) -> Result<Series<LaurentElem>> {
    let sp = ctx.space();
    let k = ctx.order().min(f.order());
    let mut buckets: Vec<Vec<LaurentElem>> = vec![Vec::new(); k + 1];
    for a in 0..=k {
        for (j, h) in slices(f.coeff(a))? {
            let sx = cache.get(j)?;
            for i in 0..=(k - a) {
                let c = sx.coeff(i);
                if !c.is_zero() {
                    buckets[a + i].push(h.try_mul(c)?);
                }
            }
        }
    }
    let coeffs = buckets
        .into_iter()
        .map(|b| LaurentElem::sum(sp, b))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Series::new(coeffs))
}

/// `S F` (or `S⁻¹ F`) on a series of U(1)-invariant elements, through order
/// `min(K, order F)`. The inverse is solved order by order.
pub fn s_apply(f: &Series<LaurentElem>, ctx: &StarContext, inverse: bool) -> Result<Series<LaurentElem>> {
    let mut cache = XpowCache::new(ctx);
    if !inverse {
        return s_forward(f, ctx, &mut cache);
    }
    let k = ctx.order().min(f.order());
    let target = f.truncate(k);
    let mut g = target.clone();
    for step in 1..=k {
        let residual = target.try_sub(&s_forward(&g, ctx, &mut cache)?)?;
        let c = residual.coeff(step).clone();
        if !c.is_zero() {
            let updated = g.coeff(step).try_add(&c)?;
            g.set_coeff(step, updated);
        }
    }
    Ok(g)
}

/// `S` on a series of polynomials in `x`, returned on the `x`-line.
pub fn s_apply_line(p: &Series<UnivarPoly>, ctx: &StarContext) -> Result<Series<FormalPoly>> {
    let k = ctx.order().min(p.order());
    let mut out = Series::zero_like(&FormalPoly::zero(1), k);
    let mut cache: BTreeMap<i32, Series<FormalPoly>> = BTreeMap::new();
    for a in 0..=k {
        for (j, c) in p.coeff(a).coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = j as i32;
            let sj = match cache.entry(j) {
                std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::btree_map::Entry::Vacant(e) => e.insert(s_apply_xpow(j, ctx)?),
            };
            let term = sj.shift(a).scale(c);
            out = out.try_add(&term)?;
        }
    }
    Ok(out)
}

/// `S(ρ₁ ⋆ ρ₂) − (Sρ₁)(Sρ₂)` on the `x`-line.
pub fn equivalence_check(rho1: &UnivarPoly, rho2: &UnivarPoly, ctx: &StarContext) -> Result<Series<FormalPoly>> {
    let k = ctx.order();
    let star = crate::wick::radial_star(rho1, rho2, ctx)?;
    let lhs = s_apply_line(&star, ctx)?;
    let s1 = s_apply_line(&Series::constant(rho1.clone(), k), ctx)?;
    let s2 = s_apply_line(&Series::constant(rho2.clone(), k), ctx)?;
    Ok(lhs.try_sub(&s1.try_mul(&s2)?)?)
}

fn require_invariant(f: &Series<LaurentElem>) -> Result<()> {
    for c in f.coeffs() {
        if !c.is_u1_invariant() {
            return Err(Error::NotInvariant(c.to_string()));
        }
    }
    Ok(())
}

/// `F ⋆̃ G = S((S⁻¹F) ∗ (S⁻¹G))` for invariant `F`, `G`.
pub fn tilde_star(f: &Series<LaurentElem>, g: &Series<LaurentElem>, ctx: &StarContext) -> Result<Series<LaurentElem>> {
    require_invariant(f)?;
    require_invariant(g)?;
    let fi = s_apply(f, ctx, true)?;
    let gi = s_apply(g, ctx, true)?;
    s_apply(&wick_product(&fi, &gi, ctx)?, ctx, false)
}

/// `λ/(D(x,λ)x)` on the `x`-line.
pub fn u_series(ctx: &StarContext) -> Result<Series<FormalPoly>> {
    Ok(dx_series(ctx).invert()?.shift(1))
}

/// `Σ_r (1/r!) u^r Π_{k=1}^r (1 + k u)^{−1} M_r(f, g)` with `u = λ/(Dx)`,
/// for homogeneous `f`, `g`.
pub fn tilde_star_closed(f: &LaurentElem, g: &LaurentElem, ctx: &StarContext) -> Result<Series<LaurentElem>> {
    for h in [f, g] {
        if !h.is_homogeneous() {
            return Err(Error::NotHomogeneous(h.to_string()));
        }
    }
    let sp = ctx.space();
    let k = ctx.order();
    let u = u_series(ctx)?;
    let one = Series::constant(FormalPoly::one(1), k);
    let ms = m_all(f, g, k, ctx)?;
    let mut out = Series::zero_like(&LaurentElem::zero(sp), k);
    let mut weight = one.clone();
    for (r, m) in ms.iter().enumerate() {
        if r > 0 {
            let denom = one.try_add(&u.scale(&GaussianRational::from_int(r as i64)))?;
            weight = weight.try_mul(&u)?.try_mul(&denom.invert()?)?;
        }
        if m.is_zero() {
            continue;
        }
        let c = gr(factorial(r as u32).recip());
        let term = weight
            .scale(&c)
            .map_to(|p| line_to_laurent(p, sp).try_mul(m).expect("single space"));
        out = out.try_add(&term)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;
    use crate::scalar::{rat, ratio};
    use crate::series::Indeterminate;
    use crate::wick::lift;

    fn ctx(order: usize) -> StarContext {
        StarContext::cpn(1).unwrap().with_order(order).unwrap()
    }

    fn xm(e: i32, c: i64) -> FormalPoly {
        FormalPoly::monomial(&[e], GaussianRational::from_int(c))
    }

    #[test]
    fn a_table_spot_values() {
        assert_eq!(a_coeff(0, 0), rat(1));
        assert_eq!(a_coeff(0, 3), rat(0));
        for s in 0..6 {
            let sign = if s % 2 == 0 { 1 } else { -1 };
            assert_eq!(a_coeff(1, s), rat(sign));
            assert_eq!(a_coeff(2, s), rat(sign * ((1 << (s + 1)) - 1)));
        }
    }

    #[test]
    fn symbol_low_orders() {
        let s = symbol(&ctx(2)).unwrap();
        assert_eq!(s.coeff(0), &FormalPoly::one(2));
        let m = |e: &[i32], n: i64, d: i64| FormalPoly::monomial(e, GaussianRational::from_ratio(n, d));
        assert_eq!(s.coeff(1), &m(&[1, 2], -1, 2));
        assert_eq!(s.coeff(2), &m(&[1, 3], 1, 3).add(&m(&[2, 4], 1, 8)));
        let shifted = ctx(4).with_d(vec![rat(1), rat(1)]).unwrap();
        let s = symbol(&shifted).unwrap();
        for c in s.coeffs() {
            assert!(c.eval_var(ALPHA, &GaussianRational::zero()).as_constant().is_some());
        }
        assert_eq!(s.coeff(1), &m(&[0, 1], 1, 1).add(&m(&[1, 2], -1, 2)));
    }

    #[test]
    fn functional_equation_holds() {
        assert!(functional_equation_residual(&ctx(4)).unwrap().is_zero());
        let d = ctx(4).with_d(vec![rat(1), rat(1)]).unwrap();
        assert!(functional_equation_residual(&d).unwrap().is_zero());
    }

    #[test]
    fn powers_of_x() {
        let c = ctx(2);
        assert_eq!(s_apply_xpow(1, &c).unwrap(), Series::constant(xm(1, 1), 2));
        assert_eq!(s_apply_xpow(2, &c).unwrap(), Series::new(vec![xm(2, 1), xm(1, -1), FormalPoly::zero(1)]));
        assert_eq!(s_apply_xpow(-1, &c).unwrap(), Series::new(vec![xm(-1, 1), xm(-2, -1), xm(-3, 1)]));
        let c = ctx(4);
        let sym = symbol(&c).unwrap();
        for j in -3..=3 {
            assert_eq!(s_apply_xpow(j, &c).unwrap(), standard_ordered_apply(&sym, j), "j = {j}");
        }
    }

    #[test]
    fn s_on_invariant_class() {
        let c = ctx(3);
        let sp = c.space();
        let x = LaurentElem::x(sp);
        assert_eq!(s_apply(&lift(&x, 3), &c, false).unwrap(), lift(&x, 3));
        let s2 = s_apply(&lift(&x.pow(2), 3), &c, false).unwrap();
        assert_eq!(s2.coeff(1), &x.neg());
        let z = LaurentElem::var(sp, Var::Z(0)).unwrap();
        let phi = z.try_mul(&z.conj()).unwrap().try_mul(&LaurentElem::x_pow(sp, -1)).unwrap();
        assert_eq!(s_apply(&lift(&phi, 3), &c, false).unwrap(), lift(&phi, 3));
        let mixed = lift(&phi.try_mul(&LaurentElem::x_pow(sp, -2)).unwrap().try_add(&x.pow(3)).unwrap(), 3);
        let back = s_apply(&s_apply(&mixed, &c, false).unwrap(), &c, true).unwrap();
        assert_eq!(back, mixed);
        assert!(s_apply(&lift(&z, 3), &c, false).is_err());
    }

    #[test]
    fn slicing() {
        let sp = VarSpace::euclidean(1).unwrap();
        let z0 = LaurentElem::var(sp, Var::Z(0)).unwrap();
        let zz = z0.try_mul(&z0.conj()).unwrap();
        let s = slices(&zz.try_add(&LaurentElem::x_pow(sp, -1)).unwrap()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[&-1], LaurentElem::one(sp));
        assert_eq!(s[&1], zz.try_mul(&LaurentElem::x_pow(sp, -1)).unwrap());
    }

    #[test]
    fn equivalence_on_radials() {
        let c = ctx(4);
        let x = UnivarPoly::identity(Indeterminate::X);
        let one = UnivarPoly::one(Indeterminate::X);
        assert!(equivalence_check(&one, &x, &c).unwrap().is_zero());
        assert!(equivalence_check(&x, &x, &c).unwrap().is_zero());
        assert!(equivalence_check(&x.pow(2), &x, &c).unwrap().is_zero());
        let d = c.with_d(vec![rat(1), ratio(1, 2), rat(-1)]).unwrap();
        assert!(equivalence_check(&x.pow(3), &x.pow(2), &d).unwrap().is_zero());
    }

    #[test]
    fn tilde_relations() {
        let c = ctx(3);
        let sp = c.space();
        let x = LaurentElem::x(sp);
        assert_eq!(tilde_star(&lift(&x, 3), &lift(&x, 3), &c).unwrap(), lift(&x.pow(2), 3));
        let z = LaurentElem::var(sp, Var::Z(0)).unwrap();
        let phi = z.try_mul(&z.conj()).unwrap().try_mul(&LaurentElem::x_pow(sp, -1)).unwrap();
        let xp = tilde_star(&lift(&x, 3), &lift(&phi, 3), &c).unwrap();
        assert_eq!(xp, lift(&x.try_mul(&phi).unwrap(), 3));
        let pp = tilde_star(&lift(&phi, 3), &lift(&phi, 3), &c).unwrap();
        assert_eq!(pp, tilde_star_closed(&phi, &phi, &c).unwrap());
        let m1 = phi.try_sub(&phi.pow(2)).unwrap().try_mul(&LaurentElem::x_pow(sp, -1)).unwrap();
        assert_eq!(pp.coeff(1), &m1);
    }
}
