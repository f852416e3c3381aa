//! Phase-space reduction at the level `J = μ`: the reduced product on
//! projective space (or its noncompact dual under the indefinite metric),
//! computed three independent ways.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::equiv::{slices, tilde_star};
use crate::error::{Error, Result};
use crate::poly::{EulerOp, LaurentElem};
use crate::scalar::{factorial, GaussianRational, Rational};
use crate::series::{Carrier, Series};
use crate::wick::{lift, m_all, poisson, wick_product, StarContext};

/// `J = −x/2`.
pub fn momentum_map(ctx: &StarContext) -> LaurentElem {
    LaurentElem::x(ctx.space()).scale(&GaussianRational::from_ratio(-1, 2))
}

/// U(1)-invariance by bidegree, cross-checked against `Y F = 0` and
/// `F ∗ J − J ∗ F = 0`; disagreement is an internal error.
pub fn is_invariant(f: &LaurentElem, ctx: &StarContext) -> Result<bool> {
    let by_degree = f.is_u1_invariant();
    let by_rotation = f.euler(EulerOp::Y)?.is_zero();
    let k = ctx.order().min(2);
    let fs = lift(f, k);
    let js = lift(&momentum_map(ctx), k);
    let comm = wick_product(&fs, &js, ctx)?.try_sub(&wick_product(&js, &fs, ctx)?)?;
    let by_commutator = comm.is_zero();
    if by_degree != by_rotation || by_degree != by_commutator {
        return Err(Error::Internal(format!("invariance tests disagree on {f}")));
    }
    Ok(by_degree)
}

/// Pullback of a function on the reduced space: an element of bidegree
/// `(0, 0)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReducedFn(LaurentElem);

impl ReducedFn {
    pub fn new(f: LaurentElem) -> Result<Self> {
        if f.is_homogeneous() {
            Ok(Self(f))
        } else {
            Err(Error::NotHomogeneous(f.to_string()))
        }
    }

    pub fn one(ctx: &StarContext) -> Self {
        Self(LaurentElem::one(ctx.space()))
    }

    pub fn as_laurent(&self) -> &LaurentElem {
        &self.0
    }

    pub fn into_laurent(self) -> LaurentElem {
        self.0
    }

    pub fn conj(&self) -> Self {
        Self(self.0.conj())
    }
}

impl std::fmt::Display for ReducedFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for ReducedFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl Carrier for ReducedFn {
    fn zero_like(&self) -> Self {
        Self(self.0.zero_like())
    }
    fn one_like(&self) -> Self {
        Self(self.0.one_like())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn compatible(&self, other: &Self) -> bool {
        self.0.compatible(&other.0)
    }
    fn plus(&self, rhs: &Self) -> Self {
        Self(self.0.plus(&rhs.0))
    }
    fn minus(&self, rhs: &Self) -> Self {
        Self(self.0.minus(&rhs.0))
    }
    fn times(&self, rhs: &Self) -> Self {
        Self(self.0.times(&rhs.0))
    }
    fn scaled(&self, c: &GaussianRational) -> Self {
        Self(self.0.scaled(c))
    }
    fn try_inverse(&self) -> Option<Self> {
        self.0.try_inverse().map(Self)
    }
}

/// Lift reduced functions back to Laurent elements.
pub fn pullback(phi: &Series<ReducedFn>) -> Series<LaurentElem> {
    phi.map_to(|p| p.0.clone())
}

fn level(ctx: &StarContext) -> GaussianRational {
    GaussianRational::real(ctx.level())
}

fn reduce_one(f: &LaurentElem, ctx: &StarContext) -> Result<LaurentElem> {
    let c = level(ctx);
    let parts = slices(f)?
        .into_iter()
        .map(|(j, h)| Ok(h.scale(&c.pow(j as i64)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LaurentElem::sum(ctx.space(), parts)?)
}

/// Substitute `x ↦ −2μ` slice by slice.
pub fn reduce_function(f: &Series<LaurentElem>, ctx: &StarContext) -> Result<Series<ReducedFn>> {
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| ReducedFn::new(reduce_one(c, ctx)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Series::new(coeffs))
}

/// `F = π*F_μ + (J − μ)·G`, coefficientwise.
#[derive(Clone, Debug)]
pub struct DecompResult {
    pub projection: Series<ReducedFn>,
    pub multiplier: Series<LaurentElem>,
}

fn decompose_one(f: &LaurentElem, ctx: &StarContext) -> Result<(LaurentElem, LaurentElem)> {
    let sp = ctx.space();
    let c = level(ctx);
    let mut proj = Vec::new();
    let mut quot = Vec::new();
    for (j, h) in slices(f)? {
        proj.push(h.scale(&c.pow(j as i64)?));
        // (x^j − c^j)/(x − c)
        let a = j.unsigned_abs() as i32;
        let mut q = Vec::new();
        for i in 0..a {
            q.push(LaurentElem::x_pow(sp, a - 1 - i).scale(&c.pow(i as i64)?));
        }
        let mut q = LaurentElem::sum(sp, q)?;
        if j < 0 {
            q = q
                .try_mul(&LaurentElem::x_pow(sp, j))?
                .scale(&c.pow(j as i64)?.scale(&-Rational::one()));
        }
        quot.push(h.try_mul(&q)?);
    }
    let proj = LaurentElem::sum(sp, proj)?;
    // J − μ = −(x − c)/2
    let mult = LaurentElem::sum(sp, quot)?.scale(&GaussianRational::from_int(-2));
    let back = proj.try_add(&momentum_map(ctx).try_sub(&LaurentElem::constant(sp, GaussianRational::real(ctx.mu().clone())))?.try_mul(&mult)?)?;
    if back != *f {
        return Err(Error::Internal(format!("ideal decomposition failed on {f}")));
    }
    Ok((proj, mult))
}

/// Split each coefficient into its reduction and a multiple of `J − μ`.
pub fn ideal_decompose(f: &Series<LaurentElem>, ctx: &StarContext) -> Result<DecompResult> {
    let mut proj = Vec::new();
    let mut mult = Vec::new();
    for c in f.coeffs() {
        let (p, m) = decompose_one(c, ctx)?;
        proj.push(ReducedFn::new(p)?);
        mult.push(m);
    }
    Ok(DecompResult {
        projection: Series::new(proj),
        multiplier: Series::new(mult),
    })
}

/// `c_{r,s} = Σ_{k=1}^{s} k^{r−1} (−1)^{r−k} / (s! (s−k)! (k−1)!)`.
pub fn k_coeff(r: u32, s: u32) -> Rational {
    let mut acc = Rational::zero();
    for k in 1..=s {
        let mut t = Rational::from_integer(num_bigint::BigInt::from(k).pow(r - 1))
            / (factorial(s) * factorial(s - k) * factorial(k - 1));
        if (r - k) % 2 == 1 {
            t = -t;
        }
        acc += t;
    }
    acc
}

fn require_d_one(ctx: &StarContext) -> Result<()> {
    if ctx.d_is_one() {
        Ok(())
    } else {
        Err(Error::InvalidContext("the canonical reduced product needs D = 1".into()))
    }
}

/// `φψ + Σ_{r≥1} (λ/(−2μ))^r Σ_{s≤r} c_{r,s} M̃_s(φ, ψ)` for single
/// reduced functions.
fn mu_star_pair(phi: &ReducedFn, psi: &ReducedFn, k: usize, ctx: &StarContext) -> Result<Vec<LaurentElem>> {
    let sp = ctx.space();
    let ms = m_all(&phi.0, &psi.0, k, ctx)?;
    let inv_level = level(ctx).inv()?;
    let mut out = vec![ms[0].clone()];
    let mut scale = GaussianRational::one();
    for r in 1..=k {
        scale = &scale * &inv_level;
        let mut terms = Vec::new();
        for (s, m) in ms.iter().enumerate().take(r + 1).skip(1) {
            let c = k_coeff(r as u32, s as u32);
            if !c.is_zero() && !m.is_zero() {
                terms.push(m.scale(&GaussianRational::real(c)));
            }
        }
        out.push(LaurentElem::sum(sp, terms)?.scale(&scale));
    }
    Ok(out)
}

/// The reduced star product `∗^μ`, bilinear in the λ-coefficients.
pub fn mu_star(phi: &Series<ReducedFn>, psi: &Series<ReducedFn>, ctx: &StarContext) -> Result<Series<ReducedFn>> {
    require_d_one(ctx)?;
    let sp = ctx.space();
    let k = ctx.order().min(phi.order()).min(psi.order());
    let mut buckets: Vec<Vec<LaurentElem>> = vec![Vec::new(); k + 1];
    for a in 0..=k {
        if phi.coeff(a).is_zero() {
            continue;
        }
        for b in 0..=(k - a) {
            if psi.coeff(b).is_zero() {
                continue;
            }
            for (r, t) in mu_star_pair(phi.coeff(a), psi.coeff(b), k - a - b, ctx)?.into_iter().enumerate() {
                buckets[a + b + r].push(t);
            }
        }
    }
    let coeffs = buckets
        .into_iter()
        .map(|b| Ok(ReducedFn(LaurentElem::sum(sp, b)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Series::new(coeffs))
}

/// `{φ, ψ}_μ`: the ambient bracket of the representatives, reduced.
pub fn reduced_poisson(phi: &ReducedFn, psi: &ReducedFn, ctx: &StarContext) -> Result<ReducedFn> {
    let pb = poisson(&phi.0, &psi.0, ctx)?;
    ReducedFn::new(reduce_one(&pb, ctx)?)
}

/// `(F ⋆̃ G)_μ − F_μ ∗^μ G_μ`.
pub fn reduction_compatibility(
    f: &Series<LaurentElem>,
    g: &Series<LaurentElem>,
    ctx: &StarContext,
) -> Result<Series<ReducedFn>> {
    require_d_one(ctx)?;
    let lhs = reduce_function(&tilde_star(f, g, ctx)?, ctx)?;
    let rhs = mu_star(&reduce_function(f, ctx)?, &reduce_function(g, ctx)?, ctx)?;
    Ok(lhs.try_sub(&rhs)?)
}

/// The reduced product obtained from the plain Wick product by separating
/// off the `∗`-ideal generated by `J − μ` order by order, using
/// `(J − μ) ∗ G = (J − μ)G − (λ/2) Ē G`.
pub fn wick_reduce(phi: &ReducedFn, psi: &ReducedFn, ctx: &StarContext) -> Result<Series<ReducedFn>> {
    require_d_one(ctx)?;
    let sp = ctx.space();
    let k = ctx.order();
    let mut rest = wick_product(&lift(&phi.0, k), &lift(&psi.0, k), ctx)?;
    let j_mu = momentum_map(ctx).try_sub(&LaurentElem::constant(sp, GaussianRational::real(ctx.mu().clone())))?;
    let half = GaussianRational::from_ratio(1, 2);
    let mut out = Vec::with_capacity(k + 1);
    for order in 0..=k {
        let (proj, g) = decompose_one(rest.coeff(order), ctx)?;
        out.push(ReducedFn::new(proj)?);
        if g.is_zero() {
            continue;
        }
        let mut ideal = Series::zero_like(&LaurentElem::zero(sp), k);
        ideal.set_coeff(order, j_mu.try_mul(&g)?);
        if order < k {
            ideal.set_coeff(order + 1, g.euler(EulerOp::Ebar)?.scale(&-half.clone()));
        }
        rest = rest.try_sub(&ideal)?;
    }
    Ok(Series::new(out))
}

/// `F ⋆̃ SJ − SJ ⋆̃ F − (𝐢λ/2){F, J}` with `SJ = D·J`.
pub fn quantum_momentum_check(f: &Series<LaurentElem>, ctx: &StarContext) -> Result<Series<LaurentElem>> {
    let k = ctx.order().min(f.order());
    let sp = ctx.space();
    let j = momentum_map(ctx);
    let sj = crate::equiv::s_apply(&lift(&j, k), ctx, false)?;
    let dj = crate::equiv::dx_series(ctx)
        .map_to(|p| crate::equiv::line_to_laurent(p, sp))
        .scale(&GaussianRational::from_ratio(-1, 2));
    if sj != dj.truncate(k) {
        return Err(Error::Internal("S J differs from D J".into()));
    }
    let comm = tilde_star(f, &sj, ctx)?.try_sub(&tilde_star(&sj, f, ctx)?)?;
    let mut pb = Vec::with_capacity(k + 1);
    for c in f.coeffs().iter().take(k + 1) {
        pb.push(poisson(c, &j, ctx)?.scale(&GaussianRational::from_ratio(1, 2).mul_i()));
    }
    let pb = Series::new(pb).shift(1);
    Ok(comm.try_sub(&pb)?)
}

/// `D(−2μ, λ) = Σ (λ/(−2μ))^r d_r` as a scalar series.
pub fn d_at_level(ctx: &StarContext) -> Result<Series<GaussianRational>> {
    let inv = level(ctx).inv()?;
    Ok(Series::new(
        (0..=ctx.order())
            .map(|r| Ok(GaussianRational::real(ctx.d_coeff(r)) * inv.pow(r as i64)?))
            .collect::<Result<Vec<_>>>()?,
    ))
}

/// Reduced `⋆̃` product for the context's `D`, minus the `D ≡ 1` product
/// with `λ ↦ λ/D(−2μ, λ)`.
pub fn reparametrize_check(phi: &ReducedFn, psi: &ReducedFn, ctx: &StarContext) -> Result<Series<ReducedFn>> {
    let k = ctx.order();
    let general = reduce_function(&tilde_star(&lift(&phi.0, k), &lift(&psi.0, k), ctx)?, ctx)?;
    let flat = ctx.clone().with_d(vec![Rational::one()])?;
    let canonical = mu_star(
        &Series::constant(phi.clone(), k),
        &Series::constant(psi.clone(), k),
        &flat,
    )?;
    let u = d_at_level(ctx)?.invert()?.shift(1);
    Ok(general.try_sub(&canonical.reparametrize(&u)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Var;
    use crate::scalar::{rat, ratio};

    fn ctx(order: usize) -> StarContext {
        StarContext::cpn(1).unwrap().with_order(order).unwrap()
    }

    fn var(c: &StarContext, v: Var) -> LaurentElem {
        LaurentElem::var(c.space(), v).unwrap()
    }

    fn hom(c: &StarContext, a: usize, b: usize) -> ReducedFn {
        let p = var(c, Var::Z(a)).try_mul(&var(c, Var::Zb(b))).unwrap();
        ReducedFn::new(p.try_mul(&LaurentElem::x_pow(c.space(), -1)).unwrap()).unwrap()
    }

    #[test]
    fn momentum_and_invariance() {
        let c = ctx(3);
        let j = momentum_map(&c);
        assert_eq!(j.eval(&[GaussianRational::one(), GaussianRational::zero()]).unwrap(), GaussianRational::from_ratio(-1, 2));
        assert!(is_invariant(&LaurentElem::x(c.space()), &c).unwrap());
        assert!(!is_invariant(&var(&c, Var::Z(0)), &c).unwrap());
        assert!(is_invariant(hom(&c, 0, 1).as_laurent(), &c).unwrap());
        let d = StarContext::dn(1).unwrap();
        let jd = momentum_map(&d);
        let expected = var(&d, Var::Z(0)).try_mul(&var(&d, Var::Zb(0))).unwrap()
            .scale(&GaussianRational::from_int(-1))
            .try_add(&var(&d, Var::Z(1)).try_mul(&var(&d, Var::Zb(1))).unwrap()).unwrap()
            .scale(&GaussianRational::from_ratio(-1, 2));
        assert_eq!(jd, expected);
    }

    #[test]
    fn reduction_by_substitution() {
        let c = ctx(2);
        let sp = c.space();
        let x = LaurentElem::x(sp);
        assert_eq!(reduce_function(&lift(&x, 2), &c).unwrap().coeff(0).as_laurent(), &LaurentElem::one(sp));
        let zz = var(&c, Var::Z(0)).try_mul(&var(&c, Var::Zb(0))).unwrap();
        assert_eq!(reduce_function(&lift(&zz, 2), &c).unwrap().coeff(0), &hom(&c, 0, 0));
        let c2 = c.clone().with_mu(rat(-2)).unwrap();
        assert_eq!(
            reduce_function(&lift(&zz, 2), &c2).unwrap().coeff(0).as_laurent(),
            &hom(&c, 0, 0).as_laurent().scale(&GaussianRational::from_int(4))
        );
    }

    #[test]
    fn decompositions() {
        let c = ctx(1);
        let sp = c.space();
        let x = LaurentElem::x(sp);
        let d = ideal_decompose(&lift(&x, 1), &c).unwrap();
        assert_eq!(d.projection.coeff(0).as_laurent(), &LaurentElem::one(sp));
        assert_eq!(d.multiplier.coeff(0), &LaurentElem::constant(sp, GaussianRational::from_int(-2)));
        let phi = hom(&c, 0, 1);
        let d = ideal_decompose(&lift(phi.as_laurent(), 1), &c).unwrap();
        assert_eq!(d.projection.coeff(0), &phi);
        assert!(d.multiplier.coeff(0).is_zero());
        let jm = momentum_map(&c).try_sub(&LaurentElem::constant(sp, GaussianRational::from_ratio(-1, 2))).unwrap();
        let f = jm.try_mul(&x).unwrap();
        let d = ideal_decompose(&lift(&f, 1), &c).unwrap();
        assert!(d.projection.coeff(0).is_zero());
        assert_eq!(d.multiplier.coeff(0), &x);
        let neg = phi.as_laurent().try_mul(&LaurentElem::x_pow(sp, -3)).unwrap();
        assert!(ideal_decompose(&lift(&neg, 1), &c.with_mu(ratio(-3, 7)).unwrap()).is_ok());
    }

    #[test]
    fn k_coefficients() {
        assert_eq!(k_coeff(1, 1), rat(1));
        assert_eq!(k_coeff(2, 1), rat(-1));
        assert_eq!(k_coeff(2, 2), ratio(1, 2));
        assert_eq!(k_coeff(3, 1), rat(1));
        assert_eq!(k_coeff(3, 2), ratio(-3, 2));
        assert_eq!(k_coeff(3, 3), ratio(1, 6));
    }

    #[test]
    fn reduced_product_basics() {
        let c = ctx(3);
        let phi = hom(&c, 0, 0);
        let one = Series::constant(ReducedFn::one(&c), 3);
        let ps = Series::constant(phi.clone(), 3);
        assert_eq!(mu_star(&ps, &one, &c).unwrap(), ps);
        assert_eq!(mu_star(&one, &ps, &c).unwrap(), ps);
        let pp = mu_star(&ps, &ps, &c).unwrap();
        let p = phi.as_laurent();
        assert_eq!(pp.coeff(0).as_laurent(), &p.pow(2));
        assert_eq!(pp.coeff(1).as_laurent(), &p.try_sub(&p.pow(2)).unwrap());
        assert!(mu_star(&ps, &ps, &c.clone().with_d(vec![rat(1), rat(1)]).unwrap()).is_err());
    }

    #[test]
    fn first_order_commutator_matches_reduced_bracket() {
        let c = ctx(2);
        let a = hom(&c, 0, 0);
        let b = hom(&c, 0, 1);
        let ab = mu_star(&Series::constant(a.clone(), 2), &Series::constant(b.clone(), 2), &c).unwrap();
        let ba = mu_star(&Series::constant(b.clone(), 2), &Series::constant(a.clone(), 2), &c).unwrap();
        let comm = ab.try_sub(&ba).unwrap();
        let pb = reduced_poisson(&a, &b, &c).unwrap();
        assert_eq!(comm.coeff(1), &pb.scaled(&GaussianRational::from_ratio(1, 2).mul_i()));
        let pb2 = reduced_poisson(&b, &a, &c).unwrap();
        assert_eq!(pb.plus(&pb2), ReducedFn::one(&c).zero_like());
        assert!(reduced_poisson(&a, &a, &c).unwrap().is_zero());
        assert!(reduced_poisson(&a, &ReducedFn::one(&c), &c).unwrap().is_zero());
    }

    #[test]
    fn three_routes_agree() {
        let c = ctx(3);
        let a = hom(&c, 0, 1);
        let b = hom(&c, 1, 1);
        let direct = mu_star(&Series::constant(a.clone(), 3), &Series::constant(b.clone(), 3), &c).unwrap();
        assert_eq!(wick_reduce(&a, &b, &c).unwrap(), direct);
        let via_tilde = reduce_function(&tilde_star(&lift(a.as_laurent(), 3), &lift(b.as_laurent(), 3), &c).unwrap(), &c).unwrap();
        assert_eq!(via_tilde, direct);
        let zz = var(&c, Var::Z(0)).try_mul(&var(&c, Var::Zb(0))).unwrap();
        assert!(reduction_compatibility(&lift(&zz, 3), &lift(&zz, 3), &c).unwrap().is_zero());
        let x = LaurentElem::x(c.space());
        assert!(reduction_compatibility(&lift(&x, 3), &lift(&zz, 3), &c).unwrap().is_zero());
    }

    #[test]
    fn shifted_d_reparametrization_and_momentum() {
        let c = ctx(3).with_d(vec![rat(1), rat(1)]).unwrap();
        let a = hom(&c, 0, 1);
        let b = hom(&c, 1, 0);
        assert!(reparametrize_check(&a, &b, &c).unwrap().is_zero());
        assert!(quantum_momentum_check(&lift(a.as_laurent(), 3), &c).unwrap().is_zero());
        let flat = ctx(3);
        assert!(reparametrize_check(&a, &b, &flat).unwrap().is_zero());
        assert!(quantum_momentum_check(&lift(a.as_laurent(), 3), &flat).unwrap().is_zero());
    }

    #[test]
    fn conjugation_swaps_arguments() {
        let c = ctx(3);
        let a = Series::constant(hom(&c, 0, 1), 3);
        let b = Series::constant(hom(&c, 1, 1).plus(&hom(&c, 1, 0).scaled(&GaussianRational::i())), 3);
        let lhs = mu_star(&a, &b, &c).unwrap().map(|p| p.conj());
        let rhs = mu_star(&b.map(|p| p.conj()), &a.map(|p| p.conj()), &c).unwrap();
        assert_eq!(lhs, rhs);
    }
}
