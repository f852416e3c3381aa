//! Randomized and tabulated identity checks, grouped into named suites.
//! Every check compares exactly; a failing check carries its residual.

use std::fmt::Debug;
use std::time::Instant;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::equiv::{
    a_coeff, equivalence_check, functional_equation_residual, s_apply, s_apply_xpow, standard_ordered_apply, symbol,
    tilde_star, tilde_star_closed, ALPHA,
};
use crate::error::Result;
use crate::moreno::{
    a_identity_check, chart_cross_check, coeff_vanishing, k_poly, k_poly_from_triple_sum, moreno_recursion_residual,
};
use crate::poly::{LaurentElem, VarSpace};
use crate::random::Sampler;
use crate::reduce::{
    k_coeff, mu_star, quantum_momentum_check, reduce_function, reduced_poisson, reparametrize_check, wick_reduce,
    ReducedFn,
};
use crate::scalar::{factorial, ratio, GaussianRational, Rational};
use crate::series::{Carrier, Series};
use crate::wick::{commutator_check, lemma21_check, lift, product_formula_check, radial, wick_product, StarContext};

/// Outcome of one identity.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl Check {
    fn pass(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            residual: None,
        }
    }

    fn fail(name: impl Into<String>, residual: String) -> Self {
        Self {
            name: name.into(),
            passed: false,
            residual: Some(residual),
        }
    }

    /// Passes iff `value` is `Ok` and `zero(value)`; errors count as failures.
    fn zero<T: Debug>(name: impl Into<String>, value: Result<T>, zero: impl Fn(&T) -> bool) -> Self {
        match value {
            Ok(v) if zero(&v) => Self::pass(name),
            Ok(v) => Self::fail(name, format!("{v:?}")),
            Err(e) => Self::fail(name, format!("error: {e}")),
        }
    }

    fn series<T: Carrier + Debug>(name: impl Into<String>, value: Result<Series<T>>) -> Self {
        Self::zero(name, value, |s| s.is_zero())
    }

    fn equal<T: PartialEq + Debug>(name: impl Into<String>, lhs: T, rhs: T) -> Self {
        if lhs == rhs {
            Self::pass(name)
        } else {
            Self::fail(name, format!("{lhs:?} != {rhs:?}"))
        }
    }
}

/// Named group of checks with its wall-clock time.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self) -> usize {
        self.checks.len()
    }
}

/// Run `f` and wrap its checks in a timed report.
pub fn timed(suite: impl Into<String>, f: impl FnOnce() -> Vec<Check>) -> Report {
    let t = Instant::now();
    let checks = f();
    Report {
        suite: suite.into(),
        checks,
        seconds: t.elapsed().as_secs_f64(),
    }
}

/// Parameters for the randomized checks.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n: usize,
    pub indefinite: bool,
    pub mu: Rational,
    pub order: usize,
    pub seed: u64,
    pub cases: usize,
    pub rmax: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n: 1,
            indefinite: false,
            mu: ratio(-1, 2),
            order: 4,
            seed: 42,
            cases: 5,
            rmax: 10,
        }
    }
}

impl VerifyConfig {
    pub fn space(&self) -> Result<VarSpace> {
        Ok(if self.indefinite {
            VarSpace::indefinite(self.n)?
        } else {
            VarSpace::euclidean(self.n)?
        })
    }

    pub fn context(&self) -> Result<StarContext> {
        StarContext::new(self.space()?, self.order, vec![Rational::one()], self.mu.clone())
    }

    fn label(&self) -> String {
        let m = if self.indefinite { "dn" } else { "cpn" };
        format!("{m} n={} mu={} K={}", self.n, self.mu, self.order)
    }

    fn sampler(&self, salt: u64) -> Sampler {
        Sampler::new(self.seed.wrapping_mul(0x9e37_79b9).wrapping_add(salt))
    }
}

fn with_context(cfg: &VerifyConfig, name: &str, f: impl FnOnce(&StarContext) -> Vec<Check>) -> Vec<Check> {
    match cfg.context() {
        Ok(ctx) => f(&ctx),
        Err(e) => vec![Check::fail(name, format!("error: {e}"))],
    }
}

fn poly_elem(s: &mut Sampler, sp: VarSpace, deg: usize) -> LaurentElem {
    LaurentElem::from_poly(s.poly(sp, deg, 3))
}

/// `(F∗G)∗H = F∗(G∗H)` on random polynomials of degree `≤ deg`.
pub fn wick_associativity(cfg: &VerifyConfig, deg: usize) -> Vec<Check> {
    with_context(cfg, "wick associativity", |ctx| {
        let sp = ctx.space();
        let k = ctx.order();
        let mut s = cfg.sampler(1);
        (0..cfg.cases)
            .map(|i| {
                let [f, g, h] = [0, 1, 2].map(|_| lift(&poly_elem(&mut s, sp, deg), k));
                let r = (|| {
                    let lhs = wick_product(&wick_product(&f, &g, ctx)?, &h, ctx)?;
                    let rhs = wick_product(&f, &wick_product(&g, &h, ctx)?, ctx)?;
                    Ok(lhs.try_sub(&rhs)?)
                })();
                Check::series(format!("wick associativity {} #{i}", cfg.label()), r)
            })
            .collect()
    })
}

/// `F∗G − G∗F = (𝐢λ/2){F, G} + O(λ²)`.
pub fn wick_commutator(cfg: &VerifyConfig, deg: usize) -> Vec<Check> {
    with_context(cfg, "wick commutator", |ctx| {
        let sp = ctx.space();
        let mut s = cfg.sampler(2);
        (0..cfg.cases)
            .map(|i| {
                let f = poly_elem(&mut s, sp, deg);
                let g = poly_elem(&mut s, sp, deg);
                let r = commutator_check(&f, &g, ctx);
                Check::zero(format!("wick commutator {} #{i}", cfg.label()), r, |c| {
                    c.coeff(0).is_zero() && c.coeff(1).is_zero()
                })
            })
            .collect()
    })
}

/// Wick products with radial, invariant and homogeneous arguments.
pub fn wick_relations(cfg: &VerifyConfig) -> Vec<Check> {
    with_context(cfg, "radial and homogeneous relations", |ctx| {
        let sp = ctx.space();
        let mut s = cfg.sampler(3);
        (0..cfg.cases)
            .map(|i| {
                let rho1 = s.radial(2);
                let rho2 = s.radial(2);
                let big_f = s.invariant(sp, 2, 1);
                let f = s.homogeneous(sp, 1 + i % 2, 2);
                let g = s.homogeneous(sp, 1, 2);
                let name = format!("radial and homogeneous relations {} #{i}", cfg.label());
                match lemma21_check(&rho1, &rho2, &big_f, &f, &g, ctx) {
                    Ok(rep) if rep.passed() => Check::pass(name),
                    Ok(rep) => Check::fail(name, format!("{:?}", rep.failures())),
                    Err(e) => Check::fail(name, format!("error: {e}")),
                }
            })
            .collect()
    })
}

/// `m∘ℳ_r(f⊗g) = m∘Π_{s<r}(N − s(n−s))(f⊗g)` on homogeneous pairs.
pub fn product_formula(cfg: &VerifyConfig, rmax: usize) -> Vec<Check> {
    with_context(cfg, "product formula", |ctx| {
        let sp = ctx.space();
        let mut s = cfg.sampler(4);
        let mut out = Vec::new();
        for i in 0..cfg.cases {
            let f = s.homogeneous(sp, 1 + i % 2, 2);
            let g = s.homogeneous(sp, 1 + (i / 2) % 2, 2);
            for r in 1..=rmax {
                let res = product_formula_check(r, &f, &g, ctx);
                out.push(Check::zero(
                    format!("product formula {} r={r} #{i}", cfg.label()),
                    res,
                    |e| e.is_zero(),
                ));
            }
        }
        out
    })
}

/// Functional equation of the symbol and `Ŝ(x, 0) = 1`, for `D ≡ 1` and `D = 1 + λ/x`.
pub fn symbol_checks(order: usize) -> Vec<Check> {
    let mut out = Vec::new();
    for (label, d) in [("D=1", vec![Rational::one()]), ("D=1+l/x", vec![Rational::one(), Rational::one()])] {
        let ctx = match StarContext::cpn(1).and_then(|c| c.with_order(order)).and_then(|c| c.with_d(d)) {
            Ok(c) => c,
            Err(e) => {
                out.push(Check::fail(format!("symbol {label}"), format!("error: {e}")));
                continue;
            }
        };
        out.push(Check::series(
            format!("symbol functional equation {label} K={order}"),
            functional_equation_residual(&ctx),
        ));
        let at_zero = symbol(&ctx).map(|s| {
            s.map(|c| c.eval_var(ALPHA, &GaussianRational::zero()))
                .try_sub(&Series::constant(crate::formal::FormalPoly::one(2), s.order()))
                .expect("same shape")
        });
        out.push(Check::series(format!("symbol at alpha=0 {label} K={order}"), at_zero));
    }
    out
}

/// `S(x^j)` against the standard-ordered operator read off from the symbol.
pub fn s_on_powers(order: usize, jmax: i32) -> Vec<Check> {
    let ctx = match StarContext::cpn(1).and_then(|c| c.with_order(order)) {
        Ok(c) => c,
        Err(e) => return vec![Check::fail("S on powers", format!("error: {e}"))],
    };
    let sym = match symbol(&ctx) {
        Ok(s) => s,
        Err(e) => return vec![Check::fail("S on powers", format!("error: {e}"))],
    };
    (-jmax..=jmax)
        .map(|j| {
            let r = s_apply_xpow(j, &ctx).map(|s| s.try_sub(&standard_ordered_apply(&sym, j)).expect("same shape"));
            Check::series(format!("S(x^{j}) standard ordering K={order}"), r)
        })
        .collect()
}

/// `Π_{k=1}^{r} (1 + ku)^{−1}` expanded to `u^smax`.
pub fn a_row_by_inversion(r: u32, smax: usize) -> Result<Vec<Rational>> {
    let mut prod = Series::constant(GaussianRational::one(), smax);
    for k in 1..=r {
        let factor = Series::new(
            [GaussianRational::one(), GaussianRational::from_int(k as i64)]
                .into_iter()
                .chain(std::iter::repeat(GaussianRational::zero()))
                .take(smax + 1)
                .collect(),
        );
        prod = prod.try_mul(&factor)?;
    }
    Ok(prod.invert()?.coeffs().iter().map(|c| c.re.clone()).collect())
}

/// `A⁽ʳ⁾ₛ` against series inversion of the product, `r, s ≤ max`.
pub fn a_table(max: u32) -> Vec<Check> {
    (0..=max)
        .map(|r| {
            let name = format!("A table row r={r}");
            match a_row_by_inversion(r, max as usize) {
                Ok(row) => Check::equal(name, (0..=max).map(|s| a_coeff(r, s)).collect::<Vec<_>>(), row),
                Err(e) => Check::fail(name, format!("error: {e}")),
            }
        })
        .collect()
}

/// `S(ρ₁ ⋆ ρ₂) = (Sρ₁)(Sρ₂)` on random radial profiles.
pub fn equivalence_on_radials(cfg: &VerifyConfig) -> Vec<Check> {
    with_context(cfg, "S multiplicative on radials", |ctx| {
        let mut s = cfg.sampler(5);
        (0..cfg.cases)
            .map(|i| {
                let (a, b) = (s.radial(3), s.radial(2));
                Check::series(format!("S multiplicative on radials {} #{i}", cfg.label()), equivalence_check(&a, &b, ctx))
            })
            .collect()
    })
}

/// `R₁⋆̃R₂ = R₁R₂`, `R⋆̃F = RF = F⋆̃R`, and the closed formula for `f⋆̃g`.
pub fn tilde_relations(cfg: &VerifyConfig) -> Vec<Check> {
    with_context(cfg, "tilde relations", |ctx| {
        let sp = ctx.space();
        let k = ctx.order();
        let mut s = cfg.sampler(6);
        let mut out = Vec::new();
        for i in 0..cfg.cases {
            let r1 = lift(&radial(&s.radial(2), sp), k);
            let r2 = lift(&radial(&s.radial(2), sp), k);
            let big_f = lift(&s.invariant(sp, 2, 1), k);
            let f = s.homogeneous(sp, 1 + i % 2, 2);
            let g = s.homogeneous(sp, 1, 2);
            let tag = format!("{} #{i}", cfg.label());
            let pointwise = |a: &Series<LaurentElem>, b: &Series<LaurentElem>| -> Result<Series<LaurentElem>> {
                let prod = Series::constant(a.coeff(0).try_mul(b.coeff(0))?, k);
                Ok(tilde_star(a, b, ctx)?.try_sub(&prod)?)
            };
            out.push(Check::series(format!("tilde radial-radial {tag}"), pointwise(&r1, &r2)));
            out.push(Check::series(format!("tilde radial-invariant {tag}"), pointwise(&r1, &big_f)));
            out.push(Check::series(format!("tilde invariant-radial {tag}"), pointwise(&big_f, &r2)));
            let closed = (|| {
                let t = tilde_star(&lift(&f, k), &lift(&g, k), ctx)?;
                Ok(t.try_sub(&tilde_star_closed(&f, &g, ctx)?)?)
            })();
            out.push(Check::series(format!("tilde closed formula {tag}"), closed));
        }
        out
    })
}

/// `⋆̃` associativity on invariant triples and `S⁻¹S = id`.
pub fn tilde_associativity(cfg: &VerifyConfig) -> Vec<Check> {
    with_context(cfg, "tilde associativity", |ctx| {
        let sp = ctx.space();
        let k = ctx.order();
        let mut s = cfg.sampler(7);
        let mut out = Vec::new();
        for i in 0..cfg.cases {
            let [f, g, h] = [0, 1, 2].map(|_| lift(&s.invariant(sp, 1, 1), k));
            let r = (|| {
                let lhs = tilde_star(&tilde_star(&f, &g, ctx)?, &h, ctx)?;
                let rhs = tilde_star(&f, &tilde_star(&g, &h, ctx)?, ctx)?;
                Ok(lhs.try_sub(&rhs)?)
            })();
            out.push(Check::series(format!("tilde associativity {} #{i}", cfg.label()), r));
            let back = (|| Ok(s_apply(&s_apply(&f, ctx, false)?, ctx, true)?.try_sub(&f)?))();
            out.push(Check::series(format!("S inverse round trip {} #{i}", cfg.label()), back));
        }
        out
    })
}

fn reduced(s: &mut Sampler, sp: VarSpace, i: usize) -> ReducedFn {
    ReducedFn::new(s.homogeneous(sp, 1 + i % 2, 2)).expect("homogeneous by construction")
}

/// `∗^μ` associativity and its first-order commutator `(𝐢/2){·,·}_μ`.
pub fn mu_star_checks(cfg: &VerifyConfig) -> Vec<Check> {
    with_context(cfg, "reduced product", |ctx| {
        let sp = ctx.space();
        let k = ctx.order();
        let mut s = cfg.sampler(8);
        let mut out = Vec::new();
        for i in 0..cfg.cases {
            let a = reduced(&mut s, sp, i);
            let b = reduced(&mut s, sp, i + 1);
            let c = reduced(&mut s, sp, i);
            let [sa, sb, sc] = [&a, &b, &c].map(|p| Series::constant(p.clone(), k));
            let tag = format!("{} #{i}", cfg.label());
            let assoc = (|| {
                let lhs = mu_star(&mu_star(&sa, &sb, ctx)?, &sc, ctx)?;
                let rhs = mu_star(&sa, &mu_star(&sb, &sc, ctx)?, ctx)?;
                Ok(lhs.try_sub(&rhs)?)
            })();
            out.push(Check::series(format!("reduced associativity {tag}"), assoc));
            let comm = (|| {
                let d = mu_star(&sa, &sb, ctx)?.try_sub(&mu_star(&sb, &sa, ctx)?)?;
                let pb = reduced_poisson(&a, &b, ctx)?.scaled(&GaussianRational::from_ratio(1, 2).mul_i());
                Ok(d.coeff(1).minus(&pb))
            })();
            out.push(Check::zero(format!("reduced first-order commutator {tag}"), comm, |r: &ReducedFn| {
                r.is_zero()
            }));
        }
        out
    })
}

/// `c_{r,s} = A⁽ˢ⁾_{r−s}/s!` for `r ≤ rmax`, and the first three rows.
pub fn k_table(rmax: u32) -> Vec<Check> {
    let mut out: Vec<Check> = (1..=rmax)
        .map(|r| {
            let lhs: Vec<Rational> = (1..=r).map(|s| k_coeff(r, s)).collect();
            let rhs: Vec<Rational> = (1..=r).map(|s| a_coeff(s, r - s) / factorial(s)).collect();
            Check::equal(format!("reduced coefficients row r={r}"), lhs, rhs)
        })
        .collect();
    let rows = [vec![ratio(1, 1)], vec![ratio(-1, 1), ratio(1, 2)], vec![ratio(1, 1), ratio(-3, 2), ratio(1, 6)]];
    for (r, row) in rows.into_iter().enumerate() {
        let r = r as u32 + 1;
        let got: Vec<Rational> = (1..=r).map(|s| k_coeff(r, s)).collect();
        out.push(Check::equal(format!("reduced coefficients explicit r={r}"), got, row));
    }
    out
}

/// `mu_star`, reduction of `⋆̃`, and the ideal-separated Wick product agree.
pub fn triangle(cfg: &VerifyConfig) -> Vec<Check> {
    with_context(cfg, "reduction triangle", |ctx| {
        let sp = ctx.space();
        let k = ctx.order();
        let mut s = cfg.sampler(9);
        let mut out = Vec::new();
        for i in 0..cfg.cases {
            let a = reduced(&mut s, sp, i);
            let b = reduced(&mut s, sp, i + 1);
            let tag = format!("{} #{i}", cfg.label());
            let direct = mu_star(&Series::constant(a.clone(), k), &Series::constant(b.clone(), k), ctx);
            let via_tilde = tilde_star(&lift(a.as_laurent(), k), &lift(b.as_laurent(), k), ctx)
                .and_then(|t| reduce_function(&t, ctx));
            let via_wick = wick_reduce(&a, &b, ctx);
            match (direct, via_tilde, via_wick) {
                (Ok(d), Ok(t), Ok(w)) => {
                    out.push(Check::series(format!("reduced product vs reduced tilde {tag}"), Ok(d.try_sub(&t).expect("same shape"))));
                    out.push(Check::series(format!("reduced product vs separated wick {tag}"), Ok(d.try_sub(&w).expect("same shape"))));
                }
                (d, t, w) => {
                    let errs = [d.err(), t.err(), w.err()].into_iter().flatten().map(|e| e.to_string()).collect::<Vec<_>>();
                    out.push(Check::fail(format!("reduction triangle {tag}"), errs.join("; ")));
                }
            }
        }
        out
    })
}

/// Reparametrization and quantum momentum checks for `D = 1 + λ/x`.
pub fn shifted_d_checks(cfg: &VerifyConfig) -> Vec<Check> {
    with_context(cfg, "shifted D", |ctx| {
        let ctx = match ctx.clone().with_d(vec![Rational::one(), Rational::one()]) {
            Ok(c) => c,
            Err(e) => return vec![Check::fail("shifted D", format!("error: {e}"))],
        };
        let sp = ctx.space();
        let k = ctx.order();
        let mut s = cfg.sampler(10);
        let mut out = Vec::new();
        for i in 0..cfg.cases {
            let a = reduced(&mut s, sp, i);
            let b = reduced(&mut s, sp, i + 1);
            let f = lift(&s.invariant(sp, 1, 1), k);
            let tag = format!("{} D=1+l/x #{i}", cfg.label());
            out.push(Check::series(format!("reparametrization {tag}"), reparametrize_check(&a, &b, &ctx)));
            out.push(Check::series(format!("quantum momentum {tag}"), quantum_momentum_check(&f, &ctx)));
        }
        out
    })
}

/// Recursion, coefficient and chart identities for the two-sphere product.
pub fn moreno_checks(rmax: usize, chart_rmax: usize, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for r in 1..=rmax {
        out.push(Check::zero(format!("recursion residual r={r}"), Ok(moreno_recursion_residual(r)), |p| p.is_zero()));
    }
    for r in 2..=rmax as u32 {
        for s in 2..=r {
            out.push(Check::zero(format!("leftover coefficient r={r} s={s}"), Ok(coeff_vanishing(r, s)), |c| {
                c.is_zero()
            }));
        }
    }
    for t in 1..=12u32 {
        for s in 1..=t.min(8) {
            out.push(Check::zero(format!("A identity s={s} t={t}"), Ok(a_identity_check(s, t)), |c| c.is_zero()));
        }
    }
    for r in 1..=rmax {
        out.push(Check::equal(
            format!("k polynomial two ways r={r}"),
            k_poly(r, 1),
            k_poly_from_triple_sum(r, 1),
        ));
    }
    out.extend(chart_checks(chart_rmax, seed));
    out
}

/// `m∘p_r(Δ)(φ⊗ψ) = M̃_r(φ, ψ)` in the affine chart of the two-sphere.
pub fn chart_checks(rmax: usize, seed: u64) -> Vec<Check> {
    let cfg = VerifyConfig {
        seed,
        cases: 3,
        ..VerifyConfig::default()
    };
    with_context(&cfg, "chart", |ctx| {
        let sp = ctx.space();
        let mut s = cfg.sampler(11);
        let mut out = Vec::new();
        for i in 0..cfg.cases {
            let a = reduced(&mut s, sp, i);
            let b = reduced(&mut s, sp, i + 1);
            for r in 1..=rmax {
                out.push(Check::zero(
                    format!("chart cross check r={r} #{i}"),
                    chart_cross_check(&a, &b, r, ctx),
                    |c| c.is_zero(),
                ));
            }
        }
        out
    })
}

/// Suites exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    WickRelations,
    Equiv,
    Reduce,
    Moreno,
    Su1n,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["all", "lemma21", "equiv", "reduce", "moreno", "su1n"];

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "all" => Self::All,
            "lemma21" => Self::WickRelations,
            "equiv" => Self::Equiv,
            "reduce" => Self::Reduce,
            "moreno" => Self::Moreno,
            "su1n" => Self::Su1n,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }
}

fn wick_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = wick_associativity(cfg, 3);
    out.extend(wick_commutator(cfg, 2));
    out.extend(wick_relations(cfg));
    out.extend(product_formula(cfg, 3.min(cfg.order)));
    out
}

fn equiv_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = symbol_checks(cfg.order);
    out.extend(s_on_powers(cfg.order, 4));
    out.extend(a_table(8));
    out.extend(equivalence_on_radials(cfg));
    out.extend(tilde_relations(cfg));
    out.extend(tilde_associativity(cfg));
    out
}

fn reduce_suite(cfg: &VerifyConfig) -> Vec<Check> {
    let mut out = mu_star_checks(cfg);
    out.extend(k_table(cfg.rmax as u32));
    out.extend(triangle(cfg));
    out.extend(shifted_d_checks(cfg));
    out
}

/// Run one suite; `su1n` forces the indefinite metric, the others use `cfg` as given.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Report {
    timed(suite.name(), || match suite {
        Suite::WickRelations => wick_suite(cfg),
        Suite::Equiv => equiv_suite(cfg),
        Suite::Reduce => reduce_suite(cfg),
        Suite::Moreno => moreno_checks(cfg.rmax, 3, cfg.seed),
        Suite::Su1n => {
            let dn = VerifyConfig {
                indefinite: true,
                ..cfg.clone()
            };
            let mut out = wick_associativity(&dn, 3);
            out.extend(wick_relations(&dn));
            out.extend(mu_star_checks(&dn));
            out
        }
        Suite::All => [Suite::WickRelations, Suite::Equiv, Suite::Reduce, Suite::Moreno, Suite::Su1n]
            .into_iter()
            .flat_map(|s| run_suite(s, cfg).checks)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            order: 3,
            cases: 2,
            rmax: 4,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn suites_pass_on_small_inputs() {
        for suite in [Suite::WickRelations, Suite::Equiv, Suite::Reduce, Suite::Moreno, Suite::Su1n] {
            let rep = run_suite(suite, &small());
            let bad: Vec<_> = rep.failures().collect();
            assert!(bad.is_empty(), "{}: {bad:?}", suite.name());
            assert!(rep.count() > 0);
        }
    }

    #[test]
    fn a_rows_by_inversion() {
        assert_eq!(a_row_by_inversion(2, 3).unwrap(), vec![ratio(1, 1), ratio(-3, 1), ratio(7, 1), ratio(-15, 1)]);
    }

    #[test]
    fn failures_carry_residuals() {
        let c = Check::equal("x", 1, 2);
        assert!(!c.passed);
        assert_eq!(c.residual.as_deref(), Some("1 != 2"));
        let names: Vec<_> = Suite::NAMES.iter().map(|n| Suite::from_name(n).unwrap().name()).collect();
        assert_eq!(names, Suite::NAMES);
    }
}
