//! Seeded generators for test inputs. Coefficients are drawn from
//! `{0, ±1, ±1/2, ±i}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::{LaurentElem, Monomial, Poly, VarSpace};
use crate::scalar::{ratio, GaussianRational};
use crate::series::{Indeterminate, UnivarPoly};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn coeff(&mut self) -> GaussianRational {
        match self.rng.gen_range(0..7) {
            0 => GaussianRational::from_int(0),
            1 => GaussianRational::from_int(1),
            2 => GaussianRational::from_int(-1),
            3 => GaussianRational::real(ratio(1, 2)),
            4 => GaussianRational::real(ratio(-1, 2)),
            5 => GaussianRational::i(),
            _ => -GaussianRational::i(),
        }
    }

    pub fn nonzero_coeff(&mut self) -> GaussianRational {
        loop {
            let c = self.coeff();
            if !num_traits::Zero::is_zero(&c) {
                return c;
            }
        }
    }

    fn monomial(&mut self, space: VarSpace, block: usize, holo: usize, anti: usize) -> Monomial {
        let mut m = Monomial::one(space.nvars());
        for _ in 0..holo {
            let k = self.rng.gen_range(0..space.dim());
            m.0[space.holo_index(block, k)] += 1;
        }
        for _ in 0..anti {
            let k = self.rng.gen_range(0..space.dim());
            m.0[space.anti_index(block, k)] += 1;
        }
        m
    }

    /// At most `terms` terms, each of total degree `≤ deg` in every block.
    pub fn poly(&mut self, space: VarSpace, deg: usize, terms: usize) -> Poly {
        let mut p = Poly::zero(space);
        for _ in 0..terms {
            let mut m = Monomial::one(space.nvars());
            for b in 0..space.blocks() {
                let h = self.rng.gen_range(0..=deg);
                let a = self.rng.gen_range(0..=deg - h);
                let mb = self.monomial(space, b, h, a);
                for (e, f) in m.0.iter_mut().zip(mb.0.iter()) {
                    *e += f;
                }
            }
            p.add_term(m, self.coeff());
        }
        p
    }

    /// `P / x^k` with `P` arbitrary and `0 ≤ k ≤ xdepth`.
    pub fn laurent(&mut self, space: VarSpace, deg: usize, xdepth: i32) -> LaurentElem {
        let p = self.poly(space, deg, 3);
        let k = self.rng.gen_range(0..=xdepth);
        LaurentElem::new(p, [k, 0])
    }

    /// Degree-zero homogeneous `P / x^p` with `P` of bidegree `(p, p)`, nonzero.
    pub fn homogeneous(&mut self, space: VarSpace, p: usize, terms: usize) -> LaurentElem {
        let space = space.to_single_point();
        loop {
            let mut num = Poly::zero(space);
            for _ in 0..terms.max(1) {
                let m = self.monomial(space, 0, p, p);
                num.add_term(m, self.coeff());
            }
            if !num.is_zero() {
                return LaurentElem::new(num, [p as i32, 0]);
            }
        }
    }

    /// Invariant element `Σ_j h_j x^j` with `h_j` homogeneous, `j ∈ [−jmax, jmax]`.
    pub fn invariant(&mut self, space: VarSpace, p: usize, jmax: i32) -> LaurentElem {
        let space = space.to_single_point();
        let mut acc = LaurentElem::zero(space);
        for j in -jmax..=jmax {
            if self.rng.gen_bool(0.5) {
                let deg = self.rng.gen_range(0..=p);
                let h = self.homogeneous(space, deg, 2);
                let t = h.try_mul(&LaurentElem::x_pow(space, j)).expect("same space");
                acc = acc.try_add(&t).expect("same space");
            }
        }
        acc
    }

    /// Radial profile `ρ(x)` of degree `≤ deg`.
    pub fn radial(&mut self, deg: usize) -> UnivarPoly {
        let c = (0..=deg).map(|_| self.coeff()).collect();
        UnivarPoly::new(Indeterminate::X, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_shaped() {
        let sp = VarSpace::euclidean(2).unwrap();
        let a = Sampler::new(7).homogeneous(sp, 2, 3);
        let b = Sampler::new(7).homogeneous(sp, 2, 3);
        assert_eq!(a, b);
        assert!(a.is_homogeneous());
        let mut s = Sampler::new(11);
        for _ in 0..20 {
            assert!(s.invariant(sp, 2, 2).is_u1_invariant());
            assert!(s.laurent(sp, 2, 2).is_canonical());
        }
    }
}
