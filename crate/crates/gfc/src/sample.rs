//! Seeded random chains for the verification suites: coefficients in
//! {−2..2}, polynomial degree ≤ 2 in the coordinates.

use crate::coeff::Q;
use crate::graded::{Elem, Mono};
use crate::model::{Fam, Side, Space};
use crate::poly::Kind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Per-sample seed: independent streams for (suite seed, sample index).
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub struct Sampler {
    pub sp: Arc<Space>,
    pub rng: ChaCha8Rng,
    pub jet_order: u32,
    pub max_arity: usize,
}

impl Sampler {
    pub fn new(sp: &Arc<Space>, seed: u64, jet_order: u32, max_arity: usize) -> Sampler {
        Sampler {
            sp: sp.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            jet_order,
            max_arity,
        }
    }

    fn coeff(&mut self) -> Q {
        let c = self.rng.gen_range(1..=2);
        Q::int(if self.rng.gen_bool(0.5) { -c } else { c })
    }

    /// A random monomial of total order `order` in the given generators
    /// (odd generators at most once); None when impossible.
    pub fn monomial(&mut self, gens: &[usize], order: u32) -> Option<Mono> {
        let mut exps = vec![0u32; gens.len()];
        let mut left = order;
        let mut tries = 0;
        while left > 0 {
            tries += 1;
            if tries > 64 {
                return None;
            }
            let i = self.rng.gen_range(0..gens.len());
            if self.sp.ctx.is_odd(gens[i]) && exps[i] == 1 {
                continue;
            }
            exps[i] += 1;
            left -= 1;
        }
        let mut m: Vec<(u16, u16)> = gens
            .iter()
            .zip(&exps)
            .filter(|(_, &e)| e > 0)
            .map(|(&g, &e)| (g as u16, e as u16))
            .collect();
        m.sort();
        Some(m.into_iter().collect())
    }

    fn poly(&mut self, gens: &[usize], max_deg: u32, terms: usize) -> Elem {
        let mut out = self.sp.zero();
        for _ in 0..terms {
            let d = self.rng.gen_range(0..=max_deg);
            if let Some(m) = self.monomial(gens, d) {
                let c = self.coeff();
                out.add_assign(&Elem::monomial(&self.sp.ctx, m, c));
            }
        }
        out
    }

    /// A nonzero base function.
    pub fn function(&mut self) -> Elem {
        let gens = self.sp.fam(Fam::X).to_vec();
        loop {
            let n = self.rng.gen_range(1..=3);
            let f = self.poly(&gens, 2, n);
            if !f.is_zero() {
                return f;
            }
        }
    }

    fn homogeneous(&mut self, e: Elem) -> Elem {
        let parts: Vec<Elem> = e.by_degree().into_values().collect();
        let best = parts.iter().map(|p| p.len()).max().unwrap_or(0);
        parts.into_iter().find(|p| p.len() == best).unwrap_or(e)
    }

    fn word(&mut self, fam: Fam, max: u32, min: u32) -> Elem {
        let gens = self.sp.fam(fam).to_vec();
        loop {
            let d = self.rng.gen_range(min..=max);
            if let Some(m) = self.monomial(&gens, d) {
                return Elem::monomial(&self.sp.ctx, m, Q::ONE);
            }
        }
    }

    /// A homogeneous base chain of the level with the given arity (None:
    /// random arity ≤ max_arity).
    pub fn chain_of_arity(&mut self, level: Kind, arity: Option<usize>) -> Elem {
        let sp = self.sp.clone();
        loop {
            let p = arity.unwrap_or_else(|| self.rng.gen_range(0..=self.max_arity));
            let mut e = sp.zero();
            for _ in 0..self.rng.gen_range(1..=2) {
                let mut t = self.function();
                match level {
                    Kind::T | Kind::A => {
                        let fam = if level == Kind::T { Fam::PsiX } else { Fam::DxL };
                        let gens = sp.fam(fam).to_vec();
                        if let Some(m) = self.monomial(&gens, p as u32) {
                            t = t.mul(&Elem::monomial(&sp.ctx, m, Q::ONE));
                        } else {
                            t = sp.zero();
                        }
                    }
                    Kind::Tensor(k, l) => {
                        for a in 1..=k {
                            let i = self.rng.gen_range(0..sp.n);
                            t = t.mul(&sp.g(Fam::VecX(a), i));
                        }
                        for b in 1..=l {
                            let i = self.rng.gen_range(0..sp.n);
                            t = t.mul(&sp.g(Fam::CovX(k + b), i));
                        }
                    }
                    Kind::D => {
                        for a in 1..=p {
                            let w = self.word(Fam::DsX(a), self.jet_order.min(2), 0);
                            t = t.mul(&Elem::gen(&sp.ctx, sp.s(a))).mul(&w);
                        }
                    }
                    Kind::C => {
                        for a in 1..=p {
                            let w = self.word(Fam::JetX(a), self.jet_order, 0);
                            t = t.mul(&Elem::gen(&sp.ctx, sp.t(a))).mul(&w);
                        }
                    }
                }
                e.add_assign(&t);
            }
            let e = self.homogeneous(e);
            if !e.is_zero() {
                return e;
            }
        }
    }

    pub fn chain(&mut self, level: Kind) -> Elem {
        self.chain_of_arity(level, None)
    }

    /// A vector field as an arity-1 polyvector.
    pub fn vector_field(&mut self) -> Elem {
        self.chain_of_arity(Kind::T, Some(1))
    }

    /// A U-element in slot 1 (order ≤ 2).
    pub fn u_element(&mut self) -> Elem {
        let mut e = self.sp.zero();
        for _ in 0..self.rng.gen_range(1..=2) {
            let w = self.word(Fam::DsX(1), 2, 0);
            e.add_assign(&self.function().mul(&w));
        }
        let e = self.homogeneous(e);
        if e.is_zero() {
            self.sp.one()
        } else {
            e
        }
    }

    /// A jet in slot 1: a function of x and z of jet order ≤ jet_order.
    pub fn jet(&mut self) -> Elem {
        let mut e = self.sp.zero();
        for _ in 0..self.rng.gen_range(1..=2) {
            let w = self.word(Fam::JetX(1), self.jet_order, 0);
            e.add_assign(&self.function().mul(&w));
        }
        let e = self.homogeneous(e);
        if e.is_zero() {
            self.sp.one()
        } else {
            e
        }
    }

    /// A Fedosov-side coefficient: polynomial in x, ξ, y with ξ-degree ≤ 1
    /// and y-degree ≤ 2.
    pub fn fedosov_function(&mut self) -> Elem {
        let sp = self.sp.clone();
        let mut e = self.function();
        let ys = sp.fam(Fam::Y).to_vec();
        let xis = sp.fam(Fam::Xi).to_vec();
        let d = self.rng.gen_range(0..=2);
        if let Some(m) = self.monomial(&ys, d) {
            e = e.mul(&Elem::monomial(&sp.ctx, m, Q::ONE));
        }
        if self.rng.gen_bool(0.5) {
            if let Some(m) = self.monomial(&xis, 1) {
                e = e.mul(&Elem::monomial(&sp.ctx, m, Q::ONE));
            }
        }
        e
    }

    /// A Fedosov-side chain of the level (legs on the Fedosov side).
    pub fn fedosov_chain(&mut self, level: Kind) -> Elem {
        loop {
            let base = self.chain(level);
            let f = self.fedosov_function();
            let e = self.homogeneous(f.mul(&to_fedosov_legs(&self.sp, level, &base)));
            if !e.is_zero() {
                return e;
            }
        }
    }
}

/// Rename base legs to the Fedosov ones, keeping coefficients (the base
/// coordinates x stay as parameters).
pub fn to_fedosov_legs(sp: &Space, level: Kind, e: &Elem) -> Elem {
    let mut pairs = vec![(Fam::PsiX, Fam::PsiY), (Fam::DxL, Fam::DyL)];
    for a in 1..=sp.slots {
        pairs.push((Fam::VecX(a), Fam::VecY(a)));
        pairs.push((Fam::CovX(a), Fam::CovY(a)));
        pairs.push((Side::Base.ds(a), Side::Fedosov.ds(a)));
        pairs.push((Side::Base.jet(a), Side::Fedosov.jet(a)));
    }
    let _ = level;
    crate::hopf::rename(sp, e, &pairs)
}
