//! τ̆ on the Hopf algebroid U and on jets: structure-map preservation, the
//! conjugation oracle 𝒴_v and the span inversion.

use crate::contractions::{symbol_order, trusted, FedosovContraction, Setup};
use crate::graded::{Elem, Mono};
use crate::hopf::{self, rename, u_apply, u_compose, u_coproduct, u_counit, Jets, Pbw};
use crate::model::{Fam, Side, Space};
use crate::poly::dpoly;
use crate::report::Checker;

/// The D and C contractions, viewed on U-elements, jets and functions.
pub struct TauHopf<'a> {
    pub s: &'a Setup,
    pub d: &'a FedosovContraction,
    pub c: &'a FedosovContraction,
}

/// Two-slot U-element Σ c·W₁W₂ as the D-chain Σ c·s₁W₁·s₂W₂.
pub fn u2_chain(sp: &Space, side: Side, e: &Elem) -> Elem {
    let (f1, f2) = (side.ds(1), side.ds(2));
    let mut out = sp.zero();
    for (word, c) in e.collect_right(&|g| sp.in_fam(f1, g) || sp.in_fam(f2, g)) {
        let (w1, w2): (Mono, Mono) = word.iter().copied().partition(|&(g, _)| sp.in_fam(f1, g as usize));
        let w1 = Elem::monomial(&sp.ctx, w1, crate::coeff::Q::ONE);
        let w2 = Elem::monomial(&sp.ctx, w2, crate::coeff::Q::ONE);
        out.add_assign(
            &c.mul(&Elem::gen(&sp.ctx, sp.s(1)))
                .mul(&w1)
                .mul(&Elem::gen(&sp.ctx, sp.s(2)))
                .mul(&w2),
        );
    }
    out
}

pub fn jet_chain(sp: &Space, xi: &Elem) -> Elem {
    xi.mul(&Elem::gen(&sp.ctx, sp.t(1)))
}

/// Inverse of [`jet_chain`].
pub fn chain_jet(sp: &Space, c: &Elem) -> Elem {
    let t1 = sp.t(1);
    let key: Mono = [(t1 as u16, 1u16)].into_iter().collect();
    c.collect_right(&|g| g == t1).remove(&key).unwrap_or_else(|| sp.zero())
}

impl TauHopf<'_> {
    pub fn u(&self, u: &Elem) -> Elem {
        let sp = &self.s.sp;
        dpoly::to_u(sp, &(self.d.maps.tau)(&dpoly::from_u(sp, u)))
    }

    pub fn jet(&self, xi: &Elem) -> Elem {
        let sp = &self.s.sp;
        chain_jet(sp, &(self.c.maps.tau)(&jet_chain(sp, xi)))
    }

    pub fn function(&self, f: &Elem) -> Elem {
        (self.d.maps.tau)(f)
    }

    /// Hopf algebroid maps of U: product, coproduct, counit, units and the
    /// action on functions. u, v are slot-1 U-elements, f a function.
    pub fn check_u(&self, u: &Elem, v: &Elem, f: &Elem, chk: &mut Checker) {
        let sp = &self.s.sp;
        let n = self.s.truncation();
        let (b, fs) = (Side::Base, Side::Fedosov);
        let (tu, tv) = (self.u(u), self.u(v));
        let ou = symbol_order(sp, u);
        let input = format!("u={u}; v={v}; f={f}");
        let cut = |k: u32| n.saturating_sub(k);
        let lhs = self.u(&u_compose(sp, b, 1, u, v));
        chk.zero("τ(uv) = τu·τv", &input, &trusted(&lhs.sub(&u_compose(sp, fs, 1, &tu, &tv)), cut(ou)));
        let lhs = (self.d.maps.tau)(&u2_chain(sp, b, &u_coproduct(sp, b, u)));
        let rhs = u2_chain(sp, fs, &u_coproduct(sp, fs, &tu));
        chk.equal("Δτu = (τ⊗τ)Δu", &input, &lhs, &rhs);
        chk.equal("ετu = τεu", &input, &u_counit(sp, fs, 1, &tu), &self.function(&u_counit(sp, b, 1, u)));
        let lhs = self.function(&u_apply(sp, b, 1, u, f));
        let rhs = u_apply(sp, fs, 1, &tu, &self.function(f));
        chk.zero("τ(u(f)) = τu(τf)", &input, &trusted(&lhs.sub(&rhs), cut(ou)));
        chk.equal("τ(1) = 1", "1", &self.u(&sp.one()), &sp.one());
    }

    /// Formal groupoid maps on jets. ξ, η jets; u, v U-elements; f a function.
    #[allow(clippy::too_many_arguments)]
    pub fn check_jets(&self, xi: &Elem, eta: &Elem, u: &Elem, v: &Elem, f: &Elem, chk: &mut Checker) {
        let sp = &self.s.sp;
        let n = self.s.truncation();
        let (jb, jf) = (Jets::new(sp, Side::Base), Jets::new(sp, Side::Fedosov));
        let (txi, teta, tu, tv, tf) = (self.jet(xi), self.jet(eta), self.u(u), self.u(v), self.function(f));
        let (ou, ov) = (symbol_order(sp, u), symbol_order(sp, v));
        let cut = |k: u32| n.saturating_sub(k);
        let input = format!("ξ={xi}; η={eta}; u={u}; v={v}; f={f}");
        chk.equal("τ(ξ*η) = τξ*τη", &input, &self.jet(&jb.product(xi, eta)), &jf.product(&txi, &teta));
        chk.equal("τ(𝟙) = 𝟙", "𝟙", &self.jet(&jb.unit()), &jf.unit());
        chk.equal("ετξ = τεξ", &input, &jf.counit(&txi), &self.function(&jb.counit(xi)));
        let lhs = jf.chained_act(&jf.coproduct(&txi), &tu, &tv);
        let rhs = self.function(&jb.chained_act(&jb.coproduct(xi), u, v));
        chk.zero("⟨Δτξ, τu⊗τv⟩ = τ⟨Δξ, u⊗v⟩", &input, &trusted(&lhs.sub(&rhs), cut(ou + ov)));
        chk.equal("Sτξ = τSξ", &input, &jf.antipode(&txi), &self.jet(&jb.antipode(xi)));
        chk.equal("τα(f) = ατ(f)", &input, &self.jet(&jb.alpha(f)), &jf.alpha(&tf));
        chk.equal("τβ(f) = βτ(f)", &input, &self.jet(&jb.beta(f)), &jf.beta(&tf));
        let lhs = jf.pairing(&txi, &tu);
        let rhs = self.function(&jb.pairing(xi, u));
        chk.zero("⟨τξ, τu⟩ = τ⟨ξ, u⟩", &input, &trusted(&lhs.sub(&rhs), cut(ou)));
        chk.equal("τf·τξ = τ(f·ξ)", &input, &tf.mul(&txi), &self.jet(&f.mul(xi)));
        let lhs = jf.gro_u(&tu, &txi);
        let rhs = self.jet(&jb.gro_u(u, xi));
        chk.zero("∇^G_τu τξ = τ∇^G_u ξ", &input, &trusted(&lhs.sub(&rhs), cut(ou)));
        let ss = jb.antipode(&jb.antipode(xi));
        chk.observe("S²ξ = ξ (base)", ss == *xi);
    }

    /// 𝒴_v = pbw^⊤∘R_v^⊤∘(pbw^⊤)⁻¹ applied to a function g(x, y), with
    /// R_v(u) = (−1)^{|v||u|}u·v and ⟨R_v^⊤ξ, u⟩ = (−1)^{|v||ξ|}⟨ξ, R_v u⟩,
    /// realized by pairing ξ against the shifted words pbw(ς^J)·v.
    pub fn conjugation_oracle(&self, v: &Elem, g: &Elem) -> Elem {
        let s = self.s;
        let sp = &s.sp;
        let jets = Jets::new(sp, Side::Base);
        let w = rename(sp, g, &[(Fam::Y, Side::Fedosov.jet(1))]);
        let xi = s.pbw_transpose_inv(&w);
        let mut out = sp.zero();
        for (dv, vp) in v.by_degree() {
            for (dx, xp) in xi.by_degree() {
                for (pbw_j, dual) in s.jet_basis() {
                    let dj = pbw_j.hdeg();
                    let k = jets.pairing(&xp, &u_compose(sp, Side::Base, 1, pbw_j, &vp));
                    if k.is_zero() {
                        continue;
                    }
                    // ⟨w^J, ∂^J⟩ carries (−1)^{|J|} against the unsigned normalization
                    let neg = (dv * dx + dv * dj + dj).rem_euclid(2) == 1;
                    let t = k.mul(dual);
                    out.add_assign(&if neg { t.neg() } else { t });
                }
            }
        }
        rename(sp, &out, &[(Side::Fedosov.jet(1), Fam::Y)])
    }

    /// 𝒴_v(g) = τ̆(v)(g) and 𝒴_{uv} = 𝒴_u∘𝒴_v.
    pub fn check_conjugation(&self, u: &Elem, v: &Elem, g: &Elem, chk: &mut Checker) {
        let sp = &self.s.sp;
        let n = self.s.truncation();
        let input = format!("u={u}; v={v}; g={g}");
        let ov = symbol_order(sp, v);
        let ou = symbol_order(sp, u);
        let yv = self.conjugation_oracle(v, g);
        let tv = u_apply(sp, Side::Fedosov, 1, &self.u(v), g);
        chk.zero("𝒴_v = τ̆(v)", &input, &trusted(&yv.sub(&tv), n.saturating_sub(ov)));
        let yuv = self.conjugation_oracle(&u_compose(sp, Side::Base, 1, u, v), g);
        let yu_yv = self.conjugation_oracle(u, &yv);
        chk.zero("𝒴_uv = 𝒴_u∘𝒴_v", &input, &trusted(&yuv.sub(&yu_yv), n.saturating_sub(ou + ov)));
    }

    /// U(F) is the C∞(N)-span of τ̆(D(M)): with τ̆(∂_j) = Σ_i C_ij ∂_{y_i},
    /// solve C∘B = I by B = Σ Aⁿ (A = I − C) and rebuild every ∂_{y_k}.
    pub fn check_span(&self, chk: &mut Checker) {
        let sp = &self.s.sp;
        let n = sp.n;
        let dy = Side::Fedosov.ds(1);
        let cols: Vec<Elem> = (0..n).map(|j| self.u(&sp.g(Fam::DsX(1), j))).collect();
        let mut c = vec![vec![sp.zero(); n]; n];
        for (j, col) in cols.iter().enumerate() {
            for (word, coeff) in col.collect_right(&|g| sp.in_fam(dy, g)) {
                let ok = word.len() == 1 && word[0].1 == 1;
                chk.truth("τ̆(∂_j) is a vertical vector field", format!("j={j}"), ok, col);
                if ok {
                    c[sp.pos_in(dy, word[0].0 as usize).unwrap()][j] = coeff;
                }
            }
        }
        let ident = |i: usize, k: usize| if i == k { sp.one() } else { sp.zero() };
        let a: Vec<Vec<Elem>> = (0..n).map(|i| (0..n).map(|j| ident(i, j).sub(&c[i][j])).collect()).collect();
        // (X∘Y)_ik = Σ_j Y_jk·X_ij
        let circ = |x: &Vec<Vec<Elem>>, y: &Vec<Vec<Elem>>| -> Vec<Vec<Elem>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|k| {
                            let mut s = sp.zero();
                            for j in 0..n {
                                s.add_assign(&y[j][k].mul(&x[i][j]));
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        };
        let mut bm: Vec<Vec<Elem>> = (0..n).map(|i| (0..n).map(|k| ident(i, k)).collect()).collect();
        for _ in 0..=sp.truncation() + 1 {
            let ab = circ(&a, &bm);
            bm = (0..n).map(|i| (0..n).map(|k| ident(i, k).add(&ab[i][k])).collect()).collect();
        }
        for k in 0..n {
            let mut rebuilt = sp.zero();
            for (j, col) in cols.iter().enumerate() {
                rebuilt.add_assign(&bm[j][k].mul(col));
            }
            chk.equal("Σ_j B_jk τ̆(∂_j) = ∂_{y_k}", format!("k={k}"), &rebuilt, &sp.g(dy, k));
        }
    }
}

/// Δ∘pbw = (pbw⊗pbw)∘Δ on symmetric words up to `order`, on both sides.
pub fn check_pbw_coalgebra(s: &Setup, order: u32, chk: &mut Checker) {
    let sp = &s.sp;
    for side in [Side::Base, Side::Fedosov] {
        let p = Pbw::new(sp, side, order);
        for k in 0..=order {
            for w in hopf::words_of_order(sp, side.sym(), k) {
                let e = Elem::monomial(&sp.ctx, w, crate::coeff::Q::ONE);
                let lhs = u_coproduct(sp, side, &p.apply(&e));
                let rhs = p.apply2(&p.sym_coproduct(&e));
                chk.equal(&format!("Δ∘pbw = (pbw⊗pbw)∘Δ ({})", side.name()), &e, &lhs, &rhs);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference;
    use crate::poly::Kind;
    use crate::sample::Sampler;

    #[test]
    fn tau_is_a_groupoid_morphism() {
        for name in ["curved-r1", "flat-r2", "odd-line"] {
            let s = Setup::new(&reference::get(name), 4, 2).unwrap();
            let d = s.fedosov(Kind::D, &[]).unwrap();
            let c = s.fedosov(Kind::C, &[]).unwrap();
            let th = TauHopf { s: &s, d: &d, c: &c };
            let mut chk = Checker::new();
            for seed in 0..6 {
                let mut r = Sampler::new(&s.sp, seed, 3, 2);
                let (u, v, f) = (r.u_element(), r.u_element(), r.function());
                th.check_u(&u, &v, &f, &mut chk);
                let (xi, eta) = (r.jet(), r.jet());
                th.check_jets(&xi, &eta, &u, &v, &f, &mut chk);
                let g = s.tau_nat(Kind::T, &r.function()).add(&r.fedosov_function().filter(|m| {
                    Elem::bigrade_of(&s.sp.ctx, m).0 == 0
                }));
                th.check_conjugation(&u, &v, &g, &mut chk);
            }
            th.check_span(&mut chk);
            check_pbw_coalgebra(&s, 3, &mut chk);
            assert!(chk.passed(), "{name}: {:#?}", chk.failures);
        }
    }
}
