//! Polydifferential operators.
//!
//! An arity-p chain is Σ c·(s₁S₁)⋯(s_pS_p): c a function, s_a the slot
//! marker (degree +1) and S_a a word in the slot-a derivative symbols. The
//! word order is the context order, so the Koszul rule of the polynomial
//! algebra realizes the shift identification. On shifted inputs σf
//! (degree |f| − 1), (sS)(σf) = (−1)^{|S|} S(f).

use super::{odd, sign};
use crate::graded::{Derivation, Elem, Mono};
use crate::hopf::{apply_word, retarget, u_compose};
use crate::model::{Side, Space};
use crate::coeff::Q;

/// A term split into its coefficient and its per-slot words.
pub struct Split {
    pub coeff: Mono,
    pub c: Q,
    /// per slot 1..=p: the symbol word (marker removed)
    pub words: Vec<Mono>,
}

fn slot_of(sp: &Space, side: Side, g: usize) -> Option<usize> {
    (1..=sp.slots).find(|&a| g == sp.s(a) || sp.in_fam(side.ds(a), g))
}

pub fn split_term(sp: &Space, side: Side, m: &Mono, c: &Q) -> Split {
    let mut coeff = Mono::new();
    let mut words: Vec<Mono> = Vec::new();
    for &(g, e) in m {
        match slot_of(sp, side, g as usize) {
            None => coeff.push((g, e)),
            Some(a) => {
                while words.len() < a {
                    words.push(Mono::new());
                }
                if g as usize != sp.s(a) {
                    words[a - 1].push((g, e));
                }
            }
        }
    }
    Split {
        coeff,
        c: c.clone(),
        words,
    }
}

/// Arity of the first term (number of slot markers).
pub fn arity(sp: &Space, e: &Elem) -> usize {
    e.terms()
        .next()
        .map(|(m, _)| (1..=sp.slots).filter(|&a| m.iter().any(|&(g, _)| g as usize == sp.s(a))).count())
        .unwrap_or(0)
}

/// Split a chain into its arity components.
pub fn by_arity(sp: &Space, e: &Elem) -> std::collections::BTreeMap<usize, Elem> {
    let mut out = std::collections::BTreeMap::new();
    for (m, c) in e.terms() {
        let p = (1..=sp.slots).filter(|&a| m.iter().any(|&(g, _)| g as usize == sp.s(a))).count();
        out.entry(p)
            .or_insert_with(|| sp.zero())
            .add_assign(&Elem::monomial(&sp.ctx, m.clone(), c.clone()));
    }
    out
}

/// Move the slot-`from` material (marker and symbols) of every term to slot `to`.
pub fn move_slots(sp: &Space, side: Side, e: &Elem, shift: &dyn Fn(usize) -> usize) -> Elem {
    e.substitute(&|g| {
        let a = slot_of(sp, side, g)?;
        let b = shift(a);
        if b == a {
            return None;
        }
        if g == sp.s(a) {
            Some(Elem::gen(&sp.ctx, sp.s(b)))
        } else {
            let i = sp.pos_in(side.ds(a), g).unwrap();
            Some(sp.g(side.ds(b), i))
        }
    })
}

fn word_elem(sp: &Space, w: &Mono) -> Elem {
    Elem::monomial(&sp.ctx, w.clone(), Q::ONE)
}

fn word_degree(sp: &Space, w: &Mono) -> i32 {
    sp.ctx.mono_degree(w)
}

/// Build the chain c·(s₁W₁)⋯ from a split (all products in context order).
fn assemble(sp: &Space, coeff: &Elem, words: &[Elem]) -> Elem {
    let mut out = coeff.clone();
    for (a, w) in words.iter().enumerate() {
        out = out.mul(&Elem::gen(&sp.ctx, sp.s(a + 1))).mul(w);
    }
    out
}

/// The shifted multiplication m = −s₁s₂, with m(σf, σg) = (−1)^{|f|} fg.
pub fn mult(sp: &Space) -> Elem {
    Elem::gen(&sp.ctx, sp.s(1)).mul(&Elem::gen(&sp.ctx, sp.s(2))).neg()
}

/// The arity-1 chain s₁·u of a U-element in slot 1; with this sign the
/// chain evaluates to (−1)^{|u|}u(f) and composition is preserved.
pub fn from_u(sp: &Space, u: &Elem) -> Elem {
    Elem::gen(&sp.ctx, sp.s(1)).mul(u)
}

/// Inverse of [`from_u`].
pub fn to_u(sp: &Space, e: &Elem) -> Elem {
    e.deriv(sp.s(1))
}

/// Evaluate on shifted arguments σf₁,…,σf_p (brute-force semantics).
pub fn evaluate(sp: &Space, side: Side, phi: &Elem, args: &[Elem]) -> Elem {
    let mut out = sp.zero();
    let arg_deg: Vec<i32> = args.iter().map(|f| f.hdeg() - 1).collect();
    for (m, c) in phi.terms() {
        let sp_t = split_term(sp, side, m, c);
        if sp_t.words.len() != args.len() {
            continue;
        }
        let mut acc = Elem::monomial(&sp.ctx, sp_t.coeff.clone(), c.clone());
        let mut neg = false;
        let factor_deg: Vec<i32> = sp_t.words.iter().map(|w| 1 + word_degree(sp, w)).collect();
        for j in 0..args.len() {
            for i in 0..j {
                if odd(factor_deg[j] * arg_deg[i]) {
                    neg = !neg;
                }
            }
        }
        for (a, w) in sp_t.words.iter().enumerate() {
            let target = retarget(sp, side.ds(a + 1), side.var());
            let v = apply_word(w, &target, &args[a]);
            if odd(word_degree(sp, w)) {
                neg = !neg;
            }
            acc = acc.mul(&v);
        }
        out.add_assign(&sign(neg, acc));
    }
    out
}

/// Composition φ∘_kψ (0-based k): insert ψ into slot k+1 of φ.
pub fn insert(sp: &Space, side: Side, phi: &Elem, k: usize, psi: &Elem) -> Elem {
    let mut out = sp.zero();
    for (q, psi_q) in by_arity(sp, psi) {
        out.add_assign(&insert_homogeneous(sp, side, phi, k, q, &psi_q));
    }
    out
}

fn insert_homogeneous(sp: &Space, side: Side, phi: &Elem, k: usize, q: usize, psi: &Elem) -> Elem {
    let mut out = sp.zero();
    for (pd, psi_h) in psi.by_degree() {
        for (m, c) in phi.terms() {
            let t = split_term(sp, side, m, c);
            let p = t.words.len();
            if k >= p {
                continue;
            }
            let s_word = &t.words[k];
            let tail_deg: i32 = t.words[k + 1..].iter().map(|w| 1 + word_degree(sp, w)).sum();
            let eps = odd((pd - 1) * tail_deg) ^ odd(word_degree(sp, s_word));
            let inner = distribute(sp, side, s_word, k + 1, q, &psi_h);
            let inner = move_slots(sp, side, &inner, &|a| a + k);
            let mut acc = Elem::monomial(&sp.ctx, t.coeff.clone(), c.clone());
            for (a, w) in t.words.iter().enumerate().take(k) {
                acc = acc.mul(&Elem::gen(&sp.ctx, sp.s(a + 1))).mul(&word_elem(sp, w));
            }
            acc = acc.mul(&inner);
            for (j, w) in t.words.iter().enumerate().skip(k + 1) {
                let slot = j + q;
                let w2 = retag(sp, side, &word_elem(sp, w), j + 1, slot);
                acc = acc.mul(&Elem::gen(&sp.ctx, sp.s(slot))).mul(&w2);
            }
            out.add_assign(&sign(eps, acc));
        }
    }
    out
}

/// Rename a slot-`from` word to slot `to`.
fn retag(sp: &Space, side: Side, w: &Elem, from: usize, to: usize) -> Elem {
    if from == to {
        return w.clone();
    }
    w.substitute(&|g| sp.pos_in(side.ds(from), g).map(|i| sp.g(side.ds(to), i)))
}

/// S·ψ: the word S of slot `from` acting on the value of ψ (arity q, slots
/// 1..q) by the Leibniz rule, i.e. Δ^q(S) distributed over ψ's coefficient
/// and words.
fn distribute(sp: &Space, side: Side, s_word: &Mono, from: usize, q: usize, psi: &Elem) -> Elem {
    let mut cur = psi.clone();
    for &(g, e) in s_word.iter().rev() {
        let i = sp.pos_in(side.ds(from), g as usize).unwrap();
        for _ in 0..e {
            cur = act_symbol(sp, side, i, q, &cur);
        }
    }
    cur
}

/// ∂_i acting on a chain value by Leibniz: on the coefficient and by left
/// multiplication on each of the q words.
fn act_symbol(sp: &Space, side: Side, i: usize, q: usize, e: &Elem) -> Elem {
    let gi = sp.idx(side.var(), i);
    let di = sp.degs[i];
    let mut out = sp.zero();
    for (m, c) in e.terms() {
        let t = split_term(sp, side, m, c);
        let coeff = Elem::monomial(&sp.ctx, t.coeff.clone(), c.clone());
        let words: Vec<Elem> = t.words.iter().map(|w| word_elem(sp, w)).collect();
        let dc = coeff.deriv(gi);
        if !dc.is_zero() {
            out.add_assign(&assemble(sp, &dc, &words));
        }
        // ∂_i passes c, the earlier factors and the marker s_a
        let mut passed = coeff.hdeg();
        for a in 0..q {
            let slot = a + 1;
            let mut ws = words.clone();
            passed += 1;
            ws[a] = sp.g(side.ds(slot), i).mul(&ws[a]);
            out.add_assign(&sign(odd(di * passed), assemble(sp, &coeff, &ws)));
            passed += word_degree(sp, &t.words[a]);
        }
    }
    out
}

/// φ⋆ψ = Σ_k φ∘_kψ
pub fn star(sp: &Space, side: Side, phi: &Elem, psi: &Elem) -> Elem {
    let mut out = sp.zero();
    for (p, phi_p) in by_arity(sp, phi) {
        for k in 0..p {
            out.add_assign(&insert(sp, side, &phi_p, k, psi));
        }
    }
    out
}

/// [φ, ψ] = φ⋆ψ − (−1)^{(|φ|−1)(|ψ|−1)} ψ⋆φ
pub fn gerstenhaber(sp: &Space, side: Side, phi: &Elem, psi: &Elem) -> Elem {
    let mut out = sp.zero();
    for (dp, a) in phi.by_degree() {
        for (dq, b) in psi.by_degree() {
            let ab = star(sp, side, &a, &b);
            let ba = star(sp, side, &b, &a);
            out.add_assign(&ab.sub(&sign(odd((dp - 1) * (dq - 1)), ba)));
        }
    }
    out
}

/// Hochschild differential ∂ = [m, ·]
pub fn hochschild_d(sp: &Space, side: Side, phi: &Elem) -> Elem {
    gerstenhaber(sp, side, &mult(sp), phi)
}

/// Cup product: concatenation of the tensor factors.
pub fn cup(sp: &Space, side: Side, a: &Elem, b: &Elem) -> Elem {
    let mut out = sp.zero();
    for (p, ap) in by_arity(sp, a) {
        out.add_assign(&ap.mul(&move_slots(sp, side, b, &|s| s + p)));
    }
    out
}

/// L_V on chains for a vector field V of the side's coordinates (V may also
/// act on parameters): V on the coefficient and [V, S_a] on every word.
pub fn lie_field(sp: &Space, side: Side, v: &Derivation, phi: &Elem) -> Elem {
    let dv = v.degree();
    let mut out = sp.zero();
    let var = side.var();
    for (m, c) in phi.terms() {
        let t = split_term(sp, side, m, c);
        let coeff = Elem::monomial(&sp.ctx, t.coeff.clone(), c.clone());
        let words: Vec<Elem> = t.words.iter().map(|w| word_elem(sp, w)).collect();
        out.add_assign(&assemble(sp, &v.apply(&coeff), &words));
        let mut passed = coeff.hdeg();
        for a in 0..words.len() {
            let slot = a + 1;
            passed += 1;
            // the vertical part of V as a slot-a operator
            let mut vu = sp.zero();
            for i in 0..sp.n {
                vu.add_assign(&v.on_gen(sp.idx(var, i)).mul(&sp.g(side.ds(slot), i)));
            }
            let w = &words[a];
            let dw = word_degree(sp, &t.words[a]);
            let vs = u_compose(sp, side, slot, &vu, w);
            let sv = u_compose(sp, side, slot, w, &vu);
            let br = vs.sub(&sign(odd(dv * dw), sv));
            // assemble with [V,S_a] in slot a (its coefficient sorted to the front)
            let mut acc = coeff.clone();
            for (b, wb) in words.iter().enumerate() {
                acc = acc.mul(&Elem::gen(&sp.ctx, sp.s(b + 1)));
                acc = acc.mul(if b == a { &br } else { wb });
            }
            out.add_assign(&sign(odd(dv * passed), acc));
            passed += dw;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference;
    use std::sync::Arc;

    fn space(name: &str) -> Arc<Space> {
        Space::new(&reference::get(name), 8, 4)
    }

    fn funcs(sp: &Space) -> Vec<Elem> {
        ["x^3*th + 2*th", "th*x^2", "x^4 - 2*x", "th", "x^2 + 3"].iter().map(|s| sp.parse(s)).collect()
    }

    fn chains(sp: &Space) -> Vec<Elem> {
        [
            "x*th",
            "s1*Dx1_x",
            "th*s1*Dx1_th*Dx1_x",
            "x^2*s1*Dx1_x^2 + th*s1",
            "s1*Dx1_th*s2*Dx2_x",
            "x*s1*s2*Dx2_x^2",
            "th*s1*Dx1_x*s2*Dx2_th",
        ]
        .iter()
        .flat_map(|s| sp.parse(s).by_degree().into_values())
        .collect()
    }

    fn args_for(sp: &Space, p: usize, seed: usize) -> Vec<Elem> {
        let f = funcs(sp);
        (0..p).map(|i| f[(seed + 2 * i) % f.len()].clone()).collect()
    }

    #[test]
    fn mult_evaluates_to_product() {
        let sp = space("odd-line");
        let (f, g) = (sp.parse("th*x"), sp.parse("th*x^2 - th"));
        let v = evaluate(&sp, Side::Base, &mult(&sp), &[f.clone(), g.clone()]);
        assert_eq!(v, f.mul(&g).neg());
    }

    #[test]
    fn insertion_matches_brute_force() {
        let sp = space("odd-line");
        let cs = chains(&sp);
        for phi in &cs {
            for psi in &cs {
                let (p, q) = (arity(&sp, phi), arity(&sp, psi));
                let dpsi = psi.hdeg();
                for k in 0..p {
                    let comp = insert(&sp, Side::Base, phi, k, psi);
                    for seed in 0..3 {
                        let args = args_for(&sp, p + q - 1, seed);
                        let inner = evaluate(&sp, Side::Base, psi, &args[k..k + q]);
                        let mut outer_args: Vec<Elem> = args[..k].to_vec();
                        outer_args.push(inner.clone());
                        outer_args.extend_from_slice(&args[k + q..]);
                        // inner has degree |ψ| + Σ|σf| and is fed in as σ(inner)
                        let pre: i32 = args[..k].iter().map(|f| f.hdeg() - 1).sum();
                        let brute = if inner.is_zero() {
                            sp.zero()
                        } else {
                            sign(odd((dpsi - 1) * pre), evaluate(&sp, Side::Base, phi, &outer_args))
                        };
                        let fast = evaluate(&sp, Side::Base, &comp, &args);
                        assert_eq!(fast, brute, "phi={phi} psi={psi} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn hochschild_identities() {
        let sp = space("odd-line");
        let m = mult(&sp);
        assert!(gerstenhaber(&sp, Side::Base, &m, &m).is_zero());
        for c in chains(&sp).iter().filter(|c| arity(&sp, c) <= 2) {
            let d = hochschild_d(&sp, Side::Base, c);
            assert!(hochschild_d(&sp, Side::Base, &d).is_zero(), "∂² on {c}");
        }
        // derivations are cocycles
        let v = sp.parse("x^2*s1*Dx1_x + th*s1*Dx1_th");
        assert!(hochschild_d(&sp, Side::Base, &v).is_zero());
    }

    #[test]
    fn bracket_of_operators_is_commutator() {
        let sp = space("odd-line");
        let us = ["x*Dx1_x", "th*Dx1_x^2", "th*Dx1_th + x^2*Dx1_x", "Dx1_th"];
        for a in us {
            for b in us {
                let (ua, ub) = (sp.parse(a), sp.parse(b));
                let (ca, cb) = (from_u(&sp, &ua), from_u(&sp, &ub));
                let (da, db) = (ua.hdeg(), ub.hdeg());
                let comm = u_compose(&sp, Side::Base, 1, &ua, &ub)
                    .sub(&sign(odd(da * db), u_compose(&sp, Side::Base, 1, &ub, &ua)));
                assert_eq!(to_u(&sp, &gerstenhaber(&sp, Side::Base, &ca, &cb)), comm);
            }
        }
    }

    #[test]
    fn cup_is_associative_and_leibniz() {
        let sp = space("odd-line");
        let cs: Vec<Elem> = chains(&sp).into_iter().filter(|c| arity(&sp, c) <= 1).collect();
        for a in &cs {
            for b in &cs {
                let ab = cup(&sp, Side::Base, a, b);
                for c in &cs {
                    assert_eq!(cup(&sp, Side::Base, &ab, c), cup(&sp, Side::Base, a, &cup(&sp, Side::Base, b, c)));
                }
                // ∂ is a derivation of ∪ (degree 1 in the unshifted grading)
                let lhs = hochschild_d(&sp, Side::Base, &ab);
                let rhs = cup(&sp, Side::Base, &hochschild_d(&sp, Side::Base, a), b)
                    .add(&sign(odd(a.hdeg()), cup(&sp, Side::Base, a, &hochschild_d(&sp, Side::Base, b))));
                assert_eq!(lhs, rhs, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn lie_field_is_bracket_with_vector_field() {
        let sp = space("derham-line");
        let q = Derivation::new(&sp.ctx, 1, [(sp.idx(crate::model::Fam::X, 0), sp.parse("th"))]);
        // L_Q = (−1)^{|Q|}[Q̂, ·] with Q̂ = s₁·Q
        let qhat = from_u(&sp, &sp.parse("th*Dx1_x"));
        for c in chains(&sp) {
            let a = lie_field(&sp, Side::Base, &q, &c);
            let b = gerstenhaber(&sp, Side::Base, &qhat, &c).neg();
            assert_eq!(a, b, "on {c}");
        }
    }
}
