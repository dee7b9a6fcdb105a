//! Polyjets.
//!
//! An arity-p chain is F(coordinates, z¹,…,zᵖ)·t₁⋯t_p with t_a the slot
//! marker (degree −1) and z^a the slot-a jet variables (w^a on the Fedosov
//! side, where x and ξ are parameters). On the base a₀⊗a₁⊗⋯⊗a_p is stored as
//! a₀(x)·t₁a₁(x+z¹)⋯t_p a_p(x+zᵖ).
//!
//! The operations work in coordinate copies X_a = x + z^a. A chain term is
//! then a word list [c₀, c₁, …, c_p]: c_a is the slot-a factor rewritten in
//! the plain coordinates, and carries the shifted degree |c_a| − 1 (c₀ gets
//! a virtual marker). Cyclic moves of words follow the Koszul rule for the
//! shifted degrees.

use super::dpoly::{evaluate, mult, split_term, Split};
use super::{odd, sign};
use crate::graded::{Derivation, Elem, Mono};
use crate::hopf::{from_copies, rename, to_copies};
use crate::model::{Fam, Side, Space};

struct Term {
    neg: bool,
    words: Vec<Elem>,
}

fn slot_of(sp: &Space, side: Side, g: usize) -> Option<usize> {
    (1..=sp.slots).find(|&a| g == sp.t(a) || sp.in_fam(side.copy(a), g))
}

/// Arity of the first term (number of slot markers).
pub fn arity(sp: &Space, e: &Elem) -> usize {
    e.terms()
        .next()
        .map(|(m, _)| (1..=sp.slots).filter(|&a| m.iter().any(|&(g, _)| g as usize == sp.t(a))).count())
        .unwrap_or(0)
}

/// Split a chain given in copies into word lists (coefficients folded into c₀).
fn words_of(sp: &Space, side: Side, e: &Elem) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for (m, c) in e.terms() {
        let mut parts: Vec<Mono> = vec![Mono::new()];
        for &(g, k) in m {
            match slot_of(sp, side, g as usize) {
                None => parts[0].push((g, k)),
                Some(a) => {
                    while parts.len() <= a {
                        parts.push(Mono::new());
                    }
                    if g as usize != sp.t(a) {
                        parts[a].push((g, k));
                    }
                }
            }
        }
        let words = parts
            .into_iter()
            .enumerate()
            .map(|(a, p)| {
                let w = Elem::monomial(&sp.ctx, p, if a == 0 { c.clone() } else { crate::coeff::Q::ONE });
                rename(sp, &w, &[(side.copy(a), side.var())])
            })
            .collect();
        out.push(words);
    }
    out
}

/// c₀ · t₁c₁ ⋯ t_p c_p in copies.
fn assemble(sp: &Space, side: Side, words: &[Elem]) -> Elem {
    let mut out = rename(sp, &words[0], &[(side.var(), side.copy(0))]);
    for (a, w) in words.iter().enumerate().skip(1) {
        out = out
            .mul(&Elem::gen(&sp.ctx, sp.t(a)))
            .mul(&rename(sp, w, &[(side.var(), side.copy(a))]));
    }
    out
}

fn sdeg(w: &Elem) -> i32 {
    w.hdeg() - 1
}

fn sdeg_sum(ws: &[Elem]) -> i32 {
    ws.iter().map(sdeg).sum()
}

/// Lift a word-level operation to chains in the stored (jet) form.
fn lift(sp: &Space, side: Side, c: &Elem, f: &dyn Fn(&[Elem]) -> Vec<Term>) -> Elem {
    let mut out = sp.zero();
    for words in words_of(sp, side, &to_copies(sp, side, c)) {
        if words.iter().any(|w| w.is_zero()) {
            continue;
        }
        for t in f(&words) {
            if t.words.iter().any(|w| w.is_zero()) {
                continue;
            }
            out.add_assign(&sign(t.neg, assemble(sp, side, &t.words)));
        }
    }
    from_copies(sp, side, &out)
}

/// Φ(a₀⊗a₁⊗⋯⊗a_p) for functions a_i of the side's coordinates.
pub fn phi(sp: &Space, side: Side, args: &[Elem]) -> Elem {
    from_copies(sp, side, &assemble(sp, side, args))
}

/// Unit word 1 ∈ C^0 is `sp.one()`; the chain 1⊗⋯⊗1 of arity p.
pub fn units(sp: &Space, side: Side, p: usize) -> Elem {
    phi(sp, side, &vec![sp.one(); p + 1])
}

fn split_terms(sp: &Space, side: Side, d: &Elem) -> Vec<(Split, Elem, i32)> {
    d.terms()
        .map(|(m, c)| {
            let s = split_term(sp, side, m, c);
            let e = Elem::monomial(&sp.ctx, m.clone(), c.clone());
            let deg = e.hdeg();
            (s, e, deg)
        })
        .collect()
}

/// ι_D(a₀⊗⋯⊗a_p) = (−1)^{|D||a₀|} a₀·D(a₁,…,a_d) ⊗ a_{d+1} ⊗ ⋯ ⊗ a_p
pub fn iota(sp: &Space, side: Side, d: &Elem, c: &Elem) -> Elem {
    let terms = split_terms(sp, side, d);
    lift(sp, side, c, &|w| {
        let mut out = Vec::new();
        for (s, e, dd) in &terms {
            let q = s.words.len();
            if q + 1 > w.len() {
                continue;
            }
            let v = evaluate(sp, side, e, &w[1..=q]);
            let mut nw = vec![w[0].mul(&v)];
            nw.extend_from_slice(&w[q + 1..]);
            out.push(Term {
                neg: odd(dd * w[0].hdeg()),
                words: nw,
            });
        }
        out
    })
}

/// L_D: D applied on every cyclic window of consecutive tensor factors.
pub fn lie(sp: &Space, side: Side, d: &Elem, c: &Elem) -> Elem {
    let terms = split_terms(sp, side, d);
    lift(sp, side, c, &|w| {
        let mut out = Vec::new();
        let n = w.len();
        for (s, e, dd) in &terms {
            let q = s.words.len();
            let shifted = dd - 1;
            if q == 0 {
                for k in 0..n {
                    let mut nw = w[..=k].to_vec();
                    nw.push(e.clone());
                    nw.extend_from_slice(&w[k + 1..]);
                    out.push(Term {
                        neg: odd(shifted * sdeg_sum(&w[..=k])),
                        words: nw,
                    });
                }
                continue;
            }
            if q > n {
                continue;
            }
            for start in 1..=n - q {
                let v = evaluate(sp, side, e, &w[start..start + q]);
                let mut nw = w[..start].to_vec();
                nw.push(v);
                nw.extend_from_slice(&w[start + q..]);
                out.push(Term {
                    neg: odd(shifted * sdeg_sum(&w[..start])),
                    words: nw,
                });
            }
            // windows containing a₀: rotate the tail w[k+1..] to the front
            for k in n - q..n {
                let (head, tail) = w.split_at(k + 1);
                let mut r = tail.to_vec();
                r.extend_from_slice(head);
                let v = evaluate(sp, side, e, &r[..q]);
                let mut nw = vec![v];
                nw.extend_from_slice(&r[q..]);
                out.push(Term {
                    neg: odd(sdeg_sum(head) * sdeg_sum(tail)),
                    words: nw,
                });
            }
        }
        out
    })
}

/// b = L_m
pub fn hochschild_b(sp: &Space, side: Side, c: &Elem) -> Elem {
    lie(sp, side, &mult(sp), c)
}

/// Explicit face-map form of b: adjacent products, then a_p·a₀ in front.
pub fn hochschild_b_faces(sp: &Space, side: Side, c: &Elem) -> Elem {
    lift(sp, side, c, &|w| {
        let mut out = Vec::new();
        let n = w.len();
        if n < 2 {
            return out;
        }
        // m(σa, σb) = (−1)^{|a|} ab, shifted degree 1
        for i in 0..n - 1 {
            let mut nw = w[..i].to_vec();
            nw.push(w[i].mul(&w[i + 1]));
            nw.extend_from_slice(&w[i + 2..]);
            out.push(Term {
                neg: odd(sdeg_sum(&w[..i]) + w[i].hdeg()),
                words: nw,
            });
        }
        let last = &w[n - 1];
        let mut nw = vec![last.mul(&w[0])];
        nw.extend_from_slice(&w[1..n - 1]);
        out.push(Term {
            neg: odd(sdeg(last) * sdeg_sum(&w[..n - 1]) + last.hdeg()),
            words: nw,
        });
        out
    })
}

/// Connes B = (1 − t)·s·N on the cyclic word of shifted factors, where s
/// puts a unit word in front and t is the signed cyclic rotation.
pub fn connes_b(sp: &Space, side: Side, c: &Elem) -> Elem {
    let one = sp.one();
    lift(sp, side, c, &|w| {
        let mut out = Vec::new();
        let n = w.len();
        for i in 0..n {
            let (head, tail) = w.split_at(i);
            let rot_neg = odd(sdeg_sum(head) * sdeg_sum(tail));
            let mut r = tail.to_vec();
            r.extend_from_slice(head);
            let mut a = vec![one.clone()];
            a.extend_from_slice(&r);
            out.push(Term {
                neg: rot_neg,
                words: a,
            });
            // t(1·r₀⋯r_{n−1}) = ± r_{n−1}·1·r₀⋯r_{n−2}
            let lastd = sdeg(&r[n - 1]);
            let t_neg = odd(lastd * (-1 + sdeg_sum(&r[..n - 1])));
            let mut b = vec![r[n - 1].clone(), one.clone()];
            b.extend_from_slice(&r[..n - 1]);
            out.push(Term {
                neg: !(rot_neg ^ t_neg),
                words: b,
            });
        }
        out
    })
}

/// L_V for a vector field V of the side (acting on parameters once and on
/// every copy of the coordinates).
pub fn lie_field(sp: &Space, side: Side, v: &Derivation, c: &Elem) -> Elem {
    let p = sp.slots;
    let var = side.var();
    let mut total = Derivation::zero(&sp.ctx, v.degree());
    if side == Side::Fedosov {
        for fam in [Fam::X, Fam::Xi] {
            for i in 0..sp.n {
                let g = sp.idx(fam, i);
                total.add_component(g, &v.on_gen(g));
            }
        }
    }
    for a in 0..=p {
        for i in 0..sp.n {
            let comp = rename(sp, &v.on_gen(sp.idx(var, i)), &[(var, side.copy(a))]);
            total.add_component(sp.idx(side.copy(a), i), &comp);
        }
    }
    from_copies(sp, side, &total.apply(&to_copies(sp, side, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference;
    use crate::poly::dpoly;
    use std::sync::Arc;

    fn space(name: &str) -> Arc<Space> {
        Space::new(&reference::get(name), 12, 4)
    }

    fn funcs(sp: &Space) -> Vec<Elem> {
        ["x*th + 2*th", "th*x^2", "x^2 - 2*x", "th", "x + 3", "1"].iter().map(|s| sp.parse(s)).collect()
    }

    fn chains(sp: &Space) -> Vec<Elem> {
        let f = funcs(sp);
        let mut out = vec![
            phi(sp, Side::Base, &[f[0].clone()]),
            phi(sp, Side::Base, &[f[2].clone(), f[1].clone()]),
            phi(sp, Side::Base, &[f[3].clone(), f[4].clone()]),
            phi(sp, Side::Base, &[f[4].clone(), f[3].clone(), f[0].clone()]),
            phi(sp, Side::Base, &[f[1].clone(), f[2].clone(), f[3].clone()]),
        ];
        // a jet not in the image of Φ on pure tensors
        out.push(sp.parse("x*t1*zx1_x^3 + th*t1*zx1_th*zx1_x"));
        out.into_iter().flat_map(|e| e.by_degree().into_values()).collect()
    }

    fn dchains(sp: &Space) -> Vec<Elem> {
        ["x*th", "s1*Dx1_x", "th*s1*Dx1_th*Dx1_x", "x*s1*Dx1_x^2 + th*s1", "s1*Dx1_th*s2*Dx2_x", "x*s1*s2*Dx2_x"]
            .iter()
            .flat_map(|s| sp.parse(s).by_degree().into_values())
            .collect()
    }

    #[test]
    fn b_matches_faces_and_squares_to_zero() {
        let sp = space("odd-line");
        for c in chains(&sp) {
            let b = hochschild_b(&sp, Side::Base, &c);
            assert_eq!(b, hochschild_b_faces(&sp, Side::Base, &c), "faces on {c}");
            assert!(hochschild_b(&sp, Side::Base, &b).is_zero(), "b² on {c}");
        }
    }

    #[test]
    fn connes_identities() {
        let sp = space("odd-line");
        for c in chains(&sp).into_iter().filter(|c| arity(&sp, c) <= 2) {
            let bc = connes_b(&sp, Side::Base, &c);
            assert!(connes_b(&sp, Side::Base, &bc).is_zero(), "B² on {c}");
            let x = hochschild_b(&sp, Side::Base, &bc).add(&connes_b(&sp, Side::Base, &hochschild_b(&sp, Side::Base, &c)));
            assert!(x.is_zero(), "bB + Bb on {c}: {x}");
        }
    }

    #[test]
    fn iota_identities() {
        let sp = space("odd-line");
        let ds = dchains(&sp);
        for c in chains(&sp) {
            for d1 in &ds {
                let dd = d1.hdeg();
                // [b, ι_D] = ι_{∂D}
                let lhs = iota(&sp, Side::Base, &dpoly::hochschild_d(&sp, Side::Base, d1), &c);
                let bi = hochschild_b(&sp, Side::Base, &iota(&sp, Side::Base, d1, &c));
                let ib = iota(&sp, Side::Base, d1, &hochschild_b(&sp, Side::Base, &c));
                let rhs = bi.sub(&sign(odd(dd), ib));
                assert_eq!(lhs, rhs, "D={d1} c={c}");
                for d2 in &ds {
                    let cup = dpoly::cup(&sp, Side::Base, d1, d2);
                    let lhs = iota(&sp, Side::Base, &cup, &c);
                    let rhs = iota(&sp, Side::Base, d2, &iota(&sp, Side::Base, d1, &c));
                    assert_eq!(lhs, sign(odd(d1.hdeg() * d2.hdeg()), rhs), "cup D1={d1} D2={d2} c={c}");
                }
            }
        }
    }

    #[test]
    fn lie_field_is_lie_of_the_operator() {
        let sp = space("derham-line");
        let q = Derivation::new(&sp.ctx, 1, [(sp.idx(Fam::X, 0), sp.parse("th"))]);
        let qhat = dpoly::from_u(&sp, &sp.parse("th*Dx1_x"));
        for c in chains(&sp) {
            let a = lie_field(&sp, Side::Base, &q, &c);
            let b = lie(&sp, Side::Base, &qhat, &c);
            assert_eq!(a, b.neg(), "on {c}");
            assert!(lie_field(&sp, Side::Base, &q, &a).is_zero());
        }
    }

    #[test]
    fn lie_is_a_representation() {
        let sp = space("odd-line");
        let ds = dchains(&sp);
        for c in chains(&sp).into_iter().filter(|c| arity(&sp, c) <= 2) {
            for d1 in &ds {
                for d2 in &ds {
                    let (a, b) = (d1.hdeg() - 1, d2.hdeg() - 1);
                    let lhs = lie(&sp, Side::Base, &dpoly::gerstenhaber(&sp, Side::Base, d1, d2), &c);
                    let l12 = lie(&sp, Side::Base, d1, &lie(&sp, Side::Base, d2, &c));
                    let l21 = lie(&sp, Side::Base, d2, &lie(&sp, Side::Base, d1, &c));
                    let rhs = l12.sub(&sign(odd(a * b), l21));
                    assert_eq!(lhs, rhs, "D1={d1} D2={d2} c={c}");
                }
            }
        }
    }
}
