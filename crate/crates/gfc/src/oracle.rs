//! Brute-force multilinear semantics for polyjets: operations written on
//! tuples (a₀, a₁, …, a_p) of functions with index formulas and inversion
//! counting for signs, then pushed through Φ. Independent of the word
//! machinery in [`crate::poly::cpoly`].

use crate::graded::Elem;
use crate::model::{Side, Space};
use crate::poly::cpoly::phi;
use crate::poly::dpoly::evaluate;
use crate::poly::odd;

fn shifted(a: &Elem) -> i32 {
    a.hdeg() - 1
}

/// Koszul sign of listing `items` (shifted degrees `deg`) in the order
/// `perm` (perm[j] = original position of the j-th output item).
pub fn koszul_sign(deg: &[i32], perm: &[usize]) -> bool {
    let mut neg = false;
    for j in 0..perm.len() {
        for k in j + 1..perm.len() {
            if perm[j] > perm[k] && odd(deg[perm[j]] * deg[perm[k]]) {
                neg = !neg;
            }
        }
    }
    neg
}

fn push(sp: &Space, side: Side, out: &mut Elem, neg: bool, t: &[Elem]) {
    if t.iter().any(|a| a.is_zero()) {
        return;
    }
    let e = phi(sp, side, t);
    *out = if neg { out.sub(&e) } else { out.add(&e) };
}

/// b(a₀⊗⋯⊗a_p) by the face maps: Σ ±a₀⊗⋯⊗a_ia_{i+1}⊗⋯ ± a_pa₀⊗a₁⊗⋯
pub fn tuple_b(sp: &Space, side: Side, a: &[Elem]) -> Elem {
    let mut out = sp.zero();
    let n = a.len();
    if n < 2 {
        return out;
    }
    let deg: Vec<i32> = a.iter().map(shifted).collect();
    for i in 0..n - 1 {
        let mut t = a[..i].to_vec();
        t.push(a[i].mul(&a[i + 1]));
        t.extend_from_slice(&a[i + 2..]);
        let pre: i32 = deg[..i].iter().sum();
        push(sp, side, &mut out, odd(pre + a[i].hdeg()), &t);
    }
    let mut perm = vec![n - 1];
    perm.extend(0..n - 1);
    let mut t = vec![a[n - 1].mul(&a[0])];
    t.extend_from_slice(&a[1..n - 1]);
    push(sp, side, &mut out, koszul_sign(&deg, &perm) ^ odd(a[n - 1].hdeg()), &t);
    out
}

/// L_D on a tuple: every window of d consecutive factors (cyclically),
/// D evaluated on the window, result placed at the window (or in front when
/// the window contains a₀).
pub fn tuple_lie(sp: &Space, side: Side, d: &Elem, a: &[Elem]) -> Elem {
    let mut out = sp.zero();
    let n = a.len();
    let deg: Vec<i32> = a.iter().map(shifted).collect();
    for (dd, dpart) in d.by_degree() {
        for (m, c) in dpart.terms() {
            let term = Elem::monomial(&sp.ctx, m.clone(), c.clone());
            let q = crate::poly::dpoly::arity(sp, &term);
            if q > n {
                continue;
            }
            if q == 0 {
                for k in 0..n {
                    let mut t = a[..=k].to_vec();
                    t.push(term.clone());
                    t.extend_from_slice(&a[k + 1..]);
                    let pre: i32 = deg[..=k].iter().sum();
                    push(sp, side, &mut out, odd((dd - 1) * pre), &t);
                }
                continue;
            }
            for k in 0..n - q {
                let v = evaluate(sp, side, &term, &a[k + 1..k + 1 + q]);
                let mut t = a[..=k].to_vec();
                t.push(v);
                t.extend_from_slice(&a[k + 1 + q..]);
                let pre: i32 = deg[..=k].iter().sum();
                push(sp, side, &mut out, odd((dd - 1) * pre), &t);
            }
            // cyclic windows through a₀: start at position s > n − q or s = 0
            for s in (n + 1 - q..n).chain(std::iter::once(0)) {
                let perm: Vec<usize> = (0..n).map(|j| (s + j) % n).collect();
                let neg = koszul_sign(&deg, &perm);
                let r: Vec<Elem> = perm.iter().map(|&i| a[i].clone()).collect();
                let v = evaluate(sp, side, &term, &r[..q]);
                let mut t = vec![v];
                t.extend_from_slice(&r[q..]);
                push(sp, side, &mut out, neg, &t);
            }
        }
    }
    out
}

/// ι_D(a₀⊗⋯⊗a_p) = (−1)^{|D||a₀|} a₀ D(a₁,…,a_d) ⊗ a_{d+1} ⊗ ⋯
pub fn tuple_iota(sp: &Space, side: Side, d: &Elem, a: &[Elem]) -> Elem {
    let mut out = sp.zero();
    for (dd, dpart) in d.by_degree() {
        for (m, c) in dpart.terms() {
            let term = Elem::monomial(&sp.ctx, m.clone(), c.clone());
            let q = crate::poly::dpoly::arity(sp, &term);
            if q + 1 > a.len() {
                continue;
            }
            let v = evaluate(sp, side, &term, &a[1..=q]);
            let mut t = vec![a[0].mul(&v)];
            t.extend_from_slice(&a[q + 1..]);
            push(sp, side, &mut out, odd(dd * a[0].hdeg()), &t);
        }
    }
    out
}

/// B(a₀⊗⋯⊗a_p) = Σ_i ±(1⊗a_i⊗⋯⊗a_{i−1} − a_i⊗1⊗a_{i+1}⊗⋯⊗a_{i−1}),
/// signs by the Koszul rule on the words (1, a₀, …, a_p).
pub fn tuple_connes(sp: &Space, side: Side, a: &[Elem]) -> Elem {
    let mut out = sp.zero();
    let n = a.len();
    let mut words = vec![sp.one()];
    words.extend_from_slice(a);
    let deg: Vec<i32> = words.iter().map(shifted).collect();
    for i in 0..n {
        let rot: Vec<usize> = (0..n).map(|j| 1 + (i + j) % n).collect();
        let mut p1 = vec![0];
        p1.extend_from_slice(&rot);
        let mut p2 = vec![rot[0], 0];
        p2.extend_from_slice(&rot[1..]);
        for (perm, extra) in [(p1, false), (p2, true)] {
            let t: Vec<Elem> = perm.iter().map(|&k| words[k].clone()).collect();
            push(sp, side, &mut out, koszul_sign(&deg, &perm) ^ extra, &t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference;
    use crate::poly::cpoly;

    #[test]
    fn word_operations_match_tuples() {
        let sp = Space::new(&reference::get("odd-line"), 12, 4);
        let f: Vec<Elem> = ["x*th + 2*th", "th*x^2", "x^2 - 2*x", "th", "x + 3", "1"]
            .iter()
            .flat_map(|s| sp.parse(s).by_degree().into_values())
            .collect();
        let ds: Vec<Elem> = ["x*th", "s1*Dx1_x", "th*s1*Dx1_th*Dx1_x", "x*s1*Dx1_x^2", "s1*Dx1_th*s2*Dx2_x", "x*s1*s2*Dx2_x"]
            .iter()
            .map(|s| sp.parse(s))
            .collect();
        let s = Side::Base;
        for p in 0..=2 {
            for seed in 0..4 {
                let a: Vec<Elem> = (0..=p).map(|i| f[(seed + 3 * i) % f.len()].clone()).collect();
                let c = phi(&sp, s, &a);
                assert_eq!(cpoly::hochschild_b(&sp, s, &c), tuple_b(&sp, s, &a), "b {a:?}");
                assert_eq!(cpoly::connes_b(&sp, s, &c), tuple_connes(&sp, s, &a), "B {a:?}");
                for d in &ds {
                    assert_eq!(cpoly::lie(&sp, s, d, &c), tuple_lie(&sp, s, d, &a), "L {d} {a:?}");
                    assert_eq!(cpoly::iota(&sp, s, d, &c), tuple_iota(&sp, s, d, &a), "ι {d} {a:?}");
                }
            }
        }
    }
}
