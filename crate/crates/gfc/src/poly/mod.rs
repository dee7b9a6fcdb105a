//! Poly-spaces over the base M and over the Fedosov algebroid F: tensors,
//! polyvector fields (T), forms (A), polydifferential operators (D) and
//! polyjets (C), with their calculus operations.

pub mod cpoly;
pub mod dpoly;
pub mod ta;

use crate::graded::Elem;
use crate::model::{Side, Space};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Kind {
    /// k vector legs and l covector legs
    Tensor(usize, usize),
    T,
    A,
    D,
    C,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Tensor(k, l) => write!(f, "tensor({k},{l})"),
            Kind::T => f.write_str("tpoly"),
            Kind::A => f.write_str("apoly"),
            Kind::D => f.write_str("dpoly"),
            Kind::C => f.write_str("cpoly"),
        }
    }
}

/// A chain of one of the poly-spaces, tagged with its side and kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyChain {
    pub side: Side,
    pub kind: Kind,
    pub elem: Elem,
}

impl PolyChain {
    pub fn new(side: Side, kind: Kind, elem: Elem) -> PolyChain {
        PolyChain { side, kind, elem }
    }

    /// Number of legs or slots occupied, for the first term (chains are
    /// expected to be arity-homogeneous).
    pub fn arity(&self, sp: &Space) -> usize {
        let Some((m, _)) = self.elem.terms().next() else { return 0 };
        match self.kind {
            Kind::T | Kind::A => {
                let fam = if self.kind == Kind::T { self.side.psi() } else { self.side.dl() };
                m.iter()
                    .filter(|&&(g, _)| sp.in_fam(fam, g as usize))
                    .map(|&(_, e)| e as usize)
                    .sum()
            }
            Kind::Tensor(k, l) => k + l,
            Kind::D => (1..=sp.slots).filter(|&a| m.iter().any(|&(g, _)| g as usize == sp.s(a))).count(),
            Kind::C => (1..=sp.slots).filter(|&a| m.iter().any(|&(g, _)| g as usize == sp.t(a))).count(),
        }
    }
}

impl fmt::Display for PolyChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}] {}", self.side.name(), self.kind, self.elem)
    }
}

/// Right derivative e·∂⃖_g of a possibly inhomogeneous element.
pub fn right_deriv(e: &Elem, g: usize) -> Elem {
    let ctx = e.ctx().clone();
    let gd = ctx.gen(g).degree;
    let mut out = Elem::zero(&ctx);
    for (d, part) in e.by_degree() {
        let r = part.deriv(g);
        let neg = (gd * (d - gd)).rem_euclid(2) == 1;
        out.add_assign(&if neg { r.neg() } else { r });
    }
    out
}

/// Apply an operator degree-by-degree: f(part, degree).
pub fn by_degree(e: &Elem, f: impl Fn(&Elem, i32) -> Elem) -> Elem {
    let mut out = Elem::zero(e.ctx());
    for (d, part) in e.by_degree() {
        out.add_assign(&f(&part, d));
    }
    out
}

pub fn sign(neg: bool, e: Elem) -> Elem {
    if neg {
        e.neg()
    } else {
        e
    }
}

pub fn odd(n: i32) -> bool {
    n.rem_euclid(2) == 1
}
