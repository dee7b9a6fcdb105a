//! Universal enveloping algebras as differential operators, the pbw map,
//! jets and the formal-groupoid structure maps.
//!
//! A U-element in slot `a` is Σ c·S with c a function and S a monomial in the
//! derivative symbols `ds(a)`; S acts by the coordinate derivatives of its
//! side. Jets live in slot 1 as functions of the coordinates and the jet
//! variables z (base) or w (Fedosov side). For groupoid operations jets are
//! rewritten in coordinate copies: X0 = x, Xa = x + z^a.

use crate::coeff::Q;
use crate::graded::{Derivation, Elem, Mono};
use crate::model::{Fam, Side, Space};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Apply a symbol word as iterated derivatives (last factor innermost).
/// `target` maps a symbol generator to the variable it differentiates.
pub fn apply_word(word: &Mono, target: &dyn Fn(usize) -> usize, f: &Elem) -> Elem {
    let mut r = f.clone();
    for &(g, e) in word.iter().rev() {
        let t = target(g as usize);
        for _ in 0..e {
            r = r.deriv(t);
            if r.is_zero() {
                return r;
            }
        }
    }
    r
}

/// Map from a family member to the same index of another family.
pub fn retarget<'a>(sp: &'a Space, from: Fam, to: Fam) -> impl Fn(usize) -> usize + 'a {
    move |g| sp.idx(to, sp.pos_in(from, g).expect("symbol of the expected family"))
}

/// Rename every generator of family `from` to the matching one of `to`.
pub fn rename(sp: &Space, e: &Elem, pairs: &[(Fam, Fam)]) -> Elem {
    e.substitute(&|g| {
        pairs
            .iter()
            .find_map(|&(f, t)| sp.pos_in(f, g).map(|i| sp.g(t, i)))
    })
}

/// D_i ∘ E for a single derivative symbol: ∂_i(E) + D_i·E.
pub fn compose_sym(sp: &Space, side: Side, slot: usize, i: usize, e: &Elem) -> Elem {
    e.deriv(sp.idx(side.var(), i)).add(&sp.g(side.ds(slot), i).mul(e))
}

/// Operator composition u∘v of U-elements in `slot`.
pub fn u_compose(sp: &Space, side: Side, slot: usize, u: &Elem, v: &Elem) -> Elem {
    let fam = side.ds(slot);
    let mut out = sp.zero();
    for (word, c) in u.collect_right(&|g| sp.in_fam(fam, g)) {
        let mut r = v.clone();
        for &(g, e) in word.iter().rev() {
            let i = sp.pos_in(fam, g as usize).unwrap();
            for _ in 0..e {
                r = compose_sym(sp, side, slot, i, &r);
            }
        }
        out.add_assign(&c.mul(&r));
    }
    out
}

/// u(f) for a U-element in `slot` and a function f.
pub fn u_apply(sp: &Space, side: Side, slot: usize, u: &Elem, f: &Elem) -> Elem {
    let fam = side.ds(slot);
    let target = retarget(sp, fam, side.var());
    let mut out = sp.zero();
    for (word, c) in u.collect_right(&|g| sp.in_fam(fam, g)) {
        out.add_assign(&c.mul(&apply_word(&word, &target, f)));
    }
    out
}

/// Δ: substitute D → D⁽¹⁾ + D⁽²⁾ (slot-1 input, slots 1 and 2 output).
pub fn u_coproduct(sp: &Space, side: Side, u: &Elem) -> Elem {
    u.substitute(&|g| sp.pos_in(side.ds(1), g).map(|i| sp.g(side.ds(1), i).add(&sp.g(side.ds(2), i))))
}

/// ε: the order-zero part.
pub fn u_counit(sp: &Space, side: Side, slot: usize, u: &Elem) -> Elem {
    u.filter(|m| m.iter().all(|&(g, _)| !sp.in_fam(side.ds(slot), g as usize)))
}

/// Evaluate a two-slot operator on (f, g): Σ c·S₁(f)·S₂(g).
pub fn act2(sp: &Space, side: Side, w: &Elem, f: &Elem, g: &Elem) -> Elem {
    let (c1, c2) = (side.copy(1), side.copy(2));
    let to1 = rename(sp, f, &[(side.var(), c1)]);
    let to2 = rename(sp, g, &[(side.var(), c2)]);
    let fg = to1.mul(&to2);
    let (f1, f2) = (side.ds(1), side.ds(2));
    let t1 = retarget(sp, f1, c1);
    let t2 = retarget(sp, f2, c2);
    let target = |s: usize| if sp.in_fam(f1, s) { t1(s) } else { t2(s) };
    let mut out = sp.zero();
    for (word, c) in w.collect_right(&|h| sp.in_fam(f1, h) || sp.in_fam(f2, h)) {
        out.add_assign(&c.mul(&apply_word(&word, &target, &fg)));
    }
    rename(sp, &out, &[(c1, side.var()), (c2, side.var())])
}

/// Monomials of a given order in the n generators of a family; odd
/// generators appear at most once.
pub fn words_of_order(sp: &Space, fam: Fam, order: u32) -> Vec<Mono> {
    fn go(sp: &Space, gens: &[usize], i: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if i == gens.len() {
            return;
        }
        let max = if sp.ctx.is_odd(gens[i]) { 1 } else { left };
        for e in (0..=max.min(left)).rev() {
            if e > 0 {
                cur.push((gens[i] as u16, e as u16));
            }
            go(sp, gens, i + 1, left - e, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    let gens = sp.fam(fam).to_vec();
    let mut out = Vec::new();
    go(sp, &gens, 0, order, &mut Mono::new(), &mut out);
    out
}

pub fn word_order(m: &Mono) -> u32 {
    m.iter().map(|&(_, e)| e as u32).sum()
}

/// The pbw map S(L) → U(L) for L = T_M with the model connection (base
/// side) or L = F with the flat fiber connection (Fedosov side), tabulated
/// on symmetric words up to `max_order`. Output lives in slot 1.
pub struct Pbw {
    pub sp: Arc<Space>,
    pub side: Side,
    pub max_order: u32,
    table: BTreeMap<Mono, Elem>,
}

impl Pbw {
    pub fn new(sp: &Arc<Space>, side: Side, max_order: u32) -> Pbw {
        let mut p = Pbw {
            sp: sp.clone(),
            side,
            max_order,
            table: BTreeMap::new(),
        };
        p.table.insert(Mono::new(), sp.one());
        let sym = side.sym();
        let nablas: Vec<Derivation> = (0..sp.n).map(|i| p.nabla_sym(i)).collect();
        for order in 1..=max_order {
            for word in words_of_order(sp, sym, order) {
                let pw = Elem::monomial(&sp.ctx, word.clone(), Q::ONE);
                let mut acc = sp.zero();
                for (i, nab) in nablas.iter().enumerate() {
                    let d = pw.deriv(sp.idx(sym, i));
                    if d.is_zero() {
                        continue;
                    }
                    acc.add_assign(&compose_sym(sp, side, 1, i, &p.apply(&d)));
                    acc = acc.sub(&p.apply(&nab.apply(&d)));
                }
                p.table.insert(word, acc.scale(&Q::frac(1, order as i64)));
            }
        }
        p
    }

    /// ∇_{∂_i} on symmetric tensors: ∂/∂x_i on coefficients and
    /// ς_l ↦ Σ_j Γ_{i,l}^j ς_j.
    fn nabla_sym(&self, i: usize) -> Derivation {
        let sp = &self.sp;
        let mut d = Derivation::partial(&sp.ctx, sp.idx(self.side.var(), i));
        if self.side == Side::Base {
            for l in 0..sp.n {
                let mut c = sp.zero();
                for j in 0..sp.n {
                    c = c.add(&sp.gamma(i, l, j).mul(&sp.g(Fam::SymX, j)));
                }
                d.add_component(sp.idx(Fam::SymX, l), &c);
            }
        }
        d
    }

    /// Left-linear extension of the table.
    pub fn apply(&self, p: &Elem) -> Elem {
        let sym = self.side.sym();
        let mut out = self.sp.zero();
        for (word, c) in p.collect_right(&|g| self.sp.in_fam(sym, g)) {
            let img = self
                .table
                .get(&word)
                .unwrap_or_else(|| panic!("pbw order overflow (max {})", self.max_order));
            out.add_assign(&c.mul(img));
        }
        out
    }

    /// Inverse by peeling top-order symbols.
    pub fn inverse(&self, u: &Elem) -> Elem {
        let sp = &self.sp;
        let (ds, sym) = (self.side.ds(1), self.side.sym());
        let mut rest = u.clone();
        let mut out = sp.zero();
        while !rest.is_zero() {
            let parts = rest.collect_right(&|g| sp.in_fam(ds, g));
            let top = parts.keys().map(word_order).max().unwrap();
            let mut lead = sp.zero();
            for (word, c) in &parts {
                if word_order(word) == top {
                    let w = rename(sp, &Elem::monomial(&sp.ctx, word.clone(), Q::ONE), &[(ds, sym)]);
                    lead.add_assign(&c.mul(&w));
                }
            }
            out.add_assign(&lead);
            rest = rest.sub(&self.apply(&lead));
        }
        out
    }

    /// Δ on S(L): ς ↦ ς + ς' with ς' the auxiliary family.
    pub fn sym_coproduct(&self, p: &Elem) -> Elem {
        let sp = &self.sp;
        let (sym, aux) = (self.side.sym(), self.side.aux());
        p.substitute(&|g| sp.pos_in(sym, g).map(|i| sp.g(sym, i).add(&sp.g(aux, i))))
    }

    /// pbw ⊗ pbw on S(L) ⊗ S(L) (second factor in the auxiliary family),
    /// landing in slots 1 and 2.
    pub fn apply2(&self, p: &Elem) -> Elem {
        let sp = &self.sp;
        let (sym, aux) = (self.side.sym(), self.side.aux());
        let mut out = sp.zero();
        for (word, c) in p.collect_right(&|g| sp.in_fam(sym, g) || sp.in_fam(aux, g)) {
            let w = Elem::monomial(&sp.ctx, word, Q::ONE);
            let split = w.collect_right(&|g| sp.in_fam(aux, g));
            for (second, first) in split {
                let s2 = rename(sp, &Elem::monomial(&sp.ctx, second, Q::ONE), &[(aux, sym)]);
                let img2 = rename(sp, &self.apply(&s2), &[(self.side.ds(1), self.side.ds(2))]);
                out.add_assign(&c.mul(&self.apply(&first)).mul(&img2));
            }
        }
        out
    }
}

/// Rewrite a jet expression in coordinate copies: x → X0, z^a → Xa − X0.
pub fn to_copies(sp: &Space, side: Side, e: &Elem) -> Elem {
    let var = side.var();
    e.substitute(&|g| {
        if let Some(i) = sp.pos_in(var, g) {
            return Some(sp.g(side.copy(0), i));
        }
        for a in 1..=sp.slots {
            if let Some(i) = sp.pos_in(side.jet(a), g) {
                return Some(sp.g(side.copy(a), i).sub(&sp.g(side.copy(0), i)));
            }
        }
        None
    })
}

/// Inverse of [`to_copies`]: X0 → x, Xa → x + z^a.
pub fn from_copies(sp: &Space, side: Side, e: &Elem) -> Elem {
    e.substitute(&|g| {
        if let Some(i) = sp.pos_in(side.copy(0), g) {
            return Some(sp.g(side.var(), i));
        }
        for a in 1..=sp.slots {
            if let Some(i) = sp.pos_in(side.copy(a), g) {
                return Some(sp.g(side.var(), i).add(&sp.g(side.jet(a), i)));
            }
        }
        None
    })
}

/// Jets of L (L = T_M or F) with their formal-groupoid maps. Jets are
/// functions of the coordinates and the slot-1 jet variables.
pub struct Jets {
    pub sp: Arc<Space>,
    pub side: Side,
}

impl Jets {
    pub fn new(sp: &Arc<Space>, side: Side) -> Jets {
        assert!(sp.slots >= 2, "jets need two slots");
        Jets { sp: sp.clone(), side }
    }

    fn copies(&self, e: &Elem) -> Elem {
        to_copies(&self.sp, self.side, e)
    }

    fn uncopies(&self, e: &Elem) -> Elem {
        from_copies(&self.sp, self.side, e)
    }

    /// α(f) = f
    pub fn alpha(&self, f: &Elem) -> Elem {
        f.clone()
    }

    /// β(f) = f(x + z)
    pub fn beta(&self, f: &Elem) -> Elem {
        let sp = &self.sp;
        let (var, jet) = (self.side.var(), self.side.jet(1));
        f.substitute(&|g| sp.pos_in(var, g).map(|i| sp.g(var, i).add(&sp.g(jet, i))))
    }

    /// The unit jet 𝟙.
    pub fn unit(&self) -> Elem {
        self.sp.one()
    }

    pub fn product(&self, a: &Elem, b: &Elem) -> Elem {
        a.mul(b)
    }

    /// ε(ξ) = ξ at z = 0
    pub fn counit(&self, e: &Elem) -> Elem {
        let jet = self.side.jet(1);
        let sp = &self.sp;
        e.filter(|m| m.iter().all(|&(g, _)| !sp.in_fam(jet, g as usize)))
    }

    /// u acting on the jet variables, then z = 0 (no Koszul pairing sign).
    pub fn act(&self, e: &Elem, u: &Elem) -> Elem {
        let sp = &self.sp;
        let ds = self.side.ds(1);
        let target = retarget(sp, ds, self.side.jet(1));
        let mut out = sp.zero();
        for (word, c) in u.collect_right(&|g| sp.in_fam(ds, g)) {
            out.add_assign(&c.mul(&self.counit(&apply_word(&word, &target, e))));
        }
        out
    }

    /// ⟨ξ, u⟩ = (−1)^{|ξ||u|} u(ξ)|_{z=0}: a left R-linear functional in u.
    pub fn pairing(&self, e: &Elem, u: &Elem) -> Elem {
        let mut out = self.sp.zero();
        for (de, pe) in e.by_degree() {
            for (du, pu) in u.by_degree() {
                let r = self.act(&pe, &pu);
                out.add_assign(&if (de * du).rem_euclid(2) == 1 { r.neg() } else { r });
            }
        }
        out
    }

    /// Δξ in chained copies (X0, X1, X2): ξ(X0, X2).
    pub fn coproduct(&self, e: &Elem) -> Elem {
        let c = self.copies(e);
        rename(&self.sp, &c, &[(self.side.copy(1), self.side.copy(2))])
    }

    /// Evaluate a chained-copy element F(X0, X1, X2) on (u, v):
    /// u_{X1}[(v_{X2} F)|_{X2=X1}]|_{X1=X0}, coefficients of v taken at X1.
    pub fn chained_act(&self, f: &Elem, u: &Elem, v: &Elem) -> Elem {
        let sp = &self.sp;
        let side = self.side;
        let ds = side.ds(1);
        let (c0, c1, c2) = (side.copy(0), side.copy(1), side.copy(2));
        let mut g = sp.zero();
        let t2 = retarget(sp, ds, c2);
        for (word, c) in v.collect_right(&|h| sp.in_fam(ds, h)) {
            let inner = rename(sp, &apply_word(&word, &t2, f), &[(c2, c1)]);
            g.add_assign(&rename(sp, &c, &[(side.var(), c1)]).mul(&inner));
        }
        let t1 = retarget(sp, ds, c1);
        let mut out = sp.zero();
        for (word, c) in u.collect_right(&|h| sp.in_fam(ds, h)) {
            let inner = rename(sp, &apply_word(&word, &t1, &g), &[(c1, c0)]);
            out.add_assign(&rename(sp, &c, &[(side.var(), c0)]).mul(&inner));
        }
        rename(sp, &out, &[(c0, side.var())])
    }

    /// S(ξ)(X0, X1) = ξ(X1, X0)
    pub fn antipode(&self, e: &Elem) -> Elem {
        let sp = &self.sp;
        let (c0, c1) = (self.side.copy(0), self.side.copy(1));
        let c = self.copies(e);
        let swapped = c.substitute(&|g| {
            sp.pos_in(c0, g)
                .map(|i| sp.g(c1, i))
                .or_else(|| sp.pos_in(c1, g).map(|i| sp.g(c0, i)))
        });
        self.uncopies(&swapped)
    }

    /// Grothendieck connection along ∂_i: differentiate in the source copy.
    pub fn gro(&self, i: usize, e: &Elem) -> Elem {
        let c = self.copies(e).deriv(self.sp.idx(self.side.copy(0), i));
        self.uncopies(&c)
    }

    /// The other representation: differentiate in the target copy.
    pub fn dmb(&self, i: usize, e: &Elem) -> Elem {
        let c = self.copies(e).deriv(self.sp.idx(self.side.copy(1), i));
        self.uncopies(&c)
    }

    /// ∇^G_u for a U-element u = Σ c·S: c·(∂_{X0})^S.
    pub fn gro_u(&self, u: &Elem, e: &Elem) -> Elem {
        let sp = &self.sp;
        let ds = self.side.ds(1);
        let target = retarget(sp, ds, self.side.copy(0));
        let ce = self.copies(e);
        let mut out = sp.zero();
        for (word, c) in u.collect_right(&|g| sp.in_fam(ds, g)) {
            out.add_assign(&c.mul(&self.uncopies(&apply_word(&word, &target, &ce))));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference;

    fn setup(name: &str) -> Arc<Space> {
        Space::new(&reference::get(name), 6, 2)
    }

    #[test]
    fn pbw_flat_is_symbol_product() {
        let sp = setup("flat-r2");
        let p = Pbw::new(&sp, Side::Base, 3);
        let w = sp.parse("Sx_x1*Sx_x2");
        assert_eq!(p.apply(&w), sp.parse("Dx1_x1*Dx1_x2"));
    }

    #[test]
    fn pbw_curved_second_order() {
        let sp = setup("curved-r1");
        let p = Pbw::new(&sp, Side::Base, 4);
        assert_eq!(p.apply(&sp.parse("Sx_x^2")), sp.parse("Dx1_x^2 - x*Dx1_x"));
        for order in 0..=4 {
            for w in words_of_order(&sp, Fam::SymX, order) {
                let e = Elem::monomial(&sp.ctx, w, Q::ONE);
                assert_eq!(p.inverse(&p.apply(&e)), e);
            }
        }
    }

    #[test]
    fn pbw_is_a_coalgebra_map() {
        for name in ["curved-r1", "odd-line", "flat-r2"] {
            let sp = setup(name);
            let p = Pbw::new(&sp, Side::Base, 3);
            for order in 0..=3 {
                for w in words_of_order(&sp, Fam::SymX, order) {
                    let e = Elem::monomial(&sp.ctx, w, Q::ONE);
                    let lhs = u_coproduct(&sp, Side::Base, &p.apply(&e));
                    let rhs = p.apply2(&p.sym_coproduct(&e));
                    assert_eq!(lhs, rhs, "{name}: {e}");
                }
            }
        }
    }

    #[test]
    fn coproduct_is_leibniz() {
        let sp = setup("odd-line");
        let u = sp.parse("Dx1_x^2*Dx1_th + x*Dx1_th - 3*th*Dx1_x");
        let v = sp.parse("x^2*Dx1_th + Dx1_x");
        let uv = u_compose(&sp, Side::Base, 1, &u, &v);
        for (f, g) in [("x^3*th", "x^2"), ("th + x", "x*th - 1"), ("x^4", "th")] {
            let (f, g) = (sp.parse(f), sp.parse(g));
            let fg = f.mul(&g);
            for w in [&u, &uv] {
                let lhs = u_apply(&sp, Side::Base, 1, w, &fg);
                let rhs = act2(&sp, Side::Base, &u_coproduct(&sp, Side::Base, w), &f, &g);
                assert_eq!(lhs, rhs);
            }
            let lhs = u_apply(&sp, Side::Base, 1, &uv, &f);
            let rhs = u_apply(&sp, Side::Base, 1, &u, &u_apply(&sp, Side::Base, 1, &v, &f));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jet_coproduct_dualizes_composition() {
        let sp = setup("odd-line");
        let j = Jets::new(&sp, Side::Base);
        let xi = sp.parse("zx1_x^2*zx1_th + x*zx1_th - th*zx1_x + 2*zx1_x^3");
        let u = sp.parse("Dx1_x + th*Dx1_th");
        let v = sp.parse("x*Dx1_x*Dx1_th + Dx1_x^2");
        let uv = u_compose(&sp, Side::Base, 1, &u, &v);
        let lhs = j.chained_act(&j.coproduct(&xi), &u, &v);
        assert_eq!(lhs, j.act(&xi, &uv));
    }

    #[test]
    fn grothendieck_connection_relation() {
        // ⟨∇^G_X ξ, u⟩ = X⟨ξ,u⟩ − (−1)^{|X||ξ|}⟨ξ, X u⟩
        let sp = setup("odd-line");
        let j = Jets::new(&sp, Side::Base);
        let xi = sp.parse("x*zx1_th + zx1_x^2 - th*zx1_x*zx1_th");
        for i in 0..2 {
            let xd = sp.g(Fam::DsX(1), i);
            let dx = sp.degs[i];
            for u in ["1", "Dx1_x", "x*Dx1_th", "Dx1_x*Dx1_th"] {
                let u = sp.parse(u);
                for (dxi, part) in xi.by_degree() {
                    let lhs = j.pairing(&j.gro(i, &part), &u);
                    let d = j.pairing(&part, &u).deriv(sp.idx(Fam::X, i));
                    let xu = u_compose(&sp, Side::Base, 1, &xd, &u);
                    let r = j.pairing(&part, &xu);
                    let rhs = if (dx * dxi).rem_euclid(2) == 1 { d.add(&r) } else { d.sub(&r) };
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn antipode_relation() {
        // ⟨Sξ, u⟩ = (−1)^{|ξ||u|} ε(∇^G_u ξ)
        let sp = setup("odd-line");
        let j = Jets::new(&sp, Side::Base);
        let xi = sp.parse("x*zx1_th + zx1_x^2*x - th*zx1_x*zx1_th + th");
        for u in ["1", "Dx1_x", "x*Dx1_th", "Dx1_x*Dx1_th + th*Dx1_x^2"] {
            let u = sp.parse(u);
            for (dxi, part) in xi.by_degree() {
                for (du, pu) in u.by_degree() {
                    let lhs = j.pairing(&j.antipode(&part), &pu);
                    let r = j.counit(&j.gro_u(&pu, &part));
                    let rhs = if (dxi * du).rem_euclid(2) == 1 { r.neg() } else { r };
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
