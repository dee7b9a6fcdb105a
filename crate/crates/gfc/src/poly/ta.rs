//! Polyvector fields, forms and tensors: wedge, Schouten bracket, the
//! algebroid differential, contraction ι and Lie derivative L.
//!
//! A polyvector is Σ c·ψ^I with shifted vector legs ψ_i = s⁻¹∂_i of degree
//! 1 − |x_i|; a form is Σ c·e^J with form legs e_i of degree |x_i| − 1.
//! ι_X treats ψ_i as ∂/∂e_i (composed in monomial order), so ι_{XY} = ι_X ι_Y.
//! On the Fedosov side the coordinates are y and x, ξ are parameters.

use super::{by_degree, odd, right_deriv, sign};
use crate::graded::{Derivation, Elem};
use crate::hopf::{apply_word, retarget};
use crate::model::{Side, Space};

pub fn wedge(a: &Elem, b: &Elem) -> Elem {
    a.mul(b)
}

/// Vector field Σ V^i ∂_i ↦ Σ V^i ψ_i
pub fn vf_to_chain(sp: &Space, side: Side, v: &Derivation) -> Elem {
    let mut out = sp.zero();
    for i in 0..sp.n {
        out.add_assign(&v.on_gen(sp.idx(side.var(), i)).mul(&sp.g(side.psi(), i)));
    }
    out
}

/// Arity-1 polyvector Σ V^i ψ_i ↦ Σ V^i ∂_i (ψ-linear input expected).
pub fn chain_to_vf(sp: &Space, side: Side, x: &Elem, degree: i32) -> Derivation {
    let mut d = Derivation::zero(&sp.ctx, degree);
    for i in 0..sp.n {
        d.add_component(sp.idx(side.var(), i), &right_deriv(x, sp.idx(side.psi(), i)));
    }
    d
}

/// d = Σ e_i ∂_i (de Rham on the base, leafwise on F); degree −1.
pub fn algebroid_d(sp: &Space, side: Side) -> Derivation {
    Derivation::new(
        &sp.ctx,
        -1,
        (0..sp.n).map(|i| (sp.idx(side.var(), i), sp.g(side.dl(), i))),
    )
}

/// ι_X ω
pub fn iota(sp: &Space, side: Side, x: &Elem, w: &Elem) -> Elem {
    let psi = side.psi();
    let target = retarget(sp, psi, side.dl());
    let mut out = sp.zero();
    for (word, c) in x.collect_right(&|g| sp.in_fam(psi, g)) {
        out.add_assign(&c.mul(&apply_word(&word, &target, w)));
    }
    out
}

/// L_X = [ι_X, d] = ι_X d − (−1)^{|X|} d ι_X
pub fn lie(sp: &Space, side: Side, x: &Elem, w: &Elem) -> Elem {
    let d = algebroid_d(sp, side);
    by_degree(x, |xp, dx| {
        let a = iota(sp, side, xp, &d.apply(w));
        let b = d.apply(&iota(sp, side, xp, w));
        if odd(dx) {
            a.add(&b)
        } else {
            a.sub(&b)
        }
    })
}

/// Schouten bracket Σ_i (F∂⃖_{ψ_i}·∂_i G − F∂⃖_i·∂_{ψ_i} G); degree −1.
pub fn schouten(sp: &Space, side: Side, f: &Elem, g: &Elem) -> Elem {
    let mut out = sp.zero();
    for i in 0..sp.n {
        let (xi, pi) = (sp.idx(side.var(), i), sp.idx(side.psi(), i));
        out.add_assign(&right_deriv(f, pi).mul(&g.deriv(xi)));
        out = out.sub(&right_deriv(f, xi).mul(&g.deriv(pi)));
    }
    out
}

/// [V, ∂_j](coordinate l) = −(−1)^{|V||x_j|} ∂_j(V x_l)
fn bracket_with_partial(sp: &Space, side: Side, v: &Derivation, j: usize, l: usize) -> Elem {
    let vl = v.on_gen(sp.idx(side.var(), l));
    let d = vl.deriv(sp.idx(side.var(), j));
    sign(!odd(v.degree() * sp.degs[j]), d)
}

/// Extend a vector field V (acting on the coordinate algebra) to the legs
/// of `side`: shifted vector and form legs, and the unshifted tensor legs of
/// every slot. The result is the Lie derivative L_V as a derivation.
pub fn lie_field(sp: &Space, side: Side, v: &Derivation) -> Derivation {
    let mut out = v.clone();
    let dv = v.degree();
    let var = side.var();
    let mut vec_fams = vec![side.psi()];
    let mut cov_fams = vec![];
    for a in 1..=sp.slots {
        vec_fams.push(side.vec(a));
        cov_fams.push(side.cov(a));
    }
    let vx: Vec<Elem> = (0..sp.n).map(|l| v.on_gen(sp.idx(var, l))).collect();
    for j in 0..sp.n {
        let coeffs: Vec<Elem> = (0..sp.n).map(|l| bracket_with_partial(sp, side, v, j, l)).collect();
        for &fam in &vec_fams {
            let mut c = sp.zero();
            for (l, k) in coeffs.iter().enumerate() {
                c.add_assign(&k.mul(&sp.g(fam, l)));
            }
            out.add_component(sp.idx(fam, j), &c);
        }
        // L_V(e_j) = (−1)^{|V|} d(V x_j)
        let de = algebroid_d(sp, side).apply(&vx[j]);
        out.add_component(sp.idx(side.dl(), j), &sign(odd(dv), de));
        for &fam in &cov_fams {
            let mut c = sp.zero();
            for l in 0..sp.n {
                c.add_assign(&sp.g(fam, l).mul(&vx[j].deriv(sp.idx(var, l))));
            }
            out.add_component(sp.idx(fam, j), &c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference, Fam};
    use std::sync::Arc;

    fn space(name: &str) -> Arc<Space> {
        Space::new(&reference::get(name), 6, 1)
    }

    const BASE_T: [&str; 6] = [
        "x^2*th",
        "x*px_x + th*px_th",
        "th*px_x*px_th",
        "px_th^2 + x*px_x",
        "x*th*px_th^2",
        "px_x*px_th^3 - 2*th",
    ];
    const BASE_A: [&str; 5] = ["x*th", "ex_x*th + x^2*ex_th", "ex_th^2*x", "ex_x*ex_th", "th*ex_x*ex_th^2 + x"];

    fn parse_all(sp: &Space, v: &[&str]) -> Vec<Elem> {
        v.iter().map(|s| sp.parse(s)).collect()
    }

    fn homogeneous(v: Vec<Elem>) -> Vec<Elem> {
        v.into_iter().flat_map(|e| e.by_degree().into_values()).collect()
    }

    #[test]
    fn iota_of_df_is_derivative() {
        let sp = space("odd-line");
        let d = algebroid_d(&sp, Side::Base);
        let x = sp.parse("x^2*px_x + th*px_th");
        let f = sp.parse("x^3*th");
        let v = chain_to_vf(&sp, Side::Base, &x, 0);
        assert_eq!(iota(&sp, Side::Base, &x, &d.apply(&f)), v.apply(&f));
        assert!(d.commutator(&d).is_zero());
    }

    #[test]
    fn schouten_extends_commutator() {
        let sp = space("odd-line");
        for (a, b) in [("x^2*px_x", "th*px_th"), ("th*px_x", "x*th*px_th"), ("px_th", "th*px_x")] {
            let (a, b) = (sp.parse(a), sp.parse(b));
            let (da, db) = (a.hdeg() - 1, b.hdeg() - 1);
            let va = chain_to_vf(&sp, Side::Base, &a, da);
            let vb = chain_to_vf(&sp, Side::Base, &b, db);
            let c = vf_to_chain(&sp, Side::Base, &va.commutator(&vb));
            assert_eq!(schouten(&sp, Side::Base, &a, &b), c);
        }
    }

    #[test]
    fn cartan_relations_base() {
        let sp = space("odd-line");
        let ts = homogeneous(parse_all(&sp, &BASE_T));
        let ws = homogeneous(parse_all(&sp, &BASE_A));
        let s = Side::Base;
        for x in &ts {
            for y in &ts {
                let (dx, dy) = (x.hdeg(), y.hdeg());
                for w in &ws {
                    // ι_{[X,Y]} = [L_X, ι_Y]
                    let lhs = iota(&sp, s, &schouten(&sp, s, x, y), w);
                    let a = lie(&sp, s, x, &iota(&sp, s, y, w));
                    let b = iota(&sp, s, y, &lie(&sp, s, x, w));
                    let rhs = sign(false, a).sub(&sign(odd((dx - 1) * dy), b));
                    assert_eq!(lhs, rhs, "straw X={x} Y={y} w={w}");
                    // L_{XY} = (−1)^{|Y|} L_X ι_Y + ι_X L_Y
                    let lhs = lie(&sp, s, &x.mul(y), w);
                    let rhs = sign(odd(dy), lie(&sp, s, x, &iota(&sp, s, y, w))).add(&iota(&sp, s, x, &lie(&sp, s, y, w)));
                    assert_eq!(lhs, rhs, "wood X={x} Y={y} w={w}");
                }
            }
        }
    }

    #[test]
    fn gerstenhaber_identities_base() {
        let sp = space("odd-line");
        let ts = homogeneous(parse_all(&sp, &BASE_T));
        let s = Side::Base;
        for x in &ts {
            for y in &ts {
                let (dx, dy) = (x.hdeg() - 1, y.hdeg() - 1);
                let xy = schouten(&sp, s, x, y);
                let yx = schouten(&sp, s, y, x);
                assert_eq!(xy, sign(!odd(dx * dy), yx), "antisymmetry");
                for z in &ts {
                    let dz = z.hdeg();
                    let lhs = schouten(&sp, s, x, &schouten(&sp, s, y, z));
                    let rhs = schouten(&sp, s, &xy, z).add(&sign(odd(dx * dy), schouten(&sp, s, y, &schouten(&sp, s, x, z))));
                    assert_eq!(lhs, rhs, "jacobi");
                    let _ = dz;
                    let lhs = schouten(&sp, s, x, &y.mul(z));
                    let rhs = xy.mul(z).add(&sign(odd(dx * (dy + 1)), y.mul(&schouten(&sp, s, x, z))));
                    assert_eq!(lhs, rhs, "compatibility");
                }
            }
        }
    }

    #[test]
    fn lie_field_matches_schouten_and_cartan() {
        let sp = space("derham-line");
        let q = Derivation::new(&sp.ctx, 1, [(sp.idx(Fam::X, 0), sp.parse("th"))]);
        let qhat = vf_to_chain(&sp, Side::Base, &q);
        let lq = lie_field(&sp, Side::Base, &q);
        for t in homogeneous(parse_all(&sp, &BASE_T)) {
            assert_eq!(lq.apply(&t), schouten(&sp, Side::Base, &qhat, &t), "T: {t}");
        }
        for w in homogeneous(parse_all(&sp, &BASE_A)) {
            assert_eq!(lq.apply(&w), lie(&sp, Side::Base, &qhat, &w), "A: {w}");
        }
        assert!(lq.commutator(&lq).is_zero());
    }
}
