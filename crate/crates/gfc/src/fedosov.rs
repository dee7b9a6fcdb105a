//! Fedosov operators on C∞(N) = Ω(M, Ŝ(T∨_M)): δ, η, h, d^∇, the correction
//! A and the flat differential D = −δ + d^∇ + A.

use crate::coeff::Q;
use crate::graded::{Derivation, Elem, Mono};
use crate::hopf::{apply_word, compose_sym, words_of_order, Pbw};
use crate::model::{Fam, Side, Space};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FedosovError {
    #[error("defect at order {0} is not δ-closed")]
    DefectNotDeltaClosed(u32),
    #[error("truncation {0} too small (need at least 2)")]
    TruncationTooSmall(u32),
    #[error("D is not flat, residual {0}")]
    FlatnessFailure(String),
    #[error("D + τ̆Q does not square to zero, residual {0}")]
    NotSquareZero(String),
    #[error("pbw oracle disagrees on {gen}: {detail}")]
    OracleMismatch { gen: String, detail: String },
}

/// δ = Σ ξ_k ∂/∂y_k
pub fn delta(sp: &Space) -> Derivation {
    Derivation::new(
        &sp.ctx,
        1,
        (0..sp.n).map(|k| (sp.idx(Fam::Y, k), sp.g(Fam::Xi, k))),
    )
}

/// η = Σ y_k ∂/∂ξ_k
pub fn eta(sp: &Space) -> Derivation {
    Derivation::new(
        &sp.ctx,
        -1,
        (0..sp.n).map(|k| (sp.idx(Fam::Xi, k), sp.g(Fam::Y, k))),
    )
}

pub fn koszul_delta(sp: &Space, e: &Elem) -> Elem {
    delta(sp).apply(e)
}

pub fn koszul_eta(sp: &Space, e: &Elem) -> Elem {
    eta(sp).apply(e)
}

/// Split by (r, q) = (ξ-degree, y-degree).
pub fn bigrade_split(e: &Elem) -> BTreeMap<(u32, u32), Elem> {
    let ctx = e.ctx().clone();
    let mut out: BTreeMap<(u32, u32), Elem> = BTreeMap::new();
    for (m, c) in e.terms() {
        out.entry(Elem::bigrade_of(&ctx, m))
            .or_insert_with(|| Elem::zero(&ctx))
            .add_term(m.clone(), c.clone());
    }
    out
}

/// h = −η/(r+q) on the (r,q) component, 0 on (0,0). Not a derivation.
pub fn homotopy_h(sp: &Space, e: &Elem) -> Elem {
    let eta = eta(sp);
    let mut r = sp.zero();
    for ((p, q), part) in bigrade_split(e) {
        if p == 0 {
            continue;
        }
        r.add_scaled(&eta.apply(&part), &Q::frac(-1, (p + q) as i64));
    }
    r
}

/// σ: restriction to ξ = y = 0 (legs untouched).
pub fn sigma(e: &Elem) -> Elem {
    let ctx = e.ctx().clone();
    e.filter(|m| Elem::bigrade_of(&ctx, m) == (0, 0))
}

/// d^∇ = Σ ξ_k ∇_{∂/∂x_k}
pub fn dnabla(sp: &Space) -> Derivation {
    let mut d = Derivation::zero(&sp.ctx, 1);
    for k in 0..sp.n {
        d = d.add(&sp.nabla(k).lmul(&sp.g(Fam::Xi, k)));
    }
    d
}

/// d^∇ restricted to the coordinate generators (x, y).
fn dnabla_core(sp: &Space) -> Derivation {
    let full = dnabla(sp);
    let keep: Vec<usize> = sp.fam(Fam::X).iter().chain(sp.fam(Fam::Y)).copied().collect();
    Derivation::new(
        &sp.ctx,
        1,
        full.components().filter(|(g, _)| keep.contains(g)).map(|(g, c)| (g, c.clone())),
    )
}

#[derive(Debug, Clone)]
pub struct FedosovData {
    pub sp: Arc<Space>,
    pub delta: Derivation,
    pub eta: Derivation,
    pub dnabla: Derivation,
    pub a: Derivation,
    pub d: Derivation,
    /// τ̆(Q) as a vertical vector field, when the model has Q
    pub tau_q: Option<Derivation>,
}

impl FedosovData {
    pub fn h(&self, e: &Elem) -> Elem {
        homotopy_h(&self.sp, e)
    }

    /// D + τ̆Q (or D when there is no Q)
    pub fn dq(&self) -> Derivation {
        match &self.tau_q {
            Some(t) => self.d.add(t),
            None => self.d.clone(),
        }
    }

    /// ρ = D + δ = d^∇ + A
    pub fn rho(&self) -> Derivation {
        self.d.add(&self.delta)
    }
}

/// Degreewise solve for A: at step s the defect −(D_{<s})² restricted to
/// (r, q) = (2, s−1) is δ-closed and A_s = h(defect).
pub fn build_a(sp: &Arc<Space>) -> Result<Derivation, FedosovError> {
    let n_tr = sp.truncation();
    if n_tr < 2 {
        return Err(FedosovError::TruncationTooSmall(n_tr));
    }
    let del = delta(sp);
    let base = dnabla_core(sp).add(&del.neg());
    let mut a = Derivation::zero(&sp.ctx, 1);
    for s in 2..=n_tr {
        let d = base.add(&a);
        let sq = d.commutator(&d);
        let mut a_s = Derivation::zero(&sp.ctx, 1);
        for j in 0..sp.n {
            let yj = sp.idx(Fam::Y, j);
            let defect = sq.on_gen(yj).bigrade_project(2, s - 1).scale(&Q::frac(-1, 2));
            if defect.is_zero() {
                continue;
            }
            if !del.apply(&defect).is_zero() {
                return Err(FedosovError::DefectNotDeltaClosed(s));
            }
            a_s.add_component(yj, &homotopy_h(sp, &defect));
        }
        a = a.add(&a_s);
    }
    Ok(a)
}

pub fn fedosov_d(sp: &Arc<Space>, a: &Derivation) -> Result<Derivation, FedosovError> {
    let d = dnabla_core(sp).add(&delta(sp).neg()).add(a);
    let sq = d.commutator(&d);
    if !sq.is_zero() {
        return Err(FedosovError::FlatnessFailure(sq.to_string()));
    }
    Ok(d)
}

pub fn build(sp: &Arc<Space>) -> Result<FedosovData, FedosovError> {
    let a = build_a(sp)?;
    let d = fedosov_d(sp, &a)?;
    Ok(FedosovData {
        sp: sp.clone(),
        delta: delta(sp),
        eta: eta(sp),
        dnabla: dnabla_core(sp),
        a,
        d,
        tau_q: None,
    })
}

/// Attach τ̆Q and check (D + τ̆Q)² = 0.
pub fn twist_by_q(fd: &FedosovData, tau_q: Derivation) -> Result<FedosovData, FedosovError> {
    let dq = fd.d.add(&tau_q);
    let sq = dq.commutator(&dq);
    if !sq.is_zero() {
        return Err(FedosovError::NotSquareZero(sq.to_string()));
    }
    let mut out = fd.clone();
    out.tau_q = Some(tau_q);
    Ok(out)
}

/// Independent construction of D from the pbw map: on the flat sections
/// side, ∇^⚡_k S = pbw⁻¹(∂_k ∘ pbw(S)) on S(T_M), dualized to Ŝ(T∨_M);
/// then D(x_k) = ξ_k and D(y_j) = Σ_k ξ_k ∇^⚡_k(y_j).
pub fn fedosov_d_via_pbw(sp: &Arc<Space>) -> Derivation {
    let n_tr = sp.truncation();
    let pbw = Pbw::new(sp, Side::Base, n_tr);
    let yfam = sp.fam(Fam::Y).to_vec();
    let ytarget = |g: usize| yfam[sp.pos_in(Fam::SymX, g).unwrap()];
    // basis words with their images pbw⁻¹(∂_k ∘ pbw(ς^J))
    let mut words = Vec::new();
    for order in 0..n_tr {
        words.extend(words_of_order(sp, Fam::SymX, order));
    }
    let mut d = Derivation::zero(&sp.ctx, 1);
    for k in 0..sp.n {
        d.add_component(sp.idx(Fam::X, k), &sp.g(Fam::Xi, k));
    }
    let mut nab_y: Vec<Elem> = vec![sp.zero(); sp.n];
    for k in 0..sp.n {
        for w in &words {
            let sj = Elem::monomial(&sp.ctx, w.clone(), Q::ONE);
            let img = pbw.inverse(&compose_sym(sp, Side::Base, 1, k, &pbw.apply(&sj)));
            let parts = img.collect_right(&|g| sp.in_fam(Fam::SymX, g));
            let yj = Elem::monomial(&sp.ctx, w.iter().map(|&(g, e)| (ytarget(g as usize) as u16, e)).collect(), Q::ONE);
            let norm = apply_word(w, &ytarget, &yj);
            let norm = norm.terms().next().map(|(_, c)| c.clone()).expect("nonzero pairing");
            let flip = (sp.degs[k] * w.iter().map(|&(g, e)| sp.ctx.gen(g as usize).degree * e as i32).sum::<i32>())
                .rem_euclid(2)
                == 1;
            for j in 0..sp.n {
                let key: Mono = smallvec::smallvec![(sp.idx(Fam::SymX, j) as u16, 1)];
                let Some(c) = parts.get(&key) else { continue };
                // ⟨∇^⚡_k y_j, ς^J⟩ = −(−1)^{|k||J|} ⟨y_j, ∇^⚡_k ς^J⟩
                let a = c.scale(&Q::ONE.signed(!flip));
                let term = sp.g(Fam::Xi, k).mul(&yj.mul(&a)).scale(&norm.inv());
                nab_y[j] = nab_y[j].add(&term);
            }
        }
    }
    for (j, e) in nab_y.iter().enumerate() {
        d.add_component(sp.idx(Fam::Y, j), e);
    }
    d
}

/// Compare the recursive D with the pbw construction generator-wise.
pub fn check_pbw_oracle(fd: &FedosovData) -> Result<(), FedosovError> {
    let sp = &fd.sp;
    let oracle = fedosov_d_via_pbw(sp);
    for fam in [Fam::X, Fam::Xi, Fam::Y] {
        for &g in sp.fam(fam) {
            let (a, b) = (fd.d.on_gen(g), oracle.on_gen(g));
            if a != b {
                return Err(FedosovError::OracleMismatch {
                    gen: sp.ctx.gen(g).name.clone(),
                    detail: format!("recursive {a}, pbw {b}"),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_model, reference, validate};

    #[test]
    fn h_example() {
        let sp = Space::new(&reference::get("curved-r1"), 4, 1);
        let e = sp.parse("xi_x*y_x");
        assert_eq!(homotopy_h(&sp, &e), sp.parse("-1/2*y_x^2"));
        assert!(homotopy_h(&sp, &sp.parse("x^2")).is_zero());
    }

    #[test]
    fn flat_case_has_no_correction() {
        let sp = Space::new(&reference::get("flat-r2"), 4, 1);
        let fd = build(&sp).unwrap();
        assert!(fd.a.is_zero());
        assert_eq!(fd.d.apply(&sp.parse("y_x1")), sp.parse("-xi_x1"));
        assert_eq!(fd.d.apply(&sp.parse("x1^2")), sp.parse("2*x1*xi_x1"));
    }

    #[test]
    fn curved_line_is_flat() {
        // one-dimensional connections have no curvature, so A vanishes
        let sp = Space::new(&reference::get("curved-r1"), 4, 1);
        let fd = build(&sp).unwrap();
        assert!(fd.a.is_zero());
        assert_eq!(fd.d.apply(&sp.parse("y_x")), sp.parse("-xi_x - x*xi_x*y_x"));
    }

    #[test]
    fn curved_plane_needs_correction() {
        let text = "[context]\nbase = [\"x1\", \"x2\"]\n\n[connection]\n\"Gamma.x2.x2.x1\" = \"x1\"\n";
        let m = validate(load_model(text).unwrap()).unwrap();
        let sp = Space::new(&m, 4, 1);
        let fd = build(&sp).unwrap();
        assert!(!fd.a.is_zero());
        for j in 0..2 {
            assert!(homotopy_h(&sp, &fd.a.on_gen(sp.idx(Fam::Y, j))).is_zero());
        }
        check_pbw_oracle(&fd).unwrap();
    }

    #[test]
    fn pbw_oracle_on_reference_models() {
        for (name, m) in reference::all() {
            let sp = Space::new(&m, 4, 1);
            let fd = build(&sp).unwrap();
            check_pbw_oracle(&fd).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
