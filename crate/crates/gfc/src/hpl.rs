//! Contractions and the homological perturbation lemma.
//!
//! Convention: στ = 1, τσ = 1 − (d_W h + h d_W), hτ = 0, σh = 0, h² = 0.

use crate::graded::Elem;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type LinMap = Arc<dyn Fn(&Elem) -> Elem + Send + Sync>;
/// Filtration weight of a nonzero element; perturbations must strictly lower
/// it under hρ.
pub type WeightFn = Arc<dyn Fn(&Elem) -> i64 + Send + Sync>;

/// Iteration cap for the geometric series.
pub const SERIES_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HplError {
    #[error("perturbation is not small: hρ does not lower the weight of {0}")]
    NotSmall(String),
    #[error("hρτ ≠ 0 on {0}")]
    NotBicomplex(String),
    #[error("geometric series did not terminate within {0} steps")]
    NonTerminatingSeries(usize),
}

pub fn lin(f: impl Fn(&Elem) -> Elem + Send + Sync + 'static) -> LinMap {
    Arc::new(f)
}

pub fn compose(f: &LinMap, g: &LinMap) -> LinMap {
    let (f, g) = (f.clone(), g.clone());
    Arc::new(move |e| f(&g(e)))
}

pub fn sum(f: &LinMap, g: &LinMap) -> LinMap {
    let (f, g) = (f.clone(), g.clone());
    Arc::new(move |e| f(e).add(&g(e)))
}

/// A contraction (W, d_W) ⇄ (V, d_V) with σ: W → V, τ: V → W, h on W.
#[derive(Clone)]
pub struct Contraction {
    pub d_v: LinMap,
    pub d_w: LinMap,
    pub sigma: LinMap,
    pub tau: LinMap,
    pub h: LinMap,
}

impl fmt::Debug for Contraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Contraction")
    }
}

/// Σ_k (−hρ)^k e, stopping at zero.
fn series(h: &LinMap, rho: &LinMap, weight: &WeightFn, e: &Elem) -> Result<Elem, HplError> {
    let mut total = e.clone();
    let mut cur = e.clone();
    for _ in 0..SERIES_CAP {
        if cur.is_zero() {
            return Ok(total);
        }
        let next = h(&rho(&cur)).neg();
        if !next.is_zero() && weight(&next) >= weight(&cur) {
            return Err(HplError::NotSmall(cur.to_string()));
        }
        total.add_assign(&next);
        cur = next;
    }
    if cur.is_zero() {
        Ok(total)
    } else {
        Err(HplError::NonTerminatingSeries(SERIES_CAP))
    }
}

fn series_map(h: &LinMap, rho: &LinMap, weight: &WeightFn) -> LinMap {
    let (h, rho, weight) = (h.clone(), rho.clone(), weight.clone());
    Arc::new(move |e| match series(&h, &rho, &weight, e) {
        Ok(s) => s,
        Err(err) => panic!("perturbation series: {err}"),
    })
}

fn check_small(c: &Contraction, rho: &LinMap, weight: &WeightFn, samples: &[Elem]) -> Result<(), HplError> {
    for s in samples {
        series(&c.h, rho, weight, s)?;
    }
    Ok(())
}

/// Perturb d_W by ρ and transfer along the contraction.
pub fn perturb(c: &Contraction, rho: &LinMap, weight: &WeightFn, samples: &[Elem]) -> Result<Contraction, HplError> {
    check_small(c, rho, weight, samples)?;
    let ser = series_map(&c.h, rho, weight);
    // ρ̆ = ρ ∘ Σ(−hρ)^k
    let rb = compose(rho, &ser);
    let tau = compose(&ser, &c.tau);
    let s_rb_h = compose(&compose(&c.sigma, &rb), &c.h);
    let h_rb_h = compose(&compose(&c.h, &rb), &c.h);
    let s_rb_t = compose(&compose(&c.sigma, &rb), &c.tau);
    let (sigma0, h0, dv0, dw0, rho0) = (c.sigma.clone(), c.h.clone(), c.d_v.clone(), c.d_w.clone(), rho.clone());
    Ok(Contraction {
        sigma: lin(move |e| sigma0(e).sub(&s_rb_h(e))),
        h: lin(move |e| h0(e).sub(&h_rb_h(e))),
        d_v: lin(move |e| dv0(e).add(&s_rb_t(e))),
        d_w: lin(move |e| dw0(e).add(&rho0(e))),
        tau,
    })
}

/// Variant for perturbations with hρτ = 0: τ is unchanged and d_V gains σρτ.
pub fn perturb_bicomplex(
    c: &Contraction,
    rho: &LinMap,
    weight: &WeightFn,
    samples_w: &[Elem],
    samples_v: &[Elem],
) -> Result<Contraction, HplError> {
    for v in samples_v {
        let r = (c.h)(&rho(&(c.tau)(v)));
        if !r.is_zero() {
            return Err(HplError::NotBicomplex(v.to_string()));
        }
    }
    let mut out = perturb(c, rho, weight, samples_w)?;
    out.tau = c.tau.clone();
    let s_r_t = compose(&compose(&c.sigma, rho), &c.tau);
    let dv0 = c.d_v.clone();
    out.d_v = lin(move |e| dv0(e).add(&s_r_t(e)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Failure {
    pub relation: String,
    pub input: String,
    pub residual: String,
}

impl Failure {
    pub fn new(relation: &str, input: &Elem, residual: &Elem) -> Failure {
        Failure {
            relation: relation.to_string(),
            input: input.to_string(),
            residual: residual.to_string(),
        }
    }
}

/// Check all contraction identities on the given samples. `proj_v` / `proj_w`
/// are applied to residuals before the zero test (truncation to the trusted
/// order); pass identities when everything is exact.
pub fn check_contraction_with(
    c: &Contraction,
    samples_v: &[Elem],
    samples_w: &[Elem],
    proj_v: &dyn Fn(&Elem) -> Elem,
    proj_w: &dyn Fn(&Elem) -> Elem,
) -> Vec<Failure> {
    let mut out = Vec::new();
    let mut test = |name: &str, input: &Elem, r: Elem| {
        if !r.is_zero() {
            out.push(Failure::new(name, input, &r));
        }
    };
    for v in samples_v {
        let tv = (c.tau)(v);
        test("sigma∘tau = 1", v, proj_v(&(c.sigma)(&tv).sub(v)));
        test("h∘tau = 0", v, proj_w(&(c.h)(&tv)));
        test("d_V² = 0", v, proj_v(&(c.d_v)(&(c.d_v)(v))));
        test("d_W∘tau = tau∘d_V", v, proj_w(&(c.d_w)(&tv).sub(&(c.tau)(&(c.d_v)(v)))));
    }
    for w in samples_w {
        let hw = (c.h)(w);
        let ts = (c.tau)(&(c.sigma)(w));
        let dh = (c.d_w)(&hw);
        let hd = (c.h)(&(c.d_w)(w));
        test("tau∘sigma = 1 − [d_W, h]", w, proj_w(&ts.sub(w).add(&dh).add(&hd)));
        test("sigma∘h = 0", w, proj_v(&(c.sigma)(&hw)));
        test("h² = 0", w, proj_w(&(c.h)(&hw)));
        test("h∘d_W∘h = h", w, proj_w(&(c.h)(&dh).sub(&hw)));
        test("d_W² = 0", w, proj_w(&(c.d_w)(&(c.d_w)(w))));
        test("sigma∘d_W = d_V∘sigma", w, proj_v(&(c.sigma)(&(c.d_w)(w)).sub(&(c.d_v)(&(c.sigma)(w)))));
    }
    out
}

pub fn check_contraction(c: &Contraction, samples_v: &[Elem], samples_w: &[Elem]) -> Vec<Failure> {
    check_contraction_with(c, samples_v, samples_w, &|e| e.clone(), &|e| e.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Q;
    use crate::graded::{Context, GenClass, Generator};

    fn gen(name: &str, class: GenClass, degree: i32, pair: Option<usize>) -> Generator {
        Generator {
            name: name.into(),
            class,
            degree,
            weight: Context::default_weight(class),
            pair,
        }
    }

    // W = Q[a, b] with b odd, d_W(a) = b; V = Q[x].
    fn koszul_pair() -> (Arc<Context>, Contraction) {
        let ctx = Context::new(
            vec![
                gen("x", GenClass::Base, 0, None),
                gen("a", GenClass::Fiber, 0, Some(0)),
                gen("b", GenClass::Form, 1, Some(0)),
            ],
            4,
        )
        .unwrap();
        let (a, b) = (1usize, 2usize);
        let (c1, c2) = (ctx.clone(), ctx.clone());
        let d_w = lin(move |e: &Elem| {
            Elem::gen(&c1, b).mul(&e.deriv(a))
        });
        let h = lin(move |e: &Elem| {
            let mut r = Elem::zero(&c2);
            for (m, c) in e.terms() {
                let (p, q) = Elem::bigrade_of(&c2, m);
                if p == 0 {
                    continue;
                }
                let single = Elem::monomial(&c2, m.clone(), c.clone());
                let eta = Elem::gen(&c2, a).mul(&single.deriv(b));
                r.add_scaled(&eta, &Q::frac(1, (p + q) as i64));
            }
            r
        });
        let sigma = lin(move |e: &Elem| e.filter(|m| m.iter().all(|&(g, _)| g == 0)));
        let c = Contraction {
            d_v: lin(move |e: &Elem| Elem::zero(e.ctx())),
            d_w,
            sigma,
            tau: lin(|e: &Elem| e.clone()),
            h,
        };
        (ctx, c)
    }

    #[test]
    fn koszul_contraction_identities() {
        let (ctx, c) = koszul_pair();
        let samples: Vec<Elem> = ["1", "a", "a^2*b", "3*a^3 - b", "a*b + 2"]
            .iter()
            .map(|s| Elem::parse(&ctx, s).unwrap())
            .collect();
        let v = vec![Elem::one(&ctx), Elem::parse(&ctx, "5").unwrap()];
        let f = check_contraction(&c, &v, &samples);
        assert!(f.is_empty(), "{f:?}");
    }

    #[test]
    fn broken_homotopy_is_reported() {
        let (ctx, mut c) = koszul_pair();
        let h = c.h.clone();
        c.h = lin(move |e| h(e).scale(&Q::int(2)));
        let samples = vec![Elem::parse(&ctx, "a*b").unwrap()];
        let f = check_contraction(&c, &[], &samples);
        assert!(f.iter().any(|x| x.relation.starts_with("tau∘sigma")));
    }

    #[test]
    fn perturbation_stays_a_contraction() {
        let (ctx, c) = koszul_pair();
        // ρ = a·b·∂_a raises the a-degree, h lowers nothing, so the weight −deg_a drops
        let cc = ctx.clone();
        let rho = lin(move |e: &Elem| Elem::parse(&cc, "a*b").unwrap().mul(&e.deriv(1)));
        let weight: WeightFn =
            Arc::new(|e: &Elem| -(e.terms().map(|(m, _)| Elem::exp_of(m, 1) as i64).min().unwrap_or(0)));
        let samples: Vec<Elem> = ["a", "a^2*b", "a^3", "b"].iter().map(|s| Elem::parse(&ctx, s).unwrap()).collect();
        let p = perturb(&c, &rho, &weight, &samples).unwrap();
        let f = check_contraction(&p, &[Elem::one(&ctx)], &samples);
        assert!(f.is_empty(), "{f:?}");
    }
}
