use gfc::coeff::Q;
use gfc::contractions::Setup;
use gfc::graded::{Context, Derivation, Elem, GenClass, Generator};
use gfc::hpl::check_contraction;
use gfc::model::{reference, Side, Space};
use gfc::poly::{dpoly, Kind};
use gfc::sample::Sampler;
use gfc::suites::{Config, Session};
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn ctx() -> Arc<Context> {
    static CTX: OnceLock<Arc<Context>> = OnceLock::new();
    CTX.get_or_init(|| {
        let g = |n: &str, c, d, p| Generator {
            name: n.into(),
            class: c,
            degree: d,
            weight: Context::default_weight(c),
            pair: p,
        };
        Context::new(
            vec![
                g("x", GenClass::Base, 0, None),
                g("th", GenClass::Graded, 1, None),
                g("u", GenClass::Graded, 2, None),
                g("xi_x", GenClass::Form, 1, Some(0)),
                g("xi_th", GenClass::Form, 2, Some(1)),
                g("y_x", GenClass::Fiber, 0, Some(0)),
                g("y_th", GenClass::Fiber, 1, Some(1)),
            ],
            // above the weight of any sampled product, so nothing is cut
            64,
        )
        .unwrap()
    })
    .clone()
}

/// Sums of up to four terms c·g1·g2·g3 with small integer coefficients.
fn elem() -> impl Strategy<Value = Elem> {
    let n = ctx().len();
    prop::collection::vec((-3i64..=3, prop::collection::vec(0..n, 0..=3)), 0..=4).prop_map(|terms| {
        let c = ctx();
        let mut e = Elem::zero(&c);
        for (k, gens) in terms {
            let t = gens.iter().fold(Elem::one(&c), |acc, &g| acc.mul(&Elem::gen(&c, g)));
            e.add_assign(&t.scale(&Q::int(k)));
        }
        e
    })
}

/// A nonzero homogeneous element, or None.
fn homogeneous() -> impl Strategy<Value = Option<Elem>> {
    elem().prop_map(|e| e.by_degree().into_values().next())
}

/// f·∂_g for homogeneous f.
fn derivation() -> impl Strategy<Value = Option<Derivation>> {
    (homogeneous(), 0..ctx().len()).prop_map(|(f, g)| {
        let c = ctx();
        f.map(|f| Derivation::partial(&c, g).lmul(&f))
    })
}

fn sign(odd: bool) -> Q {
    Q::int(if odd { -1 } else { 1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(a in elem(), b in elem(), c in elem()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn product_distributes(a in elem(), b in elem(), c in elem()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }

    #[test]
    fn graded_commutativity(a in homogeneous(), b in homogeneous()) {
        if let (Some(a), Some(b)) = (a, b) {
            let s = sign(a.hdeg() * b.hdeg() % 2 != 0);
            prop_assert_eq!(a.mul(&b), b.mul(&a).scale(&s));
        }
    }

    #[test]
    fn derivation_leibniz(d in derivation(), a in homogeneous(), b in elem()) {
        if let (Some(d), Some(a)) = (d, a) {
            let s = sign(d.degree() * a.hdeg() % 2 != 0);
            let rhs = d.apply(&a).mul(&b).add(&a.mul(&d.apply(&b)).scale(&s));
            prop_assert_eq!(d.apply(&a.mul(&b)), rhs);
        }
    }

    #[test]
    fn commutator_jacobi(x in derivation(), y in derivation(), z in derivation()) {
        if let (Some(x), Some(y), Some(z)) = (x, y, z) {
            let s = sign(x.degree() * y.degree() % 2 != 0);
            let lhs = x.commutator(&y.commutator(&z));
            let rhs = x.commutator(&y).commutator(&z).add(&y.commutator(&x.commutator(&z)).scale(&s));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn commutator_acts_as_commutator(x in derivation(), y in derivation(), a in elem()) {
        if let (Some(x), Some(y)) = (x, y) {
            let s = sign(x.degree() * y.degree() % 2 != 0);
            let rhs = x.apply(&y.apply(&a)).sub(&y.apply(&x.apply(&a)).scale(&s));
            prop_assert_eq!(x.commutator(&y).apply(&a), rhs);
        }
    }
}

fn line() -> Arc<Space> {
    static SP: OnceLock<Arc<Space>> = OnceLock::new();
    SP.get_or_init(|| Space::new(&reference::get("odd-line"), 6, 4)).clone()
}

fn setup() -> Arc<Setup> {
    static S: OnceLock<Arc<Setup>> = OnceLock::new();
    S.get_or_init(|| {
        let m = reference::get("curved-r1");
        Setup::new(&m, m.orders().y_order, 4).unwrap()
    })
    .clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hochschild_is_linear_across_arities(seed in any::<u64>(), p in 0usize..=2, q in 0usize..=2) {
        let sp = line();
        let mut s = Sampler::new(&sp, seed, 2, 2);
        let a = s.chain_of_arity(Kind::D, Some(p));
        let b = s.chain_of_arity(Kind::D, Some(q));
        let d = |e: &Elem| dpoly::hochschild_d(&sp, Side::Base, e);
        prop_assert_eq!(d(&a.add(&b)), d(&a).add(&d(&b)));
        prop_assert!(d(&d(&a.add(&b))).is_zero());
    }

    #[test]
    fn cup_is_bilinear_across_arities(seed in any::<u64>()) {
        let sp = line();
        let mut s = Sampler::new(&sp, seed, 2, 2);
        let a = s.chain_of_arity(Kind::D, Some(1));
        let b = s.chain_of_arity(Kind::D, Some(0));
        let c = s.chain_of_arity(Kind::D, Some(1));
        let cup = |x: &Elem, y: &Elem| dpoly::cup(&sp, Side::Base, x, y);
        prop_assert_eq!(cup(&a.add(&b), &c), cup(&a, &c).add(&cup(&b, &c)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn koszul_contraction_relations(seed in any::<u64>()) {
        let st = setup();
        let mut s = Sampler::new(&st.sp, seed, 2, 2);
        for level in [Kind::Tensor(1, 1), Kind::T, Kind::D] {
            let c = st.koszul(level);
            let v = vec![s.chain(level)];
            let w = vec![s.fedosov_chain(level)];
            let f = check_contraction(&c.maps, &v, &w);
            prop_assert!(f.is_empty(), "{} {:?}", level, f.first().map(|f| &f.relation));
            for x in &w {
                prop_assert!(st.fd.delta.apply(&st.fd.delta.apply(x)).is_zero());
            }
        }
    }

    #[test]
    fn reports_are_reproducible(seed in any::<u64>()) {
        let m = reference::get("flat-r2");
        let run = |jobs| {
            let r = Session::new(&m, Config { seed, samples: 4, jobs }).run_one("koszul").unwrap();
            serde_json::to_string(&r).unwrap()
        };
        prop_assert_eq!(run(1), run(3));
    }
}
