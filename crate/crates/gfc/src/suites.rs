//! Named verification suites. Each suite draws seeded samples, evaluates a
//! fixed list of identities exactly and returns a deterministic report.

use crate::contractions::{symbol_order, trusted, verify_cartan_morphism, verify_nc_morphism, ContractionError, Setup};
use crate::fedosov::{self, homotopy_h};
use crate::graded::Elem;
use crate::groupoid::{check_pbw_coalgebra, TauHopf};
use crate::hpl::check_contraction;
use crate::model::{load_model, validate, Fam, Model, Side, Space};
use crate::oracle;
use crate::poly::{cpoly, dpoly, odd, sign, ta, Kind};
use crate::report::{Checker, Tally, Witness};
use crate::sample::{sample_seed, Sampler};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

pub const SUITES: [&str; 19] = [
    "koszul",
    "fedosov-flat",
    "contraction-tensor",
    "contraction-tpoly",
    "contraction-apoly",
    "contraction-dpoly",
    "contraction-cpoly",
    "ivp-oracle",
    "cartan",
    "cartan-morphism",
    "nc-calculus",
    "nc-morphism",
    "hopf",
    "groupoid",
    "dg-tpoly",
    "dg-apoly",
    "dg-dpoly",
    "dg-cpoly",
    "all",
];

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

const LEVELS: [Kind; 5] = [Kind::Tensor(1, 1), Kind::T, Kind::A, Kind::D, Kind::C];
const TENSORS: [Kind; 3] = [Kind::Tensor(1, 0), Kind::Tensor(0, 1), Kind::Tensor(1, 1)];

const V_RELATIONS: [&str; 4] = ["sigma∘tau = 1", "h∘tau = 0", "d_V² = 0", "d_W∘tau = tau∘d_V"];
const W_RELATIONS: [&str; 6] = [
    "tau∘sigma = 1 − [d_W, h]",
    "sigma∘h = 0",
    "h² = 0",
    "h∘d_W∘h = h",
    "d_W² = 0",
    "sigma∘d_W = d_V∘sigma",
];

/// A flat line, used by the Taylor check whatever the model under test.
const FLAT_LINE: &str = "[context]\nbase = [\"x\"]\n";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("unknown suite `{0}`")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub seed: u64,
    pub samples: usize,
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            samples: 20,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub model: String,
    pub model_hash: String,
    pub seed: u64,
    pub samples: usize,
    pub y_order: u32,
    pub jet_order: u32,
    pub max_arity: usize,
    pub passed: bool,
    /// set when the suite does not apply to the model
    pub skipped: Option<String>,
    pub checked: usize,
    pub identities: BTreeMap<String, Tally>,
    pub failures: Vec<Witness>,
    pub observations: BTreeMap<String, Tally>,
}

/// Lazily built data shared by the suites of one model.
pub struct Session {
    pub model: Model,
    pub cfg: Config,
    setup: std::sync::OnceLock<Result<Arc<Setup>, String>>,
}

impl Session {
    pub fn new(model: &Model, cfg: Config) -> Session {
        Session {
            model: model.clone(),
            cfg,
            setup: std::sync::OnceLock::new(),
        }
    }

    fn slots(&self) -> usize {
        (2 * self.model.orders().max_arity).max(3)
    }

    pub fn setup(&self) -> Result<Arc<Setup>, String> {
        self.setup
            .get_or_init(|| {
                Setup::new(&self.model, self.model.orders().y_order, self.slots()).map_err(|e| e.to_string())
            })
            .clone()
    }

    fn sampler(&self, sp: &Arc<Space>, i: usize) -> Sampler {
        let o = self.model.orders();
        Sampler::new(sp, sample_seed(self.cfg.seed, i), o.jet_order, o.max_arity)
    }

    /// Run `f` on every sample index, in parallel over `jobs` threads, and
    /// merge the per-sample results in index order.
    fn per_sample(&self, f: &(dyn Fn(usize, &mut Checker) + Sync)) -> Checker {
        let n = self.cfg.samples;
        let jobs = self.cfg.jobs.clamp(1, n.max(1));
        let mut parts: Vec<(usize, Checker)> = if jobs == 1 {
            (0..n)
                .map(|i| {
                    let mut c = Checker::new();
                    f(i, &mut c);
                    (i, c)
                })
                .collect()
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..jobs)
                    .map(|t| {
                        std::thread::Builder::new()
                            .stack_size(64 << 20)
                            .spawn_scoped(s, move || {
                                (t..n)
                                    .step_by(jobs)
                                    .map(|i| {
                                        let mut c = Checker::new();
                                        f(i, &mut c);
                                        (i, c)
                                    })
                                    .collect::<Vec<_>>()
                            })
                            .expect("spawn worker")
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
            })
        };
        parts.sort_by_key(|p| p.0);
        let mut out = Checker::new();
        for (_, c) in parts {
            out.merge(c);
        }
        out
    }

    pub fn run(&self, suite: &str) -> Result<Vec<Report>, SuiteError> {
        if suite == "all" {
            return Ok(SUITES[..SUITES.len() - 1].iter().map(|s| self.run_one(s).expect("known suite")).collect());
        }
        self.run_one(suite).map(|r| vec![r])
    }

    pub fn run_one(&self, suite: &str) -> Result<Report, SuiteError> {
        let mut skipped = None;
        let mut chk = Checker::new();
        let known = SUITES.contains(&suite) && suite != "all";
        if !known {
            return Err(SuiteError::Unknown(suite.to_string()));
        }
        match self.setup() {
            Err(e) => chk.truth("Fedosov data builds", self.model.name.as_str(), false, e),
            Ok(s) => match suite {
                "koszul" => chk = self.koszul(&s),
                "fedosov-flat" => chk = self.fedosov_flat(&s),
                "contraction-tensor" => {
                    for level in TENSORS {
                        chk.merge(self.contraction(&s, level));
                    }
                }
                "contraction-tpoly" => chk = self.contraction(&s, Kind::T),
                "contraction-apoly" => chk = self.contraction(&s, Kind::A),
                "contraction-dpoly" => chk = self.contraction(&s, Kind::D),
                "contraction-cpoly" => chk = self.contraction(&s, Kind::C),
                "ivp-oracle" => chk = self.ivp(&s),
                "cartan" => chk = self.cartan(&s),
                "cartan-morphism" => chk = self.cartan_morphism(&s),
                "nc-calculus" => chk = self.nc_calculus(&s),
                "nc-morphism" => chk = self.nc_morphism(&s),
                "hopf" => chk = self.hopf(&s),
                "groupoid" => chk = self.groupoid(&s),
                dg => {
                    let level = match dg {
                        "dg-tpoly" => Kind::T,
                        "dg-apoly" => Kind::A,
                        "dg-dpoly" => Kind::D,
                        _ => Kind::C,
                    };
                    if !s.has_q() {
                        skipped = Some(ContractionError::NoQ.to_string());
                    } else if s.q_weight_drop() > 0 {
                        skipped = Some(ContractionError::WeightLowering(s.q_weight_drop()).to_string());
                    } else {
                        chk = self.dg(&s, level);
                    }
                }
            },
        }
        let o = self.model.orders();
        Ok(Report {
            schema: SCHEMA,
            suite: suite.to_string(),
            model: self.model.name.clone(),
            model_hash: self.model.hash(),
            seed: self.cfg.seed,
            samples: self.cfg.samples,
            y_order: o.y_order,
            jet_order: o.jet_order,
            max_arity: o.max_arity,
            passed: chk.passed(),
            skipped,
            checked: chk.checked(),
            identities: chk.identities,
            failures: chk.failures,
            observations: chk.observations,
        })
    }

    // ---- suites ----------------------------------------------------------

    fn koszul(&self, s: &Arc<Setup>) -> Checker {
        let cs: Vec<_> = LEVELS.iter().map(|&l| s.koszul(l)).collect();
        self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            for (level, c) in LEVELS.iter().zip(&cs) {
                let v = r.chain(*level);
                let w = r.fedosov_chain(*level);
                record_contraction(chk, &level.to_string(), &c.maps, &v, &w);
                let fd = &s.fd;
                let input = format!("{level}: {w}");
                chk.zero("δ² = 0", &input, &fd.delta.apply(&fd.delta.apply(&w)));
                chk.zero("η² = 0", &input, &fd.eta.apply(&fd.eta.apply(&w)));
                let hw = s.h_nat(&w);
                chk.zero("h² = 0", &input, &s.h_nat(&hw));
                // with d_W = −δ the relation h∘d_W∘h = h reads hδh = −h
                chk.equal("h∘δ∘h = −h", &input, &s.h_nat(&fd.delta.apply(&hw)), &hw.neg());
            }
        })
    }

    fn fedosov_flat(&self, s: &Arc<Setup>) -> Checker {
        let mut chk = Checker::new();
        let sp = &s.sp;
        let fd = &s.fd;
        let gens: Vec<usize> = [Fam::X, Fam::Xi, Fam::Y].iter().flat_map(|&f| sp.fam(f).to_vec()).collect();
        let sq = fd.d.commutator(&fd.d);
        for &g in &gens {
            chk.zero("D² = 0", &sp.ctx.gen(g).name, &sq.on_gen(g));
        }
        match fedosov::build_a(sp) {
            Ok(a) => {
                for &g in sp.fam(Fam::Y) {
                    chk.equal("A is reproducible", &sp.ctx.gen(g).name, &a.on_gen(g), &fd.a.on_gen(g));
                }
            }
            Err(e) => chk.truth("A is reproducible", "build_a", false, e),
        }
        for &g in sp.fam(Fam::Y) {
            let name = &sp.ctx.gen(g).name;
            chk.zero("h(A) = 0", name, &homotopy_h(sp, &fd.a.on_gen(g)));
            if self.model.is_flat() {
                chk.zero("A = 0 (flat)", name, &fd.a.on_gen(g));
            }
        }
        chk.observe("A = 0", fd.a.is_zero());
        let oracle = fedosov::fedosov_d_via_pbw(sp);
        for &g in &gens {
            chk.equal("D = D_pbw", &sp.ctx.gen(g).name, &fd.d.on_gen(g), &oracle.on_gen(g));
        }
        chk
    }

    fn base_samples(&self, s: &Arc<Setup>, level: Kind) -> Vec<Elem> {
        (0..self.cfg.samples).map(|i| self.sampler(&s.sp, i).chain(level)).collect()
    }

    fn contraction(&self, s: &Arc<Setup>, level: Kind) -> Checker {
        let vs = self.base_samples(s, level);
        let c = match s.fedosov(level, &vs) {
            Ok(c) => c,
            Err(e) => {
                let mut chk = Checker::new();
                chk.truth(&format!("{level}: perturbation converges"), level, false, e);
                return chk;
            }
        };
        self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            let v = r.chain(level);
            let w = r.fedosov_chain(level);
            record_contraction(chk, &level.to_string(), &c.maps, &v, &w);
            let tv = (c.maps.tau)(&v);
            record_contraction(chk, &level.to_string(), &c.maps, &v, &s.fd.delta.apply(&tv).add(&tv));
            // τ̆x lies in the r = 0 window: no ξ
            let xi_free = tv.terms().all(|(m, _)| Elem::bigrade_of(&s.sp.ctx, m).0 == 0);
            chk.truth(&format!("{level}: tau lands in r = 0"), &v, xi_free, &tv);
        })
    }

    fn ivp(&self, s: &Arc<Setup>) -> Checker {
        let mut chk = Checker::new();
        let cs: Vec<_> = LEVELS
            .iter()
            .map(|&l| (l, s.fedosov(l, &self.base_samples(s, l))))
            .collect();
        for (level, c) in &cs {
            if let Err(e) = c {
                chk.truth(&format!("{level}: perturbation converges"), level, false, e);
            }
        }
        chk.merge(self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            for (level, c) in &cs {
                let Ok(c) = c else { continue };
                let x = r.chain(*level);
                let id = format!("{level}: ivp = tau");
                match s.ivp_solve(*level, &x) {
                    Ok(y) => chk.equal(&id, &x, &y, &(c.maps.tau)(&x)),
                    Err(e) => chk.truth(&id, &x, false, e),
                }
            }
        }));
        let one = s.sp.one();
        match s.ivp_solve(Kind::T, &one) {
            Ok(y) => chk.equal("ivp(1) = 1", "1", &y, &one),
            Err(e) => chk.truth("ivp(1) = 1", "1", false, e),
        }
        self.taylor(&mut chk);
        chk
    }

    /// On a flat line, τ̆(x^k) = ivp(x^k) = (x + y)^k for k = 1, 2, 3; the same
    /// on the model itself when it is flat, for every even coordinate.
    fn taylor(&self, chk: &mut Checker) {
        let o = self.model.orders();
        let mut models = vec![validate(load_model(FLAT_LINE).expect("flat line parses")).expect("flat line valid")];
        models[0].name = "flat-line".into();
        if self.model.is_flat() {
            models.push(self.model.clone());
        }
        for m in models {
            let s = match Setup::new(&m, o.y_order, 2) {
                Ok(s) => s,
                Err(e) => {
                    chk.truth("Taylor shift", &m.name, false, e);
                    continue;
                }
            };
            let sp = &s.sp;
            let c = match s.fedosov(Kind::T, &[]) {
                Ok(c) => c,
                Err(e) => {
                    chk.truth("Taylor shift", &m.name, false, e);
                    continue;
                }
            };
            for i in (0..sp.n).filter(|&i| sp.degs[i] == 0) {
                let (x, y) = (sp.g(Fam::X, i), sp.g(Fam::Y, i));
                let shifted = x.add(&y);
                for k in 1..=3 {
                    let f = x.pow(k);
                    let expect = shifted.pow(k);
                    let input = format!("{}: {f}", m.name);
                    match s.ivp_solve(Kind::T, &f) {
                        Ok(sol) => chk.equal("Taylor: ivp(f) = f(x+y)", &input, &sol, &expect),
                        Err(e) => chk.truth("Taylor: ivp(f) = f(x+y)", &input, false, e),
                    }
                    chk.equal("Taylor: tau(f) = f(x+y)", &input, &(c.maps.tau)(&f), &expect);
                }
            }
        }
    }

    fn cartan(&self, s: &Arc<Setup>) -> Checker {
        self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            let base = [r.chain(Kind::T), r.chain(Kind::T), r.chain(Kind::T), r.chain(Kind::A), r.vector_field()];
            let fed = [
                r.fedosov_chain(Kind::T),
                r.fedosov_chain(Kind::T),
                r.fedosov_chain(Kind::T),
                r.fedosov_chain(Kind::A),
                crate::sample::to_fedosov_legs(&s.sp, Kind::T, &r.vector_field()).mul(&r.fedosov_function()),
            ];
            for (side, [x, y, z, w, v]) in [(Side::Base, base), (Side::Fedosov, fed)] {
                let v = v.by_degree().into_values().next().unwrap_or_else(|| s.sp.zero());
                cartan_identities(s, side, &x, &y, &z, &w, &v, chk);
            }
        })
    }

    fn cartan_morphism(&self, s: &Arc<Setup>) -> Checker {
        let (t, a) = match (s.fedosov(Kind::T, &[]), s.fedosov(Kind::A, &[])) {
            (Ok(t), Ok(a)) => (t, a),
            (Err(e), _) | (_, Err(e)) => {
                let mut chk = Checker::new();
                chk.truth("perturbation converges", "T/A", false, e);
                return chk;
            }
        };
        self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            let (x, y, w, v) = (r.chain(Kind::T), r.chain(Kind::T), r.chain(Kind::A), r.chain(Kind::A));
            verify_cartan_morphism(s, &t, &a, &x, &y, &w, &v, chk);
            // arity 0: τ̆ is an algebra morphism
            let (f, g) = (r.function(), r.function());
            let lhs = (t.maps.tau)(&f.mul(&g));
            chk.equal("τ(fg) = τf·τg", format!("f={f}; g={g}"), &lhs, &(t.maps.tau)(&f).mul(&(t.maps.tau)(&g)));
        })
    }

    fn nc_calculus(&self, s: &Arc<Setup>) -> Checker {
        let sp = &s.sp;
        let mut chk = Checker::new();
        for side in [Side::Base, Side::Fedosov] {
            let m = dpoly::mult(sp);
            let m = if side == Side::Fedosov { crate::sample::to_fedosov_legs(sp, Kind::D, &m) } else { m };
            chk.zero(&format!("[m,m] = 0 ({})", side.name()), "m", &dpoly::gerstenhaber(sp, side, &m, &m));
        }
        chk.merge(self.per_sample(&|i, chk| {
            let mut r = self.sampler(sp, i);
            let base = [r.chain(Kind::D), r.chain(Kind::D), r.chain(Kind::D), r.chain(Kind::C)];
            let fed = [
                r.fedosov_chain(Kind::D),
                r.fedosov_chain(Kind::D),
                r.fedosov_chain(Kind::D),
                r.fedosov_chain(Kind::C),
            ];
            for (side, [u, v, w, c]) in [(Side::Base, base), (Side::Fedosov, fed)] {
                nc_identities(s, side, &u, &v, &w, &c, chk);
            }
            self.tuple_oracle(s, &mut r, chk);
        }));
        chk
    }

    /// Base-side word operations against the brute-force tuple formulas.
    fn tuple_oracle(&self, s: &Arc<Setup>, r: &mut Sampler, chk: &mut Checker) {
        let sp = &s.sp;
        let n = s.truncation();
        let b = Side::Base;
        let p = r.max_arity.min(sp.slots - 1);
        let a: Vec<Elem> = (0..=p).map(|_| homogeneous_function(r)).collect();
        let c = cpoly::phi(sp, b, &a);
        let input = format!("{a:?}");
        chk.equal("b = b_tuple", &input, &cpoly::hochschild_b(sp, b, &c), &oracle::tuple_b(sp, b, &a));
        chk.equal("B = B_tuple", &input, &cpoly::connes_b(sp, b, &c), &oracle::tuple_connes(sp, b, &a));
        let d = r.chain(Kind::D);
        if dpoly::arity(sp, &d) <= p {
            let cut = n.saturating_sub(symbol_order(sp, &d));
            let input = format!("D={d}; {a:?}");
            let res = cpoly::lie(sp, b, &d, &c).sub(&oracle::tuple_lie(sp, b, &d, &a));
            chk.zero("L_D = L_tuple", &input, &trusted(&res, cut));
            let res = cpoly::iota(sp, b, &d, &c).sub(&oracle::tuple_iota(sp, b, &d, &a));
            chk.zero("ι_D = ι_tuple", &input, &trusted(&res, cut));
        }
    }

    fn nc_morphism(&self, s: &Arc<Setup>) -> Checker {
        let (d, c) = match (s.fedosov(Kind::D, &[]), s.fedosov(Kind::C, &[])) {
            (Ok(d), Ok(c)) => (d, c),
            (Err(e), _) | (_, Err(e)) => {
                let mut chk = Checker::new();
                chk.truth("perturbation converges", "D/C", false, e);
                return chk;
            }
        };
        self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            let (u, v, cc) = (r.chain(Kind::D), r.chain(Kind::D), r.chain(Kind::C));
            verify_nc_morphism(s, &d, &c, &u, &v, &cc, chk);
        })
    }

    fn hopf(&self, s: &Arc<Setup>) -> Checker {
        let (d, c) = match (s.fedosov(Kind::D, &[]), s.fedosov(Kind::C, &[])) {
            (Ok(d), Ok(c)) => (d, c),
            (Err(e), _) | (_, Err(e)) => {
                let mut chk = Checker::new();
                chk.truth("perturbation converges", "D/C", false, e);
                return chk;
            }
        };
        let th = TauHopf { s, d: &d, c: &c };
        let mut chk = Checker::new();
        check_pbw_coalgebra(s, self.model.orders().jet_order, &mut chk);
        chk.merge(self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            let (u, v, f) = (r.u_element(), r.u_element(), r.function());
            th.check_u(&u, &v, &f, chk);
        }));
        chk
    }

    fn groupoid(&self, s: &Arc<Setup>) -> Checker {
        let (d, c) = match (s.fedosov(Kind::D, &[]), s.fedosov(Kind::C, &[])) {
            (Ok(d), Ok(c)) => (d, c),
            (Err(e), _) | (_, Err(e)) => {
                let mut chk = Checker::new();
                chk.truth("perturbation converges", "D/C", false, e);
                return chk;
            }
        };
        let th = TauHopf { s, d: &d, c: &c };
        let mut chk = Checker::new();
        th.check_span(&mut chk);
        chk.merge(self.per_sample(&|i, chk| {
            let mut r = self.sampler(&s.sp, i);
            let (u, v, f) = (r.u_element(), r.u_element(), r.function());
            let (xi, eta) = (r.jet(), r.jet());
            th.check_jets(&xi, &eta, &u, &v, &f, chk);
            // a function of x and y without ξ
            let g = s
                .tau_nat(Kind::T, &r.function())
                .add(&r.fedosov_function().filter(|m| Elem::bigrade_of(&s.sp.ctx, m).0 == 0));
            th.check_conjugation(&u, &v, &g, chk);
        }));
        chk
    }

    fn dg(&self, s: &Arc<Setup>, level: Kind) -> Checker {
        let mut chk = Checker::new();
        let sp = &s.sp;
        let dq = s.fd.dq();
        let sq = dq.commutator(&dq);
        for fam in [Fam::X, Fam::Xi, Fam::Y] {
            for &g in sp.fam(fam) {
                chk.zero("(D + τ̆Q)² = 0", &sp.ctx.gen(g).name, &sq.on_gen(g));
            }
        }
        let vs = self.base_samples(s, level);
        let taus: Vec<Elem> = match s.fedosov(level, &vs) {
            Ok(f) => vs.iter().map(|v| (f.maps.tau)(v)).collect(),
            Err(_) => vec![],
        };
        let c = match s.dg(level, &vs, &taus) {
            Ok(c) => c,
            Err(e) => {
                chk.truth(&format!("{level}: dg perturbation converges"), level, false, e);
                return chk;
            }
        };
        let id = format!("dg {level}");
        chk.merge(self.per_sample(&|i, chk| {
            let mut r = self.sampler(sp, i);
            let v = r.chain(level);
            let w = r.fedosov_chain(level);
            record_contraction(chk, &id, &c.maps, &v, &w);
            let tv = (c.maps.tau)(&v);
            record_contraction(chk, &id, &c.maps, &v, &tv);
            let name = match level {
                Kind::D => "d_V = L_Q + ∂",
                Kind::C => "d_V = L_Q + b",
                _ => "d_V = L_Q",
            };
            chk.equal(&format!("{id}: {name}"), &v, &(c.maps.d_v)(&v), &s.base_dg_differential(level, &v));
        }));
        chk
    }
}

/// Run the contraction relations on one V sample and one W sample and record
/// each relation (pass or fail) under `prefix`.
fn record_contraction(chk: &mut Checker, prefix: &str, c: &crate::hpl::Contraction, v: &Elem, w: &Elem) {
    let fails = check_contraction(c, std::slice::from_ref(v), std::slice::from_ref(w));
    for (rels, input) in [(&V_RELATIONS[..], v), (&W_RELATIONS[..], w)] {
        for rel in rels {
            let id = format!("{prefix}: {rel}");
            let mine: Vec<_> = fails.iter().filter(|f| f.relation == *rel).collect();
            if mine.is_empty() {
                chk.truth(&id, input, true, "");
            }
            for f in mine {
                chk.truth(&id, &f.input, false, &f.residual);
            }
        }
    }
}

fn homogeneous_function(r: &mut Sampler) -> Elem {
    let f = r.function();
    f.by_degree().into_values().next().expect("nonzero function")
}

/// Cartan calculus identities on one side. x, y, z polyvectors, w a form,
/// v an arity-1 polyvector. Comparisons are cut at the weight every term is
/// exact to (each derivative in y can lose one unit).
#[allow(clippy::too_many_arguments)]
fn cartan_identities(s: &Setup, side: Side, x: &Elem, y: &Elem, z: &Elem, w: &Elem, v: &Elem, chk: &mut Checker) {
    let sp = &s.sp;
    let n = s.truncation();
    let cut = |k: u32| n.saturating_sub(k);
    let tag = |id: &str| format!("{id} ({})", side.name());
    let eq = |chk: &mut Checker, id: &str, input: &str, lhs: &Elem, rhs: &Elem, k: u32| {
        chk.zero(&tag(id), input, &trusted(&lhs.sub(rhs), cut(k)));
    };
    let d = ta::algebroid_d(sp, side);
    let (dx, dy) = (x.hdeg(), y.hdeg());
    let input = format!("X={x}; Y={y}; ω={w}");
    // brick: L_X = [ι_X, d], so d∘L_X = (−1)^{|X|+1} L_X∘d
    let lhs = d.apply(&ta::lie(sp, side, x, w));
    let rhs = sign(!odd(dx), ta::lie(sp, side, x, &d.apply(w)));
    eq(chk, "brick: [d, L_X] = 0", &input, &lhs, &rhs, 2);
    if !v.is_zero() {
        let vf = ta::chain_to_vf(sp, side, v, v.hdeg() - 1);
        let lhs = ta::lie_field(sp, side, &vf).apply(w);
        eq(chk, "brick: L_V = ι_V d ± d ι_V", &format!("V={v}; ω={w}"), &lhs, &ta::lie(sp, side, v, w), 1);
    }
    // straw: ι_{[X,Y]} = [L_X, ι_Y]
    let lhs = ta::iota(sp, side, &ta::schouten(sp, side, x, y), w);
    let a = ta::lie(sp, side, x, &ta::iota(sp, side, y, w));
    let b = ta::iota(sp, side, y, &ta::lie(sp, side, x, w));
    eq(chk, "straw: ι_[X,Y] = [L_X, ι_Y]", &input, &lhs, &a.sub(&sign(odd((dx - 1) * dy), b)), 1);
    // wood: L_{XY} = (−1)^{|Y|} L_X ι_Y + ι_X L_Y
    let lhs = ta::lie(sp, side, &x.mul(y), w);
    let rhs = sign(odd(dy), ta::lie(sp, side, x, &ta::iota(sp, side, y, w))).add(&ta::iota(sp, side, x, &ta::lie(sp, side, y, w)));
    eq(chk, "wood: L_XY = ±L_X ι_Y + ι_X L_Y", &input, &lhs, &rhs, 1);
    eq(chk, "d² = 0", &input, &d.apply(&d.apply(w)), &sp.zero(), 2);
    let (sx, sy) = (dx - 1, dy - 1);
    let xy = ta::schouten(sp, side, x, y);
    let input = format!("X={x}; Y={y}; Z={z}");
    let lhs = ta::schouten(sp, side, x, &ta::schouten(sp, side, y, z));
    let rhs = ta::schouten(sp, side, &xy, z).add(&sign(odd(sx * sy), ta::schouten(sp, side, y, &ta::schouten(sp, side, x, z))));
    eq(chk, "graded Jacobi", &input, &lhs, &rhs, 2);
    let yx = ta::schouten(sp, side, y, x);
    eq(chk, "graded antisymmetry", &input, &xy, &sign(!odd(sx * sy), yx), 1);
    let lhs = ta::schouten(sp, side, x, &y.mul(z));
    let rhs = xy.mul(z).add(&sign(odd(sx * (sy + 1)), y.mul(&ta::schouten(sp, side, x, z))));
    eq(chk, "Gerstenhaber compatibility", &input, &lhs, &rhs, 1);
}

/// Noncommutative calculus identities on one side: u, v, w D-chains, c a
/// C-chain.
fn nc_identities(s: &Setup, side: Side, u: &Elem, v: &Elem, w: &Elem, c: &Elem, chk: &mut Checker) {
    let sp = &s.sp;
    let n = s.truncation();
    let cut = |k: u32| n.saturating_sub(k);
    let tag = |id: &str| format!("{id} ({})", side.name());
    let (pu, pv, pw, pc) = (dpoly::arity(sp, u), dpoly::arity(sp, v), dpoly::arity(sp, w), cpoly::arity(sp, c));
    let ou = symbol_order(sp, u);
    if pu + 1 < sp.slots {
        let du = dpoly::hochschild_d(sp, side, u);
        chk.zero(&tag("∂² = 0"), u, &trusted(&dpoly::hochschild_d(sp, side, &du), cut(ou)));
    }
    if pu + pv + pw <= sp.slots {
        let input = format!("u={u}; v={v}; w={w}");
        let lhs = dpoly::cup(sp, side, &dpoly::cup(sp, side, u, v), w);
        let rhs = dpoly::cup(sp, side, u, &dpoly::cup(sp, side, v, w));
        chk.equal(&tag("cup associativity"), &input, &lhs, &rhs);
    }
    let bc = cpoly::hochschild_b(sp, side, c);
    chk.zero(&tag("b² = 0"), c, &cpoly::hochschild_b(sp, side, &bc));
    chk.equal(&tag("b = L_m"), c, &bc, &cpoly::hochschild_b_faces(sp, side, c));
    if pc + 1 < sp.slots {
        let bb = cpoly::connes_b(sp, side, c);
        chk.zero(&tag("B² = 0"), c, &cpoly::connes_b(sp, side, &bb));
        let comm = cpoly::hochschild_b(sp, side, &bb).add(&cpoly::connes_b(sp, side, &bc));
        chk.zero(&tag("[b, B] = 0"), c, &comm);
    }
}
