//! Polynomial local models: coordinates, connection, homological vector field,
//! and the extended context ("space") carrying every generator family the
//! Fedosov constructions need.

use crate::coeff::Q;
use crate::graded::{Context, Derivation, Elem, GenClass, Generator, GradedError};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model file parse error: {0}")]
    Parse(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("degree mismatch in {entry}: expected {expected}, found {found}")]
    DegreeError { entry: String, expected: i32, found: String },
    #[error("connection has torsion at (k={k}, l={l}, j={j})")]
    TorsionError { k: String, l: String, j: String },
    #[error("Q is not homological, [Q,Q] = {residual}")]
    NotHomological { residual: String },
    #[error(transparent)]
    Graded(#[from] GradedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Orders {
    pub y_order: u32,
    pub jet_order: u32,
    pub max_arity: usize,
}

impl Default for Orders {
    fn default() -> Self {
        Orders {
            y_order: 4,
            jet_order: 3,
            max_arity: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coord {
    pub name: String,
    pub degree: i32,
}

impl Coord {
    pub fn is_base(&self) -> bool {
        self.degree == 0
    }
}

/// Parsed but not yet validated model. Polynomials live in the coordinate
/// context `ctx_m` (no truncation).
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub coords: Vec<Coord>,
    pub ctx_m: Arc<Context>,
    /// (k, l, j) -> Γ_{k,l}^j
    pub gamma: BTreeMap<(usize, usize, usize), Elem>,
    pub q: Option<Vec<Elem>>,
    pub orders: Orders,
}

#[derive(Deserialize)]
struct RawFile {
    context: RawContext,
    #[serde(default)]
    connection: BTreeMap<String, String>,
    #[serde(default)]
    q: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct RawContext {
    #[serde(default)]
    base: Vec<String>,
    #[serde(default)]
    graded: Vec<RawGraded>,
    #[serde(default)]
    truncation: Option<RawOrders>,
}

#[derive(Deserialize)]
struct RawGraded {
    name: String,
    degree: i32,
}

#[derive(Deserialize)]
struct RawOrders {
    y_order: Option<u32>,
    jet_order: Option<u32>,
    max_arity: Option<usize>,
}

pub fn coordinate_context(coords: &[Coord]) -> Result<Arc<Context>, GradedError> {
    let gens = coords
        .iter()
        .map(|c| {
            let class = if c.is_base() { GenClass::Base } else { GenClass::Graded };
            Generator {
                name: c.name.clone(),
                class,
                degree: c.degree,
                weight: 0,
                pair: None,
            }
        })
        .collect();
    Context::new(gens, u32::MAX)
}

impl ModelSpec {
    pub fn new(coords: Vec<Coord>, orders: Orders) -> Result<ModelSpec, ModelError> {
        let ctx_m = coordinate_context(&coords)?;
        Ok(ModelSpec {
            coords,
            ctx_m,
            gamma: BTreeMap::new(),
            q: None,
            orders,
        })
    }

    pub fn coord_index(&self, key: &str) -> Result<usize, ModelError> {
        if let Some(i) = self.coords.iter().position(|c| c.name == key) {
            return Ok(i);
        }
        match key.parse::<usize>() {
            Ok(n) if n >= 1 && n <= self.coords.len() => Ok(n - 1),
            _ => Err(ModelError::UnknownCoordinate(key.to_string())),
        }
    }

    pub fn set_gamma(&mut self, k: usize, l: usize, j: usize, text: &str) -> Result<(), ModelError> {
        let e = Elem::parse(&self.ctx_m, text)?;
        if !e.is_zero() {
            self.gamma.insert((k, l, j), e);
        }
        Ok(())
    }

    pub fn set_q(&mut self, j: usize, text: &str) -> Result<(), ModelError> {
        let n = self.coords.len();
        let q = self.q.get_or_insert_with(|| vec![Elem::zero(&self.ctx_m); n]);
        q[j] = Elem::parse(&self.ctx_m, text)?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Q as a derivation of the coordinate algebra.
    pub fn q_derivation(&self) -> Option<Derivation> {
        let q = self.q.as_ref()?;
        Some(Derivation::new(&self.ctx_m, 1, q.iter().cloned().enumerate()))
    }

    /// Canonical model-file text; `load_model(to_text())` reproduces the spec.
    pub fn to_text(&self) -> String {
        let mut s = String::from("[context]\n");
        let base: Vec<String> = self
            .coords
            .iter()
            .filter(|c| c.is_base())
            .map(|c| format!("\"{}\"", c.name))
            .collect();
        let graded: Vec<String> = self
            .coords
            .iter()
            .filter(|c| !c.is_base())
            .map(|c| format!("{{ name = \"{}\", degree = {} }}", c.name, c.degree))
            .collect();
        let _ = writeln!(s, "base = [{}]", base.join(", "));
        let _ = writeln!(s, "graded = [{}]", graded.join(", "));
        let _ = writeln!(
            s,
            "truncation = {{ y_order = {}, jet_order = {}, max_arity = {} }}",
            self.orders.y_order, self.orders.jet_order, self.orders.max_arity
        );
        s.push_str("\n[connection]\n");
        for ((k, l, j), e) in &self.gamma {
            let _ = writeln!(
                s,
                "\"Gamma.{}.{}.{}\" = \"{}\"",
                self.coords[*k].name, self.coords[*l].name, self.coords[*j].name, e
            );
        }
        if let Some(q) = &self.q {
            s.push_str("\n[q]\n");
            for (j, e) in q.iter().enumerate() {
                if !e.is_zero() {
                    let _ = writeln!(s, "\"{}\" = \"{}\"", self.coords[j].name, e);
                }
            }
        }
        s
    }
}

/// Base coordinates come first, graded coordinates after, in file order.
pub fn load_model(text: &str) -> Result<ModelSpec, ModelError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    let mut coords: Vec<Coord> = raw
        .context
        .base
        .iter()
        .map(|n| Coord {
            name: n.clone(),
            degree: 0,
        })
        .collect();
    for g in &raw.context.graded {
        coords.push(Coord {
            name: g.name.clone(),
            degree: g.degree,
        });
    }
    let mut orders = Orders::default();
    if let Some(t) = &raw.context.truncation {
        orders.y_order = t.y_order.unwrap_or(orders.y_order);
        orders.jet_order = t.jet_order.unwrap_or(orders.jet_order);
        orders.max_arity = t.max_arity.unwrap_or(orders.max_arity);
    }
    let mut spec = ModelSpec::new(coords, orders)?;
    for (key, val) in &raw.connection {
        let parts: Vec<&str> = key.split('.').collect();
        if parts.len() != 4 || parts[0] != "Gamma" {
            return Err(ModelError::Parse(format!("bad connection key `{key}`")));
        }
        let k = spec.coord_index(parts[1])?;
        let l = spec.coord_index(parts[2])?;
        let j = spec.coord_index(parts[3])?;
        spec.set_gamma(k, l, j, val)?;
        let expected = spec.coords[j].degree - spec.coords[k].degree - spec.coords[l].degree;
        check_degree(&spec.gamma.get(&(k, l, j)).cloned(), expected, key)?;
    }
    for (key, val) in &raw.q {
        let j = spec.coord_index(key)?;
        spec.set_q(j, val)?;
        let expected = spec.coords[j].degree + 1;
        check_degree(&Some(spec.q.as_ref().unwrap()[j].clone()), expected, &format!("q.{key}"))?;
    }
    Ok(spec)
}

fn check_degree(e: &Option<Elem>, expected: i32, entry: &str) -> Result<(), ModelError> {
    let Some(e) = e else { return Ok(()) };
    if e.is_zero() {
        return Ok(());
    }
    match e.degree() {
        Some(d) if d == expected => Ok(()),
        Some(d) => Err(ModelError::DegreeError {
            entry: entry.to_string(),
            expected,
            found: d.to_string(),
        }),
        None => Err(ModelError::DegreeError {
            entry: entry.to_string(),
            expected,
            found: "inhomogeneous".into(),
        }),
    }
}

/// A validated model.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: ModelSpec,
    pub name: String,
}

pub fn validate(spec: ModelSpec) -> Result<Model, ModelError> {
    let n = spec.dim();
    for ((k, l, j), e) in &spec.gamma {
        let expected = spec.coords[*j].degree - spec.coords[*k].degree - spec.coords[*l].degree;
        check_degree(&Some(e.clone()), expected, &format!("Gamma.{k}.{l}.{j}"))?;
    }
    let zero = Elem::zero(&spec.ctx_m);
    for k in 0..n {
        for l in 0..n {
            for j in 0..n {
                let a = spec.gamma.get(&(k, l, j)).unwrap_or(&zero);
                let b = spec.gamma.get(&(l, k, j)).unwrap_or(&zero);
                let sign = (spec.coords[k].degree * spec.coords[l].degree).rem_euclid(2) == 1;
                let b = if sign { b.neg() } else { b.clone() };
                if *a != b {
                    return Err(ModelError::TorsionError {
                        k: spec.coords[k].name.clone(),
                        l: spec.coords[l].name.clone(),
                        j: spec.coords[j].name.clone(),
                    });
                }
            }
        }
    }
    if let Some(q) = &spec.q {
        for (j, e) in q.iter().enumerate() {
            check_degree(&Some(e.clone()), spec.coords[j].degree + 1, &format!("q.{}", spec.coords[j].name))?;
        }
        let qd = spec.q_derivation().unwrap();
        let qq = qd.commutator(&qd);
        if !qq.is_zero() {
            return Err(ModelError::NotHomological {
                residual: qq.to_string(),
            });
        }
    }
    let name = spec
        .coords
        .iter()
        .map(|c| format!("{}:{}", c.name, c.degree))
        .collect::<Vec<_>>()
        .join(",");
    Ok(Model { spec, name })
}

impl Model {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn orders(&self) -> Orders {
        self.spec.orders
    }

    pub fn has_q(&self) -> bool {
        self.spec.q.as_ref().is_some_and(|q| q.iter().any(|e| !e.is_zero()))
    }

    pub fn is_flat(&self) -> bool {
        self.spec.gamma.is_empty()
    }

    /// Stable content hash of the canonical model text.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.spec.to_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn with_orders(&self, orders: Orders) -> Model {
        let mut m = self.clone();
        m.spec.orders = orders;
        m
    }
}

/// Generator families of the extended context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fam {
    X,
    Xi,
    Y,
    /// shifted vector legs s⁻¹∂/∂x, s⁻¹∂/∂y
    PsiX,
    PsiY,
    /// shifted form legs s(dx), s(dy)
    DxL,
    DyL,
    /// symmetric-tensor legs for S(T_M), S(F)
    SymX,
    SymY,
    /// auxiliary derivative symbols (coproduct splitting)
    AuxX,
    AuxY,
    /// D-chain symbols of a slot
    DsX(usize),
    DsY(usize),
    /// C-chain jet variables of a slot
    JetX(usize),
    JetY(usize),
    /// copies of the coordinates (slot 0 included)
    CopyX(usize),
    CopyY(usize),
    /// tensor legs: vector and covector of a slot
    VecX(usize),
    VecY(usize),
    CovX(usize),
    CovY(usize),
}

/// Which manifold a poly-space object lives on: the base M (coordinates x)
/// or the Fedosov algebroid F (fiber coordinates y, with x and ξ as
/// parameters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Side {
    Base,
    Fedosov,
}

impl Side {
    pub fn var(self) -> Fam {
        match self {
            Side::Base => Fam::X,
            Side::Fedosov => Fam::Y,
        }
    }
    pub fn psi(self) -> Fam {
        match self {
            Side::Base => Fam::PsiX,
            Side::Fedosov => Fam::PsiY,
        }
    }
    pub fn dl(self) -> Fam {
        match self {
            Side::Base => Fam::DxL,
            Side::Fedosov => Fam::DyL,
        }
    }
    pub fn sym(self) -> Fam {
        match self {
            Side::Base => Fam::SymX,
            Side::Fedosov => Fam::SymY,
        }
    }
    pub fn aux(self) -> Fam {
        match self {
            Side::Base => Fam::AuxX,
            Side::Fedosov => Fam::AuxY,
        }
    }
    pub fn ds(self, a: usize) -> Fam {
        match self {
            Side::Base => Fam::DsX(a),
            Side::Fedosov => Fam::DsY(a),
        }
    }
    pub fn jet(self, a: usize) -> Fam {
        match self {
            Side::Base => Fam::JetX(a),
            Side::Fedosov => Fam::JetY(a),
        }
    }
    pub fn copy(self, a: usize) -> Fam {
        match self {
            Side::Base => Fam::CopyX(a),
            Side::Fedosov => Fam::CopyY(a),
        }
    }
    pub fn vec(self, a: usize) -> Fam {
        match self {
            Side::Base => Fam::VecX(a),
            Side::Fedosov => Fam::VecY(a),
        }
    }
    pub fn cov(self, a: usize) -> Fam {
        match self {
            Side::Base => Fam::CovX(a),
            Side::Fedosov => Fam::CovY(a),
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Side::Base => "base",
            Side::Fedosov => "fedosov",
        }
    }
}

/// The extended context of a model at a given truncation, with index tables.
#[derive(Debug)]
pub struct Space {
    pub model: Model,
    pub ctx: Arc<Context>,
    pub n: usize,
    pub slots: usize,
    pub degs: Vec<i32>,
    fams: BTreeMap<Fam, Vec<usize>>,
    s_marker: Vec<usize>,
    t_marker: Vec<usize>,
    /// model data re-homed in the extended context
    pub gamma: BTreeMap<(usize, usize, usize), Elem>,
    pub q: Option<Vec<Elem>>,
}

impl Space {
    pub fn new(model: &Model, truncation: u32, slots: usize) -> Arc<Space> {
        let coords = &model.spec.coords;
        let n = coords.len();
        let degs: Vec<i32> = coords.iter().map(|c| c.degree).collect();
        let mut gens: Vec<Generator> = Vec::new();
        let mut fams: BTreeMap<Fam, Vec<usize>> = BTreeMap::new();
        let leg = |name: String, degree: i32, weight: u32| Generator {
            name,
            class: GenClass::Leg,
            degree,
            weight,
            pair: None,
        };
        let mut push_fam = |gens: &mut Vec<Generator>, fam: Fam, mk: &dyn Fn(usize) -> Generator| {
            let mut idx = Vec::with_capacity(n);
            for i in 0..n {
                idx.push(gens.len());
                gens.push(mk(i));
            }
            fams.insert(fam, idx);
        };
        let nm = |i: usize| coords[i].name.clone();
        let xw = |i: usize| if degs[i] == 0 { 0 } else { 1 };
        push_fam(&mut gens, Fam::X, &|i| Generator {
            name: nm(i),
            class: if degs[i] == 0 { GenClass::Base } else { GenClass::Graded },
            degree: degs[i],
            weight: xw(i),
            pair: None,
        });
        push_fam(&mut gens, Fam::Xi, &|i| Generator {
            name: format!("xi_{}", nm(i)),
            class: GenClass::Form,
            degree: degs[i] + 1,
            weight: 1,
            pair: Some(i),
        });
        push_fam(&mut gens, Fam::Y, &|i| Generator {
            name: format!("y_{}", nm(i)),
            class: GenClass::Fiber,
            degree: degs[i],
            weight: 1,
            pair: Some(i),
        });
        push_fam(&mut gens, Fam::PsiX, &|i| leg(format!("px_{}", nm(i)), 1 - degs[i], 0));
        push_fam(&mut gens, Fam::PsiY, &|i| leg(format!("py_{}", nm(i)), 1 - degs[i], 0));
        push_fam(&mut gens, Fam::DxL, &|i| leg(format!("ex_{}", nm(i)), degs[i] - 1, 0));
        push_fam(&mut gens, Fam::DyL, &|i| leg(format!("ey_{}", nm(i)), degs[i] - 1, 0));
        push_fam(&mut gens, Fam::SymX, &|i| leg(format!("Sx_{}", nm(i)), -degs[i], 0));
        push_fam(&mut gens, Fam::SymY, &|i| leg(format!("Sy_{}", nm(i)), -degs[i], 0));
        push_fam(&mut gens, Fam::AuxX, &|i| leg(format!("Ax_{}", nm(i)), -degs[i], 0));
        push_fam(&mut gens, Fam::AuxY, &|i| leg(format!("Ay_{}", nm(i)), -degs[i], 0));
        push_fam(&mut gens, Fam::CopyX(0), &|i| leg(format!("X0_{}", nm(i)), degs[i], xw(i)));
        push_fam(&mut gens, Fam::CopyY(0), &|i| leg(format!("Y0_{}", nm(i)), degs[i], 1));
        let mut s_marker = vec![usize::MAX];
        let mut t_marker = vec![usize::MAX];
        for a in 1..=slots {
            s_marker.push(gens.len());
            gens.push(leg(format!("s{a}"), 1, 0));
            push_fam(&mut gens, Fam::DsX(a), &|i| leg(format!("Dx{a}_{}", nm(i)), -degs[i], 0));
            push_fam(&mut gens, Fam::DsY(a), &|i| leg(format!("Dy{a}_{}", nm(i)), -degs[i], 0));
            t_marker.push(gens.len());
            gens.push(leg(format!("t{a}"), -1, 0));
            push_fam(&mut gens, Fam::JetX(a), &|i| leg(format!("zx{a}_{}", nm(i)), degs[i], 1));
            push_fam(&mut gens, Fam::JetY(a), &|i| leg(format!("zy{a}_{}", nm(i)), degs[i], 1));
            push_fam(&mut gens, Fam::CopyX(a), &|i| leg(format!("X{a}_{}", nm(i)), degs[i], xw(i)));
            push_fam(&mut gens, Fam::CopyY(a), &|i| leg(format!("Y{a}_{}", nm(i)), degs[i], 1));
            push_fam(&mut gens, Fam::VecX(a), &|i| leg(format!("Vx{a}_{}", nm(i)), -degs[i], 0));
            push_fam(&mut gens, Fam::VecY(a), &|i| leg(format!("Vy{a}_{}", nm(i)), -degs[i], 0));
            push_fam(&mut gens, Fam::CovX(a), &|i| leg(format!("Cx{a}_{}", nm(i)), degs[i], 0));
            push_fam(&mut gens, Fam::CovY(a), &|i| leg(format!("Cy{a}_{}", nm(i)), degs[i], 0));
        }
        let ctx = Context::new(gens, truncation).expect("extended context");
        let gamma = model
            .spec
            .gamma
            .iter()
            .map(|(k, e)| (*k, e.transfer(&ctx).expect("gamma transfer")))
            .filter(|(_, e)| !e.is_zero())
            .collect();
        let q = model
            .spec
            .q
            .as_ref()
            .map(|q| q.iter().map(|e| e.transfer(&ctx).expect("q transfer")).collect());
        Arc::new(Space {
            model: model.clone(),
            ctx,
            n,
            slots,
            degs,
            fams,
            s_marker,
            t_marker,
            gamma,
            q,
        })
    }

    pub fn idx(&self, f: Fam, i: usize) -> usize {
        self.fams[&f][i]
    }

    pub fn fam(&self, f: Fam) -> &[usize] {
        &self.fams[&f]
    }

    /// Position of generator `g` inside family `f`, if it belongs to it.
    pub fn pos_in(&self, f: Fam, g: usize) -> Option<usize> {
        let v = &self.fams[&f];
        let first = *v.first()?;
        (g >= first && g < first + v.len()).then(|| g - first)
    }

    pub fn in_fam(&self, f: Fam, g: usize) -> bool {
        self.pos_in(f, g).is_some()
    }

    pub fn g(&self, f: Fam, i: usize) -> Elem {
        Elem::gen(&self.ctx, self.idx(f, i))
    }

    pub fn s(&self, a: usize) -> usize {
        self.s_marker[a]
    }

    pub fn t(&self, a: usize) -> usize {
        self.t_marker[a]
    }

    pub fn zero(&self) -> Elem {
        Elem::zero(&self.ctx)
    }

    pub fn one(&self) -> Elem {
        Elem::one(&self.ctx)
    }

    pub fn c(&self, q: Q) -> Elem {
        Elem::constant(&self.ctx, q)
    }

    pub fn parse(&self, text: &str) -> Elem {
        Elem::parse(&self.ctx, text).unwrap_or_else(|e| panic!("parse `{text}`: {e}"))
    }

    pub fn truncation(&self) -> u32 {
        self.ctx.truncation()
    }

    /// Which family (and index within it) a generator belongs to.
    pub fn family_of(&self, g: usize) -> Option<(Fam, usize)> {
        for (f, v) in &self.fams {
            if let Ok(i) = v.binary_search(&g) {
                return Some((*f, i));
            }
        }
        None
    }

    pub fn gamma(&self, k: usize, l: usize, j: usize) -> Elem {
        self.gamma.get(&(k, l, j)).cloned().unwrap_or_else(|| self.zero())
    }

    /// ∇_{∂/∂x_k} on the coordinate, fiber and covector-type leg generators:
    /// ∂/∂x_k − Σ (−1)^{|y_l|+|y_l||y_j|} Γ_{k,l}^j y_l ∂/∂y_j, with the same
    /// Christoffel action on the unshifted covector legs.
    pub fn nabla(&self, k: usize) -> Derivation {
        let mut d = Derivation::partial(&self.ctx, self.idx(Fam::X, k));
        let mut legs: Vec<(Fam, Fam)> = vec![(Fam::Y, Fam::Y)];
        for a in 1..=self.slots {
            legs.push((Fam::CovY(a), Fam::CovY(a)));
        }
        for (src, dst) in legs {
            for j in 0..self.n {
                let mut c = self.zero();
                for l in 0..self.n {
                    let g = self.gamma(k, l, j);
                    if g.is_zero() {
                        continue;
                    }
                    let (yl, yj) = (self.degs[l], self.degs[j]);
                    let sign = (yl + yl * yj).rem_euclid(2) == 1;
                    let term = g.mul(&self.g(src, l));
                    c = if sign { c.add(&term) } else { c.sub(&term) };
                }
                d.add_component(self.idx(dst, j), &c);
            }
        }
        d
    }
}

/// The four reference models of the acceptance configuration.
pub mod reference {
    use super::*;

    pub const FLAT_R2: &str = r#"
[context]
base = ["x1", "x2"]
truncation = { y_order = 4, jet_order = 3, max_arity = 2 }
"#;

    pub const CURVED_R1: &str = r#"
[context]
base = ["x"]
truncation = { y_order = 4, jet_order = 3, max_arity = 2 }

[connection]
"Gamma.x.x.x" = "x"
"#;

    pub const ODD_LINE: &str = r#"
[context]
base = ["x"]
graded = [{ name = "th", degree = 1 }]
truncation = { y_order = 4, jet_order = 3, max_arity = 2 }
"#;

    pub const DERHAM_LINE: &str = r#"
[context]
base = ["x"]
graded = [{ name = "th", degree = 1 }]
truncation = { y_order = 4, jet_order = 3, max_arity = 2 }

[q]
"x" = "th"
"#;

    pub fn all() -> Vec<(&'static str, Model)> {
        [
            ("flat-r2", FLAT_R2),
            ("curved-r1", CURVED_R1),
            ("odd-line", ODD_LINE),
            ("derham-line", DERHAM_LINE),
        ]
        .into_iter()
        .map(|(n, t)| {
            let mut m = validate(load_model(t).expect("reference model parses")).expect("reference model valid");
            m.name = n.to_string();
            (n, m)
        })
        .collect()
    }

    pub fn get(name: &str) -> Model {
        all()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, m)| m)
            .unwrap_or_else(|| panic!("no reference model {name}"))
    }
}
