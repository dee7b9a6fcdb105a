//! Graded-commutative polynomial algebra over ℚ with Koszul signs.
//!
//! Monomials are sparse exponent lists sorted by generator index; the
//! normal form of a product is the product of generators in context order.
//! Every generator carries a weight, and elements never hold monomials whose
//! total weight exceeds the context truncation.

use crate::coeff::Q;
use smallvec::SmallVec;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenClass {
    Base,
    Graded,
    Form,
    Fiber,
    Leg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub class: GenClass,
    pub degree: i32,
    pub weight: u32,
    /// index of the paired coordinate for FORM/FIBER generators
    pub pair: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("elements live in different contexts")]
    ContextMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("duplicate generator `{0}`")]
    Duplicate(String),
    #[error("generator `{0}` has an invalid pairing")]
    BadPairing(String),
}

#[derive(Debug)]
pub struct Context {
    gens: Vec<Generator>,
    odd: Vec<bool>,
    index: HashMap<String, usize>,
    truncation: u32,
}

pub type Mono = SmallVec<[(u16, u16); 6]>;

impl Context {
    pub fn new(gens: Vec<Generator>, truncation: u32) -> Result<Arc<Context>, GradedError> {
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.name.clone(), i).is_some() {
                return Err(GradedError::Duplicate(g.name.clone()));
            }
        }
        for g in &gens {
            match g.class {
                GenClass::Form | GenClass::Fiber => {
                    let p = g.pair.ok_or_else(|| GradedError::BadPairing(g.name.clone()))?;
                    let base = gens.get(p).ok_or_else(|| GradedError::BadPairing(g.name.clone()))?;
                    let shift = if g.class == GenClass::Form { 1 } else { 0 };
                    if !matches!(base.class, GenClass::Base | GenClass::Graded)
                        || g.degree != base.degree + shift
                    {
                        return Err(GradedError::BadPairing(g.name.clone()));
                    }
                }
                GenClass::Base if g.degree != 0 => {
                    return Err(GradedError::BadPairing(g.name.clone()))
                }
                _ => {}
            }
        }
        assert!(gens.len() < u16::MAX as usize);
        let odd = gens.iter().map(|g| g.degree.rem_euclid(2) == 1).collect();
        Ok(Arc::new(Context {
            gens,
            odd,
            index,
            truncation,
        }))
    }

    /// Default weight: BASE 0, LEG 0, every other class 1.
    pub fn default_weight(class: GenClass) -> u32 {
        match class {
            GenClass::Base | GenClass::Leg => 0,
            _ => 1,
        }
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn gen(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn mono_weight(&self, m: &Mono) -> u32 {
        m.iter()
            .map(|&(g, e)| self.gens[g as usize].weight * e as u32)
            .sum()
    }

    pub fn mono_degree(&self, m: &Mono) -> i32 {
        m.iter()
            .map(|&(g, e)| self.gens[g as usize].degree * e as i32)
            .sum()
    }

    pub fn mono_odd(&self, m: &Mono) -> bool {
        m.iter()
            .filter(|&&(g, e)| self.odd[g as usize] && e % 2 == 1)
            .count()
            % 2
            == 1
    }

    /// Product of two normal-form monomials: `None` if an odd generator
    /// repeats, else (negate?, monomial).
    pub fn mono_mul(&self, a: &Mono, b: &Mono) -> Option<(bool, Mono)> {
        let odd_a: usize = a.iter().filter(|&&(g, _)| self.odd[g as usize]).count();
        let mut seen_a = 0usize;
        let mut sign = false;
        let mut out = Mono::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                if self.odd[a[i].0 as usize] {
                    seen_a += 1;
                }
                out.push(a[i]);
                i += 1;
            } else if take_b {
                if self.odd[b[j].0 as usize] && (odd_a - seen_a) % 2 == 1 {
                    sign = !sign;
                }
                out.push(b[j]);
                j += 1;
            } else {
                let g = a[i].0;
                if self.odd[g as usize] {
                    return None;
                }
                out.push((g, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        Some((sign, out))
    }
}

/// Element of the graded-commutative algebra of a context.
#[derive(Clone)]
pub struct Elem {
    ctx: Arc<Context>,
    terms: BTreeMap<Mono, Q>,
}

impl PartialEq for Elem {
    fn eq(&self, o: &Elem) -> bool {
        Arc::ptr_eq(&self.ctx, &o.ctx) && self.terms == o.terms
    }
}
impl Eq for Elem {}

impl Elem {
    pub fn zero(ctx: &Arc<Context>) -> Elem {
        Elem {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<Context>, c: Q) -> Elem {
        let mut e = Elem::zero(ctx);
        if !c.is_zero() {
            e.terms.insert(Mono::new(), c);
        }
        e
    }

    pub fn one(ctx: &Arc<Context>) -> Elem {
        Elem::constant(ctx, Q::ONE)
    }

    pub fn gen(ctx: &Arc<Context>, i: usize) -> Elem {
        Elem::monomial(ctx, smallvec::smallvec![(i as u16, 1)], Q::ONE)
    }

    pub fn named(ctx: &Arc<Context>, name: &str) -> Result<Elem, GradedError> {
        let i = ctx
            .lookup(name)
            .ok_or_else(|| GradedError::UnknownGenerator(name.to_string()))?;
        Ok(Elem::gen(ctx, i))
    }

    /// A single term; the monomial must already be in normal form.
    pub fn monomial(ctx: &Arc<Context>, m: Mono, c: Q) -> Elem {
        let mut e = Elem::zero(ctx);
        if !c.is_zero() && ctx.mono_weight(&m) <= ctx.truncation {
            e.terms.insert(m, c);
        }
        e
    }

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn same_ctx(&self, o: &Elem) -> Result<(), GradedError> {
        if Arc::ptr_eq(&self.ctx, &o.ctx) {
            Ok(())
        } else {
            Err(GradedError::ContextMismatch)
        }
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() || self.ctx.mono_weight(&m) > self.ctx.truncation {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign(&mut self, o: &Elem) {
        debug_assert!(Arc::ptr_eq(&self.ctx, &o.ctx));
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, o: &Elem, s: &Q) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        let mut r = self.clone();
        r.add_scaled(o, &Q::int(-1));
        r
    }

    pub fn neg(&self) -> Elem {
        self.scale(&Q::int(-1))
    }

    pub fn scale(&self, s: &Q) -> Elem {
        if s.is_zero() {
            return Elem::zero(&self.ctx);
        }
        Elem {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        debug_assert!(Arc::ptr_eq(&self.ctx, &o.ctx), "context mismatch");
        let ctx = &self.ctx;
        let mut r = Elem::zero(ctx);
        if self.is_zero() || o.is_zero() {
            return r;
        }
        let tr = ctx.truncation;
        let wo: Vec<(u32, &Mono, &Q)> = o.terms.iter().map(|(m, c)| (ctx.mono_weight(m), m, c)).collect();
        for (ma, ca) in &self.terms {
            let wa = ctx.mono_weight(ma);
            for &(wb, mb, cb) in &wo {
                if wa + wb > tr {
                    continue;
                }
                if let Some((neg, m)) = ctx.mono_mul(ma, mb) {
                    r.add_term(m, (ca * cb).signed(neg));
                }
            }
        }
        r
    }

    pub fn try_mul(&self, o: &Elem) -> Result<Elem, GradedError> {
        self.same_ctx(o)?;
        Ok(self.mul(o))
    }

    pub fn pow(&self, n: u32) -> Elem {
        let mut r = Elem::one(&self.ctx);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Degree if homogeneous (zero counts as homogeneous of any degree: `None`).
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|m| self.ctx.mono_degree(m));
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Degree of a homogeneous element; panics on inhomogeneous input, 0 for zero.
    pub fn hdeg(&self) -> i32 {
        let mut it = self.terms.keys().map(|m| self.ctx.mono_degree(m));
        let Some(d) = it.next() else { return 0 };
        assert!(it.all(|e| e == d), "inhomogeneous element {self}");
        d
    }

    /// Split into homogeneous components by degree.
    pub fn by_degree(&self) -> BTreeMap<i32, Elem> {
        let mut out: BTreeMap<i32, Elem> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(self.ctx.mono_degree(m))
                .or_insert_with(|| Elem::zero(&self.ctx))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&Mono) -> bool) -> Elem {
        Elem {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Mono, &Q) -> Option<(Mono, Q)>) -> Elem {
        let mut r = Elem::zero(&self.ctx);
        for (m, c) in &self.terms {
            if let Some((m2, c2)) = f(m, c) {
                r.add_term(m2, c2);
            }
        }
        r
    }

    pub fn truncate(&self, n: u32) -> Elem {
        let ctx = self.ctx.clone();
        self.filter(|m| ctx.mono_weight(m) <= n)
    }

    /// Exponent of generator `g` in a monomial.
    pub fn exp_of(m: &Mono, g: usize) -> u16 {
        m.iter()
            .find(|&&(h, _)| h as usize == g)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// (r, q): total FORM exponent and total FIBER exponent.
    pub fn bigrade_of(ctx: &Context, m: &Mono) -> (u32, u32) {
        let mut r = 0;
        let mut q = 0;
        for &(g, e) in m {
            match ctx.gens[g as usize].class {
                GenClass::Form => r += e as u32,
                GenClass::Fiber => q += e as u32,
                _ => {}
            }
        }
        (r, q)
    }

    pub fn bigrade_project(&self, r: u32, q: u32) -> Elem {
        let ctx = self.ctx.clone();
        self.filter(|m| Elem::bigrade_of(&ctx, m) == (r, q))
    }

    /// Left derivative with respect to generator `g`.
    pub fn deriv(&self, g: usize) -> Elem {
        let ctx = self.ctx.clone();
        let gi = g as u16;
        let g_odd = ctx.odd[g];
        let mut r = Elem::zero(&ctx);
        for (m, c) in &self.terms {
            let Some(pos) = m.iter().position(|&(h, _)| h == gi) else {
                continue;
            };
            let e = m[pos].1;
            let mut neg = false;
            if g_odd {
                let before = m[..pos]
                    .iter()
                    .filter(|&&(h, x)| ctx.odd[h as usize] && x % 2 == 1)
                    .count();
                neg = before % 2 == 1;
            }
            let mut m2 = m.clone();
            if e == 1 {
                m2.remove(pos);
            } else {
                m2[pos].1 = e - 1;
            }
            r.add_term(m2, (c * &Q::int(e as i64)).signed(neg));
        }
        r
    }

    /// Algebra homomorphism determined by generator images; unmapped
    /// generators are kept. Images must have the parity of their generator.
    pub fn substitute(&self, image: &dyn Fn(usize) -> Option<Elem>) -> Elem {
        self.substitute_into(&self.ctx.clone(), &|g| image(g))
    }

    /// Algebra homomorphism into another context; every generator occurring
    /// must have an image.
    pub fn substitute_into(&self, target: &Arc<Context>, image: &dyn Fn(usize) -> Option<Elem>) -> Elem {
        let same = Arc::ptr_eq(target, &self.ctx);
        let mut cache: HashMap<usize, Option<Elem>> = HashMap::new();
        let mut r = Elem::zero(target);
        for (m, c) in &self.terms {
            let mut acc = Elem::constant(target, c.clone());
            for &(g, e) in m {
                let img = cache.entry(g as usize).or_insert_with(|| image(g as usize));
                let factor = match img {
                    Some(x) => x.clone(),
                    None if same => Elem::gen(target, g as usize),
                    None => panic!("no image for generator {}", self.ctx.gens[g as usize].name),
                };
                for _ in 0..e {
                    acc = acc.mul(&factor);
                }
                if acc.is_zero() {
                    break;
                }
            }
            r.add_assign(&acc);
        }
        r
    }

    /// Re-home into another context by generator name.
    pub fn transfer(&self, target: &Arc<Context>) -> Result<Elem, GradedError> {
        let mut map = Vec::with_capacity(self.ctx.len());
        for g in &self.ctx.gens {
            map.push(target.lookup(&g.name));
        }
        let mut r = Elem::zero(target);
        for (m, c) in &self.terms {
            let mut m2: Vec<(u16, u16)> = Vec::with_capacity(m.len());
            for &(g, e) in m {
                let t = map[g as usize]
                    .ok_or_else(|| GradedError::UnknownGenerator(self.ctx.gens[g as usize].name.clone()))?;
                m2.push((t as u16, e));
            }
            // re-sort with Koszul sign
            let mut acc = Elem::constant(target, c.clone());
            for (g, e) in m2 {
                acc = acc.mul(&Elem::monomial(target, smallvec::smallvec![(g, e)], Q::ONE));
            }
            r.add_assign(&acc);
        }
        Ok(r)
    }

    /// Group as Σ c_S·S where S ranges over monomials in the selected
    /// generators and c_S is free of them.
    pub fn collect_right(&self, sel: &dyn Fn(usize) -> bool) -> BTreeMap<Mono, Elem> {
        let ctx = &self.ctx;
        let mut out: BTreeMap<Mono, Elem> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = Mono::new();
            let mut picked = Mono::new();
            // odd parity of selected factors seen so far
            let mut sel_odd = false;
            let mut neg = false;
            for &(g, e) in m {
                let odd = ctx.odd[g as usize] && e % 2 == 1;
                if sel(g as usize) {
                    picked.push((g, e));
                    sel_odd ^= odd;
                } else {
                    rest.push((g, e));
                    if odd && sel_odd {
                        neg = !neg;
                    }
                }
            }
            out.entry(picked)
                .or_insert_with(|| Elem::zero(ctx))
                .add_term(rest, c.clone().signed(neg));
        }
        out
    }

    /// Group as Σ S·c_S (selected factors on the left).
    pub fn collect_left(&self, sel: &dyn Fn(usize) -> bool) -> BTreeMap<Mono, Elem> {
        let ctx = &self.ctx;
        let mut out: BTreeMap<Mono, Elem> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = Mono::new();
            let mut picked = Mono::new();
            let mut rest_odd = false;
            let mut neg = false;
            for &(g, e) in m {
                let odd = ctx.odd[g as usize] && e % 2 == 1;
                if sel(g as usize) {
                    picked.push((g, e));
                    if odd && rest_odd {
                        neg = !neg;
                    }
                } else {
                    rest.push((g, e));
                    rest_odd ^= odd;
                }
            }
            out.entry(picked)
                .or_insert_with(|| Elem::zero(ctx))
                .add_term(rest, c.clone().signed(neg));
        }
        out
    }

    /// Generators occurring in the element.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|&(g, _)| g as usize))
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn parse(ctx: &Arc<Context>, text: &str) -> Result<Elem, GradedError> {
        let mut p = Parser::new(ctx, text);
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut first = true;
            if !a.is_one() || m.is_empty() {
                write!(f, "{a}")?;
                first = false;
            }
            for &(g, e) in m {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", self.ctx.gens[g as usize].name)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem({self})")
    }
}

/// Σ coefficient · ∂/∂generator, acting by left derivatives.
#[derive(Clone)]
pub struct Derivation {
    ctx: Arc<Context>,
    degree: i32,
    terms: BTreeMap<usize, Elem>,
}

impl PartialEq for Derivation {
    fn eq(&self, o: &Derivation) -> bool {
        Arc::ptr_eq(&self.ctx, &o.ctx) && self.terms == o.terms && (self.is_zero() || self.degree == o.degree)
    }
}
impl Eq for Derivation {}

impl Derivation {
    pub fn zero(ctx: &Arc<Context>, degree: i32) -> Derivation {
        Derivation {
            ctx: ctx.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Build from (generator, coefficient) pairs; the degree is checked
    /// against every nonzero homogeneous component.
    pub fn new(ctx: &Arc<Context>, degree: i32, terms: impl IntoIterator<Item = (usize, Elem)>) -> Derivation {
        let mut d = Derivation::zero(ctx, degree);
        for (g, c) in terms {
            d.add_component(g, &c);
        }
        d
    }

    pub fn partial(ctx: &Arc<Context>, g: usize) -> Derivation {
        Derivation::new(ctx, -ctx.gen(g).degree, [(g, Elem::one(ctx))])
    }

    pub fn add_component(&mut self, g: usize, c: &Elem) {
        if c.is_zero() {
            return;
        }
        for (m, _) in c.terms() {
            assert_eq!(
                self.ctx.mono_degree(m) - self.ctx.gen(g).degree,
                self.degree,
                "derivation degree mismatch on {}",
                self.ctx.gen(g).name
            );
        }
        let slot = self.terms.entry(g).or_insert_with(|| Elem::zero(&self.ctx));
        slot.add_assign(c);
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn ctx(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &Elem)> {
        self.terms.iter().map(|(g, c)| (*g, c))
    }

    /// D(x_g)
    pub fn on_gen(&self, g: usize) -> Elem {
        self.terms.get(&g).cloned().unwrap_or_else(|| Elem::zero(&self.ctx))
    }

    pub fn apply(&self, e: &Elem) -> Elem {
        debug_assert!(Arc::ptr_eq(&self.ctx, e.ctx()));
        let mut r = Elem::zero(&self.ctx);
        let supp = e.support();
        for (g, c) in &self.terms {
            if supp.binary_search(g).is_err() {
                continue;
            }
            let d = e.deriv(*g);
            if !d.is_zero() {
                r.add_assign(&c.mul(&d));
            }
        }
        r
    }

    pub fn add(&self, o: &Derivation) -> Derivation {
        assert!(
            self.is_zero() || o.is_zero() || self.degree == o.degree,
            "adding derivations of different degree"
        );
        let mut r = if self.is_zero() { o.clone() } else { self.clone() };
        let other = if self.is_zero() { self } else { o };
        for (g, c) in &other.terms {
            r.add_component(*g, c);
        }
        r
    }

    pub fn neg(&self) -> Derivation {
        self.scale(&Q::int(-1))
    }

    pub fn scale(&self, s: &Q) -> Derivation {
        Derivation::new(&self.ctx, self.degree, self.terms.iter().map(|(g, c)| (*g, c.scale(s))))
    }

    /// Left multiplication f·D.
    pub fn lmul(&self, f: &Elem) -> Derivation {
        let fd = f.hdeg();
        Derivation::new(&self.ctx, fd + self.degree, self.terms.iter().map(|(g, c)| (*g, f.mul(c))))
    }

    pub fn commutator(&self, o: &Derivation) -> Derivation {
        let deg = self.degree + o.degree;
        let neg = (self.degree * o.degree).rem_euclid(2) == 1;
        let mut gens: Vec<usize> = self.terms.keys().chain(o.terms.keys()).copied().collect();
        gens.sort_unstable();
        gens.dedup();
        let mut r = Derivation::zero(&self.ctx, deg);
        for g in gens {
            let mut c = self.apply(&o.on_gen(g));
            let back = o.apply(&self.on_gen(g));
            if neg {
                c.add_assign(&back);
            } else {
                c = c.sub(&back);
            }
            r.add_component(g, &c);
        }
        r
    }

    pub fn parse(ctx: &Arc<Context>, text: &str) -> Result<Derivation, GradedError> {
        let mut p = Parser::new(ctx, text);
        let terms = p.derivation()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("trailing input"));
        }
        let mut deg = None;
        for (g, c) in &terms {
            if let Some(d) = c.degree() {
                let dd = d - ctx.gen(*g).degree;
                if *deg.get_or_insert(dd) != dd {
                    return Err(p.err("inhomogeneous derivation"));
                }
            }
        }
        let mut d = Derivation::zero(ctx, deg.unwrap_or(0));
        for (g, c) in terms {
            if c.degree().is_none() && !c.is_zero() {
                return Err(p.err("inhomogeneous coefficient"));
            }
            d.add_component(g, &c);
        }
        Ok(d)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (g, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*d/d{}", self.ctx.gen(*g).name)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation[{}]({self})", self.degree)
    }
}

struct Parser<'a> {
    ctx: &'a Arc<Context>,
    src: &'a [u8],
    pos: usize,
}

enum Factor {
    E(Elem),
    D(usize),
}

impl<'a> Parser<'a> {
    fn new(ctx: &'a Arc<Context>, text: &'a str) -> Self {
        Parser {
            ctx,
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> GradedError {
        GradedError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let ok = c == b'_' || c.is_ascii_alphabetic() || (self.pos > start && c.is_ascii_digit());
            if !ok {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expr(&mut self) -> Result<Elem, GradedError> {
        let mut acc = Elem::zero(self.ctx);
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(b'+') if !first => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            let t = self.product()?;
            match t {
                Factor::E(e) => acc.add_scaled(&e, &Q::int(if neg { -1 } else { 1 })),
                Factor::D(_) => return Err(self.err("d/d not allowed in an element")),
            }
            first = false;
        }
        Ok(acc)
    }

    fn derivation(&mut self) -> Result<Vec<(usize, Elem)>, GradedError> {
        let mut out = Vec::new();
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(b'+') if !first => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            let mut coeff = Elem::constant(self.ctx, Q::int(if neg { -1 } else { 1 }));
            let mut gen = None;
            loop {
                if gen.is_some() {
                    return Err(self.err("d/d must be the last factor"));
                }
                match self.factor()? {
                    Factor::E(e) => coeff = coeff.mul(&e),
                    Factor::D(g) => gen = Some(g),
                }
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let g = gen.ok_or_else(|| self.err("derivation term without d/d"))?;
            out.push((g, coeff));
            first = false;
        }
        Ok(out)
    }

    fn product(&mut self) -> Result<Factor, GradedError> {
        let mut acc = Elem::one(self.ctx);
        loop {
            match self.factor()? {
                Factor::E(e) => acc = acc.mul(&e),
                Factor::D(g) => return Ok(Factor::D(g)),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(Factor::E(acc))
    }

    fn factor(&mut self) -> Result<Factor, GradedError> {
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                e
            }
            Some(b'-') => {
                self.pos += 1;
                match self.factor()? {
                    Factor::E(e) => e.neg(),
                    Factor::D(_) => return Err(self.err("negated d/d")),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number().unwrap();
                let mut txt = n;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let d = self.number().ok_or_else(|| self.err("expected denominator"))?;
                    txt = format!("{txt}/{d}");
                }
                let q = Q::parse(&txt).ok_or_else(|| self.err("bad number"))?;
                Elem::constant(self.ctx, q)
            }
            Some(_) => {
                let save = self.pos;
                if self.src[self.pos..].starts_with(b"d/d") {
                    self.pos += 3;
                    if let Some(name) = self.ident() {
                        let g = self
                            .ctx
                            .lookup(&name)
                            .ok_or(GradedError::UnknownGenerator(name))?;
                        return Ok(Factor::D(g));
                    }
                    self.pos = save;
                }
                let name = self.ident().ok_or_else(|| self.err("expected factor"))?;
                Elem::named(self.ctx, &name)?
            }
            None => return Err(self.err("unexpected end of input")),
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n: u32 = self
                .number()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| self.err("expected exponent"))?;
            return Ok(Factor::E(base.pow(n)));
        }
        Ok(Factor::E(base))
    }
}
