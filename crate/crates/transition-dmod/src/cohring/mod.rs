//! Exact arithmetic in graded nilpotent cohomology rings.
//!
//! A ring is described by a [`RingSpec`]: a list of even-degree generators
//! together with oriented rewrite rules such as `xi^2 -> h*xi` and
//! `h^4 -> 0`. The spec derives a finite monomial basis, checks confluence
//! of the rules exhaustively, and precomputes the basis multiplication
//! table. Ring elements are sparse rational vectors over that basis.
//!
//! Two built-in quotient rings cover both geometries of interest, and free
//! truncated polynomial rings (all monomials above a degree bound set to
//! zero) provide integral domains for intermediate cancellations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

mod laurent;
mod poch;
mod text;

pub use laurent::{zl_invert, ZLaurent};
pub use poch::{poch_product, pochhammer_ratio, PochFactor};
pub use text::{parse_element, parse_ring_spec, print_ring_spec};

/// Look up a built-in ring by its spec name.
pub fn ring_by_name(name: &str) -> Option<Arc<RingSpec>> {
    for spec in [ring_x(), ring_y(), free_t(), free_hw()] {
        if spec.name() == name {
            return Some(spec);
        }
    }
    None
}

/// Exact rational scalar used throughout the exact layer.
pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for the rational n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error)]
pub enum RingError {
    #[error("ring spec mismatch: {left} vs {right}")]
    SpecMismatch { left: String, right: String },
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("rewrite system not confluent at monomial {0}")]
    NotConfluent(String),
    #[error("rule {lhs} -> {rhs} is not oriented decreasingly")]
    BadOrientation { lhs: String, rhs: String },
    #[error("rule {lhs} -> {rhs} is not degree-homogeneous")]
    InhomogeneousRule { lhs: String, rhs: String },
    #[error("monomial {0} of degree above top_degree does not rewrite to zero")]
    NotClosed(String),
    #[error("linear map image of {monomial} is not degree-preserving")]
    MapDegree { monomial: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A generator symbol with its cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// A commutative monomial in the generators, stored as an exponent vector.
///
/// The derived `Ord` is a plain storage order; the rewrite order used for
/// termination lives in [`RingSpec::mono_cmp`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(n_gens: usize) -> Self {
        Monomial(vec![0; n_gens])
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Whether `self` divides `other` coordinate-wise.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Exponent-wise quotient; caller must ensure divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// One oriented rewrite rule `lhs -> rhs`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub lhs: Monomial,
    pub rhs: Vec<(Monomial, Rat)>,
}

/// Specification and derived data of one graded nilpotent ring.
///
/// Construction validates everything once: rule orientation under the
/// monomial order, degree homogeneity, exhaustive confluence up to twice
/// the top degree, closure (monomials above `top_degree` rewrite to zero),
/// and the derived basis. Afterwards all element arithmetic is table
/// driven and allocation-light.
pub struct RingSpec {
    name: String,
    generators: Vec<Generator>,
    relations: Vec<Relation>,
    top_degree: u32,
    /// Whether the relations are exactly "all monomials of one polynomial
    /// degree vanish". Such rings are integral domains below the cutoff,
    /// which makes exact monomial division meaningful.
    free_truncation: bool,
    basis: Vec<Monomial>,
    basis_index: BTreeMap<Monomial, usize>,
    /// mult[i][j] = normal form of basis[i]*basis[j] as (basis index, coeff).
    mult: Vec<Vec<Vec<(usize, Rat)>>>,
}

impl fmt::Debug for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingSpec")
            .field("name", &self.name)
            .field("generators", &self.generators)
            .field("basis_len", &self.basis.len())
            .finish()
    }
}

impl RingSpec {
    pub fn new(
        name: &str,
        generators: Vec<Generator>,
        relations: Vec<Relation>,
        top_degree: u32,
    ) -> Result<Arc<Self>, RingError> {
        Self::build(name, generators, relations, top_degree, false)
    }

    /// Free polynomial ring truncated above `poly_degree_bound`: every
    /// monomial of that polynomial degree is a rewrite rule with zero
    /// right-hand side.
    pub fn free_truncation(
        name: &str,
        generators: Vec<Generator>,
        poly_degree_bound: u32,
    ) -> Result<Arc<Self>, RingError> {
        let n = generators.len();
        let mut relations = Vec::new();
        for expo in exponents_of_poly_degree(n, poly_degree_bound) {
            relations.push(Relation {
                lhs: Monomial(expo),
                rhs: Vec::new(),
            });
        }
        let top = generators
            .iter()
            .map(|g| g.degree)
            .max()
            .unwrap_or(0)
            * (poly_degree_bound.saturating_sub(1));
        Self::build(name, generators, relations, top, true)
    }

    fn build(
        name: &str,
        generators: Vec<Generator>,
        relations: Vec<Relation>,
        top_degree: u32,
        free_truncation: bool,
    ) -> Result<Arc<Self>, RingError> {
        let mut spec = RingSpec {
            name: name.to_string(),
            generators,
            relations,
            top_degree,
            free_truncation,
            basis: Vec::new(),
            basis_index: BTreeMap::new(),
            mult: Vec::new(),
        };
        spec.validate_rules()?;
        spec.derive_basis();
        spec.check_confluence_and_closure()?;
        spec.build_mult_table();
        Ok(Arc::new(spec))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    pub fn is_free_truncation(&self) -> bool {
        self.free_truncation
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        self.basis_index.get(m).copied()
    }

    pub fn mono_degree(&self, m: &Monomial) -> u32 {
        m.0.iter()
            .zip(&self.generators)
            .map(|(e, g)| e * g.degree)
            .sum()
    }

    /// Rewrite order: total cohomological degree first, ties broken by the
    /// exponent vector read with the most recently declared generator most
    /// significant. All built-in rule sets decrease strictly under it.
    pub fn mono_cmp(&self, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
        self.mono_degree(a)
            .cmp(&self.mono_degree(b))
            .then_with(|| a.0.iter().rev().cmp(b.0.iter().rev()))
    }

    fn validate_rules(&self) -> Result<(), RingError> {
        for rel in &self.relations {
            let ldeg = self.mono_degree(&rel.lhs);
            for (m, c) in &rel.rhs {
                if c.is_zero() {
                    continue;
                }
                if self.mono_degree(m) != ldeg {
                    return Err(RingError::InhomogeneousRule {
                        lhs: self.mono_string(&rel.lhs),
                        rhs: self.mono_string(m),
                    });
                }
                if self.mono_cmp(m, &rel.lhs) != std::cmp::Ordering::Less {
                    return Err(RingError::BadOrientation {
                        lhs: self.mono_string(&rel.lhs),
                        rhs: self.mono_string(m),
                    });
                }
            }
        }
        Ok(())
    }

    fn reducible(&self, m: &Monomial) -> Option<&Relation> {
        self.relations.iter().find(|r| r.lhs.divides(m))
    }

    /// Deterministic full normalization of a polynomial given as a monomial
    /// map. Always rewrites the largest reducible monomial first; the
    /// strictly decreasing rule orientation guarantees termination.
    fn normalize(&self, poly: BTreeMap<Monomial, Rat>) -> BTreeMap<Monomial, Rat> {
        let mut work = poly;
        loop {
            let target = work
                .iter()
                .filter(|(m, c)| !c.is_zero() && self.reducible(m).is_some())
                .map(|(m, _)| m.clone())
                .max_by(|a, b| self.mono_cmp(a, b));
            let Some(m) = target else { break };
            let coeff = work.remove(&m).unwrap();
            let rel = self.reducible(&m).unwrap();
            let cofactor = m.div(&rel.lhs);
            for (rm, rc) in &rel.rhs {
                let nm = cofactor.mul(rm);
                let entry = work.entry(nm).or_insert_with(Rat::zero);
                *entry += &coeff * rc;
            }
            work.retain(|_, c| !c.is_zero());
        }
        work
    }

    fn derive_basis(&mut self) {
        let mut basis: Vec<Monomial> = all_exponents_up_to_degree(self)
            .into_iter()
            .filter(|m| self.reducible(m).is_none())
            .collect();
        basis.sort_by(|a, b| self.mono_cmp(a, b));
        self.basis_index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        self.basis = basis;
    }

    fn check_confluence_and_closure(&self) -> Result<(), RingError> {
        let candidates = all_exponents_up_to_degree_bound(self, 2 * self.top_degree);
        for m in &candidates {
            let reference = self.normalize(BTreeMap::from([(m.clone(), Rat::one())]));
            // Every single-step rewrite must renormalize to the same value.
            for rel in &self.relations {
                if !rel.lhs.divides(m) {
                    continue;
                }
                let cofactor = m.div(&rel.lhs);
                let mut once = BTreeMap::new();
                for (rm, rc) in &rel.rhs {
                    let nm = cofactor.mul(rm);
                    let entry = once.entry(nm).or_insert_with(Rat::zero);
                    *entry += rc.clone();
                }
                if self.normalize(once) != reference {
                    return Err(RingError::NotConfluent(self.mono_string(m)));
                }
            }
            if self.mono_degree(m) > self.top_degree && !reference.is_empty() {
                return Err(RingError::NotClosed(self.mono_string(m)));
            }
            for nm in reference.keys() {
                if self.reducible(nm).is_some() {
                    return Err(RingError::NotConfluent(self.mono_string(m)));
                }
            }
        }
        Ok(())
    }

    fn build_mult_table(&mut self) {
        let n = self.basis.len();
        let mut table = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let prod = self.basis[i].mul(&self.basis[j]);
                let nf = self.normalize(BTreeMap::from([(prod, Rat::one())]));
                let entries: Vec<(usize, Rat)> = nf
                    .into_iter()
                    .map(|(m, c)| (self.basis_index[&m], c))
                    .collect();
                row.push(entries);
            }
            table.push(row);
        }
        self.mult = table;
    }

    pub fn mono_string(&self, m: &Monomial) -> String {
        if m.is_unit() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (e, g) in m.0.iter().zip(&self.generators) {
            match e {
                0 => {}
                1 => parts.push(g.name.clone()),
                _ => parts.push(format!("{}^{}", g.name, e)),
            }
        }
        parts.join("*")
    }

    pub fn mult_entries(&self, i: usize, j: usize) -> &[(usize, Rat)] {
        &self.mult[i][j]
    }

    // Element constructors.

    pub fn zero(self: &Arc<Self>) -> RingElement {
        RingElement {
            spec: Arc::clone(self),
            coords: BTreeMap::new(),
        }
    }

    pub fn one(self: &Arc<Self>) -> RingElement {
        self.scalar(Rat::one())
    }

    pub fn scalar(self: &Arc<Self>, c: Rat) -> RingElement {
        let mut coords = BTreeMap::new();
        if !c.is_zero() {
            coords.insert(0usize, c);
        }
        RingElement {
            spec: Arc::clone(self),
            coords,
        }
    }

    /// The generator with the given name as an element.
    pub fn gen_elem(self: &Arc<Self>, name: &str) -> RingElement {
        let idx = self
            .generators
            .iter()
            .position(|g| g.name == name)
            .unwrap_or_else(|| panic!("no generator named {name} in ring {}", self.name));
        let mut expo = vec![0u32; self.generators.len()];
        expo[idx] = 1;
        let m = Monomial(expo);
        let b = self.basis_index[&m];
        let mut coords = BTreeMap::new();
        coords.insert(b, Rat::one());
        RingElement {
            spec: Arc::clone(self),
            coords,
        }
    }

    /// Element from raw (monomial, coefficient) terms; monomials need not
    /// be in normal form.
    pub fn element_from_terms(
        self: &Arc<Self>,
        terms: Vec<(Monomial, Rat)>,
    ) -> RingElement {
        let mut poly: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m, c) in terms {
            let entry = poly.entry(m).or_insert_with(Rat::zero);
            *entry += c;
        }
        let nf = self.normalize(poly);
        let coords = nf
            .into_iter()
            .map(|(m, c)| (self.basis_index[&m], c))
            .collect();
        RingElement {
            spec: Arc::clone(self),
            coords,
        }
    }

    /// The basis monomial with the given index as an element.
    pub fn basis_elem(self: &Arc<Self>, i: usize) -> RingElement {
        let mut coords = BTreeMap::new();
        coords.insert(i, Rat::one());
        RingElement {
            spec: Arc::clone(self),
            coords,
        }
    }

    pub fn same_spec(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || a.name == b.name
    }
}

fn all_exponents_up_to_degree(spec: &RingSpec) -> Vec<Monomial> {
    all_exponents_up_to_degree_bound(spec, spec.top_degree)
}

fn all_exponents_up_to_degree_bound(spec: &RingSpec, bound: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::unit(spec.generators.len())];
    for (i, g) in spec.generators.iter().enumerate() {
        let mut next = Vec::new();
        for m in &out {
            let mut e = 0;
            loop {
                let mut expo = m.0.clone();
                expo[i] = e;
                let cand = Monomial(expo);
                if spec.mono_degree(&cand) > bound {
                    break;
                }
                next.push(cand);
                e += 1;
                if g.degree == 0 {
                    break;
                }
            }
        }
        out = next;
    }
    out
}

fn exponents_of_poly_degree(n_gens: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            let mut v = prefix.clone();
            v.push(d);
            out.push(v);
            return;
        }
        for e in 0..=d {
            prefix.push(e);
            rec(n - 1, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n_gens, d, &mut Vec::new(), &mut out);
    out
}

/// A sparse element of a [`RingSpec`], stored on the derived basis.
#[derive(Clone)]
pub struct RingElement {
    spec: Arc<RingSpec>,
    coords: BTreeMap<usize, Rat>,
}

impl RingElement {
    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn coords(&self) -> &BTreeMap<usize, Rat> {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> Rat {
        self.coords.get(&i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coefficient of the unit monomial.
    pub fn scalar_part(&self) -> Rat {
        self.coord(0)
    }

    /// True when only the unit monomial carries a coefficient.
    pub fn is_scalar(&self) -> bool {
        self.coords.keys().all(|&i| i == 0)
    }

    /// The element minus its scalar part.
    pub fn nilpotent_part(&self) -> RingElement {
        let mut coords = self.coords.clone();
        coords.remove(&0);
        RingElement {
            spec: Arc::clone(&self.spec),
            coords,
        }
    }

    /// Total degree when homogeneous; `None` for 0 or mixed elements.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for &i in self.coords.keys() {
            let d = self.spec.mono_degree(&self.spec.basis()[i]);
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn scale(&self, c: &Rat) -> RingElement {
        if c.is_zero() {
            return self.spec.zero();
        }
        let coords = self
            .coords
            .iter()
            .map(|(&i, v)| (i, v * c))
            .collect();
        RingElement {
            spec: Arc::clone(&self.spec),
            coords,
        }
    }

    fn assert_same_spec(&self, other: &RingElement) {
        assert!(
            RingSpec::same_spec(&self.spec, &other.spec),
            "ring spec mismatch: {} vs {}",
            self.spec.name,
            other.spec.name
        );
    }
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        RingSpec::same_spec(&self.spec, &other.spec) && self.coords == other.coords
    }
}

impl Eq for RingElement {}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&i, c) in &self.coords {
            let m = &self.spec.basis()[i];
            let ms = self.spec.mono_string(m);
            if first {
                first = false;
                if c.is_one() && !m.is_unit() {
                    write!(f, "{ms}")?;
                } else if m.is_unit() {
                    write!(f, "{c}")?;
                } else {
                    write!(f, "{c}*{ms}")?;
                }
            } else {
                let (sign, mag) = if c.is_negative() {
                    ("-", -c.clone())
                } else {
                    ("+", c.clone())
                };
                if mag.is_one() && !m.is_unit() {
                    write!(f, " {sign} {ms}")?;
                } else if m.is_unit() {
                    write!(f, " {sign} {mag}")?;
                } else {
                    write!(f, " {sign} {mag}*{ms}")?;
                }
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        self.assert_same_spec(rhs);
        let mut coords = self.coords.clone();
        for (&i, c) in &rhs.coords {
            let entry = coords.entry(i).or_insert_with(Rat::zero);
            *entry += c;
        }
        coords.retain(|_, c| !c.is_zero());
        RingElement {
            spec: Arc::clone(&self.spec),
            coords,
        }
    }
}

impl std::ops::Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        let coords = self.coords.iter().map(|(&i, c)| (i, -c.clone())).collect();
        RingElement {
            spec: Arc::clone(&self.spec),
            coords,
        }
    }
}

impl std::ops::Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        self.assert_same_spec(rhs);
        let mut coords: BTreeMap<usize, Rat> = BTreeMap::new();
        for (&i, a) in &self.coords {
            for (&j, b) in &rhs.coords {
                let ab = a * b;
                for (k, c) in self.spec.mult_entries(i, j) {
                    let entry = coords.entry(*k).or_insert_with(Rat::zero);
                    *entry += &ab * c;
                }
            }
        }
        coords.retain(|_, c| !c.is_zero());
        RingElement {
            spec: Arc::clone(&self.spec),
            coords,
        }
    }
}

/// Normal-form product of two ring elements.
pub fn ring_mul(a: &RingElement, b: &RingElement) -> RingElement {
    a * b
}

/// A linear map between two ring specs given by images of basis monomials.
///
/// The constructor checks that each image is zero or homogeneous of the
/// same degree as its source monomial. The map is linear only; callers that
/// transport multiplicative structures must ensure multiplicativity on the
/// subalgebra they use.
#[derive(Clone, Debug)]
pub struct RingMap {
    from: Arc<RingSpec>,
    to: Arc<RingSpec>,
    images: Vec<RingElement>,
}

impl RingMap {
    pub fn new(
        from: &Arc<RingSpec>,
        to: &Arc<RingSpec>,
        images: Vec<RingElement>,
    ) -> Result<Self, RingError> {
        assert_eq!(images.len(), from.dim(), "one image per basis monomial");
        for (i, img) in images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let src_deg = from.mono_degree(&from.basis()[i]);
            if img.homogeneous_degree() != Some(src_deg) {
                return Err(RingError::MapDegree {
                    monomial: from.mono_string(&from.basis()[i]),
                });
            }
        }
        Ok(RingMap {
            from: Arc::clone(from),
            to: Arc::clone(to),
            images,
        })
    }

    pub fn from_spec(&self) -> &Arc<RingSpec> {
        &self.from
    }

    pub fn to_spec(&self) -> &Arc<RingSpec> {
        &self.to
    }

    pub fn apply(&self, e: &RingElement) -> RingElement {
        assert!(
            RingSpec::same_spec(e.spec(), &self.from),
            "element not in the map's source ring"
        );
        let mut acc = self.to.zero();
        for (&i, c) in e.coords() {
            acc = &acc + &self.images[i].scale(c);
        }
        acc
    }
}

static RING_X: OnceLock<Arc<RingSpec>> = OnceLock::new();
static RING_Y: OnceLock<Arc<RingSpec>> = OnceLock::new();
static FREE_T: OnceLock<Arc<RingSpec>> = OnceLock::new();
static FREE_HW: OnceLock<Arc<RingSpec>> = OnceLock::new();

const RING_X_TEXT: &str = "\
ring cubic_ambient_x
top_degree 8
generator h 2
generator xi 2
relation xi^2 -> h*xi
relation h^4 -> 0
";

const RING_Y_TEXT: &str = "\
ring quintic_ambient_y
top_degree 8
generator p 2
relation p^5 -> 0
";

/// The two-generator ambient ring with basis
/// {1, h, h^2, h^3, xi, h*xi, h^2*xi, h^3*xi}.
pub fn ring_x() -> Arc<RingSpec> {
    Arc::clone(RING_X.get_or_init(|| {
        let spec = parse_ring_spec(RING_X_TEXT).expect("built-in X ring spec");
        assert_eq!(spec.dim(), 8, "X ambient ring must have dimension 8");
        spec
    }))
}

/// The one-generator ambient ring with basis {1, p, p^2, p^3, p^4}.
pub fn ring_y() -> Arc<RingSpec> {
    Arc::clone(RING_Y.get_or_init(|| {
        let spec = parse_ring_spec(RING_Y_TEXT).expect("built-in Y ring spec");
        assert_eq!(spec.dim(), 5, "Y ambient ring must have dimension 5");
        spec
    }))
}

/// Free univariate ring Q[T] truncated above polynomial degree 8.
/// Used for exact cancellation of nilpotent monomial factors before
/// projecting into a quotient ring.
pub fn free_t() -> Arc<RingSpec> {
    Arc::clone(FREE_T.get_or_init(|| {
        RingSpec::free_truncation(
            "free_t_deg8",
            vec![Generator {
                name: "T".to_string(),
                degree: 2,
            }],
            9,
        )
        .expect("built-in free T ring")
    }))
}

/// Free bivariate ring Q[h, w] truncated above polynomial degree 8, with
/// w playing the role of xi - h. Hosts jet evaluation for the continuation
/// coefficients, where division by w must stay exact.
pub fn free_hw() -> Arc<RingSpec> {
    Arc::clone(FREE_HW.get_or_init(|| {
        RingSpec::free_truncation(
            "free_hw_deg8",
            vec![
                Generator {
                    name: "h".to_string(),
                    degree: 2,
                },
                Generator {
                    name: "w".to_string(),
                    degree: 2,
                },
            ],
            9,
        )
        .expect("built-in free hw ring")
    }))
}

/// The degree-preserving transport sending the xi tower to the p tower:
/// 1 -> 1, xi^k -> p^k, and every monomial divisible by h (after normal
/// form, the pure h powers) to zero.
pub fn tower_map_x_to_y() -> RingMap {
    let x = ring_x();
    let y = ring_y();
    let p = y.gen_elem("p");
    let mut images = Vec::with_capacity(x.dim());
    for m in x.basis() {
        let img = tower_image(&x, m, &p, &y);
        images.push(img);
    }
    RingMap::new(&x, &y, images).expect("tower map is degree preserving")
}

fn tower_image(
    _x: &Arc<RingSpec>,
    m: &Monomial,
    p: &RingElement,
    y: &Arc<RingSpec>,
) -> RingElement {
    // Basis of the X ring: h^a or h^a*xi. The xi tower in normal form is
    // xi^k = h^{k-1}*xi for k >= 1; its image is p^k.
    let h_exp = m.0[0];
    let xi_exp = m.0[1];
    if xi_exp == 0 {
        if h_exp == 0 {
            return y.one();
        }
        return y.zero();
    }
    debug_assert_eq!(xi_exp, 1, "normal form keeps xi exponent at most 1");
    let k = h_exp + 1;
    let mut acc = y.one();
    for _ in 0..k {
        acc = &acc * p;
    }
    acc
}

/// The linear projection from the free Q[h, w] ring onto the X quotient,
/// sending h to h and w to xi - h.
pub fn free_hw_to_x() -> RingMap {
    let f = free_hw();
    let x = ring_x();
    let h = x.gen_elem("h");
    let w = &x.gen_elem("xi") - &h;
    let mut images = Vec::with_capacity(f.dim());
    for m in f.basis() {
        let mut acc = x.one();
        for _ in 0..m.0[0] {
            acc = &acc * &h;
        }
        for _ in 0..m.0[1] {
            acc = &acc * &w;
        }
        images.push(acc);
    }
    RingMap::new(&f, &x, images).expect("hw projection is degree preserving")
}

/// The linear projection from the free Q[T] ring onto a quotient ring,
/// sending T^k to the k-th power of the given generator element.
pub fn free_t_to(target_gen: &RingElement) -> RingMap {
    let f = free_t();
    let to = Arc::clone(target_gen.spec());
    let mut images = Vec::with_capacity(f.dim());
    for m in f.basis() {
        let mut acc = to.one();
        for _ in 0..m.0[0] {
            acc = &acc * target_gen;
        }
        images.push(acc);
    }
    RingMap::new(&f, &to, images).expect("T projection is degree preserving")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_ring_basis_and_relations() {
        let x = ring_x();
        assert_eq!(x.dim(), 8);
        let xi = x.gen_elem("xi");
        let h = x.gen_elem("h");
        // xi^2 = h*xi
        assert_eq!(&xi * &xi, &h * &xi);
        // h^4 = 0
        let h2 = &h * &h;
        assert!((&h2 * &h2).is_zero());
        // xi^4 = h^3*xi by repeated rewriting
        let xi2 = &xi * &xi;
        let xi4 = &xi2 * &xi2;
        let h3xi = &(&h2 * &h) * &xi;
        assert_eq!(xi4, h3xi);
        // xi^5 = 0
        assert!((&xi4 * &xi).is_zero());
    }

    #[test]
    fn x_ring_w_identities() {
        let x = ring_x();
        let h = x.gen_elem("h");
        let xi = x.gen_elem("xi");
        let w = &xi - &h;
        let w2 = &w * &w;
        let h2 = &h * &h;
        let hxi = &h * &xi;
        assert_eq!(w2, &h2 - &hxi);
        let w4 = &w2 * &w2;
        let h3xi = &(&h2 * &h) * &xi;
        assert_eq!(w4, -&h3xi);
        assert!(!(w4.is_zero()));
        assert!((&w4 * &w).is_zero());
        // xi * w = 0
        assert!((&xi * &w).is_zero());
    }

    #[test]
    fn y_ring_basis() {
        let y = ring_y();
        assert_eq!(y.dim(), 5);
        let p = y.gen_elem("p");
        let p4 = &(&(&p * &p) * &p) * &p;
        assert!(!p4.is_zero());
        assert!((&p4 * &p).is_zero());
    }

    #[test]
    fn free_rings_dimensions() {
        assert_eq!(free_t().dim(), 9);
        assert_eq!(free_hw().dim(), 45);
        assert!(free_t().is_free_truncation());
        assert!(!ring_x().is_free_truncation());
    }

    #[test]
    fn grading_respected_by_products() {
        let x = ring_x();
        let h = x.gen_elem("h");
        let xi = x.gen_elem("xi");
        let prod = &(&h * &h) * &xi;
        assert_eq!(prod.homogeneous_degree(), Some(6));
    }

    #[test]
    fn tower_map_images() {
        let l = tower_map_x_to_y();
        let x = ring_x();
        let y = ring_y();
        let xi = x.gen_elem("xi");
        let p = y.gen_elem("p");
        assert_eq!(l.apply(&xi), p);
        let xi2 = &xi * &xi;
        assert_eq!(l.apply(&xi2), &p * &p);
        let h = x.gen_elem("h");
        assert!(l.apply(&h).is_zero());
        // Multiplicative on the tower: L(xi^2 * xi^2) = L(xi^2)^2.
        let xi4 = &xi2 * &xi2;
        assert_eq!(l.apply(&xi4), &(&p * &p) * &(&p * &p));
    }

    #[test]
    fn hw_projection_matches_w_normal_form() {
        let proj = free_hw_to_x();
        let f = free_hw();
        let x = ring_x();
        let hw_w = f.gen_elem("w");
        let img = proj.apply(&hw_w);
        let expect = &x.gen_elem("xi") - &x.gen_elem("h");
        assert_eq!(img, expect);
        // w^5 is nonzero in the free ring but maps to zero.
        let mut w5 = f.one();
        for _ in 0..5 {
            w5 = &w5 * &hw_w;
        }
        assert!(!w5.is_zero());
        assert!(proj.apply(&w5).is_zero());
    }

    #[test]
    fn non_confluent_rules_rejected() {
        // xi^2 -> h*xi together with xi^2 -> 0 cannot be confluent.
        let gens = vec![
            Generator {
                name: "h".into(),
                degree: 2,
            },
            Generator {
                name: "xi".into(),
                degree: 2,
            },
        ];
        let rels = vec![
            Relation {
                lhs: Monomial(vec![0, 2]),
                rhs: vec![(Monomial(vec![1, 1]), Rat::one())],
            },
            Relation {
                lhs: Monomial(vec![0, 2]),
                rhs: vec![],
            },
            Relation {
                lhs: Monomial(vec![4, 0]),
                rhs: vec![],
            },
        ];
        let err = RingSpec::new("broken", gens, rels, 8);
        assert!(matches!(err, Err(RingError::NotConfluent(_))));
    }
}
