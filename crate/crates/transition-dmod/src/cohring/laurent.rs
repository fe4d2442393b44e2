//! Laurent polynomials in the formal parameter z with coefficients in a
//! nilpotent cohomology ring.
//!
//! Series coefficients, operator symbols, and hypergeometric factors all
//! live here. Inversion is supported exactly when the scalar part is a
//! single monomial `c * z^k`; the nilpotent remainder is then killed by a
//! finite geometric series.

use super::{Rat, RingElement, RingError, RingSpec};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A finite sum of ring-valued coefficients of integer powers of z.
#[derive(Clone)]
pub struct ZLaurent {
    spec: Arc<RingSpec>,
    terms: BTreeMap<i32, RingElement>,
}

impl PartialEq for ZLaurent {
    fn eq(&self, other: &Self) -> bool {
        RingSpec::same_spec(&self.spec, &other.spec) && self.terms == other.terms
    }
}

impl Eq for ZLaurent {}

impl ZLaurent {
    pub fn zero(spec: &Arc<RingSpec>) -> Self {
        ZLaurent {
            spec: Arc::clone(spec),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: &Arc<RingSpec>) -> Self {
        Self::from_ring(spec.one())
    }

    /// A pure ring element at z^0.
    pub fn from_ring(e: RingElement) -> Self {
        let spec = Arc::clone(e.spec());
        let mut terms = BTreeMap::new();
        if !e.is_zero() {
            terms.insert(0, e);
        }
        ZLaurent { spec, terms }
    }

    /// `c * z^k` for a ring element c.
    pub fn monomial(e: RingElement, k: i32) -> Self {
        let spec = Arc::clone(e.spec());
        let mut terms = BTreeMap::new();
        if !e.is_zero() {
            terms.insert(k, e);
        }
        ZLaurent { spec, terms }
    }

    pub fn scalar(spec: &Arc<RingSpec>, c: Rat) -> Self {
        Self::from_ring(spec.scalar(c))
    }

    pub fn z_pow(spec: &Arc<RingSpec>, k: i32) -> Self {
        Self::monomial(spec.one(), k)
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<i32, RingElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i32) -> RingElement {
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| self.spec.zero())
    }

    /// Lowest and highest z exponents present, when nonzero.
    pub fn z_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.keys().next()?;
        let hi = self.terms.keys().next_back()?;
        Some((*lo, *hi))
    }

    /// Multiply by z^k.
    pub fn shift_z(&self, k: i32) -> ZLaurent {
        let terms = self
            .terms
            .iter()
            .map(|(&e, c)| (e + k, c.clone()))
            .collect();
        ZLaurent {
            spec: Arc::clone(&self.spec),
            terms,
        }
    }

    pub fn scale(&self, c: &Rat) -> ZLaurent {
        if c.is_zero() {
            return ZLaurent::zero(&self.spec);
        }
        let terms = self
            .terms
            .iter()
            .map(|(&e, v)| (e, v.scale(c)))
            .collect();
        ZLaurent {
            spec: Arc::clone(&self.spec),
            terms,
        }
    }

    pub fn scale_ring(&self, r: &RingElement) -> ZLaurent {
        let mut out = ZLaurent::zero(&self.spec);
        for (&e, v) in &self.terms {
            let prod = v * r;
            if !prod.is_zero() {
                out.terms.insert(e, prod);
            }
        }
        out
    }

    /// The Laurent polynomial of scalar parts only.
    pub fn scalar_component(&self) -> BTreeMap<i32, Rat> {
        self.terms
            .iter()
            .filter_map(|(&e, v)| {
                let s = v.scalar_part();
                if s.is_zero() {
                    None
                } else {
                    Some((e, s))
                }
            })
            .collect()
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, v| !v.is_zero());
    }

    /// Substitute a fixed rational value for z, collapsing to one ring
    /// element. Requires all exponents to be nonnegative unless z0 != 0.
    pub fn eval_z(&self, z0: &Rat) -> RingElement {
        let mut acc = self.spec.zero();
        for (&e, v) in &self.terms {
            let zp = rat_pow(z0, e);
            acc = &acc + &v.scale(&zp);
        }
        acc
    }
}

fn rat_pow(z0: &Rat, e: i32) -> Rat {
    if e >= 0 {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc *= z0;
        }
        acc
    } else {
        let inv = z0.recip();
        let mut acc = Rat::one();
        for _ in 0..(-e) {
            acc *= &inv;
        }
        acc
    }
}

impl fmt::Debug for ZLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ZLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "({v})")?,
                1 => write!(f, "({v})*z")?,
                _ => write!(f, "({v})*z^{e}")?,
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &ZLaurent {
    type Output = ZLaurent;
    fn add(self, rhs: &ZLaurent) -> ZLaurent {
        let mut out = self.clone();
        for (&e, v) in &rhs.terms {
            let entry = out
                .terms
                .entry(e)
                .or_insert_with(|| self.spec.zero());
            *entry = &*entry + v;
        }
        out.normalize();
        out
    }
}

impl std::ops::Sub for &ZLaurent {
    type Output = ZLaurent;
    fn sub(self, rhs: &ZLaurent) -> ZLaurent {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &ZLaurent {
    type Output = ZLaurent;
    fn neg(self) -> ZLaurent {
        let terms = self.terms.iter().map(|(&e, v)| (e, -v)).collect();
        ZLaurent {
            spec: Arc::clone(&self.spec),
            terms,
        }
    }
}

impl std::ops::Mul for &ZLaurent {
    type Output = ZLaurent;
    fn mul(self, rhs: &ZLaurent) -> ZLaurent {
        let mut out = ZLaurent::zero(&self.spec);
        for (&e1, v1) in &self.terms {
            for (&e2, v2) in &rhs.terms {
                let prod = v1 * v2;
                if prod.is_zero() {
                    continue;
                }
                let entry = out
                    .terms
                    .entry(e1 + e2)
                    .or_insert_with(|| self.spec.zero());
                *entry = &*entry + &prod;
            }
        }
        out.normalize();
        out
    }
}

/// Exact inverse of a Laurent polynomial over a nilpotent ring.
///
/// The scalar component must be a single monomial `c * z^k`; writing the
/// input as `c z^k (1 + n)` with n nilpotent-valued, the inverse is
/// `c^{-1} z^{-k} (1 - n + n^2 - ...)`, which terminates because every
/// product of more than `top_degree / 2` positive-degree elements
/// vanishes. Anything with more than one scalar monomial (or none) is
/// rejected.
pub fn zl_invert(a: &ZLaurent) -> Result<ZLaurent, RingError> {
    let scal = a.scalar_component();
    if scal.len() != 1 {
        return Err(RingError::NotInvertible(format!(
            "scalar component of {a} is not a single z monomial"
        )));
    }
    let (&k, c) = scal.iter().next().unwrap();
    let lead = ZLaurent::monomial(a.spec().scalar(c.recip()), -k);
    // n = a * lead^{-1}... rather a*lead - 1, with lead = (c z^k)^{-1}.
    let one = ZLaurent::one(a.spec());
    let n = &(a * &lead) - &one;
    if !n.scalar_component().is_empty() {
        return Err(RingError::NotInvertible(format!(
            "residual scalar component inverting {a}"
        )));
    }
    let mut acc = one.clone();
    let mut pow = one.clone();
    let cap = a.spec().top_degree() / 2 + 2;
    for _ in 0..cap {
        pow = &pow * &n;
        if pow.is_zero() {
            break;
        }
        acc = &acc - &pow;
        pow = -&pow;
    }
    debug_assert_eq!(&(a * &lead) * &acc, one, "geometric series did not close");
    Ok(&lead * &acc)
}
