//! Exact Pochhammer-style ratio products over nilpotent rings.
//!
//! The building block is the ratio
//!
//! ```text
//! PR(u, a, b) = prod_{m = b+1}^{a} (u + m z)        for a >= b,
//! PR(u, a, b) = 1 / prod_{m = a+1}^{b} (u + m z)    for a <  b,
//! ```
//!
//! so that PR(u, a, 0) is the usual shifted factorial of u/z scaled by
//! z^a, and PR(u, a, b) = PR(u, a, 0) / PR(u, b, 0) whenever both sides
//! make sense. Every hypergeometric coefficient in this crate is a finite
//! product of such ratios raised to integer powers.
//!
//! A factor (u + 0 z) with u nilpotent is not invertible, so ratios that
//! place it in the denominator only make sense when the full product is
//! still regular. The engine in [`poch_product`] cancels such factors
//! exactly against the numerator, which requires the coefficient ring to
//! be a free truncation where monomial division is meaningful.

use super::{zl_invert, RingElement, RingError, RingSpec, ZLaurent};
use std::sync::Arc;

/// One ratio `PR(base, hi, lo)^power` in a product.
#[derive(Clone, Debug)]
pub struct PochFactor {
    pub base: RingElement,
    pub hi: i64,
    pub lo: i64,
    pub power: i32,
}

impl PochFactor {
    pub fn new(base: RingElement, hi: i64, lo: i64, power: i32) -> Self {
        PochFactor {
            base,
            hi,
            lo,
            power,
        }
    }
}

/// A single ratio. Strict: a nilpotent zero-offset factor in the
/// denominator is an error here because a lone ratio has nothing to
/// cancel it against.
pub fn pochhammer_ratio(u: &RingElement, a: i64, b: i64) -> Result<ZLaurent, RingError> {
    poch_product(
        u.spec(),
        &[PochFactor::new(u.clone(), a, b, 1)],
    )
}

/// Exact value of a product of Pochhammer ratios.
///
/// All linear forms (base + m z) are collected with signed multiplicities
/// first, so cancellations between factors happen symbolically before any
/// inversion is attempted. Remaining denominator forms are inverted with
/// [`zl_invert`]; a form that is not invertible (offset m = 0 with a
/// nilpotent base) is divided out of the numerator exactly instead, which
/// is only permitted in free truncation rings.
pub fn poch_product(
    spec: &Arc<RingSpec>,
    factors: &[PochFactor],
) -> Result<ZLaurent, RingError> {
    // Collect (base, m) -> net exponent.
    let mut forms: Vec<(RingElement, i64, i64)> = Vec::new();
    for f in factors {
        assert!(
            RingSpec::same_spec(f.base.spec(), spec),
            "factor base not in the product's ring"
        );
        let (range, sign) = if f.hi >= f.lo {
            ((f.lo + 1)..=f.hi, 1i64)
        } else {
            ((f.hi + 1)..=f.lo, -1i64)
        };
        for m in range {
            let e = sign * f.power as i64;
            if e == 0 {
                continue;
            }
            if let Some(slot) = forms
                .iter_mut()
                .find(|(u, mm, _)| *mm == m && *u == f.base)
            {
                slot.2 += e;
            } else {
                forms.push((f.base.clone(), m, e));
            }
        }
    }
    forms.retain(|(_, _, e)| *e != 0);

    let mut numerator = ZLaurent::one(spec);
    let mut inverses: Vec<ZLaurent> = Vec::new();
    let mut cancel: Vec<(RingElement, i64)> = Vec::new();

    for (u, m, e) in &forms {
        let lin = linear_form(u, *m);
        if *e > 0 {
            for _ in 0..*e {
                numerator = &numerator * &lin;
            }
            continue;
        }
        match zl_invert(&lin) {
            Ok(inv) => {
                for _ in 0..(-e) {
                    inverses.push(inv.clone());
                }
            }
            Err(err) => {
                if *m == 0 && spec.is_free_truncation() && !u.is_zero() {
                    cancel.push((u.clone(), -e));
                } else {
                    return Err(err);
                }
            }
        }
    }

    for (u, count) in &cancel {
        for _ in 0..*count {
            numerator = divide_by_monomial(&numerator, u)?;
        }
    }
    for inv in &inverses {
        numerator = &numerator * &inv;
    }
    Ok(numerator)
}

fn linear_form(u: &RingElement, m: i64) -> ZLaurent {
    let spec = u.spec();
    let mut out = ZLaurent::from_ring(u.clone());
    if m != 0 {
        out = &out + &ZLaurent::monomial(spec.scalar(super::rat_i(m)), 1);
    }
    out
}

/// Exact division of a Laurent polynomial by a nonzero element `c * g`
/// where g is a single basis monomial. Only defined in free truncation
/// rings, where the quotient with minimal monomial support is unique and
/// satisfies q * (c g) == value on the stored coefficients.
fn divide_by_monomial(value: &ZLaurent, divisor: &RingElement) -> Result<ZLaurent, RingError> {
    let spec = value.spec();
    assert!(
        spec.is_free_truncation(),
        "exact monomial division requires a free truncation ring"
    );
    let mut it = divisor.coords().iter();
    let (Some((&didx, dc)), None) = (it.next(), it.next()) else {
        return Err(RingError::NotInvertible(format!(
            "divisor {divisor} is not a single monomial"
        )));
    };
    let dmono = spec.basis()[didx].clone();
    let mut out = ZLaurent::zero(spec);
    for (&zexp, coeff) in value.terms() {
        let mut shifted = spec.zero();
        for (&i, c) in coeff.coords() {
            let m = &spec.basis()[i];
            if !dmono.divides(m) {
                return Err(RingError::NotInvertible(format!(
                    "{value} is not divisible by {divisor}"
                )));
            }
            let q = m.div(&dmono);
            let qi = spec
                .basis_index(&q)
                .expect("quotient monomial stays in the free basis");
            shifted = &shifted + &spec.basis_elem(qi).scale(&(c / dc));
        }
        if !shifted.is_zero() {
            out = &out + &ZLaurent::monomial(shifted, zexp);
        }
    }
    Ok(out)
}
