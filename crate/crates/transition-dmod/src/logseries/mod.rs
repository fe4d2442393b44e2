//! Cohomology-valued hypergeometric series with symbolic log prefactors.
//!
//! A [`LogSeries`] represents
//!
//! ```text
//! global_factor * prod_v q_v^(r_v + u_v/z) * sum_d coeff_d * q^d
//! ```
//!
//! where each exponent has an exact rational scalar part `r_v` and a
//! nilpotent ring part `u_v` (formally divided by z), coefficients are
//! Laurent polynomials in z over the ring, and the sum is truncated at a
//! total index degree. Negative indices are allowed so operator images
//! stay representable; the built-in models only populate nonnegative ones.

use crate::cohring::{Rat, RingElement, RingMap, RingSpec, ZLaurent};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

mod csv;
mod models;

pub use csv::{read_series_csv, write_series_csv};
pub use models::{
    build_series, coefficient, continued_x_series, model, Family, ModelName, ModelSpec,
};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("model coefficient failed at index {index:?}: {source}")]
    Model {
        index: Vec<i64>,
        source: crate::cohring::RingError,
    },
    #[error("monodromy obstruction in {var}: {reason}")]
    MonodromyObstruction { var: String, reason: String },
    #[error("series mismatch: {0}")]
    Shape(String),
    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

/// Exponent of one variable: q^(scalar + nilpotent/z).
#[derive(Clone, Debug)]
pub struct Exponent {
    pub scalar: Rat,
    pub nilpotent: RingElement,
}

impl Exponent {
    pub fn new(scalar: Rat, nilpotent: RingElement) -> Self {
        assert!(
            nilpotent.scalar_part().is_zero(),
            "nilpotent exponent part must have no scalar component"
        );
        Exponent { scalar, nilpotent }
    }

    pub fn trivial(spec: &Arc<RingSpec>) -> Self {
        Exponent {
            scalar: Rat::zero(),
            nilpotent: spec.zero(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.scalar.is_zero() && self.nilpotent.is_zero()
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.scalar == other.scalar && self.nilpotent == other.nilpotent
    }
}

impl Eq for Exponent {}

/// A truncated log-power series with ring-valued coefficients.
#[derive(Clone)]
pub struct LogSeries {
    spec: Arc<RingSpec>,
    vars: Vec<String>,
    exponents: Vec<Exponent>,
    global_factor: ZLaurent,
    order: u32,
    coeffs: BTreeMap<Vec<i64>, ZLaurent>,
}

impl LogSeries {
    pub fn new(
        spec: &Arc<RingSpec>,
        vars: Vec<String>,
        exponents: Vec<Exponent>,
        global_factor: ZLaurent,
        order: u32,
    ) -> Self {
        assert_eq!(vars.len(), exponents.len(), "one exponent per variable");
        LogSeries {
            spec: Arc::clone(spec),
            vars,
            exponents,
            global_factor,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_position(&self, v: &str) -> Option<usize> {
        self.vars.iter().position(|name| name == v)
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exponents
    }

    pub fn global_factor(&self) -> &ZLaurent {
        &self.global_factor
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<i64>, ZLaurent> {
        &self.coeffs
    }

    pub fn index_degree(idx: &[i64]) -> u32 {
        idx.iter().map(|d| d.unsigned_abs() as u32).sum()
    }

    pub fn set_coeff(&mut self, idx: Vec<i64>, value: ZLaurent) {
        assert_eq!(idx.len(), self.vars.len(), "index arity mismatch");
        assert!(
            Self::index_degree(&idx) <= self.order,
            "index degree beyond truncation order"
        );
        if value.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, value);
        }
    }

    pub fn coeff(&self, idx: &[i64]) -> ZLaurent {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| ZLaurent::zero(&self.spec))
    }

    /// True when every stored coefficient is zero (the prefactor and
    /// global factor are ignored).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Restrict to indices of total degree at most `order`.
    pub fn truncated(&self, order: u32) -> LogSeries {
        let mut out = self.clone();
        out.order = order.min(self.order);
        out.coeffs.retain(|idx, _| Self::index_degree(idx) <= out.order);
        out
    }

    fn assert_compatible(&self, other: &LogSeries) {
        assert!(
            RingSpec::same_spec(&self.spec, &other.spec),
            "series live in different rings"
        );
        assert_eq!(self.vars, other.vars, "series have different variables");
        assert_eq!(
            self.exponents, other.exponents,
            "series have different prefactors"
        );
    }
}

impl PartialEq for LogSeries {
    fn eq(&self, other: &Self) -> bool {
        RingSpec::same_spec(&self.spec, &other.spec)
            && self.vars == other.vars
            && self.exponents == other.exponents
            && self.global_factor == other.global_factor
            && self.order == other.order
            && self.coeffs == other.coeffs
    }
}

impl Eq for LogSeries {}

impl fmt::Debug for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogSeries")
            .field("vars", &self.vars)
            .field("order", &self.order)
            .field("terms", &self.coeffs.len())
            .finish()
    }
}

impl std::ops::Add for &LogSeries {
    type Output = LogSeries;
    fn add(self, rhs: &LogSeries) -> LogSeries {
        self.assert_compatible(rhs);
        assert_eq!(
            self.global_factor, rhs.global_factor,
            "series have different global factors"
        );
        let mut out = self.clone();
        out.order = self.order.min(rhs.order);
        for (idx, c) in &rhs.coeffs {
            let sum = &out.coeff(idx) + c;
            if sum.is_zero() {
                out.coeffs.remove(idx);
            } else {
                out.coeffs.insert(idx.clone(), sum);
            }
        }
        out.coeffs
            .retain(|idx, _| LogSeries::index_degree(idx) <= out.order);
        out
    }
}

/// One scalar component of a series: the coefficient of a fixed ring
/// basis monomial, as a polynomial in the variables, their logs, and z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub basis_index: usize,
    pub monomial: String,
    pub vars: Vec<String>,
    /// Scalar exponent per variable (the q^r prefactor of the component).
    pub exponents: Vec<Rat>,
    /// (multi-index, log powers per variable, z power) -> rational.
    pub entries: BTreeMap<(Vec<i64>, Vec<u32>, i32), Rat>,
}

/// Expand the nilpotent prefactor into logs and split the series along
/// the ring basis. Components that are identically zero are dropped.
pub fn expand_components(s: &LogSeries) -> Vec<Component> {
    let spec = s.spec();
    let nvars = s.vars.len();

    // Powers of each nilpotent exponent part until they vanish.
    let mut nil_pows: Vec<Vec<RingElement>> = Vec::with_capacity(nvars);
    for e in &s.exponents {
        let mut pows = vec![spec.one()];
        loop {
            let next = &pows[pows.len() - 1] * &e.nilpotent;
            if next.is_zero() {
                break;
            }
            pows.push(next);
        }
        nil_pows.push(pows);
    }

    // Enumerate log-power tuples k with prod_v nil_v^{k_v} != 0.
    let mut tuples: Vec<Vec<u32>> = vec![Vec::new()];
    for pows in &nil_pows {
        let mut next = Vec::new();
        for t in &tuples {
            for k in 0..pows.len() as u32 {
                let mut t2 = t.clone();
                t2.push(k);
                next.push(t2);
            }
        }
        tuples = next;
    }

    let mut comps: BTreeMap<usize, Component> = BTreeMap::new();
    for k in &tuples {
        let mut nil_prod = spec.one();
        let mut fact = Rat::one();
        for (v, &kv) in k.iter().enumerate() {
            nil_prod = &nil_prod * &nil_pows[v][kv as usize];
            for j in 1..=(kv as i64) {
                fact *= Rat::from_integer(j.into());
            }
        }
        if nil_prod.is_zero() {
            continue;
        }
        let inv_fact = fact.recip();
        let log_z_shift = -(k.iter().map(|&kv| kv as i32).sum::<i32>());

        for (idx, cz) in &s.coeffs {
            for (&zp_c, c_el) in cz.terms() {
                for (&zp_g, g_el) in s.global_factor.terms() {
                    let elem = &(c_el * g_el) * &nil_prod;
                    if elem.is_zero() {
                        continue;
                    }
                    let zpow = zp_c + zp_g + log_z_shift;
                    for (&b, coord) in elem.coords() {
                        let val = coord * &inv_fact;
                        let comp = comps.entry(b).or_insert_with(|| Component {
                            basis_index: b,
                            monomial: spec.mono_string(&spec.basis()[b]),
                            vars: s.vars.clone(),
                            exponents: s.exponents.iter().map(|e| e.scalar.clone()).collect(),
                            entries: BTreeMap::new(),
                        });
                        let key = (idx.clone(), k.clone(), zpow);
                        let entry = comp.entries.entry(key).or_insert_with(Rat::zero);
                        *entry += val;
                    }
                }
            }
        }
    }

    for comp in comps.values_mut() {
        comp.entries.retain(|_, c| !c.is_zero());
    }
    comps.into_values().filter(|c| !c.entries.is_empty()).collect()
}

/// Transport a series through a degree-preserving linear map between
/// rings: coefficients, prefactor nilpotents, and the global factor are
/// mapped. Meaningful when the map is multiplicative on the subalgebra
/// generated by the prefactor nilpotents, which holds for the tower map
/// used in the continuation comparisons.
pub fn apply_linear_map(l: &RingMap, s: &LogSeries) -> LogSeries {
    assert!(
        RingSpec::same_spec(s.spec(), l.from_spec()),
        "series not in the map's source ring"
    );
    let to = l.to_spec();
    let map_zl = |v: &ZLaurent| -> ZLaurent {
        let mut out = ZLaurent::zero(to);
        for (&e, c) in v.terms() {
            let img = l.apply(c);
            if !img.is_zero() {
                out = &out + &ZLaurent::monomial(img, e);
            }
        }
        out
    };
    let exponents = s
        .exponents
        .iter()
        .map(|e| Exponent::new(e.scalar.clone(), l.apply(&e.nilpotent)))
        .collect();
    let mut out = LogSeries::new(
        to,
        s.vars.clone(),
        exponents,
        map_zl(&s.global_factor),
        s.order,
    );
    for (idx, c) in &s.coeffs {
        let img = map_zl(c);
        if !img.is_zero() {
            out.coeffs.insert(idx.clone(), img);
        }
    }
    out
}

/// The limit of the series as one variable goes to zero.
///
/// Requires trivial formal monodromy in that variable: integer scalar
/// exponent at least zero and vanishing nilpotent exponent part. A
/// positive integer exponent sends the whole series to zero; exponent
/// zero keeps the slice with zero index in that variable. Coefficients at
/// negative indices in the variable diverge and are rejected.
pub fn limit_at_zero(s: &LogSeries, v: &str) -> Result<LogSeries, SeriesError> {
    let pos = s.var_position(v).ok_or_else(|| SeriesError::Shape(format!(
        "no variable named {v}"
    )))?;
    let e = &s.exponents[pos];
    if !e.nilpotent.is_zero() {
        return Err(SeriesError::MonodromyObstruction {
            var: v.to_string(),
            reason: format!("nilpotent exponent part {}", e.nilpotent),
        });
    }
    if !e.scalar.is_integer() || e.scalar.is_negative() {
        return Err(SeriesError::MonodromyObstruction {
            var: v.to_string(),
            reason: format!("fractional or negative exponent {}", e.scalar),
        });
    }
    for idx in s.coeffs.keys() {
        if idx[pos] < 0 {
            return Err(SeriesError::MonodromyObstruction {
                var: v.to_string(),
                reason: format!("pole: nonzero coefficient at index {idx:?}"),
            });
        }
    }

    let vars: Vec<String> = s
        .vars
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, n)| n.clone())
        .collect();
    let exponents: Vec<Exponent> = s
        .exponents
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, e)| e.clone())
        .collect();
    let mut out = LogSeries::new(
        &s.spec,
        vars,
        exponents,
        s.global_factor.clone(),
        s.order,
    );
    if e.scalar.is_positive() {
        return Ok(out);
    }
    for (idx, c) in &s.coeffs {
        if idx[pos] != 0 {
            continue;
        }
        let rest: Vec<i64> = idx
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, &d)| d)
            .collect();
        out.coeffs.insert(rest, c.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohring::{rat, rat_i, ring_y, tower_map_x_to_y, ring_x};

    fn constant_series(spec: &Arc<RingSpec>) -> LogSeries {
        let mut s = LogSeries::new(
            spec,
            vec!["y".to_string()],
            vec![Exponent::trivial(spec)],
            ZLaurent::one(spec),
            4,
        );
        s.set_coeff(vec![0], ZLaurent::one(spec));
        s
    }

    #[test]
    fn constant_series_single_component() {
        let y = ring_y();
        let s = constant_series(&y);
        let comps = expand_components(&s);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].monomial, "1");
        assert_eq!(
            comps[0].entries,
            BTreeMap::from([((vec![0], vec![0], 0), rat_i(1))])
        );
    }

    #[test]
    fn log_expansion_of_nilpotent_prefactor() {
        let y = ring_y();
        let p = y.gen_elem("p");
        let mut s = LogSeries::new(
            &y,
            vec!["y".to_string()],
            vec![Exponent::new(Rat::zero(), p.clone())],
            ZLaurent::from_ring(p.clone()),
            2,
        );
        s.set_coeff(vec![0], ZLaurent::one(&y));
        // p * y^{p/z} = p + p^2 log y / z + p^3 log^2 y / (2 z^2) + ...
        let comps = expand_components(&s);
        // nonzero along p, p^2, p^3, p^4
        assert_eq!(comps.len(), 4);
        let p2 = comps.iter().find(|c| c.monomial == "p^2").unwrap();
        assert_eq!(
            p2.entries,
            BTreeMap::from([((vec![0], vec![1], -1), rat_i(1))])
        );
        let p4 = comps.iter().find(|c| c.monomial == "p^4").unwrap();
        assert_eq!(
            p4.entries,
            BTreeMap::from([((vec![0], vec![3], -3), rat(1, 6))])
        );
    }

    #[test]
    fn limit_keeps_zero_slice() {
        let y = ring_y();
        let mut s = LogSeries::new(
            &y,
            vec!["x".to_string(), "y".to_string()],
            vec![Exponent::trivial(&y), Exponent::trivial(&y)],
            ZLaurent::one(&y),
            3,
        );
        s.set_coeff(vec![0, 0], ZLaurent::one(&y));
        s.set_coeff(vec![0, 2], ZLaurent::scalar(&y, rat_i(7)));
        s.set_coeff(vec![1, 1], ZLaurent::scalar(&y, rat_i(5)));
        let lim = limit_at_zero(&s, "x").unwrap();
        assert_eq!(lim.vars(), &["y".to_string()]);
        assert_eq!(lim.coeff(&[0]), ZLaurent::one(&y));
        assert_eq!(lim.coeff(&[2]), ZLaurent::scalar(&y, rat_i(7)));
        assert!(lim.coeff(&[1]).is_zero());
    }

    #[test]
    fn limit_rejects_fractional_exponent() {
        let y = ring_y();
        let mut s = LogSeries::new(
            &y,
            vec!["x".to_string()],
            vec![Exponent::new(rat(1, 3), y.zero())],
            ZLaurent::one(&y),
            2,
        );
        s.set_coeff(vec![0], ZLaurent::one(&y));
        assert!(matches!(
            limit_at_zero(&s, "x"),
            Err(SeriesError::MonodromyObstruction { .. })
        ));
    }

    #[test]
    fn limit_of_positive_power_is_zero() {
        let y = ring_y();
        let mut s = LogSeries::new(
            &y,
            vec!["x".to_string()],
            vec![Exponent::new(rat_i(2), y.zero())],
            ZLaurent::one(&y),
            2,
        );
        s.set_coeff(vec![0], ZLaurent::one(&y));
        let lim = limit_at_zero(&s, "x").unwrap();
        assert!(lim.is_zero());
        assert!(lim.vars().is_empty());
    }

    #[test]
    fn linear_map_transports_prefactor() {
        let x = ring_x();
        let l = tower_map_x_to_y();
        let xi = x.gen_elem("xi");
        let mut s = LogSeries::new(
            &x,
            vec!["q".to_string()],
            vec![Exponent::new(Rat::zero(), xi.clone())],
            ZLaurent::from_ring(xi.scale(&rat_i(3))),
            2,
        );
        s.set_coeff(vec![1], ZLaurent::from_ring(x.gen_elem("h")));
        let t = apply_linear_map(&l, &s);
        let y = ring_y();
        assert_eq!(t.exponents()[0].nilpotent, y.gen_elem("p"));
        assert_eq!(
            t.global_factor(),
            &ZLaurent::from_ring(y.gen_elem("p").scale(&rat_i(3)))
        );
        // h maps to zero, so the index-1 coefficient disappears.
        assert!(t.coeff(&[1]).is_zero());
    }

    #[test]
    fn expansion_is_linear() {
        let y = ring_y();
        let p = y.gen_elem("p");
        let mk = |c: i64| {
            let mut s = LogSeries::new(
                &y,
                vec!["y".to_string()],
                vec![Exponent::new(Rat::zero(), p.clone())],
                ZLaurent::one(&y),
                2,
            );
            s.set_coeff(vec![1], ZLaurent::scalar(&y, rat_i(c)));
            s
        };
        let a = mk(2);
        let b = mk(5);
        let sum = &a + &b;
        let ca = expand_components(&a);
        let cs = expand_components(&sum);
        // Entries scale linearly: component entries of sum are 7/2 of a.
        for (x1, x2) in ca.iter().zip(&cs) {
            assert_eq!(x1.basis_index, x2.basis_index);
            for (k, v) in &x1.entries {
                assert_eq!(x2.entries[k], v * rat(7, 2));
            }
        }
    }
}
