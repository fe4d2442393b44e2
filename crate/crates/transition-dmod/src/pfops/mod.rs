//! Picard-Fuchs operators in the z-scaled logarithmic derivatives.
//!
//! An operator is a finite sum of terms
//!
//! ```text
//! v^k * prod_v (z d_v)^(a_v) * c(z)
//! ```
//!
//! with an integer (possibly negative) exponent vector k on the
//! variables, commuting symbols `z d_v = z v d/dv`, and a rational
//! polynomial in z. The normal form keeps variable monomials to the left
//! of all derivative symbols; multiplication resolves the commutation
//! rule `(z d_v) v^k = v^k (z d_v + k z)` by binomial expansion.

use crate::cohring::{rat_i, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

mod action;
mod monodromy;
mod parse;
mod subst;

pub use action::{apply, verify_annihilation, AnnihilationReport, OperatorCheck};
pub use monodromy::{
    classify_monodromy, independence_rank, monodromy_filtration, MonodromyClass, MonodromyKind,
};
pub use parse::{load_system, parse_operator, parse_system, print_operator, system_names};
pub use subst::{substitute_variables, VarMap};

#[derive(Debug, Error)]
pub enum PfError {
    #[error("truncation too low: need series order {needed}, have usable order {available}")]
    OrderTooLow { needed: u32, available: i64 },
    #[error("variable map is not an invertible monomial substitution: {0}")]
    MapError(String),
    #[error("solution list does not span the expected space: rank {got}, expected {expected}")]
    NotABasis { got: usize, expected: usize },
    #[error("operator parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("operator shape error: {0}")]
    Shape(String),
}

/// Polynomial in z with rational coefficients, sparsely keyed by power.
pub type ZPoly = BTreeMap<i32, Rat>;

fn zpoly_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = ZPoly::new();
    for (&i, c) in a {
        for (&j, d) in b {
            let entry = out.entry(i + j).or_insert_with(Rat::zero);
            *entry += c * d;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A differential operator in normal form over a fixed variable list.
#[derive(Clone, PartialEq, Eq)]
pub struct DiffOperator {
    vars: Vec<String>,
    /// (variable exponents, derivative powers) -> polynomial in z.
    terms: BTreeMap<(Vec<i64>, Vec<u32>), ZPoly>,
}

impl DiffOperator {
    pub fn zero(vars: &[String]) -> Self {
        DiffOperator {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(vars: &[String], c: Rat) -> Self {
        let mut op = Self::zero(vars);
        if !c.is_zero() {
            op.terms.insert(
                (vec![0; vars.len()], vec![0; vars.len()]),
                ZPoly::from([(0, c)]),
            );
        }
        op
    }

    pub fn one(vars: &[String]) -> Self {
        Self::scalar(vars, Rat::one())
    }

    /// The formal parameter z.
    pub fn z(vars: &[String]) -> Self {
        let mut op = Self::zero(vars);
        op.terms.insert(
            (vec![0; vars.len()], vec![0; vars.len()]),
            ZPoly::from([(1, Rat::one())]),
        );
        op
    }

    /// The variable monomial v^k.
    pub fn var_pow(vars: &[String], name: &str, k: i64) -> Self {
        let idx = var_index(vars, name);
        let mut op = Self::zero(vars);
        let mut shift = vec![0; vars.len()];
        shift[idx] = k;
        op.terms
            .insert((shift, vec![0; vars.len()]), ZPoly::from([(0, Rat::one())]));
        op
    }

    pub fn var(vars: &[String], name: &str) -> Self {
        Self::var_pow(vars, name, 1)
    }

    /// The symbol z d_v (z times the logarithmic derivative in v).
    pub fn delta(vars: &[String], name: &str) -> Self {
        let idx = var_index(vars, name);
        let mut op = Self::zero(vars);
        let mut dpow = vec![0; vars.len()];
        dpow[idx] = 1;
        op.terms
            .insert((vec![0; vars.len()], dpow), ZPoly::from([(0, Rat::one())]));
        op
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<i64>, Vec<u32>), ZPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total index displacement any term can cause, used for
    /// truncation tracking when the operator acts on a series.
    pub fn shift_budget(&self) -> u32 {
        self.terms
            .keys()
            .map(|(shift, _)| shift.iter().map(|k| k.unsigned_abs() as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Relabel the variables without changing the operator's structure.
    pub fn rename_vars(&self, new: &[String]) -> DiffOperator {
        assert_eq!(new.len(), self.vars.len(), "variable arity mismatch");
        DiffOperator {
            vars: new.to_vec(),
            terms: self.terms.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffOperator {
        let mut acc = Self::one(&self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a single monomial term with no derivative symbols.
    pub fn monomial_inverse(&self) -> Result<DiffOperator, PfError> {
        if self.terms.len() != 1 {
            return Err(PfError::Shape(format!(
                "cannot invert a {}-term operator",
                self.terms.len()
            )));
        }
        let ((shift, dpow), poly) = self.terms.iter().next().unwrap();
        if dpow.iter().any(|&a| a != 0) {
            return Err(PfError::Shape(
                "cannot invert a term with derivative symbols".to_string(),
            ));
        }
        if poly.len() != 1 {
            return Err(PfError::Shape(
                "cannot invert a nonmonomial z polynomial".to_string(),
            ));
        }
        let (&zp, c) = poly.iter().next().unwrap();
        let mut out = Self::zero(&self.vars);
        out.terms.insert(
            (shift.iter().map(|k| -k).collect(), dpow.clone()),
            ZPoly::from([(-zp, c.recip())]),
        );
        Ok(out)
    }

    fn insert_term(&mut self, key: (Vec<i64>, Vec<u32>), poly: ZPoly) {
        if poly.is_empty() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                for (zp, c) in poly {
                    let entry = existing.entry(zp).or_insert_with(Rat::zero);
                    *entry += c;
                }
                existing.retain(|_, c| !c.is_zero());
                if existing.is_empty() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, poly);
            }
        }
    }

    fn assert_same_vars(&self, other: &DiffOperator) {
        assert_eq!(
            self.vars, other.vars,
            "operators live over different variable lists"
        );
    }
}

fn var_index(vars: &[String], name: &str) -> usize {
    vars.iter()
        .position(|v| v == name)
        .unwrap_or_else(|| panic!("no variable named {name}"))
}

fn binomial(n: u32, k: u32) -> Rat {
    let mut acc = Rat::one();
    for t in 0..k {
        acc *= rat_i((n - t) as i64);
        acc /= rat_i((t + 1) as i64);
    }
    acc
}

impl std::ops::Add for &DiffOperator {
    type Output = DiffOperator;
    fn add(self, rhs: &DiffOperator) -> DiffOperator {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (key, poly) in &rhs.terms {
            out.insert_term(key.clone(), poly.clone());
        }
        out
    }
}

impl std::ops::Sub for &DiffOperator {
    type Output = DiffOperator;
    fn sub(self, rhs: &DiffOperator) -> DiffOperator {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        let terms = self
            .terms
            .iter()
            .map(|(k, poly)| {
                (
                    k.clone(),
                    poly.iter().map(|(&zp, c)| (zp, -c.clone())).collect(),
                )
            })
            .collect();
        DiffOperator {
            vars: self.vars.clone(),
            terms,
        }
    }
}

impl std::ops::Mul for &DiffOperator {
    type Output = DiffOperator;
    fn mul(self, rhs: &DiffOperator) -> DiffOperator {
        self.assert_same_vars(rhs);
        let n = self.vars.len();
        let mut out = DiffOperator::zero(&self.vars);
        for ((a_shift, a_dpow), a_poly) in &self.terms {
            for ((b_shift, b_dpow), b_poly) in &rhs.terms {
                // Move b's variable monomial through a's derivative word:
                // prod_v (z d_v)^{a_v} * v^{b} = v^{b} * prod_v (z d_v + b_v z)^{a_v}.
                // Expand each factor binomially over the commuting symbols.
                let shift: Vec<i64> = a_shift
                    .iter()
                    .zip(b_shift)
                    .map(|(x, y)| x + y)
                    .collect();
                let base_poly = zpoly_mul(a_poly, b_poly);

                // Distribute over gamma <= a_dpow componentwise.
                let mut partials: Vec<(Vec<u32>, ZPoly)> =
                    vec![(Vec::with_capacity(n), ZPoly::from([(0, Rat::one())]))];
                for v in 0..n {
                    let av = a_dpow[v];
                    let bv = b_shift[v];
                    let mut next = Vec::new();
                    for (gammas, poly) in &partials {
                        for g in 0..=av {
                            // C(av, g) * (bv z)^{av-g} * (z d_v)^g
                            let mut c = binomial(av, g);
                            let extra = (av - g) as i32;
                            if bv == 0 && extra > 0 {
                                continue;
                            }
                            for _ in 0..extra {
                                c *= rat_i(bv);
                            }
                            if c.is_zero() {
                                continue;
                            }
                            let mut gs = gammas.clone();
                            gs.push(g);
                            let scaled: ZPoly = poly
                                .iter()
                                .map(|(&zp, cc)| (zp + extra, cc * &c))
                                .collect();
                            next.push((gs, scaled));
                        }
                    }
                    partials = next;
                }
                for (gammas, poly) in partials {
                    let dpow: Vec<u32> = gammas
                        .iter()
                        .zip(b_dpow)
                        .map(|(g, b)| g + b)
                        .collect();
                    out.insert_term((shift.clone(), dpow), zpoly_mul(&poly, &base_poly));
                }
            }
        }
        out
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", parse::print_operator(self))
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", parse::print_operator(self))
    }
}

/// A named system of operators with its expected holonomic rank.
#[derive(Clone, Debug)]
pub struct OperatorSystem {
    pub name: String,
    pub vars: Vec<String>,
    pub operators: Vec<(String, DiffOperator)>,
    pub expected_rank: usize,
}

impl OperatorSystem {
    pub fn operator(&self, name: &str) -> Option<&DiffOperator> {
        self.operators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, op)| op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohring::rat;

    fn v2() -> Vec<String> {
        vec!["x".to_string(), "y".to_string()]
    }

    #[test]
    fn commutation_rule() {
        let vars = v2();
        let d = DiffOperator::delta(&vars, "x");
        let x = DiffOperator::var(&vars, "x");
        // (z d_x) x = x (z d_x + z)
        let lhs = &d * &x;
        let expect = &(&x * &d) + &(&x * &DiffOperator::z(&vars));
        assert_eq!(lhs, expect);
        // and x (z d_x) stays put
        let rhs = &x * &d;
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn commutation_with_negative_power() {
        let vars = v2();
        let d = DiffOperator::delta(&vars, "x");
        let xinv = DiffOperator::var_pow(&vars, "x", -1);
        // (z d_x) x^{-1} = x^{-1} (z d_x - z)
        let lhs = &d * &xinv;
        let expect = &(&xinv * &d) - &(&xinv * &DiffOperator::z(&vars));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn higher_power_commutation() {
        let vars = v2();
        let d = DiffOperator::delta(&vars, "y");
        let y2 = DiffOperator::var_pow(&vars, "y", 2);
        // (z d_y)^2 y^2 = y^2 (z d_y + 2z)^2
        let lhs = &d.pow(2) * &y2;
        let two_z = &DiffOperator::z(&vars) * &DiffOperator::scalar(&vars, rat_i(2));
        let expect = &y2 * &(&d + &two_z).pow(2);
        assert_eq!(lhs, expect);
    }

    #[test]
    fn cross_variable_symbols_commute() {
        let vars = v2();
        let dx = DiffOperator::delta(&vars, "x");
        let dy = DiffOperator::delta(&vars, "y");
        assert_eq!(&dx * &dy, &dy * &dx);
        let y = DiffOperator::var(&vars, "y");
        assert_eq!(&dx * &y, &y * &dx);
    }

    #[test]
    fn monomial_inverse_roundtrip() {
        let vars = v2();
        let m = DiffOperator::var_pow(&vars, "x", 2);
        let m = &m * &DiffOperator::scalar(&vars, rat(3, 2));
        let inv = m.monomial_inverse().unwrap();
        assert_eq!(&m * &inv, DiffOperator::one(&vars));
        let d = DiffOperator::delta(&vars, "x");
        assert!(d.monomial_inverse().is_err());
    }

    #[test]
    fn shift_budget_tracks_l1_norm() {
        let vars = v2();
        let x = DiffOperator::var(&vars, "x");
        let y = DiffOperator::var(&vars, "y");
        let xy = &x * &y;
        let xinv = DiffOperator::var_pow(&vars, "x", -1);
        let op = &(&xy + &xinv) + &DiffOperator::delta(&vars, "x");
        assert_eq!(op.shift_budget(), 2);
    }
}
