//! Rank and monodromy accounting on expanded series components.

use super::PfError;
use crate::cohring::{rat_i, Rat};
use crate::logseries::Component;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// How a single component transforms under one loop around v = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonodromyKind {
    /// Single valued: nonnegative integer exponents, no logs.
    Trivial,
    /// Eigenvalue a primitive k-th root of unity: exponents in (1/k)Z, no logs.
    FiniteOrder(u32),
    /// Integer exponents with log terms.
    Unipotent,
    /// Fractional exponents mixed with logs, or negative integer exponents.
    Mixed,
}

/// Classification together with the evidence it was read off from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyClass {
    pub kind: MonodromyKind,
    /// Least common denominator of the exponents of v that occur.
    pub exponent_denominator: u32,
    /// Largest power of log v that occurs.
    pub max_log_power: u32,
}

/// Classify the monodromy of one component around v = 0 by inspecting
/// its exponents of v and its log v powers.
pub fn classify_monodromy(c: &Component, v: &str) -> Result<MonodromyClass, PfError> {
    let pos = c
        .vars
        .iter()
        .position(|name| name == v)
        .ok_or_else(|| PfError::Shape(format!("component has no variable {v}")))?;
    let mut denom = BigInt::one();
    let mut max_log = 0u32;
    let mut negative_integer = false;
    for (idx, logs, _) in c.entries.keys() {
        let e = &c.exponents[pos] + rat_i(idx[pos]);
        denom = denom.lcm(e.denom());
        if e.denom().is_one() && e.numer() < &BigInt::zero() {
            negative_integer = true;
        }
        max_log = max_log.max(logs[pos]);
    }
    let denom: u32 = denom
        .try_into()
        .map_err(|_| PfError::Shape("exponent denominator overflow".to_string()))?;
    let kind = match (denom, max_log, negative_integer) {
        (1, 0, false) => MonodromyKind::Trivial,
        (k, 0, false) if k > 1 => MonodromyKind::FiniteOrder(k),
        (1, _, false) => MonodromyKind::Unipotent,
        _ => MonodromyKind::Mixed,
    };
    Ok(MonodromyClass {
        kind,
        exponent_denominator: denom,
        max_log_power: max_log,
    })
}

/// Dimension of the rational span of the given components, viewed as
/// functions of the variables, their logs, and z. Columns are indexed by
/// (total exponent per variable, log powers, z power); fractional
/// exponents and distinct log degrees are distinct coordinates. Exact
/// Gaussian elimination, no floating point.
pub fn independence_rank(solutions: &[Component]) -> usize {
    if solutions.is_empty() {
        return 0;
    }
    let vars = &solutions[0].vars;
    let mut cols: BTreeMap<(Vec<Rat>, Vec<u32>, i32), usize> = BTreeMap::new();
    let mut rows: Vec<BTreeMap<usize, Rat>> = Vec::new();
    for s in solutions {
        assert_eq!(
            &s.vars, vars,
            "components live over different variable lists"
        );
        let mut row = BTreeMap::new();
        for ((idx, logs, zp), c) in &s.entries {
            let exps: Vec<Rat> = s
                .exponents
                .iter()
                .zip(idx)
                .map(|(r, d)| r + rat_i(*d))
                .collect();
            let ncols = cols.len();
            let col = *cols.entry((exps, logs.clone(), *zp)).or_insert(ncols);
            let entry = row.entry(col).or_insert_with(Rat::zero);
            *entry += c;
        }
        row.retain(|_, c| !c.is_zero());
        rows.push(row);
    }
    matrix_rank(rows)
}

fn matrix_rank(mut rows: Vec<BTreeMap<usize, Rat>>) -> usize {
    let mut rank = 0;
    loop {
        let mut pivot: Option<(usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if let Some((&c, _)) = r.iter().next() {
                if pivot.map_or(true, |(_, pc)| c < pc) {
                    pivot = Some((i, c));
                }
            }
        }
        let Some((pi, pc)) = pivot else { break };
        let prow = rows.swap_remove(pi);
        let pval = prow.get(&pc).unwrap().clone();
        for r in rows.iter_mut() {
            if let Some(v) = r.get(&pc).cloned() {
                let factor = &v / &pval;
                for (c, pv) in &prow {
                    let entry = r.entry(*c).or_insert_with(Rat::zero);
                    *entry -= &factor * pv;
                }
                r.retain(|_, val| !val.is_zero());
            }
        }
        rank += 1;
    }
    rank
}

/// Split a solution basis along triviality of the monodromy around
/// v = 0. Returns the dimension of the span of the trivially monodromic
/// members and the dimension of the quotient. The list must span a
/// space of the expected dimension.
pub fn monodromy_filtration(
    solutions: &[Component],
    v: &str,
    expected_rank: usize,
) -> Result<(usize, usize), PfError> {
    let total = independence_rank(solutions);
    if total != expected_rank {
        return Err(PfError::NotABasis {
            got: total,
            expected: expected_rank,
        });
    }
    let trivial: Vec<Component> = solutions
        .iter()
        .filter(|c| {
            classify_monodromy(c, v)
                .map(|cl| cl.kind == MonodromyKind::Trivial)
                .unwrap_or(false)
        })
        .cloned()
        .collect();
    let t = independence_rank(&trivial);
    Ok((t, total - t))
}
