//! Coefficient-level comparison of the fractional-exponent continued
//! solutions with the regularized narrow-sector series: along the first
//! index, with the second index held at zero and z at 1, the two
//! coefficient sequences agree up to one overall scalar per sector.

use super::series::{fjrw_regularized, FJRWSeries, GammaConst, Sector};
use super::FjrwError;
use crate::cohring::Rat;
use crate::logseries::{coefficient, model, Family, ModelName};
use num_traits::{One, Zero};
use std::fmt::Write;

/// One comparison row: the continued-solution coefficient c_l, the stored
/// regularized coefficient d_l, and c_l/d_l divided by the l = 0 ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub l: u32,
    pub continued: Rat,
    pub regularized: Rat,
    pub normalized: Rat,
}

/// Comparison result for one sector. The stored ratio is c_l/d_l, checked
/// to be the same rational for every l; the limit constant reinstates the
/// recorded per-sector constant, giving the scalar that multiplies the
/// full regularized sector to produce the continued solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorComparison {
    pub sector: Sector,
    pub stored_ratio: Rat,
    pub limit_constant: GammaConst,
    pub rows: Vec<ComparisonRow>,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub family: Family,
    pub sectors: Vec<SectorComparison>,
}

fn sector_model(family: Family, sector: Sector) -> ModelName {
    match (family, sector) {
        (Family::Local, Sector::Phi0) => ModelName::LocalI5,
        (Family::Local, Sector::Phi1) => ModelName::LocalI6,
        (Family::Global, Sector::Phi0) => ModelName::GlobalI5,
        (Family::Global, Sector::Phi1) => ModelName::GlobalI6,
    }
}

/// Scalar coefficients of the continued solution attached to a sector at
/// indices (l, 0) for l = 0..=order, evaluated at z = 1. At the zero
/// second index these coefficients carry no z powers and no nilpotent
/// part; any other shape is an error.
pub fn continued_scalars(
    family: Family,
    sector: Sector,
    order: u32,
) -> Result<Vec<Rat>, FjrwError> {
    let m = model(sector_model(family, sector));
    let mut out = Vec::with_capacity(order as usize + 1);
    for l in 0..=order {
        let zl = coefficient(&m, &[l as i64, 0])?;
        let mut val = Rat::zero();
        for (&zp, el) in zl.terms() {
            if zp != 0 {
                return Err(FjrwError::Shape {
                    l,
                    msg: format!("unexpected z power {zp}"),
                });
            }
            if !el.is_scalar() {
                return Err(FjrwError::Shape {
                    l,
                    msg: format!("nilpotent part in {el}"),
                });
            }
            val += el.scalar_part();
        }
        out.push(val);
    }
    Ok(out)
}

/// Check one sector: the ratio of each continued coefficient to the
/// stored regularized one must equal the l = 0 ratio exactly.
pub fn sector_comparison(
    sector: Sector,
    continued: &[Rat],
    reg: &FJRWSeries,
) -> Result<SectorComparison, FjrwError> {
    let terms = reg.terms(sector);
    assert!(
        continued.len() <= terms.len(),
        "continued sequence is longer than the regularized one"
    );
    let mut rows = Vec::with_capacity(continued.len());
    let mut stored_ratio = Rat::zero();
    for (l, c) in continued.iter().enumerate() {
        let d = &terms[l].1;
        if d.is_zero() || (l == 0 && c.is_zero()) {
            return Err(FjrwError::Shape {
                l: l as u32,
                msg: "vanishing leading coefficient".to_string(),
            });
        }
        let ratio = c / d;
        if l == 0 {
            stored_ratio = ratio.clone();
        }
        let normalized = &ratio / &stored_ratio;
        if !normalized.is_one() {
            return Err(FjrwError::ComparisonFailed {
                sector,
                l: l as u32,
                found: ratio,
                expected: stored_ratio,
            });
        }
        rows.push(ComparisonRow {
            l: l as u32,
            continued: c.clone(),
            regularized: d.clone(),
            normalized,
        });
    }
    let limit_constant = reg
        .recorded_constant(sector)
        .inv()
        .expect("recorded constant is nonzero")
        .scale(&stored_ratio);
    Ok(SectorComparison {
        sector,
        stored_ratio,
        limit_constant,
        rows,
    })
}

/// Full comparison for one family: phi0 against the 1/3-exponent solution
/// and phi1 against the 2/3-exponent one, for l up to `order`.
pub fn compare_limit(family: Family, order: u32) -> Result<Comparison, FjrwError> {
    let reg = fjrw_regularized(order);
    let mut sectors = Vec::with_capacity(2);
    for sector in Sector::ALL {
        let continued = continued_scalars(family, sector, order)?;
        sectors.push(sector_comparison(sector, &continued, &reg)?);
    }
    Ok(Comparison { family, sectors })
}

/// Render a comparison as a CSV table with one row per (sector, l).
pub fn comparison_table(c: &Comparison) -> String {
    let mut out = String::from("sector,l,continued,regularized,normalized\n");
    for s in &c.sectors {
        for r in &s.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.sector, r.l, r.continued, r.regularized, r.normalized
            )
            .unwrap();
        }
    }
    out
}
