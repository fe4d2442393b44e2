//! Series constructions over the formal transition ring: the J-function of
//! a finite curve table, the closed-form exceptional multiple covers, the
//! split into the two parts, and the restriction onto the contracted-side
//! variables with fiberwise summed counts.

use super::{ConifoldError, TransitionData};
use crate::cohring::{rat, Rat, RingElement, RingMap, RingSpec, ZLaurent};
use crate::logseries::{Exponent, LogSeries};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A J-type series: a unit coefficient at the origin and otherwise only
/// z^{-2} curve-class terms and z^{-3} point-class terms, all riding on the
/// divisor-valued prefactor exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CYJSeries {
    series: LogSeries,
}

impl CYJSeries {
    /// Wrap a series after checking the J-shape of every coefficient.
    pub fn new(series: LogSeries) -> Result<Self, ConifoldError> {
        check_shape(&series)?;
        Ok(CYJSeries { series })
    }

    pub fn series(&self) -> &LogSeries {
        &self.series
    }

    pub fn into_series(self) -> LogSeries {
        self.series
    }
}

impl std::ops::Add for &CYJSeries {
    type Output = CYJSeries;
    fn add(self, rhs: &CYJSeries) -> CYJSeries {
        CYJSeries {
            series: &self.series + &rhs.series,
        }
    }
}

fn check_shape(series: &LogSeries) -> Result<(), ConifoldError> {
    for (idx, zl) in series.coeffs() {
        let at_origin = idx.iter().all(|&x| x == 0);
        for (&k, elem) in zl.terms() {
            let ok = match k {
                0 => at_origin && elem.nilpotent_part().is_zero(),
                -2 => elem.homogeneous_degree() == Some(4),
                -3 => elem.homogeneous_degree() == Some(6),
                _ => false,
            };
            if !ok {
                return Err(ConifoldError::Shape(format!(
                    "coefficient at {idx:?} carries a non-J term at z^{k}"
                )));
            }
        }
    }
    Ok(())
}

/// Empty series carrying the prefactor: variables q1..qn with divisor-slot
/// exponents and no coefficients.
fn prefactor_series(ring: &Arc<RingSpec>, slots: usize, order: u32) -> LogSeries {
    let vars = (1..=slots).map(|i| format!("q{i}")).collect();
    let exponents = (1..=slots)
        .map(|i| Exponent::new(Rat::zero(), ring.gen_elem(&format!("d{i}"))))
        .collect();
    LogSeries::new(ring, vars, exponents, ZLaurent::one(ring), order)
}

/// The degree-4 slot combination representing an integer curve class.
fn curve_class(ring: &Arc<RingSpec>, beta: &[i64]) -> RingElement {
    let mut acc = ring.zero();
    for (i, &b) in beta.iter().enumerate() {
        if b != 0 {
            acc = &acc + &ring.gen_elem(&format!("c{}", i + 1)).scale(&rat(b, 1));
        }
    }
    acc
}

/// The J-coefficient of one counted class: z^{-2} N [beta] - 2 z^{-3} N [pt].
fn j_coeff(ring: &Arc<RingSpec>, beta: &[i64], count: &Rat) -> ZLaurent {
    let curve = curve_class(ring, beta).scale(count);
    let point = ring.gen_elem("pt").scale(&(count * &rat(-2, 1)));
    &ZLaurent::monomial(curve, -2) + &ZLaurent::monomial(point, -3)
}

fn series_from_table(
    ring: &Arc<RingSpec>,
    slots: usize,
    table: &BTreeMap<Vec<i64>, Rat>,
    order: u32,
) -> LogSeries {
    let mut s = prefactor_series(ring, slots, order);
    s.set_coeff(vec![0; slots], ZLaurent::one(ring));
    for (beta, count) in table {
        if LogSeries::index_degree(beta) > order {
            continue;
        }
        s.set_coeff(beta.clone(), j_coeff(ring, beta, count));
    }
    s
}

/// J-function of the data's curve table: the prefactor times
/// 1 + z^{-2} sum q^beta N_beta [beta] - 2 z^{-3} sum q^beta N_beta [pt],
/// truncated at `order`. Covers of the exceptional classes are not part of
/// the table; see [`total_j_series`] for the full series.
pub fn cy_j_series(data: &TransitionData, order: u32) -> CYJSeries {
    CYJSeries {
        series: series_from_table(data.x_ring(), data.r() + data.m(), data.gw(), order),
    }
}

/// Closed-form contribution of all multiple covers of one exceptional
/// class: sum over n >= 1 of q^{nE} (z^{-2} [E]/n^2 - 2 z^{-3} [pt]/n^3),
/// which is the class-level image of the cover counts N_{nE} = 1/n^3.
pub fn multiple_cover_series(data: &TransitionData, e_index: usize, order: u32) -> CYJSeries {
    let ring = data.x_ring();
    let slots = data.r() + data.m();
    let mut s = prefactor_series(ring, slots, order);
    let e_full = data.exceptional_full(e_index);
    let e_degree = LogSeries::index_degree(&e_full) as u64;
    let curve = curve_class(ring, &e_full);
    let point = ring.gen_elem("pt");
    let mut n = 1i64;
    while n as u64 * e_degree <= order as u64 {
        let idx: Vec<i64> = e_full.iter().map(|&x| x * n).collect();
        let c2 = curve.scale(&rat(1, n * n));
        let c3 = point.scale(&rat(-2, n * n * n));
        s.set_coeff(idx, &ZLaurent::monomial(c2, -2) + &ZLaurent::monomial(c3, -3));
        n += 1;
    }
    CYJSeries { series: s }
}

/// The full J-function: table classes plus the cover counts N_{nE} = 1/n^3
/// of every exceptional class, assembled through one merged count table.
/// Covers of coinciding classes accumulate, and the curve slot picks up
/// [nE] = n[E], so this construction meets the per-class closed forms of
/// [`multiple_cover_series`] only through the identity they both encode.
pub fn total_j_series(data: &TransitionData, order: u32) -> CYJSeries {
    let mut merged = data.gw().clone();
    for i in 0..data.k() {
        let e_full = data.exceptional_full(i);
        let e_degree = LogSeries::index_degree(&e_full) as u64;
        let mut n = 1i64;
        while n as u64 * e_degree <= order as u64 {
            let idx: Vec<i64> = e_full.iter().map(|&x| x * n).collect();
            let add = rat(1, n * n * n);
            merged
                .entry(idx)
                .and_modify(|c| *c += &add)
                .or_insert(add);
            n += 1;
        }
    }
    CYJSeries {
        series: series_from_table(data.x_ring(), data.r() + data.m(), &merged, order),
    }
}

/// Split the full J-function into the table part (every class there has
/// nonvanishing pushforward) and the sum of the exceptional cover series.
pub fn decompose(data: &TransitionData, order: u32) -> (CYJSeries, CYJSeries) {
    let j1 = cy_j_series(data, order);
    let mut j2 = CYJSeries {
        series: prefactor_series(data.x_ring(), data.r() + data.m(), order),
    };
    for i in 0..data.k() {
        j2 = &j2 + &multiple_cover_series(data, i, order);
    }
    (j1, j2)
}

/// Linear map between the formal rings: the surviving divisor slots carry
/// over, the contracted ones die, curve slots push forward through the
/// integer matrix, and the point slot survives.
fn class_map(data: &TransitionData) -> Result<RingMap, ConifoldError> {
    let from = data.x_ring();
    let to = data.y_ring();
    let n = data.r() + data.m();
    let mut images = Vec::with_capacity(from.dim());
    for mono in from.basis() {
        let img = match mono.0.iter().position(|&e| e > 0) {
            None => to.one(),
            Some(gi) if gi < n => {
                if gi < data.r() {
                    to.gen_elem(&format!("d{}", gi + 1))
                } else {
                    to.zero()
                }
            }
            Some(gi) if gi < 2 * n => {
                let col = gi - n;
                let mut acc = to.zero();
                for (j, row) in data.phi().iter().enumerate() {
                    if row[col] != 0 {
                        acc = &acc + &to.gen_elem(&format!("c{}", j + 1)).scale(&rat(row[col], 1));
                    }
                }
                acc
            }
            Some(_) => to.gen_elem("pt"),
        };
        images.push(img);
    }
    Ok(RingMap::new(from, to, images)?)
}

fn map_laurent(map: &RingMap, zl: &ZLaurent) -> ZLaurent {
    let mut out = ZLaurent::zero(map.to_spec());
    for (&k, elem) in zl.terms() {
        out = &out + &ZLaurent::monomial(map.apply(elem), k);
    }
    out
}

/// Set the contracted variables to 1 and push every class forward.
/// Coefficients landing on a common image class add up, which realizes the
/// fiberwise sum of counts. A nonzero class pushing forward to zero has an
/// infinite fiber behind the truncation, so its presence in the input is an
/// error; the table part of the J-function never contains one.
pub fn restrict_to_locus(
    j1: &CYJSeries,
    data: &TransitionData,
    order: u32,
) -> Result<CYJSeries, ConifoldError> {
    let map = class_map(data)?;
    let mut out = prefactor_series(data.y_ring(), data.r(), order);
    for (idx, zl) in j1.series().coeffs() {
        let image = if idx.iter().all(|&x| x == 0) {
            vec![0i64; data.r()]
        } else {
            let image = data.pushforward(idx);
            if image.iter().all(|&x| x == 0) {
                return Err(ConifoldError::LambdaInfinite(format!("{idx:?}")));
            }
            image
        };
        if LogSeries::index_degree(&image) > order {
            continue;
        }
        let mapped = map_laurent(&map, zl);
        let merged = &out.coeff(&image) + &mapped;
        out.set_coeff(image, merged);
    }
    CYJSeries::new(out)
}

/// J-function built directly from the data's contracted-side table, the
/// comparison target for [`restrict_to_locus`].
pub fn expected_y_series(data: &TransitionData, order: u32) -> CYJSeries {
    CYJSeries {
        series: series_from_table(data.y_ring(), data.r(), data.gw_y(), order),
    }
}
