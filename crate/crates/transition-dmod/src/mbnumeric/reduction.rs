//! Continuation coefficients and their reduction to the closed form.
//!
//! After closing the contour to the left, the continued series reads
//! sum over (l, d2) of x^l y^{d2} times a coefficient assembled from the
//! shifted-pole residue and the hypergeometric prefactor. The same series
//! has an exact closed form built from Pochhammer ratios in the quotient
//! ring. [`verify_reduction`] materializes both sides as jets and compares
//! them up to one global constant, which is measured at (0, 0) and
//! reported, never guessed: the displayed formulas fix the two sides only
//! up to normalization, and the measured ratio is itself a result.

use super::factored::Factored;
use super::jets::{jet_gamma, jet_recip, jet_recip_gamma, unit_sinc, Jet};
use super::residues::g_term;
use super::MbError;
use crate::cohring::{free_hw, free_hw_to_x, Rat, ZLaurent};
use crate::logseries::{continued_x_series, Family};
use num_complex::Complex64;
use num_traits::One;
use std::f64::consts::PI;
use std::sync::Arc;

fn rat_i(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// The full series coefficient at x^l y^{d2} with every stiff factor still
/// symbolic. Exposed to let tests audit the exact cancellation: all linear
/// forms must net to exponent zero and the powers of pi and i must vanish.
pub(crate) fn continuation_factored(
    family: Family,
    l: u32,
    d2: u32,
    z: &Rat,
) -> Result<Factored, MbError> {
    let spec = free_hw();
    let zc = super::jets::rat_to_c64(z);
    let h = spec.gen_elem("h");
    let w = spec.gen_elem("w");
    let xi = &h + &w;
    let d2_sign = if d2 % 2 == 0 { Rat::one() } else { -Rat::one() };

    // sin(pi (xi - h)/z) = (pi/z) w sinc, shared by both models.
    let mut f = Factored::unit(&spec)
        .times_pi(1)
        .times_z(-1)
        .times_lin(&w, 1)
        .times_jet(&unit_sinc(
            Complex64::new(PI, 0.0) / zc,
            &Jet::from_element(&w),
        ))
        .times_jet(&jet_gamma(
            &Jet::one(&spec).add(&Jet::from_element(&w).scale(1.0 / zc)),
        )?)
        .times_jet(
            &jet_gamma(&Jet::one(&spec).add(&Jet::from_element(&h).scale(1.0 / zc)))?.pow(4),
        )
        .times_jet(&jet_gamma(
            &Jet::one(&spec).add(&Jet::from_element(&xi).scale(1.0 / zc)),
        )?)
        // (-q2)^{d2} sign and 1/Gamma(1 + xi/z + d2).
        .times_rat(d2_sign)
        .times_jet(&jet_recip_gamma(
            &Jet::from_scalar(&spec, Complex64::new(1.0 + d2 as f64, 0.0))
                .add(&Jet::from_element(&xi).scale(1.0 / zc)),
        )?);

    match family {
        Family::Local => {
            // Twist 3, bare h, 1/sin(3 pi h/z), 1/Gamma(1 + 3h/z), z^{-2 d2}.
            f = f
                .times_rat(rat_i(3))
                .times_lin(&h, 1)
                .times_pi(-1)
                .times_z(1)
                .times_rat(Rat::new(1.into(), 3.into()))
                .times_lin(&h, -1)
                .times_jet(&jet_recip(&unit_sinc(
                    Complex64::new(3.0 * PI, 0.0) / zc,
                    &Jet::from_element(&h),
                ))?)
                .times_jet(&jet_recip_gamma(
                    &Jet::one(&spec).add(&Jet::from_element(&h).scale(3.0 / zc)),
                )?)
                .times_z(-2 * d2 as i32);
        }
        Family::Global => {
            // Twist 3h + 2xi = 5h + 2w, 1/sin(pi (5h + 2w)/z),
            // 1/Gamma(1 + (5h + 2w)/z); no z^{-2 d2} here.
            let t = &h.scale(&rat_i(5)) + &w.scale(&rat_i(2));
            f = f
                .times_lin(&t, 1)
                .times_pi(-1)
                .times_z(1)
                .times_lin(&t, -1)
                .times_jet(&jet_recip(&unit_sinc(
                    Complex64::new(PI, 0.0) / zc,
                    &Jet::from_element(&t),
                ))?)
                .times_jet(&jet_recip_gamma(
                    &Jet::one(&spec).add(&Jet::from_element(&t).scale(1.0 / zc)),
                )?);
        }
    }

    let residue = g_term(&spec, family, d2, l as i64, Complex64::new(0.0, 0.0), z, false)?;
    Ok(f.times(&residue))
}

/// The continued-series coefficient at x^l y^{d2}, twist included,
/// materialized into the quotient ring.
pub fn continuation_coefficient(
    family: Family,
    l: u32,
    d2: u32,
    z: &Rat,
) -> Result<Jet, MbError> {
    let f = continuation_factored(family, l, d2, z)?;
    Ok(f.materialize(z)?.project(&free_hw_to_x()))
}

/// One compared index of a reduction run.
#[derive(Clone, Debug)]
pub struct ReductionRow {
    pub l: u32,
    pub d2: u32,
    pub rel_error: f64,
}

/// Outcome of comparing the continuation coefficients against the exact
/// closed-form series.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub family: Family,
    pub order: u32,
    pub z: Rat,
    /// Measured normalization between the two sides, fixed at (0, 0).
    pub constant: Complex64,
    pub rows: Vec<ReductionRow>,
    pub max_rel_error: f64,
    pub tolerance: f64,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.tolerance
    }
}

/// Compare the materialized continuation coefficients with the closed-form
/// coefficients for all l + d2 <= order, up to one measured constant.
/// Fails with [`MbError::ReductionMismatch`] naming the first offending
/// index when any coordinate deviates beyond the tolerance.
pub fn verify_reduction(
    family: Family,
    order: u32,
    tol: f64,
    z: &Rat,
) -> Result<ReductionReport, MbError> {
    verify_reduction_impl(family, order, tol, z, None)
}

/// [`verify_reduction`] with one computed coefficient negated first.
/// A self-test hook: the run must fail and must name the flipped index.
pub fn verify_reduction_with_flip(
    family: Family,
    order: u32,
    tol: f64,
    z: &Rat,
    flip: (u32, u32),
) -> Result<ReductionReport, MbError> {
    verify_reduction_impl(family, order, tol, z, Some(flip))
}

fn verify_reduction_impl(
    family: Family,
    order: u32,
    tol: f64,
    z: &Rat,
    flip: Option<(u32, u32)>,
) -> Result<ReductionReport, MbError> {
    let continued = continued_x_series(family, order)
        .map_err(|e| MbError::Shape(format!("continued series: {e}")))?;
    let twist = continued.global_factor().clone();

    let side = |l: u32, d2: u32| -> Result<(Jet, Jet), MbError> {
        let mut lhs = continuation_coefficient(family, l, d2, z)?;
        if flip == Some((l, d2)) {
            lhs = lhs.scale(Complex64::new(-1.0, 0.0));
        }
        let exact: ZLaurent = &continued.coeff(&[l as i64, d2 as i64]) * &twist;
        let rhs = Jet::from_zlaurent(&exact, z);
        Ok((lhs, rhs))
    };

    // Calibrate on the largest coordinate of the (0, 0) closed form.
    let (lhs0, rhs0) = side(0, 0)?;
    let x = Arc::clone(rhs0.spec());
    let cal = (0..x.dim())
        .max_by(|&i, &j| {
            rhs0.coord(i)
                .norm()
                .partial_cmp(&rhs0.coord(j).norm())
                .expect("finite coordinates")
        })
        .expect("nonempty basis");
    if rhs0.coord(cal).norm() == 0.0 {
        return Err(MbError::Shape(
            "closed form vanishes at (0, 0); cannot calibrate".to_string(),
        ));
    }
    let constant = lhs0.coord(cal) / rhs0.coord(cal);

    let mut rows = Vec::new();
    let mut max_rel = 0.0f64;
    let mut witness: Option<(u32, u32, f64)> = None;
    for total in 0..=order {
        for l in 0..=total {
            let d2 = total - l;
            let (lhs, rhs) = side(l, d2)?;
            let scaled = rhs.scale(constant);
            let scale = lhs.max_abs().max(scaled.max_abs()).max(1.0);
            let rel = lhs.distance(&scaled) / scale;
            rows.push(ReductionRow { l, d2, rel_error: rel });
            max_rel = max_rel.max(rel);
            if rel > tol && witness.is_none() {
                witness = Some((l, d2, rel));
            }
        }
    }

    let report = ReductionReport {
        family,
        order,
        z: z.clone(),
        constant,
        rows,
        max_rel_error: max_rel,
        tolerance: tol,
    };
    if let Some((l, d2, rel)) = witness {
        return Err(MbError::ReductionMismatch {
            family,
            index: (l, d2),
            deviation: rel,
            tolerance: tol,
        });
    }
    Ok(report)
}
