//! The Mellin-Barnes integrand, its residues, and rectangle contours.
//!
//! Both continuation kernels have the shape
//!
//! ```text
//!   g(s) = Gamma(s - d2 - w/z) q1^s / [(e^{2 pi i s} - 1) Gamma(1 + h/z + s)^4 Gamma(A(s))]
//! ```
//!
//! with A(s) = -3h/z - 3s for the local model and
//! A(s) = -(5h + 2w)/z - 3s - 2 d2 for the global one (in the free ring,
//! xi = h + w, so 3h + 2 xi = 5h + 2w). Since w is nilpotent, the poles of
//! a coordinate function of g sit at the integers: simple where only the
//! exponential factor degenerates, double at integers a <= d2 where the
//! leading Gamma's pole shadow lands on top of it. A residue at such a
//! location is therefore computed as a group: the two formal one-pole
//! contributions each carry an uncancelled 1/w which must be combined and
//! divided out exactly before a jet can be formed.

use super::factored::{divide_by_w, Factored};
use super::jets::{jet_exp, jet_gamma, jet_recip, jet_recip_gamma, unit_expm1, Jet};
use super::MbError;
use crate::cohring::{free_hw, Generator, Rat, RingElement, RingSpec};
use crate::logseries::Family;
use num_complex::Complex64;
use num_traits::One;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rat_i(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

fn rat_factorial(n: i64) -> Rat {
    let mut acc = Rat::one();
    for k in 2..=n {
        acc *= rat_i(k);
    }
    acc
}

fn z_c64(z: &Rat) -> Complex64 {
    super::jets::rat_to_c64(z)
}

/// scalar + coefficient * nilpotent element, as a jet.
fn arg_jet(
    spec: &Arc<RingSpec>,
    scalar: Complex64,
    nil: &RingElement,
    coeff: Complex64,
) -> Jet {
    Jet::from_scalar(spec, scalar).add(&Jet::from_element(nil).scale(coeff))
}

/// The integrand g(s) as a jet over the free h,w ring, for s away from the
/// integers and from the shifted Gamma poles.
pub fn eval_g(
    family: Family,
    d2: u32,
    s: Complex64,
    q1: Complex64,
    z: &Rat,
) -> Result<Jet, MbError> {
    let spec = free_hw();
    let zc = z_c64(z);
    let h = spec.gen_elem("h");
    let w = spec.gen_elem("w");

    // e^{2 pi i s} - 1 vanishes at the integers.
    let e_fac = (Complex64::new(0.0, 2.0 * PI) * s).exp() - 1.0;
    if e_fac.norm() < 1e-9 {
        return Err(MbError::Pole {
            what: format!("exponential factor of g vanishes at s = {s}"),
        });
    }

    let lead = jet_gamma(&arg_jet(&spec, s - d2 as f64, &w, -1.0 / zc))?;
    let qs = q1.powc(s);
    let amb = jet_recip_gamma(&arg_jet(&spec, s + 1.0, &h, 1.0 / zc))?.pow(4);
    let last = match family {
        Family::Local => {
            jet_recip_gamma(&arg_jet(&spec, -3.0 * s, &h, -3.0 / zc))?
        }
        Family::Global => {
            let form = &h.scale(&rat_i(5)) + &w.scale(&rat_i(2));
            jet_recip_gamma(&arg_jet(
                &spec,
                -3.0 * s - 2.0 * d2 as f64,
                &form,
                -1.0 / zc,
            ))?
        }
    };
    Ok(lead
        .mul(&amb)
        .mul(&last)
        .scale(qs / e_fac))
}

/// The free h,w ring with one extra polynomial degree. Residue groups are
/// assembled here: cancelling a collided pole divides the group by w once,
/// which consumes a degree, so the degree-8 coordinates of the result need
/// degree-9 coordinates of the parts.
fn collision_ring() -> Arc<RingSpec> {
    static RING: OnceLock<Arc<RingSpec>> = OnceLock::new();
    Arc::clone(RING.get_or_init(|| {
        RingSpec::free_truncation(
            "free_hw_deg9",
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
            10,
        )
        .expect("built-in collision ring")
    }))
}

/// Restriction of a collision-ring jet to the shared degree-8 basis.
fn truncate_to_deg8(jet: &Jet) -> Jet {
    let hw = free_hw();
    let nine = collision_ring();
    let mut out = Jet::zero(&hw);
    for (i, m) in hw.basis().iter().enumerate() {
        let j = nine.basis_index(m).expect("degree-8 monomial");
        out.set_coord(i, jet.coord(j));
    }
    out
}

/// Gamma(u + m) for nilpotent u = (c/z) w and integer m <= 0, with the
/// 1/w pole kept symbolic: Gamma(u + m) = Gamma(1 + u) (1/u) prod_{j=m}^{-1} 1/(u + j).
fn gamma_pole_extracted(
    f: Factored,
    m: i64,
    c: Rat,
    z: &Rat,
) -> Result<Factored, MbError> {
    debug_assert!(m <= 0);
    let spec = Arc::clone(f.spec());
    let zc = z_c64(z);
    let w = spec.gen_elem("w");
    let cc = super::jets::rat_to_c64(&c);
    let u = Jet::from_element(&w).scale(cc / zc);
    let mut out = f
        .times_lin(&w, -1)
        .times_z(1)
        .times_rat(Rat::one() / c)
        .times_jet(&jet_gamma(&u.add(&Jet::one(&spec)))?);
    for j in m..=-1 {
        let shifted = u.add(&Jet::from_scalar(&spec, c64(j as f64)));
        out = out.times_jet(&jet_recip(&shifted)?);
    }
    Ok(out)
}

/// The formal residue contribution at the exponential-factor pole s = a,
/// for any integer a: the displayed one-pole formula
/// Gamma(a - d2 - w/z) q1^a / [Gamma(1 + h/z + a)^4 Gamma(A(a))].
pub(crate) fn e_term(
    spec: &Arc<RingSpec>,
    family: Family,
    d2: u32,
    a: i64,
    q1: Complex64,
    z: &Rat,
) -> Result<Factored, MbError> {
    let spec = Arc::clone(spec);
    let zc = z_c64(z);
    let h = spec.gen_elem("h");
    let w = spec.gen_elem("w");
    let mut f = Factored::unit(&spec).times_scalar(q1.powi(a as i32));

    let m = a - d2 as i64;
    if m >= 1 {
        f = f.times_jet(&jet_gamma(&arg_jet(&spec, c64(m as f64), &w, -1.0 / zc))?);
    } else {
        f = gamma_pole_extracted(f, m, -Rat::one(), z)?;
    }

    f = f.times_jet(
        &jet_recip_gamma(&arg_jet(&spec, c64(1.0 + a as f64), &h, 1.0 / zc))?.pow(4),
    );
    let last = match family {
        Family::Local => jet_recip_gamma(&arg_jet(
            &spec,
            c64(-3.0 * a as f64),
            &h,
            -3.0 / zc,
        ))?,
        Family::Global => {
            let form = &h.scale(&rat_i(5)) + &w.scale(&rat_i(2));
            jet_recip_gamma(&arg_jet(
                &spec,
                c64(-3.0 * a as f64 - 2.0 * d2 as f64),
                &form,
                -1.0 / zc,
            ))?
        }
    };
    Ok(f.times_jet(&last))
}

/// The formal residue contribution at the shifted Gamma pole with index
/// l >= 0 (scalar location d2 - l):
/// 2 pi i (-1)^l q1^{d2 - l + w/z} / [(e^{2 pi i w/z} - 1) l! Gamma(1 + xi/z + d2 - l)^4 Gamma(B)]
/// with B = 3l - 3 d2 - 3 xi/z locally and B = 3l - 5 d2 - 5 xi/z globally.
/// `include_q` drops the q1 powers for reuse inside the continuation
/// coefficients, where they belong to the series monomial instead.
pub(crate) fn g_term(
    spec: &Arc<RingSpec>,
    family: Family,
    d2: u32,
    l: i64,
    q1: Complex64,
    z: &Rat,
    include_q: bool,
) -> Result<Factored, MbError> {
    debug_assert!(l >= 0);
    let spec = Arc::clone(spec);
    let zc = z_c64(z);
    let h = spec.gen_elem("h");
    let w = spec.gen_elem("w");
    let xi = &h + &w;
    let sign = if l % 2 == 0 { Rat::one() } else { -Rat::one() };

    let mut f = Factored::unit(&spec)
        // 2 pi i from the residue, times (-1)^l / l!.
        .times_rat(rat_i(2) * sign / rat_factorial(l))
        .times_pi(1)
        .times_i(1)
        // 1/(e^{2 pi i w/z} - 1) = (2 pi i w/z)^{-1} E(2 pi i w/z)^{-1}.
        .times_rat(Rat::new(1.into(), 2.into()))
        .times_pi(-1)
        .times_i(-1)
        .times_z(1)
        .times_lin(&w, -1);
    let e_unit = unit_expm1(Complex64::new(0.0, 2.0 * PI) / zc, &Jet::from_element(&w));
    f = f.times_jet(&jet_recip(&e_unit)?);

    if include_q {
        let ln_q = q1.ln();
        let q_jet = jet_exp(&Jet::from_element(&w).scale(ln_q / zc));
        f = f
            .times_scalar(q1.powi((d2 as i64 - l) as i32))
            .times_jet(&q_jet);
    }

    f = f.times_jet(
        &jet_recip_gamma(&arg_jet(
            &spec,
            c64(1.0 + d2 as f64 - l as f64),
            &xi,
            1.0 / zc,
        ))?
        .pow(4),
    );
    let b_scalar = match family {
        Family::Local => 3 * l - 3 * d2 as i64,
        Family::Global => 3 * l - 5 * d2 as i64,
    };
    let b_coeff = match family {
        Family::Local => -3.0 / zc,
        Family::Global => -5.0 / zc,
    };
    f = f.times_jet(&jet_recip_gamma(&arg_jet(
        &spec,
        c64(b_scalar as f64),
        &xi,
        b_coeff,
    ))?);
    Ok(f)
}

/// The jet-valued residue of g at the integer location a: the single
/// exponential-pole term when a > d2, and the combined two-term group with
/// its 1/w cancelled exactly when the shifted Gamma pole collides.
pub fn group_residue(
    family: Family,
    d2: u32,
    a: i64,
    q1: Complex64,
    z: &Rat,
) -> Result<Jet, MbError> {
    let nine = collision_ring();
    let mut parts = vec![e_term(&nine, family, d2, a, q1, z)?.materialize_laurent(z)?];
    let l = d2 as i64 - a;
    if l >= 0 {
        parts.push(g_term(&nine, family, d2, l, q1, z, true)?.materialize_laurent(z)?);
    }
    let min_pow = parts.iter().map(|(p, _)| *p).min().expect("nonempty");
    let w = Jet::generator(&nine, "w");
    let mut acc = Jet::zero(&nine);
    for (p, jet) in parts {
        let mut lifted = jet;
        for _ in 0..(p - min_pow) {
            lifted = lifted.mul(&w);
        }
        acc = acc.add(&lifted);
    }
    if min_pow < 0 {
        acc = divide_by_w(&acc, (-min_pow) as u32, 1e-9)?;
    }
    Ok(truncate_to_deg8(&acc))
}

/// Which half of the pole ladder a truncated residue sum walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// Sum of the residue groups at the first m + 1 integer locations on the
/// requested side: 0..=m on the right, -1..=-(m+1) on the left.
pub fn residue_sum(
    family: Family,
    d2: u32,
    q1: Complex64,
    side: Side,
    m: u32,
    z: &Rat,
) -> Result<Jet, MbError> {
    let spec = free_hw();
    let mut acc = Jet::zero(&spec);
    for k in 0..=m as i64 {
        let a = match side {
            Side::Right => k,
            Side::Left => -1 - k,
        };
        acc = acc.add(&group_residue(family, d2, a, q1, z)?);
    }
    Ok(acc)
}

/// A positively oriented rectangle avoiding the integer pole ladder.
#[derive(Clone, Debug)]
pub struct ContourSpec {
    pub re_lo: f64,
    pub re_hi: f64,
    pub half_height: f64,
    pub margin: f64,
}

impl ContourSpec {
    pub fn rectangle(re_lo: f64, re_hi: f64, half_height: f64) -> Result<Self, MbError> {
        if !(re_lo < re_hi) || !(half_height > 0.0) {
            return Err(MbError::Contour(format!(
                "degenerate rectangle [{re_lo}, {re_hi}] x [-{half_height}, {half_height}]"
            )));
        }
        Ok(ContourSpec {
            re_lo,
            re_hi,
            half_height,
            margin: 0.2,
        })
    }

    /// Rectangle enclosing the right-side locations 0..=m. The height is
    /// kept small: the integrand's high-order jet coordinates grow like
    /// exp(pi |Im 3s|), and a flat rectangle keeps the quadrature
    /// well-conditioned.
    pub fn enclosing_right(m: u32) -> Self {
        ContourSpec::rectangle(-0.5, m as f64 + 0.5, 0.75).expect("valid rectangle")
    }

    /// Rectangle enclosing the left-side locations -1..=-(m+1).
    pub fn enclosing_left(m: u32) -> Self {
        ContourSpec::rectangle(-(m as f64) - 1.5, -0.5, 0.75).expect("valid rectangle")
    }

    /// Integer pole locations strictly inside the rectangle.
    pub fn enclosed_integers(&self) -> Vec<i64> {
        let lo = self.re_lo.ceil() as i64;
        let hi = self.re_hi.floor() as i64;
        (lo..=hi)
            .filter(|&a| {
                let x = a as f64;
                x > self.re_lo && x < self.re_hi
            })
            .collect()
    }

    fn validate(&self) -> Result<(), MbError> {
        for edge in [self.re_lo, self.re_hi] {
            let nearest = edge.round();
            if (edge - nearest).abs() < self.margin {
                return Err(MbError::Contour(format!(
                    "vertical edge at {edge} passes within {} of the pole at {nearest}",
                    self.margin
                )));
            }
        }
        if self.half_height < self.margin {
            return Err(MbError::Contour(
                "rectangle too flat: horizontal edges run into the pole ladder".to_string(),
            ));
        }
        Ok(())
    }
}

const GL_NODES: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];

const GL_WEIGHTS: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

fn edge_integral(
    family: Family,
    d2: u32,
    q1: Complex64,
    z: &Rat,
    from: Complex64,
    to: Complex64,
    panels: usize,
    peak: &mut f64,
) -> Result<Jet, MbError> {
    let spec = free_hw();
    let mut acc = Jet::zero(&spec);
    let step = (to - from) / panels as f64;
    for k in 0..panels {
        let a = from + step * k as f64;
        let mid = a + step * 0.5;
        let half = step * 0.5;
        for i in 0..8 {
            for sign in [-1.0, 1.0] {
                let s = mid + half * (sign * GL_NODES[i]);
                let val = eval_g(family, d2, s, q1, z)?;
                *peak = peak.max(val.max_abs());
                acc = acc.add(&val.scale(half * GL_WEIGHTS[i]));
            }
        }
    }
    Ok(acc)
}

fn contour_panels_tracked(
    family: Family,
    d2: u32,
    q1: Complex64,
    spec: &ContourSpec,
    z: &Rat,
    panels: usize,
    peak: &mut f64,
) -> Result<Jet, MbError> {
    spec.validate()?;
    let h = spec.half_height;
    let corners = [
        Complex64::new(spec.re_lo, -h),
        Complex64::new(spec.re_hi, -h),
        Complex64::new(spec.re_hi, h),
        Complex64::new(spec.re_lo, h),
    ];
    let mut acc = Jet::zero(&free_hw());
    for e in 0..4 {
        let from = corners[e];
        let to = corners[(e + 1) % 4];
        acc = acc.add(&edge_integral(family, d2, q1, z, from, to, panels, peak)?);
    }
    Ok(acc)
}

/// Quadrature of g around the rectangle with a fixed panel count per edge,
/// for callers that manage their own refinement.
pub fn contour_integral_with_panels(
    family: Family,
    d2: u32,
    q1: Complex64,
    spec: &ContourSpec,
    z: &Rat,
    panels: usize,
) -> Result<Jet, MbError> {
    let mut peak = 0.0;
    contour_panels_tracked(family, d2, q1, spec, z, panels, &mut peak)
}

/// Quadrature of g around the rectangle, doubling panel counts until two
/// consecutive refinements agree to 1e-9 of the integral's natural scale,
/// the larger of its own magnitude and integrand peak times perimeter.
pub fn contour_integral(
    family: Family,
    d2: u32,
    q1: Complex64,
    spec: &ContourSpec,
    z: &Rat,
) -> Result<Jet, MbError> {
    let perimeter = 2.0 * (spec.re_hi - spec.re_lo) + 4.0 * spec.half_height;
    let mut peak = 0.0f64;
    let mut panels = 2;
    let mut prev = contour_panels_tracked(family, d2, q1, spec, z, panels, &mut peak)?;
    while panels <= 64 {
        panels *= 2;
        let cur = contour_panels_tracked(family, d2, q1, spec, z, panels, &mut peak)?;
        let scale = cur.max_abs().max(peak * perimeter).max(1.0);
        if panels >= 8 && prev.distance(&cur) <= 1e-10 * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(MbError::Contour(
        "quadrature failed to stabilize under panel doubling".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohring::free_hw_to_x;

    const EULER_GAMMA: f64 = 0.5772156649015329;

    fn one() -> Rat {
        Rat::one()
    }

    fn lone_coord(spec: &Arc<RingSpec>, jet: &Jet, name: &str) -> Complex64 {
        let g = Jet::generator(spec, name);
        let idx = (0..spec.dim())
            .find(|&i| g.coord(i).norm() > 0.5)
            .expect("generator coordinate");
        jet.coord(idx)
    }

    #[test]
    fn integrand_matches_closed_form_at_half() {
        // d2 = 0, s = 1/2, q1 = 1/10, z = 1. The scalar part collapses to
        // sqrt(0.1 pi) / (-2 Gamma(3/2)^4 Gamma(-3/2)) = -6 sqrt(0.1) / pi^2,
        // and both first-derivative coordinates equal -psi(1/2) times it.
        let spec = free_hw();
        let g = eval_g(
            Family::Local,
            0,
            Complex64::new(0.5, 0.0),
            Complex64::new(0.1, 0.0),
            &one(),
        )
        .unwrap();
        let scalar = -6.0 * 0.1f64.sqrt() / (PI * PI);
        assert!(
            (g.scalar_part() - c64(scalar)).norm() < 1e-10 * scalar.abs(),
            "scalar {} vs {}",
            g.scalar_part(),
            scalar
        );
        let psi_half = -EULER_GAMMA - 2.0 * 2.0f64.ln();
        let expect_d = -psi_half * scalar;
        for name in ["h", "w"] {
            let got = lone_coord(&spec, &g, name);
            assert!(
                (got - c64(expect_d)).norm() < 1e-10 * expect_d.abs(),
                "{name} coordinate {got} vs {expect_d}"
            );
        }
    }

    #[test]
    fn integrand_rejects_pole_locations() {
        let err = eval_g(
            Family::Local,
            0,
            Complex64::new(5.0, 0.0),
            Complex64::new(0.1, 0.0),
            &one(),
        );
        assert!(matches!(err, Err(MbError::Pole { .. })));
    }

    fn conj_jet(j: &Jet) -> Jet {
        let mut out = Jet::zero(j.spec());
        for i in 0..j.spec().dim() {
            out.set_coord(i, j.coord(i).conj());
        }
        out
    }

    #[test]
    fn integrand_satisfies_twisted_conjugation() {
        // For real q1 and z every factor of g is Schwarz-symmetric except
        // 1/(e^{2 pi i s} - 1), whose conjugate picks up -e^{2 pi i s-bar}:
        // g(s-bar) = -e^{-2 pi i s-bar} conj(g(s)).
        let s = Complex64::new(0.4, 0.3);
        let q1 = Complex64::new(0.05, 0.0);
        for family in [Family::Local, Family::Global] {
            for d2 in [0u32, 1] {
                let direct = eval_g(family, d2, s.conj(), q1, &one()).unwrap();
                let twist = -(Complex64::new(0.0, -2.0 * PI) * s.conj()).exp();
                let reflected = conj_jet(&eval_g(family, d2, s, q1, &one()).unwrap()).scale(twist);
                let scale = direct.max_abs().max(1.0);
                assert!(
                    direct.distance(&reflected) <= 1e-12 * scale,
                    "family {family} d2 {d2}: {:e}",
                    direct.distance(&reflected) / scale
                );
            }
        }
    }

    #[test]
    fn integrand_satisfies_the_shift_equation() {
        // g(s + 1) / g(s) follows from the Gamma functional equation and
        // the periodicity of the exponential factor:
        // q1 (s - d2 - w/z) / [(1 + h/z + s)^4 (A-1)(A-2)(A-3)],
        // where A is the argument of the trailing Gamma at s.
        let spec = free_hw();
        let h = spec.gen_elem("h");
        let w = spec.gen_elem("w");
        let s = Complex64::new(0.4, 0.3);
        let q1 = Complex64::new(0.1, 0.05);
        for family in [Family::Local, Family::Global] {
            for d2 in [0u32, 1] {
                let g0 = eval_g(family, d2, s, q1, &one()).unwrap();
                let g1 = eval_g(family, d2, s + 1.0, q1, &one()).unwrap();
                let lead = arg_jet(&spec, s - d2 as f64, &w, c64(-1.0));
                let amb = jet_recip(&arg_jet(&spec, s + 1.0, &h, c64(1.0)))
                    .unwrap()
                    .pow(4);
                let a_arg = match family {
                    Family::Local => arg_jet(&spec, -3.0 * s, &h, c64(-3.0)),
                    Family::Global => {
                        let form = &h.scale(&rat_i(5)) + &w.scale(&rat_i(2));
                        arg_jet(&spec, -3.0 * s - 2.0 * d2 as f64, &form, c64(-1.0))
                    }
                };
                let mut shift = Jet::one(&spec);
                for j in 1..=3 {
                    shift = shift.mul(&a_arg.add(&Jet::from_scalar(&spec, c64(-(j as f64)))));
                }
                let predicted = g0
                    .mul(&lead)
                    .mul(&amb)
                    .mul(&shift)
                    .scale(q1);
                let scale = g1.max_abs().max(1.0);
                assert!(
                    g1.distance(&predicted) < 1e-10 * scale,
                    "family {family} d2 {d2}: {:e}",
                    g1.distance(&predicted) / scale
                );
            }
        }
    }

    #[test]
    fn collided_groups_cancel_the_w_pole() {
        // At a <= d2 both one-pole terms are singular alone; the group
        // must assemble without tripping the division remainder check.
        for family in [Family::Local, Family::Global] {
            for (d2, a) in [(0u32, 0i64), (1, 0), (1, 1), (0, -1), (1, -2)] {
                let jet = group_residue(family, d2, a, Complex64::new(0.1, 0.0), &one())
                    .unwrap_or_else(|e| panic!("group ({d2}, {a}) {family}: {e}"));
                assert!(jet.max_abs().is_finite());
            }
        }
    }

    #[test]
    fn residue_theorem_on_the_right() {
        let spec = ContourSpec::enclosing_right(3);
        assert_eq!(spec.enclosed_integers(), vec![0, 1, 2, 3]);
        for family in [Family::Local, Family::Global] {
            for d2 in [0u32, 1] {
                for q1 in [Complex64::new(0.05, 0.0), Complex64::new(0.0, 0.1)] {
                    let quad = contour_integral(family, d2, q1, &spec, &one()).unwrap();
                    let sum = residue_sum(family, d2, q1, Side::Right, 3, &one()).unwrap();
                    let scale = sum.max_abs().max(1.0);
                    assert!(
                        quad.distance(&sum) <= 1e-8 * scale,
                        "family {family} d2 {d2} q1 {q1}: {:e}",
                        quad.distance(&sum) / scale
                    );
                }
            }
        }
    }

    #[test]
    fn truncation_at_zero_is_the_single_residue() {
        let q1 = Complex64::new(0.1, 0.0);
        let sum = residue_sum(Family::Local, 0, q1, Side::Right, 0, &one()).unwrap();
        let single = group_residue(Family::Local, 0, 0, q1, &one()).unwrap();
        assert!(sum.distance(&single) == 0.0);
    }

    #[test]
    fn residue_theorem_on_the_left() {
        let spec = ContourSpec::enclosing_left(2);
        assert_eq!(spec.enclosed_integers(), vec![-3, -2, -1]);
        let q1 = Complex64::new(0.05, 0.0);
        for family in [Family::Local, Family::Global] {
            let quad = contour_integral(family, 0, q1, &spec, &one()).unwrap();
            let sum = residue_sum(family, 0, q1, Side::Left, 2, &one()).unwrap();
            let scale = sum.max_abs().max(1.0);
            assert!(
                quad.distance(&sum) <= 1e-8 * scale,
                "family {family}: {:e}",
                quad.distance(&sum) / scale
            );
        }
    }

    /// Largest integrand magnitude over a coarse sample of the rectangle,
    /// the natural scale for quadrature error.
    fn sampled_peak(family: Family, d2: u32, q1: Complex64, spec: &ContourSpec) -> f64 {
        let mut peak = 0.0f64;
        for k in 0..=8 {
            let x = spec.re_lo + (spec.re_hi - spec.re_lo) * k as f64 / 8.0;
            for y in [-spec.half_height, spec.half_height] {
                if let Ok(j) = eval_g(family, d2, Complex64::new(x, y), q1, &one()) {
                    peak = peak.max(j.max_abs());
                }
            }
        }
        peak
    }

    #[test]
    fn empty_contour_integrates_to_zero() {
        let spec = ContourSpec::rectangle(0.3, 0.7, 0.75).unwrap();
        assert!(spec.enclosed_integers().is_empty());
        let q1 = Complex64::new(0.1, 0.0);
        let jet = contour_integral(Family::Local, 0, q1, &spec, &one()).unwrap();
        let scale = sampled_peak(Family::Local, 0, q1, &spec);
        assert!(
            jet.max_abs() < 1e-9 * scale,
            "got {:e} against scale {:e}",
            jet.max_abs(),
            scale
        );
    }

    #[test]
    fn quadrature_is_stable_under_panel_doubling() {
        let spec = ContourSpec::enclosing_right(1);
        let q1 = Complex64::new(0.05, 0.0);
        let a = contour_integral_with_panels(Family::Local, 0, q1, &spec, &one(), 8).unwrap();
        let b = contour_integral_with_panels(Family::Local, 0, q1, &spec, &one(), 16).unwrap();
        let scale = sampled_peak(Family::Local, 0, q1, &spec).max(b.max_abs());
        assert!(
            a.distance(&b) <= 1e-9 * scale,
            "{:e} against scale {:e}",
            a.distance(&b),
            scale
        );
    }

    #[test]
    fn contours_near_poles_are_rejected() {
        let bad = ContourSpec::rectangle(-0.5, 2.95, 3.0).unwrap();
        let err = contour_integral(
            Family::Local,
            0,
            Complex64::new(0.1, 0.0),
            &bad,
            &one(),
        );
        assert!(matches!(err, Err(MbError::Contour(_))));
    }

    #[test]
    fn residues_project_into_the_quotient_ring() {
        let jet = residue_sum(
            Family::Local,
            1,
            Complex64::new(0.1, 0.0),
            Side::Right,
            2,
            &one(),
        )
        .unwrap();
        let img = jet.project(&free_hw_to_x());
        assert_eq!(img.spec().name(), "cubic_ambient_x");
        assert!(img.max_abs().is_finite());
    }
}
