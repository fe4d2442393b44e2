//! Exact bookkeeping of prefactors that must cancel before a jet is formed.
//!
//! The continuation coefficients are products of gamma values, sines, and
//! exponentials whose arguments are nilpotent. Each such factor splits into
//! an invertible jet that equals 1 at the origin and a stiff prefactor: a
//! rational number, powers of pi, i, and z, and nilpotent linear forms such
//! as w or 5h + 2w. The linear forms are zero divisors, so they may only be
//! cancelled symbolically, never divided numerically. [`Factored`] carries
//! the stiff part exactly and multiplies everything analytic into a jet;
//! [`Factored::materialize`] refuses to produce a jet while any linear form
//! still has a negative exponent.

use super::jets::{rat_to_c64, Jet};
use super::MbError;
use crate::cohring::{Rat, RingElement, RingSpec};
use num_complex::Complex64;
use num_traits::One;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone)]
pub struct Factored {
    spec: Arc<RingSpec>,
    pub rat: Rat,
    pub pi_pow: i32,
    pub i_pow: i32,
    pub z_pow: i32,
    lin: Vec<(RingElement, i64)>,
    jet: Jet,
}

fn elem_eq(a: &RingElement, b: &RingElement) -> bool {
    a.coords() == b.coords()
}

impl Factored {
    pub fn unit(spec: &Arc<RingSpec>) -> Self {
        Factored {
            spec: Arc::clone(spec),
            rat: Rat::one(),
            pi_pow: 0,
            i_pow: 0,
            z_pow: 0,
            lin: Vec::new(),
            jet: Jet::one(spec),
        }
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn jet(&self) -> &Jet {
        &self.jet
    }

    /// Exponent of a linear form, zero when absent.
    pub fn lin_exponent(&self, form: &RingElement) -> i64 {
        self.lin
            .iter()
            .find(|(f, _)| elem_eq(f, form))
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn lin_factors(&self) -> &[(RingElement, i64)] {
        &self.lin
    }

    pub fn times_rat(mut self, c: Rat) -> Self {
        self.rat *= c;
        self
    }

    pub fn times_pi(mut self, k: i32) -> Self {
        self.pi_pow += k;
        self
    }

    pub fn times_i(mut self, k: i32) -> Self {
        self.i_pow += k;
        self
    }

    pub fn times_z(mut self, k: i32) -> Self {
        self.z_pow += k;
        self
    }

    pub fn times_lin(mut self, form: &RingElement, exp: i64) -> Self {
        if exp == 0 {
            return self;
        }
        if let Some(slot) = self.lin.iter_mut().find(|(f, _)| elem_eq(f, form)) {
            slot.1 += exp;
            if slot.1 == 0 {
                self.lin.retain(|(_, e)| *e != 0);
            }
            return self;
        }
        self.lin.push((form.clone(), exp));
        self
    }

    pub fn times_jet(mut self, j: &Jet) -> Self {
        self.jet = self.jet.mul(j);
        self
    }

    pub fn times_scalar(mut self, c: Complex64) -> Self {
        self.jet = self.jet.scale(c);
        self
    }

    pub fn times(mut self, other: &Factored) -> Self {
        self.rat *= other.rat.clone();
        self.pi_pow += other.pi_pow;
        self.i_pow += other.i_pow;
        self.z_pow += other.z_pow;
        for (f, e) in &other.lin {
            self = self.times_lin(f, *e);
        }
        self.jet = self.jet.mul(&other.jet);
        self
    }

    /// The numeric value of the scalar prefactor at the given z.
    pub fn scalar_prefactor(&self, z: &Rat) -> Complex64 {
        let mut acc = rat_to_c64(&self.rat);
        acc *= Complex64::new(PI, 0.0).powi(self.pi_pow);
        acc *= match self.i_pow.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let zf = rat_to_c64(z);
        acc * zf.powi(self.z_pow)
    }

    /// Multiply the stiff parts into the jet. Fails when a linear form
    /// still carries a negative exponent: that factor is a zero divisor
    /// and the caller has not cancelled it.
    pub fn materialize(&self, z: &Rat) -> Result<Jet, MbError> {
        let mut out = self.jet.scale(self.scalar_prefactor(z));
        for (form, exp) in &self.lin {
            if *exp < 0 {
                return Err(MbError::Shape(format!(
                    "uncancelled singular factor ({})^{exp}",
                    form
                )));
            }
            let fj = Jet::from_element(form);
            for _ in 0..*exp {
                out = out.mul(&fj);
            }
        }
        Ok(out)
    }

    /// Like [`materialize`], but a leftover negative power of the single
    /// generator named `w` is permitted and returned separately, for group
    /// residues that cancel it across terms.
    ///
    /// [`materialize`]: Factored::materialize
    pub fn materialize_laurent(&self, z: &Rat) -> Result<(i64, Jet), MbError> {
        let w_form = self.spec.gen_elem("w");
        let mut w_pow = 0i64;
        let mut out = self.jet.scale(self.scalar_prefactor(z));
        for (form, exp) in &self.lin {
            if elem_eq(form, &w_form) {
                w_pow = *exp;
                continue;
            }
            if *exp < 0 {
                return Err(MbError::Shape(format!(
                    "uncancelled singular factor ({})^{exp}",
                    form
                )));
            }
            let fj = Jet::from_element(form);
            for _ in 0..*exp {
                out = out.mul(&fj);
            }
        }
        if w_pow > 0 {
            let fj = Jet::from_element(&w_form);
            for _ in 0..w_pow {
                out = out.mul(&fj);
            }
            w_pow = 0;
        }
        Ok((w_pow, out))
    }
}

/// Exact division of a free-ring jet by w^k, with a remainder check:
/// every coordinate whose w exponent is below k must be numerically zero
/// relative to the jet's scale.
pub fn divide_by_w(jet: &Jet, k: u32, tol: f64) -> Result<Jet, MbError> {
    if k == 0 {
        return Ok(jet.clone());
    }
    let spec = jet.spec();
    let scale = jet.max_abs().max(1.0);
    let mut out = Jet::zero(spec);
    for (i, c) in jet.coords().iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let expo = &spec.basis()[i].0;
        let (a, b) = (expo[0], expo[1]);
        if b < k {
            if c.norm() > tol * scale {
                return Err(MbError::Shape(format!(
                    "w-division remainder {:.3e} at h^{a} w^{b} exceeds {:.1e} x scale",
                    c.norm(),
                    tol
                )));
            }
            continue;
        }
        let target = crate::cohring::Monomial(vec![a, b - k]);
        let idx = spec
            .basis_index(&target)
            .expect("w-division target stays within the truncation");
        out.set_coord(idx, *c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohring::free_hw;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn linear_forms_cancel_exactly() {
        let f = free_hw();
        let h = f.gen_elem("h");
        let t = &f.gen_elem("h").scale(&rat(5, 1)) + &f.gen_elem("w").scale(&rat(2, 1));
        let acc = Factored::unit(&f)
            .times_lin(&h, 1)
            .times_lin(&t, -1)
            .times_lin(&t, 1)
            .times_lin(&h, -1);
        assert!(acc.lin_factors().is_empty());
        let jet = acc.materialize(&Rat::one()).unwrap();
        assert!(jet.distance(&Jet::one(&f)) < 1e-15);
    }

    #[test]
    fn negative_exponent_blocks_materialization() {
        let f = free_hw();
        let w = f.gen_elem("w");
        let acc = Factored::unit(&f).times_lin(&w, -1);
        assert!(acc.materialize(&Rat::one()).is_err());
        let (pow, jet) = acc.materialize_laurent(&Rat::one()).unwrap();
        assert_eq!(pow, -1);
        assert!(jet.distance(&Jet::one(&f)) < 1e-15);
    }

    #[test]
    fn scalar_prefactor_combines_pi_i_z() {
        let f = free_hw();
        let acc = Factored::unit(&f)
            .times_rat(rat(3, 2))
            .times_pi(1)
            .times_i(3)
            .times_z(-2);
        let z = rat(1, 2);
        let v = acc.scalar_prefactor(&z);
        let expect = Complex64::new(0.0, -1.0) * 1.5 * PI * 4.0;
        assert!((v - expect).norm() < 1e-13);
    }

    #[test]
    fn w_division_shifts_coordinates() {
        let f = free_hw();
        let h = Jet::generator(&f, "h");
        let w = Jet::generator(&f, "w");
        let jet = h.mul(&w).add(&w.pow(2).scale(Complex64::new(2.0, 0.0)));
        let q = divide_by_w(&jet, 1, 1e-9).unwrap();
        let expect = h.add(&w.scale(Complex64::new(2.0, 0.0)));
        assert!(q.distance(&expect) < 1e-15);
        // A remainder in the w^0 sector is rejected.
        let bad = jet.add(&Jet::one(&f));
        assert!(divide_by_w(&bad, 1, 1e-9).is_err());
    }
}
