//! Numeric jets: ring elements with Complex64 coordinates.
//!
//! A jet is the image of an exact ring element (or of a whole Laurent
//! polynomial evaluated at a numeric z) in the same monomial basis, with
//! floating coordinates. Analytic functions of a jet with nilpotent part n
//! are finite Taylor sums because n is nilpotent; the scalar part feeds the
//! classical special-function kernels.

use super::gammafn::{gamma, near_gamma_pole, polygamma};
use super::MbError;
use crate::cohring::{Rat, RingElement, RingMap, RingSpec, ZLaurent};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub(crate) fn rat_to_c64(r: &Rat) -> Complex64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    Complex64::new(n / d, 0.0)
}

type NumTable = Vec<Vec<Vec<(usize, f64)>>>;

fn num_table(spec: &Arc<RingSpec>) -> Arc<NumTable> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<NumTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("numeric table cache poisoned");
    if let Some(t) = guard.get(spec.name()) {
        return Arc::clone(t);
    }
    let n = spec.dim();
    let mut table = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let entries = spec
                .mult_entries(i, j)
                .iter()
                .map(|(k, c)| (*k, rat_to_c64(c).re))
                .collect::<Vec<_>>();
            row.push(entries);
        }
        table.push(row);
    }
    let table = Arc::new(table);
    guard.insert(spec.name().to_string(), Arc::clone(&table));
    table
}

/// A ring element with Complex64 coordinates on the spec's basis.
#[derive(Clone)]
pub struct Jet {
    spec: Arc<RingSpec>,
    coords: Vec<Complex64>,
}

impl Jet {
    pub fn zero(spec: &Arc<RingSpec>) -> Self {
        Jet {
            spec: Arc::clone(spec),
            coords: vec![Complex64::new(0.0, 0.0); spec.dim()],
        }
    }

    pub fn from_scalar(spec: &Arc<RingSpec>, c: Complex64) -> Self {
        let mut jet = Jet::zero(spec);
        jet.coords[0] = c;
        jet
    }

    pub fn one(spec: &Arc<RingSpec>) -> Self {
        Jet::from_scalar(spec, Complex64::new(1.0, 0.0))
    }

    pub fn from_element(e: &RingElement) -> Self {
        let mut jet = Jet::zero(e.spec());
        for (&i, c) in e.coords() {
            jet.coords[i] = rat_to_c64(c);
        }
        jet
    }

    /// Evaluate a Laurent polynomial at the numeric z and take coordinates.
    pub fn from_zlaurent(a: &ZLaurent, z: &Rat) -> Self {
        Jet::from_element(&a.eval_z(z))
    }

    pub fn generator(spec: &Arc<RingSpec>, name: &str) -> Self {
        Jet::from_element(&spec.gen_elem(name))
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub(crate) fn set_coord(&mut self, i: usize, c: Complex64) {
        self.coords[i] = c;
    }

    pub fn coord(&self, i: usize) -> Complex64 {
        self.coords[i]
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coords[0]
    }

    /// The jet with its scalar coordinate removed.
    pub fn nilpotent_part(&self) -> Jet {
        let mut out = self.clone();
        out.coords[0] = Complex64::new(0.0, 0.0);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Jet) -> Jet {
        assert!(RingSpec::same_spec(&self.spec, &other.spec));
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Jet {
            spec: Arc::clone(&self.spec),
            coords,
        }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet {
            spec: Arc::clone(&self.spec),
            coords: self.coords.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        assert!(RingSpec::same_spec(&self.spec, &other.spec));
        let table = num_table(&self.spec);
        let mut out = Jet::zero(&self.spec);
        for (i, a) in self.coords.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.norm_sqr() == 0.0 {
                    continue;
                }
                let ab = a * b;
                for &(k, c) in &table[i][j] {
                    out.coords[k] += ab * c;
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Jet {
        let mut acc = Jet::one(&self.spec);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Push the jet through a linear ring map, numerically.
    pub fn project(&self, map: &RingMap) -> Jet {
        assert!(RingSpec::same_spec(&self.spec, map.from_spec()));
        let mut out = Jet::zero(map.to_spec());
        for (i, a) in self.coords.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let img = map.apply(&self.spec.basis_elem(i));
            for (&k, c) in img.coords() {
                out.coords[k] += a * rat_to_c64(c);
            }
        }
        out
    }

    /// Largest coordinate distance to another jet.
    pub fn distance(&self, other: &Jet) -> f64 {
        self.sub(other).max_abs()
    }
}

/// Taylor sum f(s0 + n) = sum coeffs[k] n^k where coeffs[k] = f^(k)(s0)/k!
/// and n is the nilpotent part. Stops as soon as the powers of n vanish.
fn taylor(coeffs: &mut dyn Iterator<Item = Complex64>, nil: &Jet) -> Jet {
    let mut acc = Jet::zero(nil.spec());
    let mut pow = Jet::one(nil.spec());
    for c in coeffs {
        acc = acc.add(&pow.scale(c));
        pow = pow.mul(nil);
        if pow.max_abs() == 0.0 {
            break;
        }
    }
    acc
}

/// exp of a jet.
pub fn jet_exp(a: &Jet) -> Jet {
    let s0 = a.scalar_part();
    let nil = a.nilpotent_part();
    let e = s0.exp();
    let mut k = 0u64;
    let mut fact = 1.0;
    let mut coeffs = std::iter::from_fn(move || {
        if k > 0 {
            fact *= k as f64;
        }
        k += 1;
        Some(e / fact)
    });
    taylor(&mut coeffs, &nil)
}

/// sin of a jet.
pub fn jet_sin(a: &Jet) -> Jet {
    let s0 = a.scalar_part();
    let nil = a.nilpotent_part();
    let half_pi = Complex64::new(std::f64::consts::FRAC_PI_2, 0.0);
    let mut k = 0u64;
    let mut fact = 1.0;
    let mut coeffs = std::iter::from_fn(move || {
        if k > 0 {
            fact *= k as f64;
        }
        let v = (s0 + half_pi * k as f64).sin() / fact;
        k += 1;
        Some(v)
    });
    taylor(&mut coeffs, &nil)
}

/// Reciprocal of a jet with nonzero scalar part.
pub fn jet_recip(a: &Jet) -> Result<Jet, MbError> {
    let s0 = a.scalar_part();
    if s0.norm() < 1e-12 {
        return Err(MbError::Pole {
            what: "reciprocal of a jet with vanishing scalar part".to_string(),
        });
    }
    let m = a.nilpotent_part().scale(1.0 / s0);
    let mut sign = Complex64::new(1.0, 0.0) / s0;
    let mut coeffs = std::iter::from_fn(move || {
        let v = sign;
        sign = -sign;
        Some(v)
    });
    Ok(taylor(&mut coeffs, &m))
}

/// Principal-branch power a^p for a jet with nonzero scalar part.
pub fn jet_power(a: &Jet, p: Complex64) -> Result<Jet, MbError> {
    let s0 = a.scalar_part();
    if s0.norm() < 1e-12 {
        return Err(MbError::Pole {
            what: "power of a jet with vanishing scalar part".to_string(),
        });
    }
    let m = a.nilpotent_part().scale(1.0 / s0);
    let lead = s0.powc(p);
    // Binomial series: sum C(p, k) m^k.
    let mut k = 0u64;
    let mut c = lead;
    let mut coeffs = std::iter::from_fn(move || {
        let v = c;
        c = c * (p - k as f64) / (k as f64 + 1.0);
        k += 1;
        Some(v)
    });
    Ok(taylor(&mut coeffs, &m))
}

/// Gamma of a jet; errors when the scalar part sits on a pole.
pub fn jet_gamma(a: &Jet) -> Result<Jet, MbError> {
    let s0 = a.scalar_part();
    if near_gamma_pole(s0, 1e-9) {
        return Err(MbError::Pole {
            what: format!("gamma jet at pole {s0}"),
        });
    }
    let nil = a.nilpotent_part();
    // Gamma(s0 + n) = Gamma(s0) exp(sum_{k>=1} psi^(k-1)(s0)/k! n^k); the
    // sum runs until the nilpotent powers die out, whatever the ring's
    // truncation degree.
    let mut log_shift = Jet::zero(a.spec());
    let mut pow = nil.clone();
    let mut fact = 1.0;
    for k in 1u32.. {
        fact *= k as f64;
        if pow.max_abs() == 0.0 {
            break;
        }
        log_shift = log_shift.add(&pow.scale(polygamma(k - 1, s0) / fact));
        pow = pow.mul(&nil);
    }
    Ok(jet_exp(&log_shift).scale(gamma(s0)))
}

/// 1/Gamma of a jet. Entire: scalar parts at the non-positive integers are
/// handled by shifting with the functional equation, producing an exact
/// nilpotent zero rather than an error.
pub fn jet_recip_gamma(a: &Jet) -> Result<Jet, MbError> {
    let s0 = a.scalar_part();
    let nearest = s0.re.round();
    if nearest <= 0.0 && (s0 - nearest).norm() < 0.25 {
        // 1/Gamma(x) = [prod_{j=0..m} (x + j)] / Gamma(x + m + 1), m = -nearest.
        let m = (-nearest) as u32;
        let mut prod = Jet::one(a.spec());
        for j in 0..=m {
            let shifted = a.add(&Jet::from_scalar(a.spec(), Complex64::new(j as f64, 0.0)));
            prod = prod.mul(&shifted);
        }
        let up = a.add(&Jet::from_scalar(
            a.spec(),
            Complex64::new(m as f64 + 1.0, 0.0),
        ));
        return Ok(prod.mul(&jet_recip_gamma(&up)?));
    }
    // Left half plane, or a Gamma value too small to divide by safely
    // (large imaginary part): invert through the reflection formula,
    // 1/Gamma(a) = sin(pi a) Gamma(1 - a) / pi, whose right-hand side is
    // built from well-scaled factors.
    let pi = std::f64::consts::PI;
    if s0.re < 0.5 || gamma(s0).norm() < 1e-8 {
        let pi_a = a.scale(Complex64::new(pi, 0.0));
        let one_minus = Jet::one(a.spec()).sub(a);
        return Ok(jet_sin(&pi_a)
            .mul(&jet_gamma(&one_minus)?)
            .scale(Complex64::new(1.0 / pi, 0.0)));
    }
    let g = jet_gamma(a)?;
    jet_recip(&g)
}

/// sin(c n)/(c n) extended by 1 at 0, for a nilpotent jet n: the entire
/// series sum (-1)^k (c n)^(2k) / (2k+1)!.
pub fn unit_sinc(c: Complex64, nil: &Jet) -> Jet {
    assert!(nil.scalar_part().norm() == 0.0, "sinc argument must be nilpotent");
    let sq = nil.scale(c).pow(2);
    let mut acc = Jet::zero(nil.spec());
    let mut pow = Jet::one(nil.spec());
    let mut k = 0u64;
    let mut fact = 1.0; // (2k+1)!
    loop {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.add(&pow.scale(Complex64::new(sign / fact, 0.0)));
        pow = pow.mul(&sq);
        if pow.max_abs() == 0.0 {
            break;
        }
        k += 1;
        fact *= (2 * k) as f64 * (2 * k + 1) as f64;
    }
    acc
}

/// (exp(c n) - 1)/(c n) extended by 1 at 0, for a nilpotent jet n:
/// the entire series sum (c n)^k / (k+1)!.
pub fn unit_expm1(c: Complex64, nil: &Jet) -> Jet {
    assert!(nil.scalar_part().norm() == 0.0, "expm1 argument must be nilpotent");
    let arg = nil.scale(c);
    let mut acc = Jet::zero(nil.spec());
    let mut pow = Jet::one(nil.spec());
    let mut fact = 1.0; // (k+1)!
    let mut k = 0u64;
    loop {
        acc = acc.add(&pow.scale(Complex64::new(1.0 / fact, 0.0)));
        pow = pow.mul(&arg);
        if pow.max_abs() == 0.0 {
            break;
        }
        k += 1;
        fact *= (k + 1) as f64;
    }
    acc
}
