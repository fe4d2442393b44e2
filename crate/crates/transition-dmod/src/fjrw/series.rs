//! Narrow-sector I-functions of the cubic singularity pair, in formal and
//! regularized form, with symbolic bookkeeping for Gamma values at thirds.

use crate::cohring::{rat, rat_i, Rat};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::Mul;

/// The two narrow-sector generators of the state space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sector {
    Phi0,
    Phi1,
}

impl Sector {
    pub const ALL: [Sector; 2] = [Sector::Phi0, Sector::Phi1];

    pub fn label(self) -> &'static str {
        match self {
            Sector::Phi0 => "phi0",
            Sector::Phi1 => "phi1",
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Exact scalar of the form r * Gamma(1/3)^a * Gamma(2/3)^b with rational
/// r and integer exponents a, b. These are the only transcendental
/// constants appearing in this module; keeping the exponents symbolic
/// means a ratio of two such scalars is again one, and rationality is
/// decidable by looking at the exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaConst {
    rat: Rat,
    g13: i32,
    g23: i32,
}

impl GammaConst {
    pub fn new(rat: Rat, g13: i32, g23: i32) -> Self {
        if rat.is_zero() {
            GammaConst {
                rat,
                g13: 0,
                g23: 0,
            }
        } else {
            GammaConst { rat, g13, g23 }
        }
    }

    pub fn rational(r: Rat) -> Self {
        Self::new(r, 0, 0)
    }

    pub fn one() -> Self {
        Self::rational(Rat::one())
    }

    pub fn rational_part(&self) -> &Rat {
        &self.rat
    }

    /// Exponent of the Gamma(1/3) token.
    pub fn third_power(&self) -> i32 {
        self.g13
    }

    /// Exponent of the Gamma(2/3) token.
    pub fn two_thirds_power(&self) -> i32 {
        self.g23
    }

    pub fn is_rational(&self) -> bool {
        self.g13 == 0 && self.g23 == 0
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<GammaConst> {
        if self.rat.is_zero() {
            None
        } else {
            Some(GammaConst::new(
                Rat::one() / &self.rat,
                -self.g13,
                -self.g23,
            ))
        }
    }

    /// Multiply the rational part by `r`.
    pub fn scale(&self, r: &Rat) -> GammaConst {
        GammaConst::new(&self.rat * r, self.g13, self.g23)
    }
}

impl Mul for &GammaConst {
    type Output = GammaConst;

    fn mul(self, other: &GammaConst) -> GammaConst {
        GammaConst::new(
            &self.rat * &other.rat,
            self.g13 + other.g13,
            self.g23 + other.g23,
        )
    }
}

impl fmt::Display for GammaConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rat.is_zero() {
            return f.write_str("0");
        }
        let mut tokens = Vec::new();
        for (tok, e) in [("Gamma(1/3)", self.g13), ("Gamma(2/3)", self.g23)] {
            if e == 1 {
                tokens.push(tok.to_string());
            } else if e != 0 {
                tokens.push(format!("{tok}^{e}"));
            }
        }
        if tokens.is_empty() {
            return write!(f, "{}", self.rat);
        }
        let tokens = tokens.join("*");
        if self.rat.is_one() {
            f.write_str(&tokens)
        } else if (-&self.rat).is_one() {
            write!(f, "-{tokens}")
        } else {
            write!(f, "{}*{tokens}", self.rat)
        }
    }
}

/// Truncated narrow-sector series: per sector a list of (exponent,
/// stored coefficient) pairs in increasing exponent order. The stored
/// coefficients are the exact rationals left after dividing out a
/// per-sector constant, which is recorded symbolically; the full
/// coefficient is the stored one times that constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FJRWSeries {
    regularized: bool,
    phi0: Vec<(Rat, Rat)>,
    phi1: Vec<(Rat, Rat)>,
    const0: GammaConst,
    const1: GammaConst,
}

impl FJRWSeries {
    pub fn regularized(&self) -> bool {
        self.regularized
    }

    /// The (exponent, stored coefficient) pairs of one sector.
    pub fn terms(&self, sector: Sector) -> &[(Rat, Rat)] {
        match sector {
            Sector::Phi0 => &self.phi0,
            Sector::Phi1 => &self.phi1,
        }
    }

    /// The recorded constant multiplying the stored coefficients.
    pub fn recorded_constant(&self, sector: Sector) -> &GammaConst {
        match sector {
            Sector::Phi0 => &self.const0,
            Sector::Phi1 => &self.const1,
        }
    }
}

/// Rising factorial a (a+1) ... (a+k-1).
fn rising(a: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for t in 0..k {
        acc *= a + rat_i(t as i64);
    }
    acc
}

fn factorial(n: u32) -> Rat {
    let mut acc = Rat::one();
    for t in 2..=n as i64 {
        acc *= rat_i(t);
    }
    acc
}

fn fourth(x: &Rat) -> Rat {
    let s = x * x;
    &s * &s
}

fn sign(l: u32) -> Rat {
    if l % 2 == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Formal narrow-sector series at z = 1, truncated at index `order`: the
/// phi0 coefficient on t^(3l+1) is -(-1)^l (1/3)_l^4 / (3l)! and the phi1
/// coefficient on t^(3l+2) is (-1)^l (2/3)_l^4 / (3l)!. The fourth powers
/// of rising factorials outgrow the single factorial, so the coefficient
/// ratios are unbounded and the series has zero radius of convergence;
/// its truncations are still exact data. No constant is divided out, so
/// the recorded constants are 1.
pub fn fjrw_formal(order: u32) -> FJRWSeries {
    let mut phi0 = Vec::with_capacity(order as usize + 1);
    let mut phi1 = Vec::with_capacity(order as usize + 1);
    for l in 0..=order {
        let f = factorial(3 * l);
        let a = &sign(l) * &(fourth(&rising(&rat(1, 3), l)) / &f);
        phi0.push((rat_i((3 * l + 1) as i64), -a));
        let b = &sign(l) * &(fourth(&rising(&rat(2, 3), l)) / &f);
        phi1.push((rat_i((3 * l + 2) as i64), b));
    }
    FJRWSeries {
        regularized: false,
        phi0,
        phi1,
        const0: GammaConst::one(),
        const1: GammaConst::one(),
    }
}

/// Regularized narrow-sector series, truncated at index `order`. The phi0
/// coefficient on tau^(l+1/3) is -(-1)^l (1/3)_l^4 / ((3l)! (4/3)_l)
/// stored after dividing out 1/Gamma(4/3) = 3/Gamma(1/3); the phi1
/// coefficient on tau^(l+2/3) is (-1)^l (2/3)_l^4 / ((3l+1)! (5/3)_l)
/// with 1/Gamma(5/3) = (3/2)/Gamma(2/3) recorded. The extra rising
/// factorial in the denominator caps the coefficient ratios below 1/27,
/// so this series has positive radius of convergence.
pub fn fjrw_regularized(order: u32) -> FJRWSeries {
    let mut phi0 = Vec::with_capacity(order as usize + 1);
    let mut phi1 = Vec::with_capacity(order as usize + 1);
    for l in 0..=order {
        let d0 = &sign(l)
            * &(fourth(&rising(&rat(1, 3), l)) / (factorial(3 * l) * rising(&rat(4, 3), l)));
        phi0.push((rat_i(l as i64) + rat(1, 3), -d0));
        let d1 = &sign(l)
            * &(fourth(&rising(&rat(2, 3), l)) / (factorial(3 * l + 1) * rising(&rat(5, 3), l)));
        phi1.push((rat_i(l as i64) + rat(2, 3), d1));
    }
    FJRWSeries {
        regularized: true,
        phi0,
        phi1,
        const0: GammaConst::new(rat_i(3), -1, 0),
        const1: GammaConst::new(rat(3, 2), 0, -1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn gamma_const_formatting() {
        assert_eq!(GammaConst::one().to_string(), "1");
        assert_eq!(GammaConst::rational(rat(-5, 2)).to_string(), "-5/2");
        assert_eq!(GammaConst::new(rat_i(3), -1, 0).to_string(), "3*Gamma(1/3)^-1");
        assert_eq!(GammaConst::new(rat(-1, 3), 1, 0).to_string(), "-1/3*Gamma(1/3)");
        assert_eq!(GammaConst::new(rat_i(1), 1, 0).to_string(), "Gamma(1/3)");
        assert_eq!(GammaConst::new(rat_i(-1), 0, 2).to_string(), "-Gamma(2/3)^2");
        assert_eq!(
            GammaConst::new(rat_i(2), 1, -1).to_string(),
            "2*Gamma(1/3)*Gamma(2/3)^-1"
        );
        assert_eq!(GammaConst::new(Rat::zero(), 4, 4).to_string(), "0");
    }

    #[test]
    fn gamma_const_algebra() {
        let a = GammaConst::new(rat(2, 3), 1, -2);
        let b = GammaConst::new(rat(3, 4), 2, 2);
        let p = &a * &b;
        assert_eq!(p, GammaConst::new(rat(1, 2), 3, 0));
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, GammaConst::one());
        assert!(GammaConst::rational(Rat::zero()).inv().is_none());
        assert!(p.is_rational() == false);
        assert!(GammaConst::rational(rat(7, 1)).is_rational());
        assert_eq!(a.scale(&rat(3, 2)), GammaConst::new(rat_i(1), 1, -2));
    }

    #[test]
    fn formal_leading_terms() {
        let s = fjrw_formal(0);
        assert!(!s.regularized());
        assert_eq!(s.terms(Sector::Phi0), &[(rat_i(1), rat_i(-1))]);
        assert_eq!(s.terms(Sector::Phi1), &[(rat_i(2), rat_i(1))]);
        assert_eq!(*s.recorded_constant(Sector::Phi0), GammaConst::one());
        assert_eq!(*s.recorded_constant(Sector::Phi1), GammaConst::one());
    }

    #[test]
    fn formal_exponents_step_by_three() {
        let s = fjrw_formal(7);
        for (l, (e, _)) in s.terms(Sector::Phi0).iter().enumerate() {
            assert_eq!(*e, rat_i(3 * l as i64 + 1));
        }
        for (l, (e, _)) in s.terms(Sector::Phi1).iter().enumerate() {
            assert_eq!(*e, rat_i(3 * l as i64 + 2));
        }
    }

    #[test]
    fn regularized_leading_terms() {
        let s = fjrw_regularized(1);
        assert!(s.regularized());
        assert_eq!(s.terms(Sector::Phi0)[0], (rat(1, 3), rat_i(-1)));
        assert_eq!(s.terms(Sector::Phi1)[0], (rat(2, 3), rat_i(1)));
        assert_eq!(s.terms(Sector::Phi0)[1], (rat(4, 3), rat(1, 648)));
        assert_eq!(s.terms(Sector::Phi1)[1], (rat(5, 3), rat(-2, 405)));
        assert_eq!(
            s.recorded_constant(Sector::Phi0).to_string(),
            "3*Gamma(1/3)^-1"
        );
        assert_eq!(
            s.recorded_constant(Sector::Phi1).to_string(),
            "3/2*Gamma(2/3)^-1"
        );
    }

    #[test]
    fn formal_ratios_grow_and_regularized_ratios_stay_bounded() {
        let formal = fjrw_formal(31);
        let reg = fjrw_regularized(31);
        for sector in Sector::ALL {
            let f = formal.terms(sector);
            let r = reg.terms(sector);
            let mut last = Rat::zero();
            for l in 0..31 {
                let ratio = (&f[l + 1].1 / &f[l].1).abs();
                assert!(ratio > last, "{sector} formal ratio dips at l = {l}");
                last = ratio;
            }
            assert!(last > Rat::one(), "{sector} formal ratio still small at l = 30");
            assert!(
                &last / (&f[1].1 / &f[0].1).abs() > rat_i(30),
                "{sector} formal growth too slow"
            );
            let mut last = Rat::zero();
            for l in 0..31 {
                let ratio = (&r[l + 1].1 / &r[l].1).abs();
                assert!(ratio > last, "{sector} regularized ratio dips at l = {l}");
                assert!(ratio < rat(1, 27), "{sector} regularized ratio at l = {l}");
                last = ratio;
            }
        }
    }

    #[test]
    fn formal_and_regularized_differ_by_rising_factors() {
        let formal = fjrw_formal(10);
        let reg = fjrw_regularized(10);
        for l in 0..=10u32 {
            let (_, a) = &formal.terms(Sector::Phi0)[l as usize];
            let (_, d) = &reg.terms(Sector::Phi0)[l as usize];
            assert_eq!(*a, d * rising(&rat(4, 3), l), "phi0 at l = {l}");
            let (_, b) = &formal.terms(Sector::Phi1)[l as usize];
            let (_, d) = &reg.terms(Sector::Phi1)[l as usize];
            assert_eq!(
                *b,
                &(d * rising(&rat(5, 3), l)) * &rat_i(3 * l as i64 + 1),
                "phi1 at l = {l}"
            );
        }
    }

    #[test]
    fn regularized_exponents_are_thirds() {
        let s = fjrw_regularized(6);
        for (l, (e, _)) in s.terms(Sector::Phi0).iter().enumerate() {
            assert_eq!(*e, rat_i(l as i64) + rat(1, 3));
        }
        for (l, (e, _)) in s.terms(Sector::Phi1).iter().enumerate() {
            assert_eq!(*e, rat_i(l as i64) + rat(2, 3));
        }
    }
}
