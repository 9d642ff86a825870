//! Exact powers of α = e^{2πi/9}.
//!
//! The outcome root ω = α³ and the outcome set Ω = {1, ω, ω²} live here as
//! the phases whose exponent is an integer multiple of three. All exact
//! comparisons elsewhere in the crate go through [`AlphaPhase`]; this is the
//! only module that produces floating-point complex numbers from phases.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::gf3::Trit;
use crate::Rational;

/// `α^q` with the rational exponent `q` kept in `[0, 9)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlphaPhase {
    exponent: Rational,
}

fn nine() -> Rational {
    Rational::from_integer(9.into())
}

impl AlphaPhase {
    pub fn new(exponent: Rational) -> Self {
        let nine = nine();
        let mut q = &exponent % &nine;
        if q.is_negative() {
            q += &nine;
        }
        AlphaPhase { exponent: q }
    }

    pub fn from_integer(exponent: i64) -> Self {
        AlphaPhase::new(Rational::from_integer(exponent.into()))
    }

    pub fn one() -> Self {
        AlphaPhase { exponent: Rational::zero() }
    }

    /// `ωᵏ = α^{3k}`.
    pub fn omega(k: Trit) -> Self {
        AlphaPhase::from_integer(3 * k.value() as i64)
    }

    pub fn exponent(&self) -> &Rational {
        &self.exponent
    }

    /// Multiplication adds exponents modulo 9.
    pub fn mul(&self, other: &AlphaPhase) -> AlphaPhase {
        AlphaPhase::new(&self.exponent + &other.exponent)
    }

    /// `(α^q)^k` for a rational `k`.
    pub fn pow(&self, k: &Rational) -> AlphaPhase {
        AlphaPhase::new(&self.exponent * k)
    }

    pub fn inverse(&self) -> AlphaPhase {
        AlphaPhase::new(nine() - &self.exponent)
    }

    /// `Some(m)` when this phase is `ωᵐ ∈ Ω`, otherwise `None`.
    pub fn as_omega_power(&self) -> Option<Trit> {
        if !self.exponent.is_integer() {
            return None;
        }
        let q = self.exponent.to_integer().to_i64()?;
        (q % 3 == 0).then(|| Trit::from_int(q / 3))
    }

    pub fn to_complex(&self) -> Complex64 {
        let q = self.exponent.to_f64().expect("exponent is in [0, 9)");
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * q / 9.0)
    }
}

impl Mul for &AlphaPhase {
    type Output = AlphaPhase;
    fn mul(self, rhs: &AlphaPhase) -> AlphaPhase {
        AlphaPhase::mul(self, rhs)
    }
}

impl fmt::Display for AlphaPhase {
    /// Renders as `a^{p/q}` (or `a^{p}` for integer exponents).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent.denom().is_one() {
            write!(f, "a^{{{}}}", self.exponent.numer())
        } else {
            write!(f, "a^{{{}/{}}}", self.exponent.numer(), self.exponent.denom())
        }
    }
}

/// `ωᵏ` as a complex number.
pub fn omega_complex(k: Trit) -> Complex64 {
    AlphaPhase::omega(k).to_complex()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    fn a(p: i64, q: i64) -> AlphaPhase {
        AlphaPhase::new(r(p, q))
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(a(1, 1).mul(&a(2, 1)), a(3, 1));
        assert_eq!(a(4, 1).mul(&a(6, 1)), a(1, 1));
        assert_eq!(a(1, 3).mul(&a(26, 3)), AlphaPhase::one());
        assert_eq!(a(-1, 1).exponent(), &r(8, 1));
    }

    #[test]
    fn omega_powers() {
        assert_eq!(a(6, 1).as_omega_power(), Some(Trit::TWO));
        assert_eq!(a(3, 1).as_omega_power(), Some(Trit::ONE));
        assert_eq!(a(0, 1).as_omega_power(), Some(Trit::ZERO));
        assert_eq!(a(2, 1).as_omega_power(), None);
        assert_eq!(a(3, 2).as_omega_power(), None);
        assert_eq!(a(12, 1).as_omega_power(), Some(Trit::ONE));
    }

    #[test]
    fn complex_values() {
        let one = a(0, 1).to_complex();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let w = a(3, 1).to_complex();
        assert!((w - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        // independent trig evaluation of e^{iπ}
        let half = a(9, 2).to_complex();
        let angle = std::f64::consts::PI;
        assert!((half - Complex64::new(angle.cos(), angle.sin())).norm() < 1e-15);
        assert!((half - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn roots_of_unity_identities() {
        let w1 = omega_complex(Trit::ONE);
        let w2 = omega_complex(Trit::TWO);
        assert!((w1.re + 0.5).abs() < 1e-15);
        assert!((w2.re + 0.5).abs() < 1e-15);
        let s = Complex64::new(1.0, 0.0) + w1 + w2;
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn rendering() {
        assert_eq!(a(3, 1).to_string(), "a^{3}");
        assert_eq!(a(9, 2).to_string(), "a^{9/2}");
        assert_eq!(a(-1, 3).to_string(), "a^{26/3}");
    }

    fn arb_phase() -> impl Strategy<Value = AlphaPhase> {
        (-200i64..200, 1i64..30).prop_map(|(p, q)| a(p, q))
    }

    proptest! {
        #[test]
        fn group_laws(x in arb_phase(), y in arb_phase(), z in arb_phase()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            prop_assert_eq!(x.mul(&AlphaPhase::one()), x.clone());
            prop_assert_eq!(x.mul(&x.inverse()), AlphaPhase::one());
            prop_assert!(*x.exponent() >= Rational::zero() && *x.exponent() < nine());
            prop_assert!((x.to_complex().norm() - 1.0).abs() < 1e-15);
        }

        #[test]
        fn complex_is_homomorphic(x in arb_phase(), y in arb_phase()) {
            let lhs = x.mul(&y).to_complex();
            let rhs = x.to_complex() * y.to_complex();
            prop_assert!((lhs - rhs).norm() < 1e-13);
        }
    }
}
