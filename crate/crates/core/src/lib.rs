//! Exact engine for non-adaptive measurement-based computation with qutrits.
//!
//! The crate covers the full pipeline around a qutrit GHZ resource:
//!
//! - [`gf3`]: trits, truth tables and Reed-Muller interpolation over F₃.
//! - [`phase`]: exact powers of the ninth root of unity α = e^{2πi/9}.
//! - [`protocol`]: measurement programs, their exact GHZ expectation values
//!   and deterministic verification.
//! - [`synthesis`]: constructive program synthesis for arbitrary ternary
//!   functions, the efficient fₙ family and minimal-width search.
//! - [`bell`]: the induced Bell expressions and exhaustive classical
//!   (local hidden variable) bounds.
//! - [`simulator`]: a dense state-vector cross-check with seeded sampling.
//!
//! Every quantity that can be exact is exact: angles and weights are
//! rationals, phases are rational exponents of α. Floating point only shows
//! up when converting to complex numbers and in the simulator.

pub mod bell;
pub mod error;
pub mod gf3;
pub mod linalg;
pub mod phase;
pub mod protocol;
pub mod simulator;
pub mod synthesis;

pub use error::{Error, Result};
pub use gf3::{Trit, TritFunction, TritPolynomial, TritVector};
pub use phase::AlphaPhase;
pub use protocol::{NmqcProgram, ProgramOutcome};

/// Exact rational number used for angles, exponents and weights.
pub type Rational = num_rational::BigRational;

/// Parses `p/q` or `p` into a reduced [`Rational`].
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let r: Rational = s.parse().ok()?;
    Some(r)
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
