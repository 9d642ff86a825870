//! Measurement programs on the qutrit GHZ state.
//!
//! A program maps an input `x ∈ F₃ⁿ` to settings `s = (P·x) mod 3`. Site `i`
//! is measured with the rotated shift operator
//!
//! ```text
//! m̂ᵢ = α^{θ}|1⟩⟨0| + α^{θ}|2⟩⟨1| + α^{−2θ}|0⟩⟨2|,   θ = sᵢ·φᵢ
//! ```
//!
//! and the outcomes are summed mod 3. On the GHZ state the product of the
//! site operators only depends on `Σ = Σᵢ sᵢφᵢ` (settings lifted to the
//! integers), giving `E = (2α^Σ + α^{−2Σ})/3`.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gf3::{enumerate_inputs, Trit, TritFunction, TritVector};
use crate::phase::{omega_complex, AlphaPhase};
use crate::{fmt_rational, parse_rational, Rational};

/// Pre-processing matrix, per-site angles and post-processing trit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NmqcProgram {
    arity: usize,
    rows: Vec<TritVector>,
    angles: Vec<Rational>,
    post: Trit,
}

impl NmqcProgram {
    pub fn new(arity: usize, rows: Vec<TritVector>, angles: Vec<Rational>, post: Trit) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Domain("arity must be at least 1".into()));
        }
        if rows.len() != angles.len() {
            return Err(Error::dimension(rows.len(), angles.len()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != arity) {
            return Err(Error::dimension(arity, bad.len()));
        }
        Ok(NmqcProgram { arity, rows, angles, post })
    }

    /// A program with no qutrits: it always outputs `⊖post`.
    pub fn empty(arity: usize, post: Trit) -> Result<Self> {
        NmqcProgram::new(arity, Vec::new(), Vec::new(), post)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of qutrits.
    pub fn width(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[TritVector] {
        &self.rows
    }

    pub fn angles(&self) -> &[Rational] {
        &self.angles
    }

    pub fn post_trit(&self) -> Trit {
        self.post
    }

    fn check_input(&self, x: &TritVector) -> Result<()> {
        if x.len() != self.arity {
            return Err(Error::dimension(self.arity, x.len()));
        }
        Ok(())
    }

    /// `sᵢ = ⊕ⱼ Pᵢⱼ·xⱼ`.
    pub fn settings(&self, x: &TritVector) -> Result<Vec<Trit>> {
        self.check_input(x)?;
        Ok(self.rows.iter().map(|r| r.dot_unchecked(x)).collect())
    }

    /// `Σᵢ sᵢ·φᵢ` over the rationals.
    pub fn total_exponent(&self, x: &TritVector) -> Result<Rational> {
        let s = self.settings(x)?;
        Ok(s.iter()
            .zip(&self.angles)
            .filter(|(t, _)| !t.is_zero())
            .fold(Rational::zero(), |acc, (t, phi)| {
                acc + phi * BigInt::from(t.value())
            }))
    }

    pub fn exact_expectation(&self, x: &TritVector) -> Result<Expectation> {
        Ok(Expectation::from_exponent(self.total_exponent(x)?))
    }

    pub fn run_deterministic(&self, x: &TritVector) -> Result<ProgramOutcome> {
        Ok(self.exact_expectation(x)?.outcome())
    }

    /// The function value this program reports at `x`, if its outcome there
    /// is deterministic: `z ⊖ c`.
    pub fn claimed_value(&self, x: &TritVector) -> Result<Option<Trit>> {
        Ok(self.run_deterministic(x)?.claimed_value(self.post))
    }

    /// Checks every input in canonical order and reports the first one where
    /// the outcome is random or differs from `f`.
    pub fn verify(&self, f: &TritFunction) -> Result<Verification> {
        if f.arity() != self.arity {
            return Err(Error::dimension(self.arity, f.arity()));
        }
        for x in enumerate_inputs(self.arity)? {
            if self.claimed_value(&x)? != Some(f.at_index(x.index())) {
                return Ok(Verification { counterexample: Some(x) });
            }
        }
        Ok(Verification { counterexample: None })
    }

    /// The program file: a header `n l c`, then one `row | angle` line per
    /// qutrit.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{} {} {}\n", self.arity, self.width(), self.post);
        for (row, phi) in self.rows.iter().zip(&self.angles) {
            let trits: Vec<String> = row.iter().map(|t| t.to_string()).collect();
            out.push_str(&format!("{} | {}\n", trits.join(" "), fmt_rational(phi)));
        }
        out
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header 'n l c'"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(hline, format!("header must be 'n l c', found '{header}'")));
        }
        let parse_count = |s: &str, what: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(hline, format!("invalid {what} '{s}'")))
        };
        let arity = parse_count(fields[0], "arity")?;
        let width = parse_count(fields[1], "width")?;
        let post = fields[2]
            .parse::<u8>()
            .ok()
            .and_then(Trit::new)
            .ok_or_else(|| Error::parse(hline, format!("invalid post-processing trit '{}'", fields[2])))?;
        if arity == 0 {
            return Err(Error::parse(hline, "arity must be at least 1"));
        }

        let mut rows = Vec::with_capacity(width);
        let mut angles = Vec::with_capacity(width);
        for (line_no, line) in lines.by_ref().take(width) {
            let (row_part, angle_part) = line
                .split_once('|')
                .ok_or_else(|| Error::parse(line_no, "expected 't0 t1 … | p/q'"))?;
            let mut row = Vec::with_capacity(arity);
            for tok in row_part.split_whitespace() {
                let t = match tok.chars().collect::<Vec<_>>().as_slice() {
                    [c] => Trit::from_char(*c),
                    _ => None,
                };
                row.push(t.ok_or_else(|| Error::parse(line_no, format!("invalid trit '{tok}'")))?);
            }
            if row.len() != arity {
                return Err(Error::parse(
                    line_no,
                    format!("row has {} entries, expected {arity}", row.len()),
                ));
            }
            let phi = parse_rational(angle_part)
                .ok_or_else(|| Error::parse(line_no, format!("invalid angle '{}'", angle_part.trim())))?;
            rows.push(TritVector::new(row));
            angles.push(phi);
        }
        if rows.len() != width {
            return Err(Error::parse(hline, format!("header declares {width} rows, found {}", rows.len())));
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::parse(line_no, "unexpected content after the last row"));
        }
        NmqcProgram::new(arity, rows, angles, post)
    }
}

impl fmt::Display for NmqcProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_file_string())
    }
}

/// Exact GHZ expectation value of the product of site operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    /// `Σ = Σᵢ sᵢφᵢ`.
    pub exponent: Rational,
    /// `(2α^Σ + α^{−2Σ})/3`.
    pub value: Complex64,
    /// `α^Σ` when `Σ` is an integer multiple of 3; the state is then an
    /// eigenstate and `|E| = 1`.
    pub phase: Option<AlphaPhase>,
}

impl Expectation {
    pub fn from_exponent(exponent: Rational) -> Self {
        let a = AlphaPhase::new(exponent.clone());
        let b = a.pow(&Rational::from_integer((-2).into()));
        let phase = a.as_omega_power().map(|_| a.clone());
        let value = if phase.is_some() {
            a.to_complex()
        } else {
            (a.to_complex() * 2.0 + b.to_complex()) / 3.0
        };
        Expectation { exponent, value, phase }
    }

    pub fn is_deterministic(&self) -> bool {
        self.phase.is_some()
    }

    pub fn outcome(&self) -> ProgramOutcome {
        match self.phase.as_ref().and_then(AlphaPhase::as_omega_power) {
            Some(z) => ProgramOutcome::Deterministic(z),
            None => ProgramOutcome::Random(distribution_from_expectation(self.value)),
        }
    }
}

/// Inverts `E = Σₖ ωᵏ p(k)` for a real distribution: `p(k) = (1 + 2·Re(ω^{−k}E))/3`.
pub fn distribution_from_expectation(e: Complex64) -> [f64; 3] {
    let mut p = [0.0; 3];
    for (k, t) in Trit::ALL.into_iter().enumerate() {
        let rotated = omega_complex(-t) * e;
        p[k] = ((1.0 + 2.0 * rotated.re) / 3.0).clamp(0.0, 1.0);
    }
    p
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProgramOutcome {
    /// The measured sum `z` is fixed.
    Deterministic(Trit),
    /// The distribution of `z` over {0, 1, 2}.
    Random([f64; 3]),
}

impl ProgramOutcome {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, ProgramOutcome::Deterministic(_))
    }

    /// `z ⊖ c` for deterministic outcomes.
    pub fn claimed_value(&self, post: Trit) -> Option<Trit> {
        match self {
            ProgramOutcome::Deterministic(z) => Some(*z - post),
            ProgramOutcome::Random(_) => None,
        }
    }

    pub fn distribution(&self) -> [f64; 3] {
        match self {
            ProgramOutcome::Deterministic(z) => {
                let mut p = [0.0; 3];
                p[z.value() as usize] = 1.0;
                p
            }
            ProgramOutcome::Random(p) => *p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub counterexample: Option<TritVector>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tv(v: &[u8]) -> TritVector {
        TritVector::from_values(v)
    }

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn f2_program() -> NmqcProgram {
        NmqcProgram::new(
            2,
            vec![tv(&[1, 0]), tv(&[0, 1]), tv(&[2, 2])],
            vec![q(1), q(1), q(1)],
            Trit::ZERO,
        )
        .unwrap()
    }

    fn f2() -> TritFunction {
        TritFunction::new(2, "011111112".chars().map(|c| Trit::from_char(c).unwrap()).collect()).unwrap()
    }

    fn single(phi: Rational) -> NmqcProgram {
        NmqcProgram::new(1, vec![tv(&[1])], vec![phi], Trit::ZERO).unwrap()
    }

    #[test]
    fn settings_examples() {
        let p = f2_program();
        assert_eq!(p.settings(&tv(&[1, 2])).unwrap(), vec![Trit::ONE, Trit::TWO, Trit::ZERO]);
        assert_eq!(p.settings(&tv(&[0, 0])).unwrap(), vec![Trit::ZERO; 3]);
        let id = NmqcProgram::new(
            3,
            vec![tv(&[1, 0, 0]), tv(&[0, 1, 0]), tv(&[0, 0, 1])],
            vec![q(1); 3],
            Trit::ZERO,
        )
        .unwrap();
        assert_eq!(id.settings(&tv(&[0, 1, 2])).unwrap(), vec![Trit::ZERO, Trit::ONE, Trit::TWO]);
        assert!(matches!(p.settings(&tv(&[1])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn total_exponent_examples() {
        let p = f2_program();
        assert_eq!(p.total_exponent(&tv(&[2, 2])).unwrap(), q(6));
        assert_eq!(p.total_exponent(&tv(&[0, 0])).unwrap(), q(0));
        assert_eq!(p.total_exponent(&tv(&[1, 2])).unwrap(), q(3));
    }

    #[test]
    fn expectation_examples() {
        let e = Expectation::from_exponent(q(3));
        assert_eq!(e.phase, Some(AlphaPhase::omega(Trit::ONE)));
        assert!((e.value - omega_complex(Trit::ONE)).norm() < 1e-15);

        let e = Expectation::from_exponent(q(0));
        assert_eq!(e.phase, Some(AlphaPhase::one()));
        assert!((e.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let e = Expectation::from_exponent(q(1));
        assert!(e.phase.is_none());
        let theta = 2.0 * std::f64::consts::PI / 9.0;
        let direct = (Complex64::from_polar(1.0, theta) * 2.0 + Complex64::from_polar(1.0, 7.0 * theta)) / 3.0;
        assert!((e.value - direct).norm() < 1e-15);
        assert!(e.value.norm() < 1.0);
    }

    #[test]
    fn deterministic_runs() {
        let p = f2_program();
        let out = p.run_deterministic(&tv(&[1, 2])).unwrap();
        assert_eq!(out, ProgramOutcome::Deterministic(Trit::ONE));
        assert_eq!(out.claimed_value(p.post_trit()), Some(Trit::ONE));

        let shifted = NmqcProgram::new(2, p.rows().to_vec(), p.angles().to_vec(), Trit::TWO).unwrap();
        assert_eq!(shifted.claimed_value(&tv(&[0, 0])).unwrap(), Some(Trit::ONE));
    }

    #[test]
    fn random_run_distribution() {
        let out = single(q(1)).run_deterministic(&tv(&[1])).unwrap();
        let ProgramOutcome::Random(p) = out else { panic!("expected random outcome") };
        let theta = 2.0 * std::f64::consts::PI / 9.0;
        let e = (Complex64::from_polar(1.0, theta) * 2.0 + Complex64::from_polar(1.0, 7.0 * theta)) / 3.0;
        assert!((p[0] - (1.0 + 2.0 * e.re) / 3.0).abs() < 1e-15);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verification() {
        let p = f2_program();
        assert!(p.verify(&f2()).unwrap().passed());
        let zero = TritFunction::constant(2, Trit::ZERO).unwrap();
        assert_eq!(p.verify(&zero).unwrap().counterexample, Some(tv(&[0, 1])));

        // constant c is produced by post-processing alone
        let empty = NmqcProgram::empty(2, -Trit::TWO).unwrap();
        assert!(empty.verify(&TritFunction::constant(2, Trit::TWO).unwrap()).unwrap().passed());

        let f1 = TritFunction::constant(1, Trit::ZERO).unwrap();
        assert!(p.verify(&f1).is_err());
    }

    #[test]
    fn program_file_round_trip() {
        let p = NmqcProgram::new(
            2,
            vec![tv(&[1, 0]), tv(&[2, 2])],
            vec![q(1), Rational::new((-3).into(), 7.into())],
            Trit::TWO,
        )
        .unwrap();
        let text = p.to_file_string();
        assert_eq!(text, "2 2 2\n1 0 | 1\n2 2 | -3/7\n");
        assert_eq!(NmqcProgram::parse_file(&text).unwrap(), p);

        let commented = "# f2\n2 3 0\n1 0 | 1 # x0\n0 1 | 1\n\n2 2 | 1\n";
        assert_eq!(NmqcProgram::parse_file(commented).unwrap(), f2_program());

        assert_eq!(NmqcProgram::parse_file("1 0 2\n").unwrap(), NmqcProgram::empty(1, Trit::TWO).unwrap());
    }

    #[test]
    fn program_file_errors() {
        let cases = [
            ("2 1\n", 1),
            ("2 1 0\n1 0 1\n", 2),
            ("2 1 0\n1 | 1\n", 2),
            ("2 1 0\n1 3 | 1\n", 2),
            ("2 1 0\n1 0 | x\n", 2),
            ("2 2 0\n1 0 | 1\n", 1),
            ("2 1 0\n1 0 | 1\n0 1 | 1\n", 3),
        ];
        for (text, line) in cases {
            match NmqcProgram::parse_file(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn eigen_exponents_satisfy_both_conditions(k in -40i64..40) {
            // Σ ≡ 0 (mod 3): α^{−2Σ} and α^{Σ} are the same ω-power
            let sigma = q(3 * k);
            let a = AlphaPhase::new(sigma.clone());
            let b = a.pow(&q(-2));
            prop_assert_eq!(&a, &b);
            prop_assert!(a.as_omega_power().is_some());
        }

        #[test]
        fn distributions_are_consistent(p in -500i64..500, d in 1i64..40) {
            let e = Expectation::from_exponent(Rational::new(p.into(), d.into()));
            let dist = e.outcome().distribution();
            prop_assert!(dist.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let back: Complex64 = Trit::ALL.iter().zip(dist).map(|(&k, pk)| omega_complex(k) * pk).sum();
            prop_assert!((back - e.value).norm() < 1e-12);
        }
    }
}
