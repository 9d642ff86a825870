//! Program synthesis for ternary functions.
//!
//! A program is deterministic for `f` when `Σᵢ sᵢφᵢ ≡ 3·(f(x) ⊕ c) (mod 9)`
//! at every input. Taking the exponent equal to `3·(f ⊕ c)` over the
//! rationals turns this into a linear system whose unknowns are one angle
//! per nonzero row vector `v ∈ F₃ⁿ`. The function vectors of the strictly
//! linear maps `x ↦ v·x` together with the all-ones vector form a basis of
//! ℝ^{3ⁿ}, so the system always has a unique solution.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gf3::{enumerate_inputs, pow3, Trit, TritFunction, TritVector};
use crate::linalg::{rank, rank_mod3, solve_in_span, solve_square};
use crate::protocol::NmqcProgram;
use crate::Rational;

/// Largest arity [`synthesize`] accepts (a 242×242 rational solve).
pub const MAX_SYNTHESIS_ARITY: usize = 5;

/// Largest arity [`minimal_support`] accepts.
pub const MAX_MINIMAL_ARITY: usize = 3;

/// Arity up to which [`minimal_support`] runs the unpruned subset search.
pub const EXHAUSTIVE_MINIMAL_ARITY: usize = 2;

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Function vectors `f⃗_v` of all nonzero `v ∈ F₃ⁿ`, plus the constant
/// vector.
#[derive(Clone, Debug)]
pub struct LinearBasisSystem {
    arity: usize,
    inputs: Vec<TritVector>,
    vectors: Vec<TritVector>,
}

impl LinearBasisSystem {
    pub fn new(arity: usize) -> Result<Self> {
        let inputs = enumerate_inputs(arity)?;
        let vectors = inputs[1..].to_vec();
        Ok(LinearBasisSystem { arity, inputs, vectors })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The nonzero row vectors, in canonical order.
    pub fn vectors(&self) -> &[TritVector] {
        &self.vectors
    }

    /// `f⃗_v` as integers in {0,1,2}, indexed by input.
    pub fn column(&self, v: &TritVector) -> Vec<Rational> {
        self.inputs.iter().map(|x| int(v.dot_unchecked(x).value() as i64)).collect()
    }

    /// The full `3ⁿ × 3ⁿ` matrix: one column per nonzero `v`, then the
    /// constant column.
    pub fn full_matrix(&self) -> Vec<Vec<Rational>> {
        self.inputs
            .iter()
            .map(|x| {
                let mut row: Vec<Rational> =
                    self.vectors.iter().map(|v| int(v.dot_unchecked(x).value() as i64)).collect();
                row.push(int(1));
                row
            })
            .collect()
    }

    /// Rows for `x ≠ 0`, linear columns only. The `x = 0` row and the
    /// constant column split off as a 1×1 block of the full matrix.
    pub fn reduced_matrix(&self) -> Vec<Vec<Rational>> {
        self.full_matrix()[1..]
            .iter()
            .map(|row| row[..row.len() - 1].to_vec())
            .collect()
    }

    pub fn is_invertible(&self) -> bool {
        let n = self.inputs.len();
        rank(self.full_matrix()) == n
    }

    /// Solves `Σ_v λ_v (v·x) = target(x)` for all `x ≠ 0`.
    pub fn solve(&self, target: &[Rational]) -> Result<Vec<Rational>> {
        if target.len() != self.inputs.len() {
            return Err(Error::dimension(self.inputs.len(), target.len()));
        }
        solve_square(self.reduced_matrix(), target[1..].to_vec())
            .ok_or_else(|| Error::Internal("linear basis system is singular".into()))
    }
}

/// `3·(f(x) ⊕ c)` for every input.
fn scaled_target(f: &TritFunction, c: Trit) -> Vec<Rational> {
    f.table().iter().map(|&t| int(3 * (t + c).value() as i64)).collect()
}

/// A solved angle for one row vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleEntry {
    pub row: TritVector,
    pub angle: Rational,
}

/// Output of [`synthesize_with_report`].
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub program: NmqcProgram,
    /// Every nonzero `v` with its coefficient, including zero coefficients.
    pub coefficients: Vec<AngleEntry>,
}

/// Builds a deterministic program for `f` with post trit `c = ⊖f(0)`.
pub fn synthesize(f: &TritFunction) -> Result<NmqcProgram> {
    synthesize_with_report(f).map(|s| s.program)
}

pub fn synthesize_with_report(f: &TritFunction) -> Result<Synthesis> {
    let n = f.arity();
    if n > MAX_SYNTHESIS_ARITY {
        return Err(Error::ResourceLimit(format!(
            "synthesis solves a {0}×{0} system; arity {n} exceeds the limit of {MAX_SYNTHESIS_ARITY}",
            pow3(n)? - 1
        )));
    }
    let post = -f.at_index(0);
    let system = LinearBasisSystem::new(n)?;
    let lambda = system.solve(&scaled_target(f, post))?;
    let coefficients: Vec<AngleEntry> = system
        .vectors()
        .iter()
        .zip(lambda)
        .map(|(v, angle)| AngleEntry { row: v.clone(), angle })
        .collect();
    let (rows, angles) = coefficients
        .iter()
        .filter(|e| !e.angle.is_zero())
        .map(|e| (e.row.clone(), e.angle.clone()))
        .unzip();
    let program = NmqcProgram::new(n, rows, angles, post)?;
    Ok(Synthesis { program, coefficients })
}

/// `fₙ(x)`: all squares, all pairwise products, twice every `xᵢ²xⱼ` with
/// `i ≠ j`, and all triple products.
pub fn family_value(x: &TritVector) -> Trit {
    let n = x.len();
    let v = x.entries();
    let mut acc = Trit::ZERO;
    for i in 0..n {
        acc += v[i] * v[i];
        for j in 0..n {
            if j != i {
                acc += Trit::TWO * v[i] * v[i] * v[j];
            }
        }
        for j in i + 1..n {
            acc += v[i] * v[j];
            for k in j + 1..n {
                acc += v[i] * v[j] * v[k];
            }
        }
    }
    acc
}

pub fn family_function(n: usize) -> Result<TritFunction> {
    if n < 2 {
        return Err(Error::Domain(format!("the fₙ family starts at n = 2, got {n}")));
    }
    TritFunction::from_fn(n, family_value)
}

/// `n` identity rows, then `(2,…,2)` so that `sₙ = 2·⊕ᵢxᵢ`; all angles 1.
pub fn family_program(n: usize) -> Result<NmqcProgram> {
    if n < 2 {
        return Err(Error::Domain(format!("the fₙ family starts at n = 2, got {n}")));
    }
    let mut rows: Vec<TritVector> = (0..n)
        .map(|i| {
            let mut e = vec![Trit::ZERO; n];
            e[i] = Trit::ONE;
            TritVector::new(e)
        })
        .collect();
    rows.push(TritVector::new(vec![Trit::TWO; n]));
    NmqcProgram::new(n, rows, vec![int(1); n + 1], Trit::ZERO)
}

pub fn family_fn(n: usize) -> Result<(TritFunction, NmqcProgram)> {
    Ok((family_function(n)?, family_program(n)?))
}

/// The step `f_{n+1}(x) = fₙ(x) ⊕ xₙ² ⊕ 2xₙ²S ⊕ xₙ(2S)(2 ⊕ S)` with
/// `S = ⊕_{i<n} xᵢ`.
fn recurrence_step(fn_x: Trit, xn: Trit, s: Trit) -> Trit {
    fn_x + xn * xn + Trit::TWO * xn * xn * s + xn * (Trit::TWO * s) * (Trit::TWO + s)
}

fn recurrence_holds(n: usize, step: impl Fn(Trit, Trit, Trit) -> Trit) -> Result<bool> {
    if n < 2 {
        return Err(Error::Domain(format!("the fₙ family starts at n = 2, got {n}")));
    }
    let inputs = enumerate_inputs(n + 1)?;
    Ok(inputs.iter().all(|x| {
        let head = TritVector::new(x.entries()[..n].to_vec());
        let rhs = step(family_value(&head), x[n], head.trit_sum());
        family_value(x) == rhs
    }))
}

/// Checks the `n → n+1` recurrence of the fₙ family on every input of F₃^{n+1}.
pub fn fn_recurrence_check(n: usize) -> Result<bool> {
    recurrence_holds(n, recurrence_step)
}

/// One line of the fₙ evaluation table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRow {
    pub input: TritVector,
    pub value: Trit,
    /// `⊕ᵢ xᵢ`.
    pub parity: Trit,
    /// `Σᵢ xᵢ` over the integers.
    pub linear: u64,
    /// `2·⊕ᵢ xᵢ` as an integer in `0..3`.
    pub last: u64,
}

impl FamilyRow {
    pub fn exponent(&self) -> u64 {
        self.linear + self.last
    }

    /// The outcome `ω^k` with `k = (Σxᵢ + 2·⊕xᵢ)/3 mod 3`.
    pub fn omega(&self) -> Trit {
        Trit::from_int((self.exponent() / 3) as i64)
    }

    /// `α^{a+b}=α^t=ω^k`.
    pub fn cell(&self) -> String {
        format!("α^{{{}+{}}}=α^{}=ω^{}", self.linear, self.last, self.exponent(), self.omega())
    }
}

/// Rows for the non-decreasing inputs of arity `n`; fₙ is symmetric, so
/// these cover every input up to permutation.
pub fn family_table(n: usize) -> Result<Vec<FamilyRow>> {
    let f = family_function(n)?;
    Ok(enumerate_inputs(n)?
        .into_iter()
        .filter(|x| x.entries().windows(2).all(|w| w[0] <= w[1]))
        .map(|x| {
            let parity = x.trit_sum();
            FamilyRow {
                value: f.at_index(x.index()),
                linear: x.iter().map(|t| u64::from(t.value())).sum(),
                last: u64::from((Trit::TWO * parity).value()),
                parity,
                input: x,
            }
        })
        .collect())
}

/// Result of [`minimal_support`].
#[derive(Clone, Debug)]
pub struct MinimalSupport {
    /// Minimum number of distinct row vectors.
    pub size: usize,
    pub program: NmqcProgram,
    /// Number of candidate subsets whose span was tested.
    pub subsets_tested: u64,
}

/// Smallest set of row vectors whose angles put `3·(f ⊕ c)` exactly in the
/// exponent (no mod-9 slack).
///
/// Subsets are tried by ascending size, lexicographically within a size.
/// Returns `Ok(None)` when `f(0) ⊕ c ≠ 0`: every setting vanishes at the
/// origin, so no set of rows can work. For arity 3 only supersets of the
/// support of the full solution are tried; the full system is invertible,
/// so any feasible subset contains that support.
pub fn minimal_support(f: &TritFunction, c: Trit) -> Result<Option<MinimalSupport>> {
    let n = f.arity();
    if n > MAX_MINIMAL_ARITY {
        return Err(Error::ResourceLimit(format!(
            "subset search is limited to arity {MAX_MINIMAL_ARITY}, got {n}"
        )));
    }
    minimal_support_search(f, c, n > EXHAUSTIVE_MINIMAL_ARITY)
}

fn minimal_support_search(f: &TritFunction, c: Trit, prune: bool) -> Result<Option<MinimalSupport>> {
    let n = f.arity();
    if !(f.at_index(0) + c).is_zero() {
        return Ok(None);
    }
    let system = LinearBasisSystem::new(n)?;
    let target = scaled_target(f, c);
    let reduced_target = &target[1..];
    let columns: Vec<Vec<Rational>> = system.vectors().iter().map(|v| system.column(v)[1..].to_vec()).collect();
    let total = columns.len();

    let required: Vec<usize> = if prune {
        system
            .solve(&target)?
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_zero())
            .map(|(i, _)| i)
            .collect()
    } else {
        Vec::new()
    };
    let optional: Vec<usize> = (0..total).filter(|i| !required.contains(i)).collect();

    let mut tested = 0u64;
    for size in required.len()..=total {
        for extra in (0..optional.len()).combinations(size - required.len()) {
            let mut subset: Vec<usize> = required.iter().copied().chain(extra.iter().map(|&j| optional[j])).collect();
            subset.sort_unstable();
            tested += 1;
            let cols: Vec<Vec<Rational>> = subset.iter().map(|&i| columns[i].clone()).collect();
            if let Some(coef) = solve_in_span(&cols, reduced_target) {
                if coef.iter().any(Zero::is_zero) {
                    // a proper subset would have worked and been found earlier
                    return Err(Error::Internal("feasible subset with a zero angle".into()));
                }
                let rows = subset.iter().map(|&i| system.vectors()[i].clone()).collect();
                let program = NmqcProgram::new(n, rows, coef, c)?;
                return Ok(Some(MinimalSupport { size, program, subsets_tested: tested }));
            }
        }
    }
    Err(Error::Internal(
        "no subset of row vectors spans the target; the linear basis would be incomplete".into(),
    ))
}

/// `(3ⁿ − 1)/2`: the fewest qutrits any program for a function at Hamming
/// distance one from a constant can use.
pub fn delta_width_floor(n: usize) -> Result<usize> {
    Ok((pow3(n)? - 1) / 2)
}

/// `P′ = P·M` over F₃. `M` must be square and invertible.
pub fn transform_preprocessing(p: &[TritVector], m: &[TritVector]) -> Result<Vec<TritVector>> {
    let n = m.len();
    if let Some(bad) = m.iter().find(|r| r.len() != n) {
        return Err(Error::dimension(n, bad.len()));
    }
    if let Some(bad) = p.iter().find(|r| r.len() != n) {
        return Err(Error::dimension(n, bad.len()));
    }
    if rank_mod3(m) < n {
        return Err(Error::NotInvertible);
    }
    Ok(p.iter()
        .map(|row| {
            TritVector::new(
                (0..n)
                    .map(|k| row.iter().zip(m).map(|(pj, mj)| pj * mj[k]).sum())
                    .collect(),
            )
        })
        .collect())
}

/// Whether each row is `(1,…,1)` or `(2,…,2)`.
pub fn constant_row_flags(p: &[TritVector]) -> Vec<bool> {
    p.iter()
        .map(|row| {
            !row.is_empty()
                && (row.iter().all(|t| t == Trit::ONE) || row.iter().all(|t| t == Trit::TWO))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tv(v: &[u8]) -> TritVector {
        TritVector::from_values(v)
    }

    fn func(n: usize, digits: &str) -> TritFunction {
        TritFunction::new(n, digits.chars().map(|c| Trit::from_char(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn basis_is_invertible_up_to_three_variables() {
        for n in 1..=3 {
            let sys = LinearBasisSystem::new(n).unwrap();
            assert!(sys.is_invertible(), "n = {n}");
            let full = sys.full_matrix();
            // origin row: zero in every linear column, one in the constant column
            assert!(full[0][..full.len() - 1].iter().all(Zero::is_zero));
            assert_eq!(full[0][full.len() - 1], int(1));
        }
    }

    #[test]
    fn synthesize_delta_complement_one_variable() {
        let f = func(1, "011");
        let s = synthesize_with_report(&f).unwrap();
        let p = &s.program;
        assert_eq!(p.post_trit(), Trit::ZERO);
        assert_eq!(p.rows(), &[tv(&[1]), tv(&[2])]);
        assert_eq!(p.angles(), &[int(1), int(1)]);
        assert!(p.verify(&f).unwrap().passed());
    }

    #[test]
    fn synthesize_constant() {
        let f = TritFunction::constant(2, Trit::TWO).unwrap();
        let p = synthesize(&f).unwrap();
        assert_eq!(p.width(), 0);
        assert_eq!(p.post_trit(), Trit::ONE);
        assert!(p.verify(&f).unwrap().passed());
    }

    #[test]
    fn family_tables() {
        let rows = family_table(2).unwrap();
        let values: Vec<u8> = rows.iter().map(|r| r.value.value()).collect();
        assert_eq!(values, vec![0, 1, 1, 1, 1, 2]);
        let omegas: Vec<u8> = rows.iter().map(|r| r.omega().value()).collect();
        assert_eq!(omegas, values);
        assert_eq!(rows[4].input, TritVector::from_values(&[1, 2]));
        assert_eq!(rows[4].cell(), "α^{3+0}=α^3=ω^1");
        assert_eq!(rows[5].cell(), "α^{4+2}=α^6=ω^2");

        let rows = family_table(3).unwrap();
        assert_eq!(rows.len(), 10);
        let r = rows.iter().find(|r| r.input == TritVector::from_values(&[1, 1, 2])).unwrap();
        assert_eq!((r.value, r.parity), (Trit::TWO, Trit::ONE));
        assert_eq!(r.cell(), "α^{4+2}=α^6=ω^2");
    }

    #[test]
    fn synthesize_f2_recovers_family_program() {
        let (f2, family) = family_fn(2).unwrap();
        let p = synthesize(&f2).unwrap();
        assert!(p.width() <= 8);
        assert!(p.verify(&f2).unwrap().passed());
        // the exact solution is unique, and the family program realizes it
        let pairs = |q: &NmqcProgram| {
            let mut v: Vec<_> = q.rows().iter().cloned().zip(q.angles().iter().cloned()).collect();
            v.sort();
            v
        };
        assert_eq!(pairs(&p), pairs(&family));
        assert_eq!(p.post_trit(), family.post_trit());
    }

    #[test]
    fn universality_all_one_variable_functions() {
        for code in 0..27 {
            let f = TritFunction::new(1, TritVector::from_index(3, code).entries().to_vec()).unwrap();
            let p = synthesize(&f).unwrap();
            assert!(p.width() <= 2);
            assert!(p.verify(&f).unwrap().passed(), "{f:?}");
        }
    }

    #[test]
    fn universality_random_two_variable_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let table = (0..9).map(|_| Trit::new(rng.random_range(0..3)).unwrap()).collect();
            let f = TritFunction::new(2, table).unwrap();
            let p = synthesize(&f).unwrap();
            assert!(p.width() <= 8);
            assert!(p.verify(&f).unwrap().passed());
        }
    }

    #[test]
    fn synthesis_limit() {
        let f = TritFunction::constant(6, Trit::ZERO).unwrap();
        assert!(matches!(synthesize(&f), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn family_examples() {
        let (f2, _) = family_fn(2).unwrap();
        assert_eq!(f2.eval(&tv(&[0, 1])).unwrap(), Trit::ONE);
        assert_eq!(f2.eval(&tv(&[2, 2])).unwrap(), Trit::TWO);
        assert_eq!(f2.eval(&tv(&[1, 2])).unwrap(), Trit::ONE);

        let (f3, p3) = family_fn(3).unwrap();
        assert_eq!(f3.eval(&tv(&[1, 1, 2])).unwrap(), Trit::TWO);
        assert_eq!(p3.total_exponent(&tv(&[0, 0, 1])).unwrap(), int(3));
        assert_eq!(p3.claimed_value(&tv(&[0, 0, 1])).unwrap(), Some(Trit::ONE));
        assert_eq!(p3.width(), 4);

        assert!(matches!(family_fn(1), Err(Error::Domain(_))));
    }

    #[test]
    fn family_exponents_are_multiples_of_three() {
        for n in 2..=5 {
            let (f, p) = family_fn(n).unwrap();
            for x in enumerate_inputs(n).unwrap() {
                let sigma = p.total_exponent(&x).unwrap();
                assert!(sigma.is_integer());
                let k = sigma.to_integer();
                assert_eq!(&k % 3, BigInt::from(0));
                assert_eq!(p.claimed_value(&x).unwrap(), Some(f.eval(&x).unwrap()));
            }
        }
    }

    #[test]
    fn family_is_permutation_invariant() {
        let f = family_function(3).unwrap();
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for x in enumerate_inputs(3).unwrap() {
            for p in perms {
                let y = TritVector::new(p.iter().map(|&i| x[i]).collect());
                assert_eq!(f.eval(&x).unwrap(), f.eval(&y).unwrap());
            }
        }
    }

    #[test]
    fn recurrence() {
        assert!(fn_recurrence_check(2).unwrap());
        assert!(fn_recurrence_check(3).unwrap());
        // dropping the xₙ² term must be caught
        let mutated = |fx: Trit, xn: Trit, s: Trit| recurrence_step(fx, xn, s) - xn * xn;
        assert!(!recurrence_holds(2, mutated).unwrap());
        assert!(fn_recurrence_check(1).is_err());
    }

    #[test]
    fn minimal_support_examples() {
        let delta = func(1, "011");
        let m = minimal_support(&delta, Trit::ZERO).unwrap().unwrap();
        assert_eq!(m.size, 2);
        assert!(m.program.verify(&delta).unwrap().passed());
        assert!(m.size >= delta_width_floor(1).unwrap());

        let linear = func(1, "012");
        let m = minimal_support(&linear, Trit::ZERO).unwrap().unwrap();
        assert_eq!(m.size, 1);
        assert_eq!(m.program.angles(), &[int(3)]);

        // post trit incompatible with f(0)
        assert!(minimal_support(&delta, Trit::ONE).unwrap().is_none());
    }

    #[test]
    fn minimal_support_delta_two_variables() {
        let delta = TritFunction::delta_complement(2).unwrap();
        let m = minimal_support(&delta, Trit::ZERO).unwrap().unwrap();
        assert!(m.size >= delta_width_floor(2).unwrap());
        assert!(m.program.verify(&delta).unwrap().passed());
        // regression baseline from the subset search
        assert_eq!(m.size, 8);
    }

    #[test]
    fn pruned_search_agrees_with_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let table: Vec<Trit> = (0..9).map(|_| Trit::new(rng.random_range(0..3)).unwrap()).collect();
            let f = TritFunction::new(2, table).unwrap();
            let c = -f.at_index(0);
            let full = minimal_support_search(&f, c, false).unwrap().unwrap();
            let pruned = minimal_support_search(&f, c, true).unwrap().unwrap();
            assert_eq!(full.size, pruned.size);
            assert_eq!(full.program, pruned.program);
            assert_eq!(full.size, synthesize(&f).unwrap().width());
        }
    }

    #[test]
    fn transform_examples() {
        let p = vec![tv(&[1, 2]), tv(&[2, 2])];
        let id = vec![tv(&[1, 0]), tv(&[0, 1])];
        assert_eq!(transform_preprocessing(&p, &id).unwrap(), p);

        assert_eq!(transform_preprocessing(&[tv(&[1])], &[tv(&[2])]).unwrap(), vec![tv(&[2])]);

        let swap = vec![tv(&[0, 1]), tv(&[1, 0])];
        assert_eq!(transform_preprocessing(&[tv(&[1, 2])], &swap).unwrap(), vec![tv(&[2, 1])]);

        let singular = vec![tv(&[1, 2]), tv(&[2, 1])];
        assert_eq!(transform_preprocessing(&p, &singular), Err(Error::NotInvertible));

        assert_eq!(constant_row_flags(&p), vec![false, true]);
        assert_eq!(constant_row_flags(&[tv(&[1, 1, 1]), tv(&[1, 0, 1])]), vec![true, false]);
    }
}
