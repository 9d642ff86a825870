//! Bell expressions induced by a function and a pre-processing matrix.
//!
//! For weights `w(x)` the expression is `Re u₃ = Re Σₓ w(x) ω^{−f(x)} E(z|s(x))`
//! and the average success probability is `p̄ = (1 + 2·Re u₃)/3`. Quantum
//! programs that compute `f` reach `Re u₃ = 1`; the classical bound is the
//! maximum over deterministic local strategies, found here by exhaustive
//! enumeration.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf3::{enumerate_inputs, pow3, Trit, TritFunction, TritVector};
use crate::phase::omega_complex;
use crate::protocol::NmqcProgram;
use crate::{fmt_rational, parse_rational, Rational};

/// Default cap on the number of sites for [`lhv_bound`] (27⁶ strategies).
pub const DEFAULT_MAX_LHV_WIDTH: usize = 6;

const DIST_TOLERANCE: f64 = 1e-12;

fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// A function, a sampling distribution over inputs and the program whose
/// settings define the measurement contexts.
#[derive(Clone, Debug)]
pub struct BellGame {
    function: TritFunction,
    weights: Vec<Rational>,
    program: NmqcProgram,
}

impl BellGame {
    pub fn new(function: TritFunction, program: NmqcProgram, weights: Vec<Rational>) -> Result<Self> {
        if function.arity() != program.arity() {
            return Err(Error::dimension(program.arity(), function.arity()));
        }
        let count = pow3(function.arity())?;
        if weights.len() != count {
            return Err(Error::dimension(count, weights.len()));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::Domain("weights must be non-negative".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("weights sum to {}, not 1", fmt_rational(&total))));
        }
        Ok(BellGame { function, weights, program })
    }

    /// Uniform weights `1/3ⁿ`.
    pub fn uniform(function: TritFunction, program: NmqcProgram) -> Result<Self> {
        let count = pow3(function.arity())?;
        let w = Rational::new(BigInt::one(), BigInt::from(count));
        BellGame::new(function, program, vec![w; count])
    }

    pub fn function(&self) -> &TritFunction {
        &self.function
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn program(&self) -> &NmqcProgram {
        &self.program
    }

    pub fn width(&self) -> usize {
        self.program.width()
    }

    fn inputs(&self) -> Vec<TritVector> {
        enumerate_inputs(self.function.arity()).expect("arity validated at construction")
    }

    /// Settings `s(x)` for every input, in canonical order.
    pub fn settings_table(&self) -> Vec<Vec<Trit>> {
        self.inputs()
            .iter()
            .map(|x| self.program.settings(x).expect("arity validated"))
            .collect()
    }
}

/// Reads `3ⁿ` non-negative rationals (`p/q` or integers) separated by
/// whitespace; `#` starts a comment.
pub fn parse_weights(text: &str, arity: usize) -> Result<Vec<Rational>> {
    let mut weights = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body.split_whitespace() {
            let w = parse_rational(tok).ok_or_else(|| Error::parse(i + 1, format!("invalid weight '{tok}'")))?;
            if w.is_negative() {
                return Err(Error::parse(i + 1, format!("negative weight '{tok}'")));
            }
            weights.push(w);
        }
    }
    let count = pow3(arity)?;
    if weights.len() != count {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("expected {count} weights, found {}", weights.len()),
        ));
    }
    Ok(weights)
}

fn check_distribution(dist: &[f64; 3]) -> Result<()> {
    if dist.iter().any(|&p| !(-DIST_TOLERANCE..=1.0 + DIST_TOLERANCE).contains(&p)) {
        return Err(Error::InvalidDistribution(format!("entries outside [0,1]: {dist:?}")));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > DIST_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(())
}

/// `(E⁰, E¹, E²)` with `Eᴹ = Σₖ ω^{kM} p(z=k)`.
pub fn expectation_moments(dist: &[f64; 3]) -> Result<[Complex64; 3]> {
    check_distribution(dist)?;
    let moment = |m: u8| -> Complex64 {
        Trit::ALL
            .iter()
            .zip(dist)
            .map(|(&k, &p)| omega_complex(k * Trit::from_int(m as i64)) * p)
            .sum()
    };
    Ok([moment(0), moment(1), moment(2)])
}

/// An element `c₀ + c₁ω + c₂ω²` of ℚ(ω).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaSum {
    coeffs: [Rational; 3],
}

impl OmegaSum {
    pub fn new(coeffs: [Rational; 3]) -> Self {
        OmegaSum { coeffs }
    }

    /// `Σₖ ωᵏ p(k)` for an exact distribution.
    pub fn from_distribution(dist: &[Rational; 3]) -> Self {
        OmegaSum { coeffs: dist.clone() }
    }

    /// `Eᴹ` of an exact distribution.
    pub fn moment(dist: &[Rational; 3], m: Trit) -> Self {
        let mut coeffs = [Rational::zero(), Rational::zero(), Rational::zero()];
        for (k, p) in Trit::ALL.iter().zip(dist) {
            coeffs[(*k * m).value() as usize] += p;
        }
        OmegaSum { coeffs }
    }

    /// Multiplication by `ωʲ`.
    pub fn rotate(&self, j: Trit) -> Self {
        let mut coeffs = [Rational::zero(), Rational::zero(), Rational::zero()];
        for (k, c) in Trit::ALL.iter().zip(&self.coeffs) {
            coeffs[(*k + j).value() as usize] = c.clone();
        }
        OmegaSum { coeffs }
    }

    pub fn conj(&self) -> Self {
        let [a, b, c] = self.coeffs.clone();
        OmegaSum { coeffs: [a, c, b] }
    }

    /// `Re(ω) = Re(ω²) = −1/2`.
    pub fn re(&self) -> Rational {
        &self.coeffs[0] - (&self.coeffs[1] + &self.coeffs[2]) / int(2)
    }

    /// Canonical representative with `c₀ = 0`, using `1 + ω + ω² = 0`.
    pub fn normalized(&self) -> Self {
        let c0 = self.coeffs[0].clone();
        OmegaSum {
            coeffs: [Rational::zero(), &self.coeffs[1] - &c0, &self.coeffs[2] - &c0],
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Trit::ALL
            .iter()
            .zip(&self.coeffs)
            .map(|(&k, c)| omega_complex(k) * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }
}

fn check_behavior_len<T>(game: &BellGame, e: &[T]) -> Result<()> {
    if e.len() != game.weights.len() {
        return Err(Error::dimension(game.weights.len(), e.len()));
    }
    Ok(())
}

/// `Re Σₓ w(x) ω^{−f(x)} E(x)` for expectation values indexed by input.
pub fn u3_real(game: &BellGame, e: &[Complex64]) -> Result<f64> {
    check_behavior_len(game, e)?;
    Ok(game
        .weights
        .iter()
        .zip(game.function.table())
        .zip(e)
        .filter(|((w, _), _)| !w.is_zero())
        .map(|((w, &f), &ex)| w.to_f64().unwrap_or(f64::NAN) * (omega_complex(-f) * ex).re)
        .sum())
}

/// Exact `Re u₃` over ℚ(ω).
pub fn u3_real_exact(game: &BellGame, e: &[OmegaSum]) -> Result<Rational> {
    check_behavior_len(game, e)?;
    Ok(game
        .weights
        .iter()
        .zip(game.function.table())
        .zip(e)
        .map(|((w, &f), ex)| w * ex.rotate(-f).re())
        .sum())
}

/// `p̄ = (1 + 2·Re u₃)/3`.
pub fn success_from_u3(re_u3: f64) -> f64 {
    (1.0 + 2.0 * re_u3) / 3.0
}

pub fn success_from_u3_exact(re_u3: &Rational) -> Rational {
    (int(1) + int(2) * re_u3) / int(3)
}

/// `p̄ = Σₓ w(x) p(z = f(x) | s(x))` computed directly from a behavior.
pub fn success_probability(game: &BellGame, behavior: &[[Rational; 3]]) -> Result<Rational> {
    check_behavior_len(game, behavior)?;
    Ok(game
        .weights
        .iter()
        .zip(game.function.table())
        .zip(behavior)
        .map(|((w, &f), p)| w * &p[f.value() as usize])
        .sum())
}

/// One response function `F₃ → F₃` per site; the local outputs are summed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LhvStrategy {
    responses: Vec<[Trit; 3]>,
}

impl LhvStrategy {
    pub fn new(responses: Vec<[Trit; 3]>) -> Self {
        LhvStrategy { responses }
    }

    pub fn responses(&self) -> &[[Trit; 3]] {
        &self.responses
    }

    pub fn output(&self, settings: &[Trit]) -> Trit {
        self.responses
            .iter()
            .zip(settings)
            .map(|(r, s)| r[s.value() as usize])
            .sum()
    }

    /// Exact `Re u₃` of this strategy on `game`.
    pub fn value(&self, game: &BellGame) -> Rational {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        game.settings_table()
            .iter()
            .zip(game.function.table())
            .zip(&game.weights)
            .map(|((s, &f), w)| if self.output(s) == f { w.clone() } else { -(w * &half) })
            .sum()
    }
}

impl fmt::Display for LhvStrategy {
    /// `r0=abc r1=…`, listing `rᵢ(0) rᵢ(1) rᵢ(2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.responses.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "r{i}={}{}{}", r[0], r[1], r[2])?;
        }
        Ok(())
    }
}

/// Exhaustive search configuration for the classical bound.
#[derive(Clone, Debug)]
pub struct LhvSearch {
    pub max_width: usize,
    /// Restrict sites `1..l` to `rᵢ(0) = 0`. Shifting `rᵢ` by `t` and `r₀`
    /// by `−t` leaves every output unchanged, so the maximum is the same.
    pub fix_offsets: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for LhvSearch {
    fn default() -> Self {
        LhvSearch { max_width: DEFAULT_MAX_LHV_WIDTH, fix_offsets: false, threads: None }
    }
}

/// The classical bound with a maximizing strategy.
#[derive(Clone, Debug)]
pub struct LhvBound {
    pub value: Rational,
    pub witness: LhvStrategy,
    pub strategies_examined: u64,
}

struct ScoringTable {
    width: usize,
    /// Per input with nonzero weight: settings, target, integer weight.
    settings: Vec<u8>,
    targets: Vec<u8>,
    weights: Vec<i128>,
    /// `Re u₃ = score / scale`.
    scale: BigInt,
}

impl ScoringTable {
    fn new(game: &BellGame) -> Result<Self> {
        let width = game.width();
        let denom = game
            .weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let mut settings = Vec::new();
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        for ((s, &f), w) in game.settings_table().iter().zip(game.function.table()).zip(&game.weights) {
            if w.is_zero() {
                continue;
            }
            let scaled = (w * Rational::from_integer(denom.clone())).to_integer();
            let scaled = scaled
                .to_i128()
                .filter(|v| v.checked_mul(2 * weights.len() as i128 + 2).is_some())
                .ok_or_else(|| Error::ResourceLimit("weight denominators too large for exact scoring".into()))?;
            settings.extend(s.iter().map(|t| t.value()));
            targets.push(f.value());
            weights.push(scaled);
        }
        Ok(ScoringTable { width, settings, targets, weights, scale: denom * 2 })
    }

    fn score(&self, responses: &[[u8; 3]]) -> i128 {
        let mut total = 0i128;
        for (j, (&f, &w)) in self.targets.iter().zip(&self.weights).enumerate() {
            let s = &self.settings[j * self.width..(j + 1) * self.width];
            let z: u32 = responses.iter().zip(s).map(|(r, &si)| r[si as usize] as u32).sum();
            total += if (z % 3) as u8 == f { 2 * w } else { -w };
        }
        total
    }
}

fn decode_strategy(index: u64, width: usize, fix_offsets: bool) -> Vec<[u8; 3]> {
    let mut rest = index;
    (0..width)
        .map(|site| {
            if fix_offsets && site > 0 {
                let code = rest % 9;
                rest /= 9;
                [0, (code % 3) as u8, (code / 3) as u8]
            } else {
                let code = rest % 27;
                rest /= 27;
                [(code % 3) as u8, (code / 3 % 3) as u8, (code / 9) as u8]
            }
        })
        .collect()
}

fn strategy_count(width: usize, fix_offsets: bool) -> u64 {
    if width == 0 {
        1
    } else if fix_offsets {
        27 * 9u64.pow(width as u32 - 1)
    } else {
        27u64.pow(width as u32)
    }
}

impl LhvSearch {
    pub fn run(&self, game: &BellGame) -> Result<LhvBound> {
        let width = game.width();
        if width > self.max_width {
            return Err(Error::ResourceLimit(format!(
                "classical bound needs 27^{width} strategies; width {width} exceeds the limit {} \
                 (raise the limit or enable offset fixing to prune by 3^{})",
                self.max_width,
                width.saturating_sub(1)
            )));
        }
        let table = ScoringTable::new(game)?;
        let total = strategy_count(width, self.fix_offsets);
        let (best_score, best_index) = self.search(&table, total)?;
        let to_trits = |r: [u8; 3]| r.map(|v| Trit::new(v).expect("decoded trit"));
        let witness = LhvStrategy::new(
            decode_strategy(best_index, width, self.fix_offsets).into_iter().map(to_trits).collect(),
        );
        let value = Rational::new(BigInt::from(best_score), table.scale.clone());
        debug_assert_eq!(witness.value(game), value);
        Ok(LhvBound { value, witness, strategies_examined: total })
    }

    #[cfg(feature = "parallel")]
    fn search(&self, table: &ScoringTable, total: u64) -> Result<(i128, u64)> {
        use rayon::prelude::*;
        let fix = self.fix_offsets;
        let width = table.width;
        let run = || {
            (0..total as usize)
                .into_par_iter()
                .with_min_len(1 << 12)
                .map(|i| (table.score(&decode_strategy(i as u64, width, fix)), i as u64))
                .reduce(|| (i128::MIN, u64::MAX), better)
        };
        match self.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))
                .map(|pool| pool.install(run)),
            None => Ok(run()),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn search(&self, table: &ScoringTable, total: u64) -> Result<(i128, u64)> {
        let width = table.width;
        Ok((0..total)
            .map(|i| (table.score(&decode_strategy(i, width, self.fix_offsets)), i))
            .fold((i128::MIN, u64::MAX), better))
    }
}

/// Higher score wins; ties go to the lower strategy index.
fn better(a: (i128, u64), b: (i128, u64)) -> (i128, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Maximum of `Re u₃` over all deterministic local strategies.
pub fn lhv_bound(game: &BellGame) -> Result<LhvBound> {
    LhvSearch::default().run(game)
}

/// `Re u₃` reached by the game's quantum program.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumValue {
    /// Every weighted input has a deterministic outcome.
    Exact(Rational),
    Approx(f64),
}

impl QuantumValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            QuantumValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            QuantumValue::Approx(v) => *v,
        }
    }
}

impl fmt::Display for QuantumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantumValue::Exact(r) => write!(f, "{}", fmt_rational(r)),
            QuantumValue::Approx(v) => write!(f, "{}", format_float(*v)),
        }
    }
}

/// Twelve significant digits, trailing zeros trimmed.
pub fn format_float(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let digits = 11 - v.abs().log10().floor() as i32;
    let s = format!("{:.*}", digits.max(0) as usize, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn quantum_value(game: &BellGame) -> Result<QuantumValue> {
    let inputs = game.inputs();
    let mut exact = Rational::zero();
    let mut all_exact = true;
    let mut expectations = Vec::with_capacity(inputs.len());
    for ((x, w), &f) in inputs.iter().zip(&game.weights).zip(game.function.table()) {
        let e = game.program.exact_expectation(x)?;
        expectations.push(e.value);
        if w.is_zero() {
            continue;
        }
        match e.phase.as_ref().and_then(|p| p.as_omega_power()) {
            Some(z) if z == f => exact += w,
            Some(_) => exact -= w / int(2),
            None => all_exact = false,
        }
    }
    if all_exact {
        Ok(QuantumValue::Exact(exact))
    } else {
        Ok(QuantumValue::Approx(u3_real(game, &expectations)?))
    }
}

/// One weighted correlator `w(x)·E(z|s(x))` of the inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityTerm {
    pub input: TritVector,
    pub weight: Rational,
    pub settings: Vec<Trit>,
}

/// The Bell inequality grouped by the phase `ω^{−k}` in front of each
/// correlator, with its classical and quantum values.
#[derive(Clone, Debug)]
pub struct InequalityReport {
    /// `groups[k]` holds the terms with `f(x) = k`.
    pub groups: [Vec<InequalityTerm>; 3],
    pub classical: LhvBound,
    pub quantum: QuantumValue,
}

pub fn inequality_report(game: &BellGame) -> Result<InequalityReport> {
    inequality_report_with(game, &LhvSearch::default())
}

pub fn inequality_report_with(game: &BellGame, search: &LhvSearch) -> Result<InequalityReport> {
    let classical = search.run(game)?;
    let quantum = quantum_value(game)?;
    let mut groups: [Vec<InequalityTerm>; 3] = Default::default();
    for (((x, w), &f), s) in game
        .inputs()
        .into_iter()
        .zip(&game.weights)
        .zip(game.function.table())
        .zip(game.settings_table())
    {
        if w.is_zero() {
            continue;
        }
        groups[f.value() as usize].push(InequalityTerm { input: x, weight: w.clone(), settings: s });
    }
    Ok(InequalityReport { groups, classical, quantum })
}

fn settings_string(s: &[Trit]) -> String {
    s.iter().map(|t| t.to_string()).collect()
}

fn settings_tuple(s: &[Trit]) -> String {
    let parts: Vec<String> = s.iter().map(|t| t.to_string()).collect();
    format!("({})", parts.join(","))
}

impl InequalityReport {
    /// A common weight shared by every term, if there is one.
    fn common_weight(&self) -> Option<Rational> {
        let mut weights = self.groups.iter().flatten().map(|t| &t.weight);
        let first = weights.next()?.clone();
        weights.all(|w| *w == first).then_some(first)
    }

    /// Human-readable rendering: the weighted sum grouped by phase, then the
    /// bounds and the classical witness.
    pub fn to_text(&self) -> String {
        let common = self.common_weight();
        let mut out = String::from("Re{ ");
        if let Some(w) = &common {
            out.push_str(&format!("{} * [ ", fmt_rational(w)));
        }
        let mut first_group = true;
        for (k, terms) in self.groups.iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            if !first_group {
                out.push_str("\n    + ");
            }
            first_group = false;
            if k > 0 {
                out.push_str(&format!("ω^-{k} "));
            }
            let rendered: Vec<String> = terms
                .iter()
                .map(|t| {
                    let corr = format!("E(z|s={})", settings_tuple(&t.settings));
                    match &common {
                        Some(_) => corr,
                        None => format!("{}*{corr}", fmt_rational(&t.weight)),
                    }
                })
                .collect();
            if rendered.len() > 1 {
                out.push_str(&format!("( {} )", rendered.join(" + ")));
            } else {
                out.push_str(&rendered[0]);
            }
        }
        if common.is_some() {
            out.push_str(" ]");
        }
        out.push_str(" }\n");
        out.push_str(&format!(
            "  <= {} (classical), {} (quantum)\n",
            fmt_rational(&self.classical.value),
            self.quantum
        ));
        out.push_str(&format!(
            "classical witness: {} ({} strategies)\n",
            self.classical.witness, self.classical.strategies_examined
        ));
        out
    }

    /// One `term ω^-k weight p/q settings t…t` line per correlator, then
    /// `classical p/q quantum p/q`.
    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        for (k, terms) in self.groups.iter().enumerate() {
            for t in terms {
                out.push_str(&format!(
                    "term ω^-{k} weight {} settings {}\n",
                    fmt_rational(&t.weight),
                    settings_string(&t.settings)
                ));
            }
        }
        out.push_str(&format!("classical {} quantum {}\n", fmt_rational(&self.classical.value), self.quantum));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::family_fn;

    fn tv(v: &[u8]) -> TritVector {
        TritVector::from_values(v)
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    fn f2_game() -> BellGame {
        let (f, p) = family_fn(2).unwrap();
        BellGame::uniform(f, p).unwrap()
    }

    fn linear_game() -> BellGame {
        let f = TritFunction::from_fn(1, |x| x[0]).unwrap();
        let p = NmqcProgram::new(1, vec![tv(&[1])], vec![int(3)], Trit::ZERO).unwrap();
        BellGame::uniform(f, p).unwrap()
    }

    #[test]
    fn game_validation() {
        let (f, p) = family_fn(2).unwrap();
        let bad = vec![r(1, 10); 9];
        assert!(matches!(BellGame::new(f.clone(), p.clone(), bad), Err(Error::Domain(_))));
        let mut neg = vec![r(1, 8); 9];
        neg[0] = r(-1, 8);
        neg[1] = r(1, 4);
        assert!(matches!(BellGame::new(f.clone(), p.clone(), neg), Err(Error::Domain(_))));
        assert!(BellGame::new(f, p, vec![r(1, 3); 3]).is_err());
    }

    #[test]
    fn moments_of_point_masses() {
        let m = expectation_moments(&[1.0, 0.0, 0.0]).unwrap();
        for e in m {
            assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let m = expectation_moments(&[0.0, 1.0, 0.0]).unwrap();
        assert!((m[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m[1] - omega_complex(Trit::ONE)).norm() < 1e-15);
        assert!((m[2] - omega_complex(Trit::TWO)).norm() < 1e-15);
        let third = 1.0 / 3.0;
        let m = expectation_moments(&[third, third, third]).unwrap();
        assert!((m[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(m[1].norm() < 1e-15 && m[2].norm() < 1e-15);

        assert!(expectation_moments(&[0.5, 0.6, -0.1]).is_err());
        assert!(expectation_moments(&[0.5, 0.6, 0.0]).is_err());
    }

    #[test]
    fn exact_moment_conjugacy() {
        let dist = [r(1, 7), r(2, 7), r(4, 7)];
        let e1 = OmegaSum::moment(&dist, Trit::ONE);
        let e2 = OmegaSum::moment(&dist, Trit::TWO);
        assert_eq!(e2.normalized(), e1.conj().normalized());
        assert!((e1.to_complex().conj() - e2.to_complex()).norm() < 1e-15);
    }

    #[test]
    fn u3_examples() {
        let game = f2_game();
        let f = game.function().clone();
        let perfect: Vec<Complex64> = f.table().iter().map(|&t| omega_complex(t)).collect();
        let re = u3_real(&game, &perfect).unwrap();
        assert!((re - 1.0).abs() < 1e-15);
        assert!((success_from_u3(re) - 1.0).abs() < 1e-15);

        let off: Vec<Complex64> = f.table().iter().map(|&t| omega_complex(t + Trit::ONE)).collect();
        let re = u3_real(&game, &off).unwrap();
        assert!((re + 0.5).abs() < 1e-15);
        assert!(success_from_u3(re).abs() < 1e-15);

        assert_eq!(quantum_value(&game).unwrap(), QuantumValue::Exact(int(1)));
    }

    #[test]
    fn f2_classical_bound() {
        let game = f2_game();
        let bound = lhv_bound(&game).unwrap();
        assert_eq!(bound.value, r(2, 3));
        assert_eq!(bound.strategies_examined, 19683);
        assert_eq!(bound.witness.value(&game), r(2, 3));
        assert!(bound.value < int(1));

        let pruned = LhvSearch { fix_offsets: true, ..Default::default() }.run(&game).unwrap();
        assert_eq!(pruned.value, bound.value);
        assert_eq!(pruned.strategies_examined, 27 * 81);
    }

    #[test]
    fn linear_game_is_classical() {
        let game = linear_game();
        let bound = lhv_bound(&game).unwrap();
        assert_eq!(bound.value, int(1));
        assert_eq!(quantum_value(&game).unwrap(), QuantumValue::Exact(int(1)));
        let report = inequality_report(&game).unwrap();
        assert_eq!(report.to_machine().lines().last().unwrap(), "classical 1 quantum 1");
    }

    #[test]
    fn width_limit() {
        let (f, p) = family_fn(2).unwrap();
        let game = BellGame::uniform(f, p).unwrap();
        let search = LhvSearch { max_width: 2, ..Default::default() };
        assert!(matches!(search.run(&game), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn f2_report_groups() {
        let report = inequality_report(&f2_game()).unwrap();
        assert_eq!(report.groups[0].len(), 1);
        assert_eq!(report.groups[0][0].settings, vec![Trit::ZERO; 3]);
        assert_eq!(report.groups[1].len(), 7);
        assert_eq!(report.groups[2].len(), 1);
        assert_eq!(report.groups[2][0].settings, vec![Trit::TWO; 3]);
        let machine = report.to_machine();
        assert_eq!(machine.lines().count(), 10);
        assert!(machine.starts_with("term ω^-0 weight 1/9 settings 000\n"));
        assert!(machine.contains("term ω^-2 weight 1/9 settings 222\n"));
        assert!(machine.ends_with("classical 2/3 quantum 1\n"));
        let text = report.to_text();
        assert!(text.starts_with("Re{ 1/9 * [ E(z|s=(0,0,0))"));
        assert!(text.contains("ω^-2 E(z|s=(2,2,2))"));
    }

    #[test]
    fn constant_game_single_group() {
        let f = TritFunction::constant(1, Trit::ONE).unwrap();
        let p = NmqcProgram::empty(1, Trit::TWO).unwrap();
        let report = inequality_report(&BellGame::uniform(f, p).unwrap()).unwrap();
        assert_eq!(report.groups.iter().filter(|g| !g.is_empty()).count(), 1);
        assert_eq!(report.groups[1].len(), 3);
    }

    #[test]
    fn weights_file() {
        let w = parse_weights("# weights\n1/2 1/4\n1/4\n", 1).unwrap();
        assert_eq!(w, vec![r(1, 2), r(1, 4), r(1, 4)]);
        assert!(matches!(parse_weights("1/2 x 1/2", 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_weights("1/2 1/2", 1), Err(Error::Parse { .. })));
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(-0.25), "-0.25");
    }
}
