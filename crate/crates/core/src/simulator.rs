//! Dense state-vector simulation of the qutrit GHZ resource.
//!
//! Site 0 is the most significant digit of the amplitude index. Observables
//! are applied site by site; sampling measures the sites in order and drops
//! each measured site from the state.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::gf3::{pow3, Trit, TritVector};
use crate::phase::{omega_complex, AlphaPhase};
use crate::protocol::NmqcProgram;
use crate::Rational;

/// Largest width simulated unless a caller raises the limit.
pub const DEFAULT_MAX_SIM_WIDTH: usize = 12;

const NORM_TOLERANCE: f64 = 1e-12;

fn check_width(width: usize, max_width: usize) -> Result<()> {
    if width > max_width {
        return Err(Error::ResourceLimit(format!(
            "simulating {width} qutrits needs 3^{width} amplitudes; limit is {max_width}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.width != other.width {
            return Err(Error::dimension(self.width, other.width));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies a 3×3 matrix (row-major) to one site.
    pub fn apply_site(&mut self, site: usize, m: &[[Complex64; 3]; 3]) -> Result<()> {
        if site >= self.width {
            return Err(Error::Domain(format!("site {site} out of range for width {}", self.width)));
        }
        let stride = 3usize.pow((self.width - 1 - site) as u32);
        let block = 3 * stride;
        for base in (0..self.amplitudes.len()).step_by(block) {
            for off in 0..stride {
                let i = base + off;
                let v = [
                    self.amplitudes[i],
                    self.amplitudes[i + stride],
                    self.amplitudes[i + 2 * stride],
                ];
                for (r, row) in m.iter().enumerate() {
                    self.amplitudes[i + r * stride] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
                }
            }
        }
        Ok(())
    }
}

/// `(|0…0⟩ + |1…1⟩ + |2…2⟩)/√3` on `l` qutrits.
pub fn prepare_ghz(l: usize) -> Result<StateVector> {
    prepare_ghz_with_limit(l, DEFAULT_MAX_SIM_WIDTH)
}

pub fn prepare_ghz_with_limit(l: usize, max_width: usize) -> Result<StateVector> {
    if l == 0 {
        return Err(Error::Domain("GHZ state needs at least one qutrit".into()));
    }
    check_width(l, max_width)?;
    let len = pow3(l)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
    // |1…1⟩ has index (3ˡ−1)/2
    let ones = (len - 1) / 2;
    let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    for j in 0..3 {
        amplitudes[j * ones] = a;
    }
    Ok(StateVector { width: l, amplitudes })
}

/// `α^θ|1⟩⟨0| + α^θ|2⟩⟨1| + α^{−2θ}|0⟩⟨2|` for `θ = s·φ`.
#[derive(Clone, Debug)]
pub struct SiteObservable {
    theta: Rational,
    matrix: [[Complex64; 3]; 3],
    /// `eigenvectors[k]` has eigenvalue `ωᵏ`.
    eigenvectors: [[Complex64; 3]; 3],
}

impl SiteObservable {
    pub fn new(setting: Trit, angle: &Rational) -> Self {
        let theta = Rational::from_integer(i64::from(setting).into()) * angle;
        SiteObservable::from_theta(theta)
    }

    pub fn from_theta(theta: Rational) -> Self {
        let a = AlphaPhase::new(theta.clone());
        let up = a.to_complex();
        let wrap = a.pow(&Rational::from_integer((-2).into())).to_complex();
        let zero = Complex64::new(0.0, 0.0);
        let matrix = [[zero, zero, wrap], [up, zero, zero], [zero, up, zero]];

        // vₖ[n] = α^{θn} ω^{−kn} / √3
        let s = 1.0 / 3f64.sqrt();
        let eigenvectors = std::array::from_fn(|k| {
            std::array::from_fn(|n| {
                let an = a.pow(&Rational::from_integer((n as i64).into())).to_complex();
                an * omega_complex(Trit::from_int(-((k * n) as i64))) * s
            })
        });
        SiteObservable { theta, matrix, eigenvectors }
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    pub fn matrix(&self) -> &[[Complex64; 3]; 3] {
        &self.matrix
    }

    pub fn eigenvector(&self, k: Trit) -> &[Complex64; 3] {
        &self.eigenvectors[k.value() as usize]
    }

    pub fn eigenvalue(k: Trit) -> Complex64 {
        omega_complex(k)
    }
}

/// Product of two 3×3 matrices.
pub fn mat_mul(a: &[[Complex64; 3]; 3], b: &[[Complex64; 3]; 3]) -> [[Complex64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Conjugate transpose.
pub fn adjoint(a: &[[Complex64; 3]; 3]) -> [[Complex64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].conj()))
}

/// Largest entry of `|a − b|`.
pub fn max_deviation(a: &[[Complex64; 3]; 3], b: &[[Complex64; 3]; 3]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn identity3() -> [[Complex64; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    })
}

fn observables(prog: &NmqcProgram, x: &TritVector) -> Result<Vec<SiteObservable>> {
    let settings = prog.settings(x)?;
    Ok(settings
        .iter()
        .zip(prog.angles())
        .map(|(&s, phi)| SiteObservable::new(s, phi))
        .collect())
}

/// `⟨GHZ|⊗ᵢ m̂ᵢ|GHZ⟩`. An empty program gives 1.
pub fn simulate_expectation(prog: &NmqcProgram, x: &TritVector) -> Result<Complex64> {
    simulate_expectation_with_limit(prog, x, DEFAULT_MAX_SIM_WIDTH)
}

pub fn simulate_expectation_with_limit(
    prog: &NmqcProgram,
    x: &TritVector,
    max_width: usize,
) -> Result<Complex64> {
    let obs = observables(prog, x)?;
    if obs.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let ghz = prepare_ghz_with_limit(obs.len(), max_width)?;
    let mut state = ghz.clone();
    for (i, o) in obs.iter().enumerate() {
        state.apply_site(i, o.matrix())?;
    }
    ghz.inner(&state)
}

/// Outcome counts and per-shot site records from [`sample`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Samples {
    pub width: usize,
    /// `counts[z]`.
    pub counts: [u64; 3],
    /// `width` site outcomes per shot, shot-major.
    pub records: Vec<Trit>,
}

impl Samples {
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn record(&self, shot: usize) -> &[Trit] {
        &self.records[shot * self.width..(shot + 1) * self.width]
    }

    pub fn frequencies(&self) -> [f64; 3] {
        let total = self.shots().max(1) as f64;
        self.counts.map(|c| c as f64 / total)
    }
}

/// Measures `site 0` of `state` in the eigenbasis of `obs` and drops it.
fn measure_leading(state: &[Complex64], obs: &SiteObservable, u: f64) -> (Trit, Vec<Complex64>) {
    let rest = state.len() / 3;
    let mut branches: Vec<(Vec<Complex64>, f64)> = Trit::ALL
        .iter()
        .map(|&k| {
            let v = obs.eigenvector(k);
            let proj: Vec<Complex64> = (0..rest)
                .map(|r| (0..3).map(|n| v[n].conj() * state[n * rest + r]).sum())
                .collect();
            let p = proj.iter().map(Complex64::norm_sqr).sum();
            (proj, p)
        })
        .collect();
    let total: f64 = branches.iter().map(|b| b.1).sum();
    let mut acc = 0.0;
    let mut pick = 2;
    for (k, b) in branches.iter().enumerate() {
        acc += b.1 / total;
        if u < acc && b.1 > 0.0 {
            pick = k;
            break;
        }
    }
    while branches[pick].1 <= 0.0 {
        pick -= 1;
    }
    let (mut proj, p) = branches.swap_remove(pick);
    let scale = 1.0 / p.sqrt();
    proj.iter_mut().for_each(|a| *a *= scale);
    (Trit::new(pick as u8).expect("branch index"), proj)
}

/// Per-shot generator: ChaCha8 seeded from `seed`, stream `shot`.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

fn run_shot(ghz: &StateVector, obs: &[SiteObservable], seed: u64, shot: u64) -> Vec<Trit> {
    let mut rng = shot_rng(seed, shot);
    let mut state = ghz.amplitudes.clone();
    let mut out = Vec::with_capacity(obs.len());
    for o in obs {
        let (m, next) = measure_leading(&state, o, rng.random::<f64>());
        debug_assert!((next.iter().map(Complex64::norm_sqr).sum::<f64>() - 1.0).abs() < NORM_TOLERANCE);
        out.push(m);
        state = next;
    }
    out
}

/// Sequential projective measurement of every site, `shots` times.
///
/// Shot `i` draws from its own generator, so results do not depend on the
/// thread count.
pub fn sample(prog: &NmqcProgram, x: &TritVector, shots: u64, seed: u64) -> Result<Samples> {
    sample_with_limit(prog, x, shots, seed, DEFAULT_MAX_SIM_WIDTH)
}

pub fn sample_with_limit(
    prog: &NmqcProgram,
    x: &TritVector,
    shots: u64,
    seed: u64,
    max_width: usize,
) -> Result<Samples> {
    if shots == 0 {
        return Err(Error::Domain("shots must be positive".into()));
    }
    let obs = observables(prog, x)?;
    let width = obs.len();
    if width == 0 {
        return Ok(Samples { width, counts: [shots, 0, 0], records: Vec::new() });
    }
    let ghz = prepare_ghz_with_limit(width, max_width)?;
    let records = collect_shots(&ghz, &obs, shots, seed);
    let mut counts = [0u64; 3];
    for rec in records.chunks(width) {
        let z: Trit = rec.iter().copied().sum();
        counts[z.value() as usize] += 1;
    }
    Ok(Samples { width, counts, records })
}

#[cfg(feature = "parallel")]
fn collect_shots(ghz: &StateVector, obs: &[SiteObservable], shots: u64, seed: u64) -> Vec<Trit> {
    use rayon::prelude::*;
    (0..shots as usize)
        .into_par_iter()
        .with_min_len(256)
        .flat_map_iter(|i| run_shot(ghz, obs, seed, i as u64))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_shots(ghz: &StateVector, obs: &[SiteObservable], shots: u64, seed: u64) -> Vec<Trit> {
    (0..shots).flat_map(|i| run_shot(ghz, obs, seed, i)).collect()
}

/// Pearson goodness-of-fit of `counts` against `probs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Bins with zero expected probability must be empty; they contribute no
/// degree of freedom.
pub fn chi_square(counts: &[u64; 3], probs: &[f64; 3]) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for (&c, &p) in counts.iter().zip(probs) {
        let expected = p * total as f64;
        if expected <= 1e-12 {
            if c > 0 {
                return ChiSquare { statistic: f64::INFINITY, dof: 0, p_value: 0.0 };
            }
            continue;
        }
        bins += 1;
        statistic += (c as f64 - expected).powi(2) / expected;
    }
    let dof = bins.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        dist.sf(statistic)
    };
    ChiSquare { statistic, dof, p_value }
}
