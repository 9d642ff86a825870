//! Arithmetic over F₃, trit vectors, truth tables and Reed-Muller polynomials.
//!
//! Inputs `x ∈ F₃ⁿ` are ordered with `x₀` most significant, so the truth
//! table of a function is its sorted image `(f(0,…,0), f(0,…,1), …, f(2,…,2))`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest arity accepted when reading function files.
pub const MAX_FILE_ARITY: usize = 16;

/// An element of F₃.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trit(u8);

impl Trit {
    pub const ZERO: Trit = Trit(0);
    pub const ONE: Trit = Trit(1);
    pub const TWO: Trit = Trit(2);
    pub const ALL: [Trit; 3] = [Trit(0), Trit(1), Trit(2)];

    /// Returns `None` unless `value < 3`.
    pub fn new(value: u8) -> Option<Self> {
        (value < 3).then_some(Trit(value))
    }

    /// Reduces any integer modulo 3.
    pub fn from_int(value: i64) -> Self {
        Trit(value.rem_euclid(3) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Parses one of the characters `0`, `1`, `2`.
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Trit(0)),
            '1' => Some(Trit(1)),
            '2' => Some(Trit(2)),
            _ => None,
        }
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Trit> for u8 {
    fn from(t: Trit) -> u8 {
        t.0
    }
}

impl From<Trit> for i64 {
    fn from(t: Trit) -> i64 {
        t.0 as i64
    }
}

impl Add for Trit {
    type Output = Trit;
    fn add(self, rhs: Trit) -> Trit {
        Trit((self.0 + rhs.0) % 3)
    }
}

impl AddAssign for Trit {
    fn add_assign(&mut self, rhs: Trit) {
        *self = *self + rhs;
    }
}

impl Sub for Trit {
    type Output = Trit;
    fn sub(self, rhs: Trit) -> Trit {
        Trit((self.0 + 3 - rhs.0) % 3)
    }
}

impl Mul for Trit {
    type Output = Trit;
    fn mul(self, rhs: Trit) -> Trit {
        Trit((self.0 * rhs.0) % 3)
    }
}

impl Neg for Trit {
    type Output = Trit;
    fn neg(self) -> Trit {
        Trit((3 - self.0) % 3)
    }
}

impl std::iter::Sum for Trit {
    fn sum<I: Iterator<Item = Trit>>(iter: I) -> Trit {
        iter.fold(Trit::ZERO, |a, b| a + b)
    }
}

/// A point of F₃ⁿ.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TritVector(Vec<Trit>);

impl TritVector {
    pub fn new(entries: Vec<Trit>) -> Self {
        TritVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        TritVector(vec![Trit::ZERO; n])
    }

    /// Builds a vector from raw values, reducing each modulo 3.
    pub fn from_values(values: &[u8]) -> Self {
        TritVector(values.iter().map(|&v| Trit::from_int(v as i64)).collect())
    }

    /// The vector at position `index` in the canonical order of F₃ⁿ.
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut entries = vec![Trit::ZERO; n];
        for slot in entries.iter_mut().rev() {
            *slot = Trit((index % 3) as u8);
            index /= 3;
        }
        TritVector(entries)
    }

    /// Position of this vector in the canonical order: `Σᵢ xᵢ·3^{n−1−i}`.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, t| acc * 3 + t.0 as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|t| t.is_zero())
    }

    pub fn entries(&self) -> &[Trit] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Trit> + '_ {
        self.0.iter().copied()
    }

    /// `⊕ᵢ vᵢ·xᵢ`.
    pub fn dot(&self, other: &TritVector) -> Result<Trit> {
        if self.len() != other.len() {
            return Err(Error::dimension(self.len(), other.len()));
        }
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &TritVector) -> Trit {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    /// Sum of entries modulo 3.
    pub fn trit_sum(&self) -> Trit {
        self.iter().sum()
    }

    pub fn scale(&self, k: Trit) -> TritVector {
        TritVector(self.0.iter().map(|&t| t * k).collect())
    }
}

impl std::ops::Index<usize> for TritVector {
    type Output = Trit;
    fn index(&self, i: usize) -> &Trit {
        &self.0[i]
    }
}

impl fmt::Display for TritVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for TritVector {
    type Err = Error;

    /// Accepts `1,2`, `(1,2)`, `1 2` or a bare digit string `12`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<String> = if body.contains(',') || body.contains(char::is_whitespace) {
            body.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|p| !p.is_empty())
                .map(str::to_owned)
                .collect()
        } else {
            body.chars().map(String::from).collect()
        };
        let mut entries = Vec::with_capacity(parts.len());
        for part in parts {
            let mut chars = part.chars();
            let t = match (chars.next(), chars.next()) {
                (Some(c), None) => Trit::from_char(c),
                _ => None,
            };
            entries.push(t.ok_or_else(|| Error::parse(1, format!("invalid trit '{part}'")))?);
        }
        if entries.is_empty() {
            return Err(Error::parse(1, "empty trit vector"));
        }
        Ok(TritVector(entries))
    }
}

/// `3ⁿ`, failing on overflow.
pub fn pow3(n: usize) -> Result<usize> {
    u32::try_from(n)
        .ok()
        .and_then(|n| 3usize.checked_pow(n))
        .ok_or_else(|| Error::ResourceLimit(format!("3^{n} does not fit in memory")))
}

/// All of F₃ⁿ in canonical order; position of `x` equals `x.index()`.
pub fn enumerate_inputs(n: usize) -> Result<Vec<TritVector>> {
    if n == 0 {
        return Err(Error::Domain("arity must be at least 1".into()));
    }
    let count = pow3(n)?;
    Ok((0..count).map(|i| TritVector::from_index(n, i)).collect())
}

/// A total map F₃ⁿ → F₃ stored as its truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TritFunction {
    arity: usize,
    table: Vec<Trit>,
}

impl TritFunction {
    pub fn new(arity: usize, table: Vec<Trit>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Domain("arity must be at least 1".into()));
        }
        let expected = pow3(arity)?;
        if table.len() != expected {
            return Err(Error::dimension(expected, table.len()));
        }
        Ok(TritFunction { arity, table })
    }

    pub fn from_fn(arity: usize, mut f: impl FnMut(&TritVector) -> Trit) -> Result<Self> {
        let table = enumerate_inputs(arity)?.iter().map(&mut f).collect();
        Ok(TritFunction { arity, table })
    }

    pub fn constant(arity: usize, value: Trit) -> Result<Self> {
        TritFunction::new(arity, vec![value; pow3(arity)?])
    }

    /// The function that is 0 at the origin and 1 everywhere else.
    pub fn delta_complement(arity: usize) -> Result<Self> {
        TritFunction::from_fn(arity, |x| if x.is_zero() { Trit::ZERO } else { Trit::ONE })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Trit] {
        &self.table
    }

    pub fn eval(&self, x: &TritVector) -> Result<Trit> {
        if x.len() != self.arity {
            return Err(Error::dimension(self.arity, x.len()));
        }
        Ok(self.table[x.index()])
    }

    pub fn at_index(&self, index: usize) -> Trit {
        self.table[index]
    }

    /// Pointwise `f ⊕ g`.
    pub fn add(&self, other: &TritFunction) -> Result<TritFunction> {
        if self.arity != other.arity {
            return Err(Error::dimension(self.arity, other.arity));
        }
        let table = self.table.iter().zip(&other.table).map(|(&a, &b)| a + b).collect();
        Ok(TritFunction { arity: self.arity, table })
    }

    /// Adds the same trit to every value.
    pub fn shift(&self, c: Trit) -> TritFunction {
        TritFunction {
            arity: self.arity,
            table: self.table.iter().map(|&t| t + c).collect(),
        }
    }

    /// Renders the canonical function file.
    pub fn to_file_string(&self) -> String {
        let digits: String = self.table.iter().map(|t| char::from(b'0' + t.0)).collect();
        format!("{}\n{}\n", self.arity, digits)
    }

    /// Reads the canonical function file: a line with `n`, then `3ⁿ` trit
    /// characters. Blank lines and `#` comments are skipped.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "missing arity line"))?;
        let arity: usize = header
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid arity '{header}'")))?;
        if arity == 0 || arity > MAX_FILE_ARITY {
            return Err(Error::parse(line_no, format!("arity {arity} outside 1..={MAX_FILE_ARITY}")));
        }
        let (line_no, body) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no + 1, "missing truth table line"))?;
        let mut table = Vec::with_capacity(body.len());
        for (col, c) in body.chars().enumerate() {
            let t = Trit::from_char(c).ok_or_else(|| {
                Error::parse(line_no, format!("invalid character '{c}' at column {}", col + 1))
            })?;
            table.push(t);
        }
        let expected = pow3(arity)?;
        if table.len() != expected {
            return Err(Error::parse(
                line_no,
                format!("expected {expected} trits for arity {arity}, found {}", table.len()),
            ));
        }
        if let Some((extra, _)) = lines.next() {
            return Err(Error::parse(extra, "unexpected trailing content"));
        }
        Ok(TritFunction { arity, table })
    }
}

/// A reduced polynomial over F₃ (every exponent in {0,1,2}).
///
/// Terms are keyed by their exponent tuple; only nonzero coefficients are
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TritPolynomial {
    arity: usize,
    terms: BTreeMap<Vec<u8>, Trit>,
}

impl TritPolynomial {
    pub fn zero(arity: usize) -> Self {
        TritPolynomial { arity, terms: BTreeMap::new() }
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, summing
    /// repeated monomials.
    pub fn from_terms(arity: usize, terms: &[(u8, &[u8])]) -> Result<Self> {
        let mut poly = TritPolynomial::zero(arity);
        for &(coef, exps) in terms {
            if exps.len() != arity {
                return Err(Error::dimension(arity, exps.len()));
            }
            if exps.iter().any(|&e| e > 2) {
                return Err(Error::Domain("exponents must be reduced (at most 2)".into()));
            }
            poly.add_term(exps.to_vec(), Trit::from_int(coef as i64));
        }
        Ok(poly)
    }

    fn add_term(&mut self, exps: Vec<u8>, coef: Trit) {
        let c = self.coefficient(&exps) + coef;
        if c.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, c);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Trit)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u8]) -> Trit {
        self.terms.get(exps).copied().unwrap_or(Trit::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree over all terms; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Local hidden variable models compute exactly the functions of degree
    /// at most two.
    pub fn lhv_computable(&self) -> bool {
        self.degree() <= 2
    }

    pub fn evaluate(&self, x: &TritVector) -> Result<Trit> {
        if x.len() != self.arity {
            return Err(Error::dimension(self.arity, x.len()));
        }
        Ok(self
            .terms
            .iter()
            .map(|(exps, &c)| {
                exps.iter()
                    .zip(x.iter())
                    .fold(c, |acc, (&e, xi)| match e {
                        0 => acc,
                        1 => acc * xi,
                        _ => acc * xi * xi,
                    })
            })
            .sum())
    }

    /// Evaluates at every input and returns the truth table.
    pub fn to_function(&self) -> Result<TritFunction> {
        TritFunction::from_fn(self.arity, |x| self.evaluate(x).expect("arity matches"))
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &TritPolynomial) -> Result<TritPolynomial> {
        if self.arity != other.arity {
            return Err(Error::dimension(self.arity, other.arity));
        }
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }
}

impl fmt::Display for TritPolynomial {
    /// Terms as `c*x0^e0*x1^e1…` joined by ` ⊕ `, lowest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Vec<u8>, Trit)> = self.terms.iter().map(|(k, &c)| (k, c)).collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|&e| e as u32).sum();
            let db: u32 = b.0.iter().map(|&e| e as u32).sum();
            da.cmp(&db).then_with(|| b.0.cmp(a.0))
        });
        for (i, (exps, c)) in terms.into_iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "{c}")?;
            for (var, &e) in exps.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{var}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// The unique reduced polynomial agreeing with `f` on all of F₃ⁿ.
///
/// Expands `f` in the indicator basis `Πᵢ (1 − (xᵢ − aᵢ)²)`. The basis
/// factorizes per coordinate, so the expansion is applied one axis at a time
/// on a dense coefficient array laid out like the truth table (exponent
/// tuple read as a base-3 number).
pub fn interpolate(f: &TritFunction) -> TritPolynomial {
    let n = f.arity();
    let mut coeffs: Vec<Trit> = f.table().to_vec();
    let len = coeffs.len();
    let mut stride = 1;
    for _ in 0..n {
        let block = stride * 3;
        for base in (0..len).step_by(block) {
            for offset in 0..stride {
                let i0 = base + offset;
                let (f0, f1, f2) = (coeffs[i0], coeffs[i0 + stride], coeffs[i0 + 2 * stride]);
                // Indicators: δ₀ = 1 + 2x², δ₁ = 2x + 2x², δ₂ = x + 2x².
                coeffs[i0] = f0;
                coeffs[i0 + stride] = Trit::TWO * f1 + f2;
                coeffs[i0 + 2 * stride] = Trit::TWO * (f0 + f1 + f2);
            }
        }
        stride = block;
    }
    let mut poly = TritPolynomial::zero(n);
    for (idx, c) in coeffs.into_iter().enumerate() {
        if !c.is_zero() {
            let exps = TritVector::from_index(n, idx).iter().map(u8::from).collect();
            poly.terms.insert(exps, c);
        }
    }
    poly
}
