//! Real-weighted Pauli sums.
//!
//! Every generator in this crate is a [`HermitianOp`]: a canonical list of
//! Pauli strings with real coefficients. Strings are indexed by qubit,
//! `letters[k]` acting on qubit `k`; in dense form qubit `k` is bit `k` of the
//! basis-state index.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are dropped by canonicalization.
pub const ZERO_TOL: f64 = 1e-12;

/// Largest qubit count for dense expansion.
pub const MAX_DENSE_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// 2×2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[one, o], [o, one]],
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[one, o], [o, -one]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub letters: Vec<Pauli>,
    pub coeff: f64,
}

impl PauliTerm {
    pub fn new(letters: Vec<Pauli>, coeff: f64) -> Self {
        debug_assert!(coeff.is_finite());
        Self { letters, coeff }
    }

    pub fn identity(n: usize, coeff: f64) -> Self {
        Self::new(vec![Pauli::I; n], coeff)
    }

    /// `coeff` times the given letters placed on `qubits`, identity elsewhere.
    pub fn on(n: usize, placed: &[(usize, Pauli)], coeff: f64) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in placed {
            letters[q] = p;
        }
        Self::new(letters, coeff)
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn letter_string(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }
}

/// Two Pauli strings commute iff they anticommute on an even number of sites.
pub fn commutes(a: &PauliTerm, b: &PauliTerm) -> bool {
    debug_assert_eq!(a.n(), b.n());
    let clashes = a
        .letters
        .iter()
        .zip(&b.letters)
        .filter(|(&p, &q)| p != Pauli::I && q != Pauli::I && p != q)
        .count();
    clashes % 2 == 0
}

/// A Hermitian operator as a real combination of Pauli strings, kept in
/// canonical form: terms sorted by letters, no duplicates, no zero terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianOp {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl HermitianOp {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: Vec::new(),
        }
    }

    /// Canonicalizes `terms`; every term must act on `n` qubits.
    pub fn new(n: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.n() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: t.n(),
            });
        }
        if terms.iter().any(|t| !t.coeff.is_finite()) {
            return Err(Error::InvalidAnsatz("non-finite Pauli coefficient".into()));
        }
        Ok(Self::from_terms_unchecked(n, terms))
    }

    pub(crate) fn from_terms_unchecked(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Self {
        let mut merged: BTreeMap<Vec<Pauli>, f64> = BTreeMap::new();
        for t in terms {
            *merged.entry(t.letters).or_insert(0.0) += t.coeff;
        }
        Self::from_sorted_map(n, merged)
    }

    pub(crate) fn from_sorted_map(n: usize, merged: BTreeMap<Vec<Pauli>, f64>) -> Self {
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() > ZERO_TOL)
            .map(|(letters, coeff)| PauliTerm { letters, coeff })
            .collect();
        Self { n, terms }
    }

    /// Re-merges and re-prunes. A no-op on values built through this API.
    pub fn canonicalize(&self) -> Self {
        Self::from_terms_unchecked(self.n, self.terms.iter().cloned())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Frobenius norm `sqrt(2^n · Σ c²)`: distinct Pauli strings are
    /// orthogonal under the Hilbert–Schmidt product with `Tr(P²) = 2^n`.
    pub fn frobenius_norm(&self) -> f64 {
        let sum_sq: f64 = self.terms.iter().map(|t| t.coeff * t.coeff).sum();
        (2f64.powi(self.n as i32) * sum_sq).sqrt()
    }

    /// True when all terms pairwise commute.
    pub fn is_commuting(&self) -> bool {
        let non_id: Vec<&PauliTerm> = self.terms.iter().filter(|t| !t.is_identity()).collect();
        non_id
            .iter()
            .enumerate()
            .all(|(i, a)| non_id[i + 1..].iter().all(|b| commutes(a, b)))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_terms_unchecked(
            self.n,
            self.terms
                .iter()
                .map(|t| PauliTerm::new(t.letters.clone(), t.coeff * factor)),
        )
    }

    /// Largest coefficient difference against `other`, term by term.
    pub fn max_abs_diff(&self, other: &HermitianOp) -> f64 {
        let diff = self - other;
        diff.terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::DimensionOverflow(self.n));
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            add_pauli_string(&mut m, &t.letters, t.coeff);
        }
        Ok(m)
    }
}

/// Adds `coeff · P` to `m`. `P|c⟩` has a single non-zero entry at row
/// `c ^ xmask`, with phase from the Y and Z letters.
fn add_pauli_string(m: &mut DMatrix<Complex64>, letters: &[Pauli], coeff: f64) {
    let dim = m.nrows();
    let mut xmask = 0usize;
    for (k, &p) in letters.iter().enumerate() {
        if matches!(p, Pauli::X | Pauli::Y) {
            xmask |= 1 << k;
        }
    }
    for col in 0..dim {
        let row = col ^ xmask;
        let mut phase = Complex64::new(coeff, 0.0);
        for (k, &p) in letters.iter().enumerate() {
            let bit = (col >> k) & 1;
            match p {
                Pauli::Z if bit == 1 => phase = -phase,
                // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
                Pauli::Y => phase *= if bit == 0 { Complex64::i() } else { -Complex64::i() },
                _ => {}
            }
        }
        m[(row, col)] += phase;
    }
}

impl Add for &HermitianOp {
    type Output = HermitianOp;

    fn add(self, rhs: &HermitianOp) -> HermitianOp {
        assert_eq!(self.n, rhs.n, "operator sizes differ");
        HermitianOp::from_terms_unchecked(self.n, self.terms.iter().chain(&rhs.terms).cloned())
    }
}

impl Sub for &HermitianOp {
    type Output = HermitianOp;

    fn sub(self, rhs: &HermitianOp) -> HermitianOp {
        self + &(-rhs)
    }
}

impl Neg for &HermitianOp {
    type Output = HermitianOp;

    fn neg(self) -> HermitianOp {
        HermitianOp {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm::new(t.letters.clone(), -t.coeff))
                .collect(),
        }
    }
}

impl Mul<f64> for &HermitianOp {
    type Output = HermitianOp;

    fn mul(self, rhs: f64) -> HermitianOp {
        self.scale(rhs)
    }
}

impl fmt::Display for HermitianOp {
    /// `<coeff>*<letters>` joined by ` + `; the zero operator prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{}*{}", t.coeff, t.letter_string()))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromStr for HermitianOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Err(Error::parse(0, "the zero operator carries no qubit count"));
        }
        let mut terms = Vec::new();
        for part in s.split(" + ") {
            let (coeff, letters) = part
                .trim()
                .split_once('*')
                .ok_or_else(|| Error::parse(0, format!("expected `<coeff>*<letters>`, got `{part}`")))?;
            let coeff: f64 = coeff
                .parse()
                .map_err(|_| Error::parse(0, format!("bad coefficient `{coeff}`")))?;
            let letters = letters
                .chars()
                .map(Pauli::from_char)
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::parse(0, format!("bad Pauli letters `{letters}`")))?;
            terms.push(PauliTerm::new(letters, coeff));
        }
        let n = terms[0].n();
        HermitianOp::new(n, terms)
    }
}
