//! Permutation-unitary representation of subgroup elements.
//!
//! `U_σ` moves the bit at position `i` to position `σ(i)`. Conjugating a
//! Pauli string by `U_σ` therefore just relabels its letters, which is how
//! every twirl in this crate is computed; the dense matrices exist for
//! verification.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliTerm, MAX_DENSE_QUBITS};
use crate::permgroup::{Permutation, Subgroup};

/// `U_σ` as a dense `2^n × 2^n` 0/1 matrix.
pub fn perm_unitary_dense(sigma: &Permutation) -> Result<DMatrix<Complex64>> {
    let n = sigma.degree();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::DimensionOverflow(n));
    }
    let dim = 1usize << n;
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        u[(permute_index(sigma, col), col)] = Complex64::new(1.0, 0.0);
    }
    Ok(u)
}

/// Basis index after moving bit `i` to bit `σ(i)`.
#[inline]
pub fn permute_index(sigma: &Permutation, index: usize) -> usize {
    let mut out = 0;
    for i in 0..sigma.degree() {
        out |= ((index >> i) & 1) << sigma.apply(i);
    }
    out
}

/// `U_σ P U_σ†`: the letter on qubit `i` moves to qubit `σ(i)`.
pub fn conjugate_pauli(sigma: &Permutation, term: &PauliTerm) -> Result<PauliTerm> {
    if sigma.degree() != term.n() {
        return Err(Error::SizeMismatch {
            expected: sigma.degree(),
            found: term.n(),
        });
    }
    Ok(PauliTerm::new(conjugate_letters(sigma, &term.letters), term.coeff))
}

#[inline]
pub(crate) fn conjugate_letters(sigma: &Permutation, letters: &[Pauli]) -> Vec<Pauli> {
    let mut out = vec![Pauli::I; letters.len()];
    for (i, &p) in letters.iter().enumerate() {
        out[sigma.apply(i)] = p;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Data-encoding layer descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// `⊗_k R_axis(x_k)`, one rotation per qubit.
    Angle(Axis),
    Amplitude,
}

fn rotation(axis: Axis, angle: f64) -> DMatrix<Complex64> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let z = |re: f64, im: f64| Complex64::new(re, im);
    let entries = match axis {
        Axis::X => [z(c, 0.), z(0., -s), z(0., -s), z(c, 0.)],
        Axis::Y => [z(c, 0.), z(-s, 0.), z(s, 0.), z(c, 0.)],
        Axis::Z => [z(c, -s), z(0., 0.), z(0., 0.), z(c, s)],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Dense angle-encoding unitary; qubit `n-1` is the leftmost factor.
pub fn angle_encoding_dense(axis: Axis, data: &[f64]) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::identity(1, 1);
    for &x in data.iter().rev() {
        m = m.kronecker(&rotation(axis, x));
    }
    m
}

/// `φ(σ, x)`: entry `i` of `x` moves to position `σ(i)`.
pub fn permute_data(sigma: &Permutation, data: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for (i, &x) in data.iter().enumerate() {
        out[sigma.apply(i)] = x;
    }
    out
}

/// Checks `U_init(φ(s, x)) = U_s U_init(x) U_s†` for `trials` random data
/// vectors `x ∈ [0, 2π)^n` and every `s` in the subgroup.
pub fn verify_induced_rep(
    n: usize,
    subgroup: &Subgroup,
    encoding: Encoding,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<bool> {
    let Encoding::Angle(axis) = encoding else {
        return Err(Error::UnsupportedEncoding(format!("{encoding:?}")));
    };
    if subgroup.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: subgroup.n(),
        });
    }
    let unitaries = subgroup
        .elements()
        .iter()
        .map(perm_unitary_dense)
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let x: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        let u_x = angle_encoding_dense(axis, &x);
        for (sigma, u_s) in subgroup.elements().iter().zip(&unitaries) {
            let lhs = angle_encoding_dense(axis, &permute_data(sigma, &x));
            let rhs = u_s * &u_x * u_s.adjoint();
            if (lhs - rhs).norm() >= tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
