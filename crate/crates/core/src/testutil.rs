//! Dense oracles for unit tests. Built from Kronecker products and Taylor
//! series so they share no code path with the library routines they check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{HermitianOp, Pauli};

pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

pub fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

/// Qubit `n-1` is the leftmost Kronecker factor (qubit `k` = bit `k`).
pub fn dense_kron(op: &HermitianOp) -> DMatrix<Complex64> {
    let dim = 1 << op.n();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for t in op.terms() {
        let mut m = DMatrix::<Complex64>::identity(1, 1);
        for &p in t.letters.iter().rev() {
            m = kron(&m, &pauli_matrix(p));
        }
        out += m * Complex64::new(t.coeff, 0.0);
    }
    out
}

pub fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(-iθH)` by scaling and squaring a Taylor series.
pub fn expm_minus_i(h: &DMatrix<Complex64>, theta: f64) -> DMatrix<Complex64> {
    let dim = h.nrows();
    let a = h * Complex64::new(0.0, -theta);
    let norm = frobenius(&a);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * Complex64::new(scale, 0.0);
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `min_φ ‖a − e^{iφ} b‖_F`.
pub fn phase_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    frobenius(&(a - b * phase))
}
