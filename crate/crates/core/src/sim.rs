//! State-vector simulator for synthesized circuits.

use num_complex::Complex64;

use crate::catalog::GateKind;
use crate::error::{Error, Result};
use crate::synth::{Circuit, ExactBlock, Instruction, Op};

/// Largest register the simulator will allocate.
pub const MAX_SIM_QUBITS: usize = 10;

type Mat2 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rx_matrix(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn ry_matrix(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub fn rz_matrix(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]
}

pub fn h_matrix() -> Mat2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
}

/// Little-endian: qubit `k` is bit `k` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SIM_QUBITS {
            return Err(Error::UnsupportedSize {
                n,
                min: 1,
                max: MAX_SIM_QUBITS,
            });
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::SizeMismatch {
                expected: dim.next_power_of_two().max(2),
                found: dim,
            });
        }
        Ok(Self {
            n: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { index: q, n: self.n });
        }
        Ok(())
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) -> Result<()> {
        self.check(q)?;
        self.apply_masked(q, 0, m);
        Ok(())
    }

    /// Applies `m` to `target` on the subspace where `control` is 1.
    pub fn apply_controlled(&mut self, control: usize, target: usize, m: &Mat2) -> Result<()> {
        self.check(control)?;
        self.check(target)?;
        if control == target {
            return Err(Error::InvalidAnsatz(format!("control and target are both qubit {control}")));
        }
        self.apply_masked(target, 1 << control, m);
        Ok(())
    }

    fn apply_masked(&mut self, q: usize, control_mask: usize, m: &Mat2) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit != 0 || i & control_mask != control_mask {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        let mask = (1 << a) | (1 << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    /// `exp(-iθ Z_a Z_b / 2)`
    pub fn apply_rzz(&mut self, a: usize, b: usize, theta: f64) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        let (s, co) = (theta / 2.0).sin_cos();
        let (even, odd) = (c(co, -s), c(co, s));
        for (i, amp) in self.amps.iter_mut().enumerate() {
            let parity = ((i >> a) ^ (i >> b)) & 1;
            *amp *= if parity == 0 { even } else { odd };
        }
        Ok(())
    }

    pub fn apply_instruction(&mut self, inst: &Instruction, params: &[f64]) -> Result<()> {
        let theta = match &inst.angle {
            Some(a) => a.evaluate(params)?,
            None => 0.0,
        };
        let q = &inst.qubits;
        if q.len() != inst.kind.arity() {
            return Err(Error::InvalidAnsatz(format!("{} expects {} qubits", inst.kind, inst.kind.arity())));
        }
        match inst.kind {
            GateKind::RX => self.apply_1q(q[0], &rx_matrix(theta)),
            GateKind::RY => self.apply_1q(q[0], &ry_matrix(theta)),
            GateKind::RZ => self.apply_1q(q[0], &rz_matrix(theta)),
            GateKind::H => self.apply_1q(q[0], &h_matrix()),
            GateKind::CRX => self.apply_controlled(q[0], q[1], &rx_matrix(theta)),
            GateKind::CRY => self.apply_controlled(q[0], q[1], &ry_matrix(theta)),
            GateKind::CRZ => self.apply_controlled(q[0], q[1], &rz_matrix(theta)),
            GateKind::CX => {
                let x = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
                self.apply_controlled(q[0], q[1], &x)
            }
            GateKind::CZ => self.apply_cz(q[0], q[1]),
            GateKind::RZZ => self.apply_rzz(q[0], q[1], theta),
        }
    }

    /// `ψ ← V e^{-iθΛ} V† ψ`
    pub fn apply_exact(&mut self, block: &ExactBlock, params: &[f64]) -> Result<()> {
        if block.generator.n() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: block.generator.n(),
            });
        }
        let theta = block.angle().evaluate(params)?;
        let eig = block.eigen()?;
        let v = &eig.vectors;
        let dim = self.amps.len();
        let mut coeffs = vec![c(0.0, 0.0); dim];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let mut acc = c(0.0, 0.0);
            for i in 0..dim {
                acc += v[(i, k)].conj() * self.amps[i];
            }
            *ck = acc * Complex64::from_polar(1.0, -theta * eig.values[k]);
        }
        for i in 0..dim {
            let mut acc = c(0.0, 0.0);
            for (k, ck) in coeffs.iter().enumerate() {
                acc += v[(i, k)] * ck;
            }
            self.amps[i] = acc;
        }
        Ok(())
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `Tr ρ_k²` of the single-qubit reduced state.
    pub fn purity(&self, k: usize) -> Result<f64> {
        self.check(k)?;
        let bit = 1 << k;
        let (mut a, mut d, mut b) = (0.0, 0.0, c(0.0, 0.0));
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            let (x0, x1) = (self.amps[i], self.amps[i | bit]);
            a += x0.norm_sqr();
            d += x1.norm_sqr();
            b += x0 * x1.conj();
        }
        Ok(a * a + d * d + 2.0 * b.norm_sqr())
    }

    pub fn mean_purity(&self) -> f64 {
        (0..self.n).map(|k| self.purity(k).expect("in range")).sum::<f64>() / self.n as f64
    }
}

/// Runs `c` on `|0…0⟩`.
pub fn run(c: &Circuit, params: &[f64]) -> Result<StateVector> {
    if params.len() < c.num_params {
        return Err(Error::UnassignedSymbol(params.len()));
    }
    let mut psi = StateVector::zero(c.n)?;
    for op in &c.ops {
        match op {
            Op::Gate(inst) => psi.apply_instruction(inst, params)?,
            Op::Exact(block) => psi.apply_exact(block, params)?,
        }
    }
    Ok(psi)
}
