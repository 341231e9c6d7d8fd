//! Lowering of twirled generators into circuits, plus cost metrics.
//!
//! A gate whose generator survived the twirl unchanged is emitted as its
//! native instruction. Otherwise, in product mode, each Pauli term `c·P`
//! becomes `exp(-iθcP)`: basis changes into Z, a CX ladder onto the highest
//! support qubit, `RZ(2cθ)`, and the mirror image. This is exact only when
//! the terms commute, so non-commuting orbits are refused and left to the
//! dense exponential path.

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{GateKind, Param};
use crate::error::{Error, Result};
use crate::pauli::{HermitianOp, Pauli, PauliTerm};
use crate::twirl::TwirledGate;

/// Merged rotations below this magnitude are dropped by [`peephole`].
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    /// `scale · x_symbol`
    Sym { scale: f64, symbol: usize },
    Const(f64),
}

impl Angle {
    pub fn evaluate(&self, params: &[f64]) -> Result<f64> {
        match *self {
            Angle::Sym { scale, symbol } => params
                .get(symbol)
                .map(|x| scale * x)
                .ok_or(Error::UnassignedSymbol(symbol)),
            Angle::Const(v) => Ok(v),
        }
    }

    fn scaled(param: Param, factor: f64) -> Angle {
        match param {
            Param::Symbol(symbol) => Angle::Sym {
                scale: factor,
                symbol,
            },
            Param::Fixed(v) => Angle::Const(factor * v),
        }
    }

    /// Sum of two angles over the same symbol, if they are mergeable.
    fn merge(&self, other: &Angle) -> Option<Angle> {
        match (*self, *other) {
            (Angle::Sym { scale: a, symbol: s }, Angle::Sym { scale: b, symbol: t }) if s == t => {
                Some(Angle::Sym { scale: a + b, symbol: s })
            }
            (Angle::Const(a), Angle::Const(b)) => Some(Angle::Const(a + b)),
            _ => None,
        }
    }

    fn is_negligible(&self) -> bool {
        match *self {
            Angle::Sym { scale, .. } => scale.abs() < MERGE_TOL,
            Angle::Const(v) => v.abs() < MERGE_TOL,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Sym { scale, symbol } => write!(f, "{scale}*x{symbol}"),
            Angle::Const(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// `None` for H, CX and CZ.
    pub angle: Option<Angle>,
}

impl Instruction {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<Angle>) -> Self {
        Self { kind, qubits, angle }
    }

    fn is_rotation_1q(&self) -> bool {
        matches!(self.kind, GateKind::RX | GateKind::RY | GateKind::RZ)
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        write!(f, "{} q={}", self.kind, q.join(","))?;
        if let Some(a) = &self.angle {
            write!(f, " angle={a}")?;
        }
        Ok(())
    }
}

/// Eigendecomposition of a dense generator, `G = V diag(λ) V†`.
#[derive(Debug)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// A twirled gate simulated as `exp(-iθG)` through its eigendecomposition.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExactBlock {
    pub gate: usize,
    pub generator: HermitianOp,
    pub param: Param,
    #[serde(skip)]
    eigen: OnceLock<Arc<Eigen>>,
}

impl Clone for ExactBlock {
    fn clone(&self) -> Self {
        let eigen = OnceLock::new();
        if let Some(e) = self.eigen.get() {
            let _ = eigen.set(Arc::clone(e));
        }
        Self {
            gate: self.gate,
            generator: self.generator.clone(),
            param: self.param,
            eigen,
        }
    }
}

impl PartialEq for ExactBlock {
    fn eq(&self, other: &Self) -> bool {
        self.gate == other.gate && self.generator == other.generator && self.param == other.param
    }
}

impl ExactBlock {
    pub fn new(gate: usize, generator: HermitianOp, param: Param) -> Self {
        Self {
            gate,
            generator,
            param,
            eigen: OnceLock::new(),
        }
    }

    /// Computed on first use and shared afterwards.
    pub fn eigen(&self) -> Result<&Arc<Eigen>> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let dense = self.generator.dense()?;
        let eig = nalgebra::SymmetricEigen::new(dense);
        let _ = self.eigen.set(Arc::new(Eigen {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }));
        Ok(self.eigen.get().expect("just set"))
    }

    pub fn angle(&self) -> Angle {
        Angle::scaled(self.param, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    Gate(Instruction),
    Exact(ExactBlock),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: usize,
    pub num_params: usize,
    pub ops: Vec<Op>,
}

impl Circuit {
    pub fn new(n: usize, num_params: usize) -> Self {
        Self {
            n,
            num_params,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, inst: Instruction) {
        self.ops.push(Op::Gate(inst));
    }

    pub fn instructions(&self) -> impl Iterator<Item = &Instruction> {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(i) => Some(i),
            Op::Exact(_) => None,
        })
    }

    pub fn exact_blocks(&self) -> impl Iterator<Item = &ExactBlock> {
        self.ops.iter().filter_map(|op| match op {
            Op::Exact(b) => Some(b),
            Op::Gate(_) => None,
        })
    }

    pub fn has_exact(&self) -> bool {
        self.exact_blocks().next().is_some()
    }

    /// One op per line: `KIND q=<…> angle=<…>`, exact blocks as
    /// `EXACT gate=<i> param=<p> generator=<pauli sum>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            match op {
                Op::Gate(i) => out.push_str(&i.to_string()),
                Op::Exact(b) => out.push_str(&format!(
                    "EXACT gate={} param={} generator={}",
                    b.gate, b.param, b.generator
                )),
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SynthMode {
    Product,
    Exact,
}

fn check_gate(n: usize, index: usize, g: &TwirledGate) -> Result<()> {
    if g.twirled_generator.n() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: g.twirled_generator.n(),
        });
    }
    let _ = index;
    Ok(())
}

fn num_params_of(gates: &[TwirledGate]) -> usize {
    gates
        .iter()
        .filter_map(|g| match g.param {
            Param::Symbol(k) => Some(k + 1),
            Param::Fixed(_) => None,
        })
        .max()
        .unwrap_or(0)
}

pub fn synthesize(n: usize, gates: &[TwirledGate], mode: SynthMode) -> Result<Circuit> {
    let mut circuit = Circuit::new(n, num_params_of(gates));
    for (index, g) in gates.iter().enumerate() {
        check_gate(n, index, g)?;
        match mode {
            SynthMode::Exact => circuit.ops.push(Op::Exact(ExactBlock::new(
                index,
                g.twirled_generator.clone(),
                g.param,
            ))),
            SynthMode::Product => lower_product(&mut circuit, index, g)?,
        }
    }
    Ok(circuit)
}

/// Product mode where possible; gates with non-commuting terms become exact
/// blocks. Returns the circuit and the number of such fallbacks.
pub fn synthesize_with_fallback(n: usize, gates: &[TwirledGate]) -> Result<(Circuit, usize)> {
    let mut circuit = Circuit::new(n, num_params_of(gates));
    let mut fallbacks = 0;
    for (index, g) in gates.iter().enumerate() {
        check_gate(n, index, g)?;
        match lower_product(&mut circuit, index, g) {
            Ok(()) => {}
            Err(Error::NonCommutingOrbit { .. }) => {
                fallbacks += 1;
                circuit.ops.push(Op::Exact(ExactBlock::new(
                    index,
                    g.twirled_generator.clone(),
                    g.param,
                )));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((circuit, fallbacks))
}

fn lower_product(circuit: &mut Circuit, index: usize, g: &TwirledGate) -> Result<()> {
    if g.is_unchanged() {
        let angle = if g.source.kind.is_involution() {
            None
        } else {
            Some(Angle::scaled(g.param, 1.0))
        };
        circuit.push(Instruction::new(g.source.kind, g.source.qubits.clone(), angle));
        return Ok(());
    }
    if !g.commuting {
        return Err(Error::NonCommutingOrbit { gate: index });
    }
    for term in g.twirled_generator.terms() {
        lower_term(circuit, term, g.param);
    }
    Ok(())
}

/// Appends `exp(-iθ·c·P)` for one Pauli term; identity terms are a global
/// phase and emit nothing.
pub fn lower_term(circuit: &mut Circuit, term: &PauliTerm, param: Param) {
    let support = term.support();
    let angle = Angle::scaled(param, 2.0 * term.coeff);
    match support.as_slice() {
        [] => {}
        &[q] => {
            let kind = match term.letters[q] {
                Pauli::X => GateKind::RX,
                Pauli::Y => GateKind::RY,
                _ => GateKind::RZ,
            };
            circuit.push(Instruction::new(kind, vec![q], Some(angle)));
        }
        _ => {
            let root = *support.last().expect("non-empty");
            let into_z = |circuit: &mut Circuit, undo: bool| {
                for &q in &support {
                    match term.letters[q] {
                        Pauli::X => circuit.push(Instruction::new(GateKind::H, vec![q], None)),
                        Pauli::Y => {
                            let a = if undo { -std::f64::consts::FRAC_PI_2 } else { std::f64::consts::FRAC_PI_2 };
                            circuit.push(Instruction::new(GateKind::RX, vec![q], Some(Angle::Const(a))));
                        }
                        _ => {}
                    }
                }
            };
            into_z(circuit, false);
            for w in support.windows(2) {
                circuit.push(Instruction::new(GateKind::CX, vec![w[0], w[1]], None));
            }
            circuit.push(Instruction::new(GateKind::RZ, vec![root], Some(angle)));
            for w in support.windows(2).rev() {
                circuit.push(Instruction::new(GateKind::CX, vec![w[0], w[1]], None));
            }
            into_z(circuit, true);
        }
    }
}

/// Merges runs of same-axis rotations over the same symbol on a wire and
/// drops the ones that cancel.
pub fn peephole(c: &Circuit) -> Circuit {
    let mut out: Vec<Option<Op>> = Vec::with_capacity(c.ops.len());
    let mut wires: Vec<Vec<usize>> = vec![Vec::new(); c.n];
    for op in &c.ops {
        if let Op::Gate(inst) = op {
            if inst.is_rotation_1q() {
                let q = inst.qubits[0];
                let angle = inst.angle.expect("rotations carry an angle");
                if let Some(&j) = wires[q].last() {
                    if let Some(Op::Gate(prev)) = &mut out[j] {
                        if prev.kind == inst.kind {
                            if let Some(merged) = prev.angle.and_then(|a| a.merge(&angle)) {
                                if merged.is_negligible() {
                                    out[j] = None;
                                    wires[q].pop();
                                } else {
                                    prev.angle = Some(merged);
                                }
                                continue;
                            }
                        }
                    }
                }
            }
        }
        let touched: Vec<usize> = match op {
            Op::Gate(inst) => inst.qubits.clone(),
            Op::Exact(_) => (0..c.n).collect(),
        };
        for q in touched {
            wires[q].push(out.len());
        }
        out.push(Some(op.clone()));
    }
    Circuit {
        n: c.n,
        num_params: c.num_params,
        ops: out.into_iter().flatten().collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub size: usize,
    pub depth: usize,
    pub two_qubit_count: usize,
    /// Size relative to the depth-matched original; set by the caller.
    pub growth_ratio: Option<f64>,
}

impl CircuitMetrics {
    pub fn with_growth_against(mut self, original: &CircuitMetrics) -> Self {
        self.growth_ratio = (original.size > 0).then(|| self.size as f64 / original.size as f64);
        self
    }
}

/// Counts instructions only; exact blocks are not part of the cost model.
pub fn metrics_of(c: &Circuit) -> CircuitMetrics {
    let mut level = vec![0usize; c.n];
    let mut size = 0;
    let mut two_qubit_count = 0;
    for inst in c.instructions() {
        size += 1;
        if inst.qubits.len() == 2 {
            two_qubit_count += 1;
        }
        let l = inst.qubits.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &inst.qubits {
            level[q] = l;
        }
    }
    CircuitMetrics {
        size,
        depth: level.into_iter().max().unwrap_or(0),
        two_qubit_count,
        growth_ratio: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_ansatz, generator_of, AnsatzTemplate, NUM_ANSATZES};
    use crate::permgroup::{Permutation, Subgroup};
    use crate::testutil::{dense_kron, expm_minus_i, phase_distance};
    use crate::twirl::twirl_ansatz;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    /// Dense unitary of a gate-only circuit, each instruction exponentiated
    /// from its catalog generator by Taylor series.
    fn dense_unitary(c: &Circuit, params: &[f64]) -> DMatrix<Complex64> {
        let dim = 1 << c.n;
        let mut u = DMatrix::<Complex64>::identity(dim, dim);
        for op in &c.ops {
            let Op::Gate(inst) = op else { panic!("exact block in product circuit") };
            let g = generator_of(inst.kind, &inst.qubits, c.n).unwrap();
            let theta = match inst.angle {
                Some(a) => a.evaluate(params).unwrap(),
                None => std::f64::consts::PI,
            };
            u = expm_minus_i(&dense_kron(&g), theta) * u;
        }
        u
    }

    fn single(term: PauliTerm, param: Param) -> TwirledGate {
        let n = term.n();
        let source = crate::catalog::GateDef::new(GateKind::RZ, vec![0], param, n).unwrap();
        let generator = HermitianOp::new(n, vec![term]).unwrap();
        TwirledGate {
            source,
            commuting: generator.is_commuting(),
            twirled_generator: generator,
            param,
        }
    }

    #[test]
    fn zz_term_lowers_to_cx_rz_cx() {
        let t = PauliTerm::on(2, &[(0, Pauli::Z), (1, Pauli::Z)], 0.5);
        let c = synthesize(2, &[single(t.clone(), Param::Symbol(0))], SynthMode::Product).unwrap();
        assert_eq!(c.dump(), "CX q=0,1\nRZ q=1 angle=1*x0\nCX q=0,1\n");
        let theta = 0.83;
        let target = expm_minus_i(&dense_kron(&HermitianOp::new(2, vec![t]).unwrap()), theta);
        assert!(phase_distance(&dense_unitary(&c, &[theta]), &target) < 1e-10);
    }

    #[test]
    fn mixed_basis_term_is_sound() {
        let t = PauliTerm::on(4, &[(0, Pauli::X), (2, Pauli::Y), (3, Pauli::Z)], -0.3);
        let c = synthesize(4, &[single(t.clone(), Param::Symbol(0))], SynthMode::Product).unwrap();
        let dump = c.dump();
        assert!(dump.starts_with("H q=0\nRX q=2 angle=1.5707963267948966\nCX q=0,2\nCX q=2,3\nRZ q=3"));
        let target = expm_minus_i(&dense_kron(&HermitianOp::new(4, vec![t]).unwrap()), 1.7);
        assert!(phase_distance(&dense_unitary(&c, &[1.7]), &target) < 1e-10);
    }

    #[test]
    fn ladder_and_its_inverse_cancel() {
        let t = PauliTerm::on(3, &[(0, Pauli::Y), (1, Pauli::X), (2, Pauli::Z)], 0.4);
        let mut c = Circuit::new(3, 1);
        lower_term(&mut c, &t, Param::Symbol(0));
        lower_term(&mut c, &PauliTerm::new(t.letters.clone(), -0.4), Param::Symbol(0));
        let u = dense_unitary(&c, &[2.2]);
        assert!(phase_distance(&u, &DMatrix::identity(8, 8)) < 1e-10);
    }

    #[test]
    fn identity_terms_emit_nothing() {
        let mut c = Circuit::new(2, 1);
        lower_term(&mut c, &PauliTerm::identity(2, 0.7), Param::Symbol(0));
        assert!(c.ops.is_empty());
        let zero = TwirledGate {
            source: crate::catalog::GateDef::new(GateKind::RZ, vec![0], Param::Symbol(0), 2).unwrap(),
            twirled_generator: HermitianOp::zero(2),
            param: Param::Symbol(0),
            commuting: true,
        };
        assert!(synthesize(2, &[zero], SynthMode::Product).unwrap().ops.is_empty());
    }

    #[test]
    fn trivial_twirl_reproduces_native_gates() {
        for id in 1..=NUM_ANSATZES {
            let a = build_ansatz(id, 4, 1).unwrap();
            let tw = twirl_ansatz(&a, &Subgroup::trivial(4)).unwrap();
            let c = synthesize(4, &tw, SynthMode::Product).unwrap();
            let mut got: BTreeMap<(GateKind, Vec<usize>), usize> = BTreeMap::new();
            for i in c.instructions() {
                *got.entry((i.kind, i.qubits.clone())).or_default() += 1;
            }
            let mut want: BTreeMap<(GateKind, Vec<usize>), usize> = BTreeMap::new();
            for g in &a.gates {
                *want.entry((g.kind, g.qubits.clone())).or_default() += 1;
            }
            assert_eq!(got, want, "ansatz {id}");
        }
        let a3 = build_ansatz(3, 4, 1).unwrap();
        let c = synthesize(4, &twirl_ansatz(&a3, &Subgroup::trivial(4)).unwrap(), SynthMode::Product).unwrap();
        assert_eq!(metrics_of(&c).size, 11);
    }

    #[test]
    fn crz_over_klein_group_gives_rz_and_zz_structure() {
        let v4 = Subgroup::generated_by(
            4,
            &[
                Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap(),
                Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let a = build_ansatz(3, 4, 1).unwrap();
        let tw = twirl_ansatz(&a, &v4).unwrap();
        let c = synthesize(4, &tw[8..9], SynthMode::Product).unwrap();
        // four RZ(0.125·x8), then ZZ on {0,1} and {2,3} at 2·(-0.125) = -0.25
        assert_eq!(
            c.dump(),
            "RZ q=3 angle=0.125*x8\nRZ q=2 angle=0.125*x8\nCX q=2,3\nRZ q=3 angle=-0.25*x8\nCX q=2,3\n\
             RZ q=1 angle=0.125*x8\nRZ q=0 angle=0.125*x8\nCX q=0,1\nRZ q=1 angle=-0.25*x8\nCX q=0,1\n"
        );
        let rx = synthesize(4, &tw[0..1], SynthMode::Product).unwrap();
        assert_eq!(rx.instructions().count(), 4);
        assert!(rx
            .instructions()
            .all(|i| i.kind == GateKind::RX && i.angle == Some(Angle::Sym { scale: 0.25, symbol: 0 })));
    }

    #[test]
    fn product_mode_refuses_non_commuting() {
        let a = build_ansatz(2, 4, 1).unwrap();
        let tw = twirl_ansatz(&a, &Subgroup::symmetric(4)).unwrap();
        let err = synthesize(4, &tw, SynthMode::Product).unwrap_err();
        assert!(matches!(err, Error::NonCommutingOrbit { gate: 8 }));
        let (c, fallbacks) = synthesize_with_fallback(4, &tw).unwrap();
        assert_eq!(fallbacks, 3);
        assert_eq!(c.exact_blocks().count(), 3);
        assert!(c.dump().contains("EXACT gate=8 param=pi"));
    }

    #[test]
    fn exact_mode_emits_no_instructions() {
        let a = build_ansatz(3, 4, 1).unwrap();
        let tw = twirl_ansatz(&a, &Subgroup::symmetric(4)).unwrap();
        let c = synthesize(4, &tw, SynthMode::Exact).unwrap();
        assert_eq!(metrics_of(&c).size, 0);
        assert_eq!(c.exact_blocks().count(), 11);
        assert_eq!(c.num_params, 11);
    }

    #[test]
    fn exact_block_eigen_reconstructs_generator() {
        let g = generator_of(GateKind::H, &[1], 2).unwrap();
        let b = ExactBlock::new(0, g.clone(), Param::Fixed(std::f64::consts::PI));
        let e = b.eigen().unwrap();
        let d = DMatrix::from_diagonal(&e.values.map(|v| Complex64::new(v, 0.0)));
        let rebuilt = &e.vectors * d * e.vectors.adjoint();
        assert!((rebuilt - dense_kron(&g)).norm() < 1e-12);
        assert!(Arc::ptr_eq(b.eigen().unwrap(), b.clone().eigen().unwrap()));
    }

    #[test]
    fn metrics_examples() {
        let empty = Circuit::new(2, 0);
        let m = metrics_of(&empty);
        assert_eq!((m.size, m.depth, m.two_qubit_count), (0, 0, 0));

        let t = PauliTerm::on(2, &[(0, Pauli::Z), (1, Pauli::Z)], 0.5);
        let c = synthesize(2, &[single(t, Param::Symbol(0))], SynthMode::Product).unwrap();
        let m = metrics_of(&c);
        assert_eq!((m.size, m.depth, m.two_qubit_count), (3, 3, 2));

        let mut par = Circuit::new(2, 2);
        par.push(Instruction::new(GateKind::RX, vec![0], Some(Angle::Sym { scale: 1.0, symbol: 0 })));
        par.push(Instruction::new(GateKind::RX, vec![1], Some(Angle::Sym { scale: 1.0, symbol: 1 })));
        assert_eq!(metrics_of(&par).depth, 1);
    }

    #[test]
    fn growth_ratio() {
        let a = CircuitMetrics { size: 30, depth: 5, two_qubit_count: 4, growth_ratio: None };
        let o = CircuitMetrics { size: 10, depth: 2, two_qubit_count: 1, growth_ratio: None };
        assert_eq!(a.with_growth_against(&o).growth_ratio, Some(3.0));
        assert_eq!(o.with_growth_against(&o).growth_ratio, Some(1.0));
    }

    fn rz(q: usize, scale: f64, symbol: usize) -> Instruction {
        Instruction::new(GateKind::RZ, vec![q], Some(Angle::Sym { scale, symbol }))
    }

    #[test]
    fn peephole_examples() {
        let mut c = Circuit::new(2, 2);
        c.push(rz(0, 0.5, 0));
        c.push(rz(0, 0.25, 0));
        assert_eq!(peephole(&c).dump(), "RZ q=0 angle=0.75*x0\n");

        let mut c = Circuit::new(2, 2);
        c.push(rz(0, 0.5, 0));
        c.push(rz(0, 0.5, 1));
        assert_eq!(peephole(&c), c);

        let mut c = Circuit::new(2, 2);
        c.push(rz(0, 0.5, 0));
        c.push(rz(0, -0.5, 0));
        assert!(peephole(&c).ops.is_empty());
    }

    #[test]
    fn peephole_respects_wire_order() {
        let mut c = Circuit::new(2, 1);
        c.push(rz(0, 0.5, 0));
        c.push(Instruction::new(GateKind::CX, vec![0, 1], None));
        c.push(rz(0, 0.5, 0));
        assert_eq!(peephole(&c), c);

        // a rotation on another wire does not block the merge
        let mut c = Circuit::new(2, 1);
        c.push(rz(0, 0.5, 0));
        c.push(rz(1, 0.5, 0));
        c.push(rz(0, 0.5, 0));
        assert_eq!(peephole(&c).dump(), "RZ q=0 angle=1*x0\nRZ q=1 angle=0.5*x0\n");

        // cancellation exposes the earlier rotation
        let mut c = Circuit::new(1, 2);
        c.push(rz(0, 0.5, 1));
        c.push(rz(0, 0.5, 0));
        c.push(rz(0, -0.5, 0));
        c.push(rz(0, 0.25, 1));
        assert_eq!(peephole(&c).dump(), "RZ q=0 angle=0.75*x1\n");
    }

    #[test]
    fn peephole_on_twirled_catalog_preserves_unitary_and_shrinks() {
        let sub = Subgroup::symmetric(4);
        for id in [1, 3, 5, 10, 13, 16, 18] {
            let a = build_ansatz(id, 4, 1).unwrap();
            let (c, fallbacks) = synthesize_with_fallback(4, &twirl_ansatz(&a, &sub).unwrap()).unwrap();
            if fallbacks > 0 {
                continue;
            }
            let p = peephole(&c);
            let (m, mp) = (metrics_of(&c), metrics_of(&p));
            assert!(mp.size <= m.size && mp.depth <= m.depth);
            let params: Vec<f64> = (0..a.num_params).map(|k| 0.3 + 0.7 * k as f64).collect();
            assert!(phase_distance(&dense_unitary(&c, &params), &dense_unitary(&p, &params)) < 1e-9);
        }
    }

    fn arb_commuting_gate() -> impl Strategy<Value = (TwirledGate, f64)> {
        let subs = crate::permgroup::enumerate_subgroups(4).unwrap();
        let n_subs = subs.len();
        (0..n_subs, 1usize..=NUM_ANSATZES, 0usize..64, -3.0f64..3.0).prop_filter_map(
            "needs a commuting twirl",
            move |(s, id, gi, theta)| {
                let a: AnsatzTemplate = build_ansatz(id, 4, 1).unwrap();
                let g = &a.gates[gi % a.gates.len()];
                let tw = twirl_ansatz(&AnsatzTemplate { gates: vec![g.clone()], ..a.clone() }, &subs[s]).ok()?;
                let t = tw.into_iter().next()?;
                (t.commuting && !t.is_unchanged()).then_some((t, theta))
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn product_synthesis_is_sound((g, theta) in arb_commuting_gate()) {
            let c = synthesize(4, std::slice::from_ref(&g), SynthMode::Product).unwrap();
            let mut params = vec![0.0; c.num_params.max(1)];
            if let Param::Symbol(k) = g.param { params[k] = theta; }
            let theta_eff = match g.param { Param::Symbol(_) => theta, Param::Fixed(v) => v };
            let target = expm_minus_i(&dense_kron(&g.twirled_generator), theta_eff);
            prop_assert!(phase_distance(&dense_unitary(&c, &params), &target) < 1e-9);
        }
    }
}
