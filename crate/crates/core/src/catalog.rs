//! Gate definitions and the 19 benchmark ansatz templates.
//!
//! Every gate is `exp(-iθG)` for a Pauli-sum generator `G`. Parametrized
//! rotations use their usual half-angle generators; the involutions H, CX
//! and CZ use `G = (I − V)/2` at the fixed angle `θ = π`, which reproduces
//! `V` exactly.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{HermitianOp, Pauli, PauliTerm};

pub const NUM_ANSATZES: usize = 19;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    CRX,
    CRY,
    CRZ,
    RZZ,
    H,
    CX,
    CZ,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CRX,
        GateKind::CRY,
        GateKind::CRZ,
        GateKind::RZZ,
        GateKind::H,
        GateKind::CX,
        GateKind::CZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::H => 1,
            _ => 2,
        }
    }

    /// H, CX and CZ carry no trainable parameter.
    pub fn is_involution(self) -> bool {
        matches!(self, GateKind::H | GateKind::CX | GateKind::CZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CRX => "CRX",
            GateKind::CRY => "CRY",
            GateKind::CRZ => "CRZ",
            GateKind::RZZ => "RZZ",
            GateKind::H => "H",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .or_else(|| s.eq_ignore_ascii_case("CNOT").then_some(GateKind::CX))
            .ok_or_else(|| Error::UnknownGateKind(s.to_owned()))
    }
}

/// Angle of a gate: a trainable symbol `x_k` or a fixed value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Param {
    Symbol(usize),
    Fixed(f64),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Symbol(k) => write!(f, "x{k}"),
            Param::Fixed(v) if *v == PI => write!(f, "pi"),
            Param::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "pi" {
            Ok(Param::Fixed(PI))
        } else if let Some(k) = s.strip_prefix('x').or_else(|| s.strip_prefix("x_")) {
            k.parse()
                .map(Param::Symbol)
                .map_err(|_| Error::parse(0, format!("bad parameter symbol `{s}`")))
        } else {
            s.parse()
                .map(Param::Fixed)
                .map_err(|_| Error::parse(0, format!("bad parameter `{s}`")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateDef {
    pub kind: GateKind,
    /// `[target]` or `[control, target]`; for RZZ and CZ the order is immaterial.
    pub qubits: Vec<usize>,
    pub param: Param,
    pub generator: HermitianOp,
}

impl GateDef {
    pub fn new(kind: GateKind, qubits: Vec<usize>, param: Param, n: usize) -> Result<Self> {
        let generator = generator_of(kind, &qubits, n)?;
        Ok(Self {
            kind,
            qubits,
            param,
            generator,
        })
    }

    pub fn catalog_line(&self) -> String {
        let q: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        format!("GATE {} q={} param={}", self.kind, q.join(","), self.param)
    }
}

/// Generator `G` with `gate(θ) = exp(-iθG)`.
pub fn generator_of(kind: GateKind, qubits: &[usize], n: usize) -> Result<HermitianOp> {
    if qubits.len() != kind.arity() {
        return Err(Error::InvalidAnsatz(format!(
            "{kind} acts on {} qubits, got {qubits:?}",
            kind.arity()
        )));
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { index: q, n });
    }
    if qubits.len() == 2 && qubits[0] == qubits[1] {
        return Err(Error::InvalidAnsatz(format!("{kind} on repeated qubit {}", qubits[0])));
    }
    let t = PauliTerm::on;
    let terms = match (kind, qubits) {
        (GateKind::RX, &[q]) => vec![t(n, &[(q, Pauli::X)], 0.5)],
        (GateKind::RY, &[q]) => vec![t(n, &[(q, Pauli::Y)], 0.5)],
        (GateKind::RZ, &[q]) => vec![t(n, &[(q, Pauli::Z)], 0.5)],
        (GateKind::H, &[q]) => {
            let c = 0.5 * FRAC_1_SQRT_2;
            vec![
                PauliTerm::identity(n, 0.5),
                t(n, &[(q, Pauli::X)], -c),
                t(n, &[(q, Pauli::Z)], -c),
            ]
        }
        // |1⟩⟨1|_c ⊗ P_t / 2 = (P_t − Z_c P_t) / 4
        (GateKind::CRX | GateKind::CRY | GateKind::CRZ, &[c, tg]) => {
            let p = match kind {
                GateKind::CRX => Pauli::X,
                GateKind::CRY => Pauli::Y,
                _ => Pauli::Z,
            };
            vec![t(n, &[(tg, p)], 0.25), t(n, &[(c, Pauli::Z), (tg, p)], -0.25)]
        }
        (GateKind::RZZ, &[a, b]) => vec![t(n, &[(a, Pauli::Z), (b, Pauli::Z)], 0.5)],
        (GateKind::CX | GateKind::CZ, &[c, tg]) => {
            let p = if kind == GateKind::CX { Pauli::X } else { Pauli::Z };
            vec![
                PauliTerm::identity(n, 0.25),
                t(n, &[(c, Pauli::Z)], -0.25),
                t(n, &[(tg, p)], -0.25),
                t(n, &[(c, Pauli::Z), (tg, p)], 0.25),
            ]
        }
        _ => unreachable!("arity checked above"),
    };
    HermitianOp::new(n, terms)
}

/// An ansatz: `depth` repetitions of one layer, with fresh parameter
/// symbols per layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzTemplate {
    pub id: usize,
    pub n: usize,
    pub depth: usize,
    pub layer_len: usize,
    pub num_params: usize,
    pub gates: Vec<GateDef>,
}

impl AnsatzTemplate {
    /// Builds a template from one layer of `(kind, qubits)` pairs.
    /// Parametrized gates get consecutive symbols, involutions get `π`.
    pub fn from_layer(id: usize, n: usize, depth: usize, layer: &[(GateKind, Vec<usize>)]) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidAnsatz("need at least one qubit".into()));
        }
        if depth < 1 {
            return Err(Error::InvalidAnsatz("depth must be at least 1".into()));
        }
        let mut gates = Vec::with_capacity(layer.len() * depth);
        let mut next = 0;
        for _ in 0..depth {
            for (kind, qubits) in layer {
                let param = if kind.is_involution() {
                    Param::Fixed(PI)
                } else {
                    next += 1;
                    Param::Symbol(next - 1)
                };
                gates.push(GateDef::new(*kind, qubits.clone(), param, n)?);
            }
        }
        Ok(Self {
            id,
            n,
            depth,
            layer_len: layer.len(),
            num_params: next,
            gates,
        })
    }

    pub fn first_layer(&self) -> &[GateDef] {
        &self.gates[..self.layer_len]
    }

    /// Same ansatz at a different depth.
    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        let layer: Vec<(GateKind, Vec<usize>)> = self
            .first_layer()
            .iter()
            .map(|g| (g.kind, g.qubits.clone()))
            .collect();
        Self::from_layer(self.id, self.n, depth, &layer)
    }

    pub fn to_catalog_text(&self) -> String {
        let mut out = format!("ANSATZ {}\nQUBITS {}\n", self.id, self.n);
        if self.depth > 1 {
            out.push_str(&format!("DEPTH {}\n", self.depth));
        }
        for g in &self.gates {
            out.push_str(&g.catalog_line());
            out.push('\n');
        }
        out
    }

    /// Parses the catalog text format. Symbols must be consecutive from `x0`.
    pub fn parse_catalog(text: &str) -> Result<Self> {
        let mut id = None;
        let mut n = None;
        let mut depth = 1;
        let mut raw: Vec<(usize, GateKind, Vec<usize>, Param)> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or_default();
            let value = |w: Option<&str>| -> Result<usize> {
                w.and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::parse(lineno, format!("expected a number after {head}")))
            };
            match head {
                "ANSATZ" => id = Some(value(words.next())?),
                "QUBITS" => n = Some(value(words.next())?),
                "DEPTH" => depth = value(words.next())?,
                "GATE" => {
                    let kind: GateKind = words
                        .next()
                        .ok_or_else(|| Error::parse(lineno, "missing gate kind"))?
                        .parse()
                        .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
                    let mut qubits = None;
                    let mut param = None;
                    for w in words {
                        if let Some(q) = w.strip_prefix("q=") {
                            qubits = Some(
                                q.split(',')
                                    .map(|s| s.parse::<usize>())
                                    .collect::<std::result::Result<Vec<_>, _>>()
                                    .map_err(|_| Error::parse(lineno, format!("bad qubit list `{q}`")))?,
                            );
                        } else if let Some(p) = w.strip_prefix("param=") {
                            param = Some(p.parse::<Param>().map_err(|e| Error::parse(lineno, e.to_string()))?);
                        } else {
                            return Err(Error::parse(lineno, format!("unexpected field `{w}`")));
                        }
                    }
                    let qubits = qubits.ok_or_else(|| Error::parse(lineno, "missing q="))?;
                    let param = param.ok_or_else(|| Error::parse(lineno, "missing param="))?;
                    raw.push((lineno, kind, qubits, param));
                }
                other => return Err(Error::parse(lineno, format!("unknown directive `{other}`"))),
            }
        }
        let id = id.ok_or_else(|| Error::parse(0, "missing ANSATZ header"))?;
        let n = n.ok_or_else(|| Error::parse(0, "missing QUBITS header"))?;
        if depth == 0 || raw.len() % depth != 0 {
            return Err(Error::parse(0, format!("{} gates do not split into {depth} layers", raw.len())));
        }
        let mut gates = Vec::with_capacity(raw.len());
        let mut next = 0;
        for (lineno, kind, qubits, param) in raw {
            match param {
                Param::Symbol(k) if k != next => {
                    return Err(Error::parse(lineno, format!("expected symbol x{next}, found x{k}")));
                }
                Param::Symbol(_) => next += 1,
                Param::Fixed(_) => {}
            }
            gates.push(GateDef::new(kind, qubits, param, n).map_err(|e| Error::parse(lineno, e.to_string()))?);
        }
        Ok(Self {
            id,
            n,
            depth,
            layer_len: gates.len() / depth,
            num_params: next,
            gates,
        })
    }
}

/// Catalog ansatz `id` (1–19) on `n ≥ 2` qubits.
pub fn build_ansatz(id: usize, n: usize, depth: usize) -> Result<AnsatzTemplate> {
    if !(1..=NUM_ANSATZES).contains(&id) {
        return Err(Error::UnknownAnsatz(id));
    }
    if n < 2 {
        return Err(Error::InvalidAnsatz(format!("ansatz {id} needs at least 2 qubits, got {n}")));
    }
    AnsatzTemplate::from_layer(id, n, depth, &layer_of(id, n))
}

fn layer_of(id: usize, n: usize) -> Vec<(GateKind, Vec<usize>)> {
    use GateKind::*;
    let mut layer = Vec::new();
    let each = |layer: &mut Vec<(GateKind, Vec<usize>)>, kinds: &[GateKind], qubits: &mut dyn Iterator<Item = usize>| {
        for q in qubits {
            for &k in kinds {
                layer.push((k, vec![q]));
            }
        }
    };
    // (i → i-1) for i = n-1 … 1
    let ladder = |layer: &mut Vec<(GateKind, Vec<usize>)>, k: GateKind| {
        for i in (1..n).rev() {
            layer.push((k, vec![i, i - 1]));
        }
    };
    // (i+1 → i) for i of the given parity
    let pairs = |layer: &mut Vec<(GateKind, Vec<usize>)>, k: GateKind, parity: usize| {
        for i in (parity..n - 1).step_by(2) {
            layer.push((k, vec![i + 1, i]));
        }
    };
    // (n-1 → 0), (n-2 → n-1), …, (0 → 1)
    let ring = |layer: &mut Vec<(GateKind, Vec<usize>)>, k: GateKind| {
        for j in 0..n {
            let c = n - 1 - j;
            layer.push((k, vec![c, (c + 1) % n]));
        }
    };
    // (n-1 → n-2), (0 → n-1), (1 → 0), …, (n-2 → n-3)
    let ring_back = |layer: &mut Vec<(GateKind, Vec<usize>)>, k: GateKind| {
        for j in 0..n {
            let c = (n - 1 + j) % n;
            layer.push((k, vec![c, (c + n - 1) % n]));
        }
    };
    let all_to_all = |layer: &mut Vec<(GateKind, Vec<usize>)>, k: GateKind| {
        for c in (0..n).rev() {
            for t in (0..n).rev().filter(|&t| t != c) {
                layer.push((k, vec![c, t]));
            }
        }
    };

    match id {
        1 => each(&mut layer, &[RX, RZ], &mut (0..n)),
        2 => {
            each(&mut layer, &[RX, RZ], &mut (0..n));
            ladder(&mut layer, CX);
        }
        3 | 4 => {
            each(&mut layer, &[RX, RZ], &mut (0..n));
            ladder(&mut layer, if id == 3 { CRZ } else { CRX });
        }
        5 | 6 => {
            each(&mut layer, &[RX, RZ], &mut (0..n));
            all_to_all(&mut layer, if id == 5 { CRZ } else { CRX });
            each(&mut layer, &[RX, RZ], &mut (0..n));
        }
        7 | 8 => {
            let k = if id == 7 { CRZ } else { CRX };
            each(&mut layer, &[RX, RZ], &mut (0..n));
            pairs(&mut layer, k, 0);
            each(&mut layer, &[RX, RZ], &mut (0..n));
            pairs(&mut layer, k, 1);
        }
        9 => {
            each(&mut layer, &[H], &mut (0..n));
            ladder(&mut layer, CZ);
            each(&mut layer, &[RX], &mut (0..n));
        }
        10 => {
            each(&mut layer, &[RY], &mut (0..n));
            ladder(&mut layer, CZ);
            if n > 2 {
                layer.push((CZ, vec![0, n - 1]));
            }
            each(&mut layer, &[RY], &mut (0..n));
        }
        11 | 12 => {
            let k = if id == 11 { CX } else { CZ };
            each(&mut layer, &[RY, RZ], &mut (0..n));
            pairs(&mut layer, k, 0);
            each(&mut layer, &[RY, RZ], &mut (1..n - 1));
            pairs(&mut layer, k, 1);
        }
        13 | 14 | 15 => {
            let k = match id {
                13 => CRZ,
                14 => CRX,
                _ => CX,
            };
            each(&mut layer, &[RY], &mut (0..n));
            ring(&mut layer, k);
            each(&mut layer, &[RY], &mut (0..n));
            ring_back(&mut layer, k);
        }
        16 | 17 => {
            let k = if id == 16 { CRZ } else { CRX };
            each(&mut layer, &[RX, RZ], &mut (0..n));
            pairs(&mut layer, k, 0);
            pairs(&mut layer, k, 1);
        }
        18 | 19 => {
            each(&mut layer, &[RX, RZ], &mut (0..n));
            ring(&mut layer, if id == 18 { CRZ } else { CRX });
        }
        _ => unreachable!("id range checked by caller"),
    }
    layer
}

/// Golden catalog files for the four-qubit, depth-1 templates.
pub const GOLDEN_CATALOG_4: [&str; NUM_ANSATZES] = [
    include_str!("../catalog/ansatz_01.txt"),
    include_str!("../catalog/ansatz_02.txt"),
    include_str!("../catalog/ansatz_03.txt"),
    include_str!("../catalog/ansatz_04.txt"),
    include_str!("../catalog/ansatz_05.txt"),
    include_str!("../catalog/ansatz_06.txt"),
    include_str!("../catalog/ansatz_07.txt"),
    include_str!("../catalog/ansatz_08.txt"),
    include_str!("../catalog/ansatz_09.txt"),
    include_str!("../catalog/ansatz_10.txt"),
    include_str!("../catalog/ansatz_11.txt"),
    include_str!("../catalog/ansatz_12.txt"),
    include_str!("../catalog/ansatz_13.txt"),
    include_str!("../catalog/ansatz_14.txt"),
    include_str!("../catalog/ansatz_15.txt"),
    include_str!("../catalog/ansatz_16.txt"),
    include_str!("../catalog/ansatz_17.txt"),
    include_str!("../catalog/ansatz_18.txt"),
    include_str!("../catalog/ansatz_19.txt"),
];
