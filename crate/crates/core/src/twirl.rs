//! Group averaging of generators: `T[G] = (1/|H|) Σ_{s∈H} U_s G U_s†`.
//!
//! Each Pauli string is pushed through every subgroup element symbolically.
//! Orbit hits are counted as integers first and turned into a coefficient
//! with a single division, so two subgroups that produce the same orbit
//! multiplicities yield bit-identical operators.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::catalog::{AnsatzTemplate, GateDef, Param};
use crate::error::{Error, Result};
use crate::pauli::{HermitianOp, Pauli};
use crate::permgroup::Subgroup;
use crate::rep::conjugate_letters;

pub fn twirl_generator(g: &HermitianOp, sub: &Subgroup) -> Result<HermitianOp> {
    if g.n() != sub.n() {
        return Err(Error::SizeMismatch {
            expected: sub.n(),
            found: g.n(),
        });
    }
    let order = sub.order() as f64;
    let mut acc: BTreeMap<Vec<Pauli>, f64> = BTreeMap::new();
    for term in g.terms() {
        let mut hits: HashMap<Vec<Pauli>, usize> = HashMap::new();
        for s in sub.elements() {
            *hits.entry(conjugate_letters(s, &term.letters)).or_insert(0) += 1;
        }
        for (letters, count) in hits {
            *acc.entry(letters).or_insert(0.0) += term.coeff * (count as f64 / order);
        }
    }
    Ok(HermitianOp::from_sorted_map(g.n(), acc))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwirledGate {
    pub source: GateDef,
    pub twirled_generator: HermitianOp,
    pub param: Param,
    /// All terms of the twirled generator pairwise commute.
    pub commuting: bool,
}

impl TwirledGate {
    /// The untwirled gate, as produced by the trivial subgroup.
    pub fn identity(source: &GateDef) -> Self {
        Self {
            source: source.clone(),
            twirled_generator: source.generator.clone(),
            param: source.param,
            commuting: source.generator.is_commuting(),
        }
    }

    /// The twirl left the generator exactly as it was.
    pub fn is_unchanged(&self) -> bool {
        self.twirled_generator == self.source.generator
    }
}

/// One twirled gate per source gate, in order, sharing the source parameters.
pub fn twirl_ansatz(a: &AnsatzTemplate, sub: &Subgroup) -> Result<Vec<TwirledGate>> {
    if a.n != sub.n() {
        return Err(Error::SizeMismatch {
            expected: sub.n(),
            found: a.n,
        });
    }
    let mut cache: HashMap<String, HermitianOp> = HashMap::new();
    a.gates
        .iter()
        .map(|g| {
            let key = g.generator.to_string();
            let twirled = match cache.get(&key) {
                Some(t) => t.clone(),
                None => {
                    let t = twirl_generator(&g.generator, sub)?;
                    cache.insert(key, t.clone());
                    t
                }
            };
            Ok(TwirledGate {
                source: g.clone(),
                commuting: twirled.is_commuting(),
                twirled_generator: twirled,
                param: g.param,
            })
        })
        .collect()
}
