//! Permutations of qubit positions and subgroups of the symmetric group.
//!
//! A [`Permutation`] stores its one-line form: `mapping[i]` is the position
//! qubit `i` is sent to. Composition follows function composition,
//! `p.compose(q)(i) = p(q(i))`.

mod enumerate;
mod schreier;

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

pub use enumerate::{enumerate_subgroups, sample_subgroups, MAX_EXHAUSTIVE_N, SAMPLE_ATTEMPTS};
pub use schreier::group_order;

/// Largest qubit count a permutation may act on.
pub const MAX_DEGREE: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<u8>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::InvalidPermutation(format!(
                "degree {n} outside 1..={MAX_DEGREE}"
            )));
        }
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidPermutation(format!(
                    "{mapping:?} is not a bijection on 0..{n}"
                )));
            }
            seen[m] = true;
        }
        Ok(Self {
            mapping: mapping.into_iter().map(|m| m as u8).collect(),
        })
    }

    pub(crate) fn from_raw(mapping: Vec<u8>) -> Self {
        debug_assert!(!mapping.is_empty());
        Self { mapping }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n as u8).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1], &[2, 3]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut mapping: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::InvalidPermutation(format!(
                        "cycles {cycles:?} are not disjoint cycles on 0..{n}"
                    )));
                }
                touched[a] = true;
                mapping[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Self::new(mapping)
    }

    pub fn degree(&self) -> usize {
        self.mapping.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i] as usize
    }

    pub fn mapping(&self) -> Vec<usize> {
        self.mapping.iter().map(|&m| m as usize).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::SizeMismatch {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            mapping: other
                .mapping
                .iter()
                .map(|&i| self.mapping[i as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.degree()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m as usize] = i as u8;
        }
        Permutation { mapping: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m as usize)
    }

    pub fn is_even(&self) -> bool {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.apply(i);
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 0
    }

    /// One-line notation: digits for degree ≤ 10, comma separated otherwise.
    pub fn one_line(&self) -> String {
        if self.degree() <= 10 {
            self.mapping
                .iter()
                .map(|&m| char::from(b'0' + m))
                .collect()
        } else {
            self.mapping
                .iter()
                .map(|m| m.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    pub fn parse_one_line(s: &str) -> Result<Self> {
        let s = s.trim();
        let mapping: Option<Vec<usize>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
        };
        match mapping {
            Some(m) => Self::new(m),
            None => Err(Error::InvalidPermutation(format!(
                "`{s}` is not one-line notation"
            ))),
        }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.apply(i);
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation; the identity prints as `(1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "(1)");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]", self.one_line())
    }
}

/// A subgroup of `S_n`, stored as its sorted element list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    n: usize,
    elements: Vec<Permutation>,
    id: String,
}

impl Subgroup {
    /// Validates closure and builds the canonical form.
    pub fn from_elements(n: usize, elements: Vec<Permutation>) -> Result<Self> {
        if let Some(p) = elements.iter().find(|p| p.degree() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: p.degree(),
            });
        }
        let set: HashSet<Permutation> = elements.iter().cloned().collect();
        if !set.contains(&Permutation::identity(n)) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        // Greedy generating set: an element joins the generators only when
        // the closure so far misses it. The final closure must be the set.
        let mut gens: Vec<Permutation> = Vec::new();
        let mut closure: HashSet<Permutation> = HashSet::from([Permutation::identity(n)]);
        for p in &elements {
            if !closure.contains(p) {
                gens.push(p.clone());
                closure = close(n, &gens, Some(set.len()))
                    .ok_or_else(|| Error::NotASubgroup("set is not closed".into()))?;
            }
        }
        if closure.len() != set.len() || !closure.iter().all(|p| set.contains(p)) {
            return Err(Error::NotASubgroup("set is not closed".into()));
        }
        Ok(Self::from_closed_set(n, closure))
    }

    /// The subgroup generated by `gens`.
    pub fn generated_by(n: usize, gens: &[Permutation]) -> Result<Self> {
        if let Some(p) = gens.iter().find(|p| p.degree() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: p.degree(),
            });
        }
        let set = close(n, gens, None).expect("unbounded closure");
        Ok(Self::from_closed_set(n, set))
    }

    pub(crate) fn from_closed_set(n: usize, set: impl IntoIterator<Item = Permutation>) -> Self {
        let mut elements: Vec<Permutation> = set.into_iter().collect();
        elements.sort();
        elements.dedup();
        let id = elements
            .iter()
            .map(Permutation::one_line)
            .collect::<Vec<_>>()
            .join(";");
        Self { n, elements, id }
    }

    pub fn trivial(n: usize) -> Self {
        Self::from_closed_set(n, [Permutation::identity(n)])
    }

    pub fn symmetric(n: usize) -> Self {
        Self::from_closed_set(n, all_permutations(n))
    }

    pub fn alternating(n: usize) -> Self {
        Self::from_closed_set(n, all_permutations(n).into_iter().filter(|p| p.is_even()))
    }

    /// Parses a canonical id (one-line permutations joined with `;`).
    pub fn parse_id(id: &str) -> Result<Self> {
        let elements = id
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(Permutation::parse_one_line)
            .collect::<Result<Vec<_>>>()?;
        let n = elements
            .first()
            .map(Permutation::degree)
            .ok_or_else(|| Error::NotASubgroup("empty element list".into()))?;
        Self::from_elements(n, elements)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Cache-file line: `order=<k>; elems=<p>|<p>|…`.
    pub fn to_cache_line(&self) -> String {
        let elems = self
            .elements
            .iter()
            .map(Permutation::one_line)
            .collect::<Vec<_>>()
            .join("|");
        format!("order={}; elems={}", self.order(), elems)
    }

    pub fn from_cache_line(line: &str) -> Result<Self> {
        let (order_part, elems_part) = line
            .split_once(';')
            .ok_or_else(|| Error::parse(0, "expected `order=<k>; elems=<...>`"))?;
        let order: usize = order_part
            .trim()
            .strip_prefix("order=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(0, "bad `order=` field"))?;
        let elems = elems_part
            .trim()
            .strip_prefix("elems=")
            .ok_or_else(|| Error::parse(0, "missing `elems=` field"))?;
        let elements = elems
            .split('|')
            .map(Permutation::parse_one_line)
            .collect::<Result<Vec<_>>>()?;
        let n = elements.first().map(Permutation::degree).unwrap_or(0);
        let sub = Self::from_elements(n, elements)?;
        if sub.order() != order {
            return Err(Error::parse(
                0,
                format!("declared order {order} but found {}", sub.order()),
            ));
        }
        Ok(sub)
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup")
            .field("n", &self.n)
            .field("order", &self.order())
            .field("id", &self.id)
            .finish()
    }
}

impl FromStr for Subgroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_id(s)
    }
}

pub fn write_subgroups<W: Write>(mut out: W, groups: &[Subgroup]) -> Result<()> {
    for g in groups {
        writeln!(out, "{}", g.to_cache_line())?;
    }
    Ok(())
}

pub fn read_subgroups<R: BufRead>(input: R) -> Result<Vec<Subgroup>> {
    let mut out = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(Subgroup::from_cache_line(line).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::parse(k + 1, msg),
            other => Error::parse(k + 1, other.to_string()),
        })?);
    }
    Ok(out)
}

/// Closure of `gens` under composition. Returns `None` if the closure
/// grows past `limit` elements.
pub(crate) fn close(
    n: usize,
    gens: &[Permutation],
    limit: Option<usize>,
) -> Option<HashSet<Permutation>> {
    let id = Permutation::identity(n);
    let mut set = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(x) = queue.pop() {
        for g in gens {
            let y = g.compose_unchecked(&x);
            if !set.contains(&y) {
                set.insert(y.clone());
                if limit.is_some_and(|l| set.len() > l) {
                    return None;
                }
                queue.push(y);
            }
        }
    }
    Some(set)
}

/// All `n!` permutations in lexicographic order of their one-line form.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(Permutation::from_raw(current.clone()));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}
