use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{all_permutations, close, factorial, group_order, Permutation, Subgroup};
use crate::error::{Error, Result};

/// Exhaustive enumeration is supported up to `S_5` (120 elements fit a `u128` mask).
pub const MAX_EXHAUSTIVE_N: usize = 5;
/// Random generator sets tried per call when sampling `S_n` for `n > 5`.
pub const SAMPLE_ATTEMPTS: usize = 10_000;

/// `S_n` with a full multiplication table, elements indexed in
/// lexicographic order.
struct SymmetricTable {
    elements: Vec<Permutation>,
    mult: Vec<Vec<u8>>,
}

impl SymmetricTable {
    fn new(n: usize) -> Self {
        let elements = all_permutations(n);
        let index: HashMap<&Permutation, u8> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i as u8))
            .collect();
        let mult = elements
            .iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| index[&a.compose_unchecked(b)])
                    .collect()
            })
            .collect();
        Self { elements, mult }
    }

    fn closure(&self, gens: &[u8]) -> u128 {
        let mut mask: u128 = 1; // identity is index 0
        let mut queue = vec![0u8];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mult[g as usize][x as usize];
                if mask & (1u128 << y) == 0 {
                    mask |= 1u128 << y;
                    queue.push(y);
                }
            }
        }
        mask
    }

    fn subgroup(&self, n: usize, mask: u128) -> Subgroup {
        Subgroup::from_closed_set(
            n,
            (0..self.elements.len())
                .filter(|i| mask & (1u128 << i) != 0)
                .map(|i| self.elements[i].clone()),
        )
    }
}

/// Every subgroup of `S_n`, `1 ≤ n ≤ 5`, sorted by `(order, id)`.
///
/// Starts from the cyclic subgroups and repeatedly joins each newly found
/// subgroup with one more element until no new subgroup appears.
pub fn enumerate_subgroups(n: usize) -> Result<Vec<Subgroup>> {
    if !(1..=MAX_EXHAUSTIVE_N).contains(&n) {
        return Err(Error::UnsupportedSize {
            n,
            min: 1,
            max: MAX_EXHAUSTIVE_N,
        });
    }
    let table = SymmetricTable::new(n);
    let size = table.elements.len();

    let mut found: HashMap<u128, Vec<u8>> = HashMap::new();
    let mut frontier: Vec<u128> = Vec::new();
    for g in 0..size as u8 {
        let mask = table.closure(&[g]);
        if let std::collections::hash_map::Entry::Vacant(e) = found.entry(mask) {
            e.insert(vec![g]);
            frontier.push(mask);
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for mask in frontier {
            let gens = found[&mask].clone();
            for g in 0..size as u8 {
                if mask & (1u128 << g) != 0 {
                    continue;
                }
                let mut joined_gens = gens.clone();
                joined_gens.push(g);
                let joined = table.closure(&joined_gens);
                if let std::collections::hash_map::Entry::Vacant(e) = found.entry(joined) {
                    e.insert(joined_gens);
                    next.push(joined);
                }
            }
        }
        frontier = next;
    }

    let mut groups: Vec<Subgroup> = found.keys().map(|&m| table.subgroup(n, m)).collect();
    sort_groups(&mut groups);
    Ok(groups)
}

/// At most `max_per_order` distinct subgroups of each order, deterministic
/// for a fixed `seed`.
///
/// For `n ≤ 5` the exhaustive list is thinned per order with a seeded
/// shuffle. For larger `n`, random 1–3 element generator sets are closed,
/// sized with Schreier–Sims, and bucketed by order.
pub fn sample_subgroups(n: usize, max_per_order: usize, seed: u64) -> Result<Vec<Subgroup>> {
    if !(3..=9).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 3, max: 9 });
    }
    if max_per_order == 0 {
        return Err(Error::Config("max_per_order must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if n <= MAX_EXHAUSTIVE_N {
        let mut by_order: BTreeMap<usize, Vec<Subgroup>> = BTreeMap::new();
        for g in enumerate_subgroups(n)? {
            by_order.entry(g.order()).or_default().push(g);
        }
        let mut out = Vec::new();
        for (_, mut bucket) in by_order {
            if bucket.len() > max_per_order {
                bucket.shuffle(&mut rng);
                bucket.truncate(max_per_order);
            }
            out.extend(bucket);
        }
        sort_groups(&mut out);
        return Ok(out);
    }

    let full = factorial(n);
    let mut buckets: BTreeMap<usize, Vec<Subgroup>> = BTreeMap::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut points: Vec<usize> = (0..n).collect();
    for _ in 0..SAMPLE_ATTEMPTS {
        let k = rng.random_range(1..=3);
        let gens: Vec<Permutation> = (0..k)
            .map(|_| {
                points.shuffle(&mut rng);
                Permutation::new(points.clone()).expect("shuffle is a bijection")
            })
            .collect();
        let order = group_order(n, &gens) as usize;
        if buckets.get(&order).is_some_and(|b| b.len() >= max_per_order) {
            continue;
        }
        let group = if order == full {
            Subgroup::symmetric(n)
        } else if order == full / 2 {
            // the unique index-2 subgroup
            Subgroup::alternating(n)
        } else {
            Subgroup::from_closed_set(n, close(n, &gens, None).expect("unbounded closure"))
        };
        if seen.insert(group.id().to_owned()) {
            buckets.entry(order).or_default().push(group);
        }
    }
    let mut out: Vec<Subgroup> = buckets.into_values().flatten().collect();
    sort_groups(&mut out);
    Ok(out)
}

fn sort_groups(groups: &mut [Subgroup]) {
    groups.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.id().cmp(b.id())));
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Independent oracle: close every 1-, 2- and 3-element generator set.
    fn brute_force_subgroup_ids(n: usize) -> BTreeSet<String> {
        let all = all_permutations(n);
        let mut ids = BTreeSet::new();
        let m = all.len();
        for a in 0..m {
            for b in a..m {
                for c in b..m {
                    let gens = [all[a].clone(), all[b].clone(), all[c].clone()];
                    let set = close(n, &gens, None).unwrap();
                    ids.insert(Subgroup::from_closed_set(n, set).id().to_owned());
                }
            }
        }
        ids
    }

    fn orders(groups: &[Subgroup]) -> Vec<usize> {
        groups.iter().map(Subgroup::order).collect()
    }

    #[test]
    fn s3_matches_oracle() {
        let groups = enumerate_subgroups(3).unwrap();
        assert_eq!(orders(&groups), [1, 2, 2, 2, 3, 6]);
        let ids: BTreeSet<String> = groups.iter().map(|g| g.id().to_owned()).collect();
        assert_eq!(ids, brute_force_subgroup_ids(3));
    }

    #[test]
    fn s4_matches_oracle() {
        let groups = enumerate_subgroups(4).unwrap();
        assert_eq!(groups.len(), 30);
        let distinct: BTreeSet<usize> = orders(&groups).into_iter().collect();
        assert_eq!(distinct, BTreeSet::from([1, 2, 3, 4, 6, 8, 12, 24]));
        let ids: BTreeSet<String> = groups.iter().map(|g| g.id().to_owned()).collect();
        assert_eq!(ids, brute_force_subgroup_ids(4));
    }

    #[test]
    fn s5_has_156_subgroups() {
        let groups = enumerate_subgroups(5).unwrap();
        assert_eq!(groups.len(), 156);
        let distinct: BTreeSet<usize> = orders(&groups).into_iter().collect();
        assert_eq!(
            distinct,
            BTreeSet::from([1, 2, 3, 4, 5, 6, 8, 10, 12, 20, 24, 60, 120])
        );
    }

    #[test]
    fn small_degrees() {
        assert_eq!(enumerate_subgroups(1).unwrap().len(), 1);
        assert_eq!(enumerate_subgroups(2).unwrap().len(), 2);
        assert!(enumerate_subgroups(0).is_err());
        assert!(enumerate_subgroups(6).is_err());
    }

    #[test]
    fn sorted_by_order_then_id() {
        let groups = enumerate_subgroups(4).unwrap();
        for w in groups.windows(2) {
            assert!((w[0].order(), w[0].id()) < (w[1].order(), w[1].id()));
        }
    }

    #[test]
    fn sampling_s4_returns_everything() {
        let all = enumerate_subgroups(4).unwrap();
        for seed in [0, 1, 99] {
            assert_eq!(sample_subgroups(4, 30, seed).unwrap(), all);
        }
    }

    #[test]
    fn sampling_caps_per_order() {
        let groups = sample_subgroups(5, 2, 3).unwrap();
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for g in &groups {
            *counts.entry(g.order()).or_default() += 1;
        }
        assert!(counts.values().all(|&c| c <= 2));
        assert_eq!(counts.len(), 13);
    }

    #[test]
    fn sampling_s6_is_deterministic_and_closed() {
        let a = sample_subgroups(6, 3, 11).unwrap();
        let b = sample_subgroups(6, 3, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().any(|g| g.order() == 720));
        for g in &a {
            assert_eq!(720 % g.order(), 0);
            let e = g.elements();
            for x in e.iter().step_by(7) {
                for y in e.iter().step_by(5) {
                    assert!(g.contains(&x.compose(y).unwrap()));
                }
            }
        }
    }

    #[test]
    fn sampling_range_checks() {
        assert!(sample_subgroups(2, 30, 0).is_err());
        assert!(sample_subgroups(10, 30, 0).is_err());
        assert!(sample_subgroups(4, 0, 0).is_err());
    }
}
