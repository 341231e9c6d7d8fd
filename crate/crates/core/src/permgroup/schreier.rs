//! Incremental Schreier–Sims, used to size random subgroups of `S_n`
//! without materializing them.

use std::collections::HashMap;

use super::Permutation;

type Transversal = HashMap<usize, Permutation>;

fn orbit_transversal(n: usize, gens: &[Permutation], base: usize) -> Transversal {
    let mut tr = HashMap::from([(base, Permutation::identity(n))]);
    let mut queue = vec![base];
    while let Some(p) = queue.pop() {
        let up = tr[&p].clone();
        for g in gens {
            let q = g.apply(p);
            if let std::collections::hash_map::Entry::Vacant(e) = tr.entry(q) {
                e.insert(g.compose_unchecked(&up));
                queue.push(q);
            }
        }
    }
    tr
}

/// Sifts `g` through levels `from..`. Returns the residue and the index of
/// the level where sifting failed, or `base.len()` if it passed every level.
fn strip(
    mut g: Permutation,
    base: &[usize],
    transversals: &[Transversal],
    from: usize,
) -> (Permutation, usize) {
    for i in from..base.len() {
        let beta = g.apply(base[i]);
        if beta == base[i] {
            continue;
        }
        match transversals[i].get(&beta) {
            None => return (g, i),
            Some(u) => g = u.inverse().compose_unchecked(&g),
        }
    }
    (g, base.len())
}

/// Order of the group generated by `gens` (all of degree `n`).
pub fn group_order(n: usize, gens: &[Permutation]) -> u128 {
    let gens: Vec<Permutation> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    if gens.is_empty() {
        return 1;
    }

    let mut base: Vec<usize> = Vec::new();
    for g in &gens {
        if base.iter().all(|&b| g.apply(b) == b) {
            base.push((0..n).find(|&i| g.apply(i) != i).unwrap());
        }
    }
    // distr[i]: strong generators fixing base[..i]
    let mut distr: Vec<Vec<Permutation>> = (0..base.len())
        .map(|i| {
            gens.iter()
                .filter(|g| base[..i].iter().all(|&b| g.apply(b) == b))
                .cloned()
                .collect()
        })
        .collect();
    let mut transversals: Vec<Transversal> = (0..base.len())
        .map(|i| orbit_transversal(n, &distr[i], base[i]))
        .collect();

    let mut level = base.len() as isize - 1;
    'outer: while level >= 0 {
        let i = level as usize;
        let entries: Vec<(usize, Permutation)> =
            transversals[i].iter().map(|(k, v)| (*k, v.clone())).collect();
        for (beta, u_beta) in entries {
            for gen in distr[i].clone() {
                let gb = gen.apply(beta);
                let u1 = &transversals[i][&gb];
                let g1 = gen.compose_unchecked(&u_beta);
                if &g1 == u1 {
                    continue;
                }
                let schreier_gen = u1.inverse().compose_unchecked(&g1);
                let (h, failed_at) = strip(schreier_gen, &base, &transversals, i + 1);
                let mut extend_to = failed_at;
                if failed_at == base.len() {
                    if h.is_identity() {
                        continue;
                    }
                    base.push((0..n).find(|&p| h.apply(p) != p).unwrap());
                    distr.push(Vec::new());
                    transversals.push(HashMap::new());
                    extend_to = base.len() - 1;
                }
                for l in i + 1..=extend_to {
                    distr[l].push(h.clone());
                    transversals[l] = orbit_transversal(n, &distr[l], base[l]);
                }
                level = extend_to as isize;
                continue 'outer;
            }
        }
        level -= 1;
    }

    transversals.iter().map(|t| t.len() as u128).product()
}
