//! Generator-difference norms, expressibility against Haar, and
//! Meyer–Wallach entangling capability.
//!
//! Sampling is split into fixed-size chunks. Chunk `k` draws from the master
//! seed on ChaCha stream `k`, so results do not depend on the thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::AnsatzTemplate;
use crate::error::{Error, Result};
use crate::permgroup::Subgroup;
use crate::sim::{run, StateVector};
use crate::synth::Circuit;
use crate::twirl::twirl_generator;

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_BINS: usize = 75;

const CHUNK: usize = 250;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    #[default]
    Matched,
    Allpairs,
}

impl std::str::FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matched" => Ok(NormMode::Matched),
            "allpairs" => Ok(NormMode::Allpairs),
            _ => Err(Error::Config(format!("unknown norm mode '{s}'"))),
        }
    }
}

/// Average `‖G − T[G]‖` over the generators of one layer. Allpairs mode
/// averages `‖G_i − T[G_j]‖` over every ordered pair instead.
pub fn norm_metric(a: &AnsatzTemplate, sub: &Subgroup, mode: NormMode) -> Result<f64> {
    if a.n != sub.n() {
        return Err(Error::SizeMismatch {
            expected: sub.n(),
            found: a.n,
        });
    }
    let layer = a.first_layer();
    if layer.is_empty() {
        return Ok(0.0);
    }
    let twirled = layer
        .iter()
        .map(|g| twirl_generator(&g.generator, sub))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = match mode {
        NormMode::Matched => layer
            .iter()
            .zip(&twirled)
            .map(|(g, t)| (&g.generator - t).frobenius_norm())
            .sum::<f64>()
            / layer.len() as f64,
        NormMode::Allpairs => {
            let mut acc = 0.0;
            for g in layer {
                for t in &twirled {
                    acc += (&g.generator - t).frobenius_norm();
                }
            }
            acc / (layer.len() * layer.len()) as f64
        }
    };
    Ok(total)
}

/// `(N−1)(1−F)^{N−2}` with `N = 2^n`.
pub fn haar_pdf(f: f64, n: usize) -> f64 {
    let dim = 2f64.powi(n as i32);
    (dim - 1.0) * (1.0 - f).powf(dim - 2.0)
}

/// Natural log of the Haar probability mass on `[lo, hi]`.
fn haar_log_mass(lo: f64, hi: f64, n: usize) -> f64 {
    let m = 2f64.powi(n as i32) - 1.0;
    let (a, b) = (1.0 - lo, 1.0 - hi);
    if a <= 0.0 {
        return f64::NEG_INFINITY;
    }
    m * a.ln() + (-(b / a).powf(m)).ln_1p()
}

/// Haar probability mass of each of `bins` equal-width bins.
pub fn haar_bin_masses(n: usize, bins: usize) -> Vec<f64> {
    (0..bins)
        .map(|b| haar_log_mass(b as f64 / bins as f64, (b + 1) as f64 / bins as f64, n).exp())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FidelityHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl FidelityHistogram {
    pub fn new(bins: usize) -> Self {
        Self {
            counts: vec![0; bins],
            total: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `F = 1` lands in the top bin.
    pub fn bin_of(&self, f: f64) -> usize {
        let bins = self.counts.len();
        ((f * bins as f64).floor().max(0.0) as usize).min(bins - 1)
    }

    pub fn add(&mut self, f: f64) {
        let b = self.bin_of(f);
        self.counts[b] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &FidelityHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    /// `D_KL(P ‖ Q_Haar)` in nats.
    pub fn kl_vs_haar(&self, n: usize) -> f64 {
        let bins = self.counts.len() as f64;
        let total = self.total as f64;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(b, &c)| {
                let p = c as f64 / total;
                let log_q = haar_log_mass(b as f64 / bins, (b + 1) as f64 / bins, n);
                p * (p.ln() - log_q)
            })
            .sum()
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Runs `f(rng, count)` over `total` samples split into chunks, in parallel,
/// returning per-chunk results in chunk order.
fn sample_chunks<T, F>(total: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = CHUNK.min(total - k * CHUNK);
            f(&mut chunk_rng(seed, k), count)
        })
        .collect()
}

fn random_params(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}

pub fn fidelity_histogram(c: &Circuit, n_pairs: usize, bins: usize, seed: u64) -> Result<FidelityHistogram> {
    if bins == 0 || n_pairs == 0 {
        return Err(Error::Config("expressibility needs at least one pair and one bin".into()));
    }
    let parts = sample_chunks(n_pairs, seed, |rng, count| {
        let mut h = FidelityHistogram::new(bins);
        for _ in 0..count {
            let a = run(c, &random_params(rng, c.num_params))?;
            let b = run(c, &random_params(rng, c.num_params))?;
            h.add(a.fidelity(&b));
        }
        Ok(h)
    })?;
    let mut hist = FidelityHistogram::new(bins);
    for p in &parts {
        hist.merge(p);
    }
    Ok(hist)
}

/// KL divergence of the sampled fidelity distribution from Haar; larger
/// means less expressive.
pub fn expressibility(c: &Circuit, n_pairs: usize, bins: usize, seed: u64) -> Result<f64> {
    Ok(fidelity_histogram(c, n_pairs, bins, seed)?.kl_vs_haar(c.n))
}

/// Rounding can push the mean purity of a product state just above 1.
fn mw_term(psi: &StateVector) -> f64 {
    (1.0 - psi.mean_purity()).max(0.0)
}

fn mw_average(parts: Vec<f64>, total: usize) -> f64 {
    2.0 * parts.into_iter().sum::<f64>() / total as f64
}

/// Meyer–Wallach `Q` averaged over uniformly drawn parameters.
pub fn entangling_capability(c: &Circuit, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::Config("entangling capability needs at least one sample".into()));
    }
    let parts = sample_chunks(n_samples, seed, |rng, count| {
        let mut acc = 0.0;
        for _ in 0..count {
            acc += mw_term(&run(c, &random_params(rng, c.num_params))?);
        }
        Ok(acc)
    })?;
    Ok(mw_average(parts, n_samples))
}

/// A Haar-random pure state from normalized complex Gaussians.
pub fn haar_state<R: Rng>(n: usize, rng: &mut R) -> Result<StateVector> {
    let dim = 1usize << n;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps)
}

/// Meyer–Wallach `Q` averaged over Haar-random states.
pub fn haar_entanglement(n: usize, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::Config("entangling capability needs at least one sample".into()));
    }
    let parts = sample_chunks(n_samples, seed, |rng, count| {
        let mut acc = 0.0;
        for _ in 0..count {
            acc += mw_term(&haar_state(n, rng)?);
        }
        Ok(acc)
    })?;
    Ok(mw_average(parts, n_samples))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub ansatz: usize,
    pub n: usize,
    pub depth: usize,
    pub subgroup_id: String,
    pub subgroup_order: usize,
    pub seed: u64,
    pub status: String,
    pub norm_metric: f64,
    pub size: Option<usize>,
    pub depth_metric: Option<usize>,
    pub two_qubit_count: Option<usize>,
    pub growth_ratio: Option<f64>,
    pub expressibility_dkl: Option<f64>,
    pub entangling_q: Option<f64>,
    pub commuting_fraction: f64,
}
