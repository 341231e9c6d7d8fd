//! Sweeps over ansatz × subgroup × depth cells, CSV/JSON output and the
//! summary report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::catalog::{build_ansatz, NUM_ANSATZES};
use crate::error::{Error, Result};
use crate::metrics::{
    entangling_capability, expressibility, norm_metric, MetricsRecord, NormMode, DEFAULT_BINS, DEFAULT_SAMPLES,
};
use crate::permgroup::{enumerate_subgroups, factorial, read_subgroups, sample_subgroups, Subgroup};
use crate::synth::{metrics_of, peephole, synthesize_with_fallback, Circuit};
use crate::twirl::twirl_ansatz;

pub const CSV_HEADER: &str = "ansatz,n,depth,subgroup_id,subgroup_order,seed,status,norm_metric,size,depth_metric,\
two_qubit,growth_ratio,expressibility,entanglement,commuting_fraction";

pub const STATUS_OK: &str = "ok";
pub const STATUS_EXACT: &str = "exact_fallback";

/// Entanglement drops larger than this count as exceptions in the report.
pub const ENTANGLEMENT_SLACK: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub enum SubgroupSource {
    Enumerate,
    Sample { per_order: usize },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub ansatzes: Vec<usize>,
    pub n: usize,
    pub depths: Vec<usize>,
    pub subgroups: SubgroupSource,
    pub norm_mode: NormMode,
    pub expressibility: bool,
    pub entanglement: bool,
    pub peephole: bool,
    pub seed: u64,
    pub samples: usize,
    pub bins: usize,
    pub output_dir: PathBuf,
    /// 0 means one worker per core.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ansatzes: (1..=NUM_ANSATZES).collect(),
            n: 4,
            depths: vec![1],
            subgroups: SubgroupSource::Enumerate,
            norm_mode: NormMode::Matched,
            expressibility: true,
            entanglement: true,
            peephole: true,
            seed: 0,
            samples: DEFAULT_SAMPLES,
            bins: DEFAULT_BINS,
            output_dir: PathBuf::from("."),
            workers: 0,
        }
    }
}

fn parse_list(value: &str, line: usize) -> Result<Vec<usize>> {
    if value == "all" {
        return Ok((1..=NUM_ANSATZES).collect());
    }
    let mut out = BTreeSet::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(line, format!("bad number '{s}'")))
        };
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(Error::parse(line, format!("empty range '{part}'")));
                }
                out.extend(lo..=hi);
            }
            None => {
                out.insert(num(part)?);
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn parse_bool(value: &str, line: usize) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::parse(line, format!("expected a boolean, got '{value}'"))),
    }
}

impl SweepConfig {
    /// Parses `key = value` lines; `#` starts a comment. Relative paths are
    /// resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = SweepConfig {
            output_dir: base_dir.to_path_buf(),
            ..SweepConfig::default()
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::parse(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let number = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| Error::parse(line, format!("bad number '{v}' for {key}")))
            };
            match key {
                "ansatzes" => cfg.ansatzes = parse_list(value, line)?,
                "n" => cfg.n = number(value)? as usize,
                "depths" => cfg.depths = parse_list(value, line)?,
                "subgroups" => {
                    cfg.subgroups = match value {
                        "enumerate" => SubgroupSource::Enumerate,
                        "sample" => SubgroupSource::Sample { per_order: 5 },
                        _ => match value.strip_prefix("file:") {
                            Some(p) => SubgroupSource::File(base_dir.join(p.trim())),
                            None => return Err(Error::parse(line, format!("unknown subgroup source '{value}'"))),
                        },
                    }
                }
                "sample_per_order" => {
                    let k = number(value)? as usize;
                    match &mut cfg.subgroups {
                        SubgroupSource::Sample { per_order } => *per_order = k,
                        _ => return Err(Error::parse(line, "sample_per_order needs subgroups = sample first")),
                    }
                }
                "norm_mode" => cfg.norm_mode = value.parse().map_err(|_| Error::parse(line, "bad norm_mode"))?,
                "expressibility" => cfg.expressibility = parse_bool(value, line)?,
                "entanglement" => cfg.entanglement = parse_bool(value, line)?,
                "peephole" => cfg.peephole = parse_bool(value, line)?,
                "seed" => cfg.seed = number(value)?,
                "samples" => cfg.samples = number(value)? as usize,
                "bins" => cfg.bins = number(value)? as usize,
                "output_dir" => cfg.output_dir = base_dir.join(value),
                "workers" => cfg.workers = number(value)? as usize,
                _ => return Err(Error::parse(line, format!("unknown key '{key}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ansatzes.is_empty() || self.depths.is_empty() {
            return Err(Error::Config("ansatz and depth lists must be non-empty".into()));
        }
        if let Some(&bad) = self.ansatzes.iter().find(|&&a| a == 0 || a > NUM_ANSATZES) {
            return Err(Error::UnknownAnsatz(bad));
        }
        if self.depths.contains(&0) {
            return Err(Error::Config("depths must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::Config("n must be at least 2".into()));
        }
        if (self.expressibility || self.entanglement) && (self.samples == 0 || self.bins == 0) {
            return Err(Error::Config("samples and bins must be positive".into()));
        }
        if let SubgroupSource::Sample { per_order: 0 } = self.subgroups {
            return Err(Error::Config("sample_per_order must be positive".into()));
        }
        Ok(())
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output_dir.join("results.csv")
    }

    pub fn json_path(&self) -> PathBuf {
        self.output_dir.join("results.json")
    }

    pub fn load_subgroups(&self) -> Result<Vec<Subgroup>> {
        let groups = match &self.subgroups {
            SubgroupSource::Enumerate => enumerate_subgroups(self.n)?,
            SubgroupSource::Sample { per_order } => sample_subgroups(self.n, *per_order, self.seed)?,
            SubgroupSource::File(p) => read_subgroups(std::io::BufReader::new(fs::File::open(p)?))?,
        };
        if let Some(g) = groups.iter().find(|g| g.n() != self.n) {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: g.n(),
            });
        }
        Ok(groups)
    }
}

/// Stable per-cell seed, independent of scheduling.
pub fn cell_seed(master: u64, ansatz: usize, subgroup_id: &str, depth: usize) -> u64 {
    derive_seed(&format!("{master}|{ansatz}|{subgroup_id}|{depth}"))
}

fn derive_seed(key: &str) -> u64 {
    let digest = Sha256::digest(key.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

fn synthesize_model(cfg: &SweepConfig, ansatz: usize, depth: usize, sub: &Subgroup) -> Result<(Circuit, usize, f64)> {
    let a = build_ansatz(ansatz, cfg.n, depth)?;
    let tw = twirl_ansatz(&a, sub)?;
    let commuting = tw.iter().filter(|t| t.commuting).count() as f64 / tw.len().max(1) as f64;
    let (c, fallbacks) = synthesize_with_fallback(cfg.n, &tw)?;
    let c = if cfg.peephole { peephole(&c) } else { c };
    Ok((c, fallbacks, commuting))
}

pub fn evaluate_cell(cfg: &SweepConfig, ansatz: usize, depth: usize, sub: &Subgroup) -> Result<MetricsRecord> {
    let seed = cell_seed(cfg.seed, ansatz, sub.id(), depth);
    let (circuit, fallbacks, commuting_fraction) = synthesize_model(cfg, ansatz, depth, sub)?;
    let (original, _, _) = synthesize_model(cfg, ansatz, depth, &Subgroup::trivial(cfg.n))?;
    let circuit_metrics = (fallbacks == 0).then(|| metrics_of(&circuit).with_growth_against(&metrics_of(&original)));
    let norm = norm_metric(&build_ansatz(ansatz, cfg.n, 1)?, sub, cfg.norm_mode)?;
    let expr = if cfg.expressibility {
        Some(expressibility(&circuit, cfg.samples, cfg.bins, seed)?)
    } else {
        None
    };
    let ent = if cfg.entanglement {
        Some(entangling_capability(&circuit, cfg.samples, derive_seed(&format!("{seed}|entanglement")))?)
    } else {
        None
    };
    Ok(MetricsRecord {
        ansatz,
        n: cfg.n,
        depth,
        subgroup_id: sub.id().to_string(),
        subgroup_order: sub.order(),
        seed,
        status: if fallbacks == 0 { STATUS_OK } else { STATUS_EXACT }.to_string(),
        norm_metric: norm,
        size: circuit_metrics.map(|m| m.size),
        depth_metric: circuit_metrics.map(|m| m.depth),
        two_qubit_count: circuit_metrics.map(|m| m.two_qubit_count),
        growth_ratio: circuit_metrics.and_then(|m| m.growth_ratio),
        expressibility_dkl: expr,
        entangling_q: ent,
        commuting_fraction,
    })
}

fn sort_records(records: &mut [MetricsRecord]) {
    records.sort_by(|a, b| {
        (a.ansatz, a.depth, a.subgroup_order, &a.subgroup_id).cmp(&(b.ansatz, b.depth, b.subgroup_order, &b.subgroup_id))
    });
}

fn cell_key(r: &MetricsRecord) -> (usize, usize, String) {
    (r.ansatz, r.depth, r.subgroup_id.clone())
}

/// Computes every cell not already in `existing` and returns the union,
/// sorted by (ansatz, depth, subgroup order, subgroup id).
pub fn run_sweep_with(cfg: &SweepConfig, existing: &[MetricsRecord]) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    let groups = cfg.load_subgroups()?;
    let done: BTreeSet<_> = existing.iter().map(cell_key).collect();
    let mut cells = Vec::new();
    for &a in &cfg.ansatzes {
        for &d in &cfg.depths {
            for g in &groups {
                if !done.contains(&(a, d, g.id().to_string())) {
                    cells.push((a, d, g));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let fresh: Vec<MetricsRecord> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(a, d, g)| evaluate_cell(cfg, a, d, g))
            .collect::<Result<_>>()
    })?;
    let mut all: Vec<MetricsRecord> = existing.to_vec();
    all.extend(fresh);
    sort_records(&mut all);
    Ok(all)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MetricsRecord>> {
    run_sweep_with(cfg, &[])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOutcome {
    pub computed: usize,
    pub reused: usize,
}

/// Runs the sweep and writes `results.csv` and `results.json` into the
/// output directory. With `resume`, cells already in the CSV are kept.
pub fn execute(cfg: &SweepConfig, resume: bool) -> Result<SweepOutcome> {
    let csv_path = cfg.csv_path();
    let existing = if resume && csv_path.exists() {
        records_from_csv(&fs::read_to_string(&csv_path)?)?
    } else {
        Vec::new()
    };
    let records = run_sweep_with(cfg, &existing)?;
    fs::create_dir_all(&cfg.output_dir)?;
    fs::write(&csv_path, records_to_csv(&records))?;
    fs::write(cfg.json_path(), serde_json::to_string_pretty(&records)?)?;
    Ok(SweepOutcome {
        computed: records.len() - existing.len(),
        reused: existing.len(),
    })
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn record_to_csv_row(r: &MetricsRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.ansatz,
        r.n,
        r.depth,
        r.subgroup_id,
        r.subgroup_order,
        r.seed,
        r.status,
        r.norm_metric,
        opt(&r.size),
        opt(&r.depth_metric),
        opt(&r.two_qubit_count),
        opt(&r.growth_ratio),
        opt(&r.expressibility_dkl),
        opt(&r.entangling_q),
        r.commuting_fraction
    )
}

pub fn records_to_csv(records: &[MetricsRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_to_csv_row(r));
        out.push('\n');
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<MetricsRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::parse(1, "missing or unexpected CSV header")),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 15 {
            return Err(Error::parse(line_no, format!("expected 15 fields, found {}", f.len())));
        }
        fn req<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
            s.parse().map_err(|_| Error::parse(line, format!("bad {what} '{s}'")))
        }
        fn optional<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<Option<T>> {
            if s.is_empty() {
                Ok(None)
            } else {
                req(s, line, what).map(Some)
            }
        }
        out.push(MetricsRecord {
            ansatz: req(f[0], line_no, "ansatz")?,
            n: req(f[1], line_no, "n")?,
            depth: req(f[2], line_no, "depth")?,
            subgroup_id: f[3].to_string(),
            subgroup_order: req(f[4], line_no, "subgroup_order")?,
            seed: req(f[5], line_no, "seed")?,
            status: f[6].to_string(),
            norm_metric: req(f[7], line_no, "norm_metric")?,
            size: optional(f[8], line_no, "size")?,
            depth_metric: optional(f[9], line_no, "depth_metric")?,
            two_qubit_count: optional(f[10], line_no, "two_qubit")?,
            growth_ratio: optional(f[11], line_no, "growth_ratio")?,
            expressibility_dkl: optional(f[12], line_no, "expressibility")?,
            entangling_q: optional(f[13], line_no, "entanglement")?,
            commuting_fraction: req(f[14], line_no, "commuting_fraction")?,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnsatzSummary {
    pub ansatz: usize,
    pub depth: usize,
    pub median_growth: Option<f64>,
    pub max_growth: Option<f64>,
    /// Circuit size of the index-2 subgroup equals that of the full group.
    /// `None` when either size is unavailable.
    pub half_equals_full_size: Option<bool>,
    pub expressibility_original: Option<f64>,
    pub expressibility_full: Option<f64>,
    /// Mean D_KL per order never decreases as the order grows.
    pub expressibility_monotone: Option<bool>,
    pub entanglement_original: Option<f64>,
    pub entanglement_full: Option<f64>,
    /// Pairs of orders `(a, b)` with `a < b` whose mean sizes shrink.
    pub non_monotone_sizes: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub n: usize,
    pub cells: usize,
    pub median_growth: Option<f64>,
    pub max_growth: Option<f64>,
    pub entanglement_exceptions: Vec<usize>,
    pub ansatzes: Vec<AnsatzSummary>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

fn mean_by_order<F: Fn(&MetricsRecord) -> Option<f64>>(rows: &[&MetricsRecord], f: F) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in rows {
        if let Some(v) = f(r) {
            let e = acc.entry(r.subgroup_order).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
}

fn single_at(rows: &[&MetricsRecord], order: usize, f: impl Fn(&MetricsRecord) -> Option<f64>) -> Option<f64> {
    mean_by_order(rows, f).get(&order).copied()
}

/// Per-ansatz growth, expressibility and entanglement summaries. The
/// original model is the order-1 cell; the full group has order `n!`.
pub fn report(records: &[MetricsRecord]) -> Result<Report> {
    let first = records.first().ok_or_else(|| Error::Config("no records to report".into()))?;
    let n = first.n;
    let full = factorial(n);
    let mut by_cell: BTreeMap<(usize, usize), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        by_cell.entry((r.ansatz, r.depth)).or_default().push(r);
    }
    let growth = |rows: &[&MetricsRecord]| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.subgroup_order > 1)
            .filter_map(|r| r.growth_ratio)
            .collect()
    };
    let mut summaries = Vec::new();
    let mut exceptions = BTreeSet::new();
    for (&(ansatz, depth), rows) in &by_cell {
        let g = growth(rows);
        let max_growth = g.iter().copied().reduce(f64::max);
        let size = |r: &MetricsRecord| r.size.map(|s| s as f64);
        let sizes = mean_by_order(rows, size);
        let half_equals_full_size = match (sizes.get(&(full / 2)), sizes.get(&full)) {
            (Some(a), Some(b)) if full >= 2 => Some(a == b),
            _ => None,
        };
        let mut non_monotone_sizes = Vec::new();
        let orders: Vec<(&usize, &f64)> = sizes.iter().collect();
        for w in orders.windows(2) {
            if w[1].1 < w[0].1 {
                non_monotone_sizes.push((*w[0].0, *w[1].0));
            }
        }
        let expr = mean_by_order(rows, |r| r.expressibility_dkl);
        let expressibility_monotone = (expr.len() >= 2).then(|| expr.values().collect::<Vec<_>>().windows(2).all(|w| w[1] >= w[0]));
        let ent_orig = single_at(rows, 1, |r| r.entangling_q);
        let ent_full = single_at(rows, full, |r| r.entangling_q);
        if let (Some(o), Some(f)) = (ent_orig, ent_full) {
            if f < o - ENTANGLEMENT_SLACK {
                exceptions.insert(ansatz);
            }
        }
        summaries.push(AnsatzSummary {
            ansatz,
            depth,
            median_growth: median(g),
            max_growth,
            half_equals_full_size,
            expressibility_original: expr.get(&1).copied(),
            expressibility_full: expr.get(&full).copied(),
            expressibility_monotone,
            entanglement_original: ent_orig,
            entanglement_full: ent_full,
            non_monotone_sizes,
        });
    }
    let all_growth: Vec<f64> = by_cell.values().flat_map(|rows| growth(rows)).collect();
    Ok(Report {
        n,
        cells: records.len(),
        max_growth: all_growth.iter().copied().reduce(f64::max),
        median_growth: median(all_growth),
        entanglement_exceptions: exceptions.into_iter().collect(),
        ansatzes: summaries,
    })
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_else(|| "n/a".into())
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cells: {} (n = {})", self.cells, self.n)?;
        writeln!(
            f,
            "growth over non-trivial subgroups: median {}x, max {}x",
            fmt_opt(self.median_growth, 2),
            fmt_opt(self.max_growth, 2)
        )?;
        let exc: Vec<String> = self.entanglement_exceptions.iter().map(|a| a.to_string()).collect();
        writeln!(f, "entanglement decreases under the full group: [{}]", exc.join(", "))?;
        writeln!(
            f,
            "ansatz depth  med.growth  max.growth  half=full  expr.orig  expr.full  monotone  ent.orig  ent.full  non-monotone sizes"
        )?;
        for s in &self.ansatzes {
            let mut nm = String::new();
            for (a, b) in &s.non_monotone_sizes {
                let _ = write!(nm, "{a}>{b} ");
            }
            writeln!(
                f,
                "{:>6} {:>5}  {:>10}  {:>10}  {:>9}  {:>9}  {:>9}  {:>8}  {:>8}  {:>8}  {}",
                s.ansatz,
                s.depth,
                fmt_opt(s.median_growth, 2),
                fmt_opt(s.max_growth, 2),
                s.half_equals_full_size.map_or("n/a".to_string(), |b| b.to_string()),
                fmt_opt(s.expressibility_original, 4),
                fmt_opt(s.expressibility_full, 4),
                s.expressibility_monotone.map_or("n/a".to_string(), |b| b.to_string()),
                fmt_opt(s.entanglement_original, 4),
                fmt_opt(s.entanglement_full, 4),
                nm.trim_end()
            )?;
        }
        Ok(())
    }
}
