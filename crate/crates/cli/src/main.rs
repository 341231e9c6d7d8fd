use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use twirlkit_core::metrics::{MetricsRecord, NormMode, DEFAULT_BINS, DEFAULT_SAMPLES};
use twirlkit_core::permgroup::{enumerate_subgroups, read_subgroups, sample_subgroups, write_subgroups};
use twirlkit_core::pipeline::{self, records_from_csv, SweepConfig};
use twirlkit_core::synth::{metrics_of, peephole, synthesize, synthesize_with_fallback, Circuit, SynthMode};
use twirlkit_core::{build_ansatz, twirl_ansatz, Permutation, Subgroup};

#[derive(Parser)]
#[command(name = "twirlkit", version, about = "Symmetrize circuit ansatzes over permutation subgroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate or sample subgroups of S_n
    Groups {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sample: bool,
        #[arg(long, default_value_t = 30)]
        max_per_order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the cache file here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print an ansatz from the catalog
    Catalog {
        #[arg(long)]
        id: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Twirl an ansatz and print its generators
    Twirl {
        #[command(flatten)]
        model: ModelArgs,
        /// Print every generator, not just the summary
        #[arg(long)]
        dump: bool,
    },
    /// Synthesize a twirled ansatz into a circuit
    Synth {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long)]
        no_peephole: bool,
        /// Print the instruction list
        #[arg(long)]
        dump: bool,
        /// Print size, depth, two-qubit count and growth ratio as JSON
        #[arg(long)]
        metrics: bool,
    },
    /// Compute all metrics for one cell
    Metrics {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long, value_enum, default_value_t = Norm::Matched)]
        norm_mode: Norm,
        #[arg(long)]
        no_peephole: bool,
    },
    /// Run a sweep described by a key=value config file
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Summarize a results.csv
    Report {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    ansatz: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// `trivial`, `full`, `alternating`, `gens:<perm>,<perm>`, a subgroup id,
    /// or a cache file (with --index)
    #[arg(long, default_value = "trivial")]
    subgroup: String,
    /// Line of the cache file to use
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Product,
    Exact,
    /// Product where possible, exact for non-commuting orbits
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Matched,
    Allpairs,
}

impl From<Norm> for NormMode {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Matched => NormMode::Matched,
            Norm::Allpairs => NormMode::Allpairs,
        }
    }
}

fn resolve_subgroup(spec: &str, n: usize, index: usize) -> Result<Subgroup> {
    let sub = match spec {
        "trivial" => Subgroup::trivial(n),
        "full" | "symmetric" => Subgroup::symmetric(n),
        "alternating" => Subgroup::alternating(n),
        _ => {
            if let Some(gens) = spec.strip_prefix("gens:") {
                let gens = gens
                    .split(',')
                    .map(|g| Permutation::parse_one_line(g.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Subgroup::generated_by(n, &gens)?
            } else if Path::new(spec).is_file() {
                let file = fs::File::open(spec).with_context(|| format!("opening {spec}"))?;
                let groups = read_subgroups(BufReader::new(file))?;
                let count = groups.len();
                groups
                    .into_iter()
                    .nth(index)
                    .with_context(|| format!("{spec} has {count} subgroups, no index {index}"))?
            } else {
                Subgroup::parse_id(spec).with_context(|| format!("'{spec}' is not a subgroup id or file"))?
            }
        }
    };
    if sub.n() != n {
        bail!("subgroup acts on {} points but --n is {n}", sub.n());
    }
    Ok(sub)
}

fn build_circuit(model: &ModelArgs, sub: &Subgroup, mode: Mode, optimize: bool) -> Result<Circuit> {
    let a = build_ansatz(model.ansatz, model.n, model.depth)?;
    let tw = twirl_ansatz(&a, sub)?;
    let c = match mode {
        Mode::Product => synthesize(model.n, &tw, SynthMode::Product)?,
        Mode::Exact => synthesize(model.n, &tw, SynthMode::Exact)?,
        Mode::Auto => synthesize_with_fallback(model.n, &tw)?.0,
    };
    Ok(if optimize { peephole(&c) } else { c })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Groups {
            n,
            sample,
            max_per_order,
            seed,
            out: path,
        } => {
            let groups = if sample {
                sample_subgroups(n, max_per_order, seed)?
            } else {
                enumerate_subgroups(n)?
            };
            match path {
                Some(p) => {
                    let file = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    write_subgroups(io::BufWriter::new(file), &groups)?;
                    eprintln!("wrote {} subgroups to {}", groups.len(), p.display());
                }
                None => write_subgroups(&mut out, &groups)?,
            }
        }
        Command::Catalog { id, n, depth } => {
            write!(out, "{}", build_ansatz(id, n, depth)?.to_catalog_text())?;
        }
        Command::Twirl { model, dump } => {
            let sub = resolve_subgroup(&model.subgroup, model.n, model.index)?;
            let a = build_ansatz(model.ansatz, model.n, model.depth)?;
            let tw = twirl_ansatz(&a, &sub)?;
            let commuting = tw.iter().filter(|t| t.commuting).count();
            writeln!(out, "# subgroup order {}: {}", sub.order(), sub.id())?;
            writeln!(out, "# {} gates, {} with commuting terms", tw.len(), commuting)?;
            if dump {
                for (k, t) in tw.iter().enumerate() {
                    writeln!(out, "{k} {} param={} {}", t.source.kind, t.param, t.twirled_generator)?;
                }
            }
        }
        Command::Synth {
            model,
            mode,
            no_peephole,
            dump,
            metrics,
        } => {
            let sub = resolve_subgroup(&model.subgroup, model.n, model.index)?;
            let c = build_circuit(&model, &sub, mode, !no_peephole)?;
            if dump {
                write!(out, "{}", c.dump())?;
            }
            if metrics {
                let json = if c.has_exact() {
                    serde_json::json!({
                        "size": null, "depth": null, "two_qubit_count": null, "growth_ratio": null,
                        "exact_blocks": c.exact_blocks().count(),
                    })
                } else {
                    let original = build_circuit(&model, &Subgroup::trivial(model.n), Mode::Auto, !no_peephole)?;
                    let m = metrics_of(&c).with_growth_against(&metrics_of(&original));
                    serde_json::json!({
                        "size": m.size, "depth": m.depth, "two_qubit_count": m.two_qubit_count,
                        "growth_ratio": m.growth_ratio,
                    })
                };
                writeln!(out, "{json}")?;
            }
            if !dump && !metrics {
                let m = metrics_of(&c);
                writeln!(
                    out,
                    "size {} depth {} two-qubit {} exact blocks {}",
                    m.size,
                    m.depth,
                    m.two_qubit_count,
                    c.exact_blocks().count()
                )?;
            }
        }
        Command::Metrics {
            model,
            seed,
            samples,
            bins,
            norm_mode,
            no_peephole,
        } => {
            let sub = resolve_subgroup(&model.subgroup, model.n, model.index)?;
            let cfg = SweepConfig {
                ansatzes: vec![model.ansatz],
                n: model.n,
                depths: vec![model.depth],
                norm_mode: norm_mode.into(),
                peephole: !no_peephole,
                seed,
                samples,
                bins,
                ..SweepConfig::default()
            };
            cfg.validate()?;
            let record: MetricsRecord = pipeline::evaluate_cell(&cfg, model.ansatz, model.depth, &sub)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&record)?)?;
        }
        Command::Sweep {
            config,
            resume,
            workers,
        } => {
            let mut cfg = SweepConfig::from_file(&config).with_context(|| format!("reading {}", config.display()))?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let outcome = pipeline::execute(&cfg, resume)?;
            eprintln!(
                "computed {} cells, reused {}; wrote {} and {}",
                outcome.computed,
                outcome.reused,
                cfg.csv_path().display(),
                cfg.json_path().display()
            );
        }
        Command::Report { csv, json } => {
            let text = fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let rep = pipeline::report(&records_from_csv(&text)?)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&rep)?)?;
            } else {
                write!(out, "{rep}")?;
            }
        }
    }
    Ok(())
}
