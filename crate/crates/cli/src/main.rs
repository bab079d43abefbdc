use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use elf_core::costmodel::{predict_uniform, write_prediction_csv, PredictionInput, PredictionSummary};
use elf_core::datagen::{domain_sizes, gen_query_batch, gen_relation, read_queries_csv, write_queries_csv};
use elf_core::elf::{search_into, structural_census, write_census_csv};
use elf_core::eval::{
    emit_report, preset, preset_checks, run_build_phase, run_search_phase, verify_oracle,
    EvalReport, ExampleConfig, ExperimentConfig, MachineInfo, DESK_SCALE, PRESETS,
};
use elf_core::{build_linear, LinearElf, Relation, SearchStats};

#[derive(Parser)]
#[command(name = "elf", version, about = "Elf index, visit cost model and evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a relation and a query batch from an example config (JSON).
    Gen {
        config: PathBuf,
        /// Output directory for relation.csv, relation.csv.json and queries.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Build an Elf from a relation CSV and write a binary dump.
    Build {
        relation: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the per-depth structural census as CSV.
        #[arg(long)]
        census: Option<PathBuf>,
    },
    /// Run a query batch against an Elf dump; prints summed stats as JSON.
    Search {
        elf: PathBuf,
        queries: PathBuf,
        /// Write matches as `query,tid` rows.
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Predict per-depth visits for one query from a JSON input with
    /// `n_tuples`, `cardinalities` and `selectivities`.
    Predict {
        input: PathBuf,
        /// CSV destination; stdout if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// JSON summary destination; stderr if omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run a preset or an experiment config and check its criteria.
    Bench {
        /// Preset name or path to an experiment config (JSON).
        target: String,
        /// Size factor for presets.
        #[arg(long, default_value_t = DESK_SCALE)]
        scale: f64,
        /// Assert time regressions (only when the machine is quiet).
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of timed repetitions.
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Compare Elf search against a linear scan on random relations.
    Verify {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 3)]
        queries: usize,
        #[arg(long, default_value_t = 5000)]
        max_rows: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Gen { config, out } => gen(&config, &out).map(|_| true),
        Command::Build { relation, out, census } => build(&relation, &out, census.as_deref()).map(|_| true),
        Command::Search { elf, queries, results } => search(&elf, &queries, results.as_deref()).map(|_| true),
        Command::Predict { input, out, summary } => predict(&input, out.as_deref(), summary.as_deref()).map(|_| true),
        Command::Bench {
            target,
            scale,
            timing,
            seed,
            out,
            reps,
        } => bench(&target, scale, timing, seed, out.as_deref(), reps),
        Command::Verify {
            cases,
            queries,
            max_rows,
            seed,
        } => {
            let r = verify_oracle(cases, queries, max_rows, seed)?;
            println!(
                "{} queries over {} relations: {} matches, {} mismatching",
                r.queries,
                r.relations,
                r.matches,
                r.mismatches.len()
            );
            for (case, q) in &r.mismatches {
                println!("mismatch: relation {case}, query {q}");
            }
            Ok(r.passed())
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn gen(config: &Path, out: &Path) -> Result<()> {
    let cfg: ExampleConfig = read_json(config)?;
    cfg.validate()?;
    fs::create_dir_all(out)?;
    let rel = gen_relation(&cfg.columns, cfg.rows, cfg.seed)?;
    let rel_path = out.join("relation.csv");
    rel.save(&rel_path)?;
    let domains = domain_sizes(&cfg.columns, cfg.rows)?;
    let queries = gen_query_batch(&cfg.queries, &domains)?;
    write_queries_csv(&queries, create(&out.join("queries.csv"))?)?;
    println!("wrote {} tuples and {} queries to {}", rel.len(), queries.len(), out.display());
    Ok(())
}

fn build(relation: &Path, out: &Path, census: Option<&Path>) -> Result<()> {
    let rel = Relation::load(relation).with_context(|| format!("loading {}", relation.display()))?;
    let start = Instant::now();
    let elf = build_linear(&rel)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    elf.write_to(create(out)?)?;
    if let Some(path) = census {
        write_census_csv(&structural_census(&elf), create(path)?)?;
    }
    println!(
        "built {} dims, {} tuples, {} words in {ms:.1} ms",
        elf.dims(),
        rel.len(),
        elf.word_count()
    );
    Ok(())
}

fn search(elf: &Path, queries: &Path, results: Option<&Path>) -> Result<()> {
    let file = File::open(elf).with_context(|| format!("opening {}", elf.display()))?;
    let elf = LinearElf::read_from(BufReader::new(file))?;
    let file = File::open(queries).with_context(|| format!("opening {}", queries.display()))?;
    let queries = read_queries_csv(BufReader::new(file))?;
    let mut stats = SearchStats::new(elf.dims());
    let mut out = Vec::new();
    let mut sink = results.map(create).transpose()?;
    if let Some(w) = sink.as_mut() {
        writeln!(w, "query,tid")?;
    }
    let mut matches = 0;
    let start = Instant::now();
    for (i, q) in queries.iter().enumerate() {
        out.clear();
        search_into(&elf, q, &mut out, &mut stats).with_context(|| format!("query {i}"))?;
        matches += out.len();
        if let Some(w) = sink.as_mut() {
            for tid in &out {
                writeln!(w, "{i},{tid}")?;
            }
        }
    }
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let summary = serde_json::json!({
        "queries": queries.len(),
        "matches": matches,
        "total_visits": stats.total_visits(),
        "elapsed_ms": elapsed_ms,
        "stats": stats,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn predict(input: &Path, out: Option<&Path>, summary: Option<&Path>) -> Result<()> {
    let input: PredictionInput = read_json(input)?;
    let pred = predict_uniform(&input)?;
    match out {
        Some(path) => write_prediction_csv(&pred, create(path)?)?,
        None => write_prediction_csv(&pred, io::stdout().lock())?,
    }
    let text = serde_json::to_string_pretty(&PredictionSummary::from(&pred))?;
    match summary {
        Some(path) => fs::write(path, text + "\n")?,
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn bench(
    target: &str,
    scale: f64,
    timing: bool,
    seed: u64,
    out: Option<&Path>,
    reps: Option<usize>,
) -> Result<bool> {
    let mut cfg = if PRESETS.contains(&target) {
        preset(target, scale, seed)?
    } else if Path::new(target).is_file() {
        ExperimentConfig::from_json(&fs::read_to_string(target)?)?
    } else {
        bail!("{target:?} is neither a preset ({}) nor a config file", PRESETS.join(", "));
    };
    if let Some(r) = reps {
        cfg.repetitions = r;
    }
    let machine = MachineInfo::detect();
    let timing_mode = timing && machine.is_quiet();
    if timing && !timing_mode {
        eprintln!("note: machine is busy (load {:?}), time checks are informational", machine.load_1m);
    }
    eprintln!("{}: building {} examples", cfg.name, cfg.examples.len());
    let examples = run_build_phase(&cfg.examples)?;
    eprintln!("{}: timing {} repetitions", cfg.name, cfg.repetitions);
    let phase = run_search_phase(&examples, cfg.repetitions)?;
    let checks = preset_checks(&cfg.name, &examples, &phase.measurements, timing_mode)?;
    let report = EvalReport::new(&cfg, phase.measurements, checks, timing_mode, machine);
    if let Some(m) = &report.visits {
        println!("visits: R2 {:.4}, MAPE {:.4}, c_v {:.4}", m.r_squared, m.mape, m.cv);
    }
    if let Some(fit) = &report.fit_t_v {
        println!("time: t = {:.4e} v + {:.3} ms, R2 {:.4}", fit.a, fit.b, fit.r_squared);
    }
    for c in &report.checks {
        let status = match (c.passed, c.asserted) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        println!("{status} {} = {:.4} ({})", c.name, c.value, c.condition);
    }
    if let Some(dir) = out {
        let (csv, json) = emit_report(&report, dir)?;
        println!("wrote {} and {}", csv.display(), json.display());
    }
    Ok(report.all_asserted_pass())
}
