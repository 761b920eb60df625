use std::collections::{HashMap, HashSet};
use std::env;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use e2ls_bench::experiment::{
    preset_cutoff, run_experiment, ExperimentConfig, NamedInstance, Overrides, PRESETS,
};
use e2ls_bench::family::{read_labels, write_family, FamilySpec};
use e2ls_bench::records::{read_records, Record, RecordWriter, RunLine};
use e2ls_bench::stats::{
    aggregate, compare, render_comparison, render_csv, render_table, AggregateRow,
};
use e2ls_bench::validate::validate_records;
use e2ls_bench::{instance_name, load_instance, CliError};
use e2ls_core::oracle::brute_force;
use e2ls_core::search::solve;
use e2ls_core::{Instance, ProblemKind};

const OUT_DIR_ENV: &str = "E2LS_OUT_DIR";
const DEFAULT_RECORDS: &str = "e2ls-records.jsonl";

#[derive(Parser)]
#[command(
    name = "e2ls",
    version,
    about = "Local search for set-union knapsack and budgeted maximum coverage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver once on one instance.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Append the run record to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run several seeded runs per instance and aggregate them.
    Bench {
        #[arg(required = true)]
        instances: Vec<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Cutoff preset: set-I, set-II, set-III, set-A, set-B or set-C.
        #[arg(long)]
        preset: Option<String>,
        /// Records file (appended). Defaults to e2ls-records.jsonl in $E2LS_OUT_DIR or the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Records file of another configuration to compare against.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Write random instances of a family, e.g. `sukp m=100 n=100 alpha=0.10 beta=0.75`.
    Generate {
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory. Defaults to $E2LS_OUT_DIR or the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by exhaustive enumeration (at most 25 items).
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        kind: Option<ProblemKind>,
    },
    /// Aggregate statistics from records files.
    Aggregate {
        #[arg(required = true)]
        records: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Better/equal/worse counts of the first records file against the second.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check records against instance files, and grouped files against their labels.
    Validate {
        #[arg(long)]
        records: Option<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        instances: Vec<PathBuf>,
        #[arg(long)]
        kind: Option<ProblemKind>,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Problem kind; required for dense files, checked against canonical headers.
    #[arg(long)]
    kind: Option<ProblemKind>,
    /// Time limit per run in seconds.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Seed of the (first) run.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Greedy sample count.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    r_num: Option<usize>,
    #[arg(long)]
    a_num: Option<usize>,
    /// Tabu bit-vector length.
    #[arg(long)]
    tabu_len: Option<u64>,
    /// Stop after this many local-search iterations.
    #[arg(long)]
    max_iterations: Option<u64>,
    /// Stop as soon as this objective value is reached.
    #[arg(long)]
    target: Option<u64>,
}

impl SolverArgs {
    fn overrides(&self, preset: Option<&str>) -> Result<Overrides, CliError> {
        let preset_cut = match preset {
            Some(p) => Some(preset_cutoff(p).ok_or_else(|| {
                let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
                CliError::Usage(format!(
                    "unknown preset `{p}` (expected one of {})",
                    names.join(", ")
                ))
            })?),
            None => None,
        };
        Ok(Overrides {
            t: self.t,
            r_num: self.r_num,
            a_num: self.a_num,
            tabu_len: self.tabu_len,
            cutoff_seconds: self.cutoff.or(preset_cut),
            max_iterations: self.max_iterations,
            target: self.target,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Records,
}

fn out_dir() -> PathBuf {
    env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn print(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn join(items: &[usize]) -> String {
    items
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_rows(rows: &[AggregateRow], runs: &[&RunLine], format: Format) -> String {
    match format {
        Format::Table => render_table(rows),
        Format::Csv => render_csv(rows),
        Format::Records => runs
            .iter()
            .map(|r| Record::Run((*r).clone()).to_line() + "\n")
            .collect(),
    }
}

fn cmd_solve(
    path: &Path,
    solver: &SolverArgs,
    out: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let inst = load_instance(path, solver.kind)?;
    let name = instance_name(path);
    let params = solver.overrides(None)?.params_for(&inst, solver.seed);
    params.validate()?;
    let record = solve(&inst, &params)?;
    let line = RunLine::new(&name, &inst, 0, record);
    if let Some(out) = out {
        RecordWriter::append(out)?.write(&Record::Run(line.clone()))?;
    }
    let text = match format {
        Format::Table => format!(
            "instance        {}\nkind            {}\nbest_value      {}\nsolution        {}\nconstraint      {} / {}\ntime_to_best_s  {:.6}\nelapsed_s       {:.3}\niterations      {}\nrestarts        {}\nseed            {}\n",
            line.instance,
            line.kind,
            line.best_value,
            join(&line.best_solution),
            line.constraint_value,
            inst.capacity(),
            line.time_to_best_s,
            line.elapsed_s,
            line.iterations,
            line.restarts,
            line.seed,
        ),
        Format::Csv => format!(
            "instance,kind,seed,best_value,constraint_value,time_to_best_s,elapsed_s,iterations,restarts,solution\n{},{},{},{},{},{},{},{},{},{}\n",
            line.instance,
            line.kind,
            line.seed,
            line.best_value,
            line.constraint_value,
            line.time_to_best_s,
            line.elapsed_s,
            line.iterations,
            line.restarts,
            join(&line.best_solution),
        ),
        Format::Records => Record::Run(line).to_line() + "\n",
    };
    print(&text)
}

fn load_named(
    paths: &[PathBuf],
    kind: Option<ProblemKind>,
) -> Result<Vec<NamedInstance>, CliError> {
    let mut names = HashSet::new();
    paths
        .iter()
        .map(|p| {
            let name = instance_name(p);
            if !names.insert(name.clone()) {
                return Err(CliError::Usage(format!("two instances are named `{name}`")));
            }
            Ok(NamedInstance::new(name, load_instance(p, kind)?))
        })
        .collect()
}

fn aggregate_records(records: &[Record]) -> (Vec<AggregateRow>, Vec<&RunLine>) {
    let runs: Vec<&RunLine> = records.iter().filter_map(Record::as_run).collect();
    (aggregate(runs.iter().copied()), runs)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    paths: &[PathBuf],
    solver: &SolverArgs,
    runs: usize,
    workers: usize,
    preset: Option<&str>,
    out: Option<PathBuf>,
    format: Format,
    other: Option<&Path>,
) -> Result<(), CliError> {
    let mut config = ExperimentConfig::new(load_named(paths, solver.kind)?);
    config.runs = runs;
    config.workers = workers;
    config.base_seed = solver.seed;
    config.overrides = solver.overrides(preset)?;
    config.validate()?;
    let theirs = other.map(read_records).transpose()?;
    let out = out.unwrap_or_else(|| out_dir().join(DEFAULT_RECORDS));
    let mut writer = RecordWriter::append(&out)?;
    let mut write_err = None;
    let records = run_experiment(&config, |r| {
        if write_err.is_none() {
            write_err = writer.write(r).err();
        }
        if let Record::Failure(f) = r {
            eprintln!("e2ls: {} run {} failed: {}", f.instance, f.run, f.error);
        }
    });
    if let Some(e) = write_err {
        return Err(e);
    }
    let (rows, run_lines) = aggregate_records(&records);
    let mut text = render_rows(&rows, &run_lines, format);
    if let Some(theirs) = theirs {
        let (their_rows, _) = aggregate_records(&theirs);
        text.push('\n');
        text.push_str(&render_comparison(&compare(&rows, &their_rows)));
    }
    print(&text)?;
    let failures = records.len() - run_lines.len();
    if failures > 0 {
        return Err(CliError::Solver(format!(
            "{failures} of {} runs failed",
            records.len()
        )));
    }
    Ok(())
}

fn cmd_generate(
    spec: &[String],
    count: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let spec = FamilySpec::parse(spec)?;
    let dir = out.unwrap_or_else(out_dir);
    let written = write_family(&spec, count, seed, &dir)?;
    let mut text = String::new();
    for (path, e) in &written {
        text.push_str(&format!(
            "{}  seed={} alpha={:.4} total_weight={} total_value={} capacity={}\n",
            path.display(),
            e.seed,
            e.stats.alpha,
            e.stats.total_weight,
            e.stats.total_value,
            e.capacity
        ));
    }
    print(&text)
}

fn cmd_oracle(path: &Path, kind: Option<ProblemKind>) -> Result<(), CliError> {
    let inst = load_instance(path, kind)?;
    let best = brute_force(&inst)?;
    print(&format!(
        "optimum     {}\nsolution    {}\nconstraint  {} / {}\n",
        best.objective,
        join(&best.items),
        best.constraint,
        inst.capacity()
    ))
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<Record>, CliError> {
    let mut all = Vec::new();
    for p in paths {
        all.extend(read_records(p)?);
    }
    Ok(all)
}

fn cmd_aggregate(paths: &[PathBuf], format: Format) -> Result<(), CliError> {
    let records = read_all(paths)?;
    let (rows, runs) = aggregate_records(&records);
    print(&render_rows(&rows, &runs, format))
}

fn cmd_compare(first: &Path, second: &Path, format: Format) -> Result<(), CliError> {
    let (a, _) = aggregate_records(&read_records(first)?);
    let (b, _) = aggregate_records(&read_records(second)?);
    let cmp = compare(&a, &b);
    let text = match format {
        Format::Table => render_comparison(&cmp),
        Format::Csv => format!(
            "metric,better,equal,worse\nbest,{},{},{}\nmean,{},{},{}\n",
            cmp.best.wins,
            cmp.best.ties,
            cmp.best.losses,
            cmp.mean.wins,
            cmp.mean.ties,
            cmp.mean.losses
        ),
        Format::Records => serde_json::to_string(&cmp).expect("comparison serializes") + "\n",
    };
    print(&text)
}

fn cmd_validate(
    records: Option<&Path>,
    paths: &[PathBuf],
    kind: Option<ProblemKind>,
) -> Result<(), CliError> {
    let mut instances: Vec<(String, Instance)> = Vec::new();
    let mut problems = Vec::new();
    for p in paths {
        let inst = load_instance(p, kind)?;
        let text = fs::read_to_string(p).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        })?;
        if let Some(labels) = read_labels(&text) {
            if !labels.respects(&inst) {
                problems.push(format!(
                    "{}: coverage crosses group boundaries",
                    p.display()
                ));
            }
        }
        instances.push((instance_name(p), inst));
    }
    let mut checked = 0;
    if let Some(records) = records {
        let map: HashMap<String, &Instance> =
            instances.iter().map(|(n, i)| (n.clone(), i)).collect();
        let report = validate_records(&read_records(records)?, &map);
        checked = report.checked;
        problems.extend(
            report
                .violations
                .iter()
                .map(|v| format!("record {} ({}): {}", v.record + 1, v.instance, v.problem)),
        );
    }
    let mut text = format!(
        "instances {}\nrecords   {checked}\nproblems  {}\n",
        instances.len(),
        problems.len()
    );
    for p in &problems {
        text.push_str(p);
        text.push('\n');
    }
    print(&text)?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Solver(format!(
            "validation found {} problems",
            problems.len()
        )))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            instance,
            solver,
            out,
            format,
        } => cmd_solve(&instance, &solver, out.as_deref(), format),
        Command::Bench {
            instances,
            solver,
            runs,
            workers,
            preset,
            out,
            format,
            compare,
        } => cmd_bench(
            &instances,
            &solver,
            runs,
            workers,
            preset.as_deref(),
            out,
            format,
            compare.as_deref(),
        ),
        Command::Generate {
            spec,
            count,
            seed,
            out,
        } => cmd_generate(&spec, count, seed, out),
        Command::Oracle { instance, kind } => cmd_oracle(&instance, kind),
        Command::Aggregate { records, format } => cmd_aggregate(&records, format),
        Command::Compare {
            first,
            second,
            format,
        } => cmd_compare(&first, &second, format),
        Command::Validate {
            records,
            instances,
            kind,
        } => cmd_validate(records.as_deref(), &instances, kind),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("e2ls: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
