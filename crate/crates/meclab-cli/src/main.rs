//! `meclab` command line: equivalence-class counting, intervention-result
//! iteration, experiment design, graph generation, brute-force references and
//! a timing harness.
//!
//! Exit codes: 0 success, 2 invalid input (parse errors, contract violations,
//! unwritable output), 3 internal invariant violation (always a bug).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use meclab::count::mec_count;
use meclab::design::{active_best_target, passive_best_set, CostModel, Objective};
use meclab::gen::{gen_chordal, GenSpec};
use meclab::lazyiter::lazy_iter;
use meclab::oracle;
use meclab::orient::eager_iter;
use meclab::{Error, NodeSet, ObjectiveValue, PdGraph};

const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "meclab",
    version,
    about = "Equivalence-class counting and intervention design on chordal graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the DAGs in the equivalence class of a graph.
    Count { graph: PathBuf },
    /// List all intervention results for a target node of a UCCG.
    Iter {
        graph: PathBuf,
        /// Intervention target.
        #[arg(long)]
        node: usize,
    },
    /// Pick the optimal single-node intervention target.
    Active {
        graph: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
    },
    /// Pick the optimal budgeted set of single-node interventions.
    Passive {
        graph: PathBuf,
        #[arg(long)]
        budget: u64,
        /// Cost file ("node cost" per line); absent nodes cost 1.
        #[arg(long)]
        costs: Option<PathBuf>,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
    },
    /// Generate seeded random connected chordal graphs.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
        /// Emit this many graphs (seeds seed, seed+1, ...) to numbered files.
        #[arg(long)]
        count: Option<usize>,
        /// Output directory for --count mode.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force reference computations (small graphs only).
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Timing harness; writes one CSV row per timed run.
    Bench {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        seed: u64,
        /// Number of generated graphs (seeds seed, seed+1, ...).
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Class size by exhaustive enumeration.
    Count { graph: PathBuf },
    /// Best single target by exhaustive evaluation.
    Active {
        graph: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
    },
    /// Worst-case value of a fixed target set.
    Value {
        graph: PathBuf,
        /// Comma-separated node indices; empty for no targets.
        #[arg(long, default_value = "")]
        targets: String,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
    },
    /// Number of member DAGs.
    Members { graph: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Worst-case equivalence-class size (minimized).
    Mec,
    /// Worst-case directed-edge count (maximized).
    Edges,
}

impl From<ObjectiveArg> for Objective {
    fn from(arg: ObjectiveArg) -> Objective {
        match arg {
            ObjectiveArg::Mec => Objective::MecSize,
            ObjectiveArg::Edges => Objective::Edges,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    /// Lazy iteration vs. eager per-clique baseline, over all roots.
    Lazyiter,
    /// Class-size computation; cross-checked against the oracle on small n.
    Count,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID_INPUT,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::invalid(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Count { graph } => {
            let g = load_graph(&graph)?;
            println!("{}", mec_count(&g)?);
        }
        Command::Iter { graph, node } => {
            let g = load_graph(&graph)?;
            for r in lazy_iter(&g, node)? {
                println!(
                    "P={} directed={} components={}",
                    r.parents,
                    r.graph.directed_edge_count(),
                    r.graph.chain_components().len()
                );
            }
        }
        Command::Active { graph, objective } => {
            let g = load_graph(&graph)?;
            let (node, value) = active_best_target(&g, objective.into())?;
            println!("node={node} {}", format_value(&value));
        }
        Command::Passive {
            graph,
            budget,
            costs,
            objective,
        } => {
            let g = load_graph(&graph)?;
            let model = match costs {
                Some(path) => {
                    let text = read_file(&path)?;
                    CostModel::parse(&text, g.n(), budget)?
                }
                None => CostModel::uniform(g.n(), budget),
            };
            let (targets, value) = passive_best_set(&g, &model, objective.into())?;
            println!("targets={targets} {}", format_value(&value));
        }
        Command::Gen {
            nodes,
            density,
            seed,
            count,
            out,
        } => run_gen(nodes, density, seed, count, out)?,
        Command::Oracle { command } => run_oracle(command)?,
        Command::Bench {
            suite,
            nodes,
            density,
            seed,
            reps,
            csv,
        } => run_bench(suite, nodes, density, seed, reps, &csv)?,
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<PdGraph, CliError> {
    Ok(PdGraph::parse(&read_file(path)?)?)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

fn format_value(value: &ObjectiveValue) -> String {
    match value {
        ObjectiveValue::MecSize(c) => format!("worst_mec_size={c}"),
        ObjectiveValue::Edges(e) => format!("worst_directed={e}"),
    }
}

fn oracle_cap() -> Result<usize, CliError> {
    match std::env::var("MECLAB_ORACLE_CAP") {
        Ok(raw) => raw
            .parse()
            .map_err(|_| CliError::invalid(format!("invalid MECLAB_ORACLE_CAP {raw:?}"))),
        Err(_) => Ok(oracle::DEFAULT_ORACLE_CAP),
    }
}

fn parse_targets(raw: &str, g: &PdGraph) -> Result<NodeSet, CliError> {
    let mut targets = NodeSet::empty();
    for token in raw.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let node: usize = token
            .parse()
            .map_err(|_| CliError::invalid(format!("invalid target node {token:?}")))?;
        if !g.verts().contains(node) {
            return Err(CliError::invalid(format!(
                "target node {node} out of range (n={})",
                g.n()
            )));
        }
        targets.insert(node);
    }
    Ok(targets)
}

fn run_gen(
    nodes: usize,
    density: f64,
    seed: u64,
    count: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let base = GenSpec {
        n: nodes,
        density,
        seed,
    };
    if base.clamped() {
        eprintln!(
            "note: density {density} asks for {} edges; clamped to {} for connectivity",
            base.requested_edges(),
            base.target_edges()
        );
    }
    match (count, out) {
        (None, None) => {
            let g = gen_chordal(&base)?;
            print!("{}", g.to_text());
        }
        (Some(_), None) => return Err(CliError::invalid("--count requires --out")),
        (count, Some(dir)) => {
            let k = count.unwrap_or(1);
            std::fs::create_dir_all(&dir)
                .map_err(|e| CliError::invalid(format!("cannot create {}: {e}", dir.display())))?;
            for i in 0..k {
                let spec = GenSpec {
                    seed: seed + i as u64,
                    ..base
                };
                let g = gen_chordal(&spec)?;
                let path = dir.join(format!("graph_{i:03}.graph"));
                std::fs::write(&path, g.to_text()).map_err(|e| {
                    CliError::invalid(format!("cannot write {}: {e}", path.display()))
                })?;
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn run_oracle(command: OracleCommand) -> Result<(), CliError> {
    let cap = oracle_cap()?;
    match command {
        OracleCommand::Count { graph } => {
            let g = load_graph(&graph)?;
            println!("{}", oracle::oracle_count(&g, cap)?);
        }
        OracleCommand::Active { graph, objective } => {
            let g = load_graph(&graph)?;
            let (node, value) = oracle::oracle_active(&g, objective.into(), cap)?;
            println!("node={node} {}", format_value(&value));
        }
        OracleCommand::Value {
            graph,
            targets,
            objective,
        } => {
            let g = load_graph(&graph)?;
            let t = parse_targets(&targets, &g)?;
            let value = oracle::oracle_passive_value(&g, t, objective.into(), cap)?;
            println!("targets={t} {}", format_value(&value));
        }
        OracleCommand::Members { graph } => {
            let g = load_graph(&graph)?;
            println!("members={}", oracle::enumerate_mec(&g, cap)?.members.len());
        }
    }
    Ok(())
}

fn run_bench(
    suite: SuiteArg,
    nodes: usize,
    density: f64,
    seed: u64,
    reps: usize,
    csv: &Path,
) -> Result<(), CliError> {
    let mut body = String::new();
    let mut rows = 0usize;
    match suite {
        SuiteArg::Lazyiter => {
            body.push_str("n,m,delta,seed,algo,run_index,micros,outputs\n");
            for i in 0..reps {
                let spec = GenSpec {
                    n: nodes,
                    density,
                    seed: seed + i as u64,
                };
                let g = gen_chordal(&spec)?;

                let start = Instant::now();
                let mut lazy_outputs = 0usize;
                for v in g.verts().iter() {
                    lazy_outputs += lazy_iter(&g, v)?.len();
                }
                let lazy_micros = start.elapsed().as_micros();

                let start = Instant::now();
                let mut eager_outputs = 0usize;
                for v in g.verts().iter() {
                    eager_outputs += eager_iter(&g, v)?.len();
                }
                let eager_micros = start.elapsed().as_micros();

                if lazy_outputs != eager_outputs {
                    return Err(CliError::internal(format!(
                        "lazy iteration emitted {lazy_outputs} results, eager baseline {eager_outputs} (seed {})",
                        spec.seed
                    )));
                }
                for (algo, micros, outputs) in [
                    ("lazyiter", lazy_micros, lazy_outputs),
                    ("eager", eager_micros, eager_outputs),
                ] {
                    writeln!(
                        body,
                        "{},{},{},{},{algo},{i},{micros},{outputs}",
                        g.n(),
                        g.edge_count(),
                        g.max_degree(),
                        spec.seed
                    )
                    .expect("string write");
                    rows += 1;
                }
            }
        }
        SuiteArg::Count => {
            let cap = oracle_cap()?;
            body.push_str("n,m,delta,seed,algo,run_index,micros,result\n");
            for i in 0..reps {
                let spec = GenSpec {
                    n: nodes,
                    density,
                    seed: seed + i as u64,
                };
                let g = gen_chordal(&spec)?;

                let start = Instant::now();
                let fast = mec_count(&g)?;
                let fast_micros = start.elapsed().as_micros();
                writeln!(
                    body,
                    "{},{},{},{},lazycount,{i},{fast_micros},{fast}",
                    g.n(),
                    g.edge_count(),
                    g.max_degree(),
                    spec.seed
                )
                .expect("string write");
                rows += 1;

                if g.verts().len() <= cap {
                    let start = Instant::now();
                    let slow = oracle::oracle_count(&g, cap)?;
                    let slow_micros = start.elapsed().as_micros();
                    if slow != fast {
                        return Err(CliError::internal(format!(
                            "count mismatch on seed {}: lazycount {fast}, oracle {slow}",
                            spec.seed
                        )));
                    }
                    writeln!(
                        body,
                        "{},{},{},{},oracle,{i},{slow_micros},{slow}",
                        g.n(),
                        g.edge_count(),
                        g.max_degree(),
                        spec.seed
                    )
                    .expect("string write");
                    rows += 1;
                }
            }
        }
    }
    std::fs::write(csv, body)
        .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", csv.display())))?;
    println!("rows={rows} csv={}", csv.display());
    Ok(())
}
