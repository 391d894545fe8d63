use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use tricube::decompose::{
    decompose, verify_decomposition, DecompositionError, DecompositionParams,
};
use tricube::generate::{random_bipartite, random_triangle_free, target_order};
use tricube::graph::{
    format_embedding, lower_bound_coloring, parse_embedding, parse_graph, red_components_too_small,
    verify_red_embedding,
};
use tricube::hypercube::{bandwidth_bound, bandwidth_order, cube_vertices, max_edge_stretch};
use tricube::oracle::{contains_red_cube, exhaustive_ramsey, CubeSearch, Enumeration, OracleError};
use tricube::solver::{solve, SolveCase, SolverParams};
use tricube::ColouredGraph;

/// Red hypercubes in colourings with no blue triangle.
#[derive(Parser)]
#[command(name = "tricube", version)]
struct Cli {
    /// Worker threads for the parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two red cliques of 2^n - 1 vertices joined by blue edges.
    GenLowerBound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A seeded random colouring whose blue graph is triangle-free.
    GenRandom {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        blue_model: Model,
        #[arg(long)]
        seed: u64,
        /// Probability of each candidate blue edge.
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        /// Number of vertices (default: ceil((1 + epsilon) 2^(n+1))).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Blue degree cap for the greedy model.
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Blue triangle test and statistics; with --embedding, checks that the
    /// map is a red copy of Q_n.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, requires = "n")]
        embedding: Option<PathBuf>,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Splits the vertex set into red snakes and a sparse remainder.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: u32,
        /// `desk`, `paper-asymptotic`, or a JSON file of decomposition parameters.
        #[arg(long, default_value = "desk")]
        params: String,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Finds a red Q_n.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: u32,
        /// `desk`, `paper-asymptotic`, or a JSON file of solver parameters.
        #[arg(long, default_value = "desk")]
        params: String,
        #[arg(long)]
        embedding_out: Option<PathBuf>,
    },
    /// Exhaustive searches for tiny instances.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Checks the level-order stretch of Q_n against 2 binom(n, n/2).
    BandwidthCheck {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Whether every blue-triangle-free colouring of K_N holds a red Q_n.
    Ramsey {
        #[arg(long)]
        n: u32,
        #[arg(long = "N")]
        order: usize,
        /// Default: plain up to 7 vertices, canonical above.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Backtracking search for a red Q_n.
    ContainsCube {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        embedding_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Bipartite,
    TriangleFreeGreedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    Canonical,
}

/// A failed command: exit code, stage name and message.
struct Failure {
    code: u8,
    stage: String,
    message: String,
    oracle: Option<&'static str>,
}

const HYPOTHESIS: u8 = 2;
const STAGE: u8 = 3;
const IO: u8 = 4;

impl Failure {
    fn new(code: u8, stage: &str, message: impl ToString) -> Self {
        Failure {
            code,
            stage: stage.to_string(),
            message: message.to_string(),
            oracle: None,
        }
    }

    fn io(message: impl ToString) -> Self {
        Failure::new(IO, "io", message)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(IO)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: --threads ignored: {e}");
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            let mut line = json!({
                "status": "failure",
                "exit": f.code,
                "stage": f.stage,
                "message": f.message,
            });
            if let Some(oracle) = f.oracle {
                line["oracle"] = json!(oracle);
            }
            eprintln!("diagnosis: {line}");
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::GenLowerBound { n, out } => {
            let g =
                lower_bound_coloring(n).map_err(|e| Failure::new(HYPOTHESIS, "hypothesis", e))?;
            emit(out.as_deref(), &g.to_edge_list())
        }
        Command::GenRandom {
            n,
            blue_model,
            seed,
            p,
            order,
            epsilon,
            max_degree,
            out,
        } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Failure::new(
                    HYPOTHESIS,
                    "hypothesis",
                    format!("p = {p} is not a probability"),
                ));
            }
            if n > 24 && order.is_none() {
                return Err(Failure::new(
                    HYPOTHESIS,
                    "hypothesis",
                    format!("n = {n} is too large"),
                ));
            }
            let order = order.unwrap_or_else(|| target_order(n, epsilon));
            let g = match blue_model {
                Model::Bipartite => random_bipartite(order, p, seed),
                Model::TriangleFreeGreedy => {
                    random_triangle_free(order, p, max_degree.unwrap_or(usize::MAX), seed)
                }
            };
            emit(out.as_deref(), &g.to_edge_list())
        }
        Command::Check {
            input,
            embedding,
            n,
        } => check(&input, embedding.as_deref(), n),
        Command::Decompose {
            input,
            n,
            params,
            cert_out,
        } => {
            check_dimension(n)?;
            let g = load_graph(&input)?;
            let params: DecompositionParams = match params.as_str() {
                "desk" => DecompositionParams::desk(n),
                "paper-asymptotic" => DecompositionParams::asymptotic(n),
                path => load_json(Path::new(path))?,
            };
            let start = Instant::now();
            let d = decompose(&g, &params).map_err(|e| match e {
                DecompositionError::BlueTriangle(_) | DecompositionError::Params(_) => {
                    Failure::new(HYPOTHESIS, "hypothesis", e)
                }
                DecompositionError::NoGap { .. } => Failure::new(STAGE, "decompose", e),
            })?;
            verify_decomposition(&g, &d, &params)
                .map_err(|e| Failure::new(STAGE, "certificate", e))?;
            eprintln!(
                "decomposed {} vertices in {:.2?}: {} snakes covering {}, |C| = {}, {} rounds",
                g.order(),
                start.elapsed(),
                d.snakes.len(),
                d.snake_vertex_count(),
                d.c.len(),
                d.audit.len()
            );
            emit(cert_out.as_deref(), &d.to_json())
        }
        Command::Solve {
            input,
            n,
            params,
            embedding_out,
        } => {
            check_dimension(n)?;
            let g = load_graph(&input)?;
            let params: SolverParams = match params.as_str() {
                "desk" => SolverParams::desk(n),
                "paper-asymptotic" => SolverParams::asymptotic(n),
                path => load_json(Path::new(path))?,
            };
            let start = Instant::now();
            match solve(&g, n, &params) {
                Ok(sol) => {
                    let case = match sol.case {
                        SolveCase::Dense => "dense",
                        SolveCase::Snakes => "snakes",
                    };
                    eprintln!(
                        "embedded Q_{n} in {:.2?} via the {case} case ({} snakes, {} high-degree vertices removed)",
                        start.elapsed(),
                        sol.decomposition.snakes.len(),
                        sol.high_degree.len()
                    );
                    emit(embedding_out.as_deref(), &format_embedding(&sol.embedding))
                }
                Err(e) => {
                    let code = if e.is_hypothesis() { HYPOTHESIS } else { STAGE };
                    let mut failure = Failure::new(code, e.stage(), &e);
                    // Small instances get a definite answer from exhaustive search.
                    if n <= 4 && g.order() <= 64 {
                        if let Ok(found) = contains_red_cube(&g, n) {
                            failure.oracle = Some(if found.is_found() {
                                "red Q_n exists"
                            } else {
                                "no red Q_n exists"
                            });
                        }
                    }
                    Err(failure)
                }
            }
        }
        Command::Oracle { command } => oracle(command),
        Command::BandwidthCheck { n } => {
            if n > 24 {
                return Err(Failure::new(
                    HYPOTHESIS,
                    "hypothesis",
                    format!("n = {n} is too large"),
                ));
            }
            let order = bandwidth_order(cube_vertices(n));
            let stretch = max_edge_stretch(&order, n);
            let bound = bandwidth_bound(n);
            println!("n={n} stretch={stretch} bound={bound}");
            if stretch as u64 <= bound {
                Ok(())
            } else {
                Err(Failure::new(
                    STAGE,
                    "bandwidth",
                    format!("stretch {stretch} exceeds {bound}"),
                ))
            }
        }
    }
}

fn check(input: &Path, embedding: Option<&Path>, n: Option<u32>) -> Outcome {
    let g = load_graph(input)?;
    let components = g.red_components();
    let largest = components.iter().map(Vec::len).max().unwrap_or(0);
    println!("vertices={}", g.order());
    println!("blue_edges={}", g.blue_edge_count());
    println!("max_blue_degree={}", g.max_blue_degree());
    println!("blue_bipartite={}", g.blue_bipartition().is_some());
    println!("red_components={} largest={largest}", components.len());
    if let Some(n) = n {
        println!(
            "red_components_below_2^n={}",
            red_components_too_small(&g, n)
        );
    }
    let triangle = g.find_blue_triangle();
    println!("blue_triangle_free={}", triangle.is_none());
    if let (Some(path), Some(n)) = (embedding, n) {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        let phi = parse_embedding(&text, n)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        verify_red_embedding(&g, n, &phi).map_err(|e| Failure::new(STAGE, "verify", e))?;
        println!("embedding=valid red Q_{n}");
    }
    match triangle {
        Some(t) => Err(Failure::new(
            HYPOTHESIS,
            "hypothesis",
            format!("blue triangle {t:?}"),
        )),
        None => Ok(()),
    }
}

fn oracle(command: OracleCommand) -> Outcome {
    match command {
        OracleCommand::Ramsey {
            n,
            order,
            mode,
            witness_out,
        } => {
            let mode = match mode {
                Some(Mode::Plain) => Enumeration::Plain,
                Some(Mode::Canonical) => Enumeration::Canonical,
                None if order <= Enumeration::Plain.max_order() => Enumeration::Plain,
                None => Enumeration::Canonical,
            };
            let verdict = exhaustive_ramsey(n, order, mode).map_err(|e| match e {
                OracleError::TooLarge { .. } => Failure::new(HYPOTHESIS, "oracle-limit", e),
                other => Failure::new(HYPOTHESIS, "hypothesis", other),
            })?;
            println!("{}", if verdict.holds { "holds" } else { "fails" });
            println!("n={n} N={order} examined={}", verdict.examined);
            if let (Some(w), Some(path)) = (&verdict.witness, witness_out) {
                write_file(&path, &w.to_edge_list())?;
            }
            Ok(())
        }
        OracleCommand::ContainsCube {
            input,
            n,
            embedding_out,
        } => {
            let g = load_graph(&input)?;
            match contains_red_cube(&g, n).map_err(|e| Failure::new(HYPOTHESIS, "hypothesis", e))? {
                CubeSearch::Found(phi) => {
                    println!("found");
                    match embedding_out {
                        Some(path) => write_file(&path, &format_embedding(&phi)),
                        None => {
                            print!("{}", format_embedding(&phi));
                            Ok(())
                        }
                    }
                }
                CubeSearch::Absent { nodes } => {
                    println!("absent nodes={nodes}");
                    Ok(())
                }
            }
        }
    }
}

/// Dimensions the presets are defined for.
fn check_dimension(n: u32) -> Outcome {
    if (1..=24).contains(&n) {
        Ok(())
    } else {
        Err(Failure::new(
            HYPOTHESIS,
            "hypothesis",
            format!("dimension {n} outside 1..=24"),
        ))
    }
}

fn load_graph(path: &Path) -> Result<ColouredGraph, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Failure::new(IO, "parse", format!("{}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new(IO, "parse", format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to standard output without one.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
