use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use lfgraph::autos::{
    self, check_structure, compose, count_automorphisms, count_automorphisms_vertex_level,
    decompose, formula_card_general, formula_card_n2, DecompositionDoc, PermutationDoc,
    VERTEX_LEVEL_LIMIT,
};
use lfgraph::budget::Deadline;
use lfgraph::graph::{ExportFormat, DEFAULT_VERTEX_LIMIT};
use lfgraph::harness::{run_verify, VerifyOptions, DEFAULT_SEED};
use lfgraph::{Field, LfGraph};

#[derive(Parser)]
#[command(
    name = "lfg",
    version,
    about = "Linear functional graphs over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct Instance {
    /// Field order (a prime power up to 256).
    #[arg(long)]
    q: usize,
    /// Dimension (at least 2).
    #[arg(long)]
    n: usize,
    /// Override the vertex-count guard.
    #[arg(long, default_value_t = DEFAULT_VERTEX_LIMIT)]
    max_vertices: usize,
}

impl Instance {
    fn graph(&self) -> lfgraph::Result<LfGraph> {
        LfGraph::build_with_limit(&Field::of_order(self.q)?, self.n, Some(self.max_vertices))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph and print a summary or export it.
    Build {
        #[command(flatten)]
        inst: Instance,
        /// graph6 or json (edge list).
        #[arg(long)]
        export: Option<String>,
        /// Write the export here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree, component and twin-class invariants.
    Invariants {
        #[command(flatten)]
        inst: Instance,
    },
    /// List the twin classes with their monic representatives.
    Lines {
        #[command(flatten)]
        inst: Instance,
    },
    /// Automorphism counting, checking and decomposition.
    Autos {
        #[command(subcommand)]
        command: AutosCommand,
    },
    /// Run the claim registry on one instance and print a report.
    Verify {
        #[command(flatten)]
        inst: Instance,
        /// Comma-separated claim ids (default: all).
        #[arg(long, value_delimiter = ',')]
        claims: Option<Vec<String>>,
        /// Seed for randomized checks; falls back to LFG_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Wall-clock budget in seconds for the whole report.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        /// Record per-claim wall time (reports are then not reproducible).
        #[arg(long)]
        timings: bool,
        /// Also run the expensive oracles that are off by default.
        #[arg(long)]
        full: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AutosCommand {
    /// Compare the closed-form group order with exact enumeration.
    Count {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Check that a permutation file is an automorphism and report its structure.
    Check {
        #[arg(long)]
        perm: PathBuf,
    },
    /// Factor an automorphism into generators.
    Decompose {
        #[arg(long)]
        perm: PathBuf,
    },
    /// Print a random automorphism built from generators.
    Random {
        #[command(flatten)]
        inst: Instance,
        #[arg(long)]
        seed: Option<u64>,
        /// Allow side-exchanging factors.
        #[arg(long)]
        swap: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Formula,
    Brute,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

/// Exit code 2 with a message.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Outcome = Result<bool, Usage>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("lfg: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Usage> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Usage(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(Usage::from),
    }
}

fn seed_from_env(flag: Option<u64>) -> Result<u64, Usage> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("LFG_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Usage(format!("LFG_SEED is not an integer: {v}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn read_perm(path: &Path) -> Result<(LfGraph, autos::VertexPermutation), Usage> {
    let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let doc: PermutationDoc =
        serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let g = LfGraph::for_order(doc.q, doc.n)?;
    let perm = doc.into_permutation(&g)?;
    Ok((g, perm))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Build { inst, export, out } => {
            let g = inst.graph()?;
            match export {
                Some(fmt) => {
                    let fmt: ExportFormat = fmt.parse()?;
                    let mut bytes = g.export(fmt);
                    if fmt == ExportFormat::Graph6 {
                        bytes.push(b'\n');
                    }
                    emit(out.as_deref(), &bytes)?;
                }
                None => println!(
                    "q={} n={} vertices={} edges={} degree={}",
                    g.q(),
                    g.n(),
                    g.vertex_count(),
                    g.edge_count(),
                    g.expected_degree()
                ),
            }
            Ok(true)
        }
        Command::Invariants { inst } => {
            let g = inst.graph()?;
            let comps = g.components();
            let regular = g.check_regular();
            let twins_are_lines = g.twin_classes() == g.line_partition();
            let doc = json!({
                "q": g.q(),
                "n": g.n(),
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "degree": g.expected_degree(),
                "regular": regular,
                "components": comps.len(),
                "component_sizes": comps.iter().map(Vec::len).collect::<Vec<_>>(),
                "lines_per_side": g.lines_per_side(),
                "twin_classes": g.twin_classes().len(),
                "twin_classes_are_lines": twins_are_lines,
            });
            print!("{}", pretty(&doc));
            Ok(regular && twins_are_lines)
        }
        Command::Lines { inst } => {
            let g = inst.graph()?;
            for (i, line) in g.lines().iter().enumerate() {
                let side = match line.side {
                    lfgraph::Side::Vec => "vec",
                    lfgraph::Side::Fun => "fun",
                };
                println!("{i}\t{side}\t{:?}\t{:?}", line.rep.indices(), line.members);
            }
            Ok(true)
        }
        Command::Autos { command } => run_autos(command),
        Command::Verify {
            inst,
            claims,
            seed,
            budget,
            format,
            timings,
            full,
            out,
        } => {
            let budget = match budget {
                Some(b) if b.is_finite() && b > 0.0 => Some(Duration::from_secs_f64(b)),
                Some(b) => return Err(Usage(format!("budget must be positive, got {b}"))),
                None => None,
            };
            inst.graph()?;
            let opts = VerifyOptions {
                claims,
                seed: seed_from_env(seed)?,
                budget,
                timings,
                full,
            };
            let report = run_verify(inst.q, inst.n, &opts)?;
            let text = match format {
                ReportFormat::Json => report.to_json(),
                ReportFormat::Text => report.render_text(),
            };
            emit(out.as_deref(), text.as_bytes())?;
            Ok(report.passed())
        }
    }
}

fn run_autos(command: AutosCommand) -> Outcome {
    match command {
        AutosCommand::Count { inst, method } => {
            let g = inst.graph()?;
            let mut parts = vec![];
            let formula = if method != Method::Brute {
                let f = if g.n() == 2 {
                    formula_card_n2(g.q())?
                } else {
                    formula_card_general(g.q(), g.n())?
                };
                parts.push(format!("formula={f}"));
                Some(f)
            } else {
                None
            };
            let brute = if method != Method::Formula {
                let c = count_automorphisms(&g, &Deadline::none())?;
                parts.push(format!("brute={}", c.total));
                if g.vertex_count() <= VERTEX_LEVEL_LIMIT {
                    let direct = count_automorphisms_vertex_level(&g, &Deadline::none())?;
                    parts.push(format!("vertex_level={direct}"));
                    if direct != c.total {
                        println!("{}", parts.join(" "));
                        return Ok(false);
                    }
                }
                Some(c.total)
            } else {
                None
            };
            println!("{}", parts.join(" "));
            Ok(match (formula, brute) {
                (Some(f), Some(b)) => f == b,
                _ => true,
            })
        }
        AutosCommand::Check { perm } => {
            let (g, p) = read_perm(&perm)?;
            match check_structure(&g, &p) {
                Ok(v) => {
                    let ok = v.all_ok(g.n());
                    print!("{}", pretty(&json!({"automorphism": true, "structure": v})));
                    Ok(ok)
                }
                Err(_) => {
                    let (x, y) = autos::automorphism_violation(&g, &p).unwrap_or((0, 0));
                    print!(
                        "{}",
                        pretty(&json!({"automorphism": false, "witness": [x, y]}))
                    );
                    Ok(false)
                }
            }
        }
        AutosCommand::Decompose { perm } => {
            let (g, p) = read_perm(&perm)?;
            match decompose(&g, &p) {
                Ok(d) => {
                    let doc: DecompositionDoc = d.to_doc();
                    debug_assert_eq!(compose(&g, &d).ok().as_ref(), Some(&p));
                    print!("{}", pretty(&doc));
                    Ok(true)
                }
                Err(f) => {
                    print!("{}", pretty(&json!({"failure": f})));
                    Ok(false)
                }
            }
        }
        AutosCommand::Random { inst, seed, swap } => {
            let g = inst.graph()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed_from_env(seed)?);
            let p = autos::random_generated_automorphism(&g, &mut rng, swap)?;
            print!(
                "{}",
                serde_json::to_string(&p.to_doc(&g)).expect("serializable") + "\n"
            );
            Ok(true)
        }
    }
}
