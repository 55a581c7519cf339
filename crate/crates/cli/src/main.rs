//! `blowup` — command-line front end for the blow-up calculus engine.
//!
//! State files travel through stdin/stdout so subcommands compose with
//! shell pipes: `blowup new | blowup op vertex 0 | blowup labels`.

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use blowup_calculus::checks::{
    discriminate_lemma_5_9, run_check, verify_paper_examples, CheckReport, HistorySampler,
    REGISTRY,
};
use blowup_calculus::engine::seed_p2;
use blowup_calculus::enumerate::{census, enumerate_states, EnumerateOptions, FilterSpec};
use blowup_calculus::io::{export_dot, load_state, render_labels, save_state};
use blowup_calculus::{BlowupState, Error, VertexId};

/// Exact blow-up calculus on weighted trees.
#[derive(Parser)]
#[command(name = "blowup", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the seed state (one vertex of weight 1) as a state file.
    New,
    /// Apply one blow-up to the state file on stdin; write the result.
    Op {
        #[command(subcommand)]
        op: OpKind,
    },
    /// Print the label table for the state file on stdin.
    Labels,
    /// Run a named invariant check, or `all` for the whole registry.
    Verify {
        /// Check name (see `verify list`) or `all`.
        target: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Maximum sampled history depth.
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Relative probability of a vertex blow-up vs an edge blow-up.
        #[arg(long, default_value_t = 1)]
        vertex_weight: u32,
        #[arg(long, default_value_t = 1)]
        edge_weight: u32,
    },
    /// Decide between the two candidate two-sided determinant formulas.
    #[command(name = "discriminate-5-9")]
    Discriminate59 {
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// List canonical classes of states reachable within a depth bound.
    Enumerate {
        #[arg(long)]
        depth: usize,
        /// Conjunctive label filter, e.g. "some d <= -1 & all w <= 1".
        #[arg(long)]
        filter: Option<String>,
        /// Disable the parallel search.
        #[arg(long)]
        serial: bool,
        /// Abort if any BFS level exceeds this many states.
        #[arg(long)]
        frontier_cap: Option<usize>,
    },
    /// Count classes containing a vertex with determinant label A and
    /// kbar label B.
    Census {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        serial: bool,
    },
    /// Re-serialize the state file on stdin in another format.
    Export {
        #[arg(long, value_enum)]
        format: ExportFormat,
    },
    /// Interactive session: blow up, undo, inspect, save, load.
    Repl,
}

#[derive(Subcommand)]
enum OpKind {
    /// Blow up a free point on the given vertex.
    Vertex { id: u32 },
    /// Blow up the intersection point of two adjacent vertices.
    Edge { p: u32, q: u32 },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    /// Graphviz DOT.
    Graph,
    /// Canonical state-file JSON.
    Json,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::StateVerification(_) | Error::FrontierCapExceeded { .. } => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

fn read_stdin_state() -> Result<BlowupState, u8> {
    let mut text = String::new();
    if let Err(e) = std::io::stdin().read_to_string(&mut text) {
        eprintln!("error: cannot read stdin: {e}");
        return Err(EXIT_USAGE);
    }
    load_state(&text).map_err(|e| {
        eprintln!("error: {e}");
        exit_for(&e)
    })
}

fn emit_state(state: &BlowupState) -> u8 {
    // belt and braces: never write a state whose total determinant drifted
    if let Err(e) = state.verify_labels() {
        eprintln!("error: refusing to write inconsistent state: {e}");
        return EXIT_FAILURE;
    }
    print!("{}", save_state(state));
    0
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("BLOWUP_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            _ => {
                eprintln!("error: BLOWUP_THREADS must be a positive integer, got `{threads}`");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    ExitCode::from(dispatch(Cli::parse().command))
}

fn dispatch(command: Command) -> u8 {
    match command {
        Command::New => emit_state(&seed_p2()),
        Command::Op { op } => {
            let state = match read_stdin_state() {
                Ok(s) => s,
                Err(code) => return code,
            };
            let next = match op {
                OpKind::Vertex { id } => state.blow_up_vertex(VertexId(id)),
                OpKind::Edge { p, q } => state.blow_up_edge(VertexId(p), VertexId(q)),
            };
            match next {
                Ok(s) => emit_state(&s),
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_for(&e)
                }
            }
        }
        Command::Labels => match read_stdin_state() {
            Ok(s) => {
                print!("{}", render_labels(&s));
                0
            }
            Err(code) => code,
        },
        Command::Verify {
            target,
            seed,
            trials,
            depth,
            vertex_weight,
            edge_weight,
        } => cmd_verify(&target, seed, trials, depth, vertex_weight, edge_weight),
        Command::Discriminate59 { depth, seed } => {
            let report = discriminate_lemma_5_9(depth, seed);
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            0
        }
        Command::Enumerate {
            depth,
            filter,
            serial,
            frontier_cap,
        } => cmd_enumerate(depth, filter.as_deref(), serial, frontier_cap),
        Command::Census { a, b, depth, serial } => {
            let options = EnumerateOptions {
                parallel: !serial,
                frontier_cap: None,
            };
            match census(a, b, depth, options) {
                Ok(report) => {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_for(&e)
                }
            }
        }
        Command::Export { format } => match read_stdin_state() {
            Ok(s) => {
                match format {
                    ExportFormat::Graph => print!("{}", export_dot(&s)),
                    ExportFormat::Json => print!("{}", save_state(&s)),
                }
                0
            }
            Err(code) => code,
        },
        Command::Repl => repl(),
    }
}

fn print_report(report: &CheckReport) -> bool {
    if report.passed() {
        println!(
            "{}: pass ({} trials, {} ms)",
            report.name, report.trials, report.wall_ms
        );
        true
    } else {
        println!(
            "{}: FAIL ({} of {} trials)",
            report.name,
            report.failures.len(),
            report.trials
        );
        for f in report.failures.iter().take(3) {
            println!(
                "  trial {}: {} [history {}]",
                f.trial,
                f.detail,
                serde_json::to_string(&f.history).unwrap()
            );
        }
        false
    }
}

fn cmd_verify(
    target: &str,
    seed: u64,
    trials: u64,
    depth: usize,
    vertex_weight: u32,
    edge_weight: u32,
) -> u8 {
    if target == "list" {
        for name in REGISTRY {
            println!("{name}");
        }
        println!("paper_examples");
        return 0;
    }
    let sampler = HistorySampler::new(seed, depth).with_mix(vertex_weight, edge_weight);
    let names: Vec<&str> = if target == "all" {
        REGISTRY.to_vec()
    } else if target == "paper_examples" {
        Vec::new()
    } else {
        vec![target]
    };
    let mut all_pass = true;
    for name in names {
        match run_check(name, &sampler, trials) {
            Ok(report) => all_pass &= print_report(&report),
            Err(e) => {
                eprintln!("error: {e}");
                return exit_for(&e);
            }
        }
    }
    if target == "all" || target == "paper_examples" {
        all_pass &= print_report(&verify_paper_examples());
    }
    if all_pass {
        0
    } else {
        EXIT_FAILURE
    }
}

fn cmd_enumerate(
    depth: usize,
    filter: Option<&str>,
    serial: bool,
    frontier_cap: Option<usize>,
) -> u8 {
    let filter = match filter.map(FilterSpec::parse).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let options = EnumerateOptions {
        parallel: !serial,
        frontier_cap,
    };
    match enumerate_states(depth, &filter, options) {
        Ok(classes) => {
            for c in &classes {
                println!(
                    "depth={} vertices={} key={} history={}",
                    c.depth,
                    c.witness.forest().len(),
                    c.key.as_hex(),
                    serde_json::to_string(&c.witness.ops()).unwrap()
                );
            }
            println!("classes: {}", classes.len());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn repl() -> u8 {
    let mut state = seed_p2();
    let stdin = std::io::stdin();
    let mut line = String::new();
    loop {
        print!("> ");
        std::io::stdout().flush().ok();
        line.clear();
        match stdin.read_line(&mut line) {
            Ok(0) => return 0,
            Ok(_) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_FAILURE;
            }
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |s: &str| s.parse::<u32>().map(VertexId).map_err(|e| e.to_string());
        let outcome: Result<Option<BlowupState>, String> = match words.as_slice() {
            [] => Ok(None),
            ["quit"] | ["q"] => return 0,
            ["v", id] => parse_id(id)
                .and_then(|p| state.blow_up_vertex(p).map_err(|e| e.to_string()))
                .map(Some),
            ["e", p, q] => parse_id(p)
                .and_then(|p| parse_id(q).map(|q| (p, q)))
                .and_then(|(p, q)| state.blow_up_edge(p, q).map_err(|e| e.to_string()))
                .map(Some),
            ["undo"] => state.blow_down().map(Some).map_err(|e| e.to_string()),
            ["labels"] => {
                print!("{}", render_labels(&state));
                Ok(None)
            }
            ["final"] => {
                let finals: Vec<String> = state
                    .forest()
                    .vertex_ids()
                    .filter(|&v| state.is_final(v).unwrap())
                    .map(|v| v.to_string())
                    .collect();
                println!("final: {}", finals.join(" "));
                Ok(None)
            }
            ["anc", id] => parse_id(id)
                .and_then(|p| state.ancestors(p).map_err(|e| e.to_string()))
                .map(|anc| {
                    let list: Vec<String> = anc.iter().map(|v| v.to_string()).collect();
                    println!("ancestors: {}", list.join(" "));
                    None
                }),
            ["save", path] => std::fs::write(path, save_state(&state))
                .map(|_| {
                    println!("saved {path}");
                    None
                })
                .map_err(|e| e.to_string()),
            ["load", path] => std::fs::read_to_string(*path)
                .map_err(|e| e.to_string())
                .and_then(|text| load_state(&text).map_err(|e| e.to_string()))
                .map(Some),
            _ => Err(format!(
                "unknown command `{}` (v <id> | e <id> <id> | undo | labels | final | anc <id> | save <path> | load <path> | quit)",
                words.join(" ")
            )),
        };
        match outcome {
            Ok(Some(next)) => {
                state = next;
                print!("{}", render_labels(&state));
            }
            Ok(None) => {}
            Err(msg) => println!("error: {msg}"),
        }
    }
}
