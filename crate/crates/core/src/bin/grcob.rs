use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use grcob::category::{compose, homotopy_invariants, tensor};
use grcob::collapse::{minimize_marked, reduce, zigzag_equivalent};
use grcob::det::{xi_compose_sign, xi_object};
use grcob::frobenius::{evaluate, load_algebra};
use grcob::graph::{GafDoc, GraphError};
use grcob::pool::{pool_generate, PoolBounds};
use grcob::spine::spine_chain_complex;
use grcob::suites::{run_suite, SUITES};
use grcob::{Error, MarkedGaf};

#[derive(Parser)]
#[command(name = "grcob", version, about = "Graph cobordism workbench")]
struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write the main result to a file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a gaf document and list every violation.
    Validate { file: PathBuf },
    /// Compose `g ∘ h` for g: B -> A and h: C -> B.
    Compose { g: PathBuf, h: PathBuf },
    /// Disjoint union of two morphisms.
    Tensor { g: PathBuf, h: PathBuf },
    /// Relative Euler characteristic |V| - |E|.
    Chi { file: PathBuf },
    /// Per-component homotopy invariants.
    Invariants {
        file: PathBuf,
        /// Compare against another morphism.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Also search for a common collapse within this many steps.
        #[arg(long, default_value_t = 0)]
        zigzag_depth: usize,
    },
    /// Degree and bases of the determinant line, and composition signs.
    Xi {
        file: PathBuf,
        #[arg(short = 'd', default_value_t = 1, allow_negative_numbers = true)]
        d: i64,
        /// Report the sign of composing with this morphism (file ∘ other).
        #[arg(long)]
        compose: Option<PathBuf>,
    },
    /// Remove unmarked based trees and split multiply marked ones.
    Reduce { file: PathBuf },
    /// Collapse leaves until none remain.
    Minimize { file: PathBuf },
    /// Spine of outer space modulo Out(Fn).
    Spine(SpineArgs),
    /// Evaluate a morphism in a Frobenius algebra.
    Eval {
        file: PathBuf,
        /// Bundled name (s2, t2, cp2, s1, ground) or a JSON file.
        #[arg(long)]
        algebra: String,
    },
    /// Run a property suite.
    Check {
        /// Suite name or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random cases.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Dump a seeded pool of random morphisms.
    Pool {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        size: usize,
        #[arg(long, default_value_t = 5)]
        max_vertices: usize,
        #[arg(long, default_value_t = 6)]
        max_edges: usize,
    },
}

#[derive(Args)]
struct SpineArgs {
    #[arg(short = 'n', default_value_t = 2)]
    n: usize,
    #[arg(long, group = "mode")]
    list: bool,
    #[arg(long, group = "mode")]
    complex: bool,
    #[arg(long, group = "mode")]
    homology: bool,
    #[arg(short = 'd', default_value_t = 0, allow_negative_numbers = true)]
    d: i64,
    /// Allow rank 4 complexes.
    #[arg(long)]
    experimental: bool,
}

enum Failure {
    Violations(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Graph(GraphError::Invalid(v)) => {
                Failure::Violations(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))
            }
            e => Failure::Input(e),
        }
    }
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Output {
        Output {
            text: text.into(),
            json,
            ok: true,
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

fn load(path: &PathBuf) -> Result<MarkedGaf, Error> {
    MarkedGaf::from_json(&read(path)?)
}

fn doc_json(m: &MarkedGaf) -> Value {
    serde_json::to_value(m.to_doc()).expect("documents serialize")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn seed_override(seed: u64) -> Result<u64, Error> {
    match std::env::var("GRCOB_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidInput, format!("GRCOB_SEED is not an integer: {s:?}")))),
        Err(_) => Ok(seed),
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    Ok(match &cli.command {
        Command::Validate { file } => {
            let doc: GafDoc = serde_json::from_str(&read(file)?).map_err(Error::from)?;
            let violations = doc.validate();
            if violations.is_empty() {
                Output::ok("valid", json!({"valid": true, "violations": []}))
            } else {
                Output {
                    text: violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"),
                    json: json!({"valid": false, "violations": violations}),
                    ok: false,
                }
            }
        }
        Command::Compose { g, h } => {
            let k = compose(&load(g)?, &load(h)?).map_err(Error::from)?;
            let v = doc_json(&k);
            Output::ok(pretty(&v), v)
        }
        Command::Tensor { g, h } => {
            let k = tensor(&load(g)?, &load(h)?).map_err(Error::from)?;
            let v = doc_json(&k);
            Output::ok(pretty(&v), v)
        }
        Command::Chi { file } => {
            let chi = load(file)?.euler_char_rel();
            Output::ok(chi.to_string(), json!({ "chi": chi }))
        }
        Command::Invariants {
            file,
            compare,
            zigzag_depth,
        } => {
            let m = load(file)?;
            let inv = homotopy_invariants(&m);
            match compare {
                None => {
                    let v = serde_json::to_value(&inv).expect("invariants serialize");
                    Output::ok(pretty(&v), v)
                }
                Some(other) => {
                    let o = load(other)?;
                    let same = inv == homotopy_invariants(&o);
                    let zigzag = (*zigzag_depth > 0).then(|| zigzag_equivalent(&m, &o, *zigzag_depth));
                    let ok = same && zigzag != Some(false);
                    let mut text = format!("invariants {}", if same { "equal" } else { "differ" });
                    if let Some(z) = zigzag {
                        text += &format!("\nzigzag within depth {zigzag_depth}: {}", if z { "found" } else { "not found" });
                    }
                    Output {
                        text,
                        json: json!({"equal": same, "zigzag": zigzag}),
                        ok,
                    }
                }
            }
        }
        Command::Xi { file, d, compose: other } => {
            let m = load(file)?;
            let obj = xi_object(m.gaf(), *d);
            let mut v = serde_json::to_value(&obj).expect("det lines serialize");
            let mut text = format!(
                "degree {}\nH0 basis {}\nH1 basis {}",
                obj.degree,
                serde_json::to_string(&obj.h0_basis).unwrap(),
                serde_json::to_string(&obj.h1_basis).unwrap()
            );
            if let Some(p) = other {
                let sign = xi_compose_sign(&m, &load(p)?, *d).map_err(Error::from)?;
                text += &format!("\ncompose sign {sign}");
                v["compose_sign"] = json!(sign.as_i64());
            }
            Output::ok(text, v)
        }
        Command::Reduce { file } => {
            let v = doc_json(&reduce(&load(file)?));
            Output::ok(pretty(&v), v)
        }
        Command::Minimize { file } => {
            let v = doc_json(&minimize_marked(&load(file)?).0);
            Output::ok(pretty(&v), v)
        }
        Command::Spine(args) => spine(args)?,
        Command::Eval { file, algebra } => {
            let alg = load_algebra(algebra)?;
            let f = evaluate(&load(file)?, &alg).map_err(Error::from)?;
            let v = f.to_json(&alg);
            let mut lines = vec![format!("degree {} ({} -> {})", f.degree, f.source_arity, f.target_arity)];
            for e in v["entries"].as_array().expect("entries") {
                lines.push(format!("{} -> {} : {}", e["input"], e["output"], e["coeff"].as_str().unwrap()));
            }
            Output::ok(lines.join("\n"), v)
        }
        Command::Check { suite, seed, n } => {
            let seed = seed_override(*seed)?;
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut reports = Vec::new();
            for name in names {
                reports.push(run_suite(name, seed, *n).map_err(Error::from)?);
            }
            let ok = reports.iter().all(|r| r.passed());
            let mut lines = Vec::new();
            for r in &reports {
                lines.push(format!(
                    "{} {} ({} checks, {} ms)",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.suite,
                    r.cases,
                    r.millis
                ));
                lines.extend(r.failures.iter().map(|f| format!("  {f}")));
            }
            Output {
                text: lines.join("\n"),
                json: serde_json::to_value(&reports).expect("reports serialize"),
                ok,
            }
        }
        Command::Pool {
            seed,
            size,
            max_vertices,
            max_edges,
        } => {
            let pool = pool_generate(seed_override(*seed)?, *size, PoolBounds::new(*max_vertices, *max_edges));
            let dump = pool.dump();
            let v: Value = serde_json::from_str(&dump).expect("dump is json");
            Output::ok(dump, v)
        }
    })
}

fn spine(args: &SpineArgs) -> Result<Output, Failure> {
    let c = spine_chain_complex(args.n, args.d, args.experimental).map_err(Error::from)?;
    if args.complex {
        let v = serde_json::to_value(&c).expect("complexes serialize");
        return Ok(Output::ok(pretty(&v), v));
    }
    if args.homology {
        let betti = c.betti();
        let text = betti.iter().enumerate().map(|(k, b)| format!("H{k} = Q^{b}")).collect::<Vec<_>>().join("\n");
        return Ok(Output::ok(text, json!({"n": args.n, "d": args.d, "betti": betti})));
    }
    let docs: Vec<Value> = c
        .objects
        .iter()
        .map(|g| serde_json::to_value(g.to_doc()).expect("documents serialize"))
        .collect();
    let text = c
        .objects
        .iter()
        .enumerate()
        .map(|(i, g)| format!("{i}: {} vertices, {} edges", g.n_vertices(), g.n_edges()))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output::ok(
        format!("{} classes\n{text}", docs.len()),
        json!({"n": args.n, "count": docs.len(), "objects": docs}),
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = if cli.json { pretty(&out.json) } else { out.text };
            match &cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(path, body + "\n") {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{body}"),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Violations(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
