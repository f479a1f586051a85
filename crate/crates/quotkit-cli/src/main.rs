use clap::{Parser, Subcommand, ValueEnum};
use quotkit::balancing::{construct_datum, search_datum, verify_datum, BalancingDatum};
use quotkit::betti::{self, BettiDiagram};
use quotkit::matrixgen::{certify_ses, HomogMatrix};
use quotkit::oracle::{generic_kernel_split_numeric, OracleConfig, DEFAULT_SEED};
use quotkit::quot_geometry::{connectedness_certificate, irreducible, verify_certificate};
use quotkit::realizability::{realizable, Witness};
use quotkit::stable_pairs::{component_census, enumerate_stable_pairs, ComponentRecord};
use quotkit::{Error, SplittingType, Triple};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "quotkit", version, about = "Splitting types, short exact sequences and Quot scheme components on P^1")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct TripleArgs {
    /// Kernel type, e.g. "0,3,9"
    #[arg(long, allow_hyphen_values = true)]
    b: SplittingType,
    /// Middle type
    #[arg(long, allow_hyphen_values = true)]
    e: SplittingType,
    /// Quotient type
    #[arg(long, allow_hyphen_values = true)]
    a: SplittingType,
}

impl TripleArgs {
    fn triple(&self) -> Triple {
        Triple::new(self.b.clone(), self.e.clone(), self.a.clone())
    }
}

#[derive(clap::Args)]
struct QuotArgs {
    #[arg(long, allow_hyphen_values = true)]
    e: SplittingType,
    /// Rank of the quotient
    #[arg(long)]
    n: usize,
    /// Degree of the quotient
    #[arg(long, allow_hyphen_values = true)]
    d: i128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether 0 -> O(b) -> O(e) -> O(a) -> 0 exists
    Realizable {
        #[command(flatten)]
        t: TripleArgs,
        #[arg(long)]
        json: bool,
    },
    /// Balancing datum for a realizable triple
    Balance {
        #[command(flatten)]
        t: TripleArgs,
        /// Exhaustive search instead of the direct construction
        #[arg(long)]
        search: bool,
        #[arg(long)]
        json: bool,
    },
    /// Explicit kernel and quotient matrices with their checks
    Construct {
        #[command(flatten)]
        t: TripleArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Components of the locally free Quot locus
    Components {
        #[command(flatten)]
        q: QuotArgs,
        /// List every stable pair, not only the strongly stable ones
        #[arg(long)]
        all_stable: bool,
        #[arg(long)]
        json: bool,
    },
    /// Irreducibility test
    Irreducible {
        #[command(flatten)]
        q: QuotArgs,
        #[arg(long)]
        json: bool,
    },
    /// Connectedness certificate
    Connected {
        #[command(flatten)]
        q: QuotArgs,
        #[arg(long)]
        json: bool,
    },
    /// Codimension-2 Betti diagrams
    Betti {
        #[command(subcommand)]
        op: BettiOp,
    },
    /// Numeric oracles over a prime field
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Subcommand)]
enum BettiOp {
    /// Decompose into pure diagrams
    Decompose {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Is the lattice point the diagram of a module
    Realizable {
        #[arg(long)]
        diagram: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum OracleOp {
    /// Generic kernel type of a surjection O(e) -> O(a)
    KernelSplit {
        #[arg(long, allow_hyphen_values = true)]
        e: SplittingType,
        #[arg(long, allow_hyphen_values = true)]
        a: SplittingType,
        #[arg(long, default_value_t = 32003)]
        prime: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

enum Out {
    Text(String),
    Json(Value),
}

fn emit(json: bool, v: Value, text: impl FnOnce() -> String) -> Out {
    if json {
        Out::Json(v)
    } else {
        Out::Text(text())
    }
}

fn to_json<T: serde::Serialize + ?Sized>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn datum_text(d: &BalancingDatum) -> String {
    let gamma: Vec<String> = d.sparse_gamma().iter().map(|[i, j, v]| format!("({},{})={}", i, j, v)).collect();
    format!("sigma = {:?}\ntau = {:?}\ngamma = {}", d.sigma, d.tau, gamma.join(" "))
}

fn sparse_matrix(m: &HomogMatrix) -> Value {
    let mut entries = Vec::new();
    for i in 1..=m.rows() {
        for j in 1..=m.cols() {
            let p = m.get(i, j);
            if !p.is_zero() {
                entries.push(json!([i, j, p]));
            }
        }
    }
    json!({"target": m.target, "source": m.source, "entries": entries})
}

fn components_table(recs: &[ComponentRecord]) -> String {
    let mut s = format!("{:<20} {:<20} {:>5} {:>5}  {}\n", "b", "a", "D", "T", "strongly stable");
    for r in recs {
        s += &format!(
            "{:<20} {:<20} {:>5} {:>5}  {}\n",
            r.b.to_string(),
            r.a.to_string(),
            r.dim,
            r.tangent,
            if r.strongly_stable { "yes" } else { "no" }
        );
    }
    s += &format!("{} pair(s)", recs.len());
    s
}

fn read_diagram(path: &PathBuf) -> quotkit::Result<BettiDiagram> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    BettiDiagram::from_json_str(&s)
}

fn run(cmd: Cmd) -> quotkit::Result<Out> {
    Ok(match cmd {
        Cmd::Realizable { t, json } => {
            let v = realizable(&t.triple());
            emit(json, to_json(&v), || match &v.witness {
                Witness::Datum(d) => format!("realizable: true\n{}", datum_text(d)),
                Witness::Failure(f) => format!("realizable: false\nfailed: {}", f),
            })
        }
        Cmd::Balance { t, search, json } => {
            let t = t.triple();
            let d = if search { search_datum(&t)? } else { Some(construct_datum(&t)?) };
            if let Some(d) = &d {
                if !verify_datum(&t, d)? {
                    return Err(Error::Internal("datum failed verification".into()));
                }
            }
            emit(json, to_json(&d), || match &d {
                Some(d) => datum_text(d),
                None => "no balancing datum".into(),
            })
        }
        Cmd::Construct { t, format } => {
            let c = certify_ses(&t.triple())?;
            let v = json!({
                "triple": c.triple,
                "G": sparse_matrix(&c.g),
                "C": sparse_matrix(&c.c),
                "checks": c.checks,
            });
            emit(matches!(format, Format::Json), v, || {
                format!(
                    "G: O{} -> O{}\n{}\nC: O{} -> O{}\n{}\ncomposition zero: {}\nG surjective: {}\nC injective, locally free cokernel: {}\ndegrees ok: {}",
                    c.g.source, c.g.target, c.g, c.c.source, c.c.target, c.c,
                    c.checks.composition_zero, c.checks.g_surjective, c.checks.c_injective_lf, c.checks.degrees_ok
                )
            })
        }
        Cmd::Components { q, all_stable, json } => {
            let recs = if all_stable {
                enumerate_stable_pairs(&q.e, q.n, q.d)?
            } else {
                component_census(&q.e, q.n, q.d)?
            };
            emit(json, to_json(&recs), || components_table(&recs))
        }
        Cmd::Irreducible { q, json } => {
            let r = irreducible(&q.e, q.n, q.d)?;
            emit(json, to_json(&r), || {
                format!(
                    "irreducible: {}\nmost balanced pair: b = {}, a = {}\nmost balanced pair realizable: {}\nsingle block condition: {}\ncomponents: {}\nconditions agree: {}\ndegree bound holds: {}",
                    r.irreducible, r.b, r.a, r.pair_realizable, r.single_block_condition, r.components, r.conditions_agree, r.degree_bound
                )
            })
        }
        Cmd::Connected { q, json } => {
            let c = connectedness_certificate(&q.e, q.n, q.d)?;
            verify_certificate(&c).map_err(Error::Internal)?;
            emit(json, to_json(&c), || {
                let mut s = format!("connected: {}\n", c.connected);
                for (i, x) in c.nodes.iter().enumerate() {
                    s += &format!("node {}: b = {}, a = {}{}\n", i, x.b, x.a, if x.strongly_stable { " (component)" } else { "" });
                }
                for x in &c.edges {
                    let chain: Vec<String> = x.chain.iter().map(|(b, a)| format!("({}, {})", b, a)).collect();
                    s += &format!("edge {} -> {} [{:?}]: {}\n", x.from, x.to, x.kind, chain.join(" -> "));
                }
                s += &format!("groups: {:?}", c.groups);
                s
            })
        }
        Cmd::Betti { op } => match op {
            BettiOp::Decompose { diagram, json } => {
                let d = read_diagram(&diagram)?;
                let parts = betti::decompose(&d)?;
                let terms: Option<Vec<Value>> = parts.as_ref().map(|p| {
                    p.iter()
                        .map(|(c, pure)| json!({"coefficient": c.to_string(), "degrees": pure.degrees, "multiplicities": pure.mults}))
                        .collect()
                });
                emit(json, json!({"in_cone": parts.is_some(), "terms": terms}), || match &parts {
                    Some(p) => p.iter().map(|(c, pure)| format!("{} * {}", c, pure)).collect::<Vec<_>>().join("\n"),
                    None => "not in cone".into(),
                })
            }
            BettiOp::Realizable { diagram, json } => {
                let d = read_diagram(&diagram)?;
                let ok = betti::lattice_point_realizable(&d)?;
                let t = betti::diagram_to_triple(&d)?;
                let cone = betti::in_cone(&d)?;
                let v = json!({"realizable": ok, "in_cone": cone, "triple": t});
                emit(json, v, || format!("realizable: {}\nin cone: {}\ntriple: {}", ok, cone, t))
            }
        },
        Cmd::Oracle { op } => match op {
            OracleOp::KernelSplit { e, a, prime, trials, seed, json } => {
                let cfg = OracleConfig { prime, trials, seed, twist_window: None };
                let b = generic_kernel_split_numeric(&e, &a, &cfg)?;
                let v = json!({"b": b, "e": e, "a": a, "prime": prime, "trials": trials, "seed": seed});
                emit(json, v, || format!("b = {}\nprime = {}, trials = {}, seed = {}", b, prime, trials, seed))
            }
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match run(cli.cmd) {
        Ok(Out::Text(s)) => s,
        Ok(Out::Json(v)) => serde_json::to_string_pretty(&v).expect("serializable"),
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(match e {
                Error::GuardExceeded { .. } => 3,
                Error::Internal(_) => 1,
                _ => 2,
            });
        }
    };
    // a closed pipe downstream is not an error
    let _ = writeln!(std::io::stdout().lock(), "{}", text);
    ExitCode::SUCCESS
}
