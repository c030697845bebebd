use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use canonring::gn::{build_gn, verify_gn};
use canonring::io;
use canonring::linear_system::{self, enumerate_linear_system, extremals, is_member};
use canonring::metric::{linear_equiv_metric_with, Point};
use canonring::semiring::{decompose, graded_cone, hilbert_basis, Outcome};
use canonring::witness::{self, WitnessInstance};
use canonring::{Budgets, Divisor, Error, FiniteGraph, RgdElement};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "canonring", version, about = "Divisors, linear systems and canonical semi-rings of graphs")]
struct Cli {
    /// JSON file of search budgets.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long)]
    graph: PathBuf,
    /// `K`, inline JSON, or a JSON file.
    #[arg(long, default_value = "K")]
    divisor: String,
    #[arg(long, default_value_t = 1)]
    m: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Orbit representatives of R(G, m·D).
    Rgd(SystemArgs),
    /// Extremals of R(G, m·D).
    Extremals(SystemArgs),
    /// Hilbert basis of the graded semi-ring of D.
    Generators {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "K")]
        divisor: String,
    },
    /// Decide whether a target in R(G, m·D) is generated.
    CheckGenerated {
        #[command(flatten)]
        system: SystemArgs,
        /// Vertex values of the target.
        #[arg(long)]
        target: String,
        /// Use every element of degree below this instead of the Hilbert basis.
        #[arg(long)]
        below: Option<u32>,
    },
    /// Non-generation of R(G_n) in degree below n.
    VerifyGn {
        #[arg(long)]
        n: usize,
    },
    /// Random invariant checks on R(G, m·D), reproducible with --seed.
    Props {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// Metric graph commands.
    #[command(subcommand)]
    Trop(Trop),
}

#[derive(Subcommand)]
enum Trop {
    /// Linear equivalence of two divisors on a metric graph.
    Equiv {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        d: String,
        #[arg(long)]
        d2: String,
    },
    /// Non-finite generation certificates for an instance.
    Witness {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u32>,
    },
    /// The same for K_n with uniform edge lengths.
    CompleteGraph {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        len: i64,
        #[arg(long, value_delimiter = ',')]
        s: Vec<u32>,
    },
}

/// A command result: the rendered output and whether the verified claim held.
struct Rendered {
    out: String,
    holds: bool,
}

fn done(out: String) -> Rendered {
    Rendered { out, holds: true }
}

enum Failure {
    Input(String),
    Budget(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) | Error::DegreeOverflow { .. } => Failure::Budget(e.to_string()),
            Error::VerificationFailed(_) | Error::HypothesisFailure(_) => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// `K`, an inline JSON value, or a path.
fn inline_or_file(arg: &str) -> Run<String> {
    let t = arg.trim();
    if t == "K" || t.starts_with('{') || t.starts_with('[') {
        Ok(t.to_string())
    } else {
        read(Path::new(t))
    }
}

fn budgets(config: Option<&Path>) -> Run<Budgets> {
    let Some(path) = config else {
        return Ok(Budgets::default());
    };
    let b: Budgets = serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("config: {e}")))?;
    b.validate().map_err(|e| Failure::Input(format!("config: {e}")))?;
    Ok(b)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}

fn load_system(a: &SystemArgs) -> Run<(FiniteGraph, Divisor)> {
    let g = io::parse_graph(&read(&a.graph)?)?;
    let d = io::parse_divisor(&inline_or_file(&a.divisor)?, &g)?;
    Ok((g, d))
}

fn elements_text(els: &[RgdElement]) -> String {
    let mut s = String::new();
    for e in els {
        let _ = writeln!(s, "{} {:?}", e.degree, e.function.values());
    }
    s
}

fn system_report(kind: &str, a: &SystemArgs, format: Format, b: &Budgets) -> Run<Rendered> {
    let (g, d) = load_system(a)?;
    let els = if kind == "rgd" {
        enumerate_linear_system(&g, &d, a.m, b)?
    } else {
        extremals(&g, &d, a.m, b)?
    };
    let md = i64::from(a.m) * d.clone();
    Ok(done(match format {
        Format::Dot => g.to_dot(Some(&md)),
        Format::Text => format!("{} elements of degree {}\n{}", els.len(), a.m, elements_text(&els)),
        Format::Json => pretty(&json!({
            "kind": kind,
            "divisor": io::divisor_json(&d),
            "m": a.m,
            "count": els.len(),
            "elements": els.iter().map(io::element_json).collect::<Vec<_>>(),
        })),
    }))
}

fn generators(graph: &Path, divisor: &str, format: Format, b: &Budgets) -> Run<Rendered> {
    let g = io::parse_graph(&read(graph)?)?;
    let d = io::parse_divisor(&inline_or_file(divisor)?, &g)?;
    let cone = graded_cone(&g, &d)?;
    let basis = hilbert_basis(&cone, b)?;
    let degrees: Vec<u32> = basis.degrees().into_iter().collect();
    Ok(done(match format {
        Format::Dot => g.to_dot(Some(&d)),
        Format::Text => format!(
            "{} generators, degrees {degrees:?}, height bound {}\n{}",
            basis.elements.len(),
            basis.height_bound,
            elements_text(&basis.elements)
        ),
        Format::Json => pretty(&json!({
            "divisor": io::divisor_json(&d),
            "degrees": degrees,
            "height_bound": basis.height_bound,
            "generators": basis.elements.iter().map(io::element_json).collect::<Vec<_>>(),
        })),
    }))
}

fn check_generated(a: &SystemArgs, target: &str, below: Option<u32>, format: Format, b: &Budgets) -> Run<Rendered> {
    let (g, d) = load_system(a)?;
    let f = io::parse_function(&inline_or_file(target)?, &g)?;
    let md = i64::from(a.m) * d.clone();
    if !is_member(&g, &md, &f)? {
        return Err(Failure::Input(format!("target is not in R(G, {}·D)", a.m)));
    }
    let gens = match below {
        Some(k) => {
            let mut all = Vec::new();
            for j in 1..k {
                all.extend(enumerate_linear_system(&g, &d, j, b)?);
            }
            all
        }
        None => hilbert_basis(&graded_cone(&g, &d)?, b)?.elements,
    };
    let target_el = RgdElement::new(&f, a.m);
    let cert = decompose(&target_el, &gens, b)?;
    let holds = cert.is_generated();
    let out = match format {
        Format::Dot => g.to_dot(Some(&(md + g.div(&f)?))),
        Format::Text => match &cert.outcome {
            Outcome::Generated { terms } => {
                let mut s = format!("generated by {} terms\n", terms.len());
                for t in terms {
                    let _ = writeln!(s, "{:+} + product of {:?}", t.shift, t.factors);
                }
                s
            }
            Outcome::Absent { uncovered } => format!("not generated; uncovered vertices {uncovered:?}\n"),
        },
        Format::Json => pretty(&json!({
            "generated": holds,
            "generators": gens.iter().map(io::element_json).collect::<Vec<_>>(),
            "certificate": serde_json::to_value(&cert).expect("certificate serialises"),
        })),
    };
    Ok(Rendered { out, holds })
}

fn verify_gn_cmd(n: usize, format: Format, b: &Budgets) -> Run<Rendered> {
    let report = verify_gn(n, b)?;
    let holds = report.passed();
    let out = match format {
        Format::Dot => {
            let gn = build_gn(n)?;
            gn.graph.to_dot(Some(&gn.witness_target()))
        }
        Format::Text => format!(
            "G_{n}: {} vertices, {} edges; witness {}, extremal {}, generated below degree {}: {}\n",
            report.vertices,
            report.edges,
            report.witness_ok,
            report.extremal,
            n,
            report.generated_below
        ),
        Format::Json => pretty(&io::gn_report_json(&report)),
    };
    Ok(Rendered { out, holds })
}

fn props(a: &SystemArgs, cases: usize, seed: u64, format: Format, b: &Budgets) -> Run<Rendered> {
    let (g, d) = load_system(a)?;
    if a.m == 0 {
        return Err(Failure::Input("m must be positive".into()));
    }
    let levels: Vec<Vec<RgdElement>> = (1..=a.m)
        .map(|j| enumerate_linear_system(&g, &d, j, b))
        .collect::<canonring::Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut run = 0;
    for case in 0..cases {
        let i = rng.gen_range(0..levels.len());
        let j = rng.gen_range(0..levels.len());
        if levels[i].is_empty() || levels[j].is_empty() {
            continue;
        }
        run += 1;
        let x = &levels[i][rng.gen_range(0..levels[i].len())];
        let y = &levels[j][rng.gen_range(0..levels[j].len())];
        let (dx, dy) = (g.div(&x.function)?, g.div(&y.function)?);
        let prod = linear_system::odot(&x.function, &y.function)?;
        let deg_m = |k: u32| i64::from(k) * d.clone();
        let mut bad = Vec::new();
        if dx.degree() != 0 {
            bad.push("deg div f = 0");
        }
        if g.div(&prod)? != dx + dy {
            bad.push("div(f ⊙ g) = div f + div g");
        }
        if !is_member(&g, &deg_m(x.degree + y.degree), &prod)? {
            bad.push("⊙ closure");
        }
        let sum = linear_system::oplus(&x.function, &y.function)?;
        if !is_member(&g, &deg_m(x.degree.max(y.degree)), &sum)? {
            bad.push("⊕ closure");
        }
        if !bad.is_empty() {
            failures.push(json!({ "case": case, "f": x.function.values(), "g": y.function.values(), "failed": bad }));
        }
    }
    let holds = failures.is_empty();
    let out = match format {
        Format::Text | Format::Dot => format!("{run} cases, {} failures (seed {seed})\n", failures.len()),
        Format::Json => pretty(&json!({ "seed": seed, "cases": run, "failures": failures })),
    };
    Ok(Rendered { out, holds })
}

fn trop_equiv(graph: &Path, d: &str, d2: &str, format: Format, b: &Budgets) -> Run<Rendered> {
    let g = io::parse_metric_graph(&read(graph)?)?;
    let a = io::parse_metric_divisor(&inline_or_file(d)?, &g)?;
    let c = io::parse_metric_divisor(&inline_or_file(d2)?, &g)?;
    let f = linear_equiv_metric_with(&g, &a, &c, b)?;
    let holds = f.is_some();
    let out = match format {
        Format::Dot => io::metric_to_dot(&g, Some(&(a - c)), &[]),
        Format::Text => match &f {
            Some(f) => format!("equivalent; witness {:?}\n", f.format_breakpoints()),
            None => "not equivalent\n".to_string(),
        },
        Format::Json => pretty(&json!({
            "graph": io::metric_graph_json(&g),
            "d": io::metric_divisor_json(&a),
            "d2": io::metric_divisor_json(&c),
            "equivalent": holds,
            "witness": f.as_ref().map(io::pl_json),
        })),
    };
    Ok(Rendered { out, holds })
}

fn certificates(inst: &WitnessInstance, s: &[u32], format: Format, b: &Budgets) -> Run<Rendered> {
    let hyp = witness::check_hypotheses(inst, b)?;
    if !hyp.passed() {
        let out = match format {
            Format::Json => pretty(&json!({ "hypotheses": io::hypotheses_json(&hyp), "holds": false })),
            _ => "hypotheses fail\n".to_string(),
        };
        return Ok(Rendered { out, holds: false });
    }
    let report = witness::nonfinite_certificate(inst, s, b)?;
    let holds = report.holds();
    let g = &inst.graph;
    let out = match format {
        Format::Json => pretty(&io::nonfinite_json(inst, &report)),
        Format::Dot => {
            let mut s = String::new();
            for c in &report.certificates {
                let marks = [
                    (Point::Vertex(inst.p()), "p".to_string()),
                    (Point::Vertex(inst.q()), "q".to_string()),
                    (c.witness.r.clone(), "r".to_string()),
                ];
                s.push_str(&io::metric_to_dot(g, Some(&c.witness.ftilde.div(g)), &marks));
            }
            s
        }
        Format::Text => {
            let mut s = format!("genus {}, degree {}\n", hyp.genus, hyp.degree);
            for c in &report.certificates {
                let w = &c.witness;
                let _ = writeln!(
                    s,
                    "s = {}: r at offset {}, orders {:?}, extremal {}, obstruction {}",
                    w.s,
                    canonring::rational::format(&w.r_offset),
                    w.orders,
                    w.extremal,
                    c.obstruction.holds
                );
            }
            s.push_str(&report.statement());
            s.push('\n');
            s
        }
    };
    Ok(Rendered { out, holds })
}

fn run(cli: Cli) -> Run<Rendered> {
    let b = budgets(cli.config.as_deref())?;
    let format = cli.format;
    match &cli.command {
        Command::Rgd(a) => system_report("rgd", a, format, &b),
        Command::Extremals(a) => system_report("extremals", a, format, &b),
        Command::Generators { graph, divisor } => generators(graph, divisor, format, &b),
        Command::CheckGenerated { system, target, below } => check_generated(system, target, *below, format, &b),
        Command::VerifyGn { n } => verify_gn_cmd(*n, format, &b),
        Command::Props { system, cases } => props(system, *cases, cli.seed, format, &b),
        Command::Trop(Trop::Equiv { graph, d, d2 }) => trop_equiv(graph, d, d2, format, &b),
        Command::Trop(Trop::Witness { instance, s }) => {
            let inst = io::parse_witness_instance(&read(instance)?)?;
            certificates(&inst, s, format, &b)
        }
        Command::Trop(Trop::CompleteGraph { n, len, s }) => {
            let inst = witness::complete_graph_instance(*n, *len)?;
            let s = if s.is_empty() { vec![inst.n] } else { s.clone() };
            certificates(&inst, &s, format, &b)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = cli.format == Format::Json;
    match run(cli) {
        Ok(Rendered { out, holds }) => {
            print!("{out}");
            if holds {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            if json_errors {
                print!("{}", pretty(&json!({ "holds": false, "error": msg })));
            }
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            if json_errors {
                print!("{}", pretty(&json!({ "error": "budget exceeded", "detail": msg })));
            }
            ExitCode::from(3)
        }
    }
}
