//! `venlab`: runs the certifiers and reports their certificates.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use venlab::parse::{parse_abstract, parse_expr};
use venlab::poly::Point;
use venlab::stable::{self, QSpec};
use venlab::{suite, venereau, Certificate, Coeff, MultiPoly, PolyMap, Var, VerifyOptions};

#[derive(Parser, Debug)]
#[command(name = "venlab", version, about = "Certificates for Vénéreau-type polynomials")]
struct Cli {
    /// Write the certificate array as JSON to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Bound on the number of terms of an exponential series.
    #[arg(long, global = true, value_name = "N")]
    max_iter: Option<usize>,
    /// Seed for the random-point oracles.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Every certifier over the shipped corpus.
    VerifyAll,
    /// θ_n: conjugation, J = 1, exponential form, integrality iff n >= 3.
    Theta { n: u32 },
    /// φ_n: closed form, φ_n(p), J = 1, exponential form, integrality iff n >= 2.
    Phi { n: u32 },
    /// α_n ∘ φ_n and the f/g equivalence square.
    Alpha { n: u32 },
    /// The coordinate construction for y + xQ, Q = x^2 Q1 + x v Q2.
    CheckCoordinate {
        /// Q1 in (x, V, W).
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        q1: String,
        /// Q2 in (V^2, W).
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        q2: String,
    },
    /// The stably tame construction for y + xQ(v, w).
    CheckStable {
        /// Q in (x, V, W); lowercase v, w are accepted.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Zero-frame coordinate check for y + x Q0(v0, w0).
    Hyperplane {
        #[arg(long, allow_hyphen_values = true)]
        q0: String,
    },
    /// Parts (1) and (2) of the hyperplane statement for f - c.
    Cusp {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// The three membership tests for h in (Y, V, W).
    LemmaIdeal {
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
    /// Parses and prints a polynomial, or its value at a point.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Assignments such as `x=1,y=-2/3`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Prints a named construction: f, g, theta, phi, alpha, alpha-phi, psi.
    Print { name: String, n: Option<u32> },
}

/// Errors that end the run with exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

enum Outcome {
    Certificates(Vec<Certificate>),
    Text(String),
}

fn options(cli: &Cli) -> VerifyOptions {
    let mut o = VerifyOptions::default();
    if let Some(m) = cli.max_iter {
        o.max_iter = m;
    }
    if let Some(s) = cli.seed {
        o.seed = s;
    }
    o
}

fn abstract_arg(what: &str, text: &str) -> Result<MultiPoly, Usage> {
    parse_abstract(text).map_err(|e| Usage(format!("--{}: {}", what, e)))
}

fn parse_point(text: &str) -> Result<Point, Usage> {
    let mut pt = Point::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Usage(format!("--at: expected name=value, got '{}'", part)))?;
        let var = Var::from_name(name.trim())
            .ok_or_else(|| Usage(format!("--at: unknown variable '{}'", name.trim())))?;
        let c: Coeff = value
            .trim()
            .parse()
            .map_err(|e: String| Usage(format!("--at {}: {}", name.trim(), e)))?;
        pt.insert(var, c);
    }
    Ok(pt)
}

fn named(name: &str, n: Option<u32>) -> Result<String, Usage> {
    let need = || n.ok_or_else(|| Usage(format!("print {}: missing N", name)));
    let map = |m: PolyMap| {
        let lines: Vec<String> = m.images().iter().map(|(v, p)| format!("{} -> {}", v, p)).collect();
        lines.join("\n")
    };
    Ok(match name {
        "f" => venereau::f(need()?).to_string(),
        "g" => venereau::g(need()?).to_string(),
        "theta" => map(venereau::theta(need()?)),
        "phi" => map(venereau::phi(need()?)),
        "alpha" => map(venereau::alpha(need()?)),
        "alpha-phi" => map(venereau::alpha_phi(need()?)),
        "psi" => map(venereau::psi()),
        _ => {
            return Err(Usage(format!(
                "print: unknown name '{}' (expected f, g, theta, phi, alpha, alpha-phi, psi)",
                name
            )))
        }
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome, Usage> {
    let o = options(cli);
    let one = |c: Certificate| Ok(Outcome::Certificates(vec![c]));
    match &cli.verb {
        Verb::VerifyAll => Ok(Outcome::Certificates(suite::verify_all(&o))),
        Verb::Theta { n } => one(venereau::verify_theta(*n, &o)),
        Verb::Phi { n } => one(venereau::verify_phi(*n, &o)),
        Verb::Alpha { n } => Ok(Outcome::Certificates(vec![
            venereau::verify_alpha_phi(*n, &o),
            venereau::verify_fg_equivalence(*n, &o),
        ])),
        Verb::CheckCoordinate { q1, q2 } => {
            let q1 = abstract_arg("q1", q1)?;
            let q2 = abstract_arg("q2", q2)?;
            // Malformed input is a usage error; the certificate covers the rest.
            venereau::coordinate_abstract(&q1, &q2, venereau::CorrectionSign::Alternating)?;
            one(suite::coordinate_certificate(&q1, &q2, &o))
        }
        Verb::CheckStable { q } => {
            let spec = QSpec::from_abstract(&abstract_arg("q", q)?)?;
            one(stable::verify_stable(&spec, &o))
        }
        Verb::Hyperplane { q0 } => one(venereau::hyperplane_check(&abstract_arg("q0", q0)?, &o)),
        Verb::Cusp { q } => one(venereau::cusp_checks(&abstract_arg("q", q)?, &o)),
        Verb::LemmaIdeal { h } => {
            let (_, cert) = venereau::lemma_ideal_oracle(&abstract_arg("h", h)?)?;
            one(cert)
        }
        Verb::Eval { expr, at } => {
            let p = parse_expr(expr)?;
            match at {
                None => Ok(Outcome::Text(p.to_string())),
                Some(at) => Ok(Outcome::Text(p.eval(&parse_point(at)?)?.to_string())),
            }
        }
        Verb::Print { name, n } => Ok(Outcome::Text(named(name, *n)?)),
    }
}

fn report(certs: &[Certificate]) -> String {
    let mut out = String::new();
    for c in certs {
        out.push_str(&format!(
            "[{}] {} ({} ms)\n",
            serde_json::to_value(c.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            c.claim_id,
            c.ms
        ));
        for ch in &c.checks {
            let mark = if ch.pass { "ok  " } else { "FAIL" };
            match &ch.witness {
                Some(w) => out.push_str(&format!("  {} {}: {}\n", mark, ch.name, w)),
                None => out.push_str(&format!("  {} {}\n", mark, ch.name)),
            }
        }
    }
    let ok = certs.iter().filter(|c| c.is_verified()).count();
    out.push_str(&format!("{} of {} claims verified\n", ok, certs.len()));
    out
}

fn write_json(path: &PathBuf, certs: &[Certificate]) -> Result<(), Usage> {
    let text = serde_json::to_string_pretty(certs)?;
    fs::write(path, text + "\n").map_err(|e| Usage(format!("--json {}: {}", path.display(), e)))
}

fn run(args: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(Usage(msg)) => {
            eprintln!("error: {}", msg);
            return 2;
        }
    };
    let (text, certs) = match outcome {
        Outcome::Certificates(c) => (report(&c), c),
        Outcome::Text(t) => (t + "\n", Vec::new()),
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes());
    if let Some(path) = &cli.json {
        if let Err(Usage(msg)) = write_json(path, &certs) {
            eprintln!("error: {}", msg);
            return 2;
        }
    }
    if certs.iter().all(Certificate::is_verified) {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args_os().map(|a| a.to_string_lossy().into_owned()).collect();
    std::panic::set_hook(Box::new(|info| eprintln!("internal error: {}", info)));
    match std::panic::catch_unwind(|| run(args)) {
        Ok(code) => ExitCode::from(code),
        Err(_) => ExitCode::from(1),
    }
}
