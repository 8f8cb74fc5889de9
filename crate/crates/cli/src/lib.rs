//! The `kstar` command line, as a library so it can be driven in-process.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use kstar_core::{
    parse, parse_proof, proof, render, serialize, CapExceeded, Limits, NormalizeError, ProveError,
    Session, SyntaxError, Term, Vertex,
};

/// Exit status of a run.
pub mod exit {
    pub const OK: i32 = 0;
    pub const NEGATIVE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CAP: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

#[derive(Debug, Parser)]
#[command(
    name = "kstar",
    version,
    about = "Bisimilarity, normal forms and equational certificates for star expressions"
)]
struct Cli {
    /// Largest state space any single exploration may build.
    #[arg(long, global = true, value_name = "N")]
    max_states: Option<usize>,
    /// Largest certificate, in proof-tree nodes.
    #[arg(long, global = true, value_name = "N")]
    max_cert_nodes: Option<u64>,
    /// Read the term arguments from a file (one per line; `-` for stdin).
    #[arg(long, global = true, value_name = "PATH")]
    file: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a term and print it in canonical form.
    Parse { term: Option<String> },
    /// Print the reachable transition system of a term.
    Lts { term: Option<String> },
    /// Decide bisimilarity.
    Bisim {
        left: Option<String>,
        right: Option<String>,
        /// Also print a bisimulation relating the two terms.
        #[arg(long)]
        witness: bool,
    },
    /// Decide the normal-form predicate.
    Nf { term: Option<String> },
    /// Decide whether a term is normal in front of a context.
    Nfmult {
        term: Option<String>,
        context: Option<String>,
    },
    /// Decide the congruence condition of a term against a context.
    Congr {
        term: Option<String>,
        context: Option<String>,
    },
    /// Print a bisimilar normal form.
    Normalize {
        term: Option<String>,
        /// Re-verify bisimilarity, the normal-form predicate and star depth.
        #[arg(long)]
        check: bool,
    },
    /// Print the steps of a term and a certificate for its summation form.
    Expand { term: Option<String> },
    /// Produce a certificate for the equality of two bisimilar terms.
    Prove {
        left: Option<String>,
        right: Option<String>,
        /// Write the certificate to a file instead of stdout.
        #[arg(short = 'o', long = "output", value_name = "PATH")]
        output: Option<PathBuf>,
        /// Report certificate size and recursion depth on stderr.
        #[arg(long)]
        stats: bool,
    },
    /// Check a certificate file against an expected conclusion.
    Check {
        certificate: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Cap(String),
    Internal(String),
}

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Failure {
        Failure::Usage(format!("syntax error: {e}"))
    }
}

impl From<CapExceeded> for Failure {
    fn from(e: CapExceeded) -> Failure {
        Failure::Cap(e.to_string())
    }
}

impl From<NormalizeError> for Failure {
    fn from(e: NormalizeError) -> Failure {
        match e {
            NormalizeError::Cap(c) => c.into(),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<ProveError> for Failure {
    fn from(e: ProveError) -> Failure {
        match e {
            ProveError::Cap(c) => c.into(),
            e @ ProveError::CertTooLarge { .. } => Failure::Cap(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

struct Ctx<'a> {
    session: Session,
    file_terms: Option<Vec<String>>,
    out: String,
    err: String,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    /// The `n` term arguments, from the positionals or from `--file`.
    fn terms<const N: usize>(&mut self, given: [&Option<String>; N]) -> Result<[Term; N], Failure> {
        let texts: Vec<String> = match &self.file_terms {
            Some(lines) => lines.clone(),
            None => given.iter().filter_map(|t| (*t).clone()).collect(),
        };
        if texts.len() != N {
            return Err(Failure::Usage(format!(
                "expected {N} term argument{}, got {}",
                if N == 1 { "" } else { "s" },
                texts.len()
            )));
        }
        let mut out = Vec::with_capacity(N);
        for t in &texts {
            out.push(parse(t)?);
        }
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }

    fn answer(&mut self, yes: bool) -> i32 {
        self.out.push_str(if yes { "true\n" } else { "false\n" });
        if yes {
            exit::OK
        } else {
            exit::NEGATIVE
        }
    }
}

fn read_file_terms(path: &PathBuf, stdin: &mut dyn Read) -> Result<Vec<String>, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?
    };
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<S: AsRef<str>>(argv: &[S], stdin: &mut dyn Read) -> Outcome {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: exit::USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: exit::OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut limits = Limits::default();
    if let Some(n) = cli.max_states {
        limits.max_states = n;
    }
    if let Some(n) = cli.max_cert_nodes {
        limits.max_cert_nodes = n;
    }
    let mut ctx = Ctx {
        session: Session::with_limits(limits),
        file_terms: None,
        out: String::new(),
        err: String::new(),
        stdin,
    };
    let result = match &cli.file {
        Some(path) => read_file_terms(path, ctx.stdin).map(|lines| {
            ctx.file_terms = Some(lines);
        }),
        None => Ok(()),
    }
    .and_then(|()| dispatch(&cli.command, &mut ctx));
    match result {
        Ok(code) => Outcome {
            code,
            stdout: ctx.out,
            stderr: ctx.err,
        },
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (exit::USAGE, m),
                Failure::Cap(m) => (exit::CAP, m),
                Failure::Internal(m) => (exit::INTERNAL, m),
            };
            let mut stderr = ctx.err;
            let _ = writeln!(stderr, "kstar: {msg}");
            // failure paths never write partial results
            Outcome {
                code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<i32, Failure> {
    match cmd {
        Command::Parse { term } => {
            let [t] = ctx.terms([term])?;
            let _ = writeln!(ctx.out, "{}", render(&t));
            Ok(exit::OK)
        }
        Command::Lts { term } => {
            let [t] = ctx.terms([term])?;
            let lts = ctx.session.build_lts(&t)?;
            ctx.out.push_str(&lts.dump());
            Ok(exit::OK)
        }
        Command::Bisim {
            left,
            right,
            witness,
        } => {
            let [p, q] = ctx.terms([left, right])?;
            let (u, v) = (Vertex::Term(p), Vertex::Term(q));
            if !ctx.session.bisimilar(&u, &v)? {
                ctx.out.push_str("not-bisimilar\n");
                return Ok(exit::NEGATIVE);
            }
            ctx.out.push_str("bisimilar\n");
            if *witness {
                let w = ctx
                    .session
                    .bisim_witness(&u, &v)?
                    .ok_or_else(|| Failure::Internal("no witness for a bisimilar pair".into()))?;
                for (x, y) in &w.pairs {
                    let _ = writeln!(ctx.out, "{x} ~ {y}");
                }
            }
            Ok(exit::OK)
        }
        Command::Nf { term } => {
            let [t] = ctx.terms([term])?;
            let yes = ctx.session.is_nf(&t)?;
            Ok(ctx.answer(yes))
        }
        Command::Nfmult { term, context } => {
            let [p, r] = ctx.terms([term, context])?;
            let yes = ctx.session.is_nfmult(&p, &r)?;
            Ok(ctx.answer(yes))
        }
        Command::Congr { term, context } => {
            let [p, r] = ctx.terms([term, context])?;
            let yes = ctx.session.congr(&p, &r)?;
            Ok(ctx.answer(yes))
        }
        Command::Normalize { term, check } => {
            let [p] = ctx.terms([term])?;
            let q = ctx.session.normalize(&p)?;
            if *check {
                let bisim = ctx.session.bisimilar_terms(&p, &q)?;
                let nf = ctx.session.is_nf(&q)?;
                let (dp, dq) = (p.star_depth(), q.star_depth());
                if !(bisim && nf && dq <= dp) {
                    return Err(Failure::Internal(format!(
                        "normal form {q} failed its check (bisimilar {bisim}, nf {nf}, depth {dq} vs {dp})"
                    )));
                }
                let _ = writeln!(ctx.out, "{q}");
                let _ = writeln!(ctx.out, "check: bisimilar, nf, depth {dq} <= {dp}");
            } else {
                let _ = writeln!(ctx.out, "{q}");
            }
            Ok(exit::OK)
        }
        Command::Expand { term } => {
            let [p] = ctx.terms([term])?;
            let (n, cert) = kstar_core::expand(&p);
            let _ = writeln!(ctx.out, "{n}");
            let _ = writeln!(ctx.out, "{}", serialize(&cert));
            Ok(exit::OK)
        }
        Command::Prove {
            left,
            right,
            output,
            stats,
        } => {
            let [p, q] = ctx.terms([left, right])?;
            let (cert, st) = match ctx.session.prove_equal_with_stats(&p, &q) {
                Ok(r) => r,
                Err(ProveError::NotBisimilar) => {
                    ctx.out.push_str("not-bisimilar\n");
                    return Ok(exit::NEGATIVE);
                }
                Err(e) => return Err(e.into()),
            };
            let mut text = serialize(&cert);
            text.push('\n');
            match output {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
                None => ctx.out.push_str(&text),
            }
            if *stats {
                let _ = writeln!(ctx.err, "nodes: {}", st.nodes);
                let _ = writeln!(ctx.err, "recursion-depth: {}", st.recursion_depth);
            }
            Ok(exit::OK)
        }
        Command::Check {
            certificate,
            lhs,
            rhs,
        } => {
            let (l, r) = (parse(lhs)?, parse(rhs)?);
            let text = std::fs::read_to_string(certificate).map_err(|e| {
                Failure::Usage(format!("cannot read {}: {e}", certificate.display()))
            })?;
            let cert = parse_proof(&text)?;
            match proof::conclusion(&cert) {
                Ok(c) if c.lhs == l && c.rhs == r => {
                    ctx.out.push_str("valid\n");
                    Ok(exit::OK)
                }
                Ok(c) => {
                    let _ = writeln!(ctx.err, "certificate concludes {} = {}", c.lhs, c.rhs);
                    ctx.out.push_str("mismatch\n");
                    Ok(exit::NEGATIVE)
                }
                Err(e) => {
                    let _ = writeln!(ctx.err, "{e}");
                    ctx.out.push_str("ill-formed\n");
                    Ok(exit::NEGATIVE)
                }
            }
        }
    }
}
