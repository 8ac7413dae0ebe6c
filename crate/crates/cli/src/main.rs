use std::fmt::{Display, Write as _};
use std::io::{ErrorKind, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hpl_core::classifier::{classify_all, classify_with, enumerate_valid_profiles, Bounds, ClassifyError};
use hpl_core::cobar::{CobarComplex, CobarConfig, CobarError};
use hpl_core::derive::{derive_prop_annihilator, derive_theorem_witness, DerivationTrace, Provenance};
use hpl_core::hopf::{render_profile, HopfError};
use hpl_core::symbolic::{ExtPolynomial, SymbolicError};
use hpl_core::{Prime, ProfileFunction};

/// Writes one line to stdout; a closed pipe ends the process quietly.
fn out(text: impl Display) {
    if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
        if e.kind() != ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
        std::process::exit(0);
    }
}

#[derive(Parser)]
#[command(name = "hpl", version, about = "Profile functions and Ext relations at odd primes")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Prime used with --profile (default 3).
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Profile entries, e.g. `[2,1]` or `2,1`, or a full `p=3;profile=[2,1]` literal.
    #[arg(long, global = true)]
    profile: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the profile's validity inequalities.
    Validate { literal: Option<String> },
    /// Draw the profile as a staircase.
    Render { literal: Option<String> },
    /// Quasi-elementary classification as JSON.
    Classify {
        literal: Option<String>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Symbolic derivations.
    Derive {
        #[command(subcommand)]
        which: DeriveCommand,
    },
    /// Cobar complex computations.
    Cobar {
        #[command(subcommand)]
        which: CobarCommand,
    },
    /// All valid profiles of a given length with their verdicts.
    Enumerate {
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 2)]
        max_entry: u32,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    generator_bound: Option<usize>,
    #[arg(long)]
    chain_bound: Option<u32>,
}

#[derive(Subcommand)]
enum DeriveCommand {
    /// `b_{n,k} b_{t,s}^{p^{k-t-s}} = 0` from the coproduct of `ξ_{t+n}^{p^s}`.
    Prop {
        literal: Option<String>,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// The witness relation for a profile with some `n_i > i`.
    Theorem { literal: Option<String> },
}

#[derive(Args)]
struct CobarArgs {
    #[arg(long)]
    cobar_max_s: Option<usize>,
    #[arg(long)]
    cobar_max_t: Option<u64>,
    /// Allow long-running verifications.
    #[arg(long)]
    heavy: bool,
}

#[derive(Subcommand)]
enum CobarCommand {
    /// `dim Ext^{s,t}`: `[PROFILE] S T`.
    Dim {
        #[arg(num_args = 2..=3, required = true)]
        args: Vec<String>,
        #[command(flatten)]
        cobar: CobarArgs,
    },
    /// Whether an Ext monomial vanishes: `[PROFILE] MONOMIAL`.
    Verify {
        #[arg(num_args = 1..=2, required = true)]
        args: Vec<String>,
        #[command(flatten)]
        cobar: CobarArgs,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(&'static str, String),
    Bound(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(..) => 1,
            Failure::Bound(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "USAGE",
            Failure::Domain(k, _) => k,
            Failure::Bound(_) => "BOUND_EXCEEDED",
        }
    }

    fn detail(&self) -> &str {
        match self {
            Failure::Usage(d) | Failure::Domain(_, d) | Failure::Bound(d) => d,
        }
    }
}

impl From<HopfError> for Failure {
    fn from(e: HopfError) -> Self {
        match e {
            HopfError::Prime(_) | HopfError::Parse { .. } => Failure::Usage(e.to_string()),
            HopfError::BoundTooSmall { .. } => Failure::Bound(e.to_string()),
            _ => Failure::Domain("DOMAIN", e.to_string()),
        }
    }
}

impl From<SymbolicError> for Failure {
    fn from(e: SymbolicError) -> Self {
        let detail = e.to_string();
        match e {
            SymbolicError::Parse { .. } => Failure::Usage(detail),
            SymbolicError::InvalidSymbol(_) | SymbolicError::ZeroElement { .. } => {
                Failure::Domain("INVALID_SYMBOL", detail)
            }
            SymbolicError::InvalidProfile(_) => Failure::Domain("INVALID_PROFILE", detail),
            SymbolicError::Hypothesis(_) => Failure::Domain("HYPOTHESIS", detail),
            SymbolicError::NotApplicable(_) => Failure::Domain("NOT_APPLICABLE", detail),
            SymbolicError::DerivationFailed(_) => Failure::Domain("DERIVATION_FAILED", detail),
            SymbolicError::Hopf(h) => h.into(),
        }
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::InvalidProfile { .. } => Failure::Domain("INVALID_PROFILE", e.to_string()),
            ClassifyError::Symbolic(s) => s.into(),
        }
    }
}

impl From<CobarError> for Failure {
    fn from(e: CobarError) -> Self {
        let detail = e.to_string();
        match e {
            CobarError::BoundExceeded(_) => Failure::Bound(detail),
            CobarError::InvalidProfile(_) => Failure::Domain("INVALID_PROFILE", detail),
            CobarError::InvalidSymbol(_) => Failure::Domain("INVALID_SYMBOL", detail),
            CobarError::NotACocycle { .. } => Failure::Domain("NOT_A_COCYCLE", detail),
            CobarError::Hopf(h) => h.into(),
            CobarError::ProfileMismatch | CobarError::UnknownMonomial(_) => Failure::Domain("DOMAIN", detail),
        }
    }
}

struct Ctx {
    json: bool,
    prime: Option<u64>,
    profile: Option<String>,
}

impl Ctx {
    fn profile(&self, literal: Option<&str>) -> Result<ProfileFunction, Failure> {
        let pf: ProfileFunction = match (literal, &self.profile) {
            (Some(_), Some(_)) => {
                return Err(Failure::Usage(
                    "profile given both positionally and with --profile".into(),
                ))
            }
            (None, None) => return Err(Failure::Usage("a profile is required".into())),
            (Some(lit), None) => lit.parse()?,
            (None, Some(entries)) if entries.contains("p=") => entries.parse()?,
            (None, Some(entries)) => {
                let inner = entries.trim().trim_start_matches('[').trim_end_matches(']');
                format!("p={};profile=[{inner}]", self.prime.unwrap_or(3)).parse()?
            }
        };
        if let Some(p) = self.prime {
            if p != pf.prime().as_u64() {
                return Err(Failure::Usage(format!(
                    "--prime {p} disagrees with profile prime {}",
                    pf.prime()
                )));
            }
        }
        Ok(pf)
    }

    fn emit(&self, text: impl FnOnce() -> String, value: impl FnOnce() -> Value) {
        if self.json {
            out(serde_json::to_string_pretty(&value()).expect("JSON values serialize"));
        } else {
            let t = text();
            out(t.strip_suffix('\n').unwrap_or(&t));
        }
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize")
}

fn bounds(pf: &ProfileFunction, args: &BoundArgs) -> Bounds {
    let mut b = Bounds::defaults_for(pf);
    if let Some(g) = args.generator_bound {
        b.generator_bound = g;
    }
    if let Some(c) = args.chain_bound {
        b.chain_bound = c;
    }
    b
}

fn trace_text(trace: &DerivationTrace) -> String {
    let mut out = String::new();
    let from = match trace.provenance {
        Provenance::Coproduct { generator, power } => format!("coproduct of xi_{generator}^(p^{power})"),
        Provenance::Given => "given".into(),
    };
    let _ = writeln!(out, "profile: {}", trace.profile);
    let _ = writeln!(out, "start ({from}): {} = 0", trace.initial);
    for step in &trace.steps {
        let _ = write!(out, "{}: {} = 0", step.op, step.after);
        if !step.killed_symbols.is_empty() {
            let killed: Vec<String> = step.killed_symbols.iter().map(|s| s.to_string()).collect();
            let _ = write!(out, "  (zero: {})", killed.join(", "));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "final: {} = 0", trace.final_relation);
    out
}

fn cobar_config(cobar: &CobarArgs, s: usize, t: u64) -> CobarConfig {
    let base = if cobar.heavy {
        CobarConfig::heavy()
    } else {
        CobarConfig::default()
    };
    CobarConfig {
        max_s: cobar.cobar_max_s.unwrap_or(base.max_s.max(s + 1)),
        max_t: cobar.cobar_max_t.unwrap_or(t),
        max_words: base.max_words,
    }
}

fn cache_path(pf: &ProfileFunction, s: usize, t: u64) -> Option<PathBuf> {
    let dir = std::env::var_os("HPL_CACHE_DIR")?;
    let entries: Vec<String> = pf.entries().iter().map(|e| e.to_string()).collect();
    Some(PathBuf::from(dir).join(format!("dim_p{}_{}_{s}_{t}.txt", pf.prime(), entries.join("-"))))
}

fn cobar_dim(pf: &ProfileFunction, s: usize, t: u64, cobar: &CobarArgs) -> Result<usize, Failure> {
    let cached = cache_path(pf, s, t);
    if let Some(dim) = cached
        .as_ref()
        .and_then(|path| std::fs::read_to_string(path).ok())
        .and_then(|text| text.trim().parse().ok())
    {
        return Ok(dim);
    }
    let dim = CobarComplex::new(pf, cobar_config(cobar, s, t))?.cohomology_dim(s, t)?;
    if let Some(path) = cached {
        let _ = std::fs::create_dir_all(path.parent().expect("cache files live in a directory"));
        let _ = std::fs::write(path, format!("{dim}\n"));
    }
    Ok(dim)
}

fn parse_num<T: std::str::FromStr>(what: &str, text: &str) -> Result<T, Failure> {
    text.parse()
        .map_err(|_| Failure::Usage(format!("{what} must be a non-negative integer, got {text:?}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx = Ctx {
        json: cli.json,
        prime: cli.prime,
        profile: cli.profile,
    };
    if let Some(p) = ctx.prime {
        Prime::new(p).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Validate { literal } => {
            let pf = ctx.profile(literal.as_deref())?;
            let violation = pf.first_violation();
            ctx.emit(
                || match violation {
                    None => "true".into(),
                    Some(v) => format!("false\nviolated: {v}"),
                },
                || json!({"profile": pf, "valid": violation.is_none(), "violation": violation}),
            );
        }
        Command::Render { literal } => {
            let pf = ctx.profile(literal.as_deref())?;
            let art = render_profile(&pf);
            ctx.emit(|| art.clone(), || json!({"profile": pf, "diagram": art}));
        }
        Command::Classify { literal, bounds: b } => {
            let pf = ctx.profile(literal.as_deref())?;
            let c = classify_with(&pf, bounds(&pf, &b))?;
            out(serde_json::to_string_pretty(&c).expect("classification serializes"));
        }
        Command::Derive { which } => match which {
            DeriveCommand::Prop { literal, t, s, n, k } => {
                let pf = ctx.profile(literal.as_deref())?;
                let d = derive_prop_annihilator(&pf, t, s, n, k)?;
                ctx.emit(|| trace_text(&d.trace), || to_json(&d.trace));
            }
            DeriveCommand::Theorem { literal } => {
                let pf = ctx.profile(literal.as_deref())?;
                let w = derive_theorem_witness(&pf)?;
                ctx.emit(
                    || {
                        let mut text = trace_text(&w.trace);
                        if let Some(step) = &w.cleaner {
                            let _ = writeln!(text, "cleaner {}: {} = 0", step.op, step.after);
                        }
                        text
                    },
                    || to_json(&w),
                );
            }
        },
        Command::Cobar { which } => match which {
            CobarCommand::Dim { args, cobar } => {
                let (lit, rest) = match args.len() {
                    3 => (Some(args[0].as_str()), &args[1..]),
                    _ => (None, &args[..]),
                };
                let pf = ctx.profile(lit)?;
                let s: usize = parse_num("s", &rest[0])?;
                let t: u64 = parse_num("t", &rest[1])?;
                let dim = cobar_dim(&pf, s, t, &cobar)?;
                ctx.emit(
                    || dim.to_string(),
                    || json!({"profile": pf, "s": s, "t": t, "dim": dim}),
                );
            }
            CobarCommand::Verify { args, cobar } => {
                let (lit, mono_text) = match args.len() {
                    2 => (Some(args[0].as_str()), args[1].as_str()),
                    _ => (None, args[0].as_str()),
                };
                let pf = ctx.profile(lit)?;
                let poly = ExtPolynomial::parse(pf.prime(), mono_text)?;
                let Some((mono, _)) = poly.as_monomial() else {
                    return Err(Failure::Usage(format!("{mono_text:?} is not a single monomial")));
                };
                let (s, t) = mono.bidegree(pf.prime());
                let t = u64::try_from(t).map_err(|_| Failure::Bound(format!("internal degree {t} is too large")))?;
                let cx = CobarComplex::new(&pf, cobar_config(&cobar, s as usize, t))?;
                let v = cx.verify_ext_monomial(mono)?;
                ctx.emit(
                    || v.to_string(),
                    || json!({"profile": pf, "monomial": mono.to_string(), "verdict": v.verdict, "s": v.s, "t": v.t}),
                );
            }
        },
        Command::Enumerate {
            max_len,
            max_entry,
            bounds: b,
        } => {
            let p = Prime::new(ctx.prime.unwrap_or(3)).map_err(|e| Failure::Usage(e.to_string()))?;
            let profiles = enumerate_valid_profiles(p, max_len, max_entry);
            let results = if b.generator_bound.is_none() && b.chain_bound.is_none() {
                classify_all(&profiles)
            } else {
                profiles.iter().map(|pf| classify_with(pf, bounds(pf, &b))).collect()
            };
            for r in results {
                let c = r?;
                if ctx.json {
                    let line = json!({"profile": c.profile, "verdict": c.verdict, "rule": c.rule, "k": c.k});
                    out(&line);
                } else {
                    let verdict = to_json(&c.verdict);
                    let rule = c.rule.map(|r| to_json(&r));
                    let mut line = format!("{} {}", c.profile, verdict.as_str().unwrap_or_default());
                    if let Some(r) = rule {
                        let _ = write!(line, " {}", r.as_str().unwrap_or_default());
                    }
                    if let Some(k) = c.k {
                        let _ = write!(line, " k={k}");
                    }
                    out(&line);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let json = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if json && e.use_stderr() {
                let detail = e.to_string();
                let first = detail.lines().next().unwrap_or_default().trim_start_matches("error: ");
                out(json!({"error": "USAGE", "detail": first}));
                return ExitCode::from(2);
            }
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if json {
                out(json!({"error": f.kind(), "detail": f.detail()}));
            } else {
                eprintln!("error: {}", f.detail());
            }
            ExitCode::from(f.code())
        }
    }
}
