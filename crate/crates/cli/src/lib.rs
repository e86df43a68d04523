//! Command-line front end for the analysis library.
//!
//! `run` parses argv, dispatches to one subcommand and returns the exit code
//! together with what should go to stdout and stderr. `main` only prints.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use malcev_core::brute::{brute_force_strictly_k_rich, BruteConfig, BruteVerdict, DomainSource, EXHAUSTIVE_CELLS};
use malcev_core::lattice::CongruenceLattice;
use malcev_core::lemmas::{verify_lemma_corpus, LemmaRanges};
use malcev_core::modules::{
    build_module_algebra, counterexample_function, decide_module_richness, select_case, MatrixModuleSpec, MatrixSpace,
};
use malcev_core::partial::{interpolate_in, TypeContext};
use malcev_core::structure::{
    check_sc1, classify_ct, decide_hereditary_richness, find_witness_elements, homogeneous_series, sc1_failure_witness,
    series_invariants, Verdict, DEFAULT_SERIES_CAP,
};
use malcev_core::tct::{labelled_lattice, rho_relation};
use malcev_core::{corpus, format, Analysis, ClosureConfig, Error, FiniteAlgebra, PartialFunction};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "malcev-lab", version, about = "Interpolation and richness questions for finite Mal'cev algebras")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Row cap for clone closures.
    #[arg(long, global = true, value_name = "ROWS")]
    cap: Option<usize>,
    /// Budget (type-preservation checks) for brute-force searches.
    #[arg(long, global = true, value_name = "OPS")]
    budget: Option<u64>,
    /// Seed for randomized searches.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Include wall-clock time in the report (breaks byte-identity).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct ModuleDims {
    #[arg(long)]
    q: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Congruence lattice: blocks, covers and irreducibles.
    Lattice { algebra: String },
    /// Labelled congruence lattice.
    Types {
        algebra: String,
        /// Dump ρ(α,β) for congruence indices α ≺ β.
        #[arg(long, num_args = 2, value_names = ["ALPHA", "BETA"])]
        rho: Option<Vec<usize>>,
    },
    /// Check (SC1).
    Sc1 { algebra: String },
    /// Enumerate homogeneous congruence series.
    Series { algebra: String },
    /// (CT1)-(CT3) along each homogeneous series.
    Ct { algebra: String },
    /// Decide whether every expansion is strictly k-rich.
    Decide {
        algebra: String,
        #[arg(long)]
        k: usize,
    },
    /// Is the partial function a polynomial restriction?
    Interpolate { algebra: String, function: String },
    /// Does the partial function preserve congruences and ρ relations?
    CheckTp { algebra: String, function: String },
    /// Brute-force search for a type-preserving, non-interpolable function.
    Brute {
        algebra: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_domain: usize,
        /// Number of random domains (random mode).
        #[arg(long)]
        count: Option<usize>,
        /// Search only the domain of this function file.
        #[arg(long, value_name = "FN_FILE")]
        domain: Option<String>,
    },
    /// Build the matrix module M_n(GF(q)) acting on GF(q)^(n×m).
    Module {
        #[command(flatten)]
        dims: ModuleDims,
        #[arg(long, value_name = "ALGEBRA_FILE")]
        emit: Option<String>,
    },
    /// Decide strict k-richness of a matrix module.
    ModuleDecide {
        #[command(flatten)]
        dims: ModuleDims,
        #[arg(long)]
        k: usize,
    },
    /// Construct the counterexample function for a non-rich module.
    ModuleCounterexample {
        #[command(flatten)]
        dims: ModuleDims,
        #[arg(long)]
        k: usize,
        #[arg(long, value_name = "FN_FILE")]
        emit: Option<String>,
        /// Skip checking type preservation and non-interpolability.
        #[arg(long)]
        no_verify: bool,
    },
    /// Check the module lemmata over a parameter range.
    VerifyLemmas {
        /// Upper bounds q,n,m.
        #[arg(long, value_name = "Q,N,M", default_value = "9,4,3")]
        range: String,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct Input {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Settings {
    closure_cap: usize,
    budget: Option<u64>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    version: &'static str,
    inputs: Vec<Input>,
    settings: Settings,
    exit_code: i32,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<u128>,
}

/// What a subcommand produced: exit code, structured results, text rendering.
struct Done {
    code: i32,
    results: Value,
    text: String,
}

struct Ctx {
    cfg: ClosureConfig,
    budget: Option<u64>,
    seed: Option<u64>,
    inputs: Vec<Input>,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Ctx {
    fn read(&mut self, path: &str) -> Result<String, Error> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read {path}: {e}")))?;
        self.inputs.push(Input { path: path.to_string(), sha256: digest(src.as_bytes()) });
        Ok(src)
    }

    /// A path on disk, or else the name of a bundled algebra (`z4` or `z4.alg`).
    fn algebra(&mut self, arg: &str) -> Result<FiniteAlgebra, Error> {
        if Path::new(arg).is_file() {
            let src = self.read(arg)?;
            return format::parse_algebra(&src);
        }
        let stem = Path::new(arg).file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
        let named = if arg.ends_with(".alg") || !arg.contains('.') { stem } else { arg };
        match corpus::source(named) {
            Some(src) if !arg.contains('/') => {
                self.inputs.push(Input { path: format!("bundled:{named}"), sha256: digest(src.as_bytes()) });
                format::parse_algebra(src)
            }
            _ => Err(Error::usage(format!("{arg}: no such file or bundled algebra"))),
        }
    }

    fn function(&mut self, path: &str, size: usize) -> Result<PartialFunction, Error> {
        let src = self.read(path)?;
        format::parse_function(&src, Some(size))
    }

    fn analysis(&mut self, arg: &str) -> Result<Analysis, Error> {
        let alg = self.algebra(arg)?;
        Analysis::new(alg, self.cfg)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Usage(_) => "usage",
        Error::Parse { .. } => "parse",
        Error::Resource { .. } => "resource",
        Error::InvalidCongruence(_) => "invalid-congruence",
        Error::Unsupported(_) => "unsupported",
        Error::Precondition(_) => "precondition",
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } => 3,
        _ => 2,
    }
}

fn command_name(c: &Cmd) -> &'static str {
    match c {
        Cmd::Lattice { .. } => "lattice",
        Cmd::Types { .. } => "types",
        Cmd::Sc1 { .. } => "sc1",
        Cmd::Series { .. } => "series",
        Cmd::Ct { .. } => "ct",
        Cmd::Decide { .. } => "decide",
        Cmd::Interpolate { .. } => "interpolate",
        Cmd::CheckTp { .. } => "check-tp",
        Cmd::Brute { .. } => "brute",
        Cmd::Module { .. } => "module",
        Cmd::ModuleDecide { .. } => "module-decide",
        Cmd::ModuleCounterexample { .. } => "module-counterexample",
        Cmd::VerifyLemmas { .. } => "verify-lemmas",
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let msg = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: msg, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: msg }
            };
        }
    };
    let mut ctx = Ctx {
        cfg: ClosureConfig { cap: cli.cap.unwrap_or(ClosureConfig::default().cap) },
        budget: cli.budget,
        seed: cli.seed,
        inputs: Vec::new(),
    };
    let start = Instant::now();
    let outcome = dispatch(&cli.cmd, &mut ctx);
    let timing_ms = cli.timing.then(|| start.elapsed().as_millis());
    let settings = Settings { closure_cap: ctx.cfg.cap, budget: ctx.budget, seed: ctx.seed };
    let command = command_name(&cli.cmd);
    match outcome {
        Ok(done) => {
            let stdout = if cli.json {
                let r = Report {
                    command,
                    version: VERSION,
                    inputs: ctx.inputs,
                    settings,
                    exit_code: done.code,
                    results: done.results,
                    timing_ms,
                };
                serde_json::to_string_pretty(&r).expect("report serializes") + "\n"
            } else {
                let mut t = done.text;
                if let Some(ms) = timing_ms {
                    writeln!(t, "time: {ms} ms").unwrap();
                }
                t
            };
            Outcome { code: done.code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = exit_code(&e);
            let stdout = if cli.json {
                let r = Report {
                    command,
                    version: VERSION,
                    inputs: ctx.inputs,
                    settings,
                    exit_code: code,
                    results: json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }),
                    timing_ms,
                };
                serde_json::to_string_pretty(&r).expect("report serializes") + "\n"
            } else {
                String::new()
            };
            Outcome { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn dispatch(cmd: &Cmd, ctx: &mut Ctx) -> Result<Done, Error> {
    match cmd {
        Cmd::Lattice { algebra } => lattice(ctx, algebra),
        Cmd::Types { algebra, rho } => types(ctx, algebra, rho.as_deref()),
        Cmd::Sc1 { algebra } => sc1(ctx, algebra),
        Cmd::Series { algebra } => series(ctx, algebra),
        Cmd::Ct { algebra } => ct(ctx, algebra),
        Cmd::Decide { algebra, k } => decide(ctx, algebra, *k),
        Cmd::Interpolate { algebra, function } => interpolate_cmd(ctx, algebra, function),
        Cmd::CheckTp { algebra, function } => check_tp(ctx, algebra, function),
        Cmd::Brute { algebra, k, max_domain, count, domain } => {
            brute(ctx, algebra, *k, *max_domain, *count, domain.as_deref())
        }
        Cmd::Module { dims, emit } => module(dims, emit.as_deref()),
        Cmd::ModuleDecide { dims, k } => module_decide(dims, *k),
        Cmd::ModuleCounterexample { dims, k, emit, no_verify } => {
            module_counterexample(ctx, dims, *k, emit.as_deref(), !*no_verify)
        }
        Cmd::VerifyLemmas { range } => verify_lemmas(range),
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn blocks(classes: &[Vec<u32>]) -> String {
    classes.iter().map(|c| format!("{{{}}}", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect()
}

fn pairs(ps: &[(usize, usize)]) -> String {
    if ps.is_empty() {
        return "none".into();
    }
    ps.iter().map(|(a, b)| format!("(#{a},#{b})")).collect::<Vec<_>>().join(" ")
}

fn lattice(ctx: &mut Ctx, arg: &str) -> Result<Done, Error> {
    let alg = ctx.algebra(arg)?;
    let rep = CongruenceLattice::compute(&alg)?.report();
    let mut t = String::new();
    writeln!(t, "algebra {} (size {})", alg.name, alg.size).unwrap();
    writeln!(t, "congruences: {}", rep.congruences.len()).unwrap();
    for (i, c) in rep.congruences.iter().enumerate() {
        writeln!(t, "  #{i}: {}", blocks(c)).unwrap();
    }
    let covers: Vec<String> = rep.covers.iter().map(|(a, b)| format!("#{a} < #{b}")).collect();
    writeln!(t, "covers: {}", covers.join(", ")).unwrap();
    writeln!(t, "join irreducibles (a, a-): {}", pairs(&rep.join_irreducibles)).unwrap();
    writeln!(t, "strictly meet irreducibles (m, m+): {}", pairs(&rep.strictly_meet_irreducibles)).unwrap();
    writeln!(t, "height: {}", rep.height).unwrap();
    writeln!(t, "modular: {}", rep.modular).unwrap();
    let results = json!({ "algebra": alg.name, "size": alg.size, "lattice": rep });
    Ok(Done { code: 0, results, text: t })
}

fn types(ctx: &mut Ctx, arg: &str, rho: Option<&[usize]>) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let ll = labelled_lattice(&an)?;
    let mut t = String::new();
    writeln!(t, "algebra {} (size {})", an.alg.name, an.size()).unwrap();
    for (i, c) in ll.lattice.congruences.iter().enumerate() {
        writeln!(t, "  #{i}: {}", blocks(c)).unwrap();
    }
    for c in &ll.covers {
        let sub = match &c.subtype {
            Some(s) => format!(" subtype q={} n={} h={}", s.q, s.n, s.h),
            None => String::new(),
        };
        writeln!(t, "#{} < #{}: type {}{}", c.lower, c.upper, c.tct_type, sub).unwrap();
    }
    let mut results = json!({ "algebra": an.alg.name, "size": an.size(), "labelled_lattice": ll });
    if let Some(&[a, b]) = rho {
        if a >= an.con.len() || b >= an.con.len() {
            return Err(Error::usage(format!("congruence index out of range (0..{})", an.con.len())));
        }
        let r = rho_relation(&an, a, b)?;
        writeln!(t, "rho(#{a}, #{b}): {} tuples", r.len()).unwrap();
        for tup in r.tuples() {
            writeln!(t, "  {}", tup.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).unwrap();
        }
        results["rho"] = json!({ "lower": a, "upper": b, "tuples": r.tuples() });
    }
    Ok(Done { code: 0, results, text: t })
}

fn sc1(ctx: &mut Ctx, arg: &str) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let rep = check_sc1(&an)?;
    let mut t = String::new();
    writeln!(t, "(SC1) {}", if rep.holds { "holds" } else { "fails" }).unwrap();
    writeln!(t, "violations (m, m+): {}", pairs(&rep.violations)).unwrap();
    writeln!(t, "failure pairs (a, b): {}", pairs(&rep.failure_pairs)).unwrap();
    writeln!(t, "criteria agree: {}", rep.criteria_agree).unwrap();
    let mut witness = Value::Null;
    if let Some(&pair) = rep.failure_pairs.first() {
        if let Some(elems) = find_witness_elements(&an, pair.0, pair.1)? {
            let w = sc1_failure_witness(&an, pair, elems)?;
            writeln!(t, "witness a={} o={} b={}; f:", w.a, w.o, w.b).unwrap();
            t.push_str(&format::emit_function(&w.f));
            witness = to_value(&w);
        }
    }
    let results = json!({ "algebra": an.alg.name, "sc1": rep, "witness": witness });
    Ok(Done { code: if rep.holds { 0 } else { 1 }, results, text: t })
}

fn chain(s: &[usize]) -> String {
    s.iter().map(|g| format!("#{g}")).collect::<Vec<_>>().join(" < ")
}

fn series(ctx: &mut Ctx, arg: &str) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let res = homogeneous_series(&an, DEFAULT_SERIES_CAP)?;
    let mut t = String::new();
    let mut invariants = Vec::new();
    if let Some(d) = &res.diagnostic {
        writeln!(t, "no homogeneous series: {d}").unwrap();
    }
    for s in &res.series {
        let inv = series_invariants(&an.con.lattice, s)?;
        writeln!(t, "{}  invariants {}", chain(s), if inv.iter().all(|&b| b) { "ok" } else { "VIOLATED" }).unwrap();
        invariants.push(inv);
    }
    let code = if res.diagnostic.is_some() { 1 } else { 0 };
    let results =
        json!({ "algebra": an.alg.name, "series": res.series, "diagnostic": res.diagnostic, "invariants": invariants });
    Ok(Done { code, results, text: t })
}

fn ct(ctx: &mut Ctx, arg: &str) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let res = homogeneous_series(&an, DEFAULT_SERIES_CAP)?;
    let mut t = String::new();
    if let Some(d) = &res.diagnostic {
        writeln!(t, "no homogeneous series: {d}").unwrap();
    }
    let mut reports = Vec::new();
    for s in &res.series {
        let r = classify_ct(&an, s)?;
        writeln!(t, "{}: CT1 {} CT2 {} CT3 {}", chain(s), r.ct1, r.ct2, r.ct3).unwrap();
        for q in &r.quotients {
            let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
            writeln!(
                t,
                "  #{} < #{}: type {} subtype {} dimension {} m {} CT1 {} CT2 {} CT3 {}",
                q.lower,
                q.upper,
                q.tct_type,
                opt(q.subtype),
                opt(q.dimension),
                q.m,
                q.ct1,
                q.ct2,
                q.ct3
            )
            .unwrap();
        }
        reports.push(r);
    }
    let code = if res.diagnostic.is_some() { 1 } else { 0 };
    let results = json!({ "algebra": an.alg.name, "diagnostic": res.diagnostic, "reports": reports });
    Ok(Done { code, results, text: t })
}

fn decide(ctx: &mut Ctx, arg: &str, k: usize) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let d = decide_hereditary_richness(&an, k)?;
    let word = match d.verdict {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Unsupported => "unsupported",
    };
    let text = format!("k={k}: {word} ({})\n", d.basis);
    let code = if d.verdict == Verdict::Yes { 0 } else { 1 };
    Ok(Done { code, results: json!({ "algebra": an.alg.name, "decision": d }), text })
}

fn interpolate_cmd(ctx: &mut Ctx, arg: &str, fpath: &str) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let f = ctx.function(fpath, an.size())?;
    let res = interpolate_in(&an, &f)?;
    let text = if res.interpolable { "interpolable\n" } else { "not interpolable\n" }.to_string();
    let code = if res.interpolable { 0 } else { 1 };
    Ok(Done { code, results: json!({ "algebra": an.alg.name, "function": f, "interpolation": res }), text })
}

fn check_tp(ctx: &mut Ctx, arg: &str, fpath: &str) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let f = ctx.function(fpath, an.size())?;
    let tc = TypeContext::new(&an)?;
    let cp = tc.is_congruence_preserving(&f);
    let violation = tc.violation(&f, None);
    let tp = violation.is_none();
    let mut text = format!("congruence preserving: {cp}\ntype preserving: {tp}\n");
    if let Some(v) = &violation {
        writeln!(text, "violates {v}").unwrap();
    }
    let results = json!({
        "algebra": an.alg.name,
        "congruence_preserving": cp,
        "type_preserving": tp,
        "violation": violation,
    });
    Ok(Done { code: if tp { 0 } else { 1 }, results, text })
}

fn brute(
    ctx: &mut Ctx,
    arg: &str,
    k: usize,
    max_domain: usize,
    count: Option<usize>,
    domain: Option<&str>,
) -> Result<Done, Error> {
    let an = ctx.analysis(arg)?;
    let cells = an.size().checked_pow(k as u32).unwrap_or(usize::MAX);
    let source = if let Some(p) = domain {
        let f = ctx.function(p, an.size())?;
        if f.arity != k {
            return Err(Error::usage(format!("domain file has arity {}, expected {k}", f.arity)));
        }
        DomainSource::Explicit(vec![f.domain])
    } else if ctx.seed.is_none() && count.is_none() && cells <= EXHAUSTIVE_CELLS {
        DomainSource::Exhaustive
    } else {
        let seed = *ctx.seed.get_or_insert(0);
        DomainSource::Random { seed, count: count.unwrap_or(1000) }
    };
    let cfg = BruteConfig { k, max_domain, source, budget: ctx.budget, closure: ctx.cfg };
    let rep = brute_force_strictly_k_rich(&an, &cfg)?;
    let c = &rep.coverage;
    let mut text = format!(
        "mode {}; domains {}/{}; checks {}; type preserving {}\n",
        rep.mode, c.domains_completed, c.domains_planned, c.checks, c.type_preserving
    );
    let code = match rep.verdict {
        BruteVerdict::RichUpToBound => {
            text.push_str("rich up to bound\n");
            0
        }
        BruteVerdict::CounterexampleFound => {
            text.push_str("counterexample found:\n");
            text.push_str(&format::emit_function(rep.counterexample.as_ref().expect("counterexample present")));
            1
        }
        BruteVerdict::Partial => {
            text.push_str("partial: budget exhausted\n");
            3
        }
    };
    Ok(Done { code, results: json!({ "algebra": an.alg.name, "brute": rep }), text })
}

fn spec_of(d: &ModuleDims) -> MatrixModuleSpec {
    MatrixModuleSpec { q: d.q, n: d.n, m: d.m }
}

fn write_file(path: &str, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::usage(format!("cannot write {path}: {e}")))
}

fn module(d: &ModuleDims, emit: Option<&str>) -> Result<Done, Error> {
    let alg = build_module_algebra(spec_of(d))?;
    let sp = MatrixSpace::new(d.q, d.n, d.m)?;
    let ops: Vec<&str> = alg.ops.iter().map(|o| o.name.as_str()).collect();
    let modulus = sp.field.modulus_string();
    let mut text = format!("{}: size {}; operations {}\n", alg.name, alg.size, ops.join(" "));
    if let Some(m) = &modulus {
        writeln!(text, "field GF({}) = GF({})[x]/({m})", d.q, sp.field.p).unwrap();
    }
    if let Some(p) = emit {
        write_file(p, &format::emit_algebra(&alg))?;
        writeln!(text, "wrote {p}").unwrap();
    }
    let results = json!({
        "spec": spec_of(d),
        "name": alg.name,
        "size": alg.size,
        "operations": ops,
        "field_modulus": modulus,
        "emitted": emit,
    });
    Ok(Done { code: 0, results, text })
}

fn module_decide(d: &ModuleDims, k: usize) -> Result<Done, Error> {
    let rich = decide_module_richness(d.q, d.n, d.m, k)?;
    let case = (!rich).then(|| select_case(d.q, d.n, d.m));
    let mut text = format!("strictly {k}-rich: {}\n", if rich { "yes" } else { "no" });
    if let Some(c) = case {
        writeln!(text, "counterexample case {c}").unwrap();
    }
    let results = json!({ "spec": spec_of(d), "k": k, "rich": rich, "case": case });
    Ok(Done { code: if rich { 0 } else { 1 }, results, text })
}

fn module_counterexample(
    ctx: &mut Ctx,
    d: &ModuleDims,
    k: usize,
    emit: Option<&str>,
    verify: bool,
) -> Result<Done, Error> {
    let cx = counterexample_function(d.q, d.n, d.m, k)?;
    let mut text = format!("case {}; {} points\n", cx.case_id, cx.f.len());
    if let Some(b) = cx.b {
        writeln!(text, "b = {b}").unwrap();
    }
    for fl in &cx.flags {
        writeln!(text, "note: {fl}").unwrap();
    }
    text.push_str(&format::emit_function(&cx.f));
    if let Some(p) = emit {
        write_file(p, &format::emit_function(&cx.f))?;
        writeln!(text, "wrote {p}").unwrap();
    }
    let mut code = 0;
    let mut verification = Value::Null;
    if verify {
        let an = Analysis::new(build_module_algebra(spec_of(d))?, ctx.cfg)?;
        let violation = TypeContext::new(&an)?.violation(&cx.f, None);
        let interp = interpolate_in(&an, &cx.f)?.interpolable;
        let ok = violation.is_none() && !interp;
        writeln!(text, "type preserving: {}; interpolable: {interp}", violation.is_none()).unwrap();
        if let Some(v) = &violation {
            writeln!(text, "violates {v}").unwrap();
        }
        writeln!(text, "verified: {ok}").unwrap();
        code = if ok { 0 } else { 1 };
        verification = json!({
            "type_preserving": violation.is_none(),
            "violation": violation,
            "interpolable": interp,
            "verified": ok,
        });
    }
    let results = json!({ "counterexample": cx, "emitted": emit, "verification": verification });
    Ok(Done { code, results, text })
}

fn parse_range(s: &str) -> Result<LemmaRanges, Error> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::usage(format!("bad --range {s:?}; expected Q,N,M"))))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [max_q, max_n, max_m] => Ok(LemmaRanges { max_q, max_n, max_m }),
        _ => Err(Error::usage(format!("bad --range {s:?}; expected Q,N,M"))),
    }
}

fn verify_lemmas(range: &str) -> Result<Done, Error> {
    let rep = verify_lemma_corpus(parse_range(range)?)?;
    let mut text = String::new();
    for r in &rep.results {
        let tag = if r.informational { " (informational)" } else { "" };
        writeln!(text, "{}{tag}: {} checks, {} violations", r.lemma, r.checks, r.violation_count).unwrap();
        for v in r.violations.iter().take(3) {
            writeln!(text, "    {v}").unwrap();
        }
    }
    writeln!(text, "{}", if rep.passed { "passed" } else { "FAILED" }).unwrap();
    Ok(Done { code: if rep.passed { 0 } else { 1 }, results: to_value(&rep), text })
}
