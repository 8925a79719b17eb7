//! Command-line front end: instance files in, answers out, with automatic
//! routing between the polynomial algorithms and the exhaustive oracle.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use abduction::diverse::{div_affine2, div_ep, div_oracle_with, DivOutcome};
use abduction::gen::{generate, GenFragment};
use abduction::lattice::{profile_formula, verdict, ComplexityVerdict, LanguageProfile, Problem};
use abduction::oracle::{ExplanationSpace, OracleConfig};
use abduction::polyfacet::{isfacet_affine2, isfacet_dualhorn, isfacet_en, isfacet_imp, relevance_poly};
use abduction::reduce::{
    abd_to_div, abd_to_isfacet, efpp_substitute, efpp_substitute_facet, elim_pos_units, neg_unit_to_facet,
    pos2sat_to_div, EfppDefinition, Reduction,
};
use abduction::{
    parse_definitions, parse_instance, render, AbductionInstance, DivInstance, Error, FacetInstance, Fragment,
    Parsed, VarSet,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_WRONG_FRAGMENT: i32 = 65;
pub const EXIT_BUDGET: i32 = 66;
pub const EXIT_INTERNAL: i32 = 67;

#[derive(Debug, Parser)]
#[command(name = "abduce", version, about = "Propositional abduction: explanations, facets and diversity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Algorithm selection.
    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    /// Print one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of assignments the oracle may enumerate.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Auto,
    Poly,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Abd,
    Isfacet,
    Relevance,
    Divabd,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Abd => Problem::Abd,
            ProblemArg::Isfacet => Problem::IsFacet,
            ProblemArg::Relevance => Problem::Relevance,
            ProblemArg::Divabd => Problem::DivAbd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    Efpp,
    Abd2facet,
    Elimpos,
    Negunit,
    Abd2div,
    Pos2div,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All explanations, minimal explanations, relevant, necessary and facet sets.
    Sets { file: PathBuf },
    /// Whether a hypothesis is a facet.
    Facet {
        file: PathBuf,
        /// Hypothesis to test; defaults to the file's `query`.
        #[arg(long)]
        var: Option<String>,
    },
    /// Whether a hypothesis is relevant.
    Relevant {
        file: PathBuf,
        #[arg(long)]
        var: Option<String>,
    },
    /// Subset-minimal explanations.
    Minimal { file: PathBuf },
    /// Whether two explanations at distance at least `k` exist.
    Diverse {
        file: PathBuf,
        /// Distance bound; defaults to the file's `k`.
        #[arg(short)]
        k: Option<usize>,
        /// Include a maximum-distance pair.
        #[arg(long)]
        witness: bool,
    },
    /// Complexity verdicts for the language of the knowledge base.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum)]
        problem: Option<ProblemArg>,
    },
    /// Applies an instance transformation and prints the result.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        rule: Rule,
        /// Definition file for `efpp`, or an equality definition for `abd2facet` and `abd2div`.
        #[arg(long)]
        defs: Option<PathBuf>,
        #[arg(short)]
        k: Option<usize>,
    },
    /// Prints a seeded random instance.
    Gen {
        #[arg(long)]
        fragment: GenFragment,
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Compares every licensed polynomial algorithm with the oracle.
    Check { file: PathBuf },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("no polynomial algorithm for `{0}`")]
    NoPoly(&'static str),
    #[error("polynomial and oracle answers differ")]
    Mismatch,
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::NoPoly(_) => EXIT_WRONG_FRAGMENT,
            CliError::Mismatch => EXIT_INTERNAL,
            CliError::Core(e) => match e {
                Error::WrongFragment { .. } => EXIT_WRONG_FRAGMENT,
                Error::BudgetExceeded(_) => EXIT_BUDGET,
                Error::UnsatStructure | Error::PartialAssignment(_) => EXIT_INTERNAL,
                _ => EXIT_USAGE,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Serialize)]
struct ReportOut {
    explanations: Vec<Vec<String>>,
    minimal: Vec<Vec<String>>,
    relevant: Vec<String>,
    necessary: Vec<String>,
    facets: Vec<String>,
}

#[derive(Debug, Serialize)]
struct CheckOut {
    agree: bool,
    comparisons: usize,
    mismatches: Vec<String>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Answer {
    Bool(bool),
    Report(ReportOut),
    Sets(Vec<Vec<String>>),
    Text(String),
    Check(CheckOut),
}

#[derive(Debug, Serialize)]
struct VerdictOut {
    problem: String,
    verdict: String,
    justification: Vec<&'static str>,
}

impl From<ComplexityVerdict> for VerdictOut {
    fn from(v: ComplexityVerdict) -> Self {
        VerdictOut { problem: v.problem.to_string(), verdict: v.verdict.to_string(), justification: v.justification }
    }
}

#[derive(Debug, Serialize)]
struct WitnessOut {
    e1: Vec<String>,
    e2: Vec<String>,
    d: usize,
}

#[derive(Debug, Serialize)]
struct Output {
    command: &'static str,
    answer: Answer,
    engine: Option<String>,
    verdicts: Option<Vec<VerdictOut>>,
    timing_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Option<WitnessOut>>,
}

struct Ctx {
    engine: EngineArg,
    oracle: OracleConfig,
}

const ORACLE: &str = "ORACLE";

fn poly_name(f: Fragment) -> String {
    format!("POLY({f})")
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<Parsed> {
    Ok(parse_instance(&read(path)?)?)
}

fn oracle_config(budget: Option<u64>) -> OracleConfig {
    let mut config = OracleConfig::default();
    if let Some(b) = budget {
        let bits = (u64::BITS - 1 - b.max(1).leading_zeros()) as usize;
        config.max_vars = bits;
        config.max_hypotheses = config.max_hypotheses.min(bits);
        config.max_pairs = b;
    }
    config
}

/// Fragments with a polynomial facet algorithm, in routing order.
fn facet_fragments(p: &LanguageProfile) -> Vec<Fragment> {
    [
        (p.all_implication, Fragment::Implication),
        (p.affine2_form, Fragment::Affine2),
        (p.en_form, Fragment::EssentiallyNegative),
        (p.dualhorn, Fragment::DualHorn),
    ]
    .into_iter()
    .filter_map(|(ok, f)| ok.then_some(f))
    .collect()
}

fn div_fragments(p: &LanguageProfile) -> Vec<Fragment> {
    [(p.affine2_form, Fragment::Affine2), (p.ep_form, Fragment::EssentiallyPositive)]
        .into_iter()
        .filter_map(|(ok, f)| ok.then_some(f))
        .collect()
}

fn isfacet_poly(fi: &FacetInstance, f: Fragment) -> abduction::Result<bool> {
    match f {
        Fragment::Implication => isfacet_imp(fi),
        Fragment::Affine2 => isfacet_affine2(fi),
        Fragment::EssentiallyNegative => isfacet_en(fi),
        _ => isfacet_dualhorn(fi),
    }
}

fn div_poly(di: &DivInstance, f: Fragment) -> abduction::Result<DivOutcome> {
    match f {
        Fragment::Affine2 => div_affine2(di),
        _ => div_ep(di),
    }
}

impl Ctx {
    /// Picks the fragment to run, or `None` for the oracle.
    fn route(&self, licensed: &[Fragment], what: &'static str) -> CliResult<Option<Fragment>> {
        match self.engine {
            EngineArg::Oracle => Ok(None),
            EngineArg::Auto => Ok(licensed.first().copied()),
            EngineArg::Poly => licensed.first().copied().map(Some).ok_or(CliError::NoPoly(what)),
        }
    }

    fn oracle_only(&self, what: &'static str) -> CliResult<()> {
        match self.engine {
            EngineArg::Poly => Err(CliError::NoPoly(what)),
            _ => Ok(()),
        }
    }

    fn space(&self, inst: &AbductionInstance) -> CliResult<ExplanationSpace> {
        Ok(ExplanationSpace::compute(inst, &self.oracle)?)
    }
}

fn facet_instance(parsed: Parsed, var: Option<&str>) -> CliResult<FacetInstance> {
    let (base, query) = match parsed {
        Parsed::Facet(fi) => (fi.base, Some(fi.query)),
        other => (other.into_base(), None),
    };
    let query = match var {
        Some(name) => base.var(name).ok_or_else(|| CliError::Usage(format!("unknown variable `{name}`")))?,
        None => query.ok_or_else(|| CliError::Usage("no --var given and the file has no query".into()))?,
    };
    Ok(FacetInstance::new(base, query)?)
}

fn sets(inst: &AbductionInstance, family: &[VarSet]) -> Vec<Vec<String>> {
    family.iter().map(|s| inst.names(s)).collect()
}

fn verdicts(inst: &AbductionInstance, problems: &[Problem]) -> Vec<VerdictOut> {
    let p = profile_formula(&inst.kb);
    problems.iter().map(|&problem| verdict(&p, problem).into()).collect()
}

struct Reply {
    answer: Answer,
    engine: Option<String>,
    verdicts: Option<Vec<VerdictOut>>,
    witness: Option<Option<WitnessOut>>,
}

impl Reply {
    fn new(answer: Answer, engine: Option<String>) -> Self {
        Reply { answer, engine, verdicts: None, witness: None }
    }
}

fn membership(ctx: &Ctx, file: &Path, var: Option<&str>, problem: Problem) -> CliResult<Reply> {
    let fi = facet_instance(load(file)?, var)?;
    let p = profile_formula(&fi.base.kb);
    let (answer, engine) = match ctx.route(&facet_fragments(&p), "this knowledge base")? {
        Some(f) if problem == Problem::IsFacet => (isfacet_poly(&fi, f)?, poly_name(f)),
        Some(f) => (relevance_poly(&fi, f)?, poly_name(f)),
        None => {
            let space = ctx.space(&fi.base)?;
            let a = if problem == Problem::IsFacet { space.is_facet(fi.query) } else { space.is_relevant(fi.query) };
            (a, ORACLE.to_string())
        }
    };
    let mut reply = Reply::new(Answer::Bool(answer), Some(engine));
    reply.verdicts = Some(verdicts(&fi.base, &[problem]));
    Ok(reply)
}

fn diverse(ctx: &Ctx, file: &Path, k: Option<usize>, witness: bool) -> CliResult<Reply> {
    let parsed = load(file)?;
    let k = match (k, &parsed) {
        (Some(k), _) => k,
        (None, Parsed::Div(d)) => d.k,
        _ => return Err(CliError::Usage("no -k given and the file has no k".into())),
    };
    let di = DivInstance { base: parsed.into_base(), k };
    let p = profile_formula(&di.base.kb);
    let (out, engine) = match ctx.route(&div_fragments(&p), "this knowledge base")? {
        Some(f) => (div_poly(&di, f)?, poly_name(f)),
        None => (div_oracle_with(&di, &ctx.oracle)?, ORACLE.to_string()),
    };
    let mut reply = Reply::new(Answer::Bool(out.diverse), Some(engine));
    reply.verdicts = Some(verdicts(&di.base, &[Problem::DivAbd]));
    if witness {
        let names = |s: &VarSet| di.base.names(s);
        reply.witness = Some(out.best.map(|w| WitnessOut { e1: names(&w.e1), e2: names(&w.e2), d: w.d }));
    }
    Ok(reply)
}

fn first_definition(defs: Option<&Path>) -> CliResult<Option<EfppDefinition>> {
    match defs {
        Some(path) => Ok(parse_definitions(&read(path)?)?.into_iter().next()),
        None => Ok(None),
    }
}

fn reduce(file: &Path, rule: Rule, defs: Option<&Path>, k: Option<usize>) -> CliResult<Reply> {
    let parsed = load(file)?;
    let text = |p: Parsed| Answer::Text(render(&p));
    let answer = match rule {
        Rule::Efpp => {
            let path = defs.ok_or_else(|| CliError::Usage("`efpp` needs --defs".into()))?;
            let defs = parse_definitions(&read(path)?)?;
            match parsed {
                Parsed::Abduction(i) => text(Parsed::Abduction(efpp_substitute(&i, &defs)?)),
                Parsed::Facet(fi) => text(Parsed::Facet(efpp_substitute_facet(&fi, &defs)?)),
                Parsed::Div(d) => text(Parsed::Div(DivInstance { base: efpp_substitute(&d.base, &defs)?, k: d.k })),
            }
        }
        Rule::Abd2facet => {
            let eq = first_definition(defs)?;
            text(Parsed::Facet(abd_to_isfacet(parsed.base(), eq.as_ref())?))
        }
        Rule::Abd2div => {
            let eq = first_definition(defs)?;
            text(Parsed::Div(abd_to_div(parsed.base(), eq.as_ref())?))
        }
        Rule::Elimpos => {
            let Parsed::Facet(fi) = parsed else {
                return Err(CliError::Usage("`elimpos` needs a file with a query".into()));
            };
            match elim_pos_units(&fi)? {
                Reduction::Instance(out) => text(Parsed::Facet(out)),
                Reduction::Resolved(b) => Answer::Bool(b),
            }
        }
        Rule::Negunit => text(Parsed::Facet(neg_unit_to_facet(parsed.base())?)),
        Rule::Pos2div => {
            let k = match (k, &parsed) {
                (Some(k), _) => k,
                (None, Parsed::Div(d)) => d.k,
                _ => return Err(CliError::Usage("`pos2div` needs -k or a file with k".into())),
            };
            let base = parsed.base();
            text(Parsed::Div(pos2sat_to_div(&base.vars, &base.kb, k)?))
        }
    };
    Ok(Reply::new(answer, None))
}

#[derive(Default)]
struct Tally {
    comparisons: usize,
    mismatches: Vec<String>,
}

impl Tally {
    fn compare(&mut self, what: String, poly: bool, oracle: bool) {
        self.comparisons += 1;
        if poly != oracle {
            self.mismatches.push(format!("{what}: poly {poly}, oracle {oracle}"));
        }
    }
}

fn check(ctx: &Ctx, file: &Path) -> CliResult<Reply> {
    let parsed = load(file)?;
    let inst = parsed.base();
    let p = profile_formula(&inst.kb);
    let (facet, div) = (facet_fragments(&p), div_fragments(&p));
    if facet.is_empty() && div.is_empty() {
        ctx.oracle_only("this knowledge base")?;
    }
    let space = ctx.space(inst)?;
    let mut tally = Tally::default();
    for &x in &inst.hypotheses {
        let fi = FacetInstance::new(inst.clone(), x)?;
        let name = inst.name(x);
        for &f in &facet {
            tally.compare(format!("facet {name} {}", poly_name(f)), isfacet_poly(&fi, f)?, space.is_facet(x));
            tally.compare(format!("relevant {name} {}", poly_name(f)), relevance_poly(&fi, f)?, space.is_relevant(x));
        }
    }
    if !div.is_empty() {
        for k in 0..=inst.hypotheses.len() {
            let di = DivInstance { base: inst.clone(), k };
            let expected = div_oracle_with(&di, &ctx.oracle)?;
            for &f in &div {
                let got = div_poly(&di, f)?;
                let what = format!("diverse k={k} {}", poly_name(f));
                tally.compare(what.clone(), got.diverse, expected.diverse);
                let d = |o: &DivOutcome| o.best.as_ref().map(|w| w.d);
                tally.compare(format!("{what} distance {:?}", d(&got)), d(&got) == d(&expected), true);
            }
        }
    }
    let mut engines: Vec<String> = Vec::new();
    for name in facet.iter().chain(&div).map(|&f| poly_name(f)) {
        if !engines.contains(&name) {
            engines.push(name);
        }
    }
    let engine = if engines.is_empty() { ORACLE.to_string() } else { engines.join(",") };
    let out = CheckOut { agree: tally.mismatches.is_empty(), comparisons: tally.comparisons, mismatches: tally.mismatches };
    Ok(Reply::new(Answer::Check(out), Some(engine)))
}

fn execute(ctx: &Ctx, command: &Command) -> CliResult<Reply> {
    match command {
        Command::Sets { file } => {
            ctx.oracle_only("sets")?;
            let inst = load(file)?.into_base();
            let r = ctx.space(&inst)?.report();
            let report = ReportOut {
                explanations: sets(&inst, &r.explanations),
                minimal: sets(&inst, &r.minimal),
                relevant: inst.names(&r.relevant),
                necessary: inst.names(&r.necessary),
                facets: inst.names(&r.facets),
            };
            Ok(Reply::new(Answer::Report(report), Some(ORACLE.into())))
        }
        Command::Facet { file, var } => membership(ctx, file, var.as_deref(), Problem::IsFacet),
        Command::Relevant { file, var } => membership(ctx, file, var.as_deref(), Problem::Relevance),
        Command::Minimal { file } => {
            ctx.oracle_only("minimal")?;
            let inst = load(file)?.into_base();
            let minimal = ctx.space(&inst)?.minimal();
            Ok(Reply::new(Answer::Sets(sets(&inst, &minimal)), Some(ORACLE.into())))
        }
        Command::Diverse { file, k, witness } => diverse(ctx, file, *k, *witness),
        Command::Classify { file, problem } => {
            let inst = load(file)?.into_base();
            let problems: Vec<Problem> = match problem {
                Some(p) => vec![(*p).into()],
                None => vec![Problem::IsFacet, Problem::Relevance, Problem::Abd, Problem::DivAbd],
            };
            let vs = verdicts(&inst, &problems);
            let mut reply = Reply::new(Answer::Text(vs[0].verdict.clone()), None);
            reply.verdicts = Some(vs);
            Ok(reply)
        }
        Command::Reduce { file, rule, defs, k } => reduce(file, *rule, defs.as_deref(), *k),
        Command::Gen { fragment, vars, atoms, seed } => {
            Ok(Reply::new(Answer::Text(generate(*fragment, *vars, *atoms, *seed)), None))
        }
        Command::Check { file } => check(ctx, file),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Sets { .. } => "sets",
        Command::Facet { .. } => "facet",
        Command::Relevant { .. } => "relevant",
        Command::Minimal { .. } => "minimal",
        Command::Diverse { .. } => "diverse",
        Command::Classify { .. } => "classify",
        Command::Reduce { .. } => "reduce",
        Command::Gen { .. } => "gen",
        Command::Check { .. } => "check",
    }
}

fn join(names: &[String]) -> String {
    format!("{{{}}}", names.join(", "))
}

fn write_text(out: &mut dyn Write, o: &Output) -> std::io::Result<()> {
    match &o.answer {
        Answer::Bool(b) => writeln!(out, "answer: {b}")?,
        Answer::Report(r) => {
            let family = |f: &[Vec<String>]| f.iter().map(|s| join(s)).collect::<Vec<_>>().join(" ");
            writeln!(out, "explanations ({}): {}", r.explanations.len(), family(&r.explanations))?;
            writeln!(out, "minimal: {}", family(&r.minimal))?;
            writeln!(out, "relevant: {}", join(&r.relevant))?;
            writeln!(out, "necessary: {}", join(&r.necessary))?;
            writeln!(out, "facets: {}", join(&r.facets))?;
        }
        Answer::Sets(s) => {
            for set in s {
                writeln!(out, "{}", join(set))?;
            }
        }
        Answer::Text(t) if o.command == "classify" => writeln!(out, "answer: {t}")?,
        Answer::Text(t) => write!(out, "{t}")?,
        Answer::Check(c) => {
            writeln!(out, "agree: {} ({} comparisons)", c.agree, c.comparisons)?;
            for m in &c.mismatches {
                writeln!(out, "mismatch: {m}")?;
            }
        }
    }
    if let Some(w) = &o.witness {
        match w {
            Some(w) => writeln!(out, "witness: {} {} (distance {})", join(&w.e1), join(&w.e2), w.d)?,
            None => writeln!(out, "witness: none")?,
        }
    }
    if let Some(e) = &o.engine {
        writeln!(out, "engine: {e}")?;
    }
    for v in o.verdicts.iter().flatten() {
        writeln!(out, "verdict {}: {} [{}]", v.problem, v.verdict, v.justification.join(", "))?;
    }
    Ok(())
}

/// Runs one command line; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let ctx = Ctx { engine: cli.engine, oracle: oracle_config(cli.budget) };
    let start = Instant::now();
    let reply = match execute(&ctx, &cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.code();
        }
    };
    let output = Output {
        command: command_name(&cli.command),
        answer: reply.answer,
        engine: reply.engine,
        verdicts: reply.verdicts,
        timing_ms: start.elapsed().as_secs_f64() * 1000.0,
        witness: reply.witness,
    };
    let written = if cli.json {
        serde_json::to_writer(&mut *out, &output).map_err(std::io::Error::from).and_then(|_| writeln!(out))
    } else {
        write_text(out, &output)
    };
    let failed = matches!(&output.answer, Answer::Check(c) if !c.agree);
    match written {
        Ok(()) if failed => {
            let _ = writeln!(err, "error: {}", CliError::Mismatch);
            EXIT_INTERNAL
        }
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INTERNAL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use abduction::InstanceBuilder;

    #[test]
    fn budget_bounds_the_oracle() {
        let c = oracle_config(Some(1 << 10));
        assert_eq!((c.max_vars, c.max_hypotheses, c.max_pairs), (10, 10, 1 << 10));
        assert_eq!(oracle_config(None), OracleConfig::default());
        assert_eq!(oracle_config(Some(0)).max_vars, 0);
    }

    #[test]
    fn routing_order() {
        let mut b = InstanceBuilder::new();
        b.clause(&["-x", "m"]).hyp(&["x"]).man(&["m"]);
        let p = profile_formula(&b.build().unwrap().kb);
        assert_eq!(facet_fragments(&p), [Fragment::Implication, Fragment::DualHorn]);
        let mut b = InstanceBuilder::new();
        b.eq("x", "m").hyp(&["x"]).man(&["m"]);
        let p = profile_formula(&b.build().unwrap().kb);
        assert_eq!(facet_fragments(&p)[..2], [Fragment::Affine2, Fragment::EssentiallyNegative]);
        assert_eq!(div_fragments(&p), [Fragment::Affine2, Fragment::EssentiallyPositive]);
    }

    #[test]
    fn poly_route_fails_without_fragment() {
        let ctx = Ctx { engine: EngineArg::Poly, oracle: OracleConfig::default() };
        let err = ctx.route(&[], "x").unwrap_err();
        assert_eq!(err.code(), EXIT_WRONG_FRAGMENT);
        let ctx = Ctx { engine: EngineArg::Oracle, oracle: OracleConfig::default() };
        assert_eq!(ctx.route(&[Fragment::Implication], "x").unwrap(), None);
    }
}
