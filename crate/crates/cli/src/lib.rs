//! Command implementations behind the `selp-kit` binary.

pub mod group;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use selp_core::asp::{ground, parse_asp, project_answer_sets, render_asp, GroundBudget, NonGroundProgram, Signature};
use selp_core::exec::Parallelism;
use selp_core::graph::{decompose_program, graph_to_dot, primal_graph, rule_width, td_minfill, td_to_dot};
use selp_core::model::{base_name, normalize_duplicates, validate, ElpProgram, WorldView};
use selp_core::oracle::{enumerate_world_views, is_consistent, OracleConfig};
use selp_core::qbf::{parse_qdimacs_eae, qbf_to_elp};
use selp_core::reduction::{
    consistent_via_reduction, reduce, world_views_via_reduction, BssMode, ReductionError, ReductionOptions,
};
use selp_core::syntax::{parse_easp, parse_witness_json, render_elp, render_witness_json, Dialect};

pub use group::{group_witnesses, GroupedWorldViews};

pub const EXIT_CONSISTENT: u8 = 10;
pub const EXIT_INCONSISTENT: u8 = 20;
pub const EXIT_ERROR: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "selp-kit", version, about = "Epistemic logic programs via bounded-arity ASP")]
pub struct Cli {
    /// Run every data-parallel loop on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide consistency of an ELP; exit code 10 if consistent, 20 if not.
    Solve(SolveArgs),
    /// Print the ASP translation of an ELP.
    Reduce(ReduceArgs),
    /// Group solver witnesses (clasp --outf=2 or array-of-arrays JSON) into world views.
    Group(GroupArgs),
    /// Encode an ∃∀∃ QDIMACS formula as an ELP.
    Qbf2elp(QbfArgs),
    /// Size and width figures of an ELP and its translation.
    Stats(StatsArgs),
    /// Rewrite an ELP between the two surface dialects.
    Convert(ConvertArgs),
    /// Ground and solve a non-ground ASP program.
    GroundSolve(GroundSolveArgs),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Input file, or `-` for standard input.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = DialectArg::Not)]
    pub dialect: DialectArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DialectArg {
    Not,
    Km,
}

impl From<DialectArg> for Dialect {
    fn from(d: DialectArg) -> Self {
        match d {
            DialectArg::Not => Dialect::Not,
            DialectArg::Km => Dialect::Km,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Oracle,
    Reduce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BssArg {
    Naive,
    Td,
}

impl From<BssArg> for BssMode {
    fn from(b: BssArg) -> Self {
        match b {
            BssArg::Naive => BssMode::Naive,
            BssArg::Td => BssMode::TdGuided,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value_t = Engine::Oracle)]
    pub engine: Engine,
    /// Print every candidate world view.
    #[arg(long)]
    pub enumerate: bool,
    /// Print nothing; the exit code carries the verdict.
    #[arg(long, short)]
    pub quiet: bool,
    #[arg(long, value_enum, default_value_t = BssArg::Naive)]
    pub bss: BssArg,
    /// Upper bound on distinct epistemic literals for the oracle.
    #[arg(long, default_value_t = 24)]
    pub max_elits: usize,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value_t = BssArg::Naive)]
    pub bss: BssArg,
    /// Split long rules along tree decompositions of their rule graphs.
    #[arg(long)]
    pub decompose: bool,
    /// Append `#show` directives for g/2 and v_check1/2.
    #[arg(long)]
    pub show: bool,
    /// Tie-break seed for the min-fill heuristic.
    #[arg(long, default_value_t = 0)]
    pub td_seed: u64,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct QbfArgs {
    pub file: PathBuf,
    /// Reassign variables to the three blocks at random before encoding.
    #[arg(long)]
    pub split_random: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: Input,
    /// Print the primal graph and its decomposition in DOT instead.
    #[arg(long)]
    pub dot: bool,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub from: DialectArg,
    #[arg(long, value_enum)]
    pub to: DialectArg,
}

#[derive(Debug, Args)]
pub struct GroundSolveArgs {
    pub file: PathBuf,
    /// Print witnesses as a JSON array of atom arrays.
    #[arg(long)]
    pub json: bool,
    /// Stop after this many (projected) answer sets; 0 means all.
    #[arg(long, default_value_t = 0)]
    pub limit: usize,
    #[arg(long, short)]
    pub quiet: bool,
}

/// What a command printed and the exit code it asks for.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).context("reading standard input")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_elp(input: &Input) -> Result<ElpProgram> {
    let text = read_input(&input.file)?;
    parse_easp(&text, input.dialect.into()).with_context(|| format!("parsing {}", input.file.display()))
}

/// The translation rejects rules with a repeated atom; those are rewritten
/// with auxiliary copies first.
fn translatable(p: &ElpProgram) -> ElpProgram {
    if validate(p).is_empty() {
        p.clone()
    } else {
        normalize_duplicates(p)
    }
}

type RenderedView = (BTreeSet<String>, BTreeSet<BTreeSet<String>>);

/// World views by atom names, with auxiliary copies folded back.
fn render_views(p: &ElpProgram, views: &[WorldView]) -> Vec<RenderedView> {
    let name = |a| base_name(p.atom_name(a)).to_owned();
    let mut out: Vec<RenderedView> = views
        .iter()
        .map(|wv| {
            let guess = wv
                .guess
                .chosen
                .iter()
                .map(|e| format!("$not$ {}{}", if e.inner.negated { "not " } else { "" }, name(e.inner.atom)))
                .collect();
            let sets = wv.answer_sets.iter().map(|m| m.iter().map(name).collect()).collect();
            (guess, sets)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn braces(items: &BTreeSet<String>) -> String {
    let v: Vec<&str> = items.iter().map(String::as_str).collect();
    format!("{{{}}}", v.join(", "))
}

fn parallelism(sequential: bool) -> Parallelism {
    if sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    }
}

pub fn solve(args: &SolveArgs, par: Parallelism) -> Result<Outcome> {
    let p = load_elp(&args.input)?;
    let cfg =
        OracleConfig { max_atoms: usize::MAX, max_elits: args.max_elits, parallelism: par, ..OracleConfig::search() };
    let opts = ReductionOptions { bss: args.bss.into(), parallelism: par, ..Default::default() };
    let budget = GroundBudget::default();
    let (consistent, views) = match (args.engine, args.enumerate) {
        (Engine::Oracle, false) => (is_consistent(&p, &cfg)?, Vec::new()),
        (Engine::Oracle, true) => {
            let v = render_views(&p, &enumerate_world_views(&p, &cfg)?);
            (!v.is_empty(), v)
        }
        (Engine::Reduce, false) => (consistent_via_reduction(&translatable(&p), &opts, &budget)?, Vec::new()),
        (Engine::Reduce, true) => {
            let q = translatable(&p);
            let v = render_views(&q, &world_views_via_reduction(&q, &opts, &budget)?);
            (!v.is_empty(), v)
        }
    };
    let mut out = String::new();
    if !args.quiet {
        out.push_str(if consistent { "CONSISTENT\n" } else { "INCONSISTENT\n" });
        for (i, (guess, sets)) in views.iter().enumerate() {
            let _ = writeln!(out, "World view {}: {}", i + 1, braces(guess));
            for m in sets {
                let _ = writeln!(out, "  {}", braces(m));
            }
        }
    }
    Ok(Outcome { stdout: out, code: if consistent { EXIT_CONSISTENT } else { EXIT_INCONSISTENT } })
}

pub fn reduce_cmd(args: &ReduceArgs, par: Parallelism) -> Result<Outcome> {
    let p = translatable(&load_elp(&args.input)?);
    let opts =
        ReductionOptions { bss: args.bss.into(), emit_projection: args.show, td_seed: args.td_seed, parallelism: par };
    let mut prog = reduce(&p, &opts)?;
    if args.decompose {
        prog = decompose_program(&prog, par)?;
    }
    Ok(Outcome::ok(render_asp(&prog)))
}

pub fn group_cmd(args: &GroupArgs) -> Result<Outcome> {
    let text = read_input(&args.file)?;
    let grouped = group_witnesses(&parse_witness_json(&text)?);
    let out = if args.json { serde_json::to_string_pretty(&grouped)? + "\n" } else { grouped.to_string() };
    Ok(Outcome::ok(out))
}

pub fn qbf2elp(args: &QbfArgs) -> Result<Outcome> {
    let q = parse_qdimacs_eae(&read_input(&args.file)?)?;
    let p = qbf_to_elp(&q, args.split_random.then_some(args.seed))?;
    Ok(Outcome::ok(render_elp(&p, Dialect::Not) + "\n"))
}

/// Largest rule-graph width over the translation's rules, or `None` for
/// programs without atoms.
fn translation_width(p: &ElpProgram, bss: BssMode, par: Parallelism) -> Result<Option<usize>> {
    match reduce(p, &ReductionOptions { bss, parallelism: par, ..Default::default() }) {
        Ok(prog) => Ok(Some(prog.rules.iter().map(rule_width).max().unwrap_or(0))),
        Err(ReductionError::NoAtoms) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn stats(args: &StatsArgs, par: Parallelism) -> Result<Outcome> {
    let p = load_elp(&args.input)?;
    let g = primal_graph(&p);
    let td = td_minfill(&g, 0);
    if args.dot {
        let labels = p.atoms.names().to_vec();
        return Ok(Outcome::ok(graph_to_dot(&g, &labels) + &td_to_dot(&td, &labels)));
    }
    let q = translatable(&p);
    let width = |w: Option<usize>| w.map_or_else(|| "-".to_owned(), |w| w.to_string());
    let mut out = String::new();
    let _ = writeln!(out, "atoms: {}", p.atoms.len());
    let _ = writeln!(out, "rules: {}", p.rules.len());
    let _ = writeln!(out, "epistemic literals: {}", p.elits().len());
    let _ = writeln!(out, "primal width: {}", if p.atoms.is_empty() { 0 } else { td.width() });
    let _ = writeln!(out, "max rule width (naive): {}", width(translation_width(&q, BssMode::Naive, par)?));
    let _ = writeln!(out, "max rule width (td): {}", width(translation_width(&q, BssMode::TdGuided, par)?));
    Ok(Outcome::ok(out))
}

pub fn convert(args: &ConvertArgs) -> Result<Outcome> {
    let text = read_input(&args.file)?;
    let p = parse_easp(&text, args.from.into()).with_context(|| format!("parsing {}", args.file.display()))?;
    let mut out = render_elp(&p, args.to.into());
    if !out.is_empty() {
        out.push('\n');
    }
    Ok(Outcome::ok(out))
}

pub fn ground_solve(args: &GroundSolveArgs) -> Result<Outcome> {
    let p: NonGroundProgram = parse_asp(&read_input(&args.file)?)?;
    let g = ground(&p, &GroundBudget::default())?;
    let show: Vec<Signature> = match &p.projection {
        Some(sigs) => sigs.clone(),
        None => p.signatures().into_iter().collect(),
    };
    let sets = project_answer_sets(&g, &show, args.limit)?;
    let code = if sets.is_empty() { EXIT_INCONSISTENT } else { EXIT_CONSISTENT };
    if args.quiet {
        return Ok(Outcome { stdout: String::new(), code });
    }
    let out = if args.json {
        let ws: Vec<Vec<String>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        render_witness_json(&ws) + "\n"
    } else {
        let mut out = String::new();
        for (i, s) in sets.iter().enumerate() {
            let atoms: Vec<&str> = s.iter().map(String::as_str).collect();
            let _ = writeln!(out, "Answer: {}\n{}", i + 1, atoms.join(" "));
        }
        out.push_str(if sets.is_empty() { "UNSATISFIABLE\n" } else { "SATISFIABLE\n" });
        out
    };
    Ok(Outcome { stdout: out, code })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let par = parallelism(cli.sequential);
    match &cli.command {
        Command::Solve(a) => solve(a, par),
        Command::Reduce(a) => reduce_cmd(a, par),
        Command::Group(a) => group_cmd(a),
        Command::Qbf2elp(a) => qbf2elp(a),
        Command::Stats(a) => stats(a, par),
        Command::Convert(a) => convert(a),
        Command::GroundSolve(a) => ground_solve(a),
    }
}
