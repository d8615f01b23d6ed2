//! Command-line front end. Exit codes: 0 success, 1 input or data error,
//! 2 transport error from a remote proposer.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{make_datapoint, split_filewise, CorpusRecord, Datapoint, PromptMode, TargetKind};
use crate::evaluation::{combine_reports, evaluate_suite, dedupe, EvalReport, EvalTask, SuiteOptions};
use crate::instantiation::{instantiate, Budget, DEFAULT_MAX_RESULTS, DEFAULT_TIMEOUT_MILLIS};
use crate::jsonl;
use crate::proposer::{
    build_index, FixedProposer, HttpProposer, ProposalRequest, ProposeError, Proposer, RetrievalProposer,
    TemplateIndex, UniformProposer, DEFAULT_FEASIBILITY_TIMEOUT_MILLIS, DEFAULT_K, DEFAULT_LLM_TIMEOUT_MILLIS,
};
use crate::quickspec::{baseline_precision, explore, InterpretedSignature, Law, LawRecord, DEFAULT_TESTS};
use crate::templates::{abstract_lemma, default_whitelist, parse_template, Template, Whitelist};
use crate::term::SignatureEntry;

#[derive(Parser, Debug)]
#[command(name = "lemmanaid", version, about = "Template-based lemma conjecturing")]
pub struct Cli {
    /// Whitelist file of logical constants kept in templates (default: built-in list).
    #[arg(long, global = true)]
    whitelist: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Abstract every corpus lemma into a template (JSONL out).
    Abstract {
        corpus: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Propose templates for a symbol set, instantiate and deduplicate them.
    Conjecture {
        /// JSON array of {"name","type","def"} entries.
        symbols: PathBuf,
        #[command(flatten)]
        proposer: ProposerArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build prompt/target datapoints with a theory-wise split.
    Dataset {
        corpus: PathBuf,
        #[arg(long, default_value = "types+defs")]
        mode: PromptMode,
        #[arg(long, default_value = "template")]
        target: TargetKind,
        /// Train/val/test ratios such as 0.8/0.1/0.1, or `none` to write
        /// every datapoint to all.jsonl.
        #[arg(long, default_value = "0.8/0.1/0.1")]
        split: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for the partition files.
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write a template index built from the training partition.
        #[arg(long)]
        index_out: Option<PathBuf>,
    },
    /// Evaluate a proposer on every lemma of a corpus.
    Eval {
        corpus: PathBuf,
        #[command(flatten)]
        proposer: ProposerArgs,
        /// Second proposer whose successes are unioned in, as KIND[:PATH].
        #[arg(long)]
        also_proposer: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        /// Leave errored tasks out of the rate denominators.
        #[arg(long)]
        strict_denominator: bool,
        /// Also measure whether each gold template recovers its lemma.
        #[arg(long)]
        gold_rate: bool,
        /// Interpreted signature used to falsify conjectures.
        #[arg(long)]
        interp: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TESTS)]
        tests: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Enumerate terms, test them and print the equations found.
    Quickspec {
        signature: PathBuf,
        #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u64).range(1..))]
        max_size: u64,
        #[arg(long, default_value_t = DEFAULT_TESTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        tests: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSONL of {"lhs","rhs"} gold laws; prints precision.
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Write the laws as JSONL here as well.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fill a template's holes with symbols.
    Instantiate {
        #[arg(long, required_unless_present = "templates")]
        template: Option<String>,
        /// File with one template per line.
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long)]
        symbols: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print ranked template proposals for a symbol set.
    Propose {
        symbols: PathBuf,
        #[command(flatten)]
        proposer: ProposerArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct ProposerArgs {
    /// retrieval, fixed, uniform or http; KIND:PATH also sets the file.
    #[arg(long, default_value = "retrieval")]
    proposer: String,
    /// Template index (JSONL) for retrieval and uniform proposers.
    #[arg(long)]
    index: Option<PathBuf>,
    /// Template list for the fixed proposer.
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(short, long, default_value_t = DEFAULT_K as u64, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value = "types+defs")]
    mode: PromptMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LLM_TIMEOUT_MILLIS)]
    llm_timeout_ms: u64,
    #[arg(long, default_value_t = DEFAULT_FEASIBILITY_TIMEOUT_MILLIS)]
    feasibility_timeout_ms: u64,
}

#[derive(Args, Debug, Clone, Copy)]
struct BudgetArgs {
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_MILLIS, value_parser = clap::value_parser!(u64).range(1..))]
    timeout_ms: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_RESULTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_results: u64,
    /// Distinct holes must receive distinct symbols.
    #[arg(long)]
    distinct_holes: bool,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        Budget {
            timeout_millis: self.timeout_ms,
            max_results: self.max_results as usize,
            distinct_holes: self.distinct_holes,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Transport(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Transport(_) => 2,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn propose_error(e: ProposeError) -> CliError {
    match e {
        ProposeError::Transport(m) => CliError::Transport(m),
        other => CliError::Input(other.to_string()),
    }
}

fn with_path<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(with_path(p))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn read_symbols(path: &Path) -> Result<Vec<SignatureEntry>, CliError> {
    let text = std::fs::read_to_string(path).map_err(with_path(path))?;
    serde_json::from_str(&text).map_err(with_path(path))
}

fn read_corpus(path: &Path) -> Result<Vec<CorpusRecord>, CliError> {
    let f = File::open(path).map_err(with_path(path))?;
    jsonl::read_all(BufReader::new(f)).map_err(with_path(path))
}

fn build_proposer(
    choice: &str,
    args: &ProposerArgs,
    w: &Whitelist,
) -> Result<Box<dyn Proposer>, CliError> {
    let (kind, path) = match choice.split_once(':') {
        Some((k, p)) => (k, Some(PathBuf::from(p))),
        None => (choice, None),
    };
    let need = |p: Option<PathBuf>, flag: &str| p.ok_or_else(|| CliError::Input(format!("{kind} proposer needs --{flag}")));
    Ok(match kind {
        "retrieval" => {
            let path = need(path.or_else(|| args.index.clone()), "index")?;
            let idx = TemplateIndex::from_file(&path, w).map_err(with_path(&path))?;
            Box::new(RetrievalProposer {
                index: idx,
                feas_timeout_millis: args.feasibility_timeout_ms,
            })
        }
        "uniform" => {
            let path = need(path.or_else(|| args.index.clone()), "index")?;
            let idx = TemplateIndex::from_file(&path, w).map_err(with_path(&path))?;
            Box::new(UniformProposer::new(&idx, args.seed))
        }
        "fixed" => {
            let path = need(path.or_else(|| args.templates.clone()), "templates")?;
            Box::new(FixedProposer::from_file(&path, w).map_err(with_path(&path))?)
        }
        "http" => Box::new(HttpProposer::from_env(args.llm_timeout_ms, w.clone()).map_err(propose_error)?),
        other => return Err(CliError::Input(format!("unknown proposer {other}"))),
    })
}

fn cmd_abstract(corpus: &Path, out: Option<&Path>, w: &Whitelist) -> Result<(), CliError> {
    let f = File::open(corpus).map_err(with_path(corpus))?;
    let lines = jsonl::read_lines::<CorpusRecord>(BufReader::new(f)).map_err(with_path(corpus))?;
    let mut out = output(out)?;
    let mut failures = 0;
    for (line, rec) in lines {
        let result = rec.map_err(|e| e.to_string()).and_then(|r| {
            abstract_lemma(&r.term, w)
                .map(|t| (r.id, t))
                .map_err(|e| format!("{e}"))
        });
        match result {
            Ok((id, t)) => {
                let row = serde_json::json!({"id": id, "template": t.canonical(), "pretty": t.pretty()});
                writeln!(out, "{row}").map_err(input)?;
            }
            Err(e) => {
                failures += 1;
                eprintln!("{}: line {line}: {e}", corpus.display());
            }
        }
    }
    out.flush().map_err(input)?;
    if failures > 0 {
        return Err(CliError::Input(format!("{failures} record(s) failed")));
    }
    Ok(())
}

fn cmd_conjecture(
    symbols: &Path,
    pargs: &ProposerArgs,
    budget: Budget,
    out: Option<&Path>,
    w: &Whitelist,
) -> Result<(), CliError> {
    let symbols = read_symbols(symbols)?;
    let proposer = build_proposer(&pargs.proposer, pargs, w)?;
    let req = ProposalRequest::new(symbols.clone(), pargs.mode, pargs.k as usize).map_err(propose_error)?;
    let set = proposer.propose(&req).map_err(propose_error)?;
    let (mut all, mut truncated, mut timed_out) = (Vec::new(), 0, false);
    for p in &set.proposals {
        let inst = instantiate(&p.template, &symbols, budget).map_err(input)?;
        truncated += inst.truncated as usize;
        timed_out |= inst.timed_out;
        all.extend(inst.conjectures.into_iter().map(|mut c| {
            c.proposer = p.source.clone();
            c
        }));
    }
    let (kept, removed) = dedupe(all);
    let mut out = output(out)?;
    jsonl::write_all(&mut out, kept.iter().map(|c| c.to_record())).map_err(input)?;
    let mut summary = format!(
        "{} template(s), {} conjecture(s), {} duplicate(s) removed",
        set.len(),
        kept.len(),
        removed
    );
    if set.parse_failures > 0 {
        summary.push_str(&format!(", {} unparseable completion(s)", set.parse_failures));
    }
    if truncated > 0 {
        summary.push_str(&format!(", truncated at {} result(s) for {truncated} template(s)", budget.max_results));
    }
    if timed_out {
        summary.push_str(", timed out");
    }
    eprintln!("{summary}");
    Ok(())
}

fn parse_ratios(text: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<f64> = text
        .split('/')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("bad split {text:?}, expected r/r/r")))?;
    <[f64; 3]>::try_from(parts).map_err(|_| CliError::Input(format!("bad split {text:?}, expected r/r/r")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_dataset(
    corpus: &Path,
    mode: PromptMode,
    target: TargetKind,
    split: &str,
    seed: u64,
    out_dir: &Path,
    index_out: Option<&Path>,
    w: &Whitelist,
) -> Result<(), CliError> {
    let records = read_corpus(corpus)?;
    std::fs::create_dir_all(out_dir).map_err(with_path(out_dir))?;
    let points = |rs: &[CorpusRecord], kind: TargetKind| -> Result<Vec<Datapoint>, CliError> {
        rs.iter()
            .map(|r| make_datapoint(r, mode, kind, w).map_err(|e| CliError::Input(format!("{}: {e}", r.id))))
            .collect()
    };
    let parts: Vec<(&str, Vec<CorpusRecord>)> = if split == "none" {
        vec![("all", records)]
    } else {
        let s = split_filewise(&records, parse_ratios(split)?, seed).map_err(input)?;
        vec![("train", s.train), ("val", s.val), ("test", s.test)]
    };
    for (name, part) in &parts {
        let path = out_dir.join(format!("{name}.jsonl"));
        let f = File::create(&path).map_err(with_path(&path))?;
        jsonl::write_all(BufWriter::new(f), points(part, target)?).map_err(with_path(&path))?;
        eprintln!("{name}: {} datapoint(s)", part.len());
    }
    if let Some(path) = index_out {
        let templates = points(&parts[0].1, TargetKind::Template)?;
        let idx = build_index(&templates, w).map_err(input)?;
        let f = File::create(path).map_err(with_path(path))?;
        idx.write_jsonl(BufWriter::new(f)).map_err(with_path(path))?;
        eprintln!("index: {} template(s), total {}", idx.len(), idx.total());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    corpus: &Path,
    pargs: &ProposerArgs,
    also: Option<&str>,
    budget: Budget,
    opts: SuiteOptions<'_>,
    report_path: Option<&Path>,
    w: &Whitelist,
) -> Result<(), CliError> {
    let tasks: Vec<EvalTask> = read_corpus(corpus)?
        .into_iter()
        .map(|r| {
            let id = r.id.clone();
            EvalTask::new(r, pargs.mode, pargs.k as usize, w).map_err(|e| CliError::Input(format!("{id}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let run = |choice: &str| -> Result<EvalReport, CliError> {
        let proposer = build_proposer(choice, pargs, w)?;
        evaluate_suite(&tasks, proposer.as_ref(), budget, &opts).map_err(input)
    };
    let mut report = run(&pargs.proposer)?;
    if let Some(choice) = also {
        let other = run(choice)?;
        report = combine_reports(&[report, other]).map_err(input)?;
    }
    let json = report.to_json();
    match report_path {
        Some(p) => std::fs::write(p, format!("{json}\n")).map_err(with_path(p))?,
        None => println!("{json}"),
    }
    let a = &report.aggregates;
    eprintln!(
        "tasks {}  errored {}  lemma success {:.4}  template match {:.4}{}",
        a.tasks,
        a.errored,
        a.lemma_success_rate,
        a.template_match_rate,
        a.instantiation_rate
            .map(|r| format!("  instantiation {r:.4}"))
            .unwrap_or_default()
    );
    if a.errored > 0 {
        let first = report.per_task.iter().find_map(|t| t.error.clone()).unwrap_or_default();
        return Err(CliError::Transport(format!("{} task(s) failed to get proposals: {first}", a.errored)));
    }
    Ok(())
}

fn read_laws(path: &Path) -> Result<Vec<Law>, CliError> {
    let f = File::open(path).map_err(with_path(path))?;
    let recs: Vec<LawRecord> = jsonl::read_all(BufReader::new(f)).map_err(with_path(path))?;
    Ok(recs.into_iter().map(Law::from).collect())
}

#[allow(clippy::too_many_arguments)]
fn cmd_quickspec(
    signature: &Path,
    max_size: usize,
    tests: usize,
    seed: u64,
    gold: Option<&Path>,
    jsonl_out: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let sig = InterpretedSignature::from_file(signature).map_err(with_path(signature))?;
    let laws = explore(&sig, max_size, tests, seed);
    let mut w = output(out)?;
    for (i, law) in laws.iter().enumerate() {
        writeln!(w, "{:>3}. {law}", i + 1).map_err(input)?;
    }
    w.flush().map_err(input)?;
    if let Some(p) = jsonl_out {
        let f = File::create(p).map_err(with_path(p))?;
        jsonl::write_all(BufWriter::new(f), laws.iter().map(Law::to_record)).map_err(with_path(p))?;
    }
    eprintln!("{} law(s)", laws.len());
    if let Some(g) = gold {
        let p = baseline_precision(&laws, &read_laws(g)?);
        eprintln!(
            "precision {}/{} = {:.4}",
            p.matched_gold, p.emitted, p.precision
        );
    }
    Ok(())
}

fn cmd_instantiate(
    template: Option<&str>,
    templates: Option<&Path>,
    symbols: &Path,
    budget: Budget,
    out: Option<&Path>,
    w: &Whitelist,
) -> Result<(), CliError> {
    let symbols = read_symbols(symbols)?;
    let mut tpls: Vec<Template> = Vec::new();
    if let Some(t) = template {
        tpls.push(parse_template(t, w).map_err(input)?);
    }
    if let Some(p) = templates {
        tpls.extend(FixedProposer::from_file(p, w).map_err(with_path(p))?.templates().iter().cloned());
    }
    let mut out = output(out)?;
    let (mut count, mut timed_out, mut truncated) = (0, false, false);
    for t in &tpls {
        let inst = instantiate(t, &symbols, budget).map_err(input)?;
        count += inst.conjectures.len();
        timed_out |= inst.timed_out;
        truncated |= inst.truncated;
        jsonl::write_all(&mut out, inst.conjectures.iter().map(|c| c.to_record())).map_err(input)?;
    }
    eprintln!(
        "{count} conjecture(s){}{}",
        if truncated { ", truncated" } else { "" },
        if timed_out { ", timed out" } else { "" }
    );
    Ok(())
}

fn cmd_propose(symbols: &Path, pargs: &ProposerArgs, out: Option<&Path>, w: &Whitelist) -> Result<(), CliError> {
    let symbols = read_symbols(symbols)?;
    let proposer = build_proposer(&pargs.proposer, pargs, w)?;
    let req = ProposalRequest::new(symbols, pargs.mode, pargs.k as usize).map_err(propose_error)?;
    let set = proposer.propose(&req).map_err(propose_error)?;
    let mut out = output(out)?;
    for p in &set.proposals {
        let row = serde_json::json!({
            "template": p.template.canonical(),
            "pretty": p.template.pretty(),
            "score": p.score,
            "source": p.source,
        });
        writeln!(out, "{row}").map_err(input)?;
    }
    out.flush().map_err(input)?;
    if set.parse_failures > 0 {
        eprintln!("{} unparseable completion(s)", set.parse_failures);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let w = match &cli.whitelist {
        Some(p) => Whitelist::from_file(p).map_err(with_path(p))?,
        None => default_whitelist(),
    };
    match cli.command {
        Command::Abstract { corpus, out } => cmd_abstract(&corpus, out.as_deref(), &w),
        Command::Conjecture {
            symbols,
            proposer,
            budget,
            out,
        } => cmd_conjecture(&symbols, &proposer, budget.budget(), out.as_deref(), &w),
        Command::Dataset {
            corpus,
            mode,
            target,
            split,
            seed,
            out_dir,
            index_out,
        } => cmd_dataset(&corpus, mode, target, &split, seed, &out_dir, index_out.as_deref(), &w),
        Command::Eval {
            corpus,
            proposer,
            also_proposer,
            budget,
            workers,
            strict_denominator,
            gold_rate,
            interp,
            tests,
            report,
        } => {
            let interp = match &interp {
                Some(p) => Some(InterpretedSignature::from_file(p).map_err(with_path(p))?),
                None => None,
            };
            let opts = SuiteOptions {
                workers: workers as usize,
                strict_denominator,
                gold_instantiation: gold_rate,
                interp: interp.as_ref(),
                tests,
                seed: proposer.seed,
            };
            cmd_eval(&corpus, &proposer, also_proposer.as_deref(), budget.budget(), opts, report.as_deref(), &w)
        }
        Command::Quickspec {
            signature,
            max_size,
            tests,
            seed,
            gold,
            jsonl,
            out,
        } => cmd_quickspec(
            &signature,
            max_size as usize,
            tests as usize,
            seed,
            gold.as_deref(),
            jsonl.as_deref(),
            out.as_deref(),
        ),
        Command::Instantiate {
            template,
            templates,
            symbols,
            budget,
            out,
        } => cmd_instantiate(template.as_deref(), templates.as_deref(), &symbols, budget.budget(), out.as_deref(), &w),
        Command::Propose { symbols, proposer, out } => cmd_propose(&symbols, &proposer, out.as_deref(), &w),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Input(m) => eprintln!("error: {m}"),
                CliError::Transport(m) => eprintln!("transport error: {m}"),
            }
            e.code()
        }
    }
}
