//! Benchmark harness: per-task proposal, instantiation and matching against
//! the held-out lemma, suite aggregation, ensembles, deduplication and
//! categorization of conjectures.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusRecord, PromptMode};
use crate::instantiation::{instantiate, Budget, Conjecture};
use crate::proposer::{ProposalRequest, Proposer};
use crate::quickspec::{find_counterexample, InterpretedSignature};
use crate::templates::{abstract_lemma, Template, TemplateError, Whitelist};
use crate::term::{alpha_equal, alpha_key, Term};

#[derive(Clone, Debug)]
pub struct EvalTask {
    pub record: CorpusRecord,
    pub gold: Template,
    pub mode: PromptMode,
    pub k: usize,
}

impl EvalTask {
    pub fn new(record: CorpusRecord, mode: PromptMode, k: usize, w: &Whitelist) -> Result<EvalTask, TemplateError> {
        let gold = abstract_lemma(&record.term, w)?;
        Ok(EvalTask { record, gold, mode, k })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub id: String,
    pub theory: String,
    pub proposed_templates: Vec<String>,
    pub template_exact_match: bool,
    pub lemma_success: bool,
    pub conjecture_count: usize,
    pub timed_out: bool,
    /// Some template hit the per-template conjecture cap.
    pub truncated: bool,
    /// Proposer failure; the task then counts as unsuccessful.
    pub error: Option<String>,
    /// The gold template instantiated with the record's own symbols
    /// recovers the lemma. Only filled when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_instantiated: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjectureCategory {
    Gold,
    FalseByTesting,
    Unknown,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub gold: usize,
    pub false_by_testing: usize,
    pub unknown: usize,
    pub duplicates_removed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub tasks: usize,
    pub errored: usize,
    /// Errored tasks are left out of every denominator.
    pub strict_denominator: bool,
    pub lemma_success_rate: f64,
    pub template_match_rate: f64,
    pub instantiation_rate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub aggregates: Aggregates,
    pub per_theory: BTreeMap<String, f64>,
    pub per_task: Vec<TaskResult>,
    pub categories: Option<CategoryCounts>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("workers must be at least 1")]
    InvalidWorkers,
    #[error("reports cover different task sets")]
    TaskSetMismatch,
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// Keeps the first of every alpha-equivalence class, in input order, and
/// reports how many were dropped.
pub fn dedupe(conjectures: Vec<Conjecture>) -> (Vec<Conjecture>, usize) {
    let before = conjectures.len();
    let mut seen = HashSet::new();
    let kept: Vec<Conjecture> = conjectures.into_iter().filter(|c| seen.insert(alpha_key(&c.term))).collect();
    let removed = before - kept.len();
    (kept, removed)
}

/// Labels each conjecture. `FalseByTesting` needs an interpretation under
/// which the conjecture is testable and a falsifying valuation among
/// `tests` samples.
pub fn categorize(
    conjectures: &[Term],
    gold: &Term,
    interp: Option<&InterpretedSignature>,
    tests: usize,
    seed: u64,
) -> (CategoryCounts, Vec<ConjectureCategory>) {
    let mut counts = CategoryCounts::default();
    let labels: Vec<ConjectureCategory> = conjectures
        .iter()
        .map(|c| {
            if alpha_equal(c, gold) {
                counts.gold += 1;
                ConjectureCategory::Gold
            } else if interp.is_some_and(|i| matches!(find_counterexample(c, i, tests, seed), Ok(Some(_)))) {
                counts.false_by_testing += 1;
                ConjectureCategory::FalseByTesting
            } else {
                counts.unknown += 1;
                ConjectureCategory::Unknown
            }
        })
        .collect();
    (counts, labels)
}

/// Result of a task plus its deduplicated conjectures and the number of
/// duplicates dropped.
pub fn run_task(task: &EvalTask, proposer: &dyn Proposer, budget: Budget) -> (TaskResult, Vec<Conjecture>, usize) {
    let mut result = TaskResult {
        id: task.record.id.clone(),
        theory: task.record.theory.clone(),
        proposed_templates: Vec::new(),
        template_exact_match: false,
        lemma_success: false,
        conjecture_count: 0,
        timed_out: false,
        truncated: false,
        error: None,
        gold_instantiated: None,
    };
    let proposals = ProposalRequest::new(task.record.symbols.clone(), task.mode, task.k)
        .map_err(|e| e.to_string())
        .and_then(|req| proposer.propose(&req).map_err(|e| e.to_string()));
    let proposals = match proposals {
        Ok(p) => p,
        Err(e) => {
            result.error = Some(e);
            return (result, Vec::new(), 0);
        }
    };
    let mut all = Vec::new();
    for p in proposals.proposals.iter().take(task.k) {
        result.proposed_templates.push(p.template.canonical().to_string());
        result.template_exact_match |= p.template.canonical() == task.gold.canonical();
        // Templates from proposers are validated, so this cannot fail on
        // the template; a duplicate symbol in the record is the only cause.
        let Ok(inst) = instantiate(&p.template, &task.record.symbols, budget) else {
            continue;
        };
        result.timed_out |= inst.timed_out;
        result.truncated |= inst.truncated;
        all.extend(inst.conjectures.into_iter().map(|mut c| {
            c.proposer = p.source.clone();
            c
        }));
    }
    let (kept, removed) = dedupe(all);
    result.conjecture_count = kept.len();
    result.lemma_success = kept.iter().any(|c| alpha_equal(&c.term, &task.record.term));
    (result, kept, removed)
}

pub fn evaluate_task(task: &EvalTask, proposer: &dyn Proposer, budget: Budget) -> TaskResult {
    run_task(task, proposer, budget).0
}

/// Whether the gold template, filled with the record's own symbols,
/// recovers the lemma, and whether the search timed out.
pub fn gold_recovered(task: &EvalTask, budget: Budget) -> (bool, bool) {
    match instantiate(&task.gold, &task.record.symbols, budget) {
        Ok(inst) => (
            inst.conjectures.iter().any(|c| alpha_equal(&c.term, &task.record.term)),
            inst.timed_out,
        ),
        Err(_) => (false, false),
    }
}

/// Fraction of tasks whose gold template recovers the lemma within budget.
/// Also returns the per-task `(recovered, timed_out)` flags.
pub fn instantiation_rate(tasks: &[EvalTask], budget: Budget) -> (f64, Vec<(bool, bool)>) {
    let flags: Vec<(bool, bool)> = tasks.iter().map(|t| gold_recovered(t, budget)).collect();
    let hits = flags.iter().filter(|f| f.0).count();
    let rate = if tasks.is_empty() { 0.0 } else { hits as f64 / tasks.len() as f64 };
    (rate, flags)
}

#[derive(Clone, Debug)]
pub struct SuiteOptions<'a> {
    pub workers: usize,
    pub strict_denominator: bool,
    /// Also measure gold-template instantiation per task.
    pub gold_instantiation: bool,
    /// Interpretation for testing conjectures; enables categories.
    pub interp: Option<&'a InterpretedSignature>,
    pub tests: usize,
    pub seed: u64,
}

impl Default for SuiteOptions<'_> {
    fn default() -> Self {
        SuiteOptions {
            workers: 1,
            strict_denominator: false,
            gold_instantiation: false,
            interp: None,
            tests: crate::quickspec::DEFAULT_TESTS,
            seed: 0,
        }
    }
}

fn rate(hits: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        hits as f64 / n as f64
    }
}

/// Recomputes aggregates and the per-theory breakdown from per-task rows.
pub fn aggregate(per_task: Vec<TaskResult>, strict_denominator: bool, categories: Option<CategoryCounts>) -> EvalReport {
    let counted = |r: &&TaskResult| !(strict_denominator && r.error.is_some());
    let denom: Vec<&TaskResult> = per_task.iter().filter(counted).collect();
    let gold: Vec<bool> = denom.iter().filter_map(|r| r.gold_instantiated).collect();
    let aggregates = Aggregates {
        tasks: per_task.len(),
        errored: per_task.iter().filter(|r| r.error.is_some()).count(),
        strict_denominator,
        lemma_success_rate: rate(denom.iter().filter(|r| r.lemma_success).count(), denom.len()),
        template_match_rate: rate(denom.iter().filter(|r| r.template_exact_match).count(), denom.len()),
        instantiation_rate: (!gold.is_empty()).then(|| rate(gold.iter().filter(|g| **g).count(), gold.len())),
    };
    let mut theories: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &denom {
        let e = theories.entry(&r.theory).or_default();
        e.0 += r.lemma_success as usize;
        e.1 += 1;
    }
    let per_theory = theories.into_iter().map(|(t, (h, n))| (t.to_string(), rate(h, n))).collect();
    EvalReport {
        aggregates,
        per_theory,
        per_task,
        categories,
    }
}

/// Runs every task on a pool of `workers` threads. Rows are ordered by task
/// id, so the report does not depend on scheduling.
pub fn evaluate_suite(
    tasks: &[EvalTask],
    proposer: &dyn Proposer,
    budget: Budget,
    opts: &SuiteOptions<'_>,
) -> Result<EvalReport, EvalError> {
    if opts.workers == 0 {
        return Err(EvalError::InvalidWorkers);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| EvalError::Pool(e.to_string()))?;
    let rows: Vec<(TaskResult, Option<CategoryCounts>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|task| {
                let (mut result, conjectures, removed) = run_task(task, proposer, budget);
                if opts.gold_instantiation {
                    result.gold_instantiated = Some(gold_recovered(task, budget).0);
                }
                let cats = opts.interp.map(|interp| {
                    let terms: Vec<Term> = conjectures.into_iter().map(|c| c.term).collect();
                    let (mut counts, _) = categorize(&terms, &task.record.term, Some(interp), opts.tests, opts.seed);
                    counts.duplicates_removed = removed;
                    counts
                });
                (result, cats)
            })
            .collect()
    });
    let categories = opts.interp.map(|_| {
        rows.iter().filter_map(|r| r.1).fold(CategoryCounts::default(), |a, c| CategoryCounts {
            gold: a.gold + c.gold,
            false_by_testing: a.false_by_testing + c.false_by_testing,
            unknown: a.unknown + c.unknown,
            duplicates_removed: a.duplicates_removed + c.duplicates_removed,
        })
    });
    let mut per_task: Vec<TaskResult> = rows.into_iter().map(|r| r.0).collect();
    per_task.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(aggregate(per_task, opts.strict_denominator, categories))
}

/// Ensemble of reports over the same tasks: a task succeeds if any
/// component succeeds. Conjecture counts take the maximum, since the union
/// of conjecture sets is not recorded.
pub fn combine_reports(reports: &[EvalReport]) -> Result<EvalReport, EvalError> {
    let Some(first) = reports.first() else {
        return Ok(aggregate(Vec::new(), false, None));
    };
    let ids = |r: &EvalReport| r.per_task.iter().map(|t| t.id.clone()).collect::<Vec<_>>();
    let first_ids = ids(first);
    if reports.iter().any(|r| ids(r) != first_ids) {
        return Err(EvalError::TaskSetMismatch);
    }
    let mut per_task = first.per_task.clone();
    for r in &reports[1..] {
        for (acc, t) in per_task.iter_mut().zip(&r.per_task) {
            for tpl in &t.proposed_templates {
                if !acc.proposed_templates.contains(tpl) {
                    acc.proposed_templates.push(tpl.clone());
                }
            }
            acc.template_exact_match |= t.template_exact_match;
            acc.lemma_success |= t.lemma_success;
            acc.conjecture_count = acc.conjecture_count.max(t.conjecture_count);
            acc.timed_out |= t.timed_out;
            acc.truncated |= t.truncated;
            if t.error.is_none() {
                acc.error = None;
            }
            acc.gold_instantiated = match (acc.gold_instantiated, t.gold_instantiated) {
                (Some(a), Some(b)) => Some(a || b),
                (a, b) => a.or(b),
            };
        }
    }
    let categories = first.categories.filter(|c| reports.iter().all(|r| r.categories == Some(*c)));
    Ok(aggregate(per_task, first.aggregates.strict_denominator, categories))
}
