//! Filling template holes with typed symbols from a theory.
//!
//! The template is typed once: every hole occurrence gets a fresh copy of
//! its annotation and the logical constants are checked against their
//! schemes. The search then walks holes in index order, trying candidates
//! in list order, and unifies each occurrence type of the current hole with
//! a fresh copy of the candidate's scheme. Constraints are shared across
//! holes through one substitution.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::templates::Template;
use crate::term::{
    typecheck_lenient, ConstTyping, Inference, Signature, SignatureEntry, Term, TypeExpr,
    TypeSubstitution,
};

pub const DEFAULT_TIMEOUT_MILLIS: u64 = 60_000;
pub const DEFAULT_MAX_RESULTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub timeout_millis: u64,
    /// Per-template cap on returned conjectures.
    pub max_results: usize,
    /// Require distinct holes to receive distinct symbols.
    pub distinct_holes: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            timeout_millis: DEFAULT_TIMEOUT_MILLIS,
            max_results: DEFAULT_MAX_RESULTS,
            distinct_holes: false,
        }
    }
}

impl Budget {
    pub fn with_timeout(mut self, millis: u64) -> Self {
        self.timeout_millis = millis;
        self
    }

    pub fn with_max_results(mut self, n: usize) -> Self {
        self.max_results = n;
        self
    }

    pub fn with_distinct_holes(mut self, yes: bool) -> Self {
        self.distinct_holes = yes;
        self
    }
}

/// Symbol chosen for each hole, plus the type solution that makes every
/// occurrence agree with the chosen schemes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub symbols: BTreeMap<u32, String>,
    pub type_solution: TypeSubstitution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjecture {
    pub term: Term,
    pub template: String,
    pub assignment: Assignment,
    pub proposer: String,
}

impl Conjecture {
    pub fn to_record(&self) -> ConjectureRecord {
        ConjectureRecord {
            term: self.term.clone(),
            template: self.template.clone(),
            assignment: self
                .assignment
                .symbols
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            proposer: self.proposer.clone(),
        }
    }
}

/// JSONL wire form of a conjecture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureRecord {
    pub term: Term,
    pub template: String,
    pub assignment: BTreeMap<String, String>,
    pub proposer: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instantiation {
    pub conjectures: Vec<Conjecture>,
    /// The deadline cut the search short.
    pub timed_out: bool,
    /// `max_results` was reached.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("template does not typecheck: {0}")]
    InvalidTemplate(String),
    #[error("duplicate candidate symbol {0}")]
    DuplicateCandidate(String),
    #[error("budget must have a positive timeout and result cap")]
    InvalidBudget,
}

fn logic() -> &'static Signature {
    static LOGIC: OnceLock<Signature> = OnceLock::new();
    LOGIC.get_or_init(Signature::logic)
}

struct Search<'a> {
    template: &'a Template,
    candidates: &'a [SignatureEntry],
    check_sig: Signature,
    /// Occurrence types per hole (index 0 is hole 1), in pre-order.
    occurrences: Vec<Vec<TypeExpr>>,
    /// Pre-order list of hole indices, to line up occurrences when rebuilding.
    occurrence_order: Vec<u32>,
    budget: Budget,
    deadline: Instant,
    fresh: u64,
    chosen: Vec<usize>,
    out: Instantiation,
}

impl Search<'_> {
    fn fresh_instance(&mut self, scheme: &TypeExpr) -> TypeExpr {
        let vars = scheme.vars();
        if vars.is_empty() {
            return scheme.clone();
        }
        let base = self.fresh;
        self.fresh += vars.len() as u64;
        scheme.rename_vars(&mut |v| {
            vars.iter()
                .position(|w| w == v)
                .map(|i| format!("!{}", base + i as u64))
        })
    }

    fn out_of_time(&mut self) -> bool {
        if Instant::now() >= self.deadline {
            self.out.timed_out = true;
        }
        self.out.timed_out
    }

    /// Returns false when the search must stop.
    fn descend(&mut self, hole: usize, subst: &TypeSubstitution) -> bool {
        if hole == self.occurrences.len() {
            self.emit(subst);
            if self.out.conjectures.len() >= self.budget.max_results {
                self.out.truncated = true;
                return false;
            }
            return true;
        }
        for c in 0..self.candidates.len() {
            if self.out_of_time() {
                return false;
            }
            if self.budget.distinct_holes && self.chosen.contains(&c) {
                continue;
            }
            let scheme = self.candidates[c].ty.clone();
            let mut next = subst.clone();
            let occs = self.occurrences[hole].clone();
            let fits = occs.iter().all(|occ| {
                let inst = self.fresh_instance(&scheme);
                next.unify(occ, &inst).is_ok()
            });
            if !fits {
                continue;
            }
            self.chosen.push(c);
            let go_on = self.descend(hole + 1, &next);
            self.chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    fn emit(&mut self, subst: &TypeSubstitution) {
        let mut occ_seen = vec![0usize; self.occurrences.len()];
        let mut next_occ = 0usize;
        let typed = self.template.body().map_types(&mut |t| subst.apply(t));
        let term = replace_holes(&typed, &mut |index| {
            debug_assert_eq!(self.occurrence_order[next_occ], index);
            next_occ += 1;
            let h = index as usize - 1;
            let ty = subst.apply(&self.occurrences[h][occ_seen[h]]);
            occ_seen[h] += 1;
            Term::Const {
                name: self.candidates[self.chosen[h]].name.clone(),
                ty,
            }
        })
        .canonicalize_type_vars();
        if typecheck_lenient(&term, &self.check_sig).is_err() {
            debug_assert!(false, "instantiation produced an ill-typed term");
            return;
        }
        let symbols = self
            .chosen
            .iter()
            .enumerate()
            .map(|(h, &c)| (h as u32 + 1, self.candidates[c].name.clone()))
            .collect();
        self.out.conjectures.push(Conjecture {
            term,
            template: self.template.canonical().to_string(),
            assignment: Assignment {
                symbols,
                type_solution: subst.clone(),
            },
            proposer: String::new(),
        });
    }
}

/// Replaces holes in pre-order through `f`.
fn replace_holes(t: &Term, f: &mut impl FnMut(u32) -> Term) -> Term {
    match t {
        Term::App(g, x) => {
            let g = replace_holes(g, f);
            Term::App(Box::new(g), Box::new(replace_holes(x, f)))
        }
        Term::Abs { binder, ty, body } => Term::Abs {
            binder: binder.clone(),
            ty: ty.clone(),
            body: Box::new(replace_holes(body, f)),
        },
        Term::Hole { index, .. } => f(*index),
        leaf => leaf.clone(),
    }
}

/// Every well-typed full assignment of candidates to holes reachable within
/// the budget, in lexicographic order of candidate positions.
pub fn instantiate(
    tpl: &Template,
    candidates: &[SignatureEntry],
    budget: Budget,
) -> Result<Instantiation, InstantiateError> {
    if budget.timeout_millis == 0 || budget.max_results == 0 {
        return Err(InstantiateError::InvalidBudget);
    }
    let deadline = Instant::now() + Duration::from_millis(budget.timeout_millis);
    let mut check_sig = Signature::default();
    for c in candidates {
        check_sig
            .insert(c.clone())
            .map_err(|_| InstantiateError::DuplicateCandidate(c.name.clone()))?;
    }
    check_sig.extend_missing(logic());

    let mut inference = Inference::new(ConstTyping::Fallback(logic()));
    inference
        .infer(tpl.body())
        .map_err(|e| InstantiateError::InvalidTemplate(e.to_string()))?;
    let mut occurrences = vec![Vec::new(); tpl.hole_count()];
    let mut occurrence_order = Vec::new();
    for (index, ty) in &inference.hole_occurrences {
        occurrences[*index as usize - 1].push(inference.subst.apply(ty));
        occurrence_order.push(*index);
    }

    let mut search = Search {
        template: tpl,
        candidates,
        check_sig,
        occurrences,
        occurrence_order,
        budget,
        deadline,
        fresh: 0,
        chosen: Vec::new(),
        out: Instantiation::default(),
    };
    let start = inference.subst.clone();
    search.descend(0, &start);
    Ok(search.out)
}

/// True iff some assignment exists and is found before the timeout.
pub fn feasible(tpl: &Template, candidates: &[SignatureEntry], timeout_millis: u64) -> bool {
    let budget = Budget {
        timeout_millis: timeout_millis.max(1),
        max_results: 1,
        distinct_holes: false,
    };
    match instantiate(tpl, candidates, budget) {
        Ok(inst) => !inst.conjectures.is_empty(),
        Err(_) => false,
    }
}
