//! Corpus records, prompt formatting, training/evaluation datapoints and
//! theory-closed splits.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::templates::{abstract_lemma, TemplateError, Whitelist};
use crate::term::{render_term, render_type, typecheck, Signature, SignatureEntry, Term, TypeError};

/// One lemma of a theory together with the theory symbols it mentions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    pub theory: String,
    pub name: String,
    pub term: Term,
    pub symbols: Vec<SignatureEntry>,
}

impl CorpusRecord {
    /// The symbols must be exactly the distinct non-whitelist constants of
    /// the term, in first-occurrence order.
    pub fn check_symbols(&self, w: &Whitelist) -> bool {
        let expected: Vec<&str> = self.term.const_names().into_iter().filter(|n| !w.contains(n)).collect();
        let actual: Vec<&str> = self.symbols.iter().map(|s| s.name.as_str()).collect();
        expected == actual
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PromptMode {
    #[default]
    #[serde(rename = "types+defs")]
    TypesDefs,
    #[serde(rename = "types")]
    Types,
    #[serde(rename = "defs")]
    Defs,
}

impl PromptMode {
    fn types(self) -> bool {
        matches!(self, PromptMode::TypesDefs | PromptMode::Types)
    }

    fn defs(self) -> bool {
        matches!(self, PromptMode::TypesDefs | PromptMode::Defs)
    }
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PromptMode::TypesDefs => "types+defs",
            PromptMode::Types => "types",
            PromptMode::Defs => "defs",
        })
    }
}

impl FromStr for PromptMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "types+defs" => Ok(PromptMode::TypesDefs),
            "types" => Ok(PromptMode::Types),
            "defs" => Ok(PromptMode::Defs),
            other => Err(format!("unknown prompt mode {other:?} (expected types+defs, types or defs)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Template,
    Lemma,
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetKind::Template => "template",
            TargetKind::Lemma => "lemma",
        })
    }
}

impl FromStr for TargetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "template" => Ok(TargetKind::Template),
            "lemma" => Ok(TargetKind::Lemma),
            other => Err(format!("unknown target kind {other:?} (expected template or lemma)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Datapoint {
    pub id: String,
    pub theory: String,
    pub mode: PromptMode,
    pub target_kind: TargetKind,
    pub input: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("ill-typed lemma: {0}")]
    IllTyped(TypeError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("{theories} theories cannot fill {partitions} partitions")]
    FewerTheoriesThanPartitions { theories: usize, partitions: usize },
    #[error("split ratios must be positive and sum to 1")]
    InvalidRatios,
}

/// Builds a record, listing the term's non-whitelist constants with their
/// types and definitions from `sig`.
pub fn make_record(
    id: &str,
    theory: &str,
    name: &str,
    t: &Term,
    sig: &Signature,
    w: &Whitelist,
) -> Result<CorpusRecord, CorpusError> {
    typecheck(t, &sig.with_logic()).map_err(|e| match e {
        TypeError::UnknownConstant(c) => CorpusError::UnknownConstant(c),
        other => CorpusError::IllTyped(other),
    })?;
    let symbols = t
        .const_names()
        .into_iter()
        .filter(|n| !w.contains(n))
        .map(|n| {
            sig.get(n)
                .cloned()
                .ok_or_else(|| CorpusError::UnknownConstant(n.to_string()))
        })
        .collect::<Result<_, _>>()?;
    Ok(CorpusRecord {
        id: id.to_string(),
        theory: theory.to_string(),
        name: name.to_string(),
        term: t.clone(),
        symbols,
    })
}

fn flatten_newlines(s: &str) -> String {
    s.replace("\r\n", " ").replace('\n', " ")
}

/// `[Symbols: n1, n2] [Types: n1 : T1 ; n2 : T2] [Defs: n1 := D1 ;; n2 := D2]`,
/// with the type and definition sections included according to `mode`.
pub fn format_symbols_prompt(symbols: &[SignatureEntry], mode: PromptMode) -> String {
    let names: Vec<&str> = symbols.iter().map(|s| s.name.as_str()).collect();
    let mut out = format!("[Symbols: {}]", names.join(", "));
    if mode.types() {
        let types: Vec<String> = symbols
            .iter()
            .map(|s| format!("{} : {}", s.name, render_type(&s.ty)))
            .collect();
        out.push_str(&format!(" [Types: {}]", types.join(" ; ")));
    }
    if mode.defs() {
        let defs: Vec<String> = symbols
            .iter()
            .map(|s| {
                let d = s.def.as_deref().map(flatten_newlines).unwrap_or_else(|| "<none>".into());
                format!("{} := {}", s.name, d)
            })
            .collect();
        out.push_str(&format!(" [Defs: {}]", defs.join(" ;; ")));
    }
    out
}

pub fn format_prompt(r: &CorpusRecord, mode: PromptMode) -> String {
    format_symbols_prompt(&r.symbols, mode)
}

pub fn make_datapoint(
    r: &CorpusRecord,
    mode: PromptMode,
    target_kind: TargetKind,
    w: &Whitelist,
) -> Result<Datapoint, CorpusError> {
    let target = match target_kind {
        TargetKind::Template => abstract_lemma(&r.term, w)?.canonical().to_string(),
        TargetKind::Lemma => render_term(&r.term),
    };
    Ok(Datapoint {
        id: r.id.clone(),
        theory: r.theory.clone(),
        mode,
        target_kind,
        input: format_prompt(r, mode),
        target,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<CorpusRecord>,
    pub val: Vec<CorpusRecord>,
    pub test: Vec<CorpusRecord>,
}

/// Partition sizes by largest remainder, each at least one.
fn allocate(n: usize, ratios: &[f64; 3]) -> [usize; 3] {
    let exact: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut counts: [usize; 3] = [0; 3];
    for i in 0..3 {
        counts[i] = exact[i].floor() as usize;
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    let mut left = n - counts.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    for i in 0..3 {
        while counts[i] == 0 {
            let donor = (0..3).max_by_key(|&j| (counts[j], 3 - j)).unwrap();
            counts[donor] -= 1;
            counts[i] += 1;
        }
    }
    counts
}

/// Splits by theory: all records of one theory land in the same partition.
/// Records keep their input order within each partition.
pub fn split_filewise(records: &[CorpusRecord], ratios: [f64; 3], seed: u64) -> Result<Split, CorpusError> {
    if ratios.iter().any(|r| !(*r > 0.0)) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(CorpusError::InvalidRatios);
    }
    let mut theories: Vec<&str> = records
        .iter()
        .map(|r| r.theory.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if theories.len() < 3 {
        return Err(CorpusError::FewerTheoriesThanPartitions {
            theories: theories.len(),
            partitions: 3,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    theories.shuffle(&mut rng);
    let [n_train, n_val, _] = allocate(theories.len(), &ratios);
    let train: BTreeSet<&str> = theories[..n_train].iter().copied().collect();
    let val: BTreeSet<&str> = theories[n_train..n_train + n_val].iter().copied().collect();
    let mut split = Split::default();
    for r in records {
        let part = if train.contains(r.theory.as_str()) {
            &mut split.train
        } else if val.contains(r.theory.as_str()) {
            &mut split.val
        } else {
            &mut split.test
        };
        part.push(r.clone());
    }
    Ok(split)
}
