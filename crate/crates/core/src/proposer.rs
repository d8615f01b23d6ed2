//! Template proposers: corpus retrieval, an external completion endpoint,
//! fixed lists, and a uniform-random baseline. All share [`Proposer`].

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::path::Path;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{format_symbols_prompt, Datapoint, PromptMode, TargetKind};
use crate::instantiation::feasible;
use crate::jsonl;
use crate::templates::{parse_template, Template, Whitelist};
use crate::term::SignatureEntry;

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_LLM_TIMEOUT_MILLIS: u64 = 120_000;
pub const DEFAULT_FEASIBILITY_TIMEOUT_MILLIS: u64 = 1_000;
pub const LLM_URL_ENV: &str = "LEMMANAID_LLM_URL";
pub const LLM_TOKEN_ENV: &str = "LEMMANAID_LLM_TOKEN";

#[derive(Debug, Error)]
pub enum ProposeError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("transport: {0}")]
    Transport(String),
    #[error("datapoint {0}: target is not a template")]
    UnparseableTarget(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0} is not set")]
    MissingEndpoint(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProposalRequest {
    pub symbols: Vec<SignatureEntry>,
    pub mode: PromptMode,
    pub k: usize,
}

impl ProposalRequest {
    pub fn new(symbols: Vec<SignatureEntry>, mode: PromptMode, k: usize) -> Result<Self, ProposeError> {
        if k == 0 {
            return Err(ProposeError::InvalidK);
        }
        Ok(ProposalRequest { symbols, mode, k })
    }

    pub fn prompt(&self) -> String {
        format_symbols_prompt(&self.symbols, self.mode)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub template: Template,
    pub score: f64,
    pub source: String,
}

/// Proposals in descending score, distinct by canonical string.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProposalSet {
    pub proposals: Vec<Proposal>,
    pub parse_failures: usize,
}

impl ProposalSet {
    pub fn len(&self) -> usize {
        self.proposals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    pub fn templates(&self) -> impl Iterator<Item = &Template> {
        self.proposals.iter().map(|p| &p.template)
    }

    /// Builds a set from ranked templates, dropping repeats and scoring by
    /// rank so that earlier entries score higher.
    fn ranked(templates: impl IntoIterator<Item = Template>, k: usize, source: &str) -> ProposalSet {
        let mut seen = HashSet::new();
        let kept: Vec<Template> = templates
            .into_iter()
            .filter(|t| seen.insert(t.canonical().to_string()))
            .take(k)
            .collect();
        let n = kept.len() as f64;
        let proposals = kept
            .into_iter()
            .enumerate()
            .map(|(i, template)| Proposal {
                template,
                score: (n - i as f64) / n,
                source: source.to_string(),
            })
            .collect();
        ProposalSet { proposals, parse_failures: 0 }
    }
}

pub trait Proposer: Send + Sync {
    fn label(&self) -> &str;
    fn propose(&self, req: &ProposalRequest) -> Result<ProposalSet, ProposeError>;
}

/// Frequency of each canonical template across a corpus.
#[derive(Clone, Debug, Default)]
pub struct TemplateIndex {
    entries: BTreeMap<String, (Template, u64)>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct IndexLine {
    template: String,
    count: u64,
}

impl TemplateIndex {
    pub fn add(&mut self, tpl: Template, count: u64) {
        if count == 0 {
            return;
        }
        self.total += count;
        self.entries
            .entry(tpl.canonical().to_string())
            .or_insert((tpl, 0))
            .1 += count;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, canonical: &str) -> u64 {
        self.entries.get(canonical).map_or(0, |e| e.1)
    }

    /// Templates with their counts, in canonical-string order.
    pub fn iter(&self) -> impl Iterator<Item = (&Template, u64)> {
        self.entries.values().map(|(t, c)| (t, *c))
    }

    pub fn write_jsonl(&self, w: impl std::io::Write) -> std::io::Result<()> {
        jsonl::write_all(
            w,
            self.entries.iter().map(|(s, (_, c))| IndexLine {
                template: s.clone(),
                count: *c,
            }),
        )
    }

    pub fn read_jsonl(reader: impl BufRead, w: &Whitelist) -> Result<TemplateIndex, ProposeError> {
        let mut idx = TemplateIndex::default();
        for (line, parsed) in jsonl::read_lines::<IndexLine>(reader).map_err(jsonl_error)? {
            let entry = parsed.map_err(|e| ProposeError::Syntax { line, message: e.to_string() })?;
            let tpl = parse_template(&entry.template, w)
                .map_err(|e| ProposeError::Syntax { line, message: e.to_string() })?;
            idx.add(tpl, entry.count);
        }
        Ok(idx)
    }

    pub fn from_file(path: impl AsRef<Path>, w: &Whitelist) -> Result<TemplateIndex, ProposeError> {
        let f = std::fs::File::open(path)?;
        TemplateIndex::read_jsonl(std::io::BufReader::new(f), w)
    }
}

fn jsonl_error(e: jsonl::JsonlError) -> ProposeError {
    match e {
        jsonl::JsonlError::Io(e) => ProposeError::Io(e),
        jsonl::JsonlError::Parse { line, source } => ProposeError::Syntax {
            line,
            message: source.to_string(),
        },
    }
}

/// Counts template targets. Lemma-target datapoints are rejected as
/// unparseable.
pub fn build_index<'a>(
    datapoints: impl IntoIterator<Item = &'a Datapoint>,
    w: &Whitelist,
) -> Result<TemplateIndex, ProposeError> {
    let mut idx = TemplateIndex::default();
    for d in datapoints {
        if d.target_kind != TargetKind::Template {
            return Err(ProposeError::UnparseableTarget(d.id.clone()));
        }
        let tpl = parse_template(&d.target, w).map_err(|_| ProposeError::UnparseableTarget(d.id.clone()))?;
        idx.add(tpl, 1);
    }
    Ok(idx)
}

/// Feasible index templates ranked by frequency, then fewer holes, then
/// canonical string; scored by frequency share.
pub fn propose_retrieval(req: &ProposalRequest, idx: &TemplateIndex, feas_timeout_millis: u64) -> ProposalSet {
    let mut ranked: Vec<(&Template, u64)> = idx
        .iter()
        .filter(|(t, _)| feasible(t, &req.symbols, feas_timeout_millis))
        .collect();
    ranked.sort_by(|(a, ca), (b, cb)| {
        cb.cmp(ca)
            .then(a.hole_count().cmp(&b.hole_count()))
            .then(a.canonical().cmp(b.canonical()))
    });
    let proposals = ranked
        .into_iter()
        .take(req.k)
        .map(|(t, c)| Proposal {
            template: t.clone(),
            score: c as f64 / idx.total() as f64,
            source: "retrieval".into(),
        })
        .collect();
    ProposalSet { proposals, parse_failures: 0 }
}

pub struct RetrievalProposer {
    pub index: TemplateIndex,
    pub feas_timeout_millis: u64,
}

impl RetrievalProposer {
    pub fn new(index: TemplateIndex) -> Self {
        RetrievalProposer {
            index,
            feas_timeout_millis: DEFAULT_FEASIBILITY_TIMEOUT_MILLIS,
        }
    }
}

impl Proposer for RetrievalProposer {
    fn label(&self) -> &str {
        "retrieval"
    }

    fn propose(&self, req: &ProposalRequest) -> Result<ProposalSet, ProposeError> {
        Ok(propose_retrieval(req, &self.index, self.feas_timeout_millis))
    }
}

/// Templates read from a file, proposed in file order.
pub struct FixedProposer {
    templates: Vec<Template>,
    label: String,
}

#[derive(Deserialize)]
struct TemplateLine {
    template: String,
}

impl FixedProposer {
    pub fn new(templates: Vec<Template>) -> Self {
        FixedProposer { templates, label: "fixed".into() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// One template per line, either a bare S-expression or a JSON object
    /// with a `template` field. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, w: &Whitelist) -> Result<FixedProposer, ProposeError> {
        let mut templates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| ProposeError::Syntax { line: i + 1, message };
            let source = if line.starts_with('{') {
                serde_json::from_str::<TemplateLine>(line)
                    .map_err(|e| syntax(e.to_string()))?
                    .template
            } else {
                line.to_string()
            };
            templates.push(parse_template(&source, w).map_err(|e| syntax(e.to_string()))?);
        }
        Ok(FixedProposer::new(templates))
    }

    pub fn from_file(path: impl AsRef<Path>, w: &Whitelist) -> Result<FixedProposer, ProposeError> {
        FixedProposer::parse(&std::fs::read_to_string(path)?, w)
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }
}

pub fn propose_fixed(req: &ProposalRequest, fixed: &FixedProposer) -> ProposalSet {
    ProposalSet::ranked(fixed.templates.iter().cloned(), req.k, &fixed.label)
}

impl Proposer for FixedProposer {
    fn label(&self) -> &str {
        &self.label
    }

    fn propose(&self, req: &ProposalRequest) -> Result<ProposalSet, ProposeError> {
        Ok(propose_fixed(req, self))
    }
}

/// Baseline: k index templates drawn uniformly without replacement, with
/// the draw seeded by the prompt so results do not depend on task order.
pub struct UniformProposer {
    templates: Vec<Template>,
    seed: u64,
}

impl UniformProposer {
    pub fn new(index: &TemplateIndex, seed: u64) -> Self {
        UniformProposer {
            templates: index.iter().map(|(t, _)| t.clone()).collect(),
            seed,
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ *b as u64).wrapping_mul(0x0100_0000_01b3))
}

impl Proposer for UniformProposer {
    fn label(&self) -> &str {
        "uniform"
    }

    fn propose(&self, req: &ProposalRequest) -> Result<ProposalSet, ProposeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(req.prompt().as_bytes()));
        let picked = self.templates.choose_multiple(&mut rng, req.k).cloned();
        let mut set = ProposalSet::ranked(picked, req.k, "uniform");
        for p in &mut set.proposals {
            p.score = 1.0 / self.templates.len() as f64;
        }
        Ok(set)
    }
}

/// Maps a raw completion to the text handed to the template parser.
pub type CompletionAdapter = fn(&str) -> String;

fn trim_completion(s: &str) -> String {
    s.trim().to_string()
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    prompt: &'a str,
    n: usize,
    max_tokens: usize,
}

#[derive(Deserialize)]
struct CompletionResponse {
    completions: Vec<String>,
}

/// Client for a text-completion endpoint that returns templates.
pub struct HttpProposer {
    url: String,
    token: Option<String>,
    max_tokens: usize,
    adapter: CompletionAdapter,
    whitelist: Whitelist,
    client: reqwest::blocking::Client,
}

impl HttpProposer {
    pub fn new(url: impl Into<String>, timeout_millis: u64, whitelist: Whitelist) -> Result<Self, ProposeError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(timeout_millis))
            .build()
            .map_err(|e| ProposeError::Transport(e.to_string()))?;
        Ok(HttpProposer {
            url: url.into(),
            token: None,
            max_tokens: 512,
            adapter: trim_completion,
            whitelist,
            client,
        })
    }

    /// Reads the endpoint and optional bearer token from the environment.
    pub fn from_env(timeout_millis: u64, whitelist: Whitelist) -> Result<Self, ProposeError> {
        let url = std::env::var(LLM_URL_ENV).map_err(|_| ProposeError::MissingEndpoint(LLM_URL_ENV))?;
        let mut p = HttpProposer::new(url, timeout_millis, whitelist)?;
        p.token = std::env::var(LLM_TOKEN_ENV).ok().filter(|t| !t.is_empty());
        Ok(p)
    }

    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.token = Some(token.into());
        self
    }

    pub fn with_max_tokens(mut self, n: usize) -> Self {
        self.max_tokens = n;
        self
    }

    pub fn with_adapter(mut self, adapter: CompletionAdapter) -> Self {
        self.adapter = adapter;
        self
    }
}

pub fn propose_http(req: &ProposalRequest, http: &HttpProposer) -> Result<ProposalSet, ProposeError> {
    let prompt = req.prompt();
    let mut call = http.client.post(&http.url).json(&CompletionRequest {
        prompt: &prompt,
        n: req.k,
        max_tokens: http.max_tokens,
    });
    if let Some(token) = &http.token {
        call = call.bearer_auth(token);
    }
    let resp = call.send().map_err(|e| ProposeError::Transport(e.to_string()))?;
    if resp.status() != reqwest::StatusCode::OK {
        return Err(ProposeError::Transport(format!("status {}", resp.status())));
    }
    let body: CompletionResponse = resp.json().map_err(|e| ProposeError::Transport(e.to_string()))?;
    let mut failures = 0;
    let parsed: Vec<Template> = body
        .completions
        .iter()
        .filter_map(|c| match parse_template(&(http.adapter)(c), &http.whitelist) {
            Ok(t) => Some(t),
            Err(_) => {
                failures += 1;
                None
            }
        })
        .collect();
    let mut set = ProposalSet::ranked(parsed, req.k, "http");
    set.parse_failures = failures;
    Ok(set)
}

impl Proposer for HttpProposer {
    fn label(&self) -> &str {
        "http"
    }

    fn propose(&self, req: &ProposalRequest) -> Result<ProposalSet, ProposeError> {
        propose_http(req, self)
    }
}
