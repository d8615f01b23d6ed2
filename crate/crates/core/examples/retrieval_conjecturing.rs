//! Trains a template index on the generated families, then evaluates the
//! retrieval proposer and a uniform baseline on the held-out theories.

use lemmanaid::corpus::{make_datapoint, PromptMode, TargetKind};
use lemmanaid::evaluation::{evaluate_suite, EvalTask, SuiteOptions};
use lemmanaid::instantiation::Budget;
use lemmanaid::proposer::{build_index, RetrievalProposer, UniformProposer, DEFAULT_K};
use lemmanaid::synthetic;
use lemmanaid::templates::default_whitelist;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let w = default_whitelist();
    let corpus = synthetic::generate(seed, &w);
    let train: Vec<_> = corpus
        .train()
        .iter()
        .map(|r| make_datapoint(r, PromptMode::TypesDefs, TargetKind::Template, &w).unwrap())
        .collect();
    let index = build_index(&train, &w).unwrap();
    println!("index: {} distinct template(s) from {} lemma(s)", index.len(), index.total());

    let tasks: Vec<EvalTask> = corpus
        .test()
        .into_iter()
        .map(|r| EvalTask::new(r, PromptMode::TypesDefs, DEFAULT_K, &w).unwrap())
        .collect();
    let opts = SuiteOptions {
        workers: 4,
        ..SuiteOptions::default()
    };
    let budget = Budget::default().with_timeout(5_000);
    let uniform = UniformProposer::new(&index, seed);
    let retrieval = RetrievalProposer::new(index);
    for (name, report) in [
        ("retrieval", evaluate_suite(&tasks, &retrieval, budget, &opts).unwrap()),
        ("uniform", evaluate_suite(&tasks, &uniform, budget, &opts).unwrap()),
    ] {
        let a = &report.aggregates;
        println!(
            "{name:>9}: {} task(s), lemma success {:.3}, template match {:.3}",
            a.tasks, a.lemma_success_rate, a.template_match_rate
        );
    }
}
