//! Builds prompt/target datapoints from the generated corpus and shows the
//! three prompt modes and a theory-wise split.

use lemmanaid::corpus::{make_datapoint, split_filewise, PromptMode, TargetKind};
use lemmanaid::synthetic;
use lemmanaid::templates::default_whitelist;

fn main() {
    let w = default_whitelist();
    let corpus = synthetic::generate(0, &w);
    let first = &corpus.records[0];
    for mode in [PromptMode::TypesDefs, PromptMode::Types, PromptMode::Defs] {
        let d = make_datapoint(first, mode, TargetKind::Template, &w).unwrap();
        println!("[{mode}] {}", d.input);
    }
    let lemma = make_datapoint(first, PromptMode::Types, TargetKind::Lemma, &w).unwrap();
    println!("lemma target: {}", lemma.target);

    let split = split_filewise(&corpus.records, [0.8, 0.1, 0.1], 7).unwrap();
    println!(
        "{} records from {} theories: train {}, val {}, test {}",
        corpus.records.len(),
        corpus.signatures.len(),
        split.train.len(),
        split.val.len(),
        split.test.len()
    );
}
