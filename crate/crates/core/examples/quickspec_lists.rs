//! Explores the interpreted list signature and prints the laws found.

use std::time::Instant;

use lemmanaid::quickspec::{explore, InterpretedSignature, DEFAULT_TESTS};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/lists.json");
    let sig = InterpretedSignature::from_file(path).unwrap();
    let max_size = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let start = Instant::now();
    let laws = explore(&sig, max_size, DEFAULT_TESTS, 0);
    for (i, law) in laws.iter().enumerate().take(40) {
        println!("{:>3}. {law}", i + 1);
    }
    println!("{} law(s) at max size {max_size} in {:?}", laws.len(), start.elapsed());
}
