pub mod cli;
pub mod corpus;
pub mod evaluation;
pub mod instantiation;
pub mod jsonl;
pub mod proposer;
pub mod quickspec;
pub mod samples;
pub mod synthetic;
pub mod templates;
pub mod term;
