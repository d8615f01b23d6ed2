//! Talks to a completion endpoint. Without LEMMANAID_LLM_URL set, a local
//! stub server answers with fixed completions.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;

use lemmanaid::corpus::PromptMode;
use lemmanaid::proposer::{HttpProposer, ProposalRequest, Proposer, DEFAULT_LLM_TIMEOUT_MILLIS, LLM_URL_ENV};
use lemmanaid::samples;
use lemmanaid::templates::{abstract_lemma, default_whitelist};

fn stub(completions: Vec<String>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/complete", listener.local_addr().unwrap());
    std::thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream);
        let mut len = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                len = v.trim().parse().unwrap();
            }
            if line == "\r\n" {
                break;
            }
        }
        let mut body = vec![0; len];
        reader.read_exact(&mut body).unwrap();
        eprintln!("stub got: {}", String::from_utf8_lossy(&body));
        let reply = serde_json::json!({ "completions": completions }).to_string();
        let mut stream = reader.into_inner();
        write!(stream, "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\n\r\n{reply}", reply.len()).unwrap();
    });
    url
}

fn main() {
    let w = default_whitelist();
    let proposer = match std::env::var(LLM_URL_ENV) {
        Ok(_) => HttpProposer::from_env(DEFAULT_LLM_TIMEOUT_MILLIS, w.clone()).unwrap(),
        Err(_) => {
            let canned = vec![
                abstract_lemma(&samples::octo_assoc_plus(), &w).unwrap().canonical().to_string(),
                "not a template".to_string(),
                abstract_lemma(&samples::octo_distrib_left(), &w).unwrap().canonical().to_string(),
            ];
            HttpProposer::new(stub(canned), DEFAULT_LLM_TIMEOUT_MILLIS, w.clone()).unwrap()
        }
    };
    let req = ProposalRequest::new(samples::octonion_signature().entries().to_vec(), PromptMode::TypesDefs, 3).unwrap();
    println!("prompt: {}", req.prompt());
    match proposer.propose(&req) {
        Ok(set) => {
            for p in &set.proposals {
                println!("{:.3}  {}", p.score, p.template.pretty());
            }
            println!("{} unparseable completion(s)", set.parse_failures);
        }
        Err(e) => eprintln!("proposer failed: {e}"),
    }
}
