use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

/// Logical constants kept verbatim in templates. A name is retained if it
/// starts with one of `prefixes` or equals one of `exact`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Whitelist {
    prefixes: BTreeSet<String>,
    exact: BTreeSet<String>,
}

#[derive(Debug, Error)]
pub enum WhitelistError {
    #[error("line {line}: invalid entry {entry:?}")]
    InvalidEntry { line: usize, entry: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Default for Whitelist {
    fn default() -> Self {
        default_whitelist()
    }
}

pub fn default_whitelist() -> Whitelist {
    Whitelist {
        prefixes: ["HOL.", "Pure."].into_iter().map(String::from).collect(),
        exact: [
            "Set.member",
            "Set.Ball",
            "Set.Bex",
            "Product_Type.Pair",
            "Product_Type.prod",
            "Orderings.ord_class.less",
            "Orderings.ord_class.less_eq",
        ]
        .into_iter()
        .map(String::from)
        .collect(),
    }
}

impl Whitelist {
    pub fn new(
        prefixes: impl IntoIterator<Item = String>,
        exact: impl IntoIterator<Item = String>,
    ) -> Self {
        Whitelist {
            prefixes: prefixes.into_iter().collect(),
            exact: exact.into_iter().collect(),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.exact.contains(name) || self.prefixes.iter().any(|p| name.starts_with(p.as_str()))
    }

    pub fn prefixes(&self) -> impl Iterator<Item = &str> {
        self.prefixes.iter().map(String::as_str)
    }

    pub fn exact(&self) -> impl Iterator<Item = &str> {
        self.exact.iter().map(String::as_str)
    }

    /// One identifier per line; entries ending in `.` are prefixes and `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Whitelist, WhitelistError> {
        let mut w = Whitelist::new([], []);
        for (i, raw) in text.lines().enumerate() {
            let entry = raw.split('#').next().unwrap_or("").trim();
            if entry.is_empty() {
                continue;
            }
            if entry.chars().any(char::is_whitespace) || entry == "." {
                return Err(WhitelistError::InvalidEntry {
                    line: i + 1,
                    entry: entry.to_string(),
                });
            }
            if entry.ends_with('.') {
                w.prefixes.insert(entry.to_string());
            } else {
                w.exact.insert(entry.to_string());
            }
        }
        Ok(w)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Whitelist, WhitelistError> {
        Whitelist::parse(&std::fs::read_to_string(path)?)
    }
}
