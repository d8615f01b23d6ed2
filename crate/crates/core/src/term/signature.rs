use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::TypeExpr;

/// A named symbol with its type scheme. Type variables in `ty` are
/// implicitly universally quantified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureEntry {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TypeExpr,
    #[serde(default)]
    pub def: Option<String>,
}

impl SignatureEntry {
    pub fn new(name: impl Into<String>, ty: TypeExpr) -> Self {
        SignatureEntry {
            name: name.into(),
            ty,
            def: None,
        }
    }

    pub fn with_def(mut self, def: impl Into<String>) -> Self {
        self.def = Some(def.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("duplicate symbol {0}")]
    Duplicate(String),
    #[error("type constructor {name} used with arities {first} and {second}")]
    Arity { name: String, first: usize, second: usize },
}

/// An ordered collection of uniquely named symbols.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    entries: Vec<SignatureEntry>,
    by_name: HashMap<String, usize>,
}

impl Signature {
    pub fn new(entries: Vec<SignatureEntry>) -> Result<Self, SignatureError> {
        let mut sig = Signature::default();
        for e in entries {
            sig.insert(e)?;
        }
        sig.check_arities()?;
        Ok(sig)
    }

    pub fn insert(&mut self, entry: SignatureEntry) -> Result<(), SignatureError> {
        if self.by_name.contains_key(&entry.name) {
            return Err(SignatureError::Duplicate(entry.name));
        }
        self.by_name.insert(entry.name.clone(), self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    /// Adds the entries of `other` that are not already present.
    pub fn extend_missing(&mut self, other: &Signature) {
        for e in &other.entries {
            if !self.by_name.contains_key(&e.name) {
                self.by_name.insert(e.name.clone(), self.entries.len());
                self.entries.push(e.clone());
            }
        }
    }

    fn check_arities(&self) -> Result<(), SignatureError> {
        let mut table = BTreeMap::new();
        for e in &self.entries {
            e.ty.constructor_arities(&mut table)
                .map_err(|(name, first, second)| SignatureError::Arity { name, first, second })?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&SignatureEntry> {
        self.by_name.get(name).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[SignatureEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Schemes of the logical constants that templates keep verbatim.
    pub fn logic() -> Signature {
        let a = || TypeExpr::var("a");
        let b = || TypeExpr::var("b");
        let bool_ = TypeExpr::bool;
        let prop = TypeExpr::prop;
        let set = |t| TypeExpr::con("Set.set", vec![t]);
        let binop = |t: fn() -> TypeExpr| TypeExpr::curried([t(), t()], t());
        let rel = |t: TypeExpr, r: TypeExpr| TypeExpr::curried([t.clone(), t], r);
        let quant = |r: fn() -> TypeExpr| TypeExpr::fun(TypeExpr::fun(a(), r()), r());
        let entries = vec![
            SignatureEntry::new("HOL.eq", rel(a(), bool_())),
            SignatureEntry::new("HOL.Not", TypeExpr::fun(bool_(), bool_())),
            SignatureEntry::new("HOL.conj", binop(bool_)),
            SignatureEntry::new("HOL.disj", binop(bool_)),
            SignatureEntry::new("HOL.implies", binop(bool_)),
            SignatureEntry::new("HOL.All", quant(bool_)),
            SignatureEntry::new("HOL.Ex", quant(bool_)),
            SignatureEntry::new("HOL.True", bool_()),
            SignatureEntry::new("HOL.False", bool_()),
            SignatureEntry::new("HOL.Trueprop", TypeExpr::fun(bool_(), prop())),
            SignatureEntry::new("Pure.imp", binop(prop)),
            SignatureEntry::new("Pure.all", quant(prop)),
            SignatureEntry::new("Pure.eq", rel(a(), prop())),
            SignatureEntry::new("Set.member", TypeExpr::curried([a(), set(a())], bool_())),
            SignatureEntry::new(
                "Set.Ball",
                TypeExpr::curried([set(a()), TypeExpr::fun(a(), bool_())], bool_()),
            ),
            SignatureEntry::new(
                "Set.Bex",
                TypeExpr::curried([set(a()), TypeExpr::fun(a(), bool_())], bool_()),
            ),
            SignatureEntry::new(
                "Product_Type.Pair",
                TypeExpr::curried([a(), b()], TypeExpr::con("Product_Type.prod", vec![a(), b()])),
            ),
            SignatureEntry::new("Orderings.ord_class.less", rel(a(), bool_())),
            SignatureEntry::new("Orderings.ord_class.less_eq", rel(a(), bool_())),
        ];
        Signature::new(entries).expect("logic signature is well formed")
    }

    /// `self` followed by every logical constant it does not already define.
    pub fn with_logic(&self) -> Signature {
        let mut sig = self.clone();
        sig.extend_missing(&Signature::logic());
        sig
    }
}

impl<'a> IntoIterator for &'a Signature {
    type Item = &'a SignatureEntry;
    type IntoIter = std::slice::Iter<'a, SignatureEntry>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
