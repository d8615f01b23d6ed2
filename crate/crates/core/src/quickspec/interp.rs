use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::term::{parse_type, Term, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    List(Vec<i64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => f.write_str(if *b { "True" } else { "False" }),
            Value::List(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Value domain of a sort. Integer sorts are either residues mod `modulus`
/// (arithmetic wraps) or a sampling range `lo..=hi` (arithmetic is plain).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    IntMod { modulus: i64 },
    Range { lo: i64, hi: i64 },
    Bool,
    IntList { max_len: usize, elem_mod: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Int,
    Bool,
    List,
}

impl Domain {
    fn kind(&self) -> Kind {
        match self {
            Domain::IntMod { .. } | Domain::Range { .. } => Kind::Int,
            Domain::Bool => Kind::Bool,
            Domain::IntList { .. } => Kind::List,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sort {
    pub name: String,
    pub domain: Domain,
}

impl Sort {
    /// Boolean sorts are typed as `HOL.bool` so logical connectives apply.
    pub fn ty(&self) -> TypeExpr {
        match self.domain {
            Domain::Bool => TypeExpr::bool(),
            _ => TypeExpr::base(self.name.clone()),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Value {
        match self.domain {
            Domain::IntMod { modulus } => Value::Int(rng.gen_range(0..modulus)),
            Domain::Range { lo, hi } => Value::Int(rng.gen_range(lo..=hi)),
            Domain::Bool => Value::Bool(rng.gen()),
            Domain::IntList { max_len, elem_mod } => {
                let len = rng.gen_range(0..=max_len);
                Value::List((0..len).map(|_| rng.gen_range(0..elem_mod)).collect())
            }
        }
    }

    fn int(&self, n: i64) -> Value {
        match self.domain {
            Domain::IntMod { modulus } => Value::Int(n.rem_euclid(modulus)),
            _ => Value::Int(n),
        }
    }

    fn list(&self, xs: Vec<i64>) -> Value {
        match self.domain {
            Domain::IntList { elem_mod, .. } => Value::List(xs.into_iter().map(|x| x.rem_euclid(elem_mod)).collect()),
            _ => Value::List(xs),
        }
    }
}

/// Evaluators that symbols of an interpreted signature can name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    IntZero,
    IntOne,
    IntAdd,
    IntSub,
    IntMul,
    IntPow,
    IntNeg,
    IntSucc,
    IntLe,
    IntLt,
    Totient,
    Even,
    Prime,
    ListNil,
    ListCons,
    ListAppend,
    ListRev,
    ListLen,
    ListSum,
    BoolTrue,
    BoolFalse,
    BoolAnd,
    BoolOr,
    BoolNot,
    BoolImplies,
}

const BUILTINS: &[(&str, Builtin)] = &[
    ("int_zero", Builtin::IntZero),
    ("int_one", Builtin::IntOne),
    ("int_add", Builtin::IntAdd),
    ("int_sub", Builtin::IntSub),
    ("int_mul", Builtin::IntMul),
    ("int_pow", Builtin::IntPow),
    ("int_neg", Builtin::IntNeg),
    ("int_succ", Builtin::IntSucc),
    ("int_le", Builtin::IntLe),
    ("int_lt", Builtin::IntLt),
    ("totient", Builtin::Totient),
    ("even", Builtin::Even),
    ("prime", Builtin::Prime),
    ("list_nil", Builtin::ListNil),
    ("list_cons", Builtin::ListCons),
    ("list_append", Builtin::ListAppend),
    ("list_rev", Builtin::ListRev),
    ("list_len", Builtin::ListLen),
    ("list_sum", Builtin::ListSum),
    ("bool_true", Builtin::BoolTrue),
    ("bool_false", Builtin::BoolFalse),
    ("bool_and", Builtin::BoolAnd),
    ("bool_or", Builtin::BoolOr),
    ("bool_not", Builtin::BoolNot),
    ("bool_implies", Builtin::BoolImplies),
];

fn totient(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let (mut n, mut result, mut p) = (n, n, 2);
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

fn pow_mod(base: i64, exp: i64, modulus: i64) -> i64 {
    let (mut result, mut b, mut e) = (1i64 % modulus, base.rem_euclid(modulus), exp.max(0));
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % modulus;
        }
        b = b * b % modulus;
        e >>= 1;
    }
    result
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, b)| *b)
    }

    pub fn name(self) -> &'static str {
        BUILTINS.iter().find(|(_, b)| *b == self).map(|(n, _)| *n).unwrap()
    }

    fn shape(self) -> (&'static [Kind], Kind) {
        use Kind::*;
        match self {
            Builtin::IntZero | Builtin::IntOne => (&[], Int),
            Builtin::IntAdd | Builtin::IntSub | Builtin::IntMul | Builtin::IntPow => (&[Int, Int], Int),
            Builtin::IntNeg | Builtin::IntSucc | Builtin::Totient => (&[Int], Int),
            Builtin::IntLe | Builtin::IntLt => (&[Int, Int], Bool),
            Builtin::Even | Builtin::Prime => (&[Int], Bool),
            Builtin::ListNil => (&[], List),
            Builtin::ListCons => (&[Int, List], List),
            Builtin::ListAppend => (&[List, List], List),
            Builtin::ListRev => (&[List], List),
            Builtin::ListLen | Builtin::ListSum => (&[List], Int),
            Builtin::BoolTrue | Builtin::BoolFalse => (&[], Bool),
            Builtin::BoolAnd | Builtin::BoolOr | Builtin::BoolImplies => (&[Bool, Bool], Bool),
            Builtin::BoolNot => (&[Bool], Bool),
        }
    }

    /// Applies the evaluator; `result` fixes modular reduction. Arguments
    /// have already been checked against the shape.
    pub fn apply(self, args: &[&Value], result: &Sort) -> Value {
        let int = |i: usize| match args[i] {
            Value::Int(n) => *n,
            _ => unreachable!("argument kinds are checked when the signature loads"),
        };
        let boolean = |i: usize| matches!(args[i], Value::Bool(true));
        let list = |i: usize| match args[i] {
            Value::List(xs) => xs,
            _ => unreachable!("argument kinds are checked when the signature loads"),
        };
        match self {
            Builtin::IntZero => result.int(0),
            Builtin::IntOne => result.int(1),
            Builtin::IntAdd => result.int(int(0).wrapping_add(int(1))),
            Builtin::IntSub => result.int(int(0).wrapping_sub(int(1))),
            Builtin::IntMul => result.int(int(0).wrapping_mul(int(1))),
            Builtin::IntPow => match result.domain {
                Domain::IntMod { modulus } => Value::Int(pow_mod(int(0), int(1), modulus)),
                _ => Value::Int(int(0).wrapping_pow(int(1).clamp(0, 64) as u32)),
            },
            Builtin::IntNeg => result.int(int(0).wrapping_neg()),
            Builtin::IntSucc => result.int(int(0).wrapping_add(1)),
            Builtin::IntLe => Value::Bool(int(0) <= int(1)),
            Builtin::IntLt => Value::Bool(int(0) < int(1)),
            Builtin::Totient => result.int(totient(int(0))),
            Builtin::Even => Value::Bool(int(0) % 2 == 0),
            Builtin::Prime => Value::Bool(is_prime(int(0))),
            Builtin::ListNil => Value::List(Vec::new()),
            Builtin::ListCons => {
                let mut xs = vec![int(0)];
                xs.extend_from_slice(list(1));
                result.list(xs)
            }
            Builtin::ListAppend => {
                let mut xs = list(0).clone();
                xs.extend_from_slice(list(1));
                Value::List(xs)
            }
            Builtin::ListRev => Value::List(list(0).iter().rev().copied().collect()),
            Builtin::ListLen => result.int(list(0).len() as i64),
            Builtin::ListSum => result.int(list(0).iter().fold(0i64, |a, b| a.wrapping_add(*b))),
            Builtin::BoolTrue => Value::Bool(true),
            Builtin::BoolFalse => Value::Bool(false),
            Builtin::BoolAnd => Value::Bool(boolean(0) && boolean(1)),
            Builtin::BoolOr => Value::Bool(boolean(0) || boolean(1)),
            Builtin::BoolNot => Value::Bool(!boolean(0)),
            Builtin::BoolImplies => Value::Bool(!boolean(0) || boolean(1)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpSymbol {
    pub name: String,
    pub ty: TypeExpr,
    /// Sort indices of the arguments, then of the result.
    pub args: Vec<usize>,
    pub result: usize,
    pub builtin: Builtin,
}

impl InterpSymbol {
    pub fn constant(&self) -> Term {
        Term::constant(self.name.clone(), self.ty.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpretedSignature {
    pub sorts: Vec<Sort>,
    pub symbols: Vec<InterpSymbol>,
    pub vars_per_sort: usize,
}

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("invalid sort {name}: {reason}")]
    InvalidSort { name: String, reason: String },
    #[error("symbol {symbol}: unknown sort or malformed type {ty}")]
    BadType { symbol: String, ty: String },
    #[error("symbol {symbol}: unknown builtin {builtin}")]
    UnknownBuiltin { symbol: String, builtin: String },
    #[error("symbol {symbol}: type does not fit builtin {builtin}")]
    BuiltinMismatch { symbol: String, builtin: String },
    #[error("duplicate name {0}")]
    Duplicate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSort {
    name: String,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default, rename = "mod")]
    modulus: Option<i64>,
    #[serde(default)]
    lo: Option<i64>,
    #[serde(default)]
    hi: Option<i64>,
    #[serde(default)]
    max_len: Option<usize>,
    #[serde(default)]
    elem_mod: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSymbol {
    name: String,
    #[serde(rename = "type")]
    ty: String,
    builtin: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignature {
    sorts: Vec<RawSort>,
    symbols: Vec<RawSymbol>,
    #[serde(default = "default_vars")]
    vars_per_sort: usize,
}

fn default_vars() -> usize {
    3
}

impl RawSort {
    fn into_sort(self) -> Result<Sort, InterpError> {
        let bad = |reason: &str| InterpError::InvalidSort {
            name: self.name.clone(),
            reason: reason.into(),
        };
        let kind = self.kind.as_deref().unwrap_or(if self.modulus.is_some() {
            "int_mod"
        } else if self.lo.is_some() || self.hi.is_some() {
            "range"
        } else {
            ""
        });
        let domain = match kind {
            "int_mod" => match self.modulus {
                Some(m) if m >= 1 => Domain::IntMod { modulus: m },
                _ => return Err(bad("needs \"mod\" >= 1")),
            },
            "range" => match (self.lo, self.hi) {
                (Some(lo), Some(hi)) if lo <= hi => Domain::Range { lo, hi },
                _ => return Err(bad("needs \"lo\" <= \"hi\"")),
            },
            "bool" => Domain::Bool,
            "list" => Domain::IntList {
                max_len: self.max_len.unwrap_or(4),
                elem_mod: match self.elem_mod.unwrap_or(5) {
                    m if m >= 1 => m,
                    _ => return Err(bad("\"elem_mod\" must be >= 1")),
                },
            },
            "" => return Err(bad("missing \"kind\"")),
            other => return Err(bad(&format!("unknown kind {other}"))),
        };
        Ok(Sort { name: self.name, domain })
    }
}

impl InterpretedSignature {
    /// Reads the JSON form, e.g.
    /// `{"sorts":[{"name":"int","mod":101}],"symbols":[{"name":"plus","type":"int => int => int","builtin":"int_add"}],"vars_per_sort":3}`.
    /// Symbol types are either `=>`-separated sort names or S-expressions.
    pub fn from_json(text: &str) -> Result<InterpretedSignature, InterpError> {
        let raw: RawSignature = serde_json::from_str(text)?;
        let sorts: Vec<Sort> = raw.sorts.into_iter().map(RawSort::into_sort).collect::<Result<_, _>>()?;
        let mut seen = HashSet::new();
        for s in &sorts {
            if !seen.insert(s.name.clone()) {
                return Err(InterpError::Duplicate(s.name.clone()));
            }
        }
        let mut sig = InterpretedSignature {
            sorts,
            symbols: Vec::new(),
            vars_per_sort: raw.vars_per_sort,
        };
        for sym in raw.symbols {
            let builtin = Builtin::from_name(&sym.builtin).ok_or_else(|| InterpError::UnknownBuiltin {
                symbol: sym.name.clone(),
                builtin: sym.builtin.clone(),
            })?;
            let ty = sig.parse_symbol_type(&sym.ty).ok_or_else(|| InterpError::BadType {
                symbol: sym.name.clone(),
                ty: sym.ty.clone(),
            })?;
            sig.add_symbol(&sym.name, ty, builtin)?;
        }
        Ok(sig)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<InterpretedSignature, InterpError> {
        InterpretedSignature::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn new(sorts: Vec<Sort>, vars_per_sort: usize) -> Self {
        InterpretedSignature {
            sorts,
            symbols: Vec::new(),
            vars_per_sort,
        }
    }

    /// Adds a symbol after checking its type against the builtin's shape.
    pub fn add_symbol(&mut self, name: &str, ty: TypeExpr, builtin: Builtin) -> Result<(), InterpError> {
        if self.symbols.iter().any(|s| s.name == name) {
            return Err(InterpError::Duplicate(name.into()));
        }
        let mismatch = || InterpError::BuiltinMismatch {
            symbol: name.into(),
            builtin: builtin.name().into(),
        };
        let mut args = Vec::new();
        let mut cur = &ty;
        while let Some((dom, cod)) = cur.as_fun() {
            args.push(self.sort_of_type(dom).ok_or_else(mismatch)?);
            cur = cod;
        }
        let result = self.sort_of_type(cur).ok_or_else(mismatch)?;
        let (want_args, want_result) = builtin.shape();
        let fits = want_args.len() == args.len()
            && want_args.iter().zip(&args).all(|(k, s)| self.sorts[*s].domain.kind() == *k)
            && self.sorts[result].domain.kind() == want_result;
        if !fits {
            return Err(mismatch());
        }
        self.symbols.push(InterpSymbol {
            name: name.into(),
            ty,
            args,
            result,
            builtin,
        });
        Ok(())
    }

    fn parse_symbol_type(&self, text: &str) -> Option<TypeExpr> {
        if text.trim_start().starts_with('(') {
            return parse_type(text).ok();
        }
        let parts: Vec<TypeExpr> = text
            .split("=>")
            .map(|p| self.sorts.iter().find(|s| s.name == p.trim()).map(Sort::ty))
            .collect::<Option<_>>()?;
        let (result, args) = parts.split_last()?;
        Some(TypeExpr::curried(args.iter().cloned(), result.clone()))
    }

    pub fn sort_of_type(&self, ty: &TypeExpr) -> Option<usize> {
        self.sorts.iter().position(|s| &s.ty() == ty)
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s.name == name)
    }

    /// Matches a constant name exactly or by its last dot-separated
    /// component, so `Groups.minus_class.minus` finds `minus`.
    pub fn symbol(&self, name: &str) -> Option<&InterpSymbol> {
        self.symbols.iter().find(|s| s.name == name).or_else(|| {
            let short = name.rsplit('.').next().unwrap_or(name);
            self.symbols.iter().find(|s| s.name == short)
        })
    }

    /// Enumeration variables: `x1, x2, ..` numbered across sorts in sort
    /// order, `vars_per_sort` of each. Returns `(sort, index within sort, term)`.
    pub fn variables(&self) -> Vec<(usize, usize, Term)> {
        let mut out = Vec::new();
        for (s, sort) in self.sorts.iter().enumerate() {
            for i in 0..self.vars_per_sort {
                let name = format!("x{}", out.len() + 1);
                out.push((s, i, Term::free(name, sort.ty())));
            }
        }
        out
    }
}
