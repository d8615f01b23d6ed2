//! The typed term language: types, terms, S-expression I/O, type inference,
//! unification and alpha equivalence.

mod alpha;
mod pretty;
mod sexp;
mod signature;
#[allow(clippy::module_inception)]
mod term;
mod types;
mod typing;

pub use alpha::{alpha_equal, alpha_key};
pub use pretty::pretty;
pub use sexp::{parse_term, parse_type, render_term, render_type, ParseError};
pub use signature::{Signature, SignatureEntry, SignatureError};
pub use term::Term;
pub use types::{unify_types, TypeExpr, TypeSubstitution, UnifyError, BOOL, FUN, PROP};
pub use typing::{typecheck, typecheck_annotated, typecheck_lenient, PathStep, TermPath, TypeError};

pub(crate) use typing::{ConstTyping, Inference};
