//! Template abstraction: holes for theory symbols, generalized types and
//! canonical names, plus the whitelist of retained logical constants.

mod template;
mod whitelist;

pub use template::{
    abstract_lemma, canonical_string, parse_template, template_from_body, Template, TemplateError,
};
pub use whitelist::{default_whitelist, Whitelist, WhitelistError};
