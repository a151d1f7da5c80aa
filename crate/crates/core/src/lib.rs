//! Natural-language comparison engine: parse comparison utterances against a
//! table, resolve vague terms into concrete predicates and measures, rank the
//! chart designs that suit the comparison and emit Vega-Lite documents.

pub mod canonical;
pub mod catalog;
pub mod dataset;
pub mod emitter;
pub mod engine;
pub mod error;
pub mod lexicon;
pub mod par;
pub mod parser;
pub mod recommend;
pub mod resolver;
pub mod text;

pub use error::{Error, ErrorClass, Result};
