//! Plan-program language: a closed, straight-line subset of Python made of
//! `InteractionObject` bindings and method calls, plus the small call
//! language used by the question-asking scripts.

mod ast;
mod lexer;
mod parser;
mod print;
mod qa;
mod validate;

use thiserror::Error;

pub use ast::{
    Direction, Method, ObjectBinding, PlanProgram, QaCall, QaScript, SourceMap, Span, Statement,
};
pub use parser::parse_plan;
pub use print::pretty_print;
pub use qa::parse_qa_script;
pub use validate::{validate_plan, Severity, Violation, ViolationKind};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: unknown function `{name}`")]
    UnknownFunction { span: Span, name: String },
    #[error("{span}: unknown method `{name}`")]
    UnknownMethod { span: Span, name: String },
    #[error("{span}: category `{category}` is not in the object-class whitelist")]
    UnknownCategory { span: Span, category: String },
    #[error("{span}: variable `{name}` is already bound")]
    DuplicateVariable { span: Span, name: String },
    #[error("{span}: variable `{name}` is not bound to an InteractionObject")]
    UndefinedVariable { span: Span, name: String },
}

impl ParseError {
    pub(crate) fn syntax(span: Span, message: impl Into<String>) -> Self {
        ParseError::Syntax { span, message: message.into() }
    }

    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. }
            | ParseError::UnknownFunction { span, .. }
            | ParseError::UnknownMethod { span, .. }
            | ParseError::UnknownCategory { span, .. }
            | ParseError::DuplicateVariable { span, .. }
            | ParseError::UndefinedVariable { span, .. } => *span,
        }
    }
}
