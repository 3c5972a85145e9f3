//! Prompt assembly for planning and question asking.
//!
//! Templates are plain text with `{NAME}` slots; `{{` and `}}` stand for
//! literal braces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::memory::ExampleRecord;
use crate::Domain;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PromptError {
    #[error("template error: {0}")]
    Template(String),
    #[error("input error: {0}")]
    Input(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    Plan,
    Question,
    Answer,
}

impl TemplateKind {
    pub fn required_slots(self) -> &'static [&'static str] {
        match self {
            TemplateKind::Plan => &["API", "RETRIEVED_EXAMPLES", "OBJECT_CLASSES", "command"],
            TemplateKind::Question => &["API", "OBJECT_CLASSES", "context"],
            TemplateKind::Answer => &["API", "OBJECT_CLASSES", "context", "question", "answer"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Piece {
    Text(String),
    Slot(String),
}

/// A parsed, slot-checked template.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplate {
    body: String,
    kind: TemplateKind,
    pieces: Vec<Piece>,
    guideline_count: usize,
}

impl PromptTemplate {
    pub fn parse(body: &str, kind: TemplateKind) -> Result<Self, PromptError> {
        if body.trim().is_empty() {
            return Err(PromptError::Template("empty template body".into()));
        }
        let pieces = split_slots(body)?;
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for piece in &pieces {
            if let Piece::Slot(name) = piece {
                if !kind.required_slots().contains(&name.as_str()) {
                    return Err(PromptError::Template(format!("unknown slot {{{name}}}")));
                }
                *counts.entry(name.as_str()).or_default() += 1;
            }
        }
        for slot in kind.required_slots() {
            match counts.get(slot).copied().unwrap_or(0) {
                1 => {}
                0 => return Err(PromptError::Template(format!("missing slot {{{slot}}}"))),
                n => return Err(PromptError::Template(format!("slot {{{slot}}} appears {n} times"))),
            }
        }
        let guideline_count = body.lines().filter(|l| is_numbered_item(l)).count();
        Ok(Self { body: body.to_string(), kind, pieces, guideline_count })
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn kind(&self) -> TemplateKind {
        self.kind
    }

    pub fn guideline_count(&self) -> usize {
        self.guideline_count
    }

    /// Literal text preceding `{command}` on its line, e.g. `dialogue: `.
    pub fn input_prefix(&self) -> &str {
        let mut prev: Option<&str> = None;
        for piece in &self.pieces {
            match piece {
                Piece::Slot(name) if name == "command" => {
                    return prev.map(|t| t.rsplit('\n').next().unwrap_or("")).unwrap_or("");
                }
                Piece::Text(t) => prev = Some(t),
                Piece::Slot(_) => prev = None,
            }
        }
        ""
    }

    fn render(&self, values: &BTreeMap<&str, &str>) -> String {
        let mut out = String::with_capacity(self.body.len());
        for piece in &self.pieces {
            match piece {
                Piece::Text(t) => out.push_str(t),
                Piece::Slot(name) => out.push_str(values.get(name.as_str()).copied().unwrap_or("")),
            }
        }
        out
    }
}

fn is_numbered_item(line: &str) -> bool {
    let digits = line.chars().take_while(char::is_ascii_digit).count();
    digits > 0 && line[digits..].starts_with(". ")
}

fn split_slots(body: &str) -> Result<Vec<Piece>, PromptError> {
    let mut pieces = Vec::new();
    let mut text = String::new();
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '{' if chars.peek() == Some(&'{') => {
                chars.next();
                text.push('{');
            }
            '}' if chars.peek() == Some(&'}') => {
                chars.next();
                text.push('}');
            }
            '{' => {
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some('}') => break,
                        Some(ch) if ch.is_ascii_alphanumeric() || ch == '_' => name.push(ch),
                        _ => return Err(PromptError::Template(format!("malformed slot after `{{{name}`"))),
                    }
                }
                if name.is_empty() {
                    return Err(PromptError::Template("empty slot `{}`".into()));
                }
                if !text.is_empty() {
                    pieces.push(Piece::Text(std::mem::take(&mut text)));
                }
                pieces.push(Piece::Slot(name));
            }
            '}' => return Err(PromptError::Template("unmatched `}`".into())),
            _ => text.push(c),
        }
    }
    if !text.is_empty() {
        pieces.push(Piece::Text(text));
    }
    Ok(pieces)
}

/// A fully substituted prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembledPrompt {
    pub text: String,
    pub kind: TemplateKind,
    /// `None` for domain-agnostic templates.
    pub domain: Option<Domain>,
    /// The instruction, context or answer this prompt is about.
    pub command: String,
    pub example_ids: Vec<String>,
    pub token_estimate: usize,
}

impl AssembledPrompt {
    fn new(text: String, kind: TemplateKind, domain: Option<Domain>, command: &str, example_ids: Vec<String>) -> Self {
        let token_estimate = text.chars().count().div_ceil(4);
        Self { text, kind, domain, command: command.to_string(), example_ids, token_estimate }
    }
}

fn require(kind: TemplateKind, template: &PromptTemplate) -> Result<(), PromptError> {
    if template.kind == kind {
        Ok(())
    } else {
        Err(PromptError::Template(format!("expected a {kind:?} template, got {:?}", template.kind)))
    }
}

fn non_empty(name: &str, value: &str) -> Result<(), PromptError> {
    if value.trim().is_empty() {
        Err(PromptError::Input(format!("empty {name}")))
    } else {
        Ok(())
    }
}

/// Renders examples in retrieval order as `input / Python script: / program`.
pub fn format_examples(examples: &[&ExampleRecord], input_prefix: &str) -> String {
    examples
        .iter()
        .map(|e| format!("{input_prefix}{}\nPython script:\n{}", e.key_text.trim(), e.program_text.trim_end()))
        .collect::<Vec<_>>()
        .join("\n\n")
}

pub fn assemble_plan_prompt(
    template: &PromptTemplate,
    domain: Option<Domain>,
    examples: &[&ExampleRecord],
    api_text: &str,
    object_classes: &str,
    command: &str,
) -> Result<AssembledPrompt, PromptError> {
    require(TemplateKind::Plan, template)?;
    non_empty("command", command)?;
    non_empty("object class list", object_classes)?;
    non_empty("API text", api_text)?;
    let rendered = format_examples(examples, template.input_prefix());
    let values = BTreeMap::from([
        ("API", api_text.trim_end()),
        ("RETRIEVED_EXAMPLES", rendered.as_str()),
        ("OBJECT_CLASSES", object_classes),
        ("command", command.trim()),
    ]);
    let ids = examples.iter().map(|e| e.id.clone()).collect();
    Ok(AssembledPrompt::new(template.render(&values), TemplateKind::Plan, domain, command.trim(), ids))
}

pub fn assemble_question_prompt(
    template: &PromptTemplate,
    context: &str,
    question_api_text: &str,
    object_classes: &str,
) -> Result<AssembledPrompt, PromptError> {
    require(TemplateKind::Question, template)?;
    non_empty("context", context)?;
    if question_api_text.trim().is_empty() {
        return Err(PromptError::Template("missing question API text".into()));
    }
    let values = BTreeMap::from([
        ("API", question_api_text.trim_end()),
        ("OBJECT_CLASSES", object_classes),
        ("context", context.trim()),
    ]);
    Ok(AssembledPrompt::new(template.render(&values), TemplateKind::Question, None, context.trim(), Vec::new()))
}

pub fn assemble_answer_prompt(
    template: &PromptTemplate,
    context: &str,
    question: &str,
    answer: &str,
    search_api_text: &str,
    object_classes: &str,
) -> Result<AssembledPrompt, PromptError> {
    require(TemplateKind::Answer, template)?;
    non_empty("context", context)?;
    non_empty("question", question)?;
    non_empty("answer", answer)?;
    if search_api_text.trim().is_empty() {
        return Err(PromptError::Template("missing search API text".into()));
    }
    let values = BTreeMap::from([
        ("API", search_api_text.trim_end()),
        ("OBJECT_CLASSES", object_classes),
        ("context", context.trim()),
        ("question", question.trim()),
        ("answer", answer.trim()),
    ]);
    Ok(AssembledPrompt::new(template.render(&values), TemplateKind::Answer, None, answer.trim(), Vec::new()))
}

/// The tidy-task instruction sentence.
pub fn synthesize_tidy_command(out_of_place: &[&str], receptacles: &[&str]) -> String {
    format!(
        "Tidy up the house. These are the out of place objects: {}. These are the receptacles in the current scene: {}.",
        out_of_place.join(", "),
        receptacles.join(", ")
    )
}

/// The question and answer templates shipped with the crate.
pub fn builtin_question_template() -> PromptTemplate {
    PromptTemplate::parse(crate::assets::QUESTION_TEMPLATE, TemplateKind::Question).expect("shipped template")
}

pub fn builtin_answer_template() -> PromptTemplate {
    PromptTemplate::parse(crate::assets::ANSWER_TEMPLATE, TemplateKind::Answer).expect("shipped template")
}

pub fn builtin_shared_template() -> PromptTemplate {
    PromptTemplate::parse(crate::assets::SHARED_TEMPLATE, TemplateKind::Plan).expect("shipped template")
}
