use super::ast::{Direction, QaCall, QaScript};
use super::lexer::{tokenize, Cursor, Tok};
use super::{ParseError, Span};
use crate::catalog::Catalog;

/// Parses a question-selection or answer-parsing script into calls.
pub fn parse_qa_script(source: &str, catalog: &Catalog) -> Result<QaScript, ParseError> {
    let mut cur = Cursor::new(tokenize(source)?);
    let mut calls = Vec::new();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        let (name, span) = cur.expect_ident()?;
        cur.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if cur.peek().tok != Tok::RParen {
            loop {
                args.push(cur.expect_str()?);
                if cur.peek().tok == Tok::Comma {
                    cur.next();
                } else {
                    break;
                }
            }
        }
        cur.expect(Tok::RParen)?;
        cur.end_statement()?;
        calls.push(build_call(&name, span, args, catalog)?);
    }
    Ok(QaScript { calls })
}

fn build_call(
    name: &str,
    span: Span,
    args: Vec<(String, Span)>,
    catalog: &Catalog,
) -> Result<QaCall, ParseError> {
    let arity = match name {
        "askForLocation" | "askForDirection" | "askForAppearance" | "turn" | "move" => 1,
        "search_near_other_object" => 2,
        _ => return Err(ParseError::UnknownFunction { span, name: name.to_string() }),
    };
    if args.len() != arity {
        return Err(ParseError::syntax(
            span,
            format!("`{name}` takes {arity} argument(s), got {}", args.len()),
        ));
    }
    let category = |(value, span): &(String, Span)| -> Result<String, ParseError> {
        if catalog.contains(value) {
            Ok(value.clone())
        } else {
            Err(ParseError::UnknownCategory { span: *span, category: value.clone() })
        }
    };
    let direction = |(value, span): &(String, Span)| -> Result<Direction, ParseError> {
        value
            .parse()
            .map_err(|_| ParseError::syntax(*span, format!("unknown direction `{value}`")))
    };
    Ok(match name {
        "askForLocation" => QaCall::AskForLocation { category: category(&args[0])? },
        "askForDirection" => QaCall::AskForDirection { category: category(&args[0])? },
        "askForAppearance" => QaCall::AskForAppearance { category: category(&args[0])? },
        "turn" => QaCall::Turn { direction: direction(&args[0])? },
        "move" => QaCall::Move { direction: direction(&args[0])? },
        _ => QaCall::SearchNearOtherObject {
            category: category(&args[0])?,
            landmark: category(&args[1])?,
        },
    })
}
