use super::ast::{Method, ObjectBinding, PlanProgram, Statement};
use super::lexer::{tokenize, Cursor, Tok};
use super::{ParseError, Span};
use crate::catalog::Catalog;

const CONSTRUCTOR: &str = "InteractionObject";

/// Parses a plan script. Categories and landmarks must be in `catalog`.
pub fn parse_plan(source: &str, catalog: &Catalog) -> Result<PlanProgram, ParseError> {
    let mut cur = Cursor::new(tokenize(source)?);
    let mut program = PlanProgram::default();

    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        match (cur.peek_at(0).clone(), cur.peek_at(1).clone()) {
            (Tok::Ident(_), Tok::Eq) => parse_binding(&mut cur, catalog, &mut program)?,
            (Tok::Ident(_), Tok::Dot) => parse_call(&mut cur, &mut program)?,
            (Tok::Ident(name), Tok::LParen) => {
                return Err(ParseError::UnknownFunction { span: cur.peek().span, name });
            }
            (Tok::Ident(name), _) => {
                return Err(ParseError::syntax(
                    cur.peek().span,
                    format!("unsupported statement starting with `{name}`"),
                ));
            }
            (other, _) => {
                return Err(ParseError::syntax(
                    cur.peek().span,
                    format!("unexpected {}", other.describe()),
                ));
            }
        }
    }
    Ok(program)
}

fn parse_binding(
    cur: &mut Cursor,
    catalog: &Catalog,
    program: &mut PlanProgram,
) -> Result<(), ParseError> {
    let (var_name, var_span) = cur.expect_ident()?;
    cur.expect(Tok::Eq)?;
    let (ctor, ctor_span) = cur.expect_ident()?;
    if ctor != CONSTRUCTOR {
        return Err(ParseError::UnknownFunction { span: ctor_span, name: ctor });
    }
    cur.expect(Tok::LParen)?;
    let (category, cat_span) = cur.expect_str()?;
    check_category(catalog, &category, cat_span)?;

    let mut landmark = None;
    let mut attributes = None;
    let mut seen_landmark = false;
    while cur.peek().tok == Tok::Comma {
        cur.next();
        let (key, key_span) = cur.expect_ident()?;
        cur.expect(Tok::Eq)?;
        match key.as_str() {
            "landmark" if !seen_landmark => {
                seen_landmark = true;
                let tok = cur.next();
                match tok.tok {
                    Tok::Str(value) => {
                        check_category(catalog, &value, tok.span)?;
                        landmark = Some(value);
                    }
                    Tok::Ident(ref none) if none == "None" => {}
                    other => {
                        return Err(ParseError::syntax(
                            tok.span,
                            format!("expected landmark string, found {}", other.describe()),
                        ))
                    }
                }
            }
            "attributes" if attributes.is_none() => {
                cur.expect(Tok::LBracket)?;
                let mut list = Vec::new();
                if cur.peek().tok != Tok::RBracket {
                    loop {
                        list.push(cur.expect_str()?.0);
                        if cur.peek().tok == Tok::Comma {
                            cur.next();
                            if cur.peek().tok == Tok::RBracket {
                                break;
                            }
                        } else {
                            break;
                        }
                    }
                }
                cur.expect(Tok::RBracket)?;
                attributes = Some(list);
            }
            "landmark" | "attributes" => {
                return Err(ParseError::syntax(key_span, format!("duplicate keyword `{key}`")))
            }
            _ => {
                return Err(ParseError::syntax(key_span, format!("unknown keyword `{key}`")));
            }
        }
    }
    cur.expect(Tok::RParen)?;
    cur.end_statement()?;

    if program.binding(&var_name).is_some() {
        return Err(ParseError::DuplicateVariable { span: var_span, name: var_name });
    }
    program.bindings.push(ObjectBinding { var_name, category, landmark, attributes });
    program.spans.bindings.push(var_span);
    Ok(())
}

fn parse_call(cur: &mut Cursor, program: &mut PlanProgram) -> Result<(), ParseError> {
    let (receiver, recv_span) = cur.expect_ident()?;
    cur.expect(Tok::Dot)?;
    let (name, method_span) = cur.expect_ident()?;
    let method: Method = name
        .parse()
        .map_err(|_| ParseError::UnknownMethod { span: method_span, name: name.clone() })?;
    if program.binding(&receiver).is_none() {
        return Err(ParseError::UndefinedVariable { span: recv_span, name: receiver });
    }
    cur.expect(Tok::LParen)?;
    let arg = if method.takes_argument() {
        let (target, target_span) = cur.expect_ident()?;
        if program.binding(&target).is_none() {
            return Err(ParseError::UndefinedVariable { span: target_span, name: target });
        }
        Some(target)
    } else {
        None
    };
    let close = cur.next();
    if close.tok != Tok::RParen {
        let message = if method.takes_argument() {
            format!("`{name}` takes exactly one argument")
        } else {
            format!("`{name}` takes no arguments")
        };
        return Err(ParseError::syntax(close.span, message));
    }
    cur.end_statement()?;

    program.statements.push(Statement {
        receiver,
        method,
        arg,
        after_bindings: program.bindings.len(),
    });
    program.spans.statements.push(recv_span);
    Ok(())
}

fn check_category(catalog: &Catalog, category: &str, span: Span) -> Result<(), ParseError> {
    if catalog.contains(category) {
        Ok(())
    } else {
        Err(ParseError::UnknownCategory { span, category: category.to_string() })
    }
}
