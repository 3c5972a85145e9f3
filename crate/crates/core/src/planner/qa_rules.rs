use super::PlannerError;
use crate::dsl::{Direction, QaCall, QaScript};
use crate::prompt::{AssembledPrompt, TemplateKind};
use crate::Catalog;

/// Longest catalog class named in `text`, earliest first.
fn mentioned_category<'c>(text: &str, catalog: &'c Catalog) -> Option<&'c str> {
    catalog
        .classes()
        .iter()
        .filter_map(|c| text.find(c.as_str()).map(|pos| (pos, std::cmp::Reverse(c.len()), c.as_str())))
        .min()
        .map(|(_, _, c)| c)
}

/// The question to ask for a blocking-condition context sentence.
pub fn question_for_context(context: &str, catalog: &Catalog) -> Option<QaCall> {
    mentioned_category(context, catalog).map(|c| QaCall::AskForLocation { category: c.to_string() })
}


fn turns(phrase: &str) -> Vec<QaCall> {
    let turn = |d| QaCall::Turn { direction: d };
    let fwd = QaCall::Move { direction: Direction::Forward };
    match phrase {
        "to your front right" => vec![turn(Direction::Right), fwd],
        "to your front left" => vec![turn(Direction::Left), fwd],
        "to your right" => vec![turn(Direction::Right)],
        "to your left" => vec![turn(Direction::Left)],
        "to your back right" | "behind you" => vec![turn(Direction::Right), turn(Direction::Right)],
        "to your back left" => vec![turn(Direction::Left), turn(Direction::Left)],
        _ => vec![],
    }
}

/// Turns a location or direction answer into search calls.
pub fn answer_to_script(answer: &str, catalog: &Catalog) -> QaScript {
    let Some(rest) = answer.trim().strip_prefix("The ") else {
        return QaScript::default();
    };
    let Some((category, tail)) = rest.split_once(" is ") else {
        return QaScript::default();
    };
    let Some(category) = catalog.classes().iter().find(|c| c.as_str() == category) else {
        return QaScript::default();
    };
    let phrase = [
        "in front of you",
        "to your front right",
        "to your front left",
        "to your back right",
        "to your back left",
        "to your right",
        "to your left",
        "behind you",
    ]
    .into_iter()
    .find(|p| tail.starts_with(p));
    let mut calls = phrase.map(turns).unwrap_or_default();
    let landmark = ["in the ", "on the "]
        .into_iter()
        .find_map(|p| tail.find(p).map(|i| &tail[i + p.len()..]))
        .map(|s| s.trim_end_matches('.').trim())
        .and_then(|spoken| catalog.category_from_spoken(spoken));
    if let Some(landmark) = landmark {
        calls.push(QaCall::SearchNearOtherObject { category: category.clone(), landmark: landmark.to_string() });
    }
    QaScript { calls }
}

fn render(script: &QaScript) -> String {
    script.calls.iter().map(|c| format!("{c}\n")).collect()
}

/// Offline stand-in for the question-selection and answer-parsing prompts.
pub(crate) fn respond(prompt: &AssembledPrompt, catalog: &Catalog) -> Result<String, PlannerError> {
    match prompt.kind {
        TemplateKind::Question => question_for_context(&prompt.command, catalog)
            .map(|q| format!("{q}\n"))
            .ok_or_else(|| PlannerError::NoProgram(format!("no object named in `{}`", prompt.command))),
        TemplateKind::Answer => Ok(render(&answer_to_script(&prompt.command, catalog))),
        TemplateKind::Plan => Err(PlannerError::Request("plan prompt sent to the question responder".into())),
    }
}
