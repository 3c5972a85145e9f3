use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Method, PlanProgram};
use super::Span;
use crate::catalog::{Affordances, Capability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    /// Method not permitted for the receiver's category.
    Affordance,
    /// Pickup while another object is symbolically held.
    DoubleHold,
    /// Same call on the same receiver in successive steps.
    Redundant,
    /// Program ends while still holding an object.
    UnplacedHold,
    PlaceTargetNotReceptacle,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Affordance => "AFFORDANCE",
            ViolationKind::DoubleHold => "DOUBLE_HOLD",
            ViolationKind::Redundant => "REDUNDANT",
            ViolationKind::UnplacedHold => "UNPLACED_HOLD",
            ViolationKind::PlaceTargetNotReceptacle => "PLACE_TARGET_NOT_RECEPTACLE",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub severity: Severity,
    /// Index into `PlanProgram::statements`; `None` for end-of-program checks.
    pub statement: Option<usize>,
    pub span: Option<Span>,
    pub message: String,
}

fn required_capability(method: Method) -> Option<Capability> {
    match method {
        Method::GoTo => None,
        Method::Pickup | Method::Place | Method::PutDown => Some(Capability::Pickupable),
        Method::Open | Method::Close => Some(Capability::Openable),
        Method::ToggleOn | Method::ToggleOff => Some(Capability::Toggleable),
        Method::Slice => Some(Capability::Sliceable),
        Method::Pour => Some(Capability::Receptacle),
        Method::Clean => Some(Capability::Cleanable),
    }
}

/// Static checks over a parsed program. Violations are data, never errors.
pub fn validate_plan(program: &PlanProgram, affordances: &Affordances) -> Vec<Violation> {
    let mut out = Vec::new();
    let category = |var: &str| program.binding(var).map(|b| b.category.as_str()).unwrap_or("");
    let mut held: Option<&str> = None;

    for (idx, stmt) in program.statements.iter().enumerate() {
        let span = program.spans.statements.get(idx).copied();
        let mut push = |kind, message: String| {
            out.push(Violation { kind, severity: Severity::Error, statement: Some(idx), span, message })
        };
        let recv_cat = category(&stmt.receiver);

        if let Some(cap) = required_capability(stmt.method) {
            if !affordances.has(recv_cat, cap) {
                push(
                    ViolationKind::Affordance,
                    format!("{recv_cat} is not {cap}; `{}.{}()` is not allowed", stmt.receiver, stmt.method),
                );
            }
        }
        if let (Method::Place, Some(target)) = (stmt.method, stmt.arg.as_deref()) {
            let target_cat = category(target);
            if !affordances.has(target_cat, Capability::Receptacle) {
                push(
                    ViolationKind::PlaceTargetNotReceptacle,
                    format!("cannot place into {target_cat}: not a receptacle"),
                );
            }
        }
        if idx > 0 {
            let prev = &program.statements[idx - 1];
            if prev.receiver == stmt.receiver && prev.method == stmt.method && prev.arg == stmt.arg {
                push(
                    ViolationKind::Redundant,
                    format!("`{}.{}()` repeated in successive steps", stmt.receiver, stmt.method),
                );
            }
        }

        match stmt.method {
            Method::Pickup => {
                if let Some(other) = held.filter(|h| *h != stmt.receiver) {
                    push(
                        ViolationKind::DoubleHold,
                        format!("picking up `{}` while still holding `{other}`", stmt.receiver),
                    );
                }
                held = Some(stmt.receiver.as_str());
            }
            Method::Place | Method::PutDown if held == Some(stmt.receiver.as_str()) => held = None,
            _ => {}
        }
    }

    if let Some(var) = held {
        out.push(Violation {
            kind: ViolationKind::UnplacedHold,
            severity: Severity::Warning,
            statement: None,
            span: None,
            message: format!("program ends while holding `{var}`"),
        });
    }
    out
}
