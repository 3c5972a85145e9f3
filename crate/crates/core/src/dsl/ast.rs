use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Methods callable on an `InteractionObject`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    GoTo,
    Pickup,
    Place,
    PutDown,
    Open,
    Close,
    ToggleOn,
    ToggleOff,
    Slice,
    Pour,
    Clean,
}

impl Method {
    pub const ALL: [Method; 11] = [
        Method::GoTo,
        Method::Pickup,
        Method::Place,
        Method::PutDown,
        Method::Open,
        Method::Close,
        Method::ToggleOn,
        Method::ToggleOff,
        Method::Slice,
        Method::Pour,
        Method::Clean,
    ];

    /// Name as written in plan source.
    pub fn source_name(self) -> &'static str {
        match self {
            Method::GoTo => "go_to",
            Method::Pickup => "pickup",
            Method::Place => "place",
            Method::PutDown => "put_down",
            Method::Open => "open",
            Method::Close => "close",
            Method::ToggleOn => "toggle_on",
            Method::ToggleOff => "toggle_off",
            Method::Slice => "slice",
            Method::Pour => "pour",
            Method::Clean => "clean",
        }
    }

    pub fn takes_argument(self) -> bool {
        self == Method::Place
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.source_name())
    }
}

impl FromStr for Method {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.source_name() == s).ok_or(())
    }
}

/// `var = InteractionObject("Category", landmark = "...", attributes = [...])`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectBinding {
    pub var_name: String,
    pub category: String,
    pub landmark: Option<String>,
    pub attributes: Option<Vec<String>>,
}

/// `receiver.method(arg)`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub receiver: String,
    pub method: Method,
    pub arg: Option<String>,
    /// Number of bindings declared before this statement in the source.
    pub after_bindings: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SourceMap {
    pub bindings: Vec<Span>,
    pub statements: Vec<Span>,
}

/// A parsed straight-line plan script.
///
/// Equality compares bindings and statements only; source spans are ignored.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PlanProgram {
    pub bindings: Vec<ObjectBinding>,
    pub statements: Vec<Statement>,
    pub spans: SourceMap,
}

impl PartialEq for PlanProgram {
    fn eq(&self, other: &Self) -> bool {
        self.bindings == other.bindings && self.statements == other.statements
    }
}

impl PlanProgram {
    pub fn binding(&self, var_name: &str) -> Option<&ObjectBinding> {
        self.bindings.iter().find(|b| b.var_name == var_name)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty() && self.statements.is_empty()
    }
}

/// Compass-free direction used by the search API.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    Forward,
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

impl FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            _ => Err(()),
        }
    }
}

/// One call in a question or answer-parsing script.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "call", rename_all = "snake_case")]
pub enum QaCall {
    AskForLocation { category: String },
    AskForDirection { category: String },
    AskForAppearance { category: String },
    Turn { direction: Direction },
    Move { direction: Direction },
    SearchNearOtherObject { category: String, landmark: String },
}

impl QaCall {
    pub fn is_question(&self) -> bool {
        matches!(
            self,
            QaCall::AskForLocation { .. } | QaCall::AskForDirection { .. } | QaCall::AskForAppearance { .. }
        )
    }
}

impl fmt::Display for QaCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QaCall::AskForLocation { category } => write!(f, "askForLocation('{category}')"),
            QaCall::AskForDirection { category } => write!(f, "askForDirection('{category}')"),
            QaCall::AskForAppearance { category } => write!(f, "askForAppearance('{category}')"),
            QaCall::Turn { direction } => write!(f, "turn('{}')", direction.as_str()),
            QaCall::Move { direction } => write!(f, "move('{}')", direction.as_str()),
            QaCall::SearchNearOtherObject { category, landmark } => {
                write!(f, "search_near_other_object('{category}', '{landmark}')")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaScript {
    pub calls: Vec<QaCall>,
}
