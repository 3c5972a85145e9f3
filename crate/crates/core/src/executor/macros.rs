use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::dsl::Method;

/// Simulator primitive a macro may issue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Primitive {
    /// Path following: `MoveAhead`, `RotateLeft`, `RotateRight`, `LookUp`, `LookDown`.
    Navigate,
    Pickup,
    Place,
    Open,
    Close,
    ToggleOn,
    ToggleOff,
    Slice,
    Pour,
}

impl Primitive {
    /// Simulator action names this primitive expands to.
    pub fn action_names(self) -> &'static [&'static str] {
        match self {
            Primitive::Navigate => &["MoveAhead", "RotateLeft", "RotateRight", "LookUp", "LookDown"],
            Primitive::Pickup => &["Pickup"],
            Primitive::Place => &["Place"],
            Primitive::Open => &["Open"],
            Primitive::Close => &["Close"],
            Primitive::ToggleOn => &["ToggleOn"],
            Primitive::ToggleOff => &["ToggleOff"],
            Primitive::Slice => &["Slice"],
            Primitive::Pour => &["Pour"],
        }
    }
}

/// Condition checked before a macro runs, with the recovery it triggers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Precondition {
    /// The hand is empty; otherwise the held object is put down.
    HandEmpty,
    /// The receiver is held; otherwise it is picked up.
    HoldingReceiver,
    /// Some container is held; the call fails otherwise.
    HoldingContainer,
    /// A closed openable container around the receiver is opened first.
    ContainerOpen,
    /// A closed openable target receptacle is opened first.
    TargetOpen,
    /// An open appliance door is closed before switching on.
    DoorClosed,
    /// A running microwave is switched off before its door opens.
    ApplianceOff,
    /// A knife is fetched and held.
    HoldingKnife,
    /// The call is skipped when the object is already in the requested state.
    NotAlreadyDone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MacroSpec {
    pub method: Method,
    pub primitives: Vec<Primitive>,
    pub preconditions: Vec<Precondition>,
}

/// Expansion of every plan method into primitives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroTable {
    specs: BTreeMap<Method, MacroSpec>,
}

impl Serialize for MacroTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.specs.values())
    }
}

impl Default for MacroTable {
    fn default() -> Self {
        Self::builtin()
    }
}

impl MacroTable {
    pub fn builtin() -> Self {
        use Precondition::*;
        use Primitive::*;
        let rows: [(Method, Vec<Primitive>, Vec<Precondition>); 11] = [
            (Method::GoTo, vec![Navigate], vec![]),
            (Method::Pickup, vec![Navigate, Pickup], vec![HandEmpty, ContainerOpen, ApplianceOff, NotAlreadyDone]),
            (Method::Place, vec![Navigate, Place], vec![HoldingReceiver, TargetOpen, ApplianceOff]),
            (Method::PutDown, vec![Navigate, Place], vec![NotAlreadyDone]),
            (Method::Open, vec![Navigate, Open], vec![ApplianceOff, NotAlreadyDone]),
            (Method::Close, vec![Navigate, Close], vec![NotAlreadyDone]),
            (Method::ToggleOn, vec![Navigate, ToggleOn], vec![DoorClosed, NotAlreadyDone]),
            (Method::ToggleOff, vec![Navigate, ToggleOff], vec![NotAlreadyDone]),
            (Method::Slice, vec![Navigate, Slice], vec![HoldingKnife]),
            (Method::Pour, vec![Navigate, Pour], vec![HoldingContainer]),
            (
                Method::Clean,
                vec![Navigate, Place, ToggleOn, ToggleOff, Pickup],
                vec![HoldingReceiver],
            ),
        ];
        let specs = rows
            .into_iter()
            .map(|(method, primitives, preconditions)| (method, MacroSpec { method, primitives, preconditions }))
            .collect();
        Self { specs }
    }

    pub fn get(&self, method: Method) -> Option<&MacroSpec> {
        self.specs.get(&method)
    }

    pub fn specs(&self) -> impl Iterator<Item = &MacroSpec> {
        self.specs.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simworld::Action;

    #[test]
    fn every_method_has_a_macro() {
        let table = MacroTable::builtin();
        for m in Method::ALL {
            let spec = table.get(m).unwrap_or_else(|| panic!("{m} missing"));
            assert!(!spec.primitives.is_empty());
        }
    }

    #[test]
    fn primitives_are_simulator_actions() {
        let names: Vec<&str> = [
            Action::MoveAhead,
            Action::RotateLeft,
            Action::RotateRight,
            Action::LookUp,
            Action::LookDown,
            Action::Pickup(String::new()),
            Action::Place(String::new()),
            Action::Open(String::new()),
            Action::Close(String::new()),
            Action::ToggleOn(String::new()),
            Action::ToggleOff(String::new()),
            Action::Slice(String::new()),
            Action::Pour(String::new()),
        ]
        .iter()
        .map(Action::name)
        .collect();
        for spec in MacroTable::builtin().specs() {
            for p in &spec.primitives {
                for n in p.action_names() {
                    assert!(names.contains(n), "{n}");
                }
            }
        }
    }
}
