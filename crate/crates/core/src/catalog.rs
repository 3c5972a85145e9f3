//! Object-class whitelist and per-category affordances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assets;

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("category `{0}` is whitelisted but has no affordance entry")]
    MissingAffordance(String),
}

/// One interaction capability a category may have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Capability {
    Openable,
    Toggleable,
    Pickupable,
    Receptacle,
    Sliceable,
    Fillable,
    Cleanable,
    Heatable,
}

impl Capability {
    pub const ALL: [Capability; 8] = [
        Capability::Openable,
        Capability::Toggleable,
        Capability::Pickupable,
        Capability::Receptacle,
        Capability::Sliceable,
        Capability::Fillable,
        Capability::Cleanable,
        Capability::Heatable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Capability::Openable => "openable",
            Capability::Toggleable => "toggleable",
            Capability::Pickupable => "pickupable",
            Capability::Receptacle => "receptacle",
            Capability::Sliceable => "sliceable",
            Capability::Fillable => "fillable",
            Capability::Cleanable => "cleanable",
            Capability::Heatable => "heatable",
        }
    }
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Capability {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Capability::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown capability `{s}`"))
    }
}

/// Capability table keyed by category name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Affordances {
    table: BTreeMap<String, BTreeSet<Capability>>,
}

impl Affordances {
    /// Parses `Category: cap cap ...` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut table = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let (name, caps) = line.split_once(':').ok_or_else(|| CatalogError::Syntax {
                line: idx + 1,
                message: "expected `Category: capabilities`".into(),
            })?;
            let mut set = BTreeSet::new();
            for tok in caps.split(|c: char| c == ',' || c.is_whitespace()) {
                if tok.is_empty() {
                    continue;
                }
                let cap = tok.parse().map_err(|message| CatalogError::Syntax {
                    line: idx + 1,
                    message,
                })?;
                set.insert(cap);
            }
            table.insert(name.trim().to_string(), set);
        }
        Ok(Self { table })
    }

    pub fn has(&self, category: &str, cap: Capability) -> bool {
        self.table.get(category).is_some_and(|caps| caps.contains(&cap))
    }

    pub fn capabilities(&self, category: &str) -> Option<&BTreeSet<Capability>> {
        self.table.get(category)
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }
}

/// Whitelist plus affordances: everything the parser, validator and world
/// need to know about object categories.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    classes: Vec<String>,
    affordances: Affordances,
}

impl Catalog {
    pub fn new(classes: Vec<String>, affordances: Affordances) -> Result<Self, CatalogError> {
        if let Some(missing) = classes.iter().find(|c| affordances.capabilities(c).is_none()) {
            return Err(CatalogError::MissingAffordance(missing.clone()));
        }
        Ok(Self { classes, affordances })
    }

    pub fn parse(classes_text: &str, affordances_text: &str) -> Result<Self, CatalogError> {
        let classes = classes_text
            .lines()
            .map(strip_comment)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        Self::new(classes, Affordances::parse(affordances_text)?)
    }

    /// The shipped 40-class household catalog.
    pub fn builtin() -> Self {
        Self::parse(assets::OBJECT_CLASSES, assets::AFFORDANCES).expect("shipped catalog is valid")
    }

    pub fn contains(&self, category: &str) -> bool {
        self.classes.iter().any(|c| c == category)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn affordances(&self) -> &Affordances {
        &self.affordances
    }

    pub fn has(&self, category: &str, cap: Capability) -> bool {
        self.affordances.has(category, cap)
    }

    /// Comma-separated class list for the `{OBJECT_CLASSES}` prompt slot.
    pub fn class_list(&self) -> String {
        self.classes.join(", ")
    }

    /// Resolves a spoken name ("garbage can", "countertop") back to a category.
    pub fn category_from_spoken(&self, spoken: &str) -> Option<&str> {
        let key: String = spoken
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        self.classes
            .iter()
            .find(|c| c.to_ascii_lowercase() == key)
            .map(String::as_str)
    }
}

/// Lower-case spoken form of a category name, as used in oracle answers.
pub fn spoken_name(category: &str) -> String {
    match category {
        "CounterTop" => "countertop".to_string(),
        "SideTable" => "side table".to_string(),
        "KeyChain" => "keychain".to_string(),
        "CellPhone" => "cell phone".to_string(),
        _ => {
            let mut out = String::new();
            for (i, ch) in category.chars().enumerate() {
                if ch.is_ascii_uppercase() && i > 0 {
                    out.push(' ');
                }
                out.push(ch.to_ascii_lowercase());
            }
            out
        }
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_forty_classes_with_affordances() {
        let cat = Catalog::builtin();
        assert_eq!(cat.classes().len(), 40);
        for class in cat.classes() {
            assert!(cat.affordances().capabilities(class).is_some(), "{class}");
        }
    }

    #[test]
    fn fridge_opens_sofa_does_not() {
        let cat = Catalog::builtin();
        assert!(cat.has("Fridge", Capability::Openable));
        assert!(!cat.has("Sofa", Capability::Openable));
    }

    #[test]
    fn missing_affordance_is_rejected() {
        let err = Catalog::parse("Bowl\nSpork\n", "Bowl: pickupable").unwrap_err();
        assert_eq!(err, CatalogError::MissingAffordance("Spork".into()));
    }

    #[test]
    fn bad_capability_reports_line() {
        let err = Affordances::parse("Bowl: pickupable\nMug: flyable\n").unwrap_err();
        assert!(matches!(err, CatalogError::Syntax { line: 2, .. }));
    }

    #[test]
    fn spoken_names_round_trip() {
        let cat = Catalog::builtin();
        assert_eq!(spoken_name("GarbageCan"), "garbage can");
        assert_eq!(spoken_name("CounterTop"), "countertop");
        for class in cat.classes() {
            assert_eq!(cat.category_from_spoken(&spoken_name(class)), Some(class.as_str()));
        }
    }
}
