mod common;

use common::{listing_programs, parse, parse_qa, BUTTERKNIFE_ANSWER, SOAPBAR_ANSWER};
use mnemo_core::dsl::{
    parse_plan, parse_qa_script, pretty_print, validate_plan, Direction, Method, QaCall, Severity, ViolationKind,
};
use mnemo_core::executor::MacroTable;
use mnemo_core::harness::{builtin_suite, SUITES};
use mnemo_core::Catalog;
use proptest::prelude::*;

fn errors(source: &str) -> Vec<ViolationKind> {
    let catalog = Catalog::builtin();
    validate_plan(&parse(source), catalog.affordances())
        .into_iter()
        .filter(|v| v.severity == Severity::Error)
        .map(|v| v.kind)
        .collect()
}

#[test]
fn reference_programs_parse_validate_and_round_trip() {
    for (id, source) in listing_programs() {
        let program = parse(&source);
        assert!(errors(&source).is_empty(), "{id}");
        let printed = pretty_print(&program);
        assert_eq!(parse(&printed), program, "{id}");
        assert_eq!(pretty_print(&parse(&printed)), printed, "{id}");
    }
}

#[test]
fn bowl_program_shape() {
    let (_, source) = &listing_programs()[0];
    let p = parse(source);
    assert_eq!(p.bindings.len(), 2);
    assert_eq!(p.statements.len(), 8);
    assert_eq!(p.bindings[0].landmark.as_deref(), Some("Stove"));
    assert_eq!(p.bindings[1].landmark.as_deref(), Some("Fridge"));
    assert_eq!(p.statements.last().unwrap().method, Method::PutDown);
}

#[test]
fn tidy_program_shape() {
    let (_, source) = &listing_programs()[3];
    let p = parse(source);
    assert_eq!(p.bindings.len(), 3);
    assert_eq!(p.statements.len(), 8);
    for s in p.statements.iter().filter(|s| s.method == Method::Place) {
        assert_eq!(s.arg.as_deref(), Some("target_countertop"));
    }
}

#[test]
fn every_shipped_and_suite_program_is_error_free() {
    let store = common::store();
    for record in store.records() {
        assert!(errors(&record.program_text).is_empty(), "{}", record.id);
    }
    for name in SUITES {
        for ep in builtin_suite(name).unwrap().episodes {
            for program in &ep.programs {
                assert!(errors(program).is_empty(), "{}", ep.id);
            }
        }
    }
}

#[test]
fn answer_scripts_parse() {
    let s = parse_qa(BUTTERKNIFE_ANSWER);
    assert_eq!(
        s.calls,
        vec![
            QaCall::Turn { direction: Direction::Left },
            QaCall::SearchNearOtherObject { category: "ButterKnife".into(), landmark: "CounterTop".into() },
        ]
    );
    let s = parse_qa(SOAPBAR_ANSWER);
    assert_eq!(
        s.calls,
        vec![
            QaCall::Turn { direction: Direction::Right },
            QaCall::Move { direction: Direction::Forward },
            QaCall::SearchNearOtherObject { category: "SoapBar".into(), landmark: "GarbageCan".into() },
        ]
    );
    let q = parse_qa("askForLocation('ButterKnife')");
    assert!(q.calls[0].is_question());
}

#[test]
fn seeded_violations_are_classified() {
    let sofa = "s = InteractionObject(\"Sofa\")\ns.go_to()\ns.open()\n";
    assert!(errors(sofa).contains(&ViolationKind::Affordance));

    let double = "a = InteractionObject(\"Apple\")\nb = InteractionObject(\"Mug\")\na.pickup()\nb.pickup()\n";
    assert!(errors(double).contains(&ViolationKind::DoubleHold));

    let twice = "f = InteractionObject(\"Fridge\")\nf.go_to()\nf.open()\nf.open()\n";
    let catalog = Catalog::builtin();
    let kinds: Vec<_> = validate_plan(&parse(twice), catalog.affordances()).into_iter().map(|v| v.kind).collect();
    assert!(kinds.contains(&ViolationKind::Redundant));
}

#[test]
fn every_method_has_a_macro() {
    let table = MacroTable::builtin();
    for m in Method::ALL {
        assert!(table.get(m).is_some(), "{m}");
    }
}

const TOKENS: &[&str] = &[
    "a", "b", " = ", "InteractionObject", "(", ")", "\"Apple\"", "\"Sofa\"", "\"Nope\"", ".", "pickup", "place",
    "open", "go_to", "landmark", "attributes", "[", "]", ",", "\n", "#", "'", "\"", "if", "for", " ", "1", "\\",
    "turn", "search_near_other_object", "askForLocation", "'left'",
];

fn token_soup() -> impl Strategy<Value = String> {
    proptest::collection::vec(0..TOKENS.len(), 0..40).prop_map(|ix| ix.into_iter().map(|i| TOKENS[i]).collect())
}

fn valid_program() -> impl Strategy<Value = String> {
    let cats = ["Apple", "Mug", "Fridge", "Microwave", "CounterTop", "Bowl", "Knife", "Bread"];
    let methods = Method::ALL.iter().filter(|m| !m.takes_argument()).copied().collect::<Vec<_>>();
    (
        proptest::collection::vec((0..cats.len(), proptest::option::of(0..cats.len())), 1..4),
        proptest::collection::vec((0usize..4, 0..methods.len(), 0usize..4, any::<bool>()), 0..12),
    )
        .prop_map(move |(bindings, stmts)| {
            let mut out = String::new();
            for (i, (c, lm)) in bindings.iter().enumerate() {
                match lm {
                    Some(l) => out.push_str(&format!("v{i} = InteractionObject(\"{}\", landmark = \"{}\")\n", cats[*c], cats[*l])),
                    None => out.push_str(&format!("v{i} = InteractionObject(\"{}\")\n", cats[*c])),
                }
            }
            let n = bindings.len();
            for (r, m, a, place) in stmts {
                if place {
                    out.push_str(&format!("v{}.place(v{})\n", r % n, a % n));
                } else {
                    out.push_str(&format!("v{}.{}()\n", r % n, methods[m].source_name()));
                }
            }
            out
        })
}

proptest! {
    #[test]
    fn parsers_never_panic(source in token_soup()) {
        let catalog = Catalog::builtin();
        if let Ok(p) = parse_plan(&source, &catalog) {
            let _ = validate_plan(&p, catalog.affordances());
        }
        let _ = parse_qa_script(&source, &catalog);
    }

    #[test]
    fn arbitrary_text_never_panics(source in ".{0,200}") {
        let catalog = Catalog::builtin();
        let _ = parse_plan(&source, &catalog);
        let _ = parse_qa_script(&source, &catalog);
    }

    #[test]
    fn generated_programs_round_trip(source in valid_program()) {
        let p = parse(&source);
        let printed = pretty_print(&p);
        prop_assert_eq!(&parse(&printed), &p);
        prop_assert_eq!(pretty_print(&parse(&printed)), printed);
    }
}
