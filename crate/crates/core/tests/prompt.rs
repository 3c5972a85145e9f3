use mnemo_core::assets;
use mnemo_core::memory::{retrieve_top_k, ExampleRecord, HashedBagEmbedder, RetrievalConfig, RetrievalMode};
use mnemo_core::prompt::{
    assemble_answer_prompt, assemble_plan_prompt, assemble_question_prompt, builtin_answer_template,
    builtin_question_template, builtin_shared_template, PromptTemplate, TemplateKind,
};
use mnemo_core::Catalog;
use proptest::prelude::*;

mod common;

fn plan_templates() -> Vec<PromptTemplate> {
    let mut out: Vec<_> = assets::PLAN_TEMPLATES
        .iter()
        .map(|(_, body)| PromptTemplate::parse(body, TemplateKind::Plan).unwrap())
        .collect();
    out.push(builtin_shared_template());
    out
}

/// A `{NAME}` marker that survived substitution.
fn has_marker(text: &str) -> bool {
    let bytes = text.as_bytes();
    bytes.iter().enumerate().any(|(i, b)| {
        *b == b'{'
            && bytes[i + 1..]
                .iter()
                .take_while(|c| **c != b'}')
                .all(|c| c.is_ascii_alphanumeric() || *c == b'_')
            && bytes[i + 1..].contains(&b'}')
            && bytes.get(i + 1) != Some(&b'}')
    })
}

#[test]
fn shipped_templates_resolve_every_slot() {
    let store = common::store();
    let examples: Vec<&ExampleRecord> = store.records().iter().take(3).collect();
    let classes = Catalog::builtin().class_list();
    for t in plan_templates() {
        let p = assemble_plan_prompt(&t, None, &examples, assets::PLAN_API, &classes, "do it").unwrap();
        assert!(!has_marker(&p.text), "{}", p.text);
    }
    let q = assemble_question_prompt(&builtin_question_template(), "ctx", assets::QUESTION_API, &classes).unwrap();
    assert!(!has_marker(&q.text));
    let a = assemble_answer_prompt(&builtin_answer_template(), "ctx", "q", "a", assets::SEARCH_API, &classes).unwrap();
    assert!(!has_marker(&a.text));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn examples_appear_in_ranking_order(
        query in "[a-z ]{1,40}",
        k in 1usize..6,
        t in 0usize..5,
        command in "[A-Za-z][A-Za-z ,.]{0,60}",
    ) {
        let embedder = HashedBagEmbedder::default();
        let store = common::store();
        let cfg = RetrievalConfig::new(k, RetrievalMode::SharedMemory).unwrap();
        let ranked = retrieve_top_k(&query, &store, &cfg, None, &embedder).unwrap();
        let examples: Vec<&ExampleRecord> = ranked.iter().map(|r| r.record).collect();
        let template = &plan_templates()[t];
        let classes = Catalog::builtin().class_list();
        let a = assemble_plan_prompt(template, None, &examples, assets::PLAN_API, &classes, &command).unwrap();
        let b = assemble_plan_prompt(template, None, &examples, assets::PLAN_API, &classes, &command).unwrap();
        prop_assert_eq!(&a, &b);
        let ids: Vec<String> = examples.iter().map(|e| e.id.clone()).collect();
        prop_assert_eq!(&a.example_ids, &ids);
        prop_assert!(!has_marker(&a.text));
        let mut cursor = 0;
        for e in &examples {
            let program = e.program_text.trim_end();
            let at = a.text[cursor..].find(program);
            prop_assert!(at.is_some(), "example {} out of order", e.id);
            cursor += at.unwrap() + program.len();
        }
        prop_assert!(a.text[cursor..].contains(command.trim()));
    }
}
