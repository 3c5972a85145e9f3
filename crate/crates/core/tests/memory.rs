use mnemo_core::memory::{
    ingest_examples, retrieve_prompt, retrieve_top_k, Embedder, ExampleSource, ExampleStore, HashedBagEmbedder,
    RetrievalConfig, RetrievalMode, TemplateStore,
};
use mnemo_core::{Catalog, Domain};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VOCAB: &[&str] = &[
    "apple", "bowl", "fridge", "microwave", "clean", "heat", "slice", "knife", "mug", "coffee", "sofa", "remote",
    "book", "bed", "pillow", "drawer", "counter", "sink", "toast", "bread", "egg", "pan", "stove", "cup", "shelf",
    "tidy", "potato", "tomato", "lettuce", "plate", "spoon", "keys", "watch", "phone", "table", "cabinet",
];

const PROGRAM: &str = "target_apple = InteractionObject(\"Apple\")\ntarget_apple.pickup()\n";

fn random_text(rng: &mut ChaCha8Rng, words: usize) -> String {
    (0..words).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn random_store(rng: &mut ChaCha8Rng, n: usize, embedder: &HashedBagEmbedder) -> ExampleStore {
    let sources = (0..n).map(|i| {
        let words = rng.gen_range(1..6);
        ExampleSource {
            id: format!("rec_{i:05}"),
            domain: Domain::ALL[rng.gen_range(0..4)],
            key_text: random_text(rng, words),
            program_text: PROGRAM.into(),
            embedding: None,
        }
    });
    let sources: Vec<_> = sources.collect();
    ingest_examples(sources, embedder, &Catalog::builtin()).unwrap()
}

/// Independent k-NN: squared differences summed by hand, sort by (distance, id).
fn brute_force(store: &ExampleStore, query: &[f64], k: usize, domain: Option<Domain>) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = store
        .records()
        .iter()
        .filter(|r| domain.is_none_or(|d| d == r.domain))
        .map(|r| {
            let d: f64 = r.key_embedding.values().iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            (r.id.clone(), d)
        })
        .collect();
    all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

#[test]
fn top_k_equals_brute_force_on_large_store() {
    let embedder = HashedBagEmbedder::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let store = random_store(&mut rng, 1000, &embedder);
    for _ in 0..100 {
        let k = rng.gen_range(1..8);
        let words = rng.gen_range(1..5);
        let query = random_text(&mut rng, words);
        let cfg = RetrievalConfig::new(k, RetrievalMode::SharedMemory).unwrap();
        let got: Vec<_> = retrieve_top_k(&query, &store, &cfg, None, &embedder)
            .unwrap()
            .iter()
            .map(|r| (r.record.id.clone(), r.distance))
            .collect();
        let q = embedder.embed(&query).unwrap();
        let want = brute_force(&store, q.values(), k, None);
        assert_eq!(got.len(), want.len());
        for ((gi, gd), (wi, wd)) in got.iter().zip(&want) {
            assert_eq!(gi, wi, "query {query:?}");
            assert!((gd - wd).abs() < 1e-12);
        }
    }
}

#[test]
fn every_shipped_example_retrieves_itself_first() {
    let embedder = HashedBagEmbedder::default();
    let store = ExampleStore::builtin(&embedder, &Catalog::builtin()).unwrap();
    assert_eq!(store.len(), 28);
    let cfg = RetrievalConfig::new(3, RetrievalMode::SharedMemory).unwrap();
    for record in store.records() {
        let top = retrieve_top_k(&record.key_text, &store, &cfg, None, &embedder).unwrap();
        assert_eq!(top[0].record.id, record.id);
        assert_eq!(top[0].distance, 0.0);
    }
}

#[test]
fn shared_results_come_from_union_of_domain_results() {
    let embedder = HashedBagEmbedder::default();
    let store = ExampleStore::builtin(&embedder, &Catalog::builtin()).unwrap();
    let k = 4;
    let shared = RetrievalConfig::new(k, RetrievalMode::SharedMemory).unwrap();
    let per = RetrievalConfig::new(k, RetrievalMode::PromptRetrieval).unwrap();
    for record in store.records() {
        let query = format!("{} please", record.key_text);
        let union: Vec<String> = Domain::ALL
            .iter()
            .flat_map(|d| retrieve_top_k(&query, &store, &per, Some(*d), &embedder).unwrap())
            .map(|r| r.record.id.clone())
            .collect();
        for r in retrieve_top_k(&query, &store, &shared, None, &embedder).unwrap() {
            assert!(union.contains(&r.record.id));
        }
    }
}

#[test]
fn prompt_retrieval_examples_belong_to_the_chosen_template() {
    let embedder = HashedBagEmbedder::default();
    let examples = ExampleStore::builtin(&embedder, &Catalog::builtin()).unwrap();
    let templates = TemplateStore::builtin(&embedder, &examples).unwrap();
    let cfg = RetrievalConfig::new(3, RetrievalMode::PromptRetrieval).unwrap();
    for record in examples.records() {
        let sel = retrieve_prompt(&record.key_text, &templates, &examples, &cfg, &embedder).unwrap();
        for e in &sel.examples {
            assert!(sel.template.example_ids.contains(&e.record.id));
        }
    }
}

proptest! {
    #[test]
    fn retrieval_is_sorted_and_repeatable(words in proptest::collection::vec(0..VOCAB.len(), 1..6), k in 1usize..10) {
        let embedder = HashedBagEmbedder::default();
        let store = ExampleStore::builtin(&embedder, &Catalog::builtin()).unwrap();
        let query = words.iter().map(|i| VOCAB[*i]).collect::<Vec<_>>().join(" ");
        let cfg = RetrievalConfig::new(k, RetrievalMode::SharedMemory).unwrap();
        let a = retrieve_top_k(&query, &store, &cfg, None, &embedder).unwrap();
        let b = retrieve_top_k(&query, &store, &cfg, None, &embedder).unwrap();
        prop_assert_eq!(a.len(), k.min(store.len()));
        let ids = |v: &[mnemo_core::memory::Retrieved]| v.iter().map(|r| r.record.id.clone()).collect::<Vec<_>>();
        prop_assert_eq!(ids(&a), ids(&b));
        for w in a.windows(2) {
            let ordered = w[0].distance < w[1].distance
                || (w[0].distance == w[1].distance && w[0].record.id < w[1].record.id);
            prop_assert!(ordered);
        }
    }

    #[test]
    fn brute_force_agrees_under_domain_filter(seed in any::<u64>(), k in 1usize..6, d in 0usize..4) {
        let embedder = HashedBagEmbedder::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = random_store(&mut rng, 60, &embedder);
        let query = random_text(&mut rng, 3);
        let domain = Domain::ALL[d];
        let cfg = RetrievalConfig::new(k, RetrievalMode::PromptRetrieval).unwrap();
        let got: Vec<String> = retrieve_top_k(&query, &store, &cfg, Some(domain), &embedder)
            .unwrap()
            .iter()
            .map(|r| r.record.id.clone())
            .collect();
        let q = embedder.embed(&query).unwrap();
        let want: Vec<String> = brute_force(&store, q.values(), k, Some(domain)).into_iter().map(|x| x.0).collect();
        prop_assert_eq!(got, want);
    }
}
