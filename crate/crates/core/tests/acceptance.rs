//! One test per acceptance criterion; each prints a PASS/FAIL line.

mod common;

use std::io::Write;
use std::time::Instant;

use mnemo_core::dsl::{pretty_print, validate_plan, Severity, ViolationKind};
use mnemo_core::executor::{EpisodeStatus, ExecConfig};
use mnemo_core::harness::{
    compare_modes, replay_file, run_suite, BackendKind, RunConfig, SuiteReport, APPLE_FRIDGE, APPLE_MICROWAVE,
    EGG_MICROWAVE, TWO_BOWLS,
};
use mnemo_core::memory::{
    ingest_examples, retrieve_prompt, retrieve_top_k, Embedder, ExampleSource, HashedBagEmbedder, RetrievalConfig,
    RetrievalMode, TemplateStore,
};
use mnemo_core::prompt::synthesize_tidy_command;
use mnemo_core::simworld::{
    builtin_scene, evaluate, evaluate_tidy, path_weight, EpisodeStats, GoalCondition, MessyConfig, ObjRef,
    PlacementPrior, StateAttr, TaskSpec,
};
use mnemo_core::spatial::{
    geodesic_field, plan_path, project, unproject, CameraModel, Cell, CellClass, OccupancyMap, Pose,
};
use mnemo_core::{Catalog, Domain};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Writes straight to stdout so the line survives test output capture.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn report(n: u32, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => emit(&format!("criterion {n}: PASS {detail}")),
        Err(detail) => {
            emit(&format!("criterion {n}: FAIL {detail}"));
            panic!("criterion {n} failed: {detail}");
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn criterion_01_retrieval_matches_brute_force() {
    report(1, (|| {
        const VOCAB: [&str; 24] = [
            "apple", "bowl", "fridge", "clean", "heat", "slice", "mug", "sofa", "remote", "book", "bed", "drawer",
            "sink", "toast", "egg", "pan", "cup", "shelf", "tidy", "potato", "plate", "spoon", "keys", "table",
        ];
        let embedder = HashedBagEmbedder::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let text = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(1..6);
            (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
        };
        let sources: Vec<ExampleSource> = (0..1200)
            .map(|i| ExampleSource {
                id: format!("r{i:05}"),
                domain: Domain::ALL[i % 4],
                key_text: text(&mut rng),
                program_text: "a = InteractionObject(\"Apple\")\na.pickup()\n".into(),
                embedding: None,
            })
            .collect();
        let store = ingest_examples(sources, &embedder, &Catalog::builtin()).map_err(|e| e.to_string())?;
        let mut elapsed = std::time::Duration::ZERO;
        for q in 0..120 {
            let query = text(&mut rng);
            let k = 1 + q % 7;
            let cfg = RetrievalConfig::new(k, RetrievalMode::SharedMemory).unwrap();
            let start = Instant::now();
            let ranked = retrieve_top_k(&query, &store, &cfg, None, &embedder).map_err(|e| e.to_string())?;
            elapsed += start.elapsed();
            let got: Vec<&str> = ranked
                .iter()
                .map(|r| r.record.id.as_str())
                .collect();
            let qv = embedder.embed(&query).unwrap();
            let mut all: Vec<(f64, &str)> = store
                .records()
                .iter()
                .map(|r| {
                    let d = r.key_embedding.values().iter().zip(qv.values()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                    (d.sqrt(), r.id.as_str())
                })
                .collect();
            all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(b.1)));
            let want: Vec<&str> = all.iter().take(k).map(|x| x.1).collect();
            check(got == want, || format!("query {query:?}: {got:?} != {want:?}"))?;
        }
        check(elapsed.as_secs_f64() < 5.0, || format!("took {elapsed:?}"))?;
        Ok(format!("120 queries over 1200 records equal brute force in {:.2}s", elapsed.as_secs_f64()))
    })());
}

#[test]
fn criterion_02_exact_match_recall() {
    report(2, (|| {
        let embedder = HashedBagEmbedder::default();
        let store = common::store();
        check(store.len() == 28, || format!("{} shipped examples", store.len()))?;
        let cfg = RetrievalConfig::new(1, RetrievalMode::SharedMemory).unwrap();
        for r in store.records() {
            let top = retrieve_top_k(&r.key_text, &store, &cfg, None, &embedder).unwrap();
            check(top[0].record.id == r.id && top[0].distance == 0.0, || format!("{} not recalled", r.id))?;
        }
        Ok("28/28 records recalled at rank 1 with distance 0".into())
    })());
}

#[test]
fn criterion_03_prompt_routing() {
    report(3, (|| {
        let embedder = HashedBagEmbedder::default();
        let store = common::store();
        let templates = TemplateStore::builtin(&embedder, &store).unwrap();
        let cfg = RetrievalConfig::new(3, RetrievalMode::PromptRetrieval).unwrap();
        let route = |q: &str| retrieve_prompt(q, &templates, &store, &cfg, &embedder).unwrap().template.domain;
        let tidy = synthesize_tidy_command(&["Potato", "Knife"], &["DiningTable", "Microwave", "CoffeeMachine", "CounterTop"]);
        let listing_inputs = [
            (Domain::Teach, store.get("teach_01").unwrap().key_text.clone()),
            (Domain::Alfred, store.get("alfred_01").unwrap().key_text.clone()),
            (Domain::Dialfred, store.get("dialfred_01").unwrap().key_text.clone()),
            (Domain::Tidy, tidy),
        ];
        let routed: Vec<(Domain, Domain)> = listing_inputs.iter().map(|(d, q)| (*d, route(q))).collect();
        let correct = routed.iter().filter(|(want, got)| want == got).count();
        let exact = templates.templates().iter().filter(|t| route(&t.key_text) == t.domain).count();
        check(correct >= 3, || format!("listing inputs routed {correct}/4: {routed:?}"))?;
        check(exact == 4, || format!("exact keys routed {exact}/4"))?;
        let misses: Vec<String> = routed.iter().filter(|(w, g)| w != g).map(|(w, g)| format!("{w}->{g}")).collect();
        Ok(format!("listing inputs {correct}/4 (misrouted: {misses:?}), exact keys {exact}/4"))
    })());
}

#[test]
fn criterion_04_parser_corpus() {
    report(4, (|| {
        let catalog = Catalog::builtin();
        let errors = |src: &str| -> Vec<ViolationKind> {
            validate_plan(&common::parse(src), catalog.affordances())
                .into_iter()
                .filter(|v| v.severity == Severity::Error)
                .map(|v| v.kind)
                .collect()
        };
        let mut n = 0;
        for (id, src) in common::listing_programs() {
            let p = common::parse(&src);
            check(errors(&src).is_empty(), || format!("{id} has errors"))?;
            check(common::parse(&pretty_print(&p)) == p, || format!("{id} does not round-trip"))?;
            n += 1;
        }
        for src in [common::BUTTERKNIFE_ANSWER, common::SOAPBAR_ANSWER] {
            check(!common::parse_qa(src).calls.is_empty(), || "answer script empty".into())?;
            n += 1;
        }
        let all_kinds = |src: &str| -> Vec<ViolationKind> {
            validate_plan(&common::parse(src), catalog.affordances()).into_iter().map(|v| v.kind).collect()
        };
        let seeded = [
            ("s = InteractionObject(\"Sofa\")\ns.open()\n", ViolationKind::Affordance),
            ("a = InteractionObject(\"Apple\")\nb = InteractionObject(\"Mug\")\na.pickup()\nb.pickup()\n", ViolationKind::DoubleHold),
            ("f = InteractionObject(\"Fridge\")\nf.open()\nf.open()\n", ViolationKind::Redundant),
        ];
        for (src, kind) in seeded {
            check(all_kinds(src).contains(&kind), || format!("{kind} not reported"))?;
        }
        Ok(format!("{n} reference scripts clean and round-trip; 3 seeded violations classified"))
    })());
}

#[test]
fn criterion_05_execution_integration() {
    report(5, (|| {
        let on = ExecConfig::default();
        let off = ExecConfig { preconditions: false, ..ExecConfig::default() };
        let budgets = on.budgets;
        for (name, program, goal) in [
            ("apple_microwave", APPLE_MICROWAVE, vec![("apple_1", StateAttr::Cooked)]),
            ("two_bowls", TWO_BOWLS, vec![("bowl_1", StateAttr::Clean), ("bowl_2", StateAttr::Clean)]),
        ] {
            let (r, world) = common::run_scripted("kitchen_a", program, &on);
            let goals: Vec<GoalCondition> = goal
                .iter()
                .map(|(id, attr)| GoalCondition::ObjectState { object: ObjRef::Id(id.to_string()), attr: *attr, value: true })
                .collect();
            let task = TaskSpec::new(name, Domain::Teach, goals, 1).unwrap();
            let m = evaluate(&world, &task, &world.stats);
            check(m.success == 1.0 && m.goal_condition == 1.0, || format!("{name}: SR {} GC {}", m.success, m.goal_condition))?;
            check(
                r.state.steps_taken <= budgets.max_steps && r.state.api_failures <= budgets.max_api_failures,
                || format!("{name} exceeded budgets"),
            )?;
        }
        let mut failed_without = 0;
        for program in [APPLE_MICROWAVE, APPLE_FRIDGE, EGG_MICROWAVE] {
            let (r, _) = common::run_scripted("kitchen_a", program, &off);
            if r.state.status != EpisodeStatus::Success {
                failed_without += 1;
            }
        }
        check(failed_without == 3, || format!("only {failed_without}/3 appliance episodes failed without preconditions"))?;
        Ok("apple-microwave and two-bowl reach SR=GC=1; 3/3 appliance episodes fail without preconditions".into())
    })());
}

fn oracle_bfs(map: &OccupancyMap, start: Cell, goal: Cell) -> Option<usize> {
    let cols = map.cols();
    let mut dist = vec![usize::MAX; map.rows() * cols];
    let mut queue = std::collections::VecDeque::from([goal]);
    dist[goal.0 * cols + goal.1] = 0;
    while let Some((r, c)) = queue.pop_front() {
        let d = dist[r * cols + c];
        let around = [(r.wrapping_sub(1), c), (r + 1, c), (r, c.wrapping_sub(1)), (r, c + 1)];
        for n in around {
            if n.0 < map.rows() && n.1 < cols && dist[n.0 * cols + n.1] == usize::MAX && map.class(n) == CellClass::Free {
                dist[n.0 * cols + n.1] = d + 1;
                queue.push_back(n);
            }
        }
    }
    let d = dist[start.0 * cols + start.1];
    (d != usize::MAX).then_some(d)
}

#[test]
fn criterion_06_planner_optimality() {
    report(6, (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut compared = 0;
        for g in 0..50 {
            let (rows, cols) = (rng.gen_range(5..25), rng.gen_range(5..25));
            let density = rng.gen_range(0.05..0.35);
            let walls: Vec<bool> = (0..rows * cols).map(|_| rng.gen_bool(density)).collect();
            let map = OccupancyMap::from_classes(rows, cols, 0.25, |(r, c)| {
                if walls[r * cols + c] { CellClass::Obstacle } else { CellClass::Free }
            });
            let free: Vec<Cell> = map.cells().filter(|c| map.is_free(*c)).collect();
            if free.len() < 2 {
                continue;
            }
            for _ in 0..8 {
                let (s, t) = (*free.choose(&mut rng).unwrap(), *free.choose(&mut rng).unwrap());
                let got = plan_path(&map, s, t).unwrap();
                let want = oracle_bfs(&map, s, t);
                check(got.as_ref().map(|p| p.len()) == want, || format!("grid {g}: {s:?}->{t:?}"))?;
                if let Some(p) = got {
                    let field = geodesic_field(&map, &[t]);
                    let at = |(r, c): Cell| field[r * cols + c];
                    check(p.cells.windows(2).all(|w| at(w[1]) < at(w[0])), || format!("grid {g}: geodesic not decreasing"))?;
                    compared += 1;
                }
            }
        }
        Ok(format!("50 grids, {compared} reachable pairs match BFS with strictly decreasing geodesic"))
    })());
}

#[test]
fn criterion_07_unprojection() {
    report(7, (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let cam = CameraModel::from_fov(rng.gen_range(32..640), rng.gen_range(32..640), rng.gen_range(40.0..120.0)).unwrap();
            let pose = Pose::new(
                [rng.gen_range(-10.0..10.0), rng.gen_range(0.0..2.0), rng.gen_range(-10.0..10.0)],
                [0.0, 90.0, 180.0, 270.0][rng.gen_range(0..4)],
                [-60.0, -30.0, 0.0, 30.0, 60.0][rng.gen_range(0..5)],
            )
            .unwrap();
            let (u, v, z) = (rng.gen_range(0.0..cam.width as f64), rng.gen_range(0.0..cam.height as f64), rng.gen_range(0.1..15.0));
            let (pu, pv, pz) = project(&unproject(u, v, z, &cam, &pose).unwrap(), &cam, &pose).unwrap();
            worst = worst.max((pu - u).abs()).max((pv - v).abs()).max((pz - z).abs());
        }
        check(worst < 1e-9, || format!("max error {worst:e}"))?;
        let cam = CameraModel::default();
        let p = unproject(cam.cx, cam.cy, 3.0, &cam, &Pose::identity()).unwrap();
        check(p.x == 0.0 && p.y == 0.0 && p.z == 3.0, || format!("principal point maps to {p:?}"))?;
        Ok(format!("1000 cases, max error {worst:.1e}; principal point exact"))
    })());
}

#[test]
fn criterion_08_metric_identities() {
    report(8, (|| {
        let catalog = Catalog::builtin();
        let original = builtin_scene("kitchen_a", &catalog).unwrap();
        let prior = PlacementPrior::builtin(&catalog).unwrap();
        let messy = MessyConfig::from_moves(&original, &[("potato_1", "table_1"), ("knife_1", "coffee_1")], prior)
            .map_err(|e| e.to_string())?;
        let dirty = messy.apply(&original).map_err(|e| e.to_string())?;
        let stats = EpisodeStats::default();
        let e_orig = evaluate_tidy(&dirty, &original, &messy, &stats).unwrap().energy;
        let e_dirty = evaluate_tidy(&dirty, &dirty, &messy, &stats).unwrap().energy;
        check(e_orig == 0.0 && e_dirty == 100.0, || format!("energies {e_orig} / {e_dirty}"))?;

        let mut world = original.clone();
        world.object_mut("apple_1").unwrap().state.set(StateAttr::Cooked, true);
        let cooked = GoalCondition::ObjectState { object: ObjRef::Id("apple_1".into()), attr: StateAttr::Cooked, value: true };
        let in_fridge = GoalCondition::InReceptacle { object: ObjRef::Id("apple_1".into()), receptacle: ObjRef::Id("fridge_1".into()) };
        let cases = [
            (vec![cooked.clone()], 10, 10, (1.0, 1.0, 1.0, 1.0)),
            (vec![cooked.clone(), in_fridge], 10, 20, (0.0, 0.5, 0.0, 0.25)),
            (vec![cooked], 10, 4, (1.0, 1.0, 1.0, 1.0)),
        ];
        for (goals, expert, agent, want) in cases {
            let task = TaskSpec::new("m", Domain::Teach, goals, expert).unwrap();
            let m = evaluate(&world, &task, &EpisodeStats { steps: agent, api_failures: 0, path_length: agent });
            let got = (m.success, m.goal_condition, m.path_weighted_success, m.path_weighted_goal_condition);
            check(got == want, || format!("expert {expert} agent {agent}: {got:?} != {want:?}"))?;
        }
        check(path_weight(10, 4) == 1.0, || "weight not capped".into())?;
        Ok("energy 0%/100%; constructed episodes with ratios 1, 0.5 and capped match".into())
    })());
}

fn hidden(qa: bool) -> SuiteReport {
    let mut cfg = RunConfig::new("hidden", BackendKind::Scripted);
    cfg.qa_enabled = qa;
    run_suite(&cfg).unwrap()
}

#[test]
fn criterion_09_question_asking_helps() {
    report(9, (|| {
        let without = hidden(false);
        let with = hidden(true);
        check(with.episodes.len() == 10, || format!("{} episodes", with.episodes.len()))?;
        let (sw, so) = (with.aggregates.success_rate, without.aggregates.success_rate);
        let (tw, to) = (with.aggregates.mean_steps, without.aggregates.mean_steps);
        check(tw < to, || format!("mean steps with QA {tw} not below {to}"))?;
        check(sw >= so, || format!("SR with QA {sw} below {so}"))?;
        let only_qa = with
            .episodes
            .iter()
            .zip(&without.episodes)
            .filter(|(a, b)| a.metrics.success == 1.0 && b.metrics.success == 0.0)
            .count();
        check(only_qa >= 1, || "no episode needs QA".into())?;
        Ok(format!("SR {so:.2} -> {sw:.2}, mean steps {to:.1} -> {tw:.1}, {only_qa} episodes solved only with QA"))
    })());
}

#[test]
fn criterion_10_cross_domain_degradation() {
    report(10, (|| {
        let cfg = RunConfig::new("tidy", BackendKind::RetrievalEcho);
        let cmp = compare_modes(&cfg, Domain::Teach).map_err(|e| e.to_string())?;
        let in_domain = cmp.cross_domain[0].success_rate;
        let wrong = cmp.cross_domain[1].success_rate;
        let shared = cmp.cross_domain[2].success_rate;
        check(wrong < in_domain, || format!("wrong-domain SR {wrong} not below in-domain {in_domain}"))?;
        check(shared == in_domain, || format!("shared SR {shared} differs from in-domain {in_domain}"))?;
        Ok(format!("in-domain {in_domain:.2}, TEACh-only {wrong:.2}, shared {shared:.2}"))
    })());
}

#[test]
fn criterion_11_determinism_and_replay() {
    report(11, (|| {
        let mut replayed = 0;
        for (suite, backend) in [("listings", BackendKind::Scripted), ("echo", BackendKind::RetrievalEcho)] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let mut cfg = RunConfig::new(suite, backend);
            cfg.seed = 17;
            cfg.out = Some(dir.path().to_path_buf());
            let a = run_suite(&cfg).map_err(|e| e.to_string())?;
            cfg.out = None;
            let b = run_suite(&cfg).map_err(|e| e.to_string())?;
            check(a.content_hash == b.content_hash, || format!("{suite}: hashes differ"))?;
            for entry in std::fs::read_dir(dir.path().join("logs")).map_err(|e| e.to_string())? {
                let path = entry.map_err(|e| e.to_string())?.path();
                let verdict = replay_file(&path).map_err(|e| e.to_string())?;
                check(verdict.verified(), || format!("{} does not replay", path.display()))?;
                replayed += 1;
            }
        }
        Ok(format!("identical hashes across repeated runs; {replayed} logs replay"))
    })());
}
