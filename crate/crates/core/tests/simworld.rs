use mnemo_core::executor::{EpisodeLog, EpisodeStatus, LogEvent};
use mnemo_core::simworld::{
    builtin_scene, evaluate, evaluate_tidy, generate_messy, parse_scene, path_weight, Action, EpisodeStats,
    GoalCondition, ObjRef, PlacementPrior, StateAttr, TaskSpec, World,
};
use mnemo_core::spatial::CameraModel;
use mnemo_core::{assets, Catalog, Domain};
use proptest::prelude::*;

const SCENES: [&str; 4] = ["kitchen_a", "living_a", "bedroom_a", "house_a"];

fn scene(name: &str) -> World {
    builtin_scene(name, &Catalog::builtin()).unwrap()
}

fn action_strategy(ids: Vec<String>) -> impl Strategy<Value = Action> {
    let n = ids.len();
    (0usize..16, 0..n).prop_map(move |(k, i)| {
        let id = ids[i].clone();
        match k {
            0 => Action::MoveAhead,
            1 => Action::MoveBack,
            2 => Action::MoveLeft,
            3 => Action::MoveRight,
            4 => Action::RotateLeft,
            5 => Action::RotateRight,
            6 => Action::LookUp,
            7 => Action::LookDown,
            8 => Action::Pickup(id),
            9 => Action::Place(id),
            10 => Action::Open(id),
            11 => Action::Close(id),
            12 => Action::ToggleOn(id),
            13 => Action::ToggleOff(id),
            14 => Action::Slice(id),
            _ => Action::Pour(id),
        }
    })
}

fn episode() -> impl Strategy<Value = (usize, Vec<Action>)> {
    (0..SCENES.len()).prop_flat_map(|s| {
        let mut ids: Vec<String> = scene(SCENES[s]).objects().map(|o| o.id.clone()).collect();
        ids.push("missing_1".into());
        (Just(s), proptest::collection::vec(action_strategy(ids), 0..120))
    })
}

fn assert_forest(world: &World) {
    for o in world.objects() {
        if o.is_furniture() {
            assert!(o.parent.is_none(), "{} has a parent", o.id);
            continue;
        }
        let ancestors = world.ancestors(&o.id);
        assert!(ancestors.iter().all(|a| a.id != o.id), "{} is its own ancestor", o.id);
        match &o.parent {
            None => assert_eq!(world.held.as_deref(), Some(o.id.as_str()), "{} floats", o.id),
            Some(p) => {
                assert!(world.object(p).is_some());
                let root = ancestors.last().unwrap();
                assert!(root.is_furniture() || world.held.as_deref() == Some(root.id.as_str()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn containment_stays_a_forest_and_counters_grow((s, actions) in episode()) {
        let mut world = scene(SCENES[s]);
        let mut prev = world.stats;
        for a in &actions {
            let was_holding = world.held.is_some();
            let r = world.step(a);
            assert_forest(&world);
            prop_assert_eq!(world.stats.steps, prev.steps + 1);
            prop_assert!(world.stats.api_failures >= prev.api_failures);
            prop_assert!(world.stats.path_length >= prev.path_length);
            if !r.success && a.is_interaction() {
                prop_assert_eq!(world.stats.api_failures, prev.api_failures + 1);
            }
            if was_holding && matches!(a, Action::Pickup(_)) {
                prop_assert!(!r.success);
            }
            prev = world.stats;
        }
    }

    #[test]
    fn stepping_is_pure_and_logs_replay((s, actions) in episode()) {
        let start = scene(SCENES[s]);
        let mut a = start.clone();
        let mut b = start.clone();
        let mut log = EpisodeLog::default();
        log.push(LogEvent::Start { episode_id: "fuzz".into(), command: "fuzz".into(), world: Box::new(start.clone()) });
        for (i, act) in actions.iter().enumerate() {
            let ra = a.step(act);
            let rb = b.step(act);
            prop_assert_eq!(&ra, &rb);
            log.push(LogEvent::Action { index: i as u32, action: act.clone(), success: ra.success, reason: ra.reason });
        }
        prop_assert_eq!(a.state_hash(), b.state_hash());
        log.push(LogEvent::End {
            status: EpisodeStatus::FailurePlan,
            steps: a.stats.steps,
            api_failures: a.stats.api_failures,
            final_hash: a.state_hash(),
        });
        let parsed = EpisodeLog::parse_jsonl(&log.to_jsonl()).unwrap();
        prop_assert!(parsed.replay().unwrap().verified());
    }

    #[test]
    fn centre_ray_hits_the_wall_at_the_oracle_distance(
        rows in 3usize..10,
        cols in 3usize..10,
        r in 0usize..10,
        c in 0usize..10,
        yaw in prop::sample::select(vec![0u32, 90, 180, 270]),
    ) {
        let (r, c) = (r % rows + 1, c % cols + 1);
        let line = |wall: bool| (0..cols + 2).map(|i| if wall || i == 0 || i == cols + 1 { '#' } else { '.' }).collect::<String>();
        let mut grid = vec![line(true)];
        grid.extend((0..rows).map(|_| line(false)));
        grid.push(line(true));
        let text = format!("scene box\ngrid\n{}\nend\nagent {r} {c} {yaw}\n", grid.join("\n"));
        let mut world = parse_scene(&text, &Catalog::builtin()).unwrap();
        world.agent.pitch = 0;
        let free_ahead = match yaw {
            0 => rows - r,
            90 => cols - c,
            180 => r - 1,
            _ => c - 1,
        };
        let expected = (free_ahead as f64 + 0.5) * world.cell_size;
        let cam = CameraModel::from_fov(1, 1, 90.0).unwrap();
        let frame = world.render_from(&world.agent_pose(), &cam);
        prop_assert!((frame.depth[0] - expected).abs() < 1e-9, "{} vs {}", frame.depth[0], expected);
    }

    #[test]
    fn goal_condition_fraction_is_monotone(picks in proptest::collection::vec((0usize..6, 0usize..7), 1..8), extra in 0usize..6) {
        let ids = ["apple_1", "bowl_1", "bowl_2", "mug_1", "bread_1", "potato_1"];
        let mut world = scene("kitchen_a");
        let conds: Vec<GoalCondition> = picks
            .iter()
            .map(|(o, a)| GoalCondition::ObjectState { object: ObjRef::Id(ids[*o].into()), attr: StateAttr::ALL[*a], value: true })
            .collect();
        let task = TaskSpec::new("t", Domain::Teach, conds.clone(), 1).unwrap();
        let stats = EpisodeStats::default();
        let base = evaluate(&world, &task, &stats).goal_condition;

        let held = GoalCondition::InReceptacle { object: ObjRef::Id("apple_1".into()), receptacle: ObjRef::AnyOf("CounterTop".into()) };
        prop_assert!(held.holds(&world));
        let mut more = conds.clone();
        more.push(held);
        prop_assert!(evaluate(&world, &TaskSpec::new("t", Domain::Teach, more, 1).unwrap(), &stats).goal_condition >= base);

        let before: Vec<bool> = conds.iter().map(|g| g.holds(&world)).collect();
        let target = ids[extra];
        let unmet = conds.iter().find_map(|g| match g {
            GoalCondition::ObjectState { object: ObjRef::Id(id), attr, .. } if id == target && !g.holds(&world) => Some(*attr),
            _ => None,
        });
        if let Some(attr) = unmet {
            world.object_mut(target).unwrap().state.set(attr, true);
            let after: Vec<bool> = conds.iter().map(|g| g.holds(&world)).collect();
            if before.iter().zip(&after).all(|(b, a)| !*b || *a) {
                prop_assert!(evaluate(&world, &task, &stats).goal_condition > base);
            }
        }
    }
}

#[test]
fn energy_is_zero_for_the_original_and_hundred_for_the_mess() {
    let catalog = Catalog::builtin();
    let prior = PlacementPrior::builtin(&catalog).unwrap();
    for (name, _) in assets::SCENES {
        let original = scene(name);
        for seed in 0..5 {
            let messy = generate_messy(&original, &prior, seed, 3).unwrap();
            if messy.displaced.is_empty() {
                continue;
            }
            let dirty = messy.apply(&original).unwrap();
            let stats = EpisodeStats::default();
            let untouched = evaluate_tidy(&dirty, &dirty, &messy, &stats).unwrap();
            assert_eq!(untouched.energy, 100.0, "{name} seed {seed}");
            assert_eq!(untouched.correctly_moved, 0);
            let restored = evaluate_tidy(&dirty, &original, &messy, &stats).unwrap();
            assert_eq!(restored.energy, 0.0, "{name} seed {seed}");
            assert_eq!(restored.correctly_moved as usize, messy.displaced.len());
            assert_eq!(restored.incorrectly_moved, 0);
        }
    }
}

fn constructed_task(goals: usize) -> (World, TaskSpec) {
    let mut world = scene("kitchen_a");
    world.object_mut("apple_1").unwrap().state.set(StateAttr::Cooked, true);
    let mut conds = vec![GoalCondition::ObjectState {
        object: ObjRef::Id("apple_1".into()),
        attr: StateAttr::Cooked,
        value: true,
    }];
    if goals == 2 {
        conds.push(GoalCondition::InReceptacle {
            object: ObjRef::Id("apple_1".into()),
            receptacle: ObjRef::AnyOf("Fridge".into()),
        });
    }
    (world, TaskSpec::new("constructed", Domain::Teach, conds, 12).unwrap())
}

#[test]
fn metrics_match_hand_computed_episodes() {
    let (world, task) = constructed_task(1);
    let m = evaluate(&world, &task, &EpisodeStats { steps: 30, api_failures: 0, path_length: 12 });
    assert_eq!((m.success, m.goal_condition), (1.0, 1.0));
    assert_eq!((m.path_weighted_success, m.path_weighted_goal_condition), (1.0, 1.0));

    let (world, task) = constructed_task(2);
    let m = evaluate(&world, &task, &EpisodeStats { steps: 50, api_failures: 2, path_length: 24 });
    assert_eq!((m.success, m.goal_condition), (0.0, 0.5));
    assert_eq!(m.path_weighted_success, 0.0);
    assert_eq!(m.path_weighted_goal_condition, 0.25);

    let (world, task) = constructed_task(1);
    let m = evaluate(&world, &task, &EpisodeStats { steps: 8, api_failures: 0, path_length: 6 });
    assert_eq!(m.path_weighted_success, 1.0);
    assert_eq!(path_weight(12, 6), 1.0);
    assert_eq!(path_weight(12, 0), 1.0);
}
