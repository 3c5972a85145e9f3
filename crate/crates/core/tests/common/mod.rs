#![allow(dead_code)]

use mnemo_core::dsl::{parse_plan, parse_qa_script, PlanProgram, QaScript};
use mnemo_core::executor::{run_episode, EpisodeResult, ExecConfig, PromptSource, Services};
use mnemo_core::memory::{ExampleStore, HashedBagEmbedder};
use mnemo_core::planner::ScriptedBackend;
use mnemo_core::prompt::{AssembledPrompt, TemplateKind};
use mnemo_core::simworld::{builtin_scene, Oracle};
use mnemo_core::spatial::SpatialState;
use mnemo_core::Catalog;

/// Shipped examples whose programs are the reference plan scripts.
pub const LISTING_EXAMPLES: [&str; 4] = ["teach_01", "alfred_01", "dialfred_01", "tidy_01"];

pub const BUTTERKNIFE_ANSWER: &str = "turn('left')\nsearch_near_other_object('ButterKnife', 'CounterTop')\n";

pub const SOAPBAR_ANSWER: &str =
    "# right then ahead\nturn('right')\nmove('forward')\nsearch_near_other_object('SoapBar', 'GarbageCan')\n";

pub fn store() -> ExampleStore {
    ExampleStore::builtin(&HashedBagEmbedder::default(), &Catalog::builtin()).unwrap()
}

pub fn listing_programs() -> Vec<(String, String)> {
    let store = store();
    LISTING_EXAMPLES
        .iter()
        .map(|id| (id.to_string(), store.get(id).unwrap().program_text.clone()))
        .collect()
}

pub fn parse(source: &str) -> PlanProgram {
    parse_plan(source, &Catalog::builtin()).unwrap()
}

pub fn parse_qa(source: &str) -> QaScript {
    parse_qa_script(source, &Catalog::builtin()).unwrap()
}

/// Prompt source that passes the command through with no examples.
pub struct Bare;

impl PromptSource for Bare {
    fn plan_prompt(&self, command: &str) -> Result<AssembledPrompt, String> {
        Ok(AssembledPrompt {
            text: command.to_string(),
            kind: TemplateKind::Plan,
            domain: None,
            command: command.to_string(),
            example_ids: Vec::new(),
            token_estimate: 0,
        })
    }
}

/// Runs one scripted program in a shipped scene.
pub fn run_scripted(scene: &str, program: &str, cfg: &ExecConfig) -> (EpisodeResult, mnemo_core::simworld::World) {
    let catalog = Catalog::builtin();
    let mut world = builtin_scene(scene, &catalog).unwrap();
    let mut spatial = SpatialState::new(world.rows(), world.cols(), world.cell_size);
    let command = "Do the task.";
    let backend = ScriptedBackend::new(catalog.clone()).with_program(command, program);
    let oracle = Oracle::new();
    let svc = Services { backend: &backend, prompts: &Bare, oracle: &oracle, catalog: &catalog };
    let result = run_episode("scripted", command, &mut world, &mut spatial, svc, cfg);
    (result, world)
}
