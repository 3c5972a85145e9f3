use serde::{Deserialize, Serialize};

use crate::catalog::spoken_name;
use crate::prompt::synthesize_tidy_command;
use crate::simworld::{GoalCondition, ObjRef, StateAttr};
use crate::Domain;

/// One instruction in one scene with its success conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: String,
    pub scene: String,
    pub domain: Domain,
    pub command: String,
    pub goals: Vec<GoalCondition>,
    /// Objects an expert walks to, in order; fixes the expert path length.
    pub visits: Vec<String>,
    /// `(object, new parent)` moves applied to the scene before the episode.
    #[serde(default)]
    pub moves: Vec<(String, String)>,
    /// The moves displace objects for a tidying task.
    #[serde(default)]
    pub tidy: bool,
    /// Programs returned by the scripted backend on successive attempts.
    #[serde(default)]
    pub programs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub id: String,
    pub episodes: Vec<Episode>,
}

pub const SUITES: [&str; 5] = ["listings", "echo", "hidden", "tidy", "precondition"];

fn id(s: &str) -> ObjRef {
    ObjRef::Id(s.to_string())
}

fn any(cat: &str) -> ObjRef {
    ObjRef::AnyOf(cat.to_string())
}

fn state(object: &str, attr: StateAttr) -> GoalCondition {
    GoalCondition::ObjectState { object: id(object), attr, value: true }
}

fn inside(object: ObjRef, receptacle: ObjRef) -> GoalCondition {
    GoalCondition::InReceptacle { object, receptacle }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn moves(items: &[(&str, &str)]) -> Vec<(String, String)> {
    items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// Fetch `category` and place it on or in `destination`.
pub fn fetch_and_place(category: &str, destination: &str) -> String {
    let obj = format!("target_{}", category.to_lowercase());
    let dest = format!("target_{}", destination.to_lowercase());
    format!(
        "{obj} = InteractionObject(\"{category}\")\n\
         {dest} = InteractionObject(\"{destination}\")\n\
         {obj}.go_to()\n\
         {obj}.pickup()\n\
         {dest}.go_to()\n\
         {obj}.place({dest})\n"
    )
}

pub const APPLE_MICROWAVE: &str = "\
target_apple = InteractionObject(\"Apple\")
target_apple.go_to()
target_apple.pickup()
target_microwave = InteractionObject(\"Microwave\")
target_microwave.go_to()
target_apple.place(target_microwave)
target_microwave.toggle_on()
target_microwave.toggle_off()
target_apple.pickup()
";

pub const TWO_BOWLS: &str = "\
target_bowl1 = InteractionObject(\"Bowl\", landmark = \"Stove\", attributes = [\"clean\"])
target_bowl1.go_to()
target_bowl1.pickup()
target_bowl1.clean()
target_bowl1.put_down()
target_bowl2 = InteractionObject(\"Bowl\", landmark = \"Fridge\", attributes = [\"clean\"])
target_bowl2.go_to()
target_bowl2.pickup()
target_bowl2.clean()
target_bowl2.put_down()
";

pub const APPLE_FRIDGE: &str = "\
target_apple = InteractionObject(\"Apple\")
target_fridge = InteractionObject(\"Fridge\")
target_apple.go_to()
target_apple.pickup()
target_fridge.go_to()
target_apple.place(target_fridge)
";

pub const EGG_MICROWAVE: &str = "\
target_egg = InteractionObject(\"Egg\", landmark = \"Fridge\")
target_egg.go_to()
target_egg.pickup()
target_microwave = InteractionObject(\"Microwave\")
target_microwave.go_to()
target_egg.place(target_microwave)
target_microwave.toggle_on()
target_microwave.toggle_off()
target_egg.pickup()
";

fn listings() -> Vec<Episode> {
    vec![
        Episode {
            id: "apple_microwave".into(),
            scene: "kitchen_a".into(),
            domain: Domain::Alfred,
            command: "Heat the apple in the microwave and take it out.".into(),
            goals: vec![state("apple_1", StateAttr::Cooked)],
            visits: strings(&["apple_1", "microwave_1"]),
            moves: vec![],
            tidy: false,
            programs: vec![APPLE_MICROWAVE.into()],
        },
        Episode {
            id: "two_bowls".into(),
            scene: "kitchen_a".into(),
            domain: Domain::Teach,
            command: "Clean all the bowls. One is by the stove and the other is in the fridge.".into(),
            goals: vec![state("bowl_1", StateAttr::Clean), state("bowl_2", StateAttr::Clean)],
            visits: strings(&["bowl_1", "sink_1", "bowl_2", "sink_1"]),
            moves: vec![],
            tidy: false,
            programs: vec![TWO_BOWLS.into()],
        },
    ]
}

fn precondition_episodes() -> Vec<Episode> {
    let mut out = listings();
    out.push(Episode {
        id: "apple_fridge".into(),
        scene: "kitchen_a".into(),
        domain: Domain::Teach,
        command: "Put the apple in the fridge.".into(),
        goals: vec![inside(id("apple_1"), id("fridge_1"))],
        visits: strings(&["apple_1", "fridge_1"]),
        moves: vec![],
        tidy: false,
        programs: vec![APPLE_FRIDGE.into()],
    });
    out.push(Episode {
        id: "egg_microwave".into(),
        scene: "kitchen_a".into(),
        domain: Domain::Teach,
        command: "Cook the egg from the fridge in the microwave.".into(),
        goals: vec![state("egg_1", StateAttr::Cooked)],
        visits: strings(&["egg_1", "microwave_1"]),
        moves: vec![],
        tidy: false,
        programs: vec![EGG_MICROWAVE.into()],
    });
    out
}

/// Instructions equal to stored keys whose programs solve them in these scenes.
fn echo() -> Vec<Episode> {
    let teach_09 = "<Driver> hi. <Commander> please put the apple in the fridge. <Driver> where is the apple? \
                    <Commander> on the dining table.";
    let alfred_05 = "High Level Goal: Move the book from the desk to the bed. Low Level Goal: (1) Turn left and \
                     walk to the desk. (2) Pick up the book on the desk. (3) Turn around and walk to the bed. (4) \
                     Put the book on the bed.";
    let teach_06 = "<Driver> what is my task? <Commander> put all the remote controls on the sofa. <Driver> how \
                    many are there? <Commander> two. one is on the side table. <Commander> the other one is on the \
                    shelf.";
    vec![
        Episode {
            id: "echo_apple_fridge".into(),
            scene: "kitchen_b".into(),
            domain: Domain::Teach,
            command: teach_09.into(),
            goals: vec![inside(id("apple_1"), id("fridge_1"))],
            visits: strings(&["apple_1", "fridge_1"]),
            moves: vec![],
            tidy: false,
            programs: vec![],
        },
        Episode {
            id: "echo_book_bed".into(),
            scene: "bedroom_b".into(),
            domain: Domain::Alfred,
            command: alfred_05.into(),
            goals: vec![inside(id("book_1"), any("Bed"))],
            visits: strings(&["book_1", "bed_1"]),
            moves: vec![],
            tidy: false,
            programs: vec![],
        },
        Episode {
            id: "echo_remotes_sofa".into(),
            scene: "living_a".into(),
            domain: Domain::Teach,
            command: teach_06.into(),
            goals: vec![inside(id("remote_1"), any("Sofa")), inside(id("remote_2"), any("Sofa"))],
            visits: strings(&["remote_1", "sofa_1", "remote_2", "sofa_1"]),
            moves: vec![],
            tidy: false,
            programs: vec![],
        },
    ]
}

/// Objects start inside closed containers and the program names no landmark.
fn hidden() -> Vec<Episode> {
    type Case<'a> = (&'a str, &'a str, &'a str, &'a str, &'a str, Option<&'a str>);
    let cases: [Case; 10] = [
        ("hidden_spoon", "kitchen_a", "spoon_1", "Spoon", "table_1", None),
        ("hidden_knife", "kitchen_b", "knife_1", "Knife", "table_1", None),
        ("hidden_apple", "kitchen_c", "apple_1", "Apple", "table_1", None),
        ("hidden_phone", "living_a", "phone_1", "CellPhone", "sofa_1", None),
        ("hidden_remote", "bedroom_a", "remote_1", "RemoteControl", "bed_1", None),
        ("house_egg", "house_a", "egg_1", "Egg", "table_1", None),
        ("house_cup", "house_a", "cup_1", "Cup", "table_1", None),
        ("house_keys", "house_a", "keys_1", "KeyChain", "bed_1", None),
        ("house_apple", "house_a", "apple_1", "Apple", "table_1", Some("microwave_1")),
        ("house_phone", "house_a", "phone_1", "CellPhone", "sofa_1", Some("drawer_1")),
    ];
    cases
        .iter()
        .map(|&(eid, scene, object, category, dest, hide_in)| {
            let dest_cat = match dest {
                "table_1" => "DiningTable",
                "sofa_1" => "Sofa",
                _ => "Bed",
            };
            Episode {
                id: eid.into(),
                scene: scene.into(),
                domain: Domain::Dialfred,
                command: format!("Bring the {} to the {}.", spoken_name(category), spoken_name(dest_cat)),
                goals: vec![inside(id(object), any(dest_cat))],
                visits: strings(&[object, dest]),
                moves: hide_in.map(|c| moves(&[(object, c)])).unwrap_or_default(),
                tidy: false,
                programs: vec![fetch_and_place(category, dest_cat)],
            }
        })
        .collect()
}

/// Messy scenes whose instruction matches a stored tidying example.
fn tidy() -> Vec<Episode> {
    let episode = |eid: &str, scene: &str, objs: &[&str], recs: &[&str], mv: &[(&str, &str)], goals, visits: &[&str]| {
        Episode {
            id: eid.into(),
            scene: scene.into(),
            domain: Domain::Tidy,
            command: synthesize_tidy_command(objs, recs),
            goals,
            visits: strings(visits),
            moves: moves(mv),
            tidy: true,
            programs: vec![],
        }
    };
    vec![
        episode(
            "tidy_kitchen",
            "kitchen_a",
            &["Potato", "Knife"],
            &["DiningTable", "Microwave", "CoffeeMachine", "CounterTop"],
            &[("potato_1", "table_1"), ("knife_1", "coffee_1")],
            vec![inside(id("potato_1"), any("CounterTop")), inside(id("knife_1"), any("CounterTop"))],
            &["potato_1", "counter_3", "knife_1", "counter_3"],
        ),
        episode(
            "tidy_bedroom",
            "house_a",
            &["Pillow", "Book"],
            &["Sofa", "Bed", "Desk", "Shelf"],
            &[("pillow_1", "sofa_1"), ("book_1", "bed_2")],
            vec![inside(id("pillow_1"), any("Bed")), inside(id("book_1"), any("Shelf"))],
            &["pillow_1", "bed_1", "book_1", "shelf_1"],
        ),
        episode(
            "tidy_living",
            "house_a",
            &["Mug", "RemoteControl"],
            &["CounterTop", "SideTable", "Sofa", "CoffeeMachine"],
            &[("mug_1", "side_1"), ("remote_1", "counter_2")],
            vec![inside(id("mug_1"), any("CounterTop")), inside(id("remote_1"), any("Sofa"))],
            &["mug_1", "counter_2", "remote_1", "sofa_1"],
        ),
    ]
}

pub fn builtin_suite(name: &str) -> Option<Suite> {
    let episodes = match name {
        "listings" => listings(),
        "precondition" => precondition_episodes(),
        "echo" => echo(),
        "hidden" => hidden(),
        "tidy" => tidy(),
        _ => return None,
    };
    Some(Suite { id: name.to_string(), episodes })
}
