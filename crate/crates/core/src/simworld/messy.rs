use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::metrics::TidyMetrics;
use super::world::{EpisodeStats, World};
use super::SimError;
use crate::catalog::Capability;

/// Probability that an object category rests on a receptacle category.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlacementPrior {
    /// `receptacle -> object -> probability`.
    table: BTreeMap<String, BTreeMap<String, f64>>,
}

impl PlacementPrior {
    pub fn get(&self, receptacle: &str, object: &str) -> f64 {
        self.table.get(receptacle).and_then(|row| row.get(object)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, receptacle: &str, object: &str, p: f64) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::Scene(format!("probability {p} outside [0, 1]")));
        }
        self.table.entry(receptacle.to_string()).or_default().insert(object.to_string(), p);
        Ok(())
    }

    /// Per receptacle category: how often each object category rests directly
    /// on an instance of it, divided by the number of such instances.
    pub fn from_worlds<'a>(worlds: impl IntoIterator<Item = &'a World>) -> Self {
        let mut instances: BTreeMap<String, u32> = BTreeMap::new();
        let mut counts: BTreeMap<(String, String), u32> = BTreeMap::new();
        for world in worlds {
            for obj in world.objects() {
                if obj.is_furniture() && world.affordances.has(&obj.category, Capability::Receptacle) {
                    *instances.entry(obj.category.clone()).or_default() += 1;
                }
                if let Some(parent) = obj.parent.as_deref().and_then(|p| world.object(p)) {
                    if parent.is_furniture() && world.affordances.has(&obj.category, Capability::Pickupable) {
                        *counts.entry((parent.category.clone(), obj.category.clone())).or_default() += 1;
                    }
                }
            }
        }
        let mut prior = Self::default();
        for ((rec, obj), n) in counts {
            let p = (n as f64 / instances.get(&rec).copied().unwrap_or(1).max(1) as f64).min(1.0);
            prior.table.entry(rec).or_default().insert(obj, p);
        }
        prior
    }

    /// Prior over every shipped scene.
    pub fn builtin(catalog: &crate::Catalog) -> Result<Self, SimError> {
        let worlds = crate::assets::SCENES
            .iter()
            .map(|(_, text)| super::parse_scene(text, catalog))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_worlds(&worlds))
    }

    /// Matrix text: a header of object categories, then one row per receptacle.
    pub fn to_matrix_text(&self) -> String {
        let objects: BTreeSet<&str> = self.table.values().flat_map(|r| r.keys().map(String::as_str)).collect();
        let mut out = String::from("receptacle");
        for o in &objects {
            out.push(' ');
            out.push_str(o);
        }
        out.push('\n');
        for (rec, row) in &self.table {
            out.push_str(rec);
            for o in &objects {
                out.push_str(&format!(" {:.6}", row.get(*o).copied().unwrap_or(0.0)));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_matrix(text: &str) -> Result<Self, SimError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| SimError::Scene("empty prior matrix".into()))?;
        let objects: Vec<&str> = header.split_whitespace().skip(1).collect();
        let mut prior = Self::default();
        for (i, line) in lines {
            let mut words = line.split_whitespace();
            let rec = words.next().expect("non-empty line");
            let values: Vec<&str> = words.collect();
            if values.len() != objects.len() {
                return Err(SimError::Parse { line: i + 1, message: "row length differs from header".into() });
            }
            for (o, v) in objects.iter().zip(values) {
                let p: f64 = v.parse().map_err(|_| SimError::Parse { line: i + 1, message: format!("bad value `{v}`") })?;
                if p > 0.0 {
                    prior.set(rec, o, p).map_err(|_| SimError::Parse { line: i + 1, message: format!("bad value `{v}`") })?;
                }
            }
        }
        Ok(prior)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Displacement {
    pub object: String,
    pub messy_parent: String,
    pub original_parent: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessyConfig {
    pub displaced: Vec<Displacement>,
    pub placement_prior: PlacementPrior,
}

impl MessyConfig {
    /// Builds a config from explicit moves against the tidy world.
    pub fn from_moves(world: &World, moves: &[(&str, &str)], prior: PlacementPrior) -> Result<Self, SimError> {
        let mut displaced = Vec::new();
        for (obj, dest) in moves {
            let o = world.object(obj).ok_or_else(|| SimError::UnknownObject(obj.to_string()))?;
            world.object(dest).ok_or_else(|| SimError::UnknownObject(dest.to_string()))?;
            let original = o.parent.clone().ok_or_else(|| SimError::Scene(format!("`{obj}` has no receptacle")))?;
            displaced.push(Displacement { object: obj.to_string(), messy_parent: dest.to_string(), original_parent: original });
        }
        Ok(Self { displaced, placement_prior: prior })
    }

    /// The messy world derived from the tidy one.
    pub fn apply(&self, tidy: &World) -> Result<World, SimError> {
        let mut w = tidy.clone();
        for d in &self.displaced {
            w.set_parent(&d.object, &d.messy_parent)?;
        }
        Ok(w)
    }

    /// The tidy world recovered from the messy one.
    pub fn restore(&self, messy: &World) -> Result<World, SimError> {
        let mut w = messy.clone();
        for d in &self.displaced {
            w.set_parent(&d.object, &d.original_parent)?;
        }
        Ok(w)
    }
}

/// Sum over pickupable objects of the prior of their current receptacle.
pub fn placement_energy(world: &World, prior: &PlacementPrior) -> f64 {
    world
        .objects()
        .filter(|o| world.affordances.has(&o.category, Capability::Pickupable))
        .filter_map(|o| {
            let parent = world.object(o.parent.as_deref()?)?;
            Some(prior.get(&parent.category, &o.category))
        })
        .sum()
}

/// Surfaces messy objects may be moved to: non-openable furniture receptacles.
fn surfaces(world: &World) -> Vec<&str> {
    world
        .objects()
        .filter(|o| {
            o.is_furniture()
                && world.affordances.has(&o.category, Capability::Receptacle)
                && !world.affordances.has(&o.category, Capability::Openable)
                && !world.affordances.has(&o.category, Capability::Toggleable)
        })
        .map(|o| o.id.as_str())
        .collect()
}

/// Moves `n_displaced` pickupable objects onto lower-prior surfaces.
pub fn generate_messy(world: &World, prior: &PlacementPrior, seed: u64, n_displaced: usize) -> Result<MessyConfig, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<&str> = world
        .objects()
        .filter(|o| world.affordances.has(&o.category, Capability::Pickupable) && o.parent.is_some())
        .filter(|o| !world.is_enclosed(&o.id))
        .map(|o| o.id.as_str())
        .collect();
    candidates.shuffle(&mut rng);
    let surfaces = surfaces(world);
    let mut displaced = Vec::new();
    for id in candidates.into_iter().take(n_displaced) {
        let obj = world.object(id).expect("candidate exists");
        let parent = obj.parent.clone().expect("filtered on parent");
        let current = world.object(&parent).map_or(0.0, |p| prior.get(&p.category, &obj.category));
        let mut options: Vec<(&str, f64)> = surfaces
            .iter()
            .filter(|s| **s != parent)
            .map(|s| (*s, prior.get(&world.object(s).expect("surface").category, &obj.category)))
            .collect();
        if options.is_empty() {
            continue;
        }
        options.shuffle(&mut rng);
        let lower: Vec<_> = options.iter().copied().filter(|(_, p)| *p < current).collect();
        let pool = if lower.is_empty() { options } else { lower };
        let best = pool.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min);
        let dest = pool.iter().find(|(_, p)| *p == best).expect("non-empty pool").0;
        displaced.push(Displacement { object: id.to_string(), messy_parent: dest.to_string(), original_parent: parent });
    }
    Ok(MessyConfig { displaced, placement_prior: prior.clone() })
}

/// Correctly/incorrectly moved counts and the normalised energy.
pub fn evaluate_tidy(
    messy_world: &World,
    final_world: &World,
    messy: &MessyConfig,
    stats: &EpisodeStats,
) -> Result<TidyMetrics, SimError> {
    let original = messy.restore(messy_world)?;
    let prior = &messy.placement_prior;
    let p_orig = placement_energy(&original, prior);
    let p_dirty = placement_energy(messy_world, prior);
    let p_clean = placement_energy(final_world, prior);
    let denom = p_dirty - p_orig;
    let energy = if denom.abs() > 1e-12 {
        (p_clean - p_orig) / denom * 100.0
    } else if same_placement(&original, final_world) {
        0.0
    } else {
        100.0
    };

    let displaced: BTreeSet<&str> = messy.displaced.iter().map(|d| d.object.as_str()).collect();
    let moved = |id: &str| {
        messy_world.object(id).map(|o| &o.parent) != final_world.object(id).map(|o| &o.parent)
    };
    let correctly_moved = messy.displaced.iter().filter(|d| moved(&d.object)).count() as u32;
    let incorrectly_moved = messy_world
        .objects()
        .filter(|o| messy_world.affordances.has(&o.category, Capability::Pickupable))
        .filter(|o| !displaced.contains(o.id.as_str()) && moved(&o.id))
        .count() as u32;
    Ok(TidyMetrics { correctly_moved, incorrectly_moved, energy, steps: stats.steps })
}

fn same_placement(a: &World, b: &World) -> bool {
    a.objects().all(|o| b.object(&o.id).map(|x| &x.parent) == Some(&o.parent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simworld::builtin_scene;
    use crate::Catalog;

    fn living() -> World {
        builtin_scene("living_a", &Catalog::builtin()).unwrap()
    }

    #[test]
    fn builtin_prior_is_a_probability_table() {
        let prior = PlacementPrior::builtin(&Catalog::builtin()).unwrap();
        for row in prior.table.values() {
            assert!(row.values().all(|p| (0.0..=1.0).contains(p)));
        }
        assert!(prior.get("Sofa", "Pillow") > 0.0);
        assert_eq!(prior.get("Sofa", "Egg"), 0.0);
    }

    #[test]
    fn matrix_text_round_trips() {
        let prior = PlacementPrior::builtin(&Catalog::builtin()).unwrap();
        let back = PlacementPrior::parse_matrix(&prior.to_matrix_text()).unwrap();
        for (rec, row) in &prior.table {
            for (obj, p) in row {
                assert!((back.get(rec, obj) - p).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn bad_matrix_rows_are_rejected() {
        assert!(PlacementPrior::parse_matrix("receptacle A B\nSofa 0.5\n").is_err());
        assert!(PlacementPrior::parse_matrix("receptacle A\nSofa x\n").is_err());
        assert!(PlacementPrior::parse_matrix("receptacle A\nSofa 1.5\n").is_err());
    }

    #[test]
    fn generated_mess_lowers_prior_and_is_seeded() {
        let w = living();
        let prior = PlacementPrior::builtin(&Catalog::builtin()).unwrap();
        let a = generate_messy(&w, &prior, 7, 2).unwrap();
        let b = generate_messy(&w, &prior, 7, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.displaced.len(), 2);
        let messy = a.apply(&w).unwrap();
        assert!(placement_energy(&messy, &prior) < placement_energy(&w, &prior));
        let restored = a.restore(&messy).unwrap();
        assert!(same_placement(&restored, &w));
    }

    #[test]
    fn energy_is_100_untouched_and_0_restored() {
        let w = living();
        let prior = PlacementPrior::builtin(&Catalog::builtin()).unwrap();
        let cfg = MessyConfig::from_moves(&w, &[("pillow_1", "desk_1"), ("book_1", "table_1")], prior).unwrap();
        let messy = cfg.apply(&w).unwrap();
        let stats = EpisodeStats::default();
        let untouched = evaluate_tidy(&messy, &messy, &cfg, &stats).unwrap();
        assert!((untouched.energy - 100.0).abs() < 1e-9);
        assert_eq!(untouched.correctly_moved, 0);
        let fixed = evaluate_tidy(&messy, &cfg.restore(&messy).unwrap(), &cfg, &stats).unwrap();
        assert!(fixed.energy.abs() < 1e-9);
        assert_eq!((fixed.correctly_moved, fixed.incorrectly_moved), (2, 0));
    }

    #[test]
    fn moving_a_tidy_object_counts_as_incorrect() {
        let w = living();
        let prior = PlacementPrior::builtin(&Catalog::builtin()).unwrap();
        let cfg = MessyConfig::from_moves(&w, &[("pillow_1", "desk_1")], prior).unwrap();
        let messy = cfg.apply(&w).unwrap();
        let mut after = messy.clone();
        after.set_parent("keys_1", "sofa_2").unwrap();
        let m = evaluate_tidy(&messy, &after, &cfg, &EpisodeStats::default()).unwrap();
        assert_eq!((m.correctly_moved, m.incorrectly_moved), (0, 1));
    }
}
