use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Holding,
    CanUse,
    Sliced,
    Toasted,
    Clean,
    Cooked,
    Dirty,
    OutOfPlace,
}

impl Attribute {
    pub const ALL: [Attribute; 8] = [
        Attribute::Holding,
        Attribute::CanUse,
        Attribute::Sliced,
        Attribute::Toasted,
        Attribute::Clean,
        Attribute::Cooked,
        Attribute::Dirty,
        Attribute::OutOfPlace,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Holding => "holding",
            Attribute::CanUse => "can_use",
            Attribute::Sliced => "sliced",
            Attribute::Toasted => "toasted",
            Attribute::Clean => "clean",
            Attribute::Cooked => "cooked",
            Attribute::Dirty => "dirty",
            Attribute::OutOfPlace => "out_of_place",
        }
    }

    /// Value assumed before any evidence; `None` is unknown.
    pub fn default_value(self) -> Option<bool> {
        match self {
            Attribute::Holding | Attribute::Sliced | Attribute::Toasted | Attribute::Cooked => Some(false),
            Attribute::CanUse => Some(true),
            Attribute::Clean | Attribute::Dirty | Attribute::OutOfPlace => None,
        }
    }
}

pub fn default_attributes() -> BTreeMap<Attribute, Option<bool>> {
    Attribute::ALL.into_iter().map(|a| (a, a.default_value())).collect()
}

/// One detection from a single frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub category: String,
    pub centroid: [f64; 3],
    pub score: f64,
    /// Instance label when the segmenter provides one.
    pub instance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectMemoryEntry {
    pub category: String,
    pub centroid: [f64; 3],
    pub score: f64,
    pub attributes: BTreeMap<Attribute, Option<bool>>,
    pub instance: Option<String>,
    pub observations: u32,
}

impl ObjectMemoryEntry {
    pub fn attribute(&self, a: Attribute) -> Option<bool> {
        self.attributes.get(&a).copied().flatten()
    }

    pub fn horizontal_distance(&self, x: f64, z: f64) -> f64 {
        (self.centroid[0] - x).hypot(self.centroid[2] - z)
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Detected objects, deduplicated by per-category non-maximum suppression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectMemory {
    entries: Vec<ObjectMemoryEntry>,
    nms_threshold: f64,
}

impl Default for ObjectMemory {
    fn default() -> Self {
        Self::new(Self::DEFAULT_NMS_THRESHOLD)
    }
}

impl ObjectMemory {
    pub const DEFAULT_NMS_THRESHOLD: f64 = 0.25;

    pub fn new(nms_threshold: f64) -> Self {
        Self { entries: Vec::new(), nms_threshold }
    }

    pub fn entries(&self) -> &[ObjectMemoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn of_category<'a>(&'a self, category: &str) -> impl Iterator<Item = (usize, &'a ObjectMemoryEntry)> + 'a {
        let category = category.to_string();
        self.entries.iter().enumerate().filter(move |(_, e)| e.category == category)
    }

    pub fn by_instance(&self, instance: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.instance.as_deref() == Some(instance))
    }

    pub fn get(&self, idx: usize) -> Option<&ObjectMemoryEntry> {
        self.entries.get(idx)
    }

    /// Returns the index of the entry that now represents `det`.
    ///
    /// Detections carrying distinct instance labels are never suppressed
    /// against each other.
    pub fn insert(&mut self, det: Detection) -> usize {
        let score = det.score.clamp(0.0, 1.0);
        let same_instance = det.instance.as_deref().and_then(|i| self.by_instance(i));
        let nearby = same_instance.or_else(|| {
            self.entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.category == det.category && distance(&e.centroid, &det.centroid) <= self.nms_threshold)
                .filter(|(_, e)| e.instance.is_none() || det.instance.is_none())
                .min_by(|a, b| distance(&a.1.centroid, &det.centroid).total_cmp(&distance(&b.1.centroid, &det.centroid)))
                .map(|(i, _)| i)
        });
        match nearby {
            Some(i) => {
                let entry = &mut self.entries[i];
                entry.observations += 1;
                if same_instance.is_some() || score > entry.score {
                    entry.centroid = det.centroid;
                    entry.score = entry.score.max(score);
                    if entry.instance.is_none() {
                        entry.instance = det.instance;
                    }
                }
                self.absorb_neighbours(i)
            }
            None => {
                self.entries.push(ObjectMemoryEntry {
                    category: det.category,
                    centroid: det.centroid,
                    score,
                    attributes: default_attributes(),
                    instance: det.instance,
                    observations: 1,
                });
                self.entries.len() - 1
            }
        }
    }

    /// Merges entries that `i` now suppresses; returns `i`'s index after removals.
    fn absorb_neighbours(&mut self, mut i: usize) -> usize {
        loop {
            let e = &self.entries[i];
            let hit = (0..self.entries.len()).find(|&j| {
                let o = &self.entries[j];
                j != i
                    && o.category == e.category
                    && (o.instance.is_none() || e.instance.is_none())
                    && distance(&o.centroid, &e.centroid) <= self.nms_threshold
            });
            let Some(j) = hit else { return i };
            let other = self.entries.remove(j);
            if j < i {
                i -= 1;
            }
            let e = &mut self.entries[i];
            e.observations += other.observations;
            if other.score > e.score {
                e.centroid = other.centroid;
                e.score = other.score;
            }
            if e.instance.is_none() {
                e.instance = other.instance;
            }
            for (a, v) in other.attributes {
                let slot = e.attributes.entry(a).or_insert(None);
                if slot.is_none() {
                    *slot = v;
                }
            }
        }
    }

    pub fn set_attribute(&mut self, idx: usize, a: Attribute, value: Option<bool>) {
        if let Some(e) = self.entries.get_mut(idx) {
            e.attributes.insert(a, value);
        }
    }

    pub fn set_centroid(&mut self, idx: usize, centroid: [f64; 3]) {
        if let Some(e) = self.entries.get_mut(idx) {
            e.centroid = centroid;
        }
    }
}
