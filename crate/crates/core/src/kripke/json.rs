//! JSON documents for frames, models and world maps.
//!
//! ```json
//! {"n": 2, "worlds": ["w0", "w1"],
//!  "relations": {"1": [["w0", "w0"], ["w0", "w1"]], "2": []},
//!  "valuation": {"w0": ["p"]}}
//! ```
//!
//! Equivalence frames may give `"partitions": {"1": [["w0", "w1"]], ...}`
//! instead of `"relations"`. Writers emit partitions whenever every relation
//! is an equivalence.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Frame, Model, Relation, WorldMap};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDoc {
    pub n: usize,
    pub worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<BTreeMap<usize, Vec<(String, String)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<BTreeMap<usize, Vec<Vec<String>>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub n: usize,
    pub worlds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<BTreeMap<usize, Vec<(String, String)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<BTreeMap<usize, Vec<Vec<String>>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldMapDoc {
    pub map: BTreeMap<String, String>,
}

impl From<&Frame> for FrameDoc {
    fn from(fr: &Frame) -> Self {
        let name = |w: usize| fr.name(w).to_string();
        match fr.partitions() {
            Some(parts) => FrameDoc {
                n: fr.n(),
                worlds: fr.worlds().to_vec(),
                relations: None,
                partitions: Some(
                    parts
                        .into_iter()
                        .enumerate()
                        .map(|(k, classes)| {
                            let named = classes.into_iter().map(|c| c.into_iter().map(name).collect()).collect();
                            (k + 1, named)
                        })
                        .collect(),
                ),
            },
            None => FrameDoc {
                n: fr.n(),
                worlds: fr.worlds().to_vec(),
                relations: Some(
                    (1..=fr.n())
                        .map(|i| (i, fr.relation(i).pairs().map(|(a, b)| (name(a), name(b))).collect()))
                        .collect(),
                ),
                partitions: None,
            },
        }
    }
}

impl TryFrom<FrameDoc> for Frame {
    type Error = Error;

    fn try_from(doc: FrameDoc) -> Result<Frame> {
        build_frame(doc.n, doc.worlds, doc.relations, doc.partitions)
    }
}

fn build_frame(
    n: usize,
    worlds: Vec<String>,
    relations: Option<BTreeMap<usize, Vec<(String, String)>>>,
    partitions: Option<BTreeMap<usize, Vec<Vec<String>>>>,
) -> Result<Frame> {
    if n == 0 {
        return Err(Error::NoAgents);
    }
    // a name-only frame resolves world references before relations exist
    let names = Frame::new(1, worlds.clone(), vec![Relation::identity(worlds.len())])?;
    let check_keys = |keys: Vec<usize>| -> Result<()> {
        if keys != (1..=n).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!(
                "expected relations for agents 1..={n}, got {keys:?}"
            )));
        }
        Ok(())
    };
    let rels = match (relations, partitions) {
        (Some(_), Some(_)) => return Err(Error::Invalid("give either relations or partitions, not both".into())),
        (None, None) => return Err(Error::Invalid("missing relations".into())),
        (Some(rel), None) => {
            check_keys(rel.keys().copied().collect())?;
            rel.into_values()
                .map(|pairs| {
                    let idx = pairs
                        .iter()
                        .map(|(a, b)| Ok((names.world(a)?, names.world(b)?)))
                        .collect::<Result<Vec<_>>>()?;
                    Relation::from_pairs(worlds.len(), idx)
                })
                .collect::<Result<Vec<_>>>()?
        }
        (None, Some(parts)) => {
            check_keys(parts.keys().copied().collect())?;
            parts
                .into_values()
                .map(|classes| {
                    let idx = classes
                        .iter()
                        .map(|c| c.iter().map(|w| names.world(w)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?;
                    Relation::from_partition(worlds.len(), &idx)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Frame::new(n, worlds, rels)
}

impl From<&Model> for ModelDoc {
    fn from(m: &Model) -> Self {
        let f = FrameDoc::from(m.frame());
        ModelDoc {
            n: f.n,
            worlds: f.worlds,
            relations: f.relations,
            partitions: f.partitions,
            valuation: (0..m.len())
                .map(|w| (m.frame().name(w).to_string(), m.atoms_at(w).clone()))
                .collect(),
        }
    }
}

impl TryFrom<ModelDoc> for Model {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Model> {
        let frame = build_frame(doc.n, doc.worlds, doc.relations, doc.partitions)?;
        Model::from_named(frame, &doc.valuation)
    }
}

fn decode<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("JSON: {e}")))
}

pub fn frame_from_json(text: &str) -> Result<Frame> {
    // models are accepted as frames; the valuation is dropped
    Ok(model_from_json(text)?.into_frame())
}

pub fn model_from_json(text: &str) -> Result<Model> {
    Model::try_from(decode::<ModelDoc>(text)?)
}

pub fn frame_to_json(fr: &Frame) -> String {
    serde_json::to_string_pretty(&FrameDoc::from(fr)).expect("serializable")
}

pub fn model_to_json(m: &Model) -> String {
    serde_json::to_string_pretty(&ModelDoc::from(m)).expect("serializable")
}

pub fn world_map_from_json(text: &str, source: &Frame, target: &Frame) -> Result<WorldMap> {
    let doc: WorldMapDoc = decode(text)?;
    WorldMap::from_named(source, target, &doc.map)
}

pub fn world_map_to_json(map: &WorldMap, source: &Frame, target: &Frame) -> String {
    let doc = WorldMapDoc {
        map: map.to_named(source, target),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}
