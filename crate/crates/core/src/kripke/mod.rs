//! Finite Kripke frames and models.
//!
//! Worlds are addressed by dense indices `0..len`; every world also carries
//! a unique display name used by the JSON formats. Agents are numbered from
//! 1, so `relation(i)` is the accessibility relation of agent `i`.

mod eval;
mod iso;
pub mod json;
mod morphism;
mod props;
mod structure;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub use eval::{
    extension, falsifying_valuation, satisfies, satisfies_named, valid_on_frame, valid_on_model, valuation_from_pairs,
    ValuationBudget,
};
pub use iso::{find_isomorphism, find_model_isomorphism, IsoBudget};
pub use morphism::{check_model_p_morphism, check_p_morphism, MorphismViolation};
pub use props::{
    check_d, check_equivalence, check_i, check_wd, d_violation, is_connected, properties, wd_violation, FrameProperties,
};
pub use structure::{
    component_models, connected_components, disjoint_union, generated_submodel, restrict, restrict_model,
};

/// A binary relation on `0..size`, stored both as sorted successor lists
/// and as bit rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    succ: Vec<Vec<usize>>,
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn from_pairs(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut rows = vec![FixedBitSet::with_capacity(size); size];
        for (a, b) in pairs {
            if a >= size || b >= size {
                return Err(Error::Invalid(format!("relation pair ({a}, {b}) outside 0..{size}")));
            }
            rows[a].insert(b);
        }
        Ok(Self::from_rows(rows))
    }

    fn from_rows(rows: Vec<FixedBitSet>) -> Self {
        let succ = rows.iter().map(|r| r.ones().collect()).collect();
        Relation { succ, rows }
    }

    /// The equivalence relation whose classes are `classes`. Every element of
    /// `0..size` must occur in exactly one class.
    pub fn from_partition(size: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut seen = FixedBitSet::with_capacity(size);
        let mut rows = vec![FixedBitSet::with_capacity(size); size];
        for class in classes {
            let mut bits = FixedBitSet::with_capacity(size);
            for &w in class {
                if w >= size {
                    return Err(Error::Invalid(format!("class member {w} outside 0..{size}")));
                }
                if seen.put(w) {
                    return Err(Error::Invalid(format!("world {w} occurs in two classes")));
                }
                bits.insert(w);
            }
            for &w in class {
                rows[w] = bits.clone();
            }
        }
        if seen.count_ones(..) != size {
            return Err(Error::Invalid("partition does not cover every world".into()));
        }
        Ok(Self::from_rows(rows))
    }

    pub fn identity(size: usize) -> Self {
        Self::from_pairs(size, (0..size).map(|w| (w, w))).expect("in range")
    }

    pub fn total(size: usize) -> Self {
        let mut row = FixedBitSet::with_capacity(size);
        row.insert_range(..);
        Self::from_rows(vec![row; size])
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn successors(&self, a: usize) -> &[usize] {
        &self.succ[a]
    }

    pub fn row(&self, a: usize) -> &FixedBitSet {
        &self.rows[a]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    pub fn pair_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|w| self.contains(w, w))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        // a R b implies row(b) ⊆ row(a)
        self.pairs().all(|(a, b)| self.rows[b].is_subset(&self.rows[a]))
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Equivalence classes ordered by least member, or `None` when the
    /// relation is not an equivalence.
    pub fn classes(&self) -> Option<Vec<Vec<usize>>> {
        if !self.is_equivalence() {
            return None;
        }
        let mut out = Vec::new();
        let mut seen = FixedBitSet::with_capacity(self.size());
        for w in 0..self.size() {
            if !seen.contains(w) {
                seen.union_with(&self.rows[w]);
                out.push(self.succ[w].clone());
            }
        }
        Some(out)
    }
}

/// A frame: nonempty world set with one relation per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    n: usize,
    worlds: Vec<String>,
    index: HashMap<String, usize>,
    relations: Vec<Relation>,
}

impl Frame {
    pub fn new(n: usize, worlds: Vec<String>, relations: Vec<Relation>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoAgents);
        }
        if worlds.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if relations.len() != n {
            return Err(Error::Invalid(format!(
                "expected {n} relations, got {}",
                relations.len()
            )));
        }
        if let Some(r) = relations.iter().find(|r| r.size() != worlds.len()) {
            return Err(Error::Invalid(format!(
                "relation over {} worlds in a frame of {}",
                r.size(),
                worlds.len()
            )));
        }
        let mut index = HashMap::with_capacity(worlds.len());
        for (k, w) in worlds.iter().enumerate() {
            if index.insert(w.clone(), k).is_some() {
                return Err(Error::DuplicateWorld(w.clone()));
            }
        }
        Ok(Frame {
            n,
            worlds,
            index,
            relations,
        })
    }

    /// Builds a frame from per-agent lists of index pairs.
    pub fn from_pairs(n: usize, worlds: Vec<String>, pairs: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        let size = worlds.len();
        let relations = pairs
            .into_iter()
            .map(|ps| Relation::from_pairs(size, ps))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, worlds, relations)
    }

    /// Builds an equivalence frame from one partition per agent.
    pub fn from_partitions(n: usize, worlds: Vec<String>, partitions: &[Vec<Vec<usize>>]) -> Result<Self> {
        let size = worlds.len();
        let relations = partitions
            .iter()
            .map(|classes| Relation::from_partition(size, classes))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, worlds, relations)
    }

    /// `w0`, `w1`, ... as world names.
    pub fn default_names(count: usize) -> Vec<String> {
        (0..count).map(|k| format!("w{k}")).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn name(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn world(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownWorld(name.to_string()))
    }

    /// Relation of agent `i` (1-based).
    pub fn relation(&self, i: usize) -> &Relation {
        &self.relations[i - 1]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn related(&self, i: usize, a: usize, b: usize) -> bool {
        self.relations[i - 1].contains(a, b)
    }

    /// Equivalence classes per agent, when every relation is an equivalence.
    pub fn partitions(&self) -> Option<Vec<Vec<Vec<usize>>>> {
        self.relations.iter().map(Relation::classes).collect()
    }

    /// The same frame with new world names.
    pub fn renamed(&self, worlds: Vec<String>) -> Result<Self> {
        if worlds.len() != self.len() {
            return Err(Error::Invalid("renaming must keep the world count".into()));
        }
        Self::new(self.n, worlds, self.relations.clone())
    }

    /// Intersection of all agents' relations, as bit rows.
    pub fn intersection_rows(&self) -> Vec<FixedBitSet> {
        (0..self.len())
            .map(|w| {
                let mut row = self.relations[0].row(w).clone();
                for r in &self.relations[1..] {
                    row.intersect_with(r.row(w));
                }
                row
            })
            .collect()
    }
}

/// A frame together with a valuation `world -> atoms true there`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: Vec<BTreeSet<String>>,
}

impl Model {
    pub fn new(frame: Frame, valuation: Vec<BTreeSet<String>>) -> Result<Self> {
        if valuation.len() != frame.len() {
            return Err(Error::Invalid(format!(
                "valuation covers {} worlds, frame has {}",
                valuation.len(),
                frame.len()
            )));
        }
        Ok(Model { frame, valuation })
    }

    /// Valuation keyed by world name; worlds without an entry get no atoms.
    pub fn from_named(frame: Frame, named: &BTreeMap<String, BTreeSet<String>>) -> Result<Self> {
        let mut valuation = vec![BTreeSet::new(); frame.len()];
        for (w, atoms) in named {
            valuation[frame.world(w)?] = atoms.clone();
        }
        Self::new(frame, valuation)
    }

    /// Model where atom `atoms[k]` is true exactly on `extensions[k]`.
    pub fn from_extensions(frame: Frame, atoms: &[String], extensions: &[FixedBitSet]) -> Self {
        let mut valuation = vec![BTreeSet::new(); frame.len()];
        for (atom, ext) in atoms.iter().zip(extensions) {
            for w in ext.ones() {
                valuation[w].insert(atom.clone());
            }
        }
        Model { frame, valuation }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn into_frame(self) -> Frame {
        self.frame
    }

    pub fn valuation(&self) -> &[BTreeSet<String>] {
        &self.valuation
    }

    pub fn atoms_at(&self, w: usize) -> &BTreeSet<String> {
        &self.valuation[w]
    }

    pub fn holds(&self, w: usize, atom: &str) -> bool {
        self.valuation[w].contains(atom)
    }

    /// Every atom true somewhere.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.valuation.iter().flatten().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }
}

/// A total function between the world sets of two frames, by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldMap {
    map: Vec<usize>,
}

impl WorldMap {
    pub fn new(map: Vec<usize>) -> Self {
        WorldMap { map }
    }

    pub fn identity(size: usize) -> Self {
        WorldMap {
            map: (0..size).collect(),
        }
    }

    pub fn apply(&self, w: usize) -> usize {
        self.map[w]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Checks totality on `source` and that the image lies in `target`.
    pub fn validate(&self, source: &Frame, target: &Frame) -> Result<()> {
        if self.map.len() != source.len() {
            return Err(Error::Invalid(format!(
                "map covers {} worlds, source has {}",
                self.map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = self.map.iter().find(|&&t| t >= target.len()) {
            return Err(Error::Invalid(format!("map image {bad} outside target")));
        }
        Ok(())
    }

    pub fn is_bijective(&self, target_size: usize) -> bool {
        let mut hit = FixedBitSet::with_capacity(target_size);
        self.map.len() == target_size && self.map.iter().all(|&t| t < target_size && !hit.put(t))
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Option<WorldMap> {
        if !self.is_bijective(self.map.len()) {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (s, &t) in self.map.iter().enumerate() {
            inv[t] = s;
        }
        Some(WorldMap { map: inv })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &WorldMap) -> WorldMap {
        WorldMap {
            map: self.map.iter().map(|&t| other.map[t]).collect(),
        }
    }

    pub fn to_named(&self, source: &Frame, target: &Frame) -> BTreeMap<String, String> {
        self.map
            .iter()
            .enumerate()
            .map(|(s, &t)| (source.name(s).to_string(), target.name(t).to_string()))
            .collect()
    }

    pub fn from_named(source: &Frame, target: &Frame, named: &BTreeMap<String, String>) -> Result<Self> {
        let mut map = vec![usize::MAX; source.len()];
        for (s, t) in named {
            map[source.world(s)?] = target.world(t)?;
        }
        if let Some(missing) = map.iter().position(|&t| t == usize::MAX) {
            return Err(Error::Invalid(format!(
                "map is not total: `{}` has no image",
                source.name(missing)
            )));
        }
        Ok(WorldMap { map })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_classes_and_checks() {
        let r = Relation::from_partition(4, &[vec![0, 2], vec![1], vec![3]]).unwrap();
        assert!(r.is_equivalence());
        assert_eq!(r.classes().unwrap(), vec![vec![0, 2], vec![1], vec![3]]);
        assert!(Relation::from_partition(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Relation::from_partition(3, &[vec![0, 1]]).is_err());

        let not_refl = Relation::from_pairs(2, [(0, 0)]).unwrap();
        assert!(!not_refl.is_reflexive());
        assert!(not_refl.classes().is_none());
        let not_trans = Relation::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        assert!(!not_trans.is_transitive());
        assert!(Relation::total(3).is_equivalence());
    }

    #[test]
    fn frame_rejects_bad_input() {
        assert_eq!(
            Frame::from_pairs(1, vec![], vec![vec![]]).unwrap_err(),
            Error::EmptyFrame
        );
        assert!(Frame::from_pairs(1, vec!["a".into()], vec![vec![(0, 1)]]).is_err());
        assert_eq!(
            Frame::from_pairs(1, vec!["a".into(), "a".into()], vec![vec![]]).unwrap_err(),
            Error::DuplicateWorld("a".into())
        );
        assert_eq!(
            Frame::from_pairs(0, vec!["a".into()], vec![]).unwrap_err(),
            Error::NoAgents
        );
    }

    #[test]
    fn world_map_named_round_trip() {
        let a = Frame::from_partitions(1, Frame::default_names(2), &[vec![vec![0, 1]]]).unwrap();
        let b = Frame::from_partitions(1, vec!["x".into()], &[vec![vec![0]]]).unwrap();
        let map = WorldMap::new(vec![0, 0]);
        let named = map.to_named(&a, &b);
        assert_eq!(WorldMap::from_named(&a, &b, &named).unwrap(), map);
        let partial: BTreeMap<_, _> = [("w0".to_string(), "x".to_string())].into();
        assert!(WorldMap::from_named(&a, &b, &partial).is_err());
        assert!(!map.is_bijective(1));
        assert!(WorldMap::identity(3).inverse().is_some());
    }
}
