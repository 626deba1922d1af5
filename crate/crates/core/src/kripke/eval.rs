use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use super::{Frame, Model};
use crate::error::{Error, Result};
use crate::formula::Formula;

/// Limit on the number of valuations `valid_on_frame` may enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValuationBudget {
    pub max_valuations: u64,
}

impl Default for ValuationBudget {
    fn default() -> Self {
        ValuationBudget {
            max_valuations: 1 << 24,
        }
    }
}

/// Evaluates formulas on a frame given the extension of every atom.
pub(crate) struct Evaluator<'a> {
    frame: &'a Frame,
    atoms: HashMap<&'a str, FixedBitSet>,
    dist_rows: Option<Vec<FixedBitSet>>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn for_model(m: &'a Model) -> Self {
        let mut atoms: HashMap<&str, FixedBitSet> = HashMap::new();
        for (w, set) in m.valuation.iter().enumerate() {
            for a in set {
                atoms
                    .entry(a.as_str())
                    .or_insert_with(|| FixedBitSet::with_capacity(m.len()))
                    .insert(w);
            }
        }
        Evaluator {
            frame: &m.frame,
            atoms,
            dist_rows: None,
        }
    }

    fn on_frame(frame: &'a Frame, names: &'a [String]) -> Self {
        let atoms = names
            .iter()
            .map(|a| (a.as_str(), FixedBitSet::with_capacity(frame.len())))
            .collect();
        Evaluator {
            frame,
            atoms,
            dist_rows: None,
        }
    }

    /// Validates `f` against the frame and prepares the `D` relation.
    fn prepare(&mut self, f: &Formula) -> Result<()> {
        f.check_agents(self.frame.n())?;
        if f.contains_dist() && self.dist_rows.is_none() {
            if !super::check_equivalence(self.frame) {
                return Err(Error::DistOnNonEquivalence);
            }
            self.dist_rows = Some(self.frame.intersection_rows());
        }
        Ok(())
    }

    pub(crate) fn extension(&self, f: &Formula) -> FixedBitSet {
        let size = self.frame.len();
        let full = || {
            let mut b = FixedBitSet::with_capacity(size);
            b.insert_range(..);
            b
        };
        match f {
            Formula::Atom(p) => self
                .atoms
                .get(p.as_str())
                .cloned()
                .unwrap_or_else(|| FixedBitSet::with_capacity(size)),
            Formula::Not(a) => {
                let mut e = self.extension(a);
                e.toggle_range(..);
                e
            }
            Formula::And(a, b) => {
                let mut e = self.extension(a);
                e.intersect_with(&self.extension(b));
                e
            }
            Formula::Or(a, b) => {
                let mut e = self.extension(a);
                e.union_with(&self.extension(b));
                e
            }
            Formula::Implies(a, b) => {
                let mut e = self.extension(a);
                e.toggle_range(..);
                e.union_with(&self.extension(b));
                e
            }
            Formula::Iff(a, b) => {
                let mut e = self.extension(a);
                e.symmetric_difference_with(&self.extension(b));
                e.toggle_range(..);
                e
            }
            Formula::Box(i, a) => {
                let inner = self.extension(a);
                let rel = self.frame.relation(*i);
                let mut e = FixedBitSet::with_capacity(size);
                for w in 0..size {
                    if rel.row(w).is_subset(&inner) {
                        e.insert(w);
                    }
                }
                e
            }
            Formula::Diamond(i, a) => {
                let inner = self.extension(a);
                diamond(self.frame, *i, &inner)
            }
            Formula::Some(a) => {
                let inner = self.extension(a);
                let mut e = FixedBitSet::with_capacity(size);
                for i in 1..=self.frame.n() {
                    e.union_with(&diamond(self.frame, i, &inner));
                }
                e
            }
            Formula::Dist(a) => {
                let inner = self.extension(a);
                let rows = self.dist_rows.as_ref().expect("prepared");
                let mut e = full();
                for (w, row) in rows.iter().enumerate() {
                    if !row.is_subset(&inner) {
                        e.set(w, false);
                    }
                }
                e
            }
        }
    }
}

fn diamond(frame: &Frame, i: usize, inner: &FixedBitSet) -> FixedBitSet {
    let rel = frame.relation(i);
    let mut e = FixedBitSet::with_capacity(frame.len());
    for w in 0..frame.len() {
        if !rel.row(w).is_disjoint(inner) {
            e.insert(w);
        }
    }
    e
}

/// The set of worlds of `m` where `f` holds.
pub fn extension(m: &Model, f: &Formula) -> Result<FixedBitSet> {
    let mut ev = Evaluator::for_model(m);
    ev.prepare(f)?;
    Ok(ev.extension(f))
}

/// Whether `f` holds at world index `w` of `m`.
pub fn satisfies(m: &Model, w: usize, f: &Formula) -> Result<bool> {
    if w >= m.len() {
        return Err(Error::UnknownWorld(format!("#{w}")));
    }
    Ok(extension(m, f)?.contains(w))
}

/// Whether `f` holds at the world named `w`.
pub fn satisfies_named(m: &Model, w: &str, f: &Formula) -> Result<bool> {
    satisfies(m, m.frame.world(w)?, f)
}

pub fn valid_on_model(m: &Model, f: &Formula) -> Result<bool> {
    let e = extension(m, f)?;
    Ok(e.count_ones(..) == m.len())
}

/// Whether `f` holds everywhere under every valuation of its atoms.
pub fn valid_on_frame(fr: &Frame, f: &Formula, budget: ValuationBudget) -> Result<bool> {
    Ok(falsifying_valuation(fr, f, budget)?.is_none())
}

/// A valuation of the atoms of `f` on `fr` together with a world where
/// `f` fails, if one exists. Valuations are enumerated in a fixed order,
/// so the result is deterministic.
pub fn falsifying_valuation(fr: &Frame, f: &Formula, budget: ValuationBudget) -> Result<Option<(Model, usize)>> {
    let names: Vec<String> = f.atoms().into_iter().collect();
    let bits = fr.len() as u64 * names.len() as u64;
    if bits >= 64 || (1u64 << bits) > budget.max_valuations {
        return Err(Error::Budget(format!(
            "2^{bits} valuations exceed the limit of {}",
            budget.max_valuations
        )));
    }
    let mut ev = Evaluator::on_frame(fr, &names);
    ev.prepare(f)?;
    let size = fr.len();
    for code in 0u64..(1u64 << bits) {
        for (k, name) in names.iter().enumerate() {
            let ext = ev.atoms.get_mut(name.as_str()).expect("registered");
            for w in 0..size {
                ext.set(w, code >> (k * size + w) & 1 == 1);
            }
        }
        let e = ev.extension(f);
        if let Some(w) = (0..size).find(|&w| !e.contains(w)) {
            let exts: Vec<FixedBitSet> = names.iter().map(|a| ev.atoms[a.as_str()].clone()).collect();
            let model = Model::from_extensions(fr.clone(), &names, &exts);
            return Ok(Some((model, w)));
        }
    }
    Ok(None)
}

/// Valuation over `size` worlds from `(world, atom)` pairs.
pub fn valuation_from_pairs(size: usize, pairs: &[(usize, &str)]) -> Vec<BTreeSet<String>> {
    let mut v = vec![BTreeSet::new(); size];
    for (w, a) in pairs {
        v[*w].insert(a.to_string());
    }
    v
}
