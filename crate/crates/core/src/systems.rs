//! Systems of global states and their frames.
//!
//! A global state is a tuple `(e, l1, ..., ln)` of an environment state and
//! one local state per agent. Agent `i` cannot tell two global states apart
//! when their `i`-th local states coincide.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kripke::{check_d, check_equivalence, check_i, Frame, Model, Relation, WorldMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalStateSystem {
    n: usize,
    env: Vec<String>,
    locals: Vec<Vec<String>>,
    /// `[e, l1, ..., ln]` as indices into the alphabets.
    states: Vec<Vec<usize>>,
}

fn index_alphabet(what: &str, symbols: &[String]) -> Result<HashMap<String, usize>> {
    let mut idx = HashMap::with_capacity(symbols.len());
    for (k, s) in symbols.iter().enumerate() {
        if idx.insert(s.clone(), k).is_some() {
            return Err(Error::Invalid(format!("{what} lists `{s}` twice")));
        }
    }
    Ok(idx)
}

impl GlobalStateSystem {
    /// Validates shape, membership, duplicates and alphabet tightness.
    pub fn new(n: usize, env: Vec<String>, locals: Vec<Vec<String>>, states: Vec<Vec<String>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoAgents);
        }
        if locals.len() != n {
            return Err(Error::Invalid(format!(
                "expected {n} local alphabets, got {}",
                locals.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::Invalid("system has no states".into()));
        }
        let mut alphabets = vec![index_alphabet("environment alphabet", &env)?];
        for (i, l) in locals.iter().enumerate() {
            alphabets.push(index_alphabet(&format!("alphabet of agent {}", i + 1), l)?);
        }
        let mut seen = HashSet::new();
        let mut encoded = Vec::with_capacity(states.len());
        for s in &states {
            if s.len() != n + 1 {
                return Err(Error::Invalid(format!(
                    "state {s:?} has {} components, expected {}",
                    s.len(),
                    n + 1
                )));
            }
            let t = s
                .iter()
                .zip(&alphabets)
                .enumerate()
                .map(|(k, (sym, alpha))| {
                    alpha
                        .get(sym)
                        .copied()
                        .ok_or_else(|| Error::Invalid(format!("`{sym}` is not in alphabet {k} (state {s:?})")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !seen.insert(t.clone()) {
                return Err(Error::Invalid(format!("duplicate state {s:?}")));
            }
            encoded.push(t);
        }
        let sys = GlobalStateSystem {
            n,
            env,
            locals,
            states: encoded,
        };
        for axis in 0..=n {
            let used: HashSet<usize> = sys.states.iter().map(|t| t[axis]).collect();
            if used.len() != sys.alphabet(axis).len() {
                return Err(Error::Invalid(format!(
                    "alphabet {axis} has symbols that occur in no state"
                )));
            }
        }
        Ok(sys)
    }

    /// The full product `{e} x L1 x ... x Ln` in lexicographic order.
    pub fn hypercube(env_symbol: &str, locals: Vec<Vec<String>>) -> Result<Self> {
        let n = locals.len();
        let mut states = vec![vec![env_symbol.to_string()]];
        for l in &locals {
            states = states
                .into_iter()
                .flat_map(|prefix| {
                    l.iter().map(move |sym| {
                        let mut t = prefix.clone();
                        t.push(sym.clone());
                        t
                    })
                })
                .collect();
        }
        Self::new(n, vec![env_symbol.to_string()], locals, states)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn env(&self) -> &[String] {
        &self.env
    }

    pub fn locals(&self) -> &[Vec<String>] {
        &self.locals
    }

    /// Alphabet of axis `k`: 0 is the environment, `i` is agent `i`.
    pub fn alphabet(&self, k: usize) -> &[String] {
        if k == 0 {
            &self.env
        } else {
            &self.locals[k - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_indices(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> Vec<String> {
        self.states[k]
            .iter()
            .enumerate()
            .map(|(axis, &s)| self.alphabet(axis)[s].clone())
            .collect()
    }

    pub fn states(&self) -> Vec<Vec<String>> {
        (0..self.len()).map(|k| self.state(k)).collect()
    }

    /// World name of state `k` in `f_map`: the state as a JSON array.
    pub fn state_name(&self, k: usize) -> String {
        serde_json::to_string(&self.state(k)).expect("serializable")
    }

    pub fn find_state(&self, tuple: &[String]) -> Option<usize> {
        (0..self.len()).find(|&k| self.state(k) == tuple)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpretedSystem {
    system: GlobalStateSystem,
    valuation: Vec<BTreeSet<String>>,
}

impl InterpretedSystem {
    pub fn new(system: GlobalStateSystem, valuation: Vec<BTreeSet<String>>) -> Result<Self> {
        if valuation.len() != system.len() {
            return Err(Error::Invalid(format!(
                "valuation covers {} states, system has {}",
                valuation.len(),
                system.len()
            )));
        }
        Ok(InterpretedSystem { system, valuation })
    }

    pub fn system(&self) -> &GlobalStateSystem {
        &self.system
    }

    pub fn valuation(&self) -> &[BTreeSet<String>] {
        &self.valuation
    }
}

/// The frame of a system: worlds are the states, in order.
pub fn f_map(s: &GlobalStateSystem) -> Frame {
    let names = (0..s.len()).map(|k| s.state_name(k)).collect();
    let relations = (1..=s.n)
        .map(|i| {
            let mut classes: Vec<Vec<usize>> = vec![Vec::new(); s.locals[i - 1].len()];
            for (k, t) in s.states.iter().enumerate() {
                classes[t[i]].push(k);
            }
            Relation::from_partition(s.len(), &classes).expect("states partition by local state")
        })
        .collect();
    Frame::new(s.n, names, relations).expect("valid system")
}

pub fn f_map_interpreted(is: &InterpretedSystem) -> Model {
    Model::new(f_map(&is.system), is.valuation.clone()).expect("one atom set per state")
}

fn product_size(s: &GlobalStateSystem) -> Option<usize> {
    s.locals.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len()))
}

pub fn is_hypercube(s: &GlobalStateSystem) -> bool {
    // states are distinct and alphabets tight, so counting suffices
    s.env.len() == 1 && product_size(s) == Some(s.len())
}

/// Every tuple of local states is completed by some environment state.
pub fn is_full(s: &GlobalStateSystem) -> bool {
    let locals: HashSet<&[usize]> = s.states.iter().map(|t| &t[1..]).collect();
    product_size(s) == Some(locals.len())
}

/// Canonical name of a set of worlds: `{a,b}` in world order.
pub fn class_name(fr: &Frame, class: &[usize]) -> String {
    let names: Vec<&str> = class.iter().map(|&w| fr.name(w)).collect();
    format!("{{{}}}", names.join(","))
}

fn require_partitions(fr: &Frame, need_i: bool) -> Result<Vec<Vec<Vec<usize>>>> {
    let parts = if check_equivalence(fr) {
        fr.partitions().expect("equivalence frame")
    } else {
        return Err(Error::Precondition("frame is not an equivalence frame".into()));
    };
    if !check_d(fr) {
        return Err(Error::Precondition("frame is not directed".into()));
    }
    if need_i && !check_i(fr) {
        return Err(Error::Precondition(
            "intersection of the relations is not the identity".into(),
        ));
    }
    Ok(parts)
}

/// The full system with states `(w, [w]_1, ..., [w]_n)`; state `k` comes from
/// world `k`, so the returned map (from `f_map` of the system onto `fr`) is
/// the identity.
pub fn frame_to_full_system(fr: &Frame) -> Result<(GlobalStateSystem, WorldMap)> {
    let parts = require_partitions(fr, false)?;
    let mut class_of = vec![vec![0; fr.len()]; fr.n()];
    let locals: Vec<Vec<String>> = parts
        .iter()
        .enumerate()
        .map(|(i, classes)| {
            for (c, class) in classes.iter().enumerate() {
                for &w in class {
                    class_of[i][w] = c;
                }
            }
            classes.iter().map(|c| class_name(fr, c)).collect()
        })
        .collect();
    let states = (0..fr.len())
        .map(|w| {
            std::iter::once(fr.name(w).to_string())
                .chain((0..fr.n()).map(|i| locals[i][class_of[i][w]].clone()))
                .collect()
        })
        .collect();
    let sys = GlobalStateSystem::new(fr.n(), fr.worlds().to_vec(), locals, states)?;
    Ok((sys, WorldMap::identity(fr.len())))
}

/// The hypercube `{1} x W/~1 x ... x W/~n`, with the map sending each state
/// to the unique world in the intersection of its classes.
pub fn frame_to_hypercube(fr: &Frame) -> Result<(GlobalStateSystem, WorldMap)> {
    let parts = require_partitions(fr, true)?;
    let locals: Vec<Vec<String>> = parts
        .iter()
        .map(|classes| classes.iter().map(|c| class_name(fr, c)).collect())
        .collect();
    let sys = GlobalStateSystem::hypercube("1", locals)?;
    let mut map = Vec::with_capacity(sys.len());
    for t in sys.state_indices() {
        let mut common: Option<BTreeSet<usize>> = None;
        for (i, &c) in t[1..].iter().enumerate() {
            let class: BTreeSet<usize> = parts[i][c].iter().copied().collect();
            common = Some(match common {
                None => class,
                Some(acc) => acc.intersection(&class).copied().collect(),
            });
        }
        let common = common.expect("n >= 1");
        if common.len() != 1 {
            return Err(Error::Internal(format!(
                "class intersection has {} worlds",
                common.len()
            )));
        }
        map.push(*common.first().expect("one world"));
    }
    Ok((sys, WorldMap::new(map)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub n: usize,
    pub env: Vec<String>,
    pub locals: Vec<Vec<String>>,
    pub states: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valuation: Option<BTreeMap<String, BTreeSet<String>>>,
}

impl From<&GlobalStateSystem> for SystemDoc {
    fn from(s: &GlobalStateSystem) -> Self {
        SystemDoc {
            n: s.n,
            env: s.env.clone(),
            locals: s.locals.clone(),
            states: s.states(),
            valuation: None,
        }
    }
}

impl From<&InterpretedSystem> for SystemDoc {
    fn from(is: &InterpretedSystem) -> Self {
        let mut doc = SystemDoc::from(&is.system);
        doc.valuation = Some(
            (0..is.system.len())
                .map(|k| (is.system.state_name(k), is.valuation[k].clone()))
                .collect(),
        );
        doc
    }
}

impl SystemDoc {
    pub fn into_system(self) -> Result<GlobalStateSystem> {
        GlobalStateSystem::new(self.n, self.env, self.locals, self.states)
    }

    /// A missing valuation means no atom is true anywhere.
    pub fn into_interpreted(self) -> Result<InterpretedSystem> {
        let valuation = self.valuation.clone().unwrap_or_default();
        let sys = self.into_system()?;
        let mut val = vec![BTreeSet::new(); sys.len()];
        for (key, atoms) in valuation {
            let tuple: Vec<String> =
                serde_json::from_str(&key).map_err(|e| Error::Invalid(format!("valuation key `{key}`: {e}")))?;
            let k = sys
                .find_state(&tuple)
                .ok_or_else(|| Error::Invalid(format!("valuation key `{key}` is not a state")))?;
            val[k] = atoms;
        }
        InterpretedSystem::new(sys, val)
    }
}

pub fn system_from_json(text: &str) -> Result<InterpretedSystem> {
    let doc: SystemDoc = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("JSON: {e}")))?;
    doc.into_interpreted()
}

pub fn system_to_json(is: &InterpretedSystem) -> String {
    serde_json::to_string_pretty(&SystemDoc::from(is)).expect("serializable")
}
