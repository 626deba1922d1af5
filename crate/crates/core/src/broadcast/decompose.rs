use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::traces::{perfect_recall_state, TraceFrame};
use super::{BroadcastEnvironment, Observation};
use crate::error::{Error, Result};
use crate::kripke::{connected_components, find_isomorphism, restrict, IsoBudget};
use crate::systems::{f_map, is_full, GlobalStateSystem};

/// What each component is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    /// Component is the full product of its agents' perfect-recall states.
    Hypercube,
    /// Every combination of agent 1..n states occurs in the component.
    Full,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::Hypercube => "hypercube",
            VerifyMode::Full => "full",
        })
    }
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hypercube" => Ok(VerifyMode::Hypercube),
            "full" => Ok(VerifyMode::Full),
            _ => Err(Error::Invalid(format!("unknown verification mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    /// Length of the member traces.
    pub length: usize,
    pub size: usize,
    /// Number of distinct perfect-recall states of agents `0..=n`.
    pub axes: Vec<usize>,
    /// Product of `axes`, saturating.
    pub product: usize,
    /// All members have the same action sequence.
    pub shares_actions: bool,
    /// No trace outside the component has that action sequence.
    pub action_class_complete: bool,
    /// Product size matches (hypercube mode) or `is_full` holds (full mode).
    pub shape_ok: bool,
    /// Component is isomorphic to the frame of the checked system.
    pub isomorphic: bool,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub mode: VerifyMode,
    pub components: Vec<ComponentReport>,
    pub passed: bool,
}

impl DecompositionReport {
    pub fn failures(&self) -> impl Iterator<Item = &ComponentReport> {
        self.components.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for DecompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut shapes: BTreeMap<(usize, Vec<usize>, bool), usize> = BTreeMap::new();
        for c in &self.components {
            *shapes.entry((c.length, c.axes.clone(), c.passed)).or_default() += 1;
        }
        writeln!(
            f,
            "{} components, mode {}: {}",
            self.components.len(),
            self.mode,
            if self.passed { "pass" } else { "FAIL" }
        )?;
        for ((length, axes, passed), count) in shapes {
            let axes: Vec<String> = axes.iter().map(usize::to_string).collect();
            writeln!(
                f,
                "  length {length}: {count} x axes {} {}",
                axes.join("x"),
                if passed { "pass" } else { "FAIL" }
            )?;
        }
        for c in self.failures() {
            if let Some(w) = &c.witness {
                writeln!(f, "  witness: {w}")?;
            }
        }
        Ok(())
    }
}

/// Distinct perfect-recall states per agent `0..=n` in sorted order, and
/// each member's coordinates.
struct Axes {
    values: Vec<Vec<Vec<Observation>>>,
    coords: Vec<Vec<usize>>,
}

fn axes(env: &BroadcastEnvironment, tf: &TraceFrame, members: &[usize]) -> Axes {
    let mut values = Vec::with_capacity(env.n() + 1);
    let mut per_agent = Vec::with_capacity(env.n() + 1);
    for i in 0..=env.n() {
        let states: Vec<Vec<Observation>> = members
            .iter()
            .map(|&w| perfect_recall_state(&tf.traces[w], i))
            .collect();
        let mut sorted = states.clone();
        sorted.sort();
        sorted.dedup();
        let index: HashMap<&Vec<Observation>, usize> = sorted.iter().enumerate().map(|(k, s)| (s, k)).collect();
        per_agent.push(states.iter().map(|s| index[s]).collect::<Vec<_>>());
        values.push(sorted);
    }
    let coords = (0..members.len())
        .map(|m| per_agent.iter().map(|a| a[m]).collect())
        .collect();
    Axes { values, coords }
}

fn sequence_name(env: &BroadcastEnvironment, i: usize, seq: &[Observation]) -> String {
    let parts: Vec<String> = seq.iter().map(|o| env.observation_name(i, o)).collect();
    parts.join(" ")
}

fn system_over(env: &BroadcastEnvironment, ax: &Axes, tuples: &[Vec<usize>]) -> Result<GlobalStateSystem> {
    let names: Vec<Vec<String>> = ax
        .values
        .iter()
        .enumerate()
        .map(|(i, vals)| vals.iter().map(|v| sequence_name(env, i, v)).collect())
        .collect();
    let states = tuples
        .iter()
        .map(|t| t.iter().enumerate().map(|(i, &k)| names[i][k].clone()).collect())
        .collect();
    GlobalStateSystem::new(env.n(), names[0].clone(), names[1..].to_vec(), states)
}

fn product_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |k| {
                    let mut t = prefix.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// The product `X0 x X1 x ... xn` of the members' perfect-recall states,
/// with `X0` as the environment axis.
pub fn product_system(env: &BroadcastEnvironment, tf: &TraceFrame, members: &[usize]) -> Result<GlobalStateSystem> {
    let ax = axes(env, tf, members);
    let sizes: Vec<usize> = ax.values.iter().map(Vec::len).collect();
    if sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .is_none_or(|p| p > 1 << 20)
    {
        return Err(Error::Budget("product of the axes is too large".into()));
    }
    system_over(env, &ax, &product_tuples(&sizes))
}

/// First tuple in lexicographic order over `sizes` missing from `present`.
fn first_missing(sizes: &[usize], present: &HashSet<Vec<usize>>) -> Option<Vec<usize>> {
    let mut t = vec![0; sizes.len()];
    if sizes.contains(&0) {
        return None;
    }
    loop {
        if !present.contains(&t) {
            return Some(t);
        }
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            t[pos] += 1;
            if t[pos] < sizes[pos] {
                break;
            }
            t[pos] = 0;
        }
    }
}

fn check_component(
    env: &BroadcastEnvironment,
    tf: &TraceFrame,
    members: &[usize],
    classes: &HashMap<Vec<&[usize]>, usize>,
    mode: VerifyMode,
) -> ComponentReport {
    let first = &tf.traces[members[0]];
    let actions = first.action_sequence();
    let mut witness = None;
    let shares_actions = match members.iter().find(|&&w| tf.traces[w].action_sequence() != actions) {
        Some(&w) => {
            witness = Some(format!(
                "`{}` and `{}` differ in their action sequences",
                tf.frame.name(members[0]),
                tf.frame.name(w)
            ));
            false
        }
        None => true,
    };
    let action_class_complete = classes.get(&actions) == Some(&members.len());
    if !action_class_complete && witness.is_none() {
        witness = Some(format!(
            "some trace outside the component shares the action sequence of `{}`",
            tf.frame.name(members[0])
        ));
    }

    let ax = axes(env, tf, members);
    let sizes: Vec<usize> = ax.values.iter().map(Vec::len).collect();
    let product = sizes.iter().fold(1usize, |acc, &s| acc.saturating_mul(s));
    let describe = |t: &[usize], from: usize| -> String {
        let parts: Vec<String> = t
            .iter()
            .enumerate()
            .map(|(k, &c)| sequence_name(env, k + from, &ax.values[k + from][c]))
            .collect();
        format!("({})", parts.join(" | "))
    };

    let (shape_ok, tuples) = match mode {
        VerifyMode::Hypercube => {
            let present: HashSet<Vec<usize>> = ax.coords.iter().cloned().collect();
            if present.len() < members.len() {
                witness.get_or_insert_with(|| "two traces share every perfect-recall state".into());
                (false, None)
            } else if members.len() != product {
                if let Some(t) = first_missing(&sizes, &present) {
                    witness.get_or_insert_with(|| format!("no trace realizes the tuple {}", describe(&t, 0)));
                }
                (false, None)
            } else {
                (true, Some(product_tuples(&sizes)))
            }
        }
        VerifyMode::Full => {
            let present: HashSet<Vec<usize>> = ax.coords.iter().map(|t| t[1..].to_vec()).collect();
            let ok = match first_missing(&sizes[1..], &present) {
                Some(t) => {
                    witness.get_or_insert_with(|| format!("no trace realizes the local tuple {}", describe(&t, 1)));
                    false
                }
                None => true,
            };
            (ok, Some(ax.coords.clone()))
        }
    };

    let isomorphic = match tuples {
        None => false,
        Some(tuples) => {
            let outcome = system_over(env, &ax, &tuples).and_then(|sys| {
                if mode == VerifyMode::Full && !is_full(&sys) {
                    return Ok(false);
                }
                let component = restrict(&tf.frame, members)?;
                Ok(find_isomorphism(&component, &f_map(&sys), IsoBudget::unbounded_size())?.is_some())
            });
            match outcome {
                Ok(true) => true,
                Ok(false) => {
                    witness.get_or_insert_with(|| "component is not isomorphic to the product frame".into());
                    false
                }
                Err(e) => {
                    witness.get_or_insert_with(|| format!("isomorphism check failed: {e}"));
                    false
                }
            }
        }
    };

    ComponentReport {
        length: first.len(),
        size: members.len(),
        axes: sizes,
        product,
        shares_actions,
        action_class_complete,
        shape_ok,
        isomorphic,
        passed: shares_actions && action_class_complete && shape_ok && isomorphic,
        witness,
    }
}

/// Checks that every connected component consists of exactly the traces
/// with one action sequence and is isomorphic to the product of its
/// members' perfect-recall states (hypercube mode), or forms a full
/// system over them (full mode).
pub fn verify_hypercube_decomposition(
    env: &BroadcastEnvironment,
    tf: &TraceFrame,
    mode: VerifyMode,
) -> DecompositionReport {
    let mut classes: HashMap<Vec<&[usize]>, usize> = HashMap::new();
    for t in &tf.traces {
        *classes.entry(t.action_sequence()).or_default() += 1;
    }
    let components: Vec<ComponentReport> = connected_components(&tf.frame)
        .iter()
        .map(|members| check_component(env, tf, members, &classes, mode))
        .collect();
    let passed = components.iter().all(|c| c.passed);
    DecompositionReport {
        mode,
        components,
        passed,
    }
}
