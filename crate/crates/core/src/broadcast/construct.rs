use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::json::{AgentDoc, EnvironmentDoc, InitialDoc, ProtocolDoc, TransitionRowDoc, ValuationRowDoc};
use super::protocol::JointProtocol;
use super::BroadcastEnvironment;
use crate::error::{Error, Result};
use crate::systems::{is_hypercube, GlobalStateSystem};

/// Hand size of the original game; too large to enumerate.
pub const FULL_GAME_HAND_SIZE: usize = 12;

const MAX_DECK: usize = 16;
const NULL: &str = "eps";

/// How the environment's private state is modelled in the card game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modeling {
    /// The environment has the single state `1`.
    Simple,
    /// The environment tracks both decks and the face-up cards.
    Rich,
}

impl fmt::Display for Modeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modeling::Simple => "simple",
            Modeling::Rich => "rich",
        })
    }
}

impl FromStr for Modeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Modeling::Simple),
            "rich" => Ok(Modeling::Rich),
            _ => Err(Error::Invalid(format!("unknown modeling `{s}`"))),
        }
    }
}

type Cards = BTreeSet<usize>;

/// `{1,3}`.
pub fn card_set_name(cards: &BTreeSet<usize>) -> String {
    let parts: Vec<String> = cards.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn subsets_of_size(deck: usize, k: usize) -> Vec<Cards> {
    fn go(next: usize, deck: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Cards>) {
        if cur.len() == k {
            out.push(cur.iter().copied().collect());
            return;
        }
        for c in next..=deck {
            cur.push(c);
            go(c + 1, deck, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, deck, k, &mut Vec::new(), &mut out);
    out
}

fn at(n: usize, i: usize, sym: String) -> Option<Vec<Option<String>>> {
    let mut p = vec![None; n + 1];
    p[i] = Some(sym);
    Some(p)
}

fn keep_row() -> TransitionRowDoc {
    TransitionRowDoc {
        joint: None,
        internal: None,
        from: None,
        to: None,
    }
}

fn play(c: Option<usize>) -> String {
    card_set_name(&c.into_iter().collect())
}

/// `<D1,D2,f1,f2>`.
fn rich_name(p: &[Cards; 4]) -> String {
    let parts: Vec<String> = p.iter().map(card_set_name).collect();
    format!("<{}>", parts.join(","))
}

struct RichTables {
    states: Vec<String>,
    rows: Vec<TransitionRowDoc>,
    matches: Vec<String>,
}

/// Environment states reachable when both players play any card, with the
/// transition rows they need.
fn rich_tables(deck: usize, hands: &[Cards]) -> RichTables {
    let all: Cards = (1..=deck).collect();
    let mut seen: HashMap<[Cards; 4], usize> = HashMap::new();
    let mut states = Vec::new();
    let mut rows: BTreeMap<(String, String, usize), String> = BTreeMap::new();
    let mut visited = BTreeSet::new();
    let mut queue = VecDeque::new();
    let mut intern = |p: [Cards; 4], states: &mut Vec<[Cards; 4]>| -> usize {
        *seen.entry(p.clone()).or_insert_with(|| {
            states.push(p);
            states.len() - 1
        })
    };
    for h1 in hands {
        for h2 in hands {
            let p = [&all - h1, &all - h2, Cards::new(), Cards::new()];
            let k = intern(p, &mut states);
            queue.push_back((k, h1.clone(), h2.clone()));
        }
    }
    while let Some((k, h1, h2)) = queue.pop_front() {
        if !visited.insert((k, h1.clone(), h2.clone())) {
            continue;
        }
        let options = |h: &Cards| -> Vec<Option<usize>> {
            if h.is_empty() {
                vec![None]
            } else {
                h.iter().map(|&c| Some(c)).collect()
            }
        };
        for c1 in options(&h1) {
            for c2 in options(&h2) {
                let p = &states[k];
                let next = [
                    &p[0] | &p[2],
                    &p[1] | &p[3],
                    c1.into_iter().collect(),
                    c2.into_iter().collect(),
                ];
                let t = intern(next, &mut states);
                rows.insert((play(c1), play(c2), k), rich_name(&states[t]));
                let mut g1 = h1.clone();
                let mut g2 = h2.clone();
                c1.map(|c| g1.remove(&c));
                c2.map(|c| g2.remove(&c));
                queue.push_back((t, g1, g2));
            }
        }
    }
    let names: Vec<String> = states.iter().map(rich_name).collect();
    let rows = rows
        .into_iter()
        .map(|((a1, a2, k), to)| TransitionRowDoc {
            joint: Some(vec![Some(NULL.into()), Some(a1), Some(a2)]),
            internal: None,
            from: Some(names[k].clone()),
            to: Some(to),
        })
        .collect();
    let matches = states
        .iter()
        .zip(&names)
        .filter(|(p, _)| !p[2].is_empty() && p[2] == p[3])
        .map(|(_, name)| name.clone())
        .collect();
    RichTables {
        states: names,
        rows,
        matches,
    }
}

/// Two players, each dealt `hand_size` cards from their own deck of
/// `deck_size` cards, repeatedly play a card face up (or `{}` once the hand
/// is empty). Atoms: `has{i}_{c}`, `played{i}_{c}` and `face_up_matches`.
pub fn build_card_game(
    deck_size: usize,
    hand_size: usize,
    modeling: Modeling,
) -> Result<(BroadcastEnvironment, JointProtocol)> {
    if deck_size == 0 || deck_size > MAX_DECK {
        return Err(Error::Precondition(format!("deck size must be in 1..={MAX_DECK}")));
    }
    if hand_size > deck_size {
        return Err(Error::Precondition("hand size exceeds deck size".into()));
    }
    let n = 2;
    let hands = subsets_of_size(deck_size, hand_size);
    let held: Vec<Cards> = (0..=hand_size).flat_map(|k| subsets_of_size(deck_size, k)).collect();
    let held_names: Vec<String> = held.iter().map(card_set_name).collect();
    let hand_names: Vec<String> = hands.iter().map(card_set_name).collect();
    let plays: Vec<String> = std::iter::once(None)
        .chain((1..=deck_size).map(Some))
        .map(play)
        .collect();

    let player = |i: usize| {
        let mut transitions = Vec::new();
        for c in 1..=deck_size {
            for (h, name) in held.iter().zip(&held_names) {
                if h.contains(&c) {
                    let mut rest = h.clone();
                    rest.remove(&c);
                    transitions.push(TransitionRowDoc {
                        joint: at(n, i, play(Some(c))),
                        internal: None,
                        from: Some(name.clone()),
                        to: Some(card_set_name(&rest)),
                    });
                }
            }
        }
        transitions.push(keep_row());
        AgentDoc {
            external: plays.clone(),
            internal: vec![NULL.into()],
            private: held_names.clone(),
            transitions,
            protocol: ProtocolDoc::PlayAnyCard,
        }
    };

    let mut valuation = Vec::new();
    for i in 1..=n {
        for c in 1..=deck_size {
            for (h, name) in held.iter().zip(&held_names) {
                if h.contains(&c) {
                    valuation.push(ValuationRowDoc {
                        atom: format!("has{i}_{c}"),
                        actions: None,
                        private: at(n, i, name.clone()),
                    });
                }
            }
        }
    }
    for i in 1..=n {
        for c in 1..=deck_size {
            valuation.push(ValuationRowDoc {
                atom: format!("played{i}_{c}"),
                actions: at(n, i, play(Some(c))),
                private: None,
            });
        }
    }

    let (env_agent, initial) = match modeling {
        Modeling::Simple => {
            for c in 1..=deck_size {
                valuation.push(ValuationRowDoc {
                    atom: "face_up_matches".into(),
                    actions: Some(vec![None, Some(play(Some(c))), Some(play(Some(c)))]),
                    private: None,
                });
            }
            (
                AgentDoc {
                    external: vec![NULL.into()],
                    internal: vec![NULL.into()],
                    private: vec!["1".into()],
                    transitions: vec![keep_row()],
                    protocol: ProtocolDoc::Any,
                },
                InitialDoc::Homogeneous(vec![vec!["1".into()], hand_names.clone(), hand_names.clone()]),
            )
        }
        Modeling::Rich => {
            let tables = rich_tables(deck_size, &hands);
            for m in &tables.matches {
                valuation.push(ValuationRowDoc {
                    atom: "face_up_matches".into(),
                    actions: None,
                    private: at(n, 0, m.clone()),
                });
            }
            let all: Cards = (1..=deck_size).collect();
            let mut initial = Vec::new();
            for h1 in &hands {
                for h2 in &hands {
                    let p0 = [&all - h1, &all - h2, Cards::new(), Cards::new()];
                    initial.push(vec![rich_name(&p0), card_set_name(h1), card_set_name(h2)]);
                }
            }
            (
                AgentDoc {
                    external: vec![NULL.into()],
                    internal: vec![NULL.into()],
                    private: tables.states,
                    transitions: tables.rows,
                    protocol: ProtocolDoc::Any,
                },
                InitialDoc::Explicit(initial),
            )
        }
    };
    EnvironmentDoc {
        n,
        agents: vec![env_agent, player(1), player(2)],
        initial,
        valuation,
    }
    .into_environment()
}

/// All states initial, every action null, transitions the identity, and
/// each atom true exactly where `val` makes it true.
pub fn env_from_hypercube(h: &GlobalStateSystem, val: &[BTreeSet<String>]) -> Result<BroadcastEnvironment> {
    if !is_hypercube(h) {
        return Err(Error::Precondition("system is not a hypercube".into()));
    }
    if val.len() != h.len() {
        return Err(Error::Invalid(format!(
            "valuation has {} entries for {} states",
            val.len(),
            h.len()
        )));
    }
    let agent = |private: &[String]| AgentDoc {
        external: vec![NULL.into()],
        internal: vec![NULL.into()],
        private: private.to_vec(),
        transitions: vec![keep_row()],
        protocol: ProtocolDoc::Any,
    };
    let agents = (0..=h.n()).map(|k| agent(h.alphabet(k))).collect();
    let initial = InitialDoc::Homogeneous((0..=h.n()).map(|k| h.alphabet(k).to_vec()).collect());
    let mut valuation = Vec::new();
    for (k, atoms) in val.iter().enumerate() {
        let state = h.state(k);
        for atom in atoms {
            valuation.push(ValuationRowDoc {
                atom: atom.clone(),
                actions: None,
                private: Some(state.iter().cloned().map(Some).collect()),
            });
        }
    }
    let (env, _) = EnvironmentDoc {
        n: h.n(),
        agents,
        initial,
        valuation,
    }
    .into_environment()?;
    Ok(env)
}

/// The initial states as a system of global states, agent 0 supplying the
/// environment component.
pub fn initial_system(env: &BroadcastEnvironment) -> Result<GlobalStateSystem> {
    let init = env.initial_states();
    let mut used = vec![BTreeSet::new(); env.n() + 1];
    for s in &init {
        for (i, &p) in s.private.iter().enumerate() {
            used[i].insert(p);
        }
    }
    let alphabets: Vec<Vec<String>> = used
        .iter()
        .enumerate()
        .map(|(i, set)| set.iter().map(|&p| env.agent(i).private[p].clone()).collect())
        .collect();
    let states = init
        .iter()
        .map(|s| {
            s.private
                .iter()
                .enumerate()
                .map(|(i, &p)| env.agent(i).private[p].clone())
                .collect()
        })
        .collect();
    GlobalStateSystem::new(env.n(), alphabets[0].clone(), alphabets[1..].to_vec(), states)
}
