use std::collections::VecDeque;

use super::{Frame, Model, Relation};
use crate::error::{Error, Result};

/// Components of the symmetric closure of the union of all relations, each
/// listed in increasing world order; components are ordered by least world.
pub fn connected_components(fr: &Frame) -> Vec<Vec<usize>> {
    let size = fr.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for r in fr.relations() {
        for (a, b) in r.pairs() {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    let mut comp = vec![usize::MAX; size];
    let mut out = Vec::new();
    for start in 0..size {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for &v in &adj[w] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// The subframe on `worlds` (given in the order they should appear).
pub fn restrict(fr: &Frame, worlds: &[usize]) -> Result<Frame> {
    if worlds.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let mut pos = vec![usize::MAX; fr.len()];
    for (k, &w) in worlds.iter().enumerate() {
        if w >= fr.len() {
            return Err(Error::UnknownWorld(format!("#{w}")));
        }
        pos[w] = k;
    }
    let names = worlds.iter().map(|&w| fr.name(w).to_string()).collect();
    let relations = fr
        .relations()
        .iter()
        .map(|r| {
            let mut pairs = Vec::new();
            for (k, &w) in worlds.iter().enumerate() {
                for &v in r.successors(w) {
                    if pos[v] != usize::MAX {
                        pairs.push((k, pos[v]));
                    }
                }
            }
            Relation::from_pairs(worlds.len(), pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    Frame::new(fr.n(), names, relations)
}

pub fn restrict_model(m: &Model, worlds: &[usize]) -> Result<Model> {
    let frame = restrict(m.frame(), worlds)?;
    let valuation = worlds.iter().map(|&w| m.atoms_at(w).clone()).collect();
    Model::new(frame, valuation)
}

/// Each component as a restricted model with its world subset.
pub fn component_models(m: &Model) -> Vec<(Model, Vec<usize>)> {
    connected_components(m.frame())
        .into_iter()
        .map(|ws| (restrict_model(m, &ws).expect("component is nonempty"), ws))
        .collect()
}

/// The component of `m` containing world `w`, and the index of `w` in it.
pub fn generated_submodel(m: &Model, w: usize) -> Result<(Model, usize)> {
    if w >= m.len() {
        return Err(Error::UnknownWorld(format!("#{w}")));
    }
    let comp = connected_components(m.frame())
        .into_iter()
        .find(|c| c.contains(&w))
        .expect("every world lies in a component");
    let at = comp.iter().position(|&v| v == w).expect("member");
    Ok((restrict_model(m, &comp)?, at))
}

/// Disjoint union; worlds are renamed `0:<name>` and `1:<name>`.
pub fn disjoint_union(a: &Frame, b: &Frame) -> Result<Frame> {
    if a.n() != b.n() {
        return Err(Error::AgentMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let shift = a.len();
    let size = shift + b.len();
    let names = a
        .worlds()
        .iter()
        .map(|w| format!("0:{w}"))
        .chain(b.worlds().iter().map(|w| format!("1:{w}")))
        .collect();
    let relations = (1..=a.n())
        .map(|i| {
            let pairs = a
                .relation(i)
                .pairs()
                .chain(b.relation(i).pairs().map(|(x, y)| (x + shift, y + shift)));
            Relation::from_pairs(size, pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    Frame::new(a.n(), names, relations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::find_isomorphism;
    use crate::kripke::valuation_from_pairs;

    fn chain() -> Frame {
        Frame::from_partitions(1, Frame::default_names(2), &[vec![vec![0, 1]]]).unwrap()
    }

    #[test]
    fn union_components_match_inputs() {
        let a = chain();
        let b = Frame::from_partitions(1, Frame::default_names(1), &[vec![vec![0]]]).unwrap();
        let u = disjoint_union(&a, &b).unwrap();
        assert_eq!(u.len(), 3);
        assert_eq!(u.worlds()[2], "1:w0");
        let comps = connected_components(&u);
        assert_eq!(comps, vec![vec![0, 1], vec![2]]);
        let first = restrict(&u, &comps[0]).unwrap();
        assert!(find_isomorphism(&first, &a, Default::default()).unwrap().is_some());
        assert!(u.related(1, 2, 2));
    }

    #[test]
    fn union_needs_same_agents() {
        let two = Frame::from_partitions(2, Frame::default_names(1), &[vec![vec![0]], vec![vec![0]]]).unwrap();
        assert_eq!(
            disjoint_union(&chain(), &two).unwrap_err(),
            Error::AgentMismatch { left: 1, right: 2 }
        );
    }

    #[test]
    fn components_use_symmetric_closure() {
        let fr = Frame::from_pairs(1, Frame::default_names(3), vec![vec![(2, 0)]]).unwrap();
        assert_eq!(connected_components(&fr), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn generated_submodel_of_second_component() {
        let u = disjoint_union(&chain(), &chain()).unwrap();
        let m = Model::new(u, valuation_from_pairs(4, &[(3, "p")])).unwrap();
        let (sub, at) = generated_submodel(&m, 3).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(at, 1);
        assert!(sub.holds(1, "p"));
        assert_eq!(sub.frame().name(0), "1:w0");
        assert!(generated_submodel(&m, 9).is_err());
        let (whole, _) = generated_submodel(&Model::new(chain(), valuation_from_pairs(2, &[])).unwrap(), 0).unwrap();
        assert_eq!(whole.len(), 2);
    }
}
