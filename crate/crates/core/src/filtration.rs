//! Filtration of an equivalence model through the subformulas of a formula
//! and their negations.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::formula::{print, subformula_closure, Formula, FormulaSet};
use crate::kripke::{check_equivalence, extension, Frame, Model, Relation, WorldMap};
use crate::systems::class_name;

#[derive(Debug, Clone)]
pub struct Filtration {
    pub source: Model,
    pub closure: FormulaSet,
    pub quotient: Model,
    /// `w -> [w]`.
    pub projection: WorldMap,
    /// Members of each class, ordered by least member.
    pub classes: Vec<Vec<usize>>,
}

/// Truth table of every closure member, one row per formula.
fn truth_table(m: &Model, closure: &FormulaSet) -> Result<Vec<(Formula, FixedBitSet)>> {
    closure.iter().map(|g| Ok((g.clone(), extension(m, g)?))).collect()
}

/// Classes of worlds that agree on every formula of `closure`, ordered by
/// least member.
pub fn world_equivalence(m: &Model, closure: &FormulaSet) -> Result<Vec<Vec<usize>>> {
    let table = truth_table(m, closure)?;
    Ok(group_by_signature(m.len(), &table))
}

fn group_by_signature(size: usize, table: &[(Formula, FixedBitSet)]) -> Vec<Vec<usize>> {
    let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for w in 0..size {
        let sig: Vec<bool> = table.iter().map(|(_, e)| e.contains(w)).collect();
        let next = classes.len();
        let k = *index.entry(sig).or_insert(next);
        if k == next {
            classes.push(Vec::new());
        }
        classes[k].push(w);
    }
    classes
}

/// Filtrates `m` through the closure of `f`. Agent `i` relates two classes
/// iff they agree on every `[i]a` and `<i>a` in the closure. The valuation
/// keeps only the atoms of `f`, read off the least member of each class.
pub fn filtrate(m: &Model, f: &Formula) -> Result<Filtration> {
    if f.contains_some() {
        return Err(Error::Unsupported(
            "`S` in a filtration formula; expand it first".into(),
        ));
    }
    if f.contains_dist() {
        return Err(Error::Unsupported("`D` in a filtration formula".into()));
    }
    f.check_agents(m.frame().n())?;
    if !check_equivalence(m.frame()) {
        return Err(Error::Precondition("model is not an equivalence model".into()));
    }
    let closure = subformula_closure(f);
    let table = truth_table(m, &closure)?;
    let classes = group_by_signature(m.len(), &table);
    let mut projection = vec![0; m.len()];
    for (k, class) in classes.iter().enumerate() {
        for &w in class {
            projection[w] = k;
        }
    }
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let n = m.frame().n();
    let relations = (1..=n)
        .map(|i| {
            let modal: Vec<&FixedBitSet> = table
                .iter()
                .filter(|(g, _)| matches!(g, Formula::Box(j, _) | Formula::Diamond(j, _) if *j == i))
                .map(|(_, e)| e)
                .collect();
            let mut groups: Vec<Vec<usize>> = Vec::new();
            let mut keys: HashMap<Vec<bool>, usize> = HashMap::new();
            for (k, &r) in reps.iter().enumerate() {
                let key: Vec<bool> = modal.iter().map(|e| e.contains(r)).collect();
                let next = groups.len();
                let g = *keys.entry(key).or_insert(next);
                if g == next {
                    groups.push(Vec::new());
                }
                groups[g].push(k);
            }
            Relation::from_partition(classes.len(), &groups)
        })
        .collect::<Result<Vec<_>>>()?;
    let names = classes.iter().map(|c| class_name(m.frame(), c)).collect();
    let atoms = f.atoms();
    let valuation: Vec<BTreeSet<String>> = reps
        .iter()
        .map(|&r| m.atoms_at(r).intersection(&atoms).cloned().collect())
        .collect();
    let quotient = Model::new(Frame::new(n, names, relations)?, valuation)?;
    Ok(Filtration {
        source: m.clone(),
        closure,
        quotient,
        projection: WorldMap::new(projection),
        classes,
    })
}

/// A failed suitability clause with its witness, by world index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuitabilityViolation {
    /// `w Ri u` in the source but `[w]` and `[u]` are unrelated.
    Lift { agent: usize, from: usize, to: usize },
    /// `[w1] Ri' [w2]` and `[i]a` holds at `w1` but `a` fails at `w2`.
    Box {
        agent: usize,
        from: usize,
        to: usize,
        formula: String,
    },
    /// `[w1] Ri' [w2]` and `a` holds at `w2` but `<i>a` fails at `w1`.
    Diamond {
        agent: usize,
        from: usize,
        to: usize,
        formula: String,
    },
}

impl fmt::Display for SuitabilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuitabilityViolation::Lift { agent, from, to } => write!(
                f,
                "clause 1 fails for agent {agent}: #{from} -> #{to} but their classes are unrelated"
            ),
            SuitabilityViolation::Box {
                agent,
                from,
                to,
                formula,
            } => write!(
                f,
                "clause 2 fails for agent {agent}: [{agent}]{formula} at #{from}, related class of #{to} falsifies it"
            ),
            SuitabilityViolation::Diamond {
                agent,
                from,
                to,
                formula,
            } => write!(
                f,
                "diamond clause fails for agent {agent}: {formula} at #{to} but <{agent}> of it fails at #{from}"
            ),
        }
    }
}

/// Checks that the quotient relation of agent `i` is suitable for the
/// source model and closure, by exhaustion over source worlds.
pub fn check_suitable(fil: &Filtration, i: usize) -> Result<(), SuitabilityViolation> {
    let src = &fil.source;
    let q = fil.quotient.frame().relation(i);
    let p = &fil.projection;
    for (w, u) in src.frame().relation(i).pairs() {
        if !q.contains(p.apply(w), p.apply(u)) {
            return Err(SuitabilityViolation::Lift {
                agent: i,
                from: w,
                to: u,
            });
        }
    }
    let ext = |g: &Formula| extension(src, g).expect("closure evaluates on the source");
    for g in &fil.closure {
        let (body, boxed) = match g {
            Formula::Box(j, a) if *j == i => (a.as_ref(), true),
            Formula::Diamond(j, a) if *j == i => (a.as_ref(), false),
            _ => continue,
        };
        let whole = ext(g);
        let inner = ext(body);
        for w1 in 0..src.len() {
            for w2 in 0..src.len() {
                if !q.contains(p.apply(w1), p.apply(w2)) {
                    continue;
                }
                if boxed && whole.contains(w1) && !inner.contains(w2) {
                    return Err(SuitabilityViolation::Box {
                        agent: i,
                        from: w1,
                        to: w2,
                        formula: print(body),
                    });
                }
                if !boxed && inner.contains(w2) && !whole.contains(w1) {
                    return Err(SuitabilityViolation::Diamond {
                        agent: i,
                        from: w1,
                        to: w2,
                        formula: print(body),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::kripke::valuation_from_pairs;
    use crate::kripke::{check_d, find_model_isomorphism, satisfies, IsoBudget};

    fn model(n: usize, size: usize, parts: &[Vec<Vec<usize>>], val: &[(usize, &str)]) -> Model {
        let fr = Frame::from_partitions(n, Frame::default_names(size), parts).unwrap();
        Model::new(fr, valuation_from_pairs(size, val)).unwrap()
    }

    fn six() -> Model {
        model(
            2,
            6,
            &[
                vec![vec![0, 1, 2], vec![3, 4, 5]],
                vec![vec![0, 3], vec![1, 4], vec![2, 5]],
            ],
            &[(0, "p"), (1, "p"), (4, "p"), (5, "q")],
        )
    }

    #[test]
    fn split_by_atom() {
        let m = six();
        let closure: FormulaSet = [parse("p", 2).unwrap(), parse("~p", 2).unwrap()].into();
        assert_eq!(
            world_equivalence(&m, &closure).unwrap(),
            vec![vec![0, 1, 4], vec![2, 3, 5]]
        );
    }

    #[test]
    fn bound_on_classes() {
        let f = parse("[1]p -> [2]p", 2).unwrap();
        let classes = world_equivalence(&six(), &subformula_closure(&f)).unwrap();
        assert!(classes.len() <= 1 << 4);
        let fil = filtrate(&six(), &f).unwrap();
        assert_eq!(fil.quotient.len(), classes.len());
    }

    #[test]
    fn truth_preserved_and_suitable() {
        let m = six();
        let f = parse("<1>[2]p -> [2]<1>(p & ~q)", 2).unwrap();
        let fil = filtrate(&m, &f).unwrap();
        for g in &fil.closure {
            for w in 0..m.len() {
                assert_eq!(
                    satisfies(&m, w, g).unwrap(),
                    satisfies(&fil.quotient, fil.projection.apply(w), g).unwrap(),
                    "{g} at {w}"
                );
            }
        }
        assert!(check_equivalence(fil.quotient.frame()));
        assert!(check_d(m.frame()) && check_d(fil.quotient.frame()));
        for i in 1..=2 {
            assert_eq!(check_suitable(&fil, i), Ok(()));
        }
    }

    #[test]
    fn trivial_quotients() {
        let one = model(1, 1, &[vec![vec![0]]], &[(0, "p")]);
        assert_eq!(filtrate(&one, &parse("[1]p", 1).unwrap()).unwrap().quotient.len(), 1);
        let flat = model(1, 3, &[vec![vec![0, 1, 2]]], &[(0, "p"), (1, "p"), (2, "p"), (1, "r")]);
        let fil = filtrate(&flat, &parse("p & [1]p", 1).unwrap()).unwrap();
        assert_eq!(fil.quotient.len(), 1);
        assert!(fil.quotient.frame().related(1, 0, 0));
        // atoms outside the formula are dropped
        assert_eq!(fil.quotient.atoms_at(0).len(), 1);
    }

    #[test]
    fn idempotent() {
        let f = parse("[1]p | <2>~p", 2).unwrap();
        let once = filtrate(&six(), &f).unwrap();
        let twice = filtrate(&once.quotient, &f).unwrap();
        assert!(
            find_model_isomorphism(&once.quotient, &twice.quotient, IsoBudget::default())
                .unwrap()
                .is_some()
        );
    }

    #[test]
    fn corrupted_quotients_are_caught() {
        let m = model(1, 2, &[vec![vec![0, 1]]], &[(0, "p")]);
        let f = parse("[1]p | p", 1).unwrap();
        let fil = filtrate(&m, &f).unwrap();
        assert_eq!(fil.quotient.len(), 2);
        let mut cut = fil.clone();
        let fr = Frame::from_partitions(1, cut.quotient.frame().worlds().to_vec(), &[vec![vec![0], vec![1]]]).unwrap();
        cut.quotient = Model::new(fr, cut.quotient.valuation().to_vec()).unwrap();
        assert!(matches!(
            check_suitable(&cut, 1),
            Err(SuitabilityViolation::Lift { .. })
        ));

        let m = model(1, 2, &[vec![vec![0], vec![1]]], &[(0, "p")]);
        let fil = filtrate(&m, &parse("[1]p", 1).unwrap()).unwrap();
        let mut joined = fil.clone();
        let fr = Frame::from_partitions(1, joined.quotient.frame().worlds().to_vec(), &[vec![vec![0, 1]]]).unwrap();
        joined.quotient = Model::new(fr, joined.quotient.valuation().to_vec()).unwrap();
        assert!(matches!(
            check_suitable(&joined, 1),
            Err(SuitabilityViolation::Box { .. })
        ));
    }

    #[test]
    fn rejected_inputs() {
        let m = six();
        assert!(matches!(
            filtrate(&m, &parse("S p", 2).unwrap()),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            filtrate(&m, &parse("D p", 2).unwrap()),
            Err(Error::Unsupported(_))
        ));
        let fr = Frame::from_pairs(1, Frame::default_names(2), vec![vec![(0, 1)]]).unwrap();
        let raw = Model::new(fr, vec![BTreeSet::new(); 2]).unwrap();
        assert!(matches!(
            filtrate(&raw, &parse("p", 1).unwrap()),
            Err(Error::Precondition(_))
        ));
    }
}
