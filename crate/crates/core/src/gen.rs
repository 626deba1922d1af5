//! Random systems, models and formulas for property checks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::Formula;
use crate::kripke::{Frame, Model};
use crate::systems::GlobalStateSystem;

/// Operators a random formula may use besides the boolean connectives,
/// `[i]` and `<i>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormulaOps {
    pub some: bool,
    pub dist: bool,
}

/// A formula with between 1 and `max_nodes` syntax nodes over `atoms` and
/// agents `1..=n`.
pub fn random_formula(rng: &mut impl Rng, atoms: &[&str], n: usize, max_nodes: usize, ops: FormulaOps) -> Formula {
    let nodes = rng.gen_range(1..=max_nodes.max(1));
    formula_with_nodes(rng, atoms, n, nodes, ops)
}

fn formula_with_nodes(rng: &mut impl Rng, atoms: &[&str], n: usize, nodes: usize, ops: FormulaOps) -> Formula {
    if nodes <= 1 {
        return Formula::atom(*atoms.choose(rng).expect("at least one atom"));
    }
    let unary_kinds = 3 + usize::from(ops.some) + usize::from(ops.dist);
    if nodes == 2 || rng.gen_bool(0.5) {
        let inner = formula_with_nodes(rng, atoms, n, nodes - 1, ops);
        let agent = rng.gen_range(1..=n);
        let mut kind = rng.gen_range(0..unary_kinds);
        if kind >= 3 && !ops.some {
            kind += 1;
        }
        return match kind {
            0 => Formula::not(inner),
            1 => Formula::knows(agent, inner),
            2 => Formula::possible(agent, inner),
            3 => Formula::somebody(inner),
            _ => Formula::dist(inner),
        };
    }
    let left = rng.gen_range(1..nodes - 1);
    let a = formula_with_nodes(rng, atoms, n, left, ops);
    let b = formula_with_nodes(rng, atoms, n, nodes - 1 - left, ops);
    match rng.gen_range(0..4) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::implies(a, b),
        _ => Formula::iff(a, b),
    }
}

fn symbols(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|k| format!("{prefix}{k}")).collect()
}

/// `{1} x L1 x ... x Ln` with `1..=max_axis` local states per agent.
pub fn random_hypercube(rng: &mut impl Rng, n: usize, max_axis: usize) -> GlobalStateSystem {
    let locals = (1..=n)
        .map(|i| symbols(&format!("l{i}_"), rng.gen_range(1..=max_axis)))
        .collect();
    GlobalStateSystem::hypercube("1", locals).expect("valid hypercube")
}

/// Every tuple of local states occurs with one or more environment states
/// drawn from a pool of `max_env` symbols.
pub fn random_full_system(rng: &mut impl Rng, n: usize, max_axis: usize, max_env: usize) -> GlobalStateSystem {
    let locals: Vec<Vec<String>> = (1..=n)
        .map(|i| symbols(&format!("l{i}_"), rng.gen_range(1..=max_axis)))
        .collect();
    let pool = symbols("e", max_env.max(1));
    let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
    for l in &locals {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                l.iter().map(move |s| {
                    let mut t = t.clone();
                    t.push(s.clone());
                    t
                })
            })
            .collect();
    }
    let mut states = Vec::new();
    let mut used = BTreeSet::new();
    for t in tuples {
        let count = rng.gen_range(1..=pool.len());
        for e in pool.choose_multiple(rng, count) {
            used.insert(e.clone());
            let mut s = vec![e.clone()];
            s.extend(t.iter().cloned());
            states.push(s);
        }
    }
    let env = pool.into_iter().filter(|e| used.contains(e)).collect();
    GlobalStateSystem::new(n, env, locals, states).expect("valid full system")
}

/// Each atom holds at each world with probability 1/2.
pub fn random_valuation(rng: &mut impl Rng, size: usize, atoms: &[&str]) -> Vec<BTreeSet<String>> {
    (0..size)
        .map(|_| {
            atoms
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|a| a.to_string())
                .collect()
        })
        .collect()
}

/// An equivalence frame on `size` worlds with independently random
/// partitions.
pub fn random_equivalence_frame(rng: &mut impl Rng, n: usize, size: usize) -> Frame {
    let partitions: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|_| {
            let blocks = rng.gen_range(1..=size);
            let mut classes = vec![Vec::new(); blocks];
            for w in 0..size {
                classes[rng.gen_range(0..blocks)].push(w);
            }
            classes.retain(|c| !c.is_empty());
            classes
        })
        .collect();
    Frame::from_partitions(n, Frame::default_names(size), &partitions).expect("partitions cover the worlds")
}

pub fn random_equivalence_model(rng: &mut impl Rng, n: usize, size: usize, atoms: &[&str]) -> Model {
    let frame = random_equivalence_frame(rng, n, size);
    let valuation = random_valuation(rng, size, atoms);
    Model::new(frame, valuation).expect("one atom set per world")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::formula_size;
    use crate::kripke::check_equivalence;
    use crate::systems::{is_full, is_hypercube};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert!(is_hypercube(&random_hypercube(&mut rng, 3, 3)));
            assert!(is_full(&random_full_system(&mut rng, 2, 3, 3)));
            assert!(check_equivalence(&random_equivalence_frame(&mut rng, 2, 5)));
            let f = random_formula(&mut rng, &["p", "q"], 2, 4, FormulaOps::default());
            assert!(formula_size(&f) <= 4);
            assert!(!f.contains_some() && !f.contains_dist());
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_formula(
            &mut ChaCha8Rng::seed_from_u64(3),
            &["p"],
            2,
            9,
            FormulaOps { some: true, dist: true },
        );
        let b = random_formula(
            &mut ChaCha8Rng::seed_from_u64(3),
            &["p"],
            2,
            9,
            FormulaOps { some: true, dist: true },
        );
        assert_eq!(a, b);
    }
}
