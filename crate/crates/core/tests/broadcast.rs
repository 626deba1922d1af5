//! Trace frames of broadcast environments checked exhaustively on small games.

use s5wd::broadcast::{
    build_card_game, derived_valuation, enabled_actions, environment_from_json, environment_to_json, generate_frame,
    initial_system, is_consistent, join, verify_hypercube_decomposition, BroadcastEnvironment, JointProtocol, Modeling,
    TraceFrame, VerifyMode,
};
use s5wd::formula::{expand_s, parse, wd_instance};
use s5wd::kripke::{check_equivalence, check_wd, connected_components, valid_on_model};
use s5wd::systems::{is_full, is_hypercube};

fn games() -> Vec<(String, BroadcastEnvironment, JointProtocol, usize)> {
    let mut out = Vec::new();
    for (deck, hand, modeling, depth) in [
        (2, 1, Modeling::Simple, 3),
        (3, 1, Modeling::Simple, 3),
        (3, 1, Modeling::Rich, 3),
        (4, 2, Modeling::Rich, 2),
    ] {
        let (env, p) = build_card_game(deck, hand, modeling).unwrap();
        out.push((format!("deck={deck},hand={hand},{modeling}"), env, p, depth));
    }
    out
}

fn all_pairs(tf: &TraceFrame, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..tf.len()).flat_map(move |a| (0..tf.len()).filter(move |&b| tf.related(i, a, b)).map(move |b| (a, b)))
}

#[test]
fn frames_are_weakly_directed_equivalence_frames() {
    for (name, env, p, depth) in games() {
        let tf = generate_frame(&env, &p, depth).unwrap();
        assert!(check_equivalence(&tf.frame), "{name}");
        assert!(check_wd(&tf.frame), "{name}");
        let m = derived_valuation(&env, &tf);
        let wd = wd_instance(&[parse("[1]has1_1", 2).unwrap(), parse("<2>~played2_2", 2).unwrap()]).unwrap();
        assert!(valid_on_model(&m, &expand_s(&wd, 2)).unwrap(), "{name}");
    }
}

#[test]
fn related_traces_have_equal_length() {
    for (name, env, p, depth) in games() {
        let tf = generate_frame(&env, &p, depth).unwrap();
        for i in 0..=env.n() {
            for (a, b) in all_pairs(&tf, i) {
                assert_eq!(tf.traces[a].len(), tf.traces[b].len(), "{name}");
            }
        }
        for comp in connected_components(&tf.frame) {
            let len = tf.traces[comp[0]].len();
            assert!(comp.iter().all(|&w| tf.traces[w].len() == len), "{name}");
        }
    }
}

#[test]
fn indistinguishable_traces_enable_the_same_actions() {
    for (name, env, p, depth) in games() {
        let tf = generate_frame(&env, &p, depth).unwrap();
        for i in 0..=env.n() {
            for (a, b) in all_pairs(&tf, i) {
                assert_eq!(
                    enabled_actions(&env, &p, &tf.traces[a], i).unwrap(),
                    enabled_actions(&env, &p, &tf.traces[b], i).unwrap(),
                    "{name}: agent {i}"
                );
            }
        }
    }
}

#[test]
fn joins_are_traces_with_the_expected_relations() {
    for (name, env, p, depth) in games().into_iter().filter(|g| g.1.is_homogeneous()) {
        let tf = generate_frame(&env, &p, depth.min(2)).unwrap();
        for a in 0..tf.len() {
            for b in 0..tf.len() {
                if tf.traces[a].action_sequence() != tf.traces[b].action_sequence() {
                    assert!(join(&tf.traces[a], &tf.traces[b], 1).is_err());
                    continue;
                }
                for i in 0..=env.n() {
                    let j = join(&tf.traces[a], &tf.traces[b], i).unwrap();
                    assert!(is_consistent(&env, &p, &j), "{name}");
                    let w = tf.index_of(&j).expect("join is a generated trace");
                    assert!(tf.related(i, w, b), "{name}");
                    for other in (0..=env.n()).filter(|&o| o != i) {
                        assert!(tf.related(other, w, a), "{name}");
                    }
                }
            }
        }
    }
}

#[test]
fn joins_need_homogeneous_initial_states() {
    let (env, p) = build_card_game(3, 1, Modeling::Rich).unwrap();
    let tf = generate_frame(&env, &p, 1).unwrap();
    let broken = (0..tf.len())
        .flat_map(|a| (0..tf.len()).map(move |b| (a, b)))
        .filter_map(|(a, b)| join(&tf.traces[a], &tf.traces[b], 1).ok())
        .any(|j| !is_consistent(&env, &p, &j));
    assert!(broken);
}

#[test]
fn components_decompose_into_products() {
    for (name, env, p, depth) in games() {
        let mode = if env.is_homogeneous() {
            VerifyMode::Hypercube
        } else {
            VerifyMode::Full
        };
        let tf = generate_frame(&env, &p, depth).unwrap();
        let report = verify_hypercube_decomposition(&env, &tf, mode);
        assert!(report.passed, "{name}: {report}");
        assert_eq!(report.components.len(), connected_components(&tf.frame).len(), "{name}");
        assert_eq!(
            report.components.iter().map(|c| c.size).sum::<usize>(),
            tf.len(),
            "{name}"
        );
    }
}

#[test]
fn initial_systems_match_the_modeling() {
    let (simple, _) = build_card_game(4, 2, Modeling::Simple).unwrap();
    let (rich, _) = build_card_game(4, 2, Modeling::Rich).unwrap();
    assert!(is_hypercube(&initial_system(&simple).unwrap()));
    let rich_system = initial_system(&rich).unwrap();
    assert!(is_full(&rich_system) && !is_hypercube(&rich_system));
}

#[test]
fn json_round_trip_preserves_the_frame() {
    for (name, env, p, depth) in games() {
        let (env2, p2) = environment_from_json(&environment_to_json(&env, &p)).unwrap();
        let a = generate_frame(&env, &p, depth).unwrap();
        let b = generate_frame(&env2, &p2, depth).unwrap();
        assert_eq!(a.traces, b.traces, "{name}");
        assert_eq!(a.frame, b.frame, "{name}");
        assert_eq!(derived_valuation(&env, &a), derived_valuation(&env2, &b), "{name}");
    }
}
