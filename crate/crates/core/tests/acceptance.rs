//! The ten acceptance criteria. Each prints one pass/fail line.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use s5wd::broadcast::{
    build_card_game, derived_valuation, enabled_actions, env_from_hypercube, generate_frame, is_consistent, join,
    product_system, verify_hypercube_decomposition, JointProtocol, Modeling, VerifyMode,
};
use s5wd::decide::{
    decide_satisfiability, decide_validity, enumerate_frames, verify_verdict, DecideOptions, FrameClass, Verdict,
};
use s5wd::filtration::{check_suitable, filtrate};
use s5wd::formula::{catach_instance, enumerate_formulas, expand_s, formula_size, parse, wd_instance, Formula};
use s5wd::gen::{
    random_equivalence_model, random_formula, random_full_system, random_hypercube, random_valuation, FormulaOps,
};
use s5wd::kripke::{
    check_d, check_equivalence, check_i, check_p_morphism, check_wd, connected_components, disjoint_union,
    falsifying_valuation, find_isomorphism, find_model_isomorphism, is_connected, restrict, satisfies, valid_on_frame,
    valid_on_model, IsoBudget, Model, ValuationBudget,
};
use s5wd::systems::{f_map, f_map_interpreted, frame_to_hypercube, is_hypercube, InterpretedSystem};
use s5wd::unpack::unpack_to_edi;
use s5wd::Frame;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn f(text: &str) -> Formula {
    parse(text, 2).expect("formula parses")
}

fn sweep() -> Vec<Frame> {
    enumerate_frames(2, 4, FrameClass::E).expect("sweep enumerates")
}

fn frame_valid(fr: &Frame, g: &Formula) -> Result<bool, String> {
    valid_on_frame(fr, &expand_s(g, fr.n()), ValuationBudget::default()).map_err(|e| e.to_string())
}

fn s5_soundness() -> Outcome {
    let frames = sweep();
    let mut schemas = Vec::new();
    for phi in ["p", "~p", "<1>p", "[2]p"] {
        for psi in ["p", "~p", "<2>p"] {
            for i in 1..=2 {
                schemas.push(f(&format!(
                    "[{i}](({phi}) -> ({psi})) -> ([{i}]({phi}) -> [{i}]({psi}))"
                )));
            }
        }
        for i in 1..=2 {
            schemas.push(f(&format!("[{i}]({phi}) -> ({phi})")));
            schemas.push(f(&format!("[{i}]({phi}) -> [{i}][{i}]({phi})")));
            schemas.push(f(&format!("<{i}>({phi}) -> [{i}]<{i}>({phi})")));
        }
    }
    for fr in &frames {
        for g in &schemas {
            ensure(frame_valid(fr, g)?, || {
                format!("{} fails on {:?}", s5wd::print(g), fr.partitions())
            })?;
        }
    }
    Ok(format!("{} schema instances on {} frames", schemas.len(), frames.len()))
}

fn wd_schema() -> Formula {
    wd_instance(&[f("[1]p1"), f("[2]p2")]).expect("local arguments")
}

fn wd_correspondence() -> Outcome {
    let frames = sweep();
    let wd = wd_schema();
    let mut non_wd = 0;
    for fr in &frames {
        let structural = check_wd(fr);
        non_wd += usize::from(!structural);
        ensure(structural == frame_valid(fr, &wd)?, || {
            format!("mismatch on {:?}", fr.partitions())
        })?;
    }
    Ok(format!("{} frames, {non_wd} not weakly directed", frames.len()))
}

fn catach_correspondence() -> Outcome {
    let frames = sweep();
    let wd = wd_schema();
    let catach = catach_instance();
    for fr in &frames {
        ensure(frame_valid(fr, &catach)? == frame_valid(fr, &wd)?, || {
            format!("mismatch on {:?}", fr.partitions())
        })?;
    }
    Ok(format!("{} frames agree", frames.len()))
}

fn system_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let budget = IsoBudget::unbounded_size();
    for k in 0..200 {
        let n = rng.gen_range(1..=3);
        let h = random_hypercube(&mut rng, n, 3);
        let image = f_map(&h);
        ensure(check_equivalence(&image) && check_d(&image) && check_i(&image), || {
            format!("hypercube #{k} image is not EDI")
        })?;
        let (back, _) = frame_to_hypercube(&image).map_err(|e| e.to_string())?;
        let iso = find_isomorphism(&f_map(&back), &image, budget).map_err(|e| e.to_string())?;
        ensure(iso.is_some(), || format!("hypercube #{k} does not round-trip"))?;
    }
    for k in 0..200 {
        let n = rng.gen_range(1..=3);
        let s = random_full_system(&mut rng, n, 3, 3);
        let image = f_map(&s);
        // connectedness needs two agents: one agent's classes are the components
        ensure(check_equivalence(&image) && check_d(&image), || {
            format!("full system #{k} image is not ED")
        })?;
        ensure(n == 1 || is_connected(&image), || {
            format!("full system #{k} image is not connected")
        })?;
    }
    Ok("200 hypercubes and 200 full systems".into())
}

/// Falsifiable on the target implies falsifiable on the source: the
/// valuation pulled back through the map falsifies at every preimage.
fn transfer_holds(src: &Frame, tgt: &Frame, map: &[usize], g: &Formula) -> Result<bool, String> {
    let Some((model, world)) = falsifying_valuation(tgt, g, ValuationBudget::default()).map_err(|e| e.to_string())?
    else {
        return Ok(true);
    };
    let pulled: Vec<BTreeSet<String>> = map.iter().map(|&t| model.atoms_at(t).clone()).collect();
    let back = Model::new(src.clone(), pulled).map_err(|e| e.to_string())?;
    let pre = map.iter().position(|&t| t == world).ok_or("map is not surjective")?;
    Ok(!satisfies(&back, pre, g).map_err(|e| e.to_string())?)
}

fn unpacking() -> Outcome {
    let frames = enumerate_frames(2, 5, FrameClass::Ed).map_err(|e| e.to_string())?;
    let formulas = enumerate_formulas(&["p"], 2, 2);
    let mut largest = 0;
    for fr in &frames {
        let u = unpack_to_edi(fr, None).map_err(|e| e.to_string())?;
        largest = largest.max(u.frame.len());
        ensure(
            check_equivalence(&u.frame) && check_d(&u.frame) && check_i(&u.frame),
            || format!("unpacking of {:?} is not EDI", fr.partitions()),
        )?;
        check_p_morphism(&u.frame, fr, &u.map).map_err(|v| v.describe(&u.frame, fr))?;
        for g in &formulas {
            ensure(transfer_holds(&u.frame, fr, u.map.as_slice(), g)?, || {
                format!("{} does not transfer on {:?}", s5wd::print(g), fr.partitions())
            })?;
        }
    }
    Ok(format!(
        "{} ED frames, {} formulas, largest unpacking {largest} worlds",
        frames.len(),
        formulas.len()
    ))
}

fn filtration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ed_inputs = 0;
    for k in 0..300 {
        let size = rng.gen_range(1..=6);
        let m = random_equivalence_model(&mut rng, 2, size, &["p", "q"]);
        let g = random_formula(&mut rng, &["p", "q"], 2, 4, FormulaOps::default());
        let size_g = formula_size(&g);
        ensure(size_g <= 4, || {
            format!("generated formula too large: {}", s5wd::print(&g))
        })?;
        let fil = filtrate(&m, &g).map_err(|e| e.to_string())?;
        for a in &fil.closure {
            for w in 0..m.len() {
                let here = satisfies(&m, w, a).map_err(|e| e.to_string())?;
                let there = satisfies(&fil.quotient, fil.projection.apply(w), a).map_err(|e| e.to_string())?;
                ensure(here == there, || {
                    format!("case {k}: {} differs at w{w}", s5wd::print(a))
                })?;
            }
        }
        ensure(fil.quotient.len() <= 1 << size_g, || {
            format!("case {k}: quotient too large")
        })?;
        if check_d(m.frame()) {
            ed_inputs += 1;
            ensure(check_d(fil.quotient.frame()), || format!("case {k}: directedness lost"))?;
        }
        for i in 1..=2 {
            check_suitable(&fil, i).map_err(|v| format!("case {k}: {v}"))?;
        }
    }
    Ok(format!("300 models, {ed_inputs} directed"))
}

fn decision() -> Outcome {
    let class_e = DecideOptions {
        class: FrameClass::E,
        ..DecideOptions::default()
    };
    let neg = f("<1>[2]p & ~[2]<1>p");
    let v = decide_satisfiability(&neg, 2, 4, class_e).map_err(|e| e.to_string())?;
    let Verdict::Satisfiable { model, world } = &v else {
        return Err(format!("negated Catach: {v}"));
    };
    ensure(
        model.len() == 3 && satisfies(model, *world, &neg).unwrap_or(false),
        || "negated Catach witness does not verify".into(),
    )?;
    verify_verdict(&v, &neg, FrameClass::E).map_err(|e| e.to_string())?;

    for args in [["[1]p", "[2]q"], ["[1]p", "[2]~p"], ["<1>p", "~[2]q"]] {
        let wd = wd_instance(&[f(args[0]), f(args[1])]).map_err(|e| e.to_string())?;
        let v = decide_validity(&wd, 2, 4, DecideOptions::default()).map_err(|e| e.to_string())?;
        ensure(!matches!(v, Verdict::CounterModel { .. }), || {
            format!("WD instance refuted: {v}")
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut decided = 0;
    for k in 0..100 {
        let g = random_formula(
            &mut rng,
            &["p", "q"],
            2,
            6,
            FormulaOps {
                some: true,
                dist: false,
            },
        );
        let opts = DecideOptions::default();
        let valid = decide_validity(&g, 2, 3, opts).map_err(|e| e.to_string())?;
        let sat = decide_satisfiability(&Formula::not(g.clone()), 2, 3, opts).map_err(|e| e.to_string())?;
        let dual = match (&valid, &sat) {
            (Verdict::Valid, Verdict::Unsatisfiable) => true,
            (Verdict::CounterModel { model: a, world: x }, Verdict::Satisfiable { model: b, world: y }) => {
                a == b && x == y
            }
            (Verdict::Unknown { .. }, Verdict::Unknown { .. }) => true,
            _ => false,
        };
        ensure(dual, || format!("case {k}: {valid} vs {sat} for {}", s5wd::print(&g)))?;
        decided += usize::from(valid.is_decided());
        verify_verdict(&valid, &g, opts.class).map_err(|e| format!("case {k}: {e}"))?;
        verify_verdict(&sat, &Formula::not(g), opts.class).map_err(|e| format!("case {k}: {e}"))?;
    }
    Ok(format!("3-world witness found, 100 dual pairs ({decided} decided)"))
}

fn broadcast() -> Outcome {
    let (env, p) = build_card_game(4, 2, Modeling::Simple).map_err(|e| e.to_string())?;
    let tf = generate_frame(&env, &p, 3).map_err(|e| e.to_string())?;
    let first: Vec<usize> = (0..tf.len()).filter(|&w| tf.traces[w].len() == 1).collect();
    ensure(first.len() == 36, || format!("{} length-1 traces", first.len()))?;
    let comps = connected_components(&tf.frame);
    ensure(comps.contains(&first), || {
        "length-1 traces are not one component".into()
    })?;
    let cube = product_system(&env, &tf, &first).map_err(|e| e.to_string())?;
    ensure(is_hypercube(&cube), || "depth-1 product is not a hypercube".into())?;
    let report = verify_hypercube_decomposition(&env, &tf, VerifyMode::Hypercube);
    ensure(report.passed, || report.to_string())?;

    let m = derived_valuation(&env, &tf);
    let wd_args = [
        ["[1]has1_1", "[2]has2_2"],
        ["<1>~has1_3", "[2](has2_1 | has2_4)"],
        ["[1]played2_1", "~[2]has2_3"],
    ];
    for args in wd_args {
        let wd = wd_instance(&[f(args[0]), f(args[1])]).map_err(|e| e.to_string())?;
        let holds = valid_on_model(&m, &expand_s(&wd, 2)).map_err(|e| e.to_string())?;
        ensure(holds, || format!("WD instance fails: {}", s5wd::print(&wd)))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let worlds: Vec<usize> = (0..tf.len()).collect();
    for k in 0..200 {
        let i = rng.gen_range(0..=2);
        let a = *worlds.choose(&mut rng).expect("nonempty");
        let peers: Vec<usize> = worlds.iter().copied().filter(|&b| tf.related(i, a, b)).collect();
        let b = *peers.choose(&mut rng).expect("reflexive");
        let ea = enabled_actions(&env, &p, &tf.traces[a], i).map_err(|e| e.to_string())?;
        let eb = enabled_actions(&env, &p, &tf.traces[b], i).map_err(|e| e.to_string())?;
        ensure(ea == eb, || format!("pair {k}: enabled actions of agent {i} differ"))?;
    }
    for k in 0..200 {
        let i = rng.gen_range(0..=2);
        let a = *worlds.choose(&mut rng).expect("nonempty");
        let same: Vec<usize> = worlds
            .iter()
            .copied()
            .filter(|&b| tf.traces[b].action_sequence() == tf.traces[a].action_sequence())
            .collect();
        let b = *same.choose(&mut rng).expect("reflexive");
        let j = join(&tf.traces[a], &tf.traces[b], i).map_err(|e| e.to_string())?;
        ensure(is_consistent(&env, &p, &j), || format!("join {k} does not replay"))?;
        let w = tf.index_of(&j).ok_or_else(|| format!("join {k} is not a world"))?;
        ensure(tf.related(i, w, b), || {
            format!("join {k} not ~{i} to its right argument")
        })?;
        for other in (0..=2).filter(|&o| o != i) {
            ensure(tf.related(other, w, a), || {
                format!("join {k} not ~{other} to its left argument")
            })?;
        }
    }
    Ok(format!(
        "{} traces, {} components, 200 enabled-set pairs, 200 joins",
        tf.len(),
        report.components.len()
    ))
}

fn hypercube_environment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let atoms = ["p", "q"];
    for k in 0..50 {
        let n = rng.gen_range(1..=3);
        let h = random_hypercube(&mut rng, n, 3);
        let val = random_valuation(&mut rng, h.len(), &atoms);
        let env = env_from_hypercube(&h, &val).map_err(|e| e.to_string())?;
        let tf = generate_frame(&env, &JointProtocol::any(n), 1).map_err(|e| e.to_string())?;
        let initial = derived_valuation(&env, &tf);
        let target = f_map_interpreted(&InterpretedSystem::new(h.clone(), val).map_err(|e| e.to_string())?);
        let iso = find_model_isomorphism(&initial, &target, IsoBudget::unbounded_size())
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("hypercube #{k}: no isomorphism"))?;
        for _ in 0..20 {
            let g = random_formula(&mut rng, &atoms, n, 7, FormulaOps { some: true, dist: true });
            for w in 0..initial.len() {
                let a = satisfies(&initial, w, &g).map_err(|e| e.to_string())?;
                let b = satisfies(&target, iso.apply(w), &g).map_err(|e| e.to_string())?;
                ensure(a == b, || format!("hypercube #{k}: {} differs", s5wd::print(&g)))?;
            }
        }
    }
    Ok("50 hypercubes x 20 formulas".into())
}

fn negative_correspondence() -> Outcome {
    let row_diagonal = Frame::from_partitions(
        2,
        Frame::default_names(4),
        &[vec![vec![0, 2], vec![1, 3]], vec![vec![0, 3], vec![1, 2]]],
    )
    .map_err(|e| e.to_string())?;
    let cluster = Frame::from_partitions(2, Frame::default_names(2), &[vec![vec![0, 1]], vec![vec![0, 1]]])
        .map_err(|e| e.to_string())?;
    ensure(
        check_equivalence(&row_diagonal) && check_d(&row_diagonal) && check_i(&row_diagonal),
        || "row/diagonal frame is not EDI".into(),
    )?;
    ensure(!check_i(&cluster), || "cluster satisfies I".into())?;
    let map = s5wd::WorldMap::new(vec![0, 0, 1, 1]);
    check_p_morphism(&row_diagonal, &cluster, &map).map_err(|v| v.to_string())?;

    let directed = restrict(&row_diagonal, &[0, 1, 2, 3]).map_err(|e| e.to_string())?;
    let union = disjoint_union(&directed, &cluster).map_err(|e| e.to_string())?;
    ensure(check_d(&directed) && check_d(&cluster), || {
        "parts are not directed".into()
    })?;
    ensure(!check_d(&union) && check_wd(&union), || {
        "disjoint union misclassified".into()
    })?;
    Ok("I and directedness non-correspondence reproduced".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("1 S5 soundness sweep", s5_soundness),
        ("2 WD correspondence", wd_correspondence),
        ("3 Catach correspondence", catach_correspondence),
        ("4 hypercube and full-system round trips", system_round_trips),
        ("5 unpacking to EDI", unpacking),
        ("6 filtration", filtration),
        ("7 decision procedure", decision),
        ("8 broadcast decomposition", broadcast),
        ("9 environment from hypercube", hypercube_environment),
        ("10 negative correspondence", negative_correspondence),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                println!("FAIL  {name} ({secs:.1}s): {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
