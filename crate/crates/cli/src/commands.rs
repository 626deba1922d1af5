use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use s5wd::broadcast::{
    build_card_game, derived_valuation, environment_from_json, environment_to_json, generate_frame,
    verify_hypercube_decomposition, BroadcastEnvironment, JointProtocol, Modeling, VerifyMode,
};
use s5wd::decide::{decide_satisfiability, decide_validity, verify_verdict, DecideOptions, Verdict};
use s5wd::filtration::filtrate;
use s5wd::formula::{formula_size, parse_with, subformula_closure, Syntax};
use s5wd::kripke::json::{
    frame_from_json, frame_to_json, model_from_json, model_to_json, world_map_from_json, world_map_to_json,
};
use s5wd::kripke::{
    check_model_p_morphism, check_p_morphism, connected_components, find_isomorphism, find_model_isomorphism,
    properties, satisfies, IsoBudget,
};
use s5wd::systems::{
    f_map_interpreted, frame_to_full_system, frame_to_hypercube, system_from_json, system_to_json, InterpretedSystem,
};
use s5wd::unpack::unpack_to_edi;
use s5wd::{print, Formula, Frame, Model, WorldMap};

use crate::args::{BroadcastCommand, Command, DecideMode, FormulaArgs, SimulateArgs, SystemKind};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: s5wd::Error },
    #[error(transparent)]
    Lib(#[from] s5wd::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

/// A command's report in both formats, and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { text, json, code: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn input<T>(path: &Path, load: impl FnOnce(&str) -> s5wd::Result<T>) -> Result<T> {
    load(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_model(path: &Path) -> Result<Model> {
    input(path, model_from_json)
}

fn load_frame(path: &Path) -> Result<Frame> {
    input(path, frame_from_json)
}

fn value(text: &str) -> Value {
    serde_json::from_str(text).expect("library emits valid JSON")
}

fn formula(args: &FormulaArgs, agents: usize) -> Result<Formula> {
    let syntax = Syntax {
        agents,
        allow_some: args.allow_s,
        allow_dist: args.allow_d,
    };
    Ok(parse_with(&args.formula, syntax)?)
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Parse { formula: f, n } => parse_cmd(f, *n),
        Command::Check {
            model,
            world,
            formula: f,
        } => check(model, world.as_deref(), f),
        Command::ValidateModel { model } => validate_model(model),
        Command::FrameProps { frame } => frame_props(frame),
        Command::Components { frame } => components(frame),
        Command::Iso { left, right, models } => iso(left, right, *models),
        Command::Pmorph {
            source,
            target,
            map,
            models,
        } => pmorph(source, target, map, *models),
        Command::ToSystem {
            frame,
            kind,
            out,
            emit_map,
        } => to_system(frame, *kind, out.as_deref(), emit_map.as_deref()),
        Command::FMap { system, out } => fmap(system, out.as_deref()),
        Command::Unpack {
            frame,
            x_size,
            out,
            emit_map,
        } => unpack(frame, *x_size, out.as_deref(), emit_map.as_deref()),
        Command::Filtrate {
            model,
            formula: f,
            out,
            emit_map,
        } => filtrate_cmd(model, f, out.as_deref(), emit_map.as_deref()),
        Command::Decide {
            formula: f,
            n,
            mode,
            max_worlds,
            class,
            max_models,
            witness,
        } => {
            let mut opts = DecideOptions {
                class: *class,
                ..DecideOptions::default()
            };
            if let Some(m) = max_models {
                opts.max_models = *m;
            }
            decide(f, *n, *mode, *max_worlds, opts, witness.as_deref())
        }
        Command::Broadcast {
            command: BroadcastCommand::Simulate(args),
        } => simulate(args),
    }
}

fn parse_cmd(args: &FormulaArgs, n: Option<usize>) -> Result<Outcome> {
    let f = formula(args, n.unwrap_or(usize::MAX))?;
    let printed = print(&f);
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let closure = subformula_closure(&f).len();
    let text = format!(
        "{printed}\nsize: {}\ndepth: {}\natoms: {}\nclosure: {closure}\n",
        formula_size(&f),
        f.depth(),
        atoms.join(", ")
    );
    let json = json!({
        "formula": printed,
        "size": formula_size(&f),
        "depth": f.depth(),
        "atoms": atoms,
        "max_agent": f.max_agent(),
        "closure_size": closure,
    });
    Ok(Outcome::ok(text, json))
}

fn check(model: &Path, world: Option<&str>, args: &FormulaArgs) -> Result<Outcome> {
    let m = load_model(model)?;
    let f = formula(args, m.frame().n())?;
    if let Some(name) = world {
        let w = m.frame().world(name)?;
        let holds = satisfies(&m, w, &f)?;
        return Ok(Outcome::ok(
            format!("{holds}\n"),
            json!({ "world": name, "holds": holds }),
        ));
    }
    let mut text = String::new();
    let mut per_world = BTreeMap::new();
    let mut valid = true;
    for w in 0..m.len() {
        let holds = satisfies(&m, w, &f)?;
        valid &= holds;
        writeln!(text, "{}: {holds}", m.frame().name(w)).unwrap();
        per_world.insert(m.frame().name(w).to_string(), holds);
    }
    writeln!(text, "valid: {valid}").unwrap();
    Ok(Outcome::ok(text, json!({ "holds": per_world, "valid": valid })))
}

fn validate_model(path: &Path) -> Result<Outcome> {
    let m = load_model(path)?;
    let props = properties(m.frame());
    let atoms: Vec<String> = m.atoms().into_iter().collect();
    let text = format!(
        "ok: n={}, {} worlds, atoms [{}], equivalence {}\n",
        m.frame().n(),
        m.len(),
        atoms.join(", "),
        props.equivalence
    );
    let json = json!({
        "n": m.frame().n(),
        "worlds": m.len(),
        "atoms": atoms,
        "equivalence": props.equivalence,
    });
    Ok(Outcome::ok(text, json))
}

fn frame_props(path: &Path) -> Result<Outcome> {
    let fr = load_frame(path)?;
    let p = properties(&fr);
    let rows = [
        ("E", p.equivalence),
        ("D", p.directed),
        ("I", p.identity_intersection),
        ("WD", p.weakly_directed),
        ("connected", p.components == 1),
    ];
    let mut text = String::new();
    for (name, v) in rows {
        writeln!(text, "{name:<10} {v}").unwrap();
    }
    writeln!(text, "{:<10} {}", "components", p.components).unwrap();
    let json = json!({
        "equivalence": p.equivalence,
        "directed": p.directed,
        "identity_intersection": p.identity_intersection,
        "weakly_directed": p.weakly_directed,
        "connected": p.components == 1,
        "components": p.components,
    });
    Ok(Outcome::ok(text, json))
}

fn components(path: &Path) -> Result<Outcome> {
    let fr = load_frame(path)?;
    let comps: Vec<Vec<String>> = connected_components(&fr)
        .into_iter()
        .map(|c| c.into_iter().map(|w| fr.name(w).to_string()).collect())
        .collect();
    let mut text = String::new();
    for (k, c) in comps.iter().enumerate() {
        writeln!(text, "component {} ({} worlds): {}", k + 1, c.len(), c.join(" ")).unwrap();
    }
    Ok(Outcome::ok(text, json!({ "components": comps })))
}

fn named_map(map: &WorldMap, source: &Frame, target: &Frame) -> BTreeMap<String, String> {
    map.to_named(source, target)
}

fn map_text(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(a, b)| format!("  {a} -> {b}\n")).collect()
}

fn iso(left: &Path, right: &Path, models: bool) -> Result<Outcome> {
    let (a, b, found) = if models {
        let (a, b) = (load_model(left)?, load_model(right)?);
        let found = find_model_isomorphism(&a, &b, IsoBudget::unbounded_size())?;
        (a.into_frame(), b.into_frame(), found)
    } else {
        let (a, b) = (load_frame(left)?, load_frame(right)?);
        let found = find_isomorphism(&a, &b, IsoBudget::unbounded_size())?;
        (a, b, found)
    };
    Ok(match found {
        Some(map) => {
            let named = named_map(&map, &a, &b);
            Outcome::ok(
                format!("isomorphic\n{}", map_text(&named)),
                json!({ "isomorphic": true, "map": named }),
            )
        }
        None => Outcome::ok("not isomorphic\n".into(), json!({ "isomorphic": false })),
    })
}

fn pmorph(source: &Path, target: &Path, map: &Path, models: bool) -> Result<Outcome> {
    let (src, tgt) = (load_model(source)?, load_model(target)?);
    let h = input(map, |t| world_map_from_json(t, src.frame(), tgt.frame()))?;
    let verdict = if models {
        check_model_p_morphism(&src, &tgt, &h)
    } else {
        check_p_morphism(src.frame(), tgt.frame(), &h)
    };
    Ok(match verdict {
        Ok(()) => Outcome::ok("p-morphism: true\n".into(), json!({ "p_morphism": true })),
        Err(v) => {
            let reason = v.describe(src.frame(), tgt.frame());
            Outcome::ok(
                format!("p-morphism: false\n{reason}\n"),
                json!({ "p_morphism": false, "violation": reason }),
            )
        }
    })
}

fn to_system(frame: &Path, kind: SystemKind, out: Option<&Path>, emit_map: Option<&Path>) -> Result<Outcome> {
    let m = load_model(frame)?;
    let (sys, map) = match kind {
        SystemKind::Full => frame_to_full_system(m.frame())?,
        SystemKind::Hypercube => frame_to_hypercube(m.frame())?,
    };
    let valuation = map.as_slice().iter().map(|&w| m.atoms_at(w).clone()).collect();
    let is = InterpretedSystem::new(sys, valuation)?;
    let sys_json = system_to_json(&is);
    let image = f_map_interpreted(&is);
    let map_json = world_map_to_json(&map, image.frame(), m.frame());
    if let Some(p) = out {
        write(p, &sys_json)?;
    }
    if let Some(p) = emit_map {
        write(p, &map_json)?;
    }
    let s = is.system();
    let axes: Vec<usize> = s.locals().iter().map(Vec::len).collect();
    let mut text = format!(
        "{} system: {} states, {} environment symbols, local states per agent {:?}\n",
        match kind {
            SystemKind::Full => "full",
            SystemKind::Hypercube => "hypercube",
        },
        s.len(),
        s.env().len(),
        axes
    );
    for k in 0..s.len() {
        writeln!(text, "  {} -> {}", s.state_name(k), m.frame().name(map.apply(k))).unwrap();
    }
    Ok(Outcome::ok(
        text,
        json!({ "system": value(&sys_json), "map": value(&map_json) }),
    ))
}

fn fmap(system: &Path, out: Option<&Path>) -> Result<Outcome> {
    let is = input(system, system_from_json)?;
    let m = f_map_interpreted(&is);
    let model_json = model_to_json(&m);
    if let Some(p) = out {
        write(p, &model_json)?;
    }
    let p = properties(m.frame());
    let text = format!(
        "{} worlds; D {}, I {}, WD {}, components {}\n",
        m.len(),
        p.directed,
        p.identity_intersection,
        p.weakly_directed,
        p.components
    );
    Ok(Outcome::ok(text, json!({ "model": value(&model_json) })))
}

fn unpack(frame: &Path, x_size: Option<usize>, out: Option<&Path>, emit_map: Option<&Path>) -> Result<Outcome> {
    let fr = load_frame(frame)?;
    let u = unpack_to_edi(&fr, x_size)?;
    let frame_json = frame_to_json(&u.frame);
    let map_json = world_map_to_json(&u.map, &u.frame, &fr);
    if let Some(p) = out {
        write(p, &frame_json)?;
    }
    if let Some(p) = emit_map {
        write(p, &map_json)?;
    }
    let p = properties(&u.frame);
    let text = format!(
        "unpacked {} worlds into {} (x_size {}); D {}, I {}\n",
        fr.len(),
        u.frame.len(),
        u.x_size,
        p.directed,
        p.identity_intersection
    );
    let json = json!({ "x_size": u.x_size, "frame": value(&frame_json), "map": value(&map_json) });
    Ok(Outcome::ok(text, json))
}

fn filtrate_cmd(model: &Path, args: &FormulaArgs, out: Option<&Path>, emit_map: Option<&Path>) -> Result<Outcome> {
    let m = load_model(model)?;
    let f = formula(args, m.frame().n())?;
    let fil = filtrate(&m, &f)?;
    let quotient_json = model_to_json(&fil.quotient);
    let map_json = world_map_to_json(&fil.projection, m.frame(), fil.quotient.frame());
    if let Some(p) = out {
        write(p, &quotient_json)?;
    }
    if let Some(p) = emit_map {
        write(p, &map_json)?;
    }
    let mut text = format!(
        "{} worlds -> {} classes over a closure of {} formulas\n",
        m.len(),
        fil.quotient.len(),
        fil.closure.len()
    );
    for (k, class) in fil.classes.iter().enumerate() {
        let members: Vec<&str> = class.iter().map(|&w| m.frame().name(w)).collect();
        writeln!(text, "  {}: {}", fil.quotient.frame().name(k), members.join(" ")).unwrap();
    }
    let json = json!({ "quotient": value(&quotient_json), "map": value(&map_json) });
    Ok(Outcome::ok(text, json))
}

fn decide(
    args: &FormulaArgs,
    n: usize,
    mode: DecideMode,
    max_worlds: usize,
    opts: DecideOptions,
    witness: Option<&Path>,
) -> Result<Outcome> {
    let f = formula(args, n)?;
    let verdict = match mode {
        DecideMode::Sat => decide_satisfiability(&f, n, max_worlds, opts)?,
        DecideMode::Valid => decide_validity(&f, n, max_worlds, opts)?,
    };
    verify_verdict(&verdict, &f, opts.class)?;
    let mut json = json!({ "verdict": verdict.label(), "class": opts.class.to_string() });
    if let Verdict::Unknown { bound_reached } = verdict {
        json["bound_reached"] = json!(bound_reached);
    }
    if let Some((model, world)) = verdict.witness() {
        let model_json = model_to_json(model);
        if let Some(p) = witness {
            write(p, &model_json)?;
        }
        json["world"] = json!(model.frame().name(world));
        json["model"] = value(&model_json);
    }
    let code = if verdict.is_decided() { 0 } else { 2 };
    Ok(Outcome {
        text: format!("{verdict}\n"),
        json,
        code,
    })
}

fn card_game(options: &str) -> Result<(BroadcastEnvironment, JointProtocol)> {
    let (mut deck, mut hand, mut modeling) = (4, 2, Modeling::Simple);
    for part in options.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("card game option `{part}` is not key=value")))?;
        let number = || {
            val.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("card game option `{key}` needs a number, got `{val}`")))
        };
        match key {
            "deck" => deck = number()?,
            "hand" => hand = number()?,
            "modeling" => modeling = val.parse()?,
            _ => return Err(CliError::Usage(format!("unknown card game option `{key}`"))),
        }
    }
    Ok(build_card_game(deck, hand, modeling)?)
}

fn simulate(args: &SimulateArgs) -> Result<Outcome> {
    let (env, p) = match (&args.env, &args.card_game) {
        (Some(path), _) => input(path, environment_from_json)?,
        (None, Some(options)) => card_game(options)?,
        (None, None) => return Err(CliError::Usage("one of --env or --card-game is required".into())),
    };
    let tf = generate_frame(&env, &p, args.depth)?;
    let mode = args.verify.unwrap_or(if env.is_homogeneous() {
        VerifyMode::Hypercube
    } else {
        VerifyMode::Full
    });
    let report = verify_hypercube_decomposition(&env, &tf, mode);
    if let Some(path) = &args.emit_frame {
        write(path, &model_to_json(&derived_valuation(&env, &tf)))?;
    }
    if let Some(path) = &args.emit_env {
        write(path, &environment_to_json(&env, &p))?;
    }
    let mut by_length: BTreeMap<usize, usize> = BTreeMap::new();
    for tr in &tf.traces {
        *by_length.entry(tr.len()).or_default() += 1;
    }
    let props = properties(&tf.frame);
    let lengths: Vec<String> = by_length.iter().map(|(l, c)| format!("{l}:{c}")).collect();
    let text = format!(
        "{} traces (by length {}); homogeneous {}; E {}, WD {}\n{report}",
        tf.len(),
        lengths.join(" "),
        env.is_homogeneous(),
        props.equivalence,
        props.weakly_directed
    );
    let json = json!({
        "traces": tf.len(),
        "by_length": by_length,
        "homogeneous": env.is_homogeneous(),
        "equivalence": props.equivalence,
        "weakly_directed": props.weakly_directed,
        "decomposition": report,
    });
    let code = if report.passed { 0 } else { 1 };
    Ok(Outcome { text, json, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn card_game_options() {
        let (env, _) = card_game("deck=3, hand=1,modeling=rich").unwrap();
        assert!(!env.is_homogeneous());
        assert!(card_game("").is_ok());
        assert!(matches!(card_game("deck"), Err(CliError::Usage(_))));
        assert!(matches!(card_game("deck=x"), Err(CliError::Usage(_))));
        assert!(matches!(card_game("colour=red"), Err(CliError::Usage(_))));
    }

    #[test]
    fn feature_switches_gate_operators() {
        let plain = FormulaArgs {
            formula: "D p".into(),
            allow_s: false,
            allow_d: false,
        };
        assert!(formula(&plain, 2).is_err());
        let with_d = FormulaArgs { allow_d: true, ..plain };
        assert_eq!(formula(&with_d, 2).unwrap(), Formula::dist(Formula::atom("p")));
    }
}
