//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robofoil_core::compare::{filter_critical, AllocationFactor, FactorKind, FactorSet, ScheduleFactor};
use robofoil_core::domain::{coalition_satisfies, Cell, ProblemDomain, Site, SiteCategory};
use robofoil_core::explain::{explain_foil, format_minutes, ExplainConfig};
use robofoil_core::fixtures::{self, ModelError};
use robofoil_core::foil::{build_foil, FoilQuery};
use robofoil_core::motion::plan_path;
use robofoil_core::oracle::{bfs_distance, brute_force_optimum};
use robofoil_core::planner::{solve, Infeasibility};
use robofoil_core::scenario::{generate_scenario, RepairEdit, CATALOG};
use robofoil_core::wire::{EditWire, FoilChangeWire};
use robofoil_core::{percent_difference, render_percent, Error};
use robofoil_gateway::Session;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn minutes(m: f64) -> f64 {
    m * 60.0
}

fn speed_error_explanation() -> Outcome {
    for (s, f) in [(45.55, 63.4), (45.65, 63.22)] {
        let p = render_percent(percent_difference(minutes(s), minutes(f)));
        ensure(p == 32, || format!("({s}, {f}) renders {p}%"))?;
    }
    let d = fixtures::model_error(ModelError::SpeedError);
    let s = solve(&d).map_err(|e| e.to_string())?;
    let (d1, amb, dump) = (d.task_index("D1").unwrap(), d.robot_index("ambulance").unwrap(), d.robot_index("dumptruck").unwrap());
    ensure(s.allocation.coalition(d1) == vec![amb], || "system solution does not give D1 to the ambulance".into())?;
    let q = FoilQuery::reassign(&s.allocation, d1, &[dump]);
    let (outcome, _, e) = explain_foil(&d, &s, &q, &ExplainConfig::for_domain(&d)).map_err(|e| e.to_string())?;
    let foil = outcome.solution().ok_or("foil is infeasible")?;
    let line = "ambulance([2500, 1, 0]) and dumptruck([5000, 0, 1]) can work D1([600, 0, 0])";
    ensure(e.capability_lines == [line], || format!("capability lines {:?}", e.capability_lines))?;
    let headline = format!(
        "User's solution takes 32% more time: {} minutes→{} minutes",
        format_minutes(s.makespan()),
        format_minutes(foil.makespan())
    );
    ensure(e.plain_text.lines().any(|l| l == headline), || format!("no headline {headline:?} in\n{}", e.plain_text))?;
    let reveal = e.plain_text.lines().find(|l| l.contains("ambulance(40.0m/s)→dumptruck(4.0m/s)")).unwrap_or("none");
    Ok(format!("{headline}; {}", reveal.trim()))
}

/// An emergency-response layout where firetruck2 and B1 share a walled pocket in one corner.
fn walled_pocket() -> ProblemDomain {
    let mut d = fixtures::emergency_response(3);
    let inside = |c: Cell| c.x <= 4 && c.y <= 4;
    for x in 0..=5 {
        for y in 0..=5 {
            d.map.blocked.remove(&Cell::new(x, y));
        }
    }
    for i in 0..=5 {
        d.map.blocked.insert(Cell::new(5, i));
        d.map.blocked.insert(Cell::new(i, 5));
    }
    let ft2 = d.robot_index("firetruck2").unwrap();
    let b1 = d.task_index("B1").unwrap();
    let mut spare = (10..30).map(|x| Cell::new(x, 28)).filter(|c| !d.map.blocked.contains(c));
    for n in 0..d.n_robots() {
        if n != ft2 && inside(d.map.starts[n]) {
            d.map.starts[n] = spare.next().unwrap();
        }
    }
    for m in 0..d.n_tasks() {
        if m != b1 && inside(d.network.tasks[m].location) {
            d.network.tasks[m].location = spare.next().unwrap();
        }
    }
    d.map.starts[ft2] = Cell::new(1, 1);
    d.network.tasks[b1].location = Cell::new(3, 3);
    d
}

/// Independent confirmation that a reported cause really holds for A'.
fn cause_holds(d: &ProblemDomain, a: &robofoil_core::AllocationMatrix, cause: &Infeasibility) -> bool {
    match cause {
        Infeasibility::TraitViolation { task, .. } => {
            let coalition = a.coalition(*task);
            coalition.is_empty() || !coalition_satisfies(&d.ystar.rows[*task], &d.coalition_traits(&coalition)).unwrap()
        }
        Infeasibility::PrecedenceViolation { before, after } => {
            d.network.edges.contains(&(*before, *after)) && !a.is_allocated(*before) && a.is_allocated(*after)
        }
        Infeasibility::NoMotionPlan { task, robot } => {
            a.get(*task, *robot) && bfs_distance(&d.map, d.map.starts[*robot], d.network.tasks[*task].location).is_none()
        }
    }
}

fn feasibility_triad() -> Outcome {
    let d = fixtures::emergency_response(1);
    let s = solve(&d).map_err(|e| e.to_string())?;
    let idx = |t: &str| d.task_index(t).unwrap();
    let rob = |r: &str| d.robot_index(r).unwrap();

    let stretcher = build_foil(&d, &s, &FoilQuery::reassign(&s.allocation, idx("H1"), &[rob("dumptruck")])).unwrap();
    let aggregate = d.coalition_traits(&[rob("dumptruck")]);
    let expected = Infeasibility::TraitViolation { task: idx("H1"), requirement: d.ystar.rows[idx("H1")].clone(), aggregate };
    ensure(stretcher.cause() == Some(&expected), || format!("stretcher foil gave {:?}", stretcher.cause()))?;

    let c1 = idx("C1");
    let drop_camp = FoilQuery::reassign(&s.allocation, c1, &[]);
    let camp = build_foil(&d, &s, &drop_camp).unwrap();
    let expected = Infeasibility::PrecedenceViolation { before: c1, after: idx("H1") };
    ensure(camp.cause() == Some(&expected), || format!("camp foil gave {:?}", camp.cause()))?;

    let w = walled_pocket();
    let ws = solve(&w).map_err(|e| format!("walled pocket: {e}"))?;
    let b1 = w.task_index("B1").unwrap();
    let amb = w.robot_index("ambulance").unwrap();
    let walled = build_foil(&w, &ws, &FoilQuery::reassign(&ws.allocation, b1, &[amb])).unwrap();
    let expected = Infeasibility::NoMotionPlan { task: b1, robot: amb };
    ensure(walled.cause() == Some(&expected), || format!("walled foil gave {:?}", walled.cause()))?;

    let domains: Vec<ProblemDomain> = (0..4).map(fixtures::emergency_response).chain([w]).collect();
    let solutions: Vec<_> = domains.iter().map(|d| solve(d).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut found, mut tried) = (0, 0);
    let mut by_kind = [0usize; 3];
    while found < 200 {
        tried += 1;
        ensure(tried < 100_000, || "could not draw 200 infeasible foils".into())?;
        let k = rng.gen_range(0..domains.len());
        let (d, s) = (&domains[k], &solutions[k]);
        let mut q = FoilQuery::default();
        for _ in 0..rng.gen_range(1..=3) {
            let (robot, task) = (rng.gen_range(0..d.n_robots()), rng.gen_range(0..d.n_tasks()));
            q = if rng.gen_bool(0.5) { q.assign(robot, task) } else { q.unassign(robot, task) };
        }
        let out = build_foil(d, s, &q).map_err(|e| e.to_string())?;
        let Some(cause) = out.cause() else { continue };
        ensure(cause_holds(d, &out.allocation, cause), || format!("{cause:?} does not hold"))?;
        by_kind[match cause {
            Infeasibility::TraitViolation { .. } => 0,
            Infeasibility::PrecedenceViolation { .. } => 1,
            Infeasibility::NoMotionPlan { .. } => 2,
        }] += 1;
        found += 1;
    }
    Ok(format!(
        "3/3 scripted; 200/200 random classified (trait {}, precedence {}, motion {})",
        by_kind[0], by_kind[1], by_kind[2]
    ))
}

fn planner_optimality() -> Outcome {
    let mut solvable = 0;
    for seed in 0..100 {
        let d = fixtures::small_random(seed);
        ensure(d.n_tasks() * d.n_robots() <= 9, || format!("seed {seed} is too large"))?;
        let oracle = brute_force_optimum(&d).map_err(|e| e.to_string())?;
        match (solve(&d), oracle) {
            (Ok(s), Some((_, best))) => {
                ensure((s.makespan() - best).abs() <= 1e-9, || format!("seed {seed}: {} vs {best}", s.makespan()))?;
                solvable += 1;
            }
            (Err(Error::Unsolvable { .. }), None) => {}
            (got, want) => return Err(format!("seed {seed}: solver {got:?}, brute force {want:?}")),
        }
    }
    Ok(format!("100 instances, {solvable} solvable, all optimal"))
}

fn motion_oracle() -> Outcome {
    let mut reachable = 0;
    for seed in 0..500u64 {
        let map = fixtures::random_map(seed, 20, 20, 0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut free = || loop {
            let c = Cell::new(rng.gen_range(0..20), rng.gen_range(0..20));
            if map.is_free(c) {
                return c;
            }
        };
        let (a, b) = (free(), free());
        match (plan_path(&map, a, b), bfs_distance(&map, a, b)) {
            (Ok(p), Some(n)) if p.transitions() == n && p.is_valid_on(&map) => reachable += 1,
            (Err(Error::NoPath { .. }), None) => {}
            (got, want) => return Err(format!("seed {seed}: A* {got:?}, BFS {want:?}")),
        }
    }
    Ok(format!("500 maps, {reachable} reachable pairs, lengths equal"))
}

fn critical_filtering() -> Outcome {
    let z = robofoil_core::DEFAULT_Z;
    ensure(z == 0.1, || format!("default threshold is {z}"))?;
    let strategy = (prop::collection::vec(-3.0f64..3.0, 0..30), 0usize..5, 0.0f64..1.0);
    let mut runner = TestRunner::new(Config { cases: 512, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |(pds, moved, dz)| {
            let set = FactorSet {
                allocation: (0..moved).map(|m| AllocationFactor { task: m, system: vec![0], foil: vec![1] }).collect(),
                schedule: pds
                    .iter()
                    .enumerate()
                    .map(|(i, &pd)| ScheduleFactor { kind: FactorKind::TaskTime, subject: Some(i), system: 1.0, foil: 1.0, pd, critical: false })
                    .collect(),
            };
            let kept = filter_critical(&set, z);
            let subjects = |f: &FactorSet| f.schedule.iter().map(|x| x.subject).collect::<Vec<_>>();
            let expected: Vec<_> = set.schedule.iter().filter(|f| f.pd.abs() >= 0.1).map(|f| f.subject).collect();
            prop_assert_eq!(subjects(&kept), expected);
            prop_assert_eq!(&kept.allocation, &set.allocation);
            prop_assert_eq!(&filter_critical(&kept, z), &kept);
            let tighter = filter_critical(&set, z + dz);
            prop_assert!(subjects(&tighter).iter().all(|s| subjects(&kept).contains(s)));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("512 random factor sets".into())
}

fn scenario_lab() -> Outcome {
    let tuples: Vec<(usize, usize, usize)> = vec![(0, 0, 0), (3, 1, 1), (0, 0, 0), (2, 2, 1), (0, 5, 0), (3, 2, 0)];
    for (entry, want) in CATALOG.iter().zip(&tuples) {
        let truth = fixtures::emergency_response(entry.seed);
        let t = entry.tuple;
        ensure((t.robot, t.task, t.speed) == *want, || format!("{} has tuple {t:?}", entry.name))?;
        let sc = generate_scenario(&truth, t, entry.seed).map_err(|e| e.to_string())?;
        let got = (sc.injected.count(SiteCategory::Robot), sc.injected.count(SiteCategory::Task), sc.injected.count(SiteCategory::Speed));
        ensure(got == *want, || format!("{}: injected {got:?}", entry.name))?;

        let mut session = Session::create("0001".into(), &sc, None).map_err(|e| format!("{}: {e}", entry.name))?;
        for e in &sc.injected.entries {
            let edit = EditWire::from_edit(&sc.presented, RepairEdit { site: e.site, value: e.expected });
            session.patch_domain(edit).map_err(|e| e.to_string())?;
        }
        let m = session.finalize(robofoil_gateway::session::FinalVerdict::DeclaredCorrect).map_err(|e| e.to_string())?;
        ensure(
            m.rte_pct == 0.0 && m.tre_pct == 0.0 && m.rse_pct == 0.0 && m.extraneous_corrections == 0 && m.remaining.is_empty(),
            || format!("{}: perfect repair left {m:?}", entry.name),
        )?;
        ensure(session.solution.is_some(), || format!("{}: repaired domain has no solution", entry.name))?;
    }
    Ok("6 scenarios, cardinalities exact, perfect repair scores zero".into())
}

fn robofoil(data: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_robofoil"))
        .args(args)
        .env("ROBOFOIL_DATA", data)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("robofoil {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8(out.stdout).unwrap())
}

/// Counts wrong values site by site without going through the library's diff.
fn recount(presented: &ProblemDomain, truth: &ProblemDomain, log: &[EditWire]) -> (usize, usize) {
    let mut d = presented.clone();
    for e in log {
        let edit = e.resolve(&d).unwrap();
        d = d.with_value(edit.site, edit.value).unwrap();
    }
    let mut wrong = Vec::new();
    for n in 0..d.n_robots() {
        for k in 0..d.n_traits() {
            if d.q.rows[n].0[k] != truth.q.rows[n].0[k] {
                wrong.push(Site::RobotTrait { robot: n, trait_idx: k });
            }
        }
        if d.phi.0[n] != truth.phi.0[n] {
            wrong.push(Site::Speed { robot: n });
        }
    }
    for m in 0..d.n_tasks() {
        for k in 0..d.n_traits() {
            if d.ystar.rows[m].0[k] != truth.ystar.rows[m].0[k] {
                wrong.push(Site::TaskRequirement { task: m, trait_idx: k });
            }
        }
    }
    let injected: Vec<Site> = (0..presented.n_robots())
        .flat_map(|n| (0..presented.n_traits()).map(move |k| Site::RobotTrait { robot: n, trait_idx: k }))
        .chain((0..presented.n_tasks()).flat_map(|m| (0..presented.n_traits()).map(move |k| Site::TaskRequirement { task: m, trait_idx: k })))
        .chain((0..presented.n_robots()).map(|n| Site::Speed { robot: n }))
        .filter(|&s| presented.value(s) != truth.value(s))
        .collect();
    let corrected = injected.iter().filter(|s| !wrong.contains(s)).count();
    (wrong.len(), corrected)
}

fn gateway_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path();
    let created: Session = serde_json::from_str(&robofoil(data, &["session", "create", "--scenario", "s4"])?).unwrap();
    let id = created.id.clone();

    // Pick a foil that schedules: some robot joining a task it is not on.
    let d = created.domain().unwrap();
    let sys = created.system_solution(&d).unwrap().unwrap();
    let mut foil_file = None;
    'search: for m in 0..d.n_tasks() {
        for n in 0..d.n_robots() {
            if sys.allocation.get(m, n) {
                continue;
            }
            let q = FoilQuery::default().assign(n, m);
            if build_foil(&d, &sys, &q).unwrap().solution().is_some() {
                let wire = vec![FoilChangeWire { robot: d.robot_name(n).into(), task: d.task_name(m).into(), op: robofoil_core::foil::FoilOp::Assign }];
                let path = data.join("foil.json");
                fs::write(&path, serde_json::to_string(&wire).unwrap()).unwrap();
                foil_file = Some(path);
                break 'search;
            }
        }
    }
    let foil_file = foil_file.ok_or("no feasible single-robot foil")?;
    let record: serde_json::Value = serde_json::from_str(&robofoil(data, &["session", "foil", &id, foil_file.to_str().unwrap()])?).unwrap();
    ensure(record["outcome"]["feasible"] == true, || format!("foil outcome {record}"))?;

    // Two cell edits: fix one injected error, break one correct value.
    let sc = created.scenario().unwrap();
    let fix = &sc.injected.entries[0];
    let clean = sc.presented.sites().into_iter().find(|s| !sc.injected.sites().any(|i| i == *s) && matches!(s, Site::Speed { .. })).unwrap();
    let edits = [
        EditWire::from_edit(&sc.presented, RepairEdit { site: fix.site, value: fix.expected }),
        EditWire::from_edit(&sc.presented, RepairEdit { site: clean, value: sc.presented.value(clean).unwrap() + 1.0 }),
    ];
    for (i, e) in edits.iter().enumerate() {
        let path = data.join(format!("edit{i}.json"));
        fs::write(&path, serde_json::to_string(e).unwrap()).unwrap();
        robofoil(data, &["session", "patch", &id, path.to_str().unwrap()])?;
    }
    robofoil(data, &["session", "finalize", &id, "--verdict", "gave-up"])?;

    let file = data.join("sessions").join(format!("{id}.json"));
    let bytes = fs::read(&file).map_err(|e| e.to_string())?;
    let reloaded = Session::from_json(&bytes).map_err(|e| e.to_string())?;
    ensure(reloaded.to_json().as_bytes() == bytes.as_slice(), || "reload is not byte-identical".into())?;
    let shown = robofoil(data, &["session", "show", &id])?;
    ensure(shown.trim_end().as_bytes() == bytes.as_slice(), || "show differs from the stored file".into())?;
    ensure(reloaded.foil_history.len() == 1 && reloaded.repair_log.len() == 2, || "history lengths".into())?;

    let m = reloaded.metrics.clone().ok_or("no metrics after finalize")?;
    let (wrong, corrected) = recount(&sc.presented, &sc.truth, &reloaded.repair_log);
    let expect_remaining = sc.injected.len() - 1 + 1;
    ensure(
        m.repair_actions == 2 && m.remaining.len() == wrong && wrong == expect_remaining && m.corrected == corrected && corrected == 1,
        || format!("metrics {m:?} vs recount wrong={wrong} corrected={corrected}"),
    )?;
    let metrics_cli: serde_json::Value = serde_json::from_str(&robofoil(data, &["metrics", file.to_str().unwrap()])?).unwrap();
    ensure(metrics_cli[0]["metrics"]["repair_actions"] == 2, || format!("metrics command printed {metrics_cli}"))?;
    Ok(format!("session {id}: 1 foil, 2 edits, {wrong} remaining, reload byte-identical"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("Speed-error explanation", Duration::from_secs(1), speed_error_explanation),
        ("Feasibility triad", Duration::from_secs(10), feasibility_triad),
        ("Planner optimality oracle", Duration::from_secs(60), planner_optimality),
        ("Motion oracle", Duration::from_secs(30), motion_oracle),
        ("Critical filtering", Duration::from_secs(30), critical_filtering),
        ("Scenario lab", Duration::from_secs(30), scenario_lab),
        ("Gateway round trip", Duration::from_secs(30), gateway_round_trip),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= limit {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit:?}: {detail}"))
            }
        });
        match result {
            Ok(detail) => println!("PASS  {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
