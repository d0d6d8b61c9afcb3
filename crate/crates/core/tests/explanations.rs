use std::collections::BTreeSet;

use robofoil_core::compare::compare_allocations;
use robofoil_core::explain::{explain_foil, format_minutes, format_speed, format_value, ExplainConfig};
use robofoil_core::fixtures::{self, ModelError};
use robofoil_core::foil::FoilQuery;
use robofoil_core::planner::Infeasibility;
use robofoil_core::{render_percent, solve, ProblemDomain};

/// Numbers standing on their own, so the digits in names such as `D1` or `firetruck2` are skipped.
fn numerals(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let glued = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_');
        if chars[i].is_ascii_digit() && !glued {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(chars[start..i].iter().collect::<String>().trim_end_matches('.').to_string());
        } else {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            i += 1;
        }
    }
    out
}

fn domain_numerals(d: &ProblemDomain) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    for row in d.q.rows.iter().chain(&d.ystar.rows) {
        set.extend(row.0.iter().map(|&v| format_value(v)));
    }
    set.extend(d.phi.0.iter().map(|&v| format_speed(v)));
    set
}

fn cases() -> Vec<ProblemDomain> {
    let mut v: Vec<ProblemDomain> = (0..4).map(fixtures::emergency_response).collect();
    v.extend(ModelError::ALL.iter().map(|&r| fixtures::model_error(r)));
    v
}

#[test]
fn every_printed_number_comes_from_the_data() {
    let mut checked = 0;
    for d in cases() {
        let s = solve(&d).unwrap();
        let cfg = ExplainConfig::for_domain(&d);
        for task in 0..d.n_tasks() {
            for robot in 0..d.n_robots() {
                let q = FoilQuery::reassign(&s.allocation, task, &[robot]);
                if q.changes.is_empty() {
                    continue;
                }
                let (outcome, factors, e) = explain_foil(&d, &s, &q, &cfg).unwrap();
                let mut allowed = domain_numerals(&d);
                if let Some(f) = &factors {
                    for sf in &f.schedule {
                        allowed.insert(render_percent(sf.pd).to_string());
                    }
                    let foil = outcome.solution().unwrap();
                    allowed.insert(format_minutes(s.makespan()));
                    allowed.insert(format_minutes(foil.makespan()));
                }
                if let Some(Infeasibility::TraitViolation { aggregate, .. }) = outcome.cause() {
                    allowed.extend(aggregate.0.iter().map(|&v| format_value(v)));
                }
                for n in numerals(&e.plain_text) {
                    assert!(allowed.contains(&n), "{n:?} has no source in\n{}", e.plain_text);
                }

                // Capability lines track allocation changes one to one.
                let moved = compare_allocations(&s.allocation, &outcome.allocation).unwrap();
                assert_eq!(e.capability_lines.len(), moved.len());

                // A speed reveal only names robots whose speeds differ.
                for line in e.plain_text.lines().filter(|l| l.contains("m/s)→")) {
                    let tail = line.rsplit(": ").next().unwrap();
                    let (a, b) = tail.split_once('→').unwrap();
                    assert_ne!(a.split('(').nth(1), b.split('(').nth(1), "{line}");
                }

                assert_eq!(e, explain_foil(&d, &s, &q, &cfg).unwrap().2, "rendering is deterministic");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn numeral_scanner() {
    assert_eq!(numerals("firetruck1([1500, 0, 1]) can work D1([600, 0, 0])"), ["1500", "0", "1", "600", "0", "0"]);
    assert_eq!(numerals("takes 32% more time: 45.55 minutes→63.4 minutes."), ["32", "45.55", "63.4"]);
    assert_eq!(numerals("ambulance(40.0m/s)"), ["40.0"]);
}
