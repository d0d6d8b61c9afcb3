//! Natural-language rendering of critical factors and infeasibility causes.
//!
//! Output layout:
//!
//! ```text
//! Task and Robot Capabilities Comparison:
//!   • ambulance([2500, 1, 0]) and dumptruck([5000, 0, 1]) can work D1([600, 0, 0])
//! User's solution takes 32% more time: 45.55 minutes→63.4 minutes
//!   • dumptruck takes 32% more time
//!     • D1 takes 154% more time: ambulance(40.0m/s)→dumptruck(4.0m/s)
//! ```
//!
//! The header line only appears when capability lines and a schedule block are both present.

use serde::{Deserialize, Serialize};

use crate::compare::{
    compare, compare_allocations, filter_critical, render_percent, AllocationFactor, FactorKind,
    FactorSet, PercentFormula, DEFAULT_Z,
};
use crate::domain::{ProblemDomain, TraitVector};
use crate::error::{Error, Result};
use crate::fixtures::{ARM, CAPACITY, FORKLIFT};
use crate::foil::{build_foil, FoilOutcome, FoilQuery};
use crate::planner::{Infeasibility, Solution};

pub const CAPABILITY_HEADER: &str = "Task and Robot Capabilities Comparison:";
const BULLET: &str = "  • ";
const SUB_BULLET: &str = "    • ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainConfig {
    /// Traits shown in capability lines, in any order (rendered in domain order). `None` shows
    /// every trait.
    pub capability_traits: Option<Vec<String>>,
    pub z: f64,
    pub formula: PercentFormula,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            capability_traits: Some(vec![CAPACITY.into(), ARM.into(), FORKLIFT.into()]),
            z: DEFAULT_Z,
            formula: PercentFormula::Symmetric,
        }
    }
}

impl ExplainConfig {
    /// Capacity/arm/forklift when the domain declares them, otherwise every trait.
    pub fn for_domain(d: &ProblemDomain) -> Self {
        let cfg = ExplainConfig::default();
        let known = cfg
            .capability_traits
            .as_ref()
            .is_some_and(|names| names.iter().all(|n| d.trait_index(n).is_some()));
        if known {
            cfg
        } else {
            ExplainConfig { capability_traits: None, ..cfg }
        }
    }

    fn trait_subset(&self, d: &ProblemDomain) -> Vec<String> {
        self.capability_traits
            .clone()
            .unwrap_or_else(|| d.traits.iter().map(|t| t.name.clone()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub capability_lines: Vec<String>,
    pub schedule_block: Option<String>,
    pub cause_line: Option<String>,
    /// S and S' differ by less than the threshold everywhere.
    pub equivalent: bool,
    pub plain_text: String,
}

impl Explanation {
    fn assemble(
        capability_lines: Vec<String>,
        schedule_block: Option<String>,
        cause_line: Option<String>,
        equivalent: bool,
    ) -> Self {
        let mut parts: Vec<String> = Vec::new();
        if !capability_lines.is_empty() && schedule_block.is_some() {
            parts.push(CAPABILITY_HEADER.to_string());
        }
        parts.extend(capability_lines.iter().map(|l| format!("{BULLET}{l}")));
        parts.extend(cause_line.iter().cloned());
        parts.extend(schedule_block.iter().cloned());
        Explanation { plain_text: parts.join("\n"), capability_lines, schedule_block, cause_line, equivalent }
    }
}

/// Integers without a decimal point, everything else in shortest form.
pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Speeds keep at least one decimal: `40.0`, `7.5`.
pub fn format_speed(v: f64) -> String {
    format!("{v:?}")
}

/// Seconds as minutes with two decimals and trailing zeros trimmed: `63.4`, `45.55`, `12`.
pub fn format_minutes(seconds: f64) -> String {
    let s = format!("{:.2}", seconds / 60.0);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn format_vector(v: &TraitVector, indices: &[usize]) -> String {
    let body: Vec<String> = indices.iter().map(|&u| format_value(v.0[u])).collect();
    format!("[{}]", body.join(", "))
}

fn subset_indices(d: &ProblemDomain, trait_subset: &[String]) -> Result<Vec<usize>> {
    let mut idx = trait_subset
        .iter()
        .map(|n| d.trait_index(n).ok_or_else(|| Error::invalid(format!("unknown trait {n:?}"))))
        .collect::<Result<Vec<_>>>()?;
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

fn task_ref(d: &ProblemDomain, task: usize) -> String {
    let t = &d.network.tasks[task];
    match &t.label {
        Some(label) if label != &t.name => format!("{} ({})", t.name, label),
        _ => t.name.clone(),
    }
}

fn describe(pd: f64) -> String {
    let p = render_percent(pd);
    if pd > 0.0 {
        format!("takes {p}% more time")
    } else if pd < 0.0 {
        format!("takes {p}% less time")
    } else {
        "takes the same time".to_string()
    }
}

/// "`<robots>` can work `<task>`" with the chosen traits of each robot and the task requirement.
pub fn render_capability_line(factor: &AllocationFactor, d: &ProblemDomain, trait_subset: &[String]) -> Result<String> {
    let idx = subset_indices(d, trait_subset)?;
    if factor.task >= d.n_tasks() {
        return Err(Error::invalid(format!("task index {} out of range", factor.task)));
    }
    let mut robots: Vec<usize> = Vec::new();
    for &n in factor.system.iter().chain(&factor.foil) {
        if n >= d.n_robots() {
            return Err(Error::invalid(format!("robot index {n} out of range")));
        }
        if !robots.contains(&n) {
            robots.push(n);
        }
    }
    let members: Vec<String> = robots
        .iter()
        .map(|&n| format!("{}({})", d.robot_name(n), format_vector(&d.q.rows[n], &idx)))
        .collect();
    Ok(format!(
        "{} can work {}({})",
        members.join(" and "),
        d.task_name(factor.task),
        format_vector(&d.ystar.rows[factor.task], &idx)
    ))
}

fn speed_list(d: &ProblemDomain, coalition: &[usize]) -> String {
    coalition
        .iter()
        .map(|&n| format!("{}({}m/s)", d.robot_name(n), format_speed(d.phi.0[n])))
        .collect::<Vec<_>>()
        .join(" and ")
}

fn sorted_speeds(d: &ProblemDomain, coalition: &[usize]) -> Vec<f64> {
    let mut v: Vec<f64> = coalition.iter().map(|&n| d.phi.0[n]).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Headline on overall makespan, one bullet per robot with a critical finishing-time change,
/// and under it the critical task-time changes of the tasks it works in the foil.
pub fn render_schedule_block(factors: &FactorSet, d: &ProblemDomain, system: &Solution, foil: &Solution) -> String {
    let critical: Vec<_> = factors.schedule.iter().filter(|f| f.critical).collect();
    if critical.is_empty() {
        return "User's solution takes about the same time".to_string();
    }
    let (sys_ms, foil_ms) = (system.makespan(), foil.makespan());
    let mut lines = Vec::new();
    match critical.iter().find(|f| f.kind == FactorKind::Makespan) {
        Some(f) => lines.push(format!(
            "User's solution {}: {} minutes→{} minutes",
            describe(f.pd),
            format_minutes(f.system),
            format_minutes(f.foil)
        )),
        None => lines.push(format!(
            "User's solution takes about the same time: {} minutes→{} minutes",
            format_minutes(sys_ms),
            format_minutes(foil_ms)
        )),
    }
    let crit = |kind, subject| critical.iter().find(|f| f.kind == kind && f.subject == Some(subject));
    for n in 0..d.n_robots() {
        let mut tasks = foil.allocation.tasks_of(n);
        tasks.sort_by(|&a, &b| {
            let (wa, wb) = (&foil.schedule.windows[a], &foil.schedule.windows[b]);
            wa.start_s.total_cmp(&wb.start_s).then(a.cmp(&b))
        });
        let children: Vec<String> = tasks
            .into_iter()
            .filter_map(|m| crit(FactorKind::TaskTime, m).map(|f| (m, f)))
            .map(|(m, f)| {
                let mut line = format!("{SUB_BULLET}{} {}", d.task_name(m), describe(f.pd));
                if let Some(moved) = factors.allocation.iter().find(|a| a.task == m) {
                    if sorted_speeds(d, &moved.system) != sorted_speeds(d, &moved.foil) {
                        line.push_str(&format!(
                            ": {}→{}",
                            speed_list(d, &moved.system),
                            speed_list(d, &moved.foil)
                        ));
                    }
                }
                line
            })
            .collect();
        match crit(FactorKind::RobotMakespan, n) {
            Some(f) => lines.push(format!("{BULLET}{} {}", d.robot_name(n), describe(f.pd))),
            None if !children.is_empty() => {
                lines.push(format!("{BULLET}{} takes about the same time", d.robot_name(n)))
            }
            None => continue,
        }
        lines.extend(children);
    }
    lines.join("\n")
}

/// One sentence naming the violated condition.
pub fn render_cause(cause: &Infeasibility, d: &ProblemDomain) -> String {
    match cause {
        Infeasibility::TraitViolation { task, requirement, aggregate } => {
            let all: Vec<usize> = (0..d.n_traits()).collect();
            let lacking: Vec<&str> = (0..d.n_traits())
                .filter(|&u| aggregate.0.get(u).copied().unwrap_or(0.0) < requirement.0.get(u).copied().unwrap_or(0.0))
                .map(|u| d.traits[u].name.as_str())
                .collect();
            let what = if lacking.is_empty() { "a robot".to_string() } else { lacking.join(" and ") };
            format!(
                "Infeasible: {}({}) requires {} the assigned robots ({}) lack",
                d.task_name(*task),
                format_vector(requirement, &all),
                what,
                format_vector(aggregate, &all)
            )
        }
        Infeasibility::PrecedenceViolation { before, after } => format!(
            "Infeasible: {} cannot start before {} completes",
            task_ref(d, *after),
            task_ref(d, *before)
        ),
        Infeasibility::NoMotionPlan { task, robot } => {
            format!("Infeasible: {} cannot reach {}", d.robot_name(*robot), task_ref(d, *task))
        }
    }
}

/// Composes capability lines with either the schedule comparison or the infeasibility cause.
///
/// `fc` is the factor set between `s` and the foil solution and must be given exactly when the
/// foil is feasible; it is filtered with `cfg.z` here.
pub fn explain(
    d: &ProblemDomain,
    s: &Solution,
    outcome: &FoilOutcome,
    fc: Option<&FactorSet>,
    cfg: &ExplainConfig,
) -> Result<Explanation> {
    let subset = cfg.trait_subset(d);
    match (outcome.solution(), outcome.cause(), fc) {
        (Some(foil), None, Some(fc)) => {
            let fc = filter_critical(fc, cfg.z);
            let capability_lines = fc
                .allocation
                .iter()
                .map(|f| render_capability_line(f, d, &subset))
                .collect::<Result<Vec<_>>>()?;
            let equivalent = fc.schedule.is_empty();
            let block = render_schedule_block(&fc, d, s, foil);
            Ok(Explanation::assemble(capability_lines, Some(block), None, equivalent))
        }
        (None, Some(cause), None) => {
            let capability_lines = compare_allocations(&s.allocation, &outcome.allocation)?
                .iter()
                .map(|f| render_capability_line(f, d, &subset))
                .collect::<Result<Vec<_>>>()?;
            Ok(Explanation::assemble(capability_lines, None, Some(render_cause(cause, d)), false))
        }
        _ => Err(Error::invalid("a factor set is required exactly when the foil is feasible")),
    }
}

/// Builds the foil, compares it with `s` and explains the result.
pub fn explain_foil(
    d: &ProblemDomain,
    s: &Solution,
    q: &FoilQuery,
    cfg: &ExplainConfig,
) -> Result<(FoilOutcome, Option<FactorSet>, Explanation)> {
    let outcome = build_foil(d, s, q)?;
    let factors = match outcome.solution() {
        Some(foil) => Some(filter_critical(
            &compare(cfg.formula, &s.allocation, &s.schedule, &foil.allocation, &foil.schedule)?,
            cfg.z,
        )),
        None => None,
    };
    let explanation = explain(d, s, &outcome, factors.as_ref(), cfg)?;
    Ok((outcome, factors, explanation))
}
