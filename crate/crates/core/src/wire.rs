//! JSON documents exchanged with files, the CLI and the HTTP service.
//!
//! Robots, tasks and traits are referenced by name on the wire. Every `*_from_json` entry point
//! accepts arbitrary bytes and reports malformed input as [`Error::Parse`] or
//! [`Error::InvalidArgument`]; none of them panic.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::compare::{AllocationFactor, FactorKind, FactorSet, ScheduleFactor};
use crate::domain::*;
use crate::error::{Error, Result};
use crate::foil::{FoilChange, FoilOp, FoilOutcome, FoilQuery, FoilResult};
use crate::motion::Path;
use crate::planner::{AllocationMatrix, Infeasibility, Schedule, Solution, TaskWindow};
use crate::scenario::{ErrorTuple, RepairEdit, Scenario, SessionMetrics};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn robot_idx(d: &ProblemDomain, name: &str) -> Result<usize> {
    d.robot_index(name).ok_or_else(|| Error::invalid(format!("unknown robot {name:?}")))
}

fn task_idx(d: &ProblemDomain, name: &str) -> Result<usize> {
    d.task_index(name).ok_or_else(|| Error::invalid(format!("unknown task {name:?}")))
}

fn trait_idx(d: &ProblemDomain, name: &str) -> Result<usize> {
    d.trait_index(name).ok_or_else(|| Error::invalid(format!("unknown trait {name:?}")))
}

// ---------------------------------------------------------------------------------------------
// Domain

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotEntry {
    pub name: String,
    pub traits: Vec<f64>,
    pub speed: f64,
    pub start: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub location: Cell,
    pub work_duration: f64,
    pub requirements: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    #[serde(default)]
    pub blocked: Vec<Cell>,
}

/// The domain file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub traits: Vec<TraitSpec>,
    pub robots: Vec<RobotEntry>,
    pub tasks: Vec<TaskEntry>,
    #[serde(default)]
    pub precedence: Vec<[String; 2]>,
    pub map: MapEntry,
}

/// Grids larger than this are rejected before any per-cell allocation happens.
pub const MAX_GRID_CELLS: usize = 1 << 22;

impl DomainFile {
    pub fn from_domain(d: &ProblemDomain) -> Self {
        DomainFile {
            traits: d.traits.clone(),
            robots: (0..d.n_robots())
                .map(|n| RobotEntry {
                    name: d.q.robot_ids[n].clone(),
                    traits: d.q.rows[n].0.clone(),
                    speed: d.phi.0[n],
                    start: d.map.starts[n],
                })
                .collect(),
            tasks: d
                .network
                .tasks
                .iter()
                .zip(&d.ystar.rows)
                .map(|(t, req)| TaskEntry {
                    name: t.name.clone(),
                    label: t.label.clone(),
                    location: t.location,
                    work_duration: t.work_duration,
                    requirements: req.0.clone(),
                })
                .collect(),
            precedence: d
                .network
                .edges
                .iter()
                .map(|&(a, b)| [d.task_name(a).to_string(), d.task_name(b).to_string()])
                .collect(),
            map: MapEntry {
                width: d.map.width,
                height: d.map.height,
                cell_size: d.map.cell_size,
                blocked: d.map.blocked.iter().copied().collect(),
            },
        }
    }

    /// Builds the in-memory domain. Only name resolution and grid size are checked here; run
    /// [`validate_domain`] for the structural rules.
    pub fn into_domain(self) -> Result<ProblemDomain> {
        if self.map.width.checked_mul(self.map.height).is_none_or(|c| c > MAX_GRID_CELLS) {
            return Err(parse_err(format!("grid {}x{} is too large", self.map.width, self.map.height)));
        }
        let find_task = |name: &str| {
            self.tasks
                .iter()
                .position(|t| t.name == name)
                .ok_or_else(|| parse_err(format!("precedence names unknown task {name:?}")))
        };
        let edges = self
            .precedence
            .iter()
            .map(|[a, b]| Ok((find_task(a)?, find_task(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemDomain {
            q: RobotTraitMatrix {
                robot_ids: self.robots.iter().map(|r| r.name.clone()).collect(),
                rows: self.robots.iter().map(|r| TraitVector(r.traits.clone())).collect(),
            },
            phi: SpeedVector(self.robots.iter().map(|r| r.speed).collect()),
            ystar: DesiredTraitMatrix {
                rows: self.tasks.iter().map(|t| TraitVector(t.requirements.clone())).collect(),
            },
            network: TaskNetwork {
                tasks: self
                    .tasks
                    .into_iter()
                    .map(|t| Task { name: t.name, label: t.label, location: t.location, work_duration: t.work_duration })
                    .collect(),
                edges,
            },
            map: GridMap {
                width: self.map.width,
                height: self.map.height,
                cell_size: self.map.cell_size,
                blocked: self.map.blocked.into_iter().collect::<BTreeSet<_>>(),
                starts: self.robots.iter().map(|r| r.start).collect(),
            },
            traits: self.traits,
        })
    }
}

pub fn domain_to_json(d: &ProblemDomain) -> String {
    serde_json::to_string_pretty(&DomainFile::from_domain(d)).expect("domain serializes")
}

/// Parses a domain file without structural validation.
pub fn domain_from_json(bytes: &[u8]) -> Result<ProblemDomain> {
    serde_json::from_slice::<DomainFile>(bytes)?.into_domain()
}

/// Parses and validates a domain file.
pub fn load_domain(bytes: &[u8]) -> Result<ProblemDomain> {
    let d = domain_from_json(bytes)?;
    let violations = validate_domain(&d);
    if violations.is_empty() {
        Ok(d)
    } else {
        let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
        Err(Error::invalid(msg.join("; ")))
    }
}

// ---------------------------------------------------------------------------------------------
// Sites, edits, diffs

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SiteWire {
    RobotTrait { robot: String, #[serde(rename = "trait")] trait_name: String },
    TaskRequirement { task: String, #[serde(rename = "trait")] trait_name: String },
    Speed { robot: String },
}

impl SiteWire {
    pub fn from_site(d: &ProblemDomain, site: Site) -> Self {
        match site {
            Site::RobotTrait { robot, trait_idx } => SiteWire::RobotTrait {
                robot: d.robot_name(robot).to_string(),
                trait_name: d.traits[trait_idx].name.clone(),
            },
            Site::TaskRequirement { task, trait_idx } => SiteWire::TaskRequirement {
                task: d.task_name(task).to_string(),
                trait_name: d.traits[trait_idx].name.clone(),
            },
            Site::Speed { robot } => SiteWire::Speed { robot: d.robot_name(robot).to_string() },
        }
    }

    pub fn resolve(&self, d: &ProblemDomain) -> Result<Site> {
        Ok(match self {
            SiteWire::RobotTrait { robot, trait_name } => {
                Site::RobotTrait { robot: robot_idx(d, robot)?, trait_idx: trait_idx(d, trait_name)? }
            }
            SiteWire::TaskRequirement { task, trait_name } => {
                Site::TaskRequirement { task: task_idx(d, task)?, trait_idx: trait_idx(d, trait_name)? }
            }
            SiteWire::Speed { robot } => Site::Speed { robot: robot_idx(d, robot)? },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditWire {
    pub site: SiteWire,
    pub value: f64,
}

impl EditWire {
    pub fn from_edit(d: &ProblemDomain, e: RepairEdit) -> Self {
        EditWire { site: SiteWire::from_site(d, e.site), value: e.value }
    }

    pub fn resolve(&self, d: &ProblemDomain) -> Result<RepairEdit> {
        Ok(RepairEdit { site: self.site.resolve(d)?, value: self.value })
    }
}

pub fn edit_from_json(d: &ProblemDomain, bytes: &[u8]) -> Result<RepairEdit> {
    serde_json::from_slice::<EditWire>(bytes)?.resolve(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffEntryWire {
    pub site: SiteWire,
    pub expected: f64,
    pub actual: f64,
}

pub fn diff_to_wire(d: &ProblemDomain, diff: &DomainDiff) -> Vec<DiffEntryWire> {
    diff.entries
        .iter()
        .map(|e| DiffEntryWire { site: SiteWire::from_site(d, e.site), expected: e.expected, actual: e.actual })
        .collect()
}

pub fn diff_from_wire(d: &ProblemDomain, entries: &[DiffEntryWire]) -> Result<DomainDiff> {
    let entries = entries
        .iter()
        .map(|e| Ok(DiffEntry { site: e.site.resolve(d)?, expected: e.expected, actual: e.actual }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DomainDiff { entries })
}

// ---------------------------------------------------------------------------------------------
// Solutions

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowWire {
    pub start: f64,
    pub end: f64,
}

/// The solution document. `makespan` and `robot_makespans` are derived from `schedule` and are
/// recomputed on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionWire {
    pub allocation: IndexMap<String, Vec<String>>,
    pub schedule: IndexMap<String, WindowWire>,
    pub makespan: f64,
    pub robot_makespans: IndexMap<String, Option<f64>>,
    pub motions: IndexMap<String, IndexMap<String, Vec<Cell>>>,
}

impl SolutionWire {
    pub fn from_solution(d: &ProblemDomain, s: &Solution) -> Self {
        let task = |m: usize| d.task_name(m).to_string();
        SolutionWire {
            allocation: (0..d.n_tasks())
                .map(|m| (task(m), s.allocation.coalition(m).into_iter().map(|n| d.robot_name(n).to_string()).collect()))
                .collect(),
            schedule: s
                .schedule
                .windows
                .iter()
                .enumerate()
                .map(|(m, w)| (task(m), WindowWire { start: w.start_s, end: w.end_s }))
                .collect(),
            makespan: s.makespan(),
            robot_makespans: s
                .schedule
                .robot_makespans
                .iter()
                .enumerate()
                .map(|(n, v)| (d.robot_name(n).to_string(), *v))
                .collect(),
            motions: s
                .motions
                .iter()
                .enumerate()
                .map(|(m, legs)| {
                    (task(m), legs.iter().map(|(n, p)| (d.robot_name(*n).to_string(), p.cells.clone())).collect())
                })
                .collect(),
        }
    }

    pub fn into_solution(self, d: &ProblemDomain) -> Result<Solution> {
        let mut allocation = AllocationMatrix::empty(d.n_tasks(), d.n_robots());
        for (t, robots) in &self.allocation {
            let m = task_idx(d, t)?;
            for r in robots {
                allocation.set(m, robot_idx(d, r)?, true);
            }
        }
        let mut windows: Vec<Option<TaskWindow>> = vec![None; d.n_tasks()];
        for (t, w) in &self.schedule {
            if !w.start.is_finite() || !w.end.is_finite() || w.end < w.start {
                return Err(Error::invalid(format!("task {t:?} has an invalid window")));
            }
            windows[task_idx(d, t)?] = Some(TaskWindow { start_s: w.start, end_s: w.end });
        }
        let windows = windows
            .into_iter()
            .enumerate()
            .map(|(m, w)| w.ok_or_else(|| Error::invalid(format!("task {:?} is not scheduled", d.task_name(m)))))
            .collect::<Result<Vec<_>>>()?;
        let mut motions: Vec<Vec<(usize, Path)>> = vec![Vec::new(); d.n_tasks()];
        for (t, legs) in self.motions {
            let m = task_idx(d, &t)?;
            for (r, cells) in legs {
                let n = robot_idx(d, &r)?;
                if cells.is_empty() {
                    return Err(Error::invalid(format!("empty path for {r:?} on {t:?}")));
                }
                let length_m = (cells.len() - 1) as f64 * d.map.cell_size;
                motions[m].retain(|(k, _)| *k != n);
                motions[m].push((n, Path { cells, length_m }));
            }
            motions[m].sort_by_key(|(n, _)| *n);
        }
        Ok(Solution { schedule: Schedule::new(windows, &allocation), allocation, motions })
    }
}

pub fn solution_to_json(d: &ProblemDomain, s: &Solution) -> String {
    serde_json::to_string_pretty(&SolutionWire::from_solution(d, s)).expect("solution serializes")
}

pub fn solution_from_json(d: &ProblemDomain, bytes: &[u8]) -> Result<Solution> {
    serde_json::from_slice::<SolutionWire>(bytes)?.into_solution(d)
}

// ---------------------------------------------------------------------------------------------
// Foils

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoilChangeWire {
    pub robot: String,
    pub task: String,
    pub op: FoilOp,
}

pub fn foil_to_wire(d: &ProblemDomain, q: &FoilQuery) -> Vec<FoilChangeWire> {
    q.changes
        .iter()
        .map(|c| FoilChangeWire { robot: d.robot_name(c.robot).to_string(), task: d.task_name(c.task).to_string(), op: c.op })
        .collect()
}

pub fn foil_from_wire(d: &ProblemDomain, changes: &[FoilChangeWire]) -> Result<FoilQuery> {
    if changes.is_empty() {
        return Err(Error::invalid("foil has no changes"));
    }
    let changes = changes
        .iter()
        .map(|c| Ok(FoilChange { robot: robot_idx(d, &c.robot)?, task: task_idx(d, &c.task)?, op: c.op }))
        .collect::<Result<Vec<_>>>()?;
    Ok(FoilQuery { changes })
}

pub fn foil_to_json(d: &ProblemDomain, q: &FoilQuery) -> String {
    serde_json::to_string_pretty(&foil_to_wire(d, q)).expect("foil serializes")
}

pub fn foil_from_json(d: &ProblemDomain, bytes: &[u8]) -> Result<FoilQuery> {
    foil_from_wire(d, &serde_json::from_slice::<Vec<FoilChangeWire>>(bytes)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CauseWire {
    TraitViolation { task: String, requirement: Vec<f64>, aggregate: Vec<f64> },
    PrecedenceViolation { before: String, after: String },
    NoMotionPlan { task: String, robot: String },
}

impl CauseWire {
    pub fn from_cause(d: &ProblemDomain, c: &Infeasibility) -> Self {
        match c {
            Infeasibility::TraitViolation { task, requirement, aggregate } => CauseWire::TraitViolation {
                task: d.task_name(*task).to_string(),
                requirement: requirement.0.clone(),
                aggregate: aggregate.0.clone(),
            },
            Infeasibility::PrecedenceViolation { before, after } => CauseWire::PrecedenceViolation {
                before: d.task_name(*before).to_string(),
                after: d.task_name(*after).to_string(),
            },
            Infeasibility::NoMotionPlan { task, robot } => CauseWire::NoMotionPlan {
                task: d.task_name(*task).to_string(),
                robot: d.robot_name(*robot).to_string(),
            },
        }
    }

    pub fn resolve(&self, d: &ProblemDomain) -> Result<Infeasibility> {
        Ok(match self {
            CauseWire::TraitViolation { task, requirement, aggregate } => Infeasibility::TraitViolation {
                task: task_idx(d, task)?,
                requirement: TraitVector(requirement.clone()),
                aggregate: TraitVector(aggregate.clone()),
            },
            CauseWire::PrecedenceViolation { before, after } => {
                Infeasibility::PrecedenceViolation { before: task_idx(d, before)?, after: task_idx(d, after)? }
            }
            CauseWire::NoMotionPlan { task, robot } => {
                Infeasibility::NoMotionPlan { task: task_idx(d, task)?, robot: robot_idx(d, robot)? }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoilOutcomeWire {
    pub feasible: bool,
    pub allocation: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cause: Option<CauseWire>,
}

fn allocation_to_wire(d: &ProblemDomain, a: &AllocationMatrix) -> IndexMap<String, Vec<String>> {
    (0..d.n_tasks())
        .map(|m| (d.task_name(m).to_string(), a.coalition(m).into_iter().map(|n| d.robot_name(n).to_string()).collect()))
        .collect()
}

fn allocation_from_wire(d: &ProblemDomain, w: &IndexMap<String, Vec<String>>) -> Result<AllocationMatrix> {
    let mut a = AllocationMatrix::empty(d.n_tasks(), d.n_robots());
    for (t, robots) in w {
        let m = task_idx(d, t)?;
        for r in robots {
            a.set(m, robot_idx(d, r)?, true);
        }
    }
    Ok(a)
}

impl FoilOutcomeWire {
    pub fn from_outcome(d: &ProblemDomain, o: &FoilOutcome) -> Self {
        let allocation = allocation_to_wire(d, &o.allocation);
        match &o.result {
            FoilResult::Feasible(s) => FoilOutcomeWire {
                feasible: true,
                allocation,
                solution: Some(SolutionWire::from_solution(d, s)),
                cause: None,
            },
            FoilResult::Infeasible(c) => FoilOutcomeWire {
                feasible: false,
                allocation,
                solution: None,
                cause: Some(CauseWire::from_cause(d, c)),
            },
        }
    }

    pub fn into_outcome(self, d: &ProblemDomain) -> Result<FoilOutcome> {
        let allocation = allocation_from_wire(d, &self.allocation)?;
        let result = match (self.feasible, self.solution, self.cause) {
            (true, Some(s), None) => FoilResult::Feasible(s.into_solution(d)?),
            (false, None, Some(c)) => FoilResult::Infeasible(c.resolve(d)?),
            _ => return Err(Error::invalid("foil outcome must carry exactly one of solution or cause")),
        };
        Ok(FoilOutcome { allocation, result })
    }
}

// ---------------------------------------------------------------------------------------------
// Factors

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationFactorWire {
    pub task: String,
    pub system: Vec<String>,
    pub foil: Vec<String>,
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFactorWire {
    pub kind: FactorKind,
    pub subject: Option<String>,
    pub system: f64,
    pub foil: f64,
    pub pd: f64,
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSetWire {
    pub allocation: Vec<AllocationFactorWire>,
    pub schedule: Vec<ScheduleFactorWire>,
}

impl FactorSetWire {
    pub fn from_factors(d: &ProblemDomain, f: &FactorSet) -> Self {
        let names = |c: &[usize]| c.iter().map(|&n| d.robot_name(n).to_string()).collect();
        FactorSetWire {
            allocation: f
                .allocation
                .iter()
                .map(|a| AllocationFactorWire {
                    task: d.task_name(a.task).to_string(),
                    system: names(&a.system),
                    foil: names(&a.foil),
                    critical: true,
                })
                .collect(),
            schedule: f
                .schedule
                .iter()
                .map(|s| ScheduleFactorWire {
                    kind: s.kind,
                    subject: s.subject.map(|i| match s.kind {
                        FactorKind::TaskTime => d.task_name(i).to_string(),
                        _ => d.robot_name(i).to_string(),
                    }),
                    system: s.system,
                    foil: s.foil,
                    pd: s.pd,
                    critical: s.critical,
                })
                .collect(),
        }
    }

    pub fn into_factors(self, d: &ProblemDomain) -> Result<FactorSet> {
        let idx = |c: &[String]| c.iter().map(|r| robot_idx(d, r)).collect::<Result<Vec<_>>>();
        Ok(FactorSet {
            allocation: self
                .allocation
                .iter()
                .map(|a| Ok(AllocationFactor { task: task_idx(d, &a.task)?, system: idx(&a.system)?, foil: idx(&a.foil)? }))
                .collect::<Result<_>>()?,
            schedule: self
                .schedule
                .into_iter()
                .map(|s| {
                    let subject = match (s.kind, &s.subject) {
                        (FactorKind::Makespan, None) => None,
                        (FactorKind::TaskTime, Some(t)) => Some(task_idx(d, t)?),
                        (FactorKind::RobotMakespan, Some(r)) => Some(robot_idx(d, r)?),
                        _ => return Err(Error::invalid("factor subject does not match its kind")),
                    };
                    Ok(ScheduleFactor { kind: s.kind, subject, system: s.system, foil: s.foil, pd: s.pd, critical: s.critical })
                })
                .collect::<Result<_>>()?,
        })
    }
}

pub fn factors_to_json(d: &ProblemDomain, f: &FactorSet) -> String {
    serde_json::to_string_pretty(&FactorSetWire::from_factors(d, f)).expect("factors serialize")
}

// ---------------------------------------------------------------------------------------------
// Scenarios

/// The scenario file: the presented domain plus the values needed to restore the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub label: String,
    pub seed: u64,
    pub error_tuple: ErrorTuple,
    #[serde(flatten)]
    pub domain: DomainFile,
    /// Ground-truth values at the injected sites.
    pub truth_overlay: Vec<EditWire>,
    pub injected: Vec<DiffEntryWire>,
}

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        let d = &s.presented;
        ScenarioFile {
            label: s.label.clone(),
            seed: s.seed,
            error_tuple: s.error_tuple,
            domain: DomainFile::from_domain(d),
            truth_overlay: s
                .injected
                .entries
                .iter()
                .map(|e| EditWire { site: SiteWire::from_site(d, e.site), value: e.expected })
                .collect(),
            injected: diff_to_wire(d, &s.injected),
        }
    }

    pub fn into_scenario(self) -> Result<Scenario> {
        let presented = self.domain.into_domain()?;
        let mut truth = presented.clone();
        for e in &self.truth_overlay {
            let edit = e.resolve(&presented)?;
            truth = truth.with_value(edit.site, edit.value)?;
        }
        let injected = diff_domains(&presented, &truth)?;
        if injected != diff_from_wire(&presented, &self.injected)? {
            return Err(Error::invalid("injected list does not match the truth overlay"));
        }
        for category in [SiteCategory::Robot, SiteCategory::Task, SiteCategory::Speed] {
            if injected.count(category) != self.error_tuple.get(category) {
                return Err(Error::invalid(format!("error tuple disagrees with the injected {category:?} errors")));
            }
        }
        Ok(Scenario { label: self.label, seed: self.seed, error_tuple: self.error_tuple, truth, presented, injected })
    }
}

pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from_scenario(s)).expect("scenario serializes")
}

pub fn scenario_from_json(bytes: &[u8]) -> Result<Scenario> {
    serde_json::from_slice::<ScenarioFile>(bytes)?.into_scenario()
}

// ---------------------------------------------------------------------------------------------
// Metrics

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsWire {
    pub repair_actions: usize,
    pub corrected: usize,
    pub introduced: usize,
    pub rte_pct: f64,
    pub tre_pct: f64,
    pub rse_pct: f64,
    pub extraneous_corrections: usize,
    pub remaining: Vec<DiffEntryWire>,
}

impl MetricsWire {
    pub fn from_metrics(d: &ProblemDomain, m: &SessionMetrics) -> Self {
        MetricsWire {
            repair_actions: m.repair_actions,
            corrected: m.corrected,
            introduced: m.introduced,
            rte_pct: m.rte_pct,
            tre_pct: m.tre_pct,
            rse_pct: m.rse_pct,
            extraneous_corrections: m.extraneous_corrections,
            remaining: diff_to_wire(d, &m.remaining),
        }
    }

    pub fn into_metrics(self, d: &ProblemDomain) -> Result<SessionMetrics> {
        Ok(SessionMetrics {
            repair_actions: self.repair_actions,
            remaining: diff_from_wire(d, &self.remaining)?,
            corrected: self.corrected,
            introduced: self.introduced,
            rte_pct: self.rte_pct,
            tre_pct: self.tre_pct,
            rse_pct: self.rse_pct,
            extraneous_corrections: self.extraneous_corrections,
        })
    }

    pub const CSV_HEADER: &'static str =
        "repair_actions,corrected,introduced,remaining,rte_pct,tre_pct,rse_pct,extraneous_corrections";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.repair_actions,
            self.corrected,
            self.introduced,
            self.remaining.len(),
            self.rte_pct,
            self.tre_pct,
            self.rse_pct,
            self.extraneous_corrections
        )
    }
}
