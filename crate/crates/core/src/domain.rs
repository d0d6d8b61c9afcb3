//! Problem domain: robots with trait vectors and speeds, a precedence-constrained task network,
//! per-task trait requirements and the grid the robots drive on.
//!
//! Everything here is a plain value. Robots, tasks and traits are addressed by index internally;
//! names only matter at the wire boundary (see [`crate::wire`]).

use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a trait pools across a coalition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraitClass {
    /// Summed over the coalition (e.g. carrying capacity).
    Cumulative,
    /// Present if any member has it.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraitSpec {
    pub name: String,
    pub class: TraitClass,
}

impl TraitSpec {
    pub fn new(name: impl Into<String>, class: TraitClass) -> Self {
        Self { name: name.into(), class }
    }
}

/// One value per trait dimension, in the domain's global trait order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TraitVector(pub Vec<f64>);

impl TraitVector {
    pub fn zeros(len: usize) -> Self {
        TraitVector(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for TraitVector {
    fn from(v: Vec<f64>) -> Self {
        TraitVector(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotTraitMatrix {
    pub robot_ids: Vec<String>,
    pub rows: Vec<TraitVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeedVector(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesiredTraitMatrix {
    pub rows: Vec<TraitVector>,
}

/// A grid cell, `x` growing right and `y` growing down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        self.manhattan(other) == 1
    }
}

impl From<[usize; 2]> for Cell {
    fn from([x, y]: [usize; 2]) -> Self {
        Cell { x, y }
    }
}

impl From<Cell> for [usize; 2] {
    fn from(c: Cell) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub name: String,
    /// Human-readable kind, e.g. "Setup Camp".
    pub label: Option<String>,
    pub location: Cell,
    /// Seconds of work once the whole coalition is on site.
    pub work_duration: f64,
}

/// Tasks plus precedence edges `(before, after)` by task index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskNetwork {
    pub tasks: Vec<Task>,
    pub edges: Vec<(usize, usize)>,
}

impl TaskNetwork {
    pub fn predecessors(&self, task: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.1 == task).map(|e| e.0)
    }

    /// Kahn's algorithm, always releasing the lowest ready index first. `None` on a cycle or an
    /// out-of-range edge.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let m = self.tasks.len();
        let mut indegree = vec![0usize; m];
        for &(a, b) in &self.edges {
            if a >= m || b >= m {
                return None;
            }
            indegree[b] += 1;
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..m).filter(|&t| indegree[t] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(m);
        while let Some(Reverse(t)) = ready.pop() {
            order.push(t);
            for &(a, b) in &self.edges {
                if a == t {
                    indegree[b] -= 1;
                    if indegree[b] == 0 {
                        ready.push(Reverse(b));
                    }
                }
            }
        }
        (order.len() == m).then_some(order)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
    /// Meters per cell edge.
    pub cell_size: f64,
    pub blocked: BTreeSet<Cell>,
    /// One start cell per robot.
    pub starts: Vec<Cell>,
}

impl GridMap {
    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.in_bounds(c) && !self.blocked.contains(&c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDomain {
    pub traits: Vec<TraitSpec>,
    pub q: RobotTraitMatrix,
    pub phi: SpeedVector,
    pub network: TaskNetwork,
    pub ystar: DesiredTraitMatrix,
    pub map: GridMap,
}

impl ProblemDomain {
    pub fn n_robots(&self) -> usize {
        self.q.robot_ids.len()
    }

    pub fn n_tasks(&self) -> usize {
        self.network.tasks.len()
    }

    pub fn n_traits(&self) -> usize {
        self.traits.len()
    }

    pub fn robot_index(&self, name: &str) -> Option<usize> {
        self.q.robot_ids.iter().position(|r| r == name)
    }

    pub fn task_index(&self, name: &str) -> Option<usize> {
        self.network.tasks.iter().position(|t| t.name == name)
    }

    pub fn trait_index(&self, name: &str) -> Option<usize> {
        self.traits.iter().position(|t| t.name == name)
    }

    pub fn robot_name(&self, robot: usize) -> &str {
        &self.q.robot_ids[robot]
    }

    pub fn task_name(&self, task: usize) -> &str {
        &self.network.tasks[task].name
    }

    pub fn trait_classes(&self) -> Vec<TraitClass> {
        self.traits.iter().map(|t| t.class).collect()
    }

    /// Pooled capability of a coalition given by robot index.
    pub fn coalition_traits(&self, coalition: &[usize]) -> TraitVector {
        pool(coalition.iter().map(|&r| &self.q.rows[r]), &self.trait_classes())
    }

    pub fn value(&self, site: Site) -> Option<f64> {
        match site {
            Site::RobotTrait { robot, trait_idx } => {
                self.q.rows.get(robot)?.0.get(trait_idx).copied()
            }
            Site::TaskRequirement { task, trait_idx } => {
                self.ystar.rows.get(task)?.0.get(trait_idx).copied()
            }
            Site::Speed { robot } => self.phi.0.get(robot).copied(),
        }
    }

    /// Copy with one site overwritten.
    pub fn with_value(&self, site: Site, value: f64) -> Result<ProblemDomain> {
        let mut d = self.clone();
        let slot = match site {
            Site::RobotTrait { robot, trait_idx } => {
                d.q.rows.get_mut(robot).and_then(|r| r.0.get_mut(trait_idx))
            }
            Site::TaskRequirement { task, trait_idx } => {
                d.ystar.rows.get_mut(task).and_then(|r| r.0.get_mut(trait_idx))
            }
            Site::Speed { robot } => d.phi.0.get_mut(robot),
        };
        match slot {
            Some(v) => {
                *v = value;
                Ok(d)
            }
            None => Err(Error::invalid(format!("site {site:?} is out of range"))),
        }
    }

    /// Every editable site in canonical order: Q row-major, then Y*, then φ.
    pub fn sites(&self) -> Vec<Site> {
        let u = self.n_traits();
        let mut out = Vec::new();
        for robot in 0..self.n_robots() {
            out.extend((0..u).map(|trait_idx| Site::RobotTrait { robot, trait_idx }));
        }
        for task in 0..self.n_tasks() {
            out.extend((0..u).map(|trait_idx| Site::TaskRequirement { task, trait_idx }));
        }
        out.extend((0..self.n_robots()).map(|robot| Site::Speed { robot }));
        out
    }

    pub fn describe_site(&self, site: Site) -> String {
        let trait_name = |u: usize| self.traits.get(u).map_or("?", |t| t.name.as_str());
        match site {
            Site::RobotTrait { robot, trait_idx } => {
                format!("Q[{}][{}]", self.robot_name(robot), trait_name(trait_idx))
            }
            Site::TaskRequirement { task, trait_idx } => {
                format!("Ystar[{}][{}]", self.task_name(task), trait_name(trait_idx))
            }
            Site::Speed { robot } => format!("phi[{}]", self.robot_name(robot)),
        }
    }
}

fn pool<'a>(rows: impl Iterator<Item = &'a TraitVector>, classes: &[TraitClass]) -> TraitVector {
    let mut acc = TraitVector::zeros(classes.len());
    for row in rows {
        for (u, class) in classes.iter().enumerate() {
            let v = row.0.get(u).copied().unwrap_or(0.0);
            match class {
                TraitClass::Cumulative => acc.0[u] += v,
                TraitClass::Binary => acc.0[u] = acc.0[u].max(v),
            }
        }
    }
    acc
}

/// Pools a coalition's traits: cumulative traits are summed, binary traits OR'd.
pub fn aggregate_traits<S: AsRef<str>>(
    coalition: &[S],
    q: &RobotTraitMatrix,
    traits: &[TraitSpec],
) -> Result<TraitVector> {
    if coalition.is_empty() {
        return Err(Error::invalid("coalition is empty"));
    }
    let mut rows = Vec::with_capacity(coalition.len());
    for id in coalition {
        let id = id.as_ref();
        let idx = q
            .robot_ids
            .iter()
            .position(|r| r == id)
            .ok_or_else(|| Error::invalid(format!("unknown robot id {id:?}")))?;
        rows.push(&q.rows[idx]);
    }
    let classes: Vec<_> = traits.iter().map(|t| t.class).collect();
    Ok(pool(rows.into_iter(), &classes))
}

/// True iff `capability` meets or exceeds `requirement` in every dimension.
pub fn coalition_satisfies(requirement: &TraitVector, capability: &TraitVector) -> Result<bool> {
    if requirement.len() != capability.len() {
        return Err(Error::invalid(format!(
            "trait length mismatch: requirement has {}, capability has {}",
            requirement.len(),
            capability.len()
        )));
    }
    Ok(requirement.0.iter().zip(&capability.0).all(|(r, c)| c >= r))
}

/// An editable value in D. Trait and robot/task indices follow the owning domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    RobotTrait { robot: usize, trait_idx: usize },
    TaskRequirement { task: usize, trait_idx: usize },
    Speed { robot: usize },
}

/// The three error categories the scenario lab injects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteCategory {
    Robot,
    Task,
    Speed,
}

impl Site {
    pub fn category(self) -> SiteCategory {
        match self {
            Site::RobotTrait { .. } => SiteCategory::Robot,
            Site::TaskRequirement { .. } => SiteCategory::Task,
            Site::Speed { .. } => SiteCategory::Speed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffEntry {
    pub site: Site,
    pub expected: f64,
    pub actual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainDiff {
    pub entries: Vec<DiffEntry>,
}

impl DomainDiff {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, category: SiteCategory) -> usize {
        self.entries.iter().filter(|e| e.site.category() == category).count()
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.entries.iter().map(|e| e.site)
    }
}

/// Lists every Q, Y* and φ site where `actual` differs from `truth`.
pub fn diff_domains(actual: &ProblemDomain, truth: &ProblemDomain) -> Result<DomainDiff> {
    let shape = |d: &ProblemDomain| {
        (
            d.n_robots(),
            d.n_tasks(),
            d.n_traits(),
            d.phi.0.len(),
            d.ystar.rows.len(),
            d.q.rows.iter().map(TraitVector::len).collect::<Vec<_>>(),
            d.ystar.rows.iter().map(TraitVector::len).collect::<Vec<_>>(),
        )
    };
    if shape(actual) != shape(truth) {
        return Err(Error::invalid("domains differ in shape (robots, tasks or traits)"));
    }
    let entries = truth
        .sites()
        .into_iter()
        .filter_map(|site| {
            let expected = truth.value(site)?;
            let actual = actual.value(site)?;
            (expected != actual).then_some(DiffEntry { site, expected, actual })
        })
        .collect();
    Ok(DomainDiff { entries })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoRobots,
    NoTasks,
    NoTraits,
    DuplicateTrait(String),
    DuplicateRobot(String),
    DuplicateTask(String),
    ShapeMismatch(String),
    TraitLength { owner: String, expected: usize, found: usize },
    NegativeTrait { owner: String, trait_name: String, value: f64 },
    NonBinaryTrait { owner: String, trait_name: String, value: f64 },
    NonPositiveSpeed { robot: String, value: f64 },
    NegativeWorkDuration { task: String, value: f64 },
    NonPositiveCellSize(f64),
    EdgeOutOfRange { before: usize, after: usize },
    SelfLoop(String),
    PrecedenceCycle(Vec<String>),
    OutOfBounds { what: String, cell: Cell },
    BlockedLocation { what: String, cell: Cell },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoRobots => write!(f, "domain has no robots"),
            Violation::NoTasks => write!(f, "domain has no tasks"),
            Violation::NoTraits => write!(f, "domain declares no traits"),
            Violation::DuplicateTrait(n) => write!(f, "duplicate trait name {n:?}"),
            Violation::DuplicateRobot(n) => write!(f, "duplicate robot name {n:?}"),
            Violation::DuplicateTask(n) => write!(f, "duplicate task name {n:?}"),
            Violation::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            Violation::TraitLength { owner, expected, found } => {
                write!(f, "{owner} has {found} trait values, expected {expected}")
            }
            Violation::NegativeTrait { owner, trait_name, value } => {
                write!(f, "{owner} has negative {trait_name} ({value})")
            }
            Violation::NonBinaryTrait { owner, trait_name, value } => {
                write!(f, "{owner} has non-binary value {value} for binary trait {trait_name}")
            }
            Violation::NonPositiveSpeed { robot, value } => {
                write!(f, "non-positive speed {value} for robot {robot}")
            }
            Violation::NegativeWorkDuration { task, value } => {
                write!(f, "negative work duration {value} for task {task}")
            }
            Violation::NonPositiveCellSize(v) => write!(f, "non-positive cell size {v}"),
            Violation::EdgeOutOfRange { before, after } => {
                write!(f, "precedence edge ({before}, {after}) references an unknown task")
            }
            Violation::SelfLoop(t) => write!(f, "precedence cycle: {t} precedes itself"),
            Violation::PrecedenceCycle(ts) => write!(f, "precedence cycle among {}", ts.join(", ")),
            Violation::OutOfBounds { what, cell } => write!(f, "{what} at {cell} is off the map"),
            Violation::BlockedLocation { what, cell } => {
                write!(f, "{what} at {cell} is on a blocked cell")
            }
        }
    }
}

/// Structural checks. An empty report means the domain is well-formed.
pub fn validate_domain(d: &ProblemDomain) -> Vec<Violation> {
    let mut out = Vec::new();
    let u = d.n_traits();
    if d.n_robots() == 0 {
        out.push(Violation::NoRobots);
    }
    if d.n_tasks() == 0 {
        out.push(Violation::NoTasks);
    }
    if u == 0 {
        out.push(Violation::NoTraits);
    }
    duplicates(d.traits.iter().map(|t| t.name.as_str()), Violation::DuplicateTrait, &mut out);
    duplicates(d.q.robot_ids.iter().map(String::as_str), Violation::DuplicateRobot, &mut out);
    duplicates(d.network.tasks.iter().map(|t| t.name.as_str()), Violation::DuplicateTask, &mut out);

    let n = d.n_robots();
    if d.q.rows.len() != n {
        out.push(Violation::ShapeMismatch(format!("{} robot ids but {} trait rows", n, d.q.rows.len())));
    }
    if d.phi.0.len() != n {
        out.push(Violation::ShapeMismatch(format!("{} robots but {} speeds", n, d.phi.0.len())));
    }
    if d.map.starts.len() != n {
        out.push(Violation::ShapeMismatch(format!("{} robots but {} start cells", n, d.map.starts.len())));
    }
    if d.ystar.rows.len() != d.n_tasks() {
        out.push(Violation::ShapeMismatch(format!(
            "{} tasks but {} requirement rows",
            d.n_tasks(),
            d.ystar.rows.len()
        )));
    }

    let check_row = |owner: String, row: &TraitVector, out: &mut Vec<Violation>| {
        if row.len() != u {
            out.push(Violation::TraitLength { owner: owner.clone(), expected: u, found: row.len() });
        }
        for (spec, &value) in d.traits.iter().zip(&row.0) {
            if !(value >= 0.0) || !value.is_finite() {
                out.push(Violation::NegativeTrait { owner: owner.clone(), trait_name: spec.name.clone(), value });
            } else if spec.class == TraitClass::Binary && value != 0.0 && value != 1.0 {
                out.push(Violation::NonBinaryTrait { owner: owner.clone(), trait_name: spec.name.clone(), value });
            }
        }
    };
    for (id, row) in d.q.robot_ids.iter().zip(&d.q.rows) {
        check_row(format!("robot {id}"), row, &mut out);
    }
    for (task, row) in d.network.tasks.iter().zip(&d.ystar.rows) {
        check_row(format!("task {}", task.name), row, &mut out);
    }

    for (id, &v) in d.q.robot_ids.iter().zip(&d.phi.0) {
        if !(v > 0.0) || !v.is_finite() {
            out.push(Violation::NonPositiveSpeed { robot: id.clone(), value: v });
        }
    }
    for t in &d.network.tasks {
        if !(t.work_duration >= 0.0) || !t.work_duration.is_finite() {
            out.push(Violation::NegativeWorkDuration { task: t.name.clone(), value: t.work_duration });
        }
    }
    if !(d.map.cell_size > 0.0) || !d.map.cell_size.is_finite() {
        out.push(Violation::NonPositiveCellSize(d.map.cell_size));
    }

    let m = d.n_tasks();
    let mut edges_ok = true;
    for &(a, b) in &d.network.edges {
        if a >= m || b >= m {
            out.push(Violation::EdgeOutOfRange { before: a, after: b });
            edges_ok = false;
        } else if a == b {
            out.push(Violation::SelfLoop(d.task_name(a).to_string()));
            edges_ok = false;
        }
    }
    if edges_ok && d.network.topological_order().is_none() {
        out.push(Violation::PrecedenceCycle(cycle_members(&d.network)));
    }

    let check_cell = |what: String, cell: Cell, out: &mut Vec<Violation>| {
        if !d.map.in_bounds(cell) {
            out.push(Violation::OutOfBounds { what, cell });
        } else if d.map.blocked.contains(&cell) {
            out.push(Violation::BlockedLocation { what, cell });
        }
    };
    for (id, &cell) in d.q.robot_ids.iter().zip(&d.map.starts) {
        check_cell(format!("start of robot {id}"), cell, &mut out);
    }
    for t in &d.network.tasks {
        check_cell(format!("task {}", t.name), t.location, &mut out);
    }
    out
}

fn duplicates<'a>(
    names: impl Iterator<Item = &'a str>,
    make: impl Fn(String) -> Violation,
    out: &mut Vec<Violation>,
) {
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for n in names {
        if !seen.insert(n) && reported.insert(n) {
            out.push(make(n.to_string()));
        }
    }
}

/// Tasks left over after peeling every source and sink, i.e. those on or between cycles.
fn cycle_members(net: &TaskNetwork) -> Vec<String> {
    let mut alive: BTreeSet<usize> = (0..net.tasks.len()).collect();
    loop {
        let peel: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&t| {
                let has_in = net.edges.iter().any(|&(a, b)| b == t && alive.contains(&a));
                let has_out = net.edges.iter().any(|&(a, b)| a == t && alive.contains(&b));
                !has_in || !has_out
            })
            .collect();
        if peel.is_empty() {
            break;
        }
        for t in peel {
            alive.remove(&t);
        }
    }
    alive.into_iter().map(|t| net.tasks[t].name.clone()).collect()
}
