//! Allocation, list scheduling and exact desk-scale search.
//!
//! Robots execute one task at a time; a task may need several robots; each robot works its tasks
//! in the fixed topological order of the task network. A task's recorded interval opens when its
//! predecessors are done and its coalition is free, and closes once the last member has driven
//! over and the work is finished, so travel is part of the task time.

use std::fmt;

use crate::domain::{coalition_satisfies, validate_domain, Cell, ProblemDomain, TraitVector};
use crate::error::{Error, Result};
use crate::motion::{travel_time, Path, PathTable};

/// Tolerance used when comparing makespans produced by different allocations.
pub const TIME_EPS: f64 = 1e-9;

/// `M × N` binary matrix; entry `(m, n)` is set iff robot `n` works task `m`.
///
/// Ordering is lexicographic over the row-major entries with unset before set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AllocationMatrix {
    n_tasks: usize,
    n_robots: usize,
    bits: Vec<bool>,
}

impl AllocationMatrix {
    pub fn empty(n_tasks: usize, n_robots: usize) -> Self {
        AllocationMatrix { n_tasks, n_robots, bits: vec![false; n_tasks * n_robots] }
    }

    pub fn from_coalitions(n_robots: usize, coalitions: &[Vec<usize>]) -> Result<Self> {
        let mut a = Self::empty(coalitions.len(), n_robots);
        for (m, c) in coalitions.iter().enumerate() {
            for &n in c {
                if n >= n_robots {
                    return Err(Error::invalid(format!("robot index {n} out of range")));
                }
                a.set(m, n, true);
            }
        }
        Ok(a)
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }

    pub fn n_robots(&self) -> usize {
        self.n_robots
    }

    pub fn get(&self, task: usize, robot: usize) -> bool {
        self.bits[task * self.n_robots + robot]
    }

    pub fn set(&mut self, task: usize, robot: usize, value: bool) {
        self.bits[task * self.n_robots + robot] = value;
    }

    /// Robots on `task`, ascending.
    pub fn coalition(&self, task: usize) -> Vec<usize> {
        (0..self.n_robots).filter(|&n| self.get(task, n)).collect()
    }

    /// Tasks of `robot`, ascending by index.
    pub fn tasks_of(&self, robot: usize) -> Vec<usize> {
        (0..self.n_tasks).filter(|&m| self.get(m, robot)).collect()
    }

    pub fn is_allocated(&self, task: usize) -> bool {
        (0..self.n_robots).any(|n| self.get(task, n))
    }

    fn check_shape(&self, d: &ProblemDomain) -> Result<()> {
        if self.n_tasks != d.n_tasks() || self.n_robots != d.n_robots() {
            return Err(Error::invalid(format!(
                "allocation is {}x{}, domain has {} tasks and {} robots",
                self.n_tasks,
                self.n_robots,
                d.n_tasks(),
                d.n_robots()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskWindow {
    pub start_s: f64,
    pub end_s: f64,
}

impl TaskWindow {
    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// Start and end of every task plus each robot's finishing time (`None` for idle robots).
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub windows: Vec<TaskWindow>,
    pub robot_makespans: Vec<Option<f64>>,
}

impl Schedule {
    pub fn new(windows: Vec<TaskWindow>, allocation: &AllocationMatrix) -> Self {
        let robot_makespans = (0..allocation.n_robots())
            .map(|n| {
                allocation
                    .tasks_of(n)
                    .into_iter()
                    .filter_map(|m| windows.get(m).map(|w| w.end_s))
                    .reduce(f64::max)
            })
            .collect();
        Schedule { windows, robot_makespans }
    }

    /// λ: latest task end, 0 for an empty schedule.
    pub fn makespan(&self) -> f64 {
        makespan(self)
    }

    /// β_m.
    pub fn task_time(&self, task: usize) -> f64 {
        self.windows[task].duration()
    }

    /// α_n, 0 for a robot with no tasks.
    pub fn robot_makespan(&self, robot: usize) -> f64 {
        self.robot_makespans[robot].unwrap_or(0.0)
    }
}

pub fn makespan(s: &Schedule) -> f64 {
    s.windows.iter().map(|w| w.end_s).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub allocation: AllocationMatrix,
    pub schedule: Schedule,
    /// Per task, the path each coalition member drives to reach it, keyed by robot index.
    pub motions: Vec<Vec<(usize, Path)>>,
}

impl Solution {
    pub fn makespan(&self) -> f64 {
        self.schedule.makespan()
    }

    pub fn motion(&self, task: usize, robot: usize) -> Option<&Path> {
        self.motions.get(task)?.iter().find(|(r, _)| *r == robot).map(|(_, p)| p)
    }
}

/// Why an allocation cannot be turned into a valid plan.
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    /// The coalition on `task` does not meet its trait requirement (all-zero aggregate when the
    /// task has no robots).
    TraitViolation { task: usize, requirement: TraitVector, aggregate: TraitVector },
    /// `after` cannot run after `before`.
    PrecedenceViolation { before: usize, after: usize },
    /// `robot` has no route to `task`.
    NoMotionPlan { task: usize, robot: usize },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::TraitViolation { task, .. } => write!(f, "trait violation on task {task}"),
            Infeasibility::PrecedenceViolation { before, after } => {
                write!(f, "precedence violation on edge ({before}, {after})")
            }
            Infeasibility::NoMotionPlan { task, robot } => {
                write!(f, "no motion plan for robot {robot} to task {task}")
            }
        }
    }
}

/// Incremental list-scheduling state, shared by [`schedule_allocation`] and the search in
/// [`solve`].
#[derive(Clone)]
struct Simulator<'a> {
    d: &'a ProblemDomain,
    table: &'a PathTable<'a>,
    free_at: Vec<f64>,
    location: Vec<Cell>,
    windows: Vec<Option<TaskWindow>>,
    latest_end: f64,
}

impl<'a> Simulator<'a> {
    fn new(d: &'a ProblemDomain, table: &'a PathTable<'a>) -> Self {
        Simulator {
            d,
            table,
            free_at: vec![0.0; d.n_robots()],
            location: d.map.starts.clone(),
            windows: vec![None; d.n_tasks()],
            latest_end: 0.0,
        }
    }

    /// Schedules `task` with `coalition`; predecessors must already be placed.
    fn place(&mut self, task: usize, coalition: &[usize]) -> std::result::Result<Vec<(usize, &'a Path)>, usize> {
        let goal = self.d.network.tasks[task].location;
        let mut legs = Vec::with_capacity(coalition.len());
        for &n in coalition {
            match self.table.get(self.location[n], goal) {
                Some(p) => legs.push((n, p)),
                None => return Err(n),
            }
        }
        let pred_end = self
            .d
            .network
            .predecessors(task)
            .filter_map(|p| self.windows[p].map(|w| w.end_s))
            .fold(0.0, f64::max);
        let robots_free = coalition.iter().map(|&n| self.free_at[n]).fold(0.0, f64::max);
        let arrival = legs
            .iter()
            .map(|&(n, p)| self.free_at[n] + travel_time(p, self.d.phi.0[n]).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        let start_s = pred_end.max(robots_free);
        let end_s = pred_end.max(arrival) + self.d.network.tasks[task].work_duration;
        for &n in coalition {
            self.free_at[n] = end_s;
            self.location[n] = goal;
        }
        self.windows[task] = Some(TaskWindow { start_s, end_s });
        self.latest_end = self.latest_end.max(end_s);
        Ok(legs)
    }
}

fn topo_order(d: &ProblemDomain) -> Result<Vec<usize>> {
    d.network
        .topological_order()
        .ok_or_else(|| Error::invalid("task network has a cycle or an unknown edge endpoint"))
}

/// Turns a fixed allocation into a schedule and motion plans, or reports why it cannot.
///
/// Causes are checked in order: trait violations on allocated tasks, then precedence edges whose
/// predecessor has no robots while the successor does, then tasks left without robots, and
/// finally unreachable locations in execution order.
pub fn schedule_allocation(d: &ProblemDomain, a: &AllocationMatrix) -> Result<std::result::Result<Solution, Infeasibility>> {
    a.check_shape(d)?;
    let order = topo_order(d)?;
    let table = PathTable::new(d);
    Ok(schedule_with_table(d, a, &order, &table))
}

fn trait_gap(d: &ProblemDomain, task: usize, coalition: &[usize]) -> Option<Infeasibility> {
    let requirement = &d.ystar.rows[task];
    let aggregate = d.coalition_traits(coalition);
    let ok = !coalition.is_empty() && coalition_satisfies(requirement, &aggregate).unwrap_or(false);
    (!ok).then(|| Infeasibility::TraitViolation { task, requirement: requirement.clone(), aggregate })
}

fn schedule_with_table(
    d: &ProblemDomain,
    a: &AllocationMatrix,
    order: &[usize],
    table: &PathTable<'_>,
) -> std::result::Result<Solution, Infeasibility> {
    let coalitions: Vec<Vec<usize>> = (0..d.n_tasks()).map(|m| a.coalition(m)).collect();
    for (m, c) in coalitions.iter().enumerate() {
        if !c.is_empty() {
            if let Some(v) = trait_gap(d, m, c) {
                return Err(v);
            }
        }
    }
    for &(before, after) in &d.network.edges {
        if coalitions[before].is_empty() && !coalitions[after].is_empty() {
            return Err(Infeasibility::PrecedenceViolation { before, after });
        }
    }
    for (m, c) in coalitions.iter().enumerate() {
        if c.is_empty() {
            return Err(trait_gap(d, m, c).expect("empty coalition never satisfies"));
        }
    }
    let mut sim = Simulator::new(d, table);
    let mut motions = vec![Vec::new(); d.n_tasks()];
    for &m in order {
        motions[m] = sim
            .place(m, &coalitions[m])
            .map_err(|robot| Infeasibility::NoMotionPlan { task: m, robot })?
            .into_iter()
            .map(|(n, p)| (n, p.clone()))
            .collect();
    }
    let windows = sim.windows.into_iter().map(|w| w.expect("every task placed")).collect();
    Ok(Solution { allocation: a.clone(), schedule: Schedule::new(windows, a), motions })
}

/// Coalitions that satisfy `task`'s requirement and lose that property if any member leaves.
/// Always non-empty sets; ascending by size then members.
pub fn minimal_coalitions(d: &ProblemDomain, task: usize) -> Vec<Vec<usize>> {
    let n = d.n_robots();
    assert!(n < usize::BITS as usize, "too many robots for subset enumeration");
    let req = &d.ystar.rows[task];
    let satisfies = |c: &[usize]| !c.is_empty() && coalition_satisfies(req, &d.coalition_traits(c)).unwrap_or(false);
    let mut out: Vec<Vec<usize>> = (1usize..(1 << n))
        .map(|mask| (0..n).filter(|&r| mask & (1 << r) != 0).collect::<Vec<_>>())
        .filter(|c| satisfies(c))
        .filter(|c| {
            c.len() == 1
                || (0..c.len()).all(|skip| {
                    let sub: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                    !satisfies(&sub)
                })
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Finds a minimum-makespan solution.
///
/// Branch and bound over one minimal satisfying coalition per task, in topological order; the
/// partial makespan bounds every completion because placing more tasks never moves earlier ones.
/// Among equal makespans (within [`TIME_EPS`]) the lexicographically smallest allocation wins.
pub fn solve(d: &ProblemDomain) -> Result<Solution> {
    let violations = validate_domain(d);
    if let Some(v) = violations.first() {
        return Err(Error::invalid(format!("domain is malformed: {v}")));
    }
    let order = topo_order(d)?;
    let table = PathTable::new(d);

    let mut candidates = Vec::with_capacity(d.n_tasks());
    for m in 0..d.n_tasks() {
        let loc = d.network.tasks[m].location;
        let reachable: Vec<Vec<usize>> = minimal_coalitions(d, m)
            .into_iter()
            .filter(|c| c.iter().all(|&n| table.get(d.map.starts[n], loc).is_some()))
            .collect();
        if reachable.is_empty() {
            return Err(Error::Unsolvable { task: d.task_name(m).to_string() });
        }
        candidates.push(reachable);
    }

    let mut search = Search {
        order: &order,
        candidates: &candidates,
        chosen: vec![Vec::new(); d.n_tasks()],
        best: None,
        n_robots: d.n_robots(),
    };
    search.descend(0, Simulator::new(d, &table));
    let (_, best) = search.best.expect("every task has a reachable coalition");
    schedule_with_table(d, &best, &order, &table)
        .map_err(|cause| Error::invalid(format!("internal: best allocation became infeasible ({cause})")))
}

struct Search<'s> {
    order: &'s [usize],
    candidates: &'s [Vec<Vec<usize>>],
    chosen: Vec<Vec<usize>>,
    best: Option<(f64, AllocationMatrix)>,
    n_robots: usize,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, sim: Simulator<'_>) {
        if let Some((best, _)) = &self.best {
            if sim.latest_end > best + TIME_EPS {
                return;
            }
        }
        if depth == self.order.len() {
            let a = AllocationMatrix::from_coalitions(self.n_robots, &self.chosen).expect("indices in range");
            let better = match &self.best {
                None => true,
                Some((best, incumbent)) => {
                    sim.latest_end < best - TIME_EPS
                        || ((sim.latest_end - best).abs() <= TIME_EPS && a < *incumbent)
                }
            };
            if better {
                let value = self.best.as_ref().map_or(sim.latest_end, |(b, _)| b.min(sim.latest_end));
                self.best = Some((value, a));
            }
            return;
        }
        let task = self.order[depth];
        for c in &self.candidates[task] {
            let mut next = sim.clone();
            // Unreachable candidates were filtered against start cells; grid connectivity is
            // symmetric, so every later leg is reachable too.
            if next.place(task, c).is_err() {
                continue;
            }
            self.chosen[task] = c.clone();
            self.descend(depth + 1, next);
        }
        self.chosen[task].clear();
    }
}
