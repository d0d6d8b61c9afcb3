//! Counterfactual ("foil") solutions: the operator edits the system allocation and the scheduler
//! derives the matching schedule and motion plans, or the reason none exist.

use serde::{Deserialize, Serialize};

use crate::domain::{coalition_satisfies, ProblemDomain};
use crate::error::{Error, Result};
use crate::planner::{schedule_allocation, AllocationMatrix, Infeasibility, Solution, TIME_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoilOp {
    Assign,
    Unassign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoilChange {
    pub robot: usize,
    pub task: usize,
    pub op: FoilOp,
}

/// "Why is robot r not on task t?" questions, plus removals, applied on top of the system
/// allocation in order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FoilQuery {
    pub changes: Vec<FoilChange>,
}

impl FoilQuery {
    pub fn new(changes: Vec<FoilChange>) -> Self {
        FoilQuery { changes }
    }

    pub fn assign(mut self, robot: usize, task: usize) -> Self {
        self.changes.push(FoilChange { robot, task, op: FoilOp::Assign });
        self
    }

    pub fn unassign(mut self, robot: usize, task: usize) -> Self {
        self.changes.push(FoilChange { robot, task, op: FoilOp::Unassign });
        self
    }

    /// Moves `task` from its current coalition to `robots`.
    pub fn reassign(system: &AllocationMatrix, task: usize, robots: &[usize]) -> Self {
        let mut q = FoilQuery::default();
        for n in system.coalition(task) {
            if !robots.contains(&n) {
                q = q.unassign(n, task);
            }
        }
        for &n in robots {
            q = q.assign(n, task);
        }
        q
    }

    /// The foil allocation A'.
    pub fn apply(&self, system: &AllocationMatrix) -> Result<AllocationMatrix> {
        if self.changes.is_empty() {
            return Err(Error::invalid("foil has no changes"));
        }
        let mut a = system.clone();
        for c in &self.changes {
            if c.robot >= a.n_robots() || c.task >= a.n_tasks() {
                return Err(Error::invalid(format!(
                    "foil references robot {} / task {} outside the {}x{} allocation",
                    c.robot,
                    c.task,
                    a.n_tasks(),
                    a.n_robots()
                )));
            }
            a.set(c.task, c.robot, c.op == FoilOp::Assign);
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FoilResult {
    Feasible(Solution),
    Infeasible(Infeasibility),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoilOutcome {
    /// A', kept even when no schedule exists so the allocation can still be compared.
    pub allocation: AllocationMatrix,
    pub result: FoilResult,
}

impl FoilOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match &self.result {
            FoilResult::Feasible(s) => Some(s),
            FoilResult::Infeasible(_) => None,
        }
    }

    pub fn cause(&self) -> Option<&Infeasibility> {
        match &self.result {
            FoilResult::Feasible(_) => None,
            FoilResult::Infeasible(c) => Some(c),
        }
    }
}

/// Builds S' = ⟨A', σ', M'⟩ from the operator's foil, or the first reason it cannot exist.
pub fn build_foil(d: &ProblemDomain, s: &Solution, q: &FoilQuery) -> Result<FoilOutcome> {
    let allocation = q.apply(&s.allocation)?;
    let result = match schedule_allocation(d, &allocation)? {
        Ok(sol) => FoilResult::Feasible(sol),
        Err(cause) => FoilResult::Infeasible(cause),
    };
    Ok(FoilOutcome { allocation, result })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Feasible,
    Infeasible(Infeasibility),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible)
    }
}

/// Audits a complete solution against the domain: trait coverage of every task, then every
/// precedence edge, then every robot's motion plans.
///
/// A robot's plans must chain from its start cell through its tasks in start-time order over
/// free cells, and the robot must be able to drive each leg before the task's work begins.
/// Timing that cannot be driven counts as a missing motion plan.
pub fn check_feasibility(d: &ProblemDomain, s: &Solution) -> Result<Verdict> {
    let a = &s.allocation;
    if a.n_tasks() != d.n_tasks()
        || a.n_robots() != d.n_robots()
        || s.schedule.windows.len() != d.n_tasks()
        || s.motions.len() != d.n_tasks()
    {
        return Err(Error::invalid("solution shape does not match the domain"));
    }

    for m in 0..d.n_tasks() {
        let coalition = a.coalition(m);
        let requirement = &d.ystar.rows[m];
        let aggregate = d.coalition_traits(&coalition);
        if coalition.is_empty() || !coalition_satisfies(requirement, &aggregate)? {
            return Ok(Verdict::Infeasible(Infeasibility::TraitViolation {
                task: m,
                requirement: requirement.clone(),
                aggregate,
            }));
        }
    }

    let w = &s.schedule.windows;
    for &(before, after) in &d.network.edges {
        if before >= w.len() || after >= w.len() {
            return Err(Error::invalid("precedence edge outside the schedule"));
        }
        if w[before].end_s > w[after].start_s + TIME_EPS {
            return Ok(Verdict::Infeasible(Infeasibility::PrecedenceViolation { before, after }));
        }
    }

    for n in 0..d.n_robots() {
        let mut tasks = a.tasks_of(n);
        tasks.sort_by(|&x, &y| {
            w[x].start_s.total_cmp(&w[y].start_s).then(w[x].end_s.total_cmp(&w[y].end_s)).then(x.cmp(&y))
        });
        let mut here = d.map.starts[n];
        let mut free_at = 0.0f64;
        for m in tasks {
            let goal = d.network.tasks[m].location;
            let ok = s.motion(m, n).is_some_and(|p| {
                let arrive = free_at + p.length_m / d.phi.0[n];
                let work_start = w[m].end_s - d.network.tasks[m].work_duration;
                p.is_valid_on(&d.map)
                    && p.start() == Some(here)
                    && p.goal() == Some(goal)
                    && w[m].start_s + TIME_EPS >= free_at
                    && arrive <= work_start + TIME_EPS * work_start.abs().max(1.0)
            });
            if !ok {
                return Ok(Verdict::Infeasible(Infeasibility::NoMotionPlan { task: m, robot: n }));
            }
            here = goal;
            free_at = w[m].end_s;
        }
    }
    Ok(Verdict::Feasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Cell;
    use crate::fixtures::{self, ModelError};
    use crate::planner::solve;

    #[test]
    fn solver_output_is_feasible() {
        for seed in 0..5 {
            let d = fixtures::emergency_response(seed);
            let s = solve(&d).unwrap();
            assert_eq!(check_feasibility(&d, &s).unwrap(), Verdict::Feasible, "seed {seed}");
        }
    }

    #[test]
    fn moving_d1_to_dumptruck_costs_time() {
        let d = fixtures::model_error(ModelError::SpeedError);
        let s = solve(&d).unwrap();
        let d1 = d.task_index("D1").unwrap();
        let amb = d.robot_index("ambulance").unwrap();
        let dump = d.robot_index("dumptruck").unwrap();
        assert_eq!(s.allocation.coalition(d1), vec![amb]);
        let out = build_foil(&d, &s, &FoilQuery::reassign(&s.allocation, d1, &[dump])).unwrap();
        let foil = out.solution().expect("feasible foil");
        assert!(foil.makespan() > s.makespan());
        assert_eq!(check_feasibility(&d, foil).unwrap(), Verdict::Feasible);
    }

    #[test]
    fn dumptruck_alone_on_rescue_is_trait_violation() {
        let d = fixtures::emergency_response(1);
        let s = solve(&d).unwrap();
        let h2 = d.task_index("H2").unwrap();
        let dump = d.robot_index("dumptruck").unwrap();
        let out = build_foil(&d, &s, &FoilQuery::reassign(&s.allocation, h2, &[dump])).unwrap();
        assert!(matches!(out.cause(), Some(Infeasibility::TraitViolation { task, .. }) if *task == h2));
    }

    #[test]
    fn empty_foil_rejected() {
        let d = fixtures::emergency_response(1);
        let s = solve(&d).unwrap();
        assert!(matches!(build_foil(&d, &s, &FoilQuery::default()), Err(Error::InvalidArgument(_))));
        let bad = FoilQuery::default().assign(99, 0);
        assert!(matches!(build_foil(&d, &s, &bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rescue_before_camp_is_precedence_violation() {
        let d = fixtures::emergency_response(2);
        let mut s = solve(&d).unwrap();
        let camp = d.task_index("C1").unwrap();
        let h1 = d.task_index("H1").unwrap();
        let camp_end = s.schedule.windows[camp].end_s;
        s.schedule.windows[h1].start_s = camp_end - 1.0;
        assert_eq!(
            check_feasibility(&d, &s).unwrap(),
            Verdict::Infeasible(Infeasibility::PrecedenceViolation { before: camp, after: h1 })
        );
    }

    #[test]
    fn path_through_blocked_cell_is_no_motion_plan() {
        let d = fixtures::emergency_response(2);
        let mut s = solve(&d).unwrap();
        let (task, robot, cell) = s
            .motions
            .iter()
            .enumerate()
            .find_map(|(m, legs)| {
                legs.iter().find(|(_, p)| p.cells.len() > 2).map(|(n, p)| (m, *n, p.cells[1]))
            })
            .unwrap();
        let mut d2 = d.clone();
        d2.map.blocked.insert(cell);
        assert_eq!(
            check_feasibility(&d2, &s).unwrap(),
            Verdict::Infeasible(Infeasibility::NoMotionPlan { task, robot })
        );
        // Corrupting the path itself is caught too.
        let legs = &mut s.motions[task];
        let leg = legs.iter_mut().find(|(n, _)| *n == robot).unwrap();
        leg.1.cells[1] = Cell::new(leg.1.cells[1].x + 5, leg.1.cells[1].y);
        assert!(!check_feasibility(&d, &s).unwrap().is_feasible());
    }

    #[test]
    fn foil_reproducing_system_allocation_reproduces_schedule() {
        let d = fixtures::emergency_response(4);
        let s = solve(&d).unwrap();
        let d1 = d.task_index("D1").unwrap();
        let q = FoilQuery::reassign(&s.allocation, d1, &s.allocation.coalition(d1));
        let q = if q.changes.is_empty() { q.assign(s.allocation.coalition(d1)[0], d1) } else { q };
        let out = build_foil(&d, &s, &q).unwrap();
        let foil = out.solution().unwrap();
        for (a, b) in s.schedule.windows.iter().zip(&foil.schedule.windows) {
            assert!((a.start_s - b.start_s).abs() <= 1e-9 && (a.end_s - b.end_s).abs() <= 1e-9);
        }
    }
}
