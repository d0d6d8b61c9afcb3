//! Differences between the system solution and a foil solution, and the threshold that keeps
//! only the ones worth explaining.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::{AllocationMatrix, Schedule};

/// Default critical threshold on |percent difference|.
pub const DEFAULT_Z: f64 = 0.1;

/// A task whose coalition changed between A and A'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationFactor {
    pub task: usize,
    pub system: Vec<usize>,
    pub foil: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    /// λ
    Makespan,
    /// β_m
    TaskTime,
    /// α_n
    RobotMakespan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleFactor {
    pub kind: FactorKind,
    /// Task index for `TaskTime`, robot index for `RobotMakespan`, `None` for `Makespan`.
    pub subject: Option<usize>,
    pub system: f64,
    pub foil: f64,
    pub pd: f64,
    pub critical: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FactorSet {
    pub allocation: Vec<AllocationFactor>,
    pub schedule: Vec<ScheduleFactor>,
}

impl FactorSet {
    pub fn makespan(&self) -> Option<&ScheduleFactor> {
        self.schedule.iter().find(|f| f.kind == FactorKind::Makespan)
    }

    pub fn find(&self, kind: FactorKind, subject: usize) -> Option<&ScheduleFactor> {
        self.schedule.iter().find(|f| f.kind == kind && f.subject == Some(subject))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercentFormula {
    /// (f − s) / ((f + s) / 2)
    #[default]
    Symmetric,
    /// (f − s) / s
    Relative,
}

/// One factor per task whose coalition differs, in task order.
pub fn compare_allocations(a: &AllocationMatrix, a_prime: &AllocationMatrix) -> Result<Vec<AllocationFactor>> {
    if a.n_tasks() != a_prime.n_tasks() || a.n_robots() != a_prime.n_robots() {
        return Err(Error::invalid("allocation matrices differ in shape"));
    }
    Ok((0..a.n_tasks())
        .filter_map(|m| {
            let (system, foil) = (a.coalition(m), a_prime.coalition(m));
            (system != foil).then_some(AllocationFactor { task: m, system, foil })
        })
        .collect())
}

/// Signed symmetric percent difference of the foil value against the system value, as a ratio.
/// Two zero durations differ by nothing.
pub fn percent_difference(system_s: f64, foil_s: f64) -> f64 {
    percent_difference_with(PercentFormula::Symmetric, system_s, foil_s)
}

pub fn percent_difference_with(formula: PercentFormula, system_s: f64, foil_s: f64) -> f64 {
    if system_s == foil_s {
        return 0.0;
    }
    let denom = match formula {
        PercentFormula::Symmetric => (foil_s + system_s) / 2.0,
        PercentFormula::Relative => system_s,
    };
    if denom == 0.0 {
        return if foil_s > system_s { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    (foil_s - system_s) / denom
}

/// Whole percent of |pd|, truncated toward zero.
pub fn render_percent(pd: f64) -> u64 {
    // Guard against products like 0.32 * 100 = 31.999999999999996.
    (pd.abs() * 100.0 + 1e-9).floor() as u64
}

/// λ, then β per task, then α per robot that works in at least one of the two schedules.
pub fn compare_schedules(sigma: &Schedule, sigma_prime: &Schedule) -> Result<Vec<ScheduleFactor>> {
    compare_schedules_with(PercentFormula::Symmetric, sigma, sigma_prime)
}

pub fn compare_schedules_with(
    formula: PercentFormula,
    sigma: &Schedule,
    sigma_prime: &Schedule,
) -> Result<Vec<ScheduleFactor>> {
    if sigma.windows.len() != sigma_prime.windows.len()
        || sigma.robot_makespans.len() != sigma_prime.robot_makespans.len()
    {
        return Err(Error::invalid("schedules cover different tasks or robots"));
    }
    let factor = |kind, subject, system: f64, foil: f64| ScheduleFactor {
        kind,
        subject,
        system,
        foil,
        pd: percent_difference_with(formula, system, foil),
        critical: false,
    };
    let mut out = vec![factor(FactorKind::Makespan, None, sigma.makespan(), sigma_prime.makespan())];
    for m in 0..sigma.windows.len() {
        out.push(factor(FactorKind::TaskTime, Some(m), sigma.task_time(m), sigma_prime.task_time(m)));
    }
    for n in 0..sigma.robot_makespans.len() {
        if sigma.robot_makespans[n].is_none() && sigma_prime.robot_makespans[n].is_none() {
            continue;
        }
        out.push(factor(
            FactorKind::RobotMakespan,
            Some(n),
            sigma.robot_makespan(n),
            sigma_prime.robot_makespan(n),
        ));
    }
    Ok(out)
}

pub fn compare(
    formula: PercentFormula,
    a: &AllocationMatrix,
    sigma: &Schedule,
    a_prime: &AllocationMatrix,
    sigma_prime: &Schedule,
) -> Result<FactorSet> {
    Ok(FactorSet {
        allocation: compare_allocations(a, a_prime)?,
        schedule: compare_schedules_with(formula, sigma, sigma_prime)?,
    })
}

/// Keeps schedule factors with |pd| ≥ `z`, flagged critical; allocation factors are always kept.
pub fn filter_critical(f: &FactorSet, z: f64) -> FactorSet {
    FactorSet {
        allocation: f.allocation.clone(),
        schedule: f
            .schedule
            .iter()
            .filter(|s| s.pd.abs() >= z)
            .map(|s| ScheduleFactor { critical: true, ..s.clone() })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::TaskWindow;

    fn minutes(m: f64) -> f64 {
        m * 60.0
    }

    #[test]
    fn headline_values_render_32() {
        assert_eq!(render_percent(percent_difference(minutes(45.55), minutes(63.4))), 32);
        assert_eq!(render_percent(percent_difference(minutes(45.65), minutes(63.22))), 32);
        // The naive ratio would not.
        assert_eq!(render_percent(percent_difference_with(PercentFormula::Relative, 45.55, 63.4)), 39);
        assert_eq!(render_percent(percent_difference_with(PercentFormula::Relative, 45.65, 63.22)), 38);
    }

    #[test]
    fn equal_and_zero() {
        assert_eq!(percent_difference(12.0, 12.0), 0.0);
        assert_eq!(percent_difference(0.0, 0.0), 0.0);
        assert_eq!(percent_difference(0.0, 5.0), 2.0);
    }

    #[test]
    fn truncation_is_toward_zero() {
        assert_eq!(render_percent(0.329), 32);
        assert_eq!(render_percent(-0.329), 32);
        assert_eq!(render_percent(0.32), 32);
        assert_eq!(render_percent(0.0999), 9);
    }

    #[test]
    fn allocation_identity_and_moves() {
        let a = AllocationMatrix::from_coalitions(2, &[vec![0], vec![1], vec![0, 1]]).unwrap();
        assert!(compare_allocations(&a, &a).unwrap().is_empty());
        let b = AllocationMatrix::from_coalitions(2, &[vec![1], vec![1], vec![0]]).unwrap();
        let f = compare_allocations(&a, &b).unwrap();
        assert_eq!(
            f,
            vec![
                AllocationFactor { task: 0, system: vec![0], foil: vec![1] },
                AllocationFactor { task: 2, system: vec![0, 1], foil: vec![0] },
            ]
        );
        let wrong = AllocationMatrix::empty(3, 3);
        assert!(compare_allocations(&a, &wrong).is_err());
    }

    fn two_task_schedule(first: f64, second: f64) -> Schedule {
        // Robot 0 does task 0, robot 1 does task 1, both starting at 0.
        let a = AllocationMatrix::from_coalitions(2, &[vec![0], vec![1]]).unwrap();
        Schedule::new(
            vec![TaskWindow { start_s: 0.0, end_s: first }, TaskWindow { start_s: 0.0, end_s: second }],
            &a,
        )
    }

    #[test]
    fn identical_schedules_have_zero_pd() {
        let s = two_task_schedule(10.0, 20.0);
        let f = compare_schedules(&s, &s).unwrap();
        assert_eq!(f.len(), 1 + 2 + 2);
        assert!(f.iter().all(|x| x.pd == 0.0));
    }

    #[test]
    fn doubling_one_task() {
        let s = two_task_schedule(30.0, 20.0);
        let t = two_task_schedule(60.0, 20.0);
        let f = compare_schedules(&s, &t).unwrap();
        let nonzero: Vec<_> = f.iter().filter(|x| x.pd != 0.0).map(|x| (x.kind, x.subject)).collect();
        assert_eq!(
            nonzero,
            vec![
                (FactorKind::Makespan, None),
                (FactorKind::TaskTime, Some(0)),
                (FactorKind::RobotMakespan, Some(0))
            ]
        );
        // 2(60-30)/(90) = 2/3
        assert!((f[1].pd - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn idle_robots_are_skipped() {
        let a = AllocationMatrix::from_coalitions(3, &[vec![0], vec![1]]).unwrap();
        let s = Schedule::new(
            vec![TaskWindow { start_s: 0.0, end_s: 5.0 }, TaskWindow { start_s: 0.0, end_s: 6.0 }],
            &a,
        );
        let f = compare_schedules(&s, &s).unwrap();
        assert!(f.iter().all(|x| !(x.kind == FactorKind::RobotMakespan && x.subject == Some(2))));
    }

    #[test]
    fn filter_examples() {
        let mk = |pd: f64| ScheduleFactor { kind: FactorKind::Makespan, subject: None, system: 1.0, foil: 1.0, pd, critical: false };
        let set = FactorSet {
            allocation: vec![AllocationFactor { task: 0, system: vec![0], foil: vec![1] }],
            schedule: vec![mk(0.05), mk(0.32), mk(-0.1)],
        };
        let kept = filter_critical(&set, 0.1);
        assert_eq!(kept.allocation.len(), 1);
        assert_eq!(kept.schedule.iter().map(|f| f.pd).collect::<Vec<_>>(), vec![0.32, -0.1]);
        assert!(kept.schedule.iter().all(|f| f.critical));
        assert_eq!(filter_critical(&set, 0.0).schedule.len(), 3);
    }
}
