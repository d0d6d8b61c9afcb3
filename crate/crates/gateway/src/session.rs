//! One operator session: a scenario, the domain as the operator has edited it, the system
//! solution for that domain, and everything the operator asked along the way.
//!
//! The struct is the persisted document itself, so reloading and re-serializing a session
//! reproduces the stored bytes.

use serde::{Deserialize, Serialize};

use robofoil_core::explain::{explain, ExplainConfig, Explanation};
use robofoil_core::foil::build_foil;
use robofoil_core::planner::solve;
use robofoil_core::scenario::{apply_repair, compute_metrics, Scenario};
use robofoil_core::wire::{
    foil_from_wire, DomainFile, EditWire, FactorSetWire, FoilChangeWire, FoilOutcomeWire, MetricsWire, ScenarioFile,
    SolutionWire,
};
use robofoil_core::{compare, filter_critical, Error as CoreError, ProblemDomain, Solution};

use crate::error::{GatewayError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Open,
    DeclaredCorrect,
    GaveUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Judgment {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinalVerdict {
    DeclaredCorrect,
    GaveUp,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// The operator's first reading of the system solution.
    pub initial: Option<Judgment>,
    pub last: Option<FinalVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoilRecord {
    pub foil: Vec<FoilChangeWire>,
    pub outcome: FoilOutcomeWire,
    /// Critical factors; absent for infeasible foils.
    pub factors: Option<FactorSetWire>,
    pub explanation: Explanation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub scenario: ScenarioFile,
    pub live_domain: DomainFile,
    /// System solution for `live_domain`; `None` while the edited domain has no solution.
    pub solution: Option<SolutionWire>,
    /// Why `live_domain` has no solution.
    pub unsolvable: Option<String>,
    pub foil_history: Vec<FoilRecord>,
    pub repair_log: Vec<EditWire>,
    pub status: Status,
    pub verdicts: Verdicts,
    pub metrics: Option<MetricsWire>,
}

fn solve_state(d: &ProblemDomain) -> Result<(Option<SolutionWire>, Option<String>)> {
    match solve(d) {
        Ok(s) => Ok((Some(SolutionWire::from_solution(d, &s)), None)),
        Err(e @ (CoreError::Unsolvable { .. } | CoreError::NoPath { .. })) => Ok((None, Some(e.to_string()))),
        Err(e) => Err(e.into()),
    }
}

impl Session {
    /// Solves the presented domain. A scenario without a solution is refused.
    pub fn create(id: String, scenario: &Scenario, initial: Option<Judgment>) -> Result<Session> {
        let d = &scenario.presented;
        let violations = robofoil_core::domain::validate_domain(d);
        if let Some(v) = violations.first() {
            return Err(GatewayError::Invalid(format!("scenario domain is malformed: {v}")));
        }
        let solution = solve(d)?;
        Ok(Session {
            id,
            scenario: ScenarioFile::from_scenario(scenario),
            live_domain: DomainFile::from_domain(d),
            solution: Some(SolutionWire::from_solution(d, &solution)),
            unsolvable: None,
            foil_history: Vec::new(),
            repair_log: Vec::new(),
            status: Status::Open,
            verdicts: Verdicts { initial, last: None },
            metrics: None,
        })
    }

    pub fn domain(&self) -> Result<ProblemDomain> {
        Ok(self.live_domain.clone().into_domain()?)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(self.scenario.clone().into_scenario()?)
    }

    pub fn system_solution(&self, d: &ProblemDomain) -> Result<Option<Solution>> {
        self.solution.clone().map(|s| s.into_solution(d)).transpose().map_err(Into::into)
    }

    fn ensure_open(&self) -> Result<()> {
        match self.status {
            Status::Open => Ok(()),
            s => Err(GatewayError::Conflict(format!("session {} is closed ({s:?})", self.id))),
        }
    }

    /// Builds, compares and explains a foil against the current system solution. The system
    /// solution is left as it is.
    pub fn post_foil(&mut self, changes: Vec<FoilChangeWire>) -> Result<&FoilRecord> {
        self.ensure_open()?;
        let d = self.domain()?;
        let Some(system) = self.system_solution(&d)? else {
            return Err(GatewayError::Conflict(format!(
                "session {} has no system solution to question: {}",
                self.id,
                self.unsolvable.as_deref().unwrap_or("unsolvable")
            )));
        };
        let q = foil_from_wire(&d, &changes)?;
        let outcome = build_foil(&d, &system, &q)?;
        let cfg = ExplainConfig::for_domain(&d);
        let factors = match outcome.solution() {
            Some(foil) => Some(filter_critical(
                &compare(cfg.formula, &system.allocation, &system.schedule, &foil.allocation, &foil.schedule)?,
                cfg.z,
            )),
            None => None,
        };
        let explanation = explain(&d, &system, &outcome, factors.as_ref(), &cfg)?;
        self.foil_history.push(FoilRecord {
            foil: changes,
            outcome: FoilOutcomeWire::from_outcome(&d, &outcome),
            factors: factors.as_ref().map(|f| FactorSetWire::from_factors(&d, f)),
            explanation,
        });
        Ok(self.foil_history.last().expect("just pushed"))
    }

    /// Applies one edit to the live domain and re-solves it. An unsolvable result is recorded
    /// rather than refused, so the operator can keep repairing.
    pub fn patch_domain(&mut self, edit: EditWire) -> Result<()> {
        self.ensure_open()?;
        let d = self.domain()?;
        let repaired = apply_repair(&d, edit.resolve(&d)?)?;
        let (solution, unsolvable) = solve_state(&repaired)?;
        self.live_domain = DomainFile::from_domain(&repaired);
        self.solution = solution;
        self.unsolvable = unsolvable;
        self.repair_log.push(edit);
        Ok(())
    }

    /// Metrics against the ground truth for the domain as it stands.
    pub fn current_metrics(&self) -> Result<MetricsWire> {
        if let Some(m) = &self.metrics {
            return Ok(m.clone());
        }
        let scenario = self.scenario()?;
        let m = compute_metrics(&scenario, &self.domain()?, self.repair_log.len())?;
        Ok(MetricsWire::from_metrics(&scenario.presented, &m))
    }

    pub fn finalize(&mut self, verdict: FinalVerdict) -> Result<MetricsWire> {
        self.ensure_open()?;
        let metrics = self.current_metrics()?;
        self.status = match verdict {
            FinalVerdict::DeclaredCorrect => Status::DeclaredCorrect,
            FinalVerdict::GaveUp => Status::GaveUp,
        };
        self.verdicts.last = Some(verdict);
        self.metrics = Some(metrics.clone());
        Ok(metrics)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("session serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Session> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use robofoil_core::scenario::catalog_scenario;
    use robofoil_core::wire::SiteWire;

    fn open(name: &str) -> Session {
        Session::create("0001".into(), &catalog_scenario(name).unwrap(), Some(Judgment::Incorrect)).unwrap()
    }

    #[test]
    fn error_free_scenario_has_a_solution() {
        let s = open("s1");
        assert!(s.solution.is_some() && s.unsolvable.is_none());
        assert_eq!(s.status, Status::Open);
    }

    #[test]
    fn no_op_edit_keeps_solution_bytes() {
        let mut s = open("s2");
        let before = serde_json::to_string(&s.solution).unwrap();
        let d = s.domain().unwrap();
        let edit = EditWire { site: SiteWire::Speed { robot: "ambulance".into() }, value: d.phi.0[3] };
        s.patch_domain(edit).unwrap();
        assert_eq!(serde_json::to_string(&s.solution).unwrap(), before);
        assert_eq!(s.repair_log.len(), 1);
    }

    #[test]
    fn closed_session_refuses_changes() {
        let mut s = open("s1");
        s.finalize(FinalVerdict::DeclaredCorrect).unwrap();
        assert!(matches!(s.finalize(FinalVerdict::GaveUp), Err(GatewayError::Conflict(_))));
        let edit = EditWire { site: SiteWire::Speed { robot: "ambulance".into() }, value: 8.0 };
        assert!(matches!(s.patch_domain(edit), Err(GatewayError::Conflict(_))));
        let foil = vec![FoilChangeWire { robot: "dumptruck".into(), task: "D1".into(), op: robofoil_core::foil::FoilOp::Assign }];
        assert!(matches!(s.post_foil(foil), Err(GatewayError::Conflict(_))));
    }

    #[test]
    fn malformed_foil_is_invalid() {
        let mut s = open("s1");
        assert!(matches!(s.post_foil(vec![]), Err(GatewayError::Invalid(_))));
        assert!(s.foil_history.is_empty());
    }

    #[test]
    fn give_up_with_two_left() {
        let mut s = open("s4");
        let sc = s.scenario().unwrap();
        let d = &sc.presented;
        // Fix all but two injected sites.
        for e in sc.injected.entries.iter().skip(2) {
            let wire = robofoil_core::wire::EditWire::from_edit(d, robofoil_core::scenario::RepairEdit { site: e.site, value: e.expected });
            s.patch_domain(wire).unwrap();
        }
        let m = s.finalize(FinalVerdict::GaveUp).unwrap();
        assert_eq!(m.remaining.len(), 2);
        assert_eq!(m.repair_actions, 3);
        assert_eq!(m.extraneous_corrections, 0);
        assert_eq!(s.status, Status::GaveUp);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let mut s = open("s2");
        let d = s.domain().unwrap();
        let sys = s.system_solution(&d).unwrap().unwrap();
        let d1 = d.task_index("D1").unwrap();
        let other = (0..d.n_robots()).find(|n| !sys.allocation.coalition(d1).contains(n)).unwrap();
        s.post_foil(vec![FoilChangeWire {
            robot: d.robot_name(other).into(),
            task: "D1".into(),
            op: robofoil_core::foil::FoilOp::Assign,
        }])
        .unwrap();
        let text = s.to_json();
        let back = Session::from_json(text.as_bytes()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), text);
    }
}
