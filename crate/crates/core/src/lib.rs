//! Contrastive explanations for multi-robot task allocation and scheduling.
//!
//! A [`ProblemDomain`] is solved into a [`Solution`]; an operator proposes a foil ("why not
//! this robot on that task?"), the foil is scheduled or found infeasible, the two solutions are
//! compared and the differences worth mentioning are rendered as plain text.

pub mod compare;
pub mod domain;
pub mod error;
pub mod explain;
pub mod fixtures;
pub mod foil;
pub mod motion;
pub mod oracle;
pub mod planner;
pub mod scenario;
pub mod wire;

pub use compare::{compare, filter_critical, percent_difference, render_percent, FactorSet, DEFAULT_Z};
pub use domain::{ProblemDomain, Site};
pub use error::{Error, Result};
pub use explain::{explain, explain_foil, ExplainConfig, Explanation};
pub use foil::{build_foil, check_feasibility, FoilOutcome, FoilQuery, Verdict};
pub use motion::{plan_path, Path};
pub use planner::{schedule_allocation, solve, AllocationMatrix, Infeasibility, Schedule, Solution};
pub use scenario::{generate_scenario, ErrorTuple, Scenario, SessionMetrics};
