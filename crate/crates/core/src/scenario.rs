//! Error-injection scenarios and repair metrics.
//!
//! A scenario pairs a ground-truth domain with a presented copy carrying seeded errors in robot
//! traits, task requirements and speeds. Operators repair the presented copy one value at a time;
//! metrics measure what is left unresolved and how many edits it took.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{diff_domains, DomainDiff, ProblemDomain, Site, SiteCategory, TraitClass};
use crate::error::{Error, Result};
use crate::fixtures;

/// Multiplicative perturbations for cumulative traits and speeds.
pub const PERTURBATION_FACTORS: [f64; 6] = [0.1, 0.2, 0.5, 2.0, 5.0, 10.0];

/// Error counts per category: (robot trait errors, task requirement errors, speed errors).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct ErrorTuple {
    pub robot: usize,
    pub task: usize,
    pub speed: usize,
}

impl ErrorTuple {
    pub const fn new(robot: usize, task: usize, speed: usize) -> Self {
        ErrorTuple { robot, task, speed }
    }

    pub fn total(&self) -> usize {
        self.robot + self.task + self.speed
    }

    pub fn get(&self, category: SiteCategory) -> usize {
        match category {
            SiteCategory::Robot => self.robot,
            SiteCategory::Task => self.task,
            SiteCategory::Speed => self.speed,
        }
    }
}

impl From<[usize; 3]> for ErrorTuple {
    fn from([robot, task, speed]: [usize; 3]) -> Self {
        ErrorTuple { robot, task, speed }
    }
}

impl From<ErrorTuple> for [usize; 3] {
    fn from(t: ErrorTuple) -> Self {
        [t.robot, t.task, t.speed]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub seed: u64,
    pub error_tuple: ErrorTuple,
    /// D*
    pub truth: ProblemDomain,
    /// D, as shown to the operator.
    pub presented: ProblemDomain,
    pub injected: DomainDiff,
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn class_of(d: &ProblemDomain, site: Site) -> Option<TraitClass> {
    match site {
        Site::RobotTrait { trait_idx, .. } | Site::TaskRequirement { trait_idx, .. } => {
            d.traits.get(trait_idx).map(|t| t.class)
        }
        Site::Speed { .. } => None,
    }
}

/// Sites that can be corrupted so the value actually changes: every binary trait, and cumulative
/// traits and speeds of at least 0.1.
pub fn corruptible_sites(d: &ProblemDomain, category: SiteCategory) -> Vec<Site> {
    d.sites()
        .into_iter()
        .filter(|s| s.category() == category)
        .filter(|&s| match (class_of(d, s), d.value(s)) {
            (Some(TraitClass::Binary), Some(_)) => true,
            (_, Some(v)) => v >= 0.1,
            (_, None) => false,
        })
        .collect()
}

fn corrupt(d: &ProblemDomain, site: Site, rng: &mut ChaCha8Rng) -> f64 {
    let v = d.value(site).expect("site drawn from the domain");
    if class_of(d, site) == Some(TraitClass::Binary) {
        return if v > 0.0 { 0.0 } else { 1.0 };
    }
    let first = rng.gen_range(0..PERTURBATION_FACTORS.len());
    (0..PERTURBATION_FACTORS.len())
        .map(|i| round2(v * PERTURBATION_FACTORS[(first + i) % PERTURBATION_FACTORS.len()]))
        .find(|&nv| nv != v && nv > 0.0)
        .expect("values of at least 0.1 always move under some factor")
}

/// Corrupts `truth` with the given number of errors per category, deterministically per seed.
/// Binary traits flip; cumulative traits and speeds are scaled by a factor from
/// [`PERTURBATION_FACTORS`]. No site is corrupted twice.
pub fn generate_scenario(truth: &ProblemDomain, tuple: ErrorTuple, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut presented = truth.clone();
    for category in [SiteCategory::Robot, SiteCategory::Task, SiteCategory::Speed] {
        let wanted = tuple.get(category);
        let pool = corruptible_sites(truth, category);
        if wanted > pool.len() {
            return Err(Error::invalid(format!(
                "{wanted} {category:?} errors requested but only {} sites can be corrupted",
                pool.len()
            )));
        }
        let picked: Vec<Site> = pool.choose_multiple(&mut rng, wanted).copied().collect();
        for site in picked {
            let nv = corrupt(truth, site, &mut rng);
            presented = presented.with_value(site, nv)?;
        }
    }
    let injected = diff_domains(&presented, truth)?;
    Ok(Scenario {
        label: format!("custom-{}-{}-{}-{seed}", tuple.robot, tuple.task, tuple.speed),
        seed,
        error_tuple: tuple,
        truth: truth.clone(),
        presented,
        injected,
    })
}

/// One operator edit: set `site` to `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairEdit {
    pub site: Site,
    pub value: f64,
}

/// Returns a copy of `presented` with exactly one value changed.
pub fn apply_repair(presented: &ProblemDomain, edit: RepairEdit) -> Result<ProblemDomain> {
    let v = edit.value;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invalid(format!("value {v} must be finite and non-negative")));
    }
    if matches!(edit.site, Site::Speed { .. }) && v == 0.0 {
        return Err(Error::invalid("speed must be positive"));
    }
    if class_of(presented, edit.site) == Some(TraitClass::Binary) && v != 0.0 && v != 1.0 {
        return Err(Error::invalid(format!("binary trait takes 0 or 1, got {v}")));
    }
    presented.with_value(edit.site, v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionMetrics {
    pub repair_actions: usize,
    /// Every site still differing from the truth, including ones the operator broke.
    pub remaining: DomainDiff,
    /// Injected sites now equal to the truth.
    pub corrected: usize,
    /// Sites that were right and were edited away from the truth.
    pub introduced: usize,
    pub rte_pct: f64,
    pub tre_pct: f64,
    pub rse_pct: f64,
    pub extraneous_corrections: usize,
}

pub fn compute_metrics(scenario: &Scenario, final_domain: &ProblemDomain, repair_actions: usize) -> Result<SessionMetrics> {
    let remaining = diff_domains(final_domain, &scenario.truth)?;
    let still_wrong: HashSet<Site> = remaining.sites().collect();
    let injected: HashSet<Site> = scenario.injected.sites().collect();
    let pct = |category: SiteCategory| {
        let total = scenario.injected.count(category);
        if total == 0 {
            return 0.0;
        }
        let left = scenario
            .injected
            .sites()
            .filter(|s| s.category() == category && still_wrong.contains(s))
            .count();
        left as f64 / total as f64 * 100.0
    };
    let corrected = injected.iter().filter(|s| !still_wrong.contains(s)).count();
    let introduced = still_wrong.iter().filter(|s| !injected.contains(s)).count();
    Ok(SessionMetrics {
        repair_actions,
        corrected,
        introduced,
        rte_pct: pct(SiteCategory::Robot),
        tre_pct: pct(SiteCategory::Task),
        rse_pct: pct(SiteCategory::Speed),
        extraneous_corrections: repair_actions.saturating_sub(corrected),
        remaining,
    })
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub tuple: ErrorTuple,
    pub seed: u64,
}

/// The six study scenarios, two of them error-free.
pub const CATALOG: [CatalogEntry; 6] = [
    CatalogEntry { name: "s1", tuple: ErrorTuple::new(0, 0, 0), seed: 11 },
    CatalogEntry { name: "s2", tuple: ErrorTuple::new(3, 1, 1), seed: 12 },
    CatalogEntry { name: "s3", tuple: ErrorTuple::new(0, 0, 0), seed: 13 },
    CatalogEntry { name: "s4", tuple: ErrorTuple::new(2, 2, 1), seed: 14 },
    CatalogEntry { name: "s5", tuple: ErrorTuple::new(0, 5, 0), seed: 15 },
    CatalogEntry { name: "s6", tuple: ErrorTuple::new(3, 2, 0), seed: 16 },
];

pub fn catalog_scenario(name: &str) -> Option<Scenario> {
    let entry = CATALOG.iter().find(|e| e.name == name)?;
    let truth = fixtures::emergency_response(entry.seed);
    let mut s = generate_scenario(&truth, entry.tuple, entry.seed).expect("catalog tuples fit the fixture");
    s.label = entry.name.to_string();
    Some(s)
}
