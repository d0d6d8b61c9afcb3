//! Emergency-response domain: one dumptruck, two firetrucks, one ambulance, and seven tasks
//! (two small debris, one large debris, two rescues, a camp and a bomb). Rescues need the camp.
//!
//! Layouts and ranged requirements are drawn from a seed so every scenario differs.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::*;

pub const CAPACITY: &str = "carrying_capacity";
pub const STRETCHER: &str = "stretcher";
pub const ARM: &str = "robotic_arm";
pub const FORKLIFT: &str = "forklift";

pub fn trait_specs() -> Vec<TraitSpec> {
    vec![
        TraitSpec::new(CAPACITY, TraitClass::Cumulative),
        TraitSpec::new(STRETCHER, TraitClass::Binary),
        TraitSpec::new(ARM, TraitClass::Binary),
        TraitSpec::new(FORKLIFT, TraitClass::Binary),
    ]
}

/// Robot name, traits `[capacity, stretcher, arm, forklift]`, speed in m/s.
pub const ROBOTS: [(&str, [f64; 4], f64); 4] = [
    ("dumptruck", [5000.0, 0.0, 0.0, 1.0], 4.0),
    ("firetruck1", [1500.0, 0.0, 1.0, 1.0], 7.0),
    ("firetruck2", [1500.0, 0.0, 1.0, 1.0], 7.0),
    ("ambulance", [2500.0, 1.0, 1.0, 0.0], 8.0),
];

const WIDTH: usize = 40;
const HEIGHT: usize = 30;
const CELL_SIZE: f64 = 25.0;

struct TaskKind {
    name: &'static str,
    label: &'static str,
    /// Inclusive capacity range and step; equal bounds for a fixed requirement.
    capacity: (f64, f64, f64),
    flags: [f64; 3],
    work: f64,
}

const TASKS: [TaskKind; 7] = [
    TaskKind { name: "D1", label: "Small Debris", capacity: (500.0, 1200.0, 50.0), flags: [0.0, 1.0, 1.0], work: 180.0 },
    TaskKind { name: "D2", label: "Small Debris", capacity: (500.0, 1200.0, 50.0), flags: [0.0, 1.0, 1.0], work: 180.0 },
    TaskKind { name: "D3", label: "Large Debris", capacity: (4200.0, 4200.0, 1.0), flags: [0.0, 0.0, 1.0], work: 300.0 },
    TaskKind { name: "H1", label: "Rescue Human", capacity: (100.0, 200.0, 10.0), flags: [1.0, 0.0, 0.0], work: 120.0 },
    TaskKind { name: "H2", label: "Rescue Human", capacity: (100.0, 200.0, 10.0), flags: [1.0, 0.0, 0.0], work: 120.0 },
    TaskKind { name: "C1", label: "Setup Camp", capacity: (2000.0, 2000.0, 1.0), flags: [0.0, 1.0, 0.0], work: 240.0 },
    TaskKind { name: "B1", label: "Defuse Bomb", capacity: (0.0, 0.0, 1.0), flags: [0.0, 1.0, 0.0], work: 200.0 },
];

const CAMP: usize = 5;
const RESCUES: [usize; 2] = [3, 4];

fn draw_capacity(rng: &mut ChaCha8Rng, (lo, hi, step): (f64, f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    let steps = ((hi - lo) / step).round() as u32;
    lo + f64::from(rng.gen_range(0..=steps)) * step
}

fn connected(map: &GridMap, cells: &[Cell]) -> bool {
    let Some(&first) = cells.first() else { return true };
    let mut seen = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(c) = queue.pop_front() {
        let candidates = [
            c.y.checked_sub(1).map(|y| Cell::new(c.x, y)),
            Some(Cell::new(c.x + 1, c.y)),
            Some(Cell::new(c.x, c.y + 1)),
            c.x.checked_sub(1).map(|x| Cell::new(x, c.y)),
        ];
        for n in candidates.into_iter().flatten() {
            if map.is_free(n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    cells.iter().all(|c| seen.contains(c))
}

/// Ground-truth emergency-response domain for `seed`.
pub fn emergency_response(seed: u64) -> ProblemDomain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut blocked = BTreeSet::new();
        for _ in 0..12 {
            let (w, h) = (rng.gen_range(2..6), rng.gen_range(2..6));
            let (x0, y0) = (rng.gen_range(0..WIDTH - w), rng.gen_range(0..HEIGHT - h));
            for x in x0..x0 + w {
                for y in y0..y0 + h {
                    blocked.insert(Cell::new(x, y));
                }
            }
        }
        let mut used = BTreeSet::new();
        let mut pick = |rng: &mut ChaCha8Rng| loop {
            let c = Cell::new(rng.gen_range(0..WIDTH), rng.gen_range(0..HEIGHT));
            if !blocked.contains(&c) && used.insert(c) {
                return c;
            }
        };
        let starts: Vec<Cell> = ROBOTS.iter().map(|_| pick(&mut rng)).collect();
        let locations: Vec<Cell> = TASKS.iter().map(|_| pick(&mut rng)).collect();
        let map = GridMap { width: WIDTH, height: HEIGHT, cell_size: CELL_SIZE, blocked, starts };
        let all: Vec<Cell> = map.starts.iter().chain(&locations).copied().collect();
        if !connected(&map, &all) {
            continue;
        }
        let requirements: Vec<TraitVector> = TASKS
            .iter()
            .map(|k| {
                let cap = draw_capacity(&mut rng, k.capacity);
                TraitVector(vec![cap, k.flags[0], k.flags[1], k.flags[2]])
            })
            .collect();
        return assemble(map, locations, requirements);
    }
}

fn assemble(map: GridMap, locations: Vec<Cell>, requirements: Vec<TraitVector>) -> ProblemDomain {
    let tasks = TASKS
        .iter()
        .zip(locations)
        .map(|(k, location)| Task {
            name: k.name.to_string(),
            label: Some(k.label.to_string()),
            location,
            work_duration: k.work,
        })
        .collect();
    ProblemDomain {
        traits: trait_specs(),
        q: RobotTraitMatrix {
            robot_ids: ROBOTS.iter().map(|r| r.0.to_string()).collect(),
            rows: ROBOTS.iter().map(|r| TraitVector(r.1.to_vec())).collect(),
        },
        phi: SpeedVector(ROBOTS.iter().map(|r| r.2).collect()),
        network: TaskNetwork { tasks, edges: RESCUES.iter().map(|&h| (CAMP, h)).collect() },
        ystar: DesiredTraitMatrix { rows: requirements },
        map,
    }
}

/// Four ways the operator's model can be wrong about the same disaster site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelError {
    /// Ambulance reported with a forklift; D1 needs one.
    RobotTraitError,
    /// D1 reported as needing a robotic arm.
    RequirementError,
    /// Ambulance reported at 40 m/s.
    SpeedError,
    /// Dumptruck reported with an arm, D1 requirement off, ambulance at 40 m/s.
    Combined,
}

impl ModelError {
    pub const ALL: [ModelError; 4] =
        [Self::RobotTraitError, Self::RequirementError, Self::SpeedError, Self::Combined];
}

/// A hand-placed 40×30 site with 50 m cells. The ambulance parks next to D1, so a fast
/// ambulance takes D1 on its own and the obvious alternative is the slow dumptruck.
pub fn model_error(row: ModelError) -> ProblemDomain {
    let starts = vec![Cell::new(4, 16), Cell::new(22, 14), Cell::new(14, 19), Cell::new(38, 15)];
    let locations = vec![
        Cell::new(39, 15), // D1
        Cell::new(18, 0),  // D2
        Cell::new(38, 12), // D3
        Cell::new(17, 0),  // H1
        Cell::new(3, 21),  // H2
        Cell::new(17, 21), // C1
        Cell::new(4, 9),   // B1
    ];
    // (x, y, length, vertical)
    let walls = [(22, 10, 3, false), (33, 14, 17, false), (0, 7, 19, true), (4, 21, 19, false), (29, 2, 13, true), (28, 14, 15, true)];
    let mut blocked = BTreeSet::new();
    for (x, y, len, vertical) in walls {
        for i in 0..len {
            let c = if vertical { Cell::new(x, y + i) } else { Cell::new(x + i, y) };
            if c.x < WIDTH && c.y < HEIGHT && !starts.contains(&c) && !locations.contains(&c) {
                blocked.insert(c);
            }
        }
    }
    let map = GridMap { width: WIDTH, height: HEIGHT, cell_size: 50.0, blocked, starts };
    let requirements = TASKS
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let cap = match i {
                0 => 600.0,
                1 => 800.0,
                3 => 150.0,
                4 => 180.0,
                _ => k.capacity.0,
            };
            TraitVector(vec![cap, k.flags[0], k.flags[1], k.flags[2]])
        })
        .collect();
    let mut d = assemble(map, locations, requirements);

    let amb = 3;
    let dump = 0;
    let d1 = 0;
    match row {
        ModelError::RobotTraitError => {
            d.q.rows[amb].0[3] = 1.0;
            d.ystar.rows[d1].0 = vec![600.0, 0.0, 0.0, 1.0];
        }
        ModelError::RequirementError => {
            d.ystar.rows[d1].0 = vec![600.0, 0.0, 1.0, 1.0];
        }
        ModelError::SpeedError => {
            d.ystar.rows[d1].0 = vec![600.0, 0.0, 0.0, 0.0];
            d.phi.0[amb] = 40.0;
        }
        ModelError::Combined => {
            d.q.rows[dump].0[2] = 1.0;
            d.ystar.rows[d1].0 = vec![600.0, 0.0, 0.0, 0.0];
            d.phi.0[amb] = 40.0;
        }
    }
    d
}

/// A `width`×`height` map with about `blocked_fraction` of its cells blocked, no robots.
pub fn random_map(seed: u64, width: usize, height: usize, blocked_fraction: f64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocked = (0..height)
        .flat_map(|y| (0..width).map(move |x| Cell::new(x, y)))
        .filter(|_| rng.gen_bool(blocked_fraction))
        .collect();
    GridMap { width, height, cell_size: 1.0, blocked, starts: Vec::new() }
}

/// A small random domain with at most nine task-robot pairs, two traits (a cumulative load
/// and a binary tool) and random precedence edges. Every task can be worked by the whole
/// team and every location is reachable, so most instances are solvable.
pub fn small_random(seed: u64) -> ProblemDomain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_robots = rng.gen_range(1..=3);
    let n_tasks = rng.gen_range(1..=(9 / n_robots).min(4));
    let robots: Vec<(f64, f64, f64)> = (0..n_robots)
        .map(|_| (f64::from(rng.gen_range(1..=4)) * 10.0, f64::from(u8::from(rng.gen_bool(0.5))), f64::from(rng.gen_range(1..=5))))
        .collect();
    let total_load: f64 = robots.iter().map(|r| r.0).sum();
    let any_tool = robots.iter().any(|r| r.1 == 1.0);
    let (w, h) = (6, 6);
    loop {
        let mut map = random_map(rng.gen(), w, h, 0.15);
        let free = |rng: &mut ChaCha8Rng| loop {
            let c = Cell::new(rng.gen_range(0..w), rng.gen_range(0..h));
            if !map.blocked.contains(&c) {
                return c;
            }
        };
        let starts: Vec<Cell> = (0..n_robots).map(|_| free(&mut rng)).collect();
        let locations: Vec<Cell> = (0..n_tasks).map(|_| free(&mut rng)).collect();
        map.starts = starts;
        let all: Vec<Cell> = map.starts.iter().chain(&locations).copied().collect();
        if !connected(&map, &all) {
            continue;
        }
        let tasks = locations
            .iter()
            .enumerate()
            .map(|(m, &location)| Task {
                name: format!("T{m}"),
                label: None,
                location,
                work_duration: f64::from(rng.gen_range(1..=20)),
            })
            .collect();
        let ystar = (0..n_tasks)
            .map(|_| {
                let load = (f64::from(rng.gen_range(0..=6)) * 10.0).min(total_load);
                let tool = f64::from(u8::from(any_tool && rng.gen_bool(0.3)));
                TraitVector(vec![load, tool])
            })
            .collect();
        let edges = (0..n_tasks)
            .flat_map(|i| (i + 1..n_tasks).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.3))
            .collect();
        return ProblemDomain {
            traits: vec![TraitSpec::new("load", TraitClass::Cumulative), TraitSpec::new("tool", TraitClass::Binary)],
            q: RobotTraitMatrix {
                robot_ids: (0..n_robots).map(|n| format!("R{n}")).collect(),
                rows: robots.iter().map(|r| TraitVector(vec![r.0, r.1])).collect(),
            },
            phi: SpeedVector(robots.iter().map(|r| r.2).collect()),
            network: TaskNetwork { tasks, edges },
            ystar: DesiredTraitMatrix { rows: ystar },
            map,
        };
    }
}
