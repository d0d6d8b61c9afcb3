//! Grid motion planning. Robots move on a 4-connected grid with unit cell cost; a path's length in
//! meters is its number of transitions times the map's cell size.

use std::cell::OnceCell;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::domain::{Cell, GridMap, ProblemDomain};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub cells: Vec<Cell>,
    pub length_m: f64,
}

impl Path {
    pub fn transitions(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn start(&self) -> Option<Cell> {
        self.cells.first().copied()
    }

    pub fn goal(&self) -> Option<Cell> {
        self.cells.last().copied()
    }

    /// Checks the path is a connected walk over free cells of `map` with a consistent length.
    pub fn is_valid_on(&self, map: &GridMap) -> bool {
        !self.cells.is_empty()
            && self.cells.iter().all(|&c| map.is_free(c))
            && self.cells.windows(2).all(|w| w[0].is_adjacent(w[1]))
            && (self.length_m - self.transitions() as f64 * map.cell_size).abs() <= 1e-9 * self.length_m.max(1.0)
    }
}

// Expansion order: up, right, down, left.
const MOVES: [(isize, isize); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

fn neighbours(map: &GridMap, c: Cell) -> impl Iterator<Item = Cell> + '_ {
    MOVES.iter().filter_map(move |&(dx, dy)| {
        let x = c.x.checked_add_signed(dx)?;
        let y = c.y.checked_add_signed(dy)?;
        let n = Cell::new(x, y);
        map.is_free(n).then_some(n)
    })
}

/// Shortest 4-connected path by A* with the Manhattan heuristic.
///
/// Ties on `f = g + h` are broken first-in first-out, and neighbours are pushed in the order
/// up, right, down, left, so the returned cell sequence is a pure function of the inputs.
pub fn plan_path(map: &GridMap, start: Cell, goal: Cell) -> Result<Path> {
    for (what, c) in [("start", start), ("goal", goal)] {
        if !map.is_free(c) {
            return Err(Error::invalid(format!("{what} cell {c} is off the map or blocked")));
        }
    }
    let idx = |c: Cell| c.y * map.width + c.x;
    let total = map.width * map.height;
    let mut g = vec![usize::MAX; total];
    let mut parent: Vec<Option<Cell>> = vec![None; total];
    let mut closed = vec![false; total];
    let mut open = BinaryHeap::new();
    let mut counter = 0u64;

    g[idx(start)] = 0;
    open.push(Reverse((start.manhattan(goal), counter, start)));
    while let Some(Reverse((_, _, cur))) = open.pop() {
        let ci = idx(cur);
        if closed[ci] {
            continue;
        }
        closed[ci] = true;
        if cur == goal {
            let mut cells = vec![cur];
            let mut at = cur;
            while let Some(p) = parent[idx(at)] {
                cells.push(p);
                at = p;
            }
            cells.reverse();
            let length_m = (cells.len() - 1) as f64 * map.cell_size;
            return Ok(Path { cells, length_m });
        }
        let cg = g[ci];
        for n in neighbours(map, cur) {
            let ni = idx(n);
            if closed[ni] || cg + 1 >= g[ni] {
                continue;
            }
            g[ni] = cg + 1;
            parent[ni] = Some(cur);
            counter += 1;
            open.push(Reverse((cg + 1 + n.manhattan(goal), counter, n)));
        }
    }
    Err(Error::NoPath { goal })
}

/// Seconds needed to drive `path` at `speed` m/s.
pub fn travel_time(path: &Path, speed: f64) -> Result<f64> {
    if !(speed > 0.0) || !speed.is_finite() {
        return Err(Error::invalid(format!("speed must be positive, got {speed}")));
    }
    Ok(path.length_m / speed)
}

/// Paths between every start cell or task location and every task location of a domain.
///
/// Paths are planned on first lookup, so checks that fail before any robot moves stay cheap.
/// Only ever queried with endpoints that belong to the domain.
#[derive(Debug, Clone)]
pub struct PathTable<'a> {
    map: &'a GridMap,
    paths: HashMap<(Cell, Cell), OnceCell<Option<Path>>>,
}

impl<'a> PathTable<'a> {
    pub fn new(d: &'a ProblemDomain) -> Self {
        let mut sources: Vec<Cell> = d.map.starts.clone();
        sources.extend(d.network.tasks.iter().map(|t| t.location));
        sources.sort();
        sources.dedup();
        let mut goals: Vec<Cell> = d.network.tasks.iter().map(|t| t.location).collect();
        goals.sort();
        goals.dedup();
        let mut paths = HashMap::with_capacity(sources.len() * goals.len());
        for &s in &sources {
            for &g in &goals {
                paths.insert((s, g), OnceCell::new());
            }
        }
        PathTable { map: &d.map, paths }
    }

    pub fn get(&self, from: Cell, to: Cell) -> Option<&Path> {
        let slot = self.paths.get(&(from, to))?;
        slot.get_or_init(|| plan_path(self.map, from, to).ok()).as_ref()
    }
}
