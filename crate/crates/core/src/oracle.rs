//! Slow reference implementations the fast paths are checked against.

use std::collections::VecDeque;

use crate::domain::{Cell, GridMap, ProblemDomain};
use crate::error::{Error, Result};
use crate::planner::{schedule_allocation, AllocationMatrix};

/// Breadth-first shortest path length in moves, or `None` when unreachable.
pub fn bfs_distance(map: &GridMap, start: Cell, goal: Cell) -> Option<usize> {
    if !map.is_free(start) || !map.is_free(goal) {
        return None;
    }
    let idx = |c: Cell| c.y * map.width + c.x;
    let mut dist = vec![usize::MAX; map.width * map.height];
    dist[idx(start)] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        if c == goal {
            return Some(dist[idx(c)]);
        }
        let next = [
            (c.x.checked_sub(1), Some(c.y)),
            (Some(c.x + 1), Some(c.y)),
            (Some(c.x), c.y.checked_sub(1)),
            (Some(c.x), Some(c.y + 1)),
        ];
        for (x, y) in next {
            let (Some(x), Some(y)) = (x, y) else { continue };
            let n = Cell::new(x, y);
            if map.is_free(n) && dist[idx(n)] == usize::MAX {
                dist[idx(n)] = dist[idx(c)] + 1;
                queue.push_back(n);
            }
        }
    }
    None
}

/// Largest task-by-robot product the exhaustive search accepts.
pub const MAX_BRUTE_FORCE_CELLS: usize = 20;

/// The minimum makespan over every binary allocation matrix that schedules, with the first
/// matrix (in enumeration order) reaching it. `None` when no allocation is feasible.
pub fn brute_force_optimum(d: &ProblemDomain) -> Result<Option<(AllocationMatrix, f64)>> {
    let (m, n) = (d.n_tasks(), d.n_robots());
    if m * n > MAX_BRUTE_FORCE_CELLS {
        return Err(Error::invalid(format!("{m}x{n} allocation is too large to enumerate")));
    }
    let mut best: Option<(AllocationMatrix, f64)> = None;
    for bits in 0u64..(1 << (m * n)) {
        let mut a = AllocationMatrix::empty(m, n);
        for k in 0..m * n {
            a.set(k / n, k % n, bits >> k & 1 == 1);
        }
        if let Ok(s) = schedule_allocation(d, &a)? {
            let span = s.makespan();
            if best.as_ref().is_none_or(|(_, b)| span < *b) {
                best = Some((a, span));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn bfs_on_open_and_walled_maps() {
        let mut map = fixtures::random_map(0, 5, 5, 0.0);
        assert_eq!(bfs_distance(&map, Cell::new(0, 0), Cell::new(4, 4)), Some(8));
        for y in 0..5 {
            map.blocked.insert(Cell::new(2, y));
        }
        assert_eq!(bfs_distance(&map, Cell::new(0, 0), Cell::new(4, 4)), None);
        assert_eq!(bfs_distance(&map, Cell::new(1, 1), Cell::new(1, 1)), Some(0));
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        assert!(brute_force_optimum(&fixtures::emergency_response(0)).is_err());
    }
}
