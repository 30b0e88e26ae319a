//! Inter-core crosstalk factor.
//!
//! For two cores `i`, `j` of one fiber, `CF = V(i,j) * Z * overlap`, where
//! `Z` is 1 only when both cores are used in the same direction and
//! `overlap` counts slots occupied in both. Opposite directions contribute
//! nothing.

use crate::geometry::{Level, McfGeometry};
use crate::state::{CoreState, FiberState, NetworkState, SpectrumWindow};
use crate::topology::Direction;

pub fn crosstalk_factor(g: &McfGeometry, i: usize, j: usize, ci: &CoreState, cj: &CoreState) -> u64 {
    match (ci.direction, cj.direction) {
        (Some(a), Some(b)) if a == b && i != j => g.weight(i, j) * ci.occupancy.overlap(&cj.occupancy) as u64,
        _ => 0,
    }
}

/// Increase in fiber crosstalk if `sw` were lit on `core` in direction `dir`.
pub fn incremental_crosstalk(
    fiber: &FiberState,
    core: usize,
    sw: SpectrumWindow,
    dir: Direction,
    g: &McfGeometry,
) -> u64 {
    fiber
        .cores
        .iter()
        .enumerate()
        .filter(|&(j, c)| j != core && c.direction == Some(dir))
        .map(|(j, c)| g.weight(core, j) * c.occupancy.window_overlap(sw) as u64)
        .sum()
}

/// Sum of the crosstalk factor over every unordered core pair of the fiber.
pub fn fiber_crosstalk(fiber: &FiberState, g: &McfGeometry) -> u64 {
    let n = fiber.cores.len();
    let mut total = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += crosstalk_factor(g, i, j, &fiber.cores[i], &fiber.cores[j]);
        }
    }
    total
}

/// One core pair with nonzero crosstalk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCrosstalk {
    pub link: usize,
    pub fiber: usize,
    pub core_i: usize,
    pub core_j: usize,
    pub level: Level,
    pub overlap: usize,
    pub weighted: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrosstalkReport {
    pub total_weighted: u64,
    pub per_link: Vec<u64>,
    pub pairs: Vec<PairCrosstalk>,
    pub mcf_count: usize,
}

impl CrosstalkReport {
    /// Total weighted crosstalk divided by the number of MCFs in use.
    pub fn average_per_mcf(&self) -> f64 {
        if self.mcf_count == 0 {
            0.0
        } else {
            self.total_weighted as f64 / self.mcf_count as f64
        }
    }
}

pub fn total_crosstalk(state: &NetworkState, g: &McfGeometry) -> CrosstalkReport {
    let mut pairs = Vec::new();
    let mut per_link = Vec::with_capacity(state.links().len());
    for (l, link) in state.links().iter().enumerate() {
        let mut link_total = 0;
        for (f, fiber) in link.fibers.iter().enumerate() {
            let n = fiber.cores.len();
            for i in 0..n {
                for j in (i + 1)..n {
                    let (ci, cj) = (&fiber.cores[i], &fiber.cores[j]);
                    let weighted = crosstalk_factor(g, i, j, ci, cj);
                    if weighted > 0 {
                        link_total += weighted;
                        pairs.push(PairCrosstalk {
                            link: l,
                            fiber: f,
                            core_i: i,
                            core_j: j,
                            level: g.adjacency_level(i, j).expect("distinct in-range cores"),
                            overlap: ci.occupancy.overlap(&cj.occupancy),
                            weighted,
                        });
                    }
                }
            }
        }
        per_link.push(link_total);
    }
    CrosstalkReport {
        total_weighted: per_link.iter().sum(),
        per_link,
        pairs,
        mcf_count: state.mcf_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Mode, StateConfig};

    fn busy(dir: Direction, slots: usize, ranges: &[(usize, usize)]) -> CoreState {
        let mut c = CoreState::new(slots);
        c.direction = Some(dir);
        for &(a, b) in ranges {
            c.occupancy.set_window(SpectrumWindow {
                start: a,
                width: b - a + 1,
            });
        }
        c
    }

    #[test]
    fn level_one_pair_example() {
        // core 1 uses slots 1-3, core 2 uses 2-4 and 18-23
        let g = McfGeometry::nineteen_core();
        let c1 = busy(Direction::Up, 50, &[(1, 3)]);
        let c2 = busy(Direction::Up, 50, &[(2, 4), (18, 23)]);
        assert_eq!(crosstalk_factor(&g, 0, 1, &c1, &c2), 200);
        assert_eq!(crosstalk_factor(&g, 1, 0, &c2, &c1), 200);
    }

    #[test]
    fn level_three_pair_example() {
        // cores 8 and 14 of the 19-core layout, overlap of 6 slots
        let g = McfGeometry::nineteen_core();
        let c8 = busy(Direction::Down, 50, &[(10, 15)]);
        let c14 = busy(Direction::Down, 50, &[(10, 20)]);
        assert_eq!(crosstalk_factor(&g, 7, 13, &c8, &c14), 6);
    }

    #[test]
    fn opposite_directions_do_not_couple() {
        let g = McfGeometry::seven_core();
        let a = busy(Direction::Up, 50, &[(1, 50)]);
        let b = busy(Direction::Down, 50, &[(1, 50)]);
        assert_eq!(crosstalk_factor(&g, 0, 1, &a, &b), 0);
        let unused = CoreState::new(50);
        assert_eq!(crosstalk_factor(&g, 0, 1, &a, &unused), 0);
    }

    #[test]
    fn incremental_examples() {
        let g = McfGeometry::seven_core();
        let fresh = FiberState::new(7, 50, None);
        let sw = SpectrumWindow { start: 1, width: 4 };
        assert_eq!(incremental_crosstalk(&fresh, 3, sw, Direction::Up, &g), 0);

        // candidate ring core 2 (index 1): center is L1, core 4 (index 3) is L2
        let mut fiber = FiberState::new(7, 50, None);
        fiber.cores[0] = busy(Direction::Up, 50, &[(1, 2)]);
        fiber.cores[3] = busy(Direction::Up, 50, &[(1, 2)]);
        assert_eq!(incremental_crosstalk(&fiber, 1, sw, Direction::Up, &g), 220);
        // the same neighbors running the other way contribute nothing
        assert_eq!(incremental_crosstalk(&fiber, 1, sw, Direction::Down, &g), 0);
    }

    #[test]
    fn network_totals() {
        let g = McfGeometry::seven_core();
        let config = StateConfig::new(Mode::Counter, 7, 50, 2).unwrap();
        let mut state = NetworkState::new(1, config);
        assert_eq!(total_crosstalk(&state, &g).total_weighted, 0);
        state.add_fiber(0).unwrap();
        // two L1 cores, same direction, both full
        let t = crate::topology::Topology::parse("1 2 1\n").unwrap();
        let r = t.route(&[1, 2]).unwrap();
        for (id, core) in [(0, 0), (1, 1)] {
            let d = crate::demand::Demand {
                id,
                src: 1,
                dst: 2,
                fs_count: 50,
            };
            state
                .commit_lightpath(&d, &r, &[crate::state::CoreChoice { fiber: 0, core }], SpectrumWindow { start: 1, width: 50 })
                .unwrap();
        }
        let report = total_crosstalk(&state, &g);
        assert_eq!(report.total_weighted, 5000);
        assert_eq!(report.pairs.len(), 1);
        assert_eq!(report.pairs[0].level, Level::L1);
        assert_eq!(report.mcf_count, 1);
        assert_eq!(report.average_per_mcf(), 5000.0);
    }

    #[test]
    fn alternating_line_only_couples_same_direction_pairs() {
        let g = McfGeometry::parse("1 0 0\n2 1 0\n3 2 0\n4 3 0\n").unwrap();
        let mut fiber = FiberState::new(4, 10, None);
        for (i, core) in fiber.cores.iter_mut().enumerate() {
            let dir = if i % 2 == 0 { Direction::Up } else { Direction::Down };
            *core = busy(dir, 10, &[(1, 10)]);
        }
        // adjacent pairs alternate; cores 1-3 and 2-4 share a direction at L2
        assert_eq!(fiber_crosstalk(&fiber, &g), 10 * 10 + 10 * 10);
        fiber.cores.truncate(2);
        let pair = McfGeometry::parse("1 0 0\n2 1 0\n").unwrap();
        assert_eq!(fiber_crosstalk(&fiber, &pair), 0);
    }
}
