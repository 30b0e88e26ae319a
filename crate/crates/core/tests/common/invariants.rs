//! Random commit sequences checked against every state invariant.
//!
//! Each sequence mixes heuristic assignments with raw commit attempts that
//! pick arbitrary cores and windows. Raw attempts are often illegal; a
//! rejected commit must leave the state untouched. After every step the
//! whole state is checked against the commit log.

use std::collections::HashMap;

use mcf_rsca::crosstalk::{crosstalk_factor, total_crosstalk};
use mcf_rsca::demand::Demand;
use mcf_rsca::geometry::McfGeometry;
use mcf_rsca::heuristic::{assign_one, Strategy};
use mcf_rsca::state::{CoreChoice, Mode, NetworkState, SlotMap, SpectrumWindow, StateConfig};
use mcf_rsca::topology::{Direction, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type CoreKey = (usize, usize, usize);

#[derive(Default)]
pub struct Tally {
    pub commits: usize,
    pub rejected: usize,
}

/// Panics with a description of the first broken invariant.
pub fn check(state: &NetworkState, g: &McfGeometry, topo: &Topology, seen: &mut HashMap<CoreKey, Direction>) {
    let slots = state.slots();
    // occupancy rebuilt from the log, one owner per slot
    let mut rebuilt: HashMap<CoreKey, SlotMap> = HashMap::new();
    for rec in state.log() {
        assert_eq!(rec.window.width, rec.fs_count, "demand {}: window width", rec.demand_id);
        assert!(rec.window.start >= 1 && rec.window.end() <= slots);
        assert_eq!(rec.route.nodes.first(), Some(&rec.src));
        assert_eq!(rec.route.nodes.last(), Some(&rec.dst));
        assert_eq!(rec.choices.len(), rec.route.hop_count());
        for (h, &link) in rec.route.links.iter().enumerate() {
            let l = topo.link(link);
            let (a, b) = (rec.route.nodes[h], rec.route.nodes[h + 1]);
            assert!((l.a, l.b) == (a, b) || (l.a, l.b) == (b, a), "route hop {h} is not link {link}");
        }
        for ((&link, dir), c) in rec.route.links.iter().zip(rec.route.hop_directions()).zip(&rec.choices) {
            let core = state.core(link, *c);
            let map = rebuilt.entry((link, c.fiber, c.core)).or_insert_with(|| SlotMap::new(slots));
            for s in rec.window.start..=rec.window.end() {
                assert!(!map.is_set(s), "double-booked slot {s} on link {link} {c:?}");
                map.set(s);
                // same window on every hop
                assert!(core.occupancy.is_set(s));
            }
            assert_eq!(core.direction, Some(dir), "demand {} runs against its core", rec.demand_id);
        }
    }
    let mode = state.mode();
    let mut per_slot_total = 0;
    for (l, link) in state.links().iter().enumerate() {
        for (f, fiber) in link.fibers.iter().enumerate() {
            for (k, core) in fiber.cores.iter().enumerate() {
                let key = (l, f, k);
                let empty = SlotMap::new(slots);
                assert_eq!(&core.occupancy, rebuilt.get(&key).unwrap_or(&empty), "stray slots on {key:?}");
                assert_eq!(core.direction.is_none(), core.occupancy.is_empty(), "direction without traffic on {key:?}");
                if let Some(d) = core.direction {
                    if let Some(prev) = seen.insert(key, d) {
                        assert_eq!(prev, d, "core {key:?} changed direction");
                    }
                    if mode == Mode::Co {
                        assert_eq!(fiber.fixed, Some(d), "co fiber {f} on link {l} carries both ways");
                    }
                }
            }
            let n = fiber.cores.len();
            for i in 0..n {
                for j in (i + 1)..n {
                    let (ci, cj) = (&fiber.cores[i], &fiber.cores[j]);
                    if ci.direction.is_some() && ci.direction != cj.direction {
                        assert_eq!(crosstalk_factor(g, i, j, ci, cj), 0, "opposite cores leak");
                    }
                    // independent slot-by-slot count
                    if ci.direction.is_some() && ci.direction == cj.direction {
                        per_slot_total += g.weight(i, j)
                            * (1..=slots).filter(|&s| ci.occupancy.is_set(s) && cj.occupancy.is_set(s)).count() as u64;
                    }
                }
            }
        }
    }
    assert_eq!(total_crosstalk(state, g).total_weighted, per_slot_total);
    // the log alone rebuilds the same state
    let replayed = NetworkState::replay(state.links().len(), state.config(), state.log()).unwrap();
    assert_eq!(replayed.mcf_count(), state.mcf_count());
}

pub fn run_sequence(seed: u64, steps: usize, tally: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topo = match rng.gen_range(0..3) {
        0 => Topology::builtin("n6s8").unwrap(),
        1 => Topology::parse("1 2 1\n2 3 1\n3 4 1\n1 4 2\n2 4 1\n").unwrap(),
        _ => Topology::parse("1 2 1\n2 3 1\n").unwrap(),
    };
    let g = if rng.gen_bool(0.7) { McfGeometry::seven_core() } else { McfGeometry::parse("1 0 0\n2 1 0\n3 2 0\n").unwrap() };
    let mode = if rng.gen_bool(0.5) { Mode::Counter } else { Mode::Co };
    let slots = rng.gen_range(6..=20);
    let cap = rng.gen_range(1..=3);
    let mut state = NetworkState::new(topo.links().len(), StateConfig::new(mode, g.core_count(), slots, cap).unwrap());
    let mut seen = HashMap::new();
    let n = topo.node_count();
    for id in 0..steps {
        let src = rng.gen_range(1..=n);
        let dst = loop {
            let d = rng.gen_range(1..=n);
            if d != src {
                break d;
            }
        };
        let d = Demand {
            id,
            src,
            dst,
            fs_count: rng.gen_range(1..=4),
        };
        let routes = topo.k_shortest_paths(src, dst, 3, false).unwrap();
        if rng.gen_bool(0.5) {
            let strategy = if rng.gen_bool(0.5) { Strategy::LeastCost } else { Strategy::FirstFit };
            match assign_one(&mut state, &d, &routes, strategy, &g) {
                Ok(_) => tally.commits += 1,
                Err(_) => tally.rejected += 1,
            }
        } else {
            let route = &routes[rng.gen_range(0..routes.len())];
            for &l in &route.links {
                if state.link(l).fibers.is_empty() || rng.gen_bool(0.1) {
                    let _ = state.add_fiber(l);
                }
            }
            if route.links.iter().any(|&l| state.link(l).fibers.is_empty()) {
                continue;
            }
            let choices: Vec<CoreChoice> = route
                .links
                .iter()
                .map(|&l| CoreChoice {
                    fiber: rng.gen_range(0..state.link(l).fibers.len()),
                    core: rng.gen_range(0..g.core_count()),
                })
                .collect();
            let start = rng.gen_range(1..=slots - d.fs_count + 1);
            let sw = SpectrumWindow::new(start, d.fs_count, slots).unwrap();
            let before = state.clone();
            match state.commit_lightpath(&d, route, &choices, sw) {
                Ok(_) => tally.commits += 1,
                Err(_) => {
                    assert_eq!(state, before, "rejected commit changed the state");
                    tally.rejected += 1;
                }
            }
        }
        check(&state, &g, &topo, &mut seen);
    }
}
