//! Exact search for tiny instances.
//!
//! Depth-first branch and bound over demand, route, start slot and the
//! (fiber, core) used on every hop. The partial objective never decreases as
//! lightpaths are added, so any branch that reaches the incumbent is cut.
//! Fibers of a link are interchangeable, so only the lowest-index unused
//! fiber (fiber pair in co mode) may be opened.

use std::collections::HashMap;

use super::{IlpInstance, Var};
use crate::error::{Error, Result};
use crate::state::{CoreChoice, LightpathRecord, SpectrumWindow};
use crate::topology::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_vars: usize,
    /// Search nodes visited before giving up.
    pub max_nodes: u64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_vars: 500_000,
            max_nodes: 50_000_000,
        }
    }
}

/// Lightpath of one demand: route index, start slot and per-hop choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPath {
    pub route: usize,
    pub start: usize,
    pub choices: Vec<CoreChoice>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub objective: f64,
    /// Objective weight of the used fibers (the MCF count).
    pub fiber_cost: u64,
    /// Weighted crosstalk, each unordered core pair counted once.
    pub crosstalk: u64,
    /// One entry per demand, in demand order.
    pub paths: Vec<ExactPath>,
    /// Full assignment in model variable order.
    pub values: Vec<i64>,
    pub nodes: u64,
}

impl ExactSolution {
    pub fn records(&self, inst: &IlpInstance) -> Vec<LightpathRecord> {
        inst.demands
            .iter()
            .zip(&self.paths)
            .enumerate()
            .map(|(r, (d, path))| LightpathRecord {
                demand_id: d.id,
                src: d.src,
                dst: d.dst,
                fs_count: d.fs_count,
                route: inst.routes[r][path.route].clone(),
                window: SpectrumWindow {
                    start: path.start,
                    width: d.fs_count,
                },
                choices: path.choices.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Default)]
struct CoreSlot {
    dir: Option<Direction>,
    mask: u64,
}

struct Search<'a> {
    inst: &'a IlpInstance,
    limits: ExactLimits,
    c: usize,
    nt: usize,
    groups: usize,
    /// `[link][fiber][core]`
    cores: Vec<Vec<Vec<CoreSlot>>>,
    /// Lightpath-hops per `[link][group]`.
    group_use: Vec<Vec<usize>>,
    f_coef: Vec<Vec<f64>>,
    /// Objective weight of one overlapping slot on the unordered pair.
    pair_coef: Vec<Vec<f64>>,
    pair_weight: Vec<Vec<u64>>,
    cost: f64,
    fibers: u64,
    xt: u64,
    current: Vec<ExactPath>,
    best: Option<(f64, u64, u64, Vec<ExactPath>)>,
    nodes: u64,
}

fn window_mask(start: usize, width: usize) -> u64 {
    let bits = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    bits << (start - 1)
}

impl<'a> Search<'a> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limits.max_nodes {
            return Err(Error::LimitsExceeded(format!("more than {} search nodes", self.limits.max_nodes)));
        }
        Ok(())
    }

    fn bound_hit(&self, extra: f64) -> bool {
        match &self.best {
            Some((b, ..)) => self.cost + extra >= *b - 1e-12,
            None => false,
        }
    }

    fn demand(&mut self, r: usize) -> Result<()> {
        self.tick()?;
        if r == self.inst.demands.len() {
            if !self.bound_hit(0.0) {
                self.best = Some((self.cost, self.fibers, self.xt, self.current.clone()));
            }
            return Ok(());
        }
        let fs = self.inst.demands[r].fs_count;
        let w = self.inst.params.slots;
        for p in 0..self.inst.routes[r].len() {
            for start in 1..=(w + 1 - fs) {
                self.current.push(ExactPath {
                    route: p,
                    start,
                    choices: Vec::new(),
                });
                self.hop(r, p, window_mask(start, fs), 0)?;
                self.current.pop();
            }
        }
        Ok(())
    }

    fn hop(&mut self, r: usize, p: usize, mask: u64, h: usize) -> Result<()> {
        self.tick()?;
        let route = &self.inst.routes[r][p];
        if h == route.hop_count() {
            return self.demand(r + 1);
        }
        let l = route.links[h];
        let dir = Direction::of_hop(route.nodes[h], route.nodes[h + 1]);
        let open_limit = (0..self.groups).find(|&q| self.group_use[l][q] == 0);
        for t in 0..self.nt {
            if self.inst.fiber_direction(t).is_some_and(|d| d != dir) {
                continue;
            }
            let q = self.inst.fiber_group(t);
            let fresh = self.group_use[l][q] == 0;
            if fresh && Some(q) != open_limit {
                continue;
            }
            for i in 0..self.c {
                let slot = self.cores[l][t][i];
                if slot.dir.is_some_and(|d| d != dir) || slot.mask & mask != 0 {
                    continue;
                }
                let mut extra = if fresh { self.f_coef[l][q] } else { 0.0 };
                let mut xt = 0;
                for j in 0..self.c {
                    let other = self.cores[l][t][j];
                    if j != i && other.dir == Some(dir) {
                        let n = (other.mask & mask).count_ones() as u64;
                        extra += n as f64 * self.pair_coef[i][j];
                        xt += n * self.pair_weight[i][j];
                    }
                }
                if self.bound_hit(extra) {
                    continue;
                }
                let (saved_cost, saved_fibers, saved_xt) = (self.cost, self.fibers, self.xt);
                self.cost += extra;
                self.xt += xt;
                if fresh {
                    self.fibers += self.f_coef[l][q].round() as u64;
                }
                self.group_use[l][q] += 1;
                let core = &mut self.cores[l][t][i];
                core.dir = Some(dir);
                core.mask |= mask;
                self.current.last_mut().expect("path in progress").choices.push(CoreChoice { fiber: t, core: i });

                self.hop(r, p, mask, h + 1)?;

                self.current.last_mut().expect("path in progress").choices.pop();
                let core = &mut self.cores[l][t][i];
                core.mask &= !mask;
                if core.mask == 0 {
                    core.dir = slot.dir;
                }
                self.group_use[l][q] -= 1;
                self.cost = saved_cost;
                self.fibers = saved_fibers;
                self.xt = saved_xt;
            }
        }
        Ok(())
    }
}

/// Provably optimal solution of a tiny instance.
pub fn solve_exact_small(inst: &IlpInstance, limits: ExactLimits) -> Result<ExactSolution> {
    if inst.variables.len() > limits.max_vars {
        return Err(Error::LimitsExceeded(format!(
            "{} variables, limit {}",
            inst.variables.len(),
            limits.max_vars
        )));
    }
    if inst.params.slots > 64 {
        return Err(Error::LimitsExceeded("more than 64 slots".into()));
    }
    let coef: HashMap<usize, f64> = inst.objective.iter().copied().collect();
    let lookup = |key| inst.var(key).and_then(|v| coef.get(&v).copied()).unwrap_or(0.0);
    let (c, nt, nl) = (inst.core_count, inst.fibers_per_link, inst.link_count);
    let groups = inst.params.fiber_cap;
    let f_coef = (0..nl).map(|l| (0..groups).map(|t| lookup(Var::F { l, t })).collect()).collect();
    let pair_coef = (0..c)
        .map(|i| {
            (0..c)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        lookup(Var::A { l: 0, t: 0, i, j, k: 1 }) + lookup(Var::A { l: 0, t: 0, i: j, j: i, k: 1 })
                    }
                })
                .collect()
        })
        .collect();
    let mut search = Search {
        inst,
        limits,
        c,
        nt,
        groups,
        cores: vec![vec![vec![CoreSlot::default(); c]; nt]; nl],
        group_use: vec![vec![0; groups]; nl],
        f_coef,
        pair_coef,
        pair_weight: inst.weights.clone(),
        cost: 0.0,
        fibers: 0,
        xt: 0,
        current: Vec::new(),
        best: None,
        nodes: 0,
    };
    search.demand(0)?;
    let nodes = search.nodes;
    let (objective, fiber_cost, crosstalk, paths) = search.best.ok_or(Error::Infeasible)?;
    let values = assignment_values(inst, &paths)?;
    let violated = inst.violations(&values);
    debug_assert!(violated.is_empty(), "exact solution violates {violated:?}");
    if !violated.is_empty() {
        return Err(Error::InvalidParameter(format!("model rejects exact solution: {}", violated.join(", "))));
    }
    Ok(ExactSolution {
        objective,
        fiber_cost,
        crosstalk,
        paths,
        values,
        nodes,
    })
}

/// Full variable assignment implied by one lightpath per demand.
///
/// `paths[r].choices[h].fiber` is the model fiber index on hop `h`.
pub fn assignment_values(inst: &IlpInstance, paths: &[ExactPath]) -> Result<Vec<i64>> {
    if paths.len() != inst.demands.len() {
        return Err(Error::InvalidParameter(format!(
            "{} paths for {} demands",
            paths.len(),
            inst.demands.len()
        )));
    }
    let (c, nt, nl, w) = (inst.core_count, inst.fibers_per_link, inst.link_count, inst.params.slots);
    let mut v = vec![0i64; inst.variables.len()];
    let set = |v: &mut Vec<i64>, key: Var, x: i64| {
        if let Some(i) = inst.var(key) {
            v[i] = x;
        }
    };
    let mut dc = vec![vec![vec![0i64; c]; nt]; nl];
    let mut busy = vec![vec![vec![0u64; c]; nt]; nl];
    // start slot per (r, p); unchosen routes sit at slot 1
    let mut starts = vec![Vec::new(); inst.demands.len()];
    for (r, (d, path)) in inst.demands.iter().zip(paths).enumerate() {
        let routes = &inst.routes[r];
        let route = routes.get(path.route).ok_or_else(|| Error::InvalidParameter(format!("route {} of demand {r}", path.route)))?;
        if path.choices.len() != route.hop_count() {
            return Err(Error::InvalidParameter(format!("demand {r} has {} hop choices", path.choices.len())));
        }
        let end = path.start + d.fs_count - 1;
        if path.start == 0 || end > w {
            return Err(Error::InvalidParameter(format!("demand {r} window out of range")));
        }
        for p in 0..routes.len() {
            let (s, e) = if p == path.route { (path.start, end) } else { (1, 1) };
            starts[r].push(s);
            set(&mut v, Var::X { r, p }, i64::from(p == path.route));
            set(&mut v, Var::S { r, p }, s as i64);
            set(&mut v, Var::E { r, p }, e as i64);
            for k in 1..=w {
                set(&mut v, Var::Beta { r, p, k }, i64::from(k >= s));
                set(&mut v, Var::Gamma { r, p, k }, i64::from(k <= e));
            }
        }
        for (h, ch) in path.choices.iter().enumerate() {
            let l = route.links[h];
            let dir = Direction::of_hop(route.nodes[h], route.nodes[h + 1]);
            if ch.fiber >= nt || ch.core >= c {
                return Err(Error::InvalidParameter(format!("demand {r} hop {h} choice out of range")));
            }
            set(&mut v, Var::O { r, p: path.route, l, i: ch.core, t: ch.fiber }, 1);
            dc[l][ch.fiber][ch.core] = i64::from(dir.value());
            busy[l][ch.fiber][ch.core] |= window_mask(path.start, d.fs_count);
        }
    }
    for l in 0..nl {
        for t in 0..nt {
            for i in 0..c {
                let used = busy[l][t][i] != 0;
                set(&mut v, Var::U { l, i, t }, i64::from(used));
                set(&mut v, Var::Dc { l, i, t }, dc[l][t][i]);
                if used {
                    set(&mut v, Var::F { l, t: inst.fiber_group(t) }, 1);
                }
                for k in 1..=w {
                    set(&mut v, Var::Theta { l, t, i, k }, i64::from(busy[l][t][i] >> (k - 1) & 1 == 1));
                }
            }
            for i in 0..c {
                for j in (0..c).filter(|&j| j != i) {
                    let (di, dj) = (dc[l][t][i], dc[l][t][j]);
                    let z = di == dj && busy[l][t][i] != 0 && busy[l][t][j] != 0;
                    set(&mut v, Var::Y { l, t, i, j }, i64::from(di == dj));
                    set(&mut v, Var::Phi1 { l, t, i, j }, i64::from(di >= dj));
                    set(&mut v, Var::Phi2 { l, t, i, j }, i64::from(dj >= di));
                    set(&mut v, Var::Z { l, t, i, j }, i64::from(z));
                    for k in 1..=w {
                        let both = (busy[l][t][i] & busy[l][t][j]) >> (k - 1) & 1 == 1;
                        set(&mut v, Var::A { l, t, i, j, k }, i64::from(z && both));
                    }
                }
            }
        }
    }
    // rho is 0 exactly when the first lightpath starts after the second
    for (r1, s1) in starts.iter().enumerate() {
        for (r2, s2) in starts.iter().enumerate() {
            if r1 == r2 {
                continue;
            }
            for (p1, &a) in s1.iter().enumerate() {
                for (p2, &b) in s2.iter().enumerate() {
                    let later = (a, r1) > (b, r2);
                    set(&mut v, Var::Rho { r1, p1, r2, p2 }, i64::from(!later));
                }
            }
        }
    }
    Ok(v)
}
