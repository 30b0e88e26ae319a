//! Auxiliary-graph heuristic for routing, spectrum and core assignment.
//!
//! Demands are served one at a time:
//!
//! 1. compute candidate routes;
//! 2. for every (route, spectrum window) pair count the links that cannot
//!    host the window and would need a new fiber;
//! 3. keep the pairs with the smallest count;
//! 4. build an auxiliary graph for each kept pair and find its least-cost
//!    core path;
//! 5. commit the first kept pair (first fit) or the cheapest one (least cost).

mod aux_graph;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use aux_graph::{
    AuxEdge, AuxGraph, AuxNode, AuxPath, CoreEdge, Cost, EdgeKind, SWITCH_TO_UNUSED, SWITCH_TO_USED,
};

use crate::crosstalk::{total_crosstalk, CrosstalkReport};
use crate::demand::{Demand, DemandSet};
use crate::error::{Error, Result};
use crate::geometry::McfGeometry;
use crate::state::{LightpathRecord, Mode, NetworkState, SpectrumWindow};
use crate::topology::{NodeId, Route, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    FirstFit,
    LeastCost,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::FirstFit => "FF",
            Strategy::LeastCost => "LC",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FF" => Ok(Strategy::FirstFit),
            "LC" => Ok(Strategy::LeastCost),
            other => Err(Error::InvalidParameter(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DemandOrder {
    #[default]
    Input,
    /// Largest slot count first; ties keep input order.
    LargestFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComboCell {
    /// Links of the route that cannot host the window.
    pub missing: usize,
    /// Some missing link is already at the fiber cap.
    pub blocked: bool,
}

/// Rows are candidate routes, columns spectrum-window start positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComboMatrix {
    width: usize,
    windows: usize,
    rows: Vec<Vec<ComboCell>>,
}

impl ComboMatrix {
    pub fn routes(&self) -> usize {
        self.rows.len()
    }

    pub fn windows(&self) -> usize {
        self.windows
    }

    /// Cell for route `r` and 1-based window start `start`.
    pub fn cell(&self, r: usize, start: usize) -> ComboCell {
        self.rows[r][start - 1]
    }

    pub fn rows(&self) -> &[Vec<ComboCell>] {
        &self.rows
    }

    pub fn window(&self, start: usize) -> SpectrumWindow {
        SpectrumWindow {
            start,
            width: self.width,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Combination {
    pub route: usize,
    pub window: SpectrumWindow,
    pub missing: usize,
}

/// Counts, per route and window, the links lacking an available window.
pub fn scan_combinations(state: &NetworkState, routes: &[Route], f: usize) -> ComboMatrix {
    let windows = if f >= 1 && f <= state.slots() { state.slots() - f + 1 } else { 0 };
    let rows = routes
        .iter()
        .map(|route| {
            SpectrumWindow::all(state.slots(), f)
                .map(|sw| {
                    let mut cell = ComboCell {
                        missing: 0,
                        blocked: false,
                    };
                    for (&link, dir) in route.links.iter().zip(route.hop_directions()) {
                        if !state.link_sw_available(link, sw, dir) {
                            cell.missing += 1;
                            cell.blocked |= !state.can_add_fiber(link);
                        }
                    }
                    cell
                })
                .collect()
        })
        .collect();
    ComboMatrix {
        width: f,
        windows,
        rows,
    }
}

/// Unblocked cells achieving the smallest count, in row-major order.
pub fn min_combinations(m: &ComboMatrix) -> Vec<Combination> {
    let best = m
        .rows
        .iter()
        .flatten()
        .filter(|c| !c.blocked)
        .map(|c| c.missing)
        .min();
    let Some(best) = best else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (r, row) in m.rows.iter().enumerate() {
        for (s, cell) in row.iter().enumerate() {
            if !cell.blocked && cell.missing == best {
                out.push(Combination {
                    route: r,
                    window: m.window(s + 1),
                    missing: best,
                });
            }
        }
    }
    out
}

/// Hops of `route` that need a new fiber to host `sw`.
pub fn fresh_hops(state: &NetworkState, route: &Route, sw: SpectrumWindow) -> Vec<bool> {
    route
        .links
        .iter()
        .zip(route.hop_directions())
        .map(|(&link, dir)| !state.link_sw_available(link, sw, dir))
        .collect()
}

/// Auxiliary graph of one combination, modelling needed fibers virtually.
pub fn build_aux_graph(
    state: &NetworkState,
    route: &Route,
    sw: SpectrumWindow,
    g: &McfGeometry,
) -> Result<AuxGraph> {
    let fresh = fresh_hops(state, route, sw);
    AuxGraph::build(state, route, sw, g, &fresh)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub record: LightpathRecord,
    pub combination: Combination,
    pub cost: Cost,
    /// Links on which fibers were deployed for this demand.
    pub fibers_added: Vec<usize>,
}

/// Serves one demand and commits it to `state`.
pub fn assign_one(
    state: &mut NetworkState,
    demand: &Demand,
    routes: &[Route],
    strategy: Strategy,
    g: &McfGeometry,
) -> Result<Assignment> {
    if routes.is_empty() {
        return Err(Error::Unservable(demand.id));
    }
    let matrix = scan_combinations(state, routes, demand.fs_count);
    let combos = min_combinations(&matrix);
    let candidates = match strategy {
        Strategy::FirstFit => &combos[..combos.len().min(1)],
        Strategy::LeastCost => &combos[..],
    };
    let mut best: Option<(Combination, AuxGraph, AuxPath)> = None;
    for &combo in candidates {
        let graph = build_aux_graph(state, &routes[combo.route], combo.window, g)?;
        let Some(path) = graph.layered_shortest_path() else {
            continue;
        };
        if best.as_ref().map_or(true, |(_, _, b)| path.cost < b.cost) {
            best = Some((combo, graph, path));
        }
    }
    let Some((combo, graph, path)) = best else {
        return Err(Error::Unservable(demand.id));
    };
    let route = &routes[combo.route];
    let mut fibers_added = Vec::new();
    let mut next = state.clone();
    for (&link, fresh) in route.links.iter().zip(fresh_hops(state, route, combo.window)) {
        if fresh {
            next.add_fiber(link)?;
            fibers_added.push(link);
        }
    }
    let choices = graph.choices(&path);
    let record = next.commit_lightpath(demand, route, &choices, combo.window)?;
    *state = next;
    Ok(Assignment {
        record,
        combination: combo,
        cost: path.cost,
        fibers_added,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub strategy: Strategy,
    pub k: usize,
    pub link_disjoint: bool,
    pub order: DemandOrder,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            strategy: Strategy::LeastCost,
            k: 3,
            link_disjoint: false,
            order: DemandOrder::Input,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RscaSolution {
    pub mode: Mode,
    pub strategy: Strategy,
    pub records: Vec<LightpathRecord>,
    /// Demand ids that could not be served, in serving order.
    pub unserved: Vec<usize>,
    pub mcf_count: usize,
    pub crosstalk: CrosstalkReport,
    pub state: NetworkState,
}

impl RscaSolution {
    pub fn is_feasible(&self) -> bool {
        self.unserved.is_empty()
    }

    /// `mcf_count + alpha * total weighted crosstalk`.
    pub fn objective(&self, alpha: f64) -> f64 {
        self.mcf_count as f64 + alpha * self.crosstalk.total_weighted as f64
    }
}

/// Candidate routes per ordered node pair, computed on first use.
pub struct RouteCache<'a> {
    topo: &'a Topology,
    k: usize,
    link_disjoint: bool,
    routes: HashMap<(NodeId, NodeId), Vec<Route>>,
}

impl<'a> RouteCache<'a> {
    pub fn new(topo: &'a Topology, k: usize, link_disjoint: bool) -> Self {
        RouteCache {
            topo,
            k,
            link_disjoint,
            routes: HashMap::new(),
        }
    }

    pub fn get(&mut self, src: NodeId, dst: NodeId) -> Result<&[Route]> {
        if !self.routes.contains_key(&(src, dst)) {
            let r = self.topo.k_shortest_paths(src, dst, self.k, self.link_disjoint)?;
            self.routes.insert((src, dst), r);
        }
        Ok(&self.routes[&(src, dst)])
    }
}

/// Serves every demand in order, starting from `state`.
pub fn solve_all(
    mut state: NetworkState,
    topo: &Topology,
    demands: &DemandSet,
    config: &HeuristicConfig,
    g: &McfGeometry,
) -> Result<RscaSolution> {
    if g.core_count() != state.core_count() {
        return Err(Error::InvalidParameter(format!(
            "geometry has {} cores but the state expects {}",
            g.core_count(),
            state.core_count()
        )));
    }
    demands.check_against(topo)?;
    let mut order: Vec<&Demand> = demands.iter().collect();
    if config.order == DemandOrder::LargestFirst {
        order.sort_by(|a, b| b.fs_count.cmp(&a.fs_count));
    }
    let mut cache = RouteCache::new(topo, config.k, config.link_disjoint);
    let mut records = Vec::with_capacity(order.len());
    let mut unserved = Vec::new();
    for d in order {
        let routes = cache.get(d.src, d.dst)?;
        match assign_one(&mut state, d, routes, config.strategy, g) {
            Ok(a) => records.push(a.record),
            Err(Error::Unservable(_) | Error::FiberCap { .. }) => unserved.push(d.id),
            Err(e) => return Err(e),
        }
    }
    let crosstalk = total_crosstalk(&state, g);
    Ok(RscaSolution {
        mode: state.mode(),
        strategy: config.strategy,
        records,
        unserved,
        mcf_count: state.mcf_count(),
        crosstalk,
        state,
    })
}
