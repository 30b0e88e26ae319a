//! Brute-force optimum for micro instances.
//!
//! Every demand jointly tries every candidate route, start slot and raw
//! (fiber, core) per hop on a fully deployed network; validity is left to
//! [`NetworkState::commit_lightpath`] and the objective is recomputed from
//! the resulting state. Nothing here shares code with the heuristic or the
//! exact ILP search.

use crate::crosstalk::total_crosstalk;
use crate::demand::{Demand, DemandSet};
use crate::error::{Error, Result};
use crate::geometry::McfGeometry;
use crate::state::{CoreChoice, LightpathRecord, Mode, NetworkState, SpectrumWindow, StateConfig};
use crate::topology::{Route, Topology};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleParams {
    pub mode: Mode,
    /// Fibers per link (counter) or fiber pairs per link (co).
    pub fiber_cap: usize,
    pub slots: usize,
    pub k: usize,
    pub link_disjoint: bool,
    pub alpha: f64,
    /// Largest accepted search-space estimate.
    pub max_space: u64,
    /// Optimal assignments kept.
    pub max_optima: usize,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            mode: Mode::Counter,
            fiber_cap: 1,
            slots: 8,
            k: 2,
            link_disjoint: true,
            alpha: 0.01,
            max_space: 10_000_000,
            max_optima: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub mcf_count: usize,
    pub crosstalk: u64,
    /// Optimal assignments, in enumeration order, up to the cap.
    pub optima: Vec<Vec<LightpathRecord>>,
    /// Complete assignments evaluated.
    pub evaluated: u64,
}

const TIE: f64 = 1e-9;

#[derive(Default)]
struct Best {
    objective: f64,
    mcf: usize,
    xt: u64,
    optima: Vec<Vec<LightpathRecord>>,
    evaluated: u64,
    found: bool,
}

impl Best {
    fn offer(&mut self, objective: f64, mcf: usize, xt: u64, log: &[LightpathRecord], cap: usize) {
        if !self.found || objective < self.objective - TIE {
            self.found = true;
            self.objective = objective;
            self.mcf = mcf;
            self.xt = xt;
            self.optima.clear();
        }
        if (objective - self.objective).abs() <= TIE && self.optima.len() < cap {
            self.optima.push(log.to_vec());
        }
    }

    fn merge(&mut self, other: Best, cap: usize) {
        self.evaluated += other.evaluated;
        if !other.found {
            return;
        }
        for log in &other.optima {
            self.offer(other.objective, other.mcf, other.xt, log, cap);
        }
        if other.optima.is_empty() {
            self.offer(other.objective, other.mcf, other.xt, &[], 0);
        }
    }
}

struct Ctx<'a> {
    demands: &'a [Demand],
    routes: Vec<Vec<Route>>,
    g: &'a McfGeometry,
    params: OracleParams,
    fibers: usize,
}

/// Every (route, window, raw per-hop choice) for one demand.
fn candidates(ctx: &Ctx<'_>, r: usize) -> Vec<(usize, SpectrumWindow, Vec<CoreChoice>)> {
    let d = &ctx.demands[r];
    let per_hop: Vec<CoreChoice> = (0..ctx.fibers)
        .flat_map(|fiber| (0..ctx.g.core_count()).map(move |core| CoreChoice { fiber, core }))
        .collect();
    let mut out = Vec::new();
    for (p, route) in ctx.routes[r].iter().enumerate() {
        for sw in SpectrumWindow::all(ctx.params.slots, d.fs_count) {
            let hops = route.hop_count();
            let mut idx = vec![0usize; hops];
            loop {
                out.push((p, sw, idx.iter().map(|&i| per_hop[i]).collect()));
                let mut h = 0;
                while h < hops {
                    idx[h] += 1;
                    if idx[h] < per_hop.len() {
                        break;
                    }
                    idx[h] = 0;
                    h += 1;
                }
                if h == hops {
                    break;
                }
            }
        }
    }
    out
}

fn explore(ctx: &Ctx<'_>, state: &NetworkState, r: usize, cands: &[Vec<(usize, SpectrumWindow, Vec<CoreChoice>)>], best: &mut Best) {
    if r == ctx.demands.len() {
        let mcf = state.mcf_count();
        let xt = total_crosstalk(state, ctx.g).total_weighted;
        best.evaluated += 1;
        let objective = mcf as f64 + ctx.params.alpha * xt as f64;
        best.offer(objective, mcf, xt, state.log(), ctx.params.max_optima);
        return;
    }
    for (p, sw, choices) in &cands[r] {
        let mut next = state.clone();
        if next
            .commit_lightpath(&ctx.demands[r], &ctx.routes[r][*p], choices, *sw)
            .is_ok()
        {
            explore(ctx, &next, r + 1, cands, best);
        }
    }
}

/// Joint exhaustive search for the minimum of `mcf + alpha * crosstalk`.
pub fn brute_force_rsca(topo: &Topology, g: &McfGeometry, demands: &DemandSet, params: OracleParams) -> Result<OracleResult> {
    demands.check_against(topo)?;
    let config = StateConfig::new(params.mode, g.core_count(), params.slots, params.fiber_cap)?;
    let base = NetworkState::fully_deployed(topo.links().len(), config);
    let fibers = base.links().first().map_or(0, |l| l.fibers.len());
    let list: Vec<Demand> = demands.iter().cloned().collect();
    let mut routes = Vec::with_capacity(list.len());
    let mut space: f64 = 1.0;
    for d in &list {
        let rs = topo.k_shortest_paths(d.src, d.dst, params.k, params.link_disjoint)?;
        let windows = (params.slots + 1).saturating_sub(d.fs_count) as f64;
        let per_demand: f64 = rs
            .iter()
            .map(|r| windows * ((fibers * g.core_count()) as f64).powi(r.hop_count() as i32))
            .sum();
        space *= per_demand;
        routes.push(rs);
    }
    if space > params.max_space as f64 {
        return Err(Error::LimitsExceeded(format!(
            "search space of about {space:.3e} exceeds {}",
            params.max_space
        )));
    }
    let ctx = Ctx {
        demands: &list,
        routes,
        g,
        params,
        fibers,
    };
    let cands: Vec<_> = (0..list.len()).map(|r| candidates(&ctx, r)).collect();

    let best = if list.is_empty() {
        let mut b = Best::default();
        explore(&ctx, &base, 0, &cands, &mut b);
        b
    } else {
        let branch = |(p, sw, choices): &(usize, SpectrumWindow, Vec<CoreChoice>)| {
            let mut b = Best::default();
            let mut next = base.clone();
            if next.commit_lightpath(&list[0], &ctx.routes[0][*p], choices, *sw).is_ok() {
                explore(&ctx, &next, 1, &cands, &mut b);
            }
            b
        };
        #[cfg(feature = "parallel")]
        let parts: Vec<Best> = {
            use rayon::prelude::*;
            cands[0].par_iter().map(branch).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<Best> = cands[0].iter().map(branch).collect();
        let mut b = Best::default();
        for part in parts {
            b.merge(part, params.max_optima);
        }
        b
    };
    if !best.found {
        return Err(Error::Infeasible);
    }
    Ok(OracleResult {
        objective: best.objective,
        mcf_count: best.mcf,
        crosstalk: best.xt,
        optima: best.optima,
        evaluated: best.evaluated,
    })
}
