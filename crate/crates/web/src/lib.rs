//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Three things are exposed: a [`Planner`] that solves a configured instance
//! and draws link layouts, a one-shot AR sweep, and a probe that shows the
//! candidate combinations and auxiliary-graph costs the heuristic would
//! weigh for one more demand.

use std::fmt::Write;

use mcf_rsca::demand::{AsymmetryRatio, Demand};
use mcf_rsca::experiment::{self, ExperimentConfig, RunOutcome};
use mcf_rsca::heuristic::{build_aux_graph, min_combinations, scan_combinations, Strategy};
use mcf_rsca::state::Mode;
use wasm_bindgen::prelude::*;

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Config text in the CLI's `key = value` format; file paths are not
/// available in the browser, so only built-in topologies and geometries work.
fn config(text: &str) -> Result<ExperimentConfig, JsError> {
    let cfg = ExperimentConfig::parse(text, None).map_err(js)?;
    cfg.validate().map_err(js)?;
    Ok(cfg)
}

#[wasm_bindgen]
pub struct Planner {
    cfg: ExperimentConfig,
    out: RunOutcome,
}

#[wasm_bindgen]
impl Planner {
    #[wasm_bindgen(constructor)]
    pub fn new(config_text: &str) -> Result<Planner, JsError> {
        let cfg = config(config_text)?;
        let out = experiment::run(&cfg).map_err(js)?;
        Ok(Planner { cfg, out })
    }

    pub fn metrics_csv(&self) -> String {
        experiment::metrics_csv(&[self.out.metrics(&self.cfg)])
    }

    pub fn links_csv(&self) -> String {
        experiment::links_csv(&self.out.topology, &self.out.solution)
    }

    pub fn solution_csv(&self) -> String {
        experiment::solution_csv(&self.cfg, &self.out.demands, &self.out.solution)
    }

    /// Links as `a-b` strings, busiest first.
    pub fn link_names(&self) -> Vec<String> {
        let mut links: Vec<(usize, usize)> = self
            .out
            .solution
            .state
            .links()
            .iter()
            .enumerate()
            .map(|(i, l)| (i, l.mcf_count(self.out.solution.mode)))
            .collect();
        links.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        links
            .into_iter()
            .map(|(i, _)| {
                let l = self.out.topology.link(i);
                format!("{}-{}", l.a, l.b)
            })
            .collect()
    }

    pub fn layout(&self, a: u32, b: u32) -> Result<String, JsError> {
        let lay = experiment::link_layout(&self.out.solution.state, &self.out.topology, a, b).map_err(js)?;
        Ok(experiment::render_layout(&lay, &self.out.geometry))
    }

    /// What serving one more `src -> dst` demand of `fs` slots would cost
    /// on the current state, per minimal combination.
    pub fn probe(&self, src: u32, dst: u32, fs: usize) -> Result<String, JsError> {
        let topo = &self.out.topology;
        let d = Demand {
            id: usize::MAX,
            src,
            dst,
            fs_count: fs,
        };
        if !topo.contains(src) || !topo.contains(dst) || src == dst || fs == 0 {
            return Err(js("need two distinct nodes of the topology and at least one slot"));
        }
        let routes = topo
            .k_shortest_paths(d.src, d.dst, self.cfg.k, self.cfg.link_disjoint)
            .map_err(js)?;
        let state = &self.out.solution.state;
        let matrix = scan_combinations(state, &routes, fs);
        let combos = min_combinations(&matrix);
        let mut out = String::new();
        for (r, route) in routes.iter().enumerate() {
            let _ = writeln!(out, "route {}: {}", r + 1, route.to_node_string());
        }
        let Some(first) = combos.first() else {
            out.push_str("no combination fits under the fiber cap\n");
            return Ok(out);
        };
        let _ = writeln!(
            out,
            "{} combinations need {} new fiber(s)\n",
            combos.len(),
            first.missing
        );
        const SHOWN: usize = 12;
        let mut best: Option<(usize, u64)> = None;
        for (n, c) in combos.iter().enumerate() {
            let graph = build_aux_graph(state, &routes[c.route], c.window, &self.out.geometry).map_err(js)?;
            let Some(path) = graph.layered_shortest_path() else {
                if n < SHOWN {
                    let _ = writeln!(out, "  route {} slots {}: no path", c.route + 1, c.window);
                }
                continue;
            };
            if best.map_or(true, |(_, b)| path.cost.0 < b) {
                best = Some((n, path.cost.0));
            }
            if n >= SHOWN {
                continue;
            }
            let cores: Vec<String> = graph
                .choices(&path)
                .iter()
                .map(|ch| format!("{}:{}", ch.fiber + 1, ch.core + 1))
                .collect();
            let _ = writeln!(
                out,
                "  route {} slots {}: cost {} via {}",
                c.route + 1,
                c.window,
                path.cost,
                cores.join(" ")
            );
        }
        if combos.len() > SHOWN {
            let _ = writeln!(out, "  ... {} more", combos.len() - SHOWN);
        }
        let _ = writeln!(out, "\nFF takes the first combination listed");
        if let Some((n, cost)) = best {
            let c = combos[n];
            let _ = writeln!(
                out,
                "LC takes route {} slots {} at cost {}",
                c.route + 1,
                c.window,
                mcf_rsca::heuristic::Cost(cost)
            );
        }
        Ok(out)
    }
}

/// Long-form sweep CSV for every ratio in `ars` (comma separated), both
/// modes and both strategies.
#[wasm_bindgen]
pub fn sweep_ar(config_text: &str, ars: &str) -> Result<String, JsError> {
    let cfg = config(config_text)?;
    let ars: Vec<AsymmetryRatio> = ars
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(js))
        .collect::<Result<_, _>>()?;
    let rows = experiment::sweep_ar(
        &cfg,
        &ars,
        &[Mode::Counter, Mode::Co],
        &[Strategy::FirstFit, Strategy::LeastCost],
    )
    .map_err(js)?;
    Ok(experiment::sweep_csv(&rows))
}
