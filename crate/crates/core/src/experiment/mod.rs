//! Experiment harness: configured runs, AR sweeps and CSV output.
//!
//! Everything here is deterministic for a fixed config. Wall-clock timing
//! belongs to the caller.

mod config;
mod layout;
mod output;
mod validate;

use std::path::{Path, PathBuf};

pub use config::{DemandSource, ExperimentConfig, GeometrySource, TopologySource, KEYS};
pub use layout::{link_layout, render_layout, FiberLayout, LinkLayout};
pub use output::{crosstalk_csv, links_csv, metrics_csv, solution_csv, sweep_csv, MetricsRow, SweepRow};
pub use validate::{parse_solution, validate_solution, LogMeta, LogRow, SolutionLog, ValidationReport, Violation, ViolationKind};

use crate::demand::{AsymmetryRatio, DemandSet, PairTotals};
use crate::error::{Error, Result};
use crate::geometry::McfGeometry;
use crate::heuristic::{solve_all, RscaSolution, Strategy};
use crate::state::{Mode, NetworkState};
use crate::topology::Topology;

pub struct RunOutcome {
    pub topology: Topology,
    pub geometry: McfGeometry,
    pub demands: DemandSet,
    pub solution: RscaSolution,
}

impl RunOutcome {
    pub fn metrics(&self, cfg: &ExperimentConfig) -> MetricsRow {
        MetricsRow::new(cfg, &self.demands, &self.solution)
    }
}

/// Loads every input named by `cfg` and runs the heuristic once.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let topology = cfg.load_topology()?;
    let geometry = cfg.load_geometry()?;
    let demands = cfg.load_demands(&topology)?;
    let solution = run_loaded(cfg, &topology, &geometry, &demands)?;
    Ok(RunOutcome {
        topology,
        geometry,
        demands,
        solution,
    })
}

pub fn run_loaded(cfg: &ExperimentConfig, topo: &Topology, g: &McfGeometry, demands: &DemandSet) -> Result<RscaSolution> {
    let state = NetworkState::new(topo.links().len(), cfg.state_config(g.core_count())?);
    solve_all(state, topo, demands, &cfg.heuristic(), g)
}

/// Writes metrics, solution, crosstalk and per-link CSVs into `dir`.
pub fn write_outputs(cfg: &ExperimentConfig, out: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("metrics.csv", metrics_csv(&[out.metrics(cfg)])),
        ("solution.csv", solution_csv(cfg, &out.demands, &out.solution)),
        ("crosstalk.csv", crosstalk_csv(&out.solution.crosstalk)),
        ("links.csv", links_csv(&out.topology, &out.solution)),
    ];
    let mut paths = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body)?;
        paths.push(p);
    }
    Ok(paths)
}

/// Runs every (AR, mode, strategy) point on one shared set of pair totals.
///
/// Only the split changes between AR values. Rows come back sorted by AR,
/// then mode, then strategy.
pub fn sweep_ar(cfg: &ExperimentConfig, ars: &[AsymmetryRatio], modes: &[Mode], strategies: &[Strategy]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if ars.is_empty() || modes.is_empty() || strategies.is_empty() {
        return Err(Error::InvalidParameter("a sweep needs at least one AR, mode and strategy".into()));
    }
    let DemandSource::Generate { x_mean, seed, pairs, .. } = cfg.demands else {
        return Err(Error::InvalidParameter("an AR sweep needs generated demands".into()));
    };
    let topo = cfg.load_topology()?;
    let g = cfg.load_geometry()?;
    let totals = PairTotals::generate(&topo, x_mean, seed, pairs)?;
    let mut points = Vec::new();
    for &ar in ars {
        for &mode in modes {
            for &strategy in strategies {
                points.push((ar, mode, strategy));
            }
        }
    }
    let eval = |&(ar, mode, strategy): &(AsymmetryRatio, Mode, Strategy)| -> Result<SweepRow> {
        let demands = totals.split(ar);
        let mut point = cfg.clone();
        point.mode = mode;
        point.strategy = strategy;
        let sol = run_loaded(&point, &topo, &g, &demands)?;
        Ok(SweepRow::new(ar, &demands, &sol))
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<SweepRow>> = {
        use rayon::prelude::*;
        points.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<SweepRow>> = points.iter().map(eval).collect();
    let mut rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        a.ar.as_f64()
            .total_cmp(&b.ar.as_f64())
            .then_with(|| a.mode.to_string().cmp(&b.mode.to_string()))
            .then_with(|| a.strategy.to_string().cmp(&b.strategy.to_string()))
    });
    Ok(rows)
}
