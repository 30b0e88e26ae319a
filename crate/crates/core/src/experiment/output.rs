//! CSV emitters. Cores, fibers and slots are 1-based in every file.

use crate::crosstalk::CrosstalkReport;
use crate::demand::{generation_header, AsymmetryRatio, DemandSet};
use crate::heuristic::{RscaSolution, Strategy};
use crate::state::Mode;
use crate::topology::{Direction, Topology};

use super::config::{DemandSource, ExperimentConfig};

fn to_string(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn put<I, S>(w: &mut csv::Writer<Vec<u8>>, rec: I)
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(rec).expect("writing to memory cannot fail");
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub mode: Mode,
    pub strategy: Strategy,
    pub topology: String,
    pub cores: usize,
    pub slots: usize,
    pub fiber_cap: usize,
    /// Generator settings, absent for demand files.
    pub x_mean: Option<usize>,
    pub ar: Option<AsymmetryRatio>,
    pub seed: Option<u64>,
    pub demands: usize,
    pub served: usize,
    pub mcf_count: usize,
    pub crosstalk_total: u64,
    pub crosstalk_per_mcf: f64,
    pub objective: f64,
}

impl MetricsRow {
    pub fn new(cfg: &ExperimentConfig, demands: &DemandSet, sol: &RscaSolution) -> Self {
        let (x_mean, ar, seed) = match cfg.demands {
            DemandSource::Generate { x_mean, ar, seed, .. } => (Some(x_mean), Some(ar), Some(seed)),
            DemandSource::File(_) => (None, None, None),
        };
        MetricsRow {
            mode: sol.mode,
            strategy: sol.strategy,
            topology: cfg.topology.to_string(),
            cores: sol.state.core_count(),
            slots: cfg.slots,
            fiber_cap: cfg.fiber_cap,
            x_mean,
            ar,
            seed,
            demands: demands.len(),
            served: sol.records.len(),
            mcf_count: sol.mcf_count,
            crosstalk_total: sol.crosstalk.total_weighted,
            crosstalk_per_mcf: sol.crosstalk.average_per_mcf(),
            objective: sol.objective(cfg.alpha),
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut w = writer();
    put(
        &mut w,
        [
            "mode",
            "strategy",
            "topology",
            "cores",
            "slots",
            "fiber_cap",
            "x",
            "ar",
            "seed",
            "demands",
            "served",
            "mcf_count",
            "crosstalk_total",
            "crosstalk_per_mcf",
            "objective",
        ],
    );
    for r in rows {
        put(
            &mut w,
            [
                r.mode.to_string(),
                r.strategy.to_string(),
                r.topology.clone(),
                r.cores.to_string(),
                r.slots.to_string(),
                r.fiber_cap.to_string(),
                opt(r.x_mean),
                opt(r.ar),
                opt(r.seed),
                r.demands.to_string(),
                r.served.to_string(),
                r.mcf_count.to_string(),
                r.crosstalk_total.to_string(),
                format!("{:.4}", r.crosstalk_per_mcf),
                format!("{:.4}", r.objective),
            ],
        );
    }
    to_string(w)
}

/// One row per served lightpath. Run parameters and totals go into `#`
/// comment lines ahead of the header so the file can be validated alone.
pub fn solution_csv(cfg: &ExperimentConfig, demands: &DemandSet, sol: &RscaSolution) -> String {
    let mut out = format!(
        "# mode={} cores={} slots={} fiber_cap={} strategy={} topology={}\n",
        sol.mode,
        sol.state.core_count(),
        cfg.slots,
        cfg.fiber_cap,
        sol.strategy,
        cfg.topology
    );
    if let Some(g) = &demands.generation {
        out.push_str(&generation_header(g));
    }
    out.push_str(&format!(
        "# mcf_count={} crosstalk={}\n",
        sol.mcf_count, sol.crosstalk.total_weighted
    ));
    let unserved: Vec<String> = sol.unserved.iter().map(|d| d.to_string()).collect();
    out.push_str(&format!("# unserved={}\n", unserved.join(",")));
    let mut w = writer();
    put(&mut w, ["demand_id", "src", "dst", "fs", "route", "S", "E", "choices"]);
    for r in &sol.records {
        let choices: Vec<String> = r
            .choices
            .iter()
            .map(|c| format!("{}:{}", c.fiber + 1, c.core + 1))
            .collect();
        put(
            &mut w,
            [
                r.demand_id.to_string(),
                r.src.to_string(),
                r.dst.to_string(),
                r.fs_count.to_string(),
                r.route.to_node_string(),
                r.start().to_string(),
                r.end().to_string(),
                choices.join(";"),
            ],
        );
    }
    out.push_str(&to_string(w));
    out
}

pub fn crosstalk_csv(report: &CrosstalkReport) -> String {
    let mut w = writer();
    put(&mut w, ["link", "fiber", "core_i", "core_j", "level", "overlap", "weighted"]);
    for p in &report.pairs {
        put(
            &mut w,
            [
                (p.link + 1).to_string(),
                (p.fiber + 1).to_string(),
                (p.core_i + 1).to_string(),
                (p.core_j + 1).to_string(),
                p.level.to_string(),
                p.overlap.to_string(),
                p.weighted.to_string(),
            ],
        );
    }
    to_string(w)
}

/// Per-link usage. `cores_up` counts cores carrying the smaller-to-larger
/// node direction.
pub fn links_csv(topo: &Topology, sol: &RscaSolution) -> String {
    let mut w = writer();
    put(
        &mut w,
        ["link", "a", "b", "length_km", "fibers_deployed", "mcf_count", "cores_up", "cores_down", "crosstalk"],
    );
    for (l, link) in sol.state.links().iter().enumerate() {
        let info = topo.link(l);
        let count = |dir| link.fibers.iter().map(|f| f.used_cores(dir)).sum::<usize>();
        put(
            &mut w,
            [
                (l + 1).to_string(),
                info.a.to_string(),
                info.b.to_string(),
                info.length_km.to_string(),
                link.fibers.len().to_string(),
                link.mcf_count(sol.mode).to_string(),
                count(Direction::Up).to_string(),
                count(Direction::Down).to_string(),
                sol.crosstalk.per_link[l].to_string(),
            ],
        );
    }
    to_string(w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub ar: AsymmetryRatio,
    pub mode: Mode,
    pub strategy: Strategy,
    pub demands: usize,
    pub served: usize,
    pub mcf_count: usize,
    pub crosstalk_total: u64,
    pub crosstalk_per_mcf: f64,
}

impl SweepRow {
    pub fn new(ar: AsymmetryRatio, demands: &DemandSet, sol: &RscaSolution) -> Self {
        SweepRow {
            ar,
            mode: sol.mode,
            strategy: sol.strategy,
            demands: demands.len(),
            served: sol.records.len(),
            mcf_count: sol.mcf_count,
            crosstalk_total: sol.crosstalk.total_weighted,
            crosstalk_per_mcf: sol.crosstalk.average_per_mcf(),
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = writer();
    put(
        &mut w,
        ["ar", "mode", "strategy", "demands", "served", "mcf_count", "crosstalk_total", "crosstalk_per_mcf"],
    );
    for r in rows {
        put(
            &mut w,
            [
                r.ar.to_string(),
                r.mode.to_string(),
                r.strategy.to_string(),
                r.demands.to_string(),
                r.served.to_string(),
                r.mcf_count.to_string(),
                r.crosstalk_total.to_string(),
                format!("{:.4}", r.crosstalk_per_mcf),
            ],
        );
    }
    to_string(w)
}
