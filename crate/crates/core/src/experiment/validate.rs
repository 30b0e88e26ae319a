//! Independent re-check of a `solution.csv` log.
//!
//! Every constraint is checked directly on the parsed rows before the log is
//! replayed through a fresh [`NetworkState`], so a broken log names the
//! offending demands instead of failing on the first bad commit.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::crosstalk::total_crosstalk;
use crate::demand::DemandSet;
use crate::error::{Error, Result};
use crate::geometry::McfGeometry;
use crate::state::{CoreChoice, LightpathRecord, Mode, NetworkState, SpectrumWindow, StateConfig};
use crate::topology::{Direction, NodeId, Topology};

#[derive(Clone, Debug, PartialEq)]
pub struct LogMeta {
    pub mode: Mode,
    pub cores: usize,
    pub slots: usize,
    pub fiber_cap: usize,
    pub mcf_count: Option<usize>,
    pub crosstalk: Option<u64>,
    pub unserved: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogRow {
    pub demand_id: usize,
    pub src: NodeId,
    pub dst: NodeId,
    pub fs: usize,
    pub route: Vec<NodeId>,
    pub start: usize,
    pub end: usize,
    /// 0-based fiber and core per hop.
    pub choices: Vec<CoreChoice>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionLog {
    pub meta: LogMeta,
    pub rows: Vec<LogRow>,
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: usize, field: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| bad(line, format!("invalid {field} `{v}`")))
}

pub fn parse_solution(text: &str) -> Result<SolutionLog> {
    let mut kv: HashMap<String, String> = HashMap::new();
    for line in text.lines().filter(|l| l.starts_with('#')) {
        for tok in line.trim_start_matches('#').split_whitespace() {
            if let Some((k, v)) = tok.split_once('=') {
                kv.insert(k.to_string(), v.to_string());
            } else if tok.ends_with('=') {
                kv.insert(tok.trim_end_matches('=').to_string(), String::new());
            }
        }
    }
    let need = |k: &str| kv.get(k).ok_or_else(|| bad(1, format!("header lacks `{k}=`")));
    let unserved = match kv.get("unserved") {
        Some(v) if !v.is_empty() => v
            .split(',')
            .map(|s| num(1, "unserved id", s))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let meta = LogMeta {
        mode: need("mode")?.parse()?,
        cores: num(1, "cores", need("cores")?)?,
        slots: num(1, "slots", need("slots")?)?,
        fiber_cap: num(1, "fiber_cap", need("fiber_cap")?)?,
        mcf_count: kv.get("mcf_count").map(|v| num(1, "mcf_count", v)).transpose()?,
        crosstalk: kv.get("crosstalk").map(|v| num(1, "crosstalk", v)).transpose()?,
        unserved,
    };

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    let expected = ["demand_id", "src", "dst", "fs", "route", "S", "E", "choices"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(bad(1, format!("unexpected columns `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bad(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let route = rec[4]
            .split('-')
            .map(|n| num(line, "route node", n))
            .collect::<Result<Vec<NodeId>>>()?;
        let choices = rec[7]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|c| {
                let (f, k) = c
                    .split_once(':')
                    .ok_or_else(|| bad(line, format!("choice `{c}` is not `fiber:core`")))?;
                let f: usize = num(line, "fiber", f)?;
                let k: usize = num(line, "core", k)?;
                if f == 0 || k == 0 {
                    return Err(bad(line, "fibers and cores are numbered from 1"));
                }
                Ok(CoreChoice { fiber: f - 1, core: k - 1 })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(LogRow {
            demand_id: num(line, "demand_id", &rec[0])?,
            src: num(line, "src", &rec[1])?,
            dst: num(line, "dst", &rec[2])?,
            fs: num(line, "fs", &rec[3])?,
            route,
            start: num(line, "S", &rec[5])?,
            end: num(line, "E", &rec[6])?,
            choices,
        });
    }
    Ok(SolutionLog { meta, rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Route,
    Contiguity,
    Capacity,
    Direction,
    DoubleBooking,
    Demand,
    Metrics,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Route => "route",
            ViolationKind::Contiguity => "contiguity",
            ViolationKind::Capacity => "capacity",
            ViolationKind::Direction => "direction",
            ViolationKind::DoubleBooking => "double-booking",
            ViolationKind::Demand => "demand",
            ViolationKind::Metrics => "metrics",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub demand_id: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.demand_id {
            Some(d) => write!(f, "{} violation, demand {d}: {}", self.kind, self.detail),
            None => write!(f, "{} violation: {}", self.kind, self.detail),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub rows: usize,
    pub violations: Vec<Violation>,
    /// Recomputed from the replayed state when the log is clean.
    pub mcf_count: Option<usize>,
    pub crosstalk: Option<u64>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn kinds(&self) -> BTreeSet<ViolationKind> {
        self.violations.iter().map(|v| v.kind).collect()
    }
}

/// Checks `log` against `topo` and `g`. With `demands`, also checks that each
/// row matches its demand and that every demand is either served or listed
/// as unserved.
pub fn validate_solution(log: &SolutionLog, topo: &Topology, g: &McfGeometry, demands: Option<&DemandSet>) -> ValidationReport {
    let meta = &log.meta;
    let mut out = ValidationReport {
        rows: log.rows.len(),
        ..Default::default()
    };
    macro_rules! push {
        ($kind:expr, $id:expr, $detail:expr $(,)?) => {
            out.violations.push(Violation {
                kind: $kind,
                demand_id: $id,
                detail: $detail,
            })
        };
    }
    if g.core_count() != meta.cores {
        push!(
            ViolationKind::Capacity,
            None,
            format!("log uses {} cores but the geometry has {}", meta.cores, g.core_count()),
        );
    }
    let fiber_limit = match meta.mode {
        Mode::Counter => meta.fiber_cap,
        Mode::Co => 2 * meta.fiber_cap,
    };
    // (link, fiber, core) -> direction and per-slot owner
    let mut dirs: HashMap<(usize, usize, usize), (Direction, usize)> = HashMap::new();
    let mut owners: HashMap<(usize, usize, usize), Vec<Option<usize>>> = HashMap::new();
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();

    for row in &log.rows {
        let id = Some(row.demand_id);
        if !seen.insert(row.demand_id) {
            push!(ViolationKind::Demand, id, "demand appears more than once".into());
        }
        let route = match topo.route(&row.route) {
            Ok(r) => r,
            Err(e) => {
                push!(ViolationKind::Route, id, e.to_string());
                continue;
            }
        };
        if route.src() != row.src || route.dst() != row.dst {
            push!(
                ViolationKind::Route,
                id,
                format!("route {} does not connect {} to {}", route.to_node_string(), row.src, row.dst),
            );
            continue;
        }
        if row.choices.len() != route.hop_count() {
            push!(
                ViolationKind::Route,
                id,
                format!("{} core choices for {} hops", row.choices.len(), route.hop_count()),
            );
            continue;
        }
        if row.fs == 0 || row.end < row.start || row.end - row.start + 1 != row.fs {
            push!(
                ViolationKind::Contiguity,
                id,
                format!("slots {}..{} do not hold exactly {} contiguous FSs", row.start, row.end, row.fs),
            );
            continue;
        }
        if row.start == 0 || row.end > meta.slots {
            push!(
                ViolationKind::Capacity,
                id,
                format!("slots {}..{} fall outside 1..{}", row.start, row.end, meta.slots),
            );
            continue;
        }
        let mut ok = true;
        for ((&link, dir), c) in route.links.iter().zip(route.hop_directions()).zip(&row.choices) {
            if c.core >= meta.cores || c.fiber >= fiber_limit {
                push!(
                    ViolationKind::Capacity,
                    id,
                    format!("fiber {} core {} on link {} is beyond the limits", c.fiber + 1, c.core + 1, link + 1),
                );
                ok = false;
                continue;
            }
            if meta.mode == Mode::Co {
                let fixed = if c.fiber % 2 == 0 { Direction::Up } else { Direction::Down };
                if fixed != dir {
                    push!(
                        ViolationKind::Direction,
                        id,
                        format!("fiber {} on link {} carries the opposite direction", c.fiber + 1, link + 1),
                    );
                    ok = false;
                    continue;
                }
            }
            let key = (link, c.fiber, c.core);
            match dirs.get(&key) {
                Some(&(d, other)) if d != dir => {
                    push!(
                        ViolationKind::Direction,
                        id,
                        format!(
                            "core {} of fiber {} on link {} already carries demand {other} the other way",
                            c.core + 1,
                            c.fiber + 1,
                            link + 1
                        ),
                    );
                    ok = false;
                    continue;
                }
                Some(_) => {}
                None => {
                    dirs.insert(key, (dir, row.demand_id));
                }
            }
            let slots = owners.entry(key).or_insert_with(|| vec![None; meta.slots + 1]);
            let clash: BTreeSet<usize> = (row.start..=row.end).filter_map(|s| slots[s]).collect();
            if clash.is_empty() {
                for s in row.start..=row.end {
                    slots[s] = Some(row.demand_id);
                }
            } else {
                let others: Vec<String> = clash.iter().map(|d| d.to_string()).collect();
                push!(
                    ViolationKind::DoubleBooking,
                    id,
                    format!(
                        "slots {}..{} on core {} of fiber {} on link {} overlap demand {}",
                        row.start,
                        row.end,
                        c.core + 1,
                        c.fiber + 1,
                        link + 1,
                        others.join(",")
                    ),
                );
                ok = false;
            }
        }
        if ok {
            records.push(LightpathRecord {
                demand_id: row.demand_id,
                src: row.src,
                dst: row.dst,
                fs_count: row.fs,
                window: SpectrumWindow {
                    start: row.start,
                    width: row.fs,
                },
                route,
                choices: row.choices.clone(),
            });
        }
    }

    if let Some(ds) = demands {
        let rows: HashMap<usize, &LogRow> = log.rows.iter().map(|r| (r.demand_id, r)).collect();
        for d in ds.iter() {
            match rows.get(&d.id) {
                Some(r) if (r.src, r.dst, r.fs) != (d.src, d.dst, d.fs_count) => push!(
                    ViolationKind::Demand,
                    Some(d.id),
                    format!("row serves {}->{} with {} FSs, demand is {}->{} with {}", r.src, r.dst, r.fs, d.src, d.dst, d.fs_count),
                ),
                Some(_) => {}
                None if meta.unserved.contains(&d.id) => {}
                None => push!(ViolationKind::Demand, Some(d.id), "neither served nor listed as unserved".into()),
            }
        }
    }

    if !out.violations.is_empty() {
        return out;
    }
    let config = match StateConfig::new(meta.mode, meta.cores, meta.slots, meta.fiber_cap) {
        Ok(c) => c,
        Err(e) => {
            push!(ViolationKind::Capacity, None, e.to_string());
            return out;
        }
    };
    let state = match NetworkState::replay(topo.links().len(), config, &records) {
        Ok(s) => s,
        Err(e) => {
            let id = match &e {
                Error::CommitRejected { demand, .. } => Some(*demand),
                _ => None,
            };
            push!(ViolationKind::Capacity, id, format!("replay failed: {e}"));
            return out;
        }
    };
    let mcf = state.mcf_count();
    let xt = total_crosstalk(&state, g).total_weighted;
    if let Some(m) = meta.mcf_count.filter(|&m| m != mcf) {
        push!(ViolationKind::Metrics, None, format!("log reports {m} MCFs, replay gives {mcf}"));
    }
    if let Some(x) = meta.crosstalk.filter(|&x| x != xt) {
        push!(ViolationKind::Metrics, None, format!("log reports crosstalk {x}, replay gives {xt}"));
    }
    out.mcf_count = Some(mcf);
    out.crosstalk = Some(xt);
    out
}
