//! Text diagrams of core directions on one link.
//!
//! `OUT` marks a core carrying the link from its smaller node id to the
//! larger one, `IN` the reverse, `-` an idle core.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::McfGeometry;
use crate::state::{Mode, NetworkState};
use crate::topology::{Direction, NodeId, Topology};

#[derive(Clone, Debug, PartialEq)]
pub struct FiberLayout {
    /// 0-based fiber index on the link.
    pub fiber: usize,
    /// Fixed direction in co mode.
    pub fixed: Option<Direction>,
    pub cores: Vec<Option<Direction>>,
}

impl FiberLayout {
    pub fn count(&self, dir: Direction) -> usize {
        self.cores.iter().filter(|c| **c == Some(dir)).count()
    }

    pub fn idle(&self) -> usize {
        self.cores.iter().filter(|c| c.is_none()).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkLayout {
    pub link: usize,
    pub a: NodeId,
    pub b: NodeId,
    pub mode: Mode,
    pub fibers: Vec<FiberLayout>,
}

pub fn link_layout(state: &NetworkState, topo: &Topology, a: NodeId, b: NodeId) -> Result<LinkLayout> {
    let link = topo
        .find_link(a, b)
        .ok_or_else(|| Error::InvalidParameter(format!("no link {a}-{b} in the topology")))?;
    let info = topo.link(link);
    let fibers = state
        .link(link)
        .fibers
        .iter()
        .enumerate()
        .map(|(i, f)| FiberLayout {
            fiber: i,
            fixed: f.fixed,
            cores: f.cores.iter().map(|c| c.direction).collect(),
        })
        .collect();
    Ok(LinkLayout {
        link,
        a: info.a.min(info.b),
        b: info.a.max(info.b),
        mode: state.mode(),
        fibers,
    })
}

fn label(d: Option<Direction>) -> &'static str {
    match d {
        Some(Direction::Up) => "OUT",
        Some(Direction::Down) => "IN",
        None => "-",
    }
}

/// Draws every deployed fiber of the link on the hexagonal grid of `g`.
pub fn render_layout(layout: &LinkLayout, g: &McfGeometry) -> String {
    let mut out = format!(
        "link {} ({}-{}), {} mode; OUT = {}->{}, IN = {}->{}\n",
        layout.link + 1,
        layout.a,
        layout.b,
        layout.mode,
        layout.a,
        layout.b,
        layout.b,
        layout.a
    );
    if layout.fibers.is_empty() {
        out.push_str("no fibers deployed\n");
        return out;
    }
    let cells: Vec<(i64, i64)> = g
        .coords()
        .iter()
        .map(|&(x, y)| ((y / 0.866).round() as i64, (2.0 * x).round() as i64))
        .collect();
    let min_col = cells.iter().map(|c| c.1).min().unwrap_or(0);
    let mut rows: Vec<i64> = cells.iter().map(|c| c.0).collect();
    rows.sort_unstable();
    rows.dedup();
    for f in &layout.fibers {
        let fixed = match f.fixed {
            Some(d) => format!(" [{}]", label(Some(d))),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "fiber {}{}: OUT {}, IN {}, idle {}",
            f.fiber + 1,
            fixed,
            f.count(Direction::Up),
            f.count(Direction::Down),
            f.idle()
        );
        for &row in rows.iter().rev() {
            let mut line = String::from("  ");
            let mut in_row: Vec<(i64, usize)> = cells
                .iter()
                .enumerate()
                .filter(|(_, c)| c.0 == row)
                .map(|(i, c)| (c.1, i))
                .collect();
            in_row.sort_unstable();
            for (col, core) in in_row {
                let pos = 2 + 3 * (col - min_col) as usize;
                while line.len() < pos {
                    line.push(' ');
                }
                line.push_str(label(f.cores.get(core).copied().flatten()));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
    out
}
