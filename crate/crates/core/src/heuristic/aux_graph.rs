//! Auxiliary graph for core selection along a fixed route and spectrum window.
//!
//! Every eligible core of hop `h` becomes an edge `Entry(h, e) -> Exit(h, e)`
//! weighted by the crosstalk it would add. Switch edges connect every exit of
//! hop `h` to every entry of hop `h + 1`; they are expensive when they lead
//! into an unused core and cheap otherwise, which steers the search toward
//! cores that are already lit. The source connects to every entry of the
//! first hop under the same rule, and every exit of the last hop connects to
//! the sink at the cheap cost.
//!
//! Costs are kept in hundredths so ties break deterministically.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::Add;

use crate::crosstalk::incremental_crosstalk;
use crate::error::{Error, Result};
use crate::geometry::McfGeometry;
use crate::state::{CoreChoice, NetworkState, SpectrumWindow};
use crate::topology::{Direction, NodeId, Route};

/// Path cost in hundredths of a unit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cost(pub u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);

    pub fn from_crosstalk(xt: u64) -> Self {
        Cost(xt * 100)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

/// Switch cost into an unused core (10^4).
pub const SWITCH_TO_UNUSED: Cost = Cost(1_000_000);
/// Switch cost into a core already in use (0.01).
pub const SWITCH_TO_USED: Cost = Cost(1);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreEdge {
    pub choice: CoreChoice,
    pub unused: bool,
    /// Core of a fiber that has to be deployed first.
    pub fresh_fiber: bool,
    pub cost: Cost,
}

impl CoreEdge {
    fn switch_cost(&self) -> Cost {
        if self.unused {
            SWITCH_TO_UNUSED
        } else {
            SWITCH_TO_USED
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxNode {
    Source,
    Sink,
    Entry { hop: usize, edge: usize },
    Exit { hop: usize, edge: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Core { hop: usize, link: usize, choice: CoreChoice },
    /// Core-to-core interconnection inside a node.
    Switch { node: NodeId },
    Endpoint { node: NodeId },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxEdge {
    pub from: usize,
    pub to: usize,
    pub cost: Cost,
    pub kind: EdgeKind,
}

/// Least-cost core selection: one core-edge index per hop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxPath {
    pub cost: Cost,
    pub picks: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct AuxGraph {
    route_nodes: Vec<NodeId>,
    route_links: Vec<usize>,
    hops: Vec<Vec<CoreEdge>>,
    offsets: Vec<usize>,
}

impl AuxGraph {
    /// Builds the graph for `route` and `sw`. Hops flagged in `fresh` also get
    /// the cores of the fiber that would be deployed there.
    pub fn build(
        state: &NetworkState,
        route: &Route,
        sw: SpectrumWindow,
        g: &McfGeometry,
        fresh: &[bool],
    ) -> Result<Self> {
        let mut hops = Vec::with_capacity(route.hop_count());
        for (hop, (&link, dir)) in route.links.iter().zip(route.hop_directions()).enumerate() {
            let mut edges: Vec<CoreEdge> = state
                .eligible_cores(link, sw, dir)
                .map(|choice| {
                    let fiber = &state.link(link).fibers[choice.fiber];
                    CoreEdge {
                        choice,
                        unused: fiber.cores[choice.core].is_unused(),
                        fresh_fiber: false,
                        cost: Cost::from_crosstalk(incremental_crosstalk(fiber, choice.core, sw, dir, g)),
                    }
                })
                .collect();
            if fresh.get(hop).copied().unwrap_or(false) {
                let fiber = state.next_fiber_index(link, dir);
                edges.extend((0..state.core_count()).map(|core| CoreEdge {
                    choice: CoreChoice { fiber, core },
                    unused: true,
                    fresh_fiber: true,
                    cost: Cost::ZERO,
                }));
            }
            if edges.is_empty() {
                return Err(Error::NoEligibleCore(hop));
            }
            hops.push(edges);
        }
        let mut offsets = Vec::with_capacity(hops.len());
        let mut acc = 0;
        for h in &hops {
            offsets.push(acc);
            acc += h.len();
        }
        Ok(AuxGraph {
            route_nodes: route.nodes.clone(),
            route_links: route.links.clone(),
            hops,
            offsets,
        })
    }

    pub fn hops(&self) -> &[Vec<CoreEdge>] {
        &self.hops
    }

    pub fn node_count(&self) -> usize {
        2 + 2 * self.hops.iter().map(Vec::len).sum::<usize>()
    }

    pub fn index(&self, node: AuxNode) -> usize {
        match node {
            AuxNode::Source => 0,
            AuxNode::Sink => 1,
            AuxNode::Entry { hop, edge } => 2 + 2 * (self.offsets[hop] + edge),
            AuxNode::Exit { hop, edge } => 3 + 2 * (self.offsets[hop] + edge),
        }
    }

    /// Every auxiliary edge, including the full switch interconnections.
    pub fn edges(&self) -> Vec<AuxEdge> {
        let mut out = Vec::new();
        let last = self.hops.len() - 1;
        for (hop, edges) in self.hops.iter().enumerate() {
            for (e, core) in edges.iter().enumerate() {
                let entry = self.index(AuxNode::Entry { hop, edge: e });
                let exit = self.index(AuxNode::Exit { hop, edge: e });
                out.push(AuxEdge {
                    from: entry,
                    to: exit,
                    cost: core.cost,
                    kind: EdgeKind::Core {
                        hop,
                        link: self.route_links[hop],
                        choice: core.choice,
                    },
                });
                if hop == 0 {
                    out.push(AuxEdge {
                        from: self.index(AuxNode::Source),
                        to: entry,
                        cost: core.switch_cost(),
                        kind: EdgeKind::Endpoint {
                            node: self.route_nodes[0],
                        },
                    });
                } else {
                    for prev in 0..self.hops[hop - 1].len() {
                        out.push(AuxEdge {
                            from: self.index(AuxNode::Exit { hop: hop - 1, edge: prev }),
                            to: entry,
                            cost: core.switch_cost(),
                            kind: EdgeKind::Switch {
                                node: self.route_nodes[hop],
                            },
                        });
                    }
                }
                if hop == last {
                    out.push(AuxEdge {
                        from: exit,
                        to: self.index(AuxNode::Sink),
                        cost: SWITCH_TO_USED,
                        kind: EdgeKind::Endpoint {
                            node: self.route_nodes[hop + 1],
                        },
                    });
                }
            }
        }
        out
    }

    /// Dijkstra from source to sink over [`edges`](Self::edges).
    pub fn dijkstra(&self) -> Option<AuxPath> {
        let n = self.node_count();
        let edges = self.edges();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.from].push(i);
        }
        let mut dist = vec![u64::MAX; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[0] = 0;
        heap.push(Reverse((0u64, 0usize)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if u == 1 {
                break;
            }
            for &ei in &adj[u] {
                let e = &edges[ei];
                let nd = d + e.cost.0;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    via[e.to] = Some(ei);
                    heap.push(Reverse((nd, e.to)));
                }
            }
        }
        if dist[1] == u64::MAX {
            return None;
        }
        let mut picks = vec![0; self.hops.len()];
        let mut cur = 1;
        while let Some(ei) = via[cur] {
            if let EdgeKind::Core { hop, choice, .. } = edges[ei].kind {
                picks[hop] = self.hops[hop]
                    .iter()
                    .position(|c| c.choice == choice)
                    .expect("core edge belongs to its hop");
            }
            cur = edges[ei].from;
        }
        Some(AuxPath {
            cost: Cost(dist[1]),
            picks,
        })
    }

    /// Same optimum as [`dijkstra`](Self::dijkstra), computed hop by hop.
    ///
    /// Switch costs only depend on the entered core, so the cheapest way into
    /// any core of hop `h` comes from the cheapest exit of hop `h - 1`.
    pub fn layered_shortest_path(&self) -> Option<AuxPath> {
        let mut picks = Vec::with_capacity(self.hops.len());
        let mut into = Cost::ZERO;
        for edges in &self.hops {
            let (arg, exit) = edges
                .iter()
                .enumerate()
                .map(|(i, e)| (i, into + e.switch_cost() + e.cost))
                .min_by_key(|&(i, c)| (c, i))?;
            picks.push(arg);
            into = exit;
        }
        Some(AuxPath {
            cost: into + SWITCH_TO_USED,
            picks,
        })
    }

    pub fn choices(&self, path: &AuxPath) -> Vec<CoreChoice> {
        path.picks
            .iter()
            .enumerate()
            .map(|(hop, &e)| self.hops[hop][e].choice)
            .collect()
    }

    pub fn direction(&self, hop: usize) -> Direction {
        Direction::of_hop(self.route_nodes[hop], self.route_nodes[hop + 1])
    }
}
