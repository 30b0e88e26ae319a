//! Network graphs, candidate routes and traversal directions.
//!
//! Nodes are numbered `1..=N`. A link is stored with `a < b`; traversing it
//! from `a` to `b` is the *upstream* direction, `b` to `a` *downstream*.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

pub type NodeId = u32;

pub const NSFNET: &str = include_str!("../data/nsfnet.txt");
pub const COST239: &str = include_str!("../data/cost239.txt");
pub const N6S8: &str = include_str!("../data/n6s8.txt");

/// Traversal direction of a link or propagation direction of a core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// From the smaller node id to the larger one.
    Up,
    /// From the larger node id to the smaller one.
    Down,
}

impl Direction {
    /// Integer encoding used by the ILP (1 = up, 2 = down).
    pub fn value(self) -> u8 {
        match self {
            Direction::Up => 1,
            Direction::Down => 2,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    pub fn of_hop(from: NodeId, to: NodeId) -> Self {
        if from < to {
            Direction::Up
        } else {
            Direction::Down
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Link {
    pub id: usize,
    pub a: NodeId,
    pub b: NodeId,
    pub length_km: f64,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

#[derive(Clone, Debug)]
pub struct Topology {
    node_count: u32,
    links: Vec<Link>,
    // adjacency[n - 1] = (neighbor, link id), sorted by neighbor
    adjacency: Vec<Vec<(NodeId, usize)>>,
}

impl Topology {
    /// Parses a whitespace separated edge list (`a b length_km` per line).
    pub fn parse(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `<node_a> <node_b> <length_km>`, got `{line}`"),
                });
            }
            let parse_node = |s: &str| -> Result<NodeId> {
                match s.parse::<NodeId>() {
                    Ok(n) if n >= 1 => Ok(n),
                    _ => Err(Error::Parse {
                        line: line_no,
                        msg: format!("invalid node id `{s}`"),
                    }),
                }
            };
            let a = parse_node(fields[0])?;
            let b = parse_node(fields[1])?;
            let length = fields[2].parse::<f64>().ok().filter(|l| l.is_finite() && *l > 0.0);
            let Some(length) = length else {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("invalid link length `{}`", fields[2]),
                });
            };
            if a == b {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("self-loop on node {a}"),
                });
            }
            edges.push((a, b, length));
        }
        Self::from_links(edges)
    }

    pub fn from_links(edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut links = Vec::new();
        let mut max_node = 0;
        for (a, b, length_km) in edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop on node {a}")));
            }
            if a == 0 || b == 0 {
                return Err(Error::InvalidTopology("node ids start at 1".into()));
            }
            if !(length_km.is_finite() && length_km > 0.0) {
                return Err(Error::InvalidTopology(format!("link {a}-{b} has non-positive length")));
            }
            let (a, b) = (a.min(b), a.max(b));
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateLink(a, b));
            }
            max_node = max_node.max(b);
            links.push(Link {
                id: links.len(),
                a,
                b,
                length_km,
            });
        }
        if links.is_empty() {
            return Err(Error::InvalidTopology("no links".into()));
        }
        let mut adjacency = vec![Vec::new(); max_node as usize];
        for link in &links {
            adjacency[link.a as usize - 1].push((link.b, link.id));
            adjacency[link.b as usize - 1].push((link.a, link.id));
        }
        for (i, adj) in adjacency.iter_mut().enumerate() {
            if adj.is_empty() {
                return Err(Error::InvalidTopology(format!(
                    "node ids must be contiguous: node {} has no links",
                    i + 1
                )));
            }
            adj.sort_unstable();
        }
        let topo = Topology {
            node_count: max_node,
            links,
            adjacency,
        };
        topo.check_connected()?;
        Ok(topo)
    }

    /// Built-in topology by name (`nsfnet`, `cost239`, `n6s8`).
    pub fn builtin(name: &str) -> Option<Self> {
        let text = match name.to_ascii_lowercase().as_str() {
            "nsfnet" => NSFNET,
            "cost239" => COST239,
            "n6s8" => N6S8,
            _ => return None,
        };
        Some(Self::parse(text).expect("built-in topology is valid"))
    }

    fn check_connected(&self) -> Result<()> {
        let mut seen = vec![false; self.node_count as usize];
        let mut stack = vec![1];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for &(m, _) in self.neighbors(n) {
                if !seen[m as usize - 1] {
                    seen[m as usize - 1] = true;
                    stack.push(m);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(Error::Disconnected(i as NodeId + 1)),
            None => Ok(()),
        }
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        1..=self.node_count
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: usize) -> &Link {
        &self.links[id]
    }

    pub fn neighbors(&self, n: NodeId) -> &[(NodeId, usize)] {
        &self.adjacency[n as usize - 1]
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n >= 1 && n <= self.node_count
    }

    pub fn find_link(&self, a: NodeId, b: NodeId) -> Option<usize> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        self.neighbors(a)
            .iter()
            .find(|&&(m, _)| m == b)
            .map(|&(_, id)| id)
    }

    /// Builds a validated route from a node sequence.
    pub fn route(&self, nodes: &[NodeId]) -> Result<Route> {
        if nodes.len() < 2 {
            return Err(Error::InvalidRoute("a route needs at least two nodes".into()));
        }
        let mut seen = HashSet::new();
        for &n in nodes {
            if !self.contains(n) {
                return Err(Error::InvalidRoute(format!("unknown node {n}")));
            }
            if !seen.insert(n) {
                return Err(Error::InvalidRoute(format!("node {n} repeated")));
            }
        }
        let mut links = Vec::with_capacity(nodes.len() - 1);
        let mut length_km = 0.0;
        for w in nodes.windows(2) {
            let id = self
                .find_link(w[0], w[1])
                .ok_or_else(|| Error::InvalidRoute(format!("no link {}-{}", w[0], w[1])))?;
            length_km += self.links[id].length_km;
            links.push(id);
        }
        Ok(Route {
            nodes: nodes.to_vec(),
            links,
            length_km,
        })
    }

    /// Loopless paths in nondecreasing length order (Yen's algorithm).
    pub fn shortest_paths(&self, src: NodeId, dst: NodeId) -> ShortestPaths<'_> {
        ShortestPaths {
            topo: self,
            src,
            dst,
            found: Vec::new(),
            candidates: BinaryHeap::new(),
            queued: HashSet::new(),
            started: false,
        }
    }

    /// Up to `k` loopless routes sorted by length.
    ///
    /// With `link_disjoint`, paths are taken greedily in length order and a path
    /// is kept only if it shares no link with the routes already kept.
    pub fn k_shortest_paths(
        &self,
        src: NodeId,
        dst: NodeId,
        k: usize,
        link_disjoint: bool,
    ) -> Result<Vec<Route>> {
        if !self.contains(src) || !self.contains(dst) {
            return Err(Error::InvalidParameter(format!("unknown node in pair {src}-{dst}")));
        }
        if src == dst {
            return Err(Error::InvalidParameter("source equals destination".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let mut routes: Vec<Route> = Vec::with_capacity(k);
        let mut used_links = HashSet::new();
        for route in self.shortest_paths(src, dst) {
            if link_disjoint {
                if route.links.iter().any(|l| used_links.contains(l)) {
                    continue;
                }
                used_links.extend(route.links.iter().copied());
            }
            routes.push(route);
            if routes.len() == k {
                break;
            }
        }
        if routes.is_empty() {
            return Err(Error::Unreachable { src, dst });
        }
        Ok(routes)
    }

    fn dijkstra(
        &self,
        src: NodeId,
        dst: NodeId,
        banned_nodes: &HashSet<NodeId>,
        banned_links: &HashSet<usize>,
    ) -> Option<(Vec<NodeId>, f64)> {
        let n = self.node_count as usize;
        let mut dist = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<NodeId>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[src as usize - 1] = 0.0;
        heap.push(Reverse((Km(0.0), src)));
        while let Some(Reverse((Km(d), u))) = heap.pop() {
            if d > dist[u as usize - 1] {
                continue;
            }
            if u == dst {
                break;
            }
            for &(v, link) in self.neighbors(u) {
                if banned_nodes.contains(&v) || banned_links.contains(&link) {
                    continue;
                }
                let nd = d + self.links[link].length_km;
                let slot = &mut dist[v as usize - 1];
                if nd < *slot {
                    *slot = nd;
                    prev[v as usize - 1] = Some(u);
                    heap.push(Reverse((Km(nd), v)));
                }
            }
        }
        if dist[dst as usize - 1].is_infinite() {
            return None;
        }
        let mut path = vec![dst];
        let mut cur = dst;
        while let Some(p) = prev[cur as usize - 1] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some((path, dist[dst as usize - 1]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Km(f64);

impl Eq for Km {}

impl PartialOrd for Km {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Km {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub links: Vec<usize>,
    pub length_km: f64,
}

impl Route {
    pub fn src(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn dst(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn hop_count(&self) -> usize {
        self.links.len()
    }

    /// Traversal direction of every hop, in route order.
    pub fn hop_directions(&self) -> impl Iterator<Item = Direction> + '_ {
        self.nodes.windows(2).map(|w| Direction::of_hop(w[0], w[1]))
    }

    pub fn direction_on(&self, link_id: usize) -> Option<Direction> {
        self.links
            .iter()
            .position(|&l| l == link_id)
            .map(|pos| Direction::of_hop(self.nodes[pos], self.nodes[pos + 1]))
    }

    /// `1-4-5-3` style rendering.
    pub fn to_node_string(&self) -> String {
        let parts: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        parts.join("-")
    }
}

/// Direction value of link `(a, b)` on `route`: 1 upstream, 2 downstream, 0 if absent.
pub fn link_direction(route: &Route, a: NodeId, b: NodeId) -> u8 {
    route
        .nodes
        .windows(2)
        .find(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
        .map_or(0, |w| Direction::of_hop(w[0], w[1]).value())
}

#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    length: Km,
    nodes: Vec<NodeId>,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (length, hop count, node sequence)
        other
            .length
            .cmp(&self.length)
            .then_with(|| other.nodes.len().cmp(&self.nodes.len()))
            .then_with(|| other.nodes.cmp(&self.nodes))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy loopless path enumeration, see [`Topology::shortest_paths`].
pub struct ShortestPaths<'a> {
    topo: &'a Topology,
    src: NodeId,
    dst: NodeId,
    found: Vec<Route>,
    candidates: BinaryHeap<Candidate>,
    queued: HashSet<Vec<NodeId>>,
    started: bool,
}

impl ShortestPaths<'_> {
    fn push_candidate(&mut self, nodes: Vec<NodeId>) {
        if self.queued.insert(nodes.clone()) {
            let route = self.topo.route(&nodes).expect("spur path is a valid route");
            self.candidates.push(Candidate {
                length: Km(route.length_km),
                nodes,
            });
        }
    }

    fn spur_from_last(&mut self) {
        let last = self.found.last().expect("at least one path found").nodes.clone();
        for i in 0..last.len() - 1 {
            let spur_node = last[i];
            let root = &last[..=i];
            let mut banned_links = HashSet::new();
            for p in &self.found {
                if p.nodes.len() > i && p.nodes[..=i] == *root {
                    banned_links.insert(p.links[i]);
                }
            }
            let banned_nodes: HashSet<NodeId> = root[..i].iter().copied().collect();
            if let Some((spur, _)) =
                self.topo
                    .dijkstra(spur_node, self.dst, &banned_nodes, &banned_links)
            {
                let mut total = root[..i].to_vec();
                total.extend(spur);
                self.push_candidate(total);
            }
        }
    }
}

impl Iterator for ShortestPaths<'_> {
    type Item = Route;

    fn next(&mut self) -> Option<Route> {
        if self.src == self.dst || !self.topo.contains(self.src) || !self.topo.contains(self.dst) {
            return None;
        }
        if !self.started {
            self.started = true;
            let (nodes, _) =
                self.topo
                    .dijkstra(self.src, self.dst, &HashSet::new(), &HashSet::new())?;
            self.queued.insert(nodes.clone());
            let route = self.topo.route(&nodes).ok()?;
            self.found.push(route.clone());
            return Some(route);
        }
        if self.found.is_empty() {
            return None;
        }
        self.spur_from_last();
        let best = self.candidates.pop()?;
        let route = self.topo.route(&best.nodes).expect("candidate is a valid route");
        self.found.push(route.clone());
        Some(route)
    }
}

/// Sorted, deduplicated set of unordered node pairs `(a, b)` with `a < b`.
pub fn node_pairs(topo: &Topology) -> BTreeSet<(NodeId, NodeId)> {
    let mut pairs = BTreeSet::new();
    for a in topo.nodes() {
        for b in (a + 1)..=topo.node_count() {
            pairs.insert((a, b));
        }
    }
    pairs
}
