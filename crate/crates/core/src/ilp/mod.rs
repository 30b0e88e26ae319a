//! Integer linear programming model of the RSCA problem.
//!
//! The model is kept as a plain sparse MILP (named variables, tagged rows,
//! linear objective) so it can be written out for an external solver or
//! checked against the in-process exact search in [`exact`].
//!
//! Index conventions: links, fibers, cores, demands and routes are 0-based
//! internally and 1-based in variable names; slot indices `k` are 1-based
//! everywhere.

mod exact;
mod lp;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

pub use exact::{assignment_values, solve_exact_small, ExactLimits, ExactPath, ExactSolution};
pub use lp::write_lp;

use crate::demand::{Demand, DemandSet};
use crate::error::{Error, Result};
use crate::geometry::McfGeometry;
use crate::state::Mode;
use crate::topology::{Direction, Route, Topology};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Constraint family, 2 to 21.
    pub family: u8,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn lhs(&self, values: &[i64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v] as f64).sum()
    }

    pub fn is_satisfied(&self, values: &[i64]) -> bool {
        const TOL: f64 = 1e-9;
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs + TOL,
            Sense::Ge => lhs >= self.rhs - TOL,
            Sense::Eq => (lhs - self.rhs).abs() <= TOL,
        }
    }
}

/// Variable families; every index is 0-based except the slot `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// Fiber used; in co mode `t` is the index of an opposed fiber pair.
    F { l: usize, t: usize },
    U { l: usize, i: usize, t: usize },
    S { r: usize, p: usize },
    E { r: usize, p: usize },
    Rho { r1: usize, p1: usize, r2: usize, p2: usize },
    X { r: usize, p: usize },
    O { r: usize, p: usize, l: usize, i: usize, t: usize },
    Dc { l: usize, i: usize, t: usize },
    Y { l: usize, t: usize, i: usize, j: usize },
    Phi1 { l: usize, t: usize, i: usize, j: usize },
    Phi2 { l: usize, t: usize, i: usize, j: usize },
    Z { l: usize, t: usize, i: usize, j: usize },
    Beta { r: usize, p: usize, k: usize },
    Gamma { r: usize, p: usize, k: usize },
    Theta { l: usize, t: usize, i: usize, k: usize },
    A { l: usize, t: usize, i: usize, j: usize, k: usize },
}

impl Var {
    pub fn family(&self) -> &'static str {
        match self {
            Var::F { .. } => "f",
            Var::U { .. } => "U",
            Var::S { .. } => "S",
            Var::E { .. } => "E",
            Var::Rho { .. } => "rho",
            Var::X { .. } => "X",
            Var::O { .. } => "O",
            Var::Dc { .. } => "DC",
            Var::Y { .. } => "Y",
            Var::Phi1 { .. } => "phi1",
            Var::Phi2 { .. } => "phi2",
            Var::Z { .. } => "Z",
            Var::Beta { .. } => "beta",
            Var::Gamma { .. } => "gamma",
            Var::Theta { .. } => "theta",
            Var::A { .. } => "A",
        }
    }

    fn name(&self) -> String {
        let fam = self.family();
        match *self {
            Var::F { l, t } => format!("{fam}_l{}_t{}", l + 1, t + 1),
            Var::U { l, i, t } | Var::Dc { l, i, t } => format!("{fam}_l{}_i{}_t{}", l + 1, i + 1, t + 1),
            Var::S { r, p } | Var::E { r, p } | Var::X { r, p } => format!("{fam}_r{}p{}", r + 1, p + 1),
            Var::Rho { r1, p1, r2, p2 } => format!("{fam}_r{}p{}_r{}p{}", r1 + 1, p1 + 1, r2 + 1, p2 + 1),
            Var::O { r, p, l, i, t } => {
                format!("{fam}_r{}p{}_l{}_i{}_t{}", r + 1, p + 1, l + 1, i + 1, t + 1)
            }
            Var::Y { l, t, i, j } | Var::Phi1 { l, t, i, j } | Var::Phi2 { l, t, i, j } | Var::Z { l, t, i, j } => {
                format!("{fam}_l{}_t{}_i{}_j{}", l + 1, t + 1, i + 1, j + 1)
            }
            Var::Beta { r, p, k } | Var::Gamma { r, p, k } => format!("{fam}_r{}p{}_k{k}", r + 1, p + 1),
            Var::Theta { l, t, i, k } => format!("{fam}_l{}_t{}_i{}_k{k}", l + 1, t + 1, i + 1),
            Var::A { l, t, i, j, k } => format!("{fam}_l{}_t{}_i{}_j{}_k{k}", l + 1, t + 1, i + 1, j + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BigM {
    /// Smallest valid constant for each row family.
    Tight,
    /// One constant for every row; must exceed `W * F * |C|`.
    Global(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IlpParams {
    pub mode: Mode,
    /// Fibers per link (counter) or fiber pairs per link (co).
    pub fiber_cap: usize,
    pub slots: usize,
    pub k: usize,
    pub link_disjoint: bool,
    pub alpha: f64,
    pub epsilon: f64,
    pub big_m: BigM,
}

impl Default for IlpParams {
    fn default() -> Self {
        IlpParams {
            mode: Mode::Counter,
            fiber_cap: 1,
            slots: 8,
            k: 2,
            link_disjoint: true,
            alpha: 0.01,
            epsilon: 0.5,
            big_m: BigM::Tight,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IlpInstance {
    pub params: IlpParams,
    pub core_count: usize,
    pub link_count: usize,
    /// Physical fibers per link: `F` in counter mode, `2F` in co mode.
    pub fibers_per_link: usize,
    /// Crosstalk weight for every core pair (0 on the diagonal).
    pub weights: Vec<Vec<u64>>,
    pub demands: Vec<Demand>,
    /// Candidate routes per demand.
    pub routes: Vec<Vec<Route>>,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
    index: HashMap<Var, usize>,
    keys: Vec<Var>,
    /// Big-M used per family.
    pub big_m_used: Vec<(u8, f64)>,
}

impl IlpInstance {
    pub fn var(&self, key: Var) -> Option<usize> {
        self.index.get(&key).copied()
    }

    pub fn key(&self, idx: usize) -> Var {
        self.keys[idx]
    }

    pub fn count(&self, family: &str) -> usize {
        self.keys.iter().filter(|k| k.family() == family).count()
    }

    /// Families that have at least one row.
    pub fn families(&self) -> BTreeSet<u8> {
        self.constraints.iter().map(|c| c.family).collect()
    }

    /// Fixed direction of physical fiber `t` in co mode.
    pub fn fiber_direction(&self, t: usize) -> Option<Direction> {
        match self.params.mode {
            Mode::Counter => None,
            Mode::Co if t % 2 == 0 => Some(Direction::Up),
            Mode::Co => Some(Direction::Down),
        }
    }

    /// Index of the `f` variable covering physical fiber `t`.
    pub fn fiber_group(&self, t: usize) -> usize {
        match self.params.mode {
            Mode::Counter => t,
            Mode::Co => t / 2,
        }
    }

    pub fn objective_value(&self, values: &[i64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v] as f64).sum()
    }

    /// Names of the rows violated by `values`.
    pub fn violations(&self, values: &[i64]) -> Vec<String> {
        let mut out: Vec<String> = self
            .variables
            .iter()
            .zip(values)
            .filter(|(v, &x)| x < v.lower || x > v.upper)
            .map(|(v, x)| format!("bound {} = {x}", v.name))
            .collect();
        out.extend(
            self.constraints
                .iter()
                .filter(|c| !c.is_satisfied(values))
                .map(|c| c.name.clone()),
        );
        out
    }

    /// Whether routes `p1` of demand `r1` and `p2` of `r2` share a link.
    pub fn delta(&self, r1: usize, p1: usize, r2: usize, p2: usize) -> bool {
        let b = &self.routes[r2][p2].links;
        self.routes[r1][p1].links.iter().any(|l| b.contains(l))
    }
}

struct Builder {
    variables: Vec<Variable>,
    index: HashMap<Var, usize>,
    keys: Vec<Var>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn add(&mut self, key: Var, kind: VarKind, lower: i64, upper: i64) -> usize {
        let idx = self.variables.len();
        self.variables.push(Variable {
            name: key.name(),
            kind,
            lower,
            upper,
        });
        self.index.insert(key, idx);
        self.keys.push(key);
        idx
    }

    fn bin(&mut self, key: Var) -> usize {
        self.add(key, VarKind::Binary, 0, 1)
    }

    fn get(&self, key: Var) -> usize {
        self.index[&key]
    }

    fn row(&mut self, family: u8, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint {
            name,
            family,
            terms,
            sense,
            rhs,
        });
    }
}

fn big_m(choice: BigM, tight: f64) -> f64 {
    match choice {
        BigM::Tight => tight,
        BigM::Global(m) => m,
    }
}

/// Instantiates the model for `demands` on `topo`.
pub fn build_ilp(topo: &Topology, g: &McfGeometry, demands: &DemandSet, params: IlpParams) -> Result<IlpInstance> {
    let (w, cap, c) = (params.slots, params.fiber_cap, g.core_count());
    if w == 0 || cap == 0 || params.k == 0 {
        return Err(Error::InvalidParameter("slots, fiber cap and k must be positive".into()));
    }
    if !(params.epsilon > 0.0 && params.epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie strictly between 0 and 1".into()));
    }
    if let BigM::Global(m) = params.big_m {
        if m <= (w * cap * c) as f64 {
            return Err(Error::InvalidParameter(format!("big-M {m} must exceed W*F*|C| = {}", w * cap * c)));
        }
    }
    demands.check_against(topo)?;
    let mut routes = Vec::with_capacity(demands.len());
    for d in demands.iter() {
        if d.fs_count > w {
            return Err(Error::InvalidParameter(format!("demand {} needs {} slots of {w}", d.id, d.fs_count)));
        }
        let r = topo.k_shortest_paths(d.src, d.dst, params.k, params.link_disjoint)?;
        if r.is_empty() {
            return Err(Error::Unreachable { src: d.src, dst: d.dst });
        }
        routes.push(r);
    }
    let demands: Vec<Demand> = demands.iter().cloned().collect();
    let nl = topo.links().len();
    let nt = match params.mode {
        Mode::Counter => cap,
        Mode::Co => 2 * cap,
    };
    let fiber_dir = |t: usize| match params.mode {
        Mode::Counter => None,
        Mode::Co if t % 2 == 0 => Some(Direction::Up),
        Mode::Co => Some(Direction::Down),
    };
    let group = |t: usize| match params.mode {
        Mode::Counter => t,
        Mode::Co => t / 2,
    };
    let weights: Vec<Vec<u64>> = (0..c).map(|i| (0..c).map(|j| g.weight(i, j)).collect()).collect();

    let mut b = Builder {
        variables: Vec::new(),
        index: HashMap::new(),
        keys: Vec::new(),
        constraints: Vec::new(),
    };
    let mut objective = Vec::new();

    // variables
    for l in 0..nl {
        for q in 0..cap {
            let v = b.bin(Var::F { l, t: q });
            objective.push((v, (nt / cap) as f64));
        }
    }
    for l in 0..nl {
        for i in 0..c {
            for t in 0..nt {
                b.bin(Var::U { l, i, t });
            }
        }
    }
    let rp: Vec<(usize, usize)> = routes
        .iter()
        .enumerate()
        .flat_map(|(r, ps)| (0..ps.len()).map(move |p| (r, p)))
        .collect();
    for &(r, p) in &rp {
        b.add(Var::S { r, p }, VarKind::Integer, 1, w as i64);
        b.add(Var::E { r, p }, VarKind::Integer, 1, w as i64);
    }
    for &(r1, p1) in &rp {
        for &(r2, p2) in &rp {
            if r1 != r2 {
                b.bin(Var::Rho { r1, p1, r2, p2 });
            }
        }
    }
    for &(r, p) in &rp {
        b.bin(Var::X { r, p });
    }
    // O exists for fibers able to carry the hop direction
    let o_fibers = |route: &Route, l: usize| -> Vec<usize> {
        let dir = route.direction_on(l).expect("link on route");
        (0..nt).filter(|&t| fiber_dir(t).map_or(true, |d| d == dir)).collect()
    };
    for &(r, p) in &rp {
        let route = &routes[r][p];
        for &l in &route.links {
            for i in 0..c {
                for t in o_fibers(route, l) {
                    b.bin(Var::O { r, p, l, i, t });
                }
            }
        }
    }
    for l in 0..nl {
        for i in 0..c {
            for t in 0..nt {
                b.add(Var::Dc { l, i, t }, VarKind::Integer, 0, 2);
            }
        }
    }
    let ordered: Vec<(usize, usize)> = (0..c)
        .flat_map(|i| (0..c).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    for l in 0..nl {
        for t in 0..nt {
            for &(i, j) in &ordered {
                b.bin(Var::Y { l, t, i, j });
                b.bin(Var::Phi1 { l, t, i, j });
                b.bin(Var::Phi2 { l, t, i, j });
                b.bin(Var::Z { l, t, i, j });
            }
        }
    }
    for &(r, p) in &rp {
        for k in 1..=w {
            b.bin(Var::Beta { r, p, k });
            b.bin(Var::Gamma { r, p, k });
        }
    }
    for l in 0..nl {
        for t in 0..nt {
            for i in 0..c {
                for k in 1..=w {
                    b.bin(Var::Theta { l, t, i, k });
                }
            }
        }
    }
    for l in 0..nl {
        for t in 0..nt {
            for &(i, j) in &ordered {
                for k in 1..=w {
                    let v = b.bin(Var::A { l, t, i, j, k });
                    // each unordered pair appears twice
                    let coef = params.alpha * weights[i][j] as f64 / 2.0;
                    if coef != 0.0 {
                        objective.push((v, coef));
                    }
                }
            }
        }
    }

    let wf = w as f64;
    let m3 = big_m(params.big_m, wf);
    let m7 = big_m(params.big_m, wf);
    let m13 = big_m(params.big_m, 2.0);
    let m14 = big_m(params.big_m, 1.0);
    let m15 = big_m(params.big_m, 3.0);
    let m18 = big_m(params.big_m, wf);
    let m20 = big_m(params.big_m, 1.0);
    let mut used = vec![(3, m3), (7, m7), (13, m13), (14, m14), (15, m15), (16, m15), (18, m18), (19, m18), (20, m20), (21, m20)];

    // c2: one route per demand
    for (r, ps) in routes.iter().enumerate() {
        let terms = (0..ps.len()).map(|p| (b.get(Var::X { r, p }), 1.0)).collect();
        b.row(2, format!("c2_r{}", r + 1), terms, Sense::Eq, 1.0);
    }
    // c3-c5: slot range
    let mut m4_max: f64 = 0.0;
    for &(r, p) in &rp {
        let fs = demands[r].fs_count as f64;
        let (s, e, x) = (b.get(Var::S { r, p }), b.get(Var::E { r, p }), b.get(Var::X { r, p }));
        let tag = format!("r{}p{}", r + 1, p + 1);
        b.row(3, format!("c3_{tag}"), vec![(e, 1.0), (s, -1.0), (x, m3)], Sense::Le, m3 + fs - 1.0);
        let m4 = big_m(params.big_m, wf + fs);
        m4_max = m4_max.max(m4);
        b.row(4, format!("c4_{tag}"), vec![(e, 1.0), (s, -1.0), (x, -m4)], Sense::Ge, fs - 1.0 - m4);
        b.row(5, format!("c5_{tag}"), vec![(e, 1.0)], Sense::Le, wf);
    }
    used.push((4, m4_max));
    // c6: ordering indicators are complementary
    for &(r1, p1) in &rp {
        for &(r2, p2) in &rp {
            if r1 < r2 {
                let a = b.get(Var::Rho { r1, p1, r2, p2 });
                let z = b.get(Var::Rho { r1: r2, p1: p2, r2: r1, p2: p1 });
                b.row(
                    6,
                    format!("c6_r{}p{}_r{}p{}", r1 + 1, p1 + 1, r2 + 1, p2 + 1),
                    vec![(a, 1.0), (z, 1.0)],
                    Sense::Eq,
                    1.0,
                );
            }
        }
    }
    // c7: no spectrum overlap on a shared core
    for &(r1, p1) in &rp {
        for &(r2, p2) in &rp {
            if r1 == r2 {
                continue;
            }
            let (ra, rb) = (&routes[r1][p1], &routes[r2][p2]);
            for &l in ra.links.iter().filter(|l| rb.links.contains(l)) {
                let fa = o_fibers(ra, l);
                let fb = o_fibers(rb, l);
                for t in fa.into_iter().filter(|t| fb.contains(t)) {
                    for i in 0..c {
                        let terms = vec![
                            (b.get(Var::E { r: r2, p: p2 }), 1.0),
                            (b.get(Var::S { r: r1, p: p1 }), -1.0),
                            (b.get(Var::Rho { r1, p1, r2, p2 }), -m7),
                            (b.get(Var::O { r: r1, p: p1, l, i, t }), m7),
                            (b.get(Var::O { r: r2, p: p2, l, i, t }), m7),
                        ];
                        b.row(
                            7,
                            format!("c7_r{}p{}_r{}p{}_l{}_i{}_t{}", r1 + 1, p1 + 1, r2 + 1, p2 + 1, l + 1, i + 1, t + 1),
                            terms,
                            Sense::Le,
                            2.0 * m7 - 1.0,
                        );
                    }
                }
            }
        }
    }
    // c8-c9: exactly one core per hop of the chosen route
    let mut m8_max: f64 = 0.0;
    for &(r, p) in &rp {
        let route = &routes[r][p];
        let x = b.get(Var::X { r, p });
        for &l in &route.links {
            let os: Vec<usize> = o_fibers(route, l)
                .into_iter()
                .flat_map(|t| (0..c).map(move |i| (i, t)))
                .map(|(i, t)| b.get(Var::O { r, p, l, i, t }))
                .collect();
            let tag = format!("r{}p{}_l{}", r + 1, p + 1, l + 1);
            let m8 = big_m(params.big_m, (os.len() as f64 - 1.0).max(0.0));
            m8_max = m8_max.max(m8);
            let mut terms: Vec<(usize, f64)> = os.iter().map(|&o| (o, 1.0)).collect();
            terms.push((x, m8));
            b.row(8, format!("c8_{tag}"), terms, Sense::Le, m8 + 1.0);
            let m9 = big_m(params.big_m, 1.0);
            let mut terms: Vec<(usize, f64)> = os.iter().map(|&o| (o, 1.0)).collect();
            terms.push((x, -m9));
            b.row(9, format!("c9_{tag}"), terms, Sense::Ge, 1.0 - m9);
        }
    }
    used.push((8, m8_max));
    used.push((9, big_m(params.big_m, 1.0)));
    // c10: a core carrying a lightpath is used; c12: it takes the hop direction
    for &(r, p) in &rp {
        let route = &routes[r][p];
        for &l in &route.links {
            let dl = route.direction_on(l).expect("link on route").value() as f64;
            for i in 0..c {
                for t in o_fibers(route, l) {
                    let o = b.get(Var::O { r, p, l, i, t });
                    let u = b.get(Var::U { l, i, t });
                    let dc = b.get(Var::Dc { l, i, t });
                    let tag = format!("r{}p{}_l{}_i{}_t{}", r + 1, p + 1, l + 1, i + 1, t + 1);
                    b.row(10, format!("c10_{tag}"), vec![(u, 1.0), (o, -1.0)], Sense::Ge, 0.0);
                    b.row(12, format!("c12a_{tag}"), vec![(dc, 1.0), (o, -dl)], Sense::Ge, 0.0);
                    b.row(12, format!("c12b_{tag}"), vec![(dc, 1.0), (o, 2.0 - dl)], Sense::Le, 2.0);
                }
            }
        }
    }
    // c11: a fiber with a used core is used; c13: unused cores have no direction
    for l in 0..nl {
        for i in 0..c {
            for t in 0..nt {
                let u = b.get(Var::U { l, i, t });
                let f = b.get(Var::F { l, t: group(t) });
                let dc = b.get(Var::Dc { l, i, t });
                let tag = format!("l{}_i{}_t{}", l + 1, i + 1, t + 1);
                b.row(11, format!("c11_{tag}"), vec![(f, 1.0), (u, -1.0)], Sense::Ge, 0.0);
                b.row(13, format!("c13_{tag}"), vec![(dc, 1.0), (u, -m13)], Sense::Le, 0.0);
            }
        }
    }
    // c14-c17: same-direction detection
    for l in 0..nl {
        for t in 0..nt {
            for &(i, j) in &ordered {
                let y = b.get(Var::Y { l, t, i, j });
                let p1 = b.get(Var::Phi1 { l, t, i, j });
                let p2 = b.get(Var::Phi2 { l, t, i, j });
                let z = b.get(Var::Z { l, t, i, j });
                let (di, dj) = (b.get(Var::Dc { l, i, t }), b.get(Var::Dc { l, i: j, t }));
                let (ui, uj) = (b.get(Var::U { l, i, t }), b.get(Var::U { l, i: j, t }));
                let tag = format!("l{}_t{}_i{}_j{}", l + 1, t + 1, i + 1, j + 1);
                b.row(14, format!("c14_{tag}"), vec![(y, -1.0), (p1, m14), (p2, m14)], Sense::Le, 2.0 * m14 - 1.0);
                b.row(15, format!("c15_{tag}"), vec![(di, 1.0), (dj, -1.0), (p1, -m15)], Sense::Le, -params.epsilon);
                b.row(16, format!("c16_{tag}"), vec![(di, -1.0), (dj, 1.0), (p2, -m15)], Sense::Le, -params.epsilon);
                b.row(
                    17,
                    format!("c17_{tag}"),
                    vec![(z, 1.0), (y, -1.0), (ui, -1.0), (uj, -1.0)],
                    Sense::Ge,
                    -2.0,
                );
            }
        }
    }
    // c18-c19: slot k inside [S, E]
    for &(r, p) in &rp {
        let (s, e) = (b.get(Var::S { r, p }), b.get(Var::E { r, p }));
        for k in 1..=w {
            let beta = b.get(Var::Beta { r, p, k });
            let gamma = b.get(Var::Gamma { r, p, k });
            let tag = format!("r{}p{}_k{k}", r + 1, p + 1);
            let kf = k as f64;
            b.row(18, format!("c18_{tag}"), vec![(s, -1.0), (beta, -m18)], Sense::Le, -kf - 1.0);
            b.row(19, format!("c19_{tag}"), vec![(e, 1.0), (gamma, -m18)], Sense::Le, kf - 1.0);
        }
    }
    // c20: slot k of a core carrying the lightpath is busy
    for &(r, p) in &rp {
        let route = &routes[r][p];
        for &l in &route.links {
            for i in 0..c {
                for t in o_fibers(route, l) {
                    let o = b.get(Var::O { r, p, l, i, t });
                    for k in 1..=w {
                        let terms = vec![
                            (b.get(Var::Theta { l, t, i, k }), -1.0),
                            (b.get(Var::Beta { r, p, k }), m20),
                            (b.get(Var::Gamma { r, p, k }), m20),
                            (o, m20),
                        ];
                        b.row(
                            20,
                            format!("c20_r{}p{}_l{}_i{}_t{}_k{k}", r + 1, p + 1, l + 1, i + 1, t + 1),
                            terms,
                            Sense::Le,
                            3.0 * m20 - 1.0,
                        );
                    }
                }
            }
        }
    }
    // c21: slot k busy on two same-direction cores
    for l in 0..nl {
        for t in 0..nt {
            for &(i, j) in &ordered {
                let z = b.get(Var::Z { l, t, i, j });
                for k in 1..=w {
                    let terms = vec![
                        (b.get(Var::A { l, t, i, j, k }), -1.0),
                        (b.get(Var::Theta { l, t, i, k }), m20),
                        (b.get(Var::Theta { l, t, i: j, k }), m20),
                        (z, m20),
                    ];
                    b.row(
                        21,
                        format!("c21_l{}_t{}_i{}_j{}_k{k}", l + 1, t + 1, i + 1, j + 1),
                        terms,
                        Sense::Le,
                        3.0 * m20 - 1.0,
                    );
                }
            }
        }
    }
    used.sort_by_key(|&(f, _)| f);

    Ok(IlpInstance {
        params,
        core_count: c,
        link_count: nl,
        fibers_per_link: nt,
        weights,
        demands,
        routes,
        variables: b.variables,
        constraints: b.constraints,
        objective,
        index: b.index,
        keys: b.keys,
        big_m_used: used,
    })
}

#[cfg(test)]
mod tests;
