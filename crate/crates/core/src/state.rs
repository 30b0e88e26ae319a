//! Mutable network resource state: deployed fibers per link, the propagation
//! direction of every core and its frequency-slot occupancy.
//!
//! Slot indices and spectrum-window starts are 1-based; fiber and core
//! indices are 0-based.

use std::fmt;
use std::str::FromStr;

use crate::demand::Demand;
use crate::error::{Error, Result};
use crate::topology::{Direction, NodeId, Route};

/// Core propagation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every fiber carries one fixed direction; fibers come in opposed pairs.
    Co,
    /// Each core picks its own direction the first time it is used.
    Counter,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Co => "co",
            Mode::Counter => "counter",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "co" => Ok(Mode::Co),
            "counter" => Ok(Mode::Counter),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}

/// Fixed-width slot bitmap.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlotMap {
    words: Vec<u64>,
    slots: usize,
}

impl SlotMap {
    pub fn new(slots: usize) -> Self {
        SlotMap {
            words: vec![0; slots.div_ceil(64)],
            slots,
        }
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Whether 1-based `slot` is occupied.
    pub fn is_set(&self, slot: usize) -> bool {
        let i = slot - 1;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, slot: usize) {
        let i = slot - 1;
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn set_window(&mut self, sw: SpectrumWindow) {
        for (w, mask) in window_masks(sw) {
            self.words[w] |= mask;
        }
    }

    pub fn is_window_free(&self, sw: SpectrumWindow) -> bool {
        self.window_overlap(sw) == 0
    }

    /// Occupied slots inside `sw`.
    pub fn window_overlap(&self, sw: SpectrumWindow) -> usize {
        window_masks(sw)
            .map(|(w, mask)| (self.words[w] & mask).count_ones() as usize)
            .sum()
    }

    /// Slots occupied in both maps.
    pub fn overlap(&self, other: &SlotMap) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Occupied 1-based slot indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.slots).filter(|&s| self.is_set(s))
    }
}

fn window_masks(sw: SpectrumWindow) -> impl Iterator<Item = (usize, u64)> {
    let first = sw.start - 1;
    let last = sw.end() - 1;
    (first / 64..=last / 64).map(move |w| {
        let lo = if w == first / 64 { first % 64 } else { 0 };
        let hi = if w == last / 64 { last % 64 } else { 63 };
        let width = hi - lo + 1;
        let mask = if width == 64 { u64::MAX } else { ((1u64 << width) - 1) << lo };
        (w, mask)
    })
}

/// Block of `width` contiguous slots starting at 1-based `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectrumWindow {
    pub start: usize,
    pub width: usize,
}

impl SpectrumWindow {
    pub fn new(start: usize, width: usize, slots: usize) -> Result<Self> {
        if width == 0 || start == 0 || start + width - 1 > slots {
            return Err(Error::InvalidParameter(format!(
                "window [{start}, +{width}) does not fit in {slots} slots"
            )));
        }
        Ok(SpectrumWindow { start, width })
    }

    pub fn end(&self) -> usize {
        self.start + self.width - 1
    }

    /// All windows of `width` slots in ascending start order.
    pub fn all(slots: usize, width: usize) -> impl Iterator<Item = SpectrumWindow> {
        let n = if width >= 1 && width <= slots { slots - width + 1 } else { 0 };
        (1..=n).map(move |start| SpectrumWindow { start, width })
    }
}

impl fmt::Display for SpectrumWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}..{}]", self.start, self.end())
    }
}

/// Number of window positions of width `f` in `slots` slots.
pub fn sw_positions(slots: usize, f: usize) -> Result<usize> {
    if f == 0 || f > slots {
        return Err(Error::InvalidParameter(format!(
            "window width {f} must lie in 1..={slots}"
        )));
    }
    Ok(slots - f + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoreState {
    /// `None` while the core is unused.
    pub direction: Option<Direction>,
    pub occupancy: SlotMap,
}

impl CoreState {
    pub fn new(slots: usize) -> Self {
        CoreState {
            direction: None,
            occupancy: SlotMap::new(slots),
        }
    }

    pub fn is_unused(&self) -> bool {
        self.direction.is_none()
    }

    /// Direction value: 0 unused, 1 up, 2 down.
    pub fn direction_value(&self) -> u8 {
        self.direction.map_or(0, Direction::value)
    }

    /// Can carry a lightpath in `dir` on `sw`.
    pub fn accepts(&self, dir: Direction, sw: SpectrumWindow) -> bool {
        match self.direction {
            None => true,
            Some(d) => d == dir && self.occupancy.is_window_free(sw),
        }
    }
}

pub fn sw_free_on_core(core: &CoreState, sw: SpectrumWindow) -> bool {
    core.occupancy.is_window_free(sw)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberState {
    /// Fixed propagation direction in co mode.
    pub fixed: Option<Direction>,
    pub cores: Vec<CoreState>,
}

impl FiberState {
    pub fn new(core_count: usize, slots: usize, fixed: Option<Direction>) -> Self {
        FiberState {
            fixed,
            cores: vec![CoreState::new(slots); core_count],
        }
    }

    pub fn is_used(&self) -> bool {
        self.cores.iter().any(|c| !c.is_unused())
    }

    pub fn carries(&self, dir: Direction) -> bool {
        self.fixed.map_or(true, |f| f == dir)
    }

    pub fn used_cores(&self, dir: Direction) -> usize {
        self.cores.iter().filter(|c| c.direction == Some(dir)).count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinkState {
    pub fibers: Vec<FiberState>,
}

impl LinkState {
    /// MCFs counted for this link under `mode`.
    pub fn mcf_count(&self, mode: Mode) -> usize {
        match mode {
            Mode::Counter => self.fibers.iter().filter(|f| f.is_used()).count(),
            Mode::Co => {
                let used = |dir| {
                    self.fibers
                        .iter()
                        .filter(|f| f.fixed == Some(dir) && f.is_used())
                        .count()
                };
                2 * used(Direction::Up).max(used(Direction::Down))
            }
        }
    }
}

/// Whether some deployed core of the link can carry `sw` in `dir`.
pub fn link_sw_available(link: &LinkState, sw: SpectrumWindow, dir: Direction, mode: Mode) -> bool {
    link.fibers
        .iter()
        .filter(|f| mode == Mode::Counter || f.carries(dir))
        .any(|f| f.cores.iter().any(|c| c.accepts(dir, sw)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoreChoice {
    pub fiber: usize,
    pub core: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightpathRecord {
    pub demand_id: usize,
    pub src: NodeId,
    pub dst: NodeId,
    pub fs_count: usize,
    pub route: Route,
    pub window: SpectrumWindow,
    /// One choice per route hop, in route order.
    pub choices: Vec<CoreChoice>,
}

impl LightpathRecord {
    pub fn start(&self) -> usize {
        self.window.start
    }

    pub fn end(&self) -> usize {
        self.window.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateConfig {
    pub mode: Mode,
    pub core_count: usize,
    pub slots: usize,
    /// Fiber cap per link; in co mode it caps each direction.
    pub fiber_cap: usize,
}

impl StateConfig {
    pub fn new(mode: Mode, core_count: usize, slots: usize, fiber_cap: usize) -> Result<Self> {
        if core_count == 0 || slots == 0 || fiber_cap == 0 {
            return Err(Error::InvalidParameter(
                "core count, slot count and fiber cap must be positive".into(),
            ));
        }
        Ok(StateConfig {
            mode,
            core_count,
            slots,
            fiber_cap,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkState {
    config: StateConfig,
    links: Vec<LinkState>,
    log: Vec<LightpathRecord>,
}

impl NetworkState {
    /// State with no fibers deployed.
    pub fn new(link_count: usize, config: StateConfig) -> Self {
        NetworkState {
            config,
            links: vec![LinkState::default(); link_count],
            log: Vec::new(),
        }
    }

    /// State with the full fiber cap deployed on every link.
    pub fn fully_deployed(link_count: usize, config: StateConfig) -> Self {
        let mut state = Self::new(link_count, config);
        for link in 0..link_count {
            while state.can_add_fiber(link) {
                state.add_fiber(link).expect("below cap");
            }
        }
        state
    }

    pub fn config(&self) -> StateConfig {
        self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn slots(&self) -> usize {
        self.config.slots
    }

    pub fn core_count(&self) -> usize {
        self.config.core_count
    }

    pub fn links(&self) -> &[LinkState] {
        &self.links
    }

    pub fn link(&self, id: usize) -> &LinkState {
        &self.links[id]
    }

    pub fn log(&self) -> &[LightpathRecord] {
        &self.log
    }

    pub fn can_add_fiber(&self, link: usize) -> bool {
        let n = self.links[link].fibers.len();
        match self.config.mode {
            Mode::Counter => n < self.config.fiber_cap,
            Mode::Co => n / 2 < self.config.fiber_cap,
        }
    }

    /// Deploys one fiber (counter) or an opposed pair (co); returns new indices.
    pub fn add_fiber(&mut self, link: usize) -> Result<Vec<usize>> {
        if !self.can_add_fiber(link) {
            return Err(Error::FiberCap {
                link,
                cap: self.config.fiber_cap,
            });
        }
        let StateConfig {
            core_count, slots, ..
        } = self.config;
        let fibers = &mut self.links[link].fibers;
        let first = fibers.len();
        match self.config.mode {
            Mode::Counter => {
                fibers.push(FiberState::new(core_count, slots, None));
                Ok(vec![first])
            }
            Mode::Co => {
                fibers.push(FiberState::new(core_count, slots, Some(Direction::Up)));
                fibers.push(FiberState::new(core_count, slots, Some(Direction::Down)));
                Ok(vec![first, first + 1])
            }
        }
    }

    /// Index of the fiber that [`add_fiber`](Self::add_fiber) would make
    /// available for `dir` on `link`.
    pub fn next_fiber_index(&self, link: usize, dir: Direction) -> usize {
        let n = self.links[link].fibers.len();
        match (self.config.mode, dir) {
            (Mode::Counter, _) | (Mode::Co, Direction::Up) => n,
            (Mode::Co, Direction::Down) => n + 1,
        }
    }

    pub fn link_sw_available(&self, link: usize, sw: SpectrumWindow, dir: Direction) -> bool {
        link_sw_available(&self.links[link], sw, dir, self.config.mode)
    }

    /// Every core of `link` that can carry `sw` in `dir`.
    pub fn eligible_cores(
        &self,
        link: usize,
        sw: SpectrumWindow,
        dir: Direction,
    ) -> impl Iterator<Item = CoreChoice> + '_ {
        let mode = self.config.mode;
        self.links[link]
            .fibers
            .iter()
            .enumerate()
            .filter(move |(_, f)| mode == Mode::Counter || f.carries(dir))
            .flat_map(move |(fi, f)| {
                f.cores
                    .iter()
                    .enumerate()
                    .filter(move |(_, c)| c.accepts(dir, sw))
                    .map(move |(ci, _)| CoreChoice { fiber: fi, core: ci })
            })
    }

    pub fn core(&self, link: usize, choice: CoreChoice) -> &CoreState {
        &self.links[link].fibers[choice.fiber].cores[choice.core]
    }

    /// Occupies `sw` on the chosen core of every hop; all-or-nothing.
    pub fn commit_lightpath(
        &mut self,
        demand: &Demand,
        route: &Route,
        choices: &[CoreChoice],
        sw: SpectrumWindow,
    ) -> Result<LightpathRecord> {
        let reject = |reason: String| Error::CommitRejected {
            demand: demand.id,
            reason,
        };
        if route.src() != demand.src || route.dst() != demand.dst {
            return Err(reject(format!(
                "route {} does not connect {} to {}",
                route.to_node_string(),
                demand.src,
                demand.dst
            )));
        }
        if sw.width != demand.fs_count {
            return Err(reject(format!(
                "window width {} differs from demand size {}",
                sw.width, demand.fs_count
            )));
        }
        if sw.start == 0 || sw.end() > self.config.slots {
            return Err(reject(format!("window {sw} exceeds {} slots", self.config.slots)));
        }
        if choices.len() != route.hop_count() {
            return Err(reject(format!(
                "{} core choices for {} hops",
                choices.len(),
                route.hop_count()
            )));
        }
        for ((&link, dir), choice) in route.links.iter().zip(route.hop_directions()).zip(choices) {
            let Some(fiber) = self.links.get(link).and_then(|l| l.fibers.get(choice.fiber)) else {
                return Err(reject(format!("fiber {} not deployed on link {link}", choice.fiber)));
            };
            let Some(core) = fiber.cores.get(choice.core) else {
                return Err(reject(format!("core {} out of range", choice.core)));
            };
            if self.config.mode == Mode::Co && !fiber.carries(dir) {
                return Err(reject(format!(
                    "fiber {} on link {link} carries the opposite direction",
                    choice.fiber
                )));
            }
            if let Some(d) = core.direction {
                if d != dir {
                    return Err(reject(format!(
                        "core {} of fiber {} on link {link} already propagates the other way",
                        choice.core, choice.fiber
                    )));
                }
            }
            if !core.occupancy.is_window_free(sw) {
                return Err(reject(format!(
                    "window {sw} busy on core {} of fiber {} on link {link}",
                    choice.core, choice.fiber
                )));
            }
        }
        for ((&link, dir), choice) in route.links.iter().zip(route.hop_directions()).zip(choices) {
            let core = &mut self.links[link].fibers[choice.fiber].cores[choice.core];
            core.direction = Some(dir);
            core.occupancy.set_window(sw);
        }
        let record = LightpathRecord {
            demand_id: demand.id,
            src: demand.src,
            dst: demand.dst,
            fs_count: demand.fs_count,
            route: route.clone(),
            window: sw,
            choices: choices.to_vec(),
        };
        self.log.push(record.clone());
        Ok(record)
    }

    /// Rebuilds a state from a commit log, deploying fibers as referenced.
    pub fn replay(link_count: usize, config: StateConfig, records: &[LightpathRecord]) -> Result<Self> {
        let mut state = Self::new(link_count, config);
        for r in records {
            for (&link, choice) in r.route.links.iter().zip(&r.choices) {
                while state.links[link].fibers.len() <= choice.fiber {
                    state.add_fiber(link)?;
                }
            }
            let demand = Demand {
                id: r.demand_id,
                src: r.src,
                dst: r.dst,
                fs_count: r.fs_count,
            };
            state.commit_lightpath(&demand, &r.route, &r.choices, r.window)?;
        }
        Ok(state)
    }

    /// Total MCFs in use across the network.
    pub fn mcf_count(&self) -> usize {
        self.links.iter().map(|l| l.mcf_count(self.config.mode)).sum()
    }
}
