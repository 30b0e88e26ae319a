//! Core layouts of multi-core fibers and pairwise crosstalk levels.
//!
//! Coordinates are in units of the core pitch. Built-in layouts put core 0
//! in the center, then number ring cores clockwise from angle 0, inner ring
//! first. Textual formats (geometry files, CSV, layout diagrams) number cores
//! from 1.

use std::fmt;

use crate::error::{Error, Result};

const L1_MAX_DISTANCE: f64 = 1.01;
const L2_MAX_DISTANCE: f64 = 2.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    /// Directly neighboring cores.
    L1,
    /// One intervening core.
    L2,
    /// Farther apart.
    L3,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Level::L1 => "L1",
            Level::L2 => "L2",
            Level::L3 => "L3",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelWeights {
    pub l1: u64,
    pub l2: u64,
    pub l3: u64,
}

impl Default for LevelWeights {
    fn default() -> Self {
        LevelWeights {
            l1: 100,
            l2: 10,
            l3: 1,
        }
    }
}

impl LevelWeights {
    pub fn new(l1: u64, l2: u64, l3: u64) -> Result<Self> {
        if !(l1 > l2 && l2 > l3 && l3 > 0) {
            return Err(Error::InvalidGeometry(format!(
                "level weights must satisfy L1 > L2 > L3 > 0, got {l1}/{l2}/{l3}"
            )));
        }
        Ok(LevelWeights { l1, l2, l3 })
    }

    pub fn of(&self, level: Level) -> u64 {
        match level {
            Level::L1 => self.l1,
            Level::L2 => self.l2,
            Level::L3 => self.l3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct McfGeometry {
    coords: Vec<(f64, f64)>,
    weights: LevelWeights,
    levels: Vec<Level>,
}

impl McfGeometry {
    pub fn seven_core() -> Self {
        Self::from_coords(hex_coords(7), LevelWeights::default()).expect("valid built-in layout")
    }

    pub fn nineteen_core() -> Self {
        Self::from_coords(hex_coords(19), LevelWeights::default()).expect("valid built-in layout")
    }

    /// Built-in hexagonal layout for 7 or 19 cores.
    pub fn hexagonal(core_count: usize) -> Result<Self> {
        match core_count {
            7 | 19 => Self::from_coords(hex_coords(core_count), LevelWeights::default()),
            n => Err(Error::InvalidGeometry(format!(
                "built-in layouts exist for 7 and 19 cores, not {n}"
            ))),
        }
    }

    /// Arbitrary layout; the minimum pairwise distance must be exactly one pitch.
    pub fn from_coords(coords: Vec<(f64, f64)>, weights: LevelWeights) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidGeometry("no cores".into()));
        }
        let n = coords.len();
        let mut min_dist = f64::INFINITY;
        let mut levels = vec![Level::L3; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = distance(coords[i], coords[j]);
                min_dist = min_dist.min(d);
                levels[i * n + j] = if d <= L1_MAX_DISTANCE {
                    Level::L1
                } else if d <= L2_MAX_DISTANCE {
                    Level::L2
                } else {
                    Level::L3
                };
            }
        }
        if n > 1 && (min_dist - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidGeometry(format!(
                "minimum core distance must be one pitch, got {min_dist:.4}"
            )));
        }
        Ok(McfGeometry {
            coords,
            weights,
            levels,
        })
    }

    /// Parses `<core_id> <x> <y>` lines, core ids `1..=n` in any order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected `<core_id> <x> <y>`, got `{line}`")));
            }
            let id: usize = fields[0]
                .parse()
                .map_err(|_| bad(format!("invalid core id `{}`", fields[0])))?;
            let x: f64 = fields[1]
                .parse()
                .map_err(|_| bad(format!("invalid x `{}`", fields[1])))?;
            let y: f64 = fields[2]
                .parse()
                .map_err(|_| bad(format!("invalid y `{}`", fields[2])))?;
            entries.push((id, (x, y)));
        }
        entries.sort_by_key(|e| e.0);
        for (pos, (id, _)) in entries.iter().enumerate() {
            if *id != pos + 1 {
                return Err(Error::InvalidGeometry(format!(
                    "core ids must be 1..{}, found {id}",
                    entries.len()
                )));
            }
        }
        Self::from_coords(entries.into_iter().map(|e| e.1).collect(), LevelWeights::default())
    }

    pub fn with_weights(mut self, weights: LevelWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn core_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn weights(&self) -> LevelWeights {
        self.weights
    }

    /// Adjacency level of two distinct cores (0-based indices).
    pub fn adjacency_level(&self, i: usize, j: usize) -> Result<Level> {
        let n = self.core_count();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::CoreOutOfRange {
                    index: idx,
                    count: n,
                });
            }
        }
        if i == j {
            return Err(Error::InvalidParameter(format!("core {i} paired with itself")));
        }
        Ok(self.levels[i * n + j])
    }

    /// Crosstalk weight `V` of a pair; zero on the diagonal. Panics when out of range.
    pub fn weight(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return 0;
        }
        self.weights.of(self.levels[i * self.core_count() + j])
    }

    pub fn l1_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.core_count();
        (0..n).filter(move |&j| j != i && self.levels[i * n + j] == Level::L1)
    }
}

fn distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

fn hex_coords(core_count: usize) -> Vec<(f64, f64)> {
    let polar = |r: f64, deg: f64| {
        // clockwise from 0 degrees
        let rad = -deg.to_radians();
        (r * rad.cos(), r * rad.sin())
    };
    let mut coords = vec![(0.0, 0.0)];
    for k in 0..6 {
        coords.push(polar(1.0, 60.0 * k as f64));
    }
    if core_count == 19 {
        for k in 0..12 {
            let r = if k % 2 == 0 { 2.0 } else { 3f64.sqrt() };
            coords.push(polar(r, 30.0 * k as f64));
        }
    }
    coords
}
