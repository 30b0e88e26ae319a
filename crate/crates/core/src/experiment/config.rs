//! `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::demand::{AsymmetryRatio, DemandSet, PairSelection, PairTotals};
use crate::error::{Error, Result};
use crate::geometry::{LevelWeights, McfGeometry};
use crate::heuristic::{DemandOrder, HeuristicConfig, Strategy};
use crate::state::{Mode, StateConfig};
use crate::topology::Topology;

#[derive(Clone, Debug, PartialEq)]
pub enum TopologySource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometrySource {
    Seven,
    Nineteen,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum DemandSource {
    Generate {
        x_mean: usize,
        ar: AsymmetryRatio,
        seed: u64,
        pairs: PairSelection,
    },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySource,
    pub geometry: GeometrySource,
    pub mode: Mode,
    pub strategy: Strategy,
    pub k: usize,
    pub link_disjoint: bool,
    pub order: DemandOrder,
    pub slots: usize,
    pub fiber_cap: usize,
    pub alpha: f64,
    pub weights: LevelWeights,
    pub demands: DemandSource,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            topology: TopologySource::Builtin("nsfnet".into()),
            geometry: GeometrySource::Seven,
            mode: Mode::Counter,
            strategy: Strategy::LeastCost,
            k: 3,
            link_disjoint: false,
            order: DemandOrder::Input,
            slots: 50,
            fiber_cap: 16,
            alpha: 0.01,
            weights: LevelWeights::default(),
            demands: DemandSource::Generate {
                x_mean: 20,
                ar: AsymmetryRatio::integer(1).expect("1 is a valid ratio"),
                seed: 1,
                pairs: PairSelection::AllPairs,
            },
            output: PathBuf::from("out"),
        }
    }
}

pub const KEYS: &[&str] = &[
    "topology",
    "geometry",
    "mode",
    "strategy",
    "k",
    "link_disjoint",
    "order",
    "slots",
    "fiber_cap",
    "alpha",
    "weights",
    "demands",
    "x",
    "ar",
    "seed",
    "pairs",
    "output",
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("`{key}` expects a number, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("`{key}` expects true or false, got `{value}`"))),
    }
}

fn resolve(base: Option<&Path>, value: &str) -> PathBuf {
    let p = PathBuf::from(value);
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

impl ExperimentConfig {
    /// Parses config text. Relative paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected `key = value`, got `{line}`"),
                });
            };
            cfg.set_with_base(key.trim(), value.trim(), base).map_err(|e| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }

    /// Overrides one key; paths stay relative to the working directory.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_with_base(key, value, None)
    }

    fn set_with_base(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        match key {
            "topology" => {
                self.topology = if Topology::builtin(value).is_some() {
                    TopologySource::Builtin(value.to_ascii_lowercase())
                } else {
                    TopologySource::File(resolve(base, value))
                }
            }
            "geometry" => {
                self.geometry = match value {
                    "7" => GeometrySource::Seven,
                    "19" => GeometrySource::Nineteen,
                    path => GeometrySource::File(resolve(base, path)),
                }
            }
            "mode" => self.mode = value.parse()?,
            "strategy" => self.strategy = value.parse()?,
            "k" => self.k = parse_num(key, value)?,
            "link_disjoint" => self.link_disjoint = parse_bool(key, value)?,
            "order" => {
                self.order = match value.to_ascii_lowercase().as_str() {
                    "input" => DemandOrder::Input,
                    "largest" | "largest_first" => DemandOrder::LargestFirst,
                    _ => return Err(Error::InvalidParameter(format!("unknown order `{value}`"))),
                }
            }
            "slots" => self.slots = parse_num(key, value)?,
            "fiber_cap" => self.fiber_cap = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "weights" => {
                let w: Vec<u64> = value
                    .split(',')
                    .map(|s| parse_num(key, s.trim()))
                    .collect::<Result<_>>()?;
                if w.len() != 3 {
                    return Err(Error::InvalidParameter("`weights` expects `l1,l2,l3`".into()));
                }
                self.weights = LevelWeights::new(w[0], w[1], w[2])?;
            }
            "demands" => {
                self.demands = if value == "generate" {
                    DemandSource::Generate {
                        x_mean: 20,
                        ar: AsymmetryRatio::integer(1)?,
                        seed: 1,
                        pairs: PairSelection::AllPairs,
                    }
                } else {
                    DemandSource::File(resolve(base, value))
                }
            }
            "x" | "ar" | "seed" | "pairs" => {
                let DemandSource::Generate { x_mean, ar, seed, pairs } = &mut self.demands else {
                    return Err(Error::InvalidParameter(format!(
                        "`{key}` only applies to generated demands"
                    )));
                };
                match key {
                    "x" => *x_mean = parse_num(key, value)?,
                    "ar" => *ar = value.parse()?,
                    "seed" => *seed = parse_num(key, value)?,
                    _ => {
                        *pairs = if value == "all" {
                            PairSelection::AllPairs
                        } else {
                            PairSelection::Count(parse_num(key, value)?)
                        }
                    }
                }
            }
            "output" => self.output = resolve(base, value),
            _ => return Err(Error::InvalidParameter(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn load_topology(&self) -> Result<Topology> {
        match &self.topology {
            TopologySource::Builtin(name) => Topology::builtin(name)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown topology `{name}`"))),
            TopologySource::File(p) => Topology::parse(&read(p)?),
        }
    }

    pub fn load_geometry(&self) -> Result<McfGeometry> {
        let g = match &self.geometry {
            GeometrySource::Seven => McfGeometry::seven_core(),
            GeometrySource::Nineteen => McfGeometry::nineteen_core(),
            GeometrySource::File(p) => McfGeometry::parse(&read(p)?)?,
        };
        Ok(g.with_weights(self.weights))
    }

    pub fn load_demands(&self, topo: &Topology) -> Result<DemandSet> {
        let ds = match &self.demands {
            DemandSource::Generate { x_mean, ar, seed, pairs } => {
                PairTotals::generate(topo, *x_mean, *seed, *pairs)?.split(*ar)
            }
            DemandSource::File(p) => DemandSet::parse(&read(p)?)?,
        };
        ds.check_against(topo)?;
        Ok(ds)
    }

    pub fn state_config(&self, cores: usize) -> Result<StateConfig> {
        StateConfig::new(self.mode, cores, self.slots, self.fiber_cap)
    }

    pub fn heuristic(&self) -> HeuristicConfig {
        HeuristicConfig {
            strategy: self.strategy,
            k: self.k,
            link_disjoint: self.link_disjoint,
            order: self.order,
        }
    }

    /// Checks ranges that the solvers would otherwise reject later.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        if let DemandSource::Generate { x_mean, .. } = self.demands {
            if x_mean < 5 {
                return Err(Error::InvalidParameter(format!("x must be at least 5, got {x_mean}")));
            }
        }
        Ok(())
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", p.display())))
    })
}

impl fmt::Display for TopologySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySource::Builtin(n) => f.write_str(n),
            TopologySource::File(p) => {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
                f.write_str(stem)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let text = "# sweep base\nmode = co\nstrategy = ff\nslots = 40 # trailing\nx = 8\nar = 3/2\npairs = 100\n";
        let mut cfg = ExperimentConfig::parse(text, Some(Path::new("/data"))).unwrap();
        assert_eq!(cfg.mode, Mode::Co);
        assert_eq!(cfg.strategy, Strategy::FirstFit);
        assert_eq!(cfg.slots, 40);
        assert_eq!(cfg.fiber_cap, 16);
        let DemandSource::Generate { x_mean, ar, pairs, .. } = cfg.demands.clone() else { panic!() };
        assert_eq!((x_mean, pairs), (8, PairSelection::Count(100)));
        assert_eq!(ar, AsymmetryRatio::new(3, 2).unwrap());
        cfg.set("topology", "topos/x.txt").unwrap();
        assert_eq!(cfg.topology, TopologySource::File("topos/x.txt".into()));
        let cfg = ExperimentConfig::parse("topology = net.txt\n", Some(Path::new("/data"))).unwrap();
        assert_eq!(cfg.topology, TopologySource::File("/data/net.txt".into()));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("mode = co\nbogus = 1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(ExperimentConfig::parse("weights = 1,10,100\n", None).is_err());
        assert!(ExperimentConfig::parse("demands = d.txt\nseed = 3\n", None).is_err());
        assert!(ExperimentConfig::parse("no equals sign\n", None).is_err());
    }

    #[test]
    fn missing_topology_file_is_a_clean_error() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("topology", "/nonexistent/topo.txt").unwrap();
        let err = cfg.load_topology().unwrap_err();
        assert!(err.to_string().contains("/nonexistent/topo.txt"));
    }
}
