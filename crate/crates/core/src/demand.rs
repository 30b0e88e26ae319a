//! Directed lightpath demands and the asymmetric bidirectional generator.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

/// Identifier of the generator stored in demand metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demand {
    pub id: usize,
    pub src: NodeId,
    pub dst: NodeId,
    pub fs_count: usize,
}

/// Asymmetric ratio `num/den >= 1`, kept exact so splits round reproducibly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AsymmetryRatio {
    num: u64,
    den: u64,
}

impl AsymmetryRatio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num < den {
            return Err(Error::InvalidParameter(format!(
                "asymmetric ratio must be >= 1, got {num}/{den}"
            )));
        }
        let g = gcd(num, den);
        Ok(AsymmetryRatio {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(ar: u64) -> Result<Self> {
        Self::new(ar, 1)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Splits `total` into `(smaller, larger)`.
    ///
    /// The larger share is `round_half_up(total * ar / (1 + ar))`, and both
    /// shares are kept at one slot or more.
    pub fn split(&self, total: usize) -> (usize, usize) {
        assert!(total >= 2, "a total below 2 slots cannot be split");
        let t = total as u64;
        let sum = self.num + self.den;
        // floor(t * num / sum + 1/2)
        let mut larger = ((2 * t * self.num + sum) / (2 * sum)).max(1);
        let mut smaller = t - larger;
        if smaller < 1 {
            smaller = 1;
            larger = t - 1;
        }
        (smaller as usize, larger as usize)
    }
}

impl fmt::Display for AsymmetryRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}", self.as_f64())
        }
    }
}

impl FromStr for AsymmetryRatio {
    type Err = Error;

    /// Accepts `6`, `1.5` or `3/2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("invalid asymmetric ratio `{s}`"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Self::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10u64.pow(frac.len() as u32);
            let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let frac: u64 = frac.parse().map_err(|_| bad())?;
            return Self::new(int * den + frac, den);
        }
        Self::new(s.parse().map_err(|_| bad())?, 1)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Which node pairs receive traffic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSelection {
    /// Every unordered pair once.
    AllPairs,
    /// `n` unordered pairs drawn uniformly with replacement.
    Count(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationInfo {
    pub algorithm: &'static str,
    pub seed: u64,
    pub x_mean: usize,
    pub ar: AsymmetryRatio,
    pub pairs: PairSelection,
}

/// Bidirectional capacity totals for unordered pairs, before splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTotals {
    pub seed: u64,
    pub x_mean: usize,
    pub pairs: PairSelection,
    /// `(a, b, total)` with `a < b`.
    pub totals: Vec<(NodeId, NodeId, usize)>,
}

impl PairTotals {
    /// Draws one total per selected pair, uniform on `[5, 2 * x_mean - 5]`.
    pub fn generate(topo: &Topology, x_mean: usize, seed: u64, pairs: PairSelection) -> Result<Self> {
        if x_mean < 5 {
            return Err(Error::InvalidParameter(format!(
                "mean demand must be at least 5 slots, got {x_mean}"
            )));
        }
        let all: Vec<(NodeId, NodeId)> = crate::topology::node_pairs(topo).into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let selected: Vec<(NodeId, NodeId)> = match pairs {
            PairSelection::AllPairs => all,
            // sample u64 so 32- and 64-bit targets draw the same stream
            PairSelection::Count(n) => (0..n).map(|_| all[rng.gen_range(0..all.len() as u64) as usize]).collect(),
        };
        let hi = (2 * x_mean - 5) as u64;
        let totals = selected
            .into_iter()
            .map(|(a, b)| (a, b, rng.gen_range(5..=hi) as usize))
            .collect();
        Ok(PairTotals {
            seed,
            x_mean,
            pairs,
            totals,
        })
    }

    /// Splits every total at ratio `1:ar`; the larger share flows from the
    /// larger node id to the smaller one.
    pub fn split(&self, ar: AsymmetryRatio) -> DemandSet {
        let mut demands = Vec::with_capacity(2 * self.totals.len());
        for &(a, b, total) in &self.totals {
            let (smaller, larger) = ar.split(total);
            demands.push(Demand {
                id: demands.len(),
                src: a,
                dst: b,
                fs_count: smaller,
            });
            demands.push(Demand {
                id: demands.len(),
                src: b,
                dst: a,
                fs_count: larger,
            });
        }
        DemandSet {
            demands,
            generation: Some(GenerationInfo {
                algorithm: RNG_ALGORITHM,
                seed: self.seed,
                x_mean: self.x_mean,
                ar,
                pairs: self.pairs,
            }),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DemandSet {
    pub demands: Vec<Demand>,
    pub generation: Option<GenerationInfo>,
}

impl DemandSet {
    pub fn new(demands: Vec<Demand>) -> Result<Self> {
        let mut ids: Vec<usize> = demands.iter().map(|d| d.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("demand ids must be unique".into()));
        }
        for d in &demands {
            validate(d)?;
        }
        Ok(DemandSet {
            demands,
            generation: None,
        })
    }

    /// Parses `<src> <dst> <fs_count>` lines; ids follow line order from 0.
    pub fn parse(text: &str) -> Result<Self> {
        let mut demands = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected `<src> <dst> <fs_count>`, got `{line}`")));
            }
            let src: NodeId = fields[0].parse().map_err(|_| bad(format!("invalid node `{}`", fields[0])))?;
            let dst: NodeId = fields[1].parse().map_err(|_| bad(format!("invalid node `{}`", fields[1])))?;
            let fs_count: usize = fields[2]
                .parse()
                .map_err(|_| bad(format!("invalid slot count `{}`", fields[2])))?;
            let d = Demand {
                id: demands.len(),
                src,
                dst,
                fs_count,
            };
            validate(&d).map_err(|e| bad(e.to_string()))?;
            demands.push(d);
        }
        Ok(DemandSet {
            demands,
            generation: None,
        })
    }

    /// Generates demands for `topo` in one step.
    pub fn generate(
        topo: &Topology,
        x_mean: usize,
        ar: AsymmetryRatio,
        seed: u64,
        pairs: PairSelection,
    ) -> Result<Self> {
        Ok(PairTotals::generate(topo, x_mean, seed, pairs)?.split(ar))
    }

    /// Checks every endpoint exists in `topo`.
    pub fn check_against(&self, topo: &Topology) -> Result<()> {
        for d in &self.demands {
            if !topo.contains(d.src) || !topo.contains(d.dst) {
                return Err(Error::InvalidParameter(format!(
                    "demand {} references a node outside the topology",
                    d.id
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Demand> {
        self.demands.iter()
    }

    /// Serialized demand file, with generator metadata as comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(g) = &self.generation {
            out.push_str(&generation_header(g));
        }
        for d in &self.demands {
            out.push_str(&format!("{} {} {}\n", d.src, d.dst, d.fs_count));
        }
        out
    }
}

pub fn generation_header(g: &GenerationInfo) -> String {
    let pairs = match g.pairs {
        PairSelection::AllPairs => "all".to_string(),
        PairSelection::Count(n) => n.to_string(),
    };
    format!(
        "# generator={} seed={} x_mean={} ar={} pairs={}\n",
        g.algorithm, g.seed, g.x_mean, g.ar, pairs
    )
}

fn validate(d: &Demand) -> Result<()> {
    if d.src == d.dst {
        return Err(Error::InvalidParameter(format!("demand {} has src == dst", d.id)));
    }
    if d.fs_count < 1 {
        return Err(Error::InvalidParameter(format!("demand {} needs at least one slot", d.id)));
    }
    Ok(())
}
