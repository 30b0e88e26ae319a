//! Random micro instances shared by the integration tests.
#![allow(dead_code)]

pub mod invariants;

use mcf_rsca::demand::{Demand, DemandSet};
use mcf_rsca::geometry::McfGeometry;
use mcf_rsca::heuristic::{solve_all, DemandOrder, HeuristicConfig, Strategy};
use mcf_rsca::ilp::{build_ilp, solve_exact_small, ExactLimits, ExactSolution, IlpInstance, IlpParams};
use mcf_rsca::oracle::{brute_force_rsca, OracleParams, OracleResult};
use mcf_rsca::state::{Mode, NetworkState, StateConfig};
use mcf_rsca::topology::Topology;
use mcf_rsca::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHA: f64 = 0.01;
pub const K: usize = 2;

#[derive(Clone, Debug)]
pub struct Micro {
    pub seed: u64,
    pub topo: Topology,
    pub g: McfGeometry,
    pub demands: DemandSet,
    pub mode: Mode,
    pub fiber_cap: usize,
    pub slots: usize,
}

impl Micro {
    pub fn describe(&self) -> String {
        format!(
            "seed {} ({} nodes, {} links, {} cores, W={}, F={}, {} mode, {} demands)",
            self.seed,
            self.topo.node_count(),
            self.topo.links().len(),
            self.g.core_count(),
            self.slots,
            self.fiber_cap,
            self.mode,
            self.demands.len()
        )
    }

    pub fn oracle_params(&self, max_space: u64) -> OracleParams {
        OracleParams {
            mode: self.mode,
            fiber_cap: self.fiber_cap,
            slots: self.slots,
            k: K,
            link_disjoint: true,
            alpha: ALPHA,
            max_space,
            max_optima: 4,
        }
    }

    pub fn ilp_params(&self) -> IlpParams {
        IlpParams {
            mode: self.mode,
            fiber_cap: self.fiber_cap,
            slots: self.slots,
            k: K,
            link_disjoint: true,
            alpha: ALPHA,
            ..IlpParams::default()
        }
    }

    pub fn oracle(&self, max_space: u64) -> Result<OracleResult, Error> {
        brute_force_rsca(&self.topo, &self.g, &self.demands, self.oracle_params(max_space))
    }

    pub fn ilp(&self) -> IlpInstance {
        build_ilp(&self.topo, &self.g, &self.demands, self.ilp_params()).expect("micro ILP builds")
    }

    pub fn exact(&self) -> Result<ExactSolution, Error> {
        solve_exact_small(&self.ilp(), ExactLimits::default())
    }

    /// Heuristic objective, or `None` when a demand goes unserved.
    pub fn heuristic(&self, strategy: Strategy) -> Option<f64> {
        let config = StateConfig::new(self.mode, self.g.core_count(), self.slots, self.fiber_cap).unwrap();
        let state = NetworkState::new(self.topo.links().len(), config);
        let hc = HeuristicConfig {
            strategy,
            k: K,
            link_disjoint: true,
            order: DemandOrder::Input,
        };
        let sol = solve_all(state, &self.topo, &self.demands, &hc, &self.g).unwrap();
        sol.is_feasible().then(|| sol.objective(ALPHA))
    }
}

fn geometry(cores: usize, rng: &mut ChaCha8Rng) -> McfGeometry {
    let text = match cores {
        1 => "1 0 0\n",
        2 => "1 0 0\n2 1 0\n",
        _ if rng.gen_bool(0.5) => "1 0 0\n2 1 0\n3 0.5 0.8660254037844386\n",
        _ => "1 0 0\n2 1 0\n3 2 0\n",
    };
    McfGeometry::parse(text).unwrap()
}

/// At most 4 nodes, 3 cores, 8 slots and 4 demands.
pub fn micro_instance(seed: u64) -> Micro {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: u32 = rng.gen_range(2..=4);
    let mut edges = Vec::new();
    for b in 2..=n {
        let a = rng.gen_range(1..b);
        edges.push((a, b));
    }
    for a in 1..=n {
        for b in (a + 1)..=n {
            if !edges.contains(&(a, b)) && rng.gen_bool(0.4) {
                edges.push((a, b));
            }
        }
    }
    let topo = Topology::from_links(edges.into_iter().map(|(a, b)| (a, b, rng.gen_range(1..=5) as f64))).unwrap();
    let cores = rng.gen_range(1..=3);
    let g = geometry(cores, &mut rng);
    let slots = rng.gen_range(3..=8);
    let count = rng.gen_range(1..=4);
    let demands = (0..count)
        .map(|id| {
            let src = rng.gen_range(1..=n);
            let mut dst = rng.gen_range(1..n);
            if dst >= src {
                dst += 1;
            }
            Demand {
                id,
                src,
                dst,
                fs_count: rng.gen_range(1..=3),
            }
        })
        .collect();
    let mode = if rng.gen_bool(0.5) { Mode::Counter } else { Mode::Co };
    let fiber_cap = if mode == Mode::Counter { rng.gen_range(1..=2) } else { 1 };
    Micro {
        seed,
        topo,
        g,
        demands: DemandSet::new(demands).unwrap(),
        mode,
        fiber_cap,
        slots,
    }
}

/// Largest oracle search space used by the micro-suite.
pub const SUITE_SPACE: u64 = 2_000_000;

/// One accepted micro instance with both exact answers.
pub struct Solved {
    pub micro: Micro,
    pub oracle: OracleResult,
    pub exact: ExactSolution,
}

/// Walks seeds from 1 until `want` feasible instances fit the oracle budget.
/// Instances the oracle proves infeasible must be infeasible for the exact
/// solver too; they are returned separately and do not count.
pub fn micro_suite(want: usize) -> (Vec<Solved>, Vec<Micro>) {
    let mut solved = Vec::new();
    let mut infeasible = Vec::new();
    let mut seed = 0;
    while solved.len() < want {
        seed += 1;
        assert!(seed < 10_000, "could not find {want} micro instances");
        let micro = micro_instance(seed);
        match micro.oracle(SUITE_SPACE) {
            Ok(oracle) => {
                let exact = micro.exact().unwrap_or_else(|e| panic!("exact solver on {}: {e}", micro.describe()));
                solved.push(Solved { micro, oracle, exact });
            }
            Err(Error::Infeasible) => {
                assert!(
                    matches!(micro.exact(), Err(Error::Infeasible)),
                    "oracle says infeasible, exact solver disagrees on {}",
                    micro.describe()
                );
                infeasible.push(micro);
            }
            Err(Error::LimitsExceeded(_)) => {}
            Err(e) => panic!("oracle on {}: {e}", micro.describe()),
        }
    }
    (solved, infeasible)
}

/// Solves an LP file with HiGHS through python, if both are installed.
pub fn highs_objective(lp_path: &std::path::Path) -> Option<Result<f64, String>> {
    const SCRIPT: &str = r#"
import sys
try:
    import highspy
except ImportError:
    sys.exit(3)
h = highspy.Highs()
h.setOptionValue("output_flag", False)
h.setOptionValue("mip_rel_gap", 0.0)
h.readModel(sys.argv[1])
h.run()
status = h.modelStatusToString(h.getModelStatus())
if status != "Optimal":
    print(status)
    sys.exit(4)
print(repr(h.getInfo().objective_function_value))
"#;
    let out = std::process::Command::new("python3")
        .arg("-c")
        .arg(SCRIPT)
        .arg(lp_path)
        .output()
        .ok()?;
    let text = String::from_utf8_lossy(&out.stdout).trim().to_string();
    match out.status.code() {
        Some(0) => Some(text.parse().map_err(|_| format!("unparsable objective `{text}`"))),
        Some(3) => None,
        _ => Some(Err(format!("HiGHS status {text} {}", String::from_utf8_lossy(&out.stderr)))),
    }
}
