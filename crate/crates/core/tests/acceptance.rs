//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Criteria 1-4 and 8 are correctness checks and make this target fail.
//! Criteria 5-7 are trend floors measured on fixed seeds; their lines are
//! printed as measured but do not change the exit status. `tests/trends.rs`
//! holds the same floors as ignored strict tests.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use common::invariants::{run_sequence, Tally};
use common::{highs_objective, micro_suite};
use mcf_rsca::crosstalk::crosstalk_factor;
use mcf_rsca::demand::{AsymmetryRatio, Demand, DemandSet};
use mcf_rsca::experiment::{sweep_ar, ExperimentConfig, SweepRow};
use mcf_rsca::geometry::McfGeometry;
use mcf_rsca::heuristic::{build_aux_graph, solve_all, HeuristicConfig, Strategy};
use mcf_rsca::ilp::{build_ilp, solve_exact_small, write_lp, ExactLimits, IlpParams};
use mcf_rsca::oracle::{brute_force_rsca, OracleParams};
use mcf_rsca::state::{CoreChoice, CoreState, Mode, NetworkState, SpectrumWindow, StateConfig};
use mcf_rsca::topology::{Direction, Topology};

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: impl Into<String>) -> Line {
    Line {
        pass,
        detail: detail.into(),
    }
}

fn busy(dir: Direction, ranges: &[(usize, usize)]) -> CoreState {
    let mut c = CoreState::new(50);
    c.direction = Some(dir);
    for &(a, b) in ranges {
        c.occupancy.set_window(SpectrumWindow {
            start: a,
            width: b - a + 1,
        });
    }
    c
}

fn worked_examples() -> Line {
    let g19 = McfGeometry::nineteen_core();
    let cf12 = crosstalk_factor(
        &g19,
        0,
        1,
        &busy(Direction::Up, &[(1, 3)]),
        &busy(Direction::Up, &[(2, 4), (18, 23)]),
    );
    let cf814 = crosstalk_factor(
        &g19,
        7,
        13,
        &busy(Direction::Down, &[(10, 15)]),
        &busy(Direction::Down, &[(10, 20)]),
    );

    // three cores on a line: 2 is L1 from 1, 3 is L2 from 1
    let g = McfGeometry::parse("1 0 0\n2 1 0\n3 -2 0\n").unwrap();
    let topo = Topology::parse("1 2 100\n2 3 100\n").unwrap();
    let mut state = NetworkState::new(2, StateConfig::new(Mode::Counter, 3, 8, 4).unwrap());
    state.add_fiber(0).unwrap();
    state.add_fiber(1).unwrap();
    let mut light = |a: u32, b: u32, core: usize, start: usize, width: usize| {
        let d = Demand {
            id: state.log().len(),
            src: a,
            dst: b,
            fs_count: width,
        };
        let r = topo.route(&[a, b]).unwrap();
        state
            .commit_lightpath(&d, &r, &[CoreChoice { fiber: 0, core }], SpectrumWindow { start, width })
            .unwrap();
    };
    light(1, 2, 0, 5, 2);
    light(2, 1, 1, 1, 3);
    light(2, 3, 0, 1, 2);
    let route = topo.route(&[1, 2, 3]).unwrap();
    let ag = build_aux_graph(&state, &route, SpectrumWindow { start: 1, width: 4 }, &g).unwrap();
    let costs: Vec<u64> = ag.hops().iter().flatten().map(|e| e.cost.0 / 100).collect();
    line(
        cf12 == 200 && cf814 == 6 && costs == [0, 0, 200, 20],
        format!("CF(1,2)={cf12} CF(8,14)={cf814} AG core costs {costs:?}"),
    )
}

fn one_link_two_directions() -> Line {
    let topo = Topology::parse("1 2 1\n").unwrap();
    let g = McfGeometry::seven_core();
    let ds = DemandSet::new(vec![
        Demand {
            id: 0,
            src: 1,
            dst: 2,
            fs_count: 4,
        },
        Demand {
            id: 1,
            src: 2,
            dst: 1,
            fs_count: 8,
        },
    ])
    .unwrap();
    let mut parts = Vec::new();
    let mut ok = true;
    for (mode, want) in [(Mode::Counter, 1), (Mode::Co, 2)] {
        let state = NetworkState::new(1, StateConfig::new(mode, 7, 8, 1).unwrap());
        let heur = solve_all(state, &topo, &ds, &HeuristicConfig::default(), &g).unwrap().mcf_count;
        let params = IlpParams {
            mode,
            fiber_cap: 1,
            slots: 8,
            ..IlpParams::default()
        };
        let exact = solve_exact_small(&build_ilp(&topo, &g, &ds, params).unwrap(), ExactLimits::default())
            .unwrap()
            .fiber_cost as usize;
        let oracle = brute_force_rsca(
            &topo,
            &g,
            &ds,
            OracleParams {
                mode,
                slots: 8,
                ..OracleParams::default()
            },
        )
        .unwrap()
        .mcf_count;
        ok &= heur == want && exact == want && oracle == want;
        parts.push(format!("{mode}: heuristic {heur} exact {exact} oracle {oracle}"));
    }
    line(ok, parts.join(", "))
}

fn micro(suite: &[common::Solved], infeasible: usize) -> (Line, Line) {
    let agree = suite
        .iter()
        .filter(|s| (s.exact.objective - s.oracle.objective).abs() < 1e-9)
        .count();
    let dir = tempfile::tempdir().unwrap();
    let mut highs = Some(0);
    for (i, s) in suite.iter().enumerate() {
        let p = dir.path().join(format!("m{i}.lp"));
        std::fs::write(&p, write_lp(&s.micro.ilp())).unwrap();
        match (highs_objective(&p), highs) {
            (None, _) => {
                highs = None;
                break;
            }
            (Some(Ok(obj)), Some(n)) if (obj - s.exact.objective).abs() < 1e-6 => highs = Some(n + 1),
            _ => {}
        }
    }
    let highs_text = match highs {
        None => "HiGHS not installed".to_string(),
        Some(n) => format!("HiGHS agrees on {n}/{}", suite.len()),
    };
    let c3 = line(
        agree == suite.len() && highs.map_or(true, |n| n == suite.len()),
        format!(
            "exact == oracle on {agree}/{} feasible instances (+{infeasible} infeasible agree); {highs_text}",
            suite.len()
        ),
    );

    let mut worst: f64 = 0.0;
    let mut unserved = 0;
    let mut lc_ok = 0;
    for s in suite {
        let lc = s.micro.heuristic(Strategy::LeastCost);
        let ff = s.micro.heuristic(Strategy::FirstFit);
        match lc {
            Some(lc) => {
                worst = worst.max(lc / s.exact.objective.max(1e-12));
                if ff.map_or(true, |ff| lc <= ff + 1e-9) {
                    lc_ok += 1;
                }
            }
            None => unserved += 1,
        }
    }
    let c4 = line(
        unserved == 0 && worst <= 1.5 + 1e-9 && lc_ok * 10 >= suite.len() * 9,
        format!(
            "worst LC/optimum {worst:.3}, LC <= FF on {lc_ok}/{}, LC unserved on {unserved}",
            suite.len()
        ),
    );
    (c3, c4)
}

fn find(rows: &[SweepRow], ar: u64, mode: Mode, s: Strategy) -> &SweepRow {
    rows.iter()
        .find(|r| r.ar == AsymmetryRatio::integer(ar).unwrap() && r.mode == mode && r.strategy == s)
        .expect("sweep point present")
}

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const STRATEGIES: [Strategy; 2] = [Strategy::FirstFit, Strategy::LeastCost];

fn nsfnet_rows(seed: u64) -> Vec<SweepRow> {
    let mut cfg = ExperimentConfig::default();
    cfg.set("topology", "nsfnet").unwrap();
    cfg.set("x", "20").unwrap();
    cfg.set("seed", &seed.to_string()).unwrap();
    let ars = [AsymmetryRatio::integer(1).unwrap(), AsymmetryRatio::integer(6).unwrap()];
    sweep_ar(&cfg, &ars, &[Mode::Counter, Mode::Co], &STRATEGIES).unwrap()
}

fn trends_nsfnet() -> (Line, Line) {
    let mut c5_ok = true;
    let mut c6_ok = true;
    let mut c5 = Vec::new();
    let mut c6 = Vec::new();
    for seed in SEEDS {
        let rows = nsfnet_rows(seed);
        for s in STRATEGIES {
            let (co, counter) = (find(&rows, 6, Mode::Co, s), find(&rows, 6, Mode::Counter, s));
            let cut = 1.0 - counter.mcf_count as f64 / co.mcf_count as f64;
            c5_ok &= cut >= 0.30 && co.served == co.demands && counter.served == counter.demands;
            c5.push(format!("s{seed} {s} {}/{} ({:.0}%)", counter.mcf_count, co.mcf_count, 100.0 * cut));

            let (co, counter) = (find(&rows, 1, Mode::Co, s), find(&rows, 1, Mode::Counter, s));
            let ratio = counter.crosstalk_total as f64 / co.crosstalk_total as f64;
            c6_ok &= ratio <= 0.50;
            c6.push(format!("s{seed} {s} {ratio:.3}"));
        }
    }
    (
        line(c5_ok, format!("counter/co MCFs at AR=6, need a 30% cut: {}", c5.join(", "))),
        line(c6_ok, format!("counter/co crosstalk at AR=1, need <= 0.50: {}", c6.join(", "))),
    )
}

fn ar_flatness() -> Line {
    let mut cfg = ExperimentConfig::default();
    cfg.set("topology", "n6s8").unwrap();
    cfg.set("x", "8").unwrap();
    cfg.set("pairs", "100").unwrap();
    let ars: Vec<AsymmetryRatio> = [1, 2, 4, 6].iter().map(|&a| AsymmetryRatio::integer(a).unwrap()).collect();
    let rows = sweep_ar(&cfg, &ars, &[Mode::Counter, Mode::Co], &[Strategy::LeastCost]).unwrap();
    let counter: Vec<usize> = [1, 2, 4, 6]
        .iter()
        .map(|&a| find(&rows, a, Mode::Counter, Strategy::LeastCost).mcf_count)
        .collect();
    let co: Vec<usize> = [1, 2, 4, 6]
        .iter()
        .map(|&a| find(&rows, a, Mode::Co, Strategy::LeastCost).mcf_count)
        .collect();
    let spread = *counter.iter().max().unwrap() as f64 / *counter.iter().min().unwrap() as f64;
    let growth = co[3] as f64 / co[0] as f64;
    line(
        spread <= 1.10 && growth >= 1.4,
        format!(
            "counter LC {counter:?} (max/min {spread:.2}, need <= 1.10); co LC {co:?} (AR6/AR1 {growth:.2}, need >= 1.40)"
        ),
    )
}

fn invariants() -> Line {
    let res = catch_unwind(AssertUnwindSafe(|| {
        let mut tally = Tally::default();
        let mut seed = 0;
        while tally.commits < 1000 {
            seed += 1;
            run_sequence(seed, 60, &mut tally);
        }
        tally
    }));
    match res {
        Ok(t) => line(true, format!("{} commits and {} rejected attempts, no violations", t.commits, t.rejected)),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            line(false, format!("violation: {msg}"))
        }
    }
}

fn guarded(f: impl FnOnce() -> Line) -> Line {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| line(false, "panicked"))
}

fn main() -> ExitCode {
    // cargo passes harness flags such as --nocapture; none apply here
    let (suite, infeasible) = micro_suite(24);
    let (c3, c4) = micro(&suite, infeasible.len());
    let (c5, c6) = trends_nsfnet();
    let lines = [
        (1, true, guarded(worked_examples)),
        (2, true, guarded(one_link_two_directions)),
        (3, true, c3),
        (4, true, c4),
        (5, false, c5),
        (6, false, c6),
        (7, false, guarded(ar_flatness)),
        (8, true, invariants()),
    ];
    let mut hard_fail = false;
    for (n, hard, l) in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {tag}  {}", l.detail);
        hard_fail |= *hard && !l.pass;
    }
    let passed = lines.iter().filter(|(_, _, l)| l.pass).count();
    println!("{passed}/{} criteria pass", lines.len());
    if hard_fail {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
