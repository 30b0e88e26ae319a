//! Exact solver, oracle and heuristic on randomized micro instances.

mod common;

use common::{highs_objective, micro_suite, Solved};
use mcf_rsca::heuristic::Strategy;
use mcf_rsca::ilp::write_lp;

const SUITE: usize = 24;

#[test]
fn exact_solver_matches_oracle() {
    let (solved, infeasible) = micro_suite(SUITE);
    for s in &solved {
        assert!(
            (s.exact.objective - s.oracle.objective).abs() < 1e-9,
            "{}: exact {} vs oracle {}",
            s.micro.describe(),
            s.exact.objective,
            s.oracle.objective
        );
        let inst = s.micro.ilp();
        assert!(inst.violations(&s.exact.values).is_empty());
        assert!((inst.objective_value(&s.exact.values) - s.exact.objective).abs() < 1e-9);
    }
    println!("{} feasible and {} infeasible instances agree", solved.len(), infeasible.len());
}

fn ratios(solved: &[Solved]) -> Vec<(f64, Option<f64>, Option<f64>)> {
    solved
        .iter()
        .map(|s| {
            (
                s.exact.objective,
                s.micro.heuristic(Strategy::LeastCost),
                s.micro.heuristic(Strategy::FirstFit),
            )
        })
        .collect()
}

#[test]
fn heuristic_stays_near_the_optimum() {
    let (solved, _) = micro_suite(SUITE);
    let rows = ratios(&solved);
    let mut lc_not_worse = 0;
    for (s, &(opt, lc, ff)) in solved.iter().zip(&rows) {
        let lc = lc.unwrap_or_else(|| panic!("LC left a demand unserved on {}", s.micro.describe()));
        assert!(lc >= opt - 1e-9, "{}: heuristic {lc} beats the optimum {opt}", s.micro.describe());
        assert!(lc <= 1.5 * opt + 1e-9, "{}: LC {lc} vs optimum {opt}", s.micro.describe());
        if ff.map_or(true, |ff| lc <= ff + 1e-9) {
            lc_not_worse += 1;
        }
    }
    assert!(
        lc_not_worse * 10 >= rows.len() * 9,
        "LC no worse than FF on only {lc_not_worse} of {}",
        rows.len()
    );
}

#[test]
fn external_milp_solver_agrees_when_available() {
    let (solved, _) = micro_suite(SUITE);
    let dir = tempfile::tempdir().unwrap();
    let mut checked = 0;
    for (i, s) in solved.iter().enumerate() {
        let path = dir.path().join(format!("m{i}.lp"));
        std::fs::write(&path, write_lp(&s.micro.ilp())).unwrap();
        match highs_objective(&path) {
            None => {
                println!("HiGHS unavailable, skipping the external check");
                return;
            }
            Some(Ok(obj)) => {
                assert!(
                    (obj - s.exact.objective).abs() < 1e-6,
                    "{}: HiGHS {obj} vs exact {}",
                    s.micro.describe(),
                    s.exact.objective
                );
                checked += 1;
            }
            Some(Err(e)) => panic!("{}: {e}", s.micro.describe()),
        }
    }
    println!("HiGHS agrees on {checked} instances");
}
