use super::*;
use crate::state::{CoreChoice, NetworkState, StateConfig};

fn demand(id: usize, src: u32, dst: u32, fs: usize) -> Demand {
    Demand {
        id,
        src,
        dst,
        fs_count: fs,
    }
}

fn pair() -> McfGeometry {
    McfGeometry::parse("1 0 0\n2 1 0\n").unwrap()
}

fn single_link() -> Topology {
    Topology::parse("1 2 100\n").unwrap()
}

fn params(mode: Mode, cap: usize, slots: usize) -> IlpParams {
    IlpParams {
        mode,
        fiber_cap: cap,
        slots,
        ..IlpParams::default()
    }
}

fn build(topo: &Topology, g: &McfGeometry, ds: Vec<Demand>, p: IlpParams) -> IlpInstance {
    build_ilp(topo, g, &DemandSet::new(ds).unwrap(), p).unwrap()
}

#[test]
fn variable_counts_follow_index_sets() {
    let inst = build(&single_link(), &pair(), vec![demand(0, 1, 2, 2)], params(Mode::Counter, 1, 4));
    let expected = [
        ("f", 1),
        ("U", 2),
        ("S", 1),
        ("E", 1),
        ("rho", 0),
        ("X", 1),
        ("O", 2),
        ("DC", 2),
        ("Y", 2),
        ("phi1", 2),
        ("phi2", 2),
        ("Z", 2),
        ("beta", 4),
        ("gamma", 4),
        ("theta", 8),
        ("A", 8),
    ];
    for (fam, n) in expected {
        assert_eq!(inst.count(fam), n, "{fam}");
    }
    assert_eq!(inst.variables.len(), expected.iter().map(|e| e.1).sum::<usize>());
    // ordering rows need a second demand
    let fams: Vec<u8> = inst.families().into_iter().collect();
    let all: Vec<u8> = (2..=21).filter(|f| *f != 6 && *f != 7).collect();
    assert_eq!(fams, all);
}

#[test]
fn every_family_appears_with_two_demands() {
    let inst = build(
        &single_link(),
        &pair(),
        vec![demand(0, 1, 2, 1), demand(1, 1, 2, 1)],
        params(Mode::Counter, 1, 2),
    );
    assert_eq!(inst.families(), (2..=21).collect());
    assert_eq!(inst.count("rho"), 2);
    let mut names: Vec<&str> = inst.variables.iter().map(|v| v.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), inst.variables.len());
    let mut rows: Vec<&str> = inst.constraints.iter().map(|c| c.name.as_str()).collect();
    rows.sort_unstable();
    rows.dedup();
    assert_eq!(rows.len(), inst.constraints.len());
    for c in &inst.constraints {
        assert!(c.terms.iter().all(|&(v, _)| v < inst.variables.len()));
    }
}

#[test]
fn downstream_hops_carry_direction_two() {
    // route 1-4-5-3: the last hop runs from the larger to the smaller id
    let topo = Topology::parse("1 4 1\n4 5 1\n5 3 1\n2 3 1\n").unwrap();
    let p = IlpParams {
        k: 1,
        ..params(Mode::Counter, 1, 4)
    };
    let inst = build(&topo, &pair(), vec![demand(0, 1, 3, 1)], p);
    assert_eq!(inst.routes[0][0].to_node_string(), "1-4-5-3");
    for (nodes, dl) in [((1, 4), 1.0), ((4, 5), 1.0), ((3, 5), 2.0)] {
        let l = topo.find_link(nodes.0, nodes.1).unwrap();
        let o = inst.var(Var::O { r: 0, p: 0, l, i: 0, t: 0 }).unwrap();
        let row = inst
            .constraints
            .iter()
            .find(|c| c.name == format!("c12a_r1p1_l{}_i1_t1", l + 1))
            .unwrap();
        assert!(row.terms.contains(&(o, -dl)), "{}", row.name);
    }
}

#[test]
fn renaming_nodes_only_swaps_directions() {
    let topo = single_link();
    let a = build(&topo, &pair(), vec![demand(0, 1, 2, 2)], params(Mode::Counter, 1, 4));
    let b = build(&topo, &pair(), vec![demand(0, 2, 1, 2)], params(Mode::Counter, 1, 4));
    assert_eq!(a.variables, b.variables);
    assert_eq!(a.constraints.len(), b.constraints.len());
    for (x, y) in a.constraints.iter().zip(&b.constraints) {
        assert_eq!(x.name, y.name);
        if x.family != 12 {
            assert_eq!(x, y);
        }
    }
    let dl = |inst: &IlpInstance| {
        let o = inst.var(Var::O { r: 0, p: 0, l: 0, i: 0, t: 0 }).unwrap();
        let row = inst.constraints.iter().find(|c| c.name == "c12a_r1p1_l1_i1_t1").unwrap();
        row.terms.iter().find(|t| t.0 == o).unwrap().1
    };
    assert_eq!((dl(&a), dl(&b)), (-1.0, -2.0));
}

#[test]
fn empty_demand_set_is_trivially_optimal() {
    let inst = build(&single_link(), &pair(), Vec::new(), params(Mode::Counter, 1, 4));
    let sol = solve_exact_small(&inst, ExactLimits::default()).unwrap();
    assert_eq!(sol.objective, 0.0);
    assert!(inst.violations(&sol.values).is_empty());
    assert!(write_lp(&inst).contains("Minimize"));
}

fn asymmetric_pair(mode: Mode) -> (IlpInstance, ExactSolution) {
    let inst = build(
        &single_link(),
        &McfGeometry::seven_core(),
        vec![demand(0, 1, 2, 4), demand(1, 2, 1, 8)],
        params(mode, 1, 8),
    );
    let sol = solve_exact_small(&inst, ExactLimits::default()).unwrap();
    (inst, sol)
}

#[test]
fn asymmetric_pair_fits_one_fiber() {
    let (inst, sol) = asymmetric_pair(Mode::Counter);
    assert!((sol.objective - 1.0).abs() < 1e-9);
    assert_eq!((sol.fiber_cost, sol.crosstalk), (1, 0));
    assert!((inst.objective_value(&sol.values) - 1.0).abs() < 1e-9);

    let (_, co) = asymmetric_pair(Mode::Co);
    assert!((co.objective - 2.0).abs() < 1e-9);
}

#[test]
fn crowded_single_fiber_pays_crosstalk() {
    let inst = build(
        &single_link(),
        &pair(),
        vec![demand(0, 1, 2, 2), demand(1, 1, 2, 2)],
        params(Mode::Counter, 1, 2),
    );
    let sol = solve_exact_small(&inst, ExactLimits::default()).unwrap();
    assert!((sol.objective - 3.0).abs() < 1e-9, "{}", sol.objective);
    assert_eq!(sol.crosstalk, 200);
    assert!((inst.objective_value(&sol.values) - 3.0).abs() < 1e-9);

    // a second fiber is cheaper than the coupling
    let roomy = build(
        &single_link(),
        &pair(),
        vec![demand(0, 1, 2, 2), demand(1, 1, 2, 2)],
        params(Mode::Counter, 2, 2),
    );
    let sol = solve_exact_small(&roomy, ExactLimits::default()).unwrap();
    assert!((sol.objective - 2.0).abs() < 1e-9);
}

#[test]
fn overlapping_spectrum_on_one_core_is_rejected() {
    let inst = build(
        &single_link(),
        &pair(),
        vec![demand(0, 1, 2, 2), demand(1, 1, 2, 1)],
        params(Mode::Counter, 1, 3),
    );
    let path = |start, core| ExactPath {
        route: 0,
        start,
        choices: vec![CoreChoice { fiber: 0, core }],
    };
    let good = assignment_values(&inst, &[path(1, 0), path(3, 0)]).unwrap();
    assert!(inst.violations(&good).is_empty());
    let bad = assignment_values(&inst, &[path(1, 0), path(2, 0)]).unwrap();
    let v = inst.violations(&bad);
    assert!(v.iter().any(|n| n.starts_with("c7_")), "{v:?}");
}

#[test]
fn opposite_lightpaths_on_one_core_are_rejected() {
    let inst = build(
        &single_link(),
        &pair(),
        vec![demand(0, 1, 2, 1), demand(1, 2, 1, 1)],
        params(Mode::Counter, 1, 2),
    );
    let path = |start| ExactPath {
        route: 0,
        start,
        choices: vec![CoreChoice { fiber: 0, core: 0 }],
    };
    let bad = assignment_values(&inst, &[path(1), path(2)]).unwrap();
    let v = inst.violations(&bad);
    assert!(v.iter().any(|n| n.starts_with("c12")), "{v:?}");
}

#[test]
fn exact_solution_replays_to_same_objective() {
    let topo = Topology::parse("1 2 1\n2 3 1\n1 3 1\n").unwrap();
    let g = McfGeometry::parse("1 0 0\n2 1 0\n3 0.5 0.8660254\n").unwrap();
    let ds = vec![demand(0, 1, 3, 2), demand(1, 3, 1, 3), demand(2, 1, 2, 2), demand(3, 2, 3, 2)];
    for mode in [Mode::Counter, Mode::Co] {
        let p = IlpParams {
            k: 2,
            link_disjoint: true,
            ..params(mode, 1, 4)
        };
        let inst = build(&topo, &g, ds.clone(), p);
        let sol = solve_exact_small(&inst, ExactLimits::default()).unwrap();
        assert!(inst.violations(&sol.values).is_empty());
        let config = StateConfig::new(mode, 3, 4, 1).unwrap();
        let state = NetworkState::replay(3, config, &sol.records(&inst)).unwrap();
        let xt = crate::crosstalk::total_crosstalk(&state, &g).total_weighted;
        assert_eq!(state.mcf_count() as u64, sol.fiber_cost, "{mode}");
        assert_eq!(xt, sol.crosstalk, "{mode}");
        let recomputed = state.mcf_count() as f64 + 0.01 * xt as f64;
        assert!((recomputed - sol.objective).abs() < 1e-9);
        assert!((inst.objective_value(&sol.values) - sol.objective).abs() < 1e-9);
    }
}

#[test]
fn global_big_m_keeps_the_same_optimum() {
    let ds = vec![demand(0, 1, 2, 2), demand(1, 2, 1, 1), demand(2, 1, 2, 1)];
    let tight = build(&single_link(), &pair(), ds.clone(), params(Mode::Counter, 1, 3));
    let p = IlpParams {
        big_m: BigM::Global(1e4),
        ..params(Mode::Counter, 1, 3)
    };
    let global = build(&single_link(), &pair(), ds, p);
    let a = solve_exact_small(&tight, ExactLimits::default()).unwrap();
    let b = solve_exact_small(&global, ExactLimits::default()).unwrap();
    assert_eq!(a.objective, b.objective);
    assert!(global.violations(&a.values).is_empty());

    let bad = IlpParams {
        big_m: BigM::Global(6.0),
        ..params(Mode::Counter, 1, 3)
    };
    assert!(build_ilp(&single_link(), &pair(), &DemandSet::new(Vec::new()).unwrap(), bad).is_err());
}

#[test]
fn infeasible_and_oversized_instances() {
    let full = build(
        &single_link(),
        &pair(),
        vec![demand(0, 1, 2, 2), demand(1, 1, 2, 2), demand(2, 1, 2, 2)],
        params(Mode::Counter, 1, 2),
    );
    assert!(matches!(solve_exact_small(&full, ExactLimits::default()), Err(Error::Infeasible)));
    let tiny = ExactLimits {
        max_vars: 10,
        ..ExactLimits::default()
    };
    assert!(matches!(solve_exact_small(&full, tiny), Err(Error::LimitsExceeded(_))));
    let too_wide = DemandSet::new(vec![demand(0, 1, 2, 9)]).unwrap();
    assert!(build_ilp(&single_link(), &pair(), &too_wide, params(Mode::Counter, 1, 8)).is_err());
}

#[test]
fn lp_text_layout() {
    let inst = build(
        &single_link(),
        &pair(),
        vec![demand(0, 1, 2, 2), demand(1, 1, 2, 1)],
        params(Mode::Counter, 1, 3),
    );
    let text = write_lp(&inst);
    let sections: Vec<&str> = text
        .lines()
        .filter(|l| ["Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End"].contains(l))
        .collect();
    assert_eq!(sections, ["Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End"]);
    assert!(text.contains("mipgap=0.01%"));
    assert!(text.contains("\\ delta r1p1 r2p1 = 1"));
    assert!(text.contains(" c7_r1p1_r2p1_l1_i1_t1:"));
    assert!(text.lines().all(|l| l.len() <= 110));
    assert!(text.contains(" 1 <= S_r1p1 <= 3"));
    assert_eq!(text, write_lp(&inst));
}
