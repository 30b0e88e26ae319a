use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mcf_rsca::demand::{AsymmetryRatio, DemandSet};
use mcf_rsca::experiment::{self, ExperimentConfig};
use mcf_rsca::heuristic::Strategy;
use mcf_rsca::ilp::{build_ilp, solve_exact_small, write_lp, BigM, ExactLimits, IlpParams};
use mcf_rsca::oracle::{brute_force_rsca, OracleParams};
use mcf_rsca::state::Mode;
use mcf_rsca::Error;

/// Exit status for runs that leave demands unserved or logs that fail validation.
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INVALID: u8 = 2;

/// Variable count above which export-ilp warns.
const ILP_WARN_VARS: usize = 200_000;

#[derive(Parser)]
#[command(name = "mcf-rsca", version, about = "RSCA planning for multi-core fiber networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one instance with the heuristic and write CSVs.
    Run(ConfigArgs),
    /// Sweep the asymmetry ratio over shared pair totals.
    SweepAr {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Comma-separated ratios, e.g. `1,2,4,6` or `3/2`.
        #[arg(long, default_value = "1,2,3,4,5,6")]
        ars: String,
        #[arg(long, default_value = "counter,co")]
        modes: String,
        #[arg(long, default_value = "FF,LC")]
        strategies: String,
    },
    /// Write the ILP model in LP format.
    ExportIlp {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        ilp: IlpArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a solution.csv log.
    Validate {
        #[command(flatten)]
        cfg: ConfigArgs,
        log: PathBuf,
        /// Also check the log against the configured demands.
        #[arg(long)]
        check_demands: bool,
    },
    /// Print the core directions of every fiber on one link.
    Layout {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Link as `a-b`.
        #[arg(long)]
        link: String,
    },
    /// Brute-force optimum and exact ILP optimum for a micro instance.
    Oracle {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        ilp: IlpArgs,
    },
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// `key = value` config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override any config key, e.g. `--set slots=40`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    topology: Option<String>,
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    demands: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    ar: Option<String>,
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Args, Clone)]
struct IlpArgs {
    /// Candidate routes may share links.
    #[arg(long)]
    shared_routes: bool,
    /// One big-M for every row instead of per-family bounds.
    #[arg(long)]
    global_m: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p).with_context(|| format!("loading {}", p.display()))?,
            None => ExperimentConfig::default(),
        };
        let named = [
            ("topology", &self.topology),
            ("geometry", &self.geometry),
            ("mode", &self.mode),
            ("strategy", &self.strategy),
            ("demands", &self.demands),
            ("seed", &self.seed),
            ("ar", &self.ar),
            ("output", &self.output),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                cfg.set(key, v).with_context(|| format!("--{key}"))?;
            }
        }
        for s in &self.sets {
            let Some((k, v)) = s.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{s}`");
            };
            cfg.set(k.trim(), v.trim()).with_context(|| format!("--set {s}"))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl IlpArgs {
    fn params(&self, cfg: &ExperimentConfig) -> IlpParams {
        IlpParams {
            mode: cfg.mode,
            fiber_cap: cfg.fiber_cap,
            slots: cfg.slots,
            k: cfg.k,
            link_disjoint: !self.shared_routes,
            alpha: cfg.alpha,
            epsilon: self.epsilon,
            big_m: self.global_m.map_or(BigM::Tight, BigM::Global),
        }
    }
}

fn list<T>(s: &str, parse: impl Fn(&str) -> mcf_rsca::Result<T>) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(t).map_err(anyhow::Error::from))
        .collect()
}

fn write_timing(dir: &Path, command: &str, seconds: f64) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("timing.csv"), format!("command,wall_seconds\n{command},{seconds:.3}\n"))?;
    Ok(())
}

fn cmd_run(args: &ConfigArgs) -> Result<u8> {
    let cfg = args.load()?;
    let t0 = Instant::now();
    let out = experiment::run(&cfg)?;
    let secs = t0.elapsed().as_secs_f64();
    let paths = experiment::write_outputs(&cfg, &out, &cfg.output)?;
    write_timing(&cfg.output, "run", secs)?;
    print!("{}", experiment::metrics_csv(&[out.metrics(&cfg)]));
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    if !out.solution.is_feasible() {
        eprintln!(
            "{} of {} demands could not be served",
            out.solution.unserved.len(),
            out.demands.len()
        );
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(0)
}

fn cmd_sweep(args: &ConfigArgs, ars: &str, modes: &str, strategies: &str) -> Result<u8> {
    let cfg = args.load()?;
    let ars: Vec<AsymmetryRatio> = list(ars, str::parse)?;
    let modes: Vec<Mode> = list(modes, str::parse)?;
    let strategies: Vec<Strategy> = list(strategies, str::parse)?;
    let t0 = Instant::now();
    let rows = experiment::sweep_ar(&cfg, &ars, &modes, &strategies)?;
    let secs = t0.elapsed().as_secs_f64();
    let text = experiment::sweep_csv(&rows);
    std::fs::create_dir_all(&cfg.output)?;
    let path = cfg.output.join("sweep.csv");
    std::fs::write(&path, &text)?;
    write_timing(&cfg.output, "sweep-ar", secs)?;
    print!("{text}");
    eprintln!("wrote {}", path.display());
    Ok(if rows.iter().all(|r| r.served == r.demands) { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_export(args: &ConfigArgs, ilp: &IlpArgs, out: &Path) -> Result<u8> {
    let cfg = args.load()?;
    let topo = cfg.load_topology()?;
    let g = cfg.load_geometry()?;
    let demands = cfg.load_demands(&topo)?;
    let inst = build_ilp(&topo, &g, &demands, ilp.params(&cfg))?;
    if inst.variables.len() > ILP_WARN_VARS {
        eprintln!(
            "warning: {} variables; external solvers may struggle",
            inst.variables.len()
        );
    }
    std::fs::write(out, write_lp(&inst)).with_context(|| format!("writing {}", out.display()))?;
    println!("variables {}", inst.variables.len());
    println!("constraints {}", inst.constraints.len());
    for fam in ["f", "U", "S", "E", "rho", "X", "O", "DC", "Y", "phi1", "phi2", "Z", "beta", "gamma", "theta", "A"] {
        let n = inst.count(fam);
        if n > 0 {
            println!("  {fam} {n}");
        }
    }
    eprintln!("wrote {}", out.display());
    Ok(0)
}

fn cmd_validate(args: &ConfigArgs, log_path: &Path, check_demands: bool) -> Result<u8> {
    let cfg = args.load()?;
    let topo = cfg.load_topology()?;
    let g = cfg.load_geometry()?;
    let text = std::fs::read_to_string(log_path).with_context(|| format!("reading {}", log_path.display()))?;
    let log = experiment::parse_solution(&text)?;
    let demands: Option<DemandSet> = if check_demands { Some(cfg.load_demands(&topo)?) } else { None };
    let report = experiment::validate_solution(&log, &topo, &g, demands.as_ref());
    for v in &report.violations {
        println!("{v}");
    }
    if report.is_clean() {
        println!(
            "clean: {} lightpaths, mcf_count {}, crosstalk {}",
            report.rows,
            report.mcf_count.unwrap_or(0),
            report.crosstalk.unwrap_or(0)
        );
        Ok(0)
    } else {
        println!("{} violations", report.violations.len());
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_layout(args: &ConfigArgs, link: &str) -> Result<u8> {
    let cfg = args.load()?;
    let (a, b) = link
        .split_once('-')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .with_context(|| format!("--link expects `a-b`, got `{link}`"))?;
    let out = experiment::run(&cfg)?;
    let lay = experiment::link_layout(&out.solution.state, &out.topology, a, b)?;
    print!("{}", experiment::render_layout(&lay, &out.geometry));
    Ok(0)
}

fn cmd_oracle(args: &ConfigArgs, ilp: &IlpArgs) -> Result<u8> {
    let cfg = args.load()?;
    let topo = cfg.load_topology()?;
    let g = cfg.load_geometry()?;
    let demands = cfg.load_demands(&topo)?;
    let params = ilp.params(&cfg);
    let brute = brute_force_rsca(
        &topo,
        &g,
        &demands,
        OracleParams {
            mode: cfg.mode,
            fiber_cap: cfg.fiber_cap,
            slots: cfg.slots,
            k: cfg.k,
            link_disjoint: params.link_disjoint,
            alpha: cfg.alpha,
            ..OracleParams::default()
        },
    );
    let inst = build_ilp(&topo, &g, &demands, params)?;
    let exact = solve_exact_small(&inst, ExactLimits::default());
    match (&brute, &exact) {
        (Err(Error::Infeasible), _) | (_, Err(Error::Infeasible)) => {
            println!("infeasible");
            return Ok(EXIT_INFEASIBLE);
        }
        _ => {}
    }
    let brute = brute?;
    println!(
        "oracle objective {:.6} mcf {} crosstalk {} ({} assignments)",
        brute.objective, brute.mcf_count, brute.crosstalk, brute.evaluated
    );
    match exact {
        Ok(e) => println!(
            "exact  objective {:.6} mcf {} crosstalk {} ({} nodes)",
            e.objective, e.fiber_cost, e.crosstalk, e.nodes
        ),
        Err(e) => println!("exact solver skipped: {e}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::SweepAr { cfg, ars, modes, strategies } => cmd_sweep(cfg, ars, modes, strategies),
        Cmd::ExportIlp { cfg, ilp, out } => cmd_export(cfg, ilp, out),
        Cmd::Validate { cfg, log, check_demands } => cmd_validate(cfg, log, *check_demands),
        Cmd::Layout { cfg, link } => cmd_layout(cfg, link),
        Cmd::Oracle { cfg, ilp } => cmd_oracle(cfg, ilp),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = matches!(e.downcast_ref::<Error>(), Some(Error::Infeasible));
            ExitCode::from(if infeasible { EXIT_INFEASIBLE } else { EXIT_INVALID })
        }
    }
}
