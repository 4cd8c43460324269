use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mkcp_core::exact::{brute_force_solve, exact_block_lp};
use mkcp_core::generate::{greedy_instance, tiny_instance, uniform_instance};
use mkcp_core::grouping::compute_grouping;
use mkcp_core::io::{load_instance, load_solution, solution_to_string};
use mkcp_core::lp::{block_lp_optimize, PolytopeModel};
use mkcp_core::num::to_f64;
use mkcp_core::rng::stream;
use mkcp_core::solver::{solve, solve_uniform};
use mkcp_core::structuring::structure_in_blocks;
use mkcp_core::{Block, Error, Instance, SetFunction, Solution, SolverConfig};

#[derive(Parser)]
#[command(name = "mkcp-kit", version, about = "Submodular maximization with multiple knapsack constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long = "n-level", default_value_t = 4)]
    n_level: usize,
    #[arg(long, default_value_t = 2)]
    xi: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Write the solution here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            delta: self.delta,
            mu: self.mu,
            gamma: self.gamma,
            n_level: self.n_level,
            xi: self.xi,
            seed: self.seed,
            restarts: self.restarts,
            steps: self.steps,
            samples: self.samples,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate small prefixes and solve every residual instance.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Single constraint with equal capacities.
    SolveUniform {
        instance: PathBuf,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Exhaustive optimum of a tiny instance.
    Brute {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fractional point over the instance polytope for singleton marginals.
    Lp {
        instance: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long = "n-level", default_value_t = 4)]
        n_level: usize,
    },
    /// μ-grouping of one block's fractional witness.
    Grouping {
        instance: PathBuf,
        #[arg(long)]
        constraint: usize,
        #[arg(long)]
        block: usize,
        #[arg(long, default_value_t = 0.05)]
        mu: f64,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long = "n-level", default_value_t = 4)]
        n_level: usize,
    },
    /// Check a solution against an instance.
    Validate { instance: PathBuf, solution: PathBuf },
    /// Randomized families against exact references, as CSV.
    Bench {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(w) = std::env::var("MKCP_WORKERS") {
        match w.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring MKCP_WORKERS={w:?}"),
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, |e| e.exit_code());
            ExitCode::from(code as u8)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn report_value(inst: &Instance, sol: &Solution) {
    eprintln!("value: {} ({} items)", sol.value(inst), sol.selected.len());
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Solve { instance, args } => {
            let inst = load_instance(&instance)?;
            let cfg = args.config();
            eprintln!(
                "config: epsilon={} delta={} mu={} gamma={} n_level={} xi={} restarts={} seed={}",
                cfg.epsilon,
                cfg.delta,
                cfg.mu(),
                cfg.gamma,
                cfg.n_level,
                cfg.xi,
                cfg.restarts,
                cfg.seed
            );
            eprintln!(
                "note: the approximation guarantee needs N and xi growing with 1/epsilon and blocks of at least 4*4^(1/mu^2) = {:.3e} bins; desk-scale runs use the values above",
                4.0 * 4f64.powf(cfg.mu().powi(-2))
            );
            let (sol, report) = solve(&inst, &cfg)?;
            eprintln!(
                "iterations: {} (prefixes {}, restricted runs {}), compliant samples: {}, compliant but unpacked: {}, guarantee applies: {}",
                report.iterations, report.prefixes, report.restricted_calls, report.compliant_samples, report.claim_violations, report.guaranteed
            );
            report_value(&inst, &sol);
            emit(&solution_to_string(&sol, &inst), args.out.as_deref())
        }
        Command::SolveUniform { instance, args } => {
            let inst = load_instance(&instance)?;
            let sol = solve_uniform(&inst, &args.config())?;
            report_value(&inst, &sol);
            emit(&solution_to_string(&sol, &inst), args.out.as_deref())
        }
        Command::Brute { instance, out } => {
            let inst = load_instance(&instance)?;
            let sol = brute_force_solve(&inst)?;
            report_value(&inst, &sol);
            emit(&solution_to_string(&sol, &inst), out.as_deref())
        }
        Command::Lp { instance, epsilon, gamma, n_level } => {
            let inst = load_instance(&instance)?;
            let (model, blocks) = instance_model(&inst, gamma, n_level, epsilon)?;
            let c = singleton_marginals(&inst);
            let sol = model.optimize(&c)?;
            let witnesses: Vec<Value> = sol
                .point
                .witnesses
                .iter()
                .zip(&blocks)
                .enumerate()
                .map(|(t, (ws, bs))| {
                    let k = &inst.constraints[t];
                    Value::Array(
                        ws.iter()
                            .zip(bs)
                            .map(|(w, b)| {
                                json!({
                                    "bins": b.bins.iter().map(|&x| k.bin_labels[x].clone()).collect::<Vec<_>>(),
                                    "capacity": b.capacity as f64 / k.scale as f64,
                                    "y": labelled(&inst, &w.y),
                                    "configurations": w.z.entries.iter().map(|(cfg, weight)| json!({
                                        "items": cfg.iter().map(|&i| inst.labels[i].clone()).collect::<Vec<_>>(),
                                        "weight": weight,
                                    })).collect::<Vec<_>>(),
                                })
                            })
                            .collect(),
                    )
                })
                .collect();
            let out = json!({
                "objective_coefficients": labelled(&inst, &c),
                "value": sol.value,
                "upper_bound": sol.upper_bound,
                "columns": sol.columns,
                "rounds": sol.rounds,
                "x": labelled(&inst, &sol.point.x),
                "blocks": witnesses,
            });
            emit(&serde_json::to_string_pretty(&out)?, None)
        }
        Command::Grouping { instance, constraint, block, mu, epsilon, n_level } => {
            let inst = load_instance(&instance)?;
            if constraint >= inst.d() {
                bail!(Error::Invalid(format!("constraint {constraint} out of range")));
            }
            let (model, blocks) = instance_model(&inst, 1.0, n_level, epsilon)?;
            let Some(b) = blocks[constraint].get(block) else {
                bail!(Error::Invalid(format!("constraint {constraint} has {} blocks", blocks[constraint].len())));
            };
            let sol = model.optimize(&singleton_marginals(&inst))?;
            let y = &sol.point.witnesses[constraint][block].y;
            let k = &inst.constraints[constraint];
            let g = compute_grouping(y, &k.weights, b.capacity, b.size(), mu);
            let names = |items: &[usize]| items.iter().map(|&i| inst.labels[i].clone()).collect::<Vec<_>>();
            let out = json!({
                "block_size": b.size(),
                "capacity": b.capacity as f64 / k.scale as f64,
                "mu": mu,
                "y": labelled(&inst, y),
                "groups": g.groups.iter().map(|grp| names(grp)).collect::<Vec<_>>(),
                "group_mass": g.mass(y),
                "light": names(&g.light),
            });
            emit(&serde_json::to_string_pretty(&out)?, None)
        }
        Command::Validate { instance, solution } => {
            let inst = load_instance(&instance)?;
            let sol = load_solution(&solution, &inst)?;
            let problems = sol.violations(&inst);
            if !problems.is_empty() {
                for p in &problems {
                    eprintln!("{p}");
                }
                bail!(Error::Invalid(format!("{} violation(s)", problems.len())));
            }
            println!("OK");
            report_value(&inst, &sol);
            Ok(())
        }
        Command::Bench { suite, seed, cases } => bench(&suite, seed, cases),
    }
}

fn labelled(inst: &Instance, v: &[f64]) -> Value {
    let mut m = serde_json::Map::new();
    for (label, &x) in inst.labels.iter().zip(v) {
        if x != 0.0 {
            m.insert(label.clone(), json!(x));
        }
    }
    Value::Object(m)
}

fn singleton_marginals(inst: &Instance) -> Vec<f64> {
    let f = &inst.objective;
    (0..inst.n()).map(|i| f.marginal_scaled(&[], i) as f64 / f.scale() as f64).collect()
}

fn instance_model(
    inst: &Instance,
    gamma: f64,
    n_level: usize,
    epsilon: f64,
) -> mkcp_core::Result<(PolytopeModel, Vec<Vec<Block>>)> {
    let blocks: Vec<Vec<Block>> = inst
        .constraints
        .iter()
        .map(|k| structure_in_blocks(&k.capacities, n_level).map(|p| p.blocks))
        .collect::<mkcp_core::Result<_>>()?;
    let weights = inst.constraints.iter().map(|k| k.weights.clone()).collect();
    let all: Vec<usize> = (0..inst.n()).collect();
    let model = PolytopeModel::new(inst.n(), weights, &blocks, Some(gamma), &all, &inst.additional).with_eps(epsilon);
    Ok((model, blocks))
}

struct Row {
    case: u64,
    value: f64,
    reference: f64,
    millis: u128,
}

fn bench(suite: &str, seed: u64, cases: u64) -> anyhow::Result<()> {
    let rows: Vec<Row> = match suite {
        "tiny-exact" => (0..cases)
            .map(|c| {
                let inst = tiny_instance(seed, c);
                let cfg = SolverConfig { xi: inst.n(), seed, ..Default::default() };
                solver_row(c, &inst, |i| Ok(solve(i, &cfg)?.0))
            })
            .collect::<anyhow::Result<_>>()?,
        "restricted" => (0..cases)
            .map(|c| {
                let inst = tiny_instance(seed, c);
                let cfg = SolverConfig { xi: 0, seed, ..Default::default() };
                solver_row(c, &inst, |i| Ok(solve(i, &cfg)?.0))
            })
            .collect::<anyhow::Result<_>>()?,
        "greedy" => (0..cases)
            .map(|c| {
                let inst = greedy_instance(seed, c);
                let cfg = SolverConfig { xi: 0, gamma: 0.99, delta: 0.05, restarts: 20, seed, ..Default::default() };
                solver_row(c, &inst, |i| Ok(solve(i, &cfg)?.0))
            })
            .collect::<anyhow::Result<_>>()?,
        "uniform" => (0..cases)
            .map(|c| {
                let inst = uniform_instance(seed, c);
                let cfg = SolverConfig { seed, ..Default::default() };
                solver_row(c, &inst, |i| Ok(solve_uniform(i, &cfg)?))
            })
            .collect::<anyhow::Result<_>>()?,
        "block-lp" => (0..cases).map(|c| block_lp_row(seed, c)).collect::<anyhow::Result<_>>()?,
        other => bail!(Error::Invalid(format!(
            "unknown suite {other:?}; expected tiny-exact, restricted, greedy, uniform or block-lp"
        ))),
    };
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["suite", "case", "seed", "value", "reference", "ratio", "runtime_ms"])?;
    for r in rows {
        let ratio = if r.reference > 0.0 { r.value / r.reference } else { 1.0 };
        w.write_record([
            suite.to_string(),
            r.case.to_string(),
            seed.to_string(),
            r.value.to_string(),
            r.reference.to_string(),
            format!("{ratio:.6}"),
            r.millis.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn solver_row(
    case: u64,
    inst: &Instance,
    run: impl FnOnce(&Instance) -> anyhow::Result<Solution>,
) -> anyhow::Result<Row> {
    let start = Instant::now();
    let sol = run(inst)?;
    let millis = start.elapsed().as_millis();
    let reference = brute_force_solve(inst)?.value(inst);
    Ok(Row { case, value: sol.value(inst), reference, millis })
}

fn block_lp_row(seed: u64, case: u64) -> anyhow::Result<Row> {
    use rand::Rng;
    let mut rng = stream(seed, "bench-block-lp", case);
    let n = rng.gen_range(2..=8);
    let weights: Vec<i128> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
    let size = rng.gen_range(1..=3);
    let block = Block { bins: (0..size).collect(), capacity: rng.gen_range(5..=15) };
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=20) as f64).collect();
    let start = Instant::now();
    let (_, _, value) = block_lp_optimize(&weights, &block, &c, 0.05)?;
    let millis = start.elapsed().as_millis();
    let exact = exact_block_lp(&weights, &block, &c)?;
    Ok(Row { case, value, reference: to_f64(&exact.value), millis })
}
