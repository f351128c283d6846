use crate::{Init, Mode, SolveOpts};
use anyhow::{bail, Context, Result};
use elrp_core::decomp::decompose_solve;
use elrp_core::engine::{run, RunResult};
use elrp_core::eval::{check_feasibility, gap_percent};
use elrp_core::io;
use elrp_core::kpi::kpi_report;
use elrp_core::model::{Config, InitMethod, Instance, Money};
use elrp_core::oracle::{brute_force_optimum, OracleLimits};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

fn instance_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    stem.trim_start_matches("coord").to_string()
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read instance file {}", path.display()))?;
    let mut instance = io::parse_any(&instance_name(path), &text)
        .with_context(|| format!("cannot parse {}", path.display()))?;
    if instance.bks.is_none() {
        instance.bks = io::known_bks(&instance.name);
    }
    Ok(instance)
}

fn build_config(opts: &SolveOpts) -> Result<Config> {
    let mut config = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("cannot parse config {}", path.display()))?
        }
        None => Config::default(),
    };
    if let Some(iters) = opts.iters {
        config.max_iter = iters;
    }
    config.init_method = match opts.init {
        Init::Flp => InitMethod::Cflp,
        Init::Kmeans => InitMethod::KMeans,
    };
    if opts.strict_depot_capacity {
        config.strict_depot_vehicle_capacity = true;
    }
    if opts.no_direct_shipment {
        config.allow_direct_shipment = false;
    }
    config.validate().map_err(anyhow::Error::from)?;
    Ok(config)
}

struct RunRow {
    seed: u64,
    result: RunResult,
    elapsed_s: f64,
}

/// Seeded runs of one instance, parallel across seeds, results in
/// seed order.
fn execute_runs(
    instance: &Instance,
    config: &Config,
    mode: Mode,
    seed: u64,
    runs: u32,
) -> Result<Vec<RunRow>> {
    let seeds: Vec<u64> = (0..runs as u64).map(|k| seed + k).collect();
    let one = |&s: &u64| -> Result<RunRow> {
        let mut c = config.clone();
        c.rng_seed = s;
        let started = Instant::now();
        let result = match mode {
            Mode::Baseline => run(instance, &c)?,
            Mode::Decomp => decompose_solve(instance, &c)?,
        };
        Ok(RunRow { seed: s, result, elapsed_s: started.elapsed().as_secs_f64() })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        seeds.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds.iter().map(one).collect()
    }
}

fn display_money(instance: &Instance, value: Money) -> String {
    if instance.money_scale == 1 {
        value.to_string()
    } else {
        format!("{:.2}", value as f64 / instance.money_scale as f64)
    }
}

fn display_mean(instance: &Instance, values: &[Money]) -> String {
    let mean = values.iter().map(|&v| v as f64).sum::<f64>()
        / values.len().max(1) as f64
        / instance.money_scale as f64;
    format!("{mean:.1}")
}

fn gap_str(cost: Money, bks: Option<Money>) -> String {
    match bks {
        Some(b) => gap_percent(cost, b).map(|g| format!("{g:.2}")).unwrap_or_default(),
        None => String::new(),
    }
}

pub fn solve(
    path: &Path,
    opts: &SolveOpts,
    trace: Option<&Path>,
    out_solution: Option<&Path>,
    json: bool,
) -> Result<()> {
    let instance = load_instance(path)?;
    let violations = elrp_core::model::validate_instance(&instance);
    if !violations.is_empty() {
        bail!("instance invalid: {}", violations.join("; "));
    }
    let mut config = build_config(opts)?;
    config.collect_trace = trace.is_some();
    let rows = execute_runs(&instance, &config, opts.mode, opts.seed, opts.runs)?;

    for row in &rows {
        let v = check_feasibility(&instance, &row.result.best, &config);
        if !v.is_empty() {
            bail!("seed {} produced an infeasible solution: {}", row.seed, v.join("; "));
        }
    }
    if let Some(base) = trace {
        for row in &rows {
            let path = if rows.len() == 1 {
                base.to_path_buf()
            } else {
                base.with_extension(format!("s{}.csv", row.seed))
            };
            write_trace(&path, row)?;
        }
    }
    let best_row = rows
        .iter()
        .min_by_key(|r| (r.result.best_cost, r.seed))
        .expect("at least one run");
    if let Some(out) = out_solution {
        let text = io::write_solution(&instance, &best_row.result.best)?;
        std::fs::write(out, text).with_context(|| format!("cannot write {}", out.display()))?;
    }

    let costs: Vec<Money> = rows.iter().map(|r| r.result.best_cost).collect();
    let z_best = *costs.iter().min().unwrap();
    let mean_time = rows.iter().map(|r| r.elapsed_s).sum::<f64>() / rows.len() as f64;
    let gap_mean = instance.bks.map(|b| {
        costs.iter().map(|&c| gap_percent(c, b).unwrap()).sum::<f64>() / costs.len() as f64
    });

    if json {
        let report = serde_json::json!({
            "instance": instance.name,
            "bks": instance.bks,
            "runs": rows.iter().map(|r| {
                let mut o = serde_json::json!({
                    "seed": r.seed,
                    "cost": r.result.best_cost,
                    "gap_pct": instance.bks.map(|b| gap_percent(r.result.best_cost, b).unwrap()),
                });
                if !opts.no_timing {
                    o["time_s"] = serde_json::json!(r.elapsed_s);
                }
                o
            }).collect::<Vec<_>>(),
            "z_best": z_best,
            "z_mean": costs.iter().map(|&c| c as f64).sum::<f64>() / costs.len() as f64,
            "gap_best_pct": instance.bks.map(|b| gap_percent(z_best, b).unwrap()),
            "gap_mean_pct": gap_mean,
            "time_mean_s": (!opts.no_timing).then_some(mean_time),
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }

    let mut out = String::new();
    if opts.no_timing {
        writeln!(out, "instance,seed,cost,gap_pct")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{}",
                instance.name,
                r.seed,
                display_money(&instance, r.result.best_cost),
                gap_str(r.result.best_cost, instance.bks)
            )?;
        }
        writeln!(out)?;
        writeln!(out, "instance,bks,z_best,z_mean,gap_best_pct,gap_mean_pct")?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            instance.name,
            instance.bks.map(|b| display_money(&instance, b)).unwrap_or_default(),
            display_money(&instance, z_best),
            display_mean(&instance, &costs),
            gap_str(z_best, instance.bks),
            gap_mean.map(|g| format!("{g:.2}")).unwrap_or_default(),
        )?;
    } else {
        writeln!(out, "instance,seed,cost,gap_pct,time_s")?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{:.2}",
                instance.name,
                r.seed,
                display_money(&instance, r.result.best_cost),
                gap_str(r.result.best_cost, instance.bks),
                r.elapsed_s
            )?;
        }
        writeln!(out)?;
        writeln!(out, "instance,bks,z_best,z_mean,gap_best_pct,gap_mean_pct,time_mean_s")?;
        writeln!(
            out,
            "{},{},{},{},{},{},{:.2}",
            instance.name,
            instance.bks.map(|b| display_money(&instance, b)).unwrap_or_default(),
            display_money(&instance, z_best),
            display_mean(&instance, &costs),
            gap_str(z_best, instance.bks),
            gap_mean.map(|g| format!("{g:.2}")).unwrap_or_default(),
            mean_time
        )?;
    }
    print!("{out}");
    Ok(())
}

fn write_trace(path: &Path, row: &RunRow) -> Result<()> {
    let mut out = String::from("iteration,current_cost,best_cost,destroy,repair,accepted\n");
    if let Some(rows) = &row.result.trace {
        for t in rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t.iteration, t.current_cost, t.best_cost, t.destroy, t.repair, t.accepted
            )?;
        }
    }
    std::fs::write(path, out).with_context(|| format!("cannot write trace {}", path.display()))?;
    Ok(())
}

pub fn bench(dir: &Path, opts: &SolveOpts) -> Result<()> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| matches!(x, "dat" | "txt" | "json"))
        })
        .collect();
    files.sort();

    let config = build_config(opts)?;
    struct BenchRow {
        name: String,
        bks: Option<Money>,
        scale: i64,
        costs: Vec<Money>,
        time_mean: f64,
    }
    let mut table: Vec<BenchRow> = Vec::new();
    for path in &files {
        let instance = load_instance(path)?;
        let rows = execute_runs(&instance, &config, opts.mode, opts.seed, opts.runs)?;
        for row in &rows {
            let v = check_feasibility(&instance, &row.result.best, &config);
            if !v.is_empty() {
                bail!("{}: seed {} infeasible: {}", instance.name, row.seed, v.join("; "));
            }
        }
        table.push(BenchRow {
            name: instance.name.clone(),
            bks: instance.bks,
            scale: instance.money_scale,
            costs: rows.iter().map(|r| r.result.best_cost).collect(),
            time_mean: rows.iter().map(|r| r.elapsed_s).sum::<f64>() / rows.len() as f64,
        });
    }

    let header = if opts.no_timing {
        "instance,bks,z_best,z_mean,gap_best_pct,gap_mean_pct"
    } else {
        "instance,bks,z_best,z_mean,gap_best_pct,gap_mean_pct,time_mean_s"
    };
    println!("{header}");
    let mut gap_bests = Vec::new();
    let mut gap_means = Vec::new();
    let mut times = Vec::new();
    for row in &table {
        let z_best = *row.costs.iter().min().unwrap();
        let z_mean =
            row.costs.iter().map(|&c| c as f64).sum::<f64>() / row.costs.len() as f64;
        let (gb, gm) = match row.bks {
            Some(b) => {
                let gb = gap_percent(z_best, b).unwrap();
                let gm = row.costs.iter().map(|&c| gap_percent(c, b).unwrap()).sum::<f64>()
                    / row.costs.len() as f64;
                gap_bests.push(gb);
                gap_means.push(gm);
                (format!("{gb:.2}"), format!("{gm:.2}"))
            }
            None => (String::new(), String::new()),
        };
        times.push(row.time_mean);
        let bks = row.bks.map(|b| b.to_string()).unwrap_or_default();
        let scale = row.scale as f64;
        let z_best_s = if row.scale == 1 {
            z_best.to_string()
        } else {
            format!("{:.2}", z_best as f64 / scale)
        };
        if opts.no_timing {
            println!("{},{},{},{:.1},{},{}", row.name, bks, z_best_s, z_mean / scale, gb, gm);
        } else {
            println!(
                "{},{},{},{:.1},{},{},{:.2}",
                row.name,
                bks,
                z_best_s,
                z_mean / scale,
                gb,
                gm,
                row.time_mean
            );
        }
    }
    if !table.is_empty() {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        let gb = if gap_bests.is_empty() { String::new() } else { format!("{:.2}", mean(&gap_bests)) };
        let gm = if gap_means.is_empty() { String::new() } else { format!("{:.2}", mean(&gap_means)) };
        if opts.no_timing {
            println!("average,,,,{gb},{gm}");
        } else {
            println!("average,,,,{gb},{gm},{:.2}", mean(&times));
        }
    }
    Ok(())
}

pub fn report_kpi(instance_path: &Path, solution_path: &Path) -> Result<()> {
    let instance = load_instance(instance_path)?;
    let text = std::fs::read_to_string(solution_path)
        .with_context(|| format!("cannot read solution {}", solution_path.display()))?;
    let solution = io::read_solution(&text)?;
    let report = kpi_report(&instance, &solution);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

pub fn generate(customers: usize, depots: usize, seed: u64, out: &Path) -> Result<()> {
    let params = io::CaseStudyParams {
        n_customers: customers,
        n_depots: depots,
        ..io::CaseStudyParams::default()
    };
    let instance = io::generate_case_study(&params, seed)?;
    let text = io::write_canonical(&instance)?;
    std::fs::write(out, text).with_context(|| format!("cannot write {}", out.display()))?;
    println!(
        "wrote {} ({} customers, {} micro-depots, {} nodes)",
        out.display(),
        instance.num_customers(),
        instance.num_depots(),
        instance.num_nodes()
    );
    Ok(())
}

pub fn oracle(path: &Path, max_customers: usize, max_depots: usize) -> Result<()> {
    let instance = load_instance(path)?;
    let limits = OracleLimits { max_customers, max_depots };
    let (cost, solution) = brute_force_optimum(&instance, &Config::default(), limits)?;
    let report = serde_json::json!({
        "instance": instance.name,
        "optimum": cost,
        "optimum_display": cost as f64 / instance.money_scale as f64,
        "certificate": serde_json::from_str::<serde_json::Value>(
            &io::write_solution(&instance, &solution)?
        )?,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
