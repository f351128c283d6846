//! The search engine: destroy/repair selection by adaptive roulette,
//! simulated-annealing acceptance with a linear temperature schedule,
//! periodic set-cover intensification and best-solution tracking.

use crate::construct::initial_solution;
use crate::destroy::{self, enabled_destroy_ops, DestroyOp};
use crate::eval::total_cost;
use crate::ls::{build_neighbor_lists, local_search};
use crate::model::*;
use crate::pool::{correction_heuristic, solve_set_cover, update_pool, NetworkPool};
use crate::repair::{self, RepairOp};
use crate::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Adaptive selection weights for one operator family.
#[derive(Debug, Clone)]
pub struct OperatorWeights {
    weights: Vec<f64>,
    usage: Vec<u64>,
    accumulated: Vec<f64>,
}

/// Floor keeping selection probabilities strictly positive.
const WEIGHT_FLOOR: f64 = 1e-6;

impl OperatorWeights {
    pub fn uniform(n: usize) -> Self {
        OperatorWeights { weights: vec![1.0; n], usage: vec![0; n], accumulated: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, id: usize) -> f64 {
        self.weights[id]
    }

    pub fn usage(&self, id: usize) -> u64 {
        self.usage[id]
    }

    /// Selection probability of each operator.
    pub fn probabilities(&self) -> Vec<f64> {
        let sum: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / sum).collect()
    }
}

/// Roulette-wheel selection: operator j is drawn with probability
/// proportional to its weight.
pub fn roulette_select<R: Rng>(weights: &OperatorWeights, rng: &mut R) -> usize {
    let sum: f64 = weights.weights.iter().sum();
    let mut ticket = rng.random::<f64>() * sum;
    for (i, w) in weights.weights.iter().enumerate() {
        ticket -= w;
        if ticket < 0.0 {
            return i;
        }
    }
    weights.weights.len() - 1
}

/// Exponential smoothing of one operator weight with score `omega`,
/// clamped to stay positive.
pub fn update_weight(weights: &mut OperatorWeights, id: usize, omega: f64, lambda: f64) {
    weights.usage[id] += 1;
    weights.accumulated[id] += omega;
    let w = lambda * weights.weights[id] + (1.0 - lambda) * omega;
    weights.weights[id] = w.max(WEIGHT_FLOOR);
}

/// Temperature after `iteration` updates of the linear schedule.
pub fn temperature_at(config: &Config, iteration: u64) -> f64 {
    match config.temperature_schedule {
        TemperatureSchedule::Linear => {
            config.t_init
                - iteration as f64 * (config.t_init - config.t_final) / config.max_iter as f64
        }
    }
}

/// Simulated-annealing state carried through the run.
#[derive(Debug, Clone, Copy)]
pub struct SaState {
    pub temperature: f64,
    pub iteration: u64,
}

/// Accepts a worse candidate when `exp(-(candidate - reference) / t)`
/// beats a uniform draw.
pub fn sa_accept<R: Rng>(candidate: Money, reference: Money, temperature: f64, rng: &mut R) -> bool {
    let delta = (candidate - reference) as f64;
    (-delta / temperature).exp() > rng.random::<f64>()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub current_cost: Money,
    pub best_cost: Money,
    pub destroy: &'static str,
    pub repair: &'static str,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Solution,
    pub best_cost: Money,
    pub iterations: u64,
    /// Monotone (iteration, best cost) improvements, starting with
    /// the construction value at iteration 0.
    pub best_trace: Vec<(u64, Money)>,
    /// Full per-iteration trace when `collect_trace` is set.
    pub trace: Option<Vec<TraceRow>>,
    pub destroy_ops: Vec<&'static str>,
    pub destroy_usage: Vec<u64>,
    pub repair_usage: Vec<u64>,
}

/// Runs the full search from construction to the iteration budget.
pub fn run(instance: &Instance, config: &Config) -> Result<RunResult> {
    let start = initial_solution(instance, config)?;
    run_from(instance, config, start)
}

/// Runs the search loop from a given feasible starting solution.
pub fn run_from(instance: &Instance, config: &Config, start: Solution) -> Result<RunResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let lists = build_neighbor_lists(instance, config.neighbor_fraction);

    let mut current = start;
    let mut current_cost =
        current.cost_cache.unwrap_or_else(|| total_cost(instance, &current));
    current.cost_cache = Some(current_cost);
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut pool = NetworkPool::new();

    let d_ops: Vec<DestroyOp> = enabled_destroy_ops(config);
    let r_ops: Vec<RepairOp> = RepairOp::ALL.to_vec();
    let mut d_weights = OperatorWeights::uniform(d_ops.len());
    let mut r_weights = OperatorWeights::uniform(r_ops.len());

    let mut best_trace = vec![(0, best_cost)];
    let mut trace = config.collect_trace.then(Vec::new);

    let scores = config.scores;
    for iteration in 1..=config.max_iter {
        let temperature = temperature_at(config, iteration - 1);

        let d_idx = roulette_select(&d_weights, &mut rng);
        let removal = destroy::apply(d_ops[d_idx], instance, &current, config, &mut rng);
        let r_idx = roulette_select(&r_weights, &mut rng);
        let mut candidate = repair::apply(r_ops[r_idx], instance, removal, config)?;
        update_pool(&mut pool, instance, &candidate);
        if iteration % config.ls_every == 0 {
            local_search(instance, &mut candidate, &lists, config);
        }
        let candidate_cost = candidate
            .cost_cache
            .unwrap_or_else(|| total_cost(instance, &candidate));

        if iteration % config.sc_every == 0 {
            if let Ok(selected) = solve_set_cover(&pool, instance) {
                if let Ok(sc_solution) = correction_heuristic(instance, &selected, config) {
                    let sc_cost = sc_solution.cost_cache.unwrap();
                    if sc_cost <= best_cost {
                        best = sc_solution;
                        best_cost = sc_cost;
                        best_trace.push((iteration, best_cost));
                    } else {
                        update_pool(&mut pool, instance, &candidate);
                    }
                }
            }
        }

        let omega;
        let accepted;
        if candidate_cost <= current_cost {
            update_pool(&mut pool, instance, &candidate);
            omega = if candidate_cost < best_cost {
                scores[0]
            } else if candidate_cost < current_cost {
                scores[1]
            } else {
                scores[2]
            };
            if candidate_cost <= best_cost {
                best = candidate.clone();
                if candidate_cost < best_cost {
                    best_cost = candidate_cost;
                    best_trace.push((iteration, best_cost));
                } else {
                    best_cost = candidate_cost;
                }
            }
            current = candidate;
            current_cost = candidate_cost;
            accepted = true;
        } else {
            let reference = if config.sa_reference_best { best_cost } else { current_cost };
            if sa_accept(candidate_cost, reference, temperature, &mut rng) {
                current = candidate;
                current_cost = candidate_cost;
                omega = scores[2];
                accepted = true;
            } else {
                omega = scores[3];
                accepted = false;
            }
        }
        update_weight(&mut d_weights, d_idx, omega, config.lambda_smoothing);
        update_weight(&mut r_weights, r_idx, omega, config.lambda_smoothing);

        if let Some(rows) = trace.as_mut() {
            rows.push(TraceRow {
                iteration,
                current_cost,
                best_cost,
                destroy: d_ops[d_idx].name(),
                repair: r_ops[r_idx].name(),
                accepted,
            });
        }
        debug_assert!(
            crate::eval::check_feasibility(instance, &current, config).is_empty(),
            "current solution infeasible at iteration {iteration}"
        );
    }

    debug_assert!(crate::eval::check_feasibility(instance, &best, config).is_empty());
    Ok(RunResult {
        best,
        best_cost,
        iterations: config.max_iter,
        best_trace,
        trace,
        destroy_ops: d_ops.iter().map(|o| o.name()).collect(),
        destroy_usage: d_weights.usage.clone(),
        repair_usage: r_weights.usage.clone(),
    })
}

/// Independent seeded runs of one instance; results come back in seed
/// order regardless of scheduling.
pub fn run_many(instance: &Instance, config: &Config, seeds: &[u64]) -> Result<Vec<RunResult>> {
    #[cfg(feature = "parallel")]
    {
        run_many_parallel(instance, config, seeds)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_many_sequential(instance, config, seeds)
    }
}

pub fn run_many_sequential(
    instance: &Instance,
    config: &Config,
    seeds: &[u64],
) -> Result<Vec<RunResult>> {
    seeds
        .iter()
        .map(|&seed| {
            let mut c = config.clone();
            c.rng_seed = seed;
            run(instance, &c)
        })
        .collect()
}

#[cfg(feature = "parallel")]
pub fn run_many_parallel(
    instance: &Instance,
    config: &Config,
    seeds: &[u64],
) -> Result<Vec<RunResult>> {
    use rayon::prelude::*;
    seeds
        .par_iter()
        .map(|&seed| {
            let mut c = config.clone();
            c.rng_seed = seed;
            run(instance, &c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::check_feasibility;
    use crate::test_fixtures::{benchmark_like_instance, tiny_random_instance};

    #[test]
    fn roulette_single_operator_always_selected() {
        let w = OperatorWeights::uniform(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(roulette_select(&w, &mut rng), 0);
        }
    }

    #[test]
    fn roulette_frequencies_match_weights() {
        let mut w = OperatorWeights::uniform(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0u32; 2];
        for _ in 0..100_000 {
            counts[roulette_select(&w, &mut rng)] += 1;
        }
        let f = counts[0] as f64 / 100_000.0;
        assert!((f - 0.5).abs() <= 0.02, "uniform split, got {f}");

        w.weights = vec![3.0, 1.0];
        let mut counts = [0u32; 2];
        for _ in 0..100_000 {
            counts[roulette_select(&w, &mut rng)] += 1;
        }
        let f = counts[0] as f64 / 100_000.0;
        assert!((f - 0.75).abs() <= 0.02, "3:1 split, got {f}");
    }

    #[test]
    fn weight_update_recurrence() {
        let mut w = OperatorWeights::uniform(1);
        update_weight(&mut w, 0, 10.0, 0.8);
        assert!((w.weight(0) - 2.8).abs() < 1e-12);

        // Repeated zero scores decay towards the positive floor.
        let mut z = OperatorWeights::uniform(1);
        for _ in 0..2000 {
            update_weight(&mut z, 0, 0.0, 0.8);
        }
        assert_eq!(z.weight(0), WEIGHT_FLOOR);
        assert!(z.probabilities()[0] > 0.0);

        // Degenerate smoothing keeps weights unchanged.
        let mut one = OperatorWeights::uniform(1);
        update_weight(&mut one, 0, 10.0, 1.0);
        assert_eq!(one.weight(0), 1.0);
    }

    #[test]
    fn linear_temperature_endpoints() {
        let config = Config::default();
        assert_eq!(temperature_at(&config, 0), 10.0);
        assert_eq!(temperature_at(&config, config.max_iter), 1.0);
        let mid = temperature_at(&config, config.max_iter / 2);
        assert!((mid - 5.5).abs() < 1e-9);
    }

    #[test]
    fn sa_acceptance_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Equal costs: always accepted.
        for _ in 0..100 {
            assert!(sa_accept(100, 100, 5.0, &mut rng));
        }
        // Delta equal to temperature: frequency near exp(-1).
        let mut hits = 0u32;
        for _ in 0..100_000 {
            if sa_accept(105, 100, 5.0, &mut rng) {
                hits += 1;
            }
        }
        let f = hits as f64 / 100_000.0;
        assert!((f - (-1.0f64).exp()).abs() <= 0.02, "got {f}");
        // Huge delta at final temperature: essentially never.
        let mut hits = 0u32;
        for _ in 0..10_000 {
            if sa_accept(1_000_000, 100, 1.0, &mut rng) {
                hits += 1;
            }
        }
        assert!(hits == 0, "got {hits}");
    }

    #[test]
    fn zero_iterations_returns_initial_solution() {
        let inst = benchmark_like_instance(20, 5, 1);
        let mut config = Config::default();
        config.max_iter = 0;
        let r = run(&inst, &config).unwrap();
        let init = initial_solution(&inst, &config).unwrap();
        assert_eq!(r.best_cost, total_cost(&inst, &init));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let inst = benchmark_like_instance(20, 5, 5);
        let mut config = Config::default();
        config.max_iter = 500;
        config.rng_seed = 42;
        let a = run(&inst, &config).unwrap();
        let b = run(&inst, &config).unwrap();
        assert_eq!(a.best_cost, b.best_cost);
        assert_eq!(a.best, b.best);
        assert_eq!(a.best_trace, b.best_trace);
    }

    #[test]
    fn best_trace_is_monotone_and_best_feasible() {
        let inst = benchmark_like_instance(20, 5, 9);
        let mut config = Config::default();
        config.max_iter = 800;
        let r = run(&inst, &config).unwrap();
        for w in r.best_trace.windows(2) {
            assert!(w[1].1 <= w[0].1, "trace not monotone: {:?}", r.best_trace);
            assert!(w[1].0 >= w[0].0);
        }
        assert!(check_feasibility(&inst, &r.best, &config).is_empty());
        assert_eq!(r.best_cost, total_cost(&inst, &r.best));
        assert!(r.best_cost <= r.best_trace[0].1);
    }

    #[test]
    fn search_improves_over_construction_on_tiny_instances() {
        let inst = tiny_random_instance(6, 2, 1);
        let mut config = Config::default();
        config.max_iter = 2000;
        let r = run(&inst, &config).unwrap();
        let init = initial_solution(&inst, &config).unwrap();
        assert!(r.best_cost <= total_cost(&inst, &init));
    }

    #[test]
    fn run_many_returns_results_in_seed_order() {
        let inst = benchmark_like_instance(20, 5, 2);
        let mut config = Config::default();
        config.max_iter = 200;
        let seeds = [7u64, 8, 9];
        let out = run_many(&inst, &config, &seeds).unwrap();
        assert_eq!(out.len(), 3);
        let seq = run_many_sequential(&inst, &config, &seeds).unwrap();
        for (a, b) in out.iter().zip(&seq) {
            assert_eq!(a.best_cost, b.best_cost);
            assert_eq!(a.best, b.best);
        }
    }
}
