//! Cluster-first route-second decomposition: depot-level clusters,
//! k-means sub-clusters sized to one vehicle each, savings tours with
//! intra-route polishing, then a shortened search on the aggregate.

use crate::construct::{
    build_fe_routes, clarke_wright, default_kmeans_k, kmeans_assign, solve_cflp, Assignment,
};
use crate::engine::{run_from, RunResult};
use crate::eval::{route_stats, total_cost};
use crate::model::*;
use crate::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Savings tour over one sub-cluster followed by intra-route descent
/// (segment reversal and single-customer relocation to a fixed
/// point). Capacity may force several routes.
pub fn tsp_route(instance: &Instance, depot: NodeId, customers: &[NodeId]) -> Result<Vec<Route>> {
    let mut routes = clarke_wright(instance, depot, customers)?;
    for r in &mut routes {
        improve_intra(instance, r);
    }
    Ok(routes)
}

/// First-improvement reversal and relocation sweeps within one route.
fn improve_intra(instance: &Instance, route: &mut Route) {
    let d = |a: NodeId, b: NodeId| instance.dist_se.get(a, b);
    let node = |visits: &[NodeId], i: isize, home: NodeId| -> NodeId {
        if i < 0 || i as usize >= visits.len() {
            home
        } else {
            visits[i as usize]
        }
    };
    loop {
        let mut improved = false;
        let n = route.visits.len();
        // Segment reversals.
        'rev: for a in 0..n {
            for b in a + 1..n {
                let va = node(&route.visits, a as isize, route.home);
                let prev_a = node(&route.visits, a as isize - 1, route.home);
                let vb = node(&route.visits, b as isize, route.home);
                let next_b = node(&route.visits, b as isize + 1, route.home);
                let delta = d(prev_a, vb) + d(va, next_b) - d(prev_a, va) - d(vb, next_b);
                if delta < 0 {
                    let candidate = {
                        let mut v = route.visits.clone();
                        v[a..=b].reverse();
                        v
                    };
                    let probe = Route { visits: candidate.clone(), ..route.clone() };
                    if route_stats(instance, &probe, None).tw_feasible {
                        route.visits = candidate;
                        improved = true;
                        break 'rev;
                    }
                }
            }
        }
        // Single-customer relocations.
        'rel: for from in 0..route.visits.len() {
            for to in 0..route.visits.len() {
                if to == from || to + 1 == from {
                    continue;
                }
                let mut v = route.visits.clone();
                let c = v.remove(from);
                let at = if to > from { to } else { to + 1 };
                v.insert(at.min(v.len()), c);
                let probe = Route { visits: v.clone(), ..route.clone() };
                let old = seq_distance(instance, route);
                let new = seq_distance(instance, &probe);
                if new < old && route_stats(instance, &probe, None).tw_feasible {
                    route.visits = v;
                    improved = true;
                    break 'rel;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

fn seq_distance(instance: &Instance, route: &Route) -> Dist {
    let mut total = 0;
    let mut prev = route.home;
    for &v in &route.visits {
        total += instance.dist_se.get(prev, v);
        prev = v;
    }
    total + instance.dist_se.get(prev, route.home)
}

/// Joins per-cluster routes into one solution and rebuilds the first
/// echelon.
pub fn aggregate(instance: &Instance, parts: Vec<(NodeId, Vec<Route>)>) -> Result<Solution> {
    let mut sol = Solution::empty();
    for (depot, routes) in parts {
        if routes.is_empty() {
            continue;
        }
        sol.open_depots.insert(depot);
        sol.se_routes.extend(routes);
    }
    let loads = sol.depot_se_loads(instance);
    sol.fe_routes = build_fe_routes(instance, &sol.open_depots, &loads, &[])?;
    sol.cost_cache = Some(total_cost(instance, &sol));
    Ok(sol)
}

/// Sub-cluster count for a depot cluster: one vehicle's capacity per
/// cluster.
fn subcluster_count(instance: &Instance, customers: &[NodeId]) -> usize {
    let demand: Load = customers.iter().map(|&c| instance.demand(c)).sum();
    let per = instance.se_class().capacity;
    (((demand + per - 1) / per) as usize).clamp(1, customers.len())
}

/// Lloyd clustering of a customer subset into k groups.
fn kmeans_subclusters(
    instance: &Instance,
    customers: &[NodeId],
    k: usize,
    seed: u64,
) -> Vec<Vec<NodeId>> {
    if k <= 1 || customers.len() <= 1 {
        return vec![customers.to_vec()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<(f64, f64)> = Vec::with_capacity(k);
    let mut picked = std::collections::BTreeSet::new();
    while centroids.len() < k.min(customers.len()) {
        let c = customers[rng.random_range(0..customers.len())];
        if picked.insert(c) {
            centroids.push(instance.coords[c.idx()]);
        }
    }
    let mut labels = vec![0usize; customers.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (ci, &c) in customers.iter().enumerate() {
            let p = instance.coords[c.idx()];
            let mut best = (f64::INFINITY, 0usize);
            for (li, ctr) in centroids.iter().enumerate() {
                let dd = (p.0 - ctr.0).powi(2) + (p.1 - ctr.1).powi(2);
                if dd < best.0 {
                    best = (dd, li);
                }
            }
            if labels[ci] != best.1 {
                labels[ci] = best.1;
                changed = true;
            }
        }
        for li in 0..centroids.len() {
            let pts: Vec<(f64, f64)> = customers
                .iter()
                .enumerate()
                .filter(|&(ci, _)| labels[ci] == li)
                .map(|(_, &c)| instance.coords[c.idx()])
                .collect();
            if !pts.is_empty() {
                let n = pts.len() as f64;
                centroids[li] =
                    (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
            }
        }
        if !changed {
            break;
        }
    }
    (0..centroids.len())
        .map(|li| {
            customers
                .iter()
                .enumerate()
                .filter(|&(ci, _)| labels[ci] == li)
                .map(|(_, &c)| c)
                .collect()
        })
        .filter(|g: &Vec<NodeId>| !g.is_empty())
        .collect()
}

/// Cluster-first route-second start plus a shortened search.
pub fn decompose_solve(instance: &Instance, config: &Config) -> Result<RunResult> {
    let start = decompose_start(instance, config)?;
    let mut short = config.clone();
    short.max_iter = config.decomp_iters.unwrap_or(config.max_iter / 10).max(1);
    run_from(instance, &short, start)
}

/// The aggregated cluster-first route-second solution before the
/// search runs.
pub fn decompose_start(instance: &Instance, config: &Config) -> Result<Solution> {
    let assignment: Assignment = match config.init_method {
        InitMethod::Cflp => solve_cflp(instance)?,
        InitMethod::KMeans => kmeans_assign(instance, default_kmeans_k(instance), config.rng_seed)?,
    };
    let clusters: Vec<(NodeId, Vec<NodeId>)> = assignment
        .open_depots
        .iter()
        .map(|&t| (t, assignment.customers_of(t)))
        .filter(|(_, cs)| !cs.is_empty())
        .collect();

    let route_cluster = |(idx, (depot, customers)): (usize, &(NodeId, Vec<NodeId>))| -> Result<(NodeId, Vec<Route>)> {
        let k = subcluster_count(instance, customers);
        let seed = config.rng_seed.wrapping_add(idx as u64 + 1);
        let mut routes = Vec::new();
        for group in kmeans_subclusters(instance, customers, k, seed) {
            routes.extend(tsp_route(instance, *depot, &group)?);
        }
        Ok((*depot, routes))
    };

    #[cfg(feature = "parallel")]
    let parts: Result<Vec<(NodeId, Vec<Route>)>> = {
        use rayon::prelude::*;
        clusters.par_iter().enumerate().map(route_cluster).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Result<Vec<(NodeId, Vec<Route>)>> =
        clusters.iter().enumerate().map(route_cluster).collect();

    aggregate(instance, parts?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::check_feasibility;
    use crate::oracle::{brute_force_optimum, OracleLimits};
    use crate::test_fixtures::{benchmark_like_instance, tiny_random_instance};

    #[test]
    fn tsp_route_single_vehicle_matches_brute_force() {
        // Four customers around one depot: the polished tour equals
        // the exhaustive optimum over all visit orders.
        let mut inst = tiny_random_instance(4, 1, 21);
        for c in &mut inst.customers {
            c.demand = 10;
        }
        inst.vehicle_classes[1].capacity = 100;
        let customers: Vec<NodeId> = inst.customer_ids().collect();
        let routes = tsp_route(&inst, NodeId(1), &customers).unwrap();
        assert_eq!(routes.len(), 1);
        let got = seq_distance(&inst, &routes[0]);

        let mut best = Dist::MAX;
        let mut perm = customers.clone();
        permute_all(&mut perm, 0, &mut |order| {
            let probe = Route::new_se(&inst, NodeId(1), order.to_vec());
            best = best.min(seq_distance(&inst, &probe));
        });
        assert_eq!(got, best);
    }

    fn permute_all(items: &mut Vec<NodeId>, k: usize, f: &mut impl FnMut(&[NodeId])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute_all(items, k + 1, f);
            items.swap(k, i);
        }
    }

    #[test]
    fn three_customer_cluster_single_route() {
        let mut inst = tiny_random_instance(3, 1, 5);
        for c in &mut inst.customers {
            c.demand = 10;
        }
        let customers: Vec<NodeId> = inst.customer_ids().collect();
        let routes = tsp_route(&inst, NodeId(1), &customers).unwrap();
        assert_eq!(routes.len(), 1);
        assert_eq!(routes[0].visits.len(), 3);
    }

    #[test]
    fn over_capacity_cluster_splits() {
        let inst = crate::test_fixtures::t1_instance();
        // Demands 20 each against capacity 25.
        let routes = tsp_route(&inst, NodeId(1), &[NodeId(3), NodeId(4)]).unwrap();
        assert!(routes.len() >= 2);
    }

    #[test]
    fn aggregate_partitions_customers() {
        let inst = benchmark_like_instance(20, 5, 3);
        let config = Config::default();
        let sol = decompose_start(&inst, &config).unwrap();
        assert!(check_feasibility(&inst, &sol, &config).is_empty());
        assert!(sol.open_depots.len() >= 2 || inst.num_depots() == 1);
    }

    #[test]
    fn decomposition_is_deterministic_and_feasible() {
        let inst = benchmark_like_instance(20, 5, 4);
        let mut config = Config::default();
        config.max_iter = 500;
        let a = decompose_solve(&inst, &config).unwrap();
        let b = decompose_solve(&inst, &config).unwrap();
        assert_eq!(a.best_cost, b.best_cost);
        assert_eq!(a.best, b.best);
        assert!(check_feasibility(&inst, &a.best, &config).is_empty());
        assert_eq!(a.iterations, 50);
    }

    #[test]
    fn decomposition_reaches_oracle_on_tiny_instance() {
        let inst = tiny_random_instance(5, 2, 6);
        let mut config = Config::default();
        config.max_iter = 20_000;
        let r = decompose_solve(&inst, &config).unwrap();
        let (opt, _) = brute_force_optimum(&inst, &config, OracleLimits::default()).unwrap();
        assert!(r.best_cost as f64 <= opt as f64 * 1.005, "{} vs {}", r.best_cost, opt);
    }
}
