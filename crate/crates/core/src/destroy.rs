//! Destroy operators: each maps a feasible solution to a partial
//! solution plus the list of removed customers. Emptied routes are
//! dropped and depots left without SE routes are closed, except depots
//! pinned open by the partial operators.

use crate::model::*;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// SE routes of one removed depot, kept so the merge repair can
/// reattach the depot wholesale.
#[derive(Debug, Clone, PartialEq)]
pub struct DepotSubtree {
    pub depot: NodeId,
    pub se_routes: Vec<Route>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RemovalResult {
    pub partial: Solution,
    /// Removed customers in removal order.
    pub removed: Vec<NodeId>,
    pub removed_depots: Vec<NodeId>,
    /// Whole-depot subtrees for the merge repair.
    pub detached: Vec<DepotSubtree>,
    /// Swap tags: customer -> depot it should preferably move to.
    pub swap_preferences: BTreeMap<NodeId, NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DestroyOp {
    Random,
    RandomString,
    Furthest,
    MicroDepot,
    PartialMicroDepot,
    PartialSwap,
    FeRoute,
    SeRoute,
}

impl DestroyOp {
    pub const ALL: [DestroyOp; 8] = [
        DestroyOp::Random,
        DestroyOp::RandomString,
        DestroyOp::Furthest,
        DestroyOp::MicroDepot,
        DestroyOp::PartialMicroDepot,
        DestroyOp::PartialSwap,
        DestroyOp::FeRoute,
        DestroyOp::SeRoute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DestroyOp::Random => "random-removal",
            DestroyOp::RandomString => "random-string-removal",
            DestroyOp::Furthest => "furthest-removal",
            DestroyOp::MicroDepot => "microdepot-removal",
            DestroyOp::PartialMicroDepot => "partial-microdepot-removal",
            DestroyOp::PartialSwap => "partial-microdepot-swap",
            DestroyOp::FeRoute => "fe-route-removal",
            DestroyOp::SeRoute => "se-route-removal",
        }
    }
}

/// Destroy operators active under a configuration.
pub fn enabled_destroy_ops(config: &Config) -> Vec<DestroyOp> {
    DestroyOp::ALL
        .into_iter()
        .filter(|op| {
            *op != DestroyOp::PartialMicroDepot || config.enable_partial_microdepot_removal
        })
        .collect()
}

pub fn apply<R: Rng>(
    op: DestroyOp,
    instance: &Instance,
    solution: &Solution,
    config: &Config,
    rng: &mut R,
) -> RemovalResult {
    match op {
        DestroyOp::Random => random_removal(instance, solution, config, rng),
        DestroyOp::RandomString => random_string_removal(instance, solution, rng),
        DestroyOp::Furthest => furthest_removal(instance, solution, rng),
        DestroyOp::MicroDepot => microdepot_removal(instance, solution, rng),
        DestroyOp::PartialMicroDepot => partial_microdepot_removal(instance, solution, rng),
        DestroyOp::PartialSwap => partial_microdepot_swap(instance, solution, rng),
        DestroyOp::FeRoute => fe_route_removal(instance, solution),
        DestroyOp::SeRoute => se_route_removal(instance, solution),
    }
}

/// Removes a victim set from every route, drops emptied routes and
/// closes depots left without SE routes unless pinned.
fn strip_customers(
    instance: &Instance,
    partial: &mut Solution,
    victims: &BTreeSet<NodeId>,
    keep_open: &BTreeSet<NodeId>,
) {
    for r in &mut partial.se_routes {
        r.visits.retain(|v| !victims.contains(v));
    }
    partial.se_routes.retain(|r| !r.visits.is_empty());
    let route_counts = partial.depot_route_counts(instance);
    partial
        .open_depots
        .retain(|&t| route_counts[t.idx()] > 0 || keep_open.contains(&t));
    let open = partial.open_depots.clone();
    for r in &mut partial.fe_routes {
        r.visits
            .retain(|&v| !victims.contains(&v) && (!instance.is_depot(v) || open.contains(&v)));
    }
    partial.fe_routes.retain(|r| !r.visits.is_empty());
    partial.invalidate_cost();
}

fn finish(instance: &Instance, mut result: RemovalResult) -> RemovalResult {
    result.partial.cost_cache = Some(crate::eval::total_cost(instance, &result.partial));
    result
}

/// Uniformly removes q customers, q drawn from 1 to the destroy
/// bound.
fn random_removal<R: Rng>(
    instance: &Instance,
    solution: &Solution,
    config: &Config,
    rng: &mut R,
) -> RemovalResult {
    let n = instance.num_customers();
    if n == 0 {
        return RemovalResult { partial: solution.clone(), ..Default::default() };
    }
    let bound = ((config.destroy_bound * n as f64).ceil() as usize).clamp(1, n);
    let q = rng.random_range(1..=bound);
    let mut pool: Vec<NodeId> = instance.customer_ids().collect();
    let mut removed = Vec::with_capacity(q);
    for _ in 0..q {
        let i = rng.random_range(0..pool.len());
        removed.push(pool.swap_remove(i));
    }
    let victims: BTreeSet<NodeId> = removed.iter().copied().collect();
    let mut partial = solution.clone();
    strip_customers(instance, &mut partial, &victims, &BTreeSet::new());
    finish(instance, RemovalResult { partial, removed, ..Default::default() })
}

/// Removes a contiguous string from one random SE route.
fn random_string_removal<R: Rng>(
    instance: &Instance,
    solution: &Solution,
    rng: &mut R,
) -> RemovalResult {
    if solution.se_routes.is_empty() {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    let ri = rng.random_range(0..solution.se_routes.len());
    let len = solution.se_routes[ri].visits.len();
    let q = rng.random_range(1..=len);
    let start = rng.random_range(0..=len - q);
    let removed: Vec<NodeId> = solution.se_routes[ri].visits[start..start + q].to_vec();
    let victims: BTreeSet<NodeId> = removed.iter().copied().collect();
    let mut partial = solution.clone();
    strip_customers(instance, &mut partial, &victims, &BTreeSet::new());
    finish(instance, RemovalResult { partial, removed, ..Default::default() })
}

/// Removes the q customers of one random SE route that lie farthest
/// from its micro-depot.
fn furthest_removal<R: Rng>(
    instance: &Instance,
    solution: &Solution,
    rng: &mut R,
) -> RemovalResult {
    if solution.se_routes.is_empty() {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    let ri = rng.random_range(0..solution.se_routes.len());
    let route = &solution.se_routes[ri];
    let q = rng.random_range(1..=route.visits.len());
    let mut by_distance: Vec<NodeId> = route.visits.clone();
    by_distance.sort_by_key(|&c| (std::cmp::Reverse(instance.dist_se.get(route.home, c)), c));
    let removed: Vec<NodeId> = by_distance.into_iter().take(q).collect();
    let victims: BTreeSet<NodeId> = removed.iter().copied().collect();
    let mut partial = solution.clone();
    strip_customers(instance, &mut partial, &victims, &BTreeSet::new());
    finish(instance, RemovalResult { partial, removed, ..Default::default() })
}

/// Closes one random open micro-depot, removing its SE routes and
/// customers; the FE visit disappears with it.
fn microdepot_removal<R: Rng>(
    instance: &Instance,
    solution: &Solution,
    rng: &mut R,
) -> RemovalResult {
    let open: Vec<NodeId> = solution.open_depots.iter().copied().collect();
    if open.is_empty() {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    let t = open[rng.random_range(0..open.len())];
    detach_depots(instance, solution, &[t])
}

fn detach_depots(instance: &Instance, solution: &Solution, depots: &[NodeId]) -> RemovalResult {
    let mut removed = Vec::new();
    let mut detached = Vec::new();
    let mut partial = solution.clone();
    for &t in depots {
        let routes: Vec<Route> =
            partial.se_routes.iter().filter(|r| r.home == t).cloned().collect();
        removed.extend(routes.iter().flat_map(|r| r.visits.iter().copied()));
        detached.push(DepotSubtree { depot: t, se_routes: routes });
        partial.se_routes.retain(|r| r.home != t);
        partial.open_depots.remove(&t);
    }
    let open = partial.open_depots.clone();
    for r in &mut partial.fe_routes {
        r.visits.retain(|&v| !instance.is_depot(v) || open.contains(&v));
    }
    partial.fe_routes.retain(|r| !r.visits.is_empty());
    partial.invalidate_cost();
    finish(
        instance,
        RemovalResult {
            partial,
            removed,
            removed_depots: depots.to_vec(),
            detached,
            ..Default::default()
        },
    )
}

/// Picks an open and a closed depot and removes the q customers of
/// the open depot closest to the closed one. The open depot stays
/// open for the repair phase.
fn partial_microdepot_removal<R: Rng>(
    instance: &Instance,
    solution: &Solution,
    rng: &mut R,
) -> RemovalResult {
    let open: Vec<NodeId> = solution.open_depots.iter().copied().collect();
    let closed: Vec<NodeId> =
        instance.depot_ids().filter(|t| !solution.open_depots.contains(t)).collect();
    if open.is_empty() || closed.is_empty() {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    let t_open = open[rng.random_range(0..open.len())];
    let t_closed = closed[rng.random_range(0..closed.len())];
    let mut assigned: Vec<NodeId> = solution
        .se_routes
        .iter()
        .filter(|r| r.home == t_open)
        .flat_map(|r| r.visits.iter().copied())
        .collect();
    if assigned.is_empty() {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    assigned.sort_by_key(|&c| (instance.dist_se.get(t_closed, c), c));
    let q = rng.random_range(1..=assigned.len());
    let removed: Vec<NodeId> = assigned.into_iter().take(q).collect();
    let victims: BTreeSet<NodeId> = removed.iter().copied().collect();
    let keep: BTreeSet<NodeId> = [t_open].into_iter().collect();
    let mut partial = solution.clone();
    strip_customers(instance, &mut partial, &victims, &keep);
    finish(instance, RemovalResult { partial, removed, ..Default::default() })
}

/// Removes random customers from two open depots and tags each for
/// insertion at the opposite depot.
fn partial_microdepot_swap<R: Rng>(
    instance: &Instance,
    solution: &Solution,
    rng: &mut R,
) -> RemovalResult {
    let open: Vec<NodeId> = solution.open_depots.iter().copied().collect();
    if open.len() < 2 {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    let i = rng.random_range(0..open.len());
    let mut j = rng.random_range(0..open.len() - 1);
    if j >= i {
        j += 1;
    }
    let (t1, t2) = (open[i], open[j]);
    let mut removed = Vec::new();
    let mut prefs = BTreeMap::new();
    for (from, to) in [(t1, t2), (t2, t1)] {
        let mut assigned: Vec<NodeId> = solution
            .se_routes
            .iter()
            .filter(|r| r.home == from)
            .flat_map(|r| r.visits.iter().copied())
            .collect();
        if assigned.is_empty() {
            continue;
        }
        let q = rng.random_range(1..=assigned.len());
        for _ in 0..q {
            let k = rng.random_range(0..assigned.len());
            let c = assigned.swap_remove(k);
            removed.push(c);
            prefs.insert(c, to);
        }
    }
    let victims: BTreeSet<NodeId> = removed.iter().copied().collect();
    let keep: BTreeSet<NodeId> = [t1, t2].into_iter().collect();
    let mut partial = solution.clone();
    strip_customers(instance, &mut partial, &victims, &keep);
    finish(
        instance,
        RemovalResult { partial, removed, swap_preferences: prefs, ..Default::default() },
    )
}

fn fe_route_load(instance: &Instance, solution: &Solution, route: &Route) -> Load {
    let depot_loads = solution.depot_se_loads(instance);
    route
        .visits
        .iter()
        .map(|&v| if instance.is_depot(v) { depot_loads[v.idx()] } else { instance.demand(v) })
        .sum()
}

/// Removes the FE route with minimum total load together with its
/// micro-depots, their SE customers and its direct customers.
fn fe_route_removal(instance: &Instance, solution: &Solution) -> RemovalResult {
    if solution.fe_routes.is_empty() {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    let ri = (0..solution.fe_routes.len())
        .min_by_key(|&i| (fe_route_load(instance, solution, &solution.fe_routes[i]), i))
        .unwrap();
    let route = solution.fe_routes[ri].clone();
    let depots: Vec<NodeId> =
        route.visits.iter().copied().filter(|&v| instance.is_depot(v)).collect();
    let direct: Vec<NodeId> =
        route.visits.iter().copied().filter(|&v| instance.is_customer(v)).collect();
    let mut result = detach_depots(instance, solution, &depots);
    // Direct customers of the removed route leave the solution too.
    let victims: BTreeSet<NodeId> = direct.iter().copied().collect();
    for r in &mut result.partial.fe_routes {
        r.visits.retain(|v| !victims.contains(v));
    }
    result.partial.fe_routes.retain(|r| !r.visits.is_empty());
    result.removed.extend(direct);
    finish(instance, result)
}

/// Removes the SE route with minimum load; its depot stays open while
/// other routes remain.
fn se_route_removal(instance: &Instance, solution: &Solution) -> RemovalResult {
    if solution.se_routes.is_empty() {
        return finish(instance, RemovalResult { partial: solution.clone(), ..Default::default() });
    }
    let ri = (0..solution.se_routes.len())
        .min_by_key(|&i| {
            let load: Load =
                solution.se_routes[i].visits.iter().map(|&v| instance.demand(v)).sum();
            (load, i)
        })
        .unwrap();
    let removed = solution.se_routes[ri].visits.clone();
    let victims: BTreeSet<NodeId> = removed.iter().copied().collect();
    let mut partial = solution.clone();
    strip_customers(instance, &mut partial, &victims, &BTreeSet::new());
    finish(instance, RemovalResult { partial, removed, ..Default::default() })
}
