//! Initial solution construction: depot opening and customer
//! assignment (facility-location heuristic or k-means), capacity
//! repair, savings-based SE routes and one FE route per open depot.

use crate::eval::route_stats;
use crate::model::*;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Depot opening decision plus a customer-to-depot map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub open_depots: BTreeSet<NodeId>,
    pub customer_depot: BTreeMap<NodeId, NodeId>,
}

impl Assignment {
    pub fn depot_loads(&self, instance: &Instance) -> Vec<Load> {
        let mut loads = vec![0; instance.num_nodes()];
        for (&c, &t) in &self.customer_depot {
            loads[t.idx()] += instance.demand(c);
        }
        loads
    }

    /// Customers mapped to a depot, ascending by node id.
    pub fn customers_of(&self, depot: NodeId) -> Vec<NodeId> {
        self.customer_depot.iter().filter(|&(_, &t)| t == depot).map(|(&c, _)| c).collect()
    }

    /// Invariant check: every customer mapped, targets open, loads
    /// within depot capacity.
    pub fn violations(&self, instance: &Instance) -> Vec<String> {
        let mut v = Vec::new();
        for c in instance.customer_ids() {
            match self.customer_depot.get(&c) {
                None => v.push(format!("customer {c} unassigned")),
                Some(t) if !self.open_depots.contains(t) => {
                    v.push(format!("customer {c} assigned to closed depot {t}"))
                }
                _ => {}
            }
        }
        let loads = self.depot_loads(instance);
        for &t in &self.open_depots {
            if loads[t.idx()] > instance.depot(t).capacity {
                v.push(format!(
                    "depot {t} load {} exceeds capacity {}",
                    loads[t.idx()],
                    instance.depot(t).capacity
                ));
            }
        }
        v
    }
}

/// Objective of the location subproblem: assignment travel costs plus
/// main-depot link and opening cost per open depot.
pub fn cflp_objective(instance: &Instance, a: &Assignment) -> Money {
    let se_rate = instance.se_class().cost_per_distance;
    let fe_rate = instance.fe_class().cost_per_distance;
    let assign: Money = a
        .customer_depot
        .iter()
        .map(|(&c, &t)| instance.dist_se.get(t, c) * se_rate)
        .sum();
    let open: Money = a
        .open_depots
        .iter()
        .map(|&t| instance.dist_fe.get(NodeId(0), t) * fe_rate + instance.depot(t).opening_cost)
        .sum();
    assign + open
}

/// Capacitated nearest-feasible assignment: regret ordering first,
/// first-fit-decreasing as a packing fallback. Returns `None` when
/// neither strategy places every customer.
fn assign_customers(
    instance: &Instance,
    open: &BTreeSet<NodeId>,
) -> Option<BTreeMap<NodeId, NodeId>> {
    assign_by_regret(instance, open).or_else(|| assign_first_fit(instance, open))
}

fn assign_by_regret(
    instance: &Instance,
    open: &BTreeSet<NodeId>,
) -> Option<BTreeMap<NodeId, NodeId>> {
    let se_rate = instance.se_class().cost_per_distance;
    let mut slack: BTreeMap<NodeId, Load> =
        open.iter().map(|&t| (t, instance.depot(t).capacity)).collect();
    let mut unassigned: Vec<NodeId> = instance.customer_ids().collect();
    let mut out = BTreeMap::new();
    while !unassigned.is_empty() {
        // Regret choice: the customer whose second-cheapest feasible
        // depot is most expensive relative to its cheapest.
        let mut pick: Option<(Money, NodeId, NodeId)> = None; // (regret, customer, depot)
        for &c in &unassigned {
            let d = instance.demand(c);
            let mut best: Option<(Money, NodeId)> = None;
            let mut second: Option<Money> = None;
            for (&t, &s) in &slack {
                if s < d {
                    continue;
                }
                let cost = instance.dist_se.get(t, c) * se_rate;
                match best {
                    None => best = Some((cost, t)),
                    Some((b, _)) if cost < b => {
                        second = Some(b);
                        best = Some((cost, t));
                    }
                    Some(_) => match second {
                        None => second = Some(cost),
                        Some(s2) if cost < s2 => second = Some(cost),
                        _ => {}
                    },
                }
            }
            let (bcost, bdep) = best?;
            let regret = second.map(|s2| s2 - bcost).unwrap_or(Money::MAX / 2);
            if pick.as_ref().map_or(true, |&(r, pc, _)| regret > r || (regret == r && c < pc)) {
                pick = Some((regret, c, bdep));
            }
        }
        let (_, c, t) = pick?;
        *slack.get_mut(&t).unwrap() -= instance.demand(c);
        out.insert(c, t);
        unassigned.retain(|&x| x != c);
    }
    Some(out)
}

fn assign_first_fit(
    instance: &Instance,
    open: &BTreeSet<NodeId>,
) -> Option<BTreeMap<NodeId, NodeId>> {
    let se_rate = instance.se_class().cost_per_distance;
    let mut slack: BTreeMap<NodeId, Load> =
        open.iter().map(|&t| (t, instance.depot(t).capacity)).collect();
    let mut customers: Vec<NodeId> = instance.customer_ids().collect();
    customers.sort_by_key(|&c| (std::cmp::Reverse(instance.demand(c)), c));
    let mut out = BTreeMap::new();
    for c in customers {
        let d = instance.demand(c);
        let t = slack
            .iter()
            .filter(|&(_, &s)| s >= d)
            .min_by_key(|&(&t, _)| (instance.dist_se.get(t, c) * se_rate, t))
            .map(|(&t, _)| t)?;
        *slack.get_mut(&t).unwrap() -= d;
        out.insert(c, t);
    }
    Some(out)
}

/// Exact enumeration for tiny sizes: all open subsets crossed with all
/// capacity-feasible assignments.
fn exact_cflp(instance: &Instance) -> Result<Assignment> {
    let depots: Vec<NodeId> = instance.depot_ids().collect();
    let customers: Vec<NodeId> = instance.customer_ids().collect();
    let mut best: Option<(Money, Assignment)> = None;
    for mask in 1u32..(1 << depots.len()) {
        let open: Vec<NodeId> = depots
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, t)| t)
            .collect();
        let open_cost: Money = open
            .iter()
            .map(|&t| {
                instance.dist_fe.get(NodeId(0), t) * instance.fe_class().cost_per_distance
                    + instance.depot(t).opening_cost
            })
            .sum();
        let bound = best.as_ref().map(|&(b, _)| b).unwrap_or(Money::MAX);
        if open_cost >= bound {
            continue;
        }
        let mut slack: Vec<Load> = open.iter().map(|&t| instance.depot(t).capacity).collect();
        let mut chosen: Vec<usize> = Vec::with_capacity(customers.len());
        dfs_assign(instance, &open, &customers, &mut slack, &mut chosen, open_cost, &mut best);
    }
    best.map(|(_, a)| a)
        .ok_or_else(|| Error::Infeasible("no capacity-feasible assignment exists".into()))
}

fn dfs_assign(
    instance: &Instance,
    open: &[NodeId],
    customers: &[NodeId],
    slack: &mut Vec<Load>,
    chosen: &mut Vec<usize>,
    cost: Money,
    best: &mut Option<(Money, Assignment)>,
) {
    if best.as_ref().is_some_and(|&(b, _)| cost >= b) {
        return;
    }
    let k = chosen.len();
    if k == customers.len() {
        let a = Assignment {
            open_depots: open.iter().copied().collect(),
            customer_depot: customers
                .iter()
                .copied()
                .zip(chosen.iter().map(|&i| open[i]))
                .collect(),
        };
        *best = Some((cost, a));
        return;
    }
    let c = customers[k];
    let se_rate = instance.se_class().cost_per_distance;
    for i in 0..open.len() {
        if slack[i] < instance.demand(c) {
            continue;
        }
        slack[i] -= instance.demand(c);
        chosen.push(i);
        dfs_assign(
            instance,
            open,
            customers,
            slack,
            chosen,
            cost + instance.dist_se.get(open[i], c) * se_rate,
            best,
        );
        chosen.pop();
        slack[i] += instance.demand(c);
    }
}

/// Opens depots and assigns customers, minimizing the location
/// subproblem objective. Exact on tiny sizes, greedy ADD with
/// reassignment local search otherwise.
pub fn solve_cflp(instance: &Instance) -> Result<Assignment> {
    if instance.total_depot_capacity() < instance.total_demand() {
        return Err(Error::Infeasible(format!(
            "total depot capacity {} below total demand {}",
            instance.total_depot_capacity(),
            instance.total_demand()
        )));
    }
    if instance.num_customers() <= 10 && instance.num_depots() <= 4 {
        return exact_cflp(instance);
    }

    // Open depots by marginal cost per unit of capacity until some
    // assignment exists.
    let fe_rate = instance.fe_class().cost_per_distance;
    let mut open: BTreeSet<NodeId> = BTreeSet::new();
    let mut map = loop {
        if let Some(map) = assign_customers(instance, &open) {
            break map;
        }
        let next = instance
            .depot_ids()
            .filter(|t| !open.contains(t))
            .min_by(|&a, &b| {
                let ka = (instance.dist_fe.get(NodeId(0), a) * fe_rate
                    + instance.depot(a).opening_cost) as f64
                    / instance.depot(a).capacity as f64;
                let kb = (instance.dist_fe.get(NodeId(0), b) * fe_rate
                    + instance.depot(b).opening_cost) as f64
                    / instance.depot(b).capacity as f64;
                ka.partial_cmp(&kb).unwrap().then(a.cmp(&b))
            })
            .ok_or_else(|| {
                Error::Infeasible("no depot subset admits a feasible assignment".into())
            })?;
        open.insert(next);
    };

    // Greedy ADD: keep opening the depot that lowers total cost most.
    let mut cost = cflp_objective(
        instance,
        &Assignment { open_depots: open.clone(), customer_depot: map.clone() },
    );
    loop {
        let mut best_step: Option<(Money, NodeId, BTreeMap<NodeId, NodeId>)> = None;
        for t in instance.depot_ids() {
            if open.contains(&t) {
                continue;
            }
            let mut candidate = open.clone();
            candidate.insert(t);
            if let Some(m) = assign_customers(instance, &candidate) {
                let a = Assignment { open_depots: candidate, customer_depot: m };
                let c = cflp_objective(instance, &a);
                if best_step.as_ref().map_or(true, |&(b, _, _)| c < b) {
                    best_step = Some((c, t, a.customer_depot));
                }
            }
        }
        match best_step {
            Some((c, t, m)) if c < cost => {
                open.insert(t);
                map = m;
                cost = c;
            }
            _ => break,
        }
    }
    let mut assignment = Assignment { open_depots: open, customer_depot: map };

    reassignment_search(instance, &mut assignment);

    // Never worse than opening everything and assigning nearest.
    let all_open: BTreeSet<NodeId> = instance.depot_ids().collect();
    if let Some(map) = assign_customers(instance, &all_open) {
        let alt = Assignment { open_depots: all_open, customer_depot: map };
        if cflp_objective(instance, &alt) < cflp_objective(instance, &assignment) {
            assignment = alt;
        }
    }
    debug_assert!(assignment.violations(instance).is_empty());
    Ok(assignment)
}

/// Single-customer reassignment descent; also drops depots that end
/// up serving nobody.
fn reassignment_search(instance: &Instance, a: &mut Assignment) {
    let se_rate = instance.se_class().cost_per_distance;
    let mut loads = a.depot_loads(instance);
    loop {
        let mut improved = false;
        let customers: Vec<NodeId> = a.customer_depot.keys().copied().collect();
        for c in customers {
            let from = a.customer_depot[&c];
            let d = instance.demand(c);
            let current = instance.dist_se.get(from, c) * se_rate;
            let mut best: Option<(Money, NodeId)> = None;
            for &t in &a.open_depots {
                if t == from || loads[t.idx()] + d > instance.depot(t).capacity {
                    continue;
                }
                let cost = instance.dist_se.get(t, c) * se_rate;
                if cost < current && best.as_ref().map_or(true, |&(b, _)| cost < b) {
                    best = Some((cost, t));
                }
            }
            if let Some((_, t)) = best {
                loads[from.idx()] -= d;
                loads[t.idx()] += d;
                a.customer_depot.insert(c, t);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    a.open_depots.retain(|&t| loads[t.idx()] > 0);
}

/// Default cluster count: total demand over the largest depot
/// capacity, clamped to the number of depots.
pub fn default_kmeans_k(instance: &Instance) -> usize {
    let cap = instance.micro_depots.iter().map(|d| d.capacity).max().unwrap_or(1);
    let k = (instance.total_demand() + cap - 1) / cap;
    (k as usize).clamp(1, instance.num_depots())
}

/// Clusters customer locations with Lloyd iterations, then maps each
/// cluster to the nearest unused depot and repairs capacity.
pub fn kmeans_assign(instance: &Instance, k: usize, seed: u64) -> Result<Assignment> {
    if k == 0 || k > instance.num_depots() {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside 1..={} depots",
            instance.num_depots()
        )));
    }
    let customers: Vec<NodeId> = instance.customer_ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<(f64, f64)> = Vec::with_capacity(k);
    let mut picked = BTreeSet::new();
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
            for (li, &ctr) in centroids.iter().enumerate() {
                let d = (p.0 - ctr.0).powi(2) + (p.1 - ctr.1).powi(2);
                if d < best.0 {
                    best = (d, li);
                }
            }
            if labels[ci] != best.1 {
                labels[ci] = best.1;
                changed = true;
            }
        }
        for li in 0..centroids.len() {
            let members: Vec<(f64, f64)> = customers
                .iter()
                .enumerate()
                .filter(|&(ci, _)| labels[ci] == li)
                .map(|(_, &c)| instance.coords[c.idx()])
                .collect();
            if !members.is_empty() {
                let n = members.len() as f64;
                centroids[li] = (
                    members.iter().map(|p| p.0).sum::<f64>() / n,
                    members.iter().map(|p| p.1).sum::<f64>() / n,
                );
            }
        }
        if !changed {
            break;
        }
    }

    let mut used = BTreeSet::new();
    let mut cluster_depot = vec![None; centroids.len()];
    for li in 0..centroids.len() {
        if !labels.contains(&li) {
            continue;
        }
        let ctr = centroids[li];
        let mut best: Option<(f64, NodeId)> = None;
        for t in instance.depot_ids() {
            if used.contains(&t) {
                continue;
            }
            let p = instance.coords[t.idx()];
            let d = (p.0 - ctr.0).powi(2) + (p.1 - ctr.1).powi(2);
            if best.as_ref().map_or(true, |&(b, _)| d < b) {
                best = Some((d, t));
            }
        }
        let (_, t) =
            best.ok_or_else(|| Error::Infeasible("more clusters than available depots".into()))?;
        used.insert(t);
        cluster_depot[li] = Some(t);
    }

    let customer_depot: BTreeMap<NodeId, NodeId> = customers
        .iter()
        .enumerate()
        .map(|(ci, &c)| (c, cluster_depot[labels[ci]].unwrap()))
        .collect();
    let assignment = Assignment { open_depots: used, customer_depot };
    repair_capacity(instance, assignment)
}

/// Moves the farthest customers of overloaded depots to open depots
/// with slack, opening the nearest additional depot when nothing has
/// room.
pub fn repair_capacity(instance: &Instance, mut a: Assignment) -> Result<Assignment> {
    let mut loads = a.depot_loads(instance);
    loop {
        let over = a
            .open_depots
            .iter()
            .copied()
            .find(|&t| loads[t.idx()] > instance.depot(t).capacity);
        let Some(t) = over else { break };
        // Farthest assigned customer of the overloaded depot.
        let c = a
            .customers_of(t)
            .into_iter()
            .max_by_key(|&c| (instance.dist_se.get(t, c), c))
            .expect("overloaded depot has customers");
        let d = instance.demand(c);
        let target = a
            .open_depots
            .iter()
            .copied()
            .filter(|&x| x != t && loads[x.idx()] + d <= instance.depot(x).capacity)
            .min_by_key(|&x| (instance.dist_se.get(x, c), x));
        let target = match target {
            Some(x) => x,
            None => {
                let fresh = instance
                    .depot_ids()
                    .filter(|x| !a.open_depots.contains(x))
                    .filter(|&x| d <= instance.depot(x).capacity)
                    .min_by_key(|&x| (instance.dist_se.get(x, c), x))
                    .ok_or_else(|| {
                        Error::Infeasible(format!(
                            "cannot repair capacity: no depot can take customer {c}"
                        ))
                    })?;
                a.open_depots.insert(fresh);
                fresh
            }
        };
        loads[t.idx()] -= d;
        loads[target.idx()] += d;
        a.customer_depot.insert(c, target);
    }
    Ok(a)
}

/// Parallel savings construction of SE routes for one depot.
pub fn clarke_wright(
    instance: &Instance,
    depot: NodeId,
    customers: &[NodeId],
) -> Result<Vec<Route>> {
    let cap = instance.se_class().capacity;
    let fixed = instance.se_class().fixed_cost;
    for &c in customers {
        if instance.demand(c) > cap {
            return Err(Error::Infeasible(format!(
                "customer {c} demand {} exceeds vehicle capacity {cap}",
                instance.demand(c)
            )));
        }
    }
    if customers.is_empty() {
        return Ok(Vec::new());
    }

    let mut routes: Vec<Option<Vec<NodeId>>> = customers.iter().map(|&c| Some(vec![c])).collect();
    let mut route_of: BTreeMap<NodeId, usize> =
        customers.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut loads: Vec<Load> = customers.iter().map(|&c| instance.demand(c)).collect();

    let mut savings: Vec<(Money, NodeId, NodeId)> = Vec::new();
    for (ai, &i) in customers.iter().enumerate() {
        for &j in customers.iter().skip(ai + 1) {
            let s = instance.dist_se.get(depot, i) + instance.dist_se.get(depot, j)
                - instance.dist_se.get(i, j);
            // A merge also retires one vehicle, so its fixed cost
            // counts towards the saving.
            if s + fixed > 0 {
                savings.push((s, i, j));
            }
        }
    }
    savings.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    for (_, i, j) in savings {
        let (ri, rj) = (route_of[&i], route_of[&j]);
        if ri == rj {
            continue;
        }
        if loads[ri] + loads[rj] > cap {
            continue;
        }
        let (a, b) = (routes[ri].as_ref().unwrap(), routes[rj].as_ref().unwrap());
        // Merges join route ends only: i must terminate the left part
        // and j lead the right part (reversing single-ended routes).
        let i_first = *a.first().unwrap() == i;
        let i_last = *a.last().unwrap() == i;
        let j_first = *b.first().unwrap() == j;
        let j_last = *b.last().unwrap() == j;
        if !(i_first || i_last) || !(j_first || j_last) {
            continue;
        }
        let mut left = a.clone();
        if i_first && !i_last {
            left.reverse();
        }
        let mut right = b.clone();
        if j_last && !j_first {
            right.reverse();
        }
        left.extend_from_slice(&right);
        let candidate = Route::new_se(instance, depot, left);
        if !route_stats(instance, &candidate, None).tw_feasible {
            continue;
        }
        loads[ri] += loads[rj];
        for &c in routes[rj].as_ref().unwrap() {
            route_of.insert(c, ri);
        }
        routes[ri] = Some(candidate.visits);
        routes[rj] = None;
    }

    Ok(routes
        .into_iter()
        .flatten()
        .map(|visits| Route::new_se(instance, depot, visits))
        .collect())
}

/// One FE route per open depot, then direct customers by cheapest
/// feasible insertion (new FE routes as a fallback).
pub fn build_fe_routes(
    instance: &Instance,
    open_depots: &BTreeSet<NodeId>,
    depot_loads: &[Load],
    direct: &[NodeId],
) -> Result<Vec<Route>> {
    let cap = instance.fe_class().capacity;
    let rate = instance.fe_class().cost_per_distance;
    let mut routes: Vec<Route> = Vec::new();
    let mut loads: Vec<Load> = Vec::new();
    for &t in open_depots {
        if depot_loads[t.idx()] > cap {
            return Err(Error::Infeasible(format!(
                "depot {t} demand {} exceeds fe vehicle capacity {cap}",
                depot_loads[t.idx()]
            )));
        }
        routes.push(Route::new_fe(instance, vec![t]));
        loads.push(depot_loads[t.idx()]);
    }
    for &c in direct {
        let d = instance.demand(c);
        let mut best: Option<(Money, usize, usize)> = None; // (delta, route, pos)
        for (ri, r) in routes.iter().enumerate() {
            if loads[ri] + d > cap {
                continue;
            }
            for pos in 0..=r.visits.len() {
                let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                let next = if pos == r.visits.len() { r.home } else { r.visits[pos] };
                let delta = (instance.dist_fe.get(prev, c) + instance.dist_fe.get(c, next)
                    - instance.dist_fe.get(prev, next))
                    * rate;
                if best.as_ref().map_or(true, |&(b, _, _)| delta < b) {
                    let mut visits = r.visits.clone();
                    visits.insert(pos, c);
                    let cand = Route::new_fe(instance, visits);
                    if route_stats(instance, &cand, Some(depot_loads)).tw_feasible {
                        best = Some((delta, ri, pos));
                    }
                }
            }
        }
        match best {
            Some((_, ri, pos)) => {
                routes[ri].visits.insert(pos, c);
                loads[ri] += d;
            }
            None => {
                if d > cap {
                    return Err(Error::Infeasible(format!(
                        "customer {c} demand {d} exceeds fe vehicle capacity {cap}"
                    )));
                }
                routes.push(Route::new_fe(instance, vec![c]));
                loads.push(d);
            }
        }
    }
    Ok(routes)
}

/// Two-step construction: open depots and assign customers, then SE
/// routes by savings and one FE route per depot. Construction is
/// always two-echelon; direct shipment enters through the search.
pub fn initial_solution(instance: &Instance, config: &Config) -> Result<Solution> {
    let assignment = match config.init_method {
        InitMethod::Cflp => solve_cflp(instance)?,
        InitMethod::KMeans => kmeans_assign(instance, default_kmeans_k(instance), config.rng_seed)?,
    };
    let mut sol = Solution::empty();
    for &t in &assignment.open_depots {
        let customers = assignment.customers_of(t);
        if customers.is_empty() {
            continue;
        }
        sol.open_depots.insert(t);
        sol.se_routes.extend(clarke_wright(instance, t, &customers)?);
    }
    let depot_loads = sol.depot_se_loads(instance);
    sol.fe_routes = build_fe_routes(instance, &sol.open_depots, &depot_loads, &[])?;
    sol.cost_cache = Some(crate::eval::total_cost(instance, &sol));
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::check_feasibility;
    use crate::test_fixtures::{benchmark_like_instance, t1_instance, tiny_random_instance};

    #[test]
    fn t1_cflp_opens_both_depots_with_nearest_assignment() {
        let inst = t1_instance();
        let a = solve_cflp(&inst).unwrap();
        assert_eq!(
            a.open_depots.iter().copied().collect::<Vec<_>>(),
            vec![NodeId(1), NodeId(2)]
        );
        assert_eq!(a.customer_depot[&NodeId(3)], NodeId(1));
        assert_eq!(a.customer_depot[&NodeId(4)], NodeId(1));
        assert_eq!(a.customer_depot[&NodeId(5)], NodeId(2));
        assert_eq!(a.customer_depot[&NodeId(6)], NodeId(2));
    }

    #[test]
    fn single_depot_forced_open() {
        let inst = tiny_random_instance(5, 1, 17);
        let a = solve_cflp(&inst).unwrap();
        assert_eq!(a.open_depots.iter().copied().collect::<Vec<_>>(), vec![NodeId(1)]);
        assert_eq!(a.customer_depot.len(), 5);
        assert!(a.violations(&inst).is_empty());
    }

    #[test]
    fn cflp_rejects_demand_over_capacity() {
        let mut inst = t1_instance();
        for d in &mut inst.micro_depots {
            d.capacity = 30;
        }
        match solve_cflp(&inst) {
            Err(Error::Infeasible(_)) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn cflp_not_worse_than_all_open_nearest() {
        for seed in 0..5 {
            let inst = benchmark_like_instance(20, 5, seed);
            let a = solve_cflp(&inst).unwrap();
            let all: BTreeSet<NodeId> = inst.depot_ids().collect();
            let nearest = Assignment {
                customer_depot: super::assign_customers(&inst, &all).unwrap(),
                open_depots: all,
            };
            assert!(cflp_objective(&inst, &a) <= cflp_objective(&inst, &nearest));
        }
    }

    #[test]
    fn kmeans_on_t1_matches_hand_clustering() {
        let inst = t1_instance();
        let a = kmeans_assign(&inst, 2, 99).unwrap();
        assert_eq!(a.customer_depot[&NodeId(3)], NodeId(1));
        assert_eq!(a.customer_depot[&NodeId(4)], NodeId(1));
        assert_eq!(a.customer_depot[&NodeId(5)], NodeId(2));
        assert_eq!(a.customer_depot[&NodeId(6)], NodeId(2));
    }

    #[test]
    fn kmeans_single_cluster_and_determinism() {
        let inst = tiny_random_instance(6, 2, 3);
        let a = kmeans_assign(&inst, 1, 5).unwrap();
        assert!(a.violations(&inst).is_empty());
        let b = kmeans_assign(&inst, 1, 5).unwrap();
        assert_eq!(a, b);
        let full = kmeans_assign(&inst, 2, 5).unwrap();
        assert!(full.violations(&inst).is_empty());
    }

    #[test]
    fn repair_moves_farthest_customer() {
        let inst = t1_instance();
        // Overload A with three customers; its farthest is c3 at x=32.
        let mut map = BTreeMap::new();
        map.insert(NodeId(3), NodeId(1));
        map.insert(NodeId(4), NodeId(1));
        map.insert(NodeId(5), NodeId(1));
        map.insert(NodeId(6), NodeId(2));
        let a = Assignment {
            open_depots: [NodeId(1), NodeId(2)].into_iter().collect(),
            customer_depot: map,
        };
        let fixed = repair_capacity(&inst, a).unwrap();
        assert!(fixed.violations(&inst).is_empty());
        assert_eq!(fixed.customer_depot[&NodeId(5)], NodeId(2));
        // Already-feasible assignments pass through unchanged.
        let again = repair_capacity(&inst, fixed.clone()).unwrap();
        assert_eq!(again, fixed);
    }

    #[test]
    fn repair_errors_when_everything_is_full() {
        let mut inst = t1_instance();
        for d in &mut inst.micro_depots {
            d.capacity = 35;
        }
        let mut map = BTreeMap::new();
        map.insert(NodeId(3), NodeId(1));
        map.insert(NodeId(4), NodeId(1));
        map.insert(NodeId(5), NodeId(2));
        map.insert(NodeId(6), NodeId(2));
        let a = Assignment {
            open_depots: [NodeId(1), NodeId(2)].into_iter().collect(),
            customer_depot: map,
        };
        assert!(repair_capacity(&inst, a).is_err());
    }

    #[test]
    fn clarke_wright_merges_when_profitable() {
        let inst = tiny_random_instance(2, 1, 11);
        let customers: Vec<NodeId> = inst.customer_ids().collect();
        let routes = clarke_wright(&inst, NodeId(1), &customers).unwrap();
        // Demands at most 20 each against capacity 70: one route.
        assert_eq!(routes.len(), 1);
        assert_eq!(routes[0].visits.len(), 2);
    }

    #[test]
    fn clarke_wright_respects_capacity() {
        let inst = t1_instance();
        // Combined demand 40 exceeds SE capacity 25.
        let routes = clarke_wright(&inst, NodeId(1), &[NodeId(3), NodeId(4)]).unwrap();
        assert_eq!(routes.len(), 2);
        let empty = clarke_wright(&inst, NodeId(1), &[]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn clarke_wright_rejects_oversized_customer() {
        let mut inst = t1_instance();
        inst.customers[0].demand = 26;
        match clarke_wright(&inst, NodeId(1), &[NodeId(3)]) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains('3'), "{msg}"),
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn fe_routes_one_per_depot() {
        let inst = t1_instance();
        let open: BTreeSet<NodeId> = [NodeId(1), NodeId(2)].into_iter().collect();
        let mut loads = vec![0i64; inst.num_nodes()];
        loads[1] = 40;
        loads[2] = 40;
        let routes = build_fe_routes(&inst, &open, &loads, &[]).unwrap();
        assert_eq!(routes.len(), 2);
        assert!(routes.iter().all(|r| r.visits.len() == 1));
        let cost: Money = routes
            .iter()
            .map(|r| crate::eval::evaluate_route(&inst, r, Some(&loads)).1)
            .sum();
        assert_eq!(cost, 2 * 2000 + 2 * 6000);
    }

    #[test]
    fn initial_solution_is_feasible_and_deterministic() {
        for seed in [1, 2] {
            let inst = benchmark_like_instance(20, 5, seed);
            let mut config = Config::default();
            config.rng_seed = 7;
            let s1 = initial_solution(&inst, &config).unwrap();
            assert_eq!(check_feasibility(&inst, &s1, &config), Vec::<String>::new());
            let s2 = initial_solution(&inst, &config).unwrap();
            assert_eq!(s1, s2);
            config.init_method = InitMethod::KMeans;
            let s3 = initial_solution(&inst, &config).unwrap();
            assert_eq!(check_feasibility(&inst, &s3, &config), Vec::<String>::new());
        }
    }

    #[test]
    fn one_customer_uses_two_echelons() {
        let inst = tiny_random_instance(1, 1, 2);
        let sol = initial_solution(&inst, &Config::default()).unwrap();
        assert_eq!(sol.fe_routes.len(), 1);
        assert_eq!(sol.se_routes.len(), 1);
        assert!(sol.direct_customers(&inst).is_empty());
    }
}
