//! Exact brute-force solvers for tiny instances and an independent
//! forward-simulation route evaluator. These back the derived expected
//! values in the test suite and never share evaluation code with the
//! search path.

use crate::construct::Assignment;
use crate::model::*;
use crate::pool::MiniNetwork;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Hard caps for the exhaustive solvers.
#[derive(Debug, Clone, Copy)]
pub struct OracleLimits {
    pub max_customers: usize,
    pub max_depots: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_customers: 8, max_depots: 3 }
    }
}

/// Step-by-step route evaluation: explicit arrival, waiting and
/// service times. Independent of the segment-concatenation path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimResult {
    pub load: Load,
    pub distance: Dist,
    pub tw_feasible: bool,
}

/// Simulates a route forward in time, starting service at the home
/// node as early as its window allows and waiting wherever arrival
/// precedes a window. Earliest-start scheduling decides feasibility.
pub fn simulate_route(instance: &Instance, route: &Route, depot_loads: Option<&[Load]>) -> SimResult {
    let e = route.echelon;
    let mut load = 0;
    let mut distance = 0;
    let mut feasible = true;

    let mut home_window = instance.window(route.home);
    if let Some(w) = instance.vehicle_classes[route.vehicle_class].work_window {
        home_window.earliest = home_window.earliest.max(w.earliest);
        home_window.latest = home_window.latest.min(w.latest);
    }
    if home_window.earliest > home_window.latest {
        feasible = false;
    }
    let mut clock = home_window.earliest + instance.service_time(route.home);
    let mut prev = route.home;
    for &v in &route.visits {
        distance += instance.dist(e, prev, v);
        let arrival = clock + instance.travel_time(e, prev, v);
        let w = instance.window(v);
        let begin = arrival.max(w.earliest);
        if begin > w.latest {
            feasible = false;
        }
        clock = begin + instance.service_time(v);
        load += match depot_loads {
            Some(loads) if instance.is_depot(v) => loads[v.idx()],
            _ => instance.demand(v),
        };
        prev = v;
    }
    distance += instance.dist(e, prev, route.home);
    let back = clock + instance.travel_time(e, prev, route.home);
    if back.max(home_window.earliest) > home_window.latest {
        feasible = false;
    }
    SimResult { load, distance, tw_feasible: feasible }
}

/// Minimum-distance visiting order of `nodes` as one round trip from
/// `home`, requiring time-window feasibility. Returns the order with
/// its distance, or `None` when no order is feasible.
fn best_single_route(
    instance: &Instance,
    echelon: Echelon,
    class: usize,
    home: NodeId,
    nodes: &[NodeId],
    depot_loads: Option<&[Load]>,
) -> Option<(Dist, Vec<NodeId>)> {
    let mut best: Option<(Dist, Vec<NodeId>)> = None;
    let mut order: Vec<NodeId> = Vec::with_capacity(nodes.len());
    let mut remaining: Vec<NodeId> = nodes.to_vec();
    permute(
        instance,
        echelon,
        class,
        home,
        &mut order,
        &mut remaining,
        0,
        depot_loads,
        &mut best,
    );
    best
}

#[allow(clippy::too_many_arguments)]
fn permute(
    instance: &Instance,
    echelon: Echelon,
    class: usize,
    home: NodeId,
    order: &mut Vec<NodeId>,
    remaining: &mut Vec<NodeId>,
    partial: Dist,
    depot_loads: Option<&[Load]>,
    best: &mut Option<(Dist, Vec<NodeId>)>,
) {
    if let Some((b, _)) = best {
        if partial >= *b {
            return;
        }
    }
    if remaining.is_empty() {
        let last = *order.last().unwrap();
        let total = partial + instance.dist(echelon, last, home);
        if best.as_ref().map_or(true, |&(b, _)| total < b) {
            let route =
                Route { echelon, vehicle_class: class, home, visits: order.clone() };
            if simulate_route(instance, &route, depot_loads).tw_feasible {
                *best = Some((total, order.clone()));
            }
        }
        return;
    }
    for i in 0..remaining.len() {
        let v = remaining.remove(i);
        let prev = order.last().copied().unwrap_or(home);
        let leg = instance.dist(echelon, prev, v);
        order.push(v);
        permute(instance, echelon, class, home, order, remaining, partial + leg, depot_loads, best);
        order.pop();
        remaining.insert(i, v);
    }
}

/// Optimal multi-route service of a node set from one home: minimum
/// over all partitions into capacity- and window-feasible routes of
/// fixed cost plus travel. Returns per-route visit orders.
struct RoutePlanner<'a> {
    instance: &'a Instance,
    echelon: Echelon,
    class: usize,
    home: NodeId,
    nodes: Vec<NodeId>,
    loads: Vec<Load>,
    depot_loads: Option<&'a [Load]>,
    route_memo: HashMap<u32, Option<(Dist, Vec<NodeId>)>>,
}

impl<'a> RoutePlanner<'a> {
    fn new(
        instance: &'a Instance,
        echelon: Echelon,
        home: NodeId,
        nodes: Vec<NodeId>,
        depot_loads: Option<&'a [Load]>,
    ) -> Self {
        let class = match echelon {
            Echelon::First => instance.fe_class_idx(),
            Echelon::Second => instance.se_class_idx(),
        };
        let loads = nodes
            .iter()
            .map(|&v| match depot_loads {
                Some(l) if instance.is_depot(v) => l[v.idx()],
                _ => instance.demand(v),
            })
            .collect();
        RoutePlanner { instance, echelon, class, home, nodes, loads, depot_loads, route_memo: HashMap::new() }
    }

    fn capacity(&self) -> Load {
        self.instance.vehicle_classes[self.class].capacity
    }

    fn fixed_cost(&self) -> Money {
        self.instance.vehicle_classes[self.class].fixed_cost
    }

    fn rate(&self) -> Money {
        self.instance.vehicle_classes[self.class].cost_per_distance
    }

    fn mask_load(&self, mask: u32) -> Load {
        (0..self.nodes.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.loads[i]).sum()
    }

    fn route_cost(&mut self, mask: u32) -> Option<(Dist, Vec<NodeId>)> {
        if let Some(cached) = self.route_memo.get(&mask) {
            return cached.clone();
        }
        let members: Vec<NodeId> =
            (0..self.nodes.len()).filter(|&i| mask >> i & 1 == 1).map(|i| self.nodes[i]).collect();
        let result = best_single_route(
            self.instance,
            self.echelon,
            self.class,
            self.home,
            &members,
            self.depot_loads,
        );
        self.route_memo.insert(mask, result.clone());
        result
    }

    /// Minimum total cost for each route count; `plans[mask]` maps
    /// route count -> (cost, route masks).
    fn solve(&mut self, max_routes: usize) -> Vec<BTreeMap<usize, (Money, Vec<u32>)>> {
        let full = (1u32 << self.nodes.len()) - 1;
        let mut plans: Vec<BTreeMap<usize, (Money, Vec<u32>)>> =
            vec![BTreeMap::new(); (full + 1) as usize];
        plans[0].insert(0, (0, Vec::new()));
        for mask in 1..=full {
            let low = mask.trailing_zeros();
            // Enumerate submasks that contain the lowest set element,
            // so each partition is counted once.
            let rest = mask & !(1 << low);
            let mut sub = rest;
            loop {
                let candidate = sub | (1 << low);
                if self.mask_load(candidate) <= self.capacity() {
                    if let Some((dist, _)) = self.route_cost(candidate) {
                        let route_money = self.fixed_cost() + dist * self.rate();
                        let remainder = mask & !candidate;
                        let prior: Vec<(usize, Money, Vec<u32>)> = plans[remainder as usize]
                            .iter()
                            .map(|(&r, &(c, ref ms))| (r, c, ms.clone()))
                            .collect();
                        for (r, c, ms) in prior {
                            if r + 1 > max_routes {
                                continue;
                            }
                            let entry = plans[mask as usize].entry(r + 1);
                            let mut masks = ms;
                            masks.push(candidate);
                            let cost = c + route_money;
                            match entry {
                                std::collections::btree_map::Entry::Vacant(v) => {
                                    v.insert((cost, masks));
                                }
                                std::collections::btree_map::Entry::Occupied(mut o) => {
                                    if cost < o.get().0 {
                                        o.insert((cost, masks));
                                    }
                                }
                            }
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        plans
    }
}

/// Exhaustive optimum over depot subsets, customer assignments
/// (including direct shipment) and route orders.
pub fn brute_force_optimum(
    instance: &Instance,
    config: &Config,
    limits: OracleLimits,
) -> Result<(Money, Solution)> {
    let n = instance.num_customers();
    let m = instance.num_depots();
    if n > limits.max_customers || m > limits.max_depots {
        return Err(Error::LimitExceeded(format!(
            "oracle caps: {n} customers > {} or {m} depots > {}",
            limits.max_customers, limits.max_depots
        )));
    }
    let customers: Vec<NodeId> = instance.customer_ids().collect();
    let choices = m + 1; // 0 = direct, k = depot k

    let assignments = AssignmentIter { digits: vec![0; n], choices, done: false };
    let eval = |assign: &[usize]| -> Option<Money> { plan_cost(instance, config, &customers, assign).map(|(c, _)| c) };

    let best = assignments
        .filter(|a| config.allow_direct_shipment || a.iter().all(|&x| x != 0))
        .fold(None::<(Money, Vec<usize>)>, |acc, a| {
            match eval(&a) {
                Some(cost) if acc.as_ref().map_or(true, |&(b, _)| cost < b) => Some((cost, a)),
                _ => acc,
            }
        });

    let (cost, assign) =
        best.ok_or_else(|| Error::Infeasible("no feasible plan at oracle scale".into()))?;
    let (_, solution) = plan_cost(instance, config, &customers, &assign)
        .expect("best assignment re-evaluates feasibly");
    Ok((cost, solution))
}

struct AssignmentIter {
    digits: Vec<usize>,
    choices: usize,
    done: bool,
}

impl Iterator for AssignmentIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < self.choices {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

/// Cost and full solution of one assignment vector, or `None` when it
/// is infeasible.
fn plan_cost(
    instance: &Instance,
    config: &Config,
    customers: &[NodeId],
    assign: &[usize],
) -> Option<(Money, Solution)> {
    let mut depot_customers: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut direct: Vec<NodeId> = Vec::new();
    for (i, &choice) in assign.iter().enumerate() {
        if choice == 0 {
            direct.push(customers[i]);
        } else {
            depot_customers.entry(NodeId(choice as u32)).or_default().push(customers[i]);
        }
    }

    let mut depot_loads = vec![0; instance.num_nodes()];
    for (&t, cs) in &depot_customers {
        let load: Load = cs.iter().map(|&c| instance.demand(c)).sum();
        if load > instance.depot(t).capacity {
            return None;
        }
        depot_loads[t.idx()] = load;
    }

    let mut total: Money = 0;
    let mut se_routes: Vec<Route> = Vec::new();
    let se_cap = instance.se_class().capacity;
    for (&t, cs) in &depot_customers {
        total += instance.depot(t).opening_cost;
        let max_routes = if config.strict_depot_vehicle_capacity {
            (instance.depot(t).capacity / se_cap) as usize
        } else {
            cs.len()
        };
        if max_routes == 0 {
            return None;
        }
        let mut planner = RoutePlanner::new(instance, Echelon::Second, t, cs.clone(), None);
        let plans = planner.solve(max_routes);
        let full = (1u32 << cs.len()) - 1;
        let best = plans[full as usize].iter().map(|(_, &(c, ref ms))| (c, ms.clone())).min()?;
        total += best.0;
        for mask in best.1 {
            let (_, order) = planner.route_cost(mask).expect("chosen mask was feasible");
            se_routes.push(Route::new_se(instance, t, order));
        }
    }

    let mut fe_routes: Vec<Route> = Vec::new();
    let mut stops: Vec<NodeId> = depot_customers.keys().copied().collect();
    stops.extend(direct.iter().copied());
    if !stops.is_empty() {
        let mut planner =
            RoutePlanner::new(instance, Echelon::First, NodeId(0), stops.clone(), Some(&depot_loads));
        let plans = planner.solve(stops.len());
        let full = (1u32 << stops.len()) - 1;
        let best = plans[full as usize].iter().map(|(_, &(c, ref ms))| (c, ms.clone())).min()?;
        total += best.0;
        for mask in best.1 {
            let (_, order) = planner.route_cost(mask).expect("chosen mask was feasible");
            fe_routes.push(Route::new_fe(instance, order));
        }
    }

    let solution = Solution {
        fe_routes,
        se_routes,
        open_depots: depot_customers.keys().copied().collect(),
        cost_cache: Some(total),
    };
    Some((total, solution))
}

/// Exhaustive optimum of the location subproblem: all open subsets
/// crossed with all capacity-feasible assignments.
pub fn brute_force_cflp(instance: &Instance, limits: OracleLimits) -> Result<(Money, Assignment)> {
    let n = instance.num_customers();
    let m = instance.num_depots();
    if n > limits.max_customers || m > limits.max_depots + 1 {
        return Err(Error::LimitExceeded(format!(
            "cflp oracle caps exceeded: {n} customers, {m} depots"
        )));
    }
    let customers: Vec<NodeId> = instance.customer_ids().collect();
    let se_rate = instance.se_class().cost_per_distance;
    let fe_rate = instance.fe_class().cost_per_distance;
    let mut best: Option<(Money, Assignment)> = None;
    let assignments = AssignmentIter { digits: vec![0; n], choices: m, done: false };
    for a in assignments {
        let mut loads = vec![0; m + 1];
        let mut cost: Money = 0;
        let mut ok = true;
        let mut used: BTreeSet<NodeId> = BTreeSet::new();
        for (i, &k) in a.iter().enumerate() {
            let t = NodeId(1 + k as u32);
            loads[k + 1] += instance.demand(customers[i]);
            if loads[k + 1] > instance.depot(t).capacity {
                ok = false;
                break;
            }
            cost += instance.dist_se.get(t, customers[i]) * se_rate;
            used.insert(t);
        }
        if !ok {
            continue;
        }
        for &t in &used {
            cost += instance.dist_fe.get(NodeId(0), t) * fe_rate + instance.depot(t).opening_cost;
        }
        if best.as_ref().map_or(true, |&(b, _)| cost < b) {
            let map: BTreeMap<NodeId, NodeId> = customers
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, NodeId(1 + a[i] as u32)))
                .collect();
            best = Some((cost, Assignment { open_depots: used, customer_depot: map }));
        }
    }
    best.ok_or_else(|| Error::Infeasible("no feasible assignment".into()))
}

/// Exhaustive set cover over all subsets of a small pool, honoring
/// the one-network-per-depot rule.
pub fn brute_force_set_cover(
    networks: &[MiniNetwork],
    customers: &[NodeId],
) -> Result<(Money, Vec<usize>)> {
    if networks.len() > 20 {
        return Err(Error::LimitExceeded(format!(
            "set-cover oracle cap: {} networks > 20",
            networks.len()
        )));
    }
    let mut best: Option<(Money, Vec<usize>)> = None;
    for mask in 1u32..(1 << networks.len()) {
        let chosen: Vec<usize> =
            (0..networks.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let mut depots = BTreeSet::new();
        if !chosen.iter().all(|&i| depots.insert(networks[i].depot)) {
            continue;
        }
        let covered: BTreeSet<NodeId> =
            chosen.iter().flat_map(|&i| networks[i].customers.iter().copied()).collect();
        if !customers.iter().all(|c| covered.contains(c)) {
            continue;
        }
        let cost: Money = chosen.iter().map(|&i| networks[i].cost).sum();
        if best.as_ref().map_or(true, |&(b, _)| cost < b) {
            best = Some((cost, chosen));
        }
    }
    best.ok_or_else(|| Error::Infeasible("pool admits no cover".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{check_feasibility, total_cost};
    use crate::test_fixtures::{t1_instance, tiny_random_instance};

    #[test]
    fn oracle_refuses_oversized_instances() {
        let inst = tiny_random_instance(9, 2, 1);
        match brute_force_optimum(&inst, &Config::default(), OracleLimits::default()) {
            Err(Error::LimitExceeded(_)) => {}
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn one_customer_picks_cheaper_of_direct_and_two_echelon() {
        let inst = tiny_random_instance(1, 1, 4);
        let config = Config::default();
        let (cost, sol) = brute_force_optimum(&inst, &config, OracleLimits::default()).unwrap();
        assert!(check_feasibility(&inst, &sol, &config).is_empty());
        let c = inst.customer_ids().next().unwrap();
        let direct_cost = 2 * inst.dist_fe.get(NodeId(0), c) + inst.fe_class().fixed_cost;
        let t = NodeId(1);
        let two_echelon = 2 * inst.dist_fe.get(NodeId(0), t)
            + inst.fe_class().fixed_cost
            + 2 * inst.dist_se.get(t, c)
            + inst.se_class().fixed_cost
            + inst.depot(t).opening_cost;
        assert_eq!(cost, direct_cost.min(two_echelon));
        assert_eq!(cost, total_cost(&inst, &sol));
    }

    #[test]
    fn t1_optimum_matches_naive_enumeration() {
        let inst = t1_instance();
        let config = Config::default();
        let (cost, sol) = brute_force_optimum(&inst, &config, OracleLimits::default()).unwrap();
        assert!(check_feasibility(&inst, &sol, &config).is_empty());
        assert_eq!(cost, total_cost(&inst, &sol));
        let naive = naive_t1_optimum(&inst);
        assert_eq!(cost, naive);
    }

    /// Second, deliberately naive enumeration for the T1 fixture,
    /// sharing no code with the planner: assignments are base-3
    /// digits, route partitions are enumerated recursively on plain
    /// distance sums.
    fn naive_t1_optimum(instance: &Instance) -> Money {
        let customers: Vec<NodeId> = instance.customer_ids().collect();
        let se_cap = instance.se_class().capacity;
        let fe_cap = instance.fe_class().capacity;
        let mut best = Money::MAX;
        for code in 0..3u32.pow(4) {
            let mut x = code;
            let mut direct: Vec<(NodeId, Load)> = Vec::new();
            let mut at_a: Vec<NodeId> = Vec::new();
            let mut at_b: Vec<NodeId> = Vec::new();
            for &c in &customers {
                match x % 3 {
                    0 => direct.push((c, instance.demand(c))),
                    1 => at_a.push(c),
                    _ => at_b.push(c),
                }
                x /= 3;
            }
            let mut cost: Money = 0;
            let mut feasible = true;
            let mut stops = direct.clone();
            for (t, group) in [(NodeId(1), &at_a), (NodeId(2), &at_b)] {
                if group.is_empty() {
                    continue;
                }
                let load: Load = group.iter().map(|&c| instance.demand(c)).sum();
                if load > instance.depot(t).capacity {
                    feasible = false;
                    break;
                }
                cost += instance.depot(t).opening_cost;
                match naive_routes(&instance.dist_se, t, group, |c| instance.demand(c), se_cap, instance.se_class().fixed_cost) {
                    Some(c) => cost += c,
                    None => {
                        feasible = false;
                        break;
                    }
                }
                stops.push((t, load));
            }
            if !feasible || stops.is_empty() {
                continue;
            }
            let stop_nodes: Vec<NodeId> = stops.iter().map(|&(s, _)| s).collect();
            let loads: BTreeMap<NodeId, Load> = stops.iter().copied().collect();
            match naive_routes(&instance.dist_fe, NodeId(0), &stop_nodes, |s| loads[&s], fe_cap, instance.fe_class().fixed_cost) {
                Some(c) => cost += c,
                None => continue,
            }
            best = best.min(cost);
        }
        best
    }

    /// Cheapest multi-route plan by plain recursion: peel off every
    /// feasible ordered first route, recurse on the rest.
    fn naive_routes(
        dist: &crate::model::Matrix,
        home: NodeId,
        nodes: &[NodeId],
        load_of: impl Fn(NodeId) -> Load + Copy,
        cap: Load,
        fixed: Money,
    ) -> Option<Money> {
        if nodes.is_empty() {
            return Some(0);
        }
        let mut best: Option<Money> = None;
        // First route always contains nodes[0].
        let rest: Vec<NodeId> = nodes[1..].to_vec();
        for mask in 0..(1u32 << rest.len()) {
            let mut members = vec![nodes[0]];
            members.extend((0..rest.len()).filter(|&i| mask >> i & 1 == 1).map(|i| rest[i]));
            let load: Load = members.iter().map(|&v| load_of(v)).sum();
            if load > cap {
                continue;
            }
            let tour = naive_best_order(dist, home, &members)?;
            let remaining: Vec<NodeId> =
                rest.iter().copied().filter(|&v| !members.contains(&v)).collect();
            if let Some(tail) = naive_routes(dist, home, &remaining, load_of, cap, fixed) {
                let total = fixed + tour + tail;
                if best.map_or(true, |b| total < b) {
                    best = Some(total);
                }
            }
        }
        best
    }

    fn naive_best_order(dist: &crate::model::Matrix, home: NodeId, members: &[NodeId]) -> Option<Money> {
        fn go(
            dist: &crate::model::Matrix,
            home: NodeId,
            remaining: &mut Vec<NodeId>,
            last: NodeId,
            acc: Money,
            best: &mut Option<Money>,
        ) {
            if remaining.is_empty() {
                let total = acc + dist.get(last, home);
                if best.map_or(true, |b| total < b) {
                    *best = Some(total);
                }
                return;
            }
            for i in 0..remaining.len() {
                let v = remaining.remove(i);
                go(dist, home, remaining, v, acc + dist.get(last, v), best);
                remaining.insert(i, v);
            }
        }
        let mut best = None;
        let mut rem = members.to_vec();
        go(dist, home, &mut rem, home, 0, &mut best);
        best
    }

    #[test]
    fn oracle_solutions_are_feasible_and_deterministic() {
        for seed in 0..4 {
            let inst = tiny_random_instance(4, 2, seed);
            let config = Config::default();
            let (c1, s1) = brute_force_optimum(&inst, &config, OracleLimits::default()).unwrap();
            let (c2, s2) = brute_force_optimum(&inst, &config, OracleLimits::default()).unwrap();
            assert_eq!(c1, c2);
            assert_eq!(s1, s2);
            assert!(check_feasibility(&inst, &s1, &config).is_empty());
            assert_eq!(c1, total_cost(&inst, &s1));
        }
    }

    #[test]
    fn cflp_oracle_matches_construct_exact_path() {
        let inst = t1_instance();
        let (cost, a) = brute_force_cflp(&inst, OracleLimits::default()).unwrap();
        assert!(a.violations(&inst).is_empty());
        let heuristic = crate::construct::solve_cflp(&inst).unwrap();
        assert_eq!(cost, crate::construct::cflp_objective(&inst, &heuristic));
    }

    #[test]
    fn cflp_oracle_forced_single_depot() {
        let inst = tiny_random_instance(3, 1, 9);
        let (_, a) = brute_force_cflp(&inst, OracleLimits::default()).unwrap();
        assert_eq!(a.open_depots.len(), 1);
        match brute_force_cflp(&tiny_random_instance(12, 1, 0), OracleLimits::default()) {
            Err(Error::LimitExceeded(_)) => {}
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn set_cover_oracle_single_and_caps() {
        let inst = t1_instance();
        let routes =
            vec![Route::new_se(&inst, NodeId(1), vec![NodeId(3)]), Route::new_se(&inst, NodeId(1), vec![NodeId(4)])];
        let n = MiniNetwork::from_routes(&inst, NodeId(1), routes);
        let customers: Vec<NodeId> = vec![NodeId(3), NodeId(4)];
        let (cost, chosen) = brute_force_set_cover(&[n.clone()], &customers).unwrap();
        assert_eq!(chosen, vec![0]);
        assert_eq!(cost, n.cost);
        let many: Vec<MiniNetwork> = (0..21).map(|_| n.clone()).collect();
        assert!(matches!(
            brute_force_set_cover(&many, &customers),
            Err(Error::LimitExceeded(_))
        ));
    }
}
