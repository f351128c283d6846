//! Mini-network pool and set-cover intensification: every open depot
//! with its SE routes forms a reusable column; a covering subset is
//! reselected periodically and duplicates removed by a correction
//! pass.

use crate::construct::build_fe_routes;
use crate::eval::evaluate_route;
use crate::model::*;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// One open micro-depot, its assigned customers and SE routes. The
/// cost covers SE travel, SE vehicle fixed costs and the depot
/// opening cost.
#[derive(Debug, Clone, PartialEq)]
pub struct MiniNetwork {
    pub depot: NodeId,
    pub customers: BTreeSet<NodeId>,
    pub se_routes: Vec<Route>,
    pub cost: Money,
}

impl MiniNetwork {
    pub fn from_routes(instance: &Instance, depot: NodeId, se_routes: Vec<Route>) -> Self {
        debug_assert!(se_routes.iter().all(|r| r.home == depot));
        let customers: BTreeSet<NodeId> =
            se_routes.iter().flat_map(|r| r.visits.iter().copied()).collect();
        let travel: Money = se_routes.iter().map(|r| evaluate_route(instance, r, None).1).sum();
        let fixed: Money = se_routes
            .iter()
            .map(|r| instance.vehicle_classes[r.vehicle_class].fixed_cost)
            .sum();
        let cost = travel + fixed + instance.depot(depot).opening_cost;
        MiniNetwork { depot, customers, se_routes, cost }
    }
}

/// Pool of mini-networks keyed by (depot, customer set); collisions
/// keep the cheaper entry.
#[derive(Debug, Clone, Default)]
pub struct NetworkPool {
    entries: BTreeMap<(NodeId, Vec<NodeId>), MiniNetwork>,
}

impl NetworkPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Deterministic iteration in key order.
    pub fn networks(&self) -> impl Iterator<Item = &MiniNetwork> {
        self.entries.values()
    }

    pub fn insert(&mut self, network: MiniNetwork) {
        let key = (network.depot, network.customers.iter().copied().collect::<Vec<_>>());
        match self.entries.get(&key) {
            Some(existing) if existing.cost <= network.cost => {}
            _ => {
                self.entries.insert(key, network);
            }
        }
    }

    /// Diagnostic dump: one `depot | customers | cost` line per entry.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in self.networks() {
            let customers: Vec<String> = n.customers.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("{} | {} | {}\n", n.depot, customers.join(","), n.cost));
        }
        out
    }
}

/// Records the mini-network of every open depot in the solution,
/// keeping the cheaper entry on key collisions.
pub fn update_pool(pool: &mut NetworkPool, instance: &Instance, solution: &Solution) {
    let mut per_depot: BTreeMap<NodeId, Vec<Route>> = BTreeMap::new();
    for r in &solution.se_routes {
        per_depot.entry(r.home).or_default().push(r.clone());
    }
    for (depot, routes) in per_depot {
        pool.insert(MiniNetwork::from_routes(instance, depot, routes));
    }
}

/// Maximum branch-and-bound nodes before falling back to the best
/// incumbent found so far.
const SET_COVER_NODE_BUDGET: usize = 10_000;

/// Selects a minimum-cost set of mini-networks covering every
/// customer, with at most one network per depot. Exact while the
/// node budget lasts; the greedy incumbent bounds the search.
pub fn solve_set_cover(pool: &NetworkPool, instance: &Instance) -> Result<Vec<MiniNetwork>> {
    let networks: Vec<&MiniNetwork> = pool.networks().collect();
    let customers: Vec<NodeId> = instance.customer_ids().collect();
    let mut covered_by: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (i, n) in networks.iter().enumerate() {
        for &c in &n.customers {
            covered_by.entry(c).or_default().push(i);
        }
    }
    for &c in &customers {
        if !covered_by.contains_key(&c) {
            return Err(Error::Infeasible(format!("customer {c} appears in no mini-network")));
        }
    }

    let mut search = CoverSearch {
        networks: &networks,
        covered_by: &covered_by,
        best: greedy_cover(&networks, &customers),
        nodes: 0,
    };
    let uncovered: BTreeSet<NodeId> = customers.iter().copied().collect();
    search.branch(&uncovered, &BTreeSet::new(), &mut Vec::new(), 0);

    let (_, ids) = search
        .best
        .ok_or_else(|| Error::Infeasible("no depot-respecting cover exists".into()))?;
    Ok(ids.into_iter().map(|i| networks[i].clone()).collect())
}

struct CoverSearch<'a> {
    networks: &'a [&'a MiniNetwork],
    covered_by: &'a BTreeMap<NodeId, Vec<usize>>,
    best: Option<(Money, Vec<usize>)>,
    nodes: usize,
}

impl CoverSearch<'_> {
    fn branch(
        &mut self,
        uncovered: &BTreeSet<NodeId>,
        used_depots: &BTreeSet<NodeId>,
        chosen: &mut Vec<usize>,
        cost: Money,
    ) {
        if uncovered.is_empty() {
            if self.best.as_ref().map_or(true, |&(b, _)| cost < b) {
                self.best = Some((cost, chosen.clone()));
            }
            return;
        }
        self.nodes += 1;
        if self.nodes > SET_COVER_NODE_BUDGET {
            return;
        }
        if let Some(&(bound, _)) = self.best.as_ref() {
            if cost + self.lower_bound(uncovered) >= bound {
                return;
            }
        }
        // Branch on the uncovered customer with the fewest usable
        // candidate networks.
        let mut pivot: Option<(usize, NodeId)> = None;
        for &c in uncovered {
            let k = self.covered_by[&c]
                .iter()
                .filter(|&&i| !used_depots.contains(&self.networks[i].depot))
                .count();
            if k == 0 {
                return;
            }
            if pivot.map_or(true, |(pk, _)| k < pk) {
                pivot = Some((k, c));
            }
        }
        let (_, c) = pivot.unwrap();
        let mut candidates: Vec<usize> = self.covered_by[&c]
            .iter()
            .copied()
            .filter(|&i| !used_depots.contains(&self.networks[i].depot))
            .collect();
        candidates.sort_by_key(|&i| (self.networks[i].cost, i));
        for i in candidates {
            let n = self.networks[i];
            let mut rest: BTreeSet<NodeId> = uncovered.clone();
            for &x in &n.customers {
                rest.remove(&x);
            }
            let mut depots = used_depots.clone();
            depots.insert(n.depot);
            chosen.push(i);
            self.branch(&rest, &depots, chosen, cost + n.cost);
            chosen.pop();
        }
    }

    /// Valid relaxation: each uncovered customer pays at least the
    /// cheapest per-customer share among networks containing it.
    fn lower_bound(&self, uncovered: &BTreeSet<NodeId>) -> Money {
        let mut lb = 0.0f64;
        for &c in uncovered {
            let m = self.covered_by[&c]
                .iter()
                .map(|&i| {
                    let n = self.networks[i];
                    let overlap = n.customers.iter().filter(|x| uncovered.contains(x)).count();
                    n.cost as f64 / overlap.max(1) as f64
                })
                .fold(f64::INFINITY, f64::min);
            lb += m;
        }
        lb.floor() as Money
    }
}

/// Cost-effectiveness greedy respecting the one-network-per-depot
/// rule; seeds the branch-and-bound upper bound.
fn greedy_cover(networks: &[&MiniNetwork], customers: &[NodeId]) -> Option<(Money, Vec<usize>)> {
    let mut uncovered: BTreeSet<NodeId> = customers.iter().copied().collect();
    let mut used = BTreeSet::new();
    let mut chosen = Vec::new();
    let mut total = 0;
    while !uncovered.is_empty() {
        let mut best: Option<(f64, usize, usize)> = None; // (ratio, gain, idx)
        for (i, n) in networks.iter().enumerate() {
            if used.contains(&n.depot) {
                continue;
            }
            let gain = n.customers.iter().filter(|c| uncovered.contains(c)).count();
            if gain == 0 {
                continue;
            }
            let ratio = n.cost as f64 / gain as f64;
            if best.map_or(true, |(r, _, bi)| ratio < r || (ratio == r && i < bi)) {
                best = Some((ratio, gain, i));
            }
        }
        let (_, _, i) = best?;
        let n = networks[i];
        for &c in &n.customers {
            uncovered.remove(&c);
        }
        used.insert(n.depot);
        chosen.push(i);
        total += n.cost;
    }
    Some((total, chosen))
}

/// Builds a feasible solution from selected mini-networks: customers
/// covered more than once stay on the route where removing them would
/// save the most and leave all others; FE routes are rebuilt.
pub fn correction_heuristic(
    instance: &Instance,
    selected: &[MiniNetwork],
    config: &Config,
) -> Result<Solution> {
    let mut routes: Vec<Route> = Vec::new();
    let mut open: BTreeSet<NodeId> = BTreeSet::new();
    for n in selected {
        open.insert(n.depot);
        routes.extend(n.se_routes.iter().cloned());
    }

    let mut hosts: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for (ri, r) in routes.iter().enumerate() {
        for &c in &r.visits {
            hosts.entry(c).or_default().push(ri);
        }
    }
    let rate = instance.se_class().cost_per_distance;
    for (&c, route_ids) in &hosts {
        if route_ids.len() < 2 {
            continue;
        }
        let mut savings: Vec<(Money, usize)> = route_ids
            .iter()
            .map(|&ri| {
                let r = &routes[ri];
                let pos = r.visits.iter().position(|&x| x == c).unwrap();
                let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                let next = if pos + 1 == r.visits.len() { r.home } else { r.visits[pos + 1] };
                let saving = (instance.dist_se.get(prev, c) + instance.dist_se.get(c, next)
                    - instance.dist_se.get(prev, next))
                    * rate;
                (saving, ri)
            })
            .collect();
        savings.sort_by_key(|&(s, ri)| (std::cmp::Reverse(s), ri));
        let keep = if config.correction_keep_least_saving {
            savings.last().unwrap().1
        } else {
            savings[0].1
        };
        for &(_, ri) in &savings {
            if ri != keep {
                routes[ri].visits.retain(|&x| x != c);
            }
        }
    }

    routes.retain(|r| !r.visits.is_empty());
    let mut sol = Solution::empty();
    sol.se_routes = routes;
    sol.open_depots =
        open.into_iter().filter(|&t| sol.se_routes.iter().any(|r| r.home == t)).collect();
    let depot_loads = sol.depot_se_loads(instance);
    sol.fe_routes = build_fe_routes(instance, &sol.open_depots, &depot_loads, &[])?;
    sol.cost_cache = Some(crate::eval::total_cost(instance, &sol));
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::check_feasibility;
    use crate::test_fixtures::{t1_instance, t1_two_depot_solution};

    fn network(
        instance: &Instance,
        depot: u32,
        customer_routes: &[&[u32]],
        cost_override: Option<Money>,
    ) -> MiniNetwork {
        let routes: Vec<Route> = customer_routes
            .iter()
            .map(|cs| {
                Route::new_se(instance, NodeId(depot), cs.iter().map(|&c| NodeId(c)).collect())
            })
            .collect();
        let mut n = MiniNetwork::from_routes(instance, NodeId(depot), routes);
        if let Some(c) = cost_override {
            n.cost = c;
        }
        n
    }

    #[test]
    fn update_pool_records_open_depots() {
        let inst = t1_instance();
        let sol = t1_two_depot_solution(&inst);
        let mut pool = NetworkPool::new();
        update_pool(&mut pool, &inst, &sol);
        assert_eq!(pool.len(), 2);
        // Same solution again: keys collide, size unchanged.
        update_pool(&mut pool, &inst, &sol);
        assert_eq!(pool.len(), 2);
    }

    #[test]
    fn pool_keeps_cheaper_entry_per_key() {
        let inst = t1_instance();
        let mut pool = NetworkPool::new();
        let expensive = network(&inst, 1, &[&[3], &[4]], Some(10_000));
        let cheap = network(&inst, 1, &[&[3, 4]], Some(500));
        assert_eq!(expensive.customers, cheap.customers);
        pool.insert(expensive);
        assert_eq!(pool.networks().next().unwrap().cost, 10_000);
        pool.insert(cheap);
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.networks().next().unwrap().cost, 500);
        // A worse entry afterwards does not replace it.
        pool.insert(network(&inst, 1, &[&[4, 3]], Some(9_999)));
        assert_eq!(pool.networks().next().unwrap().cost, 500);
    }

    #[test]
    fn mini_network_cost_matches_components() {
        let inst = t1_instance();
        let n = network(&inst, 1, &[&[3], &[4]], None);
        // Travel 400 + 800, two vehicles at 100, opening 1000.
        assert_eq!(n.cost, 1200 + 200 + 1000);
    }

    #[test]
    fn forced_single_cover() {
        let inst = t1_instance();
        let mut pool = NetworkPool::new();
        pool.insert(network(&inst, 1, &[&[3], &[4]], None));
        pool.insert(network(&inst, 2, &[&[5], &[6]], None));
        let sel = solve_set_cover(&pool, &inst).unwrap();
        assert_eq!(sel.len(), 2);
    }

    #[test]
    fn set_cover_failure_without_full_coverage() {
        let inst = t1_instance();
        let mut pool = NetworkPool::new();
        pool.insert(network(&inst, 1, &[&[3], &[4]], None));
        match solve_set_cover(&pool, &inst) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("mini-network"), "{msg}"),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn never_two_networks_from_one_depot() {
        let inst = t1_instance();
        let mut pool = NetworkPool::new();
        // Depot 1 could cover {3,4} via two distinct cheap networks,
        // but only one may be chosen; depot 2 must cover the rest.
        pool.insert(network(&inst, 1, &[&[3]], Some(10)));
        pool.insert(network(&inst, 1, &[&[4]], Some(10)));
        pool.insert(network(&inst, 1, &[&[3], &[4]], Some(5_000)));
        pool.insert(network(&inst, 2, &[&[5], &[6]], Some(10)));
        pool.insert(network(&inst, 2, &[&[4], &[5], &[6]], Some(200)));
        let sel = solve_set_cover(&pool, &inst).unwrap();
        let mut depots: Vec<NodeId> = sel.iter().map(|n| n.depot).collect();
        depots.dedup();
        assert_eq!(depots.len(), sel.len(), "duplicate depot in {depots:?}");
        let cost: Money = sel.iter().map(|n| n.cost).sum();
        // Optimum: depot 1 covers {3} for 10, depot 2 covers {4,5,6}.
        assert_eq!(cost, 210);
    }

    #[test]
    fn correction_keeps_largest_saving_host() {
        let mut inst = t1_instance();
        // Loosen capacities so two-customer routes are feasible.
        inst.vehicle_classes[0].capacity = 90;
        inst.vehicle_classes[1].capacity = 60;
        for d in &mut inst.micro_depots {
            d.capacity = 80;
        }
        // Customer 4 appears in both networks. Removal savings:
        // depot 1 (1->3->4->1): 200+400-200 = 400;
        // depot 2 (2->4->5->2): 1600+1800-200 = 3200.
        let n1 = network(&inst, 1, &[&[3, 4]], None);
        let n2 = network(&inst, 2, &[&[4, 5], &[6]], None);
        let sel = vec![n1, n2];
        let config = Config::default();
        let sol = correction_heuristic(&inst, &sel, &config).unwrap();
        assert!(check_feasibility(&inst, &sol, &config).is_empty());
        let host = sol.se_routes.iter().find(|r| r.visits.contains(&NodeId(4))).unwrap();
        assert_eq!(host.home, NodeId(2));

        let mut alt = config.clone();
        alt.correction_keep_least_saving = true;
        let sol2 = correction_heuristic(&inst, &sel, &alt).unwrap();
        assert!(check_feasibility(&inst, &sol2, &alt).is_empty());
        let host2 = sol2.se_routes.iter().find(|r| r.visits.contains(&NodeId(4))).unwrap();
        assert_eq!(host2.home, NodeId(1));
    }

    #[test]
    fn correction_without_overlap_passes_routes_through() {
        let inst = t1_instance();
        let sel = vec![network(&inst, 1, &[&[3], &[4]], None), network(&inst, 2, &[&[5], &[6]], None)];
        let config = Config::default();
        let sol = correction_heuristic(&inst, &sel, &config).unwrap();
        assert_eq!(sol.se_routes.len(), 4);
        assert_eq!(sol.fe_routes.len(), 2);
        assert!(check_feasibility(&inst, &sol, &config).is_empty());
    }
}
