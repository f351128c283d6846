//! Objective computation, feasibility checking and O(1) incremental
//! route evaluation via composable segment statistics.

use crate::model::*;
use crate::{Error, Result};

/// Resource-extension record for a contiguous visit sequence.
///
/// `earliest` and `latest` are bounds on the start of service at the
/// segment's *first* node. For any start `t <= latest` the segment is
/// executable (waiting fills gaps), and service at the last node
/// completes at `max(t, earliest) + duration`. `duration` counts
/// travel plus service, never waiting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentStats {
    pub load: Load,
    pub distance: Dist,
    pub duration: Time,
    pub earliest: Time,
    pub latest: Time,
    pub tw_feasible: bool,
}

impl SegmentStats {
    /// Identity element of [`concat`] with a zero-length link.
    pub fn neutral() -> Self {
        SegmentStats {
            load: 0,
            distance: 0,
            duration: 0,
            earliest: 0,
            latest: TIME_INF,
            tw_feasible: true,
        }
    }

    /// Segment holding a single node.
    pub fn node(instance: &Instance, id: NodeId) -> Self {
        let w = instance.window(id);
        SegmentStats {
            load: instance.demand(id),
            distance: 0,
            duration: instance.service_time(id),
            earliest: w.earliest,
            latest: w.latest,
            tw_feasible: w.earliest <= w.latest,
        }
    }

    /// Like [`SegmentStats::node`] but with an explicit load, used for
    /// micro-depot stops on FE routes whose load is the demand routed
    /// through the depot.
    pub fn node_with_load(instance: &Instance, id: NodeId, load: Load) -> Self {
        let mut s = Self::node(instance, id);
        s.load = load;
        s
    }
}

/// Concatenates two segments joined by a link of the given distance
/// and travel time.
///
/// Service at `b`'s first node is forced no earlier than
/// `a.earliest + a.duration + link_time`; the combined window bounds
/// follow by shifting `b`'s bounds back to `a`'s start. The
/// composition is associative in all fields.
#[inline]
pub fn concat(a: &SegmentStats, b: &SegmentStats, link_distance: Dist, link_time: Time) -> SegmentStats {
    let shift = a.duration + link_time;
    SegmentStats {
        load: a.load + b.load,
        distance: a.distance + link_distance + b.distance,
        duration: a.duration + link_time + b.duration,
        earliest: a.earliest.max(b.earliest - shift),
        latest: a.latest.min(b.latest.saturating_sub(shift)),
        tw_feasible: a.tw_feasible && b.tw_feasible && a.earliest + shift <= b.latest,
    }
}

/// Folds [`concat`] over `home -> visits -> home`. For FE routes,
/// `depot_loads` supplies the demand carried to each visited
/// micro-depot (indexed by node position).
pub fn route_stats(instance: &Instance, route: &Route, depot_loads: Option<&[Load]>) -> SegmentStats {
    let e = route.echelon;
    let mut acc = home_stats(instance, route);
    let mut prev = route.home;
    for &v in &route.visits {
        let mut node = SegmentStats::node(instance, v);
        if let Some(loads) = depot_loads {
            if instance.is_depot(v) {
                node.load = loads[v.idx()];
            }
        }
        acc = concat(&acc, &node, instance.dist(e, prev, v), instance.travel_time(e, prev, v));
        prev = v;
    }
    let end = home_stats(instance, route);
    concat(&acc, &end, instance.dist(e, prev, route.home), instance.travel_time(e, prev, route.home))
}

/// Home-node segment, intersected with the vehicle work window when
/// the class declares one.
fn home_stats(instance: &Instance, route: &Route) -> SegmentStats {
    let mut s = SegmentStats::node(instance, route.home);
    if let Some(w) = instance.vehicle_classes[route.vehicle_class].work_window {
        s.earliest = s.earliest.max(w.earliest);
        s.latest = s.latest.min(w.latest);
        s.tw_feasible = s.earliest <= s.latest;
    }
    s
}

/// Travel cost plus segment statistics of one route. Vehicle fixed
/// costs are accounted at solution level.
pub fn evaluate_route(
    instance: &Instance,
    route: &Route,
    depot_loads: Option<&[Load]>,
) -> (SegmentStats, Money) {
    let stats = route_stats(instance, route, depot_loads);
    let rate = instance.vehicle_classes[route.vehicle_class].cost_per_distance;
    (stats, stats.distance * rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CostBreakdown {
    pub depot_opening: Money,
    pub fe_travel: Money,
    pub se_travel: Money,
    pub fe_fixed: Money,
    pub se_fixed: Money,
    pub total: Money,
}

/// Total cost of a solution: depot opening costs, travel costs per
/// echelon and vehicle fixed costs per used route.
pub fn objective(instance: &Instance, solution: &Solution) -> CostBreakdown {
    let depot_opening: Money = solution
        .open_depots
        .iter()
        .map(|&d| instance.depot(d).opening_cost)
        .sum();
    let depot_loads = solution.depot_se_loads(instance);
    let mut fe_travel = 0;
    for r in &solution.fe_routes {
        fe_travel += evaluate_route(instance, r, Some(&depot_loads)).1;
    }
    let mut se_travel = 0;
    for r in &solution.se_routes {
        se_travel += evaluate_route(instance, r, None).1;
    }
    let fe_fixed = solution
        .fe_routes
        .iter()
        .map(|r| instance.vehicle_classes[r.vehicle_class].fixed_cost)
        .sum();
    let se_fixed = solution
        .se_routes
        .iter()
        .map(|r| instance.vehicle_classes[r.vehicle_class].fixed_cost)
        .sum();
    CostBreakdown {
        depot_opening,
        fe_travel,
        se_travel,
        fe_fixed,
        se_fixed,
        total: depot_opening + fe_travel + se_travel + fe_fixed + se_fixed,
    }
}

/// Total cost shortcut.
pub fn total_cost(instance: &Instance, solution: &Solution) -> Money {
    objective(instance, solution).total
}

/// Checks a solution against all model constraints. Violations are
/// returned as data; an empty list means the solution is feasible.
pub fn check_feasibility(instance: &Instance, solution: &Solution, config: &Config) -> Vec<String> {
    let mut v = Vec::new();

    // Served-exactly-once over both echelons.
    let mut seen = vec![0u32; instance.num_nodes()];
    for r in solution.se_routes.iter().chain(solution.fe_routes.iter()) {
        for &x in &r.visits {
            if instance.is_customer(x) {
                seen[x.idx()] += 1;
            }
        }
    }
    for c in instance.customer_ids() {
        match seen[c.idx()] {
            0 => v.push(format!("customer {c} not served")),
            1 => {}
            k => v.push(format!("customer {c} served {k} times")),
        }
    }

    // Route structure.
    for (i, r) in solution.fe_routes.iter().enumerate() {
        if r.home != NodeId(0) {
            v.push(format!("fe route {i}: home {} is not the main depot", r.home));
        }
        if r.visits.is_empty() {
            v.push(format!("fe route {i}: empty visit list"));
        }
        if has_repeats(&r.visits) {
            v.push(format!("fe route {i}: repeated visit"));
        }
        for &x in &r.visits {
            if instance.is_depot(x) && !solution.open_depots.contains(&x) {
                v.push(format!("fe route {i}: visits closed micro-depot {x}"));
            }
        }
    }
    for (i, r) in solution.se_routes.iter().enumerate() {
        if !instance.is_depot(r.home) {
            v.push(format!("se route {i}: home {} is not a micro-depot", r.home));
        } else if !solution.open_depots.contains(&r.home) {
            v.push(format!("se route {i}: home micro-depot {} is closed", r.home));
        }
        if r.visits.is_empty() {
            v.push(format!("se route {i}: empty visit list"));
        }
        if has_repeats(&r.visits) {
            v.push(format!("se route {i}: repeated visit"));
        }
        if r.visits.iter().any(|&x| !instance.is_customer(x)) {
            v.push(format!("se route {i}: visits a non-customer node"));
        }
    }

    // Each used micro-depot is supplied by exactly one FE route.
    let mut fe_visits = vec![0u32; instance.num_nodes()];
    for r in &solution.fe_routes {
        for &x in &r.visits {
            if instance.is_depot(x) {
                fe_visits[x.idx()] += 1;
            }
        }
    }
    let route_counts = solution.depot_route_counts(instance);
    for d in instance.depot_ids() {
        if route_counts[d.idx()] > 0 && fe_visits[d.idx()] == 0 {
            v.push(format!("micro-depot {d} has se routes but no fe supply visit"));
        }
        if fe_visits[d.idx()] > 1 {
            v.push(format!("micro-depot {d} visited by {} fe routes", fe_visits[d.idx()]));
        }
    }

    // Capacities.
    let depot_loads = solution.depot_se_loads(instance);
    for (i, r) in solution.se_routes.iter().enumerate() {
        let cap = instance.vehicle_classes[r.vehicle_class].capacity;
        let load: Load = r.visits.iter().map(|&x| instance.demand(x)).sum();
        if load > cap {
            v.push(format!("se route {i}: load {load} exceeds vehicle capacity {cap}"));
        }
    }
    for (i, r) in solution.fe_routes.iter().enumerate() {
        let cap = instance.vehicle_classes[r.vehicle_class].capacity;
        let load: Load = r
            .visits
            .iter()
            .map(|&x| if instance.is_depot(x) { depot_loads[x.idx()] } else { instance.demand(x) })
            .sum();
        if load > cap {
            v.push(format!("fe route {i}: load {load} exceeds vehicle capacity {cap}"));
        }
    }
    for d in instance.depot_ids() {
        let cap = instance.depot(d).capacity;
        if depot_loads[d.idx()] > cap {
            v.push(format!(
                "micro-depot {d}: routed demand {} exceeds capacity {cap}",
                depot_loads[d.idx()]
            ));
        }
        if config.strict_depot_vehicle_capacity {
            let se_cap = instance.se_class().capacity;
            let vehicle_sum = route_counts[d.idx()] as Load * se_cap;
            if vehicle_sum > cap {
                v.push(format!(
                    "micro-depot {d}: assigned vehicle capacity sum {vehicle_sum} exceeds capacity {cap}"
                ));
            }
        }
    }

    // Time windows, including depot operating windows on FE arrivals.
    for (i, r) in solution.fe_routes.iter().enumerate() {
        if !route_stats(instance, r, Some(&depot_loads)).tw_feasible {
            v.push(format!("fe route {i}: time-window infeasible"));
        }
    }
    for (i, r) in solution.se_routes.iter().enumerate() {
        if !route_stats(instance, r, None).tw_feasible {
            v.push(format!("se route {i}: time-window infeasible"));
        }
    }

    v
}

fn has_repeats(visits: &[NodeId]) -> bool {
    let mut sorted: Vec<NodeId> = visits.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Percentage gap `(z - bks) / bks * 100` against a best-known value.
pub fn gap_percent(z: Money, bks: Money) -> Result<f64> {
    if bks <= 0 {
        return Err(Error::InvalidInput(format!("bks must be positive, got {bks}")));
    }
    Ok((z - bks) as f64 / bks as f64 * 100.0)
}
