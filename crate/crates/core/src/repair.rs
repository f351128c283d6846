//! Repair operators: greedy insertion, regret-2 insertion and
//! first-echelon route merging. Every repair returns a fully feasible
//! solution with its cost maintained incrementally.

use crate::destroy::RemovalResult;
use crate::eval::{concat, route_stats, SegmentStats};
use crate::model::*;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepairOp {
    Greedy,
    Regret,
    MergeFe,
}

impl RepairOp {
    pub const ALL: [RepairOp; 3] = [RepairOp::Greedy, RepairOp::Regret, RepairOp::MergeFe];

    pub fn name(self) -> &'static str {
        match self {
            RepairOp::Greedy => "greedy-insertion",
            RepairOp::Regret => "regret-insertion",
            RepairOp::MergeFe => "merge-fe-routes",
        }
    }
}

pub fn apply(
    op: RepairOp,
    instance: &Instance,
    removal: RemovalResult,
    config: &Config,
) -> Result<Solution> {
    match op {
        RepairOp::Greedy => greedy_insertion(instance, removal, config),
        RepairOp::Regret => regret_insertion(instance, removal, config),
        RepairOp::MergeFe => merge_fe_routes(instance, removal, config),
    }
}

/// A concrete insertion target for one customer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Se { route: usize, pos: usize },
    Fe { route: usize, pos: usize },
    /// Fresh single-customer SE route; `open_new` additionally opens
    /// the depot and hooks it into the first echelon.
    NewSe { depot: NodeId, open_new: bool },
}

/// Working state of a repair: the partial solution plus load,
/// supply-route and cost bookkeeping kept in sync with each insertion.
struct Inserter<'a> {
    instance: &'a Instance,
    config: &'a Config,
    sol: Solution,
    depot_loads: Vec<Load>,
    se_loads: Vec<Load>,
    fe_loads: Vec<Load>,
    /// Depot node position -> index of the FE route supplying it.
    fe_server: Vec<Option<usize>>,
    se_route_counts: Vec<u32>,
    cost: Money,
    has_tw: bool,
}

impl<'a> Inserter<'a> {
    fn new(instance: &'a Instance, config: &'a Config, sol: Solution) -> Self {
        let depot_loads = sol.depot_se_loads(instance);
        let se_loads = sol
            .se_routes
            .iter()
            .map(|r| r.visits.iter().map(|&v| instance.demand(v)).sum())
            .collect();
        let fe_loads = sol
            .fe_routes
            .iter()
            .map(|r| {
                r.visits
                    .iter()
                    .map(|&v| {
                        if instance.is_depot(v) {
                            depot_loads[v.idx()]
                        } else {
                            instance.demand(v)
                        }
                    })
                    .sum()
            })
            .collect();
        let mut fe_server = vec![None; instance.num_nodes()];
        for (fi, r) in sol.fe_routes.iter().enumerate() {
            for &v in &r.visits {
                if instance.is_depot(v) {
                    fe_server[v.idx()] = Some(fi);
                }
            }
        }
        let se_route_counts = sol.depot_route_counts(instance);
        let cost = sol
            .cost_cache
            .unwrap_or_else(|| crate::eval::total_cost(instance, &sol));
        let has_tw = instance_has_tw(instance);
        Inserter {
            instance,
            config,
            sol,
            depot_loads,
            se_loads,
            fe_loads,
            fe_server,
            se_route_counts,
            cost,
            has_tw,
        }
    }

    fn se_rate(&self) -> Money {
        self.instance.se_class().cost_per_distance
    }

    fn fe_rate(&self) -> Money {
        self.instance.fe_class().cost_per_distance
    }

    /// Depot slack against its own capacity, the strict vehicle-sum
    /// rule and the FE supply route.
    fn depot_can_take(&self, t: NodeId, extra: Load, extra_routes: u32) -> bool {
        let depot = self.instance.depot(t);
        if self.depot_loads[t.idx()] + extra > depot.capacity {
            return false;
        }
        if self.config.strict_depot_vehicle_capacity {
            let cap_sum = (self.se_route_counts[t.idx()] + extra_routes) as Load
                * self.instance.se_class().capacity;
            if cap_sum > depot.capacity {
                return false;
            }
        }
        match self.fe_server[t.idx()] {
            Some(fi) => {
                self.fe_loads[fi] + extra <= self.instance.fe_class().capacity
            }
            // A new supply visit will be created alongside the depot.
            None => extra <= self.instance.fe_class().capacity,
        }
    }

    fn tw_ok_insert(&self, route: &Route, pos: usize, c: NodeId) -> bool {
        if !self.has_tw {
            return true;
        }
        let e = route.echelon;
        let mut acc = SegmentStats::node(self.instance, route.home);
        if let Some(w) = self.instance.vehicle_classes[route.vehicle_class].work_window {
            acc.earliest = acc.earliest.max(w.earliest);
            acc.latest = acc.latest.min(w.latest);
            acc.tw_feasible = acc.earliest <= acc.latest;
        }
        let mut prev = route.home;
        for i in 0..=route.visits.len() {
            if i == pos {
                let node = SegmentStats::node(self.instance, c);
                acc = concat(
                    &acc,
                    &node,
                    self.instance.dist(e, prev, c),
                    self.instance.travel_time(e, prev, c),
                );
                prev = c;
            }
            if i < route.visits.len() {
                let v = route.visits[i];
                let node = SegmentStats::node(self.instance, v);
                acc = concat(
                    &acc,
                    &node,
                    self.instance.dist(e, prev, v),
                    self.instance.travel_time(e, prev, v),
                );
                prev = v;
            }
        }
        let end = SegmentStats::node(self.instance, route.home);
        acc = concat(
            &acc,
            &end,
            self.instance.dist(e, prev, route.home),
            self.instance.travel_time(e, prev, route.home),
        );
        acc.tw_feasible
    }

    /// Cheapest and second-cheapest feasible insertions for `c` over
    /// existing routes. `restrict` limits SE candidates to one depot
    /// and disables direct shipment.
    fn best_two(
        &self,
        c: NodeId,
        restrict: Option<NodeId>,
    ) -> (Option<(Money, Slot)>, Option<(Money, Slot)>) {
        let d = self.instance.demand(c);
        let mut best: Option<(Money, Slot)> = None;
        let mut second: Option<(Money, Slot)> = None;

        for (ri, r) in self.sol.se_routes.iter().enumerate() {
            if let Some(t) = restrict {
                if r.home != t {
                    continue;
                }
            }
            if self.se_loads[ri] + d > self.instance.se_class().capacity {
                continue;
            }
            if !self.depot_can_take(r.home, d, 0) {
                continue;
            }
            let rate = self.se_rate();
            for pos in 0..=r.visits.len() {
                let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                let next = if pos == r.visits.len() { r.home } else { r.visits[pos] };
                let delta = (self.instance.dist_se.get(prev, c)
                    + self.instance.dist_se.get(c, next)
                    - self.instance.dist_se.get(prev, next))
                    * rate;
                if best.as_ref().is_some_and(|&(b, _)| delta >= b)
                    && second.as_ref().is_some_and(|&(s, _)| delta >= s)
                {
                    continue;
                }
                if self.tw_ok_insert(r, pos, c) {
                    offer_top2(delta, Slot::Se { route: ri, pos }, &mut best, &mut second);
                }
            }
        }

        if restrict.is_none() && self.config.allow_direct_shipment {
            let rate = self.fe_rate();
            for (fi, r) in self.sol.fe_routes.iter().enumerate() {
                if self.fe_loads[fi] + d > self.instance.fe_class().capacity {
                    continue;
                }
                for pos in 0..=r.visits.len() {
                    let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                    let next = if pos == r.visits.len() { r.home } else { r.visits[pos] };
                    let delta = (self.instance.dist_fe.get(prev, c)
                        + self.instance.dist_fe.get(c, next)
                        - self.instance.dist_fe.get(prev, next))
                        * rate;
                    if best.as_ref().is_some_and(|&(b, _)| delta >= b)
                        && second.as_ref().is_some_and(|&(s, _)| delta >= s)
                    {
                        continue;
                    }
                    if self.tw_ok_insert(r, pos, c) {
                        offer_top2(delta, Slot::Fe { route: fi, pos }, &mut best, &mut second);
                    }
                }
            }
        }
        (best, second)
    }

    /// Fresh-route options when no existing position fits: a new SE
    /// route at an open depot, then opening the depot nearest to the
    /// customer.
    fn fallback(&self, c: NodeId, restrict: Option<NodeId>) -> Result<(Money, Slot)> {
        let d = self.instance.demand(c);
        if d > self.instance.se_class().capacity && restrict.is_none() {
            // Only direct shipment can carry this customer.
            if self.config.allow_direct_shipment && d <= self.instance.fe_class().capacity {
                let delta = 2 * self.instance.dist_fe.get(NodeId(0), c) * self.fe_rate()
                    + self.instance.fe_class().fixed_cost;
                return Ok((delta, Slot::NewSe { depot: NodeId(0), open_new: false }));
            }
            return Err(Error::Infeasible(format!(
                "customer {c} demand {d} exceeds every vehicle capacity"
            )));
        }
        let se_fixed = self.instance.se_class().fixed_cost;
        let mut best: Option<(Money, Slot)> = None;
        if d <= self.instance.se_class().capacity {
            for &t in &self.sol.open_depots {
                if let Some(r) = restrict {
                    if t != r {
                        continue;
                    }
                }
                if !self.depot_can_take(t, d, 1) {
                    continue;
                }
                if self.has_tw {
                    let probe = Route::new_se(self.instance, t, vec![c]);
                    if !route_stats(self.instance, &probe, None).tw_feasible {
                        continue;
                    }
                }
                let delta = 2 * self.instance.dist_se.get(t, c) * self.se_rate() + se_fixed;
                if best.as_ref().map_or(true, |&(b, _)| delta < b) {
                    best = Some((delta, Slot::NewSe { depot: t, open_new: false }));
                }
            }
        }
        if let Some(found) = best {
            return Ok(found);
        }
        if restrict.is_some() {
            return Err(Error::Infeasible("no position at the preferred depot".into()));
        }

        // Open the closed depot nearest to the customer; ties prefer
        // lower opening cost, then lower index.
        let candidate = self
            .instance
            .depot_ids()
            .filter(|t| !self.sol.open_depots.contains(t))
            .filter(|&t| d <= self.instance.depot(t).capacity)
            .filter(|&t| {
                !self.config.strict_depot_vehicle_capacity
                    || self.instance.se_class().capacity <= self.instance.depot(t).capacity
            })
            .filter(|&t| {
                !self.has_tw || {
                    let probe = Route::new_se(self.instance, t, vec![c]);
                    route_stats(self.instance, &probe, None).tw_feasible
                }
            })
            .min_by_key(|&t| {
                (self.instance.dist_se.get(t, c), self.instance.depot(t).opening_cost, t)
            });
        match candidate {
            Some(t) => {
                let delta = 2 * self.instance.dist_se.get(t, c) * self.se_rate()
                    + se_fixed
                    + self.instance.depot(t).opening_cost
                    + self.fe_hookup_delta(t, d).ok_or_else(|| {
                        Error::Infeasible(format!("depot {t} cannot be supplied"))
                    })?;
                Ok((delta, Slot::NewSe { depot: t, open_new: true }))
            }
            None => Err(Error::Infeasible(format!("customer {c} fits nowhere"))),
        }
    }

    /// Cost of hooking a fresh depot carrying `load` into the first
    /// echelon: cheapest insertion into an existing FE route, or a
    /// new FE round trip.
    fn fe_hookup_delta(&self, t: NodeId, load: Load) -> Option<Money> {
        let mut best: Option<Money> = None;
        if load <= self.instance.fe_class().capacity {
            best = Some(
                2 * self.instance.dist_fe.get(NodeId(0), t) * self.fe_rate()
                    + self.instance.fe_class().fixed_cost,
            );
        }
        for (fi, r) in self.sol.fe_routes.iter().enumerate() {
            if self.fe_loads[fi] + load > self.instance.fe_class().capacity {
                continue;
            }
            for pos in 0..=r.visits.len() {
                let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                let next = if pos == r.visits.len() { r.home } else { r.visits[pos] };
                let delta = (self.instance.dist_fe.get(prev, t)
                    + self.instance.dist_fe.get(t, next)
                    - self.instance.dist_fe.get(prev, next))
                    * self.fe_rate();
                if best.is_some_and(|b| delta >= b) {
                    continue;
                }
                if self.tw_ok_insert(r, pos, t) {
                    best = Some(delta);
                }
            }
        }
        best
    }

    fn insert(&mut self, c: NodeId, slot: Slot, expected_delta: Money) {
        let d = self.instance.demand(c);
        match slot {
            Slot::Se { route, pos } => {
                let t = self.sol.se_routes[route].home;
                self.sol.se_routes[route].visits.insert(pos, c);
                self.se_loads[route] += d;
                self.depot_loads[t.idx()] += d;
                if let Some(fi) = self.fe_server[t.idx()] {
                    self.fe_loads[fi] += d;
                }
            }
            Slot::Fe { route, pos } => {
                self.sol.fe_routes[route].visits.insert(pos, c);
                self.fe_loads[route] += d;
            }
            Slot::NewSe { depot, open_new } if depot == NodeId(0) => {
                // Direct shipment on a fresh FE route.
                debug_assert!(!open_new);
                self.sol.fe_routes.push(Route::new_fe(self.instance, vec![c]));
                self.fe_loads.push(d);
            }
            Slot::NewSe { depot, open_new } => {
                if open_new {
                    self.open_depot(depot, d);
                }
                self.sol.se_routes.push(Route::new_se(self.instance, depot, vec![c]));
                self.se_loads.push(d);
                self.se_route_counts[depot.idx()] += 1;
                self.depot_loads[depot.idx()] += d;
                if !open_new {
                    if let Some(fi) = self.fe_server[depot.idx()] {
                        self.fe_loads[fi] += d;
                    }
                }
            }
        }
        self.cost += expected_delta;
    }

    /// Opens a closed depot and hooks it into the FE, carrying `load`.
    fn open_depot(&mut self, t: NodeId, load: Load) {
        self.sol.open_depots.insert(t);
        let hook = self.cheapest_fe_hookup(t, load);
        match hook {
            Some((_, fi, pos)) => {
                self.sol.fe_routes[fi].visits.insert(pos, t);
                self.fe_loads[fi] += load;
                self.fe_server[t.idx()] = Some(fi);
            }
            None => {
                self.sol.fe_routes.push(Route::new_fe(self.instance, vec![t]));
                self.fe_loads.push(load);
                self.fe_server[t.idx()] = Some(self.sol.fe_routes.len() - 1);
            }
        }
    }

    fn cheapest_fe_hookup(&self, t: NodeId, load: Load) -> Option<(Money, usize, usize)> {
        let new_route_delta = 2 * self.instance.dist_fe.get(NodeId(0), t) * self.fe_rate()
            + self.instance.fe_class().fixed_cost;
        let mut best: Option<(Money, usize, usize)> = None;
        for (fi, r) in self.sol.fe_routes.iter().enumerate() {
            if self.fe_loads[fi] + load > self.instance.fe_class().capacity {
                continue;
            }
            for pos in 0..=r.visits.len() {
                let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                let next = if pos == r.visits.len() { r.home } else { r.visits[pos] };
                let delta = (self.instance.dist_fe.get(prev, t)
                    + self.instance.dist_fe.get(t, next)
                    - self.instance.dist_fe.get(prev, next))
                    * self.fe_rate();
                if best.as_ref().is_some_and(|&(b, _, _)| delta >= b) {
                    continue;
                }
                if delta < new_route_delta && self.tw_ok_insert(r, pos, t) {
                    best = Some((delta, fi, pos));
                }
            }
        }
        best
    }

    fn finish(mut self) -> Solution {
        self.sol.cost_cache = Some(self.cost);
        debug_assert_eq!(
            self.cost,
            crate::eval::total_cost(self.instance, &self.sol),
            "incremental cost drifted"
        );
        self.sol
    }
}

fn offer_top2(
    delta: Money,
    slot: Slot,
    best: &mut Option<(Money, Slot)>,
    second: &mut Option<(Money, Slot)>,
) {
    match best {
        None => *best = Some((delta, slot)),
        Some((b, _)) if delta < *b => {
            *second = *best;
            *best = Some((delta, slot));
        }
        Some(_) => match second {
            None => *second = Some((delta, slot)),
            Some((s, _)) if delta < *s => *second = Some((delta, slot)),
            _ => {}
        },
    }
}

pub(crate) fn instance_has_tw(instance: &Instance) -> bool {
    instance.customers.iter().any(|c| !c.time_window.is_unbounded())
        || instance.micro_depots.iter().any(|d| !d.operating_window.is_unbounded())
        || instance.vehicle_classes.iter().any(|v| v.work_window.is_some())
}

/// Best slot for one customer under the swap-preference protocol:
/// preferred depot first, everything afterwards.
fn choose_slot(ins: &Inserter, c: NodeId, prefs: &BTreeMap<NodeId, NodeId>) -> Result<(Money, Slot)> {
    if let Some(&t) = prefs.get(&c) {
        if let (Some(found), _) = ins.best_two(c, Some(t)) {
            return Ok(found);
        }
        if let Ok(found) = ins.fallback(c, Some(t)) {
            return Ok(found);
        }
    }
    if let (Some(found), _) = ins.best_two(c, None) {
        return Ok(found);
    }
    ins.fallback(c, None)
}

/// Inserts removed customers in ascending demand order, each at its
/// cheapest feasible position; fresh routes and depots only when
/// nothing fits.
pub fn greedy_insertion(
    instance: &Instance,
    removal: RemovalResult,
    config: &Config,
) -> Result<Solution> {
    let mut ins = Inserter::new(instance, config, removal.partial);
    let mut pending = removal.removed;
    pending.sort_by_key(|&c| (instance.demand(c), c));
    for c in pending {
        let (delta, slot) = choose_slot(&ins, c, &removal.swap_preferences)?;
        ins.insert(c, slot, delta);
    }
    Ok(ins.finish())
}

/// Candidate cache for regret insertion.
#[derive(Debug, Clone)]
struct Candidate {
    best: Option<(Money, Slot)>,
    second: Option<(Money, Slot)>,
}

impl Candidate {
    fn regret(&self) -> Money {
        match (&self.best, &self.second) {
            (Some((b, _)), Some((s, _))) => s - b,
            // Zero or one feasible position forces the move.
            _ => Money::MAX,
        }
    }

    fn references(&self, se: &BTreeSet<usize>, fe: &BTreeSet<usize>) -> bool {
        [self.best, self.second].iter().flatten().any(|&(_, slot)| match slot {
            Slot::Se { route, .. } => se.contains(&route),
            Slot::Fe { route, .. } => fe.contains(&route),
            Slot::NewSe { .. } => true,
        })
    }
}

/// Inserts the maximum-regret customer first, recomputing affected
/// candidates after every insertion.
pub fn regret_insertion(
    instance: &Instance,
    removal: RemovalResult,
    config: &Config,
) -> Result<Solution> {
    let mut ins = Inserter::new(instance, config, removal.partial);
    let prefs = removal.swap_preferences;
    let mut pending: Vec<NodeId> = removal.removed;
    pending.sort_unstable();
    pending.dedup();
    let mut cands: BTreeMap<NodeId, Candidate> = pending
        .iter()
        .map(|&c| {
            let restrict = prefs.get(&c).copied();
            let (best, second) = ins.best_two(c, restrict);
            let (best, second) = if best.is_none() && restrict.is_some() {
                ins.best_two(c, None)
            } else {
                (best, second)
            };
            (c, Candidate { best, second })
        })
        .collect();

    while !cands.is_empty() {
        let (&c, _) = cands
            .iter()
            .max_by_key(|(&c, cand)| (cand.regret(), std::cmp::Reverse(c)))
            .unwrap();
        let cand = cands.remove(&c).unwrap();
        let (delta, slot) = match cand.best {
            Some(found) => found,
            None => ins.fallback(c, prefs.get(&c).copied()).or_else(|_| ins.fallback(c, None))?,
        };
        let structural = matches!(slot, Slot::NewSe { .. });
        let touched_before = touched_routes(&ins, slot);
        ins.insert(c, slot, delta);

        // Refresh candidates invalidated by the insertion; every
        // remaining customer also sees the changed or new route.
        let keys: Vec<NodeId> = cands.keys().copied().collect();
        for k in keys {
            let restrict = prefs.get(&k).copied();
            let references_touched = {
                let cand = &cands[&k];
                cand.best.is_none() || cand.references(&touched_before.0, &touched_before.1)
            };
            if structural || references_touched {
                let (best, second) = ins.best_two(k, restrict);
                let (best, second) = if best.is_none() && restrict.is_some() {
                    ins.best_two(k, None)
                } else {
                    (best, second)
                };
                cands.insert(k, Candidate { best, second });
            } else {
                merge_changed_route(&ins, k, restrict, slot, cands.get_mut(&k).unwrap());
            }
        }
    }
    Ok(ins.finish())
}

/// SE and FE route indices whose slack or shape the insertion may
/// change: the target route, every SE route of the touched depot, the
/// depot's FE server and, for direct insertions, the SE routes of all
/// depots on that FE route.
fn touched_routes(ins: &Inserter, slot: Slot) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut se = BTreeSet::new();
    let mut fe = BTreeSet::new();
    let touch_depot = |t: NodeId, se: &mut BTreeSet<usize>, fe: &mut BTreeSet<usize>| {
        for (ri, r) in ins.sol.se_routes.iter().enumerate() {
            if r.home == t {
                se.insert(ri);
            }
        }
        if let Some(fi) = ins.fe_server[t.idx()] {
            fe.insert(fi);
        }
    };
    match slot {
        Slot::Se { route, .. } => {
            se.insert(route);
            let home = ins.sol.se_routes[route].home;
            touch_depot(home, &mut se, &mut fe);
        }
        Slot::Fe { route, .. } => {
            fe.insert(route);
            for &v in &ins.sol.fe_routes[route].visits {
                if ins.instance.is_depot(v) {
                    touch_depot(v, &mut se, &mut fe);
                }
            }
        }
        Slot::NewSe { .. } => {}
    }
    (se, fe)
}

/// Folds insertion offers from the single modified route into an
/// otherwise valid candidate pair.
fn merge_changed_route(
    ins: &Inserter,
    c: NodeId,
    restrict: Option<NodeId>,
    slot: Slot,
    cand: &mut Candidate,
) {
    let d = ins.instance.demand(c);
    let mut offer = |delta: Money, slot: Slot| offer_top2(delta, slot, &mut cand.best, &mut cand.second);
    match slot {
        Slot::Se { route, .. } => {
            let r = &ins.sol.se_routes[route];
            if let Some(t) = restrict {
                if r.home != t {
                    return;
                }
            }
            if ins.se_loads[route] + d > ins.instance.se_class().capacity {
                return;
            }
            if !ins.depot_can_take(r.home, d, 0) {
                return;
            }
            for pos in 0..=r.visits.len() {
                let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                let next = if pos == r.visits.len() { r.home } else { r.visits[pos] };
                let delta = (ins.instance.dist_se.get(prev, c) + ins.instance.dist_se.get(c, next)
                    - ins.instance.dist_se.get(prev, next))
                    * ins.se_rate();
                if ins.tw_ok_insert(r, pos, c) {
                    offer(delta, Slot::Se { route, pos });
                }
            }
        }
        Slot::Fe { route, .. } => {
            if restrict.is_some() || !ins.config.allow_direct_shipment {
                return;
            }
            if ins.fe_loads[route] + d > ins.instance.fe_class().capacity {
                return;
            }
            let r = &ins.sol.fe_routes[route];
            for pos in 0..=r.visits.len() {
                let prev = if pos == 0 { r.home } else { r.visits[pos - 1] };
                let next = if pos == r.visits.len() { r.home } else { r.visits[pos] };
                let delta = (ins.instance.dist_fe.get(prev, c) + ins.instance.dist_fe.get(c, next)
                    - ins.instance.dist_fe.get(prev, next))
                    * ins.fe_rate();
                if ins.tw_ok_insert(r, pos, c) {
                    offer(delta, Slot::Fe { route, pos });
                }
            }
        }
        Slot::NewSe { .. } => unreachable!("structural inserts force full recompute"),
    }
}

/// Reattaches removed micro-depots (heaviest first) into remaining FE
/// routes with their SE structure intact, then reinserts leftover
/// customers greedily.
pub fn merge_fe_routes(
    instance: &Instance,
    removal: RemovalResult,
    config: &Config,
) -> Result<Solution> {
    let mut ins = Inserter::new(instance, config, removal.partial);

    let mut subtrees = removal.detached;
    subtrees.sort_by_key(|s| {
        let load: Load =
            s.se_routes.iter().flat_map(|r| &r.visits).map(|&v| instance.demand(v)).sum();
        (std::cmp::Reverse(load), s.depot)
    });

    let mut reattached: BTreeSet<NodeId> = BTreeSet::new();
    for subtree in &subtrees {
        let t = subtree.depot;
        if ins.sol.open_depots.contains(&t) {
            continue;
        }
        let load: Load = subtree
            .se_routes
            .iter()
            .flat_map(|r| &r.visits)
            .map(|&v| instance.demand(v))
            .sum();
        if instance.depot(t).capacity < load {
            continue;
        }
        let hookup = ins
            .cheapest_fe_hookup(t, load)
            .map(|(delta, _, _)| delta)
            .unwrap_or_else(|| {
                2 * instance.dist_fe.get(NodeId(0), t) * ins.fe_rate()
                    + instance.fe_class().fixed_cost
            });
        ins.open_depot(t, load);
        for r in &subtree.se_routes {
            ins.sol.se_routes.push(r.clone());
            ins.se_loads.push(r.visits.iter().map(|&v| instance.demand(v)).sum());
            ins.se_route_counts[t.idx()] += 1;
        }
        ins.depot_loads[t.idx()] += load;
        reattached.extend(subtree.se_routes.iter().flat_map(|r| r.visits.iter().copied()));
        // Opening cost, SE travel, vehicle fixed costs and the FE
        // hookup all return with the subtree.
        let mut delta = instance.depot(t).opening_cost + hookup;
        for r in &subtree.se_routes {
            delta += crate::eval::evaluate_route(instance, r, None).1
                + instance.vehicle_classes[r.vehicle_class].fixed_cost;
        }
        ins.cost += delta;
    }

    let mut pending: Vec<NodeId> =
        removal.removed.iter().copied().filter(|c| !reattached.contains(c)).collect();
    pending.sort_by_key(|&c| (instance.demand(c), c));
    for c in pending {
        let (delta, slot) = choose_slot(&ins, c, &removal.swap_preferences)?;
        ins.insert(c, slot, delta);
    }
    Ok(ins.finish())
}
