//! Local search over SE routes: granular first-improvement sweeps of
//! five operators restricted to near neighbors. Every applied move
//! strictly decreases the total objective in integer arithmetic.

use crate::eval::total_cost;
use crate::model::*;
use crate::repair::instance_has_tw;

/// Per-customer nearest neighbors by SE distance, ascending, self
/// excluded.
#[derive(Debug, Clone)]
pub struct NeighborLists {
    lists: Vec<Vec<NodeId>>,
}

impl NeighborLists {
    #[inline]
    pub fn of(&self, c: NodeId) -> &[NodeId] {
        &self.lists[c.idx()]
    }

    pub fn size(&self) -> usize {
        self.lists.iter().map(|l| l.len()).max().unwrap_or(0)
    }
}

/// Builds the neighbor lists; list size is the fraction of the
/// customer count, rounded up and clamped to `|C| - 1`.
pub fn build_neighbor_lists(instance: &Instance, fraction: f64) -> NeighborLists {
    let n = instance.num_customers();
    let size = ((fraction * n as f64).ceil() as usize).clamp(1, n.saturating_sub(1).max(1));
    let mut lists = vec![Vec::new(); instance.num_nodes()];
    for c in instance.customer_ids() {
        let mut near: Vec<NodeId> = instance.customer_ids().filter(|&x| x != c).collect();
        near.sort_by_key(|&x| (instance.dist_se.get(c, x), x));
        near.truncate(size);
        lists[c.idx()] = near;
    }
    NeighborLists { lists }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsOp {
    RelocateIntra,
    RelocateInter,
    TwoOpt,
    TwoOptStar,
    Exchange,
}

impl LsOp {
    pub fn name(self) -> &'static str {
        match self {
            LsOp::RelocateIntra => "relocate-intra",
            LsOp::RelocateInter => "relocate-inter",
            LsOp::TwoOpt => "two-opt",
            LsOp::TwoOptStar => "two-opt-star",
            LsOp::Exchange => "exchange",
        }
    }
}

/// Operator sequence under a configuration; relocate intra-route only
/// when explicitly enabled.
pub fn enabled_ls_ops(config: &Config) -> Vec<LsOp> {
    let mut ops = Vec::with_capacity(5);
    if config.enable_relocate_intra {
        ops.push(LsOp::RelocateIntra);
    }
    ops.extend([LsOp::RelocateInter, LsOp::TwoOpt, LsOp::TwoOptStar, LsOp::Exchange]);
    ops
}

/// Bookkeeping shared by all move sweeps.
struct Ls<'a> {
    instance: &'a Instance,
    lists: &'a NeighborLists,
    sol: &'a mut Solution,
    /// Customer node -> (SE route index, position) when SE-served.
    pos: Vec<Option<(usize, usize)>>,
    se_loads: Vec<Load>,
    depot_loads: Vec<Load>,
    fe_loads: Vec<Load>,
    fe_server: Vec<Option<usize>>,
    cost: Money,
    has_tw: bool,
}

impl<'a> Ls<'a> {
    fn new(instance: &'a Instance, lists: &'a NeighborLists, sol: &'a mut Solution) -> Self {
        let cost = sol.cost_cache.unwrap_or_else(|| total_cost(instance, sol));
        let mut ls = Ls {
            instance,
            lists,
            sol,
            pos: Vec::new(),
            se_loads: Vec::new(),
            depot_loads: Vec::new(),
            fe_loads: Vec::new(),
            fe_server: Vec::new(),
            cost,
            has_tw: instance_has_tw(instance),
        };
        ls.rebuild_all();
        ls
    }

    fn rebuild_all(&mut self) {
        self.pos = vec![None; self.instance.num_nodes()];
        for (ri, r) in self.sol.se_routes.iter().enumerate() {
            for (pi, &v) in r.visits.iter().enumerate() {
                self.pos[v.idx()] = Some((ri, pi));
            }
        }
        self.se_loads = self
            .sol
            .se_routes
            .iter()
            .map(|r| r.visits.iter().map(|&v| self.instance.demand(v)).sum())
            .collect();
        self.depot_loads = self.sol.depot_se_loads(self.instance);
        self.fe_loads = self
            .sol
            .fe_routes
            .iter()
            .map(|r| {
                r.visits
                    .iter()
                    .map(|&v| {
                        if self.instance.is_depot(v) {
                            self.depot_loads[v.idx()]
                        } else {
                            self.instance.demand(v)
                        }
                    })
                    .sum()
            })
            .collect();
        self.fe_server = vec![None; self.instance.num_nodes()];
        for (fi, r) in self.sol.fe_routes.iter().enumerate() {
            for &v in &r.visits {
                if self.instance.is_depot(v) {
                    self.fe_server[v.idx()] = Some(fi);
                }
            }
        }
    }

    fn reindex_route(&mut self, ri: usize) {
        for (pi, &v) in self.sol.se_routes[ri].visits.iter().enumerate() {
            self.pos[v.idx()] = Some((ri, pi));
        }
    }

    #[inline]
    fn d(&self, a: NodeId, b: NodeId) -> Dist {
        self.instance.dist_se.get(a, b)
    }

    #[inline]
    fn rate(&self) -> Money {
        self.instance.se_class().cost_per_distance
    }

    fn node_at(&self, ri: usize, pi: isize) -> NodeId {
        let r = &self.sol.se_routes[ri];
        if pi < 0 || pi as usize >= r.visits.len() {
            r.home
        } else {
            r.visits[pi as usize]
        }
    }

    fn tw_ok(&self, ri: usize, candidate: &[NodeId]) -> bool {
        if !self.has_tw {
            return true;
        }
        let probe = Route {
            echelon: Echelon::Second,
            vehicle_class: self.sol.se_routes[ri].vehicle_class,
            home: self.sol.se_routes[ri].home,
            visits: candidate.to_vec(),
        };
        crate::eval::route_stats(self.instance, &probe, None).tw_feasible
    }

    fn check_cost(&self) {
        debug_assert_eq!(
            self.cost,
            total_cost(self.instance, self.sol),
            "move delta diverged from recomputation"
        );
    }

    /// Net `extra` demand arriving at the depot of route `to_ri` from
    /// the depot of route `from_ri`; same-depot moves shift nothing.
    fn depot_gain_ok(&self, from_ri: usize, to_ri: usize, extra: Load) -> bool {
        if extra <= 0 {
            return true;
        }
        let from_t = self.sol.se_routes[from_ri].home;
        let t = self.sol.se_routes[to_ri].home;
        if from_t == t {
            return true;
        }
        self.depot_loads[t.idx()] + extra <= self.instance.depot(t).capacity
    }

    /// FE slack between the supply trucks of two SE routes, when they
    /// differ.
    fn fe_shift_ok(&self, from_ri: usize, to_ri: usize, moved: Load) -> bool {
        if moved <= 0 {
            return true;
        }
        let from_t = self.sol.se_routes[from_ri].home;
        let to_t = self.sol.se_routes[to_ri].home;
        if from_t == to_t {
            return true;
        }
        match (self.fe_server[from_t.idx()], self.fe_server[to_t.idx()]) {
            (Some(a), Some(b)) if a == b => true,
            (_, Some(b)) => self.fe_loads[b] + moved <= self.instance.fe_class().capacity,
            (_, None) => false,
        }
    }

    /// Applies the load bookkeeping for `moved` demand leaving
    /// `from_ri` towards `to_ri`.
    fn shift_load(&mut self, from_ri: usize, to_ri: usize, moved: Load) {
        self.se_loads[from_ri] -= moved;
        self.se_loads[to_ri] += moved;
        let from_t = self.sol.se_routes[from_ri].home;
        let to_t = self.sol.se_routes[to_ri].home;
        if from_t != to_t {
            self.depot_loads[from_t.idx()] -= moved;
            self.depot_loads[to_t.idx()] += moved;
            let sa = self.fe_server[from_t.idx()];
            let sb = self.fe_server[to_t.idx()];
            if sa != sb {
                if let Some(a) = sa {
                    self.fe_loads[a] -= moved;
                }
                if let Some(b) = sb {
                    self.fe_loads[b] += moved;
                }
            }
        }
    }
}

/// One first-improvement sweep of a single operator. Returns whether
/// any move was applied.
pub fn sweep(
    instance: &Instance,
    sol: &mut Solution,
    lists: &NeighborLists,
    op: LsOp,
) -> bool {
    let mut ls = Ls::new(instance, lists, sol);
    let improved = ls.sweep_op(op);
    let cost = ls.cost;
    sol.cost_cache = Some(cost);
    improved
}

impl Ls<'_> {
    fn sweep_op(&mut self, op: LsOp) -> bool {
        let mut improved = false;
        for i in self.instance.customer_ids() {
            for jj in 0..self.lists_len(i) {
                let j = self.neighbor(i, jj);
                let applied = match op {
                    LsOp::RelocateIntra => self.try_relocate(i, j, true),
                    LsOp::RelocateInter => self.try_relocate(i, j, false),
                    LsOp::TwoOpt => self.try_two_opt(i, j),
                    LsOp::TwoOptStar => self.try_two_opt_star(i, j),
                    LsOp::Exchange => self.try_exchange(i, j),
                };
                if applied {
                    improved = true;
                    self.check_cost();
                }
            }
        }
        improved
    }

    fn lists_len(&self, i: NodeId) -> usize {
        self.lists.of(i).len()
    }

    fn neighbor(&self, i: NodeId, k: usize) -> NodeId {
        self.lists.of(i)[k]
    }


    /// Relocates customer i directly after neighbor j. `intra`
    /// restricts to the same route, otherwise to different routes.
    fn try_relocate(&mut self, i: NodeId, j: NodeId, intra: bool) -> bool {
        let Some((ra, pa)) = self.pos[i.idx()] else { return false };
        let Some((rb, pb)) = self.pos[j.idx()] else { return false };
        if intra != (ra == rb) {
            return false;
        }
        let d_i = self.instance.demand(i);
        let rate = self.rate();
        let prev_i = self.node_at(ra, pa as isize - 1);
        let next_i = self.node_at(ra, pa as isize + 1);
        let next_j = self.node_at(rb, pb as isize + 1);
        if next_j == i {
            // Already placed right after j.
            return false;
        }
        let removed = self.d(prev_i, i) + self.d(i, next_i) + self.d(j, next_j);
        let added = self.d(prev_i, next_i) + self.d(j, i) + self.d(i, next_j);
        let mut delta = (added - removed) * rate;
        let empties_route = !intra && self.sol.se_routes[ra].visits.len() == 1;
        if empties_route {
            delta -= self.instance.se_class().fixed_cost;
            // Closing the last route of a depot also drops its opening
            // cost and FE visit; handled by full recompute below.
        }
        if delta >= 0 && !empties_route {
            return false;
        }
        if !intra {
            if self.se_loads[rb] + d_i > self.instance.se_class().capacity {
                return false;
            }
            if !self.depot_gain_ok(ra, rb, d_i) || !self.fe_shift_ok(ra, rb, d_i) {
                return false;
            }
        }

        // Candidate sequences for the window check.
        let mut b_visits = self.sol.se_routes[rb].visits.clone();
        if intra {
            let mut a_visits = b_visits;
            a_visits.remove(pa);
            let jp = a_visits.iter().position(|&x| x == j).unwrap();
            a_visits.insert(jp + 1, i);
            if !self.tw_ok(ra, &a_visits) {
                return false;
            }
            if delta >= 0 {
                return false;
            }
            self.sol.se_routes[ra].visits = a_visits;
            self.reindex_route(ra);
            self.cost += delta;
            self.sol.cost_cache = Some(self.cost);
            return true;
        }
        let mut a_visits = self.sol.se_routes[ra].visits.clone();
        a_visits.remove(pa);
        b_visits.insert(pb + 1, i);
        if !self.tw_ok(rb, &b_visits) || (!a_visits.is_empty() && !self.tw_ok(ra, &a_visits)) {
            return false;
        }

        if empties_route {
            // Structural change: apply and recompute from scratch,
            // accepting only strict improvements.
            let mut candidate = self.sol.clone();
            candidate.se_routes[rb].visits = b_visits;
            candidate.se_routes.remove(ra);
            let home = self.sol.se_routes[ra].home;
            if !candidate.se_routes.iter().any(|r| r.home == home) {
                candidate.open_depots.remove(&home);
                for r in &mut candidate.fe_routes {
                    r.visits.retain(|&v| v != home);
                }
                candidate.fe_routes.retain(|r| !r.visits.is_empty());
            }
            let new_cost = total_cost(self.instance, &candidate);
            if new_cost >= self.cost {
                return false;
            }
            candidate.cost_cache = Some(new_cost);
            *self.sol = candidate;
            self.cost = new_cost;
            self.rebuild_all();
            return true;
        }
        if delta >= 0 {
            return false;
        }
        self.shift_load(ra, rb, d_i);
        self.sol.se_routes[ra].visits = a_visits;
        self.sol.se_routes[rb].visits = b_visits;
        self.pos[i.idx()] = None;
        self.reindex_route(ra);
        self.reindex_route(rb);
        self.cost += delta;
        self.sol.cost_cache = Some(self.cost);
        true
    }

    /// Reverses the segment between i and j within one route.
    fn try_two_opt(&mut self, i: NodeId, j: NodeId) -> bool {
        let Some((ra, pi)) = self.pos[i.idx()] else { return false };
        let Some((rb, pj)) = self.pos[j.idx()] else { return false };
        if ra != rb || pi == pj {
            return false;
        }
        let (a, b) = if pi < pj { (pi, pj) } else { (pj, pi) };
        let va = self.node_at(ra, a as isize);
        let vb = self.node_at(ra, b as isize);
        let va_next = self.node_at(ra, a as isize + 1);
        let vb_next = self.node_at(ra, b as isize + 1);
        if va_next == vb {
            // Adjacent pair: reversal swaps one arc pair symmetrically.
            // Still evaluate: delta may be zero but never negative for
            // symmetric matrices, so skip early.
            return false;
        }
        let rate = self.rate();
        let delta =
            (self.d(va, vb) + self.d(va_next, vb_next) - self.d(va, va_next) - self.d(vb, vb_next))
                * rate;
        if delta >= 0 {
            return false;
        }
        let mut visits = self.sol.se_routes[ra].visits.clone();
        visits[a + 1..=b].reverse();
        if !self.tw_ok(ra, &visits) {
            return false;
        }
        self.sol.se_routes[ra].visits = visits;
        self.reindex_route(ra);
        self.cost += delta;
        self.sol.cost_cache = Some(self.cost);
        true
    }

    /// Swaps the tails after i and after j between two routes.
    fn try_two_opt_star(&mut self, i: NodeId, j: NodeId) -> bool {
        let Some((ra, pi)) = self.pos[i.idx()] else { return false };
        let Some((rb, pj)) = self.pos[j.idx()] else { return false };
        if ra == rb {
            return false;
        }
        let rate = self.rate();
        let (head_a, tail_a) = self.sol.se_routes[ra].visits.split_at(pi + 1);
        let (head_b, tail_b) = self.sol.se_routes[rb].visits.split_at(pj + 1);
        let load = |nodes: &[NodeId]| -> Load {
            nodes.iter().map(|&v| self.instance.demand(v)).sum()
        };
        let (la_head, la_tail) = (load(head_a), load(tail_a));
        let (lb_head, lb_tail) = (load(head_b), load(tail_b));
        let cap = self.instance.se_class().capacity;
        if la_head + lb_tail > cap || lb_head + la_tail > cap {
            return false;
        }
        let gain_a = lb_tail - la_tail; // extra demand arriving at depot of ra
        if !self.depot_gain_ok(rb, ra, gain_a) || !self.depot_gain_ok(ra, rb, -gain_a) {
            return false;
        }
        if gain_a > 0 && !self.fe_shift_ok(rb, ra, gain_a) {
            return false;
        }
        if gain_a < 0 && !self.fe_shift_ok(ra, rb, -gain_a) {
            return false;
        }

        let home_a = self.sol.se_routes[ra].home;
        let home_b = self.sol.se_routes[rb].home;
        let seq_cost = |home: NodeId, visits: &[NodeId]| -> Dist {
            let mut d = 0;
            let mut prev = home;
            for &v in visits {
                d += self.d(prev, v);
                prev = v;
            }
            d + self.d(prev, home)
        };
        let old = seq_cost(home_a, &self.sol.se_routes[ra].visits)
            + seq_cost(home_b, &self.sol.se_routes[rb].visits);
        let mut new_a = head_a.to_vec();
        new_a.extend_from_slice(tail_b);
        let mut new_b = head_b.to_vec();
        new_b.extend_from_slice(tail_a);
        let new = seq_cost(home_a, &new_a) + seq_cost(home_b, &new_b);
        let delta = (new - old) * rate;
        if delta >= 0 {
            return false;
        }
        if !self.tw_ok(ra, &new_a) || !self.tw_ok(rb, &new_b) {
            return false;
        }
        self.shift_load(rb, ra, lb_tail);
        self.shift_load(ra, rb, la_tail);
        self.sol.se_routes[ra].visits = new_a;
        self.sol.se_routes[rb].visits = new_b;
        self.reindex_route(ra);
        self.reindex_route(rb);
        self.cost += delta;
        self.sol.cost_cache = Some(self.cost);
        true
    }

    /// Swaps customers i and j between two different routes.
    fn try_exchange(&mut self, i: NodeId, j: NodeId) -> bool {
        let Some((ra, pa)) = self.pos[i.idx()] else { return false };
        let Some((rb, pb)) = self.pos[j.idx()] else { return false };
        if ra == rb {
            return false;
        }
        let d_i = self.instance.demand(i);
        let d_j = self.instance.demand(j);
        let cap = self.instance.se_class().capacity;
        if self.se_loads[ra] - d_i + d_j > cap || self.se_loads[rb] - d_j + d_i > cap {
            return false;
        }
        let gain_a = d_j - d_i;
        if !self.depot_gain_ok(rb, ra, gain_a) || !self.depot_gain_ok(ra, rb, -gain_a) {
            return false;
        }
        if gain_a > 0 && !self.fe_shift_ok(rb, ra, gain_a) {
            return false;
        }
        if gain_a < 0 && !self.fe_shift_ok(ra, rb, -gain_a) {
            return false;
        }
        let rate = self.rate();
        let prev_i = self.node_at(ra, pa as isize - 1);
        let next_i = self.node_at(ra, pa as isize + 1);
        let prev_j = self.node_at(rb, pb as isize - 1);
        let next_j = self.node_at(rb, pb as isize + 1);
        let removed = self.d(prev_i, i) + self.d(i, next_i) + self.d(prev_j, j) + self.d(j, next_j);
        let added = self.d(prev_i, j) + self.d(j, next_i) + self.d(prev_j, i) + self.d(i, next_j);
        let delta = (added - removed) * rate;
        if delta >= 0 {
            return false;
        }
        let mut a_visits = self.sol.se_routes[ra].visits.clone();
        let mut b_visits = self.sol.se_routes[rb].visits.clone();
        a_visits[pa] = j;
        b_visits[pb] = i;
        if !self.tw_ok(ra, &a_visits) || !self.tw_ok(rb, &b_visits) {
            return false;
        }
        self.shift_load(ra, rb, d_i);
        self.shift_load(rb, ra, d_j);
        self.sol.se_routes[ra].visits = a_visits;
        self.sol.se_routes[rb].visits = b_visits;
        self.reindex_route(ra);
        self.reindex_route(rb);
        self.cost += delta;
        self.sol.cost_cache = Some(self.cost);
        true
    }
}

/// Sequentially applies the enabled operators until none improves:
/// the result is a fixed point of the enabled move set.
pub fn local_search(
    instance: &Instance,
    sol: &mut Solution,
    lists: &NeighborLists,
    config: &Config,
) {
    let ops = enabled_ls_ops(config);
    let mut ls = Ls::new(instance, lists, sol);
    loop {
        let mut improved = false;
        for &op in &ops {
            improved |= ls.sweep_op(op);
        }
        if !improved {
            break;
        }
    }
    let cost = ls.cost;
    sol.cost_cache = Some(cost);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::initial_solution;
    use crate::eval::check_feasibility;
    use crate::test_fixtures::{benchmark_like_instance, t1_instance, tiny_random_instance};
    use std::collections::{BTreeSet, VecDeque};

    /// One depot at the origin, four customers on a unit-10 square.
    fn square_instance() -> Instance {
        let mut inst = tiny_random_instance(4, 1, 0);
        inst.coords = vec![(50.0, 50.0), (0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0), (5.0, 20.0)];
        inst.coords.truncate(6);
        let (fe, se) = crate::io::scaled_euclid_matrices(&inst.coords, Rounding::HalfUp);
        inst.dist_fe = fe;
        inst.dist_se = se;
        for c in &mut inst.customers {
            c.demand = 10;
        }
        inst.micro_depots[0].capacity = 100;
        inst.vehicle_classes[0].capacity = 150;
        inst.vehicle_classes[1].capacity = 100;
        inst
    }

    fn square_solution(inst: &Instance, order: &[u32]) -> Solution {
        let mut sol = Solution::empty();
        sol.open_depots.insert(NodeId(1));
        sol.se_routes
            .push(Route::new_se(inst, NodeId(1), order.iter().map(|&i| NodeId(i)).collect()));
        sol.fe_routes.push(Route::new_fe(inst, vec![NodeId(1)]));
        sol.cost_cache = None;
        sol
    }

    #[test]
    fn neighbor_lists_full_fraction() {
        let inst = t1_instance();
        let lists = build_neighbor_lists(&inst, 1.0);
        for c in inst.customer_ids() {
            let l = lists.of(c);
            assert_eq!(l.len(), 3);
            assert!(!l.contains(&c));
            for w in l.windows(2) {
                assert!(inst.dist_se.get(c, w[0]) <= inst.dist_se.get(c, w[1]));
            }
        }
        let again = build_neighbor_lists(&inst, 1.0);
        for c in inst.customer_ids() {
            assert_eq!(lists.of(c), again.of(c));
        }
    }

    #[test]
    fn neighbor_lists_collinear_size_one() {
        // Three collinear customers at 12, 14, 34: nearest pairs are
        // (12->14), (14->12), (34->14).
        let mut inst = t1_instance();
        inst.customers.truncate(3);
        inst.coords.truncate(6);
        let (fe, se) = crate::io::scaled_euclid_matrices(&inst.coords, Rounding::HalfUp);
        inst.dist_fe = fe;
        inst.dist_se = se;
        let lists = build_neighbor_lists(&inst, 0.3);
        assert_eq!(lists.of(NodeId(3)), &[NodeId(4)]);
        assert_eq!(lists.of(NodeId(4)), &[NodeId(3)]);
        assert_eq!(lists.of(NodeId(5)), &[NodeId(4)]);
    }

    /// All segment reversals of one route, costed by full recompute.
    fn best_reversal_delta(inst: &Instance, sol: &Solution) -> Money {
        let base = total_cost(inst, sol);
        let mut best = 0;
        let len = sol.se_routes[0].visits.len();
        for a in 0..len {
            for b in a + 1..len {
                let mut cand = sol.clone();
                cand.se_routes[0].visits[a..=b].reverse();
                cand.cost_cache = None;
                best = best.min(total_cost(inst, &cand) - base);
            }
        }
        best
    }

    #[test]
    fn two_opt_uncrosses_square() {
        let inst = square_instance();
        // Crossing order 2-4-3-5 (positions around the square).
        let mut sol = square_solution(&inst, &[2, 4, 3, 5]);
        let lists = build_neighbor_lists(&inst, 1.0);
        assert!(best_reversal_delta(&inst, &sol) < 0, "fixture starts crossed");
        let improved = sweep(&inst, &mut sol, &lists, LsOp::TwoOpt);
        assert!(improved);
        let set: BTreeSet<NodeId> = sol.se_routes[0].visits.iter().copied().collect();
        assert_eq!(set.len(), 4, "reversal preserves the customer set");
        // Sweeps terminate exactly where enumeration of all segment
        // reversals finds no further gain.
        while sweep(&inst, &mut sol, &lists, LsOp::TwoOpt) {}
        assert_eq!(best_reversal_delta(&inst, &sol), 0);
    }

    #[test]
    fn two_opt_identity_on_optimal_route() {
        let inst = square_instance();
        let mut sol = square_solution(&inst, &[2, 4, 3, 5]);
        let lists = build_neighbor_lists(&inst, 1.0);
        while sweep(&inst, &mut sol, &lists, LsOp::TwoOpt) {}
        let frozen = sol.clone();
        assert!(!sweep(&inst, &mut sol, &lists, LsOp::TwoOpt));
        assert_eq!(sol.se_routes, frozen.se_routes);
    }

    #[test]
    fn relocate_intra_improves_out_of_place_customer() {
        let inst = square_instance();
        // 5 sits far north: order 2-5-3-4 detours; 2-3-4-5 is better.
        let mut sol = square_solution(&inst, &[2, 5, 3, 4]);
        let lists = build_neighbor_lists(&inst, 1.0);
        let before = total_cost(&inst, &sol);
        let improved = sweep(&inst, &mut sol, &lists, LsOp::RelocateIntra);
        assert!(improved);
        let after = total_cost(&inst, &sol);
        assert!(after < before);
        assert_eq!(sol.cost_cache, Some(after));
    }

    #[test]
    fn relocate_inter_respects_capacity_and_moves_load() {
        let inst = t1_instance();
        let mut sol = crate::test_fixtures::t1_two_depot_solution(&inst);
        let lists = build_neighbor_lists(&inst, 1.0);
        // SE capacity 25 and all demands 20: every inter-route move is
        // capacity-infeasible, so nothing changes.
        assert!(!sweep(&inst, &mut sol, &lists, LsOp::RelocateInter));

        // With more slack, c2 joins c1's route on depot 1 and its old
        // route disappears.
        let mut roomy = t1_instance();
        roomy.vehicle_classes[1].capacity = 60;
        let mut sol2 = crate::test_fixtures::t1_two_depot_solution(&roomy);
        let before = total_cost(&roomy, &sol2);
        let improved = sweep(&roomy, &mut sol2, &lists, LsOp::RelocateInter);
        assert!(improved);
        let after = total_cost(&roomy, &sol2);
        assert!(after < before);
        assert!(check_feasibility(&roomy, &sol2, &Config::default()).is_empty());
        // Depot loads recompute consistently.
        let loads = sol2.depot_se_loads(&roomy);
        let total: Load = loads.iter().sum();
        assert_eq!(total, roomy.total_demand());
    }

    #[test]
    fn two_opt_star_swaps_tails_between_depots() {
        // Two depots, each with a two-customer route whose tail lies
        // closer to the other depot.
        let mut inst = benchmark_like_instance(4, 2, 0);
        inst.coords = vec![
            (0.0, 0.0),
            (0.0, 10.0),
            (40.0, 10.0),
            (2.0, 10.0),
            (38.0, 12.0),
            (42.0, 10.0),
            (4.0, 12.0),
        ];
        let (fe, se) = crate::io::scaled_euclid_matrices(&inst.coords, Rounding::HalfUp);
        inst.dist_fe = fe;
        inst.dist_se = se;
        for c in &mut inst.customers {
            c.demand = 10;
        }
        let mut sol = Solution::empty();
        sol.open_depots.extend([NodeId(1), NodeId(2)]);
        // Route at depot 1 ends far east; route at depot 2 ends far west.
        sol.se_routes.push(Route::new_se(&inst, NodeId(1), vec![NodeId(3), NodeId(4)]));
        sol.se_routes.push(Route::new_se(&inst, NodeId(2), vec![NodeId(5), NodeId(6)]));
        sol.fe_routes.push(Route::new_fe(&inst, vec![NodeId(1)]));
        sol.fe_routes.push(Route::new_fe(&inst, vec![NodeId(2)]));
        let before = total_cost(&inst, &sol);
        let lists = build_neighbor_lists(&inst, 1.0);
        let improved = sweep(&inst, &mut sol, &lists, LsOp::TwoOptStar);
        assert!(improved);
        assert!(total_cost(&inst, &sol) < before);
        assert_eq!(sol.se_routes[0].home, NodeId(1));
        assert_eq!(sol.se_routes[1].home, NodeId(2));
        assert!(check_feasibility(&inst, &sol, &Config::default()).is_empty());
    }

    #[test]
    fn exchange_skips_zero_delta_and_applies_improvements() {
        let inst = t1_instance();
        let mut sol = crate::test_fixtures::t1_two_depot_solution(&inst);
        let lists = build_neighbor_lists(&inst, 1.0);
        // Symmetric layout: all exchanges have non-negative delta.
        assert!(!sweep(&inst, &mut sol, &lists, LsOp::Exchange));

        // Cross the assignment: c2 <-> c3 swap pays off.
        let mut crossed = crate::test_fixtures::t1_two_depot_solution(&inst);
        crossed.se_routes[1] = Route::new_se(&inst, NodeId(1), vec![NodeId(5)]);
        crossed.se_routes[2] = Route::new_se(&inst, NodeId(2), vec![NodeId(4)]);
        crossed.cost_cache = None;
        let before = total_cost(&inst, &crossed);
        let improved = sweep(&inst, &mut crossed, &lists, LsOp::Exchange);
        assert!(improved);
        assert!(total_cost(&inst, &crossed) < before);
        assert!(check_feasibility(&inst, &crossed, &Config::default()).is_empty());
    }

    #[test]
    fn local_search_is_monotone_and_idempotent() {
        for seed in 0..3 {
            let inst = benchmark_like_instance(20, 5, seed);
            let config = Config::default();
            let mut sol = initial_solution(&inst, &config).unwrap();
            let lists = build_neighbor_lists(&inst, config.neighbor_fraction);
            let before = total_cost(&inst, &sol);
            local_search(&inst, &mut sol, &lists, &config);
            let after = total_cost(&inst, &sol);
            assert!(after <= before);
            assert_eq!(sol.cost_cache, Some(after));
            assert!(check_feasibility(&inst, &sol, &config).is_empty());
            let frozen = sol.clone();
            local_search(&inst, &mut sol, &lists, &config);
            assert_eq!(sol, frozen, "fixed point");
        }
    }

    /// Independent move enumerator: applies one strictly improving
    /// move of any enabled kind, by brute force over full solutions.
    fn improving_neighbors(
        inst: &Instance,
        config: &Config,
        lists: &NeighborLists,
        sol: &Solution,
    ) -> Vec<Solution> {
        let base = total_cost(inst, sol);
        let mut out = Vec::new();
        let mut push = |mut cand: Solution| {
            cand.cost_cache = None;
            if check_feasibility(inst, &cand, config).is_empty() && total_cost(inst, &cand) < base {
                out.push(cand);
            }
        };
        let find = |sol: &Solution, c: NodeId| -> Option<(usize, usize)> {
            sol.se_routes.iter().enumerate().find_map(|(ri, r)| {
                r.visits.iter().position(|&v| v == c).map(|p| (ri, p))
            })
        };
        for i in inst.customer_ids() {
            for &j in lists.of(i) {
                let (Some((ra, pa)), Some((rb, pb))) = (find(sol, i), find(sol, j)) else {
                    continue;
                };
                // Relocate i after j (inter-route only by default).
                if ra != rb {
                    let mut cand = sol.clone();
                    cand.se_routes[ra].visits.remove(pa);
                    let jp = cand.se_routes[rb].visits.iter().position(|&v| v == j).unwrap();
                    cand.se_routes[rb].visits.insert(jp + 1, i);
                    if cand.se_routes[ra].visits.is_empty() {
                        let home = cand.se_routes[ra].home;
                        cand.se_routes.remove(ra);
                        if !cand.se_routes.iter().any(|r| r.home == home) {
                            cand.open_depots.remove(&home);
                            for r in &mut cand.fe_routes {
                                r.visits.retain(|&v| v != home);
                            }
                            cand.fe_routes.retain(|r| !r.visits.is_empty());
                        }
                    }
                    push(cand);
                    // Exchange i and j.
                    let mut swap = sol.clone();
                    swap.se_routes[ra].visits[pa] = j;
                    swap.se_routes[rb].visits[pb] = i;
                    push(swap);
                    // Tail swap after i and after j.
                    let mut star = sol.clone();
                    let tail_a: Vec<NodeId> = star.se_routes[ra].visits.split_off(pa + 1);
                    let tail_b: Vec<NodeId> = star.se_routes[rb].visits.split_off(pb + 1);
                    star.se_routes[ra].visits.extend(tail_b);
                    star.se_routes[rb].visits.extend(tail_a);
                    push(star);
                } else if pa != pb {
                    // Segment reversal.
                    let (a, b) = if pa < pb { (pa, pb) } else { (pb, pa) };
                    let mut cand = sol.clone();
                    cand.se_routes[ra].visits[a + 1..=b].reverse();
                    push(cand);
                }
            }
        }
        out
    }

    #[test]
    fn local_search_output_is_a_fixed_point_of_the_move_set() {
        for seed in 0..6 {
            let inst = tiny_random_instance(6, 2, seed);
            let config = Config::default();
            let mut sol = initial_solution(&inst, &config).unwrap();
            let lists = build_neighbor_lists(&inst, 1.0);
            local_search(&inst, &mut sol, &lists, &config);
            assert!(
                improving_neighbors(&inst, &config, &lists, &sol).is_empty(),
                "seed {seed}: an enumerated move still improves"
            );
        }
    }

    #[test]
    fn local_search_reaches_best_reachable_on_small_fixture() {
        let inst = tiny_random_instance(6, 2, 3);
        let config = Config::default();
        let start = initial_solution(&inst, &config).unwrap();
        let lists = build_neighbor_lists(&inst, 1.0);

        // Exhaustive search over the improving-move graph.
        let key = |s: &Solution| -> String {
            let mut routes: Vec<String> = s
                .se_routes
                .iter()
                .map(|r| {
                    format!(
                        "{}:{}",
                        r.home,
                        r.visits.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                    )
                })
                .collect();
            routes.sort();
            routes.join(";")
        };
        let mut best_reachable = total_cost(&inst, &start);
        let mut seen = BTreeSet::new();
        seen.insert(key(&start));
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(s) = queue.pop_front() {
            for next in improving_neighbors(&inst, &config, &lists, &s) {
                if seen.insert(key(&next)) {
                    best_reachable = best_reachable.min(total_cost(&inst, &next));
                    queue.push_back(next);
                }
            }
        }

        let mut sol = start;
        local_search(&inst, &mut sol, &lists, &config);
        assert_eq!(total_cost(&inst, &sol), best_reachable);
    }
}
