//! Domain types shared by every part of the solver.
//!
//! Node indexing is positional: node 0 is the main depot, nodes
//! `1..=m` are the micro-depots and nodes `m+1..m+n+1` are the
//! customers. Operators index the distance matrices directly with
//! these positions.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Money in instance-defined integer units (see [`Instance::money_scale`]).
pub type Money = i64;
/// Demand / capacity quantity units.
pub type Load = i64;
/// Time units (travel times default to distance units).
pub type Time = i64;
/// Distance in instance-defined integer units.
pub type Dist = i64;

/// Sentinel for an unconstrained "latest" time. Kept well below
/// `i64::MAX` so segment concatenation never overflows.
pub const TIME_INF: Time = i64::MAX / 4;

/// Position of a node in the instance. 0 = main depot, then
/// micro-depots, then customers.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub earliest: Time,
    pub latest: Time,
}

impl TimeWindow {
    pub fn new(earliest: Time, latest: Time) -> Self {
        Self { earliest, latest }
    }

    /// The unconstrained window `[0, +inf)`.
    pub fn unbounded() -> Self {
        Self { earliest: 0, latest: TIME_INF }
    }

    pub fn is_unbounded(&self) -> bool {
        self.earliest == 0 && self.latest >= TIME_INF
    }
}

impl Default for TimeWindow {
    fn default() -> Self {
        Self::unbounded()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: NodeId,
    pub demand: Load,
    pub service_time: Time,
    #[serde(default)]
    pub time_window: TimeWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepotKind {
    Stationary,
    Mobile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroDepot {
    pub id: NodeId,
    pub kind: DepotKind,
    pub capacity: Load,
    pub opening_cost: Money,
    #[serde(default)]
    pub operating_window: TimeWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Echelon {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleClass {
    pub echelon: Echelon,
    pub capacity: Load,
    pub fixed_cost: Money,
    pub cost_per_distance: Money,
    /// `None` means an unbounded fleet.
    pub fleet_limit: Option<u32>,
    pub work_window: Option<TimeWindow>,
}

/// Square integer matrix indexed by node position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0; n * n] }
    }

    #[inline]
    pub fn get(&self, i: NodeId, j: NodeId) -> i64 {
        self.data[i.idx() * self.n + j.idx()]
    }

    #[inline]
    pub fn set(&mut self, i: NodeId, j: NodeId, v: i64) {
        self.data[i.idx() * self.n + j.idx()] = v;
    }
}

/// How distances were rounded when scaling coordinates to integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Rounding {
    /// Round half away from zero after scaling.
    #[default]
    HalfUp,
    /// Round up after scaling.
    Ceil,
}

/// Rule from which the distance matrices can be rebuilt from
/// coordinates, allowing compact serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceRule {
    /// Euclidean x100 on both echelons, FE additionally doubled.
    ScaledEuclid { rounding: Rounding },
    /// Plain Euclidean rounded to integers (coordinates in metres).
    PlanarMeters,
}

/// Immutable problem data. Shared read-only between threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    /// Planar coordinates per node (depot 0 first).
    pub coords: Vec<(f64, f64)>,
    pub micro_depots: Vec<MicroDepot>,
    pub customers: Vec<Customer>,
    pub vehicle_classes: Vec<VehicleClass>,
    pub dist_fe: Matrix,
    pub dist_se: Matrix,
    /// Travel times; `None` means travel time equals distance.
    pub travel_time_fe: Option<Matrix>,
    pub travel_time_se: Option<Matrix>,
    /// Best-known solution value, in money units, when published.
    pub bks: Option<Money>,
    /// Money units per display unit (1 for benchmarks, 1_000_000 for
    /// micro-euro case-study instances).
    pub money_scale: i64,
    /// Kilometres per FE / SE distance unit, for emission reporting.
    pub km_per_unit_fe: f64,
    pub km_per_unit_se: f64,
    /// When set, the matrices are derivable from the coordinates and
    /// serialization may omit them.
    pub distance_rule: Option<DistanceRule>,
}

impl Instance {
    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn num_depots(&self) -> usize {
        self.micro_depots.len()
    }

    #[inline]
    pub fn num_customers(&self) -> usize {
        self.customers.len()
    }

    #[inline]
    pub fn is_main_depot(&self, id: NodeId) -> bool {
        id.0 == 0
    }

    #[inline]
    pub fn is_depot(&self, id: NodeId) -> bool {
        id.0 >= 1 && id.idx() <= self.num_depots()
    }

    #[inline]
    pub fn is_customer(&self, id: NodeId) -> bool {
        id.idx() > self.num_depots() && id.idx() < self.num_nodes()
    }

    pub fn depot_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (1..=self.num_depots() as u32).map(NodeId)
    }

    pub fn customer_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        let lo = self.num_depots() as u32 + 1;
        (lo..self.num_nodes() as u32).map(NodeId)
    }

    #[inline]
    pub fn depot(&self, id: NodeId) -> &MicroDepot {
        &self.micro_depots[id.idx() - 1]
    }

    #[inline]
    pub fn customer(&self, id: NodeId) -> &Customer {
        &self.customers[id.idx() - 1 - self.num_depots()]
    }

    /// Demand of a node: customer demand, 0 for depots.
    #[inline]
    pub fn demand(&self, id: NodeId) -> Load {
        if self.is_customer(id) {
            self.customer(id).demand
        } else {
            0
        }
    }

    /// Service time at a node (0 at depots).
    #[inline]
    pub fn service_time(&self, id: NodeId) -> Time {
        if self.is_customer(id) {
            self.customer(id).service_time
        } else {
            0
        }
    }

    /// Time window of a node: customer window, depot operating window,
    /// unbounded for the main depot.
    #[inline]
    pub fn window(&self, id: NodeId) -> TimeWindow {
        if self.is_customer(id) {
            self.customer(id).time_window
        } else if self.is_depot(id) {
            self.depot(id).operating_window
        } else {
            TimeWindow::unbounded()
        }
    }

    pub fn fe_class_idx(&self) -> usize {
        self.vehicle_classes
            .iter()
            .position(|v| v.echelon == Echelon::First)
            .expect("instance has no first-echelon vehicle class")
    }

    pub fn se_class_idx(&self) -> usize {
        self.vehicle_classes
            .iter()
            .position(|v| v.echelon == Echelon::Second)
            .expect("instance has no second-echelon vehicle class")
    }

    pub fn fe_class(&self) -> &VehicleClass {
        &self.vehicle_classes[self.fe_class_idx()]
    }

    pub fn se_class(&self) -> &VehicleClass {
        &self.vehicle_classes[self.se_class_idx()]
    }

    #[inline]
    pub fn dist(&self, echelon: Echelon, i: NodeId, j: NodeId) -> Dist {
        match echelon {
            Echelon::First => self.dist_fe.get(i, j),
            Echelon::Second => self.dist_se.get(i, j),
        }
    }

    #[inline]
    pub fn travel_time(&self, echelon: Echelon, i: NodeId, j: NodeId) -> Time {
        match echelon {
            Echelon::First => match &self.travel_time_fe {
                Some(m) => m.get(i, j),
                None => self.dist_fe.get(i, j),
            },
            Echelon::Second => match &self.travel_time_se {
                Some(m) => m.get(i, j),
                None => self.dist_se.get(i, j),
            },
        }
    }

    pub fn total_demand(&self) -> Load {
        self.customers.iter().map(|c| c.demand).sum()
    }

    pub fn total_depot_capacity(&self) -> Load {
        self.micro_depots.iter().map(|d| d.capacity).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub echelon: Echelon,
    pub vehicle_class: usize,
    /// Main depot for FE routes, a micro-depot for SE routes.
    pub home: NodeId,
    /// FE visits may mix micro-depots and direct-shipment customers;
    /// SE visits are customers only.
    pub visits: Vec<NodeId>,
}

impl Route {
    pub fn new_se(instance: &Instance, home: NodeId, visits: Vec<NodeId>) -> Self {
        Route {
            echelon: Echelon::Second,
            vehicle_class: instance.se_class_idx(),
            home,
            visits,
        }
    }

    pub fn new_fe(instance: &Instance, visits: Vec<NodeId>) -> Self {
        Route {
            echelon: Echelon::First,
            vehicle_class: instance.fe_class_idx(),
            home: NodeId(0),
            visits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Solution {
    pub fe_routes: Vec<Route>,
    pub se_routes: Vec<Route>,
    pub open_depots: BTreeSet<NodeId>,
    /// Lazily maintained total cost; `None` after structural edits that
    /// did not update it.
    pub cost_cache: Option<Money>,
}

impl Solution {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Demand routed from each depot in the second echelon, indexed by
    /// node position (0 for non-depot slots).
    pub fn depot_se_loads(&self, instance: &Instance) -> Vec<Load> {
        let mut loads = vec![0; instance.num_nodes()];
        for r in &self.se_routes {
            let load: Load = r.visits.iter().map(|&v| instance.demand(v)).sum();
            loads[r.home.idx()] += load;
        }
        loads
    }

    /// Number of SE routes homed at each depot position.
    pub fn depot_route_counts(&self, instance: &Instance) -> Vec<u32> {
        let mut counts = vec![0; instance.num_nodes()];
        for r in &self.se_routes {
            counts[r.home.idx()] += 1;
        }
        counts
    }

    /// Customers served directly on FE routes.
    pub fn direct_customers(&self, instance: &Instance) -> Vec<NodeId> {
        let mut out = Vec::new();
        for r in &self.fe_routes {
            for &v in &r.visits {
                if instance.is_customer(v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn invalidate_cost(&mut self) {
        self.cost_cache = None;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TemperatureSchedule {
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum InitMethod {
    /// Capacitated facility location heuristic.
    #[default]
    Cflp,
    KMeans,
}

/// Search parameters. Defaults are the tuned configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub max_iter: u64,
    pub lambda_smoothing: f64,
    /// (new global best, improves current, accepted, rejected).
    pub scores: [f64; 4],
    pub t_init: f64,
    pub t_final: f64,
    pub temperature_schedule: TemperatureSchedule,
    /// Cooling factor for non-linear schedules; unused by `Linear`.
    pub temp_alpha: f64,
    /// Neighbor list size as a fraction of the customer count.
    pub neighbor_fraction: f64,
    /// Upper bound on removals for large destroy operators, as a
    /// fraction of the customer count.
    pub destroy_bound: f64,
    pub ls_every: u64,
    pub sc_every: u64,
    pub enable_relocate_intra: bool,
    pub enable_partial_microdepot_removal: bool,
    pub allow_direct_shipment: bool,
    pub strict_depot_vehicle_capacity: bool,
    /// Use the best solution instead of the current one as the
    /// simulated-annealing reference cost.
    pub sa_reference_best: bool,
    /// Alternative correction rule: keep a duplicated customer on the
    /// route where removing it would save the least.
    pub correction_keep_least_saving: bool,
    pub init_method: InitMethod,
    /// Iteration budget for the search after decomposition; defaults
    /// to `max_iter / 10` when unset.
    pub decomp_iters: Option<u64>,
    pub rng_seed: u64,
    pub collect_trace: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_iter: 100_000,
            lambda_smoothing: 0.8,
            scores: [10.0, 5.0, 1.0, 0.0],
            t_init: 10.0,
            t_final: 1.0,
            temperature_schedule: TemperatureSchedule::Linear,
            temp_alpha: 0.80,
            neighbor_fraction: 0.2,
            destroy_bound: 1.0,
            ls_every: 1,
            sc_every: 2000,
            enable_relocate_intra: false,
            enable_partial_microdepot_removal: false,
            allow_direct_shipment: true,
            strict_depot_vehicle_capacity: false,
            sa_reference_best: false,
            correction_keep_least_saving: false,
            init_method: InitMethod::Cflp,
            decomp_iters: None,
            rng_seed: 0,
            collect_trace: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> crate::Result<()> {
        if !(0.0..=1.0).contains(&self.lambda_smoothing) {
            return Err(crate::Error::InvalidInput(format!(
                "lambda_smoothing {} outside [0, 1]",
                self.lambda_smoothing
            )));
        }
        if !(self.t_init >= self.t_final && self.t_final > 0.0) {
            return Err(crate::Error::InvalidInput(format!(
                "temperatures must satisfy t_init >= t_final > 0, got {} / {}",
                self.t_init, self.t_final
            )));
        }
        if self.ls_every < 1 || self.sc_every < 1 {
            return Err(crate::Error::InvalidInput(
                "iteration counts must be >= 1".into(),
            ));
        }
        if !(self.neighbor_fraction > 0.0 && self.neighbor_fraction <= 1.0) {
            return Err(crate::Error::InvalidInput(format!(
                "neighbor_fraction {} outside (0, 1]",
                self.neighbor_fraction
            )));
        }
        Ok(())
    }
}

/// Checks the structural invariants of an instance. Returns one
/// description per violation; an empty list means the instance is
/// well-formed.
pub fn validate_instance(instance: &Instance) -> Vec<String> {
    let mut v = Vec::new();
    let n = instance.num_nodes();
    if n != 1 + instance.num_depots() + instance.num_customers() {
        v.push(format!(
            "node count {} != 1 + {} depots + {} customers",
            n,
            instance.num_depots(),
            instance.num_customers()
        ));
    }
    for c in &instance.customers {
        if c.demand < 0 {
            v.push(format!("customer {}: negative demand", c.id));
        }
        if c.time_window.earliest > c.time_window.latest {
            v.push(format!("customer {}: time window earliest > latest", c.id));
        }
        if c.service_time < 0 {
            v.push(format!("customer {}: negative service time", c.id));
        }
    }
    for d in &instance.micro_depots {
        if d.capacity <= 0 {
            v.push(format!("micro-depot {}: non-positive capacity", d.id));
        }
        if d.opening_cost < 0 {
            v.push(format!("micro-depot {}: negative opening cost", d.id));
        }
        if d.operating_window.earliest > d.operating_window.latest {
            v.push(format!("micro-depot {}: operating window earliest > latest", d.id));
        }
    }
    for c in &instance.vehicle_classes {
        if c.capacity <= 0 {
            v.push("vehicle class: non-positive capacity".to_string());
        }
        if c.fixed_cost < 0 {
            v.push("vehicle class: negative fixed cost".to_string());
        }
        if c.cost_per_distance < 0 {
            v.push("vehicle class: negative distance cost".to_string());
        }
    }
    if !instance.vehicle_classes.iter().any(|c| c.echelon == Echelon::First) {
        v.push("no first-echelon vehicle class".to_string());
    }
    if !instance.vehicle_classes.iter().any(|c| c.echelon == Echelon::Second) {
        v.push("no second-echelon vehicle class".to_string());
    }
    for (name, m) in [("dist_fe", &instance.dist_fe), ("dist_se", &instance.dist_se)] {
        if m.n != n || m.data.len() != n * n {
            v.push(format!("{name}: dimension {} != node count {n}", m.n));
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let x = m.data[i * n + j];
                if x < 0 {
                    v.push(format!("{name}[{i}][{j}]: negative entry {x}"));
                }
                if i == j && x != 0 {
                    v.push(format!("{name}[{i}][{i}]: nonzero diagonal {x}"));
                }
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::t1_instance;

    #[test]
    fn t1_is_well_formed() {
        let inst = t1_instance();
        assert_eq!(validate_instance(&inst), Vec::<String>::new());
        assert_eq!(inst.num_nodes(), 7);
        assert!(inst.is_depot(NodeId(1)));
        assert!(inst.is_customer(NodeId(3)));
        assert!(!inst.is_customer(NodeId(0)));
    }

    #[test]
    fn negative_demand_is_reported() {
        let mut inst = t1_instance();
        inst.customers[0].demand = -1;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("negative demand"), "{v:?}");
        assert!(v[0].contains("3"), "violation names the node: {v:?}");
    }

    #[test]
    fn negative_matrix_entry_is_reported() {
        let mut inst = t1_instance();
        inst.dist_se.set(NodeId(1), NodeId(2), -5);
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("dist_se[1][2]"), "{v:?}");
    }

    #[test]
    fn config_default_is_valid_and_matches_tuning() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(c.max_iter, 100_000);
        assert_eq!(c.scores, [10.0, 5.0, 1.0, 0.0]);
        assert_eq!(c.sc_every, 2000);
        assert!(!c.enable_relocate_intra);
        assert!(!c.enable_partial_microdepot_removal);
    }

    #[test]
    fn config_rejects_bad_temperatures() {
        let mut c = Config::default();
        c.t_final = 0.0;
        assert!(c.validate().is_err());
        c.t_final = 20.0;
        assert!(c.validate().is_err());
    }
}
