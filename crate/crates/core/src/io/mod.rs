//! Benchmark parsing, distance-matrix construction, the canonical
//! interchange format and the synthetic case-study generator.

mod gen;
mod parse;

pub use gen::{generate_case_study, CaseStudyParams};
pub use parse::{parse_nguyen, parse_prodhon};

use crate::model::*;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Data lifted verbatim from a published benchmark file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBenchmark {
    pub name: String,
    pub depot_coord: (f64, f64),
    pub satellite_coords: Vec<(f64, f64)>,
    pub satellite_capacities: Vec<Load>,
    pub satellite_opening_costs: Vec<Money>,
    pub customer_coords: Vec<(f64, f64)>,
    pub demands: Vec<Load>,
    pub fe_capacity: Load,
    pub se_capacity: Load,
    pub fe_fixed_cost: Money,
    pub se_fixed_cost: Money,
}

fn scaled_round(x: f64, rounding: Rounding) -> i64 {
    match rounding {
        Rounding::HalfUp => x.round() as i64,
        Rounding::Ceil => x.ceil() as i64,
    }
}

/// Builds the scaled distance matrices for a node coordinate list:
/// SE entries are Euclidean x100, FE entries Euclidean x100x2, both
/// rounded after scaling.
pub fn scaled_euclid_matrices(coords: &[(f64, f64)], rounding: Rounding) -> (Matrix, Matrix) {
    let n = coords.len();
    let mut fe = Matrix::zeros(n);
    let mut se = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = coords[i].0 - coords[j].0;
            let dy = coords[i].1 - coords[j].1;
            let e = (dx * dx + dy * dy).sqrt();
            se.data[i * n + j] = scaled_round(e * 100.0, rounding);
            fe.data[i * n + j] = scaled_round(e * 100.0 * 2.0, rounding);
        }
    }
    (fe, se)
}

/// Plain Euclidean matrices rounded to integers, shared by both
/// echelons (coordinates in metres).
pub fn planar_meter_matrices(coords: &[(f64, f64)]) -> (Matrix, Matrix) {
    let n = coords.len();
    let mut m = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = coords[i].0 - coords[j].0;
            let dy = coords[i].1 - coords[j].1;
            m.data[i * n + j] = (dx * dx + dy * dy).sqrt().round() as i64;
        }
    }
    (m.clone(), m)
}

pub fn matrices_from_rule(coords: &[(f64, f64)], rule: DistanceRule) -> (Matrix, Matrix) {
    match rule {
        DistanceRule::ScaledEuclid { rounding } => scaled_euclid_matrices(coords, rounding),
        DistanceRule::PlanarMeters => planar_meter_matrices(coords),
    }
}

/// Builds the FE and SE distance matrices of a raw benchmark in node
/// order (main depot, satellites, customers).
pub fn build_distance_matrices(raw: &RawBenchmark, rounding: Rounding) -> (Matrix, Matrix) {
    scaled_euclid_matrices(&node_coords(raw), rounding)
}

fn node_coords(raw: &RawBenchmark) -> Vec<(f64, f64)> {
    let mut coords = Vec::with_capacity(1 + raw.satellite_coords.len() + raw.customer_coords.len());
    coords.push(raw.depot_coord);
    coords.extend_from_slice(&raw.satellite_coords);
    coords.extend_from_slice(&raw.customer_coords);
    coords
}

/// Converts a raw benchmark into a solver instance with positional
/// node indexing. All benchmark depots are stationary.
pub fn to_instance(raw: &RawBenchmark, rounding: Rounding) -> Instance {
    let coords = node_coords(raw);
    let rule = DistanceRule::ScaledEuclid { rounding };
    let (dist_fe, dist_se) = matrices_from_rule(&coords, rule);
    let m = raw.satellite_coords.len();
    let micro_depots = (0..m)
        .map(|i| MicroDepot {
            id: NodeId(1 + i as u32),
            kind: DepotKind::Stationary,
            capacity: raw.satellite_capacities[i],
            opening_cost: raw.satellite_opening_costs[i],
            operating_window: TimeWindow::unbounded(),
        })
        .collect();
    let customers = (0..raw.customer_coords.len())
        .map(|i| Customer {
            id: NodeId(1 + m as u32 + i as u32),
            demand: raw.demands[i],
            service_time: 0,
            time_window: TimeWindow::unbounded(),
        })
        .collect();
    let vehicle_classes = vec![
        VehicleClass {
            echelon: Echelon::First,
            capacity: raw.fe_capacity,
            fixed_cost: raw.fe_fixed_cost,
            cost_per_distance: 1,
            fleet_limit: None,
            work_window: None,
        },
        VehicleClass {
            echelon: Echelon::Second,
            capacity: raw.se_capacity,
            fixed_cost: raw.se_fixed_cost,
            cost_per_distance: 1,
            fleet_limit: None,
            work_window: None,
        },
    ];
    Instance {
        name: raw.name.clone(),
        coords,
        micro_depots,
        customers,
        vehicle_classes,
        dist_fe,
        dist_se,
        travel_time_fe: None,
        travel_time_se: None,
        bks: known_bks(&raw.name),
        money_scale: 1,
        km_per_unit_fe: 0.005,
        km_per_unit_se: 0.01,
        distance_rule: Some(rule),
    }
}

/// Published best-known values for the benchmark sets, keyed by
/// instance name.
pub fn known_bks(name: &str) -> Option<Money> {
    let key = name.trim().to_ascii_lowercase();
    let table: &[(&str, Money)] = &[
        ("20-5-1", 89_075),
        ("20-5-1b", 61_863),
        ("20-5-2", 84_478),
        ("20-5-2b", 60_838),
        ("50-5-1", 130_843),
        ("50-5-1b", 101_530),
        ("50-5-2", 131_825),
        ("50-5-2b", 110_332),
        ("50-5-2bis", 122_599),
        ("50-5-2bbis", 105_696),
        ("50-5-3", 128_379),
        ("50-5-3b", 104_006),
        ("100-5-1", 318_134),
        ("100-5-1b", 256_878),
        ("100-5-2", 231_305),
        ("100-5-2b", 194_728),
        ("100-5-3", 244_071),
        ("100-5-3b", 194_110),
        ("100-10-1", 351_243),
        ("100-10-1b", 297_167),
        ("100-10-2", 304_438),
        ("100-10-2b", 263_873),
        ("100-10-3", 310_148),
        ("100-10-3b", 260_328),
        ("200-10-1", 548_703),
        ("200-10-1b", 445_301),
        ("200-10-2", 497_451),
        ("200-10-2b", 422_668),
        ("200-10-3", 527_162),
        ("200-10-3b", 401_672),
        ("25-5n", 80_370),
        ("25-5nb", 64_562),
        ("25-5mn", 78_947),
        ("25-5mnb", 64_438),
        ("50-5n", 137_815),
        ("50-5nb", 110_094),
        ("50-5mn", 123_484),
        ("50-5mnb", 105_401),
        ("50-10n", 115_725),
        ("50-10nb", 87_315),
        ("50-10mn", 135_519),
        ("50-10mnb", 110_613),
        ("100-5n", 193_228),
        ("100-5nb", 158_927),
        ("100-5mn", 204_682),
        ("100-5mnb", 165_744),
        ("100-10n", 209_952),
        ("100-10nb", 155_489),
        ("100-10mn", 201_275),
        ("100-10mnb", 170_625),
        ("200-10n", 343_232),
        ("200-10nb", 256_171),
        ("200-10mn", 323_801),
        ("200-10mnb", 287_076),
    ];
    table.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
}

const CANONICAL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CanonicalInstance {
    version: u32,
    name: String,
    money_scale: i64,
    km_per_unit_fe: f64,
    km_per_unit_se: f64,
    coords: Vec<(f64, f64)>,
    micro_depots: Vec<MicroDepot>,
    customers: Vec<Customer>,
    vehicle_classes: Vec<VehicleClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distance_rule: Option<DistanceRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist_fe: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist_se: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    travel_time_fe: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    travel_time_se: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bks: Option<Money>,
}

/// Writes an instance in the canonical UTF-8 format. Matrices are
/// omitted when a distance rule can rebuild them.
pub fn write_canonical(instance: &Instance) -> Result<String> {
    let compact = instance.distance_rule.is_some();
    let doc = CanonicalInstance {
        version: CANONICAL_VERSION,
        name: instance.name.clone(),
        money_scale: instance.money_scale,
        km_per_unit_fe: instance.km_per_unit_fe,
        km_per_unit_se: instance.km_per_unit_se,
        coords: instance.coords.clone(),
        micro_depots: instance.micro_depots.clone(),
        customers: instance.customers.clone(),
        vehicle_classes: instance.vehicle_classes.clone(),
        distance_rule: instance.distance_rule,
        dist_fe: (!compact).then(|| instance.dist_fe.clone()),
        dist_se: (!compact).then(|| instance.dist_se.clone()),
        travel_time_fe: instance.travel_time_fe.clone(),
        travel_time_se: instance.travel_time_se.clone(),
        bks: instance.bks,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Reads an instance from the canonical format.
pub fn read_canonical(text: &str) -> Result<Instance> {
    let doc: CanonicalInstance = serde_json::from_str(text)?;
    if doc.version != CANONICAL_VERSION {
        return Err(Error::Version { found: doc.version, expected: CANONICAL_VERSION });
    }
    let n = doc.coords.len();
    let (dist_fe, dist_se) = match (doc.dist_fe, doc.dist_se) {
        (Some(fe), Some(se)) => (fe, se),
        (None, None) => match doc.distance_rule {
            Some(rule) => matrices_from_rule(&doc.coords, rule),
            None => {
                return Err(Error::Schema(
                    "instance carries neither matrices nor a distance rule".into(),
                ))
            }
        },
        _ => return Err(Error::Schema("only one of dist_fe/dist_se present".into())),
    };
    if dist_fe.n != n || dist_se.n != n {
        return Err(Error::Schema(format!(
            "matrix dimension {} does not match {} nodes",
            dist_fe.n.max(dist_se.n),
            n
        )));
    }
    let instance = Instance {
        name: doc.name,
        coords: doc.coords,
        micro_depots: doc.micro_depots,
        customers: doc.customers,
        vehicle_classes: doc.vehicle_classes,
        dist_fe,
        dist_se,
        travel_time_fe: doc.travel_time_fe,
        travel_time_se: doc.travel_time_se,
        bks: doc.bks,
        money_scale: doc.money_scale,
        km_per_unit_fe: doc.km_per_unit_fe,
        km_per_unit_se: doc.km_per_unit_se,
        distance_rule: doc.distance_rule,
    };
    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        return Err(Error::Schema(violations.join("; ")));
    }
    Ok(instance)
}

#[derive(Serialize, Deserialize)]
struct SolutionFile {
    version: u32,
    cost: crate::eval::CostBreakdown,
    open_depots: Vec<NodeId>,
    fe_routes: Vec<Route>,
    se_routes: Vec<Route>,
}

/// Serializes a solution together with its cost breakdown.
pub fn write_solution(instance: &Instance, solution: &Solution) -> Result<String> {
    let doc = SolutionFile {
        version: CANONICAL_VERSION,
        cost: crate::eval::objective(instance, solution),
        open_depots: solution.open_depots.iter().copied().collect(),
        fe_routes: solution.fe_routes.clone(),
        se_routes: solution.se_routes.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn read_solution(text: &str) -> Result<Solution> {
    let doc: SolutionFile = serde_json::from_str(text)?;
    if doc.version != CANONICAL_VERSION {
        return Err(Error::Version { found: doc.version, expected: CANONICAL_VERSION });
    }
    Ok(Solution {
        fe_routes: doc.fe_routes,
        se_routes: doc.se_routes,
        open_depots: doc.open_depots.into_iter().collect(),
        cost_cache: None,
    })
}

/// Parses instance text in any supported format: canonical JSON,
/// the Prodhon layout, or the Nguyen layout.
pub fn parse_any(name: &str, text: &str) -> Result<Instance> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return read_canonical(text);
    }
    match parse_prodhon(text) {
        Ok(mut raw) => {
            raw.name = name.to_string();
            let mut inst = to_instance(&raw, Rounding::HalfUp);
            inst.bks = known_bks(name);
            Ok(inst)
        }
        Err(prodhon_err) => match parse_nguyen(text) {
            Ok(mut raw) => {
                raw.name = name.to_string();
                let mut inst = to_instance(&raw, Rounding::HalfUp);
                inst.bks = known_bks(name);
                Ok(inst)
            }
            Err(_) => Err(prodhon_err),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::t1_instance;

    #[test]
    fn three_four_five_triangle_scaling() {
        let coords = vec![(0.0, 0.0), (3.0, 4.0)];
        let (fe, se) = scaled_euclid_matrices(&coords, Rounding::HalfUp);
        assert_eq!(se.get(NodeId(0), NodeId(1)), 500);
        assert_eq!(fe.get(NodeId(0), NodeId(1)), 1000);
        assert_eq!(se.get(NodeId(0), NodeId(0)), 0);
        assert_eq!(fe.get(NodeId(1), NodeId(1)), 0);
    }

    #[test]
    fn diagonal_rounding_multiplies_before_rounding() {
        let coords = vec![(0.0, 0.0), (1.0, 1.0)];
        let (fe, se) = scaled_euclid_matrices(&coords, Rounding::HalfUp);
        assert_eq!(se.get(NodeId(0), NodeId(1)), 141);
        assert_eq!(fe.get(NodeId(0), NodeId(1)), 283);
        let (fe_c, se_c) = scaled_euclid_matrices(&coords, Rounding::Ceil);
        assert_eq!(se_c.get(NodeId(0), NodeId(1)), 142);
        assert_eq!(fe_c.get(NodeId(0), NodeId(1)), 283);
    }

    #[test]
    fn matrices_are_symmetric_with_zero_diagonal() {
        let inst = t1_instance();
        for m in [&inst.dist_fe, &inst.dist_se] {
            for i in 0..m.n {
                assert_eq!(m.data[i * m.n + i], 0);
                for j in 0..m.n {
                    assert_eq!(m.data[i * m.n + j], m.data[j * m.n + i]);
                }
            }
        }
    }

    #[test]
    fn canonical_round_trip_is_identity() {
        let inst = t1_instance();
        let text = write_canonical(&inst).unwrap();
        let back = read_canonical(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn canonical_rejects_unknown_version() {
        let inst = t1_instance();
        let text = write_canonical(&inst).unwrap().replace("\"version\": 1", "\"version\": 99");
        match read_canonical(&text) {
            Err(Error::Version { found: 99, expected: 1 }) => {}
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn known_bks_lookup() {
        assert_eq!(known_bks("20-5-1"), Some(89_075));
        assert_eq!(known_bks("25-5NB"), Some(64_562));
        assert_eq!(known_bks("200-10-1"), Some(548_703));
        assert_eq!(known_bks("no-such-instance"), None);
    }
}
