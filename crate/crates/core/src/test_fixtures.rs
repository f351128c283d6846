//! Small deterministic instances used across unit, property and
//! acceptance tests.

use crate::io::scaled_euclid_matrices;
use crate::model::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Collinear fixture: main depot at the origin, depots A=(10,0) and
/// B=(30,0), two customers close to each depot. Demands 20, depot
/// capacity 40, SE capacity 25, FE capacity 60.
///
/// Node layout: 0 main, 1=A, 2=B, 3..=6 customers c1..c4 at
/// (12,0), (14,0), (32,0), (34,0).
pub fn t1_instance() -> Instance {
    let coords = vec![
        (0.0, 0.0),
        (10.0, 0.0),
        (30.0, 0.0),
        (12.0, 0.0),
        (14.0, 0.0),
        (32.0, 0.0),
        (34.0, 0.0),
    ];
    let rule = DistanceRule::ScaledEuclid { rounding: Rounding::HalfUp };
    let (dist_fe, dist_se) = scaled_euclid_matrices(&coords, Rounding::HalfUp);
    Instance {
        name: "t1".into(),
        coords,
        micro_depots: vec![
            MicroDepot {
                id: NodeId(1),
                kind: DepotKind::Stationary,
                capacity: 40,
                opening_cost: 1000,
                operating_window: TimeWindow::unbounded(),
            },
            MicroDepot {
                id: NodeId(2),
                kind: DepotKind::Mobile,
                capacity: 40,
                opening_cost: 1200,
                operating_window: TimeWindow::unbounded(),
            },
        ],
        customers: (0..4)
            .map(|i| Customer {
                id: NodeId(3 + i),
                demand: 20,
                service_time: 0,
                time_window: TimeWindow::unbounded(),
            })
            .collect(),
        vehicle_classes: vec![
            VehicleClass {
                echelon: Echelon::First,
                capacity: 60,
                fixed_cost: 200,
                cost_per_distance: 1,
                fleet_limit: None,
                work_window: None,
            },
            VehicleClass {
                echelon: Echelon::Second,
                capacity: 25,
                fixed_cost: 100,
                cost_per_distance: 1,
                fleet_limit: None,
                work_window: None,
            },
        ],
        dist_fe,
        dist_se,
        travel_time_fe: None,
        travel_time_se: None,
        bks: None,
        money_scale: 1,
        km_per_unit_fe: 0.005,
        km_per_unit_se: 0.01,
        distance_rule: Some(rule),
    }
}

/// Hand-built feasible solution on T1: both depots open, one SE route
/// per customer, one FE route per depot.
pub fn t1_two_depot_solution(instance: &Instance) -> Solution {
    let mut sol = Solution::empty();
    sol.open_depots.insert(NodeId(1));
    sol.open_depots.insert(NodeId(2));
    for (home, c) in [(1, 3), (1, 4), (2, 5), (2, 6)] {
        sol.se_routes.push(Route::new_se(instance, NodeId(home), vec![NodeId(c)]));
    }
    sol.fe_routes.push(Route::new_fe(instance, vec![NodeId(1)]));
    sol.fe_routes.push(Route::new_fe(instance, vec![NodeId(2)]));
    sol
}

/// Random instance small enough for the exact oracle. Capacities are
/// padded so total depot capacity always covers total demand.
pub fn tiny_random_instance(n_customers: usize, n_depots: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![(0.0, 0.0)];
    for _ in 0..(n_depots + n_customers) {
        coords.push((rng.random_range(0..=50) as f64, rng.random_range(0..=50) as f64));
    }
    let demands: Vec<Load> = (0..n_customers).map(|_| rng.random_range(10..=20)).collect();
    let total: Load = demands.iter().sum();
    let min_cap = total / n_depots as Load + 10;
    let micro_depots = (0..n_depots)
        .map(|i| MicroDepot {
            id: NodeId(1 + i as u32),
            kind: if i % 2 == 0 { DepotKind::Stationary } else { DepotKind::Mobile },
            capacity: rng.random_range(40..=80).max(min_cap),
            opening_cost: rng.random_range(500..=1500),
            operating_window: TimeWindow::unbounded(),
        })
        .collect::<Vec<_>>();
    let customers = (0..n_customers)
        .map(|i| Customer {
            id: NodeId(1 + n_depots as u32 + i as u32),
            demand: demands[i],
            service_time: 0,
            time_window: TimeWindow::unbounded(),
        })
        .collect();
    let max_cap = micro_depots.iter().map(|d| d.capacity).max().unwrap();
    let rule = DistanceRule::ScaledEuclid { rounding: Rounding::HalfUp };
    let (dist_fe, dist_se) = scaled_euclid_matrices(&coords, Rounding::HalfUp);
    Instance {
        name: format!("tiny-{n_customers}-{n_depots}-s{seed}"),
        coords,
        micro_depots,
        customers,
        vehicle_classes: vec![
            VehicleClass {
                echelon: Echelon::First,
                capacity: max_cap * 3 / 2,
                fixed_cost: 300,
                cost_per_distance: 1,
                fleet_limit: None,
                work_window: None,
            },
            VehicleClass {
                echelon: Echelon::Second,
                capacity: 70,
                fixed_cost: 100,
                cost_per_distance: 1,
                fleet_limit: None,
                work_window: None,
            },
        ],
        dist_fe,
        dist_se,
        travel_time_fe: None,
        travel_time_se: None,
        bks: None,
        money_scale: 1,
        km_per_unit_fe: 0.005,
        km_per_unit_se: 0.01,
        distance_rule: Some(rule),
    }
}

/// Synthetic instance in the style of the 20x5 benchmark class:
/// uniform demands in 11..=20, five depots of capacity 140, SE
/// capacity 70, per-route fixed cost 1000.
pub fn benchmark_like_instance(n_customers: usize, n_depots: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![(0.0, 0.0)];
    for _ in 0..n_depots {
        coords.push((rng.random_range(0..=100) as f64, rng.random_range(0..=100) as f64));
    }
    for _ in 0..n_customers {
        coords.push((rng.random_range(0..=100) as f64, rng.random_range(0..=100) as f64));
    }
    let micro_depots = (0..n_depots)
        .map(|i| MicroDepot {
            id: NodeId(1 + i as u32),
            kind: DepotKind::Stationary,
            capacity: 140,
            opening_cost: rng.random_range(5_000..=12_000),
            operating_window: TimeWindow::unbounded(),
        })
        .collect::<Vec<_>>();
    let customers = (0..n_customers)
        .map(|i| Customer {
            id: NodeId(1 + n_depots as u32 + i as u32),
            demand: rng.random_range(11..=20),
            service_time: 0,
            time_window: TimeWindow::unbounded(),
        })
        .collect();
    let rule = DistanceRule::ScaledEuclid { rounding: Rounding::HalfUp };
    let (dist_fe, dist_se) = scaled_euclid_matrices(&coords, Rounding::HalfUp);
    Instance {
        name: format!("bench-like-{n_customers}-{n_depots}-s{seed}"),
        coords,
        micro_depots,
        customers,
        vehicle_classes: vec![
            VehicleClass {
                echelon: Echelon::First,
                capacity: 210,
                fixed_cost: 1000,
                cost_per_distance: 1,
                fleet_limit: None,
                work_window: None,
            },
            VehicleClass {
                echelon: Echelon::Second,
                capacity: 70,
                fixed_cost: 1000,
                cost_per_distance: 1,
                fleet_limit: None,
                work_window: None,
            },
        ],
        dist_fe,
        dist_se,
        travel_time_fe: None,
        travel_time_se: None,
        bks: None,
        money_scale: 1,
        km_per_unit_fe: 0.005,
        km_per_unit_se: 0.01,
        distance_rule: Some(rule),
    }
}
