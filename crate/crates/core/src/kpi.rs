//! City-logistics KPIs of a solution: cost breakdown, distances,
//! emissions, vehicle utilization, depot mix and the gap against a
//! best-known value.

use crate::eval::{evaluate_route, gap_percent, objective, CostBreakdown};
use crate::model::*;
use serde::Serialize;

/// Truck emissions in kg CO2 per km.
pub const TRUCK_EMISSION_KG_PER_KM: f64 = 0.597;
/// Cargo-bike emissions in kg CO2 per km (0.079 g/km).
pub const BIKE_EMISSION_KG_PER_KM: f64 = 0.000079;

#[derive(Debug, Clone, Serialize)]
pub struct KpiReport {
    pub cost: CostBreakdown,
    /// Total cost in display units (money divided by the instance
    /// scale).
    pub total_display: f64,
    pub fe_distance: Dist,
    pub se_distance: Dist,
    pub emissions_kg: f64,
    pub fe_utilization: Vec<f64>,
    pub se_utilization: Vec<f64>,
    pub mean_utilization: f64,
    pub stationary_open: usize,
    pub mobile_open: usize,
    pub direct_shipments: usize,
    pub gap_pct: Option<f64>,
}

pub fn kpi_report(instance: &Instance, solution: &Solution) -> KpiReport {
    let cost = objective(instance, solution);
    let depot_loads = solution.depot_se_loads(instance);

    let mut fe_distance = 0;
    let mut fe_utilization = Vec::with_capacity(solution.fe_routes.len());
    for r in &solution.fe_routes {
        let (stats, _) = evaluate_route(instance, r, Some(&depot_loads));
        fe_distance += stats.distance;
        let cap = instance.vehicle_classes[r.vehicle_class].capacity;
        fe_utilization.push(stats.load as f64 / cap as f64);
    }
    let mut se_distance = 0;
    let mut se_utilization = Vec::with_capacity(solution.se_routes.len());
    for r in &solution.se_routes {
        let (stats, _) = evaluate_route(instance, r, None);
        se_distance += stats.distance;
        let cap = instance.vehicle_classes[r.vehicle_class].capacity;
        se_utilization.push(stats.load as f64 / cap as f64);
    }
    let count = fe_utilization.len() + se_utilization.len();
    let mean_utilization = if count == 0 {
        0.0
    } else {
        (fe_utilization.iter().sum::<f64>() + se_utilization.iter().sum::<f64>()) / count as f64
    };

    let emissions_kg = fe_distance as f64 * instance.km_per_unit_fe * TRUCK_EMISSION_KG_PER_KM
        + se_distance as f64 * instance.km_per_unit_se * BIKE_EMISSION_KG_PER_KM;

    let mut stationary_open = 0;
    let mut mobile_open = 0;
    for &t in &solution.open_depots {
        match instance.depot(t).kind {
            DepotKind::Stationary => stationary_open += 1,
            DepotKind::Mobile => mobile_open += 1,
        }
    }

    KpiReport {
        total_display: cost.total as f64 / instance.money_scale as f64,
        fe_distance,
        se_distance,
        emissions_kg,
        fe_utilization,
        se_utilization,
        mean_utilization,
        stationary_open,
        mobile_open,
        direct_shipments: solution.direct_customers(instance).len(),
        gap_pct: instance.bks.and_then(|bks| gap_percent(cost.total, bks).ok()),
        cost,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::{t1_instance, t1_two_depot_solution};

    #[test]
    fn empty_solution_has_zero_kpis() {
        let inst = t1_instance();
        let sol = Solution::empty();
        let k = kpi_report(&inst, &sol);
        assert_eq!(k.cost.total, 0);
        assert_eq!(k.fe_distance, 0);
        assert_eq!(k.se_distance, 0);
        assert_eq!(k.emissions_kg, 0.0);
        assert_eq!(k.mean_utilization, 0.0);
        assert_eq!(k.direct_shipments, 0);
    }

    #[test]
    fn t1_kpis_match_hand_arithmetic() {
        let inst = t1_instance();
        let sol = t1_two_depot_solution(&inst);
        let k = kpi_report(&inst, &sol);
        assert_eq!(k.cost.total, 21_400);
        assert_eq!(k.fe_distance, 16_000);
        assert_eq!(k.se_distance, 2_400);
        // Geometric km per unit: FE 0.005, SE 0.01.
        let expect = 16_000.0 * 0.005 * TRUCK_EMISSION_KG_PER_KM
            + 2_400.0 * 0.01 * BIKE_EMISSION_KG_PER_KM;
        assert!((k.emissions_kg - expect).abs() < 1e-12);
        // FE trucks carry 40 of 60; SE bikes 20 of 25.
        assert!(k.fe_utilization.iter().all(|&u| (u - 40.0 / 60.0).abs() < 1e-12));
        assert!(k.se_utilization.iter().all(|&u| (u - 0.8).abs() < 1e-12));
        assert_eq!(k.stationary_open, 1);
        assert_eq!(k.mobile_open, 1);
        assert_eq!(k.gap_pct, None);
    }

    #[test]
    fn full_vehicle_utilization_is_one() {
        let mut inst = t1_instance();
        inst.vehicle_classes[1].capacity = 20;
        let sol = t1_two_depot_solution(&inst);
        let k = kpi_report(&inst, &sol);
        assert!(k.se_utilization.iter().all(|&u| u == 1.0));
        assert!(k.se_utilization.iter().all(|&u| (0.0..=1.0).contains(&u)));
    }
}
