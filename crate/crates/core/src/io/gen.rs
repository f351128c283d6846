//! Synthetic case-study instance generator: clustered customers in a
//! bounded planar region, a main depot outside it, and a mixed pool of
//! stationary and mobile micro-depots. Distances are planar metres.

use crate::model::*;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Case-study input parameters. Monetary values are euros per day,
/// capacities cubic feet.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CaseStudyParams {
    pub n_customers: usize,
    pub n_depots: usize,
    pub truck_fixed_eur: f64,
    pub bike_fixed_eur: f64,
    pub truck_capacity: Load,
    pub bike_capacity: Load,
    pub stationary_capacity: Load,
    pub mobile_capacity: Load,
    /// Stationary opening cost is drawn uniformly from this range.
    pub stationary_cost_eur: (f64, f64),
    pub mobile_cost_eur: f64,
    pub truck_fuel_cost_per_l: f64,
    pub truck_km_per_l: f64,
    pub bike_cost_per_km_eur: f64,
    pub demand_mean: f64,
    pub demand_sd: f64,
    /// Edge length of the square service region in metres.
    pub region_m: f64,
    /// Number of demand hotspots customers cluster around.
    pub hotspots: usize,
}

impl Default for CaseStudyParams {
    fn default() -> Self {
        CaseStudyParams {
            n_customers: 2000,
            n_depots: 40,
            truck_fixed_eur: 480.0,
            bike_fixed_eur: 280.0,
            truck_capacity: 865,
            bike_capacity: 77,
            stationary_capacity: 865,
            mobile_capacity: 500,
            stationary_cost_eur: (600.0, 650.0),
            mobile_cost_eur: 156.0,
            truck_fuel_cost_per_l: 1.8,
            truck_km_per_l: 3.0,
            bike_cost_per_km_eur: 0.47,
            demand_mean: 6.03,
            demand_sd: 2.55,
            region_m: 15_000.0,
            hotspots: 8,
        }
    }
}

/// Money scale of generated instances: micro-euros per euro, so that
/// per-metre distance rates stay integral.
pub const CASE_STUDY_MONEY_SCALE: i64 = 1_000_000;

fn eur(x: f64) -> Money {
    (x * CASE_STUDY_MONEY_SCALE as f64).round() as Money
}

fn eur_per_km_to_per_m(x: f64) -> Money {
    (x * CASE_STUDY_MONEY_SCALE as f64 / 1000.0).round() as Money
}

/// Box-Muller standard normal draw; two uniforms per call keeps the
/// stream layout independent of caller patterns.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Generates a deterministic case-study instance for the given
/// parameters and seed.
pub fn generate_case_study(params: &CaseStudyParams, seed: u64) -> Result<Instance> {
    if params.n_customers < 1 {
        return Err(Error::InvalidInput("n_customers must be >= 1".into()));
    }
    if params.n_depots < 1 {
        return Err(Error::InvalidInput("n_depots must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = params.region_m;

    let n_hot = params.hotspots.max(1);
    let mut hotspots = Vec::with_capacity(n_hot);
    for _ in 0..n_hot {
        let x = rng.random_range(0.15 * side..0.85 * side);
        let y = rng.random_range(0.15 * side..0.85 * side);
        hotspots.push((x, y));
    }

    // Main depot outside the service region.
    let mut coords: Vec<(f64, f64)> = vec![(-0.2 * side, -0.2 * side)];

    let mut micro_depots = Vec::with_capacity(params.n_depots);
    for i in 0..params.n_depots {
        let hub = hotspots[i % n_hot];
        let x = (hub.0 + standard_normal(&mut rng) * 0.10 * side).clamp(0.0, side);
        let y = (hub.1 + standard_normal(&mut rng) * 0.10 * side).clamp(0.0, side);
        coords.push((x.round(), y.round()));
        let (kind, capacity, opening_cost) = if i % 2 == 0 {
            let (lo, hi) = params.stationary_cost_eur;
            (DepotKind::Stationary, params.stationary_capacity, eur(rng.random_range(lo..hi)))
        } else {
            (DepotKind::Mobile, params.mobile_capacity, eur(params.mobile_cost_eur))
        };
        micro_depots.push(MicroDepot {
            id: NodeId(1 + i as u32),
            kind,
            capacity,
            opening_cost,
            operating_window: TimeWindow::unbounded(),
        });
    }

    let mut customers = Vec::with_capacity(params.n_customers);
    for i in 0..params.n_customers {
        let hub = hotspots[rng.random_range(0..n_hot)];
        let x = (hub.0 + standard_normal(&mut rng) * 0.08 * side).clamp(0.0, side);
        let y = (hub.1 + standard_normal(&mut rng) * 0.08 * side).clamp(0.0, side);
        coords.push((x.round(), y.round()));
        let demand =
            (params.demand_mean + standard_normal(&mut rng) * params.demand_sd).round().max(1.0);
        customers.push(Customer {
            id: NodeId(1 + params.n_depots as u32 + i as u32),
            demand: demand as Load,
            service_time: 0,
            time_window: TimeWindow::unbounded(),
        });
    }

    let truck_rate = eur_per_km_to_per_m(params.truck_fuel_cost_per_l / params.truck_km_per_l);
    let bike_rate = eur_per_km_to_per_m(params.bike_cost_per_km_eur);
    let vehicle_classes = vec![
        VehicleClass {
            echelon: Echelon::First,
            capacity: params.truck_capacity,
            fixed_cost: eur(params.truck_fixed_eur),
            cost_per_distance: truck_rate,
            fleet_limit: None,
            work_window: None,
        },
        VehicleClass {
            echelon: Echelon::Second,
            capacity: params.bike_capacity,
            fixed_cost: eur(params.bike_fixed_eur),
            cost_per_distance: bike_rate,
            fleet_limit: None,
            work_window: None,
        },
    ];

    let rule = DistanceRule::PlanarMeters;
    let (dist_fe, dist_se) = super::matrices_from_rule(&coords, rule);
    Ok(Instance {
        name: format!("case-{}-{}-s{}", params.n_customers, params.n_depots, seed),
        coords,
        micro_depots,
        customers,
        vehicle_classes,
        dist_fe,
        dist_se,
        travel_time_fe: None,
        travel_time_se: None,
        bks: None,
        money_scale: CASE_STUDY_MONEY_SCALE,
        km_per_unit_fe: 0.001,
        km_per_unit_se: 0.001,
        distance_rule: Some(rule),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_canonical;
    use crate::model::validate_instance;

    fn small_params() -> CaseStudyParams {
        CaseStudyParams { n_customers: 60, n_depots: 8, ..CaseStudyParams::default() }
    }

    #[test]
    fn generator_is_deterministic() {
        let p = small_params();
        let a = generate_case_study(&p, 42).unwrap();
        let b = generate_case_study(&p, 42).unwrap();
        assert_eq!(write_canonical(&a).unwrap(), write_canonical(&b).unwrap());
        let c = generate_case_study(&p, 43).unwrap();
        assert_ne!(write_canonical(&a).unwrap(), write_canonical(&c).unwrap());
    }

    #[test]
    fn table_rates_are_applied() {
        let inst = generate_case_study(&small_params(), 1).unwrap();
        // 1.8 EUR/l over 3 km/l is 0.6 EUR/km, i.e. 600 micro-EUR/m.
        assert_eq!(inst.fe_class().cost_per_distance, 600);
        assert_eq!(inst.se_class().cost_per_distance, 470);
        assert_eq!(inst.fe_class().fixed_cost, 480 * CASE_STUDY_MONEY_SCALE);
        let mobile = inst.micro_depots.iter().find(|d| d.kind == DepotKind::Mobile).unwrap();
        assert_eq!(mobile.capacity, 500);
        assert_eq!(mobile.opening_cost, 156 * CASE_STUDY_MONEY_SCALE);
        let stationary =
            inst.micro_depots.iter().find(|d| d.kind == DepotKind::Stationary).unwrap();
        assert_eq!(stationary.capacity, 865);
        assert!(stationary.opening_cost >= 600 * CASE_STUDY_MONEY_SCALE);
        assert!(stationary.opening_cost <= 650 * CASE_STUDY_MONEY_SCALE);
    }

    #[test]
    fn generated_instances_are_well_formed() {
        let inst = generate_case_study(&small_params(), 7).unwrap();
        assert_eq!(validate_instance(&inst), Vec::<String>::new());
        assert!(inst.customers.iter().all(|c| c.demand >= 1));
        // Depot outside the region, all customers inside.
        assert!(inst.coords[0].0 < 0.0);
        for c in inst.customer_ids() {
            let (x, y) = inst.coords[c.idx()];
            assert!(x >= 0.0 && y >= 0.0);
        }
    }

    #[test]
    fn rejects_empty_params() {
        let mut p = small_params();
        p.n_customers = 0;
        assert!(generate_case_study(&p, 1).is_err());
    }
}
