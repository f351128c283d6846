//! Solver library for the two-echelon location-routing problem with
//! stationary and mobile micro-depots and direct shipment.
//!
//! The search is an adaptive large neighborhood search with
//! set-cover intensification over a pool of micro-depot
//! mini-networks, plus a cluster-first route-second decomposition for
//! large instances. Exact brute-force oracles back the test suite.

pub mod construct;
pub mod decomp;
pub mod destroy;
pub mod engine;
pub mod error;
pub mod eval;
pub mod io;
pub mod kpi;
pub mod ls;
pub mod model;
pub mod oracle;
pub mod pool;
pub mod repair;
pub mod test_fixtures;

pub use error::{Error, Result};
pub use model::{
    Config, Customer, DepotKind, Echelon, Instance, MicroDepot, NodeId, Route, Solution,
    VehicleClass,
};
