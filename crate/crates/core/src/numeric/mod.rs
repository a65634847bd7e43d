//! Numeric periodic-orbit finder: implicit-midpoint flow, time-one map,
//! winding-constrained shooting, quadrature action and seed sweeps.

mod integrator;
mod shooting;
mod sweep;

pub use integrator::{integrate_flow, integrate_states, time_one_jacobian, time_one_map, IntegratorConfig};
pub use shooting::{
    kernel_dimension, loop_action, loop_action_raw, shoot_periodic_orbit, ShootingResult, CONVERGED_RESIDUAL,
    JACOBIAN_STEP, KERNEL_THRESHOLD,
};
pub use sweep::{
    cluster_orbits, distinct_levels, random_seeds, rng_seed_from_env, run_sweep, seed_lattice, sweep_seeds, sweep_table,
    OrbitCluster, SweepRecord, CLUSTER_TOL, DEFAULT_RNG_SEED,
};
