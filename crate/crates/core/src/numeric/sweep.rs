use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::hamiltonians::Hamiltonian;
use crate::numeric::integrator::IntegratorConfig;
use crate::numeric::shooting::shoot_periodic_orbit;
use crate::phase_space::{signed_wrap, HomotopyClass, PhasePoint, PhaseSpaceConfig, P_PERIOD};
use crate::report::{fmt_float, CsvTable};

/// Distance below which two converged runs count as the same orbit.
pub const CLUSTER_TOL: f64 = 1e-4;

/// Regular lattice over `(p0, p1..pn)` at `q = 0`, roughly `count` points.
///
/// `p0` nodes sit at cell centres of `(-R, R)`; torus momenta run over
/// `[-1, 1)` and include 0. With `q_nodes > 1` every momentum node is
/// repeated over a `q` lattice, for `q`-dependent inputs.
pub fn seed_lattice(geometry: &PhaseSpaceConfig, count: usize, q_nodes: usize) -> Vec<PhasePoint> {
    let n = geometry.torus_dim();
    let r = geometry.radius();
    let q_nodes = q_nodes.max(1);
    let q_total = q_nodes.pow((n + 1) as u32);
    let momentum_count = count.div_ceil(q_total).max(1);
    let axes = n + 1;
    let mut per = (momentum_count as f64).powf(1.0 / axes as f64).round().max(1.0) as usize;
    while per.pow(axes as u32) < momentum_count {
        per += 1;
    }
    let torus_per = if per % 2 == 1 && per > 1 { per - 1 } else { per };
    let p0_per = momentum_count.div_ceil(torus_per.pow(n as u32)).max(1);
    let mut seeds = Vec::new();
    for i in 0..p0_per {
        let p0 = -r + (i as f64 + 0.5) * 2.0 * r / p0_per as f64;
        for t in 0..torus_per.pow(n as u32) {
            let mut rest = t;
            let p: Vec<f64> = (0..n)
                .map(|_| {
                    let j = rest % torus_per;
                    rest /= torus_per;
                    -1.0 + j as f64 * P_PERIOD / torus_per as f64
                })
                .collect();
            for qi in 0..q_total {
                let mut rest = qi;
                let mut q: Vec<f64> = (0..=n)
                    .map(|_| {
                        let j = rest % q_nodes;
                        rest /= q_nodes;
                        j as f64 / q_nodes as f64
                    })
                    .collect();
                let q0 = q.remove(0);
                seeds.push(PhasePoint::new(p0, q0, p.clone(), q));
            }
        }
    }
    seeds
}

/// Uniform random seeds with `|p0| < R`, reproducible from `rng_seed`.
pub fn random_seeds(geometry: &PhaseSpaceConfig, count: usize, rng_seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = geometry.torus_dim();
    let r = geometry.radius();
    (0..count)
        .map(|_| {
            let p0 = rng.gen_range(-r..r);
            let q0 = rng.gen_range(0.0..1.0);
            let p = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            PhasePoint::new(p0, q0, p, q)
        })
        .collect()
}

/// Default random seed, overridable through `HAMCAP_SEED`.
pub fn rng_seed_from_env() -> u64 {
    std::env::var("HAMCAP_SEED")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_RNG_SEED)
}

pub const DEFAULT_RNG_SEED: u64 = 20_240_601;

/// Exactly `count` seeds: a lattice for about half, random for the rest.
pub fn sweep_seeds(geometry: &PhaseSpaceConfig, count: usize, rng_seed: u64, q_dependent: bool) -> Vec<PhasePoint> {
    let q_nodes = if q_dependent { 2 } else { 1 };
    let mut seeds = seed_lattice(geometry, count / 2, q_nodes);
    seeds.truncate(count / 2);
    let rest = count - seeds.len();
    seeds.extend(random_seeds(geometry, rest, rng_seed));
    seeds
}

/// Outcome of one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRecord {
    pub seed: usize,
    pub converged: bool,
    pub level: f64,
    pub action: f64,
    pub winding: Vec<i64>,
    pub kernel_dim: Option<usize>,
    pub residual: f64,
    /// Torus momenta at `t = 0`.
    pub torus_momenta: Vec<f64>,
}

/// Shoots from every seed in parallel; records come back in seed order.
pub fn run_sweep(
    h: &dyn Hamiltonian,
    class: &HomotopyClass,
    seeds: &[PhasePoint],
    cfg: &IntegratorConfig,
) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    seeds
        .par_iter()
        .enumerate()
        .map(|(i, seed)| {
            let res = shoot_periodic_orbit(h, class, seed, cfg)?;
            let half = res.start.len() / 2;
            Ok(SweepRecord {
                seed: i,
                converged: res.converged,
                level: res.level,
                action: res.action,
                winding: res.winding,
                kernel_dim: res.kernel_dim,
                residual: res.residual,
                torus_momenta: res.start[1..half].to_vec(),
            })
        })
        .collect()
}

/// One distinct orbit found by a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitCluster {
    pub level: f64,
    pub action: f64,
    pub torus_momenta: Vec<f64>,
    pub kernel_dim: Option<usize>,
    /// Seed index of the representative.
    pub seed: usize,
    pub members: usize,
}

/// Groups converged runs by level and torus momenta (mod 2), both within
/// [`CLUSTER_TOL`]. Representatives are the lowest seed index.
pub fn cluster_orbits(records: &[SweepRecord]) -> Vec<OrbitCluster> {
    let mut clusters: Vec<OrbitCluster> = Vec::new();
    for rec in records.iter().filter(|r| r.converged) {
        let hit = clusters.iter_mut().find(|c| {
            (c.level - rec.level).abs() <= CLUSTER_TOL
                && c.torus_momenta
                    .iter()
                    .zip(&rec.torus_momenta)
                    .all(|(a, b)| signed_wrap(a - b, P_PERIOD).abs() <= CLUSTER_TOL)
        });
        match hit {
            Some(c) => c.members += 1,
            None => clusters.push(OrbitCluster {
                level: rec.level,
                action: rec.action,
                torus_momenta: rec.torus_momenta.clone(),
                kernel_dim: rec.kernel_dim,
                seed: rec.seed,
                members: 1,
            }),
        }
    }
    clusters.sort_by(|a, b| a.level.total_cmp(&b.level).then(a.seed.cmp(&b.seed)));
    clusters
}

/// Distinct levels among converged runs, merged within [`CLUSTER_TOL`].
/// Each entry is `(level, action)` of the first run at that level.
pub fn distinct_levels(records: &[SweepRecord]) -> Vec<(f64, f64)> {
    let mut found: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.converged)
        .map(|r| (r.level, r.action))
        .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (level, action) in found {
        match out.last() {
            Some(&(last, _)) if level - last <= CLUSTER_TOL => {}
            _ => out.push((level, action)),
        }
    }
    out
}

pub fn sweep_table(records: &[SweepRecord]) -> CsvTable {
    let mut table = CsvTable::new(&["seed", "converged", "level", "action", "winding", "kernelDim", "residual"]);
    for r in records {
        table.push(vec![
            r.seed.to_string(),
            r.converged.to_string(),
            fmt_float(r.level),
            fmt_float(r.action),
            r.winding.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" "),
            r.kernel_dim.map(|k| k.to_string()).unwrap_or_default(),
            fmt_float(r.residual),
        ]);
    }
    table
}
