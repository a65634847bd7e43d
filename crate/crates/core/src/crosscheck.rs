//! Numeric against analytic: shooting sweeps compared with the radial
//! enumeration.

use serde::Serialize;

use crate::capacity::SweepOptions;
use crate::error::Result;
use crate::hamiltonians::{Hamiltonian, ProductHamiltonian};
use crate::numeric::{cluster_orbits, run_sweep, sweep_seeds, IntegratorConfig, OrbitCluster, SweepRecord};
use crate::orbit_analysis::{enumerate_families, PeriodicOrbitFamily};
use crate::phase_space::{HomotopyClass, PhasePoint};

/// Per-orbit agreement required between the two sides.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossCheck {
    pub ell: i64,
    pub analytic_levels: Vec<f64>,
    pub numeric_levels: Vec<f64>,
    /// Analytic levels with no matching converged run.
    pub missing: Vec<f64>,
    /// Converged levels matching no analytic family.
    pub extra: Vec<f64>,
    pub max_level_error: f64,
    pub max_action_error: f64,
    pub converged_runs: usize,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.missing.is_empty()
            && self.extra.is_empty()
            && self.numeric_levels.len() == self.analytic_levels.len()
            && self.max_level_error <= AGREEMENT_TOL
            && self.max_action_error <= AGREEMENT_TOL
    }
}

fn in_window(class: &HomotopyClass, action: f64) -> bool {
    // contractible actions are compared on a > 0
    class.ell != 0 || action > AGREEMENT_TOL
}

fn matches(f: &PeriodicOrbitFamily, level: f64) -> bool {
    match f.level_span {
        Some([lo, hi]) => level >= lo - AGREEMENT_TOL && level <= hi + AGREEMENT_TOL,
        None => (f.level - level).abs() <= AGREEMENT_TOL,
    }
}

/// Seeds on every isolated analytic family, nudged slightly in `p0`.
pub fn family_seeds(h: &ProductHamiltonian, families: &[PeriodicOrbitFamily]) -> Vec<PhasePoint> {
    families
        .iter()
        .filter(|f| f.level_span.is_none())
        .map(|f| {
            let mut s = f.seed_state(&h.geometry);
            s.p[0] += 1e-7;
            for q in s.q.iter_mut() {
                *q = 0.37;
            }
            s.to_point()
        })
        .collect()
}

/// Shoots from the given seeds plus one seed on each analytic family and
/// compares both ways.
pub fn cross_check(
    h: &ProductHamiltonian,
    class: &HomotopyClass,
    seeds: &[PhasePoint],
    cfg: &IntegratorConfig,
) -> Result<CrossCheck> {
    let families = enumerate_families(h, class)?;
    let mut all = family_seeds(h, &families);
    let on_family = all.len();
    all.extend_from_slice(seeds);
    let records = run_sweep(h, class, &all, cfg)?;
    Ok(compare(class, &families, &records, on_family))
}

/// Analytic families (radial inputs only) next to the orbits found by a
/// seed sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitSurvey {
    pub ell: i64,
    pub families: Vec<PeriodicOrbitFamily>,
    pub clusters: Vec<OrbitCluster>,
    pub cross_check: Option<CrossCheck>,
    pub seeds: usize,
    #[serde(skip)]
    pub records: Vec<SweepRecord>,
}

pub fn survey_orbits(h: &ProductHamiltonian, class: &HomotopyClass, opts: &SweepOptions) -> Result<OrbitSurvey> {
    let seeds = sweep_seeds(&h.geometry, opts.seed_count, opts.rng_seed, !h.is_q_independent());
    if !h.is_radial() {
        let records = run_sweep(h, class, &seeds, &opts.integrator)?;
        return Ok(OrbitSurvey {
            ell: class.ell,
            families: Vec::new(),
            clusters: cluster_orbits(&records),
            cross_check: None,
            seeds: seeds.len(),
            records,
        });
    }
    let families = enumerate_families(h, class)?;
    let mut all = family_seeds(h, &families);
    let on_family = all.len();
    all.extend(seeds);
    let records = run_sweep(h, class, &all, &opts.integrator)?;
    let check = compare(class, &families, &records, on_family);
    Ok(OrbitSurvey {
        ell: class.ell,
        clusters: cluster_orbits(&records),
        cross_check: Some(check),
        seeds: all.len(),
        families,
        records,
    })
}

/// Compares sweep records (the first `on_family` of which were seeded on
/// the isolated families, in order) with the enumeration.
pub fn compare(
    class: &HomotopyClass,
    families: &[PeriodicOrbitFamily],
    records: &[SweepRecord],
    on_family: usize,
) -> CrossCheck {
    let converged: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.converged && in_window(class, r.action))
        .collect();
    let mut missing = Vec::new();
    let mut max_level_error: f64 = 0.0;
    let mut max_action_error: f64 = 0.0;
    let isolated: Vec<&PeriodicOrbitFamily> = families.iter().filter(|f| f.level_span.is_none()).collect();
    for (i, f) in isolated.iter().enumerate() {
        let best = converged
            .iter()
            .filter(|r| (r.level - f.level).abs() <= 1e-4)
            .min_by(|a, b| (a.level - f.level).abs().total_cmp(&(b.level - f.level).abs()));
        let own = records.get(i).filter(|r| i < on_family && r.converged);
        match own.or(best.copied()) {
            Some(r) => {
                max_level_error = max_level_error.max((r.level - f.level).abs());
                max_action_error = max_action_error.max((r.action - f.action).abs());
                if (r.level - f.level).abs() > AGREEMENT_TOL {
                    missing.push(f.level);
                }
            }
            None => missing.push(f.level),
        }
    }
    let mut extra = Vec::new();
    for r in &converged {
        match families.iter().find(|f| matches(f, r.level)) {
            Some(f) => {
                if f.level_span.is_none() {
                    max_level_error = max_level_error.max((r.level - f.level).abs());
                    max_action_error = max_action_error.max((r.action - f.action).abs());
                }
            }
            None => extra.push(r.level),
        }
    }
    extra.sort_by(f64::total_cmp);
    extra.dedup_by(|a, b| (*a - *b).abs() <= 1e-4);
    let mut numeric_levels: Vec<f64> = converged.iter().map(|r| r.level).collect();
    numeric_levels.sort_by(f64::total_cmp);
    numeric_levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-4);
    CrossCheck {
        ell: class.ell,
        analytic_levels: families.iter().map(|f| f.level).collect(),
        numeric_levels,
        missing,
        extra,
        max_level_error,
        max_action_error,
        converged_runs: converged.len(),
    }
}
