//! The relative capacity `C(T^{2n}, T^n; R, u, ℓ, a)` and the two
//! end-to-end verifiers bracketing it: sharpness (below the formula an
//! admissible Hamiltonian defeats the action bound) and existence (at or
//! above it, the promised orbit is found).

use serde::Serialize;
use serde_json::{json, Value};

use crate::crosscheck::{family_seeds, AGREEMENT_TOL};
use crate::error::{Error, Result};
use crate::hamiltonians::{Hamiltonian, ProductHamiltonian};
use crate::homology::{morse_crit_table, MorseFunction};
use crate::numeric::{run_sweep, sweep_seeds, IntegratorConfig, SweepRecord};
use crate::orbit_analysis::{enumerate_families, nondegenerate_perturbation_count, OrbitKind, PeriodicOrbitFamily};
use crate::phase_space::{HomotopyClass, PhaseSpaceConfig};
use crate::profiles::{
    build_sharpness_profile, sharpness_level, validate_sharpness, ProfileFamilySpec, PropertyReport, SharpnessSpec,
};
use crate::report::{extended_real, fmt_float, CsvTable};

/// Shape parameter of the default existence witness.
pub const WITNESS_S: f64 = -4.0;
/// Action slack when comparing against a bound.
pub const ACTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CapacityResult {
    pub geometry: PhaseSpaceConfig,
    pub ell: i64,
    #[serde(with = "extended_real")]
    pub a: f64,
    /// `+inf` when no level forces the orbit.
    #[serde(with = "extended_real")]
    pub value: f64,
    /// `ℓ = 0, a ≤ 0`: every compactly supported `H` has a constant orbit
    /// of action 0, so the value is 0 and there is no sharpness witness.
    pub special_case: bool,
    pub witness_sharpness: Option<SharpnessSpec>,
    pub witness_existence: Option<ProfileFamilySpec>,
}

/// `max{R|ℓ| + uℓ, a + uℓ}`, with `0` for `ℓ = 0, a ≤ 0`.
pub fn capacity_formula(geometry: &PhaseSpaceConfig, ell: i64, a: f64) -> CapacityResult {
    let special_case = ell == 0 && a <= 0.0;
    let value = if special_case {
        0.0
    } else if a == f64::INFINITY {
        f64::INFINITY
    } else {
        sharpness_level(geometry, ell, a)
    };
    let finite = value.is_finite() && !special_case;
    CapacityResult {
        geometry: *geometry,
        ell,
        a,
        value,
        special_case,
        witness_sharpness: finite.then(|| SharpnessSpec {
            geometry: *geometry,
            ell,
            a,
            delta: 0.1 * value.min(1.0),
        }),
        witness_existence: finite.then(|| existence_spec(geometry, ell, value)),
    }
}

/// A three-chart family whose marked infimum exceeds `level`.
pub fn existence_spec(geometry: &PhaseSpaceConfig, ell: i64, level: f64) -> ProfileFamilySpec {
    class_family(geometry, ell, WITNESS_S, level)
}

/// The bump family for `ℓ = 0`, the plateau family otherwise.
pub fn class_family(geometry: &PhaseSpaceConfig, ell: i64, s: f64, c: f64) -> ProfileFamilySpec {
    if ell == 0 {
        ProfileFamilySpec::bump(s, c, *geometry)
    } else {
        ProfileFamilySpec::plateau(s, c, *geometry, ell)
    }
}

/// `max{R|ℓ| + uℓ, 0}`, the smallest admissible marked infimum; 1 for the
/// contractible class, where the bound 0 itself is not attained.
pub fn default_family_level(geometry: &PhaseSpaceConfig, ell: i64) -> f64 {
    if ell == 0 {
        return 1.0;
    }
    let l = ell as f64;
    (geometry.radius() * l.abs() + geometry.marked_level() * l).max(0.0)
}

pub fn existence_hamiltonian(spec: &ProfileFamilySpec) -> Result<ProductHamiltonian> {
    let profile = spec.build()?;
    if spec.s >= 1.0 {
        Ok(ProductHamiltonian::outer_radial(spec.geometry, profile))
    } else {
        ProductHamiltonian::three_chart(spec.geometry, profile, spec.s)
    }
}

/// Seed count and integrator settings for numeric sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepOptions {
    pub seed_count: usize,
    pub rng_seed: u64,
    pub integrator: IntegratorConfig,
}

impl SweepOptions {
    pub fn new(seed_count: usize, rng_seed: u64) -> Self {
        Self {
            seed_count,
            rng_seed,
            integrator: IntegratorConfig::default(),
        }
    }
}

/// One line of a verifier's orbit table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitRow {
    pub source: &'static str,
    pub kind: Option<OrbitKind>,
    pub level: f64,
    pub action: f64,
    pub dimension: Option<usize>,
    pub morse_bott: Option<bool>,
}

impl OrbitRow {
    fn analytic(f: &PeriodicOrbitFamily) -> Self {
        Self {
            source: "analytic",
            kind: Some(f.kind),
            level: f.level,
            action: f.action,
            dimension: Some(f.dimension),
            morse_bott: Some(f.morse_bott),
        }
    }

    fn numeric(level: f64, action: f64, kernel_dim: Option<usize>) -> Self {
        Self {
            source: "numeric",
            kind: None,
            level,
            action,
            dimension: kernel_dim,
            morse_bott: None,
        }
    }
}

pub fn orbit_rows_table(rows: &[OrbitRow]) -> CsvTable {
    let mut table = CsvTable::new(&["source", "kind", "level", "action", "dimension", "morseBott"]);
    for r in rows {
        table.push(vec![
            r.source.to_string(),
            r.kind.map(|k| format!("{k:?}")).unwrap_or_default(),
            fmt_float(r.level),
            fmt_float(r.action),
            r.dimension.map(|d| d.to_string()).unwrap_or_default(),
            r.morse_bott.map(|m| m.to_string()).unwrap_or_default(),
        ]);
    }
    table
}

/// Numeric runs merged by level for the orbit table.
fn numeric_rows(records: &[SweepRecord]) -> Vec<OrbitRow> {
    let mut rows: Vec<OrbitRow> = Vec::new();
    let mut converged: Vec<&SweepRecord> = records.iter().filter(|r| r.converged).collect();
    converged.sort_by(|a, b| a.level.total_cmp(&b.level).then(a.seed.cmp(&b.seed)));
    for r in converged {
        if rows.last().is_some_and(|last| (r.level - last.level).abs() <= 1e-4) {
            continue;
        }
        rows.push(OrbitRow::numeric(r.level, r.action, r.kernel_dim));
    }
    rows
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SharpnessReport {
    pub query: Value,
    #[serde(with = "extended_real")]
    pub capacity_value: f64,
    pub sharpness_witness: Option<SharpnessSpec>,
    pub existence_witness: Option<ProfileFamilySpec>,
    pub orbit_table: Vec<OrbitRow>,
    pub pass: bool,
    pub special_case: bool,
    pub marked_infimum: Option<f64>,
    pub expected_infimum: Option<f64>,
    pub validation: Option<PropertyReport>,
    /// Analytic families with action `≥ a`.
    pub analytic_violations: usize,
    pub analytic_families: usize,
    pub seeds: usize,
    pub numeric_converged: usize,
    /// Converged runs with action `≥ a`.
    pub numeric_violations: usize,
    /// True when `m = R|ℓ| + uℓ`, `ℓ ≠ 0`: the class has no orbit at all.
    pub requires_no_orbit: bool,
}

/// Builds the sharpness Hamiltonian at level `m − δ` and certifies that no
/// class-`ℓ` orbit reaches action `a`.
pub fn verify_sharpness(
    geometry: &PhaseSpaceConfig,
    ell: i64,
    a: f64,
    delta: f64,
    opts: &SweepOptions,
) -> Result<SharpnessReport> {
    let cap = capacity_formula(geometry, ell, a);
    let query = json!({
        "R": geometry.radius(),
        "u": geometry.marked_level(),
        "n": geometry.torus_dim(),
        "ell": ell,
        "a": fmt_float(a),
        "delta": delta,
        "seeds": opts.seed_count,
        "rngSeed": opts.rng_seed,
    });
    if cap.special_case {
        return Ok(SharpnessReport {
            query,
            capacity_value: cap.value,
            sharpness_witness: None,
            existence_witness: None,
            orbit_table: Vec::new(),
            pass: true,
            special_case: true,
            marked_infimum: None,
            expected_infimum: None,
            validation: None,
            analytic_violations: 0,
            analytic_families: 0,
            seeds: 0,
            numeric_converged: 0,
            numeric_violations: 0,
            requires_no_orbit: false,
        });
    }
    let m = cap.value;
    let profile = build_sharpness_profile(geometry, ell, a, delta)?;
    let validation = validate_sharpness(&profile, geometry, ell, a, delta);
    let h = ProductHamiltonian::outer_radial(*geometry, profile);
    let class = HomotopyClass::new(ell, geometry.torus_dim());
    let marked = h.inf_over_marked_set();
    let marked_ok = (marked - (m - delta)).abs() <= 1e-9 * (1.0 + m.abs());

    let l = ell as f64;
    let requires_no_orbit = ell != 0 && m == geometry.radius() * l.abs() + geometry.marked_level() * l;
    let families = enumerate_families(&h, &class)?;
    let analytic_violations = families.iter().filter(|f| f.action >= a).count();

    let seeds = sweep_seeds(geometry, opts.seed_count, opts.rng_seed, false);
    let records = run_sweep(&h, &class, &seeds, &opts.integrator)?;
    let numeric_converged = records.iter().filter(|r| r.converged).count();
    let numeric_violations = records.iter().filter(|r| r.converged && r.action >= a).count();

    let mut orbit_table: Vec<OrbitRow> = families.iter().map(OrbitRow::analytic).collect();
    orbit_table.extend(numeric_rows(&records));
    let pass = validation.passed()
        && marked_ok
        && analytic_violations == 0
        && numeric_violations == 0
        && (!requires_no_orbit || (families.is_empty() && numeric_converged == 0));
    Ok(SharpnessReport {
        query,
        capacity_value: m,
        sharpness_witness: Some(SharpnessSpec {
            geometry: *geometry,
            ell,
            a,
            delta,
        }),
        existence_witness: cap.witness_existence,
        orbit_table,
        pass,
        special_case: false,
        marked_infimum: Some(marked),
        expected_infimum: Some(m - delta),
        validation: Some(validation),
        analytic_violations,
        analytic_families: families.len(),
        seeds: seeds.len(),
        numeric_converged,
        numeric_violations,
        requires_no_orbit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExistenceStatus {
    Found,
    /// Non-radial input, seed budget spent without a witness.
    InconclusiveBelowBudget,
}

/// Numeric confirmation of the witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NumericWitness {
    pub level: f64,
    pub action: f64,
    pub kernel_dim: Option<usize>,
    pub seed: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExistenceReport {
    pub query: Value,
    /// `inf H` over the marked set.
    pub capacity_value: f64,
    pub sharpness_witness: Option<SharpnessSpec>,
    pub existence_witness: Option<PeriodicOrbitFamily>,
    pub orbit_table: Vec<OrbitRow>,
    pub pass: bool,
    pub status: ExistenceStatus,
    pub required_level: f64,
    /// `c − uℓ`.
    pub action_bound: f64,
    pub numeric_witness: Option<NumericWitness>,
    pub level_error: Option<f64>,
    pub action_error: Option<f64>,
    /// `2^dim` of the witness family when it is Morse–Bott.
    pub count_lower_bound: Option<u64>,
    /// Critical points of the perfect Morse function on `T^{n+1}`.
    pub morse_point_count: u64,
    pub seeds_used: usize,
    pub needs_review: bool,
}

fn existence_query(h: &dyn Hamiltonian, ell: i64) -> Value {
    let g = h.geometry();
    json!({
        "R": g.radius(),
        "u": g.marked_level(),
        "n": g.torus_dim(),
        "ell": ell,
    })
}

fn check_hypothesis(h: &dyn Hamiltonian, ell: i64) -> Result<(f64, f64)> {
    let g = h.geometry();
    let l = ell as f64;
    let required = (g.radius() * l.abs() + g.marked_level() * l).max(0.0);
    let c = h.inf_over_marked_set();
    if !(c >= required) {
        return Err(Error::InvalidHypothesis(format!(
            "inf over the marked set is {c}, below max(R|ell| + u*ell, 0) = {required}"
        )));
    }
    Ok((required, c))
}

/// Finds a class-`ℓ` orbit of action `≥ c − uℓ` for an admissible `H`.
///
/// Radial inputs are enumerated analytically and the witness is confirmed
/// by shooting. Sampled inputs are swept with at most `budget` seeds.
pub fn verify_existence(h: &ProductHamiltonian, ell: i64, opts: &SweepOptions) -> Result<ExistenceReport> {
    if !h.vanishes_near_boundary(1e-6 * h.geometry.radius()) {
        return Err(Error::InvalidHypothesis("H must vanish near the boundary of the annulus".into()));
    }
    if !h.is_radial() {
        return verify_existence_numeric(h, ell, opts);
    }
    let (required, c) = check_hypothesis(h, ell)?;
    let g = h.geometry;
    let n = g.torus_dim();
    let bound = c - g.marked_level() * ell as f64;
    let class = HomotopyClass::new(ell, n);
    let families = enumerate_families(h, &class)?;
    let witness = families
        .iter()
        .filter(|f| f.action >= bound - ACTION_TOL)
        .max_by(|a, b| a.action.total_cmp(&b.action))
        .cloned()
        .ok_or_else(|| {
            Error::VerificationFailure(format!("no class-{ell} family reaches action {bound}"))
        })?;
    let seeds = family_seeds(h, std::slice::from_ref(&witness));
    let records = run_sweep(h, &class, &seeds, &opts.integrator)?;
    let numeric = records.iter().find(|r| r.converged).map(|r| NumericWitness {
        level: r.level,
        action: r.action,
        kernel_dim: r.kernel_dim,
        seed: r.seed,
    });
    let level_error = numeric.map(|w| (w.level - witness.level).abs());
    let action_error = numeric.map(|w| (w.action - witness.action).abs());
    let count_lower_bound = nondegenerate_perturbation_count(&witness).ok();
    let mut orbit_table: Vec<OrbitRow> = families.iter().map(OrbitRow::analytic).collect();
    orbit_table.extend(numeric_rows(&records));
    let pass = level_error.is_some_and(|e| e <= AGREEMENT_TOL) && action_error.is_some_and(|e| e <= AGREEMENT_TOL);
    Ok(ExistenceReport {
        query: existence_query(h, ell),
        capacity_value: c,
        sharpness_witness: None,
        needs_review: witness.needs_review,
        existence_witness: Some(witness),
        orbit_table,
        pass,
        status: ExistenceStatus::Found,
        required_level: required,
        action_bound: bound,
        numeric_witness: numeric,
        level_error,
        action_error,
        count_lower_bound,
        morse_point_count: morse_crit_table(MorseFunction::FMinusT, n).points.len() as u64,
        seeds_used: seeds.len(),
    })
}

/// Shooting-only existence check, in batches of 1000 seeds up to the
/// budget.
pub fn verify_existence_numeric(h: &dyn Hamiltonian, ell: i64, opts: &SweepOptions) -> Result<ExistenceReport> {
    let (required, c) = check_hypothesis(h, ell)?;
    let g = *h.geometry();
    let bound = c - g.marked_level() * ell as f64;
    let class = HomotopyClass::new(ell, g.torus_dim());
    let seeds = sweep_seeds(&g, opts.seed_count, opts.rng_seed, !h.is_q_independent());
    let mut used = 0;
    let mut records = Vec::new();
    let mut numeric = None;
    for chunk in seeds.chunks(1000) {
        let mut batch = run_sweep(h, &class, chunk, &opts.integrator)?;
        for r in batch.iter_mut() {
            r.seed += used;
        }
        used += chunk.len();
        numeric = batch
            .iter()
            .filter(|r| r.converged && r.action >= bound - ACTION_TOL)
            .max_by(|a, b| a.action.total_cmp(&b.action))
            .map(|r| NumericWitness {
                level: r.level,
                action: r.action,
                kernel_dim: r.kernel_dim,
                seed: r.seed,
            });
        records.extend(batch);
        if numeric.is_some() {
            break;
        }
    }
    let status = if numeric.is_some() {
        ExistenceStatus::Found
    } else {
        ExistenceStatus::InconclusiveBelowBudget
    };
    Ok(ExistenceReport {
        query: existence_query(h, ell),
        capacity_value: c,
        sharpness_witness: None,
        existence_witness: None,
        orbit_table: numeric_rows(&records),
        pass: numeric.is_some(),
        status,
        required_level: required,
        action_bound: bound,
        numeric_witness: numeric,
        level_error: None,
        action_error: None,
        count_lower_bound: None,
        morse_point_count: morse_crit_table(MorseFunction::FMinusT, g.torus_dim()).points.len() as u64,
        seeds_used: used,
        needs_review: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(r: f64, u: f64, n: usize) -> PhaseSpaceConfig {
        PhaseSpaceConfig::new(r, u, n).unwrap()
    }

    #[test]
    fn formula_examples() {
        assert_eq!(capacity_formula(&g(1.0, 0.0, 1), 2, f64::NEG_INFINITY).value, 2.0);
        assert_eq!(capacity_formula(&g(2.0, 1.0, 1), -1, 5.0).value, 4.0);
        let special = capacity_formula(&g(1.0, 0.0, 1), 0, -1.0);
        assert_eq!(special.value, 0.0);
        assert!(special.special_case && special.witness_sharpness.is_none());
        let inf = capacity_formula(&g(1.0, 0.0, 1), 1, f64::INFINITY);
        assert_eq!(inf.value, f64::INFINITY);
        let text = serde_json::to_string(&inf).unwrap();
        assert!(text.contains("\"value\":\"inf\""), "{text}");
    }

    #[test]
    fn sharpness_examples() {
        let opts = SweepOptions::new(200, 3);
        let r = verify_sharpness(&g(1.0, 0.0, 1), 1, f64::NEG_INFINITY, 0.1, &opts).unwrap();
        assert!(r.pass);
        assert!((r.marked_infimum.unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(r.numeric_converged, 0);
        assert_eq!(r.analytic_families, 0);
        let r = verify_sharpness(&g(1.0, 0.0, 1), 1, 2.0, 0.1, &opts).unwrap();
        assert!(r.pass);
        assert!((r.marked_infimum.unwrap() - 1.9).abs() < 1e-12);
        assert!(r.orbit_table.iter().all(|o| o.action < 2.0));
        let r = verify_sharpness(&g(1.0, 0.5, 1), -1, 2.0, 0.1, &opts).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn existence_q_family() {
        let geo = g(1.0, 0.0, 1);
        let spec = existence_spec(&geo, 1, 1.0);
        let h = existence_hamiltonian(&spec).unwrap();
        let r = verify_existence(&h, 1, &SweepOptions::new(0, 0)).unwrap();
        assert!(r.pass);
        let w = r.existence_witness.unwrap();
        assert_eq!(w.kind, OrbitKind::Q);
        assert!(w.action > r.capacity_value);
        assert_eq!(r.count_lower_bound, Some(4));
        assert_eq!(r.morse_point_count, 4);
    }

    #[test]
    fn existence_with_shifted_marked_level() {
        let geo = g(1.0, 0.3, 1);
        let h = existence_hamiltonian(&existence_spec(&geo, 1, 1.3)).unwrap();
        let r = verify_existence(&h, 1, &SweepOptions::new(0, 0)).unwrap();
        assert!(r.pass);
        assert!(r.existence_witness.unwrap().action >= r.capacity_value - 0.3);
    }

    #[test]
    fn existence_contractible() {
        let geo = g(1.0, 0.0, 2);
        let h = existence_hamiltonian(&existence_spec(&geo, 0, 0.5)).unwrap();
        let r = verify_existence(&h, 0, &SweepOptions::new(0, 0)).unwrap();
        assert!(r.pass);
        assert_eq!(r.existence_witness.unwrap().kind, OrbitKind::Contractible);
    }

    #[test]
    fn existence_rejects_low_level() {
        let geo = g(1.0, 0.0, 1);
        let h = existence_hamiltonian(&existence_spec(&geo, 2, 0.5)).unwrap();
        assert!(matches!(
            verify_existence(&h, 2, &SweepOptions::new(0, 0)),
            Err(Error::InvalidHypothesis(_))
        ));
    }
}
