//! The acceptance suite: seven end-to-end criteria, each returning a
//! verdict with a short detail line.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{
    capacity_formula, existence_hamiltonian, verify_existence, verify_sharpness, SweepOptions, ACTION_TOL,
};
use crate::crosscheck::cross_check;
use crate::error::Result;
use crate::hamiltonians::{Hamiltonian, ProductHamiltonian};
use crate::homology::{
    betti, claim6_dims, claim6_kunneth, morse_crit_table, rsh_dims, sh_dims, t_map_rank, MorseFunction,
};
use crate::numeric::{integrate_states, random_seeds, sweep_seeds, time_one_jacobian, IntegratorConfig, JACOBIAN_STEP};
use crate::orbit_analysis::{enumerate_families, OrbitKind};
use crate::phase_space::{HomotopyClass, PhaseSpaceConfig};
use crate::profiles::{level_at_origin, validate_profile, ProfileFamilySpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {}: {} ({:.1} s) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AcceptanceOptions {
    pub seeds: usize,
    pub rng_seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        Self {
            seeds: 1000,
            rng_seed: crate::numeric::DEFAULT_RNG_SEED,
        }
    }
}

fn outcome(id: u8, name: &'static str, start: Instant, result: Result<(bool, String)>) -> CriterionOutcome {
    let (pass, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        name,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

const ELLS: [i64; 5] = [-2, -1, 0, 1, 2];

/// Capacity formula over the grid, each point bracketed by the sharpness
/// verifier at two `δ`. Budget 60 s.
pub fn criterion_1(opts: &AcceptanceOptions) -> CriterionOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut queries = Vec::new();
        for r in [0.5, 1.0, 2.0] {
            for u in [-r / 2.0, 0.0, r / 2.0] {
                for ell in ELLS {
                    let l = ell as f64;
                    for a in [f64::NEG_INFINITY, 0.5, r * l.abs() + 1.0] {
                        queries.push((r, u, ell, a));
                    }
                }
            }
        }
        let mut formula_misses = 0;
        for &(r, u, ell, a) in &queries {
            let g = PhaseSpaceConfig::new(r, u, 1)?;
            let l = ell as f64;
            let expected = (r * l.abs() + u * l).max(a + u * l);
            if capacity_formula(&g, ell, a).value != expected {
                formula_misses += 1;
            }
        }
        let sweep = SweepOptions::new(opts.seeds, opts.rng_seed);
        let jobs: Vec<_> = queries
            .iter()
            .flat_map(|&q| [0.2, 0.1].map(|d| (q, d)))
            .collect();
        let reports = jobs
            .par_iter()
            .map(|&((r, u, ell, a), delta)| verify_sharpness(&PhaseSpaceConfig::new(r, u, 1)?, ell, a, delta, &sweep))
            .collect::<Result<Vec<_>>>()?;
        let failed = reports.iter().filter(|r| !r.pass).count();
        let special = reports.iter().filter(|r| r.special_case).count();
        let strict = reports.iter().filter(|r| r.requires_no_orbit).count();
        let seconds = start.elapsed().as_secs_f64();
        Ok((
            formula_misses == 0 && failed == 0 && seconds <= 60.0,
            format!(
                "{} grid points, formula mismatches {formula_misses}; {} sharpness runs ({strict} with no orbit allowed, {special} constant-orbit cases), {failed} failed",
                queries.len(),
                reports.len()
            ),
        ))
    };
    outcome(1, "capacity formula and sharpness", start, run())
}

/// The existence inputs: three-chart plateau Hamiltonians whose marked
/// infimum clears `max{R|ℓ| + uℓ, 0}`.
pub fn existence_inputs() -> Vec<(ProfileFamilySpec, i64)> {
    let mut out = Vec::new();
    for s in [-2.0, -4.0] {
        for n in [1, 2] {
            for u in [0.0, 0.3] {
                for ell in [1, 2] {
                    let g = PhaseSpaceConfig::new(1.0, u, n).expect("valid geometry");
                    let l = ell as f64;
                    let c = (g.radius() * l.abs() + u * l).max(0.0);
                    out.push((ProfileFamilySpec::plateau(s, c, g, ell), ell));
                }
            }
        }
    }
    out
}

/// Existence with the action bound, analytic and numeric levels agreeing.
pub fn criterion_2(opts: &AcceptanceOptions) -> CriterionOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let sweep = SweepOptions::new(opts.seeds, opts.rng_seed);
        let mut bad = Vec::new();
        let mut worst: f64 = 0.0;
        for (spec, ell) in existence_inputs() {
            let h = existence_hamiltonian(&spec)?;
            let report = verify_existence(&h, ell, &sweep)?;
            let w = report.existence_witness.as_ref().expect("radial inputs have a witness");
            worst = worst.max(report.level_error.unwrap_or(f64::INFINITY));
            let ok = report.pass && w.action >= report.action_bound - ACTION_TOL;
            if !ok {
                bad.push(format!("s={} n={} u={} ell={ell}", spec.s, spec.geometry.torus_dim(), spec.geometry.marked_level()));
            }
        }
        let seconds = start.elapsed().as_secs_f64();
        Ok((
            bad.is_empty() && seconds <= 120.0,
            format!(
                "{} inputs, worst level error {worst:.1e}{}",
                existence_inputs().len(),
                if bad.is_empty() { String::new() } else { format!(", failed: {}", bad.join("; ")) }
            ),
        ))
    };
    outcome(2, "existence and action bound", start, run())
}

/// `2^{n+1}` nondegenerate orbits from the witness Q-family.
pub fn criterion_3(opts: &AcceptanceOptions) -> CriterionOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let sweep = SweepOptions::new(opts.seeds, opts.rng_seed);
        let mut bad = Vec::new();
        for (spec, ell) in existence_inputs() {
            let n = spec.geometry.torus_dim();
            let h = existence_hamiltonian(&spec)?;
            let report = verify_existence(&h, ell, &sweep)?;
            let expected = 1u64 << (n + 1);
            let is_q = report.existence_witness.as_ref().map(|w| w.kind) == Some(OrbitKind::Q);
            let ok = is_q
                && report.count_lower_bound == Some(expected)
                && betti(n + 1).total() == expected
                && report.morse_point_count == expected;
            if !ok {
                bad.push(format!("s={} n={n} ell={ell}: {:?}", spec.s, report.count_lower_bound));
            }
        }
        Ok((
            bad.is_empty(),
            if bad.is_empty() {
                "counts 4 (n=1) and 8 (n=2) on every input".into()
            } else {
                bad.join("; ")
            },
        ))
    };
    outcome(3, "orbit-count lower bound", start, run())
}

/// P-family actions straddle `a`; Rfam actions are negative.
pub fn criterion_4() -> CriterionOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut checked = 0;
        let mut bad = Vec::new();
        for r in [1.0, 2.0] {
            for s in [2.0, 4.0, 8.0] {
                for ell in [-2, -1, 1, 2] {
                    let g = PhaseSpaceConfig::new(r, 0.0, 1)?;
                    let c = 1.0;
                    let top = level_at_origin(s, c);
                    let low = r * (ell as f64).abs();
                    if top <= low {
                        continue;
                    }
                    let spec = ProfileFamilySpec::plateau(s, c, g, ell);
                    let h = ProductHamiltonian::outer_radial(g, spec.build()?);
                    let fams = enumerate_families(&h, &HomotopyClass::new(ell, 1))?;
                    for a in [low + 0.25 * (top - low), 0.5 * (low + top), low + 0.75 * (top - low)] {
                        checked += 1;
                        let hi = fams.iter().map(|f| f.action).fold(f64::NEG_INFINITY, f64::max);
                        let lo = fams.iter().map(|f| f.action).fold(f64::INFINITY, f64::min);
                        // f(r_s) > f(0) > a and f(r'_s) < f(-1) <= a
                        if !(fams.len() == 2 && hi > top && top > a && lo < low && low <= a) {
                            bad.push(format!("R={r} s={s} ell={ell} a={a}"));
                        }
                    }
                }
            }
        }
        let mut rfam = 0;
        for s in [-1.0, -2.0, -4.0, -8.0] {
            for n in [1, 2] {
                for u in [0.0, 0.3, 0.5] {
                    for ell in [-2, -1, 1, 2] {
                        let g = PhaseSpaceConfig::new(1.0, u, n)?;
                        let l = ell as f64;
                        let c = (g.radius() * l.abs() + u * l).max(0.0) + 0.5;
                        let spec = ProfileFamilySpec::plateau(s, c, g, ell);
                        let h = ProductHamiltonian::three_chart(g, spec.build()?, s)?;
                        for f in enumerate_families(&h, &HomotopyClass::new(ell, n))? {
                            if f.kind == OrbitKind::Rfam {
                                rfam += 1;
                                if !(f.action < 0.0) {
                                    bad.push(format!("Rfam s={s} n={n} u={u} ell={ell} action={}", f.action));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok((
            bad.is_empty() && rfam > 0,
            format!(
                "{checked} straddle checks, {rfam} Rfam families{}",
                if bad.is_empty() { String::new() } else { format!("; failed: {}", bad.join("; ")) }
            ),
        ))
    };
    outcome(4, "step inequalities", start, run())
}

/// Dimension tables and Morse anchors for `n ≤ 3`.
pub fn criterion_5() -> CriterionOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut bad = Vec::new();
        let mut checked = 0;
        for n in 1..=3usize {
            let full = betti(2 * n + 1);
            let small = betti(n + 1);
            for k in 0..=2 * n + 1 {
                checked += 1;
                if claim6_dims(n, k) != claim6_kunneth(n, k) {
                    bad.push(format!("claim6 n={n} k={k}"));
                }
                if k <= n + 1 && full.get(k) != claim6_dims(n, k) + small.get(k) {
                    bad.push(format!("exact sequence n={n} k={k}"));
                }
            }
            for (r, u) in [(1.0, 0.0), (1.0, 0.3), (2.0, -0.5)] {
                let g = PhaseSpaceConfig::new(r, u, n)?;
                for ell in ELLS {
                    let l = ell as f64;
                    let low = r * l.abs();
                    for a in [0.25, 0.5, 1.0, 1.5, 2.5, 4.5] {
                        for c in [0.5, 1.0, 2.0, 3.0, 6.0] {
                            if !(c > (u * l).max(0.0)) {
                                continue;
                            }
                            let top = c - u * l;
                            for k in 0..=2 * n + 2 {
                                checked += 1;
                                let sh = sh_dims(&g, ell, a, k)?;
                                let rsh = rsh_dims(&g, ell, a, c, k)?;
                                let t = t_map_rank(&g, ell, a, c, k)?;
                                let sh_case = if ell != 0 && a < low { 0 } else { full.get(k) };
                                let rsh_case = if a <= top { small.get(k) } else { 0 };
                                let t_case = if low < a && a <= top && k <= n + 1 { small.get(k) } else { 0 };
                                if sh != sh_case || rsh != rsh_case || t != t_case || t > sh.min(rsh) {
                                    bad.push(format!("n={n} R={r} u={u} ell={ell} a={a} c={c} k={k}"));
                                }
                            }
                        }
                    }
                }
            }
            let ft = morse_crit_table(MorseFunction::FT, n);
            let fm = morse_crit_table(MorseFunction::FMinusT, n);
            let anchors = ft.gamma_value == Some(0.0) && ft.min_value == -((n * (n + 2)) as f64);
            if !anchors || ft.index_counts() != full.dims || fm.index_counts() != small.dims {
                bad.push(format!("morse n={n}"));
            }
        }
        Ok((
            bad.is_empty(),
            if bad.is_empty() {
                format!("{checked} table entries")
            } else {
                format!("{} mismatches, first: {}", bad.len(), bad[0])
            },
        ))
    };
    outcome(5, "dimension tables", start, run())
}

/// The family Hamiltonians of the oracle matrix: bump for `ℓ = 0`,
/// plateau otherwise; outer-radial for `s > 0`, three-chart for `s < 0`.
pub fn oracle_matrix() -> Vec<(ProductHamiltonian, HomotopyClass, String)> {
    let mut out = Vec::new();
    for n in [1, 2] {
        for s in [-4.0, -2.0, 2.0, 4.0] {
            for ell in ELLS {
                let g = PhaseSpaceConfig::new(1.0, 0.25, n).expect("valid geometry");
                let spec = if ell == 0 {
                    ProfileFamilySpec::bump(s, 1.0, g)
                } else {
                    ProfileFamilySpec::plateau(s, 1.0, g, ell)
                };
                let f = spec.build().expect("matrix family builds");
                let h = if s > 0.0 {
                    ProductHamiltonian::outer_radial(g, f)
                } else {
                    ProductHamiltonian::three_chart(g, f, s).expect("seam holds")
                };
                out.push((h, HomotopyClass::new(ell, n), format!("n={n} s={s} ell={ell}")));
            }
        }
    }
    out
}

/// Hides the `q`-independence of the wrapped Hamiltonian, so the flow goes
/// through the general implicit-midpoint solve.
pub struct GeneralPath<'a>(pub &'a dyn Hamiltonian);

impl Hamiltonian for GeneralPath<'_> {
    fn geometry(&self) -> &PhaseSpaceConfig {
        self.0.geometry()
    }

    fn value(&self, t: f64, state: &[f64]) -> f64 {
        self.0.value(t, state)
    }

    fn field(&self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        self.0.field(t, state, out)
    }

    fn is_q_independent(&self) -> bool {
        false
    }

    fn is_autonomous(&self) -> bool {
        self.0.is_autonomous()
    }

    fn inf_over_marked_set(&self) -> f64 {
        self.0.inf_over_marked_set()
    }
}

/// Largest `|H(end) − H(start)|` over flows from the given starts.
pub fn energy_drift(h: &dyn Hamiltonian, starts: &[Vec<f64>], cfg: &IntegratorConfig) -> Result<f64> {
    let drifts = starts
        .par_iter()
        .map(|x| {
            let states = integrate_states(h, x, cfg)?;
            let end = &states[states.len() - 1];
            Ok((h.value(1.0, end) - h.value(0.0, x)).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(drifts.into_iter().fold(0.0, f64::max))
}

/// Largest `|det dφ¹ − 1|` over the given points.
pub fn determinant_defect(h: &dyn Hamiltonian, points: &[Vec<f64>], cfg: &IntegratorConfig) -> Result<f64> {
    let defects = points
        .par_iter()
        .map(|x| Ok((time_one_jacobian(h, x, cfg, JACOBIAN_STEP)?.determinant() - 1.0).abs()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Shooting sweeps against the enumeration, plus energy drift and the
/// determinant of the time-one map.
pub fn criterion_6(opts: &AcceptanceOptions) -> CriterionOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let cfg = IntegratorConfig::default();
        let mut bad = Vec::new();
        let mut worst_level: f64 = 0.0;
        let mut worst_action: f64 = 0.0;
        let mut drift: f64 = 0.0;
        let mut det: f64 = 0.0;
        let matrix = oracle_matrix();
        for (h, class, label) in &matrix {
            let g = h.geometry;
            let seeds = sweep_seeds(&g, opts.seeds, opts.rng_seed, false);
            let check = cross_check(h, class, &seeds, &cfg)?;
            worst_level = worst_level.max(check.max_level_error);
            worst_action = worst_action.max(check.max_action_error);
            if !check.agrees() {
                bad.push(format!(
                    "{label}: missing {:?} extra {:?}",
                    check.missing, check.extra
                ));
            }
            let starts: Vec<Vec<f64>> = random_seeds(&g, 1000, opts.rng_seed ^ 0x9e37)
                .iter()
                .map(|p| p.to_lifted().to_vec())
                .collect();
            drift = drift.max(energy_drift(h, &starts, &cfg)?);
            drift = drift.max(energy_drift(&GeneralPath(h), &starts, &cfg)?);
            det = det.max(determinant_defect(h, &starts[..100], &cfg)?);
            det = det.max(determinant_defect(&GeneralPath(h), &starts[..100], &cfg)?);
        }
        let pass = bad.is_empty() && drift <= 1e-8 && det <= 1e-5;
        Ok((
            pass,
            format!(
                "{} Hamiltonians, worst level error {worst_level:.1e}, action error {worst_action:.1e}, drift {drift:.1e}, det defect {det:.1e}{}",
                matrix.len(),
                if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
            ),
        ))
    };
    outcome(6, "numeric-analytic oracle equivalence", start, run())
}

/// Every built family member passes the property validator.
pub fn criterion_7() -> CriterionOutcome {
    let start = Instant::now();
    let run = || -> Result<(bool, String)> {
        let mut specs = Vec::new();
        for r in [0.5, 1.0, 2.0] {
            for u in [-r / 2.0, 0.0, r / 2.0] {
                let g = PhaseSpaceConfig::new(r, u, 1)?;
                for s in [-8.0, -4.0, -2.0, -1.0, 1.0, 2.0, 4.0, 8.0] {
                    specs.push(ProfileFamilySpec::bump(s, 1.0, g));
                    for ell in [-2, -1, 1, 2] {
                        let l = ell as f64;
                        let c = (r * l.abs() + u * l).max(0.0) + 0.5;
                        specs.push(ProfileFamilySpec::plateau(s, c, g, ell));
                    }
                }
            }
        }
        let reports = specs
            .par_iter()
            .map(|spec| Ok((spec, validate_profile(&spec.build()?, spec))))
            .collect::<Result<Vec<_>>>()?;
        let bad: Vec<String> = reports
            .iter()
            .filter(|(_, r)| !r.passed())
            .map(|(spec, r)| {
                let props: Vec<&str> = r.failures().map(|c| c.property.as_str()).collect();
                format!("{:?} s={} ell={}: {}", spec.kind, spec.s, spec.ell, props.join(","))
            })
            .collect();
        let viii = reports.iter().filter(|(_, r)| r.status("viii").is_some()).count();
        Ok((
            bad.is_empty(),
            format!(
                "{} family members, {viii} with the (viii) check{}",
                reports.len(),
                if bad.is_empty() { String::new() } else { format!("; failed: {}", bad.join("; ")) }
            ),
        ))
    };
    outcome(7, "profile properties", start, run())
}

pub fn run_all(opts: &AcceptanceOptions) -> Vec<CriterionOutcome> {
    vec![
        criterion_1(opts),
        criterion_2(opts),
        criterion_3(opts),
        criterion_4(),
        criterion_5(),
        criterion_6(opts),
        criterion_7(),
    ]
}
