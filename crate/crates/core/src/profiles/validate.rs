//! Property reports for built profiles. Every check is numeric, on a stated
//! grid, so the validator certifies a profile rather than trusting how it
//! was built.

use std::fmt::Write as _;

use serde::Serialize;

use super::families::{level_at_origin, sharpness_level, FamilyKind, ProfileFamilySpec};
use super::roots::solve_slope;
use super::RadialProfile;
use crate::phase_space::PhaseSpaceConfig;

const GRID: usize = 1001;
const BAND_SAMPLES: usize = 200;
const VALUE_TOL: f64 = 1e-12;
const JOIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    fn push(&mut self, property: &str, status: CheckStatus, detail: impl Into<String>) {
        self.checks.push(PropertyCheck {
            property: property.to_string(),
            status,
            detail: detail.into(),
        });
    }

    fn verdict(&mut self, property: &str, failures: Vec<String>, ok_detail: &str) {
        if failures.is_empty() {
            self.push(property, CheckStatus::Pass, ok_detail);
        } else {
            self.push(property, CheckStatus::Fail, failures.join("; "));
        }
    }

    /// True when no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn status(&self, property: &str) -> Option<CheckStatus> {
        self.checks.iter().find(|c| c.property == property).map(|c| c.status)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{:<12} {:?} {}", c.property, c.status, c.detail);
        }
        out
    }
}

fn uniform(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
}

/// Midpoints of `count` equal cells of `(lo, hi)`: an open-interval grid.
fn open(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
}

fn first_violation(points: impl Iterator<Item = f64>, ok: impl Fn(f64) -> bool) -> Option<f64> {
    points.into_iter().find(|&r| !ok(r))
}

fn note(failures: &mut Vec<String>, what: &str, at: Option<f64>) {
    if let Some(r) = at {
        failures.push(format!("{what} fails at r = {r:.6}"));
    }
}

/// Checks the family properties applicable to `spec` on `profile`.
pub fn validate_profile(profile: &RadialProfile, spec: &ProfileFamilySpec) -> PropertyReport {
    let mut report = PropertyReport::default();
    let s = spec.s;
    let k = s.abs();
    let f0 = profile.value(0.0);
    let bump = spec.kind == FamilyKind::BumpContractible;

    // (i) symmetry
    let worst = uniform(-1.0, 1.0, GRID)
        .map(|r| (profile.value(-r) - profile.value(r)).abs())
        .fold(0.0_f64, f64::max);
    let status = if worst <= VALUE_TOL {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    report.push("i", status, format!("max |f(-r) - f(r)| = {worst:.3e} on {GRID} points"));

    // (ii) level at the origin
    let mut failures = Vec::new();
    if !(f0 > spec.c) {
        failures.push(format!("f(0) = {f0} is not above c = {}", spec.c));
    }
    if bump && !(profile.d2(0.0) < 0.0) {
        failures.push(format!("f''(0) = {} is not negative", profile.d2(0.0)));
    }
    if !(level_at_origin(-40.0, spec.c) - spec.c < 1e-12 && level_at_origin(1e6, spec.c) > 1e5) {
        failures.push("level function misses its limits".into());
    }
    report.verdict("ii", failures, &format!("f(0) = {f0} > c = {}", spec.c));

    // (iii) monotone in s, against a neighbouring family member
    let (lower, upper) = if s >= 1.0 {
        (Some(profile.clone()), spec.with_s(s + 0.5).build().ok())
    } else {
        (spec.with_s(s - 0.5).build().ok(), Some(profile.clone()))
    };
    match (lower, upper) {
        (Some(lo), Some(hi)) => {
            let bad = first_violation(uniform(-1.0, 1.0, GRID), |r| lo.value(r) <= hi.value(r) + VALUE_TOL);
            let mut failures = Vec::new();
            note(&mut failures, "f_s1 <= f_s2", bad);
            report.verdict("iii", failures, "pointwise order against s +/- 0.5 on the grid");
        }
        _ => report.push("iii", CheckStatus::Fail, "neighbouring family member could not be built"),
    }

    // (iv) / (v) band conditions
    let half = || uniform(0.0, 1.0, GRID);
    let is = |a: f64, b: f64| (a - b).abs() <= VALUE_TOL * (1.0 + b.abs());
    if s >= 1.0 {
        let mut failures = Vec::new();
        if bump {
            let r1 = 1.0 - 1.0 / (4.0 * s);
            note(&mut failures, "parabolic top", first_violation(uniform(0.0, r1, GRID), |r| {
                is(profile.value(r), f0 * (1.0 - r * r))
            }));
        } else {
            let b1 = 1.0 - 3.0 / (8.0 * s);
            let b2 = 1.0 - 2.0 / (8.0 * s);
            let b3 = 1.0 - 1.0 / (8.0 * s);
            note(&mut failures, "flat top", first_violation(uniform(0.0, b1, GRID), |r| is(profile.value(r), f0)));
            note(&mut failures, "f'' < 0", first_violation(open(b1, b2, BAND_SAMPLES), |r| profile.d2(r) < 0.0));
            note(&mut failures, "f'' > 0", first_violation(open(b2, b3, BAND_SAMPLES), |r| profile.d2(r) > 0.0));
        }
        let zero_from = 1.0 - 1.0 / (8.0 * s);
        note(&mut failures, "vanishing", first_violation(uniform(zero_from, 1.0, GRID), |r| profile.value(r) == 0.0));
        note(&mut failures, "f' <= 0", first_violation(half(), |r| profile.d1(r) <= VALUE_TOL));
        report.verdict("iv", failures, "band values, derivative and curvature signs hold");
    } else {
        report.push("iv", CheckStatus::NotApplicable, "s < 1");
    }
    if s <= -1.0 {
        let mut failures = Vec::new();
        let (inner, mid_lo, mid_hi) = if bump {
            (1.0 / (8.0 * k), 1.0 / (4.0 * k), 1.0 - 1.0 / (4.0 * k))
        } else {
            (1.0 / (8.0 * k), 3.0 / (8.0 * k), 1.0 - 3.0 / (8.0 * k))
        };
        if bump {
            note(&mut failures, "parabolic top", first_violation(uniform(0.0, inner, GRID), |r| {
                is(profile.value(r), f0 * (1.0 - r * r))
            }));
        } else {
            note(&mut failures, "flat top", first_violation(uniform(0.0, inner, GRID), |r| is(profile.value(r), f0)));
            let a2 = 2.0 / (8.0 * k);
            note(&mut failures, "f'' < 0", first_violation(open(inner, a2, BAND_SAMPLES), |r| profile.d2(r) < 0.0));
            note(&mut failures, "f'' > 0", first_violation(open(a2, mid_lo, BAND_SAMPLES), |r| profile.d2(r) > 0.0));
        }
        note(&mut failures, "middle plateau = s", first_violation(uniform(mid_lo, mid_hi, GRID), |r| {
            is(profile.value(r), s)
        }));
        let zero_from = 1.0 - 1.0 / (8.0 * k);
        note(&mut failures, "vanishing", first_violation(uniform(zero_from, 1.0, GRID), |r| profile.value(r) == 0.0));
        note(&mut failures, "f' <= 0 below 1/2", first_violation(uniform(0.0, 0.5, GRID), |r| {
            profile.d1(r) <= VALUE_TOL
        }));
        note(&mut failures, "f' >= 0 above 1/2", first_violation(uniform(0.5, 1.0, GRID), |r| {
            profile.d1(r) >= -VALUE_TOL
        }));
        report.verdict("v", failures, "band values, derivative and curvature signs hold");
    } else {
        report.push("v", CheckStatus::NotApplicable, "s > -1");
    }

    // (vi) and beyond differ between the two families
    if bump {
        check_contractible_critical_points(profile, &mut report);
    } else {
        check_plateau_roots(profile, spec, &mut report);
    }

    // support and smoothness
    let edge = 1.0 - 1.0 / (8.0 * k);
    let bad = first_violation(uniform(edge, 1.5, GRID), |r| profile.value(r) == 0.0 && profile.value(-r) == 0.0);
    let mut failures = Vec::new();
    note(&mut failures, "compact support", bad);
    report.verdict("support", failures, &format!("f = 0 for |r| >= {edge:.6}"));
    let jump = profile.max_breakpoint_jump();
    let status = if jump <= JOIN_TOL {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    report.push("c2", status, format!("largest jump of f, f', f'' at breakpoints {jump:.3e}"));
    report
}

/// The only critical point with a positive value is the origin.
fn check_contractible_critical_points(profile: &RadialProfile, report: &mut PropertyReport) {
    let roots = solve_slope(profile, 0.0);
    let mut failures = Vec::new();
    if !roots.contains(0.0, 1e-12) {
        failures.push("r = 0 is not critical".into());
    }
    for root in &roots.roots {
        if root.r.abs() > 1e-12 && profile.value(root.r) > VALUE_TOL {
            failures.push(format!("critical point r = {:.6} has f > 0", root.r));
        }
    }
    for flat in &roots.flats {
        let v = profile.value(0.5 * (flat[0] + flat[1]));
        if v > VALUE_TOL {
            failures.push(format!("critical interval [{:.6}, {:.6}] has f > 0", flat[0], flat[1]));
        }
    }
    report.verdict("vi", failures, "r = 0 is the only critical point with f > 0");
}

/// Two nondegenerate roots on the side opposite to `ℓ`, the inner one
/// concave and the outer one convex, and nothing else in the window.
fn two_root_pattern(profile: &RadialProfile, slope: f64, ell: i64, window: f64) -> Vec<String> {
    let roots = solve_slope(profile, slope);
    let mut failures = Vec::new();
    if roots.flats.iter().any(|f| f[0].abs() <= window || f[1].abs() <= window) {
        failures.push("f' equals the slope on an interval".into());
    }
    let mut inside: Vec<_> = roots.roots_in(-window, window).copied().collect();
    if inside.len() != 2 {
        failures.push(format!("expected 2 roots with |r| <= {window}, found {}", inside.len()));
        return failures;
    }
    let side = -(ell.signum() as f64);
    if inside.iter().any(|x| x.r * side <= 0.0) {
        failures.push("roots are not on the side opposite to ell".into());
    }
    inside.sort_by(|a, b| a.r.abs().total_cmp(&b.r.abs()));
    if inside.iter().any(|x| x.degenerate) {
        failures.push("a root is degenerate".into());
    }
    if !(inside[0].second_derivative < 0.0 && inside[1].second_derivative > 0.0) {
        failures.push(format!(
            "curvature signs ({}, {}) are not (-, +)",
            inside[0].second_derivative, inside[1].second_derivative
        ));
    }
    failures
}

fn check_plateau_roots(profile: &RadialProfile, spec: &ProfileFamilySpec, report: &mut PropertyReport) {
    let g = &spec.geometry;
    let ell = spec.ell;
    let l = ell as f64;
    let f0 = profile.value(0.0);
    if spec.s >= 1.0 && ell != 0 && f0 > g.radius() * l.abs() {
        let failures = two_root_pattern(profile, g.radius() * l, ell, f64::INFINITY);
        report.verdict("vi", failures, &format!("two roots of f' = R*ell = {}", g.radius() * l));
    } else {
        report.push("vi", CheckStatus::NotApplicable, "needs s >= 1, ell != 0 and f(0) > R|ell|");
    }
    if spec.s <= -1.0 && ell != 0 {
        // restricted to the bump chart |r| <= 1/2; the outer roots belong to (viii)
        let failures = two_root_pattern(profile, g.m_u() * l, ell, 0.5);
        report.verdict("vii", failures, &format!("two roots of f' = m_u*ell = {} with |r| <= 1/2", g.m_u() * l));

        let slope = g.outer_width() * l;
        let roots = solve_slope(profile, slope);
        let mut failures = Vec::new();
        if !roots.flats.is_empty() {
            failures.push("infinitely many roots".into());
        }
        let outward: Vec<_> = roots.roots.iter().filter(|x| x.r * l > 0.0).collect();
        for x in &outward {
            let v = profile.value(x.r);
            if !(v < 0.0) {
                failures.push(format!("root r = {:.6} has f = {v}", x.r));
            }
        }
        report.verdict(
            "viii",
            failures,
            &format!("{} outward roots of f' = (R-|u|)*ell, all with f < 0", outward.len()),
        );
    } else {
        report.push("vii", CheckStatus::NotApplicable, "needs s <= -1 and ell != 0");
        report.push("viii", CheckStatus::NotApplicable, "needs s <= -1 and ell != 0");
    }
}

/// Checks the sharpness profile: level at `u`, chord and slope bounds,
/// compact support, and for `a <= R|ℓ|` the absence of class-ℓ orbits.
pub fn validate_sharpness(
    profile: &RadialProfile,
    geometry: &PhaseSpaceConfig,
    ell: i64,
    a: f64,
    delta: f64,
) -> PropertyReport {
    let mut report = PropertyReport::default();
    let r_max = geometry.radius();
    let u = geometry.marked_level();
    let m = sharpness_level(geometry, ell, a);
    let grid = 10_001;
    let left = || uniform(-r_max, u, grid).skip(1);
    let right = || uniform(u, r_max, grid).take(grid - 1);

    let fu = profile.value(u);
    let failures = if (fu - (m - delta)).abs() <= VALUE_TOL * (1.0 + m) {
        Vec::new()
    } else {
        vec![format!("f(u) = {fu}, expected {}", m - delta)]
    };
    report.verdict("level", failures, &format!("f(u) = m - delta = {}", m - delta));

    let mut failures = Vec::new();
    note(&mut failures, "left chord", first_violation(left(), |r| {
        profile.value(r) < (r_max + r) / (r_max + u) * m
    }));
    note(&mut failures, "right chord", first_violation(right(), |r| {
        profile.value(r) < (r_max - r) / (r_max - u) * m
    }));
    report.verdict("chord", failures, "f below both chords to (u, m)");

    let mut failures = Vec::new();
    note(&mut failures, "left slope", first_violation(left(), |r| profile.d1(r) < m / (r_max + u)));
    note(&mut failures, "right slope", first_violation(right(), |r| profile.d1(r) > -m / (r_max - u)));
    report.verdict("slope", failures, "f' < m/(R+u) left of u and f' > -m/(R-u) right of u");

    let failures = if profile.support_radius() < r_max && profile.value(-r_max) == 0.0 && profile.value(r_max) == 0.0 {
        Vec::new()
    } else {
        vec!["profile does not vanish near the boundary".to_string()]
    };
    report.verdict("support", failures, &format!("support radius {:.6}", profile.support_radius()));

    let l = ell as f64;
    if ell != 0 && m == r_max * l.abs() + u * l {
        let roots = solve_slope(profile, l);
        let failures = if roots.is_empty() {
            Vec::new()
        } else {
            vec![format!("f' = ell has {} solutions", roots.roots.len() + roots.flats.len())]
        };
        report.verdict("soundness", failures, "f' = ell has no solution");
    } else {
        report.push("soundness", CheckStatus::NotApplicable, "m is set by a");
    }

    let jump = profile.max_breakpoint_jump();
    let status = if jump <= JOIN_TOL {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    report.push("c2", status, format!("largest jump of f, f', f'' at breakpoints {jump:.3e}"));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{build_sharpness_profile, ProfileDomain};

    fn geometry(u: f64) -> PhaseSpaceConfig {
        PhaseSpaceConfig::new(1.0, u, 1).unwrap()
    }

    #[test]
    fn plateau_outer_passes() {
        let spec = ProfileFamilySpec::plateau(4.0, 1.0, geometry(0.0), 2);
        let report = validate_profile(&spec.build().unwrap(), &spec);
        assert!(report.passed(), "{}", report.summary());
        assert_eq!(report.status("vi"), Some(CheckStatus::Pass));
        assert_eq!(report.status("vii"), Some(CheckStatus::NotApplicable));
    }

    #[test]
    fn plateau_inner_passes() {
        for ell in [-2, -1, 1, 2] {
            let spec = ProfileFamilySpec::plateau(-4.0, 1.0, geometry(0.0), ell);
            let report = validate_profile(&spec.build().unwrap(), &spec);
            assert!(report.passed(), "ell = {ell}\n{}", report.summary());
            assert_eq!(report.status("viii"), Some(CheckStatus::Pass));
        }
    }

    #[test]
    fn bump_negative_passes_contractible_check() {
        let spec = ProfileFamilySpec::bump(-2.0, 1.0, geometry(0.0));
        let report = validate_profile(&spec.build().unwrap(), &spec);
        assert!(report.passed(), "{}", report.summary());
        assert_eq!(report.status("vi"), Some(CheckStatus::Pass));
    }

    #[test]
    fn parabola_has_no_flat_top() {
        let parabola = RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 1.0],
            vec![(1.0, 0.0, -2.0), (0.0, -2.0, -2.0)],
            true,
        )
        .unwrap();
        let spec = ProfileFamilySpec::plateau(4.0, 0.5, geometry(0.0), 1);
        let report = validate_profile(&parabola, &spec);
        assert_eq!(report.status("iv"), Some(CheckStatus::Fail));
        assert!(!report.passed());
    }

    #[test]
    fn sharpness_report_passes() {
        let g = geometry(0.0);
        for (ell, a) in [(1, f64::NEG_INFINITY), (0, 1.0), (1, 2.0)] {
            let f = build_sharpness_profile(&g, ell, a, 0.1).unwrap();
            let report = validate_sharpness(&f, &g, ell, a, 0.1);
            assert!(report.passed(), "{}", report.summary());
        }
    }
}
