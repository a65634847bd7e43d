//! Analytic enumeration of the periodic-orbit families of radial product
//! Hamiltonians.
//!
//! Actions use the reference loop `z(t) = (p = 0, q0 = ℓt)`, so a family at
//! constant momentum level `p0` has action `H - p0·ℓ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::{HamiltonianForm, ProductHamiltonian};
use crate::phase_space::{HomotopyClass, LiftedState, PhasePoint, PhaseSpaceConfig};
use crate::profiles::{solve_slope, SlopeRoots};
use crate::report::{fmt_float, CsvTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitKind {
    /// Outer-radial family at `p0 = R r`.
    P,
    /// Bump-chart family at `p0 = u + m_u r`, `p_i = 0`.
    Q,
    /// Outer-chart family of the three-chart form.
    Rfam,
    /// Constant orbits at a critical point (class 0).
    Contractible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PeriodicOrbitFamily {
    pub kind: OrbitKind,
    pub ell: i64,
    /// Root of the slope equation in the profile's own variable.
    pub radial_root: f64,
    /// Momentum `p0` along the family.
    pub level: f64,
    /// For critical intervals, the range of `p0` they cover.
    pub level_span: Option<[f64; 2]>,
    pub dimension: usize,
    /// `H` along the family.
    pub hamiltonian_value: f64,
    pub action: f64,
    pub morse_bott: bool,
    pub second_derivative_sign: i8,
    pub needs_review: bool,
}

impl PeriodicOrbitFamily {
    /// The state at `t = 0` of one orbit in the family (all free angles 0).
    pub fn seed_state(&self, geometry: &PhaseSpaceConfig) -> LiftedState {
        let mut state = LiftedState::zeros(geometry.torus_dim());
        state.p[0] = self.level;
        state
    }
}

/// `action = H-value − level·ℓ`.
pub fn action_of_family(family: &PeriodicOrbitFamily, profile_value: f64, class: &HomotopyClass) -> f64 {
    profile_value - family.level * class.ell as f64
}

struct Builder<'a> {
    geometry: &'a PhaseSpaceConfig,
    ell: i64,
    out: Vec<PeriodicOrbitFamily>,
}

impl Builder<'_> {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, kind: OrbitKind, r: f64, level: f64, value: f64, dim: usize, sign: i8, degenerate: bool) {
        let needs_review = kind == OrbitKind::Rfam && self.geometry.marked_level() < 0.0;
        self.out.push(PeriodicOrbitFamily {
            kind,
            ell: self.ell,
            radial_root: r,
            level,
            level_span: None,
            dimension: dim,
            hamiltonian_value: value,
            action: value - level * self.ell as f64,
            morse_bott: !degenerate,
            second_derivative_sign: sign,
            needs_review,
        });
    }

    fn push_flat(&mut self, kind: OrbitKind, span: [f64; 2], levels: [f64; 2], value: f64, dim: usize) {
        let r = 0.5 * (span[0] + span[1]);
        let level = 0.5 * (levels[0] + levels[1]);
        self.push(kind, r, level, value, dim, 0, true);
        if let Some(last) = self.out.last_mut() {
            last.level_span = Some([levels[0].min(levels[1]), levels[0].max(levels[1])]);
        }
    }
}

/// Roots in a window, mapped to families through `level_of`.
#[allow(clippy::too_many_arguments)]
fn collect(
    b: &mut Builder,
    roots: &SlopeRoots,
    window: (f64, f64),
    kind: OrbitKind,
    dim: usize,
    value_of: impl Fn(f64) -> f64,
    level_of: impl Fn(f64) -> f64,
    keep: impl Fn(f64) -> bool,
) {
    let inside = |r: f64| r >= window.0 && r <= window.1;
    for root in &roots.roots {
        let r = root.r;
        if inside(r) && keep(r) {
            b.push(kind, r, level_of(r), value_of(r), dim, root.second_derivative_sign, root.degenerate);
        }
    }
    for flat in &roots.flats {
        let lo = flat[0].max(window.0);
        let hi = flat[1].min(window.1);
        if lo <= hi && keep(0.5 * (lo + hi)) {
            b.push_flat(kind, [lo, hi], [level_of(lo), level_of(hi)], value_of(0.5 * (lo + hi)), dim);
        }
    }
}

/// Every periodic-orbit family of `H` in the class, sorted by level.
///
/// Class 0 lists the constant-orbit families with positive `H`, the window
/// `a > 0` in which contractible actions are measured.
pub fn enumerate_families(h: &ProductHamiltonian, class: &HomotopyClass) -> Result<Vec<PeriodicOrbitFamily>> {
    let g = &h.geometry;
    let n = g.torus_dim();
    if class.torus_dim() != n {
        return Err(Error::InvalidGeometry(format!(
            "class has torus dimension {}, geometry {n}",
            class.torus_dim()
        )));
    }
    let ell = class.ell;
    let l = ell as f64;
    let r_max = g.radius();
    let mut b = Builder {
        geometry: g,
        ell,
        out: Vec::new(),
    };
    match &h.form {
        HamiltonianForm::SampledGrid { .. } => return Err(Error::NotRadial),
        HamiltonianForm::OuterRadial { profile, scale } => {
            let roots = solve_slope(profile, scale * l);
            let (lo, hi) = (-r_max / scale, r_max / scale);
            let positive = |r: f64| ell != 0 || profile.value(r) > 0.0;
            let kind = if ell == 0 { OrbitKind::Contractible } else { OrbitKind::P };
            collect(
                &mut b,
                &roots,
                (lo, hi),
                kind,
                2 * n + 1,
                |r| profile.value(r),
                |r| scale * r,
                |r| positive(r) && (scale * r).abs() < r_max,
            );
        }
        HamiltonianForm::ThreeChart { profile, s } => {
            let m = g.m_u();
            let w = g.outer_width();
            let u = g.marked_level();
            let au = u.abs();
            let value = |r: f64| profile.value(r);
            let keep = |r: f64| ell != 0 || profile.value(r) > 0.0;
            if ell == 0 {
                // bump chart: the centre is a torus of dimension n + 1, other
                // critical radii are spheres times the torus
                let roots = solve_slope(profile, 0.0);
                for root in roots.roots.iter().filter(|x| x.r >= 0.0 && x.r <= 0.5) {
                    if profile.value(root.r) > 0.0 {
                        let dim = if root.r == 0.0 { n + 1 } else { 2 * n + 1 };
                        let sign = root.second_derivative_sign;
                        b.push(OrbitKind::Contractible, root.r, u + m * root.r, value(root.r), dim, sign, root.degenerate);
                    }
                }
                for flat in &roots.flats {
                    let lo = flat[0].max(0.0);
                    let hi = flat[1].min(0.5);
                    if lo <= hi && profile.value(0.5 * (lo + hi)) > 0.0 {
                        b.push_flat(OrbitKind::Contractible, [lo, hi], [u + m * lo, u + m * hi], value(0.5 * (lo + hi)), 2 * n + 1);
                    }
                }
                let outer = solve_slope(profile, 0.0);
                collect(&mut b, &outer, (0.5, 1.0), OrbitKind::Contractible, 2 * n + 1, value, |r| au + w * r, keep);
                collect(&mut b, &outer, (-1.0, -0.5), OrbitKind::Contractible, 2 * n + 1, value, |r| -au + w * r, keep);
                if *s > 0.0 {
                    let split = 0.5 * (r_max + au);
                    b.push_flat(OrbitKind::Contractible, [0.5, 0.5], [-split, split], *s, 2 * n + 2);
                }
            } else {
                let inner = solve_slope(profile, m * l);
                collect(&mut b, &inner, (-0.5, 0.5), OrbitKind::Q, n + 1, value, |r| u + m * r, |_| true);
                let outer = solve_slope(profile, w * l);
                collect(&mut b, &outer, (0.5, 1.0), OrbitKind::Rfam, 2 * n + 1, value, |r| au + w * r, |_| true);
                collect(&mut b, &outer, (-1.0, -0.5), OrbitKind::Rfam, 2 * n + 1, value, |r| -au + w * r, |_| true);
            }
        }
    }
    let mut families = b.out;
    families.sort_by(|a, b| a.level.total_cmp(&b.level));
    Ok(families)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumEntry {
    pub action: f64,
    pub family_index: usize,
}

/// Actions of the enumerated families, ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionSpectrum {
    pub entries: Vec<SpectrumEntry>,
}

impl ActionSpectrum {
    pub fn from_families(families: &[PeriodicOrbitFamily]) -> Self {
        let mut entries: Vec<SpectrumEntry> = families
            .iter()
            .enumerate()
            .map(|(i, f)| SpectrumEntry {
                action: f.action,
                family_index: i,
            })
            .collect();
        entries.sort_by(|a, b| a.action.total_cmp(&b.action).then(a.family_index.cmp(&b.family_index)));
        Self { entries }
    }

    pub fn actions(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.action).collect()
    }

    pub fn max(&self) -> Option<f64> {
        self.entries.last().map(|e| e.action)
    }
}

pub fn action_spectrum(h: &ProductHamiltonian, class: &HomotopyClass) -> Result<ActionSpectrum> {
    Ok(ActionSpectrum::from_families(&enumerate_families(h, class)?))
}

/// The family of largest action, if any.
pub fn max_action_orbit(h: &ProductHamiltonian, class: &HomotopyClass) -> Result<Option<PeriodicOrbitFamily>> {
    let families = enumerate_families(h, class)?;
    Ok(families.into_iter().max_by(|a, b| a.action.total_cmp(&b.action)))
}

/// Number of nondegenerate orbits a Morse perturbation of the family
/// produces: the total Betti number `2^dim` of the torus family.
pub fn nondegenerate_perturbation_count(family: &PeriodicOrbitFamily) -> Result<u64> {
    if !family.morse_bott {
        return Err(Error::NotMorseBott {
            root: family.radial_root,
        });
    }
    Ok(1u64 << family.dimension)
}

/// One loop of the family sampled at `t = k/K`.
pub fn sample_representative(family: &PeriodicOrbitFamily, geometry: &PhaseSpaceConfig, samples: usize) -> Vec<PhasePoint> {
    let n = geometry.torus_dim();
    (0..samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            PhasePoint::new(family.level, family.ell as f64 * t, vec![0.0; n], vec![0.0; n])
        })
        .collect()
}

/// CSV rows `action, kind, level, dimension, morseBott` in spectrum order.
pub fn spectrum_table(families: &[PeriodicOrbitFamily]) -> CsvTable {
    let mut table = CsvTable::new(&["action", "kind", "level", "dimension", "morseBott", "needsReview"]);
    for entry in ActionSpectrum::from_families(families).entries {
        let f = &families[entry.family_index];
        table.push(vec![
            fmt_float(f.action),
            format!("{:?}", f.kind),
            fmt_float(f.level),
            f.dimension.to_string(),
            f.morse_bott.to_string(),
            f.needs_review.to_string(),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{build_sharpness_profile, ProfileDomain, ProfileFamilySpec, RadialProfile};

    fn geometry(r: f64, u: f64, n: usize) -> PhaseSpaceConfig {
        PhaseSpaceConfig::new(r, u, n).unwrap()
    }

    fn outer_plateau(s: f64, ell: i64) -> ProductHamiltonian {
        let g = geometry(1.0, 0.0, 1);
        let f = ProfileFamilySpec::plateau(s, 1.0, g, ell).build().unwrap();
        ProductHamiltonian::outer_radial(g, f)
    }

    fn inner_plateau(s: f64, u: f64, n: usize, ell: i64) -> ProductHamiltonian {
        let g = geometry(1.0, u, n);
        let f = ProfileFamilySpec::plateau(s, 1.0, g, ell).build().unwrap();
        ProductHamiltonian::three_chart(g, f, s).unwrap()
    }

    #[test]
    fn outer_plateau_has_two_p_families() {
        let h = outer_plateau(4.0, 2);
        let fams = enumerate_families(&h, &HomotopyClass::new(2, 1)).unwrap();
        assert_eq!(fams.len(), 2);
        assert!(fams.iter().all(|f| f.kind == OrbitKind::P && f.dimension == 3 && f.morse_bott));
        assert!(fams.iter().all(|f| f.level < 0.0));
        let spectrum = ActionSpectrum::from_families(&fams);
        assert!(spectrum.max().unwrap() > 5.0);
    }

    #[test]
    fn inner_plateau_q_and_r_families() {
        let h = inner_plateau(-4.0, 0.0, 1, 1);
        let fams = enumerate_families(&h, &HomotopyClass::new(1, 1)).unwrap();
        let q: Vec<_> = fams.iter().filter(|f| f.kind == OrbitKind::Q).collect();
        let r: Vec<_> = fams.iter().filter(|f| f.kind == OrbitKind::Rfam).collect();
        assert_eq!(q.len(), 2);
        assert!(q.iter().all(|f| f.dimension == 2));
        assert!(!r.is_empty());
        assert!(r.iter().all(|f| f.action < 0.0 && f.dimension == 3));
        let best = max_action_orbit(&h, &HomotopyClass::new(1, 1)).unwrap().unwrap();
        assert_eq!(best.kind, OrbitKind::Q);
        assert!(best.action > 1.0);
    }

    #[test]
    fn contractible_bump_family() {
        let g = geometry(1.0, 0.0, 1);
        let f = ProfileFamilySpec::bump(2.0, 1.0, g).build().unwrap();
        let h = ProductHamiltonian::outer_radial(g, f);
        let fams = enumerate_families(&h, &HomotopyClass::new(0, 1)).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].kind, OrbitKind::Contractible);
        assert_eq!(fams[0].dimension, 3);
        assert_eq!(fams[0].action, 3.0);
        assert!(fams[0].morse_bott);
    }

    #[test]
    fn contractible_three_chart_family() {
        let g = geometry(1.0, 0.3, 2);
        let f = ProfileFamilySpec::bump(-2.0, 1.0, g).build().unwrap();
        let h = ProductHamiltonian::three_chart(g, f, -2.0).unwrap();
        let fams = enumerate_families(&h, &HomotopyClass::new(0, 2)).unwrap();
        assert_eq!(fams.len(), 1);
        assert_eq!(fams[0].dimension, 3);
        assert_eq!(fams[0].level, 0.3);
    }

    #[test]
    fn action_formula_examples() {
        let parabola = RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 1.0],
            vec![(1.0, 0.0, -2.0), (0.0, -2.0, -2.0)],
            true,
        )
        .unwrap();
        let g = geometry(1.0, 0.0, 1);
        let h = ProductHamiltonian::outer_radial(g, parabola);
        let fams = enumerate_families(&h, &HomotopyClass::new(1, 1)).unwrap();
        assert_eq!(fams.len(), 1);
        assert!((fams[0].level + 0.5).abs() < 1e-14);
        assert!((fams[0].action - 1.25).abs() < 1e-14);
        assert!((action_of_family(&fams[0], 0.75, &HomotopyClass::new(1, 1)) - 1.25).abs() < 1e-14);
        assert_eq!(action_of_family(&fams[0], 0.75, &HomotopyClass::new(0, 1)), 0.75);
    }

    #[test]
    fn zero_hamiltonian_has_empty_spectrum() {
        let h = ProductHamiltonian::zero(geometry(1.0, 0.0, 1));
        assert!(action_spectrum(&h, &HomotopyClass::new(2, 1)).unwrap().entries.is_empty());
        assert!(max_action_orbit(&h, &HomotopyClass::new(1, 1)).unwrap().is_none());
    }

    #[test]
    fn sharpness_hamiltonian_has_no_class_orbit() {
        let g = geometry(1.0, 0.0, 1);
        let f = build_sharpness_profile(&g, 1, f64::NEG_INFINITY, 0.1).unwrap();
        let h = ProductHamiltonian::outer_radial(g, f);
        assert!(max_action_orbit(&h, &HomotopyClass::new(1, 1)).unwrap().is_none());
    }

    #[test]
    fn perturbation_counts() {
        let h = inner_plateau(-4.0, 0.0, 1, 1);
        let fams = enumerate_families(&h, &HomotopyClass::new(1, 1)).unwrap();
        let q = fams.iter().find(|f| f.kind == OrbitKind::Q).unwrap();
        assert_eq!(nondegenerate_perturbation_count(q).unwrap(), 4);
        let p = &enumerate_families(&outer_plateau(4.0, 2), &HomotopyClass::new(2, 1)).unwrap()[0];
        assert_eq!(nondegenerate_perturbation_count(p).unwrap(), 8);
        let mut degenerate = p.clone();
        degenerate.morse_bott = false;
        assert!(matches!(
            nondegenerate_perturbation_count(&degenerate),
            Err(Error::NotMorseBott { .. })
        ));
    }

    #[test]
    fn sampled_grid_is_not_radial() {
        use crate::hamiltonians::SampledGrid;
        let g = geometry(1.0, 0.0, 1);
        let grid = SampledGrid {
            p0_nodes: 3,
            torus_nodes: 2,
            values: vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
            modes: vec![],
        };
        let h = ProductHamiltonian::sampled(g, grid).unwrap();
        assert_eq!(enumerate_families(&h, &HomotopyClass::new(1, 1)), Err(Error::NotRadial));
    }

    #[test]
    fn mirror_symmetry_in_ell() {
        for (s, u) in [(-2.0, 0.0), (-4.0, 0.0), (4.0, 0.0)] {
            let plus = if s > 0.0 { outer_plateau(s, 1) } else { inner_plateau(s, u, 1, 1) };
            let minus = if s > 0.0 { outer_plateau(s, -1) } else { inner_plateau(s, u, 1, -1) };
            let a = enumerate_families(&plus, &HomotopyClass::new(1, 1)).unwrap();
            let b = enumerate_families(&minus, &HomotopyClass::new(-1, 1)).unwrap();
            assert_eq!(a.len(), b.len());
            let mut la: Vec<f64> = a.iter().map(|f| -f.level).collect();
            let mut lb: Vec<f64> = b.iter().map(|f| f.level).collect();
            la.sort_by(f64::total_cmp);
            lb.sort_by(f64::total_cmp);
            for (x, y) in la.iter().zip(&lb) {
                assert!((x - y).abs() < 1e-12);
            }
            let mut aa: Vec<f64> = a.iter().map(|f| f.action).collect();
            let mut ab: Vec<f64> = b.iter().map(|f| f.action).collect();
            aa.sort_by(f64::total_cmp);
            ab.sort_by(f64::total_cmp);
            for (x, y) in aa.iter().zip(&ab) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
