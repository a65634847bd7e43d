//! Builders for the contractible bump family, the plateau family and the
//! sharpness profile.
//!
//! Every transition band is a single quintic Hermite piece between fixed
//! endpoint jets. Flat-to-flat transitions are the quintic smoothstep, whose
//! inflection sits at the band midpoint; that is what places the curvature
//! sign change of the plateau family where it is required.

use serde::{Deserialize, Serialize};

use super::{Jet, ProfileDomain, RadialProfile};
use crate::error::{Error, Result};
use crate::phase_space::PhaseSpaceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Contractible-class family: parabolic top, `f''(0) < 0`.
    BumpContractible,
    /// Plateau family for `s ≥ 1`, used with the outer-radial Hamiltonian.
    PlateauOuter,
    /// Plateau family for `s ≤ -1`, used with the three-chart Hamiltonian.
    PlateauInner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileFamilySpec {
    pub kind: FamilyKind,
    pub s: f64,
    pub c: f64,
    pub geometry: PhaseSpaceConfig,
    pub ell: i64,
}

impl ProfileFamilySpec {
    pub fn bump(s: f64, c: f64, geometry: PhaseSpaceConfig) -> Self {
        Self {
            kind: FamilyKind::BumpContractible,
            s,
            c,
            geometry,
            ell: 0,
        }
    }

    /// Plateau spec, the kind chosen by the sign of `s`.
    pub fn plateau(s: f64, c: f64, geometry: PhaseSpaceConfig, ell: i64) -> Self {
        let kind = if s >= 0.0 {
            FamilyKind::PlateauOuter
        } else {
            FamilyKind::PlateauInner
        };
        Self {
            kind,
            s,
            c,
            geometry,
            ell,
        }
    }

    /// The same spec at another parameter value.
    pub fn with_s(&self, s: f64) -> Self {
        Self { s, ..*self }
    }

    pub fn top(&self) -> f64 {
        level_at_origin(self.s, self.c)
    }

    pub fn build(&self) -> Result<RadialProfile> {
        match self.kind {
            FamilyKind::BumpContractible => build_bump_profile(self),
            FamilyKind::PlateauOuter | FamilyKind::PlateauInner => build_plateau_profile(self),
        }
    }
}

/// `f_s(0)`: `c + s` for `s ≥ 1` and `c + e^{s-1}` below. Continuous,
/// increasing, tends to `c` as `s → -∞` and to `∞` as `s → ∞`.
pub fn level_at_origin(s: f64, c: f64) -> f64 {
    if s >= 1.0 {
        c + s
    } else {
        c + (s - 1.0).exp()
    }
}

fn check_regime(s: f64) -> Result<()> {
    if !s.is_finite() || s.abs() < 1.0 {
        return Err(Error::InfeasibleSpec(format!("the family is defined for |s| >= 1, got s = {s}")));
    }
    Ok(())
}

const FLAT_ZERO: Jet = (0.0, 0.0, 0.0);

fn flat(v: f64) -> Jet {
    (v, 0.0, 0.0)
}

fn parabola_jet(top: f64, r: f64) -> Jet {
    (top * (1.0 - r * r), -2.0 * top * r, -2.0 * top)
}

fn even_profile(knots: Vec<f64>, jets: Vec<Jet>) -> Result<RadialProfile> {
    RadialProfile::from_jets(ProfileDomain::Normalized, knots, jets, true)
}

/// The contractible-class family: `f_s(0)(1 - r²)` near the origin, zero
/// near `|r| = 1`, and for `s ≤ -1` the constant `s` on the middle band.
pub fn build_bump_profile(spec: &ProfileFamilySpec) -> Result<RadialProfile> {
    if spec.kind != FamilyKind::BumpContractible {
        return Err(Error::InfeasibleSpec("expected a bump family spec".into()));
    }
    check_regime(spec.s)?;
    if !(spec.c > 0.0) {
        return Err(Error::InfeasibleSpec(format!("the level c must be positive, got {}", spec.c)));
    }
    let top = spec.top();
    let s = spec.s;
    if s >= 1.0 {
        let r1 = 1.0 - 1.0 / (4.0 * s);
        let r2 = 1.0 - 1.0 / (8.0 * s);
        even_profile(
            vec![0.0, r1, r2, 1.0],
            vec![parabola_jet(top, 0.0), parabola_jet(top, r1), FLAT_ZERO, FLAT_ZERO],
        )
    } else {
        let k = s.abs();
        let a1 = 1.0 / (8.0 * k);
        let a2 = 1.0 / (4.0 * k);
        let b2 = 1.0 - 1.0 / (4.0 * k);
        let b3 = 1.0 - 1.0 / (8.0 * k);
        even_profile(
            vec![0.0, a1, a2, b2, b3, 1.0],
            vec![
                parabola_jet(top, 0.0),
                parabola_jet(top, a1),
                flat(s),
                flat(s),
                FLAT_ZERO,
                FLAT_ZERO,
            ],
        )
    }
}

/// The plateau family: flat top `f_s(0)`, smoothstep bands, and for
/// `s ≤ -1` the constant `s` between the bands.
pub fn build_plateau_profile(spec: &ProfileFamilySpec) -> Result<RadialProfile> {
    check_regime(spec.s)?;
    let s = spec.s;
    match spec.kind {
        FamilyKind::PlateauOuter if s >= 1.0 => {}
        FamilyKind::PlateauInner if s <= -1.0 => {}
        FamilyKind::BumpContractible => {
            return Err(Error::InfeasibleSpec("expected a plateau family spec".into()));
        }
        _ => {
            return Err(Error::InfeasibleSpec(format!(
                "family kind {:?} does not match the sign of s = {s}",
                spec.kind
            )));
        }
    }
    let floor = (spec.geometry.marked_level() * spec.ell as f64).max(0.0);
    if !(spec.c > floor) {
        return Err(Error::InfeasibleSpec(format!(
            "the level c = {} must exceed max(u*ell, 0) = {floor}",
            spec.c
        )));
    }
    let top = spec.top();
    if s >= 1.0 {
        let b1 = 1.0 - 3.0 / (8.0 * s);
        let b3 = 1.0 - 1.0 / (8.0 * s);
        even_profile(vec![0.0, b1, b3, 1.0], vec![flat(top), flat(top), FLAT_ZERO, FLAT_ZERO])
    } else {
        let k = s.abs();
        let a1 = 1.0 / (8.0 * k);
        let a3 = 3.0 / (8.0 * k);
        let b3 = 1.0 - 3.0 / (8.0 * k);
        let b4 = 1.0 - 1.0 / (8.0 * k);
        even_profile(
            vec![0.0, a1, a3, b3, b4, 1.0],
            vec![flat(top), flat(top), flat(s), flat(s), FLAT_ZERO, FLAT_ZERO],
        )
    }
}

/// `m = max{R|ℓ| + uℓ, a + uℓ}`, with `a = -∞` allowed.
pub fn sharpness_level(geometry: &PhaseSpaceConfig, ell: i64, a: f64) -> f64 {
    let l = ell as f64;
    let u = geometry.marked_level();
    let base = geometry.radius() * l.abs() + u * l;
    if a == f64::NEG_INFINITY {
        base
    } else {
        base.max(a + u * l)
    }
}

/// Inputs of the sharpness construction, kept for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSpec {
    pub geometry: PhaseSpaceConfig,
    pub ell: i64,
    #[serde(with = "crate::report::extended_real")]
    pub a: f64,
    pub delta: f64,
}

impl SharpnessSpec {
    pub fn level(&self) -> f64 {
        sharpness_level(&self.geometry, self.ell, self.a)
    }
}

/// Profile in raw `p0` coordinates on `(-R, R)` with top `m - δ` around `u`,
/// slopes strictly below `m/(R+u)` on the left and strictly above
/// `-m/(R-u)` on the right, and compact support.
pub fn build_sharpness_profile(geometry: &PhaseSpaceConfig, ell: i64, a: f64, delta: f64) -> Result<RadialProfile> {
    if a.is_nan() || a == f64::INFINITY {
        return Err(Error::InfeasibleSpec(format!("a must be real or -inf, got {a}")));
    }
    if ell == 0 && a <= 0.0 {
        return Err(Error::InfeasibleSpec(
            "ell = 0 with a <= 0 has no sharpness witness (the capacity is 0)".into(),
        ));
    }
    let m = sharpness_level(geometry, ell, a);
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InfeasibleSpec(format!("delta must be positive, got {delta}")));
    }
    if delta >= m {
        return Err(Error::InfeasibleSpec(format!("delta = {delta} must be below m = {m}")));
    }
    let r = geometry.radius();
    let u = geometry.marked_level();
    let top = m - delta;
    // (1 - κ)² > 1 - δ/m leaves room for the ramps and the edge margins
    let kappa = 0.5 * (1.0 - (1.0 - delta / m).sqrt());

    let side = |width: f64| {
        let w = kappa * width / 3.0;
        let slope = m * (1.0 - kappa) / width;
        let linear = top / slope - w;
        (w, slope, linear)
    };
    let (wl, sl, ll) = side(r + u);
    let (wr, sr, lr) = side(r - u);
    if !(ll > 0.0 && lr > 0.0) {
        return Err(Error::InfeasibleSpec("sharpness ramps do not fit the annulus".into()));
    }
    let x0 = -r + wl;
    let x1 = x0 + wl;
    let x2 = x1 + ll;
    let x3 = x2 + wl;
    let y0 = r - wr;
    let y1 = y0 - wr;
    let y2 = y1 - lr;
    let y3 = y2 - wr;
    if !(x3 < u && u < y3) {
        return Err(Error::InfeasibleSpec("sharpness plateau does not contain u".into()));
    }
    let knots = vec![-r, x0, x1, x2, x3, y3, y2, y1, y0, r];
    let jets = vec![
        FLAT_ZERO,
        FLAT_ZERO,
        (sl * wl / 2.0, sl, 0.0),
        (top - sl * wl / 2.0, sl, 0.0),
        flat(top),
        flat(top),
        (top - sr * wr / 2.0, -sr, 0.0),
        (sr * wr / 2.0, -sr, 0.0),
        FLAT_ZERO,
        FLAT_ZERO,
    ];
    RadialProfile::from_jets(ProfileDomain::Raw, knots, jets, false)
}
