//! One-dimensional radial profiles `f`, the building block of every
//! Hamiltonian in this crate, together with the slope solver and the
//! property validator.

mod families;
mod hermite;
mod roots;
mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use hermite::Piece;

pub use families::{
    build_bump_profile, build_plateau_profile, build_sharpness_profile, level_at_origin, sharpness_level,
    FamilyKind, ProfileFamilySpec, SharpnessSpec,
};
pub use hermite::Jet;
pub use roots::{solve_slope, SlopeRoot, SlopeRoots, DEGENERATE_CURVATURE, ROOT_RESIDUAL};
pub use validate::{validate_profile, validate_sharpness, CheckStatus, PropertyCheck, PropertyReport};

/// How the profile argument relates to phase-space coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileDomain {
    /// Argument normalized to `[-1, 1]`; a Hamiltonian rescales `p0`.
    Normalized,
    /// Argument is the raw annulus coordinate `p0`.
    Raw,
}

/// A piecewise quintic function with exact `f`, `f'`, `f''`, `f'''`.
///
/// Even profiles store only the half line `r ≥ 0` (first breakpoint 0) and
/// are evaluated at `|r|`. Outside the breakpoint range the profile is
/// extended by its end value with vanishing derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileJson", into = "ProfileJson")]
pub struct RadialProfile {
    domain: ProfileDomain,
    knots: Vec<f64>,
    jets: Vec<Jet>,
    even: bool,
    #[serde(skip)]
    pieces: Vec<Piece>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ProfileJson {
    domain: ProfileDomain,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    derivatives: Vec<f64>,
    second_derivatives: Vec<f64>,
    even_symmetric: bool,
}

impl TryFrom<ProfileJson> for RadialProfile {
    type Error = Error;

    fn try_from(raw: ProfileJson) -> Result<Self> {
        let n = raw.breakpoints.len();
        if raw.values.len() != n || raw.derivatives.len() != n || raw.second_derivatives.len() != n {
            return Err(Error::Parse("profile arrays must have one entry per breakpoint".into()));
        }
        let jets = (0..n)
            .map(|i| (raw.values[i], raw.derivatives[i], raw.second_derivatives[i]))
            .collect();
        RadialProfile::from_jets(raw.domain, raw.breakpoints, jets, raw.even_symmetric)
    }
}

impl From<RadialProfile> for ProfileJson {
    fn from(p: RadialProfile) -> Self {
        ProfileJson {
            domain: p.domain,
            values: p.jets.iter().map(|j| j.0).collect(),
            derivatives: p.jets.iter().map(|j| j.1).collect(),
            second_derivatives: p.jets.iter().map(|j| j.2).collect(),
            breakpoints: p.knots,
            even_symmetric: p.even,
        }
    }
}

impl RadialProfile {
    /// Builds a profile from breakpoint data `(f, f', f'')`.
    pub fn from_jets(domain: ProfileDomain, knots: Vec<f64>, jets: Vec<Jet>, even: bool) -> Result<Self> {
        if knots.len() < 2 || knots.len() != jets.len() {
            return Err(Error::InfeasibleSpec(
                "a profile needs at least two breakpoints with matching data".into(),
            ));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InfeasibleSpec("breakpoints must be finite and strictly increasing".into()));
        }
        if even {
            if knots[0] != 0.0 {
                return Err(Error::InfeasibleSpec("an even profile starts at breakpoint 0".into()));
            }
            if jets[0].1 != 0.0 {
                return Err(Error::InfeasibleSpec("an even profile needs f'(0) = 0".into()));
            }
        }
        let pieces = knots
            .windows(2)
            .zip(jets.windows(2))
            .map(|(x, j)| Piece::new(x[0], x[1], j[0], j[1]))
            .collect();
        Ok(Self {
            domain,
            knots,
            jets,
            even,
            pieces,
        })
    }

    pub fn domain(&self) -> ProfileDomain {
        self.domain
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// Stored breakpoints (the half line for even profiles).
    pub fn breakpoints(&self) -> &[f64] {
        &self.knots
    }

    pub fn jets(&self) -> &[Jet] {
        &self.jets
    }

    pub(crate) fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Bounds of the full domain, mirrored for even profiles.
    pub fn bounds(&self) -> (f64, f64) {
        let hi = self.knots[self.knots.len() - 1];
        let lo = if self.even { -hi } else { self.knots[0] };
        (lo, hi)
    }

    /// Smallest `ρ` with `f` identically zero on `|r| ≥ ρ` (for even
    /// profiles) or outside `[-ρ, ρ]` otherwise.
    pub fn support_radius(&self) -> f64 {
        let zero = |j: &Jet| j.0 == 0.0 && j.1 == 0.0 && j.2 == 0.0;
        let n = self.knots.len();
        let mut hi = n - 1;
        while hi > 0 && zero(&self.jets[hi]) && zero(&self.jets[hi - 1]) {
            hi -= 1;
        }
        let upper = self.knots[hi];
        if self.even {
            return upper;
        }
        let mut lo = 0;
        while lo + 1 < n && zero(&self.jets[lo]) && zero(&self.jets[lo + 1]) {
            lo += 1;
        }
        upper.abs().max(self.knots[lo].abs())
    }

    /// Derivative of order `k ≤ 3` at `r`.
    pub fn derivative(&self, r: f64, k: usize) -> f64 {
        let (x, sign) = if self.even {
            let odd = k % 2 == 1;
            (r.abs(), if odd && r < 0.0 { -1.0 } else { 1.0 })
        } else {
            (r, 1.0)
        };
        sign * self.half_line_derivative(x, k)
    }

    fn half_line_derivative(&self, x: f64, k: usize) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if x <= first || x >= last {
            let jet = if x <= first { self.jets[0] } else { self.jets[self.jets.len() - 1] };
            // exact data at the end knots, constant extension beyond
            return match k {
                0 => jet.0,
                1 if x == first || x == last => jet.1,
                2 if x == first || x == last => jet.2,
                _ => 0.0,
            };
        }
        let idx = self.knots.partition_point(|&k| k <= x) - 1;
        let piece = &self.pieces[idx.min(self.pieces.len() - 1)];
        piece.deriv_at(piece.local(x), k)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.derivative(r, 0)
    }

    pub fn d1(&self, r: f64) -> f64 {
        self.derivative(r, 1)
    }

    pub fn d2(&self, r: f64) -> f64 {
        self.derivative(r, 2)
    }

    pub fn d3(&self, r: f64) -> f64 {
        self.derivative(r, 3)
    }

    /// Largest jump of `f`, `f'`, `f''` across interior breakpoints, each
    /// measured relative to the floating-point scale of the adjacent pieces.
    pub fn max_breakpoint_jump(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.pieces.windows(2) {
            for k in 0..3 {
                let left = w[0].deriv_at(1.0, k);
                let right = w[1].deriv_at(0.0, k);
                let scale = w
                    .iter()
                    .map(|p| p.coef.iter().fold(0.0_f64, |m, c| m.max(c.abs())) / p.h.powi(k as i32))
                    .fold(1.0_f64, f64::max);
                worst = worst.max((left - right).abs() / scale);
            }
        }
        worst
    }

    /// Uniform grid of `count` points over the full domain.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn parabola() -> RadialProfile {
        RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 1.0],
            vec![(1.0, 0.0, -2.0), (0.0, -2.0, -2.0)],
            true,
        )
        .unwrap()
    }

    #[test]
    fn parabola_is_exact_and_even() {
        let f = parabola();
        for &r in &[-0.9, -0.5, 0.0, 0.25, 0.7] {
            assert!((f.value(r) - (1.0 - r * r)).abs() < 1e-14);
            assert!((f.d1(r) + 2.0 * r).abs() < 1e-14);
            assert!((f.d2(r) + 2.0).abs() < 1e-13);
        }
        assert_eq!(f.bounds(), (-1.0, 1.0));
        assert_eq!(f.value(1.5), 0.0);
        assert_eq!(f.d1(1.5), 0.0);
    }

    #[test]
    fn rejects_malformed_input() {
        let bad = RadialProfile::from_jets(ProfileDomain::Raw, vec![0.0, 0.0], vec![(0.0, 0.0, 0.0); 2], false);
        assert!(bad.is_err());
        let bad = RadialProfile::from_jets(ProfileDomain::Raw, vec![0.0, 1.0], vec![(0.0, 1.0, 0.0); 2], true);
        assert!(bad.is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = parabola();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"evenSymmetric\":true"));
        assert!(text.contains("\"breakpoints\""));
        let back: RadialProfile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.value(0.3), f.value(0.3));
    }
}
