//! Solutions of `f'(r) = slope` on a profile.

use serde::Serialize;

use super::hermite::Piece;
use super::RadialProfile;

/// Residual bound `|f'(r) - slope|` every reported root satisfies.
pub const ROOT_RESIDUAL: f64 = 1e-10;
/// Roots with `|f''(r)|` below this are flagged degenerate.
pub const DEGENERATE_CURVATURE: f64 = 1e-8;

const SUBDIVISIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SlopeRoot {
    pub r: f64,
    pub second_derivative: f64,
    /// `-1`, `+1`, or `0` for a degenerate root.
    pub second_derivative_sign: i8,
    pub degenerate: bool,
    pub residual: f64,
}

/// All solutions of `f'(r) = slope`: isolated roots plus intervals on which
/// `f'` is identically equal to the slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeRoots {
    pub slope: f64,
    pub roots: Vec<SlopeRoot>,
    pub flats: Vec<[f64; 2]>,
}

impl SlopeRoots {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty() && self.flats.is_empty()
    }

    pub fn contains(&self, r: f64, tol: f64) -> bool {
        self.roots.iter().any(|x| (x.r - r).abs() <= tol)
            || self.flats.iter().any(|f| r >= f[0] - tol && r <= f[1] + tol)
    }

    pub fn has_degenerate(&self) -> bool {
        self.roots.iter().any(|x| x.degenerate) || !self.flats.is_empty()
    }

    /// Roots with `lo <= r <= hi`.
    pub fn roots_in(&self, lo: f64, hi: f64) -> impl Iterator<Item = &SlopeRoot> {
        self.roots.iter().filter(move |x| x.r >= lo && x.r <= hi)
    }
}

/// Finds every solution of `f'(r) = slope` on the profile's domain.
///
/// Each piece is scanned on a uniform subdivision for sign changes of
/// `f' - slope`; brackets are polished by safeguarded Newton. Touching
/// roots are caught by minimizing `|f' - slope|` near sampled local minima.
pub fn solve_slope(profile: &RadialProfile, slope: f64) -> SlopeRoots {
    let mut xs = Vec::new();
    let mut flats = Vec::new();
    if profile.is_even() {
        for piece in profile.pieces() {
            let (roots, flat) = piece_roots(piece, slope);
            xs.extend(roots);
            flats.extend(flat);
            let (roots, flat) = piece_roots(piece, -slope);
            xs.extend(roots.into_iter().map(|x| -x));
            flats.extend(flat.map(|[a, b]| [-b, -a]));
        }
    } else {
        for piece in profile.pieces() {
            let (roots, flat) = piece_roots(piece, slope);
            xs.extend(roots);
            flats.extend(flat);
        }
    }
    let flats = merge_intervals(flats);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let roots = xs
        .into_iter()
        .filter(|x| !flats.iter().any(|f| *x >= f[0] - 1e-12 && *x <= f[1] + 1e-12))
        .map(|r| {
            let curvature = profile.d2(r);
            let degenerate = curvature.abs() < DEGENERATE_CURVATURE;
            SlopeRoot {
                r,
                second_derivative: curvature,
                second_derivative_sign: if degenerate { 0 } else { curvature.signum() as i8 },
                degenerate,
                residual: (profile.d1(r) - slope).abs(),
            }
        })
        .collect();
    SlopeRoots { slope, roots, flats }
}

fn merge_intervals(mut v: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    v.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if iv[0] <= last[1] + 1e-12 => last[1] = last[1].max(iv[1]),
            _ => out.push(iv),
        }
    }
    out
}

/// Roots in `x` of `f' = target` on one piece, or the piece itself when
/// `f'` is constant and equal to the target there.
fn piece_roots(piece: &Piece, target: f64) -> (Vec<f64>, Option<[f64; 2]>) {
    let h = piece.h;
    let mut q = piece.slope_coefficients();
    let scale = q.iter().fold(target.abs() * h, |m, c| m.max(c.abs()));
    q[0] -= target * h;
    // h·(f' - target) as a quartic in t
    let g = |t: f64| q[0] + t * (q[1] + t * (q[2] + t * (q[3] + t * q[4])));
    let dg = |t: f64| q[1] + t * (2.0 * q[2] + t * (3.0 * q[3] + t * 4.0 * q[4]));

    if q.iter().all(|c| c.abs() <= 1e-13 * scale.max(1e-300)) || q.iter().all(|c| *c == 0.0) {
        return (Vec::new(), Some([piece.x0, piece.x1()]));
    }

    let ts: Vec<f64> = (0..=SUBDIVISIONS).map(|j| j as f64 / SUBDIVISIONS as f64).collect();
    let gs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let mut roots_t = Vec::new();

    for j in 0..=SUBDIVISIONS {
        if gs[j] == 0.0 {
            roots_t.push(ts[j]);
        }
        if j < SUBDIVISIONS && gs[j] * gs[j + 1] < 0.0 {
            roots_t.push(bracket(&g, &dg, ts[j], ts[j + 1]));
        }
    }

    // touching roots and root pairs hidden inside one subinterval
    for j in 1..SUBDIVISIONS {
        let (a, b, c) = (gs[j - 1], gs[j], gs[j + 1]);
        if b == 0.0 || a * b <= 0.0 || b * c <= 0.0 {
            continue;
        }
        if !(b.abs() <= a.abs() && b.abs() <= c.abs()) {
            continue;
        }
        let Some(t_star) = extremum(&dg, ts[j - 1], ts[j + 1]) else {
            continue;
        };
        let v = g(t_star);
        if v.abs() / h <= ROOT_RESIDUAL {
            roots_t.push(t_star);
        } else if v * b < 0.0 {
            roots_t.push(bracket(&g, &dg, ts[j - 1], t_star));
            roots_t.push(bracket(&g, &dg, t_star, ts[j + 1]));
        }
    }

    let xs = roots_t.into_iter().map(|t| piece.x0 + t * h).collect();
    (xs, None)
}

/// Root of `g` in a sign-changing bracket: Newton steps kept inside the
/// bracket, falling back to bisection.
fn bracket(g: &impl Fn(f64) -> f64, dg: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    let mut t = 0.5 * (a + b);
    for _ in 0..200 {
        let gt = g(t);
        if gt == 0.0 {
            return t;
        }
        if ga * gt < 0.0 {
            b = t;
        } else {
            a = t;
            ga = gt;
        }
        let slope = dg(t);
        let newton = t - gt / slope;
        t = if slope != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
    }
    t
}

/// Stationary point of `g` in `[a, b]` located through a sign change of `g'`.
fn extremum(dg: &impl Fn(f64) -> f64, a: f64, b: f64) -> Option<f64> {
    let (da, db) = (dg(a), dg(b));
    if da == 0.0 {
        return Some(a);
    }
    if db == 0.0 {
        return Some(b);
    }
    if da * db > 0.0 {
        return None;
    }
    let (mut lo, mut hi, mut dlo) = (a, b, da);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let dm = dg(mid);
        if dm == 0.0 {
            return Some(mid);
        }
        if dlo * dm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            dlo = dm;
        }
        if hi - lo <= 4.0 * f64::EPSILON {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{ProfileDomain, RadialProfile};

    fn parabola() -> RadialProfile {
        RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 1.0],
            vec![(1.0, 0.0, -2.0), (0.0, -2.0, -2.0)],
            true,
        )
        .unwrap()
    }

    #[test]
    fn parabola_slope_one() {
        let roots = solve_slope(&parabola(), 1.0);
        assert_eq!(roots.roots.len(), 1);
        let root = roots.roots[0];
        assert!((root.r + 0.5).abs() < 1e-14);
        assert_eq!(root.second_derivative_sign, -1);
        assert!(root.residual <= ROOT_RESIDUAL);
        assert!(roots.flats.is_empty());
    }

    #[test]
    fn zero_slope_on_even_profile_includes_origin() {
        let roots = solve_slope(&parabola(), 0.0);
        assert!(roots.contains(0.0, 1e-12));
    }

    #[test]
    fn flat_pieces_are_reported_as_intervals() {
        let f = RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 0.5, 1.0],
            vec![(2.0, 0.0, 0.0), (2.0, 0.0, 0.0), (0.0, 0.0, 0.0)],
            true,
        )
        .unwrap();
        let roots = solve_slope(&f, 0.0);
        assert_eq!(roots.flats, vec![[-0.5, 0.5]]);
        assert!(roots.roots.iter().all(|r| r.r.abs() >= 0.99));
        assert!(roots.has_degenerate());
    }

    #[test]
    fn touching_root_is_found_and_flagged() {
        // f' = -(x - 0.3)^2 on [0, 1] touches 0 at x = 0.3
        let fp = |x: f64| -(x - 0.3) * (x - 0.3);
        let f = |x: f64| -((x - 0.3).powi(3) + 0.027) / 3.0;
        let fpp = |x: f64| -2.0 * (x - 0.3);
        let profile = RadialProfile::from_jets(
            ProfileDomain::Raw,
            vec![0.0, 1.0],
            vec![(f(0.0), fp(0.0), fpp(0.0)), (f(1.0), fp(1.0), fpp(1.0))],
            false,
        )
        .unwrap();
        let roots = solve_slope(&profile, 0.0);
        assert_eq!(roots.roots.len(), 1);
        assert!((roots.roots[0].r - 0.3).abs() < 1e-5);
        assert!(roots.roots[0].degenerate);
    }
}
