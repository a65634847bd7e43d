//! SVG line plots of a radial profile and its derivative, with the tangent
//! lines of the class slope drawn at every slope root.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::hamiltonians::{HamiltonianForm, ProductHamiltonian};
use crate::profiles::{solve_slope, RadialProfile};
use crate::report::fmt_float;

const WIDTH: f64 = 640.0;
const PANEL: f64 = 220.0;
const MARGIN: f64 = 40.0;
const SAMPLES: usize = 400;

/// Slope `f' = slope` searched on `[lo, hi]` of the profile argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentWindow {
    pub slope: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Tangent windows of the class-`ℓ` orbit equation for a radial
/// Hamiltonian, in profile coordinates.
pub fn tangent_windows(h: &ProductHamiltonian, ell: i64) -> Result<Vec<TangentWindow>> {
    let l = ell as f64;
    let g = &h.geometry;
    match &h.form {
        HamiltonianForm::OuterRadial { profile, scale } => {
            let (lo, hi) = profile.bounds();
            Ok(vec![TangentWindow { slope: scale * l, lo, hi }])
        }
        HamiltonianForm::ThreeChart { .. } if ell == 0 => Ok(vec![TangentWindow {
            slope: 0.0,
            lo: -1.0,
            hi: 1.0,
        }]),
        HamiltonianForm::ThreeChart { .. } => {
            let outer = g.outer_width() * l;
            Ok(vec![
                TangentWindow { slope: outer, lo: -1.0, hi: -0.5 },
                TangentWindow { slope: g.m_u() * l, lo: -0.5, hi: 0.5 },
                TangentWindow { slope: outer, lo: 0.5, hi: 1.0 },
            ])
        }
        HamiltonianForm::SampledGrid { .. } => Err(Error::NotRadial),
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    top: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, ys: impl Iterator<Item = f64>, top: f64) -> Self {
        let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        let pad = 0.05 * (y1 - y0).max(1e-9);
        y0 -= pad;
        y1 += pad;
        Self { x0, x1, y0, y1, top }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.top + PANEL - (y - self.y0) / (self.y1 - self.y0) * PANEL
    }

    fn point(&self, x: f64, y: f64) -> String {
        format!("{:.2},{:.2}", self.px(x), self.py(y))
    }

    /// Segment `[(xa, ya), (xb, yb)]` clipped to the panel's y range.
    fn clip(&self, (xa, ya): (f64, f64), (xb, yb): (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        let dy = yb - ya;
        for (bound, inside_above) in [(self.y0, true), (self.y1, false)] {
            if dy == 0.0 {
                if (inside_above && ya < bound) || (!inside_above && ya > bound) {
                    return None;
                }
                continue;
            }
            let t = (bound - ya) / dy;
            if (dy > 0.0) == inside_above {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        (t0 < t1).then(|| {
            let at = |t: f64| (xa + t * (xb - xa), ya + t * dy);
            (at(t0), at(t1))
        })
    }

    fn axes(&self, out: &mut String, label: &str) {
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999"/>"##,
            MARGIN,
            self.top,
            WIDTH - 2.0 * MARGIN,
            PANEL
        );
        if self.y0 < 0.0 && self.y1 > 0.0 {
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ccc"/>"##,
                MARGIN,
                WIDTH - MARGIN,
                y = self.py(0.0)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{label}  [{}, {}]</text>"#,
            MARGIN,
            self.top - 6.0,
            fmt_float(self.y0),
            fmt_float(self.y1)
        );
    }

    fn polyline(&self, out: &mut String, xs: &[f64], ys: &[f64], colour: &str) {
        let pts: Vec<String> = xs.iter().zip(ys).map(|(x, y)| self.point(*x, *y)).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
    }

    fn dashed(&self, out: &mut String, a: (f64, f64), b: (f64, f64), colour: &str) {
        if let Some((a, b)) = self.clip(a, b) {
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-dasharray="5,4"/>"#,
                self.px(a.0),
                self.py(a.1),
                self.px(b.0),
                self.py(b.1)
            );
        }
    }
}

/// Two stacked panels: `f` with tangent lines at the slope roots, and `f'`
/// with the slope levels. Output depends only on the inputs.
pub fn profile_svg(profile: &RadialProfile, windows: &[TangentWindow], title: &str) -> String {
    let (lo, hi) = profile.bounds();
    let xs: Vec<f64> = (0..=SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / SAMPLES as f64)
        .collect();
    let f: Vec<f64> = xs.iter().map(|&x| profile.value(x)).collect();
    let df: Vec<f64> = xs.iter().map(|&x| profile.d1(x)).collect();
    let top = Frame::new(lo, hi, f.iter().copied(), MARGIN);
    let slopes = windows.iter().map(|w| w.slope);
    let bottom = Frame::new(lo, hi, df.iter().copied().chain(slopes), 2.0 * MARGIN + PANEL);
    let height = 3.0 * MARGIN + 2.0 * PANEL;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, r#"<title>{title}</title>"#);
    top.axes(&mut out, "f");
    bottom.axes(&mut out, "f'");
    top.polyline(&mut out, &xs, &f, "#1f4e9c");
    bottom.polyline(&mut out, &xs, &df, "#9c1f1f");

    let half = 0.15 * (hi - lo);
    for w in windows {
        bottom.dashed(&mut out, (w.lo.max(lo), w.slope), (w.hi.min(hi), w.slope), "#555");
        let roots = solve_slope(profile, w.slope);
        for root in roots.roots_in(w.lo, w.hi) {
            let (r, v) = (root.r, profile.value(root.r));
            let a = (r - half, v - w.slope * half);
            let b = (r + half, v + w.slope * half);
            top.dashed(&mut out, a, b, "#2a8a2a");
            let _ = writeln!(
                out,
                r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#2a8a2a"/>"##,
                top.px(r),
                top.py(v)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="10">tangent at r = {}</text>"#,
                top.px(r) + 4.0,
                top.py(v) - 4.0,
                fmt_float(r)
            );
        }
        for flat in &roots.flats {
            let (a, b) = (flat[0].max(w.lo), flat[1].min(w.hi));
            if a <= b {
                bottom.dashed(&mut out, (a, w.slope), (b, w.slope), "#2a8a2a");
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Profile plot of a radial Hamiltonian for the class `ℓ`.
pub fn hamiltonian_svg(h: &ProductHamiltonian, ell: i64, title: &str) -> Result<String> {
    let profile = h.profile().ok_or(Error::NotRadial)?;
    Ok(profile_svg(profile, &tangent_windows(h, ell)?, title))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::PhaseSpaceConfig;
    use crate::profiles::ProfileFamilySpec;

    fn plateau(s: f64, ell: i64) -> ProductHamiltonian {
        let g = PhaseSpaceConfig::new(1.0, 0.0, 1).unwrap();
        let f = ProfileFamilySpec::plateau(s, 2.0, g, ell).build().unwrap();
        if s > 0.0 {
            ProductHamiltonian::outer_radial(g, f)
        } else {
            ProductHamiltonian::three_chart(g, f, s).unwrap()
        }
    }

    #[test]
    fn tangents_drawn_at_each_root() {
        let h = plateau(4.0, 1);
        let svg = hamiltonian_svg(&h, 1, "plateau").unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("tangent at r").count(), 2);
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn output_is_byte_stable() {
        let h = plateau(-4.0, 2);
        assert_eq!(hamiltonian_svg(&h, 2, "x").unwrap(), hamiltonian_svg(&h, 2, "x").unwrap());
        assert_eq!(tangent_windows(&h, 2).unwrap().len(), 3);
    }

    #[test]
    fn sampled_grid_is_rejected() {
        let g = PhaseSpaceConfig::new(1.0, 0.0, 1).unwrap();
        let grid = crate::hamiltonians::SampledGrid {
            p0_nodes: 3,
            torus_nodes: 2,
            values: vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
            modes: vec![],
        };
        let h = ProductHamiltonian::sampled(g, grid).unwrap();
        assert!(matches!(hamiltonian_svg(&h, 1, "g"), Err(Error::NotRadial)));
    }

    #[test]
    fn clipping_keeps_segments_inside() {
        let f = Frame::new(0.0, 1.0, [0.0, 1.0].into_iter(), 0.0);
        let ((_, ya), (_, yb)) = f.clip((0.0, -10.0), (1.0, 10.0)).unwrap();
        assert!(ya >= f.y0 - 1e-12 && yb <= f.y1 + 1e-12);
        assert!(f.clip((0.0, 5.0), (1.0, 5.0)).is_none());
    }
}
