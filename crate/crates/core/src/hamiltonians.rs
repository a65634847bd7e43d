//! Product Hamiltonians on `A_R × T^{2n}` and their Hamiltonian vector fields.
//!
//! States are flat slices `[p0, p1, ..., pn, q0, q1, ..., qn]` with lifted
//! (unwrapped) coordinates. The field satisfies `ι_X ω = -dH`, i.e.
//! `q̇ = ∂H/∂p` and `ṗ = -∂H/∂q`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{signed_wrap, wrap, PhasePoint, PhaseSpaceConfig, P_PERIOD};
use crate::profiles::{ProfileDomain, RadialProfile};

/// Seam agreement required between the three-chart pieces.
pub const SEAM_TOL: f64 = 1e-9;

const FD_STEP: f64 = 1e-6;

/// An evaluable, possibly time-dependent Hamiltonian.
pub trait Hamiltonian: Sync {
    fn geometry(&self) -> &PhaseSpaceConfig;

    fn value(&self, t: f64, state: &[f64]) -> f64;

    /// Writes `[ṗ0..ṗn, q̇0..q̇n]` into `out`.
    fn field(&self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()>;

    /// True when `H` depends on the momenta only.
    fn is_q_independent(&self) -> bool;

    fn is_autonomous(&self) -> bool;

    /// `inf` of `H` over `[0, 1] × L_u × T^n`.
    fn inf_over_marked_set(&self) -> f64;
}

/// Phase velocity at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorFieldValue {
    pub dp0: f64,
    pub dq0: f64,
    pub dp: Vec<f64>,
    pub dq: Vec<f64>,
}

impl VectorFieldValue {
    fn from_flat(flat: &[f64]) -> Self {
        let half = flat.len() / 2;
        Self {
            dp0: flat[0],
            dq0: flat[half],
            dp: flat[1..half].to_vec(),
            dq: flat[half + 1..].to_vec(),
        }
    }
}

pub fn state_of(x: &PhasePoint) -> Vec<f64> {
    x.to_lifted().to_vec()
}

/// `H(x)` at time 0.
pub fn eval_h(h: &dyn Hamiltonian, x: &PhasePoint) -> f64 {
    h.value(0.0, &state_of(x))
}

/// `X_H(x)` at time 0.
pub fn hamiltonian_vector_field(h: &dyn Hamiltonian, x: &PhasePoint) -> Result<VectorFieldValue> {
    let state = state_of(x);
    let mut out = vec![0.0; state.len()];
    h.field(0.0, &state, &mut out)?;
    Ok(VectorFieldValue::from_flat(&out))
}

/// The vector field from central differences of `H` with the given step.
pub fn finite_difference_field(h: &dyn Hamiltonian, t: f64, state: &[f64], step: f64) -> Vec<f64> {
    let half = state.len() / 2;
    let mut out = vec![0.0; state.len()];
    let mut x = state.to_vec();
    for i in 0..state.len() {
        let orig = x[i];
        x[i] = orig + step;
        let up = h.value(t, &x);
        x[i] = orig - step;
        let down = h.value(t, &x);
        x[i] = orig;
        let d = (up - down) / (2.0 * step);
        if i < half {
            out[half + i] = d;
        } else {
            out[i - half] = -d;
        }
    }
    out
}

/// Which of the three-chart formulas applies at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chart {
    Bump,
    Right,
    Left,
    Middle,
}

/// Multilinear momentum grid times optional Fourier modes in `q`.
///
/// `values` is row-major over `(p0, p1, ..., pn)` with the last axis
/// fastest. The `p0` axis has `p0_nodes` nodes spanning `[-R, R]` and must
/// vanish at both ends; every torus axis has `torus_nodes` periodic nodes
/// on `[0, 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampledGrid {
    pub p0_nodes: usize,
    pub torus_nodes: usize,
    pub values: Vec<f64>,
    #[serde(default)]
    pub modes: Vec<FourierMode>,
}

/// Factor `amplitude · cos(2π k·q + phase)` added to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: Vec<i64>,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "camelCase")]
pub enum HamiltonianForm {
    /// `H = f(p0 / scale)`.
    OuterRadial { profile: RadialProfile, scale: f64 },
    /// Bump chart around `ū`, two outer charts, constant `s` elsewhere.
    ThreeChart { profile: RadialProfile, s: f64 },
    SampledGrid { grid: SampledGrid },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductHamiltonian {
    pub geometry: PhaseSpaceConfig,
    #[serde(flatten)]
    pub form: HamiltonianForm,
}

impl ProductHamiltonian {
    /// `H = f(p0/R)` for a normalized profile, `H = f(p0)` for a raw one.
    pub fn outer_radial(geometry: PhaseSpaceConfig, profile: RadialProfile) -> Self {
        let scale = match profile.domain() {
            ProfileDomain::Normalized => geometry.radius(),
            ProfileDomain::Raw => 1.0,
        };
        Self {
            geometry,
            form: HamiltonianForm::OuterRadial { profile, scale },
        }
    }

    pub fn three_chart(geometry: PhaseSpaceConfig, profile: RadialProfile, s: f64) -> Result<Self> {
        if !(s.abs() >= 1.0) {
            return Err(Error::InfeasibleSpec(format!("three-chart Hamiltonians need |s| >= 1, got {s}")));
        }
        if profile.domain() != ProfileDomain::Normalized || !profile.is_even() {
            return Err(Error::InfeasibleSpec("three-chart Hamiltonians need an even normalized profile".into()));
        }
        let seam = profile.value(0.5);
        if (seam - s).abs() > SEAM_TOL {
            return Err(Error::InfeasibleSpec(format!(
                "charts disagree on the seam: f(1/2) = {seam}, s = {s}"
            )));
        }
        Ok(Self {
            geometry,
            form: HamiltonianForm::ThreeChart { profile, s },
        })
    }

    pub fn sampled(geometry: PhaseSpaceConfig, grid: SampledGrid) -> Result<Self> {
        let n = geometry.torus_dim();
        if grid.p0_nodes < 3 || grid.torus_nodes < 2 {
            return Err(Error::Parse("grid needs at least 3 p0 nodes and 2 torus nodes".into()));
        }
        let expected = grid.p0_nodes * grid.torus_nodes.pow(n as u32);
        if grid.values.len() != expected {
            return Err(Error::Parse(format!(
                "grid has {} values, expected {expected}",
                grid.values.len()
            )));
        }
        let stride = grid.torus_nodes.pow(n as u32);
        let edges = grid.values[..stride]
            .iter()
            .chain(&grid.values[grid.values.len() - stride..]);
        if edges.into_iter().any(|v| *v != 0.0) {
            return Err(Error::Parse("grid values must vanish at p0 = -R and p0 = R".into()));
        }
        if let Some(mode) = grid.modes.iter().find(|m| m.k.len() != n + 1) {
            return Err(Error::Parse(format!(
                "Fourier mode {:?} needs {} wave numbers",
                mode.k,
                n + 1
            )));
        }
        Ok(Self {
            geometry,
            form: HamiltonianForm::SampledGrid { grid },
        })
    }

    /// The identically zero Hamiltonian.
    pub fn zero(geometry: PhaseSpaceConfig) -> Self {
        let profile = RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 1.0],
            vec![(0.0, 0.0, 0.0), (0.0, 0.0, 0.0)],
            true,
        )
        .expect("zero profile");
        Self::outer_radial(geometry, profile)
    }

    pub fn profile(&self) -> Option<&RadialProfile> {
        match &self.form {
            HamiltonianForm::OuterRadial { profile, .. } | HamiltonianForm::ThreeChart { profile, .. } => {
                Some(profile)
            }
            HamiltonianForm::SampledGrid { .. } => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.form, HamiltonianForm::SampledGrid { .. })
    }

    fn torus_offsets(&self, state: &[f64]) -> (Vec<f64>, f64) {
        let n = self.geometry.torus_dim();
        let mut d = Vec::with_capacity(n + 1);
        d.push(state[0] - self.geometry.marked_level());
        for &p in &state[1..=n] {
            d.push(signed_wrap(p, P_PERIOD));
        }
        let rho = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        (d, rho)
    }

    /// Region dispatch for the three-chart form, in the listed order.
    pub fn chart_at(&self, state: &[f64]) -> Chart {
        let g = &self.geometry;
        let (_, rho) = self.torus_offsets(state);
        let split = 0.5 * (g.radius() + g.marked_level().abs());
        if rho <= 0.5 * g.m_u() {
            Chart::Bump
        } else if state[0] >= split {
            Chart::Right
        } else if state[0] <= -split {
            Chart::Left
        } else {
            Chart::Middle
        }
    }

    /// Evaluates one chart's formula regardless of the region predicate.
    pub fn chart_value(&self, chart: Chart, state: &[f64]) -> Option<f64> {
        let HamiltonianForm::ThreeChart { profile, s } = &self.form else {
            return None;
        };
        let g = &self.geometry;
        let au = g.marked_level().abs();
        let w = g.outer_width();
        Some(match chart {
            Chart::Bump => profile.value(self.torus_offsets(state).1 / g.m_u()),
            Chart::Right => profile.value((state[0] - au) / w),
            Chart::Left => profile.value((state[0] + au) / w),
            Chart::Middle => *s,
        })
    }

    fn grid_momentum_value(&self, grid: &SampledGrid, state: &[f64]) -> f64 {
        let g = &self.geometry;
        let n = g.torus_dim();
        let r = g.radius();
        if state[0] <= -r || state[0] >= r {
            return 0.0;
        }
        let h0 = 2.0 * r / (grid.p0_nodes - 1) as f64;
        let x0 = (state[0] + r) / h0;
        let i0 = (x0.floor() as usize).min(grid.p0_nodes - 2);
        let f0 = x0 - i0 as f64;
        let nt = grid.torus_nodes;
        let ht = P_PERIOD / nt as f64;
        let mut lower = Vec::with_capacity(n);
        let mut frac = Vec::with_capacity(n);
        for &p in &state[1..=n] {
            let x = wrap(p, P_PERIOD) / ht;
            let i = (x.floor() as usize).min(nt - 1);
            lower.push(i);
            frac.push(x - i as f64);
        }
        let mut total = 0.0;
        for corner in 0..(1usize << (n + 1)) {
            let mut weight = if corner & 1 == 0 { 1.0 - f0 } else { f0 };
            let mut index = i0 + (corner & 1);
            for j in 0..n {
                let up = (corner >> (j + 1)) & 1;
                weight *= if up == 0 { 1.0 - frac[j] } else { frac[j] };
                index = index * nt + (lower[j] + up) % nt;
            }
            if weight != 0.0 {
                total += weight * grid.values[index];
            }
        }
        total
    }

    fn mode_factor(grid: &SampledGrid, q: &[f64]) -> (f64, Vec<f64>) {
        let mut factor = 1.0;
        let mut grad = vec![0.0; q.len()];
        for m in &grid.modes {
            let phase = TAU * m.k.iter().zip(q).map(|(k, x)| *k as f64 * x).sum::<f64>() + m.phase;
            factor += m.amplitude * phase.cos();
            let ds = -m.amplitude * phase.sin() * TAU;
            for (g, k) in grad.iter_mut().zip(&m.k) {
                *g += ds * *k as f64;
            }
        }
        (factor, grad)
    }

    /// True when `H` vanishes on the collars `|p0| >= R - width`.
    pub fn vanishes_near_boundary(&self, width: f64) -> bool {
        let g = &self.geometry;
        let n = g.torus_dim();
        let r = g.radius();
        let mut state = vec![0.0; 2 * (n + 1)];
        for i in 0..=64 {
            let p0 = r - width + width * i as f64 / 64.0 * (1.0 - 1e-12);
            for sign in [-1.0, 1.0] {
                for k in 0..8 {
                    state[0] = sign * p0;
                    for j in 1..=n {
                        state[j] = 0.25 * k as f64 + 0.1 * j as f64;
                        state[n + 1 + j] = 0.125 * k as f64;
                    }
                    if self.value(0.0, &state) != 0.0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl Hamiltonian for ProductHamiltonian {
    fn geometry(&self) -> &PhaseSpaceConfig {
        &self.geometry
    }

    fn value(&self, _t: f64, state: &[f64]) -> f64 {
        match &self.form {
            HamiltonianForm::OuterRadial { profile, scale } => profile.value(state[0] / scale),
            HamiltonianForm::ThreeChart { .. } => {
                let chart = self.chart_at(state);
                self.chart_value(chart, state).unwrap_or(0.0)
            }
            HamiltonianForm::SampledGrid { grid } => {
                let base = self.grid_momentum_value(grid, state);
                if grid.modes.is_empty() || base == 0.0 {
                    return base;
                }
                let n1 = self.geometry.torus_dim() + 1;
                base * Self::mode_factor(grid, &state[n1..]).0
            }
        }
    }

    fn field(&self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        let n1 = self.geometry.torus_dim() + 1;
        out.iter_mut().for_each(|v| *v = 0.0);
        match &self.form {
            HamiltonianForm::OuterRadial { profile, scale } => {
                out[n1] = profile.d1(state[0] / scale) / scale;
            }
            HamiltonianForm::ThreeChart { profile, .. } => {
                let g = &self.geometry;
                match self.chart_at(state) {
                    Chart::Bump => {
                        let (d, rho) = self.torus_offsets(state);
                        let m = g.m_u();
                        let slope = profile.d1(rho / m) / m;
                        if rho == 0.0 {
                            if slope != 0.0 {
                                return Err(Error::SingularPoint { derivative: slope * m });
                            }
                        } else {
                            for i in 0..n1 {
                                out[n1 + i] = slope * d[i] / rho;
                            }
                        }
                    }
                    Chart::Right => {
                        let w = g.outer_width();
                        out[n1] = profile.d1((state[0] - g.marked_level().abs()) / w) / w;
                    }
                    Chart::Left => {
                        let w = g.outer_width();
                        out[n1] = profile.d1((state[0] + g.marked_level().abs()) / w) / w;
                    }
                    Chart::Middle => {}
                }
            }
            HamiltonianForm::SampledGrid { grid } => {
                let mut x = state.to_vec();
                let (factor, grad) = Self::mode_factor(grid, &state[n1..]);
                let base = self.grid_momentum_value(grid, state);
                for i in 0..n1 {
                    let orig = x[i];
                    x[i] = orig + FD_STEP;
                    let up = self.grid_momentum_value(grid, &x);
                    x[i] = orig - FD_STEP;
                    let down = self.grid_momentum_value(grid, &x);
                    x[i] = orig;
                    out[n1 + i] = factor * (up - down) / (2.0 * FD_STEP);
                    out[i] = -base * grad[i];
                }
                let _ = t;
            }
        }
        Ok(())
    }

    fn is_q_independent(&self) -> bool {
        match &self.form {
            HamiltonianForm::SampledGrid { grid } => grid.modes.iter().all(|m| m.amplitude == 0.0),
            _ => true,
        }
    }

    fn is_autonomous(&self) -> bool {
        true
    }

    fn inf_over_marked_set(&self) -> f64 {
        let n1 = self.geometry.torus_dim() + 1;
        let mut state = vec![0.0; 2 * n1];
        state[0] = self.geometry.marked_level();
        if self.is_q_independent() {
            return self.value(0.0, &state);
        }
        marked_grid_minimum(self, &mut state, &[0.0])
    }
}

/// Minimum of `H` over a `q` lattice (and the given times) on the marked set.
fn marked_grid_minimum(h: &dyn Hamiltonian, state: &mut [f64], times: &[f64]) -> f64 {
    let n1 = state.len() / 2;
    let per_axis: usize = match n1 {
        0..=2 => 32,
        3 => 16,
        _ => 6,
    };
    let total = per_axis.pow(n1 as u32);
    let mut best = f64::INFINITY;
    for &t in times {
        for idx in 0..total {
            let mut rest = idx;
            for j in 0..n1 {
                state[n1 + j] = (rest % per_axis) as f64 / per_axis as f64;
                rest /= per_axis;
            }
            best = best.min(h.value(t, state));
        }
    }
    best
}

/// A one-periodic blend of autonomous snapshots:
/// `H_t = Σ_k w_k(t) H_k` with `w_k(t) = (1 + cos 2π(t - k/K)) / K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDependentHamiltonian {
    snapshots: Vec<ProductHamiltonian>,
}

impl TimeDependentHamiltonian {
    pub fn new(snapshots: Vec<ProductHamiltonian>) -> Result<Self> {
        let Some(first) = snapshots.first() else {
            return Err(Error::Parse("at least one snapshot is required".into()));
        };
        if snapshots.iter().any(|h| h.geometry != first.geometry) {
            return Err(Error::InvalidGeometry("snapshots must share one geometry".into()));
        }
        Ok(Self { snapshots })
    }

    pub fn weights(&self, t: f64) -> Vec<f64> {
        let k = self.snapshots.len();
        if k == 1 {
            return vec![1.0];
        }
        (0..k)
            .map(|i| (1.0 + (TAU * (t - i as f64 / k as f64)).cos()) / k as f64)
            .collect()
    }
}

impl Hamiltonian for TimeDependentHamiltonian {
    fn geometry(&self) -> &PhaseSpaceConfig {
        &self.snapshots[0].geometry
    }

    fn value(&self, t: f64, state: &[f64]) -> f64 {
        self.weights(t)
            .iter()
            .zip(&self.snapshots)
            .map(|(w, h)| w * h.value(t, state))
            .sum()
    }

    fn field(&self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut buf = vec![0.0; out.len()];
        for (w, h) in self.weights(t).iter().zip(&self.snapshots) {
            h.field(t, state, &mut buf)?;
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += w * b;
            }
        }
        Ok(())
    }

    fn is_q_independent(&self) -> bool {
        self.snapshots.iter().all(|h| h.is_q_independent())
    }

    fn is_autonomous(&self) -> bool {
        self.snapshots.len() == 1
    }

    fn inf_over_marked_set(&self) -> f64 {
        let n1 = self.geometry().torus_dim() + 1;
        let mut state = vec![0.0; 2 * n1];
        state[0] = self.geometry().marked_level();
        let times: Vec<f64> = (0..32).map(|i| i as f64 / 32.0).collect();
        marked_grid_minimum(self, &mut state, &times)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{build_sharpness_profile, ProfileFamilySpec};

    fn geometry(r: f64, u: f64, n: usize) -> PhaseSpaceConfig {
        PhaseSpaceConfig::new(r, u, n).unwrap()
    }

    fn parabola() -> RadialProfile {
        RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 1.0],
            vec![(1.0, 0.0, -2.0), (0.0, -2.0, -2.0)],
            true,
        )
        .unwrap()
    }

    fn point(p0: f64, p: &[f64]) -> PhasePoint {
        PhasePoint::new(p0, 0.3, p.to_vec(), vec![0.2; p.len()])
    }

    #[test]
    fn outer_radial_parabola() {
        let h = ProductHamiltonian::outer_radial(geometry(1.0, 0.0, 1), parabola());
        assert!((eval_h(&h, &point(0.5, &[0.0])) - 0.75).abs() < 1e-15);
        let x = hamiltonian_vector_field(&h, &point(-0.5, &[0.3])).unwrap();
        assert!((x.dq0 - 1.0).abs() < 1e-15);
        assert_eq!(x.dp0, 0.0);
        assert_eq!(x.dp, vec![0.0]);
        assert_eq!(x.dq, vec![0.0]);
    }

    fn inner_plateau(s: f64, u: f64, n: usize) -> ProductHamiltonian {
        let g = geometry(1.0, u, n);
        let profile = ProfileFamilySpec::plateau(s, 1.0, g, 1).build().unwrap();
        ProductHamiltonian::three_chart(g, profile, s).unwrap()
    }

    #[test]
    fn three_chart_middle_band_is_constant() {
        let h = inner_plateau(-2.0, 0.0, 1);
        let x = point(0.7, &[1.0]);
        assert_eq!(eval_h(&h, &x), -2.0);
        let v = hamiltonian_vector_field(&h, &x).unwrap();
        assert_eq!((v.dp0, v.dq0, v.dp[0], v.dq[0]), (0.0, 0.0, 0.0, 0.0));
        // p0 = 0.7 falls in the right chart, where f is already at the plateau s
        assert_eq!(h.chart_at(&state_of(&x)), Chart::Right);
        let y = point(0.3, &[1.0]);
        assert_eq!(h.chart_at(&state_of(&y)), Chart::Middle);
        assert_eq!(eval_h(&h, &y), -2.0);
    }

    #[test]
    fn three_chart_marked_value() {
        let h = inner_plateau(-2.0, 0.0, 1);
        let top = eval_h(&h, &point(0.0, &[0.0]));
        assert!(top > 1.0);
        assert_eq!(h.inf_over_marked_set(), top);
        assert!(hamiltonian_vector_field(&h, &point(0.0, &[0.0])).is_ok());
    }

    #[test]
    fn three_chart_requires_seam_agreement() {
        let g = geometry(1.0, 0.0, 1);
        assert!(ProductHamiltonian::three_chart(g, parabola(), -1.0).is_err());
        let profile = ProfileFamilySpec::plateau(-2.0, 1.0, g, 1).build().unwrap();
        assert!(ProductHamiltonian::three_chart(g, profile, -3.0).is_err());
    }

    #[test]
    fn sharpness_marked_infimum() {
        let g = geometry(1.0, 0.0, 1);
        let f = build_sharpness_profile(&g, 1, f64::NEG_INFINITY, 0.1).unwrap();
        let h = ProductHamiltonian::outer_radial(g, f);
        assert!((h.inf_over_marked_set() - 0.9).abs() < 1e-14);
        assert!(h.vanishes_near_boundary(1e-3));
    }

    #[test]
    fn zero_hamiltonian() {
        let h = ProductHamiltonian::zero(geometry(1.0, 0.2, 2));
        assert_eq!(h.inf_over_marked_set(), 0.0);
        assert_eq!(eval_h(&h, &point(0.4, &[1.0, 0.5])), 0.0);
    }

    fn bumpy_grid(n: usize) -> SampledGrid {
        let p0_nodes = 9;
        let torus_nodes: usize = 4;
        let stride = torus_nodes.pow(n as u32);
        let mut values = vec![0.0; p0_nodes * stride];
        for i in 1..p0_nodes - 1 {
            for j in 0..stride {
                values[i * stride + j] = 1.0 + 0.1 * (i as f64) + 0.05 * j as f64;
            }
        }
        SampledGrid {
            p0_nodes,
            torus_nodes,
            values,
            modes: vec![FourierMode {
                k: {
                    let mut k = vec![0; n + 1];
                    k[0] = 1;
                    k[n] = 1;
                    k
                },
                amplitude: 0.2,
                phase: 0.3,
            }],
        }
    }

    #[test]
    fn sampled_grid_field_matches_differences() {
        let g = geometry(1.0, 0.0, 1);
        let h = ProductHamiltonian::sampled(g, bumpy_grid(1)).unwrap();
        assert!(!h.is_q_independent());
        // interior of a grid cell, away from kinks
        let state = [0.1, 0.3, 0.21, 0.37];
        let mut field = vec![0.0; 4];
        h.field(0.0, &state, &mut field).unwrap();
        let fd = finite_difference_field(&h, 0.0, &state, 1e-5);
        for (a, b) in field.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-6, "{field:?} vs {fd:?}");
        }
        assert!(h.inf_over_marked_set() < h.value(0.0, &[0.0, 0.0, 0.0, 0.0]) + 1e-12);
    }

    #[test]
    fn sampled_grid_rejects_nonzero_edges() {
        let mut grid = bumpy_grid(1);
        grid.values[0] = 1.0;
        assert!(ProductHamiltonian::sampled(geometry(1.0, 0.0, 1), grid).is_err());
    }

    #[test]
    fn time_dependent_weights_sum_to_one() {
        let g = geometry(1.0, 0.0, 1);
        let a = ProductHamiltonian::outer_radial(g, parabola());
        let b = ProductHamiltonian::zero(g);
        let h = TimeDependentHamiltonian::new(vec![a, b]).unwrap();
        for i in 0..10 {
            let w = h.weights(i as f64 / 10.0);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(w.iter().all(|x| *x >= 0.0));
        }
        assert!(!h.is_autonomous());
        assert!(h.is_q_independent());
    }

    #[test]
    fn json_round_trip() {
        let h = inner_plateau(-4.0, 0.3, 2);
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.contains("\"form\":\"threeChart\""));
        let back: ProductHamiltonian = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }
}
