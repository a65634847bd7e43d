use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::Hamiltonian;
use crate::phase_space::{LiftedState, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegratorConfig {
    /// Steps per unit time.
    pub step_count: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_count: 512,
            newton_tol: 1e-12,
            newton_max_iter: 50,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_count < 16 {
            return Err(Error::InvalidGeometry(format!(
                "step count {} is below the minimum of 16",
                self.step_count
            )));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return Err(Error::InvalidGeometry("newton tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Implicit midpoint takes the `q`-independent autonomous case to a linear
/// drift in `q`, so one field evaluation covers the whole unit time.
fn is_linear_drift(h: &dyn Hamiltonian) -> bool {
    h.is_q_independent() && h.is_autonomous()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// One implicit-midpoint step `x ← x + dt X(t + dt/2, (x + x')/2)`.
///
/// Fixed-point iteration first; if it stalls, Newton on the step equation
/// with a finite-difference Jacobian of the field.
fn midpoint_step(h: &dyn Hamiltonian, t: f64, dt: f64, x: &mut [f64], cfg: &IntegratorConfig) -> Result<()> {
    let dim = x.len();
    let tm = t + 0.5 * dt;
    let mut f = vec![0.0; dim];
    let mut mid = x.to_vec();
    h.field(tm, &mid, &mut f)?;
    let mut y: Vec<f64> = x.iter().zip(&f).map(|(a, b)| a + dt * b).collect();
    let scale = 1.0 + sup_norm(x);
    let mut last_change = f64::INFINITY;
    for _ in 0..cfg.newton_max_iter {
        for i in 0..dim {
            mid[i] = 0.5 * (x[i] + y[i]);
        }
        h.field(tm, &mid, &mut f)?;
        let mut change: f64 = 0.0;
        for i in 0..dim {
            let next = x[i] + dt * f[i];
            change = change.max((next - y[i]).abs());
            y[i] = next;
        }
        if change <= cfg.newton_tol * scale {
            x.copy_from_slice(&y);
            return Ok(());
        }
        if change > 0.5 * last_change {
            break;
        }
        last_change = change;
    }
    newton_step(h, tm, dt, x, &mut y, cfg)?;
    x.copy_from_slice(&y);
    Ok(())
}

fn newton_step(h: &dyn Hamiltonian, tm: f64, dt: f64, x: &[f64], y: &mut [f64], cfg: &IntegratorConfig) -> Result<()> {
    let dim = x.len();
    let eps = 1e-7;
    let mut f = vec![0.0; dim];
    let mut fp = vec![0.0; dim];
    let mut fm = vec![0.0; dim];
    let mut mid = vec![0.0; dim];
    let scale = 1.0 + sup_norm(x);
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.newton_max_iter {
        for i in 0..dim {
            mid[i] = 0.5 * (x[i] + y[i]);
        }
        h.field(tm, &mid, &mut f)?;
        let g: Vec<f64> = (0..dim).map(|i| y[i] - x[i] - dt * f[i]).collect();
        residual = sup_norm(&g);
        if residual <= cfg.newton_tol * scale {
            return Ok(());
        }
        let mut jac = DMatrix::<f64>::identity(dim, dim);
        for j in 0..dim {
            let orig = mid[j];
            mid[j] = orig + eps;
            h.field(tm, &mid, &mut fp)?;
            mid[j] = orig - eps;
            h.field(tm, &mid, &mut fm)?;
            mid[j] = orig;
            for i in 0..dim {
                // d(mid)/dy = 1/2
                jac[(i, j)] -= dt * 0.5 * (fp[i] - fm[i]) / (2.0 * eps);
            }
        }
        let rhs = DVector::from_column_slice(&g);
        let delta = jac.lu().solve(&rhs).ok_or(Error::NewtonDivergence {
            step: (tm / dt) as usize,
            residual,
        })?;
        for i in 0..dim {
            y[i] -= delta[i];
        }
    }
    Err(Error::NewtonDivergence { step: (tm / dt) as usize, residual })
}

/// The time-one map on flat lifted states, starting at time 0.
pub fn time_one_map(h: &dyn Hamiltonian, state: &[f64], cfg: &IntegratorConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut x = state.to_vec();
    if is_linear_drift(h) {
        let half = x.len() / 2;
        let mut f = vec![0.0; x.len()];
        h.field(0.0, &x, &mut f)?;
        for i in half..x.len() {
            x[i] += f[i];
        }
        return Ok(x);
    }
    let dt = 1.0 / cfg.step_count as f64;
    for k in 0..cfg.step_count {
        midpoint_step(h, k as f64 * dt, dt, &mut x, cfg)?;
    }
    Ok(x)
}

/// Flat lifted states at `t = k / stepCount`, `k = 0..=stepCount`.
pub fn integrate_states(h: &dyn Hamiltonian, state: &[f64], cfg: &IntegratorConfig) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let steps = cfg.step_count;
    let dt = 1.0 / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.to_vec());
    if is_linear_drift(h) {
        let half = state.len() / 2;
        let mut f = vec![0.0; state.len()];
        h.field(0.0, state, &mut f)?;
        for k in 1..=steps {
            let t = k as f64 * dt;
            let mut x = state.to_vec();
            for i in half..x.len() {
                x[i] += t * f[i];
            }
            out.push(x);
        }
        return Ok(out);
    }
    let mut x = state.to_vec();
    for k in 0..steps {
        midpoint_step(h, k as f64 * dt, dt, &mut x, cfg)?;
        out.push(x.clone());
    }
    Ok(out)
}

/// The lifted trajectory from `x0` over `[0, 1]`.
pub fn integrate_flow(h: &dyn Hamiltonian, x0: &PhasePoint, cfg: &IntegratorConfig) -> Result<Vec<LiftedState>> {
    let start = x0.to_lifted().to_vec();
    Ok(integrate_states(h, &start, cfg)?
        .iter()
        .map(|s| LiftedState::from_slice(s))
        .collect())
}

/// Central-difference Jacobian of the time-one map.
pub fn time_one_jacobian(h: &dyn Hamiltonian, state: &[f64], cfg: &IntegratorConfig, step: f64) -> Result<DMatrix<f64>> {
    let dim = state.len();
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    let mut x = state.to_vec();
    for j in 0..dim {
        let orig = x[j];
        x[j] = orig + step;
        let up = time_one_map(h, &x, cfg)?;
        x[j] = orig - step;
        let down = time_one_map(h, &x, cfg)?;
        x[j] = orig;
        for i in 0..dim {
            jac[(i, j)] = (up[i] - down[i]) / (2.0 * step);
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{ProductHamiltonian, SampledGrid, FourierMode};
    use crate::phase_space::PhaseSpaceConfig;
    use crate::profiles::{ProfileDomain, RadialProfile};

    fn parabola_h() -> ProductHamiltonian {
        let f = RadialProfile::from_jets(
            ProfileDomain::Normalized,
            vec![0.0, 1.0],
            vec![(1.0, 0.0, -2.0), (0.0, -2.0, -2.0)],
            true,
        )
        .unwrap();
        ProductHamiltonian::outer_radial(PhaseSpaceConfig::new(1.0, 0.0, 1).unwrap(), f)
    }

    fn wavy_grid() -> ProductHamiltonian {
        let g = PhaseSpaceConfig::new(1.0, 0.0, 1).unwrap();
        let p0_nodes = 9;
        let torus_nodes = 4;
        let mut values = vec![0.0; p0_nodes * torus_nodes];
        for i in 1..p0_nodes - 1 {
            for j in 0..torus_nodes {
                values[i * torus_nodes + j] = 0.2 * (1.0 + 0.1 * j as f64);
            }
        }
        let grid = SampledGrid {
            p0_nodes,
            torus_nodes,
            values,
            modes: vec![FourierMode {
                k: vec![1, 0],
                amplitude: 0.3,
                phase: 0.1,
            }],
        };
        ProductHamiltonian::sampled(g, grid).unwrap()
    }

    #[test]
    fn rejects_too_few_steps() {
        let cfg = IntegratorConfig {
            step_count: 8,
            ..Default::default()
        };
        assert!(time_one_map(&parabola_h(), &[0.0; 4], &cfg).is_err());
    }

    #[test]
    fn zero_hamiltonian_is_constant() {
        let h = ProductHamiltonian::zero(PhaseSpaceConfig::new(1.0, 0.0, 2).unwrap());
        let x0 = PhasePoint::new(0.3, 0.2, vec![0.4, 1.5], vec![0.1, 0.9]);
        let traj = integrate_flow(&h, &x0, &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.len(), 513);
        assert!(traj.iter().all(|s| *s == x0.to_lifted()));
    }

    #[test]
    fn parabola_flow_advances_q0_by_one() {
        let x0 = PhasePoint::new(-0.5, 0.0, vec![0.0], vec![0.0]);
        let traj = integrate_flow(&parabola_h(), &x0, &IntegratorConfig::default()).unwrap();
        for s in &traj {
            assert_eq!(s.p[0], -0.5);
        }
        assert!((traj[512].q[0] - 1.0).abs() < 1e-14);
        assert!((traj[256].q[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn q_dependent_flow_moves_momentum() {
        // the q-dependent path reduces to the same flow when modes vanish
        let h = wavy_grid();
        let x0 = vec![0.1, 0.3, 0.2, 0.7];
        let end = time_one_map(&h, &x0, &IntegratorConfig::default()).unwrap();
        assert!(end.iter().all(|v| v.is_finite()));
        assert_ne!(end[0], x0[0]);
    }

    #[test]
    fn q_dependent_flow_is_symplectic() {
        let h = wavy_grid();
        let cfg = IntegratorConfig {
            step_count: 64,
            ..Default::default()
        };
        let jac = time_one_jacobian(&h, &[0.1, 0.3, 0.2, 0.7], &cfg, 1e-6).unwrap();
        assert!((jac.determinant() - 1.0).abs() < 1e-5, "{}", jac.determinant());
    }

    #[test]
    fn reversible_under_time_step_refinement() {
        let h = wavy_grid();
        let coarse = IntegratorConfig {
            step_count: 128,
            ..Default::default()
        };
        let fine = IntegratorConfig {
            step_count: 512,
            ..Default::default()
        };
        let a = time_one_map(&h, &[0.1, 0.3, 0.2, 0.7], &coarse).unwrap();
        let b = time_one_map(&h, &[0.1, 0.3, 0.2, 0.7], &fine).unwrap();
        let err: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
    }
}
