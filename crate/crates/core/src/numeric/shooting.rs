use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::hamiltonians::Hamiltonian;
use crate::numeric::integrator::{integrate_states, time_one_jacobian, time_one_map, IntegratorConfig};
use crate::phase_space::{lift_loop, HomotopyClass, LiftedState, LoopSample, PhasePoint};

/// Fixed-point defect accepted as a periodic orbit.
pub const CONVERGED_RESIDUAL: f64 = 1e-9;
/// Relative singular-value threshold for the kernel of `dφ¹ − id`.
pub const KERNEL_THRESHOLD: f64 = 1e-4;
/// Finite-difference step for time-one-map Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    /// The closed loop on convergence.
    pub orbit: Option<LoopSample>,
    /// Final Newton iterate (flat lifted state at `t = 0`).
    pub start: Vec<f64>,
    /// Mean of `p0` along the loop.
    pub level: f64,
    pub action: f64,
    pub residual: f64,
    pub converged: bool,
    pub winding: Vec<i64>,
    pub kernel_dim: Option<usize>,
    pub iterations: usize,
}

impl ShootingResult {
    fn failed(start: Vec<f64>, residual: f64, iterations: usize) -> Self {
        Self {
            orbit: None,
            level: start[0],
            start,
            action: f64::NAN,
            residual,
            converged: false,
            winding: Vec::new(),
            kernel_dim: None,
            iterations,
        }
    }
}

/// `G(x) = φ¹(x) − x − ℓ e_{q0}`.
fn defect(h: &dyn Hamiltonian, x: &[f64], ell: f64, cfg: &IntegratorConfig) -> Result<Vec<f64>> {
    let half = x.len() / 2;
    let mut g = time_one_map(h, x, cfg)?;
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi -= xi;
    }
    g[half] -= ell;
    Ok(g)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimum-norm least-squares solve through the SVD.
fn pseudo_solve(jac: DMatrix<f64>, rhs: &[f64]) -> Option<DVector<f64>> {
    let svd = jac.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax.max(1.0);
    svd.solve(&DVector::from_column_slice(rhs), eps).ok()
}

/// Number of singular values of `dφ¹ − id` below the kernel threshold.
pub fn kernel_dimension(h: &dyn Hamiltonian, state: &[f64], cfg: &IntegratorConfig) -> Result<usize> {
    let mut jac = time_one_jacobian(h, state, cfg, JACOBIAN_STEP)?;
    for i in 0..state.len() {
        jac[(i, i)] -= 1.0;
    }
    let sv = jac.singular_values();
    let cut = KERNEL_THRESHOLD * sv.max().max(1.0);
    Ok(sv.iter().filter(|s| **s < cut).count())
}

/// Damped Newton for a one-periodic orbit in `class` starting near `seed`.
///
/// Never raises on failure to converge: a stalled line search, a failed
/// inner solve or an orbit leaving the annulus all give `converged = false`.
pub fn shoot_periodic_orbit(
    h: &dyn Hamiltonian,
    class: &HomotopyClass,
    seed: &PhasePoint,
    cfg: &IntegratorConfig,
) -> Result<ShootingResult> {
    cfg.validate()?;
    let radius = h.geometry().radius();
    let ell = class.ell as f64;
    let dim = 2 * (seed.torus_dim() + 1);
    let mut x = seed.to_lifted().to_vec();
    let mut g = match defect(h, &x, ell, cfg) {
        Ok(g) => g,
        Err(_) => return Ok(ShootingResult::failed(x, f64::INFINITY, 0)),
    };
    let mut norm = sup(&g);
    let mut iterations = 0;
    while norm > CONVERGED_RESIDUAL {
        if iterations >= cfg.newton_max_iter {
            return Ok(ShootingResult::failed(x, norm, iterations));
        }
        iterations += 1;
        let mut jac = match time_one_jacobian(h, &x, cfg, JACOBIAN_STEP) {
            Ok(j) => j,
            Err(_) => return Ok(ShootingResult::failed(x, norm, iterations)),
        };
        for i in 0..dim {
            jac[(i, i)] -= 1.0;
        }
        let Some(delta) = pseudo_solve(jac, &g) else {
            return Ok(ShootingResult::failed(x, norm, iterations));
        };
        if sup(delta.as_slice()) == 0.0 {
            return Ok(ShootingResult::failed(x, norm, iterations));
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha >= 1.0 / 1024.0 {
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a - alpha * d).collect();
            if let Ok(gt) = defect(h, &trial, ell, cfg) {
                let nt = sup(&gt);
                if nt < (1.0 - 1e-4 * alpha) * norm {
                    x = trial;
                    g = gt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Ok(ShootingResult::failed(x, norm, iterations));
        }
    }
    if x[0].abs() >= radius {
        return Ok(ShootingResult::failed(x, norm, iterations));
    }
    let states = match integrate_states(h, &x, cfg) {
        Ok(s) => s,
        Err(_) => return Ok(ShootingResult::failed(x, norm, iterations)),
    };
    let lifted: Vec<LiftedState> = states.iter().map(|s| LiftedState::from_slice(s)).collect();
    let times: Vec<f64> = (0..lifted.len()).map(|k| k as f64 / cfg.step_count as f64).collect();
    let Ok(orbit) = LoopSample::from_lifted(times, &lifted, class) else {
        return Ok(ShootingResult::failed(x, norm, iterations));
    };
    let level = lifted[..lifted.len() - 1].iter().map(|s| s.p[0]).sum::<f64>() / (lifted.len() - 1) as f64;
    let action = lifted_action(h, orbit.times(), &lifted);
    let kernel_dim = kernel_dimension(h, &x, cfg).ok();
    Ok(ShootingResult {
        winding: orbit.winding(),
        orbit: Some(orbit),
        start: x,
        level,
        action,
        residual: norm,
        converged: true,
        kernel_dim,
        iterations,
    })
}

/// `∫ H dt − ∫ p·q̇ dt` by the trapezoidal rule on lifted samples.
fn lifted_action(h: &dyn Hamiltonian, times: &[f64], states: &[LiftedState]) -> f64 {
    let mut h_int = 0.0;
    let mut area = 0.0;
    for k in 0..states.len() - 1 {
        let (a, b) = (&states[k], &states[k + 1]);
        let dt = times[k + 1] - times[k];
        h_int += 0.5 * dt * (h.value(times[k], &a.to_vec()) + h.value(times[k + 1], &b.to_vec()));
        for i in 0..a.p.len() {
            area += 0.5 * (a.p[i] + b.p[i]) * (b.q[i] - a.q[i]);
        }
    }
    h_int - area
}

/// Action of a lifted loop against the reference loop `(p = 0, q0 = ℓt)`.
pub fn loop_action(h: &dyn Hamiltonian, lp: &LoopSample) -> f64 {
    lifted_action(h, lp.times(), &lp.lifted_states())
}

/// Lifts raw samples `t = k/K` in `class`, then takes the action.
pub fn loop_action_raw(h: &dyn Hamiltonian, raw: &[PhasePoint], class: &HomotopyClass) -> Result<f64> {
    Ok(loop_action(h, &lift_loop(raw, class)?))
}
