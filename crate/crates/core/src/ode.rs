//! Fixed-step classical Runge–Kutta integration over real state vectors.

use crate::error::{Error, Result};

/// Defaults used by [`settle`] callers that have no better information.
pub const SETTLE_TOL: f64 = 1e-9;
pub const SETTLE_T_MAX: f64 = 2000.0;

/// Recorded samples of an integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dimension: usize,
}

impl Trajectory {
    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(|s| s.as_slice())
    }
}

/// Scratch buffers for repeated RK4 steps of a fixed dimension.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances `state` in place by one step of size `dt`.
    #[allow(clippy::needless_range_loop)]
    pub fn step<F>(&mut self, rhs: &F, state: &mut [f64], dt: f64) -> Result<()>
    where
        F: Fn(&[f64], &mut [f64]) + ?Sized,
    {
        let n = state.len();
        rhs(state, &mut self.k1);
        check_stage(&self.k1, 1)?;
        for i in 0..n {
            self.tmp[i] = state[i] + 0.5 * dt * self.k1[i];
        }
        rhs(&self.tmp, &mut self.k2);
        check_stage(&self.k2, 2)?;
        for i in 0..n {
            self.tmp[i] = state[i] + 0.5 * dt * self.k2[i];
        }
        rhs(&self.tmp, &mut self.k3);
        check_stage(&self.k3, 3)?;
        for i in 0..n {
            self.tmp[i] = state[i] + dt * self.k3[i];
        }
        rhs(&self.tmp, &mut self.k4);
        check_stage(&self.k4, 4)?;
        for i in 0..n {
            state[i] += dt / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        Ok(())
    }
}

fn check_stage(k: &[f64], stage: usize) -> Result<()> {
    if let Some(i) = k.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "RK4 stage {stage} produced {} in component {i}",
            k[i]
        )));
    }
    Ok(())
}

/// One classical RK4 step from `state`.
pub fn rk4_step<F>(rhs: &F, state: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    let mut out = state.to_vec();
    Rk4::new(state.len()).step(rhs, &mut out, dt)?;
    Ok(out)
}

/// Integrates to `t_end` with `round(t_end / dt)` steps, recording every
/// `record_stride` steps (the initial state is always recorded).
pub fn integrate<F>(
    rhs: &F,
    state0: &[f64],
    t_end: f64,
    dt: f64,
    record_stride: usize,
) -> Result<Trajectory>
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need t_end > 0 and dt > 0, got t_end={t_end}, dt={dt}"
        )));
    }
    if record_stride == 0 {
        return Err(Error::InvalidParameter("record_stride must be >= 1".into()));
    }
    let steps = ((t_end / dt).round() as usize).max(1);
    let mut rk = Rk4::new(state0.len());
    let mut state = state0.to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![state.clone()],
        dimension: state0.len(),
    };
    for k in 1..=steps {
        rk.step(rhs, &mut state, dt)?;
        if k % record_stride == 0 {
            traj.times.push(k as f64 * dt);
            traj.states.push(state.clone());
        }
    }
    Ok(traj)
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Relaxes toward an equilibrium until `‖rhs‖∞ < tol` or `t_max` elapses.
/// The flag reports whether the residual criterion was met.
pub fn settle<F>(rhs: &F, state0: &[f64], dt: f64, tol: f64, t_max: f64) -> (Vec<f64>, bool)
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    let mut state = state0.to_vec();
    let mut deriv = vec![0.0; state.len()];
    let mut rk = Rk4::new(state.len());
    let steps = (t_max / dt).ceil() as usize;
    for _ in 0..=steps {
        rhs(&state, &mut deriv);
        if sup_norm(&deriv) < tol {
            return (state, true);
        }
        if rk.step(rhs, &mut state, dt).is_err() {
            break;
        }
    }
    (state, false)
}
