//! Pseudo-arclength continuation of equilibrium branches.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::sup_norm;

use super::equilibrium::{find_equilibrium_with, NewtonOptions};
use super::family::ParamFamily;
use super::linalg::{eigenvalues, solve, Matrix};
use super::ContinuationSettings;

/// One accepted equilibrium on a branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub param: f64,
    pub state: Vec<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub stable: bool,
    pub f_nr: f64,
    /// Unit tangent `(dx/ds, dp/ds)`.
    pub tangent: Vec<f64>,
    /// Pseudo-arclength from the first point.
    pub arclength: f64,
}

impl BranchPoint {
    /// Parameter component of the tangent.
    pub fn param_direction(&self) -> f64 {
        *self.tangent.last().unwrap()
    }

    fn extended(&self) -> Vec<f64> {
        let mut u = self.state.clone();
        u.push(self.param);
        u
    }
}

/// Why a branch stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    RangeEnd,
    LeftDomain,
    StepUnderflow,
    MaxPoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumBranch {
    pub parameter: String,
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
}

impl EquilibriumBranch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `F(x, p)` on an extended vector `u = (x, p)`.
fn eval_extended<P: ParamFamily + ?Sized>(family: &P, u: &[f64], out: &mut [f64]) {
    let n = u.len() - 1;
    family.eval(&u[..n], u[n], out);
}

/// `n × (n + 1)` central-difference Jacobian of `F` in `(x, p)`.
fn extended_jacobian<P: ParamFamily + ?Sized>(family: &P, u: &[f64], fd_eps: f64) -> Matrix {
    let n = u.len() - 1;
    let mut jac = Matrix::zeros(n, n + 1);
    let mut v = u.to_vec();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for j in 0..=n {
        let h = fd_eps * u[j].abs().max(1.0);
        v[j] = u[j] + h;
        eval_extended(family, &v, &mut plus);
        v[j] = u[j] - h;
        eval_extended(family, &v, &mut minus);
        v[j] = u[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    jac
}

/// Square bordered matrix `[J; c^T]`.
fn bordered(jac: &Matrix, border: &[f64]) -> Matrix {
    let n = jac.rows();
    let mut m = Matrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..=n {
            m[(i, j)] = jac[(i, j)];
        }
    }
    for (j, &c) in border.iter().enumerate() {
        m[(n, j)] = c;
    }
    m
}

fn state_jacobian(jac: &Matrix) -> Matrix {
    let n = jac.rows();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = jac[(i, j)];
        }
    }
    m
}

/// Unit tangent at `u` oriented so that it has positive overlap with `reference`.
fn tangent_at<P: ParamFamily + ?Sized>(
    family: &P,
    u: &[f64],
    reference: &[f64],
    fd_eps: f64,
) -> Result<(Vec<f64>, Matrix)> {
    let n = u.len() - 1;
    let jac = extended_jacobian(family, u, fd_eps);
    let mut rhs = vec![0.0; n + 1];
    rhs[n] = 1.0;
    let t = solve(&bordered(&jac, reference), &rhs)?;
    let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((t.iter().map(|v| v / norm).collect(), jac))
}

/// Newton corrector for `F(u) = 0`, `t·(u − anchor) = ds`, started from
/// `anchor + ds·t`.
fn correct<P: ParamFamily + ?Sized>(
    family: &P,
    anchor: &[f64],
    t: &[f64],
    ds: f64,
    settings: &ContinuationSettings,
) -> Result<(Vec<f64>, usize)> {
    let n = anchor.len() - 1;
    let mut u: Vec<f64> = anchor.iter().zip(t).map(|(a, ti)| a + ds * ti).collect();
    let mut f = vec![0.0; n];
    for iter in 0..=settings.corrector_max_iter {
        eval_extended(family, &u, &mut f);
        let res = sup_norm(&f);
        if !res.is_finite() {
            break;
        }
        let constraint: f64 = u
            .iter()
            .zip(anchor)
            .zip(t)
            .map(|((ui, ai), ti)| (ui - ai) * ti)
            .sum::<f64>()
            - ds;
        if res < settings.newton_tol && constraint.abs() < 1e-12 * (1.0 + ds.abs()) {
            return Ok((u, iter));
        }
        if iter == settings.corrector_max_iter {
            break;
        }
        let jac = extended_jacobian(family, &u, settings.fd_eps);
        let mut rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        rhs.push(-constraint);
        let du = solve(&bordered(&jac, t), &rhs)?;
        for (ui, di) in u.iter_mut().zip(&du) {
            *ui += di;
        }
    }
    Err(Error::NoConvergence {
        iterations: settings.corrector_max_iter,
        residual: sup_norm(&f),
    })
}

fn make_point<P: ParamFamily + ?Sized>(
    family: &P,
    u: &[f64],
    tangent: Vec<f64>,
    jac: &Matrix,
    arclength: f64,
) -> BranchPoint {
    let n = u.len() - 1;
    let eigenvalues = eigenvalues(&state_jacobian(jac));
    let stable = eigenvalues.iter().all(|e| e.re < 0.0);
    BranchPoint {
        param: u[n],
        state: u[..n].to_vec(),
        f_nr: family.firing_rate(&u[..n]),
        eigenvalues,
        stable,
        tangent,
        arclength,
    }
}

/// Equilibrium on the branch through `from` at pseudo-arclength `ds` along
/// its tangent. Used for bisection between accepted points.
pub(crate) fn locate_along<P: ParamFamily + ?Sized>(
    family: &P,
    from: &BranchPoint,
    ds: f64,
    settings: &ContinuationSettings,
) -> Result<BranchPoint> {
    let anchor = from.extended();
    let (u, _) = correct(family, &anchor, &from.tangent, ds, settings)?;
    let (t, jac) = tangent_at(family, &u, &from.tangent, settings.fd_eps)?;
    Ok(make_point(family, &u, t, &jac, from.arclength + ds))
}

/// Polishes `guess` into an equilibrium at parameter `p`.
pub fn equilibrium_at<P: ParamFamily + ?Sized>(
    family: &P,
    p: f64,
    guess: &[f64],
    settings: &ContinuationSettings,
) -> Result<Vec<f64>> {
    let rhs = |x: &[f64], o: &mut [f64]| family.eval(x, p, o);
    let opts = NewtonOptions {
        tol: settings.newton_tol,
        max_iter: crate::bifurcation::equilibrium::NEWTON_MAX_ITER,
        fd_eps: settings.fd_eps,
    };
    find_equilibrium_with(&rhs, guess, &opts).map(|(x, _)| x)
}

/// Traces the branch through `seed` (an equilibrium at `range.0`) towards
/// `range.1`, crossing folds, until the parameter leaves the range, the state
/// leaves the domain, or the step underflows. Never fails after seeding;
/// the reason for stopping is recorded in [`EquilibriumBranch::termination`].
pub fn trace_branch<P: ParamFamily + ?Sized>(
    family: &P,
    range: (f64, f64),
    seed: &[f64],
    settings: &ContinuationSettings,
) -> Result<EquilibriumBranch> {
    settings.validate()?;
    let (start, end) = range;
    if !(start.is_finite() && end.is_finite()) || start == end {
        return Err(Error::InvalidParameter(format!(
            "parameter range must be non-empty and finite, got {start}:{end}"
        )));
    }
    if seed.len() != family.dim() {
        return Err(Error::InvalidParameter(format!(
            "seed has dimension {}, system has {}",
            seed.len(),
            family.dim()
        )));
    }
    let (lo, hi) = (start.min(end), start.max(end));
    let slack = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    let dir = (end - start).signum();
    let n = family.dim();

    let x0 = equilibrium_at(family, start, seed, settings)
        .map_err(|e| Error::Continuation(format!("seed is not an equilibrium at {start}: {e}")))?;
    let mut u = x0;
    u.push(start);
    let mut reference = vec![0.0; n + 1];
    reference[n] = dir;
    let (mut t, jac) = tangent_at(family, &u, &reference, settings.fd_eps)
        .map_err(|e| Error::Continuation(format!("no tangent at the seed: {e}")))?;
    let mut points = vec![make_point(family, &u, t.clone(), &jac, 0.0)];
    let mut ds = settings.step;
    let mut arclength = 0.0;

    let termination = loop {
        if points.len() >= settings.max_points {
            break Termination::MaxPoints;
        }
        let attempt = correct(family, &u, &t, ds, settings).and_then(|(u_new, iters)| {
            let (t_new, jac) = tangent_at(family, &u_new, &t, settings.fd_eps)?;
            Ok((u_new, iters, t_new, jac))
        });
        let (u_new, iters, t_new, jac) = match attempt {
            Ok(v) => v,
            Err(_) => {
                ds *= 0.5;
                if ds < settings.min_step {
                    break Termination::StepUnderflow;
                }
                continue;
            }
        };
        let cos_angle: f64 = t.iter().zip(&t_new).map(|(a, b)| a * b).sum();
        let angle = cos_angle.clamp(-1.0, 1.0).acos();
        if angle > settings.max_angle && ds > settings.min_step {
            ds = (ds * 0.5).max(settings.min_step);
            continue;
        }
        let p_new = u_new[n];
        if p_new < lo - slack || p_new > hi + slack {
            break Termination::RangeEnd;
        }
        if !family.in_domain(&u_new[..n]) {
            break Termination::LeftDomain;
        }
        arclength += ds;
        points.push(make_point(family, &u_new, t_new.clone(), &jac, arclength));
        u = u_new;
        t = t_new;
        if iters <= 3 && angle < 0.5 * settings.max_angle {
            ds = (ds * 1.5).min(settings.max_step);
        }
    };
    Ok(EquilibriumBranch {
        parameter: family.parameter_name().to_string(),
        points,
        termination,
    })
}

/// [`trace_branch`] that reports a step-size underflow as an error carrying
/// the last good point.
pub fn continue_branch<P: ParamFamily + ?Sized>(
    family: &P,
    range: (f64, f64),
    seed: &[f64],
    settings: &ContinuationSettings,
) -> Result<EquilibriumBranch> {
    let branch = trace_branch(family, range, seed, settings)?;
    if branch.termination == Termination::StepUnderflow {
        let last = branch.points.last().unwrap();
        return Err(Error::Continuation(format!(
            "step size fell below {:e}; last good point {} = {:.6}, state {:?}",
            settings.min_step, branch.parameter, last.param, last.state
        )));
    }
    Ok(branch)
}
