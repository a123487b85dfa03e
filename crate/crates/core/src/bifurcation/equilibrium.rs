//! Newton's method with finite-difference Jacobians.

use crate::error::{Error, Result};
use crate::ode::sup_norm;

use super::linalg::{solve, Matrix};

pub const NEWTON_TOL: f64 = 1e-11;
pub const NEWTON_MAX_ITER: usize = 50;
pub const FD_EPS: f64 = 1e-6;

/// Central-difference Jacobian; column `j` uses step `fd_eps · max(1, |x_j|)`.
pub fn jacobian_fd<F>(rhs: &F, state: &[f64], fd_eps: f64) -> Matrix
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    assert!(fd_eps > 0.0, "fd_eps must be positive");
    let n = state.len();
    let mut jac = Matrix::zeros(n, n);
    let mut x = state.to_vec();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for j in 0..n {
        let h = fd_eps * state[j].abs().max(1.0);
        x[j] = state[j] + h;
        rhs(&x, &mut plus);
        x[j] = state[j] - h;
        rhs(&x, &mut minus);
        x[j] = state[j];
        for i in 0..n {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    jac
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub fd_eps: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: NEWTON_TOL,
            max_iter: NEWTON_MAX_ITER,
            fd_eps: FD_EPS,
        }
    }
}

/// Newton iteration for `rhs(x) = 0` with default options and tolerance `newton_tol`.
pub fn find_equilibrium<F>(rhs: &F, guess: &[f64], newton_tol: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    find_equilibrium_with(
        rhs,
        guess,
        &NewtonOptions {
            tol: newton_tol,
            ..NewtonOptions::default()
        },
    )
    .map(|(x, _)| x)
}

/// Newton iteration with a backtracking safeguard; returns the root and the
/// number of iterations used.
pub fn find_equilibrium_with<F>(
    rhs: &F,
    guess: &[f64],
    opts: &NewtonOptions,
) -> Result<(Vec<f64>, usize)>
where
    F: Fn(&[f64], &mut [f64]) + ?Sized,
{
    let n = guess.len();
    let mut x = guess.to_vec();
    let mut f = vec![0.0; n];
    rhs(&x, &mut f);
    let mut res = sup_norm(&f);
    let mut trial = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    for iter in 0..opts.max_iter {
        if res < opts.tol {
            return Ok((x, iter));
        }
        if !res.is_finite() {
            break;
        }
        let jac = jacobian_fd(rhs, &x, opts.fd_eps);
        let neg_f: Vec<f64> = f.iter().map(|v| -v).collect();
        let dx = match solve(&jac, &neg_f) {
            Ok(dx) => dx,
            Err(_) => break,
        };
        let mut alpha = 1.0;
        loop {
            for i in 0..n {
                trial[i] = x[i] + alpha * dx[i];
            }
            rhs(&trial, &mut f_trial);
            let r = sup_norm(&f_trial);
            if r.is_finite() && (r < res || alpha < 1.0 / 64.0) {
                x.copy_from_slice(&trial);
                f.copy_from_slice(&f_trial);
                res = r;
                break;
            }
            alpha *= 0.5;
        }
    }
    if res < opts.tol {
        return Ok((x, opts.max_iter));
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_field_jacobian() {
        let a = [[1.0, -2.0], [0.5, 3.0]];
        let rhs = |x: &[f64], o: &mut [f64]| {
            o[0] = a[0][0] * x[0] + a[0][1] * x[1];
            o[1] = a[1][0] * x[0] + a[1][1] * x[1];
        };
        let j = jacobian_fd(&rhs, &[0.3, -7.0], 1e-6);
        for r in 0..2 {
            for c in 0..2 {
                assert!((j[(r, c)] - a[r][c]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_field_has_zero_jacobian() {
        let rhs = |_: &[f64], o: &mut [f64]| o.iter_mut().for_each(|v| *v = 4.2);
        let j = jacobian_fd(&rhs, &[1.0, 2.0, 3.0], 1e-6);
        assert_eq!(j.max_abs(), 0.0);
    }

    #[test]
    fn exact_root_returned_unchanged() {
        let rhs = |x: &[f64], o: &mut [f64]| o[0] = x[0] * x[0] - 4.0;
        let (x, it) = find_equilibrium_with(&rhs, &[2.0], &NewtonOptions::default()).unwrap();
        assert_eq!(x, vec![2.0]);
        assert_eq!(it, 0);
    }

    #[test]
    fn newton_finds_root() {
        let rhs = |x: &[f64], o: &mut [f64]| {
            o[0] = x[0] * x[0] + x[1] * x[1] - 1.0;
            o[1] = x[0] - x[1];
        };
        let x = find_equilibrium(&rhs, &[1.0, 0.2], 1e-12).unwrap();
        let s = 0.5f64.sqrt();
        assert!((x[0] - s).abs() < 1e-10 && (x[1] - s).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_carries_residual() {
        let rhs = |x: &[f64], o: &mut [f64]| o[0] = x[0] * x[0] + 1.0;
        match find_equilibrium(&rhs, &[0.5], 1e-11) {
            Err(Error::NoConvergence { residual, .. }) => assert!(residual >= 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
