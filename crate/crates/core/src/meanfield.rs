//! Reduced (Ott–Antonsen) vector fields for sharpness `n = 2`.
//!
//! * infinite reset rate: 2-D field for the non-reset mean field, driven by a
//!   constant `(8/3) γ K` from the pinned subsystem;
//! * polar form of the same field in `(r, ψ)`;
//! * finite reset rate: 4-D two-population field with the averaged reset term
//!   `−λ (1 + z_r)` acting on the reset block.
//!
//! Cartesian forms are the canonical ones; the polar form exists for
//! cross-checks and polar-coordinate fold tables.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{h2_xy, ComplexMeanField, ModelParams, ResetRate, DISK_TOLERANCE};

/// Threshold on `|1 + z|` below which the firing rate is treated as singular.
pub const FIRING_RATE_SINGULARITY: f64 = 1e-12;

/// Pulse value of a neuron pinned at `θ = π` for `n = 2`.
const PINNED_H2: f64 = 8.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState2 {
    pub x_nr: f64,
    pub y_nr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState4 {
    pub x_r: f64,
    pub y_r: f64,
    pub x_nr: f64,
    pub y_nr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarState {
    pub r_nr: f64,
    pub psi_nr: f64,
}

impl MeanFieldState2 {
    pub fn to_array(self) -> [f64; 2] {
        [self.x_nr, self.y_nr]
    }
    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            x_nr: s[0],
            y_nr: s[1],
        }
    }
    pub fn field(&self) -> ComplexMeanField {
        Complex64::new(self.x_nr, self.y_nr)
    }
}

impl MeanFieldState4 {
    pub fn to_array(self) -> [f64; 4] {
        [self.x_r, self.y_r, self.x_nr, self.y_nr]
    }
    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            x_r: s[0],
            y_r: s[1],
            x_nr: s[2],
            y_nr: s[3],
        }
    }
}

impl PolarState {
    pub fn to_array(self) -> [f64; 2] {
        [self.r_nr, self.psi_nr]
    }
    pub fn from_slice(s: &[f64]) -> Self {
        Self {
            r_nr: s[0],
            psi_nr: s[1],
        }
    }
    pub fn from_field(z: ComplexMeanField) -> Self {
        Self {
            r_nr: z.norm(),
            psi_nr: z.arg().rem_euclid(2.0 * PI),
        }
    }
    pub fn field(&self) -> ComplexMeanField {
        Complex64::from_polar(self.r_nr, self.psi_nr)
    }
}

/// OA block `ż = −i (z−1)²/2 + (−Δ + i B)(z+1)²/2` in Cartesian components.
#[inline]
fn oa_block(x: f64, y: f64, delta: f64, drive: f64) -> (f64, f64) {
    let xp = x + 1.0;
    let xm = x - 1.0;
    let u = xp * xp - y * y;
    let dx = xm * y - 0.5 * u * delta - xp * y * drive;
    let dy = -0.5 * (xm * xm - y * y) - xp * y * delta + 0.5 * u * drive;
    (dx, dy)
}

#[inline]
fn infinite_drive(p: &ModelParams, x: f64, y: f64) -> f64 {
    p.eta0 + p.coupling_k * (PINNED_H2 * p.gamma + (1.0 - p.gamma) * h2_xy(x, y))
}

fn infinite_field(p: &ModelParams, s: &[f64], out: &mut [f64]) {
    let (x, y) = (s[0], s[1]);
    let (dx, dy) = oa_block(x, y, p.delta, infinite_drive(p, x, y));
    out[0] = dx;
    out[1] = dy;
}

fn finite_field(p: &ModelParams, lambda: f64, s: &[f64], out: &mut [f64]) {
    let (xr, yr, xn, yn) = (s[0], s[1], s[2], s[3]);
    let drive = p.eta0 + p.coupling_k * (p.gamma * h2_xy(xr, yr) + (1.0 - p.gamma) * h2_xy(xn, yn));
    let (dxr, dyr) = oa_block(xr, yr, p.delta, drive);
    let (dxn, dyn_) = oa_block(xn, yn, p.delta, drive);
    out[0] = dxr - lambda * (1.0 + xr);
    out[1] = dyr - lambda * yr;
    out[2] = dxn;
    out[3] = dyn_;
}

fn polar_field(p: &ModelParams, s: &[f64], out: &mut [f64]) {
    let (r, psi) = (s[0], s[1]);
    let (sin, cos) = psi.sin_cos();
    let r2 = r * r;
    let b = p.eta0
        + p.coupling_k
            * (PINNED_H2 * p.gamma
                + (2.0 * (1.0 - p.gamma) / 3.0)
                    * (1.5 - 2.0 * r * cos + 0.5 * r2 * (2.0 * psi).cos()));
    let delta = p.delta;
    out[0] = 0.5 * (1.0 - b) * (r2 - 1.0) * sin - 0.5 * delta * (r2 + 1.0) * cos - r * delta;
    let r_psi_dot =
        0.5 * (b - 1.0) * (r2 + 1.0) * cos + 0.5 * delta * (1.0 - r2) * sin + r * (1.0 + b);
    out[1] = r_psi_dot / r;
}

/// Infinite-rate field for the non-reset mean field.
pub fn rhs_infinite(state: &MeanFieldState2, params: &ModelParams) -> MeanFieldState2 {
    let mut out = [0.0; 2];
    infinite_field(params, &state.to_array(), &mut out);
    MeanFieldState2::from_slice(&out)
}

/// Polar form `(ṙ, ψ̇)` of [`rhs_infinite`].
pub fn rhs_polar(state: &PolarState, params: &ModelParams) -> Result<PolarState> {
    if !(state.r_nr > 0.0) {
        return Err(Error::Singular(format!(
            "polar field undefined at r = {}",
            state.r_nr
        )));
    }
    let mut out = [0.0; 2];
    polar_field(params, &state.to_array(), &mut out);
    Ok(PolarState::from_slice(&out))
}

/// Finite-rate two-population field (reset block first).
pub fn rhs_finite(state: &MeanFieldState4, params: &ModelParams) -> Result<MeanFieldState4> {
    let lambda = params
        .lambda
        .finite()
        .ok_or_else(|| Error::InvalidParameter("finite-rate field needs a finite lambda".into()))?;
    let mut out = [0.0; 4];
    finite_field(params, lambda, &state.to_array(), &mut out);
    Ok(MeanFieldState4::from_slice(&out))
}

/// Averaged firing rate `(1 − |z|²) / (π |1 + z|²)`.
pub fn firing_rate(z: ComplexMeanField) -> Result<f64> {
    let denom = (z + 1.0).norm_sqr();
    if denom.sqrt() <= FIRING_RATE_SINGULARITY {
        return Err(Error::Singular(format!(
            "firing rate diverges at z = {z} (|1 + z| = {:e})",
            denom.sqrt()
        )));
    }
    Ok((1.0 - z.norm_sqr()) / (PI * denom))
}

/// Which reduced description to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// 2-D Cartesian field, reset subsystem pinned at `π`.
    Infinite,
    /// 2-D polar field `(r, ψ)`, reset subsystem pinned at `π`.
    Polar,
    /// 4-D two-population field with finite λ.
    Finite,
}

impl std::str::FromStr for Reduction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "infinite" | "inf" => Ok(Reduction::Infinite),
            "polar" => Ok(Reduction::Polar),
            "finite" => Ok(Reduction::Finite),
            other => Err(Error::InvalidParameter(format!(
                "unknown system '{other}' (expected infinite, polar or finite)"
            ))),
        }
    }
}

impl Reduction {
    pub fn dim(self) -> usize {
        match self {
            Reduction::Infinite | Reduction::Polar => 2,
            Reduction::Finite => 4,
        }
    }

    pub fn component_names(self) -> &'static [&'static str] {
        match self {
            Reduction::Infinite => &["x_nr", "y_nr"],
            Reduction::Polar => &["r_nr", "psi_nr"],
            Reduction::Finite => &["x_r", "y_r", "x_nr", "y_nr"],
        }
    }

    /// Natural reduction for the reset rate in `params`.
    pub fn for_params(params: &ModelParams) -> Self {
        if params.lambda.is_infinite() {
            Reduction::Infinite
        } else {
            Reduction::Finite
        }
    }
}

/// A validated reduced field ready for repeated evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldSystem {
    pub reduction: Reduction,
    pub params: ModelParams,
    lambda: f64,
}

impl MeanFieldSystem {
    pub fn new(reduction: Reduction, params: ModelParams) -> Result<Self> {
        params.validate()?;
        if params.sharpness_n != 2 {
            return Err(Error::InvalidParameter(format!(
                "reduced fields are implemented for n = 2 only, got n = {}",
                params.sharpness_n
            )));
        }
        let lambda = match (reduction, params.lambda) {
            (Reduction::Finite, ResetRate::Finite(l)) => l,
            (Reduction::Finite, ResetRate::Infinite) => {
                return Err(Error::InvalidParameter(
                    "the finite-rate system needs a finite lambda".into(),
                ))
            }
            (_, ResetRate::Infinite) => f64::INFINITY,
            (_, ResetRate::Finite(l)) => {
                return Err(Error::InvalidParameter(format!(
                    "the {reduction:?} system assumes lambda = inf, got {l}"
                )))
            }
        };
        Ok(Self {
            reduction,
            params,
            lambda,
        })
    }

    /// Uses [`Reduction::for_params`].
    pub fn for_params(params: ModelParams) -> Result<Self> {
        Self::new(Reduction::for_params(&params), params)
    }

    pub fn dim(&self) -> usize {
        self.reduction.dim()
    }

    /// Changes the reset rate of a finite-rate system without revalidation.
    pub(crate) fn set_lambda(&mut self, lambda: f64) {
        if self.reduction == Reduction::Finite {
            self.lambda = lambda;
            self.params.lambda = ResetRate::Finite(lambda);
        }
    }

    #[inline]
    pub fn eval(&self, state: &[f64], out: &mut [f64]) {
        match self.reduction {
            Reduction::Infinite => infinite_field(&self.params, state, out),
            Reduction::Polar => polar_field(&self.params, state, out),
            Reduction::Finite => finite_field(&self.params, self.lambda, state, out),
        }
    }

    /// Closure form of [`MeanFieldSystem::eval`] for the ODE and Newton helpers.
    pub fn field(&self) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |s, o| self.eval(s, o)
    }

    /// Non-reset mean field `z_nr` of a state vector.
    pub fn nonreset(&self, state: &[f64]) -> ComplexMeanField {
        match self.reduction {
            Reduction::Infinite => Complex64::new(state[0], state[1]),
            Reduction::Polar => Complex64::from_polar(state[0], state[1]),
            Reduction::Finite => Complex64::new(state[2], state[3]),
        }
    }

    /// Reset mean field, when the state carries one.
    pub fn reset(&self, state: &[f64]) -> Option<ComplexMeanField> {
        match self.reduction {
            Reduction::Finite => Some(Complex64::new(state[0], state[1])),
            _ => None,
        }
    }

    pub fn f_nr(&self, state: &[f64]) -> f64 {
        firing_rate(self.nonreset(state)).unwrap_or(f64::NAN)
    }

    /// Whether every block lies in the closed unit disk (plus tolerance).
    pub fn in_domain(&self, state: &[f64]) -> bool {
        if state.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.reduction {
            Reduction::Polar => state[0] > 0.0 && state[0] <= 1.0 + DISK_TOLERANCE,
            _ => state
                .chunks(2)
                .all(|c| c[0] * c[0] + c[1] * c[1] <= (1.0 + DISK_TOLERANCE).powi(2)),
        }
    }

    /// State vector whose non-reset (and, in 4-D, reset) field equals `z`.
    pub fn state_from_field(&self, z: ComplexMeanField) -> Vec<f64> {
        match self.reduction {
            Reduction::Infinite => vec![z.re, z.im],
            Reduction::Polar => {
                let p = PolarState::from_field(z);
                vec![p.r_nr, p.psi_nr]
            }
            Reduction::Finite => vec![z.re, z.im, z.re, z.im],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(eta0: f64, k: f64, g: f64) -> ModelParams {
        ModelParams::new(eta0, k, g)
    }

    #[test]
    fn pinned_state_is_not_an_equilibrium() {
        let d = rhs_infinite(
            &MeanFieldState2 {
                x_nr: -1.0,
                y_nr: 0.0,
            },
            &p(0.3, 2.0, 0.5),
        );
        assert_eq!(d.x_nr, 0.0);
        assert_eq!(d.y_nr, -2.0);
    }

    #[test]
    fn firing_rate_examples() {
        assert!((firing_rate(Complex64::new(0.0, 0.0)).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(firing_rate(Complex64::from_polar(1.0, 0.7)).unwrap().abs() < 1e-15);
        let f = firing_rate(Complex64::new(1.0 / 3.0, 0.0)).unwrap();
        assert!((f - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(matches!(
            firing_rate(Complex64::new(-1.0, 0.0)),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn polar_undefined_at_origin() {
        let s = PolarState {
            r_nr: 0.0,
            psi_nr: 1.0,
        };
        assert!(rhs_polar(&s, &p(0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn polar_rim_never_points_outward() {
        let params = p(0.7, -3.0, 0.3);
        for k in 0..64 {
            let psi = k as f64 * 2.0 * PI / 64.0;
            let d = rhs_polar(
                &PolarState {
                    r_nr: 1.0,
                    psi_nr: psi,
                },
                &params,
            )
            .unwrap();
            assert!(d.r_nr <= 1e-15, "psi {psi}: rdot {}", d.r_nr);
        }
    }

    #[test]
    fn finite_zero_rate_blocks_agree_on_diagonal() {
        let params = p(-0.4, 2.0, 0.3).with_lambda(ResetRate::Finite(0.0));
        let s = MeanFieldState4 {
            x_r: 0.2,
            y_r: -0.3,
            x_nr: 0.2,
            y_nr: -0.3,
        };
        let d = rhs_finite(&s, &params).unwrap();
        assert_eq!(d.x_r, d.x_nr);
        assert_eq!(d.y_r, d.y_nr);
    }

    #[test]
    fn finite_field_needs_finite_rate() {
        let s = MeanFieldState4 {
            x_r: 0.0,
            y_r: 0.0,
            x_nr: 0.0,
            y_nr: 0.0,
        };
        assert!(rhs_finite(&s, &p(0.0, 1.0, 0.5)).is_err());
    }

    #[test]
    fn system_rejects_mismatched_rate() {
        let finite = p(0.0, 1.0, 0.5).with_lambda(ResetRate::Finite(1.0));
        assert!(MeanFieldSystem::new(Reduction::Infinite, finite).is_err());
        assert!(MeanFieldSystem::new(Reduction::Finite, p(0.0, 1.0, 0.5)).is_err());
        let mut n3 = p(0.0, 1.0, 0.5);
        n3.sharpness_n = 3;
        assert!(MeanFieldSystem::new(Reduction::Infinite, n3).is_err());
    }

    #[test]
    fn gamma_enters_as_shifted_bare_system() {
        // pinned drive folds into η0 + (8/3)γK and K(1-γ)
        let (eta0, k, g) = (0.9, -2.5, 0.4);
        let s = MeanFieldState2 {
            x_nr: 0.1,
            y_nr: 0.6,
        };
        let a = rhs_infinite(&s, &p(eta0, k, g));
        let b = rhs_infinite(&s, &p(eta0 + 8.0 / 3.0 * g * k, k * (1.0 - g), 0.0));
        assert!((a.x_nr - b.x_nr).abs() < 1e-14 && (a.y_nr - b.y_nr).abs() < 1e-14);
    }
}
