//! Network constants, pulse-shape algebra and Lorentzian excitability sampling.
//!
//! Everything here is pure and immutable after construction. The pulse
//! `P_n(θ) = a_n (1 − cos θ)^n` is normalised so that it integrates to `2π`
//! over one cycle; its expansion coefficients feed the mean-field influence
//! function `H_n(z)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Complex order parameter `z = x + i y` of a (sub)population.
pub type ComplexMeanField = Complex64;

/// Slack allowed on `|z| ≤ 1` for integrated mean-field states.
pub const DISK_TOLERANCE: f64 = 1e-9;

/// Whether `z` lies in the closed unit disk up to [`DISK_TOLERANCE`].
pub fn within_unit_disk(z: ComplexMeanField) -> bool {
    z.norm() <= 1.0 + DISK_TOLERANCE
}

/// Poisson rate of reset events. `Infinite` pins the reset subsystem at `π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetRate {
    Finite(f64),
    Infinite,
}

impl ResetRate {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ResetRate::Infinite)
    }

    /// Finite rate value, `None` for the infinite flag.
    pub fn finite(&self) -> Option<f64> {
        match *self {
            ResetRate::Finite(v) => Some(v),
            ResetRate::Infinite => None,
        }
    }
}

impl fmt::Display for ResetRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResetRate::Finite(v) => write!(f, "{v}"),
            ResetRate::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for ResetRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
            return Ok(ResetRate::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse reset rate '{s}'")))?;
        if v.is_infinite() && v > 0.0 {
            Ok(ResetRate::Infinite)
        } else {
            Ok(ResetRate::Finite(v))
        }
    }
}

impl Serialize for ResetRate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ResetRate::Finite(v) => serializer.serialize_f64(*v),
            ResetRate::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ResetRate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(ResetRate::Finite(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Network constants shared by the microscopic and mean-field levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Median excitability η0.
    pub eta0: f64,
    /// Lorentzian half-width Δ.
    pub delta: f64,
    /// Global coupling K.
    pub coupling_k: f64,
    /// Pulse sharpness n.
    pub sharpness_n: u32,
    /// Fraction γ of neurons in the reset subsystem.
    pub gamma: f64,
    /// Reset rate λ.
    pub lambda: ResetRate,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            eta0: 0.0,
            delta: 0.1,
            coupling_k: 0.0,
            sharpness_n: 2,
            gamma: 0.0,
            lambda: ResetRate::Infinite,
        }
    }
}

impl ModelParams {
    /// Parameters with Δ = 0.1, n = 2 and infinite reset rate.
    pub fn new(eta0: f64, coupling_k: f64, gamma: f64) -> Self {
        Self {
            eta0,
            coupling_k,
            gamma,
            ..Self::default()
        }
    }

    pub fn with_lambda(mut self, lambda: ResetRate) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eta0.is_finite() || !self.coupling_k.is_finite() {
            return Err(Error::InvalidParameter(
                "eta0 and coupling_k must be finite".into(),
            ));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if let ResetRate::Finite(l) = self.lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "lambda must be non-negative, got {l}"
                )));
            }
        }
        Ok(())
    }
}

/// `a_n = 2^n / C(2n, n)`, normalising `a_n (1 − cos θ)^n` to integrate to `2π`.
pub fn pulse_norm_const(n: u32) -> f64 {
    // 2^n n!^2 / (2n)!, accumulated as a product to stay well scaled
    (1..=n).fold(1.0, |acc, k| acc * 2.0 * k as f64 / (n + k) as f64)
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Expansion coefficient `P_jm = n! (−1)^j / (2^j m! (j−m)! (n−j)!)` of `(1 − cos θ)^n`
/// in the harmonic `e^{i(j−2m)θ}`.
pub fn pjm_coeff(n: u32, j: u32, m: u32) -> Result<f64> {
    if m > j || j > n {
        return Err(Error::IndexOutOfRange(format!(
            "need 0 <= m <= j <= n, got n={n}, j={j}, m={m}"
        )));
    }
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(factorial(n) * sign
        / (2f64.powi(j as i32) * factorial(m) * factorial(j - m) * factorial(n - j)))
}

/// Cached pulse-shape tables for a fixed sharpness `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseCoefficients {
    pub sharpness_n: u32,
    pub norm_const_a_n: f64,
    /// `pjm[j][m]` for `0 ≤ m ≤ j ≤ n`.
    pub pjm: Vec<Vec<f64>>,
    /// Fourier weights `A_q`, `q = 0..=n`.
    pub fourier_a_q: Vec<f64>,
    /// Pulse value of a neuron pinned at `θ = π`: `2^n a_n`.
    pub big_h: f64,
}

impl PulseCoefficients {
    pub fn new(n: u32) -> Self {
        let a_n = pulse_norm_const(n);
        let pjm: Vec<Vec<f64>> = (0..=n)
            .map(|j| (0..=j).map(|m| pjm_coeff(n, j, m).unwrap()).collect())
            .collect();
        let mut fourier = vec![0.0; n as usize + 1];
        for (j, row) in pjm.iter().enumerate() {
            for (m, &p) in row.iter().enumerate() {
                let q = j as i64 - 2 * m as i64;
                if q >= 0 {
                    fourier[q as usize] += p;
                }
            }
        }
        Self {
            sharpness_n: n,
            norm_const_a_n: a_n,
            pjm,
            fourier_a_q: fourier,
            big_h: 2f64.powi(n as i32) * a_n,
        }
    }

    /// `P_n(θ) = a_n (1 − cos θ)^n`.
    #[inline]
    pub fn pulse(&self, theta: f64) -> f64 {
        self.pulse_from_cos(theta.cos())
    }

    #[inline]
    pub fn pulse_from_cos(&self, cos_theta: f64) -> f64 {
        self.norm_const_a_n * (1.0 - cos_theta).powi(self.sharpness_n as i32)
    }

    /// `H_n(z) = a_n Σ_{j,m} P_jm z^{j−2m}`, negative powers taken as powers of `z̄`.
    pub fn influence(&self, z: ComplexMeanField) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, row) in self.pjm.iter().enumerate() {
            for (m, &p) in row.iter().enumerate() {
                let q = j as i32 - 2 * m as i32;
                let moment = if q >= 0 { z.powi(q) } else { z.conj().powi(-q) };
                acc += p * moment;
            }
        }
        self.norm_const_a_n * acc.re
    }

    /// Same quantity via the Fourier weights: `a_n [A_0 + Σ_q A_q (z^q + z̄^q)]`.
    pub fn influence_fourier(&self, z: ComplexMeanField) -> f64 {
        let mut acc = self.fourier_a_q[0];
        for (q, &a) in self.fourier_a_q.iter().enumerate().skip(1) {
            acc += a * 2.0 * z.powi(q as i32).re;
        }
        self.norm_const_a_n * acc
    }
}

/// Closed-form `H_2(z) = (2/3)[3/2 − 2x + (x² − y²)/2]`.
#[inline]
pub fn influence_h2(z: ComplexMeanField) -> f64 {
    h2_xy(z.re, z.im)
}

#[inline]
pub(crate) fn h2_xy(x: f64, y: f64) -> f64 {
    (2.0 / 3.0) * (1.5 - 2.0 * x + 0.5 * (x * x - y * y))
}

/// Inverse CDF of the Lorentzian with median `eta0` and half-width `delta`.
pub fn lorentzian_quantile(u: f64, eta0: f64, delta: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {u}"
        )));
    }
    Ok(eta0 + delta * (PI * (u - 0.5)).tan())
}

pub fn lorentzian_cdf(eta: f64, eta0: f64, delta: f64) -> f64 {
    0.5 + ((eta - eta0) / delta).atan() / PI
}
