//! One-parameter families of reduced vector fields.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::{MeanFieldSystem, PolarState, Reduction};
use crate::model::{ComplexMeanField, ModelParams, ResetRate};
use crate::ode::{settle, SETTLE_TOL};

/// Model constant that can be varied along a branch or a scan axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuationParam {
    Eta0,
    CouplingK,
    Gamma,
    Lambda,
}

impl ContinuationParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::Eta0 => "eta0",
            Self::CouplingK => "coupling_k",
            Self::Gamma => "gamma",
            Self::Lambda => "lambda",
        }
    }

    pub fn get(self, params: &ModelParams) -> f64 {
        match self {
            Self::Eta0 => params.eta0,
            Self::CouplingK => params.coupling_k,
            Self::Gamma => params.gamma,
            Self::Lambda => params.lambda.finite().unwrap_or(f64::INFINITY),
        }
    }

    pub fn set(self, params: &mut ModelParams, value: f64) {
        match self {
            Self::Eta0 => params.eta0 = value,
            Self::CouplingK => params.coupling_k = value,
            Self::Gamma => params.gamma = value,
            Self::Lambda => params.lambda = ResetRate::Finite(value),
        }
    }

    /// Range of admissible values.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Self::Eta0 | Self::CouplingK => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Gamma => (0.0, 1.0),
            Self::Lambda => (0.0, f64::INFINITY),
        }
    }
}

impl fmt::Display for ContinuationParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContinuationParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eta0" | "eta" => Ok(Self::Eta0),
            "k" | "coupling_k" => Ok(Self::CouplingK),
            "gamma" => Ok(Self::Gamma),
            "lambda" => Ok(Self::Lambda),
            other => Err(Error::InvalidParameter(format!(
                "unknown parameter {other:?} (expected eta0, k, gamma or lambda)"
            ))),
        }
    }
}

/// A vector field `F(x; p)` depending on one scalar parameter.
pub trait ParamFamily: Sync {
    fn dim(&self) -> usize;
    fn parameter_name(&self) -> &str;
    fn eval(&self, state: &[f64], param: f64, out: &mut [f64]);
    fn in_domain(&self, state: &[f64]) -> bool;
    /// Non-reset mean field of a state.
    fn nonreset_field(&self, state: &[f64]) -> ComplexMeanField;
    /// Equilibrium guesses at `param`, typically obtained by relaxation.
    fn seed_guesses(&self, param: f64) -> Vec<Vec<f64>>;

    fn firing_rate(&self, state: &[f64]) -> f64 {
        crate::meanfield::firing_rate(self.nonreset_field(state)).unwrap_or(f64::NAN)
    }
}

/// Initial mean fields used for seeding: rest-biased and spiking-biased.
pub const SEED_FIELDS: [Complex64; 2] = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.4)];

const SEED_DT: f64 = 0.01;
const SEED_T_MAX: f64 = 2000.0;

/// A reduced mean-field system with one of its constants freed.
#[derive(Debug, Clone, Copy)]
pub struct MeanFieldFamily {
    pub system: MeanFieldSystem,
    pub param: ContinuationParam,
}

impl MeanFieldFamily {
    pub fn new(reduction: Reduction, base: ModelParams, param: ContinuationParam) -> Result<Self> {
        if param == ContinuationParam::Lambda && reduction != Reduction::Finite {
            return Err(Error::InvalidParameter(
                "lambda can only be varied in the finite-rate system".into(),
            ));
        }
        let system = MeanFieldSystem::new(reduction, base)?;
        Ok(Self { system, param })
    }

    pub fn reduction(&self) -> Reduction {
        self.system.reduction
    }

    /// Concrete system at parameter value `p`.
    pub fn at(&self, p: f64) -> MeanFieldSystem {
        let mut sys = self.system;
        self.param.set(&mut sys.params, p);
        if self.param == ContinuationParam::Lambda {
            sys.set_lambda(p);
        }
        sys
    }

    /// Same family with another model constant fixed to `value`.
    pub fn with_fixed(&self, which: ContinuationParam, value: f64) -> Self {
        let mut out = *self;
        which.set(&mut out.system.params, value);
        if which == ContinuationParam::Lambda {
            out.system.set_lambda(value);
        }
        out
    }
}

impl ParamFamily for MeanFieldFamily {
    fn dim(&self) -> usize {
        self.system.dim()
    }

    fn parameter_name(&self) -> &str {
        self.param.name()
    }

    #[inline]
    fn eval(&self, state: &[f64], param: f64, out: &mut [f64]) {
        self.at(param).eval(state, out)
    }

    fn in_domain(&self, state: &[f64]) -> bool {
        self.system.in_domain(state)
    }

    fn nonreset_field(&self, state: &[f64]) -> ComplexMeanField {
        self.system.nonreset(state)
    }

    fn seed_guesses(&self, param: f64) -> Vec<Vec<f64>> {
        let sys = self.at(param);
        SEED_FIELDS
            .iter()
            .map(|&z0| match sys.reduction {
                Reduction::Polar => {
                    // relax in Cartesian coordinates, where z = 0 is regular
                    let cart = MeanFieldSystem::new(Reduction::Infinite, sys.params)
                        .expect("polar and Cartesian systems share parameters");
                    let (s, _) = settle(
                        &cart.field(),
                        &[z0.re, z0.im],
                        SEED_DT,
                        SETTLE_TOL,
                        SEED_T_MAX,
                    );
                    let p = PolarState::from_field(Complex64::new(s[0], s[1]));
                    vec![p.r_nr, p.psi_nr]
                }
                _ => {
                    let start = sys.state_from_field(z0);
                    settle(&sys.field(), &start, SEED_DT, SETTLE_TOL, SEED_T_MAX).0
                }
            })
            .collect()
    }
}

/// Adapter turning a closure `F(x, p, out)` into a family (for tests and
/// external fields).
pub struct ClosureFamily<F> {
    pub dim: usize,
    pub name: String,
    pub field: F,
    pub guesses: Vec<Vec<f64>>,
}

impl<F> ParamFamily for ClosureFamily<F>
where
    F: Fn(&[f64], f64, &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn parameter_name(&self) -> &str {
        &self.name
    }

    fn eval(&self, state: &[f64], param: f64, out: &mut [f64]) {
        (self.field)(state, param, out)
    }

    fn in_domain(&self, state: &[f64]) -> bool {
        state.iter().all(|v| v.is_finite())
    }

    fn nonreset_field(&self, state: &[f64]) -> ComplexMeanField {
        Complex64::new(state[0], state.get(1).copied().unwrap_or(0.0))
    }

    fn seed_guesses(&self, _param: f64) -> Vec<Vec<f64>> {
        self.guesses.clone()
    }

    fn firing_rate(&self, _state: &[f64]) -> f64 {
        f64::NAN
    }
}
