//! Equilibria, stability, one-parameter continuation with fold/Hopf
//! detection, and two-parameter scans for Cusp and Bogdanov–Takens points.

pub mod continuation;
pub mod detect;
pub mod equilibrium;
pub mod family;
pub mod linalg;
pub mod scan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use continuation::{
    continue_branch, trace_branch, BranchPoint, EquilibriumBranch, Termination,
};
pub use detect::{
    analyze_family, bialternate_test, detect_folds, detect_hopf, BifurcationKind, BifurcationPoint,
    BranchAnalysis,
};
pub use equilibrium::{find_equilibrium, jacobian_fd};
pub use family::{ContinuationParam, MeanFieldFamily, ParamFamily};
pub use linalg::{eigenvalues, Matrix};
pub use scan::{
    fold_loci, hopf_loci, scan_fold_curve, scan_hopf_curve, Grid, ScanResult, ScanSample,
};

/// Step control and tolerances for continuation, detection and scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationSettings {
    /// Initial pseudo-arclength step.
    pub step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Largest accepted tangent rotation per step (radians).
    pub max_angle: f64,
    pub newton_tol: f64,
    pub corrector_max_iter: usize,
    pub fd_eps: f64,
    pub max_points: usize,
    pub fold_tol: f64,
    pub hopf_tol: f64,
    pub omega_min: f64,
    pub eig_tol: f64,
    pub cusp_tol: f64,
    /// Relative bracket width in the second parameter at which Cusp bisection stops.
    pub cusp_bracket_tol: f64,
    /// Bracket width in the second parameter at which BT bisection stops.
    pub bt_tol: f64,
    /// Largest Hopf frequency still accepted as a collapsing (BT) pair.
    pub bt_omega_accept: f64,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            step: 1e-3,
            min_step: 1e-8,
            max_step: 0.05,
            max_angle: 0.1,
            newton_tol: 1e-11,
            corrector_max_iter: 12,
            fd_eps: 1e-6,
            max_points: 1_000_000,
            fold_tol: 1e-6,
            hopf_tol: 1e-5,
            omega_min: 1e-3,
            eig_tol: 1e-4,
            cusp_tol: 1e-4,
            cusp_bracket_tol: 1e-4,
            bt_tol: 1e-7,
            bt_omega_accept: 0.05,
        }
    }
}

impl ContinuationSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step", self.step),
            ("min_step", self.min_step),
            ("max_step", self.max_step),
            ("max_angle", self.max_angle),
            ("newton_tol", self.newton_tol),
            ("fd_eps", self.fd_eps),
            ("fold_tol", self.fold_tol),
            ("hopf_tol", self.hopf_tol),
            ("omega_min", self.omega_min),
            ("eig_tol", self.eig_tol),
            ("cusp_tol", self.cusp_tol),
            ("cusp_bracket_tol", self.cusp_bracket_tol),
            ("bt_tol", self.bt_tol),
            ("bt_omega_accept", self.bt_omega_accept),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.min_step > self.max_step {
            return Err(Error::InvalidParameter("min_step exceeds max_step".into()));
        }
        if self.corrector_max_iter == 0 || self.max_points < 2 {
            return Err(Error::InvalidParameter(
                "corrector_max_iter must be >= 1 and max_points >= 2".into(),
            ));
        }
        Ok(())
    }
}
