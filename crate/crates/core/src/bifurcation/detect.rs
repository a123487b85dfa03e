//! Fold and Hopf detection along traced branches, and whole-range analysis.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::continuation::{
    equilibrium_at, locate_along, trace_branch, BranchPoint, EquilibriumBranch, Termination,
};
use super::family::ParamFamily;
use super::ContinuationSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BifurcationKind {
    #[serde(rename = "SN")]
    SaddleNode,
    Hopf,
    Cusp,
    #[serde(rename = "BT")]
    BogdanovTakens,
}

impl fmt::Display for BifurcationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SaddleNode => "SN",
            Self::Hopf => "Hopf",
            Self::Cusp => "Cusp",
            Self::BogdanovTakens => "BT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub kind: BifurcationKind,
    pub params: BTreeMap<String, f64>,
    pub state: Vec<f64>,
    pub f_nr: f64,
    /// Modulus of the non-reset mean field.
    pub r_nr: f64,
    pub eigenvalues: Vec<Complex64>,
    /// Angular frequency of the critical pair (Hopf and BT only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl BifurcationPoint {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    fn from_branch_point<P: ParamFamily + ?Sized>(
        family: &P,
        kind: BifurcationKind,
        pt: &BranchPoint,
        omega: Option<f64>,
    ) -> Self {
        let mut params = BTreeMap::new();
        params.insert(family.parameter_name().to_string(), pt.param);
        Self {
            kind,
            params,
            state: pt.state.clone(),
            f_nr: pt.f_nr,
            r_nr: family.nonreset_field(&pt.state).norm(),
            eigenvalues: pt.eigenvalues.clone(),
            omega,
        }
    }
}

/// Product `Π_{i<j} (λ_i + λ_j)`, which vanishes at Hopf points and at
/// neutral saddles.
pub fn bialternate_test(eigenvalues: &[Complex64]) -> f64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 0..eigenvalues.len() {
        for j in i + 1..eigenvalues.len() {
            prod *= eigenvalues[i] + eigenvalues[j];
        }
    }
    prod.re
}

/// Pair `(i, j)` whose sum is closest to zero, and `Re(λ_i λ_j)`: `ω²` for
/// a Hopf pair `±iω`, `−μ²` for a neutral saddle `±μ`.
fn critical_pair(eigenvalues: &[Complex64]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    let mut best_sum = f64::INFINITY;
    for i in 0..eigenvalues.len() {
        for j in i + 1..eigenvalues.len() {
            let s = (eigenvalues[i] + eigenvalues[j]).norm();
            if s < best_sum {
                best_sum = s;
                best = Some((i, j, (eigenvalues[i] * eigenvalues[j]).re));
            }
        }
    }
    best
}

/// Bisects the arclength interval `(0, ds)` after `a` for a sign change of
/// `test`, down to a bracket of width `tol`.
fn bisect_on_arclength<P, T>(
    family: &P,
    a: &BranchPoint,
    ds: f64,
    tol: f64,
    settings: &ContinuationSettings,
    test: T,
) -> Result<BranchPoint>
where
    P: ParamFamily + ?Sized,
    T: Fn(&BranchPoint) -> f64,
{
    let sign_a = test(a).signum();
    let (mut lo, mut hi) = (0.0, ds);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let pt = locate_along(family, a, mid, settings)?;
        if test(&pt).signum() == sign_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    locate_along(family, a, 0.5 * (lo + hi), settings)
}

/// Folds: sign reversals of the parameter component of the tangent, refined
/// by arclength bisection and confirmed by a near-zero eigenvalue.
pub fn detect_folds<P: ParamFamily + ?Sized>(
    family: &P,
    branch: &EquilibriumBranch,
    settings: &ContinuationSettings,
) -> Vec<BifurcationPoint> {
    let mut out = Vec::new();
    for w in branch.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.param_direction() * b.param_direction() >= 0.0 {
            continue;
        }
        let ds = b.arclength - a.arclength;
        let refined = bisect_on_arclength(family, a, ds, settings.fold_tol, settings, |p| {
            p.param_direction()
        });
        if let Ok(pt) = refined {
            let min_eig = pt
                .eigenvalues
                .iter()
                .map(|e| e.norm())
                .fold(f64::INFINITY, f64::min);
            if min_eig < settings.eig_tol {
                out.push(BifurcationPoint::from_branch_point(
                    family,
                    BifurcationKind::SaddleNode,
                    &pt,
                    None,
                ));
            }
        }
    }
    out
}

/// A zero of the bialternate test with its signed squared frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfCandidate {
    pub point: BifurcationPoint,
    pub omega_squared: f64,
    pub critical_re: f64,
}

impl HopfCandidate {
    pub fn is_hopf(&self, settings: &ContinuationSettings) -> bool {
        self.omega_squared > settings.omega_min * settings.omega_min
            && self.critical_re.abs() < settings.eig_tol
    }
}

/// All zeros of the bialternate test along the branch (Hopf points and
/// neutral saddles).
pub fn detect_hopf_candidates<P: ParamFamily + ?Sized>(
    family: &P,
    branch: &EquilibriumBranch,
    settings: &ContinuationSettings,
) -> Vec<HopfCandidate> {
    let mut out = Vec::new();
    for w in branch.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (ha, hb) = (
            bialternate_test(&a.eigenvalues),
            bialternate_test(&b.eigenvalues),
        );
        if !(ha * hb < 0.0) {
            continue;
        }
        let ds = b.arclength - a.arclength;
        let tol = settings.hopf_tol * 1e-3;
        let Ok(pt) = bisect_on_arclength(family, a, ds, tol, settings, |p| {
            bialternate_test(&p.eigenvalues)
        }) else {
            continue;
        };
        let Some((i, j, omega_squared)) = critical_pair(&pt.eigenvalues) else {
            continue;
        };
        let critical_re = 0.5 * (pt.eigenvalues[i].re + pt.eigenvalues[j].re);
        let omega = (omega_squared > 0.0).then(|| omega_squared.sqrt());
        out.push(HopfCandidate {
            point: BifurcationPoint::from_branch_point(family, BifurcationKind::Hopf, &pt, omega),
            omega_squared,
            critical_re,
        });
    }
    out
}

/// Hopf points: a complex pair crossing the imaginary axis with
/// `|Im| > omega_min`.
pub fn detect_hopf<P: ParamFamily + ?Sized>(
    family: &P,
    branch: &EquilibriumBranch,
    settings: &ContinuationSettings,
) -> Vec<BifurcationPoint> {
    detect_hopf_candidates(family, branch, settings)
        .into_iter()
        .filter(|c| c.is_hopf(settings))
        .map(|c| c.point)
        .collect()
}

/// Everything found on the equilibrium branches of one family over a range.
#[derive(Debug, Clone)]
pub struct BranchAnalysis {
    pub branches: Vec<EquilibriumBranch>,
    pub folds: Vec<BifurcationPoint>,
    pub hopf: Vec<BifurcationPoint>,
    pub hopf_candidates: Vec<HopfCandidate>,
}

fn same_point(a: &BifurcationPoint, b: &BifurcationPoint, name: &str) -> bool {
    let (pa, pb) = (a.param(name).unwrap(), b.param(name).unwrap());
    let dist = a
        .state
        .iter()
        .zip(&b.state)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    (pa - pb).abs() < 1e-5 * (1.0 + pa.abs()) && dist < 1e-4
}

fn sort_by_param(points: &mut [BifurcationPoint], name: &str) {
    points.sort_by(|a, b| a.param(name).unwrap().total_cmp(&b.param(name).unwrap()));
}

/// Seeds equilibria at both ends of `range`, traces every distinct branch
/// inward, and collects the folds and Hopf points found on them.
pub fn analyze_family<P: ParamFamily + ?Sized>(
    family: &P,
    range: (f64, f64),
    settings: &ContinuationSettings,
) -> Result<BranchAnalysis> {
    let (lo, hi) = (range.0.min(range.1), range.0.max(range.1));
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "parameter range must be non-empty and finite, got {}:{}",
            range.0, range.1
        )));
    }
    let mut branches: Vec<EquilibriumBranch> = Vec::new();
    let mut seeded: Vec<(f64, Vec<f64>)> = Vec::new();
    for (start, end) in [(lo, hi), (hi, lo)] {
        for guess in family.seed_guesses(start) {
            let Ok(x) = equilibrium_at(family, start, &guess, settings) else {
                continue;
            };
            if !family.in_domain(&x) {
                continue;
            }
            // skip equilibria already reached by an earlier branch
            let known = seeded.iter().any(|(p, s)| *p == start && close(s, &x))
                || branches.iter().any(|b| {
                    b.termination == Termination::RangeEnd
                        && b.points.last().is_some_and(|pt| {
                            (pt.param - start).abs() < 1e-6 && close(&pt.state, &x)
                        })
                });
            if known {
                continue;
            }
            seeded.push((start, x.clone()));
            if let Ok(branch) = trace_branch(family, (start, end), &x, settings) {
                branches.push(branch);
            }
        }
    }
    if branches.is_empty() {
        return Err(Error::Continuation(format!(
            "could not seed an equilibrium at either end of {lo}:{hi}"
        )));
    }
    let name = family.parameter_name().to_string();
    let mut folds: Vec<BifurcationPoint> = Vec::new();
    let mut candidates: Vec<HopfCandidate> = Vec::new();
    for branch in &branches {
        for f in detect_folds(family, branch, settings) {
            if !folds.iter().any(|g| same_point(g, &f, &name)) {
                folds.push(f);
            }
        }
        for c in detect_hopf_candidates(family, branch, settings) {
            if !candidates
                .iter()
                .any(|g| same_point(&g.point, &c.point, &name))
            {
                candidates.push(c);
            }
        }
    }
    sort_by_param(&mut folds, &name);
    candidates.sort_by(|a, b| {
        a.point
            .param(&name)
            .unwrap()
            .total_cmp(&b.point.param(&name).unwrap())
    });
    let hopf = candidates
        .iter()
        .filter(|c| c.is_hopf(settings))
        .map(|c| c.point.clone())
        .collect();
    Ok(BranchAnalysis {
        branches,
        folds,
        hopf,
        hopf_candidates: candidates,
    })
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-6)
}
