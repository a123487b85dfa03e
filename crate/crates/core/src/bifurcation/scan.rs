//! Two-parameter scans: fold and Hopf loci over a grid of a second
//! parameter, with Cusp and Bogdanov–Takens points located by bisection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::detect::{analyze_family, BifurcationKind, BifurcationPoint};
use super::family::ParamFamily;
use super::ContinuationSettings;

/// Sample positions of the second parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    /// Geometric spacing (both ends must be positive).
    #[serde(default)]
    pub log: bool,
}

pub const MIN_GRID_POINTS: usize = 20;

impl Grid {
    pub fn linear(start: f64, end: f64, points: usize) -> Self {
        Self {
            start,
            end,
            points,
            log: false,
        }
    }

    pub fn logarithmic(start: f64, end: f64, points: usize) -> Self {
        Self {
            start,
            end,
            points,
            log: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {}",
                self.points
            )));
        }
        if !(self.start.is_finite() && self.end.is_finite()) || self.start == self.end {
            return Err(Error::InvalidParameter(format!(
                "grid range must be non-empty and finite, got {}:{}",
                self.start, self.end
            )));
        }
        if self.log && !(self.start > 0.0 && self.end > 0.0) {
            return Err(Error::InvalidParameter(
                "a logarithmic grid needs positive end points".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let m = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / m;
                if self.log {
                    (self.start.ln() + t * (self.end.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.end - self.start)
                }
            })
            .collect()
    }
}

/// Points found at one value of the second parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSample {
    pub param2: f64,
    pub points: Vec<BifurcationPoint>,
    /// Set when the one-parameter analysis failed at this grid value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub param1: String,
    pub param2: String,
    pub samples: Vec<ScanSample>,
    /// Codimension-two points (Cusp or BT).
    pub codim2: Vec<BifurcationPoint>,
}

fn with_second(
    mut p: BifurcationPoint,
    kind: BifurcationKind,
    name2: &str,
    value2: f64,
) -> BifurcationPoint {
    p.kind = kind;
    p.params.insert(name2.to_string(), value2);
    p
}

/// Adjacent pair (in `param1`) with the smallest separation.
fn closest_pair(
    folds: &[BifurcationPoint],
    name1: &str,
) -> Option<(BifurcationPoint, BifurcationPoint)> {
    folds
        .windows(2)
        .min_by(|a, b| {
            let da = (a[1].param(name1).unwrap() - a[0].param(name1).unwrap()).abs();
            let db = (b[1].param(name1).unwrap() - b[0].param(name1).unwrap()).abs();
            da.total_cmp(&db)
        })
        .map(|w| (w[0].clone(), w[1].clone()))
}

fn run_grid<P, M>(
    make: &M,
    range: (f64, f64),
    values: &[f64],
    settings: &ContinuationSettings,
    pick: fn(super::detect::BranchAnalysis) -> Vec<BifurcationPoint>,
) -> Vec<ScanSample>
where
    P: ParamFamily,
    M: Fn(f64) -> Result<P> + Sync,
{
    values
        .par_iter()
        .map(
            |&v| match make(v).and_then(|fam| analyze_family(&fam, range, settings)) {
                Ok(a) => ScanSample {
                    param2: v,
                    points: pick(a),
                    error: None,
                },
                Err(e) => ScanSample {
                    param2: v,
                    points: Vec::new(),
                    error: Some(e.to_string()),
                },
            },
        )
        .collect()
}

/// Fold loci over `grid` and Cusp points where a fold pair annihilates.
/// An empty `codim2` list is not an error here; see [`scan_fold_curve`].
///
/// `make` builds the one-parameter family (in `param1`) at a value of the
/// second parameter.
pub fn fold_loci<P, M>(
    make: M,
    param2_name: &str,
    param1_range: (f64, f64),
    grid: &Grid,
    settings: &ContinuationSettings,
) -> Result<ScanResult>
where
    P: ParamFamily,
    M: Fn(f64) -> Result<P> + Sync,
{
    grid.validate()?;
    settings.validate()?;
    let values = grid.values();
    let name1 = make(values[0])?.parameter_name().to_string();
    let samples = run_grid(&make, param1_range, &values, settings, |a| a.folds);

    let mut cusps = Vec::new();
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.error.is_some() || b.error.is_some() || a.points.len() == b.points.len() {
            continue;
        }
        let (rich, poor) = if a.points.len() > b.points.len() {
            (a, b)
        } else {
            (b, a)
        };
        if rich.points.len() - poor.points.len() != 2 {
            continue;
        }
        // the grid neighbour beyond `rich` gives a first estimate of the drift
        let rich_idx = samples.iter().position(|x| std::ptr::eq(x, rich)).unwrap();
        let beyond = if std::ptr::eq(rich, a) {
            rich_idx.checked_sub(1).map(|i| &samples[i])
        } else {
            samples.get(rich_idx + 1)
        };
        let beyond = beyond.filter(|x| x.error.is_none() && x.points.len() >= 2);
        if let Some(c) = refine_cusp(
            &make,
            &name1,
            param2_name,
            rich,
            beyond,
            poor.param2,
            settings,
        )? {
            cusps.push(c);
        }
    }
    Ok(ScanResult {
        param1: name1,
        param2: param2_name.to_string(),
        samples,
        codim2: cusps,
    })
}

fn refine_cusp<P, M>(
    make: &M,
    name1: &str,
    name2: &str,
    rich: &ScanSample,
    beyond: Option<&ScanSample>,
    poor_p2: f64,
    settings: &ContinuationSettings,
) -> Result<Option<BifurcationPoint>>
where
    P: ParamFamily,
    M: Fn(f64) -> Result<P> + Sync,
{
    let Some(pair) = closest_pair(&rich.points, name1) else {
        return Ok(None);
    };
    let sep = |p: &(BifurcationPoint, BifurcationPoint)| {
        (p.1.param(name1).unwrap() - p.0.param(name1).unwrap()).abs()
    };
    let centre = |p: &(BifurcationPoint, BifurcationPoint)| {
        0.5 * (p.1.param(name1).unwrap() + p.0.param(name1).unwrap())
    };
    // history of (param2, separation, centre) on the side that has the pair
    let mut history = Vec::new();
    if let Some(p) = beyond.and_then(|b| closest_pair(&b.points, name1)) {
        history.push((beyond.unwrap().param2, sep(&p), centre(&p)));
    }
    history.push((rich.param2, sep(&pair), centre(&pair)));
    let mut best = pair;
    let (mut p_rich, mut p_poor) = (rich.param2, poor_p2);
    let span = (p_rich - p_poor).abs();
    let bracket_tol = settings.cusp_bracket_tol * (1.0 + p_rich.abs());
    while (sep(&best) >= settings.cusp_tol || (p_rich - p_poor).abs() > bracket_tol)
        && (p_rich - p_poor).abs() > 1e-12 * (1.0 + span)
    {
        let mid = 0.5 * (p_rich + p_poor);
        let s = sep(&best);
        // the pair drifts with the second parameter; follow it linearly
        let shift = match history.as_slice() {
            [.., (a2, _, ca), (b2, _, cb)] => (cb - ca) / (b2 - a2) * (mid - b2),
            _ => 0.0,
        };
        let lo = best
            .0
            .param(name1)
            .unwrap()
            .min(best.1.param(name1).unwrap())
            + shift;
        let hi = best
            .0
            .param(name1)
            .unwrap()
            .max(best.1.param(name1).unwrap())
            + shift;
        let margin = (4.0 * s).max(0.05) + shift.abs();
        // the S-shaped part of the branch is ~ sep^{1/3} long
        let local_step = (0.02 * s.cbrt()).clamp(1e-7, settings.max_step);
        let local = ContinuationSettings {
            max_step: local_step,
            step: settings.step.min(local_step),
            ..*settings
        };
        let fam = make(mid)?;
        let found = analyze_family(&fam, (lo - margin, hi + margin), &local)
            .ok()
            .and_then(|a| closest_pair(&a.folds, name1));
        match found {
            Some(p) => {
                p_rich = mid;
                history.push((mid, sep(&p), centre(&p)));
                best = p;
            }
            None => p_poor = mid,
        }
    }
    // separation ~ |p2 − p2*|^{3/2}: extrapolate sep^{2/3} linearly to zero
    let (p2_star, p1_star) = match history.as_slice() {
        [.., (a2, sa, ca), (b2, sb, cb)]
            if (sb.powf(2.0 / 3.0) - sa.powf(2.0 / 3.0)).abs() > 0.0 =>
        {
            let (qa, qb) = (sa.powf(2.0 / 3.0), sb.powf(2.0 / 3.0));
            let t = qb / (qb - qa);
            let p2 = b2 - t * (b2 - a2);
            let p1 = cb - t * (cb - ca);
            let lo = p_rich.min(p_poor) - (p_rich - p_poor).abs();
            let hi = p_rich.max(p_poor) + (p_rich - p_poor).abs();
            if p2.is_finite() && p2 >= lo && p2 <= hi {
                (p2, p1)
            } else {
                (0.5 * (p_rich + p_poor), *cb)
            }
        }
        _ => (0.5 * (p_rich + p_poor), centre(&best)),
    };
    let mut point = with_second(best.0.clone(), BifurcationKind::Cusp, name2, p2_star);
    point.params.insert(name1.to_string(), p1_star);
    Ok(Some(point))
}

/// Hopf loci over `grid` and Bogdanov–Takens points where the Hopf frequency
/// collapses to zero. An empty `codim2` list is not an error here; see
/// [`scan_hopf_curve`].
pub fn hopf_loci<P, M>(
    make: M,
    param2_name: &str,
    param1_range: (f64, f64),
    grid: &Grid,
    settings: &ContinuationSettings,
) -> Result<ScanResult>
where
    P: ParamFamily,
    M: Fn(f64) -> Result<P> + Sync,
{
    grid.validate()?;
    settings.validate()?;
    let values = grid.values();
    let name1 = make(values[0])?.parameter_name().to_string();
    let samples = run_grid(&make, param1_range, &values, settings, |a| a.hopf);

    let mut bts: Vec<BifurcationPoint> = Vec::new();
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.error.is_some() || b.error.is_some() || a.points.len() == b.points.len() {
            continue;
        }
        let (rich, poor) = if a.points.len() > b.points.len() {
            (a, b)
        } else {
            (b, a)
        };
        if let Some(bt) = refine_bt(
            &make,
            &name1,
            param2_name,
            param1_range,
            rich,
            poor,
            settings,
        )? {
            let dup = bts.iter().any(|x| {
                (x.param(&name1).unwrap() - bt.param(&name1).unwrap()).abs() < 1e-4
                    && (x.param(param2_name).unwrap() - bt.param(param2_name).unwrap()).abs() < 1e-4
            });
            if !dup {
                bts.push(bt);
            }
        }
    }
    Ok(ScanResult {
        param1: name1,
        param2: param2_name.to_string(),
        samples,
        codim2: bts,
    })
}

/// Hopf point in `rich` with no counterpart in `poor`, choosing the slowest.
fn vanishing_hopf(
    rich: &[BifurcationPoint],
    poor: &[BifurcationPoint],
    name1: &str,
) -> Option<BifurcationPoint> {
    let unmatched: Vec<&BifurcationPoint> = if poor.is_empty() {
        rich.iter().collect()
    } else {
        // drop the |poor| rich points nearest to a poor point
        let mut left: Vec<&BifurcationPoint> = rich.iter().collect();
        for q in poor {
            let qv = q.param(name1).unwrap();
            if let Some((idx, _)) = left.iter().enumerate().min_by(|(_, a), (_, b)| {
                (a.param(name1).unwrap() - qv)
                    .abs()
                    .total_cmp(&(b.param(name1).unwrap() - qv).abs())
            }) {
                left.remove(idx);
            }
        }
        left
    };
    unmatched
        .into_iter()
        .min_by(|a, b| a.omega.unwrap_or(0.0).total_cmp(&b.omega.unwrap_or(0.0)))
        .cloned()
}

fn refine_bt<P, M>(
    make: &M,
    name1: &str,
    name2: &str,
    range: (f64, f64),
    rich: &ScanSample,
    poor: &ScanSample,
    settings: &ContinuationSettings,
) -> Result<Option<BifurcationPoint>>
where
    P: ParamFamily,
    M: Fn(f64) -> Result<P> + Sync,
{
    let rich_count = rich.points.len();
    let Some(mut best) = vanishing_hopf(&rich.points, &poor.points, name1) else {
        return Ok(None);
    };
    let mut poor_points = poor.points.clone();
    let (mut p_rich, mut p_poor) = (rich.param2, poor.param2);
    let mut history = vec![(
        p_rich,
        best.omega.unwrap_or(0.0).powi(2),
        best.param(name1).unwrap(),
    )];
    while (p_rich - p_poor).abs() > settings.bt_tol {
        let mid = 0.5 * (p_rich + p_poor);
        let fam = make(mid)?;
        let Ok(analysis) = analyze_family(&fam, range, settings) else {
            return Ok(None);
        };
        if analysis.hopf.len() >= rich_count {
            let Some(h) = vanishing_hopf(&analysis.hopf, &poor_points, name1) else {
                return Ok(None);
            };
            p_rich = mid;
            history.push((mid, h.omega.unwrap_or(0.0).powi(2), h.param(name1).unwrap()));
            best = h;
        } else {
            p_poor = mid;
            poor_points = analysis.hopf;
        }
    }
    let omega = best.omega.unwrap_or(f64::INFINITY);
    if omega > settings.bt_omega_accept {
        // the Hopf point left through the range boundary or met another one
        return Ok(None);
    }
    // ω² is linear in the distance to BT
    let (p2_star, p1_star) = match history.as_slice() {
        [.., (a2, wa, ca), (b2, wb, cb)] if (wb - wa).abs() > 0.0 => {
            let t = wb / (wa - wb);
            let p2 = b2 + t * (b2 - a2);
            let p1 = cb + t * (cb - ca);
            let width = 10.0 * (p_rich - p_poor).abs().max(settings.bt_tol);
            if (p2 - p_rich).abs() <= width {
                (p2, p1)
            } else {
                (p_rich, best.param(name1).unwrap())
            }
        }
        _ => (p_rich, best.param(name1).unwrap()),
    };
    let mut point = with_second(best, BifurcationKind::BogdanovTakens, name2, p2_star);
    point.params.insert(name1.to_string(), p1_star);
    Ok(Some(point))
}

/// [`fold_loci`], failing with "no cusp in range" when no Cusp is found.
pub fn scan_fold_curve<P, M>(
    make: M,
    param2_name: &str,
    param1_range: (f64, f64),
    grid: &Grid,
    settings: &ContinuationSettings,
) -> Result<ScanResult>
where
    P: ParamFamily,
    M: Fn(f64) -> Result<P> + Sync,
{
    let result = fold_loci(make, param2_name, param1_range, grid, settings)?;
    if result.codim2.is_empty() {
        return Err(Error::NotFound("no cusp in range".into()));
    }
    Ok(result)
}

/// [`hopf_loci`], failing with "no BT in range" when no BT point is found.
pub fn scan_hopf_curve<P, M>(
    make: M,
    param2_name: &str,
    param1_range: (f64, f64),
    grid: &Grid,
    settings: &ContinuationSettings,
) -> Result<ScanResult>
where
    P: ParamFamily,
    M: Fn(f64) -> Result<P> + Sync,
{
    let result = hopf_loci(make, param2_name, param1_range, grid, settings)?;
    if result.codim2.is_empty() {
        return Err(Error::NotFound("no BT in range".into()));
    }
    Ok(result)
}
