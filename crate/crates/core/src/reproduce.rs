//! Reference tables of bifurcation points and their recomputation.
//!
//! Each table is a list of cases. A codimension-one case fixes all but one
//! model constant, continues equilibria over a range and lists the expected
//! folds and Hopf points as `(parameter, value)` pairs. A codimension-two case
//! scans a second constant and lists Cusp and BT points as `(p1, p2)` pairs.
//! Every reference entry is matched to the nearest computed point of the same
//! kind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifurcation::{
    analyze_family, scan_fold_curve, scan_hopf_curve, BifurcationKind, BifurcationPoint,
    ContinuationParam, ContinuationSettings, Grid, MeanFieldFamily,
};
use crate::error::{Error, Result};
use crate::meanfield::Reduction;
use crate::model::{ModelParams, ResetRate};

/// Embedded reference data.
pub const REFERENCE_JSON: &str = include_str!("../data/reference_tables.json");

/// Table identifiers accepted by [`reproduce_table`].
pub const TABLE_IDS: [&str; 6] = ["t1", "t2", "t3", "t4", "t5", "t6"];

/// Model constants held fixed in a case. Unset values fall back to zero
/// (and an infinite reset rate).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    pub eta0: Option<f64>,
    pub coupling_k: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<ResetRate>,
}

impl FixedParams {
    pub fn model(&self) -> ModelParams {
        ModelParams::new(
            self.eta0.unwrap_or(0.0),
            self.coupling_k.unwrap_or(0.0),
            self.gamma.unwrap_or(0.0),
        )
        .with_lambda(self.lambda.unwrap_or(ResetRate::Infinite))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    pub label: String,
    pub kind: BifurcationKind,
    pub param: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisCase {
    pub source: String,
    pub system: Reduction,
    pub fixed: FixedParams,
    pub sweep: ContinuationParam,
    pub range: (f64, f64),
    pub entries: Vec<PointEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Codim2Entry {
    pub label: String,
    pub kind: BifurcationKind,
    pub param1: f64,
    pub param2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanCase {
    pub source: String,
    pub system: Reduction,
    pub fixed: FixedParams,
    pub param1: ContinuationParam,
    pub range1: (f64, f64),
    pub param2: ContinuationParam,
    pub grid: Grid,
    pub entries: Vec<Codim2Entry>,
}

/// Quantity compared next to the parameter in codimension-one tables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueColumn {
    #[default]
    FNr,
    RNr,
}

impl ValueColumn {
    fn name(self) -> &'static str {
        match self {
            Self::FNr => "f_nr",
            Self::RNr => "r_nr",
        }
    }

    fn of(self, p: &BifurcationPoint) -> f64 {
        match self {
            Self::FNr => p.f_nr,
            Self::RNr => p.r_nr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceTable {
    pub title: String,
    #[serde(default)]
    pub value: ValueColumn,
    /// Absolute tolerances per point kind, one per compared column.
    pub tolerances: BTreeMap<BifurcationKind, [f64; 2]>,
    #[serde(default)]
    pub analyses: Vec<AnalysisCase>,
    #[serde(default)]
    pub scans: Vec<ScanCase>,
}

impl ReferenceTable {
    pub fn entry_count(&self) -> usize {
        self.analyses.iter().map(|a| a.entries.len()).sum::<usize>()
            + self.scans.iter().map(|s| s.entries.len()).sum::<usize>()
    }

    fn tolerance(&self, kind: BifurcationKind) -> [f64; 2] {
        self.tolerances.get(&kind).copied().unwrap_or([0.0, 0.0])
    }
}

/// Parses the embedded reference tables.
pub fn reference_tables() -> Result<BTreeMap<String, ReferenceTable>> {
    Ok(serde_json::from_str(REFERENCE_JSON)?)
}

/// One compared entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub source: String,
    pub label: String,
    pub kind: BifurcationKind,
    pub reference: [f64; 2],
    pub computed: Option<[f64; 2]>,
    pub abs_error: Option<[f64; 2]>,
    pub tolerance: [f64; 2],
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReportRow {
    fn new(
        source: &str,
        label: &str,
        kind: BifurcationKind,
        reference: [f64; 2],
        computed: std::result::Result<[f64; 2], String>,
        tolerance: [f64; 2],
    ) -> Self {
        let (computed, abs_error, pass, note) = match computed {
            Ok(c) => {
                let err = [(c[0] - reference[0]).abs(), (c[1] - reference[1]).abs()];
                let pass = err[0] <= tolerance[0] && err[1] <= tolerance[1];
                (Some(c), Some(err), pass, None)
            }
            Err(msg) => (None, None, false, Some(msg)),
        };
        Self {
            source: source.to_string(),
            label: label.to_string(),
            kind,
            reference,
            computed,
            abs_error,
            tolerance,
            pass,
            note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: String,
    pub title: String,
    /// Names of the two compared columns.
    pub columns: [String; 2],
    pub rows: Vec<ReportRow>,
    pub elapsed_seconds: f64,
}

impl TableReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.pass).count()
    }

    /// Plain-text comparison table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let [c0, c1] = &self.columns;
        let _ = writeln!(out, "{}: {}", self.table, self.title);
        let _ = writeln!(
            out,
            "{:<46} {:<5} {:<5} {:>10} {:>10} {:>10} {:>10} {:>9} {:>9}  result",
            "case",
            "label",
            "kind",
            format!("ref {c0}"),
            format!("ref {c1}"),
            c0,
            c1,
            "err",
            "err",
        );
        for r in &self.rows {
            let kind = r.kind.to_string();
            let (c, e) = match (r.computed, r.abs_error) {
                (Some(c), Some(e)) => (
                    [format!("{:.4}", c[0]), format!("{:.4}", c[1])],
                    [format!("{:.1e}", e[0]), format!("{:.1e}", e[1])],
                ),
                _ => (["-".into(), "-".into()], ["-".into(), "-".into()]),
            };
            let _ = write!(
                out,
                "{:<46} {:<5} {:<5} {:>10.4} {:>10.4} {:>10} {:>10} {:>9} {:>9}  {}",
                r.source,
                r.label,
                kind,
                r.reference[0],
                r.reference[1],
                c[0],
                c[1],
                e[0],
                e[1],
                if r.pass { "PASS" } else { "FAIL" },
            );
            if let Some(note) = &r.note {
                let _ = write!(out, " ({note})");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{}/{} entries within tolerance, {:.1} s",
            self.passed(),
            self.rows.len(),
            self.elapsed_seconds
        );
        out
    }
}

fn normalized_distance(a: [f64; 2], b: [f64; 2], tol: [f64; 2]) -> f64 {
    let s0 = tol[0].max(1e-12);
    let s1 = tol[1].max(1e-12);
    ((a[0] - b[0]) / s0).abs().max(((a[1] - b[1]) / s1).abs())
}

fn nearest(
    candidates: &[[f64; 2]],
    reference: [f64; 2],
    tol: [f64; 2],
) -> std::result::Result<[f64; 2], String> {
    candidates
        .iter()
        .copied()
        .min_by(|a, b| {
            normalized_distance(*a, reference, tol)
                .total_cmp(&normalized_distance(*b, reference, tol))
        })
        .ok_or_else(|| "no point of this kind found".to_string())
}

/// Compares one codimension-one case against freshly computed points.
pub fn run_analysis(
    case: &AnalysisCase,
    value: ValueColumn,
    tolerances: &BTreeMap<BifurcationKind, [f64; 2]>,
    settings: &ContinuationSettings,
) -> Vec<ReportRow> {
    let computed = MeanFieldFamily::new(case.system, case.fixed.model(), case.sweep)
        .and_then(|fam| analyze_family(&fam, case.range, settings));
    let name = case.sweep.name();
    case.entries
        .iter()
        .map(|e| {
            let tol = tolerances.get(&e.kind).copied().unwrap_or([0.0, 0.0]);
            let reference = [e.param, e.value];
            let found = match &computed {
                Ok(a) => {
                    let pts: Vec<[f64; 2]> = a
                        .folds
                        .iter()
                        .chain(&a.hopf)
                        .filter(|p| p.kind == e.kind)
                        .filter_map(|p| Some([p.param(name)?, value.of(p)]))
                        .collect();
                    nearest(&pts, reference, tol)
                }
                Err(err) => Err(err.to_string()),
            };
            ReportRow::new(&case.source, &e.label, e.kind, reference, found, tol)
        })
        .collect()
}

/// Compares one codimension-two case against freshly computed points.
pub fn run_scan(
    case: &ScanCase,
    tolerances: &BTreeMap<BifurcationKind, [f64; 2]>,
    settings: &ContinuationSettings,
) -> Vec<ReportRow> {
    let base = MeanFieldFamily::new(case.system, case.fixed.model(), case.param1);
    let (n1, n2) = (case.param1.name(), case.param2.name());
    let run = |kind: BifurcationKind| -> Result<Vec<BifurcationPoint>> {
        let fam = *base
            .as_ref()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let make = |v: f64| Ok(fam.with_fixed(case.param2, v));
        let result = match kind {
            BifurcationKind::Cusp => scan_fold_curve(make, n2, case.range1, &case.grid, settings)?,
            BifurcationKind::BogdanovTakens => {
                scan_hopf_curve(make, n2, case.range1, &case.grid, settings)?
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "{other:?} is not a codimension-two point"
                )))
            }
        };
        Ok(result.codim2)
    };
    let mut by_kind: BTreeMap<BifurcationKind, std::result::Result<Vec<[f64; 2]>, String>> =
        BTreeMap::new();
    for e in &case.entries {
        by_kind.entry(e.kind).or_insert_with(|| {
            run(e.kind)
                .map(|pts| {
                    pts.iter()
                        .filter_map(|p| Some([p.param(n1)?, p.param(n2)?]))
                        .collect()
                })
                .map_err(|err| err.to_string())
        });
    }
    case.entries
        .iter()
        .map(|e| {
            let tol = tolerances.get(&e.kind).copied().unwrap_or([0.0, 0.0]);
            let reference = [e.param1, e.param2];
            let found = match &by_kind[&e.kind] {
                Ok(pts) => nearest(pts, reference, tol),
                Err(msg) => Err(msg.clone()),
            };
            ReportRow::new(&case.source, &e.label, e.kind, reference, found, tol)
        })
        .collect()
}

/// Normalizes a table identifier, rejecting unknown and out-of-scope tables.
pub fn check_table_id(id: &str) -> Result<String> {
    let key = id.trim().to_ascii_lowercase();
    match key.as_str() {
        "t5" => Err(Error::Unsupported(
            "limit-cycle bifurcations out of scope".into(),
        )),
        k if TABLE_IDS.contains(&k) => Ok(key),
        _ => Err(Error::InvalidParameter(format!(
            "unknown table {id:?} (expected one of t1..t6)"
        ))),
    }
}

/// Recomputes every entry of table `id` (`t1`…`t6`).
pub fn reproduce_table(id: &str, settings: &ContinuationSettings) -> Result<TableReport> {
    let key = check_table_id(id)?;
    let mut tables = reference_tables()?;
    let table = tables.remove(&key).ok_or_else(|| {
        Error::InvalidParameter(format!("unknown table {id:?} (expected one of t1..t6)"))
    })?;
    settings.validate()?;
    let start = Instant::now();

    let mut rows: Vec<ReportRow> = table
        .analyses
        .par_iter()
        .map(|case| run_analysis(case, table.value, &table.tolerances, settings))
        .flatten()
        .collect();
    let scan_rows: Vec<ReportRow> = table
        .scans
        .par_iter()
        .map(|case| run_scan(case, &table.tolerances, settings))
        .flatten()
        .collect();
    rows.extend(scan_rows);

    let columns = if table.scans.is_empty() {
        let sweep = table
            .analyses
            .first()
            .map(|a| a.sweep.name())
            .unwrap_or("param");
        let p = if table.analyses.iter().all(|a| a.sweep.name() == sweep) {
            sweep
        } else {
            "param"
        };
        [p.to_string(), table.value.name().to_string()]
    } else {
        ["param1".to_string(), "param2".to_string()]
    };
    debug_assert!(rows.iter().all(|r| r.tolerance == table.tolerance(r.kind)));
    Ok(TableReport {
        table: key,
        title: table.title,
        columns,
        rows,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_tables_parse() {
        let tables = reference_tables().unwrap();
        let ids: Vec<&str> = tables.keys().map(String::as_str).collect();
        assert_eq!(ids, ["t1", "t2", "t3", "t4", "t6"]);
        assert_eq!(tables["t1"].entry_count(), 55);
        assert_eq!(tables["t2"].entry_count(), 11);
        assert_eq!(tables["t4"].entry_count(), 9);
        assert_eq!(tables["t6"].value, ValueColumn::RNr);
        for t in tables.values() {
            for s in &t.scans {
                s.grid.validate().unwrap();
            }
        }
    }

    #[test]
    fn t5_is_out_of_scope() {
        let err = reproduce_table("t5", &ContinuationSettings::default()).unwrap_err();
        assert_eq!(err.to_string(), "limit-cycle bifurcations out of scope");
        assert!(err.is_config());
    }

    #[test]
    fn unknown_table_is_rejected() {
        assert!(matches!(
            reproduce_table("t9", &ContinuationSettings::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn nearest_uses_scaled_distance() {
        let pts = [[1.0, 0.5], [1.001, 0.1]];
        let got = nearest(&pts, [1.0, 0.1], [0.002, 0.001]).unwrap();
        assert_eq!(got, [1.001, 0.1]);
        assert!(nearest(&[], [0.0, 0.0], [1.0, 1.0]).is_err());
    }
}
