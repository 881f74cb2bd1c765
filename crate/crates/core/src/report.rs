//! Per-problem bound reports and the catalog sweep.

use std::fmt::Write as _;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{CatalogEntry, TableClass};
use crate::inner::{distributed_cc_allserver, InnerError, InnerOptions};
use crate::outer::{best_outer, Grounding, OuterError};
use crate::problem::{CapacityProfile, Problem};
use crate::subset::Subset;

/// Inner and outer bounds closer than this establish the sum capacity.
pub const ESTABLISHED_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("problem {problem_no}: {source}")]
    Inner {
        problem_no: u32,
        #[source]
        source: InnerError,
    },
    #[error("problem {problem_no}: {source}")]
    Outer {
        problem_no: u32,
        #[source]
        source: OuterError,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    SumCapacityEstablished,
    /// Bounds differ and the instance is not known to be open.
    Gap,
    /// Bounds differ on an instance whose sum capacity is not settled by any
    /// known bound.
    Open,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::SumCapacityEstablished => "sum_capacity_established",
            Classification::Gap => "gap",
            Classification::Open => "open",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub problem_no: Option<u32>,
    pub problem_text: String,
    pub inner: f64,
    pub inner_rational: Option<Rational64>,
    /// Non-enhanced all-server sum rate, when requested.
    pub inner_nonenhanced: Option<f64>,
    pub thm1: f64,
    pub thm1_rational: Option<Rational64>,
    pub thm1_grounding: Grounding,
    pub thm2: Option<Rational64>,
    pub thm2_u: Subset,
    pub thm2_v: Option<Subset>,
    pub v_minimality_differs: bool,
    pub best_outer: f64,
    pub best_outer_rational: Option<Rational64>,
    pub classification: Classification,
    pub table_expected: Option<Rational64>,
    pub table_class: Option<TableClass>,
    pub table_match: Option<bool>,
}

impl BoundReport {
    pub fn gap(&self) -> f64 {
        self.best_outer - self.inner
    }

    pub fn thm1_tight(&self) -> bool {
        (self.thm1 - self.inner).abs() <= ESTABLISHED_TOLERANCE
    }

    /// The closure bound meets the inner bound where the polymatroid LP does not.
    pub fn thm2_rescues(&self) -> bool {
        !self.thm1_tight() && self.classification == Classification::SumCapacityEstablished
    }

    pub fn enhancement_gain(&self) -> Option<f64> {
        self.inner_nonenhanced.map(|v| self.inner - v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub inner: InnerOptions,
    pub grounding: Grounding,
    pub with_nonenhanced: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            inner: InnerOptions::default(),
            grounding: Grounding::Whole,
            with_nonenhanced: false,
        }
    }
}

fn r2f(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Bounds for an arbitrary problem and capacity profile. `known_open` marks
/// instances whose sum capacity is known to be beyond the implemented bounds.
pub fn bound_report(
    p: &Problem,
    caps: &CapacityProfile,
    known_open: bool,
    opts: &ReportOptions,
) -> Result<BoundReport, ReportError> {
    let no = 0;
    let inner = distributed_cc_allserver(p, caps, true, &opts.inner).map_err(|source| {
        ReportError::Inner {
            problem_no: no,
            source,
        }
    })?;
    let inner_nonenhanced = if opts.with_nonenhanced {
        Some(
            distributed_cc_allserver(p, caps, false, &opts.inner)
                .map_err(|source| ReportError::Inner {
                    problem_no: no,
                    source,
                })?
                .value,
        )
    } else {
        None
    };
    let outer = best_outer(p, caps, opts.grounding, &opts.inner.solver).map_err(|source| {
        ReportError::Outer {
            problem_no: no,
            source,
        }
    })?;

    let classification = if (inner.value - outer.best).abs() <= ESTABLISHED_TOLERANCE {
        Classification::SumCapacityEstablished
    } else if known_open {
        Classification::Open
    } else {
        Classification::Gap
    };
    Ok(BoundReport {
        problem_no: None,
        problem_text: p.to_string(),
        inner: inner.value,
        inner_rational: inner.rational_value,
        inner_nonenhanced,
        thm1: outer.thm1.value,
        thm1_rational: outer.thm1.rational_value,
        thm1_grounding: outer.thm1.grounding,
        thm2: outer.thm2.value(),
        thm2_u: outer.thm2.u,
        thm2_v: outer.thm2.best.as_ref().map(|w| w.v),
        v_minimality_differs: outer.thm2.minimality_differs,
        best_outer: outer.best,
        best_outer_rational: outer.best_rational,
        classification,
        table_expected: None,
        table_class: None,
        table_match: None,
    })
}

/// Report for a catalog entry under unit capacities, checked against the
/// tabulated sum rate.
pub fn catalog_report(
    entry: &CatalogEntry,
    opts: &ReportOptions,
) -> Result<BoundReport, ReportError> {
    let p = &entry.problem;
    let caps = CapacityProfile::uniform(p.n(), Rational64::from(1));
    let known_open = entry.table_class == TableClass::OpenStar;
    let mut r = bound_report(p, &caps, known_open, opts).map_err(|e| match e {
        ReportError::Inner { source, .. } => ReportError::Inner {
            problem_no: entry.problem_no,
            source,
        },
        ReportError::Outer { source, .. } => ReportError::Outer {
            problem_no: entry.problem_no,
            source,
        },
        other => other,
    })?;
    let expected = entry.table_sum_rate;
    r.problem_no = Some(entry.problem_no);
    r.table_expected = Some(expected);
    r.table_class = Some(entry.table_class);
    r.table_match = Some((r.inner - r2f(expected)).abs() <= ESTABLISHED_TOLERANCE);
    Ok(r)
}

/// Reports for many entries, in input order. A failing entry does not stop
/// the others. `jobs = 0` uses rayon's default pool size.
pub fn sweep(
    entries: &[&CatalogEntry],
    opts: &ReportOptions,
    jobs: usize,
) -> Result<Vec<Result<BoundReport, ReportError>>, ReportError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ReportError::Pool(e.to_string()))?;
    Ok(pool.install(|| {
        entries
            .par_iter()
            .map(|e| catalog_report(e, opts))
            .collect()
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub problems: usize,
    pub table_matches: usize,
    pub thm1_matches: usize,
    pub thm2_rescues: usize,
    pub established: usize,
    /// Problems whose bounds do not meet, open ones included.
    pub gaps: Vec<u32>,
    pub open: Vec<u32>,
    /// Problems where enhancement strictly raises the sum rate, if computed.
    pub enhancement_separations: Option<Vec<u32>>,
}

pub fn summarize(reports: &[BoundReport]) -> SweepSummary {
    let count = |f: &dyn Fn(&BoundReport) -> bool| reports.iter().filter(|r| f(r)).count();
    let numbers = |f: &dyn Fn(&BoundReport) -> bool| -> Vec<u32> {
        reports
            .iter()
            .filter(|r| f(r))
            .filter_map(|r| r.problem_no)
            .collect()
    };
    let separations = reports
        .iter()
        .all(|r| r.inner_nonenhanced.is_some())
        .then(|| {
            reports
                .iter()
                .filter(|r| r.enhancement_gain().unwrap_or(0.0) > ESTABLISHED_TOLERANCE)
                .filter_map(|r| r.problem_no)
                .collect()
        });
    SweepSummary {
        problems: reports.len(),
        table_matches: count(&|r| r.table_match == Some(true)),
        thm1_matches: count(&|r| r.thm1_tight()),
        thm2_rescues: count(&|r| r.thm2_rescues()),
        established: count(&|r| r.classification == Classification::SumCapacityEstablished),
        gaps: numbers(&|r| r.classification != Classification::SumCapacityEstablished),
        open: numbers(&|r| r.classification == Classification::Open),
        enhancement_separations: separations,
    }
}

fn opt_rational(r: Option<Rational64>) -> String {
    r.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub const CSV_HEADER: &str = "problem_no,problem,inner,inner_rational,inner_nonenhanced,thm1,thm1_rational,thm2,thm2_u,thm2_v,best_outer,classification,table_expected,table_class,table_match";

pub fn to_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},\"{}\",{:.6},{},{},{:.6},{},{},\"{}\",\"{}\",{:.6},{},{},{},{}",
            r.problem_no.map(|x| x.to_string()).unwrap_or_default(),
            r.problem_text,
            r.inner,
            opt_rational(r.inner_rational),
            opt_f(r.inner_nonenhanced),
            r.thm1,
            opt_rational(r.thm1_rational),
            opt_rational(r.thm2),
            r.thm2_u,
            r.thm2_v.map(|v| v.to_string()).unwrap_or_default(),
            r.best_outer,
            r.classification.as_str(),
            opt_rational(r.table_expected),
            r.table_class.map(|c| c.as_str()).unwrap_or(""),
            r.table_match.map(|m| m.to_string()).unwrap_or_default(),
        );
    }
    out
}

pub fn to_text(reports: &[BoundReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}  {:>12}  {:>12}  {:>8}  {:>12}  {:<24}  table",
        "no", "inner", "thm1", "thm2", "best", "class"
    );
    for r in reports {
        let table = match (r.table_expected, r.table_match) {
            (Some(t), Some(true)) => format!("{t} ok"),
            (Some(t), _) => format!("{t} MISMATCH"),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{:>4}  {:>12.6}  {:>12.6}  {:>8}  {:>12.6}  {:<24}  {}",
            r.problem_no
                .map(|x| x.to_string())
                .unwrap_or_else(|| "-".into()),
            r.inner,
            r.thm1,
            r.thm2.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
            r.best_outer,
            r.classification.as_str(),
            table
        );
    }
    out
}

pub fn summary_text(s: &SweepSummary) -> String {
    let join = |v: &[u32]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = format!(
        "problems: {}\ntable matches: {}\nthm1 matches: {}\nthm2 rescues: {}\nestablished: {}\ngaps: {} [{}]\nopen: {} [{}]\n",
        s.problems,
        s.table_matches,
        s.thm1_matches,
        s.thm2_rescues,
        s.established,
        s.gaps.len(),
        join(&s.gaps),
        s.open.len(),
        join(&s.open),
    );
    if let Some(sep) = &s.enhancement_separations {
        let _ = writeln!(
            out,
            "enhancement separations: {} [{}]",
            sep.len(),
            join(sep)
        );
    }
    out
}
