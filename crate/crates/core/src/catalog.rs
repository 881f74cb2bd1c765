//! The bundled list of all 218 non-isomorphic four-message instances together
//! with their tabulated sum-capacity results.
//!
//! Two plain-text files ship with the crate: `catalog_n4.txt` holds one
//! `Problem No K: <problem>` line per instance and `sum_rates_n4.tsv` holds
//! `K  numerator  denominator  class`. The table file starts with a sha256
//! line pinning the exact bytes of the problem list.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::problem::{parse_problem, Problem};

const CATALOG_TEXT: &str = include_str!("../data/catalog_n4.txt");
const TABLE_TEXT: &str = include_str!("../data/sum_rates_n4.tsv");

pub const CATALOG_SIZE: usize = 218;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("catalog corrupt: {0}")]
    Corrupt(String),
}

fn corrupt(msg: impl Into<String>) -> CatalogError {
    CatalogError::Corrupt(msg.into())
}

/// How an entry is typeset in the results table, i.e. which argument closed
/// the gap between inner and outer bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableClass {
    /// Polymatroidal bound matches.
    Normal,
    /// Closure-based sum-rate bound matches.
    Bold,
    /// Partitioned-`V` bound.
    Underlined,
    /// Further extensions of the closure bound.
    DoubleUnderlined,
    /// f-d separation bound.
    Overlined,
    /// Sum-capacity still open.
    OpenStar,
}

impl TableClass {
    pub const ALL: [TableClass; 6] = [
        TableClass::Normal,
        TableClass::Bold,
        TableClass::Underlined,
        TableClass::DoubleUnderlined,
        TableClass::Overlined,
        TableClass::OpenStar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableClass::Normal => "normal",
            TableClass::Bold => "bold",
            TableClass::Underlined => "underlined",
            TableClass::DoubleUnderlined => "double_underlined",
            TableClass::Overlined => "overlined",
            TableClass::OpenStar => "open_star",
        }
    }

    /// True for the classes whose matching outer bound is computed by this
    /// crate (polymatroidal or closure-based).
    pub fn closed_by_implemented_bounds(self) -> bool {
        matches!(self, TableClass::Normal | TableClass::Bold)
    }
}

impl fmt::Display for TableClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        TableClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown table class {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub problem_no: u32,
    pub problem: Problem,
    pub table_sum_rate: Rational64,
    pub table_class: TableClass,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// Loads the catalog compiled into the crate.
    pub fn bundled() -> Result<Catalog, CatalogError> {
        Catalog::parse(CATALOG_TEXT, TABLE_TEXT)
    }

    /// Parses and validates a problem list plus its results table.
    pub fn parse(problems_text: &str, table_text: &str) -> Result<Catalog, CatalogError> {
        let mut lines = table_text.lines();
        let header = lines.next().ok_or_else(|| corrupt("empty table file"))?;
        let expected = header
            .strip_prefix("# sha256 catalog_n4.txt ")
            .ok_or_else(|| corrupt("table file lacks checksum header"))?
            .trim();
        let actual = hex_digest(problems_text.as_bytes());
        if actual != expected {
            return Err(corrupt(format!(
                "problem list checksum {actual} does not match {expected}"
            )));
        }

        let mut table = BTreeMap::new();
        for (k, line) in lines.enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || corrupt(format!("table line {}: {line:?}", k + 2));
            if fields.len() != 4 {
                return Err(bad());
            }
            let no: u32 = fields[0].parse().map_err(|_| bad())?;
            let num: i64 = fields[1].parse().map_err(|_| bad())?;
            let den: i64 = fields[2].parse().map_err(|_| bad())?;
            let class: TableClass = fields[3].parse().map_err(|_| bad())?;
            if den <= 0 || num <= 0 {
                return Err(corrupt(format!("problem {no}: sum rate must be positive")));
            }
            if table
                .insert(no, (Rational64::new(num, den), class))
                .is_some()
            {
                return Err(corrupt(format!("duplicate table row for problem {no}")));
            }
        }

        let mut entries = Vec::with_capacity(CATALOG_SIZE);
        for line in problems_text.lines().filter(|l| !l.trim().is_empty()) {
            let rest = line
                .strip_prefix("Problem No ")
                .ok_or_else(|| corrupt(format!("unexpected line {line:?}")))?;
            let (no, text) = rest
                .split_once(':')
                .ok_or_else(|| corrupt(format!("unexpected line {line:?}")))?;
            let no: u32 = no
                .trim()
                .parse()
                .map_err(|_| corrupt(format!("bad problem number in {line:?}")))?;
            let problem = parse_problem(text).map_err(|e| corrupt(format!("problem {no}: {e}")))?;
            let (table_sum_rate, table_class) = table
                .remove(&no)
                .ok_or_else(|| corrupt(format!("problem {no} missing from table")))?;
            entries.push(CatalogEntry {
                problem_no: no,
                problem,
                table_sum_rate,
                table_class,
            });
        }
        if let Some(no) = table.keys().next() {
            return Err(corrupt(format!("table row {no} has no problem")));
        }
        if entries.len() != CATALOG_SIZE {
            return Err(corrupt(format!(
                "expected {CATALOG_SIZE} entries, found {}",
                entries.len()
            )));
        }
        for (k, e) in entries.iter().enumerate() {
            if e.problem_no as usize != k + 1 {
                return Err(corrupt(format!(
                    "entries out of order at position {}: problem {}",
                    k + 1,
                    e.problem_no
                )));
            }
            if e.problem.n() != 4 || e.table_sum_rate <= Rational64::zero() {
                return Err(corrupt(format!("problem {} has wrong shape", e.problem_no)));
            }
        }
        Ok(Catalog { entries })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, problem_no: u32) -> Option<&CatalogEntry> {
        self.entries.get((problem_no as usize).checked_sub(1)?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter()
    }

    /// The catalog line for an entry, as in the bundled list.
    pub fn render_line(entry: &CatalogEntry) -> String {
        format!("Problem No {}: {}", entry.problem_no, entry.problem)
    }

    pub fn raw_problem_list() -> &'static str {
        CATALOG_TEXT
    }
}

/// Shorthand for [`Catalog::bundled`].
pub fn load_catalog() -> Result<Catalog, CatalogError> {
    Catalog::bundled()
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
