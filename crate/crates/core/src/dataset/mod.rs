//! Tabular data loading, schema inference and per-attribute summaries.

mod lexicon;

pub use lexicon::{build_lexicon, ClearTarget, Keyword, Lexicon, LexiconEntry, OperationClass, Referent, VisualFlag};

use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("empty input")]
    EmptyInput,
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("duplicate attribute name '{0}'")]
    DuplicateAttribute(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Categorical,
    Quantitative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Distinct values in first-appearance order.
    Categorical { values: Vec<String> },
    /// `None` when every cell is missing.
    Quantitative { interval: Option<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    pub domain: Domain,
    pub aliases: Vec<String>,
}

impl AttributeSchema {
    pub fn is_quantitative(&self) -> bool {
        self.kind == AttributeKind::Quantitative
    }

    pub fn categories(&self) -> &[String] {
        match &self.domain {
            Domain::Categorical { values } => values,
            Domain::Quantitative { .. } => &[],
        }
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        match self.domain {
            Domain::Quantitative { interval } => interval,
            Domain::Categorical { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
    Missing,
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            header: true,
        }
    }
}

/// Rows are stored column-aligned with `schema`; a row's id is its index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<AttributeSchema>,
    rows: Vec<Vec<Value>>,
}

impl Dataset {
    /// Builds a dataset from raw cells, inferring the schema.
    pub fn from_cells(names: Vec<String>, cells: Vec<Vec<String>>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.to_lowercase()) {
                return Err(DatasetError::DuplicateAttribute(name.clone()));
            }
        }
        for (row, r) in cells.iter().enumerate() {
            if r.len() != names.len() {
                return Err(DatasetError::RaggedRow {
                    row,
                    expected: names.len(),
                    found: r.len(),
                });
            }
        }

        let mut kinds = Vec::with_capacity(names.len());
        for col in 0..names.len() {
            let numeric = cells
                .iter()
                .map(|r| r[col].as_str())
                .filter(|c| !is_missing_cell(c))
                .all(|c| parse_number(c).is_some());
            kinds.push(if numeric {
                AttributeKind::Quantitative
            } else {
                AttributeKind::Categorical
            });
        }

        let rows: Vec<Vec<Value>> = cells
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .zip(&kinds)
                    .map(|(cell, kind)| {
                        if is_missing_cell(&cell) {
                            Value::Missing
                        } else if *kind == AttributeKind::Quantitative {
                            Value::Number(parse_number(&cell).expect("checked numeric"))
                        } else {
                            Value::Text(cell.trim().to_string())
                        }
                    })
                    .collect()
            })
            .collect();

        let schema = names
            .into_iter()
            .zip(kinds)
            .enumerate()
            .map(|(col, (name, kind))| {
                let domain = infer_domain(kind, rows.iter().map(|r| &r[col]));
                let aliases = attribute_aliases(&name);
                AttributeSchema {
                    name,
                    kind,
                    domain,
                    aliases,
                }
            })
            .collect();

        Ok(Self { schema, rows })
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_ids(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.rows.len() as u32
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        let lower = name.to_lowercase();
        self.schema.iter().position(|a| a.name.to_lowercase() == lower)
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeSchema> {
        self.attribute_index(name).map(|i| &self.schema[i])
    }

    pub fn value(&self, row_id: u32, attribute: usize) -> &Value {
        &self.rows[row_id as usize][attribute]
    }

    pub fn value_by_name(&self, row_id: u32, name: &str) -> Option<&Value> {
        self.attribute_index(name).map(|i| self.value(row_id, i))
    }

    pub fn number(&self, row_id: u32, attribute: usize) -> Option<f64> {
        self.value(row_id, attribute).as_number()
    }

    /// Human-readable label for tooltips: the first categorical attribute with
    /// all-distinct values, falling back to the row id.
    pub fn label_for(&self, row_id: u32) -> String {
        let label_col = self
            .schema
            .iter()
            .position(|a| a.kind == AttributeKind::Categorical && a.categories().len() == self.rows.len());
        match label_col.map(|c| self.value(row_id, c)) {
            Some(Value::Text(s)) => s.clone(),
            _ => format!("#{row_id}"),
        }
    }

    pub fn stats(&self) -> Vec<AttributeStats> {
        compute_stats(self)
    }

    /// Schema and stats as the JSON document consumed by the attribute panel.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows.len(),
            "schema": self.schema,
            "stats": self.stats(),
        })
    }
}

pub fn load_csv<R: Read>(source: R, options: CsvOptions) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .from_reader(source);

    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r?,
        None => return Err(DatasetError::EmptyInput),
    };
    let width = first.len();
    let (names, mut cells) = if options.header {
        let names = first.iter().map(|s| s.trim().to_string()).collect();
        (names, Vec::new())
    } else {
        let names = (0..width).map(|i| format!("Column {}", i + 1)).collect();
        (names, vec![first.iter().map(str::to_string).collect()])
    };

    for record in records {
        let record = record?;
        if record.len() != width {
            return Err(DatasetError::RaggedRow {
                row: cells.len(),
                expected: width,
                found: record.len(),
            });
        }
        cells.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    Dataset::from_cells(names, cells)
}

pub fn is_missing_cell(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t == "NA"
}

/// Parses a plain or thousands-separated number ("30,000").
pub fn parse_number(cell: &str) -> Option<f64> {
    let t = cell.trim();
    if t.is_empty() {
        return None;
    }
    if t.contains(',') {
        let mut groups = t.split(',');
        let head = groups.next()?;
        let head_digits = head.trim_start_matches(['-', '+']);
        if head_digits.is_empty() || head_digits.len() > 3 || !head_digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let rest: Vec<&str> = groups.collect();
        for (i, g) in rest.iter().enumerate() {
            let int_part = if i + 1 == rest.len() {
                g.split('.').next().unwrap_or("")
            } else {
                g
            };
            if int_part.len() != 3 || !int_part.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
        }
        return t.replace(',', "").parse::<f64>().ok().filter(|v| v.is_finite());
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn infer_domain<'a>(kind: AttributeKind, values: impl Iterator<Item = &'a Value>) -> Domain {
    match kind {
        AttributeKind::Quantitative => {
            let interval = values.filter_map(Value::as_number).fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
            });
            Domain::Quantitative { interval }
        }
        AttributeKind::Categorical => {
            let mut seen = HashSet::new();
            let values = values
                .filter_map(Value::as_text)
                .filter(|v| seen.insert(v.to_string()))
                .map(str::to_string)
                .collect();
            Domain::Categorical { values }
        }
    }
}

/// Lowercase alias variants: underscore/space forms and singular/plural.
fn attribute_aliases(name: &str) -> Vec<String> {
    let base = name
        .to_lowercase()
        .replace(['_', '-'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    let mut out = vec![base.clone()];
    let push = |out: &mut Vec<String>, s: String| {
        if !s.is_empty() && !out.contains(&s) {
            out.push(s);
        }
    };
    push(&mut out, base.replace(' ', "_"));
    if let Some(stripped) = base.strip_suffix('s').filter(|_| !base.ends_with("ss")) {
        push(&mut out, stripped.to_string());
    } else {
        push(&mut out, format!("{base}s"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttributeStats {
    Quantitative {
        attribute: String,
        /// `None` for all-missing columns (degenerate).
        min: Option<f64>,
        max: Option<f64>,
        mean: Option<f64>,
        count: usize,
    },
    Categorical {
        attribute: String,
        counts: BTreeMap<String, usize>,
    },
}

impl AttributeStats {
    pub fn attribute(&self) -> &str {
        match self {
            AttributeStats::Quantitative { attribute, .. } | AttributeStats::Categorical { attribute, .. } => attribute,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match self {
            AttributeStats::Quantitative { count, .. } => *count == 0,
            AttributeStats::Categorical { counts, .. } => counts.is_empty(),
        }
    }
}

pub fn compute_stats(dataset: &Dataset) -> Vec<AttributeStats> {
    dataset
        .schema
        .iter()
        .enumerate()
        .map(|(col, attr)| {
            let column = dataset.rows.iter().map(|r| &r[col]);
            match attr.kind {
                AttributeKind::Quantitative => {
                    let nums: Vec<f64> = column.filter_map(Value::as_number).collect();
                    let count = nums.len();
                    let min = nums.iter().copied().reduce(f64::min);
                    let max = nums.iter().copied().reduce(f64::max);
                    let mean = (count > 0).then(|| nums.iter().sum::<f64>() / count as f64);
                    AttributeStats::Quantitative {
                        attribute: attr.name.clone(),
                        min,
                        max,
                        mean,
                        count,
                    }
                }
                AttributeKind::Categorical => {
                    let mut counts = BTreeMap::new();
                    for v in column.filter_map(Value::as_text) {
                        *counts.entry(v.to_string()).or_insert(0) += 1;
                    }
                    AttributeStats::Categorical {
                        attribute: attr.name.clone(),
                        counts,
                    }
                }
            }
        })
        .collect()
}

/// The bundled synthetic colleges table used by tests, demos and the CLI default.
pub const COLLEGES_CSV: &str = include_str!("../../data/colleges.csv");

pub fn colleges() -> Dataset {
    load_csv(COLLEGES_CSV.as_bytes(), CsvOptions::default()).expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Dataset, DatasetError> {
        load_csv(text.as_bytes(), CsvOptions::default())
    }

    #[test]
    fn infers_kinds_on_small_fixture() {
        let ds = load(
            "Name,Region,SAT\n\
             Alder,Far West,1200\n\
             Bexley,New England,1350\n\
             Carrow,Far West,\n\
             Dunmore,Plains,1010\n\
             Elkhart,New England,NA\n",
        )
        .unwrap();
        let kinds: Vec<_> = ds.schema().iter().map(|a| a.kind).collect();
        assert_eq!(
            kinds,
            vec![
                AttributeKind::Categorical,
                AttributeKind::Categorical,
                AttributeKind::Quantitative
            ]
        );
        assert_eq!(ds.schema()[2].interval(), Some((1010.0, 1350.0)));
        assert_eq!(ds.schema()[1].categories(), &["Far West", "New England", "Plains"]);
        assert!(ds.value(2, 2).is_missing());
    }

    #[test]
    fn one_text_cell_forces_categorical() {
        let ds = load("v\n1\n2\nx\n").unwrap();
        assert_eq!(ds.schema()[0].kind, AttributeKind::Categorical);
    }

    #[test]
    fn empty_stream_is_an_error() {
        let err = load("").unwrap_err();
        assert_eq!(err.to_string(), "empty input");
    }

    #[test]
    fn ragged_row_reports_index() {
        match load("a,b\n1,2\n3\n") {
            Err(DatasetError::RaggedRow { row, .. }) => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_names_rejected_case_insensitively() {
        assert!(matches!(
            load("Cost,cost\n1,2\n"),
            Err(DatasetError::DuplicateAttribute(_))
        ));
    }

    #[test]
    fn thousands_separators() {
        assert_eq!(parse_number("30,000"), Some(30000.0));
        assert_eq!(parse_number("1,234,567.5"), Some(1234567.5));
        assert_eq!(parse_number("3,00"), None);
        assert_eq!(parse_number("abc"), None);
        let ds = load("Population\n\"19,350\"\n940\n").unwrap();
        assert_eq!(ds.number(0, 0), Some(19350.0));
    }

    #[test]
    fn headerless_files_get_generated_names() {
        let ds = load_csv(
            "1;a\n2;b\n".as_bytes(),
            CsvOptions {
                delimiter: b';',
                header: false,
            },
        )
        .unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.schema()[0].name, "Column 1");
    }

    #[test]
    fn stats_match_hand_computation() {
        let ds = load("q,c,m\n10,a,\n20,a,\n30,b,\n").unwrap();
        let stats = ds.stats();
        assert_eq!(
            stats[0],
            AttributeStats::Quantitative {
                attribute: "q".into(),
                min: Some(10.0),
                max: Some(30.0),
                mean: Some(20.0),
                count: 3
            }
        );
        match &stats[1] {
            AttributeStats::Categorical { counts, .. } => {
                assert_eq!(counts.get("a"), Some(&2));
                assert_eq!(counts.get("b"), Some(&1));
            }
            other => panic!("{other:?}"),
        }
        // an all-missing column infers as quantitative with no interval
        assert!(stats[2].is_degenerate());
        assert_eq!(ds.schema()[2].interval(), None);
    }

    #[test]
    fn stats_are_deterministic() {
        let ds = colleges();
        assert_eq!(ds.stats(), ds.stats());
    }

    #[test]
    fn aliases_cover_plural_and_underscore() {
        let a = attribute_aliases("Average Cost");
        assert!(a.contains(&"average cost".to_string()));
        assert!(a.contains(&"average_cost".to_string()));
        assert!(a.contains(&"average costs".to_string()));
        let b = attribute_aliases("Expenditures");
        assert!(b.contains(&"expenditure".to_string()));
    }

    #[test]
    fn bundled_fixture_shape() {
        let ds = colleges();
        assert!(ds.len() >= 100);
        assert!(ds.schema().len() >= 8);
        for name in [
            "Region",
            "Locale",
            "Control",
            "SAT Average",
            "Average Cost",
            "Median Debt",
            "Admission Rate",
            "Population",
            "Median Earnings",
            "Expenditure",
        ] {
            assert!(ds.attribute(name).is_some(), "{name}");
        }
        assert!(ds.attribute("population").unwrap().is_quantitative());
        assert_eq!(ds.label_for(0), "Stanford University");
    }

    #[test]
    fn reinference_is_idempotent() {
        let ds = colleges();
        let names = ds.schema().iter().map(|a| a.name.clone()).collect();
        let cells = ds
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| match v {
                        Value::Number(n) => n.to_string(),
                        Value::Text(s) => s.clone(),
                        Value::Missing => String::new(),
                    })
                    .collect()
            })
            .collect();
        let again = Dataset::from_cells(names, cells).unwrap();
        assert_eq!(again.schema(), ds.schema());
    }
}
