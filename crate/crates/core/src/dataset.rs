//! Information systems, decision systems and their ingestion.
//!
//! Values are stored as per-column dictionary codes so that every equality
//! test in the rough inclusions is an integer comparison. Object ids are
//! 0-based row indices.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

/// Token stored for cells equal to the configured NA sentinel.
pub const NA_VALUE: &str = "NA";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("input has no header row")]
    NoHeader,
    #[error("duplicate feature `{name}` at column {column}")]
    DuplicateFeature { name: String, column: usize },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow { line: u64, expected: usize, found: usize },
    #[error("line {line}, column `{column}`: missing value")]
    MissingValue { line: u64, column: String },
    #[error("decision column `{0}` not found in header")]
    MissingDecisionColumn(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("object {object}, column `{column}`: `{value}` is not a finite number")]
    NonNumeric {
        object: usize,
        column: String,
        value: String,
    },
    #[error("number of bins must be at least 1")]
    ZeroBins,
    #[error("unknown object id {0}")]
    UnknownObject(usize),
    #[error("row has {found} values, system has {expected} features")]
    RowArity { expected: usize, found: usize },
    #[error("decision system needs at least one conditional feature")]
    NoConditionalFeatures,
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;

/// Ingestion options.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Cells equal to this token are kept as [`NA_VALUE`] instead of
    /// rejected. Empty cells are always rejected.
    pub na_token: Option<String>,
}

/// Header plus string cells, before any typing.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl RawTable {
    pub fn from_reader<R: Read>(reader: R, opts: &LoadOptions) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = match records.next() {
            Some(rec) => rec.map_err(csv_err)?,
            None => return Err(DataError::NoHeader),
        };
        let headers: Vec<String> = header.iter().map(str::to_string).collect();
        if headers.iter().all(|h| h.is_empty()) {
            return Err(DataError::NoHeader);
        }
        for (i, h) in headers.iter().enumerate() {
            if headers[..i].contains(h) {
                return Err(DataError::DuplicateFeature {
                    name: h.clone(),
                    column: i + 1,
                });
            }
        }
        let mut rows = Vec::new();
        for rec in records {
            let rec = rec.map_err(csv_err)?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            // blank lines are skipped by the csv reader; a lone empty field is a blank line too
            if rec.len() == 1 && rec[0].is_empty() {
                continue;
            }
            if rec.len() != headers.len() {
                return Err(DataError::RaggedRow {
                    line,
                    expected: headers.len(),
                    found: rec.len(),
                });
            }
            let mut row = Vec::with_capacity(rec.len());
            for (j, cell) in rec.iter().enumerate() {
                let value = if cell.is_empty() {
                    return Err(DataError::MissingValue {
                        line,
                        column: headers[j].clone(),
                    });
                } else if opts.na_token.as_deref() == Some(cell) {
                    NA_VALUE.to_string()
                } else if cell == "?" {
                    return Err(DataError::MissingValue {
                        line,
                        column: headers[j].clone(),
                    });
                } else {
                    cell.to_string()
                };
                row.push(value);
            }
            rows.push(row);
        }
        Ok(RawTable { headers, rows })
    }

    pub fn from_path(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_reader(std::io::BufReader::new(file), opts)
    }
}

fn csv_err(e: csv::Error) -> DataError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    DataError::Csv {
        line,
        message: e.to_string(),
    }
}

/// Code ↔ token dictionary of one column.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Dictionary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Dictionary {
    fn intern(&mut self, token: &str) -> u32 {
        if let Some(&c) = self.index.get(token) {
            return c;
        }
        let c = self.tokens.len() as u32;
        self.tokens.push(token.to_string());
        self.index.insert(token.to_string(), c);
        c
    }
}

/// An object × feature table of discrete value tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationSystem {
    features: Vec<String>,
    dictionaries: Vec<Dictionary>,
    /// Row-major codes, `n_objects * n_features`.
    codes: Vec<u32>,
    n_objects: usize,
}

impl InformationSystem {
    /// Builds a total table. Rows must all have one value per feature.
    pub fn new<S: AsRef<str>>(features: Vec<String>, rows: &[Vec<S>]) -> Result<Self> {
        for (i, f) in features.iter().enumerate() {
            if features[..i].contains(f) {
                return Err(DataError::DuplicateFeature {
                    name: f.clone(),
                    column: i + 1,
                });
            }
        }
        let mut dictionaries = vec![Dictionary::default(); features.len()];
        let mut codes = Vec::with_capacity(rows.len() * features.len());
        for row in rows {
            if row.len() != features.len() {
                return Err(DataError::RowArity {
                    expected: features.len(),
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                codes.push(dictionaries[j].intern(v.as_ref()));
            }
        }
        Ok(InformationSystem {
            features,
            dictionaries,
            codes,
            n_objects: rows.len(),
        })
    }

    /// Convenience constructor for literal tables in tests and demos.
    pub fn from_rows(features: &[&str], rows: &[&[&str]]) -> Result<Self> {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        Self::new(features.iter().map(|s| s.to_string()).collect(), &rows)
    }

    pub fn from_raw(raw: &RawTable) -> Result<Self> {
        Self::new(raw.headers.clone(), &raw.rows)
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    /// Dictionary codes of one object, one per feature.
    pub fn row(&self, object: usize) -> &[u32] {
        let f = self.features.len();
        &self.codes[object * f..(object + 1) * f]
    }

    pub fn code(&self, object: usize, feature: usize) -> u32 {
        self.codes[object * self.features.len() + feature]
    }

    pub fn value(&self, object: usize, feature: usize) -> &str {
        self.token(feature, self.code(object, feature))
    }

    pub fn token(&self, feature: usize, code: u32) -> &str {
        &self.dictionaries[feature].tokens[code as usize]
    }

    /// Code of a token in a feature's dictionary, if the token was ever seen.
    pub fn lookup(&self, feature: usize, token: &str) -> Option<u32> {
        self.dictionaries[feature].index.get(token).copied()
    }

    /// Distinct tokens observed in a feature.
    pub fn value_set(&self, feature: usize) -> &[String] {
        &self.dictionaries[feature].tokens
    }

    pub fn row_tokens(&self, object: usize) -> Vec<&str> {
        (0..self.n_features()).map(|f| self.value(object, f)).collect()
    }

    fn check_object(&self, object: usize) -> Result<()> {
        if object < self.n_objects {
            Ok(())
        } else {
            Err(DataError::UnknownObject(object))
        }
    }

    /// Features on which `x` and `y` take different values.
    pub fn dis(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        self.check_object(x)?;
        self.check_object(y)?;
        Ok(self
            .row(x)
            .iter()
            .zip(self.row(y))
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(f, _)| f)
            .collect())
    }

    /// `|Dis(x, y)|` without bounds checks beyond slice indexing.
    pub fn dis_count(&self, x: usize, y: usize) -> usize {
        dis_count(self.row(x), self.row(y))
    }

    /// `|F ∖ Dis(x, y)| / |F|`. An empty feature set yields 1.
    pub fn ind_fraction(&self, x: usize, y: usize) -> Result<f64> {
        self.check_object(x)?;
        self.check_object(y)?;
        let f = self.n_features();
        if f == 0 {
            return Ok(1.0);
        }
        Ok((f - self.dis_count(x, y)) as f64 / f as f64)
    }

    /// Sub-table over the given objects, renumbered in the given order.
    /// Dictionaries are shared, so codes stay comparable with `self`.
    pub fn select_rows(&self, objects: &[usize]) -> Self {
        let mut codes = Vec::with_capacity(objects.len() * self.n_features());
        for &o in objects {
            codes.extend_from_slice(self.row(o));
        }
        InformationSystem {
            features: self.features.clone(),
            dictionaries: self.dictionaries.clone(),
            codes,
            n_objects: objects.len(),
        }
    }

    /// Appends a column given as one token per object.
    pub fn with_column(&self, name: &str, tokens: &[&str]) -> Result<Self> {
        if self.feature_index(name).is_some() {
            return Err(DataError::DuplicateFeature {
                name: name.to_string(),
                column: self.n_features() + 1,
            });
        }
        if tokens.len() != self.n_objects {
            return Err(DataError::RowArity {
                expected: self.n_objects,
                found: tokens.len(),
            });
        }
        let rows: Vec<Vec<&str>> = (0..self.n_objects)
            .map(|o| {
                let mut r = self.row_tokens(o);
                r.push(tokens[o]);
                r
            })
            .collect();
        let mut features = self.features.clone();
        features.push(name.to_string());
        Self::new(features, &rows)
    }

    /// Replaces the named numeric columns by equal-frequency bin labels
    /// `B0 .. B{bins-1}`; see [`equal_frequency_bins`].
    pub fn discretize(&self, columns: &[&str], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(DataError::ZeroBins);
        }
        let mut out = self.clone();
        for &name in columns {
            let f = self
                .feature_index(name)
                .ok_or_else(|| DataError::UnknownFeature(name.to_string()))?;
            let mut values = Vec::with_capacity(self.n_objects);
            for o in 0..self.n_objects {
                let tok = self.value(o, f);
                match tok.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        return Err(DataError::NonNumeric {
                            object: o,
                            column: name.to_string(),
                            value: tok.to_string(),
                        })
                    }
                }
            }
            let labels = equal_frequency_bins(&values, bins);
            let mut dict = Dictionary::default();
            for (o, b) in labels.into_iter().enumerate() {
                out.codes[o * self.n_features() + f] = dict.intern(&format!("B{b}"));
            }
            out.dictionaries[f] = dict;
        }
        Ok(out)
    }
}

/// Count of positions where two code rows differ.
pub fn dis_count<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Equal-frequency bin index per value.
///
/// Values are ranked ascending; rank `k` of `n` falls in bin
/// `floor(k * bins / n)`. A run of tied values takes the bin of its first
/// (lowest) rank.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0; n];
    let mut k = 0;
    while k < n {
        let bin = k * bins / n;
        let v = values[order[k]];
        while k < n && values[order[k]] == v {
            out[order[k]] = bin;
            k += 1;
        }
    }
    out
}

/// An information system with a distinguished decision feature that is
/// not among the conditional features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionSystem {
    base: InformationSystem,
    decision_name: String,
    decision: Vec<u32>,
    decision_values: Vec<String>,
}

impl DecisionSystem {
    pub fn new<S: AsRef<str>>(base: InformationSystem, decision_name: &str, decisions: &[S]) -> Result<Self> {
        if base.feature_index(decision_name).is_some() {
            return Err(DataError::DuplicateFeature {
                name: decision_name.to_string(),
                column: base.n_features() + 1,
            });
        }
        if decisions.len() != base.n_objects() {
            return Err(DataError::RowArity {
                expected: base.n_objects(),
                found: decisions.len(),
            });
        }
        let mut dict = Dictionary::default();
        let decision = decisions.iter().map(|d| dict.intern(d.as_ref())).collect();
        Ok(DecisionSystem {
            base,
            decision_name: decision_name.to_string(),
            decision,
            decision_values: dict.tokens,
        })
    }

    /// Splits the named column off a raw table as the decision.
    pub fn from_raw(raw: &RawTable, decision: &str) -> Result<Self> {
        let d = raw
            .headers
            .iter()
            .position(|h| h == decision)
            .ok_or_else(|| DataError::MissingDecisionColumn(decision.to_string()))?;
        if raw.headers.len() < 2 {
            return Err(DataError::NoConditionalFeatures);
        }
        let features: Vec<String> = raw
            .headers
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != d)
            .map(|(_, h)| h.clone())
            .collect();
        let rows: Vec<Vec<&str>> = raw
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != d)
                    .map(|(_, v)| v.as_str())
                    .collect()
            })
            .collect();
        let decisions: Vec<&str> = raw.rows.iter().map(|r| r[d].as_str()).collect();
        let base = InformationSystem::new(features, &rows)?;
        Self::new(base, decision, &decisions)
    }

    /// Conditional part `(U, F, V)`.
    pub fn base(&self) -> &InformationSystem {
        &self.base
    }

    pub fn decision_name(&self) -> &str {
        &self.decision_name
    }

    pub fn n_objects(&self) -> usize {
        self.base.n_objects()
    }

    pub fn decision(&self, object: usize) -> u32 {
        self.decision[object]
    }

    pub fn decisions(&self) -> &[u32] {
        &self.decision
    }

    pub fn decision_token(&self, code: u32) -> &str {
        &self.decision_values[code as usize]
    }

    /// The decision value set `V_d`.
    pub fn decision_values(&self) -> &[String] {
        &self.decision_values
    }

    pub fn select_rows(&self, objects: &[usize]) -> Self {
        DecisionSystem {
            base: self.base.select_rows(objects),
            decision_name: self.decision_name.clone(),
            decision: objects.iter().map(|&o| self.decision[o]).collect(),
            decision_values: self.decision_values.clone(),
        }
    }

    pub fn discretize(&self, columns: &[&str], bins: usize) -> Result<Self> {
        Ok(DecisionSystem {
            base: self.base.discretize(columns, bins)?,
            ..self.clone()
        })
    }

    /// The table over `F ∪ {d}` as a plain information system.
    pub fn full_view(&self) -> InformationSystem {
        let tokens: Vec<&str> = self.decision.iter().map(|&c| self.decision_token(c)).collect();
        self.base
            .with_column(&self.decision_name, &tokens)
            .expect("decision name is not a conditional feature")
    }
}

/// Result of [`load_csv`].
#[derive(Debug, Clone)]
pub enum LoadedTable {
    Information(InformationSystem),
    Decision(DecisionSystem),
}

/// Reads a CSV file; with a decision column name the result is a
/// decision system.
pub fn load_csv(path: impl AsRef<Path>, decision: Option<&str>, opts: &LoadOptions) -> Result<LoadedTable> {
    let raw = RawTable::from_path(path, opts)?;
    match decision {
        Some(d) => DecisionSystem::from_raw(&raw, d).map(LoadedTable::Decision),
        None => InformationSystem::from_raw(&raw).map(LoadedTable::Information),
    }
}

/// Reads a CSV file that must carry the named decision column.
pub fn load_decision_csv(path: impl AsRef<Path>, decision: &str, opts: &LoadOptions) -> Result<DecisionSystem> {
    let raw = RawTable::from_path(path, opts)?;
    DecisionSystem::from_raw(&raw, decision)
}
