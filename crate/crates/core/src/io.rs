//! Dataset loaders: headered CSV and the nominal/numeric ARFF subset.
//!
//! Both loaders apply the missing-class policy: rows whose class cell is
//! missing are deleted at load time. Missing attribute cells are kept and
//! tolerated downstream.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::dataset::{AttrKind, AttributeSpec, Cell, Dataset};
use crate::error::{Error, Result};

/// CSV loading options.
#[derive(Debug, Clone)]
pub struct CsvConfig {
    /// Name of the class column; `None` means the last column.
    pub class_column: Option<String>,
    /// Token standing for a missing value (default `?`).
    pub missing_token: String,
}

impl Default for CsvConfig {
    fn default() -> Self {
        CsvConfig {
            class_column: None,
            missing_token: "?".to_string(),
        }
    }
}

/// Loads a comma-separated file with one header row.
///
/// Column typing is inferred: a column where every non-missing token parses
/// as a number is numeric, anything else is nominal with labels in
/// first-appearance order. The class column is always treated as nominal.
pub fn load_csv(path: impl AsRef<Path>, config: &CsvConfig) -> Result<Dataset> {
    let file = File::open(path.as_ref())?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| Error::parse(1, e.to_string()))?,
        None => return Err(Error::EmptyDataset("file has no header row".into())),
    };
    let names: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    if names.is_empty() {
        return Err(Error::parse(1, "header row is empty"));
    }

    let class_idx = match &config.class_column {
        Some(name) => names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Schema(format!("class column {name:?} not found in header")))?,
        None => names.len() - 1,
    };

    // Materialize the token table first; typing needs a full column scan.
    let mut table: Vec<Vec<String>> = Vec::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2; // 1-based, after the header
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != names.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", names.len(), rec.len()),
            ));
        }
        table.push(rec.iter().map(|s| s.to_string()).collect());
    }

    // Missing-class rows are dropped before anything else looks at them.
    table.retain(|row| row[class_idx] != config.missing_token);
    if table.is_empty() {
        return Err(Error::EmptyDataset(
            "no usable rows (empty file or every class cell missing)".into(),
        ));
    }

    let predictive: Vec<usize> = (0..names.len()).filter(|&c| c != class_idx).collect();

    let mut attributes = Vec::with_capacity(predictive.len());
    for &c in &predictive {
        let numeric = table.iter().all(|row| {
            let tok = &row[c];
            tok == &config.missing_token || tok.parse::<f64>().is_ok()
        });
        if numeric {
            attributes.push(AttributeSpec::numeric(&names[c]));
        } else {
            let mut labels: Vec<String> = Vec::new();
            for row in &table {
                let tok = &row[c];
                if tok != &config.missing_token && !labels.iter().any(|l| l == tok) {
                    labels.push(tok.clone());
                }
            }
            attributes.push(AttributeSpec::nominal(&names[c], labels));
        }
    }

    let mut class_labels: Vec<String> = Vec::new();
    for row in &table {
        let tok = &row[class_idx];
        if !class_labels.iter().any(|l| l == tok) {
            class_labels.push(tok.clone());
        }
    }
    let class_spec = AttributeSpec::nominal(&names[class_idx], class_labels);

    let mut rows = Vec::with_capacity(table.len());
    let mut classes = Vec::with_capacity(table.len());
    for row in &table {
        let mut cells = Vec::with_capacity(predictive.len());
        for (a, &c) in predictive.iter().enumerate() {
            let tok = &row[c];
            let cell = if tok == &config.missing_token {
                Cell::Missing
            } else {
                match attributes[a].kind {
                    AttrKind::Numeric => Cell::Num(tok.parse::<f64>().expect("checked above")),
                    AttrKind::Nominal => {
                        let idx = attributes[a]
                            .values
                            .iter()
                            .position(|l| l == tok)
                            .expect("label collected above");
                        Cell::Idx(idx as u32)
                    }
                }
            };
            cells.push(cell);
        }
        let class = class_spec
            .values
            .iter()
            .position(|l| l == &row[class_idx])
            .expect("label collected above") as u32;
        rows.push(cells);
        classes.push(class);
    }

    Dataset::new(attributes, class_spec, rows, classes)
}

/// Loads an ARFF file, class = last declared attribute.
pub fn load_arff(path: impl AsRef<Path>) -> Result<Dataset> {
    load_arff_with_class(path, None)
}

/// Loads an ARFF file with an explicit class attribute name.
///
/// Supported subset: `@relation`, `@attribute` with nominal enumerations or
/// `numeric`/`real`/`integer`, and dense `@data` rows. `?` is missing. The
/// sparse `{index value, ...}` data format is not supported.
pub fn load_arff_with_class(path: impl AsRef<Path>, class: Option<&str>) -> Result<Dataset> {
    let file = File::open(path.as_ref())?;
    let reader = BufReader::new(file);

    let mut specs: Vec<AttributeSpec> = Vec::new();
    let mut in_data = false;
    let mut data_rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = trimmed.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                continue;
            } else if lower.starts_with("@attribute") {
                specs.push(parse_attribute_decl(trimmed, lineno)?);
            } else if lower == "@data" || lower.starts_with("@data") {
                in_data = true;
            } else {
                return Err(Error::parse(lineno, format!("unrecognized declaration {trimmed:?}")));
            }
        } else {
            if trimmed.starts_with('{') {
                return Err(Error::parse(lineno, "sparse ARFF data format is not supported"));
            }
            data_rows.push((lineno, split_arff_row(trimmed)));
        }
    }

    if !in_data {
        return Err(Error::parse(0, "missing @data section"));
    }
    if specs.len() < 2 {
        return Err(Error::Schema("need at least one attribute plus a class".into()));
    }

    let class_idx = match class {
        Some(name) => specs
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::Schema(format!("class attribute {name:?} not declared")))?,
        None => specs.len() - 1,
    };
    if specs[class_idx].kind != AttrKind::Nominal {
        return Err(Error::Schema(format!(
            "class attribute {:?} must be nominal",
            specs[class_idx].name
        )));
    }

    let predictive: Vec<usize> = (0..specs.len()).filter(|&c| c != class_idx).collect();
    let attributes: Vec<AttributeSpec> = predictive.iter().map(|&c| specs[c].clone()).collect();
    let class_spec = specs[class_idx].clone();

    let mut rows = Vec::new();
    let mut classes = Vec::new();
    for (lineno, tokens) in &data_rows {
        if tokens.len() != specs.len() {
            return Err(Error::parse(
                *lineno,
                format!("expected {} fields, found {}", specs.len(), tokens.len()),
            ));
        }
        if tokens[class_idx] == "?" {
            continue; // missing-class policy: drop the instance
        }
        let mut cells = Vec::with_capacity(predictive.len());
        for (a, &c) in predictive.iter().enumerate() {
            cells.push(parse_arff_cell(&tokens[c], &attributes[a], *lineno)?);
        }
        let class_cell = parse_arff_cell(&tokens[class_idx], &class_spec, *lineno)?;
        let class = class_cell
            .index()
            .expect("class is nominal and non-missing");
        rows.push(cells);
        classes.push(class);
    }

    if rows.is_empty() {
        return Err(Error::EmptyDataset(
            "no usable rows (empty @data or every class cell missing)".into(),
        ));
    }

    Dataset::new(attributes, class_spec, rows, classes)
}

fn parse_attribute_decl(line: &str, lineno: usize) -> Result<AttributeSpec> {
    // @attribute NAME {a,b,c} | numeric | real | integer
    let rest = line["@attribute".len()..].trim();
    if rest.is_empty() {
        return Err(Error::parse(lineno, "attribute declaration without a name"));
    }
    let (name, type_part) = if let Some(stripped) = rest.strip_prefix('\'') {
        let end = stripped
            .find('\'')
            .ok_or_else(|| Error::parse(lineno, "unterminated quoted attribute name"))?;
        (stripped[..end].to_string(), stripped[end + 1..].trim())
    } else {
        let mut it = rest.splitn(2, char::is_whitespace);
        let name = it.next().unwrap().to_string();
        (name, it.next().unwrap_or("").trim())
    };
    if type_part.is_empty() {
        return Err(Error::parse(lineno, format!("attribute {name:?} has no type")));
    }
    if type_part.starts_with('{') {
        let inner = type_part
            .strip_prefix('{')
            .and_then(|s| s.trim_end().strip_suffix('}'))
            .ok_or_else(|| Error::parse(lineno, "unterminated nominal enumeration"))?;
        let values: Vec<String> = inner
            .split(',')
            .map(|v| strip_quotes(v.trim()).to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(Error::parse(lineno, format!("attribute {name:?} declares no values")));
        }
        Ok(AttributeSpec::nominal(name, values))
    } else {
        match type_part.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => Ok(AttributeSpec::numeric(name)),
            other => Err(Error::Schema(format!(
                "attribute {name:?}: unsupported type {other:?} (line {lineno})"
            ))),
        }
    }
}

fn parse_arff_cell(token: &str, spec: &AttributeSpec, lineno: usize) -> Result<Cell> {
    if token == "?" {
        return Ok(Cell::Missing);
    }
    match spec.kind {
        AttrKind::Numeric => token
            .parse::<f64>()
            .map(Cell::Num)
            .map_err(|_| Error::parse(lineno, format!("invalid numeric value {token:?}"))),
        AttrKind::Nominal => spec
            .values
            .iter()
            .position(|v| v == token)
            .map(|i| Cell::Idx(i as u32))
            .ok_or_else(|| {
                Error::Schema(format!(
                    "value {token:?} not declared for attribute {:?} (line {lineno})",
                    spec.name
                ))
            }),
    }
}

/// Splits a dense ARFF data row on commas, honoring single quotes.
fn split_arff_row(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '\'' => quoted = !quoted,
            ',' if !quoted => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur.trim().to_string());
    out
}

fn strip_quotes(s: &str) -> &str {
    s.strip_prefix('\'')
        .and_then(|s| s.strip_suffix('\''))
        .unwrap_or(s)
}
