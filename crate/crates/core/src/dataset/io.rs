use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// A CSV column, by zero-based index or by header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        })
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

impl ColumnRef {
    fn resolve(&self, header: Option<&[String]>, width: usize) -> Result<usize> {
        match self {
            ColumnRef::Index(i) if *i < width => Ok(*i),
            ColumnRef::Index(i) => Err(Error::UnknownColumn(i.to_string())),
            ColumnRef::Name(name) => {
                let header = header.ok_or(Error::NameWithoutHeader)?;
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::UnknownColumn(name.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub label: ColumnRef,
    pub has_header: bool,
    #[serde(default)]
    pub ignore: Vec<ColumnRef>,
}

impl LoadOptions {
    pub fn new(label: ColumnRef) -> Self {
        Self {
            label,
            has_header: true,
            ignore: Vec::new(),
        }
    }
}

/// Loads a labelled dataset.
///
/// Labels are factorized to dense ids in order of first appearance; the
/// remaining (non-ignored) columns become attributes in file order. Error
/// rows are 1-based file lines, columns are zero-based.
pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_csv_from_reader(file, opts)
}

pub fn load_csv_from_reader<R: Read>(reader: R, opts: &LoadOptions) -> Result<Dataset> {
    let table = Table::read(reader, opts.has_header)?;
    let width = table.width;
    let label_col = opts.label.resolve(table.header.as_deref(), width)?;
    let ignored = resolve_all(&opts.ignore, table.header.as_deref(), width)?;
    let attr_cols: Vec<usize> = (0..width)
        .filter(|c| *c != label_col && !ignored.contains(c))
        .collect();
    if attr_cols.is_empty() {
        return Err(Error::InvalidDataset("no attribute columns".into()));
    }

    let mut class_ids: HashMap<String, usize> = HashMap::new();
    let mut class_names = Vec::new();
    let mut labels = Vec::with_capacity(table.records.len());
    let mut rows = Vec::with_capacity(table.records.len());
    for (line, record) in &table.records {
        let raw = record[label_col].trim();
        if raw.is_empty() || raw == "?" {
            return Err(Error::MissingValue {
                row: *line,
                column: label_col,
            });
        }
        let next = class_names.len();
        let id = *class_ids.entry(raw.to_string()).or_insert_with(|| {
            class_names.push(raw.to_string());
            next
        });
        labels.push(id);
        rows.push(parse_cells(record, &attr_cols, *line)?);
    }

    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if rows.len() < 2 {
        return Err(Error::TooFewInstances(rows.len()));
    }
    if class_names.len() < 2 {
        return Err(Error::SingleClass);
    }
    let attribute_names = match &table.header {
        Some(h) => attr_cols.iter().map(|&c| h[c].clone()).collect(),
        None => attr_cols.iter().map(|c| format!("attr{c}")).collect(),
    };
    Dataset::new(rows, labels, attribute_names, class_names)
}

/// Reads attribute rows without labels, e.g. instances to classify.
pub fn read_unlabeled_csv(
    path: impl AsRef<Path>,
    has_header: bool,
    ignore: &[ColumnRef],
) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let table = Table::read(file, has_header)?;
    let ignored = resolve_all(ignore, table.header.as_deref(), table.width)?;
    let cols: Vec<usize> = (0..table.width).filter(|c| !ignored.contains(c)).collect();
    table
        .records
        .iter()
        .map(|(line, r)| parse_cells(r, &cols, *line))
        .collect()
}

/// Writes attributes followed by a `class` column holding class names.
pub fn write_csv<W: Write>(d: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = d.attribute_names().iter().map(String::as_str).collect();
    header.push("class");
    w.write_record(&header)?;
    for (i, row) in d.rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(d.class_names()[d.label(i)].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

struct Table {
    header: Option<Vec<String>>,
    width: usize,
    /// (1-based file line, fields)
    records: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read<R: Read>(reader: R, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .flexible(true)
            .from_reader(reader);
        let header = if has_header {
            Some(
                rdr.headers()?
                    .iter()
                    .map(|h| h.trim().to_string())
                    .collect::<Vec<_>>(),
            )
        } else {
            None
        };
        let mut width = header.as_ref().map(Vec::len);
        let mut records = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            if rec.len() == 1 && rec[0].trim().is_empty() {
                continue;
            }
            let expected = *width.get_or_insert(rec.len());
            if rec.len() != expected {
                return Err(Error::RaggedRow {
                    row: line,
                    expected,
                    found: rec.len(),
                });
            }
            records.push((line, rec.iter().map(str::to_string).collect()));
        }
        match width {
            Some(width) if width > 0 => Ok(Self {
                header,
                width,
                records,
            }),
            _ => Err(Error::EmptyDataset),
        }
    }
}

fn resolve_all(cols: &[ColumnRef], header: Option<&[String]>, width: usize) -> Result<Vec<usize>> {
    cols.iter().map(|c| c.resolve(header, width)).collect()
}

fn parse_cells(record: &[String], cols: &[usize], line: usize) -> Result<Vec<f64>> {
    cols.iter()
        .map(|&c| {
            let cell = record[c].trim();
            if cell.is_empty() || cell == "?" {
                return Err(Error::MissingValue {
                    row: line,
                    column: c,
                });
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::UnparseableCell {
                    row: line,
                    column: c,
                    value: cell.to_string(),
                }),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(s: &str, opts: &LoadOptions) -> Result<Dataset> {
        load_csv_from_reader(s.as_bytes(), opts)
    }

    #[test]
    fn minimal_file() {
        let d = load_str(
            "a,label\n1.0,x\n2.0,y\n",
            &LoadOptions::new("label".parse().unwrap()),
        )
        .unwrap();
        assert_eq!(d.n_instances(), 2);
        assert_eq!(d.n_attributes(), 1);
        assert_eq!(d.labels(), &[0, 1]);
        assert_eq!(d.class_names(), &["x", "y"]);
    }

    #[test]
    fn first_appearance_factorization_and_column_order() {
        let opts = LoadOptions::new(ColumnRef::Index(1));
        let d = load_str("p,cls,q\n1,b,10\n2,a,20\n3,b,30\n", &opts).unwrap();
        assert_eq!(d.labels(), &[0, 1, 0]);
        assert_eq!(d.class_names(), &["b", "a"]);
        assert_eq!(d.attribute_names(), &["p", "q"]);
        assert_eq!(d.row(2), &[3.0, 30.0]);
    }

    #[test]
    fn headerless_with_ignored_column() {
        let opts = LoadOptions {
            label: ColumnRef::Index(3),
            has_header: false,
            ignore: vec![ColumnRef::Index(0)],
        };
        let d = load_str("cat,1,0,x\ndog,0,4,y\n", &opts).unwrap();
        assert_eq!(d.n_attributes(), 2);
        assert_eq!(d.row(1), &[0.0, 4.0]);
    }

    #[test]
    fn name_needs_header() {
        let opts = LoadOptions {
            label: ColumnRef::Name("label".into()),
            has_header: false,
            ignore: vec![],
        };
        assert!(matches!(
            load_str("1,x\n2,y\n", &opts),
            Err(Error::NameWithoutHeader)
        ));
    }

    #[test]
    fn error_paths() {
        let opts = LoadOptions::new(ColumnRef::Name("label".into()));
        assert!(matches!(
            load_str("a,label\n1.0,x\nfoo,y\n", &opts),
            Err(Error::UnparseableCell {
                row: 3,
                column: 0,
                ..
            })
        ));
        assert!(matches!(
            load_str("a,label\n", &opts),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            load_str("a,label\n1,x\n2,x\n", &opts),
            Err(Error::SingleClass)
        ));
        assert!(matches!(
            load_str("a,label\n1,x\n,y\n", &opts),
            Err(Error::MissingValue { row: 3, column: 0 })
        ));
        assert!(matches!(
            load_str("a,label\n1,x\n", &opts),
            Err(Error::TooFewInstances(1))
        ));
        assert!(matches!(
            load_str("a,b\n1,x\n2,y\n", &opts),
            Err(Error::UnknownColumn(_))
        ));
        assert!(matches!(
            load_csv("/definitely/not/here.csv", &opts),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn round_trip_through_file() {
        let opts = LoadOptions::new(ColumnRef::Name("label".into()));
        let d = load_str(
            "u,v,label\n0.1,-3e-7,z\n12345.678,2,y\n0.30000000000000004,5,z\n",
            &opts,
        )
        .unwrap();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write_csv(&d, &mut f).unwrap();
        f.flush().unwrap();
        let back = load_csv(f.path(), &LoadOptions::new(ColumnRef::Name("class".into()))).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn unlabeled_rows() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "name,a,b\nx,1,2\ny,3,4").unwrap();
        let rows = read_unlabeled_csv(f.path(), true, &[ColumnRef::Name("name".into())]).unwrap();
        assert_eq!(rows, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }
}
