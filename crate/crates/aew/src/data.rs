//! Labeled datasets and their CSV representation.
//!
//! The on-disk format is CSV with a header `x1,...,xd,label`. Features are
//! finite floats, labels are the integers -1 or 1. Anything else is a load
//! error; labels are never coerced.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Binary class label, valued in {-1, +1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Minus,
    Plus,
}

impl Label {
    pub fn from_int(v: i64) -> Result<Label> {
        match v {
            -1 => Ok(Label::Minus),
            1 => Ok(Label::Plus),
            other => Err(Error::Parse(format!(
                "label must be -1 or 1, got {other}"
            ))),
        }
    }

    /// Label carried by the sign of a score, with sign(0) = +1.
    pub fn from_sign(v: f64) -> Label {
        if v >= 0.0 {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Label::Minus => -1.0,
            Label::Plus => 1.0,
        }
    }

    pub fn to_int(self) -> i64 {
        match self {
            Label::Minus => -1,
            Label::Plus => 1,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Minus => Label::Plus,
            Label::Plus => Label::Minus,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_int())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledExample {
    pub x: Vec<f64>,
    pub y: Label,
}

/// An ordered list of labeled examples sharing one feature dimension.
///
/// Order matters: sequential procedures (cumulative scores, train/validation
/// splits) read examples in the stored order.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    examples: Vec<LabeledExample>,
}

impl Dataset {
    /// Builds a dataset, checking that every example has dimension `dim`
    /// and only finite features. An empty example list is allowed; risk
    /// evaluations reject it later.
    pub fn new(dim: usize, examples: Vec<LabeledExample>) -> Result<Dataset> {
        if dim == 0 {
            return Err(Error::Domain("feature dimension must be >= 1".into()));
        }
        for ex in &examples {
            if ex.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: ex.x.len(),
                });
            }
            if ex.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain("features must be finite".into()));
            }
        }
        Ok(Dataset { dim, examples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    /// Order-preserving split: the first `m` examples and the rest.
    pub fn split_at(&self, m: usize) -> Result<(Dataset, Dataset)> {
        if m > self.len() {
            return Err(Error::Domain(format!(
                "cannot split {} examples at {m}",
                self.len()
            )));
        }
        let head = Dataset {
            dim: self.dim,
            examples: self.examples[..m].to_vec(),
        };
        let tail = Dataset {
            dim: self.dim,
            examples: self.examples[m..].to_vec(),
        };
        Ok((head, tail))
    }

    pub fn load_csv(path: &Path) -> Result<Dataset> {
        let file = std::fs::File::open(path)?;
        Dataset::read_csv(file)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let cols = headers.len();
        if cols < 2 {
            return Err(Error::Parse(
                "expected header x1,...,xd,label with d >= 1".into(),
            ));
        }
        let dim = cols - 1;
        for (i, name) in headers.iter().enumerate() {
            let want = if i < dim {
                format!("x{}", i + 1)
            } else {
                "label".to_string()
            };
            if name != want {
                return Err(Error::Parse(format!(
                    "unexpected column {} (want {want})",
                    name
                )));
            }
        }
        let mut examples = Vec::new();
        for (row_idx, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != cols {
                return Err(Error::Parse(format!(
                    "row {}: expected {cols} fields, got {}",
                    row_idx + 1,
                    record.len()
                )));
            }
            let mut x = Vec::with_capacity(dim);
            for field in record.iter().take(dim) {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Parse(format!("row {}: bad feature {field:?}", row_idx + 1))
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse(format!(
                        "row {}: features must be finite",
                        row_idx + 1
                    )));
                }
                x.push(v);
            }
            let label_field = &record[dim];
            let v: i64 = label_field.parse().map_err(|_| {
                Error::Parse(format!(
                    "row {}: label must be the integer -1 or 1, got {label_field:?}",
                    row_idx + 1
                ))
            })?;
            let y = Label::from_int(v)
                .map_err(|_| Error::Parse(format!("row {}: label must be -1 or 1, got {v}", row_idx + 1)))?;
            examples.push(LabeledExample { x, y });
        }
        Dataset::new(dim, examples)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        header.push("label".to_string());
        wtr.write_record(&header)?;
        for ex in &self.examples {
            let mut row: Vec<String> = ex.x.iter().map(|v| format!("{v}")).collect();
            row.push(ex.y.to_int().to_string());
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }
}
