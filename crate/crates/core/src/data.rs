//! Observations, datasets and their CSV representation.
//!
//! CSV conventions: an empty field is missing, an interval is written `(l,u]`,
//! and right-censoring of column `x` is carried by a 0/1 column `x_status`
//! where 1 marks an event.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::{Read, Write};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Observation {
    Exact(f64),
    RightCensored(f64),
    Interval(f64, f64),
    Missing,
}

impl Observation {
    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        if !(lower < upper) {
            return Err(Error::InvalidInput(format!("interval ({lower},{upper}] is empty")));
        }
        Ok(Observation::Interval(lower, upper))
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Observation::Missing)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Observation::Exact(_))
    }

    /// A representative finite value, used for supports and starting values.
    pub fn point(&self) -> Option<f64> {
        match *self {
            Observation::Exact(v) | Observation::RightCensored(v) => Some(v),
            Observation::Interval(l, u) => match (l.is_finite(), u.is_finite()) {
                (true, true) => Some(0.5 * (l + u)),
                (true, false) => Some(l),
                (false, true) => Some(u),
                _ => None,
            },
            Observation::Missing => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<Observation>,
    /// Original labels of a discrete column; values then hold 1-based levels.
    pub levels: Option<Vec<String>>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: Vec<Observation>) -> Self {
        Self { name: name.into(), values, levels: None }
    }

    pub fn exact(name: impl Into<String>, values: &[f64]) -> Self {
        Self::new(name, values.iter().map(|&v| Observation::Exact(v)).collect())
    }

    pub fn discrete(name: impl Into<String>, levels: &[usize]) -> Self {
        Self::new(name, levels.iter().map(|&k| Observation::Exact(k as f64)).collect())
    }

    pub fn level_count(&self) -> Option<usize> {
        match &self.levels {
            Some(l) => Some(l.len()),
            None => self
                .values
                .iter()
                .filter_map(|o| match o {
                    Observation::Exact(v) => Some(*v as usize),
                    _ => None,
                })
                .max(),
        }
    }

    pub fn finite_points(&self) -> Vec<f64> {
        self.values.iter().filter_map(|o| o.point()).filter(|v| v.is_finite()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub treatment: Vec<u8>,
    pub outcome: Column,
    pub covariates: Vec<Column>,
}

impl Dataset {
    pub fn new(treatment: Vec<u8>, outcome: Column, covariates: Vec<Column>) -> Result<Self> {
        let ds = Self { treatment, outcome, covariates };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.treatment.len();
        if self.treatment.iter().any(|&w| w > 1) {
            return Err(Error::InvalidInput("treatment must be coded 0/1".into()));
        }
        for col in std::iter::once(&self.outcome).chain(&self.covariates) {
            if col.values.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: col.values.len() });
            }
            for o in &col.values {
                if let Observation::Interval(l, u) = o {
                    if !(l < u) {
                        return Err(Error::InvalidInput(format!("empty interval in column {}", col.name)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.treatment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.treatment.is_empty()
    }

    pub fn without_covariates(&self) -> Dataset {
        Dataset { treatment: self.treatment.clone(), outcome: self.outcome.clone(), covariates: vec![] }
    }

    pub fn arm_counts(&self) -> (usize, usize) {
        let treated = self.treatment.iter().filter(|&&w| w == 1).count();
        (self.len() - treated, treated)
    }

    pub fn missing_cells(&self) -> usize {
        std::iter::once(&self.outcome).chain(&self.covariates).map(|c| c.values.iter().filter(|o| o.is_missing()).count()).sum()
    }
}

/// Which CSV columns play which role.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub treatment: String,
    pub outcome: String,
    pub covariates: Vec<String>,
    /// Map outcome values to 1-based levels (sorted label order).
    #[serde(default)]
    pub discrete_outcome: bool,
    /// Event indicator (1 = event, 0 = right censored) of the outcome;
    /// defaults to `<outcome>_status` when such a column exists.
    #[serde(default)]
    pub outcome_status: Option<String>,
}

fn parse_cell(raw: &str, column: &str) -> Result<Observation> {
    let s = raw.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("na") {
        return Ok(Observation::Missing);
    }
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(']')) {
        let (l, u) = inner.split_once(',').ok_or_else(|| Error::InvalidInput(format!("bad interval {s:?} in column {column}")))?;
        let l = parse_num(l, column)?;
        let u = parse_num(u, column)?;
        return Observation::interval(l, u);
    }
    Ok(Observation::Exact(parse_num(s, column)?))
}

fn parse_num(s: &str, column: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("cannot parse {s:?} in column {column}")))
}

fn format_cell(o: &Observation) -> String {
    match *o {
        Observation::Exact(v) | Observation::RightCensored(v) => format!("{v}"),
        Observation::Interval(l, u) => format!("({l},{u}]"),
        Observation::Missing => String::new(),
    }
}

pub fn read_csv<R: Read>(reader: R, map: &ColumnMap) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::InvalidInput(format!("column {name:?} not found")))
    };
    let status_of = |name: &str| headers.iter().position(|h| h == format!("{name}_status"));
    let w_idx = find(&map.treatment)?;
    let outcome_status = match &map.outcome_status {
        Some(name) => Some(find(name)?),
        None => status_of(&map.outcome),
    };
    let mut roles = vec![(map.outcome.clone(), find(&map.outcome)?, outcome_status)];
    for c in &map.covariates {
        roles.push((c.clone(), find(c)?, status_of(c)));
    }

    let mut treatment = Vec::new();
    let mut raw: Vec<Vec<String>> = vec![Vec::new(); roles.len()];
    let mut cols: Vec<Vec<Observation>> = vec![Vec::new(); roles.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let w = rec.get(w_idx).unwrap_or("").trim();
        treatment.push(match w {
            "0" => 0u8,
            "1" => 1u8,
            "" => return Err(Error::InvalidInput(format!("row {}: missing treatment", line + 1))),
            other => return Err(Error::InvalidInput(format!("row {}: treatment {other:?} is not 0/1", line + 1))),
        });
        for (j, (name, idx, status)) in roles.iter().enumerate() {
            let cell = rec.get(*idx).unwrap_or("");
            raw[j].push(cell.trim().to_string());
            let mut obs = if j == 0 && map.discrete_outcome { Observation::Missing } else { parse_cell(cell, name)? };
            if let (Some(si), Observation::Exact(v)) = (status, obs) {
                match rec.get(*si).unwrap_or("").trim() {
                    "1" | "" => {}
                    "0" => obs = Observation::RightCensored(v),
                    other => return Err(Error::InvalidInput(format!("status {other:?} in {name}_status is not 0/1"))),
                }
            }
            cols[j].push(obs);
        }
    }

    let mut columns: Vec<Column> = roles.iter().zip(cols).map(|((name, _, _), values)| Column::new(name.clone(), values)).collect();
    if map.discrete_outcome {
        let labels = sorted_labels(&raw[0])?;
        columns[0].values = raw[0]
            .iter()
            .map(|s| match labels.iter().position(|l| l == s) {
                Some(k) => Observation::Exact((k + 1) as f64),
                None => Observation::Missing,
            })
            .collect();
        columns[0].levels = Some(labels);
    }
    let outcome = columns.remove(0);
    Dataset::new(treatment, outcome, columns)
}

/// Distinct non-empty labels, numerically sorted when all parse as numbers.
fn sorted_labels(raw: &[String]) -> Result<Vec<String>> {
    let set: BTreeSet<&String> = raw.iter().filter(|s| !s.is_empty()).collect();
    let mut labels: Vec<String> = set.into_iter().cloned().collect();
    if labels.iter().all(|s| s.parse::<f64>().is_ok()) {
        labels.sort_by(|a, b| a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap()));
    }
    if labels.len() < 2 {
        return Err(Error::Degenerate("discrete outcome needs at least two levels".into()));
    }
    Ok(labels)
}

pub fn write_csv<W: Write>(writer: W, data: &Dataset, treatment_name: &str) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let columns: Vec<&Column> = std::iter::once(&data.outcome).chain(&data.covariates).collect();
    let censored: Vec<bool> = columns.iter().map(|c| c.values.iter().any(|o| matches!(o, Observation::RightCensored(_)))).collect();
    let mut header = vec![treatment_name.to_string()];
    for (c, &cens) in columns.iter().zip(&censored) {
        header.push(c.name.clone());
        if cens {
            header.push(format!("{}_status", c.name));
        }
    }
    wtr.write_record(&header)?;
    for i in 0..data.len() {
        let mut rec = vec![data.treatment[i].to_string()];
        for (c, &cens) in columns.iter().zip(&censored) {
            let o = &c.values[i];
            let cell = match (&c.levels, o) {
                (Some(labels), Observation::Exact(k)) => labels[*k as usize - 1].clone(),
                _ => format_cell(o),
            };
            rec.push(cell);
            if cens {
                rec.push(match o {
                    Observation::RightCensored(_) => "0".into(),
                    Observation::Exact(_) => "1".into(),
                    _ => String::new(),
                });
            }
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}
