//! Per-row basis evaluations computed once per column, so that likelihood
//! evaluations reduce to dot products with ϑ.

use crate::basis::{dot, BasisSpec};
use crate::data::{Column, Observation};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) enum Term {
    /// a(y) and a′(y).
    Exact {
        a: Vec<f64>,
        da: Vec<f64>,
    },
    /// a at the lower and upper bound; `None` stands for −∞ and +∞ respectively.
    Bounds {
        lo: Option<Vec<f64>>,
        hi: Option<Vec<f64>>,
    },
    Missing,
}

impl Term {
    pub fn is_exact(&self) -> bool {
        matches!(self, Term::Exact { .. })
    }

    /// (h(lower), h(upper)) for a bounded term.
    pub fn bounds(&self, theta: &[f64]) -> (f64, f64) {
        match self {
            Term::Bounds { lo, hi } => {
                (lo.as_ref().map_or(f64::NEG_INFINITY, |a| dot(a, theta)), hi.as_ref().map_or(f64::INFINITY, |a| dot(a, theta)))
            }
            _ => (f64::NAN, f64::NAN),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub basis: BasisSpec,
    pub terms: Vec<Term>,
    pub clamped: usize,
}

impl Prepared {
    pub fn new(basis: &BasisSpec, column: &Column) -> Result<Self> {
        basis.validate()?;
        let mut clamped = 0;
        let mut terms = Vec::with_capacity(column.values.len());
        for obs in &column.values {
            terms.push(prepare_one(basis, obs, &mut clamped).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("column {}: {msg}", column.name)),
                other => other,
            })?);
        }
        Ok(Self { basis: basis.clone(), terms, clamped })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

fn prepare_one(basis: &BasisSpec, obs: &Observation, clamped: &mut usize) -> Result<Term> {
    if let BasisSpec::DiscreteStep { levels } = *basis {
        let unit = |k: usize| {
            let mut v = vec![0.0; levels - 1];
            v[k - 1] = 1.0;
            v
        };
        // bound at level v: −∞ below the first level, +∞ at or above the top one
        let at = |v: f64| -> Option<Vec<f64>> {
            if v < 1.0 || v >= levels as f64 {
                None
            } else {
                Some(unit(v.floor() as usize))
            }
        };
        return Ok(match *obs {
            Observation::Exact(y) => {
                let k = y as usize;
                if y.fract() != 0.0 || k < 1 || k > levels {
                    return Err(Error::Domain(format!("level {y} outside 1..={levels}")));
                }
                Term::Bounds { lo: if k > 1 { Some(unit(k - 1)) } else { None }, hi: at(y) }
            }
            Observation::RightCensored(c) => Term::Bounds { lo: at(c), hi: None },
            Observation::Interval(l, u) => Term::Bounds { lo: at(l), hi: at(u) },
            Observation::Missing => Term::Missing,
        });
    }
    let mut bound = |v: f64| -> Result<Option<Vec<f64>>> {
        if !v.is_finite() || (matches!(basis, BasisSpec::LogLinear | BasisSpec::LogBernstein { .. }) && v <= 0.0) {
            return Ok(None);
        }
        let b = basis.evaluate(v)?;
        if b.clamped {
            *clamped += 1;
        }
        Ok(Some(b.values))
    };
    Ok(match *obs {
        Observation::Exact(y) => {
            if !y.is_finite() {
                return Err(Error::Domain(format!("non-finite value {y}")));
            }
            let b = basis.evaluate(y)?;
            if b.clamped {
                *clamped += 1;
            }
            Term::Exact { a: b.values, da: basis.derivative(y)? }
        }
        Observation::RightCensored(c) => Term::Bounds { lo: bound(c)?, hi: None },
        Observation::Interval(l, u) => {
            let lo = if l == f64::NEG_INFINITY { None } else { bound(l)? };
            let hi = if u == f64::INFINITY { None } else { bound(u)? };
            Term::Bounds { lo, hi }
        }
        Observation::Missing => Term::Missing,
    })
}
