use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::link::Link;
use crate::marginal::kaplan_meier;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkEcdfPoint {
    pub arm: u8,
    pub y: f64,
    pub ecdf: f64,
    /// G⁻¹(ECDF(y)).
    pub transformed: f64,
}

/// Per-arm product-limit ECDF mapped through the inverse link. Under the
/// shift model the two arms give parallel curves a vertical distance τ apart.
/// Points where the ECDF is 0 or 1 are omitted.
pub fn diagnostics_link_ecdf(data: &Dataset, link: Link) -> Result<Vec<LinkEcdfPoint>> {
    data.validate()?;
    let mut out = Vec::new();
    for arm in [0u8, 1] {
        let values: Vec<_> = data.outcome.values.iter().zip(&data.treatment).filter(|(_, &w)| w == arm).map(|(o, _)| *o).collect();
        let km = kaplan_meier(&values);
        if km.is_empty() {
            return Err(Error::Degenerate(format!("arm {arm} has no observed events")));
        }
        out.extend(km.into_iter().filter(|&(_, f)| f > 0.0 && f < 1.0).map(|(y, ecdf)| LinkEcdfPoint {
            arm,
            y,
            ecdf,
            transformed: link.quantile(ecdf),
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, Observation};

    #[test]
    fn censoring_respected() {
        use Observation::*;
        let y = vec![Exact(1.0), RightCensored(2.0), Exact(3.0), Exact(4.0), RightCensored(5.0), Exact(6.0)];
        let mut all = y.clone();
        all.extend(y);
        let data = Dataset::new(vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1], Column::new("t", all), vec![]).unwrap();
        let t = diagnostics_link_ecdf(&data, Link::Cloglog).unwrap();
        // S: 5/6, 5/6·3/4, 5/6·3/4·2/3; the last event takes F to 1
        let f: Vec<f64> = t.iter().filter(|p| p.arm == 0).map(|p| p.ecdf).collect();
        let expect = [1.0 / 6.0, 1.0 - 5.0 / 8.0, 1.0 - 5.0 / 12.0];
        assert_eq!(f.len(), 3);
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let arm1: Vec<f64> = t.iter().filter(|p| p.arm == 1).map(|p| p.transformed).collect();
        let arm0: Vec<f64> = t.iter().filter(|p| p.arm == 0).map(|p| p.transformed).collect();
        assert_eq!(arm0, arm1);
    }

    #[test]
    fn all_censored_arm_rejected() {
        let o = vec![Observation::Exact(1.0), Observation::Exact(2.0), Observation::RightCensored(1.5), Observation::RightCensored(3.0)];
        let data = Dataset::new(vec![0, 0, 1, 1], Column::new("t", o), vec![]).unwrap();
        assert!(diagnostics_link_ecdf(&data, Link::Probit).is_err());
    }
}
