//! Multivariate normal rectangle probabilities by sequential conditioning
//! over a deterministic rank-1 lattice.

use crate::error::{Error, Result};
use crate::normal;
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy)]
pub struct RectangleOptions {
    pub points: usize,
}

impl Default for RectangleOptions {
    fn default() -> Self {
        Self { points: 1 << 13 }
    }
}

const PRIMES: [f64; 32] = [
    2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0, 37.0, 41.0, 43.0, 47.0, 53.0, 59.0, 61.0, 67.0, 71.0, 73.0, 79.0, 83.0,
    89.0, 97.0, 101.0, 103.0, 107.0, 109.0, 113.0, 127.0, 131.0,
];

/// P(lower < Z ≤ upper) for Z ~ N(0, Σ).
pub fn mvn_rectangle(sigma: &DMatrix<f64>, lower: &[f64], upper: &[f64]) -> Result<f64> {
    mvn_rectangle_with(sigma, lower, upper, &RectangleOptions::default())
}

pub fn mvn_rectangle_with(sigma: &DMatrix<f64>, lower: &[f64], upper: &[f64], opts: &RectangleOptions) -> Result<f64> {
    let n = sigma.nrows();
    if sigma.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: sigma.ncols() });
    }
    for v in [lower.len(), upper.len()] {
        if v != n {
            return Err(Error::DimensionMismatch { expected: n, got: v });
        }
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
        return Err(Error::Domain("rectangle bounds must satisfy lower < upper".into()));
    }
    if n > PRIMES.len() + 1 {
        return Err(Error::Unsupported(format!("rectangle probabilities above dimension {}", PRIMES.len() + 1)));
    }
    let (chol, a, b) = reordered_cholesky(sigma, lower, upper)?;
    if n == 1 {
        return Ok(interval(a[0] / chol[(0, 0)], b[0] / chol[(0, 0)]));
    }

    let alpha: Vec<f64> = PRIMES[..n - 1].iter().map(|p| p.sqrt().fract()).collect();
    let d0 = normal::cdf(a[0] / chol[(0, 0)]);
    let e0 = normal::cdf(b[0] / chol[(0, 0)]);
    let mut y = vec![0.0; n];
    let mut total = 0.0;
    for k in 1..=opts.points {
        let (mut d, mut e) = (d0, e0);
        let mut f = e - d;
        for i in 1..n {
            let w = if n == 2 {
                // one free coordinate: the midpoint rule beats any lattice
                (k as f64 - 0.5) / opts.points as f64
            } else {
                (2.0 * (k as f64 * alpha[i - 1]).fract() - 1.0).abs()
            };
            let u = (d + w * (e - d)).clamp(1e-300, 1.0 - 1e-16);
            y[i - 1] = normal::quantile(u);
            let s: f64 = (0..i).map(|j| chol[(i, j)] * y[j]).sum();
            let c = chol[(i, i)];
            d = normal::cdf((a[i] - s) / c);
            e = normal::cdf((b[i] - s) / c);
            f *= e - d;
            if f == 0.0 {
                break;
            }
        }
        total += f;
    }
    Ok((total / opts.points as f64).clamp(0.0, 1.0))
}

fn interval(a: f64, b: f64) -> f64 {
    if b <= 0.0 {
        normal::cdf(b) - normal::cdf(a)
    } else if a >= 0.0 {
        normal::sf(a) - normal::sf(b)
    } else {
        1.0 - normal::cdf(a) - normal::sf(b)
    }
}

/// Cholesky factor with the variable of smallest expected conditional
/// probability placed first at each step; bounds are permuted to match.
fn reordered_cholesky(sigma: &DMatrix<f64>, lower: &[f64], upper: &[f64]) -> Result<(DMatrix<f64>, Vec<f64>, Vec<f64>)> {
    let n = sigma.nrows();
    let mut s = sigma.clone();
    let mut a = lower.to_vec();
    let mut b = upper.to_vec();
    let mut c = DMatrix::<f64>::zeros(n, n);
    let mut ymean = vec![0.0; n];
    let scale = (0..n).fold(0.0f64, |m, i| m.max(sigma[(i, i)].abs())).max(1e-300);
    for i in 0..n {
        let mut best = i;
        let mut best_p = f64::INFINITY;
        for j in i..n {
            let var = s[(j, j)] - (0..i).map(|k| c[(j, k)].powi(2)).sum::<f64>();
            if var <= 1e-12 * scale {
                continue;
            }
            let sd = var.sqrt();
            let m: f64 = (0..i).map(|k| c[(j, k)] * ymean[k]).sum();
            let p = interval((a[j] - m) / sd, (b[j] - m) / sd);
            if p < best_p {
                best_p = p;
                best = j;
            }
        }
        if best_p == f64::INFINITY {
            return Err(Error::NotPositiveDefinite);
        }
        if best != i {
            s.swap_rows(i, best);
            s.swap_columns(i, best);
            c.swap_rows(i, best);
            a.swap(i, best);
            b.swap(i, best);
        }
        let var = s[(i, i)] - (0..i).map(|k| c[(i, k)].powi(2)).sum::<f64>();
        let cii = var.sqrt();
        c[(i, i)] = cii;
        for j in i + 1..n {
            let v = s[(j, i)] - (0..i).map(|k| c[(j, k)] * c[(i, k)]).sum::<f64>();
            c[(j, i)] = v / cii;
        }
        let m: f64 = (0..i).map(|k| c[(i, k)] * ymean[k]).sum();
        let (lo, hi) = ((a[i] - m) / cii, (b[i] - m) / cii);
        let p = interval(lo, hi);
        let pdf = |x: f64| if x.is_finite() { normal::pdf(x) } else { 0.0 };
        ymean[i] = if p > 1e-300 {
            (pdf(lo) - pdf(hi)) / p
        } else if hi <= 0.0 {
            hi
        } else {
            lo
        };
    }
    Ok((c, a, b))
}
