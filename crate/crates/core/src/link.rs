//! Inverse link functions G for transformation models.

use crate::normal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Probit,
    Logit,
    Cloglog,
}

/// ln(1 + eˣ) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl Link {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Link::Probit => normal::cdf(x),
            Link::Logit => {
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (1.0 + e)
                }
            }
            Link::Cloglog => -(-x.exp()).exp_m1(),
        }
    }

    /// 1 − G(x).
    pub fn sf(self, x: f64) -> f64 {
        match self {
            Link::Probit => normal::sf(x),
            Link::Logit => Link::Logit.cdf(-x),
            Link::Cloglog => (-x.exp()).exp(),
        }
    }

    pub fn log_cdf(self, x: f64) -> f64 {
        match self {
            Link::Probit => normal::log_cdf(x),
            Link::Logit => -softplus(-x),
            Link::Cloglog => normal::ln_1m_exp(-x.exp()),
        }
    }

    pub fn log_sf(self, x: f64) -> f64 {
        match self {
            Link::Probit => normal::log_sf(x),
            Link::Logit => -softplus(x),
            Link::Cloglog => -x.exp(),
        }
    }

    pub fn density(self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    pub fn log_density(self, x: f64) -> f64 {
        match self {
            Link::Probit => normal::log_pdf(x),
            Link::Logit => -softplus(-x) - softplus(x),
            Link::Cloglog => x - x.exp(),
        }
    }

    /// g′(x) / g(x).
    pub fn score(self, x: f64) -> f64 {
        match self {
            Link::Probit => -x,
            Link::Logit => 1.0 - 2.0 * Link::Logit.cdf(x),
            Link::Cloglog => 1.0 - x.exp(),
        }
    }

    pub fn quantile(self, p: f64) -> f64 {
        match self {
            Link::Probit => normal::quantile(p),
            Link::Logit => (p / (1.0 - p)).ln(),
            Link::Cloglog => (-(-p).ln_1p()).ln(),
        }
    }

    /// ln(G(b) − G(a)) for a < b, choosing the tail that keeps precision.
    pub fn log_interval(self, a: f64, b: f64) -> f64 {
        if self == Link::Probit {
            return normal::log_interval(a, b);
        }
        if !(a < b) {
            return f64::NEG_INFINITY;
        }
        if a == f64::NEG_INFINITY {
            return self.log_cdf(b);
        }
        if b == f64::INFINITY {
            return self.log_sf(a);
        }
        if self.cdf(a) > 0.5 {
            let la = self.log_sf(a);
            la + normal::ln_1m_exp(self.log_sf(b) - la)
        } else {
            let lb = self.log_cdf(b);
            lb + normal::ln_1m_exp(self.log_cdf(a) - lb)
        }
    }

    /// Latent normal score Φ⁻¹(G(u)) with the probability clipped away from 0 and 1.
    pub fn to_normal(self, u: f64) -> f64 {
        if self == Link::Probit {
            return u;
        }
        if u == f64::INFINITY || u == f64::NEG_INFINITY {
            return u;
        }
        const CLIP: f64 = 1e-12;
        let p = self.cdf(u);
        if p <= 0.5 {
            normal::quantile(p.max(CLIP))
        } else {
            -normal::quantile(self.sf(u).max(CLIP))
        }
    }

    /// G⁻¹(Φ(z)), the inverse of [`Link::to_normal`].
    pub fn to_latent(self, z: f64) -> f64 {
        match self {
            Link::Probit => z,
            Link::Logit => normal::log_cdf(z) - normal::log_sf(z),
            Link::Cloglog => (-normal::log_sf(z)).ln(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Link; 3] = [Link::Probit, Link::Logit, Link::Cloglog];

    #[test]
    fn latent_inverts_normal_score() {
        for link in ALL {
            for z in [-6.0, -1.3, 0.0, 0.4, 2.2, 6.0] {
                assert!((link.to_normal(link.to_latent(z)) - z).abs() < 1e-8, "{link:?} {z}");
                assert!((link.cdf(link.to_latent(z)) - normal::cdf(z)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for link in ALL {
            for &x in &[-5.0, -1.2, 0.0, 0.7, 2.4] {
                let back = link.quantile(link.cdf(x));
                assert!((back - x).abs() < 1e-10, "{link:?} {x} {back}");
            }
        }
    }

    #[test]
    fn density_is_derivative_of_cdf() {
        let h = 1e-6;
        for link in ALL {
            for &x in &[-3.0, -0.5, 0.0, 0.9, 1.8] {
                let fd = (link.cdf(x + h) - link.cdf(x - h)) / (2.0 * h);
                assert!((fd - link.density(x)).abs() < 1e-8, "{link:?} {x}");
                let fs = (link.log_density(x + h) - link.log_density(x - h)) / (2.0 * h);
                assert!((fs - link.score(x)).abs() < 1e-6, "{link:?} {x}");
            }
        }
    }

    #[test]
    fn logs_agree_with_direct() {
        for link in ALL {
            for &x in &[-4.0, -0.3, 0.0, 1.1, 3.5] {
                assert!((link.log_cdf(x) - link.cdf(x).ln()).abs() < 1e-12);
                assert!((link.log_sf(x) - link.sf(x).ln()).abs() < 1e-12);
                assert!((link.cdf(x) + link.sf(x) - 1.0).abs() < 1e-15);
            }
            let direct = (link.cdf(0.8) - link.cdf(-0.4)).ln();
            assert!((link.log_interval(-0.4, 0.8) - direct).abs() < 1e-12);
            let direct = (link.cdf(2.5) - link.cdf(1.5)).ln();
            assert!((link.log_interval(1.5, 2.5) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn cloglog_latent_score() {
        // Φ⁻¹(1 − e⁻¹)
        assert!((Link::Cloglog.to_normal(0.0) - 0.337_475_9).abs() < 1e-6);
        assert!(Link::Cloglog.to_normal(50.0).is_finite());
        assert!(Link::Logit.to_normal(-80.0).is_finite());
    }
}
