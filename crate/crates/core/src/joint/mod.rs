//! The joint copula model of covariates and outcome: likelihood, estimation,
//! conditional distributions and the conditional comparator model.
//!
//! Coordinates are ordered covariates first, outcome last. Rows whose
//! covariates are all exact use a closed-form gradient through Ω; rows with
//! censored, interval or missing covariates are handled through Σ by
//! marginalizing and conditioning.

mod diagnostics;
mod fit;
mod ltm;

pub use diagnostics::{diagnostics_link_ecdf, LinkEcdfPoint};
pub use fit::{fit_nami, fit_nami_model, NamiOptions};
pub use ltm::{fit_ltm, fit_ltm_with};

use crate::basis::{chain_gradient, constrain_into, dot, transformation, BasisSpec, MonotoneCoefficients};
use crate::copula::{self, packed_index, packed_len, CopulaStructure, Factors, RectangleOptions};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::link::Link;
use crate::marginal::MarginalOutcomeModel;
use crate::normal;
use crate::terms::{Prepared, Term};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpec {
    pub link: Link,
    pub basis: BasisSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointModel {
    /// Probit marginals Φ(h_j(x_j)) of the covariates.
    pub covariate_marginals: Vec<(BasisSpec, MonotoneCoefficients)>,
    pub outcome: MarginalOutcomeModel,
    pub copula: CopulaStructure,
}

impl JointModel {
    pub fn new(
        covariate_marginals: Vec<(BasisSpec, MonotoneCoefficients)>,
        outcome: MarginalOutcomeModel,
        copula: CopulaStructure,
    ) -> Result<Self> {
        if copula.dim() != covariate_marginals.len() + 1 {
            return Err(Error::DimensionMismatch { expected: covariate_marginals.len() + 1, got: copula.dim() });
        }
        Ok(Self { covariate_marginals, outcome, copula })
    }

    pub fn layout(&self) -> ThetaLayout {
        ThetaLayout::new(&self.covariate_marginals.iter().map(|(b, _)| b.dim()).collect::<Vec<_>>(), self.outcome.basis.dim())
    }

    /// Θ on the constrained scale.
    pub fn theta(&self) -> ThetaFull {
        self.pack(|c| &c.theta)
    }

    /// Θ with every basis block replaced by its unconstrained γ.
    pub fn gamma(&self) -> ThetaFull {
        self.pack(|c| &c.gamma)
    }

    fn pack(&self, pick: impl Fn(&MonotoneCoefficients) -> &Vec<f64>) -> ThetaFull {
        let layout = self.layout();
        let mut v = Vec::with_capacity(layout.len());
        for (_, c) in &self.covariate_marginals {
            v.extend_from_slice(pick(c));
        }
        v.extend_from_slice(pick(&self.outcome.theta));
        v.push(self.outcome.tau);
        v.extend_from_slice(self.copula.lambda());
        ThetaFull { layout, values: v }
    }

    /// Rebuilds a model of the same shape from unconstrained parameters.
    pub fn with_gamma(&self, gamma: &[f64]) -> Result<Self> {
        let layout = self.layout();
        if gamma.len() != layout.len() {
            return Err(Error::DimensionMismatch { expected: layout.len(), got: gamma.len() });
        }
        let covariate_marginals = self
            .covariate_marginals
            .iter()
            .zip(&layout.covariates)
            .map(|((b, _), r)| Ok((b.clone(), crate::basis::constrain(b, &gamma[r.clone()])?)))
            .collect::<Result<Vec<_>>>()?;
        let outcome = MarginalOutcomeModel {
            link: self.outcome.link,
            basis: self.outcome.basis.clone(),
            theta: crate::basis::constrain(&self.outcome.basis, &gamma[layout.outcome.clone()])?,
            tau: gamma[layout.tau],
        };
        let copula = CopulaStructure::new(self.copula.dim(), gamma[layout.lambda.clone()].to_vec())?;
        Ok(Self { covariate_marginals, outcome, copula })
    }
}

/// Index map of Θ = (ϑ₁, …, ϑ_{J−1}, ϑ, τ, λ).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaLayout {
    pub covariates: Vec<Range<usize>>,
    pub outcome: Range<usize>,
    pub tau: usize,
    pub lambda: Range<usize>,
}

impl ThetaLayout {
    pub fn new(covariate_dims: &[usize], outcome_dim: usize) -> Self {
        let mut off = 0;
        let covariates = covariate_dims
            .iter()
            .map(|&d| {
                off += d;
                off - d..off
            })
            .collect();
        let outcome = off..off + outcome_dim;
        let tau = outcome.end;
        let lambda = tau + 1..tau + 1 + packed_len(covariate_dims.len() + 1);
        Self { covariates, outcome, tau, lambda }
    }

    pub fn len(&self) -> usize {
        self.lambda.end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self, covariates: &[String]) -> Vec<String> {
        let mut names = Vec::with_capacity(self.len());
        for (r, name) in self.covariates.iter().zip(covariates) {
            names.extend((1..=r.len()).map(|m| format!("{name}:theta{m}")));
        }
        names.extend((1..=self.outcome.len()).map(|m| format!("theta{m}")));
        names.push("tau".into());
        let dim = covariates.len() + 1;
        for i in 1..dim {
            for j in 0..i {
                names.push(format!("lambda{}{}", i + 1, j + 1));
            }
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaFull {
    pub layout: ThetaLayout,
    pub values: Vec<f64>,
}

impl ThetaFull {
    pub fn tau(&self) -> f64 {
        self.values[self.layout.tau]
    }

    pub fn lambda(&self) -> &[f64] {
        &self.values[self.layout.lambda.clone()]
    }

    pub fn covariate(&self, j: usize) -> &[f64] {
        &self.values[self.layout.covariates[j].clone()]
    }

    pub fn outcome(&self) -> &[f64] {
        &self.values[self.layout.outcome.clone()]
    }
}

/// Which likelihood evaluation to use for rows whose covariates are all exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Closed-form Ω route wherever it applies.
    #[default]
    Auto,
    /// Marginalize/condition through Σ for every row.
    General,
}

/// Data prepared against a model shape; evaluates −ℓ and its gradient in the
/// unconstrained parameterization.
pub(crate) struct JointProblem {
    link: Link,
    covariates: Vec<Prepared>,
    outcome: Prepared,
    treatment: Vec<f64>,
    layout: ThetaLayout,
    fast_rows: Vec<usize>,
    general_rows: Vec<usize>,
    pub skipped_rows: usize,
    pub clamped: usize,
}

struct Unpacked {
    covariate_theta: Vec<Vec<f64>>,
    outcome_theta: Vec<f64>,
    tau: f64,
    factors: Factors,
}

const RECTANGLE: RectangleOptions = RectangleOptions { points: 1 << 13 };

impl JointProblem {
    pub fn new(data: &Dataset, outcome: &OutcomeSpec, covariates: &[BasisSpec], route: Route) -> Result<Self> {
        data.validate()?;
        if covariates.len() != data.covariates.len() {
            return Err(Error::DimensionMismatch { expected: data.covariates.len(), got: covariates.len() });
        }
        let cov_prep = covariates.iter().zip(&data.covariates).map(|(b, c)| Prepared::new(b, c)).collect::<Result<Vec<_>>>()?;
        let out_prep = Prepared::new(&outcome.basis, &data.outcome)?;
        let mut fast_rows = Vec::new();
        let mut general_rows = Vec::new();
        let mut skipped_rows = 0;
        for i in 0..data.len() {
            let all_missing = matches!(out_prep.terms[i], Term::Missing) && cov_prep.iter().all(|p| matches!(p.terms[i], Term::Missing));
            if all_missing {
                skipped_rows += 1;
            } else if route == Route::Auto && cov_prep.iter().all(|p| p.terms[i].is_exact()) {
                fast_rows.push(i);
            } else {
                general_rows.push(i);
            }
        }
        let clamped = cov_prep.iter().map(|p| p.clamped).sum::<usize>() + out_prep.clamped;
        let layout = ThetaLayout::new(&covariates.iter().map(|b| b.dim()).collect::<Vec<_>>(), outcome.basis.dim());
        Ok(Self {
            link: outcome.link,
            covariates: cov_prep,
            outcome: out_prep,
            treatment: data.treatment.iter().map(|&w| f64::from(w)).collect(),
            layout,
            fast_rows,
            general_rows,
            skipped_rows,
            clamped,
        })
    }

    pub fn layout(&self) -> &ThetaLayout {
        &self.layout
    }

    pub fn rows_used(&self) -> usize {
        self.fast_rows.len() + self.general_rows.len()
    }

    fn unpack(&self, gamma: &[f64]) -> Unpacked {
        let covariate_theta = self
            .covariates
            .iter()
            .zip(&self.layout.covariates)
            .map(|(p, r)| {
                let mut t = vec![0.0; r.len()];
                constrain_into(&p.basis, &gamma[r.clone()], &mut t);
                t
            })
            .collect();
        let mut outcome_theta = vec![0.0; self.layout.outcome.len()];
        constrain_into(&self.outcome.basis, &gamma[self.layout.outcome.clone()], &mut outcome_theta);
        let dim = self.covariates.len() + 1;
        let mut lam = DMatrix::identity(dim, dim);
        let lv = &gamma[self.layout.lambda.clone()];
        for i in 1..dim {
            for j in 0..i {
                lam[(i, j)] = lv[packed_index(i, j)];
            }
        }
        Unpacked { covariate_theta, outcome_theta, tau: gamma[self.layout.tau], factors: Factors::new(&lam) }
    }

    /// −ℓ(γ) with its gradient written into `grad`.
    pub fn negloglik(&self, gamma: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let u = self.unpack(gamma);
        let mut ll = self.fast(&u, grad);
        if !ll.is_finite() {
            return f64::INFINITY;
        }
        if !self.general_rows.is_empty() {
            let g = self.general_total(gamma);
            if !g.is_finite() {
                return f64::INFINITY;
            }
            ll += g;
            self.general_gradient(gamma, grad);
        }
        // chain the basis blocks from ϑ to γ
        for (p, r) in self.covariates.iter().zip(&self.layout.covariates) {
            chain_gradient(&p.basis, &gamma[r.clone()], &mut grad[r.clone()]);
        }
        let r = self.layout.outcome.clone();
        chain_gradient(&self.outcome.basis, &gamma[r.clone()], &mut grad[r]);
        grad.iter_mut().for_each(|g| *g = -*g);
        -ll
    }

    pub fn loglik(&self, gamma: &[f64]) -> f64 {
        let mut g = vec![0.0; gamma.len()];
        -self.negloglik(gamma, &mut g)
    }

    /// Fast-route log-likelihood; accumulates the gradient with respect to
    /// (ϑ blocks, τ, λ), the basis blocks still on the ϑ scale.
    fn fast(&self, u: &Unpacked, grad: &mut [f64]) -> f64 {
        let nc = self.covariates.len();
        let o = nc;
        let om = &u.factors.omega;
        let woo = om[(o, o)];
        let link = self.link;
        let mut ll = 0.0;
        let mut gomega = DMatrix::<f64>::zeros(nc + 1, nc + 1);
        let mut z = vec![0.0; nc + 1];
        let mut hp = vec![0.0; nc];
        let mut eps = vec![0.0; nc];
        let mut dz = vec![0.0; nc];
        let mut exact_outcomes = 0.0;
        for &i in &self.fast_rows {
            for j in 0..nc {
                let Term::Exact { a, da } = &self.covariates[j].terms[i] else { unreachable!() };
                z[j] = dot(a, &u.covariate_theta[j]);
                hp[j] = dot(da, &u.covariate_theta[j]);
                if !(hp[j] > 0.0) {
                    return f64::NEG_INFINITY;
                }
                ll += hp[j].ln();
            }
            for a in 0..nc {
                let e: f64 = (0..=a).map(|b| om[(a, b)] * z[b]).sum();
                eps[a] = e;
                ll += normal::log_pdf(e);
            }
            dz.iter_mut().for_each(|v| *v = 0.0);
            for a in 0..nc {
                for b in 0..=a {
                    gomega[(a, b)] -= eps[a] * z[b];
                    dz[b] -= om[(a, b)] * eps[a];
                }
            }
            let s: f64 = (0..nc).map(|k| om[(o, k)] * z[k]).sum();
            let w = self.treatment[i];
            let (go, gt) = grad.split_at_mut(self.layout.tau);
            let gout = &mut go[self.layout.outcome.clone()];
            match &self.outcome.terms[i] {
                Term::Exact { a, da } => {
                    let hpo = dot(da, &u.outcome_theta);
                    if !(hpo > 0.0) {
                        return f64::NEG_INFINITY;
                    }
                    let shift = dot(a, &u.outcome_theta) - u.tau * w;
                    let (zo, r, jac, djac) = latent_exact(link, shift);
                    let e = s + woo * zo;
                    ll += normal::log_pdf(e) + jac + hpo.ln();
                    exact_outcomes += 1.0;
                    for k in 0..nc {
                        gomega[(o, k)] -= e * z[k];
                        dz[k] -= e * om[(o, k)];
                    }
                    gomega[(o, o)] -= e * zo;
                    let dshift = -e * woo * r + djac;
                    for m in 0..a.len() {
                        gout[m] += dshift * a[m] + da[m] / hpo;
                    }
                    gt[0] -= dshift * w;
                }
                term @ Term::Bounds { lo, hi } => {
                    let (hl, hu) = term.bounds(&u.outcome_theta);
                    let (sl, su) = (hl - u.tau * w, hu - u.tau * w);
                    let (zl, zu) = (link.to_normal(sl), link.to_normal(su));
                    let (la, lb) = (s + woo * zl, s + woo * zu);
                    let lp = normal::log_interval(la, lb);
                    ll += lp;
                    let pa = if la.is_finite() { (normal::log_pdf(la) - lp).exp() } else { 0.0 };
                    let pb = if lb.is_finite() { (normal::log_pdf(lb) - lp).exp() } else { 0.0 };
                    let ds = pb - pa;
                    for k in 0..nc {
                        gomega[(o, k)] += ds * z[k];
                        dz[k] += ds * om[(o, k)];
                    }
                    let mut gw = 0.0;
                    if zl.is_finite() {
                        gw -= pa * zl;
                    }
                    if zu.is_finite() {
                        gw += pb * zu;
                    }
                    gomega[(o, o)] += gw;
                    let mut dtau = 0.0;
                    if let Some(av) = lo {
                        let dl = -woo * pa * latent_slope(link, sl, zl);
                        for m in 0..av.len() {
                            gout[m] += dl * av[m];
                        }
                        dtau -= dl * w;
                    }
                    if let Some(av) = hi {
                        let du = woo * pb * latent_slope(link, su, zu);
                        for m in 0..av.len() {
                            gout[m] += du * av[m];
                        }
                        dtau -= du * w;
                    }
                    gt[0] += dtau;
                }
                Term::Missing => {}
            }
            for j in 0..nc {
                let Term::Exact { a, da } = &self.covariates[j].terms[i] else { unreachable!() };
                let g = &mut grad[self.layout.covariates[j].clone()];
                for m in 0..a.len() {
                    g[m] += dz[j] * a[m] + da[m] / hp[j];
                }
            }
        }
        let rows = self.fast_rows.len() as f64;
        for a in 0..nc {
            ll += rows * om[(a, a)].ln();
            gomega[(a, a)] += rows / om[(a, a)];
        }
        ll += exact_outcomes * woo.ln();
        gomega[(o, o)] += exact_outcomes / woo;

        let glam = lambda_gradient(&u.factors, &gomega);
        let lr = self.layout.lambda.clone();
        for (g, v) in grad[lr].iter_mut().zip(glam) {
            *g += v;
        }
        ll
    }

    fn general_total(&self, gamma: &[f64]) -> f64 {
        let u = self.unpack(gamma);
        let sigma = u.factors.sigma();
        self.general_rows.iter().map(|&i| self.general_row(&u, &sigma, i)).sum()
    }

    /// Central differences of the general-route rows, added to `grad` on the
    /// ϑ scale so that the common chain step applies.
    fn general_gradient(&self, gamma: &[f64], grad: &mut [f64]) {
        let n = gamma.len();
        let mut g_gamma = vec![0.0; n];
        let mut x = gamma.to_vec();
        for k in 0..n {
            let h = 1e-5 * gamma[k].abs().max(1.0);
            x[k] = gamma[k] + h;
            let fp = self.general_total(&x);
            x[k] = gamma[k] - h;
            let fm = self.general_total(&x);
            x[k] = gamma[k];
            g_gamma[k] = (fp - fm) / (2.0 * h);
        }
        // undo the chain rule on the basis blocks: the caller applies it afterwards
        let blocks = self
            .covariates
            .iter()
            .map(|p| &p.basis)
            .zip(self.layout.covariates.iter().cloned())
            .chain(std::iter::once((&self.outcome.basis, self.layout.outcome.clone())));
        for (basis, r) in blocks {
            let theta_grad = unchain_gradient(basis, &gamma[r.clone()], &g_gamma[r.clone()]);
            for (g, v) in grad[r].iter_mut().zip(theta_grad) {
                *g += v;
            }
        }
        for k in self.layout.tau..n {
            grad[k] += g_gamma[k];
        }
    }

    /// log N(z_C; Σ_CC) + Jacobians + log P(bounded coordinates | z_C).
    fn general_row(&self, u: &Unpacked, sigma: &DMatrix<f64>, i: usize) -> f64 {
        let nc = self.covariates.len();
        let link = self.link;
        let w = self.treatment[i];
        let mut exact_idx = Vec::new();
        let mut exact_z = Vec::new();
        let mut bounded_idx = Vec::new();
        let mut bounds = Vec::new();
        let mut ll = 0.0;
        for j in 0..=nc {
            let (term, theta) =
                if j < nc { (&self.covariates[j].terms[i], &u.covariate_theta[j]) } else { (&self.outcome.terms[i], &u.outcome_theta) };
            match term {
                Term::Exact { a, da } => {
                    let hp = dot(da, theta);
                    if !(hp > 0.0) {
                        return f64::NEG_INFINITY;
                    }
                    let h = dot(a, theta);
                    if j < nc {
                        exact_z.push(h);
                        ll += hp.ln();
                    } else {
                        let (zo, _, jac, _) = latent_exact(link, h - u.tau * w);
                        exact_z.push(zo);
                        ll += jac + hp.ln();
                    }
                    exact_idx.push(j);
                }
                Term::Bounds { .. } => {
                    let (hl, hu) = term.bounds(theta);
                    let b = if j < nc { (hl, hu) } else { (link.to_normal(hl - u.tau * w), link.to_normal(hu - u.tau * w)) };
                    bounded_idx.push(j);
                    bounds.push(b);
                }
                Term::Missing => {}
            }
        }
        let sub = |r: &[usize], c: &[usize]| DMatrix::from_fn(r.len(), c.len(), |x, y| sigma[(r[x], c[y])]);
        let (cond_mean, cond_cov) = if exact_idx.is_empty() {
            (DVector::zeros(bounded_idx.len()), sub(&bounded_idx, &bounded_idx))
        } else {
            let scc = sub(&exact_idx, &exact_idx);
            let Some(chol) = nalgebra::Cholesky::new(scc.clone()) else {
                return f64::NEG_INFINITY;
            };
            match copula::dense_mvn_logpdf(&scc, &exact_z) {
                Ok(v) => ll += v,
                Err(_) => return f64::NEG_INFINITY,
            }
            if bounded_idx.is_empty() {
                return ll;
            }
            let sdc = sub(&bounded_idx, &exact_idx);
            let zc = DVector::from_vec(exact_z);
            let mean = &sdc * chol.solve(&zc);
            let cov = sub(&bounded_idx, &bounded_idx) - &sdc * chol.solve(&sdc.transpose());
            (mean, cov)
        };
        if bounded_idx.is_empty() {
            return ll;
        }
        let sd: Vec<f64> = (0..bounded_idx.len()).map(|k| cond_cov[(k, k)].max(0.0).sqrt()).collect();
        if sd.iter().any(|s| !(*s > 0.0)) {
            return f64::NEG_INFINITY;
        }
        let lo: Vec<f64> = bounds.iter().enumerate().map(|(k, b)| (b.0 - cond_mean[k]) / sd[k]).collect();
        let hi: Vec<f64> = bounds.iter().enumerate().map(|(k, b)| (b.1 - cond_mean[k]) / sd[k]).collect();
        if bounded_idx.len() == 1 {
            return ll + normal::log_interval(lo[0], hi[0]);
        }
        let corr = DMatrix::from_fn(sd.len(), sd.len(), |a, b| cond_cov[(a, b)] / (sd[a] * sd[b]));
        match copula::mvn_rectangle_with(&corr, &lo, &hi, &RECTANGLE) {
            Ok(p) if p > 0.0 => ll + p.ln(),
            _ => f64::NEG_INFINITY,
        }
    }
}

/// Latent score z = Φ⁻¹(G(u)) for an exact outcome: returns
/// (z, dz/du, ln g(u) − ln φ(z), d/du of that log-Jacobian).
fn latent_exact(link: Link, u: f64) -> (f64, f64, f64, f64) {
    if link == Link::Probit {
        return (u, 1.0, 0.0, 0.0);
    }
    let z = link.to_normal(u);
    let lj = link.log_density(u) - normal::log_pdf(z);
    let r = lj.exp();
    (z, r, lj, link.score(u) + z * r)
}

/// dz/du for a bound; zero at infinite bounds.
fn latent_slope(link: Link, u: f64, z: f64) -> f64 {
    if link == Link::Probit {
        return 1.0;
    }
    if !z.is_finite() {
        return 0.0;
    }
    (link.log_density(u) - normal::log_pdf(z)).exp()
}

/// Inverse of `chain_gradient`: recovers ∂/∂ϑ from ∂/∂γ.
fn unchain_gradient(basis: &BasisSpec, gamma: &[f64], g_gamma: &[f64]) -> Vec<f64> {
    let n = g_gamma.len();
    let mut out = vec![0.0; n];
    let cumulative = crate::basis::is_cumulative(basis);
    if cumulative {
        // g_γ[m] = e^{γ_m} Σ_{k≥m} g_ϑ[k] for m ≥ 1 and g_γ[0] = Σ_k g_ϑ[k]
        let tails: Vec<f64> = (0..n).map(|m| if m == 0 { g_gamma[0] } else { g_gamma[m] / gamma[m].exp() }).collect();
        for m in 0..n {
            out[m] = tails[m] - if m + 1 < n { tails[m + 1] } else { 0.0 };
        }
    } else {
        out[0] = g_gamma[0];
        out[1] = g_gamma[1] / gamma[1].exp();
    }
    out
}

/// Reverse-mode derivative of ℓ(Ω(λ)) given Ḡ = ∂ℓ/∂Ω (lower triangle).
fn lambda_gradient(f: &Factors, gomega: &DMatrix<f64>) -> Vec<f64> {
    let n = f.d.len();
    let l = &f.linv;
    // Ω_ab = Λ_ab d_b
    let mut glam = DMatrix::<f64>::zeros(n, n);
    let mut gd = vec![0.0; n];
    for a in 0..n {
        for b in 0..=a {
            glam[(a, b)] = gomega[(a, b)] * f.d[b];
            gd[b] += gomega[(a, b)] * f.lambda[(a, b)];
        }
    }
    // d_b = ‖row b of L‖
    let mut gl = DMatrix::<f64>::zeros(n, n);
    for b in 0..n {
        for k in 0..=b {
            gl[(b, k)] = gd[b] * l[(b, k)] / f.d[b];
        }
    }
    // L = Λ⁻¹ ⇒ Λ̄ −= Lᵀ L̄ Lᵀ
    let back = l.transpose() * gl * l.transpose();
    glam -= back;
    let mut out = vec![0.0; packed_len(n)];
    for i in 1..n {
        for j in 0..i {
            out[packed_index(i, j)] = glam[(i, j)];
        }
    }
    out
}

/// Log-likelihood of `data` under `m`.
pub fn joint_loglik(m: &JointModel, data: &Dataset) -> Result<f64> {
    joint_loglik_with(m, data, Route::Auto)
}

pub fn joint_loglik_with(m: &JointModel, data: &Dataset, route: Route) -> Result<f64> {
    let spec = OutcomeSpec { link: m.outcome.link, basis: m.outcome.basis.clone() };
    let bases: Vec<BasisSpec> = m.covariate_marginals.iter().map(|(b, _)| b.clone()).collect();
    let problem = JointProblem::new(data, &spec, &bases, route)?;
    Ok(problem.loglik(&m.gamma().values))
}

/// Analytic gradient of the log-likelihood with respect to the unconstrained parameters.
pub fn joint_score(m: &JointModel, data: &Dataset, route: Route) -> Result<Vec<f64>> {
    let spec = OutcomeSpec { link: m.outcome.link, basis: m.outcome.basis.clone() };
    let bases: Vec<BasisSpec> = m.covariate_marginals.iter().map(|(b, _)| b.clone()).collect();
    let problem = JointProblem::new(data, &spec, &bases, route)?;
    let gamma = m.gamma().values;
    let mut g = vec![0.0; gamma.len()];
    problem.negloglik(&gamma, &mut g);
    Ok(g.into_iter().map(|v| -v).collect())
}

/// Φ(Σ_j ω_Jj h_j(x_j) + ω_JJ h_J(y|w)).
pub fn conditional_outcome_cdf(m: &JointModel, y: f64, w: u8, x: &[f64]) -> Result<f64> {
    let nc = m.covariate_marginals.len();
    if x.len() != nc {
        return Err(Error::DimensionMismatch { expected: nc, got: x.len() });
    }
    if let Some(j) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("covariate {} is missing", j + 1)));
    }
    let om = m.copula.omega();
    let mut lin = 0.0;
    for (j, ((basis, coef), &xj)) in m.covariate_marginals.iter().zip(x).enumerate() {
        lin += om[(nc, j)] * transformation(basis, coef, xj)?;
    }
    let zy = crate::marginal::latent_normal_score(&m.outcome, y, w)?;
    if zy == f64::INFINITY {
        return Ok(1.0);
    }
    Ok(normal::cdf(lin + om[(nc, nc)] * zy))
}
