//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use nalgebra::DMatrix;
use nami::analytic::{expected_fisher_pair, sample_size, schur_block, se_adjusted, se_unadjusted, DesignOutcome, DesignSpec};
use nami::basis::{BasisSpec, MonotoneCoefficients};
use nami::copula::{self, mvn_rectangle, CopulaStructure};
use nami::data::{Column, Dataset, Observation};
use nami::joint::{fit_nami_model, joint_loglik, joint_loglik_with, JointModel, NamiOptions, OutcomeSpec, Route};
use nami::link::Link;
use nami::marginal::MarginalOutcomeModel;
use nami::sim::stats::{ks_one_sample, ks_stochastically_larger, ks_two_sample};
use nami::sim::{run_scenario, sample_dataset, Dgp, DgpSpec, OutcomeKind, ScenarioConfig, ScenarioResult};
use nami::Method;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn scenario(dgp: Dgp, reps: usize, seed: u64, methods: &[Method]) -> ScenarioResult {
    let mut cfg = ScenarioConfig::new(dgp, reps, seed);
    cfg.methods = methods.to_vec();
    run_scenario(&cfg).expect("scenario")
}

fn copula_dgp(kind: OutcomeKind, tau: f64, rho: f64, p: usize, n: usize) -> DgpSpec {
    let mut s = DgpSpec::new(kind, tau, rho, p, n);
    if kind == OutcomeKind::Survival {
        s.noncensoring = Some(0.3);
    }
    s
}

fn rate(r: &ScenarioResult, m: Method) -> f64 {
    r.summary(m).unwrap().rejection_rate
}

// 1

fn analytic_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let tau = rng.random_range(-2.0..2.0);
        let n = rng.random_range(20.0..2000.0);
        worst = worst.max((se_adjusted(tau, 0.0, n) - se_unadjusted(tau, n)).abs());
    }
    for dim in 2..7 {
        for _ in 0..10 {
            let lam: Vec<f64> = (0..copula::packed_len(dim)).map(|_| rng.random_range(-3.0..3.0)).collect();
            let c = CopulaStructure::new(dim, lam).unwrap();
            let s = c.correlation();
            let o = c.omega();
            let back = (o.transpose() * &o).try_inverse().unwrap();
            for i in 0..dim {
                worst = worst.max((s[(i, i)] - 1.0).abs());
                for j in 0..dim {
                    worst = worst.max((s[(i, j)] - s[(j, i)]).abs()).max((s[(i, j)] - back[(i, j)]).abs());
                }
            }
        }
    }
    for (lam, rho) in [(0.0, 0.0), (-0.314, 0.3), (-0.750, 0.6), (-2.065, 0.9)] {
        let r = copula::rho_from_lambda(lam);
        if ((r * 1000.0).round() - rho * 1000.0).abs() > 0.5 {
            return Err(format!("rho({lam}) = {r:.4}"));
        }
        let l = copula::lambda_from_rho(rho).unwrap();
        if ((l * 1000.0).round() - lam * 1000.0).abs() > 0.5 {
            return Err(format!("lambda({rho}) = {l:.4}"));
        }
    }
    let mut fisher: f64 = 0.0;
    for _ in 0..50 {
        let theta = [rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0)];
        let cov = [rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0)];
        let tau = rng.random_range(-2.0..2.0);
        let lam = rng.random_range(-3.0..3.0);
        let inv = expected_fisher_pair(theta, tau, None).try_inverse().unwrap();
        let want = (tau * tau + 8.0) / 4.0;
        fisher = fisher.max((inv[(2, 2)] - want).abs() / want.max(1.0));
        let blk = schur_block(&expected_fisher_pair(theta, tau, Some((lam, cov)))).unwrap();
        let l2 = lam * lam;
        let want = ((1.0 + l2) * tau * tau + 8.0) / (4.0 * l2 + 4.0);
        fisher = fisher.max((blk[(2, 2)] - want).abs() / want.max(1.0));
    }
    ensure(worst < 1e-12 && fisher < 1e-10, format!("max identity error {worst:.1e}, Fisher inverse error {fisher:.1e}"))
}

// 2

fn worked_example_arithmetic() -> Outcome {
    let a = se_unadjusted(0.048, 80.0);
    let b = se_adjusted(-0.002, -0.8, 80.0);
    let rho = copula::rho_from_lambda(-0.8);
    let r2 = copula::r_squared(&CopulaStructure::new(2, vec![-0.8]).unwrap());
    let ok = (a - 0.224).abs() <= 5e-4
        && (b - 0.175).abs() <= 5e-4
        && (rho - 0.625).abs() <= 1e-3
        && (r2 - 0.390).abs() <= 1e-3
        && (r2 - rho * rho).abs() < 1e-12;
    ensure(ok, format!("se {a:.4}, adjusted se {b:.4}, rho {rho:.4}, R2 {r2:.4}"))
}

// 3

fn sample_sizes() -> Outcome {
    let spec = |outcome| DesignSpec { alpha: 0.05, power: 0.6, tau: 0.5, rho: None, outcome };
    let got = [
        sample_size(&spec(DesignOutcome::Continuous)).unwrap().per_arm,
        sample_size(&spec(DesignOutcome::Binary { p_control: 0.5, ratio: 1.0 })).unwrap().per_arm,
        sample_size(&spec(DesignOutcome::Survival { p_control: 0.3, p_treated: 0.3, ratio: 1.0 })).unwrap().per_arm,
    ];
    ensure(got == [41, 161, 131], format!("per arm: continuous {}, binary {}, survival {}", got[0], got[1], got[2]))
}

// 4: brute-force likelihood by quadrature over the latent normal scale

enum Latent {
    Point(f64, f64),
    Range(f64, f64),
}

fn phi_inv(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

fn log_phi(z: f64) -> f64 {
    -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// (h(x), h'(x)) for a Bernstein polynomial on [lo, hi] or, without support, ϑ₁ + ϑ₂x.
fn trafo(theta: &[f64], support: Option<(f64, f64)>, x: f64) -> (f64, f64) {
    match support {
        None => (theta[0] + theta[1] * x, theta[1]),
        Some((lo, hi)) => {
            let m = theta.len() - 1;
            let u = (x - lo) / (hi - lo);
            let b = |n: usize, k: usize| choose(n, k) * u.powi(k as i32) * (1.0 - u).powi((n - k) as i32);
            let h = (0..=m).map(|k| theta[k] * b(m, k)).sum();
            let d = (0..m).map(|k| (theta[k + 1] - theta[k]) * b(m - 1, k)).sum::<f64>() * m as f64 / (hi - lo);
            (h, d)
        }
    }
}

struct Oracle {
    covariates: Vec<(Vec<f64>, Option<(f64, f64)>)>,
    link: Link,
    outcome: Vec<f64>,
    log_y: bool,
    tau: f64,
    sigma_inv: DMatrix<f64>,
    log_norm: f64,
}

impl Oracle {
    /// Σ from Λ z ~ N(0, I) rescaled to unit variances.
    fn new(covariates: Vec<(Vec<f64>, Option<(f64, f64)>)>, link: Link, outcome: Vec<f64>, log_y: bool, tau: f64, lambda: &[f64]) -> Self {
        let j = covariates.len() + 1;
        let mut lam = DMatrix::<f64>::identity(j, j);
        let mut k = 0;
        for r in 1..j {
            for c in 0..r {
                lam[(r, c)] = lambda[k];
                k += 1;
            }
        }
        let li = lam.try_inverse().unwrap();
        let cov = &li * li.transpose();
        let sigma = DMatrix::from_fn(j, j, |r, c| cov[(r, c)] / (cov[(r, r)] * cov[(c, c)]).sqrt());
        let log_norm = -0.5 * sigma.determinant().ln() - 0.5 * j as f64 * (2.0 * std::f64::consts::PI).ln();
        Self { covariates, link, outcome, log_y, tau, sigma_inv: sigma.try_inverse().unwrap(), log_norm }
    }

    fn g(&self, s: f64) -> (f64, f64) {
        match self.link {
            Link::Logit => {
                let p = 1.0 / (1.0 + (-s).exp());
                (p, p * (1.0 - p))
            }
            Link::Cloglog => (1.0 - (-s.exp()).exp(), (s - s.exp()).exp()),
            Link::Probit => {
                let n = Normal::new(0.0, 1.0).unwrap();
                (n.cdf(s), log_phi(s).exp())
            }
        }
    }

    fn outcome_z(&self, y: f64, w: u8) -> (f64, f64) {
        let (arg, dy) = if self.log_y { (y.ln(), 1.0 / y) } else { (y, 1.0) };
        let (h, d) = trafo(&self.outcome, None, arg);
        let s = h - self.tau * f64::from(w);
        let (p, dens) = self.g(s);
        let z = phi_inv(p);
        (z, (dens * d * dy).ln() - log_phi(z))
    }

    fn outcome_latent(&self, y: Observation, w: u8) -> Latent {
        match y {
            Observation::Exact(v) => {
                let (z, lj) = self.outcome_z(v, w);
                Latent::Point(z, lj)
            }
            Observation::RightCensored(v) => Latent::Range(self.outcome_z(v, w).0, f64::INFINITY),
            Observation::Interval(a, b) => Latent::Range(self.outcome_z(a, w).0, self.outcome_z(b, w).0),
            Observation::Missing => Latent::Range(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn covariate_latent(&self, j: usize, x: Observation) -> Latent {
        let (theta, support) = &self.covariates[j];
        match x {
            Observation::Exact(v) => {
                let (h, d) = trafo(theta, *support, v);
                Latent::Point(h, d.ln())
            }
            Observation::Interval(a, b) => Latent::Range(trafo(theta, *support, a).0, trafo(theta, *support, b).0),
            Observation::Missing => Latent::Range(f64::NEG_INFINITY, f64::INFINITY),
            Observation::RightCensored(v) => Latent::Range(trafo(theta, *support, v).0, f64::INFINITY),
        }
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(z);
        self.log_norm - 0.5 * (v.transpose() * &self.sigma_inv * &v)[(0, 0)]
    }

    fn row(&self, w: u8, x: &[Observation], y: Observation) -> f64 {
        let mut coords: Vec<Latent> = x.iter().enumerate().map(|(j, &o)| self.covariate_latent(j, o)).collect();
        coords.push(self.outcome_latent(y, w));
        let mut z = vec![0.0; coords.len()];
        let mut log_jac = 0.0;
        let mut ranges = Vec::new();
        for (k, c) in coords.iter().enumerate() {
            match *c {
                Latent::Point(v, lj) => {
                    z[k] = v;
                    log_jac += lj;
                }
                Latent::Range(a, b) => ranges.push((k, a.max(-9.0), b.min(9.0))),
            }
        }
        let integral = simpson(&ranges, &mut z, &|z: &[f64]| self.log_density(z).exp());
        integral.ln() + log_jac
    }
}

/// Composite Simpson over the listed coordinates of `z`, nested.
fn simpson(ranges: &[(usize, f64, f64)], z: &mut Vec<f64>, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let Some((&(k, a, b), rest)) = ranges.split_first() else {
        return f(z);
    };
    let n = 800;
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        z[k] = a + i as f64 * h;
        let wt = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s += wt * simpson(rest, z, f);
    }
    s * h / 3.0
}

type Row = (u8, Vec<Observation>, Observation);

fn dataset(rows: &[Row]) -> Dataset {
    let nc = rows[0].1.len();
    let cov = (0..nc).map(|j| Column::new(format!("x{}", j + 1), rows.iter().map(|r| r.1[j]).collect())).collect();
    Dataset::new(rows.iter().map(|r| r.0).collect(), Column::new("y", rows.iter().map(|r| r.2).collect()), cov).unwrap()
}

fn compare(model: &JointModel, oracle: &Oracle, rows: &[Row]) -> f64 {
    let data = dataset(rows);
    let want: f64 = rows.iter().map(|(w, x, y)| oracle.row(*w, x, *y)).sum();
    [Route::Auto, Route::General]
        .iter()
        .map(|&r| {
            let got = joint_loglik_with(model, &data, r).unwrap();
            ((got - want) / want).abs()
        })
        .fold(0.0, f64::max)
}

fn likelihood_oracles() -> Outcome {
    use Observation::{Exact as E, Interval as I, Missing as M, RightCensored as R};

    let lin = |t: Vec<f64>| MonotoneCoefficients::from_theta(&BasisSpec::Linear, t).unwrap();
    let out2 = MarginalOutcomeModel::new(Link::Logit, BasisSpec::Linear, vec![-0.3, 1.1], 0.4).unwrap();
    let m2 = JointModel::new(vec![(BasisSpec::Linear, lin(vec![0.2, 0.8]))], out2, CopulaStructure::new(2, vec![-0.9]).unwrap()).unwrap();
    let o2 = Oracle::new(vec![(vec![0.2, 0.8], None)], Link::Logit, vec![-0.3, 1.1], false, 0.4, &[-0.9]);
    let rows2: Vec<Row> = vec![
        (0, vec![E(0.5)], E(1.2)),
        (1, vec![E(-0.7)], R(0.3)),
        (1, vec![E(1.1)], I(-0.5, 0.8)),
        (0, vec![M], E(0.1)),
        (1, vec![I(-1.0, 0.4)], E(-0.6)),
        (0, vec![E(0.3)], M),
        (0, vec![I(0.2, 1.5)], R(-0.2)),
    ];
    let e2 = compare(&m2, &o2, &rows2);

    let bern_theta = vec![-1.5, -0.2, 0.4, 1.7];
    let bern = BasisSpec::bernstein(3, -2.0, 3.0).unwrap();
    let c1 = MonotoneCoefficients::from_theta(&bern, bern_theta.clone()).unwrap();
    let out3 = MarginalOutcomeModel::new(Link::Cloglog, BasisSpec::LogLinear, vec![-0.5, 1.3], -0.35).unwrap();
    let lam3 = [0.6, -0.8, 0.4];
    let m3 =
        JointModel::new(vec![(bern, c1), (BasisSpec::Linear, lin(vec![0.1, 0.9]))], out3, CopulaStructure::new(3, lam3.to_vec()).unwrap())
            .unwrap();
    let o3 = Oracle::new(vec![(bern_theta, Some((-2.0, 3.0))), (vec![0.1, 0.9], None)], Link::Cloglog, vec![-0.5, 1.3], true, -0.35, &lam3);
    let rows3: Vec<Row> = vec![
        (0, vec![E(0.5), E(1.0)], E(0.8)),
        (1, vec![E(-1.2), M], R(1.1)),
        (1, vec![M, E(-0.4)], E(2.0)),
        (0, vec![I(0.0, 1.0), E(0.3)], R(0.5)),
        (1, vec![E(2.2), E(-1.5)], I(0.4, 1.6)),
        (0, vec![M, M], E(1.3)),
        (1, vec![E(1.0), I(-0.5, 0.5)], M),
    ];
    let e3 = compare(&m3, &o3, &rows3);

    // score at the fitted parameters by central differences
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let data = sample_dataset(&DgpSpec::new(OutcomeKind::Continuous, 0.5, 0.6, 1, 200), &mut rng).unwrap();
    let spec = OutcomeSpec { link: Link::Probit, basis: BasisSpec::Linear };
    let bases = [BasisSpec::bernstein_for(6, &data.covariates[0].finite_points()).unwrap()];
    let (model, _) = fit_nami_model(&data, &spec, &bases, &NamiOptions::default()).unwrap();
    let g0 = model.gamma().values;
    let mut grad: f64 = 0.0;
    for i in 0..g0.len() {
        let h = 1e-5;
        let mut gp = g0.clone();
        gp[i] += h;
        let mut gm = g0.clone();
        gm[i] -= h;
        let d = (joint_loglik(&model.with_gamma(&gp).unwrap(), &data).unwrap()
            - joint_loglik(&model.with_gamma(&gm).unwrap(), &data).unwrap())
            / (2.0 * h);
        grad = grad.max(d.abs());
    }

    let mut orthant: f64 = 0.0;
    for rho in [-0.9, -0.5, 0.0, 0.3, 0.8] {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
        let p = mvn_rectangle(&s, &[f64::NEG_INFINITY; 2], &[0.0; 2]).unwrap();
        orthant = orthant.max((p - (0.25 + rho.asin() / (2.0 * std::f64::consts::PI))).abs());
    }
    ensure(
        e2 < 1e-4 && e3 < 1e-4 && grad < 1e-3 && orthant < 1e-5,
        format!("rel. error J=2 {e2:.1e}, J=3 {e3:.1e}; max |score| at fit {grad:.1e}; orthant error {orthant:.1e}"),
    )
}

// 5

fn estimator_recovery() -> Outcome {
    let r =
        scenario(Dgp::Copula(copula_dgp(OutcomeKind::Continuous, 0.5, 0.6, 1, 82)), 1000, 505, &[Method::Mi, Method::Nami, Method::Ltm]);
    let (mi, nami, ltm) = (r.summary(Method::Mi).unwrap(), r.summary(Method::Nami).unwrap(), r.summary(Method::Ltm).unwrap());
    let mcse = ltm.empirical_sd / (ltm.successes as f64).sqrt();
    let excess = (ltm.mean_estimate - 0.5) / mcse;
    ensure(
        (nami.mean_estimate - 0.5).abs() <= 0.03 && nami.empirical_sd < mi.empirical_sd && excess >= 3.0,
        format!(
            "NAMI mean {:.3}, SD {:.3} vs MI SD {:.3}; LTM mean {:.3} ({excess:.1} MC-SE above 0.5)",
            nami.mean_estimate, nami.empirical_sd, mi.empirical_sd, ltm.mean_estimate
        ),
    )
}

// 6

fn size_reproduction() -> Outcome {
    let mi = rate(&scenario(Dgp::Copula(copula_dgp(OutcomeKind::Continuous, 0.0, 0.6, 1, 82)), 1000, 606, &[Method::Mi]), Method::Mi);
    let p15 = rate(&scenario(Dgp::Copula(copula_dgp(OutcomeKind::Continuous, 0.0, 0.6, 15, 82)), 1000, 607, &[Method::Nami]), Method::Nami);
    let p5 = rate(&scenario(Dgp::Copula(copula_dgp(OutcomeKind::Continuous, 0.0, 0.6, 5, 800)), 1000, 608, &[Method::Nami]), Method::Nami);
    ensure(
        (mi - 0.05).abs() <= 0.015 && (0.06..=0.12).contains(&p15) && (p5 - 0.05).abs() <= 0.015,
        format!("MI {mi:.3}; NAMI P=15 N=82 {p15:.3}; NAMI P=5 N=800 {p5:.3}"),
    )
}

// 7

fn power_ordering() -> Outcome {
    let cont = scenario(Dgp::Copula(copula_dgp(OutcomeKind::Continuous, 0.5, 0.9, 1, 82)), 500, 707, &[Method::Mi, Method::Nami]);
    let surv = scenario(Dgp::Copula(copula_dgp(OutcomeKind::Survival, 0.5, 0.9, 1, 262)), 500, 708, &[Method::Mi, Method::Nami]);
    let null = scenario(Dgp::Copula(copula_dgp(OutcomeKind::Survival, 0.0, 0.9, 1, 262)), 500, 709, &[Method::Ltm]);
    let (cn, cm, sn, sm, lz) =
        (rate(&cont, Method::Nami), rate(&cont, Method::Mi), rate(&surv, Method::Nami), rate(&surv, Method::Mi), rate(&null, Method::Ltm));
    ensure(
        cn >= 0.99 && sn >= 0.92 && lz >= 0.09,
        format!("continuous NAMI {cn:.3} (MI {cm:.3}); survival NAMI {sn:.3} (MI {sm:.3}); survival LTM size {lz:.3}"),
    )
}

// 8

fn misspecification() -> Outcome {
    let m1 = scenario(Dgp::M1 { tau_x: 0.0, eta: 1.0, n: 262 }, 4000, 808, &[Method::Mi, Method::Nami]);
    let cons = ks_stochastically_larger(&m1.p_values(Method::Nami), |x| x).p_value;
    let unif = ks_one_sample(&m1.p_values(Method::Mi), |x| x).p_value;

    let n = 322;
    let m2 = scenario(Dgp::M2 { tau_x: 0.0, n }, 1000, 809, &[Method::Mi, Method::Nami]);
    let lam: Vec<f64> = m2.records.iter().filter_map(|r| r.lambda1).collect();
    let mean = lam.iter().sum::<f64>() / lam.len() as f64;
    let mut abs: Vec<f64> = lam.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let q95 = abs[(0.95 * abs.len() as f64) as usize];
    let same = ks_two_sample(&m2.estimates(Method::Nami), &m2.estimates(Method::Mi)).p_value;
    ensure(
        cons < 0.01 && unif > 0.01 && mean.abs() < 0.02 && q95 <= 3.0 / (n as f64).sqrt() && same > 0.01,
        format!(
            "M1 NAMI one-sided KS p {cons:.1e}, MI KS p {unif:.3}; M2 mean lambda {mean:.4}, 95% |lambda| {q95:.3} (bound {:.3}), NAMI vs MI KS p {same:.3}",
            3.0 / (n as f64).sqrt()
        ),
    )
}

// 9

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(
        &cfg,
        "replications = 24\nmethods = [\"mi\", \"nami\", \"ltm\"]\n[dgp]\nkind = \"copula\"\noutcome = \"survival\"\ntau = 0.5\nrho = 0.6\np = 3\nn = 120\nnoncensoring = 0.7\n",
    )
    .unwrap();
    let run = |threads: usize, tag: &str| {
        let json = dir.path().join(format!("{tag}.json"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_nami"))
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--seed", "909", "--threads", &threads.to_string(), "--output"])
            .arg(&json)
            .arg("--records")
            .arg(&csv)
            .status()
            .unwrap();
        assert!(status.success(), "simulate exited with {status}");
        (std::fs::read(json).unwrap(), std::fs::read(csv).unwrap())
    };
    let a = run(1, "a");
    let b = run(3, "b");
    let c = run(3, "c");
    ensure(
        a == b && b == c,
        format!("report {} bytes, records {} bytes, threads 1 vs 3 and repeat identical: {}", a.0.len(), a.1.len(), a == b && b == c),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("analytic identities", analytic_identities, Duration::from_secs(1)),
        ("arithmetic identities", worked_example_arithmetic, Duration::from_secs(1)),
        ("sample sizes", sample_sizes, Duration::from_secs(1)),
        ("likelihood oracles", likelihood_oracles, Duration::from_secs(60)),
        ("estimator recovery", estimator_recovery, Duration::from_secs(600)),
        ("size reproduction", size_reproduction, Duration::from_secs(1800)),
        ("power ordering", power_ordering, Duration::from_secs(2700)),
        ("misspecification", misspecification, Duration::from_secs(900)),
        ("determinism", determinism, Duration::MAX),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let k = i + 1;
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, msg) = match outcome {
            Ok(m) => (took < budget, m),
            Err(m) => (false, m),
        };
        let over = if took < budget { String::new() } else { format!(", over the {} s budget", budget.as_secs()) };
        println!("criterion {k} {} {name}: {msg} [{:.1} s{over}]", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
