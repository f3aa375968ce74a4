//! Dense BFGS with a strong-Wolfe line search.

#[derive(Debug, Clone, Copy)]
pub struct OptimOptions {
    pub max_iter: usize,
    /// Converged when ‖∇f‖∞ < rel_tol · max(1, |f|).
    pub rel_tol: f64,
    /// Looser tolerance accepted when the line search can make no further progress.
    pub stall_tol: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self { max_iter: 500, rel_tol: 1e-8, stall_tol: 1e-5 }
    }
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Probe {
    alpha: f64,
    value: f64,
    slope: f64,
    x: Vec<f64>,
    grad: Vec<f64>,
}

struct LineSearch<'a, F> {
    f: &'a mut F,
    x: &'a [f64],
    p: &'a [f64],
    f0: f64,
    d0: f64,
    evals: usize,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

impl<F: FnMut(&[f64], &mut [f64]) -> f64> LineSearch<'_, F> {
    fn probe(&mut self, alpha: f64) -> Probe {
        self.evals += 1;
        let x: Vec<f64> = self.x.iter().zip(self.p).map(|(xi, pi)| xi + alpha * pi).collect();
        let mut grad = vec![0.0; x.len()];
        let mut value = (self.f)(&x, &mut grad);
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            value = f64::INFINITY;
        }
        let slope = if value.is_finite() { dot(&grad, self.p) } else { f64::NAN };
        Probe { alpha, value, slope, x, grad }
    }

    fn armijo(&self, p: &Probe) -> bool {
        p.value <= self.f0 + C1 * p.alpha * self.d0
    }

    fn curvature(&self, p: &Probe) -> bool {
        p.slope.abs() <= -C2 * self.d0
    }

    /// Returns a strong-Wolfe point, or failing that the best Armijo point seen.
    fn run(&mut self, alpha0: f64) -> Option<Probe> {
        let mut prev = Probe { alpha: 0.0, value: self.f0, slope: self.d0, x: self.x.to_vec(), grad: vec![] };
        let mut alpha = alpha0;
        for i in 0..40 {
            let cur = self.probe(alpha);
            if !self.armijo(&cur) || (i > 0 && cur.value >= prev.value) {
                return self.zoom(prev, cur);
            }
            if self.curvature(&cur) {
                return Some(cur);
            }
            if cur.slope >= 0.0 {
                return self.zoom(cur, prev);
            }
            alpha *= 2.0;
            prev = cur;
        }
        Some(prev).filter(|p| p.alpha > 0.0)
    }

    fn zoom(&mut self, mut lo: Probe, mut hi: Probe) -> Option<Probe> {
        for _ in 0..40 {
            let (a, b) = (lo.alpha, hi.alpha);
            let mut trial = if hi.value.is_finite() && lo.slope.is_finite() {
                // minimizer of the quadratic through f(lo), f'(lo), f(hi)
                let da = b - a;
                let denom = 2.0 * (hi.value - lo.value - lo.slope * da);
                if denom > 0.0 {
                    a - lo.slope * da * da / denom
                } else {
                    0.5 * (a + b)
                }
            } else {
                a + 0.1 * (b - a)
            };
            let (left, right) = if a < b { (a, b) } else { (b, a) };
            let margin = 0.1 * (right - left);
            if !(trial > left + margin && trial < right - margin) {
                trial = 0.5 * (a + b);
            }
            if (right - left) < 1e-16 * right.max(1.0) {
                break;
            }
            let cur = self.probe(trial);
            if !self.armijo(&cur) || cur.value >= lo.value {
                hi = cur;
            } else {
                if self.curvature(&cur) {
                    return Some(cur);
                }
                if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = cur;
            }
        }
        Some(lo).filter(|p| p.alpha > 0.0 && p.value < self.f0)
    }
}

/// Minimizes `f`, which returns the value and writes the gradient.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &OptimOptions) -> OptimResult
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    if n == 0 {
        return OptimResult { x, value: fx, grad: g, iterations: 0, grad_norm: 0.0, converged: true };
    }
    if !fx.is_finite() {
        return OptimResult { x, value: fx, grad: g, iterations: 0, grad_norm: f64::INFINITY, converged: false };
    }
    let mut h = identity(n);
    let mut fresh = true;
    let mut iterations = 0;
    let mut stalled = false;

    while iterations < opts.max_iter {
        let gn = inf_norm(&g);
        if gn < opts.rel_tol * fx.abs().max(1.0) {
            break;
        }
        let mut p = matvec_neg(&h, &g);
        let mut d0 = dot(&p, &g);
        if !(d0 < 0.0) {
            h = identity(n);
            fresh = true;
            p = g.iter().map(|v| -v).collect();
            d0 = dot(&p, &g);
        }
        let alpha0 = if fresh { (1.0 / inf_norm(&p)).min(1.0) } else { 1.0 };
        let found = {
            let mut ls = LineSearch { f: &mut f, x: &x, p: &p, f0: fx, d0, evals: 0 };
            ls.run(alpha0)
        };
        let Some(step) = found else {
            if fresh {
                stalled = true;
                break;
            }
            h = identity(n);
            fresh = true;
            continue;
        };
        iterations += 1;
        let s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = step.grad.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            bfgs_update(&mut h, &s, &y, sy);
            fresh = false;
        }
        x = step.x;
        g = step.grad;
        let improvement = fx - step.value;
        fx = step.value;
        if improvement.abs() <= f64::EPSILON * fx.abs().max(1.0) && fresh {
            stalled = true;
            break;
        }
    }
    let grad_norm = inf_norm(&g);
    let scale = fx.abs().max(1.0);
    let converged = grad_norm < opts.rel_tol * scale || (grad_norm < opts.stall_tol * scale && (stalled || iterations >= opts.max_iter));
    OptimResult { x, value: fx, grad: g, iterations, grad_norm, converged }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn matvec_neg(h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], g)).collect()
}

fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    let coef = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}
