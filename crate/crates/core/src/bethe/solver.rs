use super::roots::{BetheRootSet, NestingOrder};
use crate::error::{invalid, Error, Result};
use faer::linalg::solvers::{Solve, SolveLstsq};
use faer::Mat;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

const MAX_NEWTON: usize = 100;
const SEED_L: usize = 8;
const MULTISTART_TRIES: usize = 400;

/// Converged solution of the one-species logarithmic Bethe equations.
#[derive(Clone, Debug, Serialize)]
pub struct OneSpeciesSolution {
    pub l: usize,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub quantum_numbers: Vec<f64>,
    /// Variables with `pλ = (1 − x)/(1 − (q/p)x)`.
    pub x: Vec<C>,
    pub energy: C,
    /// `‖F‖∞` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

impl OneSpeciesSolution {
    /// The roots as a nested root set with counts `(L − n, n)`.
    pub fn root_set(&self) -> Result<BetheRootSet> {
        let r = self.q / self.p;
        let lam = self.x.iter().map(|&x| (1.0 - x) / (self.p * (1.0 - r * x))).collect();
        BetheRootSet::new(self.l, self.p, self.q, NestingOrder::standard(2), vec![self.l - self.n, self.n], vec![lam])
    }
}

/// `I_j = −(n+1)/2 + j` for `j < n`, and `(n+1)/2` for the last: the second-largest state.
pub fn second_largest_quantum_numbers(n: usize) -> Vec<f64> {
    let h = (n as f64 + 1.0) / 2.0;
    (1..n).map(|j| -h + j as f64).chain(std::iter::once(h)).collect()
}

/// `E = (p − q) Σ [x/(1 − x) − r x/(1 − r x)]`.
pub fn energy_from_x(x: &[C], p: f64, q: f64) -> C {
    let r = q / p;
    x.iter().map(|&x| (p - q) * (x / (1.0 - x) - r * x / (1.0 - r * x))).sum()
}

struct System<'a> {
    l: f64,
    rho: f64,
    r: f64,
    qn: &'a [f64],
}

impl System<'_> {
    fn residual(&self, x: &[C]) -> Vec<C> {
        let lx: Vec<C> = x.iter().map(|z| z.ln()).collect();
        let slx: C = lx.iter().sum();
        x.iter()
            .enumerate()
            .map(|(j, &xj)| {
                let mut s = self.l * ((1.0 - xj) / ((self.rho * lx[j]).exp() * (1.0 - self.r * xj))).ln() + slx;
                for &xk in x {
                    s -= ((1.0 - self.r * xk / xj) / (1.0 - self.r * xj / xk)).ln();
                }
                s - C::new(0.0, 2.0 * PI * self.qn[j])
            })
            .collect()
    }

    fn jacobian(&self, x: &[C]) -> Mat<C> {
        let (n, r) = (x.len(), self.r);
        Mat::from_fn(n, n, |j, k| {
            let (xj, xk) = (x[j], x[k]);
            if j == k {
                let mut d = self.l * (-1.0 / (1.0 - xj) - self.rho / xj + r / (1.0 - r * xj)) + 1.0 / xj;
                for (m, &xm) in x.iter().enumerate() {
                    if m != j {
                        d -= (r * xm / (xj * xj)) / (1.0 - r * xm / xj) - (-r / xm) / (1.0 - r * xj / xm);
                    }
                }
                d
            } else {
                1.0 / xk - ((-r / xj) / (1.0 - r * xk / xj) - (r * xj / (xk * xk)) / (1.0 - r * xj / xk))
            }
        })
    }
}

fn norm2(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn norm_inf(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Damped Newton; `Ok` only when `‖F‖∞ ≤ 1e−12·max(1, n)`.
fn newton(sys: &System, mut x: Vec<C>, max_iter: usize) -> Option<(Vec<C>, f64, usize)> {
    let tol = 1e-12 * (x.len() as f64).max(1.0);
    for it in 0..max_iter {
        let f = sys.residual(&x);
        if f.iter().any(|z| !z.is_finite()) {
            return None;
        }
        if norm_inf(&f) <= tol {
            return Some((x, norm_inf(&f), it));
        }
        let nf = norm2(&f);
        let rhs = Mat::from_fn(x.len(), 1, |i, _| -f[i]);
        let dx = sys.jacobian(&x).partial_piv_lu().solve(&rhs);
        let mut t = 1.0;
        let mut next = x.clone();
        while t > 1e-4 {
            next = x.iter().enumerate().map(|(i, &z)| z + t * dx[(i, 0)]).collect();
            let fn_ = norm2(&sys.residual(&next));
            if fn_.is_finite() && fn_ < nf * (1.0 - 1e-4 * t) {
                break;
            }
            t /= 2.0;
        }
        x = next;
    }
    let f = sys.residual(&x);
    (norm_inf(&f) <= tol).then(|| (x, norm_inf(&f), max_iter))
}

fn check_pre(l: usize, n: usize, p: f64, q: f64, qn: &[f64]) -> Result<()> {
    if !(p > q && q >= 0.0) {
        return invalid(format!("the logarithmic solver needs p > q >= 0, got p = {p}, q = {q}"));
    }
    if n == 0 || 2 * n > l {
        return invalid(format!("need 0 < n <= L/2, got n = {n}, L = {l}"));
    }
    if qn.len() != n {
        return invalid(format!("{} quantum numbers for {n} roots", qn.len()));
    }
    let offset = if n % 2 == 0 { 0.5 } else { 0.0 };
    if qn.iter().any(|&i| ((i - offset) - (i - offset).round()).abs() > 1e-12) {
        return invalid(format!("quantum numbers must lie in Z + {offset}"));
    }
    Ok(())
}

fn finish(l: usize, n: usize, p: f64, q: f64, qn: &[f64], (x, residual, iterations): (Vec<C>, f64, usize)) -> OneSpeciesSolution {
    let energy = energy_from_x(&x, p, q);
    OneSpeciesSolution { l, n, p, q, quantum_numbers: qn.to_vec(), x, energy, residual, iterations }
}

/// Solve from an explicit start, or by deterministic multistart when `start` is `None`.
pub fn solve_one_species(l: usize, n: usize, p: f64, q: f64, quantum_numbers: &[f64], start: Option<&[C]>) -> Result<OneSpeciesSolution> {
    check_pre(l, n, p, q, quantum_numbers)?;
    let sys = System { l: l as f64, rho: n as f64 / l as f64, r: q / p, qn: quantum_numbers };
    if let Some(x0) = start {
        if x0.len() != n {
            return invalid("start vector has the wrong length");
        }
        return newton(&sys, x0.to_vec(), MAX_NEWTON)
            .map(|s| finish(l, n, p, q, quantum_numbers, s))
            .ok_or_else(|| Error::NoConvergence { what: format!("Newton at L = {l}, n = {n}"), iterations: MAX_NEWTON });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..MULTISTART_TRIES {
        let x0: Vec<C> = (0..n).map(|_| C::from_polar(rng.gen_range(0.0..0.6), rng.gen_range(-PI..PI))).collect();
        if let Some(s) = newton(&sys, x0, 60) {
            if s.0.iter().all(|z| z.norm() > 1e-8) {
                return Ok(finish(l, n, p, q, quantum_numbers, s));
            }
        }
    }
    Err(Error::NoConvergence { what: format!("multistart at L = {l}, n = {n}"), iterations: MULTISTART_TRIES })
}

/// Least-squares polynomial fit, evaluated at `at`.
fn polyfit_eval(t: &[f64], y: &[f64], deg: usize, at: &[f64]) -> Vec<f64> {
    let m = deg + 1;
    let a = Mat::<f64>::from_fn(t.len(), m, |i, k| t[i].powi(k as i32));
    let b = Mat::<f64>::from_fn(t.len(), 1, |i, _| y[i]);
    let coef = a.qr().solve_lstsq(&b);
    at.iter().map(|&s| (0..m).rev().fold(0.0, |acc, k| acc * s + coef[(k, 0)])).collect()
}

/// Starting point at `(l, n)` from a solution of the same state at another size:
/// fit the bulk roots against `I/L`, keep the outlier root.
pub fn continuation_guess(prev: &OneSpeciesSolution, l: usize, qn: &[f64]) -> Vec<C> {
    let mut order: Vec<usize> = (0..prev.n).collect();
    order.sort_by(|&a, &b| prev.quantum_numbers[a].total_cmp(&prev.quantum_numbers[b]));
    let last = prev.x[order[prev.n - 1]];
    if prev.n < 2 {
        return vec![last; qn.len()];
    }
    let bulk = &order[..prev.n - 1];
    let t: Vec<f64> = bulk.iter().map(|&i| prev.quantum_numbers[i] / prev.l as f64).collect();
    let re: Vec<f64> = bulk.iter().map(|&i| prev.x[i].re).collect();
    let im: Vec<f64> = bulk.iter().map(|&i| prev.x[i].im).collect();
    let deg = (t.len() - 1).min(5);
    let at: Vec<f64> = qn.iter().map(|&i| i / l as f64).collect();
    let (gr, gi) = (polyfit_eval(&t, &re, deg, &at), polyfit_eval(&t, &im, deg, &at));
    let mut g: Vec<C> = gr.into_iter().zip(gi).map(|(a, b)| C::new(a, b)).collect();
    let mut idx: Vec<usize> = (0..qn.len()).collect();
    idx.sort_by(|&a, &b| qn[a].total_cmp(&qn[b]));
    g[idx[qn.len() - 1]] = last;
    g
}

/// Second-largest eigenvalue of the one-species sector with `n` particles on `l` sites.
///
/// Uses the closed form at `p = q`, maps `p < q` and `n > L/2` to the solver's domain,
/// and reaches large rings by doubling continuation from a multistart seed.
#[derive(Clone, Debug, Serialize)]
pub struct GapSolution {
    pub l: usize,
    pub n: usize,
    pub energy: C,
    pub residual: f64,
    /// Seed size and doubling steps taken.
    pub path: Vec<usize>,
}

pub fn second_largest_energy(l: usize, n: usize, p: f64, q: f64) -> Result<GapSolution> {
    if n == 0 || n >= l {
        return invalid(format!("one-species gap needs 0 < n < L, got n = {n}, L = {l}"));
    }
    if p < 0.0 || q < 0.0 || p + q <= 0.0 {
        return invalid("rates must be nonnegative with p + q > 0");
    }
    if p == q {
        let s = (PI / l as f64).sin();
        return Ok(GapSolution { l, n, energy: C::new(-4.0 * p * s * s, 0.0), residual: 0.0, path: vec![] });
    }
    let (p, q) = if p < q { (q, p) } else { (p, q) };
    let n = n.min(l - n);
    let mut chain = vec![(l, n)];
    while let Some(&(cl, cn)) = chain.last() {
        if cl % 2 == 0 && cn % 2 == 0 && cl / 2 >= SEED_L {
            chain.push((cl / 2, cn / 2));
        } else {
            break;
        }
    }
    chain.reverse();
    let (l0, n0) = chain[0];
    let qn0 = second_largest_quantum_numbers(n0);
    let mut sol = solve_one_species(l0, n0, p, q, &qn0, None)?;
    for &(cl, cn) in &chain[1..] {
        let qn = second_largest_quantum_numbers(cn);
        let guess = continuation_guess(&sol, cl, &qn);
        sol = solve_one_species(cl, cn, p, q, &qn, Some(&guess))?;
    }
    Ok(GapSolution { l, n, energy: sol.energy, residual: sol.residual, path: chain.iter().map(|c| c.0).collect() })
}
