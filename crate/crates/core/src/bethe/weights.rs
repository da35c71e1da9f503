use crate::error::{Error, Result};
use num_complex::Complex64 as C;

/// Numerator `1 − (p+q)μ + pqλμ` shared by f and ξ.
pub fn nf(lam: C, mu: C, p: f64, q: f64) -> C {
    1.0 - (p + q) * mu + p * q * lam * mu
}

/// `f(λ,μ) = (1 − (p+q)μ + pqλμ) / (p(λ − μ))`.
pub fn f(lam: C, mu: C, p: f64, q: f64) -> C {
    nf(lam, mu, p, q) / (p * (lam - mu))
}

/// `ξ(λ,μ) = (λ − μ) / (1 − (p+q)μ + pqλμ)`.
pub fn xi(lam: C, mu: C, p: f64, q: f64) -> C {
    (lam - mu) / nf(lam, mu, p, q)
}

/// `d(λ) = (pλ)^L`.
pub fn d(lam: C, p: f64, l: usize) -> C {
    (p * lam).powu(l as u32)
}

/// All weight functions at one argument pair.
#[derive(Clone, Copy, Debug)]
pub struct Weights {
    pub f: C,
    pub g: C,
    pub f_bar: C,
    pub g_bar: C,
    pub xi: C,
    pub d: C,
}

pub fn weight_functions(lam: C, mu: C, p: f64, q: f64, l: usize) -> Result<Weights> {
    if (lam - mu).norm() <= f64::EPSILON * (1.0 + lam.norm()) {
        return Err(Error::Pole(format!("f and g have a pole at λ = μ = {lam}")));
    }
    let den = nf(lam, mu, p, q);
    if den.norm() <= f64::EPSILON {
        return Err(Error::Pole(format!("ξ denominator vanishes at ({lam}, {mu})")));
    }
    let fv = f(lam, mu, p, q);
    let g = (1.0 - q * lam) * (1.0 - p * mu) / (p * (lam - mu));
    let f_bar = nf(lam, mu, q, p) / (q * (lam - mu));
    let g_bar = (1.0 - p * lam) * (1.0 - q * mu) / (q * (lam - mu));
    Ok(Weights { f: fv, g, f_bar, g_bar, xi: (lam - mu) / den, d: d(lam, p, l) })
}
