//! Relaxation-gap scaling: gap sweeps over the ring length, the dynamical
//! exponent fit and the KPZ / Edwards-Wilkinson asymptotics.

use crate::bethe::second_largest_energy;
use crate::error::{invalid, Error, Result};
use crate::rate::Rates;
use crate::sectors::Sector;
use crate::spectra::{second_largest, sector_spectrum};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Amplitude constant of the KPZ gap.
pub const KPZ_C: f64 = 6.50918933794;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Diagonalization,
    Bethe,
}

impl std::str::FromStr for GapMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonalization" | "diag" => Ok(Self::Diagonalization),
            "bethe" => Ok(Self::Bethe),
            _ => invalid(format!("unknown method {s:?}")),
        }
    }
}

impl std::fmt::Display for GapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Diagonalization => "diagonalization",
            Self::Bethe => "bethe",
        })
    }
}

/// Second-largest pair of one one-species sector. `e_plus` has `Im ≥ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct GapSample {
    pub l: usize,
    pub rho: f64,
    pub p: f64,
    pub q: f64,
    pub e_plus: C,
    pub e_minus: C,
    pub method: GapMethod,
    /// `None` when the sample is valid; otherwise why it was flagged.
    pub flag: Option<String>,
}

impl GapSample {
    pub fn is_valid(&self) -> bool {
        self.flag.is_none()
    }

    /// Relaxation time `−1/Re E`.
    pub fn tau(&self) -> f64 {
        -1.0 / self.e_plus.re
    }
}

/// Particle number `ρL`, if integral.
pub fn particles(l: usize, rho: f64) -> Option<usize> {
    let n = rho * l as f64;
    let r = n.round();
    ((n - r).abs() < 1e-9 && r >= 1.0 && (r as usize) < l).then_some(r as usize)
}

fn sample(l: usize, rho: f64, p: f64, q: f64, method: GapMethod) -> GapSample {
    let mk = |e: Result<C>| match e {
        Ok(e) => {
            let e = C::new(e.re, e.im.abs());
            GapSample { l, rho, p, q, e_plus: e, e_minus: e.conj(), method, flag: None }
        }
        Err(err) => {
            let nan = C::new(f64::NAN, f64::NAN);
            GapSample { l, rho, p, q, e_plus: nan, e_minus: nan, method, flag: Some(err.to_string()) }
        }
    };
    let n = match particles(l, rho) {
        Some(n) => n,
        None => return mk(invalid(format!("ρL = {} is not an integer in (0, L)", rho * l as f64))),
    };
    match method {
        GapMethod::Bethe => mk(second_largest_energy(l, n, p, q).map(|g| g.energy)),
        GapMethod::Diagonalization => mk((|| {
            let rates = Rates::from_f64(p, q)?;
            let spec = sector_spectrum(&Sector::from_parts(&[l - n, n])?, &rates)?;
            Ok(second_largest(&spec)?.plus)
        })()),
    }
}

/// One sample per ring length, computed in parallel. Failed samples are flagged, not dropped.
pub fn gap_scan(ls: &[usize], rho: f64, p: f64, q: f64, method: GapMethod) -> Result<Vec<GapSample>> {
    if ls.is_empty() {
        return invalid("empty list of ring lengths");
    }
    if !(rho > 0.0 && rho < 1.0) {
        return invalid(format!("density {rho} outside (0, 1)"));
    }
    Rates::from_f64(p, q)?;
    if let Some(&l) = ls.iter().find(|&&l| particles(l, rho).is_none()) {
        return invalid(format!("density {rho} is not representable at L = {l}"));
    }
    let out = std::thread::scope(|s| {
        let handles: Vec<_> = ls.iter().map(|&l| s.spawn(move || sample(l, rho, p, q, method))).collect();
        handles.into_iter().map(|h| h.join().expect("gap worker panicked")).collect()
    });
    Ok(out)
}

/// Least-squares line `y = a + b x`; returns `(a, b, residuals)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res = x.iter().zip(y).map(|(u, v)| v - (a + b * u)).collect();
    (a, b, res)
}

/// Amplitude `c(L) = −Re E · L^{z₀}` extrapolated linearly to `L → ∞`.
#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeFit {
    /// Theoretical exponent used for `c(L)`: 3/2 if `p ≠ q`, else 2.
    pub z0: f64,
    /// Variable of the linear extrapolation is `L^{−correction}`.
    pub correction: f64,
    pub per_size: Vec<(usize, f64)>,
    pub extrapolated: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub z: f64,
    pub c: f64,
    /// Sizes entering the log-log fit.
    pub used: Vec<usize>,
    pub residuals: Vec<f64>,
    pub amplitude: AmplitudeFit,
}

/// Fit `−Re E ≈ c L^{−z}` on the largest half of the samples.
pub fn fit_exponent(samples: &[GapSample]) -> Result<FitReport> {
    let mut s: Vec<&GapSample> = samples.iter().filter(|s| s.is_valid()).collect();
    if s.len() < 4 {
        return invalid(format!("fit refused: {} valid samples, at least 4 needed", s.len()));
    }
    s.sort_by_key(|x| x.l);
    let (lmin, lmax) = (s[0].l as f64, s[s.len() - 1].l as f64);
    if lmax / lmin < 10.0 {
        return invalid(format!("fit refused: sizes {lmin}..{lmax} span less than a decade"));
    }
    let gaps: Vec<f64> = s.iter().map(|x| -x.e_plus.re).collect();
    if gaps.iter().any(|&g| !(g > 0.0)) || gaps.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("fit refused: gaps are not positive and strictly decreasing in L");
    }
    let first = s.len() / 2;
    let used: Vec<usize> = s[first..].iter().map(|x| x.l).collect();
    let lx: Vec<f64> = used.iter().map(|&l| (l as f64).ln()).collect();
    let ly: Vec<f64> = gaps[first..].iter().map(|g| g.ln()).collect();
    let (a, b, residuals) = line_fit(&lx, &ly);

    let (p, q, rho) = (s[0].p, s[0].q, s[0].rho);
    let symmetric = p == q;
    let (z0, correction) = if symmetric { (2.0, 2.0) } else { (1.5, 0.5) };
    let per_size: Vec<(usize, f64)> = s.iter().zip(&gaps).map(|(x, g)| (x.l, g * (x.l as f64).powf(z0))).collect();
    let tail = &per_size[first.saturating_sub(1).min(per_size.len() - 2)..];
    let xs: Vec<f64> = tail.iter().map(|&(l, _)| (l as f64).powf(-correction)).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, c)| c).collect();
    let (extrapolated, _, _) = line_fit(&xs, &ys);
    let predicted = if symmetric { 4.0 * PI * PI * p } else { 2.0 * KPZ_C * (p - q).abs() * (rho * (1.0 - rho)).sqrt() };
    Ok(FitReport {
        z: -b,
        c: a.exp(),
        used,
        residuals,
        amplitude: AmplitudeFit { z0, correction, per_size, extrapolated, predicted, relative_error: (extrapolated - predicted).abs() / predicted },
    })
}

/// Leading asymptotics of the second-largest pair `(E+, E−)`.
pub fn asymptotic_prediction(l: usize, rho: f64, p: f64, q: f64) -> (C, C) {
    let lf = l as f64;
    if p == q {
        let e = C::new(-4.0 * PI * PI * p / (lf * lf), 0.0);
        return (e, e);
    }
    let re = -2.0 * KPZ_C * (p - q).abs() * (rho * (1.0 - rho)).sqrt() * lf.powf(-1.5);
    let im = 2.0 * PI * ((p - q) * (1.0 - 2.0 * rho)).abs() / lf;
    (C::new(re, im), C::new(re, -im))
}

/// CSV `L,rho,p,q,reE,imE,method`, one line per sample (the `E+` member).
pub fn samples_to_csv(samples: &[GapSample]) -> String {
    let mut out = String::from("L,rho,p,q,reE,imE,method\n");
    for s in samples {
        out.push_str(&format!("{},{},{},{},{:.17e},{:.17e},{}\n", s.l, s.rho, s.p, s.q, s.e_plus.re, s.e_plus.im, s.method));
    }
    out
}
