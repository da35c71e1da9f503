use super::formula::transfer_eigenvalue;
use super::roots::BetheRootSet;
use crate::error::{Error, Result};
use crate::operators::{build_transfer, SectorBasis, TransferMatrix};
use crate::rate::Rates;
use crate::sectors::Sector;
use crate::spectra::linalg::{eigen_complex, inverse_complex};
use faer::Mat;
use num_complex::Complex64 as C;
use serde::Serialize;
use std::f64::consts::PI;

/// Interpolation circle radius in λ.
pub const NODE_RADIUS: f64 = 0.7;
/// Bound on `‖T(λ)r − Λ(λ)r‖` at the held-out point.
pub const HOLDOUT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Interpolated,
    BetheFormula,
}

/// `Λ(λ) = Σ c_k λ^k`, an eigenvalue of the transfer matrix.
#[derive(Clone, Debug, Serialize)]
pub struct EigenPolynomial {
    pub coefficients: Vec<C>,
    pub sector: Sector,
    pub provenance: Provenance,
}

impl EigenPolynomial {
    pub fn eval(&self, lam: C) -> C {
        self.coefficients.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * lam + c)
    }

    /// Logarithmic derivative at zero, the energy.
    pub fn energy(&self) -> C {
        let c1 = self.coefficients.get(1).copied().unwrap_or_default();
        c1 / self.coefficients[0]
    }

    /// Largest coefficient difference, padding the shorter list with zeros.
    pub fn max_abs_diff(&self, other: &[C]) -> f64 {
        let n = self.coefficients.len().max(other.len());
        (0..n)
            .map(|k| {
                let a = self.coefficients.get(k).copied().unwrap_or_default();
                let b = other.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Conjugate coefficients.
    pub fn conj(&self) -> Vec<C> {
        self.coefficients.iter().map(|c| c.conj()).collect()
    }
}

fn nodes(l: usize, radius: f64) -> Vec<C> {
    let m = l + 1;
    (0..m).map(|i| C::from_polar(radius, 2.0 * PI * i as f64 / m as f64)).collect()
}

/// Invert samples on `radius·ω^i` to the coefficients of a degree-≤L polynomial.
fn dft_coefficients(values: &[C], radius: f64) -> Vec<C> {
    let m = values.len();
    (0..m)
        .map(|k| {
            let s: C = values
                .iter()
                .enumerate()
                .map(|(i, &v)| v * C::from_polar(1.0, -2.0 * PI * (i * k % m) as f64 / m as f64))
                .sum();
            s / (m as f64 * radius.powi(k as i32))
        })
        .collect()
}

fn sector_of(counts: &[usize]) -> Result<Sector> {
    Sector::from_parts(counts).map_err(|_| Error::InvalidArgument(format!("counts {counts:?} are not a basic sector")))
}

/// Eigen-polynomial of the eigenvalue formula at a root set.
pub fn eigen_polynomial_from_roots(rs: &BetheRootSet) -> Result<EigenPolynomial> {
    let roots: Vec<C> = rs.levels.iter().flatten().copied().collect();
    let radius = [NODE_RADIUS, 0.55, 0.85, 0.4, 1.0]
        .into_iter()
        .find(|&r| roots.iter().all(|z| (z.norm() - r).abs() > 0.05))
        .unwrap_or(NODE_RADIUS);
    let vals = nodes(rs.l, radius).into_iter().map(|z| transfer_eigenvalue(rs, z)).collect::<Result<Vec<_>>>()?;
    Ok(EigenPolynomial { coefficients: dft_coefficients(&vals, radius), sector: sector_of(&rs.counts)?, provenance: Provenance::BetheFormula })
}

fn min_gap(vals: &[C]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            g = g.min((vals[i] - vals[j]).norm());
        }
    }
    g
}

/// All eigen-polynomials of the sector from the commuting transfer matrices.
///
/// A generic combination `T(λ₁) + αT(λ₂)` fixes shared eigenvectors; each `Λ_g` is then
/// sampled on `L+1` circle nodes, inverted, and checked at a held-out point.
pub fn extract_eigen_polynomials(s: &Sector, rates: &Rates) -> Result<Vec<EigenPolynomial>> {
    let basis = SectorBasis::with_limit(s, crate::capacity())?;
    let t: TransferMatrix<f64> = build_transfer(&basis, rates, None)?;
    let l = s.l();
    let dim = basis.len();
    let probes = [
        (C::new(0.37, 0.23), C::new(-0.41, 0.52), 0.618),
        (C::new(-0.29, -0.44), C::new(0.53, 0.17), 0.414),
        (C::new(0.12, 0.61), C::new(-0.66, -0.08), 1.732),
    ];
    let mut last_err = None;
    for (attempt, &(l1, l2, alpha)) in probes.iter().enumerate() {
        let mut m = t.eval(&l1).to_dense_c64();
        let m2 = t.eval(&l2).to_dense_c64();
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] += alpha * m2[(r, c)];
            }
        }
        let (vals, v) = eigen_complex(&m)?;
        let scale = vals.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if min_gap(&vals) < 1e-6 * scale && attempt + 1 < probes.len() {
            continue;
        }
        let w = inverse_complex(&v);
        match polynomials_from_vectors(&t, &v, &w, l, s) {
            Ok(p) => return Ok(p),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Structural(format!("transfer spectrum of {s} stays degenerate at every probe"))))
}

fn polynomials_from_vectors(t: &TransferMatrix<f64>, v: &Mat<C>, w: &Mat<C>, l: usize, s: &Sector) -> Result<Vec<EigenPolynomial>> {
    let dim = v.nrows();
    let pts = nodes(l, NODE_RADIUS);
    let mut samples = vec![vec![C::new(0.0, 0.0); pts.len()]; dim];
    for (i, &z) in pts.iter().enumerate() {
        let av = apply(t, z, v);
        for (g, row) in samples.iter_mut().enumerate() {
            row[i] = (0..dim).map(|r| w[(g, r)] * av[(r, g)]).sum();
        }
    }
    let holdout = C::new(0.45, 0.3);
    let av = apply(t, holdout, v);
    let mut out = Vec::with_capacity(dim);
    for (g, row) in samples.iter().enumerate() {
        let poly = EigenPolynomial { coefficients: dft_coefficients(row, NODE_RADIUS), sector: s.clone(), provenance: Provenance::Interpolated };
        let lam = poly.eval(holdout);
        let vnorm = (0..dim).map(|r| v[(r, g)].norm_sqr()).sum::<f64>().sqrt();
        let res = (0..dim).map(|r| (av[(r, g)] - lam * v[(r, g)]).norm_sqr()).sum::<f64>().sqrt() / (vnorm * lam.norm().max(1.0));
        if !(res <= HOLDOUT_TOLERANCE) {
            return Err(Error::Structural(format!("eigenvector {g} of {s} fails the held-out check ({res:.2e})")));
        }
        out.push(poly);
    }
    out.sort_by(|a, b| {
        let (ea, eb) = (a.energy(), b.energy());
        eb.re.total_cmp(&ea.re).then(ea.im.total_cmp(&eb.im))
    });
    Ok(out)
}

fn apply(t: &TransferMatrix<f64>, lam: C, v: &Mat<C>) -> Mat<C> {
    let m = t.eval(&lam);
    let mut out = Mat::<C>::zeros(v.nrows(), v.ncols());
    for (r, c, x) in m.entries() {
        for g in 0..v.ncols() {
            out[(r, g)] += *x * v[(c, g)];
        }
    }
    out
}
