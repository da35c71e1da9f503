//! Sector spectra, genuine spectra, inclusion and duality checks, relaxation
//! gaps and stationary states.

pub mod linalg;
pub mod matching;

use crate::error::{Error, Result};
use crate::operators::{build_hamiltonian, build_omega, build_phi, RateMatrix, SectorBasis};
use crate::rate::Rates;
use crate::sectors::{mobius, Sector};
use faer::Mat;
pub use matching::{multiset_contains, multiset_difference, multiset_equal, MatchCertificate, Tolerance};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Multiset of complex eigenvalues, sorted by (−Re, Im).
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: Vec<Complex64>,
    pub tol: Tolerance,
    pub sector: Option<Sector>,
    pub p: f64,
    pub q: f64,
}

fn sort_values(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
}

impl Spectrum {
    pub fn new(mut values: Vec<Complex64>, sector: Option<Sector>, rates: &Rates) -> Self {
        sort_values(&mut values);
        Self { values, tol: Tolerance::default(), sector, p: rates.p(), q: rates.q() }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Consecutive values within tolerance collapsed to `(value, multiplicity)`.
    pub fn grouped(&self) -> Vec<(Complex64, usize)> {
        let mut out: Vec<(Complex64, usize)> = Vec::new();
        let mut used = vec![false; self.values.len()];
        for i in 0..self.values.len() {
            if used[i] {
                continue;
            }
            let z = self.values[i];
            let w = self.tol.window(z);
            let mut mult = 0;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in i..self.values.len() {
                if self.values[j].re < z.re - w {
                    break;
                }
                if !used[j] && (self.values[j] - z).norm() <= w {
                    used[j] = true;
                    mult += 1;
                    acc += self.values[j];
                }
            }
            out.push((acc / mult as f64, mult));
        }
        out
    }

    /// Does `other` embed into this spectrum?
    pub fn contains(&self, other: &Spectrum) -> MatchCertificate {
        multiset_contains(&self.values, &other.values, self.tol)
    }

    pub fn equals(&self, other: &Spectrum) -> MatchCertificate {
        multiset_equal(&self.values, &other.values, self.tol)
    }

    /// Closure under complex conjugation within tolerance.
    pub fn is_conjugate_closed(&self) -> bool {
        let conj: Vec<Complex64> = self.values.iter().map(|z| z.conj()).collect();
        multiset_equal(&self.values, &conj, self.tol).contained
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ev: Vec<(f64, f64, usize)> = self.grouped().into_iter().map(|(z, m)| (clean(z.re), clean(z.im), m)).collect();
        serde_json::json!({
            "sector": self.sector.as_ref().map(Sector::text),
            "p": self.p,
            "q": self.q,
            "eigenvalues": ev,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,multiplicity\n");
        for (z, m) in self.grouped() {
            s.push_str(&format!("{},{},{}\n", clean(z.re), clean(z.im), m));
        }
        s
    }
}

// Round away sub-tolerance noise so outputs are stable across platforms.
fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Eigenvalues with right eigenvectors and the worst normalized backward error.
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: Mat<Complex64>,
    pub worst_backward_error: f64,
}

impl EigenDecomposition {
    /// Left eigenvectors as rows of `V^{-1}`.
    pub fn left_vectors(&self) -> Mat<Complex64> {
        linalg::inverse_complex(&self.vectors)
    }
}

/// Full eigen-decomposition of a real square operator.
pub fn eigendecompose(m: &RateMatrix<f64>) -> Result<EigenDecomposition> {
    if m.rows() != m.cols() {
        return Err(Error::InvalidArgument(format!("matrix is {}x{}, not square", m.rows(), m.cols())));
    }
    crate::check_capacity(m.rows())?;
    let dense = m.to_dense();
    let (values, mut vectors) = linalg::eigen(&dense)?;
    let norm = m.frobenius().max(f64::MIN_POSITIVE);
    let dc = m.to_dense_c64();
    let residual = |v: faer::ColRef<'_, Complex64>, lam: Complex64| -> f64 {
        let mv = &dc * v;
        let r: f64 = (0..v.nrows()).map(|i| (mv[i] - lam * v[i]).norm_sqr()).sum();
        r.sqrt() / (norm * v.norm_l2())
    };
    let mut worst: f64 = 0.0;
    for (k, &lam) in values.iter().enumerate() {
        let mut r = residual(vectors.col(k), lam);
        if !(r <= 1e-12) {
            // Back-substitution loses accuracy on defective eigenvalues; inverse iteration does not.
            let v = linalg::inverse_iteration(&dc, lam, norm, vectors.col(k));
            let rv = residual(v.col(0), lam);
            if rv < r || r.is_nan() {
                vectors.col_mut(k).copy_from(v.col(0));
                r = rv;
            }
        }
        worst = worst.max(r);
    }
    if worst > 1e-10 {
        return Err(Error::Structural(format!("eigenpair backward error {worst:.2e} exceeds 1e-10")));
    }
    Ok(EigenDecomposition { values, vectors, worst_backward_error: worst })
}

/// The Markov matrix of a sector together with its basis.
pub fn sector_hamiltonian(s: &Sector, rates: &Rates) -> Result<(SectorBasis, RateMatrix<f64>)> {
    let dim = s.dimension_usize().unwrap_or(usize::MAX);
    crate::check_capacity(dim)?;
    let b = SectorBasis::new(s)?;
    let h = build_hamiltonian::<f64>(&b, rates);
    Ok((b, h))
}

fn hamiltonian_eigenvalues(h: &RateMatrix<f64>, symmetric: bool) -> Result<Vec<Complex64>> {
    let d = h.to_dense();
    if symmetric {
        Ok(linalg::eigenvalues_symmetric(&d)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    } else {
        linalg::eigenvalues(&d)
    }
}

/// `Spec(s)`: all eigenvalues of the sector's Markov matrix.
pub fn sector_spectrum(s: &Sector, rates: &Rates) -> Result<Spectrum> {
    let (_, h) = sector_hamiltonian(s, rates)?;
    let vals = hamiltonian_eigenvalues(&h, rates.is_symmetric())?;
    Ok(Spectrum::new(vals, Some(s.clone()), rates))
}

/// Shared cache of sector spectra for one ring length and rate pair.
#[derive(Clone)]
pub struct SpectrumTable {
    rates: Rates,
    cache: Arc<Mutex<HashMap<Sector, Arc<Spectrum>>>>,
}

impl SpectrumTable {
    pub fn new(rates: &Rates) -> Self {
        Self { rates: rates.clone(), cache: Arc::default() }
    }

    pub fn rates(&self) -> &Rates {
        &self.rates
    }

    pub fn get(&self, s: &Sector) -> Result<Arc<Spectrum>> {
        if let Some(v) = self.cache.lock().expect("cache poisoned").get(s) {
            return Ok(v.clone());
        }
        let spec = Arc::new(sector_spectrum(s, &self.rates)?);
        self.cache.lock().expect("cache poisoned").insert(s.clone(), spec.clone());
        Ok(spec)
    }
}

/// Does `Spec(lower)` embed into `Spec(upper)`?
pub fn check_inclusion(lower: &Sector, upper: &Sector, rates: &Rates) -> Result<MatchCertificate> {
    let a = sector_spectrum(upper, rates)?;
    let b = sector_spectrum(lower, rates)?;
    Ok(a.contains(&b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GenuineMethod {
    Kernel,
    Mobius,
}

/// Orthonormal basis of `Y_s`, the common kernel of all cover-step φ maps.
pub struct GenuineComponent {
    pub sector: Sector,
    pub basis_matrix: Mat<f64>,
    pub dimension: usize,
}

/// Stack the cover-step φ maps below `s` as one dense matrix.
fn cover_stack(basis: &SectorBasis) -> Result<Mat<f64>> {
    let s = basis.sector();
    let covers = s.covers_below();
    let mut blocks = Vec::new();
    for c in &covers {
        let cb = SectorBasis::new(c)?;
        blocks.push(build_phi::<f64>(&cb, basis)?);
    }
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut m = Mat::<f64>::zeros(rows, basis.len());
    let mut off = 0;
    for b in &blocks {
        for (r, c, v) in b.entries() {
            m[(off + r, c)] = *v;
        }
        off += b.rows();
    }
    Ok(m)
}

pub fn genuine_component(s: &Sector) -> Result<GenuineComponent> {
    let dim = s.dimension_usize().unwrap_or(usize::MAX);
    crate::check_capacity(dim)?;
    let basis = SectorBasis::new(s)?;
    let stack = cover_stack(&basis)?;
    let b = linalg::null_space(&stack, 1e-10)?;
    let expected: usize = s.genuine_dimension().try_into().map_err(|_| Error::Structural("genuine dimension overflow".into()))?;
    if b.ncols() != expected {
        return Err(Error::Structural(format!("kernel of cover maps below {s} has dimension {}, genuine dimension is {expected}", b.ncols())));
    }
    Ok(GenuineComponent { sector: s.clone(), dimension: expected, basis_matrix: b })
}

/// Genuine spectrum `Spec°(s)`.
pub fn genuine_spectrum(s: &Sector, rates: &Rates, method: GenuineMethod) -> Result<Spectrum> {
    genuine_spectrum_with(s, &SpectrumTable::new(rates), method)
}

/// Genuine spectrum drawing sector spectra from a shared table.
pub fn genuine_spectrum_with(s: &Sector, table: &SpectrumTable, method: GenuineMethod) -> Result<Spectrum> {
    let rates = table.rates();
    match method {
        GenuineMethod::Kernel => {
            let comp = genuine_component(s)?;
            let (_, h) = sector_hamiltonian(s, rates)?;
            let hd = h.to_dense();
            let b = &comp.basis_matrix;
            let hb = &hd * b;
            let m = b.transpose() * &hb;
            let res = (&hb - b * &m).norm_l2();
            if res > 1e-9 {
                return Err(Error::Structural(format!("genuine subspace of {s} not invariant: residual {res:.2e}")));
            }
            let vals = if rates.is_symmetric() {
                linalg::eigenvalues_symmetric(&m)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
            } else {
                linalg::eigenvalues(&m)?
            };
            Ok(Spectrum::new(vals, Some(s.clone()), rates))
        }
        GenuineMethod::Mobius => {
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            for u in s.lower_set() {
                let spec = table.get(&u)?;
                if mobius(&u, s) > 0 {
                    plus.extend_from_slice(spec.values());
                } else {
                    minus.extend_from_slice(spec.values());
                }
            }
            let tol = Tolerance::default();
            let rest = multiset_difference(&plus, &minus, tol)
                .ok_or_else(|| Error::Structural(format!("signed spectrum combination below {s} does not cancel")))?;
            Ok(Spectrum::new(rest, Some(s.clone()), rates))
        }
    }
}

/// Outcome of the spectral duality check for one sector.
#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub sector: String,
    pub complement: String,
    pub shift: f64,
    pub spectral: MatchCertificate,
    pub methods_agree: bool,
    pub omega_rank: usize,
    pub omega_expected_rank: usize,
    pub omega_annihilation_residual: f64,
    pub omega_intertwining_residual: f64,
    pub passed: bool,
}

/// The map `ω°` as a matrix `V*_{s̄} -> V_s`: `Φ_{s,Ω} · ω · Φ_{s̄,Ω}ᵀ`.
pub fn omega_circ(s: &Sector) -> Result<RateMatrix<f64>> {
    let l = s.l();
    let omega_basis = SectorBasis::new(&Sector::maximal(l)?)?;
    crate::check_capacity(omega_basis.len())?;
    let sb = SectorBasis::new(s)?;
    let cb = SectorBasis::new(&s.complement())?;
    let phi_s = build_phi::<f64>(&sb, &omega_basis)?;
    let phi_c = build_phi::<f64>(&cb, &omega_basis)?;
    let w = build_omega::<f64>(&omega_basis)?;
    Ok(phi_s.matmul(&w).matmul(&phi_c.transpose()))
}

/// Check `Spec°(s̄) = −L(p+q) − Spec°(s)` and the properties of `ω°`.
pub fn check_spectral_duality(s: &Sector, rates: &Rates) -> Result<DualityReport> {
    check_spectral_duality_with(s, &SpectrumTable::new(rates))
}

pub fn check_spectral_duality_with(s: &Sector, table: &SpectrumTable) -> Result<DualityReport> {
    let rates = table.rates();
    let c = s.complement();
    let shift = -(s.l() as f64) * (rates.p() + rates.q());
    let gs = genuine_spectrum_with(s, table, GenuineMethod::Kernel)?;
    let gc = genuine_spectrum_with(&c, table, GenuineMethod::Kernel)?;
    let ms = genuine_spectrum_with(s, table, GenuineMethod::Mobius)?;
    let mc = genuine_spectrum_with(&c, table, GenuineMethod::Mobius)?;
    let methods_agree = gs.equals(&ms).contained && gc.equals(&mc).contained;
    let reflected: Vec<Complex64> = gs.values().iter().map(|&e| Complex64::new(shift, 0.0) - e).collect();
    let spectral = multiset_equal(gc.values(), &reflected, Tolerance::default());

    let w = omega_circ(s)?;
    let wd = w.to_dense();
    let omega_expected_rank = gs.len();
    let omega_rank = linalg::rank(&wd, 1e-10)?;
    let sb = SectorBasis::new(s)?;
    let mut annihilation: f64 = 0.0;
    for cov in s.covers_below() {
        let cb = SectorBasis::new(&cov)?;
        let phi = build_phi::<f64>(&cb, &sb)?;
        annihilation = annihilation.max(phi.matmul(&w).max_abs());
    }
    let (_, hs) = sector_hamiltonian(s, rates)?;
    let (_, hc) = sector_hamiltonian(&c, rates)?;
    let lhs = hs.matmul(&w).plus(&w.matmul(&hc.transpose())).plus(&w.scale(&-shift));
    let intertwining = lhs.max_abs();
    let passed = spectral.contained && methods_agree && omega_rank == omega_expected_rank && annihilation <= 1e-10 && intertwining <= 1e-10;
    Ok(DualityReport {
        sector: s.text(),
        complement: c.text(),
        shift,
        spectral,
        methods_agree,
        omega_rank,
        omega_expected_rank,
        omega_annihilation_residual: annihilation,
        omega_intertwining_residual: intertwining,
        passed,
    })
}

/// The eigenvalues of maximal real part after removing the stationary one.
#[derive(Clone, Debug, Serialize)]
pub struct SecondLargest {
    pub plus: Complex64,
    pub minus: Complex64,
    pub members: Vec<Complex64>,
}

pub fn second_largest(spec: &Spectrum) -> Result<SecondLargest> {
    let vals = spec.values();
    if vals.len() < 2 {
        return Err(Error::NoneExists("single-state sector has no second eigenvalue".into()));
    }
    let zero = (0..vals.len()).min_by(|&a, &b| vals[a].norm().total_cmp(&vals[b].norm())).expect("nonempty");
    if vals[zero].norm() > spec.tol.abs.max(1e-8) {
        return Err(Error::Structural(format!("spectrum lacks the stationary eigenvalue 0 (closest {})", vals[zero])));
    }
    let rest: Vec<Complex64> = vals.iter().enumerate().filter(|&(i, _)| i != zero).map(|(_, z)| *z).collect();
    let top = rest.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let w = spec.tol.abs.max(spec.tol.rel * top.abs());
    let mut members: Vec<Complex64> = rest.into_iter().filter(|z| z.re >= top - w).collect();
    sort_values(&mut members);
    let plus = members.iter().copied().max_by(|a, b| a.im.total_cmp(&b.im)).expect("nonempty");
    let plus = Complex64::new(plus.re, plus.im.abs());
    Ok(SecondLargest { plus, minus: plus.conj(), members })
}

/// `E±_j(s) = E±(m1+..+mj, m(j+1)+..+mn)` for each split j.
pub fn next_leading(s: &Sector, rates: &Rates) -> Result<Vec<SecondLargest>> {
    next_leading_with(s, &SpectrumTable::new(rates))
}

pub fn next_leading_with(s: &Sector, table: &SpectrumTable) -> Result<Vec<SecondLargest>> {
    if s.species() < 2 {
        return Err(Error::NoneExists(format!("{s} has a single species")));
    }
    let mut out = Vec::with_capacity(s.species() - 1);
    for j in 1..s.species() {
        let spec = table.get(&s.collapse(j)?)?;
        out.push(second_largest(&spec)?);
    }
    Ok(out)
}

/// Outcome of the relaxation-gap conjecture check on one sector.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub sector: String,
    pub threshold: f64,
    pub holds: bool,
    pub violation: Option<(f64, f64)>,
    pub next_leading_embedded: bool,
}

/// No nonzero eigenvalue may lie strictly right of `max_j Re E±_j`.
pub fn check_gap_conjecture(s: &Sector, rates: &Rates) -> Result<GapReport> {
    check_gap_conjecture_with(s, &SpectrumTable::new(rates))
}

pub fn check_gap_conjecture_with(s: &Sector, table: &SpectrumTable) -> Result<GapReport> {
    let spec = table.get(s)?;
    if s.species() < 2 {
        return Ok(GapReport { sector: s.text(), threshold: 0.0, holds: true, violation: None, next_leading_embedded: true });
    }
    let nl = next_leading_with(s, table)?;
    let threshold = nl.iter().map(|e| e.plus.re).fold(f64::NEG_INFINITY, f64::max);
    let mut dedup: Vec<Complex64> = Vec::new();
    for e in &nl {
        for z in [e.plus, e.minus] {
            if !dedup.iter().any(|d| (d - z).norm() <= spec.tol.window(z)) {
                dedup.push(z);
            }
        }
    }
    let embedded = spec.contains(&Spectrum::new(dedup, None, table.rates())).contained;
    let vals = spec.values();
    let zero = (0..vals.len()).min_by(|&a, &b| vals[a].norm().total_cmp(&vals[b].norm())).expect("nonempty");
    let w = spec.tol.abs.max(spec.tol.rel * threshold.abs());
    let violation = vals.iter().enumerate().filter(|&(i, z)| i != zero && z.re > threshold + w).map(|(_, z)| *z).max_by(|a, b| a.re.total_cmp(&b.re));
    Ok(GapReport {
        sector: s.text(),
        threshold,
        holds: violation.is_none(),
        violation: violation.map(|z| (z.re, z.im)),
        next_leading_embedded: embedded,
    })
}

/// Normalized stationary distribution of the sector.
pub fn stationary_vector(s: &Sector, rates: &Rates) -> Result<Vec<f64>> {
    let (_, h) = sector_hamiltonian(s, rates)?;
    let n = h.rows();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let d = h.to_dense();
    let sv = linalg::singular_values(&d)?;
    let scale = sv[0].max(f64::MIN_POSITIVE);
    if sv[n - 2] <= 1e-10 * scale {
        return Err(Error::Structural(format!("{s} has a multiple zero eigenvalue")));
    }
    let ns = linalg::null_space(&d, 1e-12 * (n as f64).sqrt())?;
    if ns.ncols() != 1 {
        return Err(Error::Structural(format!("null space of H on {s} has dimension {}", ns.ncols())));
    }
    let total: f64 = (0..n).map(|i| ns[(i, 0)]).sum();
    let v: Vec<f64> = (0..n).map(|i| ns[(i, 0)] / total).collect();
    if v.iter().any(|&x| x < -1e-12) {
        return Err(Error::Structural(format!("stationary vector of {s} has negative components")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates() -> Rates {
        Rates::parse("2/3", "1/3").unwrap()
    }

    fn sec(t: &str) -> Sector {
        Sector::parse(t, None).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tabulated_sector_1_3() {
        let s = sector_spectrum(&sec("1,3"), &rates()).unwrap();
        let want = Spectrum::new(vec![c(0.0, 0.0), c(-2.0, 0.0), c(-1.0, 1.0 / 3.0), c(-1.0, -1.0 / 3.0)], None, &rates());
        assert!(s.equals(&want).contained);
        let sl = second_largest(&s).unwrap();
        assert!((sl.plus - c(-1.0, 1.0 / 3.0)).norm() < 1e-10);
    }

    #[test]
    fn tabulated_sector_2_2() {
        let s = sector_spectrum(&sec("2,2"), &rates()).unwrap();
        let want: Vec<Complex64> = [0.0, -1.0, -1.0, -3.0, -4.0 / 3.0, -5.0 / 3.0].iter().map(|&x| c(x, 0.0)).collect();
        assert!(multiset_equal(s.values(), &want, Tolerance::default()).contained);
        let sl = second_largest(&s).unwrap();
        assert_eq!(sl.members.len(), 2);
        let g = genuine_spectrum(&sec("2,2"), &rates(), GenuineMethod::Mobius).unwrap();
        assert!(multiset_equal(g.values(), &want[1..], Tolerance::default()).contained);
    }

    #[test]
    fn two_site_genuine() {
        let r = rates();
        let g0 = genuine_spectrum(&sec("2"), &r, GenuineMethod::Kernel).unwrap();
        let g1 = genuine_spectrum(&sec("1,1"), &r, GenuineMethod::Kernel).unwrap();
        assert!(g0.values()[0].norm() < 1e-12);
        assert!((g1.values()[0] + 2.0).norm() < 1e-12);
        assert!(check_spectral_duality(&sec("2"), &r).unwrap().passed);
    }

    #[test]
    fn stationary_three_sites() {
        let r = Rates::from_f64(0.7, 0.2).unwrap();
        let v = stationary_vector(&Sector::maximal(3).unwrap(), &r).unwrap();
        let (a, b) = (2.0 * 0.7 + 0.2, 0.7 + 2.0 * 0.2);
        let w = [a, b, b, a, a, b];
        let tot: f64 = w.iter().sum();
        for (x, y) in v.iter().zip(w) {
            assert!((x - y / tot).abs() < 1e-12);
        }
    }

    #[test]
    fn eigendecompose_backward_error() {
        let (_, h) = sector_hamiltonian(&sec("2,1,1"), &rates()).unwrap();
        let e = eigendecompose(&h).unwrap();
        assert!(e.worst_backward_error < 1e-12);
        assert_eq!(e.values.len(), 12);
        let id = RateMatrix::<f64>::identity(3);
        assert!(eigendecompose(&id).unwrap().values.iter().all(|z| (z - 1.0).norm() < 1e-14));
    }
}
