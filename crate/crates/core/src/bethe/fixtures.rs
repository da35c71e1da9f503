use super::formula::{bethe_residuals, energy_from_roots, refine_roots, ResidualReport};
use super::polynomial::{eigen_polynomial_from_roots, EigenPolynomial};
use super::roots::BetheRootSet;
use crate::error::{invalid, Error, Result};
use crate::rate::Rates;
use crate::sectors::Sector;
use crate::spectra::{genuine_spectrum, multiset_equal, GenuineMethod, Tolerance};
use num_complex::Complex64 as C;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Tolerance for quantities derived from roots printed to six digits.
pub const ROOT_TOLERANCE: f64 = 1e-5;

/// The L=4 tables at (p,q) = (2/3,1/3), bundled with the crate.
pub const BUNDLED_FIXTURES_JSON: &str = include_str!("../../fixtures/appendixC.json");

/// Parse `"-7/3"`, `"0.789474"` or `"2"`. The flag reports an exact rational.
pub fn parse_number(s: &str) -> Result<(f64, bool)> {
    let t = s.trim();
    if t.contains(['.', 'e', 'E']) {
        return t.parse::<f64>().map(|v| (v, false)).map_err(|_| Error::InvalidArgument(format!("bad number {s:?}")));
    }
    let r: BigRational = t.parse().map_err(|_| Error::InvalidArgument(format!("bad number {s:?}")))?;
    Ok((r.to_f64().unwrap_or(f64::NAN), true))
}

fn parse_complex(pair: &[String; 2]) -> Result<(C, bool)> {
    let (re, a) = parse_number(&pair[0])?;
    let (im, b) = parse_number(&pair[1])?;
    Ok((C::new(re, im), a && b))
}

#[derive(Deserialize)]
struct RawRow {
    sector: Vec<usize>,
    energy: [String; 2],
    polynomial: Vec<[String; 2]>,
    root_sets: Vec<BetheRootSet>,
}

#[derive(Deserialize)]
struct RawTable {
    #[serde(rename = "L")]
    l: usize,
    p: String,
    q: String,
    rows: Vec<RawRow>,
}

/// One eigen-polynomial row: energy, coefficients and the root sets printed for it.
#[derive(Clone, Debug)]
pub struct FixtureRow {
    pub sector: Sector,
    pub energy: C,
    pub energy_exact: bool,
    pub polynomial: Vec<C>,
    pub polynomial_exact: bool,
    pub root_sets: Vec<BetheRootSet>,
}

impl FixtureRow {
    /// Comparison tolerance for the printed columns.
    pub fn tolerance(&self) -> f64 {
        if self.energy_exact && self.polynomial_exact {
            1e-9
        } else {
            ROOT_TOLERANCE
        }
    }
}

#[derive(Clone, Debug)]
pub struct FixtureTable {
    pub l: usize,
    pub rates: Rates,
    pub rows: Vec<FixtureRow>,
}

impl FixtureTable {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawTable = serde_json::from_str(text)?;
        let rates = Rates::parse(&raw.p, &raw.q)?;
        let mut rows = Vec::with_capacity(raw.rows.len());
        for r in raw.rows {
            let sector = Sector::from_parts(&r.sector)?;
            if sector.l() != raw.l {
                return invalid(format!("row sector {sector} not at L = {}", raw.l));
            }
            let (energy, energy_exact) = parse_complex(&r.energy)?;
            let mut polynomial_exact = true;
            let mut polynomial = Vec::with_capacity(r.polynomial.len());
            for c in &r.polynomial {
                let (z, e) = parse_complex(c)?;
                polynomial_exact &= e;
                polynomial.push(z);
            }
            rows.push(FixtureRow { sector, energy, energy_exact, polynomial, polynomial_exact, root_sets: r.root_sets });
        }
        Ok(Self { l: raw.l, rates, rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::MissingInput(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_FIXTURES_JSON).expect("bundled fixture parses")
    }

    /// Rows of one sector, in table order.
    pub fn sector_rows<'a>(&'a self, s: &'a Sector) -> impl Iterator<Item = &'a FixtureRow> + 'a {
        self.rows.iter().filter(move |r| &r.sector == s)
    }

    pub fn sectors(&self) -> Vec<Sector> {
        let mut v: Vec<Sector> = self.rows.iter().map(|r| r.sector.clone()).collect();
        v.dedup();
        v
    }
}

/// Largest relative move a refined root may make and still be the printed root.
pub const PRINT_PRECISION: f64 = 1e-5;

/// Verification of one printed root set.
///
/// Residuals are taken at the printed roots. `Λ` and `E` are compared at the printed
/// roots (`printed_*`) and at the refined roots, which lie within print precision.
#[derive(Clone, Debug, Serialize)]
pub struct RootSetCheck {
    pub row: usize,
    pub set: usize,
    pub sector: String,
    pub residuals: ResidualReport,
    pub printed_polynomial_error: f64,
    pub printed_energy_error: f64,
    pub refinement_displacement: f64,
    pub polynomial_error: f64,
    pub energy_error: f64,
    pub passed: bool,
}

/// Residuals at the printed roots, then `[printed Λ error, printed E error, refinement
/// displacement, refined Λ error, refined E error]`.
pub fn verify_root_set(row: &FixtureRow, rs: &BetheRootSet) -> Result<(ResidualReport, [f64; 5])> {
    let residuals = bethe_residuals(rs)?;
    let printed_poly = eigen_polynomial_from_roots(rs)?.max_abs_diff(&row.polynomial);
    let printed_e = (energy_from_roots(rs)? - row.energy).norm();
    let refined = refine_roots(rs)?;
    let poly = eigen_polynomial_from_roots(&refined.roots)?.max_abs_diff(&row.polynomial);
    let e = (energy_from_roots(&refined.roots)? - row.energy).norm();
    Ok((residuals, [printed_poly, printed_e, refined.displacement, poly, e]))
}

/// Check every root set against its row: residuals, Λ and E, all within `tol`.
pub fn verify_table(table: &FixtureTable, tol: f64) -> Result<Vec<RootSetCheck>> {
    let mut out = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        for (k, rs) in row.root_sets.iter().enumerate() {
            let (residuals, [pp, pe, disp, poly, e]) = verify_root_set(row, rs)?;
            let passed = residuals.max_backward_error < tol && disp <= PRINT_PRECISION && poly < tol && e < tol;
            out.push(RootSetCheck {
                row: i,
                set: k,
                sector: row.sector.text(),
                residuals,
                printed_polynomial_error: pp,
                printed_energy_error: pe,
                refinement_displacement: disp,
                polynomial_error: poly,
                energy_error: e,
                passed,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RootClassification {
    pub index: usize,
    pub regular: bool,
    pub max_backward_error: f64,
    pub energy: [f64; 2],
}

/// Regular-root count against the genuine dimension, and the regular energies
/// against the genuine spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub sector: String,
    pub classifications: Vec<RootClassification>,
    pub regular_count: usize,
    pub genuine_dimension: String,
    pub count_matches: bool,
    pub spectrum_matches: bool,
    /// Groups of root-set indices sharing one eigen-polynomial.
    pub shared_polynomials: Vec<Vec<usize>>,
}

pub fn verify_completeness(s: &Sector, rates: &Rates, roots: &[BetheRootSet]) -> Result<CompletenessReport> {
    let mut classifications = Vec::with_capacity(roots.len());
    let mut regular_energies = Vec::new();
    let mut polys: Vec<EigenPolynomial> = Vec::with_capacity(roots.len());
    for (index, rs) in roots.iter().enumerate() {
        let rep = bethe_residuals(rs)?;
        let e = energy_from_roots(rs)?;
        if rep.regular {
            regular_energies.push(e);
        }
        classifications.push(RootClassification { index, regular: rep.regular, max_backward_error: rep.max_backward_error, energy: [e.re, e.im] });
        polys.push(eigen_polynomial_from_roots(rs)?);
    }
    let mut shared_polynomials: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; polys.len()];
    for i in 0..polys.len() {
        if seen[i] {
            continue;
        }
        let group: Vec<usize> = (i..polys.len()).filter(|&j| polys[i].max_abs_diff(&polys[j].coefficients) < ROOT_TOLERANCE).collect();
        group.iter().for_each(|&j| seen[j] = true);
        if group.len() > 1 {
            shared_polynomials.push(group);
        }
    }
    let regular_count = classifications.iter().filter(|c| c.regular).count();
    let gdim = s.genuine_dimension();
    let count_matches = gdim == regular_count.into();
    let genuine = genuine_spectrum(s, rates, GenuineMethod::Kernel)?;
    let spectrum_matches = multiset_equal(genuine.values(), &regular_energies, Tolerance { abs: ROOT_TOLERANCE, rel: 0.0 }).contained;
    Ok(CompletenessReport {
        sector: s.text(),
        classifications,
        regular_count,
        genuine_dimension: gdim.to_string(),
        count_matches,
        spectrum_matches,
        shared_polynomials,
    })
}
