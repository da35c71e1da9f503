use super::basis::SectorBasis;
use super::matrix::{RateMatrix, Scalar};
use super::rmatrix::r_action;
use crate::error::{invalid, Result};
use crate::rate::Rates;
use crate::sectors::Sector;
use std::collections::{BTreeMap, HashMap};

/// Transfer matrix `T(λ) = tr_0[R_0L(λ) ... R_01(λ)]` restricted to a sector,
/// with every entry stored as a polynomial in λ.
#[derive(Clone, Debug)]
pub struct TransferMatrix<T: Scalar> {
    sector: Sector,
    dim: usize,
    n_aux: usize,
    entries: BTreeMap<(usize, usize), Vec<T>>,
}

fn poly_add<T: Scalar>(acc: &mut Vec<T>, other: &[T]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), T::zero());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a = a.clone() + b.clone();
    }
}

// Multiply by (c0 + c1 λ).
fn poly_mul_linear<T: Scalar>(p: &[T], c0: &T, c1: &T) -> Vec<T> {
    let mut out = vec![T::zero(); p.len() + 1];
    for (i, a) in p.iter().enumerate() {
        out[i] = out[i].clone() + a.clone() * c0.clone();
        out[i + 1] = out[i + 1].clone() + a.clone() * c1.clone();
    }
    while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

/// Build `T(λ)` on the sector. The auxiliary space has `n_aux` states; the
/// ring model uses `n_aux = L` (every species, present or not).
pub fn build_transfer<T: Scalar>(basis: &SectorBasis, rates: &Rates, n_aux: Option<usize>) -> Result<TransferMatrix<T>> {
    let sector = basis.sector().clone();
    let l = sector.l();
    let n_species = sector.species();
    let n_aux = n_aux.unwrap_or(l);
    if n_aux < n_species {
        return invalid(format!("auxiliary dimension {n_aux} below species count {n_species}"));
    }
    crate::check_capacity(basis.len())?;
    let p = T::from_rate(&rates.p);
    let q = T::from_rate(&rates.q);
    let zero = T::zero();
    let one = T::one();
    let mut entries = BTreeMap::new();
    for (col, k) in basis.states().iter().enumerate() {
        // key: (initial aux, current aux, output prefix)
        let mut cur: HashMap<(u8, u8, Vec<u8>), Vec<T>> = HashMap::new();
        for a in 1..=n_aux as u8 {
            cur.insert((a, a, Vec::with_capacity(l)), vec![one.clone()]);
        }
        for &site in k.iter() {
            let mut next: HashMap<(u8, u8, Vec<u8>), Vec<T>> = HashMap::with_capacity(cur.len() * 2);
            for ((a0, aux, prefix), poly) in cur {
                // weights are c0 + c1·λ: keep = rate·λ, exchange = 1 − rate·λ, equal = 1
                for (new_aux, new_site, w) in r_action(aux as usize, site as usize, &T::one(), &p, &q) {
                    let (c0, c1) = if aux == site {
                        if new_aux != aux as usize || w.is_zero() {
                            continue;
                        }
                        (one.clone(), zero.clone())
                    } else if new_aux == aux as usize {
                        (zero.clone(), w)
                    } else {
                        (one.clone(), w - one.clone())
                    };
                    if new_site > n_species {
                        continue;
                    }
                    if c0.is_zero() && c1.is_zero() {
                        continue;
                    }
                    let mut pre = prefix.clone();
                    pre.push(new_site as u8);
                    let key = (a0, new_aux as u8, pre);
                    let term = poly_mul_linear(&poly, &c0, &c1);
                    next.entry(key).and_modify(|acc| poly_add(acc, &term)).or_insert(term);
                }
            }
            cur = next;
        }
        for ((a0, aux, out), poly) in cur {
            if a0 != aux || poly.iter().all(|c| c.is_zero()) {
                continue;
            }
            let row = basis.index_of(&out).expect("trace preserves the sector");
            let e: &mut Vec<T> = entries.entry((row, col)).or_default();
            poly_add(e, &poly);
        }
    }
    entries.retain(|_, v: &mut Vec<T>| v.iter().any(|c| !c.is_zero()));
    Ok(TransferMatrix { sector, dim: basis.len(), n_aux, entries })
}

impl<T: Scalar> TransferMatrix<T> {
    pub fn sector(&self) -> &Sector {
        &self.sector
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_aux(&self) -> usize {
        self.n_aux
    }

    /// Polynomial coefficients of entry `(r, c)`, lowest degree first.
    pub fn entry(&self, r: usize, c: usize) -> &[T] {
        self.entries.get(&(r, c)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self) -> usize {
        self.entries.values().map(|v| v.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// The k-th coefficient matrix, `T(λ) = Σ_k λ^k T_k`.
    pub fn coefficient(&self, k: usize) -> RateMatrix<T> {
        let mut m = RateMatrix::zeros(self.dim, self.dim).with_sectors(Some(self.sector.clone()), Some(self.sector.clone()));
        for (&(r, c), v) in &self.entries {
            if let Some(x) = v.get(k) {
                m.add(r, c, x.clone());
            }
        }
        m
    }

    pub fn at_zero(&self) -> RateMatrix<T> {
        self.coefficient(0)
    }

    /// Exact derivative `T'(0)`.
    pub fn derivative_at_zero(&self) -> RateMatrix<T> {
        self.coefficient(1)
    }

    /// Evaluate at `λ` in any scalar type the coefficients convert into.
    pub fn eval<U: Scalar + From<T>>(&self, lam: &U) -> RateMatrix<U> {
        let mut m = RateMatrix::zeros(self.dim, self.dim).with_sectors(Some(self.sector.clone()), Some(self.sector.clone()));
        for (&(r, c), v) in &self.entries {
            let mut acc = U::zero();
            for coef in v.iter().rev() {
                acc = acc * lam.clone() + U::from(coef.clone());
            }
            m.add(r, c, acc);
        }
        m
    }
}
