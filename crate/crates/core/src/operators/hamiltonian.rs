use super::basis::SectorBasis;
use super::matrix::{RateMatrix, Scalar};
use crate::error::{invalid, Result};
use crate::rate::Rates;
use crate::sectors::Sector;

/// Markov matrix of the sector: for each bond `(i, i+1 mod L)` with distinct
/// states, rate `p` if the left label is larger, `q` otherwise.
pub fn build_hamiltonian<T: Scalar>(basis: &SectorBasis, rates: &Rates) -> RateMatrix<T> {
    let p = T::from_rate(&rates.p);
    let q = T::from_rate(&rates.q);
    let l = basis.sector().l();
    let mut h = RateMatrix::zeros(basis.len(), basis.len()).with_sectors(Some(basis.sector().clone()), Some(basis.sector().clone()));
    let mut k2 = Vec::with_capacity(l);
    for (col, k) in basis.states().iter().enumerate() {
        for i in 0..l {
            let j = (i + 1) % l;
            if k[i] == k[j] {
                continue;
            }
            let rate = if k[i] > k[j] { p.clone() } else { q.clone() };
            k2.clear();
            k2.extend_from_slice(k);
            k2.swap(i, j);
            let row = basis.index_of(&k2).expect("swap stays in sector");
            h.add(row, col, rate.clone());
            h.add(col, col, -rate);
        }
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    /// `C|k1..kL> = |kL,k1..k(L-1)>`
    Shift,
    /// `R|k1..kL> = |kL..k1>`
    Reflection,
    /// `Q|k> = |n+1-k>`, mapping sector `(m1..mn)` onto `(mn..m1)`.
    Charge,
}

/// Permutation matrix of a symmetry. For `Charge` the codomain is the reversed sector.
pub fn build_symmetry<T: Scalar>(basis: &SectorBasis, kind: SymmetryKind) -> Result<RateMatrix<T>> {
    let s = basis.sector();
    let l = s.l();
    let n = s.species() as u8;
    let target = match kind {
        SymmetryKind::Charge => SectorBasis::new(&s.reversed())?,
        _ => basis.clone(),
    };
    let mut m = RateMatrix::zeros(target.len(), basis.len()).with_sectors(Some(s.clone()), Some(target.sector().clone()));
    for (col, k) in basis.states().iter().enumerate() {
        let img: Vec<u8> = match kind {
            SymmetryKind::Shift => (0..l).map(|i| k[(i + l - 1) % l]).collect(),
            SymmetryKind::Reflection => k.iter().rev().copied().collect(),
            SymmetryKind::Charge => k.iter().map(|&x| n + 1 - x).collect(),
        };
        let row = target.index_of(&img).expect("symmetry image lies in target sector");
        m.add(row, col, T::one());
    }
    Ok(m)
}

/// Species-merging intertwiner `φ_{s,t}: V_t -> V_s` for `s ⊆ t`.
pub fn build_phi<T: Scalar>(s_basis: &SectorBasis, t_basis: &SectorBasis) -> Result<RateMatrix<T>> {
    let (s, t) = (s_basis.sector(), t_basis.sector());
    if !s.is_subset_of(t) {
        return invalid(format!("{s} is not below {t}"));
    }
    // Align the two reference words position by position to get the label map.
    let (ws, wt) = (s.reference_word(), t.reference_word());
    let mut relabel = vec![0u8; t.species() + 1];
    for (a, b) in wt.iter().zip(&ws) {
        relabel[*a as usize] = *b;
    }
    let mut m = RateMatrix::zeros(s_basis.len(), t_basis.len()).with_sectors(Some(t.clone()), Some(s.clone()));
    for (col, k) in t_basis.states().iter().enumerate() {
        let img: Vec<u8> = k.iter().map(|&x| relabel[x as usize]).collect();
        let row = s_basis.index_of(&img).expect("relabelled state lies in the lower sector");
        m.add(row, col, T::one());
    }
    Ok(m)
}

/// Sign of a permutation given as a word of distinct labels.
pub fn permutation_sign(k: &[u8]) -> i64 {
    let mut inv = 0usize;
    for i in 0..k.len() {
        for j in i + 1..k.len() {
            if k[i] > k[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign-reversal map on the maximal sector: `<k| -> sgn(k) |kL..k1>`,
/// as a matrix from bra coefficients to ket coefficients.
pub fn build_omega<T: Scalar>(basis: &SectorBasis) -> Result<RateMatrix<T>> {
    let s = basis.sector();
    if *s != Sector::maximal(s.l())? {
        return invalid(format!("omega acts on the maximal sector, got {s}"));
    }
    let mut m = RateMatrix::zeros(basis.len(), basis.len()).with_sectors(Some(s.clone()), Some(s.clone()));
    for (col, k) in basis.states().iter().enumerate() {
        let rev: Vec<u8> = k.iter().rev().copied().collect();
        let row = basis.index_of(&rev).expect("reversal stays in the maximal sector");
        m.add(row, col, T::from_i64(permutation_sign(k)));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn basis(t: &str) -> SectorBasis {
        SectorBasis::new(&Sector::parse(t, None).unwrap()).unwrap()
    }

    fn ket(b: &SectorBasis, terms: &[(&str, i64)]) -> Vec<i64> {
        let mut v = vec![0; b.len()];
        for (s, c) in terms {
            let k: Vec<u8> = s.bytes().map(|x| x - b'0').collect();
            v[b.index_of(&k).unwrap()] += c;
        }
        v
    }

    fn apply(m: &RateMatrix<BigRational>, v: &[i64]) -> Vec<i64> {
        let x: Vec<BigRational> = v.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        m.apply(&x).iter().map(|r| r.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn two_site_hamiltonian() {
        let b = basis("1,1");
        let rates = Rates::parse("2/3", "1/3").unwrap();
        let h = build_hamiltonian::<f64>(&b, &rates);
        assert_eq!(b.labels(), ["12", "21"]);
        assert!((h.get(0, 0) + 1.0).abs() < 1e-15 && (h.get(0, 1) - 1.0).abs() < 1e-15);
        assert!((h.get(1, 0) - 1.0).abs() < 1e-15 && (h.get(1, 1) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_example() {
        let b = basis("1,2");
        let c = build_symmetry::<f64>(&b, SymmetryKind::Shift).unwrap();
        let from = b.index_of(&[1, 2, 2]).unwrap();
        let to = b.index_of(&[2, 1, 2]).unwrap();
        assert_eq!(c.get(to, from), 1.0);
    }

    #[test]
    fn phi_worked_example() {
        let t = basis("1,1,2,1");
        let phi = ket(&t, &[("21433", 1), ("12343", -1)]);
        let s12 = basis("1,1,3");
        let m = build_phi::<BigRational>(&s12, &t).unwrap();
        assert_eq!(apply(&m, &phi), ket(&s12, &[("21333", 1), ("12333", -1)]));
        let s2 = basis("2,3");
        let m = build_phi::<BigRational>(&s2, &t).unwrap();
        assert!(apply(&m, &phi).iter().all(|&c| c == 0));
        let s14 = basis("1,3,1");
        let m = build_phi::<BigRational>(&s14, &t).unwrap();
        assert_eq!(apply(&m, &phi), ket(&s14, &[("21322", 1), ("12232", -1)]));
        let tr = m.transpose();
        assert_eq!(apply(&tr, &ket(&s14, &[("21322", 1)])), ket(&t, &[("21433", 1), ("31423", 1), ("31432", 1)]));
    }

    #[test]
    fn omega_two_sites() {
        let b = SectorBasis::new(&Sector::maximal(2).unwrap()).unwrap();
        let w = build_omega::<f64>(&b).unwrap();
        assert_eq!(w.get(1, 0), 1.0);
        assert_eq!(w.get(0, 1), -1.0);
        assert!(build_omega::<f64>(&basis("2,1")).is_err());
    }

    #[test]
    fn phi_requires_nesting() {
        assert!(build_phi::<f64>(&basis("1,3"), &basis("3,1")).is_err());
    }
}
