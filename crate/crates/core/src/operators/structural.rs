use super::basis::SectorBasis;
use super::hamiltonian::{build_hamiltonian, build_phi, build_symmetry, SymmetryKind};
use super::matrix::RateMatrix;
use super::transfer::build_transfer;
use crate::error::Result;
use crate::rate::Rates;
use crate::sectors::Sector;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

type Q = RateMatrix<BigRational>;

/// One exact identity and whether it held.
#[derive(Clone, Debug, Serialize)]
pub struct Identity {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructuralReport {
    pub sector: String,
    pub identities: Vec<Identity>,
    pub passed: bool,
}

fn eq(a: &Q, b: &Q) -> bool {
    a.rows() == b.rows() && a.cols() == b.cols() && a.sub(b).is_zero()
}

/// Exact-rational identities of the operators on one sector: stochasticity,
/// the three symmetries, the intertwiners below it and the transfer matrix.
pub fn check_structural_identities(s: &Sector, rates: &Rates) -> Result<StructuralReport> {
    let basis = SectorBasis::with_limit(s, crate::capacity())?;
    let h: Q = build_hamiltonian(&basis, rates);
    let h_swapped: Q = build_hamiltonian(&basis, &rates.swapped());
    let mut ids = Vec::new();
    let mut push = |name: String, holds: bool| ids.push(Identity { name, holds });

    push("column sums vanish".into(), h.column_sums().iter().all(|c| c.is_zero()));
    let c: Q = build_symmetry(&basis, SymmetryKind::Shift)?;
    push("[H, C] = 0".into(), eq(&h.matmul(&c), &c.matmul(&h)));
    let r: Q = build_symmetry(&basis, SymmetryKind::Reflection)?;
    push("R H(p,q) R^-1 = H(q,p)".into(), eq(&r.matmul(&h).matmul(&r.transpose()), &h_swapped));
    let qm: Q = build_symmetry(&basis, SymmetryKind::Charge)?;
    let rev = SectorBasis::new(&s.reversed())?;
    let h_rev: Q = build_hamiltonian(&rev, &rates.swapped());
    push("Q H(p,q) Q^-1 = H(q,p) on the reversed sector".into(), eq(&qm.matmul(&h).matmul(&qm.transpose()), &h_rev));

    let t = build_transfer::<BigRational>(&basis, rates, None)?;
    push("T(0) = C".into(), eq(&t.at_zero(), &c));
    push("T(0)^-1 T'(0) = H".into(), eq(&c.transpose().matmul(&t.derivative_at_zero()), &h));

    for lower in s.covers_below() {
        let lb = SectorBasis::new(&lower)?;
        let phi: Q = build_phi(&lb, &basis)?;
        let hl: Q = build_hamiltonian(&lb, rates);
        push(format!("phi H = H phi, {lower} <- {s}"), eq(&phi.matmul(&h), &hl.matmul(&phi)));
        let ratio = BigRational::new(basis.len().into(), lb.len().into());
        push(format!("phi phi^T = (dim ratio) I, {lower} <- {s}"), eq(&phi.matmul(&phi.transpose()), &Q::identity(lb.len()).scale(&ratio)));
        for lowest in lower.covers_below() {
            let llb = SectorBasis::new(&lowest)?;
            let direct: Q = build_phi(&llb, &basis)?;
            let step: Q = build_phi(&llb, &lb)?;
            push(format!("phi path {lowest} <- {lower} <- {s}"), eq(&step.matmul(&phi), &direct));
        }
    }
    let passed = ids.iter().all(|i| i.holds);
    Ok(StructuralReport { sector: s.text(), identities: ids, passed })
}
