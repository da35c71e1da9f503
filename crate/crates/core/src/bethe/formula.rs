use super::roots::{BetheRootSet, NestingData, NestingOrder};
use super::weights::{d, f, nf};
use crate::error::{invalid, Error, Result};
use num_complex::Complex64 as C;
use serde::Serialize;

const COINCIDENCE: f64 = 1e-9;
const POLE_OFFSET: f64 = 1e-6;
/// Relative threshold below which a factor of a Bethe equation counts as vanishing.
pub const REGULARITY_THRESHOLD: f64 = 1e-8;

fn same(a: C, b: C) -> bool {
    (a - b).norm() <= COINCIDENCE * (1.0 + a.norm())
}

/// Identifies one root `λ^(level)_index`, level 1-based.
type Slot = (usize, usize);

/// The k-th block of the eigenvalue formula at `lam`, skipping the factor of one root.
fn term(rs: &BetheRootSet, nd: &NestingData, k: usize, lam: C, skip: Option<Slot>) -> C {
    let (p, q) = (rs.p, rs.q);
    let r = q / p;
    let keep = |lev: usize, i: usize| skip != Some((lev, i));
    let nn = nd.n_species;
    let mut v = C::new(r.powi(nd.term_exponent(k) as i32), 0.0);
    if k == 0 {
        for (i, &x) in rs.levels.first().map(|v| v.as_slice()).unwrap_or(&[]).iter().enumerate() {
            if keep(1, i) {
                v *= f(x, lam, p, q);
            }
        }
        return v;
    }
    v *= d(lam, p, rs.l);
    for (i, &x) in rs.levels[k - 1].iter().enumerate() {
        if keep(k, i) {
            v *= f(lam, x, p, q);
        }
    }
    if k + 1 < nn {
        for (i, &x) in rs.levels[k].iter().enumerate() {
            if keep(k + 1, i) {
                v *= f(x, lam, p, q);
            }
        }
    }
    v
}

fn eigenvalue_raw(rs: &BetheRootSet, nd: &NestingData, lam: C) -> C {
    (0..nd.n_species).map(|k| term(rs, nd, k, lam, None)).sum()
}

fn near_root(rs: &BetheRootSet, lam: C) -> bool {
    rs.levels.iter().flatten().any(|&x| (x - lam).norm() <= POLE_OFFSET * (1.0 + x.norm()))
}

/// Eigenvalue `Λ(λ)` of the transfer matrix from nested roots.
///
/// At a root the pole parts cancel only for exact solutions; there the value is the
/// Richardson-extrapolated mean of symmetric offsets.
pub fn transfer_eigenvalue(rs: &BetheRootSet, lam: C) -> Result<C> {
    rs.validate()?;
    let nd = rs.data();
    if !near_root(rs, lam) {
        let v = eigenvalue_raw(rs, &nd, lam);
        if v.is_finite() {
            return Ok(v);
        }
    }
    let h = POLE_OFFSET * (1.0 + lam.norm());
    let avg = |h: f64| (eigenvalue_raw(rs, &nd, lam + h) + eigenvalue_raw(rs, &nd, lam - h)) / 2.0;
    let v = (4.0 * avg(h / 2.0) - avg(h)) / 3.0;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Pole(format!("Λ not finite near λ = {lam}")))
    }
}

/// Estimated residue of `Λ` at `at`; zero for an exact Bethe root set.
pub fn pole_residue(rs: &BetheRootSet, at: C) -> f64 {
    let nd = rs.data();
    let h = POLE_OFFSET * (1.0 + at.norm());
    let a = eigenvalue_raw(rs, &nd, at + h);
    let b = eigenvalue_raw(rs, &nd, at - h);
    ((a - b) * h / 2.0).norm()
}

/// `E = Σ (1 − pλ)(1 − qλ)/λ` over first-level roots.
pub fn energy_from_roots(rs: &BetheRootSet) -> Result<C> {
    let (p, q) = (rs.p, rs.q);
    let mut e = C::new(0.0, 0.0);
    for &x in rs.levels.first().map(|v| v.as_slice()).unwrap_or(&[]) {
        if x.norm() == 0.0 {
            return Err(Error::Pole("first-level root at 0".into()));
        }
        e += (1.0 - p * x) * (1.0 - q * x) / x;
    }
    Ok(e)
}

/// Coefficients of `1 + d(λ) Σ_{k=1}^{N−1} (q/p)^{n_k}` in the standard nesting order.
///
/// Other orders do not give the stationary state from roots at 1/p: there `Λ(0) = (p/q)^{n̄_1}`.
pub fn stationary_eigen_polynomial(l: usize, p: f64, q: f64, counts: &[usize]) -> Result<Vec<C>> {
    if counts.iter().sum::<usize>() != l {
        return invalid(format!("counts {counts:?} do not sum to L = {l}"));
    }
    let nd = NestingData::new(counts, &NestingOrder::standard(counts.len()))?;
    let r = q / p;
    let s: f64 = (1..nd.n_species).map(|k| r.powi(nd.n[k] as i32)).sum();
    let mut c = vec![C::new(0.0, 0.0); l + 1];
    c[0] = C::new(1.0, 0.0);
    c[l] += p.powi(l as i32) * s;
    Ok(c)
}

/// Both sides of the cleared level-l equation for root j, in terms of explicit levels.
fn cleared(rs: &BetheRootSet, nd: &NestingData, levels: &[Vec<C>], l: usize, j: usize) -> (C, C) {
    let (p, q) = (rs.p, rs.q);
    let r = q / p;
    let (a, b) = nd.equation_exponents(l);
    let x = levels[l - 1][j];
    let zeros;
    let below: &[C] = if l == 1 {
        zeros = vec![C::new(0.0, 0.0); rs.l];
        &zeros
    } else {
        &levels[l - 2]
    };
    let above: &[C] = if l < levels.len() { &levels[l] } else { &[] };
    let mut lhs = C::new(r.powi(a as i32), 0.0);
    let mut rhs = C::new(r.powi(b as i32), 0.0);
    if nd.n[l] % 2 == 0 {
        rhs = -rhs;
    }
    for (k, &y) in levels[l - 1].iter().enumerate() {
        if k != j {
            lhs *= nf(x, y, p, q);
            rhs *= nf(y, x, p, q);
        }
    }
    for &mu in below {
        lhs *= p * (x - mu);
        rhs *= nf(x, mu, p, q);
    }
    for &nu in above {
        lhs *= nf(nu, x, p, q);
        rhs *= p * (nu - x);
    }
    (lhs, rhs)
}

/// Whether any single factor of the cleared equation (l, j) vanishes.
fn has_vanishing_factor(rs: &BetheRootSet, l: usize, j: usize) -> bool {
    let (p, q) = (rs.p, rs.q);
    let t = REGULARITY_THRESHOLD;
    let x = rs.levels[l - 1][j];
    let nf_small = |a: C, b: C| nf(a, b, p, q).norm() <= t * (1.0 + (p + q) * b.norm() + p * q * a.norm() * b.norm());
    let diff_small = |a: C, b: C| (a - b).norm() <= t * (a.norm() + b.norm()).max(t);
    let mut hit = false;
    for (k, &y) in rs.levels[l - 1].iter().enumerate() {
        if k != j {
            hit |= nf_small(x, y) || nf_small(y, x);
        }
    }
    if l == 1 {
        hit |= x.norm() <= t;
    } else {
        for &mu in &rs.levels[l - 2] {
            hit |= diff_small(x, mu) || nf_small(x, mu);
        }
    }
    if l < rs.levels.len() {
        for &nu in &rs.levels[l] {
            hit |= diff_small(nu, x) || nf_small(nu, x);
        }
    }
    hit
}

/// One Bethe equation evaluated at a candidate root set.
#[derive(Clone, Debug, Serialize)]
pub struct EquationResidual {
    pub level: usize,
    pub index: usize,
    /// `LHS − RHS` of the cleared equation, or of the joint pole-free sum.
    pub difference: [f64; 2],
    /// Componentwise backward error of the difference.
    pub backward_error: f64,
    /// The root shares its value with roots on non-adjacent levels and the
    /// joint pole-free condition replaces the per-level equation.
    pub joint: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub equations: Vec<EquationResidual>,
    pub max_backward_error: f64,
    pub regular: bool,
    pub notes: Vec<String>,
}

impl ResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_backward_error < tol
    }
}

fn backward_error(rs: &BetheRootSet, nd: &NestingData, l: usize, j: usize) -> (C, f64) {
    let (lhs, rhs) = cleared(rs, nd, &rs.levels, l, j);
    let fval = lhs - rhs;
    let mut denom = 0.0;
    let mut levels = rs.levels.clone();
    for a in 0..levels.len() {
        for b in 0..levels[a].len() {
            let x = rs.levels[a][b];
            let h = 1e-6 * x.norm().max(1.0);
            levels[a][b] = x + h;
            let (l1, r1) = cleared(rs, nd, &levels, l, j);
            levels[a][b] = x - h;
            let (l2, r2) = cleared(rs, nd, &levels, l, j);
            levels[a][b] = x;
            denom += (((l1 - r1) - (l2 - r2)) / (2.0 * h)).norm() * x.norm();
        }
    }
    let be = if denom > 0.0 {
        fval.norm() / denom
    } else if fval.norm() <= 1e-14 * (lhs.norm() + rhs.norm()).max(1e-300) || fval.norm() == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    (fval, be)
}

/// Residuals of the nested Bethe equations in cleared-denominator form.
pub fn bethe_residuals(rs: &BetheRootSet) -> Result<ResidualReport> {
    rs.validate()?;
    let nd = rs.data();
    let mut notes = Vec::new();
    let at_p = |z: C| rs.is_at_inverse_p(z);
    for (li, lev) in rs.levels.iter().enumerate() {
        for a in 0..lev.len() {
            for b in a + 1..lev.len() {
                if same(lev[a], lev[b]) && !at_p(lev[a]) {
                    return Err(Error::DegenerateRoot(format!("level {} repeats {}", li + 1, lev[a])));
                }
            }
        }
    }
    let mut regular = true;
    if rs.levels.iter().flatten().any(|&z| at_p(z)) {
        regular = false;
        notes.push("root at 1/p".into());
    }

    // Clusters of equal roots on pairwise non-adjacent levels (1/p excluded).
    let mut cluster_of: Vec<Vec<Option<usize>>> = rs.levels.iter().map(|v| vec![None; v.len()]).collect();
    let mut clusters: Vec<Vec<Slot>> = Vec::new();
    for l in 1..=rs.levels.len() {
        for j in 0..rs.levels[l - 1].len() {
            let x = rs.levels[l - 1][j];
            if at_p(x) || cluster_of[l - 1][j].is_some() {
                continue;
            }
            let mut members = vec![(l, j)];
            for l2 in l + 1..=rs.levels.len() {
                for (j2, &y) in rs.levels[l2 - 1].iter().enumerate() {
                    if same(x, y) {
                        members.push((l2, j2));
                    }
                }
            }
            if members.len() > 1 {
                let mut lv: Vec<usize> = members.iter().map(|m| m.0).collect();
                lv.sort_unstable();
                if lv.windows(2).any(|w| w[1] <= w[0] + 1) {
                    regular = false;
                    notes.push(format!("root {x} shared by adjacent levels"));
                    continue;
                }
                for &(a, b) in &members {
                    cluster_of[a - 1][b] = Some(clusters.len());
                }
                clusters.push(members);
            }
        }
    }
    if !clusters.is_empty() {
        regular = false;
        notes.push(format!("{} cross-level cluster(s) checked jointly", clusters.len()));
    }

    let mut joint_res = Vec::with_capacity(clusters.len());
    for members in &clusters {
        let x = rs.levels[members[0].0 - 1][members[0].1];
        let (mut sum, mut scale) = (C::new(0.0, 0.0), 0.0);
        for &(l, j) in members {
            let up = term(rs, &nd, l, x, Some((l, j)));
            let down = term(rs, &nd, l - 1, x, Some((l, j)));
            sum += up - down;
            scale += up.norm() + down.norm();
        }
        let be = if scale > 0.0 { sum.norm() / scale } else { 0.0 };
        joint_res.push((sum, be));
    }

    let mut equations = Vec::new();
    for l in 1..=rs.levels.len() {
        for j in 0..rs.levels[l - 1].len() {
            if regular && has_vanishing_factor(rs, l, j) {
                regular = false;
                notes.push(format!("vanishing factor in level-{l} equation {j}"));
            }
            let (diff, be, joint) = match cluster_of[l - 1][j] {
                Some(c) => (joint_res[c].0, joint_res[c].1, true),
                None => {
                    let (d, b) = backward_error(rs, &nd, l, j);
                    (d, b, false)
                }
            };
            equations.push(EquationResidual { level: l, index: j, difference: [diff.re, diff.im], backward_error: be, joint });
        }
    }
    let max_backward_error = equations.iter().map(|e| e.backward_error).fold(0.0, f64::max);
    Ok(ResidualReport { equations, max_backward_error, regular, notes })
}

/// Regularity: no root at 1/p, no vanishing equation factor, no cross-level cluster.
pub fn is_regular(rs: &BetheRootSet) -> Result<bool> {
    Ok(bethe_residuals(rs)?.regular)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub merged_counts: Vec<usize>,
    pub merged_nesting: Vec<usize>,
    pub exponent: i64,
    pub max_residual: f64,
    pub samples: usize,
}

/// Check `Λ = Λ̄ + d(λ)(q/p)^e` after sending the top-level roots to 1/p, where `Λ̄`
/// is the formula for the sector with species `a_{N−1}` and `a_N` merged.
pub fn check_reduction(rs: &BetheRootSet) -> Result<ReductionReport> {
    rs.validate()?;
    let a = rs.nesting.as_slice();
    let nn = a.len();
    if nn < 2 || a[nn - 1] != a[nn - 2] + 1 {
        return invalid(format!("reduction needs a_N = a_(N-1) + 1, nesting is {a:?}"));
    }
    let top = a[nn - 1];
    let mut full = rs.clone();
    if let Some(last) = full.levels.last_mut() {
        last.iter_mut().for_each(|z| *z = C::new(1.0 / rs.p, 0.0));
    }
    let nd = full.data();
    let mut merged_counts = rs.counts.clone();
    merged_counts[top - 2] += merged_counts[top - 1];
    merged_counts.remove(top - 1);
    let merged_nesting: Vec<usize> = a[..nn - 1].iter().map(|&x| if x < top { x } else { x - 1 }).collect();
    let reduced = BetheRootSet::new(
        rs.l,
        rs.p,
        rs.q,
        NestingOrder::new(merged_nesting.clone())?,
        merged_counts.clone(),
        full.levels[..nn.saturating_sub(2)].to_vec(),
    )?;
    let exponent: i64 = (1..=nn - 2)
        .filter(|&j| rs.nesting.theta(j, nn))
        .map(|j| nd.n[j - 1] as i64 - nd.n[j] as i64)
        .sum::<i64>()
        + nd.n[nn - 1] as i64;
    let r = rs.q / rs.p;
    let samples = [C::new(0.31, 0.17), C::new(-0.42, 0.05), C::new(0.07, -0.63), C::new(0.55, 0.4), C::new(-0.2, -0.33)];
    let mut max_residual: f64 = 0.0;
    for &lam in &samples {
        let lhs = transfer_eigenvalue(&full, lam)?;
        let rhs = transfer_eigenvalue(&reduced, lam)? + d(lam, rs.p, rs.l) * r.powi(exponent as i32);
        max_residual = max_residual.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok(ReductionReport { merged_counts, merged_nesting, exponent, max_residual, samples: samples.len() })
}

/// Root set polished by Newton on the cleared equations of its free roots.
#[derive(Clone, Debug, Serialize)]
pub struct Refinement {
    pub roots: BetheRootSet,
    /// Largest root displacement, relative to `max(1, |x|)`.
    pub displacement: f64,
    pub iterations: usize,
}

/// Newton-polish a printed root set. Roots at 1/p and roots shared across levels
/// stay fixed; every other root moves under its own cleared equation.
pub fn refine_roots(rs: &BetheRootSet) -> Result<Refinement> {
    use faer::linalg::solvers::Solve;
    rs.validate()?;
    let nd = rs.data();
    let mut free: Vec<Slot> = Vec::new();
    for (li, lev) in rs.levels.iter().enumerate() {
        for (j, &x) in lev.iter().enumerate() {
            let shared = rs.levels.iter().enumerate().any(|(l2, o)| l2 != li && o.iter().any(|&y| same(x, y)));
            if !rs.is_at_inverse_p(x) && !shared {
                free.push((li + 1, j));
            }
        }
    }
    let mut levels = rs.levels.clone();
    let eval = |lv: &[Vec<C>]| -> Vec<C> {
        free.iter().map(|&(l, j)| {
            let (a, b) = cleared(rs, &nd, lv, l, j);
            a - b
        }).collect()
    };
    let n = free.len();
    let mut iterations = 0;
    while n > 0 && iterations < 40 {
        iterations += 1;
        let fx = eval(&levels);
        let mut jac = faer::Mat::<C>::zeros(n, n);
        for (c, &(l, j)) in free.iter().enumerate() {
            let x = levels[l - 1][j];
            let h = 1e-7 * x.norm().max(1.0);
            levels[l - 1][j] = x + h;
            let fp = eval(&levels);
            levels[l - 1][j] = x - h;
            let fm = eval(&levels);
            levels[l - 1][j] = x;
            for r in 0..n {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let rhs = faer::Mat::<C>::from_fn(n, 1, |r, _| -fx[r]);
        let dx = jac.partial_piv_lu().solve(&rhs);
        let mut step: f64 = 0.0;
        for (c, &(l, j)) in free.iter().enumerate() {
            let d = dx[(c, 0)];
            if !d.is_finite() {
                return Err(Error::NoConvergence { what: "root refinement hit a singular Jacobian".into(), iterations });
            }
            step = step.max(d.norm() / levels[l - 1][j].norm().max(1.0));
            levels[l - 1][j] += d;
        }
        if step < 1e-15 {
            break;
        }
    }
    let displacement = free
        .iter()
        .map(|&(l, j)| (levels[l - 1][j] - rs.levels[l - 1][j]).norm() / rs.levels[l - 1][j].norm().max(1.0))
        .fold(0.0, f64::max);
    let mut roots = rs.clone();
    roots.levels = levels;
    Ok(Refinement { roots, displacement, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(counts: &[usize], nesting: &[usize], levels: Vec<Vec<C>>) -> BetheRootSet {
        BetheRootSet::new(4, 2.0 / 3.0, 1.0 / 3.0, NestingOrder::new(nesting.to_vec()).unwrap(), counts.to_vec(), levels).unwrap()
    }

    fn poly(c: &[f64], x: C) -> C {
        c.iter().rev().fold(C::new(0.0, 0.0), |acc, &k| acc * x + k)
    }

    #[test]
    fn one_species_eigenvalue_and_energy() {
        let rs = set(&[3, 1, 0, 0], &[1, 2, 3, 4], vec![vec![C::new(-1.5, 0.0)], vec![], vec![]]);
        let expect = [-1.0, 2.0, -4.0 / 3.0, 8.0 / 9.0, 8.0 / 27.0];
        for lam in [C::new(0.3, 0.1), C::new(-0.8, 0.4), C::new(-1.5, 0.0)] {
            assert!((transfer_eigenvalue(&rs, lam).unwrap() - poly(&expect, lam)).norm() < 1e-7);
        }
        assert!((energy_from_roots(&rs).unwrap() - C::new(-2.0, 0.0)).norm() < 1e-14);
        let r = bethe_residuals(&rs).unwrap();
        assert!(r.max_backward_error < 1e-12 && r.regular, "{r:?}");
        let im = set(&[3, 1, 0, 0], &[1, 2, 3, 4], vec![vec![C::new(0.0, -1.5)], vec![], vec![]]);
        assert!((energy_from_roots(&im).unwrap() - C::new(-1.0, 1.0 / 3.0)).norm() < 1e-14);
    }

    #[test]
    fn vacuum_and_stationary() {
        let vac = set(&[4, 0, 0, 0], &[1, 2, 3, 4], vec![vec![], vec![], vec![]]);
        let lam = C::new(0.4, -0.2);
        let v = transfer_eigenvalue(&vac, lam).unwrap();
        assert!((v - (1.0 + 16.0 / 27.0 * lam.powu(4))).norm() < 1e-14);
        for counts in [[1, 1, 1, 1], [2, 1, 1, 0], [1, 3, 0, 0]] {
            let st = BetheRootSet::stationary(4, 2.0 / 3.0, 1.0 / 3.0, NestingOrder::standard(4), counts.to_vec()).unwrap();
            let c = stationary_eigen_polynomial(4, 2.0 / 3.0, 1.0 / 3.0, &counts).unwrap();
            for lam in [C::new(0.3, 0.2), C::new(-0.6, 0.1)] {
                let direct = c.iter().rev().fold(C::new(0.0, 0.0), |acc, &k| acc * lam + k);
                assert!((transfer_eigenvalue(&st, lam).unwrap() - direct).norm() < 1e-12, "{counts:?}");
            }
            assert_eq!(energy_from_roots(&st).unwrap(), C::new(0.0, 0.0));
            let r = bethe_residuals(&st).unwrap();
            assert!(!r.regular);
            assert!(r.max_backward_error < 1e-12);
        }
    }

    #[test]
    fn non_root_fails() {
        let rs = set(&[3, 1, 0, 0], &[1, 2, 3, 4], vec![vec![C::new(0.37, 0.21)], vec![], vec![]]);
        assert!(bethe_residuals(&rs).unwrap().max_backward_error > 1e-3);
        assert!(pole_residue(&rs, C::new(0.37, 0.21)) > 1e-3);
    }

    #[test]
    fn degenerate_within_level() {
        let z = C::new(0.2, 0.3);
        let rs = set(&[2, 2, 0, 0], &[1, 2, 3, 4], vec![vec![z, z], vec![], vec![]]);
        assert!(matches!(bethe_residuals(&rs), Err(Error::DegenerateRoot(_))));
    }

    #[test]
    fn reduction_identity_random_roots() {
        let rs = set(
            &[1, 1, 1, 1],
            &[1, 2, 3, 4],
            vec![vec![C::new(0.3, 0.2), C::new(-0.7, 0.1), C::new(1.1, -0.4)], vec![C::new(0.2, 0.9), C::new(-0.5, -0.3)], vec![C::new(0.8, 0.8)]],
        );
        let rep = check_reduction(&rs).unwrap();
        assert_eq!(rep.merged_counts, vec![1, 1, 2]);
        assert!(rep.max_residual < 1e-9, "{}", rep.max_residual);
        let other = set(&[1, 1, 1, 1], &[4, 1, 2, 3], vec![vec![C::new(0.3, 0.2), C::new(-0.7, 0.1), C::new(1.1, -0.4)], vec![C::new(0.2, 0.9), C::new(-0.5, -0.3)], vec![C::new(0.8, 0.8)]]);
        let rep = check_reduction(&other).unwrap();
        assert!(rep.max_residual < 1e-9, "{}", rep.max_residual);
        let bad = set(&[1, 1, 1, 1], &[1, 2, 4, 3], rs.levels.clone());
        assert!(check_reduction(&bad).is_err());
    }
}
