//! Tolerance-aware multiset matching of complex eigenvalues.

use num_complex::Complex64;
use serde::Serialize;

/// Matching window `max(abs, rel·|z|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-8, rel: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn window(&self, z: Complex64) -> f64 {
        self.abs.max(self.rel * z.norm())
    }
}

/// Result of embedding one multiset into another.
#[derive(Clone, Debug, Default, Serialize)]
pub struct MatchCertificate {
    pub contained: bool,
    /// `(index in sub, index in super, distance)`
    pub pairs: Vec<(usize, usize, f64)>,
    pub worst: f64,
    /// Number of connected groups that needed an assignment solve.
    pub ambiguous: usize,
    /// Indices of the sub-multiset left unmatched.
    pub unmatched: Vec<usize>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

/// Minimal-cost assignment of every row to a distinct column (`rows <= cols`).
/// Returns the column chosen for each row.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "hungarian needs rows <= cols");
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut ans = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            ans[p[j] - 1] = j - 1;
        }
    }
    ans
}

/// Embed `sub` into `sup` respecting multiplicity. Unambiguous candidates are
/// paired directly; groups of mutually close values are resolved by minimal
/// total distance.
pub fn multiset_contains(sup: &[Complex64], sub: &[Complex64], tol: Tolerance) -> MatchCertificate {
    let mut order: Vec<usize> = (0..sup.len()).collect();
    order.sort_by(|&a, &b| sup[a].re.total_cmp(&sup[b].re));
    let res: Vec<f64> = order.iter().map(|&i| sup[i].re).collect();
    let (nb, na) = (sub.len(), sup.len());
    // nodes: 0..nb for sub, nb..nb+na for sup
    let mut dsu = Dsu((0..nb + na).collect());
    let mut cand: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nb];
    for (i, &z) in sub.iter().enumerate() {
        let w = tol.window(z);
        let lo = res.partition_point(|&r| r < z.re - w);
        for &j in order[lo..].iter().take_while(|&&j| sup[j].re <= z.re + w) {
            let d = (sup[j] - z).norm();
            if d <= w {
                cand[i].push((j, d));
                dsu.union(i, nb + j);
            }
        }
    }
    let mut cert = MatchCertificate::default();
    let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> = Default::default();
    for (i, c) in cand.iter().enumerate() {
        if c.is_empty() {
            cert.unmatched.push(i);
        } else {
            let r = dsu.find(i);
            groups.entry(r).or_default().0.push(i);
        }
    }
    for j in 0..na {
        let r = dsu.find(nb + j);
        if let Some(g) = groups.get_mut(&r) {
            g.1.push(j);
        }
    }
    for (_, (rows, cols)) in groups {
        if rows.len() == 1 && cols.len() == 1 {
            let (j, d) = cand[rows[0]][0];
            cert.pairs.push((rows[0], j, d));
            continue;
        }
        cert.ambiguous += 1;
        const BIG: f64 = 1e6;
        let dist = |i: usize, j: usize| -> f64 { cand[i].iter().find(|c| c.0 == j).map_or(BIG, |c| c.1) };
        let assigned: Vec<(usize, usize)> = if rows.len() <= cols.len() {
            let cost: Vec<Vec<f64>> = rows.iter().map(|&i| cols.iter().map(|&j| dist(i, j)).collect()).collect();
            hungarian(&cost).into_iter().enumerate().map(|(r, c)| (rows[r], cols[c])).collect()
        } else {
            let cost: Vec<Vec<f64>> = cols.iter().map(|&j| rows.iter().map(|&i| dist(i, j)).collect()).collect();
            let a = hungarian(&cost);
            let mut got: Vec<(usize, usize)> = a.into_iter().enumerate().map(|(c, r)| (rows[r], cols[c])).collect();
            let hit: std::collections::HashSet<usize> = got.iter().map(|x| x.0).collect();
            cert.unmatched.extend(rows.iter().filter(|i| !hit.contains(i)));
            got.sort();
            got
        };
        for (i, j) in assigned {
            let d = dist(i, j);
            if d >= BIG {
                cert.unmatched.push(i);
            } else {
                cert.pairs.push((i, j, d));
            }
        }
    }
    cert.pairs.sort_by_key(|x| x.0);
    cert.unmatched.sort_unstable();
    cert.worst = cert.pairs.iter().map(|x| x.2).fold(0.0, f64::max);
    cert.contained = cert.unmatched.is_empty();
    cert
}

/// Multiset equality within tolerance.
pub fn multiset_equal(a: &[Complex64], b: &[Complex64], tol: Tolerance) -> MatchCertificate {
    let mut c = multiset_contains(a, b, tol);
    c.contained &= a.len() == b.len();
    c
}

/// `sup \ sub` as a multiset; `None` if `sub` does not embed.
pub fn multiset_difference(sup: &[Complex64], sub: &[Complex64], tol: Tolerance) -> Option<Vec<Complex64>> {
    let c = multiset_contains(sup, sub, tol);
    if !c.contained {
        return None;
    }
    let mut used = vec![false; sup.len()];
    for &(_, j, _) in &c.pairs {
        used[j] = true;
    }
    Some(sup.iter().zip(used).filter(|(_, u)| !u).map(|(z, _)| *z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hungarian_small() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn degenerate_values_need_assignment() {
        let sup = [c(-1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(-3.0, 0.0)];
        let sub = [c(-1.0, 1e-12), c(-1.0, -1e-12)];
        let cert = multiset_contains(&sup, &sub, Tolerance::default());
        assert!(cert.contained);
        assert_eq!(cert.ambiguous, 1);
        let sub3 = [c(-1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)];
        assert!(!multiset_contains(&sup, &sub3, Tolerance::default()).contained);
        let diff = multiset_difference(&sup, &sub, Tolerance::default()).unwrap();
        assert_eq!(diff.len(), 2);
    }

    #[test]
    fn self_contained() {
        let a = [c(-2.0, 0.5), c(-2.0, -0.5), c(0.0, 0.0)];
        assert!(multiset_equal(&a, &a, Tolerance::default()).contained);
        assert!(!multiset_equal(&a, &a[..2], Tolerance::default()).contained);
    }
}
