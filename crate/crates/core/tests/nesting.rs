//! Energies from Bethe roots do not depend on the nesting order.

use masep::bethe::{bethe_residuals, energy_from_roots, refine_roots, BetheRootSet, NestingOrder};
use masep::spectra::{genuine_spectrum, sector_spectrum, GenuineMethod};
use masep::{Rates, Sector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: f64 = 2.0 / 3.0;
const Q: f64 = 1.0 / 3.0;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut v = p.clone();
            v.insert(i, n);
            out.push(v);
        }
    }
    out
}

/// Distinct energies of regular solutions reached by Newton from random starts.
fn energies(l: usize, counts: &[usize], nesting: &[usize], tries: usize) -> Vec<C64> {
    let order = NestingOrder::new(nesting.to_vec()).unwrap();
    let sizes: Vec<usize> = (1..counts.len()).map(|k| nesting[k..].iter().map(|&a| counts[a - 1]).sum()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inv_p = C64::new(1.0 / P, 0.0);
    let mut found: Vec<C64> = Vec::new();
    for _ in 0..tries {
        let levels: Vec<Vec<C64>> = sizes
            .iter()
            .map(|&n| {
                (0..n).map(|_| C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect()
            })
            .collect();
        let Ok(start) = BetheRootSet::new(l, P, Q, order.clone(), counts.to_vec(), levels) else { continue };
        let Ok(r) = refine_roots(&start) else { continue };
        let rs = r.roots;
        let degenerate = rs.levels.iter().flatten().any(|&z| {
            !z.is_finite() || z.norm() > 1e4 || z.norm() < 1e-6 || (z - inv_p).norm() < 1e-3
        });
        if degenerate {
            continue;
        }
        let Ok(rep) = bethe_residuals(&rs) else { continue };
        if !rep.passes(1e-10) || !rep.regular {
            continue;
        }
        let Ok(e) = energy_from_roots(&rs) else { continue };
        // Free roots drifting onto 1/p or 1/q send E to 0 without reaching an eigenstate.
        if e.norm() < 1e-4 {
            continue;
        }
        // The equations are real, so conjugate roots solve them too.
        for z in [e, e.conj()] {
            if !found.iter().any(|f| (f - z).norm() < 1e-5) {
                found.push(z);
            }
        }
    }
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    found
}

fn same_set(a: &[C64], b: &[C64]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| (x - y).norm() < 1e-5))
}

/// Every nonempty set in `sets` equals the first nonempty one.
fn agree(sets: &[Vec<C64>]) -> bool {
    let mut it = sets.iter().filter(|s| !s.is_empty());
    match it.next() {
        Some(first) => it.all(|s| same_set(first, s)),
        None => true,
    }
}

// Which states are regular depends on the order, so energies are compared separately
// for states born in the sector and states inherited from smaller sectors.
#[test]
fn energies_agree_across_nesting_orders_at_l3() {
    let rates = Rates::from_f64(P, Q).unwrap();
    for counts in [[1usize, 1, 1], [2, 1, 0], [1, 2, 0], [1, 0, 2]] {
        let parts: Vec<usize> = counts.iter().copied().filter(|&m| m > 0).collect();
        let s = Sector::from_parts(&parts).unwrap();
        let spec = sector_spectrum(&s, &rates).unwrap();
        let mut genuine: Vec<C64> = Vec::new();
        for z in genuine_spectrum(&s, &rates, GenuineMethod::Kernel).unwrap().values() {
            if !genuine.iter().any(|g| (g - z).norm() < 1e-5) {
                genuine.push(*z);
            }
        }
        let (mut born, mut inherited) = (Vec::new(), Vec::new());
        for nesting in permutations(3) {
            let e = energies(3, &counts, &nesting, 800);
            for z in &e {
                assert!(spec.values().iter().any(|v| (v - z).norm() < 1e-5), "{counts:?} {nesting:?}: {z} not in the spectrum");
            }
            let (g, i): (Vec<C64>, Vec<C64>) = e.into_iter().partition(|z| genuine.iter().any(|g| (g - z).norm() < 1e-5));
            born.push(g);
            inherited.push(i);
        }
        let populated = born.iter().zip(&inherited).filter(|(g, i)| !g.is_empty() || !i.is_empty()).count();
        assert!(populated >= 2, "{counts:?}: fewer than two orders produced regular roots");
        assert!(agree(&born), "{counts:?}: genuine energies differ across orders: {born:?}");
        assert!(agree(&inherited), "{counts:?}: inherited energies differ across orders: {inherited:?}");
        assert!(born.iter().any(|g| same_set(g, &genuine)), "{counts:?}: no order reaches the genuine spectrum {genuine:?}");
    }
}
