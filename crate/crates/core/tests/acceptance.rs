//! Acceptance run: every criterion at its stated tolerance and time budget.
//! Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

use masep::bethe::{
    eigen_polynomial_from_roots, extract_eigen_polynomials, refine_roots, stationary_eigen_polynomial, verify_table, FixtureTable,
    ROOT_TOLERANCE,
};
use masep::operators::{check_structural_identities, ybe_residual, SectorBasis};
use masep::scaling::{asymptotic_prediction, fit_exponent, gap_scan, GapMethod};
use masep::sectors::{enumerate_basic_sectors, genuine_dimension, Sector};
use masep::spectra::{
    check_gap_conjecture_with, check_spectral_duality_with, next_leading_with, second_largest, sector_spectrum, stationary_vector, SpectrumTable,
};
use masep::{Rate, Rates, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: masep::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rates(p: &str, q: &str) -> Rates {
    Rates::parse(p, q).expect("rates")
}

fn tabulated_spectra() -> Check {
    let table = FixtureTable::bundled();
    let mut worst_e: f64 = 0.0;
    let mut worst_poly: f64 = 0.0;
    for s in table.sectors() {
        let spec = lib(sector_spectrum(&s, &table.rates))?;
        let polys = lib(extract_eigen_polynomials(&s, &table.rates))?;
        for row in table.sector_rows(&s) {
            let tol_e = if row.energy_exact { 1e-9 } else { 1e-5 };
            let de = spec.values().iter().map(|z| (z - row.energy).norm()).fold(f64::INFINITY, f64::min);
            ensure(de < tol_e, || format!("{s}: E = {} missing (closest {de:.1e})", row.energy))?;
            let tol_p = if row.polynomial_exact { 1e-9 } else { 1e-5 };
            let dp = polys.iter().map(|e| e.max_abs_diff(&row.polynomial)).fold(f64::INFINITY, f64::min);
            ensure(dp < tol_p, || format!("{s}: Λ for E = {} off by {dp:.1e}", row.energy))?;
            worst_e = worst_e.max(de / tol_e);
            worst_poly = worst_poly.max(dp / tol_p);
        }
    }
    Ok(format!(
        "{} rows in {} sectors; worst E and Λ errors at {:.1e} and {:.1e} of tolerance",
        table.rows.len(),
        table.sectors().len(),
        worst_e,
        worst_poly
    ))
}

fn bethe_fixtures() -> Check {
    let table = FixtureTable::bundled();
    let checks = lib(verify_table(&table, ROOT_TOLERANCE))?;
    if let Some(c) = checks.iter().find(|c| !c.passed) {
        return Err(format!(
            "{} row {} set {}: residual {:.1e}, Λ {:.1e}, E {:.1e}, displacement {:.1e}",
            c.sector, c.row, c.set, c.residuals.max_backward_error, c.polynomial_error, c.energy_error, c.refinement_displacement
        ));
    }
    let mut pairs = 0;
    for row in table.rows.iter().filter(|r| r.root_sets.len() > 1) {
        let polys = row
            .root_sets
            .iter()
            .map(|rs| eigen_polynomial_from_roots(&refine_roots(rs)?.roots))
            .collect::<masep::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        for p in &polys[1..] {
            let d = p.max_abs_diff(&polys[0].coefficients);
            ensure(d < ROOT_TOLERANCE, || format!("{}: paired root sets give Λ differing by {d:.1e}", row.sector))?;
        }
        pairs += 1;
    }
    ensure(pairs == 3, || format!("expected 3 rows with paired root sets, found {pairs}"))?;
    let worst = checks.iter().map(|c| c.residuals.max_backward_error).fold(0.0, f64::max);
    Ok(format!("{} root sets pass, worst backward error {worst:.1e}; {pairs} paired rows share Λ", checks.len()))
}

fn spectral_duality() -> Check {
    let mut n = 0;
    let mut worst: f64 = 0.0;
    for (p, q) in [("0.8", "0.2"), ("0.5", "0.5"), ("2/3", "1/3")] {
        // L = 1 has no bond: H = 0 on the single state, so the shift −L(p+q) cannot appear.
        let one = lib(sector_spectrum(&Sector::vacuum(1).unwrap(), &rates(p, q)))?;
        ensure(one.values() == [C64::new(0.0, 0.0)], || format!("Spec(1) = {:?}", one.values()))?;
        for l in 2..=6 {
            let table = SpectrumTable::new(&rates(p, q));
            for s in lib(enumerate_basic_sectors(l))? {
                let r = lib(check_spectral_duality_with(&s, &table))?;
                ensure(r.passed && r.methods_agree, || format!("{s} at ({p},{q}): {r:?}"))?;
                worst = worst.max(r.spectral.worst);
                n += 1;
            }
        }
    }
    Ok(format!("{n} sector checks at 2 <= L <= 6, worst distance {worst:.1e}; L = 1 has no bond and Spec(1) = {{0}}"))
}

fn inclusion() -> Check {
    let rates = rates("0.8", "0.2");
    let mut pairs = 0;
    for l in 2..=5 {
        let table = SpectrumTable::new(&rates);
        let all = lib(enumerate_basic_sectors(l))?;
        for t in &all {
            for s in all.iter().filter(|s| *s != t && s.is_subset_of(t)) {
                let c = lib(table.get(t))?.contains(&*lib(table.get(s))?);
                ensure(c.contained, || format!("Spec{s} not in Spec{t} (worst {:.1e})", c.worst))?;
                pairs += 1;
            }
        }
    }
    let table = SpectrumTable::new(&rates);
    let big = lib(table.get(&Sector::parse("2,1,3,1", 7).unwrap()))?;
    for lower in ["2,5", "3,4", "6,1"] {
        let c = big.contains(&*lib(table.get(&Sector::parse(lower, 7).unwrap()))?);
        ensure(c.contained, || format!("Spec({lower}) not in Spec(2,1,3,1)"))?;
    }
    Ok(format!("{pairs} nested pairs at L <= 5 and the three L = 7 embeddings"))
}

fn dimensional_duality() -> Check {
    let mut n = 0;
    for l in 1..=12 {
        let all = lib(enumerate_basic_sectors(l))?;
        let by_mask: std::collections::HashMap<u64, BigInt> = all.iter().map(|s| (s.mask(), s.genuine_dimension())).collect();
        for s in &all {
            let g = &by_mask[&s.mask()];
            ensure(*g == by_mask[&s.complement().mask()], || format!("{s}: {g} vs complement"))?;
            let m = s.mask();
            let mut sub = m;
            let mut total = BigInt::from(0);
            loop {
                total += &by_mask[&sub];
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
            ensure(total == BigInt::from(s.dimension()), || format!("{s}: genuine dimensions sum to {total}"))?;
            n += 1;
        }
    }
    let a = genuine_dimension(&[1, 2, 1, 1]);
    let b = genuine_dimension(&[2, 3]);
    ensure(a == BigInt::from(9) && b == BigInt::from(9), || format!("(1,2,1,1) -> {a}, (2,3) -> {b}"))?;
    Ok(format!("{n} sectors at L <= 12; (1,2,1,1) and (2,3) both 9"))
}

fn gap_conjecture() -> Check {
    let mut n = 0;
    let mut margin = f64::INFINITY;
    for l in 2..=7 {
        let table = SpectrumTable::new(&rates("0.8", "0.2"));
        for s in lib(enumerate_basic_sectors(l))? {
            if s.dimension_usize().is_none_or(|d| d >= 5000) {
                continue;
            }
            let r = lib(check_gap_conjecture_with(&s, &table))?;
            ensure(r.holds && r.next_leading_embedded, || format!("{s}: {r:?}"))?;
            if s.species() > 1 {
                let spec = lib(table.get(&s))?;
                let gap = spec
                    .values()
                    .iter()
                    .filter(|z| z.norm() > 1e-9 && z.re < r.threshold - 1e-9)
                    .map(|z| r.threshold - z.re)
                    .fold(f64::INFINITY, f64::min);
                margin = margin.min(gap);
            }
            n += 1;
        }
    }
    Ok(format!("{n} sectors; smallest distance below the next-leading string {margin:.2e}"))
}

fn ssep_gap() -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for (p, ps) in [(0.5, "1/2"), (0.3, "3/10")] {
        let r = rates(ps, ps);
        for l in 3..=12 {
            let expected = -4.0 * p * (std::f64::consts::PI / l as f64).sin().powi(2);
            for m in 1..l {
                let s = Sector::from_parts(&[l - m, m]).unwrap();
                let e = lib(second_largest(&lib(sector_spectrum(&s, &r))?))?;
                let d = (e.plus - C64::new(expected, 0.0)).norm();
                ensure(d < 1e-10, || format!("{s}: {} vs {expected}", e.plus))?;
                worst = worst.max(d);
                n += 1;
            }
        }
        for l in 3..=6 {
            let expected = -4.0 * p * (std::f64::consts::PI / l as f64).sin().powi(2);
            let table = SpectrumTable::new(&r);
            for s in lib(enumerate_basic_sectors(l))?.into_iter().filter(|s| s.species() > 1) {
                for e in lib(next_leading_with(&s, &table))? {
                    for z in [e.plus, e.minus] {
                        let d = (z - C64::new(expected, 0.0)).norm();
                        ensure(d < 1e-10, || format!("{s}: E±_j = {z} vs {expected}"))?;
                        worst = worst.max(d);
                    }
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} sectors, worst deviation {worst:.1e}"))
}

fn kpz_scaling() -> Check {
    let (p, q) = (0.8, 0.2);
    let samples = lib(gap_scan(&[64, 128, 256, 512, 1024], 0.5, p, q, GapMethod::Bethe))?;
    let fit = lib(fit_exponent(&samples))?;
    ensure((1.45..=1.55).contains(&fit.z), || format!("z = {:.4}", fit.z))?;
    ensure(fit.amplitude.relative_error <= 0.10, || {
        format!("amplitude {:.4} vs {:.4}", fit.amplitude.extrapolated, fit.amplitude.predicted)
    })?;
    let quarter = lib(gap_scan(&[512], 0.25, p, q, GapMethod::Bethe))?;
    let (pred, _) = asymptotic_prediction(512, 0.25, p, q);
    let rel = (quarter[0].e_plus.im.abs() - pred.im.abs()).abs() / pred.im.abs();
    ensure(rel <= 0.02, || format!("Im E = {:.6e} vs {:.6e}", quarter[0].e_plus.im, pred.im))?;
    Ok(format!(
        "z = {:.4}, amplitude {:.4} vs {:.4} ({:.1}%), Im E off by {:.2}%",
        fit.z,
        fit.amplitude.extrapolated,
        fit.amplitude.predicted,
        100.0 * fit.amplitude.relative_error,
        100.0 * rel
    ))
}

fn stationary() -> Check {
    for (p, q) in [(0.8, 0.2), (2.0 / 3.0, 1.0 / 3.0), (0.35, 0.9)] {
        let r = Rates::from_f64(p, q).unwrap();
        let s = Sector::maximal(3).unwrap();
        let labels = lib(SectorBasis::new(&s))?.labels();
        ensure(labels == ["123", "132", "213", "231", "312", "321"], || format!("basis order {labels:?}"))?;
        let v = lib(stationary_vector(&s, &r))?;
        let (a, b) = (2.0 * p + q, p + 2.0 * q);
        let oracle = [a, b, b, a, a, b];
        let norm: f64 = oracle.iter().sum();
        for (x, o) in v.iter().zip(oracle) {
            ensure((x - o / norm).abs() < 1e-10, || format!("L = 3 stationary vector {v:?}"))?;
        }
    }
    let mut uniform = 0;
    for l in 1..=6 {
        for s in lib(enumerate_basic_sectors(l))? {
            for (r, applies) in [(rates("0.8", "0.2"), s.species() == 1), (rates("1/2", "1/2"), true)] {
                if !applies {
                    continue;
                }
                let v = lib(stationary_vector(&s, &r))?;
                let u = 1.0 / v.len() as f64;
                ensure(v.iter().all(|x| (x - u).abs() < 1e-10), || format!("{s} not uniform"))?;
                uniform += 1;
            }
        }
    }
    let mut polys = 0;
    let mut worst: f64 = 0.0;
    for (ps, qs) in [("2/3", "1/3"), ("0.8", "0.2")] {
        let r = rates(ps, qs);
        for l in 1..=5 {
            for s in lib(enumerate_basic_sectors(l))? {
                let mut counts = s.parts().to_vec();
                counts.resize(l, 0);
                let predicted = lib(stationary_eigen_polynomial(l, r.p(), r.q(), &counts))?;
                let found = lib(extract_eigen_polynomials(&s, &r))?;
                let zero: Vec<_> = found.iter().filter(|e| e.energy().norm() < 1e-8).collect();
                ensure(zero.len() == 1, || format!("{s}: {} eigen-polynomials at E = 0", zero.len()))?;
                let d = zero[0].max_abs_diff(&predicted);
                ensure(d < 1e-9, || format!("{s}: stationary Λ off by {d:.1e}"))?;
                worst = worst.max(d);
                polys += 1;
            }
        }
    }
    Ok(format!("L = 3 oracle at 3 rate pairs; {uniform} uniform vectors; {polys} stationary Λ, worst {worst:.1e}"))
}

fn structural() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut identities = 0;
    for l in 1..=5 {
        for _ in 0..2 {
            let p = Rate::from_ratio(rng.gen_range(1..30), rng.gen_range(1..30)).unwrap();
            let q = Rate::from_ratio(rng.gen_range(0..30), rng.gen_range(1..30)).unwrap();
            let r = Rates::new(p, q).unwrap();
            for s in lib(enumerate_basic_sectors(l))? {
                let rep = lib(check_structural_identities(&s, &r))?;
                if let Some(bad) = rep.identities.iter().find(|i| !i.holds) {
                    return Err(format!("{s} at ({}, {}): {} fails", r.p, r.q, bad.name));
                }
                identities += rep.identities.len();
            }
        }
    }
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        for _ in 0..4 {
            let c = |rng: &mut ChaCha8Rng| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (l1, l2) = (c(&mut rng), c(&mut rng));
            let (p, q) = (rng.gen_range(0.05..1.0), rng.gen_range(0.0..1.0));
            let res = ybe_residual(&l1, &l2, &C64::from(p), &C64::from(q), n);
            ensure(res < 1e-12, || format!("YBE residual {res:.1e} at N = {n}"))?;
            worst = worst.max(res);
        }
        let exact = ybe_residual(
            &BigRational::new(3.into(), 7.into()),
            &BigRational::new((-5).into(), 4.into()),
            &BigRational::new(2.into(), 3.into()),
            &BigRational::new(1.into(), 5.into()),
            n,
        );
        ensure(exact == 0.0, || format!("exact YBE residual {exact} at N = {n}"))?;
    }
    Ok(format!("{identities} exact identities at L <= 5; YBE worst {worst:.1e}, exact residual 0"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("tabulated L = 4 spectra and eigen-polynomials", tabulated_spectra, Duration::from_secs(10)),
        ("Bethe fixture verification", bethe_fixtures, Duration::from_secs(5)),
        ("spectral duality L <= 6", spectral_duality, Duration::from_secs(300)),
        ("inclusion L <= 5 and L = 7 showcase", inclusion, Duration::from_secs(120)),
        ("dimensional duality L <= 12", dimensional_duality, Duration::from_secs(1)),
        ("next-leading gap sweep L <= 7", gap_conjecture, Duration::from_secs(900)),
        ("symmetric-hopping gap", ssep_gap, Duration::from_secs(600)),
        ("KPZ scaling", kpz_scaling, Duration::from_secs(120)),
        ("stationary oracles", stationary, Duration::from_secs(600)),
        ("structural identities", structural, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = t.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {}: {} ({:.2?} of {:?}) {}",
            k + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            budget,
            detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
