//! The L = 7 sector (2,1,3,1) at (p, q) = (0.8, 0.2) and its one-species shadows.

use masep::spectra::{next_leading_with, SpectrumTable};
use masep::{Rates, Sector};

#[test]
fn one_species_spectra_embed_and_string_leads() {
    let rates = Rates::parse("0.8", "0.2").unwrap();
    let table = SpectrumTable::new(&rates);
    let s = Sector::parse("2,1,3,1", 7).unwrap();
    let spec = table.get(&s).unwrap();
    assert_eq!(spec.len(), 420);
    for lower in ["2,5", "3,4", "6,1"] {
        let t = Sector::parse(lower, 7).unwrap();
        assert!(spec.contains(&table.get(&t).unwrap()).contained, "Spec({lower})");
    }
    let nl = next_leading_with(&s, &table).unwrap();
    assert_eq!(nl.len(), 3);
    let top = nl.iter().map(|e| e.plus.re).fold(f64::NEG_INFINITY, f64::max);
    // No nonzero eigenvalue between the string and the origin.
    let inside = spec.values().iter().filter(|z| z.norm() > 1e-9 && z.re > top + 1e-9).count();
    assert_eq!(inside, 0);
}

// As p − q shrinks the three next-leading pairs close up toward one real point.
#[test]
fn next_leading_string_collapses_along_asymmetry_ramp() {
    let s = Sector::parse("2,1,3,1", 7).unwrap();
    let mut spreads = Vec::new();
    for (p, q) in [(0.8, 0.2), (0.7, 0.3), (0.6, 0.4), (0.55, 0.45), (0.51, 0.49), (0.5, 0.5)] {
        let table = SpectrumTable::new(&Rates::from_f64(p, q).unwrap());
        let nl = next_leading_with(&s, &table).unwrap();
        let pts: Vec<_> = nl.iter().flat_map(|e| [e.plus, e.minus]).collect();
        let spread = pts.iter().flat_map(|a| pts.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
        spreads.push(spread);
    }
    for w in spreads.windows(2) {
        assert!(w[1] < w[0], "{spreads:?}");
    }
    assert!(spreads.last().unwrap().abs() < 1e-10, "{spreads:?}");
}
