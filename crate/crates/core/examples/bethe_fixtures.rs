//! Check every tabulated L = 4 root set against the nested Bethe equations,
//! the eigen-polynomial and the energy, then the completeness per sector.

use masep::bethe::{verify_completeness, verify_table, FixtureTable, BetheRootSet, ROOT_TOLERANCE};

fn main() -> masep::Result<()> {
    let table = FixtureTable::bundled();
    let checks = verify_table(&table, ROOT_TOLERANCE)?;
    for c in &checks {
        println!(
            "{:>8} row {:>2} set {}  residual {:.1e}  Λ err {:.1e}  E err {:.1e}  {}",
            c.sector,
            c.row,
            c.set,
            c.residuals.max_backward_error,
            c.polynomial_error,
            c.energy_error,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    for s in table.sectors() {
        let roots: Vec<BetheRootSet> = table.sector_rows(&s).flat_map(|r| r.root_sets.iter().cloned()).collect();
        let rep = verify_completeness(&s, &table.rates, &roots)?;
        println!("{s}: {} regular sets, genuine dimension {}", rep.regular_count, rep.genuine_dimension);
    }
    Ok(())
}
