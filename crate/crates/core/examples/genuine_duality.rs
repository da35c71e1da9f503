//! Genuine spectra and the duality between complementary sectors at L = 5.

use masep::sectors::enumerate_basic_sectors;
use masep::spectra::{check_spectral_duality_with, SpectrumTable};
use masep::Rates;

fn main() -> masep::Result<()> {
    let rates = Rates::parse("2/3", "1/3")?;
    let table = SpectrumTable::new(&rates);
    for s in enumerate_basic_sectors(5)? {
        let r = check_spectral_duality_with(&s, &table)?;
        println!(
            "{:>10} <-> {:<10} genuine dim {:>3}  dual {}  routes agree {}",
            r.sector,
            r.complement,
            s.genuine_dimension(),
            r.spectral.contained,
            r.methods_agree
        );
    }
    Ok(())
}
