//! Stationary distribution of the L = 3 ring with all species distinct.

use masep::operators::SectorBasis;
use masep::spectra::stationary_vector;
use masep::{Rates, Sector};

fn main() -> masep::Result<()> {
    let rates = Rates::parse("0.8", "0.2")?;
    let s = Sector::maximal(3)?;
    let v = stationary_vector(&s, &rates)?;
    for (k, x) in SectorBasis::new(&s)?.labels().iter().zip(&v) {
        println!("{k}: {x:.6}");
    }
    Ok(())
}
