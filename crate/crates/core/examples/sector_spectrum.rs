//! Full spectrum of one sector, its next-leading eigenvalues, and the
//! inclusion of smaller sectors' spectra.

use masep::spectra::{next_leading, sector_spectrum, check_inclusion};
use masep::{Rates, Sector};

fn main() -> masep::Result<()> {
    let rates = Rates::parse("4/5", "1/5")?;
    let s = Sector::parse("2,1,3,1", 7)?;
    let spec = sector_spectrum(&s, &rates)?;
    println!("sector {s}: {} eigenvalues", spec.len());
    for (j, e) in next_leading(&s, &rates)?.iter().enumerate() {
        println!("  E±_{} = {:.8} ± {:.8}i", j + 1, e.plus.re, e.plus.im);
    }
    for lower in ["2,5", "3,4", "6,1"] {
        let t = Sector::parse(lower, 7)?;
        let cert = check_inclusion(&t, &s, &rates)?;
        println!("Spec{t} in Spec{s}: {} (worst distance {:.1e})", cert.contained, cert.worst);
    }
    Ok(())
}
