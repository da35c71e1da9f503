//! Exact-rational operator identities on every sector of a small ring.

use masep::operators::check_structural_identities;
use masep::sectors::enumerate_basic_sectors;
use masep::Rates;

fn main() -> masep::Result<()> {
    let rates = Rates::parse("5/11", "3/13")?;
    for s in enumerate_basic_sectors(4)? {
        let rep = check_structural_identities(&s, &rates)?;
        let failed: Vec<&str> = rep.identities.iter().filter(|i| !i.holds).map(|i| i.name.as_str()).collect();
        println!("{:>8}: {} identities, failed {:?}", rep.sector, rep.identities.len(), failed);
    }
    Ok(())
}
