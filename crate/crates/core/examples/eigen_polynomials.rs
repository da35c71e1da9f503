//! Transfer-matrix eigen-polynomials of a sector, and the stationary one from
//! roots sent to 1/p.

use masep::bethe::{extract_eigen_polynomials, stationary_eigen_polynomial};
use masep::{Rates, Sector};

fn main() -> masep::Result<()> {
    let rates = Rates::parse("2/3", "1/3")?;
    let s = Sector::parse("2,1,1", 4)?;
    for e in extract_eigen_polynomials(&s, &rates)? {
        let c: Vec<String> = e.coefficients.iter().map(|z| format!("{:.5}{:+.5}i", z.re, z.im)).collect();
        println!("E = {:.6}  Λ = [{}]", e.energy().re, c.join(", "));
    }
    let st = stationary_eigen_polynomial(4, rates.p(), rates.q(), &[2, 1, 1, 0])?;
    println!("stationary: λ^4 coefficient {:.6}", st[4].re);
    Ok(())
}
