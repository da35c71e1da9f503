//! The lattice of basic sectors: dimensions, genuine dimensions and cover edges.

use masep::sectors::{enumerate_basic_sectors, hasse_cover_edges};

fn main() -> masep::Result<()> {
    let l = 5;
    for s in enumerate_basic_sectors(l)? {
        let c = s.complement();
        println!("{:>10}  dim {:>4}  genuine {:>3}  complement {:>10} genuine {:>3}", s.text(), s.dimension(), s.genuine_dimension(), c.text(), c.genuine_dimension());
    }
    println!("{} cover edges", hasse_cover_edges(l)?.len());
    Ok(())
}
