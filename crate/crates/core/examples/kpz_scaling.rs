//! Relaxation gap of the one-species ring from the Bethe equations, and the
//! fitted dynamical exponent at half filling.

use masep::scaling::{asymptotic_prediction, fit_exponent, gap_scan, GapMethod};

fn main() -> masep::Result<()> {
    let (p, q) = (0.8, 0.2);
    let ls = [64, 128, 256, 512, 1024];
    let t = std::time::Instant::now();
    let samples = gap_scan(&ls, 0.5, p, q, GapMethod::Bethe)?;
    for s in &samples {
        let (pred, _) = asymptotic_prediction(s.l, 0.5, p, q);
        println!("L = {:5}  E = {:.10e}  leading term = {:.4e}", s.l, s.e_plus.re, pred.re);
    }
    let fit = fit_exponent(&samples)?;
    println!("z = {:.4}, amplitude {:.4} (predicted {:.4})", fit.z, fit.amplitude.extrapolated, fit.amplitude.predicted);

    let quarter = gap_scan(&[512], 0.25, p, q, GapMethod::Bethe)?;
    let (pred, _) = asymptotic_prediction(512, 0.25, p, q);
    println!("rho = 1/4, L = 512: Im E = {:.6e}, leading term {:.6e}", quarter[0].e_plus.im, pred.im);
    println!("elapsed {:.1?}", t.elapsed());
    Ok(())
}
