//! Multi-species asymmetric simple exclusion process on a ring.
//!
//! The crate builds the Markov matrix of every basic sector, the symmetry
//! operators, the species-merging intertwiners and the Perk-Schultz transfer
//! matrix; it computes full and genuine spectra, checks the inclusion and
//! duality structure between sectors, evaluates and solves the nested Bethe
//! equations, and fits the relaxation-gap scaling.
//!
//! ```
//! use masep::{Rates, Sector, spectra};
//! let s = Sector::parse("1,3", 4).unwrap();
//! let spec = spectra::sector_spectrum(&s, &Rates::parse("2/3", "1/3").unwrap()).unwrap();
//! assert_eq!(spec.len(), 4);
//! ```

pub mod bethe;
pub mod cli;
pub mod error;
pub mod operators;
pub mod rate;
pub mod scaling;
pub mod sectors;
pub mod spectra;

pub use error::{Error, Result};
pub use rate::{Rate, Rates};
pub use sectors::Sector;

pub use num_complex::Complex64 as C64;

/// Default limit on dense matrix dimension.
pub const DEFAULT_CAPACITY: usize = 6000;

static CAPACITY_OVERRIDE: std::sync::atomic::AtomicUsize = std::sync::atomic::AtomicUsize::new(0);

/// Dense capacity: an explicit override, else `MASEP_CAPACITY`, else [`DEFAULT_CAPACITY`].
pub fn capacity() -> usize {
    let o = CAPACITY_OVERRIDE.load(std::sync::atomic::Ordering::Relaxed);
    if o > 0 {
        return o;
    }
    std::env::var("MASEP_CAPACITY")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v > 0)
        .unwrap_or(DEFAULT_CAPACITY)
}

/// Override the dense capacity for this process. Zero restores the default lookup.
pub fn set_capacity(limit: usize) {
    CAPACITY_OVERRIDE.store(limit, std::sync::atomic::Ordering::Relaxed);
}

pub(crate) fn check_capacity(dim: usize) -> Result<()> {
    let limit = capacity();
    if dim > limit {
        return Err(Error::Capacity { dim: dim.to_string(), limit });
    }
    Ok(())
}
