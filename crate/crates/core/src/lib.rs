//! Finite-type cohomology classes of spaces of knots, evaluated on concrete
//! families of knots, plus the combinatorics that certifies their formulas.
//!
//! Conventions throughout: the first coordinate of ℝⁿ points "up", the second
//! points "to the right", and the projection `p` drops the first coordinate.

pub mod bead;
pub mod chord;
pub mod cocycle;
pub mod crossing;
pub mod curve;
pub mod error;
pub mod family;
pub mod gauss;
pub mod gf2;
pub mod io;
pub mod linalg;
pub mod scenarios;
pub mod selftest;
pub mod strata;
pub mod track;

pub use error::{Error, Result};

/// Largest ambient dimension supported by the fixed-size vector type.
pub const MAX_DIM: usize = 5;

/// A point or vector of ℝⁿ, n ≤ [`MAX_DIM`]; unused trailing slots are zero.
pub type Vecn = [f64; MAX_DIM];

/// Worker pool sized by `KNOTSTRATA_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("KNOTSTRATA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
