//! Classification of monic centered complex polynomial vector fields
//! ż = P(z).
//!
//! The crate computes, for a polynomial `P` of degree d ≥ 2:
//!
//! * the combinatorial invariant: a non-crossing equivalence relation on
//!   the 2d−2 separatrix labels together with the marked set of homoclinic
//!   labels ([`comb::CombinatorialDataSet`]),
//! * the analytic invariant: the tuple of strip times α ∈ ℍ and homoclinic
//!   transit times τ ∈ ℝ₊ ([`invariants::AnalyticInvariant`]),
//!
//! and inverts the classification numerically: given a valid data set and
//! matching analytic tuple, [`realizer::realize`] recovers the unique
//! polynomial realizing them.
//!
//! Heavy inner loops (tracing all separatrices, enumeration, solver
//! restarts) run data-parallel via rayon when the default `parallel`
//! feature is enabled; every such entry point also has an explicit
//! sequential form used by the benchmarks.

pub mod comb;
pub mod invariants;
pub mod json;
pub mod poly;
pub mod realizer;
pub mod svg;
pub mod tracer;

mod par;

pub use num_complex::Complex64;

/// Convenience constructor mirroring `num_complex::Complex64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
