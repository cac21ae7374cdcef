//! Optimal strong-stability-preserving coefficients for linear multistep
//! methods, computed in exact rational arithmetic.
//!
//! Every answer comes with evidence. An optimal coefficient is reported as a
//! bracket `[r_lo, r_hi]`: a method of the requested order whose threshold
//! factor is at least `r_lo`, and a dual polynomial proving that nothing
//! reaches `r_hi`. Both sides can be rechecked with [`certificate::verify_certificate`]
//! and [`order::order_residuals`] without trusting the solver.
//!
//! ```
//! use ssp_lmm::optimizer::{optimal_ssp, SspQuery};
//! use ssp_lmm::rational::rat;
//!
//! let b = optimal_ssp(&SspQuery::explicit(3, 2)).unwrap();
//! assert!(b.exact);
//! assert_eq!(b.r_lo, rat(1, 2));
//! ```
//!
//! The `examples/` directory walks through each part: `lp_farkas`,
//! `optimal_coefficients`, `certificates`, `bounds_and_thresholds`,
//! `implicit_explicit`, `monotone_integration` and `plateau_support`.

pub mod bounds;
pub mod certificate;
pub mod cli;
pub mod integrator;
pub mod lp;
pub mod optimizer;
pub mod order;
pub mod poly;
pub mod rational;
