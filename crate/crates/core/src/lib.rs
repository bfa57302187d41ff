//! Distinguishability of pure-state ensembles under separable measurements.
//!
//! Given `{p_i, |ψ_i⟩}` on a multipartite system, the crate evaluates the
//! average fidelity and success probability of explicit measurements, and
//! brackets their best separable values between lower bounds
//! (distinguishable subsets, strategies) and upper bounds (Schmidt
//! coefficients, the operator `Λ`, spectral bounds on `ρ` and `ρ′`).
//!
//! ```
//! use sepfid::bounds::bound_report;
//! use sepfid::catalog::tilted_bell_basis;
//!
//! let entry = tilted_bell_basis(0.8).unwrap();
//! let r = bound_report(&entry.ensemble, &entry.report_options()).unwrap();
//! assert_eq!(r.fidelity.value().map(|v| (v - 0.64).abs() < 1e-12), Some(true));
//! ```
//!
//! Modules:
//! - [`linalg`]: states, dense complex matrices, Hermitian eigensolver,
//!   Schmidt decomposition, norms.
//! - [`ensemble`]: ensembles, bipartitions and per-cut quantities.
//! - [`measurement`]: separable and general POVMs, decoding maps.
//! - [`fidelity`]: `F(M,G)`, `F(M)`, `P_s(M)`.
//! - [`bounds`]: every bound and the combined report.
//! - [`catalog`]: ensembles with known separable values.
//! - [`search`]: product-basis search with seeded restarts.
//! - [`io`], [`cli`], [`verify`]: files, the command line tool and the
//!   reproduction table.
//! - [`tolerance`]: the tolerance profile shared by all of the above.

pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fidelity;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod search;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
