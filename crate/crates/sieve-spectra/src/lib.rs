//! sieve-spectra: a desk-scale numerical laboratory for smoothed
//! large-sieve identities.
//!
//! The library builds the explicit convolution-power weight kernels W(m; t),
//! runs their transform chain (W#, Wb, W~, W*_C, W*, hat W*), decomposes
//! the divisor-detection delta-symbol into its five exact pieces, and
//! diagonalizes the one-parameter family of difference operators whose
//! eigenvalues control the smoothed large-sieve quadratic form. A check
//! harness turns each identity of the theory into a seeded, deterministic
//! numerical verification with an explicit tolerance policy.
//!
//! Entry points:
//! * [`kernel::build_weight`] for the weight kernel and its integrals,
//! * [`transform::w_star_series`] / [`transform::w_hat_star`] for the
//!   transform chain,
//! * [`lsq::smoothed_form`] / [`lsq::delta_decomposition`] for the
//!   quadratic forms and the delta-symbol,
//! * [`localspec::nystrom_spectrum`] / [`localspec::spectral_identity`]
//!   for the operator spectra and the global decomposition,
//! * [`verify::run_suite`] for the named check suites.
//!
//! The `examples/` directory exercises one capability per file and is the
//! best place to start reading.

pub mod arith;
pub mod error;
pub mod kernel;
pub mod localspec;
pub mod lsq;
pub mod quad;
pub mod report;
pub mod transform;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
