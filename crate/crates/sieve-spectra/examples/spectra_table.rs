//! Per-modulus spectra table: (h, tau, ell, lambda) rows for the family of
//! difference operators at fixed tau, the shape consumed by the global
//! decomposition.
//!
//!     cargo run --example spectra_table

use std::sync::Arc;

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::build_weight;
use sieve_spectra::localspec::nystrom_spectrum;
use sieve_spectra::transform::TransformConfig;

fn main() -> sieve_spectra::Result<()> {
    let cache = Arc::new(build_arith_cache(1 << 23));
    let kernel = build_weight(5)?;
    let mut cfg = TransformConfig::new(cache);
    cfg.quad_tol = 1e-7;

    let tau = 1.0;
    let ells = 8usize;
    println!("h,tau,ell,lambda");
    for h in 1..=6usize {
        let spec = nystrom_spectrum(&kernel, &cfg, tau, h, 256, 0)?;
        for (i, lam) in spec.eigenvalues().iter().take(ells).enumerate() {
            println!("{h},{tau},{},{lam}", i + 1);
        }
    }
    Ok(())
}
