//! Nyström spectrum of the difference operator G -> int G(y') V(y - y') dy'
//! with V(y) = W*(tau y / h): eigenvalue table, the exact zero trace, the
//! second-moment identity, and the Fourier-range bracket.
//!
//!     cargo run --example nystrom_spectrum

use std::sync::Arc;

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::build_weight;
use sieve_spectra::localspec::{fourier_eig_bounds_with_gap, nystrom_spectrum, GapForm};
use sieve_spectra::transform::TransformConfig;
use sieve_spectra::verify::t2_rhs;

fn main() -> sieve_spectra::Result<()> {
    let cache = Arc::new(build_arith_cache(1 << 23));
    let kernel = build_weight(5)?;
    let mut cfg = TransformConfig::new(Arc::clone(&cache));
    cfg.quad_tol = 1e-7;

    let toh = 1.0;
    let m = 400;
    let spec = nystrom_spectrum(&kernel, &cfg, toh, 1, m, 12)?;

    println!("difference-operator spectrum at tau/h = {toh}, M = {m}:");
    println!("{:>4} {:>14} {:>14} {:>14}", "ell", "lambda", "l*sqrt(ell)", "l*ell");
    for (i, &lam) in spec.eigenvalues().iter().take(12).enumerate() {
        let ell = (i + 1) as f64;
        println!(
            "{:>4} {lam:>+14.8} {:>+14.8} {:>+14.8}",
            i + 1,
            lam * ell.sqrt(),
            lam * ell
        );
    }
    println!("\ntrace (sum of all {m} eigenvalues): {:+.2e}  (exactly zero kernel diagonal)", spec.trace());
    println!("sum lambda^2 = {:.8}", spec.sum_sq());
    println!("2 int V^2 (1-y) dy = {:.8}  (second-moment identity)", t2_rhs(&kernel, &cfg, toh)?);
    println!("sum |lambda| = {:.6}  (nuclearity)", spec.sum_abs());

    // the gap form carries user-supplied constants and is reported only
    let gap = GapForm {
        c: 0.05,
        c4: 1.0,
        u2: toh,
    };
    let rep = fourier_eig_bounds_with_gap(&spec, &kernel, &cache, 1e-6, Some(gap))?;
    println!("\nFourier bracket: {}", rep.notes);
    Ok(())
}
