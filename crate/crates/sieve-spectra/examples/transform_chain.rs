//! The transform chain of the weight: divisor sums W# and Wb, the sawtooth
//! average W~, the Möbius average W*_C, the fast series for W*, and the
//! Fourier transform hat W* with its plateau.
//!
//!     cargo run --example transform_chain

use std::sync::Arc;

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::build_weight;
use sieve_spectra::transform::{
    w_flat, w_hat_star, w_hat_star_plateau, w_sharp, w_star_c, w_star_series, w_tilde,
    TransformConfig,
};

fn main() -> sieve_spectra::Result<()> {
    let cache = Arc::new(build_arith_cache(1 << 20));
    let kernel = build_weight(5)?;
    let mut cfg = TransformConfig::new(Arc::clone(&cache));
    cfg.quad_tol = 1e-8;

    println!("W#(y) (finite divisor sum) and the complement J(W) - W~(y):");
    for y in [0.5, 1.5, 3.0, 6.0] {
        println!(
            "  y={y:3}: W# = {:+.10}   J - W~ = {:+.10}",
            w_sharp(&kernel, y),
            kernel.j() - w_tilde(&kernel, &cfg, y)?
        );
    }

    println!("\nWb(z) -> J(W) as z -> 0:");
    for z in [1.0, 0.1, 0.01, 0.001] {
        println!("  Wb({z:5}) = {:.8}   (J = {:.8})", w_flat(&kernel, z)?, kernel.j());
    }

    println!("\nW*(z): fast series (with certified truncation bound) vs Möbius route:");
    cfg.moebius_cut = Some(400);
    for z in [0.5, 1.0, 2.0, 4.0] {
        let series = w_star_series(&kernel, &cfg, z)?;
        let moebius = w_star_c(&kernel, &cfg, z)?;
        println!(
            "  z={z:3}: series = {:+.8} (bound {:.1e}, {} terms)   W*_400 = {:+.8}",
            series.value, series.err_bound, series.terms, moebius
        );
    }

    println!("\nhat W*(u): plateau {:.8} on |u| <= 1/2, then sign changes:", w_hat_star_plateau(&kernel));
    for u in [0.0, 0.4, 0.6, 0.75, 0.9, 1.0, 2.0, 5.0] {
        println!("  hat W*({u:4}) = {:+.8}", w_hat_star(&kernel, &cache, u)?);
    }
    println!("  (note hat W*(1) = hat W*(0): the n-window at u = 1 only hits W(1) = W(2) = 0)");
    Ok(())
}
