//! The raw and smoothed large-sieve quadratic forms over the dyadic Farey
//! window Q < q <= 2Q, the bilinear route through Delta, and the Riemann-sum
//! regime where the smoothed form approaches Q I_0(W) ||phi||^2.
//!
//!     cargo run --example large_sieve_forms

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::{build_weight, i0};
use sieve_spectra::lsq::{delta_bilinear, raw_form, smoothed_form};
use sieve_spectra::verify::{generate_sequence, SequenceKind, SequenceSpec};

fn main() -> sieve_spectra::Result<()> {
    let cache = build_arith_cache(1 << 16);
    let kernel = build_weight(5)?;

    let n = 40usize;
    let q = 25.0;
    let phi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomComplex,
        n,
        seed: 5,
    })?;
    println!("random phi, N = {n}, Q = {q}:");
    println!("  raw form      = {:.8}", raw_form(&phi, q));
    let s = smoothed_form(&phi, &kernel, q);
    println!("  smoothed form = {:.8}", s);
    println!(
        "  delta bilinear = {:.8}   (difference {:.2e})",
        delta_bilinear(&cache, &kernel, q, &phi),
        (s - delta_bilinear(&cache, &kernel, q, &phi)).abs()
    );

    println!("\nRiemann-sum regime: S/(Q I0 ||phi||^2) -> 1 as Q/N grows:");
    let n = 32usize;
    let phi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomComplex,
        n,
        seed: 9,
    })?;
    for k in 3..=9 {
        let q = (1usize << k) as f64 * n as f64;
        let ratio =
            smoothed_form(&phi, &kernel, q) / q / (i0(&kernel, &cache, q)? * phi.norm_sq());
        println!("  Q/N = 2^{k}: ratio = {ratio:.6}   |ratio - 1| = {:.2e}", (ratio - 1.0).abs());
    }
    Ok(())
}
