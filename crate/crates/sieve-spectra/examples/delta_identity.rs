//! The divisor-detection symbol Delta(v) and its exact five-piece
//! decomposition into diagonal, direct-divisor and complementary-divisor
//! parts.
//!
//!     cargo run --example delta_identity

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::build_weight;
use sieve_spectra::lsq::{delta_decomposition, delta_symbol, SieveParams};

fn main() -> sieve_spectra::Result<()> {
    let cache = build_arith_cache(4096);
    let kernel = build_weight(5)?;
    let q = 20.0;
    let sieve = SieveParams {
        q_scale: q,
        h_max: 3.0,
        moebius_cut: 4,
        divisor_cut: 4,
        fourier_cut: None,
    };

    println!("Delta(v) and its pieces at Q = {q}, C = 4, E = 4, H = 3:");
    println!(
        "{:>4} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>10}",
        "v", "Delta", "L0", "U", "U#", "L", "L#", "residual"
    );
    let mut worst = 0.0f64;
    for v in [0i64, 1, 2, 6, 12, 17, 24, 36, 48] {
        let direct = delta_symbol(&cache, &kernel, q, v);
        let p = delta_decomposition(&cache, &kernel, q, &sieve, v)?;
        let residual = (p.total() - direct).abs();
        worst = worst.max(residual);
        println!(
            "{v:>4} {direct:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {residual:>10.1e}",
            p.l0, p.u, p.u_sharp, p.l, p.l_sharp
        );
    }
    for v in -50..=50i64 {
        let p = delta_decomposition(&cache, &kernel, q, &sieve, v)?;
        worst = worst.max((p.total() - delta_symbol(&cache, &kernel, q, v)).abs());
    }
    println!("\nworst residual over |v| <= 50: {worst:.2e} (identity is exact)");
    Ok(())
}
