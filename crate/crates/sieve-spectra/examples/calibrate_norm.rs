//! Scratch: calibrate the Lemma-norm shape constants.

use std::sync::Arc;

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::build_weight;
use sieve_spectra::quad::adaptive_quad;
use sieve_spectra::transform::{w_star, TransformConfig};

fn main() -> sieve_spectra::Result<()> {
    let cache = Arc::new(build_arith_cache(1 << 22));
    let kernel = build_weight(5)?;
    let mut cfg = TransformConfig::new(cache);
    cfg.quad_tol = 1e-6;

    for &toh in &[0.125, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let v = adaptive_quad(
            |y| {
                let w = w_star(&kernel, &cfg, toh * y).unwrap_or(0.0);
                w * w
            },
            2e-3,
            1.0,
            1e-7,
        )?;
        let log_term = (2.0f64 + toh).ln().sqrt();
        println!(
            "toh={toh:6}: int = {v:.6}  int*toh = {:.4}  -ln(int)/(2 sqrt(log(2+toh))) = {:.4}",
            v * toh,
            -v.ln() / (2.0 * log_term)
        );
    }
    Ok(())
}
