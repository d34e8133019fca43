//! Scratch calibration: prints the raw quantities behind the spectrum-suite
//! thresholds so the frozen tolerances can be audited.

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

    for &toh in &[0.25, 1.0, 4.0] {
        println!("== tau/h = {toh} ==");
        let mut sums = Vec::new();
        for m in [100usize, 200, 400, 800] {
            let spec = nystrom_spectrum(&kernel, &cfg, toh, 1, m, 0)?;
            sums.push(spec.sum_abs());
            let top: Vec<String> = spec.eigenvalues()[..8]
                .iter()
                .map(|l| format!("{l:+.6}"))
                .collect();
            println!("  M={m:4}  sum|l|={:.6}  top8: {}", spec.sum_abs(), top.join(" "));
        }
        println!(
            "  increments: {:.2e} {:.2e} {:.2e}",
            (sums[1] - sums[0]).abs(),
            (sums[2] - sums[1]).abs(),
            (sums[3] - sums[2]).abs()
        );

        let spec = nystrom_spectrum(&kernel, &cfg, toh, 1, 400, 400)?;
        let max_v = spec
            .kernel_samples()
            .iter()
            .fold(0.0f64, |m, &x| m.max(x.abs()));
        println!(
            "  max|V| = {max_v:.6}  |l1| = {:.6}  |l6| = {:.6}  |l21| = {:.6}",
            spec.eigenvalues()[0].abs(),
            spec.eigenvalues()[5].abs(),
            spec.eigenvalues()[20].abs()
        );
        // Mercer remainder for a few L
        for l in [0usize, 5, 20, 100] {
            let rep = sieve_spectra::localspec::mercer_check(&spec, l, 5e-4);
            println!(
                "  mercer L={l:3}: max-rem = {:.6}, |lambda_(L+1)| = {:.6}",
                rep.lhs, rep.rhs
            );
        }
        // lambda_max vs plateau bound at two grids
        let plateau = sieve_spectra::localspec::hat_v_plateau(&kernel, toh);
        for m in [400usize, 800] {
            let s = nystrom_spectrum(&kernel, &cfg, toh, 1, m, 0)?;
            let lmax = s.eigenvalues().iter().cloned().fold(f64::MIN, f64::max);
            println!(
                "  M={m:4}: lambda_max - hatV_max = {:+.3e}",
                lmax - plateau
            );
        }
    }
    Ok(())
}
