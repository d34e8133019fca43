//! Pull-backs of local eigenfunctions to sequences: near-orthonormality of
//! the family {g(h, ell, chi)} and the Selberg almost-orthogonality bound.
//!
//!     cargo run --example pullback_family

use std::sync::Arc;

use sieve_spectra::arith::{build_arith_cache, character_table};
use sieve_spectra::kernel::build_weight;
use sieve_spectra::localspec::{bessel_bound, nystrom_spectrum, pullback};
use sieve_spectra::transform::TransformConfig;
use sieve_spectra::verify::{generate_sequence, SequenceKind, SequenceSpec};

fn main() -> sieve_spectra::Result<()> {
    let cache = Arc::new(build_arith_cache(1 << 23));
    let kernel = build_weight(5)?;
    let mut cfg = TransformConfig::new(Arc::clone(&cache));
    cfg.quad_tol = 1e-7;

    let n = 20_000usize;
    let mut family = Vec::new();
    let mut labels = Vec::new();
    for h in 1..=4usize {
        let spec = nystrom_spectrum(&kernel, &cfg, 1.0, h, 400, 3)?;
        let table = character_table(h)?;
        for chi in 0..table.count() {
            for ell in 0..3 {
                family.push(pullback(&spec, &table, n, ell, chi));
                labels.push(format!("(h={h},chi={chi},l={})", ell + 1));
            }
        }
    }
    let k = family.len();
    println!("family of {k} pulled-back eigenvectors at N = {n}, tau = 1");

    let mut worst = 0.0f64;
    let mut worst_pair = (0, 0);
    for i in 0..k {
        for j in 0..=i {
            let g = family[i].values.scalar_n(&family[j].values).norm();
            let expect = if i == j { 1.0 } else { 0.0 };
            if (g - expect).abs() > worst {
                worst = (g - expect).abs();
                worst_pair = (i, j);
            }
        }
    }
    println!(
        "||Gram - I||_max = {worst:.4e} at {} x {}",
        labels[worst_pair.0], labels[worst_pair.1]
    );

    println!("\nSelberg bound sum_i |[phi,g_i]|^2 / sum_j |[g_i,g_j]| <= [phi,phi]:");
    for seed in 0..5u64 {
        let phi = generate_sequence(&SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n,
            seed: 11 + seed,
        })?;
        let rep = bessel_bound(&phi, &family);
        println!(
            "  seed {seed}: lhs = {:.6e}, [phi,phi] = {:.6e}, slack = {:.3e}",
            rep.lhs,
            rep.rhs,
            rep.rhs - rep.lhs
        );
    }
    // tight case: phi equal to one family member
    let rep = bessel_bound(&family[0].values.clone(), &family);
    println!("  phi = g_1: ratio lhs/[phi,phi] = {:.4} (near 1, the tight case)", rep.lhs / rep.rhs);
    Ok(())
}
