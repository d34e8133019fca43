//! The precise-identity evaluator: the smoothed form against
//! I_0 ||phi||^2 minus the small-modulus Fourier corrections, with the
//! residual shrinking as the modulus cutoff H doubles. Also the windowed
//! progression remainder functional.
//!
//!     cargo run --example precise_identity

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::build_weight;
use sieve_spectra::lsq::{precise_rhs, smoothed_form, vic_remainder, ComplexSequence};
use sieve_spectra::verify::{generate_sequence, SequenceKind, SequenceSpec};

fn main() -> sieve_spectra::Result<()> {
    let cache = build_arith_cache(1 << 16);
    let kernel = build_weight(5)?;
    let n = 300usize;
    let q = 150.0;
    let phi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomComplex,
        n,
        seed: 17,
    })?;
    let lhs = smoothed_form(&phi, &kernel, q) / q;
    println!("N = {n}, Q = {q}, tau = N/Q = {}", n as f64 / q);
    println!("farey route: {lhs:.8}");
    println!("{:>4} {:>16} {:>12}", "H", "identity rhs", "residual");
    let mut ladder = Vec::new();
    for h in [1.0, 2.0, 4.0, 8.0] {
        let rhs = precise_rhs(&phi, &kernel, &cache, q, h, Some(40.0), 1e-7)?;
        let residual = (lhs - rhs).abs() / phi.norm_sq();
        println!("{h:>4} {rhs:>16.8} {residual:>12.3e}");
        ladder.push((h, residual));
    }
    println!("\nresidual ladder as CSV:");
    println!("N,Q,H,residual");
    for (h, residual) in &ladder {
        println!("{n},{q},{h},{residual}");
    }

    println!("\nwindowed-progression remainder functional:");
    let alt: Vec<f64> = (1..=64).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let alt = ComplexSequence::from_real(&alt);
    println!(
        "  alternating +-1 (concentrates mod 2): {:.4}",
        vic_remainder(&alt, 2.0, 10.0)
    );
    let rnd = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomSigns,
        n: 64,
        seed: 23,
    })?;
    println!(
        "  random signs (no concentration):      {:.4}",
        vic_remainder(&rnd, 2.0, 10.0)
    );
    Ok(())
}
