//! The local spaces Z/h x [0,1]: the step-function embedding, its adjoint,
//! the Ramanujan projector, and the exact chi-sum = a-sum identity.
//!
//!     cargo run --example embeddings

use sieve_spectra::arith::character_table;
use sieve_spectra::localspec::{
    chi_vs_a_sum, gamma_adjoint, gamma_embed, n_prime, project_pure,
};
use sieve_spectra::verify::{generate_sequence, SequenceKind, SequenceSpec, XorShift64Star};

fn main() -> sieve_spectra::Result<()> {
    let n = 400usize;
    let np = n_prime(n);
    let phi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomComplex,
        n,
        seed: 3,
    })?;
    let psi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomComplex,
        n,
        seed: 4,
    })?;

    println!("N = {n}, N' = {np}, grid M = N' (resolves the step windows exactly)");
    for h in [1usize, 3, 4] {
        let fp = gamma_embed(&phi, h, np)?;
        let fq = gamma_embed(&psi, h, np)?;
        let lhs = phi.scalar_n(&psi) * (n as f64 / np as f64);
        let rhs = fp.inner(&fq);
        println!(
            "h = {h}: (N/N')[phi,psi]_N = {:+.10}{:+.10}i   <Gphi,Gpsi> = {:+.10}{:+.10}i",
            lhs.re, lhs.im, rhs.re, rhs.im
        );
        let back = gamma_adjoint(&fp, n)?;
        let mut worst = 0.0f64;
        for idx in 1..=n {
            worst = worst.max((back.get(idx) - phi.get(idx) * (n as f64 / np as f64)).norm());
        }
        println!("     G*G phi vs (N/N') phi: max deviation {worst:.2e}");
        let pure = project_pure(&fp);
        let twice = project_pure(&pure);
        let mut worst = 0.0f64;
        for b in 0..h {
            for j in 0..np {
                worst = worst.max((pure.at(b, j) - twice.at(b, j)).norm());
            }
        }
        println!(
            "     projector: ||Pure||^2/||Gamma||^2 = {:.6}, idempotence defect {worst:.2e}",
            pure.norm_sq() / fp.norm_sq()
        );
    }

    println!("\nchi-sum = a-sum (exact by character orthogonality):");
    for h in [2usize, 6, 12] {
        let table = character_table(h)?;
        let mut rng = XorShift64Star::new(33);
        let weights: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        let (chi_s, a_s) = chi_vs_a_sum(&phi, &table, &weights);
        println!("  h = {h:2}: chi-sum = {chi_s:.8}, a-sum = {a_s:.8}, diff = {:.2e}", (chi_s - a_s).abs());
    }
    Ok(())
}
