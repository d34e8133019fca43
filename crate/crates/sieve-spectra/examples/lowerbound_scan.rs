//! Empirical lower-bound scan: raw_form / (Q^2 ||phi||^2) against N/Q for
//! adversarial sequences, with the fitted decay exponent. Always positive
//! on the tested range.
//!
//!     cargo run --example lowerbound_scan

use sieve_spectra::localspec::{lowerbound_scan, scan_exponent_fit};
use sieve_spectra::verify::{generate_sequence, SequenceKind, SequenceSpec};

fn main() -> sieve_spectra::Result<()> {
    let n = 1000usize;
    let sequences = vec![
        (
            "random_signs".to_string(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::RandomSigns,
                n,
                seed: 301,
            })?,
        ),
        (
            "progression_1_mod_7".to_string(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::Progression {
                    residue: 1,
                    modulus: 7,
                },
                n,
                seed: 0,
            })?,
        ),
        (
            "eigen_pullback_h1".to_string(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::EigenPullback {
                    h: 1,
                    ell: 0,
                    chi_index: 0,
                    tau: 1.0,
                },
                n,
                seed: 0,
            })?,
        ),
    ];
    let q_grid: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0]
        .iter()
        .map(|f| f * n as f64)
        .collect();
    let rows = lowerbound_scan(&sequences, &q_grid);

    println!(
        "{:<22} {:>8} {:>8} {:>14}",
        "phi", "Q", "N/Q", "raw/(Q^2 |phi|^2)"
    );
    for r in &rows {
        println!(
            "{:<22} {:>8} {:>8.3} {:>14.6e}",
            r.phi_kind, r.q_scale, r.n_over_q, r.ratio
        );
    }
    for kind in ["random_signs", "progression_1_mod_7", "eigen_pullback_h1"] {
        if let Some(slope) = scan_exponent_fit(&rows, kind) {
            println!("fit log(ratio) ~ slope * N/Q for {kind}: slope = {slope:.4}");
        }
    }
    Ok(())
}
