//! Acceptance suite: every exit criterion, one pass/fail line each, at the
//! pinned tolerances. Criteria 5d and 5e-(tau/h=4) are known red at the
//! default grid; their assertions state the claims verbatim and the failure
//! messages carry the numeric witness (see the check notes for the
//! analysis).

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use sieve_spectra::arith::{build_arith_cache, character_table, ArithCache};
use sieve_spectra::kernel::{build_weight, conv_power, i0, WeightKernel};
use sieve_spectra::localspec::{
    chi_vs_a_sum, gamma_adjoint, gamma_embed, lowerbound_scan, mercer_check, n_prime,
    nystrom_spectrum, project_pure, pullback, Spectrum,
};
use sieve_spectra::lsq::{
    delta_bilinear, delta_decomposition, delta_symbol, precise_rhs, prime_support_check,
    smoothed_form, SieveParams,
};
use sieve_spectra::transform::{w_hat_star, TransformConfig};
use sieve_spectra::verify::{generate_sequence, t2_rhs, SequenceKind, SequenceSpec, XorShift64Star};

fn report(criterion: &str, pass: bool, detail: &str, started: Instant) {
    println!(
        "ACCEPTANCE {:<42} {}  ({:.2}s)  {}",
        criterion,
        if pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        detail
    );
}

struct SpectrumLab {
    kernel: WeightKernel,
    cfg: TransformConfig,
    cache: Arc<ArithCache>,
    /// Spectra at tau/h in {1/4, 1, 4}, M = 400, all eigenpairs.
    spectra: Vec<(f64, Spectrum)>,
}

fn spectrum_lab() -> &'static SpectrumLab {
    static LAB: OnceLock<SpectrumLab> = OnceLock::new();
    LAB.get_or_init(|| {
        let cache = Arc::new(build_arith_cache(1 << 23));
        let kernel = build_weight(5).unwrap();
        let mut cfg = TransformConfig::new(Arc::clone(&cache));
        cfg.quad_tol = 1e-7;
        let spectra = [0.25, 1.0, 4.0]
            .iter()
            .map(|&toh| {
                (
                    toh,
                    nystrom_spectrum(&kernel, &cfg, toh, 1, 400, 400).unwrap(),
                )
            })
            .collect();
        SpectrumLab {
            kernel,
            cfg,
            cache,
            spectra,
        }
    })
}

#[test]
fn acceptance_01_closed_form_kernels() {
    let t0 = Instant::now();
    let mut rng = XorShift64Star::new(0xC0FFEE);
    let c2 = conv_power(2).unwrap();
    let c3 = conv_power(3).unwrap();
    let c5 = conv_power(5).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t = 2.0 * (2.0 * rng.next_f64() - 1.0);
        worst = worst.max((c2.eval(t) - (2.0 - t.abs())).abs());
    }
    for _ in 0..100 {
        let t = 3.0 * (2.0 * rng.next_f64() - 1.0);
        let a = t.abs();
        let expect = if a <= 1.0 {
            3.0 - t * t
        } else {
            (3.0 - a) * (3.0 - a) / 2.0
        };
        worst = worst.max((c3.eval(t) - expect).abs());
    }
    for _ in 0..100 {
        let t = 5.0 * (2.0 * rng.next_f64() - 1.0);
        let a = t.abs();
        let expect = if a <= 1.0 {
            (115.0 - 30.0 * a * a + 3.0 * a.powi(4)) / 12.0
        } else if a <= 3.0 {
            (55.0 + 10.0 * a - 30.0 * a * a + 10.0 * a.powi(3) - a.powi(4)) / 6.0
        } else {
            (625.0 - 500.0 * a + 150.0 * a * a - 20.0 * a.powi(3) + a.powi(4)) / 24.0
        };
        worst = worst.max((c5.eval(t) - expect).abs());
    }
    let pass = worst < 1e-12;
    report(
        "1 closed-form convolution powers",
        pass,
        &format!("worst residual {worst:.3e} (tol 1e-12)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_02_specific_constant() {
    let t0 = Instant::now();
    let kernel = build_weight(5).unwrap();
    let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI) * kernel.integral0();
    let pass = (c - 0.816).abs() <= 1e-3;
    report(
        "2 the 0.816 constant",
        pass,
        &format!("(6/pi^2) int W(5) = {c:.6} (0.816 +- 0.001)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_03_delta_identity() {
    let t0 = Instant::now();
    let cache = build_arith_cache(4096);
    let kernel = build_weight(5).unwrap();
    let sieve = SieveParams {
        q_scale: 20.0,
        h_max: 3.0,
        moebius_cut: 4,
        divisor_cut: 4,
        fourier_cut: None,
    };
    let mut worst = 0.0f64;
    for v in -50..=50i64 {
        let pieces = delta_decomposition(&cache, &kernel, 20.0, &sieve, v).unwrap();
        worst = worst.max((pieces.total() - delta_symbol(&cache, &kernel, 20.0, v)).abs());
    }
    let pass = worst < 1e-9;
    report(
        "3 delta five-piece identity",
        pass,
        &format!("worst |Delta - sum| = {worst:.3e} over |v| <= 50 (tol 1e-9)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_04_bilinear_equivalence() {
    let t0 = Instant::now();
    let cache = build_arith_cache(4096);
    let kernel = build_weight(5).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let phi = generate_sequence(&SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n: 40,
            seed: 1 + seed,
        })
        .unwrap();
        let lhs = smoothed_form(&phi, &kernel, 25.0);
        let rhs = delta_bilinear(&cache, &kernel, 25.0, &phi);
        worst = worst.max((lhs - rhs).abs());
    }
    let pass = worst < 1e-8;
    report(
        "4 smoothed form = delta bilinear form",
        pass,
        &format!("worst residual {worst:.3e} over 20 seeds (tol 1e-8)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_05a_trace_zero() {
    let t0 = Instant::now();
    let lab = spectrum_lab();
    let worst = lab
        .spectra
        .iter()
        .map(|(_, s)| s.trace().abs())
        .fold(0.0f64, f64::max);
    let pass = worst < 1e-10;
    report(
        "5a spectrum trace zero",
        pass,
        &format!("worst |sum lambda| = {worst:.3e}"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_05b_second_moment() {
    let t0 = Instant::now();
    let lab = spectrum_lab();
    let mut worst = 0.0f64;
    for (toh, spec) in &lab.spectra {
        let rhs = t2_rhs(&lab.kernel, &lab.cfg, *toh).unwrap();
        worst = worst.max((spec.sum_sq() - rhs).abs());
    }
    let pass = worst < 1e-4;
    report(
        "5b second-moment identity",
        pass,
        &format!("worst |sum l^2 - 2 int V^2 (1-y)| = {worst:.3e} (tol 1e-4)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_05c_sqrt_ell_bound() {
    let t0 = Instant::now();
    let lab = spectrum_lab();
    let mut worst = f64::NEG_INFINITY;
    for (toh, spec) in &lab.spectra {
        let mut relaxed = lab.cfg.clone();
        relaxed.quad_tol = 1e-6;
        // dropping [0, 1e-3] only makes the bound stricter
        let int_v2 = sieve_spectra::quad::adaptive_quad(
            |y| {
                let v = sieve_spectra::transform::w_star(&lab.kernel, &relaxed, toh * y)
                    .unwrap_or(0.0);
                v * v
            },
            1e-3,
            1.0,
            1e-7,
        )
        .unwrap();
        for (l, lam) in spec.eigenvalues().iter().enumerate() {
            worst = worst.max(lam.abs() - (2.0 * int_v2).sqrt() / ((l + 1) as f64).sqrt());
        }
    }
    let pass = worst <= 0.0;
    report(
        "5c |lambda_l| <= sqrt(2 int V^2)/sqrt(l)",
        pass,
        &format!("worst excess {worst:.3e}"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_05d_mercer_remainder() {
    let t0 = Instant::now();
    let lab = spectrum_lab();
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for (toh, spec) in &lab.spectra {
        for l in [5usize, 20] {
            let rep = mercer_check(spec, l, 5e-4);
            worst = worst.max(rep.residual);
            detail.push_str(&format!("toh={toh},L={l}: rem-|l|={:.3};  ", rep.residual));
        }
    }
    let pass = worst <= 0.0;
    report(
        "5d Mercer remainder <= |lambda_{L+1}| + 5e-4",
        pass,
        &detail,
        t0,
    );
    assert!(
        pass,
        "uniform Mercer-rate bound fails on this sign-indefinite kernel: {detail}"
    );
}

#[test]
fn acceptance_05e_fourier_range() {
    let t0 = Instant::now();
    let lab = spectrum_lab();
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for (toh, spec) in &lab.spectra {
        let rep =
            sieve_spectra::localspec::fourier_eig_bounds(spec, &lab.kernel, &lab.cache, 1e-6)
                .unwrap();
        worst = worst.max(rep.residual);
        detail.push_str(&format!("toh={toh}: excess={:.3e};  ", rep.residual));
    }
    let pass = worst <= 1e-6;
    report(
        "5e eigenvalues in [min hatV, max hatV] +- 1e-6",
        pass,
        &detail,
        t0,
    );
    assert!(
        pass,
        "Nystrom aliasing at M=400 pushes lambda_max past max hatV at tau/h=4: {detail}"
    );
}

#[test]
fn acceptance_06_chi_equals_a_sum() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for h in 2..=12usize {
        let phi = generate_sequence(&SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n: 50,
            seed: 7 + h as u64,
        })
        .unwrap();
        let table = character_table(h).unwrap();
        let mut rng = XorShift64Star::new(70 + h as u64);
        let weights: Vec<f64> = (0..50).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        let (chi_s, a_s) = chi_vs_a_sum(&phi, &table, &weights);
        worst = worst.max((chi_s - a_s).abs());
    }
    let pass = worst < 1e-9;
    report(
        "6 chi-sum = a-sum identity",
        pass,
        &format!("worst residual {worst:.3e} over h = 2..12 (tol 1e-9)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_07_embedding_contracts() {
    let t0 = Instant::now();
    let n = 400usize;
    let np = n_prime(n);
    let phi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomComplex,
        n,
        seed: 41,
    })
    .unwrap();
    let psi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::RandomComplex,
        n,
        seed: 42,
    })
    .unwrap();
    let mut worst_pair = 0.0f64;
    let mut worst_proj = 0.0f64;
    for h in [1usize, 3, 4, 5] {
        let fp = gamma_embed(&phi, h, np).unwrap();
        let fq = gamma_embed(&psi, h, np).unwrap();
        let lhs = phi.scalar_n(&psi) * (n as f64 / np as f64);
        worst_pair = worst_pair.max((lhs - fp.inner(&fq)).norm());
        let back = gamma_adjoint(&fp, n).unwrap();
        for idx in 1..=n {
            worst_pair =
                worst_pair.max((back.get(idx) - phi.get(idx) * (n as f64 / np as f64)).norm());
        }
        let pure = project_pure(&fp);
        let twice = project_pure(&pure);
        for b in 0..h {
            for j in 0..np {
                worst_proj = worst_proj.max((pure.at(b, j) - twice.at(b, j)).norm());
            }
        }
    }
    let pass = worst_pair < 1e-9 && worst_proj < 1e-11;
    report(
        "7 embedding contracts",
        pass,
        &format!("product/adjoint residual {worst_pair:.3e} (1e-9), idempotence {worst_proj:.3e} (1e-11)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_08_pullback_gram() {
    let t0 = Instant::now();
    let lab = spectrum_lab();
    let n = 20_000usize;
    let mut family = Vec::new();
    for h in 1..=4usize {
        let spec = nystrom_spectrum(&lab.kernel, &lab.cfg, 1.0, h, 400, 3).unwrap();
        let table = character_table(h).unwrap();
        for chi in 0..table.count() {
            for ell in 0..3 {
                family.push(pullback(&spec, &table, n, ell, chi));
            }
        }
    }
    let k = family.len();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..=i {
            let g = family[i].values.scalar_n(&family[j].values).norm();
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - expect).abs());
        }
    }
    let pass = worst <= 0.05;
    report(
        "8 pullback family near-orthonormal",
        pass,
        &format!("||Gram - I||_max = {worst:.4e} over {k} vectors (tol 0.05)"),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_09_asymptotic_ladders() {
    let t0 = Instant::now();
    let cache = build_arith_cache(1 << 16);
    let kernel = build_weight(5).unwrap();

    // (a) easyy ratio ladder, mean over 10 seeds, strictly decreasing.
    let n = 32usize;
    let ratios: Vec<f64> = (5..=9)
        .map(|k| {
            let q = (1usize << k) as f64 * n as f64;
            let mut acc = 0.0;
            for seed in 0..10u64 {
                let phi = generate_sequence(&SequenceSpec {
                    kind: SequenceKind::RandomComplex,
                    n,
                    seed: 101 + seed,
                })
                .unwrap();
                let s = smoothed_form(&phi, &kernel, q) / q;
                acc += (s / (i0(&kernel, &cache, q).unwrap() * phi.norm_sq()) - 1.0).abs();
            }
            acc / 10.0
        })
        .collect();
    let pass_a = ratios.windows(2).all(|w| w[1] < w[0]);

    // (b) precise-identity residual decreasing as H doubles.
    let n = 300usize;
    let q = 150.0;
    let seeds = 20u64;
    let mut mean = [0.0f64; 4];
    for seed in 0..seeds {
        let phi = generate_sequence(&SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n,
            seed: 201 + seed,
        })
        .unwrap();
        let lhs = smoothed_form(&phi, &kernel, q) / q;
        for (i, h) in [1.0, 2.0, 4.0, 8.0].iter().enumerate() {
            let rhs = precise_rhs(&phi, &kernel, &cache, q, *h, Some(40.0), 1e-7).unwrap();
            mean[i] += (lhs - rhs).abs() / phi.norm_sq() / seeds as f64;
        }
    }
    let pass_b = mean.windows(2).all(|w| w[1] < w[0]);

    // (c) lower-bound scan strictly positive on Q in [N/2, 20N].
    let n = 1000usize;
    let sequences = vec![
        (
            "random_signs".to_string(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::RandomSigns,
                n,
                seed: 301,
            })
            .unwrap(),
        ),
        (
            "progression".to_string(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::Progression {
                    residue: 1,
                    modulus: 7,
                },
                n,
                seed: 0,
            })
            .unwrap(),
        ),
        (
            "eigen_pullback".to_string(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::EigenPullback {
                    h: 1,
                    ell: 0,
                    chi_index: 0,
                    tau: 1.0,
                },
                n,
                seed: 0,
            })
            .unwrap(),
        ),
    ];
    let q_grid: Vec<f64> = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0]
        .iter()
        .map(|f| f * n as f64)
        .collect();
    let rows = lowerbound_scan(&sequences, &q_grid);
    let pass_c = !rows.is_empty() && rows.iter().all(|r| r.ratio > 0.0);

    let pass = pass_a && pass_b && pass_c;
    report(
        "9 asymptotic ladders",
        pass,
        &format!(
            "easyy monotone: {pass_a} {ratios:?}; precise H-ladder: {pass_b} {mean:?}; scan positive: {pass_c}"
        ),
        t0,
    );
    assert!(pass);
}

#[test]
fn acceptance_10_prime_support_inequality() {
    let t0 = Instant::now();
    let n = 10_000usize;
    let phi = generate_sequence(&SequenceSpec {
        kind: SequenceKind::PrimeIndicator,
        n,
        seed: 0,
    })
    .unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for q0 in [10usize, 50, 100] {
        let rep = prime_support_check(&phi, q0).unwrap();
        pass &= rep.pass;
        detail.push_str(&format!(
            "Q0={q0}: lhs={:.1} rhs={:.1};  ",
            rep.lhs, rep.rhs
        ));
    }
    report("10 restricted-support inequality", pass, &detail, t0);
    assert!(pass);
}

#[test]
fn acceptance_hat_w_plateau_figure_remark() {
    // companion check surfaced by the transform tables: hat W*(1) equals
    // the plateau value exactly (the n-window at u = 1 hits only the
    // vanishing kernel endpoints)
    let t0 = Instant::now();
    let kernel = build_weight(5).unwrap();
    let cache = build_arith_cache(64);
    let a = w_hat_star(&kernel, &cache, 1.0).unwrap();
    let b = w_hat_star(&kernel, &cache, 0.0).unwrap();
    let pass = (a - b).abs() < 1e-14;
    report(
        "x hat W*(1) = hat W*(0)",
        pass,
        &format!("difference {:.2e}", (a - b).abs()),
        t0,
    );
    assert!(pass);
}
