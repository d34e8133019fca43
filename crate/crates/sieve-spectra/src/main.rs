//! Thin command-line front end. All mathematics lives in the library; this
//! binary parses flags, resolves the optional key=value config file, runs
//! the requested computation and writes CSV or JSON.

use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use sieve_spectra::arith::build_arith_cache;
use sieve_spectra::kernel::build_weight;
use sieve_spectra::localspec::{lowerbound_scan, nystrom_spectrum};
use sieve_spectra::lsq::ComplexSequence;
use sieve_spectra::transform::{w_hat_star, w_star_series, TransformConfig};
use sieve_spectra::verify::{
    generate_sequence, run_suite, SequenceKind, SequenceSpec, VerifyConfig, SUITES,
};

/// Desk-scale laboratory for smoothed large-sieve identities.
///
/// Short flags mirror the usual parameter letters (-Q, -N, -H, -C, -E, -U,
/// -m, -M, -L) for direct cross-reading with the write-up.
#[derive(Parser)]
#[command(name = "sieve-spectra", version, about)]
struct Cli {
    /// Flat key=value config file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dump (t, W(m;t)) on a grid over [1, 2].
    KernelTable(KernelTableArgs),
    /// Dump (z, W*(m;z), err_bound) and optionally (u, hat W*(m;u)).
    TransformTable(TransformTableArgs),
    /// Dump the Nyström eigenvalues (ell, lambda, lambda*sqrt(ell), lambda*ell, trace_partial).
    Spectrum(SpectrumArgs),
    /// Run one or all verification suites; exit code 0 iff every check passes.
    Verify(VerifyArgs),
    /// Tabulate raw_form / (Q^2 ||phi||^2) against N/Q for adversarial sequences.
    LowerboundScan(LowerboundScanArgs),
}

#[derive(Args)]
struct KernelTableArgs {
    /// Kernel order m (>= 5).
    #[arg(short = 'm', long = "kernel-order")]
    m: Option<usize>,
    /// Number of grid rows.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Output path (stdout when absent).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TransformTableArgs {
    #[arg(short = 'm', long = "kernel-order")]
    m: Option<usize>,
    #[arg(long = "z-min")]
    z_min: Option<f64>,
    #[arg(long = "z-max")]
    z_max: Option<f64>,
    /// Number of z rows.
    #[arg(long)]
    points: Option<usize>,
    /// Geometric z grid instead of linear (resolves the small-z panel).
    #[arg(long)]
    log: bool,
    /// Per-point series tolerance.
    #[arg(long = "tol")]
    tol: Option<f64>,
    /// Output for the (z, W_star, err_bound) table (stdout when absent).
    #[arg(short = 'o', long = "wstar-out")]
    wstar_out: Option<PathBuf>,
    /// Also dump (u, W_hat_star) rows on [0, u-max] to this path.
    #[arg(long = "hat-out")]
    hat_out: Option<PathBuf>,
    /// Fourier cutoff -U for the hat table.
    #[arg(short = 'U', long = "fourier-cut")]
    u_max: Option<f64>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(short = 'm', long = "kernel-order")]
    m: Option<usize>,
    /// tau/h, the single parameter of the difference operator.
    #[arg(long = "tau-over-h")]
    tau_over_h: Option<f64>,
    /// Nyström grid size M.
    #[arg(short = 'M', long = "grid")]
    grid: Option<usize>,
    /// Number of rows L (all M eigenvalues when absent).
    #[arg(short = 'L', long = "eig-count")]
    eig_count: Option<usize>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of transforms, delta, precise, spectrum, global, primes, all.
    #[arg(long)]
    suite: Option<String>,
    /// Wall-clock budget like `600s`; checked between suites.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short = 'm', long = "kernel-order")]
    m: Option<usize>,
    #[arg(short = 'M', long = "grid")]
    grid: Option<usize>,
    #[arg(short = 'L', long = "eig-count")]
    eig_count: Option<usize>,
    /// json (default) or csv.
    #[arg(long)]
    format: Option<String>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LowerboundScanArgs {
    /// Sequence length N.
    #[arg(short = 'N', long = "seq-len")]
    n: Option<usize>,
    /// Comma-separated Q/N multipliers.
    #[arg(short = 'Q', long = "q-over-n")]
    q_over_n: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

/// Flat key=value file, '#' comments allowed.
fn read_config(path: &Option<PathBuf>) -> Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| format!("config {p:?}: {e}"))?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    map.insert(k.trim().to_string(), v.trim().to_string());
                }
                None => return Err(format!("config line without '=': {line}")),
            }
        }
    }
    Ok(map)
}

fn resolve<T: FromStr + Copy>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
    default: T,
) -> T {
    flag.or_else(|| cfg.get(key).and_then(|s| s.parse().ok()))
        .unwrap_or(default)
}

/// Writer to the output path, or stdout.
fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => Ok(Box::new(
            std::fs::File::create(p).map_err(|e| format!("{p:?}: {e}"))?,
        )),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let cfg_file = read_config(&cli.config)?;
    match cli.cmd {
        Cmd::KernelTable(a) => kernel_table(a, &cfg_file),
        Cmd::TransformTable(a) => transform_table(a, &cfg_file),
        Cmd::Spectrum(a) => spectrum_table(a, &cfg_file),
        Cmd::Verify(a) => verify(a, &cfg_file),
        Cmd::LowerboundScan(a) => lowerbound(a, &cfg_file),
    }
}

fn kernel_table(a: KernelTableArgs, cfg: &HashMap<String, String>) -> Result<ExitCode, String> {
    let m = resolve(a.m, cfg, "kernel-order", 5);
    let points = resolve(a.points, cfg, "points", 512);
    let t_min = resolve(a.t_min, cfg, "t-min", 1.0);
    let t_max = resolve(a.t_max, cfg, "t-max", 2.0);
    let kernel = build_weight(m).map_err(|e| e.to_string())?;
    let mut out = open_out(&a.output)?;
    let mut emit = || -> std::io::Result<()> {
        writeln!(out, "t,W")?;
        for i in 0..points {
            let t = if points == 1 {
                t_min
            } else {
                t_min + (t_max - t_min) * i as f64 / (points - 1) as f64
            };
            writeln!(out, "{},{}", t, kernel.eval(t))?;
        }
        Ok(())
    };
    emit().map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn transform_table(
    a: TransformTableArgs,
    cfg: &HashMap<String, String>,
) -> Result<ExitCode, String> {
    let m = resolve(a.m, cfg, "kernel-order", 5);
    let z_min = resolve(a.z_min, cfg, "z-min", 1e-4);
    let z_max = resolve(a.z_max, cfg, "z-max", 3.0);
    let points = resolve(a.points, cfg, "points", 1024);
    let tol = resolve(a.tol, cfg, "tol", 1e-6);
    let u_max = resolve(a.u_max, cfg, "fourier-cut", 3.0);

    let kernel = build_weight(m).map_err(|e| e.to_string())?;
    let cache = Arc::new(build_arith_cache(1 << 23));
    let mut tcfg = TransformConfig::new(Arc::clone(&cache));
    tcfg.quad_tol = tol;

    let mut out = open_out(&a.wstar_out)?;
    writeln!(out, "z,W_star,err_bound").map_err(|e| e.to_string())?;
    for i in 0..points {
        let frac = if points == 1 {
            0.0
        } else {
            i as f64 / (points - 1) as f64
        };
        let z = if a.log {
            z_min * (z_max / z_min).powf(frac)
        } else {
            z_min + (z_max - z_min) * frac
        };
        let eval = w_star_series(&kernel, &tcfg, z).map_err(|e| e.to_string())?;
        writeln!(out, "{},{},{}", z, eval.value, eval.err_bound).map_err(|e| e.to_string())?;
    }
    drop(out);

    if let Some(hat_path) = &a.hat_out {
        let mut out = open_out(&Some(hat_path.clone()))?;
        writeln!(out, "u,W_hat_star").map_err(|e| e.to_string())?;
        for i in 0..points {
            let u = if points == 1 {
                0.0
            } else {
                u_max * i as f64 / (points - 1) as f64
            };
            let v = w_hat_star(&kernel, &cache, u).map_err(|e| e.to_string())?;
            writeln!(out, "{},{}", u, v).map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn spectrum_table(a: SpectrumArgs, cfg: &HashMap<String, String>) -> Result<ExitCode, String> {
    let m = resolve(a.m, cfg, "kernel-order", 5);
    let toh = resolve(a.tau_over_h, cfg, "tau-over-h", 1.0);
    let grid = resolve(a.grid, cfg, "grid", 400);
    let rows = resolve(a.eig_count, cfg, "eig-count", grid).min(grid);

    let kernel = build_weight(m).map_err(|e| e.to_string())?;
    let cache = Arc::new(build_arith_cache(1 << 23));
    let mut tcfg = TransformConfig::new(cache);
    tcfg.quad_tol = 1e-7;
    // tau/h is the only parameter of the operator; pass it as tau with h = 1
    let spec = nystrom_spectrum(&kernel, &tcfg, toh, 1, grid, 0).map_err(|e| e.to_string())?;

    let mut out = open_out(&a.output)?;
    writeln!(out, "ell,lambda,lambda_sqrt_ell,lambda_ell,trace_partial")
        .map_err(|e| e.to_string())?;
    let mut partial = 0.0;
    for (i, &lam) in spec.eigenvalues().iter().enumerate().take(rows) {
        let ell = (i + 1) as f64;
        partial += lam;
        writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            lam,
            lam * ell.sqrt(),
            lam * ell,
            partial
        )
        .map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs, cfg: &HashMap<String, String>) -> Result<ExitCode, String> {
    let suite = a
        .suite
        .or_else(|| cfg.get("suite").cloned())
        .unwrap_or_else(|| "all".to_string());
    let mut vc = VerifyConfig::default();
    vc.seed = resolve(a.seed, cfg, "seed", vc.seed);
    vc.m = resolve(a.m, cfg, "kernel-order", vc.m);
    vc.grid = resolve(a.grid, cfg, "grid", vc.grid);
    vc.eig_count = resolve(a.eig_count, cfg, "eig-count", vc.eig_count);
    let format = a
        .format
        .or_else(|| cfg.get("format").cloned())
        .unwrap_or_else(|| "json".to_string());

    let budget = match a.budget.or_else(|| cfg.get("budget").cloned()) {
        Some(text) => {
            let secs: f64 = text
                .trim_end_matches('s')
                .parse()
                .map_err(|e| format!("budget `{text}`: {e}"))?;
            Some(std::time::Duration::from_secs_f64(secs))
        }
        None => None,
    };

    let suites: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else {
        if !SUITES.contains(&suite.as_str()) {
            return Err(format!(
                "unknown suite `{suite}`; expected one of {SUITES:?} or `all`"
            ));
        }
        vec![SUITES[SUITES.iter().position(|s| *s == suite).unwrap()]]
    };

    let started = std::time::Instant::now();
    let mut reports = Vec::new();
    for s in suites {
        if let Some(b) = budget {
            if started.elapsed() > b {
                return Err(format!(
                    "time budget {b:?} exhausted before suite {s} (elapsed {:?})",
                    started.elapsed()
                ));
            }
        }
        eprintln!("running suite {s} ...");
        let t0 = std::time::Instant::now();
        let mut r = run_suite(s, &vc).map_err(|e| e.to_string())?;
        for rep in &r {
            eprintln!("  {}", rep.one_line());
        }
        eprintln!("  ({s}: {:.1}s)", t0.elapsed().as_secs_f64());
        reports.append(&mut r);
    }
    let all_pass = reports.iter().all(|r| r.pass);

    let mut out = open_out(&a.output)?;
    match format.as_str() {
        "json" => {
            let text = serde_json::to_string_pretty(&reports).map_err(|e| e.to_string())?;
            writeln!(out, "{text}").map_err(|e| e.to_string())?;
        }
        "csv" => {
            writeln!(out, "check_id,lhs,rhs,residual,tolerance,pass").map_err(|e| e.to_string())?;
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.check_id, r.lhs, r.rhs, r.residual, r.tolerance, r.pass
                )
                .map_err(|e| e.to_string())?;
            }
        }
        other => return Err(format!("unknown format `{other}`")),
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn lowerbound(a: LowerboundScanArgs, cfg: &HashMap<String, String>) -> Result<ExitCode, String> {
    let n = resolve(a.n, cfg, "seq-len", 1000);
    let seed = resolve(a.seed, cfg, "seed", 1);
    let multipliers: Vec<f64> = a
        .q_over_n
        .or_else(|| cfg.get("q-over-n").cloned())
        .unwrap_or_else(|| "0.5,1,2,5,10,20".to_string())
        .split(',')
        .map(|s| s.trim().parse().map_err(|e| format!("q-over-n: {e}")))
        .collect::<Result<_, _>>()?;

    let mut sequences: Vec<(String, ComplexSequence)> = vec![
        (
            "random_signs".into(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::RandomSigns,
                n,
                seed,
            })
            .map_err(|e| e.to_string())?,
        ),
        (
            "progression_1_mod_7".into(),
            generate_sequence(&SequenceSpec {
                kind: SequenceKind::Progression {
                    residue: 1,
                    modulus: 7,
                },
                n,
                seed: 0,
            })
            .map_err(|e| e.to_string())?,
        ),
    ];
    sequences.push((
        "eigen_pullback_h1".into(),
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
        .map_err(|e| e.to_string())?,
    ));

    let q_grid: Vec<f64> = multipliers.iter().map(|f| f * n as f64).collect();
    let rows = lowerbound_scan(&sequences, &q_grid);
    let mut out = open_out(&a.output)?;
    writeln!(out, "phi_kind,N,Q,N_over_Q,ratio").map_err(|e| e.to_string())?;
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.phi_kind, r.n, r.q_scale, r.n_over_q, r.ratio
        )
        .map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}
