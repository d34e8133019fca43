//! Local spaces Z/h x [0, 1] on a midpoint grid, the step-function embedding
//! and its adjoint, the Ramanujan projector, the difference operators with
//! their Nyström spectra, pull-backs of eigenfunctions to sequences, and the
//! spectral-decomposition identity harness.
//!
//! Grid conventions: y_j = (j + 1/2)/M, j = 0..M-1, inner product
//! (1/h) sum_b (1/M) sum_j. The embedding steps sit at multiples of h/N';
//! a grid with M a multiple of N' resolves them exactly, which turns the
//! product-preservation and adjoint identities into machine-precision
//! statements.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::arith::{gauss_sum, ramanujan_sum, ArithCache, CharacterTable};
use crate::error::{Error, Result};
use crate::kernel::{i0, WeightKernel};
use crate::lsq::{smoothed_form, ComplexSequence};
use crate::report::{params, CheckReport};
use crate::transform::{w_hat_star, w_hat_star_plateau, w_star, TransformConfig};
use crate::util::parallel_map_indexed;

/// N' = N + ceil(sqrt(N)), the slightly enlarged length behind the
/// embedding. The integer rounding is our convention.
pub fn n_prime(n: usize) -> usize {
    n + (n as f64).sqrt().ceil() as usize
}

/// sigma_h(z): the representative of z mod h inside {1, ..., h}.
fn sigma(z: usize, h: usize) -> usize {
    let r = z % h;
    if r == 0 {
        h
    } else {
        r
    }
}

/// A function on Z/h x [0, 1] sampled at the midpoint nodes.
#[derive(Debug, Clone)]
pub struct GridFunction {
    h: usize,
    grid: usize,
    /// Row-major: values[b * grid + j] ~ F(b, y_j), b = class index 0..h-1.
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(h: usize, grid: usize) -> Self {
        GridFunction {
            h,
            grid,
            values: vec![Complex64::new(0.0, 0.0); h * grid],
        }
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn at(&self, b: usize, j: usize) -> Complex64 {
        self.values[b * self.grid + j]
    }

    pub fn at_mut(&mut self, b: usize, j: usize) -> &mut Complex64 {
        &mut self.values[b * self.grid + j]
    }

    /// <F, G> with the probability measure on both factors.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        assert_eq!(self.h, other.h);
        assert_eq!(self.grid, other.grid);
        let mut s = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(&other.values) {
            s += a * b.conj();
        }
        s / (self.h * self.grid) as f64
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / (self.h * self.grid) as f64
    }
}

/// Step-function embedding Gamma_{N,h}: (b, y) -> phi_{sigma(b) + h [N' y / h]}.
pub fn gamma_embed(phi: &ComplexSequence, h: usize, grid: usize) -> Result<GridFunction> {
    let n = phi.n();
    let np = n_prime(n);
    if h == 0 || h > np - n {
        return Err(Error::Parameter(format!(
            "gamma_embed needs 1 <= h <= N' - N = {}",
            np - n
        )));
    }
    let mut f = GridFunction::zeros(h, grid);
    for b in 0..h {
        let rep = sigma(b + 1, h); // class index b holds residue b+1 reduced into 1..h
        for j in 0..grid {
            let y = (j as f64 + 0.5) / grid as f64;
            let idx = rep + h * ((np as f64 * y / h as f64).floor() as usize);
            *f.at_mut(b, j) = phi.get(idx);
        }
    }
    Ok(f)
}

/// Class index of the sequence position n inside a [`GridFunction`] built by
/// [`gamma_embed`]: row b holds the residue class of sigma(b+1).
fn class_index(n: usize, h: usize) -> usize {
    sigma(n, h) - 1
}

/// Adjoint of the embedding: Gamma*(F)(n) = (N/h) int over the n-th window
/// of F(sigma_h(n), y) dy. Needs the grid to resolve the windows, i.e.
/// M a multiple of N'.
pub fn gamma_adjoint(f: &GridFunction, n: usize) -> Result<ComplexSequence> {
    let np = n_prime(n);
    let grid = f.grid();
    if !grid.is_multiple_of(np) {
        return Err(Error::GridResolution(format!(
            "grid {grid} is not a multiple of N' = {np}"
        )));
    }
    let cells_per_unit = grid / np;
    let h = f.h();
    let mut out = Vec::with_capacity(n);
    for idx in 1..=n {
        let rep = sigma(idx, h);
        let b = class_index(idx, h);
        // window [ (idx - rep)/N', (idx - rep + h)/N' ) as whole grid cells
        let j0 = (idx - rep) * cells_per_unit;
        let j1 = j0 + h * cells_per_unit;
        let mut s = Complex64::new(0.0, 0.0);
        for j in j0..j1 {
            s += f.at(b, j);
        }
        s *= n as f64 / (h as f64 * grid as f64);
        out.push(s);
    }
    Ok(ComplexSequence::new(out))
}

/// Ramanujan projector U: F(b, y) -> (1/h) sum_c c_h(b - c) F(c, y).
/// Orthogonal projection onto the reduced-spectrum subspace; idempotent and
/// commuting with any operator acting on the y-variable only.
pub fn project_pure(f: &GridFunction) -> GridFunction {
    let h = f.h();
    let grid = f.grid();
    let cvals: Vec<f64> = (0..h).map(|k| ramanujan_sum(h as u64, k as i64)).collect();
    let mut out = GridFunction::zeros(h, grid);
    for b in 0..h {
        for c in 0..h {
            let w = cvals[(b + h - c) % h] / h as f64;
            if w == 0.0 {
                continue;
            }
            for j in 0..grid {
                *out.at_mut(b, j) += f.at(c, j) * w;
            }
        }
    }
    out
}

/// Pure embedding: the projector applied to the step embedding.
pub fn pure_embed(phi: &ComplexSequence, h: usize, grid: usize) -> Result<GridFunction> {
    Ok(project_pure(&gamma_embed(phi, h, grid)?))
}

/// Difference-operator spectrum on the midpoint grid.
///
/// The kernel samples v_k = V(k/M) with V(y) = W*(tau y / h) define the
/// symmetric Nyström matrix A_ij = v_|i-j| / M; its eigenvalues approximate
/// the operator spectrum. The diagonal is V(0) = W*(0) = 0, so the matrix
/// trace vanishes exactly.
#[derive(Debug, Clone)]
pub struct Spectrum {
    tau_over_h: f64,
    grid: usize,
    /// All M eigenvalues, ordered by descending |lambda| (ties by solver
    /// output order).
    eigenvalues: Vec<f64>,
    /// Top-L eigenfunctions, quadrature-normalized: (1/M) sum G^2 = 1.
    eigenfunctions: Vec<Vec<f64>>,
    /// v_k = V(k/M), k = 0..M-1.
    kernel_samples: Vec<f64>,
}

impl Spectrum {
    pub fn tau_over_h(&self) -> f64 {
        self.tau_over_h
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunction(&self, ell: usize) -> &[f64] {
        &self.eigenfunctions[ell]
    }

    pub fn eigenfunction_count(&self) -> usize {
        self.eigenfunctions.len()
    }

    pub fn kernel_samples(&self) -> &[f64] {
        &self.kernel_samples
    }

    pub fn kernel_at(&self, i: usize, j: usize) -> f64 {
        self.kernel_samples[i.abs_diff(j)]
    }

    /// Exact matrix trace: sum of all eigenvalues.
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn sum_abs(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l * l).sum()
    }

    /// Linear interpolation of eigenfunction `ell` at y in [0, 1], constant
    /// beyond the first/last midpoint nodes.
    pub fn eigenfunction_at(&self, ell: usize, y: f64) -> f64 {
        let g = &self.eigenfunctions[ell];
        let m = self.grid as f64;
        let x = y * m - 0.5;
        if x <= 0.0 {
            return g[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= self.grid {
            return g[self.grid - 1];
        }
        let frac = x - i as f64;
        g[i] * (1.0 - frac) + g[i + 1] * frac
    }
}

/// Assemble and diagonalize the Nyström matrix of the difference operator
/// with kernel V(y) = W*(tau y / h). Keeps all eigenvalues and the top `l`
/// eigenfunctions by |lambda|.
pub fn nystrom_spectrum(
    kernel: &WeightKernel,
    cfg: &TransformConfig,
    tau: f64,
    h: usize,
    grid: usize,
    l: usize,
) -> Result<Spectrum> {
    if grid < 64 {
        return Err(Error::Parameter("nystrom grid must be >= 64".into()));
    }
    if l > grid {
        return Err(Error::Parameter(format!(
            "requested {l} eigenpairs from an {grid}-point grid"
        )));
    }
    let toh = tau / h as f64;
    let samples = parallel_map_indexed(grid, |k| {
        if k == 0 {
            Ok(0.0)
        } else {
            w_star(kernel, cfg, toh * k as f64 / grid as f64)
        }
    });
    let mut v = Vec::with_capacity(grid);
    for s in samples {
        v.push(s?);
    }

    let a = DMatrix::from_fn(grid, grid, |i, j| v[i.abs_diff(j)] / grid as f64);
    let eig = SymmetricEigen::new(a);

    let mut order: Vec<usize> = (0..grid).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .abs()
            .partial_cmp(&eig.eigenvalues[i].abs())
            .unwrap()
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let scale = (grid as f64).sqrt();
    let mut eigenfunctions = Vec::with_capacity(l);
    for &col in order.iter().take(l) {
        let mut g: Vec<f64> = eig.eigenvectors.column(col).iter().map(|&x| x * scale).collect();
        // sign convention: first component above tolerance is positive
        let tol = 1e-8 * g.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if let Some(first) = g.iter().find(|x| x.abs() > tol) {
            if *first < 0.0 {
                for x in g.iter_mut() {
                    *x = -*x;
                }
            }
        }
        eigenfunctions.push(g);
    }

    Ok(Spectrum {
        tau_over_h: toh,
        grid,
        eigenvalues,
        eigenfunctions,
        kernel_samples: v,
    })
}

/// Apply the grid operator with the spectrum's kernel samples to a grid
/// function, row by row: (VF)(b, y_i) = (1/M) sum_j F(b, y_j) v_|i-j|.
pub fn apply_difference_operator(spec: &Spectrum, f: &GridFunction) -> GridFunction {
    let h = f.h();
    let grid = f.grid();
    assert_eq!(grid, spec.grid);
    let mut out = GridFunction::zeros(h, grid);
    for b in 0..h {
        for i in 0..grid {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..grid {
                s += f.at(b, j) * spec.kernel_samples[i.abs_diff(j)];
            }
            *out.at_mut(b, i) = s / grid as f64;
        }
    }
    out
}

/// Mercer remainder on the grid: max_{i,j} |V(y_i - y_j) -
/// sum_{l <= L} lambda_l G_l(y_i) G_l(y_j)| <= |lambda_{L+1}| + slack.
pub fn mercer_check(spec: &Spectrum, l: usize, slack: f64) -> CheckReport {
    let grid = spec.grid;
    let mut worst = 0.0f64;
    for i in 0..grid {
        for j in 0..=i {
            let mut approx = 0.0;
            for ell in 0..l.min(spec.eigenfunction_count()) {
                approx += spec.eigenvalues[ell]
                    * spec.eigenfunctions[ell][i]
                    * spec.eigenfunctions[ell][j];
            }
            worst = worst.max((spec.kernel_at(i, j) - approx).abs());
        }
    }
    let next = if l < spec.eigenvalues.len() {
        spec.eigenvalues[l].abs()
    } else {
        0.0
    };
    CheckReport::new(
        format!("mercer_remainder_L{l}"),
        params(&[
            ("tau_over_h", format!("{}", spec.tau_over_h)),
            ("M", spec.grid.to_string()),
            ("L", l.to_string()),
        ]),
        worst,
        next,
        (worst - next).max(0.0),
        slack,
        "one-sided: remainder <= |lambda_{L+1}| + slack. Note: for this \
         sign-indefinite kernel the top-L remainder is dominated by its \
         diagonal -sum_{l<=L} lambda_l G_l(y)^2 (V(0) = 0), which exceeds \
         |lambda_{L+1}|; the expansion converges with L but not at that rate",
    )
}

/// User-supplied constants for the spectral-gap annotation: the one-sided
/// improvement `lambda_max <= M1 - c exp(-c4 U2)` is recorded in the check
/// notes, never asserted (its constants are not effective).
#[derive(Debug, Clone, Copy)]
pub struct GapForm {
    pub c: f64,
    pub c4: f64,
    pub u2: f64,
}

/// Fourier bracket for the eigenvalues: with V(y) = W*(tau y/h) the
/// transform is hat V(u) = (h/tau) hat W*(u h / tau), and every eigenvalue
/// lies in [min hat V - tol, max hat V + tol].
pub fn fourier_eig_bounds(
    spec: &Spectrum,
    kernel: &WeightKernel,
    cache: &ArithCache,
    tol: f64,
) -> Result<CheckReport> {
    fourier_eig_bounds_with_gap(spec, kernel, cache, tol, None)
}

/// Same bracket check, optionally annotating the report with the gap form
/// for user-supplied constants.
pub fn fourier_eig_bounds_with_gap(
    spec: &Spectrum,
    kernel: &WeightKernel,
    cache: &ArithCache,
    tol: f64,
    gap: Option<GapForm>,
) -> Result<CheckReport> {
    let toh = spec.tau_over_h;
    let hat_v = |u: f64| -> Result<f64> { Ok(w_hat_star(kernel, cache, u / toh)? / toh) };
    // hat W* sits on its plateau for |u| <= 1/2 and decays past it; scan the
    // active window finely and the decay range coarsely.
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    let mut scan = |u: f64| -> Result<()> {
        let v = hat_v(u)?;
        vmin = vmin.min(v);
        vmax = vmax.max(v);
        Ok(())
    };
    scan(0.0)?;
    let fine_hi = 4.0 * toh.max(1.0);
    let fine_steps = 8000;
    for i in 1..=fine_steps {
        scan(fine_hi * i as f64 / fine_steps as f64)?;
    }
    let coarse_hi = 1000.0 * toh.max(1.0);
    let coarse_steps = 4000;
    for i in 1..=coarse_steps {
        scan(fine_hi + (coarse_hi - fine_hi) * i as f64 / coarse_steps as f64)?;
    }

    let lam_max = spec.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lam_min = spec.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let excess = (lam_max - vmax).max(vmin - lam_min).max(0.0);
    // Record whether the printed form of the interval lemma,
    // [-min hatV, max hatV], also holds; the Rayleigh form is what we assert.
    let alt_holds = lam_min >= -vmin - tol && lam_max <= vmax + tol;
    let mut notes = format!(
        "Rayleigh bracket [min hatV, max hatV] = [{vmin:.6}, {vmax:.6}]; \
         lambda range [{lam_min:.6}, {lam_max:.6}]; printed bracket holds: {alt_holds}"
    );
    if let Some(g) = gap {
        // reported only: the constants are the user's, not effective ones
        let improved = vmax - g.c * (-g.c4 * g.u2).exp();
        notes.push_str(&format!(
            "; gap form with (c, c4, U2) = ({}, {}, {}): lambda_max <= {improved:.6} holds: {}",
            g.c,
            g.c4,
            g.u2,
            lam_max <= improved
        ));
    }
    Ok(CheckReport::new(
        "eigenvalues_in_fourier_range",
        params(&[
            ("tau_over_h", format!("{toh}")),
            ("M", spec.grid.to_string()),
        ]),
        lam_max,
        vmax,
        excess,
        tol,
        notes,
    ))
}

/// Pull-back of a local eigenfunction to a sequence:
/// g(n) = tau_h(chi, n)/sqrt(phi(h)) * G_l(n/N).
#[derive(Debug, Clone)]
pub struct PullbackVector {
    pub h: usize,
    pub ell: usize,
    pub chi_index: usize,
    pub tau_over_h: f64,
    pub values: ComplexSequence,
}

pub fn pullback(
    spec: &Spectrum,
    table: &CharacterTable,
    n: usize,
    ell: usize,
    chi_index: usize,
) -> PullbackVector {
    let h = table.modulus();
    let phi_h = table.count() as f64;
    let taus: Vec<Complex64> = (0..h as i64).map(|r| gauss_sum(table, chi_index, r)).collect();
    let norm = phi_h.sqrt();
    let mut vals = Vec::with_capacity(n);
    for idx in 1..=n {
        let tau = taus[idx % h];
        let g = spec.eigenfunction_at(ell, idx as f64 / n as f64);
        vals.push(tau / norm * g);
    }
    PullbackVector {
        h,
        ell,
        chi_index,
        tau_over_h: spec.tau_over_h(),
        values: ComplexSequence::new(vals),
    }
}

/// Selberg's inequality: sum_i |[f, g_i]|^2 / sum_j |[g_i, g_j]| <= [f, f].
pub fn bessel_bound(phi: &ComplexSequence, family: &[PullbackVector]) -> CheckReport {
    let k = family.len();
    let mut gram = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..=i {
            let v = family[i].values.scalar_n(&family[j].values).norm();
            gram[i * k + j] = v;
            gram[j * k + i] = v;
        }
    }
    let mut lhs = 0.0;
    for i in 0..k {
        let num = phi.scalar_n(&family[i].values).norm_sqr();
        let den: f64 = (0..k).map(|j| gram[i * k + j]).sum();
        if den > 0.0 {
            lhs += num / den;
        }
    }
    let rhs = phi.scalar_n(phi).re;
    CheckReport::new(
        "bessel_selberg",
        params(&[("family", k.to_string()), ("N", phi.n().to_string())]),
        lhs,
        rhs,
        (lhs - rhs).max(0.0),
        0.0,
        "one-sided Selberg bound: pass iff lhs <= rhs",
    )
}

/// The three routes of the spectral identity, with pairwise residuals.
#[derive(Debug, Clone)]
pub struct SpectralIdentityReport {
    /// Direct Farey route: smoothed_form / Q.
    pub lhs: f64,
    /// Operator bilinear route: I0 ||phi||^2 - N sum (tau/h) [Pure|V Pure].
    pub operator_form: f64,
    /// Truncated eigen-expansion route through the pulled-back a-sums.
    pub eigen_form: f64,
    /// |lhs - operator_form| / ||phi||^2.
    pub residual_operator: f64,
    /// |operator_form - eigen_form| / ||phi||^2.
    pub residual_eigen: f64,
}

/// Evaluate the spectral-decomposition identity three ways: the Farey sum,
/// the operator bilinear form on the grid, and the truncated eigenvalue
/// expansion via the a-sums. Residuals are reported; the caller asserts
/// only decay trends across (H, L, M) ladders.
#[allow(clippy::too_many_arguments)]
pub fn spectral_identity(
    phi: &ComplexSequence,
    kernel: &WeightKernel,
    cfg: &TransformConfig,
    cache: &ArithCache,
    q_scale: f64,
    h_max: usize,
    l: usize,
    grid: usize,
) -> Result<SpectralIdentityReport> {
    spectral_identity_with_cutoff(phi, kernel, cfg, cache, q_scale, h_max, l, grid, 0.0)
}

/// Same evaluation with a magnitude floor on the eigenvalues kept in the
/// eigen route (the xi-eta threshold knob; 0 keeps every computed pair,
/// which is the default since the threshold's constant is not effective).
#[allow(clippy::too_many_arguments)]
pub fn spectral_identity_with_cutoff(
    phi: &ComplexSequence,
    kernel: &WeightKernel,
    cfg: &TransformConfig,
    cache: &ArithCache,
    q_scale: f64,
    h_max: usize,
    l: usize,
    grid: usize,
    eig_cutoff: f64,
) -> Result<SpectralIdentityReport> {
    let n = phi.n();
    let np = n_prime(n);
    if !grid.is_multiple_of(np) {
        return Err(Error::GridResolution(format!(
            "spectral identity grid {grid} must be a multiple of N' = {np}"
        )));
    }
    let tau = n as f64 / q_scale;
    let norm_sq = phi.norm_sq();
    let i0_val = i0(kernel, cache, q_scale)?;

    let lhs = smoothed_form(phi, kernel, q_scale) / q_scale;

    let mut op_sum = 0.0;
    let mut eig_sum = 0.0;
    for h in 1..=h_max {
        let spec = nystrom_spectrum(kernel, cfg, tau, h, grid, l.min(grid))?;
        let pure = pure_embed(phi, h, grid)?;
        let v_pure = apply_difference_operator(&spec, &pure);
        let bilinear = pure.inner(&v_pure).re;
        op_sum += tau / h as f64 * bilinear;

        // eigen route through the a-sums (chi-sum = a-sum identity)
        let mut h_term = 0.0;
        for ell in 0..l.min(spec.eigenfunction_count()) {
            let lam = spec.eigenvalues[ell];
            if lam.abs() < eig_cutoff {
                continue;
            }
            let mut a_sum = 0.0;
            for a in 0..h {
                if h > 1 && (a == 0 || crate::arith::gcd(a as u64, h as u64) != 1) {
                    continue;
                }
                let mut s = Complex64::new(0.0, 0.0);
                for idx in 1..=n {
                    let g = spec.eigenfunction_at(ell, idx as f64 / n as f64);
                    s += phi.get(idx) * g * crate::arith::e(idx as f64 * a as f64 / h as f64);
                }
                a_sum += s.norm_sqr();
            }
            h_term += lam * a_sum;
        }
        eig_sum += tau / h as f64 * h_term / n as f64;
    }
    let operator_form = i0_val * norm_sq - n as f64 * op_sum;
    let eigen_form = i0_val * norm_sq - eig_sum;

    Ok(SpectralIdentityReport {
        lhs,
        operator_form,
        eigen_form,
        residual_operator: (lhs - operator_form).abs() / norm_sq.max(f64::MIN_POSITIVE),
        residual_eigen: (operator_form - eigen_form).abs() / norm_sq.max(f64::MIN_POSITIVE),
    })
}

/// One row of the lower-bound scan table.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub phi_kind: String,
    pub n: usize,
    pub q_scale: f64,
    pub n_over_q: f64,
    /// raw_form / (Q^2 ||phi||^2).
    pub ratio: f64,
}

/// Tabulate raw_form / (Q^2 ||phi||^2) against N/Q for a family of
/// adversarial sequences. Measurement, not a theorem check: the suite
/// asserts positivity and records the empirical exponent fit.
pub fn lowerbound_scan(
    sequences: &[(String, ComplexSequence)],
    q_grid: &[f64],
) -> Vec<ScanRow> {
    let mut rows = Vec::new();
    for (name, phi) in sequences {
        let norm = phi.norm_sq();
        if norm == 0.0 {
            continue; // ratio undefined for the zero sequence
        }
        for &q in q_grid {
            let ratio = crate::lsq::raw_form(phi, q) / (q * q * norm);
            rows.push(ScanRow {
                phi_kind: name.clone(),
                n: phi.n(),
                q_scale: q,
                n_over_q: phi.n() as f64 / q,
                ratio,
            });
        }
    }
    rows
}

/// Least-squares slope of log(ratio) against N/Q for one sequence kind.
pub fn scan_exponent_fit(rows: &[ScanRow], kind: &str) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.phi_kind == kind && r.ratio > 0.0)
        .map(|r| (r.n_over_q, r.ratio.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// chi-sum = a-sum identity (exact): for any weights G(n/N),
/// sum_chi |sum_n phi_n tau_h(chi,n)/sqrt(phi(h)) G(n/N)|^2
///   = sum_{a mod* h} |sum_n phi_n e(na/h) G(n/N)|^2.
pub fn chi_vs_a_sum(
    phi: &ComplexSequence,
    table: &CharacterTable,
    weights: &[f64],
) -> (f64, f64) {
    let h = table.modulus();
    let n = phi.n();
    let phi_h = table.count() as f64;
    let taus: Vec<Vec<Complex64>> = (0..table.count())
        .map(|i| (0..h as i64).map(|r| gauss_sum(table, i, r)).collect())
        .collect();
    let mut chi_sum = 0.0;
    for tau_row in &taus {
        let mut s = Complex64::new(0.0, 0.0);
        for idx in 1..=n {
            s += phi.get(idx) * tau_row[idx % h] * weights[idx - 1];
        }
        chi_sum += s.norm_sqr() / phi_h;
    }
    let mut a_sum = 0.0;
    for a in 0..h {
        if h > 1 && (a == 0 || crate::arith::gcd(a as u64, h as u64) != 1) {
            continue;
        }
        let mut s = Complex64::new(0.0, 0.0);
        for idx in 1..=n {
            s += phi.get(idx) * weights[idx - 1] * crate::arith::e(idx as f64 * a as f64 / h as f64);
        }
        a_sum += s.norm_sqr();
    }
    (chi_sum, a_sum)
}

/// V-hat plateau scale (h/tau) * plateau, the natural normalization for the
/// fourier bracket notes.
pub fn hat_v_plateau(kernel: &WeightKernel, tau_over_h: f64) -> f64 {
    w_hat_star_plateau(kernel) / tau_over_h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::character_table;
    use crate::kernel::build_weight;
    use crate::verify::{generate_sequence, SequenceKind, SequenceSpec};
    use std::sync::Arc;

    fn transform_setup() -> (WeightKernel, TransformConfig) {
        let shared = Arc::new(crate::arith::build_arith_cache(1 << 21));
        let kernel = build_weight(5).unwrap();
        let mut cfg = TransformConfig::new(shared);
        cfg.quad_tol = 1e-8;
        (kernel, cfg)
    }

    fn random_phi(n: usize, seed: u64) -> ComplexSequence {
        generate_sequence(&SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn embedding_preserves_product() {
        // (N/N') [phi, psi]_N = <Gamma phi, Gamma psi> exactly on a
        // resolving grid
        let n = 400;
        let np = n_prime(n);
        let phi = random_phi(n, 3);
        let psi = random_phi(n, 4);
        for h in [1usize, 3] {
            let fp = gamma_embed(&phi, h, np).unwrap();
            let fq = gamma_embed(&psi, h, np).unwrap();
            let lhs = phi.scalar_n(&psi) * (n as f64 / np as f64);
            let rhs = fp.inner(&fq);
            assert!((lhs - rhs).norm() < 1e-9, "h={h}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn embedding_rejects_large_h() {
        let phi = random_phi(100, 1);
        // N' - N = 10 for N = 100
        assert!(gamma_embed(&phi, 11, 110).is_err());
        assert!(gamma_embed(&phi, 10, 110).is_ok());
    }

    #[test]
    fn embedding_zero_sequence() {
        let phi = ComplexSequence::zeros(50);
        let f = gamma_embed(&phi, 2, n_prime(50)).unwrap();
        assert_eq!(f.norm_sq(), 0.0);
    }

    #[test]
    fn adjoint_roundtrip_and_pairing() {
        let n = 100;
        let np = n_prime(n); // 110
        let phi = random_phi(n, 7);
        for h in [1usize, 4] {
            let emb = gamma_embed(&phi, h, np).unwrap();
            let back = gamma_adjoint(&emb, n).unwrap();
            // Gamma* Gamma = (N/N') Id
            for idx in 1..=n {
                let expect = phi.get(idx) * (n as f64 / np as f64);
                assert!(
                    (back.get(idx) - expect).norm() < 1e-9,
                    "h={h} n={idx}"
                );
            }
            // adjointness <Gamma phi, F> = [phi, Gamma* F]_N on random F
            let mut f = GridFunction::zeros(h, np);
            let psi = random_phi(h * np, 9);
            for b in 0..h {
                for j in 0..np {
                    *f.at_mut(b, j) = psi.get(b * np + j + 1);
                }
            }
            let lhs = emb.inner(&f);
            let rhs = phi.scalar_n(&gamma_adjoint(&f, n).unwrap());
            assert!((lhs - rhs).norm() < 1e-9, "h={h}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn adjoint_needs_resolving_grid() {
        let phi = random_phi(100, 1);
        let f = gamma_embed(&phi, 2, 100).unwrap(); // 100 not a multiple of 110
        assert!(gamma_adjoint(&f, 100).is_err());
    }

    #[test]
    fn projector_idempotent_and_h1_identity() {
        let n = 60;
        let np = n_prime(n);
        let phi = random_phi(n, 5);
        let f = gamma_embed(&phi, 4, np).unwrap();
        let once = project_pure(&f);
        let twice = project_pure(&once);
        let mut worst = 0.0f64;
        for b in 0..4 {
            for j in 0..np {
                worst = worst.max((once.at(b, j) - twice.at(b, j)).norm());
            }
        }
        assert!(worst < 1e-11, "U^2 != U: {worst}");
        // h = 1: identity map
        let f1 = gamma_embed(&phi, 1, np).unwrap();
        let p1 = project_pure(&f1);
        for j in 0..np {
            assert!((f1.at(0, j) - p1.at(0, j)).norm() < 1e-12);
        }
    }

    #[test]
    fn projector_contracts_and_strictly_on_nonreduced() {
        let n = 80;
        let np = n_prime(n);
        // phi supported on even n only: mod 2 it sits on the non-reduced class
        let vals: Vec<f64> = (1..=n).map(|k| if k % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let phi = ComplexSequence::from_real(&vals);
        let f = gamma_embed(&phi, 2, np).unwrap();
        let p = project_pure(&f);
        assert!(p.norm_sq() <= f.norm_sq() + 1e-12);
        assert!(
            p.norm_sq() < f.norm_sq() * 0.9,
            "projection should strictly contract here"
        );
        // random function: contraction
        let g = gamma_embed(&random_phi(n, 8), 2, np).unwrap();
        assert!(project_pure(&g).norm_sq() <= g.norm_sq() + 1e-12);
    }

    #[test]
    fn spectrum_trace_and_orthonormality() {
        let (kernel, cfg) = transform_setup();
        let spec = nystrom_spectrum(&kernel, &cfg, 1.0, 1, 96, 12).unwrap();
        // diagonal is V(0) = 0, so the trace vanishes to rounding
        assert!(spec.trace().abs() < 1e-10, "trace {}", spec.trace());
        // quadrature-orthonormal eigenfunctions
        for a in 0..12 {
            for b in 0..=a {
                let dot: f64 = spec
                    .eigenfunction(a)
                    .iter()
                    .zip(spec.eigenfunction(b))
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    / 96.0;
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10, "gram({a},{b}) = {dot}");
            }
        }
        // sign convention: leading entry nonneg
        for a in 0..12 {
            let g = spec.eigenfunction(a);
            let tol = 1e-8 * g.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            let first = g.iter().find(|x| x.abs() > tol).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn spectrum_has_both_signs() {
        let (kernel, cfg) = transform_setup();
        let spec = nystrom_spectrum(&kernel, &cfg, 1.0, 1, 96, 4).unwrap();
        let pos = spec.eigenvalues().iter().any(|&l| l > 1e-8);
        let neg = spec.eigenvalues().iter().any(|&l| l < -1e-8);
        assert!(pos && neg, "trace-zero kernel must oscillate");
    }

    #[test]
    fn mercer_with_all_eigenpairs_is_exact() {
        let (kernel, cfg) = transform_setup();
        let spec = nystrom_spectrum(&kernel, &cfg, 1.0, 1, 64, 64).unwrap();
        let rep = mercer_check(&spec, 64, 1e-9);
        assert!(rep.pass, "full expansion should reproduce the kernel: {}", rep.lhs);
    }

    #[test]
    fn operator_apply_matches_eigen_expansion() {
        // spectral theorem on the grid: [F | V F] = sum_l lambda_l |<F, G_l>|^2
        let (kernel, cfg) = transform_setup();
        let m = 64;
        let spec = nystrom_spectrum(&kernel, &cfg, 0.8, 2, m, m).unwrap();
        let phi = random_phi(50, 2);
        let pure = pure_embed(&phi, 2, m).unwrap();
        let v_pure = apply_difference_operator(&spec, &pure);
        let bilinear = pure.inner(&v_pure).re;
        // expand in Base_chi x G_l
        let table = character_table(2).unwrap();
        let taus: Vec<Complex64> = (0..2).map(|r| gauss_sum(&table, 0, r)).collect();
        let mut expansion = 0.0;
        for ell in 0..m {
            let lam = spec.eigenvalues()[ell];
            let mut c = Complex64::new(0.0, 0.0);
            for (b, tau) in taus.iter().enumerate() {
                for j in 0..m {
                    let base = tau / (table.count() as f64).sqrt();
                    c += pure.at(b, j) * (base * spec.eigenfunction(ell)[j]).conj();
                }
            }
            c /= (2 * m) as f64;
            expansion += lam * c.norm_sqr();
        }
        assert!(
            (bilinear - expansion).abs() < 1e-10 * (1.0 + bilinear.abs()),
            "{bilinear} vs {expansion}"
        );
    }

    #[test]
    fn chi_sum_equals_a_sum() {
        // exact identity, h = 6, random phi and weights
        let phi = random_phi(40, 13);
        let table = character_table(6).unwrap();
        let weights: Vec<f64> = (0..40).map(|i| ((i as f64) * 0.37).sin()).collect();
        let (chi_s, a_s) = chi_vs_a_sum(&phi, &table, &weights);
        assert!((chi_s - a_s).abs() < 1e-9 * (1.0 + chi_s.abs()), "{chi_s} vs {a_s}");
    }

    #[test]
    fn pullback_h1_near_unit_norm() {
        let (kernel, cfg) = transform_setup();
        let spec = nystrom_spectrum(&kernel, &cfg, 1.0, 1, 128, 4).unwrap();
        let table = character_table(1).unwrap();
        let n = 20_000;
        let g = pullback(&spec, &table, n, 0, 0);
        let norm = g.values.scalar_n(&g.values).re;
        assert!((norm - 1.0).abs() < 0.01, "norm^2 = {norm}");
    }

    #[test]
    fn bessel_single_unit_vector_is_cauchy_schwarz() {
        let (kernel, cfg) = transform_setup();
        let spec = nystrom_spectrum(&kernel, &cfg, 1.0, 1, 128, 2).unwrap();
        let table = character_table(1).unwrap();
        let n = 5_000;
        let family = vec![pullback(&spec, &table, n, 0, 0)];
        for seed in 0..5 {
            let phi = random_phi(n, seed);
            let rep = bessel_bound(&phi, &family);
            assert!(rep.pass, "seed {seed}: {} > {}", rep.lhs, rep.rhs);
        }
        // tight case: phi equal to the family vector
        let rep = bessel_bound(&family[0].values, &family);
        assert!(rep.pass && rep.lhs / rep.rhs > 0.9, "ratio {}", rep.lhs / rep.rhs);
    }

    #[test]
    fn nystrom_parameter_errors() {
        let (kernel, cfg) = transform_setup();
        assert!(nystrom_spectrum(&kernel, &cfg, 1.0, 1, 32, 0).is_err());
        assert!(nystrom_spectrum(&kernel, &cfg, 1.0, 1, 64, 65).is_err());
    }

    #[test]
    fn scan_rows_positive_and_fit_defined() {
        let phi = random_phi(300, 21);
        let rows = lowerbound_scan(
            &[("random".to_string(), phi)],
            &[150.0, 300.0, 600.0],
        );
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(r.ratio > 0.0);
        }
        assert!(scan_exponent_fit(&rows, "random").is_some());
        // zero sequence is skipped by the ratio guard
        let rows = lowerbound_scan(&[("zero".to_string(), ComplexSequence::zeros(10))], &[5.0]);
        assert!(rows.is_empty());
    }
}
