//! The transform chain of the weight kernel: the divisor sums W# and Wb,
//! the sawtooth average W~, its Möbius averages W*_C and W**_C, the series
//! route to W* = W*_inf, and the Fourier transform of W* with its plateau.
//!
//! Evaluation policy: W* for the W(m;.) family always goes through the
//! phi(n)/n cosine series with the explicit truncation bound; W*_C is the
//! generic fallback route through the sawtooth quadrature. The two are
//! independent and the tests hold them against each other.

use std::sync::Arc;

use crate::arith::ArithCache;
use crate::error::{Error, Result};
use crate::kernel::WeightKernel;
use crate::quad::adaptive_quad;

/// Shared configuration for the transform evaluations.
#[derive(Clone)]
pub struct TransformConfig {
    pub cache: Arc<ArithCache>,
    /// Möbius truncation C; `None` is the C = infinity marker.
    pub moebius_cut: Option<usize>,
    /// Starting truncation for the phi(n)/n series.
    pub series_n: usize,
    /// Hard cap when the series truncation is auto-raised from the bound.
    pub series_cap: usize,
    pub quad_tol: f64,
}

impl TransformConfig {
    pub fn new(cache: Arc<ArithCache>) -> Self {
        TransformConfig {
            cache,
            moebius_cut: None,
            series_n: 64,
            series_cap: 8_000_000,
            quad_tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.series_n < 1 {
            return Err(Error::Parameter("series_N must be >= 1".into()));
        }
        if self.quad_tol.is_nan() || self.quad_tol <= 0.0 {
            return Err(Error::Parameter("quad_tol must be positive".into()));
        }
        if let Some(c) = self.moebius_cut {
            if c < 1 {
                return Err(Error::Parameter("C must be >= 1 when finite".into()));
            }
        }
        Ok(())
    }
}

/// W#(y) = sum_{k >= 1} W(y/k)/k; the nonzero terms have k in [y/2, y].
pub fn w_sharp(kernel: &WeightKernel, y: f64) -> f64 {
    let y = y.abs();
    if y < 1.0 {
        return 0.0;
    }
    let lo = (y / 2.0).ceil() as u64;
    let hi = y.floor() as u64;
    let mut sum = 0.0;
    for k in lo.max(1)..=hi {
        sum += kernel.eval(y / k as f64) / k as f64;
    }
    sum
}

/// Wb(z) = sum_{f >= 1} W(zf)/f for z > 0; approaches J(W) as z -> 0.
pub fn w_flat(kernel: &WeightKernel, z: f64) -> Result<f64> {
    if z.is_nan() || z <= 0.0 {
        return Err(Error::Parameter("w_flat needs z > 0".into()));
    }
    let lo = (1.0 / z).ceil() as u64;
    let hi = (2.0 / z).floor() as u64;
    let mut sum = 0.0;
    for f in lo.max(1)..=hi {
        sum += kernel.eval(z * f as f64) / f as f64;
    }
    Ok(sum)
}

/// W~(z) = (1/|z|) int_0^inf {z/u} (u W'(u) + W(u)) du, even in z, equal to
/// J(W) on |z| <= 1.
///
/// The sawtooth u -> {z/u} jumps at u = z/k; the integration domain [1, 2]
/// is split there so each sub-integral is smooth and Gauss-Legendre
/// converges at machine rate.
pub fn w_tilde(kernel: &WeightKernel, cfg: &TransformConfig, z: f64) -> Result<f64> {
    let z = z.abs();
    if z <= 1.0 {
        return Ok(kernel.j());
    }
    let mut cuts = vec![1.0];
    // z/k in (1, 2) <=> k in (z/2, z)
    let klo = (z / 2.0).floor() as u64 + 1;
    let khi = z.ceil() as u64;
    for k in klo..khi {
        let u = z / k as f64;
        if u > 1.0 && u < 2.0 {
            cuts.push(u);
        }
    }
    cuts.push(2.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let per_piece_tol = cfg.quad_tol / cuts.len() as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-14 {
            continue;
        }
        total += adaptive_quad(
            |u| {
                let x = z / u;
                (x - x.floor()) * kernel.tw_deriv(u)
            },
            a,
            b,
            per_piece_tol,
        )?;
    }
    Ok(total / z)
}

/// W*_C(z) = sum_{1 <= c <= C} mu(c)/c W~(cz). Requires a finite C.
pub fn w_star_c(kernel: &WeightKernel, cfg: &TransformConfig, z: f64) -> Result<f64> {
    let c_cut = cfg
        .moebius_cut
        .ok_or_else(|| Error::Parameter("w_star_C needs a finite Möbius cut C".into()))?;
    let cache = &cfg.cache;
    if cache.limit() < c_cut {
        return Err(Error::Size(format!(
            "arith cache limit {} < C = {c_cut}",
            cache.limit()
        )));
    }
    let mut sum = 0.0;
    for c in 1..=c_cut {
        let mu = cache.mu(c);
        if mu != 0 {
            sum += mu as f64 / c as f64 * w_tilde(kernel, cfg, c as f64 * z)?;
        }
    }
    Ok(sum)
}

/// W**_C(z) = W*_C(z) - W*_C(0), with W*_C(0) = J(W) sum_{c <= C} mu(c)/c.
/// Vanishes identically on |z| <= 1/C.
pub fn w_star_star_c(kernel: &WeightKernel, cfg: &TransformConfig, z: f64) -> Result<f64> {
    let c_cut = cfg
        .moebius_cut
        .ok_or_else(|| Error::Parameter("w_star_star_C needs a finite Möbius cut C".into()))?;
    let mut mert = 0.0;
    for c in 1..=c_cut {
        mert += cfg.cache.mu(c) as f64 / c as f64;
    }
    Ok(w_star_c(kernel, cfg, z)? - kernel.j() * mert)
}

/// Value of a truncated series evaluation together with its certified
/// truncation bound.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEval {
    pub value: f64,
    pub err_bound: f64,
    pub terms: usize,
}

/// Truncation error bound for the W*(m; z) series cut at N terms:
/// 2 (2m/(pi z))^m / ((m-1) N^(m-1)).
pub fn w_star_series_bound(m: usize, z: f64, terms: usize) -> f64 {
    let mf = m as f64;
    2.0 * (2.0 * mf / (std::f64::consts::PI * z)).powi(m as i32)
        / ((mf - 1.0) * (terms as f64).powi(m as i32 - 1))
}

/// W*(m; z) for z > 0 through the fast series
///
/// ```text
///     W*(m; z) = -2 sum_{n>=1} phi(n)/n cos(3 pi n z / 2)
///                   (sin(pi n z / 2m) / (pi n z / 2m))^m ,
/// ```
///
/// truncated where the explicit bound drops below `cfg.quad_tol`. The
/// truncation is always chosen from the bound, never from tail inspection.
/// The overall minus sign is the one consistent with the Möbius route
/// through W~; the tests pin the two against each other.
pub fn w_star_series(kernel: &WeightKernel, cfg: &TransformConfig, z: f64) -> Result<SeriesEval> {
    if z.is_nan() || z <= 0.0 {
        return Err(Error::Parameter("w_star_series needs z > 0".into()));
    }
    let m = kernel.m();
    let mf = m as f64;
    // Smallest N with bound < quad_tol, from inverting the bound formula.
    let needed = (2.0 * (2.0 * mf / (std::f64::consts::PI * z)).powi(m as i32)
        / ((mf - 1.0) * cfg.quad_tol))
        .powf(1.0 / (mf - 1.0));
    let cap = cfg.series_cap.min(cfg.cache.limit());
    let terms = if needed.is_finite() && needed >= 1.0 {
        (needed.ceil() as usize).max(cfg.series_n)
    } else {
        cfg.series_n
    };
    if terms > cap {
        let bound = w_star_series_bound(m, z, cap);
        if bound >= cfg.quad_tol {
            return Err(Error::Accuracy {
                bound,
                tol: cfg.quad_tol,
            });
        }
    }
    let terms = terms.min(cap);
    let cache = &cfg.cache;
    let mut sum = 0.0;
    let half_pi_over_m = std::f64::consts::PI / (2.0 * mf);
    let three_half_pi = 1.5 * std::f64::consts::PI;
    for n in 1..=terms {
        let x = half_pi_over_m * n as f64 * z;
        let sinc = if x.abs() < 1e-12 { 1.0 } else { x.sin() / x };
        sum += cache.phi_ratio(n) * (three_half_pi * n as f64 * z).cos() * sinc.powi(m as i32);
    }
    Ok(SeriesEval {
        value: -2.0 * sum,
        err_bound: w_star_series_bound(m, z, terms),
        terms,
    })
}

/// W*(z) through the series route, even extension, W*(0) = 0 by continuity.
pub fn w_star(kernel: &WeightKernel, cfg: &TransformConfig, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.0);
    }
    Ok(w_star_series(kernel, cfg, z.abs())?.value)
}

/// The plateau value of the Fourier transform of W*:
/// hat W*(u) = (6/pi^2) int_0^inf W for |u| <= 1/2.
pub fn w_hat_star_plateau(kernel: &WeightKernel) -> f64 {
    6.0 / (std::f64::consts::PI * std::f64::consts::PI) * kernel.integral0()
}

/// hat W*(u) = plateau - (1/|u|) sum_{n>=1} phi(n)/n W(n/|u|); the sum is
/// finite with n in [|u|, 2|u|] and empty on the plateau |u| <= 1/2.
pub fn w_hat_star(kernel: &WeightKernel, cache: &ArithCache, u: f64) -> Result<f64> {
    let u = u.abs();
    let plateau = w_hat_star_plateau(kernel);
    if u <= 0.5 {
        return Ok(plateau);
    }
    let hi = (2.0 * u).floor() as usize;
    if cache.limit() < hi {
        return Err(Error::Size(format!(
            "arith cache limit {} < 2|u| = {hi}",
            cache.limit()
        )));
    }
    let lo = (u.ceil() as usize).max(1);
    let mut sum = 0.0;
    for n in lo..=hi {
        sum += cache.phi_ratio(n) * kernel.eval(n as f64 / u);
    }
    Ok(plateau - sum / u)
}

/// Finite-C variant: hat W**_C(u) with the truncated totient phi_C(n)/n and
/// the plateau sum_{c <= C} mu(c)/c^2 int_0^inf W.
pub fn w_hat_star_star_c(
    kernel: &WeightKernel,
    cache: &ArithCache,
    c_cut: usize,
    u: f64,
) -> Result<f64> {
    let u = u.abs();
    let mut plateau = 0.0;
    for c in 1..=c_cut.min(cache.limit()) {
        plateau += cache.mu(c) as f64 / (c * c) as f64;
    }
    plateau *= kernel.integral0();
    if u <= 0.5 {
        return Ok(plateau);
    }
    let hi = (2.0 * u).floor() as usize;
    if cache.limit() < hi {
        return Err(Error::Size(format!(
            "arith cache limit {} < 2|u| = {hi}",
            cache.limit()
        )));
    }
    let lo = (u.ceil() as usize).max(1);
    let mut sum = 0.0;
    for n in lo..=hi {
        sum += crate::arith::phi_c_ratio(cache, n, c_cut) * kernel.eval(n as f64 / u);
    }
    Ok(plateau - sum / u)
}
