//! Exact piecewise-polynomial weight kernels.
//!
//! The family is built from the m-th convolution power of the indicator of
//! [-1, 1], computed by repeated exact rational convolution. From it we form
//! the bump
//!
//! ```text
//!     p_m(t) = (4m / 2^m) * conv_m(4m t - 3m),        supp p_m = [1/2, 1],
//! ```
//!
//! and the weight `W(m; t) = p_m(1/t) / t`, extended evenly, supported on
//! [-2, -1] u [1, 2]. Integrals over p_m use exact antiderivatives; integrals
//! over W go through adaptive quadrature on [1, 2] because the 1/t
//! substitution destroys polynomial structure.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{e, ArithCache};
use crate::error::{Error, Result};
use crate::quad::{adaptive_quad, adaptive_quad_complex};

/// Largest admissible convolution order. Beyond this the coefficient growth
/// starts to threaten double precision on evaluation.
pub const MAX_CONV_ORDER: usize = 12;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Piecewise polynomial with *local* piece coordinates: piece `i` lives on
/// `[breaks[i], breaks[i+1]]` and stores ascending-degree coefficients in
/// `xi = t - breaks[i]`. Local coordinates keep evaluation stable even when
/// the global-basis coefficients would be astronomically large.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    pieces: Vec<Vec<f64>>,
    even: bool,
}

impl PiecewisePoly {
    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn piece(&self, i: usize) -> &[f64] {
        &self.pieces[i]
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    fn piece_index(&self, t: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if t < lo || t > hi {
            return None;
        }
        // partition_point gives the first break > t; piece index is one less.
        let idx = self.breaks.partition_point(|&b| b <= t);
        Some(idx.saturating_sub(1).min(self.pieces.len() - 1))
    }

    /// Evaluate; zero outside the support.
    pub fn eval(&self, t: f64) -> f64 {
        match self.piece_index(t) {
            None => 0.0,
            Some(i) => horner(&self.pieces[i], t - self.breaks[i]),
        }
    }

    /// Derivative, piece by piece (the breakpoint set is unchanged).
    pub fn derivative(&self) -> PiecewisePoly {
        let pieces = self
            .pieces
            .iter()
            .map(|c| {
                if c.len() <= 1 {
                    vec![0.0]
                } else {
                    c.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(k, &v)| k as f64 * v)
                        .collect()
                }
            })
            .collect();
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces,
            even: false,
        }
    }

    /// Exact integral over [a, b] (clipped to the support) via per-piece
    /// antiderivatives.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        let (lo, hi) = self.support();
        let a = a.max(lo);
        let b = b.min(hi);
        if a >= b {
            return 0.0;
        }
        let mut total = 0.0;
        for i in 0..self.pieces.len() {
            let left = self.breaks[i];
            let right = self.breaks[i + 1];
            let lo_i = a.max(left);
            let hi_i = b.min(right);
            if lo_i >= hi_i {
                continue;
            }
            let anti = |x: f64| -> f64 {
                let xi = x - left;
                let mut s = 0.0;
                for (k, &c) in self.pieces[i].iter().enumerate() {
                    s += c * xi.powi(k as i32 + 1) / (k as f64 + 1.0);
                }
                s
            };
            total += anti(hi_i) - anti(lo_i);
        }
        total
    }

    /// Check the even-symmetry flag by sampling 64 points; residual < 1e-12.
    pub fn verify_even(&self) -> bool {
        if !self.even {
            return true;
        }
        let (_, hi) = self.support();
        for k in 1..=64 {
            let t = hi * k as f64 / 65.0;
            if (self.eval(t) - self.eval(-t)).abs() > 1e-12 {
                return false;
            }
        }
        true
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Exact rational ladder of unit-width pieces on [k, k+1], local coordinates.
struct RationalLadder {
    first_break: i64,
    pieces: Vec<Vec<BigRational>>,
}

impl RationalLadder {
    fn indicator() -> Self {
        RationalLadder {
            first_break: -1,
            pieces: vec![vec![rat(1)], vec![rat(1)]],
        }
    }

    /// Convolve with the indicator of [-1, 1]:
    ///   g(t) = F(t + 1) - F(t - 1),  F = antiderivative of f.
    /// On the unit lattice the shifted antiderivative pieces line up with
    /// the new pieces at the *same* local coordinate, so no basis change is
    /// needed.
    fn convolve_with_indicator(&self) -> Self {
        let n = self.pieces.len();
        // Antiderivative pieces with accumulated constants, plus the total
        // mass for points right of the support.
        let mut antis: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut running = BigRational::zero();
        for p in &self.pieces {
            let mut a = vec![running.clone()];
            for (k, c) in p.iter().enumerate() {
                a.push(c / rat(k as i64 + 1));
            }
            // Piece width is exactly 1, so the end value is the plain sum.
            running = a.iter().fold(BigRational::zero(), |s, c| s + c);
            antis.push(a);
        }
        let total_mass = running;

        // F evaluated on piece with global start k (local coordinate),
        // clamped to 0 on the left of the support and to the mass on the
        // right.
        let f_piece = |k: i64| -> Vec<BigRational> {
            if k < self.first_break {
                vec![BigRational::zero()]
            } else if k >= self.first_break + n as i64 {
                vec![total_mass.clone()]
            } else {
                antis[(k - self.first_break) as usize].clone()
            }
        };

        let new_first = self.first_break - 1;
        let mut pieces = Vec::with_capacity(n + 2);
        for k in new_first..new_first + n as i64 + 2 {
            let plus = f_piece(k + 1);
            let minus = f_piece(k - 1);
            let deg = plus.len().max(minus.len());
            let mut c = vec![BigRational::zero(); deg];
            for (i, v) in plus.into_iter().enumerate() {
                c[i] += v;
            }
            for (i, v) in minus.into_iter().enumerate() {
                c[i] -= v;
            }
            pieces.push(c);
        }
        RationalLadder {
            first_break: new_first,
            pieces,
        }
    }
}

/// The m-th convolution power of the indicator of [-1, 1], as an exact
/// piecewise polynomial of degree m - 1 on integer breakpoints in [-m, m].
pub fn conv_power(m: usize) -> Result<PiecewisePoly> {
    if !(1..=MAX_CONV_ORDER).contains(&m) {
        return Err(Error::Parameter(format!(
            "convolution order m={m} outside 1..={MAX_CONV_ORDER}"
        )));
    }
    let mut ladder = RationalLadder::indicator();
    for _ in 1..m {
        ladder = ladder.convolve_with_indicator();
    }
    let breaks: Vec<f64> = (0..=ladder.pieces.len())
        .map(|i| (ladder.first_break + i as i64) as f64)
        .collect();
    let pieces = ladder
        .pieces
        .iter()
        .map(|p| p.iter().map(|c| c.to_f64().unwrap()).collect())
        .collect();
    Ok(PiecewisePoly {
        breaks,
        pieces,
        even: true,
    })
}

/// Rényi's closed form for the same function; serves as an independent
/// cross-check of the recursion.
pub fn conv_power_closed_form(m: usize, t: f64) -> f64 {
    conv_power_closed_form_with_scale(m, t).0
}

/// Closed form together with the absolute-term sum of the alternating
/// series, the natural scale for its floating-point cancellation error.
pub fn conv_power_closed_form_with_scale(m: usize, t: f64) -> (f64, f64) {
    let a = t.abs();
    if a > m as f64 {
        return (0.0, 0.0);
    }
    let mut fact = 1.0;
    for k in 1..m {
        fact *= k as f64;
    }
    let jmax = ((m as f64 + a) / 2.0).floor() as i64;
    let mut binom = 1.0; // C(m, 0)
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut sign = 1.0;
    for j in 0..=jmax {
        let term = binom * (m as f64 + a - 2.0 * j as f64).powi(m as i32 - 1);
        sum += sign * term;
        abs_sum += term;
        sign = -sign;
        binom = binom * (m as f64 - j as f64) / (j as f64 + 1.0);
    }
    (sum / fact, abs_sum / fact)
}

/// Build p_m = (4m/2^m) conv_m(4m t - 3m) exactly, emitting local-coordinate
/// pieces on the breakpoints (3m + k)/(4m).
fn bump_poly(m: usize) -> Result<PiecewisePoly> {
    if !(5..=MAX_CONV_ORDER).contains(&m) {
        return Err(Error::Parameter(format!(
            "kernel order m={m} outside 5..={MAX_CONV_ORDER} (C^3 regularity needs m >= 5)"
        )));
    }
    let mut ladder = RationalLadder::indicator();
    for _ in 1..m {
        ladder = ladder.convolve_with_indicator();
    }
    let four_m = rat(4 * m as i64);
    let scale = four_m.clone() / BigRational::from_integer(BigInt::one() << m);
    // t-piece for s-piece [k, k+1] is [(3m+k)/(4m), (3m+k+1)/(4m)]; with
    // eta = t - left we have s-local xi = 4m * eta, so coefficients pick up
    // (4m)^i. The products stay O(2^m) against eta^i <= (4m)^-i.
    let mut breaks = Vec::with_capacity(ladder.pieces.len() + 1);
    let mut pieces = Vec::with_capacity(ladder.pieces.len());
    for (i, p) in ladder.pieces.iter().enumerate() {
        let k = ladder.first_break + i as i64;
        breaks.push((3 * m as i64 + k) as f64 / (4.0 * m as f64));
        let mut pow = BigRational::one();
        let mut c = Vec::with_capacity(p.len());
        for coeff in p {
            c.push((coeff * &pow * &scale).to_f64().unwrap());
            pow *= &four_m;
        }
        pieces.push(c);
    }
    breaks.push((3.0 * m as f64 + ladder.pieces.len() as f64 + ladder.first_break as f64) / (4.0 * m as f64));
    Ok(PiecewisePoly {
        breaks,
        pieces,
        even: false,
    })
}

/// The weight W(m; t) = p_m(1/t)/t with its basic integrals.
#[derive(Debug, Clone)]
pub struct WeightKernel {
    m: usize,
    pm: PiecewisePoly,
    pm_deriv: PiecewisePoly,
    /// J(W) = int_0^inf W(u) du / u. For this family it equals int p_m = 1.
    j: f64,
    /// int_0^inf W(u) du.
    integral0: f64,
}

/// Quadrature tolerance used for the kernel integrals J and int W.
pub const KERNEL_QUAD_TOL: f64 = 1e-12;

pub fn build_weight(m: usize) -> Result<WeightKernel> {
    let pm = bump_poly(m)?;
    let pm_deriv = pm.derivative();
    let mut k = WeightKernel {
        m,
        pm,
        pm_deriv,
        j: 0.0,
        integral0: 0.0,
    };
    k.integral0 = adaptive_quad(|t| k.eval(t), 1.0, 2.0, KERNEL_QUAD_TOL)?;
    k.j = adaptive_quad(|t| k.eval(t) / t, 1.0, 2.0, KERNEL_QUAD_TOL)?;
    Ok(k)
}

impl WeightKernel {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pm(&self) -> &PiecewisePoly {
        &self.pm
    }

    /// J(W) = int_0^inf W(u)/u du.
    pub fn j(&self) -> f64 {
        self.j
    }

    /// int_0^inf W(u) du.
    pub fn integral0(&self) -> f64 {
        self.integral0
    }

    /// W(m; t), even in t, supported on 1 <= |t| <= 2.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if !(1.0..=2.0).contains(&t) {
            return 0.0;
        }
        self.pm.eval(1.0 / t) / t
    }

    /// W'(t) for t > 0 (odd extension elsewhere).
    pub fn eval_deriv(&self, t: f64) -> f64 {
        let s = t.signum();
        let t = t.abs();
        if !(1.0..=2.0).contains(&t) {
            return 0.0;
        }
        let u = 1.0 / t;
        s * (-self.pm_deriv.eval(u) / (t * t * t) - self.pm.eval(u) / (t * t))
    }

    /// (t W(t))' = t W'(t) + W(t), the combination in the sawtooth integral.
    pub fn tw_deriv(&self, t: f64) -> f64 {
        t * self.eval_deriv(t) + self.eval(t)
    }

    /// Copy with the bump scaled by `factor` (degenerate kernels for tests).
    pub fn scaled(&self, factor: f64) -> WeightKernel {
        let mut k = self.clone();
        for p in &mut k.pm.pieces {
            for c in p.iter_mut() {
                *c *= factor;
            }
        }
        for p in &mut k.pm_deriv.pieces {
            for c in p.iter_mut() {
                *c *= factor;
            }
        }
        k.j *= factor;
        k.integral0 *= factor;
        k
    }
}

/// Closed form of the Fourier transform of p_m under the convention
/// `f^(u) = int f(t) e(-u t) dt`:
///
/// ```text
///     p_m^(u) = e(-3u/4) * (sin(pi u / 2m) / (pi u / 2m))^m,
/// ```
///
/// with the removable singularity at u = 0 giving 1.
pub fn fourier_pm(m: usize, u: f64) -> Complex64 {
    let x = std::f64::consts::PI * u / (2.0 * m as f64);
    let sinc = if x.abs() < 1e-12 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    };
    e(-3.0 * u / 4.0) * sinc.powi(m as i32)
}

/// I_0(W) = sum_q phi(q) W(q/Q) / (q Q), a finite sum over Q < q <= 2Q.
pub fn i0(kernel: &WeightKernel, cache: &ArithCache, q_scale: f64) -> Result<f64> {
    if q_scale < 1.0 {
        return Err(Error::Parameter("I_0 needs Q >= 1".into()));
    }
    let hi = (2.0 * q_scale).floor() as usize;
    if cache.limit() < hi {
        return Err(Error::Size(format!(
            "arith cache limit {} < 2Q = {hi}",
            cache.limit()
        )));
    }
    let lo = q_scale.floor() as usize + 1;
    let mut sum = 0.0;
    for q in lo..=hi {
        sum += cache.phi(q) as f64 * kernel.eval(q as f64 / q_scale) / (q as f64 * q_scale);
    }
    Ok(sum)
}

/// Mellin transform W^v(s) = int_0^inf W(t) t^(s-1) dt; entire in s since W
/// is compactly supported. Adaptive quadrature on [1, 2] at 1e-10.
pub fn mellin_w(kernel: &WeightKernel, s: Complex64) -> Result<Complex64> {
    adaptive_quad_complex(
        |t| Complex64::from(kernel.eval(t)) * ((s - 1.0) * t.ln()).exp(),
        1.0,
        2.0,
        1e-10,
    )
}
