//! Exponential sums, the raw and smoothed large-sieve quadratic forms, the
//! delta-symbol with its five-piece decomposition, and the evaluators for
//! the precise-identity and remainder functionals.
//!
//! Normalization: `smoothed_form` returns sum_q W(q/Q)/q sum_{a mod* q}
//! |S(phi, a/q)|^2; the identity evaluators divide by Q at the call site.
//! All q-sums are exact integer loops at desk scale.

use std::collections::BTreeMap;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::arith::{e, gcd, ramanujan_sum, ArithCache};
use crate::error::{Error, Result};
use crate::kernel::{i0, WeightKernel};
use crate::quad::adaptive_quad;
use crate::report::{params, CheckReport};
use crate::transform::w_hat_star;

/// The sequence (phi_n), 1 <= n <= N, with phi_n = 0 outside.
#[derive(Debug, Clone)]
pub struct ComplexSequence {
    values: Vec<Complex64>,
}

impl ComplexSequence {
    pub fn new(values: Vec<Complex64>) -> Self {
        ComplexSequence { values }
    }

    pub fn zeros(n: usize) -> Self {
        ComplexSequence {
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn from_real(values: &[f64]) -> Self {
        ComplexSequence {
            values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// phi_n with the support convention: 1-based index, zero outside 1..=N.
    pub fn get(&self, n: usize) -> Complex64 {
        if n >= 1 && n <= self.values.len() {
            self.values[n - 1]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// ||phi||_2^2 = sum |phi_n|^2 (the unnormalized norm of the paper).
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// [phi, psi]_N = (1/N) sum phi_n conj(psi_n).
    pub fn scalar_n(&self, other: &ComplexSequence) -> Complex64 {
        let n = self.n().max(other.n());
        let mut s = Complex64::new(0.0, 0.0);
        for i in 1..=n {
            s += self.get(i) * other.get(i).conj();
        }
        s / n as f64
    }

    /// Autocorrelation A(v) = sum_m phi_m conj(phi_{m-v}) for v = 0..N-1.
    pub fn autocorrelation(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        for (v, slot) in a.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for m in (v + 1)..=n {
                s += self.get(m) * self.get(m - v).conj();
            }
            *slot = s;
        }
        a
    }
}

/// Parameters of the delta-symbol decomposition and the identity evaluators.
#[derive(Debug, Clone, Copy)]
pub struct SieveParams {
    /// Q, the modulus scale; the smoothed form runs over q in (Q, 2Q].
    pub q_scale: f64,
    /// H, the small-modulus cutoff.
    pub h_max: f64,
    /// C, the Möbius cut of the decomposition.
    pub moebius_cut: usize,
    /// E, the direct-divisor cut.
    pub divisor_cut: usize,
    /// U, the Fourier integration cutoff; `None` reads as infinity and is
    /// resolved to a default by the evaluators that need it.
    pub fourier_cut: Option<f64>,
}

impl SieveParams {
    /// The standing assumption of the decomposition: E <= min(Q, 2Q/C).
    /// H <= sqrt(N)/(log N)^5 is an asymptotic-regime condition of the
    /// precise identity; desk scales sit outside it, so it is documented
    /// rather than enforced.
    pub fn validate(&self) -> Result<()> {
        if self.q_scale < 1.0 {
            return Err(Error::Parameter("Q must be >= 1".into()));
        }
        if self.h_max < 0.5 {
            return Err(Error::Parameter("H must be >= 1/2".into()));
        }
        if self.moebius_cut < 1 || self.divisor_cut < 1 {
            return Err(Error::Parameter("C and E must be >= 1".into()));
        }
        let cap = self
            .q_scale
            .min(2.0 * self.q_scale / self.moebius_cut as f64);
        if self.divisor_cut as f64 > cap {
            return Err(Error::Parameter(format!(
                "decomposition needs E <= min(Q, 2Q/C) = {cap}, got E = {}",
                self.divisor_cut
            )));
        }
        Ok(())
    }
}

/// S(phi, alpha) = sum_{n <= N} phi_n e(n alpha), alpha reduced mod 1.
pub fn exp_sum(phi: &ComplexSequence, alpha: f64) -> Complex64 {
    let alpha = alpha - alpha.floor();
    let mut s = Complex64::new(0.0, 0.0);
    for (i, v) in phi.values().iter().enumerate() {
        if v.norm_sqr() != 0.0 {
            s += v * e((i as f64 + 1.0) * alpha);
        }
    }
    s
}

/// S(phi, a/q) by Horner over a precomputed table of q-th roots of unity;
/// exact Farey-point evaluation without drift.
fn exp_sum_with_roots(phi: &ComplexSequence, a: usize, q: usize, roots: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    let mut idx = 0usize;
    for v in phi.values() {
        idx += a;
        if idx >= q {
            idx -= q;
            if idx >= q {
                idx %= q;
            }
        }
        s += v * roots[idx];
    }
    s
}

fn roots_of_unity(q: usize) -> Vec<Complex64> {
    (0..q).map(|j| e(j as f64 / q as f64)).collect()
}

/// Direct route: sum over reduced residues a mod* q of |S(phi, a/q)|^2.
pub fn farey_square_sum(phi: &ComplexSequence, q: usize) -> f64 {
    let roots = roots_of_unity(q);
    let mut sum = 0.0;
    if q == 1 {
        return exp_sum(phi, 0.0).norm_sqr();
    }
    for a in 1..q {
        if gcd(a as u64, q as u64) == 1 {
            sum += exp_sum_with_roots(phi, a, q, &roots).norm_sqr();
        }
    }
    sum
}

/// Residue-class fold B_d(r) = sum_{n = r mod d} phi_n, then Parseval:
/// sum_{b mod d} |S(phi, b/d)|^2 = d sum_r |B_d(r)|^2.
fn parseval_class_sum(phi: &ComplexSequence, d: usize) -> f64 {
    if d >= phi.n() {
        // every class holds at most one index, so the fold is the sequence
        return d as f64 * phi.norm_sq();
    }
    let mut fold = vec![Complex64::new(0.0, 0.0); d];
    for (i, v) in phi.values().iter().enumerate() {
        fold[(i + 1) % d] += v;
    }
    d as f64 * fold.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

fn factorize(mut q: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut e = 0;
            while q.is_multiple_of(p) {
                q /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if q > 1 {
        out.push((q, 1));
    }
    out
}

/// DFT fast path for the same quantity as [`farey_square_sum`]:
/// sum_{a mod* q} |S|^2 = sum over squarefree s | rad(q) of mu(s) T(q/s),
/// T(d) = d sum_r |B_d(r)|^2. Must agree with the direct path to 1e-10.
pub fn farey_square_sum_fast(phi: &ComplexSequence, q: usize) -> f64 {
    farey_square_sum_fast_memo(phi, q, &mut HashMap::new())
}

fn farey_square_sum_fast_memo(
    phi: &ComplexSequence,
    q: usize,
    memo: &mut HashMap<usize, f64>,
) -> f64 {
    let primes: Vec<usize> = factorize(q).into_iter().map(|(p, _)| p).collect();
    let mut total = 0.0;
    // iterate squarefree divisors s of rad(q) with their mu by bitmask
    for mask in 0..(1usize << primes.len()) {
        let mut s = 1usize;
        let mut mu = 1.0;
        for (i, &p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s *= p;
                mu = -mu;
            }
        }
        let d = q / s;
        let t = *memo
            .entry(d)
            .or_insert_with(|| parseval_class_sum(phi, d));
        total += mu * t;
    }
    total
}

/// Raw large-sieve quadratic form: sum_{1 < q/Q <= 2} sum_{a mod* q}
/// |S(phi, a/q)|^2, exact double sum.
pub fn raw_form(phi: &ComplexSequence, q_scale: f64) -> f64 {
    let lo = q_scale.floor() as usize + 1;
    let hi = (2.0 * q_scale).floor() as usize;
    let mut memo = HashMap::new();
    let mut sum = 0.0;
    for q in lo..=hi {
        sum += farey_square_sum_fast_memo(phi, q, &mut memo);
    }
    sum
}

/// Smoothed form S(Q, W) = sum_q W(q/Q)/q sum_{a mod* q} |S(phi, a/q)|^2.
pub fn smoothed_form(phi: &ComplexSequence, kernel: &WeightKernel, q_scale: f64) -> f64 {
    let lo = q_scale.floor() as usize + 1;
    let hi = (2.0 * q_scale).floor() as usize;
    let mut memo = HashMap::new();
    let mut sum = 0.0;
    for q in lo..=hi {
        let w = kernel.eval(q as f64 / q_scale);
        if w != 0.0 {
            sum += w / q as f64 * farey_square_sum_fast_memo(phi, q, &mut memo);
        }
    }
    sum
}

/// Delta(v) = sum_{c, d : d | v} mu(c) W(cd/Q) / c; the support of W forces
/// Q < cd <= 2Q, so the sum is finite (v = 0 admits every d).
pub fn delta_symbol(cache: &ArithCache, kernel: &WeightKernel, q_scale: f64, v: i64) -> f64 {
    let mut sum = 0.0;
    if v == 0 {
        let c_hi = (2.0 * q_scale).floor() as usize;
        for c in 1..=c_hi {
            let mu = cache.mu(c);
            if mu == 0 {
                continue;
            }
            let d_lo = (q_scale / c as f64).floor() as usize + 1;
            let d_hi = (2.0 * q_scale / c as f64).floor() as usize;
            let mut inner = 0.0;
            for d in d_lo..=d_hi {
                inner += kernel.eval((c * d) as f64 / q_scale);
            }
            sum += mu as f64 / c as f64 * inner;
        }
    } else {
        let va = v.unsigned_abs() as usize;
        for d in cache.divisors(va) {
            if d as f64 > 2.0 * q_scale {
                continue;
            }
            let c_lo = (q_scale / d as f64).floor() as usize + 1;
            let c_hi = (2.0 * q_scale / d as f64).floor() as usize;
            for c in c_lo..=c_hi {
                let mu = cache.mu(c);
                if mu != 0 {
                    sum += mu as f64 / c as f64 * kernel.eval((c * d) as f64 / q_scale);
                }
            }
        }
    }
    sum
}

/// The five pieces of the delta-symbol decomposition.
#[derive(Debug, Clone, Copy)]
pub struct DeltaPieces {
    /// Diagonal contribution, nonzero only at v = 0.
    pub l0: f64,
    /// Direct-divisor part, small moduli e <= E (with the leading minus).
    pub u: f64,
    /// Direct-divisor part, e > E and c > C.
    pub u_sharp: f64,
    /// Complementary-divisor part, moduli h <= H.
    pub l: f64,
    /// Complementary-divisor part, h > H.
    pub l_sharp: f64,
}

impl DeltaPieces {
    pub fn total(&self) -> f64 {
        self.l0 + self.u + self.u_sharp + self.l + self.l_sharp
    }
}

/// Decompose Delta(v) into diagonal, direct-divisor and complementary-
/// divisor pieces. Exact identity: the pieces sum back to `delta_symbol`.
pub fn delta_decomposition(
    cache: &ArithCache,
    kernel: &WeightKernel,
    q_scale: f64,
    sieve: &SieveParams,
    v: i64,
) -> Result<DeltaPieces> {
    sieve.validate()?;
    let c_cut = sieve.moebius_cut;
    let e_cut = sieve.divisor_cut;
    let h_cut = sieve.h_max;
    let va = v.unsigned_abs() as f64;

    // L0: diagonal, all of the c <= C mass at v = 0.
    let mut l0 = 0.0;
    if v == 0 {
        for c in 1..=c_cut.min((2.0 * q_scale) as usize) {
            let mu = cache.mu(c);
            if mu == 0 {
                continue;
            }
            let d_lo = (q_scale / c as f64).floor() as usize + 1;
            let d_hi = (2.0 * q_scale / c as f64).floor() as usize;
            let mut inner = 0.0;
            for d in d_lo..=d_hi {
                inner += kernel.eval((c * d) as f64 / q_scale);
            }
            l0 += mu as f64 / c as f64 * inner;
        }
    }

    // Direct-divisor parts: sums over c, e, f with c e f in (Q, 2Q] and the
    // Ramanujan factor c_e(v).
    let inner_f = |c: usize, e: usize| -> f64 {
        let ce = (c * e) as f64;
        let f_lo = (q_scale / ce).floor() as usize + 1;
        let f_hi = (2.0 * q_scale / ce).floor() as usize;
        let mut s = 0.0;
        for f in f_lo..=f_hi {
            s += kernel.eval(ce * f as f64 / q_scale) / f as f64;
        }
        s
    };

    let mut u = 0.0;
    for e in 1..=e_cut {
        let ce = ramanujan_sum(e as u64, v);
        if ce == 0.0 {
            continue;
        }
        for c in 1..=c_cut {
            let mu = cache.mu(c);
            if mu == 0 || (c * e) as f64 > 2.0 * q_scale {
                continue;
            }
            u -= mu as f64 / (c * e) as f64 * ce * inner_f(c, e);
        }
    }

    let mut u_sharp = 0.0;
    let e_hi = (2.0 * q_scale / (c_cut + 1) as f64).floor() as usize;
    for e in (e_cut + 1)..=e_hi {
        let ce = ramanujan_sum(e as u64, v);
        if ce == 0.0 {
            continue;
        }
        let c_hi = (2.0 * q_scale / e as f64).floor() as usize;
        for c in (c_cut + 1)..=c_hi {
            let mu = cache.mu(c);
            if mu != 0 {
                u_sharp += mu as f64 / (c * e) as f64 * ce * inner_f(c, e);
            }
        }
    }

    // Complementary-divisor parts: g runs over multiples of h with
    // W(c|v|/(gQ)) nonzero, i.e. g in [c|v|/(2Q), c|v|/Q).
    let mut l = 0.0;
    let mut l_sharp = 0.0;
    if v != 0 {
        let h_hi = (c_cut as f64 * va / q_scale).floor() as usize;
        for h in 1..=h_hi {
            let ch = ramanujan_sum(h as u64, v);
            if ch == 0.0 {
                continue;
            }
            let mut piece = 0.0;
            for c in 1..=c_cut {
                let mu = cache.mu(c);
                if mu == 0 {
                    continue;
                }
                let g_lo = ((c as f64 * va / (2.0 * q_scale)).ceil() as usize).max(h);
                let g_hi = (c as f64 * va / q_scale).floor() as usize;
                // round g_lo up to a multiple of h
                let mut g = g_lo.div_ceil(h) * h;
                while g <= g_hi {
                    piece +=
                        mu as f64 / (g * c) as f64 * kernel.eval(c as f64 * va / (g as f64 * q_scale));
                    g += h;
                }
            }
            let contribution = piece * ch;
            if (h as f64) <= h_cut {
                l += contribution;
            } else {
                l_sharp += contribution;
            }
        }
    }

    Ok(DeltaPieces {
        l0,
        u,
        u_sharp,
        l,
        l_sharp,
    })
}

/// The bilinear form sum_{m,n} phi_m conj(phi_n) Delta(m - n), evaluated
/// through the autocorrelation. Independent route to the smoothed form.
pub fn delta_bilinear(
    cache: &ArithCache,
    kernel: &WeightKernel,
    q_scale: f64,
    phi: &ComplexSequence,
) -> f64 {
    let auto = phi.autocorrelation();
    let mut sum = auto[0].re * delta_symbol(cache, kernel, q_scale, 0);
    for (v, a) in auto.iter().enumerate().skip(1) {
        if a.norm_sqr() != 0.0 {
            // Delta is even in v, and A(-v) = conj(A(v)).
            sum += 2.0 * a.re * delta_symbol(cache, kernel, q_scale, v as i64);
        }
    }
    sum
}

/// Right-hand side of the precise identity, in the same normalization as
/// `smoothed_form(phi)/Q`:
///
/// ```text
///   I_0(W) ||phi||^2 - sum_{h<=H} 1/(hQ) sum_{a mod* h}
///       int_{-U}^{U} hat W*(u) |S(phi, a/h + u/(hQ))|^2 du .
/// ```
///
/// The u-integral splits at the plateau edge |u| = 1/2 and at the integer
/// and half-integer breakpoints of the n-window of hat W*, then adaptive
/// quadrature runs per smooth piece.
pub fn precise_rhs(
    phi: &ComplexSequence,
    kernel: &WeightKernel,
    cache: &ArithCache,
    q_scale: f64,
    h_max: f64,
    fourier_cut: Option<f64>,
    quad_tol: f64,
) -> Result<f64> {
    if h_max < 0.5 {
        return Err(Error::Parameter("precise_rhs needs H >= 1/2".into()));
    }
    let u_cut = fourier_cut.unwrap_or(40.0);
    if cache.limit() < (2.0 * u_cut).ceil() as usize {
        return Err(Error::Size(format!(
            "arith cache limit {} too small for U = {u_cut}",
            cache.limit()
        )));
    }
    let i0_val = i0(kernel, cache, q_scale)?;
    let mut h_term = 0.0;

    // breakpoints of hat W*: the plateau edge and every point where the
    // window [u, 2u] gains or loses an integer, i.e. u in Z/2.
    let mut cuts = vec![0.0];
    let mut x = 0.5;
    while x < u_cut {
        cuts.push(x);
        x += 0.5;
    }
    cuts.push(u_cut);

    let h_hi = h_max.floor() as usize;
    for h in 1..=h_hi {
        let mut residue_sum = 0.0;
        for a in 0..h.max(1) {
            if h == 1 && a != 0 {
                continue;
            }
            if h > 1 && (a == 0 || gcd(a as u64, h as u64) != 1) {
                continue;
            }
            let alpha0 = a as f64 / h as f64;
            let scale = 1.0 / (h as f64 * q_scale);
            let mut integral = 0.0;
            for w in cuts.windows(2) {
                let tol = quad_tol / cuts.len() as f64;
                // even split: integrate u and -u pieces separately
                for sign in [1.0, -1.0] {
                    integral += adaptive_quad(
                        |u| {
                            let su = sign * u;
                            let hat = w_hat_star(kernel, cache, su).unwrap_or(0.0);
                            if hat == 0.0 {
                                return 0.0;
                            }
                            hat * exp_sum(phi, alpha0 + su * scale).norm_sqr()
                        },
                        w[0],
                        w[1],
                        tol,
                    )?;
                }
            }
            residue_sum += integral;
        }
        h_term += residue_sum / (h as f64 * q_scale);
    }
    Ok(i0_val * phi.norm_sq() - h_term)
}

/// The remainder functional of the windowed-progression bound:
///
/// ```text
///   sum_{h<=H} (N + hQ)/(h Q^2) max_{u<v<u+2hQ} sum_{c mod h}
///       | sum_{u<n<=v, n=c mod h} phi_n |^2 ,
/// ```
///
/// computed exactly with per-class prefix sums and a full window scan.
pub fn vic_remainder(phi: &ComplexSequence, h_max: f64, q_scale: f64) -> f64 {
    let n = phi.n();
    let mut total = 0.0;
    for h in 1..=h_max.floor() as usize {
        // prefix[c][j] = sum_{n <= j, n = c mod h} phi_n
        let mut prefix = vec![vec![Complex64::new(0.0, 0.0); n + 1]; h];
        for j in 1..=n {
            for pc in prefix.iter_mut() {
                pc[j] = pc[j - 1];
            }
            prefix[j % h][j] += phi.get(j);
        }
        let window = (2.0 * h as f64 * q_scale).ceil() as usize;
        let mut best = 0.0f64;
        for u in 0..n {
            let v_hi = (u + window.saturating_sub(1)).min(n);
            for v in (u + 1)..=v_hi {
                let mut s = 0.0;
                for pc in prefix.iter() {
                    s += (pc[v] - pc[u]).norm_sqr();
                }
                best = best.max(s);
            }
        }
        total += (n as f64 + h as f64 * q_scale) / (h as f64 * q_scale * q_scale) * best;
    }
    total
}

/// Least prime factor by trial division.
fn least_prime_factor(n: usize) -> usize {
    if n <= 1 {
        return usize::MAX;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 1;
    }
    n
}

/// Restricted-support large-sieve inequality check: for sequences vanishing
/// whenever n has a prime factor below sqrt(N),
///
/// ```text
///   sum_{q <= Q0} sum_{a mod* q} |S(phi, a/q)|^2
///       <= 7 N log(Q0) / log(N) ||phi||^2 .
/// ```
pub fn prime_support_check(
    phi: &ComplexSequence,
    q0: usize,
) -> Result<CheckReport> {
    let n = phi.n();
    if n < 100 {
        return Err(Error::Parameter("prime support check needs N >= 100".into()));
    }
    let sqrt_n = (n as f64).sqrt();
    if q0 as f64 > sqrt_n {
        return Err(Error::Parameter(format!(
            "prime support check needs Q0 <= sqrt(N) = {sqrt_n:.1}"
        )));
    }
    for idx in 1..=n {
        if phi.get(idx).norm_sqr() != 0.0 && (least_prime_factor(idx) as f64) < sqrt_n {
            return Err(Error::Parameter(format!(
                "support violation: phi_{idx} != 0 but lpf({idx}) < sqrt(N)"
            )));
        }
    }
    let mut memo = HashMap::new();
    let mut lhs = 0.0;
    for q in 1..=q0 {
        lhs += farey_square_sum_fast_memo(phi, q, &mut memo);
    }
    let rhs = 7.0 * n as f64 * (q0 as f64).ln() / (n as f64).ln() * phi.norm_sq();
    let residual = (lhs - rhs).max(0.0);
    Ok(CheckReport::new(
        "eir_prime_support",
        params(&[
            ("N", n.to_string()),
            ("Q0", q0.to_string()),
        ]),
        lhs,
        rhs,
        residual,
        0.0,
        "one-sided: pass iff lhs <= rhs (residual = excess)",
    ))
}

/// Parameter map helper shared by the identity evaluators.
pub fn sieve_params_map(q: f64, h: f64, c: usize, e_cut: usize) -> BTreeMap<String, String> {
    params(&[
        ("Q", format!("{q}")),
        ("H", format!("{h}")),
        ("C", c.to_string()),
        ("E", e_cut.to_string()),
    ])
}
