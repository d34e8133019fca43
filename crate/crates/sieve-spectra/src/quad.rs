//! Adaptive Gauss-Legendre quadrature.
//!
//! A fixed 20-point rule is paired with interval bisection: an interval is
//! accepted when the rule applied to the whole interval agrees with the sum
//! over its two halves. This converges at machine rate on smooth pieces;
//! callers with known interior kinks (sawtooth points, kernel breakpoints)
//! are expected to split at them first.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial from the usual
/// Chebyshev-like initial guesses; accurate to machine precision.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const ADAPTIVE_ORDER: usize = 20;
const MAX_DEPTH: usize = 40;

fn fixed_rule<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let mid = 0.5 * (a + b);
    let scale = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + scale * x);
    }
    sum * scale
}

/// Integrate `f` on the fixed n-point rule, no adaptivity.
pub fn fixed_quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre_rule(n);
    fixed_rule(&mut f, a, b, &nodes, &weights)
}

/// Adaptive Gauss-Legendre integration of `f` over [a, b] to absolute
/// tolerance `tol`. Errors with the achieved residual when bisection
/// bottoms out.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (nodes, weights) = gauss_legendre_rule(ADAPTIVE_ORDER);
    let whole = fixed_rule(&mut f, a, b, &nodes, &weights);
    adaptive_step(&mut f, a, b, whole, tol, MAX_DEPTH, &nodes, &weights)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    nodes: &[f64],
    weights: &[f64],
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = fixed_rule(f, a, mid, nodes, weights);
    let right = fixed_rule(f, mid, b, nodes, weights);
    let err = (left + right - whole).abs();
    if err <= tol {
        return Ok(left + right);
    }
    if depth == 0 {
        return Err(Error::Quadrature {
            detail: format!("interval [{a}, {b}] at max depth"),
            residual: err,
        });
    }
    let half_tol = 0.5 * tol;
    let l = adaptive_step(f, a, mid, left, half_tol, depth - 1, nodes, weights)?;
    let r = adaptive_step(f, mid, b, right, half_tol, depth - 1, nodes, weights)?;
    Ok(l + r)
}

/// Adaptive quadrature of a complex-valued integrand (both parts driven by
/// the same bisection).
pub fn adaptive_quad_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (nodes, weights) = gauss_legendre_rule(ADAPTIVE_ORDER);
    let rule = |f: &mut F, a: f64, b: f64| -> Complex64 {
        let mid = 0.5 * (a + b);
        let scale = 0.5 * (b - a);
        let mut sum = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(&weights) {
            sum += f(mid + scale * x) * *w;
        }
        sum * scale
    };
    // Iterative worklist, mirrors the real-valued version.
    let mut total = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, rule(&mut f, a, b), tol, MAX_DEPTH)];
    while let Some((a, b, whole, tol, depth)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let left = rule(&mut f, a, mid);
        let right = rule(&mut f, mid, b);
        let err = (left + right - whole).norm();
        if err <= tol {
            total += left + right;
        } else if depth == 0 {
            return Err(Error::Quadrature {
                detail: format!("complex integrand on [{a}, {b}] at max depth"),
                residual: err,
            });
        } else {
            stack.push((a, mid, left, 0.5 * tol, depth - 1));
            stack.push((mid, b, right, 0.5 * tol, depth - 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // 20-point rule is exact through degree 39.
        let val = fixed_quad(|x| x.powi(12) - 3.0 * x.powi(5) + 1.0, -1.0, 1.0, 20);
        let exact = 2.0 / 13.0 + 2.0;
        assert!((val - exact).abs() < 1e-14);
    }

    #[test]
    fn nodes_symmetric_and_weights_sum_to_two() {
        for n in [4, 11, 20, 33] {
            let (x, w) = gauss_legendre_rule(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let val = adaptive_quad(|x| (40.0 * x).sin(), 0.0, 1.0, 1e-12).unwrap();
        let exact = (1.0 - (40.0f64).cos()) / 40.0;
        assert!((val - exact).abs() < 1e-11);
    }

    #[test]
    fn adaptive_complex_matches_parts() {
        let val = adaptive_quad_complex(
            |x| Complex64::new((3.0 * x).cos(), (3.0 * x).sin()),
            0.0,
            2.0,
            1e-12,
        )
        .unwrap();
        let exact = Complex64::new((6.0f64).sin() / 3.0, (1.0 - (6.0f64).cos()) / 3.0);
        assert!((val - exact).norm() < 1e-11);
    }
}
