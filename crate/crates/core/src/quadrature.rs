//! Gauss-Legendre quadrature on intervals and iterated boxes.

use crate::error::{Error, Result};

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial P_n and its derivative at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of f over [a, b] with n Gauss-Legendre nodes.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite rule: `panels` sub-intervals with n nodes each.
pub fn integrate_composite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n: usize,
    panels: usize,
) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| integrate(&f, a + k as f64 * h, a + (k + 1) as f64 * h, n))
        .sum()
}

/// Triple integral over [a0,b0]x[a1,b1]x[a2,b2] with n nodes per axis.
pub fn integrate_box<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    lo: [f64; 3],
    hi: [f64; 3],
    n: usize,
) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])];
    let half = [0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1]), 0.5 * (hi[2] - lo[2])];
    let mut acc = 0.0;
    for (i, &xi) in xs.iter().enumerate() {
        let u = mid[0] + half[0] * xi;
        for (j, &xj) in xs.iter().enumerate() {
            let v = mid[1] + half[1] * xj;
            for (k, &xk) in xs.iter().enumerate() {
                let w = mid[2] + half[2] * xk;
                acc += ws[i] * ws[j] * ws[k] * f(u, v, w);
            }
        }
    }
    acc * half[0] * half[1] * half[2]
}

/// Triple integral with a refinement-doubling convergence test. Returns the
/// fine value once two levels agree to `rel_tol` relatively.
pub fn integrate_box_converged<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    lo: [f64; 3],
    hi: [f64; 3],
    n0: usize,
    rel_tol: f64,
) -> Result<f64> {
    let mut n = n0;
    let mut coarse = integrate_box(&f, lo, hi, n);
    for _ in 0..4 {
        n *= 2;
        let fine = integrate_box(&f, lo, hi, n);
        let scale = fine.abs().max(1e-300);
        if ((fine - coarse) / scale).abs() < rel_tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    let fine = integrate_box(&f, lo, hi, 2 * n);
    let diff = ((fine - coarse) / fine.abs().max(1e-300)).abs();
    if diff < rel_tol {
        Ok(fine)
    } else {
        Err(Error::QuadratureNotConverged { diff, tol: rel_tol })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1
        let v = integrate(|x| x.powi(7) - 3.0 * x.powi(4) + x, -1.0, 2.0, 8);
        let exact = |x: f64| x.powi(8) / 8.0 - 3.0 * x.powi(5) / 5.0 + x * x / 2.0;
        assert_abs_diff_eq!(v, exact(2.0) - exact(-1.0), epsilon = 1e-12);
    }

    #[test]
    fn composite_handles_oscillation() {
        let v = integrate_composite(|x: f64| (10.0 * x).sin(), 0.0, 1.0, 16, 8);
        let exact = (1.0 - (10.0f64).cos()) / 10.0;
        assert_abs_diff_eq!(v, exact, epsilon = 1e-12);
    }

    #[test]
    fn box_volume() {
        let v = integrate_box(|_, _, _| 1.0, [0.0; 3], [2.0, 3.0, 0.5], 4);
        assert_abs_diff_eq!(v, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn converged_integral() {
        let v = integrate_box_converged(
            |x, y, z| (x * y * z).exp(),
            [0.0; 3],
            [1.0; 3],
            8,
            1e-10,
        )
        .unwrap();
        // reference from a dense evaluation
        let dense = integrate_box(|x, y, z| (x * y * z).exp(), [0.0; 3], [1.0; 3], 64);
        assert_abs_diff_eq!(v, dense, epsilon = 1e-10);
    }
}
