//! Finite-difference weights and sampled-data quadrature on nonuniform nodes.

/// Fornberg weights for derivatives `0..=order` at `z` from the nodes `xs`.
///
/// Returns `w[k][j]`: the weight of sample `j` in the `k`-th derivative.
pub fn fd_weights(z: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Start index of a `width`-point stencil around node `i` clamped to `[0, n)`.
fn stencil_start(i: usize, n: usize, width: usize) -> usize {
    let half = width / 2;
    i.saturating_sub(half).min(n - width)
}

/// `order`-th derivative of sampled data using `width`-point stencils,
/// centered in the interior and one-sided near the ends.
pub fn derivative(xs: &[f64], ys: &[f64], order: usize, width: usize) -> Vec<f64> {
    let n = xs.len();
    assert_eq!(n, ys.len());
    assert!(width > order && width <= n, "stencil too wide for the data");
    (0..n)
        .map(|i| {
            let s = stencil_start(i, n, width);
            let w = fd_weights(xs[i], &xs[s..s + width], order);
            w[order]
                .iter()
                .zip(&ys[s..s + width])
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Quadrature weights of composite Simpson's rule on arbitrary increasing
/// nodes. Each pair of intervals is integrated by the interpolating parabola;
/// a trailing single interval reuses the parabola of the last three nodes.
pub fn simpson_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    if n == 2 {
        let h = xs[1] - xs[0];
        return vec![h / 2.0, h / 2.0];
    }
    let mut i = 0;
    while i + 2 < n {
        let (a, b, c) = parabola_weights(xs[i], xs[i + 1], xs[i + 2], xs[i], xs[i + 2]);
        w[i] += a;
        w[i + 1] += b;
        w[i + 2] += c;
        i += 2;
    }
    if i + 1 == n - 1 {
        // one interval left: integrate [x_{n-2}, x_{n-1}] with the last parabola
        let (a, b, c) = parabola_weights(xs[n - 3], xs[n - 2], xs[n - 1], xs[n - 2], xs[n - 1]);
        w[n - 3] += a;
        w[n - 2] += b;
        w[n - 1] += c;
    }
    w
}

/// Weights of the parabola through `(x0, x1, x2)` integrated over `[lo, hi]`.
fn parabola_weights(x0: f64, x1: f64, x2: f64, lo: f64, hi: f64) -> (f64, f64, f64) {
    // integral of the Lagrange basis polynomial l_j(x) = prod (x - x_k)/(x_j - x_k)
    let basis = |xj: f64, xa: f64, xb: f64| {
        let d = (xj - xa) * (xj - xb);
        let anti = |x: f64| x * x * x / 3.0 - (xa + xb) * x * x / 2.0 + xa * xb * x;
        (anti(hi) - anti(lo)) / d
    };
    (basis(x0, x1, x2), basis(x1, x0, x2), basis(x2, x0, x1))
}

/// Integral of sampled data by [`simpson_weights`].
pub fn integrate(xs: &[f64], ys: &[f64]) -> f64 {
    simpson_weights(xs).iter().zip(ys).map(|(w, y)| w * y).sum()
}

/// `n` points spaced geometrically between `lo` and `hi` (both included).
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Linear interpolation of `(xs, ys)` at `x`; clamps to the end intervals.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let k = match xs.partition_point(|&t| t <= x) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    };
    let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] + t * (ys[k + 1] - ys[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fornberg_reproduces_polynomials() {
        let xs = [0.0, 0.3, 0.7, 1.2, 2.0];
        let w = fd_weights(0.5, &xs, 2);
        let f = |x: f64| x.powi(4) - 2.0 * x.powi(2) + x;
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let d1: f64 = w[1].iter().zip(&ys).map(|(a, b)| a * b).sum();
        let d2: f64 = w[2].iter().zip(&ys).map(|(a, b)| a * b).sum();
        assert_relative_eq!(d1, 4.0 * 0.125 - 4.0 * 0.5 + 1.0, epsilon = 1e-12);
        assert_relative_eq!(d2, 12.0 * 0.25 - 4.0, epsilon = 1e-11);
    }

    #[test]
    fn simpson_is_exact_for_quadratics_on_uneven_panels() {
        let xs = [0.0, 0.1, 0.35, 0.5, 0.9];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - x).collect();
        assert_relative_eq!(integrate(&xs, &ys), 0.9f64.powi(3) - 0.81 / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn simpson_handles_odd_interval_count() {
        let xs = [0.0, 0.5, 1.0, 1.5];
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert_relative_eq!(integrate(&xs, &ys), 1.125, epsilon = 1e-13);
    }

    #[test]
    fn derivative_of_sine_converges() {
        let xs = geomspace(0.1, 1.0, 400);
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let d = derivative(&xs, &ys, 1, 5);
        for (x, dy) in xs.iter().zip(&d) {
            assert!((dy - x.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn interpolation_clamps() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 2.0, 3.0];
        assert_relative_eq!(interp_linear(&xs, &ys, 0.5), 1.0);
        assert_relative_eq!(interp_linear(&xs, &ys, 1.5), 2.5);
        assert_relative_eq!(interp_linear(&xs, &ys, 2.0), 3.0);
        assert_relative_eq!(interp_linear(&xs, &ys, -1.0), -2.0);
    }
}
