//! Polynomial and piecewise-cubic interpolation helpers.

/// Derivative weights of the Lagrange interpolant through `nodes`, evaluated
/// at `at` (Fornberg's recursion).
///
/// Returns `weights[d][k]`: the `d`-th derivative of the interpolating
/// polynomial at `at` is `Σ_k weights[d][k] · f(nodes[k])`, for
/// `d = 0..=max_order`. Returns `None` when two nodes coincide.
pub fn lagrange_derivative_weights(nodes: &[f64], at: f64, max_order: usize) -> Option<Vec<Vec<f64>>> {
    let n = nodes.len();
    let mut flat = vec![0.0; n * (max_order + 1)];
    if !lagrange_weights_into(nodes, at, max_order, &mut flat) {
        return None;
    }
    Some(flat.chunks(n).map(|c| c.to_vec()).collect())
}

/// Allocation-free form of [`lagrange_derivative_weights`]: `out[d * n + k]`
/// receives the weight of node `k` for derivative `d`. `out` must hold at
/// least `n * (max_order + 1)` values. Returns `false` when two nodes
/// coincide.
pub fn lagrange_weights_into(nodes: &[f64], at: f64, max_order: usize, out: &mut [f64]) -> bool {
    let n = nodes.len();
    let c = &mut out[..n * (max_order + 1)];
    c.fill(0.0);
    c[0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - at;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - at;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            if c3 == 0.0 {
                return false;
            }
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k * n + i] = c1 * (k as f64 * c[(k - 1) * n + i - 1] - c5 * c[k * n + i - 1]) / c2;
                }
                c[i] = -c1 * c5 * c[i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k * n + j] = (c4 * c[k * n + j] - k as f64 * c[(k - 1) * n + j]) / c3;
            }
            c[j] = c4 * c[j] / c3;
        }
        c1 = c2;
    }
    true
}

/// First index of the `width`-point window centred on `j`, shifted inward at
/// the ends of an `n`-point sequence.
pub fn stencil_start(j: usize, width: usize, n: usize) -> usize {
    let half = width / 2;
    j.saturating_sub(half).min(n - width)
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
///
/// Preserves monotonicity of the data between knots, so non-negative
/// samples never produce negative values.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` must be strictly increasing with at least two points.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Option<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Some(Self { xs, ys, slopes })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value at `x`; `None` outside the knot range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Some(
            h00 * self.ys[i]
                + h10 * h * self.slopes[i]
                + h01 * self.ys[i + 1]
                + h11 * h * self.slopes[i + 1],
        )
    }
}

// Three-point one-sided end slope, limited to keep the end monotone.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent route: build each Lagrange basis polynomial's coefficients
    // by expanding the product, then differentiate the monomials.
    fn basis_derivative(nodes: &[f64], k: usize, at: f64, order: usize) -> f64 {
        let mut coeffs = vec![1.0];
        let mut denom = 1.0;
        for (i, &xi) in nodes.iter().enumerate() {
            if i == k {
                continue;
            }
            let mut next = vec![0.0; coeffs.len() + 1];
            for (p, &c) in coeffs.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * xi;
            }
            coeffs = next;
            denom *= nodes[k] - xi;
        }
        let mut sum = 0.0;
        for (p, &c) in coeffs.iter().enumerate() {
            if p < order {
                continue;
            }
            let falling: f64 = (0..order).map(|r| (p - r) as f64).product();
            sum += c * falling * at.powi((p - order) as i32);
        }
        sum / denom
    }

    #[test]
    fn weights_match_expanded_basis() {
        let nodes = [-0.7, -0.2, 0.05, 0.4, 1.1];
        let at = 0.05;
        let w = lagrange_derivative_weights(&nodes, at, 2).unwrap();
        for d in 0..=2 {
            for k in 0..nodes.len() {
                let oracle = basis_derivative(&nodes, k, at, d);
                assert!((w[d][k] - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn uniform_five_point_second_derivative() {
        let w = lagrange_derivative_weights(&[-2.0, -1.0, 0.0, 1.0, 2.0], 0.0, 2).unwrap();
        let expected = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w[2].iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let expected1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w[1].iter().zip(expected1) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn repeated_node_is_degenerate() {
        assert!(lagrange_derivative_weights(&[0.0, 1.0, 1.0], 0.5, 2).is_none());
    }

    #[test]
    fn stencil_windows() {
        assert_eq!(stencil_start(0, 5, 10), 0);
        assert_eq!(stencil_start(1, 5, 10), 0);
        assert_eq!(stencil_start(4, 5, 10), 2);
        assert_eq!(stencil_start(9, 5, 10), 5);
        assert_eq!(stencil_start(8, 5, 10), 5);
    }

    #[test]
    fn monotone_cubic_reproduces_knots_and_stays_positive() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| if *x < 2.0 { 0.0 } else { 1.0 }).collect();
        let f = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(f.eval(*x).unwrap(), *y);
        }
        for i in 0..=570 {
            let v = f.eval(i as f64 * 0.01).unwrap();
            assert!((0.0..=1.0).contains(&v), "{v}");
        }
        assert!(f.eval(-0.1).is_none());
        assert!(f.eval(5.8).is_none());
    }

    #[test]
    fn monotone_cubic_accuracy_on_smooth_data() {
        let xs: Vec<f64> = (0..201).map(|i| -4.0 + i as f64 * 0.04).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        let f = MonotoneCubic::new(xs, ys).unwrap();
        for i in 0..400 {
            let x = -3.99 + i as f64 * 0.0199;
            assert!((f.eval(x).unwrap() - (-x * x).exp()).abs() < 3e-4);
        }
    }
}
