//! Uniform-grid quadrature and finite-difference stencils.

use std::ops::{Add, Mul, Sub};

use crate::error::{GeometryError, Result};

/// Values that can be combined linearly (reals and vectors).
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Running integral `F(s_k) = c0 + int_{s_0}^{s_k} f ds` on a uniform grid of spacing `h`.
///
/// Each cell uses the four-point cubic rule (`-1, 13, 13, -1` / 24), with the
/// matching one-sided rules in the first and last cell, so every prefix is
/// fourth-order accurate and even and odd nodes carry the same error. Three-node
/// grids fall back to the quadratic rules.
pub fn cumulative_integral<T: Linear>(values: &[T], h: f64, c0: T) -> Result<Vec<T>> {
    let n = values.len();
    if n < 3 {
        return Err(GeometryError::GridTooSmall { len: n, min: 3 });
    }
    let f = values;
    let zero = f[0] * 0.0;
    let mut out = Vec::with_capacity(n);
    out.push(c0);
    let mut acc = zero;
    for k in 1..n {
        let cell = if n == 3 {
            if k == 1 {
                (f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12.0)
            } else {
                (f[2] * 5.0 + f[1] * 8.0 - f[0]) * (h / 12.0)
            }
        } else if k == 1 {
            (f[0] * 9.0 + f[1] * 19.0 - f[2] * 5.0 + f[3]) * (h / 24.0)
        } else if k == n - 1 {
            (f[n - 4] - f[n - 3] * 5.0 + f[n - 2] * 19.0 + f[n - 1] * 9.0) * (h / 24.0)
        } else {
            ((f[k - 1] + f[k]) * 13.0 - f[k - 2] - f[k + 1]) * (h / 24.0)
        };
        acc = acc + cell;
        out.push(c0 + acc);
    }
    Ok(out)
}

/// First derivative: fourth-order central differences in the interior,
/// second-order one-sided differences at the two outermost nodes of each end.
pub fn derivative<T: Linear>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "derivative stencil needs at least 5 nodes, got {n}");
    let mut out = Vec::with_capacity(n);
    let fwd = |i: usize| (f[i + 1] * 4.0 - f[i] * 3.0 - f[i + 2]) * (1.0 / (2.0 * h));
    let bwd = |i: usize| (f[i] * 3.0 - f[i - 1] * 4.0 + f[i - 2]) * (1.0 / (2.0 * h));
    out.push(fwd(0));
    out.push(fwd(1));
    for i in 2..n - 2 {
        out.push((f[i - 2] - f[i + 2] + (f[i + 1] - f[i - 1]) * 8.0) * (1.0 / (12.0 * h)));
    }
    out.push(bwd(n - 2));
    out.push(bwd(n - 1));
    out
}

/// Stencil spacing for differentiating quantities that already carry a
/// second difference of sampled data. Roundoff in such data is near
/// `1e-10`, and a fourth-order first derivative balances that against
/// truncation at a spacing of a few hundredths.
pub const MEASURED_SPACING: f64 = 0.02;

/// Stride in nodes giving roughly [`MEASURED_SPACING`] on a grid of step `h`.
pub fn measured_stride(h: f64) -> usize {
    ((MEASURED_SPACING / h).round() as usize).max(1)
}

/// Nodes to drop at each end of a run of measured data so that a spaced
/// first derivative is central and clear of the one-sided rules that
/// produced the data.
pub fn measured_margin(stride: usize) -> usize {
    if stride <= 1 {
        2
    } else {
        4 * stride
    }
}

/// [`derivative`] with stencil spacing `m * h`. Fourth order everywhere,
/// using one-sided five-point rules within `2m` nodes of either end. `m` is
/// reduced if the grid is too short for it.
pub fn derivative_spaced<T: Linear>(f: &[T], h: f64, m: usize) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "derivative stencil needs at least 5 nodes, got {n}");
    let m = m.clamp(1, (n - 1) / 4);
    if m == 1 {
        return derivative(f, h);
    }
    let s = 1.0 / (12.0 * m as f64 * h);
    let one_sided = |i: usize, d: isize| {
        let at = |j: isize| f[(i as isize + d * j * m as isize) as usize];
        (at(1) * 48.0 - at(0) * 25.0 - at(2) * 36.0 + at(3) * 16.0 - at(4) * 3.0) * (s * d as f64)
    };
    (0..n)
        .map(|i| {
            if i < 2 * m {
                one_sided(i, 1)
            } else if i + 2 * m >= n {
                one_sided(i, -1)
            } else {
                (f[i - 2 * m] - f[i + 2 * m] + (f[i + m] - f[i - m]) * 8.0) * s
            }
        })
        .collect()
}

/// `kappa^2 (tau / kappa)' = kappa tau' - tau kappa'`, differenced at
/// stride `m`. Avoids differentiating the ratio, which is steep where
/// `kappa` is small.
pub fn ratio_wronskian(kappa: &[f64], tau: &[f64], h: f64, m: usize) -> Vec<f64> {
    let dk = derivative_spaced(kappa, h, m);
    let dt = derivative_spaced(tau, h, m);
    (0..kappa.len()).map(|k| kappa[k] * dt[k] - tau[k] * dk[k]).collect()
}

/// Second derivative with the same order layout as [`derivative`].
pub fn second_derivative<T: Linear>(f: &[T], h: f64) -> Vec<T> {
    let n = f.len();
    assert!(n >= 5, "second-derivative stencil needs at least 5 nodes, got {n}");
    let h2 = h * h;
    let fwd = |i: usize| (f[i] * 2.0 - f[i + 1] * 5.0 + f[i + 2] * 4.0 - f[i + 3]) * (1.0 / h2);
    let bwd = |i: usize| (f[i] * 2.0 - f[i - 1] * 5.0 + f[i - 2] * 4.0 - f[i - 3]) * (1.0 / h2);
    let mut out = Vec::with_capacity(n);
    out.push(fwd(0));
    out.push(fwd(1));
    for i in 2..n - 2 {
        out.push(
            ((f[i - 1] + f[i + 1]) * 16.0 - f[i - 2] - f[i + 2] - f[i] * 30.0) * (1.0 / (12.0 * h2)),
        );
    }
    out.push(bwd(n - 2));
    out.push(bwd(n - 1));
    out
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(GeometryError::GridTooSmall { len: n, min: 2 });
        }
        if let Some(k) = (1..n).find(|&k| x[k] <= x[k - 1]) {
            return Err(GeometryError::NonMonotone { node: k });
        }
        let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for k in 1..n - 1 {
            m[k] = if d[k - 1] * d[k] <= 0.0 { 0.0 } else { 0.5 * (d[k - 1] + d[k]) };
        }
        for k in 0..n - 1 {
            if d[k] == 0.0 {
                m[k] = 0.0;
                m[k + 1] = 0.0;
                continue;
            }
            let a = m[k] / d[k];
            let b = m[k + 1] / d[k];
            let r = a * a + b * b;
            if r > 9.0 {
                let t = 3.0 / r.sqrt();
                m[k] = t * a * d[k];
                m[k + 1] = t * b * d[k];
            }
        }
        Ok(MonotoneCubic { x, y, m })
    }

    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        let k = match self.x.partition_point(|&v| v <= xq) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.m[k] + h01 * self.y[k + 1] + h11 * h * self.m[k + 1]
    }
}

/// Five-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    r * NODES.iter().zip(WEIGHTS).map(|(&x, w)| w * f(c + r * x)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn grid(a: f64, b: f64, n: usize) -> (Vec<f64>, f64) {
        let h = (b - a) / n as f64;
        ((0..=n).map(|k| a + h * k as f64).collect(), h)
    }

    #[test]
    fn integral_of_constant() {
        let (s, h) = grid(0.0, 1.0, 10);
        let f = cumulative_integral(&vec![1.0; s.len()], h, 0.0).unwrap();
        assert!((f[10] - 1.0).abs() < 1e-12);
        for (k, v) in f.iter().enumerate() {
            assert!((v - s[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_of_cosine() {
        let (s, h) = grid(0.0, FRAC_PI_2, 200);
        let vals: Vec<f64> = s.iter().map(|x| x.cos()).collect();
        let f = cumulative_integral(&vals, h, 0.0).unwrap();
        assert!((f[200] - 1.0).abs() < 1e-8);
        // every prefix, not only the endpoint
        let worst = s.iter().zip(&f).map(|(x, v)| (v - x.sin()).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn constant_of_integration_is_exact() {
        let vals = [0.3, -1.2, 4.0, 2.5, 0.1];
        let f = cumulative_integral(&vals, 0.1, 5.0).unwrap();
        let g = cumulative_integral(&vals, 0.1, 0.0).unwrap();
        assert_eq!(f[0], 5.0);
        for (a, b) in f.iter().zip(&g) {
            assert_eq!(*a, 5.0 + *b);
        }
    }

    #[test]
    fn tiny_grids() {
        assert!(matches!(
            cumulative_integral(&[1.0, 2.0], 0.1, 0.0),
            Err(GeometryError::GridTooSmall { .. })
        ));
        let f = cumulative_integral(&[0.0, 1.0, 4.0], 1.0, 0.0).unwrap();
        // x^2 on [0,2]: quadratic rules are exact
        assert!((f[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((f[2] - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn stencils_are_fourth_order() {
        // halving h should cut the interior error by ~16
        let err = |n: usize| {
            let (s, h) = grid(0.0, 2.0, n);
            let f: Vec<f64> = s.iter().map(|x| x.sin()).collect();
            let d = derivative(&f, h);
            let dd = second_derivative(&f, h);
            let e1 = (2..n - 1).map(|i| (d[i] - s[i].cos()).abs()).fold(0.0, f64::max);
            let e2 = (2..n - 1).map(|i| (dd[i] + s[i].sin()).abs()).fold(0.0, f64::max);
            (e1, e2)
        };
        let (a1, a2) = err(40);
        let (b1, b2) = err(80);
        assert!(a1 / b1 > 12.0, "{a1} {b1}");
        assert!(a2 / b2 > 12.0, "{a2} {b2}");
    }

    #[test]
    fn stencils_exact_on_low_degree() {
        let h = 0.25;
        let f: Vec<f64> = (0..9).map(|k| (k as f64 * h).powi(2)).collect();
        let d = derivative(&f, h);
        let dd = second_derivative(&f, h);
        for k in 0..9 {
            assert!((d[k] - 2.0 * k as f64 * h).abs() < 1e-12);
            assert!((dd[k] - 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn monotone_cubic_interpolates_and_preserves_order() {
        let x: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let p = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((p.eval(*a) - b).abs() < 1e-14);
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..400 {
            let v = p.eval(k as f64 * 1.9 / 400.0);
            assert!(v >= prev);
            prev = v;
        }
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn gauss_legendre_exact_for_degree_nine() {
        let v = gauss_legendre5(|x| x.powi(9) + x.powi(4), 0.0, 1.0);
        assert!((v - (0.1 + 0.2)).abs() < 1e-15);
    }
}
