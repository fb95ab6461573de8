//! Fixed quadrature and collocation rules.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(16))
}

/// Chebyshev–Lobatto points `cos(πk/(n−1))` (descending) and the differentiation matrix.
pub struct Chebyshev {
    pub nodes: Vec<f64>,
    pub diff: DMatrix<f64>,
}

impl Chebyshev {
    pub fn new(n: usize) -> Self {
        let m = n - 1;
        let nodes: Vec<f64> = (0..n).map(|k| (PI * k as f64 / m as f64).cos()).collect();
        let c = |k: usize| (if k == 0 || k == m { 2.0 } else { 1.0 }) * if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut diff = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    diff[(i, j)] = c(i) / c(j) / (nodes[i] - nodes[j]);
                }
            }
        }
        // negative-sum trick for the diagonal
        for i in 0..n {
            let s: f64 = (0..n).filter(|&j| j != i).map(|j| diff[(i, j)]).sum();
            diff[(i, i)] = -s;
        }
        Self { nodes, diff }
    }
}

pub fn chebyshev(n: usize) -> &'static Chebyshev {
    static C16: OnceLock<Chebyshev> = OnceLock::new();
    static C24: OnceLock<Chebyshev> = OnceLock::new();
    match n {
        16 => C16.get_or_init(|| Chebyshev::new(16)),
        24 => C24.get_or_init(|| Chebyshev::new(24)),
        _ => panic!("no cached Chebyshev rule of size {n}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gl16();
        let exact = 2.0 / 31.0;
        let got: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((got - exact).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_differentiates_polynomials() {
        let c = chebyshev(16);
        let f: Vec<f64> = c.nodes.iter().map(|x| x.powi(5)).collect();
        for i in 0..16 {
            let d: f64 = (0..16).map(|j| c.diff[(i, j)] * f[j]).sum();
            assert!((d - 5.0 * c.nodes[i].powi(4)).abs() < 1e-11);
        }
    }
}
