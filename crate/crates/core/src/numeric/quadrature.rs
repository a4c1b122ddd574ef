//! Gauss–Legendre quadrature on (0,1).

use num_complex::Complex64;

/// Nodes and weights on (0,1). An `n`-point rule integrates polynomials of degree
/// `2n − 1` exactly.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1,1] to [0,1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    /// `∫ u v̄` from values at the nodes.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter().zip(v).zip(&self.weights).map(|((a, b), w)| a * b.conj() * *w).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let q = QuadratureRule::gauss_legendre(64);
        for deg in [0usize, 1, 5, 40, 127] {
            let v = q.integrate(|x| Complex64::new(x.powi(deg as i32), 0.0)).re;
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() <= 1e-13 * exact.max(1e-3), "degree {deg}: {v} vs {exact}");
        }
        let w: f64 = q.weights.iter().sum();
        assert!((w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trig_products() {
        let q = QuadratureRule::gauss_legendre(64);
        let pi = std::f64::consts::PI;
        let v = q.integrate(|x| Complex64::new((3.0 * pi * x).sin() * (2.0 * pi * x).cos(), 0.0)).re;
        // 3(1 - (-1)^5) / (π(9 - 4))
        assert!((v - 6.0 / (5.0 * pi)).abs() < 1e-14);
        let small = QuadratureRule::gauss_legendre(1);
        assert_eq!(small.nodes, vec![0.5]);
    }
}
