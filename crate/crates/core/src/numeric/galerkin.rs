//! Galerkin models on sine and cosine bases.
//!
//! The sine basis `√2 sin(kπx)`, `k ≥ 1`, lies in a domain iff its boundary rows
//! only involve even derivatives; the cosine basis `1, √2 cos(kπx)` iff they only
//! involve odd derivatives. Matrix entries `⟨τ e_k, e_j⟩` are computed in closed form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symfun::Trig;
use super::trig::{integral, TrigSeries};
use crate::block::BlockOperator;
use crate::boundary::Layout;
use crate::domain::ScalarDomain;
use crate::error::{Error, Result};
use crate::expr::FormalExpr;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Sine,
    Cosine,
}

impl Basis {
    /// Frequency of the `idx`-th basis function.
    pub fn mode(self, idx: usize) -> u32 {
        match self {
            Basis::Sine => idx as u32 + 1,
            Basis::Cosine => idx as u32,
        }
    }

    fn wave(self, k: u32) -> Trig {
        match (self, k) {
            (Basis::Sine, k) => Trig::Sin(k),
            (Basis::Cosine, 0) => Trig::One,
            (Basis::Cosine, k) => Trig::Cos(k),
        }
    }

    fn weight(self, k: u32) -> f64 {
        if self == Basis::Cosine && k == 0 {
            1.0
        } else {
            std::f64::consts::SQRT_2
        }
    }

    pub fn compatible(self, dom: &ScalarDomain) -> bool {
        let layout = Layout::new(dom.sobolev());
        dom.bc().matrix().rows().iter().all(|row| {
            row.iter().enumerate().all(|(idx, v)| {
                let (_, j) = layout.component(idx);
                let forbidden = match self {
                    Basis::Sine => j % 2 == 1,
                    Basis::Cosine => j % 2 == 0,
                };
                !forbidden || v.is_zero()
            })
        })
    }

    /// First compatible basis, sine preferred.
    pub fn for_domain(dom: &ScalarDomain) -> Option<Basis> {
        [Basis::Sine, Basis::Cosine].into_iter().find(|b| b.compatible(dom))
    }

    /// Basis function `e_idx` as a series.
    pub fn function(self, idx: usize) -> TrigSeries {
        let k = self.mode(idx);
        let mut s = TrigSeries::default();
        s.add_term(self.wave(k), Complex64::new(self.weight(k), 0.0));
        s
    }

    /// `τ e_idx` as a series, in closed form.
    pub fn image(self, e: &FormalExpr, idx: usize) -> TrigSeries {
        let k = self.mode(idx);
        let w = self.weight(k);
        let kp = k as f64 * std::f64::consts::PI;
        // D^m sin = (kπ)^m sin(θ + mπ/2), D^m cos = (kπ)^m cos(θ + mπ/2)
        let (mut a_sin, mut a_cos) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (m, c) in e.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = c.to_c64() * kp.powi(m as i32) * w;
            let (s, co) = match (self, m % 4) {
                (Basis::Sine, 0) => (1.0, 0.0),
                (Basis::Sine, 1) => (0.0, 1.0),
                (Basis::Sine, 2) => (-1.0, 0.0),
                (Basis::Sine, _) => (0.0, -1.0),
                (Basis::Cosine, 0) => (0.0, 1.0),
                (Basis::Cosine, 1) => (-1.0, 0.0),
                (Basis::Cosine, 2) => (0.0, -1.0),
                (Basis::Cosine, _) => (1.0, 0.0),
            };
            a_sin += c * s;
            a_cos += c * co;
        }
        let mut out = TrigSeries::default();
        if k == 0 {
            out.add_term(Trig::One, a_cos);
        } else {
            out.add_term(Trig::Sin(k), a_sin);
            out.add_term(Trig::Cos(k), a_cos);
        }
        out
    }
}

/// `[⟨τ e_k, f_j⟩]` from `n` functions of `from` to `n` functions of `to`.
pub fn matrix(e: &FormalExpr, from: Basis, to: Basis, n: usize) -> CMatrix {
    let images: Vec<TrigSeries> = (0..n).map(|k| from.image(e, k)).collect();
    CMatrix::from_fn(n, n, |j, k| {
        let kj = to.mode(j);
        let tj = to.wave(kj);
        let wj = to.weight(kj);
        images[k].terms.iter().map(|(t, c)| c * integral(*t, tj) * wj).sum()
    })
}

/// Gram matrix `[⟨τ e_k, τ e_j⟩]` over the given basis indices.
pub fn gram(e: &FormalExpr, basis: Basis, idx: &[usize]) -> CMatrix {
    let images: Vec<TrigSeries> = idx.iter().map(|&k| basis.image(e, k)).collect();
    CMatrix::from_fn(idx.len(), idx.len(), |j, k| images[k].inner(&images[j]))
}

/// Galerkin model of a block: one basis per component, `n` functions each.
#[derive(Clone, Debug)]
pub struct BlockModel {
    pub bases: Vec<Basis>,
    pub n: usize,
    /// `(size·n) × (size·n)`, component-major.
    pub matrix: CMatrix,
}

impl BlockModel {
    pub fn new(block: &BlockOperator, n: usize) -> Result<Self> {
        let comps = block.induced_components();
        let mut bases = Vec::new();
        for (j, d) in comps.iter().enumerate() {
            let b = Basis::for_domain(d)
                .ok_or_else(|| Error::BasisIncompatible(format!("component {} has domain {d}", j + 1)))?;
            bases.push(b);
        }
        let size = block.size();
        let mut m = CMatrix::zeros(size * n, size * n);
        for r in 0..size {
            for c in 0..size {
                let e = block.entry(r, c).expr();
                if e.is_zero() {
                    continue;
                }
                let g = matrix(e, bases[c], bases[r], n);
                m.view_mut((r * n, c * n), (n, n)).copy_from(&g);
            }
        }
        Ok(Self { bases, n, matrix: m })
    }

    pub fn block(&self, r: usize, c: usize) -> CMatrix {
        self.matrix.view((r * self.n, c * self.n), (self.n, self.n)).into_owned()
    }

    /// `‖G − G*‖_F / ‖G‖_F`, zero for the zero matrix.
    pub fn hermitian_defect(&self) -> f64 {
        let norm = self.matrix.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.matrix - self.matrix.adjoint()).norm() / norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_op::builtin;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn compatibility() {
        let d = |n: &str| builtin(n).unwrap().dom().clone();
        assert_eq!(Basis::for_domain(&d("LD")), Some(Basis::Sine));
        assert_eq!(Basis::for_domain(&d("LN")), Some(Basis::Cosine));
        assert_eq!(Basis::for_domain(&d("L0")), None);
        assert_eq!(Basis::for_domain(&d("M")), Some(Basis::Sine));
        assert!(Basis::Cosine.compatible(&d("Mstar")));
    }

    #[test]
    fn first_order_sine_entries() {
        let m0 = builtin("M0").unwrap();
        let g = matrix(m0.expr(), Basis::Sine, Basis::Sine, 6);
        for j in 1..=6i32 {
            for k in 1..=6i32 {
                let want = if j == k {
                    0.0
                } else {
                    2.0 * (j * k) as f64 * (1 - (-1i32).pow((j + k) as u32)) as f64 / (j * j - k * k) as f64
                };
                let got = g[((j - 1) as usize, (k - 1) as usize)];
                assert!((got - c(0.0, want)).norm() < 1e-12, "{j},{k}: {got}");
            }
        }
        assert!(((&g - g.adjoint()).norm()) < 1e-12);
    }

    #[test]
    fn second_order_is_diagonal() {
        let ld = builtin("LD").unwrap();
        let g = matrix(ld.expr(), Basis::Sine, Basis::Sine, 4);
        let pi = std::f64::consts::PI;
        for k in 0..4 {
            let want = ((k + 1) as f64 * pi).powi(2);
            assert!((g[(k, k)].re - want).abs() < 1e-9);
        }
        let ln = builtin("LN").unwrap();
        let g = matrix(ln.expr(), Basis::Cosine, Basis::Cosine, 3);
        assert!(g[(0, 0)].norm() < 1e-14);
        assert!((g[(1, 1)].re - pi * pi).abs() < 1e-9);
    }
}
