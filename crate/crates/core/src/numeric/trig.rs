//! Exact integrals of trigonometric products on (0,1) and finite trig series.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::symfun::Trig;

/// `∫₀¹ s(jπx) t(kπx) dx` for `s, t ∈ {1, sin, cos}`; `Trig::One` stands for `cos(0)`.
pub fn integral(a: Trig, b: Trig) -> f64 {
    use std::f64::consts::PI;
    let wave = |t: Trig| match t {
        Trig::One => (false, 0u32),
        Trig::Sin(k) => (true, k),
        Trig::Cos(k) => (false, k),
    };
    let ((sa, j), (sb, k)) = (wave(a), wave(b));
    if (sa && j == 0) || (sb && k == 0) {
        return 0.0;
    }
    match (sa, sb) {
        (true, true) => {
            if j == k {
                0.5
            } else {
                0.0
            }
        }
        (false, false) => match (j, k) {
            (0, 0) => 1.0,
            _ if j == k => 0.5,
            _ => 0.0,
        },
        (true, false) => sin_cos(j, k, PI),
        (false, true) => sin_cos(k, j, PI),
    }
}

/// `∫ sin(jπx) cos(kπx)`.
fn sin_cos(j: u32, k: u32, pi: f64) -> f64 {
    if j == k {
        return 0.0;
    }
    let parity = if (j + k).is_multiple_of(2) { 0.0 } else { 2.0 };
    let (jf, kf) = (j as f64, k as f64);
    jf * parity / (pi * (jf * jf - kf * kf))
}

/// `Σ c_t t(x)` over `t ∈ {1, sin(kπx), cos(kπx)}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigSeries {
    pub terms: BTreeMap<Trig, Complex64>,
}

impl TrigSeries {
    pub fn add_term(&mut self, t: Trig, c: Complex64) {
        *self.terms.entry(t).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    /// `∫ u v̄`, exact up to rounding.
    pub fn inner(&self, other: &TrigSeries) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                let w = integral(*a, *b);
                if w != 0.0 {
                    acc += u * v.conj() * w;
                }
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quadrature::QuadratureRule;

    #[test]
    fn integrals_match_quadrature() {
        let q = QuadratureRule::gauss_legendre(64);
        let pi = std::f64::consts::PI;
        let ev = |t: Trig, x: f64| match t {
            Trig::One => 1.0,
            Trig::Sin(k) => (k as f64 * pi * x).sin(),
            Trig::Cos(k) => (k as f64 * pi * x).cos(),
        };
        let all: Vec<Trig> =
            std::iter::once(Trig::One).chain((1..5).flat_map(|k| [Trig::Sin(k), Trig::Cos(k)])).collect();
        for &a in &all {
            for &b in &all {
                let num = q.integrate(|x| Complex64::new(ev(a, x) * ev(b, x), 0.0)).re;
                assert!((num - integral(a, b)).abs() < 1e-13, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn series_norm() {
        let mut s = TrigSeries::default();
        s.add_term(Trig::Sin(1), Complex64::new(2f64.sqrt(), 0.0));
        s.add_term(Trig::Cos(2), Complex64::new(0.0, 2f64.sqrt()));
        assert!((s.norm() - 2f64.sqrt()).abs() < 1e-14);
    }
}
