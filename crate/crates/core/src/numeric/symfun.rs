//! Test functions with exact derivatives and exact boundary values.
//!
//! A function is a finite sum of `c · π^p · x^d · t(kπx)` with `t` one of `1`,
//! `sin`, `cos` and `c` Gaussian rational. Boundary values are polynomials in `π`
//! with Gaussian rational coefficients, and since `π` is transcendental such a value
//! vanishes iff every coefficient does. Domain membership is therefore decided
//! exactly; only integrals are floating point.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, ToPrimitive, Zero};

use crate::boundary::Endpoint;
use crate::domain::ScalarDomain;
use crate::expr::FormalExpr;
use crate::gauss::GQ;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    One,
    Sin(u32),
    Cos(u32),
}

/// `Σ c_p π^p`.
pub type PiPoly = BTreeMap<u32, GQ>;

fn pi_add(acc: &mut PiPoly, p: u32, c: &GQ) {
    let e = acc.entry(p).or_insert_with(GQ::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&p);
    }
}

#[derive(Clone, Default, PartialEq)]
pub struct SymbolicFunction {
    /// `(trig, x-degree, π-power) → coefficient`, zero coefficients never stored.
    terms: BTreeMap<(Trig, u32, u32), GQ>,
}

impl SymbolicFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    fn with_term(mut self, key: (Trig, u32, u32), c: &GQ) -> Self {
        self.add_term(key, c);
        self
    }

    fn add_term(&mut self, key: (Trig, u32, u32), c: &GQ) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(GQ::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `Σ coeffs[d] x^d`.
    pub fn polynomial(coeffs: &[GQ]) -> Self {
        let mut f = Self::zero();
        for (d, c) in coeffs.iter().enumerate() {
            f.add_term((Trig::One, d as u32, 0), c);
        }
        f
    }

    pub fn monomial(c: GQ, d: u32) -> Self {
        Self::zero().with_term((Trig::One, d, 0), &c)
    }

    pub fn sin(k: u32) -> Self {
        assert!(k >= 1);
        Self::zero().with_term((Trig::Sin(k), 0, 0), &GQ::one())
    }

    pub fn cos(k: u32) -> Self {
        assert!(k >= 1);
        Self::zero().with_term((Trig::Cos(k), 0, 0), &GQ::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c);
        }
        out
    }

    pub fn scale(&self, c: &GQ) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    /// Product with the polynomial `Σ coeffs[d] x^d`.
    pub fn mul_poly(&self, coeffs: &[GQ]) -> Self {
        let mut out = Self::zero();
        for (&(t, d, p), v) in &self.terms {
            for (e, c) in coeffs.iter().enumerate() {
                out.add_term((t, d + e as u32, p), &(v * c));
            }
        }
        out
    }

    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&(t, d, p), c) in &self.terms {
            if d > 0 {
                out.add_term((t, d - 1, p), &(c * &GQ::int(d as i64)));
            }
            match t {
                Trig::One => {}
                Trig::Sin(k) => out.add_term((Trig::Cos(k), d, p + 1), &(c * &GQ::int(k as i64))),
                Trig::Cos(k) => out.add_term((Trig::Sin(k), d, p + 1), &(c * &GQ::int(-(k as i64)))),
            }
        }
        out
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// `τf`.
    pub fn apply(&self, e: &FormalExpr) -> Self {
        let mut out = Self::zero();
        let mut dk = self.clone();
        for (k, c) in e.coeffs().iter().enumerate() {
            if k > 0 {
                dk = dk.derivative();
            }
            out = out.add(&dk.scale(c));
        }
        out
    }

    pub fn value_at(&self, end: Endpoint) -> PiPoly {
        let mut out = PiPoly::new();
        for (&(t, d, p), c) in &self.terms {
            let v = match (end, t) {
                (Endpoint::Left, _) if d > 0 => continue,
                (_, Trig::Sin(_)) => continue,
                (_, Trig::One) | (Endpoint::Left, Trig::Cos(_)) => c.clone(),
                (Endpoint::Right, Trig::Cos(k)) => {
                    if k % 2 == 0 {
                        c.clone()
                    } else {
                        -c
                    }
                }
            };
            pi_add(&mut out, p, &v);
        }
        out
    }

    /// `β(f)` for Sobolev order `n`, indexed as in [`crate::boundary::Layout`].
    pub fn jet(&self, n: usize) -> Vec<PiPoly> {
        let derivs: Vec<Self> = std::iter::successors(Some(self.clone()), |f| Some(f.derivative())).take(n).collect();
        let mut out = Vec::with_capacity(2 * n);
        for end in [Endpoint::Left, Endpoint::Right] {
            for f in &derivs {
                out.push(f.value_at(end));
            }
        }
        out
    }

    /// Exact membership in a domain; smooth functions lie in every `H^n`.
    pub fn in_domain(&self, dom: &ScalarDomain) -> bool {
        let n = dom.sobolev();
        if n == 0 {
            return true;
        }
        let jet = self.jet(n);
        dom.bc().matrix().rows().iter().all(|row| {
            let mut acc = PiPoly::new();
            for (u, v) in row.iter().zip(&jet) {
                if u.is_zero() {
                    continue;
                }
                for (p, c) in v {
                    pi_add(&mut acc, *p, &(u * c));
                }
            }
            acc.is_empty()
        })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.values(&[x])[0]
    }

    /// Values at `xs`. Each polynomial factor is summed exactly at the node (nodes are
    /// dyadic rationals) and rounded once, so expanded products like `x^n (1−x)^n`
    /// do not cancel catastrophically.
    pub fn values(&self, xs: &[f64]) -> Vec<Complex64> {
        let groups = self.integer_groups();
        let pi = std::f64::consts::PI;
        xs.iter()
            .map(|&x| {
                groups
                    .iter()
                    .map(|g| {
                        let tv = match g.trig {
                            Trig::One => 1.0,
                            Trig::Sin(k) => (k as f64 * pi * x).sin(),
                            Trig::Cos(k) => (k as f64 * pi * x).cos(),
                        };
                        g.eval(x) * (pi.powi(g.pi_power as i32) * tv)
                    })
                    .sum()
            })
            .collect()
    }

    fn integer_groups(&self) -> Vec<IntegerPoly> {
        let mut by_key: BTreeMap<(Trig, u32), Vec<(u32, &GQ)>> = BTreeMap::new();
        for (&(t, d, p), c) in &self.terms {
            by_key.entry((t, p)).or_default().push((d, c));
        }
        by_key
            .into_iter()
            .map(|((trig, pi_power), cs)| {
                let denom = cs.iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.re.denom()).lcm(c.im.denom()));
                let degree = cs.iter().map(|(d, _)| *d as usize).max().unwrap_or(0);
                let (mut re, mut im) = (vec![BigInt::zero(); degree + 1], vec![BigInt::zero(); degree + 1]);
                for (d, c) in cs {
                    re[d as usize] = c.re.numer() * (&denom / c.re.denom());
                    im[d as usize] = c.im.numer() * (&denom / c.im.denom());
                }
                IntegerPoly { trig, pi_power, denom, re, im }
            })
            .collect()
    }
}

/// `(Σ re_d x^d + i Σ im_d x^d) / denom` with integer coefficients.
struct IntegerPoly {
    trig: Trig,
    pi_power: u32,
    denom: BigInt,
    re: Vec<BigInt>,
    im: Vec<BigInt>,
}

impl IntegerPoly {
    fn eval(&self, x: f64) -> Complex64 {
        if x == 0.0 {
            let d = BigRational::new_raw(BigInt::one(), self.denom.clone());
            let v = |c: &BigInt| (BigRational::from_integer(c.clone()) * &d).to_f64().unwrap_or(f64::NAN);
            return Complex64::new(v(&self.re[0]), v(&self.im[0]));
        }
        // x = m · 2^exp exactly; with e = -exp, 2^(eD) P(x) = Σ c_d m^d 2^(e(D-d)).
        let (mantissa, exp, sign) = x.integer_decode();
        let m = BigInt::from(sign as i64 * mantissa as i64);
        let degree = self.re.len() - 1;
        let horner = |cs: &[BigInt]| -> BigRational {
            if exp >= 0 {
                let xi = &m << exp as usize;
                let v = cs.iter().rev().fold(BigInt::zero(), |acc, c| acc * &xi + c);
                return BigRational::new_raw(v, self.denom.clone());
            }
            let e = (-exp) as usize;
            let mut acc = cs[degree].clone();
            for d in (0..degree).rev() {
                acc = acc * &m + (&cs[d] << (e * (degree - d)));
            }
            BigRational::new_raw(acc, &self.denom << (e * degree))
        };
        let f = |r: BigRational| r.to_f64().unwrap_or(f64::NAN);
        Complex64::new(f(horner(&self.re)), f(horner(&self.im)))
    }
}

impl fmt::Display for SymbolicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(t, d, p), c)| {
                let mut s = format!("({c})");
                if p > 0 {
                    s.push_str(&format!("·π^{p}"));
                }
                if d > 0 {
                    s.push_str(&format!("·x^{d}"));
                }
                match t {
                    Trig::One => {}
                    Trig::Sin(k) => s.push_str(&format!("·sin({k}πx)")),
                    Trig::Cos(k) => s.push_str(&format!("·cos({k}πx)")),
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for SymbolicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
