//! Constant-coefficient differential expressions `Σ c_k D^k` with Gaussian-rational
//! coefficients.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::GQ;

/// Highest derivative order any expression may carry.
pub const MAX_ORDER: usize = 4;

/// `coeffs[k]` multiplies `D^k`. Trailing zeros are stripped, so the zero
/// expression has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalExpr {
    coeffs: Vec<GQ>,
}

impl FormalExpr {
    pub fn new(mut coeffs: Vec<GQ>) -> Result<Self> {
        while coeffs.last().is_some_and(GQ::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_ORDER + 1 {
            return Err(Error::OrderCap { order: coeffs.len() - 1, cap: MAX_ORDER });
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: GQ) -> Self {
        Self::new(vec![c]).unwrap()
    }

    pub fn identity() -> Self {
        Self::constant(GQ::one())
    }

    /// `c·D^k`.
    pub fn monomial(c: GQ, k: usize) -> Result<Self> {
        let mut v = vec![GQ::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Derivative order; the zero expression and constants have order 0.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> GQ {
        self.coeffs.get(k).cloned().unwrap_or_else(GQ::zero)
    }

    pub fn coeffs(&self) -> &[GQ] {
        &self.coeffs
    }

    pub fn leading(&self) -> GQ {
        self.coeffs.last().cloned().unwrap_or_else(GQ::zero)
    }

    pub fn add(&self, other: &FormalExpr) -> FormalExpr {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        FormalExpr::new(v).expect("sum stays within the order cap")
    }

    pub fn scale(&self, c: &GQ) -> FormalExpr {
        FormalExpr::new(self.coeffs.iter().map(|v| v * c).collect()).unwrap()
    }

    pub fn neg(&self) -> FormalExpr {
        self.scale(&GQ::int(-1))
    }

    /// `self ∘ other`; constant coefficients commute so this is polynomial multiplication.
    pub fn compose(&self, other: &FormalExpr) -> Result<FormalExpr> {
        if self.is_zero() || other.is_zero() {
            return Ok(FormalExpr::zero());
        }
        let order = self.order() + other.order();
        if order > MAX_ORDER {
            return Err(Error::OrderCap { order, cap: MAX_ORDER });
        }
        let mut v = vec![GQ::zero(); order + 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            for (k, b) in other.coeffs.iter().enumerate() {
                v[j + k] += &(a * b);
            }
        }
        FormalExpr::new(v)
    }

    /// Formal (Lagrange) adjoint `Σ (-1)^k conj(c_k) D^k`.
    pub fn lagrange_adjoint(&self) -> FormalExpr {
        let v = self.coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 0 { c.conj() } else { -c.conj() }).collect();
        FormalExpr::new(v).unwrap()
    }

    pub fn is_formally_self_adjoint(&self) -> bool {
        self.lagrange_adjoint() == *self
    }
}

fn fmt_coeff_term(c: &GQ, k: usize, first: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let compound = !c.re.is_zero() && !c.im.is_zero();
    let (negative, mag) = if !compound && (c.re.is_negative() || (c.re.is_zero() && c.im.is_negative())) {
        (true, -c)
    } else {
        (false, c.clone())
    };
    if first {
        if negative {
            write!(f, "-")?;
        }
    } else if negative {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let mag_txt = if compound { format!("({mag})") } else { mag.to_string() };
    match k {
        0 => write!(f, "{mag_txt}"),
        _ => {
            if !mag.is_one() {
                write!(f, "{mag_txt}")?;
            }
            if k == 1 {
                write!(f, "D")
            } else {
                write!(f, "D^{k}")
            }
        }
    }
}

/// Highest order first, e.g. `-D^2`, `iD`, `(2+i)D^2 + 3D - 1`, `0`.
impl fmt::Display for FormalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            fmt_coeff_term(c, k, first, f)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for FormalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GQ {
        s.parse().unwrap()
    }

    fn mono(c: &str, k: usize) -> FormalExpr {
        FormalExpr::monomial(g(c), k).unwrap()
    }

    #[test]
    fn lagrange_adjoint_catalog() {
        assert_eq!(mono("-1", 2).lagrange_adjoint(), mono("-1", 2));
        assert_eq!(mono("i", 1).lagrange_adjoint(), mono("i", 1));
        assert_eq!(mono("2+i", 2).lagrange_adjoint(), mono("2-i", 2));
        // D is formally skew
        assert_eq!(mono("1", 1).lagrange_adjoint(), mono("-1", 1));
    }

    #[test]
    fn compose_and_cap() {
        let m = mono("i", 1);
        assert_eq!(m.compose(&m).unwrap(), mono("-1", 2));
        let l = mono("-1", 2);
        assert_eq!(l.compose(&m).unwrap(), mono("-i", 3));
        assert!(l.compose(&l).is_ok());
        assert!(matches!(l.compose(&mono("1", 3)), Err(Error::OrderCap { .. })));
        assert!(FormalExpr::monomial(GQ::one(), 5).is_err());
    }

    #[test]
    fn canonical_and_display() {
        let e = FormalExpr::new(vec![g("-1"), g("3"), g("2+i"), GQ::zero()]).unwrap();
        assert_eq!(e.order(), 2);
        assert_eq!(e.to_string(), "(2+i)D^2 + 3D - 1");
        assert_eq!(mono("-1", 2).to_string(), "-D^2");
        assert_eq!(mono("i", 1).to_string(), "iD");
        assert_eq!(mono("-i", 3).to_string(), "-iD^3");
        assert_eq!(FormalExpr::zero().to_string(), "0");
        assert_eq!(mono("1", 2).add(&mono("-1", 2)), FormalExpr::zero());
    }
}
