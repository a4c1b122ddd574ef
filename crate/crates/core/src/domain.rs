//! Domains of the form `{f ∈ H^n(0,1) : U β(f) = 0}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boundary::{push_through, BCMatrix};
use crate::error::{Error, Result};
use crate::expr::FormalExpr;
use crate::linalg::Matrix;

/// Sobolev order plus boundary conditions over the matching layout.
///
/// Every such set contains `C_c^∞(0,1)`, so it is dense in `L²(0,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScalarDomain {
    sobolev: usize,
    bc: BCMatrix,
}

impl ScalarDomain {
    pub fn new(sobolev: usize, bc: BCMatrix) -> Result<Self> {
        if bc.order() != sobolev {
            return Err(Error::Dimension(format!(
                "conditions written for order {} attached to H^{sobolev}",
                bc.order()
            )));
        }
        Ok(Self { sobolev, bc })
    }

    /// `H^n(0,1)` without conditions; `n = 0` is the whole space.
    pub fn sobolev_space(n: usize) -> Self {
        Self { sobolev: n, bc: BCMatrix::none(n) }
    }

    pub fn whole() -> Self {
        Self::sobolev_space(0)
    }

    pub fn sobolev(&self) -> usize {
        self.sobolev
    }

    pub fn bc(&self) -> &BCMatrix {
        &self.bc
    }

    pub fn is_whole(&self) -> bool {
        self.sobolev == 0 && self.bc.is_empty()
    }

    /// Same set, described over a higher Sobolev order. Only meaningful when the
    /// extra regularity is already implied, which callers guarantee.
    fn lifted_bc(&self, n: usize) -> BCMatrix {
        self.bc.lift(n).expect("lift target is at least the current order")
    }

    pub fn intersect(&self, other: &ScalarDomain) -> ScalarDomain {
        let n = self.sobolev.max(other.sobolev);
        let bc = self.lifted_bc(n).stack(&other.lifted_bc(n));
        ScalarDomain { sobolev: n, bc }
    }

    pub fn is_subset(&self, other: &ScalarDomain) -> bool {
        self.sobolev >= other.sobolev && self.bc.implies(&other.lifted_bc(self.sobolev))
    }

    /// `{f ∈ self : τf ∈ target}`.
    pub fn preimage(&self, tau: &FormalExpr, target: &ScalarDomain) -> ScalarDomain {
        if tau.is_zero() {
            return self.clone();
        }
        let n = self.sobolev.max(target.sobolev + tau.order());
        let p = push_through(tau, target.sobolev, n).expect("order chosen large enough");
        let pushed = target.bc.matrix().mul(&p);
        let rows = self.lifted_bc(n).matrix().stack(&pushed);
        ScalarDomain { sobolev: n, bc: BCMatrix::new(n, rows).unwrap() }
    }

    /// Boundary matrix over an explicit order `n ≥ sobolev`.
    pub fn bc_at(&self, n: usize) -> Result<Matrix> {
        Ok(self.bc.lift(n)?.matrix().clone())
    }
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sobolev == 0 {
            write!(f, "L^2")?;
        } else {
            write!(f, "H^{}", self.sobolev)?;
        }
        if !self.bc.is_empty() {
            write!(f, " with {}", self.bc)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Endpoint::{Left, Right};
    use crate::gauss::GQ;

    fn l0() -> ScalarDomain {
        let bc = BCMatrix::pinning(2, &[(Left, 0), (Left, 1), (Right, 0), (Right, 1)]);
        ScalarDomain::new(2, bc).unwrap()
    }
    fn ld() -> ScalarDomain {
        ScalarDomain::new(2, BCMatrix::dirichlet(2)).unwrap()
    }
    fn ln() -> ScalarDomain {
        ScalarDomain::new(2, BCMatrix::pinning(2, &[(Left, 1), (Right, 1)])).unwrap()
    }
    fn m() -> ScalarDomain {
        ScalarDomain::new(1, BCMatrix::dirichlet(1)).unwrap()
    }

    #[test]
    fn intersections() {
        assert_eq!(ld().intersect(&ln()), l0());
        assert_eq!(ld().intersect(&ld()), ld());
        assert_eq!(ScalarDomain::sobolev_space(2).intersect(&m()), ld());
        assert_eq!(m().intersect(&ScalarDomain::whole()), m());
    }

    #[test]
    fn inclusions() {
        assert!(l0().is_subset(&ld()));
        assert!(ld().is_subset(&ld()));
        assert!(ld().is_subset(&m()));
        assert!(!m().is_subset(&ld()));
        assert!(!ScalarDomain::sobolev_space(2).is_subset(&m()));
        assert!(m().is_subset(&ScalarDomain::whole()));
    }

    #[test]
    fn preimage_under_derivative() {
        // {f ∈ H^1_0 : i f' ∈ H^1_0} pins f and f' at both ends
        let i_d = FormalExpr::monomial(GQ::i(), 1).unwrap();
        assert_eq!(m().preimage(&i_d, &m()), l0());
        // {f ∈ H^1_0 : i f' ∈ H^1} only needs H^2
        assert_eq!(m().preimage(&i_d, &ScalarDomain::sobolev_space(1)), ld());
        assert_eq!(m().preimage(&FormalExpr::zero(), &l0()), m());
        assert_eq!(m().preimage(&FormalExpr::identity(), &ScalarDomain::whole()), m());
    }

    #[test]
    fn display() {
        assert_eq!(ScalarDomain::whole().to_string(), "L^2");
        assert_eq!(m().to_string(), "H^1 with f(0) = 0; f(1) = 0");
    }
}
