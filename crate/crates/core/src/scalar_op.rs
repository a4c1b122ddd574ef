//! Scalar operators `τ` on a [`ScalarDomain`], and the catalog of named operators.
//!
//! Closedness convention for this class: an operator is closed iff its Sobolev order
//! equals its expression order. The closure keeps the expression, drops the excess
//! regularity and keeps the boundary conditions that only involve derivatives below
//! the expression order.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::boundary::{adjoint_bc, boundary_form_matrix, BCMatrix, Endpoint};
use crate::domain::ScalarDomain;
use crate::error::{Error, Result};
use crate::expr::FormalExpr;
use crate::gauss::GQ;

#[derive(Clone, Serialize, Deserialize)]
pub struct ScalarOperator {
    expr: FormalExpr,
    dom: ScalarDomain,
    name: Option<String>,
}

/// Operators compare by action and domain; the label is ignored.
impl PartialEq for ScalarOperator {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr && self.dom == other.dom
    }
}

impl Eq for ScalarOperator {}

impl std::hash::Hash for ScalarOperator {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.expr.hash(state);
        self.dom.hash(state);
    }
}

impl ScalarOperator {
    pub fn new(expr: FormalExpr, dom: ScalarDomain) -> Result<Self> {
        if dom.sobolev() < expr.order() {
            return Err(Error::SobolevTooLow { sobolev: dom.sobolev(), order: expr.order() });
        }
        Ok(Self { expr, dom, name: None })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn unnamed(mut self) -> Self {
        self.name = None;
        self
    }

    pub fn expr(&self) -> &FormalExpr {
        &self.expr
    }

    pub fn dom(&self) -> &ScalarDomain {
        &self.dom
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn order(&self) -> usize {
        self.expr.order()
    }

    /// `c·I` on the whole space.
    pub fn scalar(c: GQ) -> Self {
        Self::new(FormalExpr::constant(c), ScalarDomain::whole()).unwrap()
    }

    pub fn identity() -> Self {
        Self::scalar(GQ::one())
    }

    pub fn zero() -> Self {
        Self::new(FormalExpr::zero(), ScalarDomain::whole()).unwrap()
    }

    /// Zero expression on a given domain.
    pub fn zero_on(dom: ScalarDomain) -> Self {
        Self::new(FormalExpr::zero(), dom).unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.expr.is_zero()
    }

    /// Bounded and defined on all of `L²`.
    pub fn is_bounded_everywhere(&self) -> bool {
        self.expr.order() == 0 && self.dom.is_whole()
    }

    pub fn closure(&self) -> ScalarOperator {
        let m = self.expr.order();
        let bc = self.dom.bc().restrict_to_low(m);
        let dom = ScalarDomain::new(m, bc).unwrap();
        Self { expr: self.expr.clone(), dom, name: None }
    }

    pub fn is_closed(&self) -> bool {
        self.dom.sobolev() == self.expr.order()
    }

    pub fn adjoint(&self) -> ScalarOperator {
        let c = self.closure();
        let m = c.expr.order();
        let expr = c.expr.lagrange_adjoint();
        if m == 0 {
            return Self { expr, dom: ScalarDomain::whole(), name: None };
        }
        let s = boundary_form_matrix(&c.expr);
        let bc = adjoint_bc(c.dom.bc(), &s).expect("closure lives on the order-m layout");
        Self { expr, dom: ScalarDomain::new(m, bc).unwrap(), name: None }
    }

    pub fn is_symmetric(&self) -> bool {
        let adj = self.adjoint();
        self.expr == adj.expr && self.dom.is_subset(&adj.dom)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.closure() == self.adjoint()
    }

    /// `self ∘ other` on `{f ∈ D(other) : τ_other f ∈ D(self)}`.
    pub fn compose(&self, other: &ScalarOperator) -> Result<ScalarOperator> {
        let expr = self.expr.compose(&other.expr)?;
        let dom = other.dom.preimage(&other.expr, &self.dom);
        Ok(Self { expr, dom, name: None })
    }

    pub fn add(&self, other: &ScalarOperator) -> ScalarOperator {
        Self { expr: self.expr.add(&other.expr), dom: self.dom.intersect(&other.dom), name: None }
    }

    /// `c·T` keeps the domain even for `c = 0`.
    pub fn scale(&self, c: &GQ) -> ScalarOperator {
        Self { expr: self.expr.scale(c), dom: self.dom.clone(), name: None }
    }

    pub fn restrict(&self, d: &ScalarDomain) -> Result<ScalarOperator> {
        if !d.is_subset(&self.dom) {
            return Err(Error::NotSubset);
        }
        Self::new(self.expr.clone(), d.clone())
    }

    /// Extension relation `self ⊆ other`.
    pub fn is_restriction_of(&self, other: &ScalarOperator) -> bool {
        self.expr == other.expr && self.dom.is_subset(&other.dom)
    }

    /// `D(|T|^{1/2})` for a self-adjoint operator of even order.
    pub fn form_domain(&self) -> Result<ScalarDomain> {
        if !self.is_self_adjoint() {
            return Err(Error::FormDomain("operator is not self-adjoint".into()));
        }
        let m = self.expr.order();
        if m % 2 == 1 {
            return Err(Error::FormDomain(format!("expression has odd order {m}")));
        }
        let p = m / 2;
        let bc = self.closure().dom.bc().restrict_to_low(p);
        ScalarDomain::new(p, bc)
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("[{}]", self.expr),
        }
    }
}

impl fmt::Display for ScalarOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.expr, self.dom)
    }
}

impl fmt::Debug for ScalarOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            write!(f, "{n} = ")?;
        }
        write!(f, "{self}")
    }
}

/// Relative bound of `S` with respect to `T`.
///
/// `Value` stores the square of the bound: for equal orders the bound is
/// `|lead(S)/lead(T)|`, which need not be rational, while its square always is.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelBound {
    Zero,
    Value { squared: GQ },
    Infinite,
    Unknown,
}

impl RelBound {
    pub fn is_below_one(&self) -> bool {
        match self {
            RelBound::Zero => true,
            RelBound::Value { squared } => squared.re < BigRational::one(),
            _ => false,
        }
    }

    pub fn is_at_most_one(&self) -> bool {
        match self {
            RelBound::Zero => true,
            RelBound::Value { squared } => squared.re <= BigRational::one(),
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, RelBound::Zero | RelBound::Value { .. })
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            RelBound::Zero => 0.0,
            RelBound::Value { squared } => squared.to_c64().re.sqrt(),
            RelBound::Infinite => f64::INFINITY,
            RelBound::Unknown => f64::NAN,
        }
    }
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    let n: BigInt = r.numer().sqrt();
    let d: BigInt = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

impl fmt::Display for RelBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelBound::Zero => write!(f, "0"),
            RelBound::Value { squared } => match exact_sqrt(&squared.re) {
                Some(r) => write!(f, "{}", GQ::real(r)),
                None => write!(f, "sqrt({squared})"),
            },
            RelBound::Infinite => write!(f, "infinite"),
            RelBound::Unknown => write!(f, "unknown"),
        }
    }
}

/// Relative bound of `s` with respect to `t`, via the interpolation inequality for
/// constant-coefficient expressions.
pub fn relative_bound(s: &ScalarOperator, t: &ScalarOperator) -> RelBound {
    if !t.dom().is_subset(s.dom()) || s.order() > t.order() {
        return RelBound::Infinite;
    }
    if s.order() == 0 || s.order() < t.order() {
        return RelBound::Zero;
    }
    let ratio = &s.expr().leading() / &t.expr().leading();
    let sq = ratio.norm_sqr();
    debug_assert!(!sq.is_negative());
    RelBound::Value { squared: GQ::real(sq) }
}

/// Names accepted by [`builtin`].
pub const CATALOG: [&str; 9] = ["L", "L0", "LD", "LN", "M", "M0", "Mstar", "I", "Zero"];

fn neg_d2() -> FormalExpr {
    FormalExpr::monomial(GQ::int(-1), 2).unwrap()
}

fn i_d() -> FormalExpr {
    FormalExpr::monomial(GQ::i(), 1).unwrap()
}

pub fn builtin(name: &str) -> Result<ScalarOperator> {
    use Endpoint::{Left, Right};
    let op = match name {
        "L" => ScalarOperator::new(neg_d2(), ScalarDomain::sobolev_space(2)),
        "L0" => ScalarOperator::new(
            neg_d2(),
            ScalarDomain::new(2, BCMatrix::pinning(2, &[(Left, 0), (Left, 1), (Right, 0), (Right, 1)]))?,
        ),
        "LD" => ScalarOperator::new(neg_d2(), ScalarDomain::new(2, BCMatrix::dirichlet(2))?),
        "LN" => ScalarOperator::new(neg_d2(), ScalarDomain::new(2, BCMatrix::pinning(2, &[(Left, 1), (Right, 1)]))?),
        "M" => ScalarOperator::new(i_d(), ScalarDomain::new(1, BCMatrix::dirichlet(1))?),
        "M0" => ScalarOperator::new(i_d(), ScalarDomain::new(2, BCMatrix::dirichlet(2))?),
        "Mstar" => ScalarOperator::new(i_d(), ScalarDomain::sobolev_space(1)),
        "I" => Ok(ScalarOperator::identity()),
        "Zero" => Ok(ScalarOperator::zero()),
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    }?;
    Ok(op.named(name))
}

/// Short label for an operator: its own name, a catalog name, `c*NAME`, or `0`.
pub fn describe(op: &ScalarOperator) -> String {
    if let Some(n) = op.name() {
        return n.to_string();
    }
    if op.is_zero() {
        return if op.dom().is_whole() { "0".into() } else { format!("0|{}", op.dom()) };
    }
    for cat in catalog() {
        if cat.is_zero() || cat.dom() != op.dom() || cat.order() != op.order() {
            continue;
        }
        let c = &op.expr().leading() / &cat.expr().leading();
        if cat.expr().scale(&c) != *op.expr() {
            continue;
        }
        let name = cat.name().unwrap();
        return if c.is_one() {
            name.to_string()
        } else if c == GQ::int(-1) {
            format!("-{name}")
        } else if c.re.is_zero() || c.im.is_zero() {
            format!("{c}*{name}")
        } else {
            format!("({c})*{name}")
        };
    }
    format!("[{op}]")
}

pub fn catalog() -> Vec<ScalarOperator> {
    CATALOG.iter().map(|n| builtin(n).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: &str) -> ScalarOperator {
        builtin(n).unwrap()
    }

    #[test]
    fn catalog_adjoints() {
        assert_eq!(b("L0").adjoint(), b("L"));
        assert_eq!(b("L").adjoint(), b("L0"));
        assert_eq!(b("LD").adjoint(), b("LD"));
        assert_eq!(b("LN").adjoint(), b("LN"));
        assert_eq!(b("M").adjoint(), b("Mstar"));
        assert_eq!(b("Mstar").adjoint(), b("M"));
        assert_eq!(b("M0").adjoint(), b("Mstar"));
        assert_eq!(b("I").adjoint(), b("I"));
        let c = ScalarOperator::scalar(GQ::from_ints(1, 2));
        assert_eq!(c.adjoint(), ScalarOperator::scalar(GQ::from_ints(1, -2)));
    }

    #[test]
    fn closures() {
        assert_eq!(b("M0").closure(), b("M"));
        assert_eq!(b("L0").closure(), b("L0"));
        assert!(!b("M0").is_closed());
        for op in catalog() {
            assert_eq!(op.closure().closure(), op.closure());
            assert_eq!(op.adjoint().adjoint(), op.closure(), "{op:?}");
        }
        // restriction with a mixed row: f(0) + f'(1) = 0 on H^2 for iD loses the row
        let mut row = vec![GQ::zero(); 4];
        row[0] = GQ::one();
        row[3] = GQ::one();
        let dom =
            ScalarDomain::new(2, BCMatrix::new(2, crate::linalg::Matrix::from_rows(4, vec![row])).unwrap()).unwrap();
        let t = ScalarOperator::new(i_d(), dom).unwrap();
        assert_eq!(t.closure(), b("Mstar"));
    }

    #[test]
    fn symmetry() {
        assert!(b("LD").is_self_adjoint());
        assert!(b("M0").is_symmetric() && !b("M0").is_self_adjoint());
        assert!(!b("L").is_symmetric());
        assert!(b("L0").is_symmetric() && !b("L0").is_self_adjoint());
        assert!(!b("Mstar").is_symmetric());
    }

    #[test]
    fn composition() {
        let two = ScalarOperator::scalar(GQ::int(2));
        let c = two.compose(&b("L0")).unwrap();
        assert_eq!(c, b("L0").scale(&GQ::int(2)));
        // M·M needs f' to vanish as well
        assert_eq!(b("M").compose(&b("M")).unwrap(), b("L0"));
        assert_eq!(b("Mstar").compose(&b("M")).unwrap(), b("LD"));
        let c = b("LD").compose(&b("M")).unwrap();
        assert_eq!(c.order(), 3);
        assert_eq!(c.dom().sobolev(), 3);
        assert_eq!(c.dom().bc().count(), 4);
        assert!(b("L").compose(&b("L")).is_ok());
        assert!(b("L").compose(&b("L").compose(&b("M")).unwrap()).is_err());
    }

    #[test]
    fn sums_and_restrictions() {
        let z = b("LD").add(&b("LD").scale(&GQ::int(-1)));
        assert!(z.is_zero());
        assert_eq!(z.dom(), b("LD").dom());
        assert_eq!(b("L").restrict(b("L0").dom()).unwrap(), b("L0"));
        assert_eq!(b("M").restrict(b("LD").dom()).unwrap(), b("M0"));
        assert!(matches!(b("LD").restrict(b("LN").dom()), Err(Error::NotSubset)));
    }

    #[test]
    fn relative_bounds() {
        assert_eq!(relative_bound(&b("M0"), &b("LD")), RelBound::Zero);
        let two = b("LD").scale(&GQ::int(2));
        let v = relative_bound(&two, &b("LD"));
        assert_eq!(v, RelBound::Value { squared: GQ::int(4) });
        assert_eq!(v.to_string(), "2");
        assert_eq!(relative_bound(&b("LD"), &b("M0")), RelBound::Infinite);
        assert_eq!(relative_bound(&b("M"), &b("LN")), RelBound::Infinite);
        let odd = b("LD").scale(&GQ::from_ints(1, 1));
        assert_eq!(relative_bound(&odd, &b("LD")).to_string(), "sqrt(2)");
    }

    #[test]
    fn form_domains() {
        let h10 = ScalarDomain::new(1, BCMatrix::dirichlet(1)).unwrap();
        assert_eq!(b("LD").form_domain().unwrap(), h10);
        assert_eq!(b("LN").form_domain().unwrap(), ScalarDomain::sobolev_space(1));
        assert!(b("L0").form_domain().is_err());
        assert!(b("M").form_domain().is_err());
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(builtin("Q"), Err(Error::UnknownBuiltin(_))));
    }
}
