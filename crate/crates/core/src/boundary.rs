//! Boundary-value bookkeeping on (0,1).
//!
//! A function of Sobolev order `n` has the boundary vector
//! `β(f) = (f(0), f'(0), …, f^(n-1)(0), f(1), …, f^(n-1)(1))`. Boundary conditions
//! are linear forms on that vector, stored as a matrix in reduced row-echelon form.
//!
//! The boundary form of an expression `τ` of order `m` is the `2m×2m` matrix `S` with
//! `⟨τf, g⟩ − ⟨f, τ⁺g⟩ = β(g)* S β(f)` (Lagrange identity). This is the classical
//! convention for constant-coefficient expressions, obtained by integrating by parts
//! term by term.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::FormalExpr;
use crate::gauss::GQ;
use crate::linalg::Matrix;

/// Endpoint of the interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    Left,
    Right,
}

impl Endpoint {
    pub fn index(self) -> usize {
        match self {
            Endpoint::Left => 0,
            Endpoint::Right => 1,
        }
    }

    pub fn coordinate(self) -> &'static str {
        match self {
            Endpoint::Left => "0",
            Endpoint::Right => "1",
        }
    }
}

/// Index layout of the boundary vector for Sobolev order `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub order: usize,
}

impl Layout {
    pub fn new(order: usize) -> Self {
        Self { order }
    }

    pub fn len(&self) -> usize {
        2 * self.order
    }

    pub fn is_empty(&self) -> bool {
        self.order == 0
    }

    pub fn index(&self, end: Endpoint, derivative: usize) -> usize {
        debug_assert!(derivative < self.order);
        end.index() * self.order + derivative
    }

    /// Inverse of [`Layout::index`].
    pub fn component(&self, idx: usize) -> (Endpoint, usize) {
        if idx < self.order {
            (Endpoint::Left, idx)
        } else {
            (Endpoint::Right, idx - self.order)
        }
    }

    /// Indices of components whose derivative order is below `bound`.
    pub fn low_components(&self, bound: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.component(i).1 < bound).collect()
    }
}

pub fn component_name(end: Endpoint, derivative: usize) -> String {
    let primes = match derivative {
        0 => String::new(),
        1 => "'".into(),
        2 => "''".into(),
        k => format!("^({k})"),
    };
    format!("f{primes}({})", end.coordinate())
}

/// Boundary conditions in canonical form (RREF, full row rank).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BCMatrix {
    order: usize,
    rows: Matrix,
}

impl BCMatrix {
    pub fn new(order: usize, rows: Matrix) -> Result<Self> {
        if rows.ncols() != 2 * order {
            return Err(Error::Dimension(format!(
                "boundary matrix has {} columns, layout of order {order} needs {}",
                rows.ncols(),
                2 * order
            )));
        }
        Ok(Self { order, rows: rows.rref() })
    }

    pub fn none(order: usize) -> Self {
        Self { order, rows: Matrix::empty(2 * order) }
    }

    /// Pins every listed component to zero.
    pub fn pinning(order: usize, comps: &[(Endpoint, usize)]) -> Self {
        let layout = Layout::new(order);
        let mut m = Matrix::empty(2 * order);
        for &(e, j) in comps {
            let mut row = vec![GQ::zero(); 2 * order];
            row[layout.index(e, j)] = GQ::one();
            m.push_row(row);
        }
        Self::new(order, m).unwrap()
    }

    pub fn dirichlet(order: usize) -> Self {
        Self::pinning(order, &[(Endpoint::Left, 0), (Endpoint::Right, 0)])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rows
    }

    pub fn count(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    /// Re-expresses the conditions in the layout of a higher Sobolev order.
    pub fn lift(&self, to: usize) -> Result<BCMatrix> {
        if to < self.order {
            return Err(Error::LiftDown { from: self.order, to });
        }
        let from = Layout::new(self.order);
        let target = Layout::new(to);
        let mut m = Matrix::zeros(self.rows.nrows(), target.len());
        for (r, row) in self.rows.rows().iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let (e, j) = from.component(c);
                m.set(r, target.index(e, j), v.clone());
            }
        }
        BCMatrix::new(to, m)
    }

    /// Conditions of both, over the larger layout.
    pub fn stack(&self, other: &BCMatrix) -> BCMatrix {
        let n = self.order.max(other.order);
        let a = self.lift(n).unwrap();
        let b = other.lift(n).unwrap();
        BCMatrix::new(n, a.rows.stack(&b.rows)).unwrap()
    }

    /// Whether `other`'s conditions are implied by `self`'s (both lifted to the larger order).
    pub fn implies(&self, other: &BCMatrix) -> bool {
        let n = self.order.max(other.order);
        let a = self.lift(n).unwrap();
        let b = other.lift(n).unwrap();
        a.rows.row_space_includes(&b.rows)
    }

    /// The conditions that only involve derivatives of order `< bound`, re-expressed
    /// in the layout of order `bound`.
    pub fn restrict_to_low(&self, bound: usize) -> BCMatrix {
        let src = Layout::new(self.order);
        let bound = bound.min(self.order);
        let keep = src.low_components(bound);
        let low = self.rows.row_space_within(&keep);
        let dst = Layout::new(bound);
        let mut m = Matrix::empty(dst.len());
        for row in low.rows() {
            let mut out = vec![GQ::zero(); dst.len()];
            for &c in &keep {
                let (e, j) = src.component(c);
                out[dst.index(e, j)] = row[c].clone();
            }
            m.push_row(out);
        }
        BCMatrix::new(bound, m).unwrap()
    }

    /// Whether a boundary vector satisfies every condition.
    pub fn satisfied_by(&self, beta: &[GQ]) -> bool {
        self.rows.mul_vec(beta).iter().all(GQ::is_zero)
    }
}

impl fmt::Display for BCMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "(none)");
        }
        let txt: Vec<String> = self.rows.rows().iter().map(|r| format_row(self.order, r)).collect();
        write!(f, "{}", txt.join("; "))
    }
}

impl fmt::Debug for BCMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BC[{}; {}]", self.order, self)
    }
}

/// `f(0) - 2f'(1) = 0` style rendering of one condition row.
pub fn format_row(order: usize, row: &[GQ]) -> String {
    let layout = Layout::new(order);
    let mut out = String::new();
    for (c, v) in row.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let (e, j) = layout.component(c);
        let name = component_name(e, j);
        let compound = !v.re.is_zero() && !v.im.is_zero();
        let neg = !compound && (v.re.is_negative() || (v.re.is_zero() && v.im.is_negative()));
        let mag = if neg { -v } else { v.clone() };
        let coeff = if mag.is_one() {
            String::new()
        } else if compound {
            format!("({mag})*")
        } else {
            format!("{mag}*")
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&coeff);
        out.push_str(&name);
    }
    out.push_str(" = 0");
    out
}

/// The boundary form matrix `S` of `e`, sized for the order-`m` layout, `m = order(e)`.
pub fn boundary_form_matrix(e: &FormalExpr) -> Matrix {
    let m = e.order();
    let layout = Layout::new(m);
    let mut s = Matrix::zeros(layout.len(), layout.len());
    if e.is_zero() {
        return s;
    }
    for (k, c) in e.coeffs().iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        // ∫ f^(k) ḡ = Σ_{j<k} (-1)^j [f^(k-1-j) ḡ^(j)]_0^1 + (-1)^k ∫ f ḡ^(k)
        for j in 0..k {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            for (end, end_sign) in [(Endpoint::Left, -1), (Endpoint::Right, 1)] {
                let gi = layout.index(end, j);
                let fi = layout.index(end, k - 1 - j);
                let add = c * &GQ::int(sign * end_sign);
                let cur = s.get(gi, fi).clone();
                s.set(gi, fi, cur + add);
            }
        }
    }
    s
}

/// Adjoint boundary conditions: `g` is admissible iff `β(g)* S β(f) = 0` for every
/// boundary vector `β(f)` in the kernel of `bc`.
pub fn adjoint_bc(bc: &BCMatrix, s: &Matrix) -> Result<BCMatrix> {
    let n = 2 * bc.order();
    if s.nrows() != n || s.ncols() != n {
        return Err(Error::Dimension(format!(
            "boundary form is {}×{}, conditions live in dimension {n}",
            s.nrows(),
            s.ncols()
        )));
    }
    let mut rows = Matrix::empty(n);
    for v in bc.matrix().kernel() {
        let sv = s.mul_vec(&v);
        rows.push_row(sv.iter().map(GQ::conj).collect());
    }
    BCMatrix::new(bc.order(), rows)
}

/// Linear map `β_{n_in}(f) ↦ β_{n_out}(τf)`; needs `n_in ≥ n_out + order(τ)`.
pub fn push_through(e: &FormalExpr, n_out: usize, n_in: usize) -> Result<Matrix> {
    if !e.is_zero() && n_in < n_out + e.order() {
        return Err(Error::Dimension(format!(
            "push-through of order-{} expression from order {n_in} to {n_out}",
            e.order()
        )));
    }
    let lo = Layout::new(n_out);
    let li = Layout::new(n_in);
    let mut p = Matrix::zeros(lo.len(), li.len());
    for end in [Endpoint::Left, Endpoint::Right] {
        for j in 0..n_out {
            for (k, c) in e.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    p.set(lo.index(end, j), li.index(end, j + k), c.clone());
                }
            }
        }
    }
    Ok(p)
}
