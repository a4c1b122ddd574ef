//! Block operator matrices with scalar-operator entries acting on `L²(0,1)^n`.

pub mod check;
pub mod composite;
pub mod product_domain;
pub mod schur;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::ScalarDomain;
use crate::error::{Error, Result};
use crate::gauss::GQ;
use crate::linalg::Matrix;
use crate::scalar_op::{describe, relative_bound, RelBound, ScalarOperator};

pub use check::{check_adjoint, check_product, column_factorization, AdjointCheck, ProductCheck};
pub use composite::{adjoint_rewrite, evaluate, AdjointRewrite, CompositeOperator, Evaluated, Flag, Flags, Node, Tri};
pub use product_domain::{actual_product_domain, Coupling, ProductDomain, Representation, Witness};
pub use schur::{frobenius_schur, Factorization, SchurPart, Side};

/// Largest supported block size.
pub const MAX_BLOCK: usize = 4;

#[derive(Clone, Serialize, Deserialize)]
pub struct BlockOperator {
    entries: Vec<Vec<ScalarOperator>>,
    name: Option<String>,
}

impl BlockOperator {
    pub fn new(entries: Vec<Vec<ScalarOperator>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || n > MAX_BLOCK {
            return Err(Error::Dimension(format!("block size {n} outside 1..={MAX_BLOCK}")));
        }
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("block rows must all have length n".into()));
        }
        Ok(Self { entries, name: None })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn diag(ops: Vec<ScalarOperator>) -> Result<Self> {
        let n = ops.len();
        let mut entries = vec![vec![ScalarOperator::zero(); n]; n];
        for (k, op) in ops.into_iter().enumerate() {
            entries[k][k] = op;
        }
        Self::new(entries)
    }

    /// Bounded block with constant entries `m[j][k]·I`.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension("constant block must be square".into()));
        }
        let entries = m
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| if c.is_zero() { ScalarOperator::zero() } else { ScalarOperator::scalar(c.clone()) })
                    .collect()
            })
            .collect();
        Self::new(entries)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_matrix(&Matrix::identity(n))
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, j: usize, k: usize) -> &ScalarOperator {
        &self.entries[j][k]
    }

    pub fn entries(&self) -> &[Vec<ScalarOperator>] {
        &self.entries
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.size();
        (0..n).all(|j| (0..n).all(|k| j == k || self.entries[j][k].is_zero() && self.entries[j][k].dom().is_whole()))
    }

    /// `M` when every entry is `c·I` on the whole space.
    pub fn constant_matrix(&self) -> Option<Matrix> {
        let n = self.size();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let e = &self.entries[j][k];
                if !e.is_bounded_everywhere() {
                    return None;
                }
                m.set(j, k, e.expr().coeff(0));
            }
        }
        Some(m)
    }

    /// Column-wise intersections of entry domains.
    pub fn induced_components(&self) -> Vec<ScalarDomain> {
        let n = self.size();
        (0..n).map(|k| (0..n).fold(ScalarDomain::whole(), |acc, j| acc.intersect(self.entries[j][k].dom()))).collect()
    }

    pub fn induced_domain(&self) -> ProductDomain {
        ProductDomain::rectangular(self.induced_components())
    }

    /// Entry `(j,k)` restricted to the `k`-th induced component.
    pub fn restricted_entry(&self, j: usize, k: usize) -> ScalarOperator {
        let comps = self.induced_components();
        self.entries[j][k].restrict(&comps[k]).expect("induced component lies in every column domain")
    }

    /// Same induced domain and same action.
    pub fn same_operator(&self, other: &BlockOperator) -> bool {
        self.size() == other.size()
            && self.induced_components() == other.induced_components()
            && self.expr_grid_eq(other)
    }

    /// `self ⊆ other` as operators on the product space.
    pub fn is_restriction_of(&self, other: &BlockOperator) -> bool {
        self.size() == other.size()
            && self.induced_components().iter().zip(other.induced_components()).all(|(a, b)| a.is_subset(&b))
            && self.expr_grid_eq(other)
    }

    fn expr_grid_eq(&self, other: &BlockOperator) -> bool {
        let n = self.size();
        (0..n).all(|j| (0..n).all(|k| self.entries[j][k].expr() == other.entries[j][k].expr()))
    }

    fn map_entries(&self, f: impl Fn(usize, usize) -> ScalarOperator) -> BlockOperator {
        let n = self.size();
        let entries = (0..n).map(|j| (0..n).map(|k| f(j, k)).collect()).collect();
        BlockOperator { entries, name: None }
    }

    /// Entry `(j,k)` is the closure of `A_jk` restricted to the `k`-th induced component.
    pub fn closure_matrix(&self) -> BlockOperator {
        self.map_entries(|j, k| self.restricted_entry(j, k).closure())
    }

    /// Entry `(j,k)` is the adjoint of `A_kj` restricted to the `j`-th induced component.
    pub fn formal_adjoint(&self) -> BlockOperator {
        self.map_entries(|j, k| self.restricted_entry(k, j).adjoint())
    }

    /// Entry `(j,k)` is `A_kj*` with no restriction first.
    pub fn naive_adjoint(&self) -> BlockOperator {
        self.map_entries(|j, k| self.entries[k][j].adjoint())
    }

    /// Entry `(j,l)` is `Σ_k A_jk B_kl`.
    pub fn formal_product(&self, other: &BlockOperator) -> Result<BlockOperator> {
        if self.size() != other.size() {
            return Err(Error::Dimension("block sizes differ".into()));
        }
        let n = self.size();
        let mut entries = Vec::with_capacity(n);
        for j in 0..n {
            let mut row = Vec::with_capacity(n);
            for l in 0..n {
                let mut acc: Option<ScalarOperator> = None;
                for k in 0..n {
                    let t = self.entries[j][k].compose(&other.entries[k][l])?;
                    acc = Some(match acc {
                        None => t,
                        Some(a) => a.add(&t),
                    });
                }
                row.push(acc.unwrap());
            }
            entries.push(row);
        }
        Self::new(entries)
    }

    /// Entrywise sum; the domain is the intersection.
    pub fn add(&self, other: &BlockOperator) -> Result<BlockOperator> {
        if self.size() != other.size() {
            return Err(Error::Dimension("block sizes differ".into()));
        }
        Ok(self.map_entries(|j, k| self.entries[j][k].add(&other.entries[j][k])))
    }

    /// `self − λ`.
    pub fn shift(&self, lambda: &GQ) -> BlockOperator {
        let minus = ScalarOperator::scalar(-lambda);
        self.map_entries(|j, k| if j == k { self.entries[j][k].add(&minus) } else { self.entries[j][k].clone() })
    }

    /// Entries `(j,k)` of `(perm[j], perm[k])`: conjugation by a permutation.
    pub fn permute(&self, perm: &[usize]) -> BlockOperator {
        self.map_entries(|j, k| self.entries[perm[j]][perm[k]].clone())
    }

    /// Principal sub-block on the given indices.
    pub fn principal(&self, idx: &[usize]) -> Result<BlockOperator> {
        let entries = idx.iter().map(|&j| idx.iter().map(|&k| self.entries[j][k].clone()).collect()).collect();
        Self::new(entries)
    }

    /// Same action with each entry restricted to the given column domains.
    pub fn restrict_columns(&self, comps: &[ScalarDomain]) -> Result<BlockOperator> {
        let n = self.size();
        let mut entries = Vec::with_capacity(n);
        for j in 0..n {
            let mut row = Vec::with_capacity(n);
            for k in 0..n {
                row.push(self.entries[j][k].restrict(&comps[k])?);
            }
            entries.push(row);
        }
        Self::new(entries)
    }

    /// Squared Frobenius norm of the relative bounds of `self` with respect to the
    /// diagonal block `t`, or `None` if some entry is not `t`-bounded.
    ///
    /// This dominates the squared relative bound of `self` with respect to `t`.
    pub fn relative_bound_sq_wrt_diag(&self, t: &BlockOperator) -> Option<GQ> {
        let n = self.size();
        let mut total = GQ::zero();
        for j in 0..n {
            for k in 0..n {
                let e = self.restricted_entry(j, k);
                if e.is_zero() {
                    continue;
                }
                match relative_bound(&e, t.entry(k, k)) {
                    RelBound::Zero => {}
                    RelBound::Value { squared } => total += &squared,
                    _ => return None,
                }
            }
        }
        Some(total)
    }

    pub fn labels(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(describe).collect()).collect()
    }

    /// `[[a, b], [c, d]]` using entry labels.
    pub fn grid(&self) -> String {
        let rows: Vec<String> = self.labels().into_iter().map(|r| format!("[{}]", r.join(", "))).collect();
        format!("[{}]", rows.join(", "))
    }
}

impl fmt::Display for BlockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.grid())
    }
}

impl fmt::Debug for BlockOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.grid(), self.induced_domain())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_op::builtin;

    fn b(n: &str) -> ScalarOperator {
        builtin(n).unwrap()
    }

    fn neg(n: &str) -> ScalarOperator {
        b(n).scale(&GQ::int(-1))
    }

    pub(crate) fn lcal() -> BlockOperator {
        BlockOperator::new(vec![vec![b("LD"), b("LN")], vec![b("LN"), neg("LD")]]).unwrap()
    }

    #[test]
    fn induced_domains() {
        assert_eq!(lcal().induced_components(), vec![b("L0").dom().clone(), b("L0").dom().clone()]);
        let a = BlockOperator::new(vec![vec![b("M"), b("Zero")], vec![b("M"), b("Zero")]]).unwrap();
        assert_eq!(a.induced_components(), vec![b("M").dom().clone(), ScalarDomain::whole()]);
        assert!(lcal().induced_domain().is_rectangular());
    }

    #[test]
    fn formal_products() {
        let u = BlockOperator::from_matrix(&Matrix::from_ints(2, &[&[1, 1], &[1, -1]])).unwrap();
        let t = BlockOperator::diag(vec![b("L0"), b("L0")]).unwrap();
        let p = u.formal_product(&t).unwrap();
        assert!(p.same_operator(&lcal()));
        let id = BlockOperator::identity(2).unwrap();
        assert!(lcal().formal_product(&id).unwrap().same_operator(&lcal()));
        let d = BlockOperator::diag(vec![b("LD"), b("LD")]).unwrap();
        assert!(d.formal_product(&id).unwrap().same_operator(&d));
    }

    #[test]
    fn adjoint_matrices() {
        let l = BlockOperator::new(vec![vec![b("L"), b("L")], vec![b("L"), neg("L")]]).unwrap();
        assert!(lcal().formal_adjoint().same_operator(&l));
        let naive = lcal().naive_adjoint();
        assert!(naive.same_operator(&lcal()));
        assert!(naive.is_restriction_of(&l) && !l.is_restriction_of(&naive));
        let d = BlockOperator::diag(vec![b("LD"), b("LN")]).unwrap();
        assert!(d.formal_adjoint().same_operator(&d));
    }

    #[test]
    fn labels_and_permutation() {
        assert_eq!(lcal().grid(), "[[LD, LN], [LN, -LD]]");
        let p = lcal().permute(&[1, 0]);
        assert_eq!(p.grid(), "[[-LD, LN], [LN, LD]]");
        assert!(BlockOperator::new(vec![]).is_err());
    }
}
