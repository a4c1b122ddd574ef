//! Subspaces of `L²(0,1)^n` cut out by component domains and coupling conditions
//! `Σ_k τ_k x_k ∈ T`, and the decision whether such a set is a rectangle.
//!
//! Rectangularity is decided in two stages. The regularity stage looks at interior
//! behaviour: a test vector `x = w·φ` with `φ ∈ H^t \ H^{t+1}` compactly supported in
//! (0,1) ignores every boundary condition, so the set of admissible `w` at each level
//! `t` must be a coordinate subspace. The jet stage then treats the boundary data,
//! which for Sobolev functions of fixed order can be prescribed independently.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::BlockOperator;
use crate::boundary::{push_through, BCMatrix};
use crate::domain::ScalarDomain;
use crate::expr::FormalExpr;
use crate::gauss::GQ;
use crate::linalg::Matrix;

/// `Σ_k terms[k] x_k ∈ target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coupling {
    pub terms: Vec<FormalExpr>,
    pub target: ScalarDomain,
}

impl Coupling {
    fn active(&self) -> impl Iterator<Item = (usize, &FormalExpr)> {
        self.terms.iter().enumerate().filter(|(_, t)| !t.is_zero())
    }

    /// Holds for every vector of the rectangle `comps`.
    fn is_vacuous_on(&self, comps: &[ScalarDomain]) -> bool {
        self.target.is_whole() || self.active().all(|(k, t)| comps[k].is_subset(&comps[k].preimage(t, &self.target)))
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, t) in self.active() {
            let var = format!("x{}", k + 1);
            let txt = if *t == FormalExpr::identity() {
                var
            } else if *t == FormalExpr::identity().neg() {
                format!("-{var}")
            } else {
                format!("({t}){var}")
            };
            parts.push(txt);
        }
        let lhs = if parts.is_empty() { "0".to_string() } else { parts.join(" + ").replace("+ -", "- ") };
        write!(f, "{lhs} ∈ {}", self.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDomain {
    components: Vec<ScalarDomain>,
    couplings: Vec<Coupling>,
}

/// Why a product domain is not a rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `x_k = profile[k] φ` with `φ ∈ H^level \ H^(level+1)` compactly supported in (0,1):
    /// `x` lies in the domain while some `Q_k x` does not.
    Interior { level: usize, profile: Vec<FormalExpr> },
    /// Boundary jets of a domain element whose `component`-th projection leaves the domain.
    Jets { jets: Vec<Vec<GQ>>, component: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Interior { level, profile } => {
                if profile.iter().all(|p| p.order() == 0) {
                    let base = profile.iter().position(|p| !p.is_zero()).unwrap_or(0);
                    let var = format!("x{}", base + 1);
                    let parts: Vec<String> = profile
                        .iter()
                        .map(|p| {
                            let c = p.coeff(0);
                            if c.is_zero() {
                                "0".into()
                            } else if c.is_one() {
                                var.clone()
                            } else if c == GQ::int(-1) {
                                format!("-{var}")
                            } else {
                                format!("{c}*{var}")
                            }
                        })
                        .collect();
                    write!(f, "({}) with {var} ∉ H^{}", parts.join(", "), level + 1)
                } else {
                    let parts: Vec<String> =
                        profile.iter().map(|p| if p.is_zero() { "0".into() } else { format!("({p})φ") }).collect();
                    write!(f, "({}) with φ ∈ H^{} \\ H^{} compactly supported", parts.join(", "), level, level + 1)
                }
            }
            Witness::Jets { jets, component } => {
                let parts: Vec<String> = jets
                    .iter()
                    .map(|j| format!("[{}]", j.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")))
                    .collect();
                write!(f, "boundary jets {} lose membership under Q{}", parts.join(" "), component + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Representation {
    Rectangular { components: Vec<ScalarDomain> },
    Coupled { witness: Witness },
    Undecided { reason: String },
}

impl Representation {
    pub fn is_rectangular(&self) -> bool {
        matches!(self, Representation::Rectangular { .. })
    }
}

impl ProductDomain {
    pub fn rectangular(components: Vec<ScalarDomain>) -> Self {
        Self { components, couplings: Vec::new() }
    }

    /// Vacuous couplings are dropped.
    pub fn new(components: Vec<ScalarDomain>, couplings: Vec<Coupling>) -> Self {
        let couplings = couplings.into_iter().filter(|c| !c.is_vacuous_on(&components)).collect();
        Self { components, couplings }
    }

    pub fn components(&self) -> &[ScalarDomain] {
        &self.components
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn size(&self) -> usize {
        self.components.len()
    }

    pub fn is_rectangular(&self) -> bool {
        self.couplings.is_empty()
    }

    /// Whether the rectangle `rect` lies inside this set. Exact when every coupling
    /// holds termwise on `rect`, which is the case for formal-product domains.
    pub fn contains_rectangle(&self, rect: &[ScalarDomain]) -> bool {
        rect.len() == self.size()
            && rect.iter().zip(&self.components).all(|(r, c)| r.is_subset(c))
            && self.couplings.iter().all(|c| c.is_vacuous_on(rect))
    }

    pub fn representation(&self) -> Representation {
        let n = self.size();
        let mut level: Vec<usize> = self.components.iter().map(ScalarDomain::sobolev).collect();
        let rough = |lv: &[usize], c: &Coupling| -> Vec<usize> {
            c.active().filter(|(k, t)| lv[*k] < c.target.sobolev() + t.order()).map(|(k, _)| k).collect()
        };

        // A row with a single rough term forces regularity on that component.
        loop {
            let mut changed = false;
            for c in &self.couplings {
                let r = rough(&level, c);
                if r.len() == 1 {
                    let k = r[0];
                    level[k] = c.target.sobolev() + c.terms[k].order();
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        for (ri, c) in self.couplings.iter().enumerate() {
            let r = rough(&level, c);
            if r.len() >= 2 && r.iter().any(|&k| c.terms[k].order() > 0) {
                return match self.pair_witness(&level, ri, r[0], r[1]) {
                    Some(w) => Representation::Coupled { witness: w },
                    None => {
                        Representation::Undecided { reason: format!("coupling `{c}` mixes rough differential terms") }
                    }
                };
            }
        }

        // Every remaining rough term is a scalar multiple: run the regularity filtration.
        let top = level.iter().copied().chain(self.couplings.iter().map(|c| c.target.sobolev())).max().unwrap_or(0);
        let mut new_level = vec![None; n];
        for t in 0..top {
            let mut cons = Matrix::empty(n);
            for k in 0..n {
                if level[k] > t {
                    let mut e = vec![GQ::zero(); n];
                    e[k] = GQ::one();
                    cons.push_row(e);
                }
            }
            for c in self.couplings.iter().filter(|c| c.target.sobolev() > t) {
                let row: Vec<GQ> =
                    c.terms.iter().map(|e| if e.order() == 0 { e.coeff(0) } else { GQ::zero() }).collect();
                cons.push_row(row);
            }
            let basis = cons.kernel();
            let unit_ok = |k: usize| {
                let mut e = vec![GQ::zero(); n];
                e[k] = GQ::one();
                cons.mul_vec(&e).iter().all(GQ::is_zero)
            };
            for v in &basis {
                if (0..n).any(|k| !v[k].is_zero() && !unit_ok(k)) {
                    let pivot = v.iter().find(|x| !x.is_zero()).unwrap().recip().unwrap();
                    let profile = v.iter().map(|x| FormalExpr::constant(x * &pivot)).collect();
                    return Representation::Coupled { witness: Witness::Interior { level: t, profile } };
                }
            }
            for k in 0..n {
                if new_level[k].is_none() && unit_ok(k) {
                    new_level[k] = Some(t);
                }
            }
        }
        let level: Vec<usize> = (0..n).map(|k| new_level[k].unwrap_or(top).max(level[k])).collect();
        self.jet_stage(&level)
    }

    /// `x_k = τ_l φ`, `x_l = −τ_k φ` kills row `ri` but `Q_k x` violates it.
    fn pair_witness(&self, level: &[usize], ri: usize, k: usize, l: usize) -> Option<Witness> {
        let c = &self.couplings[ri];
        let (tk, tl) = (&c.terms[k], &c.terms[l]);
        let t = (level[k] + tl.order()).max(level[l] + tk.order());
        let mut profile = vec![FormalExpr::zero(); self.size()];
        profile[k] = tl.clone();
        profile[l] = tk.neg();
        for other in &self.couplings {
            let a = other.terms[k].compose(tl).ok()?;
            let b = other.terms[l].compose(tk).ok()?;
            let diff = a.add(&b.neg());
            if !diff.is_zero() && t < other.target.sobolev() + diff.order() {
                return None;
            }
        }
        Some(Witness::Interior { level: t, profile })
    }

    fn jet_stage(&self, level: &[usize]) -> Representation {
        let n = self.size();
        let mut offsets = Vec::with_capacity(n);
        let mut total = 0;
        for &lv in level {
            offsets.push(total);
            total += 2 * lv;
        }
        let mut cons = Matrix::empty(total);
        for (k, comp) in self.components.iter().enumerate() {
            let bc = comp.bc_at(level[k]).expect("levels only grow");
            for row in bc.rows() {
                let mut full = vec![GQ::zero(); total];
                full[offsets[k]..offsets[k] + row.len()].clone_from_slice(row);
                cons.push_row(full);
            }
        }
        for c in &self.couplings {
            let s = c.target.sobolev();
            let u = c.target.bc().matrix();
            if u.nrows() == 0 {
                continue;
            }
            let mut block = Matrix::zeros(u.nrows(), total);
            for (k, t) in c.active() {
                let p = push_through(t, s, level[k]).expect("regularity stage made the term smooth enough");
                let up = u.mul(&p);
                for i in 0..up.nrows() {
                    for (j, v) in up.row(i).iter().enumerate() {
                        let cur = block.get(i, offsets[k] + j).clone();
                        block.set(i, offsets[k] + j, cur + v);
                    }
                }
            }
            cons = cons.stack(&block);
        }
        let kernel = cons.kernel();
        let project = |v: &[GQ], k: usize| -> Vec<GQ> {
            let mut w = vec![GQ::zero(); total];
            let r = offsets[k]..offsets[k] + 2 * level[k];
            w[r.clone()].clone_from_slice(&v[r]);
            w
        };
        for v in &kernel {
            for k in 0..n {
                let q = project(v, k);
                if !cons.mul_vec(&q).iter().all(GQ::is_zero) {
                    let jets = (0..n).map(|j| v[offsets[j]..offsets[j] + 2 * level[j]].to_vec()).collect();
                    return Representation::Coupled { witness: Witness::Jets { jets, component: k } };
                }
            }
        }
        let mut comps = Vec::with_capacity(n);
        for k in 0..n {
            let width = 2 * level[k];
            let proj: Vec<Vec<GQ>> = kernel.iter().map(|v| v[offsets[k]..offsets[k] + width].to_vec()).collect();
            let span = Matrix::from_vectors(width, &proj);
            let ann = Matrix::from_vectors(width, &span.kernel());
            let bc = BCMatrix::new(level[k], ann).expect("width matches the layout");
            comps.push(ScalarDomain::new(level[k], bc).unwrap());
        }
        Representation::Rectangular { components: comps }
    }
}

impl fmt::Display for ProductDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self.components.iter().map(|c| format!("({c})")).collect();
        write!(f, "{}", comps.join(" × "))?;
        if !self.couplings.is_empty() {
            let cs: Vec<String> = self.couplings.iter().map(|c| c.to_string()).collect();
            write!(f, " with {}", cs.join(", "))?;
        }
        Ok(())
    }
}

/// Entry `(j,l)` is `Σ_k τ(A_jk)τ(B_kl)` on the `l`-th rectangle component: the
/// operators `P_j AB J_l` once `D(AB)` is known to be a rectangle.
pub fn entries_from_projections(
    a: &BlockOperator,
    b: &BlockOperator,
    comps: &[ScalarDomain],
) -> crate::error::Result<BlockOperator> {
    let n = a.size();
    let mut entries = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = Vec::with_capacity(n);
        for (l, comp) in comps.iter().enumerate() {
            let mut e = FormalExpr::zero();
            for k in 0..n {
                e = e.add(&a.entry(j, k).expr().compose(b.entry(k, l).expr())?);
            }
            row.push(crate::scalar_op::ScalarOperator::new(e, comp.clone())?);
        }
        entries.push(row);
    }
    BlockOperator::new(entries)
}

/// Domain of the product `AB`: `x ∈ D(B)` with `Σ_k τ(B_jk) x_k ∈ D_j(A)` for every row `j`.
pub fn actual_product_domain(a: &BlockOperator, b: &BlockOperator) -> ProductDomain {
    let n = b.size();
    let targets = a.induced_components();
    let couplings = (0..n)
        .map(|j| Coupling { terms: (0..n).map(|k| b.entry(j, k).expr().clone()).collect(), target: targets[j].clone() })
        .collect();
    ProductDomain::new(b.induced_components(), couplings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_op::builtin;

    fn dom(n: &str) -> ScalarDomain {
        builtin(n).unwrap().dom().clone()
    }

    fn whole2() -> Vec<ScalarDomain> {
        vec![ScalarDomain::whole(), ScalarDomain::whole()]
    }

    fn scalar_row(a: i64, b: i64, target: ScalarDomain) -> Coupling {
        Coupling { terms: vec![FormalExpr::constant(GQ::int(a)), FormalExpr::constant(GQ::int(b))], target }
    }

    #[test]
    fn sum_coupling_is_not_rectangular() {
        let d = ProductDomain::new(whole2(), vec![scalar_row(1, 1, dom("Mstar"))]);
        match d.representation() {
            Representation::Coupled { witness } => {
                assert_eq!(witness.to_string(), "(x1, -x1) with x1 ∉ H^1");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_independent_rows_give_a_rectangle() {
        let h2 = ScalarDomain::sobolev_space(2);
        let d = ProductDomain::new(whole2(), vec![scalar_row(1, 1, h2.clone()), scalar_row(1, -1, h2.clone())]);
        assert_eq!(d.representation(), Representation::Rectangular { components: vec![h2.clone(), h2] });
    }

    #[test]
    fn boundary_rows_split_or_couple() {
        // x1 + x2 ∈ H^1_0 with x1, x2 ∈ H^1: jets couple
        let h1 = ScalarDomain::sobolev_space(1);
        let d = ProductDomain::new(vec![h1.clone(), h1.clone()], vec![scalar_row(1, 1, dom("M"))]);
        assert!(matches!(d.representation(), Representation::Coupled { witness: Witness::Jets { .. } }));
        // x1 + x2, x1 - x2 ∈ H^1_0: both vanish at the ends
        let d = ProductDomain::new(vec![h1.clone(), h1], vec![scalar_row(1, 1, dom("M")), scalar_row(1, -1, dom("M"))]);
        assert_eq!(d.representation(), Representation::Rectangular { components: vec![dom("M"), dom("M")] });
    }

    #[test]
    fn differential_terms() {
        // i x1' ∈ H^1_0 with x1 ∈ H^1_0: folds to the L0 conditions
        let i_d = FormalExpr::monomial(GQ::i(), 1).unwrap();
        let c = Coupling { terms: vec![i_d.clone(), FormalExpr::zero()], target: dom("M") };
        let d = ProductDomain::new(vec![dom("M"), ScalarDomain::whole()], vec![c]);
        assert_eq!(
            d.representation(),
            Representation::Rectangular { components: vec![dom("L0"), ScalarDomain::whole()] }
        );
        // i x1' + i x2' ∈ H^1 with x_k ∈ H^1: interior pair witness
        let c = Coupling { terms: vec![i_d.clone(), i_d.clone()], target: ScalarDomain::sobolev_space(1) };
        let h1 = ScalarDomain::sobolev_space(1);
        let d = ProductDomain::new(vec![h1.clone(), h1], vec![c]);
        assert!(matches!(d.representation(), Representation::Coupled { witness: Witness::Interior { level: 2, .. } }));
    }

    #[test]
    fn vacuous_rows_are_dropped() {
        let d = ProductDomain::new(whole2(), vec![scalar_row(1, 1, ScalarDomain::whole())]);
        assert!(d.is_rectangular());
        let d = ProductDomain::new(vec![dom("LD"), dom("LD")], vec![scalar_row(1, 1, dom("M"))]);
        assert!(d.is_rectangular());
    }
}
