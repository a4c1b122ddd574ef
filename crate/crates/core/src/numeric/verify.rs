//! Pairing residuals, relative-bound estimates and factorization residuals.

use nalgebra::{Cholesky, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::galerkin::{gram, Basis, BlockModel, CMatrix};
use super::quadrature::QuadratureRule;
use super::sampling::sample_member;
use super::symfun::SymbolicFunction;
use super::Settings;
use crate::block::{BlockOperator, Side};
use crate::domain::ScalarDomain;
use crate::error::{Error, Result};
use crate::expr::FormalExpr;
use crate::gauss::GQ;
use crate::scalar_op::ScalarOperator;

type CVector = DVector<Complex64>;

/// `|⟨τf, g⟩ − ⟨f, τ⁺g⟩|` without any membership check.
pub fn pairing_raw(
    tau: &FormalExpr,
    tau_plus: &FormalExpr,
    f: &SymbolicFunction,
    g: &SymbolicFunction,
    q: &QuadratureRule,
) -> f64 {
    let tf = f.apply(tau).values(&q.nodes);
    let tg = g.apply(tau_plus).values(&q.nodes);
    (q.inner(&tf, &g.values(&q.nodes)) - q.inner(&f.values(&q.nodes), &tg)).norm()
}

/// `|⟨Tf, g⟩ − ⟨f, T*g⟩|` for `f ∈ D(T)`, `g ∈ D(T*)`; membership is checked exactly.
pub fn pairing_residual(
    t: &ScalarOperator,
    f: &SymbolicFunction,
    g: &SymbolicFunction,
    q: &QuadratureRule,
) -> Result<f64> {
    if !f.in_domain(t.dom()) {
        return Err(Error::Membership(format!("f ∉ D(T) = {}", t.dom())));
    }
    let adj = t.adjoint();
    if !g.in_domain(adj.dom()) {
        return Err(Error::Membership(format!("g ∉ D(T*) = {}", adj.dom())));
    }
    Ok(pairing_raw(t.expr(), adj.expr(), f, g, q))
}

pub fn sample_tuple(comps: &[ScalarDomain], rng: &mut ChaCha8Rng) -> Vec<SymbolicFunction> {
    comps.iter().map(|d| sample_member(d, rng)).collect()
}

/// `|⟨𝒜f, g⟩ − ⟨f, 𝒜g⟩|` summed over components.
pub fn block_symmetry_residual(
    block: &BlockOperator,
    f: &[SymbolicFunction],
    g: &[SymbolicFunction],
    q: &QuadratureRule,
) -> f64 {
    let n = block.size();
    let apply = |u: &[SymbolicFunction]| -> Vec<Vec<Complex64>> {
        (0..n)
            .map(|r| {
                let mut acc = SymbolicFunction::zero();
                for (c, uc) in u.iter().enumerate() {
                    acc = acc.add(&uc.apply(block.entry(r, c).expr()));
                }
                acc.values(&q.nodes)
            })
            .collect()
    };
    let (af, ag) = (apply(f), apply(g));
    let mut total = Complex64::new(0.0, 0.0);
    for r in 0..n {
        total += q.inner(&af[r], &g[r].values(&q.nodes)) - q.inner(&f[r].values(&q.nodes), &ag[r]);
    }
    total.norm()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelBoundEstimate {
    /// `sup ‖S e_k‖ / ‖T e_k‖` over the tail modes.
    pub mode_ratio: f64,
    /// Largest generalized singular value over the whole tail subspace.
    pub generalized: f64,
    pub basis: Basis,
    pub galerkin: usize,
}

impl RelBoundEstimate {
    pub fn value(&self) -> f64 {
        self.generalized.max(self.mode_ratio)
    }
}

/// Relative bound of `S` with respect to `T` from the tail `k ∈ (N/2, N]` of a
/// Galerkin basis in `D(T)`.
pub fn estimate_relative_bound(s: &ScalarOperator, t: &ScalarOperator, n: usize) -> Result<RelBoundEstimate> {
    if !t.dom().is_subset(s.dom()) {
        return Err(Error::NotSubset);
    }
    let basis = Basis::for_domain(t.dom()).ok_or_else(|| Error::BasisIncompatible(format!("D(T) = {}", t.dom())))?;
    let tail: Vec<usize> = (n / 2..n).collect();
    let gs = gram(s.expr(), basis, &tail);
    let gt = gram(t.expr(), basis, &tail);
    let mut mode_ratio: f64 = 0.0;
    for k in 0..tail.len() {
        let (ns, nt) = (gs[(k, k)].re, gt[(k, k)].re);
        if nt <= 0.0 {
            if ns > 0.0 {
                mode_ratio = f64::INFINITY;
            }
            continue;
        }
        mode_ratio = mode_ratio.max((ns / nt).sqrt());
    }
    let generalized = generalized_max(&gs, &gt).unwrap_or(mode_ratio);
    Ok(RelBoundEstimate { mode_ratio, generalized, basis, galerkin: n })
}

/// `sqrt(λ_max(G_T⁻¹ G_S))` after diagonal scaling.
fn generalized_max(gs: &CMatrix, gt: &CMatrix) -> Option<f64> {
    let m = gt.nrows();
    let scale: Vec<f64> = (0..m).map(|k| gt[(k, k)].re).collect();
    if scale.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let d = |a: &CMatrix| CMatrix::from_fn(m, m, |j, k| a[(j, k)] / (scale[j] * scale[k]).sqrt());
    let (s, t) = (d(gs), d(gt));
    let chol = Cholesky::new(t)?;
    let l = chol.l();
    let x = l.solve_lower_triangular(&s)?;
    let c = l.solve_lower_triangular(&x.adjoint())?;
    let h = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let top = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    Some(top.max(0.0).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationCheck {
    /// `max ‖(𝒜 − λ)x − RST x‖ / ‖(𝒜 − λ)x‖` over the test vectors.
    pub residual: f64,
    /// Same with the sign of the left corner flipped.
    pub corrupted_residual: f64,
    /// `‖S(λ)x_N − S(λ)x_{N/2}‖ / ‖S(λ)x_N‖`, a convergence diagnostic only.
    pub richardson: f64,
    pub tests: usize,
    pub galerkin: usize,
}

fn random_vector(len: usize, n: usize, modes: usize, rng: &mut ChaCha8Rng) -> CVector {
    let comps = len / n;
    let mut v = CVector::zeros(len);
    for c in 0..comps {
        for k in 0..modes.min(n) {
            // smooth test functions: coefficients decay like k^-2
            let w = 1.0 / ((k + 1) * (k + 1)) as f64;
            v[c * n + k] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
        }
    }
    let norm = v.norm();
    if norm > 0.0 {
        v /= Complex64::new(norm, 0.0);
    }
    v
}

fn shifted(m: &CMatrix, lambda: Complex64) -> CMatrix {
    m - CMatrix::identity(m.nrows(), m.ncols()) * lambda
}

fn resolvent_failure(name: &str) -> Error {
    Error::Hypothesis { rule: "Galerkin resolvent".into(), detail: format!("{name} − λ is singular on the model") }
}

struct Quarters {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

fn quarters(model: &BlockModel) -> Quarters {
    Quarters { a: model.block(0, 0), b: model.block(0, 1), c: model.block(1, 0), d: model.block(1, 1) }
}

/// The 2×2 model at a fixed `λ`, with the inverted diagonal entry factored once.
struct Shifted {
    q: Quarters,
    side: Side,
    a: CMatrix,
    d: CMatrix,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Shifted {
    fn new(q: Quarters, lambda: Complex64, side: Side) -> Self {
        let (a, d) = (shifted(&q.a, lambda), shifted(&q.d, lambda));
        let lu = match side {
            Side::First => d.clone().lu(),
            Side::Second => a.clone().lu(),
        };
        Self { q, side, a, d, lu }
    }

    fn res(&self, v: &CVector) -> Result<CVector> {
        let name = match self.side {
            Side::First => "D",
            Side::Second => "A",
        };
        self.lu.solve(v).ok_or_else(|| resolvent_failure(name))
    }

    /// `S(λ)x` for the Schur complement on this side.
    fn schur(&self, x: &CVector) -> Result<CVector> {
        let q = &self.q;
        Ok(match self.side {
            Side::First => &self.a * x - &q.b * self.res(&(&q.c * x))?,
            Side::Second => &self.d * x - &q.c * self.res(&(&q.b * x))?,
        })
    }

    /// `R·M·T·x` for the three factors; `sign` multiplies the corner of the left factor.
    fn factored(&self, x1: &CVector, x2: &CVector, sign: f64) -> Result<(CVector, CVector)> {
        let q = &self.q;
        let sign = Complex64::new(sign, 0.0);
        match self.side {
            Side::First => {
                let t2 = self.res(&(&q.c * x1))? + x2;
                let s1 = self.schur(x1)?;
                let s2 = &self.d * &t2;
                let out1 = &s1 + &q.b * self.res(&s2)? * sign;
                Ok((out1, s2))
            }
            Side::Second => {
                let t1 = x1 + self.res(&(&q.b * x2))?;
                let s1 = &self.a * &t1;
                let s2 = self.schur(x2)?;
                let out2 = &s2 + &q.c * self.res(&s1)? * sign;
                Ok((s1, out2))
            }
        }
    }
}

/// Residual of the Frobenius–Schur identity on the Galerkin model of a 2×2 block.
pub fn factorization_residual(
    block: &BlockOperator,
    lambda: &GQ,
    side: Side,
    settings: &Settings,
) -> Result<FactorizationCheck> {
    if block.size() != 2 {
        return Err(Error::Dimension("factorization residual needs a 2×2 block".into()));
    }
    let n = settings.galerkin;
    let l = lambda.to_c64();
    let fine = Shifted::new(quarters(&BlockModel::new(block, n)?), l, side);
    let coarse = Shifted::new(quarters(&BlockModel::new(block, n / 2)?), l, side);
    let modes = (n / 2).clamp(1, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let (mut residual, mut corrupted, mut richardson) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..settings.tests {
        let x1 = random_vector(n, n, modes, &mut rng);
        let x2 = random_vector(n, n, modes, &mut rng);
        let y1 = &fine.a * &x1 + &fine.q.b * &x2;
        let y2 = &fine.q.c * &x1 + &fine.d * &x2;
        let ynorm = (y1.norm_squared() + y2.norm_squared()).sqrt();
        for (sign, slot) in [(1.0, &mut residual), (-1.0, &mut corrupted)] {
            let (o1, o2) = fine.factored(&x1, &x2, sign)?;
            let r = ((&y1 - o1).norm_squared() + (&y2 - o2).norm_squared()).sqrt() / ynorm;
            *slot = slot.max(r);
        }
        let x = match side {
            Side::First => &x1,
            Side::Second => &x2,
        };
        let s_fine = fine.schur(x)?;
        let s_rough = coarse.schur(&x.rows(0, n / 2).into_owned())?;
        let mut diff = s_fine.clone();
        for k in 0..n / 2 {
            diff[k] -= s_rough[k];
        }
        richardson = richardson.max(diff.norm() / s_fine.norm());
    }
    Ok(FactorizationCheck { residual, corrupted_residual: corrupted, richardson, tests: settings.tests, galerkin: n })
}

/// `max |⟨S(λ)f, g⟩ − ⟨f, S(λ̄)g⟩|` over unit test pairs, where `S` is the Schur
/// complement on `side` of the block split at `size/2`.
pub fn schur_pairing(block: &BlockOperator, lambda: &GQ, side: Side, settings: &Settings) -> Result<f64> {
    let size = block.size();
    if size < 2 {
        return Err(Error::Dimension("Schur complement needs at least two components".into()));
    }
    let n = settings.galerkin;
    let model = BlockModel::new(block, n)?;
    let k = size / 2;
    let (p, r) = (k * n, (size - k) * n);
    let m = &model.matrix;
    let q = || Quarters {
        a: m.view((0, 0), (p, p)).into_owned(),
        b: m.view((0, p), (p, r)).into_owned(),
        c: m.view((p, 0), (r, p)).into_owned(),
        d: m.view((p, p), (r, r)).into_owned(),
    };
    let l = lambda.to_c64();
    let (at, conj) = (Shifted::new(q(), l, side), Shifted::new(q(), l.conj(), side));
    let len = match side {
        Side::First => p,
        Side::Second => r,
    };
    let modes = (n / 2).clamp(1, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..settings.tests {
        let f = random_vector(len, n, modes, &mut rng);
        let g = random_vector(len, n, modes, &mut rng);
        let lhs = g.dotc(&at.schur(&f)?);
        let rhs = conj.schur(&g)?.dotc(&f);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Numeric evidence about self-adjointness. It cannot see domains: a symmetric
/// expression on too large or too small a domain looks the same here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericEvidence {
    /// `max |⟨𝒜f, g⟩ − ⟨f, 𝒜g⟩|` over sampled `f, g ∈ D(𝒜)`.
    pub pairing_max: f64,
    pub pairs: usize,
    /// `‖G − G*‖_F / ‖G‖_F` for the Galerkin matrix, when a basis fits.
    pub hermitian_defect: Option<f64>,
    /// Worst Schur pairing residual over the sampled `λ`.
    pub schur_pairing: Option<f64>,
    pub galerkin: usize,
    pub domain_blind: bool,
    pub note: String,
}

impl NumericEvidence {
    pub fn consistent(&self, tol: f64) -> bool {
        self.pairing_max <= tol
            && self.hermitian_defect.is_none_or(|d| d <= tol)
            && self.schur_pairing.is_none_or(|d| d <= tol)
    }
}

/// Evidence with the first Schur complement sampled at `λ = ±2i`.
pub fn sa_numeric_evidence(block: &BlockOperator, settings: &Settings) -> NumericEvidence {
    numeric_evidence(block, &[GQ::from_ints(0, 2), GQ::from_ints(0, -2)], Side::First, settings)
}

pub fn numeric_evidence(block: &BlockOperator, lambdas: &[GQ], side: Side, settings: &Settings) -> NumericEvidence {
    let q = QuadratureRule::gauss_legendre(settings.quad_nodes);
    let comps = block.induced_components();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut pairing_max = 0.0f64;
    for _ in 0..settings.tests {
        let f = sample_tuple(&comps, &mut rng);
        let g = sample_tuple(&comps, &mut rng);
        pairing_max = pairing_max.max(block_symmetry_residual(block, &f, &g, &q));
    }
    let mut notes = vec!["numeric evidence is domain-blind".to_string()];
    let hermitian_defect = match BlockModel::new(block, settings.galerkin) {
        Ok(m) => Some(m.hermitian_defect()),
        Err(e) => {
            notes.push(e.to_string());
            None
        }
    };
    let schur = if block.size() >= 2 && hermitian_defect.is_some() {
        let mut worst = None;
        for l in lambdas {
            match schur_pairing(block, l, side, settings) {
                Ok(v) => worst = Some(worst.map_or(v, |w: f64| w.max(v))),
                Err(e) => {
                    notes.push(e.to_string());
                    worst = None;
                    break;
                }
            }
        }
        worst
    } else {
        None
    };
    NumericEvidence {
        pairing_max,
        pairs: settings.tests,
        hermitian_defect,
        schur_pairing: schur,
        galerkin: settings.galerkin,
        domain_blind: true,
        note: notes.join("; "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_op::{builtin, catalog};

    fn b(n: &str) -> ScalarOperator {
        builtin(n).unwrap()
    }

    #[test]
    fn catalog_pairings_vanish() {
        let q = QuadratureRule::gauss_legendre(64);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in catalog() {
            let adj = t.adjoint();
            for _ in 0..10 {
                let f = sample_member(t.dom(), &mut rng);
                let g = sample_member(adj.dom(), &mut rng);
                let r = pairing_residual(&t, &f, &g, &q).unwrap();
                assert!(r <= 1e-10, "{}: {r}", t.label());
            }
        }
    }

    #[test]
    fn membership_is_enforced() {
        let q = QuadratureRule::gauss_legendre(16);
        let x = SymbolicFunction::monomial(GQ::one(), 1);
        assert!(pairing_residual(&b("LD"), &x, &x, &q).is_err());
    }

    #[test]
    fn wrong_adjoint_control() {
        // L on H² paired against L0 as if it were the adjoint
        let q = QuadratureRule::gauss_legendre(64);
        let f = SymbolicFunction::monomial(GQ::one(), 1);
        let g = SymbolicFunction::monomial(GQ::one(), 2);
        let r = pairing_raw(b("L").expr(), b("L0").expr(), &f, &g, &q);
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn relative_bound_estimates() {
        let e = estimate_relative_bound(&b("M0"), &b("LD"), 200).unwrap();
        assert!(e.value() < 0.05, "{e:?}");
        let e = estimate_relative_bound(&b("LD").scale(&GQ::int(2)), &b("LD"), 200).unwrap();
        assert!((e.value() - 2.0).abs() < 1e-9, "{e:?}");
        let e = estimate_relative_bound(&b("LD"), &b("M0"), 200).unwrap();
        assert!(e.value() > 100.0, "{e:?}");
        let e = estimate_relative_bound(&b("LD"), &b("M"), 200);
        assert!(matches!(e, Err(Error::NotSubset)));
        let e = estimate_relative_bound(&b("M0"), &b("L0"), 200);
        assert!(matches!(e, Err(Error::BasisIncompatible(_))));
    }

    #[test]
    fn factorization_identity_on_the_model() {
        let blk = BlockOperator::new(vec![vec![b("LD"), b("M0")], vec![b("M0"), b("LD")]]).unwrap();
        let s = Settings::default();
        for side in [Side::First, Side::Second] {
            let c = factorization_residual(&blk, &GQ::from_ints(0, 2), side, &s).unwrap();
            assert!(c.residual <= 1e-8, "{c:?}");
            assert!(c.corrupted_residual > 0.1, "{c:?}");
        }
    }

    #[test]
    fn evidence_for_a_symmetric_block() {
        let blk = BlockOperator::new(vec![vec![b("LD"), b("M0")], vec![b("M0"), b("LD")]]).unwrap();
        let ev = sa_numeric_evidence(&blk, &Settings::default());
        assert!(ev.consistent(1e-8), "{ev:?}");
        let blk = BlockOperator::new(vec![vec![b("LD"), b("M0")], vec![b("LD"), b("LD")]]).unwrap();
        let ev = sa_numeric_evidence(&blk, &Settings::default());
        assert!(!ev.consistent(1e-8), "{ev:?}");
    }
}
