//! Random members of a domain.
//!
//! A sample is `x^n(1−x)^n · (polynomial + trig term)` plus a polynomial whose
//! boundary jet is a random vector of the kernel of the boundary conditions. The first
//! part has a vanishing jet of order `n`, so the sum satisfies the conditions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::symfun::SymbolicFunction;
use crate::block::BlockOperator;
use crate::boundary::BCMatrix;
use crate::domain::ScalarDomain;
use crate::expr::FormalExpr;
use crate::gauss::GQ;
use crate::linalg::Matrix;
use crate::scalar_op::{catalog, ScalarOperator};

pub fn small_gq(rng: &mut ChaCha8Rng, range: i64) -> GQ {
    GQ::from_ints(rng.gen_range(-range..=range), rng.gen_range(-range..=range))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// The polynomial of degree `< 2n` with boundary jet `jet`.
pub fn hermite(n: usize, jet: &[GQ]) -> SymbolicFunction {
    assert_eq!(jet.len(), 2 * n);
    if n == 0 {
        return SymbolicFunction::zero();
    }
    let m = 2 * n;
    let mut a = Matrix::zeros(m, m + 1);
    for j in 0..n {
        // left: j! a_j
        a.set(j, j, GQ::int(factorial(j)));
        a.set(j, m, jet[j].clone());
        // right: Σ_i i!/(i-j)! a_i
        for i in j..m {
            a.set(n + j, i, GQ::int(factorial(i) / factorial(i - j)));
        }
        a.set(n + j, m, jet[n + j].clone());
    }
    let r = a.rref();
    let coeffs: Vec<GQ> = (0..m).map(|i| r.get(i, m).clone()).collect();
    SymbolicFunction::polynomial(&coeffs)
}

/// `x^n (1 − x)^n`.
pub fn bump(n: usize) -> Vec<GQ> {
    let mut c = vec![GQ::zero(); 2 * n + 1];
    let mut binom: i64 = 1;
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        c[n + k] = GQ::int(sign * binom);
        binom = binom * (n - k) as i64 / (k as i64 + 1);
    }
    c
}

pub fn sample_member(dom: &ScalarDomain, rng: &mut ChaCha8Rng) -> SymbolicFunction {
    let n = dom.sobolev();
    let poly: Vec<GQ> = (0..3).map(|_| small_gq(rng, 3)).collect();
    let k = rng.gen_range(1..=3);
    let trig = if rng.gen_bool(0.5) { SymbolicFunction::sin(k) } else { SymbolicFunction::cos(k) };
    let inner = SymbolicFunction::polynomial(&poly).add(&trig.scale(&small_gq(rng, 2)));
    let mut f = inner.mul_poly(&bump(n));
    if n > 0 {
        let kernel = dom.bc().matrix().kernel();
        let mut jet = vec![GQ::zero(); 2 * n];
        for v in &kernel {
            let c = small_gq(rng, 2);
            for (j, x) in jet.iter_mut().zip(v) {
                *j += &(&c * x);
            }
        }
        f = f.add(&hermite(n, &jet));
    }
    f
}

/// A random member of the operator class: constant coefficients, order at most 4,
/// `H^n` with `n` the order or one more, and up to `2n` random homogeneous conditions.
pub fn random_operator(rng: &mut ChaCha8Rng) -> ScalarOperator {
    let order = rng.gen_range(0..=4usize);
    let mut coeffs: Vec<GQ> = (0..=order).map(|_| small_gq(rng, 2)).collect();
    if coeffs[order].is_zero() {
        coeffs[order] = GQ::one();
    }
    let expr = FormalExpr::new(coeffs).expect("constant coefficients");
    let n = if order < 4 && rng.gen_bool(0.25) { order + 1 } else { order };
    let rows = rng.gen_range(0..=2 * n);
    let m = Matrix::from_rows(
        2 * n,
        (0..rows).map(|_| (0..2 * n).map(|_| GQ::int(rng.gen_range(-2..=2))).collect()).collect(),
    );
    let dom = ScalarDomain::new(n, BCMatrix::new(n, m).expect("layout")).expect("order");
    ScalarOperator::new(expr, dom).expect("order fits")
}

/// A random `n×n` block, `n ≤ 3`, with catalog entries scaled by small integers.
pub fn random_block(rng: &mut ChaCha8Rng) -> BlockOperator {
    let cat = catalog();
    let n = rng.gen_range(1..=3);
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let op = &cat[rng.gen_range(0..cat.len())];
                    match rng.gen_range(0..4) {
                        0 => op.scale(&GQ::int(-1)),
                        1 => op.scale(&GQ::int(2)),
                        _ => op.clone(),
                    }
                })
                .collect()
        })
        .collect();
    BlockOperator::new(rows).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Endpoint;
    use crate::scalar_op::catalog;
    use rand::SeedableRng;

    #[test]
    fn hermite_hits_the_jet() {
        let jet: Vec<GQ> = [1, -2, 0, 3, 5, -1].iter().map(|&v| GQ::int(v)).collect();
        let p = hermite(3, &jet);
        let got = p.jet(3);
        for (g, want) in got.iter().zip(&jet) {
            let v = g.get(&0).cloned().unwrap_or_else(GQ::zero);
            assert_eq!(&v, want);
        }
    }

    #[test]
    fn bump_vanishes_to_order_n() {
        let b = SymbolicFunction::polynomial(&bump(3));
        for j in b.jet(3) {
            assert!(j.is_empty());
        }
        assert!(!b.nth_derivative(3).value_at(Endpoint::Left).is_empty());
    }

    #[test]
    fn samples_lie_in_every_catalog_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for op in catalog() {
            for _ in 0..5 {
                let f = sample_member(op.dom(), &mut rng);
                assert!(f.in_domain(op.dom()), "{} {f}", op.label());
                let adj = op.adjoint();
                let g = sample_member(adj.dom(), &mut rng);
                assert!(g.in_domain(adj.dom()));
            }
        }
    }

    #[test]
    fn samples_lie_in_random_domains() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let op = random_operator(&mut rng);
            let f = sample_member(op.dom(), &mut rng);
            assert!(f.in_domain(op.dom()), "{}", op.label());
            let adj = op.adjoint();
            assert!(sample_member(adj.dom(), &mut rng).in_domain(adj.dom()));
        }
    }
}
