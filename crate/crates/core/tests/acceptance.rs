//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Expected values are built by hand here rather than read
//! back from the library.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use blockop::block::check::{block_closure, check_adjoint, check_composite_adjoint, check_product};
use blockop::block::{BlockOperator, CompositeOperator, Representation, Side, Tri};
use blockop::boundary::{BCMatrix, Endpoint};
use blockop::examples::{regrouped_block, lcal};
use blockop::numeric::quadrature::QuadratureRule;
use blockop::numeric::sampling::{random_block, random_operator, sample_member};
use blockop::numeric::verify::{block_symmetry_residual, sample_tuple};
use blockop::numeric::{estimate_relative_bound, factorization_residual, pairing_residual, Settings, SymbolicFunction};
use blockop::sa::{check_sa, necessary_form, Options, Status};
use blockop::scalar_op::catalog;
use blockop::{builtin, relative_bound, FormalExpr, Matrix, RelBound, ScalarDomain, ScalarOperator, GQ};

// Tolerances and sizes pinned by the criteria.
const CATALOG_ADJOINT_TIME: Duration = Duration::from_secs(1);
const RELBOUND_TIME: Duration = Duration::from_secs(10);
const RELBOUND_N: usize = 200;
const RELBOUND_ZERO_MAX: f64 = 0.05;
const RELBOUND_TWO: (f64, f64) = (1.8, 2.2);
const FACTOR_TOL: f64 = 1e-8;
const FACTOR_TESTS: usize = 25;
const CORRUPTED_MIN: f64 = 0.1;
const PAIRING_TOL: f64 = 1e-10;
const RANDOM_MEMBERS: usize = 100;
const PAIRS_PER_OPERATOR: usize = 10;
const RANDOM_BLOCKS: usize = 100;
const SOUNDNESS_PAIRING_TOL: f64 = 1e-8;
const SOUNDNESS_PAIRS: usize = 25;
const MIN_PRODUCTS: usize = 20;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn gq(re: i64, im: i64) -> GQ {
    GQ::from_ints(re, im)
}

fn expr(coeffs: &[(i64, i64)]) -> FormalExpr {
    FormalExpr::new(coeffs.iter().map(|&(a, b)| gq(a, b)).collect()).unwrap()
}

fn minus_d2() -> FormalExpr {
    expr(&[(0, 0), (0, 0), (-1, 0)])
}

fn i_d() -> FormalExpr {
    expr(&[(0, 0), (0, 1)])
}

fn pinned(order: usize, comps: &[(Endpoint, usize)]) -> ScalarDomain {
    ScalarDomain::new(order, BCMatrix::pinning(order, comps)).unwrap()
}

fn op(e: FormalExpr, d: ScalarDomain) -> ScalarOperator {
    ScalarOperator::new(e, d).unwrap()
}

/// Hand-built catalog: `-D²` on H², with Dirichlet, Neumann, both; `iD` on H¹.
struct Oracle {
    l: ScalarOperator,
    l0: ScalarOperator,
    ld: ScalarOperator,
    ln: ScalarOperator,
    m: ScalarOperator,
    mstar: ScalarOperator,
}

fn oracle() -> Oracle {
    use Endpoint::{Left, Right};
    Oracle {
        l: op(minus_d2(), ScalarDomain::sobolev_space(2)),
        l0: op(minus_d2(), pinned(2, &[(Left, 0), (Left, 1), (Right, 0), (Right, 1)])),
        ld: op(minus_d2(), pinned(2, &[(Left, 0), (Right, 0)])),
        ln: op(minus_d2(), pinned(2, &[(Left, 1), (Right, 1)])),
        m: op(i_d(), pinned(1, &[(Left, 0), (Right, 0)])),
        mstar: op(i_d(), ScalarDomain::sobolev_space(1)),
    }
}

fn b(name: &str) -> ScalarOperator {
    builtin(name).unwrap()
}

fn grid(rows: Vec<Vec<ScalarOperator>>) -> BlockOperator {
    BlockOperator::new(rows).unwrap()
}

fn neg(o: &ScalarOperator) -> ScalarOperator {
    o.scale(&GQ::int(-1))
}

fn same(x: &ScalarOperator, y: &ScalarOperator) -> bool {
    x.expr() == y.expr() && x.dom() == y.dom()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1() -> Outcome {
    let o = oracle();
    let start = Instant::now();
    let got = [
        ("L0", b("L0").adjoint(), &o.l),
        ("LD", b("LD").adjoint(), &o.ld),
        ("LN", b("LN").adjoint(), &o.ln),
        ("M", b("M").adjoint(), &o.mstar),
    ];
    let elapsed = start.elapsed();
    for (name, adj, want) in got {
        ensure(same(&adj, want), format!("{name}* = {adj}, expected {want}"))?;
    }
    ensure(o.mstar.dom().bc().is_empty(), "M* domain carries conditions")?;
    ensure(elapsed < CATALOG_ADJOINT_TIME, format!("took {elapsed:?}"))?;
    Ok(format!("L0*=L, LD*=LD, LN*=LN, M*=iD on H^1 in {elapsed:?}"))
}

fn c2() -> Outcome {
    let o = oracle();
    let inter = b("LD").dom().intersect(b("LN").dom());
    ensure(inter == *o.l0.dom(), format!("D(LD) ∩ D(LN) = {inter}"))?;
    Ok(format!("D(LD) ∩ D(LN) = {inter}"))
}

fn c3() -> Outcome {
    let o = oracle();
    let a = check_adjoint(&lcal());
    ensure(a.closed == Tri::True, "closedness of 𝓛 not proved")?;
    let want = grid(vec![vec![o.l.clone(), o.l.clone()], vec![o.l.clone(), neg(&o.l)]]);
    let adj = a.adjoint_block.as_ref().ok_or("adjoint not computed")?;
    ensure(adj.same_operator(&want), format!("𝓛* = {}", adj.grid()))?;
    ensure(a.formal_equals_adjoint == Some(true), "𝓛^× ≠ 𝓛*")?;
    let formal = lcal().formal_adjoint();
    ensure(formal.same_operator(&want), format!("𝓛^× = {}", formal.grid()))?;
    // The naive matrix [[LD*, LN*], [LN*, -LD*]] lives on D(L0) × D(L0), well inside D(𝓛*).
    let naive = grid(vec![vec![o.ld.clone(), o.ln.clone()], vec![o.ln.clone(), neg(&o.ld)]]);
    ensure(naive.is_restriction_of(&want) && !naive.same_operator(&want), "naive adjoint not strictly inside 𝓛*")?;
    ensure(a.naive_strictly_smaller == Some(true), "engine does not report the strict inclusion")?;
    let cites = ["Theorem 2.1", "Lemma A.1", "Lemma A.2", "Theorem 2.2"];
    for c in cites {
        ensure(a.trace.cites(c), format!("trace does not cite {c}"))?;
    }
    Ok(format!("𝓛 closed, 𝓛* = 𝓛^× = {}, cites {}", want.grid(), cites.join(", ")))
}

fn c4() -> Outcome {
    let o = oracle();
    let p = CompositeOperator::constant(Matrix::from_ints(2, &[&[1, 0], &[1, 0]]));
    let d = CompositeOperator::block(BlockOperator::diag(vec![b("M"), b("Zero")]).unwrap());
    let c = CompositeOperator::product(vec![p, d]);
    let z = ScalarOperator::zero();
    let a = grid(vec![vec![o.m.clone(), z.clone()], vec![o.m.clone(), z]]);
    let r = check_composite_adjoint(&c, &a);
    let dom = r.adjoint_domain.clone().ok_or("adjoint domain not computed")?;
    ensure(dom == "(L^2) × (L^2) with x1 + x2 ∈ H^1", format!("D(𝒜*) = {dom}"))?;
    ensure(r.has_matrix_representation == Some(false), "matrix representation not refuted")?;
    let w = r.witness.clone().ok_or("no witness")?;
    ensure(w == "(x1, -x1) with x1 ∉ H^1", format!("witness {w}"))?;
    // Oracle: x1 + x2 = 0 for the witness, so the pair lies in D(𝒜*) whatever x1 is.
    let x1 = SymbolicFunction::polynomial(&[gq(1, 0), gq(0, 1)]);
    let sum = x1.add(&x1.scale(&GQ::int(-1)));
    ensure(sum.is_zero() && sum.in_domain(o.mstar.dom()), "witness sum not in D(A*)")?;
    Ok(format!("D(𝒜*) = {dom}; no matrix representation; witness {w}"))
}

fn c5() -> Outcome {
    let o = oracle();
    let v = check_sa(&regrouped_block(), &Options::default());
    ensure(v.status == Status::SelfAdjoint, format!("verdict {}", v.status))?;
    ensure(
        v.trace.cites("Example 3.1") && v.trace.cites("Proposition 3.2"),
        "regrouping or diagonal dominance missing from trace",
    )?;
    let a = BlockOperator::diag(vec![b("LD"), b("M0")]).unwrap();
    let bb = BlockOperator::diag(vec![b("M0"), b("LD")]).unwrap();
    let diag = |x: &ScalarOperator, y: &ScalarOperator| BlockOperator::diag(vec![x.clone(), y.clone()]).unwrap();
    let expected = [
        ("closure of A", block_closure(&a), diag(&o.ld, &o.m)),
        ("closure of B", block_closure(&bb), diag(&o.m, &o.ld)),
        ("A*", check_adjoint(&a).adjoint_block, diag(&o.ld, &o.mstar)),
        ("B*", check_adjoint(&bb).adjoint_block, diag(&o.mstar, &o.ld)),
    ];
    for (what, got, want) in expected {
        let got = got.ok_or(format!("{what} not computed"))?;
        ensure(got.same_operator(&want), format!("{what} = {}", got.grid()))?;
    }
    ensure(
        check_adjoint(&a).closed == Tri::False && check_adjoint(&bb).closed == Tri::False,
        "A or B not classified as non-closed",
    )?;
    Ok("𝒜 self-adjoint; Ā, B̄, A*, B* match; A, B not closed".into())
}

fn c6() -> Outcome {
    let start = Instant::now();
    let (m0, ld) = (b("M0"), b("LD"));
    ensure(relative_bound(&m0, &ld) == RelBound::Zero, format!("symbolic bound {}", relative_bound(&m0, &ld)))?;
    let zero = estimate_relative_bound(&m0, &ld, RELBOUND_N).map_err(|e| e.to_string())?.value();
    let two = estimate_relative_bound(&ld.scale(&GQ::int(2)), &ld, RELBOUND_N).map_err(|e| e.to_string())?.value();
    let elapsed = start.elapsed();
    ensure(zero < RELBOUND_ZERO_MAX, format!("estimate for (M0, LD) = {zero}"))?;
    // Oracle: on sin(kπx), ‖M0 e‖/‖LD e‖ = 1/(kπ); the tail starts at k = N/2.
    let tail = 1.0 / (std::f64::consts::PI * (RELBOUND_N / 2) as f64);
    ensure(zero <= 2.0 * tail, format!("estimate {zero} exceeds the sine-mode bound {tail}"))?;
    ensure((RELBOUND_TWO.0..=RELBOUND_TWO.1).contains(&two), format!("estimate for (2LD, LD) = {two}"))?;
    ensure(elapsed < RELBOUND_TIME, format!("took {elapsed:?}"))?;
    Ok(format!("(M0, LD): Zero, estimate {zero:.2e}; (2LD, LD): {two:.4}; {elapsed:?}"))
}

fn c7() -> Outcome {
    let blk = grid(vec![vec![b("LD"), b("M0")], vec![b("M0"), b("LD")]]);
    let settings = Settings { tests: FACTOR_TESTS, ..Settings::default() };
    let r = factorization_residual(&blk, &gq(0, 2), Side::First, &settings).map_err(|e| e.to_string())?;
    ensure(r.tests == FACTOR_TESTS, format!("{} test pairs", r.tests))?;
    ensure(r.residual <= FACTOR_TOL, format!("residual {:e}", r.residual))?;
    ensure(r.corrupted_residual > CORRUPTED_MIN, format!("corrupted residual {:e}", r.corrupted_residual))?;
    Ok(format!("residual {:.2e}, corrupted {:.2e} over {} pairs", r.residual, r.corrupted_residual, r.tests))
}

fn c8() -> Outcome {
    let q = QuadratureRule::gauss_legendre(Settings::default().quad_nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(Settings::default().seed);
    let mut ops = catalog();
    ops.extend((0..RANDOM_MEMBERS).map(|_| random_operator(&mut rng)));
    let mut worst = 0.0f64;
    for t in &ops {
        let adj = t.adjoint();
        for _ in 0..PAIRS_PER_OPERATOR {
            let f = sample_member(t.dom(), &mut rng);
            let g = sample_member(adj.dom(), &mut rng);
            let r = pairing_residual(t, &f, &g, &q).map_err(|e| format!("{}: {e}", t.label()))?;
            worst = worst.max(r);
        }
        ensure(worst <= PAIRING_TOL, format!("{}: pairing residual {worst:e}", t.label()))?;
        let aa = adj.adjoint();
        ensure(same(&aa, &t.closure()), format!("{}: T** = {aa}, closure {}", t.label(), t.closure()))?;
    }
    Ok(format!("{} operators × {PAIRS_PER_OPERATOR} pairs, worst {worst:.2e}; T** = closure", ops.len()))
}

fn c9() -> Outcome {
    let q = QuadratureRule::gauss_legendre(Settings::default().quad_nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(Settings::default().seed);
    let mut blocks: Vec<BlockOperator> = catalog().into_iter().map(|o| grid(vec![vec![o]])).collect();
    blocks.push(lcal());
    blocks.push(regrouped_block());
    blocks.extend((0..RANDOM_BLOCKS).map(|_| random_block(&mut rng)));
    let (mut sa, mut worst) = (0usize, 0.0f64);
    for blk in &blocks {
        if check_sa(blk, &Options::default()).status != Status::SelfAdjoint {
            continue;
        }
        sa += 1;
        ensure(necessary_form(blk).passes(), format!("{} self-adjoint but fails the necessary form", blk.grid()))?;
        let comps = blk.induced_components();
        for _ in 0..SOUNDNESS_PAIRS {
            let f = sample_tuple(&comps, &mut rng);
            let g = sample_tuple(&comps, &mut rng);
            worst = worst.max(block_symmetry_residual(blk, &f, &g, &q));
        }
        ensure(worst <= SOUNDNESS_PAIRING_TOL, format!("{} self-adjoint but pairing residual {worst:e}", blk.grid()))?;
    }
    Ok(format!("{} blocks, {sa} self-adjoint verdicts, worst pairing {worst:.2e}", blocks.len()))
}

/// `u ∈ D(AB)` checked directly: `u ∈ D(B)` and `Bu ∈ D(A)`.
fn in_product_domain(a: &BlockOperator, b: &BlockOperator, u: &[SymbolicFunction]) -> bool {
    let (da, db) = (a.induced_components(), b.induced_components());
    if !u.iter().zip(&db).all(|(f, d)| f.in_domain(d)) {
        return false;
    }
    (0..b.size()).all(|j| {
        let bu = (0..b.size()).fold(SymbolicFunction::zero(), |acc, k| acc.add(&u[k].apply(b.entry(j, k).expr())));
        bu.in_domain(&da[j])
    })
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(Settings::default().seed);
    let names = ["L", "L0", "LD", "LN", "M", "M0", "Mstar", "I", "Zero"];
    let mut pairs: Vec<(BlockOperator, BlockOperator)> = vec![
        (
            BlockOperator::diag(vec![b("M"), b("M")]).unwrap(),
            grid(vec![vec![b("I"), b("Zero")], vec![b("I"), b("Zero")]]),
        ),
        (
            grid(vec![vec![b("I"), b("I")], vec![b("Zero"), b("I")]]),
            BlockOperator::diag(vec![b("M"), b("Mstar")]).unwrap(),
        ),
        (
            BlockOperator::diag(vec![b("LD"), b("LN")]).unwrap(),
            grid(vec![vec![b("M0"), b("M0")], vec![b("Zero"), b("I")]]),
        ),
    ];
    for x in names {
        for y in names {
            pairs.push((
                BlockOperator::diag(vec![b(x), b("I")]).unwrap(),
                grid(vec![vec![b(y), b("I")], vec![b("Zero"), b("I")]]),
            ));
        }
    }
    pairs.extend(
        (0..20).map(|_| (random_block(&mut rng), random_block(&mut rng))).filter(|(a, b)| a.size() == b.size()),
    );
    let (mut checked, mut rect, mut coupled, mut undecided) = (0usize, 0usize, 0usize, 0usize);
    for (a, bb) in &pairs {
        let Ok(p) = check_product(a, bb) else { continue };
        checked += 1;
        let rectangular = matches!(p.representation, Representation::Rectangular { .. });
        let actual = p.actual.as_ref().ok_or("actual domain missing")?;
        // Couplings may still canonicalize away, so only one direction is forced.
        ensure(!actual.is_rectangular() || rectangular, "coupling-free domain not reported rectangular")?;
        ensure(
            p.equal == rectangular,
            format!("{} · {}: equal = {}, rectangular = {rectangular}", a.grid(), bb.grid(), p.equal),
        )?;
        ensure(p.formal_within_actual, format!("{} · {}: formal domain not inside D(AB)", a.grid(), bb.grid()))?;
        let formal = a.formal_product(bb).map_err(|e| e.to_string())?;
        let comps = formal.induced_components();
        for _ in 0..5 {
            let u = sample_tuple(&comps, &mut rng);
            ensure(
                in_product_domain(a, bb, &u),
                format!("{} · {}: sample of the formal domain outside D(AB)", a.grid(), bb.grid()),
            )?;
        }
        match p.representation {
            Representation::Rectangular { .. } => rect += 1,
            Representation::Coupled { .. } => coupled += 1,
            Representation::Undecided { .. } => undecided += 1,
        }
    }
    ensure(checked >= MIN_PRODUCTS, format!("only {checked} products"))?;
    ensure(coupled > 0, "no coupled product among the instances")?;
    Ok(format!("{checked} products: {rect} rectangular, {coupled} coupled, {undecided} undecided"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("catalog adjoints", c1),
        ("domain identity", c2),
        ("block 𝓛 end-to-end", c3),
        ("coupled adjoint domain end-to-end", c4),
        ("4×4 regrouping end-to-end", c5),
        ("relative bounds", c6),
        ("Frobenius-Schur numeric", c7),
        ("adjoint pairing property suite", c8),
        ("soundness property", c9),
        ("formal versus actual products", c10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
