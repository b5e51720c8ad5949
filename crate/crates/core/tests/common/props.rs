//! Property bodies shared by the proptest suite and the acceptance gate.

use super::TwoStage;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use sullivan_core::fibrations::build_trivial_fibration;
use sullivan_core::lift::{coboundary_twists, realizable_classes};
use sullivan_core::linalg::{kernel_basis, q, rref, rref_dense_path, rref_sparse_path, Matrix, Q};
use sullivan_core::reports::{classify, ClassifyOptions, MapModel};
use sullivan_core::{Cdga, DerivationComplex, FreeCga, Monomial, Polynomial};

type Outcome = Result<(), TestCaseError>;

pub fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    let cols = rows[0].len();
    Matrix::from_rows(cols, rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
}

pub fn differential_squares_to_zero(s: &TwoStage) -> Outcome {
    let a = s.build("");
    for k in 0..=10 {
        let dd = a.differential_matrix(k + 1).mul(&a.differential_matrix(k));
        prop_assert!(dd.is_zero(), "d∘d ≠ 0 from degree {}", k);
    }
    Ok(())
}

pub fn boundary_of_boundary_vanishes(s: &TwoStage) -> Outcome {
    let a = s.build("");
    let c = DerivationComplex::endomorphisms(&a);
    for n in 1..=6 {
        let dd = c.delta_matrix(n).mul(&c.delta_matrix(n + 1));
        prop_assert!(dd.is_zero(), "δ∘δ ≠ 0 on Der_{}", n + 1);
    }
    Ok(())
}

pub fn koszul_double_swap(s: &TwoStage, picks: &[usize]) -> Outcome {
    let a = s.build("");
    let alg = a.algebra();
    let k = alg.arity();
    let mono = |i: usize, j: usize| {
        let mut e = vec![0u32; k];
        e[i % k] += 1;
        e[j % k] += 1;
        alg.normalize_word(&Monomial(e).word()).unwrap()
    };
    let (Some((s1, m1)), Some((s2, m2)), Some((s3, m3))) =
        (mono(picks[0], picks[1]), mono(picks[2], picks[3]), mono(picks[4], picks[0]))
    else {
        return Ok(());
    };
    let p = |sg: i8, m: Monomial| Polynomial::term(alg.ambient(), m, q(i64::from(sg)));
    let (x, y, z) = (p(s1, m1), p(s2, m2), p(s3, m3));
    let dx = alg.homogeneous_degree(&x).unwrap().unwrap_or(0);
    let dy = alg.homogeneous_degree(&y).unwrap().unwrap_or(0);
    let xy = alg.mul(&x, &y);
    let yx = alg.mul(&y, &x);
    let sign = if (dx * dy) % 2 == 1 { q(-1) } else { q(1) };
    prop_assert_eq!(&xy, &yx.scale(&sign));
    // swapping twice is the identity
    prop_assert_eq!(alg.mul(&y, &x).scale(&sign).scale(&sign), yx);
    prop_assert_eq!(alg.mul(&xy, &z), alg.mul(&x, &alg.mul(&y, &z)));
    Ok(())
}

pub fn rank_nullity(rows: &[Vec<i64>]) -> Outcome {
    let m = to_matrix(rows);
    let k = kernel_basis(&m);
    prop_assert_eq!(m.rank() + k.dim(), m.cols());
    for v in k.basis() {
        prop_assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
    }
    Ok(())
}

pub fn rref_is_idempotent(rows: &[Vec<i64>]) -> Outcome {
    let r = rref(&to_matrix(rows));
    let again = rref(&r.matrix);
    prop_assert_eq!(&again.matrix, &r.matrix);
    prop_assert_eq!(again.pivots, r.pivots);
    Ok(())
}

pub fn dense_and_sparse_elimination_agree(rows: &[Vec<i64>]) -> Outcome {
    let m = to_matrix(rows);
    let d = rref_dense_path(&m);
    let s = rref_sparse_path(&m);
    prop_assert_eq!(d.matrix.to_rows(), s.matrix.to_rows());
    prop_assert_eq!(d.pivots, s.pivots);
    Ok(())
}

pub fn kunneth(a: &TwoStage, b: &TwoStage) -> Outcome {
    let a = a.build("p");
    let b = b.build("q");
    let alg = FreeCga::concat(a.algebra(), b.algebra()).unwrap();
    let ka = a.algebra().arity();
    let pa: Vec<usize> = (0..ka).collect();
    let pb: Vec<usize> = (ka..alg.arity()).collect();
    let mut d: Vec<Polynomial> = (0..ka).map(|i| a.algebra().embed(a.differential_of(i), &alg, &pa)).collect();
    d.extend((0..b.algebra().arity()).map(|i| b.algebra().embed(b.differential_of(i), &alg, &pb)));
    let t = Cdga::new(alg, d).unwrap();
    for k in 0..=7u32 {
        let want: usize = (0..=k).map(|i| a.cohomology(i).dim() * b.cohomology(k - i).dim()).sum();
        prop_assert_eq!(t.cohomology(k).dim(), want, "degree {}", k);
    }
    Ok(())
}

/// Builds at `c` times each unit class in the degree of generator `pick`.
/// With `strict` every output must pass its gates; otherwise outputs on
/// killed generators may fail, but a passing one must be realizable.
pub fn builder_gates(s: &TwoStage, kill: &[bool], pick: usize, c: i64, strict: bool) -> Outcome {
    let y = s.build("");
    let p = s.projection(&y, kill);
    let ya = y.algebra();
    let n = ya.degree_of(pick % ya.arity());
    if n < 2 {
        return Ok(());
    }
    let gens = ya.generators_of_degree(n);
    for (j, &g) in gens.iter().enumerate() {
        let mut a = vec![Q::zero(); gens.len()];
        a[j] = q(c);
        let built = build_trivial_fibration(&p, n, &a).unwrap();
        if strict || !p.image(g).is_zero() || c == 0 {
            prop_assert!(built.gates.passed(), "degree {} class {:?}: {:?}", n, a, built.gates.failures);
        } else if built.gates.passed() {
            // a passing certificate must be found by the complete search as well
            let space = realizable_classes(&p, n, coboundary_twists(p.target(), n)).unwrap();
            prop_assert!(space.contains(&a));
        }
    }
    Ok(())
}

pub fn classify_reports_respect_the_chain(s: &TwoStage, kill: &[bool]) -> Outcome {
    let y = s.build("");
    let p = s.projection(&y, kill);
    let mut degrees: Vec<u32> = y.algebra().generators().iter().map(|g| g.degree).filter(|&d| d >= 2).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let reports = classify(&MapModel::from_morphism(p), &degrees, ClassifyOptions { cap: Some(12) }).unwrap();
    for r in &reports {
        prop_assert!(r.check_chain().is_ok());
        let g = &r.g;
        let gc = r.gcal.space().unwrap();
        let sc = r.scal.space().unwrap();
        prop_assert!(g.is_subspace_of(gc));
        prop_assert!(gc.is_subspace_of(sc));
    }
    Ok(())
}
