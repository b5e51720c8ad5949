use sullivan_core::fibrations::KsExtension;
use sullivan_core::linalg::q;
use sullivan_core::reports::{classify, ClassifyOptions, MapModel, SubgroupStatus, Verdict};
use sullivan_core::{Cdga, FreeCga, Generator, Morphism};

fn s4() -> Cdga {
    let a = FreeCga::from_degrees(&[("w4", 4), ("w7", 7)]).unwrap();
    Cdga::new(a.clone(), vec![a.zero(), a.pow(&a.gen(0), 2)]).unwrap()
}

fn dims(r: &SubgroupStatus) -> (usize, usize, Option<usize>, Option<usize>, Option<usize>) {
    let d = |v: &Verdict| v.space().map(|s| s.dim());
    (r.pi_rank, r.g.dim(), d(&r.gcal), d(&r.tcal), d(&r.scal))
}

fn has_tag(r: &SubgroupStatus, tag: &str) -> bool {
    r.evidence.iter().any(|e| e.tag == tag && e.verified)
}

#[test]
fn hopf_fibration() {
    let s4 = s4();
    let fg = vec![Generator::new("v3", 3)];
    let t = KsExtension::total_algebra(&s4, &fg).unwrap();
    let hopf = KsExtension::new(s4, fg, vec![t.gen(0)]).unwrap();
    let r = classify(&MapModel::from_ks(hopf), &[4], ClassifyOptions::default()).unwrap();
    assert_eq!(dims(&r[0]), (1, 1, Some(1), Some(1), Some(1)));
    assert!(has_tag(&r[0], "single-fiber-generator"));
}

#[test]
fn hopf_times_sphere() {
    let a = FreeCga::from_degrees(&[("w4", 4), ("w7", 7), ("u4", 4), ("u7", 7)]).unwrap();
    let y = Cdga::new(
        a.clone(),
        vec![a.zero(), a.pow(&a.gen(0), 2), a.zero(), a.pow(&a.gen(2), 2)],
    )
    .unwrap();
    let fg = vec![Generator::new("v3", 3)];
    let t = KsExtension::total_algebra(&y, &fg).unwrap();
    let ks = KsExtension::new(y, fg, vec![t.gen(0)]).unwrap();
    let r = classify(&MapModel::from_ks(ks), &[4], ClassifyOptions::default()).unwrap();
    assert_eq!(r[0].g.dim(), 1);
    assert_eq!(r[0].gcal.exact().map(|s| s.dim()), Some(2));
}

#[test]
fn projection_killing_a_middle_generator() {
    let ya = FreeCga::from_degrees(&[("w3", 3), ("w5", 5), ("w7", 7), ("w9", 9)]).unwrap();
    let y = Cdga::new(
        ya.clone(),
        vec![ya.zero(), ya.zero(), ya.mul(&ya.gen(0), &ya.gen(1)), ya.mul(&ya.gen(0), &ya.gen(2))],
    )
    .unwrap();
    let xa = FreeCga::from_degrees(&[("w3", 3), ("w7", 7), ("w9", 9)]).unwrap();
    let x = Cdga::new(xa.clone(), vec![xa.zero(), xa.zero(), xa.mul(&xa.gen(0), &xa.gen(1))]).unwrap();
    let p = Morphism::new(y, x, vec![xa.gen(0), xa.zero(), xa.gen(1), xa.gen(2)]).unwrap();
    let r = classify(&MapModel::from_morphism(p), &[3, 5, 7, 9], ClassifyOptions::default()).unwrap();
    assert_eq!(dims(&r[0]), (1, 0, Some(1), Some(1), Some(1)));
    // the killed generator w5 enters d(w7), so no lift over the product exists
    assert_eq!(dims(&r[1]), (1, 0, Some(0), Some(0), Some(1)));
    assert!(!has_tag(&r[1], "injective-projection"));
    assert_eq!(dims(&r[2]), (1, 0, Some(1), Some(1), Some(1)));
    assert_eq!(dims(&r[3]), (1, 1, Some(1), Some(1), Some(1)));
}

#[test]
fn collapse_onto_top_cell() {
    let ya = FreeCga::from_degrees(&[("w6", 6), ("w11", 11)]).unwrap();
    let y = Cdga::new(ya.clone(), vec![ya.zero(), ya.pow(&ya.gen(0), 2)]).unwrap();
    let xa = FreeCga::from_degrees(&[("u3", 3), ("v3", 3)]).unwrap();
    let f = Morphism::new(y, Cdga::formal(xa.clone()), vec![xa.mul(&xa.gen(0), &xa.gen(1)), xa.zero()]).unwrap();
    let r = classify(&MapModel::from_morphism(f), &[6], ClassifyOptions::default()).unwrap();
    assert_eq!(dims(&r[0]), (1, 0, Some(0), Some(0), Some(0)));
    assert!(has_tag(&r[0], "fiber-below-degree"));
    assert!(has_tag(&r[0], "no-fibrations-over-sphere"));
}

#[test]
fn projective_space_fibers() {
    let xa = FreeCga::from_degrees(&[("v2", 2), ("w7", 7)]).unwrap();
    let x = Cdga::new(xa.clone(), vec![xa.zero(), xa.pow(&xa.gen(0), 4)]).unwrap();
    let f = Morphism::new(s4(), x, vec![xa.pow(&xa.gen(0), 2), xa.gen(1)]).unwrap();
    let r = classify(&MapModel::from_morphism(f), &[4], ClassifyOptions::default()).unwrap();
    assert_eq!(dims(&r[0]), (1, 0, Some(0), Some(1), Some(1)));
    assert!(matches!(r[0].tcal, Verdict::Exact(_)));

    let xa = FreeCga::from_degrees(&[("v2", 2), ("v5", 5)]).unwrap();
    let x = Cdga::new(xa.clone(), vec![xa.zero(), xa.pow(&xa.gen(0), 3)]).unwrap();
    let f = Morphism::new(s4(), x, vec![xa.pow(&xa.gen(0), 2), xa.mul(&xa.gen(0), &xa.gen(1))]).unwrap();
    let r = classify(&MapModel::from_morphism(f), &[4], ClassifyOptions::default()).unwrap();
    assert_eq!(dims(&r[0]), (1, 0, Some(0), Some(1), Some(1)));
}

#[test]
fn free_loop_fiber_inclusion() {
    let ya = FreeCga::from_degrees(&[("x", 2), ("y", 3), ("xb", 1), ("yb", 2)]).unwrap();
    let y = Cdga::new(
        ya.clone(),
        vec![ya.zero(), ya.pow(&ya.gen(0), 2), ya.zero(), ya.mul(&ya.gen(0), &ya.gen(2)).scale(&q(2))],
    )
    .unwrap();
    let xa = FreeCga::from_degrees(&[("xb", 1), ("yb", 2)]).unwrap();
    let i = Morphism::new(y, Cdga::formal(xa.clone()), vec![xa.zero(), xa.zero(), xa.gen(0), xa.gen(1)]).unwrap();
    let r = classify(&MapModel::from_morphism(i), &[2], ClassifyOptions::default()).unwrap();
    // the section class x* needs a twist acting nontrivially on the fiber
    assert_eq!(dims(&r[0]), (2, 1, Some(1), Some(1), Some(2)));
    let t = r[0].tcal.exact().unwrap();
    assert!(t.contains(&[q(0), q(1)]));
    assert!(!t.contains(&[q(1), q(0)]));
}
