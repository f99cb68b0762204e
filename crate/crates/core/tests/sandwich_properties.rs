use engelkit::nilgroup::{free_nilpotent, ClassBound, GroupElement, QuotientPresentation};
use engelkit::sandwich::{
    certify_commutator_identity, certify_rank3_strong_class, check_closure, relators_for, strong_rank3_quotient,
    InstantiationBall, RelatorMode, SandwichFamily, SandwichKind, VerifierConfig,
};
use proptest::prelude::*;

fn class_rank(c: ClassBound) -> usize {
    match c {
        ClassBound::Exact(k) => k,
        ClassBound::AtLeast(k) => k + 1,
    }
}

#[test]
fn relators_vanish_in_class_two_images() {
    // Every subgroup of a class-2 group has class ≤ 2, so all kinds hold there.
    for kind in [SandwichKind::Sandwich, SandwichKind::Strong, SandwichKind::PartialStrong] {
        let p = free_nilpotent(3, 5).unwrap();
        let family = SandwichFamily::on_generators(&p, kind).unwrap();
        let gamma3: Vec<GroupElement> = p.layer(3).map(|k| GroupElement::pc_generator(&p, k + 1).unwrap()).collect();
        let image = QuotientPresentation::new(&p, &gamma3).unwrap();
        for r in relators_for(&family, InstantiationBall::new(1), RelatorMode::Full, 1_000_000).unwrap() {
            assert!(image.is_trivial(&r).unwrap(), "{kind}: {r}");
        }
    }
}

#[test]
fn certificates_are_deterministic() {
    let cfg = VerifierConfig::default();
    let a = certify_commutator_identity(&cfg).unwrap();
    let b = certify_commutator_identity(&cfg).unwrap();
    assert_eq!(a.payload(), b.payload());
    let a = certify_rank3_strong_class(&cfg).unwrap();
    let b = certify_rank3_strong_class(&cfg).unwrap();
    assert_eq!(a.payload(), b.payload());
}

#[test]
fn closure_is_stable_under_iteration() {
    let cfg = VerifierConfig { closure_radius: 1, ..VerifierConfig::default() };
    let (family, _, q) = strong_rank3_quotient(&cfg).unwrap();
    assert!(q.class().at_most(3));
    let report = check_closure(&family, &q, (0, 1), 1).unwrap();
    assert!(report.failure.is_none());

    let t = family.labels()[0].commutator(&family.labels()[1]).unwrap();
    let mut labels = family.labels().to_vec();
    labels.push(t);
    let extended = SandwichFamily::new(family.presentation(), labels, SandwichKind::Strong).unwrap();
    for c in 0..3 {
        let report = check_closure(&extended, &q, (3, c), 1).unwrap();
        assert!(report.failure.is_none(), "pair ([a,b], x{})", c + 1);
    }
}

#[test]
fn degenerate_pair_passes_trivially() {
    let cfg = VerifierConfig::default();
    let (family, _, q) = strong_rank3_quotient(&cfg).unwrap();
    let report = check_closure(&family, &q, (0, 0), 1).unwrap();
    assert!(report.failure.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Adding relators never raises the class.
    #[test]
    fn class_is_monotone_in_relators(mask in prop::collection::vec(any::<bool>(), 64), extra in prop::collection::vec(any::<bool>(), 64)) {
        let p = free_nilpotent(3, 4).unwrap();
        let family = SandwichFamily::on_generators(&p, SandwichKind::Strong).unwrap();
        let rels = relators_for(&family, InstantiationBall::new(1), RelatorMode::Minimal, 1_000_000).unwrap();
        let pick = |m: &[bool]| rels.iter().enumerate().filter(|(i, _)| m[i % m.len()]).map(|(_, r)| r.clone()).collect::<Vec<_>>();
        let small = pick(&mask);
        let mut big = small.clone();
        big.extend(pick(&extra));
        let (q1, q2) = (QuotientPresentation::new(&p, &small).unwrap(), QuotientPresentation::new(&p, &big).unwrap());
        prop_assert!(class_rank(q2.class()) <= class_rank(q1.class()));
        for r in &small {
            prop_assert!(q2.is_trivial(r).unwrap());
        }
    }
}
